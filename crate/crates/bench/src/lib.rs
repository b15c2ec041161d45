//! Calendars used by the benchmarks.

use granlower::{parse_calendar, rewrite_to_bottom, CalendarDoc, Converter, Granularity};

pub const GREGORIAN: &str = include_str!("../../../fixtures/gregorian.cal");
pub const WEEKS: &str = include_str!("../../../fixtures/weeks.cal");

/// The Gregorian calendar built on a `day` whose representation has twice
/// the minimal period.
pub fn gregorian_doubled_day() -> String {
    let mut out = String::new();
    for line in GREGORIAN.lines() {
        if line.contains('=') {
            out.push_str(&line.replace(", day", ", dday"));
        } else {
            out.push_str(line);
            if line.starts_with("calendar") {
                out.push_str("\ndday = selectdown(1, 2, day, group(2, day));");
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> CalendarDoc {
    parse_calendar(text).expect("benchmark calendars are valid")
}

/// Converts every definition with one shared cache.
pub fn convert_all(doc: &CalendarDoc, minimize: bool) -> Vec<Granularity> {
    let mut conv = Converter::new(minimize);
    doc.names()
        .map(|n| conv.convert(&rewrite_to_bottom(doc, n).unwrap()).unwrap())
        .collect()
}
