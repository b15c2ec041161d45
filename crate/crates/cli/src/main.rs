use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use granlower::ast::CalendarDoc;
use granlower::convert::gstp_relabel;
use granlower::granularity::{Bounds, RepJson};
use granlower::{
    compare_with_periodic, eval_window, parse_calendar, rewrite_to_bottom, Converter, Granularity, GranuleSet,
    Limits, PeriodicRep,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Parser)]
#[command(name = "granlower", version, about = "Lower calendar granularity definitions to periodic representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert every definition (or one) to its periodic representation.
    Convert {
        file: PathBuf,
        #[arg(long)]
        target: Option<String>,
        #[command(flatten)]
        min: MinimizeFlags,
        /// Relabel so the first granule starting after instant 0 is 1.
        #[arg(long)]
        gstp: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// List the bottom instants of a range of labels.
    Expand {
        file: PathBuf,
        name: String,
        /// Inclusive label range such as `1..10` or `-3..3`.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        labels: (i64, i64),
    },
    /// Check every definition against brute-force evaluation.
    Verify {
        file: PathBuf,
        /// Window width in bottom instants; raised to three periods if smaller.
        #[arg(long)]
        window: Option<i64>,
        /// Moves the window by a random offset of up to one period.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        min: MinimizeFlags,
        /// Perturb one representation so that verification must fail.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Label of the granule containing a bottom instant.
    Up {
        file: PathBuf,
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        instant: i64,
    },
}

#[derive(Args)]
struct MinimizeFlags {
    #[arg(long, overrides_with = "no_minimize")]
    minimize: bool,
    #[arg(long)]
    no_minimize: bool,
}

impl MinimizeFlags {
    fn enabled(&self) -> bool {
        !self.no_minimize
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("bad range start {a:?}: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad range end {b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn fail<T>(code: u8, message: impl Into<String>) -> Result<T, Failure> {
    Err(Failure {
        code,
        message: message.into(),
    })
}

const USAGE: u8 = 1;
const INVALID: u8 = 2;
const CONVERSION: u8 = 3;
const MISMATCH: u8 = 4;

fn load(path: &PathBuf) -> Result<CalendarDoc, Failure> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(USAGE, format!("cannot read {}: {e}", path.display())),
    };
    parse_calendar(&text).or_else(|e| fail(INVALID, format!("{}: {e}", path.display())))
}

fn limits() -> Result<Limits, Failure> {
    Limits::from_env().or_else(|e| fail(USAGE, e))
}

fn all_names(doc: &CalendarDoc) -> Vec<String> {
    doc.names().map(str::to_string).collect()
}

fn check_name(doc: &CalendarDoc, name: &str) -> Result<(), Failure> {
    if name == doc.bottom || doc.get(name).is_some() {
        Ok(())
    } else {
        fail(USAGE, format!("no definition named `{name}`"))
    }
}

fn convert_one(doc: &CalendarDoc, conv: &mut Converter, name: &str) -> Result<Granularity, Failure> {
    let expr = rewrite_to_bottom(doc, name).or_else(|e| fail(INVALID, format!("{name}: {e}")))?;
    conv.convert(&expr).or_else(|e| fail(CONVERSION, format!("{name}: {e}")))
}

fn bounds_text(b: Option<Bounds>) -> String {
    match b {
        None => "none".into(),
        Some(b) => {
            let lo = b.first.map_or("-inf".to_string(), |v| v.to_string());
            let hi = b.last.map_or("inf".to_string(), |v| v.to_string());
            format!("[{lo},{hi}]")
        }
    }
}

fn set_text(s: &GranuleSet) -> String {
    s.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

fn rep_text(g: &Granularity, out: &mut String) {
    match g {
        Granularity::Empty => {
            let _ = writeln!(out, "empty | P=1 N=1 bounds=none");
        }
        Granularity::Periodic(r) => {
            let tail = format!("P={} N={} bounds={}", r.period(), r.label_distance(), bounds_text(r.bounds()));
            for (label, set) in r.granules() {
                let _ = writeln!(out, "{label}: {} | {tail}", set_text(set));
            }
        }
    }
}

fn rep_value(g: &Granularity) -> serde_json::Value {
    serde_json::to_value(RepJson::from(g)).expect("representations serialize")
}

fn cmd_convert(
    file: &PathBuf,
    target: Option<String>,
    minimize: bool,
    gstp: bool,
    format: Format,
) -> Result<String, Failure> {
    let doc = load(file)?;
    let names = match &target {
        Some(t) => {
            check_name(&doc, t)?;
            vec![t.clone()]
        }
        None => all_names(&doc),
    };
    let mut conv = Converter::new(minimize).with_limits(limits()?);
    let mut results = Vec::with_capacity(names.len());
    for name in names {
        let mut g = convert_one(&doc, &mut conv, &name)?;
        if gstp && !g.is_empty() {
            g = gstp_relabel(&g).or_else(|e| fail(CONVERSION, format!("{name}: {e}")))?;
        }
        results.push((name, g));
    }
    let mut out = String::new();
    match (format, target.is_some()) {
        (Format::Json, true) => {
            let _ = writeln!(out, "{}", rep_value(&results[0].1));
        }
        (Format::Json, false) => {
            // one definition per line keeps large outputs diffable
            let rows: Vec<String> = results
                .iter()
                .map(|(n, g)| serde_json::json!({ "name": n, "rep": rep_value(g) }).to_string())
                .collect();
            let _ = writeln!(out, "[\n  {}\n]", rows.join(",\n  "));
        }
        (Format::Text, single) => {
            for (name, g) in &results {
                if !single {
                    let _ = writeln!(out, "# {name}");
                }
                rep_text(g, &mut out);
            }
        }
    }
    Ok(out)
}

fn cmd_expand(file: &PathBuf, name: &str, (a, b): (i64, i64)) -> Result<String, Failure> {
    let doc = load(file)?;
    check_name(&doc, name)?;
    let g = convert_one(&doc, &mut Converter::new(true).with_limits(limits()?), name)?;
    let mut out = String::new();
    for j in a..=b {
        let s = g.expand(j);
        if s.is_empty() {
            let _ = writeln!(out, "{j}: empty");
        } else {
            let _ = writeln!(out, "{j}: {}", set_text(&s));
        }
    }
    Ok(out)
}

fn cmd_up(file: &PathBuf, name: &str, t: i64) -> Result<String, Failure> {
    let doc = load(file)?;
    check_name(&doc, name)?;
    let g = convert_one(&doc, &mut Converter::new(true).with_limits(limits()?), name)?;
    Ok(match g.up(t) {
        Some(j) => format!("{j}\n"),
        None => "none\n".into(),
    })
}

/// Moves the last instant of one granule one step later, or drops it when
/// that would collide with another granule.
fn perturb(rep: &PeriodicRep) -> Option<PeriodicRep> {
    for idx in 0..rep.granule_count() {
        let mut granules = rep.granules().to_vec();
        let set = &granules[idx].1;
        let last = set.last()?;
        let mut moved: Vec<i64> = set.iter().filter(|&t| t != last).collect();
        if rep.up_unbounded(last + 1).is_none() {
            moved.push(last + 1);
        } else if moved.is_empty() {
            continue;
        }
        granules[idx].1 = GranuleSet::new(moved);
        if let Ok(r) = PeriodicRep::new(rep.period(), rep.label_distance(), granules) {
            return Some(r.with_bounds(rep.bounds()));
        }
    }
    None
}

fn cmd_verify(
    file: &PathBuf,
    window: Option<i64>,
    seed: Option<u64>,
    minimize: bool,
    inject_fault: bool,
) -> Result<String, Failure> {
    let doc = load(file)?;
    let limits = limits()?;
    let names = all_names(&doc);
    let mut plain = Converter::new(false).with_limits(limits);
    let mut conv = Converter::new(minimize).with_limits(limits);
    let mut defs = Vec::with_capacity(names.len());
    for name in &names {
        let expr = rewrite_to_bottom(&doc, name).or_else(|e| fail(INVALID, format!("{name}: {e}")))?;
        let period = plain
            .convert(&expr)
            .or_else(|e| fail(CONVERSION, format!("{name}: {e}")))?
            .period();
        let g = conv.convert(&expr).or_else(|e| fail(CONVERSION, format!("{name}: {e}")))?;
        defs.push((name.clone(), expr, period, g));
    }
    let max_period = defs.iter().map(|d| d.2).max().unwrap_or(1);
    let needed = 3 * max_period;
    let width = match window {
        Some(w) if w < needed => {
            eprintln!("warning: window {w} is smaller than three periods; using {needed}");
            needed
        }
        Some(w) => w,
        None => needed,
    };
    let offset = seed.map_or(0, |s| StdRng::seed_from_u64(s).gen_range(-max_period..=max_period));
    if inject_fault {
        let hit = defs.iter_mut().find_map(|(name, _, _, g)| {
            let bad = perturb(g.as_periodic()?)?;
            *g = bad.into();
            Some(name.clone())
        });
        match hit {
            Some(name) => eprintln!("injected a fault into `{name}`"),
            None => return fail(USAGE, "no definition can be perturbed"),
        }
    }
    let lo = 1 - max_period + offset;
    let hi = lo + width - 1;
    let mut out = String::new();
    let mut failed = 0;
    for (name, expr, period, g) in &defs {
        let w = match eval_window(expr, lo, hi, *period) {
            Ok(w) => w,
            Err(e) => {
                failed += 1;
                let _ = writeln!(out, "{name}: FAIL (oracle: {e})");
                continue;
            }
        };
        let report = compare_with_periodic(&w, g);
        if report.passed() {
            let _ = writeln!(out, "{name}: PASS ({} granules)", report.compared);
        } else {
            failed += 1;
            let m = &report.mismatches[0];
            let show = |s: &Option<GranuleSet>| s.as_ref().map_or("none".to_string(), |s| format!("{{{}}}", set_text(s)));
            let _ = writeln!(
                out,
                "{name}: FAIL ({} mismatches; label {}: oracle {} vs rep {})",
                report.mismatches.len(),
                m.label,
                show(&m.oracle),
                show(&m.rep)
            );
        }
    }
    let _ = writeln!(
        out,
        "window [{lo}, {hi}]: {} of {} definitions pass",
        defs.len() - failed,
        defs.len()
    );
    if failed > 0 {
        print!("{out}");
        return fail(MISMATCH, format!("{failed} definitions failed verification"));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Convert {
            file,
            target,
            min,
            gstp,
            format,
        } => cmd_convert(&file, target, min.enabled(), gstp, format),
        Command::Expand { file, name, labels } => cmd_expand(&file, &name, labels),
        Command::Verify {
            file,
            window,
            seed,
            min,
            inject_fault,
        } => cmd_verify(&file, window, seed, min.enabled(), inject_fault),
        Command::Up { file, name, instant } => cmd_up(&file, &name, instant),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
