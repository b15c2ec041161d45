use std::collections::BTreeSet;

use super::ops::{common_period, from_lhat, stretched_distance, unbounded};
use super::{Limits, OpError};
use crate::granularity::{contained_labels, intersecting_labels, Granularity, Label, PeriodicRep};

/// `Δ_k^l`: `l` elements starting at 1-based position `k`. A negative `k`
/// counts from the end (`-1` is the last element). Positions that fall
/// outside `s` are dropped.
pub fn delta_select(s: &[Label], k: i64, l: i64) -> Vec<Label> {
    if k == 0 || l <= 0 {
        return Vec::new();
    }
    let len = s.len() as i64;
    let start = if k > 0 { k } else { len + k + 1 };
    (start..start.saturating_add(l))
        .filter(|&p| 1 <= p && p <= len)
        .map(|p| s[(p - 1) as usize])
        .collect()
}

fn check_kl(op: &str, k: i64, l: i64) -> Result<(), OpError> {
    if k == 0 || l <= 0 {
        Err(OpError::Parameter(format!("{op} needs k != 0 and l > 0, got k={k}, l={l}")))
    } else {
        Ok(())
    }
}

fn finish(
    g1: &PeriodicRep,
    period: i64,
    label_distance: i64,
    labels: BTreeSet<Label>,
) -> Result<Granularity, OpError> {
    let granules = labels.into_iter().map(|a| (a, g1.expand(a))).collect();
    from_lhat(period, label_distance, granules)
}

/// Granules of `g1` picked by position among those inside each granule of
/// `g2`.
pub fn convert_select_down(
    g1: &PeriodicRep,
    g2: &PeriodicRep,
    k: i64,
    l: i64,
    limits: &Limits,
) -> Result<Granularity, OpError> {
    unbounded(&[g1, g2])?;
    check_kl("selectdown", k, l)?;
    let period = common_period(g1, g2, limits)?;
    let label_distance = stretched_distance(g1, period)?;
    let covering1: BTreeSet<Label> = g1.lhat(period)?.into_iter().collect();
    let mut picked = BTreeSet::new();
    for i in g2.lhat(period)? {
        let inside = contained_labels(g1, &g2.expand(i));
        picked.extend(
            delta_select(&inside, k, l)
                .into_iter()
                .filter(|a| covering1.contains(a)),
        );
    }
    finish(g1, period, label_distance, picked)
}

/// Granules of `g1` that contain at least one granule of `g2`.
pub fn convert_select_up(g1: &PeriodicRep, g2: &PeriodicRep, limits: &Limits) -> Result<Granularity, OpError> {
    unbounded(&[g1, g2])?;
    let period = common_period(g1, g2, limits)?;
    let label_distance = stretched_distance(g1, period)?;
    let picked = g1
        .lhat(period)?
        .into_iter()
        .filter(|&i| !contained_labels(g2, &g1.expand(i)).is_empty())
        .collect();
    finish(g1, period, label_distance, picked)
}

/// Granules of `g1` picked by position among those meeting each granule
/// of `g2`.
///
/// A granule of `g1` covering part of `[1, P']` can be selected by a granule
/// of `g2` lying entirely past `P'`, so the `g2` labels come from the
/// granules that meet the covering `g1` granules rather than from `g2`'s own
/// covering set.
pub fn convert_select_intersect(
    g1: &PeriodicRep,
    g2: &PeriodicRep,
    k: i64,
    l: i64,
    limits: &Limits,
) -> Result<Granularity, OpError> {
    unbounded(&[g1, g2])?;
    check_kl("selectintersect", k, l)?;
    let period = common_period(g1, g2, limits)?;
    let label_distance = stretched_distance(g1, period)?;
    let covering1: BTreeSet<Label> = g1.lhat(period)?.into_iter().collect();
    let mut containers = BTreeSet::new();
    for &a in &covering1 {
        containers.extend(intersecting_labels(g2, &g1.expand(a)));
    }
    let mut picked = BTreeSet::new();
    for i in containers {
        let meeting = intersecting_labels(g1, &g2.expand(i));
        picked.extend(
            delta_select(&meeting, k, l)
                .into_iter()
                .filter(|a| covering1.contains(a)),
        );
    }
    finish(g1, period, label_distance, picked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::convert_group;
    use crate::granularity::GranuleSet;

    #[test]
    fn delta_positions() {
        let s = [10, 20, 30];
        assert_eq!(delta_select(&s, -1, 1), vec![30]);
        assert_eq!(delta_select(&s, 1, 3), s.to_vec());
        assert_eq!(delta_select(&s, 2, 5), vec![20, 30]);
        assert_eq!(delta_select(&s, 4, 1), Vec::<i64>::new());
        assert_eq!(delta_select(&s, -2, 2), vec![20, 30]);
        assert_eq!(delta_select(&s, -4, 2), vec![10]);
        let thursdays = [3, 10, 17, 24];
        assert_eq!(delta_select(&thursdays, 4, 1), vec![24]);
    }

    #[test]
    fn weekdays_of_weeks() {
        let day = PeriodicRep::bottom();
        let lim = Limits::default();
        let week = convert_group(&day, 7, &lim).unwrap();
        let week = week.as_periodic().unwrap();
        let sunday = convert_select_down(&day, week, 7, 1, &lim).unwrap();
        let sunday = sunday.as_periodic().unwrap();
        assert_eq!((sunday.period(), sunday.label_distance()), (7, 7));
        assert_eq!(sunday.granules(), &[(7, GranuleSet::singleton(7))]);

        let up = convert_select_up(week, sunday, &lim).unwrap();
        assert_eq!(up.as_periodic(), Some(week));
        let first = convert_select_intersect(&day, week, 1, 1, &lim).unwrap();
        assert_eq!(first.as_periodic().unwrap().granules(), &[(1, GranuleSet::singleton(1))]);
    }

    #[test]
    fn disjoint_operands_select_nothing() {
        let lim = Limits::default();
        let day = PeriodicRep::bottom();
        let week = convert_group(&day, 7, &lim).unwrap();
        let week = week.as_periodic().unwrap();
        let sunday = convert_select_down(&day, week, 7, 1, &lim).unwrap();
        let monday = convert_select_down(&day, week, 1, 1, &lim).unwrap();
        let (sunday, monday) = (sunday.as_periodic().unwrap(), monday.as_periodic().unwrap());
        assert_eq!(
            convert_select_intersect(sunday, monday, 1, 1, &lim).unwrap(),
            Granularity::Empty
        );
        assert_eq!(convert_select_up(sunday, monday, &lim).unwrap(), Granularity::Empty);
    }
}
