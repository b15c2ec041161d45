//! Periodic granularity representations.
//!
//! A [`PeriodicRep`] describes a granularity by a period length `P` (in
//! bottom granules), a period label distance `N`, and the explicit granules
//! whose labels fall in one window `[b, b + N - 1]`. Every other granule is a
//! translate: `G(j + N) = G(j) + P`.
//!
//! Conversions keep their results *aligned*: the window starts at the label
//! `l_G` of the granule covering the smallest positive bottom index that the
//! granularity covers at all.

mod json;
mod set;

use std::collections::BTreeSet;

pub use json::{Bound, BoundsJson, JsonError, LabelJson, RepJson};
pub use set::GranuleSet;

use crate::arith::{self, Overflow};

pub type Label = i64;
pub type Instant = i64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepError {
    #[error("period length must be positive, got {0}")]
    NonPositivePeriod(i64),
    #[error("period label distance must be positive, got {0}")]
    NonPositiveLabelDistance(i64),
    #[error("a periodic representation needs at least one explicit granule")]
    NoGranules,
    #[error("explicit granule {0} is empty")]
    EmptyGranule(Label),
    #[error("explicit labels must be strictly increasing ({0} then {1})")]
    LabelsNotIncreasing(Label, Label),
    #[error("explicit labels {first}..{last} do not fit in one label distance {n}")]
    LabelSpan { first: Label, last: Label, n: i64 },
    #[error("granule {0} does not end before granule {1} starts")]
    NotMonotone(Label, Label),
    #[error("the last explicit granule overlaps the next period's first granule")]
    PeriodOverlap,
    #[error("horizon {horizon} is not a positive multiple of the period {period}")]
    Horizon { horizon: i64, period: i64 },
    #[error("bottom index {instant} of granule {label} is not covered by the finer granularity")]
    NotCovered { label: Label, instant: Instant },
    #[error("granule {0} is not a union of granules of the finer granularity")]
    NotUnion(Label),
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

/// Labels of the first and last non-empty granules; `None` is unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bounds {
    pub first: Option<Label>,
    pub last: Option<Label>,
}

impl Bounds {
    pub const UNBOUNDED: Bounds = Bounds {
        first: None,
        last: None,
    };

    pub fn contains(&self, label: Label) -> bool {
        self.first.is_none_or(|f| label >= f) && self.last.is_none_or(|l| label <= l)
    }

    pub fn intersect(self, other: Bounds) -> Bounds {
        let first = match (self.first, other.first) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let last = match (self.last, other.last) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Bounds { first, last }
    }
}

/// Finite description of a periodic granularity in terms of the bottom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicRep {
    period: i64,
    label_distance: i64,
    granules: Vec<(Label, GranuleSet)>,
    bounds: Option<Bounds>,
}

impl PeriodicRep {
    /// Checks the structural invariants of a periodic representation with
    /// any anchor. Alignment to the bottom is not required here; see
    /// [`PeriodicRep::normalized`].
    pub fn new(
        period: i64,
        label_distance: i64,
        granules: impl IntoIterator<Item = (Label, GranuleSet)>,
    ) -> Result<Self, RepError> {
        if period <= 0 {
            return Err(RepError::NonPositivePeriod(period));
        }
        if label_distance <= 0 {
            return Err(RepError::NonPositiveLabelDistance(label_distance));
        }
        let granules: Vec<_> = granules.into_iter().collect();
        let (first, last) = match (granules.first(), granules.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(RepError::NoGranules),
        };
        if last.0 - first.0 >= label_distance {
            return Err(RepError::LabelSpan {
                first: first.0,
                last: last.0,
                n: label_distance,
            });
        }
        for (label, set) in &granules {
            if set.is_empty() {
                return Err(RepError::EmptyGranule(*label));
            }
        }
        for w in granules.windows(2) {
            let ((a, sa), (b, sb)) = (&w[0], &w[1]);
            if a >= b {
                return Err(RepError::LabelsNotIncreasing(*a, *b));
            }
            if sa.last() >= sb.first() {
                return Err(RepError::NotMonotone(*a, *b));
            }
        }
        let wrap = first.1.first().unwrap().checked_add(period).ok_or(Overflow("period"))?;
        if last.1.last().unwrap() >= wrap {
            return Err(RepError::PeriodOverlap);
        }
        Ok(PeriodicRep {
            period,
            label_distance,
            granules,
            bounds: None,
        })
    }

    /// The bottom granularity: `P = 1`, `N = 1`, `⊥(1) = {1}`.
    pub fn bottom() -> Self {
        PeriodicRep {
            period: 1,
            label_distance: 1,
            granules: vec![(1, GranuleSet::singleton(1))],
            bounds: None,
        }
    }

    pub fn with_bounds(mut self, bounds: Option<Bounds>) -> Self {
        self.bounds = bounds.filter(|b| *b != Bounds::UNBOUNDED);
        self
    }

    /// The same granularity described with period `alpha·P` and label
    /// distance `alpha·N`.
    pub fn scaled(&self, alpha: i64) -> Result<PeriodicRep, RepError> {
        let period = arith::checked_mul(self.period, alpha, "scaled period")?;
        let n = arith::checked_mul(self.label_distance, alpha, "scaled label distance")?;
        let mut granules = Vec::with_capacity(self.granules.len() * alpha.max(0) as usize);
        for c in 0..alpha {
            for (label, set) in &self.granules {
                let shifted = set
                    .shifted(c * self.period)
                    .ok_or(Overflow("scaled granule"))?;
                granules.push((label + c * self.label_distance, shifted));
            }
        }
        Ok(PeriodicRep::new(period, n, granules)?.with_bounds(self.bounds))
    }

    /// The same granularity with bounds dropped.
    pub fn unbounded(&self) -> PeriodicRep {
        PeriodicRep {
            bounds: None,
            ..self.clone()
        }
    }

    pub fn period(&self) -> i64 {
        self.period
    }

    pub fn label_distance(&self) -> i64 {
        self.label_distance
    }

    /// Number of explicit granules per period (`R`).
    pub fn granule_count(&self) -> usize {
        self.granules.len()
    }

    pub fn granules(&self) -> &[(Label, GranuleSet)] {
        &self.granules
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.granules.iter().map(|(l, _)| *l)
    }

    pub fn bounds(&self) -> Option<Bounds> {
        self.bounds
    }

    pub fn is_bounded(&self) -> bool {
        self.bounds.is_some()
    }

    /// Every integer is a label (`R = N`) and there are no bounds.
    pub fn is_full_integer(&self) -> bool {
        self.bounds.is_none() && self.granules.len() as i64 == self.label_distance
    }

    /// First label of the explicit window.
    pub fn window_start(&self) -> Label {
        self.granules[0].0
    }

    fn explicit_index(&self, label: Label) -> Option<usize> {
        self.granules.binary_search_by_key(&label, |(l, _)| *l).ok()
    }

    /// Explicit label congruent to `j` modulo `N`, following the two-case
    /// anchor selection of the arbitrary-granule formula.
    fn anchor_for(&self, j: Label) -> Label {
        let n = self.label_distance;
        let b = self.window_start();
        let j_prime = (j - 1).rem_euclid(n) + 1;
        let base = (b - 1).div_euclid(n) * n;
        if base + j_prime >= b {
            base + j_prime
        } else {
            base + n + j_prime
        }
    }

    /// `j` is congruent to an explicit label, ignoring bounds.
    pub fn has_label_unbounded(&self, j: Label) -> bool {
        self.explicit_index(self.anchor_for(j)).is_some()
    }

    /// `j` is a label with a non-empty granule.
    pub fn is_label(&self, j: Label) -> bool {
        self.bounds.is_none_or(|b| b.contains(j)) && self.has_label_unbounded(j)
    }

    /// Granule `H(j)` as bottom indices; empty when `j` is not a label or
    /// falls outside the bounds.
    pub fn expand(&self, j: Label) -> GranuleSet {
        if let Some(b) = self.bounds {
            if !b.contains(j) {
                return GranuleSet::default();
            }
        }
        self.expand_unbounded(j)
    }

    /// Like [`PeriodicRep::expand`] but ignores bounds.
    pub fn expand_unbounded(&self, j: Label) -> GranuleSet {
        let n = self.label_distance;
        let k = self.anchor_for(j);
        let Some(idx) = self.explicit_index(k) else {
            return GranuleSet::default();
        };
        let periods = (j - 1).div_euclid(n) - (k - 1).div_euclid(n);
        match self.period.checked_mul(periods) {
            Some(delta) => self.granules[idx].1.shifted(delta).unwrap_or_default(),
            None => GranuleSet::default(),
        }
    }

    /// Label of the granule covering bottom index `t`, ignoring bounds.
    pub fn up_unbounded(&self, t: Instant) -> Option<Label> {
        let lo = self.granules[0].1.first()?;
        let n = (t - lo).div_euclid(self.period);
        let reduced = t - n * self.period;
        let pos = self
            .granules
            .partition_point(|(_, s)| s.first().is_some_and(|m| m <= reduced));
        let (label, set) = self.granules.get(pos.checked_sub(1)?)?;
        if !set.contains(reduced) {
            return None;
        }
        label.checked_add(n.checked_mul(self.label_distance)?)
    }

    /// Label of the granule covering bottom index `t`, if any.
    pub fn up(&self, t: Instant) -> Option<Label> {
        let label = self.up_unbounded(t)?;
        match self.bounds {
            Some(b) if !b.contains(label) => None,
            _ => Some(label),
        }
    }

    /// Smallest label strictly greater than `j` (unbounded core).
    pub fn next_label(&self, j: Label) -> Label {
        let n = self.label_distance;
        let k = self.anchor_for(j);
        let offset = j - k;
        let pos = self.granules.partition_point(|(l, _)| *l <= k);
        match self.granules.get(pos) {
            Some((l, _)) => l + offset,
            None => self.granules[0].0 + n + offset,
        }
    }

    /// Greatest label strictly smaller than `j` (unbounded core).
    pub fn prev_label(&self, j: Label) -> Label {
        let n = self.label_distance;
        let k = self.anchor_for(j);
        let offset = j - k;
        let pos = self.granules.partition_point(|(l, _)| *l < k);
        match pos.checked_sub(1) {
            Some(p) => self.granules[p].0 + offset,
            None => self.granules.last().unwrap().0 - n + offset,
        }
    }

    /// Smallest label `>= j` (unbounded core).
    pub fn label_at_or_after(&self, j: Label) -> Label {
        if self.has_label_unbounded(j) {
            j
        } else {
            self.next_label(j)
        }
    }

    /// Greatest label `<= j` (unbounded core).
    pub fn label_at_or_before(&self, j: Label) -> Label {
        if self.has_label_unbounded(j) {
            j
        } else {
            self.prev_label(j)
        }
    }

    /// Smallest positive bottom index covered by the granularity.
    pub fn first_positive_instant(&self) -> Instant {
        self.granules
            .iter()
            .flat_map(|(_, s)| s.iter())
            .map(|t| (t - 1).rem_euclid(self.period) + 1)
            .min()
            .expect("non-empty representation")
    }

    /// `l_G`: label of the granule covering the smallest positive covered
    /// bottom index.
    pub fn anchor(&self) -> Label {
        self.up_unbounded(self.first_positive_instant())
            .expect("covered instant has a label")
    }

    pub fn is_aligned(&self) -> bool {
        self.anchor() == self.window_start()
    }

    /// Re-anchors the explicit window at `l_G`. Expansion is unchanged.
    pub fn normalized(&self) -> PeriodicRep {
        let anchor = self.anchor();
        if anchor == self.window_start() {
            return self.clone();
        }
        let n = self.label_distance;
        let mut granules: Vec<_> = self
            .granules
            .iter()
            .map(|(a, s)| {
                let shift = -(a - anchor).div_euclid(n);
                (a + shift * n, s.shifted(shift * self.period).expect("shift in range"))
            })
            .collect();
        granules.sort_by_key(|(l, _)| *l);
        PeriodicRep {
            period: self.period,
            label_distance: n,
            granules,
            bounds: self.bounds,
        }
    }

    /// `L̄`: explicit labels of the aligned window.
    pub fn lbar(&self) -> Vec<Label> {
        self.normalized().labels().collect()
    }

    /// Labels whose granules cover at least one bottom index in
    /// `[1, horizon]`, where `horizon` is a positive multiple of `P`. With
    /// `horizon = P` this is `L̂`; larger horizons give `L̂^{P'}`. Bounds are
    /// ignored: conversion formulas work on the unbounded core.
    pub fn lhat(&self, horizon: i64) -> Result<Vec<Label>, RepError> {
        if horizon <= 0 || horizon % self.period != 0 {
            return Err(RepError::Horizon {
                horizon,
                period: self.period,
            });
        }
        let mut out = Vec::new();
        for (label, set) in &self.granules {
            let (lo, hi) = (set.first().unwrap(), set.last().unwrap());
            // A granule spans fewer than P indices, so a copy S + nP meets
            // [1, horizon] exactly when its ends straddle the interval.
            let n_min = -(hi - 1).div_euclid(self.period);
            let n_max = (horizon - lo).div_euclid(self.period);
            for n in n_min..=n_max {
                let shift = arith::checked_mul(n, self.label_distance, "label window")?;
                out.push(label.checked_add(shift).ok_or(Overflow("label window"))?);
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// A converted granularity: periodic, or with no non-empty granule at all.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Granularity {
    Empty,
    Periodic(PeriodicRep),
}

impl Granularity {
    pub fn bottom() -> Self {
        Granularity::Periodic(PeriodicRep::bottom())
    }

    pub fn as_periodic(&self) -> Option<&PeriodicRep> {
        match self {
            Granularity::Periodic(rep) => Some(rep),
            Granularity::Empty => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Granularity::Empty)
    }

    pub fn expand(&self, j: Label) -> GranuleSet {
        self.as_periodic().map(|r| r.expand(j)).unwrap_or_default()
    }

    pub fn up(&self, t: Instant) -> Option<Label> {
        self.as_periodic().and_then(|r| r.up(t))
    }

    pub fn period(&self) -> i64 {
        self.as_periodic().map_or(1, PeriodicRep::period)
    }

    pub fn label_distance(&self) -> i64 {
        self.as_periodic().map_or(1, PeriodicRep::label_distance)
    }
}

impl From<PeriodicRep> for Granularity {
    fn from(rep: PeriodicRep) -> Self {
        Granularity::Periodic(rep)
    }
}

/// Re-anchors explicit granules given at arbitrary labels so that the window
/// starts at `l_G`. The input must describe one full period: its labels fit
/// in a window of `N` consecutive labels.
pub fn normalize_alignment(
    granules: impl IntoIterator<Item = (Label, GranuleSet)>,
    period: i64,
    label_distance: i64,
) -> Result<PeriodicRep, RepError> {
    let mut granules: Vec<_> = granules.into_iter().collect();
    granules.sort_by_key(|(l, _)| *l);
    Ok(PeriodicRep::new(period, label_distance, granules)?.normalized())
}

pub fn expand(rep: &PeriodicRep, j: Label) -> GranuleSet {
    rep.expand(j)
}

pub fn up_from_instant(rep: &PeriodicRep, t: Instant) -> Option<Label> {
    rep.up(t)
}

/// The label `z'` of `h` whose granule contains `g(z)`, if one exists.
pub fn up_label(g: &PeriodicRep, h: &PeriodicRep, z: Label) -> Option<Label> {
    let granule = g.expand(z);
    let target = h.up(granule.first()?)?;
    if granule.last() == granule.first() || granule.is_subset(&h.expand(target)) {
        Some(target)
    } else {
        None
    }
}

/// Labels of `g` whose granules exactly tile `h(z)`.
///
/// Fails when some index of `h(z)` is not covered by `g`, or when a covering
/// granule of `g` sticks out of `h(z)`.
pub fn down_label(g: &PeriodicRep, h: &PeriodicRep, z: Label) -> Result<Vec<Label>, RepError> {
    let target = h.expand(z);
    let mut labels: Vec<Label> = Vec::new();
    for t in target.iter() {
        let label = g.up(t).ok_or(RepError::NotCovered { label: z, instant: t })?;
        if labels.last() != Some(&label) {
            labels.push(label);
        }
    }
    for &label in &labels {
        if !g.expand(label).is_subset(&target) {
            return Err(RepError::NotUnion(z));
        }
    }
    Ok(labels)
}

/// Minimum size, in granules of `g2`, of the granules of `g1` over one
/// common period. Requires `g2` to partition `g1`.
pub fn mindist(g1: &PeriodicRep, g2: &PeriodicRep) -> Result<i64, RepError> {
    let horizon = arith::checked_lcm(g1.period(), g2.period(), "mindist horizon")?;
    let mut labels = g1.lhat(horizon)?;
    if let Some(&last) = labels.last() {
        labels.push(g1.next_label(last));
    }
    labels
        .iter()
        .map(|&i| down_label(g2, g1, i).map(|d| d.len() as i64))
        .try_fold(i64::MAX, |acc, d| d.map(|d| acc.min(d)))
}

/// Labels of `g` whose granules lie inside `within`, found by mapping each
/// index of `within` through `up`.
pub fn contained_labels(g: &PeriodicRep, within: &GranuleSet) -> Vec<Label> {
    candidate_labels(g, within)
        .into_iter()
        .filter(|&j| g.expand(j).is_subset(within))
        .collect()
}

/// Labels of `g` whose granules share at least one index with `other`.
pub fn intersecting_labels(g: &PeriodicRep, other: &GranuleSet) -> Vec<Label> {
    candidate_labels(g, other)
}

fn candidate_labels(g: &PeriodicRep, set: &GranuleSet) -> Vec<Label> {
    let mut seen = BTreeSet::new();
    let mut last = None;
    for t in set.iter() {
        if let Some(label) = g.up(t) {
            if last != Some(label) {
                seen.insert(label);
                last = Some(label);
            }
        }
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs(v: &[i64]) -> GranuleSet {
        GranuleSet::new(v.to_vec())
    }

    fn week_parts() -> PeriodicRep {
        PeriodicRep::new(7, 2, [(3, GranuleSet::range(8, 12)), (4, gs(&[13, 14]))]).unwrap()
    }

    fn week() -> PeriodicRep {
        PeriodicRep::new(7, 1, [(1, GranuleSet::range(1, 7))]).unwrap()
    }

    fn day() -> PeriodicRep {
        PeriodicRep::bottom()
    }

    fn sunday() -> PeriodicRep {
        PeriodicRep::new(7, 7, [(7, gs(&[7]))]).unwrap()
    }

    #[test]
    fn expand_week_parts() {
        assert_eq!(week_parts().expand(6), gs(&[20, 21]));
        assert_eq!(week_parts().expand(3), GranuleSet::range(8, 12));
        assert_eq!(week_parts().expand(1), GranuleSet::range(1, 5));
        assert_eq!(week_parts().expand(-1), GranuleSet::range(-6, -2));
    }

    #[test]
    fn expand_week_and_gaps() {
        assert_eq!(week().expand(3), GranuleSet::range(15, 21));
        let s = sunday();
        assert_eq!(s.expand(14), gs(&[14]));
        assert!(s.expand(13).is_empty());
    }

    #[test]
    fn up_from_instants() {
        assert_eq!(week().up(10), Some(2));
        assert_eq!(week().up(0), Some(0));
        assert_eq!(week_parts().up(13), Some(4));
        assert_eq!(week_parts().up(-1), Some(0));
        assert_eq!(sunday().up(13), None);
        assert_eq!(sunday().up(21), Some(21));
    }

    #[test]
    fn up_and_down_between_reps() {
        assert_eq!(up_label(&day(), &week(), 9), Some(2));
        assert_eq!(up_label(&week(), &week(), 5), Some(5));
        // 10-day "months" split weeks
        let tens = PeriodicRep::new(10, 1, [(1, GranuleSet::range(1, 10))]).unwrap();
        assert_eq!(up_label(&week(), &tens, 2), None);
        assert_eq!(up_label(&week(), &tens, 1), Some(1));

        assert_eq!(down_label(&day(), &week(), 1).unwrap(), (1..=7).collect::<Vec<_>>());
        assert_eq!(down_label(&week(), &week(), 4).unwrap(), vec![4]);
        let bday = PeriodicRep::new(7, 5, (1..=5).map(|d| (d, gs(&[d])))).unwrap();
        let bweek = PeriodicRep::new(7, 1, [(1, GranuleSet::range(1, 5))]).unwrap();
        assert_eq!(down_label(&bday, &bweek, 2).unwrap(), vec![6, 7, 8, 9, 10]);
        assert!(matches!(
            down_label(&bday, &week(), 1),
            Err(RepError::NotCovered { instant: 6, .. })
        ));
        assert!(matches!(down_label(&week(), &tens, 1), Err(RepError::NotUnion(1))));
    }

    #[test]
    fn lhat_two_cases() {
        let g = PeriodicRep::new(4, 3, [(6, gs(&[1])), (7, gs(&[2, 3]))]).unwrap();
        assert_eq!(g.lhat(8).unwrap(), vec![6, 7, 9, 10]);
        assert_eq!(g.lhat(4).unwrap(), g.lbar());
        let h = PeriodicRep::new(4, 3, [(6, gs(&[0, 1])), (7, gs(&[2]))]).unwrap();
        assert_eq!(h.lhat(8).unwrap(), vec![6, 7, 9, 10, 12]);
        assert!(matches!(h.lhat(6), Err(RepError::Horizon { .. })));
    }

    #[test]
    fn mindist_examples() {
        assert_eq!(mindist(&week(), &day()).unwrap(), 7);
        assert_eq!(mindist(&week(), &week()).unwrap(), 1);
        let thirty = PeriodicRep::new(30, 1, [(1, GranuleSet::range(1, 30))]).unwrap();
        assert_eq!(mindist(&thirty, &day()).unwrap(), 30);
        let tens = PeriodicRep::new(10, 1, [(1, GranuleSet::range(1, 10))]).unwrap();
        assert!(mindist(&tens, &week()).is_err());
    }

    #[test]
    fn normalization() {
        let shifted = normalize_alignment([(10, GranuleSet::range(64, 70))], 7, 1).unwrap();
        assert_eq!(shifted.window_start(), 1);
        assert_eq!(shifted.granules()[0].1, GranuleSet::range(1, 7));
        assert_eq!(week().normalized(), week());
        let wp = week_parts().normalized();
        assert_eq!(wp.window_start(), 1);
        assert!(wp.is_aligned());
        for j in -10..10 {
            assert_eq!(wp.expand(j), week_parts().expand(j));
        }
    }

    #[test]
    fn neighbours() {
        let s = sunday();
        assert_eq!(s.next_label(7), 14);
        assert_eq!(s.next_label(8), 14);
        assert_eq!(s.prev_label(14), 7);
        assert_eq!(s.prev_label(13), 7);
        assert_eq!(s.label_at_or_after(7), 7);
        assert_eq!(s.label_at_or_before(-1), -7);
        let wp = week_parts();
        assert_eq!(wp.next_label(4), 5);
        assert_eq!(wp.prev_label(3), 2);
    }

    #[test]
    fn structural_errors() {
        assert_eq!(
            PeriodicRep::new(7, 1, Vec::new()),
            Err(RepError::NoGranules)
        );
        assert!(matches!(
            PeriodicRep::new(7, 2, [(1, gs(&[1, 2])), (2, gs(&[2, 3]))]),
            Err(RepError::NotMonotone(1, 2))
        ));
        assert!(matches!(
            PeriodicRep::new(3, 1, [(1, gs(&[1, 2, 3, 4]))]),
            Err(RepError::PeriodOverlap)
        ));
        assert!(matches!(
            PeriodicRep::new(7, 2, [(1, gs(&[1])), (3, gs(&[2]))]),
            Err(RepError::LabelSpan { .. })
        ));
    }

    #[test]
    fn scaling_keeps_expansion() {
        let wp = week_parts().scaled(3).unwrap();
        assert_eq!((wp.period(), wp.label_distance(), wp.granule_count()), (21, 6, 6));
        for j in -8..12 {
            assert_eq!(wp.expand(j), week_parts().expand(j));
        }
    }

    #[test]
    fn bounds_clip_expansion() {
        let rep = week().with_bounds(Some(Bounds {
            first: Some(5),
            last: Some(5),
        }));
        assert_eq!(rep.expand(5), GranuleSet::range(29, 35));
        assert!(rep.expand(4).is_empty());
        assert_eq!(rep.up(30), Some(5));
        assert_eq!(rep.up(1), None);
    }
}
