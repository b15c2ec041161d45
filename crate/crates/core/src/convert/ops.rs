use std::collections::BTreeSet;

use super::{Limits, OpError};
use crate::arith::{self, checked_mul, exact_div, gcd, Overflow};
use crate::granularity::{
    contained_labels, down_label, Bounds, Granularity, GranuleSet, Label, PeriodicRep, RepError,
};

pub(crate) fn unbounded(reps: &[&PeriodicRep]) -> Result<(), OpError> {
    if reps.iter().any(|r| r.is_bounded()) {
        Err(OpError::NestedSubset)
    } else {
        Ok(())
    }
}

fn full_integer(g: &PeriodicRep, op: &'static str) -> Result<(), OpError> {
    if g.is_full_integer() {
        Ok(())
    } else {
        Err(OpError::NotFullInteger { op })
    }
}

/// Common period `lcm(P1, P2)`, checked against the limit.
pub(crate) fn common_period(g1: &PeriodicRep, g2: &PeriodicRep, limits: &Limits) -> Result<i64, OpError> {
    let p = arith::checked_lcm(g1.period(), g2.period(), "common period")?;
    limits.check(p)
}

/// Label distance of `g` stretched to the horizon `p`.
pub(crate) fn stretched_distance(g: &PeriodicRep, p: i64) -> Result<i64, OpError> {
    Ok(checked_mul(p / g.period(), g.label_distance(), "label distance")?)
}

/// Builds the result from the granules covering `[1, P]`, sorted by label.
///
/// The smallest label is `l_G`; granules at or beyond `l_G + N` repeat
/// earlier ones and are dropped.
pub(crate) fn from_lhat(
    period: i64,
    label_distance: i64,
    granules: Vec<(Label, GranuleSet)>,
) -> Result<Granularity, OpError> {
    let Some(&(first, _)) = granules.first() else {
        return Ok(Granularity::Empty);
    };
    let end = first.checked_add(label_distance).ok_or(Overflow("label window"))?;
    let window = granules.into_iter().take_while(|(l, _)| *l < end);
    let rep = PeriodicRep::new(period, label_distance, window)?;
    Ok(rep.normalized().into())
}

fn union_of(g: &PeriodicRep, labels: impl IntoIterator<Item = Label>) -> GranuleSet {
    let mut out = GranuleSet::default();
    for j in labels {
        out.extend_ordered(&g.expand(j));
    }
    out
}

pub fn convert_group(g: &PeriodicRep, m: i64, limits: &Limits) -> Result<Granularity, OpError> {
    unbounded(&[g])?;
    full_integer(g, "group")?;
    if m < 1 {
        return Err(OpError::Parameter(format!("group needs m >= 1, got {m}")));
    }
    let d = gcd(m, g.label_distance());
    let period = limits.check(checked_mul(g.period(), m / d, "group period")?)?;
    let label_distance = g.label_distance() / d;
    let first = (g.anchor() - 1).div_euclid(m) + 1;
    let mut granules = Vec::with_capacity(label_distance as usize);
    for i in first..first + label_distance {
        let start = checked_mul(i - 1, m, "group label")? + 1;
        granules.push((i, union_of(g, start..start + m)));
    }
    from_lhat(period, label_distance, granules)
}

pub fn convert_shift(g: &PeriodicRep, m: i64) -> Result<Granularity, OpError> {
    unbounded(&[g])?;
    full_integer(g, "shift")?;
    let granules = g
        .granules()
        .iter()
        .map(|(a, s)| Ok((a.checked_add(m).ok_or(Overflow("shifted label"))?, s.clone())))
        .collect::<Result<Vec<_>, OpError>>()?;
    let rep = PeriodicRep::new(g.period(), g.label_distance(), granules)?;
    Ok(rep.normalized().into())
}

/// `alter(l, k, m, g2, g1)`: granule `l` of every `m`-group of `g1` gains
/// `k` granules of `g2`, and later granules move along.
pub fn convert_alter(
    g2: &PeriodicRep,
    g1: &PeriodicRep,
    l: i64,
    k: i64,
    m: i64,
    limits: &Limits,
) -> Result<Granularity, OpError> {
    unbounded(&[g1, g2])?;
    full_integer(g1, "alter")?;
    full_integer(g2, "alter")?;
    if !(1 <= l && l <= m) {
        return Err(OpError::Parameter(format!("alter needs 1 <= l <= m, got l={l}, m={m}")));
    }
    let (p1, n1, p2, n2) = (g1.period(), g1.label_distance(), g2.period(), g2.label_distance());
    let p2n1 = checked_mul(p2, n1, "alter label distance")?;
    let n2m = checked_mul(n2, m, "alter label distance")?;
    let mut nn = arith::checked_lcm(n1, m, "alter label distance")?;
    nn = arith::checked_lcm(nn, p2n1 / gcd(p2n1, p1), "alter label distance")?;
    nn = arith::checked_lcm(nn, n2m / gcd(n2m, k.abs()), "alter label distance")?;
    let nn = limits.check(nn)?;

    let (nn_w, k_w) = (i128::from(nn), i128::from(k));
    let base = exact_div(nn_w * i128::from(p1), i128::from(n1), "alter period")?;
    let extra = exact_div(nn_w * k_w, i128::from(m) * i128::from(n2), "alter period")?;
    let (Some(base), Some(extra)) = (base, extra) else {
        return Err(OpError::Internal("alter period is not integral".into()));
    };
    let period = i128::from(base) + i128::from(extra) * i128::from(p2);
    let period = i64::try_from(period).map_err(|_| Overflow("alter period"))?;

    // b_i..t_i for labels 1..=N'+1, with the partition checked on the way
    let mut spans = Vec::with_capacity(nn as usize + 1);
    for i in 1..=nn + 1 {
        let parts = down_label(g2, g1, i).map_err(|e| OpError::NotPartition(e.to_string()))?;
        let (b, t) = (parts[0], *parts.last().unwrap());
        if t - b + 1 != parts.len() as i64 {
            return Err(OpError::NotPartition(format!("granule {i} is not contiguous")));
        }
        if let Some(&(_, prev_t)) = spans.last() {
            if prev_t + 1 != b {
                return Err(OpError::NotPartition(format!(
                    "granules {} and {i} do not tile the finer granularity",
                    i - 1
                )));
            }
        }
        spans.push((b, t));
    }
    let mindist = spans[..nn as usize]
        .iter()
        .map(|(b, t)| t - b + 1)
        .min()
        .expect("at least one granule");
    if k <= -(mindist - 1) {
        return Err(OpError::AlterShrink {
            k,
            bound: -(mindist - 1),
            mindist,
        });
    }
    if period <= 0 {
        return Err(OpError::Internal(format!("alter period {period} is not positive")));
    }
    let period = limits.check(period)?;

    let mut granules = Vec::with_capacity(spans.len());
    for (i, &(b, t)) in (1..).zip(&spans) {
        let h = (i - l).div_euclid(m) + 1;
        let hk = checked_mul(h, k, "alter offset")?;
        let start = if i == (h - 1) * m + l { b + hk - k } else { b + hk };
        granules.push((i, union_of(g2, start..=t + hk)));
    }
    let wrap = granules.pop().expect("N'+1 granules");
    if Some(wrap.1) != granules[0].1.shifted(period) {
        return Err(OpError::Internal("alter result is not periodic".into()));
    }
    let rep = PeriodicRep::new(period, nn, granules)?;
    Ok(rep.normalized().into())
}

pub fn convert_combine(g1: &PeriodicRep, g2: &PeriodicRep, limits: &Limits) -> Result<Granularity, OpError> {
    unbounded(&[g1, g2])?;
    let period = common_period(g1, g2, limits)?;
    let label_distance = stretched_distance(g1, period)?;
    let covering2: BTreeSet<Label> = g2.lhat(period)?.into_iter().collect();
    let mut granules = Vec::new();
    for i in g1.lhat(period)? {
        let inside = contained_labels(g2, &g1.expand(i));
        if inside.iter().any(|j| covering2.contains(j)) {
            granules.push((i, union_of(g2, inside)));
        }
    }
    from_lhat(period, label_distance, granules)
}

/// `anchor(g1, g2)`: each granule of `g2` grows over `g1` up to the next one.
pub fn convert_anchored(g1: &PeriodicRep, g2: &PeriodicRep, limits: &Limits) -> Result<Granularity, OpError> {
    unbounded(&[g1, g2])?;
    full_integer(g1, "anchor")?;
    let period = common_period(g1, g2, limits)?;
    let label_distance = stretched_distance(g2, period)?;
    let mut labels = g2.lhat(period)?;
    let last = *labels.last().expect("lhat of a periodic rep is non-empty");
    for &i in labels.iter().chain([g2.next_label(last)].iter()) {
        if g1.expand(i) != g2.expand(i) {
            return Err(OpError::NotLabelAligned(format!(
                "granule {i} of the anchors differs from the granule of the base"
            )));
        }
    }
    let (l1, l2) = (g1.anchor(), g2.anchor());
    if l1 != l2 {
        labels.insert(0, g2.prev_label(l2));
    }
    let granules = labels
        .into_iter()
        .map(|i| (i, union_of(g1, i..g2.next_label(i))))
        .collect();
    from_lhat(period, label_distance, granules)
}

pub fn convert_subset(g: &PeriodicRep, from: Option<i64>, to: Option<i64>) -> Result<Granularity, OpError> {
    if let (Some(a), Some(b)) = (from, to) {
        if a > b {
            return Err(OpError::SubsetRange { from: a, to: b });
        }
    }
    let bounds = Bounds {
        first: from.map(|m| g.label_at_or_after(m)),
        last: to.map(|n| g.label_at_or_before(n)),
    };
    let bounds = match g.bounds() {
        Some(existing) => existing.intersect(bounds),
        None => bounds,
    };
    if let (Some(a), Some(b)) = (bounds.first, bounds.last) {
        if a > b {
            return Ok(Granularity::Empty);
        }
    }
    Ok(g.clone().with_bounds(Some(bounds)).into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

pub fn convert_set_op(
    g1: &PeriodicRep,
    g2: &PeriodicRep,
    which: SetOp,
    limits: &Limits,
) -> Result<Granularity, OpError> {
    unbounded(&[g1, g2])?;
    let (p1, n1, p2, n2) = (g1.period(), g1.label_distance(), g2.period(), g2.label_distance());
    if i128::from(n1) * i128::from(p2) != i128::from(n2) * i128::from(p1) {
        return Err(OpError::RatioMismatch { n1, p1, n2, p2 });
    }
    let period = common_period(g1, g2, limits)?;
    let label_distance = stretched_distance(g1, period)?;
    let l1: BTreeSet<Label> = g1.lhat(period)?.into_iter().collect();
    let l2: BTreeSet<Label> = g2.lhat(period)?.into_iter().collect();
    for &i in l1.union(&l2) {
        if g1.has_label_unbounded(i) && g2.has_label_unbounded(i) && g1.expand(i) != g2.expand(i) {
            return Err(OpError::NotLabelAligned(format!("granule {i} differs between operands")));
        }
    }
    let granules: Vec<_> = match which {
        SetOp::Union => l1
            .union(&l2)
            .map(|&i| {
                let g = if g1.has_label_unbounded(i) { g1 } else { g2 };
                (i, g.expand(i))
            })
            .collect(),
        SetOp::Intersection => l1.intersection(&l2).map(|&i| (i, g1.expand(i))).collect(),
        SetOp::Difference => l1.difference(&l2).map(|&i| (i, g1.expand(i))).collect(),
    };
    from_lhat(period, label_distance, granules).map_err(|e| match e {
        OpError::Rep(RepError::NotMonotone(a, b)) => OpError::NotLabelAligned(format!(
            "granules {a} and {b} of the two operands are out of order"
        )),
        OpError::Rep(RepError::PeriodOverlap) => {
            OpError::NotLabelAligned("granules of the two operands overlap".into())
        }
        e => e,
    })
}
