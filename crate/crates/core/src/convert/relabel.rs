use super::OpError;
use crate::arith::{checked_mul, Overflow};
use crate::granularity::{Bounds, Granularity, Label, PeriodicRep};

/// Renumbers `g` so that granule `i` becomes label `j` and consecutive
/// granules get consecutive labels. Granule contents are unchanged.
pub fn relabel(g: &PeriodicRep, i: Label, j: Label) -> Result<PeriodicRep, OpError> {
    if !g.is_label(i) {
        return Err(OpError::NotALabel(i));
    }
    let g = g.normalized();
    let (l, n) = (g.window_start(), g.label_distance());
    let r = g.granule_count() as i64;
    let rank = |x: Label| -> Result<(i64, i64), OpError> {
        let q = (x - l).div_euclid(n);
        let reduced = x - q * n;
        let delta = g
            .labels()
            .position(|a| a == reduced)
            .ok_or(OpError::NotALabel(x))? as i64;
        Ok((q, delta))
    };
    let (q, delta) = rank(i)?;
    let shift = checked_mul(q, r, "relabel offset")?;
    let new_first = j
        .checked_sub(shift)
        .and_then(|v| v.checked_sub(delta))
        .ok_or(Overflow("relabel offset"))?;
    let map = |x: Label| -> Result<Label, OpError> {
        let (q, delta) = rank(x)?;
        Ok(new_first + delta + checked_mul(q, r, "relabel offset")?)
    };
    let granules = (new_first..).zip(g.granules().iter().map(|(_, s)| s.clone()));
    let rep = PeriodicRep::new(g.period(), r, granules)?;
    let bounds = match g.bounds() {
        None => None,
        Some(b) => Some(Bounds {
            first: b.first.map(|f| map(g.label_at_or_after(f))).transpose()?,
            last: b.last.map(|t| map(g.label_at_or_before(t))).transpose()?,
        }),
    };
    Ok(rep.with_bounds(bounds))
}

/// Labels the first granule lying entirely after instant 0 as 1.
pub fn gstp_relabel(g: &Granularity) -> Result<Granularity, OpError> {
    let rep = g.as_periodic().ok_or(OpError::EmptyOperand)?;
    let l = rep.anchor();
    let starts_positive = rep.expand_unbounded(l).first().is_some_and(|t| t > 0);
    let mut i = if starts_positive { l } else { rep.next_label(l) };
    if let Some(first) = rep.bounds().and_then(|b| b.first) {
        i = i.max(first);
    }
    Ok(relabel(rep, i, 1)?.into())
}
