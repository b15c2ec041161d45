//! Brute-force evaluation of Calendar Algebra definitions over a finite
//! window of bottom instants.
//!
//! Nothing here uses periods or label distances. Each operator is applied
//! literally to materialized operand granules; operands whose granules may
//! reach outside the requested window are evaluated on a wider window first
//! (doubling until a granule on each side is strictly outside), so every
//! granule reported for a window is exact, label included.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::ast::CalExpr;
use crate::granularity::{Granularity, GranuleSet, Instant, Label};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("guard {guard} exceeds half of the window [{lo}, {hi}]")]
    WindowTooSmall { lo: Instant, hi: Instant, guard: i64 },
    #[error("no granule of `{0}` found on both sides of the window within the growth limit")]
    Unbracketed(String),
    #[error("operand requirement violated in `{expr}`: {detail}")]
    Precondition { expr: String, detail: String },
    #[error("unresolved name `{0}`")]
    Unresolved(String),
}

/// Granules ordered by label (and therefore by time).
type Layer = Vec<(Label, GranuleSet)>;

/// Granules of one expression contained in `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowEval {
    pub lo: Instant,
    pub hi: Instant,
    pub guard: i64,
    pub granules: BTreeMap<Label, GranuleSet>,
}

impl WindowEval {
    /// The sub-window compared against representations.
    pub fn interior(&self) -> (Instant, Instant) {
        (self.lo + self.guard, self.hi - self.guard)
    }

    /// Granules lying inside the interior.
    pub fn trusted(&self) -> impl Iterator<Item = (Label, &GranuleSet)> {
        let (a, b) = self.interior();
        self.granules
            .iter()
            .filter(move |(_, s)| inside(s, a, b))
            .map(|(l, s)| (*l, s))
    }
}

fn inside(s: &GranuleSet, lo: Instant, hi: Instant) -> bool {
    matches!((s.first(), s.last()), (Some(a), Some(b)) if a >= lo && b <= hi)
}

fn meets(s: &GranuleSet, lo: Instant, hi: Instant) -> bool {
    matches!((s.first(), s.last()), (Some(a), Some(b)) if b >= lo && a <= hi)
}

/// Evaluates `expr` on `[lo, hi]`, keeping `guard` instants on each side
/// out of comparisons.
pub fn eval_window(expr: &CalExpr, lo: Instant, hi: Instant, guard: i64) -> Result<WindowEval, OracleError> {
    Oracle::default().eval_window(expr, lo, hi, guard)
}

/// Larger layers are recomputed rather than kept.
const MEMO_MAX_LAYER: usize = 1 << 16;

/// Every retry re-evaluates the operand's whole subtree, so the first
/// attempt should usually be wide enough.
fn first_margin(lo: Instant, hi: Instant) -> i64 {
    ((hi - lo + 1) / 16).max(8)
}

#[derive(Debug)]
pub struct Oracle {
    /// Largest margin added on each side when widening an operand window,
    /// as a multiple of the top-level window width.
    pub growth: i64,
    max_margin: i64,
    memo: HashMap<(usize, Instant, Instant), Rc<Layer>>,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            growth: 16,
            max_margin: 0,
            memo: HashMap::new(),
        }
    }
}

impl Oracle {
    pub fn eval_window(
        &mut self,
        expr: &CalExpr,
        lo: Instant,
        hi: Instant,
        guard: i64,
    ) -> Result<WindowEval, OracleError> {
        let width = hi - lo + 1;
        if guard < 0 || width <= 0 || 2 * guard > width {
            return Err(OracleError::WindowTooSmall { lo, hi, guard });
        }
        self.memo.clear();
        self.max_margin = self.growth * width + 4096;
        let layer = self.eval(expr, lo, hi)?;
        self.memo.clear();
        Ok(WindowEval {
            lo,
            hi,
            guard,
            granules: layer.iter().cloned().collect(),
        })
    }

    fn eval(&mut self, expr: &CalExpr, lo: Instant, hi: Instant) -> Result<Rc<Layer>, OracleError> {
        let key = (expr as *const CalExpr as usize, lo, hi);
        if let Some(layer) = self.memo.get(&key) {
            return Ok(Rc::clone(layer));
        }
        let layer = Rc::new(self.eval_node(expr, lo, hi)?);
        if layer.len() <= MEMO_MAX_LAYER {
            self.memo.insert(key, Rc::clone(&layer));
        }
        Ok(layer)
    }

    /// Evaluates `expr` on a window around `[lo, hi]` wide enough that every
    /// granule meeting `[lo, hi]` is complete.
    fn bracket(&mut self, expr: &CalExpr, lo: Instant, hi: Instant) -> Result<(Instant, Instant, Rc<Layer>), OracleError> {
        let cap = self.max_margin;
        let mut margin = first_margin(lo, hi);
        loop {
            let (a, b) = (lo - margin, hi + margin);
            let layer = self.eval(expr, a, b)?;
            let left = layer.first().and_then(|(_, s)| s.last()).is_some_and(|t| t < lo);
            let right = layer.last().and_then(|(_, s)| s.first()).is_some_and(|t| t > hi);
            if left && right {
                return Ok((a, b, layer));
            }
            if margin >= cap {
                if layer.is_empty() {
                    return Ok((a, b, layer));
                }
                return Err(OracleError::Unbracketed(expr.to_string()));
            }
            margin = (margin * 2).min(cap);
        }
    }

    fn eval_node(&mut self, expr: &CalExpr, lo: Instant, hi: Instant) -> Result<Layer, OracleError> {
        let precondition = |detail: String| OracleError::Precondition {
            expr: expr.to_string(),
            detail,
        };
        match expr {
            CalExpr::Bottom => Ok((lo..=hi).map(|t| (t, GranuleSet::singleton(t))).collect()),
            CalExpr::Name(n) => Err(OracleError::Unresolved(n.clone())),
            CalExpr::Group { m, operand } => {
                let g = self.eval(operand, lo, hi)?;
                let mut out: Layer = Vec::new();
                let mut run: Option<(Label, i64, GranuleSet)> = None;
                for (j, s) in g.iter() {
                    let i = (j - 1).div_euclid(*m) + 1;
                    match &mut run {
                        Some((ri, count, acc)) if *ri == i => {
                            acc.extend_ordered(s);
                            *count += 1;
                        }
                        _ => {
                            if let Some((ri, count, acc)) = run.take() {
                                if count == *m {
                                    out.push((ri, acc));
                                }
                            }
                            run = Some((i, 1, s.clone()));
                        }
                    }
                }
                if let Some((ri, count, acc)) = run {
                    if count == *m {
                        out.push((ri, acc));
                    }
                }
                Ok(out)
            }
            CalExpr::Shift { m, operand } => {
                let g = self.eval(operand, lo, hi)?;
                Ok(g.iter().map(|(j, s)| (j + m, s.clone())).collect())
            }
            CalExpr::Alter { l, k, m, fine, base } => self.alter(expr, *l, *k, *m, fine, base, lo, hi),
            CalExpr::Combine(g1, g2) => {
                let (a, b, e1) = self.bracket(g1, lo, hi)?;
                let e2 = self.eval(g2, a, b)?;
                let mut out = Vec::new();
                for (i, s1) in e1.iter() {
                    if !meets(s1, lo, hi) {
                        continue;
                    }
                    let mut acc = GranuleSet::default();
                    for (_, s2) in within(&e2, s1) {
                        if s2.is_subset(s1) {
                            acc.extend_ordered(s2);
                        }
                    }
                    if !acc.is_empty() && inside(&acc, lo, hi) {
                        out.push((*i, acc));
                    }
                }
                Ok(out)
            }
            CalExpr::Anchor(g1, g2) => {
                let (_, _, anchors) = self.bracket(g2, lo, hi)?;
                let base = self.eval(g1, lo, hi)?;
                let find = |j: Label| base.binary_search_by_key(&j, |(l, _)| *l).ok();
                for (i, s) in anchors.iter() {
                    if let Some(idx) = find(*i) {
                        if base[idx].1 != *s {
                            return Err(precondition(format!(
                                "anchor granule {i} differs from the base granule"
                            )));
                        }
                    }
                }
                let mut out = Vec::new();
                for pair in anchors.windows(2) {
                    let (i, next) = (pair[0].0, pair[1].0);
                    let mut acc = GranuleSet::default();
                    let mut complete = true;
                    for j in i..next {
                        match find(j) {
                            Some(idx) => acc.extend_ordered(&base[idx].1),
                            None => {
                                complete = false;
                                break;
                            }
                        }
                    }
                    if complete {
                        out.push((i, acc));
                    }
                }
                Ok(out)
            }
            CalExpr::Subset { from, to, operand } => {
                let g = self.eval(operand, lo, hi)?;
                Ok(g.iter()
                    .filter(|(j, _)| from.is_none_or(|f| *j >= f) && to.is_none_or(|t| *j <= t))
                    .cloned()
                    .collect())
            }
            CalExpr::SelectDown { k, l, first, second } => {
                let (a, b, e2) = self.bracket(second, lo, hi)?;
                let e1 = self.eval(first, a, b)?;
                let mut out = BTreeMap::new();
                for (_, s2) in e2.iter().filter(|(_, s)| meets(s, lo, hi)) {
                    let cands: Vec<(Label, &GranuleSet)> = within(&e1, s2)
                        .filter(|(_, s1)| s1.is_subset(s2))
                        .map(|(j, s)| (*j, s))
                        .collect();
                    pick(&cands, *k, *l, lo, hi, &mut out);
                }
                Ok(out.into_iter().collect())
            }
            CalExpr::SelectUp(g1, g2) => {
                let e1 = self.eval(g1, lo, hi)?;
                let e2 = self.eval(g2, lo, hi)?;
                Ok(e1
                    .iter()
                    .filter(|(_, s1)| within(&e2, s1).any(|(_, s2)| s2.is_subset(s1)))
                    .cloned()
                    .collect())
            }
            CalExpr::SelectIntersect { k, l, first, second } => {
                let (a, b, e2) = self.bracket(second, lo, hi)?;
                let (_, _, e1) = self.bracket(first, a, b)?;
                let mut out = BTreeMap::new();
                for (_, s2) in e2.iter().filter(|(_, s)| meets(s, lo, hi)) {
                    let cands: Vec<(Label, &GranuleSet)> = overlapping(&e1, s2)
                        .filter(|(_, s1)| s1.intersects(s2))
                        .map(|(j, s)| (*j, s))
                        .collect();
                    pick(&cands, *k, *l, lo, hi, &mut out);
                }
                Ok(out.into_iter().collect())
            }
            CalExpr::Union(g1, g2) | CalExpr::Intersection(g1, g2) | CalExpr::Difference(g1, g2) => {
                let e1: BTreeMap<Label, GranuleSet> = self.eval(g1, lo, hi)?.iter().cloned().collect();
                let e2: BTreeMap<Label, GranuleSet> = self.eval(g2, lo, hi)?.iter().cloned().collect();
                for (i, s) in &e1 {
                    if e2.get(i).is_some_and(|t| t != s) {
                        return Err(precondition(format!("granule {i} differs between operands")));
                    }
                }
                let out: Layer = match expr {
                    CalExpr::Union(..) => {
                        let mut all = e2;
                        all.extend(e1);
                        all.into_iter().collect()
                    }
                    CalExpr::Intersection(..) => e1.into_iter().filter(|(i, _)| e2.contains_key(i)).collect(),
                    _ => e1.into_iter().filter(|(i, _)| !e2.contains_key(i)).collect(),
                };
                for w in out.windows(2) {
                    if w[0].1.last() >= w[1].1.first() {
                        return Err(precondition(format!(
                            "granules {} and {} are out of order",
                            w[0].0, w[1].0
                        )));
                    }
                }
                Ok(out)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn alter(
        &mut self,
        expr: &CalExpr,
        l: i64,
        k: i64,
        m: i64,
        fine: &CalExpr,
        base: &CalExpr,
        lo: Instant,
        hi: Instant,
    ) -> Result<Layer, OracleError> {
        let precondition = |detail: String| OracleError::Precondition {
            expr: expr.to_string(),
            detail,
        };
        let inner = self.eval(fine, lo, hi)?;
        let (Some(&(c, _)), Some(&(d, _))) = (inner.first(), inner.last()) else {
            return Ok(Vec::new());
        };
        if d - c + 1 != inner.len() as i64 {
            return Err(precondition("finer operand is not full-integer labeled".into()));
        }
        let cap = 4 * self.max_margin;
        let mut margin = first_margin(lo, hi);
        loop {
            let (a, b) = (lo - margin, hi + margin);
            let coarse = self.eval(base, a, b)?;
            let parts = self.eval(fine, a, b)?;
            // (label, b', t') for every coarse granule in the wide window
            let mut moved = Vec::with_capacity(coarse.len());
            for (i, s) in coarse.iter() {
                let labels: Vec<Label> = {
                    let mut v: Vec<Label> = Vec::new();
                    let mut covered = 0usize;
                    for (j, p) in within(&parts, s) {
                        if p.is_subset(s) {
                            v.push(*j);
                            covered += p.len();
                        } else if p.intersects(s) {
                            return Err(precondition(format!("granule {i} splits a finer granule")));
                        }
                    }
                    if covered != s.len() {
                        return Err(precondition(format!("granule {i} is not covered by finer granules")));
                    }
                    v
                };
                let (bi, ti) = (labels[0], *labels.last().unwrap());
                if ti - bi + 1 != labels.len() as i64 {
                    return Err(precondition(format!("granule {i} is not contiguous")));
                }
                let h = (i - l).div_euclid(m) + 1;
                let start = if *i == (h - 1) * m + l { bi + (h - 1) * k } else { bi + h * k };
                moved.push((*i, start, ti + h * k));
            }
            let contiguous = moved.windows(2).all(|w| w[1].0 == w[0].0 + 1);
            let left = moved.iter().any(|&(_, s, _)| s < c);
            let right = moved.iter().any(|&(_, _, t)| t > d);
            if contiguous && left && right {
                let mut out = Vec::new();
                for (i, s, t) in moved {
                    if s < c || t > d || s > t {
                        continue;
                    }
                    let mut acc = GranuleSet::default();
                    for j in s..=t {
                        acc.extend_ordered(&inner[(j - c) as usize].1);
                    }
                    out.push((i, acc));
                }
                return Ok(out);
            }
            if margin >= cap {
                return Err(OracleError::Unbracketed(expr.to_string()));
            }
            margin = (margin * 2).min(cap);
        }
    }
}

/// Granules of `layer` whose first instant lies within the span of `s`.
fn within<'a>(layer: &'a Layer, s: &GranuleSet) -> impl Iterator<Item = &'a (Label, GranuleSet)> {
    let (lo, hi) = (s.first().unwrap_or(0), s.last().unwrap_or(-1));
    let start = layer.partition_point(|(_, g)| g.first().is_some_and(|t| t < lo));
    layer[start..]
        .iter()
        .take_while(move |(_, g)| g.first().is_some_and(|t| t <= hi))
}

/// Granules of `layer` whose span meets the span of `s`.
fn overlapping<'a>(layer: &'a Layer, s: &GranuleSet) -> impl Iterator<Item = &'a (Label, GranuleSet)> {
    let (lo, hi) = (s.first().unwrap_or(0), s.last().unwrap_or(-1));
    let start = layer.partition_point(|(_, g)| g.last().is_some_and(|t| t < lo));
    layer[start..]
        .iter()
        .take_while(move |(_, g)| g.first().is_some_and(|t| t <= hi))
}

fn pick(
    cands: &[(Label, &GranuleSet)],
    k: i64,
    l: i64,
    lo: Instant,
    hi: Instant,
    out: &mut BTreeMap<Label, GranuleSet>,
) {
    // 0-based start; negative k counts back from the end
    let len = cands.len() as i64;
    let start = if k > 0 { k - 1 } else { len + k };
    for pos in start..start + l {
        if pos < 0 || pos >= len {
            continue;
        }
        let (a, s) = cands[pos as usize];
        if inside(s, lo, hi) {
            out.insert(a, s.clone());
        }
    }
}

/// One disagreement between the oracle and a representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub label: Label,
    pub oracle: Option<GranuleSet>,
    pub rep: Option<GranuleSet>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComparisonReport {
    pub compared: usize,
    pub mismatches: Vec<Mismatch>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the interior of `w` with `g` in both directions.
pub fn compare_with_periodic(w: &WindowEval, g: &Granularity) -> ComparisonReport {
    let (a, b) = w.interior();
    let mut bad: BTreeMap<Label, Mismatch> = BTreeMap::new();
    let mut compared = 0;
    for (label, set) in w.trusted() {
        compared += 1;
        let rep = g.expand(label);
        if rep != *set {
            bad.insert(
                label,
                Mismatch {
                    label,
                    oracle: Some(set.clone()),
                    rep: (!rep.is_empty()).then_some(rep),
                },
            );
        }
    }
    let mut last = None;
    for t in a..=b {
        let Some(label) = g.up(t) else { continue };
        if last == Some(label) {
            continue;
        }
        last = Some(label);
        let rep = g.expand(label);
        if !inside(&rep, a, b) {
            continue;
        }
        if w.granules.get(&label) != Some(&rep) {
            bad.entry(label).or_insert(Mismatch {
                label,
                oracle: w.granules.get(&label).cloned(),
                rep: Some(rep),
            });
        }
    }
    ComparisonReport {
        compared,
        mismatches: bad.into_values().collect(),
    }
}
