#![allow(dead_code)]

use granlower::arith::{gcd, prime_factors};
use granlower::ast::CalExpr;
use granlower::convert::OpError;
use granlower::{
    compare_with_periodic, eval_window, is_valid_reduction, minimize, Converter, Expr, Granularity, GranuleSet,
    Limits, PeriodicRep,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const GREGORIAN: &str = include_str!("../../../../fixtures/gregorian.cal");
pub const WEEKS: &str = include_str!("../../../../fixtures/weeks.cal");

/// How often each operator keyword occurs in `expr`.
pub fn count_ops(expr: &CalExpr, into: &mut std::collections::BTreeMap<&'static str, usize>) {
    *into.entry(expr.keyword()).or_default() += 1;
    for c in expr.children() {
        count_ops(c, into);
    }
}

pub fn gs(v: &[i64]) -> GranuleSet {
    GranuleSet::new(v.to_vec())
}

pub fn rep(p: i64, n: i64, granules: &[(i64, &[i64])]) -> PeriodicRep {
    PeriodicRep::new(p, n, granules.iter().map(|(l, s)| (*l, gs(s)))).unwrap()
}

pub fn periodic(g: &Granularity) -> &PeriodicRep {
    g.as_periodic().expect("non-empty result")
}

fn is_leap(y: i64) -> bool {
    (y % 4 == 0 && y % 100 != 0) || y % 400 == 0
}

/// First and last day of every month of the 400-year cycle, counting
/// 1 January of year 1 as day 1.
pub fn gregorian_months() -> Vec<(i64, i64)> {
    const DAYS: [i64; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];
    let mut out = Vec::with_capacity(4800);
    let mut next = 1;
    for y in 1..=400 {
        for (m, &d) in DAYS.iter().enumerate() {
            let len = if m == 1 && is_leap(y) { d + 1 } else { d };
            out.push((next, next + len - 1));
            next += len;
        }
    }
    out
}

pub fn gregorian_years() -> Vec<(i64, i64)> {
    let mut out = Vec::with_capacity(400);
    let mut next = 1;
    for y in 1..=400 {
        let len = if is_leap(y) { 366 } else { 365 };
        out.push((next, next + len - 1));
        next += len;
    }
    out
}

/// Random calendar expressions over the bottom with small parameters.
pub struct ExprGen {
    rng: StdRng,
}

impl ExprGen {
    pub fn new(seed: u64) -> Self {
        ExprGen {
            rng: StdRng::seed_from_u64(seed),
        }
    }

    fn pick(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    fn nonzero(&mut self, lim: i64) -> i64 {
        let k = self.pick(1, lim);
        if self.rng.gen_bool(0.3) {
            -k
        } else {
            k
        }
    }

    /// Expressions whose granules tile the time line.
    pub fn full(&mut self, depth: usize) -> Expr {
        if depth == 0 {
            return CalExpr::bottom();
        }
        match self.pick(0, 5) {
            0 => CalExpr::bottom(),
            1 | 2 => {
                let m = self.pick(1, 8);
                CalExpr::group(m, self.full(depth - 1))
            }
            3 => {
                let m = self.pick(-8, 8);
                CalExpr::shift(m, self.full(depth - 1))
            }
            _ if depth >= 2 => {
                let fine = self.full(depth - 2);
                let size = self.pick(2, 8);
                let base = CalExpr::group(size, fine.clone());
                let m = self.pick(1, 8);
                let l = self.pick(1, m);
                let k = self.pick((2 - size).max(-8), 8);
                CalExpr::alter(l, k, m, fine, base)
            }
            _ => {
                let m = self.pick(2, 8);
                CalExpr::group(m, self.full(depth - 1))
            }
        }
    }

    pub fn any(&mut self, depth: usize) -> Expr {
        if depth == 0 {
            return CalExpr::bottom();
        }
        let below = depth - 1;
        match self.pick(0, 8) {
            0 | 1 => self.full(depth),
            2 => {
                let (coarse, fine) = self.related(below);
                CalExpr::Combine(coarse, fine).into()
            }
            3 if depth >= 2 => {
                let g = self.full(depth.saturating_sub(3));
                let (k, l) = (self.position(), self.pick(1, 3));
                let sel = CalExpr::select_down(k, l, g.clone(), self.coarser(g.clone(), depth - 2));
                CalExpr::Anchor(g, sel).into()
            }
            4 => {
                let (coarse, fine) = self.related(below);
                let (k, l) = (self.position(), self.pick(1, 8));
                CalExpr::select_down(k, l, fine, coarse)
            }
            5 => {
                let (coarse, fine) = self.related(below);
                CalExpr::SelectUp(coarse, fine).into()
            }
            6 => {
                let (coarse, fine) = self.related(below);
                let (k, l) = (self.position(), self.pick(1, 8));
                CalExpr::select_intersect(k, l, fine, coarse)
            }
            7 if depth >= 2 => self.set_op(depth),
            _ => self.full(depth),
        }
    }

    /// A set operation on two selections from one full-integer expression.
    pub fn set_op(&mut self, depth: usize) -> Expr {
        let g = self.full(depth.saturating_sub(2));
        let a = self.selection_of(g.clone(), depth - 1);
        let b = self.selection_of(g, depth - 1);
        match self.pick(0, 2) {
            0 => CalExpr::Union(a, b).into(),
            1 => CalExpr::Intersection(a, b).into(),
            _ => CalExpr::Difference(a, b).into(),
        }
    }

    fn position(&mut self) -> i64 {
        let lim = if self.rng.gen_bool(0.7) { 3 } else { 8 };
        self.nonzero(lim)
    }

    /// A grouping of `g`, or an unrelated expression, of depth at most
    /// `budget`.
    fn coarser(&mut self, g: Expr, budget: usize) -> Expr {
        let room = budget.saturating_sub(g.depth());
        match self.pick(0, 4) {
            1 if room >= 2 => {
                let m = self.pick(2, 8);
                let s = self.pick(-8, 8);
                CalExpr::shift(s, CalExpr::group(m, g))
            }
            2..=4 if room >= 1 => CalExpr::group(self.pick(2, 8), g),
            _ => self.any(budget),
        }
    }

    /// `(coarse, fine)` operands of depth at most `depth`, usually with
    /// `coarse` grouping a full-integer expression that `fine` selects from.
    fn related(&mut self, depth: usize) -> (Expr, Expr) {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return (self.any(depth), self.any(depth));
        }
        let f = self.full(depth - 1);
        let coarse = self.coarser(f.clone(), depth);
        let fine = if self.rng.gen_bool(0.6) {
            f
        } else {
            self.selection_of(f, depth)
        };
        (coarse, fine)
    }

    /// `g` or a selection from it, of depth at most `budget`.
    fn selection_of(&mut self, g: Expr, budget: usize) -> Expr {
        if budget <= g.depth() {
            return g;
        }
        let other = self.coarser(g.clone(), budget - 1);
        let (k, l) = (self.position(), self.pick(1, 4));
        match self.pick(0, 3) {
            0 => CalExpr::select_down(k, l, g, other),
            1 => CalExpr::select_intersect(k, l, g, other),
            2 => CalExpr::SelectUp(g, other).into(),
            _ => g,
        }
    }

    /// An expression of depth at most 3 whose unminimized conversion
    /// succeeds with a period no larger than `max_period`.
    pub fn accepted(&mut self, max_period: i64) -> (Expr, Granularity) {
        let limits = Limits { max_period };
        loop {
            let expr = match self.pick(0, 19) {
                0 | 1 => {
                    let from = self.pick(-8, 8);
                    let to = self.pick(from, 8);
                    CalExpr::subset(Some(from), Some(to), self.any(2))
                }
                2..=4 => self.set_op(3),
                _ => self.any(3),
            };
            assert!(expr.depth() <= 3, "generated {expr} deeper than 3");
            match Converter::new(false).with_limits(limits).convert(&expr) {
                Ok(g) if g.is_empty() && self.rng.gen_bool(0.8) => {}
                Ok(g) => return (expr, g),
                Err(e) if e.source.is_precondition() || matches!(e.source, OpError::PeriodLimit { .. }) => {}
                Err(e) => panic!("unexpected conversion error for {expr}: {e}"),
            }
        }
    }
}

/// Compares `g` with the oracle on a window of three periods of `p`.
pub fn oracle_check(expr: &CalExpr, g: &Granularity, p: i64) -> Result<usize, String> {
    let p = p.max(16);
    let w = eval_window(expr, 1 - p, 2 * p, p / 2).map_err(|e| format!("{expr}: oracle failed: {e}"))?;
    let report = compare_with_periodic(&w, g);
    if report.passed() {
        Ok(report.compared)
    } else {
        Err(format!("{expr}: {} mismatches, first {:?}", report.mismatches.len(), report.mismatches[0]))
    }
}

/// `G(j + N) = G(j) + P` over three periods of labels.
pub fn check_periodicity(rep: &PeriodicRep) -> Result<(), String> {
    let rep = rep.unbounded();
    let (p, n, l) = (rep.period(), rep.label_distance(), rep.window_start());
    for j in l - n..l + 2 * n {
        if !rep.has_label_unbounded(j) {
            continue;
        }
        let here = rep.expand(j);
        if rep.expand(j + n) != here.shifted(p).unwrap() {
            return Err(format!("G({}) is not G({j}) + {p}", j + n));
        }
    }
    Ok(())
}

/// Every instant of a granule maps back to that granule's label, and
/// instants outside all granules map to nothing.
pub fn check_round_trip(rep: &PeriodicRep) -> Result<(), String> {
    let rep = rep.unbounded();
    let (p, n, l) = (rep.period(), rep.label_distance(), rep.window_start());
    let mut covered = std::collections::BTreeSet::new();
    for j in l - n..l + 2 * n {
        if !rep.has_label_unbounded(j) {
            continue;
        }
        for t in rep.expand(j).iter() {
            covered.insert(t);
            if rep.up(t) != Some(j) {
                return Err(format!("up({t}) = {:?}, expected {j}", rep.up(t)));
            }
        }
    }
    let a = rep.expand(l).first().unwrap();
    for t in a..a + p {
        if !covered.contains(&t) && rep.up(t).is_some() {
            return Err(format!("uncovered instant {t} maps to {:?}", rep.up(t)));
        }
    }
    Ok(())
}

/// The same granules listed over `alpha` periods describe the same
/// granularity.
pub fn check_scaling(rep: &PeriodicRep, alpha: i64) -> Result<(), String> {
    let big = rep.scaled(alpha).map_err(|e| e.to_string())?;
    let (n, l) = (rep.label_distance(), rep.window_start());
    for j in l - 2 * alpha * n..l + 2 * alpha * n {
        if big.expand(j) != rep.expand(j) {
            return Err(format!("scaling by {alpha} changes granule {j}"));
        }
    }
    if minimize(&big.clone().into()) != minimize(&rep.clone().into()) {
        return Err(format!("scaling by {alpha} changes the minimal form"));
    }
    Ok(())
}

/// `minimize` is idempotent and no prime factor of `gcd(P, N, R)` admits a
/// further reduction.
pub fn check_minimal(g: &Granularity) -> Result<(), String> {
    let m = minimize(g);
    if minimize(&m) != m {
        return Err("minimize is not idempotent".into());
    }
    if let Some(rep) = m.as_periodic() {
        let f = gcd(gcd(rep.period(), rep.label_distance()), rep.granule_count() as i64);
        for q in prime_factors(f) {
            if is_valid_reduction(rep, q) {
                return Err(format!("minimized rep still reduces by {q}"));
            }
        }
        if let Some(orig) = g.as_periodic() {
            if orig.period() % rep.period() != 0 {
                return Err("minimal period does not divide the original".into());
            }
        }
    }
    Ok(())
}
