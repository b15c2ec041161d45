//! Lowering of closed Calendar Algebra expressions to periodic reps.

mod ops;
mod relabel;
mod select;

use std::collections::HashMap;
use std::sync::Arc;

use crate::arith::Overflow;
use crate::ast::{CalExpr, Expr};
use crate::granularity::{Granularity, Label, RepError};
use crate::minimize::minimize;

pub use ops::{
    convert_alter, convert_anchored, convert_combine, convert_group, convert_set_op,
    convert_shift, convert_subset, SetOp,
};
pub use relabel::{gstp_relabel, relabel};
pub use select::{convert_select_down, convert_select_intersect, convert_select_up, delta_select};

/// Default cap on any computed period length.
pub const DEFAULT_MAX_PERIOD: i64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_period: i64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_period: DEFAULT_MAX_PERIOD,
        }
    }
}

impl Limits {
    /// Reads `GRANLOWER_MAX_PERIOD`, falling back to the default.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var("GRANLOWER_MAX_PERIOD") {
            Ok(v) => match v.trim().parse::<i64>() {
                Ok(p) if p > 0 => Ok(Limits { max_period: p }),
                _ => Err(format!("GRANLOWER_MAX_PERIOD must be a positive integer, got {v:?}")),
            },
            Err(_) => Ok(Limits::default()),
        }
    }

    pub(crate) fn check(&self, period: i64) -> Result<i64, OpError> {
        if period > self.max_period {
            Err(OpError::PeriodLimit {
                period,
                max: self.max_period,
            })
        } else {
            Ok(period)
        }
    }
}

/// Failure of a single operation's conversion.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OpError {
    #[error("{op} needs a full-integer labeled operand")]
    NotFullInteger { op: &'static str },
    #[error("the finer operand does not partition the coarser one: {0}")]
    NotPartition(String),
    #[error("k = {k} shrinks too far: it must exceed {bound} (minimum granule size {mindist})")]
    AlterShrink { k: i64, bound: i64, mindist: i64 },
    #[error("operands are not label-aligned: {0}")]
    NotLabelAligned(String),
    #[error("label densities differ: N1/P1 = {n1}/{p1} but N2/P2 = {n2}/{p2}")]
    RatioMismatch { n1: i64, p1: i64, n2: i64, p2: i64 },
    #[error("subset bounds are reversed: {from} > {to}")]
    SubsetRange { from: i64, to: i64 },
    #[error("subset may only be applied as the last step")]
    NestedSubset,
    #[error("period {period} exceeds the limit {max}")]
    PeriodLimit { period: i64, max: i64 },
    #[error("{0}")]
    Overflow(#[from] Overflow),
    #[error("{0}")]
    Rep(#[from] RepError),
    #[error("the operand is empty")]
    EmptyOperand,
    #[error("{0}")]
    Parameter(String),
    #[error("label {0} has no granule")]
    NotALabel(Label),
    #[error("unresolved name `{0}` in a closed expression")]
    Unresolved(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl OpError {
    /// The error reports an operand that violates the operation's
    /// requirements, as opposed to an arithmetic or internal failure.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            OpError::NotFullInteger { .. }
                | OpError::NotPartition(_)
                | OpError::AlterShrink { .. }
                | OpError::NotLabelAligned(_)
                | OpError::RatioMismatch { .. }
                | OpError::SubsetRange { .. }
                | OpError::NestedSubset
                | OpError::EmptyOperand
                | OpError::Parameter(_)
        )
    }
}

/// An [`OpError`] located in the expression tree.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("at {path} ({expr}): {source}")]
pub struct ConvertError {
    /// Operator keywords from the root, with argument positions.
    pub path: String,
    pub expr: String,
    pub source: OpError,
}

/// One conversion step, recorded bottom-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepTrace {
    pub expr: String,
    pub period: i64,
    pub label_distance: i64,
    pub anchor: Option<Label>,
    pub explicit: usize,
    pub cached: bool,
}

/// Converted subexpressions keyed by their structure.
#[derive(Clone, Debug, Default)]
pub struct ConversionCache {
    map: HashMap<Expr, Granularity>,
    hits: usize,
}

impl ConversionCache {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn hits(&self) -> usize {
        self.hits
    }
}

/// Recursive post-order conversion with optional per-step minimization.
#[derive(Debug)]
pub struct Converter {
    minimize: bool,
    limits: Limits,
    use_cache: bool,
    cache: ConversionCache,
    trace: Option<Vec<StepTrace>>,
}

impl Converter {
    pub fn new(minimize: bool) -> Self {
        Converter {
            minimize,
            limits: Limits::default(),
            use_cache: true,
            cache: ConversionCache::default(),
            trace: None,
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn without_cache(mut self) -> Self {
        self.use_cache = false;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn cache(&self) -> &ConversionCache {
        &self.cache
    }

    pub fn trace(&self) -> &[StepTrace] {
        self.trace.as_deref().unwrap_or(&[])
    }

    /// Converts a closed expression (bottom leaves only).
    pub fn convert(&mut self, expr: &Expr) -> Result<Granularity, ConvertError> {
        let mut path = Vec::new();
        self.convert_at(expr, &mut path, true)
    }

    fn convert_at(
        &mut self,
        expr: &Expr,
        path: &mut Vec<String>,
        outermost: bool,
    ) -> Result<Granularity, ConvertError> {
        if self.use_cache {
            if let Some(g) = self.cache.map.get(expr) {
                let g = g.clone();
                self.cache.hits += 1;
                self.record(expr, &g, true);
                return Ok(g);
            }
        }
        path.push(expr.keyword().to_string());
        let fail = |path: &[String], source: OpError| ConvertError {
            path: path.join(" > "),
            expr: expr.to_string(),
            source,
        };
        if let CalExpr::Subset { .. } = **expr {
            if !outermost {
                return Err(fail(path, OpError::NestedSubset));
            }
        }
        let mut operands = Vec::new();
        for (i, child) in expr.children().into_iter().enumerate() {
            if let Some(last) = path.last_mut() {
                *last = format!("{}[{}]", expr.keyword(), i + 1);
            }
            operands.push(self.convert_at(child, path, false)?);
        }
        if let Some(last) = path.last_mut() {
            *last = expr.keyword().to_string();
        }
        let mut result = apply(expr, &operands, &self.limits).map_err(|e| fail(path, e))?;
        if self.minimize {
            result = minimize(&result);
        }
        path.pop();
        self.record(expr, &result, false);
        if self.use_cache {
            self.cache.map.insert(Arc::clone(expr), result.clone());
        }
        Ok(result)
    }

    fn record(&mut self, expr: &Expr, g: &Granularity, cached: bool) {
        if let Some(trace) = &mut self.trace {
            trace.push(StepTrace {
                expr: expr.to_string(),
                period: g.period(),
                label_distance: g.label_distance(),
                anchor: g.as_periodic().map(|r| r.window_start()),
                explicit: g.as_periodic().map_or(0, |r| r.granule_count()),
                cached,
            });
        }
    }
}

/// Applies one operator to already converted operands, including the
/// empty-operand rules.
fn apply(expr: &CalExpr, ops: &[Granularity], limits: &Limits) -> Result<Granularity, OpError> {
    use Granularity::Empty;
    let rep = |i: usize| ops[i].as_periodic();
    match expr {
        CalExpr::Bottom => Ok(Granularity::bottom()),
        CalExpr::Name(n) => Err(OpError::Unresolved(n.clone())),
        CalExpr::Group { m, .. } => match rep(0) {
            None => Ok(Empty),
            Some(g) => convert_group(g, *m, limits),
        },
        CalExpr::Shift { m, .. } => match rep(0) {
            None => Ok(Empty),
            Some(g) => convert_shift(g, *m),
        },
        CalExpr::Alter { l, k, m, .. } => match (rep(0), rep(1)) {
            (_, None) => Ok(Empty),
            (None, Some(_)) => Err(OpError::NotPartition(
                "the finer operand has no granules".into(),
            )),
            (Some(g2), Some(g1)) => convert_alter(g2, g1, *l, *k, *m, limits),
        },
        CalExpr::Combine(..) => match (rep(0), rep(1)) {
            (Some(g1), Some(g2)) => convert_combine(g1, g2, limits),
            _ => Ok(Empty),
        },
        CalExpr::Anchor(..) => match (rep(0), rep(1)) {
            (_, None) => Ok(Empty),
            (None, Some(_)) => Err(OpError::NotLabelAligned(
                "anchors cannot be a subgranularity of an empty granularity".into(),
            )),
            (Some(g1), Some(g2)) => convert_anchored(g1, g2, limits),
        },
        CalExpr::Subset { from, to, .. } => {
            if let (Some(a), Some(b)) = (from, to) {
                if a > b {
                    return Err(OpError::SubsetRange { from: *a, to: *b });
                }
            }
            match rep(0) {
                None => Ok(Empty),
                Some(g) => convert_subset(g, *from, *to),
            }
        }
        CalExpr::SelectDown { k, l, .. } => match (rep(0), rep(1)) {
            (Some(g1), Some(g2)) => convert_select_down(g1, g2, *k, *l, limits),
            _ => Ok(Empty),
        },
        CalExpr::SelectUp(..) => match (rep(0), rep(1)) {
            (Some(g1), Some(g2)) => convert_select_up(g1, g2, limits),
            _ => Ok(Empty),
        },
        CalExpr::SelectIntersect { k, l, .. } => match (rep(0), rep(1)) {
            (Some(g1), Some(g2)) => convert_select_intersect(g1, g2, *k, *l, limits),
            _ => Ok(Empty),
        },
        CalExpr::Union(..) => match (rep(0), rep(1)) {
            (Some(g1), Some(g2)) => convert_set_op(g1, g2, SetOp::Union, limits),
            _ => Ok(if ops[0].is_empty() { ops[1].clone() } else { ops[0].clone() }),
        },
        CalExpr::Intersection(..) => match (rep(0), rep(1)) {
            (Some(g1), Some(g2)) => convert_set_op(g1, g2, SetOp::Intersection, limits),
            _ => Ok(Empty),
        },
        CalExpr::Difference(..) => match (rep(0), rep(1)) {
            (Some(g1), Some(g2)) => convert_set_op(g1, g2, SetOp::Difference, limits),
            _ => Ok(ops[0].clone()),
        },
    }
}
