//! Calendar Algebra expressions and calendar documents.

mod parse;
mod rewrite;
mod validate;

use std::fmt;
use std::sync::Arc;

pub use parse::{parse_calendar, parse_unchecked, ParseError, SyntaxError};
pub use rewrite::{rewrite_to_bottom, RewriteError};
pub use validate::{validate, Finding, Rule, ValidationReport};

pub type Expr = Arc<CalExpr>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CalExpr {
    Bottom,
    Name(String),
    Group {
        m: i64,
        operand: Expr,
    },
    /// `alter(l, k, m, fine, base)`: every `l`-th of `m` granules of `base`
    /// gains `k` granules of `fine`.
    Alter {
        l: i64,
        k: i64,
        m: i64,
        fine: Expr,
        base: Expr,
    },
    Shift {
        m: i64,
        operand: Expr,
    },
    Combine(Expr, Expr),
    Anchor(Expr, Expr),
    /// Label bounds; `None` is infinite.
    Subset {
        from: Option<i64>,
        to: Option<i64>,
        operand: Expr,
    },
    SelectDown {
        k: i64,
        l: i64,
        first: Expr,
        second: Expr,
    },
    SelectUp(Expr, Expr),
    SelectIntersect {
        k: i64,
        l: i64,
        first: Expr,
        second: Expr,
    },
    Union(Expr, Expr),
    Intersection(Expr, Expr),
    Difference(Expr, Expr),
}

impl CalExpr {
    pub fn group(m: i64, operand: Expr) -> Expr {
        Arc::new(CalExpr::Group { m, operand })
    }

    pub fn alter(l: i64, k: i64, m: i64, fine: Expr, base: Expr) -> Expr {
        Arc::new(CalExpr::Alter { l, k, m, fine, base })
    }

    pub fn shift(m: i64, operand: Expr) -> Expr {
        Arc::new(CalExpr::Shift { m, operand })
    }

    pub fn subset(from: Option<i64>, to: Option<i64>, operand: Expr) -> Expr {
        Arc::new(CalExpr::Subset { from, to, operand })
    }

    pub fn select_down(k: i64, l: i64, first: Expr, second: Expr) -> Expr {
        Arc::new(CalExpr::SelectDown { k, l, first, second })
    }

    pub fn select_intersect(k: i64, l: i64, first: Expr, second: Expr) -> Expr {
        Arc::new(CalExpr::SelectIntersect { k, l, first, second })
    }

    pub fn bottom() -> Expr {
        Arc::new(CalExpr::Bottom)
    }

    pub fn name(name: &str) -> Expr {
        Arc::new(CalExpr::Name(name.to_string()))
    }

    /// Operator keyword as written in calendar files.
    pub fn keyword(&self) -> &'static str {
        match self {
            CalExpr::Bottom => "bottom",
            CalExpr::Name(_) => "name",
            CalExpr::Group { .. } => "group",
            CalExpr::Alter { .. } => "alter",
            CalExpr::Shift { .. } => "shift",
            CalExpr::Combine(..) => "combine",
            CalExpr::Anchor(..) => "anchor",
            CalExpr::Subset { .. } => "subset",
            CalExpr::SelectDown { .. } => "selectdown",
            CalExpr::SelectUp(..) => "selectup",
            CalExpr::SelectIntersect { .. } => "selectintersect",
            CalExpr::Union(..) => "union",
            CalExpr::Intersection(..) => "intersect",
            CalExpr::Difference(..) => "difference",
        }
    }

    /// Sub-expressions in argument order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            CalExpr::Bottom | CalExpr::Name(_) => vec![],
            CalExpr::Group { operand, .. }
            | CalExpr::Shift { operand, .. }
            | CalExpr::Subset { operand, .. } => vec![operand],
            CalExpr::Alter { fine, base, .. } => vec![fine, base],
            CalExpr::SelectDown { first, second, .. }
            | CalExpr::SelectIntersect { first, second, .. } => vec![first, second],
            CalExpr::Combine(a, b)
            | CalExpr::Anchor(a, b)
            | CalExpr::SelectUp(a, b)
            | CalExpr::Union(a, b)
            | CalExpr::Intersection(a, b)
            | CalExpr::Difference(a, b) => vec![a, b],
        }
    }

    /// Rebuilds this node over new children, given in argument order.
    pub fn with_children(&self, mut kids: Vec<Expr>) -> CalExpr {
        let mut next = || kids.remove(0);
        match self {
            CalExpr::Bottom => CalExpr::Bottom,
            CalExpr::Name(n) => CalExpr::Name(n.clone()),
            CalExpr::Group { m, .. } => CalExpr::Group { m: *m, operand: next() },
            CalExpr::Shift { m, .. } => CalExpr::Shift { m: *m, operand: next() },
            CalExpr::Subset { from, to, .. } => CalExpr::Subset {
                from: *from,
                to: *to,
                operand: next(),
            },
            CalExpr::Alter { l, k, m, .. } => CalExpr::Alter {
                l: *l,
                k: *k,
                m: *m,
                fine: next(),
                base: next(),
            },
            CalExpr::SelectDown { k, l, .. } => CalExpr::SelectDown {
                k: *k,
                l: *l,
                first: next(),
                second: next(),
            },
            CalExpr::SelectIntersect { k, l, .. } => CalExpr::SelectIntersect {
                k: *k,
                l: *l,
                first: next(),
                second: next(),
            },
            CalExpr::Combine(..) => CalExpr::Combine(next(), next()),
            CalExpr::Anchor(..) => CalExpr::Anchor(next(), next()),
            CalExpr::SelectUp(..) => CalExpr::SelectUp(next(), next()),
            CalExpr::Union(..) => CalExpr::Union(next(), next()),
            CalExpr::Intersection(..) => CalExpr::Intersection(next(), next()),
            CalExpr::Difference(..) => CalExpr::Difference(next(), next()),
        }
    }

    /// Number of operator levels above the leaves.
    pub fn depth(&self) -> usize {
        self.children()
            .into_iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Source text, spelling the bottom as `bottom`.
    pub fn to_source(&self, bottom: &str) -> String {
        let mut out = String::new();
        self.write_source(&mut out, bottom).expect("writing to a String");
        out
    }

    fn write_source(&self, out: &mut impl fmt::Write, bottom: &str) -> fmt::Result {
        let bound = |b: Option<i64>, inf: &str| b.map_or(inf.to_string(), |v| v.to_string());
        match self {
            CalExpr::Bottom => return out.write_str(bottom),
            CalExpr::Name(n) => return out.write_str(n),
            _ => {}
        }
        write!(out, "{}(", self.keyword())?;
        match self {
            CalExpr::Group { m, .. } | CalExpr::Shift { m, .. } => write!(out, "{m}, ")?,
            CalExpr::Alter { l, k, m, .. } => write!(out, "{l}, {k}, {m}, ")?,
            CalExpr::SelectDown { k, l, .. } | CalExpr::SelectIntersect { k, l, .. } => {
                write!(out, "{k}, {l}, ")?
            }
            CalExpr::Subset { from, to, .. } => {
                write!(out, "{}, {}, ", bound(*from, "-inf"), bound(*to, "inf"))?
            }
            _ => {}
        }
        for (i, child) in self.children().into_iter().enumerate() {
            if i > 0 {
                out.write_str(", ")?;
            }
            child.write_source(out, bottom)?;
        }
        out.write_str(")")
    }
}

impl fmt::Display for CalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_source(f, "⊥")
    }
}

/// A named calendar: a bottom granularity and definitions over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CalendarDoc {
    pub name: String,
    pub bottom: String,
    pub definitions: Vec<(String, Expr)>,
}

impl CalendarDoc {
    pub fn new(name: impl Into<String>, bottom: impl Into<String>) -> Self {
        CalendarDoc {
            name: name.into(),
            bottom: bottom.into(),
            definitions: Vec::new(),
        }
    }

    pub fn define(mut self, name: impl Into<String>, expr: Expr) -> Self {
        self.definitions.push((name.into(), expr));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Expr> {
        self.definitions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
    }

    /// Definition names in order, the bottom first.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.bottom.as_str()).chain(self.definitions.iter().map(|(n, _)| n.as_str()))
    }
}

impl fmt::Display for CalendarDoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "calendar {} bottom {};", self.name, self.bottom)?;
        for (name, expr) in &self.definitions {
            writeln!(f, "{name} = {};", expr.to_source(&self.bottom))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_spelling() {
        let week = CalExpr::group(7, CalExpr::bottom());
        let monday = CalExpr::select_down(1, 1, CalExpr::bottom(), week.clone());
        assert_eq!(monday.to_source("day"), "selectdown(1, 1, day, group(7, day))");
        let s = CalExpr::subset(None, Some(4), week);
        assert_eq!(s.to_source("day"), "subset(-inf, 4, group(7, day))");
        assert_eq!(s.to_string(), "subset(-inf, 4, group(7, ⊥))");
        assert_eq!(s.depth(), 2);
    }

    #[test]
    fn rebuild_preserves_shape() {
        let e = CalExpr::alter(1, -1, 2, CalExpr::bottom(), CalExpr::name("w"));
        let kids = e.children().into_iter().cloned().collect();
        assert_eq!(e.with_children(kids), *e);
    }
}
