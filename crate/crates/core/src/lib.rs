//! Lowering of Calendar Algebra granularity definitions to periodic
//! representations over a bottom granularity.

pub mod arith;
pub mod ast;
pub mod convert;
pub mod granularity;
pub mod minimize;
pub mod oracle;

pub use ast::{parse_calendar, rewrite_to_bottom, CalExpr, CalendarDoc, Expr};
pub use convert::{ConvertError, Converter, Limits, OpError};
pub use granularity::{Bounds, Granularity, GranuleSet, Instant, Label, PeriodicRep, RepError};
pub use minimize::{is_valid_reduction, minimize};
pub use oracle::{compare_with_periodic, eval_window, ComparisonReport, WindowEval};
