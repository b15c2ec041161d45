use std::collections::HashSet;
use std::fmt;

use super::{CalExpr, CalendarDoc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    SubsetNotOutermost,
    ParameterRange,
    UnresolvedName,
    DuplicateName,
    /// Operand requirement found while converting (partitioning, label
    /// alignment, full-integer labels, the Alter shrink limit).
    OperandPrecondition,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::SubsetNotOutermost => "Subset must be outermost",
            Rule::ParameterRange => "parameter out of range",
            Rule::UnresolvedName => "unresolved name",
            Rule::DuplicateName => "duplicate name",
            Rule::OperandPrecondition => "operand precondition",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub definition: String,
    pub rule: Rule,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn push(&mut self, definition: &str, rule: Rule, message: impl Into<String>) {
        self.findings.push(Finding {
            definition: definition.to_string(),
            rule,
            message: message.into(),
        });
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.findings.iter().any(|f| f.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            writeln!(f, "  {}: {}: {}", finding.definition, finding.rule, finding.message)?;
        }
        Ok(())
    }
}

/// Static checks: parameter ranges, name resolution, Subset placement.
///
/// A name bound to a Subset definition is itself bounded, so referring to
/// it from another definition puts a Subset in an inner position.
pub fn validate(doc: &CalendarDoc) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut known: HashSet<&str> = HashSet::new();
    let mut bounded: HashSet<&str> = HashSet::new();
    known.insert(&doc.bottom);
    for (name, expr) in &doc.definitions {
        let mut ctx = Ctx {
            def: name,
            known: &known,
            bounded: &bounded,
            report: &mut report,
        };
        ctx.check(expr, true);
        if !known.insert(name) {
            report.push(name, Rule::DuplicateName, format!("`{name}` is already defined"));
        }
        if matches!(**expr, CalExpr::Subset { .. }) {
            bounded.insert(name);
        }
    }
    report
}

struct Ctx<'a> {
    def: &'a str,
    known: &'a HashSet<&'a str>,
    bounded: &'a HashSet<&'a str>,
    report: &'a mut ValidationReport,
}

impl Ctx<'_> {
    fn range(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.report.push(self.def, Rule::ParameterRange, message());
        }
    }

    fn check(&mut self, expr: &CalExpr, outermost: bool) {
        match expr {
            CalExpr::Bottom => {}
            CalExpr::Name(n) => {
                if !self.known.contains(n.as_str()) {
                    self.report.push(
                        self.def,
                        Rule::UnresolvedName,
                        format!("`{n}` is not defined before `{}`", self.def),
                    );
                } else if self.bounded.contains(n.as_str()) {
                    self.report.push(
                        self.def,
                        Rule::SubsetNotOutermost,
                        format!("`{n}` is a subset and cannot be used as an operand"),
                    );
                }
            }
            CalExpr::Group { m, .. } => self.range(*m >= 1, || format!("group needs m >= 1, got {m}")),
            CalExpr::Alter { l, m, .. } => self.range(1 <= *l && l <= m, || {
                format!("alter needs 1 <= l <= m, got l={l}, m={m}")
            }),
            CalExpr::Subset { from, to, .. } => {
                if !outermost {
                    self.report.push(
                        self.def,
                        Rule::SubsetNotOutermost,
                        "subset may only be applied as the last step of a definition",
                    );
                }
                if let (Some(a), Some(b)) = (from, to) {
                    self.range(a <= b, || format!("subset needs m <= n, got {a} > {b}"));
                }
            }
            CalExpr::SelectDown { k, l, .. } | CalExpr::SelectIntersect { k, l, .. } => {
                self.range(*k != 0 && *l > 0, || {
                    format!("{} needs k != 0 and l > 0, got k={k}, l={l}", expr.keyword())
                })
            }
            _ => {}
        }
        for child in expr.children() {
            self.check(child, false);
        }
    }
}
