use std::collections::HashMap;
use std::sync::Arc;

use super::{CalExpr, CalendarDoc, Expr};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("`{0}` is not defined")]
    Unresolved(String),
    #[error("`{0}` refers to itself")]
    Cycle(String),
}

/// Inlines every name reachable from `target` so only bottom leaves remain.
///
/// Structurally equal subtrees come back as the same `Arc`, so a cache keyed
/// on the tree sees each shared subexpression once.
pub fn rewrite_to_bottom(doc: &CalendarDoc, target: &str) -> Result<Expr, RewriteError> {
    if target == doc.bottom {
        return Ok(CalExpr::bottom());
    }
    let expr = doc
        .get(target)
        .ok_or_else(|| RewriteError::Unresolved(target.to_string()))?;
    let mut r = Rewriter {
        doc,
        resolved: HashMap::new(),
        interned: HashMap::new(),
        active: Vec::new(),
    };
    r.active.push(target.to_string());
    r.close(expr)
}

struct Rewriter<'a> {
    doc: &'a CalendarDoc,
    resolved: HashMap<String, Expr>,
    interned: HashMap<CalExpr, Expr>,
    active: Vec<String>,
}

impl Rewriter<'_> {
    fn intern(&mut self, node: CalExpr) -> Expr {
        if let Some(e) = self.interned.get(&node) {
            return e.clone();
        }
        let e = Arc::new(node.clone());
        self.interned.insert(node, e.clone());
        e
    }

    fn close(&mut self, expr: &Expr) -> Result<Expr, RewriteError> {
        match &**expr {
            CalExpr::Bottom => Ok(self.intern(CalExpr::Bottom)),
            CalExpr::Name(n) if *n == self.doc.bottom => Ok(self.intern(CalExpr::Bottom)),
            CalExpr::Name(n) => {
                if let Some(e) = self.resolved.get(n) {
                    return Ok(e.clone());
                }
                if self.active.contains(n) {
                    return Err(RewriteError::Cycle(n.clone()));
                }
                let def = self
                    .doc
                    .get(n)
                    .ok_or_else(|| RewriteError::Unresolved(n.clone()))?
                    .clone();
                self.active.push(n.clone());
                let closed = self.close(&def)?;
                self.active.pop();
                self.resolved.insert(n.clone(), closed.clone());
                Ok(closed)
            }
            node => {
                let kids = node
                    .children()
                    .into_iter()
                    .map(|c| self.close(c))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(self.intern(node.with_children(kids)))
            }
        }
    }
}
