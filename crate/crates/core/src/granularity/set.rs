use std::fmt;

use super::Instant;

/// A finite, strictly increasing set of bottom-granule indices.
///
/// Granules produced by selections and combinations are frequently
/// non-contiguous, so the set stores every index explicitly.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GranuleSet(Vec<Instant>);

impl GranuleSet {
    pub fn new(mut indices: Vec<Instant>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        GranuleSet(indices)
    }

    /// Inclusive run `first..=last`.
    pub fn range(first: Instant, last: Instant) -> Self {
        GranuleSet((first..=last).collect())
    }

    pub fn singleton(t: Instant) -> Self {
        GranuleSet(vec![t])
    }

    pub fn as_slice(&self) -> &[Instant] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Instant> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Instant> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Instant> {
        self.0.last().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = Instant> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, t: Instant) -> bool {
        self.0.binary_search(&t).is_ok()
    }

    pub fn is_subset(&self, other: &GranuleSet) -> bool {
        if self.0.len() > other.0.len() {
            return false;
        }
        match (self.first(), self.last(), other.first(), other.last()) {
            (Some(a), Some(b), Some(c), Some(d)) if a < c || b > d => return false,
            (None, ..) => return true,
            _ => {}
        }
        let mut rest = other.as_slice();
        for &t in &self.0 {
            match rest.binary_search(&t) {
                Ok(pos) => rest = &rest[pos + 1..],
                Err(_) => return false,
            }
        }
        true
    }

    pub fn intersects(&self, other: &GranuleSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Every index translated by `delta`; `None` on overflow.
    pub fn shifted(&self, delta: i64) -> Option<GranuleSet> {
        self.0
            .iter()
            .map(|t| t.checked_add(delta))
            .collect::<Option<Vec<_>>>()
            .map(GranuleSet)
    }

    /// Appends `other`, which must lie entirely after `self`.
    pub(crate) fn extend_ordered(&mut self, other: &GranuleSet) {
        debug_assert!(match (self.last(), other.first()) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        });
        self.0.extend_from_slice(&other.0);
    }
}

impl FromIterator<Instant> for GranuleSet {
    fn from_iter<I: IntoIterator<Item = Instant>>(iter: I) -> Self {
        GranuleSet::new(iter.into_iter().collect())
    }
}

impl fmt::Display for GranuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for t in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
            first = false;
        }
        Ok(())
    }
}
