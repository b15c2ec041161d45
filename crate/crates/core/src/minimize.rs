//! Period minimization by prime-factor descent over `gcd(P, N, R)`.

use crate::arith::{gcd, prime_factors};
use crate::granularity::{Granularity, PeriodicRep};

/// Whether the pattern shifted by `N/α` labels and `P/α` instants maps onto
/// itself, so that `(P/α, N/α)` also describes `rep`.
pub fn is_valid_reduction(rep: &PeriodicRep, alpha: i64) -> bool {
    let (p, n) = (rep.period(), rep.label_distance());
    let r = rep.granule_count() as i64;
    if alpha < 2 || p % alpha != 0 || n % alpha != 0 || r % alpha != 0 {
        return false;
    }
    let (step_p, step_n, block) = (p / alpha, n / alpha, (r / alpha) as usize);
    let granules = rep.granules();
    granules.iter().enumerate().all(|(idx, (label, set))| {
        let target = idx + block;
        let (next_label, next_set) = if target < granules.len() {
            let (l, s) = &granules[target];
            (*l, s.clone())
        } else {
            let (l, s) = &granules[target - granules.len()];
            match s.shifted(p) {
                Some(s) => (l + n, s),
                None => return false,
            }
        };
        next_label == label + step_n && set.shifted(step_p).as_ref() == Some(&next_set)
    })
}

/// Divides `P`, `N` and `R` by `alpha`, keeping the first `R/α` granules.
/// The caller must have checked [`is_valid_reduction`].
pub fn reduce(rep: &PeriodicRep, alpha: i64) -> PeriodicRep {
    let keep = rep.granule_count() / alpha as usize;
    PeriodicRep::new(
        rep.period() / alpha,
        rep.label_distance() / alpha,
        rep.granules()[..keep].iter().cloned(),
    )
    .expect("a valid reduction keeps the structure")
    .with_bounds(rep.bounds())
}

/// The representation with the smallest period describing the same
/// granularity.
pub fn minimize_rep(rep: &PeriodicRep) -> PeriodicRep {
    let mut rep = rep.clone();
    let g = gcd(gcd(rep.period(), rep.label_distance()), rep.granule_count() as i64);
    for p in prime_factors(g) {
        while is_valid_reduction(&rep, p) {
            rep = reduce(&rep, p);
        }
    }
    rep.normalized()
}

pub fn minimize(g: &Granularity) -> Granularity {
    match g {
        Granularity::Empty => Granularity::Empty,
        Granularity::Periodic(rep) => minimize_rep(rep).into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::granularity::GranuleSet;

    fn gs(v: &[i64]) -> GranuleSet {
        GranuleSet::new(v.to_vec())
    }

    #[test]
    fn doubled_week() {
        let rep = PeriodicRep::new(14, 2, [(1, GranuleSet::range(1, 7)), (2, GranuleSet::range(8, 14))]).unwrap();
        assert!(is_valid_reduction(&rep, 2));
        let week = PeriodicRep::new(7, 1, [(1, GranuleSet::range(1, 7))]).unwrap();
        assert_eq!(minimize_rep(&rep), week);
        assert_eq!(minimize_rep(&week), week);
    }

    #[test]
    fn unequal_sizes() {
        let rep = PeriodicRep::new(4, 2, [(1, gs(&[1])), (2, gs(&[2, 3, 4]))]).unwrap();
        assert!(!is_valid_reduction(&rep, 2));
        assert_eq!(minimize_rep(&rep), rep);
    }

    #[test]
    fn scaled_day() {
        let rep = PeriodicRep::new(5, 5, (1..=5).map(|d| (d, gs(&[d])))).unwrap();
        assert!(is_valid_reduction(&rep, 5));
        assert_eq!(minimize_rep(&rep), PeriodicRep::bottom());
    }

    #[test]
    fn repeated_factor() {
        let rep = PeriodicRep::new(8, 8, (1..=8).map(|d| (d, gs(&[d])))).unwrap();
        assert_eq!(minimize_rep(&rep), PeriodicRep::bottom());
    }
}
