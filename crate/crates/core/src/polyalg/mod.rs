//! Exact univariate integer-polynomial analysis: certified real-root
//! isolation, irreducibility over Q, and the self-reciprocal / trace
//! transforms behind the spectral predicates.

mod irreducible;
mod sturm;
mod structure;

pub use irreducible::is_irreducible_q;
pub use sturm::{cauchy_bound, isolate_real_roots, refine_interval, RootInterval, SturmChain};
pub use structure::{
    cyclotomic, euler_phi, expand_trace_poly, has_root_of_unity_factor, poly_in_tn,
    self_reciprocal_test, trace_poly_decompose, unit_circle_pairs,
};

use num_rational::BigRational;

use crate::exact::IntPoly;
use crate::Result;

/// Real-root picture of a squarefree polynomial: disjoint rational isolation
/// intervals (one real root each), the number of conjugate complex pairs,
/// and how many of those pairs sit exactly on the unit circle.
#[derive(Clone, Debug)]
pub struct RootIsolation {
    pub real_intervals: Vec<RootInterval>,
    pub complex_pair_count: usize,
    pub unit_circle_pair_count: usize,
}

impl RootIsolation {
    pub fn check_degree(&self, degree: usize) -> bool {
        self.real_intervals.len() + 2 * self.complex_pair_count == degree
    }
}

/// Isolate the real roots of squarefree `p`, either on the whole line or
/// restricted to an open rational interval, and count the complex pairs
/// exactly.
pub fn sturm_isolate(
    p: &IntPoly,
    range: Option<(BigRational, BigRational)>,
) -> Result<RootIsolation> {
    let whole_line = range.is_none();
    let real_intervals = isolate_real_roots(p, range)?;
    let (complex_pair_count, unit_circle_pair_count) = if whole_line {
        let total_real = real_intervals.len();
        let pairs = (p.deg() - total_real) / 2;
        (pairs, unit_circle_pairs(p)?)
    } else {
        // complex data is global; restricted queries report real roots only
        (0, 0)
    };
    Ok(RootIsolation {
        real_intervals,
        complex_pair_count,
        unit_circle_pair_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn isolation_shape_for_quartic() {
        let q = IntPoly::from_i64(&[1, -3, 3, -3, 1]);
        let iso = sturm_isolate(&q, None).unwrap();
        assert_eq!(iso.real_intervals.len(), 2);
        assert_eq!(iso.complex_pair_count, 1);
        assert_eq!(iso.unit_circle_pair_count, 1);
        assert!(iso.check_degree(4));
    }

    #[test]
    fn restricted_isolation() {
        let p = IntPoly::from_i64(&[1, -3, 1]);
        let iso = sturm_isolate(&p, Some((rat(-2, 1), rat(2, 1)))).unwrap();
        assert_eq!(iso.real_intervals.len(), 1);
        let mid = iso.real_intervals[0].mid_f64();
        assert!((mid - 0.3819660112501051).abs() < 0.5);
    }
}
