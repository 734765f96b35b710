//! Sturm sequences and certified real-root isolation.
//!
//! The chain is built with sign-faithful pseudo-remainders over Z (only
//! positive constants ever multiply a polynomial), so sign variations at
//! rational points are exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact::{sign_at, IntPoly};
use crate::{Error, Result};

/// Sign-variation chain for a squarefree polynomial.
#[derive(Debug)]
pub struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    /// Requires squarefree input; callers reduce first.
    pub fn new(p: &IntPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::Precondition("Sturm chain of zero polynomial".into()));
        }
        let g = p.gcd(&p.derivative());
        if g.deg() > 0 {
            return Err(Error::NotSquarefree(g.to_string()));
        }
        let mut chain = vec![p.primitive()];
        if p.deg() >= 1 {
            chain.push(p.derivative().primitive());
            loop {
                let k = chain.len();
                let r = signed_neg_rem(&chain[k - 2], &chain[k - 1]);
                if r.is_zero() {
                    break;
                }
                chain.push(r);
            }
        }
        Ok(SturmChain { chain })
    }

    pub fn poly(&self) -> &IntPoly {
        &self.chain[0]
    }

    fn variations_at(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last = 0;
        for p in &self.chain {
            let s = sign_at(p, x);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        let mut count = 0;
        let mut last = 0;
        for p in &self.chain {
            if p.is_zero() {
                continue;
            }
            let mut s = if p.leading().is_positive() { 1 } else { -1 };
            if !positive && p.deg() % 2 == 1 {
                s = -s;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of real roots in the open interval `(a, b)`. Endpoints must
    /// not be roots.
    pub fn count_open(&self, a: &BigRational, b: &BigRational) -> usize {
        assert!(a < b);
        debug_assert_ne!(sign_at(self.poly(), a), 0, "left endpoint is a root");
        debug_assert_ne!(sign_at(self.poly(), b), 0, "right endpoint is a root");
        self.variations_at(a) - self.variations_at(b)
    }

    /// Number of real roots on the whole line.
    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }
}

/// `−rem(a, b)` up to a positive constant, the Sturm chain step.
fn signed_neg_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut rem = a.clone();
    let dd = b.deg();
    let dl = b.leading();
    while !rem.is_zero() && rem.deg() >= dd {
        let k = rem.deg() - dd;
        let lead = rem.leading();
        rem = rem
            .mul_scalar(&(&dl * &dl))
            .sub(&b.shift_up(k).mul_scalar(&(&dl * &lead)));
    }
    if rem.is_zero() {
        rem
    } else {
        rem.neg().primitive_keep_sign()
    }
}

impl IntPoly {
    /// Divide by the positive content, keeping the sign of evaluations.
    fn primitive_keep_sign(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let g = self.content();
        IntPoly::new(self.coeffs().iter().map(|c| c / &g).collect())
    }
}

/// An interval certified to contain exactly one real root of a squarefree
/// polynomial, with non-root rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn mid_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.mid().to_f64().unwrap_or(f64::NAN)
    }
}

/// Cauchy root bound: all real roots lie in `(−b, b)`.
pub fn cauchy_bound(p: &IntPoly) -> BigRational {
    let d = p.deg();
    let lead = p.leading().abs();
    let mut max = BigInt::zero();
    for i in 0..d {
        let a = p.coeff(i).abs();
        if a > max {
            max = a;
        }
    }
    BigRational::one() + BigRational::new(max, lead)
}

/// Isolate all real roots of squarefree `p` in the open interval `(a, b)`
/// (whole line when `range` is `None`). Returned intervals are pairwise
/// disjoint, each containing exactly one root, endpoints non-root.
pub fn isolate_real_roots(
    p: &IntPoly,
    range: Option<(BigRational, BigRational)>,
) -> Result<Vec<RootInterval>> {
    let chain = SturmChain::new(p)?;
    let (mut a, mut b) = match range {
        Some((a, b)) => {
            if a >= b {
                return Err(Error::Precondition("empty isolation interval".into()));
            }
            (a, b)
        }
        None => {
            let m = cauchy_bound(p);
            (-m.clone(), m)
        }
    };
    // nudge endpoints off roots (only happens for user-supplied ranges)
    let tiny = BigRational::new(BigInt::one(), BigInt::from(1_000_000_007u64));
    let mut guard = 0;
    while sign_at(p, &a) == 0 {
        a -= &tiny;
        guard += 1;
        assert!(guard < 100);
    }
    while sign_at(p, &b) == 0 {
        b += &tiny;
        guard += 1;
        assert!(guard < 100);
    }
    let total = chain.count_open(&a, &b);
    let mut out = Vec::with_capacity(total);
    let mut stack = vec![(a, b, total)];
    while let Some((lo, hi, count)) = stack.pop() {
        match count {
            0 => {}
            1 => out.push(RootInterval { lo, hi }),
            _ => {
                let mut mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
                // if the midpoint is a root, shift it slightly; the shifted
                // point is checked exactly again
                let mut offset = BigRational::new(BigInt::one(), BigInt::from(3u8));
                let width = &hi - &lo;
                while sign_at(p, &mid) == 0 {
                    mid = &lo + &width * &offset;
                    offset = &offset / BigRational::from_integer(BigInt::from(2));
                }
                let left = chain.count_open(&lo, &mid);
                stack.push((lo, mid.clone(), left));
                stack.push((mid, hi, count - left));
            }
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    Ok(out)
}

/// Bisect a root interval until it is narrower than `target`, keeping the
/// exact one-root certificate.
pub fn refine_interval(p: &IntPoly, iv: &RootInterval, target: &BigRational) -> RootInterval {
    let mut lo = iv.lo.clone();
    let mut hi = iv.hi.clone();
    let sign_lo = sign_at(p, &lo);
    debug_assert_ne!(sign_lo, 0);
    let mut s_lo = sign_lo;
    while &hi - &lo > *target {
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        let s_mid = sign_at(p, &mid);
        if s_mid == 0 {
            // exact rational root: shrink symmetrically around it
            let q = (&hi - &lo) / BigRational::from_integer(BigInt::from(4));
            lo = &mid - &q;
            hi = &mid + &q;
            if sign_at(p, &lo) == 0 || sign_at(p, &hi) == 0 {
                // fall back to slight asymmetry
                let q2 = &q / BigRational::from_integer(BigInt::from(3));
                lo = &mid - &q2;
                hi = &mid + &q;
            }
            if &hi - &lo <= *target {
                break;
            }
            s_lo = sign_at(p, &lo);
            continue;
        }
        if s_mid == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let _ = s_lo;
    RootInterval { lo, hi }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn counts_on_intervals() {
        // z² − 3z + 1, roots (3±√5)/2 ≈ 0.382, 2.618
        let p = IntPoly::from_i64(&[1, -3, 1]);
        let c = SturmChain::new(&p).unwrap();
        assert_eq!(c.count_open(&rat(-2, 1), &rat(2, 1)), 1);
        assert_eq!(c.count_all(), 2);

        // z² − z − 1, roots (1±√5)/2 ≈ 1.618, −0.618: both in (−2,2)
        let p = IntPoly::from_i64(&[-1, -1, 1]);
        let c = SturmChain::new(&p).unwrap();
        assert_eq!(c.count_open(&rat(-2, 1), &rat(2, 1)), 2);

        // t² + 1: no real roots
        let p = IntPoly::from_i64(&[1, 0, 1]);
        let c = SturmChain::new(&p).unwrap();
        assert_eq!(c.count_all(), 0);
    }

    #[test]
    fn non_squarefree_rejected_with_factor() {
        let p = IntPoly::from_i64(&[-1, 1]); // t − 1
        let sq = p.mul(&p).mul(&IntPoly::from_i64(&[3, 1]));
        match SturmChain::new(&sq) {
            Err(Error::NotSquarefree(f)) => assert!(f.contains("t^1")),
            other => panic!("expected NotSquarefree, got {other:?}"),
        }
    }

    #[test]
    fn isolates_golden_quadratic() {
        let p = IntPoly::from_i64(&[1, -3, 1]);
        let roots = isolate_real_roots(&p, None).unwrap();
        assert_eq!(roots.len(), 2);
        let target = rat(1, 1_000_000);
        let r0 = refine_interval(&p, &roots[0], &target);
        let r1 = refine_interval(&p, &roots[1], &target);
        // roots (3−√5)/2 = 0.381966…, (3+√5)/2 = 2.618033…
        assert!((r0.mid_f64() - 0.3819660112501051).abs() < 1e-5);
        assert!((r1.mid_f64() - 2.618033988749895).abs() < 1e-5);
    }

    #[test]
    fn isolates_exact_rational_roots() {
        // (t − 3)(t − 1/2 scaled): 2t² − 7t + 3 has roots 3 and 1/2
        let p = IntPoly::from_i64(&[3, -7, 2]);
        let roots = isolate_real_roots(&p, None).unwrap();
        assert_eq!(roots.len(), 2);
        let target = rat(1, 1_000_000_000);
        let r = refine_interval(&p, &roots[1], &target);
        assert!((r.mid_f64() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn partition_counts_are_additive() {
        // counts over a partition sum to the count over the union
        let p = IntPoly::from_i64(&[1, -3, 1]).mul(&IntPoly::from_i64(&[-1, -1, 1]));
        let c = SturmChain::new(&p).unwrap();
        let pts = [rat(-3, 1), rat(-1, 2), rat(1, 3), rat(5, 4), rat(3, 1)];
        let mut total = 0;
        for w in pts.windows(2) {
            total += c.count_open(&w[0], &w[1]);
        }
        assert_eq!(total, c.count_open(&pts[0], &pts[4]));
        assert_eq!(total, 4);
    }
}
