//! Structural transforms on integer polynomials: self-reciprocal tests, the
//! degree-halving trace polynomial, exact counts of modulus-1 root pairs,
//! and cyclotomic-factor detection.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::sturm::SturmChain;
use crate::exact::{sign_at, IntPoly};
use crate::{Error, Result};

/// True iff `t^deg · p(1/t) = p(t)`, i.e. the coefficient vector is a
/// palindrome. Callers pass monic `p`.
pub fn self_reciprocal_test(p: &IntPoly) -> bool {
    if p.is_zero() {
        return false;
    }
    let d = p.deg();
    (0..=d).all(|i| p.coeff(i) == p.coeff(d - i))
}

/// The unique monic `P` of degree `d/2` with `q(t) = t^{d/2} · P(t + 1/t)`,
/// for monic self-reciprocal `q` of even degree. Verified by re-expansion.
pub fn trace_poly_decompose(q: &IntPoly) -> Result<IntPoly> {
    if !q.is_monic() {
        return Err(Error::Precondition(
            "trace-polynomial decomposition requires a monic polynomial".into(),
        ));
    }
    let d = q.deg();
    if d % 2 != 0 || d == 0 {
        return Err(Error::Precondition(format!(
            "trace-polynomial decomposition requires even degree, got {d}"
        )));
    }
    if !self_reciprocal_test(q) {
        return Err(Error::Precondition(
            "trace-polynomial decomposition requires a self-reciprocal polynomial".into(),
        ));
    }
    let n = d / 2;
    // peel leading coefficients: t^{n−k}(t²+1)^k expands t^n·(t+1/t)^k
    let t2p1 = IntPoly::from_i64(&[1, 0, 1]);
    let mut rem = q.clone();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    for k in (0..=n).rev() {
        let c = rem.coeff(n + k);
        coeffs[k] = c.clone();
        if !c.is_zero() {
            let term = t2p1.pow(k as u32).shift_up(n - k).mul_scalar(&c);
            rem = rem.sub(&term);
        }
    }
    if !rem.is_zero() {
        return Err(Error::Precondition(
            "polynomial admits no trace decomposition".into(),
        ));
    }
    let p = IntPoly::new(coeffs);
    // exact re-expansion check
    debug_assert_eq!(expand_trace_poly(&p), *q);
    Ok(p)
}

/// Re-expansion `t^{deg P} · P(t + 1/t)` as an integer polynomial.
pub fn expand_trace_poly(p: &IntPoly) -> IntPoly {
    let n = p.deg();
    let t2p1 = IntPoly::from_i64(&[1, 0, 1]);
    let mut acc = IntPoly::zero();
    for k in 0..=n {
        let c = p.coeff(k);
        if !c.is_zero() {
            acc = acc.add(&t2p1.pow(k as u32).shift_up(n - k).mul_scalar(&c));
        }
    }
    acc
}

/// Exact number of conjugate complex root pairs of modulus exactly 1 of a
/// squarefree polynomial.
///
/// Roots at ±1 are real, hence never counted. The reciprocal-closed part of
/// the root set is extracted exactly with `gcd(q, reverse(q))`, which is
/// self-reciprocal after stripping ±1 factors; its trace polynomial then
/// converts modulus-1 pairs into real roots in the open interval (−2, 2),
/// counted by Sturm. Boundary cases `z₀ = ±2` are excluded by the exact
/// evaluations `q(±1) ≠ 0` performed during stripping.
pub fn unit_circle_pairs(q: &IntPoly) -> Result<usize> {
    if q.is_zero() {
        return Err(Error::Precondition("zero polynomial".into()));
    }
    let g = q.gcd(&q.derivative());
    if g.deg() > 0 {
        return Err(Error::NotSquarefree(g.to_string()));
    }
    let mut r = q.primitive();
    // strip t factors (roots at 0 are irrelevant) and ±1 roots exactly
    while r.coeff(0).is_zero() && r.deg() > 0 {
        r = r.div_exact(&IntPoly::from_i64(&[0, 1])).expect("t divides");
    }
    for root in [1i64, -1] {
        let lin = IntPoly::from_i64(&[-root, 1]);
        if r.eval_int(&BigInt::from(root)).is_zero() {
            r = r.div_exact(&lin).expect("exact linear factor");
        }
    }
    if r.deg() == 0 {
        return Ok(0);
    }
    // reciprocal-closed part: roots z of r with 1/z also a root of r
    let rc = r.gcd(&r.reverse());
    if rc.deg() == 0 {
        return Ok(0);
    }
    let rc = normalize_self_reciprocal(&rc)?;
    let p = trace_poly_decompose(&rc)?;
    // count real roots of the trace polynomial in the open interval (−2, 2)
    let two = BigRational::from_integer(BigInt::from(2));
    debug_assert_ne!(sign_at(&p, &two), 0);
    debug_assert_ne!(sign_at(&p, &(-two.clone())), 0);
    let chain = SturmChain::new(&p)?;
    Ok(chain.count_open(&-two.clone(), &two))
}

/// Make a reciprocal-closed primitive polynomial monic self-reciprocal.
/// Its root multiset is inversion-closed with no roots at 0 or ±1, so the
/// coefficient vector is a palindrome up to overall sign.
fn normalize_self_reciprocal(rc: &IntPoly) -> Result<IntPoly> {
    let mut rc = rc.primitive();
    if rc.leading().is_negative() {
        rc = rc.neg();
    }
    if !rc.is_monic() {
        // inversion-closed root set: |lead| = |const|; the primitive part of
        // such a polynomial arising as a gcd of monic-rooted inputs is monic
        // up to sign, so this is unreachable for our inputs.
        return Err(Error::Numerical(
            "reciprocal-closed factor is not monic".into(),
        ));
    }
    if !self_reciprocal_test(&rc) {
        // anti-palindrome would force a root at 1, already stripped
        return Err(Error::Numerical(
            "reciprocal-closed factor failed the palindrome check".into(),
        ));
    }
    Ok(rc)
}

/// Largest `n ≥ 1` with `p(t) = Q(t^n)`, plus the witness `Q` when `n ≥ 2`.
pub fn poly_in_tn(p: &IntPoly) -> Result<(usize, Option<IntPoly>)> {
    if p.is_zero() {
        return Err(Error::Precondition("zero polynomial".into()));
    }
    Ok(p.largest_power_substitution())
}

/// The m-th cyclotomic polynomial, by the recursive exact division
/// `Φ_m = (t^m − 1) / Π_{d|m, d<m} Φ_d`.
pub fn cyclotomic(m: usize) -> IntPoly {
    assert!(m >= 1);
    let mut table: Vec<IntPoly> = Vec::with_capacity(m);
    for k in 1..=m {
        let mut num = IntPoly::monomial(BigInt::one(), k).sub(&IntPoly::one());
        for d in 1..k {
            if k % d == 0 {
                num = num.div_exact(&table[d - 1]).expect("cyclotomic divides");
            }
        }
        table.push(num);
    }
    table.pop().unwrap()
}

pub fn euler_phi(m: usize) -> usize {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            result -= result / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// True iff some cyclotomic polynomial Φ_m with φ(m) ≤ deg(p) divides `p`
/// up to a nonconstant gcd. The enumeration of m is capped at `3·deg²`,
/// a crude over-bound for `φ(m) ≤ deg` (φ(m) ≥ √(m/2) gives m ≤ 2·deg²).
pub fn has_root_of_unity_factor(p: &IntPoly) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::Precondition("zero polynomial".into()));
    }
    let d = p.deg();
    if d == 0 {
        return Ok(false);
    }
    let cap = 3 * d * d;
    for m in 1..=cap.max(2) {
        if euler_phi(m) > d {
            continue;
        }
        let phi = cyclotomic(m);
        if p.gcd(&phi).deg() > 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    #[test]
    fn palindrome_test() {
        assert!(self_reciprocal_test(&p(&[1, -3, 3, -3, 1])));
        assert!(self_reciprocal_test(&p(&[1, -3, 1])));
        assert!(!self_reciprocal_test(&p(&[-1, -1, 1])));
    }

    #[test]
    fn trace_poly_examples() {
        // t⁴−3t³+3t²−3t+1 = t²((t+1/t)² − 3(t+1/t) + 1)
        assert_eq!(
            trace_poly_decompose(&p(&[1, -3, 3, -3, 1])).unwrap(),
            p(&[1, -3, 1])
        );
        // t²−3t+1 = t((t+1/t) − 3)
        assert_eq!(trace_poly_decompose(&p(&[1, -3, 1])).unwrap(), p(&[-3, 1]));
        // (t+1)² = t((t+1/t) + 2)
        assert_eq!(trace_poly_decompose(&p(&[1, 2, 1])).unwrap(), p(&[2, 1]));
    }

    #[test]
    fn trace_poly_round_trip() {
        for q in [p(&[1, -3, 3, -3, 1]), p(&[1, -2, 1, -2, 1]), p(&[1, 0, 0, 0, 0, 0, 1])] {
            let tr = trace_poly_decompose(&q).unwrap();
            assert_eq!(expand_trace_poly(&tr), q);
        }
    }

    #[test]
    fn trace_poly_rejections() {
        assert!(trace_poly_decompose(&p(&[1, 1, 1, 1])).is_err()); // odd degree
        assert!(trace_poly_decompose(&p(&[-1, -1, 1])).is_err()); // not palindrome
    }

    #[test]
    fn circle_pair_counts() {
        // one pair on the circle: P = z²−3z+1 has one root in (−2,2)
        assert_eq!(unit_circle_pairs(&p(&[1, -3, 3, -3, 1])).unwrap(), 1);
        // golden-ratio quadratic: both roots real, none on the circle
        assert_eq!(unit_circle_pairs(&p(&[1, -3, 1])).unwrap(), 0);
        // primitive 6th roots of unity
        assert_eq!(unit_circle_pairs(&p(&[1, -1, 1])).unwrap(), 1);
        // roots at ±1 are real, not pairs
        assert_eq!(unit_circle_pairs(&p(&[-1, 0, 1])).unwrap(), 0);
        // reducible with a circle pair hidden in one factor
        let mixed = p(&[1, -1, 1]).mul(&p(&[-2, 1]));
        assert_eq!(unit_circle_pairs(&mixed).unwrap(), 1);
        // non-squarefree input names the repeated factor
        let square = p(&[1, -1, 1]).mul(&p(&[1, -1, 1]));
        assert!(matches!(
            unit_circle_pairs(&square),
            Err(Error::NotSquarefree(_))
        ));
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic(1), p(&[-1, 1]));
        assert_eq!(cyclotomic(2), p(&[1, 1]));
        assert_eq!(cyclotomic(4), p(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), p(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), p(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn root_of_unity_detection() {
        assert!(has_root_of_unity_factor(&p(&[1, -1, 1])).unwrap()); // Φ₆
        assert!(has_root_of_unity_factor(&p(&[-1, 1])).unwrap()); // Φ₁
        assert!(!has_root_of_unity_factor(&p(&[1, -3, 3, -3, 1])).unwrap());
        assert!(!has_root_of_unity_factor(&p(&[1, -3, 1])).unwrap());
    }
}
