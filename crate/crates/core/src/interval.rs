//! Exact rational intervals and a Krawczyk contractor for certifying real
//! quadratic factors `t² − s·t + n` of an integer polynomial.
//!
//! The interval endpoints are `BigRational`, so all interval arithmetic here
//! is outward-exact (no rounding at all); certification statements derived
//! from a contraction are genuine proofs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::IntPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RatInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_f64_pad(x: f64, pad: f64) -> Self {
        let lo = BigRational::from_float(x - pad).expect("finite");
        let hi = BigRational::from_float(x + pad).expect("finite");
        RatInterval { lo, hi }
    }

    pub fn zero() -> Self {
        Self::point(BigRational::zero())
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64().unwrap_or(f64::NAN)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Strict containment in the interior, as Krawczyk requires.
    pub fn contains_in_interior(&self, other: &Self) -> bool {
        self.lo < other.lo && other.hi < self.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo <= hi {
            Some(RatInterval { lo, hi })
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        RatInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        RatInterval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Self {
        RatInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let candidates = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = candidates.iter().min().unwrap().clone();
        let hi = candidates.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_negative() {
            RatInterval {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            RatInterval {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            RatInterval {
                lo: BigRational::zero(),
                hi: self.lo.clone().abs().max(self.hi.clone().abs()),
            }
        }
    }

    pub fn sign_definite(&self) -> Option<i32> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    /// Outward-rounded natural logarithm with an f64 error pad. Inputs must
    /// be strictly positive.
    pub fn log_outward(&self) -> (f64, f64) {
        assert!(self.lo.is_positive(), "log of non-positive interval");
        let pad = 1e-15;
        let lo = self.lo.to_f64().unwrap().ln() - pad;
        let hi = self.hi.to_f64().unwrap().ln() + pad;
        (lo, hi)
    }
}

/// Remainder pair of dividing `p` by `t² − s·t + n`, evaluated on intervals:
/// returns `(r0, r1, and the quotient coefficient intervals)` where
/// `p(t) ≡ r1·t + r0 (mod t² − s·t + n)`.
fn quad_remainder(
    p: &IntPoly,
    s: &RatInterval,
    n: &RatInterval,
) -> (RatInterval, RatInterval) {
    // synthetic division: b_k = a_{k+2} + s·b_{k+1} − n·b_{k+2}
    let d = p.deg();
    if d < 2 {
        return (
            RatInterval::point(BigRational::from_integer(p.coeff(0))),
            RatInterval::point(BigRational::from_integer(p.coeff(1))),
        );
    }
    let mut b_k2 = RatInterval::zero(); // b_{k+2}
    let mut b_k1 = RatInterval::zero(); // b_{k+1}
    for k in (0..=d - 2).rev() {
        let a = RatInterval::point(BigRational::from_integer(p.coeff(k + 2)));
        let b = a.add(&s.mul(&b_k1)).sub(&n.mul(&b_k2));
        b_k2 = b_k1;
        b_k1 = b;
    }
    // r1 = a_1 + s·b_0 − n·b_1 ; r0 = a_0 − n·b_0
    let a1 = RatInterval::point(BigRational::from_integer(p.coeff(1)));
    let a0 = RatInterval::point(BigRational::from_integer(p.coeff(0)));
    let r1 = a1.add(&s.mul(&b_k1)).sub(&n.mul(&b_k2));
    let r0 = a0.sub(&n.mul(&b_k1));
    (r0, r1)
}

/// Partial derivatives of `(r0, r1)` with respect to `(s, n)`, by
/// differentiating the synthetic-division recurrence.
fn quad_remainder_jacobian(
    p: &IntPoly,
    s: &RatInterval,
    n: &RatInterval,
) -> [[RatInterval; 2]; 2] {
    let d = p.deg();
    let zero = RatInterval::zero;
    if d < 2 {
        return [[zero(), zero()], [zero(), zero()]];
    }
    let mut b2 = zero();
    let mut b1 = zero();
    let mut bs2 = zero();
    let mut bs1 = zero();
    let mut bn2 = zero();
    let mut bn1 = zero();
    for k in (0..=d - 2).rev() {
        let a = RatInterval::point(BigRational::from_integer(p.coeff(k + 2)));
        let b = a.add(&s.mul(&b1)).sub(&n.mul(&b2));
        // ∂b/∂s = b1 + s·∂b1/∂s − n·∂b2/∂s
        let bs = b1.add(&s.mul(&bs1)).sub(&n.mul(&bs2));
        // ∂b/∂n = s·∂b1/∂n − b2 − n·∂b2/∂n
        let bn = s.mul(&bn1).sub(&b2).sub(&n.mul(&bn2));
        b2 = b1;
        b1 = b;
        bs2 = bs1;
        bs1 = bs;
        bn2 = bn1;
        bn1 = bn;
    }
    // r1 = a1 + s·b0 − n·b01: here b1 = b0, b2 = b01 (shifted)
    // ∂r1/∂s = b0 + s·bs0 − n·bs01 ; ∂r1/∂n = s·bn0 − b01 − n·bn01
    let dr1_ds = b1.add(&s.mul(&bs1)).sub(&n.mul(&bs2));
    let dr1_dn = s.mul(&bn1).sub(&b2).sub(&n.mul(&bn2));
    // r0 = a0 − n·b0: ∂r0/∂s = −n·bs0 ; ∂r0/∂n = −b0 − n·bn0
    let dr0_ds = n.mul(&bs1).neg();
    let dr0_dn = b1.neg().sub(&n.mul(&bn1));
    [[dr0_ds, dr0_dn], [dr1_ds, dr1_dn]]
}

/// A certified real quadratic factor of a polynomial: unique `(s, n)` in the
/// returned boxes with `t² − s·t + n` dividing `p` over the reals.
#[derive(Clone, Debug)]
pub struct CertifiedQuadFactor {
    pub trace: RatInterval,
    pub norm: RatInterval,
}

/// Krawczyk certification of a quadratic factor near the floating guess
/// `(s0, n0)`. Returns a contracted enclosure, refined until `norm` is
/// narrower than `target_width`, or `None` when no contraction is achieved.
pub fn certify_quad_factor(
    p: &IntPoly,
    s0: f64,
    n0: f64,
    target_width: f64,
) -> Option<CertifiedQuadFactor> {
    let mut pad = 1e-7_f64.max(1e-12 * (1.0 + s0.abs() + n0.abs()));
    for _attempt in 0..6 {
        let s = RatInterval::from_f64_pad(s0, pad);
        let n = RatInterval::from_f64_pad(n0, pad);
        if let Some((s_box, n_box)) = krawczyk_contract(p, &s, &n) {
            let mut sb = s_box;
            let mut nb = n_box;
            for _ in 0..64 {
                if nb.width_f64() < target_width && sb.width_f64() < target_width {
                    return Some(CertifiedQuadFactor {
                        trace: sb,
                        norm: nb,
                    });
                }
                match krawczyk_contract(p, &sb, &nb) {
                    Some((s2, n2)) => {
                        let shrunk = s2.width() < sb.width() || n2.width() < nb.width();
                        sb = s2;
                        nb = n2;
                        if !shrunk {
                            break;
                        }
                    }
                    None => break,
                }
            }
            if nb.width_f64() < target_width && sb.width_f64() < target_width {
                return Some(CertifiedQuadFactor {
                    trace: sb,
                    norm: nb,
                });
            }
        }
        pad *= 32.0;
    }
    None
}

/// One Krawczyk step: returns the contracted box if the operator maps the
/// box into its own interior (existence + uniqueness), otherwise `None`.
fn krawczyk_contract(
    p: &IntPoly,
    s: &RatInterval,
    n: &RatInterval,
) -> Option<(RatInterval, RatInterval)> {
    let sm = s.mid();
    let nm = n.mid();
    let (f0, f1) = quad_remainder(
        p,
        &RatInterval::point(sm.clone()),
        &RatInterval::point(nm.clone()),
    );
    // midpoint Jacobian for the preconditioner
    let jm = quad_remainder_jacobian(
        p,
        &RatInterval::point(sm.clone()),
        &RatInterval::point(nm.clone()),
    );
    let a = jm[0][0].mid();
    let b = jm[0][1].mid();
    let c = jm[1][0].mid();
    let d = jm[1][1].mid();
    let det = &a * &d - &b * &c;
    if det.is_zero() {
        return None;
    }
    // Y = inverse of midpoint Jacobian of (r0, r1) w.r.t. (s, n)
    let y00 = &d / &det;
    let y01 = -(&b / &det);
    let y10 = -(&c / &det);
    let y11 = &a / &det;

    // K = m − Y·F(m) + (I − Y·J(X))·(X − m)
    let j = quad_remainder_jacobian(p, s, n);
    let eye_minus_yj = |r: usize, cc: usize| -> RatInterval {
        // (I − Y·J)[r][cc] = δ − Σ_k Y[r][k]·J[k][cc]
        let yr = [[&y00, &y01], [&y10, &y11]];
        let mut acc = RatInterval::point(if r == cc {
            BigRational::one()
        } else {
            BigRational::zero()
        });
        for k in 0..2 {
            acc = acc.sub(&j[k][cc].scale(yr[r][k]));
        }
        acc
    };
    let ds = s.sub(&RatInterval::point(sm.clone()));
    let dn = n.sub(&RatInterval::point(nm.clone()));

    let yf0 = &y00 * &f0.mid() + &y01 * &f1.mid();
    let yf1 = &y10 * &f0.mid() + &y11 * &f1.mid();

    let k_s = RatInterval::point(&sm - &yf0)
        .add(&eye_minus_yj(0, 0).mul(&ds))
        .add(&eye_minus_yj(0, 1).mul(&dn));
    let k_n = RatInterval::point(&nm - &yf1)
        .add(&eye_minus_yj(1, 0).mul(&ds))
        .add(&eye_minus_yj(1, 1).mul(&dn));

    if s.contains_in_interior(&k_s) && n.contains_in_interior(&k_n) {
        Some((
            k_s.intersect(s).expect("contraction intersects"),
            k_n.intersect(n).expect("contraction intersects"),
        ))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_arithmetic_basics() {
        let a = RatInterval::from_f64_pad(1.0, 0.5);
        let b = RatInterval::from_f64_pad(-2.0, 0.25);
        let c = a.mul(&b);
        assert!(c.lo.to_f64().unwrap() <= -3.375 + 1e-12);
        assert!(c.hi.to_f64().unwrap() >= -1.3125 - 1e-12);
        assert_eq!(a.abs().lo.to_f64().unwrap(), 0.5);
    }

    #[test]
    fn certify_quadratic_of_known_factor() {
        // p = (t² − t + 1)(t − 2): complex pair with s = 1, n = 1
        let p = IntPoly::from_i64(&[1, -1, 1]).mul(&IntPoly::from_i64(&[-2, 1]));
        let f = certify_quad_factor(&p, 1.0 + 1e-9, 1.0 - 1e-9, 1e-13).expect("contracts");
        assert!(f.trace.contains(&BigRational::one()));
        assert!(f.norm.contains(&BigRational::one()));
        assert!(f.norm.width_f64() < 1e-13);
    }

    #[test]
    fn certify_rejects_garbage_seed() {
        let p = IntPoly::from_i64(&[1, -1, 1]).mul(&IntPoly::from_i64(&[-2, 1]));
        // seed far from any quadratic factor with complex pair
        assert!(certify_quad_factor(&p, 40.0, 7.0, 1e-13).is_none());
    }
}
