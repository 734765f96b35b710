//! Dense univariate polynomials with arbitrary-precision integer
//! coefficients, plus the rational-coefficient helpers the root-isolation
//! code needs. Coefficient index equals degree; the vector carries no
//! trailing zeros.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Integer polynomial, `coeffs[i]` is the coefficient of `t^i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPoly {
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c · t^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        IntPoly { coeffs }
    }

    /// `t - c`, the monic linear polynomial with root `c`.
    pub fn linear_root(c: i64) -> Self {
        Self::new(vec![BigInt::from(-c), BigInt::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Degree treating the zero polynomial as degree 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map_or(false, |c| c.is_one())
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn mul_scalar(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by `t^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rat(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + bigint_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// gcd of all coefficients, always non-negative.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Content removed and leading coefficient made positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// `p(-t)`.
    pub fn substitute_neg(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
                .collect(),
        )
    }

    /// The reversal `t^deg · p(1/t)`.
    pub fn reverse(&self) -> Self {
        let mut coeffs: Vec<BigInt> = self.coeffs.iter().rev().cloned().collect();
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    /// Composition `self(other(t))`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(other).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Exact division; `None` if the remainder is nonzero or division leaves
    /// the integers.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let dd = divisor.deg();
        let dl = divisor.leading();
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.deg() < dd {
            return None;
        }
        let qd = self.deg() - dd;
        let mut quot = vec![BigInt::zero(); qd + 1];
        for k in (0..=qd).rev() {
            let lead = rem[k + dd].clone();
            if lead.is_zero() {
                continue;
            }
            let (q, r) = lead.div_rem(&dl);
            if !r.is_zero() {
                return None;
            }
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &q * c;
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(quot))
    }

    /// Pseudo-remainder scaled so only positive constants multiply `self`;
    /// sign-faithful, as needed by Sturm chains.
    fn signed_pseudo_rem(&self, divisor: &Self) -> Self {
        debug_assert!(!divisor.is_zero());
        let mut rem = self.clone();
        let dd = divisor.deg();
        let dl = divisor.leading();
        while !rem.is_zero() && rem.deg() >= dd {
            let k = rem.deg() - dd;
            let lead = rem.leading();
            // rem ← dl² · rem − dl · lead · t^k · divisor keeps the sign of
            // evaluations since dl² > 0, and cancels the leading term.
            rem = rem
                .mul_scalar(&(&dl * &dl))
                .sub(&divisor.shift_up(k).mul_scalar(&(&dl * &lead)));
            debug_assert!(rem.is_zero() || rem.deg() < k + dd);
        }
        rem
    }

    /// Primitive polynomial gcd with positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.deg() < b.deg() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.signed_pseudo_rem(&b).primitive();
            a = b;
            b = r;
        }
        a.primitive()
    }

    /// `self / gcd(self, self')`, primitive.
    pub fn squarefree_part(&self) -> Self {
        if self.is_zero() || self.deg() == 0 {
            return self.primitive();
        }
        let g = self.gcd(&self.derivative());
        if g.deg() == 0 {
            return self.primitive();
        }
        // Gauss: the primitive gcd divides the primitive part over Z.
        self.primitive().div_exact(&g).expect("gcd divides")
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg() == 0
    }

    /// Yun's algorithm: returns `[(g_1, 1), (g_2, 2), ...]` with
    /// `self = c · Π g_i^i`, each `g_i` squarefree and pairwise coprime.
    /// Factors of multiplicity zero are omitted.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPoly, usize)> {
        let p = self.primitive();
        if p.deg() == 0 {
            return vec![];
        }
        let dp = p.derivative();
        let g = p.gcd(&dp);
        if g.deg() == 0 {
            return vec![(p, 1)];
        }
        let mut out = Vec::new();
        let mut w = p.div_exact(&g).expect("gcd divides p");
        let mut y = dp.div_exact(&g).expect("gcd divides p'");
        let mut i = 1;
        loop {
            let z = y.sub(&w.derivative());
            if z.is_zero() {
                if w.deg() > 0 {
                    out.push((w.primitive(), i));
                }
                break;
            }
            let gi = w.gcd(&z);
            if gi.deg() > 0 {
                out.push((gi.primitive(), i));
            }
            w = w.div_exact(&gi).expect("gcd divides");
            y = z.div_exact(&gi).expect("gcd divides");
            i += 1;
        }
        out
    }

    /// Largest `n ≥ 1` with `self(t) = Q(t^n)` together with the witness `Q`
    /// when `n ≥ 2`. The zero polynomial is rejected by callers.
    pub fn largest_power_substitution(&self) -> (usize, Option<IntPoly>) {
        if self.deg() == 0 {
            return (1, None);
        }
        let mut n: usize = 0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                n = n.gcd(&i);
                if n == 1 {
                    return (1, None);
                }
            }
        }
        if n <= 1 {
            return (1.max(n), None);
        }
        let q = IntPoly::new(
            self.coeffs
                .iter()
                .step_by(n)
                .cloned()
                .collect::<Vec<_>>(),
        );
        (n, Some(q))
    }

    /// Parse from a JSON array of coefficients (numbers or decimal strings),
    /// index = degree.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("polynomial must be a JSON array of coefficients".into()))?;
        let mut coeffs = Vec::with_capacity(arr.len());
        for (i, c) in arr.iter().enumerate() {
            coeffs.push(parse_bigint(c).map_err(|e| {
                Error::Parse(format!("coefficient {i}: {e}"))
            })?);
        }
        Ok(Self::new(coeffs))
    }

    /// Serialize as a JSON array; coefficients that fit in 53 bits are
    /// numbers, larger ones decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.coeffs.iter().map(bigint_to_json).collect())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                first = false;
                if i == 0 {
                    write!(f, "{c}")?;
                } else if c.is_one() {
                    write!(f, "t^{i}")?;
                } else if (-c).is_one() {
                    write!(f, "-t^{i}")?;
                } else {
                    write!(f, "{c}*t^{i}")?;
                }
            } else {
                let (sign, mag) = if c.is_negative() {
                    ("-", -c)
                } else {
                    ("+", c.clone())
                };
                if i == 0 {
                    write!(f, " {sign} {mag}")?;
                } else if mag.is_one() {
                    write!(f, " {sign} t^{i}")?;
                } else {
                    write!(f, " {sign} {mag}*t^{i}")?;
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn parse_bigint(v: &serde_json::Value) -> std::result::Result<BigInt, String> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else {
                Err(format!("non-integer numeric entry {n}"))
            }
        }
        serde_json::Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|e| format!("bad integer string {s:?}: {e}")),
        other => Err(format!("expected integer, got {other}")),
    }
}

pub(crate) fn bigint_to_json(c: &BigInt) -> serde_json::Value {
    use num_traits::ToPrimitive;
    if let Some(i) = c.to_i64() {
        if i.abs() < (1_i64 << 53) {
            return serde_json::Value::from(i);
        }
    }
    serde_json::Value::String(c.to_string())
}

pub(crate) fn bigint_to_f64(c: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational evaluation helpers used by root isolation: sign of `p` at a
/// rational point, avoiding rational arithmetic where possible by clearing
/// the denominator.
pub fn sign_at(p: &IntPoly, x: &BigRational) -> i32 {
    // p(a/b) · b^deg = Σ c_i a^i b^(deg−i), an integer.
    if p.is_zero() {
        return 0;
    }
    let a = x.numer();
    let b = x.denom();
    let d = p.deg();
    let mut apow = BigInt::one();
    let mut terms: Vec<BigInt> = Vec::with_capacity(d + 1);
    for i in 0..=d {
        terms.push(p.coeff(i) * &apow);
        if i < d {
            apow *= a;
        }
    }
    let mut bpow = BigInt::one();
    let mut total = BigInt::zero();
    for i in (0..=d).rev() {
        total += std::mem::take(&mut terms[i]) * &bpow;
        if i > 0 {
            bpow *= b;
        }
    }
    match total.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    #[test]
    fn mul_and_eval() {
        // (t-1)(t+1) = t² − 1
        let a = p(&[-1, 1]);
        let b = p(&[1, 1]);
        assert_eq!(a.mul(&b), p(&[-1, 0, 1]));
        assert_eq!(a.eval_int(&BigInt::from(5)), BigInt::from(4));
    }

    #[test]
    fn exact_division() {
        let prod = p(&[-1, 0, 1]);
        assert_eq!(prod.div_exact(&p(&[-1, 1])), Some(p(&[1, 1])));
        assert_eq!(prod.div_exact(&p(&[1, 2])), None);
    }

    #[test]
    fn gcd_of_products() {
        let a = p(&[-1, 1]).mul(&p(&[2, 1])); // (t−1)(t+2)
        let b = p(&[-1, 1]).mul(&p(&[-3, 1])); // (t−1)(t−3)
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
    }

    #[test]
    fn squarefree_decomposition_multiplicities() {
        // (t−1)²(t+2)
        let q = p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[2, 1]));
        let dec = q.squarefree_decomposition();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[0], (p(&[2, 1]), 1));
        assert_eq!(dec[1], (p(&[-1, 1]), 2));
    }

    #[test]
    fn power_substitution() {
        assert_eq!(p(&[1, 0, 3, 0, 1]).largest_power_substitution().0, 2);
        assert_eq!(
            p(&[1, 0, 3, 0, 1]).largest_power_substitution().1,
            Some(p(&[1, 3, 1]))
        );
        assert_eq!(p(&[-2, 0, 0, 0, 0, 0, 1]).largest_power_substitution().0, 6);
        assert_eq!(p(&[1, -3, 3, -3, 1]).largest_power_substitution().0, 1);
    }

    #[test]
    fn sign_at_rational_points() {
        let q = p(&[-2, 0, 1]); // t² − 2
        let x = BigRational::new(BigInt::from(3), BigInt::from(2));
        assert_eq!(sign_at(&q, &x), 1);
        let y = BigRational::new(BigInt::from(7), BigInt::from(5));
        assert_eq!(sign_at(&q, &y), -1);
    }
}
