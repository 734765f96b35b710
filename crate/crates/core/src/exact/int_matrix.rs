//! Square integer matrices with arbitrary-precision entries.
//!
//! Determinants use fraction-free Bareiss elimination; characteristic
//! polynomials use the Faddeev–LeVerrier recurrence, whose divisions are
//! exact over the integers. Both are independent routes and the test suite
//! cross-checks them via `det(m) = (−1)^d · p_m(0)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{bigint_to_json, parse_bigint, IntPoly};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    // row-major, length dim²
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(dim: usize, entries: Vec<BigInt>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("matrix dimension must be ≥ 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {dim}×{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(IntMatrix { dim, entries })
    }

    pub fn from_rows_i64(rows: &[&[i64]]) -> Self {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "rows must form a square matrix");
            entries.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn zero(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    /// Companion matrix of a monic polynomial: last column carries the
    /// negated low coefficients, subdiagonal ones.
    pub fn companion(p: &IntPoly) -> Result<Self> {
        if !p.is_monic() {
            return Err(Error::Precondition(
                "companion matrix requires a monic polynomial".into(),
            ));
        }
        let d = p.deg();
        if d == 0 {
            return Err(Error::Precondition(
                "companion matrix requires degree ≥ 1".into(),
            ));
        }
        let mut m = Self::zero(d);
        for i in 1..d {
            m.entries[i * d + (i - 1)] = BigInt::one();
        }
        for i in 0..d {
            m.entries[i * d + (d - 1)] = -p.coeff(i);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.dim + c] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        IntMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        IntMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        IntMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut entries = vec![BigInt::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = &self.entries[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * &other.entries[k * d + j];
                }
            }
        }
        IntMatrix { dim: d, entries }
    }

    pub fn mul_scalar(&self, c: &BigInt) -> Self {
        IntMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![BigInt::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j].clone();
            }
        }
        IntMatrix { dim: d, entries }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.dim);
        let mut base = self.clone();
        let mut e = e;
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

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.dim);
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.mul(other) == other.mul(self)
    }

    /// Exact determinant via fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        let d = self.dim;
        let mut a: Vec<Vec<BigInt>> = (0..d)
            .map(|i| self.entries[i * d..(i + 1) * d].to_vec())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..d - 1 {
            if a[k][k].is_zero() {
                let swap = (k + 1..d).find(|&i| !a[i][k].is_zero());
                match swap {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * a[d - 1][d - 1].clone()
    }

    /// Characteristic polynomial `det(tI − m)` as a monic integer polynomial,
    /// via the Faddeev–LeVerrier recurrence (all divisions exact).
    pub fn char_poly(&self) -> IntPoly {
        let d = self.dim;
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = BigInt::one();
        let mut m = Self::zero(d); // M_0 = 0 so that M_1 = A
        for k in 1..=d {
            // M_k = A·(M_{k−1} + c_{d−k+1}·I)
            let mut shifted = m.clone();
            for i in 0..d {
                let v = shifted.get(i, i) + &coeffs[d - k + 1];
                shifted.set(i, i, v);
            }
            m = self.mul(&shifted);
            let t = m.trace();
            debug_assert!((&t % BigInt::from(k as i64)).is_zero());
            coeffs[d - k] = -t / BigInt::from(k as i64);
        }
        IntPoly::new(coeffs)
    }

    /// Exact inverse, defined when `|det| = 1`. Solved by rational Gaussian
    /// elimination and verified to be integral.
    pub fn inverse_unimodular(&self) -> Result<Self> {
        let det = self.det();
        if !det.clone().abs().is_one() {
            return Err(Error::NotAutomorphism(det.to_string()));
        }
        let d = self.dim;
        // augmented rational system [A | I]
        let mut a: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                (0..2 * d)
                    .map(|j| {
                        if j < d {
                            BigRational::from_integer(self.get(i, j).clone())
                        } else if j - d == i {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for k in 0..d {
            let pivot = (k..d)
                .find(|&i| !a[i][k].is_zero())
                .expect("unimodular matrix is invertible");
            a.swap(k, pivot);
            let pv = a[k][k].clone();
            for j in k..2 * d {
                a[k][j] = &a[k][j] / &pv;
            }
            for i in 0..d {
                if i != k && !a[i][k].is_zero() {
                    let f = a[i][k].clone();
                    for j in k..2 * d {
                        let sub = &f * &a[k][j];
                        a[i][j] = &a[i][j] - &sub;
                    }
                }
            }
        }
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let q = &a[i][d + j];
                if !q.is_integer() {
                    return Err(Error::Numerical(
                        "inverse of unimodular matrix came out non-integral".into(),
                    ));
                }
                entries.push(q.to_integer());
            }
        }
        Ok(IntMatrix { dim: d, entries })
    }

    /// Entries as f64; exact only while entries fit in 53 bits.
    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        let d = self.dim;
        nalgebra::DMatrix::from_fn(d, d, |i, j| {
            self.get(i, j).to_f64().unwrap_or(f64::NAN)
        })
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries
            .iter()
            .map(|e| e.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Parse the matrix literal format: JSON array of rows of integers
    /// (decimal strings accepted for big values).
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::Parse("matrix must be a JSON array of rows".into()))?;
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Parse("matrix must have at least one row".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            let cols = row.as_array().ok_or_else(|| {
                Error::Parse(format!("row {i} must be a JSON array"))
            })?;
            if cols.len() != dim {
                return Err(Error::Parse(format!(
                    "row {i} has {} entries, expected {dim} (matrix must be square)",
                    cols.len()
                )));
            }
            for (j, e) in cols.iter().enumerate() {
                entries.push(
                    parse_bigint(e)
                        .map_err(|msg| Error::Parse(format!("entry ({i},{j}): {msg}")))?,
                );
            }
        }
        IntMatrix::new(dim, entries)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let d = self.dim;
        serde_json::Value::Array(
            (0..d)
                .map(|i| {
                    serde_json::Value::Array(
                        (0..d).map(|j| bigint_to_json(self.get(i, j))).collect(),
                    )
                })
                .collect(),
        )
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim;
        for i in 0..d {
            write!(f, "[")?;
            for j in 0..d {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cat_map() -> IntMatrix {
        IntMatrix::from_rows_i64(&[&[2, 1], &[1, 1]])
    }

    /// Laplace-expansion determinant, an independent oracle for small d.
    fn det_laplace(m: &IntMatrix) -> BigInt {
        let d = m.dim();
        if d == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..d {
            let c = m.get(0, j);
            if c.is_zero() {
                continue;
            }
            let mut sub = Vec::with_capacity((d - 1) * (d - 1));
            for i in 1..d {
                for k in 0..d {
                    if k != j {
                        sub.push(m.get(i, k).clone());
                    }
                }
            }
            let minor = IntMatrix::new(d - 1, sub).unwrap();
            let term = c * det_laplace(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn det_matches_laplace_oracle() {
        let m = IntMatrix::from_rows_i64(&[&[3, -1, 2, 0], &[1, 4, -2, 5], &[0, 2, 2, -3], &[7, 1, 0, 1]]);
        assert_eq!(m.det(), det_laplace(&m));
        assert_eq!(cat_map().det(), BigInt::one());
        assert_eq!(IntMatrix::identity(4).det(), BigInt::one());
    }

    #[test]
    fn char_poly_of_companion_is_the_seed() {
        let q = IntPoly::from_i64(&[1, -3, 3, -3, 1]);
        let c = IntMatrix::companion(&q).unwrap();
        assert_eq!(c.char_poly(), q);
    }

    #[test]
    fn char_poly_examples() {
        // cat map: t² − 3t + 1, derived by expanding det(tI − m) by hand
        assert_eq!(cat_map().char_poly(), IntPoly::from_i64(&[1, -3, 1]));
        // 2×2 identity: (t−1)² = t² − 2t + 1
        assert_eq!(
            IntMatrix::identity(2).char_poly(),
            IntPoly::from_i64(&[1, -2, 1])
        );
    }

    #[test]
    fn det_char_poly_consistency() {
        // det(m) = (−1)^d · p_m(0)
        for m in [
            cat_map(),
            IntMatrix::identity(4),
            IntMatrix::from_rows_i64(&[&[0, 1, 0], &[0, 0, 1], &[1, -4, 2]]),
        ] {
            let d = m.dim();
            let p0 = m.char_poly().coeff(0);
            let expected = if d % 2 == 0 { p0.clone() } else { -p0.clone() };
            assert_eq!(m.det(), expected);
        }
    }

    #[test]
    fn unimodular_inverse() {
        let m = cat_map();
        let inv = m.inverse_unimodular().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert_eq!(inv, IntMatrix::from_rows_i64(&[&[1, -1], &[-1, 2]]));
    }

    #[test]
    fn json_round_trip() {
        let m = cat_map();
        let j = m.to_json();
        assert_eq!(IntMatrix::from_json(&j).unwrap(), m);
        let with_strings: serde_json::Value =
            serde_json::from_str(r#"[["2","1"],[1,1]]"#).unwrap();
        assert_eq!(IntMatrix::from_json(&with_strings).unwrap(), m);
    }
}
