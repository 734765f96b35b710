//! Rectangular rational matrices. These only exist as exact intermediates
//! for kernel and membership solves; entries are kept in lowest terms by
//! `BigRational` itself.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for {rows}×{cols}, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(RatMatrix { rows, cols, entries })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn from_int_rows(rows: &[Vec<BigInt>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let entries = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), c);
                row.iter().map(|x| BigRational::from_integer(x.clone()))
            })
            .collect();
        RatMatrix {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn mul_int_vec(&self, v: &[BigInt]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * BigRational::from_integer(v[j].clone()))
                    .sum()
            })
            .collect()
    }

    /// Clear denominators row by row, producing integer rows spanning the
    /// same kernel.
    pub fn to_integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let mut lcm = BigInt::one();
                for j in 0..self.cols {
                    lcm = num_integer::lcm(lcm, self.get(i, j).denom().clone());
                }
                (0..self.cols)
                    .map(|j| {
                        let q = self.get(i, j);
                        q.numer() * (&lcm / q.denom())
                    })
                    .collect()
            })
            .collect()
    }

    /// Rank via exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let pivot = (rank..a.rows).find(|&i| !a.get(i, col).is_zero());
            let Some(p) = pivot else { continue };
            for j in 0..a.cols {
                let tmp = a.get(rank, j).clone();
                a.set(rank, j, a.get(p, j).clone());
                a.set(p, j, tmp);
            }
            let pv = a.get(rank, col).clone();
            for i in rank + 1..a.rows {
                if !a.get(i, col).is_zero() {
                    let f = a.get(i, col) / &pv;
                    for j in col..a.cols {
                        let v = a.get(i, j) - &f * a.get(rank, j);
                        a.set(i, j, v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn max_abs_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.entries
            .iter()
            .map(|e| e.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}
