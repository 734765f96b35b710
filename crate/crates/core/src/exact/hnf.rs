//! Row-style Hermite normal form with transformation tracking, integer
//! kernels, and lattice membership certificates.
//!
//! Conventions: generators are rows. The HNF `H` is in row-echelon form with
//! positive pivots, entries above each pivot reduced into `[0, pivot)`, and
//! zero rows dropped. The tracked unimodular `U` satisfies `U · A = [H; 0]`,
//! which makes the kernel rows of `U` a saturated basis of the left kernel.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::rat_matrix::RatMatrix;

/// Basis of an integer lattice in `Z^n`, rows in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    pub ambient_dim: usize,
    /// HNF rows; empty for the zero lattice.
    pub basis: Vec<Vec<BigInt>>,
}

impl LatticeBasis {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Express `v` as an integer combination of the basis rows, or `None` if
    /// `v` is outside the lattice. Back-substitution against the echelon
    /// structure, so membership certificates are cheap.
    pub fn coordinates_of(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient_dim);
        let mut rem: Vec<BigInt> = v.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let pivot_col = row
                .iter()
                .position(|x| !x.is_zero())
                .expect("HNF rows are nonzero");
            let target = rem[pivot_col].clone();
            if target.is_zero() {
                coords.push(BigInt::zero());
                continue;
            }
            let (q, r) = target.div_rem(&row[pivot_col]);
            if !r.is_zero() {
                return None;
            }
            for (j, x) in row.iter().enumerate() {
                rem[j] -= &q * x;
            }
            coords.push(q);
        }
        if rem.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates_of(v).is_some()
    }

    /// Reconstruct the lattice vector with the given coordinates.
    pub fn vector_from(&self, coords: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coords.len(), self.basis.len());
        let mut v = vec![BigInt::zero(); self.ambient_dim];
        for (c, row) in coords.iter().zip(&self.basis) {
            for (j, x) in row.iter().enumerate() {
                v[j] += c * x;
            }
        }
        v
    }
}

/// Result of an HNF reduction: `transform · input_rows = [basis; 0]`.
pub struct HnfDecomposition {
    pub lattice: LatticeBasis,
    /// Unimodular row transform over the original generators.
    pub transform: Vec<Vec<BigInt>>,
}

/// Hermite normal form of the lattice spanned by the given vectors. Empty
/// input yields the rank-0 basis.
pub fn hnf_basis(vectors: &[Vec<BigInt>]) -> LatticeBasis {
    hnf_decompose(vectors).lattice
}

pub fn hnf_decompose(vectors: &[Vec<BigInt>]) -> HnfDecomposition {
    let m = vectors.len();
    let n = vectors.first().map_or(0, |v| v.len());
    for v in vectors {
        assert_eq!(v.len(), n, "all vectors must have the same length");
    }
    let mut a: Vec<Vec<BigInt>> = vectors.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                .collect()
        })
        .collect();

    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        // gcd all entries of this column into `row` via Euclidean row ops
        loop {
            let mut best: Option<usize> = None;
            for i in row..m {
                if !a[i][col].is_zero() {
                    best = match best {
                        None => Some(i),
                        Some(b) => {
                            if a[i][col].abs() < a[b][col].abs() {
                                Some(i)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(b) = best else { break };
            if b != row {
                a.swap(row, b);
                u.swap(row, b);
            }
            let mut done = true;
            let pivot = a[row][col].clone();
            for i in row + 1..m {
                if !a[i][col].is_zero() {
                    let q = div_round_nearest(&a[i][col], &pivot);
                    if !q.is_zero() {
                        row_sub(&mut a, i, row, &q);
                        row_sub(&mut u, i, row, &q);
                    }
                    if !a[i][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[row][col].is_zero() {
            continue;
        }
        if a[row][col].is_negative() {
            for x in a[row].iter_mut() {
                *x = -std::mem::take(x);
            }
            for x in u[row].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        // reduce the entries above the pivot into [0, pivot)
        let pivot = a[row][col].clone();
        for i in 0..row {
            let q = a[i][col].div_floor(&pivot);
            if !q.is_zero() {
                row_sub(&mut a, i, row, &q);
                row_sub(&mut u, i, row, &q);
            }
        }
        row += 1;
    }

    let basis: Vec<Vec<BigInt>> = a[..row].to_vec();
    HnfDecomposition {
        lattice: LatticeBasis {
            ambient_dim: n,
            basis,
        },
        transform: u,
    }
}

fn row_sub(a: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    let (lo, hi) = if dst < src {
        let (l, h) = a.split_at_mut(src);
        (&mut l[dst], &h[0])
    } else {
        let (l, h) = a.split_at_mut(dst);
        (&mut h[0], &l[src])
    };
    for (d, s) in lo.iter_mut().zip(hi.iter()) {
        *d -= q * s;
    }
}

fn div_round_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    // round a/b to the nearest integer so remainders shrink fast
    let (q, r) = a.div_rem(b);
    let two_r = BigInt::from(2) * r.abs();
    if two_r > b.abs() {
        if (a.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// HNF basis of the saturated integer kernel `{v ∈ Z^m : a·v = 0}`.
///
/// Rows of the rational input are cleared to integers; the kernel is read
/// off from the transform rows that map the transposed system to zero, so
/// the result is a basis of the full kernel lattice, not a finite-index
/// sublattice.
pub fn integer_kernel(a: &RatMatrix) -> LatticeBasis {
    let int_rows = a.to_integer_rows();
    let m = a.cols();
    if int_rows.iter().all(|r| r.iter().all(|x| x.is_zero())) {
        // zero map: kernel is everything
        let basis = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        return LatticeBasis {
            ambient_dim: m,
            basis,
        };
    }
    // transpose: rows of `t` are indexed by kernel coordinates
    let n = int_rows.len();
    let t: Vec<Vec<BigInt>> = (0..m)
        .map(|j| (0..n).map(|i| int_rows[i][j].clone()).collect())
        .collect();
    let dec = hnf_decompose(&t);
    let rank = dec.lattice.rank();
    let kernel_rows: Vec<Vec<BigInt>> = dec.transform[rank..].to_vec();
    hnf_basis(&kernel_rows)
}

/// Kernel of an integer matrix given as rows.
pub fn integer_kernel_of_rows(rows: &[Vec<BigInt>], cols: usize) -> LatticeBasis {
    let rat = RatMatrix::from_int_rows(rows);
    if rows.is_empty() {
        let basis = (0..cols)
            .map(|i| {
                (0..cols)
                    .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        return LatticeBasis {
            ambient_dim: cols,
            basis,
        };
    }
    integer_kernel(&rat)
}

/// Exact check `a · v = 0` for a rational matrix and integer vector.
pub fn kernel_residual_is_zero(a: &RatMatrix, v: &[BigInt]) -> bool {
    a.mul_int_vec(v).iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn vecs(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| bi(x)).collect()).collect()
    }

    #[test]
    fn hnf_standard_basis() {
        let b = hnf_basis(&vecs(&[&[1, 0], &[0, 1]]));
        assert_eq!(b.basis, vecs(&[&[1, 0], &[0, 1]]));
    }

    #[test]
    fn hnf_empty_input() {
        let b = hnf_basis(&[]);
        assert_eq!(b.rank(), 0);
    }

    #[test]
    fn hnf_index_two_sublattice() {
        // {(2,0),(0,2),(1,1)} spans the checkerboard lattice {(x,y): x+y even}.
        // Oracle: enumerate small integer combinations and compare membership.
        let gens = vecs(&[&[2, 0], &[0, 2], &[1, 1]]);
        let b = hnf_basis(&gens);
        assert_eq!(b.rank(), 2);
        for x in -4i64..=4 {
            for y in -4i64..=4 {
                let v = vec![bi(x), bi(y)];
                let in_lattice = (x + y) % 2 == 0;
                assert_eq!(b.contains(&v), in_lattice, "({x},{y})");
            }
        }
        // every input generator must be in the span, with certificates
        for g in &gens {
            let c = b.coordinates_of(g).expect("generator in lattice");
            assert_eq!(b.vector_from(&c), *g);
        }
    }

    #[test]
    fn transform_is_unimodular_action() {
        let gens = vecs(&[&[6, 9, 3], &[4, 6, 2], &[0, 3, 3]]);
        let dec = hnf_decompose(&gens);
        // U·A = [H; 0]
        let m = gens.len();
        for i in 0..m {
            let mut acc = vec![BigInt::zero(); 3];
            for k in 0..m {
                for j in 0..3 {
                    acc[j] += &dec.transform[i][k] * &gens[k][j];
                }
            }
            if i < dec.lattice.rank() {
                assert_eq!(acc, dec.lattice.basis[i]);
            } else {
                assert!(acc.iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn kernel_simple_cases() {
        // a = [1, −1]: kernel {(1,1)}
        let a = RatMatrix::from_int_rows(&vecs(&[&[1, -1]]));
        let k = integer_kernel(&a);
        assert_eq!(k.basis, vecs(&[&[1, 1]]));

        // zero 2×2: full standard basis
        let z = RatMatrix::zero(2, 2);
        let k = integer_kernel(&z);
        assert_eq!(k.basis, vecs(&[&[1, 0], &[0, 1]]));

        // [[2,−1],[0,0]]: 2x = y over Z → (1,2)
        let a = RatMatrix::from_int_rows(&vecs(&[&[2, -1], &[0, 0]]));
        let k = integer_kernel(&a);
        assert_eq!(k.basis, vecs(&[&[1, 2]]));
    }

    #[test]
    fn kernel_is_saturated() {
        // rows: [2, 2, 0] — rational kernel is spanned by (1,−1,0),(0,0,1);
        // a non-saturated method could return (2,−2,0).
        let a = RatMatrix::from_int_rows(&vecs(&[&[2, 2, 0]]));
        let k = integer_kernel(&a);
        assert!(k.contains(&[bi(1), bi(-1), bi(0)]));
        assert!(k.contains(&[bi(0), bi(0), bi(1)]));
        assert_eq!(k.rank(), 2);
    }

    #[test]
    fn kernel_vectors_annihilate_exactly() {
        let entries: Vec<BigRational> = [1, 2, 3, 2, 4, 6]
            .iter()
            .map(|&x| BigRational::new(BigInt::from(x), BigInt::from(3)))
            .collect();
        let a = RatMatrix::new(2, 3, entries).unwrap();
        let k = integer_kernel(&a);
        assert_eq!(k.rank(), 2);
        for v in &k.basis {
            assert!(kernel_residual_is_zero(&a, v));
        }
    }

    #[test]
    fn kernel_brute_force_maximality() {
        // adding any kernel vector found by brute force over a small box
        // must not increase the rank
        let a = RatMatrix::from_int_rows(&vecs(&[&[1, 2, -1], &[2, 4, -2]]));
        let k = integer_kernel(&a);
        for x in -3i64..=3 {
            for y in -3i64..=3 {
                for z in -3i64..=3 {
                    let v = vec![bi(x), bi(y), bi(z)];
                    if kernel_residual_is_zero(&a, &v) {
                        assert!(k.contains(&v), "brute-force kernel vector ({x},{y},{z}) missing");
                    }
                }
            }
        }
    }
}
