//! Fixed points of perturbed automorphisms and the permutation action of
//! commuting maps on them.
//!
//! The algebraic count is `|det(L − I)|`, exact. The numeric enumeration
//! solves `F(x) − x = m` by Newton from the linear seed `(L−I)⁻¹ m` for
//! every integer `m` reachable from the unit cube, then deduplicates on the
//! torus. The two counts must agree.

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, ToPrimitive, Zero};

use super::{reduce_mod_1, torus_distance, TorusMap};
use crate::exact::IntMatrix;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct FixedPointReport {
    /// `|det(L − I)|`, exact.
    pub algebraic_count: u64,
    /// Deduplicated fixed points on the torus.
    pub points: Vec<DVector<f64>>,
    /// Max residual `‖F(x) − x − m‖` over the returned points.
    pub max_residual: f64,
}

/// Enumerate the fixed points of `f`; the numeric count must equal the
/// algebraic count `|det(L − I)|`.
pub fn fixed_point_count(f: &TorusMap) -> Result<FixedPointReport> {
    let d = f.dim();
    let l = f.linear();
    let lmi = l.sub(&IntMatrix::identity(d));
    let det = lmi.det();
    if det.is_zero() {
        return Err(Error::Precondition(
            "L − I is singular (the linear part is not ergodic)".into(),
        ));
    }
    let algebraic_count = det
        .abs()
        .to_u64()
        .ok_or_else(|| Error::Numerical("fixed point count exceeds u64".into()))?;
    let lmi_f = lmi.to_f64();
    let lmi_inv = lmi_f
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("(L−I) inversion failed numerically".into()))?;

    // integer offsets m = F(x) − x over the unit cube: bound each
    // coordinate by the row sums of (L − I) plus the perturbation
    let margin = (f.epsilon() * f.sup_v()).ceil() as i64 + 1;
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    for i in 0..d {
        let mut neg = 0.0;
        let mut pos = 0.0;
        for j in 0..d {
            let e = lmi_f[(i, j)];
            if e < 0.0 {
                neg += e;
            } else {
                pos += e;
            }
        }
        lo[i] = neg.floor() as i64 - margin;
        hi[i] = pos.ceil() as i64 + margin;
    }

    let mut points: Vec<DVector<f64>> = Vec::new();
    let mut max_residual = 0.0f64;
    let mut m = lo.clone();
    loop {
        let mv = DVector::from_fn(d, |i, _| m[i] as f64);
        let x = solve_translated_fixed_point(f, &lmi_inv, &mv)?;
        let r = (f.lift(&x) - &x - &mv).norm();
        let xt = reduce_mod_1(&x);
        // keep only solutions whose cube representative generated this m
        if x.iter().all(|&c| (-1e-9..1.0 + 1e-9).contains(&c)) {
            max_residual = max_residual.max(r);
            if !points.iter().any(|p| torus_distance(p, &xt) < 1e-9) {
                points.push(xt);
            }
        }
        // odometer over the m box
        let mut i = 0;
        loop {
            if i == d {
                break;
            }
            m[i] += 1;
            if m[i] <= hi[i] {
                break;
            }
            m[i] = lo[i];
            i += 1;
        }
        if i == d {
            break;
        }
    }
    if points.len() as u64 != algebraic_count {
        return Err(Error::Numerical(format!(
            "numeric fixed-point count {} differs from |det(L−I)| = {}",
            points.len(),
            algebraic_count
        )));
    }
    Ok(FixedPointReport {
        algebraic_count,
        points,
        max_residual,
    })
}

/// Newton solve of `F(x) − x = m` seeded at `(L−I)⁻¹ m`.
fn solve_translated_fixed_point(
    f: &TorusMap,
    lmi_inv: &DMatrix<f64>,
    m: &DVector<f64>,
) -> Result<DVector<f64>> {
    let d = f.dim();
    let mut x = lmi_inv * m;
    if f.is_linear() {
        return Ok(x);
    }
    for _ in 0..80 {
        let g = f.lift(&x) - &x - m;
        if g.norm() < 1e-13 {
            return Ok(x);
        }
        let mut j = f.jacobian(&x);
        for i in 0..d {
            j[(i, i)] -= 1.0;
        }
        let step = j.lu().solve(&g).ok_or_else(|| {
            Error::Numerical(format!("singular Newton system at seed m = {m:?}"))
        })?;
        x -= &step;
        if step.norm() < 1e-14 {
            return Ok(x);
        }
    }
    let g = (f.lift(&x) - &x - m).norm();
    if g < 1e-11 {
        Ok(x)
    } else {
        Err(Error::Numerical(format!(
            "Newton failed to converge for offset {m:?} (residual {g:.3e})"
        )))
    }
}

/// Permutation induced by `g` on the fixed points of `f`. Every image must
/// land within `1e−8` torus distance of a fixed point, otherwise `g` does
/// not preserve `Fix(f)` and the commutation is broken.
pub fn fixed_point_permutation(
    _f: &TorusMap,
    g: &TorusMap,
    fixed: &FixedPointReport,
) -> Result<Vec<usize>> {
    let mut sigma = Vec::with_capacity(fixed.points.len());
    for (j, p) in fixed.points.iter().enumerate() {
        let image = g.eval_torus(p);
        let target = fixed
            .points
            .iter()
            .position(|q| torus_distance(q, &image) < 1e-8);
        match target {
            Some(t) => sigma.push(t),
            None => {
                return Err(Error::Numerical(format!(
                    "image of fixed point {j} is not a fixed point; \
                     the maps do not commute on Fix(f)"
                )))
            }
        }
    }
    // must be a bijection
    let mut seen = vec![false; sigma.len()];
    for &t in &sigma {
        if seen[t] {
            return Err(Error::Numerical(
                "fixed-point images collide; permutation ill-defined".into(),
            ));
        }
        seen[t] = true;
    }
    Ok(sigma)
}

/// Compose permutations: `(σ ∘ τ)(j) = σ(τ(j))`.
pub fn compose_permutation(sigma: &[usize], tau: &[usize]) -> Vec<usize> {
    tau.iter().map(|&j| sigma[j]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::FourierMode;
    use crate::exact::IntPoly;

    fn cat_map() -> IntMatrix {
        IntMatrix::from_rows_i64(&[&[2, 1], &[1, 1]])
    }

    fn worked_example_d4() -> IntMatrix {
        IntMatrix::companion(&IntPoly::from_i64(&[1, -3, 3, -3, 1])).unwrap()
    }

    #[test]
    fn cat_map_single_fixed_point() {
        let f = TorusMap::new(cat_map(), vec![], 0.0).unwrap();
        let rep = fixed_point_count(&f).unwrap();
        assert_eq!(rep.algebraic_count, 1);
        assert_eq!(rep.points.len(), 1);
        assert!(rep.points[0].norm() < 1e-12);
    }

    #[test]
    fn worked_example_single_fixed_point() {
        // |q(1)| = |1−3+3−3+1| = 1
        let f = TorusMap::new(worked_example_d4(), vec![], 0.0).unwrap();
        let rep = fixed_point_count(&f).unwrap();
        assert_eq!(rep.algebraic_count, 1);
    }

    #[test]
    fn cat_map_squared_five_fixed_points() {
        let l2 = cat_map().mul(&cat_map());
        let f = TorusMap::new(l2, vec![], 0.0).unwrap();
        let rep = fixed_point_count(&f).unwrap();
        assert_eq!(rep.algebraic_count, 5);
        assert_eq!(rep.points.len(), 5);
    }

    #[test]
    fn perturbed_count_is_stable() {
        let mode = FourierMode {
            k: vec![1, 0],
            a: vec![0.0, 0.0],
            b: vec![0.4, -0.3],
        };
        let f = TorusMap::new(cat_map().mul(&cat_map()), vec![mode], 0.01).unwrap();
        let rep = fixed_point_count(&f).unwrap();
        assert_eq!(rep.points.len(), 5);
        assert!(rep.max_residual < 1e-10);
    }

    #[test]
    fn permutation_of_cat_on_cat_squared() {
        let l = cat_map();
        let f = TorusMap::new(l.mul(&l), vec![], 0.0).unwrap();
        let g = TorusMap::new(l, vec![], 0.0).unwrap();
        let rep = fixed_point_count(&f).unwrap();
        let sigma = fixed_point_permutation(&f, &g, &rep).unwrap();
        // Π(g²) = Π(g)², and g² = f acts trivially on Fix(f)
        let sigma2 = compose_permutation(&sigma, &sigma);
        let id: Vec<usize> = (0..5).collect();
        assert_eq!(sigma2, id);
        // g itself is not the identity permutation on the 5 points
        assert_ne!(sigma, id);
    }

    #[test]
    fn identity_permutation_for_f_itself() {
        let f = TorusMap::new(cat_map().mul(&cat_map()), vec![], 0.0).unwrap();
        let rep = fixed_point_count(&f).unwrap();
        let sigma = fixed_point_permutation(&f, &f, &rep).unwrap();
        assert_eq!(sigma, (0..5).collect::<Vec<_>>());
    }

    #[test]
    fn non_ergodic_rejected() {
        let f = TorusMap::new(IntMatrix::identity(2), vec![], 0.0).unwrap();
        assert!(matches!(
            fixed_point_count(&f),
            Err(Error::Precondition(_))
        ));
    }
}
