//! Center volume growth: the log-determinant rate of a commuting map along
//! the 2-dimensional center plane of the base dynamics.
//!
//! The center plane at a point is recovered by forward-backward refinement:
//! pushing a (c+u)-dimensional plane forward converges to `E^{cu}`, pulling
//! a (c+s)-dimensional plane backward converges to `E^{cs}`; the center is
//! their intersection. The 2-plane is re-refined at every orbit point, so
//! the per-step area growth never drifts off the (non-attracting) center.

use nalgebra::{DMatrix, DVector};

use super::{stratified_sample, TorusMap};
use crate::centralizer::FunctionalFrame;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct VolumeGrowthReport {
    /// Per-step `log |det(Dg|E_f^c)|` along the orbit.
    pub step_rates: Vec<f64>,
    /// Mean rate per step.
    pub mean_rate: f64,
    /// Refinement depth used for the plane tracking.
    pub refine_depth: usize,
    /// Linear-model value `log |det(M|E_L^c)|` for the linear part of `g`.
    pub linear_center_rate: f64,
    /// Right-hand side of the growth inequality per step, computed in
    /// linear data for the supplied `(c, ε)`:
    /// `(1−ε)·log det(M|E^c) − 2ε·Σ_{χ(M)>0} log det(M|E^χ) + (log c)/n`.
    pub comparison_rhs: f64,
    /// Whether `mean_rate ≥ comparison_rhs` held (diagnostic only).
    pub inequality_holds: bool,
}

/// Track `log |det(Dgⁿ|E_f^c)|` along a `g`-orbit of length `n`.
///
/// `user_c` and `user_eps` feed the diagnostic comparison against the
/// volume-growth inequality; they default to `(1, 0)`.
pub fn center_volume_growth(
    f: &TorusMap,
    g: &TorusMap,
    n: usize,
    user_c: f64,
    user_eps: f64,
) -> Result<VolumeGrowthReport> {
    let d = f.dim();
    if g.dim() != d {
        return Err(Error::Dimension("map dimensions differ".into()));
    }
    let spec = f.spectrum();
    if spec.center_dim != 2 {
        return Err(Error::Precondition(format!(
            "volume growth requires a 2-dimensional center, found {}",
            spec.center_dim
        )));
    }
    let frame = FunctionalFrame::new(f.linear())?;
    let center_idx = spec.center_class().expect("center class exists");
    let pc = &frame.projectors.projectors[center_idx];
    let pu = frame.projectors.unstable(spec);
    let ps = frame.projectors.stable(spec);
    let du = spec
        .lyapunov
        .iter()
        .filter(|c| !c.exactly_zero && c.lo > 0.0)
        .map(|c| c.multiplicity)
        .sum::<usize>();
    let ds = d - du - 2;
    let qcu = orthonormal_cols(&(pu.clone() + pc), du + 2)?;
    let qcs = orthonormal_cols(&(ps.clone() + pc), ds + 2)?;

    // per-step rates along the g-orbit, with the plane recomputed pointwise
    let x0 = stratified_sample(d, 1, 0xCE27E4)[0].clone();
    let mut x = x0;
    let mut refine_depth = 0usize;
    let mut step_rates = Vec::with_capacity(n);
    let plane_at = |x: &DVector<f64>, depth: &mut usize| -> Result<DMatrix<f64>> {
        center_plane(f, x, &qcu, &qcs, depth)
    };
    let mut p = plane_at(&x, &mut refine_depth)?;
    for _ in 0..n {
        let moved = g.jacobian(&x) * &p;
        let x_next = g.eval_torus(&x);
        let p_next = plane_at(&x_next, &mut refine_depth)?;
        // area growth of the induced map between the two center planes
        let induced = p_next.transpose() * &moved;
        let det = induced.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Numerical(
                "center-plane tracking degenerated (zero area)".into(),
            ));
        }
        step_rates.push(det.abs().ln());
        x = x_next;
        p = p_next;
    }
    let mean_rate = step_rates.iter().sum::<f64>() / n.max(1) as f64;

    // linear-model comparison for the supplied (c, ε)
    let mvals = frame.values(g.linear())?;
    let linear_center_rate = mvals.per_class[center_idx] * 2.0;
    let positive_sum: f64 = mvals
        .per_class
        .iter()
        .zip(&mvals.dims)
        .enumerate()
        .filter(|(i, (v, _))| *i != center_idx && **v > 0.0)
        .map(|(_, (v, dd))| v * *dd as f64)
        .sum();
    let comparison_rhs = (1.0 - user_eps) * linear_center_rate - 2.0 * user_eps * positive_sum
        + if n > 0 { user_c.ln() / n as f64 } else { 0.0 };
    Ok(VolumeGrowthReport {
        mean_rate,
        refine_depth,
        linear_center_rate,
        comparison_rhs,
        inequality_holds: mean_rate >= comparison_rhs - 1e-9,
        step_rates,
    })
}

/// The center plane at `x`: intersection of the forward-refined `E^{cu}`
/// and the backward-refined `E^{cs}` planes, with the depth grown until the
/// plane stabilizes.
fn center_plane(
    f: &TorusMap,
    x: &DVector<f64>,
    qcu: &DMatrix<f64>,
    qcs: &DMatrix<f64>,
    depth_used: &mut usize,
) -> Result<DMatrix<f64>> {
    if f.is_linear() {
        // exact invariant planes: intersection of the model spaces
        let p = intersect_planes(qcu, qcs)?;
        return Ok(p);
    }
    let mut prev: Option<DMatrix<f64>> = None;
    for depth in [8usize, 16, 32, 64, 128] {
        let cu = push_forward(f, x, qcu, depth)?;
        let cs = pull_backward(f, x, qcs, depth)?;
        let p = intersect_planes(&cu, &cs)?;
        if let Some(q) = &prev {
            if plane_distance(q, &p) < 1e-11 {
                *depth_used = (*depth_used).max(depth);
                return Ok(p);
            }
        }
        prev = Some(p);
    }
    Err(Error::Numerical(
        "center-plane refinement failed to stabilize (dominance violated)".into(),
    ))
}

/// Push a plane forward `m` steps ending at `x`: transport the model plane
/// from `f^{−m}(x)` along the orbit.
fn push_forward(
    f: &TorusMap,
    x: &DVector<f64>,
    q0: &DMatrix<f64>,
    m: usize,
) -> Result<DMatrix<f64>> {
    // backward orbit from x
    let mut orbit = vec![x.clone()];
    let mut y = x.clone();
    for _ in 0..m {
        y = f.eval_torus_inverse(&y)?;
        orbit.push(y.clone());
    }
    let mut v = q0.clone();
    for y in orbit.iter().rev().take(m) {
        v = orth(&(f.jacobian(y) * v));
    }
    Ok(v)
}

/// Pull a plane backward `m` steps ending at `x`.
fn pull_backward(
    f: &TorusMap,
    x: &DVector<f64>,
    q0: &DMatrix<f64>,
    m: usize,
) -> Result<DMatrix<f64>> {
    // forward orbit from x
    let mut orbit = vec![x.clone()];
    let mut y = x.clone();
    for _ in 0..m {
        y = f.eval_torus(&y);
        orbit.push(y.clone());
    }
    let mut v = q0.clone();
    for y in orbit.iter().rev().skip(1) {
        // D(f^{−1})(f(y)) = J(y)⁻¹
        let j = f.jacobian(y);
        let solved = j
            .lu()
            .solve(&v)
            .ok_or_else(|| Error::Numerical("singular Jacobian in backward pull".into()))?;
        v = orth(&solved);
    }
    Ok(v)
}

fn orth(m: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = m.clone().qr();
    let q = qr.q();
    q.columns(0, m.ncols()).into_owned()
}

fn orthonormal_cols(p: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    let svd = p.clone().svd(true, false);
    let u = svd.u.as_ref().expect("requested U");
    let mut order: Vec<usize> = (0..p.nrows()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    if svd.singular_values[order[k - 1]] < 1e-8 {
        return Err(Error::Numerical("plane basis rank-deficient".into()));
    }
    let cols: Vec<_> = order[..k]
        .iter()
        .map(|&i| u.column(i).into_owned())
        .collect();
    Ok(DMatrix::from_columns(&cols))
}

/// Intersection of two subspaces given by orthonormal bases, via principal
/// angles: the singular vectors of `AᵀB` with singular value ≈ 1.
fn intersect_planes(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = a.nrows();
    let ka = a.ncols();
    let kb = b.ncols();
    let expected = (ka + kb).checked_sub(d).unwrap_or(0);
    if expected < 1 {
        return Err(Error::Numerical("planes do not intersect".into()));
    }
    let m = a.transpose() * b;
    let svd = m.svd(true, false);
    let u = svd.u.as_ref().expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| {
        svd.singular_values[y]
            .partial_cmp(&svd.singular_values[x])
            .unwrap()
    });
    let mut cols = Vec::with_capacity(expected);
    for i in 0..expected {
        let idx = order[i];
        if svd.singular_values[idx] < 1.0 - 1e-6 {
            return Err(Error::Numerical(
                "plane intersection is not transverse enough".into(),
            ));
        }
        let alpha = u.column(idx).into_owned();
        cols.push((a * alpha).column(0).into_owned());
    }
    Ok(orth(&DMatrix::from_columns(&cols)))
}

/// Largest principal-angle sine between two planes with orthonormal bases.
fn plane_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    // ‖(I − BBᵀ)A‖
    let d = a.nrows();
    let proj = DMatrix::identity(d, d) - b * b.transpose();
    (proj * a).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::FourierMode;
    use crate::exact::{IntMatrix, IntPoly};

    fn worked_example_d4() -> IntMatrix {
        IntMatrix::companion(&IntPoly::from_i64(&[1, -3, 3, -3, 1])).unwrap()
    }

    #[test]
    fn isometric_center_has_zero_rate() {
        let l = worked_example_d4();
        let f = TorusMap::new(l.clone(), vec![], 0.0).unwrap();
        let rep = center_volume_growth(&f, &f, 50, 1.0, 0.0).unwrap();
        assert!(rep.mean_rate.abs() < 1e-9, "rate {}", rep.mean_rate);
        assert!(rep.inequality_holds);
    }

    #[test]
    fn cone_element_rate_is_golden() {
        let l = worked_example_d4();
        let gamma = l
            .add(&l.inverse_unimodular().unwrap())
            .sub(&IntMatrix::identity(4).mul_scalar(&num_bigint::BigInt::from(2)));
        let f = TorusMap::new(l, vec![], 0.0).unwrap();
        let g = TorusMap::new(gamma, vec![], 0.0).unwrap();
        let rep = center_volume_growth(&f, &g, 40, 1.0, 0.0).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!(
            (rep.mean_rate - 2.0 * phi.ln()).abs() < 1e-9,
            "rate {} vs {}",
            rep.mean_rate,
            2.0 * phi.ln()
        );
        assert!((rep.linear_center_rate - 2.0 * phi.ln()).abs() < 1e-9);
    }

    #[test]
    fn perturbed_center_stays_near_isometric() {
        let mode = FourierMode {
            k: vec![1, 0, 0, 0],
            a: vec![0.0; 4],
            b: vec![0.0, 0.5, 0.0, 0.0],
        };
        let f = TorusMap::new(worked_example_d4(), vec![mode], 0.02).unwrap();
        let rep = center_volume_growth(&f, &f, 60, 1.0, 0.05).unwrap();
        assert!(rep.mean_rate.abs() <= 0.05, "rate {}", rep.mean_rate);
    }

    #[test]
    fn rejects_maps_without_center() {
        let cat = IntMatrix::from_rows_i64(&[&[2, 1], &[1, 1]]);
        let f = TorusMap::new(cat, vec![], 0.0).unwrap();
        assert!(matches!(
            center_volume_growth(&f, &f, 10, 1.0, 0.0),
            Err(Error::Precondition(_))
        ));
    }
}
