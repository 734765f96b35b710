//! The semiconjugacy onto the linear model for maps with hyperbolic linear
//! part: `H = id + h` with `H∘g = M∘H`, solved by splitting the twisted
//! equation `Mh(x) − h(gx) = ε·v(x)` along the stable/unstable spectral
//! projectors of `M` and summing the two geometric series.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::cocycle::operator_norm;
use super::{residual_grid_size, stratified_sample, TorusMap};
use crate::centralizer::{is_hyperbolic_exact, FunctionalFrame};
use crate::{Error, Result};

/// `H = id + h` with the residual certificate.
#[derive(Clone)]
pub struct FranksManningMap {
    map: TorusMap,
    /// Orthonormal basis of the unstable space of `M` (d × du).
    qu: DMatrix<f64>,
    /// Orthonormal basis of the stable space (d × ds).
    qs: DMatrix<f64>,
    /// Class coordinates of the oblique spectral projections: `Qᵀ·Π`.
    pu_t: DMatrix<f64>,
    ps_t: DMatrix<f64>,
    bu_inv: DMatrix<f64>,
    bs: DMatrix<f64>,
    pub truncation_u: usize,
    pub truncation_s: usize,
    pub rho: f64,
    pub bound: f64,
    /// Measured sup of `‖H(gx) − MH(x)‖` over the internal grid.
    pub residual_sup: f64,
    pub grid_size: usize,
}

impl FranksManningMap {
    /// Displacement `h(x)` at a torus point.
    pub fn h(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let d = self.map.dim();
        if self.map.is_linear() {
            return Ok(DVector::zeros(d));
        }
        // unstable: Σ_{n≥0} Bu^{−(n+1)} Quᵀ(εv)(gⁿx), folded backwards
        let mut acc_u = DVector::zeros(self.qu.ncols());
        let mut orbit = Vec::with_capacity(self.truncation_u + 1);
        let mut y = x.clone();
        for _ in 0..=self.truncation_u {
            orbit.push(y.clone());
            y = self.map.eval_torus(&y);
        }
        for y in orbit.iter().rev() {
            let w = &self.pu_t * (self.map.displacement(y) * self.map.epsilon());
            acc_u = &self.bu_inv * (w + acc_u);
        }
        // stable: −Σ_{n≥1} Bs^{n−1} Qsᵀ(εv)(g^{−n}x)
        let mut acc_s = DVector::zeros(self.qs.ncols());
        let mut back = Vec::with_capacity(self.truncation_s);
        let mut y = x.clone();
        for _ in 1..=self.truncation_s {
            y = self.map.eval_torus_inverse(&y)?;
            back.push(y.clone());
        }
        for y in back.iter().rev() {
            let w = &self.ps_t * (self.map.displacement(y) * self.map.epsilon());
            acc_s = w + &self.bs * acc_s;
        }
        Ok(&self.qu * acc_u - &self.qs * acc_s)
    }

    /// Lifted semiconjugacy `H(x) = x + h(x mod 1)`, normalized `H(0) = 0`.
    pub fn eval_lift(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(x + self.h(&super::reduce_mod_1(x))?)
    }

    /// Residual `‖H(Gx) − MH(x)‖` at a torus point (no wrap needed: the
    /// defining relation cancels the integer parts).
    pub fn residual_at(&self, x: &DVector<f64>) -> Result<f64> {
        let gx = self.map.lift(x);
        let lhs = self.eval_lift(&gx)?;
        let rhs = self.map.linear_f64() * self.eval_lift(x)?;
        Ok((lhs - rhs).norm())
    }

    pub fn residual_on_fresh_samples(&self, count: usize, seed: u64) -> Result<f64> {
        let pts = stratified_sample(self.map.dim(), count, seed);
        let vals: Vec<f64> = pts
            .par_iter()
            .map(|p| self.residual_at(p))
            .collect::<Result<_>>()?;
        Ok(vals.into_iter().fold(0.0, f64::max))
    }

    pub fn map(&self) -> &TorusMap {
        &self.map
    }
}

/// Solve `Mh(x) − h(gx) = ε·v(x)` for a map whose linear part is
/// hyperbolic (decided exactly).
pub fn franks_manning(g: &TorusMap, tol: f64) -> Result<FranksManningMap> {
    let m = g.linear();
    if !is_hyperbolic_exact(m)? {
        return Err(Error::Precondition(
            "no semiconjugacy solver for non-hyperbolic linear part".into(),
        ));
    }
    let frame = FunctionalFrame::new(m)?;
    let spec = &frame.spectrum;
    let pu = frame.projectors.unstable(spec);
    let ps = frame.projectors.stable(spec);
    let du: usize = spec
        .lyapunov
        .iter()
        .filter(|c| c.lo > 0.0)
        .map(|c| c.multiplicity)
        .sum();
    let ds = g.dim() - du;
    let qu = orthonormal_basis(&pu, du)?;
    let qs = orthonormal_basis(&ps, ds)?;
    let pu_t = qu.transpose() * &pu;
    let ps_t = qs.transpose() * &ps;
    let bu = qu.transpose() * g.linear_f64() * &qu;
    let bs = qs.transpose() * g.linear_f64() * &qs;
    let bu_inv = bu
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("unstable restriction singular".into()))?;
    let rho_lin = operator_norm(&bu_inv).max(operator_norm(&bs));
    let rho = rho_lin + g.epsilon() * g.sup_dv();
    if rho >= 1.0 {
        return Err(Error::PerturbationTooLarge(format!(
            "semiconjugacy series factor {rho:.4} ≥ 1"
        )));
    }
    // oblique projector norms inflate the series input bound
    let proj_norm = operator_norm(&pu_t).max(operator_norm(&ps_t));
    let eps_v = g.epsilon() * g.sup_v() * proj_norm;
    let (nu, ns, bound) = if eps_v == 0.0 {
        (0, 0, 0.0)
    } else {
        let target = tol * (1.0 - rho) / (2.0 * eps_v);
        let n = if target >= 1.0 {
            1
        } else {
            (target.ln() / rho.ln()).ceil() as usize
        };
        // both series share the factor; the joint residual bound doubles
        let bound = 2.0 * eps_v * rho.powi(n as i32 + 1) / (1.0 - rho);
        (n, n, bound)
    };
    let mut fm = FranksManningMap {
        map: g.clone(),
        qu,
        qs,
        pu_t,
        ps_t,
        bu_inv,
        bs,
        truncation_u: nu,
        truncation_s: ns,
        rho,
        bound,
        residual_sup: 0.0,
        grid_size: 0,
    };
    let grid = residual_grid_size(g.dim());
    let pts = stratified_sample(g.dim(), grid, 0xF14A);
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|p| fm.residual_at(p))
        .collect::<Result<_>>()?;
    fm.residual_sup = vals.into_iter().fold(0.0, f64::max);
    fm.grid_size = grid;
    Ok(fm)
}

fn orthonormal_basis(p: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    if k == 0 {
        return Err(Error::Numerical("empty spectral side".into()));
    }
    let svd = p.clone().svd(true, false);
    let u = svd.u.as_ref().expect("requested U");
    let mut order: Vec<usize> = (0..p.nrows()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    let cols: Vec<_> = order[..k]
        .iter()
        .map(|&i| u.column(i).into_owned())
        .collect();
    Ok(DMatrix::from_columns(&cols))
}

/// Deviation of `H∘f − L_f∘H` over samples, where `H` is the semiconjugacy
/// of `g` and `f` commutes with `g`. Diagnostic: broken commutation shows
/// up as a large deviation, not an error.
pub fn commuting_pair_check(
    f: &TorusMap,
    h: &FranksManningMap,
    samples: usize,
) -> Result<f64> {
    let d = f.dim();
    if d != h.map().dim() {
        return Err(Error::Dimension("map dimensions differ".into()));
    }
    let pts = stratified_sample(d, samples, 0xC3EC);
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|p| -> Result<f64> {
            let fp = f.lift(p);
            let lhs = h.eval_lift(&fp)?;
            let rhs = f.linear_f64() * h.eval_lift(p)?;
            Ok((lhs - rhs).norm())
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::FourierMode;
    use crate::exact::IntMatrix;

    fn cat_map() -> IntMatrix {
        IntMatrix::from_rows_i64(&[&[2, 1], &[1, 1]])
    }

    fn one_mode() -> FourierMode {
        FourierMode {
            k: vec![1, 0],
            a: vec![0.0, 0.0],
            b: vec![0.6, -0.2],
        }
    }

    #[test]
    fn zero_perturbation_gives_identity() {
        let g = TorusMap::new(cat_map(), vec![], 0.0).unwrap();
        let fm = franks_manning(&g, 1e-8).unwrap();
        assert_eq!(fm.residual_sup, 0.0);
        let x = DVector::from_vec(vec![0.3, 0.8]);
        assert!(fm.h(&x).unwrap().norm() == 0.0);
    }

    #[test]
    fn constant_mode_closed_form() {
        // v ≡ c: h = (M − I)⁻¹ c (constant), from Mh − h = εc
        let c = vec![0.2, -0.5];
        let mode = FourierMode {
            k: vec![0, 0],
            a: c.clone(),
            b: vec![0.0, 0.0],
        };
        let g = TorusMap::new_unnormalized(cat_map(), vec![mode], 0.03).unwrap();
        let fm = franks_manning(&g, 1e-12).unwrap();
        let mf = g.linear_f64().clone();
        let expected = (mf - DMatrix::<f64>::identity(2, 2))
            .lu()
            .solve(&(DVector::from_vec(c) * 0.03))
            .unwrap();
        let x = DVector::from_vec(vec![0.4, 0.9]);
        let got = fm.h(&x).unwrap();
        assert!((got - expected).norm() < 1e-12);
    }

    #[test]
    fn perturbed_cat_residual() {
        let g = TorusMap::new(cat_map(), vec![one_mode()], 0.03).unwrap();
        let fm = franks_manning(&g, 1e-6).unwrap();
        assert!(fm.residual_sup <= 1e-6, "residual {}", fm.residual_sup);
        assert!(fm.residual_sup <= fm.bound * (1.0 + 1e-6) + 1e-13);
        let fresh = fm.residual_on_fresh_samples(2048, 0xAB).unwrap();
        assert!(fresh <= fm.bound * (1.0 + 1e-6) + 1e-13);
    }

    #[test]
    fn non_hyperbolic_rejected() {
        use crate::exact::IntPoly;
        let l = IntMatrix::companion(&IntPoly::from_i64(&[1, -3, 3, -3, 1])).unwrap();
        let g = TorusMap::new(l, vec![], 0.0).unwrap();
        match franks_manning(&g, 1e-8) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("non-hyperbolic")),
            Err(other) => panic!("{other:?}"),
            Ok(_) => panic!("expected rejection"),
        }
    }

    #[test]
    fn pair_check_for_g_itself() {
        let g = TorusMap::new(cat_map(), vec![one_mode()], 0.03).unwrap();
        let fm = franks_manning(&g, 1e-6).unwrap();
        let dev = commuting_pair_check(&g, &fm, 1024).unwrap();
        assert!(
            dev <= 3.0 * fm.residual_sup.max(1e-12),
            "dev {dev} vs residual {}",
            fm.residual_sup
        );
    }

    #[test]
    fn broken_commutation_reports_large_deviation() {
        let g = TorusMap::new(cat_map(), vec![one_mode()], 0.03).unwrap();
        let fm = franks_manning(&g, 1e-6).unwrap();
        // independent perturbation: does not commute with g
        let other_mode = FourierMode {
            k: vec![0, 1],
            a: vec![0.0, 0.0],
            b: vec![-0.3, 0.5],
        };
        let f = TorusMap::new(cat_map(), vec![other_mode], 0.03).unwrap();
        let dev = commuting_pair_check(&f, &fm, 512).unwrap();
        assert!(dev > 100.0 * fm.residual_sup, "dev {dev} too small");
    }
}
