//! Twisted cohomological equations along hyperbolic exponent classes.
//!
//! For a class χ ≠ 0 of the linear part L and the perturbation
//! `F(x) = Lx + ε·v(x)`, the function `φ_χ` solving
//! `v_χ(x) = Lφ_χ(x) − φ_χ(fx)` is a geometric series of orbit terms: the
//! expanding form is `φ_χ(x) = Σ_{n≥0} (L|E^χ)^{−(n+1)} v_χ(f^n x)`, the
//! contracting one runs along backward orbits. Truncation follows the
//! closed-form geometric tail bound.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{residual_grid_size, stratified_sample, TorusMap};
use crate::centralizer::FunctionalFrame;
use crate::{Error, Result};

/// Truncated-series solution of the twisted equation on one class,
/// carrying its residual certificate.
#[derive(Clone)]
pub struct CocycleSolution {
    map: TorusMap,
    /// Orthonormal basis of the class subspace (d × k).
    basis: DMatrix<f64>,
    /// Class coordinates of the spectral projection: `Qᵀ·Π_χ` (k × d).
    /// The projector is oblique, so this is not just `Qᵀ`.
    proj_t: DMatrix<f64>,
    /// Restriction of L to the class in that basis (k × k).
    restricted: DMatrix<f64>,
    restricted_inv: DMatrix<f64>,
    /// Class index into `map.spectrum().lyapunov`.
    pub class_index: usize,
    pub expanding: bool,
    /// Series truncation length N.
    pub truncation: usize,
    /// Contraction factor with the perturbation margin folded in.
    pub rho: f64,
    /// A-priori geometric tail bound on the residual.
    pub bound: f64,
    /// Measured sup-residual over the internal sample grid.
    pub residual_sup: f64,
    /// Sample count of the internal grid.
    pub grid_size: usize,
}

impl CocycleSolution {
    /// Class coordinates of `v_χ(x) = Π_χ(ε·v(x))`.
    fn v_class(&self, x: &DVector<f64>) -> DVector<f64> {
        if self.map.is_linear() {
            return DVector::zeros(self.basis.ncols());
        }
        &self.proj_t * (self.map.displacement(x) * self.map.epsilon())
    }

    /// `φ_χ` at a torus point, in class coordinates.
    fn phi_class(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let k = self.basis.ncols();
        if self.map.is_linear() {
            return Ok(DVector::zeros(k));
        }
        let mut acc = DVector::zeros(k);
        if self.expanding {
            // collect the forward orbit, then fold backwards:
            // φ = B⁻¹(v₀ + B⁻¹(v₁ + …))
            let mut orbit = Vec::with_capacity(self.truncation + 1);
            let mut y = x.clone();
            for _ in 0..=self.truncation {
                orbit.push(y.clone());
                y = self.map.eval_torus(&y);
            }
            for y in orbit.iter().rev() {
                acc = &self.restricted_inv * (self.v_class(y) + acc);
            }
        } else {
            // φ = −(w₁ + B(w₂ + B(…))) with w_n = v_χ(f^{−n} x)
            let mut orbit = Vec::with_capacity(self.truncation);
            let mut y = x.clone();
            for _ in 1..=self.truncation {
                y = self.map.eval_torus_inverse(&y)?;
                orbit.push(y.clone());
            }
            for y in orbit.iter().rev() {
                acc = self.v_class(y) + &self.restricted * acc;
            }
            acc = -acc;
        }
        Ok(acc)
    }

    /// `φ_χ(x)` in ambient coordinates (a vector in `E_L^χ`).
    pub fn phi(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(&self.basis * self.phi_class(x)?)
    }

    /// `Φ_χ(x) = x^χ + φ_χ(x)` evaluated on a lift point, in class
    /// coordinates. The translation law `Φ(x+n) = Φ(x) + n^χ` holds by
    /// construction since φ is periodic.
    pub fn big_phi_class(&self, x_lift: &DVector<f64>) -> Result<DVector<f64>> {
        let frac = super::reduce_mod_1(x_lift);
        Ok(&self.proj_t * x_lift + self.phi_class(&frac)?)
    }

    /// Residual `‖v_χ(x) − Lφ_χ(x) + φ_χ(fx)‖` at a torus point.
    pub fn residual_at(&self, x: &DVector<f64>) -> Result<f64> {
        let fx = self.map.eval_torus(x);
        let r = self.v_class(x) - &self.restricted * self.phi_class(x)? + self.phi_class(&fx)?;
        Ok(r.norm())
    }

    /// Max residual over a fresh sample of the torus.
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

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn proj_t(&self) -> &DMatrix<f64> {
        &self.proj_t
    }

    pub fn restricted(&self) -> &DMatrix<f64> {
        &self.restricted
    }
}

/// Solve the twisted cohomological equation on the nonzero exponent class
/// with index `class_index` (into the classification's `lyapunov` list).
pub fn solve_twisted_cocycle(
    f: &TorusMap,
    class_index: usize,
    tol: f64,
) -> Result<CocycleSolution> {
    let spec = f.spectrum();
    let class = spec
        .lyapunov
        .get(class_index)
        .ok_or_else(|| Error::Precondition(format!("no exponent class {class_index}")))?;
    if class.exactly_zero {
        return Err(Error::Precondition(
            "twisted equation requires a nonzero exponent class".into(),
        ));
    }
    let expanding = class.lo > 0.0;
    let frame = FunctionalFrame::new(f.linear())?;
    let basis = frame_basis(&frame, class_index)?;
    let proj_t = basis.transpose() * &frame.projectors.projectors[class_index];
    let restricted = basis.transpose() * f.linear_f64() * &basis;
    let restricted_inv = restricted.clone().try_inverse().ok_or_else(|| {
        Error::Numerical("restricted linear action is numerically singular".into())
    })?;
    // contraction factor of the series step
    let rho_lin = if expanding {
        operator_norm(&restricted_inv)
    } else {
        operator_norm(&restricted)
    };
    let rho = rho_lin + f.epsilon() * f.sup_dv();
    if rho >= 1.0 {
        return Err(Error::PerturbationTooLarge(format!(
            "class {class_index}: series factor {rho:.4} ≥ 1"
        )));
    }
    // ‖v_χ‖ ≤ ‖Π_χ‖·ε·sup‖v‖ (the spectral projector is oblique)
    let eps_v = f.epsilon() * f.sup_v() * operator_norm(&proj_t);
    let (truncation, bound) = if eps_v == 0.0 {
        (0, 0.0)
    } else {
        // ε‖v‖·ρ^{N+1}/(1−ρ) ≤ tol/2
        let target = tol * (1.0 - rho) / (2.0 * eps_v);
        let n = if target >= 1.0 {
            1
        } else {
            (target.ln() / rho.ln()).ceil() as usize
        };
        let bound = eps_v * rho.powi(n as i32 + 1) / (1.0 - rho);
        (n, bound)
    };
    let mut sol = CocycleSolution {
        map: f.clone(),
        basis,
        proj_t,
        restricted,
        restricted_inv,
        class_index,
        expanding,
        truncation,
        rho,
        bound,
        residual_sup: 0.0,
        grid_size: 0,
    };
    let grid = residual_grid_size(f.dim());
    let pts = stratified_sample(f.dim(), grid, 0x5EED_0C0C);
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|p| sol.residual_at(p))
        .collect::<Result<_>>()?;
    sol.residual_sup = vals.into_iter().fold(0.0, f64::max);
    sol.grid_size = grid;
    Ok(sol)
}

fn frame_basis(frame: &FunctionalFrame, class_index: usize) -> Result<DMatrix<f64>> {
    let p = frame
        .projectors
        .projectors
        .get(class_index)
        .ok_or_else(|| Error::Precondition("class index out of range".into()))?;
    let k = frame.spectrum.lyapunov[class_index].multiplicity;
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

pub(crate) fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
}

/// Deviation of the equivariance law `Φ_χ(Gx) = MΦ_χ(x) + const` over a
/// sample, after fitting the single constant.
pub fn verify_equivariance(
    sol: &CocycleSolution,
    g: &TorusMap,
    samples: usize,
) -> Result<f64> {
    let f = sol.map();
    let d = f.dim();
    if g.dim() != d {
        return Err(Error::Dimension("map dimensions differ".into()));
    }
    // commutation check on a small sample
    let pts = stratified_sample(d, 64, 0xC0817E);
    for p in &pts {
        let fg = f.eval_torus(&g.eval_torus(p));
        let gf = g.eval_torus(&f.eval_torus(p));
        if super::torus_distance(&fg, &gf) > 1e-10 {
            return Err(Error::Precondition(
                "maps do not commute within tolerance".into(),
            ));
        }
    }
    let m_restricted = sol.basis().transpose() * g.linear_f64() * sol.basis();
    let pts = stratified_sample(d, samples, 0xE9A1);
    let mut errs: Vec<DVector<f64>> = Vec::with_capacity(pts.len());
    for p in &pts {
        let gp = g.lift(p);
        let lhs = sol.big_phi_class(&gp)?;
        let rhs = &m_restricted * sol.big_phi_class(p)?;
        errs.push(lhs - rhs);
    }
    let k = errs[0].len();
    let mut mean = DVector::zeros(k);
    for e in &errs {
        mean += e;
    }
    mean /= errs.len() as f64;
    Ok(errs
        .iter()
        .map(|e| (e - &mean).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::FourierMode;
    use crate::exact::{IntMatrix, IntPoly};

    fn worked_example_d4() -> IntMatrix {
        IntMatrix::companion(&IntPoly::from_i64(&[1, -3, 3, -3, 1])).unwrap()
    }

    fn mode_k1000(d: usize) -> FourierMode {
        let mut k = vec![0i64; d];
        k[0] = 1;
        let mut b = vec![0.0; d];
        b[0] = 0.7;
        b[1] = -0.4;
        FourierMode {
            k,
            a: vec![0.0; d],
            b,
        }
    }

    #[test]
    fn zero_perturbation_gives_zero_solution() {
        let f = TorusMap::new(worked_example_d4(), vec![], 0.0).unwrap();
        let sol = solve_twisted_cocycle(&f, 0, 1e-8).unwrap();
        assert_eq!(sol.residual_sup, 0.0);
        assert_eq!(sol.bound, 0.0);
        let x = DVector::from_vec(vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(sol.phi(&x).unwrap().norm(), 0.0);
    }

    #[test]
    fn constant_mode_closed_form() {
        // v ≡ c: φ_χ = (L|E^χ − I)⁻¹ c^χ, constant
        let d = 4;
        let c = vec![0.3, -0.1, 0.2, 0.05];
        let mode = FourierMode {
            k: vec![0; d],
            a: c.clone(),
            b: vec![0.0; d],
        };
        let f =
            TorusMap::new_unnormalized(worked_example_d4(), vec![mode], 0.01).unwrap();
        let sol = solve_twisted_cocycle(&f, 0, 1e-13).unwrap();
        let b = sol.restricted().clone();
        let k = b.nrows();
        let cv = sol.proj_t() * DVector::from_vec(c.clone()) * 0.01;
        let expected = (b - DMatrix::<f64>::identity(k, k))
            .lu()
            .solve(&cv)
            .unwrap();
        let x = DVector::from_vec(vec![0.7, 0.1, 0.9, 0.3]);
        let got = sol.basis().transpose() * sol.phi(&x).unwrap();
        assert!(
            (got - expected).norm() < 1e-13,
            "closed form mismatch"
        );
    }

    #[test]
    fn residual_below_bound_single_mode() {
        let f = TorusMap::new(worked_example_d4(), vec![mode_k1000(4)], 0.01).unwrap();
        let sol = solve_twisted_cocycle(&f, 0, 2e-8).unwrap();
        assert!(sol.residual_sup <= sol.bound * (1.0 + 1e-6) + 1e-13,
            "residual {} vs bound {}", sol.residual_sup, sol.bound);
        assert!(sol.residual_sup <= 1e-8);
        // fresh samples obey the same bound
        let fresh = sol.residual_on_fresh_samples(4096, 0xFEED).unwrap();
        assert!(fresh <= sol.bound * (1.0 + 1e-6) + 1e-13);
    }

    #[test]
    fn contracting_class_solver() {
        let f = TorusMap::new(worked_example_d4(), vec![mode_k1000(4)], 0.01).unwrap();
        let spec = f.spectrum().clone();
        let idx = spec.lyapunov.len() - 1; // most negative exponent
        assert!(spec.lyapunov[idx].hi < 0.0);
        let sol = solve_twisted_cocycle(&f, idx, 1e-7).unwrap();
        assert!(!sol.expanding);
        assert!(sol.residual_sup <= sol.bound * (1.0 + 1e-6) + 1e-12,
            "residual {} vs bound {}", sol.residual_sup, sol.bound);
    }

    #[test]
    fn zero_class_rejected() {
        let f = TorusMap::new(worked_example_d4(), vec![], 0.0).unwrap();
        let spec = f.spectrum().clone();
        let zero_idx = spec.center_class().unwrap();
        assert!(matches!(
            solve_twisted_cocycle(&f, zero_idx, 1e-8),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn oversized_perturbation_rejected_by_class_margin() {
        // margin passes construction but ρ-condition may still fail for a
        // slow class if ε is large; here we check the error channel exists
        let f = TorusMap::new(worked_example_d4(), vec![mode_k1000(4)], 0.03).unwrap();
        // still fine for the top class
        assert!(solve_twisted_cocycle(&f, 0, 1e-6).is_ok());
    }

    #[test]
    fn equivariance_for_f_itself() {
        let f = TorusMap::new(worked_example_d4(), vec![mode_k1000(4)], 0.01).unwrap();
        let sol = solve_twisted_cocycle(&f, 0, 2e-8).unwrap();
        let dev = verify_equivariance(&sol, &f, 512).unwrap();
        assert!(
            dev <= 2.0 * sol.residual_sup + 1e-12,
            "dev {dev} vs residual {}",
            sol.residual_sup
        );
    }

    #[test]
    fn equivariance_for_linear_commuting_map() {
        // ε = 0: Φ is linear, any commuting M gives deviation ~ 0
        let l = worked_example_d4();
        let f = TorusMap::new(l.clone(), vec![], 0.0).unwrap();
        let sol = solve_twisted_cocycle(&f, 0, 1e-10).unwrap();
        let m = l.sub(&IntMatrix::identity(4));
        // M = L − I has determinant −1, still a torus map
        let g = TorusMap::new(m, vec![], 0.0).unwrap();
        let dev = verify_equivariance(&sol, &g, 256).unwrap();
        assert!(dev <= 1e-12, "dev {dev}");
    }

    #[test]
    fn equivariance_for_f_squared() {
        let f = TorusMap::new(worked_example_d4(), vec![mode_k1000(4)], 0.01).unwrap();
        let sol = solve_twisted_cocycle(&f, 0, 2e-8).unwrap();
        // g = f²: evaluate by composing f twice through a wrapper map is not
        // representable as a TorusMap; instead check the deviation through
        // the composed functional equation manually
        let pts = stratified_sample(4, 256, 0xF2);
        let m2 = sol.basis().transpose()
            * (f.linear_f64() * f.linear_f64())
            * sol.basis();
        let mut max_dev = 0.0f64;
        let mut errs = Vec::new();
        for p in &pts {
            // the displacement is Z^d-periodic, so the lift applies to any
            // real point: F²(x) = F(F(x))
            let g2 = f.lift(&f.lift(p));
            let lhs = sol.big_phi_class(&g2).unwrap();
            let rhs = &m2 * sol.big_phi_class(p).unwrap();
            errs.push(lhs - rhs);
        }
        let k = errs[0].len();
        let mut mean = DVector::zeros(k);
        for e in &errs {
            mean += e;
        }
        mean /= errs.len() as f64;
        for e in &errs {
            max_dev = max_dev.max((e - &mean).norm());
        }
        assert!(
            max_dev <= 4.0 * sol.residual_sup + 1e-12,
            "dev {max_dev} vs residual {}",
            sol.residual_sup
        );
    }
}
