//! Numerical layer: perturbed toral automorphisms and the solvers built on
//! them (twisted cohomological equations, Lyapunov spectra, fixed points,
//! semiconjugacies, center volume growth).
//!
//! All torus arithmetic is binary64. Lifts follow the `F(0) = 0` convention:
//! the constructor subtracts `v(0)` unless explicitly asked not to.

mod cocycle;
mod fixed_points;
mod lyapunov;
mod semiconjugacy;
mod volume;

pub use cocycle::{solve_twisted_cocycle, verify_equivariance, CocycleSolution};
pub use fixed_points::{compose_permutation, fixed_point_count, fixed_point_permutation, FixedPointReport};
pub use lyapunov::{lyapunov_spectrum, LyapunovEstimate};
pub use semiconjugacy::{commuting_pair_check, franks_manning, FranksManningMap};
pub use volume::{center_volume_growth, VolumeGrowthReport};

use nalgebra::{DMatrix, DVector};
use num_traits::Signed;

use crate::exact::IntMatrix;
use crate::spectrum::{classify, CertifiedSpectrum};
use crate::{Error, Result};

/// One trigonometric mode of the displacement: frequency vector `k` with
/// cosine coefficients `a` and sine coefficients `b` (vectors in `R^d`).
#[derive(Clone, Debug)]
pub struct FourierMode {
    pub k: Vec<i64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// A perturbed automorphism `f(x) = Lx + ε·v(x) mod Z^d` with finite
/// trigonometric displacement `v`.
#[derive(Clone)]
pub struct TorusMap {
    linear: IntMatrix,
    linear_f64: DMatrix<f64>,
    linear_inv_f64: DMatrix<f64>,
    modes: Vec<FourierMode>,
    /// Constant added to `v` so that `v(0) = 0` (zero when unnormalized).
    offset: DVector<f64>,
    epsilon: f64,
    sup_v: f64,
    sup_dv: f64,
    spectrum: CertifiedSpectrum,
}

impl TorusMap {
    /// Build with the `F(0) = 0` normalization: the displacement at the
    /// origin is subtracted as a constant.
    pub fn new(linear: IntMatrix, modes: Vec<FourierMode>, epsilon: f64) -> Result<Self> {
        Self::build(linear, modes, epsilon, true)
    }

    /// Build without origin normalization; constant (frequency-0) modes
    /// survive. Used for closed-form diagnostics.
    pub fn new_unnormalized(
        linear: IntMatrix,
        modes: Vec<FourierMode>,
        epsilon: f64,
    ) -> Result<Self> {
        Self::build(linear, modes, epsilon, false)
    }

    fn build(
        linear: IntMatrix,
        modes: Vec<FourierMode>,
        epsilon: f64,
        normalize: bool,
    ) -> Result<Self> {
        let d = linear.dim();
        for (i, m) in modes.iter().enumerate() {
            if m.k.len() != d || m.a.len() != d || m.b.len() != d {
                return Err(Error::Dimension(format!(
                    "mode {i} must carry k, a, b of length {d}"
                )));
            }
        }
        let det = linear.det();
        if !det.abs().eq(&num_bigint::BigInt::from(1)) {
            return Err(Error::NotAutomorphism(det.to_string()));
        }
        let spectrum = classify(&linear)?;
        let linear_f64 = linear.to_f64();
        let linear_inv_f64 = linear.inverse_unimodular()?.to_f64();
        let mut offset = DVector::zeros(d);
        if normalize {
            // v(0) = Σ_k a_k
            for m in &modes {
                for i in 0..d {
                    offset[i] -= m.a[i];
                }
            }
        }
        let mut sup_v = offset.norm();
        let mut sup_dv = 0.0;
        for m in &modes {
            let na = m.a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = m.b.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nk = m.k.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
            sup_v += na + nb;
            sup_dv += 2.0 * std::f64::consts::PI * nk * (na + nb);
        }
        let map = TorusMap {
            linear,
            linear_f64,
            linear_inv_f64,
            modes,
            offset,
            epsilon,
            sup_v,
            sup_dv,
            spectrum,
        };
        map.check_margin()?;
        Ok(map)
    }

    /// Invertibility margin: `ε · sup‖Dv‖ < 0.5 · min_{χ≠0} |e^χ − 1|`.
    fn check_margin(&self) -> Result<()> {
        if self.epsilon == 0.0 || self.modes.is_empty() {
            return Ok(());
        }
        let mut gap = f64::INFINITY;
        for c in &self.spectrum.lyapunov {
            if !c.exactly_zero {
                gap = gap.min((c.mid().exp() - 1.0).abs());
            }
        }
        if !gap.is_finite() {
            return Err(Error::Precondition(
                "perturbed map needs a linear part with nonzero exponents".into(),
            ));
        }
        let margin = self.epsilon * self.sup_dv;
        if margin >= 0.5 * gap {
            return Err(Error::Precondition(format!(
                "invertibility margin violated: ε·sup‖Dv‖ = {margin:.3e} ≥ 0.5·gap = {:.3e}",
                0.5 * gap
            )));
        }
        Ok(())
    }

    pub fn linear(&self) -> &IntMatrix {
        &self.linear
    }

    pub fn linear_f64(&self) -> &DMatrix<f64> {
        &self.linear_f64
    }

    pub fn linear_inv_f64(&self) -> &DMatrix<f64> {
        &self.linear_inv_f64
    }

    pub fn spectrum(&self) -> &CertifiedSpectrum {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.linear.dim()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sup_v(&self) -> f64 {
        self.sup_v
    }

    pub fn sup_dv(&self) -> f64 {
        self.sup_dv
    }

    pub fn is_linear(&self) -> bool {
        self.epsilon == 0.0 || (self.modes.is_empty() && self.offset.norm() == 0.0)
    }

    /// The displacement `v(x)` (with the origin offset applied).
    pub fn displacement(&self, x: &DVector<f64>) -> DVector<f64> {
        let d = self.dim();
        let mut v = self.offset.clone();
        for m in &self.modes {
            let theta = 2.0
                * std::f64::consts::PI
                * m.k
                    .iter()
                    .zip(x.iter())
                    .map(|(&k, &xi)| k as f64 * xi)
                    .sum::<f64>();
            let (s, c) = theta.sin_cos();
            for i in 0..d {
                v[i] += m.a[i] * c + m.b[i] * s;
            }
        }
        v
    }

    /// Lift `F(x) = Lx + ε·v(x)`.
    pub fn lift(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = &self.linear_f64 * x;
        if self.epsilon != 0.0 {
            y += self.displacement(x) * self.epsilon;
        }
        y
    }

    /// Torus evaluation: lift then reduce mod `Z^d` into `[0, 1)^d`.
    pub fn eval_torus(&self, x: &DVector<f64>) -> DVector<f64> {
        reduce_mod_1(&self.lift(x))
    }

    /// Jacobian `L + ε·Dv(x)`.
    pub fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut j = self.linear_f64.clone();
        if self.epsilon == 0.0 {
            return j;
        }
        let d = self.dim();
        for m in &self.modes {
            let theta = 2.0
                * std::f64::consts::PI
                * m.k
                    .iter()
                    .zip(x.iter())
                    .map(|(&k, &xi)| k as f64 * xi)
                    .sum::<f64>();
            let (s, c) = theta.sin_cos();
            for i in 0..d {
                let gi = self.epsilon * (-m.a[i] * s + m.b[i] * c) * 2.0 * std::f64::consts::PI;
                for jj in 0..d {
                    j[(i, jj)] += gi * m.k[jj] as f64;
                }
            }
        }
        j
    }

    /// Newton inversion of the lift: the `x` with `F(x) = y`, seeded at
    /// `L⁻¹ y`, quadratically convergent under the margin.
    pub fn lift_inverse(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        let mut x = &self.linear_inv_f64 * y;
        if self.is_linear() {
            return Ok(x);
        }
        for _ in 0..60 {
            let r = self.lift(&x) - y;
            if r.norm() < 1e-14 {
                return Ok(x);
            }
            let j = self.jacobian(&x);
            let step = j
                .lu()
                .solve(&r)
                .ok_or_else(|| Error::Numerical("singular Jacobian in lift inversion".into()))?;
            x -= &step;
            if step.norm() < 1e-15 {
                return Ok(x);
            }
        }
        let r = (self.lift(&x) - y).norm();
        if r < 1e-12 {
            Ok(x)
        } else {
            Err(Error::Numerical(format!(
                "lift inversion stalled with residual {r:.3e}"
            )))
        }
    }

    /// Torus-level inverse `f⁻¹(x)`.
    pub fn eval_torus_inverse(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        // any lift preimage reduces to the right torus point
        Ok(reduce_mod_1(&self.lift_inverse(x)?))
    }

    /// Parse the map config format:
    /// `{"linear": rows, "epsilon": e, "modes": [{"k": [...], "a": [...],
    /// "b": [...]}], "normalize_origin": bool?}`.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("map config must be a JSON object".into()))?;
        let linear = IntMatrix::from_json(
            obj.get("linear")
                .ok_or_else(|| Error::Parse("map config missing \"linear\"".into()))?,
        )?;
        let epsilon = obj
            .get("epsilon")
            .map(|e| {
                e.as_f64()
                    .ok_or_else(|| Error::Parse("\"epsilon\" must be a number".into()))
            })
            .transpose()?
            .unwrap_or(0.0);
        let mut modes = Vec::new();
        if let Some(ms) = obj.get("modes") {
            let arr = ms
                .as_array()
                .ok_or_else(|| Error::Parse("\"modes\" must be an array".into()))?;
            for (i, m) in arr.iter().enumerate() {
                let mo = m
                    .as_object()
                    .ok_or_else(|| Error::Parse(format!("mode {i} must be an object")))?;
                let k: Vec<i64> = parse_num_array(mo.get("k"), "k", i)?
                    .iter()
                    .map(|x| *x as i64)
                    .collect();
                let a = parse_num_array(mo.get("a"), "a", i)?;
                let b = parse_num_array(mo.get("b"), "b", i)?;
                modes.push(FourierMode { k, a, b });
            }
        }
        let normalize = obj
            .get("normalize_origin")
            .and_then(|x| x.as_bool())
            .unwrap_or(true);
        Self::build(linear, modes, epsilon, normalize)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "linear": self.linear.to_json(),
            "epsilon": self.epsilon,
            "modes": self.modes.iter().map(|m| serde_json::json!({
                "k": m.k,
                "a": m.a,
                "b": m.b,
            })).collect::<Vec<_>>(),
        })
    }
}

fn parse_num_array(
    v: Option<&serde_json::Value>,
    name: &str,
    idx: usize,
) -> Result<Vec<f64>> {
    let arr = v
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Parse(format!("mode {idx} missing array \"{name}\"")))?;
    arr.iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| Error::Parse(format!("mode {idx}: \"{name}\" entries must be numbers")))
        })
        .collect()
}

/// Reduce a lift point into `[0, 1)^d`.
pub fn reduce_mod_1(x: &DVector<f64>) -> DVector<f64> {
    x.map(|c| {
        let f = c - c.floor();
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    })
}

/// Distance on the torus (max metric over coordinates, accounting wrap).
pub fn torus_distance(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = (x - y).rem_euclid(1.0);
            d.min(1.0 - d)
        })
        .fold(0.0, f64::max)
}

/// Deterministic Latin-hypercube style sample of the torus with
/// `count` points; stratified per coordinate, seeded.
pub fn stratified_sample(d: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(d);
    for _ in 0..d {
        let mut p: Vec<usize> = (0..count).collect();
        p.shuffle(&mut rng);
        perms.push(p);
    }
    (0..count)
        .map(|i| {
            DVector::from_fn(d, |j, _| {
                (perms[j][i] as f64 + rng.random_range(0.0..1.0)) / count as f64
            })
        })
        .collect()
}

/// Number of residual-grid samples used by the solvers: `64^min(d,3)`.
pub fn residual_grid_size(d: usize) -> usize {
    64usize.pow(d.min(3) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::IntPoly;

    fn cat_map() -> IntMatrix {
        IntMatrix::from_rows_i64(&[&[2, 1], &[1, 1]])
    }

    fn worked_example_d4() -> IntMatrix {
        IntMatrix::companion(&IntPoly::from_i64(&[1, -3, 3, -3, 1])).unwrap()
    }

    fn single_mode(d: usize, k0: usize) -> FourierMode {
        let mut k = vec![0i64; d];
        k[k0] = 1;
        FourierMode {
            k,
            a: vec![0.0; d],
            b: {
                let mut b = vec![0.0; d];
                b[0] = 1.0;
                b
            },
        }
    }

    #[test]
    fn lift_of_linear_map_is_exact() {
        let f = TorusMap::new(cat_map(), vec![], 0.0).unwrap();
        let x = DVector::from_vec(vec![0.25, 0.5]);
        let y = f.lift(&x);
        assert_eq!(y[0], 1.0);
        assert_eq!(y[1], 0.75);
        assert_eq!(f.lift(&DVector::zeros(2)).norm(), 0.0);
    }

    #[test]
    fn origin_is_fixed_after_normalization() {
        // a cosine mode has v(0) ≠ 0; the constructor must subtract it
        let mode = FourierMode {
            k: vec![1, 0],
            a: vec![0.3, -0.2],
            b: vec![0.0, 0.0],
        };
        let f = TorusMap::new(cat_map(), vec![mode], 0.01).unwrap();
        assert!(f.lift(&DVector::zeros(2)).norm() < 1e-15);
    }

    #[test]
    fn periodicity_of_lift() {
        // F(x + n) = F(x) + L n
        let f = TorusMap::new(cat_map(), vec![single_mode(2, 0)], 0.01).unwrap();
        let x = DVector::from_vec(vec![0.3, 0.7]);
        let n = DVector::from_vec(vec![2.0, -1.0]);
        let lhs = f.lift(&(&x + &n));
        let rhs = f.lift(&x) + f.linear_f64() * n;
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn lift_matches_exact_evaluation_at_special_point() {
        // x = (1/4, 0) with k = (1, 0): θ = π/2, sin = 1, cos = 0 exactly
        let mode = FourierMode {
            k: vec![1, 0],
            a: vec![0.0, 0.0],
            b: vec![1.0, 0.5],
        };
        let f = TorusMap::new(cat_map(), vec![mode], 0.01).unwrap();
        let x = DVector::from_vec(vec![0.25, 0.0]);
        let y = f.lift(&x);
        // L·x = (0.5, 0.25); ε·v = 0.01·(1, 0.5)
        assert!((y[0] - 0.51).abs() < 1e-14);
        assert!((y[1] - 0.255).abs() < 1e-14);
    }

    #[test]
    fn inverse_round_trip() {
        let f = TorusMap::new(worked_example_d4(), vec![single_mode(4, 0)], 0.01).unwrap();
        let x = DVector::from_vec(vec![0.1, 0.2, 0.3, 0.4]);
        let y = f.lift(&x);
        let back = f.lift_inverse(&y).unwrap();
        assert!((back - x).norm() < 1e-12);
    }

    #[test]
    fn margin_rejects_large_perturbation() {
        let r = TorusMap::new(cat_map(), vec![single_mode(2, 0)], 0.5);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn json_round_trip() {
        let f = TorusMap::new(cat_map(), vec![single_mode(2, 1)], 0.02).unwrap();
        let j = f.to_json();
        let g = TorusMap::from_json(&j).unwrap();
        let x = DVector::from_vec(vec![0.3, 0.9]);
        assert!((f.lift(&x) - g.lift(&x)).norm() < 1e-15);
    }

    #[test]
    fn stratified_sample_is_deterministic() {
        let a = stratified_sample(3, 64, 7);
        let b = stratified_sample(3, 64, 7);
        assert_eq!(a.len(), 64);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x, y);
        }
    }
}
