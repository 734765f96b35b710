//! The integer commutant of an automorphism, its unit group, the
//! logarithmic embedding, and subgroup-level procedures: hyperbolicity
//! detection, cone searches for center-dominating elements, rank bounds for
//! hyperbolic-free subgroups, and bounded subgroups approximating the
//! center functional.
//!
//! Floats propose, exact algebra disposes: every matrix identity claimed
//! here (commutation, unit determinants, word identities, hyperbolicity) is
//! verified in exact integer arithmetic; binary64 only steers searches and
//! carries the reported functional values.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::{integer_kernel_of_rows, IntMatrix, LatticeBasis, RatMatrix};
use crate::polyalg::{cyclotomic, euler_phi, unit_circle_pairs};
use crate::spectrum::{
    classify, has_property_p, no_three_same_modulus, projectors, CertifiedSpectrum,
    SpectralProjectors,
};
use crate::{Error, Result};

/// Evaluates Lyapunov functionals of matrices commuting with `L`, using
/// orthonormal bases of the spectral projector ranges of `L`.
pub struct FunctionalFrame {
    pub spectrum: CertifiedSpectrum,
    pub projectors: SpectralProjectors,
    /// Orthonormal basis of each exponent class, `d × k_c`.
    bases: Vec<DMatrix<f64>>,
    /// Index (into `spectrum.lyapunov`) excluded from Λ coordinates: the
    /// center class when present, otherwise the last class.
    pub excluded_class: usize,
}

/// Per-class functional values of a commuting matrix.
#[derive(Clone, Debug)]
pub struct FunctionalValues {
    /// One value per exponent class of `L`, in `spectrum.lyapunov` order.
    pub per_class: Vec<f64>,
    /// Class dimensions, same order.
    pub dims: Vec<usize>,
    /// Heuristic error bound on each value (residual- and norm-based).
    pub error_bound: f64,
}

impl FunctionalValues {
    /// `Σ_j d_j · χ_j`, which vanishes on units (hyperplane invariant).
    pub fn weighted_sum(&self) -> f64 {
        self.per_class
            .iter()
            .zip(&self.dims)
            .map(|(v, d)| v * *d as f64)
            .sum()
    }
}

impl FunctionalFrame {
    pub fn new(l: &IntMatrix) -> Result<Self> {
        let spectrum = classify(l)?;
        let projectors = projectors(l, &spectrum)?;
        let mut bases = Vec::with_capacity(spectrum.lyapunov.len());
        for (class, p) in spectrum.lyapunov.iter().zip(&projectors.projectors) {
            bases.push(orthonormal_range(p, class.multiplicity)?);
        }
        let excluded_class = spectrum
            .center_class()
            .unwrap_or(spectrum.lyapunov.len() - 1);
        Ok(FunctionalFrame {
            spectrum,
            projectors,
            bases,
            excluded_class,
        })
    }

    pub fn class_count(&self) -> usize {
        self.spectrum.lyapunov.len()
    }

    /// Number of Λ coordinates, `r₁ + r₂ − 1` for simple spectra.
    pub fn lambda_dim(&self) -> usize {
        self.class_count() - 1
    }

    /// All per-class functional values of a commuting matrix.
    pub fn values(&self, m: &IntMatrix) -> Result<FunctionalValues> {
        let mf = m.to_f64();
        let mut per_class = Vec::with_capacity(self.class_count());
        let mut dims = Vec::with_capacity(self.class_count());
        for (class, q) in self.spectrum.lyapunov.iter().zip(&self.bases) {
            let b = q.transpose() * &mf * q;
            let det = b.lu().determinant();
            if det == 0.0 || !det.is_finite() {
                return Err(Error::Numerical(
                    "restriction of commuting matrix is numerically singular".into(),
                ));
            }
            per_class.push(det.abs().ln() / class.multiplicity as f64);
            dims.push(class.multiplicity);
        }
        let max_resid = self
            .projectors
            .commutation_residuals
            .iter()
            .chain(&self.projectors.idempotency_residuals)
            .fold(self.projectors.sum_residual, |a, b| a.max(*b));
        let scale = 1.0 + mf.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let error_bound = 1e3 * f64::EPSILON * scale + 10.0 * max_resid;
        Ok(FunctionalValues {
            per_class,
            dims,
            error_bound,
        })
    }

    /// Λ-image: per-class values with the excluded class dropped.
    pub fn lambda(&self, m: &IntMatrix) -> Result<Vec<f64>> {
        let v = self.values(m)?;
        Ok(v
            .per_class
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.excluded_class)
            .map(|(_, x)| *x)
            .collect())
    }
}

/// Orthonormal basis of the range of a rank-`k` projector.
fn orthonormal_range(p: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    let svd = p.clone().svd(true, false);
    let u = svd.u.as_ref().expect("requested U");
    let mut order: Vec<usize> = (0..p.nrows()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    if svd.singular_values[order[k - 1]] < 1e-6 {
        return Err(Error::Numerical(
            "projector rank deficient against class multiplicity".into(),
        ));
    }
    let cols: Vec<_> = order[..k]
        .iter()
        .map(|&i| u.column(i).into_owned())
        .collect();
    Ok(DMatrix::from_columns(&cols))
}

/// Lyapunov functional values of `M` on the eigenclasses of `L`.
///
/// Hypotheses from the bijection lemma are enforced: `L` irreducible with a
/// 2-dimensional isometric center and no three eigenvalues of the same
/// modulus; `M` must commute exactly.
pub fn functional_of_element(l: &IntMatrix, m: &IntMatrix) -> Result<FunctionalValues> {
    if !l.commutes_with(m) {
        return Err(Error::Precondition(
            "matrix does not commute with the automorphism".into(),
        ));
    }
    let rep = has_property_p(l)?;
    if !rep.irreducible {
        return Err(Error::Precondition(
            "hypothesis failed: characteristic polynomial is reducible".into(),
        ));
    }
    let spec = classify(l)?;
    if spec.center_dim != 2 {
        return Err(Error::Precondition(format!(
            "hypothesis failed: center dimension is {}, need 2",
            spec.center_dim
        )));
    }
    if !no_three_same_modulus(l)? {
        return Err(Error::Precondition(
            "hypothesis failed: three eigenvalues share a modulus".into(),
        ));
    }
    let frame = FunctionalFrame::new(l)?;
    frame.values(m)
}

/// Multiplicative status of a discovered unit relative to the generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dependence {
    /// Selected as a multiplicatively independent generator.
    Generator,
    /// Λ-image has near-zero norm (±I and other finite-order units).
    Torsion,
    /// Dependent, confirmed by an exact matrix-word identity.
    Confirmed,
    /// Λ-image lies in the generator span numerically, but no short exact
    /// word identity was found within the cap.
    Unconfirmed,
}

/// A discovered unit of the commutant.
#[derive(Clone, Debug)]
pub struct Unit {
    pub matrix: IntMatrix,
    pub det: i8,
    /// Λ-image (center class excluded).
    pub lambda: Vec<f64>,
    /// All per-class functional values, `spectrum.lyapunov` order.
    pub full_values: Vec<f64>,
    pub hyperbolic: bool,
    pub finite_order: bool,
    /// Human-readable name when the unit matches a canonical expression.
    pub label: String,
    pub dependence: Dependence,
}

/// The integer commutant `{X : XL = LX}` with discovered units.
pub struct CommutantLattice {
    pub ambient: IntMatrix,
    pub lattice: LatticeBasis,
    pub basis_matrices: Vec<IntMatrix>,
    pub units: Vec<Unit>,
    /// Indices into `units` of the reduced multiplicatively independent set.
    pub generators: Vec<usize>,
    pub achieved_rank: usize,
}

/// HNF basis of the integer solutions of `XL = LX`, as a lattice in `Z^{d²}`.
pub fn commutant_basis(l: &IntMatrix) -> Result<CommutantLattice> {
    let d = l.dim();
    let n = d * d;
    // rows indexed by output entry (i,j), columns by unknown entry (a,b):
    // coefficient of X[a,b] in (XL − LX)[i,j] is L[b,j]·δ(a,i) − L[i,a]·δ(b,j)
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..d {
        for j in 0..d {
            let mut row = vec![BigInt::zero(); n];
            for b in 0..d {
                row[i * d + b] += l.get(b, j);
            }
            for a in 0..d {
                row[a * d + j] -= l.get(i, a);
            }
            rows.push(row);
        }
    }
    let lattice = integer_kernel_of_rows(&rows, n);
    let basis_matrices: Vec<IntMatrix> = lattice
        .basis
        .iter()
        .map(|v| IntMatrix::new(d, v.clone()).expect("kernel vector has d² entries"))
        .collect();
    for m in &basis_matrices {
        debug_assert!(m.commutes_with(l), "kernel member must commute");
    }
    Ok(CommutantLattice {
        ambient: l.clone(),
        lattice,
        basis_matrices,
        units: vec![],
        generators: vec![],
        achieved_rank: 0,
    })
}

/// Check that `I, L, …, L^{d−1}` lie in the span of the commutant basis.
pub fn powers_in_span(cl: &CommutantLattice) -> bool {
    let d = cl.ambient.dim();
    let mut p = IntMatrix::identity(d);
    for _ in 0..d {
        if !cl.lattice.contains(p.entries()) {
            return false;
        }
        p = p.mul(&cl.ambient);
    }
    true
}

#[derive(Clone, Debug)]
pub struct UnitSearchOptions {
    /// Residual threshold below which a Λ-image is proposed as dependent.
    pub dependence_tol: f64,
    /// Word-length cap for exact dependence identities.
    pub identity_word_cap: i64,
}

impl Default for UnitSearchOptions {
    fn default() -> Self {
        UnitSearchOptions {
            dependence_tol: 1e-6,
            identity_word_cap: 8,
        }
    }
}

/// Enumerate commutant elements with basis coordinates in
/// `[−radius, radius]^rank`, keep the units (|det| = 1), reduce them
/// multiplicatively, and report the achieved rank.
///
/// This is bounded enumeration, not a fundamental-unit algorithm; the rank
/// it reports is the rank achieved within the box, never a completeness
/// claim.
pub fn unit_search(cl: &mut CommutantLattice, radius: i64) -> Result<()> {
    unit_search_with(cl, radius, &UnitSearchOptions::default())
}

pub fn unit_search_with(
    cl: &mut CommutantLattice,
    radius: i64,
    opts: &UnitSearchOptions,
) -> Result<()> {
    if radius < 0 {
        return Err(Error::Precondition("radius must be non-negative".into()));
    }
    let l = cl.ambient.clone();
    let frame = FunctionalFrame::new(&l)?;
    let k = cl.basis_matrices.len();
    let d = l.dim();
    let basis_f64: Vec<DMatrix<f64>> = cl.basis_matrices.iter().map(|m| m.to_f64()).collect();

    let mut units: Vec<Unit> = Vec::new();
    if radius == 0 {
        // only ±I are reachable; emit them when they lie in the lattice
        for sign in [1i64, -1] {
            let m = if sign == 1 {
                IntMatrix::identity(d)
            } else {
                IntMatrix::identity(d).neg()
            };
            if cl.lattice.contains(m.entries()) {
                let det = m.det();
                units.push(build_unit(&l, &frame, m, &det)?);
            }
        }
    } else {
        let mut coords = vec![-radius; k];
        loop {
            if coords.iter().any(|&c| c != 0) {
                // float screen on the determinant before exact confirmation
                let mut mf = DMatrix::zeros(d, d);
                for (c, b) in coords.iter().zip(&basis_f64) {
                    if *c != 0 {
                        mf += b * *c as f64;
                    }
                }
                let fdet = mf.lu().determinant().abs();
                if !fdet.is_finite() || (0.01..=100.0).contains(&fdet) {
                    let coords_big: Vec<BigInt> =
                        coords.iter().map(|&c| BigInt::from(c)).collect();
                    let entries = cl.lattice.vector_from(&coords_big);
                    let m = IntMatrix::new(d, entries)?;
                    let det = m.det();
                    if det.clone().abs().is_one() {
                        units.push(build_unit(&l, &frame, m, &det)?);
                    }
                }
            }
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                coords[i] += 1;
                if coords[i] <= radius {
                    break;
                }
                coords[i] = -radius;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }

    // deterministic listing order: by height, then entries
    units.sort_by(|a, b| {
        let ha = a.matrix.max_abs_entry();
        let hb = b.matrix.max_abs_entry();
        ha.cmp(&hb)
            .then_with(|| a.matrix.entries().cmp(b.matrix.entries()))
    });
    units.dedup_by(|a, b| a.matrix == b.matrix);

    let lambda_dim = frame.lambda_dim();

    // generator selection: greedy by rank growth, preferring canonically
    // labeled units (L first, then L±I and L⁻¹) so downstream words read
    // naturally and deterministically
    let mut order: Vec<usize> = (0..units.len()).collect();
    order.sort_by(|&a, &b| {
        let pa = label_priority(&units[a].label);
        let pb = label_priority(&units[b].label);
        pa.cmp(&pb).then_with(|| {
            units[a]
                .matrix
                .max_abs_entry()
                .cmp(&units[b].matrix.max_abs_entry())
                .then_with(|| units[a].matrix.entries().cmp(units[b].matrix.entries()))
        })
    });
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        let lam = &units[i].lambda;
        let norm: f64 = lam.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < opts.dependence_tol {
            continue; // torsion (±I and other finite-order units)
        }
        let kept_lams: Vec<Vec<f64>> = kept.iter().map(|&j| units[j].lambda.clone()).collect();
        if residual_against_span(lam, &kept_lams) > opts.dependence_tol {
            kept.push(i);
        }
        if kept.len() == lambda_dim {
            break;
        }
    }
    kept.sort();

    // dependence confirmation for the rest: floats propose the integer
    // combination, the exact word identity disposes (cap per options)
    for i in 0..units.len() {
        if kept.contains(&i) {
            continue;
        }
        let norm: f64 = units[i].lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < opts.dependence_tol {
            units[i].dependence = Dependence::Torsion;
            continue;
        }
        units[i].dependence =
            if confirm_word_identity(&units[i], &kept, &units, opts.identity_word_cap) {
                Dependence::Confirmed
            } else {
                Dependence::Unconfirmed
            };
    }
    for &i in &kept {
        units[i].dependence = Dependence::Generator;
    }

    // achieved rank: numerical rank of all unit Λ-images
    let achieved_rank = if units.is_empty() || lambda_dim == 0 {
        0
    } else {
        let rows: Vec<f64> = units
            .iter()
            .flat_map(|u| u.lambda.iter().copied())
            .collect();
        let m = DMatrix::from_row_slice(units.len(), lambda_dim, &rows);
        m.svd(false, false)
            .singular_values
            .iter()
            .filter(|&&s| s > opts.dependence_tol)
            .count()
    };

    cl.units = units;
    cl.generators = kept;
    cl.achieved_rank = achieved_rank;
    Ok(())
}

fn label_priority(label: &str) -> u8 {
    match label {
        "L" => 0,
        "L - I" | "L + I" | "L^-1" | "-L" => 1,
        _ => 2,
    }
}

fn build_unit(
    l: &IntMatrix,
    frame: &FunctionalFrame,
    m: IntMatrix,
    det: &BigInt,
) -> Result<Unit> {
    debug_assert!(m.commutes_with(l));
    let vals = frame.values(&m)?;
    let lambda: Vec<f64> = vals
        .per_class
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != frame.excluded_class)
        .map(|(_, x)| *x)
        .collect();
    let hyperbolic = is_hyperbolic_exact(&m)?;
    let finite_order = is_finite_order_exact(&m)?;
    let label = label_for(l, &m);
    Ok(Unit {
        det: if det.is_one() { 1 } else { -1 },
        matrix: m,
        lambda,
        full_values: vals.per_class,
        hyperbolic,
        finite_order,
        label,
        dependence: Dependence::Unconfirmed,
    })
}

fn label_for(l: &IntMatrix, m: &IntMatrix) -> String {
    let d = l.dim();
    let eye = IntMatrix::identity(d);
    if *m == eye {
        return "I".into();
    }
    if *m == eye.neg() {
        return "-I".into();
    }
    if m == l {
        return "L".into();
    }
    if *m == l.neg() {
        return "-L".into();
    }
    if *m == l.sub(&eye) {
        return "L - I".into();
    }
    if *m == l.add(&eye) {
        return "L + I".into();
    }
    if let Ok(inv) = l.inverse_unimodular() {
        if *m == inv {
            return "L^-1".into();
        }
    }
    String::new()
}

/// Euclidean residual of `v` after projecting onto the span of `basis`.
fn residual_against_span(v: &[f64], basis: &[Vec<f64>]) -> f64 {
    if basis.is_empty() {
        return v.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    let n = v.len();
    let a = DMatrix::from_fn(n, basis.len(), |i, j| basis[j][i]);
    let b = nalgebra::DVector::from_column_slice(v);
    let svd = a.clone().svd(true, true);
    match svd.solve(&b, 1e-12) {
        Ok(x) => (&b - a * x).norm(),
        Err(_) => f64::INFINITY,
    }
}

/// Exact confirmation that a unit is `±` a short word in the kept units.
fn confirm_word_identity(unit: &Unit, kept: &[usize], units: &[Unit], word_cap: i64) -> bool {
    if kept.is_empty() {
        return false;
    }
    let n = unit.lambda.len();
    let a = DMatrix::from_fn(n, kept.len(), |i, j| units[kept[j]].lambda[i]);
    let b = nalgebra::DVector::from_column_slice(&unit.lambda);
    let svd = a.svd(true, true);
    let Ok(x) = svd.solve(&b, 1e-12) else {
        return false;
    };
    let coeffs: Vec<i64> = x.iter().map(|c| c.round() as i64).collect();
    if coeffs.iter().map(|c| c.abs()).sum::<i64>() > word_cap {
        return false;
    }
    let d = unit.matrix.dim();
    let mut prod = IntMatrix::identity(d);
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let base = if c > 0 {
            units[kept[j]].matrix.clone()
        } else {
            match units[kept[j]].matrix.inverse_unimodular() {
                Ok(inv) => inv,
                Err(_) => return false,
            }
        };
        for _ in 0..c.abs() {
            prod = prod.mul(&base);
        }
    }
    prod == unit.matrix || prod.neg() == unit.matrix
}

/// Exact hyperbolicity: no eigenvalue on the unit circle, decided from the
/// squarefree characteristic polynomial (circle pairs and ±1 roots).
pub fn is_hyperbolic_exact(m: &IntMatrix) -> Result<bool> {
    let h = m.char_poly().squarefree_part();
    if !h.eval_int(&BigInt::one()).is_zero() && !h.eval_int(&BigInt::from(-1)).is_zero() {
        Ok(unit_circle_pairs(&h)? == 0)
    } else {
        Ok(false)
    }
}

/// Exact finite-order test (Kronecker): all eigenvalues are roots of unity
/// iff the squarefree characteristic polynomial is a product of cyclotomics.
pub fn is_finite_order_exact(m: &IntMatrix) -> Result<bool> {
    let mut h = m.char_poly().squarefree_part();
    let d = h.deg();
    let cap = 3 * d.max(1) * d.max(1);
    for k in 1..=cap {
        if h.deg() == 0 {
            break;
        }
        if euler_phi(k) > d {
            continue;
        }
        let phi = cyclotomic(k);
        loop {
            let g = h.gcd(&phi);
            if g.deg() == 0 {
                break;
            }
            h = h.div_exact(&g).expect("gcd divides");
        }
    }
    Ok(h.deg() == 0)
}

/// Spec-level hyperbolicity predicate for a commuting element. The decision
/// is always exact; floating functional values are diagnostics only.
pub fn is_hyperbolic_element(l: &IntMatrix, gamma: &IntMatrix) -> Result<bool> {
    if !l.commutes_with(gamma) {
        return Err(Error::Precondition(
            "element does not commute with the automorphism".into(),
        ));
    }
    is_hyperbolic_exact(gamma)
}

/// Result of the cone search: an explicit product of units whose unstable
/// space is the center of `L`.
#[derive(Clone, Debug)]
pub struct ConeElement {
    pub matrix: IntMatrix,
    /// Word over the discovered unit labels.
    pub word: String,
    /// Exponent vector over the generators used.
    pub exponents: Vec<i64>,
    /// Functional values on the classes of `L`.
    pub values: Vec<f64>,
    /// `log |det(γ|E_L^c)|`, must be > 0.
    pub center_log_det: f64,
    /// `|det(γ|E_γ^u)| / |det(γ|E_L^c)|`, equal to 1 when the unstable
    /// space is exactly the center.
    pub domination_ratio: f64,
}

/// Search integer combinations of the generator Λ-images for an element
/// with every non-center functional negative (so `E_γ^u = E_L^c`).
/// `Ok(None)` means the box was exhausted, expected under deficient rank.
pub fn cone_search_center_dominating(
    cl: &CommutantLattice,
    max_box: i64,
) -> Result<Option<ConeElement>> {
    let l = &cl.ambient;
    let spec = classify(l)?;
    if spec.center_dim != 2 {
        return Err(Error::Precondition(format!(
            "cone search requires a 2-dimensional center, found {}",
            spec.center_dim
        )));
    }
    let frame = FunctionalFrame::new(l)?;
    let center = frame.excluded_class;
    let gens: Vec<&Unit> = cl.generators.iter().map(|&i| &cl.units[i]).collect();
    if gens.is_empty() {
        return Ok(None);
    }
    let k = gens.len();
    let margin = 1e-9;
    for boxsize in 1..=max_box {
        let mut coords = vec![-boxsize; k];
        loop {
            // only the new shell, so smaller boxes win deterministically
            if coords.iter().any(|&c| c.abs() == boxsize) {
                let mut vals = vec![0.0f64; frame.class_count()];
                for (c, g) in coords.iter().zip(&gens) {
                    for (v, gv) in vals.iter_mut().zip(&g.full_values) {
                        *v += *c as f64 * gv;
                    }
                }
                let ok = vals
                    .iter()
                    .enumerate()
                    .all(|(i, v)| i == center || *v < -margin);
                if ok {
                    if let Some(elem) = verify_cone_candidate(l, &frame, &gens, &coords)? {
                        return Ok(Some(elem));
                    }
                }
            }
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                coords[i] += 1;
                if coords[i] <= boxsize {
                    break;
                }
                coords[i] = -boxsize;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }
    Ok(None)
}

fn verify_cone_candidate(
    l: &IntMatrix,
    frame: &FunctionalFrame,
    gens: &[&Unit],
    coords: &[i64],
) -> Result<Option<ConeElement>> {
    let d = l.dim();
    let mut gamma = IntMatrix::identity(d);
    for (g, &c) in gens.iter().zip(coords) {
        if c == 0 {
            continue;
        }
        let base = if c > 0 {
            g.matrix.clone()
        } else {
            g.matrix.inverse_unimodular()?
        };
        for _ in 0..c.abs() {
            gamma = gamma.mul(&base);
        }
    }
    if !gamma.commutes_with(l) {
        return Err(Error::Numerical("cone candidate stopped commuting".into()));
    }
    // certified magnitude structure: exactly one expanding class of
    // dimension 2 and no modulus-1 eigenvalues
    let gspec = classify(&gamma)?;
    let expanding_dim: usize = gspec
        .lyapunov
        .iter()
        .filter(|c| !c.exactly_zero && c.lo > 0.0)
        .map(|c| c.multiplicity)
        .sum();
    if expanding_dim != 2 || gspec.center_dim != 0 {
        return Ok(None);
    }
    // the expanding plane must be the center of L: the frame value on the
    // center class is the positive one
    let vals = frame.values(&gamma)?;
    let center = frame.excluded_class;
    if vals.per_class[center] <= 0.0 {
        return Ok(None);
    }
    for (i, v) in vals.per_class.iter().enumerate() {
        if i != center && *v >= 0.0 {
            return Ok(None);
        }
    }
    let center_dim = frame.spectrum.lyapunov[center].multiplicity as f64;
    let center_log_det = vals.per_class[center] * center_dim;
    // E_γ^u = E_L^c ⟹ the two determinants agree; report the ratio
    let unstable_log_det: f64 = vals
        .per_class
        .iter()
        .zip(&vals.dims)
        .filter(|(v, _)| **v > 0.0)
        .map(|(v, dd)| v * *dd as f64)
        .sum();
    let domination_ratio = (unstable_log_det - center_log_det).exp();
    let word = word_string(gens, coords);
    Ok(Some(ConeElement {
        matrix: gamma,
        word,
        exponents: coords.to_vec(),
        values: vals.per_class,
        center_log_det,
        domination_ratio,
    }))
}

fn word_string(gens: &[&Unit], coords: &[i64]) -> String {
    let mut parts = Vec::new();
    for (idx, (g, &c)) in gens.iter().zip(coords).enumerate() {
        if c == 0 {
            continue;
        }
        let name = if g.label.is_empty() {
            format!("u{idx}")
        } else if g.label.contains(' ') {
            format!("({})", g.label)
        } else {
            g.label.clone()
        };
        if c == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{c}"));
        }
    }
    if parts.is_empty() {
        "I".into()
    } else {
        parts.join(" * ")
    }
}

/// Report of the hyperbolic-free subgroup analysis.
#[derive(Clone, Debug)]
pub struct NoHyperbolicReport {
    /// A hyperbolic element found among sampled words, if any.
    pub hyperbolic_witness: Option<(IntMatrix, String)>,
    /// Max deviation of the exponent pairing `μ_j(γ) + χ_j(γ)` over samples.
    pub pairing_deviation: f64,
    /// Multiplicative rank achieved by the sampled Λ-images.
    pub sampled_rank: usize,
    /// The bound `(d−2)/2`.
    pub rank_bound: usize,
    pub words_sampled: usize,
}

/// Sample words of length ≤ `word_len` in commuting generators; report a
/// hyperbolic witness or verify the pairing `μ_j = −χ_j` and the rank bound.
pub fn no_hyperbolic_analysis(
    l: &IntMatrix,
    generators: &[IntMatrix],
    word_len: i64,
) -> Result<NoHyperbolicReport> {
    for (i, g) in generators.iter().enumerate() {
        if !g.commutes_with(l) {
            return Err(Error::Precondition(format!(
                "generator {i} does not commute with the automorphism"
            )));
        }
        for h in &generators[i + 1..] {
            if !g.commutes_with(h) {
                return Err(Error::Precondition(
                    "generators do not commute pairwise".into(),
                ));
            }
        }
    }
    let spec = classify(l)?;
    if spec.center_dim != 2 {
        return Err(Error::Precondition(format!(
            "analysis requires a 2-dimensional center, found {}",
            spec.center_dim
        )));
    }
    let frame = FunctionalFrame::new(l)?;
    // pair each positive class with its mirror (classes sorted decreasing)
    let n_classes = frame.class_count();
    let center = frame.excluded_class;
    let positive: Vec<usize> = (0..n_classes)
        .filter(|&i| i != center && frame.spectrum.lyapunov[i].lo > 0.0)
        .collect();
    let mirror: Vec<usize> = positive.iter().map(|&i| n_classes - 1 - i).collect();

    let d = l.dim();
    let k = generators.len();
    let gen_inv: Vec<IntMatrix> = generators
        .iter()
        .map(|g| g.inverse_unimodular())
        .collect::<Result<_>>()?;

    let mut pairing_dev = 0.0f64;
    let mut lambda_rows: Vec<Vec<f64>> = Vec::new();
    let mut words_sampled = 0usize;
    let mut witness = None;

    let mut coords = vec![-word_len; k];
    'outer: loop {
        let total: i64 = coords.iter().map(|c| c.abs()).sum();
        let nonzero = coords.iter().any(|&c| c != 0);
        if nonzero && total <= word_len {
            let mut gamma = IntMatrix::identity(d);
            for (j, &c) in coords.iter().enumerate() {
                let base = if c >= 0 { &generators[j] } else { &gen_inv[j] };
                for _ in 0..c.abs() {
                    gamma = gamma.mul(base);
                }
            }
            words_sampled += 1;
            if is_hyperbolic_exact(&gamma)? {
                let word = coords
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(j, &c)| format!("g{j}^{c}"))
                    .collect::<Vec<_>>()
                    .join(" * ");
                witness = Some((gamma, word));
                break 'outer;
            }
            let vals = frame.values(&gamma)?;
            for (&pi, &mi) in positive.iter().zip(&mirror) {
                pairing_dev = pairing_dev.max((vals.per_class[pi] + vals.per_class[mi]).abs());
            }
            lambda_rows.push(positive.iter().map(|&i| vals.per_class[i]).collect());
        }
        let mut i = 0;
        loop {
            if i == k {
                break 'outer;
            }
            coords[i] += 1;
            if coords[i] <= word_len {
                break;
            }
            coords[i] = -word_len;
            i += 1;
        }
    }

    let sampled_rank = if lambda_rows.is_empty() {
        0
    } else {
        let cols = lambda_rows[0].len();
        let flat: Vec<f64> = lambda_rows.iter().flatten().copied().collect();
        DMatrix::from_row_slice(lambda_rows.len(), cols, &flat)
            .svd(false, false)
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-6)
            .count()
    };
    Ok(NoHyperbolicReport {
        hyperbolic_witness: witness,
        pairing_deviation: pairing_dev,
        sampled_rank,
        rank_bound: (d - 2) / 2,
        words_sampled,
    })
}

/// A bounded subgroup: generators whose center functional is dominated by
/// the weighted functional sum, with a sampled certificate.
#[derive(Clone, Debug)]
pub struct BoundedSubgroup {
    pub generators: Vec<IntMatrix>,
    /// Exponent vectors of the generators over the unit generators.
    pub exponents: Vec<Vec<i64>>,
    /// `Q/(4(Q+1))`, the functional perturbation budget.
    pub omega_bound: f64,
    /// Max of `χ₀(γ) − bound · Σ_j d_j|χ_j(γ)|` over the sampled words.
    pub certificate_max_violation: f64,
    pub certificate_words: usize,
}

/// Construct a rank-`r` subgroup on which the center functional is bounded
/// by `Q/(4(Q+1))` times the weighted absolute functional sum, by
/// intersecting the unit lattice with the kernel of a fine rational
/// approximation of the center functional.
pub fn bounded_centralizer_subgroup(
    cl: &CommutantLattice,
    r: usize,
    q: f64,
) -> Result<BoundedSubgroup> {
    if q <= 0.0 {
        return Err(Error::Precondition("Q must be positive".into()));
    }
    let l = &cl.ambient;
    let spec = classify(l)?;
    let full_rank = spec.r1 + spec.r2 - 1;
    if cl.achieved_rank < full_rank {
        return Err(Error::Precondition(format!(
            "unit rank {} is deficient (need the full rank {full_rank}); \
             enlarge the search radius",
            cl.achieved_rank
        )));
    }
    if r >= full_rank {
        return Err(Error::Precondition(format!(
            "requested rank {r} must be below the full rank {full_rank}"
        )));
    }
    if spec.center_dim != 2 {
        return Err(Error::Precondition(format!(
            "construction requires a 2-dimensional center, found {}",
            spec.center_dim
        )));
    }
    let frame = FunctionalFrame::new(l)?;
    let center = frame.excluded_class;
    let gens: Vec<&Unit> = cl.generators.iter().map(|&i| &cl.units[i]).collect();
    let n = gens.len();
    // fine rational approximation of the center functional on generator
    // coordinates; denominator 2^40 puts ‖ω‖ far below Q/(4(Q+1))
    let denom = BigInt::from(1u64 << 40);
    let rho: Vec<BigRational> = gens
        .iter()
        .map(|g| {
            let c = g.full_values[center];
            let num = BigInt::from((c * (1u64 << 40) as f64).round() as i64);
            BigRational::new(num, denom.clone())
        })
        .collect();
    if rho.iter().all(|x| x.is_zero()) {
        return Err(Error::Numerical(
            "center functional vanishes on every generator; cannot take a kernel".into(),
        ));
    }
    let rat = RatMatrix::new(1, n, rho)?;
    let kernel = crate::exact::integer_kernel(&rat);
    if kernel.rank() < n - 1 {
        return Err(Error::Numerical(format!(
            "kernel rank {} is below n−1 = {}",
            kernel.rank(),
            n - 1
        )));
    }
    if r > kernel.rank() {
        return Err(Error::Precondition(format!(
            "requested rank {r} exceeds the kernel rank {}",
            kernel.rank()
        )));
    }
    let d = l.dim();
    let mut generators = Vec::with_capacity(r);
    let mut exponents = Vec::with_capacity(r);
    for row in kernel.basis.iter().take(r) {
        let mut gamma = IntMatrix::identity(d);
        for (g, c) in gens.iter().zip(row) {
            let ci = c
                .to_i64()
                .ok_or_else(|| Error::Numerical("kernel coordinate exceeds i64".into()))?;
            if ci == 0 {
                continue;
            }
            let base = if ci > 0 {
                g.matrix.clone()
            } else {
                g.matrix.inverse_unimodular()?
            };
            for _ in 0..ci.abs() {
                gamma = gamma.mul(&base);
            }
        }
        exponents.push(row.iter().map(|c| c.to_i64().unwrap()).collect());
        generators.push(gamma);
    }

    // certificate: sample words up to length 4 of the returned generators
    let omega_bound = q / (4.0 * (q + 1.0));
    let mut max_violation: f64 = f64::NEG_INFINITY;
    let mut certificate_words = 0usize;
    let gen_inv: Vec<IntMatrix> = generators
        .iter()
        .map(|g| g.inverse_unimodular())
        .collect::<Result<_>>()?;
    let mut coords = vec![-4i64; r];
    'cert: loop {
        let total: i64 = coords.iter().map(|c| c.abs()).sum();
        if total <= 4 && coords.iter().any(|&c| c != 0) {
            let mut gamma = IntMatrix::identity(d);
            for (j, &c) in coords.iter().enumerate() {
                let base = if c >= 0 { &generators[j] } else { &gen_inv[j] };
                for _ in 0..c.abs() {
                    gamma = gamma.mul(base);
                }
            }
            let vals = frame.values(&gamma)?;
            let chi0 = vals.per_class[center];
            let weighted: f64 = vals
                .per_class
                .iter()
                .zip(&vals.dims)
                .map(|(v, dd)| v.abs() * *dd as f64)
                .sum();
            max_violation = max_violation.max(chi0 - omega_bound * weighted);
            certificate_words += 1;
        }
        let mut i = 0;
        loop {
            if i == r {
                break 'cert;
            }
            coords[i] += 1;
            if coords[i] <= 4 {
                break;
            }
            coords[i] = -4;
            i += 1;
        }
    }
    if certificate_words > 0 && max_violation > 1e-8 {
        return Err(Error::Numerical(format!(
            "bounded-subgroup certificate failed: violation {max_violation:.3e}"
        )));
    }
    Ok(BoundedSubgroup {
        generators,
        exponents,
        omega_bound,
        certificate_max_violation: if certificate_words > 0 {
            max_violation
        } else {
            0.0
        },
        certificate_words,
    })
}

/// True iff `L` is expressible in the group generated by `generators`
/// (up to sign) and the Λ-images have multiplicative rank ≥ 2.
pub fn higher_rank_check(l: &IntMatrix, generators: &[IntMatrix]) -> Result<bool> {
    for g in generators {
        if !g.commutes_with(l) {
            return Err(Error::Precondition(
                "generator does not commute with the automorphism".into(),
            ));
        }
    }
    let frame = FunctionalFrame::new(l)?;
    let k = generators.len();
    if k == 0 {
        return Ok(false);
    }
    let lambdas: Vec<Vec<f64>> = generators
        .iter()
        .map(|g| frame.lambda(g))
        .collect::<Result<_>>()?;
    let cols = frame.lambda_dim();
    let rank = if cols == 0 {
        0
    } else {
        let flat: Vec<f64> = lambdas.iter().flatten().copied().collect();
        DMatrix::from_row_slice(k, cols, &flat)
            .svd(false, false)
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-6)
            .count()
    };
    if rank < 2 {
        return Ok(false);
    }
    if generators.iter().any(|g| g == l) {
        return Ok(true);
    }
    // L in the group: solve Λ(L) over the generator Λ-images, verify exactly
    let lam_l = frame.lambda(l)?;
    let a = DMatrix::from_fn(cols, k, |i, j| lambdas[j][i]);
    let b = nalgebra::DVector::from_column_slice(&lam_l);
    let svd = a.svd(true, true);
    let Ok(x) = svd.solve(&b, 1e-12) else {
        return Ok(false);
    };
    let coeffs: Vec<i64> = x.iter().map(|c| c.round() as i64).collect();
    if coeffs.iter().map(|c| c.abs()).sum::<i64>() > 16 {
        return Ok(false);
    }
    let d = l.dim();
    let mut prod = IntMatrix::identity(d);
    for (g, &c) in generators.iter().zip(&coeffs) {
        if c == 0 {
            continue;
        }
        let base = if c > 0 { g.clone() } else { g.inverse_unimodular()? };
        for _ in 0..c.abs() {
            prod = prod.mul(&base);
        }
    }
    Ok(prod == *l || prod.neg() == *l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::IntPoly;

    fn worked_example_d4() -> IntMatrix {
        IntMatrix::companion(&IntPoly::from_i64(&[1, -3, 3, -3, 1])).unwrap()
    }

    fn cat_map() -> IntMatrix {
        IntMatrix::from_rows_i64(&[&[2, 1], &[1, 1]])
    }

    #[test]
    fn commutant_of_identity_is_everything() {
        let cl = commutant_basis(&IntMatrix::identity(2)).unwrap();
        assert_eq!(cl.lattice.rank(), 4);
    }

    #[test]
    fn commutant_of_cat_map() {
        let l = cat_map();
        let cl = commutant_basis(&l).unwrap();
        assert_eq!(cl.lattice.rank(), 2);
        assert!(powers_in_span(&cl));
        for m in &cl.basis_matrices {
            assert!(m.commutes_with(&l));
        }
    }

    #[test]
    fn commutant_of_worked_example() {
        let l = worked_example_d4();
        let cl = commutant_basis(&l).unwrap();
        assert_eq!(cl.lattice.rank(), 4);
        assert!(powers_in_span(&cl));
    }

    #[test]
    fn functional_values_of_l_match_certified_exponents() {
        let l = worked_example_d4();
        let vals = functional_of_element(&l, &l).unwrap();
        let spec = classify(&l).unwrap();
        for (v, c) in vals.per_class.iter().zip(&spec.lyapunov) {
            assert!((v - c.mid()).abs() < 1e-9, "{v} vs {}", c.mid());
        }
    }

    #[test]
    fn functional_values_worked_example_l_minus_i() {
        // eigenvalues λ−1; the center value is log|e^{iθ}−1| = ½·log(2−2cosθ)
        let l = worked_example_d4();
        let m = l.sub(&IntMatrix::identity(4));
        let vals = functional_of_element(&l, &m).unwrap();
        // oracle closed forms from the golden-ratio data
        let z1 = (3.0 + 5.0_f64.sqrt()) / 2.0;
        let z2 = (3.0 - 5.0_f64.sqrt()) / 2.0;
        let lam1 = z1 / 2.0 + (z1 * z1 / 4.0 - 1.0).sqrt();
        let expect_top = (lam1 - 1.0).ln(); // ≈ 0.1430
        let expect_center = 0.5 * (2.0 - z2).ln(); // ≈ 0.2406
        let expect_bottom = (1.0 - 1.0 / lam1).ln(); // ≈ −0.6242
        let spec = classify(&l).unwrap();
        let center = spec.center_class().unwrap();
        assert!((vals.per_class[0] - expect_top).abs() < 1e-9);
        assert!((vals.per_class[center] - expect_center).abs() < 1e-9);
        assert!((vals.per_class[2] - expect_bottom).abs() < 1e-9);
    }

    #[test]
    fn functional_of_minus_identity_is_zero() {
        let l = worked_example_d4();
        let m = IntMatrix::identity(4).neg();
        let vals = functional_of_element(&l, &m).unwrap();
        for v in &vals.per_class {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn functional_rejects_non_commuting() {
        let l = worked_example_d4();
        let mut m = IntMatrix::identity(4);
        m.set(0, 1, BigInt::from(1));
        assert!(matches!(
            functional_of_element(&l, &m),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn unit_search_worked_example_radius3() {
        let l = worked_example_d4();
        let mut cl = commutant_basis(&l).unwrap();
        unit_search(&mut cl, 3).unwrap();
        assert_eq!(cl.achieved_rank, 2, "rank should be r1+r2−1 = 2");
        // L and L−I must be among the discovered units
        let eye = IntMatrix::identity(4);
        let lmi = l.sub(&eye);
        assert!(cl.units.iter().any(|u| u.matrix == l));
        let found = cl
            .units
            .iter()
            .find(|u| u.matrix == lmi)
            .expect("L−I found");
        assert_eq!(found.det, -1, "det(L−I) = q(1) = −1");
        assert!(found.hyperbolic);
        let ul = cl.units.iter().find(|u| u.matrix == l).unwrap();
        assert!(!ul.hyperbolic);
        // every unit commutes exactly and satisfies the hyperplane invariant
        let spec = classify(&l).unwrap();
        for u in &cl.units {
            assert!(u.matrix.commutes_with(&l));
            let weighted: f64 = u
                .full_values
                .iter()
                .zip(spec.lyapunov.iter())
                .map(|(v, c)| v * c.multiplicity as f64)
                .sum();
            assert!(weighted.abs() <= 1e-9, "hyperplane violation {weighted}");
        }
    }

    #[test]
    fn unit_search_cat_map() {
        let l = cat_map();
        let mut cl = commutant_basis(&l).unwrap();
        unit_search(&mut cl, 2).unwrap();
        assert_eq!(cl.achieved_rank, 1);
        assert!(cl.units.iter().any(|u| u.matrix == l));
    }

    #[test]
    fn unit_search_radius0() {
        let l = worked_example_d4();
        let mut cl = commutant_basis(&l).unwrap();
        unit_search(&mut cl, 0).unwrap();
        assert_eq!(cl.achieved_rank, 0);
        assert!(!cl.units.is_empty());
        assert!(cl.units.iter().all(|u| u.finite_order));
    }

    #[test]
    fn unit_search_rejects_negative_radius() {
        let l = cat_map();
        let mut cl = commutant_basis(&l).unwrap();
        assert!(unit_search(&mut cl, -1).is_err());
    }

    #[test]
    fn hyperbolicity_flags() {
        let l = worked_example_d4();
        assert!(!is_hyperbolic_element(&l, &l).unwrap());
        let lmi = l.sub(&IntMatrix::identity(4));
        assert!(is_hyperbolic_element(&l, &lmi).unwrap());
        let minus = IntMatrix::identity(4).neg();
        assert!(!is_hyperbolic_element(&l, &minus).unwrap());
    }

    #[test]
    fn cone_search_worked_example() {
        let l = worked_example_d4();
        let mut cl = commutant_basis(&l).unwrap();
        unit_search(&mut cl, 3).unwrap();
        let elem = cone_search_center_dominating(&cl, 6)
            .unwrap()
            .expect("cone element exists");
        // γ = L + L⁻¹ − 2I
        let expect = l
            .add(&l.inverse_unimodular().unwrap())
            .sub(&IntMatrix::identity(4).mul_scalar(&BigInt::from(2)));
        assert_eq!(elem.matrix, expect, "word: {}", elem.word);
        // center log-determinant 2·ln φ, golden ratio φ = (1+√5)/2
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((elem.center_log_det - 2.0 * phi.ln()).abs() < 1e-8);
        assert!((elem.domination_ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cone_search_requires_center() {
        let l = cat_map();
        let mut cl = commutant_basis(&l).unwrap();
        unit_search(&mut cl, 2).unwrap();
        assert!(matches!(
            cone_search_center_dominating(&cl, 3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cone_search_torsion_only_not_found() {
        let l = worked_example_d4();
        let mut cl = commutant_basis(&l).unwrap();
        unit_search(&mut cl, 0).unwrap();
        assert!(cone_search_center_dominating(&cl, 3).unwrap().is_none());
    }

    #[test]
    fn no_hyperbolic_for_powers_of_l() {
        let l = worked_example_d4();
        let rep = no_hyperbolic_analysis(&l, &[l.clone()], 6).unwrap();
        assert!(rep.hyperbolic_witness.is_none());
        assert!(rep.pairing_deviation <= 1e-8);
        assert_eq!(rep.sampled_rank, 1);
        assert_eq!(rep.rank_bound, 1);
    }

    #[test]
    fn no_hyperbolic_finds_witness() {
        let l = worked_example_d4();
        let lmi = l.sub(&IntMatrix::identity(4));
        let rep = no_hyperbolic_analysis(&l, &[l.clone(), lmi.clone()], 6).unwrap();
        let (w, _) = rep.hyperbolic_witness.expect("witness exists");
        assert!(is_hyperbolic_exact(&w).unwrap());
    }

    #[test]
    fn no_hyperbolic_minus_identity() {
        let l = worked_example_d4();
        let rep = no_hyperbolic_analysis(&l, &[IntMatrix::identity(4).neg()], 6).unwrap();
        assert!(rep.hyperbolic_witness.is_none());
        assert_eq!(rep.sampled_rank, 0);
    }

    #[test]
    fn bounded_subgroup_d4_rank1() {
        let l = worked_example_d4();
        let mut cl = commutant_basis(&l).unwrap();
        unit_search(&mut cl, 3).unwrap();
        let sub = bounded_centralizer_subgroup(&cl, 1, 10.0).unwrap();
        assert_eq!(sub.generators.len(), 1);
        assert!(sub.certificate_max_violation <= 1e-8);
        // the generator must have vanishing center functional (a power of ±L)
        let frame = FunctionalFrame::new(&l).unwrap();
        let vals = frame.values(&sub.generators[0]).unwrap();
        let center = frame.excluded_class;
        assert!(vals.per_class[center].abs() < 1e-9);
    }

    #[test]
    fn bounded_subgroup_rejects_full_rank_request() {
        let l = worked_example_d4();
        let mut cl = commutant_basis(&l).unwrap();
        unit_search(&mut cl, 3).unwrap();
        assert!(matches!(
            bounded_centralizer_subgroup(&cl, 2, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn higher_rank_examples() {
        let l = worked_example_d4();
        let lmi = l.sub(&IntMatrix::identity(4));
        assert!(higher_rank_check(&l, &[l.clone(), lmi]).unwrap());
        assert!(!higher_rank_check(&l, &[l.clone()]).unwrap());
        assert!(!higher_rank_check(&l, &[IntMatrix::identity(4).neg()]).unwrap());
    }

    #[test]
    fn lambda_additivity_on_unit_pairs() {
        use rand::Rng;
        use rand::SeedableRng;
        let l = worked_example_d4();
        let mut cl = commutant_basis(&l).unwrap();
        unit_search(&mut cl, 3).unwrap();
        let frame = FunctionalFrame::new(&l).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let n = cl.units.len();
        assert!(n >= 4, "need several units, got {n}");
        for _ in 0..50 {
            let a = &cl.units[rng.random_range(0..n)];
            let b = &cl.units[rng.random_range(0..n)];
            let prod = a.matrix.mul(&b.matrix);
            let lam_prod = frame.lambda(&prod).unwrap();
            for ((p, x), y) in lam_prod.iter().zip(&a.lambda).zip(&b.lambda) {
                assert!((p - x - y).abs() <= 1e-9, "additivity violated");
            }
        }
    }

    #[test]
    fn real_class_kernel_triviality() {
        // any unit with a real-class functional equal to 0 must be ±I
        let l = worked_example_d4();
        let mut cl = commutant_basis(&l).unwrap();
        unit_search(&mut cl, 3).unwrap();
        let spec = classify(&l).unwrap();
        let eye = IntMatrix::identity(4);
        for u in &cl.units {
            for (i, c) in spec.lyapunov.iter().enumerate() {
                if c.exactly_zero || c.multiplicity != 1 {
                    continue;
                }
                if u.full_values[i].abs() < 1e-12 {
                    assert!(
                        u.matrix == eye || u.matrix == eye.neg(),
                        "unit with vanishing real-class functional is not ±I"
                    );
                }
            }
        }
    }
}
