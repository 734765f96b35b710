//! Certified spectral classification of integer automorphisms.
//!
//! Real eigenvalues are isolated by Sturm sequences and refined by exact
//! bisection; complex pairs are certified as quadratic factors `t² − st + n`
//! by a Krawczyk contractor over rational intervals; modulus-1 pairs are
//! detected exactly through the trace polynomial. Equal moduli between
//! distinct eigenvalues are decided exactly (the `p(t)` vs `p(−t)` shared
//! factor test for real pairs, conjugacy for complex pairs), never by
//! comparing floats.

use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::{IntMatrix, IntPoly};
use crate::interval::{certify_quad_factor, RatInterval};
use crate::polyalg::{
    has_root_of_unity_factor, is_irreducible_q, isolate_real_roots, refine_interval,
    unit_circle_pairs, RootInterval, SturmChain,
};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// Target width for exponent intervals.
    pub target_width: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            target_width: 1e-12,
        }
    }
}

/// One eigenvalue group contributing to an exponent class.
#[derive(Clone, Debug)]
pub enum Member {
    /// A real eigenvalue ±1 or a conjugate pair of modulus exactly 1.
    ExactUnitModulus { dim: usize, complex_pair: bool },
    /// A real eigenvalue isolated in a rational interval of definite sign.
    RealRoot {
        factor: IntPoly,
        interval: RootInterval,
        dim: usize,
    },
    /// A conjugate complex pair with certified trace/norm boxes.
    ComplexPair {
        trace: RatInterval,
        norm: RatInterval,
        dim: usize,
    },
}

impl Member {
    pub fn dim(&self) -> usize {
        match self {
            Member::ExactUnitModulus { dim, .. } => *dim,
            Member::RealRoot { dim, .. } => *dim,
            Member::ComplexPair { dim, .. } => *dim,
        }
    }

    fn is_exact_zero(&self) -> bool {
        matches!(self, Member::ExactUnitModulus { .. })
    }

    /// Certified bounds on the Lyapunov exponent (log of the modulus).
    fn exponent_bounds(&self) -> (f64, f64) {
        match self {
            Member::ExactUnitModulus { .. } => (0.0, 0.0),
            Member::RealRoot { interval, .. } => abs_log_bounds(interval),
            Member::ComplexPair { norm, .. } => {
                let (lo, hi) = norm.log_outward();
                (0.5 * lo, 0.5 * hi)
            }
        }
    }
}

/// Outward bounds on `ln |λ|` for a sign-definite root interval.
fn abs_log_bounds(interval: &RootInterval) -> (f64, f64) {
    let lo = interval.lo.clone();
    let hi = interval.hi.clone();
    let (alo, ahi) = if !lo.is_negative() { (lo, hi) } else { (-hi, -lo) };
    debug_assert!(alo.is_positive(), "root interval must have definite sign");
    let pad = 1e-15;
    (
        alo.to_f64().unwrap().ln() - pad,
        ahi.to_f64().unwrap().ln() + pad,
    )
}

/// A distinct Lyapunov exponent with its subspace dimension.
#[derive(Clone, Debug)]
pub struct ExponentClass {
    /// Certified lower bound for χ.
    pub lo: f64,
    /// Certified upper bound for χ.
    pub hi: f64,
    /// `dim E^χ`.
    pub multiplicity: usize,
    /// χ = 0 exactly (modulus-1 eigenvalues, decided exactly).
    pub exactly_zero: bool,
    pub members: Vec<Member>,
}

impl ExponentClass {
    pub fn mid(&self) -> f64 {
        if self.exactly_zero {
            0.0
        } else {
            0.5 * (self.lo + self.hi)
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Certified spectral data of an automorphism.
#[derive(Clone, Debug)]
pub struct CertifiedSpectrum {
    pub dim: usize,
    pub char_poly: IntPoly,
    pub det: BigInt,
    /// Number of real eigenvalues, with multiplicity.
    pub r1: usize,
    /// Number of conjugate complex pairs, with multiplicity.
    pub r2: usize,
    /// Number of conjugate pairs of modulus exactly 1, with multiplicity.
    pub circle_pairs: usize,
    /// Distinct exponents, strictly decreasing.
    pub lyapunov: Vec<ExponentClass>,
    /// Multiplicity of χ = 0.
    pub center_dim: usize,
}

impl CertifiedSpectrum {
    /// Index of the exponent-0 class, if present.
    pub fn center_class(&self) -> Option<usize> {
        self.lyapunov.iter().position(|c| c.exactly_zero)
    }

    pub fn exponents_mid(&self) -> Vec<(f64, usize)> {
        self.lyapunov
            .iter()
            .map(|c| (c.mid(), c.multiplicity))
            .collect()
    }
}

/// Classify the spectrum of `L`; requires `|det L| = 1`.
pub fn classify(l: &IntMatrix) -> Result<CertifiedSpectrum> {
    classify_with(l, &ClassifyOptions::default())
}

pub fn classify_with(l: &IntMatrix, opts: &ClassifyOptions) -> Result<CertifiedSpectrum> {
    let det = l.det();
    if !det.clone().abs().is_one() {
        return Err(Error::NotAutomorphism(det.to_string()));
    }
    let p = l.char_poly();
    let spectrum = classify_char_poly(&p, opts)?;
    Ok(CertifiedSpectrum { det, ..spectrum })
}

/// Classification driven entirely by the characteristic polynomial.
pub fn classify_char_poly(p: &IntPoly, opts: &ClassifyOptions) -> Result<CertifiedSpectrum> {
    let d = p.deg();
    let factors = p.squarefree_decomposition();

    let mut r1 = 0usize;
    let mut r2 = 0usize;
    let mut circle = 0usize;
    let mut groups: Vec<Member> = Vec::new();
    // per stripped factor: the group indices of its real-root members
    let mut real_groups: Vec<Vec<usize>> = Vec::new();
    let mut stripped: Vec<IntPoly> = Vec::new();

    for (g, mult) in &factors {
        let mut g = g.clone();
        // exact ±1 roots: modulus exactly 1, contributes to the zero class
        for root in [1i64, -1] {
            if g.eval_int(&BigInt::from(root)).is_zero() {
                g = g
                    .div_exact(&IntPoly::from_i64(&[-root, 1]))
                    .expect("exact linear factor");
                r1 += mult;
                groups.push(Member::ExactUnitModulus {
                    dim: *mult,
                    complex_pair: false,
                });
            }
        }
        if g.deg() == 0 {
            continue;
        }
        let circle_here = unit_circle_pairs(&g)?;
        circle += circle_here * mult;
        let reals = isolate_real_roots(&g, None)?;
        r1 += reals.len() * mult;
        let complex_pairs = (g.deg() - reals.len()) / 2;
        r2 += complex_pairs * mult;

        let mut this_real_groups = Vec::new();
        for iv in &reals {
            // refine until the interval has definite sign (0 is never a root
            // of an automorphism's factor)
            let mut iv = iv.clone();
            while !(iv.lo.is_positive() || iv.hi.is_negative()) {
                let half = iv.width() / BigRational::from_integer(BigInt::from(2));
                iv = refine_interval(&g, &iv, &half);
            }
            this_real_groups.push(groups.len());
            groups.push(Member::RealRoot {
                factor: g.clone(),
                interval: iv,
                dim: *mult,
            });
        }
        real_groups.push(this_real_groups);
        stripped.push(g.clone());

        if complex_pairs > 0 {
            for member in certify_complex_pairs(&g, complex_pairs, circle_here, opts)? {
                groups.push(scale_dim(member, *mult));
            }
        }
    }

    // exact ±λ pairing between real roots (same or different factors)
    let mut parents: Vec<usize> = (0..groups.len()).collect();
    merge_negation_pairs(&mut groups, &real_groups, &stripped, &mut parents)?;

    // gather union-find classes
    let mut class_map: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..groups.len() {
        let root = uf_find(&mut parents, i);
        class_map.entry(root).or_default().push(i);
    }

    let mut classes: Vec<ExponentClass> = Vec::new();
    let mut zero_class = ExponentClass {
        lo: 0.0,
        hi: 0.0,
        multiplicity: 0,
        exactly_zero: true,
        members: vec![],
    };
    for idx_list in class_map.values() {
        let members: Vec<Member> = idx_list.iter().map(|&i| groups[i].clone()).collect();
        if members.iter().any(|m| m.is_exact_zero()) {
            debug_assert!(members.iter().all(|m| m.is_exact_zero()));
            for m in members {
                zero_class.multiplicity += m.dim();
                zero_class.members.push(m);
            }
            continue;
        }
        let multiplicity = members.iter().map(|m| m.dim()).sum();
        let (lo, hi) = class_bounds(&members);
        classes.push(ExponentClass {
            lo,
            hi,
            multiplicity,
            exactly_zero: false,
            members,
        });
    }
    if zero_class.multiplicity > 0 {
        classes.push(zero_class);
    }

    // refine until distinct classes have disjoint intervals
    refine_to_disjoint(&mut classes, opts)?;

    classes.sort_by(|a, b| b.mid().partial_cmp(&a.mid()).unwrap());
    let center_dim = classes
        .iter()
        .find(|c| c.exactly_zero)
        .map_or(0, |c| c.multiplicity);

    debug_assert_eq!(
        classes.iter().map(|c| c.multiplicity).sum::<usize>(),
        d,
        "class multiplicities must sum to the dimension"
    );

    Ok(CertifiedSpectrum {
        dim: d,
        char_poly: p.clone(),
        det: BigInt::one(),
        r1,
        r2,
        circle_pairs: circle,
        lyapunov: classes,
        center_dim,
    })
}

fn scale_dim(member: Member, mult: usize) -> Member {
    match member {
        Member::ExactUnitModulus { dim, complex_pair } => Member::ExactUnitModulus {
            dim: dim * mult,
            complex_pair,
        },
        Member::ComplexPair { trace, norm, dim } => Member::ComplexPair {
            trace,
            norm,
            dim: dim * mult,
        },
        Member::RealRoot {
            factor,
            interval,
            dim,
        } => Member::RealRoot {
            factor,
            interval,
            dim: dim * mult,
        },
    }
}

/// Certify the conjugate complex pairs of a squarefree factor. Exactly
/// `circle_count` of them have modulus exactly 1 (known from the trace
/// polynomial); those become exact-zero members. The others carry Krawczyk
/// boxes for (trace, norm).
fn certify_complex_pairs(
    g: &IntPoly,
    pair_count: usize,
    circle_count: usize,
    opts: &ClassifyOptions,
) -> Result<Vec<Member>> {
    let comp = IntMatrix::companion(g)?;
    let eigs = comp.to_f64().complex_eigenvalues();
    let mut seeds: Vec<(f64, f64)> = Vec::new();
    for e in eigs.iter() {
        if e.im > 1e-9 {
            seeds.push((2.0 * e.re, e.norm_sqr()));
        }
    }
    if seeds.len() != pair_count {
        return Err(Error::Numerical(format!(
            "floating eigensolver found {} complex pairs, expected {pair_count}",
            seeds.len()
        )));
    }
    let mut boxes: Vec<(RatInterval, RatInterval)> = Vec::with_capacity(pair_count);
    for (s0, n0) in seeds {
        let target = (opts.target_width * (1.0 + n0.abs())).min(1e-10);
        let f = certify_quad_factor(g, s0, n0, target).ok_or_else(|| {
            Error::Numerical(format!(
                "could not certify complex pair near trace {s0:.6}, norm {n0:.6}; \
                 clustering too tight for the contractor"
            ))
        })?;
        boxes.push((f.trace, f.norm));
    }
    // identify the circle pairs exactly: refine until exactly `circle_count`
    // norm boxes contain 1
    let one = BigRational::one();
    for _ in 0..8 {
        let containing: Vec<bool> = boxes.iter().map(|(_, n)| n.contains(&one)).collect();
        let n_contain = containing.iter().filter(|&&b| b).count();
        if n_contain == circle_count {
            let mut out = Vec::with_capacity(pair_count);
            for ((trace, norm), is_circle) in boxes.into_iter().zip(containing) {
                out.push(if is_circle {
                    Member::ExactUnitModulus {
                        dim: 2,
                        complex_pair: true,
                    }
                } else {
                    Member::ComplexPair {
                        trace,
                        norm,
                        dim: 2,
                    }
                });
            }
            return Ok(out);
        }
        // some non-circle pair still straddles 1; tighten those boxes
        for (trace, norm) in boxes.iter_mut() {
            if norm.contains(&one) {
                let f = certify_quad_factor(
                    g,
                    trace.mid_f64(),
                    norm.mid_f64(),
                    norm.width_f64() * 1e-6,
                )
                .ok_or_else(|| Error::Numerical("refinement of complex pair failed".into()))?;
                *trace = f.trace;
                *norm = f.norm;
            }
        }
    }
    Err(Error::Numerical(
        "could not separate modulus-1 pairs from near-circle pairs".into(),
    ))
}

/// Merge real-root groups `λ` and `−λ` using the exact shared-factor test
/// between `g_i(t)` and `g_j(−t)`.
fn merge_negation_pairs(
    groups: &mut [Member],
    real_groups: &[Vec<usize>],
    stripped: &[IntPoly],
    parents: &mut Vec<usize>,
) -> Result<()> {
    for i in 0..stripped.len() {
        for j in i..stripped.len() {
            let gi = &stripped[i];
            let gj = &stripped[j];
            let h = gi.gcd(&gj.substitute_neg());
            if h.deg() == 0 {
                continue;
            }
            let chain = SturmChain::new(&h)?;
            // roots of h: λ with g_i(λ) = 0 and g_j(−λ) = 0
            for &gi_idx in &real_groups[i] {
                let (mut lam, gi_poly) = match &groups[gi_idx] {
                    Member::RealRoot {
                        interval, factor, ..
                    } => (interval.clone(), factor.clone()),
                    _ => unreachable!(),
                };
                if chain.count_open(&lam.lo, &lam.hi) != 1 {
                    continue;
                }
                loop {
                    let neg_lo = -lam.hi.clone();
                    let neg_hi = -lam.lo.clone();
                    let candidates: Vec<usize> = real_groups[j]
                        .iter()
                        .copied()
                        .filter(|&gj_idx| {
                            let Member::RealRoot { interval, .. } = &groups[gj_idx] else {
                                unreachable!()
                            };
                            interval.lo < neg_hi && neg_lo < interval.hi
                        })
                        .collect();
                    match candidates.len() {
                        1 => {
                            uf_union(parents, gi_idx, candidates[0]);
                            break;
                        }
                        0 => {
                            return Err(Error::Numerical(
                                "negation partner lost during pairing".into(),
                            ));
                        }
                        _ => {
                            let half = lam.width() / BigRational::from_integer(BigInt::from(2));
                            lam = refine_interval(&gi_poly, &lam, &half);
                            let Member::RealRoot { interval, .. } = &mut groups[gi_idx] else {
                                unreachable!()
                            };
                            *interval = lam.clone();
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn class_bounds(members: &[Member]) -> (f64, f64) {
    // all members share the same true exponent: intersect their bounds
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for m in members {
        let (l, h) = m.exponent_bounds();
        lo = lo.max(l);
        hi = hi.min(h);
    }
    debug_assert!(lo <= hi, "member bounds are inconsistent");
    (lo, hi)
}

/// Refine class enclosures until distinct classes are pairwise disjoint and
/// narrower than the target width.
fn refine_to_disjoint(classes: &mut [ExponentClass], opts: &ClassifyOptions) -> Result<()> {
    let mut width = opts.target_width;
    for _round in 0..10 {
        for c in classes.iter_mut() {
            if c.exactly_zero {
                continue;
            }
            refine_class(c, width)?;
        }
        let mut overlap = false;
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                let (a, b) = (&classes[i], &classes[j]);
                if a.lo <= b.hi && b.lo <= a.hi {
                    overlap = true;
                }
            }
        }
        if !overlap {
            return Ok(());
        }
        width *= 1e-3;
        if width < 1e-30 {
            break;
        }
    }
    Err(Error::Numerical(
        "could not certify distinct Lyapunov exponents as separated".into(),
    ))
}

fn refine_class(c: &mut ExponentClass, width: f64) -> Result<()> {
    for m in c.members.iter_mut() {
        match m {
            Member::ExactUnitModulus { .. } => {}
            Member::RealRoot {
                factor, interval, ..
            } => {
                let half = BigRational::new(BigInt::one(), BigInt::from(2));
                let mut target = interval.width();
                loop {
                    let (lo, hi) = abs_log_bounds(interval);
                    if hi - lo <= width {
                        break;
                    }
                    target = target * &half;
                    *interval = refine_interval(factor, interval, &target);
                }
            }
            Member::ComplexPair { norm, .. } => {
                let (lo, hi) = norm.log_outward();
                if 0.5 * (hi - lo) <= width {
                    continue;
                }
                return Err(Error::Numerical(format!(
                    "complex pair near norm {:.6} needs refinement below width {width:e}; \
                     re-run classification with a smaller target width",
                    norm.mid_f64()
                )));
            }
        }
    }
    let (lo, hi) = class_bounds(&c.members);
    c.lo = lo;
    c.hi = hi;
    Ok(())
}

fn uf_find(parents: &mut Vec<usize>, i: usize) -> usize {
    let mut root = i;
    while parents[root] != root {
        root = parents[root];
    }
    let mut cur = i;
    while parents[cur] != root {
        let next = parents[cur];
        parents[cur] = root;
        cur = next;
    }
    root
}

fn uf_union(parents: &mut Vec<usize>, a: usize, b: usize) {
    let ra = uf_find(parents, a);
    let rb = uf_find(parents, b);
    if ra != rb {
        parents[ra.max(rb)] = ra.min(rb);
    }
}

/// True iff the characteristic polynomial has no cyclotomic factor.
pub fn is_ergodic(l: &IntMatrix) -> Result<bool> {
    let det = l.det();
    if !det.abs().is_one() {
        return Err(Error::NotAutomorphism(l.det().to_string()));
    }
    Ok(!has_root_of_unity_factor(&l.char_poly())?)
}

/// Witness report for the one-circle-pair hypothesis.
#[derive(Clone, Debug)]
pub struct PropertyPReport {
    pub holds: bool,
    pub dimension_ok: bool,
    pub irreducible: bool,
    pub one_circle_pair: bool,
    pub off_circle_real: bool,
    pub failing_clauses: Vec<String>,
}

/// Irreducible, exactly one conjugate pair on the unit circle, all other
/// eigenvalues real, in dimension ≥ 4. The report names failing clauses.
pub fn has_property_p(l: &IntMatrix) -> Result<PropertyPReport> {
    let spec = classify(l)?;
    property_p_from_spectrum(l.dim(), &spec)
}

pub fn property_p_from_spectrum(dim: usize, spec: &CertifiedSpectrum) -> Result<PropertyPReport> {
    let dimension_ok = dim >= 4;
    let irreducible = is_irreducible_q(&spec.char_poly)?;
    let one_circle_pair = spec.circle_pairs == 1;
    let off_circle_real = spec.r2 == 1;
    let mut failing = Vec::new();
    if !dimension_ok {
        failing.push("dimension must be at least 4".to_string());
    }
    if !irreducible {
        failing.push("characteristic polynomial is reducible over Q".to_string());
    }
    if !one_circle_pair {
        failing.push(format!(
            "expected exactly one conjugate pair on the unit circle, found {}",
            spec.circle_pairs
        ));
    }
    if !off_circle_real {
        failing.push(format!(
            "expected every off-circle eigenvalue to be real (r2 = 1), found r2 = {}",
            spec.r2
        ));
    }
    Ok(PropertyPReport {
        holds: failing.is_empty(),
        dimension_ok,
        irreducible,
        one_circle_pair,
        off_circle_real,
        failing_clauses: failing,
    })
}

/// `χ_j > r · χ_{j+1}` for the decreasing positive exponents, decided on
/// certified intervals; vacuous when there is a single positive exponent.
pub fn spread_spectrum(l: &IntMatrix, r: u32) -> Result<bool> {
    let report = has_property_p(l)?;
    if !report.holds {
        return Err(Error::Precondition(format!(
            "spread spectrum requires the one-circle-pair hypothesis; failing: {}",
            report.failing_clauses.join("; ")
        )));
    }
    let mut opts = ClassifyOptions::default();
    for _ in 0..6 {
        let spec = classify_with(l, &opts)?;
        let positive: Vec<&ExponentClass> = spec
            .lyapunov
            .iter()
            .filter(|c| !c.exactly_zero && c.lo > 0.0)
            .collect();
        let mut undecided = false;
        for w in positive.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.lo > r as f64 * b.hi {
                continue;
            }
            if a.hi < r as f64 * b.lo {
                return Ok(false);
            }
            undecided = true;
        }
        if !undecided {
            return Ok(true);
        }
        opts.target_width *= 1e-4;
        if opts.target_width < 1e-28 {
            break;
        }
    }
    Err(Error::Numerical(
        "could not decide the spread inequality at the refinement cap".into(),
    ))
}

/// Every modulus class carries at most two eigenvalues. The class structure
/// is built from exact pairings only (±λ shared-factor test, conjugate
/// pairs, exact modulus-1 detection).
pub fn no_three_same_modulus(l: &IntMatrix) -> Result<bool> {
    let spec = classify(l)?;
    Ok(spec.lyapunov.iter().all(|c| c.multiplicity <= 2))
}

/// Floating spectral projectors onto the exponent classes.
#[derive(Clone, Debug)]
pub struct SpectralProjectors {
    /// One projector per entry of `spectrum.lyapunov`, same order.
    pub projectors: Vec<DMatrix<f64>>,
    /// ‖Π² − Π‖∞ per class.
    pub idempotency_residuals: Vec<f64>,
    /// ‖LΠ − ΠL‖∞ per class.
    pub commutation_residuals: Vec<f64>,
    /// ‖Σ Π − I‖∞.
    pub sum_residual: f64,
}

impl SpectralProjectors {
    pub fn center<'a>(&'a self, spec: &CertifiedSpectrum) -> Option<&'a DMatrix<f64>> {
        spec.center_class().map(|i| &self.projectors[i])
    }

    /// Sum of projectors with positive exponents.
    pub fn unstable(&self, spec: &CertifiedSpectrum) -> DMatrix<f64> {
        self.sum_where(spec, |c| !c.exactly_zero && c.lo > 0.0)
    }

    pub fn stable(&self, spec: &CertifiedSpectrum) -> DMatrix<f64> {
        self.sum_where(spec, |c| !c.exactly_zero && c.hi < 0.0)
    }

    fn sum_where<F: Fn(&ExponentClass) -> bool>(
        &self,
        spec: &CertifiedSpectrum,
        f: F,
    ) -> DMatrix<f64> {
        let d = self.projectors[0].nrows();
        let mut acc = DMatrix::zeros(d, d);
        for (c, p) in spec.lyapunov.iter().zip(&self.projectors) {
            if f(c) {
                acc += p;
            }
        }
        acc
    }
}

/// Compute per-class spectral projectors in binary64 via a complex
/// eigenbasis; requires semisimple input (true for squarefree characteristic
/// polynomials and their block-diagonal repetitions).
pub fn projectors(l: &IntMatrix, spec: &CertifiedSpectrum) -> Result<SpectralProjectors> {
    let d = l.dim();
    if spec.lyapunov.len() == 1 {
        let eye = DMatrix::identity(d, d);
        return Ok(SpectralProjectors {
            projectors: vec![eye],
            idempotency_residuals: vec![0.0],
            commutation_residuals: vec![0.0],
            sum_residual: 0.0,
        });
    }
    let lf = l.to_f64();
    let lc = lf.map(|x| Complex::new(x, 0.0));
    let comp_eigs = lf.clone().complex_eigenvalues();
    // assign each numerical eigenvalue to a class by certified bounds
    let mut assignments: Vec<usize> = Vec::with_capacity(d);
    for e in comp_eigs.iter() {
        let chi = e.norm().ln();
        let mut best = None;
        for (ci, class) in spec.lyapunov.iter().enumerate() {
            if chi >= class.lo - 1e-7 && chi <= class.hi + 1e-7 {
                best = Some(ci);
                break;
            }
        }
        let ci = best.ok_or_else(|| {
            Error::Numerical(format!(
                "eigenvalue with log-modulus {chi:.3e} matches no certified class"
            ))
        })?;
        assignments.push(ci);
    }
    for (ci, class) in spec.lyapunov.iter().enumerate() {
        let got = assignments.iter().filter(|&&a| a == ci).count();
        if got != class.multiplicity {
            return Err(Error::Numerical(format!(
                "class {ci} expected multiplicity {}, matched {got} floating eigenvalues",
                class.multiplicity
            )));
        }
    }
    // complex eigenbasis: nullspace vectors of (L − λI), multiplicity-aware
    let mut basis: Vec<nalgebra::DVector<Complex<f64>>> = Vec::with_capacity(d);
    let mut basis_class: Vec<usize> = Vec::with_capacity(d);
    let mut done: Vec<bool> = vec![false; d];
    for i in 0..d {
        if done[i] {
            continue;
        }
        let lam = comp_eigs[i];
        let mut idxs = vec![i];
        for j in i + 1..d {
            if !done[j] && (comp_eigs[j] - lam).norm() < 1e-8 * (1.0 + lam.norm()) {
                idxs.push(j);
            }
        }
        for &j in &idxs {
            done[j] = true;
        }
        let m = idxs.len();
        let mut shifted = lc.clone();
        for k in 0..d {
            shifted[(k, k)] -= lam;
        }
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.as_ref().expect("requested V^T");
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[a]
                .partial_cmp(&svd.singular_values[b])
                .unwrap()
        });
        for k in 0..m {
            let row = order[k];
            let v = vt.row(row).transpose().map(|x| x.conj());
            basis.push(v);
            basis_class.push(assignments[idxs[k]]);
        }
    }
    let vmat = DMatrix::from_columns(&basis);
    let vinv = vmat
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("eigenbasis is numerically singular".into()))?;

    let n_classes = spec.lyapunov.len();
    let mut projs = Vec::with_capacity(n_classes);
    let mut idem = Vec::with_capacity(n_classes);
    let mut comm = Vec::with_capacity(n_classes);
    let mut sum = DMatrix::zeros(d, d);
    for ci in 0..n_classes {
        let mut diag: DMatrix<Complex<f64>> = DMatrix::zeros(d, d);
        for (k, &bc) in basis_class.iter().enumerate() {
            if bc == ci {
                diag[(k, k)] = Complex::new(1.0, 0.0);
            }
        }
        let pc = &vmat * diag * &vinv;
        let pr = pc.map(|x| x.re);
        idem.push(max_abs(&(&pr * &pr - &pr)));
        comm.push(max_abs(&(&lf * &pr - &pr * &lf)));
        sum += &pr;
        projs.push(pr);
    }
    let sum_residual = max_abs(&(sum - DMatrix::identity(d, d)));
    Ok(SpectralProjectors {
        projectors: projs,
        idempotency_residuals: idem,
        commutation_residuals: comm,
        sum_residual,
    })
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::poly_in_tn;

    pub fn worked_example_d4() -> IntMatrix {
        IntMatrix::companion(&IntPoly::from_i64(&[1, -3, 3, -3, 1])).unwrap()
    }

    fn cat_map() -> IntMatrix {
        IntMatrix::from_rows_i64(&[&[2, 1], &[1, 1]])
    }

    /// Independent oracle for the quartic example: real roots from the
    /// closed-form data λ = z/2 + √(z²/4 − 1), z = (3+√5)/2.
    fn oracle_chi_d4() -> f64 {
        let z = (3.0 + 5.0_f64.sqrt()) / 2.0;
        let lam = z / 2.0 + (z * z / 4.0 - 1.0).sqrt();
        lam.ln()
    }

    #[test]
    fn classify_worked_example() {
        let l = worked_example_d4();
        let spec = classify(&l).unwrap();
        assert_eq!(spec.r1, 2);
        assert_eq!(spec.r2, 1);
        assert_eq!(spec.circle_pairs, 1);
        assert_eq!(spec.center_dim, 2);
        assert_eq!(spec.lyapunov.len(), 3);
        let chi = oracle_chi_d4();
        let classes = &spec.lyapunov;
        assert!(classes[0].lo <= chi && chi <= classes[0].hi);
        assert!(classes[0].width() <= 1e-12);
        assert!(classes[1].exactly_zero);
        assert_eq!(classes[1].multiplicity, 2);
        assert!(classes[2].lo <= -chi && -chi <= classes[2].hi);
        let total: f64 = classes.iter().map(|c| c.mid() * c.multiplicity as f64).sum();
        assert!(total.abs() < 1e-11);
    }

    #[test]
    fn classify_cat_map() {
        let spec = classify(&cat_map()).unwrap();
        assert_eq!(spec.r1, 2);
        assert_eq!(spec.r2, 0);
        assert_eq!(spec.circle_pairs, 0);
        assert_eq!(spec.center_dim, 0);
        let chi = ((3.0 + 5.0_f64.sqrt()) / 2.0).ln();
        assert!((spec.lyapunov[0].mid() - chi).abs() < 1e-12);
        assert!((spec.lyapunov[1].mid() + chi).abs() < 1e-12);
    }

    #[test]
    fn classify_identity() {
        let spec = classify(&IntMatrix::identity(2)).unwrap();
        assert_eq!(spec.r1, 2);
        assert_eq!(spec.lyapunov.len(), 1);
        assert!(spec.lyapunov[0].exactly_zero);
        assert_eq!(spec.lyapunov[0].multiplicity, 2);
        assert_eq!(spec.center_dim, 2);
    }

    #[test]
    fn classify_rejects_non_automorphism() {
        let m = IntMatrix::from_rows_i64(&[&[2, 0], &[0, 1]]);
        assert!(matches!(classify(&m), Err(Error::NotAutomorphism(_))));
    }

    #[test]
    fn negation_pairing_groups_plus_minus() {
        // cat map against its negation: exponents ±χ each of multiplicity 2
        let l = IntMatrix::from_rows_i64(&[
            &[2, 1, 0, 0],
            &[1, 1, 0, 0],
            &[0, 0, -2, -1],
            &[0, 0, -1, -1],
        ]);
        let spec = classify(&l).unwrap();
        assert_eq!(spec.lyapunov.len(), 2);
        assert_eq!(spec.lyapunov[0].multiplicity, 2);
        assert_eq!(spec.lyapunov[1].multiplicity, 2);
    }

    #[test]
    fn ergodicity_predicate() {
        assert!(is_ergodic(&worked_example_d4()).unwrap());
        assert!(is_ergodic(&cat_map()).unwrap());
        let rot = IntMatrix::companion(&IntPoly::from_i64(&[1, -1, 1])).unwrap();
        assert!(!is_ergodic(&rot).unwrap());
        assert!(!is_ergodic(&IntMatrix::identity(3)).unwrap());
    }

    #[test]
    fn property_p_worked_example() {
        let rep = has_property_p(&worked_example_d4()).unwrap();
        assert!(rep.holds, "failing: {:?}", rep.failing_clauses);
    }

    #[test]
    fn property_p_cat_map_fails_on_circle() {
        let rep = has_property_p(&cat_map()).unwrap();
        assert!(!rep.holds);
        assert!(!rep.one_circle_pair);
        assert!(rep
            .failing_clauses
            .iter()
            .any(|c| c.contains("unit circle")));
    }

    #[test]
    fn property_p_even_polynomial_fails() {
        // companion of t⁴−3t²+1 = Q(t²): the report must cite a failing clause
        let q = IntPoly::from_i64(&[1, 0, -3, 0, 1]);
        let l = IntMatrix::companion(&q).unwrap();
        let rep = has_property_p(&l).unwrap();
        assert!(!rep.holds);
        assert!(!rep.failing_clauses.is_empty());
        assert_eq!(poly_in_tn(&q).unwrap().0, 2);
    }

    #[test]
    fn spread_vacuous_for_d4() {
        let l = worked_example_d4();
        assert!(spread_spectrum(&l, 1).unwrap());
        assert!(spread_spectrum(&l, 100).unwrap());
    }

    #[test]
    fn no_three_same_modulus_examples() {
        assert!(no_three_same_modulus(&worked_example_d4()).unwrap());
        assert!(no_three_same_modulus(&cat_map()).unwrap());
        // L ⊕ L duplicates the circle pair: 4 eigenvalues of modulus 1
        let l = worked_example_d4();
        let mut big = IntMatrix::zero(8);
        for i in 0..4 {
            for j in 0..4 {
                big.set(i, j, l.get(i, j).clone());
                big.set(i + 4, j + 4, l.get(i, j).clone());
            }
        }
        assert!(!no_three_same_modulus(&big).unwrap());
    }

    #[test]
    fn projectors_identity_and_cat() {
        let spec = classify(&IntMatrix::identity(3)).unwrap();
        let pr = projectors(&IntMatrix::identity(3), &spec).unwrap();
        assert_eq!(pr.projectors.len(), 1);
        assert_eq!(pr.sum_residual, 0.0);

        let l = cat_map();
        let spec = classify(&l).unwrap();
        let pr = projectors(&l, &spec).unwrap();
        assert_eq!(pr.projectors.len(), 2);
        let sum = &pr.projectors[0] + &pr.projectors[1];
        assert!(max_abs(&(sum - DMatrix::identity(2, 2))) < 1e-12);
        for r in &pr.idempotency_residuals {
            assert!(*r < 1e-10);
        }
    }

    #[test]
    fn projectors_worked_example_residuals() {
        let l = worked_example_d4();
        let spec = classify(&l).unwrap();
        let pr = projectors(&l, &spec).unwrap();
        assert_eq!(pr.projectors.len(), 3);
        for r in pr
            .idempotency_residuals
            .iter()
            .chain(&pr.commutation_residuals)
        {
            assert!(*r < 1e-10, "residual {r}");
        }
        assert!(pr.sum_residual < 1e-10);
        let c = pr.center(&spec).unwrap();
        assert!((c.trace() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn classify_agrees_with_dense_eigensolver_on_random_gl() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xC1A551F7);
        let mut tested = 0;
        for _ in 0..400 {
            if tested >= 200 {
                break;
            }
            let d = rng.random_range(2..=6usize);
            // random product of elementary matrices stays in GL(d, Z)
            let mut m = IntMatrix::identity(d);
            for _ in 0..12 {
                let i = rng.random_range(0..d);
                let mut j = rng.random_range(0..d);
                while j == i {
                    j = rng.random_range(0..d);
                }
                let c = rng.random_range(-3i64..=3);
                let mut e = IntMatrix::identity(d);
                e.set(i, j, BigInt::from(c));
                m = m.mul(&e);
                if rng.random_bool(0.3) {
                    let mut s = IntMatrix::identity(d);
                    s.set(i, i, BigInt::from(-1));
                    m = m.mul(&s);
                }
            }
            // the dense floating eigensolver is only a trustworthy oracle for
            // simple eigenvalues; defective spectra split like ε^{1/k}
            if !m.char_poly().is_squarefree() {
                continue;
            }
            if m.max_abs_entry() > BigInt::from(1_000_000_000i64) {
                continue;
            }
            let spec = match classify(&m) {
                Ok(s) => s,
                Err(Error::Numerical(_)) => continue,
                Err(e) => panic!("unexpected error {e}"),
            };
            let eigs = m.to_f64().complex_eigenvalues();
            let mut certified: Vec<f64> = Vec::new();
            for c in &spec.lyapunov {
                for _ in 0..c.multiplicity {
                    certified.push(c.mid());
                }
            }
            let mut floating: Vec<f64> = eigs.iter().map(|e| e.norm().ln()).collect();
            certified.sort_by(|a, b| b.partial_cmp(a).unwrap());
            floating.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for (c, f) in certified.iter().zip(&floating) {
                assert!((c - f).abs() < 1e-9, "certified {c} vs floating {f} for\n{m}");
            }
            tested += 1;
        }
        assert!(tested >= 200, "only {tested} matrices tested");
    }
}
