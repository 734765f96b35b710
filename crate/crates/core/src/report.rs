//! Versioned JSON reports.
//!
//! Conventions: `schema_version` starts at 1; floats are serialized as
//! decimal strings with 17 significant digits; exact integers and rationals
//! are strings. Identical inputs produce byte-identical reports (fixed
//! seeds, fixed enumeration order, no timestamps).

use serde_json::{json, Value};

use crate::centralizer::{
    BoundedSubgroup, CommutantLattice, ConeElement, Dependence, NoHyperbolicReport,
};
use crate::constructor::BuildReport;
use crate::dynamics::{
    CocycleSolution, FixedPointReport, FranksManningMap, LyapunovEstimate, TorusMap,
    VolumeGrowthReport,
};
use crate::exact::IntMatrix;
use crate::polyalg::RootInterval;
use crate::spectrum::{CertifiedSpectrum, PropertyPReport};

pub const SCHEMA_VERSION: u32 = 1;

/// 17-significant-digit decimal string for a binary64 value.
pub fn f64_string(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn rational_pair(iv: &RootInterval) -> Value {
    json!({
        "lo": { "num": iv.lo.numer().to_string(), "den": iv.lo.denom().to_string() },
        "hi": { "num": iv.hi.numer().to_string(), "den": iv.hi.denom().to_string() },
    })
}

/// FNV-1a hash of a canonical string, for embedding config hashes.
pub fn fnv1a_hex(data: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in data.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

pub fn spectrum_json(spec: &CertifiedSpectrum) -> Value {
    json!({
        "dim": spec.dim,
        "char_poly": spec.char_poly.to_json(),
        "det": spec.det.to_string(),
        "r1": spec.r1,
        "r2": spec.r2,
        "circle_pairs": spec.circle_pairs,
        "center_dim": spec.center_dim,
        "exponents": spec.lyapunov.iter().map(|c| json!({
            "lo": f64_string(c.lo),
            "hi": f64_string(c.hi),
            "multiplicity": c.multiplicity,
            "exactly_zero": c.exactly_zero,
        })).collect::<Vec<_>>(),
    })
}

pub fn property_p_json(rep: &PropertyPReport) -> Value {
    json!({
        "holds": rep.holds,
        "clauses": {
            "dimension_ok": rep.dimension_ok,
            "irreducible": rep.irreducible,
            "one_circle_pair": rep.one_circle_pair,
            "off_circle_real": rep.off_circle_real,
        },
        "failing": rep.failing_clauses,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn analyze_report(
    matrix: &IntMatrix,
    spec: &CertifiedSpectrum,
    irreducible: bool,
    ergodic: bool,
    property_p: &PropertyPReport,
    spread: Option<(u32, bool)>,
    no_three: bool,
    pseudo_anosov_n: usize,
) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "analyze",
        "matrix": matrix.to_json(),
        "spectrum": spectrum_json(spec),
        "irreducible": irreducible,
        "ergodic": ergodic,
        "property_p": property_p_json(property_p),
        "spread": spread.map(|(r, ok)| json!({ "r": r, "holds": ok })),
        "no_three_same_modulus": no_three,
        "poly_in_tn": pseudo_anosov_n,
        "pseudo_anosov": pseudo_anosov_n == 1,
        "centralizer_rank_bound": spec.r1 + spec.r2 - 1,
    })
}

fn dependence_str(d: Dependence) -> &'static str {
    match d {
        Dependence::Generator => "generator",
        Dependence::Torsion => "torsion",
        Dependence::Confirmed => "dependent_confirmed",
        Dependence::Unconfirmed => "dependent_unconfirmed",
    }
}

pub fn centralizer_report(
    cl: &CommutantLattice,
    radius: i64,
    cone: Option<&Option<ConeElement>>,
    subgroup: Option<&BoundedSubgroup>,
    no_hyperbolic: Option<&NoHyperbolicReport>,
) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "centralizer",
        "matrix": cl.ambient.to_json(),
        "radius": radius,
        "commutant_rank": cl.lattice.rank(),
        "commutant_basis": cl.basis_matrices.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
        "achieved_rank": cl.achieved_rank,
        "units": cl.units.iter().map(|u| json!({
            "matrix": u.matrix.to_json(),
            "det": u.det,
            "label": u.label,
            "lambda": u.lambda.iter().map(|x| f64_string(*x)).collect::<Vec<_>>(),
            "functionals": u.full_values.iter().map(|x| f64_string(*x)).collect::<Vec<_>>(),
            "hyperbolic": u.hyperbolic,
            "finite_order": u.finite_order,
            "dependence": dependence_str(u.dependence),
        })).collect::<Vec<_>>(),
        "generators": cl.generators,
        "cone": cone.map(|c| match c {
            Some(e) => json!({
                "found": true,
                "matrix": e.matrix.to_json(),
                "word": e.word,
                "exponents": e.exponents,
                "values": e.values.iter().map(|x| f64_string(*x)).collect::<Vec<_>>(),
                "center_log_det": f64_string(e.center_log_det),
                "domination_ratio": f64_string(e.domination_ratio),
            }),
            None => json!({ "found": false }),
        }),
        "subgroup": subgroup.map(|s| json!({
            "generators": s.generators.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
            "exponents": s.exponents,
            "omega_bound": f64_string(s.omega_bound),
            "certificate_max_violation": f64_string(s.certificate_max_violation),
            "certificate_words": s.certificate_words,
        })),
        "no_hyperbolic": no_hyperbolic.map(|r| json!({
            "witness": r.hyperbolic_witness.as_ref().map(|(m, w)| json!({
                "matrix": m.to_json(),
                "word": w,
            })),
            "pairing_deviation": f64_string(r.pairing_deviation),
            "sampled_rank": r.sampled_rank,
            "rank_bound": r.rank_bound,
            "words_sampled": r.words_sampled,
        })),
    })
}

pub fn construct_report(
    d: usize,
    r: u32,
    matrix: &IntMatrix,
    build: &BuildReport,
    spec: &CertifiedSpectrum,
    spread_ok: bool,
    pseudo_anosov_n: usize,
) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "construct",
        "dim": d,
        "spread_r": r,
        "matrix": matrix.to_json(),
        "seed": build.seed.to_json(),
        "char_poly": build.char_poly.to_json(),
        "det": build.det.to_string(),
        "irreducible": build.irreducible,
        "property_p": property_p_json(&build.property_p),
        "spread_holds": spread_ok,
        "poly_in_tn": pseudo_anosov_n,
        "spectrum": spectrum_json(spec),
    })
}

pub fn map_config_hash(map: &TorusMap) -> String {
    fnv1a_hex(&map.to_json().to_string())
}

pub fn cocycle_report(map: &TorusMap, sol: &CocycleSolution, fresh_residual: f64, tol: f64) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "cocycle",
        "config_hash": map_config_hash(map),
        "tolerance": f64_string(tol),
        "class_index": sol.class_index,
        "expanding": sol.expanding,
        "truncation": sol.truncation,
        "rho": f64_string(sol.rho),
        "bound": f64_string(sol.bound),
        "residual_sup": f64_string(sol.residual_sup),
        "fresh_residual_sup": f64_string(fresh_residual),
        "grid_size": sol.grid_size,
    })
}

pub fn lyapunov_report(map: &TorusMap, est: &LyapunovEstimate) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "lyapunov",
        "config_hash": map_config_hash(map),
        "n_steps": est.n_steps,
        "n_orbits": est.n_orbits,
        "exponents": est.exponents.iter().map(|x| f64_string(*x)).collect::<Vec<_>>(),
        "stderr": est.stderr.iter().map(|x| f64_string(*x)).collect::<Vec<_>>(),
        "blocks": est.blocks,
    })
}

pub fn fixed_points_report(map: &TorusMap, rep: &FixedPointReport, permutation: Option<&[usize]>) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "fixed_points",
        "config_hash": map_config_hash(map),
        "algebraic_count": rep.algebraic_count,
        "numeric_count": rep.points.len(),
        "max_residual": f64_string(rep.max_residual),
        "points": rep.points.iter().map(|p| {
            p.iter().map(|x| f64_string(*x)).collect::<Vec<_>>()
        }).collect::<Vec<_>>(),
        "permutation": permutation,
    })
}

pub fn semiconjugacy_report(map: &TorusMap, fm: &FranksManningMap, fresh_residual: f64, tol: f64) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "semiconjugacy",
        "config_hash": map_config_hash(map),
        "tolerance": f64_string(tol),
        "truncation_u": fm.truncation_u,
        "truncation_s": fm.truncation_s,
        "rho": f64_string(fm.rho),
        "bound": f64_string(fm.bound),
        "residual_sup": f64_string(fm.residual_sup),
        "fresh_residual_sup": f64_string(fresh_residual),
        "grid_size": fm.grid_size,
    })
}

pub fn volume_growth_report(map: &TorusMap, rep: &VolumeGrowthReport, n: usize) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "volume_growth",
        "config_hash": map_config_hash(map),
        "steps": n,
        "mean_rate": f64_string(rep.mean_rate),
        "linear_center_rate": f64_string(rep.linear_center_rate),
        "comparison_rhs": f64_string(rep.comparison_rhs),
        "inequality_holds": rep.inequality_holds,
        "refine_depth": rep.refine_depth,
        "step_rates": rep.step_rates.iter().map(|x| f64_string(*x)).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_17_digits() {
        let s = f64_string(0.9624236501192069);
        assert_eq!(s, "9.6242365011920694e-1");
        // 17 significant digits plus one exponent digit
        assert_eq!(s.chars().filter(|c| c.is_ascii_digit()).count(), 18);
        // round-trips exactly
        let back: f64 = s.parse().unwrap();
        assert_eq!(back, 0.9624236501192069);
    }

    #[test]
    fn fnv_is_stable() {
        assert_eq!(fnv1a_hex("abc"), fnv1a_hex("abc"));
        assert_ne!(fnv1a_hex("abc"), fnv1a_hex("abd"));
    }
}
