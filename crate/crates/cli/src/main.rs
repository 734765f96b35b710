//! `torcen` — drives every analysis as a subcommand and writes versioned
//! JSON reports.
//!
//! Exit codes: 0 success, 1 usage/parse, 2 precondition violation,
//! 3 numerical failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use torcen::centralizer::{
    bounded_centralizer_subgroup, commutant_basis, cone_search_center_dominating,
    no_hyperbolic_analysis, unit_search,
};
use torcen::constructor::{construct_spread, SearchBudget};
use torcen::dynamics::{
    center_volume_growth, fixed_point_count, fixed_point_permutation, franks_manning,
    lyapunov_spectrum, solve_twisted_cocycle, TorusMap,
};
use torcen::exact::IntMatrix;
use torcen::polyalg::{is_irreducible_q, poly_in_tn};
use torcen::report;
use torcen::spectrum::{
    classify, has_property_p, is_ergodic, no_three_same_modulus, spread_spectrum,
};
use torcen::Error;

#[derive(Parser)]
#[command(name = "torcen", version, about = "Exact and numerical analysis of integer toral automorphisms")]
struct Cli {
    /// Worker threads for parallel loops (default: all cores). Results do
    /// not depend on this. The THREADS environment variable overrides.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Embed wall-clock timings in reports (off by default so identical
    /// inputs produce byte-identical reports).
    #[arg(long, global = true)]
    timings: bool,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral and hypothesis analysis of an integer matrix.
    Analyze(AnalyzeArgs),
    /// Integer commutant, unit discovery, and subgroup procedures.
    Centralizer(CentralizerArgs),
    /// Construct an automorphism with one circle pair and spread spectrum.
    Construct(ConstructArgs),
    /// Numerical analyses of a perturbed automorphism.
    Dynamics(DynamicsArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Matrix file: JSON array of rows of integers.
    matrix: PathBuf,
    /// Also test r-spread spectrum for this r.
    #[arg(long)]
    spread: Option<u32>,
}

#[derive(Args)]
struct CentralizerArgs {
    /// Matrix file: JSON array of rows of integers.
    matrix: PathBuf,
    /// Coordinate radius of the unit enumeration box.
    #[arg(long, default_value_t = 3)]
    radius: i64,
    /// Run the cone search for a center-dominating element.
    #[arg(long)]
    cone: bool,
    /// Construct a bounded subgroup: rank r and domination constant Q.
    #[arg(long, num_args = 2, value_names = ["R", "Q"])]
    subgroup: Option<Vec<String>>,
    /// Run the hyperbolic-free analysis on words of the unit generators.
    #[arg(long)]
    no_hyperbolic: bool,
}

#[derive(Args)]
struct ConstructArgs {
    /// Torus dimension (even, ≥ 4).
    #[arg(long)]
    dim: usize,
    /// Spread factor r.
    #[arg(long, default_value_t = 1)]
    spread: u32,
    /// Max |coefficient| of seed polynomials.
    #[arg(long, default_value_t = 40)]
    budget_coeff: i64,
    /// Max number of seed candidates.
    #[arg(long, default_value_t = 2_000_000)]
    budget_candidates: u64,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 55.0)]
    budget_seconds: f64,
    /// Write the constructed matrix (JSON rows) to this file.
    #[arg(long)]
    matrix_out: Option<PathBuf>,
}

#[derive(Args)]
struct DynamicsArgs {
    /// Map config file: {"linear": rows, "epsilon": e, "modes": [...]}.
    config: PathBuf,
    /// Solve the twisted cohomological equation on this exponent class
    /// (index into the sorted exponent list).
    #[arg(long)]
    cocycle: Option<usize>,
    /// Estimate the Lyapunov spectrum.
    #[arg(long)]
    lyapunov: bool,
    /// Enumerate fixed points.
    #[arg(long)]
    fixed_points: bool,
    /// Solve for the semiconjugacy onto the hyperbolic linear part.
    #[arg(long)]
    semiconjugacy: bool,
    /// Track center volume growth along an orbit.
    #[arg(long)]
    volume_growth: bool,
    /// Solver tolerance.
    #[arg(long, default_value_t = 2e-8)]
    tol: f64,
    /// Orbit length for Lyapunov estimation.
    #[arg(long, default_value_t = 100_000)]
    steps: usize,
    /// Orbit count for Lyapunov estimation.
    #[arg(long, default_value_t = 16)]
    orbits: usize,
    /// Orbit length for volume-growth tracking.
    #[arg(long, default_value_t = 50)]
    growth_steps: usize,
    /// Apply the permutation analysis against this commuting map config.
    #[arg(long)]
    permutation_of: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let threads = std::env::var("THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .or(cli.threads);
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let started = std::time::Instant::now();
    let result = run(&cli);
    match result {
        Ok(mut report) => {
            if cli.timings {
                if let Value::Object(map) = &mut report {
                    map.insert(
                        "wall_clock_seconds".into(),
                        Value::String(report::f64_string(started.elapsed().as_secs_f64())),
                    );
                }
            }
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text + "\n") {
                        eprintln!("error: cannot write report: {e}");
                        std::process::exit(1);
                    }
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    let _ = writeln!(stdout, "{text}");
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: &Cli) -> torcen::Result<Value> {
    match &cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Centralizer(args) => cmd_centralizer(args),
        Command::Construct(args) => cmd_construct(args),
        Command::Dynamics(args) => cmd_dynamics(args),
    }
}

fn read_json(path: &PathBuf) -> torcen::Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Parse(format!(
            "{}: invalid JSON at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn read_matrix(path: &PathBuf) -> torcen::Result<IntMatrix> {
    IntMatrix::from_json(&read_json(path)?)
}

fn cmd_analyze(args: &AnalyzeArgs) -> torcen::Result<Value> {
    let m = read_matrix(&args.matrix)?;
    let spec = classify(&m)?;
    let irreducible = is_irreducible_q(&spec.char_poly)?;
    let ergodic = is_ergodic(&m)?;
    let property_p = has_property_p(&m)?;
    let spread = match args.spread {
        Some(r) if property_p.holds => Some((r, spread_spectrum(&m, r)?)),
        Some(r) => Some((r, false)),
        None => None,
    };
    let no_three = no_three_same_modulus(&m)?;
    let (n, _) = poly_in_tn(&spec.char_poly)?;
    Ok(report::analyze_report(
        &m, &spec, irreducible, ergodic, &property_p, spread, no_three, n,
    ))
}

fn cmd_centralizer(args: &CentralizerArgs) -> torcen::Result<Value> {
    let m = read_matrix(&args.matrix)?;
    let mut cl = commutant_basis(&m)?;
    unit_search(&mut cl, args.radius)?;
    let cone = if args.cone {
        Some(cone_search_center_dominating(&cl, 8)?)
    } else {
        None
    };
    let subgroup = match &args.subgroup {
        Some(rq) => {
            let r: usize = rq[0]
                .parse()
                .map_err(|_| Error::Parse(format!("bad subgroup rank {:?}", rq[0])))?;
            let q: f64 = rq[1]
                .parse()
                .map_err(|_| Error::Parse(format!("bad subgroup Q {:?}", rq[1])))?;
            Some(bounded_centralizer_subgroup(&cl, r, q)?)
        }
        None => None,
    };
    let no_hyp = if args.no_hyperbolic {
        let gens: Vec<IntMatrix> = cl
            .generators
            .iter()
            .map(|&i| cl.units[i].matrix.clone())
            .collect();
        Some(no_hyperbolic_analysis(&m, &gens, 6)?)
    } else {
        None
    };
    Ok(report::centralizer_report(
        &cl,
        args.radius,
        cone.as_ref(),
        subgroup.as_ref(),
        no_hyp.as_ref(),
    ))
}

fn cmd_construct(args: &ConstructArgs) -> torcen::Result<Value> {
    let budget = SearchBudget {
        max_coeff: args.budget_coeff,
        max_candidates: args.budget_candidates,
        max_seconds: args.budget_seconds,
        max_power: 6,
    };
    let (l, build) = construct_spread(args.dim, args.spread, &budget)?;
    let spec = classify(&l)?;
    let spread_ok = spread_spectrum(&l, args.spread)?;
    let (n, _) = poly_in_tn(&build.char_poly)?;
    if let Some(path) = &args.matrix_out {
        let text = serde_json::to_string_pretty(&l.to_json()).expect("matrix serializes");
        std::fs::write(path, text + "\n")
            .map_err(|e| Error::Parse(format!("cannot write matrix: {e}")))?;
    }
    Ok(report::construct_report(
        args.dim,
        args.spread,
        &l,
        &build,
        &spec,
        spread_ok,
        n,
    ))
}

fn cmd_dynamics(args: &DynamicsArgs) -> torcen::Result<Value> {
    let config = read_json(&args.config)?;
    let map = TorusMap::from_json(&config)?;
    if let Some(class) = args.cocycle {
        let sol = solve_twisted_cocycle(&map, class, args.tol)?;
        let fresh = sol.residual_on_fresh_samples(4096, 0xF8E54)?;
        return Ok(report::cocycle_report(&map, &sol, fresh, args.tol));
    }
    if args.lyapunov {
        let est = lyapunov_spectrum(&map, args.steps, args.orbits)?;
        return Ok(report::lyapunov_report(&map, &est));
    }
    if args.fixed_points {
        let rep = fixed_point_count(&map)?;
        let perm = match &args.permutation_of {
            Some(path) => {
                let g = TorusMap::from_json(&read_json(path)?)?;
                Some(fixed_point_permutation(&map, &g, &rep)?)
            }
            None => None,
        };
        return Ok(report::fixed_points_report(&map, &rep, perm.as_deref()));
    }
    if args.semiconjugacy {
        let fm = franks_manning(&map, args.tol)?;
        let fresh = fm.residual_on_fresh_samples(4096, 0x5EC0)?;
        return Ok(report::semiconjugacy_report(&map, &fm, fresh, args.tol));
    }
    if args.volume_growth {
        let rep = center_volume_growth(&map, &map, args.growth_steps, 1.0, 0.0)?;
        return Ok(report::volume_growth_report(&map, &rep, args.growth_steps));
    }
    Err(Error::Parse(
        "dynamics requires one of --cocycle, --lyapunov, --fixed-points, \
         --semiconjugacy, --volume-growth"
            .into(),
    ))
}
