//! Command-line harness: single solves, the sparse and compressible
//! studies, restricted isometry checks, and a matrix-property verification
//! suite.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 resource cap
//! exceeded, 3 numerical failure (including failed verification).

mod config;
mod dump;
mod experiments;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cscolloc::{
    assemble_full, checkerboard, coherence_bound, cosine_matrix, default_m_k,
    mat::symmetric_eigenvalues, mat::LuFactor, sine_matrix, spectral_bounds, verify_rip_theorem,
    CompressiveParams, DiffusionCoefficient, Error as CoreError, ManufacturedSolution, Mat,
    ProblemSpec,
};

use config::{EtaDescriptor, ExperimentConfig, ExperimentKind, FullRecovery};
use experiments::manufactured;
use report::SolveReport;

#[derive(Parser)]
#[command(
    name = "cscolloc",
    about = "Compressive spectral collocation for the stationary diffusion equation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the built-in manufactured diffusion problem once and print a
    /// JSON report
    Solve(SolveArgs),
    /// Sparse-recovery study: random s-sparse targets, synthetic RHS
    SparseExp(ExpArgs),
    /// Compressible study: smooth manufactured solution, L2 errors
    CompressibleExp(ExpArgs),
    /// Restricted isometry success rates on small instances
    RipCheck(RipArgs),
    /// Matrix-property verification suite (identities and bounds)
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FullRecoveryArg {
    Direct,
    Omp,
}

impl From<FullRecoveryArg> for FullRecovery {
    fn from(value: FullRecoveryArg) -> Self {
        match value {
            FullRecoveryArg::Direct => FullRecovery::Direct,
            FullRecoveryArg::Omp => FullRecovery::Omp,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Only d = 2 is supported by the built-in problem
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Affine diffusion weights, e.g. `--eta-affine 0.25,0.25`; omit for
    /// the constant coefficient
    #[arg(long, value_delimiter = ',')]
    eta_affine: Option<Vec<f64>>,
    /// Target sparsity: switches from the full dense solve to the
    /// compressive solve with defaults m = ceil(2 s ln N), K = s
    #[arg(long)]
    sparsity: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for report.json (default: print to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include the coefficient vector in the report
    #[arg(long)]
    with_coefficients: bool,
    /// Also dump the assembled dense system (B, c) in the binary format
    #[arg(long)]
    dump_system: Option<PathBuf>,
}

#[derive(Args)]
struct ExpArgs {
    /// TOML config file; command-line flags are ignored when present
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated sparsity sweep, e.g. `--sparsity 2,4,8`
    #[arg(long, value_delimiter = ',')]
    sparsity: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    eta_affine: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    full_recovery: Option<FullRecoveryArg>,
    /// Skip the full (dense) solver
    #[arg(long)]
    skip_full: bool,
    /// Skip the compressive solver
    #[arg(long)]
    skip_compressive: bool,
    /// Output directory for records.csv and summary.json
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RipArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    sparsity: Vec<usize>,
    /// Row counts to test; defaults to ceil(2 s ln N) per sparsity
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',')]
    eta_affine: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.5)]
    delta_target: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Grid sizes to verify
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.25")]
    eta_affine: Vec<f64>,
}

fn exit_code_for(err: &CoreError) -> u8 {
    match err {
        CoreError::InvalidArgument(_) | CoreError::InvalidIndex { .. } => 1,
        CoreError::ResourceLimit(_) => 2,
        CoreError::Numerical(_) | CoreError::ZeroReference => 3,
    }
}

fn fail(code: u8, message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn fail_core(err: CoreError) -> ExitCode {
    fail(exit_code_for(&err), &err.to_string())
}

fn eta_from_flag(weights: &Option<Vec<f64>>, d: usize) -> Result<DiffusionCoefficient, CoreError> {
    match weights {
        None => DiffusionCoefficient::constant(1.0),
        Some(w) => {
            if w.len() != d {
                return Err(CoreError::InvalidArgument(format!(
                    "--eta-affine has {} weights but d = {d}",
                    w.len()
                )));
            }
            DiffusionCoefficient::affine(w.clone())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::SparseExp(args) => run_experiment(args, ExperimentKind::Sparse),
        Command::CompressibleExp(args) => run_experiment(args, ExperimentKind::Compressible),
        Command::RipCheck(args) => run_rip_check(args),
        Command::Verify(args) => run_verify(args),
    }
}

fn run_solve(args: SolveArgs) -> ExitCode {
    if args.d != 2 {
        return fail(1, "the built-in manufactured problem requires --d 2");
    }
    let eta = match eta_from_flag(&args.eta_affine, args.d) {
        Ok(eta) => eta,
        Err(e) => return fail_core(e),
    };
    let solution = ManufacturedSolution {
        u: &manufactured::u,
        grad_u: &manufactured::grad_u,
        lap_u: &manufactured::lap_u,
    };
    let forcing = cscolloc::manufactured_forcing(&solution, &eta);
    let problem = match ProblemSpec::new(&eta, forcing.as_ref(), args.n, args.d) {
        Ok(p) => p,
        Err(e) => return fail_core(e),
    };

    let report = if let Some(s) = args.sparsity {
        let (m, k) = match default_m_k(s, args.n.pow(args.d as u32)) {
            Ok(v) => v,
            Err(e) => return fail_core(e),
        };
        let params = CompressiveParams {
            m,
            k,
            seed: args.seed,
        };
        let t0 = Instant::now();
        let draw = match cscolloc::draw_indices(m, args.n, args.d, args.seed) {
            Ok(v) => v,
            Err(e) => return fail_core(e),
        };
        let system = match cscolloc::build_compressive(
            &eta,
            cscolloc::CompressiveRhs::Forcing(forcing.as_ref()),
            args.n,
            args.d,
            &draw,
        ) {
            Ok(v) => v,
            Err(e) => return fail_core(e),
        };
        let assembly_seconds = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let solve = match cscolloc::recover_from_system(system, params) {
            Ok(v) => v,
            Err(e) => return fail_core(e),
        };
        let recovery_seconds = t1.elapsed().as_secs_f64();
        let coeffs = solve.coefficients();
        let l2_error =
            cscolloc::quadrature::relative_l2_error_field(&coeffs, args.n, args.d, &manufactured::u)
                .ok();
        SolveReport {
            method: "compressive",
            n: args.n,
            d: args.d,
            assembly_seconds,
            recovery_seconds,
            condition_estimate: None,
            seed: Some(args.seed),
            m: Some(m),
            k: Some(k),
            s: Some(s),
            l2_error,
            coefficients: args.with_coefficients.then_some(coeffs),
        }
    } else {
        let t0 = Instant::now();
        let sys = match assemble_full(&eta, forcing.as_ref(), args.n, args.d) {
            Ok(v) => v,
            Err(e) => return fail_core(e),
        };
        let assembly_seconds = t0.elapsed().as_secs_f64();
        if let Some(path) = &args.dump_system {
            if let Err(e) = fs::File::create(path)
                .and_then(|f| dump::write_system(std::io::BufWriter::new(f), &sys))
            {
                return fail(1, &format!("cannot write {}: {e}", path.display()));
            }
        }
        let t1 = Instant::now();
        let lu = match LuFactor::new(&sys.b) {
            Ok(v) => v,
            Err(e) => return fail_core(e),
        };
        let cond = lu.condition_estimate(&sys.b);
        if !cond.is_finite() || cond > cscolloc::solver::CONDITION_LIMIT {
            return fail(3, &format!("condition estimate {cond:.3e} too large"));
        }
        let coeffs = lu.solve(&sys.c);
        let recovery_seconds = t1.elapsed().as_secs_f64();
        let l2_error =
            cscolloc::quadrature::relative_l2_error_field(&coeffs, args.n, args.d, &manufactured::u)
                .ok();
        SolveReport {
            method: "full-direct",
            n: args.n,
            d: args.d,
            assembly_seconds,
            recovery_seconds,
            condition_estimate: Some(cond),
            seed: None,
            m: None,
            k: None,
            s: None,
            l2_error,
            coefficients: args.with_coefficients.then_some(coeffs),
        }
    };

    // compressive runs never reach the dump path above; honor the flag there
    // too by re-assembling on request
    if args.sparsity.is_some() {
        if let Some(path) = &args.dump_system {
            let sys = match assemble_full(&eta, forcing.as_ref(), args.n, args.d) {
                Ok(v) => v,
                Err(e) => return fail_core(e),
            };
            if let Err(e) = fs::File::create(path)
                .and_then(|f| dump::write_system(std::io::BufWriter::new(f), &sys))
            {
                return fail(1, &format!("cannot write {}: {e}", path.display()));
            }
        }
    }
    drop(problem);

    let text = report.to_json();
    match &args.out {
        Some(dir) => {
            if let Err(e) = fs::create_dir_all(dir)
                .and_then(|_| fs::write(dir.join("report.json"), text.as_bytes()))
            {
                return fail(1, &format!("cannot write report: {e}"));
            }
            println!("wrote {}", dir.join("report.json").display());
        }
        None => println!("{text}"),
    }
    ExitCode::SUCCESS
}

fn build_config(args: &ExpArgs, kind: ExperimentKind) -> Result<ExperimentConfig, String> {
    if let Some(path) = &args.config {
        let text =
            fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        return ExperimentConfig::from_toml(&text);
    }
    let mut config = ExperimentConfig::defaults(kind);
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(d) = args.d {
        config.d = d;
        // keep the default eta consistent when the dimension changes
        if args.eta_affine.is_none() {
            config.eta = EtaDescriptor::Affine {
                weights: vec![0.25; d],
            };
        }
    }
    if let Some(s) = &args.sparsity {
        config.sparsity = s.clone();
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(seed) = args.seed {
        config.seed_base = seed;
    }
    if let Some(w) = &args.eta_affine {
        config.eta = EtaDescriptor::Affine { weights: w.clone() };
    }
    if let Some(mode) = args.full_recovery {
        config.full_recovery = mode.into();
    }
    if args.skip_full {
        config.run_full = false;
    }
    if args.skip_compressive {
        config.run_compressive = false;
    }
    config.out_dir = args.out.clone();
    config.validate()?;
    Ok(config)
}

fn run_experiment(args: ExpArgs, kind: ExperimentKind) -> ExitCode {
    let config = match build_config(&args, kind) {
        Ok(c) => c,
        Err(msg) => return fail(1, &msg),
    };
    let records = match kind {
        ExperimentKind::Sparse => experiments::run_sparse_experiment(&config),
        ExperimentKind::Compressible => experiments::run_compressible_experiment(&config),
        _ => unreachable!("run_experiment only handles the two studies"),
    };
    let records = match records {
        Ok(r) => r,
        Err(e) => return fail_core(e),
    };
    let summary = experiments::summarize(&records);
    if let Some(dir) = config.out_dir.as_ref().or(args.out.as_ref()) {
        if let Err(e) = fs::create_dir_all(dir) {
            return fail(1, &format!("cannot create {}: {e}", dir.display()));
        }
        let csv_path = dir.join("records.csv");
        let result = fs::File::create(&csv_path)
            .map_err(|e| e.to_string())
            .and_then(|f| experiments::write_csv(f, &records).map_err(|e| e.to_string()));
        if let Err(e) = result {
            return fail(1, &format!("cannot write {}: {e}", csv_path.display()));
        }
        let json_path = dir.join("summary.json");
        let result = fs::File::create(&json_path)
            .map_err(|e| e.to_string())
            .and_then(|f| experiments::write_summary_json(f, &summary).map_err(|e| e.to_string()));
        if let Err(e) = result {
            return fail(1, &format!("cannot write {}: {e}", json_path.display()));
        }
        println!(
            "wrote {} ({} records) and {}",
            csv_path.display(),
            records.len(),
            json_path.display()
        );
    } else if let Err(e) = experiments::write_summary_json(std::io::stdout().lock(), &summary) {
        return fail(1, &format!("cannot write summary: {e}"));
    }
    ExitCode::SUCCESS
}

fn run_rip_check(args: RipArgs) -> ExitCode {
    let eta = match eta_from_flag(&args.eta_affine, args.d) {
        Ok(eta) => eta,
        Err(e) => return fail_core(e),
    };
    let ambient = args.n.pow(args.d as u32);
    if let Some(ms) = &args.m {
        if ms.len() != args.sparsity.len() {
            return fail(1, "--m must list one value per sparsity");
        }
    }
    let mut rows = Vec::new();
    for (i, &s) in args.sparsity.iter().enumerate() {
        let m = match &args.m {
            Some(ms) => ms[i],
            None => match default_m_k(s, ambient) {
                Ok((m, _)) => m,
                Err(e) => return fail_core(e),
            },
        };
        let rate = match verify_rip_theorem(
            &eta,
            args.n,
            args.d,
            s,
            m,
            args.delta_target,
            args.trials,
            args.seed,
        ) {
            Ok(r) => r,
            Err(e) => return fail_core(e),
        };
        rows.push(serde_json::json!({
            "s": s,
            "m": m,
            "trials": args.trials,
            "delta_target": args.delta_target,
            "success_rate": rate,
        }));
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::Value::Array(rows)).expect("serializes")
    );
    ExitCode::SUCCESS
}

fn check(name: &str, ok: bool, detail: &str, all_ok: &mut bool) {
    println!("{}: {name} ({detail})", if ok { "PASS" } else { "FAIL" });
    if !ok {
        *all_ok = false;
    }
}

fn run_verify(args: VerifyArgs) -> ExitCode {
    if args.d != 2 {
        return fail(1, "the verification suite is defined for --d 2");
    }
    let affine = match DiffusionCoefficient::affine(args.eta_affine.clone()) {
        Ok(eta) => eta,
        Err(e) => return fail_core(e),
    };
    let poisson = DiffusionCoefficient::constant(1.0).expect("constant eta");
    let zero = |_: &[f64]| 0.0;
    let mut all_ok = true;

    for &n in &args.n {
        // dense system vs the sine Kronecker product, and its orthogonality
        let sys = match assemble_full(&poisson, &zero, n, 2) {
            Ok(v) => v,
            Err(e) => return fail_core(e),
        };
        let s = match sine_matrix(n) {
            Ok(v) => v.mat,
            Err(e) => return fail_core(e),
        };
        let kron = s.kron(&s);
        let dev = sys.b.max_abs_diff(&kron);
        check(
            &format!("kronecker identity n={n}"),
            dev < 1e-12,
            &format!("max dev {dev:.2e}"),
            &mut all_ok,
        );
        let gram_dev = sys.b.gram().max_abs_diff(&Mat::identity(n * n));
        check(
            &format!("orthogonality n={n}"),
            gram_dev < 1e-10,
            &format!("max dev {gram_dev:.2e}"),
            &mut all_ok,
        );

        // spectrum containment for the affine coefficient
        let sys = match assemble_full(&affine, &zero, n, 2) {
            Ok(v) => v,
            Err(e) => return fail_core(e),
        };
        let bounds = spectral_bounds(&affine, 2);
        let eigs = symmetric_eigenvalues(&sys.b.gram());
        let lo = eigs[0];
        let hi = *eigs.last().unwrap();
        check(
            &format!("spectrum containment n={n}"),
            lo >= bounds.r - 1e-8 && hi <= bounds.upper + 1e-8,
            &format!(
                "eigs in [{lo:.6}, {hi:.6}], bounds [{:.6}, {:.6}]",
                bounds.r, bounds.upper
            ),
            &mut all_ok,
        );

        // entrywise local coherence bound
        let (_, within) = coherence_bound(&sys, &bounds);
        check(
            &format!("coherence bound n={n}"),
            within,
            "max_j B_qj^2 <= 2^d R / N",
            &mut all_ok,
        );
    }

    // transform identities up to n = 64
    let mut max_sine_dev = 0.0f64;
    let mut max_cosine_dev = 0.0f64;
    for n in 1..=64usize {
        let s = match sine_matrix(n) {
            Ok(v) => v.mat,
            Err(e) => return fail_core(e),
        };
        max_sine_dev = max_sine_dev.max(s.gram().max_abs_diff(&Mat::identity(n)));
        let c = match cosine_matrix(n) {
            Ok(v) => v.mat,
            Err(e) => return fail_core(e),
        };
        let q = match checkerboard(n) {
            Ok(v) => v.mat,
            Err(e) => return fail_core(e),
        };
        let mut expected = Mat::identity(n);
        for i in 0..n {
            for j in 0..n {
                expected[(i, j)] -= 2.0 / (n as f64 + 1.0) * q[(i, j)];
            }
        }
        max_cosine_dev = max_cosine_dev.max(c.gram().max_abs_diff(&expected));
    }
    check(
        "sine transform identity n<=64",
        max_sine_dev < 1e-12,
        &format!("max dev {max_sine_dev:.2e}"),
        &mut all_ok,
    );
    check(
        "cosine transform identity n<=64",
        max_cosine_dev < 1e-12,
        &format!("max dev {max_cosine_dev:.2e}"),
        &mut all_ok,
    );

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
