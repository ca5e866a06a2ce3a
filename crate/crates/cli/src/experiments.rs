//! Experiment drivers: sparse-recovery and compressible studies, per-trial
//! records, box-plot summaries, and the CSV/JSON writers.

use std::time::Instant;

use cscolloc::{
    assemble_full, default_m_k, draw_indices, mat::LuFactor, omp, recover_from_system,
    relative_l2_coeff_error, sampling::build_compressive, sampling::CompressiveRhs,
    CompressiveParams, ManufacturedSolution, ProblemSpec,
};
#[cfg(test)]
use cscolloc::DiffusionCoefficient;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, FullRecovery};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FullDirect,
    FullOmp,
    Compressive,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::FullDirect => "full-direct",
            Method::FullOmp => "full-omp",
            Method::Compressive => "compressive",
        }
    }
}

/// One timed solve. `error` is the relative l2 coefficient error for the
/// sparse study and the relative L2 function error for the compressible one.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub experiment: &'static str,
    pub method: Method,
    pub n: usize,
    pub d: usize,
    pub s: usize,
    pub m: usize,
    pub k: usize,
    pub trial: usize,
    pub seed: u64,
    pub assembly_s: f64,
    pub recovery_s: f64,
    pub error: f64,
}

/// Rayon pool sized by `CS_COLLOC_THREADS` (unset or 0 means the rayon
/// default).
pub fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var("CS_COLLOC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

fn sort_records(records: &mut [TrialRecord]) {
    records.sort_by(|a, b| {
        (a.method, a.s, a.trial)
            .partial_cmp(&(b.method, b.s, b.trial))
            .unwrap()
    });
}

/// Random s-sparse coefficient vector: support uniform over [N] without
/// replacement, values standard normal. Deterministic per seed.
fn draw_sparse_target(ambient: usize, s: usize, seed: u64) -> Vec<(usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut support: Vec<usize> = rand::seq::index::sample(&mut rng, ambient, s).into_vec();
    support.sort_unstable();
    support
        .into_iter()
        .map(|j| (j, StandardNormal.sample(&mut rng)))
        .collect()
}

fn densify_sparse(sparse: &[(usize, f64)], ambient: usize) -> Vec<f64> {
    let mut x = vec![0.0; ambient];
    for &(j, v) in sparse {
        x[j] = v;
    }
    x
}

/// OMP with K iterations on the column-normalized dense system, entries
/// rescaled back (the "full-omp" method of the sparse/compressible studies).
fn full_omp_solve(b: &cscolloc::Mat, c: &[f64], k: usize) -> Result<Vec<f64>, cscolloc::Error> {
    let ambient = b.cols();
    let mut norms = vec![0.0f64; ambient];
    for i in 0..b.rows() {
        let row = b.row(i);
        for (j, v) in row.iter().enumerate() {
            norms[j] += v * v;
        }
    }
    let mut eligible = vec![true; ambient];
    for (j, norm) in norms.iter_mut().enumerate() {
        *norm = norm.sqrt();
        if *norm == 0.0 {
            *norm = 1.0;
            eligible[j] = false;
        }
    }
    let mut normalized = b.clone();
    for i in 0..normalized.rows() {
        let row = normalized.row_mut(i);
        for (j, v) in row.iter_mut().enumerate() {
            *v /= norms[j];
        }
    }
    let solution = omp(&normalized, c, k, Some(&eligible))?;
    let mut x = solution.densify();
    for (j, v) in x.iter_mut().enumerate() {
        if *v != 0.0 {
            *v /= norms[j];
        }
    }
    Ok(x)
}

/// Sparse-recovery study: random s-sparse targets, synthetic right-hand
/// side `c = B x`, full and/or compressive recovery, relative coefficient
/// errors.
pub fn run_sparse_experiment(
    config: &ExperimentConfig,
) -> Result<Vec<TrialRecord>, cscolloc::Error> {
    config
        .validate()
        .map_err(cscolloc::Error::InvalidArgument)?;
    let eta = config.eta.build(config.d)?;
    let ambient = config.ambient();
    let pool = thread_pool();

    // warm-up solve: populates allocator and code caches so the first
    // recorded trial is not biased
    {
        let s = config.sparsity[0];
        let (m, k) = default_m_k(s, ambient)?;
        let target = draw_sparse_target(ambient, s, config.seed_base.wrapping_sub(1));
        let params = CompressiveParams {
            m,
            k,
            seed: config.seed_base.wrapping_sub(1),
        };
        let _ = cscolloc::solve_compressive_synthetic(&eta, &target, config.n, config.d, &params)?;
    }

    let mut records: Vec<TrialRecord> = Vec::new();
    for &s in &config.sparsity {
        let (m, k) = default_m_k(s, ambient)?;
        let trial_results: Vec<Result<Vec<TrialRecord>, cscolloc::Error>> = pool.install(|| {
            (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let seed = config.seed_base.wrapping_add(trial as u64);
                    let target = draw_sparse_target(ambient, s, seed);
                    let x_true = densify_sparse(&target, ambient);
                    let mut out = Vec::new();

                    if config.run_compressive {
                        let t0 = Instant::now();
                        let draw = draw_indices(m, config.n, config.d, seed)?;
                        let system = build_compressive(
                            &eta,
                            CompressiveRhs::Coefficients(&target),
                            config.n,
                            config.d,
                            &draw,
                        )?;
                        let assembly_s = t0.elapsed().as_secs_f64();
                        let t1 = Instant::now();
                        let solve =
                            recover_from_system(system, CompressiveParams { m, k, seed })?;
                        let recovery_s = t1.elapsed().as_secs_f64();
                        let error = relative_l2_coeff_error(&x_true, &solve.coefficients())?;
                        out.push(TrialRecord {
                            experiment: "sparse",
                            method: Method::Compressive,
                            n: config.n,
                            d: config.d,
                            s,
                            m,
                            k,
                            trial,
                            seed,
                            assembly_s,
                            recovery_s,
                            error,
                        });
                    }

                    if config.run_full {
                        let zero = |_: &[f64]| 0.0;
                        let t0 = Instant::now();
                        let sys = assemble_full(&eta, &zero, config.n, config.d)?;
                        let c = sys.b.matvec(&x_true);
                        let assembly_s = t0.elapsed().as_secs_f64();
                        let t1 = Instant::now();
                        let (method, x_hat) = match config.full_recovery {
                            FullRecovery::Direct => {
                                let lu = LuFactor::new(&sys.b)?;
                                (Method::FullDirect, lu.solve(&c))
                            }
                            FullRecovery::Omp => {
                                (Method::FullOmp, full_omp_solve(&sys.b, &c, s)?)
                            }
                        };
                        let recovery_s = t1.elapsed().as_secs_f64();
                        let error = relative_l2_coeff_error(&x_true, &x_hat)?;
                        out.push(TrialRecord {
                            experiment: "sparse",
                            method,
                            n: config.n,
                            d: config.d,
                            s,
                            m: ambient,
                            k: if method == Method::FullOmp { s } else { 0 },
                            trial,
                            seed,
                            assembly_s,
                            recovery_s,
                            error,
                        });
                    }
                    Ok(out)
                })
                .collect()
        });
        for r in trial_results {
            records.extend(r?);
        }
    }
    sort_records(&mut records);
    Ok(records)
}

/// The compressible study's exact solution `u(z) = (16 z1 z2 (1-z1)(1-z2))^2`
/// as a separable product `256 g(z1) g(z2)`, with analytic derivatives.
pub mod manufactured {
    pub fn g(t: f64) -> f64 {
        let w = t * (1.0 - t);
        w * w
    }

    pub fn dg(t: f64) -> f64 {
        2.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    }

    pub fn ddg(t: f64) -> f64 {
        let a = 1.0 - 2.0 * t;
        2.0 * (a * a - 2.0 * t * (1.0 - t))
    }

    pub fn u(z: &[f64]) -> f64 {
        256.0 * g(z[0]) * g(z[1])
    }

    pub fn grad_u(z: &[f64]) -> Vec<f64> {
        vec![256.0 * dg(z[0]) * g(z[1]), 256.0 * g(z[0]) * dg(z[1])]
    }

    pub fn lap_u(z: &[f64]) -> f64 {
        256.0 * (ddg(z[0]) * g(z[1]) + g(z[0]) * ddg(z[1]))
    }
}

/// Compressible study: manufactured smooth solution, forcing derived
/// analytically, relative L2 function errors for full and compressive
/// solves.
pub fn run_compressible_experiment(
    config: &ExperimentConfig,
) -> Result<Vec<TrialRecord>, cscolloc::Error> {
    config
        .validate()
        .map_err(cscolloc::Error::InvalidArgument)?;
    let eta = config.eta.build(config.d)?;
    let solution = ManufacturedSolution {
        u: &manufactured::u,
        grad_u: &manufactured::grad_u,
        lap_u: &manufactured::lap_u,
    };
    let forcing = cscolloc::manufactured_forcing(&solution, &eta);
    let problem = ProblemSpec::new(&eta, forcing.as_ref(), config.n, config.d)?;
    let pool = thread_pool();
    let mut records: Vec<TrialRecord> = Vec::new();

    if config.run_full {
        match config.full_recovery {
            FullRecovery::Direct => {
                let t0 = Instant::now();
                let sys = assemble_full(&eta, forcing.as_ref(), config.n, config.d)?;
                let assembly_s = t0.elapsed().as_secs_f64();
                let t1 = Instant::now();
                let lu = LuFactor::new(&sys.b)?;
                let x_full = lu.solve(&sys.c);
                let recovery_s = t1.elapsed().as_secs_f64();
                let error = cscolloc::quadrature::relative_l2_error_field(
                    &x_full,
                    config.n,
                    config.d,
                    &manufactured::u,
                )?;
                records.push(TrialRecord {
                    experiment: "compressible",
                    method: Method::FullDirect,
                    n: config.n,
                    d: config.d,
                    s: 0,
                    m: config.ambient(),
                    k: 0,
                    trial: 0,
                    seed: config.seed_base,
                    assembly_s,
                    recovery_s,
                    error,
                });
            }
            FullRecovery::Omp => {
                let t0 = Instant::now();
                let sys = assemble_full(&eta, forcing.as_ref(), config.n, config.d)?;
                let assembly_s = t0.elapsed().as_secs_f64();
                for &s in &config.sparsity {
                    let t1 = Instant::now();
                    let x_hat = full_omp_solve(&sys.b, &sys.c, s)?;
                    let recovery_s = t1.elapsed().as_secs_f64();
                    let error = cscolloc::quadrature::relative_l2_error_field(
                        &x_hat,
                        config.n,
                        config.d,
                        &manufactured::u,
                    )?;
                    records.push(TrialRecord {
                        experiment: "compressible",
                        method: Method::FullOmp,
                        n: config.n,
                        d: config.d,
                        s,
                        m: config.ambient(),
                        k: s,
                        trial: 0,
                        seed: config.seed_base,
                        assembly_s,
                        recovery_s,
                        error,
                    });
                }
            }
        }
    }

    if config.run_compressive {
        // warm-up
        {
            let s = config.sparsity[0];
            let (m, k) = default_m_k(s, config.ambient())?;
            let params = CompressiveParams {
                m,
                k,
                seed: config.seed_base.wrapping_sub(1),
            };
            let _ = cscolloc::solve_compressive(&problem, &params)?;
        }
        for &s in &config.sparsity {
            let (m, k) = default_m_k(s, config.ambient())?;
            let trial_results: Vec<Result<TrialRecord, cscolloc::Error>> = pool.install(|| {
                (0..config.trials)
                    .into_par_iter()
                    .map(|trial| {
                        let seed = config.seed_base.wrapping_add(trial as u64);
                        let t0 = Instant::now();
                        let draw = draw_indices(m, config.n, config.d, seed)?;
                        let system = build_compressive(
                            &eta,
                            CompressiveRhs::Forcing(forcing.as_ref()),
                            config.n,
                            config.d,
                            &draw,
                        )?;
                        let assembly_s = t0.elapsed().as_secs_f64();
                        let t1 = Instant::now();
                        let solve =
                            recover_from_system(system, CompressiveParams { m, k, seed })?;
                        let recovery_s = t1.elapsed().as_secs_f64();
                        let error = cscolloc::quadrature::relative_l2_error_field(
                            &solve.coefficients(),
                            config.n,
                            config.d,
                            &manufactured::u,
                        )?;
                        Ok(TrialRecord {
                            experiment: "compressible",
                            method: Method::Compressive,
                            n: config.n,
                            d: config.d,
                            s,
                            m,
                            k,
                            trial,
                            seed,
                            assembly_s,
                            recovery_s,
                            error,
                        })
                    })
                    .collect()
            });
            for r in trial_results {
                records.push(r?);
            }
        }
    }
    sort_records(&mut records);
    Ok(records)
}

/// Box-plot statistics of the error column for one (method, s) group.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub method: Method,
    pub s: usize,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Quantile by linear interpolation on the sorted sample (the common
/// "type 7" convention: h = (len-1) p).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Group records by (method, s) and summarize the error column. Groups are
/// emitted in (method, s) order; empty input yields an empty summary.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut groups: Vec<((Method, usize), Vec<f64>)> = Vec::new();
    for record in records {
        let key = (record.method, record.s);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, errs)) => errs.push(record.error),
            None => groups.push((key, vec![record.error])),
        }
    }
    groups.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    groups
        .into_iter()
        .map(|((method, s), mut errs)| {
            errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let count = errs.len();
            let mean = errs.iter().sum::<f64>() / count as f64;
            SummaryRow {
                method,
                s,
                count,
                min: errs[0],
                q1: quantile(&errs, 0.25),
                median: quantile(&errs, 0.5),
                q3: quantile(&errs, 0.75),
                max: errs[count - 1],
                mean,
            }
        })
        .collect()
}

/// Fixed, versioned record layout.
pub const CSV_HEADER: [&str; 12] = [
    "experiment",
    "method",
    "n",
    "d",
    "s",
    "m",
    "K",
    "trial",
    "seed",
    "assembly_s",
    "recovery_s",
    "error",
];

pub fn write_csv<W: std::io::Write>(out: W, records: &[TrialRecord]) -> std::io::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for r in records {
        writer.write_record([
            r.experiment.to_string(),
            r.method.as_str().to_string(),
            r.n.to_string(),
            r.d.to_string(),
            r.s.to_string(),
            r.m.to_string(),
            r.k.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            format!("{:.6e}", r.assembly_s),
            format!("{:.6e}", r.recovery_s),
            format!("{:.16e}", r.error),
        ])?;
    }
    writer.flush()
}

pub fn write_summary_json<W: std::io::Write>(
    mut out: W,
    summary: &[SummaryRow],
) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(summary)?;
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, ExperimentKind};

    fn tiny_sparse_config() -> ExperimentConfig {
        let mut config = ExperimentConfig::defaults(ExperimentKind::Sparse);
        config.n = 8;
        config.sparsity = vec![2];
        config.trials = 3;
        config
    }

    #[test]
    fn quantile_convention_examples() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&xs, 0.25), 2.0);
        assert_eq!(quantile(&xs, 0.5), 3.0);
        assert_eq!(quantile(&xs, 0.75), 4.0);
        let one = [7.0];
        for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
            assert_eq!(quantile(&one, p), 7.0);
        }
    }

    #[test]
    fn sparse_trials_are_deterministic() {
        let config = tiny_sparse_config();
        let a = run_sparse_experiment(&config).unwrap();
        let b = run_sparse_experiment(&config).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.error, y.error);
            assert_eq!(x.seed, y.seed);
            assert_eq!((x.method, x.s, x.trial), (y.method, y.s, y.trial));
        }
    }

    #[test]
    fn sparse_full_direct_is_exact() {
        let mut config = tiny_sparse_config();
        config.run_compressive = false;
        let records = run_sparse_experiment(&config).unwrap();
        assert_eq!(records.len(), 3);
        for r in &records {
            assert_eq!(r.method, Method::FullDirect);
            assert!(r.error < 1e-10, "error {}", r.error);
            assert!(r.assembly_s >= 0.0 && r.recovery_s >= 0.0);
            assert_eq!(r.m, 64);
        }
    }

    #[test]
    fn sparse_records_sorted_and_m_matches_defaults() {
        let mut config = tiny_sparse_config();
        config.sparsity = vec![2, 4];
        let records = run_sparse_experiment(&config).unwrap();
        let sorted: Vec<_> = records.iter().map(|r| (r.method, r.s, r.trial)).collect();
        let mut expected = sorted.clone();
        expected.sort();
        assert_eq!(sorted, expected);
        for r in records.iter().filter(|r| r.method == Method::Compressive) {
            let (m, k) = default_m_k(r.s, 64).unwrap();
            assert_eq!((r.m, r.k), (m, k));
        }
    }

    #[test]
    fn full_omp_recovers_sparse_target() {
        let eta = DiffusionCoefficient::affine(vec![0.25, 0.25]).unwrap();
        let zero = |_: &[f64]| 0.0;
        let sys = assemble_full(&eta, &zero, 8, 2).unwrap();
        let target = draw_sparse_target(64, 3, 5);
        let x_true = densify_sparse(&target, 64);
        let c = sys.b.matvec(&x_true);
        let x_hat = full_omp_solve(&sys.b, &c, 3).unwrap();
        let err = relative_l2_coeff_error(&x_true, &x_hat).unwrap();
        assert!(err < 1e-10, "error {err}");
    }

    #[test]
    fn compressible_small_instance_runs() {
        let mut config = ExperimentConfig::defaults(ExperimentKind::Compressible);
        config.n = 8;
        config.sparsity = vec![4];
        config.trials = 2;
        let records = run_compressible_experiment(&config).unwrap();
        // one full-direct record + 2 compressive trials
        assert_eq!(records.len(), 3);
        let full: Vec<_> = records
            .iter()
            .filter(|r| r.method == Method::FullDirect)
            .collect();
        assert_eq!(full.len(), 1);
        assert!(full[0].error.is_finite() && full[0].error >= 0.0);
        for r in records.iter().filter(|r| r.method == Method::Compressive) {
            assert!(r.error.is_finite() && r.error >= 0.0);
        }
    }

    #[test]
    fn manufactured_derivatives_match_finite_differences() {
        let h = 1e-5;
        for &(z1, z2) in &[(0.3, 0.7), (0.5, 0.5), (0.1, 0.9)] {
            let z = [z1, z2];
            let grad = manufactured::grad_u(&z);
            let fd1 =
                (manufactured::u(&[z1 + h, z2]) - manufactured::u(&[z1 - h, z2])) / (2.0 * h);
            let fd2 =
                (manufactured::u(&[z1, z2 + h]) - manufactured::u(&[z1, z2 - h])) / (2.0 * h);
            assert!((grad[0] - fd1).abs() < 1e-6, "{} vs {fd1}", grad[0]);
            assert!((grad[1] - fd2).abs() < 1e-6, "{} vs {fd2}", grad[1]);
            let lap_fd = (manufactured::u(&[z1 + h, z2])
                + manufactured::u(&[z1 - h, z2])
                + manufactured::u(&[z1, z2 + h])
                + manufactured::u(&[z1, z2 - h])
                - 4.0 * manufactured::u(&z))
                / (h * h);
            assert!(
                (manufactured::lap_u(&z) - lap_fd).abs() < 1e-4,
                "{} vs {lap_fd}",
                manufactured::lap_u(&z)
            );
        }
        // boundary values vanish
        assert_eq!(manufactured::u(&[0.0, 0.5]), 0.0);
        assert_eq!(manufactured::u(&[0.5, 1.0]), 0.0);
        // peak value at the center: (16/16)^2 = 1
        assert!((manufactured::u(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn csv_round_trip_shape() {
        let config = tiny_sparse_config();
        let records = run_sparse_experiment(&config).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.count(), records.len());
    }

    #[test]
    fn summary_of_single_record_collapses() {
        let config = tiny_sparse_config();
        let mut records = run_sparse_experiment(&config).unwrap();
        records.truncate(1);
        let summary = summarize(&records);
        assert_eq!(summary.len(), 1);
        let row = &summary[0];
        assert_eq!(row.count, 1);
        assert_eq!(row.min, row.max);
        assert_eq!(row.q1, row.median);
        assert_eq!(row.median, row.q3);
        assert_eq!(row.mean, row.min);
    }
}
