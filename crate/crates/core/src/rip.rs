//! Brute-force restricted isometry constants on tiny instances, and an
//! empirical check of the subsampled-matrix isometry trend.
//!
//! `delta_s(A)` is the smallest `delta` with
//! `(1-delta)||v||^2 <= ||Av||^2 <= (1+delta)||v||^2` over all s-sparse `v`.
//! Enumerating supports of exact cardinality `s` suffices: a support of
//! smaller cardinality embeds into a larger one whose Gram block contains
//! its own, so the extreme eigenvalue deviation can only grow.

use alloc::vec::Vec;

use crate::assembly::spectral_bounds;
use crate::coefficient::DiffusionCoefficient;
use crate::error::{Error, Result};
use crate::mat::{symmetric_eigenvalues, Mat};
use crate::sampling::{build_compressive, draw_indices, CompressiveRhs};

/// Default cap on the number of enumerated supports.
pub const DEFAULT_SUPPORT_CAP: usize = 200_000;

/// Result of a brute-force restricted isometry computation.
#[derive(Debug, Clone)]
pub struct RipReport {
    pub s: usize,
    /// Raw maximal eigenvalue deviation of the support Gram blocks from 1.
    /// The formal definition requires `delta < 1`; larger values are
    /// reported as-is with `is_rip = false`.
    pub delta: f64,
    /// Lexicographically smallest support achieving `delta`.
    pub worst_support: Vec<usize>,
    pub enumerated_supports: usize,
    pub is_rip: bool,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Compute `delta_s(A)` by enumerating every support of cardinality `s`.
pub fn rip_constant(a: &Mat, s: usize) -> Result<RipReport> {
    rip_constant_capped(a, s, DEFAULT_SUPPORT_CAP)
}

pub fn rip_constant_capped(a: &Mat, s: usize, cap: usize) -> Result<RipReport> {
    let ambient = a.cols();
    if s == 0 || s > ambient {
        return Err(Error::InvalidArgument(
            "sparsity must satisfy 1 <= s <= N".into(),
        ));
    }
    let count = binomial(ambient, s);
    if count > cap as u128 {
        return Err(Error::ResourceLimit(alloc::format!(
            "C({ambient}, {s}) = {count} supports exceed the cap {cap}; reduce N or s"
        )));
    }

    let mut support: Vec<usize> = (0..s).collect();
    let mut delta = 0.0_f64;
    let mut worst = support.clone();
    let mut enumerated = 0usize;
    loop {
        enumerated += 1;
        let cols = a.select_columns(&support);
        let eig = symmetric_eigenvalues(&cols.gram());
        let dev = (1.0 - eig[0]).max(eig[eig.len() - 1] - 1.0);
        if dev > delta {
            delta = dev;
            worst = support.clone();
        }
        // next combination in lexicographic order
        let mut i = s;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if support[i] < ambient - (s - i) {
                support[i] += 1;
                for l in i + 1..s {
                    support[l] = support[l - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return Ok(RipReport {
                    s,
                    delta,
                    worst_support: worst,
                    enumerated_supports: enumerated,
                    is_rip: delta < 1.0,
                });
            }
        }
        if support[0] > ambient - s {
            break;
        }
    }
    Ok(RipReport {
        s,
        delta,
        worst_support: worst,
        enumerated_supports: enumerated,
        is_rip: delta < 1.0,
    })
}

/// Empirical success rate of the isometry property for the subsampled
/// collocation matrix: draws `trials` independent row samples of size `m`,
/// computes `delta_s(A / sqrt(R))`, and reports the fraction of trials with
/// `delta_s <= delta_target`.
///
/// The sample-complexity constants of the underlying theorem are
/// non-constructive; only the monotone trend in `m` is checkable.
pub fn verify_rip_theorem(
    eta: &DiffusionCoefficient,
    n: usize,
    d: usize,
    s: usize,
    m: usize,
    delta_target: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let bounds = spectral_bounds(eta, d);
    let zero = |_: &[f64]| 0.0;
    let mut successes = 0usize;
    for t in 0..trials {
        let draw = draw_indices(m, n, d, seed.wrapping_add(t as u64))?;
        let cs = build_compressive(eta, CompressiveRhs::Forcing(&zero), n, d, &draw)?;
        let mut a = cs.a;
        a.scale(1.0 / libm::sqrt(bounds.upper));
        let report = rip_constant(&a, s)?;
        if report.delta <= delta_target {
            successes += 1;
        }
    }
    Ok(successes as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble_full;
    use crate::basis::iter_lex;
    use crate::mat::norm2;
    use crate::sampling::SampleDraw;

    #[test]
    fn identity_is_exact_isometry() {
        let a = Mat::identity(5);
        for s in 1..=5 {
            let report = rip_constant(&a, s).unwrap();
            assert!(report.delta < 1e-14, "s={s}");
            assert!(report.is_rip);
        }
    }

    #[test]
    fn diagonal_example() {
        let a = Mat::from_rows(2, 2, vec![1.0, 0.0, 0.0, libm::sqrt(0.5)]);
        let r1 = rip_constant(&a, 1).unwrap();
        assert!((r1.delta - 0.5).abs() < 1e-12);
        assert_eq!(r1.worst_support, vec![1]);
        let r2 = rip_constant(&a, 2).unwrap();
        assert!((r2.delta - 0.5).abs() < 1e-12);
    }

    fn seeded_unit_matrix(m: usize, ambient: usize, seed: u64) -> Mat {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = Mat::from_fn(m, ambient, |_, _| StandardNormal.sample(&mut rng));
        for j in 0..ambient {
            let norm = norm2(&a.column(j));
            for i in 0..m {
                a[(i, j)] /= norm;
            }
        }
        a
    }

    #[test]
    fn monotone_in_s_and_unit_columns() {
        let a = seeded_unit_matrix(6, 10, 77);
        let mut prev = 0.0;
        for s in 1..=4 {
            let report = rip_constant(&a, s).unwrap();
            assert!(report.delta >= prev - 1e-14, "s={s}");
            prev = report.delta;
        }
        let r1 = rip_constant(&a, 1).unwrap();
        assert!(r1.delta < 1e-12);
    }

    // random-sparse-vector lower-bound oracle against the brute-force value
    #[test]
    fn random_vector_rayleigh_quotients_stay_in_band() {
        use rand::{Rng, SeedableRng};
        use rand_distr::{Distribution, StandardNormal};
        let a = seeded_unit_matrix(6, 10, 3);
        let s = 2usize;
        let delta = rip_constant(&a, s).unwrap().delta;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let mut sampled_max_dev = 0.0_f64;
        for _ in 0..100_000 {
            let i = rng.gen_range(0..10usize);
            let mut j = rng.gen_range(0..10usize);
            while j == i {
                j = rng.gen_range(0..10usize);
            }
            let mut v = vec![0.0; 10];
            v[i] = StandardNormal.sample(&mut rng);
            v[j] = StandardNormal.sample(&mut rng);
            let av = a.matvec(&v);
            let ratio = crate::mat::dot(&av, &av) / crate::mat::dot(&v, &v);
            sampled_max_dev = sampled_max_dev.max(libm::fabs(ratio - 1.0));
        }
        // the sampled deviation is a lower bound for delta_s
        assert!(sampled_max_dev <= delta + 1e-9);
    }

    #[test]
    fn cap_is_enforced() {
        let a = seeded_unit_matrix(4, 40, 1);
        assert!(matches!(
            rip_constant_capped(&a, 5, 1000),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn normalization_transfer_inequality() {
        // delta_s(A M^-1) <= 2 delta_s(A) / (1 - delta_s(A)) on instances
        // where delta_s(A) < 1
        for seed in [1u64, 2, 3, 4, 5] {
            let mut a = seeded_unit_matrix(8, 10, seed);
            // perturb the column norms away from 1 but keep delta below 1
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed + 100);
            for j in 0..10 {
                let f = 1.0 + rng.gen_range(-0.05..0.05);
                for i in 0..8 {
                    a[(i, j)] *= f;
                }
            }
            let s = 2usize;
            let delta_a = rip_constant(&a, s).unwrap().delta;
            if delta_a >= 1.0 {
                continue;
            }
            let mut normalized = a.clone();
            for j in 0..10 {
                let norm = norm2(&normalized.column(j));
                for i in 0..8 {
                    normalized[(i, j)] /= norm;
                }
            }
            let delta_norm = rip_constant(&normalized, s).unwrap().delta;
            assert!(
                delta_norm <= 2.0 * delta_a / (1.0 - delta_a) + 1e-9,
                "seed {seed}: {delta_norm} vs bound {}",
                2.0 * delta_a / (1.0 - delta_a)
            );
        }
    }

    #[test]
    fn deterministic_full_draw_is_isometry() {
        // eta = 1, m = N with every row once: A orthogonal, delta_s = 0
        let (n, d) = (3usize, 2usize);
        let draw = SampleDraw {
            seed: 0,
            indices: iter_lex(n, d).collect(),
        };
        let eta = DiffusionCoefficient::constant(1.0).unwrap();
        let zero = |_: &[f64]| 0.0;
        let cs = build_compressive(&eta, CompressiveRhs::Forcing(&zero), n, d, &draw).unwrap();
        for s in [1usize, 2, 3] {
            let report = rip_constant(&cs.a, s).unwrap();
            assert!(report.delta < 1e-12, "s={s}: {}", report.delta);
        }
        // consistent with the dense system being orthogonal
        let sys = assemble_full(&eta, &zero, n, d).unwrap();
        assert!(sys.b.gram().max_abs_diff(&Mat::identity(9)) < 1e-12);
    }

    #[test]
    fn success_rate_increases_with_m() {
        let eta = DiffusionCoefficient::constant(1.0).unwrap();
        let trials = 200usize;
        let low = verify_rip_theorem(&eta, 3, 2, 2, 2, 0.9, trials, 10).unwrap();
        let high = verify_rip_theorem(&eta, 3, 2, 2, 8, 0.9, trials, 10).unwrap();
        let sigma = libm::sqrt(0.25 / trials as f64);
        assert!(high >= low - 2.0 * sigma, "low {low} high {high}");
    }

    #[test]
    fn affine_gram_spectrum_containment() {
        // deterministic containment: eigenvalues of B^T B / R in [r/R, 1]
        let eta = DiffusionCoefficient::affine(vec![0.25, 0.25]).unwrap();
        let bounds = spectral_bounds(&eta, 2);
        let ratio = bounds.r / bounds.upper;
        assert!((ratio - 0.18982).abs() < 1e-4);
        let zero = |_: &[f64]| 0.0;
        let sys = assemble_full(&eta, &zero, 3, 2).unwrap();
        let mut gram = sys.b.gram();
        gram.scale(1.0 / bounds.upper);
        let vals = symmetric_eigenvalues(&gram);
        assert!(vals[0] >= ratio - 1e-8);
        assert!(*vals.last().unwrap() <= 1.0 + 1e-8);
    }
}
