//! Randomized collocation rows and the scaled compressive system.
//!
//! Row labels are drawn i.i.d. uniformly (with replacement) from `[n]^d`
//! with a seeded ChaCha8 stream, and the compressive system is
//! `A_{ij} = sqrt(N/m) B_{tau_i, j}`, `b_i = sqrt(N/m) c_{tau_i}`, built
//! row by row from the entry formula without materializing `B`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{ambient_dim, assemble_row};
use crate::basis::MultiIndex;
use crate::coefficient::DiffusionCoefficient;
use crate::error::{Error, Result};
use crate::mat::Mat;

/// Seeded draw of `m` row labels from `[n]^d`, repeats allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDraw {
    pub seed: u64,
    pub indices: Vec<MultiIndex>,
}

impl SampleDraw {
    pub fn m(&self) -> usize {
        self.indices.len()
    }
}

/// Right-hand side of the sampled rows: either a forcing term evaluated at
/// the drawn nodes, or a synthetic coefficient vector `x` with `c = B x`
/// evaluated rowwise (sparse `(column, value)` pairs, 0-based columns).
pub enum CompressiveRhs<'a> {
    Forcing(&'a (dyn Fn(&[f64]) -> f64 + Sync)),
    Coefficients(&'a [(usize, f64)]),
}

/// Subsampled scaled system with its column-norm diagonal.
#[derive(Debug, Clone)]
pub struct CompressiveSystem {
    pub a: Mat,
    pub b: Vec<f64>,
    /// Column l2 norms `M_j`; zero-norm columns are stored as 1 and marked
    /// ineligible instead.
    pub column_norms: Vec<f64>,
    /// Columns eligible for OMP selection (false only for zero-norm columns).
    pub eligible: Vec<bool>,
    pub draw: SampleDraw,
    pub n: usize,
    pub d: usize,
}

impl CompressiveSystem {
    /// Column-normalized matrix `A~ = A diag(M)^-1`.
    pub fn normalized(&self) -> Mat {
        let mut out = self.a.clone();
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v /= self.column_norms[j];
            }
        }
        out
    }
}

/// Draw `m` i.i.d. uniform labels from `[n]^d`, deterministic per seed.
pub fn draw_indices(m: usize, n: usize, d: usize, seed: u64) -> Result<SampleDraw> {
    if m == 0 {
        return Err(Error::InvalidArgument("sample size m must be >= 1".into()));
    }
    ambient_dim(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices = (0..m)
        .map(|_| {
            let entries: Vec<usize> = (0..d).map(|_| rng.gen_range(1..=n)).collect();
            MultiIndex::new(entries, n).unwrap()
        })
        .collect();
    Ok(SampleDraw { seed, indices })
}

/// Build `(A, b, M)` for a draw. Rows are computed directly from the entry
/// formula at the sampled nodes.
pub fn build_compressive(
    eta: &DiffusionCoefficient,
    rhs: CompressiveRhs<'_>,
    n: usize,
    d: usize,
    draw: &SampleDraw,
) -> Result<CompressiveSystem> {
    let total = ambient_dim(n, d)?;
    let m = draw.m();
    let scale = libm::sqrt(total as f64 / m as f64);
    let mut a = Mat::zeros(m, total);
    let mut b = vec![0.0; m];
    for (i, tau) in draw.indices.iter().enumerate() {
        if tau.order() != n || tau.dim() != d {
            return Err(Error::InvalidArgument(
                "draw does not match the requested (n, d)".into(),
            ));
        }
        let row = a.row_mut(i);
        assemble_row(eta, tau, n, d, row);
        let c_tau = match &rhs {
            CompressiveRhs::Forcing(f) => f(tau.grid_point().coords()),
            CompressiveRhs::Coefficients(x) => x.iter().map(|&(j, v)| row[j] * v).sum(),
        };
        for v in row.iter_mut() {
            *v *= scale;
        }
        b[i] = scale * c_tau;
    }
    let mut column_norms = vec![0.0; total];
    for i in 0..m {
        let row = a.row(i);
        for j in 0..total {
            column_norms[j] += row[j] * row[j];
        }
    }
    let mut eligible = vec![true; total];
    for (j, norm) in column_norms.iter_mut().enumerate() {
        *norm = libm::sqrt(*norm);
        if *norm == 0.0 {
            *norm = 1.0;
            eligible[j] = false;
        }
    }
    Ok(CompressiveSystem {
        a,
        b,
        column_norms,
        eligible,
        draw: draw.clone(),
        n,
        d,
    })
}

/// Default sampling budget for a target sparsity: `m = ceil(2 s ln N)`, `K = s`.
pub fn default_m_k(s: usize, ambient: usize) -> Result<(usize, usize)> {
    if s == 0 || s > ambient {
        return Err(Error::InvalidArgument(
            "sparsity must satisfy 1 <= s <= N".into(),
        ));
    }
    let m = libm::ceil(2.0 * s as f64 * libm::log(ambient as f64)) as usize;
    Ok((m, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble_full;
    use crate::basis::iter_lex;
    use crate::transform::sine_matrix;

    fn poisson() -> DiffusionCoefficient {
        DiffusionCoefficient::constant(1.0).unwrap()
    }

    #[test]
    fn zero_m_rejected() {
        assert!(draw_indices(0, 4, 2, 1).is_err());
    }

    #[test]
    fn singleton_sample_space() {
        let draw = draw_indices(10, 1, 2, 99).unwrap();
        for tau in &draw.indices {
            assert_eq!(tau.entries(), &[1, 1]);
        }
    }

    #[test]
    fn draws_are_deterministic() {
        let a = draw_indices(50, 4, 2, 7).unwrap();
        let b = draw_indices(50, 4, 2, 7).unwrap();
        assert_eq!(a, b);
        let c = draw_indices(50, 4, 2, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empirical_frequencies_are_uniform() {
        let (m, n, d) = (100_000usize, 4usize, 2usize);
        let draw = draw_indices(m, n, d, 7).unwrap();
        let mut counts = vec![0usize; 16];
        for tau in &draw.indices {
            counts[tau.lex_rank() - 1] += 1;
        }
        let p = 1.0 / 16.0;
        let sigma = libm::sqrt(m as f64 * p * (1.0 - p));
        for (cell, &count) in counts.iter().enumerate() {
            let dev = (count as f64 - m as f64 * p).abs();
            assert!(dev < 5.0 * sigma, "cell {cell}: count {count}");
        }
    }

    fn zero_forcing(_: &[f64]) -> f64 {
        0.0
    }

    #[test]
    fn full_enumeration_recovers_b() {
        // m = N with every row once: scaling cancels, A = B up to row order
        let (n, d) = (3usize, 2usize);
        let sys = assemble_full(&poisson(), &zero_forcing, n, d).unwrap();
        let draw = SampleDraw {
            seed: 0,
            indices: iter_lex(n, d).collect(),
        };
        let cs = build_compressive(&poisson(), CompressiveRhs::Forcing(&zero_forcing), n, d, &draw)
            .unwrap();
        assert!(cs.a.max_abs_diff(&sys.b) < 1e-14);
    }

    #[test]
    fn rows_match_scaled_sine_kronecker() {
        let (n, d, m) = (8usize, 2usize, 20usize);
        let draw = draw_indices(m, n, d, 5).unwrap();
        let cs = build_compressive(&poisson(), CompressiveRhs::Forcing(&zero_forcing), n, d, &draw)
            .unwrap();
        let s = sine_matrix(n).unwrap().mat;
        let kron = s.kron(&s);
        let scale = libm::sqrt(64.0 / m as f64);
        for (i, tau) in draw.indices.iter().enumerate() {
            let brow = kron.row(tau.lex_rank() - 1);
            for j in 0..64 {
                assert!((cs.a[(i, j)] - scale * brow[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn repeated_labels_give_identical_rows() {
        let tau = MultiIndex::new(vec![2, 3], 4).unwrap();
        let draw = SampleDraw {
            seed: 0,
            indices: vec![tau.clone(), tau],
        };
        let cs = build_compressive(&poisson(), CompressiveRhs::Forcing(&zero_forcing), 4, 2, &draw)
            .unwrap();
        assert_eq!(cs.a.row(0), cs.a.row(1));
    }

    #[test]
    fn synthetic_rhs_matches_dense_product() {
        let eta = DiffusionCoefficient::affine(vec![0.25, 0.25]).unwrap();
        let (n, d) = (4usize, 2usize);
        let sys = assemble_full(&eta, &zero_forcing, n, d).unwrap();
        let sparse = [(3usize, 1.5f64), (10usize, -0.5f64)];
        let mut x = vec![0.0; 16];
        for &(j, v) in &sparse {
            x[j] = v;
        }
        let c = sys.b.matvec(&x);
        let draw = draw_indices(6, n, d, 11).unwrap();
        let cs =
            build_compressive(&eta, CompressiveRhs::Coefficients(&sparse), n, d, &draw).unwrap();
        let scale = libm::sqrt(16.0 / 6.0);
        for (i, tau) in draw.indices.iter().enumerate() {
            assert!((cs.b[i] - scale * c[tau.lex_rank() - 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn normalized_columns_have_unit_norm() {
        let draw = draw_indices(12, 4, 2, 2).unwrap();
        let cs = build_compressive(&poisson(), CompressiveRhs::Forcing(&zero_forcing), 4, 2, &draw)
            .unwrap();
        let normalized = cs.normalized();
        for j in 0..16 {
            if cs.eligible[j] {
                let col = normalized.column(j);
                assert!((crate::mat::norm2(&col) - 1.0).abs() < 1e-12);
            }
        }
    }

    // Monte-Carlo oracle: E[A^T A] over draws approaches B^T B.
    #[test]
    fn subsampling_is_unbiased() {
        let (n, d, m) = (4usize, 2usize, 8usize);
        let sys = assemble_full(&poisson(), &zero_forcing, n, d).unwrap();
        let target = sys.b.gram();
        let mut avg = Mat::zeros(16, 16);
        let draws = 200usize;
        for t in 0..draws {
            let draw = draw_indices(m, n, d, 1000 + t as u64).unwrap();
            let cs =
                build_compressive(&poisson(), CompressiveRhs::Forcing(&zero_forcing), n, d, &draw)
                    .unwrap();
            let gram = cs.a.gram();
            for i in 0..16 {
                for j in 0..16 {
                    avg[(i, j)] += gram[(i, j)] / draws as f64;
                }
            }
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..16 {
            for j in 0..16 {
                let diff = avg[(i, j)] - target[(i, j)];
                num += diff * diff;
                den += target[(i, j)] * target[(i, j)];
            }
        }
        // Monte-Carlo noise at 200 draws of 8 rows leaves ~0.12 relative
        // Frobenius deviation; 0.2 rejects any systematic bias
        assert!(libm::sqrt(num / den) < 0.2, "relative error {}", libm::sqrt(num / den));
    }

    #[test]
    fn default_m_values() {
        assert_eq!(default_m_k(2, 1024).unwrap(), (28, 2));
        assert_eq!(default_m_k(4, 1024).unwrap(), (56, 4));
        assert_eq!(default_m_k(8, 1024).unwrap(), (111, 8));
        assert_eq!(default_m_k(16, 1024).unwrap(), (222, 16));
        assert_eq!(default_m_k(32, 1024).unwrap(), (444, 32));
        assert_eq!(default_m_k(64, 1024).unwrap(), (888, 64));
        assert!(default_m_k(2000, 1024).is_err());
        assert!(default_m_k(0, 1024).is_err());
    }
}
