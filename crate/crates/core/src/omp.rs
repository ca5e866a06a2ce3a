//! Orthogonal matching pursuit with exact least-squares subproblems, plus
//! sparsity metrics.
//!
//! Each iteration selects the column most correlated with the current
//! residual, grows the support, and re-solves the least-squares problem on
//! the support by Householder QR. Ties in the argmax break toward the lower
//! column index; iteration stops early once the maximum correlation falls
//! below `1e-12 ||b||_2`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::{lstsq, norm2, Mat};

/// Relative early-termination threshold on the max residual correlation.
pub const STOP_TOL: f64 = 1e-12;

/// Sparse coefficient vector: a duplicate-free support with aligned values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSolution {
    pub support: Vec<usize>,
    pub values: Vec<f64>,
    /// Ambient dimension N.
    pub dim: usize,
    /// Iterations actually run (early termination may stop before K).
    pub iterations_run: usize,
    /// Set when K exceeded the number of rows, so the final least-squares
    /// subproblems were underdetermined.
    pub underdetermined: bool,
    /// Set when any least-squares subproblem was rank deficient.
    pub rank_deficient: bool,
}

impl SparseSolution {
    pub fn zero(dim: usize) -> Self {
        SparseSolution {
            support: Vec::new(),
            values: Vec::new(),
            dim,
            iterations_run: 0,
            underdetermined: false,
            rank_deficient: false,
        }
    }

    pub fn densify(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for (&j, &v) in self.support.iter().zip(&self.values) {
            x[j] = v;
        }
        x
    }

    /// `||.||_0` of the densified vector.
    pub fn l0(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0.0).count()
    }
}

/// Per-iteration diagnostics for invariant checks.
#[derive(Debug, Clone, Default)]
pub struct OmpTrace {
    /// `||A x_k - b||_2` after each iteration.
    pub residual_norms: Vec<f64>,
    /// `max_{j in S_k} |(A^T r_k)_j|` after each iteration; residual
    /// orthogonality says these stay at rounding level.
    pub support_correlations: Vec<f64>,
    /// Column selected at each iteration.
    pub selected: Vec<usize>,
}

/// Run OMP on a column-normalized sensing matrix.
///
/// `eligible`, when given, masks columns out of the argmax (used for
/// zero-norm columns of degenerate draws).
pub fn omp(a: &Mat, b: &[f64], k: usize, eligible: Option<&[bool]>) -> Result<SparseSolution> {
    Ok(omp_with_trace(a, b, k, eligible)?.0)
}

/// As [`omp`], also returning per-iteration diagnostics.
pub fn omp_with_trace(
    a: &Mat,
    b: &[f64],
    k: usize,
    eligible: Option<&[bool]>,
) -> Result<(SparseSolution, OmpTrace)> {
    let (m, ambient) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::InvalidArgument(
            "measurement vector length does not match the matrix".into(),
        ));
    }
    if let Some(mask) = eligible {
        if mask.len() != ambient {
            return Err(Error::InvalidArgument(
                "eligibility mask length does not match the matrix".into(),
            ));
        }
    }
    let mut solution = SparseSolution::zero(ambient);
    solution.underdetermined = k > m;
    let mut trace = OmpTrace::default();
    let stop = STOP_TOL * norm2(b);
    let mut in_support = vec![false; ambient];
    let mut residual = b.to_vec();
    // r_0 = A x_0 - b = -b; correlations use A^T(Ax - b) = -A^T residual,
    // identical in absolute value
    for _ in 0..k {
        let corr = a.tr_matvec(&residual);
        let mut best = -1.0;
        let mut best_j = usize::MAX;
        for j in 0..ambient {
            if in_support[j] || !eligible.map_or(true, |e| e[j]) {
                continue;
            }
            let c = libm::fabs(corr[j]);
            if c > best {
                best = c;
                best_j = j;
            }
        }
        if best_j == usize::MAX || best < stop {
            break;
        }
        solution.support.push(best_j);
        in_support[best_j] = true;
        let a_s = a.select_columns(&solution.support);
        let out = lstsq(&a_s, b);
        solution.rank_deficient |= out.rank_deficient;
        solution.values = out.solution;
        solution.iterations_run += 1;

        let fit = a_s.matvec(&solution.values);
        for (ri, (&bi, &fi)) in residual.iter_mut().zip(b.iter().zip(&fit)) {
            *ri = bi - fi;
        }
        trace.residual_norms.push(norm2(&residual));
        let corr_after = a.tr_matvec(&residual);
        let support_corr = solution
            .support
            .iter()
            .fold(0.0_f64, |acc, &j| acc.max(libm::fabs(corr_after[j])));
        trace.support_correlations.push(support_corr);
        trace.selected.push(best_j);
    }
    Ok((solution, trace))
}

/// Least squares `argmin ||A_S y - b||_2` on a support submatrix; returns
/// the minimizer and a rank-deficiency flag (minimum-norm solution in that
/// case).
pub fn least_squares(a_s: &Mat, b: &[f64]) -> (Vec<f64>, bool) {
    let out = lstsq(a_s, b);
    (out.solution, out.rank_deficient)
}

/// Best s-term approximation error `sigma_s(x)_p`: the l^p norm of `x` with
/// its `s` largest-magnitude entries removed. Ties keep the lower index.
pub fn best_s_term_error(x: &[f64], s: usize, p: u8) -> Result<f64> {
    if p != 1 && p != 2 {
        return Err(Error::InvalidArgument("p must be 1 or 2".into()));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    // stable sort by descending magnitude keeps lower indices first on ties
    order.sort_by(|&i, &j| {
        libm::fabs(x[j])
            .partial_cmp(&libm::fabs(x[i]))
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let tail = order.iter().skip(s);
    let err = match p {
        1 => tail.map(|&i| libm::fabs(x[i])).sum(),
        _ => libm::sqrt(tail.map(|&i| x[i] * x[i]).sum()),
    };
    Ok(err)
}
