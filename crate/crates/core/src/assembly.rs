//! Assembly of the full collocation system `B x = c`, the Kronecker
//! cross-check decomposition, the spectral bounds `r`/`R` of `B^T B`, the
//! diffusion-coefficient admissibility condition, and the local coherence
//! bound.
//!
//! Sign convention: `B_{qj} = [-div(eta grad psi_j)](t_q)
//! = -eta(t_q) Lap psi_j(t_q) - grad eta(t_q) . grad psi_j(t_q)`,
//! so that for `eta = 1` the matrix is exactly the d-fold Kronecker power
//! of the discrete sine transform.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{iter_lex, MultiIndex};
use crate::coefficient::DiffusionCoefficient;
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::transform::{cosine_matrix, sine_matrix};
use crate::DEFAULT_N_CAP;

const PI: f64 = core::f64::consts::PI;

/// Dense full collocation system. Rows and columns are both ordered by
/// lexicographic rank of the multi-index.
#[derive(Debug, Clone)]
pub struct CollocationSystem {
    pub b: Mat,
    pub c: Vec<f64>,
    pub n: usize,
    pub d: usize,
}

/// Bounds on the spectrum of `B^T B` from the sup-norm data of `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBounds {
    /// Lower bound `r = eta_min^2 - (2/pi) ||eta||_inf sum_k ||(grad eta)_k||_inf`.
    pub r: f64,
    /// Upper bound `R = (||eta||_inf + (1/pi) sum_k ||(grad eta)_k||_inf)^2`.
    pub upper: f64,
    /// Whether `eta_min > 0` and
    /// `||eta||_inf sum_k ||(grad eta)_k||_inf < (pi/2) eta_min^2`.
    pub admissible: bool,
}

pub(crate) fn ambient_dim(n: usize, d: usize) -> Result<usize> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("n and d must be >= 1".into()));
    }
    let total = (n as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if total > DEFAULT_N_CAP as u128 {
        return Err(Error::ResourceLimit(alloc::format!(
            "N = {n}^{d} exceeds the dense cap {DEFAULT_N_CAP}"
        )));
    }
    Ok(total as usize)
}

/// Per-row sine/cosine tables at a fixed grid node, `sin(pi j t_k)` and
/// `cos(pi j t_k)` for `j = 1..=n` and `k = 0..d`.
struct RowTables {
    sin: Vec<Vec<f64>>,
    cos: Vec<Vec<f64>>,
}

impl RowTables {
    fn at(t: &[f64], n: usize) -> Self {
        let build = |f: fn(f64) -> f64| {
            t.iter()
                .map(|&tk| (1..=n).map(|j| f(PI * j as f64 * tk)).collect())
                .collect()
        };
        RowTables {
            sin: build(libm::sin),
            cos: build(libm::cos),
        }
    }
}

/// Fill one lex-ordered row of `B` for the grid node `t_q`.
///
/// The entry formula is evaluated with per-axis trigonometric tables; the
/// result is bit-identical to the naive per-entry evaluation because the
/// same `sin`/`cos` values are combined in the same order.
pub(crate) fn assemble_row(
    eta: &DiffusionCoefficient,
    q: &MultiIndex,
    n: usize,
    d: usize,
    out: &mut [f64],
) {
    debug_assert_eq!(out.len(), n.pow(d as u32));
    let t = q.grid_point();
    let tables = RowTables::at(t.coords(), n);
    let eta_t = eta.eval(t.coords());
    let grad_t = eta.grad(t.coords());
    let grad_zero = grad_t.iter().all(|&g| g == 0.0);
    let pref = libm::pow(2.0 / (n as f64 + 1.0), d as f64 / 2.0);

    let mut entries = vec![1usize; d];
    for slot in out.iter_mut() {
        let mut prod_s = 1.0;
        let mut norm_sq = 0.0;
        for k in 0..d {
            prod_s *= tables.sin[k][entries[k] - 1];
            let jk = entries[k] as f64;
            norm_sq += jk * jk;
        }
        let mut value = eta_t * prod_s;
        if !grad_zero {
            for k in 0..d {
                let gk = grad_t[k];
                if gk == 0.0 {
                    continue;
                }
                let jk = entries[k] as f64;
                let mut loo = tables.cos[k][entries[k] - 1];
                for l in 0..d {
                    if l != k {
                        loo *= tables.sin[l][entries[l] - 1];
                    }
                }
                value -= gk * jk / (PI * norm_sq) * loo;
            }
        }
        *slot = pref * value;
        // odometer increment, last coordinate fastest
        for k in (0..d).rev() {
            if entries[k] < n {
                entries[k] += 1;
                break;
            }
            entries[k] = 1;
        }
    }
}

/// Assemble the dense `N x N` system `B x = c` with
/// `c_q = F(t_q)`.
pub fn assemble_full(
    eta: &DiffusionCoefficient,
    forcing: &(dyn Fn(&[f64]) -> f64 + Sync),
    n: usize,
    d: usize,
) -> Result<CollocationSystem> {
    let total = ambient_dim(n, d)?;
    let mut b = Mat::zeros(total, total);
    let mut c = vec![0.0; total];
    for q in iter_lex(n, d) {
        let row = q.lex_rank() - 1;
        assemble_row(eta, &q, n, d, b.row_mut(row));
        c[row] = forcing(q.grid_point().coords());
    }
    Ok(CollocationSystem { b, c, n, d })
}

/// Assemble `B` through its Kronecker decomposition,
/// `B = D0 (S (x) ... (x) S) - sum_k Dk (S (x) ... (x) (C E) (x) ... (x) S) J`,
/// with `D0 = diag(eta(t_q))`, `Dk = diag((grad eta)_k(t_q))`,
/// `E = diag(pi j)`, and `J = diag(1/(pi^2 ||j||^2))`.
///
/// Independent assembly route used to cross-check [`assemble_full`].
pub fn assemble_structured(eta: &DiffusionCoefficient, n: usize, d: usize) -> Result<Mat> {
    let total = ambient_dim(n, d)?;
    let s = sine_matrix(n)?.mat;
    let c = cosine_matrix(n)?.mat;

    // C E with E = diag(pi * 1..=n), applied on the right
    let mut ce = c.clone();
    for i in 0..n {
        for j in 0..n {
            ce[(i, j)] *= PI * (j as f64 + 1.0);
        }
    }

    let kron_chain = |factors: &[&Mat]| -> Mat {
        let mut acc = factors[0].clone();
        for f in &factors[1..] {
            acc = acc.kron(f);
        }
        acc
    };

    let grid: Vec<MultiIndex> = iter_lex(n, d).collect();
    let eta_diag: Vec<f64> = grid
        .iter()
        .map(|q| eta.eval(q.grid_point().coords()))
        .collect();

    // diffusion part: D0 * (x)^d S
    let factors: Vec<&Mat> = (0..d).map(|_| &s).collect();
    let mut b = kron_chain(&factors);
    for (i, &e) in eta_diag.iter().enumerate() {
        for v in b.row_mut(i) {
            *v *= e;
        }
    }

    // gradient part, one Kronecker chain per axis
    let inv_norm_sq: Vec<f64> = grid.iter().map(|j| 1.0 / (PI * PI * j.norm_sq())).collect();
    for k in 0..d {
        let grad_diag: Vec<f64> = grid
            .iter()
            .map(|q| eta.grad(q.grid_point().coords())[k])
            .collect();
        if grad_diag.iter().all(|&g| g == 0.0) {
            continue;
        }
        let factors: Vec<&Mat> = (0..d).map(|l| if l == k { &ce } else { &s }).collect();
        let mut part = kron_chain(&factors);
        for i in 0..total {
            let gi = grad_diag[i];
            let row = part.row_mut(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v *= gi * inv_norm_sq[j];
            }
        }
        // subtract: sign fixed so the result equals assemble_full
        for i in 0..total {
            let src = part.row(i);
            for j in 0..total {
                b[(i, j)] -= src[j];
            }
        }
    }
    Ok(b)
}

/// Spectral bounds `r <= lambda(B^T B) <= R` and the admissibility check on
/// `eta`.
pub fn spectral_bounds(eta: &DiffusionCoefficient, d: usize) -> SpectralBounds {
    let eta_min = eta.eta_min();
    let sup = eta.sup_eta(d);
    let grad_sum: f64 = eta.sup_grad(d).iter().sum();
    let r = eta_min * eta_min - 2.0 / PI * sup * grad_sum;
    let upper = {
        let t = sup + grad_sum / PI;
        t * t
    };
    let admissible = eta_min > 0.0 && sup * grad_sum < PI / 2.0 * eta_min * eta_min;
    SpectralBounds {
        r,
        upper,
        admissible,
    }
}

/// Local coherence bound `nu_q = 2^d R / N` and whether every row of `B`
/// satisfies `max_j B_{qj}^2 <= nu_q`.
pub fn coherence_bound(system: &CollocationSystem, bounds: &SpectralBounds) -> (Vec<f64>, bool) {
    let total = system.b.rows();
    let nu = libm::pow(2.0, system.d as f64) * bounds.upper / total as f64;
    let mut holds = true;
    for q in 0..total {
        let row_max = system
            .b
            .row(q)
            .iter()
            .fold(0.0_f64, |m, &v| m.max(v * v));
        if row_max > nu {
            holds = false;
        }
    }
    (vec![nu; total], holds)
}

/// Forcing term of the manufactured problem with exact solution `u`:
/// `F(z) = -eta(z) Lap u(z) - grad eta(z) . grad u(z)`.
pub fn forcing_from_manufactured<'a>(
    grad_u: &'a (dyn Fn(&[f64]) -> Vec<f64> + Sync),
    lap_u: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    eta: &'a DiffusionCoefficient,
) -> Box<dyn Fn(&[f64]) -> f64 + Sync + 'a> {
    Box::new(move |z: &[f64]| {
        let g = grad_u(z);
        let eg = eta.grad(z);
        -eta.eval(z) * lap_u(z) - eg.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>()
    })
}
