//! Multi-index bookkeeping, the interior collocation grid, and the sine
//! eigenbasis of the Dirichlet Laplacian on the unit cube.
//!
//! Basis functions:
//! `xi_j(z) = 2^{d/2} / (pi^2 ||j||^2) * prod_k sin(pi j_k z_k)`,
//! normalized so that `||Lap xi_j||_{L2} = 1`, and the truncation-rescaled
//! `psi_j = xi_j / (n+1)^{d/2}`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

const PI: f64 = core::f64::consts::PI;

/// Element of `[n]^d`, indexing both basis functions and grid nodes.
/// Entries are 1-based, each in `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: Vec<usize>,
    order: usize,
}

impl MultiIndex {
    pub fn new(entries: Vec<usize>, order: usize) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty multi-index".into()));
        }
        if order == 0 {
            return Err(Error::InvalidArgument("order n must be >= 1".into()));
        }
        for &e in &entries {
            if e == 0 || e > order {
                return Err(Error::InvalidIndex { entry: e, n: order });
            }
        }
        Ok(MultiIndex { entries, order })
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `||j||_2^2` as a float.
    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|&e| (e * e) as f64).sum()
    }

    /// Lexicographic rank in `1..=n^d`, last coordinate fastest.
    pub fn lex_rank(&self) -> usize {
        let n = self.order;
        let mut rank = 0usize;
        for &e in &self.entries {
            rank = rank * n + (e - 1);
        }
        rank + 1
    }

    /// Inverse of [`lex_rank`](Self::lex_rank).
    pub fn from_lex_rank(rank: usize, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument("n and d must be >= 1".into()));
        }
        let total = n.checked_pow(d as u32).ok_or_else(|| {
            Error::ResourceLimit("n^d overflows usize".into())
        })?;
        if rank == 0 || rank > total {
            return Err(Error::InvalidArgument("lex rank out of range".into()));
        }
        let mut rem = rank - 1;
        let mut entries = alloc::vec![0usize; d];
        for k in (0..d).rev() {
            entries[k] = rem % n + 1;
            rem /= n;
        }
        Ok(MultiIndex { entries, order: n })
    }

    /// The grid node `t_q = q / (n+1)`, strictly interior to the cube.
    pub fn grid_point(&self) -> GridPoint {
        let h = 1.0 / (self.order as f64 + 1.0);
        GridPoint {
            coords: self.entries.iter().map(|&q| q as f64 * h).collect(),
        }
    }
}

/// Interior collocation node with coordinates in `(0,1)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    coords: Vec<f64>,
}

impl GridPoint {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

fn on_boundary(z: &[f64]) -> bool {
    z.iter().any(|&c| c == 0.0 || c == 1.0)
}

/// `xi_j(z)`; exactly zero when any coordinate sits on the boundary.
pub fn eval_xi(j: &MultiIndex, z: &[f64]) -> f64 {
    debug_assert_eq!(j.dim(), z.len());
    if on_boundary(z) {
        return 0.0;
    }
    let d = j.dim();
    let mut prod = libm::pow(2.0, d as f64 / 2.0) / (PI * PI * j.norm_sq());
    for (&jk, &zk) in j.entries().iter().zip(z) {
        prod *= libm::sin(PI * jk as f64 * zk);
    }
    prod
}

/// `psi_j(z) = xi_j(z) / (n+1)^{d/2}`.
pub fn eval_psi(j: &MultiIndex, z: &[f64]) -> f64 {
    eval_xi(j, z) / psi_scale(j)
}

/// Gradient of `psi_j` at `z`: component k swaps the k-th sine factor for
/// `pi j_k cos(pi j_k z_k)`.
pub fn eval_grad_psi(j: &MultiIndex, z: &[f64]) -> Vec<f64> {
    debug_assert_eq!(j.dim(), z.len());
    let d = j.dim();
    let pref = libm::pow(2.0, d as f64 / 2.0) / (PI * PI * j.norm_sq() * psi_scale(j));
    let sines: Vec<f64> = j
        .entries()
        .iter()
        .zip(z)
        .map(|(&jk, &zk)| libm::sin(PI * jk as f64 * zk))
        .collect();
    (0..d)
        .map(|k| {
            let jk = j.entries()[k] as f64;
            let mut g = pref * PI * jk * libm::cos(PI * jk * z[k]);
            for (l, &s) in sines.iter().enumerate() {
                if l != k {
                    g *= s;
                }
            }
            g
        })
        .collect()
}

/// `Lap psi_j(z) = -pi^2 ||j||^2 psi_j(z)`.
pub fn eval_laplacian_psi(j: &MultiIndex, z: &[f64]) -> f64 {
    -PI * PI * j.norm_sq() * eval_psi(j, z)
}

fn psi_scale(j: &MultiIndex) -> f64 {
    libm::pow(j.order() as f64 + 1.0, j.dim() as f64 / 2.0)
}

/// Iterate all multi-indices of `[n]^d` in lexicographic order.
pub fn iter_lex(n: usize, d: usize) -> impl Iterator<Item = MultiIndex> {
    let total = n.pow(d as u32);
    (1..=total).map(move |rank| MultiIndex::from_lex_rank(rank, n, d).unwrap())
}
