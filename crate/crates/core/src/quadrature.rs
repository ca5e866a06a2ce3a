//! Composite tensor-product Gauss-Legendre quadrature for L2 norms and
//! errors on the unit interval/square: 5 nodes per cell on a uniform
//! partition with 64 cells per axis.
//!
//! For functions given by sine-basis coefficients there is a fast separable
//! evaluation path (`field_values_on_grid`); the generic entry points take
//! arbitrary closures.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::Mat;

const PI: f64 = core::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1], 5 points.
const GL5_NODES: [f64; 5] = [
    -0.906179845938664,
    -0.538469310105683,
    0.0,
    0.538469310105683,
    0.906179845938664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236926885056189,
    0.478628670499366,
    0.568888888888889,
    0.478628670499366,
    0.236926885056189,
];

/// Cells per axis of the default composite rule.
pub const DEFAULT_CELLS: usize = 64;

/// Quadrature points and weights on [0, 1] for a composite rule.
pub fn axis_rule(cells: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 1.0 / cells as f64;
    let mut points = Vec::with_capacity(cells * 5);
    let mut weights = Vec::with_capacity(cells * 5);
    for c in 0..cells {
        let mid = (c as f64 + 0.5) * h;
        for i in 0..5 {
            points.push(mid + 0.5 * h * GL5_NODES[i]);
            weights.push(0.5 * h * GL5_WEIGHTS[i]);
        }
    }
    (points, weights)
}

/// `sqrt(int_[0,1]^d f^2)` with the composite rule; supports d in {1, 2}.
pub fn l2_norm(f: &dyn Fn(&[f64]) -> f64, d: usize, cells: usize) -> Result<f64> {
    let (points, weights) = axis_rule(cells);
    match d {
        1 => {
            let mut acc = 0.0;
            for (p, w) in points.iter().zip(&weights) {
                let v = f(&[*p]);
                acc += w * v * v;
            }
            Ok(libm::sqrt(acc))
        }
        2 => {
            let mut acc = 0.0;
            for (p1, w1) in points.iter().zip(&weights) {
                for (p2, w2) in points.iter().zip(&weights) {
                    let v = f(&[*p1, *p2]);
                    acc += w1 * w2 * v * v;
                }
            }
            Ok(libm::sqrt(acc))
        }
        _ => Err(Error::InvalidArgument(
            "L2 quadrature supports d in {1, 2}".into(),
        )),
    }
}

/// Relative L2 error `||u_hat - u|| / ||u||`.
pub fn relative_l2_function_error(
    u_hat: &dyn Fn(&[f64]) -> f64,
    u_exact: &dyn Fn(&[f64]) -> f64,
    d: usize,
) -> Result<f64> {
    let denom = l2_norm(u_exact, d, DEFAULT_CELLS)?;
    if denom == 0.0 {
        return Err(Error::ZeroReference);
    }
    let num = l2_norm(&|z: &[f64]| u_hat(z) - u_exact(z), d, DEFAULT_CELLS)?;
    Ok(num / denom)
}

/// Weighting applied to each sine mode when evaluating a coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldWeight {
    /// `sum_j x_j psi_j`.
    Identity,
    /// `Lap(sum_j x_j psi_j) = sum_j x_j (-pi^2 ||j||^2) psi_j`.
    Laplacian,
}

/// Evaluate a coefficient field on the tensor grid of `axis` points via
/// separable sine tables; `d` must be 1 or 2 and `coeffs` lex-ordered.
/// Returns a `len x len` matrix (`1 x len` for d = 1).
pub fn field_values_on_grid(
    coeffs: &[f64],
    n: usize,
    d: usize,
    weight: FieldWeight,
    axis: &[f64],
) -> Result<Mat> {
    let scale = libm::pow(2.0 / (n as f64 + 1.0), d as f64 / 2.0) / (PI * PI);
    let npts = axis.len();
    let sine_table = Mat::from_fn(n, npts, |j, p| libm::sin(PI * (j as f64 + 1.0) * axis[p]));
    match d {
        1 => {
            if coeffs.len() != n {
                return Err(Error::InvalidArgument("coefficient length != n^d".into()));
            }
            let mut weighted = vec![0.0; n];
            for j in 0..n {
                let norm_sq = ((j + 1) * (j + 1)) as f64;
                let w = match weight {
                    FieldWeight::Identity => scale / norm_sq,
                    FieldWeight::Laplacian => -scale * PI * PI,
                };
                weighted[j] = coeffs[j] * w;
            }
            let row = Mat::from_rows(1, n, weighted);
            Ok(row.matmul(&sine_table))
        }
        2 => {
            if coeffs.len() != n * n {
                return Err(Error::InvalidArgument("coefficient length != n^d".into()));
            }
            // W_{j1 j2} = x_j * weight(j); field = T^T W T evaluated as
            // (W T)^T rows x table
            let mut w = Mat::zeros(n, n);
            for j1 in 0..n {
                for j2 in 0..n {
                    let norm_sq = ((j1 + 1) * (j1 + 1) + (j2 + 1) * (j2 + 1)) as f64;
                    let factor = match weight {
                        FieldWeight::Identity => scale / norm_sq,
                        FieldWeight::Laplacian => -scale * PI * PI,
                    };
                    w[(j1, j2)] = coeffs[j1 * n + j2] * factor;
                }
            }
            // values(p1, p2) = sum_{j1 j2} sin(pi j1 z_{p1}) W sin(pi j2 z_{p2})
            let tmp = w.matmul(&sine_table); // n x npts
            Ok(sine_table.transpose().matmul(&tmp)) // npts x npts
        }
        _ => Err(Error::InvalidArgument(
            "coefficient fields support d in {1, 2}".into(),
        )),
    }
}

/// `||field||_{L2}` (or of its Laplacian) through the fast grid path.
pub fn l2_norm_field(coeffs: &[f64], n: usize, d: usize, weight: FieldWeight) -> Result<f64> {
    let (points, weights) = axis_rule(DEFAULT_CELLS);
    let values = field_values_on_grid(coeffs, n, d, weight, &points)?;
    let mut acc = 0.0;
    match d {
        1 => {
            for (p, w) in weights.iter().enumerate() {
                let v = values[(0, p)];
                acc += w * v * v;
            }
        }
        _ => {
            for (p1, w1) in weights.iter().enumerate() {
                for (p2, w2) in weights.iter().enumerate() {
                    let v = values[(p1, p2)];
                    acc += w1 * w2 * v * v;
                }
            }
        }
    }
    Ok(libm::sqrt(acc))
}

/// Relative L2 error of a coefficient field against an exact solution,
/// through the fast grid path.
pub fn relative_l2_error_field(
    coeffs: &[f64],
    n: usize,
    d: usize,
    u_exact: &dyn Fn(&[f64]) -> f64,
) -> Result<f64> {
    let (points, weights) = axis_rule(DEFAULT_CELLS);
    let values = field_values_on_grid(coeffs, n, d, FieldWeight::Identity, &points)?;
    let mut num = 0.0;
    let mut den = 0.0;
    match d {
        1 => {
            for (p, w) in weights.iter().enumerate() {
                let exact = u_exact(&[points[p]]);
                let diff = values[(0, p)] - exact;
                num += w * diff * diff;
                den += w * exact * exact;
            }
        }
        _ => {
            for (p1, w1) in weights.iter().enumerate() {
                for (p2, w2) in weights.iter().enumerate() {
                    let exact = u_exact(&[points[p1], points[p2]]);
                    let diff = values[(p1, p2)] - exact;
                    num += w1 * w2 * diff * diff;
                    den += w1 * w2 * exact * exact;
                }
            }
        }
    }
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(libm::sqrt(num / den))
}
