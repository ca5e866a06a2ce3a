//! Dense discrete sine/cosine transform matrices and the checkerboard
//! correction matrix appearing in `C_n^T C_n = I - 2/(n+1) Q_n`.
//!
//! Entries are evaluated directly in double precision; no fast transforms.

use crate::error::{Error, Result};
use crate::mat::Mat;

const PI: f64 = core::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    /// `(S_n)_{ij} = sqrt(2/(n+1)) sin(pi i j / (n+1))`; orthogonal and
    /// symmetric.
    Sine,
    /// `(C_n)_{ij} = sqrt(2/(n+1)) cos(pi i j / (n+1))`; almost orthogonal.
    Cosine,
    /// `(Q_n)_{ij} = (1 - (-1)^{i+j+1}) / 2`, ones on diagonals of even
    /// order.
    Checkerboard,
}

#[derive(Debug, Clone)]
pub struct TransformMatrix {
    pub kind: TransformKind,
    pub n: usize,
    pub mat: Mat,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("transform order n must be >= 1".into()))
    } else {
        Ok(())
    }
}

pub fn sine_matrix(n: usize) -> Result<TransformMatrix> {
    check_n(n)?;
    let scale = libm::sqrt(2.0 / (n as f64 + 1.0));
    let mat = Mat::from_fn(n, n, |i, j| {
        let (i, j) = (i as f64 + 1.0, j as f64 + 1.0);
        scale * libm::sin(PI * i * j / (n as f64 + 1.0))
    });
    Ok(TransformMatrix {
        kind: TransformKind::Sine,
        n,
        mat,
    })
}

pub fn cosine_matrix(n: usize) -> Result<TransformMatrix> {
    check_n(n)?;
    let scale = libm::sqrt(2.0 / (n as f64 + 1.0));
    let mat = Mat::from_fn(n, n, |i, j| {
        let (i, j) = (i as f64 + 1.0, j as f64 + 1.0);
        scale * libm::cos(PI * i * j / (n as f64 + 1.0))
    });
    Ok(TransformMatrix {
        kind: TransformKind::Cosine,
        n,
        mat,
    })
}

pub fn checkerboard(n: usize) -> Result<TransformMatrix> {
    check_n(n)?;
    let mat = Mat::from_fn(n, n, |i, j| {
        // entries i, j are 1-based in the formula; parity of i+j is the same
        if (i + j) % 2 == 0 {
            1.0
        } else {
            0.0
        }
    });
    Ok(TransformMatrix {
        kind: TransformKind::Checkerboard,
        n,
        mat,
    })
}
