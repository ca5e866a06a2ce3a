//! Diffusion coefficients with certified sup-norm bounds.
//!
//! The spectral bounds and the admissibility condition need `eta_min`,
//! `||eta||_inf`, and the per-component `||(grad eta)_k||_inf`. For constant
//! and affine coefficients these are exact; for arbitrary coefficients the
//! caller certifies them.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

pub enum DiffusionCoefficient {
    /// `eta(z) = c` with `c > 0`.
    Constant(f64),
    /// `eta(z) = 1 + w^T z` with `w >= 0` componentwise.
    Affine { weights: Vec<f64> },
    /// Arbitrary coefficient; the bounds are caller-certified.
    Custom {
        eval: Box<EvalFn>,
        grad: Box<GradFn>,
        eta_min: f64,
        sup_eta: f64,
        sup_grad: Vec<f64>,
    },
}

impl DiffusionCoefficient {
    pub fn constant(c: f64) -> Result<Self> {
        if c <= 0.0 {
            return Err(Error::InvalidArgument(
                "constant diffusion coefficient must be positive".into(),
            ));
        }
        Ok(DiffusionCoefficient::Constant(c))
    }

    pub fn affine(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("affine weights must be nonempty".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidArgument(
                "affine weights must be nonnegative".into(),
            ));
        }
        Ok(DiffusionCoefficient::Affine { weights })
    }

    pub fn custom(
        eval: Box<EvalFn>,
        grad: Box<GradFn>,
        eta_min: f64,
        sup_eta: f64,
        sup_grad: Vec<f64>,
    ) -> Result<Self> {
        if eta_min <= 0.0 {
            return Err(Error::InvalidArgument("eta_min must be positive".into()));
        }
        Ok(DiffusionCoefficient::Custom {
            eval,
            grad,
            eta_min,
            sup_eta,
            sup_grad,
        })
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        match self {
            DiffusionCoefficient::Constant(c) => *c,
            DiffusionCoefficient::Affine { weights } => {
                1.0 + weights.iter().zip(z).map(|(w, zk)| w * zk).sum::<f64>()
            }
            DiffusionCoefficient::Custom { eval, .. } => eval(z),
        }
    }

    pub fn grad(&self, z: &[f64]) -> Vec<f64> {
        match self {
            DiffusionCoefficient::Constant(_) => vec![0.0; z.len()],
            DiffusionCoefficient::Affine { weights } => weights.clone(),
            DiffusionCoefficient::Custom { grad, .. } => grad(z),
        }
    }

    pub fn eta_min(&self) -> f64 {
        match self {
            DiffusionCoefficient::Constant(c) => *c,
            DiffusionCoefficient::Affine { .. } => 1.0,
            DiffusionCoefficient::Custom { eta_min, .. } => *eta_min,
        }
    }

    /// `||eta||_{L_inf}` on the closed cube; `d` disambiguates the constant
    /// case where the dimension is not carried by the coefficient.
    pub fn sup_eta(&self, _d: usize) -> f64 {
        match self {
            DiffusionCoefficient::Constant(c) => *c,
            DiffusionCoefficient::Affine { weights } => 1.0 + weights.iter().sum::<f64>(),
            DiffusionCoefficient::Custom { sup_eta, .. } => *sup_eta,
        }
    }

    /// Per-component `||(grad eta)_k||_{L_inf}`.
    pub fn sup_grad(&self, d: usize) -> Vec<f64> {
        match self {
            DiffusionCoefficient::Constant(_) => vec![0.0; d],
            DiffusionCoefficient::Affine { weights } => weights.clone(),
            DiffusionCoefficient::Custom { sup_grad, .. } => sup_grad.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_coefficient() {
        let eta = DiffusionCoefficient::constant(2.5).unwrap();
        assert_eq!(eta.eval(&[0.3, 0.7]), 2.5);
        assert_eq!(eta.grad(&[0.3, 0.7]), vec![0.0, 0.0]);
        assert_eq!(eta.eta_min(), 2.5);
        assert!(DiffusionCoefficient::constant(0.0).is_err());
    }

    #[test]
    fn affine_exact_bounds() {
        let eta = DiffusionCoefficient::affine(vec![0.25, 0.25]).unwrap();
        assert!((eta.eval(&[0.5, 0.5]) - 1.25).abs() < 1e-15);
        assert_eq!(eta.grad(&[0.1, 0.9]), vec![0.25, 0.25]);
        assert_eq!(eta.eta_min(), 1.0);
        assert!((eta.sup_eta(2) - 1.5).abs() < 1e-15);
        assert_eq!(eta.sup_grad(2), vec![0.25, 0.25]);
        assert!(DiffusionCoefficient::affine(vec![-0.1]).is_err());
    }

    // Spot-check the certified bounds on a lattice, as the invariants demand.
    #[test]
    fn bounds_hold_on_lattice() {
        let eta = DiffusionCoefficient::affine(vec![0.25, 0.25]).unwrap();
        let (lo, hi) = (eta.eta_min(), eta.sup_eta(2));
        let sup_grad = eta.sup_grad(2);
        for a in 0..10 {
            for b in 0..10 {
                let z = [a as f64 / 9.0, b as f64 / 9.0];
                let v = eta.eval(&z);
                assert!(v >= lo - 1e-15 && v <= hi + 1e-15);
                for (g, s) in eta.grad(&z).iter().zip(&sup_grad) {
                    assert!(g.abs() <= s + 1e-15);
                }
            }
        }
    }
}
