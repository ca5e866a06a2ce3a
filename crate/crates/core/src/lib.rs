//! Compressive spectral collocation for the stationary diffusion equation
//! `-div(eta grad u) = F` on the unit cube `(0,1)^d` with homogeneous
//! Dirichlet boundary conditions.
//!
//! The discretization expands the solution in the sine eigenbasis of the
//! Dirichlet Laplacian and collocates the PDE in strong form at interior
//! tensor-grid nodes. The full method solves the square system `B x = c`;
//! the compressive method subsamples `m` rows at i.i.d. uniform random grid
//! nodes, rescales by `sqrt(N/m)`, and recovers a sparse coefficient vector
//! with orthogonal matching pursuit on the column-normalized system.
//!
//! Modules:
//! - [`basis`]: multi-indices, the collocation grid, and the basis functions.
//! - [`transform`]: dense sine/cosine transform matrices and the checkerboard
//!   correction matrix.
//! - [`coefficient`]: diffusion coefficients with certified sup-norm bounds.
//! - [`assembly`]: full system assembly, the Kronecker-structured cross-check,
//!   spectral bounds, and the local coherence bound.
//! - [`sampling`]: randomized row draws and the scaled compressive system.
//! - [`omp`]: orthogonal matching pursuit and sparsity metrics.
//! - [`solver`]: end-to-end full and compressive solves.
//! - [`quadrature`]: composite Gauss-Legendre L2 norms and errors.
//! - [`rip`]: brute-force restricted isometry constants on tiny instances.
//!
//! The crate is `no_std` (with `alloc`); all I/O, timing, and file formats
//! live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod assembly;
pub mod basis;
pub mod coefficient;
pub mod error;
pub mod mat;
pub mod omp;
pub mod quadrature;
pub mod rip;
pub mod sampling;
pub mod solver;
pub mod transform;

pub use assembly::{
    assemble_full, assemble_structured, coherence_bound, forcing_from_manufactured,
    spectral_bounds, CollocationSystem, SpectralBounds,
};
pub use basis::{
    eval_grad_psi, eval_laplacian_psi, eval_psi, eval_xi, GridPoint, MultiIndex,
};
pub use coefficient::DiffusionCoefficient;
pub use error::Error;
pub use mat::Mat;
pub use omp::{best_s_term_error, least_squares, omp, omp_with_trace, OmpTrace, SparseSolution};
pub use rip::{rip_constant, verify_rip_theorem, RipReport};
pub use sampling::{
    build_compressive, default_m_k, draw_indices, CompressiveRhs, CompressiveSystem, SampleDraw,
};
pub use solver::{
    evaluate_solution, manufactured_forcing, recover_from_system, relative_l2_coeff_error,
    solve_compressive,
    solve_compressive_synthetic, solve_full, CompressiveParams, CompressiveSolve, FullSolve,
    ManufacturedSolution, ProblemSpec,
};
pub use transform::{checkerboard, cosine_matrix, sine_matrix, TransformKind, TransformMatrix};

/// Default cap on the ambient dimension N = n^d for dense assembly.
pub const DEFAULT_N_CAP: usize = 1 << 20;
