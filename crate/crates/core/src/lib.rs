//! Adaptive SUPG finite elements for singularly perturbed
//! convection–diffusion–reaction problems
//!
//! ```text
//!   -ε Δu + a·∇u + b u = f   in Ω
//!                    u = u_D on Γ_D
//!              ε ∂u/∂n = g   on Γ_N
//! ```
//!
//! discretized with continuous piecewise-linear elements and streamline
//! upwind/Petrov–Galerkin stabilization, with a posteriori error control
//! driven by an H(div)-conforming recovery of the diffusive flux
//! `σ = -ε∇u`. Three recoveries are provided: explicit edge averaging in
//! RT0, a weighted L² projection onto RT0 or BDM1, and a stabilized H(div)
//! projection. The estimator built on them is designed to be robust in ε.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: conforming triangulations and longest-edge bisection
//! - [`linalg`]: sparse matrices, Krylov solvers and quadrature rules
//! - [`fem`]: problem data, SUPG assembly and solve, norms
//! - [`recovery`]: RT0/BDM1 flux fields and the three recoveries
//! - [`estimator`]: weights, residuals, the estimator and its localization
//! - [`adapt`]: Dörfler marking and the adaptive loop
//! - [`problems`]: benchmark problems and exact-error evaluation
//! - [`io`]: plain-text mesh dumps

pub mod adapt;
pub mod error;
pub mod estimator;
pub mod fem;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod problems;
pub mod recovery;

pub use error::{Error, Result};
pub use mesh::{BoundaryTag, Mesh, Point};
