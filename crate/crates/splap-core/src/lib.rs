//! Numerical library for the singular p-Laplace problem
//!
//!   -div(|grad u|^{p-2} grad u) = u^{-gamma} + g(u),   u > 0,
//!
//! on half-spaces and strips {0 < x_N < lambda}, with u = 0 on the bottom
//! boundary. The solution vanishes at the boundary while the right-hand side
//! blows up there, so every numerical piece is built around the boundary layer
//! u ~ x_N^{p/(gamma+p-1)}.
//!
//! # Modules
//!
//! - [`exact1d`]: the one-dimensional solution family. The ODE
//!   -(|v'|^{p-2}v')' = v^{-gamma} on the half-line conserves the energy
//!   ((p-1)/p)(v')^p - v^{1-gamma}/(gamma-1) = M, which turns the ODE into a
//!   quadrature identity; `build_vm` tabulates that family, including the
//!   closed-form member v_0 (M = 0). For gamma <= 1 no solution exists and the
//!   constructors say so.
//! - [`eigen_radial`]: first Dirichlet eigenpair of the p-Laplacian on the
//!   unit ball by shooting in the flux variable q = r^{N-1}|phi'|^{p-2}phi'.
//! - [`barriers`]: the explicit sub/supersolutions used to sandwich solutions:
//!   a quadrature supersolution w_mu, an eigenfunction-power subsolution with
//!   its alpha coefficient, a rescaled-eigenfunction linear lower bound, the
//!   fundamental/logarithmic annulus barriers, and shifted multiples of v_0.
//! - [`strip`]: damped-Newton finite-difference solver on a graded tensor mesh
//!   over a truncated strip, plus the discrete monotonicity, reflection,
//!   sliding, and two-sided bound checks.
//! - [`analysis`]: exponent fitting, gradient blow-up scans, scaling blow-up,
//!   the Kelvin transform diagnostic for p = N, elementary-inequality constant
//!   estimation, and the decreasing-difference-quotient scanner.
//! - [`acceptance`]: the end-to-end verification suite with pinned tolerances;
//!   also reachable from the CLI as `splap check`.

pub mod acceptance;
pub mod analysis;
pub mod barriers;
pub mod eigen_radial;
pub mod error;
pub mod exact1d;
pub mod num;
pub mod params;
pub mod strip;

pub use error::{Error, Result};
pub use params::{FnSpec, Params};
