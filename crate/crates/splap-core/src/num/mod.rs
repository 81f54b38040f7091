//! Shared numerical kernels: quadrature, root refinement, interpolation,
//! adaptive ODE stepping, and finite-difference residual probes.
//!
//! Two integrators live in [`quad`] on purpose: construction code uses the
//! adaptive Gauss-Legendre routine, while verification oracles use tanh-sinh,
//! so a defect in one cannot hide in the other.

pub mod fd;
pub mod interp;
pub mod ode;
pub mod quad;
pub mod roots;
