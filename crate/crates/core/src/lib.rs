//! Numerics for the volume comparison of rotationally symmetric
//! asymptotically hyperbolic 3-manifolds `g = f(s)^{-1} ds^2 + s^2 g_{S^2}`.
//!
//! * [`expr`]: profile expressions `f(s)` with symbolic d/ds,
//! * [`metric`]: horizons, curvature and Hawking mass of a profile,
//! * [`quad`]: adaptive quadrature with singular and semi-infinite variants,
//! * [`volume`]: renormalized volume and the flow volume bounds,
//! * [`comparison`]: the function `I(alpha)`, its regularization and the
//!   end-to-end comparison against Anti-deSitter-Schwarzschild models,
//! * [`cli`] and [`acceptance`]: the command-line front end and the
//!   acceptance battery it runs under `renvol verify`.

pub mod expr;
pub mod metric;
pub mod quad;
pub mod volume;
pub mod comparison;
pub mod cli;
pub mod acceptance;
