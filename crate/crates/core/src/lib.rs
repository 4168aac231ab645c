//! Weighted minimal curves and graphs.
//!
//! A graph `y(x)` is *B-minimal* when it is a critical point of the weighted
//! volume `I(y) = ∫ w·e^B dx` with `w = √det(δ + Dy·Dy)`. For `B(x, y) = y`
//! these are exactly the translating solitons of mean curvature flow; the
//! grim reaper `y = −log cos x` is the model example.
//!
//! The crate provides
//!
//! * [`expr`]: parsed scalar expressions with exact partial derivatives,
//!   used for weights, boundary data and test functions;
//! * [`geometry1d`]: the weighted length of a graph curve, its first and
//!   second variations, Euler–Lagrange and geometric (`H = (DB)^N`)
//!   residuals;
//! * [`graphic`]: the weighted volume of maps `D ⊂ Rⁿ → Rᵏ` (`n ≤ 2`), its
//!   exact discrete gradient and Euler–Lagrange residual;
//! * [`solvers`]: damped Newton solvers for the 1D boundary-value problem and
//!   the 2D scalar Dirichlet problem;
//! * [`stability`]: two independent checks of the weighted Hardy-type
//!   inequality behind the stability of the grim reaper (generalized
//!   eigenvalue and Riccati construction);
//! * [`flow`]: explicit curve-shortening flow of graphs, used to observe the
//!   grim reaper translating at unit speed.
//!
//! Batch work (random batteries, parameter sweeps, per-node evaluation on 2D
//! grids) goes through [`par`], which uses rayon when the default `parallel`
//! feature is enabled and falls back to plain iterators otherwise. Reported
//! scalars are always reduced in a fixed order.

pub mod error;
pub mod expr;
pub mod flow;
pub mod geometry1d;
pub mod graphic;
pub mod numerics;
pub mod par;
pub mod scalar;
pub mod solvers;
pub mod stability;

pub use error::{Error, Result};
pub use expr::Expr;
pub use geometry1d::{GraphCurve, Grid1D, Perturbation, WeightField};
pub use par::Execution;
pub use scalar::{Dual, Scalar};
