//! Numerical integration of the regularized continuous Newton flow
//!
//! ```text
//! λ(t)·ẋ(t) + v̇(t) + v(t) + ∇ψ(x(t)) = 0,   v(t) ∈ ∂φ(x(t)),
//! x(0) = x0,  v(0) = v0 ∈ ∂φ(x0),
//! ```
//!
//! for a convex lsc potential φ with a closed-form prox and a smooth convex
//! ψ with Lipschitz gradient. The flow is integrated through its equivalent
//! explicit ODE in z = x + μ·v (μ = 1/λ):
//!
//! ```text
//! ż = −(μ − μ̇)·∇φ_μ(z) − μ·∇ψ(prox_{μφ}(z)),   z(0) = x0 + μ(0)·v0,
//! ```
//!
//! where ∇φ_μ is the Yosida regularization (z − prox_{μφ}(z))/μ. The
//! right-hand side is globally Lipschitz in z, so a standard embedded
//! Runge–Kutta pair applies without modification.
//!
//! Beyond solving, the crate checks the a-priori estimates the flow is known
//! to satisfy:
//!
//! * [`certify`] — energy bounds on ∫‖ẋ‖², ∫‖v̇‖², sup-norms of x, v, ẋ,
//!   v̇, pointwise monotonicity ⟨ẋ, v̇⟩ ≥ 0, and descent of φ + ψ;
//! * [`stability`] — the continuity bound on the weighted gap
//!   θ = √(c0²‖x−y‖² + ‖v−w‖²) between two flows driven by different
//!   damping schedules λ, η and different Cauchy data;
//! * [`bv`] — flows driven by a merely BV (possibly discontinuous) λ,
//!   realized as the limit of mollified schedules, with per-level Cauchy
//!   bounds certifying convergence.
//!
//! Entry points: [`flow::FlowProblem`] for direct library use,
//! [`config::ExperimentConfig`] + [`runner::run`] for config-driven runs,
//! and the `newton-flow` binary for the command line. The `examples/`
//! directory has one runnable example per capability.

pub mod bv;
pub mod certify;
pub mod config;
pub mod error;
pub mod flow;
pub mod integrator;
pub mod matrix;
pub mod potentials;
pub mod quadrature;
pub mod report;
pub mod runner;
pub mod schedule;
pub mod stability;
pub mod vec_ops;

pub use error::{FlowError, Result};
