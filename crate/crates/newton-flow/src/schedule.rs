//! Regularization schedules t ↦ λ(t): absolutely continuous, positive, with
//! derivative access and exact L¹ norms where the kind permits.

use crate::bv::MollifiedSchedule;
use crate::error::{FlowError, Result};
use crate::quadrature;

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSchedule {
    /// λ(t) = c
    Constant { c: f64 },
    /// λ(t) = b·e^{−a t} + c
    ExpDecay { a: f64, b: f64, c: f64 },
    /// λ(t) = 1/(1+t) + c
    Rational { c: f64 },
    /// Linear interpolation through (t, value) knots, held constant after the
    /// last knot.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// Smooth approximation of a bounded-variation schedule.
    Mollified(MollifiedSchedule),
}

impl LambdaSchedule {
    pub fn constant(c: f64) -> Result<Self> {
        if c <= 0.0 {
            return Err(FlowError::InvalidArgument("constant schedule: c must be positive".into()));
        }
        Ok(Self::Constant { c })
    }

    pub fn exp_decay(a: f64, b: f64, c: f64) -> Result<Self> {
        if a < 0.0 || b < 0.0 || c < 0.0 || b + c <= 0.0 {
            return Err(FlowError::InvalidArgument(
                "exp-decay schedule: need a ≥ 0, b ≥ 0, c ≥ 0 and b + c > 0".into(),
            ));
        }
        Ok(Self::ExpDecay { a, b, c })
    }

    pub fn rational(c: f64) -> Result<Self> {
        if c < 0.0 {
            return Err(FlowError::InvalidArgument("rational schedule: c must be nonnegative".into()));
        }
        Ok(Self::Rational { c })
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(FlowError::InvalidArgument("piecewise-linear schedule: no knots".into()));
        }
        if knots[0].0 != 0.0 {
            return Err(FlowError::InvalidArgument(
                "piecewise-linear schedule: first knot must be at t = 0".into(),
            ));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(FlowError::InvalidArgument(
                    "piecewise-linear schedule: knot times must be strictly increasing".into(),
                ));
            }
        }
        if knots.iter().any(|&(_, v)| v <= 0.0) {
            return Err(FlowError::InvalidArgument(
                "piecewise-linear schedule: all values must be positive".into(),
            ));
        }
        Ok(Self::PiecewiseLinear { knots })
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Constant { c } => *c,
            Self::ExpDecay { a, b, c } => b * (-a * t).exp() + c,
            Self::Rational { c } => 1.0 / (1.0 + t) + c,
            Self::PiecewiseLinear { knots } => {
                if t <= knots[0].0 {
                    return knots[0].1;
                }
                for w in knots.windows(2) {
                    let (t0, v0) = w[0];
                    let (t1, v1) = w[1];
                    if t <= t1 {
                        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
                    }
                }
                knots.last().unwrap().1
            }
            Self::Mollified(m) => m.value(t),
        }
    }

    /// Right derivative (the two coincide a.e.).
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::ExpDecay { a, b, .. } => -a * b * (-a * t).exp(),
            Self::Rational { .. } => -1.0 / ((1.0 + t) * (1.0 + t)),
            Self::PiecewiseLinear { knots } => {
                for w in knots.windows(2) {
                    let (t0, v0) = w[0];
                    let (t1, v1) = w[1];
                    if t < t1 && t >= t0 {
                        return (v1 - v0) / (t1 - t0);
                    }
                }
                0.0
            }
            Self::Mollified(m) => m.derivative(t),
        }
    }

    /// Certified lower bound of λ on [0, horizon]; positive by construction.
    pub fn c0(&self, horizon: f64) -> f64 {
        match self {
            Self::Constant { c } => *c,
            // decreasing, so the minimum sits at the horizon
            Self::ExpDecay { a, b, c } => b * (-a * horizon).exp() + c,
            Self::Rational { c } => 1.0 / (1.0 + horizon) + c,
            Self::PiecewiseLinear { knots } => {
                let mut min = self.value(horizon);
                for &(t, v) in knots {
                    if t <= horizon && v < min {
                        min = v;
                    }
                }
                min
            }
            Self::Mollified(m) => m.inf(),
        }
    }

    /// ∫₀^T |λ̇|, exact per kind (quadrature for mollified schedules).
    pub fn l1_derivative_norm(&self, horizon: f64) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::ExpDecay { a, b, .. } => b * (1.0 - (-a * horizon).exp()),
            Self::Rational { .. } => horizon / (1.0 + horizon),
            Self::PiecewiseLinear { knots } => {
                let mut tv = 0.0;
                for w in knots.windows(2) {
                    let (t0, v0) = w[0];
                    let (t1, v1) = w[1];
                    if t0 >= horizon {
                        break;
                    }
                    let slope = (v1 - v0) / (t1 - t0);
                    tv += slope.abs() * (t1.min(horizon) - t0);
                }
                tv
            }
            Self::Mollified(m) => quadrature::integrate_with_splits(
                |t| m.derivative(t).abs(),
                0.0,
                horizon,
                &m.breakpoints(horizon),
                1e-12 * (1.0 + horizon),
            ),
        }
    }

    /// Derivative-discontinuity points inside (0, horizon); integration steps
    /// must not straddle them.
    pub fn breakpoints(&self, horizon: f64) -> Vec<f64> {
        match self {
            Self::PiecewiseLinear { knots } => knots
                .iter()
                .map(|&(t, _)| t)
                .filter(|&t| t > 0.0 && t < horizon)
                .collect(),
            Self::Mollified(m) => m.breakpoints(horizon),
            _ => Vec::new(),
        }
    }
}

fn is_monotone_catalog(s: &LambdaSchedule) -> bool {
    matches!(
        s,
        LambdaSchedule::Constant { .. } | LambdaSchedule::ExpDecay { .. } | LambdaSchedule::Rational { .. }
    )
}

/// ‖λ − η‖_{L¹([0,T])}; exact for pairs of constants, adaptive quadrature
/// split at both schedules' kinks otherwise.
pub fn l1_distance(a: &LambdaSchedule, b: &LambdaSchedule, horizon: f64) -> f64 {
    if let (LambdaSchedule::Constant { c: c1 }, LambdaSchedule::Constant { c: c2 }) = (a, b) {
        return (c1 - c2).abs() * horizon;
    }
    let mut splits = a.breakpoints(horizon);
    splits.extend(b.breakpoints(horizon));
    quadrature::integrate_with_splits(
        |t| (a.value(t) - b.value(t)).abs(),
        0.0,
        horizon,
        &splits,
        1e-12 * (1.0 + horizon),
    )
}

/// ‖λ̇ + η̇‖_{L¹([0,T])}. For the monotone catalog kinds both derivatives are
/// nonpositive, so the norm splits exactly; otherwise quadrature.
pub fn l1_derivative_sum_norm(a: &LambdaSchedule, b: &LambdaSchedule, horizon: f64) -> f64 {
    if is_monotone_catalog(a) && is_monotone_catalog(b) {
        return a.l1_derivative_norm(horizon) + b.l1_derivative_norm(horizon);
    }
    let mut splits = a.breakpoints(horizon);
    splits.extend(b.breakpoints(horizon));
    quadrature::integrate_with_splits(
        |t| (a.derivative(t) + b.derivative(t)).abs(),
        0.0,
        horizon,
        &splits,
        1e-12 * (1.0 + horizon),
    )
}
