//! The flow problem λ(t)ẋ + v̇ + v + ∇ψ(x) = 0, v ∈ ∂φ(x), integrated
//! through its equivalent explicit ODE in z = x + μv with μ = 1/λ.

use crate::error::{FlowError, Result};
use crate::potentials::{residual_tolerance, PotentialPair};
use crate::schedule::LambdaSchedule;
use crate::vec_ops;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowProblem {
    pub pair: PotentialPair,
    pub lambda: LambdaSchedule,
    pub x0: Vec<f64>,
    pub v0: Vec<f64>,
    pub horizon: f64,
}

impl FlowProblem {
    /// Validates dimensions, the horizon, and admissibility of the Cauchy
    /// data (v0 must lie in ∂φ(x0); membership is μ-independent, checked at
    /// μ = 1).
    pub fn new(
        pair: PotentialPair,
        lambda: LambdaSchedule,
        x0: Vec<f64>,
        v0: Vec<f64>,
        horizon: f64,
    ) -> Result<Self> {
        if horizon <= 0.0 || !horizon.is_finite() {
            return Err(FlowError::InvalidArgument(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        if x0.len() != pair.dim() {
            return Err(FlowError::DimensionMismatch {
                expected: pair.dim(),
                got: x0.len(),
            });
        }
        if v0.len() != pair.dim() {
            return Err(FlowError::DimensionMismatch {
                expected: pair.dim(),
                got: v0.len(),
            });
        }
        let residual = pair.phi.inclusion_residual(1.0, &x0, &v0)?;
        let tolerance = residual_tolerance(&x0);
        if residual > tolerance {
            return Err(FlowError::InadmissibleData { residual, tolerance });
        }
        Ok(Self {
            pair,
            lambda,
            x0,
            v0,
            horizon,
        })
    }

    pub fn dim(&self) -> usize {
        self.pair.dim()
    }

    pub fn c0(&self) -> f64 {
        self.lambda.c0(self.horizon)
    }

    /// μ(t) = 1/λ(t) and μ̇(t) = −λ̇(t)/λ(t)².
    pub fn mu_of(&self, t: f64) -> Result<(f64, f64)> {
        if t < 0.0 || t > self.horizon {
            return Err(FlowError::InvalidArgument(format!(
                "t = {t} outside [0, {}]",
                self.horizon
            )));
        }
        Ok(mu_of(&self.lambda, t))
    }

    /// Right-hand side of ż = −(μ−μ̇)∇φ_μ(z) − μ∇ψ(prox_{μφ}(z)).
    pub fn z_rhs(&self, t: f64, z: &[f64]) -> Result<Vec<f64>> {
        let (mu, mu_dot) = mu_of(&self.lambda, t);
        let x = self.pair.phi.prox(mu, z)?;
        let yos = self.pair.phi.yosida(mu, z)?;
        let grad = self.pair.psi.grad(&x)?;
        Ok(yos
            .iter()
            .zip(&grad)
            .map(|(y, g)| -(mu - mu_dot) * y - mu * g)
            .collect())
    }

    /// z(0) = x0 + μ(0)v0.
    pub fn z0(&self) -> Vec<f64> {
        let (mu0, _) = mu_of(&self.lambda, 0.0);
        vec_ops::axpy(&self.x0, mu0, &self.v0)
    }

    /// Recovers the full state from z at time t via the Minty parametrization.
    pub fn state_at(&self, t: f64, z: &[f64]) -> Result<FlowState> {
        let (mu, _) = mu_of(&self.lambda, t);
        let x = self.pair.phi.prox(mu, z)?;
        let v = self.pair.phi.yosida(mu, z)?;
        let lambda = self.lambda.value(t);
        let objective = self.pair.objective(&x)?;
        let residual = self.pair.phi.inclusion_residual(mu, &x, &v)?;
        Ok(FlowState {
            t,
            z: z.to_vec(),
            x,
            v,
            mu,
            lambda,
            objective,
            residual,
        })
    }

    pub fn integrate(&self, cfg: &IntegratorConfig) -> Result<Trajectory> {
        crate::integrator::integrate(self, cfg)
    }
}

pub fn mu_of(lambda: &LambdaSchedule, t: f64) -> (f64, f64) {
    let l = lambda.value(t);
    let ld = lambda.derivative(t);
    (1.0 / l, -ld / (l * l))
}

/// One dense-output sample: (t, z, x, v) plus the derived quantities used by
/// the certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub z: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub mu: f64,
    pub lambda: f64,
    pub objective: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub hmax: f64,
    pub max_steps: usize,
    pub dense_output_dt: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-9,
            h0: 1e-3,
            hmax: 0.5,
            max_steps: 10_000_000,
            dense_output_dt: 1e-2,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rtol <= 0.0 || self.atol <= 0.0 {
            return Err(FlowError::InvalidArgument("rtol and atol must be positive".into()));
        }
        if self.h0 <= 0.0 || self.hmax <= 0.0 || self.h0 > self.hmax {
            return Err(FlowError::InvalidArgument(
                "need 0 < h0 ≤ hmax".into(),
            ));
        }
        if self.dense_output_dt <= 0.0 {
            return Err(FlowError::InvalidArgument("dense_output_dt must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(FlowError::InvalidArgument("max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct StepStats {
    pub steps: usize,
    pub rejected: usize,
    pub max_error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<FlowState>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn final_state(&self) -> &FlowState {
        self.samples.last().expect("trajectory has samples")
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    /// Linear interpolation of (x, v) at time t; clamps to the endpoints.
    pub fn interp_xv(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let samples = &self.samples;
        if t <= samples[0].t {
            return (samples[0].x.clone(), samples[0].v.clone());
        }
        if t >= samples[samples.len() - 1].t {
            let s = &samples[samples.len() - 1];
            return (s.x.clone(), s.v.clone());
        }
        let idx = samples.partition_point(|s| s.t < t);
        let (a, b) = (&samples[idx - 1], &samples[idx]);
        let w = (t - a.t) / (b.t - a.t);
        let lerp = |p: &[f64], q: &[f64]| -> Vec<f64> {
            p.iter().zip(q).map(|(u, v)| u + w * (v - u)).collect()
        };
        (lerp(&a.x, &b.x), lerp(&a.v, &b.v))
    }

    /// max over samples of max(‖x‖, ‖v‖); the scale used by certificate
    /// tolerances.
    pub fn scale(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| vec_ops::norm(&s.x).max(vec_ops::norm(&s.v)))
            .fold(0.0, f64::max)
    }
}
