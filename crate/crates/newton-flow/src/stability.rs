//! Stability of the flow with respect to the schedule and the Cauchy data:
//! the weighted gap θ, the Lipschitz-dependence bound and its constant, and
//! the two perturbation experiments.

use serde::Serialize;

use crate::error::{FlowError, Result};
use crate::flow::{FlowProblem, FlowState, IntegratorConfig, Trajectory};
use crate::potentials::{residual_tolerance, PotentialPair};
use crate::schedule::{l1_derivative_sum_norm, l1_distance, LambdaSchedule};
use crate::vec_ops;

/// Two flows sharing the potentials, with possibly different schedules and
/// Cauchy data.
#[derive(Debug, Clone)]
pub struct PerturbationPair {
    pub pair: PotentialPair,
    pub lambda: LambdaSchedule,
    pub eta: LambdaSchedule,
    pub x0: Vec<f64>,
    pub v0: Vec<f64>,
    pub y0: Vec<f64>,
    pub w0: Vec<f64>,
    pub horizon: f64,
}

impl PerturbationPair {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        pair: PotentialPair,
        lambda: LambdaSchedule,
        eta: LambdaSchedule,
        x0: Vec<f64>,
        v0: Vec<f64>,
        y0: Vec<f64>,
        w0: Vec<f64>,
        horizon: f64,
    ) -> Result<Self> {
        for (x, v) in [(&x0, &v0), (&y0, &w0)] {
            let residual = pair.phi.inclusion_residual(1.0, x, v)?;
            let tolerance = residual_tolerance(x);
            if residual > tolerance {
                return Err(FlowError::InadmissibleData { residual, tolerance });
            }
        }
        if horizon <= 0.0 {
            return Err(FlowError::InvalidArgument("horizon must be positive".into()));
        }
        Ok(Self {
            pair,
            lambda,
            eta,
            x0,
            v0,
            y0,
            w0,
            horizon,
        })
    }

    /// Shared lower bound for both schedules on [0, T].
    pub fn c0(&self) -> f64 {
        self.lambda.c0(self.horizon).min(self.eta.c0(self.horizon))
    }

    pub fn first_problem(&self) -> Result<FlowProblem> {
        FlowProblem::new(
            self.pair.clone(),
            self.lambda.clone(),
            self.x0.clone(),
            self.v0.clone(),
            self.horizon,
        )
    }

    pub fn second_problem(&self) -> Result<FlowProblem> {
        FlowProblem::new(
            self.pair.clone(),
            self.eta.clone(),
            self.y0.clone(),
            self.w0.clone(),
            self.horizon,
        )
    }
}

/// θ = √(c0²‖x_a − x_b‖² + ‖v_a − v_b‖²) between two states at equal times.
pub fn theta(state_a: &FlowState, state_b: &FlowState, c0: f64) -> Result<f64> {
    if state_a.x.len() != state_b.x.len() {
        return Err(FlowError::DimensionMismatch {
            expected: state_a.x.len(),
            got: state_b.x.len(),
        });
    }
    if (state_a.t - state_b.t).abs() > 1e-9 * (1.0 + state_a.t.abs()) {
        return Err(FlowError::InvalidArgument(format!(
            "time mismatch: {} vs {}",
            state_a.t, state_b.t
        )));
    }
    Ok(theta_of_gaps(
        &vec_ops::sub(&state_a.x, &state_b.x),
        &vec_ops::sub(&state_a.v, &state_b.v),
        c0,
    ))
}

fn theta_of_gaps(dx: &[f64], dv: &[f64], c0: f64) -> f64 {
    (c0 * c0 * vec_ops::dot(dx, dx) + vec_ops::dot(dv, dv)).sqrt()
}

/// The constant C of the schedule-stability bound:
/// C = (‖v0‖+‖w0‖)/c0 + (1+√(2T))/c0·(‖∇ψ(x0)‖+‖∇ψ(y0)‖)
///     + (√2·T+√T)·L/c0^{3/2}·(Δx^½ + Δy^½).
pub fn stability_constant_c(pert: &PerturbationPair) -> Result<f64> {
    constant_c_parts(
        &pert.pair,
        pert.c0(),
        pert.horizon,
        (&pert.x0, &pert.v0),
        (&pert.y0, &pert.w0),
    )
}

pub(crate) fn constant_c_parts(
    pair: &PotentialPair,
    c0: f64,
    horizon: f64,
    a: (&[f64], &[f64]),
    b: (&[f64], &[f64]),
) -> Result<f64> {
    let inf_bound = pair.inf_sum_lower_bound();
    let mut sqrt_deltas = 0.0;
    for x in [a.0, b.0] {
        let value = pair.objective(x)?;
        if value < inf_bound {
            return Err(FlowError::InconsistentBound { value, bound: inf_bound });
        }
        sqrt_deltas += (value - inf_bound).sqrt();
    }
    let g_norms = vec_ops::norm(&pair.psi.grad(a.0)?) + vec_ops::norm(&pair.psi.grad(b.0)?);
    let v_norms = vec_ops::norm(a.1) + vec_ops::norm(b.1);
    let l = pair.psi.lipschitz_grad();
    Ok(v_norms / c0
        + (1.0 + (2.0 * horizon).sqrt()) / c0 * g_norms
        + (std::f64::consts::SQRT_2 * horizon + horizon.sqrt()) * l / c0.powf(1.5) * sqrt_deltas)
}

/// sup θ ≤ [ (λ(0)+η(0))/2·‖x0−y0‖ + ‖v0−w0‖ + (C/2)‖λ−η‖_{L¹} ]
///          · exp( ‖λ̇+η̇‖_{L¹}/(2c0) + T(1 + L/c0) ).
pub fn theoretical_bound(pert: &PerturbationPair) -> Result<f64> {
    let c0 = pert.c0();
    let c = stability_constant_c(pert)?;
    let l1_gap = l1_distance(&pert.lambda, &pert.eta, pert.horizon);
    let deriv = l1_derivative_sum_norm(&pert.lambda, &pert.eta, pert.horizon);
    let l = pert.pair.psi.lipschitz_grad();
    let bracket = 0.5 * (pert.lambda.value(0.0) + pert.eta.value(0.0))
        * vec_ops::dist(&pert.x0, &pert.y0)
        + vec_ops::dist(&pert.v0, &pert.w0)
        + 0.5 * c * l1_gap;
    Ok(bracket * (deriv / (2.0 * c0) + pert.horizon * (1.0 + l / c0)).exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub sup: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityBoundReport {
    pub constant_c: f64,
    pub l1_gap: f64,
    pub derivative_l1_norm: f64,
    pub theoretical_bound: f64,
    pub measured_sup_theta: f64,
    /// measured / bound (0 when the bound is 0).
    pub tightness: f64,
    /// measured ≤ bound plus the integrator tolerance budget 10(atol+rtol).
    pub sound: bool,
    #[serde(skip)]
    pub theta: ThetaSeries,
}

/// Integrates both flows and compares the measured sup of θ against the
/// theoretical bound. Grids coincide when both flows use the same config;
/// otherwise the coarser trajectory is linearly interpolated.
pub fn run_stability_experiment(
    pert: &PerturbationPair,
    cfg: &IntegratorConfig,
) -> Result<StabilityBoundReport> {
    let traj_a = pert.first_problem()?.integrate(cfg)?;
    let traj_b = pert.second_problem()?.integrate(cfg)?;
    let c0 = pert.c0();

    let series = theta_series(&traj_a, &traj_b, c0);
    let bound = theoretical_bound(pert)?;
    let budget = 10.0 * (cfg.atol + cfg.rtol);
    let measured = series.sup;
    Ok(StabilityBoundReport {
        constant_c: stability_constant_c(pert)?,
        l1_gap: l1_distance(&pert.lambda, &pert.eta, pert.horizon),
        derivative_l1_norm: l1_derivative_sum_norm(&pert.lambda, &pert.eta, pert.horizon),
        theoretical_bound: bound,
        measured_sup_theta: measured,
        tightness: if bound > 0.0 { measured / bound } else { 0.0 },
        sound: measured <= bound + budget,
        theta: series,
    })
}

pub(crate) fn theta_series(traj_a: &Trajectory, traj_b: &Trajectory, c0: f64) -> ThetaSeries {
    let mut times: Vec<f64> = traj_a.times().chain(traj_b.times()).collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    let values: Vec<f64> = times
        .iter()
        .map(|&t| {
            let (xa, va) = traj_a.interp_xv(t);
            let (xb, vb) = traj_b.interp_xv(t);
            theta_of_gaps(&vec_ops::sub(&xa, &xb), &vec_ops::sub(&va, &vb), c0)
        })
        .collect();
    let sup = values.iter().copied().fold(0.0, f64::max);
    ThetaSeries { times, values, sup }
}

#[derive(Debug, Clone, Serialize)]
pub struct InitialDataEntry {
    pub x0: Vec<f64>,
    pub v0: Vec<f64>,
    pub admissible: bool,
    pub residual: f64,
    /// sup over [0,T] of √(‖xₙ−x‖² + ‖vₙ−v‖²); None for rejected data.
    pub sup_gap: Option<f64>,
    pub theoretical_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InitialDataReport {
    pub entries: Vec<InitialDataEntry>,
}

/// Perturbs the Cauchy data along a user-supplied sequence, rejecting points
/// that leave the graph of ∂φ, and records the uniform gap to the reference
/// trajectory for the admissible ones.
pub fn run_initial_data_experiment(
    problem: &FlowProblem,
    perturbed_data: &[(Vec<f64>, Vec<f64>)],
    cfg: &IntegratorConfig,
) -> Result<InitialDataReport> {
    let reference = problem.integrate(cfg)?;
    let mut entries = Vec::with_capacity(perturbed_data.len());
    for (x0n, v0n) in perturbed_data {
        let residual = problem.pair.phi.inclusion_residual(1.0, x0n, v0n)?;
        if residual > residual_tolerance(x0n) {
            entries.push(InitialDataEntry {
                x0: x0n.clone(),
                v0: v0n.clone(),
                admissible: false,
                residual,
                sup_gap: None,
                theoretical_bound: None,
            });
            continue;
        }
        let perturbed = FlowProblem::new(
            problem.pair.clone(),
            problem.lambda.clone(),
            x0n.clone(),
            v0n.clone(),
            problem.horizon,
        )?;
        let traj_n = perturbed.integrate(cfg)?;
        // plain H×H sup norm, i.e. the c0-weighted gap with c0 = 1
        let sup_gap = theta_series(&reference, &traj_n, 1.0).sup;
        let pert = PerturbationPair::new(
            problem.pair.clone(),
            problem.lambda.clone(),
            problem.lambda.clone(),
            problem.x0.clone(),
            problem.v0.clone(),
            x0n.clone(),
            v0n.clone(),
            problem.horizon,
        )?;
        entries.push(InitialDataEntry {
            x0: x0n.clone(),
            v0: v0n.clone(),
            admissible: true,
            residual,
            sup_gap: Some(sup_gap),
            theoretical_bound: Some(theoretical_bound(&pert)?),
        });
    }
    Ok(InitialDataReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{PhiKind, PotentialPhi, PotentialPsi, PsiKind};

    fn quad_pair() -> PotentialPair {
        // φ = ½x², ψ = 0
        let phi = PotentialPhi::new(PhiKind::Quadratic { alpha: 1.0 }, 1).unwrap();
        let psi = PotentialPsi::new(PsiKind::Zero, 1, None).unwrap();
        PotentialPair::new(phi, psi, None).unwrap()
    }

    fn scalar_pert(eta_c: f64, horizon: f64) -> PerturbationPair {
        PerturbationPair::new(
            quad_pair(),
            LambdaSchedule::constant(1.0).unwrap(),
            LambdaSchedule::constant(eta_c).unwrap(),
            vec![1.0],
            vec![1.0],
            vec![1.0],
            vec![1.0],
            horizon,
        )
        .unwrap()
    }

    #[test]
    fn theta_pythagorean() {
        let mk = |x: Vec<f64>, v: Vec<f64>| FlowState {
            t: 0.0,
            z: vec![0.0; x.len()],
            x,
            v,
            mu: 1.0,
            lambda: 1.0,
            objective: 0.0,
            residual: 0.0,
        };
        let a = mk(vec![3.0, 0.0], vec![0.0, 4.0]);
        let b = mk(vec![0.0, 0.0], vec![0.0, 0.0]);
        assert!((theta(&a, &b, 1.0).unwrap() - 5.0).abs() < 1e-15);
        assert_eq!(theta(&a, &a, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn constant_c_hand_value() {
        // L = 0 kills all but the first term: C = (1+1)/1 = 2.
        let pert = scalar_pert(2.0, 1.0);
        assert!((stability_constant_c(&pert).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_c_zero_at_equilibrium() {
        let pert = PerturbationPair::new(
            quad_pair(),
            LambdaSchedule::constant(1.0).unwrap(),
            LambdaSchedule::constant(1.0).unwrap(),
            vec![0.0],
            vec![0.0],
            vec![0.0],
            vec![0.0],
            1.0,
        )
        .unwrap();
        assert_eq!(stability_constant_c(&pert).unwrap(), 0.0);
    }

    #[test]
    fn bound_hand_values() {
        // λ≡1 vs η≡2 on [0,1]: bracket = C/2·‖λ−η‖ = 1, exponent = T = 1.
        let pert = scalar_pert(2.0, 1.0);
        let bound = theoretical_bound(&pert).unwrap();
        assert!((bound - std::f64::consts::E).abs() < 1e-12);

        // halving the schedule gap halves the bound
        let pert_half = scalar_pert(1.5, 1.0);
        let bound_half = theoretical_bound(&pert_half).unwrap();
        assert!((bound_half - std::f64::consts::E / 2.0).abs() < 1e-12);
    }

    #[test]
    fn bound_zero_for_identical_flows() {
        let pert = scalar_pert(1.0, 1.0);
        assert_eq!(theoretical_bound(&pert).unwrap(), 0.0);
    }

    #[test]
    fn bound_symmetric_in_the_two_flows() {
        let pert = scalar_pert(2.0, 1.0);
        let swapped = PerturbationPair::new(
            pert.pair.clone(),
            pert.eta.clone(),
            pert.lambda.clone(),
            pert.y0.clone(),
            pert.w0.clone(),
            pert.x0.clone(),
            pert.v0.clone(),
            pert.horizon,
        )
        .unwrap();
        let b1 = theoretical_bound(&pert).unwrap();
        let b2 = theoretical_bound(&swapped).unwrap();
        assert!((b1 - b2).abs() < 1e-12 * (1.0 + b1));
    }

    #[test]
    fn rejects_inadmissible_data() {
        // v0 = 2 ∉ ∂(½x²)(1) = {1}
        let r = PerturbationPair::new(
            quad_pair(),
            LambdaSchedule::constant(1.0).unwrap(),
            LambdaSchedule::constant(1.0).unwrap(),
            vec![1.0],
            vec![2.0],
            vec![1.0],
            vec![1.0],
            1.0,
        );
        assert!(matches!(r, Err(FlowError::InadmissibleData { .. })));
    }
}
