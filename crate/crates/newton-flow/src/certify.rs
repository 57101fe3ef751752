//! Trajectory certificates: checks every a-priori energy and Lipschitz
//! estimate against quantities measured along a computed trajectory.
//! Derivatives are central finite differences on the dense grid, integrals
//! the trapezoid rule.

use serde::Serialize;

use crate::error::{FlowError, Result};
use crate::flow::{FlowProblem, Trajectory};
use crate::vec_ops;

#[derive(Debug, Clone, Serialize)]
pub struct CertificateCheck {
    /// Stable identifier naming the inequality (e.g. "xdot-l2").
    pub id: String,
    pub description: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub checks: Vec<CertificateCheck>,
    pub tolerance: f64,
    pub all_pass: bool,
}

impl CertificateReport {
    pub fn failing(&self) -> impl Iterator<Item = &CertificateCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn finite_difference(times: &[f64], values: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = times.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (j, k) = if i == 0 {
            (0, 1)
        } else if i == n - 1 {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        let dt = times[k] - times[j];
        out.push(
            values[k]
                .iter()
                .zip(&values[j])
                .map(|(a, b)| (a - b) / dt)
                .collect(),
        );
    }
    out
}

fn trapezoid(times: &[f64], f: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(f.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// Runs every a-priori energy and Lipschitz estimate on the trajectory. `tolerance` defaults to
/// 1e-4·(1 + trajectory scale), the discretization-noise budget.
pub fn certify_energy(
    trajectory: &Trajectory,
    problem: &FlowProblem,
    tolerance: Option<f64>,
) -> Result<CertificateReport> {
    if trajectory.samples.len() < 3 {
        return Err(FlowError::InvalidArgument(
            "trajectory too short to certify (need at least 3 samples)".into(),
        ));
    }
    let first = &trajectory.samples[0];
    if first.x.len() != problem.dim() || vec_ops::dist(&first.x, &problem.x0) > 1e-9 * (1.0 + vec_ops::norm(&problem.x0)) {
        return Err(FlowError::InvalidArgument(
            "trajectory does not start at the problem's Cauchy data".into(),
        ));
    }

    let c0 = problem.c0();
    let horizon = problem.horizon;
    let l_psi = problem.pair.psi.lipschitz_grad();
    let obj0 = problem.pair.objective(&problem.x0)?;
    let inf_bound = problem.pair.inf_sum_lower_bound();
    if obj0 < inf_bound {
        return Err(FlowError::InconsistentBound {
            value: obj0,
            bound: inf_bound,
        });
    }
    let delta = obj0 - inf_bound;
    let sqrt_delta = delta.sqrt();
    let v0_norm = vec_ops::norm(&problem.v0);
    let g0_norm = vec_ops::norm(&problem.pair.psi.grad(&problem.x0)?);

    let tol = tolerance.unwrap_or_else(|| 1e-4 * (1.0 + trajectory.scale()));

    let times: Vec<f64> = trajectory.times().collect();
    let xs: Vec<Vec<f64>> = trajectory.samples.iter().map(|s| s.x.clone()).collect();
    let vs: Vec<Vec<f64>> = trajectory.samples.iter().map(|s| s.v.clone()).collect();
    let x_dot = finite_difference(&times, &xs);
    let v_dot = finite_difference(&times, &vs);

    let x_dot_sq: Vec<f64> = x_dot.iter().map(|d| vec_ops::dot(d, d)).collect();
    let v_dot_sq: Vec<f64> = v_dot.iter().map(|d| vec_ops::dot(d, d)).collect();

    let sup = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::NEG_INFINITY, f64::max);

    let mut checks = Vec::new();
    let mut push = |id: &str, description: &str, measured: f64, bound: f64| {
        checks.push(CertificateCheck {
            id: id.into(),
            description: description.into(),
            measured,
            bound,
            pass: measured <= bound + tol,
        });
    };

    // (a) L² bound on ẋ
    push(
        "xdot-l2",
        "∫‖ẋ‖² ≤ (1/c0)((φ+ψ)(x0) − inf(φ+ψ))",
        trapezoid(&times, &x_dot_sq),
        delta / c0,
    );

    // (b) sup-norm bound on x
    push(
        "x-sup",
        "‖x‖_L∞ ≤ ‖x0‖ + √(T/c0)·Δ^½",
        sup(&mut xs.iter().map(|x| vec_ops::norm(x))),
        vec_ops::norm(&problem.x0) + (horizon / c0).sqrt() * sqrt_delta,
    );

    // (c) L² bound on v̇ and sup-norm bound on v
    push(
        "vdot-l2",
        "∫‖v̇‖² ≤ ‖v0‖² + 2T‖∇ψ(x0)‖² + (2T²L²/c0)·Δ",
        trapezoid(&times, &v_dot_sq),
        v0_norm * v0_norm
            + 2.0 * horizon * g0_norm * g0_norm
            + 2.0 * horizon * horizon * l_psi * l_psi / c0 * delta,
    );
    push(
        "v-sup",
        "‖v‖_L∞ ≤ ‖v0‖ + √(2T)‖∇ψ(x0)‖ + √(2/c0)·T·L·Δ^½",
        sup(&mut vs.iter().map(|v| vec_ops::norm(v))),
        v0_norm + (2.0 * horizon).sqrt() * g0_norm + (2.0 / c0).sqrt() * horizon * l_psi * sqrt_delta,
    );

    // (d) Lipschitz (sup) bounds on ẋ and v̇
    let lip_tail = (std::f64::consts::SQRT_2 * horizon + horizon.sqrt()) * l_psi * sqrt_delta;
    push(
        "xdot-sup",
        "‖ẋ‖_L∞ ≤ ‖v0‖/c0 + (1+√(2T))/c0·‖∇ψ(x0)‖ + (√2·T+√T)·L/c0^{3/2}·Δ^½",
        sup(&mut x_dot_sq.iter().map(|s| s.sqrt())),
        v0_norm / c0 + (1.0 + (2.0 * horizon).sqrt()) / c0 * g0_norm + lip_tail / c0.powf(1.5),
    );
    push(
        "vdot-sup",
        "‖v̇‖_L∞ ≤ ‖v0‖ + (1+√(2T))·‖∇ψ(x0)‖ + (√2·T+√T)·L/√c0·Δ^½",
        sup(&mut v_dot_sq.iter().map(|s| s.sqrt())),
        v0_norm + (1.0 + (2.0 * horizon).sqrt()) * g0_norm + lip_tail / c0.sqrt(),
    );

    // (e) monotonicity of ∂φ along the trajectory: ⟨ẋ, v̇⟩ ≥ 0 at interior points
    let worst_pairing = (1..times.len() - 1)
        .map(|i| -vec_ops::dot(&x_dot[i], &v_dot[i]))
        .fold(f64::NEG_INFINITY, f64::max);
    push(
        "pairing-monotone",
        "⟨ẋ(t), v̇(t)⟩ ≥ 0 at interior samples",
        worst_pairing,
        0.0,
    );

    // (f) pointwise ‖v̇‖ ≤ ‖v + ∇ψ(x)‖
    let mut worst_vdot = f64::NEG_INFINITY;
    for i in 1..times.len() - 1 {
        let g = problem.pair.psi.grad(&xs[i])?;
        let rhs = vec_ops::norm(&vec_ops::add(&vs[i], &g));
        worst_vdot = worst_vdot.max(v_dot_sq[i].sqrt() - rhs);
    }
    push(
        "vdot-pointwise",
        "‖v̇(t)‖ ≤ ‖v(t) + ∇ψ(x(t))‖ at interior samples",
        worst_vdot,
        0.0,
    );

    // (g) monotone decrease of the objective
    let worst_increase = trajectory
        .samples
        .windows(2)
        .map(|w| w[1].objective - w[0].objective)
        .fold(f64::NEG_INFINITY, f64::max);
    push(
        "objective-descent",
        "t ↦ (φ+ψ)(x(t)) is nonincreasing",
        worst_increase,
        0.0,
    );

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(CertificateReport {
        checks,
        tolerance: tol,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::IntegratorConfig;
    use crate::potentials::{PhiKind, PotentialPair, PotentialPhi, PotentialPsi, PsiKind};
    use crate::schedule::LambdaSchedule;

    fn decay_problem(horizon: f64) -> FlowProblem {
        // φ = 0, ψ = ½x², λ ≡ 1: ẋ = −x, x(t) = e^{−t}
        let phi = PotentialPhi::new(PhiKind::Zero, 1).unwrap();
        let psi = PotentialPsi::new(
            PsiKind::LeastSquares {
                a: crate::matrix::DenseMatrix::identity(1),
                b: vec![0.0],
            },
            1,
            None,
        )
        .unwrap();
        let pair = PotentialPair::new(phi, psi, None).unwrap();
        FlowProblem::new(
            pair,
            LambdaSchedule::constant(1.0).unwrap(),
            vec![1.0],
            vec![0.0],
            horizon,
        )
        .unwrap()
    }

    #[test]
    fn scalar_decay_certificates_pass() {
        let problem = decay_problem(3.0);
        let cfg = IntegratorConfig {
            dense_output_dt: 1e-3,
            ..Default::default()
        };
        let traj = problem.integrate(&cfg).unwrap();
        let report = certify_energy(&traj, &problem, None).unwrap();
        assert!(report.all_pass, "failing: {:?}", report.failing().collect::<Vec<_>>());

        // measured ∫‖ẋ‖² ≈ (1 − e^{−6})/2, bound = 0.5
        let a = report.checks.iter().find(|c| c.id == "xdot-l2").unwrap();
        assert!((a.measured - (1.0 - (-6.0f64).exp()) / 2.0).abs() < 1e-4);
        assert!((a.bound - 0.5).abs() < 1e-12);
    }

    #[test]
    fn stationary_trajectory_all_zero() {
        // x0 a minimizer of φ+ψ with v0 = −∇ψ(x0): everything stays put.
        // φ = |x|, ψ = ½(x−2)², minimizer x* = 1, v* = 1.
        let phi = PotentialPhi::new(PhiKind::L1 { weight: 1.0 }, 1).unwrap();
        let psi = PotentialPsi::new(
            PsiKind::LeastSquares {
                a: crate::matrix::DenseMatrix::identity(1),
                b: vec![2.0],
            },
            1,
            None,
        )
        .unwrap();
        let pair = PotentialPair::new(phi, psi, None).unwrap();
        let problem = FlowProblem::new(
            pair,
            LambdaSchedule::constant(0.5).unwrap(),
            vec![1.0],
            vec![1.0],
            4.0,
        )
        .unwrap();
        let traj = problem.integrate(&IntegratorConfig::default()).unwrap();
        let report = certify_energy(&traj, &problem, None).unwrap();
        assert!(report.all_pass);
        let a = report.checks.iter().find(|c| c.id == "xdot-l2").unwrap();
        assert!(a.measured.abs() < 1e-10);
        for s in &traj.samples {
            assert!((s.x[0] - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_mismatched_trajectory() {
        let p1 = decay_problem(3.0);
        let traj = p1.integrate(&IntegratorConfig::default()).unwrap();
        let mut p2 = decay_problem(3.0);
        p2.x0 = vec![5.0];
        assert!(certify_energy(&traj, &p2, None).is_err());
    }
}
