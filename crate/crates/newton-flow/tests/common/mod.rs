//! Shared test helpers: an independent fixed-step RK4 integrator used as an
//! oracle against the adaptive solver.

use newton_flow::flow::{FlowProblem, FlowState};

/// Classical RK4 with a fixed step on the same z-ODE. Deliberately shares no
/// code with the adaptive integrator.
pub fn rk4_solve(problem: &FlowProblem, steps: usize) -> Vec<FlowState> {
    let h = problem.horizon / steps as f64;
    let mut t = 0.0;
    let mut z = problem.z0();
    let mut out = vec![problem.state_at(0.0, &z).unwrap()];
    for i in 0..steps {
        let k1 = problem.z_rhs(t, &z).unwrap();
        let arg = |k: &[f64], s: f64| -> Vec<f64> {
            z.iter().zip(k).map(|(zi, ki)| zi + s * h * ki).collect()
        };
        let k2 = problem.z_rhs(t + 0.5 * h, &arg(&k1, 0.5)).unwrap();
        let k3 = problem.z_rhs(t + 0.5 * h, &arg(&k2, 0.5)).unwrap();
        let k4 = problem.z_rhs(t + h, &arg(&k3, 1.0)).unwrap();
        for j in 0..z.len() {
            z[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        t = (i + 1) as f64 * h;
        out.push(problem.state_at(t, &z).unwrap());
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
