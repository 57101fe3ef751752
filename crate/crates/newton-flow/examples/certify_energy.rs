//! Solves the nonsmooth problem φ = |x|, ψ = ½(x−2)² with decaying damping
//! λ = 1/(1+t) + 0.1 and checks every a-priori energy estimate on the
//! computed trajectory.

use newton_flow::certify::certify_energy;
use newton_flow::config::preset;
use newton_flow::flow::IntegratorConfig;

fn main() {
    let problem = preset("l1-quadratic").unwrap().build_problem().unwrap();
    let traj = problem
        .integrate(&IntegratorConfig {
            dense_output_dt: 1e-3,
            ..Default::default()
        })
        .unwrap();

    let report = certify_energy(&traj, &problem, None).unwrap();
    println!("tolerance budget: {:.3e}\n", report.tolerance);
    for c in &report.checks {
        println!(
            "[{}] {:<18} measured {:>12.6e}  bound {:>12.6e}  {}",
            if c.pass { "ok" } else { "FAIL" },
            c.id,
            c.measured,
            c.bound,
            c.description
        );
    }
    println!(
        "\nobjective: {:.6} -> {:.6} (minimum value is 1.5 at x = 1)",
        traj.samples[0].objective,
        traj.final_state().objective
    );
    assert!(report.all_pass);
}
