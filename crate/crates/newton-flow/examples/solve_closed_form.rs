//! Integrates the scalar flow φ = ½x², ψ = 0 with constant damping λ ≡ 1
//! and compares against the exact solution x(t) = e^{−t/2}.
//!
//! With v = ∇φ(x) = x the system λẋ + v̇ + v = 0 collapses to
//! ẋ = −x/(1+λ), so the decay rate is 1/2.

use newton_flow::config::preset;
use newton_flow::flow::IntegratorConfig;

fn main() {
    let problem = preset("prox-quadratic")
        .unwrap()
        .build_problem()
        .unwrap();
    let cfg = IntegratorConfig {
        dense_output_dt: 0.25,
        ..Default::default()
    };
    let traj = problem.integrate(&cfg).unwrap();

    println!("{:>6} {:>12} {:>12} {:>10}", "t", "x(t)", "exp(-t/2)", "error");
    let mut worst: f64 = 0.0;
    for s in &traj.samples {
        let exact = (-s.t / 2.0).exp();
        let err = (s.x[0] - exact).abs();
        worst = worst.max(err);
        println!("{:6.2} {:12.8} {:12.8} {:10.2e}", s.t, s.x[0], exact, err);
    }
    println!(
        "\nmax error {:.2e} over {} accepted steps ({} rejected)",
        worst, traj.stats.steps, traj.stats.rejected
    );
}
