//! Perturbs the Cauchy data (x0, v0) of a nonsmooth flow. Perturbations
//! must stay on the graph of ∂φ: for φ = |x| at x > 0 the only admissible
//! subgradient is v = 1, so perturbing v0 alone is rejected while moving x0
//! (keeping v0 = 1) is accepted, and the trajectory gap stays within the
//! continuity bound.

use newton_flow::config::preset;
use newton_flow::flow::IntegratorConfig;
use newton_flow::stability::run_initial_data_experiment;

fn main() {
    let problem = preset("l1-quadratic").unwrap().build_problem().unwrap();
    // reference data is (x0, v0) = (2, 1)
    let candidates: Vec<(Vec<f64>, Vec<f64>)> = vec![
        (vec![2.1], vec![1.0]),  // admissible: x > 0, v = 1 ∈ ∂|x|
        (vec![3.0], vec![1.0]),  // admissible
        (vec![2.0], vec![0.5]),  // rejected: 0.5 ∉ ∂|2|
        (vec![0.0], vec![0.3]),  // admissible: |v| ≤ 1 at x = 0
        (vec![-1.0], vec![1.0]), // rejected: ∂|−1| = {−1}
    ];
    let report =
        run_initial_data_experiment(&problem, &candidates, &IntegratorConfig::default()).unwrap();

    for e in &report.entries {
        if e.admissible {
            println!(
                "x0 = {:>5}, v0 = {:>4}: admissible, sup gap {:.4e} ≤ bound {:.4e}",
                e.x0[0],
                e.v0[0],
                e.sup_gap.unwrap(),
                e.theoretical_bound.unwrap()
            );
            assert!(e.sup_gap.unwrap() <= e.theoretical_bound.unwrap() + 1e-6);
        } else {
            println!(
                "x0 = {:>5}, v0 = {:>4}: rejected (inclusion residual {:.3e})",
                e.x0[0], e.v0[0], e.residual
            );
        }
    }
}
