//! Smooths a discontinuous damping schedule (a step from 2 down to 1 at
//! t = 1) by convolution with a compactly supported C² kernel of width
//! ε_n = ε₀/2ⁿ and prints, per level: the L¹ distance to the target, the
//! derivative mass ∫|λ̇ₙ| (which never exceeds the step's total variation),
//! and the preserved range.

use newton_flow::bv::{mollify, BVSchedule, MollifiedSequenceConfig, Piece, PieceShape};
use newton_flow::quadrature;

fn main() {
    let step = BVSchedule::new(vec![
        Piece {
            from: 0.0,
            to: 1.0,
            left_value: 2.0,
            right_value: 2.0,
            shape: PieceShape::Constant,
        },
        Piece {
            from: 1.0,
            to: 2.0,
            left_value: 1.0,
            right_value: 1.0,
            shape: PieceShape::Constant,
        },
    ])
    .unwrap();
    let horizon = step.horizon();
    let seq = MollifiedSequenceConfig::default();
    println!(
        "target: step 2 → 1 at t = 1, TV = {}, range [{}, {}]\n",
        step.total_variation(),
        step.inf(),
        step.sup()
    );

    println!("{:>3} {:>12} {:>14} {:>12} {:>20}", "n", "eps", "L1 gap", "TV_n", "range on fine grid");
    for n in 0..=10 {
        let smooth = mollify(&step, n, &seq).unwrap();
        let mut splits = step.breakpoints();
        splits.extend(smooth.breakpoints(horizon));
        let l1 = quadrature::integrate_with_splits(
            |t| (smooth.value(t) - step.value(t)).abs(),
            0.0,
            horizon,
            &splits,
            1e-12,
        );
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..=10_000 {
            let v = smooth.value(horizon * k as f64 / 10_000.0);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        println!(
            "{n:>3} {:>12.6e} {:>14.6e} {:>12.8} [{lo:.6}, {hi:.6}]",
            seq.eps_at(&step, n),
            l1,
            smooth.l1_derivative_norm(horizon)
        );
    }
}
