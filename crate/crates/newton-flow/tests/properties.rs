//! Randomized structural invariants of the potential catalog and the solver.

use newton_flow::matrix::DenseMatrix;
use newton_flow::potentials::{PhiKind, PotentialPhi, PotentialPsi, PsiKind};
use newton_flow::vec_ops;
use proptest::prelude::*;

fn arb_phi() -> impl Strategy<Value = PhiKind> {
    prop_oneof![
        Just(PhiKind::Zero),
        (0.01f64..10.0).prop_map(|alpha| PhiKind::Quadratic { alpha }),
        (0.01f64..10.0).prop_map(|weight| PhiKind::L1 { weight }),
        (-3.0f64..0.0, 0.1f64..3.0).prop_map(|(lo, w)| PhiKind::BoxIndicator { lo, hi: lo + w }),
        (0.01f64..5.0, 0.01f64..5.0)
            .prop_map(|(weight, alpha)| PhiKind::ElasticNet { weight, alpha }),
    ]
}

fn arb_vec(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// prox_{μφ} is firmly nonexpansive: ‖Px−Py‖² ≤ ⟨Px−Py, x−y⟩.
    #[test]
    fn prox_firmly_nonexpansive(kind in arb_phi(), mu in 0.01f64..20.0,
                                y1 in arb_vec(4), y2 in arb_vec(4)) {
        let phi = PotentialPhi::new(kind, 4).unwrap();
        let dp = vec_ops::sub(&phi.prox(mu, &y1).unwrap(), &phi.prox(mu, &y2).unwrap());
        let dy = vec_ops::sub(&y1, &y2);
        prop_assert!(vec_ops::dot(&dp, &dp) <= vec_ops::dot(&dp, &dy) + 1e-12);
    }

    /// The Yosida map (I − prox)/μ is (1/μ)-Lipschitz.
    #[test]
    fn yosida_lipschitz(kind in arb_phi(), mu in 0.01f64..20.0,
                        y1 in arb_vec(4), y2 in arb_vec(4)) {
        let phi = PotentialPhi::new(kind, 4).unwrap();
        let dg = vec_ops::dist(&phi.yosida(mu, &y1).unwrap(), &phi.yosida(mu, &y2).unwrap());
        prop_assert!(dg <= vec_ops::dist(&y1, &y2) / mu + 1e-12);
    }

    /// Minty decomposition: prox(z) + μ·yosida(z) reconstructs z exactly.
    #[test]
    fn resolvent_consistency(kind in arb_phi(), mu in 0.01f64..20.0, z in arb_vec(4)) {
        let phi = PotentialPhi::new(kind, 4).unwrap();
        let recon = vec_ops::axpy(&phi.prox(mu, &z).unwrap(), mu, &phi.yosida(mu, &z).unwrap());
        prop_assert!(vec_ops::dist(&recon, &z) <= 1e-12);
    }

    /// (prox(z), yosida(z)) lies on the graph of ∂φ: monotonicity of the
    /// subgradient pairs, ⟨v−w, x−y⟩ ≥ 0.
    #[test]
    fn subgradient_monotonicity(kind in arb_phi(), mu in 0.01f64..20.0,
                                z1 in arb_vec(4), z2 in arb_vec(4)) {
        let phi = PotentialPhi::new(kind, 4).unwrap();
        let dx = vec_ops::sub(&phi.prox(mu, &z1).unwrap(), &phi.prox(mu, &z2).unwrap());
        let dv = vec_ops::sub(&phi.yosida(mu, &z1).unwrap(), &phi.yosida(mu, &z2).unwrap());
        prop_assert!(vec_ops::dot(&dx, &dv) >= -1e-12);
    }

    /// prox minimizes u ↦ φ(u) + ‖u−y‖²/(2μ): no random competitor does
    /// better (skipping indicator potentials whose value is ∞ off the box).
    #[test]
    fn prox_is_the_minimizer(kind in arb_phi(), mu in 0.01f64..20.0,
                             y in arb_vec(4), u in arb_vec(4)) {
        let phi = PotentialPhi::new(kind, 4).unwrap();
        let p = phi.prox(mu, &y).unwrap();
        let objective = |w: &[f64]| -> Option<f64> {
            let val = phi.value(w).unwrap();
            val.is_finite().then(|| val + vec_ops::dot(&vec_ops::sub(w, &y), &vec_ops::sub(w, &y)) / (2.0 * mu))
        };
        let at_p = objective(&p).expect("prox output is feasible");
        if let Some(at_u) = objective(&u) {
            prop_assert!(at_p <= at_u + 1e-10);
        }
    }

    /// ∇ψ matches a central finite difference of ψ.
    #[test]
    fn psi_gradient_matches_finite_difference(x in arb_vec(3), seed in arb_vec(9)) {
        let a = DenseMatrix::new(3, 3, seed.clone()).unwrap();
        let psis = [
            PotentialPsi::new(PsiKind::LeastSquares { a, b: vec![1.0, -2.0, 0.5] }, 3, None).unwrap(),
            PotentialPsi::new(PsiKind::LogisticSum, 3, None).unwrap(),
        ];
        let h = 1e-5;
        for psi in &psis {
            let g = psi.grad(&x).unwrap();
            for j in 0..3 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let fd = (psi.value(&xp).unwrap() - psi.value(&xm).unwrap()) / (2.0 * h);
                let scale = 1.0 + g[j].abs().max(fd.abs());
                prop_assert!((g[j] - fd).abs() <= 1e-6 * scale,
                             "component {j}: grad {} vs fd {}", g[j], fd);
            }
        }
    }

    /// ∇ψ is L-Lipschitz with the certified constant.
    #[test]
    fn psi_gradient_lipschitz(x in arb_vec(3), y in arb_vec(3), seed in arb_vec(9)) {
        let a = DenseMatrix::new(3, 3, seed).unwrap();
        let psis = [
            PotentialPsi::new(PsiKind::LeastSquares { a, b: vec![0.0; 3] }, 3, None).unwrap(),
            PotentialPsi::new(PsiKind::LogisticSum, 3, None).unwrap(),
        ];
        for psi in &psis {
            let dg = vec_ops::dist(&psi.grad(&x).unwrap(), &psi.grad(&y).unwrap());
            let bound = psi.lipschitz_grad() * vec_ops::dist(&x, &y);
            prop_assert!(dg <= bound * (1.0 + 1e-9) + 1e-12);
        }
    }
}
