//! The two-potential catalog: a nonsmooth convex term with closed-form prox
//! and a smooth convex term with exact gradient and a certified Lipschitz
//! constant. All operators act on points of `R^n`.

use crate::error::{FlowError, Result};
use crate::matrix::DenseMatrix;
use crate::vec_ops;

/// Default scale-aware tolerance for the subgradient-membership test.
pub fn residual_tolerance(x: &[f64]) -> f64 {
    1e-8 * (1.0 + vec_ops::norm(x))
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhiKind {
    Zero,
    /// (alpha/2)‖x‖²
    Quadratic { alpha: f64 },
    /// w‖x‖₁
    L1 { weight: f64 },
    /// Indicator of the box [lo, hi]ⁿ
    BoxIndicator { lo: f64, hi: f64 },
    /// w‖x‖₁ + (alpha/2)‖x‖²
    ElasticNet { weight: f64, alpha: f64 },
}

/// Prox-friendly convex lsc potential from the closed catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPhi {
    kind: PhiKind,
    dim: usize,
    known_infimum: f64,
}

impl PotentialPhi {
    pub fn new(kind: PhiKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(FlowError::InvalidArgument("dimension must be positive".into()));
        }
        match kind {
            PhiKind::Quadratic { alpha } if alpha <= 0.0 => {
                return Err(FlowError::InvalidArgument("quadratic: alpha must be positive".into()))
            }
            PhiKind::L1 { weight } if weight < 0.0 => {
                return Err(FlowError::InvalidArgument("l1: weight must be nonnegative".into()))
            }
            PhiKind::BoxIndicator { lo, hi } if lo > hi => {
                return Err(FlowError::InvalidArgument("box: lo must not exceed hi".into()))
            }
            PhiKind::ElasticNet { weight, alpha } if weight < 0.0 || alpha <= 0.0 => {
                return Err(FlowError::InvalidArgument(
                    "elastic-net: weight must be nonnegative, alpha positive".into(),
                ))
            }
            _ => {}
        }
        // Every catalog phi attains 0 as its infimum: the box contains
        // projections of 0 only if 0 is feasible, but the indicator itself is
        // 0 everywhere on its domain.
        Ok(Self {
            kind,
            dim,
            known_infimum: 0.0,
        })
    }

    pub fn kind(&self) -> &PhiKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn known_infimum(&self) -> f64 {
        self.known_infimum
    }

    fn check_dim(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(FlowError::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        Ok(())
    }

    /// phi(x); +inf outside the box domain (with a small absolute slack for
    /// points produced by floating-point projection).
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match &self.kind {
            PhiKind::Zero => 0.0,
            PhiKind::Quadratic { alpha } => 0.5 * alpha * vec_ops::dot(x, x),
            PhiKind::L1 { weight } => weight * x.iter().map(|v| v.abs()).sum::<f64>(),
            PhiKind::BoxIndicator { lo, hi } => {
                let slack = 1e-12;
                if x.iter().all(|&v| v >= lo - slack && v <= hi + slack) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            PhiKind::ElasticNet { weight, alpha } => {
                weight * x.iter().map(|v| v.abs()).sum::<f64>() + 0.5 * alpha * vec_ops::dot(x, x)
            }
        })
    }

    /// prox_{mu*phi}(y) = argmin_u phi(u) + ‖u−y‖²/(2 mu), in closed form.
    pub fn prox(&self, mu: f64, y: &[f64]) -> Result<Vec<f64>> {
        if mu <= 0.0 {
            return Err(FlowError::InvalidArgument(format!("prox: mu must be positive, got {mu}")));
        }
        self.check_dim(y)?;
        Ok(match &self.kind {
            PhiKind::Zero => y.to_vec(),
            PhiKind::Quadratic { alpha } => vec_ops::scale(y, 1.0 / (1.0 + mu * alpha)),
            PhiKind::L1 { weight } => y.iter().map(|&v| soft_threshold(v, mu * weight)).collect(),
            PhiKind::BoxIndicator { lo, hi } => y.iter().map(|&v| v.clamp(*lo, *hi)).collect(),
            PhiKind::ElasticNet { weight, alpha } => y
                .iter()
                .map(|&v| soft_threshold(v, mu * weight) / (1.0 + mu * alpha))
                .collect(),
        })
    }

    /// Yosida approximation of the subdifferential: (y − prox_{mu phi}(y))/mu.
    pub fn yosida(&self, mu: f64, y: &[f64]) -> Result<Vec<f64>> {
        let p = self.prox(mu, y)?;
        Ok(y.iter().zip(&p).map(|(a, b)| (a - b) / mu).collect())
    }

    /// ‖x − prox_{mu phi}(x + mu v)‖; zero iff v ∈ ∂phi(x).
    pub fn inclusion_residual(&self, mu: f64, x: &[f64], v: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        self.check_dim(v)?;
        let p = self.prox(mu, &vec_ops::axpy(x, mu, v))?;
        Ok(vec_ops::dist(x, &p))
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PsiKind {
    Zero,
    /// (1/2)xᵀQx + bᵀx, Q symmetric positive semidefinite
    QuadraticForm { q: DenseMatrix, b: Vec<f64> },
    /// (1/2)‖Ax − b‖²
    LeastSquares { a: DenseMatrix, b: Vec<f64> },
    /// Σ_j log(1 + exp(x_j))
    LogisticSum,
}

/// Smooth convex potential with exact gradient and certified `L_psi`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPsi {
    kind: PsiKind,
    dim: usize,
    lipschitz_grad: f64,
    known_infimum: f64,
}

impl PotentialPsi {
    /// `infimum_override` is required for quadratic forms whose minimum cannot
    /// be computed (singular Q with b outside the range).
    pub fn new(kind: PsiKind, dim: usize, infimum_override: Option<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(FlowError::InvalidArgument("dimension must be positive".into()));
        }
        let (lipschitz_grad, known_infimum) = match &kind {
            PsiKind::Zero => (0.0, 0.0),
            PsiKind::QuadraticForm { q, b } => {
                if q.rows() != dim || q.cols() != dim {
                    return Err(FlowError::InvalidArgument(format!(
                        "quadratic-form: Q must be {dim}x{dim}"
                    )));
                }
                if b.len() != dim {
                    return Err(FlowError::DimensionMismatch {
                        expected: dim,
                        got: b.len(),
                    });
                }
                let l = q.gram_spectral_radius().sqrt();
                let inf = match infimum_override {
                    Some(v) => v,
                    None => {
                        let neg_b: Vec<f64> = b.iter().map(|v| -v).collect();
                        let xstar = q.solve(&neg_b).ok_or_else(|| {
                            FlowError::InvalidArgument(
                                "quadratic-form: singular Q; supply an explicit infimum".into(),
                            )
                        })?;
                        0.5 * vec_ops::dot(&q.matvec(&xstar), &xstar) + vec_ops::dot(b, &xstar)
                    }
                };
                (l, inf)
            }
            PsiKind::LeastSquares { a, b } => {
                if a.cols() != dim {
                    return Err(FlowError::InvalidArgument(format!(
                        "least-squares: A must have {dim} columns"
                    )));
                }
                if b.len() != a.rows() {
                    return Err(FlowError::DimensionMismatch {
                        expected: a.rows(),
                        got: b.len(),
                    });
                }
                // psi >= 0 always, so 0 is a certified lower bound.
                (a.gram_spectral_radius(), infimum_override.unwrap_or(0.0))
            }
            PsiKind::LogisticSum => (0.25, infimum_override.unwrap_or(0.0)),
        };
        Ok(Self {
            kind,
            dim,
            lipschitz_grad,
            known_infimum,
        })
    }

    pub fn kind(&self) -> &PsiKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz_grad(&self) -> f64 {
        self.lipschitz_grad
    }

    pub fn known_infimum(&self) -> f64 {
        self.known_infimum
    }

    fn check_dim(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(FlowError::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match &self.kind {
            PsiKind::Zero => 0.0,
            PsiKind::QuadraticForm { q, b } => {
                0.5 * vec_ops::dot(&q.matvec(x), x) + vec_ops::dot(b, x)
            }
            PsiKind::LeastSquares { a, b } => {
                let r = vec_ops::sub(&a.matvec(x), b);
                0.5 * vec_ops::dot(&r, &r)
            }
            PsiKind::LogisticSum => x.iter().map(|&v| softplus(v)).sum(),
        })
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(match &self.kind {
            PsiKind::Zero => vec![0.0; self.dim],
            PsiKind::QuadraticForm { q, b } => vec_ops::add(&q.matvec(x), b),
            PsiKind::LeastSquares { a, b } => {
                a.matvec_transpose(&vec_ops::sub(&a.matvec(x), b))
            }
            PsiKind::LogisticSum => x.iter().map(|&v| sigmoid(v)).collect(),
        })
    }
}

fn softplus(v: f64) -> f64 {
    if v > 30.0 {
        v
    } else {
        (1.0 + v.exp()).ln()
    }
}

fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

/// The pair (phi, psi) with a certified lower bound on inf(phi + psi).
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPair {
    pub phi: PotentialPhi,
    pub psi: PotentialPsi,
    inf_sum_lower_bound: f64,
}

impl PotentialPair {
    /// Without an override the bound is inf(phi) + inf(psi), which is a valid
    /// lower bound for the sum (each infimum is itself a lower bound).
    pub fn new(phi: PotentialPhi, psi: PotentialPsi, override_bound: Option<f64>) -> Result<Self> {
        if phi.dim() != psi.dim() {
            return Err(FlowError::DimensionMismatch {
                expected: phi.dim(),
                got: psi.dim(),
            });
        }
        let inf_sum_lower_bound =
            override_bound.unwrap_or(phi.known_infimum() + psi.known_infimum());
        Ok(Self {
            phi,
            psi,
            inf_sum_lower_bound,
        })
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn inf_sum_lower_bound(&self) -> f64 {
        self.inf_sum_lower_bound
    }

    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        Ok(self.phi.value(x)? + self.psi.value(x)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(kind: PhiKind) -> PotentialPhi {
        PotentialPhi::new(kind, 1).unwrap()
    }

    #[test]
    fn prox_l1_soft_threshold() {
        let p = phi(PhiKind::L1 { weight: 1.0 });
        assert_eq!(p.prox(1.0, &[2.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn prox_quadratic_shrink() {
        let p = phi(PhiKind::Quadratic { alpha: 1.0 });
        assert_eq!(p.prox(2.0, &[3.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn prox_box_projects() {
        let p = phi(PhiKind::BoxIndicator { lo: 0.0, hi: 1.0 });
        assert_eq!(p.prox(1.0, &[-0.5]).unwrap(), vec![0.0]);
    }

    #[test]
    fn yosida_l1() {
        let p = phi(PhiKind::L1 { weight: 1.0 });
        assert_eq!(p.yosida(1.0, &[2.0]).unwrap(), vec![1.0]);
        assert_eq!(p.yosida(1.0, &[0.5]).unwrap(), vec![0.5]);
    }

    #[test]
    fn yosida_quadratic() {
        let p = phi(PhiKind::Quadratic { alpha: 1.0 });
        assert_eq!(p.yosida(1.0, &[4.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn residual_l1_membership() {
        let p = phi(PhiKind::L1 { weight: 1.0 });
        assert!(p.inclusion_residual(1.0, &[1.0], &[1.0]).unwrap() < 1e-15);
        assert!(p.inclusion_residual(1.0, &[0.0], &[0.5]).unwrap() < 1e-15);
        assert!((p.inclusion_residual(1.0, &[1.0], &[2.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_mu() {
        let p = phi(PhiKind::Zero);
        assert!(p.prox(0.0, &[1.0]).is_err());
        assert!(p.prox(-1.0, &[1.0]).is_err());
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let p = phi(PhiKind::Zero);
        assert!(p.prox(1.0, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn grad_zero_and_quadratic() {
        let z = PotentialPsi::new(PsiKind::Zero, 2, None).unwrap();
        assert_eq!(z.grad(&[3.0, -4.0]).unwrap(), vec![0.0, 0.0]);

        // psi = (1/2)‖x‖² as quadratic form with Q = I, b = 0
        let q = PotentialPsi::new(
            PsiKind::QuadraticForm {
                q: DenseMatrix::identity(2),
                b: vec![0.0, 0.0],
            },
            2,
            None,
        )
        .unwrap();
        assert_eq!(q.grad(&[3.0, -4.0]).unwrap(), vec![3.0, -4.0]);
        assert!((q.lipschitz_grad() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn grad_least_squares() {
        let p = PotentialPsi::new(
            PsiKind::LeastSquares {
                a: DenseMatrix::identity(2),
                b: vec![1.0, 1.0],
            },
            2,
            None,
        )
        .unwrap();
        assert_eq!(p.grad(&[0.0, 0.0]).unwrap(), vec![-1.0, -1.0]);
        assert_eq!(p.known_infimum(), 0.0);
    }

    #[test]
    fn quadform_infimum_computed() {
        // psi = (1/2)x² − x, minimum at x = 1 with value −1/2.
        let p = PotentialPsi::new(
            PsiKind::QuadraticForm {
                q: DenseMatrix::identity(1),
                b: vec![-1.0],
            },
            1,
            None,
        )
        .unwrap();
        assert!((p.known_infimum() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn pair_requires_matching_dims() {
        let f = PotentialPhi::new(PhiKind::Zero, 2).unwrap();
        let g = PotentialPsi::new(PsiKind::Zero, 3, None).unwrap();
        assert!(PotentialPair::new(f, g, None).is_err());
    }

    #[test]
    fn elastic_net_prox() {
        let p = phi(PhiKind::ElasticNet {
            weight: 1.0,
            alpha: 1.0,
        });
        // soft(3, 1)/(1+1) = 1
        assert_eq!(p.prox(1.0, &[3.0]).unwrap(), vec![1.0]);
    }
}
