//! Bounded-variation schedules: exact total variation, smoothing by
//! convolution with a compactly supported polynomial kernel, and the
//! solve-by-smooth-approximation routine with Cauchy-sequence diagnostics.

use serde::Serialize;

use crate::error::{FlowError, Result};
use crate::flow::{FlowProblem, IntegratorConfig, Trajectory};
use crate::potentials::PotentialPair;
use crate::quadrature;
use crate::schedule::{l1_distance, LambdaSchedule};
use crate::stability;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PieceShape {
    Constant,
    Affine,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Piece {
    pub from: f64,
    pub to: f64,
    pub left_value: f64,
    pub right_value: f64,
    pub shape: PieceShape,
}

impl Piece {
    fn slope(&self) -> f64 {
        match self.shape {
            PieceShape::Constant => 0.0,
            PieceShape::Affine => (self.right_value - self.left_value) / (self.to - self.from),
        }
    }

    fn value(&self, t: f64) -> f64 {
        self.left_value + self.slope() * (t - self.from)
    }
}

/// Piecewise representation of a bounded-variation λ: contiguous monotone
/// (affine or constant) pieces, jumps encoded by mismatched adjacent values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BVSchedule {
    pieces: Vec<Piece>,
}

impl BVSchedule {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(FlowError::InvalidArgument("bv schedule: no pieces".into()));
        }
        if pieces[0].from != 0.0 {
            return Err(FlowError::InvalidArgument(
                "bv schedule: first piece must start at t = 0".into(),
            ));
        }
        for p in &pieces {
            if p.to <= p.from {
                return Err(FlowError::InvalidArgument(
                    "bv schedule: each piece needs from < to".into(),
                ));
            }
            if p.left_value <= 0.0 || p.right_value <= 0.0 {
                return Err(FlowError::InvalidArgument(
                    "bv schedule: values must be positive".into(),
                ));
            }
            if p.shape == PieceShape::Constant && p.left_value != p.right_value {
                return Err(FlowError::InvalidArgument(
                    "bv schedule: constant piece with unequal endpoint values".into(),
                ));
            }
        }
        for w in pieces.windows(2) {
            if (w[1].from - w[0].to).abs() > 1e-12 * (1.0 + w[0].to) {
                return Err(FlowError::InvalidArgument(
                    "bv schedule: pieces must be contiguous".into(),
                ));
            }
        }
        Ok(Self { pieces })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn horizon(&self) -> f64 {
        self.pieces.last().unwrap().to
    }

    /// Right-continuous evaluation; the value at internal breakpoints is the
    /// right piece's left value (a measure-zero convention).
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.pieces[0].left_value;
        }
        for p in &self.pieces {
            if t < p.to {
                return p.value(t.max(p.from));
            }
        }
        self.pieces.last().unwrap().right_value
    }

    /// inf over [0, T]; endpoint values suffice since pieces are monotone.
    pub fn inf(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| [p.left_value, p.right_value])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn sup(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| [p.left_value, p.right_value])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exact total variation: per-piece |endpoint difference| plus jump
    /// magnitudes at internal breakpoints.
    pub fn total_variation(&self) -> f64 {
        let pieces_tv: f64 = self
            .pieces
            .iter()
            .map(|p| (p.right_value - p.left_value).abs())
            .sum();
        let jumps_tv: f64 = self
            .pieces
            .windows(2)
            .map(|w| (w[1].left_value - w[0].right_value).abs())
            .sum();
        pieces_tv + jumps_tv
    }

    /// Internal breakpoints (piece boundaries) in (0, horizon).
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces[..self.pieces.len() - 1]
            .iter()
            .map(|p| p.to)
            .collect()
    }

    /// Affine segments of the constant extension of λ to the whole line.
    fn extended_segments(&self) -> Vec<Segment> {
        let mut segs = Vec::with_capacity(self.pieces.len() + 2);
        segs.push(Segment {
            from: f64::NEG_INFINITY,
            to: 0.0,
            slope: 0.0,
            intercept: self.pieces[0].left_value,
        });
        for p in &self.pieces {
            let m = p.slope();
            segs.push(Segment {
                from: p.from,
                to: p.to,
                slope: m,
                intercept: p.left_value - m * p.from,
            });
        }
        segs.push(Segment {
            from: self.horizon(),
            to: f64::INFINITY,
            slope: 0.0,
            intercept: self.pieces.last().unwrap().right_value,
        });
        segs
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    from: f64,
    to: f64,
    slope: f64,
    intercept: f64,
}

// Triweight kernel ρ(u) = (35/32)(1−u²)³ on [−1, 1]: unit mass, C² at the
// support boundary, and polynomial, so its convolution with affine pieces
// has a closed form.
fn kernel(u: f64) -> f64 {
    let s = 1.0 - u * u;
    35.0 / 32.0 * s * s * s
}

// ∫ρ with P(−1) = 0, P(1) = 1
fn kernel_cdf(u: f64) -> f64 {
    35.0 / 32.0 * (u - u.powi(3) + 0.6 * u.powi(5) - u.powi(7) / 7.0) + 0.5
}

// antiderivative of u·ρ(u) (additive constant irrelevant)
fn kernel_moment(u: f64) -> f64 {
    35.0 / 32.0 * (0.5 * u * u - 0.75 * u.powi(4) + 0.5 * u.powi(6) - u.powi(8) / 8.0)
}

// antiderivative of u·ρ'(u): u·ρ(u) − P(u)
fn kernel_dmoment(u: f64) -> f64 {
    u * kernel(u) - kernel_cdf(u)
}

/// Smooth approximation λ_ε = ρ_ε * λ̃, where λ̃ extends λ constantly beyond
/// [0, T]. Values and derivatives are exact piecewise polynomial integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct MollifiedSchedule {
    schedule: BVSchedule,
    eps: f64,
}

impl MollifiedSchedule {
    pub fn new(schedule: BVSchedule, eps: f64) -> Result<Self> {
        if eps <= 0.0 {
            return Err(FlowError::InvalidArgument("mollify: eps must be positive".into()));
        }
        if eps >= schedule.horizon() / 2.0 {
            return Err(FlowError::InvalidArgument(format!(
                "mollify: eps = {eps} must be below half the horizon {}",
                schedule.horizon() / 2.0
            )));
        }
        Ok(Self { schedule, eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn schedule(&self) -> &BVSchedule {
        &self.schedule
    }

    pub fn inf(&self) -> f64 {
        self.schedule.inf()
    }

    /// λ_ε(t) = ∫_{−1}^{1} ρ(u) λ̃(t − εu) du, summed over the affine
    /// segments intersecting the kernel support.
    pub fn value(&self, t: f64) -> f64 {
        self.convolve(t, kernel_cdf, kernel_moment, self.eps)
    }

    /// λ_ε'(t) = (1/ε) ∫ ρ'(u) λ̃(t − εu) du.
    pub fn derivative(&self, t: f64) -> f64 {
        self.convolve(t, kernel, kernel_dmoment, self.eps) / self.eps
    }

    // weight0: antiderivative used against the constant part of the segment,
    // weight1: against the u-linear part.
    fn convolve(&self, t: f64, weight0: fn(f64) -> f64, weight1: fn(f64) -> f64, eps: f64) -> f64 {
        let mut total = 0.0;
        for seg in self.schedule.extended_segments() {
            // τ ∈ [seg.from, seg.to] ∩ [t − ε, t + ε]; u = (t − τ)/ε
            let tau_lo = seg.from.max(t - eps);
            let tau_hi = seg.to.min(t + eps);
            if tau_hi <= tau_lo {
                continue;
            }
            let u_lo = (t - tau_hi) / eps;
            let u_hi = (t - tau_lo) / eps;
            // λ̃(t − εu) = (m·t + q) − m·ε·u on this segment
            let const_part = seg.slope * t + seg.intercept;
            total += const_part * (weight0(u_hi) - weight0(u_lo))
                - seg.slope * eps * (weight1(u_hi) - weight1(u_lo));
        }
        total
    }

    /// Kernel-support edges around each breakpoint; the mollified schedule is
    /// polynomial between consecutive ones.
    pub fn breakpoints(&self, horizon: f64) -> Vec<f64> {
        let mut pts = Vec::new();
        let mut edges = vec![0.0, self.schedule.horizon()];
        edges.extend(self.schedule.breakpoints());
        for tau in edges {
            for s in [tau - self.eps, tau + self.eps] {
                if s > 0.0 && s < horizon {
                    pts.push(s);
                }
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }
}

/// Exact total variation of a BV schedule.
pub fn total_variation(schedule: &BVSchedule) -> f64 {
    schedule.total_variation()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MollifiedSequenceConfig {
    /// Width of level 0; level n uses eps0 / 2ⁿ. Default T/8.
    pub eps0: Option<f64>,
    /// Maximum mollification level.
    pub max_level: usize,
    /// Stopping threshold for the c0-weighted sup gap between consecutive
    /// trajectories.
    pub gap_tol: f64,
}

impl Default for MollifiedSequenceConfig {
    fn default() -> Self {
        Self {
            eps0: None,
            max_level: 12,
            gap_tol: 1e-5,
        }
    }
}

impl MollifiedSequenceConfig {
    pub fn eps_at(&self, schedule: &BVSchedule, n: usize) -> f64 {
        let eps0 = self.eps0.unwrap_or(schedule.horizon() / 8.0);
        eps0 / (1u64 << n) as f64
    }
}

/// Smooth approximation of level n: kernel width ε_n = ε₀/2ⁿ.
pub fn mollify(
    schedule: &BVSchedule,
    n: usize,
    cfg: &MollifiedSequenceConfig,
) -> Result<LambdaSchedule> {
    let eps = cfg.eps_at(schedule, n);
    Ok(LambdaSchedule::Mollified(MollifiedSchedule::new(
        schedule.clone(),
        eps,
    )?))
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelDiagnostics {
    pub level: usize,
    pub eps: f64,
    /// ‖λₙ − λ‖_{L¹} against the BV target.
    pub l1_gap_to_target: f64,
    /// ∫|λ̇ₙ| (must not exceed TV(λ)).
    pub tv_n: f64,
    /// c0-weighted sup gap to the previous level's trajectory.
    pub sup_gap_to_prev: Option<f64>,
    /// (C/2)·exp(TV/c0 + T(1+L/c0))·‖λₙ − λₙ₋₁‖_{L¹}.
    pub cauchy_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BvDiagnostics {
    pub levels: Vec<LevelDiagnostics>,
    pub total_variation: f64,
    pub converged_at_level: usize,
}

/// Integrates the flow for successively finer mollifications of a BV
/// schedule until consecutive trajectories are Cauchy-close in the
/// c0-weighted sup norm, and returns the last trajectory as the BV solution.
pub fn bv_solve(
    pair: &PotentialPair,
    schedule: &BVSchedule,
    x0: Vec<f64>,
    v0: Vec<f64>,
    horizon: f64,
    cfg: &IntegratorConfig,
    seq_cfg: &MollifiedSequenceConfig,
) -> Result<(Trajectory, BvDiagnostics)> {
    if horizon > schedule.horizon() + 1e-12 {
        return Err(FlowError::InvalidArgument(format!(
            "horizon {horizon} exceeds the schedule's span {}",
            schedule.horizon()
        )));
    }
    if v0.iter().all(|&c| c == 0.0) {
        // the existence theorem is stated with v0 ≠ 0; not enforced here
        eprintln!("warning: bv_solve called with v0 = 0");
    }
    let c0 = schedule.inf();
    let tv = schedule.total_variation();
    let l = pair.psi.lipschitz_grad();
    let constant_c =
        stability::constant_c_parts(pair, c0, horizon, (&x0, &v0), (&x0, &v0))?;
    let growth = (tv / c0 + horizon * (1.0 + l / c0)).exp();

    let bv_as_lambda_l1 = |smooth: &LambdaSchedule| -> f64 {
        // ‖λₙ − λ‖_{L¹}: quadrature split at the jump points and kernel edges
        let mut splits = schedule.breakpoints();
        splits.extend(smooth.breakpoints(horizon));
        quadrature::integrate_with_splits(
            |t| (smooth.value(t) - schedule.value(t)).abs(),
            0.0,
            horizon,
            &splits,
            1e-12 * (1.0 + horizon),
        )
    };

    let integrate_level = |n: usize| -> Result<(LambdaSchedule, Trajectory)> {
        let smooth = mollify(schedule, n, seq_cfg)?;
        let problem = FlowProblem::new(pair.clone(), smooth.clone(), x0.clone(), v0.clone(), horizon)?;
        let traj = problem.integrate(cfg)?;
        Ok((smooth, traj))
    };

    let (mut prev_smooth, mut prev_traj) = integrate_level(0)?;
    let mut levels = vec![LevelDiagnostics {
        level: 0,
        eps: seq_cfg.eps_at(schedule, 0),
        l1_gap_to_target: bv_as_lambda_l1(&prev_smooth),
        tv_n: prev_smooth.l1_derivative_norm(horizon),
        sup_gap_to_prev: None,
        cauchy_bound: None,
    }];

    let mut last_gap = f64::INFINITY;
    for n in 1..=seq_cfg.max_level {
        let (smooth, traj) = integrate_level(n)?;
        let gap = stability::theta_series(&prev_traj, &traj, c0).sup;
        let l1_between = l1_distance(&prev_smooth, &smooth, horizon);
        levels.push(LevelDiagnostics {
            level: n,
            eps: seq_cfg.eps_at(schedule, n),
            l1_gap_to_target: bv_as_lambda_l1(&smooth),
            tv_n: smooth.l1_derivative_norm(horizon),
            sup_gap_to_prev: Some(gap),
            cauchy_bound: Some(0.5 * constant_c * growth * l1_between),
        });
        prev_smooth = smooth;
        prev_traj = traj;
        last_gap = gap;
        if gap <= seq_cfg.gap_tol {
            return Ok((
                prev_traj,
                BvDiagnostics {
                    levels,
                    total_variation: tv,
                    converged_at_level: n,
                },
            ));
        }
    }
    Err(FlowError::NonConvergence {
        levels: seq_cfg.max_level,
        last_gap,
        target: seq_cfg.gap_tol,
    })
}
