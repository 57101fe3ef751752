//! Embedded Dormand–Prince 5(4) integrator with PI step-size control,
//! fourth-order dense output, and step snapping at schedule kinks.

use crate::error::{FlowError, IntegrationFailureKind, Result};
use crate::flow::{FlowProblem, FlowState, IntegratorConfig, StepStats, Trajectory};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

// b − b̂: difference of the 5th- and 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// dense-output coefficients (Hairer & Wanner's contd5)
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct DenseSegment {
    t: f64,
    h: f64,
    rcont: [Vec<f64>; 5],
}

impl DenseSegment {
    fn eval(&self, t: f64) -> Vec<f64> {
        let theta = (t - self.t) / self.h;
        let theta1 = 1.0 - theta;
        (0..self.rcont[0].len())
            .map(|i| {
                self.rcont[0][i]
                    + theta
                        * (self.rcont[1][i]
                            + theta1
                                * (self.rcont[2][i]
                                    + theta * (self.rcont[3][i] + theta1 * self.rcont[4][i])))
            })
            .collect()
    }
}

fn error_norm(err: &[f64], z0: &[f64], z1: &[f64], atol: f64, rtol: f64) -> f64 {
    let n = err.len() as f64;
    let s: f64 = err
        .iter()
        .zip(z0.iter().zip(z1))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.abs().max(b.abs());
            (e / sc) * (e / sc)
        })
        .sum();
    (s / n).sqrt()
}

pub fn integrate(problem: &FlowProblem, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let horizon = problem.horizon;

    // dense output grid, always including the horizon
    let mut grid: Vec<f64> = Vec::new();
    let mut k = 0usize;
    loop {
        let t = k as f64 * cfg.dense_output_dt;
        if t >= horizon - 1e-12 * (1.0 + horizon) {
            break;
        }
        grid.push(t);
        k += 1;
    }
    grid.push(horizon);

    let mut breakpoints = problem.lambda.breakpoints(horizon);
    breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breakpoints.dedup();

    let mut t = 0.0;
    let mut z = problem.z0();
    let mut k1 = problem.z_rhs(t, &z)?;
    let mut samples: Vec<FlowState> = vec![problem.state_at(0.0, &z)?];
    let mut next_grid = 1usize;
    let mut next_bp = 0usize;

    let mut stats = StepStats::default();
    let mut h = cfg.h0.min(cfg.hmax).min(horizon);
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;

    let fail = |kind: IntegrationFailureKind, t: f64, samples: Vec<FlowState>, stats: StepStats| {
        FlowError::IntegrationFailure {
            kind,
            t,
            partial: Box::new(Trajectory { samples, stats }),
        }
    };

    while t < horizon - 1e-14 * (1.0 + horizon) {
        if stats.steps + stats.rejected >= cfg.max_steps {
            return Err(fail(IntegrationFailureKind::MaxStepsExceeded, t, samples, stats));
        }
        // never step past the horizon or across a schedule kink
        h = h.min(cfg.hmax).min(horizon - t);
        while next_bp < breakpoints.len() && breakpoints[next_bp] <= t + 1e-14 * (1.0 + t) {
            next_bp += 1;
        }
        if next_bp < breakpoints.len() {
            let bp = breakpoints[next_bp];
            if t + h > bp - 1e-14 * (1.0 + bp) {
                h = bp - t;
            }
        }
        if h < 1e-14 * (1.0 + t.abs()) {
            return Err(fail(IntegrationFailureKind::StepUnderflow, t, samples, stats));
        }

        let y2 = axpy1(&z, h, &[(A21, &k1)]);
        let k2 = problem.z_rhs(t + C2 * h, &y2)?;
        let y3 = axpy1(&z, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = problem.z_rhs(t + C3 * h, &y3)?;
        let y4 = axpy1(&z, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = problem.z_rhs(t + C4 * h, &y4)?;
        let y5 = axpy1(&z, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = problem.z_rhs(t + C5 * h, &y5)?;
        let y6 = axpy1(
            &z,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let k6 = problem.z_rhs(t + h, &y6)?;
        let z_new = axpy1(
            &z,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = problem.z_rhs(t + h, &z_new)?;

        let err: Vec<f64> = (0..z.len())
            .map(|i| {
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            })
            .collect();
        let err_norm = error_norm(&err, &z, &z_new, cfg.atol, cfg.rtol);

        if !err_norm.is_finite() {
            stats.rejected += 1;
            h *= 0.25;
            last_rejected = true;
            continue;
        }

        let expo1 = 0.2 - 0.04 * 0.75;
        let fac11 = err_norm.max(1e-16).powf(expo1);

        if err_norm <= 1.0 {
            // accepted: emit dense output over (t, t+h]
            stats.steps += 1;
            stats.max_error_estimate = stats.max_error_estimate.max(err_norm);
            let seg = {
                let ydiff: Vec<f64> = z_new.iter().zip(&z).map(|(a, b)| a - b).collect();
                let bspl: Vec<f64> = k1
                    .iter()
                    .zip(&ydiff)
                    .map(|(k, d)| h * k - d)
                    .collect();
                let rcont4: Vec<f64> = ydiff
                    .iter()
                    .zip(k7.iter().zip(&bspl))
                    .map(|(d, (k, b))| d - h * k - b)
                    .collect();
                let rcont5: Vec<f64> = (0..z.len())
                    .map(|i| {
                        h * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i])
                    })
                    .collect();
                DenseSegment {
                    t,
                    h,
                    rcont: [z.clone(), ydiff, bspl, rcont4, rcont5],
                }
            };
            let t_end = t + h;
            while next_grid < grid.len() && grid[next_grid] <= t_end + 1e-14 * (1.0 + t_end) {
                let tg = grid[next_grid].min(t_end);
                let zg = if (tg - t_end).abs() <= 1e-14 * (1.0 + t_end) {
                    z_new.clone()
                } else {
                    seg.eval(tg)
                };
                samples.push(problem.state_at(grid[next_grid].min(horizon), &zg)?);
                next_grid += 1;
            }

            t = t_end;
            z = z_new;
            k1 = k7;

            let facmax = if last_rejected { 1.0 } else { 5.0 };
            let fac = fac11 / facold.powf(0.04);
            let scale = (0.9 / fac).clamp(0.2, facmax);
            h *= scale;
            facold = err_norm.max(1e-4);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let scale = (0.9 / fac11).clamp(0.2, 1.0);
            h *= scale;
            last_rejected = true;
        }
    }

    // a final grid point can be left pending if the loop exited exactly at T
    debug_assert_eq!(next_grid, grid.len(), "dense grid fully emitted");

    Ok(Trajectory { samples, stats })
}

fn axpy1(z: &[f64], h: f64, terms: &[(f64, &Vec<f64>)]) -> Vec<f64> {
    (0..z.len())
        .map(|i| {
            let mut s = z[i];
            for (c, k) in terms {
                s += h * c * k[i];
            }
            s
        })
        .collect()
}
