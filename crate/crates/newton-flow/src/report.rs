//! Plot-ready CSV exports and atomic file writing.

use std::fmt::Write as _;
use std::path::Path;

use crate::bv::BvDiagnostics;
use crate::error::Result;
use crate::flow::Trajectory;
use crate::stability::ThetaSeries;

fn fmt(v: f64) -> String {
    // 17 significant digits round-trips f64 exactly
    format!("{v:.16e}")
}

/// CSV with one row per dense-output time:
/// `t,lambda,mu,objective,residual,x_0..x_{n-1},v_0..v_{n-1},z_0..z_{n-1}`.
pub fn trajectory_csv(trajectory: &Trajectory) -> String {
    let dim = trajectory.samples[0].x.len();
    let mut out = String::from("t,lambda,mu,objective,residual");
    for prefix in ["x", "v", "z"] {
        for i in 0..dim {
            let _ = write!(out, ",{prefix}_{i}");
        }
    }
    out.push('\n');
    for s in &trajectory.samples {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            fmt(s.t),
            fmt(s.lambda),
            fmt(s.mu),
            fmt(s.objective),
            fmt(s.residual)
        );
        for field in [&s.x, &s.v, &s.z] {
            for &c in field.iter() {
                let _ = write!(out, ",{}", fmt(c));
            }
        }
        out.push('\n');
    }
    out
}

/// `t,theta,bound` series for a stability experiment.
pub fn theta_csv(series: &ThetaSeries, bound: f64) -> String {
    let mut out = String::from("t,theta,bound\n");
    for (t, v) in series.times.iter().zip(&series.values) {
        let _ = writeln!(out, "{},{},{}", fmt(*t), fmt(*v), fmt(bound));
    }
    out
}

/// Per-level mollification diagnostics table.
pub fn bv_levels_csv(diag: &BvDiagnostics) -> String {
    let mut out = String::from("n,eps,l1_gap,tv_n,sup_gap_to_prev,cauchy_bound\n");
    for l in &diag.levels {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            l.level,
            fmt(l.eps),
            fmt(l.l1_gap_to_target),
            fmt(l.tv_n),
            l.sup_gap_to_prev.map(fmt).unwrap_or_default(),
            l.cauchy_bound.map(fmt).unwrap_or_default()
        );
    }
    out
}

/// Writes via a temp file in the same directory, then renames.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|f| f.to_string_lossy()).unwrap_or_default()
    ));
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{FlowState, StepStats};

    #[test]
    fn csv_header_and_precision() {
        let traj = Trajectory {
            samples: vec![FlowState {
                t: 0.0,
                z: vec![1.5, 2.0],
                x: vec![1.0, 2.0],
                v: vec![0.5, 0.0],
                mu: 1.0,
                lambda: 1.0,
                objective: 0.25,
                residual: 0.0,
            }],
            stats: StepStats::default(),
        };
        let csv = trajectory_csv(&traj);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,lambda,mu,objective,residual,x_0,x_1,v_0,v_1,z_0,z_1"
        );
        let row = lines.next().unwrap();
        assert!(row.contains("2.5000000000000000e-1")); // 0.25 at 17 digits
    }
}
