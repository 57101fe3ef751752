//! Runs a configured experiment end to end: builds the problem, integrates,
//! checks the relevant bounds, and writes CSV/JSON artifacts atomically.

use std::path::Path;

use serde::Serialize;

use crate::bv::{bv_solve, BvDiagnostics};
use crate::certify::{certify_energy, CertificateReport};
use crate::config::{list_potentials_text, Diagnostic, ExperimentConfig};
use crate::error::FlowError;
use crate::flow::StepStats;
use crate::report;
use crate::stability::{run_stability_experiment, StabilityBoundReport};

/// Process exit categories. `Ok` also covers experiments whose checks all
/// pass; a run that completes but violates a certified bound exits with
/// `CertificateFailure`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExitCategory {
    Ok,
    ConfigError,
    InadmissibleData,
    IntegrationFailure,
    CertificateFailure,
}

impl ExitCategory {
    pub fn code(self) -> i32 {
        match self {
            Self::Ok => 0,
            Self::ConfigError => 2,
            Self::InadmissibleData => 3,
            Self::IntegrationFailure => 4,
            Self::CertificateFailure => 5,
        }
    }
}

fn categorize(err: &FlowError) -> ExitCategory {
    match err {
        FlowError::InadmissibleData { .. } => ExitCategory::InadmissibleData,
        FlowError::IntegrationFailure { .. } | FlowError::NonConvergence { .. } => {
            ExitCategory::IntegrationFailure
        }
        _ => ExitCategory::ConfigError,
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub mode: String,
    pub exit: ExitCategory,
    pub messages: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrator_stats: Option<StepStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityBoundReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bv: Option<BvDiagnostics>,
    pub wall_time_secs: f64,
}

impl RunReport {
    fn empty(mode: &str) -> Self {
        Self {
            mode: mode.to_string(),
            exit: ExitCategory::Ok,
            messages: Vec::new(),
            diagnostics: Vec::new(),
            integrator_stats: None,
            certificate: None,
            stability: None,
            bv: None,
            wall_time_secs: 0.0,
        }
    }
}

/// Executes the experiment described by `config`, writing artifacts under
/// `out_dir` (created if absent). Never panics on bad input: all failures
/// are mapped to an `ExitCategory` in the returned report.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> RunReport {
    let start = std::time::Instant::now();
    let mut rep = RunReport::empty(&config.mode);

    let diags = config.validate();
    if !diags.is_empty() {
        rep.exit = ExitCategory::ConfigError;
        rep.messages = diags
            .iter()
            .map(|d| format!("{}: {}", d.field, d.message))
            .collect();
        rep.diagnostics = diags;
        rep.wall_time_secs = start.elapsed().as_secs_f64();
        return rep;
    }

    let result = execute(config, out_dir, &mut rep);
    if let Err(err) = result {
        rep.exit = categorize(&err);
        rep.messages.push(err.to_string());
        // keep whatever the integrator managed before failing
        if let FlowError::IntegrationFailure { partial, .. } = &err {
            if !partial.samples.is_empty() {
                let _ = report::write_atomic(
                    &out_dir.join("trajectory_partial.csv"),
                    &report::trajectory_csv(partial),
                );
                rep.integrator_stats = Some(partial.stats);
            }
        }
    }
    rep.wall_time_secs = start.elapsed().as_secs_f64();
    let _ = report::write_atomic(
        &out_dir.join("report.json"),
        &serde_json::to_string_pretty(&rep).expect("report serializes"),
    );
    rep
}

fn execute(
    config: &ExperimentConfig,
    out_dir: &Path,
    rep: &mut RunReport,
) -> crate::error::Result<()> {
    let cfg = config.integrator.build();
    match config.mode.as_str() {
        "list-potentials" => {
            rep.messages.push(list_potentials_text());
        }
        "solve" | "certify" => {
            let problem = config.build_problem()?;
            let traj = problem.integrate(&cfg)?;
            rep.integrator_stats = Some(traj.stats);
            report::write_atomic(&out_dir.join("trajectory.csv"), &report::trajectory_csv(&traj))?;
            if config.mode == "certify" {
                let cert = certify_energy(&traj, &problem, None)?;
                report::write_atomic(
                    &out_dir.join("certificate.json"),
                    &serde_json::to_string_pretty(&cert).expect("certificate serializes"),
                )?;
                if !cert.all_pass {
                    rep.exit = ExitCategory::CertificateFailure;
                    for c in cert.failing() {
                        rep.messages.push(format!(
                            "{}: measured {:.6e} > bound {:.6e} (tolerance {:.3e})",
                            c.id, c.measured, c.bound, cert.tolerance
                        ));
                    }
                }
                rep.certificate = Some(cert);
            }
        }
        "stability" => {
            let pert = config.build_perturbation()?;
            let stab = run_stability_experiment(&pert, &cfg)?;
            report::write_atomic(
                &out_dir.join("theta.csv"),
                &report::theta_csv(&stab.theta, stab.theoretical_bound),
            )?;
            if !stab.sound {
                rep.exit = ExitCategory::CertificateFailure;
                rep.messages.push(format!(
                    "measured sup θ = {:.6e} exceeds the bound {:.6e}",
                    stab.measured_sup_theta, stab.theoretical_bound
                ));
            }
            rep.stability = Some(stab);
        }
        "bv" => {
            let problem = config
                .problem
                .as_ref()
                .ok_or_else(|| FlowError::Config("missing [problem] section".into()))?;
            let pair = config.build_pair()?;
            let (schedule, seq_cfg) = config.build_bv()?;
            let (traj, diag) = bv_solve(
                &pair,
                &schedule,
                problem.x0.clone(),
                problem.v0.clone(),
                problem.horizon,
                &cfg,
                &seq_cfg,
            )?;
            rep.integrator_stats = Some(traj.stats);
            report::write_atomic(&out_dir.join("trajectory.csv"), &report::trajectory_csv(&traj))?;
            report::write_atomic(&out_dir.join("bv_levels.csv"), &report::bv_levels_csv(&diag))?;

            // convergence certificates: each level's sup gap must respect its
            // Cauchy bound (up to the integrator budget), and ∫|λ̇ₙ| ≤ TV(λ)
            let budget = 10.0 * (cfg.atol + cfg.rtol);
            let mut sound = true;
            for l in &diag.levels {
                if let (Some(gap), Some(bound)) = (l.sup_gap_to_prev, l.cauchy_bound) {
                    if gap > bound + budget {
                        sound = false;
                        rep.messages.push(format!(
                            "level {}: sup gap {:.6e} exceeds the Cauchy bound {:.6e}",
                            l.level, gap, bound
                        ));
                    }
                }
                if l.tv_n > diag.total_variation + 1e-8 {
                    sound = false;
                    rep.messages.push(format!(
                        "level {}: ∫|λ̇ₙ| = {:.6e} exceeds TV(λ) = {:.6e}",
                        l.level, l.tv_n, diag.total_variation
                    ));
                }
            }
            if !sound {
                rep.exit = ExitCategory::CertificateFailure;
            }
            rep.bv = Some(diag);
        }
        other => {
            return Err(FlowError::Config(format!("unknown mode '{other}'")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;

    #[test]
    fn certify_preset_runs_clean() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = preset("prox-quadratic").unwrap();
        cfg.problem.as_mut().unwrap().horizon = 1.0; // keep the test fast
        let rep = run(&cfg, dir.path());
        assert_eq!(rep.exit, ExitCategory::Ok, "{:?}", rep.messages);
        assert!(dir.path().join("trajectory.csv").exists());
        assert!(dir.path().join("certificate.json").exists());
        assert!(dir.path().join("report.json").exists());
    }

    #[test]
    fn invalid_config_maps_to_config_error() {
        let mut cfg = preset("prox-quadratic").unwrap();
        cfg.problem.as_mut().unwrap().horizon = -1.0;
        let dir = tempfile::tempdir().unwrap();
        let rep = run(&cfg, dir.path());
        assert_eq!(rep.exit, ExitCategory::ConfigError);
        assert_eq!(rep.exit.code(), 2);
    }

    #[test]
    fn inadmissible_data_maps_to_exit_3() {
        // v0 = 5 is not a subgradient of |x| anywhere
        let mut cfg = preset("l1-quadratic").unwrap();
        cfg.problem.as_mut().unwrap().v0 = vec![5.0];
        let dir = tempfile::tempdir().unwrap();
        let rep = run(&cfg, dir.path());
        assert_eq!(rep.exit, ExitCategory::InadmissibleData);
        assert_eq!(rep.exit.code(), 3);
    }

    #[test]
    fn stability_preset_sound() {
        let dir = tempfile::tempdir().unwrap();
        let rep = run(&preset("stability-scalar").unwrap(), dir.path());
        assert_eq!(rep.exit, ExitCategory::Ok, "{:?}", rep.messages);
        assert!(dir.path().join("theta.csv").exists());
        let stab = rep.stability.unwrap();
        assert!(stab.sound);
        assert!(stab.tightness < 1.0);
    }
}
