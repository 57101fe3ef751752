//! Experiment configuration: string descriptors for the potential and
//! schedule catalogs, the TOML config schema, static validation, and the
//! shipped presets.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bv::{BVSchedule, MollifiedSequenceConfig, Piece, PieceShape};
use crate::error::{FlowError, Result};
use crate::flow::{FlowProblem, IntegratorConfig};
use crate::matrix::DenseMatrix;
use crate::potentials::{PhiKind, PotentialPair, PotentialPhi, PotentialPsi, PsiKind};
use crate::schedule::LambdaSchedule;
use crate::stability::PerturbationPair;

pub const PHI_CATALOG: &[&str] = &[
    "zero",
    "quadratic:alpha=<a>",
    "l1:w=<w>",
    "box:lo=<lo>,hi=<hi>",
    "elastic:w=<w>,alpha=<a>",
];

pub const PSI_CATALOG: &[&str] = &[
    "zero",
    "lsq:A=<path>,b=<path>  (or scalar lsq:a=<a>,b=<b> for ψ = ½(a·x − b)²)",
    "quadform:Q=<path>,b=<path>",
    "logistic",
];

pub const SCHEDULE_CATALOG: &[&str] = &[
    "constant:c=<c>",
    "expdecay:a=<a>,b=<b>,c=<c>  (λ = b·e^{−at} + c)",
    "rational:c=<c>  (λ = 1/(1+t) + c)",
    "pwl:<t0>=<v0>,<t1>=<v1>,...",
];

fn parse_params(spec: &str) -> Result<(String, BTreeMap<String, String>)> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, r),
        None => (spec, ""),
    };
    let mut params = BTreeMap::new();
    if !rest.is_empty() {
        for kv in rest.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                FlowError::Config(format!("descriptor '{spec}': expected key=value, got '{kv}'"))
            })?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok((name.trim().to_string(), params))
}

fn param_f64(params: &BTreeMap<String, String>, key: &str, spec: &str) -> Result<f64> {
    params
        .get(key)
        .ok_or_else(|| FlowError::Config(format!("descriptor '{spec}': missing parameter '{key}'")))?
        .parse::<f64>()
        .map_err(|e| FlowError::Config(format!("descriptor '{spec}': bad '{key}': {e}")))
}

fn nearest(name: &str, candidates: &[&str]) -> String {
    fn levenshtein(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut prev: Vec<usize> = (0..=b.len()).collect();
        for (i, ca) in a.iter().enumerate() {
            let mut cur = vec![i + 1];
            for (j, cb) in b.iter().enumerate() {
                let cost = if ca == cb { 0 } else { 1 };
                cur.push((prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1));
            }
            prev = cur;
        }
        prev[b.len()]
    }
    candidates
        .iter()
        .min_by_key(|c| levenshtein(name, c.split(':').next().unwrap_or(c)))
        .map(|c| c.split(':').next().unwrap_or(c).to_string())
        .unwrap_or_default()
}

/// Builds a φ from its string descriptor (e.g. "l1:w=1").
pub fn parse_phi(spec: &str, dim: usize) -> Result<PotentialPhi> {
    let (name, params) = parse_params(spec)?;
    let kind = match name.as_str() {
        "zero" => PhiKind::Zero,
        "quadratic" => PhiKind::Quadratic {
            alpha: param_f64(&params, "alpha", spec)?,
        },
        "l1" => PhiKind::L1 {
            weight: param_f64(&params, "w", spec)?,
        },
        "box" => PhiKind::BoxIndicator {
            lo: param_f64(&params, "lo", spec)?,
            hi: param_f64(&params, "hi", spec)?,
        },
        "elastic" | "elastic-net" => PhiKind::ElasticNet {
            weight: param_f64(&params, "w", spec)?,
            alpha: param_f64(&params, "alpha", spec)?,
        },
        other => {
            return Err(FlowError::Config(format!(
                "unknown potential '{other}'; did you mean '{}'? catalog: {:?}",
                nearest(other, PHI_CATALOG),
                PHI_CATALOG
            )))
        }
    };
    PotentialPhi::new(kind, dim)
}

/// Builds a ψ from its string descriptor. Matrix-valued descriptors
/// ("lsq:A=<path>,b=<path>", "quadform:Q=<path>,b=<path>") load the dense
/// text format: first line "rows cols", then row-major values.
pub fn parse_psi(spec: &str, dim: usize, infimum_override: Option<f64>) -> Result<PotentialPsi> {
    let (name, params) = parse_params(spec)?;
    let load = |key: &str| -> Result<DenseMatrix> {
        let path = params
            .get(key)
            .ok_or_else(|| FlowError::Config(format!("descriptor '{spec}': missing '{key}'")))?;
        DenseMatrix::from_file(Path::new(path))
    };
    let load_vec = |key: &str| -> Result<Vec<f64>> {
        let m = load(key)?;
        if m.cols() != 1 {
            return Err(FlowError::Config(format!(
                "descriptor '{spec}': '{key}' must be a column vector"
            )));
        }
        Ok((0..m.rows()).map(|i| m.get(i, 0)).collect())
    };
    let kind = match name.as_str() {
        "zero" => PsiKind::Zero,
        "lsq" | "least-squares" => {
            if params.contains_key("A") {
                PsiKind::LeastSquares {
                    a: load("A")?,
                    b: load_vec("b")?,
                }
            } else {
                // scalar shorthand: ψ = ½(a·x − b)², 1-D only
                if dim != 1 {
                    return Err(FlowError::Config(format!(
                        "descriptor '{spec}': scalar lsq shorthand requires dimension 1"
                    )));
                }
                PsiKind::LeastSquares {
                    a: DenseMatrix::new(1, 1, vec![param_f64(&params, "a", spec)?])?,
                    b: vec![param_f64(&params, "b", spec)?],
                }
            }
        }
        "quadform" | "quadratic-form" => PsiKind::QuadraticForm {
            q: load("Q")?,
            b: load_vec("b")?,
        },
        "logistic" | "logistic-sum" => PsiKind::LogisticSum,
        other => {
            return Err(FlowError::Config(format!(
                "unknown potential '{other}'; did you mean '{}'? catalog: {:?}",
                nearest(other, PSI_CATALOG),
                PSI_CATALOG
            )))
        }
    };
    PotentialPsi::new(kind, dim, infimum_override)
}

/// Builds a schedule from its string descriptor (e.g. "rational:c=0.1").
pub fn parse_schedule(spec: &str) -> Result<LambdaSchedule> {
    let (name, params) = parse_params(spec)?;
    match name.as_str() {
        "constant" => LambdaSchedule::constant(param_f64(&params, "c", spec)?),
        "expdecay" | "exponential-decay" => LambdaSchedule::exp_decay(
            param_f64(&params, "a", spec)?,
            param_f64(&params, "b", spec)?,
            param_f64(&params, "c", spec)?,
        ),
        "rational" => LambdaSchedule::rational(param_f64(&params, "c", spec)?),
        "pwl" | "piecewise-linear" => {
            let mut knots: Vec<(f64, f64)> = Vec::new();
            for (k, v) in &params {
                let t = k.parse::<f64>().map_err(|e| {
                    FlowError::Config(format!("descriptor '{spec}': bad knot time '{k}': {e}"))
                })?;
                let val = v.parse::<f64>().map_err(|e| {
                    FlowError::Config(format!("descriptor '{spec}': bad knot value '{v}': {e}"))
                })?;
                knots.push((t, val));
            }
            knots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            LambdaSchedule::piecewise_linear(knots)
        }
        other => Err(FlowError::Config(format!(
            "unknown schedule '{other}'; did you mean '{}'? catalog: {:?}",
            nearest(other, SCHEDULE_CATALOG),
            SCHEDULE_CATALOG
        ))),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub phi: String,
    pub psi: String,
    /// Required for solve/certify/stability; ignored by bv mode.
    pub schedule: Option<String>,
    pub x0: Vec<f64>,
    pub v0: Vec<f64>,
    pub horizon: f64,
    pub inf_sum_lower_bound: Option<f64>,
    pub psi_infimum: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbedSpec {
    pub schedule: String,
    /// Defaults to the base problem's data when omitted.
    pub y0: Option<Vec<f64>>,
    pub w0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceSpec {
    pub from: f64,
    pub to: f64,
    pub left_value: f64,
    pub right_value: f64,
    /// "affine" or "constant"
    pub shape: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BvSpec {
    pub pieces: Vec<PieceSpec>,
    pub eps0: Option<f64>,
    pub levels: Option<usize>,
    pub gap_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IntegratorSpec {
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub h0: Option<f64>,
    pub hmax: Option<f64>,
    pub max_steps: Option<usize>,
    pub dense_output_dt: Option<f64>,
}

impl IntegratorSpec {
    pub fn build(&self) -> IntegratorConfig {
        let d = IntegratorConfig::default();
        IntegratorConfig {
            rtol: self.rtol.unwrap_or(d.rtol),
            atol: self.atol.unwrap_or(d.atol),
            h0: self.h0.unwrap_or(d.h0),
            hmax: self.hmax.unwrap_or(d.hmax),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            dense_output_dt: self.dense_output_dt.unwrap_or(d.dense_output_dt),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// solve | certify | stability | bv | list-potentials
    pub mode: String,
    pub problem: Option<ProblemSpec>,
    pub perturbed: Option<PerturbedSpec>,
    pub bv: Option<BvSpec>,
    #[serde(default)]
    pub integrator: IntegratorSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| FlowError::Config(format!("config parse error: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Full static validation without running anything; an empty list means
    /// the config is runnable.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut diag = |field: &str, message: String| {
            out.push(Diagnostic {
                field: field.to_string(),
                message,
            })
        };

        let known_modes = ["solve", "certify", "stability", "bv", "list-potentials"];
        if !known_modes.contains(&self.mode.as_str()) {
            diag("mode", format!("unknown mode '{}'; expected one of {known_modes:?}", self.mode));
        }
        if self.mode == "list-potentials" {
            return out;
        }

        let Some(problem) = &self.problem else {
            diag("problem", "missing [problem] section".into());
            return out;
        };
        if problem.horizon <= 0.0 {
            diag("problem.horizon", format!("horizon must be positive, got {}", problem.horizon));
        }
        if problem.x0.is_empty() {
            diag("problem.x0", "x0 must be nonempty".into());
        }
        if problem.v0.len() != problem.x0.len() {
            diag(
                "problem.v0",
                format!("v0 has dimension {}, x0 has {}", problem.v0.len(), problem.x0.len()),
            );
        }
        let dim = problem.x0.len().max(1);
        if let Err(e) = parse_phi(&problem.phi, dim) {
            diag("problem.phi", e.to_string());
        }
        if let Err(e) = parse_psi(&problem.psi, dim, problem.psi_infimum) {
            diag("problem.psi", e.to_string());
        }
        match (&problem.schedule, self.mode.as_str()) {
            (Some(s), _) => {
                if let Err(e) = parse_schedule(s) {
                    diag("problem.schedule", e.to_string());
                }
            }
            (None, "bv") => {}
            (None, _) => diag("problem.schedule", "schedule is required for this mode".into()),
        }

        if self.mode == "stability" {
            match &self.perturbed {
                None => diag("perturbed", "stability mode requires a [perturbed] section".into()),
                Some(p) => {
                    if let Err(e) = parse_schedule(&p.schedule) {
                        diag("perturbed.schedule", e.to_string());
                    }
                    for (field, v) in [("perturbed.y0", &p.y0), ("perturbed.w0", &p.w0)] {
                        if let Some(v) = v {
                            if v.len() != problem.x0.len() {
                                diag(field, format!("dimension {} does not match x0", v.len()));
                            }
                        }
                    }
                }
            }
        }
        if self.mode == "bv" {
            match &self.bv {
                None => diag("bv", "bv mode requires a [bv] section".into()),
                Some(spec) => {
                    if let Err(e) = build_bv_schedule(spec) {
                        diag("bv.pieces", e.to_string());
                    }
                    if let Some(eps0) = spec.eps0 {
                        if eps0 <= 0.0 {
                            diag("bv.eps0", "eps0 must be positive".into());
                        }
                    }
                }
            }
        }

        let cfg = self.integrator.build();
        if let Err(e) = cfg.validate() {
            diag("integrator", e.to_string());
        }
        out
    }

    pub fn build_pair(&self) -> Result<PotentialPair> {
        let problem = self
            .problem
            .as_ref()
            .ok_or_else(|| FlowError::Config("missing [problem] section".into()))?;
        let dim = problem.x0.len();
        let phi = parse_phi(&problem.phi, dim)?;
        let psi = parse_psi(&problem.psi, dim, problem.psi_infimum)?;
        PotentialPair::new(phi, psi, problem.inf_sum_lower_bound)
    }

    pub fn build_problem(&self) -> Result<FlowProblem> {
        let problem = self
            .problem
            .as_ref()
            .ok_or_else(|| FlowError::Config("missing [problem] section".into()))?;
        let schedule = parse_schedule(problem.schedule.as_deref().ok_or_else(|| {
            FlowError::Config("problem.schedule is required for this mode".into())
        })?)?;
        FlowProblem::new(
            self.build_pair()?,
            schedule,
            problem.x0.clone(),
            problem.v0.clone(),
            problem.horizon,
        )
    }

    pub fn build_perturbation(&self) -> Result<PerturbationPair> {
        let problem = self
            .problem
            .as_ref()
            .ok_or_else(|| FlowError::Config("missing [problem] section".into()))?;
        let perturbed = self
            .perturbed
            .as_ref()
            .ok_or_else(|| FlowError::Config("missing [perturbed] section".into()))?;
        let lambda = parse_schedule(problem.schedule.as_deref().ok_or_else(|| {
            FlowError::Config("problem.schedule is required for stability mode".into())
        })?)?;
        let eta = parse_schedule(&perturbed.schedule)?;
        PerturbationPair::new(
            self.build_pair()?,
            lambda,
            eta,
            problem.x0.clone(),
            problem.v0.clone(),
            perturbed.y0.clone().unwrap_or_else(|| problem.x0.clone()),
            perturbed.w0.clone().unwrap_or_else(|| problem.v0.clone()),
            problem.horizon,
        )
    }

    pub fn build_bv(&self) -> Result<(BVSchedule, MollifiedSequenceConfig)> {
        let spec = self
            .bv
            .as_ref()
            .ok_or_else(|| FlowError::Config("missing [bv] section".into()))?;
        let schedule = build_bv_schedule(spec)?;
        let defaults = MollifiedSequenceConfig::default();
        Ok((
            schedule,
            MollifiedSequenceConfig {
                eps0: spec.eps0.or(defaults.eps0),
                max_level: spec.levels.unwrap_or(defaults.max_level),
                gap_tol: spec.gap_tol.unwrap_or(defaults.gap_tol),
            },
        ))
    }
}

fn build_bv_schedule(spec: &BvSpec) -> Result<BVSchedule> {
    let pieces = spec
        .pieces
        .iter()
        .map(|p| {
            let shape = match p.shape.as_str() {
                "constant" => PieceShape::Constant,
                "affine" => PieceShape::Affine,
                other => {
                    return Err(FlowError::Config(format!(
                        "bv piece shape '{other}' must be 'constant' or 'affine'"
                    )))
                }
            };
            Ok(Piece {
                from: p.from,
                to: p.to,
                left_value: p.left_value,
                right_value: p.right_value,
                shape,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    BVSchedule::new(pieces)
}

pub fn list_potentials_text() -> String {
    let mut out = String::from("phi (prox-friendly, closed-form prox):\n");
    for p in PHI_CATALOG {
        out.push_str("  ");
        out.push_str(p);
        out.push('\n');
    }
    out.push_str("psi (smooth, exact gradient, certified Lipschitz constant):\n");
    for p in PSI_CATALOG {
        out.push_str("  ");
        out.push_str(p);
        out.push('\n');
    }
    out.push_str("schedules:\n");
    for p in SCHEDULE_CATALOG {
        out.push_str("  ");
        out.push_str(p);
        out.push('\n');
    }
    out
}

pub const PRESET_NAMES: &[&str] = &[
    "decay-quadratic",
    "prox-quadratic",
    "l1-quadratic",
    "stability-scalar",
    "bv-step",
];

/// Named experiment configs, one per shipped experiment.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let tight = IntegratorSpec {
        rtol: Some(1e-9),
        atol: Some(1e-9),
        dense_output_dt: Some(1e-3),
        ..Default::default()
    };
    let problem = |phi: &str, psi: &str, schedule: &str, x0: f64, v0: f64, horizon: f64| ProblemSpec {
        phi: phi.into(),
        psi: psi.into(),
        schedule: Some(schedule.into()),
        x0: vec![x0],
        v0: vec![v0],
        horizon,
        inf_sum_lower_bound: None,
        psi_infimum: None,
    };
    match name {
        // φ = 0, ψ = ½x², λ ≡ 1: x(t) = e^{−t}
        "decay-quadratic" => Some(ExperimentConfig {
            mode: "certify".into(),
            problem: Some(problem("zero", "lsq:a=1,b=0", "constant:c=1", 1.0, 0.0, 5.0)),
            perturbed: None,
            bv: None,
            integrator: tight,
        }),
        // φ = ½x², ψ = 0, λ ≡ 1: x(t) = e^{−t/2}
        "prox-quadratic" => Some(ExperimentConfig {
            mode: "certify".into(),
            problem: Some(problem("quadratic:alpha=1", "zero", "constant:c=1", 1.0, 1.0, 5.0)),
            perturbed: None,
            bv: None,
            integrator: tight,
        }),
        // φ = |x|, ψ = ½(x−2)², λ = 1/(1+t) + 0.1, started off the minimizer
        "l1-quadratic" => Some(ExperimentConfig {
            mode: "certify".into(),
            problem: Some(problem("l1:w=1", "lsq:a=1,b=2", "rational:c=0.1", 2.0, 1.0, 5.0)),
            perturbed: None,
            bv: None,
            integrator: tight,
        }),
        // λ ≡ 1 vs η ≡ 2 on the scalar prox-quadratic flow
        "stability-scalar" => Some(ExperimentConfig {
            mode: "stability".into(),
            problem: Some(problem("quadratic:alpha=1", "zero", "constant:c=1", 1.0, 1.0, 1.0)),
            perturbed: Some(PerturbedSpec {
                schedule: "constant:c=2".into(),
                y0: None,
                w0: None,
            }),
            bv: None,
            integrator: tight,
        }),
        // step schedule 2 → 1 at t = 1 on the scalar prox-quadratic flow
        "bv-step" => Some(ExperimentConfig {
            mode: "bv".into(),
            problem: Some(ProblemSpec {
                phi: "quadratic:alpha=1".into(),
                psi: "zero".into(),
                schedule: None,
                x0: vec![1.0],
                v0: vec![1.0],
                horizon: 2.0,
                inf_sum_lower_bound: None,
                psi_infimum: None,
            }),
            perturbed: None,
            bv: Some(BvSpec {
                pieces: vec![
                    PieceSpec {
                        from: 0.0,
                        to: 1.0,
                        left_value: 2.0,
                        right_value: 2.0,
                        shape: "constant".into(),
                    },
                    PieceSpec {
                        from: 1.0,
                        to: 2.0,
                        left_value: 1.0,
                        right_value: 1.0,
                        shape: "constant".into(),
                    },
                ],
                eps0: None,
                levels: None,
                gap_tol: None,
            }),
            integrator: tight,
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_cleanly() {
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            let diags = cfg.validate();
            assert!(diags.is_empty(), "{name}: {diags:?}");
        }
    }

    #[test]
    fn negative_horizon_diagnosed() {
        let mut cfg = preset("decay-quadratic").unwrap();
        cfg.problem.as_mut().unwrap().horizon = -1.0;
        let diags = cfg.validate();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].field, "problem.horizon");
    }

    #[test]
    fn unknown_potential_suggests_nearest() {
        let mut cfg = preset("decay-quadratic").unwrap();
        cfg.problem.as_mut().unwrap().phi = "l2:w=1".into();
        let diags = cfg.validate();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("l1"), "{}", diags[0].message);
    }

    #[test]
    fn toml_round_trip() {
        let cfg = preset("stability-scalar").unwrap();
        let text = cfg.to_toml();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert!(back.validate().is_empty());
        assert_eq!(back.mode, "stability");
    }

    #[test]
    fn parse_schedule_descriptors() {
        assert!(parse_schedule("constant:c=1").is_ok());
        assert!(parse_schedule("expdecay:a=1,b=1,c=0").is_ok());
        assert!(parse_schedule("rational:c=0.1").is_ok());
        assert!(parse_schedule("pwl:0=2,1=1").is_ok());
        assert!(parse_schedule("linear:c=1").is_err());
    }

    #[test]
    fn lsq_from_matrix_files() {
        let dir = tempfile::tempdir().unwrap();
        let a_path = dir.path().join("A.txt");
        let b_path = dir.path().join("b.txt");
        std::fs::write(&a_path, "2 2\n1 0\n0 1\n").unwrap();
        std::fs::write(&b_path, "2 1\n1\n1\n").unwrap();
        let spec = format!("lsq:A={},b={}", a_path.display(), b_path.display());
        let psi = parse_psi(&spec, 2, None).unwrap();
        assert_eq!(psi.grad(&[0.0, 0.0]).unwrap(), vec![-1.0, -1.0]);
    }
}
