//! Checks that simulated solutions respect the closed-form bounds.
//!
//! Each check runs one or more simulations, measures the worst violation of
//! a bound over every recorded snapshot node and returns a
//! [`VerificationReport`]. Violations are absolute differences unless noted.

mod checks;
mod fd;
pub mod report;


use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::barriers::{
    sign_sweep_with, Barrier, ConeBarrierParams, DecayBarrierParams, Family, GrowthEnvelope, SIGN_TOLERANCE,
};
use crate::error::{constraint, Result};
use crate::exec::Execution;
use crate::radial::{DiffusionScheme, Field};

pub use checks::{
    comparison_pairs, verify_comparison, verify_comparison_batch, verify_cone_extinction,
    verify_decay_rate, verify_envelope, verify_homogeneous_rate, verify_picard_bounds,
    HomogeneousProfile, PicardCheck, DECAY_WINDOW, LIMIT_TOLERANCE,
};
pub use fd::{fd_consistency_check, fd_consistency_check_with, FD_TOLERANCE};

/// Default tolerance of the simulation checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-3;
/// Default tolerance of ordering checks.
pub const ORDER_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Envelope,
    DecayRate,
    HomogeneousRate,
    ConeExtinction,
    Comparison,
    FdConsistency,
    PicardBounds,
    ResidualSigns,
}

impl CheckKind {
    pub fn label(self) -> &'static str {
        match self {
            CheckKind::Envelope => "envelope",
            CheckKind::DecayRate => "decay-rate",
            CheckKind::HomogeneousRate => "homogeneous-rate",
            CheckKind::ConeExtinction => "cone-extinction",
            CheckKind::Comparison => "comparison",
            CheckKind::FdConsistency => "fd-consistency",
            CheckKind::PicardBounds => "picard-bounds",
            CheckKind::ResidualSigns => "residual-signs",
        }
    }
}

/// Grid and time-step settings of a simulation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Resolution {
    pub radius: f64,
    pub cells: usize,
    pub dt_init: f64,
    pub floor: f64,
    /// Number of snapshot intervals over the simulated window.
    pub snapshots: usize,
    /// Simulated window; each check has its own default.
    pub t_end: Option<f64>,
    pub scheme: DiffusionScheme,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            radius: 10.0,
            cells: 200,
            dt_init: 1e-3,
            floor: 1e-8,
            snapshots: 20,
            t_end: None,
            scheme: DiffusionScheme::BackwardEuler,
        }
    }
}

impl Resolution {
    pub fn new(radius: f64, cells: usize, dt_init: f64) -> Self {
        Resolution {
            radius,
            cells,
            dt_init,
            ..Resolution::default()
        }
    }

    pub fn with_t_end(self, t_end: f64) -> Self {
        Resolution {
            t_end: Some(t_end),
            ..self
        }
    }

    /// Both the mesh width and the step size halved.
    pub fn refined(self) -> Self {
        Resolution {
            cells: 2 * self.cells,
            dt_init: 0.5 * self.dt_init,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snapshots == 0 {
            return Err(constraint("snapshots must be at least 1"));
        }
        if let Some(t) = self.t_end {
            if !(t.is_finite() && t > 0.0) {
                return Err(constraint(format!("t_end must be positive, got {t}")));
            }
        }
        crate::radial::build_grid(self.radius, self.cells, 1)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RunSummary {
    pub steps: usize,
    pub snapshots: usize,
    /// Points at which the bound was evaluated.
    pub evaluated: usize,
    /// Points left out of the comparison (outside a barrier's domain).
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub kind: CheckKind,
    /// Canonical text of the parameters, resolution and tolerance.
    pub params: String,
    pub params_hash: String,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub worst_violation: f64,
    /// `(r, t)` of the worst violation.
    pub location: (f64, f64),
    pub stats: RunSummary,
    /// Check-specific figures, in a fixed order.
    pub details: Vec<(String, f64)>,
    pub wall_ms: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

/// A report together with the snapshots of its primary simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: VerificationReport,
    pub snapshots: Vec<Field>,
}

/// First 12 hex digits of the SHA-256 of `canonical`.
pub fn params_hash(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .take(6)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Largest violation seen so far with its location.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Worst {
    pub value: f64,
    pub at: (f64, f64),
}

impl Worst {
    pub fn new() -> Self {
        Worst {
            value: f64::NEG_INFINITY,
            at: (0.0, 0.0),
        }
    }

    pub fn update(&mut self, value: f64, r: f64, t: f64) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = (r, t);
        }
    }

    pub fn merge(&mut self, other: Worst) {
        self.update(other.value, other.at.0, other.at.1);
    }
}

pub(crate) struct ReportBuilder {
    kind: CheckKind,
    params: String,
    tolerance: f64,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(kind: CheckKind, params: String, tolerance: f64) -> Self {
        ReportBuilder {
            kind,
            params,
            tolerance,
            started: Instant::now(),
        }
    }

    pub fn finish(self, worst: Worst, stats: RunSummary, details: Vec<(String, f64)>) -> VerificationReport {
        let worst_violation = if worst.value == f64::NEG_INFINITY { 0.0 } else { worst.value };
        VerificationReport {
            kind: self.kind,
            params_hash: params_hash(&self.params),
            params: self.params,
            tolerance: self.tolerance,
            verdict: Verdict::from_pass(worst_violation <= self.tolerance),
            worst_violation,
            location: worst.at,
            stats,
            details,
            wall_ms: self.started.elapsed().as_millis() as u64,
        }
    }
}

/// Parameter bundle of one check.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckParams {
    Envelope(GrowthEnvelope),
    Decay(DecayBarrierParams),
    Homogeneous { nu: f64, sup0: f64, profile: HomogeneousProfile },
    Cone(ConeBarrierParams),
    Comparison { env: GrowthEnvelope, pairs: usize, seed: u64 },
    Fd { barrier: Barrier, samples: usize },
    Picard(PicardCheck),
    Signs { family: Family, samples: usize },
}

/// A fully specified check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSpec {
    pub params: CheckParams,
    pub tolerance: f64,
    pub resolution: Resolution,
}

impl CheckSpec {
    pub fn kind(&self) -> CheckKind {
        match self.params {
            CheckParams::Envelope(_) => CheckKind::Envelope,
            CheckParams::Decay(_) => CheckKind::DecayRate,
            CheckParams::Homogeneous { .. } => CheckKind::HomogeneousRate,
            CheckParams::Cone(_) => CheckKind::ConeExtinction,
            CheckParams::Comparison { .. } => CheckKind::Comparison,
            CheckParams::Fd { .. } => CheckKind::FdConsistency,
            CheckParams::Picard(_) => CheckKind::PicardBounds,
            CheckParams::Signs { .. } => CheckKind::ResidualSigns,
        }
    }

    pub fn run(&self, exec: Execution) -> Result<Outcome> {
        if !(self.tolerance >= 0.0) {
            return Err(constraint(format!(
                "tolerance must be nonnegative, got {}",
                self.tolerance
            )));
        }
        let (res, tol) = (&self.resolution, self.tolerance);
        match &self.params {
            CheckParams::Envelope(env) => verify_envelope(env, res, tol),
            CheckParams::Decay(p) => verify_decay_rate(p, res, tol),
            CheckParams::Homogeneous { nu, sup0, profile } => {
                verify_homogeneous_rate(*nu, *sup0, *profile, res, tol)
            }
            CheckParams::Cone(p) => verify_cone_extinction(p, res, tol),
            CheckParams::Comparison { env, pairs, seed } => {
                let pairs = comparison_pairs(*seed, *pairs);
                verify_comparison_batch(exec, env, &pairs, res, tol)
            }
            CheckParams::Fd { barrier, samples } => Ok(Outcome {
                report: fd_consistency_check_with(exec, barrier, *samples, tol),
                snapshots: Vec::new(),
            }),
            CheckParams::Picard(p) => verify_picard_bounds(p, tol),
            CheckParams::Signs { family, samples } => Ok(Outcome {
                report: verify_residual_signs(exec, *family, *samples, tol),
                snapshots: Vec::new(),
            }),
        }
    }
}

/// Residual sign sweep of one barrier family. The violation is the signed
/// residual relative to the size of its terms; the check also fails when
/// fewer than `samples` admissible parameter sets were found.
pub fn verify_residual_signs(exec: Execution, family: Family, samples: usize, tol: f64) -> VerificationReport {
    let report = ReportBuilder::new(
        CheckKind::ResidualSigns,
        format!("{}|{}|samples={samples}|tol={tol:e}", CheckKind::ResidualSigns.label(), family.label()),
        tol,
    );
    let sweep = sign_sweep_with(exec, family, samples);
    let mut worst = Worst::new();
    if sweep.evaluated > 0 {
        worst.update(sweep.worst_violation, sweep.worst_at.0.sqrt(), sweep.worst_at.1);
    }
    let stats = RunSummary {
        evaluated: sweep.evaluated,
        skipped: sweep.skipped,
        ..RunSummary::default()
    };
    let details = vec![
        ("violations".into(), sweep.violations as f64),
        ("min_residual".into(), sweep.min_residual),
        ("max_residual".into(), sweep.max_residual),
    ];
    let mut rep = report.finish(worst, stats, details);
    if sweep.evaluated < samples {
        rep.verdict = Verdict::Fail;
    }
    rep
}

/// Default tolerance of each check kind.
pub fn default_tolerance(kind: CheckKind) -> f64 {
    match kind {
        CheckKind::Comparison | CheckKind::PicardBounds => ORDER_TOLERANCE,
        CheckKind::FdConsistency => FD_TOLERANCE,
        CheckKind::ResidualSigns => SIGN_TOLERANCE,
        _ => DEFAULT_TOLERANCE,
    }
}

/// Runs independent checks, in parallel when `exec` allows. Results keep
/// the input order.
pub fn run_suite(exec: Execution, specs: &[CheckSpec]) -> Vec<Result<Outcome>> {
    exec.map(specs, |spec| spec.run(exec))
}
