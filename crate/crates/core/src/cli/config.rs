//! Run configuration: one TOML document with a top-level `command` and one
//! table per command. Every table is optional and filled with defaults;
//! unknown keys are rejected.

use std::path::PathBuf;

use serde::Deserialize;

use crate::barriers::{derive_cone_params, derive_decay_params, derive_growth_params, Barrier, Family};
use crate::error::{constraint, Error, Result};
use crate::radial::{build_grid, BoundaryCondition, DiffusionScheme, Field, SolverConfig};
use crate::verify::{default_tolerance, CheckParams, CheckSpec, HomogeneousProfile, PicardCheck, Resolution};

/// Seed of the comparison pairs when neither the file nor the flags set one.
pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    BarriersCheck,
    Envelope,
    Decay,
    Homogeneous,
    Cone,
    Picard,
    Compare,
    FdCheck,
    Suite,
}

impl Command {
    pub fn label(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::BarriersCheck => "barriers-check",
            Command::Envelope => "envelope",
            Command::Decay => "decay",
            Command::Homogeneous => "homogeneous",
            Command::Cone => "cone",
            Command::Picard => "picard",
            Command::Compare => "compare",
            Command::FdCheck => "fd-check",
            Command::Suite => "suite",
        }
    }

    /// Commands the suite runs by default.
    pub const CHECKS: [Command; 8] = [
        Command::Envelope,
        Command::Decay,
        Command::Homogeneous,
        Command::Cone,
        Command::Compare,
        Command::Picard,
        Command::FdCheck,
        Command::BarriersCheck,
    ];
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Command,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
    simulate: Option<SimulateTable>,
    #[serde(rename = "barriers-check")]
    barriers_check: Option<SignTable>,
    envelope: Option<EnvelopeTable>,
    decay: Option<DecayTable>,
    homogeneous: Option<HomogeneousTable>,
    cone: Option<ConeTable>,
    picard: Option<PicardTable>,
    compare: Option<CompareTable>,
    #[serde(rename = "fd-check")]
    fd_check: Option<FdTable>,
    suite: Option<SuiteTable>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialProfile {
    /// `u0 ≡ value`.
    #[default]
    Constant,
    /// `u0 = value/(1+r²)`.
    Lorentzian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    #[default]
    Neumann,
    /// Holds `u0(R)` at `r = R`.
    Dirichlet,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SimulateTable {
    nu: f64,
    n: usize,
    radius: f64,
    cells: usize,
    t_end: f64,
    dt_init: f64,
    dt_safety: f64,
    floor: f64,
    snapshot_every: Option<f64>,
    scheme: DiffusionScheme,
    halt_on_extinction: bool,
    initial: InitialProfile,
    value: f64,
    boundary: BoundaryKind,
}

impl Default for SimulateTable {
    fn default() -> Self {
        SimulateTable {
            nu: 1.0,
            n: 3,
            radius: 1.0,
            cells: 64,
            t_end: 1.0,
            dt_init: 1e-3,
            dt_safety: 0.1,
            floor: 1e-8,
            snapshot_every: None,
            scheme: DiffusionScheme::BackwardEuler,
            halt_on_extinction: false,
            initial: InitialProfile::Constant,
            value: 1.0,
            boundary: BoundaryKind::Neumann,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct EnvelopeTable {
    nu: f64,
    n: usize,
    alpha1: f64,
    alpha2: Option<f64>,
    eps: f64,
    a2: Option<f64>,
    tolerance: Option<f64>,
    resolution: Option<Resolution>,
}

impl Default for EnvelopeTable {
    fn default() -> Self {
        EnvelopeTable {
            nu: 1.0,
            n: 3,
            alpha1: 0.5,
            alpha2: None,
            eps: 0.5,
            a2: None,
            tolerance: None,
            resolution: None,
        }
    }
}

impl EnvelopeTable {
    fn barrier_params(&self) -> Result<crate::barriers::GrowthEnvelope> {
        derive_growth_params(
            self.nu,
            self.n,
            self.alpha1,
            self.alpha2.unwrap_or(self.alpha1),
            self.eps,
            self.a2,
        )
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct DecayTable {
    nu: f64,
    n: usize,
    beta: f64,
    horizon: f64,
    tolerance: Option<f64>,
    resolution: Option<Resolution>,
}

impl Default for DecayTable {
    fn default() -> Self {
        DecayTable {
            nu: 1.0,
            n: 4,
            beta: 0.5,
            horizon: 1.0,
            tolerance: None,
            resolution: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct HomogeneousTable {
    nu: f64,
    sup0: f64,
    profile: HomogeneousProfile,
    tolerance: Option<f64>,
    resolution: Option<Resolution>,
}

impl Default for HomogeneousTable {
    fn default() -> Self {
        HomogeneousTable {
            nu: 1.0,
            sup0: 1.0,
            profile: HomogeneousProfile::Constant,
            tolerance: None,
            resolution: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConeTable {
    nu: f64,
    n: usize,
    amp: f64,
    t1: f64,
    tolerance: Option<f64>,
    resolution: Option<Resolution>,
}

impl Default for ConeTable {
    fn default() -> Self {
        ConeTable {
            nu: 1.0,
            n: 1,
            amp: 2f64.powf(-0.5),
            t1: 1.0,
            tolerance: None,
            resolution: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PicardTable {
    delta: f64,
    nu: f64,
    radius: f64,
    cells: usize,
    n: usize,
    t1: f64,
    max_iters: usize,
    lin_dt: Option<f64>,
    tolerance: Option<f64>,
}

impl Default for PicardTable {
    fn default() -> Self {
        let d = PicardCheck::default();
        PicardTable {
            delta: d.delta,
            nu: d.nu,
            radius: d.radius,
            cells: d.cells,
            n: d.dim,
            t1: d.t1,
            max_iters: d.max_iters,
            lin_dt: d.lin_dt,
            tolerance: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct CompareTable {
    nu: f64,
    n: usize,
    alpha1: f64,
    alpha2: Option<f64>,
    eps: f64,
    pairs: usize,
    tolerance: Option<f64>,
    resolution: Option<Resolution>,
}

impl Default for CompareTable {
    fn default() -> Self {
        CompareTable {
            nu: 1.0,
            n: 3,
            alpha1: 0.5,
            alpha2: None,
            eps: 0.5,
            pairs: 10,
            tolerance: None,
            resolution: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SignTable {
    families: Vec<Family>,
    samples: usize,
    tolerance: Option<f64>,
}

impl Default for SignTable {
    fn default() -> Self {
        SignTable {
            families: Family::ALL.to_vec(),
            samples: 10_000,
            tolerance: None,
        }
    }
}

/// Barrier parameters come from the `envelope`, `decay`, `homogeneous` and
/// `cone` tables of the same file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FdTable {
    families: Vec<Family>,
    samples: usize,
    tolerance: Option<f64>,
}

impl Default for FdTable {
    fn default() -> Self {
        FdTable {
            families: Family::ALL.to_vec(),
            samples: 1000,
            tolerance: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SuiteTable {
    checks: Vec<Command>,
}

impl Default for SuiteTable {
    fn default() -> Self {
        SuiteTable {
            checks: Command::CHECKS.to_vec(),
        }
    }
}

/// A fully resolved simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateJob {
    pub u0: Field,
    pub cfg: SolverConfig,
    pub bc: BoundaryCondition,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Simulate(SimulateJob),
    Checks(Vec<CheckSpec>),
}

/// Validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub job: Job,
}

impl RunConfig {
    /// Applies a global tolerance multiplier to every check.
    pub fn scale_tolerances(&mut self, factor: f64) -> Result<()> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(constraint(format!("tolerance scale must be nonnegative, got {factor}")));
        }
        if let Job::Checks(specs) = &mut self.job {
            for s in specs {
                s.tolerance *= factor;
            }
        }
        Ok(())
    }

    /// Replaces the comparison seed.
    pub fn reseed(&mut self, seed: u64) {
        self.seed = seed;
        if let Job::Checks(specs) = &mut self.job {
            for s in specs {
                if let CheckParams::Comparison { seed: s, .. } = &mut s.params {
                    *s = seed;
                }
            }
        }
    }

    /// Text of everything that determines the outputs; the output directory
    /// is left out.
    pub fn canonical(&self) -> String {
        format!("{}|seed={}|{:?}", self.command.label(), self.seed, self.job)
    }

    /// Human-readable lines describing the resolved run, derived constants
    /// included.
    pub fn describe(&self) -> Vec<String> {
        match &self.job {
            Job::Simulate(j) => vec![format!(
                "simulate: n = {}, R = {}, M = {}, nu = {}, t_end = {}, boundary = {:?}",
                j.u0.grid.dim(),
                j.u0.grid.radius(),
                j.u0.grid.cells(),
                j.cfg.nu,
                j.cfg.t_end,
                j.bc
            )],
            Job::Checks(specs) => specs.iter().map(describe_spec).collect(),
        }
    }
}

fn describe_spec(s: &CheckSpec) -> String {
    let what = match &s.params {
        CheckParams::Envelope(e) => format!(
            "nu = {}, n = {}, alpha1 = {}, alpha2 = {}, eps = {}: A1 = {}, A2 = {}, b1 = {}, b2 = {}",
            e.nu, e.dim, e.alpha1, e.alpha2, e.eps, e.a1, e.a2, e.b1, e.b2
        ),
        CheckParams::Decay(p) => format!(
            "nu = {}, n = {}, beta = {}, T = {}: A3 = {}",
            p.nu, p.dim, p.beta, p.horizon, p.a3
        ),
        CheckParams::Homogeneous { nu, sup0, profile } => {
            format!("nu = {nu}, sup u0 = {sup0}, profile = {profile:?}")
        }
        CheckParams::Cone(p) => format!(
            "nu = {}, n = {}, A = {}, T1 = {}: b = {}, T = {}",
            p.nu, p.dim, p.amp, p.t1, p.slope, p.horizon
        ),
        CheckParams::Comparison { env, pairs, seed } => format!(
            "{pairs} pairs, seed {seed}, nu = {}, n = {}, alpha1 = {}: A1 = {}, b1 = {}",
            env.nu, env.dim, env.alpha1, env.a1, env.b1
        ),
        CheckParams::Fd { barrier, samples } => format!("{} at {samples} points", barrier.name()),
        CheckParams::Picard(p) => format!(
            "delta = {}, nu = {}, R = {}, n = {}, T1 = {}, {} cells",
            p.delta, p.nu, p.radius, p.dim, p.t1, p.cells
        ),
        CheckParams::Signs { family, samples } => format!("{} at {samples} parameter sets", family.label()),
    };
    format!("{}: {what} (tolerance {:e})", s.kind().label(), s.tolerance)
}

fn resolution(r: Option<Resolution>) -> Result<Resolution> {
    let r = r.unwrap_or_default();
    r.validate()?;
    Ok(r)
}

fn spec(params: CheckParams, tolerance: Option<f64>, res: Resolution) -> CheckSpec {
    let mut s = CheckSpec {
        params,
        tolerance: 0.0,
        resolution: res,
    };
    s.tolerance = tolerance.unwrap_or_else(|| default_tolerance(s.kind()));
    s
}

fn check_tolerance(t: Option<f64>) -> Result<()> {
    match t {
        Some(t) if !(t.is_finite() && t >= 0.0) => Err(constraint(format!("tolerance must be nonnegative, got {t}"))),
        _ => Ok(()),
    }
}

/// Sample-count check shared by the sweep tables.
fn check_samples(samples: usize, families: &[Family]) -> Result<()> {
    if samples == 0 {
        return Err(constraint("samples must be at least 1"));
    }
    if families.is_empty() {
        return Err(constraint("families must not be empty"));
    }
    Ok(())
}

impl RawConfig {
    fn envelope(&self) -> EnvelopeTable {
        self.envelope.clone().unwrap_or_default()
    }

    fn decay(&self) -> DecayTable {
        self.decay.clone().unwrap_or_default()
    }

    fn homogeneous(&self) -> HomogeneousTable {
        self.homogeneous.clone().unwrap_or_default()
    }

    fn cone(&self) -> ConeTable {
        self.cone.clone().unwrap_or_default()
    }

    fn cone_params(&self) -> Result<crate::barriers::ConeBarrierParams> {
        let t = self.cone();
        derive_cone_params(t.nu, t.n, t.amp, t.t1)
    }

    fn decay_params(&self) -> Result<crate::barriers::DecayBarrierParams> {
        let t = self.decay();
        derive_decay_params(t.nu, t.n, t.beta, t.horizon)
    }

    /// Barrier of `family` built from this file's parameter tables.
    fn barrier(&self, family: Family) -> Result<Barrier> {
        Ok(match family {
            Family::GrowthLower => self.envelope().barrier_params()?.lower(),
            Family::GrowthUpper => self.envelope().barrier_params()?.upper(),
            Family::Decay => Barrier::DecaySupersolution(self.decay_params()?),
            Family::Homogeneous => {
                let t = self.homogeneous();
                Barrier::homogeneous_for_sup(t.nu, t.sup0)?
            }
            Family::Cone => Barrier::ConeSupersolution(self.cone_params()?),
        })
    }

    fn checks(&self, command: Command, seed: u64) -> Result<Vec<CheckSpec>> {
        let specs = match command {
            Command::Envelope => {
                let t = self.envelope();
                check_tolerance(t.tolerance)?;
                vec![spec(CheckParams::Envelope(t.barrier_params()?), t.tolerance, resolution(t.resolution)?)]
            }
            Command::Decay => {
                let t = self.decay();
                check_tolerance(t.tolerance)?;
                vec![spec(CheckParams::Decay(self.decay_params()?), t.tolerance, resolution(t.resolution)?)]
            }
            Command::Homogeneous => {
                let t = self.homogeneous();
                check_tolerance(t.tolerance)?;
                Barrier::homogeneous_for_sup(t.nu, t.sup0)?;
                let res = t.resolution.unwrap_or(Resolution {
                    radius: 1.0,
                    cells: 16,
                    dt_init: 1e-4,
                    ..Resolution::default()
                });
                res.validate()?;
                let params = CheckParams::Homogeneous {
                    nu: t.nu,
                    sup0: t.sup0,
                    profile: t.profile,
                };
                vec![spec(params, t.tolerance, res)]
            }
            Command::Cone => {
                let t = self.cone();
                check_tolerance(t.tolerance)?;
                let res = t.resolution.unwrap_or(Resolution::new(5.0, 250, 1e-3));
                res.validate()?;
                vec![spec(CheckParams::Cone(self.cone_params()?), t.tolerance, res)]
            }
            Command::Compare => {
                let t = self.compare.clone().unwrap_or_default();
                check_tolerance(t.tolerance)?;
                if t.pairs == 0 {
                    return Err(constraint("pairs must be at least 1"));
                }
                let env = derive_growth_params(t.nu, t.n, t.alpha1, t.alpha2.unwrap_or(t.alpha1), t.eps, None)?;
                let params = CheckParams::Comparison {
                    env,
                    pairs: t.pairs,
                    seed,
                };
                vec![spec(params, t.tolerance, resolution(t.resolution)?)]
            }
            Command::Picard => {
                let t = self.picard.clone().unwrap_or_default();
                check_tolerance(t.tolerance)?;
                let p = PicardCheck {
                    delta: t.delta,
                    nu: t.nu,
                    radius: t.radius,
                    cells: t.cells,
                    dim: t.n,
                    t1: t.t1,
                    max_iters: t.max_iters,
                    lin_dt: t.lin_dt,
                };
                p.config()?.validate()?;
                vec![spec(CheckParams::Picard(p), t.tolerance, Resolution::default())]
            }
            Command::FdCheck => {
                let t = self.fd_check.clone().unwrap_or_default();
                check_tolerance(t.tolerance)?;
                check_samples(t.samples, &t.families)?;
                t.families
                    .iter()
                    .map(|&f| {
                        let params = CheckParams::Fd {
                            barrier: self.barrier(f)?,
                            samples: t.samples,
                        };
                        Ok(spec(params, t.tolerance, Resolution::default()))
                    })
                    .collect::<Result<_>>()?
            }
            Command::BarriersCheck => {
                let t = self.barriers_check.clone().unwrap_or_default();
                check_tolerance(t.tolerance)?;
                check_samples(t.samples, &t.families)?;
                t.families
                    .iter()
                    .map(|&family| {
                        let params = CheckParams::Signs {
                            family,
                            samples: t.samples,
                        };
                        spec(params, t.tolerance, Resolution::default())
                    })
                    .collect()
            }
            Command::Suite => {
                let t = self.suite.clone().unwrap_or_default();
                if t.checks.is_empty() {
                    return Err(constraint("suite checks must not be empty"));
                }
                let mut all = Vec::new();
                for c in t.checks {
                    if matches!(c, Command::Suite | Command::Simulate) {
                        return Err(constraint(format!("`{}` cannot be part of a suite", c.label())));
                    }
                    all.extend(self.checks(c, seed)?);
                }
                all
            }
            Command::Simulate => unreachable!("simulate is not a check"),
        };
        Ok(specs)
    }

    fn simulate(&self) -> Result<SimulateJob> {
        let t = self.simulate.clone().unwrap_or_default();
        let grid = build_grid(t.radius, t.cells, t.n)?;
        if !(t.value.is_finite() && t.value > 0.0) {
            return Err(constraint(format!("initial value must be positive, got {}", t.value)));
        }
        let u0 = match t.initial {
            InitialProfile::Constant => Field::constant(grid, t.value),
            InitialProfile::Lorentzian => Field::from_fn(grid, 0.0, |r| t.value / (1.0 + r * r)),
        };
        let bc = match t.boundary {
            BoundaryKind::Neumann => BoundaryCondition::NeumannZero,
            BoundaryKind::Dirichlet => BoundaryCondition::DirichletConstant(*u0.values.last().unwrap_or(&t.value)),
        };
        let every = t.snapshot_every.unwrap_or(if t.t_end > 0.0 { t.t_end / 10.0 } else { 1.0 });
        let cfg = SolverConfig {
            dt_init: t.dt_init,
            dt_safety: t.dt_safety,
            floor: t.floor,
            snapshot_every: every,
            scheme: t.scheme,
            halt_on_extinction: t.halt_on_extinction,
            ..SolverConfig::new(t.nu, t.t_end)
        };
        cfg.validate()?;
        Ok(SimulateJob { u0, cfg, bc })
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(source: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(source).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))?;
    let seed = raw.seed.unwrap_or(DEFAULT_SEED);
    let job = match raw.command {
        Command::Simulate => Job::Simulate(raw.simulate()?),
        c => Job::Checks(raw.checks(c, seed)?),
    };
    Ok(RunConfig {
        command: raw.command,
        output_dir: raw.output_dir,
        seed,
        job,
    })
}
