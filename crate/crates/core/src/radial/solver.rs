use serde::{Deserialize, Serialize};

use super::bc::BoundaryCondition;
use super::diffusion::{DiffusionScheme, HeatSolver, StepData};
use super::field::Field;
use super::grid::RadialGrid;
use super::reaction::{react_node, NodeReaction};
use crate::error::{constraint, Error, Result};

/// Time-integration policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub nu: f64,
    /// Upper bound on the step size.
    pub dt_init: f64,
    /// Fraction θ of the reaction timescale `u_min^(1+ν)/(1+ν)` allowed per step.
    pub dt_safety: f64,
    /// Extinction threshold.
    pub floor: f64,
    pub t_end: f64,
    pub snapshot_every: f64,
    pub scheme: DiffusionScheme,
    /// Stop at the first extinct node instead of integrating on.
    pub halt_on_extinction: bool,
}

impl SolverConfig {
    pub fn new(nu: f64, t_end: f64) -> Self {
        SolverConfig {
            nu,
            dt_init: 1e-3,
            dt_safety: 0.1,
            floor: 1e-8,
            t_end,
            snapshot_every: if t_end > 0.0 { t_end / 10.0 } else { 1.0 },
            scheme: DiffusionScheme::BackwardEuler,
            halt_on_extinction: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(constraint(format!("{name} must be positive, got {v}")))
            }
        };
        positive("nu", self.nu)?;
        positive("dt_init", self.dt_init)?;
        positive("floor", self.floor)?;
        positive("snapshot_every", self.snapshot_every)?;
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(constraint(format!(
                "dt_safety must lie in (0, 1], got {}",
                self.dt_safety
            )));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(constraint(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RunStats {
    pub steps: usize,
    pub dt_min: f64,
    pub dt_max: f64,
    pub extinct_nodes: usize,
}

/// Recorded snapshots plus extinction bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Field>,
    /// First time any node reached the floor.
    pub extinction_time: Option<f64>,
    pub extinct_node: Option<usize>,
    /// Per-node extinction times.
    pub node_extinction: Vec<Option<f64>>,
    pub stats: RunStats,
}

impl Trajectory {
    pub fn last(&self) -> &Field {
        self.snapshots.last().expect("a trajectory always holds the initial snapshot")
    }
}

/// Strang-split integrator: half reaction, full diffusion, half reaction.
///
/// Extinct nodes are frozen at the floor and held as Dirichlet rows in the
/// diffusion solve.
#[derive(Debug, Clone)]
pub struct Integrator {
    cfg: SolverConfig,
    bc: BoundaryCondition,
    grid: RadialGrid,
    heat: HeatSolver,
    frozen: Vec<bool>,
    node_extinction: Vec<Option<f64>>,
    work: Vec<f64>,
}

/// What one call to [`Integrator::advance`] did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub newly_extinct: Vec<usize>,
}

impl Integrator {
    pub fn new(grid: RadialGrid, cfg: SolverConfig, bc: BoundaryCondition) -> Result<Self> {
        cfg.validate()?;
        bc.validate()?;
        let n = grid.len();
        Ok(Integrator {
            cfg,
            bc,
            grid,
            heat: HeatSolver::new(&grid),
            frozen: vec![false; n],
            node_extinction: vec![None; n],
            work: vec![0.0; n],
        })
    }

    fn is_dynamic(&self, j: usize) -> bool {
        !self.frozen[j] && !(j == self.grid.boundary() && self.bc.is_dirichlet())
    }

    /// Smallest value over nodes that still evolve, if any.
    pub fn active_min(&self, f: &Field) -> Option<f64> {
        (0..f.values.len())
            .filter(|&j| self.is_dynamic(j))
            .map(|j| f.values[j])
            .reduce(f64::min)
    }

    pub fn node_extinction(&self) -> &[Option<f64>] {
        &self.node_extinction
    }

    /// Step size: `min(dt_init, θ u_min^(1+ν)/(1+ν), cap)`.
    pub fn choose_dt(&self, f: &Field, cap: f64) -> f64 {
        let e = 1.0 + self.cfg.nu;
        let reaction = self
            .active_min(f)
            .map_or(f64::INFINITY, |u| self.cfg.dt_safety * u.max(0.0).powf(e) / e);
        let dt = self.cfg.dt_init.min(reaction);
        if cap <= dt * (1.0 + 1e-6) {
            cap
        } else {
            dt
        }
    }

    fn react(&mut self, f: &mut Field, t0: f64, dt: f64, extinct: &mut Vec<usize>) {
        for j in 0..f.values.len() {
            if !self.is_dynamic(j) {
                continue;
            }
            match react_node(f.values[j], self.cfg.nu, dt, self.cfg.floor) {
                NodeReaction::Alive(v) => f.values[j] = v,
                NodeReaction::Extinct { after } => {
                    f.values[j] = self.cfg.floor;
                    self.frozen[j] = true;
                    self.node_extinction[j] = Some(t0 + after);
                    extinct.push(j);
                }
            }
        }
    }

    /// Advances `f` by one step no longer than `cap`.
    pub fn advance(&mut self, f: &mut Field, cap: f64) -> Result<StepReport> {
        let dt = self.choose_dt(f, cap);
        let t0 = f.time;
        let mut extinct = Vec::new();
        self.react(f, t0, 0.5 * dt, &mut extinct);

        let radius = self.grid.radius();
        let data = StepData {
            boundary_mid: self.bc.value(radius, t0 + 0.5 * dt)?,
            boundary_end: self.bc.value(radius, t0 + dt)?,
            pinned: Some(&self.frozen),
            ..StepData::default()
        };
        let mut out = std::mem::take(&mut self.work);
        let solved = self.heat.step(self.cfg.scheme, &f.values, dt, data, &mut out);
        if let Err(e) = solved {
            self.work = out;
            return Err(e);
        }
        std::mem::swap(&mut f.values, &mut out);
        self.work = out;

        self.react(f, t0 + 0.5 * dt, 0.5 * dt, &mut extinct);
        f.time = t0 + dt;
        if f.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition(format!(
                "non-finite value after step to t = {}",
                f.time
            )));
        }
        Ok(StepReport {
            dt,
            newly_extinct: extinct,
        })
    }
}

/// One Strang step from `f` with the configured step size policy. Nodes at
/// or below the floor are treated as already extinct.
pub fn step(f: &Field, cfg: &SolverConfig, bc: &BoundaryCondition) -> Result<(Field, f64, Vec<usize>)> {
    let mut integ = Integrator::new(f.grid, *cfg, *bc)?;
    for (j, &v) in f.values.iter().enumerate() {
        if v <= cfg.floor {
            integ.frozen[j] = true;
        }
    }
    let mut next = f.clone();
    let rep = integ.advance(&mut next, f64::INFINITY)?;
    Ok((next, rep.dt, rep.newly_extinct))
}

/// Integrates from `u0` to `cfg.t_end`, recording snapshots every
/// `cfg.snapshot_every` and at the final time.
pub fn simulate(u0: &Field, cfg: &SolverConfig, bc: &BoundaryCondition) -> Result<Trajectory> {
    let mut integ = Integrator::new(u0.grid, *cfg, *bc)?;
    if let Some(v) = u0.values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Precondition(format!("initial data must be positive, found {v}")));
    }
    if let Some(g) = bc.value(u0.grid.radius(), u0.time)? {
        let ub = u0.values[u0.grid.boundary()];
        if (ub - g).abs() > 1e-6 * g.abs().max(1.0) {
            return Err(Error::Precondition(format!(
                "initial boundary value {ub} disagrees with boundary data {g}"
            )));
        }
    }

    let t_start = u0.time;
    let t_end = t_start + cfg.t_end;
    let mut f = u0.clone();
    let mut snapshots = vec![f.clone()];
    let mut stats = RunStats {
        dt_min: f64::INFINITY,
        ..RunStats::default()
    };
    let mut k = 1usize;
    let next_snapshot = |k: usize| (t_start + k as f64 * cfg.snapshot_every).min(t_end);

    while f.time < t_end {
        let target = next_snapshot(k);
        if integ.active_min(&f).is_none() {
            // nothing evolves: frozen nodes stay put, a Dirichlet node follows its data
            f.time = target;
            if let Some(g) = bc.value(f.grid.radius(), target)? {
                let b = f.grid.boundary();
                f.values[b] = g;
            }
            snapshots.push(f.clone());
            k += 1;
            continue;
        }
        let cap = target - f.time;
        let rep = integ.advance(&mut f, cap)?;
        stats.steps += 1;
        stats.dt_min = stats.dt_min.min(rep.dt);
        stats.dt_max = stats.dt_max.max(rep.dt);
        let reached = f.time >= target - 1e-12 * target.abs().max(1.0);
        if reached {
            f.time = target;
            snapshots.push(f.clone());
            k += 1;
        }
        if cfg.halt_on_extinction && !rep.newly_extinct.is_empty() {
            if !reached {
                snapshots.push(f.clone());
            }
            break;
        }
    }
    if snapshots.last().is_some_and(|s| s.time < f.time) {
        snapshots.push(f.clone());
    }
    if stats.steps == 0 {
        stats.dt_min = 0.0;
    }

    let node_extinction = integ.node_extinction().to_vec();
    let first = node_extinction
        .iter()
        .enumerate()
        .filter_map(|(j, t)| t.map(|t| (j, t)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    stats.extinct_nodes = node_extinction.iter().filter(|t| t.is_some()).count();
    Ok(Trajectory {
        snapshots,
        extinction_time: first.map(|(_, t)| t),
        extinct_node: first.map(|(j, _)| j),
        node_extinction,
        stats,
    })
}
