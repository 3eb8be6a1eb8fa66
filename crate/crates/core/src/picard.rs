//! Existence by successive approximation on a ball.
//!
//! Starting from `u₁ ≡ δ`, each iterate solves the linear problem
//! `u_{k,t} = Δu_k − u_{k−1}^(−ν)` with the original initial and boundary
//! data. On the horizon `T = min(T₁/2, (δ/2)^(1+ν))` every iterate stays in
//! `[δ/2, w_R]`, where `w_R` is the heat solution with the same data.

use std::io::Write;

use serde::Serialize;

use crate::error::{constraint, Error, Result};
use crate::radial::io::fmt_f64;
use crate::radial::{
    BoundaryCondition, DiffusionScheme, Field, HeatSolver, RadialGrid, SolverConfig, StepData,
};

/// Iteration stops once consecutive iterates differ by less than this.
pub const CONVERGED: f64 = 1e-10;
/// Slack on the lower bound before an iterate is rejected.
pub const FLOOR_SLACK: f64 = 1e-6;
/// Inner steps per horizon when `lin_dt` is not given.
pub const DEFAULT_STEPS: usize = 512;
/// Stored time slices per iterate, at most.
pub const MAX_SLICES: usize = 257;
/// Samples used for the infimum of the boundary data over `[0, T₁]`.
const BOUNDARY_SAMPLES: usize = 1024;
/// Splitting steps per lattice step in [`direct_solution`]. The splitting
/// error near an incompatible boundary corner dominates otherwise.
pub const DIRECT_SUBSTEPS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct PicardConfig {
    pub nu: f64,
    pub grid: RadialGrid,
    pub u0: Field,
    /// Must be Dirichlet.
    pub bdry: BoundaryCondition,
    pub t1: f64,
    pub max_iters: usize,
    /// Step of the inner linear solves; `None` means `T/512`.
    pub lin_dt: Option<f64>,
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(constraint(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.t1.is_finite() && self.t1 > 0.0) {
            return Err(constraint(format!("t1 must be positive, got {}", self.t1)));
        }
        if self.max_iters == 0 {
            return Err(constraint("max_iters must be at least 1"));
        }
        if let Some(dt) = self.lin_dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(constraint(format!("lin_dt must be positive, got {dt}")));
            }
        }
        if !self.bdry.is_dirichlet() {
            return Err(constraint("successive approximation needs Dirichlet boundary data"));
        }
        self.bdry.validate()?;
        if self.u0.grid != self.grid {
            return Err(Error::Precondition("initial data lives on a different grid".into()));
        }
        Ok(())
    }

    /// `min(min u0, inf f over [0, T₁])`, the infimum sampled on a uniform
    /// time lattice.
    pub fn delta(&self) -> Result<f64> {
        let radius = self.grid.radius();
        let mut delta = self.u0.min();
        for i in 0..=BOUNDARY_SAMPLES {
            let t = self.t1 * i as f64 / BOUNDARY_SAMPLES as f64;
            if let Some(g) = self.bdry.value(radius, t)? {
                delta = delta.min(g);
            }
        }
        Ok(delta)
    }
}

/// `min(T₁/2, (δ/2)^(1+ν))`.
pub fn horizon(delta: f64, nu: f64, t1: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(constraint(format!(
            "data minimum delta must be positive, got {delta}"
        )));
    }
    Ok((0.5 * t1).min((0.5 * delta).powf(1.0 + nu)))
}

pub fn compute_horizon(cfg: &PicardConfig) -> Result<f64> {
    cfg.validate()?;
    horizon(cfg.delta()?, cfg.nu, cfg.t1)
}

/// Values on the spatial grid at a list of times, one row per time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTime {
    pub grid: RadialGrid,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl SpaceTime {
    pub fn slice(&self, i: usize) -> Field {
        Field {
            grid: self.grid,
            values: self.values[i].clone(),
            time: self.times[i],
        }
    }

    /// Sup-norm distance with the location `(r, t)` where it is attained.
    pub fn sup_diff(&self, other: &SpaceTime) -> (f64, (f64, f64)) {
        let mut worst = (0.0, (0.0, 0.0));
        for (i, (a, b)) in self.values.iter().zip(&other.values).enumerate() {
            for (j, (x, y)) in a.iter().zip(b).enumerate() {
                let d = (x - y).abs();
                if d > worst.0 || d.is_nan() {
                    worst = (d, (self.grid.node(j), self.times[i]));
                }
            }
        }
        worst
    }

    fn keep_rows(&self, stride: usize) -> SpaceTime {
        let last = self.times.len() - 1;
        let keep = |i: &usize| i % stride == 0 || *i == last;
        SpaceTime {
            grid: self.grid,
            times: (0..=last).filter(keep).map(|i| self.times[i]).collect(),
            values: (0..=last).filter(keep).map(|i| self.values[i].clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardRun {
    pub delta: f64,
    pub horizon: f64,
    pub lin_dt: f64,
    /// `u₁, u₂, …` on the stored time lattice.
    pub iterates: Vec<SpaceTime>,
    pub heat_majorant: SpaceTime,
    /// `‖u_{k+1} − u_k‖_∞` over every inner step, for `k = 1, 2, …`.
    pub sup_diffs: Vec<f64>,
    pub converged: bool,
}

impl PicardRun {
    pub fn limit(&self) -> &SpaceTime {
        self.iterates.last().expect("a run holds at least u1")
    }
}

/// Uniform inner lattice `t_i = i·T/N` with the stride used for storage.
struct Lattice {
    times: Vec<f64>,
    dt: f64,
    stride: usize,
}

impl Lattice {
    fn new(horizon: f64, lin_dt: f64) -> Self {
        let steps = ((horizon / lin_dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let dt = horizon / steps as f64;
        let times = (0..=steps).map(|i| i as f64 * dt).collect::<Vec<_>>();
        let stride = steps.div_ceil(MAX_SLICES - 1).max(1);
        Lattice { times, dt, stride }
    }
}

fn boundary_values(cfg: &PicardConfig, lat: &Lattice) -> Result<(Vec<Option<f64>>, Vec<Option<f64>>)> {
    let radius = cfg.grid.radius();
    let mut mid = Vec::with_capacity(lat.times.len());
    let mut end = Vec::with_capacity(lat.times.len());
    for w in lat.times.windows(2) {
        mid.push(cfg.bdry.value(radius, 0.5 * (w[0] + w[1]))?);
        end.push(cfg.bdry.value(radius, w[1])?);
    }
    Ok((mid, end))
}

/// Linear heat solve over the lattice with an optional source given at
/// every lattice time (linearly interpolated to midpoints).
fn linear_solve(
    cfg: &PicardConfig,
    lat: &Lattice,
    bdry: &(Vec<Option<f64>>, Vec<Option<f64>>),
    source: Option<&[Vec<f64>]>,
) -> Result<SpaceTime> {
    let mut heat = HeatSolver::new(&cfg.grid);
    let mut values = Vec::with_capacity(lat.times.len());
    values.push(cfg.u0.values.clone());
    let mut mid_source = vec![0.0; cfg.grid.len()];
    for i in 0..lat.times.len() - 1 {
        if let Some(s) = source {
            for ((m, a), b) in mid_source.iter_mut().zip(&s[i]).zip(&s[i + 1]) {
                *m = 0.5 * (a + b);
            }
        }
        let data = StepData {
            boundary_mid: bdry.0[i],
            boundary_end: bdry.1[i],
            source_mid: source.map(|_| &mid_source[..]),
            source_end: source.map(|s| &s[i + 1][..]),
            pinned: None,
        };
        let mut out = vec![0.0; cfg.grid.len()];
        heat.step(DiffusionScheme::Extrapolated, &values[i], lat.dt, data, &mut out)?;
        values.push(out);
    }
    Ok(SpaceTime {
        grid: cfg.grid,
        times: lat.times.clone(),
        values,
    })
}

fn resolve(cfg: &PicardConfig) -> Result<(f64, f64, Lattice)> {
    let t = compute_horizon(cfg)?;
    let delta = cfg.delta()?;
    let lin_dt = cfg.lin_dt.unwrap_or(t / DEFAULT_STEPS as f64);
    Ok((delta, t, Lattice::new(t, lin_dt)))
}

/// The heat solution `w_R` with the configuration's data, on the stored
/// lattice.
pub fn heat_majorant(cfg: &PicardConfig) -> Result<SpaceTime> {
    let (_, _, lat) = resolve(cfg)?;
    let bdry = boundary_values(cfg, &lat)?;
    Ok(linear_solve(cfg, &lat, &bdry, None)?.keep_rows(lat.stride))
}

fn check_floor(k: usize, u: &SpaceTime, delta: f64) -> Result<()> {
    let bound = 0.5 * delta;
    for (i, row) in u.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !(v >= bound - FLOOR_SLACK) {
                return Err(Error::IterateBelowFloor {
                    k,
                    value: v,
                    bound,
                    r: u.grid.node(j),
                    t: u.times[i],
                });
            }
        }
    }
    Ok(())
}

pub fn iterate(cfg: &PicardConfig) -> Result<PicardRun> {
    let (delta, t, lat) = resolve(cfg)?;
    let bdry = boundary_values(cfg, &lat)?;
    let majorant = linear_solve(cfg, &lat, &bdry, None)?;

    let mut prev = SpaceTime {
        grid: cfg.grid,
        times: lat.times.clone(),
        values: vec![vec![delta; cfg.grid.len()]; lat.times.len()],
    };
    let mut iterates = vec![prev.keep_rows(lat.stride)];
    let mut sup_diffs = Vec::new();
    let mut converged = false;
    for k in 2..=cfg.max_iters {
        let source: Vec<Vec<f64>> = prev
            .values
            .iter()
            .map(|row| row.iter().map(|u| -u.powf(-cfg.nu)).collect())
            .collect();
        let next = linear_solve(cfg, &lat, &bdry, Some(&source))?;
        check_floor(k, &next, delta)?;
        let (diff, _) = next.sup_diff(&prev);
        sup_diffs.push(diff);
        iterates.push(next.keep_rows(lat.stride));
        prev = next;
        if diff < CONVERGED {
            converged = true;
            break;
        }
    }
    Ok(PicardRun {
        delta,
        horizon: t,
        lin_dt: lat.dt,
        iterates,
        heat_majorant: majorant.keep_rows(lat.stride),
        sup_diffs,
        converged,
    })
}

/// Integrates the nonlinear problem directly on the same grid and inner
/// lattice, for comparison with the limit of the iterates.
pub fn direct_solution(cfg: &PicardConfig) -> Result<SpaceTime> {
    let (_, t, lat) = resolve(cfg)?;
    let solver = SolverConfig {
        dt_init: lat.dt / DIRECT_SUBSTEPS as f64,
        snapshot_every: lat.dt,
        scheme: DiffusionScheme::Extrapolated,
        ..SolverConfig::new(cfg.nu, t)
    };
    let traj = crate::radial::simulate(&cfg.u0, &solver, &cfg.bdry)?;
    if traj.snapshots.len() != lat.times.len() {
        return Err(Error::Precondition(format!(
            "direct solve produced {} snapshots, expected {}",
            traj.snapshots.len(),
            lat.times.len()
        )));
    }
    let full = SpaceTime {
        grid: cfg.grid,
        times: lat.times.clone(),
        values: traj.snapshots.into_iter().map(|f| f.values).collect(),
    };
    Ok(full.keep_rows(lat.stride))
}

/// Worst departures from `δ/2 ≤ u_k ≤ w_R` over all stored iterates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    /// `max(δ/2 − u_k)`, zero when the bound holds everywhere.
    pub lower_violation: f64,
    /// `(k, r, t)` of the lower violation.
    pub lower_at: (usize, f64, f64),
    /// `max(u_k − w_R)`, zero when the bound holds everywhere.
    pub upper_violation: f64,
    pub upper_at: (usize, f64, f64),
    pub iterates: usize,
}

impl BoundReport {
    pub fn worst(&self) -> f64 {
        self.lower_violation.max(self.upper_violation)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.worst() <= tol
    }
}

pub fn check_bounds(run: &PicardRun, delta: f64) -> BoundReport {
    let mut rep = BoundReport {
        lower_violation: 0.0,
        lower_at: (1, 0.0, 0.0),
        upper_violation: 0.0,
        upper_at: (1, 0.0, 0.0),
        iterates: run.iterates.len(),
    };
    let w = &run.heat_majorant;
    for (idx, u) in run.iterates.iter().enumerate() {
        let k = idx + 1;
        for (i, (row, wrow)) in u.values.iter().zip(&w.values).enumerate() {
            for (j, (&v, &wv)) in row.iter().zip(wrow).enumerate() {
                let (r, t) = (u.grid.node(j), u.times[i]);
                let low = 0.5 * delta - v;
                if low > rep.lower_violation {
                    rep.lower_violation = low;
                    rep.lower_at = (k, r, t);
                }
                let high = v - wv;
                if high > rep.upper_violation {
                    rep.upper_violation = high;
                    rep.upper_at = (k, r, t);
                }
            }
        }
    }
    rep
}

/// CSV of `k,t,r,u` over every stored iterate, followed by a `#` summary.
pub fn write_run<W: Write>(mut w: W, run: &PicardRun) -> Result<()> {
    writeln!(w, "k,t,r,u")?;
    for (idx, u) in run.iterates.iter().enumerate() {
        for (t, row) in u.times.iter().zip(&u.values) {
            let t = fmt_f64(*t);
            for (r, v) in u.grid.nodes().zip(row) {
                writeln!(w, "{},{t},{},{}", idx + 1, fmt_f64(r), fmt_f64(*v))?;
            }
        }
    }
    writeln!(w, "# delta = {}", fmt_f64(run.delta))?;
    writeln!(w, "# horizon = {}", fmt_f64(run.horizon))?;
    writeln!(w, "# lin_dt = {}", fmt_f64(run.lin_dt))?;
    writeln!(w, "# converged = {}", run.converged)?;
    let diffs: Vec<String> = run.sup_diffs.iter().map(|d| fmt_f64(*d)).collect();
    writeln!(w, "# sup_diffs = {}", diffs.join(" "))?;
    Ok(())
}
