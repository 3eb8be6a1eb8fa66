use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    CheckKind, Outcome, ReportBuilder, Resolution, RunSummary, Worst, ORDER_TOLERANCE,
};
use crate::barriers::{Barrier, ConeBarrierParams, DecayBarrierParams, GrowthEnvelope};
use crate::error::{constraint, Error, Result};
use crate::exec::Execution;
use crate::picard::{check_bounds, direct_solution, iterate, PicardConfig};
use crate::radial::{
    build_grid, simulate, BoundaryCondition, Field, RadialGrid, SolverConfig, Trajectory,
};

/// Fraction of the extinction time over which decaying bounds are checked.
pub const DECAY_WINDOW: f64 = 0.95;
/// Agreement required between the Picard limit and the direct solve.
pub const LIMIT_TOLERANCE: f64 = 1e-5;
/// Boundary samples used to confirm that boundary data are ordered.
const BOUNDARY_SAMPLES: usize = 64;

fn solver_config(nu: f64, res: &Resolution, t_end: f64) -> SolverConfig {
    SolverConfig {
        dt_init: res.dt_init,
        floor: res.floor,
        snapshot_every: t_end / res.snapshots as f64,
        scheme: res.scheme,
        ..SolverConfig::new(nu, t_end)
    }
}

fn grid(res: &Resolution, dim: usize) -> Result<RadialGrid> {
    res.validate()?;
    build_grid(res.radius, res.cells, dim)
}

fn canonical(kind: CheckKind, params: &impl std::fmt::Debug, res: &Resolution, tol: f64) -> String {
    format!("{}|{params:?}|{res:?}|tol={tol:e}", kind.label())
}

/// Folds `excess(r², t, u)` over every node of every snapshot. Points where
/// `excess` fails (outside a barrier's domain) are counted as skipped.
fn scan(
    snapshots: &[Field],
    stats: &mut RunSummary,
    mut excess: impl FnMut(f64, f64, f64) -> Result<f64>,
) -> Worst {
    let mut worst = Worst::new();
    for s in snapshots {
        for (r, &u) in s.grid.nodes().zip(&s.values) {
            match excess(r * r, s.time, u) {
                Ok(v) => {
                    stats.evaluated += 1;
                    worst.update(v, r, s.time);
                }
                Err(_) => stats.skipped += 1,
            }
        }
    }
    worst
}

fn summary(traj: &Trajectory) -> RunSummary {
    RunSummary {
        steps: traj.stats.steps,
        snapshots: traj.snapshots.len(),
        ..RunSummary::default()
    }
}

/// Starts from the lower barrier `ψ₁(·, 0)` with `ψ₁` as boundary data and
/// checks `ψ₁ − tol ≤ u ≤ ψ₂ + tol` at every snapshot.
pub fn verify_envelope(env: &GrowthEnvelope, res: &Resolution, tol: f64) -> Result<Outcome> {
    let report = ReportBuilder::new(CheckKind::Envelope, canonical(CheckKind::Envelope, env, res, tol), tol);
    let t_end = res.t_end.unwrap_or(1.0);
    let g = grid(res, env.dim)?;
    let (lower, upper) = (env.lower(), env.upper());
    let u0 = Field::try_from_r2(g, 0.0, |r2| lower.eval(r2, 0.0))?;
    let traj = simulate(&u0, &solver_config(env.nu, res, t_end), &BoundaryCondition::barrier(lower))?;

    let mut stats = summary(&traj);
    let (mut below, mut above) = (Worst::new(), Worst::new());
    let worst = scan(&traj.snapshots, &mut stats, |r2, t, u| {
        let lo = lower.eval(r2, t)? - u;
        let hi = u - upper.eval(r2, t)?;
        let r = r2.sqrt();
        below.update(lo, r, t);
        above.update(hi, r, t);
        Ok(lo.max(hi))
    });
    let details = vec![
        ("t_end".into(), t_end),
        ("below_lower".into(), below.value),
        ("above_upper".into(), above.value),
        ("a1".into(), env.a1),
        ("b1".into(), env.b1),
        ("a2".into(), env.a2),
        ("b2".into(), env.b2),
    ];
    Ok(Outcome {
        report: report.finish(worst, stats, details),
        snapshots: traj.snapshots,
    })
}

/// Starts from the extremal datum `ψ₃(·, 0)` with `ψ₃` as boundary data and
/// checks `u ≤ ψ₃ + tol` up to `0.95·T` (or the resolution's `t_end`).
pub fn verify_decay_rate(p: &DecayBarrierParams, res: &Resolution, tol: f64) -> Result<Outcome> {
    let report = ReportBuilder::new(CheckKind::DecayRate, canonical(CheckKind::DecayRate, p, res, tol), tol);
    let window = res.t_end.unwrap_or(DECAY_WINDOW * p.horizon);
    let g = grid(res, p.dim)?;
    let psi = Barrier::DecaySupersolution(*p);
    // sampling the barrier past its horizon fails here, before any run
    psi.eval(0.0, window)?;
    let u0 = Field::try_from_r2(g, 0.0, |r2| psi.eval(r2, 0.0))?;
    let traj = simulate(&u0, &solver_config(p.nu, res, window), &BoundaryCondition::barrier(psi))?;

    let mut stats = summary(&traj);
    let worst = scan(&traj.snapshots, &mut stats, |r2, t, u| Ok(u - psi.eval(r2, t)?));
    let details = vec![
        ("horizon".into(), p.horizon),
        ("window_end".into(), window),
        ("a3".into(), p.a3),
    ];
    Ok(Outcome {
        report: report.finish(worst, stats, details),
        snapshots: traj.snapshots,
    })
}

/// Bounded initial data for the homogeneous rate check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HomogeneousProfile {
    /// `u0 ≡ sup0`.
    #[default]
    Constant,
    /// `u0 = sup0/(1+r²)`.
    Lorentzian,
}

/// Zero-flux run from data with supremum `sup0`; checks `u ≤ ψ₄ + tol` before
/// `T = sup0^(1+ν)/(1+ν)` and that some node is extinct by `T + tol`.
pub fn verify_homogeneous_rate(
    nu: f64,
    sup0: f64,
    profile: HomogeneousProfile,
    res: &Resolution,
    tol: f64,
) -> Result<Outcome> {
    let params = (nu, sup0, profile);
    let report = ReportBuilder::new(
        CheckKind::HomogeneousRate,
        canonical(CheckKind::HomogeneousRate, &params, res, tol),
        tol,
    );
    let psi = Barrier::homogeneous_for_sup(nu, sup0)?;
    let horizon = psi.horizon().expect("homogeneous barrier has a horizon");
    let g = grid(res, 1)?;
    let u0 = match profile {
        HomogeneousProfile::Constant => Field::constant(g, sup0),
        HomogeneousProfile::Lorentzian => Field::from_fn(g, 0.0, |r| sup0 / (1.0 + r * r)),
    };
    let t_end = res.t_end.unwrap_or(horizon + tol.max(res.dt_init));
    let cfg = SolverConfig {
        halt_on_extinction: true,
        ..solver_config(nu, res, t_end)
    };
    let traj = simulate(&u0, &cfg, &BoundaryCondition::NeumannZero)?;

    let mut stats = summary(&traj);
    let mut worst = scan(&traj.snapshots, &mut stats, |_, t, u| Ok(u - psi.eval(0.0, t)?));
    let late = match traj.extinction_time {
        Some(t) => t - horizon,
        None => f64::INFINITY,
    };
    let node = traj.extinct_node.unwrap_or(0);
    worst.update(late, g.node(node), traj.extinction_time.unwrap_or(t_end));
    let details = vec![
        ("horizon".into(), horizon),
        ("extinction_time".into(), traj.extinction_time.unwrap_or(f64::NAN)),
        ("extinction_delay".into(), late),
    ];
    Ok(Outcome {
        report: report.finish(worst, stats, details),
        snapshots: traj.snapshots,
    })
}

fn continue_from(
    last: &Field,
    nu: f64,
    res: &Resolution,
    duration: f64,
    bc: BoundaryCondition,
) -> Result<Trajectory> {
    let cfg = SolverConfig {
        halt_on_extinction: true,
        snapshot_every: duration,
        ..solver_config(nu, res, duration)
    };
    simulate(last, &cfg, &bc)
}

/// Starts from `ψ₅(·, 0) = A(T₁+r²)^(1/(1+ν))` with `ψ₅` as boundary data;
/// checks `u ≤ ψ₅ + tol` up to `0.95·T` and that the origin is extinct by
/// `T + tol`. Past `T` the boundary is held at `ψ₅(R, T)`.
pub fn verify_cone_extinction(p: &ConeBarrierParams, res: &Resolution, tol: f64) -> Result<Outcome> {
    let report = ReportBuilder::new(
        CheckKind::ConeExtinction,
        canonical(CheckKind::ConeExtinction, p, res, tol),
        tol,
    );
    let horizon = p.horizon;
    let window = res.t_end.unwrap_or(DECAY_WINDOW * horizon).min(horizon);
    let g = grid(res, p.dim)?;
    let psi = Barrier::ConeSupersolution(*p);
    let u0 = Field::try_from_r2(g, 0.0, |r2| psi.eval(r2, 0.0))?;
    let bc = BoundaryCondition::barrier(psi);
    let traj = simulate(&u0, &solver_config(p.nu, res, window), &bc)?;

    let mut stats = summary(&traj);
    let mut worst = scan(&traj.snapshots, &mut stats, |r2, t, u| Ok(u - psi.eval(r2, t)?));

    // the origin may already be extinct inside the window
    let mut origin = traj.node_extinction[0];
    let mut first_other = traj.extinction_time.filter(|_| traj.extinct_node != Some(0));
    let mut last = traj.last().clone();
    if origin.is_none() && first_other.is_none() && last.time < horizon {
        let tail = continue_from(&last, p.nu, res, horizon - last.time, bc)?;
        stats.steps += tail.stats.steps;
        origin = tail.node_extinction[0];
        first_other = tail.extinction_time.filter(|_| tail.extinct_node != Some(0));
        last = tail.last().clone();
    }
    if origin.is_none() && first_other.is_none() {
        let held = psi.eval(g.radius() * g.radius(), horizon)?;
        let tail = continue_from(&last, p.nu, res, tol.max(res.dt_init), BoundaryCondition::DirichletConstant(held))?;
        stats.steps += tail.stats.steps;
        origin = tail.node_extinction[0];
    }
    let delay = origin.map_or(f64::INFINITY, |t| t - horizon);
    worst.update(delay, 0.0, origin.unwrap_or(horizon));
    let details = vec![
        ("horizon".into(), horizon),
        ("window_end".into(), window),
        ("origin_extinction".into(), origin.unwrap_or(f64::NAN)),
        ("extinction_delay".into(), delay),
        ("slope".into(), p.slope),
    ];
    Ok(Outcome {
        report: report.finish(worst, stats, details),
        snapshots: traj.snapshots,
    })
}

fn check_ordered_data(low: &Field, high: &Field, bc_low: &BoundaryCondition, bc_high: &BoundaryCondition, t_end: f64) -> Result<()> {
    if low.grid != high.grid {
        return Err(Error::Precondition("compared fields live on different grids".into()));
    }
    if let Some(j) = (0..low.values.len()).find(|&j| low.values[j] > high.values[j]) {
        return Err(Error::Precondition(format!(
            "initial data are not ordered at r = {}: {} > {}",
            low.grid.node(j),
            low.values[j],
            high.values[j]
        )));
    }
    if bc_low.is_dirichlet() != bc_high.is_dirichlet() {
        return Err(Error::Precondition("boundary conditions are of different types".into()));
    }
    let radius = low.grid.radius();
    for i in 0..=BOUNDARY_SAMPLES {
        let t = low.time + t_end * i as f64 / BOUNDARY_SAMPLES as f64;
        if let (Some(a), Some(b)) = (bc_low.value(radius, t)?, bc_high.value(radius, t)?) {
            if a > b {
                return Err(Error::Precondition(format!(
                    "boundary data are not ordered at t = {t}: {a} > {b}"
                )));
            }
        }
    }
    Ok(())
}

fn ordering_violation(low: &Trajectory, high: &Trajectory, stats: &mut RunSummary) -> Result<Worst> {
    if low.snapshots.len() != high.snapshots.len() {
        return Err(Error::Precondition(format!(
            "runs recorded {} and {} snapshots",
            low.snapshots.len(),
            high.snapshots.len()
        )));
    }
    let mut worst = Worst::new();
    for (a, b) in low.snapshots.iter().zip(&high.snapshots) {
        for (j, (x, y)) in a.values.iter().zip(&b.values).enumerate() {
            stats.evaluated += 1;
            worst.update(x - y, a.grid.node(j), a.time);
        }
    }
    Ok(worst)
}

fn run_pair(
    exec: Execution,
    low: &Field,
    high: &Field,
    bc: [BoundaryCondition; 2],
    cfg: &SolverConfig,
) -> Result<(Trajectory, Trajectory)> {
    let inputs = [(low, bc[0]), (high, bc[1])];
    let mut runs = exec.map(&inputs, |(u0, bc)| simulate(u0, cfg, bc)).into_iter();
    let a = runs.next().expect("two runs")?;
    let b = runs.next().expect("two runs")?;
    Ok((a, b))
}

/// Runs both problems and checks `u_low ≤ u_high + tol` nodewise at every
/// common snapshot. The dimension is taken from the fields' grid.
pub fn verify_comparison(
    u0_low: &Field,
    u0_high: &Field,
    bc_low: &BoundaryCondition,
    bc_high: &BoundaryCondition,
    nu: f64,
    res: &Resolution,
) -> Result<Outcome> {
    let tol = ORDER_TOLERANCE;
    let params = (&u0_low.values, &u0_high.values, bc_low, bc_high, nu);
    let report = ReportBuilder::new(CheckKind::Comparison, canonical(CheckKind::Comparison, &params, res, tol), tol);
    let t_end = res.t_end.unwrap_or(1.0);
    check_ordered_data(u0_low, u0_high, bc_low, bc_high, t_end)?;
    let cfg = solver_config(nu, res, t_end);
    let (a, b) = run_pair(Execution::default(), u0_low, u0_high, [*bc_low, *bc_high], &cfg)?;
    let mut stats = summary(&a);
    stats.steps += b.stats.steps;
    let worst = ordering_violation(&a, &b, &mut stats)?;
    Ok(Outcome {
        report: report.finish(worst, stats, Vec::new()),
        snapshots: a.snapshots,
    })
}

/// `count` ordered scale pairs `c_low ≤ c_high` drawn uniformly from
/// `[0.5, 1]` with a seeded generator.
pub fn comparison_pairs(seed: u64, count: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: f64 = rng.random_range(0.5..=1.0);
            let b: f64 = rng.random_range(0.5..=1.0);
            (a.min(b), a.max(b))
        })
        .collect()
}

/// Ordering check for every pair `(c·ψ₁(·,0), c'·ψ₁(·,0))` with boundary
/// data scaled alike. Pairs run in parallel under `exec`.
pub fn verify_comparison_batch(
    exec: Execution,
    env: &GrowthEnvelope,
    pairs: &[(f64, f64)],
    res: &Resolution,
    tol: f64,
) -> Result<Outcome> {
    let params = (env, pairs);
    let report = ReportBuilder::new(CheckKind::Comparison, canonical(CheckKind::Comparison, &params, res, tol), tol);
    if pairs.is_empty() {
        return Err(constraint("comparison needs at least one pair"));
    }
    let t_end = res.t_end.unwrap_or(1.0);
    let g = grid(res, env.dim)?;
    let psi = env.lower();
    let base = Field::try_from_r2(g, 0.0, |r2| psi.eval(r2, 0.0))?;
    let cfg = solver_config(env.nu, res, t_end);
    let bc = |c: f64| BoundaryCondition::DirichletBarrier { barrier: psi, scale: c };

    let runs = exec.map(pairs, |&(lo, hi)| -> Result<(Worst, RunSummary, Vec<Field>)> {
        let (u_lo, u_hi) = (base.scaled(lo), base.scaled(hi));
        check_ordered_data(&u_lo, &u_hi, &bc(lo), &bc(hi), t_end)?;
        let (a, b) = run_pair(Execution::Sequential, &u_lo, &u_hi, [bc(lo), bc(hi)], &cfg)?;
        let mut stats = summary(&a);
        stats.steps += b.stats.steps;
        let worst = ordering_violation(&a, &b, &mut stats)?;
        Ok((worst, stats, a.snapshots))
    });

    let mut worst = Worst::new();
    let mut stats = RunSummary::default();
    let mut details = Vec::new();
    let mut snapshots = Vec::new();
    for (i, run) in runs.into_iter().enumerate() {
        let (w, s, snaps) = run?;
        worst.merge(w);
        stats.steps += s.steps;
        stats.snapshots += s.snapshots;
        stats.evaluated += s.evaluated;
        details.push((format!("pair{i}_low"), pairs[i].0));
        details.push((format!("pair{i}_high"), pairs[i].1));
        details.push((format!("pair{i}_violation"), w.value));
        if i == 0 {
            snapshots = snaps;
        }
    }
    Ok(Outcome {
        report: report.finish(worst, stats, details),
        snapshots,
    })
}

/// Constant-data successive approximation on a ball.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PicardCheck {
    pub delta: f64,
    pub nu: f64,
    pub radius: f64,
    pub cells: usize,
    pub dim: usize,
    pub t1: f64,
    pub max_iters: usize,
    pub lin_dt: Option<f64>,
}

impl Default for PicardCheck {
    fn default() -> Self {
        PicardCheck {
            delta: 1.0,
            nu: 1.0,
            radius: 1.0,
            cells: 32,
            dim: 1,
            t1: 10.0,
            max_iters: 50,
            lin_dt: None,
        }
    }
}

impl PicardCheck {
    pub fn config(&self) -> Result<PicardConfig> {
        let grid = build_grid(self.radius, self.cells, self.dim)?;
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(constraint(format!("delta must be positive, got {}", self.delta)));
        }
        Ok(PicardConfig {
            nu: self.nu,
            grid,
            u0: Field::constant(grid, self.delta),
            bdry: BoundaryCondition::DirichletConstant(self.delta),
            t1: self.t1,
            max_iters: self.max_iters,
            lin_dt: self.lin_dt,
        })
    }
}

/// Bounds `δ/2 ≤ u_k ≤ w_R` for every iterate. The distance between the last
/// iterate and the direct nonlinear solve is reported as `limit_error`.
pub fn verify_picard_bounds(p: &PicardCheck, tol: f64) -> Result<Outcome> {
    let report = ReportBuilder::new(
        CheckKind::PicardBounds,
        format!("{}|{p:?}|tol={tol:e}", CheckKind::PicardBounds.label()),
        tol,
    );
    let cfg = p.config()?;
    let run = iterate(&cfg)?;
    let bounds = check_bounds(&run, run.delta);
    let direct = direct_solution(&cfg)?;
    let (limit_error, limit_at) = run.limit().sup_diff(&direct);

    let mut worst = Worst::new();
    worst.update(bounds.lower_violation, bounds.lower_at.1, bounds.lower_at.2);
    worst.update(bounds.upper_violation, bounds.upper_at.1, bounds.upper_at.2);
    let slices = run.limit().times.len();
    let stats = RunSummary {
        steps: run.iterates.len(),
        snapshots: slices,
        evaluated: run.iterates.len() * slices * cfg.grid.len(),
        skipped: 0,
    };
    let mut details = vec![
        ("delta".into(), run.delta),
        ("horizon".into(), run.horizon),
        ("iterates".into(), run.iterates.len() as f64),
        ("converged".into(), if run.converged { 1.0 } else { 0.0 }),
        ("lower_violation".into(), bounds.lower_violation),
        ("upper_violation".into(), bounds.upper_violation),
        ("limit_error".into(), limit_error),
        ("limit_error_r".into(), limit_at.0),
        ("limit_error_t".into(), limit_at.1),
    ];
    details.extend(run.sup_diffs.iter().enumerate().map(|(i, d)| (format!("sup_diff_{}", i + 2), *d)));
    let snapshots = (0..slices).map(|i| run.limit().slice(i)).collect();
    Ok(Outcome {
        report: report.finish(worst, stats, details),
        snapshots,
    })
}
