//! End-to-end acceptance runs. Prints one line per criterion and exits
//! nonzero if any criterion fails.

use std::time::Instant;

use singular_rd::barriers::{
    derive_cone_params, derive_decay_params, derive_growth_params, sign_sweep, Barrier, Family,
    GrowthEnvelope,
};
use singular_rd::exec::Execution;
use singular_rd::radial::{build_grid, simulate, BoundaryCondition, DiffusionScheme, Field, SolverConfig};
use singular_rd::verify::{
    comparison_pairs, fd_consistency_check, verify_comparison_batch, verify_cone_extinction,
    verify_decay_rate, verify_envelope, verify_picard_bounds, PicardCheck, Resolution,
    DEFAULT_TOLERANCE, FD_TOLERANCE, LIMIT_TOLERANCE, ORDER_TOLERANCE,
};

type Outcome = Result<(bool, String), String>;

fn reference_envelope() -> GrowthEnvelope {
    derive_growth_params(1.0, 3, 0.5, 0.5, 0.5, None).unwrap()
}

fn envelope_resolution(cells: usize) -> Resolution {
    Resolution::new(20.0, cells, 1e-3).with_t_end(1.0)
}

fn homogeneous_extinction() -> Outcome {
    let grid = build_grid(1.0, 16, 3).map_err(|e| e.to_string())?;
    let cfg = SolverConfig {
        dt_init: 1e-4,
        floor: 1e-8,
        snapshot_every: 1e-3,
        ..SolverConfig::new(1.0, 0.6)
    };
    let traj = simulate(&Field::constant(grid, 1.0), &cfg, &BoundaryCondition::NeumannZero)
        .map_err(|e| e.to_string())?;
    let t_ext = traj.extinction_time.unwrap_or(f64::NAN);
    let sup_err = traj
        .snapshots
        .iter()
        .filter(|s| s.time < 0.49)
        .flat_map(|s| s.values.iter().map(move |u| (u - (1.0 - 2.0 * s.time).sqrt()).abs()))
        .fold(0.0, f64::max);
    let pass = (t_ext - 0.5).abs() <= 1e-3 && sup_err <= 1e-6;
    Ok((pass, format!("extinction at {t_ext:.6}, sup error before 0.49 = {sup_err:.2e}")))
}

fn growth_envelope() -> Outcome {
    let out = verify_envelope(&reference_envelope(), &envelope_resolution(2000), DEFAULT_TOLERANCE)
        .map_err(|e| e.to_string())?;
    let r = &out.report;
    Ok((
        r.passed(),
        format!(
            "worst violation {:.3e} (below lower {:.3e}, above upper {:.3e})",
            r.worst_violation,
            r.detail("below_lower").unwrap_or(f64::NAN),
            r.detail("above_upper").unwrap_or(f64::NAN)
        ),
    ))
}

fn cone_extinction() -> Outcome {
    let p = derive_cone_params(1.0, 1, 2f64.powf(-0.5), 1.0).map_err(|e| e.to_string())?;
    let res = Resolution::new(15.0, 1500, 1e-3).with_t_end(0.475);
    let out = verify_cone_extinction(&p, &res, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
    let r = &out.report;
    let origin = r.detail("origin_extinction").unwrap_or(f64::NAN);
    Ok((
        r.passed() && origin <= 0.501,
        format!("worst violation {:.3e}, origin extinct at {origin:.6}", r.worst_violation),
    ))
}

fn decay_rate() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (dim, a3) in [(4, 2f64.sqrt()), (2, (2.0f64 / 3.0).sqrt())] {
        let p = derive_decay_params(1.0, dim, 0.5, 1.0).map_err(|e| e.to_string())?;
        if (p.a3 - a3).abs() > 1e-14 {
            return Err(format!("A3 = {} for n = {dim}", p.a3));
        }
        let res = Resolution::new(30.0, 1000, 1e-3);
        let out = verify_decay_rate(&p, &res, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
        pass &= out.report.passed();
        parts.push(format!("n={dim}: worst {:.3e}", out.report.worst_violation));
    }
    Ok((pass, parts.join(", ")))
}

fn residual_signs() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for family in Family::ALL {
        let rep = sign_sweep(family, 10_000);
        pass &= rep.verdict && rep.evaluated == 10_000;
        parts.push(format!("{} {}/{}", family.label(), rep.violations, rep.evaluated));
    }
    Ok((pass, format!("violations: {}", parts.join(", "))))
}

fn closed_form_consistency() -> Outcome {
    let env = reference_envelope();
    let families = [
        env.lower(),
        env.upper(),
        Barrier::DecaySupersolution(derive_decay_params(1.0, 4, 0.5, 1.0).unwrap()),
        Barrier::homogeneous_for_sup(1.0, 1.0).unwrap(),
        Barrier::ConeSupersolution(derive_cone_params(1.0, 1, 2f64.powf(-0.5), 1.0).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for b in &families {
        let rep = fd_consistency_check(b, 1000);
        worst = worst.max(rep.worst_violation);
        skipped += rep.stats.skipped;
    }
    Ok((
        worst <= FD_TOLERANCE,
        format!("max relative discrepancy {worst:.3e} ({skipped} vertex points skipped)"),
    ))
}

fn picard_bounds() -> Outcome {
    let out = verify_picard_bounds(&PicardCheck::default(), ORDER_TOLERANCE).map_err(|e| e.to_string())?;
    let r = &out.report;
    let limit = r.detail("limit_error").unwrap_or(f64::NAN);
    Ok((
        r.passed() && limit <= LIMIT_TOLERANCE,
        format!(
            "bound violation {:.3e} over {} iterates, limit vs direct {limit:.3e}",
            r.worst_violation,
            r.detail("iterates").unwrap_or(f64::NAN)
        ),
    ))
}

fn comparison() -> Outcome {
    let pairs = comparison_pairs(20240601, 10);
    let res = Resolution::new(10.0, 200, 1e-3).with_t_end(1.0);
    let out = verify_comparison_batch(Execution::Parallel, &reference_envelope(), &pairs, &res, ORDER_TOLERANCE)
        .map_err(|e| e.to_string())?;
    Ok((
        out.report.passed(),
        format!("{} pairs, worst ordering violation {:.3e}", pairs.len(), out.report.worst_violation),
    ))
}

fn final_values(cfg: &SolverConfig, u0: &Field, bc: &BoundaryCondition) -> Result<Vec<f64>, String> {
    let traj = simulate(u0, cfg, bc).map_err(|e| e.to_string())?;
    Ok(traj.last().values.clone())
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn convergence_orders() -> Outcome {
    // space: the envelope run at M and 2M against M = 8000, same step size
    let env = reference_envelope();
    let lower = env.lower();
    let bc = BoundaryCondition::barrier(lower);
    let run = |cells: usize| -> Result<Vec<f64>, String> {
        let grid = build_grid(20.0, cells, 3).map_err(|e| e.to_string())?;
        let u0 = Field::try_from_r2(grid, 0.0, |r2| lower.eval(r2, 0.0)).map_err(|e| e.to_string())?;
        let cfg = SolverConfig {
            dt_init: 1e-3,
            snapshot_every: 1.0,
            ..SolverConfig::new(1.0, 1.0)
        };
        final_values(&cfg, &u0, &bc)
    };
    let reference = run(8000)?;
    let err = |cells: usize| -> Result<f64, String> {
        let u = run(cells)?;
        let stride = 8000 / cells;
        let coarse: Vec<f64> = reference.iter().step_by(stride).copied().collect();
        Ok(sup_diff(&u, &coarse))
    };
    let (e1, e2) = (err(1000)?, err(2000)?);
    let space = e1 / e2;

    // time, constant data: the split step is exact, so there is no error to halve
    let grid = build_grid(1.0, 16, 3).map_err(|e| e.to_string())?;
    let flat = Field::constant(grid, 1.0);
    let exact_err = |dt: f64| -> Result<f64, String> {
        let cfg = SolverConfig {
            dt_init: dt,
            snapshot_every: 0.4,
            ..SolverConfig::new(1.0, 0.4)
        };
        let u = final_values(&cfg, &flat, &BoundaryCondition::NeumannZero)?;
        Ok(u.iter().map(|v| (v - 0.2f64.sqrt()).abs()).fold(0.0, f64::max))
    };
    let (c1, c2) = (exact_err(1e-4)?, exact_err(5e-5)?);

    // time, smooth non-constant data under the second-order diffusion step
    let grid = build_grid(1.0, 64, 3).map_err(|e| e.to_string())?;
    let u0 = Field::from_fn(grid, 0.0, |r| 2.0 + 0.5 * (std::f64::consts::PI * r).cos());
    let smooth = |dt: f64| -> Result<Vec<f64>, String> {
        let cfg = SolverConfig {
            dt_init: dt,
            snapshot_every: 0.2,
            scheme: DiffusionScheme::Extrapolated,
            ..SolverConfig::new(1.0, 0.2)
        };
        final_values(&cfg, &u0, &BoundaryCondition::NeumannZero)
    };
    let fine = smooth(1.25e-4)?;
    let (t1, t2) = (sup_diff(&smooth(4e-3)?, &fine), sup_diff(&smooth(2e-3)?, &fine));
    let time = t1 / t2;

    let pass = space >= 3.5 && time >= 3.5 && c1.max(c2) <= 1e-12;
    Ok((
        pass,
        format!(
            "space {e1:.3e} -> {e2:.3e} (ratio {space:.2}); time {t1:.3e} -> {t2:.3e} (ratio {time:.2}); constant-data error {:.1e}",
            c1.max(c2)
        ),
    ))
}

fn main() {
    let criteria: [(&str, f64, fn() -> Outcome); 9] = [
        ("homogeneous extinction", 5.0, homogeneous_extinction),
        ("growth envelope", 60.0, growth_envelope),
        ("cone extinction", 60.0, cone_extinction),
        ("decay-rate bound", 120.0, decay_rate),
        ("residual signs", 10.0, residual_signs),
        ("closed-form consistency", 5.0, closed_form_consistency),
        ("picard bounds", 30.0, picard_bounds),
        ("comparison principle", 60.0, comparison),
        ("convergence orders", f64::INFINITY, convergence_orders),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (pass, text) = match outcome {
            Ok((pass, text)) => (pass && secs < *limit, text),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let budget = if limit.is_finite() { format!(" / {limit:.0} s") } else { String::new() };
        println!(
            "criterion {} {name}: {} - {text} [{secs:.2} s{budget}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
