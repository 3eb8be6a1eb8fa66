use super::{CheckKind, ReportBuilder, RunSummary, VerificationReport, Worst};
use crate::barriers::Barrier;
use crate::exec::Execution;
use crate::quasi::halton;

/// Default bound on the relative discrepancy.
pub const FD_TOLERANCE: f64 = 1e-6;
/// Sampled `|x|²` range.
const R2_MAX: f64 = 100.0;
/// Sampled time range for barriers without a horizon.
const T_MAX: f64 = 10.0;
/// Fraction of the horizon that is sampled.
const HORIZON_FRACTION: f64 = 0.99;
/// Cone points with `b(T−t) + |x|²` below this are skipped.
const CONE_EXCLUSION: f64 = 1e-2;
/// Halton indices already used by the sign sweep start at zero; offset so
/// the two checks see different points.
const HALTON_OFFSET: usize = 4096;

/// Natural squared length and time scales of `b` at `(r², t)`; derivatives
/// are judged relative to `ψ/L²` and `ψ/T`.
fn scales(b: &Barrier, r2: f64, t: f64) -> (f64, f64) {
    match b {
        Barrier::GrowthLower(e) => {
            let s = 1.0 + r2 + e.b1 * t;
            (s, s / e.b1)
        }
        Barrier::GrowthUpper(e) => {
            let s = 1.0 + r2 + e.b2 * t;
            (s, s / e.b2)
        }
        Barrier::DecaySupersolution(p) => (1.0 + r2, p.horizon - t),
        Barrier::Homogeneous { horizon, .. } => (1.0, horizon - t),
        Barrier::ConeSupersolution(p) => {
            let w = p.slope * (p.horizon - t) + r2;
            (w, w / p.slope)
        }
    }
}

/// Cartesian central differences along `x₁` at `x = (r, 0, …, 0)`; the
/// `n − 1` transverse directions all see `|x|² = r² + h²`.
fn central_laplacian(b: &Barrier, r2: f64, t: f64, h: f64) -> crate::Result<f64> {
    let r = r2.sqrt();
    let f = |rr: f64| b.eval(rr * rr, t);
    let centre = f(r)?;
    let axial = (f(r + h)? - 2.0 * centre + f((r - h).abs())?) / (h * h);
    let transverse = 2.0 * (b.eval(r2 + h * h, t)? - centre) / (h * h);
    Ok(axial + (b.dim() as f64 - 1.0) * transverse)
}

/// Central differences at `h` and `h/2` combined by Richardson
/// extrapolation, which removes the `O(h²)` term.
fn fd_laplacian(b: &Barrier, r2: f64, t: f64, h: f64) -> crate::Result<f64> {
    let coarse = central_laplacian(b, r2, t, h)?;
    let fine = central_laplacian(b, r2, t, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Central difference in time; second-order one-sided formulas where the
/// central stencil would leave `[0, T]`.
fn fd_time(b: &Barrier, r2: f64, t: f64, k: f64) -> crate::Result<f64> {
    let f = |s: f64| b.eval(r2, s);
    if t < k {
        Ok((-3.0 * f(t)? + 4.0 * f(t + k)? - f(t + 2.0 * k)?) / (2.0 * k))
    } else if b.horizon().is_some_and(|h| t + k >= h) {
        Ok((3.0 * f(t)? - 4.0 * f(t - k)? + f(t - 2.0 * k)?) / (2.0 * k))
    } else {
        Ok((f(t + k)? - f(t - k)?) / (2.0 * k))
    }
}

fn sample(b: &Barrier, i: usize) -> (f64, f64) {
    let idx = HALTON_OFFSET + i;
    let r2 = R2_MAX * halton(idx, 0);
    let t_max = b.horizon().map_or(T_MAX, |h| HORIZON_FRACTION * h);
    (r2, t_max * halton(idx, 1))
}

/// Relative discrepancies `(laplacian, time derivative)` at one point, or
/// `None` inside the cone exclusion zone.
pub(super) fn discrepancy(b: &Barrier, r2: f64, t: f64) -> Option<(f64, f64)> {
    let (len2, time) = scales(b, r2, t);
    if matches!(b, Barrier::ConeSupersolution(_)) && len2 < CONE_EXCLUSION {
        return None;
    }
    let terms = b.terms(r2, t).ok()?;
    let h = 1e-3 * (1.0 + r2.sqrt());
    let k = 1e-4 * time;
    let lap = fd_laplacian(b, r2, t, h).ok()?;
    let dt = fd_time(b, r2, t, k).ok()?;
    let rel = |exact: f64, approx: f64, natural: f64| {
        let denom = exact.abs().max(natural);
        if denom > 0.0 {
            (exact - approx).abs() / denom
        } else {
            (exact - approx).abs()
        }
    };
    let value = terms.value.abs();
    Some((
        rel(terms.laplacian, lap, value / len2),
        rel(terms.time_derivative, dt, value / time),
    ))
}

/// Compares the closed-form Laplacian and time derivative of `b` with
/// finite differences of its values at `samples` quasi-random points.
pub fn fd_consistency_check(b: &Barrier, samples: usize) -> VerificationReport {
    fd_consistency_check_with(Execution::default(), b, samples, FD_TOLERANCE)
}

pub fn fd_consistency_check_with(exec: Execution, b: &Barrier, samples: usize, tol: f64) -> VerificationReport {
    let report = ReportBuilder::new(
        CheckKind::FdConsistency,
        format!("{}|{b:?}|samples={samples}|tol={tol:e}", CheckKind::FdConsistency.label()),
        tol,
    );
    let results = exec.map_range(samples, |i| {
        let (r2, t) = sample(b, i);
        (r2, t, discrepancy(b, r2, t))
    });
    let (mut lap, mut time) = (Worst::new(), Worst::new());
    let mut stats = RunSummary::default();
    for (r2, t, d) in results {
        match d {
            Some((dl, dt)) => {
                stats.evaluated += 1;
                lap.update(dl, r2.sqrt(), t);
                time.update(dt, r2.sqrt(), t);
            }
            None => stats.skipped += 1,
        }
    }
    let mut worst = lap;
    worst.merge(time);
    let details = vec![
        ("laplacian_discrepancy".into(), lap.value.max(0.0)),
        ("time_derivative_discrepancy".into(), time.value.max(0.0)),
    ];
    report.finish(worst, stats, details)
}
