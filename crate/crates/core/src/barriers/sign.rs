use serde::Serialize;

use super::Barrier;
use crate::exec::Execution;
use crate::quasi::halton;

/// Relative slack allowed on the residual sign.
pub const SIGN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignClass {
    /// Subsolution: residual ≥ 0.
    Nonnegative,
    /// Supersolution: residual ≤ 0.
    Nonpositive,
    /// Exact solution: residual = 0.
    Zero,
}

impl SignClass {
    pub fn label(self) -> &'static str {
        match self {
            SignClass::Nonnegative => "nonnegative",
            SignClass::Nonpositive => "nonpositive",
            SignClass::Zero => "zero",
        }
    }

    /// Signed amount by which `residual` violates this class, measured
    /// relative to `scale` (absolute for `Zero`). Nonpositive means no
    /// violation.
    pub fn violation(self, residual: f64, scale: f64) -> f64 {
        let rel = if scale > 0.0 { residual / scale } else { residual };
        match self {
            SignClass::Nonnegative => -rel,
            SignClass::Nonpositive => rel,
            SignClass::Zero => residual.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignReport {
    pub barrier: &'static str,
    pub expected: SignClass,
    pub min_residual: f64,
    pub max_residual: f64,
    /// Largest signed violation (see [`SignClass::violation`]).
    pub worst_violation: f64,
    pub worst_at: (f64, f64),
    pub violations: usize,
    pub evaluated: usize,
    /// Points outside the barrier's domain (t past its horizon).
    pub skipped: usize,
    pub verdict: bool,
}

/// Residual sign sweep on a `samples × samples` tensor grid over
/// `[0, r2_max] × [0, t_max]` plus `samples²` Halton interior points.
pub fn verify_sign_on_grid(b: &Barrier, r2_max: f64, t_max: f64, samples: usize) -> SignReport {
    verify_sign_on_grid_with(Execution::default(), b, r2_max, t_max, samples)
}

pub fn verify_sign_on_grid_with(
    exec: Execution,
    b: &Barrier,
    r2_max: f64,
    t_max: f64,
    samples: usize,
) -> SignReport {
    let samples = samples.max(2);
    let grid = samples * samples;
    let total = 2 * grid;
    let point = |i: usize| -> (f64, f64) {
        if i < grid {
            let (ir, it) = (i / samples, i % samples);
            let step = (samples - 1) as f64;
            (r2_max * ir as f64 / step, t_max * it as f64 / step)
        } else {
            let j = i - grid;
            (r2_max * halton(j, 0), t_max * halton(j, 1))
        }
    };
    let expected = b.expected_sign();
    let results = exec.map_range(total, |i| {
        let (r2, t) = point(i);
        b.terms(r2, t).ok().map(|terms| {
            (
                terms.residual,
                expected.violation(terms.residual, terms.scale()),
                r2,
                t,
            )
        })
    });

    let mut report = SignReport {
        barrier: b.name(),
        expected,
        min_residual: f64::INFINITY,
        max_residual: f64::NEG_INFINITY,
        worst_violation: f64::NEG_INFINITY,
        worst_at: (0.0, 0.0),
        violations: 0,
        evaluated: 0,
        skipped: 0,
        verdict: true,
    };
    for r in results {
        let Some((res, viol, r2, t)) = r else {
            report.skipped += 1;
            continue;
        };
        report.evaluated += 1;
        report.min_residual = report.min_residual.min(res);
        report.max_residual = report.max_residual.max(res);
        if viol > report.worst_violation || viol.is_nan() {
            report.worst_violation = viol;
            report.worst_at = (r2, t);
        }
        if !(viol <= SIGN_TOLERANCE) {
            report.violations += 1;
        }
    }
    report.verdict = report.violations == 0 && report.evaluated > 0;
    report
}
