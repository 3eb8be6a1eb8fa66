use serde::{Deserialize, Serialize};

use super::sign::{SignReport, SIGN_TOLERANCE};
use super::{derive_cone_params, derive_decay_params, derive_growth_params, cone_amplitude_limit, Barrier};
use crate::exec::Execution;
use crate::quasi::halton;

/// Sampled `|x|²` range of a sweep.
const R2_MAX: f64 = 1e3;
/// Sampled time range for barriers without a horizon.
const T_MAX: f64 = 100.0;
/// Fraction of the horizon that is sampled.
const HORIZON_FRACTION: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    GrowthLower,
    GrowthUpper,
    Decay,
    Homogeneous,
    Cone,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::GrowthLower,
        Family::GrowthUpper,
        Family::Decay,
        Family::Homogeneous,
        Family::Cone,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Family::GrowthLower => "growth-lower",
            Family::GrowthUpper => "growth-upper",
            Family::Decay => "decay",
            Family::Homogeneous => "homogeneous",
            Family::Cone => "cone",
        }
    }
}

/// Barrier of `family` whose parameters are Halton coordinates 2.. of point
/// `index`, mapped onto the admissible ranges. `None` when the derived
/// constants are rejected.
pub fn sample_barrier(family: Family, index: usize) -> Option<Barrier> {
    let u = |k: usize| halton(index, 2 + k);
    let dim = 1 + (6.0 * u(1)) as usize;
    match family {
        Family::GrowthLower | Family::GrowthUpper => {
            let nu = 0.1 + 2.9 * u(0);
            let threshold = 1.0 / (1.0 + nu);
            let alpha1 = threshold + (3.0 - threshold) * u(2);
            let alpha2 = alpha1 + 2.0 * u(3);
            let eps = 0.02 + 0.96 * u(4);
            let env = derive_growth_params(nu, dim, alpha1, alpha2, eps, None).ok()?;
            Some(if family == Family::GrowthLower { env.lower() } else { env.upper() })
        }
        Family::Decay => {
            let nu = 0.05 + 0.95 * u(0);
            let beta = (1.0 / (1.0 + nu)) * u(2).max(1e-3);
            let horizon = 0.1 + 9.9 * u(3);
            derive_decay_params(nu, dim, beta, horizon).ok().map(Barrier::DecaySupersolution)
        }
        Family::Homogeneous => Barrier::homogeneous(0.1 + 3.9 * u(0), 0.1 + 9.9 * u(2)).ok(),
        Family::Cone => {
            let nu = 0.1 + 2.9 * u(0);
            let amp = cone_amplitude_limit(nu, dim) * (0.02 + 0.97 * u(2));
            let t1 = 0.1 + 9.9 * u(3);
            derive_cone_params(nu, dim, amp, t1).ok().map(Barrier::ConeSupersolution)
        }
    }
}

fn sample_point(b: &Barrier, index: usize) -> (f64, f64) {
    let t_max = b.horizon().map_or(T_MAX, |h| HORIZON_FRACTION * h);
    (R2_MAX * halton(index, 0), t_max * halton(index, 1))
}

/// Residual sign check over `samples` admissible parameter sets of one
/// family, each evaluated at its own quasi-random point.
pub fn sign_sweep(family: Family, samples: usize) -> SignReport {
    sign_sweep_with(Execution::default(), family, samples)
}

pub fn sign_sweep_with(exec: Execution, family: Family, samples: usize) -> SignReport {
    let mut report = SignReport {
        barrier: family.label(),
        expected: match family {
            Family::GrowthLower => super::SignClass::Nonnegative,
            Family::Homogeneous => super::SignClass::Zero,
            _ => super::SignClass::Nonpositive,
        },
        min_residual: f64::INFINITY,
        max_residual: f64::NEG_INFINITY,
        worst_violation: f64::NEG_INFINITY,
        worst_at: (0.0, 0.0),
        violations: 0,
        evaluated: 0,
        skipped: 0,
        verdict: true,
    };
    let mut start = 0;
    while report.evaluated < samples {
        let batch = (samples - report.evaluated) + (samples - report.evaluated) / 4 + 16;
        let results = exec.map_range(batch, |i| {
            let idx = start + i;
            sample_barrier(family, idx).map(|b| {
                let (r2, t) = sample_point(&b, idx);
                b.terms(r2, t).map(|terms| {
                    let viol = b.expected_sign().violation(terms.residual, terms.scale());
                    (terms.residual, viol, r2, t)
                })
            })
        });
        start += batch;
        for r in results {
            if report.evaluated == samples {
                break;
            }
            match r {
                None => {}
                Some(Err(_)) => report.skipped += 1,
                Some(Ok((res, viol, r2, t))) => {
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
            }
        }
        if start > 100 * samples.max(1) {
            break;
        }
    }
    report.verdict = report.violations == 0 && report.evaluated == samples;
    report
}
