//! Closed-form barrier functions for `u_t = Δu − u^(−ν)`.
//!
//! Every barrier here is radially symmetric, so it is evaluated as a function
//! of `r2 = |x|²` and time. Each one comes with its analytic Laplacian in `n`
//! dimensions, its time derivative and the PDE residual
//! `Δψ − ψ^(−ν) − ψ_t`, whose sign makes it a sub- or supersolution.
//!
//! | variant              | profile                                  | residual |
//! |----------------------|------------------------------------------|----------|
//! | `GrowthLower`        | `A₁ (1 + r² + b₁ t)^α₁`                  | ≥ 0      |
//! | `GrowthUpper`        | `A₂ (1 + r² + b₂ t)^α₂`                  | ≤ 0      |
//! | `DecaySupersolution` | `A₃ (T − t)^(1/(1+ν)) (1 + r²)^(−β)`     | ≤ 0      |
//! | `Homogeneous`        | `(1+ν)^(1/(1+ν)) (T − t)^(1/(1+ν))`      | = 0      |
//! | `ConeSupersolution`  | `A (b (T − t) + r²)^(1/(1+ν))`           | ≤ 0      |

mod sign;
mod sweep;

pub use sign::{verify_sign_on_grid, verify_sign_on_grid_with, SignClass, SignReport, SIGN_TOLERANCE};
pub use sweep::{sample_barrier, sign_sweep, sign_sweep_with, Family};

use serde::{Deserialize, Serialize};

use crate::error::{constraint, Error, Result};

/// Slack used when comparing an exponent against the `1/(1+ν)` threshold,
/// so that e.g. `α₁ = 1/(1+ν)` computed in floating point is admissible.
const THRESHOLD_SLACK: f64 = 1e-12;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(constraint(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim >= 1 {
        Ok(())
    } else {
        Err(constraint("space dimension must be at least 1"))
    }
}

/// Constants of the two-sided growth envelope
/// `A₁(1+|x|²+b₁t)^α₁ ≤ u ≤ A₂(1+|x|²+b₂t)^α₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthEnvelope {
    pub nu: f64,
    pub dim: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub eps: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Derives `A₁`, `b₁`, `b₂` from `(ν, n, α₁, α₂, ε)`.
///
/// `A₂` defaults to `A₁`; an override must not be smaller than `A₁`.
pub fn derive_growth_params(
    nu: f64,
    dim: usize,
    alpha1: f64,
    alpha2: f64,
    eps: f64,
    a2_override: Option<f64>,
) -> Result<GrowthEnvelope> {
    check_positive("nu", nu)?;
    check_dim(dim)?;
    if !alpha1.is_finite() || !alpha2.is_finite() {
        return Err(constraint("alpha1 and alpha2 must be finite"));
    }
    let threshold = 1.0 / (1.0 + nu);
    if alpha1 < threshold * (1.0 - THRESHOLD_SLACK) {
        return Err(constraint(format!(
            "alpha1 = {alpha1} is below 1/(1+nu) = {threshold}"
        )));
    }
    if alpha2 < alpha1 {
        return Err(constraint(format!(
            "alpha2 = {alpha2} must be at least alpha1 = {alpha1}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(constraint(format!("eps = {eps} must lie strictly inside (0, 1)")));
    }
    let n = dim as f64;
    // α₁ = 1 takes the first branch; both branches agree there.
    let lower_factor = if alpha1 <= 1.0 { n + 2.0 * alpha1 - 2.0 } else { n };
    if lower_factor <= 0.0 {
        return Err(constraint(format!(
            "n + 2*alpha1 - 2 = {lower_factor} must be positive (n = {dim}, alpha1 = {alpha1})"
        )));
    }
    let a1 = (2.0 * alpha1 * (1.0 - eps) * lower_factor).powf(-1.0 / (1.0 + nu));
    let b1 = 2.0 * lower_factor * eps;
    let b2 = if alpha2 <= 1.0 {
        2.0 * n
    } else {
        2.0 * (n + 2.0 * alpha2 - 2.0)
    };
    let a2 = match a2_override {
        Some(a2) => {
            check_positive("a2", a2)?;
            if a2 < a1 {
                return Err(constraint(format!("a2 = {a2} must be at least A1 = {a1}")));
            }
            a2
        }
        None => a1,
    };
    Ok(GrowthEnvelope {
        nu,
        dim,
        alpha1,
        alpha2,
        eps,
        a1,
        a2,
        b1,
        b2,
    })
}

impl GrowthEnvelope {
    pub fn lower(&self) -> Barrier {
        Barrier::GrowthLower(*self)
    }

    pub fn upper(&self) -> Barrier {
        Barrier::GrowthUpper(*self)
    }
}

/// Parameters of the decaying supersolution `A₃(T−t)^(1/(1+ν))(1+|x|²)^(−β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayBarrierParams {
    pub nu: f64,
    pub dim: usize,
    pub beta: f64,
    pub horizon: f64,
    pub a3: f64,
}

pub fn derive_decay_params(nu: f64, dim: usize, beta: f64, horizon: f64) -> Result<DecayBarrierParams> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(constraint(format!("nu = {nu} must lie in (0, 1]")));
    }
    check_dim(dim)?;
    check_positive("horizon", horizon)?;
    let threshold = 1.0 / (1.0 + nu);
    if !(beta > 0.0 && beta <= threshold * (1.0 + THRESHOLD_SLACK)) {
        return Err(constraint(format!(
            "beta = {beta} must lie in (0, 1/(1+nu)] = (0, {threshold}]"
        )));
    }
    let n = dim as f64;
    let p = 1.0 / (1.0 + nu);
    let a3 = if beta <= (n - 2.0) / 2.0 {
        (1.0 + nu).powf(p)
    } else {
        let denom = 1.0 + 2.0 * beta * (1.0 + nu) * (2.0 * beta + 2.0 - n) * horizon;
        ((1.0 + nu) / denom).powf(p)
    };
    Ok(DecayBarrierParams {
        nu,
        dim,
        beta,
        horizon,
        a3,
    })
}

/// Parameters of the cone supersolution `A(b(T−t)+|x|²)^(1/(1+ν))`, which
/// vanishes at the origin at `t = T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeBarrierParams {
    pub nu: f64,
    pub dim: usize,
    pub amp: f64,
    pub t1: f64,
    pub slope: f64,
    pub horizon: f64,
}

/// Largest admissible cone amplitude (exclusive): `((1+ν)/(2n))^(1/(1+ν))`.
pub fn cone_amplitude_limit(nu: f64, dim: usize) -> f64 {
    ((1.0 + nu) / (2.0 * dim as f64)).powf(1.0 / (1.0 + nu))
}

pub fn derive_cone_params(nu: f64, dim: usize, amp: f64, t1: f64) -> Result<ConeBarrierParams> {
    check_positive("nu", nu)?;
    check_dim(dim)?;
    check_positive("amp", amp)?;
    check_positive("t1", t1)?;
    let limit = cone_amplitude_limit(nu, dim);
    if amp >= limit {
        return Err(constraint(format!(
            "cone amplitude A = {amp} must satisfy 0 < A < ((1+nu)/(2n))^(1/(1+nu)) = {limit}"
        )));
    }
    let slope = (1.0 + nu) / amp.powf(1.0 + nu) - 2.0 * dim as f64;
    if slope <= 0.0 {
        return Err(constraint(format!(
            "cone slope b = (1+nu)/A^(1+nu) - 2n = {slope} is not positive"
        )));
    }
    Ok(ConeBarrierParams {
        nu,
        dim,
        amp,
        t1,
        slope,
        horizon: t1 / slope,
    })
}

/// One of the five closed-form barrier families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Barrier {
    GrowthLower(GrowthEnvelope),
    GrowthUpper(GrowthEnvelope),
    DecaySupersolution(DecayBarrierParams),
    Homogeneous { nu: f64, horizon: f64 },
    ConeSupersolution(ConeBarrierParams),
}

/// Value, derivatives and residual of a barrier at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierTerms {
    pub value: f64,
    pub laplacian: f64,
    pub time_derivative: f64,
    /// `ψ^(−ν)`.
    pub absorption: f64,
    /// `Δψ − ψ^(−ν) − ψ_t`, evaluated in factored form.
    pub residual: f64,
}

impl BarrierTerms {
    /// Magnitude against which the residual is judged: the sum of the
    /// absolute values of the three terms that make it up.
    pub fn scale(&self) -> f64 {
        self.laplacian.abs() + self.absorption.abs() + self.time_derivative.abs()
    }
}

impl Barrier {
    /// Spatially constant extinction profile with extinction time `horizon`.
    pub fn homogeneous(nu: f64, horizon: f64) -> Result<Barrier> {
        check_positive("nu", nu)?;
        check_positive("horizon", horizon)?;
        Ok(Barrier::Homogeneous { nu, horizon })
    }

    /// Homogeneous barrier whose extinction time matches bounded data with
    /// supremum `sup0`: `T = sup0^(1+ν)/(1+ν)`.
    pub fn homogeneous_for_sup(nu: f64, sup0: f64) -> Result<Barrier> {
        check_positive("sup0", sup0)?;
        check_positive("nu", nu)?;
        Barrier::homogeneous(nu, sup0.powf(1.0 + nu) / (1.0 + nu))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Barrier::GrowthLower(_) => "growth-lower",
            Barrier::GrowthUpper(_) => "growth-upper",
            Barrier::DecaySupersolution(_) => "decay",
            Barrier::Homogeneous { .. } => "homogeneous",
            Barrier::ConeSupersolution(_) => "cone",
        }
    }

    pub fn nu(&self) -> f64 {
        match self {
            Barrier::GrowthLower(e) | Barrier::GrowthUpper(e) => e.nu,
            Barrier::DecaySupersolution(p) => p.nu,
            Barrier::Homogeneous { nu, .. } => *nu,
            Barrier::ConeSupersolution(p) => p.nu,
        }
    }

    /// Space dimension the Laplacian refers to. The homogeneous profile is
    /// dimension free and reports 1.
    pub fn dim(&self) -> usize {
        match self {
            Barrier::GrowthLower(e) | Barrier::GrowthUpper(e) => e.dim,
            Barrier::DecaySupersolution(p) => p.dim,
            Barrier::Homogeneous { .. } => 1,
            Barrier::ConeSupersolution(p) => p.dim,
        }
    }

    /// Extinction time for the decaying variants.
    pub fn horizon(&self) -> Option<f64> {
        match self {
            Barrier::GrowthLower(_) | Barrier::GrowthUpper(_) => None,
            Barrier::DecaySupersolution(p) => Some(p.horizon),
            Barrier::Homogeneous { horizon, .. } => Some(*horizon),
            Barrier::ConeSupersolution(p) => Some(p.horizon),
        }
    }

    /// Residual sign that makes this barrier a sub- or supersolution.
    pub fn expected_sign(&self) -> SignClass {
        match self {
            Barrier::GrowthLower(_) => SignClass::Nonnegative,
            Barrier::Homogeneous { .. } => SignClass::Zero,
            _ => SignClass::Nonpositive,
        }
    }

    fn check_point(&self, r2: f64, t: f64) -> Result<()> {
        if !(r2.is_finite() && r2 >= 0.0) {
            return Err(Error::DomainError(format!("r2 = {r2} must be finite and nonnegative")));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::DomainError(format!("t = {t} must be finite and nonnegative")));
        }
        match self {
            Barrier::DecaySupersolution(DecayBarrierParams { horizon, .. })
            | Barrier::Homogeneous { horizon, .. } => {
                if t >= *horizon {
                    return Err(Error::DomainError(format!(
                        "{} barrier sampled at t = {t} >= T = {horizon}",
                        self.name()
                    )));
                }
            }
            Barrier::ConeSupersolution(p) => {
                if t > p.horizon {
                    return Err(Error::DomainError(format!(
                        "cone barrier sampled at t = {t} > T = {}",
                        p.horizon
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Closed-form value at `|x|² = r2`, time `t`.
    pub fn eval(&self, r2: f64, t: f64) -> Result<f64> {
        self.check_point(r2, t)?;
        Ok(match *self {
            Barrier::GrowthLower(e) => growth_value(e.a1, e.alpha1, e.b1, r2, t),
            Barrier::GrowthUpper(e) => growth_value(e.a2, e.alpha2, e.b2, r2, t),
            Barrier::DecaySupersolution(p) => {
                let pw = 1.0 / (1.0 + p.nu);
                p.a3 * (p.horizon - t).powf(pw) * (1.0 + r2).powf(-p.beta)
            }
            Barrier::Homogeneous { nu, horizon } => {
                let pw = 1.0 / (1.0 + nu);
                ((1.0 + nu) * (horizon - t)).powf(pw)
            }
            Barrier::ConeSupersolution(p) => {
                let w = p.slope * (p.horizon - t) + r2;
                if w == 0.0 {
                    0.0
                } else {
                    p.amp * w.powf(1.0 / (1.0 + p.nu))
                }
            }
        })
    }

    pub fn laplacian(&self, r2: f64, t: f64) -> Result<f64> {
        self.terms(r2, t).map(|x| x.laplacian)
    }

    pub fn time_derivative(&self, r2: f64, t: f64) -> Result<f64> {
        self.terms(r2, t).map(|x| x.time_derivative)
    }

    pub fn residual(&self, r2: f64, t: f64) -> Result<f64> {
        self.terms(r2, t).map(|x| x.residual)
    }

    /// All closed-form quantities at one point.
    ///
    /// The residual is computed as `prefactor × bracket` with the prefactor
    /// pulled out analytically, so that the near-cancellation inside the
    /// bracket happens between O(1) numbers.
    pub fn terms(&self, r2: f64, t: f64) -> Result<BarrierTerms> {
        self.check_point(r2, t)?;
        match *self {
            Barrier::GrowthLower(e) => Ok(growth_terms(e.nu, e.dim, e.a1, e.alpha1, e.b1, r2, t)),
            Barrier::GrowthUpper(e) => Ok(growth_terms(e.nu, e.dim, e.a2, e.alpha2, e.b2, r2, t)),
            Barrier::DecaySupersolution(p) => Ok(decay_terms(&p, r2, t)),
            Barrier::Homogeneous { nu, horizon } => Ok(homogeneous_terms(nu, horizon, t)),
            Barrier::ConeSupersolution(p) => cone_terms(&p, r2, t),
        }
    }
}

fn growth_value(a: f64, alpha: f64, b: f64, r2: f64, t: f64) -> f64 {
    a * (1.0 + r2 + b * t).powf(alpha)
}

// ψ = A s^α with s = 1 + r² + b t.
//   Δψ  = 2αA s^(α−2) (n s − 2(1−α) r²)
//   ψ_t = α b A s^(α−1)
//   Δψ − ψ^(−ν) − ψ_t = A^(−ν) s^(−αν) { α A^(1+ν) s^(α(1+ν)−1) (2n − b − 4(1−α) r²/s) − 1 }
fn growth_terms(nu: f64, dim: usize, a: f64, alpha: f64, b: f64, r2: f64, t: f64) -> BarrierTerms {
    let n = dim as f64;
    let s = 1.0 + r2 + b * t;
    let value = a * s.powf(alpha);
    let laplacian = 2.0 * alpha * a * s.powf(alpha - 2.0) * (n * s - 2.0 * (1.0 - alpha) * r2);
    let time_derivative = alpha * b * a * s.powf(alpha - 1.0);
    let absorption = a.powf(-nu) * s.powf(-alpha * nu);
    let q = alpha * (1.0 + nu) - 1.0;
    let k = alpha * a.powf(1.0 + nu) * (2.0 * n - b - 4.0 * (1.0 - alpha) * r2 / s);
    // k s^q − 1 = (k − 1) s^q + (s^q − 1)
    let bracket = (k - 1.0) * s.powf(q) + (q * s.ln()).exp_m1();
    BarrierTerms {
        value,
        laplacian,
        time_derivative,
        absorption,
        residual: absorption * bracket,
    }
}

// ψ = A τ^p q^(−β), τ = T − t, q = 1 + r², p = 1/(1+ν).
//   Δψ  = A τ^p [2β(2β+2−n) q^(−β−1) − 4β(β+1) q^(−β−2)]
//   ψ_t = −p A τ^(p−1) q^(−β)
//   residual = A τ^p q^(−β−2) { 2β(2β+2−n) q − 4β(β+1) + (q²/τ)(p − A^(−(1+ν)) q^(β(1+ν))) }
fn decay_terms(p: &DecayBarrierParams, r2: f64, t: f64) -> BarrierTerms {
    let n = p.dim as f64;
    let pw = 1.0 / (1.0 + p.nu);
    let beta = p.beta;
    let tau = p.horizon - t;
    let q = 1.0 + r2;
    let a = p.a3;
    let tau_p = tau.powf(pw);
    let value = a * tau_p * q.powf(-beta);
    let laplacian = a
        * tau_p
        * (2.0 * beta * (2.0 * beta + 2.0 - n) * q.powf(-beta - 1.0)
            - 4.0 * beta * (beta + 1.0) * q.powf(-beta - 2.0));
    let time_derivative = -pw * a * tau.powf(pw - 1.0) * q.powf(-beta);
    let absorption = value.powf(-p.nu);
    let a_inv = a.powf(-(1.0 + p.nu));
    let growth = (beta * (1.0 + p.nu) * q.ln()).exp_m1();
    let reaction = (pw - a_inv) - a_inv * growth;
    let bracket = 2.0 * beta * (2.0 * beta + 2.0 - n) * q - 4.0 * beta * (beta + 1.0)
        + (q * q / tau) * reaction;
    BarrierTerms {
        value,
        laplacian,
        time_derivative,
        absorption,
        residual: a * tau_p * q.powf(-beta - 2.0) * bracket,
    }
}

// ψ = k τ^p, k = (1+ν)^p. Residual = τ^(p−1) k^(−ν) (p k^(1+ν) − 1), identically zero.
fn homogeneous_terms(nu: f64, horizon: f64, t: f64) -> BarrierTerms {
    let pw = 1.0 / (1.0 + nu);
    let tau = horizon - t;
    let ln_k = pw * (1.0 + nu).ln();
    let k = ln_k.exp();
    let value = k * tau.powf(pw);
    let time_derivative = -pw * k * tau.powf(pw - 1.0);
    let absorption = value.powf(-nu);
    let bracket = pw * ((1.0 + nu) * ln_k).exp() - 1.0;
    BarrierTerms {
        value,
        laplacian: 0.0,
        time_derivative,
        absorption,
        residual: tau.powf(pw - 1.0) * (-nu * ln_k).exp() * bracket,
    }
}

// ψ = A w^p, w = b τ + r².
//   Δψ  = 2pA w^(p−2) (n w − 2(1−p) r²)
//   ψ_t = −p b A w^(p−1)
//   residual = A^(−ν) w^(p−1) { p A^(1+ν) (2n + b) − 1 − 4p(1−p) A^(1+ν) r²/w }
fn cone_terms(p: &ConeBarrierParams, r2: f64, t: f64) -> Result<BarrierTerms> {
    let n = p.dim as f64;
    let pw = 1.0 / (1.0 + p.nu);
    let w = p.slope * (p.horizon - t) + r2;
    if w <= 0.0 {
        return Err(Error::DomainError(
            "cone barrier derivatives are undefined at its vertex (r = 0, t = T)".into(),
        ));
    }
    let a = p.amp;
    let value = a * w.powf(pw);
    let laplacian = 2.0 * pw * a * w.powf(pw - 2.0) * (n * w - 2.0 * (1.0 - pw) * r2);
    let time_derivative = -pw * p.slope * a * w.powf(pw - 1.0);
    let absorption = a.powf(-p.nu) * w.powf(pw - 1.0);
    let a_pow = a.powf(1.0 + p.nu);
    let bracket = (pw * a_pow * (2.0 * n + p.slope) - 1.0) - 4.0 * pw * (1.0 - pw) * a_pow * r2 / w;
    Ok(BarrierTerms {
        value,
        laplacian,
        time_derivative,
        absorption,
        residual: absorption * bracket,
    })
}
