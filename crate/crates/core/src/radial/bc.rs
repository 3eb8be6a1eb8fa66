use serde::{Deserialize, Serialize};

use crate::barriers::Barrier;
use crate::error::{Error, Result};

/// Data prescribed at `r = R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// `u(R, t) = scale · ψ(R², t)`.
    DirichletBarrier { barrier: Barrier, scale: f64 },
    DirichletConstant(f64),
    /// Zero flux; constants are stationary under diffusion.
    NeumannZero,
}

impl BoundaryCondition {
    pub fn barrier(barrier: Barrier) -> Self {
        BoundaryCondition::DirichletBarrier { barrier, scale: 1.0 }
    }

    pub fn is_dirichlet(&self) -> bool {
        !matches!(self, BoundaryCondition::NeumannZero)
    }

    /// Dirichlet value at `r = radius`, time `t`; `None` for zero flux.
    pub fn value(&self, radius: f64, t: f64) -> Result<Option<f64>> {
        match *self {
            BoundaryCondition::DirichletBarrier { barrier, scale } => {
                Ok(Some(scale * barrier.eval(radius * radius, t)?))
            }
            BoundaryCondition::DirichletConstant(v) => Ok(Some(v)),
            BoundaryCondition::NeumannZero => Ok(None),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BoundaryCondition::DirichletBarrier { scale, .. } if !(scale > 0.0 && scale.is_finite()) => {
                Err(Error::ConstraintViolation(format!(
                    "boundary scale must be positive, got {scale}"
                )))
            }
            BoundaryCondition::DirichletConstant(v) if !(v > 0.0 && v.is_finite()) => Err(
                Error::ConstraintViolation(format!("boundary value must be positive, got {v}")),
            ),
            _ => Ok(()),
        }
    }
}
