use serde::{Deserialize, Serialize};

use super::bc::BoundaryCondition;
use super::field::Field;
use super::grid::{RadialGrid, RadialOperator};
use super::tridiag::thomas_solve_into;
use crate::error::{Error, Result};

/// Time discretisation of the linear heat substep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffusionScheme {
    /// One backward Euler solve. The system matrix is an M-matrix, so the
    /// step is positivity preserving and order preserving for any `dt`.
    #[default]
    BackwardEuler,
    /// Richardson extrapolation `2·BE(dt/2)² − BE(dt)`: second order and
    /// L-stable, but not order preserving for large `dt/h²`.
    Extrapolated,
}

/// Reusable implicit heat solver on one grid.
#[derive(Debug, Clone)]
pub(crate) struct HeatSolver {
    op: RadialOperator,
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
    full: Vec<f64>,
    half: Vec<f64>,
}

/// Per-step data for [`HeatSolver::step`]. Boundary values and sources are
/// given at the midpoint and at the end of the step; the midpoint entries
/// are only read by the extrapolated scheme.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct StepData<'a> {
    pub boundary_mid: Option<f64>,
    pub boundary_end: Option<f64>,
    pub source_mid: Option<&'a [f64]>,
    pub source_end: Option<&'a [f64]>,
    /// Rows held at their current value.
    pub pinned: Option<&'a [bool]>,
}

impl HeatSolver {
    pub fn new(grid: &RadialGrid) -> Self {
        let n = grid.len();
        HeatSolver {
            op: RadialOperator::new(grid),
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
            rhs: vec![0.0; n],
            scratch: vec![0.0; n],
            full: vec![0.0; n],
            half: vec![0.0; n],
        }
    }

    /// `(I − dt L) out = u + dt·source`, with a Dirichlet row at the boundary
    /// when `boundary` is given and identity rows where `pinned`.
    fn backward_euler(
        &mut self,
        u: &[f64],
        dt: f64,
        boundary: Option<f64>,
        source: Option<&[f64]>,
        pinned: Option<&[bool]>,
        out: &mut [f64],
    ) -> Result<()> {
        let m = u.len() - 1;
        let (lower, upper) = (self.op.lower(), self.op.upper());
        for j in 0..=m {
            let fixed = pinned.is_some_and(|p| p[j]) || (j == m && boundary.is_some());
            if fixed {
                self.sub[j] = 0.0;
                self.diag[j] = 1.0;
                self.sup[j] = 0.0;
                self.rhs[j] = match boundary {
                    Some(g) if j == m => g,
                    _ => u[j],
                };
                continue;
            }
            self.sub[j] = -dt * lower[j];
            self.sup[j] = -dt * upper[j];
            self.diag[j] = 1.0 + dt * (lower[j] + upper[j]);
            self.rhs[j] = u[j] + source.map_or(0.0, |s| dt * s[j]);
        }
        thomas_solve_into(&self.sub, &self.diag, &self.sup, &self.rhs, out, &mut self.scratch)
    }

    pub fn step(
        &mut self,
        scheme: DiffusionScheme,
        u: &[f64],
        dt: f64,
        data: StepData<'_>,
        out: &mut [f64],
    ) -> Result<()> {
        match scheme {
            DiffusionScheme::BackwardEuler => {
                self.backward_euler(u, dt, data.boundary_end, data.source_end, data.pinned, out)
            }
            DiffusionScheme::Extrapolated => {
                let mut full = std::mem::take(&mut self.full);
                let mut half = std::mem::take(&mut self.half);
                let result = (|| {
                    self.backward_euler(u, dt, data.boundary_end, data.source_end, data.pinned, &mut full)?;
                    self.backward_euler(u, 0.5 * dt, data.boundary_mid, data.source_mid, data.pinned, &mut half)?;
                    self.backward_euler(&half, 0.5 * dt, data.boundary_end, data.source_end, data.pinned, out)
                })();
                if result.is_ok() {
                    for (o, f) in out.iter_mut().zip(&full) {
                        *o = 2.0 * *o - f;
                    }
                }
                self.full = full;
                self.half = half;
                result
            }
        }
    }
}

/// One backward Euler step of `w_t = Δw` from `f.time` to `f.time + dt`.
pub fn diffusion_substep(f: &Field, dt: f64, bc: &BoundaryCondition) -> Result<Field> {
    diffusion_substep_with(f, dt, bc, DiffusionScheme::BackwardEuler)
}

pub fn diffusion_substep_with(
    f: &Field,
    dt: f64,
    bc: &BoundaryCondition,
    scheme: DiffusionScheme,
) -> Result<Field> {
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(Error::Precondition(format!("diffusion step needs dt >= 0, got {dt}")));
    }
    if dt == 0.0 {
        return Ok(f.clone());
    }
    let radius = f.grid.radius();
    let data = StepData {
        boundary_mid: bc.value(radius, f.time + 0.5 * dt)?,
        boundary_end: bc.value(radius, f.time + dt)?,
        ..StepData::default()
    };
    let mut solver = HeatSolver::new(&f.grid);
    let mut out = vec![0.0; f.values.len()];
    solver.step(scheme, &f.values, dt, data, &mut out)?;
    Ok(Field {
        grid: f.grid,
        values: out,
        time: f.time + dt,
    })
}
