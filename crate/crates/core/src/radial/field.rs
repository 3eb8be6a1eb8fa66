use crate::error::{Error, Result};

use super::grid::{RadialGrid, RadialOperator};

/// Snapshot of a radial solution on its grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub time: f64,
}

impl Field {
    pub fn new(grid: RadialGrid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Precondition(format!(
                "field has {} values but the grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("field values must be finite".into()));
        }
        Ok(Field { grid, values, time })
    }

    /// Samples `profile(r)` at every node.
    pub fn from_fn(grid: RadialGrid, time: f64, profile: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(profile).collect();
        Field { grid, values, time }
    }

    /// Samples a function of `r²` that may fail (barrier evaluation).
    pub fn try_from_r2(
        grid: RadialGrid,
        time: f64,
        profile: impl Fn(f64) -> Result<f64>,
    ) -> Result<Self> {
        let values = grid.nodes().map(|r| profile(r * r)).collect::<Result<Vec<_>>>()?;
        Field::new(grid, values, time)
    }

    pub fn constant(grid: RadialGrid, value: f64) -> Self {
        Field::from_fn(grid, 0.0, |_| value)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
            time: self.time,
        }
    }
}

/// Discrete `Δu` at the origin and at interior nodes (`M` entries for
/// `M + 1` nodes). The boundary node belongs to the boundary condition.
pub fn discrete_laplacian(f: &Field) -> Vec<f64> {
    let op = RadialOperator::new(&f.grid);
    let mut out = vec![0.0; f.values.len()];
    op.apply(&f.values, &mut out);
    out.truncate(f.grid.cells());
    out
}
