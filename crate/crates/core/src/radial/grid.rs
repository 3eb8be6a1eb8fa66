use serde::{Deserialize, Serialize};

use crate::error::{constraint, Result};

/// Smallest admissible number of cells.
pub const MIN_CELLS: usize = 8;

/// Uniform mesh `r_j = j·h`, `j = 0..=cells`, on the radius `[0, R]` of the
/// ball `B_R ⊂ ℝⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    radius: f64,
    cells: usize,
    dim: usize,
}

pub fn build_grid(radius: f64, cells: usize, dim: usize) -> Result<RadialGrid> {
    RadialGrid::new(radius, cells, dim)
}

impl RadialGrid {
    pub fn new(radius: f64, cells: usize, dim: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(constraint(format!("grid radius must be positive, got {radius}")));
        }
        if cells < MIN_CELLS {
            return Err(constraint(format!(
                "grid needs at least {MIN_CELLS} cells, got {cells}"
            )));
        }
        if dim == 0 {
            return Err(constraint("space dimension must be at least 1"));
        }
        Ok(RadialGrid { radius, cells, dim })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.radius / self.cells as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.cells {
            self.radius
        } else {
            j as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.node(j))
    }

    /// Index of the boundary node `r = R`.
    pub fn boundary(&self) -> usize {
        self.cells
    }
}

/// `(aⁿ − bⁿ)/n` for `a > b ≥ 0`, summed without cancellation.
fn shell_volume(a: f64, b: f64, n: usize) -> f64 {
    let mut sum = 0.0;
    for k in 0..n {
        sum += a.powi(k as i32) * b.powi((n - 1 - k) as i32);
    }
    (a - b) * sum / n as f64
}

/// Conservative discretisation of the radial Laplacian
/// `u″ + (n−1)/r u′ = r^(1−n) (r^(n−1) u′)′`:
///
/// `(Lu)_j = lower_j (u_{j−1} − u_j) + upper_j (u_{j+1} − u_j)`
///
/// with face weights `r_{j±½}^(n−1)` over the exact shell volume
/// `(r_{j+½}ⁿ − r_{j−½}ⁿ)/n`. All coefficients are nonnegative, the scheme is
/// exact on constants and on `r²`, and at the origin it reduces to
/// `2n (u₁ − u₀)/h²`. The last row is the zero-flux half cell at `r = R`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOperator {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl RadialOperator {
    pub fn new(grid: &RadialGrid) -> Self {
        let m = grid.cells();
        let n = grid.dim();
        let h = grid.spacing();
        let mut lower = vec![0.0; m + 1];
        let mut upper = vec![0.0; m + 1];
        let face = |j: usize| (j as f64 + 0.5) * h; // r_{j+½}
        let weight = |r: f64| r.powi(n as i32 - 1);

        upper[0] = 2.0 * n as f64 / (h * h);
        for j in 1..m {
            let (lo, hi) = (face(j - 1), face(j));
            let vol = shell_volume(hi, lo, n);
            lower[j] = weight(lo) / (h * vol);
            upper[j] = weight(hi) / (h * vol);
        }
        let lo = face(m - 1);
        let vol = shell_volume(grid.radius(), lo, n);
        lower[m] = weight(lo) / (h * vol);
        RadialOperator { lower, upper }
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Applies the operator at every node; the last entry is the zero-flux
    /// boundary row.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let m = u.len() - 1;
        out[0] = self.upper[0] * (u[1] - u[0]);
        for j in 1..m {
            out[j] = self.lower[j] * (u[j - 1] - u[j]) + self.upper[j] * (u[j + 1] - u[j]);
        }
        out[m] = self.lower[m] * (u[m - 1] - u[m]);
    }
}
