//! Finite-difference solver for `u_t = Δu − u^(−ν)` on a ball, in the
//! radial variable.
//!
//! Time stepping is Strang splitting: the absorption ODE is integrated
//! exactly and the heat part is an implicit tridiagonal solve. Nodes whose
//! value reaches the extinction floor are frozen there.

mod bc;
mod diffusion;
mod field;
mod grid;
pub mod io;
mod reaction;
mod solver;
mod tridiag;

pub use bc::BoundaryCondition;
pub use diffusion::{diffusion_substep, diffusion_substep_with, DiffusionScheme};
pub(crate) use diffusion::{HeatSolver, StepData};
pub use field::{discrete_laplacian, Field};
pub use grid::{build_grid, RadialGrid, RadialOperator, MIN_CELLS};
pub use reaction::reaction_substep;
pub use solver::{simulate, step, Integrator, RunStats, SolverConfig, StepReport, Trajectory};
pub use tridiag::thomas_solve;

#[cfg(test)]
mod tests;
