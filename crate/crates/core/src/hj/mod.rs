//! Classical side: constrained Hamilton–Jacobi characteristics and density transport.

pub mod branch;
pub mod constraints;
pub mod ensemble;
pub mod hamiltonian;
pub mod operators;
pub mod trajectory;
pub mod transport;

pub use branch::{ActionBranch, BranchCause, BranchKind, BranchPoint, InitialCondition};
pub use constraints::{CollisionMode, Constraint, ConstraintSet};
pub use ensemble::{EnsembleElement, EnsembleSpec};
pub use hamiltonian::{HamiltonianSpec, Metric, MetricAt};
pub use operators::{branch_laplacian, check_gauge, hj_residual, laplace_beltrami, laplace_beltrami_stencil, GaugeReport, StencilOptions};
pub use trajectory::{integrate_characteristic, reflect_momentum, BranchStart, EventKind, PathTrajectory, StepControl, TrajectoryEvent, TrajectorySample};
pub use transport::{density_consistency, transport_density, CausticPolicy, TransportOptions};
