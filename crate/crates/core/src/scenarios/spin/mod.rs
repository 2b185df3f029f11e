//! Spin: Pauli/Dirac algebra, eigenspinors, EPR correlations and the
//! classical binary-detector model.

pub mod algebra;
pub mod bell;
pub mod eigenspinor;
pub mod epr;

pub use algebra::{dirac, dirac_anticommutator_defect, pauli, pauli_anticommutator_defect, sigma_dot, Spinor, Spinor2, Spinor4};
pub use bell::{bell_binary_correlation, binary_model_exact, chsh_binary};
pub use eigenspinor::{direction_angles, eigenspinors, gamma_p, relativistic_eigenspinors, unit_from_angles, RelativisticEigenspinors};
pub use epr::{bell_inequality_gap, chsh, coplanar, epr_correlation, epr_correlation_with, literal_overlap, singlet};
