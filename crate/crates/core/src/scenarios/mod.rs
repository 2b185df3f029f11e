//! Worked examples: branch catalogs and reference solutions.

pub mod aharonov_bohm;
pub mod config;
pub mod coulomb;
pub mod double_slit;
pub mod harmonic;
pub mod hermite;
pub mod particle_box;
pub mod quaternion;
pub mod spin;
pub mod tunneling;

pub use aharonov_bohm::AharonovBohm;
pub use config::ScenarioFile;
pub use coulomb::{Coulomb, CoulombLevel, KeplerOrbit};
pub use double_slit::{DoubleSlit, ScreenPoint, SlitSource};
pub use harmonic::HarmonicOscillator;
pub use hermite::{hermite_basis, hermite_function, hermite_poly};
pub use particle_box::{Family, ParticleBox};
pub use quaternion::{fibre_direction, jacobian, kinetic_identity_defect, quaternion_map, quaternion_sheets_2d, QuaternionCoord, Sheet};
pub use tunneling::{StepSolution, TransmissionReport, Tunneling};
