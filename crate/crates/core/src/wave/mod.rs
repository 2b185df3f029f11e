//! Quantum side: wave assembly, the Schrödinger residual, densities,
//! measurement collapse and quantization.

pub mod assemble;
pub mod density;
pub mod grid;
pub mod measure;
pub mod quantize;
pub mod residual;

pub use assemble::{assemble_wave, feynman_kernel, AssembleOptions, BranchTerm, Domain, KernelReference};
pub use density::{born_probability, check_norm_conservation, density_matrix, DensityMatrix, NormDrift};
pub use grid::{Grid, WaveField};
pub use measure::{collapse, collapse_series, MeasurementOperator};
pub use quantize::{geometric_series_filter, quantize, QuantizationProblem, QuantizedLevel};
pub use residual::{
    hamiltonian_operator, loglog_slope, schrodinger_residual, schrodinger_residual_at, ResidualOptions, ResidualReport, ResidualSummary, TimeDerivative,
};
