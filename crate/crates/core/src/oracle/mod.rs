//! Independent verification engines.

pub mod cn;
pub mod compare;
pub mod dump;
pub mod kernels;

pub use cn::{cn_evolve, Boundary, CnConfig, CnPropagator, CnSeries};
pub use compare::{compare_l2, CompareMode};
pub use dump::{config_hash, write_series, SeriesManifest};
pub use kernels::{free_gaussian, free_gaussian_width, free_kernel};
