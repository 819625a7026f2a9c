//! Numerical toolkit for linear spectral statistics of spiked sample
//! covariance matrices.
//!
//! The crate computes the spike-corrected centering parameter for linear
//! spectral statistics by contour quadrature in the companion Stieltjes
//! variable, validates it against residue-calculus closed forms, implements
//! the corrected likelihood-ratio sphericity test together with its
//! asymptotic power function, and ships a seeded Monte Carlo laboratory for
//! size/power and CLT experiments.
//!
//! Modules:
//! - [`spike_model`]: the spiked population model, distant/close spike
//!   classification, and the sample-eigenvalue limit map φ.
//! - [`stieltjes`]: Marčenko–Pastur law (support, density, functionals) and
//!   companion-transform forward maps and inverse solvers.
//! - [`centering`]: the contour-integral centering expansion and its
//!   closed-form oracles.
//! - [`clt_test`]: the corrected likelihood-ratio statistic, null CLT
//!   parameters, test decision, and power function.
//! - [`mc_lab`]: reproducible Monte Carlo experiments.

pub mod centering;
pub mod error;
pub mod mc_lab;
pub mod normal;
pub mod spectral_fn;
pub mod spike_model;
pub mod stieltjes;

pub use centering::{
    build_contour, centering_value, closed_form_log, closed_form_lrt_g, closed_form_mean,
    contour_terms, CenteringResult, Contour, Orientation,
};
pub use clt_test::{
    clt_params_g, lrt_statistic, null_centering_g, power, power_from_shift, run_test,
    spike_shift, TestOutcome,
};
pub use error::{Error, Result};
pub use mc_lab::{
    empirical_size_power, empirical_size_power_detailed, lss, run_clt_experiment,
    run_clt_experiment_detailed, sample_eigenvalues, EntryDist, ExperimentConfig,
    ExperimentReport, RepRecord,
};
pub use normal::{normal_cdf, normal_quantile};
pub use spectral_fn::{Domain, SpectralFunction};
pub use spike_model::{phi, Spike, SpikeClass, SpikedModel};
pub use stieltjes::{
    mp_density, mp_integral, mp_support, solve_companion, solve_companion_spiked, z_of_m,
    z_of_m_spiked, MpLaw, StieltjesPoint,
};
