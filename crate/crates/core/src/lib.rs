//! Simulation and analysis of interaction-free measurement and imaging with
//! a polarizing Mach-Zehnder interferometer.
//!
//! - [`polarization`]: Jones vectors, wave plates, polarizing beamsplitters.
//! - [`interferometer`]: dark-port probabilities, efficiency, phase inversion.
//! - [`beam`]: focused spot size and the Gaussian scan kernel.
//! - [`object`]: 1-D transmittance/phase profiles.
//! - [`scan`]: raster-scan simulation.
//! - [`montecarlo`]: single-photon outcome sampling.
//! - [`analysis`]: widths, knife-edge resolution, phase profiles, sweeps.
//! - [`io`]: scan and sweep file formats.

pub mod analysis;
pub mod beam;
pub mod error;
pub mod interferometer;
pub mod io;
pub mod montecarlo;
pub mod object;
pub mod polarization;
pub mod scan;

pub use analysis::{
    efficiency_sweep, knife_edge_resolution, phase_profile, reflectance_grid, width_fwhm,
    AnalysisReport, Channel, PhasePoint, ResolutionEstimate, SweepRow, SweepTable, WidthEstimate,
};
pub use beam::{gaussian_profile, k_factor, spot_fwhm, BeamSpec, SpotPrediction};
pub use error::{Error, Result};
pub use interferometer::{
    apply_noise_floor, dark_port_condition, efficiency, efficiency_ideal, invert_phase, measure,
    p_ifm_balanced, EvConfig, ObjectSample, ProbabilityTriple,
};
pub use montecarlo::{monte_carlo, monte_carlo_sharded, OutcomeTally};
pub use object::{amplitude_at, phase_from_material, ObjectProfile, ProfileSample, Side};
pub use polarization::{
    analyzer_project, linear_polarized, object_operator, pbs_split, JonesMatrix, JonesVector,
    PbsModel,
};
pub use scan::{
    effective_sample, run_scan, Drift, EffectiveSample, ScanMetadata, ScanMode, ScanPlan,
    ScanRecord, ScanResult,
};

/// Library version, recorded in scan metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
