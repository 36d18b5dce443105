//! Focused-spot size from a truncated Gaussian beam, and the 1-D Gaussian
//! intensity kernel used to blur object profiles during a scan.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pole of the truncation fit for K.
pub const TRUNCATION_POLE: f64 = 0.2161;

/// Minimum distance above the pole accepted by [`k_factor`].
pub const POLE_MARGIN: f64 = 1e-6;

/// Rayleigh-resolution to FWHM ratio.
pub const RAYLEIGH_PER_FWHM: f64 = 1.18;

/// K for the 1/e² diameter of an untruncated Gaussian focused by a lens.
/// Kept for reference; the FWHM pipeline uses [`k_factor`].
pub const K_UNTRUNCATED_GAUSSIAN: f64 = 4.0 / std::f64::consts::PI;

/// Laser, lens and aperture. All lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    pub wavelength: f64,
    pub focal_length: f64,
    /// Clear aperture (iris) diameter.
    pub aperture_diameter: f64,
    /// 1/e² diameter of the beam arriving at the iris.
    pub input_beam_diameter: f64,
}

impl BeamSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("wavelength", self.wavelength),
            ("focal_length", self.focal_length),
            ("aperture_diameter", self.aperture_diameter),
            ("input_beam_diameter", self.input_beam_diameter),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Domain {
                    name,
                    value,
                    domain: "(0, inf)",
                });
            }
        }
        Ok(())
    }

    pub fn truncation(&self) -> f64 {
        self.input_beam_diameter / self.aperture_diameter
    }
}

/// Predicted focal spot. Lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpotPrediction {
    pub fwhm: f64,
    pub rayleigh_resolution: f64,
    pub k_factor: f64,
}

/// FWHM spot-size factor K as a function of truncation T = φ_beam/φ_iris.
pub fn k_factor(truncation: f64) -> Result<f64> {
    if !truncation.is_finite() || truncation <= TRUNCATION_POLE + POLE_MARGIN {
        return Err(Error::TruncationAtPole(truncation));
    }
    let x = truncation - TRUNCATION_POLE;
    Ok(1.029 + 0.7125 / x.powf(2.179) - 0.6445 / x.powf(2.221))
}

/// Spot FWHM `d = K·f·λ/φ_D` and Rayleigh resolution `1.18·d`.
pub fn spot_fwhm(spec: &BeamSpec) -> Result<SpotPrediction> {
    spec.validate()?;
    let truncation = spec.truncation();
    let k = k_factor(truncation)?;
    if k <= 0.0 {
        return Err(Error::NonPositiveK { truncation, k });
    }
    let fwhm = k * spec.focal_length * spec.wavelength / spec.aperture_diameter;
    Ok(SpotPrediction {
        fwhm,
        rayleigh_resolution: RAYLEIGH_PER_FWHM * fwhm,
        k_factor: k,
    })
}

/// Gaussian intensity weight with the given FWHM, unit peak at `x = 0`.
pub fn gaussian_profile(x: f64, fwhm: f64) -> f64 {
    (-4.0 * std::f64::consts::LN_2 * x * x / (fwhm * fwhm)).exp()
}
