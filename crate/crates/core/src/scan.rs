//! Raster-scan simulation: the object is stepped through a Gaussian spot
//! and the interferometer is evaluated at every stage position.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beam::gaussian_profile;
use crate::error::{Error, Result};
use crate::interferometer::{with_floor, EvConfig, ProbabilityTriple};
use crate::object::{amplitude_at, ObjectProfile};

/// How the object amplitude seen by the dark port is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    /// `a = √P_norm · e^{iφ(x₀)}`: the point-object formula applied to the
    /// beam-averaged transmission.
    PointSampled,
    /// `a = ∫ t·e^{iφ}·G / ∫ G`: overlap of the transmitted field with the
    /// reference mode.
    CoherentConvolved,
}

impl ScanMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScanMode::PointSampled => "point_sampled",
            ScanMode::CoherentConvolved => "coherent_convolved",
        }
    }
}

/// Lock drift: the dark-port floor grows by `leak_rate` per μm of stage
/// travel, and the scan ends once the stage passes `lock_loss_position`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Drift {
    pub leak_rate: f64,
    #[serde(default)]
    pub lock_loss_position: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanPlan {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub mode: ScanMode,
    #[serde(default)]
    pub drift: Option<Drift>,
}

impl ScanPlan {
    pub fn new(start: f64, stop: f64, step: f64, mode: ScanMode) -> Result<Self> {
        let plan = Self {
            start,
            stop,
            step,
            mode,
            drift: None,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_drift(mut self, drift: Drift) -> Result<Self> {
        self.drift = Some(drift);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::Domain {
                name: "step",
                value: self.step,
                domain: "(0, inf)",
            });
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::Domain {
                name: "stop",
                value: self.stop,
                domain: "finite and greater than start",
            });
        }
        if let Some(d) = &self.drift {
            if !(d.leak_rate.is_finite() && d.leak_rate >= 0.0) {
                return Err(Error::Domain {
                    name: "leak_rate",
                    value: d.leak_rate,
                    domain: "[0, inf)",
                });
            }
        }
        Ok(())
    }

    /// Stage positions `start + i·step` up to and including `stop`.
    pub fn positions(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Beam-averaging rule: Gauss–Legendre panels of width `fwhm/panels_per_fwhm`
/// over `x₀ ± half_window_fwhm·fwhm`, with panels split at the object's
/// breakpoints so hard edges never fall inside a panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub half_window_fwhm: f64,
    pub panels_per_fwhm: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            half_window_fwhm: 3.0,
            panels_per_fwhm: 20.0,
        }
    }
}

// 6-point Gauss–Legendre on [-1, 1].
const GL_NODES: [f64; 6] = [
    -0.932_469_514_203_152,
    -0.661_209_386_466_264_5,
    -0.238_619_186_083_196_9,
    0.238_619_186_083_196_9,
    0.661_209_386_466_264_5,
    0.932_469_514_203_152,
];
const GL_WEIGHTS: [f64; 6] = [
    0.171_324_492_379_170_3,
    0.360_761_573_048_138_6,
    0.467_913_934_572_691,
    0.467_913_934_572_691,
    0.360_761_573_048_138_6,
    0.171_324_492_379_170_3,
];

impl Quadrature {
    /// Integrate `f(x)·G(x − x0)` and `G(x − x0)` over the window, returning
    /// (∫f·G, ∫G).
    fn integrate<T, F>(&self, x0: f64, fwhm: f64, breakpoints: &[f64], f: F) -> (T, f64)
    where
        T: Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let half = self.half_window_fwhm * fwhm;
        let (lo, hi) = (x0 - half, x0 + half);
        let n = (2.0 * self.half_window_fwhm * self.panels_per_fwhm).round().max(1.0) as usize;
        let h = (hi - lo) / n as f64;

        let mut cuts: Vec<f64> = (0..=n).map(|i| lo + i as f64 * h).collect();
        cuts.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * fwhm);

        let mut acc = T::default();
        let mut norm = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            let rad = 0.5 * (b - a);
            for (node, weight) in GL_NODES.iter().zip(GL_WEIGHTS) {
                let x = mid + rad * node;
                let g = weight * rad * gaussian_profile(x - x0, fwhm);
                acc += f(x) * g;
                norm += g;
            }
        }
        (acc, norm)
    }
}

/// Object as seen by the beam at stage position `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveSample {
    /// Beam-weighted power transmission.
    pub p_norm: f64,
    /// Complex amplitude fed to the dark-port interference.
    pub a_obj: Complex64,
}

pub fn effective_sample(
    profile: &ObjectProfile,
    beam_fwhm: f64,
    x0: f64,
    mode: ScanMode,
) -> EffectiveSample {
    effective_sample_with(profile, beam_fwhm, x0, mode, &Quadrature::default())
}

pub fn effective_sample_with(
    profile: &ObjectProfile,
    beam_fwhm: f64,
    x0: f64,
    mode: ScanMode,
    quad: &Quadrature,
) -> EffectiveSample {
    if matches!(profile, ObjectProfile::Absent) {
        return EffectiveSample {
            p_norm: 1.0,
            a_obj: Complex64::new(1.0, 0.0),
        };
    }
    let breaks = profile.breakpoints();
    match mode {
        ScanMode::PointSampled => {
            let (power, norm) = quad.integrate(x0, beam_fwhm, &breaks, |x| {
                let t = amplitude_at(profile, x).0;
                t * t
            });
            let p_norm = (power / norm).clamp(0.0, 1.0);
            let phi = amplitude_at(profile, x0).1;
            EffectiveSample {
                p_norm,
                a_obj: Complex64::from_polar(p_norm.sqrt(), phi),
            }
        }
        ScanMode::CoherentConvolved => {
            let (Pair(power, field), norm) = quad.integrate(x0, beam_fwhm, &breaks, |x| {
                let (t, phi) = amplitude_at(profile, x);
                Pair(t * t, Complex64::from_polar(t, phi))
            });
            EffectiveSample {
                p_norm: (power / norm).clamp(0.0, 1.0),
                a_obj: field / norm,
            }
        }
    }
}

// Accumulator for (power, field) in a single quadrature pass.
#[derive(Default, Clone, Copy)]
struct Pair(f64, Complex64);

impl std::ops::AddAssign for Pair {
    fn add_assign(&mut self, rhs: Pair) {
        self.0 += rhs.0;
        self.1 += rhs.1;
    }
}

impl std::ops::Mul<f64> for Pair {
    type Output = Pair;
    fn mul(self, w: f64) -> Pair {
        Pair(self.0 * w, self.1 * w)
    }
}

/// One stage position of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub x_um: f64,
    pub p_norm: f64,
    pub p_ifm: f64,
    pub p_abs: f64,
    pub p_noresult: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub config: EvConfig,
    pub beam_fwhm_um: f64,
    pub object: ObjectProfile,
    pub mode: ScanMode,
    #[serde(default)]
    pub drift: Option<Drift>,
    #[serde(default)]
    pub seed: Option<u64>,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub records: Vec<ScanRecord>,
    pub metadata: ScanMetadata,
}

/// Simulate a raster scan of `profile` through a spot of FWHM `beam_fwhm`
/// (μm). Positions are evaluated in parallel; records come back in stage
/// order.
pub fn run_scan(
    plan: &ScanPlan,
    config: &EvConfig,
    profile: &ObjectProfile,
    beam_fwhm: f64,
) -> Result<ScanResult> {
    run_scan_with(plan, config, profile, beam_fwhm, &Quadrature::default())
}

pub fn run_scan_with(
    plan: &ScanPlan,
    config: &EvConfig,
    profile: &ObjectProfile,
    beam_fwhm: f64,
    quad: &Quadrature,
) -> Result<ScanResult> {
    plan.validate()?;
    config.validate()?;
    profile.validate()?;
    if !(beam_fwhm.is_finite() && beam_fwhm > 0.0) {
        return Err(Error::Domain {
            name: "beam_fwhm",
            value: beam_fwhm,
            domain: "(0, inf)",
        });
    }

    let mut positions = plan.positions();
    if let Some(lock_loss) = plan.drift.and_then(|d| d.lock_loss_position) {
        positions.retain(|&x| x <= lock_loss);
    }
    let sigma0 = config.noise_floor();
    let r1_eff = config.effective_r1();

    let records = positions
        .par_iter()
        .map(|&x| {
            let eff = effective_sample_with(profile, beam_fwhm, x, plan.mode, quad);
            let ideal = config.dark_port_amplitude(eff.a_obj).norm_sqr();
            let sigma = match plan.drift {
                Some(d) => (sigma0 + d.leak_rate * (x - plan.start)).min(1.0),
                None => sigma0,
            };
            let p_ifm = with_floor(ideal, sigma);
            let triple = ProbabilityTriple::from_ifm_abs(p_ifm, r1_eff * (1.0 - eff.p_norm));
            ScanRecord {
                x_um: x,
                p_norm: eff.p_norm,
                p_ifm: triple.p_ifm,
                p_abs: triple.p_abs,
                p_noresult: triple.p_noresult,
            }
        })
        .collect();

    Ok(ScanResult {
        records,
        metadata: ScanMetadata {
            config: *config,
            beam_fwhm_um: beam_fwhm,
            object: profile.clone(),
            mode: plan.mode,
            drift: plan.drift,
            seed: None,
            tool_version: crate::VERSION.to_string(),
        },
    })
}
