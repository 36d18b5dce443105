//! Recovering physical quantities from scans: object widths, knife-edge
//! spot size, phase profiles and efficiency sweeps.
//!
//! Feature widths use a fit-free half-maximum procedure. The baseline is the
//! median of the first and last 10% of samples; the feature is whichever
//! excursion from it is larger (bump or dip); crossings of half the peak
//! excursion are located by linear interpolation and exactly two are
//! required.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beam::RAYLEIGH_PER_FWHM;
use crate::error::{Error, Result};
use crate::interferometer::{
    efficiency, invert_phase, measure, remove_noise_floor, EvConfig, ObjectSample,
};
use crate::scan::{ScanMode, ScanResult};

/// Excursions at or below this are treated as flat.
pub const FLAT_TOL: f64 = 1e-9;

/// Records with less transmission than this get no phase estimate.
pub const MIN_PHASE_P_NORM: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    /// Blocked fraction `1 − P_norm`.
    Transmission,
    /// Dark-port signal, analysed as the amplitude `|A|` after removing the
    /// visibility floor recorded in the scan metadata.
    Ifm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthEstimate {
    pub fwhm: f64,
    pub channel: Channel,
    /// Raw channel value (`1 − P_norm` or `P_ifm`) at the two crossings.
    pub half_max_level: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolutionEstimate {
    pub spot_fwhm: f64,
    pub rayleigh: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x_um: f64,
    /// Phase in [0, π]; `None` where it cannot be recovered.
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r: f64,
    pub p_ifm: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn edge_baseline(signal: &[f64]) -> f64 {
    let k = (signal.len() / 10).max(1);
    let mut edges: Vec<f64> = signal[..k]
        .iter()
        .chain(&signal[signal.len() - k..])
        .copied()
        .collect();
    median(&mut edges)
}

struct Feature {
    fwhm: f64,
    baseline: f64,
    /// Signed half excursion relative to the baseline.
    half: f64,
}

/// Half-maximum width of the single feature in `signal` sampled at `xs`.
fn feature_fwhm(xs: &[f64], signal: &[f64], baseline: f64) -> Result<Feature> {
    if signal.len() < 3 {
        return Err(Error::NoFeature);
    }
    let (lo, hi) = signal
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v - baseline), hi.max(v - baseline))
        });
    let (sign, peak) = if hi >= -lo { (1.0, hi) } else { (-1.0, -lo) };
    if peak <= FLAT_TOL {
        return Err(Error::NoFeature);
    }
    let half = 0.5 * peak;
    let level = |v: f64| sign * (v - baseline) - half;

    let mut crossings = Vec::new();
    for i in 0..signal.len() - 1 {
        let (a, b) = (level(signal[i]), level(signal[i + 1]));
        if (a < 0.0) != (b < 0.0) {
            let w = a / (a - b);
            crossings.push(xs[i] + w * (xs[i + 1] - xs[i]));
        }
    }
    if crossings.len() != 2 {
        return Err(Error::AmbiguousFeature(crossings.len()));
    }
    Ok(Feature {
        fwhm: crossings[1] - crossings[0],
        baseline,
        half: sign * half,
    })
}

/// FWHM of the object seen in one channel of a scan.
pub fn width_fwhm(scan: &ScanResult, channel: Channel) -> Result<WidthEstimate> {
    let xs: Vec<f64> = scan.records.iter().map(|r| r.x_um).collect();
    match channel {
        Channel::Transmission => {
            let signal: Vec<f64> = scan.records.iter().map(|r| 1.0 - r.p_norm).collect();
            let f = feature_fwhm(&xs, &signal, edge_baseline(&signal))?;
            Ok(WidthEstimate {
                fwhm: f.fwhm,
                channel,
                half_max_level: f.baseline + f.half,
            })
        }
        Channel::Ifm => {
            let sigma = scan.metadata.config.noise_floor();
            let amp: Vec<f64> = scan
                .records
                .iter()
                .map(|r| remove_noise_floor(r.p_ifm, sigma).max(0.0).sqrt())
                .collect();
            // |A| is folded at zero. If the field at the baseline is negative
            // the feature rises from −|A|, not from +|A|.
            let mut baseline = edge_baseline(&amp);
            let p_norm: Vec<f64> = scan.records.iter().map(|r| r.p_norm).collect();
            let field = scan
                .metadata
                .config
                .dark_port_amplitude(Complex64::new(edge_baseline(&p_norm).sqrt(), 0.0));
            if field.re < 0.0 {
                baseline = -baseline;
            }
            let f = feature_fwhm(&xs, &amp, baseline)?;
            let level = f.baseline + f.half;
            Ok(WidthEstimate {
                fwhm: f.fwhm,
                channel,
                half_max_level: sigma + (1.0 - sigma) * level * level,
            })
        }
    }
}

fn median_of_3(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            if i == 0 || i + 1 == n {
                values[i]
            } else {
                let mut w = [values[i - 1], values[i], values[i + 1]];
                median(&mut w)
            }
        })
        .collect()
}

/// Spot FWHM from the derivative of a knife-edge transmission scan.
pub fn knife_edge_resolution(scan: &ScanResult) -> Result<ResolutionEstimate> {
    let records = &scan.records;
    if records.len() < 4 {
        return Err(Error::NotAnEdge(format!("only {} samples", records.len())));
    }
    let xs: Vec<f64> = records.iter().map(|r| r.x_um).collect();
    let p: Vec<f64> = records.iter().map(|r| r.p_norm).collect();
    let smooth = median_of_3(&p);

    let tol = FLAT_TOL;
    let rising = smooth.windows(2).all(|w| w[1] >= w[0] - tol);
    let falling = smooth.windows(2).all(|w| w[1] <= w[0] + tol);
    if !(rising || falling) {
        return Err(Error::NotAnEdge("transmission is not monotone".into()));
    }
    let span = (smooth[smooth.len() - 1] - smooth[0]).abs();
    if span < 0.5 {
        return Err(Error::NotAnEdge(format!(
            "transmission only changes by {span:.3}"
        )));
    }

    // Central differences on the half-integer grid.
    let (mid, slope): (Vec<f64>, Vec<f64>) = smooth
        .windows(2)
        .zip(xs.windows(2))
        .map(|(pw, xw)| {
            (
                0.5 * (xw[0] + xw[1]),
                ((pw[1] - pw[0]) / (xw[1] - xw[0])).abs(),
            )
        })
        .unzip();
    let f = feature_fwhm(&mid, &slope, edge_baseline(&slope))?;
    Ok(ResolutionEstimate {
        spot_fwhm: f.fwhm,
        rayleigh: RAYLEIGH_PER_FWHM * f.fwhm,
    })
}

/// Per-record phase from a point-sampled scan.
pub fn phase_profile(scan: &ScanResult, config: &EvConfig) -> Result<Vec<PhasePoint>> {
    if scan.metadata.mode != ScanMode::PointSampled {
        return Err(Error::WrongMode {
            expected: ScanMode::PointSampled.as_str(),
            found: scan.metadata.mode.as_str(),
        });
    }
    let sigma = config.noise_floor();
    Ok(scan
        .records
        .iter()
        .map(|r| {
            let phi = if r.p_norm < MIN_PHASE_P_NORM {
                None
            } else {
                invert_phase(remove_noise_floor(r.p_ifm, sigma), r.p_norm, config).ok()
            };
            PhasePoint { x_um: r.x_um, phi }
        })
        .collect())
}

/// P_ifm and η over reflectances `r` with `R₁ = T₂ = r`.
pub fn efficiency_sweep(r_values: &[f64], object: &ObjectSample, eps: f64) -> Result<SweepTable> {
    let mut rows = Vec::with_capacity(r_values.len());
    let mut prev = f64::NEG_INFINITY;
    for &r in r_values {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain {
                name: "r",
                value: r,
                domain: "(0, 1)",
            });
        }
        if r <= prev {
            return Err(Error::Domain {
                name: "r",
                value: r,
                domain: "strictly increasing",
            });
        }
        prev = r;
        let config = EvConfig::new(1.0 - r, r, 1.0, eps)?;
        let triple = measure(&config, object);
        rows.push(SweepRow {
            r,
            p_ifm: triple.p_ifm,
            eta: efficiency(&triple)?,
        });
    }
    Ok(SweepTable { rows })
}

/// `points` reflectances evenly spaced strictly inside (lo, hi); a single
/// point sits at the midpoint.
pub fn reflectance_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        n => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Everything the analysis front end can report about a scan.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub widths: Vec<WidthEstimate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub resolution: Option<ResolutionEstimate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phase_profile: Option<Vec<PhasePoint>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sweep: Option<SweepTable>,
}
