//! One-dimensional object profiles: amplitude transmittance t(x) and phase
//! φ(x), positions in μm.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// One tabulated sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub x: f64,
    pub t: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectProfile {
    Absent,
    /// Opaque half-plane; `blocks_side` is the side of `edge_position` that
    /// is covered.
    KnifeEdge { edge_position: f64, blocks_side: Side },
    /// Opaque top-hat.
    Wire { center: f64, width: f64 },
    /// Transparent gap of `width` in a screen of amplitude `background_t`.
    Slit {
        center: f64,
        width: f64,
        background_t: f64,
    },
    /// Semi-transparent raised-cosine dip in t with a matching phase bump.
    Filament {
        center: f64,
        width: f64,
        min_t: f64,
        peak_phase: f64,
    },
    /// Linear interpolation between samples; clamped outside the table.
    Tabulated { samples: Vec<ProfileSample> },
}

impl ObjectProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            ObjectProfile::Absent => Ok(()),
            ObjectProfile::KnifeEdge { edge_position, .. } => finite("edge_position", *edge_position),
            ObjectProfile::Wire { center, width } => {
                finite("center", *center)?;
                positive("width", *width)
            }
            ObjectProfile::Slit {
                center,
                width,
                background_t,
            } => {
                finite("center", *center)?;
                positive("width", *width)?;
                check_range("background_t", *background_t, 0.0, 1.0, "[0, 1]")
            }
            ObjectProfile::Filament {
                center,
                width,
                min_t,
                peak_phase,
            } => {
                finite("center", *center)?;
                positive("width", *width)?;
                check_range("min_t", *min_t, 0.0, 1.0, "[0, 1]")?;
                finite("peak_phase", *peak_phase)
            }
            ObjectProfile::Tabulated { samples } => {
                if samples.is_empty() {
                    return Err(Error::Domain {
                        name: "samples",
                        value: 0.0,
                        domain: "non-empty table",
                    });
                }
                for s in samples {
                    finite("x", s.x)?;
                    check_range("t", s.t, 0.0, 1.0, "[0, 1]")?;
                    finite("phi", s.phi)?;
                }
                for pair in samples.windows(2) {
                    if pair[1].x <= pair[0].x {
                        return Err(Error::Domain {
                            name: "x",
                            value: pair[1].x,
                            domain: "strictly increasing",
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Short human-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            ObjectProfile::Absent => "absent",
            ObjectProfile::KnifeEdge { .. } => "knife_edge",
            ObjectProfile::Wire { .. } => "wire",
            ObjectProfile::Slit { .. } => "slit",
            ObjectProfile::Filament { .. } => "filament",
            ObjectProfile::Tabulated { .. } => "tabulated",
        }
    }

    /// Panel boundaries for the beam integral: every point where t or φ (or a
    /// derivative) is discontinuous, plus interior points of smooth features.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            ObjectProfile::Absent => vec![],
            ObjectProfile::KnifeEdge { edge_position, .. } => vec![*edge_position],
            ObjectProfile::Wire { center, width } | ObjectProfile::Slit { center, width, .. } => {
                vec![center - 0.5 * width, center + 0.5 * width]
            }
            // Quarter periods of the raised cosine, so narrow filaments under
            // a wide beam still get several quadrature panels.
            ObjectProfile::Filament { center, width, .. } => [-0.5, -0.25, 0.0, 0.25, 0.5]
                .iter()
                .map(|f| center + f * width)
                .collect(),
            ObjectProfile::Tabulated { samples } => samples.iter().map(|s| s.x).collect(),
        }
    }
}

fn finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "finite",
        })
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "(0, inf)",
        })
    }
}

/// (t, φ) of `profile` at position `x` (μm).
///
/// Hard edges belong to the covered side for knife edges and wires, and to
/// the open gap for slits.
pub fn amplitude_at(profile: &ObjectProfile, x: f64) -> (f64, f64) {
    match profile {
        ObjectProfile::Absent => (1.0, 0.0),
        ObjectProfile::KnifeEdge {
            edge_position,
            blocks_side,
        } => {
            let covered = match blocks_side {
                Side::Left => x <= *edge_position,
                Side::Right => x >= *edge_position,
            };
            (if covered { 0.0 } else { 1.0 }, 0.0)
        }
        ObjectProfile::Wire { center, width } => {
            if (x - center).abs() <= 0.5 * width {
                (0.0, 0.0)
            } else {
                (1.0, 0.0)
            }
        }
        ObjectProfile::Slit {
            center,
            width,
            background_t,
        } => {
            if (x - center).abs() <= 0.5 * width {
                (1.0, 0.0)
            } else {
                (*background_t, 0.0)
            }
        }
        ObjectProfile::Filament {
            center,
            width,
            min_t,
            peak_phase,
        } => {
            let u = (x - center) / width;
            if u.abs() > 0.5 {
                return (1.0, 0.0);
            }
            let bump = 0.5 * (1.0 + (2.0 * PI * u).cos());
            (1.0 - (1.0 - min_t) * bump, peak_phase * bump)
        }
        ObjectProfile::Tabulated { samples } => interpolate(samples, x),
    }
}

fn interpolate(samples: &[ProfileSample], x: f64) -> (f64, f64) {
    let first = samples[0];
    let last = samples[samples.len() - 1];
    if x <= first.x {
        return (first.t, first.phi);
    }
    if x >= last.x {
        return (last.t, last.phi);
    }
    // First sample strictly right of x; the table brackets x here.
    let hi = samples.partition_point(|s| s.x <= x);
    let (a, b) = (samples[hi - 1], samples[hi]);
    let w = (x - a.x) / (b.x - a.x);
    (a.t + w * (b.t - a.t), a.phi + w * (b.phi - a.phi))
}

/// Optical phase `2π(n − 1)·depth/λ` for a slab of index `n`.
pub fn phase_from_material(n: f64, depth: f64, wavelength: f64) -> f64 {
    2.0 * PI * (n - 1.0) * depth / wavelength
}

/// Parse the tabulated-profile text format: one `x_um t phi_rad` triple per
/// line, `#` starts a comment.
pub fn parse_profile(text: &str, source: &str) -> Result<Vec<ProfileSample>> {
    let mut samples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: source.to_string(),
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        }
        let mut vals = [0.0; 3];
        for (v, f) in vals.iter_mut().zip(&fields) {
            *v = f
                .parse()
                .map_err(|_| err(format!("not a number: {f:?}")))?;
        }
        let [x, t, phi] = vals;
        if let Some(prev) = samples.last().map(|s: &ProfileSample| s.x) {
            if x <= prev {
                return Err(err(format!("x = {x} does not increase (previous {prev})")));
            }
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(err(format!("t = {t} outside [0, 1]")));
        }
        if !x.is_finite() || !phi.is_finite() {
            return Err(err("non-finite value".into()));
        }
        samples.push(ProfileSample { x, t, phi });
    }
    if samples.is_empty() {
        return Err(Error::Parse {
            path: source.to_string(),
            line: 0,
            message: "profile has no samples".into(),
        });
    }
    Ok(samples)
}

pub fn read_profile(path: &Path) -> Result<Vec<ProfileSample>> {
    let text = std::fs::read_to_string(path)?;
    parse_profile(&text, &path.display().to_string())
}

/// Render samples in the profile text format. Values use shortest
/// round-trip formatting so re-reading is exact.
pub fn format_profile(samples: &[ProfileSample]) -> String {
    let mut out = String::from("# x_um t phi_rad\n");
    for s in samples {
        let _ = writeln!(out, "{} {} {}", s.x, s.t, s.phi);
    }
    out
}

pub fn write_profile(path: &Path, samples: &[ProfileSample]) -> Result<()> {
    std::fs::write(path, format_profile(samples))?;
    Ok(())
}
