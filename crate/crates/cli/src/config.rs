//! Run configuration files.
//!
//! A config is TOML with up to five sections. Lengths are μm except the
//! beam-optics inputs, which are nm and mm as their key names say.
//!
//! ```toml
//! [interferometer]
//! t1 = 0.525
//! t2 = 0.462
//! visibility = 0.97
//! crosstalk = 0.0
//!
//! [beam]
//! fwhm_um = 9.1            # or wavelength_nm, focal_mm, aperture_mm, beam_mm
//!
//! [object]
//! kind = "wire"            # absent | knife_edge | wire | slit | filament | profile
//! center = 0.0
//! width = 95.5
//!
//! [scan]
//! start = -150.0
//! stop = 150.0
//! step = 0.91
//! mode = "coherent_convolved"
//!
//! [mc]
//! n = 1000000
//! seed = 42
//! ```

use std::ops::Range;
use std::path::{Path, PathBuf};

use ifimage_core::object::read_profile;
use ifimage_core::{
    spot_fwhm, BeamSpec, Drift, EvConfig, ObjectProfile, ScanMode, ScanPlan, SpotPrediction,
};
use serde::Deserialize;
use toml::Spanned;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    interferometer: Spanned<Interferometer>,
    beam: Option<Spanned<Beam>>,
    object: Option<Spanned<toml::Table>>,
    scan: Option<Spanned<Scan>>,
    mc: Option<Spanned<Mc>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Interferometer {
    t1: f64,
    t2: f64,
    #[serde(default = "one")]
    visibility: f64,
    #[serde(default)]
    crosstalk: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Beam {
    fwhm_um: Option<f64>,
    wavelength_nm: Option<f64>,
    focal_mm: Option<f64>,
    aperture_mm: Option<f64>,
    beam_mm: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Scan {
    start: f64,
    stop: f64,
    step: f64,
    #[serde(default = "default_mode")]
    mode: ScanMode,
    drift: Option<Drift>,
}

fn default_mode() -> ScanMode {
    ScanMode::CoherentConvolved
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mc {
    pub n: u64,
    pub seed: u64,
    #[serde(default)]
    pub position_um: f64,
    #[serde(default = "one_shard")]
    pub shards: u64,
}

fn one_shard() -> u64 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileRef {
    #[allow(dead_code)]
    kind: String,
    path: PathBuf,
}

/// How the beam spot was specified.
#[derive(Debug, Clone, Copy)]
pub struct BeamSetup {
    pub fwhm_um: f64,
    pub predicted: Option<SpotPrediction>,
}

/// A parsed and validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub interferometer: EvConfig,
    pub beam: Option<BeamSetup>,
    pub object: Option<ObjectProfile>,
    pub scan: Option<ScanPlan>,
    pub mc: Option<Mc>,
}

struct Source<'a> {
    path: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn line_of(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    fn err(&self, span: Option<Range<usize>>, message: impl std::fmt::Display) -> CliError {
        let line = span.map_or(1, |s| self.line_of(s.start));
        CliError::Usage(format!("{}:{line}: {message}", self.path))
    }

    /// Line of `key = ...` in the section starting at `span`, falling back
    /// to the section header.
    fn key_err(&self, span: &Range<usize>, key: &str, message: impl std::fmt::Display) -> CliError {
        let body = &self.text[span.start.min(self.text.len())..];
        let mut offset = 0;
        for (i, line) in body.split_inclusive('\n').enumerate() {
            let trimmed = line.trim_start();
            if i > 0 && trimmed.starts_with('[') {
                break;
            }
            if let Some(rest) = trimmed.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return self.err(Some(span.start + offset..span.start + offset), message);
                }
            }
            offset += line.len();
        }
        self.err(Some(span.clone()), message)
    }
}

fn domain_key(e: &ifimage_core::Error) -> Option<&'static str> {
    match e {
        ifimage_core::Error::Domain { name, .. } => Some(name),
        _ => None,
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, &path.display().to_string(), base)
    }

    /// Parse config text; relative profile paths resolve against `base`.
    pub fn parse(text: &str, source: &str, base: &Path) -> Result<Self, CliError> {
        let src = Source { path: source, text };
        let raw: RawConfig = toml::from_str(text).map_err(|e| src.err(e.span(), e.message()))?;

        let span = raw.interferometer.span();
        let ifm = raw.interferometer.into_inner();
        let interferometer = EvConfig {
            t1: ifm.t1,
            t2: ifm.t2,
            visibility: ifm.visibility,
            crosstalk_eps: ifm.crosstalk,
        };
        interferometer.validate().map_err(|e| {
            let key = match domain_key(&e) {
                Some("crosstalk_eps") => "crosstalk",
                Some(k) => k,
                None => "",
            };
            src.key_err(&span, key, &e)
        })?;

        let beam = match raw.beam {
            None => None,
            Some(b) => {
                let span = b.span();
                Some(beam_setup(b.into_inner()).map_err(|(key, msg)| src.key_err(&span, key, msg))?)
            }
        };

        let object = match raw.object {
            None => None,
            Some(table) => {
                let span = table.span();
                let table = table.into_inner();
                let profile = if table.get("kind").and_then(|k| k.as_str()) == Some("profile") {
                    let r: ProfileRef = table
                        .try_into()
                        .map_err(|e: toml::de::Error| src.err(Some(span.clone()), e.message()))?;
                    let file = base.join(&r.path);
                    let samples = read_profile(&file).map_err(|e| match e {
                        ifimage_core::Error::Io(io) => CliError::Io(format!("{}: {io}", file.display())),
                        other => CliError::Usage(other.to_string()),
                    })?;
                    ObjectProfile::Tabulated { samples }
                } else {
                    table
                        .try_into::<ObjectProfile>()
                        .map_err(|e| src.err(Some(span.clone()), format!("[object] {}", e.message())))?
                };
                profile.validate().map_err(|e| {
                    src.key_err(&span, domain_key(&e).unwrap_or(""), &e)
                })?;
                Some(profile)
            }
        };

        let scan = match raw.scan {
            None => None,
            Some(s) => {
                let span = s.span();
                let s = s.into_inner();
                let mut plan = ScanPlan::new(s.start, s.stop, s.step, s.mode)
                    .map_err(|e| src.key_err(&span, domain_key(&e).unwrap_or(""), &e))?;
                if let Some(drift) = s.drift {
                    plan = plan
                        .with_drift(drift)
                        .map_err(|e| src.key_err(&span, domain_key(&e).unwrap_or(""), &e))?;
                }
                Some(plan)
            }
        };

        let mc = match raw.mc {
            None => None,
            Some(m) => {
                let span = m.span();
                let m = m.into_inner();
                if m.n == 0 {
                    return Err(src.key_err(&span, "n", "n must be at least 1"));
                }
                if m.shards == 0 {
                    return Err(src.key_err(&span, "shards", "shards must be at least 1"));
                }
                Some(m)
            }
        };

        Ok(RunConfig {
            interferometer,
            beam,
            object,
            scan,
            mc,
        })
    }

    pub fn require_scan(&self) -> Result<(ScanPlan, ObjectProfile, f64), CliError> {
        let missing = |s: &str| CliError::Usage(format!("config has no [{s}] section"));
        let plan = self.scan.ok_or_else(|| missing("scan"))?;
        let object = self.object.clone().ok_or_else(|| missing("object"))?;
        let beam = self.beam.ok_or_else(|| missing("beam"))?;
        Ok((plan, object, beam.fwhm_um))
    }
}

fn beam_setup(b: Beam) -> Result<BeamSetup, (&'static str, String)> {
    let optics = [b.wavelength_nm, b.focal_mm, b.aperture_mm, b.beam_mm];
    match (b.fwhm_um, optics) {
        (Some(_), o) if o.iter().any(Option::is_some) => Err((
            "fwhm_um",
            "give either fwhm_um or the beam-optics inputs, not both".into(),
        )),
        (Some(fwhm), _) => {
            if fwhm.is_finite() && fwhm > 0.0 {
                Ok(BeamSetup {
                    fwhm_um: fwhm,
                    predicted: None,
                })
            } else {
                Err(("fwhm_um", format!("fwhm_um = {fwhm} must be positive")))
            }
        }
        (None, [Some(wl), Some(f), Some(ap), Some(bm)]) => {
            let spec = BeamSpec {
                wavelength: wl * 1e-9,
                focal_length: f * 1e-3,
                aperture_diameter: ap * 1e-3,
                input_beam_diameter: bm * 1e-3,
            };
            let spot = spot_fwhm(&spec).map_err(|e| ("beam_mm", e.to_string()))?;
            Ok(BeamSetup {
                fwhm_um: spot.fwhm * 1e6,
                predicted: Some(spot),
            })
        }
        _ => Err((
            "",
            "[beam] needs fwhm_um, or all of wavelength_nm, focal_mm, aperture_mm, beam_mm".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, CliError> {
        RunConfig::parse(text, "test.toml", Path::new("."))
    }

    const WIRE: &str = r#"
[interferometer]
t1 = 0.525
t2 = 0.462

[beam]
fwhm_um = 9.1

[object]
kind = "wire"
center = 0.0
width = 95.5

[scan]
start = -150.0
stop = 150.0
step = 0.91
"#;

    #[test]
    fn parses_a_full_config() {
        let cfg = parse(WIRE).unwrap();
        assert_eq!(cfg.interferometer.visibility, 1.0);
        assert_eq!(cfg.object, Some(ObjectProfile::Wire { center: 0.0, width: 95.5 }));
        assert_eq!(cfg.scan.unwrap().mode, ScanMode::CoherentConvolved);
        assert_eq!(cfg.beam.unwrap().fwhm_um, 9.1);
    }

    fn message(text: &str) -> String {
        match parse(text).unwrap_err() {
            CliError::Usage(m) => m,
            other => panic!("expected a usage error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let m = message(&WIRE.replace("t2 = 0.462", "t2 = 0.462\ncolour = 3"));
        assert!(m.starts_with("test.toml:5:"), "{m}");
    }

    #[test]
    fn domain_errors_point_at_the_key() {
        let m = message(&WIRE.replace("t2 = 0.462", "t2 = 1.5"));
        assert!(m.starts_with("test.toml:4:"), "{m}");
        let m = message(&WIRE.replace("step = 0.91", "step = -1"));
        assert!(m.starts_with("test.toml:17:"), "{m}");
    }

    #[test]
    fn beam_optics_inputs_predict_the_spot() {
        let text = WIRE.replace(
            "fwhm_um = 9.1",
            "wavelength_nm = 670\nfocal_mm = 60\naperture_mm = 5\nbeam_mm = 25",
        );
        let beam = parse(&text).unwrap().beam.unwrap();
        assert!((beam.fwhm_um - 8.302).abs() < 1e-3);
        assert!(message(&WIRE.replace("fwhm_um = 9.1", "fwhm_um = 9.1\nbeam_mm = 3")).contains("not both"));
    }

    #[test]
    fn profile_objects_load_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("p.txt"), "0 1 0\n10 0.5 1\n").unwrap();
        let text = WIRE.replace(
            "kind = \"wire\"\ncenter = 0.0\nwidth = 95.5",
            "kind = \"profile\"\npath = \"p.txt\"",
        );
        let cfg = RunConfig::parse(&text, "t.toml", dir.path()).unwrap();
        assert!(matches!(cfg.object, Some(ObjectProfile::Tabulated { ref samples }) if samples.len() == 2));
    }
}
