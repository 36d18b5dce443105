use std::path::Path;

use ifimage_core::io::{read_scan, write_scan, write_sweep_csv};
use ifimage_core::{
    amplitude_at, efficiency_sweep, knife_edge_resolution, monte_carlo_sharded, measure,
    phase_profile, reflectance_grid, run_scan, spot_fwhm, width_fwhm, AnalysisReport, BeamSpec,
    Channel, EvConfig, ObjectSample, OutcomeTally, ProbabilityTriple, ScanResult, SweepTable,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::plot::{line_plot, Series};
use crate::{io_err, AnalysisKind, ChannelArg, CliError, Output};

pub fn scan(out: &Output, config: &Path, output: &Path, plot: bool) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let (plan, object, fwhm) = cfg.require_scan()?;
    if let Some(spot) = cfg.beam.and_then(|b| b.predicted) {
        println!("predicted spot: K = {:.4}, fwhm {:.3} um", spot.k_factor, spot.fwhm * 1e6);
    }
    let result = run_scan(&plan, &cfg.interferometer, &object, fwhm)?;
    let path = write_scan_files(out, output, &result, plot)?;
    println!("{} records -> {}", result.records.len(), path.display());
    Ok(())
}

/// Write the CSV, its sidecar and optionally an SVG. Returns the CSV path.
pub fn write_scan_files(out: &Output, output: &Path, scan: &ScanResult, plot: bool) -> Result<std::path::PathBuf, CliError> {
    let path = out.resolve(output);
    out.ensure_parent(&path)?;
    write_scan(&path, scan)?;
    if plot {
        let svg = scan_plot(&format!("{} scan", scan.metadata.object.kind()), scan);
        out.write(&output.with_extension("svg"), svg)?;
    }
    Ok(path)
}

pub fn scan_plot(title: &str, scan: &ScanResult) -> String {
    let x: Vec<f64> = scan.records.iter().map(|r| r.x_um).collect();
    let ifm: Vec<f64> = scan.records.iter().map(|r| r.p_ifm).collect();
    let norm: Vec<f64> = scan.records.iter().map(|r| r.p_norm).collect();
    line_plot(
        title,
        "stage position (um)",
        &x,
        &Series { label: "P_ifm", y: &ifm, color: "#c0392b" },
        Some(&Series { label: "P_norm", y: &norm, color: "#2c3e50" }),
    )
}

pub fn sweep_table(eps: f64, points: usize, r_min: f64, r_max: f64) -> Result<SweepTable, CliError> {
    if points == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    if r_min.partial_cmp(&r_max) != Some(std::cmp::Ordering::Less) {
        return Err(CliError::Usage(format!("--r-min {r_min} must be below --r-max {r_max}")));
    }
    EvConfig::new(0.5, 0.5, 1.0, eps)?;
    Ok(efficiency_sweep(&reflectance_grid(r_min, r_max, points), &ObjectSample::opaque(), eps)?)
}

pub fn sweep_csv(table: &SweepTable) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, table)?;
    Ok(buf)
}

pub fn sweep_plot(title: &str, table: &SweepTable) -> String {
    let r: Vec<f64> = table.rows.iter().map(|row| row.r).collect();
    let eta: Vec<f64> = table.rows.iter().map(|row| row.eta).collect();
    let p: Vec<f64> = table.rows.iter().map(|row| row.p_ifm).collect();
    line_plot(
        title,
        "reflectance R",
        &r,
        &Series { label: "efficiency", y: &eta, color: "#c0392b" },
        Some(&Series { label: "P_ifm", y: &p, color: "#2c3e50" }),
    )
}

pub fn sweep(out: &Output, eps: f64, points: usize, r_min: f64, r_max: f64, output: &Path, plot: bool) -> Result<(), CliError> {
    let table = sweep_table(eps, points, r_min, r_max)?;
    let path = out.write(output, sweep_csv(&table)?)?;
    if plot {
        out.write(&output.with_extension("svg"), sweep_plot(&format!("efficiency sweep, eps = {eps}"), &table))?;
    }
    println!("{} rows -> {}", table.rows.len(), path.display());
    Ok(())
}

#[derive(Serialize)]
struct McReport {
    #[serde(flatten)]
    tally: OutcomeTally,
    position_um: f64,
    frequencies: [f64; 3],
    probabilities: ProbabilityTriple,
}

pub fn mc(
    out: &Output,
    config: &Path,
    n: Option<u64>,
    seed: Option<u64>,
    shards: Option<u64>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let object = cfg
        .object
        .as_ref()
        .ok_or_else(|| CliError::Usage("config has no [object] section".into()))?;
    let section = cfg.mc;
    let n = n
        .or(section.map(|m| m.n))
        .ok_or_else(|| CliError::Usage("photon count missing: pass --n or set [mc] n".into()))?;
    let seed = seed
        .or(section.map(|m| m.seed))
        .ok_or_else(|| CliError::Usage("seed missing: pass --seed or set [mc] seed".into()))?;
    let shards = shards.or(section.map(|m| m.shards)).unwrap_or(1);
    let position_um = section.map_or(0.0, |m| m.position_um);

    let (t, phi) = amplitude_at(object, position_um);
    let sample = ObjectSample::new(t, phi)?;
    let tally = monte_carlo_sharded(&cfg.interferometer, &sample, n, seed, shards)?;
    let report = McReport {
        tally,
        position_um,
        frequencies: tally.frequencies(),
        probabilities: measure(&cfg.interferometer, &sample),
    };
    emit_json(out, output, &report)
}

fn emit_json<T: Serialize>(out: &Output, output: Option<&Path>, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))? + "\n";
    match output {
        Some(p) => {
            out.write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn analyze(
    out: &Output,
    scan_path: &Path,
    kind: AnalysisKind,
    channel: ChannelArg,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let scan = read_scan(scan_path).map_err(|e| match e {
        ifimage_core::Error::Io(io) => io_err(scan_path)(io),
        other => CliError::from(other),
    })?;
    let mut report = AnalysisReport::default();
    match kind {
        AnalysisKind::Width => {
            let channels: &[Channel] = match channel {
                ChannelArg::Transmission => &[Channel::Transmission],
                ChannelArg::Ifm => &[Channel::Ifm],
                ChannelArg::Both => &[Channel::Transmission, Channel::Ifm],
            };
            for &c in channels {
                report.widths.push(width_fwhm(&scan, c)?);
            }
        }
        AnalysisKind::Edge => report.resolution = Some(knife_edge_resolution(&scan)?),
        AnalysisKind::Phase => {
            report.phase_profile = Some(phase_profile(&scan, &scan.metadata.config)?)
        }
    }
    emit_json(out, output, &report)
}

pub fn spot(wavelength_nm: f64, focal_mm: f64, aperture_mm: f64, beam_mm: f64) -> Result<(), CliError> {
    let spec = BeamSpec {
        wavelength: wavelength_nm * 1e-9,
        focal_length: focal_mm * 1e-3,
        aperture_diameter: aperture_mm * 1e-3,
        input_beam_diameter: beam_mm * 1e-3,
    };
    let spot = spot_fwhm(&spec)?;
    println!("truncation T = {}", spec.truncation());
    println!("K = {:.6}", spot.k_factor);
    println!("d = {:.4} um", spot.fwhm * 1e6);
    println!("d_R = {:.4} um", spot.rayleigh_resolution * 1e6);
    Ok(())
}
