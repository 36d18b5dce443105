//! Reference outputs: wire, knife-edge, absent-object and fiber scans, the
//! efficiency sweeps with and without cross-talk, and a desk-scale width
//! table. Everything is deterministic. Stage steps are fwhm/10, except the
//! knife edge, which uses 0.5 um.

use std::fmt::Write as _;
use std::path::Path;

use ifimage_core::{
    knife_edge_resolution, phase_profile, run_scan, width_fwhm, Channel, EvConfig, ObjectProfile,
    ResolutionEstimate, ScanMode, ScanPlan, Side, WidthEstimate,
};
use serde::Serialize;

use crate::commands::{scan_plot, sweep_csv, sweep_plot, sweep_table, write_scan_files};
use crate::{CliError, Output};

const FWHM: f64 = 9.1;
const STEP: f64 = FWHM / 10.0;
const EDGE_STEP: f64 = 0.5;
const WIDTHS: [f64; 5] = [20.0, 50.0, 95.5, 159.1, 207.9];

#[derive(Serialize)]
struct WidthRow {
    true_width_um: f64,
    transmission: WidthEstimate,
    ifm: WidthEstimate,
    transmission_error: f64,
    ifm_error: f64,
}

#[derive(Serialize)]
struct WidthReport {
    beam_fwhm_um: f64,
    step_um: f64,
    rows: Vec<WidthRow>,
    knife_edge: ResolutionEstimate,
}

fn wire_config() -> EvConfig {
    EvConfig {
        t1: 0.525,
        t2: 0.462,
        visibility: 0.97,
        crosstalk_eps: 0.0,
    }
}

fn plan(start: f64, stop: f64, mode: ScanMode) -> Result<ScanPlan, CliError> {
    Ok(ScanPlan::new(start, stop, STEP, mode)?)
}

fn save(out: &Output, dir: &Path, name: &str, title: &str, scan: &ifimage_core::ScanResult) -> Result<(), CliError> {
    write_scan_files(out, &dir.join(format!("{name}.csv")), scan, false)?;
    out.write(&dir.join(format!("{name}.svg")), scan_plot(title, scan))?;
    Ok(())
}

pub fn run(out: &Output, dir: &Path) -> Result<(), CliError> {
    let cfg = wire_config();
    let mut summary = String::new();

    let wire = run_scan(
        &plan(-150.0, 150.0, ScanMode::CoherentConvolved)?,
        &cfg,
        &ObjectProfile::Wire { center: 0.0, width: 95.5 },
        FWHM,
    )?;
    save(out, dir, "wire_scan", "95.5 um wire", &wire)?;

    let edge_scan = run_scan(
        &ScanPlan::new(-40.0, 40.0, EDGE_STEP, ScanMode::CoherentConvolved)?,
        &cfg,
        &ObjectProfile::KnifeEdge { edge_position: 0.0, blocks_side: Side::Left },
        FWHM,
    )?;
    save(out, dir, "knife_edge_scan", "knife edge", &edge_scan)?;
    let knife_edge = knife_edge_resolution(&edge_scan)?;

    let absent_cfg = EvConfig { t1: 0.5, t2: 0.5, visibility: 0.933, crosstalk_eps: 0.0 };
    let absent = run_scan(&plan(-50.0, 50.0, ScanMode::CoherentConvolved)?, &absent_cfg, &ObjectProfile::Absent, FWHM)?;
    save(out, dir, "absent_scan", "no object, V = 0.933", &absent)?;

    // Illustrative semi-transparent fiber; not fitted to any measured trace.
    let fiber_cfg = EvConfig { t1: 0.5, t2: 0.5, visibility: 1.0, crosstalk_eps: 0.0 };
    let fiber = run_scan(
        &plan(-60.0, 60.0, ScanMode::PointSampled)?,
        &fiber_cfg,
        &ObjectProfile::Filament { center: 0.0, width: 60.0, min_t: 0.83, peak_phase: 1.81 },
        FWHM,
    )?;
    save(out, dir, "fiber_scan", "illustrative fiber", &fiber)?;
    let phases = phase_profile(&fiber, &fiber_cfg)?;
    out.write(&dir.join("fiber_phase.json"), to_json(&phases)? + "\n")?;

    for (eps, name) in [(0.0, "sweep_eps0"), (0.01, "sweep_eps0.01")] {
        let table = sweep_table(eps, 99, 0.01, 0.99)?;
        out.write(&dir.join(format!("{name}.csv")), sweep_csv(&table)?)?;
        out.write(&dir.join(format!("{name}.svg")), sweep_plot(&format!("efficiency sweep, eps = {eps}"), &table))?;
    }

    let mut rows = Vec::new();
    let mut csv = String::from("true_width_um,transmission_um,ifm_um\n");
    for w in WIDTHS {
        let scan = run_scan(
            &plan(-1.5 * w - 40.0, 1.5 * w + 40.0, ScanMode::CoherentConvolved)?,
            &cfg,
            &ObjectProfile::Wire { center: 0.0, width: w },
            FWHM,
        )?;
        let transmission = width_fwhm(&scan, Channel::Transmission)?;
        let ifm = width_fwhm(&scan, Channel::Ifm)?;
        let _ = writeln!(csv, "{w},{:.4},{:.4}", transmission.fwhm, ifm.fwhm);
        let _ = writeln!(summary, "width {w:>6} um: transmission {:.2}, ifm {:.2}", transmission.fwhm, ifm.fwhm);
        rows.push(WidthRow {
            true_width_um: w,
            transmission_error: (transmission.fwhm - w) / w,
            ifm_error: (ifm.fwhm - w) / w,
            transmission,
            ifm,
        });
    }
    out.write(&dir.join("wire_widths.csv"), csv)?;
    let report = WidthReport { beam_fwhm_um: FWHM, step_um: STEP, rows, knife_edge };
    out.write(&dir.join("wire_widths.json"), to_json(&report)? + "\n")?;

    let _ = writeln!(
        summary,
        "knife edge: spot {:.3} um, rayleigh {:.3} um",
        knife_edge.spot_fwhm, knife_edge.rayleigh
    );
    print!("{summary}");
    println!("outputs in {}", out.resolve(dir).display());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))
}
