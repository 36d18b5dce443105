//! File formats: scan CSV (+ JSON metadata sidecar) and sweep CSV.
//!
//! Numbers are written in scientific notation with 12 fractional digits
//! (13 significant digits).

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::analysis::{SweepRow, SweepTable};
use crate::error::{Error, Result};
use crate::scan::{ScanMetadata, ScanRecord, ScanResult};

pub const SCAN_HEADER: [&str; 5] = ["x_um", "p_norm", "p_ifm", "p_abs", "p_noresult"];
pub const SWEEP_HEADER: [&str; 3] = ["r", "p_ifm", "eta"];

pub fn fmt_num(v: f64) -> String {
    format!("{v:.12e}")
}

/// Sidecar path for a scan CSV: `scan.csv` → `scan.meta.json`.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

pub fn write_scan_csv<W: Write>(out: W, records: &[ScanRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCAN_HEADER)?;
    for r in records {
        w.write_record([r.x_um, r.p_norm, r.p_ifm, r.p_abs, r.p_noresult].map(fmt_num))?;
    }
    w.flush()?;
    Ok(())
}

fn check_header(found: &csv::StringRecord, expected: &[&str], source: &str) -> Result<()> {
    if found.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Parse {
            path: source.to_string(),
            line: 1,
            message: format!("expected header {:?}", expected.join(",")),
        });
    }
    Ok(())
}

fn parse_rows<const N: usize>(text: &[u8], header: &[&str; N], source: &str) -> Result<Vec<[f64; N]>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text);
    check_header(rdr.headers()?, header, source)?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != N {
            return Err(Error::Parse {
                path: source.to_string(),
                line,
                message: format!("expected {N} fields, found {}", rec.len()),
            });
        }
        let mut row = [0.0; N];
        for (slot, field) in row.iter_mut().zip(rec.iter()) {
            *slot = field.trim().parse().map_err(|_| Error::Parse {
                path: source.to_string(),
                line,
                message: format!("not a number: {field:?}"),
            })?;
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn parse_scan_csv(text: &[u8], source: &str) -> Result<Vec<ScanRecord>> {
    Ok(parse_rows(text, &SCAN_HEADER, source)?
        .into_iter()
        .map(|[x_um, p_norm, p_ifm, p_abs, p_noresult]| ScanRecord {
            x_um,
            p_norm,
            p_ifm,
            p_abs,
            p_noresult,
        })
        .collect())
}

/// Write `scan.csv` and its metadata sidecar.
pub fn write_scan(path: &Path, scan: &ScanResult) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_scan_csv(std::io::BufWriter::new(file), &scan.records)?;
    let meta = serde_json::to_string_pretty(&scan.metadata)?;
    std::fs::write(metadata_path(path), meta + "\n")?;
    Ok(())
}

/// Read a scan CSV and its sidecar.
pub fn read_scan(path: &Path) -> Result<ScanResult> {
    let text = std::fs::read(path)?;
    let records = parse_scan_csv(&text, &path.display().to_string())?;
    let meta_text = std::fs::read_to_string(metadata_path(path))?;
    let metadata: ScanMetadata = serde_json::from_str(&meta_text)?;
    Ok(ScanResult { records, metadata })
}

pub fn write_sweep_csv<W: Write>(out: W, table: &SweepTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in &table.rows {
        w.write_record([row.r, row.p_ifm, row.eta].map(fmt_num))?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_sweep_csv(text: &[u8], source: &str) -> Result<SweepTable> {
    Ok(SweepTable {
        rows: parse_rows(text, &SWEEP_HEADER, source)?
            .into_iter()
            .map(|[r, p_ifm, eta]| SweepRow { r, p_ifm, eta })
            .collect(),
    })
}
