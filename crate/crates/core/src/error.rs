use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the simulation and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its physical domain.
    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("truncation T = {0} is at or below the pole of the K-factor fit (T > 0.2161)")]
    TruncationAtPole(f64),

    #[error("truncation T = {truncation} gives a non-positive K factor ({k})")]
    NonPositiveK { truncation: f64, k: f64 },

    #[error("phase is undefined for an opaque sample (p_norm = 0)")]
    UndefinedPhase,

    #[error("inconsistent data: implied cos(phi) = {0} lies outside [-1, 1]")]
    InconsistentData(f64),

    #[error("efficiency undefined: p_ifm + p_abs = 0")]
    UndefinedEfficiency,

    #[error("profile has no feature above its baseline")]
    NoFeature,

    #[error("ambiguous feature: expected 2 half-maximum crossings, found {0}")]
    AmbiguousFeature(usize),

    #[error("transmission profile is not a knife edge: {0}")]
    NotAnEdge(String),

    #[error("scan mode mismatch: analysis needs {expected} scans, got {found}")]
    WrongMode {
        expected: &'static str,
        found: &'static str,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the scan-analysis routines (as opposed to bad
    /// input parameters or IO).
    pub fn is_analysis(&self) -> bool {
        matches!(
            self,
            Error::NoFeature
                | Error::AmbiguousFeature(_)
                | Error::NotAnEdge(_)
                | Error::WrongMode { .. }
                | Error::UndefinedPhase
                | Error::InconsistentData(_)
                | Error::UndefinedEfficiency
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_)) || matches!(self, Error::Csv(e) if e.is_io_error())
    }
}

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    domain: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain,
        })
    }
}
