use thiserror::Error;

/// Errors raised by library operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("growth overflow: exponent {exponent} exceeds the limit {limit}")]
    GrowthOverflow { exponent: f64, limit: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("double description supports dimension at most {max}, got {dimension}")]
    UnsupportedDimension { dimension: usize, max: usize },

    #[error("operation requires a nonempty set")]
    EmptySet,

    #[error(
        "inadmissible smoothing width {width}: term {term}, axis {axis} gives \
         lambda*N = {product} within tolerance of 2*pi*{multiple}"
    )]
    InadmissibleWidth {
        width: f64,
        term: usize,
        axis: usize,
        product: f64,
        multiple: i64,
    },

    #[error("frequency {0:?} lies in the spectrum")]
    InSpectrum(Vec<f64>),

    #[error("degenerate linear map: |det| = {0:e}")]
    DegenerateMap(f64),

    #[error("no integer reconstruction for frequency {frequency:?} within tolerance {tolerance:e}")]
    Reconstruction { frequency: Vec<f64>, tolerance: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("every sample was excluded")]
    AllSamplesExcluded,

    #[error("empty search grid")]
    EmptyGrid,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
