use thiserror::Error;

/// Failures raised by the numerical core.
///
/// Every variant corresponds to a point where a phase, a quotient or a
/// pointer reading stops being defined; the routines refuse to return noise.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("hbar must be positive and finite (got {0})")]
    InvalidHbar(f64),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("degenerate triangle: pairwise overlap {overlap:.3e} below {tolerance:.0e}")]
    DegenerateTriangle { overlap: f64, tolerance: f64 },

    #[error("degenerate bracket: magnitude {magnitude:.3e} below {tolerance:.0e}")]
    DegenerateBracket { magnitude: f64, tolerance: f64 },

    #[error("post-selected state is orthogonal to pre-selected state (overlap {0:.3e})")]
    OrthogonalSelection(f64),

    #[error("post-selected stage requested but no post-selection state was given")]
    MissingPostSelection,

    #[error("fringe visibility vanishes (cross term {0:.3e}); constructive phase undefined")]
    ZeroVisibility(f64),

    #[error("scan grid must have at least 16 points (got {0})")]
    ScanGridTooSmall(usize),

    #[error("post-selection success probability {0:.3e} is below 1e-12")]
    PostSelectionVanished(f64),

    #[error("probe phase advances {advance:.3} rad per grid step at p = {at:.6e} (limit pi/4)")]
    GridTooCoarse { advance: f64, at: f64 },

    #[error("invalid probe: {0}")]
    InvalidProbe(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short snake-case tag used in result-table status columns and
    /// diagnostic lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroVector => "zero_vector",
            Error::NotHermitian(_) => "not_hermitian",
            Error::InvalidHbar(_) => "invalid_hbar",
            Error::NonFinite(_) => "non_finite",
            Error::DegenerateTriangle { .. } => "degenerate_triangle",
            Error::DegenerateBracket { .. } => "degenerate_bracket",
            Error::OrthogonalSelection(_) => "orthogonal_selection",
            Error::MissingPostSelection => "missing_post_selection",
            Error::ZeroVisibility(_) => "zero_visibility",
            Error::ScanGridTooSmall(_) => "scan_grid_too_small",
            Error::PostSelectionVanished(_) => "post_selection_vanished",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::InvalidProbe(_) => "invalid_probe",
        }
    }
}
