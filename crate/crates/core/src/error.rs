use thiserror::Error;

use crate::lattice::Rect;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty rectangle [{x_lo},{x_hi}]x[{y_lo},{y_hi}]")]
    EmptyRect { x_lo: i64, x_hi: i64, y_lo: i64, y_hi: i64 },
    #[error("{inner} is not contained in {outer}")]
    NotNested { inner: Rect, outer: Rect },
    #[error("site ({0}, {1}) lies outside the domain {2}")]
    SiteOutside(i64, i64, Rect),
    #[error("{0} is not internally filled")]
    NotFilled(Rect),
    #[error("configuration does not percolate its domain {0}")]
    NotPercolating(Rect),
    #[error("{0} is a single cell and cannot be split")]
    SingleCell(Rect),
    #[error("frame requires short(S) >= 2, got {0}")]
    ThinFrame(Rect),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("rectangle {rect} is too long for the hierarchy construction (limit {limit:.3})")]
    Oversize { rect: Rect, limit: f64 },
    #[error("hierarchy construction failed: {0}")]
    Construction(String),
    #[error("search space too large: {0}")]
    SearchTooLarge(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
