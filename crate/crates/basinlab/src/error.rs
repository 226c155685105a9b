use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("chart point ({u}, {v}) outside chart window")]
    OutsideWindow { u: f64, v: f64 },
    #[error("projection undefined: point lies on the chart axis (x = z = 0)")]
    ProjectionUndefined,
    #[error("point off manifold: constraint residual {residual:e} exceeds {tol:e}")]
    OffManifold { residual: f64, tol: f64 },
    #[error("seed coincides with an excluded state-space point")]
    ExcludedSeed,
    #[error("numerical blowup: state became non-finite near t = {t}")]
    NumericalBlowup { t: f64 },
    #[error("invalid tubular width {width}: {reason}")]
    InvalidWidth { width: f64, reason: &'static str },
    #[error("empty complex: no cells kept")]
    EmptyComplex,
    #[error("unknown system id {0:?} (expected CIRCLE_R2, PUNCTURED_R2, CYLINDER_M0, or FUNNEL_M)")]
    UnknownSystem(String),
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("bad basin csv: {0}")]
    BadCsv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
