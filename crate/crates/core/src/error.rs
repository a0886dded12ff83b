use thiserror::Error;

/// Errors produced by the phase-plane and profile machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma must be > 1, got {0}")]
    BadGamma(f64),
    #[error("blowup speed r = {r} outside admissible bracket ({lo}, {hi})")]
    BadSpeed { r: f64, lo: f64, hi: f64 },
    #[error("cubic discriminant negative at S = {s}: middle roots are complex")]
    ComplexRoots { s: f64 },
    #[error("no sonic point with S in (0,1); r outside the shooting regime")]
    NoSonicPoint,
    #[error("local series coefficients diverge at order {order} (|c| = {magnitude:.3e})")]
    SeriesDivergence { order: usize, magnitude: f64 },
    #[error("adaptive step size underflow at x = {x} (h = {h:.3e})")]
    StepFailure { x: f64, h: f64 },
    #[error("shooting discriminator has no sign change on [{lo}, {hi}] (classes {class_lo:?} / {class_hi:?})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        class_lo: String,
        class_hi: String,
    },
    #[error("requested grid [{lo}, {hi}] extends past integrated range [{have_lo}, {have_hi}]")]
    GridOutOfRange {
        lo: f64,
        hi: f64,
        have_lo: f64,
        have_hi: f64,
    },
    #[error("profile property violated: {which} at xi = {xi} (value {value:.6e})")]
    PropertyViolation {
        which: &'static str,
        xi: f64,
        value: f64,
    },
    #[error("weight cascade failed: no admissible value for {param}")]
    CascadeFailure { param: &'static str },
    #[error("inequality {which} violated at xi = {xi} (ell = {ell}, value {value:.6e})")]
    InequalityViolation {
        which: &'static str,
        xi: f64,
        ell: usize,
        value: f64,
    },
    #[error("no (C-bar, R4) within search caps certifies all samples")]
    SearchExhausted,
    #[error("dense eigensolver failed to converge (n = {n})")]
    EigSolverFailure { n: usize },
    #[error("CFL violation: ds = {ds:.3e} exceeds limit {limit:.3e}")]
    CflViolation { ds: f64, limit: f64 },
    #[error("vacuum breach: Sigma = {sigma:.6e} at xi = {xi}, s = {s}")]
    VacuumBreach { xi: f64, sigma: f64, s: f64 },
    #[error("NaN detected in field {field} at s = {s}")]
    NanDetected { field: &'static str, s: f64 },
    #[error("time t = {t} outside [0, T) with T = {t_blowup}")]
    TimeOutOfRange { t: f64, t_blowup: f64 },
    #[error("series not strictly positive on the fit window")]
    NonPositiveSeries,
    #[error("diagnostics cover {decades:.2} decades of T-t; need at least {needed}")]
    InsufficientRange { decades: f64, needed: f64 },
    #[error("missing upstream artifact: {0}")]
    MissingArtifact(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("malformed file {path}: {reason}")]
    BadFile { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
