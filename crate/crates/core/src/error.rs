use alloc::string::String;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("zeta has a pole at s = 1")]
    Pole,
    #[error("tolerance {tol:e} unattainable at height t = {t}")]
    Precision { t: f64, tol: f64 },
    #[error("|zeta(s)| = {modulus:e} is below the guard threshold at t = {t}")]
    NearZero { t: f64, modulus: f64 },
    #[error("could not separate sign changes of Z(t) in [{lo}, {hi}]")]
    Refinement { lo: f64, hi: f64 },
    #[error("zero list is complete up to height {covered} but {required} is required")]
    Coverage { required: f64, covered: f64 },
    #[error("series diverges for sigma = {0} (need sigma > 1/2)")]
    Divergence(f64),
    #[error("psi = {0} is out of regime (need psi > 1)")]
    OutOfRegime(f64),
    #[error("coefficient map exceeded the budget of {budget} entries")]
    Capacity { budget: usize },
    #[error("table bound {requested} exceeds the configured cap {cap}")]
    TableCap { requested: f64, cap: f64 },
    #[error("window {window} too small, neglected tail is about {tail:e}")]
    Window { window: f64, tail: f64 },
    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),
    #[error("sample set has no usable samples")]
    Empty,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
