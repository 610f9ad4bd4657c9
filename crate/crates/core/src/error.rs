use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A degree distribution failed validation.
    InvalidDistribution(String),
    /// A perturbation or construction pushed a coefficient outside [0, 1].
    CoefficientRange { degree: u32, value: f64 },
    /// The channel parameter is below T_2; no convergent ensemble exists for this check side.
    InfeasibleChannel { eps: f64, t2: f64 },
    /// The target rate violates R < 1 - 2/d̄_c.
    InfeasibleRate { rate: f64, limit: f64 },
    /// Check side concentrated on degree 2 (or otherwise degenerate) for series work.
    DegenerateCheckDistribution(String),
    /// Power-series inversion lost positivity at the given index.
    SeriesDegradation { index: usize, value: f64 },
    /// A required maximum degree exceeds the search limit.
    DegreeLimit { limit: usize },
    /// A scalar parameter is out of its admissible range.
    Parameter { name: &'static str, reason: String },
    /// The linear program has no feasible point.
    Infeasible(String),
    /// The linear program is unbounded or the solver stalled.
    Solver(String),
    /// Malformed input document.
    Parse(String),
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for the two design-infeasibility conditions that are fixed by changing ρ.
    pub fn is_infeasible_design(&self) -> bool {
        matches!(
            self,
            Error::InfeasibleChannel { .. } | Error::InfeasibleRate { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDistribution(msg) => write!(f, "invalid degree distribution: {msg}"),
            Error::CoefficientRange { degree, value } => write!(
                f,
                "coefficient of degree {degree} would be {value}, outside [0, 1]"
            ),
            Error::InfeasibleChannel { eps, t2 } => write!(
                f,
                "channel parameter {eps} is below T_2 = {t2}; decrease T_2 by increasing the \
                 average check node degree (modify rho)"
            ),
            Error::InfeasibleRate { rate, limit } => write!(
                f,
                "rate {rate} is not below 1 - 2/d_c = {limit}; increase the average check node \
                 degree (modify rho)"
            ),
            Error::DegenerateCheckDistribution(msg) => {
                write!(f, "degenerate check distribution: {msg}")
            }
            Error::SeriesDegradation { index, value } => write!(
                f,
                "series inversion lost positivity at T_{index} = {value:e}"
            ),
            Error::DegreeLimit { limit } => {
                write!(f, "required maximum degree exceeds the search limit {limit}")
            }
            Error::Parameter { name, reason } => write!(f, "parameter `{name}`: {reason}"),
            Error::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            Error::Solver(msg) => write!(f, "solver failure: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e))
    }
}
