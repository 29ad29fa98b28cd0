use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Angle arithmetic received a NaN or infinite value.
    #[error("angle is not finite: {value}")]
    NonFiniteAngle { value: f64 },

    /// A bearing was requested between coincident points.
    #[error("bearing is undefined: points coincide")]
    DegenerateBearing,

    /// The lower bound of an empty feasible range was requested.
    #[error("no feasible direction: range is empty")]
    NoFeasibleDirection,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A scenario failed one of its validity preconditions; the message
    /// names the violated constraint.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("random placement failed after {attempts} attempts; enlarge the sampling box")]
    SamplingExhausted { attempts: u64 },

    /// A planner error tagged with the agent it occurred for.
    #[error("planning failed for agent {agent}")]
    Planning {
        agent: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed {what} file '{path}': {detail}")]
    FileFormat {
        what: &'static str,
        path: String,
        detail: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
