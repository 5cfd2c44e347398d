use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("discount {0} outside [0, 1)")]
    InvalidDiscount(f64),

    #[error("transition row ({state}, {action}) sums to {sum}, expected 1")]
    NotStochastic {
        state: usize,
        action: usize,
        sum: f64,
    },

    #[error("transition ({state}, {action}) -> {next} has invalid probability {prob}")]
    InvalidProbability {
        state: usize,
        action: usize,
        next: usize,
        prob: f64,
    },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("action gap is undefined for an MDP with a single action")]
    SingleAction,

    #[error("MDP has no non-terminal states")]
    NoDecisionStates,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular linear system")]
    Singular,

    #[error("linear program is {0}")]
    LpStatus(crate::lp::LpStatus),

    #[error("no correct reward exists in the class (best gap {delta:.3e})")]
    NoCorrectReward { delta: f64 },

    #[error("target policy cannot be induced with gap >= {floor} (best gap {best:.6})")]
    FloorUnreachable { floor: f64, best: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
