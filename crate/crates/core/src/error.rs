use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error(
        "connected-set enumeration refused: graph has {vertices} vertices but the cap for \
         non-path graphs is {cap}"
    )]
    EnumerationCap { vertices: usize, cap: usize },

    #[error("coloring is not convex: class of color {color} is disconnected")]
    NotConvex { color: u32 },

    #[error("not an integral feasible point: {0}")]
    InvalidPoint(String),

    #[error(
        "class-6 inequality needs |C'| <= |H| or |H| = 1 to be valid, got |C'| = {colors} \
         and |H| = {set_size}"
    )]
    Class6Precondition { colors: usize, set_size: usize },

    #[error("invalid color set: {0}")]
    InvalidColorSet(String),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("branch-and-bound node limit of {0} reached before proving optimality")]
    NodeLimit(usize),

    #[error("LP solve did not reach optimality: {0}")]
    Lp(String),

    #[error("time limit exceeded")]
    TimeLimit,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
