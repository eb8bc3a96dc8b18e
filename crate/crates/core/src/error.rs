use thiserror::Error;

pub type Result<T, E = GeomError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("convexity violation at direction {direction:?}: restricted Hessian eigenvalue {eigenvalue:e} <= {threshold:e}")]
    ConvexityViolation {
        direction: [f64; 3],
        eigenvalue: f64,
        threshold: f64,
    },

    #[error("index error: k = {k} but must lie in 0..={n}")]
    Index { k: usize, n: usize },

    #[error("open mesh: {boundary_edges} boundary edge(s)")]
    OpenMesh { boundary_edges: usize },

    #[error("orientation error: {0}")]
    Orientation(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("vertex {index} is not in convex position")]
    NotConvexPosition { index: usize },

    #[error("rank-deficient neighbourhood at vertex {vertex}")]
    RankDeficient { vertex: usize },

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("bounding box too small: {0}")]
    BBoxTooSmall(String),

    #[error("level set leaves the grid: {0}")]
    OpenSurface(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GeomError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        GeomError::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        GeomError::Parse(msg.into())
    }
}
