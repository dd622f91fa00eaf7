use thiserror::Error;

use crate::geometry::GeometryError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("no start found: no left/right cone pair within {radius} m of the car")]
    NoStartFound { radius: f64 },
    #[error("map is empty")]
    EmptyMap,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("invalid track: {0}")]
    InvalidTrack(String),
    #[error("ranker: {0}")]
    Ranker(String),
    #[error("training diverged at epoch {epoch}: loss is {loss}")]
    Diverged { epoch: usize, loss: f64 },
    #[error("no candidates to rank")]
    NoCandidates,
    #[error("oracle limit: graph has {vertices} vertices, at most {limit} supported")]
    OracleLimit { vertices: usize, limit: usize },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
