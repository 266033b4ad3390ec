use thiserror::Error;

use crate::graph::{EdgeId, ValidationReport, VertexId};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(ValidationReport),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("crossing [{0}, {1}] is an x-crossing")]
    XCrossing(EdgeId, EdgeId),
    #[error("graph has no vertices")]
    Empty,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
