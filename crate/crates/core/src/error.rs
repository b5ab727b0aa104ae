use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("PLY format error: {0}")]
    Format(String),

    #[error("face {face} references vertex {index} but the mesh has {vertex_count} vertices")]
    Index {
        face: usize,
        index: usize,
        vertex_count: usize,
    },

    #[error("mesh is empty: {0}")]
    EmptyMesh(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("feature arity mismatch: model expects {expected} features, got {got}")]
    FeatureArity { expected: usize, got: usize },

    #[error("dataset has {got} rows, at least {min} required")]
    DatasetTooSmall { got: usize, min: usize },

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("model file error: {0}")]
    Model(String),

    #[error("duplicate object id {0}")]
    IdCollision(String),

    #[error("degenerate geometry for {class}: zero extent along {axis}")]
    DegenerateGeometry { class: String, axis: &'static str },

    #[error("referential integrity error: {0}")]
    Integrity(String),

    #[error("turtle parse error at line {line}: {message}")]
    Turtle { line: usize, message: String },

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("node {node} has {count} hosts, at most one allowed")]
    HostMultiplicity { node: String, count: usize },

    #[error("plan error: {0}")]
    Plan(String),

    #[error("node {node} is missing required attribute {attribute}")]
    MissingAttribute { node: String, attribute: String },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("infeasible scene spec: {0}")]
    Spec(String),

    #[error("no input objects: {0}")]
    EmptyInput(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short stable tag used in machine-parsable CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Format(_) => "format",
            Error::Index { .. } => "index",
            Error::EmptyMesh(_) => "empty-mesh",
            Error::InvalidMesh(_) => "invalid-mesh",
            Error::FeatureArity { .. } => "feature-arity",
            Error::DatasetTooSmall { .. } => "dataset-size",
            Error::Dataset(_) => "dataset",
            Error::Model(_) => "model",
            Error::IdCollision(_) => "id-collision",
            Error::DegenerateGeometry { .. } => "degenerate-geometry",
            Error::Integrity(_) => "integrity",
            Error::Turtle { .. } => "turtle-parse",
            Error::UnknownNode(_) => "lookup",
            Error::HostMultiplicity { .. } => "host-multiplicity",
            Error::Plan(_) => "plan",
            Error::MissingAttribute { .. } => "attribute-missing",
            Error::Geometry(_) => "geometry",
            Error::Spec(_) => "spec",
            Error::EmptyInput(_) => "empty-input",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
