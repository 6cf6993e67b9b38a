use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] flab_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("group {name} is not abelian: the comparison with (K^r)^Γ needs a commutative coefficient group")]
    NonAbelian { name: String },

    #[error("unknown suite {0:?}; known suites: {1}")]
    UnknownSuite(String, String),

    #[error("cannot parse process {0:?}: expected bernoulli:<k>, group:<preset>[:<auto indices>] or kernel:<path.json|preset>")]
    BadProcess(String),

    #[error("unknown kernel preset {0:?}; known presets: delta, two-term, three-term")]
    UnknownKernelPreset(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, CliError>;
