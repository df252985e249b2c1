use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
    #[error(transparent)]
    Engine(#[from] mlmc::Error),
}

impl BenchError {
    pub(crate) fn output(path: &std::path::Path, source: impl Into<std::io::Error>) -> Self {
        Self::Output { path: path.display().to_string(), source: source.into() }
    }
}
