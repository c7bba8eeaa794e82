use thiserror::Error;

#[derive(Error, Debug)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] srion_core::CoreError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
