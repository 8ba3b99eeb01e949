use stirling::Error;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or out-of-range configuration (exit 1).
    Config(String),
    /// Parameters violate the physics of the cycle (exit 2).
    Physics(String),
    /// Quadrature failed to converge (exit 3).
    Numerical(String),
    /// A validation suite ran and some checks failed (exit 2).
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Physics(_) | CliError::ChecksFailed(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Physics(m) => write!(f, "physics error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::ChecksFailed(n) => write!(f, "{n} validation check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e.root() {
            Error::Convergence { .. } => CliError::Numerical(msg),
            Error::Parameter(_) | Error::Argument(_) | Error::Unsupported(_) => CliError::Config(msg),
            Error::Ordering(_) | Error::Domain(_) | Error::Singular(_) | Error::HeatFlow(_) | Error::Stroke { .. } => {
                CliError::Physics(msg)
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}
