use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: malformed scenario, invalid parameter, unwritable output.
    #[error("{0}")]
    Validation(String),
    /// The computation itself failed.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<conelaw::Error> for CliError {
    fn from(e: conelaw::Error) -> Self {
        let input_problem =
            e.is_validation() || matches!(e, conelaw::Error::MembershipViolation { .. });
        if input_problem {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}
