//! Command-line error type carrying the process exit code.
//!
//! Exit codes: 0 success, 2 input/parse error, 3 solver failure,
//! 4 regime/invariance error.

use symrelax::degredux::ReduxError;
use symrelax::orbitpmi::PmiError;
use symrelax::polyring::PolyError;
use symrelax::sdpcore::SdpError;
use symrelax::symadapt::AdaptError;

/// Failure classes, one per nonzero exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input: files, polynomials, flags. Exit code 2.
    Input(String),
    /// A solve did not reach a certified answer. Exit code 3.
    Solver(String),
    /// Out-of-regime request or symmetry violation. Exit code 4.
    Regime(String),
}

impl CliError {
    /// Input-error constructor.
    pub fn input(msg: impl Into<String>) -> CliError {
        CliError::Input(msg.into())
    }

    /// Solver-failure constructor.
    pub fn solver(msg: impl Into<String>) -> CliError {
        CliError::Solver(msg.into())
    }

    /// Regime/invariance constructor.
    pub fn regime(msg: impl Into<String>) -> CliError {
        CliError::Regime(msg.into())
    }

    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Regime(_) => 4,
        }
    }

    /// Message shown on stderr.
    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Solver(m) | CliError::Regime(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message())
    }
}

impl std::error::Error for CliError {}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> CliError {
        match e {
            PolyError::NotInvariant(_) => CliError::Regime(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SdpError> for CliError {
    fn from(e: SdpError) -> CliError {
        match e {
            SdpError::OrderTooSmall { .. } => CliError::Regime(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<AdaptError> for CliError {
    fn from(e: AdaptError) -> CliError {
        match e {
            AdaptError::Poly(p) => p.into(),
            AdaptError::OrderTooSmall { .. } => CliError::Regime(e.to_string()),
            AdaptError::NotInvariant(_) => CliError::Regime(e.to_string()),
        }
    }
}

impl From<ReduxError> for CliError {
    fn from(e: ReduxError) -> CliError {
        match e {
            ReduxError::Poly(p) => p.into(),
            ReduxError::Sdp(s) => s.into(),
            ReduxError::NotSymmetric(_) => CliError::Regime(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PmiError> for CliError {
    fn from(e: PmiError) -> CliError {
        match e {
            PmiError::Poly(p) => p.into(),
            PmiError::Sdp(s) => s.into(),
            PmiError::Regime(_) => CliError::Regime(e.to_string()),
            PmiError::Numerical(_) | PmiError::Recovery(_) => CliError::Solver(e.to_string()),
            PmiError::Invalid(_) => CliError::Input(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_class() {
        assert_eq!(CliError::input("x").exit_code(), 2);
        assert_eq!(CliError::solver("x").exit_code(), 3);
        assert_eq!(CliError::regime("x").exit_code(), 4);
    }

    #[test]
    fn order_too_small_maps_to_regime() {
        let e: CliError = SdpError::OrderTooSmall { k: 1, k0: 2 }.into();
        assert_eq!(e.exit_code(), 4);
        assert!(e.message().contains("k0 = 2"), "message: {e}");
    }
}
