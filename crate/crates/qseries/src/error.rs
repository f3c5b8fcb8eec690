use thiserror::Error;

/// Errors surfaced by evaluators and the verification harness.
///
/// Truncation shortfalls are not errors: summation routines report them
/// through the `converged` flag of a series value so that partial results
/// remain inspectable. Errors are reserved for conditions that make a value
/// meaningless (poles, domain violations) or a request unserviceable.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum QError {
    /// Rejected context configuration (precision/tolerance constraints).
    #[error("invalid context: {reason}")]
    Context { reason: String },

    /// Parameters outside an operation's stated validity region.
    #[error("domain violation: {constraint}")]
    Domain { constraint: String },

    /// A denominator factor fell within the pole guard of zero.
    #[error("pole: {location}")]
    Pole { location: String },

    /// A sum or window failed its decay diagnostics and no trustworthy
    /// value can be reported.
    #[error("did not converge: {what}")]
    NonConvergence { what: String },

    /// Identity id not present in the registry.
    #[error("unknown identity: {id}")]
    UnknownIdentity { id: String },

    /// Malformed, missing, or unsupported parameter.
    #[error("bad parameter `{name}`: {reason}")]
    Param { name: String, reason: String },
}

impl QError {
    pub(crate) fn domain(constraint: impl Into<String>) -> Self {
        QError::Domain {
            constraint: constraint.into(),
        }
    }

    pub(crate) fn pole(location: impl Into<String>) -> Self {
        QError::Pole {
            location: location.into(),
        }
    }

    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        QError::Param {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
