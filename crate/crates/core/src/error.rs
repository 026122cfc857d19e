use thiserror::Error;

/// Broad failure category, used by front ends to map errors onto exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// Inputs violate a documented precondition.
    Validation,
    /// Inputs are well formed but the requested physics does not exist
    /// (no engine, infeasible protocol, outside a validity regime).
    Physics,
    /// A numerical method lost accuracy or failed to converge.
    Numerical,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("cubic has complex roots (acos argument {argument:.6e} outside [-1, 1])")]
    ComplexRoot { argument: f64 },

    #[error("degenerate spectrum: roots {lower} and {upper} coincide while the coupling is nonzero")]
    DegenerateSpectrum { lower: f64, upper: f64 },

    #[error("singular Hopfield weight: frequency {frequency} sits on bare sidemode {pole}")]
    SingularWeight { frequency: f64, pole: f64 },

    #[error("{regime} asymptotics not valid: {detail}")]
    Regime { regime: &'static str, detail: String },

    #[error("divergent Bose occupation at frequency {frequency} with nonzero temperature")]
    DivergentOccupation { frequency: f64 },

    #[error("cycle is not an engine: W = {work:e}, Q_in = {heat_in:e}")]
    NotAnEngine { work: f64, heat_in: f64, efficiency: Option<f64> },

    #[error("time {t} outside stroke [0, {tau}]")]
    Domain { t: f64, tau: f64 },

    #[error("infeasible protocol: min Ω² = {min_omega_sq:e} at t = {at}")]
    InfeasibleProtocol { min_omega_sq: f64, at: f64 },

    #[error("frequency {omega} outside attainable lower-branch range ({min}, {max})")]
    UnattainableFrequency { omega: f64, min: f64, max: f64 },

    #[error("integration failed at t = {t}: step size {step:e} underflowed")]
    Integration { t: f64, step: f64 },

    #[error("degenerate cycle map: both isochores have zero duration")]
    DegenerateMap,

    #[error(
        "two-mode elimination outside validity regime ({detail}); neglected scales \
         G/ω_c = {coupling_ratio:.3e}, ω_d/ω_c = {slow_ratio:.3e}, -Δ/ω_c = {detuning_ratio:.3e}"
    )]
    Validity { detail: String, coupling_ratio: f64, slow_ratio: f64, detuning_ratio: f64 },

    #[error("unstable time step: dt·max(ω, γ) = {product} must be below {limit}")]
    Stability { product: f64, limit: f64 },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter { .. } | Error::Domain { .. } | Error::Stability { .. } => {
                ErrorClass::Validation
            }
            Error::NotAnEngine { .. }
            | Error::InfeasibleProtocol { .. }
            | Error::UnattainableFrequency { .. }
            | Error::Regime { .. }
            | Error::Validity { .. }
            | Error::DegenerateMap => ErrorClass::Physics,
            Error::ComplexRoot { .. }
            | Error::DegenerateSpectrum { .. }
            | Error::SingularWeight { .. }
            | Error::DivergentOccupation { .. }
            | Error::Integration { .. } => ErrorClass::Numerical,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
