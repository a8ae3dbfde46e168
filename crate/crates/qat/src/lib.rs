//! Quantum averaging theory (QAT) for driven quantum systems.
//!
//! The interaction-picture propagator of `i ∂_s U = H_I(s; λ) U` is factorized
//! as `U(s) = exp(−iΦ(s)) U_eff(s)`, with `Φ` carrying the fast oscillations and
//! `U_eff` generated by a slow effective Hamiltonian. Both are built order by
//! order in `λ` from operator-valued Fourier series.

pub mod expansion;
pub mod fourier;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod propagator;
pub mod systems;
pub mod verify;

pub use expansion::{qat_expand, ExpansionConfig, ExpansionError, QatExpansion};
pub use fourier::{FourierError, FourierMode, FourierOperator, Tolerances};
pub use linalg::OperatorMatrix;
pub use metrics::{propagator_distance, ErrorReport, MetricsError};
pub use oracle::{integrate_exact, IntegratorConfig, IntegratorMethod, OracleError};
pub use propagator::{assemble, EffectivePropagatorPlan, PropagatorError, PropagatorSample, SampleKind};
pub use systems::{SystemError, SystemSpec};
