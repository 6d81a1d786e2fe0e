//! Entanglement dynamics of two two-level atoms held in two coupled cavities
//! whose fields start in thermal states.
//!
//! The closed system conserves the total excitation number, so the unitary
//! engine ([`evolution`]) evolves each excitation sector on its own. The
//! open system ([`lindblad`]) integrates the thermal master equation on a
//! per-mode truncated Fock space. Both feed the two-atom reduced state into
//! [`entanglement`] for the Wootters concurrence.

pub mod entanglement;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod hilbert;
pub mod lindblad;
pub mod model;
pub mod oracle;
pub mod states;
pub mod sweeps;
pub mod validation;

pub use entanglement::{concurrence, concurrence_general, concurrence_x, population_inversion, AtomicDensity};
pub use error::{Error, Result};
pub use evolution::{simulate, TimeGrid, UnitaryOptions, UnitaryRun};
pub use exec::Exec;
pub use lindblad::{DissipationParams, FullDensity, FullSpace, IntegratorOptions, Liouvillian};
pub use model::{effective_params, EffectiveParams, ModelParams};
pub use states::AtomicInitialState;
pub use sweeps::{run_sweep, ResultTable, SweepConfig, SweepSpec};
