//! Five-agent monetary macroeconomic accounting model.
//!
//! The economy has twenty typed T-accounts held by labor, resource owners,
//! a producer, a profit owner and a bank. Every period eight bookings move
//! money and real quantities between them, driven by a small set of
//! behavioral decisions. Two engines step the model: a plain recursive
//! simulator and a categorical engine that validates bookings through
//! pullbacks, applies them through pushouts and evolves the account
//! category through a natural transformation. Both produce bit-identical
//! traces.

pub mod catcore;
pub mod decisions;
pub mod evolution;
pub mod ledger;
pub mod trace;
pub mod units;

pub use decisions::{ContractMemory, Parameters, PeriodMetrics};
pub use evolution::{run, EngineKind, SimulationState, Trace};
pub use ledger::{AccountId, Agent, LedgerState};
pub use units::Unit;
