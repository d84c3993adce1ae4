//! Source conditions, index functions, threshold rules and the bias audits
//! that check them on a grid.

mod audit;
mod index;
mod source;
mod threshold;

pub use audit::{bias_bound_audit, stochastic_bias_audit, stochastic_rate, truncated_energy, BiasAudit, StochasticAudit};
pub use index::{probe_grid, probe_index, IndexFunction, IndexTable, ProbeReport};
pub use source::{rho_compute, rho_on_grid, SourceCondition, SourceKind, SourceReport};
pub use threshold::{threshold, RuleId, ThresholdInputs, ThresholdRule};
