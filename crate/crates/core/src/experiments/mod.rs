//! Measurement harnesses. Each returns an [`ExperimentReport`] that is a pure
//! function of its inputs and seed, apart from the `timing` key.

mod common;
mod limsup;
mod local;
mod offdiag;
mod report;
mod restricted;
mod sweep;

pub use common::{upsample, Triple};
pub use offdiag::{offdiag_decay, OffDiagConfig};
pub use report::{ExperimentReport, Fit, Table, Timing, Verdict, REPORT_SCHEMA};
pub use sweep::{holder_sweep, weighted_continuity, SweepConfig};
pub use restricted::{exceptional_set, restricted_type_harness, ExceptionalSet, RestrictedConfig, TrilinearForm};
pub use limsup::{limsup_bound, LimsupConfig};
pub use local::{local_estimate, local_estimate_check, LocalConfig, LocalSides};
