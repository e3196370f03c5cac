//! GLNSA: a global-local neighborhood search solver for the flexible job
//! shop scheduling problem.
//!
//! A population of smart cells is refined each iteration by an exploration
//! neighborhood over the operation sequence (insertion, swapping, path
//! relinking, machine mutation) and exploited by a tabu search that
//! reassigns machines of critical operations. Schedules come from an active
//! gap-filling decoder over the two-string OS/MS encoding.

pub mod engine;
pub mod instance;
pub mod neighborhood;
pub mod schedule;
pub mod tabu;

pub use engine::{glnsa_run, GlnsaConfig, RunReport, StopReason};
pub use instance::{flexibility_rate, parse_instance, Instance, OperationRef};
pub use schedule::{critical_path, decode_active, random_solution, Schedule, Solution};
pub use tabu::{tabu_search, EvalMode};
