//! Constructions, verification and exhaustive search for progressive dinner
//! party designs: `k` courses, `k` couples per table, every couple hosting
//! exactly once and no two couples meeting twice.

pub mod cyclic;
pub mod database;
pub mod design;
pub mod export;
pub mod gf;
pub mod hosts;
pub mod latin;
pub mod planner;
pub mod search;
pub mod special;
pub mod verify;

pub use design::{Block, BlockRef, MalformedSchedule, ParallelClass, Point, Schedule};
pub use export::{export, Format};
pub use planner::{generate, plan, GenerateOptions, PlanDecision, PlanError, PlanOptions, Route};
pub use verify::{feasibility_check, pair_multiset, verify, Feasibility, VerificationReport, Violation};
