//! Two-stage nurse rostering: a night stage followed by a day stage, each
//! solved as an integer program over a five-day-padded monthly window.
//!
//! A month is built in this order:
//!
//! 1. Load a ward condition file and a wish grid ([`io`]).
//! 2. Optionally probe the wishes for hard conflicts ([`solver::probe_hard`]).
//! 3. Solve the night stage, let a planner edit the result, place 12h shifts
//!    before night starts, then solve the day stage ([`pipeline::Session`]).
//! 4. Audit the final roster against every rule ([`pipeline`] reports).
//!
//! Modules:
//!
//! - [`domain`]: nurses, ward settings, symbols, calendars and rosters.
//! - [`catalog`]: every hard and soft rule with a direct evaluator that
//!   scores a roster without any solver.
//! - [`encoder`]: turns the catalog into a linear program, written as LP or MPS.
//! - [`solver`]: exact solves through CBC, a simulated-annealing fallback
//!   with incremental scoring, and the conflict probe.
//! - [`pipeline`]: session state, edits with provenance, post-processing
//!   and reports.
//! - [`io`]: condition files, wish tables, symbol maps and roster formats.
//! - [`service`]: the HTTP API.
//! - [`synth`]: random wards and wishes for tests and demos.
//!
//! Runnable walkthroughs live in `crates/core/examples/`; start with
//! `two_stage_pipeline`.

pub mod catalog;
pub mod domain;
pub mod encoder;
pub mod pipeline;
pub mod service;
pub mod solver;
pub mod error;
pub mod io;
pub mod synth;

pub use error::{Error, Result};
