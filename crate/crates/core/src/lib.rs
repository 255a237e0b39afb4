//! Trajectory analytics for users moving between online communities.
//!
//! Communities play the role of locations and every post is a visit. The
//! crate turns raw event logs into per-user trajectories and computes the
//! classic mobility measurements on them: visit-count CCDFs with power-law
//! tail fits, the exploration curve `S(t)` and Zipf rank-frequency curve,
//! returning-time histograms and hourly activity profiles, per-user entropy
//! and `max_frq`, stage-wise mobility vectors decomposed with NMF into three
//! mobility patterns, and a TF-IDF + logistic-regression classifier relating
//! patterns to community preference.
//!
//! The [`synth`] module holds seeded generators whose asymptotic behaviour is
//! known in closed form; the test suites use them as oracles.

pub mod distributions;
pub mod error;
pub mod ingest;
pub mod output;
pub mod patterns;
pub mod preference;
pub mod randomness;
pub mod randomwalk;
pub mod synth;
pub mod temporal;

pub use error::{Error, Result};
pub use ingest::{Event, Trajectory, Visit};

/// Seconds in one hour; every hour-indexed quantity uses this bin width.
pub const SECONDS_PER_HOUR: i64 = 3600;
