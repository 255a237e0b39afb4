use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "cybermob", version, about = "Mobility analytics over community event logs")]
pub struct Cli {
    /// Flat `key = value` file of option defaults; flags given on the
    /// command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads (0 uses every core). Outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cmd {
    /// Parse and clean events; writes the surviving events and a report.
    Clean {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Build per-user trajectories.
    Trajectories {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Visit-count CCDFs per community and per user, with power-law fits.
    Dist {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exploration curve S(t) and its exponent.
    Explore {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        explore: ExploreArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Rank-frequency curves and exponents for users with S communities.
    Zipf {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        zipf: ZipfArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Returning-time distribution and hourly activity profiles.
    Temporal {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        temporal: TemporalArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Per-user entropy and max_frq of active users.
    Randomness {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        active: ActiveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Stage vectors, NMF and the three mobility patterns.
    Patterns {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        active: ActiveArgs,
        #[command(flatten)]
        patterns: PatternArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Predict mobility patterns from visited communities.
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        active: ActiveArgs,
        #[command(flatten)]
        patterns: PatternArgs,
        #[command(flatten)]
        classify: ClassifyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Generate a synthetic event log.
    Simulate {
        #[command(flatten)]
        sim: SimulateArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Every analysis in one run.
    All {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        explore: ExploreArgs,
        #[command(flatten)]
        zipf: ZipfArgs,
        #[command(flatten)]
        temporal: TemporalArgs,
        #[command(flatten)]
        active: ActiveArgs,
        #[command(flatten)]
        patterns: PatternArgs,
        #[command(flatten)]
        classify: ClassifyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write the physical-space reference values for plotting.
    Overlays {
        #[command(flatten)]
        out: OutArgs,
    },
}

impl Cmd {
    pub fn name(&self) -> &'static str {
        match self {
            Cmd::Clean { .. } => "clean",
            Cmd::Trajectories { .. } => "trajectories",
            Cmd::Dist { .. } => "dist",
            Cmd::Explore { .. } => "explore",
            Cmd::Zipf { .. } => "zipf",
            Cmd::Temporal { .. } => "temporal",
            Cmd::Randomness { .. } => "randomness",
            Cmd::Patterns { .. } => "patterns",
            Cmd::Classify { .. } => "classify",
            Cmd::Simulate { .. } => "simulate",
            Cmd::All { .. } => "all",
            Cmd::Overlays { .. } => "overlays",
        }
    }

    pub fn out_dir(&self) -> &PathBuf {
        match self {
            Cmd::Clean { out, .. }
            | Cmd::Trajectories { out, .. }
            | Cmd::Dist { out, .. }
            | Cmd::Explore { out, .. }
            | Cmd::Zipf { out, .. }
            | Cmd::Temporal { out, .. }
            | Cmd::Randomness { out, .. }
            | Cmd::Patterns { out, .. }
            | Cmd::Classify { out, .. }
            | Cmd::Simulate { out, .. }
            | Cmd::All { out, .. }
            | Cmd::Overlays { out } => &out.out,
        }
    }

    pub fn input(&self) -> Option<&InputArgs> {
        match self {
            Cmd::Clean { input, .. }
            | Cmd::Trajectories { input, .. }
            | Cmd::Dist { input, .. }
            | Cmd::Explore { input, .. }
            | Cmd::Zipf { input, .. }
            | Cmd::Temporal { input, .. }
            | Cmd::Randomness { input, .. }
            | Cmd::Patterns { input, .. }
            | Cmd::Classify { input, .. }
            | Cmd::All { input, .. } => Some(input),
            Cmd::Simulate { .. } | Cmd::Overlays { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Anchor {
    Anywhere,
    Edges,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Line-oriented JSON event files (comma-separated or repeated).
    #[arg(long, required = true, value_delimiter = ',')]
    pub input: Vec<PathBuf>,
    #[arg(long, default_value = "author")]
    pub field_user: String,
    #[arg(long, default_value = "subreddit")]
    pub field_community: String,
    #[arg(long, default_value = "created_utc")]
    pub field_ts: String,
    /// Abort on the first malformed line instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// Keep events with `start <= ts < end` (both required together).
    #[arg(long, requires = "end")]
    pub start: Option<i64>,
    #[arg(long, requires = "start")]
    pub end: Option<i64>,
    /// Substrings marking non-human accounts (comma-separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = ["-bot".to_string(), "_transcriber".to_string(), "Moderator".to_string()])]
    pub bot_terms: Vec<String>,
    #[arg(long)]
    pub case_insensitive: bool,
    #[arg(long, value_enum, default_value_t = Anchor::Anywhere)]
    pub anchor: Anchor,
    /// Accounts with at least this many posts are listed for review.
    #[arg(long, default_value_t = 50_000)]
    pub candidate_threshold: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// Lower end of the x range used for power-law fits.
    #[arg(long)]
    pub fit_min: Option<f64>,
    #[arg(long)]
    pub fit_max: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExploreArgs {
    /// Hours of history each user must span to enter S(t).
    #[arg(long, default_value_t = 720)]
    pub horizon: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ZipfArgs {
    /// Distinct-community counts to build curves for (comma-separated).
    #[arg(long = "s", value_delimiter = ',', default_values_t = [10usize, 20, 30, 40, 50])]
    pub s_values: Vec<usize>,
    /// Also accept users with up to this many communities (top S ranks kept).
    #[arg(long)]
    pub s_max: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TemporalArgs {
    #[arg(long, default_value_t = 720)]
    pub max_hours: usize,
    /// Extra `community<TAB>zone` lines merged over the built-in table.
    #[arg(long)]
    pub tz_map: Option<PathBuf>,
    /// Communities used for hourly profiles (default: every mapped one).
    #[arg(long, value_delimiter = ',')]
    pub communities: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ActiveArgs {
    /// Users need strictly more distinct communities than this.
    #[arg(long, default_value_t = 2)]
    pub min_distinct: usize,
    /// Users need strictly more visits than this.
    #[arg(long, default_value_t = 1000)]
    pub min_visits: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PatternArgs {
    #[arg(long, default_value_t = 20)]
    pub stages: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// `raw` or `per-feature-max`.
    #[arg(long, default_value = "raw")]
    pub scaling: String,
    #[arg(long, default_value_t = 500)]
    pub nmf_max_iter: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub nmf_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub nmf_seed: u64,
    /// Only users whose last visit precedes this timestamp are analyzed.
    #[arg(long)]
    pub cutoff: Option<i64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    /// `user,label` CSV; without it labels come from the pattern analysis.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub min_users: usize,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long)]
    pub stratified: bool,
    #[arg(long, default_value_t = 1.0)]
    pub l2: f64,
    #[arg(long, default_value_t = 1000)]
    pub lr_max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Length of each ranked coefficient list.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Epr,
    Zipf,
    Periodic,
    Cohorts,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// Users (per cohort for `cohorts`).
    #[arg(long, default_value_t = 1000)]
    pub users: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// EPR: visits per user.
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.6)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 3600)]
    pub inter_event_seconds: i64,
    /// EPR: exponential instead of regular spacing.
    #[arg(long)]
    pub poisson: bool,
    /// Zipf: communities per user.
    #[arg(long = "s", default_value_t = 50)]
    pub s: usize,
    #[arg(long, default_value_t = 1.12)]
    pub zeta: f64,
    /// Zipf, periodic and cohorts: posts per user.
    #[arg(long)]
    pub visits: Option<usize>,
    #[arg(long, default_value_t = 24)]
    pub period_hours: u32,
    #[arg(long, default_value_t = 1800)]
    pub jitter_seconds: i64,
    #[arg(long, default_value_t = 0.5)]
    pub attendance: f64,
    #[arg(long, default_value_t = 3)]
    pub session_posts: usize,
    /// Cohorts: stages the trends are laid out over.
    #[arg(long, default_value_t = 20)]
    pub stages: usize,
}
