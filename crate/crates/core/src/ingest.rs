//! Event-log parsing, cleaning and trajectory construction.
//!
//! Input is line-oriented JSON with one post per line. Only three fields are
//! read (user, community, timestamp); everything else on the line is skipped
//! without being materialized.

use std::borrow::Cow;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::sync::Arc;

use serde::de::{self, DeserializeSeed, Deserializer, IgnoredAny, MapAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// User id the platform substitutes for accounts that were removed.
pub const DELETED_USER: &str = "[deleted]";

/// Default post count above which an account is surfaced for bot review.
pub const DEFAULT_CANDIDATE_THRESHOLD: u64 = 50_000;

/// Default id fragments marking non-human accounts.
pub const DEFAULT_NONHUMAN_TERMS: [&str; 3] = ["-bot", "_transcriber", "Moderator"];

/// One post: the atomic visit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub user: Arc<str>,
    pub community: Arc<str>,
    /// Seconds since the Unix epoch, UTC.
    pub ts: i64,
}

impl Event {
    pub fn new(user: &str, community: &str, ts: i64) -> Self {
        Event { user: user.into(), community: community.into(), ts }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Visit {
    pub community: Arc<str>,
    pub ts: i64,
}

/// A user's visits in chronological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub user: Arc<str>,
    pub visits: Vec<Visit>,
}

impl Trajectory {
    /// Builds a trajectory, sorting visits by timestamp (stable on ties).
    pub fn new(user: impl Into<Arc<str>>, mut visits: Vec<Visit>) -> Self {
        visits.sort_by_key(|v| v.ts);
        Trajectory { user: user.into(), visits }
    }

    /// Convenience constructor used heavily by tests and generators.
    pub fn from_pairs(user: &str, pairs: &[(&str, i64)]) -> Self {
        let visits = pairs.iter().map(|&(c, ts)| Visit { community: c.into(), ts }).collect();
        Trajectory::new(user, visits)
    }

    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    pub fn first_ts(&self) -> Option<i64> {
        self.visits.first().map(|v| v.ts)
    }

    pub fn last_ts(&self) -> Option<i64> {
        self.visits.last().map(|v| v.ts)
    }

    /// Number of distinct communities in the trajectory.
    pub fn distinct_communities(&self) -> usize {
        self.visits.iter().map(|v| &*v.community).collect::<HashSet<&str>>().len()
    }
}

/// Deduplicates identifier strings so that repeated ids share one allocation.
#[derive(Debug, Default)]
pub struct Interner {
    names: HashSet<Arc<str>>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, s: &str) -> Arc<str> {
        if let Some(existing) = self.names.get(s) {
            return existing.clone();
        }
        let name: Arc<str> = Arc::from(s);
        self.names.insert(name.clone());
        name
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// JSON field names for the three values an [`Event`] is built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMapping {
    pub user: String,
    pub community: String,
    pub ts: String,
}

impl Default for FieldMapping {
    /// The Reddit dump layout: `author`, `subreddit`, `created_utc`.
    fn default() -> Self {
        FieldMapping {
            user: "author".into(),
            community: "subreddit".into(),
            ts: "created_utc".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseMode {
    /// Skip bad lines and count them.
    #[default]
    Lenient,
    /// Abort on the first bad line.
    Strict,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub mapping: FieldMapping,
    pub mode: ParseMode,
    /// Inclusive `(platform inception, end of data)` bounds; events outside
    /// are treated like malformed lines.
    pub bounds: Option<(i64, i64)>,
}

#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub events: Vec<Event>,
    pub lines: usize,
    pub errors: usize,
    /// The first few error messages, for reporting.
    pub error_samples: Vec<String>,
}

const MAX_ERROR_SAMPLES: usize = 10;

/// Parses line-oriented JSON events, preserving input order. Blank lines are
/// ignored; they are neither events nor errors.
pub fn parse_events<R: BufRead>(reader: R, opts: &ParseOptions) -> Result<ParseOutcome> {
    let mut interner = Interner::new();
    parse_events_with(reader, opts, &mut interner)
}

/// Like [`parse_events`] but shares an interner across calls, e.g. when a
/// data set is split over several files.
pub fn parse_events_with<R: BufRead>(
    mut reader: R,
    opts: &ParseOptions,
    interner: &mut Interner,
) -> Result<ParseOutcome> {
    let mut out = ParseOutcome::default();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        out.lines += 1;
        let line = trim_ascii(&buf);
        if line.is_empty() {
            continue;
        }
        match parse_line(line, opts, interner) {
            Ok(ev) => out.events.push(ev),
            Err(message) => {
                if opts.mode == ParseMode::Strict {
                    return Err(Error::Parse { line: out.lines, message });
                }
                out.errors += 1;
                if out.error_samples.len() < MAX_ERROR_SAMPLES {
                    out.error_samples.push(format!("line {}: {}", out.lines, message));
                }
            }
        }
    }
    Ok(out)
}

fn trim_ascii(mut s: &[u8]) -> &[u8] {
    while let [first, rest @ ..] = s {
        if first.is_ascii_whitespace() {
            s = rest;
        } else {
            break;
        }
    }
    while let [rest @ .., last] = s {
        if last.is_ascii_whitespace() {
            s = rest;
        } else {
            break;
        }
    }
    s
}

fn parse_line(
    line: &[u8],
    opts: &ParseOptions,
    interner: &mut Interner,
) -> std::result::Result<Event, String> {
    let mut de = serde_json::Deserializer::from_slice(line);
    let raw = RecordSeed { mapping: &opts.mapping }
        .deserialize(&mut de)
        .map_err(|e| e.to_string())?;
    de.end().map_err(|e| e.to_string())?;
    let m = &opts.mapping;
    let user = raw.user.ok_or_else(|| format!("missing field {:?}", m.user))?;
    let community = raw.community.ok_or_else(|| format!("missing field {:?}", m.community))?;
    let ts = raw.ts.ok_or_else(|| format!("missing field {:?}", m.ts))?;
    if user.is_empty() {
        return Err(format!("empty {:?}", m.user));
    }
    if community.is_empty() {
        return Err(format!("empty {:?}", m.community));
    }
    if let Some((lo, hi)) = opts.bounds {
        if ts < lo || ts > hi {
            return Err(format!("timestamp {ts} outside [{lo}, {hi}]"));
        }
    }
    Ok(Event { user: interner.intern(&user), community: interner.intern(&community), ts })
}

struct RawRecord<'a> {
    user: Option<Cow<'a, str>>,
    community: Option<Cow<'a, str>>,
    ts: Option<i64>,
}

struct RecordSeed<'m> {
    mapping: &'m FieldMapping,
}

impl<'de> DeserializeSeed<'de> for RecordSeed<'_> {
    type Value = RawRecord<'de>;

    fn deserialize<D: Deserializer<'de>>(self, d: D) -> std::result::Result<Self::Value, D::Error> {
        d.deserialize_map(self)
    }
}

impl<'de> Visitor<'de> for RecordSeed<'_> {
    type Value = RawRecord<'de>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a JSON object")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Self::Value, A::Error> {
        let m = self.mapping;
        let mut rec = RawRecord { user: None, community: None, ts: None };
        while let Some(Text(key)) = map.next_key::<Text>()? {
            if key == m.user {
                rec.user = Some(map.next_value::<Text>()?.0);
            } else if key == m.community {
                rec.community = Some(map.next_value::<Text>()?.0);
            } else if key == m.ts {
                rec.ts = Some(map.next_value::<Timestamp>()?.0);
            } else {
                map.next_value::<IgnoredAny>()?;
            }
        }
        Ok(rec)
    }
}

/// A string that borrows from the input when it contains no escapes.
struct Text<'a>(Cow<'a, str>);

impl<'de> Deserialize<'de> for Text<'de> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Text<'de>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a string")
            }
            fn visit_borrowed_str<E: de::Error>(self, v: &'de str) -> std::result::Result<Self::Value, E> {
                Ok(Text(Cow::Borrowed(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                Ok(Text(Cow::Owned(v.to_owned())))
            }
        }
        d.deserialize_str(V)
    }
}

/// Accepts integer seconds, integral floats and numeric strings; dumps
/// disagree on how `created_utc` is encoded.
struct Timestamp(i64);

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Timestamp;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer timestamp")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Timestamp, E> {
                Ok(Timestamp(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Timestamp, E> {
                i64::try_from(v).map(Timestamp).map_err(|_| E::custom("timestamp out of range"))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Timestamp, E> {
                if v.fract() == 0.0 && v.abs() < 9.0e15 {
                    Ok(Timestamp(v as i64))
                } else {
                    Err(E::custom(format!("non-integral timestamp {v}")))
                }
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Timestamp, E> {
                v.trim()
                    .parse::<i64>()
                    .map(Timestamp)
                    .map_err(|_| E::custom(format!("unparseable timestamp {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

/// Drops every event posted by the `[deleted]` placeholder account.
pub fn filter_deleted(events: Vec<Event>) -> Vec<Event> {
    events.into_iter().filter(|e| &*e.user != DELETED_USER).collect()
}

/// Users with at least `threshold` posts, most active first (ties by id).
/// This is a review list; nothing is removed on the basis of it.
pub fn high_frequency_candidates(events: &[Event], threshold: u64) -> Vec<(String, u64)> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for e in events {
        *counts.entry(&e.user).or_default() += 1;
    }
    let mut out: Vec<(String, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= threshold)
        .map(|(u, c)| (u.to_owned(), c))
        .collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermAnchor {
    /// The term may occur anywhere in the id.
    #[default]
    Anywhere,
    /// The term must be a prefix or a suffix of the id.
    Edges,
}

/// Decides whether a user id names a non-human account.
#[derive(Debug, Clone)]
pub struct NonhumanMatcher {
    terms: Vec<String>,
    case_sensitive: bool,
    anchor: TermAnchor,
}

impl NonhumanMatcher {
    pub fn new<S: AsRef<str>>(terms: &[S], case_sensitive: bool, anchor: TermAnchor) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("nonhuman id_terms must not be empty"));
        }
        if terms.iter().any(|t| t.as_ref().is_empty()) {
            return Err(Error::invalid("nonhuman id_terms must not contain empty strings"));
        }
        let terms = terms
            .iter()
            .map(|t| if case_sensitive { t.as_ref().to_owned() } else { t.as_ref().to_lowercase() })
            .collect();
        Ok(NonhumanMatcher { terms, case_sensitive, anchor })
    }

    pub fn is_nonhuman(&self, user: &str) -> bool {
        let folded;
        let id = if self.case_sensitive {
            user
        } else {
            folded = user.to_lowercase();
            &folded
        };
        self.terms.iter().any(|t| match self.anchor {
            TermAnchor::Anywhere => id.contains(t.as_str()),
            TermAnchor::Edges => id.starts_with(t.as_str()) || id.ends_with(t.as_str()),
        })
    }
}

impl Default for NonhumanMatcher {
    fn default() -> Self {
        NonhumanMatcher::new(&DEFAULT_NONHUMAN_TERMS, true, TermAnchor::Anywhere)
            .expect("default terms are non-empty")
    }
}

/// Accounting for one cleaning pass.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub total_events: u64,
    /// Lines that could not be turned into events (lenient parsing only).
    pub malformed_lines: u64,
    pub removed_deleted: u64,
    pub removed_nonhuman: u64,
    /// Distinct accounts removed as non-human.
    pub removed_accounts: u64,
    pub flagged_candidates: Vec<(String, u64)>,
}

/// Removes all events of users the matcher flags as non-human.
pub fn filter_nonhuman(events: Vec<Event>, matcher: &NonhumanMatcher) -> (Vec<Event>, CleaningReport) {
    let total = events.len() as u64;
    // Verdicts are cached per interned id; consecutive events of one user are
    // common, so the last verdict is checked first.
    let mut verdicts: HashMap<Arc<str>, bool> = HashMap::new();
    let mut last: Option<(Arc<str>, bool)> = None;
    let mut removed_users: HashSet<Arc<str>> = HashSet::new();
    let mut kept = Vec::with_capacity(events.len());
    for e in events {
        let bot = match &last {
            Some((u, v)) if Arc::ptr_eq(u, &e.user) => *v,
            _ => {
                let v = *verdicts
                    .entry(e.user.clone())
                    .or_insert_with(|| matcher.is_nonhuman(&e.user));
                last = Some((e.user.clone(), v));
                v
            }
        };
        if bot {
            removed_users.insert(e.user.clone());
        } else {
            kept.push(e);
        }
    }
    let report = CleaningReport {
        total_events: total,
        removed_nonhuman: total - kept.len() as u64,
        removed_accounts: removed_users.len() as u64,
        ..CleaningReport::default()
    };
    (kept, report)
}

#[derive(Debug, Clone)]
pub struct CleaningOptions {
    pub matcher: NonhumanMatcher,
    pub candidate_threshold: u64,
}

impl Default for CleaningOptions {
    fn default() -> Self {
        CleaningOptions { matcher: NonhumanMatcher::default(), candidate_threshold: DEFAULT_CANDIDATE_THRESHOLD }
    }
}

/// Full cleaning pass: deleted accounts, bot-candidate survey, term-based
/// non-human removal. `malformed` is carried into the report unchanged.
pub fn clean(events: Vec<Event>, malformed: u64, opts: &CleaningOptions) -> (Vec<Event>, CleaningReport) {
    let total = events.len() as u64;
    let events = filter_deleted(events);
    let removed_deleted = total - events.len() as u64;
    let flagged = high_frequency_candidates(&events, opts.candidate_threshold);
    let (events, nonhuman) = filter_nonhuman(events, &opts.matcher);
    let report = CleaningReport {
        total_events: total,
        malformed_lines: malformed,
        removed_deleted,
        removed_nonhuman: nonhuman.removed_nonhuman,
        removed_accounts: nonhuman.removed_accounts,
        flagged_candidates: flagged,
    };
    (events, report)
}

/// Keeps events with `start_ts <= ts < end_ts`.
pub fn slice_by_time(events: Vec<Event>, start_ts: i64, end_ts: i64) -> Result<Vec<Event>> {
    if start_ts >= end_ts {
        return Err(Error::invalid(format!("time window [{start_ts}, {end_ts}) is empty or inverted")));
    }
    Ok(events.into_iter().filter(|e| e.ts >= start_ts && e.ts < end_ts).collect())
}

/// Groups events per user and orders each user's visits by time. Ties keep
/// input order. The result is sorted by user id.
pub fn build_trajectories(events: Vec<Event>) -> Vec<Trajectory> {
    build_trajectories_sharded(vec![events])
}

/// Builds trajectories from shards that were parsed independently. The
/// output equals `build_trajectories` of the shards concatenated in order.
pub fn build_trajectories_sharded(shards: Vec<Vec<Event>>) -> Vec<Trajectory> {
    let mut by_user: HashMap<Arc<str>, Vec<Visit>> = HashMap::new();
    for shard in shards {
        for e in shard {
            by_user.entry(e.user).or_default().push(Visit { community: e.community, ts: e.ts });
        }
    }
    let mut out: Vec<Trajectory> = by_user
        .into_iter()
        .map(|(user, visits)| Trajectory::new(user, visits))
        .collect();
    out.sort_unstable_by(|a, b| a.user.cmp(&b.user));
    out
}
