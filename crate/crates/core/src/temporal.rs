//! Returning-time distribution and weekday/weekend hourly activity profiles.

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use chrono::{DateTime, Datelike, FixedOffset, Offset, TimeZone, Timelike, Utc, Weekday};
use chrono_tz::Tz;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Event, Trajectory};
use crate::SECONDS_PER_HOUR;

/// Default histogram length: 30 days of hourly bins.
pub const DEFAULT_MAX_HOURS: usize = 720;

/// Counts of returning gaps per hour bin.
///
/// Bin `t` (1-indexed) holds gaps `g` with `(t-1)h < g <= t h`; zero-length
/// gaps count towards bin 1. Gaps longer than the histogram are included in
/// `n_gaps` but not binned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReturnHistogram {
    pub counts: Vec<u64>,
    pub n_gaps: u64,
}

impl ReturnHistogram {
    pub fn max_hours(&self) -> usize {
        self.counts.len()
    }

    /// `(t, probability)` for every bin.
    pub fn mass(&self) -> Vec<(usize, f64)> {
        let n = self.n_gaps as f64;
        self.counts.iter().enumerate().map(|(i, &c)| (i + 1, c as f64 / n)).collect()
    }

    pub fn binned(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Bins whose probability is strictly above both neighbours.
    pub fn strict_local_maxima(&self) -> Vec<usize> {
        let c = &self.counts;
        (1..c.len().saturating_sub(1))
            .filter(|&i| c[i] > c[i - 1] && c[i] > c[i + 1])
            .map(|i| i + 1)
            .collect()
    }
}

/// Hour bin of a returning gap in seconds.
pub fn gap_bin(gap: i64) -> usize {
    if gap <= 0 {
        1
    } else {
        ((gap + SECONDS_PER_HOUR - 1) / SECONDS_PER_HOUR) as usize
    }
}

fn user_gaps(t: &Trajectory, counts: &mut [u64]) -> u64 {
    let mut last: HashMap<&str, i64> = HashMap::new();
    let mut n = 0;
    for v in &t.visits {
        if let Some(prev) = last.insert(&v.community, v.ts) {
            n += 1;
            let bin = gap_bin(v.ts - prev);
            if bin <= counts.len() {
                counts[bin - 1] += 1;
            }
        }
    }
    n
}

/// Pools the gaps between consecutive visits to the same community over all
/// users and communities.
pub fn return_probability(trajectories: &[Trajectory], max_hours: usize) -> Result<ReturnHistogram> {
    if max_hours < 1 {
        return Err(Error::invalid("max_hours must be at least 1"));
    }
    let (counts, n_gaps) = trajectories
        .par_iter()
        .fold(
            || (vec![0u64; max_hours], 0u64),
            |(mut acc, n), t| {
                let m = user_gaps(t, &mut acc);
                (acc, n + m)
            },
        )
        .reduce(
            || (vec![0u64; max_hours], 0u64),
            |(mut a, n), (b, m)| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                (a, n + m)
            },
        );
    if n_gaps == 0 {
        return Err(Error::InsufficientData("no community was visited twice by the same user".into()));
    }
    Ok(ReturnHistogram { counts, n_gaps })
}

/// How a community's local civil time is derived from UTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoneRule {
    Fixed(FixedOffset),
    Named(Tz),
}

const MIN_OFFSET: i32 = -12 * 3600;
const MAX_OFFSET: i32 = 14 * 3600;

impl ZoneRule {
    /// Local weekday and hour of a UTC timestamp.
    pub fn local_weekday_hour(&self, ts: i64) -> Option<(Weekday, u32)> {
        let utc: DateTime<Utc> = Utc.timestamp_opt(ts, 0).single()?;
        Some(match self {
            ZoneRule::Fixed(off) => {
                let l = utc.with_timezone(off);
                (l.weekday(), l.hour())
            }
            ZoneRule::Named(tz) => {
                let l = utc.with_timezone(tz);
                (l.weekday(), l.hour())
            }
        })
    }

    fn offset_seconds_at(&self, ts: i64) -> i32 {
        match self {
            ZoneRule::Fixed(off) => off.local_minus_utc(),
            ZoneRule::Named(tz) => {
                let utc = Utc.timestamp_opt(ts, 0).single().unwrap_or_default();
                tz.offset_from_utc_datetime(&utc.naive_utc()).fix().local_minus_utc()
            }
        }
    }
}

impl FromStr for ZoneRule {
    type Err = Error;

    /// IANA names (`America/New_York`) or fixed offsets (`UTC`, `UTC-5`,
    /// `+05:30`, `UTC+09:00`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(tz) = s.parse::<Tz>() {
            return Ok(ZoneRule::Named(tz));
        }
        let rest = s.strip_prefix("UTC").or_else(|| s.strip_prefix("GMT")).unwrap_or(s);
        if rest.is_empty() {
            return Ok(ZoneRule::Fixed(FixedOffset::east_opt(0).expect("zero offset")));
        }
        let bad = || Error::invalid(format!("unrecognized timezone {s:?}"));
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1, &rest[1..]),
            b'-' => (-1, &rest[1..]),
            _ => return Err(bad()),
        };
        let (h, m) = match body.split_once(':') {
            Some((h, m)) => (h, m),
            None => (body, "0"),
        };
        let h: i32 = h.parse().map_err(|_| bad())?;
        let m: i32 = m.parse().map_err(|_| bad())?;
        if !(0..60).contains(&m) {
            return Err(bad());
        }
        let secs = sign * (h * 3600 + m * 60);
        if !(MIN_OFFSET..=MAX_OFFSET).contains(&secs) {
            return Err(Error::invalid(format!("offset {s:?} outside [-12h, +14h]")));
        }
        Ok(ZoneRule::Fixed(FixedOffset::east_opt(secs).ok_or_else(bad)?))
    }
}

/// Community id to local-time rule.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TimezoneMap {
    pub entries: BTreeMap<String, ZoneRule>,
}

const DEFAULT_TIMEZONES: &str = include_str!("../data/timezones.tsv");

impl TimezoneMap {
    /// City communities with well-known local time.
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_TIMEZONES).expect("bundled timezone table is valid")
    }

    /// Parses `community<TAB>zone` lines; blank lines and `#` comments are
    /// skipped. Later lines override earlier ones.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = TimezoneMap::default();
        map.extend_from_str(text)?;
        Ok(map)
    }

    pub fn extend_from_str(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (community, zone) = line.split_once('\t').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "expected community<TAB>zone".into(),
            })?;
            let community = community.trim();
            if community.is_empty() {
                return Err(Error::Parse { line: i + 1, message: "empty community id".into() });
            }
            let rule = zone.parse::<ZoneRule>().map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
            self.entries.insert(community.to_owned(), rule);
        }
        Ok(())
    }

    pub fn get(&self, community: &str) -> Option<&ZoneRule> {
        self.entries.get(community)
    }

    /// Checks that every rule's UTC offset at `ts` lies in `[-12h, +14h]`.
    pub fn validate_at(&self, ts: i64) -> Result<()> {
        for (c, rule) in &self.entries {
            let off = rule.offset_seconds_at(ts);
            if !(MIN_OFFSET..=MAX_OFFSET).contains(&off) {
                return Err(Error::invalid(format!("community {c}: offset {off}s outside [-12h, +14h]")));
            }
        }
        Ok(())
    }
}

/// Share of posts in each local hour, separately for weekdays and weekends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyProfile {
    pub weekday: [f64; 24],
    pub weekend: [f64; 24],
    pub weekday_posts: u64,
    pub weekend_posts: u64,
}

pub fn is_weekend(day: Weekday) -> bool {
    matches!(day, Weekday::Sat | Weekday::Sun)
}

/// Hourly profile over `(community, ts)` pairs. Only communities in the
/// whitelist are used; `None` means every community in `tz`.
pub fn hourly_profile_of<'a, I>(visits: I, tz: &TimezoneMap, whitelist: Option<&[String]>) -> Result<HourlyProfile>
where
    I: IntoIterator<Item = (&'a str, i64)>,
{
    let rules: HashMap<&str, &ZoneRule> = match whitelist {
        Some(list) => list
            .iter()
            .map(|c| tz.get(c).map(|r| (c.as_str(), r)).ok_or_else(|| Error::MissingTimezone(c.clone())))
            .collect::<Result<_>>()?,
        None => tz.entries.iter().map(|(c, r)| (c.as_str(), r)).collect(),
    };
    let mut weekday = [0u64; 24];
    let mut weekend = [0u64; 24];
    for (community, ts) in visits {
        let Some(rule) = rules.get(community) else { continue };
        let (day, hour) = rule
            .local_weekday_hour(ts)
            .ok_or_else(|| Error::invalid(format!("timestamp {ts} is not representable")))?;
        if is_weekend(day) {
            weekend[hour as usize] += 1;
        } else {
            weekday[hour as usize] += 1;
        }
    }
    let wd: u64 = weekday.iter().sum();
    let we: u64 = weekend.iter().sum();
    if wd + we == 0 {
        return Err(Error::EmptyInput("no posts in the whitelisted communities".into()));
    }
    let share = |counts: [u64; 24], total: u64| {
        let mut out = [0.0; 24];
        if total > 0 {
            for (o, c) in out.iter_mut().zip(counts) {
                *o = c as f64 / total as f64;
            }
        }
        out
    };
    Ok(HourlyProfile { weekday: share(weekday, wd), weekend: share(weekend, we), weekday_posts: wd, weekend_posts: we })
}

pub fn hourly_profile(events: &[Event], tz: &TimezoneMap, whitelist: Option<&[String]>) -> Result<HourlyProfile> {
    hourly_profile_of(events.iter().map(|e| (&*e.community, e.ts)), tz, whitelist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Visit;
    use proptest::prelude::*;

    const H: i64 = SECONDS_PER_HOUR;
    // 2016-01-04 is a Monday.
    const MONDAY_UTC: i64 = 1_451_865_600;

    #[test]
    fn daily_returner_fills_bin_24() {
        let pairs: Vec<(&str, i64)> = (0..10).map(|d| ("x", d * 24 * H)).collect();
        let h = return_probability(&[Trajectory::from_pairs("u", &pairs)], 720).unwrap();
        assert_eq!(h.n_gaps, 9);
        assert_eq!(h.counts[23], 9);
        assert_eq!(h.mass()[23], (24, 1.0));
    }

    #[test]
    fn half_hour_gap_lands_in_bin_1() {
        let h = return_probability(&[Trajectory::from_pairs("u", &[("x", 0), ("x", 1800)])], 10).unwrap();
        assert_eq!(h.counts[0], 1);
        assert_eq!(gap_bin(0), 1);
        assert_eq!(gap_bin(H), 1);
        assert_eq!(gap_bin(H + 1), 2);
    }

    #[test]
    fn no_gaps_is_an_error() {
        let t = Trajectory::from_pairs("u", &[("x", 0), ("y", 10)]);
        assert!(matches!(return_probability(std::slice::from_ref(&t), 10), Err(Error::InsufficientData(_))));
        assert!(return_probability(&[t], 0).is_err());
    }

    #[test]
    fn long_gaps_count_but_are_not_binned() {
        let t = Trajectory::from_pairs("u", &[("x", 0), ("x", 5 * H), ("x", 6 * H)]);
        let h = return_probability(&[t], 3).unwrap();
        assert_eq!(h.n_gaps, 2);
        assert_eq!(h.binned(), 1);
        let total: f64 = h.mass().iter().map(|p| p.1).sum();
        assert_eq!(total, 0.5);
    }

    fn tz_fixed(c: &str, zone: &str) -> TimezoneMap {
        TimezoneMap::parse(&format!("{c}\t{zone}\n")).unwrap()
    }

    #[test]
    fn monday_morning_posts() {
        let tz = tz_fixed("x", "UTC");
        let events: Vec<Event> = (0..5).map(|i| Event::new("u", "x", MONDAY_UTC + 9 * H + i * 60)).collect();
        let p = hourly_profile(&events, &tz, None).unwrap();
        assert_eq!(p.weekday[9], 1.0);
        assert!(p.weekend.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn uniform_week_is_flat() {
        let tz = tz_fixed("x", "UTC");
        let events: Vec<Event> = (0..168).map(|h| Event::new("u", "x", MONDAY_UTC + h * H)).collect();
        let p = hourly_profile(&events, &tz, None).unwrap();
        for h in 0..24 {
            assert!((p.weekday[h] - 1.0 / 24.0).abs() < 1e-15);
            assert!((p.weekend[h] - 1.0 / 24.0).abs() < 1e-15);
        }
    }

    #[test]
    fn offset_conversion_crosses_midnight() {
        let rule: ZoneRule = "UTC-5".parse().unwrap();
        assert_eq!(rule.local_weekday_hour(1_451_606_400), Some((Weekday::Thu, 19)));
        let tz = tz_fixed("x", "-05:00");
        let p = hourly_profile(&[Event::new("u", "x", 1_451_606_400)], &tz, None).unwrap();
        assert_eq!(p.weekday[19], 1.0);
    }

    #[test]
    fn named_zone_honours_dst() {
        let tz = TimezoneMap::builtin();
        let nyc = tz.get("nyc").unwrap();
        // 2016-07-01 12:00 UTC is 08:00 EDT; 2016-01-01 12:00 UTC is 07:00 EST.
        assert_eq!(nyc.local_weekday_hour(1_467_374_400).unwrap().1, 8);
        assert_eq!(nyc.local_weekday_hour(1_451_649_600).unwrap().1, 7);
        assert_eq!(tz.get("LosAngeles").unwrap().local_weekday_hour(1_467_374_400).unwrap().1, 5);
        tz.validate_at(1_467_374_400).unwrap();
    }

    #[test]
    fn whitelist_must_be_mapped() {
        let tz = TimezoneMap::builtin();
        let wl = vec!["nyc".to_string(), "paris".to_string()];
        match hourly_profile(&[Event::new("u", "nyc", 0)], &tz, Some(&wl)) {
            Err(Error::MissingTimezone(c)) => assert_eq!(c, "paris"),
            other => panic!("expected missing timezone, got {other:?}"),
        }
    }

    #[test]
    fn zone_parsing() {
        assert!("UTC+14".parse::<ZoneRule>().is_ok());
        assert!("UTC+15".parse::<ZoneRule>().is_err());
        assert!("UTC-13".parse::<ZoneRule>().is_err());
        assert!("+05:30".parse::<ZoneRule>().is_ok());
        assert!("Mars/Olympus".parse::<ZoneRule>().is_err());
        assert!(TimezoneMap::parse("nyc America/New_York\n").is_err());
        let m = TimezoneMap::parse("# comment\n\nnyc\tAmerica/New_York\n").unwrap();
        assert_eq!(m.entries.len(), 1);
    }

    fn arb_trajectories() -> impl Strategy<Value = Vec<Trajectory>> {
        prop::collection::vec(
            prop::collection::vec((0u8..4, 0i64..100 * H), 1..40),
            1..6,
        )
        .prop_map(|users| {
            users
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    let visits = v.into_iter().map(|(c, ts)| Visit { community: format!("c{c}").into(), ts }).collect();
                    Trajectory::new(format!("u{i}"), visits)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn histogram_invariant_to_user_order(mut trajs in arb_trajectories()) {
            let Ok(a) = return_probability(&trajs, 50) else { return Ok(()) };
            trajs.reverse();
            for (i, t) in trajs.iter_mut().enumerate() {
                t.user = format!("relabeled{i}").into();
            }
            let b = return_probability(&trajs, 50).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert!(a.binned() <= a.n_gaps);
        }

        #[test]
        fn weekly_shift_leaves_profile_unchanged(hours in prop::collection::vec(0i64..2000, 1..100)) {
            let tz = tz_fixed("x", "UTC-05:00");
            let events: Vec<Event> = hours.iter().map(|h| Event::new("u", "x", MONDAY_UTC + h * H + 17)).collect();
            let shifted: Vec<Event> = events.iter().map(|e| Event { ts: e.ts + 7 * 24 * H, ..e.clone() }).collect();
            let a = hourly_profile(&events, &tz, None).unwrap();
            let b = hourly_profile(&shifted, &tz, None).unwrap();
            prop_assert_eq!(&a, &b);
            let wd: f64 = b.weekday.iter().sum();
            let we: f64 = b.weekend.iter().sum();
            prop_assert!(wd == 0.0 || (wd - 1.0).abs() < 1e-9);
            prop_assert!(we == 0.0 || (we - 1.0).abs() < 1e-9);
        }
    }
}
