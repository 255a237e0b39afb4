//! Writers for the CSV and JSON-lines artifacts.
//!
//! Floats use Rust's shortest round-trip formatting, so identical values
//! always serialize to identical bytes.

use std::io::Write;

use ndarray::Array2;
use serde::Serialize;

use crate::distributions::{CcdfCurve, PowerLawFit};
use crate::error::Result;
use crate::ingest::{Event, FieldMapping, Trajectory};
use crate::patterns::PatternLabel;
use crate::preference::{ClassifierModel, FeatureSpace};
use crate::randomness::UserRandomness;
use crate::randomwalk::{ExplorationCurve, RankFrequencyCurve};
use crate::temporal::{HourlyProfile, ReturnHistogram};

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn io_err(e: csv::Error) -> crate::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => crate::Error::Io(e),
        other => crate::Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Writes a header and rows of already-formatted fields.
pub fn write_rows<W, R, F>(w: W, header: &[&str], rows: R) -> Result<()>
where
    W: Write,
    R: IntoIterator<Item = Vec<F>>,
    F: AsRef<[u8]>,
{
    let mut out = csv_writer(w);
    out.write_record(header).map_err(io_err)?;
    for row in rows {
        out.write_record(row).map_err(io_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_ccdf<W: Write>(w: W, curve: &[(f64, f64)]) -> Result<()> {
    write_rows(w, &["value", "prob"], curve.iter().map(|(v, p)| vec![v.to_string(), p.to_string()]))
}

pub fn write_count_ccdf<W: Write>(w: W, curve: &CcdfCurve) -> Result<()> {
    write_rows(w, &["value", "prob"], curve.points.iter().map(|(v, p)| vec![v.to_string(), p.to_string()]))
}

pub fn write_fit<W: Write>(w: W, fit: &PowerLawFit) -> Result<()> {
    write_rows(
        w,
        &["exponent", "intercept", "r_squared", "min", "max", "n"],
        [vec![
            fit.exponent.to_string(),
            fit.intercept.to_string(),
            fit.r_squared.to_string(),
            fit.fit_range.0.to_string(),
            fit.fit_range.1.to_string(),
            fit.n_points.to_string(),
        ]],
    )
}

pub fn write_exploration<W: Write>(w: W, curve: &ExplorationCurve) -> Result<()> {
    write_rows(w, &["t", "S"], curve.points.iter().map(|(t, s)| vec![t.to_string(), s.to_string()]))
}

pub fn write_rank_frequency<W: Write>(w: W, curve: &RankFrequencyCurve) -> Result<()> {
    write_rows(w, &["k", "f"], curve.points.iter().map(|(k, f)| vec![k.to_string(), f.to_string()]))
}

pub fn write_returns<W: Write>(w: W, hist: &ReturnHistogram) -> Result<()> {
    write_rows(w, &["t_hours", "prob"], hist.mass().into_iter().map(|(t, p)| vec![t.to_string(), p.to_string()]))
}

pub fn write_hourly<W: Write>(w: W, profile: &HourlyProfile) -> Result<()> {
    write_rows(
        w,
        &["hour", "weekday_share", "weekend_share"],
        (0..24).map(|h| vec![h.to_string(), profile.weekday[h].to_string(), profile.weekend[h].to_string()]),
    )
}

pub fn write_randomness<W: Write>(w: W, users: &[UserRandomness]) -> Result<()> {
    write_rows(
        w,
        &["user", "entropy", "max_frq"],
        users.iter().map(|u| vec![u.user.clone(), u.entropy.to_string(), u.max_frq.to_string()]),
    )
}

/// Matrix with one labelled row per entry of `row_names`.
pub fn write_matrix<W: Write>(
    w: W,
    row_header: &str,
    row_names: &[String],
    column_names: &[String],
    m: &Array2<f64>,
) -> Result<()> {
    let mut header = vec![row_header];
    header.extend(column_names.iter().map(|s| s.as_str()));
    write_rows(
        w,
        &header,
        m.rows().into_iter().zip(row_names).map(|(row, name)| {
            let mut fields = vec![name.clone()];
            fields.extend(row.iter().map(|v| v.to_string()));
            fields
        }),
    )
}

pub fn write_labels<W: Write>(w: W, labels: &[(String, PatternLabel)]) -> Result<()> {
    write_rows(w, &["user", "label"], labels.iter().map(|(u, l)| vec![u.clone(), l.as_str().to_string()]))
}

pub fn write_error_history<W: Write>(w: W, history: &[f64]) -> Result<()> {
    write_rows(
        w,
        &["iteration", "relative_error"],
        history.iter().enumerate().map(|(i, e)| vec![i.to_string(), e.to_string()]),
    )
}

/// Every coefficient of every class, ordered by class then community.
pub fn write_coefficients<W: Write>(w: W, model: &ClassifierModel, space: &FeatureSpace) -> Result<()> {
    let rows = model.classes.iter().enumerate().flat_map(|(k, class)| {
        model.weights[k].iter().enumerate().map(move |(j, c)| {
            vec![class.clone(), space.communities[j].to_string(), c.to_string(), space.user_size[j].to_string()]
        })
    });
    write_rows(w, &["class", "community", "coefficient", "user_size"], rows)
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// One JSON object per event, using the given field names.
pub fn write_events<W: Write>(mut w: W, events: &[Event], mapping: &FieldMapping) -> Result<()> {
    for e in events {
        let mut obj = serde_json::Map::new();
        obj.insert(mapping.user.clone(), e.user.as_ref().into());
        obj.insert(mapping.community.clone(), e.community.as_ref().into());
        obj.insert(mapping.ts.clone(), e.ts.into());
        serde_json::to_writer(&mut w, &obj)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Flattens trajectories into events ordered by time, then user.
pub fn trajectories_to_events(trajectories: &[Trajectory]) -> Vec<Event> {
    let mut events: Vec<Event> = trajectories
        .iter()
        .flat_map(|t| {
            t.visits.iter().map(|v| Event { user: t.user.clone(), community: v.community.clone(), ts: v.ts })
        })
        .collect();
    events.sort_by(|a, b| a.ts.cmp(&b.ts).then_with(|| a.user.cmp(&b.user)));
    events
}

#[derive(Serialize)]
struct TrajectoryLine<'a> {
    user: &'a str,
    visits: Vec<(&'a str, i64)>,
}

/// One JSON object per user: `{"user": .., "visits": [[community, ts], ..]}`.
pub fn write_trajectories<W: Write>(mut w: W, trajectories: &[Trajectory]) -> Result<()> {
    for t in trajectories {
        let line = TrajectoryLine { user: &t.user, visits: t.visits.iter().map(|v| (&*v.community, v.ts)).collect() };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
