use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use cybermob::distributions::{
    ccdf, community_visit_counts, fit_loglog, user_visit_counts, FitRange, PowerLawFit,
};
use cybermob::ingest::{
    build_trajectories, clean, parse_events, slice_by_time, CleaningOptions, CleaningReport, Event, FieldMapping,
    NonhumanMatcher, ParseMode, ParseOptions, TermAnchor,
};
use cybermob::output;
use cybermob::patterns::nmf::NmfOptions;
use cybermob::patterns::{analyze_patterns, select_departed_users, PatternLabel, PatternOptions, Scaling};
use cybermob::preference::{classify, top_coefficients, ClassificationOptions, TrainOptions};
use cybermob::randomness::{active_filter, randomness_all, randomness_distribution};
use cybermob::randomwalk::{exploration_curve, fit_mu, fit_zeta, zipf_curve, ZipfSelection};
use cybermob::synth::{
    default_cohorts, simulate_epr, simulate_pattern_cohorts, simulate_periodic_returners, simulate_zipf_users, Arrival,
    CohortOptions, EprParams, PeriodicParams,
};
use cybermob::temporal::{hourly_profile_of, return_probability, TimezoneMap};
use cybermob::Trajectory;

use crate::args::{
    ActiveArgs, Anchor, ClassifyArgs, Cmd, ExploreArgs, FitArgs, InputArgs, Model, PatternArgs, SimulateArgs,
    TemporalArgs, ZipfArgs,
};
use crate::error::{CliError, ErrorKind};
use crate::manifest::{digest_file, RunManifest, Rows, StepRecord, StepStatus, Timer};

type CliResult<T> = Result<T, CliError>;

/// Output directory plus the manifest being assembled.
pub struct Run {
    pub out: PathBuf,
    pub manifest: RunManifest,
    /// In `all`, analyses that lack data are skipped instead of failing.
    tolerant: bool,
}

impl Run {
    pub fn new(out: PathBuf, manifest: RunManifest) -> Self {
        Run { out, manifest, tolerant: false }
    }

    fn create(&mut self, name: &str) -> CliResult<BufWriter<File>> {
        let path = self.out.join(name);
        let file = File::create(&path).map_err(|e| CliError::runtime(format!("cannot create {}: {e}", path.display())))?;
        self.manifest.outputs.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    fn write<F>(&mut self, name: &str, f: F) -> CliResult<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> cybermob::Result<()>,
    {
        let mut w = self.create(name)?;
        f(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn warn(&mut self, message: impl Into<String>) {
        self.manifest.warnings.push(message.into());
    }

    /// Times `f` and records it as a step.
    fn step<T>(&mut self, name: &str, f: impl FnOnce(&mut Run, &mut Rows) -> CliResult<T>) -> CliResult<Option<T>> {
        let timer = Timer::start();
        let mut rows = Rows::default();
        let result = f(self, &mut rows);
        let (status, note, value) = match result {
            Ok(v) => (StepStatus::Ok, None, Ok(Some(v))),
            Err(e) if self.tolerant && e.kind == ErrorKind::Data => {
                let note = e.message.clone();
                self.warn(format!("{name} skipped: {note}"));
                (StepStatus::Skipped, Some(note), Ok(None))
            }
            Err(e) => (StepStatus::Failed, Some(e.message.clone()), Err(e)),
        };
        self.manifest.steps.push(StepRecord { name: name.to_string(), status, rows: rows.0, millis: timer.millis(), note });
        value
    }
}

pub fn record_inputs(run: &mut Run, input: &InputArgs) -> CliResult<()> {
    for path in &input.input {
        if !path.is_file() {
            return Err(CliError::usage(format!("input file {} does not exist", path.display())));
        }
        let digest = digest_file(path).map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
        run.manifest.inputs.push(digest);
    }
    Ok(())
}

fn mapping(input: &InputArgs) -> FieldMapping {
    FieldMapping { user: input.field_user.clone(), community: input.field_community.clone(), ts: input.field_ts.clone() }
}

fn cleaning_options(input: &InputArgs) -> CliResult<CleaningOptions> {
    let anchor = match input.anchor {
        Anchor::Anywhere => TermAnchor::Anywhere,
        Anchor::Edges => TermAnchor::Edges,
    };
    Ok(CleaningOptions {
        matcher: NonhumanMatcher::new(&input.bot_terms, !input.case_insensitive, anchor)?,
        candidate_threshold: input.candidate_threshold,
    })
}

/// Parses every input file and cleans the combined events.
fn load_events(run: &mut Run, input: &InputArgs) -> CliResult<(Vec<Event>, CleaningReport)> {
    let opts = ParseOptions {
        mapping: mapping(input),
        mode: if input.strict { ParseMode::Strict } else { ParseMode::Lenient },
        bounds: None,
    };
    let cleaning = cleaning_options(input)?;
    let loaded = run.step("ingest", |run, rows| {
        let mut events = Vec::new();
        let mut lines = 0;
        let mut malformed = 0;
        for path in &input.input {
            let file = File::open(path).map_err(|e| CliError::runtime(format!("cannot open {}: {e}", path.display())))?;
            let parsed = parse_events(BufReader::with_capacity(1 << 20, file), &opts).map_err(|e| match e {
                cybermob::Error::Parse { .. } => CliError::runtime(format!("{}: {e}", path.display())),
                other => other.into(),
            })?;
            lines += parsed.lines;
            malformed += parsed.errors;
            for sample in parsed.error_samples {
                run.warn(format!("{}: {sample}", path.display()));
            }
            events.extend(parsed.events);
        }
        rows.set("lines", lines);
        rows.set("malformed", malformed);
        if let (Some(start), Some(end)) = (input.start, input.end) {
            events = slice_by_time(events, start, end)?;
        }
        rows.set("events", events.len());
        Ok((events, malformed))
    })?;
    let (events, malformed) = loaded.expect("ingest is never skipped");
    let cleaned = run.step("clean", |_, rows| {
        let (events, report) = clean(events, malformed as u64, &cleaning);
        rows.set("removed_deleted", report.removed_deleted);
        rows.set("removed_nonhuman", report.removed_nonhuman);
        rows.set("events", events.len());
        if events.is_empty() {
            return Err(CliError::runtime("no events left after parsing and cleaning"));
        }
        Ok((events, report))
    })?;
    Ok(cleaned.expect("clean is never skipped"))
}

fn load_trajectories(run: &mut Run, input: &InputArgs) -> CliResult<Vec<Trajectory>> {
    let (events, report) = load_events(run, input)?;
    run.write("cleaning_report.json", |w| output::write_json(w, &report))?;
    let trajs = run.step("trajectories", |_, rows| {
        let trajs = build_trajectories(events);
        rows.set("users", trajs.len());
        Ok(trajs)
    })?;
    Ok(trajs.expect("trajectories are never skipped"))
}

fn fit_range(fit: &FitArgs) -> CliResult<Option<FitRange>> {
    match (fit.fit_min, fit.fit_max) {
        (None, None) => Ok(None),
        (min, max) => Ok(Some(FitRange::new(min.unwrap_or(f64::MIN_POSITIVE), max.unwrap_or(f64::INFINITY))?)),
    }
}

fn run_dist(run: &mut Run, trajs: &[Trajectory], fit: &FitArgs) -> CliResult<()> {
    let range = fit_range(fit)?;
    run.step("dist", |run, rows| {
        for (name, hist) in [("community", community_visit_counts(trajs)), ("user", user_visit_counts(trajs))] {
            let curve = ccdf(&hist)?;
            rows.set(&format!("{name}_keys"), hist.len());
            run.write(&format!("{name}_visits_ccdf.csv"), |w| output::write_count_ccdf(w, &curve))?;
            match fit_loglog(&curve.as_f64_points(), range) {
                Ok(f) => run.write(&format!("{name}_visits_fit.csv"), |w| output::write_fit(w, &f))?,
                Err(e) => run.warn(format!("{name} visit fit skipped: {e}")),
            }
        }
        Ok(())
    })?;
    Ok(())
}

fn run_explore(run: &mut Run, trajs: &[Trajectory], args: &ExploreArgs, fit: &FitArgs) -> CliResult<()> {
    let range = fit_range(fit)?;
    run.step("explore", |run, rows| {
        let curve = exploration_curve(trajs, args.horizon)?;
        rows.set("users", curve.n_users);
        run.write("exploration.csv", |w| output::write_exploration(w, &curve))?;
        let mu = fit_mu(&curve, range)?;
        run.write("mu_fit.csv", |w| output::write_fit(w, &mu))?;
        Ok(())
    })?;
    Ok(())
}

fn run_zipf(run: &mut Run, trajs: &[Trajectory], args: &ZipfArgs, fit: &FitArgs) -> CliResult<()> {
    let range = fit_range(fit)?;
    let selection = match args.s_max {
        Some(max) => ZipfSelection::Range { max },
        None => ZipfSelection::Exact,
    };
    run.step("zipf", |run, rows| {
        let mut fits: Vec<(usize, PowerLawFit)> = Vec::new();
        for &s in &args.s_values {
            let curve = match zipf_curve(trajs, s, selection) {
                Ok(c) => c,
                Err(cybermob::Error::InsufficientData(msg)) => {
                    run.warn(format!("zipf S={s} skipped: {msg}"));
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            rows.set(&format!("users_s{s}"), curve.n_users);
            run.write(&format!("zipf_S{s}.csv"), |w| output::write_rank_frequency(w, &curve))?;
            match fit_zeta(&curve, range) {
                Ok(f) => fits.push((s, f)),
                Err(e) => run.warn(format!("zeta fit for S={s} skipped: {e}")),
            }
        }
        if fits.is_empty() {
            return Err(CliError { kind: ErrorKind::Data, message: "no S value produced a fitted curve".into() });
        }
        let header = ["S", "exponent", "intercept", "r_squared", "min", "max", "n"];
        let table = fits.iter().map(|(s, f)| {
            vec![
                s.to_string(),
                f.exponent.to_string(),
                f.intercept.to_string(),
                f.r_squared.to_string(),
                f.fit_range.0.to_string(),
                f.fit_range.1.to_string(),
                f.n_points.to_string(),
            ]
        });
        let table: Vec<Vec<String>> = table.collect();
        run.write("zeta_fit.csv", |w| output::write_rows(w, &header, table))?;
        Ok(())
    })?;
    Ok(())
}

fn run_temporal(run: &mut Run, trajs: &[Trajectory], args: &TemporalArgs) -> CliResult<()> {
    let mut tz = TimezoneMap::builtin();
    if let Some(path) = &args.tz_map {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read timezone map {}: {e}", path.display())))?;
        tz.extend_from_str(&text).map_err(|e| CliError::usage(format!("timezone map {}: {e}", path.display())))?;
    }
    run.step("returns", |run, rows| {
        let hist = return_probability(trajs, args.max_hours)?;
        rows.set("gaps", hist.n_gaps);
        rows.set("binned", hist.binned());
        run.write("returns.csv", |w| output::write_returns(w, &hist))?;
        Ok(())
    })?;
    run.step("hourly", |run, rows| {
        let visits = trajs.iter().flat_map(|t| t.visits.iter().map(|v| (&*v.community, v.ts)));
        let profile = match hourly_profile_of(visits, &tz, args.communities.as_deref()) {
            Ok(p) => p,
            Err(cybermob::Error::EmptyInput(msg)) if args.communities.is_none() => {
                run.warn(format!("hourly profile skipped: {msg}"));
                return Ok(());
            }
            Err(e) => return Err(e.into()),
        };
        rows.set("weekday_posts", profile.weekday_posts);
        rows.set("weekend_posts", profile.weekend_posts);
        run.write("hourly.csv", |w| output::write_hourly(w, &profile))?;
        Ok(())
    })?;
    Ok(())
}

#[derive(Serialize)]
struct RandomnessSummaryOut<'a> {
    n_users: usize,
    min_distinct: usize,
    min_visits: usize,
    fractions: &'a cybermob::randomness::ThresholdFractions,
}

fn run_randomness(run: &mut Run, trajs: &[Trajectory], active: &ActiveArgs) -> CliResult<()> {
    run.step("randomness", |run, rows| {
        let users = active_filter(trajs, active.min_distinct, active.min_visits);
        rows.set("active_users", users.len());
        let scores = randomness_all(&users)?;
        let summary = randomness_distribution(&scores)?;
        run.write("randomness.csv", |w| output::write_randomness(w, &scores))?;
        run.write("entropy_ccdf.csv", |w| output::write_ccdf(w, &summary.entropy_ccdf))?;
        run.write("max_frq_ccdf.csv", |w| output::write_ccdf(w, &summary.max_frq_ccdf))?;
        let out = RandomnessSummaryOut {
            n_users: summary.n_users,
            min_distinct: active.min_distinct,
            min_visits: active.min_visits,
            fractions: &summary.fractions,
        };
        run.write("randomness_summary.json", |w| output::write_json(w, &out))?;
        Ok(())
    })?;
    Ok(())
}

#[derive(Serialize)]
struct PatternSummary<'a> {
    users: usize,
    num_stages: usize,
    k: usize,
    scaling: &'a str,
    seed: u64,
    iterations: usize,
    converged: bool,
    relative_error: f64,
    component_labels: Option<Vec<&'static str>>,
    profiles: &'a [cybermob::patterns::ComponentProfile],
    counts: Option<Vec<(&'static str, usize)>>,
}

/// Returns per-user labels when `k = 3`.
fn run_patterns(
    run: &mut Run,
    trajs: &[Trajectory],
    active: &ActiveArgs,
    args: &PatternArgs,
    write: bool,
) -> CliResult<Option<Vec<(String, PatternLabel)>>> {
    let scaling: Scaling = args.scaling.parse()?;
    let opts = PatternOptions {
        num_stages: args.stages,
        scaling,
        nmf: NmfOptions { k: args.k, max_iter: args.nmf_max_iter, tol: args.nmf_tol, seed: args.nmf_seed },
    };
    let labels = run.step("patterns", |run, rows| {
        let users = match args.cutoff {
            Some(cutoff) => select_departed_users(trajs, cutoff, active.min_distinct, active.min_visits),
            None => active_filter(trajs, active.min_distinct, active.min_visits),
        };
        rows.set("users", users.len());
        if users.is_empty() {
            return Err(CliError { kind: ErrorKind::Data, message: "no user qualifies for pattern analysis".into() });
        }
        let analysis = analyze_patterns(&users, &opts)?;
        rows.set("iterations", analysis.model.iterations);
        let names: Vec<String> = match &analysis.component_labels {
            Some(l) => l.iter().map(|l| l.as_str().to_string()).collect(),
            None => (0..args.k).map(|i| format!("c{i}")).collect(),
        };
        let labels: Option<Vec<(String, PatternLabel)>> = analysis
            .assignments
            .as_ref()
            .map(|a| analysis.matrix.users.iter().cloned().zip(a.iter().copied()).collect());
        if write {
            let m = &analysis.matrix;
            run.write("W.csv", |w| output::write_matrix(w, "user", &m.users, &names, &analysis.model.w))?;
            run.write("H.csv", |w| output::write_matrix(w, "component", &names, &m.columns, &analysis.model.h))?;
            run.write("nmf_error.csv", |w| output::write_error_history(w, &analysis.model.error_history))?;
            if let Some(l) = &labels {
                run.write("labels.csv", |w| output::write_labels(w, l))?;
            }
            let counts = labels.as_ref().map(|l| {
                PatternLabel::ALL.iter().map(|p| (p.as_str(), l.iter().filter(|(_, x)| x == p).count())).collect()
            });
            let summary = PatternSummary {
                users: m.users.len(),
                num_stages: args.stages,
                k: args.k,
                scaling: &args.scaling,
                seed: args.nmf_seed,
                iterations: analysis.model.iterations,
                converged: analysis.model.converged,
                relative_error: analysis.model.relative_error(),
                component_labels: analysis.component_labels.as_ref().map(|l| l.iter().map(|x| x.as_str()).collect()),
                profiles: &analysis.profiles,
                counts,
            };
            run.write("patterns_summary.json", |w| output::write_json(w, &summary))?;
        }
        Ok(labels)
    })?;
    Ok(labels.flatten())
}

fn read_labels(path: &Path) -> CliResult<Vec<(String, String)>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::usage(format!("cannot read labels {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::usage(format!("labels {}: {e}", path.display())))?;
        match (record.get(0), record.get(1)) {
            (Some(u), Some(l)) => out.push((u.to_string(), l.to_string())),
            _ => return Err(CliError::usage(format!("labels {}: expected user,label rows", path.display()))),
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct SplitInfo {
    train: usize,
    test: usize,
    train_fraction: f64,
    stratified: bool,
    seed: u64,
}

#[derive(Serialize)]
struct ModelInfo {
    l2: f64,
    iterations: usize,
    converged: bool,
    grad_norm: f64,
    final_loss: f64,
}

#[derive(Serialize)]
struct ClassificationReport<'a> {
    tfidf: &'static str,
    min_users: usize,
    n_features: usize,
    n_users: usize,
    excluded_users: usize,
    split: SplitInfo,
    model: ModelInfo,
    metrics: &'a cybermob::preference::EvalReport,
}

fn run_classify(
    run: &mut Run,
    trajs: &[Trajectory],
    args: &ClassifyArgs,
    derived: Option<Vec<(String, PatternLabel)>>,
) -> CliResult<()> {
    let raw: Vec<(String, String)> = match (&args.labels, derived) {
        (Some(path), _) => read_labels(path)?,
        (None, Some(labels)) => labels.into_iter().map(|(u, l)| (u, l.as_str().to_string())).collect(),
        (None, None) => {
            return Err(CliError { kind: ErrorKind::Data, message: "no labels available for classification".into() })
        }
    };
    run.step("classify", |run, rows| {
        let pattern_names: Vec<String> = PatternLabel::ALL.iter().map(|l| l.as_str().to_string()).collect();
        let classes: Vec<String> = if raw.iter().all(|(_, l)| pattern_names.contains(l)) {
            pattern_names
        } else {
            raw.iter().map(|(_, l)| l.clone()).collect::<BTreeSet<_>>().into_iter().collect()
        };
        let labels: HashMap<String, usize> =
            raw.iter().map(|(u, l)| (u.clone(), classes.iter().position(|c| c == l).expect("class listed"))).collect();
        let opts = ClassificationOptions {
            min_users: args.min_users,
            train_fraction: args.train_fraction,
            stratified: args.stratified,
            seed: args.seed,
            train: TrainOptions { l2: args.l2, max_iter: args.lr_max_iter, ..TrainOptions::default() },
        };
        let result = classify(trajs, &labels, &classes, &opts)?;
        rows.set("features", result.space.len());
        rows.set("train", result.split.train.len());
        rows.set("test", result.split.test.len());
        for w in &result.report.warnings {
            run.warn(format!("classify: {w}"));
        }
        let report = ClassificationReport {
            tfidf: result.features.formula,
            min_users: args.min_users,
            n_features: result.space.len(),
            n_users: result.features.users.len(),
            excluded_users: result.excluded_users.len(),
            split: SplitInfo {
                train: result.split.train.len(),
                test: result.split.test.len(),
                train_fraction: args.train_fraction,
                stratified: args.stratified,
                seed: args.seed,
            },
            model: ModelInfo {
                l2: result.model.l2,
                iterations: result.model.iterations,
                converged: result.model.converged,
                grad_norm: result.model.grad_norm,
                final_loss: *result.model.loss_history.last().unwrap_or(&f64::NAN),
            },
            metrics: &result.report,
        };
        run.write("report.json", |w| output::write_json(w, &report))?;
        run.write("coefficients.csv", |w| output::write_coefficients(w, &result.model, &result.space))?;
        let mut top_rows = Vec::new();
        for (k, class) in classes.iter().enumerate() {
            let (pos, neg) = top_coefficients(&result.model, k, args.top)?;
            for (direction, list) in [("positive", pos), ("negative", neg)] {
                for (rank, (community, coef)) in list.into_iter().enumerate() {
                    let size = result.space.column(&community).map(|j| result.space.user_size[j]).unwrap_or(0);
                    top_rows.push(vec![
                        class.clone(),
                        direction.to_string(),
                        (rank + 1).to_string(),
                        community,
                        coef.to_string(),
                        size.to_string(),
                    ]);
                }
            }
        }
        run.write("top_coefficients.csv", |w| {
            output::write_rows(w, &["class", "direction", "rank", "community", "coefficient", "user_size"], top_rows)
        })?;
        Ok(())
    })?;
    Ok(())
}

fn run_simulate(run: &mut Run, sim: &SimulateArgs) -> CliResult<()> {
    run.step("simulate", |run, rows| {
        let mut labels = None;
        let trajs = match sim.model {
            Model::Epr => {
                let params = EprParams {
                    rho: sim.rho,
                    gamma: sim.gamma,
                    n_steps: sim.steps,
                    inter_event_seconds: sim.inter_event_seconds,
                    arrival: if sim.poisson { Arrival::Poisson } else { Arrival::Regular },
                    seed: sim.seed,
                    ..EprParams::default()
                };
                simulate_epr(&params, sim.users)?
            }
            Model::Zipf => simulate_zipf_users(sim.s, sim.zeta, sim.visits.unwrap_or(10_000), sim.users, sim.seed)?,
            Model::Periodic => simulate_periodic_returners(&PeriodicParams {
                n_users: sim.users,
                period_hours: sim.period_hours,
                jitter_seconds: sim.jitter_seconds,
                n_visits: sim.visits.unwrap_or(PeriodicParams::default().n_visits),
                attendance: sim.attendance,
                session_posts: sim.session_posts,
                seed: sim.seed,
                ..PeriodicParams::default()
            })?,
            Model::Cohorts => {
                let opts = CohortOptions {
                    visits_per_user: sim.visits.unwrap_or(CohortOptions::default().visits_per_user),
                    num_stages: sim.stages,
                    ..CohortOptions::default()
                };
                let pop = simulate_pattern_cohorts(&default_cohorts(sim.users, sim.seed), &opts)?;
                labels = Some(pop.labels);
                pop.trajectories
            }
        };
        let events = output::trajectories_to_events(&trajs);
        rows.set("users", trajs.len());
        rows.set("events", events.len());
        run.write("events.jsonl", |w| output::write_events(w, &events, &FieldMapping::default()))?;
        if let Some(l) = labels {
            run.write("labels.csv", |w| output::write_labels(w, &l))?;
        }
        Ok(())
    })?;
    Ok(())
}

fn run_overlays(run: &mut Run) -> CliResult<()> {
    run.step("overlays", |run, _| {
        let constants = vec![
            vec!["mu", "0.6", "0.02", "exploration exponent of S(t) in physical space"],
            vec!["zeta", "1.2", "0.1", "Zipf exponent of visit frequency in physical space"],
        ];
        run.write("reference_constants.csv", |w| {
            output::write_rows(w, &["quantity", "value", "uncertainty", "description"], constants)
        })?;
        // Only qualitative landmarks are available for the hourly curves.
        let landmarks = vec![
            vec!["weekday", "9", "9", "peak", "morning rush hour"],
            vec!["weekday", "19", "19", "peak", "evening peak"],
            vec!["weekday", "9", "17", "low", "work hours"],
            vec!["weekend", "6", "12", "rising", "rapid increase through the morning"],
            vec!["weekend", "14", "21", "high", "sustained high level"],
        ];
        run.write("reference_hourly_landmarks.csv", |w| {
            output::write_rows(w, &["day_type", "start_hour", "end_hour", "level", "description"], landmarks)
        })?;
        Ok(())
    })?;
    Ok(())
}

pub fn execute(run: &mut Run, cmd: &Cmd) -> CliResult<()> {
    if let Some(input) = cmd.input() {
        record_inputs(run, input)?;
    }
    match cmd {
        Cmd::Clean { input, .. } => {
            let (events, report) = load_events(run, input)?;
            run.write("cleaning_report.json", |w| output::write_json(w, &report))?;
            let map = mapping(input);
            run.write("events.jsonl", |w| output::write_events(w, &events, &map))?;
            let candidates: Vec<Vec<String>> =
                report.flagged_candidates.iter().map(|(u, n)| vec![u.clone(), n.to_string()]).collect();
            run.write("candidates.csv", |w| output::write_rows(w, &["user", "posts"], candidates))?;
        }
        Cmd::Trajectories { input, .. } => {
            let trajs = load_trajectories(run, input)?;
            run.write("trajectories.jsonl", |w| output::write_trajectories(w, &trajs))?;
        }
        Cmd::Dist { input, fit, .. } => {
            let trajs = load_trajectories(run, input)?;
            run_dist(run, &trajs, fit)?;
        }
        Cmd::Explore { input, explore, fit, .. } => {
            let trajs = load_trajectories(run, input)?;
            run_explore(run, &trajs, explore, fit)?;
        }
        Cmd::Zipf { input, zipf, fit, .. } => {
            let trajs = load_trajectories(run, input)?;
            run_zipf(run, &trajs, zipf, fit)?;
        }
        Cmd::Temporal { input, temporal, .. } => {
            let trajs = load_trajectories(run, input)?;
            run_temporal(run, &trajs, temporal)?;
        }
        Cmd::Randomness { input, active, .. } => {
            let trajs = load_trajectories(run, input)?;
            run_randomness(run, &trajs, active)?;
        }
        Cmd::Patterns { input, active, patterns, .. } => {
            let trajs = load_trajectories(run, input)?;
            run_patterns(run, &trajs, active, patterns, true)?;
        }
        Cmd::Classify { input, active, patterns, classify, .. } => {
            let trajs = load_trajectories(run, input)?;
            let derived =
                if classify.labels.is_none() { run_patterns(run, &trajs, active, patterns, false)? } else { None };
            run_classify(run, &trajs, classify, derived)?;
        }
        Cmd::Simulate { sim, .. } => run_simulate(run, sim)?,
        Cmd::All { input, fit, explore, zipf, temporal, active, patterns, classify, .. } => {
            let trajs = load_trajectories(run, input)?;
            run.tolerant = true;
            run_dist(run, &trajs, fit)?;
            run_explore(run, &trajs, explore, fit)?;
            run_zipf(run, &trajs, zipf, fit)?;
            run_temporal(run, &trajs, temporal)?;
            run_randomness(run, &trajs, active)?;
            let derived = run_patterns(run, &trajs, active, patterns, true)?;
            match run_classify(run, &trajs, classify, derived) {
                Err(e) if e.kind == ErrorKind::Data => run.warn(format!("classify skipped: {}", e.message)),
                other => other?,
            }
        }
        Cmd::Overlays { .. } => run_overlays(run)?,
    }
    Ok(())
}
