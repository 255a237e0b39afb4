use cybermob::distributions::ccdf_of_counts;
use cybermob::ingest::{build_trajectories, clean, parse_events, CleaningOptions, FieldMapping, ParseOptions};
use cybermob::output::{trajectories_to_events, write_events};
use cybermob::randomness::{entropy_of_counts, randomness_all};
use cybermob::synth::{simulate_epr, EprParams};
use proptest::prelude::*;

#[test]
fn simulated_log_survives_a_write_parse_round_trip() {
    let params = EprParams { n_steps: 300, seed: 9, ..EprParams::default() };
    let mut original = simulate_epr(&params, 40).unwrap();
    let mut buf = Vec::new();
    write_events(&mut buf, &trajectories_to_events(&original), &FieldMapping::default()).unwrap();

    let parsed = parse_events(buf.as_slice(), &ParseOptions::default()).unwrap();
    assert_eq!(parsed.errors, 0);
    let (events, report) = clean(parsed.events, 0, &CleaningOptions::default());
    assert_eq!(report.removed_deleted + report.removed_nonhuman, 0);
    let mut rebuilt = build_trajectories(events);
    original.sort_by(|a, b| a.user.cmp(&b.user));
    rebuilt.sort_by(|a, b| a.user.cmp(&b.user));
    assert_eq!(original, rebuilt);

    let scores = randomness_all(&rebuilt).unwrap();
    assert!(scores.iter().all(|s| s.entropy >= -s.max_frq.log2() - 1e-12));
}

proptest! {
    #[test]
    fn entropy_lies_between_min_entropy_and_log_support(counts in prop::collection::vec(1u64..500, 1..40)) {
        let total: u64 = counts.iter().sum();
        let h = entropy_of_counts(counts.iter().copied(), total);
        let max_frq = *counts.iter().max().unwrap() as f64 / total as f64;
        prop_assert!(h >= -max_frq.log2() - 1e-12);
        prop_assert!(h <= (counts.len() as f64).log2() + 1e-12);
    }

    #[test]
    fn ccdf_starts_at_one_and_never_increases(counts in prop::collection::vec(1u64..1000, 1..200)) {
        let curve = ccdf_of_counts(&counts).unwrap();
        prop_assert_eq!(curve.points[0].1, 1.0);
        for w in curve.points.windows(2) {
            prop_assert!(w[0].0 < w[1].0);
            prop_assert!(w[1].1 < w[0].1);
        }
    }
}
