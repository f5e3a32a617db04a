use forcing_lab::lab::{self, LabConfig, ADEQUACY_UNIVERSES};

fn small() -> LabConfig {
    LabConfig {
        poset_bound: 2,
        formula_depth_bound: 2,
        formula_size_bound: 2,
        ..LabConfig::default()
    }
}

#[test]
fn config_round_trips_through_json() {
    let cfg = small();
    let back: LabConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(back, cfg);
    let partial: LabConfig = serde_json::from_str(r#"{"poset_bound": 2}"#).unwrap();
    assert_eq!(partial, LabConfig { poset_bound: 2, ..LabConfig::default() });
}

#[test]
fn unknown_experiment_is_an_error() {
    assert!(lab::run("nope", &small()).is_err());
}

#[test]
fn reports_are_reproducible() {
    for name in ["density", "truth", "check"] {
        let a = lab::run(name, &small()).unwrap();
        let b = lab::run(name, &small()).unwrap();
        assert_eq!(a.to_json(), b.to_json(), "{name}");
        assert!(a.pass, "{name}: {}", a.to_text());
        assert!(a.cases_checked > 0);
    }
}

#[test]
fn truth_splits_failures_by_kind() {
    let r = lab::run_truth(&small()).unwrap();
    assert_eq!(r.metrics["quantifier_free_failures"], 0);
    assert_eq!(r.metrics["quantified_failures"], 0);
}

#[test]
fn adequacy_and_density_agree_on_small_posets() {
    let cfg = small();
    assert!(lab::run_atomic_adequacy(&cfg, &ADEQUACY_UNIVERSES).unwrap().pass);
    assert!(lab::run_density(&cfg).unwrap().pass);
}

#[test]
fn iso_reduction_shrinks_the_sweep() {
    let all = lab::enumerate_posets(3, lab::Encoding::VonNeumann, false);
    let reduced = lab::enumerate_posets(3, lab::Encoding::VonNeumann, true);
    assert!(!reduced.is_empty() && reduced.len() < all.len());
    let sizes = |v: &[forcing_lab::forcing::ForcingNotion]| v.iter().map(|p| p.size()).max();
    assert_eq!(sizes(&reduced), sizes(&all));
}

#[test]
fn counterexamples_are_capped() {
    let cfg = LabConfig { max_counterexamples: 0, ..small() };
    let r = lab::run("definability", &cfg).unwrap();
    assert!(r.counterexamples.is_empty());
}
