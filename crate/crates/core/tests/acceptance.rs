//! Acceptance criteria, one line each. Exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use forcing_lab::forcing;
use forcing_lab::formula::member_fm;
use forcing_lab::hfset::HFSet;
use forcing_lab::lab::{self, LabConfig, LabReport};
use forcing_lab::relativize::{absoluteness_check, big_union_fm, rel_pred, ClassPred, PredName};
use forcing_lab::semantics::{self, envs, nth, separation_holds, separation_params};

type Check = Result<String, String>;

fn v(n: usize) -> HFSet {
    HFSet::v_stage(n).unwrap()
}

fn expect(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn report_check(r: forcing_lab::error::Result<LabReport>) -> Check {
    let r = r.map_err(|e| e.to_string())?;
    let detail = format!("{} cases, {} counterexamples", r.cases_checked, r.counterexamples.len());
    expect(r.pass, detail)
}

fn arity_fact() -> Check {
    let a = forcing::forces(&member_fm(0, 1)).map_err(|e| e.to_string())?.arity();
    expect(a == 6, format!("arity {a}"))
}

fn definability() -> Check {
    let cfg = LabConfig {
        formula_depth_bound: 4,
        max_index: 3,
        ..LabConfig::default()
    };
    let r = lab::run_definability(&cfg).map_err(|e| e.to_string())?;
    let detail = format!(
        "{} classes covering {} formulas, {} class failures",
        r.metrics["classes"], r.metrics["formulas_covered_by_classes"], r.metrics["class_failures"]
    );
    expect(r.pass, detail)
}

fn registry() -> Check {
    let r = semantics::registry();
    let sizes: Vec<usize> = [
        "instances1_fms",
        "instances2_fms",
        "instances3_fms",
        "instances_ground_fms",
        "instances_ground_notCH_fms",
        "instances_ground_CH_fms",
    ]
    .iter()
    .map(|g| r.group(g).len())
    .collect();
    let counts = (r.overhead.len(), r.overhead_not_ch.len(), r.overhead_ch.len());
    expect(
        sizes == [4, 4, 8, 3, 2, 1] && counts == (7, 21, 22),
        format!("groups {sizes:?}, overhead {counts:?}"),
    )
}

fn truth() -> Check {
    let r = lab::run_truth(&LabConfig::default()).map_err(|e| e.to_string())?;
    let qf = r.metrics["quantifier_free_failures"].as_u64().unwrap_or(u64::MAX);
    let q = &r.metrics["quantified_failures"];
    expect(
        qf == 0,
        format!("{} cases, quantifier-free failures {qf}, quantified failures {q}", r.cases_checked),
    )
}

fn transitive_subsets(m: &HFSet) -> Vec<HFSet> {
    let elems = m.elements();
    (1u64..(1 << elems.len()))
        .map(|bits| {
            HFSet::from_elements(
                elems
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits >> i & 1 == 1)
                    .map(|(_, x)| x.clone()),
            )
        })
        .filter(HFSet::is_transset)
        .collect()
}

fn absoluteness() -> Check {
    let models = transitive_subsets(&v(4));
    let (mut checked, mut skipped, mut bad) = (0u64, 0u64, Vec::new());
    for m in &models {
        for name in PredName::ALL {
            let r = absoluteness_check(name, m).map_err(|e| e.to_string())?;
            checked += r.checked;
            skipped += r.skipped;
            if !r.disagreements.is_empty() {
                bad.push(format!("{name} over {m}: {:?}", r.disagreements[0]));
            }
        }
    }
    expect(
        bad.is_empty(),
        format!(
            "{} models, {checked} tuples, {skipped} without witnesses, {} disagreements{}",
            models.len(),
            bad.len(),
            bad.first().map(|b| format!(", first: {b}")).unwrap_or_default()
        ),
    )
}

fn big_union_bridge() -> Check {
    let m = v(3);
    let class = ClassPred::SetCast(m.clone());
    let mut cases = 0u64;
    let mut bad = 0u64;
    for len in 0..=3 {
        for env in envs(&m, len) {
            for a in 0..=3 {
                for z in 0..=3 {
                    let fm = semantics::sats(&m, &env, &big_union_fm(a, z)).map_err(|e| e.to_string())?;
                    let rel = rel_pred(PredName::BigUnion, &class, &[nth(a, &env), nth(z, &env)])
                        .map_err(|e| e.to_string())?;
                    cases += 1;
                    bad += u64::from(fm != rel);
                }
            }
        }
    }
    expect(bad == 0, format!("{cases} cases, {bad} disagreements"))
}

fn separation() -> Check {
    let formulas = lab::enumerate_formulas(2, 3, 3);
    let mut cases = 0u64;
    let mut bad = Vec::new();
    for n in 0..=3 {
        let m = v(n);
        for phi in &formulas {
            for env in envs(&m, separation_params(phi)) {
                cases += 1;
                if !separation_holds(&m, phi, &env).map_err(|e| e.to_string())? {
                    bad.push(format!("V_{n} {phi}"));
                }
            }
        }
    }
    expect(
        bad.is_empty(),
        format!("{} formulas, {cases} instances, {} failures", formulas.len(), bad.len()),
    )
}

fn determinism() -> Check {
    let cfg = LabConfig {
        poset_bound: 2,
        formula_depth_bound: 2,
        formula_size_bound: 2,
        ..LabConfig::default()
    };
    let mut differing = Vec::new();
    for name in lab::EXPERIMENTS {
        let a = lab::run(name, &cfg).map_err(|e| e.to_string())?.to_json();
        let b = lab::run(name, &cfg).map_err(|e| e.to_string())?.to_json();
        if a != b {
            differing.push(*name);
        }
    }
    expect(
        differing.is_empty(),
        format!("{} experiments, differing: {differing:?}", lab::EXPERIMENTS.len()),
    )
}

fn main() -> ExitCode {
    let defaults = LabConfig::default();
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Check>)> = vec![
        ("arity_of_forces_member", Duration::from_secs(1), Box::new(arity_fact)),
        ("definability_bound", Duration::from_secs(10), Box::new(definability)),
        ("registry_counts", Duration::from_secs(1), Box::new(registry)),
        (
            "atomic_adequacy",
            Duration::from_secs(300),
            Box::new(move || report_check(lab::run("adequacy", &defaults.clone()))),
        ),
        (
            "density_sweep",
            Duration::from_secs(600),
            Box::new(|| report_check(lab::run_density(&LabConfig::default()))),
        ),
        ("truth_sweep", Duration::from_secs(900), Box::new(truth)),
        (
            "check_and_generic_name_identities",
            Duration::from_secs(60),
            Box::new(|| report_check(lab::run_check_identities(&LabConfig::default(), 5))),
        ),
        ("absoluteness_suite", Duration::from_secs(300), Box::new(absoluteness)),
        ("big_union_bridge", Duration::from_secs(60), Box::new(big_union_bridge)),
        ("separation_in_rank_stages", Duration::from_secs(120), Box::new(separation)),
        (
            "powerset_demo",
            Duration::from_secs(300),
            Box::new(|| {
                let cfg = LabConfig {
                    poset_bound: 2,
                    ..LabConfig::default()
                };
                report_check(lab::run_powerset_demo(&cfg, None))
            }),
        ),
        ("determinism", Duration::from_secs(600), Box::new(determinism)),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, budget, check) in &criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let in_time = took <= *budget;
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {name} ({:.2}s, budget {}s): {detail}{}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { " [over budget]" }
        );
    }
    println!("acceptance: {} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
