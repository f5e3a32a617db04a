//! Worked examples with known answers, one test per operation.

use forcing_lab::forcing::*;
use forcing_lab::formula::*;
use forcing_lab::lab::{self, LabConfig};
use forcing_lab::relativize::*;
use forcing_lab::semantics::*;
use forcing_lab::{Error, HFSet};

fn s(x: &str) -> HFSet {
    x.parse().unwrap()
}

fn n(k: usize) -> HFSet {
    HFSet::from_nat(k)
}

fn v(k: usize) -> HFSet {
    HFSet::v_stage(k).unwrap()
}

fn f(x: &str) -> Formula {
    x.parse().unwrap()
}

#[test]
fn constructors() {
    assert_eq!(member_fm(0, 1), Formula::Member(0, 1));
    assert_eq!(render(&forall_fm(member_fm(0, 1))), "Forall(Mem(0,1))");
    assert_eq!(
        nand_fm(equal_fm(0, 0), equal_fm(0, 0)),
        f("Nand(Eq(0,0),Eq(0,0))")
    );
    assert_eq!(neg_fm(member_fm(0, 1)), f("Nand(Mem(0,1),Mem(0,1))"));
    assert_eq!(
        exists_fm(equal_fm(0, 1)),
        f("Nand(Forall(Nand(Eq(0,1),Eq(0,1))),Forall(Nand(Eq(0,1),Eq(0,1))))")
    );
}

#[test]
fn arity_examples() {
    assert_eq!(arity(&member_fm(0, 1)), 2);
    assert_eq!(arity(&forall_fm(member_fm(0, 1))), 1);
    assert_eq!(arity(&nand_fm(member_fm(0, 0), equal_fm(2, 2))), 3);
    assert_eq!(arity(&Formula::ForcesMem(0, 1)), 4);
    assert_eq!(arity(&Formula::ForcesEq(2, 7)), 8);
}

#[test]
fn lift_examples() {
    assert_eq!(lift(&member_fm(0, 1), 0, 4), member_fm(4, 5));
    assert_eq!(lift(&forall_fm(member_fm(0, 1)), 0, 1), forall_fm(member_fm(0, 2)));
    assert_eq!(lift(&equal_fm(2, 0), 1, 2), equal_fm(4, 0));
}

#[test]
fn parse_and_render() {
    assert_eq!(f("Mem(0,1)"), member_fm(0, 1));
    assert_eq!(
        f("Imp(Mem(0,1),Eq(0,2))"),
        nand_fm(member_fm(0, 1), nand_fm(equal_fm(0, 2), equal_fm(0, 2)))
    );
    assert_eq!(render(&forall_fm(member_fm(0, 1))), "Forall(Mem(0,1))");
    let err = "Mem(0,-1)".parse::<Formula>().unwrap_err();
    assert!(err.to_string().contains("position"));
}

#[test]
fn core_examples() {
    assert!(is_core(&member_fm(0, 1)));
    assert!(!is_core(&Formula::ForcesMem(4, 5)));
    assert!(!is_core(&nand_fm(member_fm(0, 1), Formula::ForcesEq(4, 4))));
}

#[test]
fn hf_kernel_examples() {
    assert_eq!(HFSet::from_elements([n(0), n(0)]), s("{{}}"));
    assert!(forcing_lab::hfset::mem(&n(0), &s("{{}}")));
    assert!(forcing_lab::hfset::subset(&s("{{}}"), &s("{{},{{}}}")));
    assert_eq!(s("{{}}").pow().unwrap(), s("{{},{{}}}"));
    assert_eq!(s("{{{}},{{{}}}}").union_all(), s("{{},{{}}}"));
    assert_eq!(n(0).succ().succ(), n(2));
    assert_eq!(HFSet::kpair(n(0), n(0)), s("{{{}}}"));
    assert_eq!(HFSet::kpair(n(1), n(0)).fst(), n(1));
    assert_eq!(n(1).fst(), n(0));
    assert_eq!(n(3).rank(), 3);
    assert_eq!(v(3), s("{{},{{}},{{{}}},{{},{{}}}}"));
    assert_eq!(v(3).len(), 4);
    assert!(n(2).is_ord());
    assert!(!s("{{{}}}").is_ord());
}

#[test]
fn nth_examples() {
    assert_eq!(nth(0, &[n(1)]), n(1));
    assert_eq!(nth(3, &[n(1)]), n(0));
    assert_eq!(nth(1, &[n(0), n(1)]), n(1));
}

#[test]
fn sats_examples() {
    assert!(sats(&v(2), &[n(0), n(1)], &member_fm(0, 1)).unwrap());
    assert!(!sats(&v(2), &[n(1)], &forall_fm(member_fm(0, 0))).unwrap());
    assert!(sats(&v(2), &[], &axiom_code(AxiomName::Extensionality)).unwrap());
    assert!(!sats(&v(3), &[], &axiom_code(AxiomName::Infinity)).unwrap());
    assert!(sats(&v(3), &[], &axiom_code(AxiomName::UnionAx)).unwrap());
    assert!(matches!(
        sats(&v(2), &[], &Formula::ForcesMem(4, 5)),
        Err(Error::NonCore(_))
    ));
    assert!(matches!(
        sats_strict(&v(2), &[n(0)], &member_fm(0, 1)),
        Err(Error::ArityExceedsEnv { .. })
    ));
    assert!(matches!(
        sats_strict(&v(2), &[n(0), n(5)], &member_fm(0, 1)),
        Err(Error::EnvOutsideModel(_))
    ));
}

/// Extensionality computed directly: distinct elements differ on some member of `m`.
fn extensional(m: &HFSet) -> bool {
    m.iter().all(|a| {
        m.iter()
            .all(|b| a == b || m.iter().any(|z| a.contains(z) != b.contains(z)))
    })
}

#[test]
fn extensionality_code_matches_relation() {
    for k in 0..=4 {
        let m = v(k);
        assert_eq!(
            sats(&m, &[], &axiom_code(AxiomName::Extensionality)).unwrap(),
            extensional(&m),
            "V_{k}"
        );
    }
    let odd = s("{{},{{{}}}}");
    assert_eq!(
        sats(&odd, &[], &axiom_code(AxiomName::Extensionality)).unwrap(),
        extensional(&odd)
    );
}

#[test]
fn scheme_examples() {
    let sep = separation_code(&member_fm(0, 1));
    assert_eq!(sep.arity(), 0);
    assert!(sats(&v(3), &[], &replacement_code(&equal_fm(0, 1))).unwrap());
    assert!(separation_holds(&v(3), &member_fm(0, 1), &[n(1)]).unwrap());
    assert!(replacement_holds(&v(2), &equal_fm(0, 1), &[]).unwrap());

    // M = {0, {{0}}}: the only subsets of elements are 0, and 0 ∈ M.
    let m = s("{{},{{{}}}}");
    let brute = m.iter().all(|z| {
        let sep: Vec<HFSet> = z
            .iter()
            .filter(|x| m.contains(x) && x.contains(x))
            .cloned()
            .collect();
        m.contains(&HFSet::from_elements(sep))
    });
    assert_eq!(separation_holds(&m, &member_fm(0, 0), &[]).unwrap(), brute);
}

#[test]
fn separation_code_agrees_with_direct_check() {
    let phis: Vec<Formula> = lab::enumerate_formulas(1, 1, 2);
    for k in 1..=2 {
        let m = v(k);
        for phi in &phis {
            let params = separation_params(phi);
            let direct = envs(&m, params)
                .iter()
                .all(|e| separation_holds(&m, phi, e).unwrap());
            assert_eq!(
                sats(&m, &[], &separation_code(phi)).unwrap(),
                direct,
                "{phi} in V_{k}"
            );
        }
    }
}

#[test]
fn registry_counts() {
    let r = registry();
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
    assert_eq!(sizes, vec![4, 4, 8, 3, 2, 1]);
    assert_eq!(r.overhead.len(), 7);
    assert_eq!(r.overhead_not_ch.len(), 21);
    assert_eq!(r.overhead_ch.len(), 22);
}

#[test]
fn satisfies_v4() {
    use AxiomName::*;
    let report = satisfies(&v(4), &[Extensionality, Foundation, UnionAx, Infinity]);
    let got: Vec<bool> = report.results.iter().map(|r| r.holds).collect();
    assert_eq!(got, vec![true, true, true, false]);
}

#[test]
fn relational_examples() {
    assert!(rel_pred(PredName::BigUnion, &ClassPred::SetCast(v(3)), &[s("{{{}}}"), n(1)]).unwrap());
    assert!(rel_pred(PredName::Empty, &ClassPred::SetCast(v(2)), &[n(0)]).unwrap());
    assert!(!rel_pred(PredName::Ordinal, &ClassPred::SetCast(v(4)), &[s("{{{}}}")]).unwrap());
    assert_eq!(pow_rel(&v(3), &n(1)), n(2));
    assert_eq!(pow_rel(&n(1), &n(1)), n(1));
    assert_eq!(pow_rel(&v(2), &n(0)), n(1));
    assert_eq!(arity(&big_union_fm(0, 1)), 2);
    assert!(is_core(&big_union_fm(0, 1)));
}

#[test]
fn absoluteness_examples() {
    assert!(absoluteness_check(PredName::BigUnion, &v(3)).unwrap().disagreements.is_empty());
    assert!(absoluteness_check(PredName::Pair, &v(4)).unwrap().disagreements.is_empty());
    assert!(matches!(
        absoluteness_check(PredName::BigUnion, &s("{{{}}}")),
        Err(Error::Model(_))
    ));
}

#[test]
fn notion_examples() {
    let t = ForcingNotion::trivial();
    assert_eq!(t.conditions(), &HFSet::singleton(n(1)));
    let c2 = ForcingNotion::chain2();
    let p = s("{{{}}}");
    assert!(c2.leq(&p, &n(1)));
    let no_refl = mk_forcing_notion(HFSet::upair(n(1), p.clone()), HFSet::singleton(HFSet::kpair(p, n(1))), n(1));
    match no_refl {
        Err(Error::InvalidNotion(which)) => assert_eq!(which, "leq_preord"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn density_examples() {
    let c2 = ForcingNotion::chain2();
    let p = s("{{{}}}");
    assert!(c2.dense(&HFSet::singleton(p)).unwrap());
    assert!(!c2.dense(&HFSet::singleton(n(1))).unwrap());
    let a2 = ForcingNotion::antichain2();
    let (one, a, b) = ForcingNotion::antichain2_labels();
    assert!(!a2.compatible(&a, &b).unwrap());
    let da = HFSet::singleton(a.clone());
    assert!(a2.dense_below(&da, &a).unwrap());
    assert!(!a2.dense_below(&da, &one).unwrap());
}

#[test]
fn generic_filter_examples() {
    let gs = |n: &ForcingNotion| -> Vec<HFSet> {
        generic_filters(n).unwrap().into_iter().map(|g| g.elems).collect()
    };
    assert_eq!(gs(&ForcingNotion::trivial()), vec![HFSet::singleton(n(1))]);
    let p = s("{{{}}}");
    assert_eq!(gs(&ForcingNotion::chain2()), vec![HFSet::upair(p, n(1))]);
    let (one, a, b) = ForcingNotion::antichain2_labels();
    let mut want = vec![HFSet::upair(a, one.clone()), HFSet::upair(b, one)];
    want.sort();
    assert_eq!(gs(&ForcingNotion::antichain2()), want);
}

#[test]
fn val_and_check_examples() {
    let p = s("{{{}}}");
    let g = HFSet::upair(p.clone(), n(1));
    assert_eq!(val(&g, &n(0)), n(0));
    let tau = HFSet::singleton(HFSet::kpair(n(0), p));
    assert_eq!(val(&g, &tau), n(1));
    assert_eq!(val(&HFSet::singleton(n(1)), &tau), n(0));

    let t = ForcingNotion::trivial();
    assert_eq!(check(&t, &n(0)), n(0));
    assert_eq!(check(&t, &n(1)), HFSet::singleton(HFSet::kpair(n(0), n(1))));
    for notion in [ForcingNotion::trivial(), ForcingNotion::chain2()] {
        for g in filters(&notion).unwrap() {
            assert_eq!(val(&g, &g_dot(&notion)), g);
        }
    }
}

#[test]
fn frc_at_examples() {
    let t = ForcingNotion::trivial();
    let one = n(1);
    let c0 = check(&t, &n(0));
    let c1 = check(&t, &n(1));
    assert!(frc_at(&t, &AtomicTuple::new(0, n(0), n(0), one.clone())).unwrap());
    assert!(frc_at(&t, &AtomicTuple::new(1, c0.clone(), c1.clone(), one.clone())).unwrap());
    assert!(!frc_at(&t, &AtomicTuple::new(1, c1.clone(), c1.clone(), one.clone())).unwrap());
    assert!(matches!(
        frc_at(&t, &AtomicTuple::new(1, c0.clone(), c1.clone(), n(0))),
        Err(Error::NotInP(_))
    ));
    assert!(matches!(
        frc_at_strict(&t, &AtomicTuple::new(1, n(1), c1, one)),
        Err(Error::NotAName(_))
    ));
}

#[test]
fn forces_rel_examples() {
    let t = ForcingNotion::trivial();
    let one = n(1);
    let env = [check(&t, &n(0)), check(&t, &n(1))];
    let m = HFSet::singleton(n(0));
    assert!(forces_rel(&m, &t, &one, &env, &member_fm(0, 1)).unwrap());
    assert!(!forces_rel(&m, &t, &one, &env, &neg_fm(member_fm(0, 1))).unwrap());
    assert!(forces_rel(&m, &t, &one, &[], &forall_fm(equal_fm(0, 0))).unwrap());
}

#[test]
fn forces_examples() {
    let g = forces(&member_fm(0, 1)).unwrap();
    assert_eq!(g, Formula::ForcesMem(4, 5));
    assert_eq!(g.arity(), 6);
    assert!(matches!(forces(&g), Err(Error::NonCore(_))));
}

#[test]
fn forces_bridge_small() {
    // sats of forces(φ) under [p,P,leq,1]@env agrees with forces_rel.
    for notion in [ForcingNotion::trivial(), ForcingNotion::chain2()] {
        let ctx = ForcingContext::for_notion(&notion);
        let m = lab::ground_closure(&HFSet::empty(), &notion, 0).unwrap();
        let names: Vec<HFSet> = m.iter().filter(|x| is_name(&notion, x)).cloned().collect();
        for phi in lab::enumerate_formulas(2, 1, 1) {
            let code = forces(&phi).unwrap();
            for tau in &names {
                for p in notion.conditions().iter() {
                    let mut env = vec![
                        p.clone(),
                        notion.conditions().clone(),
                        notion.leq_set().clone(),
                        notion.one().clone(),
                    ];
                    env.push(tau.clone());
                    let via_code = sats_with(&m, &env, &code, Some(&ctx)).unwrap();
                    let direct = forces_rel(&m, &notion, p, &[tau.clone()], &phi).unwrap();
                    assert_eq!(via_code, direct, "{phi} τ={tau} p={p}");
                }
            }
        }
    }
}

#[test]
fn generic_extension_examples() {
    let t = ForcingNotion::trivial();
    let g = HFSet::singleton(n(1));
    assert_eq!(generic_extension(&HFSet::singleton(n(0)), &g), HFSet::singleton(n(0)));
    let m = HFSet::from_elements([n(0), check(&t, &n(1)), t.conditions().clone()]);
    let mg = generic_extension(&m, &g);
    assert!(mg.contains(&n(0)) && mg.contains(&n(1)));
}

#[test]
fn ground_closure_examples() {
    let t = ForcingNotion::trivial();
    let m = lab::ground_closure(&HFSet::empty(), &t, 1).unwrap();
    for x in [
        n(0),
        n(1),
        HFSet::kpair(n(0), n(1)),
        check(&t, &n(1)),
        g_dot(&t),
    ] {
        assert!(m.contains(&x), "{x}");
    }
    assert!(m.is_transset());
}

#[test]
fn density_lemma_examples() {
    let a2 = ForcingNotion::antichain2();
    let (one, a, b) = ForcingNotion::antichain2_labels();
    let zero = check(&a2, &n(0));
    let tau = HFSet::singleton(HFSet::kpair(zero.clone(), a.clone()));
    let m = lab::ground_closure(&tau, &a2, 1).unwrap();
    let env = [zero, tau];
    let phi = member_fm(0, 1);
    let forced = |p: &HFSet| forces_rel(&m, &a2, p, &env, &phi).unwrap();
    assert!(forced(&a));
    assert!(!forced(&one));
    assert!(!forced(&b));
    let d = a2.conditions().filter(|q| forced(q));
    for p in a2.conditions().iter() {
        assert_eq!(forced(p), a2.dense_below(&d, p).unwrap());
    }
}

#[test]
fn truth_lemma_examples() {
    let t = ForcingNotion::trivial();
    let m = lab::ground_closure(&HFSet::empty(), &t, 1).unwrap();
    let env = [check(&t, &n(0)), check(&t, &n(1))];
    let g = HFSet::singleton(n(1));
    let mg = generic_extension(&m, &g);
    let vals: Vec<HFSet> = env.iter().map(|x| val(&g, x)).collect();
    assert!(forces_rel(&m, &t, &n(1), &env, &member_fm(0, 1)).unwrap());
    assert!(sats(&mg, &vals, &member_fm(0, 1)).unwrap());

    let a2 = ForcingNotion::antichain2();
    let (one, a, b) = ForcingNotion::antichain2_labels();
    let zero = check(&a2, &n(0));
    let tau = HFSet::singleton(HFSet::kpair(zero.clone(), a.clone()));
    let m = lab::ground_closure(&tau, &a2, 1).unwrap();
    let env = [zero, tau];
    for (g, want) in [
        (HFSet::upair(a.clone(), one.clone()), true),
        (HFSet::upair(b.clone(), one.clone()), false),
    ] {
        let forced = g
            .iter()
            .any(|p| forces_rel(&m, &a2, p, &env, &member_fm(0, 1)).unwrap());
        let mg = generic_extension(&m, &g);
        let vals: Vec<HFSet> = env.iter().map(|x| val(&g, x)).collect();
        assert_eq!(forced, want);
        assert_eq!(sats(&mg, &vals, &member_fm(0, 1)).unwrap(), want);
    }
}

#[test]
fn powerset_examples() {
    let cfg = LabConfig {
        poset_bound: 1,
        ..LabConfig::default()
    };
    let r = lab::run_powerset_demo(&cfg, Some(&HFSet::empty())).unwrap();
    assert!(r.pass, "{}", r.to_text());
    assert!(r.cases_checked > 0);
    let t = &lab::enumerate_posets(1, lab::Encoding::VonNeumann, true)[0];
    let r = lab::run_powerset_demo(&cfg, Some(&check(t, &n(1)))).unwrap();
    assert!(r.pass, "{}", r.to_text());
}

#[test]
fn definability_examples() {
    let cfg = LabConfig {
        formula_depth_bound: 2,
        formula_size_bound: 2,
        ..LabConfig::default()
    };
    let r = lab::run_definability(&cfg).unwrap();
    assert!(r.pass);
    assert_eq!(r.metrics["member_0_1_forces_arity"], 6);
    for phi in lab::enumerate_formulas(2, 2, 2) {
        if phi.arity() == 0 {
            assert!(forces(&phi).unwrap().arity() <= 4, "{phi}");
        }
    }
}

#[test]
fn extension_examples() {
    let cfg = LabConfig {
        poset_bound: 1,
        ..LabConfig::default()
    };
    let r = lab::run_extension_props(&cfg).unwrap();
    assert!(r.pass);
    assert_eq!(r.metrics["properness_by_poset"][0]["proper"], false);
    assert_eq!(r.metrics["proper_extensions"], 0);
}
