use std::sync::Arc;

use proptest::prelude::*;

use forcing_lab::forcing::*;
use forcing_lab::formula::*;
use forcing_lab::lab::{self, enumerate_names, enumerate_posets, Encoding, NameUniverse};
use forcing_lab::relativize::*;
use forcing_lab::semantics::*;
use forcing_lab::HFSet;

fn v(k: usize) -> HFSet {
    HFSet::v_stage(k).unwrap()
}

fn core_formula(depth: u32, max_index: usize) -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (0..=max_index, 0..=max_index).prop_map(|(i, j)| member_fm(i, j)),
        (0..=max_index, 0..=max_index).prop_map(|(i, j)| equal_fm(i, j)),
    ];
    atom.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| nand_fm(a, b)),
            inner.prop_map(forall_fm),
        ]
    })
}

fn any_formula(depth: u32) -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (0..6usize, 0..6usize).prop_map(|(i, j)| member_fm(i, j)),
        (0..6usize, 0..6usize).prop_map(|(i, j)| equal_fm(i, j)),
        (0..9usize, 0..9usize).prop_map(|(i, j)| Formula::ForcesMem(i, j)),
        (0..9usize, 0..9usize).prop_map(|(i, j)| Formula::ForcesEq(i, j)),
    ];
    atom.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| nand_fm(a, b)),
            inner.prop_map(forall_fm),
        ]
    })
}

/// Subsets of `V_4`, i.e. elements of `V_5`.
fn small_set() -> impl Strategy<Value = HFSet> {
    any::<u16>().prop_map(|mask| {
        let base = v(4);
        HFSet::from_elements(
            base.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, x)| x.clone()),
        )
    })
}

/// The arity equations, restated independently of the library.
fn expected_arity(p: &Formula) -> usize {
    match p {
        Formula::Member(i, j) | Formula::Equal(i, j) => (i + 1).max(j + 1),
        Formula::Nand(a, b) => expected_arity(a).max(expected_arity(b)),
        Formula::Forall(a) => expected_arity(a).saturating_sub(1),
        Formula::ForcesMem(i, j) | Formula::ForcesEq(i, j) => 4.max(i + 1).max(j + 1),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lift_shifts_arity(p in core_formula(4, 5), k in 0usize..5) {
        let a = p.arity();
        let lifted = lift(&p, 0, k);
        prop_assert_eq!(lifted.arity(), if a > 0 { a + k } else { 0 });
    }

    #[test]
    fn lift_shifts_explicit_indices_of_forcing_atoms(i in 0usize..9, j in 0usize..9, k in 0usize..5) {
        // The condition, poset, order and top are read at 0..3 wherever the atom sits.
        prop_assert_eq!(lift(&Formula::ForcesMem(i, j), 0, k), Formula::ForcesMem(i + k, j + k));
        prop_assert_eq!(lift(&Formula::ForcesEq(i, j), 0, k).arity(), 4.max(i + k + 1).max(j + k + 1));
    }

    #[test]
    fn render_parse_round_trip(p in any_formula(5)) {
        let back: Formula = render(&p).parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn arity_follows_equations(p in any_formula(5)) {
        prop_assert_eq!(p.arity(), expected_arity(&p));
    }

    #[test]
    fn derived_connectives_are_classical(
        p in core_formula(2, 2),
        q in core_formula(2, 2),
        e in prop::collection::vec(0usize..4, 3),
    ) {
        let m = v(3);
        let env: Vec<HFSet> = e.iter().map(|&i| m.elements()[i].clone()).collect();
        let sp = sats(&m, &env, &p).unwrap();
        let sq = sats(&m, &env, &q).unwrap();
        prop_assert_eq!(sats(&m, &env, &neg_fm(p.clone())).unwrap(), !sp);
        prop_assert_eq!(sats(&m, &env, &and_fm(p.clone(), q.clone())).unwrap(), sp && sq);
        prop_assert_eq!(sats(&m, &env, &or_fm(p.clone(), q.clone())).unwrap(), sp || sq);
        prop_assert_eq!(sats(&m, &env, &imp_fm(p.clone(), q.clone())).unwrap(), !sp || sq);
        prop_assert_eq!(sats(&m, &env, &iff_fm(p.clone(), q.clone())).unwrap(), sp == sq);
        let ex = m.iter().any(|x| {
            let mut e2 = vec![x.clone()];
            e2.extend(env.iter().cloned());
            sats(&m, &e2, &p).unwrap()
        });
        prop_assert_eq!(sats(&m, &env, &exists_fm(p.clone())).unwrap(), ex);
    }

    #[test]
    fn extensionality_of_sets(a in small_set(), b in small_set()) {
        prop_assert_eq!(a == b, a.is_subset(&b) && b.is_subset(&a));
    }

    #[test]
    fn pair_rank(a in small_set(), b in small_set()) {
        let p = HFSet::kpair(a.clone(), b.clone());
        prop_assert_eq!(p.rank(), a.rank().max(b.rank()) + 2);
        prop_assert_eq!(p.fst(), a);
        prop_assert_eq!(p.snd(), b);
    }

    #[test]
    fn transitive_closure_is_transitive(a in small_set()) {
        let tc = a.transitive_closure();
        prop_assert!(tc.is_transset());
        prop_assert!(a.is_subset(&tc));
    }

    #[test]
    fn forces_arity_bound(p in core_formula(4, 3)) {
        let g = forces(&p).unwrap();
        prop_assert!(g.arity() <= p.arity() + 4, "{} -> {}", p, g.arity());
    }

    #[test]
    fn pow_rel_is_relative_pow(x in small_set(), k in 0usize..5) {
        let m = v(k);
        let pr = pow_rel(&m, &x);
        let full = x.pow().unwrap();
        prop_assert!(pr.is_subset(&full));
        prop_assert_eq!(pr == full, (x.rank() as usize) < k);
    }
}

#[test]
fn foundation_up_to_rank_four() {
    for x in v(5).iter().filter(|x| !x.is_empty()) {
        assert!(x.iter().any(|y| y.intersection(x).is_empty()), "{x}");
    }
}

#[test]
fn pow_membership_is_subset() {
    let m = v(4);
    for b in m.iter() {
        let pb = b.pow().unwrap();
        for a in m.iter() {
            assert_eq!(pb.contains(a), a.is_subset(b));
        }
    }
}

#[test]
fn stage_sizes() {
    for k in 0..5 {
        assert_eq!(v(k + 1).len(), 1 << v(k).len());
    }
}

#[test]
fn codes_relations_and_operations_agree() {
    for k in 1..=3 {
        let m = v(k);
        let class = ClassPred::SetCast(m.clone());
        for name in PredName::ALL {
            let ar = name.arity();
            let code = pred_code(name, &(0..ar).collect::<Vec<_>>()).unwrap();
            for env in envs(&m, ar) {
                let rel = rel_pred(name, &class, &env).unwrap();
                assert_eq!(sats(&m, &env, &code).unwrap(), rel, "{name} {env:?} V_{k}");
                if witnesses_in(name, &env, &m) {
                    assert_eq!(rel, absolute_op(name, &env, &m), "{name} {env:?} V_{k}");
                }
            }
        }
    }
}

#[test]
fn universe_class_is_absolute() {
    use PredName::*;
    let m = v(4);
    for name in [BigUnion, Upair, Pair, Successor, Empty] {
        for env in envs(&m, name.arity()) {
            assert_eq!(
                rel_pred(name, &ClassPred::Universe, &env).unwrap(),
                absolute_op(name, &env, &m),
                "{name} {env:?}"
            );
        }
    }
}

fn names_for(notion: &ForcingNotion) -> Vec<HFSet> {
    let mut names = enumerate_names(notion, NameUniverse { depth: 2, width: 2 }).unwrap();
    names.extend(enumerate_names(notion, NameUniverse { depth: 3, width: 1 }).unwrap());
    names.sort();
    names.dedup();
    names
}

#[test]
fn val_is_monotone_on_flat_names() {
    for notion in enumerate_posets(3, Encoding::VonNeumann, true) {
        let fs = filters(&notion).unwrap();
        let names: Vec<HFSet> = names_for(&notion)
            .into_iter()
            .filter(|t| lab::name_depth(t) <= 1)
            .collect();
        for g in &fs {
            for h in fs.iter().filter(|h| g.is_subset(h)) {
                for tau in &names {
                    assert!(val(g, tau).is_subset(&val(h, tau)), "{tau} {g} {h}");
                }
            }
        }
    }
}

#[test]
fn val_is_not_monotone_on_nested_names() {
    // Enlarging the filter changes the value of the inner name as well.
    let top = HFSet::from_nat(0);
    let q = HFSet::from_nat(1);
    let inner = HFSet::singleton(HFSet::kpair(HFSet::empty(), q.clone()));
    let tau = HFSet::singleton(HFSet::kpair(inner, top.clone()));
    let g = HFSet::singleton(top.clone());
    let h = HFSet::upair(top, q);
    assert_eq!(val(&g, &tau), HFSet::from_nat(1));
    assert_eq!(val(&h, &tau), HFSet::singleton(HFSet::from_nat(1)));
    assert!(!val(&g, &tau).is_subset(&val(&h, &tau)));
}

#[test]
fn atomic_recursion_descends_and_is_dense() {
    // Every recursive call asserts that the measure decreases.
    for notion in enumerate_posets(4, Encoding::VonNeumann, true) {
        let names = enumerate_names(&notion, NameUniverse { depth: 2, width: 2 }).unwrap();
        let step = (names.len() / 40).max(1);
        let sample: Vec<&HFSet> = names.iter().step_by(step).collect();
        let mut engine = FrcEngine::new(Arc::new(notion.clone()));
        for t1 in &sample {
            for t2 in &sample {
                for ft in [0, 1] {
                    let m = engine.mask(ft, t1, t2);
                    assert_eq!(notion.dense_below_all(m), m, "{ft} {t1} {t2}");
                }
            }
        }
        assert!(engine.checked_calls() > 0);
    }
}

#[test]
fn frc_measure_orders_the_recursion() {
    let a = HFSet::from_nat(1);
    let b = HFSet::from_nat(3);
    let mem_up = AtomicTuple::new(1, a.clone(), b.clone(), HFSet::empty());
    let eq = AtomicTuple::new(0, a.clone(), b.clone(), HFSet::empty());
    let mem_down = AtomicTuple::new(1, b.clone(), a.clone(), HFSet::empty());
    assert!(frec_r(&mem_up, &eq));
    assert!(frec_r(&eq, &mem_down));
    assert!(!frec_r(&eq, &eq));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forcing_is_antitone(p in core_formula(2, 1), pick in any::<u32>(), e in any::<(u8, u8)>()) {
        let posets = enumerate_posets(3, Encoding::VonNeumann, true);
        let notion = &posets[pick as usize % posets.len()];
        let m = lab::ground_closure(&HFSet::empty(), notion, 0).unwrap();
        let names: Vec<HFSet> = m.iter().filter(|x| is_name(notion, x)).cloned().collect();
        let env = vec![
            names[e.0 as usize % names.len()].clone(),
            names[e.1 as usize % names.len()].clone(),
        ];
        let mut engine = FrcEngine::new(Arc::new(notion.clone()));
        for q in notion.conditions().iter() {
            for r in notion.conditions().iter().filter(|r| notion.leq(q, r)) {
                if forces_rel_with(&mut engine, &m, r, &env, &p).unwrap() {
                    prop_assert!(forces_rel_with(&mut engine, &m, q, &env, &p).unwrap());
                }
            }
        }
    }

    #[test]
    fn pruned_names_force_alike(pick in any::<u32>(), i in any::<u16>(), j in any::<u16>()) {
        let posets = enumerate_posets(3, Encoding::Tag, true);
        let notion = &posets[pick as usize % posets.len()];
        let m = lab::ground_closure(&HFSet::empty(), notion, 1).unwrap();
        let t1 = &m.elements()[i as usize % m.len()];
        let t2 = &m.elements()[j as usize % m.len()];
        let mut engine = FrcEngine::new(Arc::new(notion.clone()));
        let (e1, e2) = (effective_name(notion, t1), effective_name(notion, t2));
        for ft in [0, 1] {
            prop_assert_eq!(engine.mask(ft, t1, t2), engine.mask(ft, &e1, &e2));
        }
    }
}
