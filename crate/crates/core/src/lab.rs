//! Exhaustive verification of the forcing theorems at desk scale.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forcing::*;
use crate::formula::*;
use crate::hfset::{max_set_size, HFSet};
use crate::relativize::pow_rel;
use crate::semantics::sats;

/// Label encodings for enumerated posets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    /// Label `i` is the numeral `i`, so the top is `0`.
    VonNeumann,
    /// Label `i` is `{i}`.
    Tag,
}

impl Encoding {
    pub fn encode(self, i: usize) -> HFSet {
        match self {
            Encoding::VonNeumann => HFSet::from_nat(i),
            Encoding::Tag => HFSet::singleton(HFSet::from_nat(i)),
        }
    }
}

/// Sweep bounds. Missing fields deserialize to their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabConfig {
    /// Largest number of conditions in an enumerated poset.
    pub poset_bound: usize,
    /// Largest name depth (nesting of `⟨σ,p⟩`) for environment names.
    pub name_rank_bound: usize,
    /// Largest number of pairs in an enumerated name.
    pub name_width: usize,
    pub formula_depth_bound: usize,
    /// Largest number of connectives in an enumerated formula.
    pub formula_size_bound: usize,
    /// Number of free variables in enumerated formulas (and environment length).
    pub env_len: usize,
    /// Largest atom index in the definability class sweep.
    pub max_index: usize,
    pub ground_seed: HFSet,
    pub closure_depth: usize,
    pub encoding: Encoding,
    pub iso_reduce: bool,
    pub parallel: bool,
    /// Counterexamples recorded in full before only counting.
    pub max_counterexamples: usize,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig {
            poset_bound: 3,
            name_rank_bound: 2,
            name_width: 2,
            formula_depth_bound: 3,
            formula_size_bound: 3,
            env_len: 2,
            max_index: 3,
            ground_seed: HFSet::empty(),
            closure_depth: 1,
            encoding: Encoding::VonNeumann,
            iso_reduce: true,
            parallel: false,
            max_counterexamples: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabReport {
    pub experiment: String,
    pub config: Value,
    pub cases_checked: u64,
    pub pass: bool,
    pub counterexamples: Vec<Value>,
    pub metrics: BTreeMap<String, Value>,
}

impl LabReport {
    fn new(experiment: &str, cfg: &LabConfig) -> Self {
        LabReport {
            experiment: experiment.to_owned(),
            config: serde_json::to_value(cfg).expect("config serializes"),
            cases_checked: 0,
            pass: true,
            counterexamples: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "experiment: {}\npass: {}\ncases_checked: {}\ncounterexamples: {}\n",
            self.experiment,
            self.pass,
            self.cases_checked,
            self.counterexamples.len()
        );
        for (k, v) in &self.metrics {
            s.push_str(&format!("{k}: {v}\n"));
        }
        for c in &self.counterexamples {
            s.push_str(&format!("counterexample: {c}\n"));
        }
        s
    }
}

/// Accumulates per-case outcomes, keeping the first few failures verbatim.
#[derive(Default)]
struct Tally {
    cases: u64,
    failures: u64,
    examples: Vec<Value>,
}

impl Tally {
    fn merge(mut self, other: Tally, cap: usize) -> Tally {
        self.cases += other.cases;
        self.failures += other.failures;
        for e in other.examples {
            if self.examples.len() < cap {
                self.examples.push(e);
            }
        }
        self
    }

    fn record(&mut self, ok: bool, cap: usize, witness: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < cap {
                self.examples.push(witness());
            }
        }
    }

    fn into_report(self, report: &mut LabReport) {
        report.cases_checked += self.cases;
        report.pass &= self.failures == 0;
        report
            .metrics
            .insert("failures".into(), json!(self.failures));
        report.counterexamples.extend(self.examples);
    }
}

/// Runs `f` over `items` (in parallel if asked) and merges the tallies in input order.
fn sweep<T: Sync, F>(items: &[T], cfg: &LabConfig, f: F) -> Tally
where
    F: Fn(&T) -> Tally + Sync + Send,
{
    let cap = cfg.max_counterexamples;
    let parts: Vec<Tally> = if cfg.parallel {
        items.par_iter().map(&f).collect()
    } else {
        items.iter().map(&f).collect()
    };
    parts
        .into_iter()
        .fold(Tally::default(), |acc, t| acc.merge(t, cap))
}

/// Labeled preorders on `1..=max` labels with label 0 on top, as relation
/// matrices; optionally one representative per isomorphism class.
fn preorder_relations(max: usize, iso_reduce: bool) -> Vec<(usize, Vec<Vec<bool>>)> {
    let mut out = Vec::new();
    for n in 1..=max {
        // Free bits: every (i, j) with i ≠ j except (i, 0), which is forced.
        let free: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && j != 0)
            .collect();
        let mut seen: HashSet<Vec<Vec<bool>>> = HashSet::new();
        for mask in 0u64..(1 << free.len()) {
            let mut r = vec![vec![false; n]; n];
            for (i, row) in r.iter_mut().enumerate() {
                row[i] = true;
                row[0] = true;
            }
            for (b, &(i, j)) in free.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    r[i][j] = true;
                }
            }
            let transitive = (0..n).all(|i| {
                (0..n).all(|j| !r[i][j] || (0..n).all(|k| !r[j][k] || r[i][k]))
            });
            if !transitive {
                continue;
            }
            if iso_reduce {
                let canon = canonical(&r);
                if !seen.insert(canon) {
                    continue;
                }
            }
            out.push((n, r));
        }
    }
    out
}

/// Lexicographically least relabeling that fixes label 0.
fn canonical(r: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = r.len();
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best: Option<Vec<Vec<bool>>> = None;
    permute(&mut rest, 0, &mut |perm| {
        let mut full = vec![0];
        full.extend_from_slice(perm);
        let m: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| r[full[i]][full[j]]).collect())
            .collect();
        if best.as_ref().map_or(true, |b| m < *b) {
            best = Some(m);
        }
    });
    best.unwrap_or_default()
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Every forcing notion on at most `max` conditions, in a deterministic order.
pub fn enumerate_posets(max: usize, encoding: Encoding, iso_reduce: bool) -> Vec<ForcingNotion> {
    preorder_relations(max, iso_reduce)
        .into_iter()
        .map(|(n, r)| {
            let elems: Vec<HFSet> = (0..n).map(|i| encoding.encode(i)).collect();
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if r[i][j] {
                        pairs.push(HFSet::kpair(elems[i].clone(), elems[j].clone()));
                    }
                }
            }
            mk_forcing_notion(
                HFSet::from_elements(elems.iter().cloned()),
                HFSet::from_elements(pairs),
                elems[0].clone(),
            )
            .expect("enumerated relations are preorders with top 0")
        })
        .collect()
}

/// Bounds for exhaustive name enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NameUniverse {
    /// Nesting depth: `0` is the empty name, a name has depth one more than its deepest `σ`.
    pub depth: usize,
    /// Largest number of pairs in any (sub)name.
    pub width: usize,
}

/// All names within the bounds, in canonical order.
pub fn enumerate_names(fnotion: &ForcingNotion, u: NameUniverse) -> Result<Vec<HFSet>> {
    let mut level = vec![HFSet::empty()];
    for _ in 0..u.depth {
        let atoms: Vec<HFSet> = level
            .iter()
            .flat_map(|s| {
                fnotion
                    .conditions()
                    .iter()
                    .map(move |p| HFSet::kpair(s.clone(), p.clone()))
            })
            .collect();
        let mut next = Vec::new();
        let mut chosen = Vec::new();
        subsets_upto(&atoms, u.width, 0, &mut chosen, &mut next, max_set_size())?;
        next.sort();
        next.dedup();
        level = next;
    }
    Ok(level)
}

fn subsets_upto(
    atoms: &[HFSet],
    width: usize,
    start: usize,
    chosen: &mut Vec<HFSet>,
    out: &mut Vec<HFSet>,
    limit: usize,
) -> Result<()> {
    out.push(HFSet::from_elements(chosen.iter().cloned()));
    if out.len() > limit {
        return Err(Error::Bound(format!("more than {limit} names")));
    }
    if chosen.len() == width {
        return Ok(());
    }
    for i in start..atoms.len() {
        chosen.push(atoms[i].clone());
        subsets_upto(atoms, width, i + 1, chosen, out, limit)?;
        chosen.pop();
    }
    Ok(())
}

/// Nesting depth of a name (non-pair elements are ignored).
pub fn name_depth(tau: &HFSet) -> usize {
    tau.iter()
        .filter_map(HFSet::as_pair)
        .map(|(s, _)| 1 + name_depth(s))
        .max()
        .unwrap_or(0)
}

/// Core formulas with at most `depth` nesting, at most `size` connectives, and
/// free indices below `vars`, in a deterministic order. `Nand` children are
/// emitted in both orders.
pub fn enumerate_formulas(depth: usize, size: usize, vars: usize) -> Vec<Formula> {
    let mut memo = BTreeMap::new();
    let mut out = Vec::new();
    for s in 0..=size {
        out.extend(formulas_exact(depth, s, vars, &mut memo));
    }
    out
}

type FormulaMemo = BTreeMap<(usize, usize, usize), Vec<Formula>>;

fn formulas_exact(depth: usize, size: usize, vars: usize, memo: &mut FormulaMemo) -> Vec<Formula> {
    if let Some(v) = memo.get(&(depth, size, vars)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if size == 0 {
        for i in 0..vars {
            for j in 0..vars {
                out.push(member_fm(i, j));
                out.push(equal_fm(i, j));
            }
        }
    } else if depth > 0 {
        for body in formulas_exact(depth - 1, size - 1, vars + 1, memo) {
            out.push(forall_fm(body));
        }
        for left in 0..size {
            let right = size - 1 - left;
            let ls = formulas_exact(depth - 1, left, vars, memo);
            let rs = formulas_exact(depth - 1, right, vars, memo);
            for l in &ls {
                for r in &rs {
                    out.push(nand_fm(l.clone(), r.clone()));
                }
            }
        }
    }
    memo.insert((depth, size, vars), out.clone());
    out
}

/// A finite ground: the transitive closure of `seed`, the notion and `Ġ`,
/// closed `depth` times under taking check names of its members.
pub fn ground_closure(seed: &HFSet, fnotion: &ForcingNotion, depth: usize) -> Result<HFSet> {
    let limit = max_set_size();
    let mut s = HFSet::from_elements([
        seed.clone(),
        fnotion.conditions().clone(),
        fnotion.leq_set().clone(),
        fnotion.one().clone(),
        g_dot(fnotion),
    ]);
    for _ in 0..depth {
        let t = s.union(&s.transitive_closure());
        s = s.union(&HFSet::from_elements(t.iter().map(|x| check(fnotion, x))));
        if s.len() > limit {
            return Err(Error::Bound(format!("ground exceeds {limit} elements")));
        }
    }
    let m = s.union(&s.transitive_closure());
    if m.len() > limit {
        return Err(Error::Bound(format!("ground exceeds {limit} elements")));
    }
    Ok(m)
}

/// Elements of `m` whose check name is also in `m`.
pub fn check_core(m: &HFSet, fnotion: &ForcingNotion) -> HFSet {
    m.filter(|x| m.contains(&check(fnotion, x)))
}

fn notion_json(n: &ForcingNotion) -> Value {
    serde_json::to_value(n.to_spec()).expect("serializes")
}

fn sets_json(xs: &[HFSet]) -> Value {
    json!(xs.iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

/// One forcing setting: a notion, its ground and its generic filters.
struct Setting {
    notion: ForcingNotion,
    ground: HFSet,
    generics: Vec<HFSet>,
    /// Names in the ground of bounded depth, for environments.
    env_names: Vec<HFSet>,
}

fn settings(cfg: &LabConfig) -> Result<Vec<Setting>> {
    enumerate_posets(cfg.poset_bound, cfg.encoding, cfg.iso_reduce)
        .into_iter()
        .map(|notion| {
            let ground = ground_closure(&cfg.ground_seed, &notion, cfg.closure_depth)?;
            let generics = generic_filters(&notion)?
                .into_iter()
                .map(|g| g.elems)
                .collect();
            let env_names = ground
                .iter()
                .filter(|t| is_name(&notion, t) && name_depth(t) <= cfg.name_rank_bound)
                .cloned()
                .collect();
            Ok(Setting {
                notion,
                ground,
                generics,
                env_names,
            })
        })
        .collect()
}

fn envs_over(names: &[HFSet], len: usize) -> Vec<Vec<HFSet>> {
    crate::semantics::envs(&HFSet::from_elements(names.iter().cloned()), len)
}

fn env_json(env: &[HFSet]) -> Value {
    sets_json(env)
}

/// Arity of `forces(φ)` against the bound `arity(φ) + 4`.
fn definability_case(phi: &Formula) -> (usize, usize) {
    let f = forces(phi).expect("enumerated formulas are core");
    (phi.arity(), f.arity())
}

/// Definability: the arity bound over the size-bounded enumeration (with an
/// exact histogram), then over every formula of the depth bound with atom
/// indices up to `max_index`, one representative per class of
/// `(arity φ, arity forces φ)`. Both arities are computed compositionally, so
/// a class's members all share its representative's pair.
pub fn run_definability(cfg: &LabConfig) -> Result<LabReport> {
    let mut report = LabReport::new("definability", cfg);
    let cap = cfg.max_counterexamples;
    let formulas = enumerate_formulas(cfg.formula_depth_bound, cfg.formula_size_bound, cfg.env_len);
    let tally = sweep(&formulas, cfg, |phi| {
        let mut t = Tally::default();
        let (a, fa) = definability_case(phi);
        t.record(fa <= a + 4, cap, || {
            json!({"formula": phi.render(), "arity": a, "forces_arity": fa})
        });
        t
    });
    let mut histogram: BTreeMap<usize, u64> = BTreeMap::new();
    for phi in &formulas {
        *histogram.entry(definability_case(phi).1).or_default() += 1;
    }
    report.metrics.insert(
        "forces_arity_histogram".into(),
        json!(histogram.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>()),
    );
    report.metrics.insert(
        "member_0_1_forces_arity".into(),
        json!(definability_case(&member_fm(0, 1)).1),
    );
    tally.into_report(&mut report);

    let classes = definability_classes(cfg.formula_depth_bound, cfg.max_index);
    let mut covered: u128 = 0;
    let mut class_failures = 0u64;
    for ((a, fa), (rep, count)) in &classes {
        covered += count;
        if *fa > a + 4 {
            class_failures += 1;
            if report.counterexamples.len() < cap {
                report.counterexamples.push(json!({
                    "formula": rep.render(), "arity": a, "forces_arity": fa
                }));
            }
        }
    }
    report.cases_checked += classes.len() as u64;
    report.pass &= class_failures == 0;
    report.metrics.insert("class_failures".into(), json!(class_failures));
    report.metrics.insert("classes".into(), json!(classes.len()));
    report
        .metrics
        .insert("formulas_covered_by_classes".into(), json!(covered.to_string()));
    Ok(report)
}

type ClassMap = BTreeMap<(usize, usize), (Formula, u128)>;

/// Formulas of depth `≤ depth` with atom indices `≤ max_index`, grouped by
/// `(arity φ, arity forces φ)`: a representative and the number of members.
pub fn definability_classes(depth: usize, max_index: usize) -> ClassMap {
    let mut atoms = ClassMap::new();
    for i in 0..=max_index {
        for j in 0..=max_index {
            for phi in [member_fm(i, j), equal_fm(i, j)] {
                let key = definability_case(&phi);
                atoms.entry(key).or_insert((phi, 0)).1 += 1;
            }
        }
    }
    let mut level = atoms.clone();
    for _ in 0..depth {
        let mut next = atoms.clone();
        let mut add = |phi: Formula, n: u128| {
            let key = definability_case(&phi);
            next.entry(key).or_insert((phi, 0)).1 += n;
        };
        for (l, nl) in level.values() {
            add(forall_fm(l.clone()), *nl);
            for (r, nr) in level.values() {
                add(nand_fm(l.clone(), r.clone()), nl * nr);
            }
        }
        level = next;
    }
    level
}

/// Quantifier domain and engine for one setting.
fn engine_for(s: &Setting) -> (FrcEngine, Vec<HFSet>) {
    let dom = effective_domain(&s.notion, &s.ground);
    (FrcEngine::new(std::sync::Arc::new(s.notion.clone())), dom)
}

/// Density: `p ⊩ φ` exactly when the conditions forcing `φ` are dense below `p`.
pub fn run_density(cfg: &LabConfig) -> Result<LabReport> {
    let mut report = LabReport::new("density", cfg);
    let cap = cfg.max_counterexamples;
    let formulas = enumerate_formulas(cfg.formula_depth_bound, cfg.formula_size_bound, cfg.env_len);
    let settings = settings(cfg)?;
    let tally = sweep(&settings, cfg, |s| {
        let mut t = Tally::default();
        let (mut engine, dom) = engine_for(s);
        let n = s.notion.size();
        for env in envs_over(&s.env_names, cfg.env_len) {
            let mut stack = env.clone();
            for phi in &formulas {
                let forced = engine.forces_mask(&dom, &mut stack, phi);
                let dense = s.notion.dense_below_all(forced);
                for p in 0..n {
                    let bit = 1u64 << p;
                    t.record((forced & bit != 0) == (dense & bit != 0), cap, || {
                        json!({
                            "poset": notion_json(&s.notion),
                            "p": s.notion.condition(p).to_string(),
                            "env": env_json(&env),
                            "formula": phi.render(),
                            "forcing": s.notion.set_of(forced).to_string(),
                            "dense_below": s.notion.set_of(dense).to_string(),
                        })
                    });
                }
            }
        }
        t
    });
    report
        .metrics
        .insert("posets".into(), json!(settings.len()));
    report.metrics.insert("formulas".into(), json!(formulas.len()));
    tally.into_report(&mut report);
    Ok(report)
}

/// Truth: `∃p∈G. p ⊩ φ` against `M[G] ⊨ φ` at the valuations, for every
/// generic `G`. Quantifier-free and quantified failures are counted apart.
pub fn run_truth(cfg: &LabConfig) -> Result<LabReport> {
    let mut report = LabReport::new("truth", cfg);
    let cap = cfg.max_counterexamples;
    let formulas = enumerate_formulas(cfg.formula_depth_bound, cfg.formula_size_bound, cfg.env_len);
    let settings = settings(cfg)?;
    let parts: Vec<(Tally, u64)> = {
        let work = |s: &Setting| -> (Tally, u64) {
            let mut t = Tally::default();
            let mut qf_failures = 0u64;
            let (mut engine, dom) = engine_for(s);
            let gmasks: Vec<u64> = s
                .generics
                .iter()
                .map(|g| s.notion.mask_of(g).expect("generic filters are subsets of P"))
                .collect();
            let extensions: Vec<HFSet> = s
                .generics
                .iter()
                .map(|g| generic_extension(&s.ground, g))
                .collect();
            let mut tables: BTreeMap<(usize, Vec<HFSet>), Vec<bool>> = BTreeMap::new();
            for env in envs_over(&s.env_names, cfg.env_len) {
                let mut stack = env.clone();
                let forced: Vec<u64> = formulas
                    .iter()
                    .map(|phi| engine.forces_mask(&dom, &mut stack, phi))
                    .collect();
                for (gi, g) in s.generics.iter().enumerate() {
                    let mut v = Valuation::new(g);
                    let vals: Vec<HFSet> = env.iter().map(|x| v.val(x)).collect();
                    let table = tables.entry((gi, vals.clone())).or_insert_with(|| {
                        formulas
                            .iter()
                            .map(|phi| sats(&extensions[gi], &vals, phi).expect("core"))
                            .collect()
                    });
                    for (k, phi) in formulas.iter().enumerate() {
                        let lhs = forced[k] & gmasks[gi] != 0;
                        let rhs = table[k];
                        let ok = lhs == rhs;
                        if !ok && phi.quantifier_depth() == 0 {
                            qf_failures += 1;
                        }
                        t.record(ok, cap, || {
                            json!({
                                "poset": notion_json(&s.notion),
                                "ground": s.ground.to_string(),
                                "generic": g.to_string(),
                                "env": env_json(&env),
                                "vals": sets_json(&vals),
                                "formula": phi.render(),
                                "forced_in_G": lhs,
                                "holds_in_extension": rhs,
                            })
                        });
                    }
                }
            }
            (t, qf_failures)
        };
        if cfg.parallel {
            settings.par_iter().map(work).collect()
        } else {
            settings.iter().map(work).collect()
        }
    };
    let mut qf = 0;
    let mut tally = Tally::default();
    for (t, q) in parts {
        qf += q;
        tally = tally.merge(t, cap);
    }
    report.metrics.insert("posets".into(), json!(settings.len()));
    report.metrics.insert("formulas".into(), json!(formulas.len()));
    report.metrics.insert("quantifier_free_failures".into(), json!(qf));
    report
        .metrics
        .insert("quantified_failures".into(), json!(tally.failures - qf));
    tally.into_report(&mut report);
    Ok(report)
}

/// `M` together with `pow(dom τ × P)`, `π` and their transitive closure.
fn powerset_ground(m: &HFSet, fnotion: &ForcingNotion, tau: &HFSet) -> Result<(HFSet, HFSet)> {
    let base = HFSet::cart_prod(&tau.domain(), fnotion.conditions());
    let q = base.pow()?;
    let pi = HFSet::cart_prod(&q, &HFSet::singleton(fnotion.one().clone()));
    let extra = q.union(&HFSet::singleton(pi.clone()));
    let m = m.union(&extra).union(&extra.transitive_closure());
    Ok((m, pi))
}

/// The powerset-name construction: for each name `τ` and generic `G`,
/// `pow(a) ∩ M[G] ⊆ b` where `a = val(G,τ)` and `b = val(G,π)`, and every
/// `c = val(G,χ) ⊆ a` is recovered as `val(G,θ)`. Grounds are augmented with
/// `pow(dom τ × P)` and `π`; containment in the bare ground is a metric.
pub fn run_powerset_demo(cfg: &LabConfig, tau: Option<&HFSet>) -> Result<LabReport> {
    let mut report = LabReport::new("powerset", cfg);
    let cap = cfg.max_counterexamples;
    let mut bare_cases = 0u64;
    let mut bare_holds = 0u64;
    let mut tally = Tally::default();
    for notion in enumerate_posets(cfg.poset_bound, cfg.encoding, cfg.iso_reduce) {
        let seed = match tau {
            Some(t) => HFSet::upair(cfg.ground_seed.clone(), t.clone()),
            None => cfg.ground_seed.clone(),
        };
        let ground = ground_closure(&seed, &notion, cfg.closure_depth)?;
        let taus: Vec<HFSet> = match tau {
            Some(t) => vec![t.clone()],
            None => ground
                .iter()
                .filter(|t| is_name(&notion, t) && name_depth(t) <= cfg.name_rank_bound)
                .cloned()
                .collect(),
        };
        let generics: Vec<HFSet> = generic_filters(&notion)?.into_iter().map(|g| g.elems).collect();
        let mut engine = FrcEngine::new(std::sync::Arc::new(notion.clone()));
        for tau in &taus {
            let (m, pi) = powerset_ground(&ground, &notion, tau)?;
            let base = HFSet::cart_prod(&tau.domain(), notion.conditions());
            let bare_pi = HFSet::cart_prod(&pow_rel(&ground, &base), &HFSet::singleton(notion.one().clone()));
            for g in &generics {
                let mut v = Valuation::new(g);
                let a = v.val(tau);
                let b = v.val(&pi);
                let mg = generic_extension(&m, g);
                let witness = |what: &str, c: &HFSet| {
                    json!({
                        "poset": notion_json(&notion),
                        "tau": tau.to_string(),
                        "generic": g.to_string(),
                        "a": a.to_string(),
                        "b": b.to_string(),
                        "c": c.to_string(),
                        "failed": what,
                    })
                };
                tally.record(mg.contains(&b), cap, || witness("b in M[G]", &b));
                let gmg = generic_extension(&ground, g);
                let bare_b = v.val(&bare_pi);
                for c in gmg.iter().filter(|c| c.is_subset(&a)) {
                    bare_cases += 1;
                    bare_holds += bare_b.contains(c) as u64;
                }
                for c in mg.iter().filter(|c| c.is_subset(&a)) {
                    tally.record(b.contains(c), cap, || witness("pow(a) ∩ M[G] ⊆ b", c));
                }
                let gmask = notion.mask_of(g)?;
                for chi in m.iter() {
                    let c = v.val(chi);
                    if !c.is_subset(&a) {
                        continue;
                    }
                    let mut pairs = Vec::new();
                    for sigma in tau.domain().iter() {
                        let forced = engine.mask(1, sigma, chi);
                        for p in 0..notion.size() {
                            if forced & (1 << p) != 0 {
                                pairs.push(HFSet::kpair(sigma.clone(), notion.condition(p).clone()));
                            }
                        }
                    }
                    let theta = HFSet::from_elements(pairs);
                    let got = v.val(&theta);
                    debug_assert!(gmask != 0);
                    tally.record(got == c, cap, || {
                        let mut w = witness("val(G,θ) = c", &c);
                        w["chi"] = json!(chi.to_string());
                        w["theta"] = json!(theta.to_string());
                        w["val_theta"] = json!(got.to_string());
                        w
                    });
                }
            }
        }
    }
    report.metrics.insert("bare_ground_cases".into(), json!(bare_cases));
    report.metrics.insert("bare_ground_contained".into(), json!(bare_holds));
    tally.into_report(&mut report);
    Ok(report)
}

/// Properties of `M[G]` over each ground and generic: transitivity and the
/// check core are asserted, `M ⊆ M[G]` is asserted for check-closed grounds;
/// ordinal coincidence and properness are counted.
pub fn run_extension_props(cfg: &LabConfig) -> Result<LabReport> {
    let mut report = LabReport::new("extension", cfg);
    let cap = cfg.max_counterexamples;
    let settings = settings(cfg)?;
    let mut instances = 0u64;
    let mut check_closed = 0u64;
    let mut contained = 0u64;
    let mut ordinals_agree = 0u64;
    let mut proper = 0u64;
    let mut per_poset = Vec::new();
    let mut tally = Tally::default();
    for s in &settings {
        let core = check_core(&s.ground, &s.notion);
        let closed = core == s.ground;
        let m_ords = s.ground.filter(HFSet::is_ord);
        let mut poset_proper = false;
        for g in &s.generics {
            instances += 1;
            let mg = generic_extension(&s.ground, g);
            let witness = |what: &str| {
                json!({
                    "poset": notion_json(&s.notion),
                    "ground": s.ground.to_string(),
                    "generic": g.to_string(),
                    "extension": mg.to_string(),
                    "failed": what,
                })
            };
            if s.ground.is_transset() {
                tally.record(mg.is_transset(), cap, || witness("transitive"));
            }
            tally.record(core.is_subset(&mg), cap, || witness("check core ⊆ M[G]"));
            let sub = s.ground.is_subset(&mg);
            if closed {
                check_closed += 1;
                tally.record(sub, cap, || witness("M ⊆ M[G]"));
            }
            contained += sub as u64;
            ordinals_agree += (mg.filter(HFSet::is_ord) == m_ords) as u64;
            let is_proper = !mg.is_subset(&s.ground);
            proper += is_proper as u64;
            poset_proper |= is_proper;
        }
        per_poset.push(json!({"poset": notion_json(&s.notion), "proper": poset_proper}));
    }
    let m = &mut report.metrics;
    m.insert("instances".into(), json!(instances));
    m.insert("check_closed_instances".into(), json!(check_closed));
    m.insert("ground_contained".into(), json!(contained));
    m.insert("ordinals_coincide".into(), json!(ordinals_agree));
    m.insert("proper_extensions".into(), json!(proper));
    m.insert("properness_by_poset".into(), json!(per_poset));
    tally.into_report(&mut report);
    Ok(report)
}

/// `val(G, x̌) = x` for every `x ∈ V_stage` and `val(G, Ġ) = G`, over every
/// filter of every enumerated poset.
pub fn run_check_identities(cfg: &LabConfig, stage: usize) -> Result<LabReport> {
    let mut report = LabReport::new("check", cfg);
    let cap = cfg.max_counterexamples;
    let v = HFSet::v_stage(stage)?;
    let posets = enumerate_posets(cfg.poset_bound, cfg.encoding, cfg.iso_reduce);
    let tally = sweep(&posets, cfg, |notion| {
        let mut t = Tally::default();
        let mut checks: std::collections::HashMap<HFSet, HFSet> = Default::default();
        let mut names = Vec::with_capacity(v.len());
        // V_stage is listed by rank, so elements' checks are ready first.
        for x in v.iter() {
            let c = HFSet::from_elements(
                x.iter().map(|y| HFSet::kpair(checks[y].clone(), notion.one().clone())),
            );
            checks.insert(x.clone(), c.clone());
            names.push(c);
        }
        let gdot = g_dot(notion);
        for g in filters(notion).expect("small poset") {
            let mut val = Valuation::new(&g);
            for (x, c) in v.iter().zip(&names) {
                let got = val.val(c);
                t.record(got == *x, cap, || {
                    json!({"poset": notion_json(notion), "filter": g.to_string(), "x": x.to_string(), "val": got.to_string()})
                });
            }
            let got = val.val(&gdot);
            t.record(got == g, cap, || {
                json!({"poset": notion_json(notion), "filter": g.to_string(), "val_gdot": got.to_string()})
            });
        }
        t
    });
    tally.into_report(&mut report);
    Ok(report)
}

/// Atomic adequacy: `frc_at(ft,τ1,τ2,p)` exactly when the atomic statement
/// holds at the valuations for every generic filter containing `p`.
pub fn run_atomic_adequacy(cfg: &LabConfig, universes: &[NameUniverse]) -> Result<LabReport> {
    let mut report = LabReport::new("adequacy", cfg);
    let cap = cfg.max_counterexamples;
    let posets = enumerate_posets(cfg.poset_bound, cfg.encoding, cfg.iso_reduce);
    let mut prepared = Vec::new();
    for notion in posets {
        let mut names = Vec::new();
        for u in universes {
            names.extend(enumerate_names(&notion, *u)?);
        }
        names.sort();
        names.dedup();
        let generics: Vec<HFSet> = generic_filters(&notion)?.into_iter().map(|g| g.elems).collect();
        prepared.push((notion, names, generics));
    }
    let tally = sweep(&prepared, cfg, |(notion, names, generics)| {
        let mut t = Tally::default();
        let mut engine = FrcEngine::new(std::sync::Arc::new(notion.clone()));
        let gmasks: Vec<u64> = generics.iter().map(|g| notion.mask_of(g).expect("subset")).collect();
        let vals: Vec<Vec<HFSet>> = generics
            .iter()
            .map(|g| {
                let mut v = Valuation::new(g);
                names.iter().map(|x| v.val(x)).collect()
            })
            .collect();
        for (i, t1) in names.iter().enumerate() {
            for (j, t2) in names.iter().enumerate() {
                for ft in [0u8, 1] {
                    let forced = engine.mask(ft, t1, t2);
                    // Generic filters in which the statement fails.
                    let failing: Vec<u64> = (0..generics.len())
                        .filter(|&k| {
                            let (a, b) = (&vals[k][i], &vals[k][j]);
                            !(if ft == 1 { b.contains(a) } else { a == b })
                        })
                        .map(|k| gmasks[k])
                        .collect();
                    for p in 0..notion.size() {
                        let bit = 1u64 << p;
                        let oracle = failing.iter().all(|g| g & bit == 0);
                        t.record((forced & bit != 0) == oracle, cap, || {
                            json!({
                                "poset": notion_json(notion),
                                "ft": ft,
                                "t1": t1.to_string(),
                                "t2": t2.to_string(),
                                "p": notion.condition(p).to_string(),
                                "frc_at": forced & bit != 0,
                                "generic_oracle": oracle,
                            })
                        });
                    }
                }
            }
        }
        t
    });
    report.metrics.insert("universes".into(), json!(universes));
    tally.into_report(&mut report);
    Ok(report)
}

/// Experiment names accepted by [`run`].
pub const EXPERIMENTS: &[&str] = &[
    "definability",
    "density",
    "truth",
    "powerset",
    "extension",
    "check",
    "adequacy",
];

/// Name universes of the atomic adequacy sweep: depth 2 with two pairs, and
/// depth 3 with one.
pub const ADEQUACY_UNIVERSES: [NameUniverse; 2] = [
    NameUniverse { depth: 2, width: 2 },
    NameUniverse { depth: 3, width: 1 },
];

/// Runs an experiment by name.
pub fn run(name: &str, cfg: &LabConfig) -> Result<LabReport> {
    match name {
        "definability" => run_definability(cfg),
        "density" => run_density(cfg),
        "truth" => run_truth(cfg),
        "powerset" => run_powerset_demo(cfg, None),
        "extension" => run_extension_props(cfg),
        "check" => run_check_identities(cfg, 5),
        "adequacy" => run_atomic_adequacy(cfg, &ADEQUACY_UNIVERSES),
        _ => Err(Error::Unknown {
            kind: "experiment",
            name: name.to_owned(),
        }),
    }
}
