//! Forcing notions, filters and generics, names, the atomic forcing recursion,
//! the semantic forcing relation, and the `forces` formula transformer.
//!
//! Conditions are indexed by their position in the canonical order of `P`, and
//! sets of conditions are bit masks, so `|P| ≤ 64`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::*;
use crate::hfset::HFSet;
use crate::relativize::codes;
use crate::semantics::nth;

/// Largest poset `generic_filters` will enumerate by default.
pub const DEFAULT_GENERIC_BOUND: usize = 12;

type Mask = u64;

/// A validated preorder `⟨P, ≼, 1⟩`.
#[derive(Clone, Debug)]
pub struct ForcingNotion {
    p: HFSet,
    leq: HFSet,
    one: HFSet,
    index: HashMap<HFSet, usize>,
    /// `below[i]`: conditions `q ≼ P[i]`.
    below: Vec<Mask>,
    /// `above[i]`: conditions `q` with `P[i] ≼ q`.
    above: Vec<Mask>,
}

impl PartialEq for ForcingNotion {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.leq == other.leq && self.one == other.one
    }
}

impl Eq for ForcingNotion {}

/// Validates the forcing-notion invariants `one_in_P`, `leq_preord` and `one_max`.
pub fn mk_forcing_notion(p: HFSet, leq: HFSet, one: HFSet) -> Result<ForcingNotion> {
    if p.len() > 64 {
        return Err(Error::Bound(format!("{} conditions (at most 64 supported)", p.len())));
    }
    if !p.contains(&one) {
        return Err(Error::InvalidNotion("one_in_P"));
    }
    let n = p.len();
    let index: HashMap<HFSet, usize> = p.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    let mut below = vec![0 as Mask; n];
    let mut above = vec![0 as Mask; n];
    for pr in leq.iter() {
        if let Some((a, b)) = pr.as_pair() {
            if let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) {
                below[j] |= 1 << i;
                above[i] |= 1 << j;
            }
        }
    }
    let reflexive = (0..n).all(|i| below[i] & (1 << i) != 0);
    // q ≼ r ≼ s ⟹ q ≼ s, i.e. below[r] ⊆ below[s] whenever r ≼ s.
    let transitive = (0..n).all(|s| bits(below[s]).all(|r| below[r] & !below[s] == 0));
    if !(reflexive && transitive) {
        return Err(Error::InvalidNotion("leq_preord"));
    }
    let top = index[&one];
    if below[top] != full(n) {
        return Err(Error::InvalidNotion("one_max"));
    }
    Ok(ForcingNotion {
        p,
        leq,
        one,
        index,
        below,
        above,
    })
}

fn full(n: usize) -> Mask {
    if n == 64 {
        Mask::MAX
    } else {
        (1 << n) - 1
    }
}

fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| m & (1 << i) != 0)
}

/// Reflexive-transitive closure of a relation on `p`, as a set of pairs.
pub fn preorder_closure(p: &HFSet, leq: &HFSet) -> HFSet {
    let elems = p.elements();
    let n = elems.len();
    let pos = |x: &HFSet| elems.iter().position(|y| y == x);
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for pr in leq.iter() {
        if let Some((a, b)) = pr.as_pair() {
            if let (Some(i), Some(j)) = (pos(a), pos(b)) {
                r[i][j] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if r[i][j] {
                out.push(HFSet::kpair(elems[i].clone(), elems[j].clone()));
            }
        }
    }
    HFSet::from_elements(out)
}

impl ForcingNotion {
    pub fn conditions(&self) -> &HFSet {
        &self.p
    }

    pub fn leq_set(&self) -> &HFSet {
        &self.leq
    }

    pub fn one(&self) -> &HFSet {
        &self.one
    }

    pub fn size(&self) -> usize {
        self.p.len()
    }

    pub fn index_of(&self, x: &HFSet) -> Option<usize> {
        self.index.get(x).copied()
    }

    fn idx(&self, x: &HFSet) -> Result<usize> {
        self.index_of(x).ok_or_else(|| Error::NotInP(x.clone()))
    }

    pub fn condition(&self, i: usize) -> &HFSet {
        &self.p.elements()[i]
    }

    /// `p ≼ q`.
    pub fn leq(&self, p: &HFSet, q: &HFSet) -> bool {
        match (self.index_of(p), self.index_of(q)) {
            (Some(i), Some(j)) => self.below[j] & (1 << i) != 0,
            _ => false,
        }
    }

    pub fn all_mask(&self) -> Mask {
        full(self.size())
    }

    pub fn below_mask(&self, i: usize) -> Mask {
        self.below[i]
    }

    pub fn mask_of(&self, d: &HFSet) -> Result<Mask> {
        d.iter().try_fold(0, |m, x| {
            self.index_of(x)
                .map(|i| m | (1 << i))
                .ok_or_else(|| Error::NotSubsetOfP(d.clone()))
        })
    }

    pub fn set_of(&self, m: Mask) -> HFSet {
        HFSet::from_elements(bits(m).map(|i| self.condition(i).clone()))
    }

    /// Conditions with an extension in `d`.
    fn reaches(&self, d: Mask) -> Mask {
        (0..self.size())
            .filter(|&r| self.below[r] & d != 0)
            .fold(0, |m, r| m | (1 << r))
    }

    pub fn dense_mask(&self, d: Mask) -> bool {
        self.reaches(d) == self.all_mask()
    }

    /// Conditions `p` such that `d` is dense below `p`.
    pub fn dense_below_all(&self, d: Mask) -> Mask {
        let ok = self.reaches(d);
        (0..self.size())
            .filter(|&p| self.below[p] & !ok == 0)
            .fold(0, |m, p| m | (1 << p))
    }

    pub fn is_filter_mask(&self, f: Mask) -> bool {
        f != 0
            && bits(f).all(|p| self.above[p] & !f == 0)
            && bits(f).all(|p| bits(f).all(|q| self.below[p] & self.below[q] & f != 0))
    }

    /// Full genericity: a filter whose complement is not dense, i.e. one that
    /// meets every dense subset of `P`.
    pub fn is_generic_mask(&self, g: Mask) -> bool {
        self.is_filter_mask(g) && !self.dense_mask(self.all_mask() & !g)
    }

    pub fn dense(&self, d: &HFSet) -> Result<bool> {
        Ok(self.dense_mask(self.mask_of(d)?))
    }

    pub fn dense_below(&self, d: &HFSet, p: &HFSet) -> Result<bool> {
        let i = self.idx(p)?;
        Ok(self.dense_below_all(self.mask_of(d)?) & (1 << i) != 0)
    }

    pub fn compatible(&self, p: &HFSet, q: &HFSet) -> Result<bool> {
        let (i, j) = (self.idx(p)?, self.idx(q)?);
        Ok(self.below[i] & self.below[j] != 0)
    }

    pub fn is_filter(&self, f: &HFSet) -> Result<bool> {
        Ok(self.is_filter_mask(self.mask_of(f)?))
    }

    pub fn is_generic(&self, g: &HFSet) -> Result<bool> {
        Ok(self.is_generic_mask(self.mask_of(g)?))
    }

    /// The one-condition notion `P = {1}`.
    pub fn trivial() -> ForcingNotion {
        let one = HFSet::from_nat(1);
        let leq = HFSet::singleton(HFSet::kpair(one.clone(), one.clone()));
        mk_forcing_notion(HFSet::singleton(one.clone()), leq, one).expect("valid")
    }

    /// Two-element chain `p ≼ 1` with `p = {{0}}`.
    pub fn chain2() -> ForcingNotion {
        let one = HFSet::from_nat(1);
        let p = HFSet::singleton(one.clone());
        let pset = HFSet::upair(one.clone(), p.clone());
        let leq = preorder_closure(&pset, &HFSet::singleton(HFSet::kpair(p, one.clone())));
        mk_forcing_notion(pset, leq, one).expect("valid")
    }

    /// `1` above two incompatible conditions `a = {{0}}` and `b = 2`.
    pub fn antichain2() -> ForcingNotion {
        let (one, a, b) = Self::antichain2_labels();
        let pset = HFSet::from_elements([one.clone(), a.clone(), b.clone()]);
        let leq = preorder_closure(
            &pset,
            &HFSet::from_elements([HFSet::kpair(a, one.clone()), HFSet::kpair(b, one.clone())]),
        );
        mk_forcing_notion(pset, leq, one).expect("valid")
    }

    /// `(1, a, b)` of [`ForcingNotion::antichain2`].
    pub fn antichain2_labels() -> (HFSet, HFSet, HFSet) {
        let one = HFSet::from_nat(1);
        (one.clone(), HFSet::singleton(one), HFSet::from_nat(2))
    }

    /// JSON-friendly description.
    pub fn to_spec(&self) -> PosetJson {
        PosetJson {
            elements: self.p.iter().map(|x| x.to_string()).collect(),
            leq: self
                .leq
                .iter()
                .filter_map(HFSet::as_pair)
                .map(|(a, b)| [a.to_string(), b.to_string()])
                .collect(),
            one: self.one.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    pub leq: Vec<[String; 2]>,
    pub one: String,
}

pub fn dense(fnotion: &ForcingNotion, d: &HFSet) -> Result<bool> {
    fnotion.dense(d)
}

pub fn dense_below(fnotion: &ForcingNotion, d: &HFSet, p: &HFSet) -> Result<bool> {
    fnotion.dense_below(d, p)
}

pub fn compatible(fnotion: &ForcingNotion, p: &HFSet, q: &HFSet) -> Result<bool> {
    fnotion.compatible(p, q)
}

pub fn is_filter(fnotion: &ForcingNotion, f: &HFSet) -> Result<bool> {
    fnotion.is_filter(f)
}

/// A filter meeting every dense subset of `P`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GenericFilter {
    pub elems: HFSet,
}

/// Every fully generic filter, in canonical order. Fails when `|P|` exceeds `bound`.
pub fn generic_filters_bounded(fnotion: &ForcingNotion, bound: usize) -> Result<Vec<GenericFilter>> {
    let n = fnotion.size();
    if n > bound {
        return Err(Error::Bound(format!(
            "poset has {n} conditions, generic filter enumeration is limited to {bound}"
        )));
    }
    let mut out: Vec<GenericFilter> = (0..=full(n))
        .filter(|&g| fnotion.is_generic_mask(g))
        .map(|g| GenericFilter {
            elems: fnotion.set_of(g),
        })
        .collect();
    out.sort();
    Ok(out)
}

pub fn generic_filters(fnotion: &ForcingNotion) -> Result<Vec<GenericFilter>> {
    generic_filters_bounded(fnotion, DEFAULT_GENERIC_BOUND)
}

/// All filters (not necessarily generic), in canonical order.
pub fn filters(fnotion: &ForcingNotion) -> Result<Vec<HFSet>> {
    let n = fnotion.size();
    if n > DEFAULT_GENERIC_BOUND {
        return Err(Error::Bound(format!("poset has {n} conditions")));
    }
    let mut out: Vec<HFSet> = (0..=full(n))
        .filter(|&f| fnotion.is_filter_mask(f))
        .map(|f| fnotion.set_of(f))
        .collect();
    out.sort();
    Ok(out)
}

/// Every element is a pair `⟨σ,p⟩` with `p ∈ P` and `σ` a name.
pub fn is_name(fnotion: &ForcingNotion, tau: &HFSet) -> bool {
    tau.iter().all(|x| match x.as_pair() {
        Some((sigma, p)) => fnotion.index_of(p).is_some() && is_name(fnotion, sigma),
        None => false,
    })
}

/// Memoizing interpreter of names under a fixed set of conditions.
pub struct Valuation<'a> {
    g: &'a HFSet,
    memo: HashMap<HFSet, HFSet>,
}

impl<'a> Valuation<'a> {
    pub fn new(g: &'a HFSet) -> Self {
        Valuation {
            g,
            memo: HashMap::new(),
        }
    }

    pub fn val(&mut self, tau: &HFSet) -> HFSet {
        if let Some(v) = self.memo.get(tau) {
            return v.clone();
        }
        let mut out = Vec::new();
        for x in tau.iter() {
            if let Some((sigma, p)) = x.as_pair() {
                if self.g.contains(p) {
                    out.push(self.val(sigma));
                }
            }
        }
        let v = HFSet::from_elements(out);
        self.memo.insert(tau.clone(), v.clone());
        v
    }
}

/// `val(G,τ) = {val(G,σ) : ∃p∈G. ⟨σ,p⟩ ∈ τ}`; non-pairs are ignored.
pub fn val(g: &HFSet, tau: &HFSet) -> HFSet {
    Valuation::new(g).val(tau)
}

/// `x̌ = {⟨y̌, one⟩ : y ∈ x}`.
pub fn check_with(one: &HFSet, x: &HFSet) -> HFSet {
    check_memo(one, x, &mut HashMap::new())
}

fn check_memo(one: &HFSet, x: &HFSet, memo: &mut HashMap<HFSet, HFSet>) -> HFSet {
    if let Some(c) = memo.get(x) {
        return c.clone();
    }
    let c = HFSet::from_elements(
        x.iter()
            .map(|y| HFSet::kpair(check_memo(one, y, memo), one.clone()))
            .collect::<Vec<_>>(),
    );
    memo.insert(x.clone(), c.clone());
    c
}

pub fn check(fnotion: &ForcingNotion, x: &HFSet) -> HFSet {
    check_with(&fnotion.one, x)
}

/// `Ġ = {⟨p̌, p⟩ : p ∈ P}`.
pub fn g_dot(fnotion: &ForcingNotion) -> HFSet {
    HFSet::from_elements(
        fnotion
            .p
            .iter()
            .map(|p| HFSet::kpair(check(fnotion, p), p.clone())),
    )
}

/// `M[G] = {val(G,τ) : τ ∈ M}`.
pub fn generic_extension(m: &HFSet, g: &HFSet) -> HFSet {
    let mut v = Valuation::new(g);
    HFSet::from_elements(m.iter().map(|tau| v.val(tau)))
}

/// An argument of the atomic forcing function: `ft = 1` for membership, `0` for equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AtomicTuple {
    pub ft: u8,
    pub t1: HFSet,
    pub t2: HFSet,
    pub p: HFSet,
}

impl AtomicTuple {
    pub fn new(ft: u8, t1: HFSet, t2: HFSet, p: HFSet) -> Self {
        AtomicTuple { ft, t1, t2, p }
    }
}

/// Termination measure of the atomic recursion: the larger name rank, then
/// 0 for a membership whose right name is strictly higher, 1 for an equality,
/// 2 for any other membership.
pub fn frc_measure(ft: u8, t1: &HFSet, t2: &HFSet) -> (u32, u8) {
    let (r1, r2) = (t1.rank(), t2.rank());
    let sub = match ft {
        0 => 1,
        _ if r2 > r1 => 0,
        _ => 2,
    };
    (r1.max(r2), sub)
}

/// `t` precedes `s` in the well-founded relation the atomic recursion descends along.
pub fn frec_r(t: &AtomicTuple, s: &AtomicTuple) -> bool {
    frc_measure(t.ft, &t.t1, &t.t2) < frc_measure(s.ft, &s.t1, &s.t2)
}

/// Memoized evaluator of the atomic forcing function for one notion.
///
/// Results are masks over all conditions at once. Every recursive call asserts
/// that the measure of [`frec_r`] strictly decreases.
pub struct FrcEngine {
    notion: Arc<ForcingNotion>,
    memo: HashMap<(u8, HFSet, HFSet), Mask>,
    calls: u64,
}

impl FrcEngine {
    pub fn new(notion: Arc<ForcingNotion>) -> Self {
        FrcEngine {
            notion,
            memo: HashMap::new(),
            calls: 0,
        }
    }

    pub fn notion(&self) -> &ForcingNotion {
        &self.notion
    }

    /// Number of recursive calls whose measure decrease was asserted.
    pub fn checked_calls(&self) -> u64 {
        self.calls
    }

    fn descend(&mut self, from: (u32, u8), ft: u8, t1: &HFSet, t2: &HFSet) -> Mask {
        let to = frc_measure(ft, t1, t2);
        assert!(to < from, "frecR does not decrease: {from:?} -> {to:?}");
        self.calls += 1;
        self.mask(ft, t1, t2)
    }

    /// Pairs `⟨σ, r⟩ ∈ τ` with `r ∈ P`, as `(σ, index of r)`.
    fn entries(&self, tau: &HFSet) -> Vec<(HFSet, usize)> {
        tau.iter()
            .filter_map(|x| {
                let (s, r) = x.as_pair()?;
                Some((s.clone(), self.notion.index_of(r)?))
            })
            .collect()
    }

    /// The conditions forcing the atomic statement.
    pub fn mask(&mut self, ft: u8, t1: &HFSet, t2: &HFSet) -> Mask {
        let key = (ft, t1.clone(), t2.clone());
        if let Some(&m) = self.memo.get(&key) {
            return m;
        }
        let here = frc_measure(ft, t1, t2);
        let result = if ft == 1 {
            let mut d: Mask = 0;
            for (sigma, r) in self.entries(t2) {
                let below_r = self.notion.below[r];
                if below_r & !d == 0 {
                    continue;
                }
                d |= below_r & self.descend(here, 0, t1, &sigma);
            }
            self.notion.dense_below_all(d)
        } else {
            let mut dom: Vec<HFSet> = self
                .entries(t1)
                .into_iter()
                .chain(self.entries(t2))
                .map(|(s, _)| s)
                .collect();
            dom.sort();
            dom.dedup();
            let mut diff: Mask = 0;
            for sigma in dom {
                let a = self.descend(here, 1, &sigma, t1);
                let b = self.descend(here, 1, &sigma, t2);
                diff |= a ^ b;
            }
            let n = self.notion.size();
            (0..n)
                .filter(|&p| self.notion.below[p] & diff == 0)
                .fold(0, |m, p| m | (1 << p))
        };
        self.memo.insert(key, result);
        result
    }

    pub fn frc_at(&mut self, t: &AtomicTuple) -> Result<bool> {
        let i = self.notion.idx(&t.p)?;
        Ok(self.mask(t.ft.min(1), &t.t1, &t.t2) & (1 << i) != 0)
    }

    /// Conditions forcing `φ` under `env`, with quantifiers ranging over `dom`.
    pub fn forces_mask(&mut self, dom: &[HFSet], env: &mut Vec<HFSet>, phi: &Formula) -> Mask {
        match phi {
            Formula::Member(i, j) => {
                let (a, b) = (nth(*i, env), nth(*j, env));
                self.mask(1, &a, &b)
            }
            Formula::Equal(i, j) => {
                let (a, b) = (nth(*i, env), nth(*j, env));
                self.mask(0, &a, &b)
            }
            Formula::Nand(a, b) => {
                let both = if Arc::ptr_eq(a, b) {
                    self.forces_mask(dom, env, a)
                } else {
                    let ma = self.forces_mask(dom, env, a);
                    if ma == 0 {
                        0
                    } else {
                        ma & self.forces_mask(dom, env, b)
                    }
                };
                (0..self.notion.size())
                    .filter(|&p| self.notion.below[p] & both == 0)
                    .fold(0, |acc, p| acc | (1 << p))
            }
            Formula::Forall(body) => {
                let mut acc = self.notion.all_mask();
                for tau in dom {
                    if acc == 0 {
                        break;
                    }
                    env.insert(0, tau.clone());
                    acc &= self.forces_mask(dom, env, body);
                    env.remove(0);
                }
                acc
            }
            Formula::ForcesMem(..) | Formula::ForcesEq(..) => {
                unreachable!("forces_mask is only called on core formulas")
            }
        }
    }
}

/// The atomic forcing function; `t.p` must be a condition.
pub fn frc_at(fnotion: &ForcingNotion, t: &AtomicTuple) -> Result<bool> {
    FrcEngine::new(Arc::new(fnotion.clone())).frc_at(t)
}

/// [`frc_at`] additionally rejecting arguments that are not names.
pub fn frc_at_strict(fnotion: &ForcingNotion, t: &AtomicTuple) -> Result<bool> {
    for x in [&t.t1, &t.t2] {
        if !is_name(fnotion, x) {
            return Err(Error::NotAName(x.clone()));
        }
    }
    frc_at(fnotion, t)
}

/// `p ⊩ φ [env]`, with universal quantifiers ranging over the elements of `m`.
pub fn forces_rel(
    m: &HFSet,
    fnotion: &ForcingNotion,
    p: &HFSet,
    env: &[HFSet],
    phi: &Formula,
) -> Result<bool> {
    let mut engine = FrcEngine::new(Arc::new(fnotion.clone()));
    forces_rel_with(&mut engine, m, p, env, phi)
}

/// [`forces_rel`] reusing an engine's memo table.
pub fn forces_rel_with(
    engine: &mut FrcEngine,
    m: &HFSet,
    p: &HFSet,
    env: &[HFSet],
    phi: &Formula,
) -> Result<bool> {
    let i = engine.notion.idx(p)?;
    if !phi.is_core() {
        return Err(Error::NonCore(phi.render()));
    }
    let dom = effective_domain(&engine.notion, m);
    let mut env = env.to_vec();
    Ok(engine.forces_mask(&dom, &mut env, phi) & (1 << i) != 0)
}

/// `τ` pruned to the pairs `⟨σ,p⟩` with `p ∈ P`, recursively. Forcing and `val`
/// only ever look at these pairs, so `τ` and its pruning are interchangeable.
pub fn effective_name(fnotion: &ForcingNotion, tau: &HFSet) -> HFSet {
    HFSet::from_elements(tau.iter().filter_map(|x| {
        let (s, p) = x.as_pair()?;
        fnotion
            .index_of(p)
            .map(|_| HFSet::kpair(effective_name(fnotion, s), p.clone()))
    }))
}

/// The distinct prunings of the elements of `m`: a quantifier domain
/// equivalent to `m` for the forcing relation.
pub fn effective_domain(fnotion: &ForcingNotion, m: &HFSet) -> Vec<HFSet> {
    let mut v: Vec<HFSet> = m.iter().map(|t| effective_name(fnotion, t)).collect();
    v.sort();
    v.dedup();
    v
}

/// Interprets forcing atoms during satisfaction. The atom reads the condition,
/// poset, order and top from env indices 0..3; an engine is built (and cached)
/// per distinct poset. Atoms over an invalid notion, or with `p ∉ P`, are false.
#[derive(Default)]
pub struct ForcingContext {
    engines: RefCell<HashMap<(HFSet, HFSet, HFSet), Option<FrcEngine>>>,
}

impl ForcingContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn for_notion(fnotion: &ForcingNotion) -> Self {
        let ctx = Self::new();
        ctx.engines.borrow_mut().insert(
            (fnotion.p.clone(), fnotion.leq.clone(), fnotion.one.clone()),
            Some(FrcEngine::new(Arc::new(fnotion.clone()))),
        );
        ctx
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn atom(
        &self,
        ft: u8,
        t1: &HFSet,
        t2: &HFSet,
        p: &HFSet,
        pp: &HFSet,
        leq: &HFSet,
        one: &HFSet,
    ) -> bool {
        let mut engines = self.engines.borrow_mut();
        let engine = engines
            .entry((pp.clone(), leq.clone(), one.clone()))
            .or_insert_with(|| {
                mk_forcing_notion(pp.clone(), leq.clone(), one.clone())
                    .ok()
                    .map(|n| FrcEngine::new(Arc::new(n)))
            });
        match engine {
            Some(e) => match e.notion.index_of(p) {
                Some(i) => e.mask(ft, t1, t2) & (1 << i) != 0,
                None => false,
            },
            None => false,
        }
    }
}

/// `∃x. x = src ∧ body` for each source index, innermost binder first in `src`,
/// so that body indices `0..m` see the outer values `src[0..m]` and every
/// other free index moves up by `shift`.
fn rebind(body: &Formula, src: &[usize], shift: usize) -> Formula {
    let m = src.len();
    let mut f = body.lift(m, m + shift);
    for k in (1..=m).rev() {
        let pin = equal_fm(0, src[m - k] + k);
        f = neg_fm(forall_fm(nand_fm(pin, f)));
    }
    f
}

/// `q ∈ P ∧ ⟨q,p⟩ ∈ leq` with `q` at index 0 and the outer `[p,P,leq,1]` at 1..4.
fn below_guard() -> Formula {
    let (mut b, v) = Builder::new(5);
    let (q, p, pp, leq) = (v[0], v[1], v[2], v[3]);
    let in_p = b.mem(q, pp);
    let ordered = b.exists(|b, z| {
        let g = b.mem(z, leq);
        and_fm(g, codes::pair(b, q, p, z))
    });
    and_fm(in_p, ordered)
}

fn forces_core(phi: &Formula) -> Formula {
    match phi {
        Formula::Member(i, j) => Formula::ForcesMem(i + 4, j + 4),
        Formula::Equal(i, j) => Formula::ForcesEq(i + 4, j + 4),
        Formula::Nand(a, b) => {
            let fa = Arc::new(rebind(&forces_core(a), &[0, 2, 3, 4], 1));
            let fb = if Arc::ptr_eq(a, b) {
                fa.clone()
            } else {
                Arc::new(rebind(&forces_core(b), &[0, 2, 3, 4], 1))
            };
            let both = neg_fm(Formula::Nand(fa, fb));
            forall_fm(nand_fm(below_guard(), both))
        }
        Formula::Forall(a) => forall_fm(rebind(&forces_core(a), &[1, 2, 3, 4, 0], 0)),
        Formula::ForcesMem(..) | Formula::ForcesEq(..) => unreachable!(),
    }
}

/// The formula expressing `p ⊩ φ` over the environment `[p, P, leq, 1, τ1, …]`.
pub fn forces(phi: &Formula) -> Result<Formula> {
    if !phi.is_core() {
        return Err(Error::NonCore(phi.render()));
    }
    Ok(forces_core(phi))
}

/// Poset description file: labels mapped to distinct HF sets.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct PosetSpec {
    pub elements: Vec<serde_json::Value>,
    #[serde(default)]
    pub leq: Vec<(serde_json::Value, serde_json::Value)>,
    pub one: serde_json::Value,
    #[serde(default = "default_encoding")]
    pub encode: String,
}

fn default_encoding() -> String {
    "vonneumann".to_owned()
}

fn label_text(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// A notion together with the user's labels for its conditions.
#[derive(Clone, Debug)]
pub struct LabeledPoset {
    pub notion: ForcingNotion,
    pub labels: Vec<(String, HFSet)>,
}

impl LabeledPoset {
    pub fn unlabeled(notion: ForcingNotion) -> Self {
        let labels = notion.p.iter().map(|x| (x.to_string(), x.clone())).collect();
        LabeledPoset { notion, labels }
    }

    /// Resolves a label, falling back to an HF literal.
    pub fn resolve(&self, s: &str) -> Result<HFSet> {
        if let Some((_, x)) = self.labels.iter().find(|(l, _)| l == s) {
            return Ok(x.clone());
        }
        Ok(s.parse::<HFSet>()?)
    }
}

impl PosetSpec {
    /// Maps labels to sets (`vonneumann`: i ↦ i, `tag`: i ↦ {i}, by position)
    /// and validates the result, closing `leq` first if asked to.
    pub fn build(&self, close_leq: bool) -> Result<LabeledPoset> {
        let encode = |i: usize| match self.encode.as_str() {
            "vonneumann" => Ok(HFSet::from_nat(i)),
            "tag" => Ok(HFSet::singleton(HFSet::from_nat(i))),
            other => Err(Error::Poset(format!("unknown encoding '{other}'"))),
        };
        let mut labels: Vec<(String, HFSet)> = Vec::new();
        for (i, v) in self.elements.iter().enumerate() {
            let l = label_text(v);
            if labels.iter().any(|(k, _)| *k == l) {
                return Err(Error::Poset(format!("duplicate label '{l}'")));
            }
            labels.push((l, encode(i)?));
        }
        let find = |v: &serde_json::Value| {
            let l = label_text(v);
            labels
                .iter()
                .find(|(k, _)| *k == l)
                .map(|(_, x)| x.clone())
                .ok_or_else(|| Error::Poset(format!("unknown label '{l}'")))
        };
        let pset = HFSet::from_elements(labels.iter().map(|(_, x)| x.clone()));
        let mut pairs = Vec::new();
        for (a, b) in &self.leq {
            pairs.push(HFSet::kpair(find(a)?, find(b)?));
        }
        let mut leq = HFSet::from_elements(pairs);
        if close_leq {
            leq = preorder_closure(&pset, &leq);
        }
        let one = find(&self.one)?;
        Ok(LabeledPoset {
            notion: mk_forcing_notion(pset, leq, one)?,
            labels,
        })
    }
}

/// `builtin:trivial|C2|A2`, a JSON file path, or inline JSON.
pub fn load_poset(arg: &str, close_leq: bool) -> Result<LabeledPoset> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        let notion = match name {
            "trivial" => ForcingNotion::trivial(),
            "C2" => ForcingNotion::chain2(),
            "A2" => ForcingNotion::antichain2(),
            _ => {
                return Err(Error::Unknown {
                    kind: "builtin poset",
                    name: name.to_owned(),
                })
            }
        };
        let mut lp = LabeledPoset::unlabeled(notion);
        let names: &[(&str, HFSet)] = &match name {
            "trivial" => vec![("1", HFSet::from_nat(1))],
            "C2" => vec![("1", HFSet::from_nat(1)), ("p", HFSet::singleton(HFSet::from_nat(1)))],
            _ => {
                let (one, a, b) = ForcingNotion::antichain2_labels();
                vec![("1", one), ("a", a), ("b", b)]
            }
        };
        lp.labels = names.iter().map(|(l, x)| (l.to_string(), x.clone())).collect();
        return Ok(lp);
    }
    let text = if arg.trim_start().starts_with('{') {
        arg.to_owned()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::Poset(format!("{arg}: {e}")))?
    };
    let spec: PosetSpec =
        serde_json::from_str(&text).map_err(|e| Error::Poset(format!("{e}")))?;
    spec.build(close_leq)
}
