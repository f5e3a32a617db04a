//! Satisfaction in finite set models, axiom codes, scheme instances and the
//! replacement-instance registry.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forcing::ForcingContext;
use crate::formula::*;
use crate::hfset::HFSet;
use crate::relativize::codes;

/// Assignment of de Bruijn indices: `env[i]` interprets index `i`.
pub type Env = Vec<HFSet>;

/// `env[i]`, or 0 when out of range.
pub fn nth(i: usize, env: &[HFSet]) -> HFSet {
    env.get(i).cloned().unwrap_or_else(HFSet::empty)
}

/// `M, env ⊨ p` for a core formula.
pub fn sats(m: &HFSet, env: &[HFSet], p: &Formula) -> Result<bool> {
    sats_with(m, env, p, None)
}

/// Like [`sats`], with forcing atoms interpreted through `ctx`.
pub fn sats_with(
    m: &HFSet,
    env: &[HFSet],
    p: &Formula,
    ctx: Option<&ForcingContext>,
) -> Result<bool> {
    if ctx.is_none() && !p.is_core() {
        return Err(Error::NonCore(truncated(p)));
    }
    let mut ev = Evaluator::new(m, env, ctx);
    Ok(ev.eval(p))
}

/// [`sats`] additionally requiring `arity(p) ≤ |env|` and `env ⊆ M`.
pub fn sats_strict(m: &HFSet, env: &[HFSet], p: &Formula) -> Result<bool> {
    if p.arity() > env.len() {
        return Err(Error::ArityExceedsEnv {
            arity: p.arity(),
            len: env.len(),
        });
    }
    check_env(m, env)?;
    sats(m, env, p)
}

pub(crate) fn check_env(m: &HFSet, env: &[HFSet]) -> Result<()> {
    match env.iter().find(|x| !m.contains(x)) {
        Some(x) => Err(Error::EnvOutsideModel(x.clone())),
        None => Ok(()),
    }
}

fn truncated(p: &Formula) -> String {
    let s = p.render();
    if s.len() > 120 {
        format!("{}...", &s[..120])
    } else {
        s
    }
}

/// Formula evaluator over a fixed model; the environment is kept as a stack
/// whose top is index 0.
pub(crate) struct Evaluator<'a> {
    universe: &'a [HFSet],
    stack: Vec<HFSet>,
    ctx: Option<&'a ForcingContext>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(m: &'a HFSet, env: &[HFSet], ctx: Option<&'a ForcingContext>) -> Self {
        Evaluator {
            universe: m.elements(),
            stack: env.iter().rev().cloned().collect(),
            ctx,
        }
    }

    fn get(&self, i: usize) -> HFSet {
        let n = self.stack.len();
        if i < n {
            self.stack[n - 1 - i].clone()
        } else {
            HFSet::empty()
        }
    }

    fn get_ref(&self, i: usize) -> Option<&HFSet> {
        let n = self.stack.len();
        (i < n).then(|| &self.stack[n - 1 - i])
    }

    pub(crate) fn eval(&mut self, p: &Formula) -> bool {
        match p {
            Formula::Member(i, j) => match (self.get_ref(*i), self.get_ref(*j)) {
                (_, None) => false,
                (None, Some(y)) => y.contains(&HFSet::empty()),
                (Some(x), Some(y)) => y.contains(x),
            },
            Formula::Equal(i, j) => self.get(*i) == self.get(*j),
            Formula::Nand(a, b) => {
                if Arc::ptr_eq(a, b) {
                    !self.eval(a)
                } else {
                    !(self.eval(a) && self.eval(b))
                }
            }
            Formula::Forall(body) => {
                let universe = self.universe;
                universe.iter().all(|x| {
                    self.stack.push(x.clone());
                    let r = self.eval(body);
                    self.stack.pop();
                    r
                })
            }
            Formula::ForcesMem(i, j) => self.forcing_atom(1, *i, *j),
            Formula::ForcesEq(i, j) => self.forcing_atom(0, *i, *j),
        }
    }

    fn forcing_atom(&mut self, ft: u8, i: usize, j: usize) -> bool {
        let ctx = self.ctx.expect("forcing atom evaluated without a context");
        let (p, pp, leq, one) = (self.get(0), self.get(1), self.get(2), self.get(3));
        ctx.atom(ft, &self.get(i), &self.get(j), &p, &pp, &leq, &one)
    }
}

/// Named finite axioms of ZF(C).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AxiomName {
    Extensionality,
    Foundation,
    Pairing,
    UnionAx,
    PowersetAx,
    Infinity,
    AC,
}

impl AxiomName {
    pub const ALL: [AxiomName; 7] = [
        AxiomName::Extensionality,
        AxiomName::Foundation,
        AxiomName::Pairing,
        AxiomName::UnionAx,
        AxiomName::PowersetAx,
        AxiomName::Infinity,
        AxiomName::AC,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AxiomName::Extensionality => "Extensionality",
            AxiomName::Foundation => "Foundation",
            AxiomName::Pairing => "Pairing",
            AxiomName::UnionAx => "UnionAx",
            AxiomName::PowersetAx => "PowersetAx",
            AxiomName::Infinity => "Infinity",
            AxiomName::AC => "AC",
        }
    }
}

impl fmt::Display for AxiomName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxiomName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AxiomName::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown {
                kind: "axiom",
                name: s.to_owned(),
            })
    }
}

/// Axiom schemes, which are checked instance by instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Scheme {
    Separation,
    Replacement,
}

/// The named axiom collections: `ZF_fin`, `Z`, `ZC`, `ZF`, `ZFC`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxiomSet {
    ZFfin,
    Z,
    ZC,
    ZF,
    ZFC,
}

impl AxiomSet {
    pub fn axioms(self) -> Vec<AxiomName> {
        use AxiomName::*;
        let mut v = vec![Extensionality, Foundation, Pairing, UnionAx, Infinity, PowersetAx];
        if matches!(self, AxiomSet::ZC | AxiomSet::ZFC) {
            v.push(AC);
        }
        v
    }

    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            AxiomSet::ZFfin => vec![],
            AxiomSet::Z | AxiomSet::ZC => vec![Scheme::Separation],
            AxiomSet::ZF | AxiomSet::ZFC => vec![Scheme::Separation, Scheme::Replacement],
        }
    }
}

impl FromStr for AxiomSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ZF_fin" | "ZFfin" => AxiomSet::ZFfin,
            "Z" => AxiomSet::Z,
            "ZC" => AxiomSet::ZC,
            "ZF" => AxiomSet::ZF,
            "ZFC" => AxiomSet::ZFC,
            _ => {
                return Err(Error::Unknown {
                    kind: "axiom set",
                    name: s.to_owned(),
                })
            }
        })
    }
}

/// The closed code of a finite axiom, synthesized from its relational definition.
pub fn axiom_code(name: AxiomName) -> Formula {
    let (mut b, _) = Builder::new(0);
    match name {
        AxiomName::Extensionality => b.forall(|b, x| {
            b.forall(|b, y| {
                imp_fm(
                    b.forall(|b, z| iff_fm(b.mem(z, x), b.mem(z, y))),
                    b.eq(x, y),
                )
            })
        }),
        AxiomName::Foundation => b.forall(|b, x| {
            imp_fm(
                b.exists(|b, y| b.mem(y, x)),
                b.exists(|b, y| {
                    and_fm(
                        b.mem(y, x),
                        neg_fm(b.exists(|b, z| and_fm(b.mem(z, x), b.mem(z, y)))),
                    )
                }),
            )
        }),
        AxiomName::Pairing => b.forall(|b, x| {
            b.forall(|b, y| b.exists(|b, z| codes::upair(b, x, y, z)))
        }),
        AxiomName::UnionAx => {
            b.forall(|b, x| b.exists(|b, z| codes::big_union(b, x, z)))
        }
        AxiomName::PowersetAx => b.forall(|b, x| {
            b.exists(|b, z| {
                b.forall(|b, xa| {
                    iff_fm(
                        b.mem(xa, z),
                        b.forall(|b, xb| imp_fm(b.mem(xb, xa), b.mem(xb, x))),
                    )
                })
            })
        }),
        AxiomName::Infinity => b.exists(|b, i| {
            and_fm(
                b.exists(|b, z| and_fm(codes::empty(b, z), b.mem(z, i))),
                b.forall(|b, y| {
                    imp_fm(
                        b.mem(y, i),
                        b.exists(|b, sy| and_fm(codes::successor(b, y, sy), b.mem(sy, i))),
                    )
                }),
            )
        }),
        AxiomName::AC => b.forall(|b, x| {
            b.exists(|b, a| {
                b.exists(|b, f| and_fm(codes::ordinal(b, a), codes::surjection(b, a, x, f)))
            })
        }),
    }
}

/// Number of parameters closed over by [`separation_code`].
pub fn separation_params(p: &Formula) -> usize {
    p.arity().saturating_sub(1)
}

/// Number of parameters closed over by [`replacement_code`].
pub fn replacement_params(p: &Formula) -> usize {
    p.arity().saturating_sub(2)
}

/// `∀params ∀z ∃y ∀x. x∈y ⟷ x∈z ∧ p[x, params]`.
///
/// Parameters are bound outermost first, so the innermost parameter binder
/// supplies `env[0]`.
pub fn separation_code(p: &Formula) -> Formula {
    let k = separation_params(p);
    let (mut b, _) = Builder::new(0);
    b.forall_n(k, |b, outer| {
        let params: Vec<Var> = outer.iter().rev().copied().collect();
        b.forall(|b, z| {
            b.exists(|b, y| {
                b.forall(|b, x| {
                    let mut args = vec![x];
                    args.extend(&params);
                    iff_fm(b.mem(x, y), and_fm(b.mem(x, z), b.embed(p, &args)))
                })
            })
        })
    })
}

/// `∀params ∀A. univalent(A, p) ⟶ ∃Y ∀b. b∈Y ⟷ ∃x. x∈A ∧ p[x, b, params]`.
pub fn replacement_code(p: &Formula) -> Formula {
    let k = replacement_params(p);
    let (mut b, _) = Builder::new(0);
    b.forall_n(k, |b, outer| {
        let params: Vec<Var> = outer.iter().rev().copied().collect();
        let inst = |b: &Builder, x: Var, y: Var| {
            let mut args = vec![x, y];
            args.extend(&params);
            b.embed(p, &args)
        };
        b.forall(|b, a| {
            let univalent = b.forall(|b, x| {
                imp_fm(
                    b.mem(x, a),
                    b.forall(|b, y| {
                        b.forall(|b, z| {
                            imp_fm(and_fm(inst(b, x, y), inst(b, x, z)), b.eq(y, z))
                        })
                    }),
                )
            });
            let collect = b.exists(|b, yy| {
                b.forall(|b, bb| {
                    iff_fm(
                        b.mem(bb, yy),
                        b.exists(|b, x| and_fm(b.mem(x, a), inst(b, x, bb))),
                    )
                })
            });
            imp_fm(univalent, collect)
        })
    })
}

/// Groups the model's elements by their trace `y ∩ M`, for scheme checks.
fn traces(m: &HFSet) -> std::collections::HashSet<Vec<usize>> {
    let elems = m.elements();
    elems
        .iter()
        .map(|y| {
            elems
                .iter()
                .enumerate()
                .filter(|(_, x)| y.contains(x))
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

/// Direct check of the separation instance for `p` with parameters `env`.
pub fn separation_holds(m: &HFSet, p: &Formula, env: &[HFSet]) -> Result<bool> {
    check_env(m, env)?;
    let elems = m.elements();
    let mut truth = Vec::with_capacity(elems.len());
    for x in elems {
        let mut e = vec![x.clone()];
        e.extend_from_slice(env);
        truth.push(sats(m, &e, p)?);
    }
    let traces = traces(m);
    Ok(elems.iter().all(|z| {
        let target: Vec<usize> = (0..elems.len())
            .filter(|&i| truth[i] && z.contains(&elems[i]))
            .collect();
        traces.contains(&target)
    }))
}

/// Direct check of the strong replacement instance for `p` with parameters `env`.
pub fn replacement_holds(m: &HFSet, p: &Formula, env: &[HFSet]) -> Result<bool> {
    check_env(m, env)?;
    let elems = m.elements();
    let n = elems.len();
    let mut rel = vec![false; n * n];
    for (i, x) in elems.iter().enumerate() {
        for (j, y) in elems.iter().enumerate() {
            let mut e = vec![x.clone(), y.clone()];
            e.extend_from_slice(env);
            rel[i * n + j] = sats(m, &e, p)?;
        }
    }
    let traces = traces(m);
    Ok(elems.iter().all(|a| {
        let dom: Vec<usize> = (0..n).filter(|&i| a.contains(&elems[i])).collect();
        let univalent = dom
            .iter()
            .all(|&i| (0..n).filter(|&j| rel[i * n + j]).count() <= 1);
        if !univalent {
            return true;
        }
        let target: Vec<usize> = (0..n)
            .filter(|&j| dom.iter().any(|&i| rel[i * n + j]))
            .collect();
        traces.contains(&target)
    }))
}

/// One line of an axiom report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub axiom: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<HFSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<HFSet>,
}

/// Per-axiom satisfaction report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub model: HFSet,
    pub results: Vec<AxiomResult>,
}

impl Report {
    pub fn holds(&self, name: &str) -> Option<bool> {
        self.results.iter().find(|r| r.axiom == name).map(|r| r.holds)
    }
}

/// Peels `exists_fm(body)` back into `body`.
fn as_exists(p: &Formula) -> Option<&Formula> {
    let Formula::Nand(a, b) = p else { return None };
    if !Arc::ptr_eq(a, b) {
        return None;
    }
    let Formula::Forall(inner) = a.as_ref() else { return None };
    let Formula::Nand(c, d) = inner.as_ref() else { return None };
    Arc::ptr_eq(c, d).then_some(c.as_ref())
}

/// Evaluates each axiom code in `m`, attaching a witness for existential axioms
/// and a counterexample for failing universal ones.
pub fn satisfies(m: &HFSet, names: &[AxiomName]) -> Report {
    let results = names
        .iter()
        .map(|&name| {
            let code = axiom_code(name);
            let find = |body: &Formula, want: bool| {
                m.iter()
                    .find(|x| {
                        sats(m, std::slice::from_ref(*x), body).expect("axiom codes are core")
                            == want
                    })
                    .cloned()
            };
            let (holds, witness, counterexample) = match (&code, as_exists(&code)) {
                (_, Some(body)) => {
                    let w = find(body, true);
                    (w.is_some(), w, None)
                }
                (Formula::Forall(body), None) => {
                    let c = find(body, false);
                    (c.is_none(), None, c)
                }
                _ => (sats(m, &[], &code).expect("axiom codes are core"), None, None),
            };
            AxiomResult {
                axiom: name.to_string(),
                holds,
                witness,
                counterexample,
            }
        })
        .collect();
    Report {
        model: m.clone(),
        results,
    }
}

/// The replacement instances used by the formalization, by name, grouped as in
/// the mechanization's instance table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomRegistry {
    pub groups: BTreeMap<String, Vec<String>>,
    pub overhead: Vec<String>,
    pub overhead_not_ch: Vec<String>,
    pub overhead_ch: Vec<String>,
}

impl AxiomRegistry {
    pub fn group(&self, name: &str) -> &[String] {
        self.groups.get(name).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Instances that also enter through `ground_repl_fm`.
const DAGGERED: [&str; 8] = [
    "eclose_closed_fm",
    "eclose_abs_fm",
    "wfrec_rank_fm",
    "transrec_VFrom_fm",
    "wfrec_ordertype_fm",
    "omap_replacement_fm",
    "ordtype_replacement_fm",
    "wfrec_Aleph_fm",
];

fn union_of(parts: &[&[String]]) -> Vec<String> {
    let mut v: Vec<String> = parts.iter().flat_map(|p| p.iter().cloned()).collect();
    v.sort();
    v.dedup();
    v
}

pub fn registry() -> AxiomRegistry {
    let owned = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let instances1 = owned(&DAGGERED[..4]);
    let instances2 = owned(&DAGGERED[4..]);
    let instances3: Vec<String> = DAGGERED
        .iter()
        .map(|f| format!("ground_repl_fm({f})"))
        .collect();
    let ground = owned(&[
        "wfrec_Hcheck_fm",
        "wfrec_Hfrc_at_fm",
        "lam_replacement_check_fm",
    ]);
    let ground_not_ch = owned(&["rec_constr_fm", "rec_constr_abs_fm"]);
    let ground_ch = owned(&["dc_abs_fm"]);

    let overhead = union_of(&[&instances1, &ground]);
    let overhead_not_ch = union_of(&[&instances1, &instances2, &instances3, &ground, &ground_not_ch]);
    let overhead_ch = union_of(&[&overhead_not_ch, &ground_ch]);

    let mut groups = BTreeMap::new();
    groups.insert("instances1_fms".to_owned(), instances1);
    groups.insert("instances2_fms".to_owned(), instances2);
    groups.insert("instances3_fms".to_owned(), instances3);
    groups.insert("instances_ground_fms".to_owned(), ground);
    groups.insert("instances_ground_notCH_fms".to_owned(), ground_not_ch);
    groups.insert("instances_ground_CH_fms".to_owned(), ground_ch);
    AxiomRegistry {
        groups,
        overhead,
        overhead_not_ch,
        overhead_ch,
    }
}

/// Truth table of `p` over every environment of length `arity(p)` from `m`,
/// keyed by the environment. Used by tests and the CLI.
pub fn truth_table(m: &HFSet, p: &Formula) -> Result<HashMap<Vec<HFSet>, bool>> {
    let k = p.arity();
    let mut out = HashMap::new();
    for env in envs(m, k) {
        let v = sats(m, &env, p)?;
        out.insert(env, v);
    }
    Ok(out)
}

/// All environments of length `k` over the elements of `m`, in canonical order.
pub fn envs(m: &HFSet, k: usize) -> Vec<Vec<HFSet>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|e| {
                m.iter().map(move |x| {
                    let mut e2 = e.clone();
                    e2.push(x.clone());
                    e2
                })
            })
            .collect();
    }
    out
}
