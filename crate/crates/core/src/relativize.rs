//! Relational predicates evaluated over a class, their internalized codes, the
//! relative powerset, and absoluteness checking.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::*;
use crate::hfset::HFSet;

/// The class a relational predicate is relativized to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassPred {
    /// `##A`: membership in a set.
    SetCast(HFSet),
    /// The whole universe.
    Universe,
}

impl ClassPred {
    pub fn holds(&self, x: &HFSet) -> bool {
        match self {
            ClassPred::SetCast(a) => a.contains(x),
            ClassPred::Universe => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredName {
    BigUnion,
    Upair,
    Pair,
    Successor,
    Empty,
    TransitiveSet,
    Ordinal,
    Image,
    IsApply,
    IsFunction,
    IsRelation,
    IsDomain,
    TypedFunction,
    Surjection,
    IsFunctionSpace,
    Univalent,
}

impl PredName {
    pub const ALL: [PredName; 16] = [
        PredName::BigUnion,
        PredName::Upair,
        PredName::Pair,
        PredName::Successor,
        PredName::Empty,
        PredName::TransitiveSet,
        PredName::Ordinal,
        PredName::Image,
        PredName::IsApply,
        PredName::IsFunction,
        PredName::IsRelation,
        PredName::IsDomain,
        PredName::TypedFunction,
        PredName::Surjection,
        PredName::IsFunctionSpace,
        PredName::Univalent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PredName::BigUnion => "big_union",
            PredName::Upair => "upair",
            PredName::Pair => "pair",
            PredName::Successor => "successor",
            PredName::Empty => "empty",
            PredName::TransitiveSet => "transitive_set",
            PredName::Ordinal => "ordinal",
            PredName::Image => "image",
            PredName::IsApply => "is_apply",
            PredName::IsFunction => "is_function",
            PredName::IsRelation => "is_relation",
            PredName::IsDomain => "is_domain",
            PredName::TypedFunction => "typed_function",
            PredName::Surjection => "surjection",
            PredName::IsFunctionSpace => "is_function_space",
            PredName::Univalent => "univalent",
        }
    }

    /// Number of set arguments (the class is not counted).
    pub fn arity(self) -> usize {
        match self {
            PredName::Empty
            | PredName::TransitiveSet
            | PredName::Ordinal
            | PredName::IsFunction
            | PredName::IsRelation => 1,
            PredName::BigUnion | PredName::Successor | PredName::IsDomain | PredName::Univalent => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for PredName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PredName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PredName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "predicate",
                name: s.to_owned(),
            })
    }
}

/// Quantifier domain for the host-level evaluation of relational definitions.
struct Dom {
    set: HFSet,
}

impl Dom {
    fn all(&self) -> &[HFSet] {
        self.set.elements()
    }

    fn has(&self, x: &HFSet) -> bool {
        self.set.contains(x)
    }

    /// `∀x[M]. x ∈ z ⟶ …` ranges over `z ∩ M` only.
    fn inside<'a>(&'a self, z: &'a HFSet) -> impl Iterator<Item = &'a HFSet> + 'a {
        z.iter().filter(move |x| self.has(x))
    }

    /// Elements of elements of `p` (both in the class): the only candidates for
    /// the components of a pair `p`.
    fn components(&self, p: &HFSet) -> Vec<HFSet> {
        let mut v: Vec<HFSet> = self
            .inside(p)
            .flat_map(|x| self.inside(x).cloned().collect::<Vec<_>>())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    fn upair(&self, a: &HFSet, b: &HFSet, z: &HFSet) -> bool {
        z.contains(a) && z.contains(b) && self.inside(z).all(|x| x == a || x == b)
    }

    fn pair(&self, a: &HFSet, b: &HFSet, z: &HFSet) -> bool {
        self.inside(z).any(|x| {
            self.upair(a, a, x) && self.inside(z).any(|y| self.upair(a, b, y) && self.upair(x, y, z))
        })
    }

    fn big_union(&self, a: &HFSet, z: &HFSet) -> bool {
        self.all()
            .iter()
            .all(|x| z.contains(x) == self.inside(a).any(|y| y.contains(x)))
    }

    fn successor(&self, a: &HFSet, z: &HFSet) -> bool {
        self.all().iter().any(|x| {
            self.upair(a, a, x)
                && self
                    .all()
                    .iter()
                    .all(|xa| z.contains(xa) == (x.contains(xa) || a.contains(xa)))
        })
    }

    fn empty(&self, z: &HFSet) -> bool {
        self.inside(z).next().is_none()
    }

    fn transitive_set(&self, a: &HFSet) -> bool {
        self.inside(a).all(|x| self.inside(x).all(|xa| a.contains(xa)))
    }

    fn ordinal(&self, a: &HFSet) -> bool {
        self.transitive_set(a) && self.inside(a).all(|x| self.transitive_set(x))
    }

    fn image(&self, r: &HFSet, a: &HFSet, z: &HFSet) -> bool {
        self.all().iter().all(|y| {
            z.contains(y)
                == self
                    .inside(r)
                    .any(|w| self.inside(a).any(|x| self.pair(x, y, w)))
        })
    }

    fn is_apply(&self, f: &HFSet, x: &HFSet, y: &HFSet) -> bool {
        self.all().iter().any(|xs| {
            self.upair(x, x, xs)
                && self
                    .all()
                    .iter()
                    .any(|fxs| self.image(f, xs, fxs) && self.big_union(fxs, y))
        })
    }

    fn is_function(&self, r: &HFSet) -> bool {
        self.inside(r).all(|p| {
            let cp = self.components(p);
            self.inside(r).all(|p2| {
                let cp2 = self.components(p2);
                cp.iter().all(|x| {
                    cp.iter().all(|y| {
                        !self.pair(x, y, p)
                            || cp2.iter().all(|y2| !self.pair(x, y2, p2) || y == y2)
                    })
                })
            })
        })
    }

    fn is_relation(&self, r: &HFSet) -> bool {
        self.inside(r).all(|z| {
            let c = self.components(z);
            c.iter().any(|x| c.iter().any(|y| self.pair(x, y, z)))
        })
    }

    fn is_domain(&self, r: &HFSet, z: &HFSet) -> bool {
        self.all().iter().all(|x| {
            z.contains(x)
                == self.inside(r).any(|w| {
                    let c = self.components(w);
                    c.iter().any(|y| self.pair(x, y, w))
                })
        })
    }

    fn typed_function(&self, a: &HFSet, b: &HFSet, r: &HFSet) -> bool {
        self.is_function(r)
            && self.is_relation(r)
            && self.is_domain(r, a)
            && self.inside(r).all(|u| {
                let c = self.components(u);
                c.iter()
                    .all(|x| c.iter().all(|y| !self.pair(x, y, u) || b.contains(y)))
            })
    }

    fn is_function_space(&self, a: &HFSet, b: &HFSet, fs: &HFSet) -> bool {
        self.has(fs)
            && self
                .all()
                .iter()
                .all(|f| fs.contains(f) == self.typed_function(a, b, f))
    }

    fn surjection(&self, a: &HFSet, b: &HFSet, f: &HFSet) -> bool {
        self.typed_function(a, b, f)
            && self
                .inside(b)
                .all(|y| self.inside(a).any(|x| self.is_apply(f, x, y)))
    }

    fn related(&self, r: &HFSet, x: &HFSet, y: &HFSet) -> bool {
        self.inside(r).any(|w| self.pair(x, y, w))
    }

    fn univalent(&self, a: &HFSet, r: &HFSet) -> bool {
        self.inside(a).all(|x| {
            let ys: Vec<&HFSet> = self
                .all()
                .iter()
                .filter(|y| self.related(r, x, y))
                .collect();
            ys.iter().all(|y| ys.iter().all(|z| y == z))
        })
    }

    fn eval(&self, name: PredName, a: &[HFSet]) -> bool {
        match name {
            PredName::BigUnion => self.big_union(&a[0], &a[1]),
            PredName::Upair => self.upair(&a[0], &a[1], &a[2]),
            PredName::Pair => self.pair(&a[0], &a[1], &a[2]),
            PredName::Successor => self.successor(&a[0], &a[1]),
            PredName::Empty => self.empty(&a[0]),
            PredName::TransitiveSet => self.transitive_set(&a[0]),
            PredName::Ordinal => self.ordinal(&a[0]),
            PredName::Image => self.image(&a[0], &a[1], &a[2]),
            PredName::IsApply => self.is_apply(&a[0], &a[1], &a[2]),
            PredName::IsFunction => self.is_function(&a[0]),
            PredName::IsRelation => self.is_relation(&a[0]),
            PredName::IsDomain => self.is_domain(&a[0], &a[1]),
            PredName::TypedFunction => self.typed_function(&a[0], &a[1], &a[2]),
            PredName::Surjection => self.surjection(&a[0], &a[1], &a[2]),
            PredName::IsFunctionSpace => self.is_function_space(&a[0], &a[1], &a[2]),
            PredName::Univalent => self.univalent(&a[0], &a[1]),
        }
    }
}

/// A transitive stand-in for the universe that holds every witness and
/// counterexample the relational definitions can ask for on `args`.
fn universe_for(args: &[HFSet]) -> HFSet {
    let base = HFSet::from_elements(args.iter().cloned());
    let t = base.union(&base.transitive_closure());
    let singletons = t.iter().map(|x| HFSet::singleton(x.clone()));
    let images = args.iter().flat_map(|f| {
        t.iter()
            .map(move |x| f.image(&HFSet::singleton(x.clone())))
    });
    HFSet::from_elements(t.iter().cloned().chain(singletons).chain(images))
}

/// Evaluates a relational definition verbatim, with quantifiers ranging over `class`.
pub fn rel_pred(name: PredName, class: &ClassPred, args: &[HFSet]) -> Result<bool> {
    if args.len() != name.arity() {
        return Err(Error::Arguments {
            name: name.as_str(),
            expected: name.arity(),
            got: args.len(),
        });
    }
    let dom = match class {
        ClassPred::SetCast(a) => Dom { set: a.clone() },
        ClassPred::Universe => {
            if name == PredName::IsFunctionSpace {
                return Err(Error::Unsupported(
                    "is_function_space over the universe needs an unbounded search".into(),
                ));
            }
            Dom {
                set: universe_for(args),
            }
        }
    };
    Ok(dom.eval(name, args))
}

/// `{y ∈ M : y ⊆ x}`.
pub fn pow_rel(m: &HFSet, x: &HFSet) -> HFSet {
    m.filter(|y| y.is_subset(x))
}

/// `∀. 0 ∈ succ(z) ⟷ (∃. 0 ∈ succ(succ(A)) ∧ 1 ∈ 0)`.
pub fn big_union_fm(a: usize, z: usize) -> Formula {
    forall_fm(iff_fm(
        member_fm(0, z + 1),
        exists_fm(and_fm(member_fm(0, a + 2), member_fm(1, 0))),
    ))
}

/// Internalized relational predicates, written against a [`Builder`].
pub mod codes {
    use super::*;

    pub fn upair(b: &mut Builder, a: Var, c: Var, z: Var) -> Formula {
        let bound = b.forall(|b, x| imp_fm(b.mem(x, z), or_fm(b.eq(x, a), b.eq(x, c))));
        and_all(vec![b.mem(a, z), b.mem(c, z), bound])
    }

    pub fn pair(b: &mut Builder, a: Var, c: Var, z: Var) -> Formula {
        b.exists(|b, x| {
            let first = upair(b, a, a, x);
            and_fm(
                first,
                b.exists(|b, y| {
                    let second = upair(b, a, c, y);
                    and_fm(second, upair(b, x, y, z))
                }),
            )
        })
    }

    pub fn big_union(b: &mut Builder, a: Var, z: Var) -> Formula {
        b.forall(|b, x| {
            let lhs = b.mem(x, z);
            iff_fm(lhs, b.exists(|b, y| and_fm(b.mem(y, a), b.mem(x, y))))
        })
    }

    pub fn successor(b: &mut Builder, a: Var, z: Var) -> Formula {
        b.exists(|b, x| {
            let single = upair(b, a, a, x);
            and_fm(
                single,
                b.forall(|b, xa| iff_fm(b.mem(xa, z), or_fm(b.mem(xa, x), b.mem(xa, a)))),
            )
        })
    }

    pub fn empty(b: &mut Builder, z: Var) -> Formula {
        b.forall(|b, x| neg_fm(b.mem(x, z)))
    }

    pub fn transitive_set(b: &mut Builder, a: Var) -> Formula {
        b.forall(|b, x| {
            let guard = b.mem(x, a);
            imp_fm(guard, b.forall(|b, xa| imp_fm(b.mem(xa, x), b.mem(xa, a))))
        })
    }

    pub fn ordinal(b: &mut Builder, a: Var) -> Formula {
        let t = transitive_set(b, a);
        and_fm(
            t,
            b.forall(|b, x| {
                let guard = b.mem(x, a);
                imp_fm(guard, transitive_set(b, x))
            }),
        )
    }

    pub fn image(b: &mut Builder, r: Var, a: Var, z: Var) -> Formula {
        b.forall(|b, y| {
            let lhs = b.mem(y, z);
            iff_fm(
                lhs,
                b.exists(|b, w| {
                    let g = b.mem(w, r);
                    and_fm(
                        g,
                        b.exists(|b, x| {
                            let g2 = b.mem(x, a);
                            and_fm(g2, pair(b, x, y, w))
                        }),
                    )
                }),
            )
        })
    }

    pub fn is_apply(b: &mut Builder, f: Var, x: Var, y: Var) -> Formula {
        b.exists(|b, xs| {
            b.exists(|b, fxs| {
                and_all(vec![
                    upair(b, x, x, xs),
                    image(b, f, xs, fxs),
                    big_union(b, fxs, y),
                ])
            })
        })
    }

    /// Quantifiers are reordered so the `p ∈ r` guards come first.
    pub fn is_function(b: &mut Builder, r: Var) -> Formula {
        b.forall(|b, p| {
            let g = b.mem(p, r);
            imp_fm(
                g,
                b.forall(|b, p2| {
                    let g2 = b.mem(p2, r);
                    imp_fm(
                        g2,
                        b.forall(|b, x| {
                            b.forall(|b, y| {
                                let first = pair(b, x, y, p);
                                imp_fm(
                                    first,
                                    b.forall(|b, y2| {
                                        let second = pair(b, x, y2, p2);
                                        imp_fm(second, b.eq(y, y2))
                                    }),
                                )
                            })
                        }),
                    )
                }),
            )
        })
    }

    pub fn is_relation(b: &mut Builder, r: Var) -> Formula {
        b.forall(|b, z| {
            let g = b.mem(z, r);
            imp_fm(g, b.exists(|b, x| b.exists(|b, y| pair(b, x, y, z))))
        })
    }

    pub fn is_domain(b: &mut Builder, r: Var, z: Var) -> Formula {
        b.forall(|b, x| {
            let lhs = b.mem(x, z);
            iff_fm(
                lhs,
                b.exists(|b, w| {
                    let g = b.mem(w, r);
                    and_fm(g, b.exists(|b, y| pair(b, x, y, w)))
                }),
            )
        })
    }

    pub fn typed_function(b: &mut Builder, a: Var, bb: Var, r: Var) -> Formula {
        let f = is_function(b, r);
        let rel = is_relation(b, r);
        let dom = is_domain(b, r, a);
        let rng = b.forall(|b, u| {
            let g = b.mem(u, r);
            imp_fm(
                g,
                b.forall(|b, x| {
                    b.forall(|b, y| {
                        let pr = pair(b, x, y, u);
                        imp_fm(pr, b.mem(y, bb))
                    })
                }),
            )
        });
        and_all(vec![f, rel, dom, rng])
    }

    pub fn is_function_space(b: &mut Builder, a: Var, bb: Var, fs: Var) -> Formula {
        b.forall(|b, f| {
            let lhs = b.mem(f, fs);
            iff_fm(lhs, typed_function(b, a, bb, f))
        })
    }

    pub fn surjection(b: &mut Builder, a: Var, bb: Var, f: Var) -> Formula {
        let tf = typed_function(b, a, bb, f);
        and_fm(
            tf,
            b.forall(|b, y| {
                let g = b.mem(y, bb);
                imp_fm(
                    g,
                    b.exists(|b, x| {
                        let g2 = b.mem(x, a);
                        and_fm(g2, is_apply(b, f, x, y))
                    }),
                )
            }),
        )
    }

    fn related(b: &mut Builder, r: Var, x: Var, y: Var) -> Formula {
        b.exists(|b, w| {
            let g = b.mem(w, r);
            and_fm(g, pair(b, x, y, w))
        })
    }

    /// `univalent(A, P)` for the relation `P(x,y) ≡ ⟨x,y⟩ ∈ r`.
    pub fn univalent(b: &mut Builder, a: Var, r: Var) -> Formula {
        b.forall(|b, x| {
            let g = b.mem(x, a);
            imp_fm(
                g,
                b.forall(|b, y| {
                    b.forall(|b, z| {
                        let l = related(b, r, x, y);
                        let rr = related(b, r, x, z);
                        imp_fm(and_fm(l, rr), b.eq(y, z))
                    })
                }),
            )
        })
    }
}

/// The internalized code of a predicate, applied to the given env indices.
pub fn pred_code(name: PredName, idx: &[usize]) -> Result<Formula> {
    if idx.len() != name.arity() {
        return Err(Error::Arguments {
            name: name.as_str(),
            expected: name.arity(),
            got: idx.len(),
        });
    }
    let n = idx.iter().max().map_or(0, |m| m + 1);
    let (mut b, free) = Builder::new(n);
    let v: Vec<Var> = idx.iter().map(|&i| free[i]).collect();
    let b = &mut b;
    Ok(match name {
        PredName::BigUnion => codes::big_union(b, v[0], v[1]),
        PredName::Upair => codes::upair(b, v[0], v[1], v[2]),
        PredName::Pair => codes::pair(b, v[0], v[1], v[2]),
        PredName::Successor => codes::successor(b, v[0], v[1]),
        PredName::Empty => codes::empty(b, v[0]),
        PredName::TransitiveSet => codes::transitive_set(b, v[0]),
        PredName::Ordinal => codes::ordinal(b, v[0]),
        PredName::Image => codes::image(b, v[0], v[1], v[2]),
        PredName::IsApply => codes::is_apply(b, v[0], v[1], v[2]),
        PredName::IsFunction => codes::is_function(b, v[0]),
        PredName::IsRelation => codes::is_relation(b, v[0]),
        PredName::IsDomain => codes::is_domain(b, v[0], v[1]),
        PredName::TypedFunction => codes::typed_function(b, v[0], v[1], v[2]),
        PredName::Surjection => codes::surjection(b, v[0], v[1], v[2]),
        PredName::IsFunctionSpace => codes::is_function_space(b, v[0], v[1], v[2]),
        PredName::Univalent => codes::univalent(b, v[0], v[1]),
    })
}

fn is_real_function(r: &HFSet) -> bool {
    let pairs: Vec<(&HFSet, &HFSet)> = r.iter().filter_map(HFSet::as_pair).collect();
    pairs
        .iter()
        .all(|(x, y)| pairs.iter().all(|(x2, y2)| x != x2 || y == y2))
}

fn is_real_relation(r: &HFSet) -> bool {
    r.iter().all(HFSet::is_pair)
}

/// `f : A → B` in the real universe.
fn is_real_typed_function(a: &HFSet, b: &HFSet, f: &HFSet) -> bool {
    is_real_function(f) && is_real_relation(f) && f.domain() == *a && f.range().is_subset(b)
}

/// `f`x`, i.e. `⋃(f``{x})`.
pub fn apply(f: &HFSet, x: &HFSet) -> HFSet {
    f.image(&HFSet::singleton(x.clone())).union_all()
}

/// The unrelativized meaning of each predicate.
pub fn absolute_op(name: PredName, a: &[HFSet], m: &HFSet) -> bool {
    match name {
        PredName::BigUnion => a[1] == a[0].union_all(),
        PredName::Upair => a[2] == HFSet::upair(a[0].clone(), a[1].clone()),
        PredName::Pair => a[2] == HFSet::kpair(a[0].clone(), a[1].clone()),
        PredName::Successor => a[1] == a[0].succ(),
        PredName::Empty => a[0].is_empty(),
        PredName::TransitiveSet => a[0].is_transset(),
        PredName::Ordinal => a[0].is_ord(),
        PredName::Image => a[2] == a[0].image(&a[1]),
        PredName::IsApply => a[2] == apply(&a[0], &a[1]),
        PredName::IsFunction => is_real_function(&a[0]),
        PredName::IsRelation => is_real_relation(&a[0]),
        PredName::IsDomain => a[1] == a[0].domain(),
        PredName::TypedFunction => is_real_typed_function(&a[0], &a[1], &a[2]),
        PredName::Surjection => {
            is_real_typed_function(&a[0], &a[1], &a[2])
                && a[1]
                    .iter()
                    .all(|y| a[0].iter().any(|x| apply(&a[2], x) == *y))
        }
        PredName::IsFunctionSpace => {
            a[2] == m.filter(|f| is_real_typed_function(&a[0], &a[1], f))
        }
        PredName::Univalent => a[0].iter().all(|x| {
            let ys: Vec<HFSet> = a[1]
                .iter()
                .filter_map(|p| p.as_pair().filter(|(px, _)| *px == x).map(|(_, y)| y.clone()))
                .collect();
            ys.windows(2).all(|w| w[0] == w[1])
        }),
    }
}

/// Whether the definitional witnesses the relational form quantifies over
/// (singletons and fibres `f``{x}`) exist in `m` for this tuple.
pub fn witnesses_in(name: PredName, a: &[HFSet], m: &HFSet) -> bool {
    let fibre_ok = |f: &HFSet, x: &HFSet| {
        let s = HFSet::singleton(x.clone());
        m.contains(&f.image(&s)) && m.contains(&s)
    };
    match name {
        PredName::Successor => m.contains(&HFSet::singleton(a[0].clone())),
        PredName::IsApply => fibre_ok(&a[0], &a[1]),
        PredName::Surjection => a[0].iter().all(|x| fibre_ok(&a[2], x)),
        _ => true,
    }
}

/// Result of comparing a relational predicate with its absolute meaning.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbsReport {
    pub predicate: PredName,
    pub model: HFSet,
    pub checked: u64,
    pub skipped: u64,
    pub disagreements: Vec<Vec<HFSet>>,
}

/// Exhaustively compares `rel_pred(name, ##M, …)` with the absolute operation
/// over all argument tuples from `m`. Tuples whose definitional witnesses are
/// missing from `m` are counted as skipped.
pub fn absoluteness_check(name: PredName, m: &HFSet) -> Result<AbsReport> {
    if m.is_empty() {
        return Err(Error::Model("model is empty".into()));
    }
    if !m.is_transset() {
        return Err(Error::Model(format!("{m} is not transitive")));
    }
    let dom = Dom { set: m.clone() };
    let tuples = crate::semantics::envs(m, name.arity());
    let outcomes: Vec<Option<bool>> = tuples
        .par_iter()
        .map(|t| {
            witnesses_in(name, t, m).then(|| dom.eval(name, t) == absolute_op(name, t, m))
        })
        .collect();
    let mut report = AbsReport {
        predicate: name,
        model: m.clone(),
        checked: 0,
        skipped: 0,
        disagreements: Vec::new(),
    };
    for (t, o) in tuples.into_iter().zip(outcomes) {
        match o {
            None => report.skipped += 1,
            Some(agree) => {
                report.checked += 1;
                if !agree {
                    report.disagreements.push(t);
                }
            }
        }
    }
    Ok(report)
}
