//! Internalized first-order formulas over `∈` and `=`, with de Bruijn indices.
//!
//! Besides the four core constructors there are two atomic forcing relations,
//! [`Formula::ForcesMem`] and [`Formula::ForcesEq`], produced by
//! [`crate::forcing::forces`]. They read the condition, the poset, its order and
//! its top element from indices 0..3 of the current environment; only their
//! explicit operands take part in index shifting.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

mod builder;
mod parse;

pub use builder::{Builder, Var};
pub use parse::parse;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Member(usize, usize),
    Equal(usize, usize),
    Nand(Arc<Formula>, Arc<Formula>),
    Forall(Arc<Formula>),
    ForcesMem(usize, usize),
    ForcesEq(usize, usize),
}

pub fn member_fm(i: usize, j: usize) -> Formula {
    Formula::Member(i, j)
}

pub fn equal_fm(i: usize, j: usize) -> Formula {
    Formula::Equal(i, j)
}

pub fn nand_fm(p: Formula, q: Formula) -> Formula {
    Formula::Nand(Arc::new(p), Arc::new(q))
}

pub fn forall_fm(p: Formula) -> Formula {
    Formula::Forall(Arc::new(p))
}

/// `Nand(p,p)`; both children share one allocation so evaluators can visit it once.
pub fn neg_fm(p: Formula) -> Formula {
    let a = Arc::new(p);
    Formula::Nand(a.clone(), a)
}

pub fn and_fm(p: Formula, q: Formula) -> Formula {
    neg_fm(nand_fm(p, q))
}

pub fn or_fm(p: Formula, q: Formula) -> Formula {
    nand_fm(neg_fm(p), neg_fm(q))
}

pub fn imp_fm(p: Formula, q: Formula) -> Formula {
    nand_fm(p, neg_fm(q))
}

pub fn iff_fm(p: Formula, q: Formula) -> Formula {
    and_fm(imp_fm(p.clone(), q.clone()), imp_fm(q, p))
}

pub fn exists_fm(p: Formula) -> Formula {
    neg_fm(forall_fm(neg_fm(p)))
}

/// Conjunction of a nonempty list, nested to the right.
pub fn and_all(mut ps: Vec<Formula>) -> Formula {
    let mut acc = ps.pop().expect("and_all of an empty list");
    while let Some(p) = ps.pop() {
        acc = and_fm(p, acc);
    }
    acc
}

impl Formula {
    /// One plus the largest free index; forcing atoms always count indices 0..3.
    pub fn arity(&self) -> usize {
        match self {
            Formula::Member(i, j) | Formula::Equal(i, j) => (i + 1).max(j + 1),
            Formula::ForcesMem(i, j) | Formula::ForcesEq(i, j) => 4.max(i + 1).max(j + 1),
            Formula::Nand(p, q) if Arc::ptr_eq(p, q) => p.arity(),
            Formula::Nand(p, q) => p.arity().max(q.arity()),
            Formula::Forall(p) => p.arity().saturating_sub(1),
        }
    }

    /// True iff no forcing atom occurs.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::Member(..) | Formula::Equal(..) => true,
            Formula::ForcesMem(..) | Formula::ForcesEq(..) => false,
            Formula::Nand(p, q) if Arc::ptr_eq(p, q) => p.is_core(),
            Formula::Nand(p, q) => p.is_core() && q.is_core(),
            Formula::Forall(p) => p.is_core(),
        }
    }

    /// Connective nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Nand(p, q) => 1 + p.depth().max(q.depth()),
            Formula::Forall(p) => 1 + p.depth(),
            _ => 0,
        }
    }

    /// Nesting depth of `Forall` only.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Nand(p, q) => p.quantifier_depth().max(q.quantifier_depth()),
            Formula::Forall(p) => 1 + p.quantifier_depth(),
            _ => 0,
        }
    }

    /// Number of nodes in the fully expanded tree (saturating).
    pub fn size(&self) -> u64 {
        match self {
            Formula::Nand(p, q) if Arc::ptr_eq(p, q) => 1u64.saturating_add(p.size().saturating_mul(2)),
            Formula::Nand(p, q) => 1u64.saturating_add(p.size()).saturating_add(q.size()),
            Formula::Forall(p) => 1u64.saturating_add(p.size()),
            _ => 1,
        }
    }

    /// Applies `f` to every free index; `f` sees indices relative to the top level.
    pub fn rename_free(&self, f: &dyn Fn(usize) -> usize) -> Formula {
        self.rename_at(0, f)
    }

    fn rename_at(&self, bound: usize, f: &dyn Fn(usize) -> usize) -> Formula {
        let r = |i: usize| if i < bound { i } else { f(i - bound) + bound };
        match self {
            Formula::Member(i, j) => Formula::Member(r(*i), r(*j)),
            Formula::Equal(i, j) => Formula::Equal(r(*i), r(*j)),
            Formula::ForcesMem(i, j) => Formula::ForcesMem(r(*i), r(*j)),
            Formula::ForcesEq(i, j) => Formula::ForcesEq(r(*i), r(*j)),
            Formula::Nand(p, q) if Arc::ptr_eq(p, q) => {
                let a = Arc::new(p.rename_at(bound, f));
                Formula::Nand(a.clone(), a)
            }
            Formula::Nand(p, q) => Formula::Nand(
                Arc::new(p.rename_at(bound, f)),
                Arc::new(q.rename_at(bound, f)),
            ),
            Formula::Forall(p) => Formula::Forall(Arc::new(p.rename_at(bound + 1, f))),
        }
    }

    /// Standard de Bruijn shift: free indices `≥ cutoff` grow by `amount`.
    pub fn lift(&self, cutoff: usize, amount: usize) -> Formula {
        if amount == 0 {
            return self.clone();
        }
        self.rename_free(&|i| if i >= cutoff { i + amount } else { i })
    }

    /// Canonical core-syntax rendering; inverse of [`parse`].
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write_to(&mut s);
        s
    }

    fn write_to(&self, out: &mut String) {
        use std::fmt::Write;
        match self {
            Formula::Member(i, j) => write!(out, "Mem({i},{j})").unwrap(),
            Formula::Equal(i, j) => write!(out, "Eq({i},{j})").unwrap(),
            Formula::ForcesMem(i, j) => write!(out, "FMem({i},{j})").unwrap(),
            Formula::ForcesEq(i, j) => write!(out, "FEq({i},{j})").unwrap(),
            Formula::Nand(p, q) => {
                out.push_str("Nand(");
                p.write_to(out);
                out.push(',');
                q.write_to(out);
                out.push(')');
            }
            Formula::Forall(p) => {
                out.push_str("Forall(");
                p.write_to(out);
                out.push(')');
            }
        }
    }
}

pub fn arity(p: &Formula) -> usize {
    p.arity()
}

pub fn lift(p: &Formula, cutoff: usize, amount: usize) -> Formula {
    p.lift(cutoff, amount)
}

pub fn is_core(p: &Formula) -> bool {
    p.is_core()
}

pub fn render(p: &Formula) -> String {
    p.render()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for Formula {
    type Err = crate::error::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors() {
        assert_eq!(member_fm(0, 1), Formula::Member(0, 1));
        assert_eq!(
            forall_fm(member_fm(0, 1)),
            Formula::Forall(Arc::new(Formula::Member(0, 1)))
        );
        assert_eq!(
            nand_fm(equal_fm(0, 0), equal_fm(0, 0)).render(),
            "Nand(Eq(0,0),Eq(0,0))"
        );
    }

    #[test]
    fn derived_expansions() {
        assert_eq!(neg_fm(member_fm(0, 1)).render(), "Nand(Mem(0,1),Mem(0,1))");
        assert_eq!(
            exists_fm(equal_fm(0, 1)).render(),
            "Nand(Forall(Nand(Eq(0,1),Eq(0,1))),Forall(Nand(Eq(0,1),Eq(0,1))))"
        );
        assert_eq!(
            imp_fm(member_fm(0, 1), equal_fm(0, 2)),
            nand_fm(member_fm(0, 1), nand_fm(equal_fm(0, 2), equal_fm(0, 2)))
        );
    }

    #[test]
    fn arity_cases() {
        assert_eq!(member_fm(0, 1).arity(), 2);
        assert_eq!(forall_fm(member_fm(0, 1)).arity(), 1);
        assert_eq!(nand_fm(member_fm(0, 0), equal_fm(2, 2)).arity(), 3);
        assert_eq!(forall_fm(forall_fm(member_fm(0, 0))).arity(), 0);
        assert_eq!(Formula::ForcesMem(4, 5).arity(), 6);
        assert_eq!(Formula::ForcesEq(0, 1).arity(), 4);
    }

    #[test]
    fn lifting() {
        assert_eq!(member_fm(0, 1).lift(0, 4), member_fm(4, 5));
        assert_eq!(
            forall_fm(member_fm(0, 1)).lift(0, 1),
            forall_fm(member_fm(0, 2))
        );
        assert_eq!(equal_fm(2, 0).lift(1, 2), equal_fm(4, 0));
    }

    #[test]
    fn core_detection() {
        assert!(member_fm(0, 1).is_core());
        assert!(!Formula::ForcesMem(4, 5).is_core());
        assert!(!nand_fm(member_fm(0, 1), Formula::ForcesEq(4, 4)).is_core());
    }

    #[test]
    fn sharing_survives_lift() {
        let f = neg_fm(member_fm(0, 1)).lift(0, 2);
        match f {
            Formula::Nand(a, b) => assert!(Arc::ptr_eq(&a, &b)),
            _ => unreachable!(),
        }
    }
}
