//! Hereditarily finite sets.
//!
//! Every [`HFSet`] is stored canonically: its elements are deduplicated and
//! sorted by the Ackermann order (the order induced by the bijection
//! `x ↦ Σ_{y∈x} 2^{ack(y)}` between HF sets and natural numbers). Structural
//! equality therefore coincides with extensional equality, and each node
//! caches its rank and a structural hash so most comparisons finish in O(1).

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use std::sync::LazyLock;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HfError, ParseError};

/// Default ceiling on the cardinality of any set materialized by `pow`/`v_stage`.
pub const DEFAULT_MAX_SET_SIZE: usize = 1 << 16;

/// Environment variable overriding [`DEFAULT_MAX_SET_SIZE`].
pub const MAX_SET_SIZE_VAR: &str = "FORCING_LAB_MAX_SET_SIZE";

static MAX_SET_SIZE: LazyLock<usize> = LazyLock::new(|| {
    std::env::var(MAX_SET_SIZE_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_SET_SIZE)
});

/// The active resource guard for set materialization.
pub fn max_set_size() -> usize {
    *MAX_SET_SIZE
}

static EMPTY: LazyLock<HFSet> = LazyLock::new(|| HFSet::from_sorted(Vec::new()));

struct Node {
    elems: Box<[HFSet]>,
    hash: u64,
    rank: u32,
}

/// A hereditarily finite set. Cloning is a reference-count bump.
#[derive(Clone)]
pub struct HFSet(Arc<Node>);

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl HFSet {
    /// Builds a node from elements already sorted and deduplicated.
    fn from_sorted(elems: Vec<HFSet>) -> HFSet {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        let rank = elems.iter().map(|e| e.rank() + 1).max().unwrap_or(0);
        let mut hash = mix(0x9e37_79b9_7f4a_7c15 ^ elems.len() as u64);
        for e in &elems {
            hash = mix(hash ^ e.0.hash).rotate_left(5);
        }
        HFSet(Arc::new(Node {
            elems: elems.into_boxed_slice(),
            hash,
            rank,
        }))
    }

    /// The empty set, 0.
    pub fn empty() -> HFSet {
        EMPTY.clone()
    }

    /// Canonicalizes an arbitrary collection of elements.
    pub fn from_elements<I: IntoIterator<Item = HFSet>>(xs: I) -> HFSet {
        let mut v: Vec<HFSet> = xs.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        HFSet::from_sorted(v)
    }

    pub fn singleton(x: HFSet) -> HFSet {
        HFSet::from_sorted(vec![x])
    }

    /// `{a, b}`.
    pub fn upair(a: HFSet, b: HFSet) -> HFSet {
        match a.cmp(&b) {
            Ordering::Less => HFSet::from_sorted(vec![a, b]),
            Ordering::Greater => HFSet::from_sorted(vec![b, a]),
            Ordering::Equal => HFSet::singleton(a),
        }
    }

    /// Elements in canonical (ascending Ackermann) order.
    pub fn elements(&self) -> &[HFSet] {
        &self.0.elems
    }

    pub fn iter(&self) -> std::slice::Iter<'_, HFSet> {
        self.0.elems.iter()
    }

    pub fn len(&self) -> usize {
        self.0.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    pub fn rank(&self) -> u32 {
        self.0.rank
    }

    /// Membership test: `x ∈ self`.
    pub fn contains(&self, x: &HFSet) -> bool {
        if x.rank() >= self.rank() {
            return false;
        }
        self.0.elems.binary_search(x).is_ok()
    }

    pub fn is_subset(&self, other: &HFSet) -> bool {
        self.len() <= other.len() && self.iter().all(|x| other.contains(x))
    }

    pub fn union(&self, other: &HFSet) -> HFSet {
        HFSet::from_elements(self.iter().chain(other.iter()).cloned())
    }

    pub fn intersection(&self, other: &HFSet) -> HFSet {
        HFSet::from_sorted(self.iter().filter(|x| other.contains(x)).cloned().collect())
    }

    pub fn difference(&self, other: &HFSet) -> HFSet {
        HFSet::from_sorted(self.iter().filter(|x| !other.contains(x)).cloned().collect())
    }

    /// Sub-collection of the elements satisfying `keep`, preserving canonical order.
    pub fn filter<F: FnMut(&HFSet) -> bool>(&self, mut keep: F) -> HFSet {
        HFSet::from_sorted(self.iter().filter(|x| keep(x)).cloned().collect())
    }

    /// Adds one element.
    pub fn insert(&self, x: HFSet) -> HFSet {
        if self.contains(&x) {
            return self.clone();
        }
        let mut v = self.0.elems.to_vec();
        let pos = v.binary_search(&x).unwrap_err();
        v.insert(pos, x);
        HFSet::from_sorted(v)
    }

    /// `⋃A`.
    pub fn union_all(&self) -> HFSet {
        HFSet::from_elements(self.iter().flat_map(|b| b.iter().cloned()))
    }

    /// The power set, subject to the resource guard.
    pub fn pow(&self) -> Result<HFSet, HfError> {
        let n = self.len();
        let limit = max_set_size();
        if n >= usize::BITS as usize - 1 || (1usize << n) > limit {
            return Err(HfError::ResourceLimit {
                op: "pow",
                requested: if n >= 64 { u128::MAX } else { 1u128 << n },
                limit,
            });
        }
        let elems = self.elements();
        let subsets = (0..(1usize << n)).map(|mask| {
            HFSet::from_sorted(
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| elems[i].clone())
                    .collect(),
            )
        });
        Ok(HFSet::from_elements(subsets))
    }

    /// Von Neumann successor `A ∪ {A}`.
    pub fn succ(&self) -> HFSet {
        self.insert(self.clone())
    }

    /// Kuratowski pair `{{a},{a,b}}`.
    pub fn kpair(a: HFSet, b: HFSet) -> HFSet {
        HFSet::upair(HFSet::singleton(a.clone()), HFSet::upair(a, b))
    }

    /// Decomposes a Kuratowski pair.
    pub fn as_pair(&self) -> Option<(&HFSet, &HFSet)> {
        match self.elements() {
            [s] => match s.elements() {
                [a] => Some((a, a)),
                _ => None,
            },
            [s, t] => {
                let split = |single: &'_ HFSet, double: &'_ HFSet| -> Option<(usize, usize)> {
                    let [a] = single.elements() else { return None };
                    let [x, y] = double.elements() else { return None };
                    if a == x {
                        Some((0, 1))
                    } else if a == y {
                        Some((1, 0))
                    } else {
                        None
                    }
                };
                if let Some((i, j)) = split(s, t) {
                    Some((&t.elements()[i], &t.elements()[j]))
                } else if let Some((i, j)) = split(t, s) {
                    Some((&s.elements()[i], &s.elements()[j]))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn is_pair(&self) -> bool {
        self.as_pair().is_some()
    }

    /// First component; 0 on non-pairs.
    pub fn fst(&self) -> HFSet {
        self.as_pair().map(|(a, _)| a.clone()).unwrap_or_else(HFSet::empty)
    }

    /// Second component; 0 on non-pairs.
    pub fn snd(&self) -> HFSet {
        self.as_pair().map(|(_, b)| b.clone()).unwrap_or_else(HFSet::empty)
    }

    /// `A × B` as a set of Kuratowski pairs.
    pub fn cart_prod(a: &HFSet, b: &HFSet) -> HFSet {
        HFSet::from_elements(
            a.iter()
                .flat_map(|x| b.iter().map(move |y| HFSet::kpair(x.clone(), y.clone()))),
        )
    }

    /// `{x : ∃y. ⟨x,y⟩ ∈ r}`.
    pub fn domain(&self) -> HFSet {
        HFSet::from_elements(self.iter().filter_map(|p| p.as_pair().map(|(a, _)| a.clone())))
    }

    /// `{y : ∃x. ⟨x,y⟩ ∈ r}`.
    pub fn range(&self) -> HFSet {
        HFSet::from_elements(self.iter().filter_map(|p| p.as_pair().map(|(_, b)| b.clone())))
    }

    /// `r``A = {y : ∃x∈A. ⟨x,y⟩ ∈ r}`.
    pub fn image(&self, a: &HFSet) -> HFSet {
        HFSet::from_elements(self.iter().filter_map(|p| match p.as_pair() {
            Some((x, y)) if a.contains(x) => Some(y.clone()),
            _ => None,
        }))
    }

    /// Von Neumann numeral.
    pub fn from_nat(n: usize) -> HFSet {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            let next = HFSet::from_sorted(v.clone());
            v.push(next);
        }
        HFSet::from_sorted(v)
    }

    /// Inverse of [`HFSet::from_nat`].
    pub fn as_nat(&self) -> Option<usize> {
        // A finite ordinal has exactly the numerals 0..n as its elements.
        let ok = self
            .iter()
            .enumerate()
            .all(|(i, e)| e.len() == i && e.rank() as usize == i && e.is_ord());
        ok.then_some(self.len())
    }

    pub fn is_transset(&self) -> bool {
        self.iter().all(|x| x.is_subset(self))
    }

    pub fn is_ord(&self) -> bool {
        self.is_transset() && self.iter().all(HFSet::is_transset)
    }

    /// The ⊆-least transitive set containing every element of `self`.
    pub fn transitive_closure(&self) -> HFSet {
        let mut seen: HashSet<HFSet> = HashSet::new();
        let mut stack: Vec<HFSet> = self.iter().cloned().collect();
        while let Some(x) = stack.pop() {
            if seen.insert(x.clone()) {
                stack.extend(x.iter().cloned());
            }
        }
        HFSet::from_elements(seen)
    }

    /// The rank stage `V_n`.
    pub fn v_stage(n: usize) -> Result<HFSet, HfError> {
        if n >= 6 {
            return Err(HfError::ResourceLimit {
                op: "v_stage",
                requested: u128::MAX,
                limit: max_set_size(),
            });
        }
        let mut v = HFSet::empty();
        for _ in 0..n {
            v = v.pow()?;
        }
        Ok(v)
    }

    /// Renders without numeral or pair sugar.
    pub fn to_plain_string(&self) -> String {
        let mut s = String::new();
        self.write_plain(&mut s);
        s
    }

    fn write_plain(&self, out: &mut String) {
        out.push('{');
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            e.write_plain(out);
        }
        out.push('}');
    }

    pub fn ptr_eq(&self, other: &HFSet) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

/// `x ∈ y`.
pub fn mem(x: &HFSet, y: &HFSet) -> bool {
    y.contains(x)
}

/// `x ⊆ y`.
pub fn subset(x: &HFSet, y: &HFSet) -> bool {
    x.is_subset(y)
}

impl PartialEq for HFSet {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other)
            || (self.0.hash == other.0.hash
                && self.0.rank == other.0.rank
                && self.0.elems == other.0.elems)
    }
}

impl Eq for HFSet {}

impl Hash for HFSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl Ord for HFSet {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        match self.rank().cmp(&other.rank()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (a, b) = (self.elements(), other.elements());
        let (mut i, mut j) = (a.len(), b.len());
        while i > 0 && j > 0 {
            i -= 1;
            j -= 1;
            match a[i].cmp(&b[j]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        i.cmp(&j)
    }
}

impl PartialOrd for HFSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for HFSet {
    fn default() -> Self {
        HFSet::empty()
    }
}

impl fmt::Display for HFSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        if let Some(n) = self.as_nat() {
            return write!(f, "nat:{n}");
        }
        if let Some((a, b)) = self.as_pair() {
            return write!(f, "<{a},{b}>");
        }
        f.write_str("{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for HFSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for HFSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HFSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

struct LiteralParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> LiteralParser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.pos, msg)
    }

    fn eat(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn set(&mut self) -> Result<HFSet, ParseError> {
        match self.peek() {
            Some('{') => {
                self.pos += 1;
                let mut elems = Vec::new();
                if self.peek() == Some('}') {
                    self.pos += 1;
                    return Ok(HFSet::empty());
                }
                loop {
                    elems.push(self.set()?);
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some('}') => {
                            self.pos += 1;
                            return Ok(HFSet::from_elements(elems));
                        }
                        _ => return Err(self.err("expected ',' or '}'")),
                    }
                }
            }
            Some('<') => {
                self.pos += 1;
                let a = self.set()?;
                self.eat(',')?;
                let b = self.set()?;
                self.eat('>')?;
                Ok(HFSet::kpair(a, b))
            }
            Some('n') if self.src[self.pos..].starts_with("nat:") => {
                self.pos += 4;
                let start = self.pos;
                let digits = self.src[start..]
                    .bytes()
                    .take_while(u8::is_ascii_digit)
                    .count();
                if digits == 0 {
                    return Err(self.err("expected a decimal numeral after 'nat:'"));
                }
                self.pos += digits;
                let n: usize = self.src[start..self.pos]
                    .parse()
                    .map_err(|_| ParseError::new(start, "numeral out of range"))?;
                if n > 64 {
                    return Err(ParseError::new(start, "numeral too large (max 64)"));
                }
                Ok(HFSet::from_nat(n))
            }
            Some(c) => Err(self.err(format!("unexpected character '{c}'"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses a comma separated sequence of HF literals (possibly empty).
pub fn parse_list(src: &str) -> Result<Vec<HFSet>, ParseError> {
    let mut p = LiteralParser { src, pos: 0 };
    let mut out = Vec::new();
    if p.peek().is_none() {
        return Ok(out);
    }
    loop {
        out.push(p.set()?);
        match p.peek() {
            Some(',') => p.pos += 1,
            None => return Ok(out),
            Some(c) => return Err(p.err(format!("unexpected character '{c}'"))),
        }
    }
}

impl FromStr for HFSet {
    type Err = ParseError;

    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let mut p = LiteralParser { src, pos: 0 };
        let s = p.set()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(s)
    }
}
