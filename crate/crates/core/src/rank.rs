//! Tree ranks, order-preserving maps between trees, and the comparisons
//! built on them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closedset::leftmost_branch;
use crate::ordinal::{Ordinal, OrdinalError};
use crate::tree::{Children, FiniteTree, Label, RegularTree, Seq, SymbolicTree, Tree};

/// `−1 < α < ∞`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RankValue {
    MinusOne,
    Ord(Ordinal),
    Infinity,
}

impl RankValue {
    pub fn finite(n: u64) -> Self {
        RankValue::Ord(Ordinal::finite(n))
    }

    pub fn ordinal(&self) -> Option<&Ordinal> {
        match self {
            RankValue::Ord(a) => Some(a),
            _ => None,
        }
    }

    /// `r + 1`, with `−1 + 1 = 0` and `∞ + 1 = ∞`.
    pub fn succ(&self) -> RankValue {
        match self {
            RankValue::MinusOne => RankValue::finite(0),
            RankValue::Ord(a) => RankValue::Ord(a.succ()),
            RankValue::Infinity => RankValue::Infinity,
        }
    }
}

impl fmt::Display for RankValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankValue::MinusOne => f.write_str("-1"),
            RankValue::Ord(a) => write!(f, "{a}"),
            RankValue::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for RankValue {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "-1" => Ok(RankValue::MinusOne),
            "inf" => Ok(RankValue::Infinity),
            other => Ordinal::parse(other).map(RankValue::Ord),
        }
    }
}

impl Serialize for RankValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RankValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error("the source tree is infinite; a depth and width bound is required")]
    UnboundedDomain,
    #[error("no admissible child below {node:?}")]
    ConstructionFailed { node: Seq },
}

/// Ranks of all nodes of a finite tree, by the sup recursion.
pub fn finite_ranks(t: &FiniteTree) -> HashMap<Seq, u64> {
    let mut ranks: HashMap<Seq, u64> = HashMap::with_capacity(t.len());
    // reverse lexicographic order visits every child before its parent
    for s in t.nodes().rev() {
        let r = t
            .children(s)
            .into_iter()
            .map(|i| {
                let mut c = s.clone();
                c.push(i);
                ranks[&c] + 1
            })
            .max()
            .unwrap_or(0);
        ranks.insert(s.clone(), r);
    }
    ranks
}

/// The rank of `σ` by iterating the derivative: the least `k` with
/// `σ ∉ T_{k+1}`.
pub fn rank_by_derivatives(t: &FiniteTree, sigma: &[u32]) -> RankValue {
    if !t.contains(sigma) {
        return RankValue::MinusOne;
    }
    let mut cur = t.derivative();
    let mut k = 0;
    while cur.contains(sigma) {
        cur = cur.derivative();
        k += 1;
    }
    RankValue::finite(k)
}

/// The rank of `σ` by the recursion `ρ(σ) = sup{ρ(σ⌢i) + 1}`.
pub fn rank_by_recursion(t: &FiniteTree, sigma: &[u32]) -> RankValue {
    fn go(t: &FiniteTree, s: &mut Seq) -> u64 {
        let mut r = 0;
        for i in t.children(s) {
            s.push(i);
            r = r.max(go(t, s) + 1);
            s.pop();
        }
        r
    }
    if !t.contains(sigma) {
        return RankValue::MinusOne;
    }
    RankValue::finite(go(t, &mut sigma.to_vec()))
}

/// Ranks of the states of an automaton: `∞` where a cycle is reachable,
/// otherwise the height in the acyclic part.
pub fn state_ranks<L: Label>(t: &RegularTree<L>) -> Vec<RankValue> {
    let n = t.num_states();
    let live = t.live();
    let mut height: Vec<Option<u64>> = vec![None; n];
    for start in 0..n {
        if live[start] || height[start].is_some() {
            continue;
        }
        let mut stack = vec![(start, false)];
        while let Some((q, expanded)) = stack.pop() {
            if height[q].is_some() {
                continue;
            }
            if expanded {
                let h = t.edges(q).values().map(|&c| height[c].expect("child done") + 1).max();
                height[q] = Some(h.unwrap_or(0));
            } else {
                stack.push((q, true));
                stack.extend(t.edges(q).values().filter(|&&c| height[c].is_none()).map(|&c| (c, false)));
            }
        }
    }
    (0..n)
        .map(|q| match height[q] {
            _ if live[q] => RankValue::Infinity,
            Some(h) => RankValue::finite(h),
            None => unreachable!("every dead state gets a height"),
        })
        .collect()
}

pub fn regular_rank_at<L: Label>(t: &RegularTree<L>, sigma: &[L]) -> RankValue {
    match t.state_at(sigma) {
        None => RankValue::MinusOne,
        Some(q) => state_ranks(t).swap_remove(q),
    }
}

/// `ρ_T(σ)`.
pub fn rank_at(t: &Tree, sigma: &[u32]) -> RankValue {
    match t {
        Tree::Finite(f) => rank_by_recursion(f, sigma),
        Tree::Regular(r) => regular_rank_at(r, sigma),
        Tree::Symbolic(s) => match s.subtree_at(sigma).structural_rank() {
            None => RankValue::MinusOne,
            Some(a) => RankValue::Ord(a),
        },
    }
}

/// `ρ(T)`: `−1` for the empty tree, `∞` when ill-founded.
pub fn rank_of(t: &Tree) -> RankValue {
    rank_at(t, &[])
}

/// A tree of rank exactly `alpha`.
pub fn canonical(alpha: &Ordinal) -> SymbolicTree {
    SymbolicTree::canonical(alpha)
}

/// `T ∈ 𝒲ℱ_α`.
pub fn wf_member(t: &Tree, alpha: &Ordinal) -> bool {
    match rank_of(t) {
        RankValue::MinusOne => true,
        RankValue::Ord(b) => b < *alpha,
        RankValue::Infinity => false,
    }
}

/// Rank lookups on one tree, with the finite and regular cases precomputed.
enum Ranker {
    Finite(HashMap<Seq, u64>),
    Regular(RegularTree<u32>, Vec<RankValue>),
    Symbolic(SymbolicTree),
}

impl Ranker {
    fn new(t: &Tree) -> Ranker {
        match t {
            Tree::Finite(f) => Ranker::Finite(finite_ranks(f)),
            Tree::Regular(r) => Ranker::Regular(r.clone(), state_ranks(r)),
            Tree::Symbolic(s) => Ranker::Symbolic(s.clone()),
        }
    }

    fn rank(&self, s: &[u32]) -> RankValue {
        match self {
            Ranker::Finite(m) => m.get(s).map_or(RankValue::MinusOne, |&r| RankValue::finite(r)),
            Ranker::Regular(t, r) => t.state_at(s).map_or(RankValue::MinusOne, |q| r[q].clone()),
            Ranker::Symbolic(t) => t
                .subtree_at(s)
                .structural_rank()
                .map_or(RankValue::MinusOne, RankValue::Ord),
        }
    }

    /// The least child `j` of `s` with `ρ(s⌢j) ≥ target`.
    fn least_child_at_least(&self, t: &Tree, s: &[u32], target: &RankValue) -> Option<u32> {
        let mut c = s.to_vec();
        let mut admissible = |j: u32| {
            c.push(j);
            let ok = self.rank(&c) >= *target;
            c.pop();
            ok
        };
        match t.children(s)? {
            Children::Finite(v) => v.into_iter().find(|&j| admissible(j)),
            Children::Infinite => {
                // child ranks increase along the fundamental sequence
                let sub = t.subtree_at(s);
                let Tree::Symbolic(SymbolicTree::Limit(lambda)) = sub else {
                    unreachable!("only limits branch infinitely")
                };
                if RankValue::Ord(lambda.get().clone()) <= *target {
                    return None;
                }
                (0..=u32::MAX).find(|&j| admissible(j))
            }
        }
    }
}

/// Which part of an infinite source tree an embedding lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainBound {
    pub depth: usize,
    /// Children of an infinitely branching node kept: `0..width`.
    pub width: u32,
}

/// An order-preserving map listed on a prefix-closed part of its domain,
/// with the ranks `(ρ_S(σ), ρ_T(f(σ)))` that justify each choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub pairs: BTreeMap<Seq, Seq>,
    pub ranks: BTreeMap<Seq, (RankValue, RankValue)>,
}

impl Embedding {
    fn empty() -> Self {
        Embedding {
            pairs: BTreeMap::new(),
            ranks: BTreeMap::new(),
        }
    }

    pub fn image(&self, s: &[u32]) -> Option<&Seq> {
        self.pairs.get(s)
    }

    /// `σ ⊊ τ ⟹ f(σ) ⊊ f(τ)` on the listed domain.
    pub fn is_order_preserving(&self) -> bool {
        self.pairs.iter().all(|(s, fs)| {
            s.split_last().is_none_or(|(_, parent)| match self.pairs.get(parent) {
                Some(fp) => fp.len() < fs.len() && fs.starts_with(fp),
                None => false,
            })
        })
    }

    /// Every listed image is a node of `t`.
    pub fn lands_in(&self, t: &Tree) -> bool {
        self.pairs.values().all(|s| t.contains(s))
    }

    /// `⟨n⟩⌢f(σ)`.
    fn shifted(self, n: u32) -> Embedding {
        let prepend = |s: Seq| {
            let mut t = vec![n];
            t.extend(s);
            t
        };
        Embedding {
            pairs: self.pairs.into_iter().map(|(k, v)| (k, prepend(v))).collect(),
            ranks: self.ranks,
        }
    }
}

/// The nodes of `s` listed in an embedding, parents first.
fn domain(s: &Tree, bound: Option<DomainBound>) -> Result<Vec<Seq>, RankError> {
    if let Tree::Finite(f) = s {
        return Ok(f.nodes().cloned().collect());
    }
    let finite = rank_of(s) != RankValue::Infinity
        && !matches!(s, Tree::Symbolic(t) if has_limit(t));
    if !finite && bound.is_none() {
        return Err(RankError::UnboundedDomain);
    }
    let (depth, width) = match bound {
        Some(b) if !finite => (b.depth, Some(b.width)),
        _ => (usize::MAX, None),
    };
    let mut out = Vec::new();
    let mut stack = vec![Vec::new()];
    while let Some(node) = stack.pop() {
        if node.len() < depth {
            let kids = s.children_upto(&node, width).expect("bounded width");
            for &j in kids.iter().rev() {
                let mut c = node.clone();
                c.push(j);
                stack.push(c);
            }
        }
        out.push(node);
    }
    Ok(out)
}

fn has_limit(t: &SymbolicTree) -> bool {
    match t {
        SymbolicTree::Limit(_) => true,
        SymbolicTree::Node(m) => m.values().any(has_limit),
        _ => false,
    }
}

/// An order-preserving `f: S → T` with `f(∅) = ∅`, or `None` when
/// `ρ(S) > ρ(T)`. For well-founded `T` each child `σ⌢i` goes to the least
/// child of `f(σ)` whose rank is at least `ρ_S(σ⌢i)`; for ill-founded `T`
/// everything runs along the leftmost branch. Infinite sources are listed
/// only inside `bound`.
pub fn embed(s: &Tree, t: &Tree, bound: Option<DomainBound>) -> Result<Option<Embedding>, RankError> {
    let rs = Ranker::new(s);
    let rt = Ranker::new(t);
    let (rank_s, rank_t) = (rs.rank(&[]), rt.rank(&[]));
    if rank_s > rank_t {
        return Ok(None);
    }
    if rank_s == RankValue::MinusOne {
        return Ok(Some(Embedding::empty()));
    }
    let nodes = domain(s, bound)?;
    let mut e = Embedding::empty();
    if rank_t == RankValue::Infinity {
        let Tree::Regular(rt_tree) = t else {
            unreachable!("only regular trees are ill-founded")
        };
        let b = leftmost_branch(rt_tree).expect("ill-founded tree has a leftmost branch");
        for sigma in nodes {
            let image = b.take(sigma.len());
            e.ranks.insert(sigma.clone(), (rs.rank(&sigma), RankValue::Infinity));
            e.pairs.insert(sigma, image);
        }
        return Ok(Some(e));
    }
    for sigma in nodes {
        let image = match sigma.split_last() {
            None => Vec::new(),
            Some((_, parent)) => {
                let mut fp = e.pairs[parent].clone();
                let j = rt
                    .least_child_at_least(t, &fp, &rs.rank(&sigma))
                    .ok_or_else(|| RankError::ConstructionFailed { node: sigma.clone() })?;
                fp.push(j);
                fp
            }
        };
        e.ranks.insert(sigma.clone(), (rs.rank(&sigma), rt.rank(&image)));
        e.pairs.insert(sigma, image);
    }
    Ok(Some(e))
}

/// Outcome of a strict embedding search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrictEmbedding {
    /// `S` is empty and `T` is not.
    EmptyWitness,
    /// `f: S → T` with `f(∅) = ⟨child⟩`.
    Child { child: u32, embedding: Embedding },
    None,
}

/// The least child `n` of the root of `T` with an order-preserving map
/// `S → T(⟨n⟩)`, composed into `T`. For well-founded `T` this decides
/// `ρ(S) < ρ(T)`.
pub fn strict_embed(s: &Tree, t: &Tree, bound: Option<DomainBound>) -> Result<StrictEmbedding, RankError> {
    if s.is_empty() {
        return Ok(if t.is_empty() {
            StrictEmbedding::None
        } else {
            StrictEmbedding::EmptyWitness
        });
    }
    let rt = Ranker::new(t);
    let Some(n) = rt.least_child_at_least(t, &[], &rank_of(s)) else {
        return Ok(StrictEmbedding::None);
    };
    let sub = t.subtree_at(&[n]);
    match embed(s, &sub, bound)? {
        Some(e) => Ok(StrictEmbedding::Child {
            child: n,
            embedding: e.shifted(n),
        }),
        None => Err(RankError::ConstructionFailed { node: vec![n] }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RankComparison {
    Lt,
    Eq,
    Gt,
    BothInf,
}

pub fn rank_compare(s: &Tree, t: &Tree) -> RankComparison {
    let (a, b) = (rank_of(s), rank_of(t));
    if a == RankValue::Infinity && b == RankValue::Infinity {
        return RankComparison::BothInf;
    }
    match a.cmp(&b) {
        std::cmp::Ordering::Less => RankComparison::Lt,
        std::cmp::Ordering::Equal => RankComparison::Eq,
        std::cmp::Ordering::Greater => RankComparison::Gt,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Side {
    First,
    Second,
    Neither,
}

/// Splits a point between two co-analytic sets given by its trees `S = f(x)`
/// and `T = g(x)`: first when `S` is well-founded with `ρ(S) ≤ ρ(T)`, second
/// when `T` is well-founded with `ρ(T) < ρ(S)`.
pub fn reduce_pair(s: &Tree, t: &Tree) -> Side {
    let (a, b) = (rank_of(s), rank_of(t));
    if a != RankValue::Infinity && a <= b {
        Side::First
    } else if b != RankValue::Infinity && b < a {
        Side::Second
    } else {
        Side::Neither
    }
}

/// `S ≤ T` in the existential form: an order-preserving `S → T` exists.
pub fn norm_leq_sigma(s: &Tree, t: &Tree) -> Result<bool, RankError> {
    // the decision does not depend on how much of the map is listed
    let probe = DomainBound { depth: 0, width: 0 };
    Ok(embed(s, t, Some(probe))?.is_some())
}

/// `S ≤ T` in the universal form: `S` well-founded and no order-preserving
/// `T → S(⟨n⟩)`.
pub fn norm_leq_pi(s: &Tree, t: &Tree) -> Result<bool, RankError> {
    if rank_of(s) == RankValue::Infinity {
        return Ok(false);
    }
    let probe = DomainBound { depth: 0, width: 0 };
    Ok(strict_embed(t, s, Some(probe))? == StrictEmbedding::None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        Ordinal::parse(s).unwrap()
    }

    fn ft(nodes: &[&[u32]]) -> Tree {
        FiniteTree::new(nodes.iter().map(|s| s.to_vec())).unwrap().into()
    }

    fn self_loop() -> Tree {
        RegularTree::from_edges("q", [("q", 0u32, "q")]).unwrap().into()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_at(&ft(&[&[]]), &[]), RankValue::finite(0));
        assert_eq!(rank_of(&FiniteTree::empty().into()), RankValue::MinusOne);
        let full = FiniteTree::full(2, 3);
        assert_eq!(rank_by_derivatives(&full, &[]), RankValue::finite(3));
        assert_eq!(rank_of(&full.into()), RankValue::finite(3));
        assert_eq!(rank_of(&canonical(&o("w")).into()), RankValue::Ord(o("w")));
        assert_eq!(rank_of(&self_loop()), RankValue::Infinity);
        assert_eq!(rank_of(&ft(&[&[], &[0]])), RankValue::finite(1));
    }

    #[test]
    fn regular_heights() {
        // q0 -0-> q1 -0-> q2, q0 -1-> q2, q1 -1-> q3 (loop)
        let t = RegularTree::from_edges(
            "q0",
            [("q0", 0u32, "q1"), ("q1", 0, "q2"), ("q0", 1, "q2"), ("q1", 1, "q3"), ("q3", 0, "q3")],
        )
        .unwrap();
        assert_eq!(regular_rank_at(&t, &[0, 0]), RankValue::finite(0));
        assert_eq!(regular_rank_at(&t, &[1]), RankValue::finite(0));
        assert_eq!(regular_rank_at(&t, &[0]), RankValue::Infinity);
        assert_eq!(regular_rank_at(&t, &[1, 1]), RankValue::MinusOne);
        let dag = RegularTree::from_edges("a", [("a", 0u32, "b"), ("b", 0, "c"), ("a", 1, "c")]).unwrap();
        assert_eq!(regular_rank_at(&dag, &[]), RankValue::finite(2));
    }

    #[test]
    fn rank_value_text() {
        for s in ["-1", "inf", "w^2 + 3"] {
            assert_eq!(s.parse::<RankValue>().unwrap().to_string(), s);
        }
        assert!(RankValue::MinusOne < RankValue::finite(0));
        assert!(RankValue::Ord(o("w^w")) < RankValue::Infinity);
    }

    #[test]
    fn wf_membership() {
        assert!(wf_member(&ft(&[&[]]), &o("1")));
        assert!(!wf_member(&ft(&[&[]]), &o("0")));
        assert!(!wf_member(&self_loop(), &o("w^w")));
    }

    #[test]
    fn embed_examples() {
        let e = embed(&ft(&[&[]]), &ft(&[&[], &[0]]), None).unwrap().unwrap();
        assert_eq!(e.pairs, BTreeMap::from([(vec![], vec![])]));
        assert_eq!(embed(&FiniteTree::chain(2).into(), &ft(&[&[]]), None).unwrap(), None);

        let s: Tree = canonical(&o("w")).into();
        let t: Tree = canonical(&o("w + 1")).into();
        let bound = DomainBound { depth: 3, width: 5 };
        let e = embed(&s, &t, Some(bound)).unwrap().unwrap();
        assert!(e.is_order_preserving());
        assert!(e.lands_in(&t));
        for n in 0..5 {
            assert_eq!(e.image(&[n]), Some(&vec![0]));
        }
        assert!(e.ranks.values().all(|(a, b)| a <= b));
        assert_eq!(embed(&s, &t, None), Err(RankError::UnboundedDomain));
    }

    #[test]
    fn embed_into_ill_founded_follows_leftmost_branch() {
        let t: Tree = RegularTree::from_edges("q", [("q", 1u32, "q"), ("q", 2, "q")]).unwrap().into();
        let e = embed(&FiniteTree::full(3, 2).into(), &t, None).unwrap().unwrap();
        assert_eq!(e.image(&[2, 0]), Some(&vec![1, 1]));
        assert!(e.is_order_preserving());
    }

    #[test]
    fn strict_embed_examples() {
        let r = strict_embed(&ft(&[&[]]), &ft(&[&[], &[0]]), None).unwrap();
        let StrictEmbedding::Child { child, embedding } = r else {
            panic!("expected a child witness")
        };
        assert_eq!(child, 0);
        assert_eq!(embedding.pairs, BTreeMap::from([(vec![], vec![0])]));
        assert_eq!(strict_embed(&ft(&[&[], &[0]]), &ft(&[&[], &[0]]), None).unwrap(), StrictEmbedding::None);
        assert_eq!(
            strict_embed(&FiniteTree::empty().into(), &ft(&[&[]]), None).unwrap(),
            StrictEmbedding::EmptyWitness
        );
    }

    #[test]
    fn comparisons() {
        assert_eq!(rank_compare(&ft(&[&[]]), &ft(&[&[], &[0]])), RankComparison::Lt);
        assert_eq!(rank_compare(&self_loop(), &self_loop()), RankComparison::BothInf);
        assert_eq!(
            rank_compare(&canonical(&o("w^2")).into(), &canonical(&o("w*5")).into()),
            RankComparison::Gt
        );
        assert_eq!(reduce_pair(&ft(&[&[]]), &self_loop()), Side::First);
        assert_eq!(reduce_pair(&self_loop(), &ft(&[&[]])), Side::Second);
        assert_eq!(reduce_pair(&self_loop(), &self_loop()), Side::Neither);
    }

    #[test]
    fn norms() {
        let (s, t) = (ft(&[&[]]), ft(&[&[], &[0]]));
        assert!(norm_leq_sigma(&s, &t).unwrap() && norm_leq_pi(&s, &t).unwrap());
        let c2: Tree = FiniteTree::chain(2).into();
        assert!(!norm_leq_sigma(&c2, &s).unwrap() && !norm_leq_pi(&c2, &s).unwrap());
        assert!(norm_leq_sigma(&s, &self_loop()).unwrap());
        assert!(norm_leq_pi(&s, &self_loop()).unwrap());
    }

    #[test]
    fn limit_child_ranks_sandwich_the_limit() {
        for l in ["w", "w*2", "w^2", "w^2 + w*3", "w^w", "w^(w + 1)"] {
            let lambda = o(l);
            let t = canonical(&lambda);
            for n in 0..20 {
                let r = t.child(n).unwrap().structural_rank().unwrap();
                assert!(r.succ() <= lambda);
                assert!(r < t.child(n + 1).unwrap().structural_rank().unwrap());
            }
        }
    }
}
