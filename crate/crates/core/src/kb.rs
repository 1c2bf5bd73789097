//! The Kleene-Brouwer ordering on finite sequences.

use std::cmp::Ordering;

use thiserror::Error;

use crate::tree::{FiniteTree, Label, RegularTree, Seq, UPWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("the branch leaves the tree at length {length}")]
    LeavesTree { length: usize },
    #[error("chain is not strictly decreasing at position {position}")]
    NotDecreasing { position: usize },
    #[error("the chain does not determine the branch at level {level}")]
    NeedMore { level: usize },
    #[error("pair components have different lengths ({left} and {right})")]
    LengthMismatch { left: usize, right: usize },
}

/// `Less` iff `s ≺ t`: either `t` is a proper prefix of `s`, or `s(n) < t(n)`
/// at the first difference `n`. The empty sequence is the maximum.
pub fn kb_compare<L: Ord>(s: &[L], t: &[L]) -> Ordering {
    match s.iter().zip(t).find(|(a, b)| a != b) {
        Some((a, b)) => a.cmp(b),
        None => t.len().cmp(&s.len()),
    }
}

/// Interleaving `(σ(0), τ(0), σ(1), τ(1), …)` of a pair of equal-length
/// sequences.
pub fn interleave(sigma: &[u32], tau: &[u32]) -> Result<Seq, KbError> {
    if sigma.len() != tau.len() {
        return Err(KbError::LengthMismatch {
            left: sigma.len(),
            right: tau.len(),
        });
    }
    Ok(sigma.iter().zip(tau).flat_map(|(&a, &b)| [a, b]).collect())
}

/// KB comparison of pairs through their interleavings.
pub fn kb_compare_product(p: (&[u32], &[u32]), q: (&[u32], &[u32])) -> Result<Ordering, KbError> {
    Ok(kb_compare(&interleave(p.0, p.1)?, &interleave(q.0, q.1)?))
}

/// Nodes of `t` in ascending KB order; the root comes last.
pub fn kb_sort(t: &FiniteTree) -> Vec<Seq> {
    let mut nodes: Vec<Seq> = t.nodes().cloned().collect();
    nodes.sort_by(|a, b| kb_compare(a, b));
    nodes
}

/// A finite strictly KB-decreasing sequence of nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KBChain<L> {
    nodes: Vec<Vec<L>>,
}

impl<L: Label> KBChain<L> {
    pub fn new(nodes: Vec<Vec<L>>) -> Result<Self, KbError> {
        if let Some(i) = nodes
            .windows(2)
            .position(|w| kb_compare(&w[1], &w[0]) != Ordering::Less)
        {
            return Err(KbError::NotDecreasing { position: i + 1 });
        }
        Ok(KBChain { nodes })
    }

    pub fn nodes(&self) -> &[Vec<L>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// The chain `b↾1, …, b↾k` of prefixes of a branch.
pub fn branch_to_chain<L: Label>(t: &RegularTree<L>, b: &UPWord<L>, k: usize) -> Result<KBChain<L>, KbError> {
    let mut q = t.initial().ok_or(KbError::LeavesTree { length: 0 })?;
    let mut nodes = Vec::with_capacity(k);
    for i in 0..k {
        q = t.step(q, b.at(i)).ok_or(KbError::LeavesTree { length: i + 1 })?;
        nodes.push(b.take(i + 1));
    }
    KBChain::new(nodes)
}

/// The length-`m` prefix of the branch read off a decreasing chain: `f(n)` is
/// the least `β` with `σ_k↾n = f↾n` and `σ_k(n) = β` for some chain element.
pub fn chain_to_branch<L: Label>(chain: &KBChain<L>, m: usize) -> Result<Vec<L>, KbError> {
    let mut f: Vec<L> = Vec::with_capacity(m);
    for level in 0..m {
        let next = chain
            .nodes
            .iter()
            .filter(|s| s.len() > level && s.starts_with(&f))
            .map(|s| s[level])
            .min()
            .ok_or(KbError::NeedMore { level })?;
        f.push(next);
    }
    Ok(f)
}
