//! Trees over finite sequences in three presentations.
//!
//! * [`FiniteTree`]: an explicit prefix-closed node set.
//! * [`RegularTree`]: a deterministic partial automaton over a finite
//!   alphabet; it can have infinite branches.
//! * [`SymbolicTree`]: well-founded, possibly infinitely branching trees
//!   built from canonical constructors.
//!
//! [`Tree`] dispatches the structural operations over all three.

mod finite;
mod regular;
mod symbolic;
mod word;

use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

pub use finite::FiniteTree;
pub use regular::RegularTree;
pub use symbolic::{LimitOrdinal, SymbolicTree};
pub use word::UPWord;

/// A finite sequence of naturals.
pub type Seq = Vec<u32>;

/// A pair label of a product tree.
pub type Pair = (u32, u32);

/// Tree labels: naturals, or pairs for product trees.
pub trait Label: Ord + Copy + Hash + Debug + 'static {}

impl<T: Ord + Copy + Hash + Debug + 'static> Label for T {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("node {node:?} is present but its parent is not")]
    MissingPrefix { node: Seq },
    #[error("state {state} has more than one edge labelled {label}")]
    Nondeterministic { state: String, label: String },
    #[error("state {state} uses label {label} outside the alphabet")]
    LabelOutsideAlphabet { state: String, label: String },
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("sequence is not a node of the tree")]
    NotANode,
    #[error("the tree is empty")]
    EmptyTree,
    #[error("the tree is not pruned")]
    NotPruned,
    #[error("{0} is not a limit ordinal")]
    NotALimit(String),
    #[error("an infinitely branching node needs a branching cutoff")]
    MissingCutoff,
    #[error("ultimately periodic word needs a nonempty period")]
    EmptyPeriod,
}

/// `s` is a (not necessarily proper) prefix of `t`.
pub fn is_prefix<L: PartialEq>(s: &[L], t: &[L]) -> bool {
    t.starts_with(s)
}

/// `s` is a proper prefix of `t`.
pub fn is_proper_prefix<L: PartialEq>(s: &[L], t: &[L]) -> bool {
    s.len() < t.len() && t.starts_with(s)
}

/// The immediate successors of a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Children<L> {
    /// Ascending labels.
    Finite(Vec<L>),
    /// Every natural is a child; use [`SymbolicTree::child`] to expand one.
    Infinite,
}

impl<L> Children<L> {
    pub fn at_least_two(&self) -> bool {
        match self {
            Children::Finite(v) => v.len() >= 2,
            Children::Infinite => true,
        }
    }
}

/// A finite window of nodes at one depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window<L> {
    pub nodes: Vec<Vec<L>>,
    /// More nodes exist beyond `nodes`.
    pub truncated: bool,
}

impl<L> Window<L> {
    pub(crate) fn collect(iter: impl Iterator<Item = Vec<L>>, limit: usize) -> Self {
        let mut nodes = Vec::new();
        let mut iter = iter.peekable();
        while nodes.len() < limit {
            match iter.next() {
                Some(s) => nodes.push(s),
                None => break,
            }
        }
        Window {
            truncated: iter.peek().is_some(),
            nodes,
        }
    }
}

/// A tree over the naturals in any of the three presentations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Finite(FiniteTree),
    Regular(RegularTree<u32>),
    Symbolic(SymbolicTree),
}

impl From<FiniteTree> for Tree {
    fn from(t: FiniteTree) -> Self {
        Tree::Finite(t)
    }
}

impl From<RegularTree<u32>> for Tree {
    fn from(t: RegularTree<u32>) -> Self {
        Tree::Regular(t)
    }
}

impl From<SymbolicTree> for Tree {
    fn from(t: SymbolicTree) -> Self {
        Tree::Symbolic(t)
    }
}

impl Tree {
    pub fn is_empty(&self) -> bool {
        match self {
            Tree::Finite(t) => t.is_empty(),
            Tree::Regular(t) => t.is_empty(),
            Tree::Symbolic(t) => t.is_empty(),
        }
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        match self {
            Tree::Finite(t) => t.contains(s),
            Tree::Regular(t) => t.contains(s),
            Tree::Symbolic(t) => t.contains(s),
        }
    }

    /// The children of `s`, or `None` when `s` is not a node.
    pub fn children(&self, s: &[u32]) -> Option<Children<u32>> {
        if !self.contains(s) {
            return None;
        }
        Some(match self {
            Tree::Finite(t) => Children::Finite(t.children(s)),
            Tree::Regular(t) => Children::Finite(t.children(s)),
            Tree::Symbolic(t) => t.subtree_at(s).children(),
        })
    }

    /// Finite list of children, expanding an infinitely branching node up to
    /// `width`.
    pub fn children_upto(&self, s: &[u32], width: Option<u32>) -> Result<Vec<u32>, TreeError> {
        match self.children(s) {
            None => Ok(Vec::new()),
            Some(Children::Finite(v)) => Ok(v),
            Some(Children::Infinite) => Ok((0..width.ok_or(TreeError::MissingCutoff)?).collect()),
        }
    }

    pub fn subtree_at(&self, sigma: &[u32]) -> Tree {
        match self {
            Tree::Finite(t) => Tree::Finite(t.subtree_at(sigma)),
            Tree::Regular(t) => Tree::Regular(t.subtree_at(sigma)),
            Tree::Symbolic(t) => Tree::Symbolic(t.subtree_at(sigma)),
        }
    }

    pub fn restrict_comparable(&self, sigma: &[u32]) -> Result<Tree, TreeError> {
        Ok(match self {
            Tree::Finite(t) => Tree::Finite(t.restrict_comparable(sigma)?),
            Tree::Regular(t) => Tree::Regular(t.restrict_comparable(sigma)?),
            Tree::Symbolic(t) => Tree::Symbolic(t.restrict_comparable(sigma)?),
        })
    }

    /// Finite and symbolic trees have no infinite branch, so they prune to
    /// the empty tree.
    pub fn prune(&self) -> Tree {
        match self {
            Tree::Finite(_) => Tree::Finite(FiniteTree::empty()),
            Tree::Symbolic(_) => Tree::Symbolic(SymbolicTree::Empty),
            Tree::Regular(t) => Tree::Regular(t.prune()),
        }
    }

    pub fn is_splitting(&self, s: &[u32]) -> Result<bool, TreeError> {
        self.children(s)
            .map(|c| c.at_least_two())
            .ok_or(TreeError::NotANode)
    }

    /// Depth-`depth` nodes, lexicographically, at most `limit`. For a regular
    /// tree these are the depth-`depth` prefixes of its branches; symbolic
    /// trees need a branching cutoff.
    pub fn branches_upto(&self, depth: usize, limit: usize, width: Option<u32>) -> Result<Window<u32>, TreeError> {
        match self {
            Tree::Finite(t) => Ok(t.branches_upto(depth, limit)),
            Tree::Regular(t) => Ok(t.branches_upto(depth, limit)),
            Tree::Symbolic(t) => t.nodes_at_depth(depth, width, limit),
        }
    }

    pub fn retract_node(&self, s: &[u32]) -> Result<Seq, TreeError> {
        match self {
            Tree::Regular(t) => t.retract_node(s),
            t if t.is_empty() => Err(TreeError::EmptyTree),
            _ => Err(TreeError::NotPruned),
        }
    }
}
