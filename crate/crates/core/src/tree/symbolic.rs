use std::collections::BTreeMap;

use super::{Children, TreeError, Window};
use crate::ordinal::Ordinal;

/// A finitely described well-founded tree, possibly infinitely branching.
///
/// `Limit(λ)` is the canonical tree of the limit ordinal `λ`: its child `n`
/// is the canonical tree of `λ[n]`, generated on demand.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SymbolicTree {
    Empty,
    Leaf,
    Node(BTreeMap<u32, SymbolicTree>),
    Limit(LimitOrdinal),
}

/// An ordinal checked to be a limit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LimitOrdinal(Ordinal);

impl LimitOrdinal {
    pub fn new(lambda: Ordinal) -> Result<Self, TreeError> {
        if lambda.is_limit() {
            Ok(LimitOrdinal(lambda))
        } else {
            Err(TreeError::NotALimit(lambda.to_string()))
        }
    }

    pub fn get(&self) -> &Ordinal {
        &self.0
    }
}

impl SymbolicTree {
    /// A node with the given children; empty children are dropped and a
    /// childless node is a leaf.
    pub fn node(children: impl IntoIterator<Item = (u32, SymbolicTree)>) -> SymbolicTree {
        let map: BTreeMap<u32, SymbolicTree> = children
            .into_iter()
            .filter(|(_, t)| !matches!(t, SymbolicTree::Empty))
            .collect();
        if map.is_empty() {
            SymbolicTree::Leaf
        } else {
            SymbolicTree::Node(map)
        }
    }

    pub fn omega_limit(lambda: Ordinal) -> Result<SymbolicTree, TreeError> {
        Ok(SymbolicTree::Limit(LimitOrdinal::new(lambda)?))
    }

    /// The canonical tree of rank `alpha`: `Leaf` for 0, a single child for
    /// successors, `Limit` for limits.
    pub fn canonical(alpha: &Ordinal) -> SymbolicTree {
        let mut finite_part = 0u64;
        let mut base = alpha.clone();
        while let Some(p) = base.pred() {
            finite_part += 1;
            base = p;
        }
        let mut tree = if base.is_zero() {
            SymbolicTree::Leaf
        } else {
            SymbolicTree::Limit(LimitOrdinal(base))
        };
        for _ in 0..finite_part {
            tree = SymbolicTree::Node(BTreeMap::from([(0, tree)]));
        }
        tree
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, SymbolicTree::Empty)
    }

    pub fn children(&self) -> Children<u32> {
        match self {
            SymbolicTree::Empty | SymbolicTree::Leaf => Children::Finite(Vec::new()),
            SymbolicTree::Node(map) => Children::Finite(map.keys().copied().collect()),
            SymbolicTree::Limit(_) => Children::Infinite,
        }
    }

    /// The subtree at the child `n`, if `⟨n⟩` is a node.
    pub fn child(&self, n: u32) -> Option<SymbolicTree> {
        match self {
            SymbolicTree::Empty | SymbolicTree::Leaf => None,
            SymbolicTree::Node(map) => map.get(&n).cloned(),
            SymbolicTree::Limit(lambda) => {
                let beta = lambda.0.fund_seq(u64::from(n)).expect("limit ordinal");
                Some(SymbolicTree::canonical(&beta))
            }
        }
    }

    pub fn subtree_at(&self, sigma: &[u32]) -> SymbolicTree {
        if self.is_empty() {
            return SymbolicTree::Empty;
        }
        let mut cur = self.clone();
        for &n in sigma {
            match cur.child(n) {
                Some(next) => cur = next,
                None => return SymbolicTree::Empty,
            }
        }
        cur
    }

    pub fn contains(&self, sigma: &[u32]) -> bool {
        !self.subtree_at(sigma).is_empty()
    }

    /// The rank of the root, by structural recursion; `None` for the empty tree.
    pub fn structural_rank(&self) -> Option<Ordinal> {
        match self {
            SymbolicTree::Empty => None,
            SymbolicTree::Leaf => Some(Ordinal::zero()),
            SymbolicTree::Node(map) => {
                let ranks: Vec<Ordinal> = map.values().filter_map(SymbolicTree::structural_rank).collect();
                Some(Ordinal::sup(&ranks).succ())
            }
            SymbolicTree::Limit(lambda) => Some(lambda.0.clone()),
        }
    }

    /// `T_σ` for a node `σ`.
    pub fn restrict_comparable(&self, sigma: &[u32]) -> Result<SymbolicTree, TreeError> {
        let below = self.subtree_at(sigma);
        if below.is_empty() {
            return Err(TreeError::NotANode);
        }
        Ok(sigma
            .iter()
            .rev()
            .fold(below, |t, &n| SymbolicTree::Node(BTreeMap::from([(n, t)]))))
    }

    /// Depth-`depth` nodes in lexicographic order; infinitely branching nodes
    /// contribute only the children below `width`.
    pub fn nodes_at_depth(&self, depth: usize, width: Option<u32>, limit: usize) -> Result<Window<u32>, TreeError> {
        let mut window = Window {
            nodes: Vec::new(),
            truncated: false,
        };
        if !self.is_empty() {
            let mut path = Vec::new();
            self.collect(depth, width, limit, &mut path, &mut window)?;
        }
        Ok(window)
    }

    fn collect(
        &self,
        remaining: usize,
        width: Option<u32>,
        limit: usize,
        path: &mut Vec<u32>,
        window: &mut Window<u32>,
    ) -> Result<(), TreeError> {
        if window.truncated {
            return Ok(());
        }
        if remaining == 0 {
            if window.nodes.len() == limit {
                window.truncated = true;
            } else {
                window.nodes.push(path.clone());
            }
            return Ok(());
        }
        let labels: Vec<u32> = match self.children() {
            Children::Finite(v) => v,
            Children::Infinite => (0..width.ok_or(TreeError::MissingCutoff)?).collect(),
        };
        for n in labels {
            let child = self.child(n).expect("listed child exists");
            path.push(n);
            child.collect(remaining - 1, width, limit, path, window)?;
            path.pop();
        }
        Ok(())
    }
}
