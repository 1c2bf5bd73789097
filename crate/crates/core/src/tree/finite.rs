use std::collections::BTreeSet;

use super::{is_prefix, Seq, TreeError, Window};

/// A finite tree: a prefix-closed finite set of sequences of naturals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteTree {
    nodes: BTreeSet<Seq>,
}

impl FiniteTree {
    pub fn empty() -> Self {
        FiniteTree::default()
    }

    /// The tree `{∅}`.
    pub fn root() -> Self {
        FiniteTree {
            nodes: BTreeSet::from([Vec::new()]),
        }
    }

    /// Validates prefix closure; the error names a node whose parent is missing.
    pub fn new<I: IntoIterator<Item = Seq>>(nodes: I) -> Result<Self, TreeError> {
        let nodes: BTreeSet<Seq> = nodes.into_iter().collect();
        for s in &nodes {
            if let Some((_, parent)) = s.split_last() {
                if !nodes.contains(parent) {
                    return Err(TreeError::MissingPrefix { node: s.clone() });
                }
            }
        }
        Ok(FiniteTree { nodes })
    }

    /// The downward closure of the given sequences.
    pub fn closure<I: IntoIterator<Item = Seq>>(seqs: I) -> Self {
        let mut nodes = BTreeSet::new();
        for s in seqs {
            for k in 0..=s.len() {
                nodes.insert(s[..k].to_vec());
            }
        }
        FiniteTree { nodes }
    }

    /// A single chain `⟨0,…,0⟩` of the given length.
    pub fn chain(len: usize) -> Self {
        FiniteTree::closure([vec![0; len]])
    }

    /// All sequences over `{0,…,arity-1}` of length at most `depth`.
    pub fn full(arity: u32, depth: usize) -> Self {
        let mut nodes = BTreeSet::from([Vec::new()]);
        let mut layer: Vec<Seq> = vec![Vec::new()];
        for _ in 0..depth {
            layer = layer
                .iter()
                .flat_map(|s| {
                    (0..arity).map(move |a| {
                        let mut t = s.clone();
                        t.push(a);
                        t
                    })
                })
                .collect();
            nodes.extend(layer.iter().cloned());
        }
        FiniteTree { nodes }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        self.nodes.contains(s)
    }

    /// Nodes in lexicographic order.
    pub fn nodes(&self) -> impl DoubleEndedIterator<Item = &Seq> + '_ {
        self.nodes.iter()
    }

    /// All nodes extending `s` (including `s`), in lexicographic order.
    pub fn extensions<'a>(&'a self, s: &'a [u32]) -> impl Iterator<Item = &'a Seq> + 'a {
        self.nodes
            .range::<[u32], _>((std::ops::Bound::Included(s), std::ops::Bound::Unbounded))
            .take_while(move |t| t.starts_with(s))
    }

    pub fn children(&self, s: &[u32]) -> Vec<u32> {
        self.extensions(s)
            .filter(|t| t.len() == s.len() + 1)
            .map(|t| t[s.len()])
            .collect()
    }

    pub fn is_terminal(&self, s: &[u32]) -> bool {
        self.contains(s) && self.extensions(s).nth(1).is_none()
    }

    pub fn subtree_at(&self, sigma: &[u32]) -> FiniteTree {
        FiniteTree {
            nodes: self
                .extensions(sigma)
                .map(|t| t[sigma.len()..].to_vec())
                .collect(),
        }
    }

    /// `{σ′ ∈ T : σ′ ⊆ σ or σ ⊆ σ′}`.
    pub fn restrict_comparable(&self, sigma: &[u32]) -> Result<FiniteTree, TreeError> {
        if !self.contains(sigma) {
            return Err(TreeError::NotANode);
        }
        Ok(FiniteTree {
            nodes: self
                .nodes
                .iter()
                .filter(|t| is_prefix(t, sigma) || is_prefix(sigma, t))
                .cloned()
                .collect(),
        })
    }

    /// The tree with all terminal nodes removed.
    pub fn derivative(&self) -> FiniteTree {
        FiniteTree {
            nodes: self
                .nodes
                .iter()
                .filter(|s| !self.is_terminal(s))
                .cloned()
                .collect(),
        }
    }

    pub fn depth(&self) -> Option<usize> {
        self.nodes.iter().map(Vec::len).max()
    }

    pub fn branches_upto(&self, depth: usize, limit: usize) -> Window<u32> {
        Window::collect(self.nodes.iter().filter(|s| s.len() == depth).cloned(), limit)
    }

    /// Shifts every node under the label `n`: `{⟨n⟩⌢s : s ∈ T} ∪ {∅}`.
    pub fn graft_under(&self, n: u32) -> FiniteTree {
        let mut nodes = BTreeSet::from([Vec::new()]);
        for s in &self.nodes {
            let mut t = vec![n];
            t.extend_from_slice(s);
            nodes.insert(t);
        }
        FiniteTree { nodes }
    }
}
