//! Analytic sets as projections `p[T]` of trees on pairs: sections,
//! membership with certificates, projection, perfect splits and
//! leftmost-branch uniformization.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::closedset::{cb_decompose, intersect, leftmost_branch};
use crate::rank::{regular_rank_at, RankValue};
use crate::tree::{Pair, RegularTree, TreeError, UPWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticError {
    #[error("letter {0} is not in the first-coordinate alphabet")]
    AlphabetMismatch(u32),
    #[error("sequence is not a node of the tree")]
    NotANode,
    #[error("state budget of {limit} exceeded")]
    Budget { limit: usize },
    #[error("the point is not in the projection")]
    NotInProjection,
}

/// Limit on the number of states a construction may create.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_states: 100_000 }
    }
}

/// A regular tree on pairs `(x-label, y-label)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductTree(pub RegularTree<Pair>);

impl ProductTree {
    pub fn new(t: RegularTree<Pair>) -> Self {
        ProductTree(t)
    }

    pub fn tree(&self) -> &RegularTree<Pair> {
        &self.0
    }

    pub fn x_alphabet(&self) -> BTreeSet<u32> {
        self.0.alphabet().iter().map(|p| p.0).collect()
    }

    pub fn y_alphabet(&self) -> BTreeSet<u32> {
        self.0.alphabet().iter().map(|p| p.1).collect()
    }

    /// The nodes whose second coordinate is comparable with `s`.
    pub fn restrict_y_prefix(&self, s: &[u32]) -> ProductTree {
        let t = &self.0;
        let k = s.len() + 1;
        let edges = (0..t.num_states() * k)
            .map(|state| {
                let (q, i) = (state / k, state % k);
                t.edges(q)
                    .iter()
                    .filter(|((_, b), _)| i == s.len() || *b == s[i])
                    .map(|(&a, &c)| (a, c * k + (i + 1).min(s.len())))
                    .collect()
            })
            .collect();
        let initial = t.initial().map(|q| q * k);
        ProductTree(RegularTree::from_table(t.alphabet().iter().copied(), initial, edges).expect("valid").trim())
    }
}

/// `T^x = {t : (x↾lh(t), t) ∈ T}` over the lasso positions of `x`.
pub fn section_tree(t: &ProductTree, x: &UPWord<u32>) -> Result<RegularTree<u32>, AnalyticError> {
    let xs = t.x_alphabet();
    if let Some(&a) = x.prefix().iter().chain(x.period()).find(|a| !xs.contains(a)) {
        return Err(AnalyticError::AlphabetMismatch(a));
    }
    let tree = t.tree();
    let positions = x.lasso_len();
    let edges: Vec<BTreeMap<u32, usize>> = (0..tree.num_states() * positions)
        .map(|state| {
            let (q, p) = (state / positions, state % positions);
            let letter = x.at(p);
            tree.edges(q)
                .iter()
                .filter(|((a, _), _)| *a == letter)
                .map(|(&(_, b), &c)| (b, c * positions + x.next_position(p)))
                .collect()
        })
        .collect();
    let initial = tree.initial().map(|q| q * positions);
    Ok(RegularTree::from_table(t.y_alphabet(), initial, edges).expect("valid"))
}

/// The answer to `x ∈ p[T]` with its certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// `(x, witness)` is a branch of `T`.
    In { witness: UPWord<u32> },
    /// `T^x` is well-founded of this rank.
    Out { rank: RankValue },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::In { .. })
    }
}

pub fn member(t: &ProductTree, x: &UPWord<u32>) -> Result<Membership, AnalyticError> {
    let sec = section_tree(t, x)?;
    if sec.is_ill_founded() {
        let witness = leftmost_branch(&sec).expect("ill-founded");
        Ok(Membership::In { witness })
    } else {
        Ok(Membership::Out {
            rank: regular_rank_at(&sec, &[]),
        })
    }
}

/// `p[T]`, closed since the second alphabet is finite: project the labels,
/// determinize over live states, prune.
pub fn project_closed(t: &ProductTree, budget: Budget) -> Result<RegularTree<u32>, AnalyticError> {
    let p = t.tree().prune();
    let alphabet = t.x_alphabet();
    let Some(q0) = p.initial() else {
        return Ok(RegularTree::empty(alphabet));
    };
    let start = BTreeSet::from([q0]);
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut order = vec![start];
    let mut edges: Vec<BTreeMap<u32, usize>> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut by_letter: BTreeMap<u32, BTreeSet<usize>> = BTreeMap::new();
        for &q in &order[i] {
            for (&(a, _), &c) in p.edges(q) {
                by_letter.entry(a).or_default().insert(c);
            }
        }
        let mut row = BTreeMap::new();
        for (a, set) in by_letter {
            let k = match index.get(&set) {
                Some(&k) => k,
                None => {
                    if order.len() == budget.max_states {
                        return Err(AnalyticError::Budget {
                            limit: budget.max_states,
                        });
                    }
                    index.insert(set.clone(), order.len());
                    order.push(set);
                    order.len() - 1
                }
            };
            row.insert(a, k);
        }
        edges.push(row);
        i += 1;
    }
    Ok(RegularTree::from_table(alphabet, Some(0), edges).expect("valid").prune())
}

/// A pair of product nodes `(σ₀, σ₁)`.
pub type Split = (Vec<Pair>, Vec<Pair>);

/// Two extensions `σ₀, σ₁` of `σ` of equal length whose restricted trees
/// have disjoint projections, each with a nonempty perfect kernel. Lengths
/// up to `lh(σ) + max_depth` are searched, pairs in lexicographic order.
pub fn find_perfect_split(
    t: &ProductTree,
    sigma: &[Pair],
    max_depth: usize,
    budget: Budget,
) -> Result<Option<Split>, AnalyticError> {
    let tree = t.tree();
    let below = tree.subtree_at(sigma);
    if below.is_empty() {
        return Err(AnalyticError::NotANode);
    }
    for extra in 1..=max_depth {
        let window = below.nodes_at_depth(extra, budget.max_states);
        if window.truncated {
            return Err(AnalyticError::Budget {
                limit: budget.max_states,
            });
        }
        let mut candidates: Vec<(Vec<Pair>, RegularTree<u32>)> = Vec::new();
        for tail in window.nodes {
            let mut node = sigma.to_vec();
            node.extend(tail);
            let restricted = tree.restrict_comparable(&node).map_err(|_: TreeError| AnalyticError::NotANode)?;
            let proj = project_closed(&ProductTree(restricted), budget)?;
            if !cb_decompose(&proj, 0).kernel.is_empty() {
                candidates.push((node, proj));
            }
        }
        for (i, (a, pa)) in candidates.iter().enumerate() {
            for (b, pb) in &candidates[i + 1..] {
                let meet = intersect(pa, pb).expect("same first alphabet");
                if meet.is_empty() {
                    return Ok(Some((a.clone(), b.clone())));
                }
            }
        }
    }
    Ok(None)
}

/// The leftmost `y` with `(x, y) ∈ [T]`.
pub fn uniformize(t: &ProductTree, x: &UPWord<u32>) -> Result<UPWord<u32>, AnalyticError> {
    let sec = section_tree(t, x)?;
    leftmost_branch(&sec).map_err(|_| AnalyticError::NotInProjection)
}
