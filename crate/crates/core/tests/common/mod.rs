//! Random generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dst_core::analytic::ProductTree;
use dst_core::suslin::{sequences_upto, ClopenSet, NestedScheme, Scheme};
use dst_core::tree::{FiniteTree, Pair, RegularTree, Seq, UPWord};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A finite tree grown by attaching up to `max_nodes - 1` random children.
pub fn random_finite(rng: &mut ChaCha8Rng, max_nodes: usize, alphabet: u32) -> FiniteTree {
    let target = rng.gen_range(1..=max_nodes);
    let mut nodes: Vec<Seq> = vec![Vec::new()];
    let mut seen: BTreeSet<Seq> = nodes.iter().cloned().collect();
    let mut attempts = 0;
    while nodes.len() < target && attempts < 20 * max_nodes {
        attempts += 1;
        let mut child = nodes[rng.gen_range(0..nodes.len())].clone();
        child.push(rng.gen_range(0..alphabet));
        if seen.insert(child.clone()) {
            nodes.push(child);
        }
    }
    FiniteTree::new(nodes).unwrap()
}

/// A random deterministic automaton; each edge is present with probability
/// `density`.
pub fn random_table<L: Copy + Ord>(rng: &mut ChaCha8Rng, states: usize, labels: &[L], density: f64) -> Vec<BTreeMap<L, usize>> {
    let mut table = vec![BTreeMap::new(); states];
    for row in &mut table {
        for &a in labels {
            if rng.gen_bool(density) {
                row.insert(a, rng.gen_range(0..states));
            }
        }
    }
    table
}

pub fn random_regular(rng: &mut ChaCha8Rng, max_states: usize, max_alphabet: u32) -> RegularTree<u32> {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_alphabet);
    let labels: Vec<u32> = (0..k).collect();
    let density = rng.gen_range(0.3..0.9);
    let table = random_table(rng, n, &labels, density);
    RegularTree::from_table(labels, Some(0), table).unwrap()
}

pub fn random_ill_founded(rng: &mut ChaCha8Rng, max_states: usize, max_alphabet: u32) -> RegularTree<u32> {
    loop {
        let t = random_regular(rng, max_states, max_alphabet);
        if t.is_ill_founded() {
            return t;
        }
    }
}

pub fn random_pruned(rng: &mut ChaCha8Rng, max_states: usize, max_alphabet: u32) -> RegularTree<u32> {
    loop {
        let t = random_regular(rng, max_states, max_alphabet).prune();
        if !t.is_empty() {
            return t;
        }
    }
}

pub const BINARY_PAIRS: [Pair; 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

pub fn random_product(rng: &mut ChaCha8Rng, max_states: usize) -> ProductTree {
    let n = rng.gen_range(1..=max_states);
    let density = rng.gen_range(0.25..0.7);
    let table = random_table(rng, n, &BINARY_PAIRS, density);
    ProductTree::new(RegularTree::from_table(BINARY_PAIRS, Some(0), table).unwrap())
}

pub fn random_word(rng: &mut ChaCha8Rng, alphabet: u32, max_prefix: usize, max_period: usize) -> UPWord<u32> {
    let p = rng.gen_range(0..=max_prefix);
    let q = rng.gen_range(1..=max_period);
    let prefix = (0..p).map(|_| rng.gen_range(0..alphabet)).collect();
    let period = (0..q).map(|_| rng.gen_range(0..alphabet)).collect();
    UPWord::new(prefix, period).unwrap()
}

pub fn random_set(rng: &mut ChaCha8Rng, r: u32) -> ClopenSet {
    ClopenSet::from_indices(r, (0..1u64 << r).filter(|_| rng.gen_bool(0.6))).unwrap()
}

pub fn random_scheme(rng: &mut ChaCha8Rng, d: usize, b: u32, r: u32) -> Scheme {
    let entries = sequences_upto(b, d).into_iter().map(|k| (k, random_set(rng, r))).collect();
    Scheme::new(d, b, entries).unwrap()
}

pub fn random_nested(rng: &mut ChaCha8Rng, d: usize, b: u32, d2: usize, b2: u32, r: u32) -> NestedScheme {
    let inner = sequences_upto(b, d).into_iter().map(|k| (k, random_scheme(rng, d2, b2, r))).collect();
    NestedScheme::new(d, b, inner).unwrap()
}

/// Every word of length exactly `len` over `0..alphabet`.
pub fn words(alphabet: u32, len: usize) -> Vec<Seq> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..alphabet).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

/// States with an infinite path: a path of length `|Q|` repeats a state.
pub fn live_states<L: dst_core::tree::Label>(t: &RegularTree<L>) -> Vec<bool> {
    let n = t.num_states();
    let mut can = vec![true; n];
    for _ in 0..n {
        can = (0..n).map(|q| t.edges(q).values().any(|&c| can[c])).collect();
    }
    can
}

/// The section `T^x` flattened to (state, lasso position) pairs, explored
/// without using the library's section construction.
pub struct Section<'a> {
    pub t: &'a RegularTree<Pair>,
    pub x: &'a UPWord<u32>,
}

impl Section<'_> {
    pub fn size(&self) -> usize {
        self.t.num_states() * self.x.lasso_len()
    }

    fn succ(&self, q: usize, i: usize) -> Vec<(u32, usize)> {
        let a = self.x.at(i);
        self.t
            .edges(q)
            .iter()
            .filter(|((xa, _), _)| *xa == a)
            .map(|(&(_, y), &c)| (y, c))
            .collect()
    }

    /// T-states reachable along `x↾n` for each `n ≤ depth`.
    pub fn levels(&self, depth: usize) -> Vec<BTreeSet<usize>> {
        let mut cur: BTreeSet<usize> = self.t.initial().into_iter().collect();
        let mut out = vec![cur.clone()];
        for i in 0..depth {
            cur = cur.iter().flat_map(|&q| self.succ(q, i).into_iter().map(|(_, c)| c)).collect();
            out.push(cur.clone());
        }
        out
    }

    /// Whether `(q, i)` starts an infinite path of the section: some path of
    /// length `size()` exists from it.
    pub fn live_at(&self, q: usize, i: usize) -> bool {
        let mut frontier: BTreeSet<usize> = BTreeSet::from([q]);
        for k in 0..self.size() {
            frontier = frontier.iter().flat_map(|&p| self.succ(p, i + k).into_iter().map(|(_, c)| c)).collect();
            if frontier.is_empty() {
                return false;
            }
        }
        true
    }

    /// The section contains infinite paths.
    pub fn ill_founded(&self) -> bool {
        !self.levels(self.size() + 1).last().unwrap().is_empty()
    }

    /// Height of the section tree when it is finite.
    pub fn height(&self) -> Option<usize> {
        let levels = self.levels(self.size() + 1);
        levels.iter().rposition(|l| !l.is_empty())
    }

    /// The lexicographically least `y` of length `len` whose node
    /// `(x↾len, y)` still has an infinite extension.
    pub fn least_live_prefix(&self, len: usize) -> Option<Seq> {
        let q0 = self.t.initial()?;
        self.least_from(q0, 0, len)
    }

    fn least_from(&self, q: usize, i: usize, len: usize) -> Option<Seq> {
        if i == len {
            return self.live_at(q, i).then(Vec::new);
        }
        let mut options = self.succ(q, i);
        options.sort();
        for (y, c) in options {
            if let Some(mut rest) = self.least_from(c, i + 1, len) {
                rest.insert(0, y);
                return Some(rest);
            }
        }
        None
    }
}

/// Depth-`d` prefixes of first coordinates of branches of a product tree.
pub fn brute_projection(t: &ProductTree, d: usize) -> BTreeSet<Seq> {
    let live = live_states(t.tree());
    let mut out = BTreeSet::new();
    let Some(q0) = t.tree().initial() else {
        return out;
    };
    let mut stack = vec![(q0, Vec::new())];
    while let Some((q, x)) = stack.pop() {
        if x.len() == d {
            if live[q] {
                out.insert(x);
            }
            continue;
        }
        for (&(a, _), &c) in t.tree().edges(q) {
            let mut nx = x.clone();
            nx.push(a);
            stack.push((c, nx));
        }
    }
    out
}

/// Whether an order-preserving map `σ ↦ t` extends to the subtree of `s`
/// above `sigma`: every child needs a proper extension of `t` that works.
pub fn brute_embeds(s: &FiniteTree, sigma: &[u32], t: &FiniteTree, tau: &[u32]) -> bool {
    s.children(sigma).into_iter().all(|i| {
        let mut c = sigma.to_vec();
        c.push(i);
        t.nodes()
            .filter(|u| u.len() > tau.len() && u.starts_with(tau))
            .any(|u| brute_embeds(s, &c, t, u))
    })
}

/// Every finite tree over `0..alphabet` with at most `max_nodes` nodes,
/// including the empty tree.
pub fn all_finite_trees(max_nodes: usize, alphabet: u32) -> Vec<FiniteTree> {
    let mut layer: BTreeSet<BTreeSet<Seq>> = BTreeSet::from([BTreeSet::from([Vec::new()])]);
    let mut all = vec![FiniteTree::empty()];
    for _ in 0..max_nodes {
        let mut next = BTreeSet::new();
        for t in &layer {
            all.push(FiniteTree::new(t.iter().cloned()).unwrap());
            if t.len() == max_nodes {
                continue;
            }
            for s in t {
                for a in 0..alphabet {
                    let mut c = s.clone();
                    c.push(a);
                    if !t.contains(&c) {
                        let mut u = t.clone();
                        u.insert(c);
                        next.insert(u);
                    }
                }
            }
        }
        layer = next;
    }
    all
}
