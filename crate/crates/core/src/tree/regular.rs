use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Label, TreeError, Window};

/// A tree presented by a deterministic partial automaton over a finite
/// alphabet. Its nodes are the words along which the transition path from
/// the initial state is defined, so the node set is prefix-closed.
///
/// `initial == None` denotes the empty tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularTree<L> {
    alphabet: BTreeSet<L>,
    names: Vec<String>,
    edges: Vec<BTreeMap<L, usize>>,
    initial: Option<usize>,
}

impl<L: Label> RegularTree<L> {
    /// The empty tree over `alphabet`.
    pub fn empty(alphabet: impl IntoIterator<Item = L>) -> Self {
        RegularTree {
            alphabet: alphabet.into_iter().collect(),
            names: Vec::new(),
            edges: Vec::new(),
            initial: None,
        }
    }

    /// Builds an automaton from named edges. States are created on first
    /// mention; the alphabet is the set of labels used.
    pub fn from_edges<S, I>(initial: &str, edges: I) -> Result<Self, TreeError>
    where
        S: AsRef<str>,
        I: IntoIterator<Item = (S, L, S)>,
    {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut names = Vec::new();
        let mut table: Vec<BTreeMap<L, usize>> = Vec::new();
        let mut intern = |name: &str, names: &mut Vec<String>, table: &mut Vec<BTreeMap<L, usize>>| {
            *index.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                table.push(BTreeMap::new());
                names.len() - 1
            })
        };
        let init = intern(initial, &mut names, &mut table);
        let mut alphabet = BTreeSet::new();
        for (from, label, to) in edges {
            let f = intern(from.as_ref(), &mut names, &mut table);
            let t = intern(to.as_ref(), &mut names, &mut table);
            alphabet.insert(label);
            match table[f].insert(label, t) {
                Some(old) if old != t => {
                    return Err(TreeError::Nondeterministic {
                        state: names[f].clone(),
                        label: format!("{label:?}"),
                    })
                }
                _ => {}
            }
        }
        Ok(RegularTree {
            alphabet,
            names,
            edges: table,
            initial: Some(init),
        })
    }

    /// Builds an automaton from a transition table with states `q0, q1, …`.
    pub fn from_table(
        alphabet: impl IntoIterator<Item = L>,
        initial: Option<usize>,
        edges: Vec<BTreeMap<L, usize>>,
    ) -> Result<Self, TreeError> {
        let names = (0..edges.len()).map(|i| format!("q{i}")).collect();
        RegularTree::from_parts(alphabet.into_iter().collect(), names, edges, initial)
    }

    pub(crate) fn from_parts(
        alphabet: BTreeSet<L>,
        names: Vec<String>,
        edges: Vec<BTreeMap<L, usize>>,
        initial: Option<usize>,
    ) -> Result<Self, TreeError> {
        let n = edges.len();
        if initial.is_some_and(|q| q >= n) {
            return Err(TreeError::UnknownState(format!("#{}", initial.unwrap_or(0))));
        }
        for (q, row) in edges.iter().enumerate() {
            for (label, &t) in row {
                if t >= n {
                    return Err(TreeError::UnknownState(format!("#{t}")));
                }
                if !alphabet.contains(label) {
                    return Err(TreeError::LabelOutsideAlphabet {
                        state: names[q].clone(),
                        label: format!("{label:?}"),
                    });
                }
            }
        }
        Ok(RegularTree {
            alphabet,
            names,
            edges,
            initial,
        })
    }

    /// Replaces the alphabet by a superset of the labels in use.
    pub fn with_alphabet(mut self, alphabet: impl IntoIterator<Item = L>) -> Result<Self, TreeError> {
        let alphabet: BTreeSet<L> = alphabet.into_iter().collect();
        for (q, row) in self.edges.iter().enumerate() {
            if let Some(label) = row.keys().find(|l| !alphabet.contains(l)) {
                return Err(TreeError::LabelOutsideAlphabet {
                    state: self.names[q].clone(),
                    label: format!("{label:?}"),
                });
            }
        }
        self.alphabet = alphabet;
        Ok(self)
    }

    /// One state with a self-loop on every label: all of `alphabet^ω`.
    pub fn full(alphabet: impl IntoIterator<Item = L>) -> Self {
        let alphabet: BTreeSet<L> = alphabet.into_iter().collect();
        let row = alphabet.iter().map(|&a| (a, 0)).collect();
        RegularTree {
            alphabet,
            names: vec!["q0".to_string()],
            edges: vec![row],
            initial: Some(0),
        }
    }

    pub fn alphabet(&self) -> &BTreeSet<L> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> Option<usize> {
        self.initial
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn edges(&self, q: usize) -> &BTreeMap<L, usize> {
        &self.edges[q]
    }

    pub fn step(&self, q: usize, a: L) -> Option<usize> {
        self.edges[q].get(&a).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_none()
    }

    /// The state reached along `path`, or `None` if `path` is not a node.
    pub fn state_at(&self, path: &[L]) -> Option<usize> {
        path.iter().try_fold(self.initial?, |q, &a| self.step(q, a))
    }

    pub fn contains(&self, path: &[L]) -> bool {
        self.state_at(path).is_some()
    }

    pub fn children(&self, path: &[L]) -> Vec<L> {
        self.state_at(path)
            .map(|q| self.edges[q].keys().copied().collect())
            .unwrap_or_default()
    }

    /// `T(σ)`: the same automaton with the initial state moved along `σ`.
    pub fn subtree_at(&self, sigma: &[L]) -> RegularTree<L> {
        RegularTree {
            initial: self.state_at(sigma),
            ..self.clone()
        }
    }

    /// A tree with the same node set whose initial state is `q`.
    pub fn rooted_at(&self, q: usize) -> RegularTree<L> {
        RegularTree {
            initial: Some(q),
            ..self.clone()
        }
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<usize> = self.initial.into_iter().collect();
        while let Some(q) = stack.pop() {
            if std::mem::replace(&mut seen[q], true) {
                continue;
            }
            stack.extend(self.edges[q].values().copied().filter(|&t| !seen[t]));
        }
        seen
    }

    /// States admitting an infinite path, i.e. states that reach a cycle.
    pub fn live(&self) -> Vec<bool> {
        self.live_within(&vec![true; self.num_states()])
    }

    /// The states of `allowed` admitting an infinite path inside `allowed`.
    pub(crate) fn live_within(&self, allowed: &[bool]) -> Vec<bool> {
        let n = self.num_states();
        let mut alive = allowed.to_vec();
        let mut out_degree = vec![0usize; n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for q in (0..n).filter(|&q| allowed[q]) {
            for &t in self.edges[q].values().filter(|&&t| allowed[t]) {
                out_degree[q] += 1;
                preds[t].push(q);
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&q| allowed[q] && out_degree[q] == 0).collect();
        while let Some(q) = queue.pop() {
            alive[q] = false;
            for &p in &preds[q] {
                out_degree[p] -= 1;
                if out_degree[p] == 0 && alive[p] {
                    queue.push(p);
                }
            }
        }
        alive
    }

    /// True iff `[T]` is nonempty.
    pub fn is_ill_founded(&self) -> bool {
        self.initial.is_some_and(|q| self.live()[q])
    }

    /// The sub-automaton on the states in `keep`, renumbered in order.
    /// The initial state is dropped (empty tree) if it is not kept.
    pub(crate) fn induced(&self, keep: &[bool]) -> RegularTree<L> {
        let mut index = vec![usize::MAX; self.num_states()];
        let mut names = Vec::new();
        for q in (0..self.num_states()).filter(|&q| keep[q]) {
            index[q] = names.len();
            names.push(self.names[q].clone());
        }
        let edges = (0..self.num_states())
            .filter(|&q| keep[q])
            .map(|q| {
                self.edges[q]
                    .iter()
                    .filter(|(_, &t)| keep[t])
                    .map(|(&a, &t)| (a, index[t]))
                    .collect()
            })
            .collect();
        RegularTree {
            alphabet: self.alphabet.clone(),
            names,
            edges,
            initial: self.initial.filter(|&q| keep[q]).map(|q| index[q]),
        }
    }

    /// Drops unreachable states.
    pub fn trim(&self) -> RegularTree<L> {
        self.induced(&self.reachable())
    }

    /// The largest subtree without terminal nodes: the reachable live part.
    /// `[prune(T)] = [T]`.
    pub fn prune(&self) -> RegularTree<L> {
        let reach = self.reachable();
        let live = self.live();
        let keep: Vec<bool> = reach.iter().zip(&live).map(|(&r, &l)| r && l).collect();
        let pruned = self.induced(&keep);
        if pruned.initial.is_none() {
            return RegularTree::empty(self.alphabet.iter().copied());
        }
        pruned
    }

    /// No reachable state is a dead end.
    pub fn is_pruned(&self) -> bool {
        let live = self.live();
        self.reachable()
            .iter()
            .zip(&live)
            .all(|(&r, &l)| !r || l)
    }

    /// `T_σ`: nodes comparable with `σ`.
    pub fn restrict_comparable(&self, sigma: &[L]) -> Result<RegularTree<L>, TreeError> {
        if !self.contains(sigma) {
            return Err(TreeError::NotANode);
        }
        let base = sigma.len();
        let mut names: Vec<String> = (0..sigma.len()).map(|k| format!("sigma{k}")).collect();
        let mut edges: Vec<BTreeMap<L, usize>> = Vec::with_capacity(base + self.num_states());
        let end = self.state_at(sigma).expect("sigma is a node");
        for (k, &a) in sigma.iter().enumerate() {
            let target = if k + 1 < sigma.len() { k + 1 } else { base + end };
            edges.push(BTreeMap::from([(a, target)]));
        }
        names.extend(self.names.iter().cloned());
        edges.extend(
            self.edges
                .iter()
                .map(|row| row.iter().map(|(&a, &t)| (a, base + t)).collect()),
        );
        let initial = if sigma.is_empty() { base + end } else { 0 };
        Ok(RegularTree {
            alphabet: self.alphabet.clone(),
            names,
            edges,
            initial: Some(initial),
        }
        .trim())
    }

    pub fn is_splitting(&self, path: &[L]) -> Result<bool, TreeError> {
        let q = self.state_at(path).ok_or(TreeError::NotANode)?;
        Ok(self.edges[q].len() >= 2)
    }

    /// `reach[k][q]`: a path of length `k` starts at `q`.
    fn depth_reach(&self, depth: usize) -> Vec<Vec<bool>> {
        let n = self.num_states();
        let mut reach = vec![vec![true; n]];
        for k in 1..=depth {
            let prev = &reach[k - 1];
            let row = (0..n)
                .map(|q| self.edges[q].values().any(|&t| prev[t]))
                .collect();
            reach.push(row);
        }
        reach
    }

    /// The nodes of length `depth`, lexicographically, at most `limit`.
    pub fn nodes_at_depth(&self, depth: usize, limit: usize) -> Window<L> {
        let mut window = Window {
            nodes: Vec::new(),
            truncated: false,
        };
        let Some(q0) = self.initial else {
            return window;
        };
        let reach = self.depth_reach(depth);
        if !reach[depth][q0] {
            return window;
        }
        let mut path = Vec::with_capacity(depth);
        self.collect_depth(q0, depth, &reach, limit, &mut path, &mut window);
        window
    }

    fn collect_depth(
        &self,
        q: usize,
        remaining: usize,
        reach: &[Vec<bool>],
        limit: usize,
        path: &mut Vec<L>,
        window: &mut Window<L>,
    ) {
        if window.truncated {
            return;
        }
        if remaining == 0 {
            if window.nodes.len() == limit {
                window.truncated = true;
            } else {
                window.nodes.push(path.clone());
            }
            return;
        }
        for (&a, &t) in &self.edges[q] {
            if reach[remaining - 1][t] {
                path.push(a);
                self.collect_depth(t, remaining - 1, reach, limit, path, window);
                path.pop();
            }
        }
    }

    /// Depth-`depth` prefixes of the branches of `T`, i.e. the depth-`depth`
    /// nodes of `prune(T)`.
    pub fn branches_upto(&self, depth: usize, limit: usize) -> Window<L> {
        self.prune().nodes_at_depth(depth, limit)
    }

    /// Number of nodes of length `depth` (saturating).
    pub fn count_at_depth(&self, depth: usize) -> u128 {
        let Some(q0) = self.initial else { return 0 };
        let n = self.num_states();
        let mut counts = vec![0u128; n];
        counts[q0] = 1;
        for _ in 0..depth {
            let mut next = vec![0u128; n];
            for (q, &c) in counts.iter().enumerate().filter(|(_, &c)| c > 0) {
                for &t in self.edges[q].values() {
                    next[t] = next[t].saturating_add(c);
                }
            }
            counts = next;
        }
        counts.iter().fold(0u128, |a, &b| a.saturating_add(b))
    }

    /// The retraction `G` onto a pruned nonempty tree: a node of `T` is fixed;
    /// otherwise each step keeps the label if possible, else takes the least
    /// available label.
    pub fn retract_node(&self, s: &[L]) -> Result<Vec<L>, TreeError> {
        let q0 = self.initial.ok_or(TreeError::EmptyTree)?;
        if !self.is_pruned() {
            return Err(TreeError::NotPruned);
        }
        let mut q = q0;
        let mut image = Vec::with_capacity(s.len());
        for &i in s {
            let (a, t) = match self.edges[q].get(&i) {
                Some(&t) => (i, t),
                None => {
                    let (&a, &t) = self.edges[q].iter().next().ok_or(TreeError::NotPruned)?;
                    (a, t)
                }
            };
            image.push(a);
            q = t;
        }
        Ok(image)
    }

    /// Relabels through `f`, which must be injective on the alphabet.
    pub fn map_labels<M: Label>(&self, f: impl Fn(L) -> M) -> RegularTree<M> {
        RegularTree {
            alphabet: self.alphabet.iter().map(|&a| f(a)).collect(),
            names: self.names.clone(),
            edges: self
                .edges
                .iter()
                .map(|row| row.iter().map(|(&a, &t)| (f(a), t)).collect())
                .collect(),
            initial: self.initial,
        }
    }
}
