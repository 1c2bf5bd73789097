//! Closed sets `[T]` of regular trees: Cantor-Bendixson analysis, the
//! perfect set dichotomy, leftmost branches and Boolean operations.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::tree::{Label, RegularTree, UPWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosedSetError {
    #[error("the tree has no infinite branch")]
    WellFounded,
    #[error("the closed set is not perfect")]
    NotPerfect,
    #[error("argument is not a binary sequence")]
    NotBinary,
    #[error("the two trees have different alphabets")]
    AlphabetMismatch,
}

/// The perfect kernel of `[T]`, a sample of the remaining countably many
/// branches, and the number of derivative steps taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CBDecomposition<L> {
    pub kernel: RegularTree<L>,
    pub scattered_sample: Vec<UPWord<L>>,
    /// Every scattered branch is in the sample.
    pub sample_complete: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dichotomy<L> {
    /// `[T]` is countable; `witnesses` lists its branches, all of them when
    /// `complete`.
    Countable { witnesses: Vec<UPWord<L>>, complete: bool },
    /// `[T]` contains the perfect set `[kernel]`.
    Perfect(RegularTree<L>),
}

/// One derivative step on a state mask of a pruned automaton: drop the
/// states that cannot reach a splitting state, then prune again.
fn derive_mask<L: Label>(t: &RegularTree<L>, mask: &[bool]) -> Vec<bool> {
    let n = t.num_states();
    let inside = |q: usize| t.edges(q).values().filter(|&&c| mask[c]).count();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in (0..n).filter(|&q| mask[q]) {
        for &c in t.edges(q).values().filter(|&&c| mask[c]) {
            preds[c].push(q);
        }
    }
    let mut keep = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&q| mask[q] && inside(q) >= 2).collect();
    for &q in &queue {
        keep[q] = true;
    }
    while let Some(q) = queue.pop_front() {
        for &p in &preds[q] {
            if !keep[p] {
                keep[p] = true;
                queue.push_back(p);
            }
        }
    }
    prune_mask(t, &keep)
}

/// Reachable-from-the-root and live inside `mask`.
fn prune_mask<L: Label>(t: &RegularTree<L>, mask: &[bool]) -> Vec<bool> {
    let live = t.live_within(mask);
    let mut keep = vec![false; t.num_states()];
    let mut stack: Vec<usize> = t.initial().filter(|&q| live[q]).into_iter().collect();
    while let Some(q) = stack.pop() {
        if std::mem::replace(&mut keep[q], true) {
            continue;
        }
        stack.extend(t.edges(q).values().copied().filter(|&c| live[c] && !keep[c]));
    }
    keep
}

fn restrict<L: Label>(t: &RegularTree<L>, mask: &[bool]) -> RegularTree<L> {
    let r = t.induced(mask);
    if r.initial().is_none() {
        RegularTree::empty(t.alphabet().iter().copied())
    } else {
        r
    }
}

/// Removes the isolated branches of `[T]`.
pub fn cb_derivative<L: Label>(t: &RegularTree<L>) -> RegularTree<L> {
    let p = t.prune();
    let all = vec![true; p.num_states()];
    restrict(&p, &derive_mask(&p, &all))
}

/// Kernel mask over the states of a pruned automaton, and the step count.
fn kernel_mask<L: Label>(p: &RegularTree<L>) -> (Vec<bool>, usize) {
    let mut mask = prune_mask(p, &vec![true; p.num_states()]);
    let mut iterations = 0;
    while mask.iter().any(|&b| b) {
        let next = derive_mask(p, &mask);
        iterations += 1;
        if next == mask {
            break;
        }
        mask = next;
    }
    (mask, iterations)
}

/// Iterates the derivative to its fixpoint. `limit` caps the scattered sample.
pub fn cb_decompose<L: Label>(t: &RegularTree<L>, limit: usize) -> CBDecomposition<L> {
    let p = t.prune();
    let (mask, iterations) = kernel_mask(&p);
    let (scattered_sample, sample_complete) = scattered_branches(&p, &mask, limit);
    CBDecomposition {
        kernel: restrict(&p, &mask),
        scattered_sample,
        sample_complete,
        iterations,
    }
}

/// Branches of the pruned automaton `p` that leave the kernel states, by
/// length-lexicographic order of the point where they enter their final
/// cycle. Outside the kernel every cyclic component is a simple cycle, so a
/// branch is fixed by that entry point.
fn scattered_branches<L: Label>(p: &RegularTree<L>, kernel: &[bool], limit: usize) -> (Vec<UPWord<L>>, bool) {
    let Some(q0) = p.initial() else {
        return (Vec::new(), true);
    };
    let n = p.num_states();
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for q in 0..n {
        for &c in p.edges(q).values() {
            g.add_edge(nodes[q], nodes[c], ());
        }
    }
    let mut component = vec![usize::MAX; n];
    let mut cyclic = Vec::new();
    for (i, scc) in tarjan_scc(&g).into_iter().enumerate() {
        let members: Vec<usize> = scc.iter().map(|x| x.index()).collect();
        for &q in &members {
            component[q] = i;
        }
        let has_cycle = members.len() > 1 || p.edges(members[0]).values().any(|&c| c == members[0]);
        cyclic.push(has_cycle && !kernel[members[0]]);
    }
    let is_entry = |from: Option<usize>, to: usize| cyclic[component[to]] && from.is_none_or(|f| component[f] != component[to]);
    // useful[q]: some entry edge is reachable from q
    let mut useful = vec![false; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue = VecDeque::new();
    for (q, u) in useful.iter_mut().enumerate() {
        for &c in p.edges(q).values() {
            preds[c].push(q);
            if is_entry(Some(q), c) && !*u {
                *u = true;
                queue.push_back(q);
            }
        }
    }
    while let Some(q) = queue.pop_front() {
        for &r in &preds[q] {
            if !useful[r] {
                useful[r] = true;
                queue.push_back(r);
            }
        }
    }
    let cycle_from = |start: usize| -> Vec<L> {
        let mut labels = Vec::new();
        let mut q = start;
        loop {
            let (&a, &c) = p
                .edges(q)
                .iter()
                .find(|(_, &c)| component[c] == component[start])
                .expect("cyclic component");
            labels.push(a);
            q = c;
            if q == start {
                return labels;
            }
        }
    };
    let mut out = Vec::new();
    if is_entry(None, q0) {
        out.push(UPWord::new(Vec::new(), cycle_from(q0)).expect("nonempty cycle"));
    }
    let mut frontier: VecDeque<(Vec<L>, usize)> = VecDeque::new();
    if useful[q0] {
        frontier.push_back((Vec::new(), q0));
    }
    while let Some((w, q)) = frontier.pop_front() {
        for (&a, &c) in p.edges(q) {
            let mut wa = w.clone();
            wa.push(a);
            if is_entry(Some(q), c) {
                if out.len() == limit {
                    return (out, false);
                }
                out.push(UPWord::new(wa.clone(), cycle_from(c)).expect("nonempty cycle"));
            }
            if useful[c] {
                frontier.push_back((wa, c));
            }
        }
    }
    (out, true)
}

/// Nonempty and without isolated branches.
pub fn is_perfect<L: Label>(t: &RegularTree<L>) -> bool {
    let p = t.prune();
    let all = prune_mask(&p, &vec![true; p.num_states()]);
    all.iter().any(|&b| b) && derive_mask(&p, &all) == all
}

pub fn dichotomy<L: Label>(t: &RegularTree<L>, limit: usize) -> Dichotomy<L> {
    let d = cb_decompose(t, limit);
    if d.kernel.is_empty() {
        Dichotomy::Countable {
            witnesses: d.scattered_sample,
            complete: d.sample_complete,
        }
    } else {
        Dichotomy::Perfect(d.kernel)
    }
}

/// The node `φ(s)` of a perfect tree: least labels up to a splitting node,
/// then for each bit the least (0) or second least (1) child followed again
/// by least labels up to the next splitting node.
pub fn cantor_embed<L: Label>(t: &RegularTree<L>, s: &[u32]) -> Result<Vec<L>, ClosedSetError> {
    if !is_perfect(t) {
        return Err(ClosedSetError::NotPerfect);
    }
    if s.iter().any(|&b| b > 1) {
        return Err(ClosedSetError::NotBinary);
    }
    let p = t.prune();
    let mut q = p.initial().expect("perfect trees are nonempty");
    let mut node = Vec::new();
    let run_to_split = |q: &mut usize, node: &mut Vec<L>| {
        while p.edges(*q).len() < 2 {
            let (&a, &c) = p.edges(*q).iter().next().expect("pruned");
            node.push(a);
            *q = c;
        }
    };
    run_to_split(&mut q, &mut node);
    for &b in s {
        let (&a, &c) = p.edges(q).iter().nth(b as usize).expect("splitting node");
        node.push(a);
        q = c;
        run_to_split(&mut q, &mut node);
    }
    Ok(node)
}

/// The lexicographically least branch of `[T]`.
pub fn leftmost_branch<L: Label>(t: &RegularTree<L>) -> Result<UPWord<L>, ClosedSetError> {
    let p = t.prune();
    let mut q = p.initial().ok_or(ClosedSetError::WellFounded)?;
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut labels = Vec::new();
    while let std::collections::hash_map::Entry::Vacant(e) = seen.entry(q) {
        e.insert(labels.len());
        let (&a, &c) = p.edges(q).iter().next().expect("pruned");
        labels.push(a);
        q = c;
    }
    let start = seen[&q];
    let period = labels.split_off(start);
    Ok(UPWord::new(labels, period).expect("nonempty cycle").canonical())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Intersect,
    Union,
}

/// `[S] ∩ [T]` or `[S] ∪ [T]` as a pruned product automaton.
pub fn set_op<L: Label>(s: &RegularTree<L>, t: &RegularTree<L>, op: SetOp) -> Result<RegularTree<L>, ClosedSetError> {
    if s.alphabet() != t.alphabet() {
        return Err(ClosedSetError::AlphabetMismatch);
    }
    let alphabet: BTreeSet<L> = s.alphabet().clone();
    let start = (s.initial(), t.initial());
    let admissible = |pair: &(Option<usize>, Option<usize>)| match op {
        SetOp::Intersect => pair.0.is_some() && pair.1.is_some(),
        SetOp::Union => pair.0.is_some() || pair.1.is_some(),
    };
    if !admissible(&start) {
        return Ok(RegularTree::empty(alphabet));
    }
    let mut index: HashMap<(Option<usize>, Option<usize>), usize> = HashMap::from([(start, 0)]);
    let mut order = vec![start];
    let mut edges: Vec<BTreeMap<L, usize>> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (a, b) = order[i];
        let mut row = BTreeMap::new();
        for &x in &alphabet {
            let next = (a.and_then(|q| s.step(q, x)), b.and_then(|q| t.step(q, x)));
            if !admissible(&next) {
                continue;
            }
            let k = *index.entry(next).or_insert_with(|| {
                order.push(next);
                order.len() - 1
            });
            row.insert(x, k);
        }
        edges.push(row);
        i += 1;
    }
    let name = |q: Option<usize>, t: &RegularTree<L>| q.map_or("-".to_string(), |q| t.state_name(q).to_string());
    let names = order.iter().map(|&(a, b)| format!("({},{})", name(a, s), name(b, t))).collect();
    let product = RegularTree::from_parts(alphabet, names, edges, Some(0)).expect("well-formed product");
    Ok(product.prune())
}

pub fn intersect<L: Label>(s: &RegularTree<L>, t: &RegularTree<L>) -> Result<RegularTree<L>, ClosedSetError> {
    set_op(s, t, SetOp::Intersect)
}

pub fn union<L: Label>(s: &RegularTree<L>, t: &RegularTree<L>) -> Result<RegularTree<L>, ClosedSetError> {
    set_op(s, t, SetOp::Union)
}

/// `[S] = [T]`, by a bisimulation between the pruned automata.
pub fn equal_sets<L: Label>(s: &RegularTree<L>, t: &RegularTree<L>) -> Result<bool, ClosedSetError> {
    if s.alphabet() != t.alphabet() {
        return Err(ClosedSetError::AlphabetMismatch);
    }
    let (ps, pt) = (s.prune(), t.prune());
    let (a, b) = match (ps.initial(), pt.initial()) {
        (None, None) => return Ok(true),
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(false),
    };
    let mut seen = BTreeSet::from([(a, b)]);
    let mut queue = VecDeque::from([(a, b)]);
    while let Some((p, q)) = queue.pop_front() {
        let (es, et) = (ps.edges(p), pt.edges(q));
        if !es.keys().eq(et.keys()) {
            return Ok(false);
        }
        for (x, &c) in es {
            let pair = (c, et[x]);
            if seen.insert(pair) {
                queue.push_back(pair);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full2() -> RegularTree<u32> {
        RegularTree::full([0, 1])
    }

    fn loop0() -> RegularTree<u32> {
        RegularTree::from_edges("q", [("q", 0u32, "q")]).unwrap()
    }

    /// `{0^n 1 0^ω} ∪ {0^ω}`.
    fn comb() -> RegularTree<u32> {
        RegularTree::from_edges("a", [("a", 0u32, "a"), ("a", 1, "b"), ("b", 0, "b")]).unwrap()
    }

    fn w(prefix: &[u32], period: &[u32]) -> UPWord<u32> {
        UPWord::new(prefix.to_vec(), period.to_vec()).unwrap()
    }

    /// Depth-`d` nodes of the derivative computed from the branch definition
    /// on a truncation: a depth-`d` prefix survives if some extension to
    /// depth `d + k` still has two incomparable extensions at depth `D`.
    fn brute_derivative_nodes(t: &RegularTree<u32>, d: usize, depth: usize) -> BTreeSet<Vec<u32>> {
        let deep: Vec<Vec<u32>> = t.branches_upto(depth, usize::MAX).nodes;
        let mut out = BTreeSet::new();
        for s in &deep {
            let pre = &s[..d];
            let splits = (d..depth).any(|k| {
                let ext: BTreeSet<u32> = deep.iter().filter(|u| u.starts_with(&s[..k])).map(|u| u[k]).collect();
                ext.len() >= 2
            });
            if splits {
                out.insert(pre.to_vec());
            }
        }
        out
    }

    #[test]
    fn derivative_examples() {
        assert!(equal_sets(&cb_derivative(&full2()), &full2()).unwrap());
        assert!(cb_derivative(&loop0()).is_empty());
        let d = cb_derivative(&comb());
        assert!(equal_sets(&d, &loop0().with_alphabet([0, 1]).unwrap()).unwrap());
        // depth-4 nodes of the derivative against the truncation at depth 12
        let brute = brute_derivative_nodes(&comb(), 4, 12);
        let got: BTreeSet<Vec<u32>> = d.branches_upto(4, 100).nodes.into_iter().collect();
        assert_eq!(got, brute);
    }

    #[test]
    fn decomposition_examples() {
        let d = cb_decompose(&full2(), 10);
        assert_eq!(d.iterations, 1);
        assert!(d.scattered_sample.is_empty());
        assert!(equal_sets(&d.kernel, &full2()).unwrap());

        let d = cb_decompose(&loop0(), 10);
        assert!(d.kernel.is_empty());
        assert_eq!(d.iterations, 1);
        assert_eq!(d.scattered_sample, vec![w(&[], &[0])]);
        assert!(d.sample_complete);

        let d = cb_decompose(&comb(), 6);
        assert!(d.kernel.is_empty());
        assert_eq!(d.iterations, 2);
        assert!(!d.sample_complete);
        assert!(d.scattered_sample.contains(&w(&[], &[0])));
        assert!(d.scattered_sample.iter().any(|x| x.same_word(&w(&[0, 0, 1], &[0]))));
    }

    #[test]
    fn scattered_part_of_a_mixed_set() {
        // full binary tree under 0, lone branch 1^ω under 1
        let t = RegularTree::from_edges("r", [("r", 0u32, "f"), ("f", 0, "f"), ("f", 1, "f"), ("r", 1, "l"), ("l", 1, "l")])
            .unwrap();
        assert!(!is_perfect(&t));
        let d = cb_decompose(&t, 10);
        assert_eq!(d.scattered_sample, vec![w(&[1], &[1])]);
        assert!(d.sample_complete);
        assert!(is_perfect(&d.kernel));
    }

    #[test]
    fn perfectness() {
        assert!(is_perfect(&full2()));
        assert!(!is_perfect(&loop0()));
        assert!(!is_perfect(&RegularTree::<u32>::empty([0])));
    }

    #[test]
    fn dichotomy_examples() {
        assert!(matches!(dichotomy(&full2(), 5), Dichotomy::Perfect(_)));
        assert_eq!(
            dichotomy(&loop0(), 5),
            Dichotomy::Countable {
                witnesses: vec![w(&[], &[0])],
                complete: true
            }
        );
        let Dichotomy::Countable { witnesses, complete } = dichotomy(&comb(), 8) else {
            panic!("comb is countable")
        };
        assert_eq!(witnesses.len(), 8);
        assert!(!complete);
    }

    #[test]
    fn cantor_embedding() {
        assert_eq!(cantor_embed(&full2(), &[1, 0, 1]).unwrap(), vec![1, 0, 1]);
        // splitting only at even depths
        let even = RegularTree::from_edges("e", [("e", 0u32, "o"), ("e", 1, "o"), ("o", 0, "e")]).unwrap();
        assert_eq!(cantor_embed(&even, &[]).unwrap(), Vec::<u32>::new());
        assert_eq!(cantor_embed(&even, &[1]).unwrap(), vec![1, 0]);
        assert_eq!(cantor_embed(&even, &[1, 0]).unwrap(), vec![1, 0, 0, 0]);
        assert_eq!(cantor_embed(&loop0(), &[0]), Err(ClosedSetError::NotPerfect));
        assert_eq!(cantor_embed(&full2(), &[2]), Err(ClosedSetError::NotBinary));
    }

    #[test]
    fn leftmost_examples() {
        assert_eq!(leftmost_branch(&full2()).unwrap(), w(&[], &[0]));
        let t = RegularTree::from_edges("a", [("a", 1u32, "b"), ("b", 0, "b"), ("b", 1, "b")]).unwrap();
        assert_eq!(leftmost_branch(&t).unwrap(), w(&[1], &[0]));
        // greedy 0 dies at depth 2
        let t = RegularTree::from_edges("a", [("a", 0u32, "b"), ("b", 0, "c"), ("a", 1, "a")]).unwrap();
        assert_eq!(leftmost_branch(&t).unwrap(), w(&[], &[1]));
        assert_eq!(leftmost_branch(&RegularTree::<u32>::empty([0])), Err(ClosedSetError::WellFounded));
    }

    #[test]
    fn boolean_operations() {
        let t = comb();
        assert!(equal_sets(&intersect(&t, &t).unwrap(), &t).unwrap());
        let single = loop0().with_alphabet([0, 1]).unwrap();
        assert!(equal_sets(&intersect(&full2(), &single).unwrap(), &single).unwrap());
        let ones = RegularTree::from_edges("q", [("q", 1u32, "q")]).unwrap().with_alphabet([0, 1]).unwrap();
        let u = union(&single, &ones).unwrap();
        assert_eq!(u.branches_upto(5, 100).nodes, vec![vec![0; 5], vec![1; 5]]);
        assert_eq!(intersect(&loop0(), &full2()), Err(ClosedSetError::AlphabetMismatch));
    }

    #[test]
    fn equality_is_denotational() {
        let t = comb();
        assert!(equal_sets(&t, &t.prune()).unwrap());
        let two_state = RegularTree::from_edges("a", [("a", 0u32, "b"), ("b", 0, "a")]).unwrap();
        assert!(equal_sets(&loop0(), &two_state).unwrap());
        assert_eq!(
            loop0().branches_upto(10, 10).nodes,
            two_state.branches_upto(10, 10).nodes
        );
        assert!(!equal_sets(&full2(), &loop0().with_alphabet([0, 1]).unwrap()).unwrap());
    }
}
