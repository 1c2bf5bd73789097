//! Suslin's operation on bounded schemes of clopen subsets of Cantor space.
//!
//! A scheme of depth `d` and branching `b` assigns a clopen set to every
//! sequence in `b^{≤d}`; longer sequences reuse the entry of their length-`d`
//! prefix. Under that convention
//! `𝒜(C) = ⋃_{f ∈ b^d} ⋂_{k ≤ d} C_{f↾k}`, a finite computation.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use thiserror::Error;

use crate::analytic::{project_closed, AnalyticError, Budget, ProductTree};
use crate::coding::{pair, unpair};
use crate::tree::Seq;

/// Largest supported resolution; a clopen set stores `2^r` bits.
pub const MAX_RESOLUTION: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuslinError {
    #[error("resolution {0} exceeds the maximum of {MAX_RESOLUTION}")]
    ResolutionTooLarge(u32),
    #[error("cell {cell:?} does not have length {resolution}")]
    BadCell { cell: String, resolution: u32 },
    #[error("scheme has no entry for {0:?}")]
    MissingEntry(Seq),
    #[error("scheme entry {0:?} is outside b^(<=d)")]
    ExtraEntry(Seq),
    #[error("inner schemes must share depth and branching")]
    NonUniform,
    #[error("alphabets must be binary")]
    NotBinary,
    #[error("resolution {resolution} is below the depth {depth}")]
    ResolutionBelowDepth { resolution: u32, depth: usize },
    #[error("materializing needs {needed} entries, over the budget of {limit}")]
    Budget { needed: u128, limit: usize },
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

/// A union of cylinders `[s]` with `s` of length exactly `resolution`. Cell
/// `s` is stored as the number with binary digits `s`, most significant
/// first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClopenSet {
    resolution: u32,
    bits: Vec<u64>,
}

impl ClopenSet {
    fn words(resolution: u32) -> usize {
        (1usize << resolution).div_ceil(64)
    }

    pub fn empty(resolution: u32) -> Result<Self, SuslinError> {
        if resolution > MAX_RESOLUTION {
            return Err(SuslinError::ResolutionTooLarge(resolution));
        }
        Ok(ClopenSet {
            resolution,
            bits: vec![0; ClopenSet::words(resolution)],
        })
    }

    pub fn full(resolution: u32) -> Result<Self, SuslinError> {
        let mut s = ClopenSet::empty(resolution)?;
        for c in 0..1u64 << resolution {
            s.insert(c);
        }
        Ok(s)
    }

    pub fn from_indices(resolution: u32, cells: impl IntoIterator<Item = u64>) -> Result<Self, SuslinError> {
        let mut s = ClopenSet::empty(resolution)?;
        for c in cells {
            if c >> resolution != 0 {
                return Err(SuslinError::BadCell {
                    cell: format!("#{c}"),
                    resolution,
                });
            }
            s.insert(c);
        }
        Ok(s)
    }

    /// Cells given as bitstrings of length `resolution`.
    pub fn from_cells<S: AsRef<str>>(resolution: u32, cells: impl IntoIterator<Item = S>) -> Result<Self, SuslinError> {
        let mut s = ClopenSet::empty(resolution)?;
        for cell in cells {
            let cell = cell.as_ref();
            let bad = || SuslinError::BadCell {
                cell: cell.to_string(),
                resolution,
            };
            if cell.len() != resolution as usize || !cell.bytes().all(|c| c == b'0' || c == b'1') {
                return Err(bad());
            }
            s.insert(cell.bytes().fold(0u64, |acc, c| acc << 1 | u64::from(c - b'0')));
        }
        Ok(s)
    }

    /// The cylinder `[prefix]` at the given resolution.
    pub fn cylinder(resolution: u32, prefix: &[u32]) -> Result<Self, SuslinError> {
        let k = prefix.len() as u32;
        if k > resolution || prefix.iter().any(|&b| b > 1) {
            return Err(SuslinError::BadCell {
                cell: prefix.iter().map(|b| b.to_string()).collect(),
                resolution,
            });
        }
        let head = prefix.iter().fold(0u64, |acc, &b| acc << 1 | u64::from(b));
        let tail = resolution - k;
        ClopenSet::from_indices(resolution, (0..1u64 << tail).map(|t| head << tail | t))
    }

    fn insert(&mut self, c: u64) {
        self.bits[(c / 64) as usize] |= 1 << (c % 64);
    }

    pub fn contains(&self, c: u64) -> bool {
        c >> self.resolution == 0 && self.bits[(c / 64) as usize] >> (c % 64) & 1 == 1
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn cells(&self) -> impl Iterator<Item = u64> + '_ {
        (0..1u64 << self.resolution).filter(|&c| self.contains(c))
    }

    pub fn cell_strings(&self) -> Vec<String> {
        let r = self.resolution as usize;
        self.cells()
            .map(|c| if r == 0 { String::new() } else { format!("{c:0r$b}") })
            .collect()
    }

    /// The same set at a finer resolution.
    pub fn refine(&self, resolution: u32) -> Result<Self, SuslinError> {
        assert!(resolution >= self.resolution, "refinement cannot coarsen");
        let extra = resolution - self.resolution;
        let cells: Vec<u64> = self.cells().collect();
        ClopenSet::from_indices(resolution, cells.into_iter().flat_map(|c| (0..1u64 << extra).map(move |t| c << extra | t)))
    }

    fn same_resolution<'a>(&'a self, other: &'a ClopenSet) -> (ClopenSet, ClopenSet) {
        let r = self.resolution.max(other.resolution);
        (self.refine(r).expect("valid"), other.refine(r).expect("valid"))
    }

    pub fn union(&self, other: &ClopenSet) -> ClopenSet {
        let (mut a, b) = self.same_resolution(other);
        a.union_with(&b);
        a
    }

    pub fn intersection(&self, other: &ClopenSet) -> ClopenSet {
        let (mut a, b) = self.same_resolution(other);
        a.intersect_with(&b);
        a
    }

    pub fn is_subset(&self, other: &ClopenSet) -> bool {
        let (a, b) = self.same_resolution(other);
        a.bits.iter().zip(&b.bits).all(|(x, y)| x & !y == 0)
    }

    fn union_with(&mut self, other: &ClopenSet) {
        debug_assert_eq!(self.resolution, other.resolution);
        for (x, y) in self.bits.iter_mut().zip(&other.bits) {
            *x |= y;
        }
    }

    fn intersect_with(&mut self, other: &ClopenSet) {
        debug_assert_eq!(self.resolution, other.resolution);
        for (x, y) in self.bits.iter_mut().zip(&other.bits) {
            *x &= y;
        }
    }
}

/// All sequences over `0..b` of length at most `d`, shortest first.
pub fn sequences_upto(b: u32, d: usize) -> Vec<Seq> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..d {
        layer = layer
            .iter()
            .flat_map(|s: &Seq| {
                (0..b).map(move |a| {
                    let mut t = s.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Read access to a scheme, explicit or computed.
pub trait SchemeView {
    /// Data that determines every entry at or beyond a sequence.
    type Key: Hash + Eq;

    fn depth(&self) -> usize;
    fn branching(&self) -> u32;
    fn resolution(&self) -> u32;
    /// `C_τ` for `τ ∈ b^{≤d}`.
    fn entry(&self, tau: &[u32]) -> ClopenSet;
    /// Two sequences of equal length with equal keys have equal entries on
    /// all corresponding extensions.
    fn residual_key(&self, tau: &[u32]) -> Self::Key;
}

/// `𝒜(C)`, evaluated as `W(τ) = C_τ ∩ ⋃_i W(τ⌢i)` with `W(f) = C_f` at
/// depth `d`, memoized on residual keys.
pub fn apply_a<S: SchemeView>(s: &S) -> ClopenSet {
    let mut memo: HashMap<(usize, S::Key), ClopenSet> = HashMap::new();
    let mut tau = Vec::with_capacity(s.depth());
    evaluate(s, &mut tau, &mut memo)
}

fn evaluate<S: SchemeView>(s: &S, tau: &mut Seq, memo: &mut HashMap<(usize, S::Key), ClopenSet>) -> ClopenSet {
    let key = (tau.len(), s.residual_key(tau));
    if let Some(w) = memo.get(&key) {
        return w.clone();
    }
    let mut w = s.entry(tau);
    if tau.len() < s.depth() && !w.is_empty() {
        let mut below = ClopenSet::empty(s.resolution()).expect("valid resolution");
        for i in 0..s.branching() {
            tau.push(i);
            below.union_with(&evaluate(s, tau, memo));
            tau.pop();
        }
        w.intersect_with(&below);
    }
    memo.insert(key, w.clone());
    w
}

/// An explicit scheme on `b^{≤d}` at a common resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    depth: usize,
    branching: u32,
    resolution: u32,
    entries: BTreeMap<Seq, ClopenSet>,
}

impl Scheme {
    /// Validates totality on `b^{≤d}`; entries of lower resolution are
    /// refined to the largest one.
    pub fn new(depth: usize, branching: u32, entries: BTreeMap<Seq, ClopenSet>) -> Result<Self, SuslinError> {
        let keys = sequences_upto(branching, depth);
        if let Some(k) = keys.iter().find(|k| !entries.contains_key(*k)) {
            return Err(SuslinError::MissingEntry(k.clone()));
        }
        if entries.len() != keys.len() {
            let extra = entries
                .keys()
                .find(|k| k.len() > depth || k.iter().any(|&a| a >= branching))
                .expect("an entry outside the domain");
            return Err(SuslinError::ExtraEntry(extra.clone()));
        }
        let resolution = entries.values().map(ClopenSet::resolution).max().unwrap_or(0);
        let entries = entries
            .into_iter()
            .map(|(k, v)| Ok((k, v.refine(resolution)?)))
            .collect::<Result<_, SuslinError>>()?;
        Ok(Scheme {
            depth,
            branching,
            resolution,
            entries,
        })
    }

    /// Every entry equal to `x`.
    pub fn constant(depth: usize, branching: u32, x: &ClopenSet) -> Scheme {
        let entries = sequences_upto(branching, depth).into_iter().map(|k| (k, x.clone())).collect();
        Scheme::new(depth, branching, entries).expect("total")
    }

    pub fn entries(&self) -> &BTreeMap<Seq, ClopenSet> {
        &self.entries
    }

    /// `C_s`, with `C_s = C_{s↾d}` beyond the depth.
    pub fn get(&self, s: &[u32]) -> &ClopenSet {
        &self.entries[&s[..s.len().min(self.depth)]]
    }

    pub fn is_pointwise_subset(&self, other: &Scheme) -> bool {
        self.entries.iter().all(|(k, v)| other.entries.get(k).is_some_and(|w| v.is_subset(w)))
    }
}

impl SchemeView for Scheme {
    type Key = Seq;

    fn depth(&self) -> usize {
        self.depth
    }

    fn branching(&self) -> u32 {
        self.branching
    }

    fn resolution(&self) -> u32 {
        self.resolution
    }

    fn entry(&self, tau: &[u32]) -> ClopenSet {
        self.get(tau).clone()
    }

    fn residual_key(&self, tau: &[u32]) -> Seq {
        tau.to_vec()
    }
}

/// Schemes `C_{s,·}` indexed by `s ∈ b^{≤d}`, sharing depth, branching and
/// resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedScheme {
    depth: usize,
    branching: u32,
    inner: BTreeMap<Seq, Scheme>,
}

impl NestedScheme {
    pub fn new(depth: usize, branching: u32, inner: BTreeMap<Seq, Scheme>) -> Result<Self, SuslinError> {
        let keys = sequences_upto(branching, depth);
        if let Some(k) = keys.iter().find(|k| !inner.contains_key(*k)) {
            return Err(SuslinError::MissingEntry(k.clone()));
        }
        if let Some(k) = inner.keys().find(|k| k.len() > depth || k.iter().any(|&a| a >= branching)) {
            return Err(SuslinError::ExtraEntry(k.clone()));
        }
        let first = inner.values().next().expect("b^(<=d) is nonempty");
        let (d2, b2) = (first.depth, first.branching);
        if inner.values().any(|s| s.depth != d2 || s.branching != b2) {
            return Err(SuslinError::NonUniform);
        }
        let r = inner.values().map(|s| s.resolution).max().unwrap_or(0);
        let inner = inner
            .into_iter()
            .map(|(k, s)| {
                let entries = s
                    .entries
                    .into_iter()
                    .map(|(t, c)| Ok((t, c.refine(r)?)))
                    .collect::<Result<_, SuslinError>>()?;
                Ok((k, Scheme { resolution: r, entries, ..s }))
            })
            .collect::<Result<_, SuslinError>>()?;
        Ok(NestedScheme { depth, branching, inner })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn branching(&self) -> u32 {
        self.branching
    }

    pub fn inner(&self) -> &BTreeMap<Seq, Scheme> {
        &self.inner
    }

    fn first_inner(&self) -> &Scheme {
        self.inner.values().next().expect("nonempty")
    }

    pub fn resolution(&self) -> u32 {
        self.first_inner().resolution
    }

    /// `𝒜` of the outer scheme `s ↦ 𝒜(C_{s,·})`.
    pub fn two_stage(&self) -> ClopenSet {
        let outer = self.inner.iter().map(|(k, s)| (k.clone(), apply_a(s))).collect();
        apply_a(&Scheme::new(self.depth, self.branching, outer).expect("total"))
    }
}

/// The flat scheme `D` with `𝒜(D) = 𝒜(s ↦ 𝒜(C_{s,·}))`.
///
/// A branch `h` of `D` codes `f` and the family `g_n` by
/// `h(k) = ⟨f(k), g_n(j)⟩` where `k = ⟨n, j⟩`. At length `k = ⟨n, m⟩`,
/// `D_τ = C_{f↾n, g_n↾m}` (indices capped at the outer and inner depths),
/// and any label decoding outside `b × b'` makes `D_τ` empty. The depth is
/// `⟨d, d'⟩`, which covers every pair `n ≤ d`, `m ≤ d'`.
#[derive(Debug, Clone)]
pub struct PairedScheme<'a> {
    nested: &'a NestedScheme,
    depth: usize,
    branching: u32,
    outer: (usize, u32),
    inner: (usize, u32),
}

/// Marks a dropped component of a residual key.
const DROPPED: u32 = u32::MAX;

pub fn idempotence_transform(n: &NestedScheme) -> PairedScheme<'_> {
    let s = n.first_inner();
    let (d, b) = (n.depth, n.branching);
    let (d2, b2) = (s.depth, s.branching);
    let top = pair(u64::from(b.saturating_sub(1)), u64::from(b2.saturating_sub(1)));
    PairedScheme {
        nested: n,
        depth: pair(d as u64, d2 as u64) as usize,
        branching: if b == 0 || b2 == 0 { 0 } else { top as u32 + 1 },
        outer: (d, b),
        inner: (d2, b2),
    }
}

impl PairedScheme<'_> {
    fn decode(&self, label: u32) -> Option<(u32, u32)> {
        let (a, c) = unpair(u64::from(label));
        (a < u64::from(self.outer.1) && c < u64::from(self.inner.1)).then_some((a as u32, c as u32))
    }

    fn decoded(&self, tau: &[u32]) -> Option<Vec<(u32, u32)>> {
        tau.iter().map(|&l| self.decode(l)).collect()
    }

    /// Number of entries of the materialized scheme.
    pub fn entry_count(&self) -> u128 {
        (0..=self.depth as u32).fold(0u128, |acc, k| acc.saturating_add(u128::from(self.branching).saturating_pow(k)))
    }

    pub fn materialize(&self, budget: Budget) -> Result<Scheme, SuslinError> {
        let needed = self.entry_count();
        if needed > budget.max_states as u128 {
            return Err(SuslinError::Budget {
                needed,
                limit: budget.max_states,
            });
        }
        let entries = sequences_upto(self.branching, self.depth)
            .into_iter()
            .map(|k| {
                let e = self.entry(&k);
                (k, e)
            })
            .collect();
        Scheme::new(self.depth, self.branching, entries)
    }
}

impl SchemeView for PairedScheme<'_> {
    type Key = Vec<(u32, u32)>;

    fn depth(&self) -> usize {
        self.depth
    }

    fn branching(&self) -> u32 {
        self.branching
    }

    fn resolution(&self) -> u32 {
        self.nested.resolution()
    }

    fn entry(&self, tau: &[u32]) -> ClopenSet {
        let Some(h) = self.decoded(tau) else {
            return ClopenSet::empty(self.resolution()).expect("valid");
        };
        let (n, m) = unpair(tau.len() as u64);
        let f: Seq = h[..(n as usize).min(self.outer.0)].iter().map(|p| p.0).collect();
        let g: Seq = (0..m.min(self.inner.0 as u64)).map(|j| h[pair(n, j) as usize].1).collect();
        self.nested.inner[&f].entry(&g)
    }

    fn residual_key(&self, tau: &[u32]) -> Vec<(u32, u32)> {
        let Some(h) = self.decoded(tau) else {
            return vec![(DROPPED, DROPPED)];
        };
        h.into_iter()
            .enumerate()
            .map(|(k, (a, c))| {
                let (_, j) = unpair(k as u64);
                let a = if k < self.outer.0 { a } else { DROPPED };
                let c = if j < self.inner.0 as u64 { c } else { DROPPED };
                (a, c)
            })
            .collect()
    }
}

/// The scheme `C_s` = depth-`r` cells of the projection of the branches
/// whose second coordinate extends `s`, for `s ∈ 2^{≤d}`.
pub fn scheme_from_closed(t: &ProductTree, d: usize, r: u32, budget: Budget) -> Result<Scheme, SuslinError> {
    if t.x_alphabet().iter().chain(&t.y_alphabet()).any(|&a| a > 1) {
        return Err(SuslinError::NotBinary);
    }
    if (r as usize) < d {
        return Err(SuslinError::ResolutionBelowDepth { resolution: r, depth: d });
    }
    let mut entries = BTreeMap::new();
    for s in sequences_upto(2, d) {
        let proj = project_closed(&t.restrict_y_prefix(&s), budget)?;
        entries.insert(s, projection_cells(&proj, r)?);
    }
    Scheme::new(d, 2, entries)
}

/// The cells `[s]`, `lh(s) = r`, meeting a closed subset of `2^ω`.
pub fn projection_cells(t: &crate::tree::RegularTree<u32>, r: u32) -> Result<ClopenSet, SuslinError> {
    let window = t.branches_upto(r as usize, usize::MAX);
    let cells = window
        .nodes
        .iter()
        .map(|s| s.iter().fold(0u64, |acc, &b| acc << 1 | u64::from(b)));
    ClopenSet::from_indices(r, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::RegularTree;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(r: u32, cells: &[&str]) -> ClopenSet {
        ClopenSet::from_cells(r, cells).unwrap()
    }

    fn scheme(d: usize, b: u32, entries: &[(&[u32], ClopenSet)]) -> Scheme {
        Scheme::new(d, b, entries.iter().map(|(k, v)| (k.to_vec(), v.clone())).collect()).unwrap()
    }

    /// `⋃_{f ∈ b^d} ⋂_{k ≤ d} C_{f↾k}` by enumeration.
    fn brute_apply<S: SchemeView>(s: &S) -> ClopenSet {
        let mut out = ClopenSet::empty(s.resolution()).unwrap();
        for f in sequences_upto(s.branching(), s.depth()).into_iter().filter(|f| f.len() == s.depth()) {
            let mut x = ClopenSet::full(s.resolution()).unwrap();
            for k in 0..=f.len() {
                x = x.intersection(&s.entry(&f[..k]));
            }
            out = out.union(&x);
        }
        out
    }

    fn random_set(rng: &mut ChaCha8Rng, r: u32) -> ClopenSet {
        ClopenSet::from_indices(r, (0..1u64 << r).filter(|_| rng.gen_bool(0.6))).unwrap()
    }

    fn random_scheme(rng: &mut ChaCha8Rng, d: usize, b: u32, r: u32) -> Scheme {
        let entries = sequences_upto(b, d).into_iter().map(|k| (k, random_set(rng, r))).collect();
        Scheme::new(d, b, entries).unwrap()
    }

    fn random_nested(rng: &mut ChaCha8Rng, d: usize, b: u32, d2: usize, b2: u32, r: u32) -> NestedScheme {
        let inner = sequences_upto(b, d).into_iter().map(|k| (k, random_scheme(rng, d2, b2, r))).collect();
        NestedScheme::new(d, b, inner).unwrap()
    }

    #[test]
    fn clopen_cells() {
        let x = set(3, &["010", "111"]);
        assert_eq!(x.cell_strings(), vec!["010", "111"]);
        assert!(x.contains(2));
        assert_eq!(ClopenSet::cylinder(2, &[1]).unwrap(), set(2, &["10", "11"]));
        assert_eq!(set(1, &["1"]).refine(2).unwrap(), set(2, &["10", "11"]));
        assert!(ClopenSet::from_cells(2, ["1"]).is_err());
        assert!(ClopenSet::from_cells(2, ["12"]).is_err());
        assert_eq!(ClopenSet::full(0).unwrap().cell_strings(), vec![""]);
    }

    #[test]
    fn apply_examples() {
        let full = ClopenSet::full(1).unwrap();
        let s = scheme(1, 2, &[(&[], full.clone()), (&[0], set(1, &["0"])), (&[1], set(1, &["1"]))]);
        assert_eq!(apply_a(&s), full);
        let s = scheme(1, 2, &[(&[], full), (&[0], set(1, &[])), (&[1], set(1, &["1"]))]);
        assert_eq!(apply_a(&s), set(1, &["1"]));
    }

    #[test]
    fn totality_is_checked() {
        let full = ClopenSet::full(1).unwrap();
        let missing = Scheme::new(1, 2, BTreeMap::from([(vec![], full.clone()), (vec![0], full.clone())]));
        assert_eq!(missing, Err(SuslinError::MissingEntry(vec![1])));
        let extra = Scheme::new(0, 2, BTreeMap::from([(vec![], full.clone()), (vec![5], full)]));
        assert_eq!(extra, Err(SuslinError::ExtraEntry(vec![5])));
    }

    #[test]
    fn mixed_resolutions_are_refined() {
        let s = scheme(1, 1, &[(&[], set(1, &["1"])), (&[0], set(2, &["11", "01"]))]);
        assert_eq!(apply_a(&s), set(2, &["11"]));
    }

    #[test]
    fn apply_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (d, b, r) = (rng.gen_range(0..=3), rng.gen_range(1..=3), rng.gen_range(0..=4));
            let s = random_scheme(&mut rng, d, b, r);
            assert_eq!(apply_a(&s), brute_apply(&s));
        }
    }

    #[test]
    fn constant_scheme_is_fixed() {
        let x = set(3, &["000", "101", "110"]);
        assert_eq!(apply_a(&Scheme::constant(3, 2, &x)), x);
    }

    #[test]
    fn transform_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = random_nested(&mut rng, 2, 2, 2, 2, 2);
        let p = idempotence_transform(&n);
        assert_eq!(p.depth(), 12);
        assert_eq!(p.branching(), 5);
        // label 3 = ⟨2,0⟩ decodes outside 2 × 2
        assert!(p.entry(&[3]).is_empty());
    }

    #[test]
    fn transform_agrees_with_two_stage() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let n = random_nested(&mut rng, 1, 2, 1, 2, 2);
            let p = idempotence_transform(&n);
            assert_eq!(apply_a(&p), n.two_stage());
            // memoization does not change the result
            assert_eq!(apply_a(&p), brute_apply(&p));
        }
        for _ in 0..10 {
            let n = random_nested(&mut rng, 2, 2, 2, 2, 3);
            assert_eq!(apply_a(&idempotence_transform(&n)), n.two_stage());
        }
    }

    #[test]
    fn transform_of_full_inner_is_outer() {
        let full = ClopenSet::full(2).unwrap();
        let inner = Scheme::constant(1, 2, &full);
        let n = NestedScheme::new(1, 2, sequences_upto(2, 1).into_iter().map(|k| (k, inner.clone())).collect()).unwrap();
        assert_eq!(apply_a(&idempotence_transform(&n)), full);
    }

    #[test]
    fn materialize_small_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = random_nested(&mut rng, 1, 2, 1, 1, 2);
        let p = idempotence_transform(&n);
        let flat = p.materialize(Budget::default()).unwrap();
        assert_eq!(apply_a(&flat), apply_a(&p));
        let big = random_nested(&mut rng, 2, 2, 2, 2, 1);
        assert!(idempotence_transform(&big).materialize(Budget::default()).is_err());
    }

    #[test]
    fn bridge_examples() {
        let eq = ProductTree(RegularTree::from_edges("q", [("q", (0u32, 0u32), "q"), ("q", (1, 1), "q")]).unwrap());
        let s = scheme_from_closed(&eq, 1, 2, Budget::default()).unwrap();
        assert_eq!(s.get(&[0]), &set(2, &["00", "01"]));
        assert_eq!(s.get(&[1]), &set(2, &["10", "11"]));
        assert_eq!(apply_a(&s), ClopenSet::full(2).unwrap());

        let yconst = ProductTree(RegularTree::from_edges("q", [("q", (0u32, 0u32), "q"), ("q", (1, 0), "q")]).unwrap());
        let s = scheme_from_closed(&yconst, 1, 2, Budget::default()).unwrap();
        assert!(s.get(&[1]).is_empty());
        assert_eq!(scheme_from_closed(&yconst, 3, 2, Budget::default()).unwrap_err(), SuslinError::ResolutionBelowDepth { resolution: 2, depth: 3 });
    }
}
