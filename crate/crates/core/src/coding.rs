//! Codings by naturals: the enumeration `σ_n` of finite sequences, the
//! Cantor pairing, characteristic codes of trees, and linear-order codes.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::kb::kb_compare;
use crate::tree::{FiniteTree, Seq, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error("code sets bit {child} but not bit {parent} of its prefix")]
    Incoherent { parent: u64, child: u64 },
    #[error("sequence index does not fit in 64 bits")]
    IndexOverflow,
    #[error("index {index} out of range for a code of size {size}")]
    OutOfRange { index: u64, size: u64 },
}

/// The stage of a sequence: `max(lh(s), 1 + max entry)`, and 0 for `∅`.
pub fn stage(s: &[u32]) -> u64 {
    let top = s.iter().map(|&a| u64::from(a) + 1).max().unwrap_or(0);
    top.max(s.len() as u64)
}

fn pow(base: u64, exp: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(u128::from(base))?;
    }
    Some(acc)
}

/// Number of sequences of stage at most `k`: `Σ_{l≤k} k^l`.
fn cumulative(k: u64) -> Option<u128> {
    (0..=k).try_fold(0u128, |acc, l| acc.checked_add(pow(k, l)?))
}

/// Sequences of length `len` over `{0,…,k-1}` containing `k-1` (all of them
/// when `len == k`), given the letters chosen so far.
fn completions(k: u64, remaining: u64, len: u64, seen_top: bool) -> Option<u128> {
    let all = pow(k, remaining)?;
    if seen_top || len == k {
        Some(all)
    } else {
        Some(all - pow(k - 1, remaining)?)
    }
}

/// Position of `s` in the enumeration: by stage, then length, then
/// lexicographically. A proper prefix always has a smaller index.
pub fn seq_index(s: &[u32]) -> Result<u64, CodingError> {
    let k = stage(s);
    if k == 0 {
        return Ok(0);
    }
    let len = s.len() as u64;
    let mut index = cumulative(k - 1).ok_or(CodingError::IndexOverflow)?;
    for l in 0..len {
        index = index
            .checked_add(completions(k, l, l, false).ok_or(CodingError::IndexOverflow)?)
            .ok_or(CodingError::IndexOverflow)?;
    }
    let mut seen_top = false;
    for (i, &a) in s.iter().enumerate() {
        let remaining = len - i as u64 - 1;
        for b in 0..u64::from(a) {
            let c = completions(k, remaining, len, seen_top || b == k - 1).ok_or(CodingError::IndexOverflow)?;
            index = index.checked_add(c).ok_or(CodingError::IndexOverflow)?;
        }
        seen_top |= u64::from(a) == k - 1;
    }
    u64::try_from(index).map_err(|_| CodingError::IndexOverflow)
}

/// The sequence `σ_n`.
pub fn index_seq(n: u64) -> Seq {
    let n = u128::from(n);
    let mut k = 0u64;
    while cumulative(k).expect("stages below 2^64 fit") <= n {
        k += 1;
    }
    if k == 0 {
        return Vec::new();
    }
    let mut offset = n - cumulative(k - 1).expect("fits");
    let mut len = 0u64;
    loop {
        let c = completions(k, len, len, false).expect("fits");
        if offset < c {
            break;
        }
        offset -= c;
        len += 1;
    }
    let mut s = Vec::with_capacity(len as usize);
    let mut seen_top = false;
    for i in 0..len {
        let remaining = len - i - 1;
        let mut b = 0u64;
        loop {
            let c = completions(k, remaining, len, seen_top || b == k - 1).expect("fits");
            if offset < c {
                break;
            }
            offset -= c;
            b += 1;
        }
        seen_top |= b == k - 1;
        s.push(b as u32);
    }
    s
}

/// Cantor pairing `(n+m)(n+m+1)/2 + m`.
pub fn pair(n: u64, m: u64) -> u64 {
    let s = n + m;
    s * (s + 1) / 2 + m
}

pub fn unpair(k: u64) -> (u64, u64) {
    // largest s with s(s+1)/2 ≤ k
    let mut s = (((8.0 * k as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while s * (s + 1) / 2 > k {
        s -= 1;
    }
    while (s + 1) * (s + 2) / 2 <= k {
        s += 1;
    }
    let m = k - s * (s + 1) / 2;
    (s - m, m)
}

/// Characteristic bits of a tree on `σ_0, …, σ_{N-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeCode {
    pub bits: Vec<bool>,
}

pub fn tree_to_code(t: &Tree, n: u64) -> TreeCode {
    TreeCode {
        bits: (0..n).map(|i| t.contains(&index_seq(i))).collect(),
    }
}

pub fn code_to_tree(code: &TreeCode) -> Result<FiniteTree, CodingError> {
    let mut nodes = Vec::new();
    for (i, _) in code.bits.iter().enumerate().filter(|(_, &b)| b) {
        let s = index_seq(i as u64);
        if let Some((_, parent)) = s.split_last() {
            let p = seq_index(parent)?;
            if !code.bits[p as usize] {
                return Err(CodingError::Incoherent {
                    parent: p,
                    child: i as u64,
                });
            }
        }
        nodes.push(s);
    }
    Ok(FiniteTree::new(nodes).expect("coherent codes are prefix-closed"))
}

/// A finite strict relation on `{0,…,size-1}`; `(i, j)` means `i` below `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LOCode {
    size: u64,
    pairs: BTreeSet<(u64, u64)>,
}

impl LOCode {
    pub fn new(size: u64, pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self, CodingError> {
        let pairs: BTreeSet<(u64, u64)> = pairs.into_iter().collect();
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= size || j >= size) {
            return Err(CodingError::OutOfRange {
                index: i.max(j),
                size,
            });
        }
        Ok(LOCode { size, pairs })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn below(&self, i: u64, j: u64) -> bool {
        self.pairs.contains(&(i, j))
    }

    /// Indices occurring in some pair.
    pub fn field(&self) -> BTreeSet<u64> {
        self.pairs.iter().flat_map(|&(i, j)| [i, j]).collect()
    }

    /// The reflexive characteristic matrix on the field.
    pub fn characteristic(&self) -> Vec<Vec<bool>> {
        let field = self.field();
        (0..self.size)
            .map(|i| {
                (0..self.size)
                    .map(|j| self.below(i, j) || (i == j && field.contains(&i)))
                    .collect()
            })
            .collect()
    }
}

/// Irreflexive, transitive and total on the field. A finite linear order is
/// a well-order, so this also classifies well-order codes.
pub fn is_linear_order(c: &LOCode) -> bool {
    let field: Vec<u64> = c.field().into_iter().collect();
    if field.iter().any(|&i| c.below(i, i)) {
        return false;
    }
    for &i in &field {
        for &j in &field {
            if i != j && !c.below(i, j) && !c.below(j, i) {
                return false;
            }
            if c.below(i, j) && field.iter().any(|&k| c.below(j, k) && !c.below(i, k)) {
                return false;
            }
        }
    }
    true
}

/// The restriction of `R(T)` to indices below `N`: `σ_n ≺ σ_m` for members
/// `σ_n, σ_m` of `T` is stored as the pair `(n, m)`.
pub fn tree_to_lo(t: &Tree, n: u64) -> LOCode {
    let members: Vec<(u64, Seq)> = (0..n)
        .map(|i| (i, index_seq(i)))
        .filter(|(_, s)| t.contains(s))
        .collect();
    let mut pairs = BTreeSet::new();
    for (i, s) in &members {
        for (j, u) in &members {
            if kb_compare(s, u) == Ordering::Less {
                pairs.insert((*i, *j));
            }
        }
    }
    LOCode { size: n, pairs }
}
