use std::fmt;

use super::{Label, TreeError};

/// An ultimately periodic infinite word `prefix · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UPWord<L> {
    prefix: Vec<L>,
    period: Vec<L>,
}

impl<L: Label> UPWord<L> {
    pub fn new(prefix: Vec<L>, period: Vec<L>) -> Result<Self, TreeError> {
        if period.is_empty() {
            return Err(TreeError::EmptyPeriod);
        }
        Ok(UPWord { prefix, period })
    }

    /// `period^ω`.
    pub fn periodic(period: Vec<L>) -> Result<Self, TreeError> {
        UPWord::new(Vec::new(), period)
    }

    /// `a^ω`.
    pub fn constant(a: L) -> Self {
        UPWord {
            prefix: Vec::new(),
            period: vec![a],
        }
    }

    pub fn prefix(&self) -> &[L] {
        &self.prefix
    }

    pub fn period(&self) -> &[L] {
        &self.period
    }

    /// Number of distinct positions of the lasso, `|prefix| + |period|`.
    pub fn lasso_len(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    /// The letter at position `i`.
    pub fn at(&self, i: usize) -> L {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// Position in the lasso reached after reading letter `p`:
    /// positions run `0..lasso_len()` and wrap back to `prefix.len()`.
    pub fn next_position(&self, p: usize) -> usize {
        if p + 1 < self.lasso_len() {
            p + 1
        } else {
            self.prefix.len()
        }
    }

    /// The first `n` letters.
    pub fn take(&self, n: usize) -> Vec<L> {
        (0..n).map(|i| self.at(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = L> + '_ {
        (0..).map(move |i| self.at(i))
    }

    pub fn map<M: Label>(&self, f: impl Fn(L) -> M) -> UPWord<M> {
        UPWord {
            prefix: self.prefix.iter().map(|&a| f(a)).collect(),
            period: self.period.iter().map(|&a| f(a)).collect(),
        }
    }

    /// The shortest representation of the same infinite word: primitive
    /// period, then the prefix rotated into the period as far as possible.
    pub fn canonical(&self) -> UPWord<L> {
        let mut period = self.period.clone();
        let n = period.len();
        if let Some(d) = (1..=n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| period[i] == period[i - d])) {
            period.truncate(d);
        }
        let mut prefix = self.prefix.clone();
        while let Some(&last) = prefix.last() {
            if last != *period.last().expect("period is nonempty") {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        UPWord { prefix, period }
    }

    /// Denotational equality.
    pub fn same_word(&self, other: &UPWord<L>) -> bool {
        self.canonical() == other.canonical()
    }
}

impl<L: Label + fmt::Debug> fmt::Display for UPWord<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({:?})^w", self.prefix, self.period)
    }
}
