//! Ordinal notations below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a list of terms `w^e * c` with strictly decreasing
//! exponents and positive coefficients. Because the form is unique, equality
//! is structural and comparison is a lexicographic walk over the terms.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Maximum parenthesis nesting accepted by the parser.
const MAX_NESTING: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("{0} is not a limit ordinal")]
    NotLimit(Ordinal),
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
}

/// An ordinal below epsilon-zero, stored in Cantor normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Term {
    exponent: Ordinal,
    coefficient: u64,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Ordinal::finite(1)
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            return Ordinal::zero();
        }
        Ordinal {
            terms: vec![Term {
                exponent: Ordinal::zero(),
                coefficient: n,
            }],
        }
    }

    pub fn omega() -> Self {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// `w^exponent`.
    pub fn omega_pow(exponent: Ordinal) -> Self {
        Ordinal::monomial(exponent, 1)
    }

    /// `w^exponent * coefficient`; a zero coefficient gives 0.
    pub fn monomial(exponent: Ordinal, coefficient: u64) -> Self {
        if coefficient == 0 {
            return Ordinal::zero();
        }
        Ordinal {
            terms: vec![Term {
                exponent,
                coefficient,
            }],
        }
    }

    /// Builds `w^e1*c1 + w^e2*c2 + ...` from arbitrary (possibly
    /// non-canonical) terms by ordinal addition, left to right.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Ordinal, u64)>,
    {
        terms
            .into_iter()
            .fold(Ordinal::zero(), |acc, (e, c)| acc.add(&Ordinal::monomial(e, c)))
    }

    /// The canonical terms as (exponent, coefficient) pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&Ordinal, u64)> {
        self.terms.iter().map(|t| (&t.exponent, t.coefficient))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.is_zero())
    }

    /// The natural number this ordinal denotes, if it is finite.
    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent.is_zero() => Some(t.coefficient),
            _ => None,
        }
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| !t.exponent.is_zero())
    }

    /// Nesting depth of the notation: 0 for finite ordinals,
    /// 1 for ordinals below `w^w`, and so on.
    pub fn height(&self) -> usize {
        self.terms
            .iter()
            .filter(|t| !t.exponent.is_zero())
            .map(|t| 1 + t.exponent.height())
            .max()
            .unwrap_or(0)
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// The predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a term");
        if last.coefficient == 1 {
            terms.pop();
        } else {
            last.coefficient -= 1;
        }
        Some(Ordinal { terms })
    }

    /// Ordinal addition `self + other`.
    ///
    /// # Panics
    ///
    /// Panics if a merged coefficient overflows `u64`.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(lead) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exponent >= lead.exponent)
            .cloned()
            .collect();
        let mut rest = other.terms.iter();
        if let Some(last) = terms.last_mut() {
            if last.exponent == lead.exponent {
                last.coefficient = last
                    .coefficient
                    .checked_add(lead.coefficient)
                    .expect("ordinal coefficient overflow");
                rest.next();
            }
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    /// The `n`-th element of the fundamental sequence of a limit ordinal.
    ///
    /// For `l = b + w^(g+1)` this is `b + w^g * (n+1)`; for `l = b + w^g`
    /// with `g` a limit it is `b + w^(g[n])`.
    pub fn fund_seq(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        if !self.is_limit() {
            return Err(OrdinalError::NotLimit(self.clone()));
        }
        let mut terms = self.terms.clone();
        let last = terms.pop().expect("limit has a term");
        if last.coefficient > 1 {
            terms.push(Term {
                exponent: last.exponent.clone(),
                coefficient: last.coefficient - 1,
            });
        }
        let base = Ordinal { terms };
        let step = match last.exponent.pred() {
            Some(g) => Ordinal::monomial(g, n.checked_add(1).expect("index overflow")),
            None => Ordinal::omega_pow(last.exponent.fund_seq(n)?),
        };
        Ok(base.add(&step))
    }

    /// The least upper bound of a finite family; 0 for an empty family.
    pub fn sup<'a, I>(family: I) -> Ordinal
    where
        I: IntoIterator<Item = &'a Ordinal>,
    {
        family.into_iter().max().cloned().unwrap_or_default()
    }

    pub fn parse(text: &str) -> Result<Ordinal, OrdinalError> {
        let mut parser = Parser {
            bytes: text.as_bytes(),
            pos: 0,
            nesting: 0,
        };
        let value = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.bytes.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(value)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then(a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(n)
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ordinal::parse(s)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            f.write_str("w")?;
            if t.exponent == Ordinal::omega() {
                f.write_str("^w")?;
            } else if let Some(k) = t.exponent.as_finite() {
                if k != 1 {
                    write!(f, "^{k}")?;
                }
            } else {
                write!(f, "^({})", t.exponent)?;
            }
            if t.coefficient != 1 {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    nesting: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> OrdinalError {
        OrdinalError::Syntax {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let t = self.term()?;
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exponent = if self.eat(b'^') {
                    self.exponent()?
                } else {
                    Ordinal::one()
                };
                let coefficient = if self.eat(b'*') { self.nat()? } else { 1 };
                Ok(Ordinal::monomial(exponent, coefficient))
            }
            Some(b) if b.is_ascii_digit() => Ok(Ordinal::finite(self.nat()?)),
            Some(_) => Err(self.error("expected 'w' or a natural number")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn exponent(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.nesting += 1;
                if self.nesting > MAX_NESTING {
                    return Err(self.error("notation nested too deeply"));
                }
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.nesting -= 1;
                Ok(e)
            }
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some(b) if b.is_ascii_digit() => Ok(Ordinal::finite(self.nat()?)),
            _ => Err(self.error("expected exponent")),
        }
    }

    fn nat(&mut self) -> Result<u64, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a natural number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| OrdinalError::Syntax {
                pos: start,
                message: "natural number out of range".to_string(),
            })
    }
}
