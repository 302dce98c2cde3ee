//! Sparse signals and the sign / dynamic-range primitives.
//!
//! Indices are 0-based in memory and 1-based in the text format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// Set of column indices, kept sorted.
pub type IndexSet = BTreeSet<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TernarySign {
    Neg,
    Zero,
    Pos,
}

impl TernarySign {
    pub fn as_i8(self) -> i8 {
        match self {
            TernarySign::Neg => -1,
            TernarySign::Zero => 0,
            TernarySign::Pos => 1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            -1 => Some(TernarySign::Neg),
            0 => Some(TernarySign::Zero),
            1 => Some(TernarySign::Pos),
            _ => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == TernarySign::Zero
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinarySign {
    Neg,
    Pos,
}

impl From<BinarySign> for TernarySign {
    fn from(s: BinarySign) -> Self {
        match s {
            BinarySign::Neg => TernarySign::Neg,
            BinarySign::Pos => TernarySign::Pos,
        }
    }
}

pub fn sign_ternary(x: &Rational) -> TernarySign {
    if x.is_positive() {
        TernarySign::Pos
    } else if x.is_negative() {
        TernarySign::Neg
    } else {
        TernarySign::Zero
    }
}

/// One-bit sign: zero maps to `+1`.
pub fn sign_binary(x: &Rational) -> BinarySign {
    if x.is_negative() {
        BinarySign::Neg
    } else {
        BinarySign::Pos
    }
}

/// Recovers `sign(x)` from `sign*(x)` and `sign*(-x)`.
pub fn ternary_from_binary_pair(s_pos: BinarySign, s_neg: BinarySign) -> Result<TernarySign> {
    match (s_pos, s_neg) {
        (BinarySign::Pos, BinarySign::Pos) => Ok(TernarySign::Zero),
        (BinarySign::Pos, BinarySign::Neg) => Ok(TernarySign::Pos),
        (BinarySign::Neg, BinarySign::Pos) => Ok(TernarySign::Neg),
        (BinarySign::Neg, BinarySign::Neg) => Err(Error::InconsistentPair),
    }
}

/// An exact sparse vector in ℚⁿ. Only nonzero entries are stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseSignal {
    dim: usize,
    entries: BTreeMap<usize, Rational>,
}

impl SparseSignal {
    pub fn zero(dim: usize) -> Self {
        SparseSignal {
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a signal from `(index, value)` pairs with 0-based indices.
    /// Zero values are dropped; repeated indices are rejected.
    pub fn new<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut map = BTreeMap::new();
        for (index, value) in entries {
            if index >= dim {
                return Err(Error::IndexOutOfRange {
                    index: index + 1,
                    dim,
                });
            }
            if map.contains_key(&index) {
                return Err(Error::DuplicateIndex(index + 1));
            }
            if !value.is_zero() {
                map.insert(index, value);
            }
        }
        Ok(SparseSignal { dim, entries: map })
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        SparseSignal {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `||x||_0`.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Rational> {
        self.entries.get(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.entries.iter().map(|(&i, v)| (i, v))
    }

    pub fn support(&self) -> IndexSet {
        self.entries.keys().copied().collect()
    }

    pub fn scale(&self, c: &Rational) -> SparseSignal {
        if c.is_zero() {
            return SparseSignal::zero(self.dim);
        }
        SparseSignal {
            dim: self.dim,
            entries: self.entries.iter().map(|(&i, v)| (i, v * c)).collect(),
        }
    }

    pub fn negated(&self) -> SparseSignal {
        SparseSignal {
            dim: self.dim,
            entries: self.entries.iter().map(|(&i, v)| (i, -v)).collect(),
        }
    }

    /// Adds `value` at `index`, dropping the entry if the sum is zero.
    pub fn add_at(&mut self, index: usize, value: &Rational) -> Result<()> {
        if index >= self.dim {
            return Err(Error::IndexOutOfRange {
                index: index + 1,
                dim: self.dim,
            });
        }
        let sum = self.entries.get(&index).cloned().unwrap_or_default() + value;
        if sum.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, sum);
        }
        Ok(())
    }

    /// κ(x): largest over smallest nonzero magnitude.
    pub fn dynamic_range(&self) -> Result<Rational> {
        let mut mags = self.entries.values().map(|v| v.abs());
        let first = mags.next().ok_or(Error::ZeroSignal)?;
        let (lo, hi) = mags.fold((first.clone(), first), |(lo, hi), m| {
            (if m < lo { m.clone() } else { lo }, if m > hi { m } else { hi })
        });
        Ok(hi / lo)
    }

    /// ρ(x): the smaller of the positive and negative entry counts.
    pub fn min_same_sign_count(&self) -> usize {
        let pos = self.entries.values().filter(|v| v.is_positive()).count();
        pos.min(self.entries.len() - pos)
    }
}

pub fn support(v: &SparseSignal) -> IndexSet {
    v.support()
}

pub fn dynamic_range(v: &SparseSignal) -> Result<Rational> {
    v.dynamic_range()
}

pub fn min_same_sign_count(v: &SparseSignal) -> usize {
    v.min_same_sign_count()
}

impl fmt::Display for SparseSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "signal n={}", self.dim)?;
        for (i, v) in &self.entries {
            writeln!(f, "{} {}", i + 1, format_rational(v))?;
        }
        Ok(())
    }
}

impl FromStr for SparseSignal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (lineno, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `signal n=<n>` header"))?;
        let dim = header
            .strip_prefix("signal n=")
            .and_then(|d| d.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::parse(lineno, "expected `signal n=<n>`"))?;
        let mut entries = Vec::new();
        for (lineno, line) in lines {
            let mut parts = line.split_whitespace();
            let (Some(idx), Some(val), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::parse(lineno, "expected `<index> <p/q>`"));
            };
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad index {idx:?}")))?;
            if idx == 0 {
                return Err(Error::parse(lineno, "indices are 1-based"));
            }
            let val = parse_rational(val).map_err(|e| Error::parse(lineno, e.to_string()))?;
            if val.is_zero() {
                return Err(Error::parse(lineno, "stored entries must be nonzero"));
            }
            entries.push((idx - 1, val));
        }
        SparseSignal::new(dim, entries)
    }
}
