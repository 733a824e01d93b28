//! Pell strings (words over `{0, 1, 22}`) and Fibonacci strings.
//!
//! A Pell string is stored one symbol per position, so a `22` factor occupies
//! two coordinates. The canonical order used everywhere in the crate is the
//! recursive one: the `0` block, then the `1` block, then the `22` block.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seq::{PellTable, SeqError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("{0:?} is not a Pell string")]
    NotPell(String),
    #[error("{0:?} is not a Fibonacci string")]
    NotFibonacci(String),
    #[error("unexpected character {0:?}")]
    BadSymbol(char),
    #[error("rank {rank} out of range for length {len} (there are {count} strings)")]
    RankOutOfRange { len: usize, rank: u128, count: u128 },
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// True iff every maximal run of `2`s has even length and no other symbol
/// than `0`, `1`, `2` appears.
pub fn validate(symbols: &[u8]) -> bool {
    let mut i = 0;
    while i < symbols.len() {
        match symbols[i] {
            0 | 1 => i += 1,
            2 if symbols.get(i + 1) == Some(&2) => i += 2,
            _ => return false,
        }
    }
    true
}

fn render(symbols: &[u8], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for &s in symbols {
        write!(f, "{s}")?;
    }
    Ok(())
}

fn parse_symbols(s: &str) -> Result<Vec<u8>, WordError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            '2' => Ok(2),
            other => Err(WordError::BadSymbol(other)),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PellString(Vec<u8>);

impl PellString {
    pub fn new(symbols: Vec<u8>) -> Result<Self, WordError> {
        if validate(&symbols) {
            Ok(PellString(symbols))
        } else {
            Err(WordError::NotPell(
                symbols.iter().map(|s| char::from(b'0' + s)).collect(),
            ))
        }
    }

    pub fn empty() -> Self {
        PellString(Vec::new())
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn starts_with(&self, prefix: &[u8]) -> bool {
        self.0.starts_with(prefix)
    }

    fn prepend(prefix: &[u8], rest: &PellString) -> PellString {
        let mut v = Vec::with_capacity(prefix.len() + rest.len());
        v.extend_from_slice(prefix);
        v.extend_from_slice(&rest.0);
        PellString(v)
    }
}

impl fmt::Display for PellString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(&self.0, f)
    }
}

impl FromStr for PellString {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, WordError> {
        let symbols = parse_symbols(s)?;
        if validate(&symbols) {
            Ok(PellString(symbols))
        } else {
            Err(WordError::NotPell(s.to_string()))
        }
    }
}

impl TryFrom<String> for PellString {
    type Error = WordError;
    fn try_from(s: String) -> Result<Self, WordError> {
        s.parse()
    }
}

impl From<PellString> for String {
    fn from(w: PellString) -> String {
        w.to_string()
    }
}

/// Binary string with no two adjacent `1`s.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FibonacciString(Vec<u8>);

impl FibonacciString {
    pub fn new(bits: Vec<u8>) -> Result<Self, WordError> {
        let ok = bits.iter().all(|&b| b <= 1) && !bits.windows(2).any(|w| w == [1, 1]);
        if ok {
            Ok(FibonacciString(bits))
        } else {
            Err(WordError::NotFibonacci(
                bits.iter().map(|s| char::from(b'0' + s)).collect(),
            ))
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for FibonacciString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(&self.0, f)
    }
}

/// All Pell strings of length `n` in canonical order.
pub fn generate_pell(n: usize) -> Vec<PellString> {
    // levels[k] = canonical list for length k
    let mut levels: Vec<Vec<PellString>> = vec![vec![PellString::empty()]];
    for k in 1..=n {
        let mut next = Vec::new();
        for prefix in [&[0u8][..], &[1u8][..]] {
            next.extend(levels[k - 1].iter().map(|w| PellString::prepend(prefix, w)));
        }
        if k >= 2 {
            next.extend(
                levels[k - 2]
                    .iter()
                    .map(|w| PellString::prepend(&[2, 2], w)),
            );
        }
        levels.push(next);
        if k >= 2 {
            // only the two most recent lengths are needed from here on
            levels[k - 2] = Vec::new();
        }
    }
    levels.swap_remove(n)
}

/// All Fibonacci strings of length `n`, ordered as `0F_{n-1}` then `10F_{n-2}`.
pub fn generate_fibonacci(n: usize) -> Vec<FibonacciString> {
    fn go(n: usize) -> Vec<Vec<u8>> {
        match n {
            0 => vec![vec![]],
            1 => vec![vec![0], vec![1]],
            _ => {
                let mut out: Vec<Vec<u8>> = go(n - 1)
                    .into_iter()
                    .map(|w| std::iter::once(0).chain(w).collect())
                    .collect();
                out.extend(
                    go(n - 2)
                        .into_iter()
                        .map(|w| [1, 0].into_iter().chain(w).collect()),
                );
                out
            }
        }
    }
    go(n).into_iter().map(FibonacciString).collect()
}

/// Position of `w` in `generate_pell(w.len())`.
pub fn rank(w: &PellString) -> Result<u128, WordError> {
    let table = PellTable::new(w.len() as i64)?;
    Ok(rank_with(&table, w.symbols()))
}

/// Rank using a precomputed table covering at least `symbols.len()`.
pub(crate) fn rank_with(table: &PellTable, symbols: &[u8]) -> u128 {
    let mut r = 0u128;
    let mut i = 0;
    let n = symbols.len();
    while i < n {
        let rem = (n - i) as i64;
        let block = table.get(rem - 1).expect("pell table").get();
        match symbols[i] {
            0 => i += 1,
            1 => {
                r += block;
                i += 1;
            }
            _ => {
                r += 2 * block;
                i += 2;
            }
        }
    }
    r
}

/// Inverse of [`rank`].
pub fn unrank(n: usize, r: u128) -> Result<PellString, WordError> {
    let table = PellTable::new(n as i64)?;
    let count = table.get(n as i64)?.get();
    if r >= count {
        return Err(WordError::RankOutOfRange {
            len: n,
            rank: r,
            count,
        });
    }
    let mut out = Vec::with_capacity(n);
    let mut r = r;
    while out.len() < n {
        let rem = (n - out.len()) as i64;
        let block = table.get(rem - 1)?.get();
        if r < block {
            out.push(0);
        } else if r < 2 * block {
            out.push(1);
            r -= block;
        } else {
            out.extend_from_slice(&[2, 2]);
            r -= 2 * block;
        }
    }
    Ok(PellString(out))
}

/// The single rewrite that turns one Pell string into an adjacent one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "site", rename_all = "lowercase")]
pub enum Rewrite {
    /// `0 <-> 1` at this coordinate.
    Flip(usize),
    /// `11 <-> 22` on this coordinate and the next one.
    Swap(usize),
}

/// Every rewrite applicable to `symbols`, with the resulting word.
pub(crate) fn rewrites(symbols: &[u8]) -> Vec<(Rewrite, Vec<u8>)> {
    let mut out = Vec::new();
    let n = symbols.len();
    let mut i = 0;
    while i < n {
        match symbols[i] {
            0 | 1 => {
                let mut v = symbols.to_vec();
                v[i] = 1 - v[i];
                out.push((Rewrite::Flip(i), v));
                if symbols[i] == 1 && i + 1 < n && symbols[i + 1] == 1 {
                    let mut v = symbols.to_vec();
                    v[i] = 2;
                    v[i + 1] = 2;
                    out.push((Rewrite::Swap(i), v));
                }
                i += 1;
            }
            _ => {
                let mut v = symbols.to_vec();
                v[i] = 1;
                v[i + 1] = 1;
                out.push((Rewrite::Swap(i), v));
                i += 2;
            }
        }
    }
    out
}

/// Neighbours of `w` in the Pell graph of its length.
pub fn rewrite_neighbors(w: &PellString) -> BTreeSet<PellString> {
    rewrites(w.symbols())
        .into_iter()
        .map(|(_, v)| PellString(v))
        .collect()
}
