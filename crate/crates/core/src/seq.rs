//! Exact Pell and Fibonacci numbers, plus the integer helpers used to
//! evaluate closed forms that carry a 1/2 or 1/4 factor.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("index {n} is below the smallest defined index {min}")]
    IndexTooSmall { n: i64, min: i64 },
    #[error("value at index {n} does not fit in 128 bits")]
    Overflow { n: i64 },
}

/// Errors raised while evaluating a closed form or a recurrence.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("{formula}: numerator {numerator} is not divisible by {divisor}")]
    NotDivisible {
        formula: &'static str,
        numerator: i128,
        divisor: i128,
    },
    #[error("{formula}: evaluated to negative value {value}")]
    Negative { formula: &'static str, value: i128 },
    #[error("{formula}: arithmetic overflow")]
    Overflow { formula: &'static str },
    #[error("{formula}: parameter out of domain ({detail})")]
    OutOfDomain {
        formula: &'static str,
        detail: String,
    },
}

/// An exact nonnegative integer from one of the sequences or formulas.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SeqValue(pub u128);

impl SeqValue {
    pub const ZERO: SeqValue = SeqValue(0);

    pub fn get(self) -> u128 {
        self.0
    }

    pub fn checked_add(self, rhs: SeqValue) -> Option<SeqValue> {
        self.0.checked_add(rhs.0).map(SeqValue)
    }

    pub fn checked_mul(self, rhs: SeqValue) -> Option<SeqValue> {
        self.0.checked_mul(rhs.0).map(SeqValue)
    }

    /// Signed view for formulas that subtract or multiply by negative terms.
    pub fn signed(self) -> Option<i128> {
        i128::try_from(self.0).ok()
    }
}

impl From<u64> for SeqValue {
    fn from(v: u64) -> Self {
        SeqValue(u128::from(v))
    }
}

impl fmt::Display for SeqValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

// Panicking operators for test code and small values; library paths use the
// checked variants.
impl Add for SeqValue {
    type Output = SeqValue;
    fn add(self, rhs: SeqValue) -> SeqValue {
        self.checked_add(rhs).expect("SeqValue addition overflow")
    }
}

impl Mul for SeqValue {
    type Output = SeqValue;
    fn mul(self, rhs: SeqValue) -> SeqValue {
        self.checked_mul(rhs)
            .expect("SeqValue multiplication overflow")
    }
}

impl std::iter::Sum for SeqValue {
    fn sum<I: Iterator<Item = SeqValue>>(iter: I) -> SeqValue {
        iter.fold(SeqValue::ZERO, |a, b| a + b)
    }
}

/// `p_n` with `p_{-1} = 0`, `p_0 = 1`, `p_1 = 2`.
pub fn pell(n: i64) -> Result<SeqValue, SeqError> {
    if n < -1 {
        return Err(SeqError::IndexTooSmall { n, min: -1 });
    }
    if n == -1 {
        return Ok(SeqValue(0));
    }
    let (mut prev, mut cur) = (0u128, 1u128);
    for _ in 0..n {
        let next = cur
            .checked_mul(2)
            .and_then(|c| c.checked_add(prev))
            .ok_or(SeqError::Overflow { n })?;
        prev = cur;
        cur = next;
    }
    Ok(SeqValue(cur))
}

/// `F_n` with `F_0 = 0`, `F_1 = 1`.
pub fn fibonacci(n: i64) -> Result<SeqValue, SeqError> {
    if n < 0 {
        return Err(SeqError::IndexTooSmall { n, min: 0 });
    }
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..n {
        let next = a.checked_add(b).ok_or(SeqError::Overflow { n })?;
        a = b;
        b = next;
    }
    Ok(SeqValue(a))
}

/// Memoized Pell numbers `p_{-1} ..= p_max`.
#[derive(Debug, Clone)]
pub struct PellTable {
    values: Vec<u128>,
}

impl PellTable {
    pub fn new(max: i64) -> Result<Self, SeqError> {
        if max < -1 {
            return Err(SeqError::IndexTooSmall { n: max, min: -1 });
        }
        let mut values: Vec<u128> = Vec::with_capacity((max + 2) as usize);
        values.push(0);
        if max >= 0 {
            values.push(1);
        }
        for k in 1..=max {
            let len = values.len();
            let next = values[len - 1]
                .checked_mul(2)
                .and_then(|c| c.checked_add(values[len - 2]))
                .ok_or(SeqError::Overflow { n: k })?;
            values.push(next);
        }
        Ok(PellTable { values })
    }

    pub fn max_index(&self) -> i64 {
        self.values.len() as i64 - 2
    }

    pub fn get(&self, n: i64) -> Result<SeqValue, SeqError> {
        if n < -1 {
            return Err(SeqError::IndexTooSmall { n, min: -1 });
        }
        match self.values.get((n + 1) as usize) {
            Some(&v) => Ok(SeqValue(v)),
            None => pell(n),
        }
    }

    /// `p_n` as a signed value for closed-form arithmetic.
    pub fn signed(&self, n: i64) -> Result<i128, SeqError> {
        self.get(n)?.signed().ok_or(SeqError::Overflow { n })
    }
}

/// Signed-arithmetic accumulator for closed forms.
///
/// All operations are checked; the first overflow is reported under the
/// formula name.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Exact {
    pub formula: &'static str,
}

impl Exact {
    pub fn mul(&self, a: i128, b: i128) -> Result<i128, FormulaError> {
        a.checked_mul(b).ok_or(FormulaError::Overflow {
            formula: self.formula,
        })
    }

    pub fn add(&self, a: i128, b: i128) -> Result<i128, FormulaError> {
        a.checked_add(b).ok_or(FormulaError::Overflow {
            formula: self.formula,
        })
    }

    /// Divides only when the division is exact.
    pub fn div_exact(&self, numerator: i128, divisor: i128) -> Result<i128, FormulaError> {
        if numerator % divisor != 0 {
            return Err(FormulaError::NotDivisible {
                formula: self.formula,
                numerator,
                divisor,
            });
        }
        Ok(numerator / divisor)
    }

    pub fn nonnegative(&self, value: i128) -> Result<SeqValue, FormulaError> {
        u128::try_from(value)
            .map(SeqValue)
            .map_err(|_| FormulaError::Negative {
                formula: self.formula,
                value,
            })
    }
}
