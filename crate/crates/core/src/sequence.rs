//! Atomic sequences and the factorial profile derived from them.

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::SequenceError;

/// The atomic numbers `a_1, a_2, ...`, optionally followed by a constant tail.
///
/// Text form is comma separated; a trailing `*` marks the last value as the
/// repeating tail, so `1,1,2*` is `(1,1,2,2,2,...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomicSequence {
    head: Vec<u64>,
    tail: Option<u64>,
}

impl AtomicSequence {
    pub fn new(head: Vec<u64>, tail: Option<u64>) -> Result<Self, SequenceError> {
        let first = head.first().copied().or(tail).ok_or(SequenceError::Empty)?;
        if first != 1 {
            return Err(SequenceError::FirstNotOne(first));
        }
        let mut all = head.clone();
        all.extend(tail);
        if all.contains(&0) {
            return Err(SequenceError::NonPositive);
        }
        for (i, w) in all.windows(2).enumerate() {
            if w[0] > w[1] {
                return Err(SequenceError::Decreasing {
                    index: i + 2,
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        Ok(AtomicSequence { head, tail })
    }

    pub fn finite(head: Vec<u64>) -> Result<Self, SequenceError> {
        Self::new(head, None)
    }

    pub fn with_tail(head: Vec<u64>, tail: u64) -> Result<Self, SequenceError> {
        Self::new(head, Some(tail))
    }

    pub fn head(&self) -> &[u64] {
        &self.head
    }

    pub fn tail(&self) -> Option<u64> {
        self.tail
    }

    /// `lim a_i`, when the sequence is eventually constant.
    pub fn limit(&self) -> Option<u64> {
        self.tail
    }

    /// Number of explicitly defined terms (infinite when a tail is present).
    pub fn defined_len(&self) -> Option<usize> {
        match self.tail {
            Some(_) => None,
            None => Some(self.head.len()),
        }
    }

    /// `a_i` for `i >= 1`.
    pub fn get(&self, i: usize) -> Option<u64> {
        if i == 0 {
            return None;
        }
        self.head.get(i - 1).copied().or(self.tail)
    }

    pub fn try_get(&self, i: usize) -> Result<u64, SequenceError> {
        self.get(i).ok_or(SequenceError::Undefined {
            index: i,
            len: self.head.len(),
        })
    }

    /// `a_1..=a_n`, expanding the tail as needed.
    pub fn prefix(&self, n: usize) -> Result<Vec<u64>, SequenceError> {
        (1..=n).map(|i| self.try_get(i)).collect()
    }

    pub fn profile(&self) -> FactorialProfile {
        FactorialProfile::new(self.clone())
    }
}

impl fmt::Display for AtomicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.head.iter().map(u64::to_string).collect();
        if let Some(t) = self.tail {
            parts.push(format!("{t}*"));
        }
        f.write_str(&parts.join(","))
    }
}

impl FromStr for AtomicSequence {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, tail) = parse_terms(s)?;
        AtomicSequence::new(head, tail)
    }
}

/// Parses `1,2,3*` into head and tail without checking sequence invariants.
pub fn parse_terms(s: &str) -> Result<(Vec<u64>, Option<u64>), SequenceError> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    let mut head = Vec::new();
    let mut tail = None;
    let parts: Vec<&str> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect();
    for (i, part) in parts.iter().enumerate() {
        let (num, star) = match part.strip_suffix('*') {
            Some(n) => (n.trim(), true),
            None => (*part, false),
        };
        let value: u64 = num
            .parse()
            .map_err(|_| SequenceError::Parse(format!("bad term {part:?}")))?;
        if star {
            if i + 1 != parts.len() {
                return Err(SequenceError::Parse(
                    "only the last term may carry '*'".into(),
                ));
            }
            tail = Some(value);
        } else {
            head.push(value);
        }
    }
    if head.is_empty() && tail.is_none() {
        return Err(SequenceError::Empty);
    }
    Ok((head, tail))
}

/// `B(n) = a_1 a_2 ... a_n` and the generalized binomial coefficients.
#[derive(Debug)]
pub struct FactorialProfile {
    source: AtomicSequence,
    memo: RefCell<Vec<BigUint>>,
}

impl FactorialProfile {
    pub fn new(source: AtomicSequence) -> Self {
        FactorialProfile {
            source,
            memo: RefCell::new(vec![BigUint::one()]),
        }
    }

    pub fn source(&self) -> &AtomicSequence {
        &self.source
    }

    /// `B(n)`; `B(0) = 1`.
    pub fn b(&self, n: usize) -> Result<BigUint, SequenceError> {
        let mut memo = self.memo.borrow_mut();
        while memo.len() <= n {
            let i = memo.len();
            let a = self.source.try_get(i)?;
            let next = &memo[i - 1] * a;
            memo.push(next);
        }
        Ok(memo[n].clone())
    }

    /// `B(n) / (B(j) B(n - j))` as an exact rational.
    pub fn coefficient(&self, n: usize, j: usize) -> Result<BigRational, SequenceError> {
        assert!(j <= n, "coefficient index {j} exceeds {n}");
        let num = self.b(n)?;
        let den = self.b(j)? * self.b(n - j)?;
        Ok(BigRational::new(num.into(), den.into()))
    }

    /// Number of rank-`j` elements in an `n`-interval, if integral.
    pub fn rank_size(&self, n: usize, j: usize) -> Result<Option<BigUint>, SequenceError> {
        let c = self.coefficient(n, j)?;
        Ok(c.is_integer()
            .then(|| c.to_integer().to_biguint().expect("positive")))
    }

    /// Predicted level width `a^i / B(i)` for bounded atomic number type.
    pub fn predicted_rank_size(&self, i: usize) -> Result<BigRational, SequenceError> {
        let a = self.source.limit().ok_or(SequenceError::NoTail)?;
        let num = BigUint::from(a).pow(i as u32);
        Ok(BigRational::new(num.into(), self.b(i)?.into()))
    }

    /// `prod_i a / a_i` over the head; the eventual (and supremal) level width.
    pub fn predicted_sup_width(&self) -> Result<BigRational, SequenceError> {
        let a = self.source.limit().ok_or(SequenceError::NoTail)?;
        let mut acc = BigRational::one();
        for &ai in self.source.head() {
            acc *= BigRational::new(BigUint::from(a).into(), BigUint::from(ai).into());
        }
        debug_assert!(!acc.is_zero());
        Ok(acc)
    }
}

/// Predicted width of level `i` for a sequence with a constant tail.
pub fn predicted_rank_size(seq: &AtomicSequence, i: usize) -> Result<BigRational, SequenceError> {
    seq.profile().predicted_rank_size(i)
}
