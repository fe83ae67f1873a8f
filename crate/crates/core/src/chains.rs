//! Exact maximal-chain counting and the binomial checks built on it.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::SequenceError;
use crate::poset::{GradedPoset, Interval};
use crate::sequence::AtomicSequence;

/// Saturated-chain counts from `x` to every element (zero where `x` is not below).
pub fn chain_counts_from(poset: &GradedPoset, x: usize) -> Vec<BigUint> {
    let mut count = vec![BigUint::zero(); poset.len()];
    count[x] = BigUint::one();
    for r in poset.rank(x) + 1..=poset.height() {
        for &v in poset.level(r) {
            let mut acc = BigUint::zero();
            for &d in poset.down(v) {
                if !count[d].is_zero() {
                    acc += &count[d];
                }
            }
            count[v] = acc;
        }
    }
    count
}

/// Number of maximal chains in the interval.
pub fn count_maximal_chains(iv: &Interval) -> BigUint {
    let p = iv.poset();
    let top = p.level(p.height())[0];
    chain_counts_from(p, p.bottom()).swap_remove(top)
}

/// Chain count of one fully contained interval, with its endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalCount {
    pub bottom: String,
    pub top: String,
    pub length: usize,
    pub count: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BinomialVerdict {
    /// `chain_counts[n]` is the common chain count of all `n`-intervals.
    Pass { chain_counts: Vec<BigUint> },
    /// Two intervals of equal length with different chain counts; the
    /// lexicographically least such pair under id order.
    Fail {
        first: IntervalCount,
        second: IntervalCount,
    },
}

impl BinomialVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, BinomialVerdict::Pass { .. })
    }
}

struct Entry {
    bottom: usize,
    top: usize,
    count: BigUint,
}

/// Checks that all fully contained intervals of equal length have the same
/// number of maximal chains.
pub fn verify_binomial(poset: &GradedPoset) -> BinomialVerdict {
    let height = poset.height();
    let per_source: Vec<Vec<(usize, Entry)>> = (0..poset.len())
        .into_par_iter()
        .map(|x| {
            let counts = chain_counts_from(poset, x);
            let rx = poset.rank(x);
            counts
                .into_iter()
                .enumerate()
                .filter(|(y, c)| poset.rank(*y) >= rx && !c.is_zero())
                .map(|(y, count)| {
                    (
                        poset.rank(y) - rx,
                        Entry {
                            bottom: x,
                            top: y,
                            count,
                        },
                    )
                })
                .collect()
        })
        .collect();

    let mut by_length: Vec<Vec<Entry>> = (0..=height).map(|_| Vec::new()).collect();
    for (len, e) in per_source.into_iter().flatten() {
        by_length[len].push(e);
    }

    let mut witness: Option<(IntervalCount, IntervalCount)> = None;
    let mut chain_counts = Vec::with_capacity(height + 1);
    for (len, mut entries) in by_length.into_iter().enumerate() {
        let uniform = entries.windows(2).all(|w| w[0].count == w[1].count);
        if uniform {
            chain_counts.push(entries.pop().map(|e| e.count).unwrap_or_default());
            continue;
        }
        entries.sort_by(|a, b| {
            (poset.id(a.bottom), poset.id(a.top)).cmp(&(poset.id(b.bottom), poset.id(b.top)))
        });
        let first = &entries[0];
        let second = entries
            .iter()
            .find(|e| e.count != first.count)
            .expect("non-uniform group has a differing entry");
        let pair = (describe(poset, first, len), describe(poset, second, len));
        let better = match &witness {
            None => true,
            Some((a, b)) => {
                (&pair.0.bottom, &pair.0.top, &pair.1.bottom, &pair.1.top)
                    < (&a.bottom, &a.top, &b.bottom, &b.top)
            }
        };
        if better {
            witness = Some(pair);
        }
    }
    match witness {
        None => BinomialVerdict::Pass { chain_counts },
        Some((first, second)) => BinomialVerdict::Fail { first, second },
    }
}

fn describe(poset: &GradedPoset, e: &Entry, length: usize) -> IntervalCount {
    IntervalCount {
        bottom: poset.id(e.bottom).to_string(),
        top: poset.id(e.top).to_string(),
        length,
        count: e.count.clone(),
    }
}

/// Atom count of one interval, with its endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalAtoms {
    pub bottom: String,
    pub top: String,
    pub atoms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomicNumbers {
    /// `values[n - 1]` is `A(n)` for `n = 1..=height`.
    Consistent(Vec<u64>),
    Inconsistent {
        length: usize,
        first: IntervalAtoms,
        second: IntervalAtoms,
    },
}

impl AtomicNumbers {
    pub fn values(&self) -> Option<&[u64]> {
        match self {
            AtomicNumbers::Consistent(v) => Some(v),
            AtomicNumbers::Inconsistent { .. } => None,
        }
    }

    /// The measured numbers as a finite atomic sequence, when they form one.
    pub fn sequence(&self) -> Option<AtomicSequence> {
        self.values()
            .and_then(|v| AtomicSequence::finite(v.to_vec()).ok())
    }
}

/// Atom counts of every fully contained `n`-interval, `n = 1..=height`.
pub fn atomic_numbers(poset: &GradedPoset) -> AtomicNumbers {
    let height = poset.height();
    let per_source: Vec<Vec<(usize, usize, u64)>> = (0..poset.len())
        .into_par_iter()
        .map(|x| {
            let rx = poset.rank(x);
            let mut atoms: HashMap<usize, u64> = HashMap::new();
            for &c in poset.up(x) {
                let above = poset.up_closure(c, height);
                for (y, &m) in above.iter().enumerate() {
                    if m {
                        *atoms.entry(y).or_insert(0) += 1;
                    }
                }
            }
            let mut out: Vec<(usize, usize, u64)> = atoms
                .into_iter()
                .map(|(y, a)| (poset.rank(y) - rx, y, a))
                .collect();
            out.sort_unstable();
            out.into_iter()
                .map(|(l, y, a)| (l, x * poset.len() + y, a))
                .collect()
        })
        .collect();
    let n = poset.len();
    let mut by_length: BTreeMap<usize, Vec<(usize, usize, u64)>> = BTreeMap::new();
    for (len, key, a) in per_source.into_iter().flatten() {
        by_length
            .entry(len)
            .or_default()
            .push((key / n, key % n, a));
    }
    let mut values = Vec::with_capacity(height);
    for len in 1..=height {
        let mut group = by_length.remove(&len).unwrap_or_default();
        if group.windows(2).all(|w| w[0].2 == w[1].2) {
            values.push(group.first().map(|e| e.2).unwrap_or(0));
            continue;
        }
        group.sort_by(|a, b| (poset.id(a.0), poset.id(a.1)).cmp(&(poset.id(b.0), poset.id(b.1))));
        let f = group[0];
        let s = *group.iter().find(|e| e.2 != f.2).expect("differing entry");
        let mk = |e: (usize, usize, u64)| IntervalAtoms {
            bottom: poset.id(e.0).to_string(),
            top: poset.id(e.1).to_string(),
            atoms: e.2,
        };
        return AtomicNumbers::Inconsistent {
            length: len,
            first: mk(f),
            second: mk(s),
        };
    }
    AtomicNumbers::Consistent(values)
}

/// Observed level widths.
pub fn rank_sizes(poset: &GradedPoset) -> Vec<usize> {
    poset.widths()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankSizeRow {
    pub level: usize,
    pub observed: usize,
    pub predicted: BigRational,
}

impl RankSizeRow {
    pub fn agrees(&self) -> bool {
        self.predicted == BigRational::from_integer(self.observed.into())
    }
}

/// Observed widths against `a^i / B(i)` at every level.
pub fn compare_rank_sizes(
    poset: &GradedPoset,
    seq: &AtomicSequence,
) -> Result<Vec<RankSizeRow>, SequenceError> {
    let profile = seq.profile();
    poset
        .widths()
        .into_iter()
        .enumerate()
        .map(|(level, observed)| {
            Ok(RankSizeRow {
                level,
                observed,
                predicted: profile.predicted_rank_size(level)?,
            })
        })
        .collect()
}
