//! Numerical conditions on atomic sequences and realizability decisions.

mod search;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::chains::{atomic_numbers, AtomicNumbers};
use crate::construct::{divisible_poset, m_interval, stripped_boolean_interval};
use crate::error::{ConstructError, SeqCheckError, SequenceError};
use crate::poset::{GradedPoset, Interval};
use crate::sequence::AtomicSequence;

pub use search::{
    enumerate_intervals, extension_search, IntervalEnumeration, SearchLimits, SearchOptions,
    SearchOutcome, SearchReport,
};

/// Why a sequence fails the compatibility condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `a_{index - 1} > a_index`.
    Decreasing { index: usize, prev: u64, next: u64 },
    /// `B(i + j) / (B(i) B(j))` is not an integer.
    NonIntegral {
        i: usize,
        j: usize,
        numerator: BigUint,
        denominator: BigUint,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Decreasing { index, prev, next } => {
                write!(f, "a_{} = {prev} > a_{index} = {next}", index - 1)
            }
            Violation::NonIntegral {
                i,
                j,
                numerator,
                denominator,
            } => write!(
                f,
                "(i,j) = ({i},{j}): B({})/(B({i})B({j})) = {numerator}/{denominator}",
                i + j
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityReport {
    pub horizon: usize,
    pub violation: Option<Violation>,
}

impl CompatibilityReport {
    pub fn passes(&self) -> bool {
        self.violation.is_none()
    }
}

fn factorials(terms: &[u64]) -> Vec<BigUint> {
    let mut b = vec![BigUint::one()];
    for &a in terms {
        let next = b.last().unwrap() * a;
        b.push(next);
    }
    b
}

/// `B(i + j)` and `B(i) B(j)` for the given terms (`terms[0] = a_1`).
pub fn coefficient_parts(terms: &[u64], i: usize, j: usize) -> (BigUint, BigUint) {
    let b = factorials(&terms[..i + j]);
    (b[i + j].clone(), &b[i] * &b[j])
}

/// Checks monotonicity and integrality of every `B(i + j) / (B(i) B(j))`
/// with `i + j <= horizon`, in order of `i + j` then `i`. Raw terms need not
/// satisfy the sequence invariants.
pub fn check_terms(terms: &[u64], horizon: usize) -> Result<CompatibilityReport, SequenceError> {
    if terms.len() < horizon {
        return Err(SequenceError::Undefined {
            index: horizon,
            len: terms.len(),
        });
    }
    let terms = &terms[..horizon];
    for (k, w) in terms.windows(2).enumerate() {
        if w[0] > w[1] {
            return Ok(CompatibilityReport {
                horizon,
                violation: Some(Violation::Decreasing {
                    index: k + 2,
                    prev: w[0],
                    next: w[1],
                }),
            });
        }
    }
    if terms.first().is_some_and(|&a| a != 1) {
        return Err(SequenceError::FirstNotOne(terms[0]));
    }
    let b = factorials(terms);
    for n in 2..=horizon {
        for i in 1..n {
            let j = n - i;
            let den = &b[i] * &b[j];
            if !(&b[n] % &den).is_zero() {
                return Ok(CompatibilityReport {
                    horizon,
                    violation: Some(Violation::NonIntegral {
                        i,
                        j,
                        numerator: b[n].clone(),
                        denominator: den,
                    }),
                });
            }
        }
    }
    Ok(CompatibilityReport {
        horizon,
        violation: None,
    })
}

pub fn check_compatibility(
    seq: &AtomicSequence,
    horizon: usize,
) -> Result<CompatibilityReport, SequenceError> {
    check_terms(&seq.prefix(horizon)?, horizon)
}

/// Extends a compatible finite head by the constant tail `lcm(head)`.
pub fn lcm_extension(head: &[u64]) -> Result<AtomicSequence, SeqCheckError> {
    let report = check_terms(head, head.len())?;
    if let Some(v) = report.violation {
        return Err(SeqCheckError::Incompatible(v.to_string()));
    }
    let tail = head.iter().fold(1u64, |acc, &a| acc.lcm(&a));
    Ok(AtomicSequence::with_tail(head.to_vec(), tail)?)
}

/// A constructor call realizing a sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    StrippedBoolean {
        n: usize,
        k: usize,
    },
    MInterval {
        m: usize,
    },
    Divisible {
        sequence: AtomicSequence,
        height: usize,
    },
}

impl Witness {
    pub fn build(&self) -> Result<GradedPoset, ConstructError> {
        match self {
            Witness::StrippedBoolean { n, k } => stripped_boolean_interval(*n, *k),
            Witness::MInterval { m } => m_interval(*m),
            Witness::Divisible { sequence, height } => divisible_poset(sequence, *height),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::StrippedBoolean { n, k } => write!(f, "stripped_boolean_interval({n},{k})"),
            Witness::MInterval { m } => write!(f, "m_interval({m})"),
            Witness::Divisible { sequence, height } => {
                write!(f, "divisible_poset({sequence}, height {height})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Realizable(Witness),
    NonRealizable(String),
    Unknown,
}

/// Matches the sequence against the decided families.
pub fn decide_family(seq: &AtomicSequence) -> Decision {
    let defined = seq.defined_len();
    let horizon = match defined {
        Some(len) => len,
        None => 3 * (seq.head().len() + 1),
    };
    let terms = seq.prefix(horizon).expect("horizon within definition");
    match check_terms(&terms, horizon) {
        Ok(report) => {
            if let Some(v) = report.violation {
                return Decision::NonRealizable(format!(
                    "fails the compatibility condition at {v}"
                ));
            }
        }
        Err(e) => return Decision::NonRealizable(e.to_string()),
    }

    let span = defined.unwrap_or(seq.head().len() + 1);
    let all_divide = (1..span).all(|i| terms[i].is_multiple_of(terms[i - 1]));
    if all_divide {
        return Decision::Realizable(Witness::Divisible {
            sequence: seq.clone(),
            height: span,
        });
    }

    // (1, 2, ..., n-1, a_n): realizable iff n | a_n
    let first_off = (1..=horizon).find(|&i| terms[i - 1] != i as u64);
    match first_off {
        None => {
            if let Some(len) = defined {
                if len >= 2 {
                    return Decision::Realizable(Witness::StrippedBoolean { n: len, k: 1 });
                }
            }
        }
        Some(n) if n >= 3 => {
            let an = terms[n - 1];
            if !an.is_multiple_of(n as u64) {
                return Decision::NonRealizable(format!(
                    "a_{n} = {an} is not divisible by {n} given prefix (1,...,{})",
                    n - 1
                ));
            }
            if defined == Some(n) {
                return Decision::Realizable(Witness::StrippedBoolean {
                    n,
                    k: (an / n as u64) as usize,
                });
            }
        }
        Some(_) => {}
    }

    // (1, m, m+1): realized by the m-interval, not extendable for m >= 3
    let m = terms.get(1).copied().unwrap_or(0);
    if m >= 1 && terms.get(2) == Some(&(m + 1)) {
        if defined == Some(3) {
            return Decision::Realizable(Witness::MInterval { m: m as usize });
        }
        if m >= 3 {
            return Decision::NonRealizable(format!(
                "(1,{m},{}) with m = {m} >= 3 is not extendable to a longer binomial interval",
                m + 1
            ));
        }
    }
    Decision::Unknown
}

/// Classes of the relation "covered together by some rank-2 element" on the
/// atoms of an interval with atomic numbers `(1, 2, ..., n-1, a_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct REquivalence {
    pub n: usize,
    pub k: usize,
    pub classes: Vec<Vec<String>>,
}

pub fn check_r_equivalence(iv: &Interval) -> Result<REquivalence, SeqCheckError> {
    let p = iv.poset();
    let n = iv.length();
    if n < 3 {
        return Err(SeqCheckError::Pattern(format!("length {n} is below 3")));
    }
    let values = match atomic_numbers(p) {
        AtomicNumbers::Consistent(v) => v,
        AtomicNumbers::Inconsistent { length, .. } => {
            return Err(SeqCheckError::Pattern(format!(
                "{length}-intervals disagree on atom counts"
            )))
        }
    };
    if (1..n).any(|i| values[i - 1] != i as u64) {
        return Err(SeqCheckError::Pattern(format!("{values:?}")));
    }
    let atoms = p.level(1);
    let pos: BTreeMap<usize, usize> = atoms.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let m = atoms.len();
    let mut related = vec![vec![false; m]; m];
    for (i, row) in related.iter_mut().enumerate() {
        row[i] = !p.up(atoms[i]).is_empty();
    }
    for &y in p.level(2) {
        let below: Vec<usize> = p.down(y).iter().map(|d| pos[d]).collect();
        for &a in &below {
            for &b in &below {
                related[a][b] = true;
            }
        }
    }
    // components of R; R is an equivalence iff each component is a clique
    let mut comp = vec![usize::MAX; m];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for s in 0..m {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut stack = vec![s];
        comp[s] = id;
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for w in 0..m {
                if related[v][w] && comp[w] == usize::MAX {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    for class in &classes {
        for &a in class {
            for &b in class {
                if !related[a][b] {
                    return Err(SeqCheckError::NotEquivalence(format!(
                        "{} and {} are linked but not related",
                        p.id(atoms[a]),
                        p.id(atoms[b])
                    )));
                }
            }
        }
    }
    let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
    if sizes.iter().any(|&s| s != n) {
        return Err(SeqCheckError::ClassSize { sizes, expected: n });
    }
    let mut named: Vec<Vec<String>> = classes
        .iter()
        .map(|c| {
            let mut v: Vec<String> = c.iter().map(|&a| p.id(atoms[a]).to_string()).collect();
            v.sort();
            v
        })
        .collect();
    named.sort();
    Ok(REquivalence {
        n,
        k: named.len(),
        classes: named,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> AtomicSequence {
        s.parse().unwrap()
    }

    #[test]
    fn compatibility_examples() {
        assert!(check_compatibility(&seq("1,2,3,4,4"), 5).unwrap().passes());
        let r = check_compatibility(&seq("1,2,3,3"), 4).unwrap();
        assert_eq!(
            r.violation,
            Some(Violation::NonIntegral {
                i: 2,
                j: 2,
                numerator: 18u32.into(),
                denominator: 4u32.into()
            })
        );
        assert!(check_compatibility(&seq("1,2,3,4,4,6*"), 10)
            .unwrap()
            .passes());
        let d = check_terms(&[1, 3, 2], 3).unwrap();
        assert!(matches!(
            d.violation,
            Some(Violation::Decreasing { index: 3, .. })
        ));
        assert!(check_compatibility(&seq("1,2"), 3).is_err());
    }

    #[test]
    fn lcm_tails() {
        assert_eq!(lcm_extension(&[1, 1, 2]).unwrap(), seq("1,1,2,2*"));
        let e = lcm_extension(&[1, 2, 3, 4]).unwrap();
        assert_eq!(e.tail(), Some(12));
        assert!(check_compatibility(&e, 12).unwrap().passes());
        assert_eq!(lcm_extension(&[1, 2, 3, 4, 4]).unwrap().tail(), Some(12));
        assert!(matches!(
            lcm_extension(&[1, 2, 3, 3]),
            Err(SeqCheckError::Incompatible(_))
        ));
    }

    #[test]
    fn family_decisions() {
        assert_eq!(
            decide_family(&seq("1,2,3,8")),
            Decision::Realizable(Witness::StrippedBoolean { n: 4, k: 2 })
        );
        match decide_family(&seq("1,2,3,4,4")) {
            Decision::NonRealizable(reason) => assert!(reason.contains("a_5 = 4"), "{reason}"),
            d => panic!("{d:?}"),
        }
        assert!(matches!(
            decide_family(&seq("1,3,4,12*")),
            Decision::NonRealizable(_)
        ));
        assert_eq!(
            decide_family(&seq("1,3,4")),
            Decision::Realizable(Witness::MInterval { m: 3 })
        );
        assert!(matches!(
            decide_family(&seq("1,1,2*")),
            Decision::Realizable(Witness::Divisible { .. })
        ));
        assert!(matches!(
            decide_family(&seq("1,2,3,3")),
            Decision::NonRealizable(_)
        ));
        assert_eq!(decide_family(&seq("1,2,3,8,8")), Decision::Unknown);
    }

    #[test]
    fn r_relation_on_boolean_strips() {
        let iv = Interval::from_poset(stripped_boolean_interval(3, 2).unwrap()).unwrap();
        let r = check_r_equivalence(&iv).unwrap();
        assert_eq!((r.n, r.k), (3, 2));
        assert!(r.classes.iter().all(|c| c.len() == 3));
        let iv = Interval::from_poset(stripped_boolean_interval(4, 1).unwrap()).unwrap();
        assert_eq!(check_r_equivalence(&iv).unwrap().k, 1);
    }

    #[test]
    fn r_relation_rejects_wrong_pattern() {
        let iv = Interval::from_poset(m_interval(3).unwrap()).unwrap();
        assert!(matches!(
            check_r_equivalence(&iv),
            Err(SeqCheckError::Pattern(_))
        ));
    }
}
