//! Section analysis of type `(1,1,2,2,...)` posets.
//!
//! In such a poset every level from 2 on has four elements, and the covers
//! between two consecutive width-4 levels form a bipartite 2-regular graph:
//! either one 8-cycle or two 4-cycles. The section string records, for each
//! such section, `3 - (number of components)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::chains::{atomic_numbers, AtomicNumbers};
use crate::error::ClassifyError;
use crate::iso::{canonical_form, CanonicalCertificate};
use crate::poset::{interval_by_index, interval_pairs, GradedPoset};

/// A word over `{1, 2}` with no two adjacent 2s.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SectionString(Vec<u8>);

impl SectionString {
    pub fn new(letters: Vec<u8>) -> Result<Self, ClassifyError> {
        for &l in &letters {
            if l != 1 && l != 2 {
                return Err(ClassifyError::Letter(char::from(b'0' + l.min(9))));
            }
        }
        if letters.windows(2).any(|w| w[0] == 2 && w[1] == 2) {
            let text: String = letters.iter().map(|&l| char::from(b'0' + l)).collect();
            return Err(ClassifyError::AdjacentTwos(text));
        }
        Ok(SectionString(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for SectionString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for SectionString {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SectionString::new(parse_letters(s)?)
    }
}

fn parse_letters(word: &str) -> Result<Vec<u8>, ClassifyError> {
    word.chars()
        .map(|c| match c {
            '1' => Ok(1),
            '2' => Ok(2),
            other => Err(ClassifyError::Letter(other)),
        })
        .collect()
}

/// True iff `word` has no two adjacent 2s. Letters other than 1 and 2 are an error.
pub fn validate_string(word: &str) -> Result<bool, ClassifyError> {
    let letters = parse_letters(word)?;
    Ok(!letters.windows(2).any(|w| w == [2, 2]))
}

/// All valid words of length `len`, lexicographic with `1 < 2`.
pub fn valid_words(len: usize) -> Vec<SectionString> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * 2);
        for w in &out {
            for l in [1u8, 2] {
                if l == 2 && w.last() == Some(&2) {
                    continue;
                }
                let mut v: Vec<u8> = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter().map(SectionString).collect()
}

/// A word containing every valid word of length `<= max_len` as a factor:
/// all valid words by length then lexicographically, joined by single 1s.
pub fn versal_string(max_len: usize) -> SectionString {
    let mut letters = Vec::new();
    for len in 1..=max_len {
        for w in valid_words(len) {
            if !letters.is_empty() {
                letters.push(1);
            }
            letters.extend_from_slice(w.letters());
        }
    }
    SectionString(letters)
}

/// Cover graph between two consecutive width-4 levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionGraph {
    pub lower: Vec<String>,
    pub upper: Vec<String>,
    /// `(i, j)`: `lower[i]` is covered by `upper[j]`.
    pub edges: Vec<(usize, usize)>,
}

impl SectionGraph {
    pub fn new(lower: Vec<String>, upper: Vec<String>, edges: Vec<(usize, usize)>) -> Self {
        SectionGraph {
            lower,
            upper,
            edges,
        }
    }

    /// Connected components, or an error unless bipartite 2-regular on 4 + 4 vertices.
    pub fn components(&self) -> Result<usize, ClassifyError> {
        if self.lower.len() != 4 || self.upper.len() != 4 {
            return Err(ClassifyError::NotTwoRegular(format!(
                "{} + {} vertices",
                self.lower.len(),
                self.upper.len()
            )));
        }
        let distinct: BTreeSet<&(usize, usize)> = self.edges.iter().collect();
        if distinct.len() != self.edges.len() {
            return Err(ClassifyError::NotTwoRegular("repeated edge".into()));
        }
        let mut deg = [0usize; 8];
        for &(i, j) in &self.edges {
            if i >= 4 || j >= 4 {
                return Err(ClassifyError::NotTwoRegular(
                    "edge endpoint out of range".into(),
                ));
            }
            deg[i] += 1;
            deg[4 + j] += 1;
        }
        if let Some(v) = deg.iter().position(|&d| d != 2) {
            return Err(ClassifyError::NotTwoRegular(format!(
                "vertex {v} has degree {}",
                deg[v]
            )));
        }
        let mut parent: Vec<usize> = (0..8).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &(i, j) in &self.edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, 4 + j));
            parent[a] = b;
        }
        Ok((0..8).filter(|&v| find(&mut parent, v) == v).count())
    }
}

fn width_check(poset: &GradedPoset, level: usize) -> Result<(), ClassifyError> {
    if level > poset.height() {
        return Err(ClassifyError::Level {
            level,
            height: poset.height(),
        });
    }
    let width = poset.level(level).len();
    if width != 4 {
        return Err(ClassifyError::Width { level, width });
    }
    Ok(())
}

/// The section between levels `i + 1` and `i + 2`.
pub fn section_graph(poset: &GradedPoset, i: usize) -> Result<SectionGraph, ClassifyError> {
    width_check(poset, i + 1)?;
    width_check(poset, i + 2)?;
    let lower = poset.level(i + 1);
    let upper = poset.level(i + 2);
    let mut edges = Vec::new();
    for (a, &x) in lower.iter().enumerate() {
        for &y in poset.up(x) {
            let b = upper
                .iter()
                .position(|&u| u == y)
                .expect("cover into next level");
            edges.push((a, b));
        }
    }
    Ok(SectionGraph {
        lower: lower.iter().map(|&v| poset.id(v).to_string()).collect(),
        upper: upper.iter().map(|&v| poset.id(v).to_string()).collect(),
        edges,
    })
}

/// `3 - components`: 2 for an 8-cycle, 1 for two 4-cycles.
pub fn section_type(g: &SectionGraph) -> Result<u8, ClassifyError> {
    Ok((3 - g.components()?) as u8)
}

/// Checks the atomic numbers are `(1, 1, 2, ..., 2)` up to the height.
fn check_type(poset: &GradedPoset) -> Result<(), ClassifyError> {
    match atomic_numbers(poset) {
        AtomicNumbers::Consistent(values) => {
            let ok = values
                .iter()
                .enumerate()
                .all(|(k, &a)| a == if k < 2 { 1 } else { 2 });
            if ok {
                Ok(())
            } else {
                Err(ClassifyError::WrongType(format!("{values:?}")))
            }
        }
        AtomicNumbers::Inconsistent {
            length,
            first,
            second,
        } => Err(ClassifyError::WrongType(format!(
            "{length}-intervals [{}, {}] and [{}, {}] have {} and {} atoms",
            first.bottom, first.top, second.bottom, second.top, first.atoms, second.atoms
        ))),
    }
}

/// The section string `(iota_1, ..., iota_{height-2})`.
pub fn phi(poset: &GradedPoset) -> Result<SectionString, ClassifyError> {
    if poset.height() < 2 {
        return Err(ClassifyError::WrongType(format!(
            "height {} is below 2",
            poset.height()
        )));
    }
    check_type(poset)?;
    let letters = (1..=poset.height() - 2)
        .map(|i| section_type(&section_graph(poset, i)?))
        .collect::<Result<Vec<u8>, _>>()?;
    SectionString::new(letters)
}

/// A 2+2 partition of a four-element level, blocks sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoverPartition {
    pub blocks: [[String; 2]; 2],
}

impl CoverPartition {
    fn from_pair(level: &[String], pair: [usize; 2]) -> Self {
        let mut a = [level[pair[0]].clone(), level[pair[1]].clone()];
        let rest: Vec<String> = (0..4)
            .filter(|k| !pair.contains(k))
            .map(|k| level[k].clone())
            .collect();
        let mut b = [rest[0].clone(), rest[1].clone()];
        a.sort();
        b.sort();
        let mut blocks = [a, b];
        blocks.sort();
        CoverPartition { blocks }
    }
}

impl fmt::Display for CoverPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = &self.blocks;
        write!(f, "{{{{{},{}}},{{{},{}}}}}", a[0], a[1], b[0], b[1])
    }
}

fn pair_partitions<'a>(
    poset: &GradedPoset,
    level: usize,
    neighbourhoods: impl Iterator<Item = (usize, &'a [usize])>,
) -> Result<BTreeSet<CoverPartition>, ClassifyError> {
    let members = poset.level(level);
    let names: Vec<String> = members.iter().map(|&v| poset.id(v).to_string()).collect();
    let mut out = BTreeSet::new();
    for (v, nb) in neighbourhoods {
        if nb.len() != 2 {
            return Err(ClassifyError::NotTwoRegular(format!(
                "{} meets {} elements of level {level}",
                poset.id(v),
                nb.len()
            )));
        }
        let pos = |x: usize| {
            members
                .iter()
                .position(|&m| m == x)
                .expect("adjacent level")
        };
        out.insert(CoverPartition::from_pair(&names, [pos(nb[0]), pos(nb[1])]));
    }
    Ok(out)
}

/// Partitions of level `i + 1` induced by common upper covers (from level `i + 2`).
pub fn cover_partitions(
    poset: &GradedPoset,
    i: usize,
) -> Result<BTreeSet<CoverPartition>, ClassifyError> {
    width_check(poset, i + 1)?;
    width_check(poset, i + 2)?;
    pair_partitions(
        poset,
        i + 1,
        poset.level(i + 2).iter().map(|&y| (y, poset.down(y))),
    )
}

/// Partitions of level `i + 1` induced by common lower covers (from level `i`).
/// Level `i` may have width 2 (the bottom boundary) or 4.
pub fn co_cover_partitions(
    poset: &GradedPoset,
    i: usize,
) -> Result<BTreeSet<CoverPartition>, ClassifyError> {
    width_check(poset, i + 1)?;
    let below = poset.level(i).len();
    if below != 2 && below != 4 {
        return Err(ClassifyError::Width {
            level: i,
            width: below,
        });
    }
    pair_partitions(
        poset,
        i + 1,
        poset.level(i).iter().map(|&x| (x, poset.up(x))),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AvoidanceVerdict {
    Pass,
    /// `partition` of `level` is both an induced cover and co-cover partition.
    Fail {
        level: usize,
        partition: CoverPartition,
    },
}

/// No width-4 level may carry a partition that is induced both from above
/// and from below.
pub fn check_partition_avoidance(poset: &GradedPoset) -> Result<AvoidanceVerdict, ClassifyError> {
    let w = poset.widths();
    for level in 2..poset.height() {
        if w[level] != 4 || w[level + 1] != 4 || !(w[level - 1] == 2 || w[level - 1] == 4) {
            continue;
        }
        let co = co_cover_partitions(poset, level - 1)?;
        let cov = cover_partitions(poset, level - 1)?;
        if let Some(p) = co.intersection(&cov).next() {
            return Ok(AvoidanceVerdict::Fail {
                level,
                partition: p.clone(),
            });
        }
    }
    Ok(AvoidanceVerdict::Pass)
}

/// One isomorphism class of intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalClass {
    pub certificate: CanonicalCertificate,
    pub bottom: String,
    pub top: String,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalClasses {
    pub length: usize,
    /// Sorted by certificate.
    pub classes: Vec<IntervalClass>,
}

impl IntervalClasses {
    pub fn count(&self) -> usize {
        self.classes.len()
    }
}

/// Classifies all fully contained `length`-intervals up to isomorphism.
/// Representatives are the id-least interval of each class.
pub fn enumerate_interval_classes(
    poset: &GradedPoset,
    length: usize,
) -> Result<IntervalClasses, ClassifyError> {
    let pairs = interval_pairs(poset, length);
    let certs: Vec<(CanonicalCertificate, usize, usize)> = pairs
        .par_iter()
        .map(|&(b, t)| {
            let iv = interval_by_index(poset, b, t)?;
            Ok((canonical_form(iv.poset())?, b, t))
        })
        .collect::<Result<_, ClassifyError>>()?;
    let mut classes: BTreeMap<CanonicalCertificate, IntervalClass> = BTreeMap::new();
    for (cert, b, t) in certs {
        let (bid, tid) = (poset.id(b), poset.id(t));
        classes
            .entry(cert.clone())
            .and_modify(|c| {
                c.multiplicity += 1;
                if (bid, tid) < (c.bottom.as_str(), c.top.as_str()) {
                    c.bottom = bid.to_string();
                    c.top = tid.to_string();
                }
            })
            .or_insert(IntervalClass {
                certificate: cert,
                bottom: bid.to_string(),
                top: tid.to_string(),
                multiplicity: 1,
            });
    }
    Ok(IntervalClasses {
        length,
        classes: classes.into_values().collect(),
    })
}
