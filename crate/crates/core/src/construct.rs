//! Explicit poset constructions.
//!
//! Element ids are structured for debugging only: `"rank.index"` for string
//! posets, `"rank:word"` for de Bruijn posets, and so on.

use crate::classify::SectionString;
use crate::error::ConstructError;
use crate::poset::GradedPoset;
use crate::sequence::AtomicSequence;

/// A 2+2 partition of `{0,1,2,3}`, named by the partner of 0 (1, 2 or 3).
type Pairing = usize;

fn blocks(p: Pairing) -> [[usize; 2]; 2] {
    let rest: Vec<usize> = (1..4).filter(|&k| k != p).collect();
    [[0, p], [rest[0], rest[1]]]
}

fn pairing_of(a: usize, b: usize) -> Pairing {
    if a == 0 {
        b
    } else if b == 0 {
        a
    } else {
        // the block not containing 0 is {a, b}; 0 pairs with the remaining one
        (1..4).find(|&k| k != a && k != b).unwrap()
    }
}

/// Type `(1,1,2,2,...)` poset of height `|word| + 2` whose section string is `word`.
///
/// Each two-4-cycle section takes the lexicographically least pairing not
/// already induced from below; each 8-cycle induces exactly the two pairings
/// not induced from below.
pub fn poset_from_string(
    word: &SectionString,
    height: usize,
) -> Result<GradedPoset, ConstructError> {
    poset_from_string_choosing(word, height, &[])
}

/// Like [`poset_from_string`], but `picks[k]` selects (modulo the number of
/// options) which admissible pairing the `k`-th two-4-cycle section uses.
pub fn poset_from_string_choosing(
    word: &SectionString,
    height: usize,
    picks: &[usize],
) -> Result<GradedPoset, ConstructError> {
    if height != word.len() + 2 {
        return Err(ConstructError::Parameter(format!(
            "height must equal word length + 2 = {}, got {height}",
            word.len() + 2
        )));
    }
    let mut widths = vec![1, 2, 4];
    let mut covers = vec![
        ((0, 0), (1, 0)),
        ((0, 0), (1, 1)),
        ((1, 0), (2, 0)),
        ((1, 0), (2, 2)),
        ((1, 1), (2, 1)),
        ((1, 1), (2, 3)),
    ];
    // pairings of the current top level induced from below
    let mut forbidden: Vec<Pairing> = vec![2];
    let mut c4_sections = 0;
    for (k, &letter) in word.letters().iter().enumerate() {
        let lo = k + 2;
        widths.push(4);
        match letter {
            1 => {
                let allowed: Vec<Pairing> = (1..4).filter(|p| !forbidden.contains(p)).collect();
                let pick = picks.get(c4_sections).copied().unwrap_or(0) % allowed.len();
                c4_sections += 1;
                let [b0, b1] = blocks(allowed[pick]);
                for (j, block) in [b0, b0, b1, b1].iter().enumerate() {
                    for &x in block {
                        covers.push(((lo, x), (lo + 1, j)));
                    }
                }
                forbidden = vec![1];
            }
            2 => {
                let [[f1, f2], [f3, f4]] = blocks(forbidden[0]);
                let cycle = [f1, f3, f2, f4];
                for j in 0..4 {
                    covers.push(((lo, cycle[j]), (lo + 1, j)));
                    covers.push(((lo, cycle[(j + 1) % 4]), (lo + 1, j)));
                }
                forbidden = vec![pairing_of(0, 1), pairing_of(1, 2)];
            }
            _ => unreachable!("SectionString holds only 1 and 2"),
        }
    }
    Ok(GradedPoset::from_index_covers(&widths, covers)?)
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn set_name(copy: usize, s: &[usize]) -> String {
    let items: Vec<String> = s.iter().map(usize::to_string).collect();
    format!("c{copy}:{{{}}}", items.join(","))
}

/// `k` disjoint copies of the boolean lattice on `n` atoms with top and bottom
/// removed, joined by a new bottom and top. Atomic numbers `(1, 2, ..., n-1, kn)`.
pub fn stripped_boolean_interval(n: usize, k: usize) -> Result<GradedPoset, ConstructError> {
    if n < 2 || k < 1 {
        return Err(ConstructError::Parameter(format!(
            "need n >= 2 and k >= 1, got n = {n}, k = {k}"
        )));
    }
    let mut levels: Vec<Vec<String>> = vec![vec!["bot".into()]];
    for size in 1..n {
        let mut level = Vec::new();
        for copy in 0..k {
            for s in subsets_of_size(n, size) {
                level.push(set_name(copy, &s));
            }
        }
        levels.push(level);
    }
    levels.push(vec!["top".into()]);
    let mut covers = Vec::new();
    for copy in 0..k {
        for e in 0..n {
            covers.push(("bot".to_string(), set_name(copy, &[e])));
            let coatom: Vec<usize> = (0..n).filter(|&x| x != e).collect();
            covers.push((set_name(copy, &coatom), "top".to_string()));
        }
        for size in 1..n - 1 {
            for s in subsets_of_size(n, size) {
                for e in (0..n).filter(|e| !s.contains(e)) {
                    let mut t = s.clone();
                    t.push(e);
                    t.sort_unstable();
                    covers.push((set_name(copy, &s), set_name(copy, &t)));
                }
            }
        }
    }
    Ok(GradedPoset::new(levels, covers)?)
}

/// Rank-3 interval `{0; x_1..x_{m+1}; y_1..y_{m+1}; 1}` with `x_i < y_j` iff `i != j`.
pub fn m_interval(m: usize) -> Result<GradedPoset, ConstructError> {
    if m < 1 {
        return Err(ConstructError::Parameter("need m >= 1".into()));
    }
    let xs: Vec<String> = (1..=m + 1).map(|i| format!("x{i}")).collect();
    let ys: Vec<String> = (1..=m + 1).map(|i| format!("y{i}")).collect();
    let mut covers = Vec::new();
    for i in 0..=m {
        covers.push(("0".to_string(), xs[i].clone()));
        covers.push((ys[i].clone(), "1".to_string()));
        for j in (0..=m).filter(|&j| j != i) {
            covers.push((xs[i].clone(), ys[j].clone()));
        }
    }
    Ok(GradedPoset::new(
        vec![vec!["0".to_string()], xs, ys, vec!["1".to_string()]],
        covers,
    )?)
}

fn words(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |c| {
                    let mut v = w.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

fn word_name(rank: usize, w: &[usize]) -> String {
    let letters: Vec<String> = w.iter().map(usize::to_string).collect();
    format!("{rank}:{}", letters.join("."))
}

/// Level `i` is the set of words of length `min(i, m)` over `n` letters;
/// `(i, s) < (i + 1, t)` iff `t` without its last letter is a suffix of `s`.
/// Realizes `(1^m, n, n, ...)`; with `m = 0` every level is a single point.
pub fn debruijn_poset(m: usize, n: usize, height: usize) -> Result<GradedPoset, ConstructError> {
    if n < 1 {
        return Err(ConstructError::Parameter("need n >= 1".into()));
    }
    let mut levels = Vec::with_capacity(height + 1);
    let mut covers = Vec::new();
    for i in 0..=height {
        let here = words(n, i.min(m));
        levels.push(here.iter().map(|w| word_name(i, w)).collect::<Vec<_>>());
        if i == height {
            break;
        }
        for s in &here {
            for t in words(n, (i + 1).min(m)) {
                let stem = &t[..t.len().saturating_sub(1)];
                if s.ends_with(stem) {
                    covers.push((word_name(i, s), word_name(i + 1, &t)));
                }
            }
        }
    }
    Ok(GradedPoset::new(levels, covers)?)
}

/// Rank-wise product: pairs of equal-rank elements, covering componentwise.
/// Intervals of the product are products of intervals, so chain counts and
/// atomic numbers multiply.
pub fn rank_product(p: &GradedPoset, q: &GradedPoset) -> Result<GradedPoset, ConstructError> {
    let height = p.height().min(q.height());
    let name = |a: usize, b: usize| format!("{}|{}", p.id(a), q.id(b));
    let mut levels = Vec::with_capacity(height + 1);
    let mut covers = Vec::new();
    for r in 0..=height {
        let mut level = Vec::new();
        for &a in p.level(r) {
            for &b in q.level(r) {
                level.push(name(a, b));
                if r < height {
                    for &a2 in p.up(a) {
                        for &b2 in q.up(b) {
                            covers.push((name(a, b), name(a2, b2)));
                        }
                    }
                }
            }
        }
        levels.push(level);
    }
    Ok(GradedPoset::new(levels, covers)?)
}

/// Realizes a sequence with `a_i | a_{i+1}` up to `height`.
///
/// With ratios `r_j = a_j / a_{j-1}` the sequence is the termwise product of
/// the sequences `(1^{j-1}, r_j, r_j, ...)`, each realized by
/// `debruijn_poset(j - 1, r_j)`; the result is their rank-wise product.
pub fn divisible_poset(seq: &AtomicSequence, height: usize) -> Result<GradedPoset, ConstructError> {
    let terms = seq.prefix(height)?;
    let mut factors = Vec::new();
    let mut prev = 1u64;
    for (k, &a) in terms.iter().enumerate() {
        if a % prev != 0 {
            return Err(ConstructError::NotDivisible {
                prev_index: k,
                prev,
                index: k + 1,
                next: a,
            });
        }
        let ratio = a / prev;
        if ratio > 1 {
            factors.push(debruijn_poset(k, ratio as usize, height)?);
        }
        prev = a;
    }
    let mut acc = match factors.first() {
        Some(f) => f.clone(),
        None => return debruijn_poset(0, 1, height),
    };
    for f in &factors[1..] {
        acc = rank_product(&acc, f)?;
    }
    Ok(acc)
}
