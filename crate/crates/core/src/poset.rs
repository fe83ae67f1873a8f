//! Finite truncations of graded posets with a unique minimum.
//!
//! A [`GradedPoset`] stores its elements level by level together with the
//! cover relation between adjacent levels. Elements are addressed by opaque
//! string ids on the public surface and by dense indices internally; index
//! order is level order, and within a level the order in which the ids were
//! given.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::PosetError;

/// Read-only view of a ranked cover graph.
///
/// Vertices are `0..order()`. Covers only join ranks `r` and `r + 1`.
/// Implemented by [`GradedPoset`] and by the partial structures built during
/// extension search, which need not satisfy every poset invariant.
pub trait Hasse {
    fn order(&self) -> usize;
    fn rank_of(&self, v: usize) -> usize;
    fn upper_covers(&self, v: usize) -> &[usize];
    fn lower_covers(&self, v: usize) -> &[usize];
}

/// Finite graded poset with a unique minimum, truncated at `height`.
#[derive(Clone, Debug)]
pub struct GradedPoset {
    ids: Vec<String>,
    rank: Vec<usize>,
    levels: Vec<Vec<usize>>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl PartialEq for GradedPoset {
    fn eq(&self, other: &Self) -> bool {
        self.to_file() == other.to_file()
    }
}

impl Eq for GradedPoset {}

impl GradedPoset {
    /// Validates levels and covers and builds the poset.
    ///
    /// Elements on the top level are exempt from needing an upper cover.
    pub fn new<S, T>(levels: Vec<Vec<S>>, covers: Vec<(T, T)>) -> Result<Self, PosetError>
    where
        S: Into<String>,
        T: AsRef<str>,
    {
        if levels.is_empty() {
            return Err(PosetError::NoLevels);
        }
        let levels: Vec<Vec<String>> = levels
            .into_iter()
            .map(|l| l.into_iter().map(Into::into).collect())
            .collect();
        if levels[0].len() != 1 {
            return Err(PosetError::MinimumCount(levels[0].len()));
        }
        let mut ids = Vec::new();
        let mut rank = Vec::new();
        let mut index = HashMap::new();
        let mut level_idx = Vec::with_capacity(levels.len());
        for (r, level) in levels.into_iter().enumerate() {
            if level.is_empty() {
                return Err(PosetError::EmptyLevel(r));
            }
            let mut members = Vec::with_capacity(level.len());
            for id in level {
                if index.contains_key(&id) {
                    return Err(PosetError::DuplicateId(id));
                }
                index.insert(id.clone(), ids.len());
                members.push(ids.len());
                ids.push(id);
                rank.push(r);
            }
            level_idx.push(members);
        }
        let n = ids.len();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (lo, hi) in &covers {
            let (lo, hi) = (lo.as_ref(), hi.as_ref());
            let l = *index
                .get(lo)
                .ok_or_else(|| PosetError::UnknownId(lo.to_string()))?;
            let h = *index
                .get(hi)
                .ok_or_else(|| PosetError::UnknownId(hi.to_string()))?;
            if rank[h] != rank[l] + 1 {
                return Err(PosetError::NonAdjacentCover {
                    lo: lo.to_string(),
                    hi: hi.to_string(),
                    lo_rank: rank[l],
                    hi_rank: rank[h],
                });
            }
            if !seen.insert((l, h)) {
                return Err(PosetError::DuplicateCover {
                    lo: lo.to_string(),
                    hi: hi.to_string(),
                });
            }
            up[l].push(h);
            down[h].push(l);
        }
        let height = level_idx.len() - 1;
        for v in 0..n {
            if rank[v] < height && up[v].is_empty() {
                return Err(PosetError::NoUpperCover(ids[v].clone()));
            }
            if rank[v] > 0 && down[v].is_empty() {
                return Err(PosetError::NoLowerCover(ids[v].clone()));
            }
        }
        for list in up.iter_mut().chain(down.iter_mut()) {
            list.sort_unstable();
        }
        Ok(GradedPoset {
            ids,
            rank,
            levels: level_idx,
            up,
            down,
            index,
        })
    }

    /// Builds a poset from dense per-level indices; ids are `"rank.position"`.
    pub(crate) fn from_index_covers(
        widths: &[usize],
        covers: impl IntoIterator<Item = ((usize, usize), (usize, usize))>,
    ) -> Result<Self, PosetError> {
        let levels: Vec<Vec<String>> = widths
            .iter()
            .enumerate()
            .map(|(r, &w)| (0..w).map(|i| format!("{r}.{i}")).collect())
            .collect();
        let covers: Vec<(String, String)> = covers
            .into_iter()
            .map(|((r0, i0), (r1, i1))| (format!("{r0}.{i0}"), format!("{r1}.{i1}")))
            .collect();
        GradedPoset::new(levels, covers)
    }

    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub(crate) fn require(&self, id: &str) -> Result<usize, PosetError> {
        self.index_of(id)
            .ok_or_else(|| PosetError::UnknownId(id.to_string()))
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    /// Element indices on level `r`, in input order.
    pub fn level(&self, r: usize) -> &[usize] {
        &self.levels[r]
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    pub fn widths(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn bottom(&self) -> usize {
        self.levels[0][0]
    }

    pub fn up(&self, v: usize) -> &[usize] {
        &self.up[v]
    }

    pub fn down(&self, v: usize) -> &[usize] {
        &self.down[v]
    }

    pub fn cover_count(&self) -> usize {
        self.up.iter().map(Vec::len).sum()
    }

    /// All cover pairs as ids, sorted lexicographically.
    pub fn cover_ids(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = (0..self.len())
            .flat_map(|v| {
                self.up[v]
                    .iter()
                    .map(move |&h| (self.ids[v].clone(), self.ids[h].clone()))
            })
            .collect();
        out.sort();
        out
    }

    /// Indicator of the principal filter of `v`, restricted to ranks `<= max_rank`.
    pub(crate) fn up_closure(&self, v: usize, max_rank: usize) -> Vec<bool> {
        let mut mark = vec![false; self.len()];
        mark[v] = true;
        for r in self.rank[v]..max_rank.min(self.height()) {
            for &x in &self.levels[r] {
                if mark[x] {
                    for &h in &self.up[x] {
                        mark[h] = true;
                    }
                }
            }
        }
        mark
    }

    /// Indicator of the principal ideal of `v`.
    pub(crate) fn down_closure(&self, v: usize) -> Vec<bool> {
        let mut mark = vec![false; self.len()];
        mark[v] = true;
        for r in (1..=self.rank[v]).rev() {
            for &x in &self.levels[r] {
                if mark[x] {
                    for &l in &self.down[x] {
                        mark[l] = true;
                    }
                }
            }
        }
        mark
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        if self.rank[a] > self.rank[b] {
            return false;
        }
        self.up_closure(a, self.rank[b])[b]
    }

    /// Induced subposet on a vertex subset, keeping ids. Ranks are shifted so
    /// that the lowest rank present becomes 0.
    pub(crate) fn induced(&self, keep: &[bool]) -> Result<GradedPoset, PosetError> {
        let base = (0..self.len())
            .filter(|&v| keep[v])
            .map(|v| self.rank[v])
            .min()
            .ok_or(PosetError::NoLevels)?;
        let mut levels: Vec<Vec<String>> = Vec::new();
        for level in &self.levels[base..] {
            let members: Vec<String> = level
                .iter()
                .filter(|&&v| keep[v])
                .map(|&v| self.ids[v].clone())
                .collect();
            if members.is_empty() {
                break;
            }
            levels.push(members);
        }
        let covers: Vec<(String, String)> = (0..self.len())
            .filter(|&v| keep[v])
            .flat_map(|v| {
                self.up[v]
                    .iter()
                    .filter(|&&h| keep[h])
                    .map(move |&h| (self.ids[v].clone(), self.ids[h].clone()))
            })
            .collect();
        GradedPoset::new(levels, covers)
    }

    /// The truncation at `height` (levels `0..=height`).
    pub fn truncate(&self, height: usize) -> GradedPoset {
        let keep: Vec<bool> = self.rank.iter().map(|&r| r <= height).collect();
        self.induced(&keep)
            .expect("truncation of a valid poset is valid")
    }

    pub fn to_file(&self) -> PosetFile {
        PosetFile {
            height: self.height(),
            levels: self
                .levels
                .iter()
                .map(|l| l.iter().map(|&v| self.ids[v].clone()).collect())
                .collect(),
            covers: self.cover_ids(),
        }
    }

    /// Canonical JSON text: levels in stored order, covers sorted.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&self.to_file()).expect("poset serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, PosetError> {
        let file: PosetFile =
            serde_json::from_str(text).map_err(|e| PosetError::Parse(e.to_string()))?;
        file.into_poset()
    }

    /// Graphviz Hasse diagram, one `rank=same` group per level, drawn bottom-up.
    pub fn to_dot(&self) -> String {
        let mut out =
            String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=circle, fontsize=9];\n");
        for (r, level) in self.levels.iter().enumerate() {
            let _ = writeln!(out, "  {{ rank=same; // level {r}");
            for &v in level {
                let _ = writeln!(out, "    \"{}\";", escape(&self.ids[v]));
            }
            out.push_str("  }\n");
        }
        for (lo, hi) in self.cover_ids() {
            let _ = writeln!(out, "  \"{}\" -> \"{}\";", escape(&lo), escape(&hi));
        }
        out.push_str("}\n");
        out
    }
}

fn escape(id: &str) -> String {
    id.replace('\\', "\\\\").replace('"', "\\\"")
}

impl Hasse for GradedPoset {
    fn order(&self) -> usize {
        self.len()
    }
    fn rank_of(&self, v: usize) -> usize {
        self.rank[v]
    }
    fn upper_covers(&self, v: usize) -> &[usize] {
        &self.up[v]
    }
    fn lower_covers(&self, v: usize) -> &[usize] {
        &self.down[v]
    }
}

/// On-disk JSON form of a poset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetFile {
    pub height: usize,
    pub levels: Vec<Vec<String>>,
    pub covers: Vec<(String, String)>,
}

impl PosetFile {
    pub fn into_poset(self) -> Result<GradedPoset, PosetError> {
        if self.levels.len() != self.height + 1 {
            return Err(PosetError::HeightMismatch {
                height: self.height,
                levels: self.levels.len(),
            });
        }
        GradedPoset::new(self.levels, self.covers)
    }
}

/// A closed interval `[bottom, top]`, stored as its own re-ranked poset.
#[derive(Clone, Debug)]
pub struct Interval {
    poset: GradedPoset,
    bottom: String,
    top: String,
}

impl Interval {
    pub fn poset(&self) -> &GradedPoset {
        &self.poset
    }

    pub fn bottom(&self) -> &str {
        &self.bottom
    }

    pub fn top(&self) -> &str {
        &self.top
    }

    pub fn length(&self) -> usize {
        self.poset.height()
    }

    /// Treats a whole poset with a unique maximal element as an interval.
    pub fn from_poset(poset: GradedPoset) -> Result<Self, PosetError> {
        let top_level = poset.level(poset.height());
        if top_level.len() != 1 {
            return Err(PosetError::NotAnInterval(top_level.len()));
        }
        let top = poset.id(top_level[0]).to_string();
        let bottom = poset.id(poset.bottom()).to_string();
        Ok(Interval { poset, bottom, top })
    }
}

/// Extracts `[bottom, top]` from `poset`.
pub fn interval(poset: &GradedPoset, bottom: &str, top: &str) -> Result<Interval, PosetError> {
    let b = poset.require(bottom)?;
    let t = poset.require(top)?;
    interval_by_index(poset, b, t)
}

pub(crate) fn interval_by_index(
    poset: &GradedPoset,
    b: usize,
    t: usize,
) -> Result<Interval, PosetError> {
    if poset.rank(b) > poset.rank(t) {
        return Err(not_comparable(poset, b, t));
    }
    let above = poset.up_closure(b, poset.rank(t));
    if !above[t] {
        return Err(not_comparable(poset, b, t));
    }
    let below = poset.down_closure(t);
    let keep: Vec<bool> = above.iter().zip(&below).map(|(a, c)| *a && *c).collect();
    Ok(Interval {
        poset: poset.induced(&keep)?,
        bottom: poset.id(b).to_string(),
        top: poset.id(t).to_string(),
    })
}

fn not_comparable(poset: &GradedPoset, b: usize, t: usize) -> PosetError {
    PosetError::NotComparable {
        bottom: poset.id(b).to_string(),
        top: poset.id(t).to_string(),
    }
}

/// All comparable pairs `(x, y)` with `rank(y) - rank(x) == length`.
pub(crate) fn interval_pairs(poset: &GradedPoset, length: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..poset.len() {
        let r = poset.rank(x) + length;
        if r > poset.height() {
            continue;
        }
        let above = poset.up_closure(x, r);
        out.extend(
            poset
                .level(r)
                .iter()
                .filter(|&&y| above[y])
                .map(|&y| (x, y)),
        );
    }
    out
}

/// Sorted, de-duplicated set of ids; used by tests and reports.
pub fn id_set(poset: &GradedPoset, vs: impl IntoIterator<Item = usize>) -> BTreeSet<&str> {
    vs.into_iter().map(|v| poset.id(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> GradedPoset {
        GradedPoset::new(
            vec![vec!["r"], vec!["x"], vec!["y"]],
            vec![("r", "x"), ("x", "y")],
        )
        .unwrap()
    }

    #[test]
    fn three_chain() {
        let p = chain3();
        assert_eq!(p.height(), 2);
        assert_eq!(p.widths(), vec![1, 1, 1]);
        assert!(p.le(0, 2));
    }

    #[test]
    fn rejects_missing_lower_cover() {
        let err = GradedPoset::new(vec![vec!["r"], vec!["x", "y"]], vec![("r", "x")]).unwrap_err();
        assert_eq!(err, PosetError::NoLowerCover("y".into()));
    }

    #[test]
    fn rejects_missing_upper_cover_below_top() {
        let err = GradedPoset::new(
            vec![vec!["r"], vec!["x", "y"], vec!["t"]],
            vec![("r", "x"), ("r", "y"), ("x", "t")],
        )
        .unwrap_err();
        assert_eq!(err, PosetError::NoUpperCover("y".into()));
    }

    #[test]
    fn rejects_bad_inputs() {
        let e = GradedPoset::new(vec![vec!["a", "b"]], Vec::<(&str, &str)>::new()).unwrap_err();
        assert_eq!(e, PosetError::MinimumCount(2));
        let e = GradedPoset::new(vec![vec!["a"], vec!["a"]], vec![("a", "a")]).unwrap_err();
        assert_eq!(e, PosetError::DuplicateId("a".into()));
        let e = GradedPoset::new(
            vec![vec!["r"], vec!["x"], vec!["y"]],
            vec![("r", "x"), ("x", "y"), ("r", "y")],
        )
        .unwrap_err();
        assert!(matches!(e, PosetError::NonAdjacentCover { .. }));
        let e = GradedPoset::new(vec![vec!["r"], vec!["x"]], vec![("r", "q")]).unwrap_err();
        assert_eq!(e, PosetError::UnknownId("q".into()));
        let e =
            GradedPoset::new(vec![vec!["r"], vec!["x"]], vec![("r", "x"), ("r", "x")]).unwrap_err();
        assert!(matches!(e, PosetError::DuplicateCover { .. }));
    }

    #[test]
    fn point_and_full_intervals() {
        let p = chain3();
        let iv = interval(&p, "x", "x").unwrap();
        assert_eq!(iv.length(), 0);
        assert_eq!(iv.poset().len(), 1);
        let iv = interval(&p, "r", "y").unwrap();
        assert_eq!(iv.poset(), &p);
        let e = interval(&p, "y", "x").unwrap_err();
        assert!(matches!(e, PosetError::NotComparable { .. }));
        assert!(matches!(
            interval(&p, "r", "zz"),
            Err(PosetError::UnknownId(_))
        ));
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        let p = GradedPoset::new(
            vec![vec!["0"], vec!["b", "a"], vec!["t"]],
            vec![("a", "t"), ("0", "b"), ("b", "t"), ("0", "a")],
        )
        .unwrap();
        let text = p.to_json();
        let q = GradedPoset::from_json(&text).unwrap();
        assert_eq!(q.to_json(), text);
        assert_eq!(
            q.level(1).iter().map(|&v| q.id(v)).collect::<Vec<_>>(),
            ["b", "a"]
        );
        let bad = text.replace("\"height\":2", "\"height\":3");
        assert!(matches!(
            GradedPoset::from_json(&bad),
            Err(PosetError::HeightMismatch { .. })
        ));
    }

    #[test]
    fn dot_groups_levels() {
        let dot = chain3().to_dot();
        assert!(dot.contains("rankdir=BT"));
        assert_eq!(dot.matches("rank=same").count(), 3);
        assert!(dot.contains("\"r\" -> \"x\";"));
    }
}
