//! Rank-preserving isomorphism and canonical certificates.
//!
//! Canonical labeling by individualization and refinement: the initial
//! partition is by rank, refined to equitability on (color, multiset of
//! upper-cover colors, multiset of lower-cover colors). The search branches
//! on the first non-singleton cell and keeps the lexicographically least
//! adjacency encoding over all leaves. Vertices with identical upper and
//! lower cover sets are interchangeable by a transposition, so only one
//! member of each such twin class is individualized.

use std::collections::HashMap;
use std::fmt;

use crate::error::IsoError;
use crate::poset::{GradedPoset, Hasse};

/// Byte string identifying a rank-preserving isomorphism class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCertificate(Vec<u8>);

impl CanonicalCertificate {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

impl fmt::Display for CanonicalCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsoConfig {
    pub max_elements: usize,
    pub max_leaves: usize,
}

impl Default for IsoConfig {
    fn default() -> Self {
        IsoConfig {
            max_elements: 4096,
            max_leaves: 200_000,
        }
    }
}

/// Canonical form together with the labeling that produced it.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub certificate: CanonicalCertificate,
    /// `labeling[pos]` is the vertex placed at canonical position `pos`.
    pub labeling: Vec<usize>,
}

struct Graph {
    rank: Vec<u32>,
    up: Vec<Vec<u32>>,
    down: Vec<Vec<u32>>,
    twin: Vec<u32>,
}

impl Graph {
    fn from_hasse<H: Hasse + ?Sized>(h: &H, order: &[usize]) -> Graph {
        let n = h.order();
        let mut pos = vec![0u32; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i as u32;
        }
        let map = |list: &[usize]| {
            let mut l: Vec<u32> = list.iter().map(|&x| pos[x]).collect();
            l.sort_unstable();
            l
        };
        let rank = order.iter().map(|&v| h.rank_of(v) as u32).collect();
        let up: Vec<Vec<u32>> = order.iter().map(|&v| map(h.upper_covers(v))).collect();
        let down: Vec<Vec<u32>> = order.iter().map(|&v| map(h.lower_covers(v))).collect();
        let mut twin: Vec<u32> = (0..n as u32).collect();
        let mut first: HashMap<(&[u32], &[u32]), u32> = HashMap::new();
        for v in 0..n {
            // equal lower-cover sets imply equal rank except at rank 0
            if down[v].is_empty() {
                continue;
            }
            twin[v] = *first.entry((&up[v], &down[v])).or_insert(v as u32);
        }
        Graph {
            rank,
            up,
            down,
            twin,
        }
    }

    fn len(&self) -> usize {
        self.rank.len()
    }
}

/// Ordered partition: `color[v]` is the index of `v`'s cell; cells are
/// numbered consecutively from 0.
#[derive(Clone)]
struct Partition {
    color: Vec<u32>,
    cells: u32,
}

fn refine(g: &Graph, p: &mut Partition) {
    let n = g.len();
    let mut keyed: Vec<(u32, Vec<u32>, Vec<u32>, u32)> = Vec::with_capacity(n);
    loop {
        if p.cells as usize == n {
            return;
        }
        keyed.clear();
        for v in 0..n {
            let mut u: Vec<u32> = g.up[v].iter().map(|&x| p.color[x as usize]).collect();
            u.sort_unstable();
            let mut d: Vec<u32> = g.down[v].iter().map(|&x| p.color[x as usize]).collect();
            d.sort_unstable();
            keyed.push((p.color[v], u, d, v as u32));
        }
        keyed.sort_unstable();
        let mut next = 0u32;
        let mut color = vec![0u32; n];
        for i in 0..n {
            if i > 0 {
                let (a, b) = (&keyed[i - 1], &keyed[i]);
                if a.0 != b.0 || a.1 != b.1 || a.2 != b.2 {
                    next += 1;
                }
            }
            color[keyed[i].3 as usize] = next;
        }
        let cells = next + 1;
        let changed = cells != p.cells;
        p.color = color;
        p.cells = cells;
        if !changed {
            return;
        }
    }
}

fn individualize(p: &Partition, v: usize) -> Partition {
    let c = p.color[v];
    let color = p
        .color
        .iter()
        .enumerate()
        .map(|(u, &k)| {
            if k > c || (k == c && u != v) {
                k + 1
            } else {
                k
            }
        })
        .collect();
    Partition {
        color,
        cells: p.cells + 1,
    }
}

fn encode(g: &Graph, p: &Partition) -> Vec<u32> {
    let n = g.len();
    let mut inv = vec![0usize; n];
    for v in 0..n {
        inv[p.color[v] as usize] = v;
    }
    let mut out = Vec::with_capacity(n + g.down.iter().map(Vec::len).sum::<usize>());
    for &v in &inv {
        let mut d: Vec<u32> = g.down[v].iter().map(|&x| p.color[x as usize]).collect();
        d.sort_unstable();
        out.push(d.len() as u32);
        out.extend(d);
    }
    out
}

struct Search<'a> {
    g: &'a Graph,
    best: Option<(Vec<u32>, Vec<u32>)>,
    leaves: usize,
    max_leaves: usize,
}

impl Search<'_> {
    fn run(&mut self, p: Partition) -> Result<(), IsoError> {
        let n = self.g.len();
        if p.cells as usize == n {
            self.leaves += 1;
            if self.leaves > self.max_leaves {
                return Err(IsoError::SearchCap(self.max_leaves));
            }
            let enc = encode(self.g, &p);
            let better = match &self.best {
                None => true,
                Some((b, _)) => enc < *b,
            };
            if better {
                self.best = Some((enc, p.color));
            }
            return Ok(());
        }
        // first non-singleton cell
        let mut size = vec![0u32; p.cells as usize];
        for &c in &p.color {
            size[c as usize] += 1;
        }
        let target = size.iter().position(|&s| s > 1).expect("non-discrete") as u32;
        let mut tried_twins: Vec<u32> = Vec::new();
        for v in 0..n {
            if p.color[v] != target {
                continue;
            }
            let t = self.g.twin[v];
            if tried_twins.contains(&t) {
                continue;
            }
            tried_twins.push(t);
            let mut child = individualize(&p, v);
            refine(self.g, &mut child);
            self.run(child)?;
        }
        Ok(())
    }
}

/// Canonical labeling of a ranked cover graph. Ties among equal leaves are
/// broken by the first one reached, exploring vertices in `order`.
pub fn canonical_with_order<H: Hasse + ?Sized>(
    h: &H,
    order: &[usize],
    cfg: &IsoConfig,
) -> Result<Canonical, IsoError> {
    let n = h.order();
    if n > cfg.max_elements {
        return Err(IsoError::TooLarge {
            size: n,
            cap: cfg.max_elements,
        });
    }
    let g = Graph::from_hasse(h, order);
    let max_rank = g.rank.iter().copied().max().unwrap_or(0);
    let mut widths = vec![0u32; max_rank as usize + 1];
    for &r in &g.rank {
        widths[r as usize] += 1;
    }
    let mut start = Partition {
        color: g
            .rank
            .iter()
            .map(|&r| widths[..r as usize].iter().sum::<u32>())
            .collect(),
        cells: 0,
    };
    // compact colors to consecutive cell numbers
    let mut distinct: Vec<u32> = start.color.clone();
    distinct.sort_unstable();
    distinct.dedup();
    for c in start.color.iter_mut() {
        *c = distinct.binary_search(c).unwrap() as u32;
    }
    start.cells = distinct.len() as u32;
    refine(&g, &mut start);

    let mut search = Search {
        g: &g,
        best: None,
        leaves: 0,
        max_leaves: cfg.max_leaves,
    };
    if n > 0 {
        search.run(start)?;
    }
    let (enc, color) = search.best.unwrap_or_default();

    let mut bytes = Vec::with_capacity(4 * (enc.len() + widths.len() + 1));
    bytes.extend((widths.len() as u32).to_le_bytes());
    for w in &widths {
        bytes.extend(w.to_le_bytes());
    }
    for x in &enc {
        bytes.extend(x.to_le_bytes());
    }
    let mut labeling = vec![0usize; n];
    for (i, &c) in color.iter().enumerate() {
        labeling[c as usize] = order[i];
    }
    Ok(Canonical {
        certificate: CanonicalCertificate(bytes),
        labeling,
    })
}

/// Vertex order used for posets: by rank, then by id.
fn id_order(p: &GradedPoset) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| (p.rank(a), p.id(a)).cmp(&(p.rank(b), p.id(b))));
    order
}

pub fn canonical_labeling(p: &GradedPoset, cfg: &IsoConfig) -> Result<Canonical, IsoError> {
    canonical_with_order(p, &id_order(p), cfg)
}

pub fn canonical_form(p: &GradedPoset) -> Result<CanonicalCertificate, IsoError> {
    canonical_form_with(p, &IsoConfig::default())
}

pub fn canonical_form_with(
    p: &GradedPoset,
    cfg: &IsoConfig,
) -> Result<CanonicalCertificate, IsoError> {
    Ok(canonical_labeling(p, cfg)?.certificate)
}

/// Certificate of any ranked cover graph, exploring vertices in index order.
pub fn certificate_of<H: Hasse + ?Sized>(
    h: &H,
    cfg: &IsoConfig,
) -> Result<CanonicalCertificate, IsoError> {
    let order: Vec<usize> = (0..h.order()).collect();
    Ok(canonical_with_order(h, &order, cfg)?.certificate)
}

/// Result of an isomorphism test; `mapping` pairs ids of `p` with ids of `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoResult {
    pub isomorphic: bool,
    pub mapping: Option<Vec<(String, String)>>,
}

pub fn are_isomorphic(p: &GradedPoset, q: &GradedPoset) -> Result<IsoResult, IsoError> {
    if p.widths() != q.widths() || p.cover_count() != q.cover_count() {
        return Ok(IsoResult {
            isomorphic: false,
            mapping: None,
        });
    }
    let cfg = IsoConfig::default();
    let cp = canonical_labeling(p, &cfg)?;
    let cq = canonical_labeling(q, &cfg)?;
    if cp.certificate != cq.certificate {
        return Ok(IsoResult {
            isomorphic: false,
            mapping: None,
        });
    }
    let mut mapping: Vec<(String, String)> = cp
        .labeling
        .iter()
        .zip(&cq.labeling)
        .map(|(&a, &b)| (p.id(a).to_string(), q.id(b).to_string()))
        .collect();
    mapping.sort();
    Ok(IsoResult {
        isomorphic: true,
        mapping: Some(mapping),
    })
}
