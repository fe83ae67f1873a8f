//! Exhaustive construction of binomial intervals with prescribed atomic
//! numbers, level by level, with isomorph rejection.
//!
//! States are partial intervals built bottom up. Each step adds one element
//! `z` to the level under construction together with its lower covers; when
//! levels are built in pairs, the lower covers of `z` may be fresh elements
//! of the level below, which are created on the spot. Every interval closed
//! by a new element must have `B(length)` maximal chains. States are stored in
//! canonical form, so isomorphic states collapse.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::chains::{atomic_numbers, verify_binomial};
use crate::error::SeqCheckError;
use crate::iso::{canonical_form, canonical_with_order, CanonicalCertificate, IsoConfig};
use crate::poset::{interval_by_index, GradedPoset, Hasse};
use crate::sequence::AtomicSequence;

const MAX_ELEMENTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchLimits {
    /// Upper bound on expanded plus generated states.
    pub max_nodes: u64,
    pub max_seconds: f64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_nodes: 2_000_000,
            max_seconds: 3600.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub limits: SearchLimits,
    /// Collapse isomorphic partial states.
    pub iso_pruning: bool,
    /// Build middle levels two at a time.
    pub paired_levels: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            limits: SearchLimits::default(),
            iso_pruning: true,
            paired_levels: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// The certificate-least completed interval.
    Found {
        witness: GradedPoset,
        certificate: CanonicalCertificate,
    },
    /// No interval exists; no cap was hit.
    Exhausted,
    Capped {
        reason: String,
    },
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub nodes: u64,
    /// Pairwise non-isomorphic completed intervals (all of them when the
    /// search was not capped).
    pub solutions: usize,
    pub frontier_sizes: Vec<usize>,
    pub elapsed: Duration,
}

/// All binomial intervals of the given rank with atomic numbers `target`, up
/// to isomorphism, ordered by certificate.
#[derive(Clone, Debug)]
pub struct IntervalEnumeration {
    pub classes: Vec<(CanonicalCertificate, GradedPoset)>,
    pub complete: bool,
    pub report: SearchReport,
}

/// Searches for a binomial interval of rank `rank(base) + extra_ranks` with
/// atomic numbers `target` containing a copy of `base` as an initial interval.
pub fn extension_search(
    base: &GradedPoset,
    target: &AtomicSequence,
    extra_ranks: usize,
    opts: &SearchOptions,
) -> Result<SearchReport, SeqCheckError> {
    let r = base.height();
    if base.level(r).len() != 1 {
        return Err(SeqCheckError::Base(format!(
            "{} maximal elements",
            base.level(r).len()
        )));
    }
    if !verify_binomial(base).is_pass() {
        return Err(SeqCheckError::Base("not binomial".into()));
    }
    let want = target.prefix(r)?;
    match atomic_numbers(base).values() {
        Some(v) if v == want.as_slice() => {}
        Some(v) => {
            return Err(SeqCheckError::Base(format!(
                "atomic numbers {v:?}, target starts {want:?}"
            )))
        }
        None => return Err(SeqCheckError::Base("inconsistent atomic numbers".into())),
    }
    let base_cert = canonical_form(base)?;
    let (_, report) = run(target, r + extra_ranks, Some((r, base_cert)), opts, false)?;
    Ok(report)
}

pub fn enumerate_intervals(
    target: &AtomicSequence,
    rank: usize,
    opts: &SearchOptions,
) -> Result<IntervalEnumeration, SeqCheckError> {
    let (classes, report) = run(target, rank, None, opts, true)?;
    Ok(IntervalEnumeration {
        complete: !matches!(report.outcome, SearchOutcome::Capped { .. }),
        classes,
        report,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    /// Add elements of level `l` over the complete level `l - 1`.
    Single(usize),
    /// Add elements of level `l + 1`, creating level `l` along the way.
    Pair(usize),
}

impl Stage {
    fn top(self) -> usize {
        match self {
            Stage::Single(l) => l,
            Stage::Pair(l) => l + 1,
        }
    }
}

struct Ctx {
    widths: Vec<usize>,
    /// `a[l]`, `a[0]` unused.
    a: Vec<usize>,
    b: Vec<u64>,
    /// Required number of upper covers per level.
    up_need: Vec<usize>,
    stages: Vec<Stage>,
}

impl Ctx {
    fn new(
        target: &AtomicSequence,
        rank: usize,
        paired: bool,
    ) -> Result<Option<Ctx>, SeqCheckError> {
        let terms = target.prefix(rank)?;
        let mut b = vec![1u64];
        for &t in &terms {
            let next = b
                .last()
                .unwrap()
                .checked_mul(t)
                .ok_or_else(|| SeqCheckError::Config("chain counts overflow u64".into()))?;
            b.push(next);
        }
        let mut widths = Vec::with_capacity(rank + 1);
        for j in 0..=rank {
            let den = b[j] as u128 * b[rank - j] as u128;
            if !(b[rank] as u128).is_multiple_of(den) {
                return Ok(None);
            }
            widths.push((b[rank] as u128 / den) as usize);
        }
        if widths.iter().sum::<usize>() > MAX_ELEMENTS {
            return Err(SeqCheckError::Config(format!(
                "intervals of rank {rank} have {} elements",
                widths.iter().sum::<usize>()
            )));
        }
        let mut a = vec![0usize];
        a.extend(terms.iter().map(|&t| t as usize));
        let up_need = (0..=rank)
            .map(|j| if j < rank { a[rank - j] } else { 0 })
            .collect();
        let mut stages = Vec::new();
        if rank >= 2 {
            let mut l = 2;
            if paired && (rank - 2) % 2 == 1 || !paired {
                while l < rank && (!paired || l == 2) {
                    stages.push(Stage::Single(l));
                    l += 1;
                }
            }
            while l + 1 < rank {
                stages.push(Stage::Pair(l));
                l += 2;
            }
            stages.push(Stage::Single(rank));
        }
        Ok(Some(Ctx {
            widths,
            a,
            b,
            up_need,
            stages,
        }))
    }

    fn stage(&self, d: &Draft) -> Option<Stage> {
        self.stages
            .iter()
            .copied()
            .find(|s| d.width(s.top()) < self.widths[s.top()])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Draft {
    rank: Vec<usize>,
    levels: Vec<Vec<usize>>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
}

impl Hasse for Draft {
    fn order(&self) -> usize {
        self.rank.len()
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

impl Draft {
    fn start(atoms: usize) -> Draft {
        let mut d = Draft {
            rank: vec![0],
            levels: vec![vec![0]],
            up: vec![Vec::new()],
            down: vec![Vec::new()],
        };
        for _ in 0..atoms {
            d.add(1, vec![0]);
        }
        d
    }

    fn width(&self, l: usize) -> usize {
        self.levels.get(l).map_or(0, Vec::len)
    }

    fn add(&mut self, level: usize, mut down: Vec<usize>) -> usize {
        let v = self.rank.len();
        down.sort_unstable();
        for &d in &down {
            self.up[d].push(v);
        }
        self.rank.push(level);
        self.up.push(Vec::new());
        self.down.push(down);
        while self.levels.len() <= level {
            self.levels.push(Vec::new());
        }
        self.levels[level].push(v);
        v
    }

    /// `c[x][v]`: saturated chains from `x` up to `v`.
    fn chains(&self) -> Vec<Vec<u64>> {
        let n = self.rank.len();
        let mut c = vec![vec![0u64; n]; n];
        for (x, row) in c.iter_mut().enumerate() {
            row[x] = 1;
            for l in self.rank[x] + 1..self.levels.len() {
                for &v in &self.levels[l] {
                    row[v] = self.down[v].iter().map(|&d| row[d]).sum();
                }
            }
        }
        c
    }

    fn canonical(&self, cfg: &IsoConfig) -> Result<(CanonicalCertificate, Draft), SeqCheckError> {
        let order: Vec<usize> = (0..self.order()).collect();
        let canon = canonical_with_order(self, &order, cfg)?;
        let mut pos = vec![0usize; self.order()];
        for (p, &v) in canon.labeling.iter().enumerate() {
            pos[v] = p;
        }
        let mut out = Draft {
            rank: Vec::with_capacity(self.order()),
            levels: vec![Vec::new(); self.levels.len()],
            up: Vec::with_capacity(self.order()),
            down: Vec::with_capacity(self.order()),
        };
        for (p, &v) in canon.labeling.iter().enumerate() {
            out.rank.push(self.rank[v]);
            out.levels[self.rank[v]].push(p);
            let mut up: Vec<usize> = self.up[v].iter().map(|&u| pos[u]).collect();
            up.sort_unstable();
            let mut down: Vec<usize> = self.down[v].iter().map(|&u| pos[u]).collect();
            down.sort_unstable();
            out.up.push(up);
            out.down.push(down);
        }
        Ok((canon.certificate, out))
    }

    fn to_poset(&self) -> GradedPoset {
        let mut at = vec![0usize; self.order()];
        for level in &self.levels {
            for (i, &v) in level.iter().enumerate() {
                at[v] = i;
            }
        }
        let widths: Vec<usize> = self.levels.iter().map(Vec::len).collect();
        let covers = (0..self.order()).flat_map(|v| {
            let at = &at;
            let rank = &self.rank;
            self.up[v]
                .iter()
                .map(move |&u| ((rank[v], at[v]), (rank[u], at[u])))
        });
        GradedPoset::from_index_covers(&widths, covers).expect("search states are posets")
    }
}

/// One admissible lower cover for a new element, with its chain contributions.
struct Pick {
    /// `(slot, chains)` over the checked lower elements.
    contrib: Vec<(usize, u64)>,
    /// Elements of the level below it consumed when this is a fresh element.
    uses: Vec<usize>,
    fresh: bool,
}

/// Chooses `size` picks so that every interval closed by the new element has
/// the binomial number of chains.
struct Chooser<'a> {
    /// Checked lower elements: rank and required chain count.
    slot_rank: Vec<usize>,
    slot_bound: Vec<u64>,
    /// Per rank below the picks: maximal chain total of one pick.
    per_pick: Vec<u64>,
    picks: &'a [Pick],
    size: usize,
    forced: bool,
    fresh_room: usize,
    capacity: Vec<usize>,
}

impl Chooser<'_> {
    fn run(mut self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut sums = vec![0u64; self.slot_rank.len()];
        let mut chosen = Vec::with_capacity(self.size);
        self.go(0, &mut sums, &mut chosen, &mut out);
        out
    }

    fn feasible(&self, sums: &[u64], remaining: usize) -> bool {
        let mut short = vec![0u64; self.per_pick.len()];
        for (s, &v) in sums.iter().enumerate() {
            let bound = self.slot_bound[s];
            if v > bound {
                return false;
            }
            if v > 0 && v < bound {
                short[self.slot_rank[s]] += bound - v;
            }
        }
        short
            .iter()
            .zip(&self.per_pick)
            .all(|(&need, &m)| need <= remaining as u64 * m)
    }

    fn go(
        &mut self,
        from: usize,
        sums: &mut Vec<u64>,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if chosen.len() == self.size {
            if sums
                .iter()
                .zip(&self.slot_bound)
                .all(|(&v, &b)| v == 0 || v == b)
            {
                out.push(chosen.clone());
            }
            return;
        }
        let end = if self.forced && chosen.is_empty() {
            1.min(self.picks.len())
        } else {
            self.picks.len()
        };
        for k in from..end {
            let pick = &self.picks[k];
            if pick.fresh
                && (self.fresh_room == 0 || pick.uses.iter().any(|&u| self.capacity[u] == 0))
            {
                continue;
            }
            for &(s, c) in &pick.contrib {
                sums[s] += c;
            }
            if self.feasible(sums, self.size - chosen.len() - 1) {
                if pick.fresh {
                    self.fresh_room -= 1;
                    for &u in &pick.uses {
                        self.capacity[u] -= 1;
                    }
                }
                chosen.push(k);
                let next = if pick.fresh { k } else { k + 1 };
                self.go(next, sums, chosen, out);
                chosen.pop();
                if pick.fresh {
                    self.fresh_room += 1;
                    for &u in &pick.uses {
                        self.capacity[u] += 1;
                    }
                }
            }
            for &(s, c) in &pick.contrib {
                sums[s] -= c;
            }
        }
    }
}

/// Checked lower elements for a new element at rank `top`: every element of
/// rank below `top - 1`. Returns slot ids per vertex.
fn slots(ctx: &Ctx, d: &Draft, top: usize) -> (Vec<Option<usize>>, Vec<usize>, Vec<u64>) {
    let mut slot_of = vec![None; d.order()];
    let mut rank = Vec::new();
    let mut bound = Vec::new();
    for l in 0..top.saturating_sub(1) {
        for &x in &d.levels[l] {
            slot_of[x] = Some(rank.len());
            rank.push(l);
            bound.push(ctx.b[top - l]);
        }
    }
    (slot_of, rank, bound)
}

fn per_pick(ctx: &Ctx, pick_rank: usize) -> Vec<u64> {
    (0..pick_rank)
        .map(|i| ctx.b[pick_rank] / ctx.b[i])
        .collect()
}

fn existing_pick(chains: &[Vec<u64>], slot_of: &[Option<usize>], y: usize) -> Pick {
    let contrib = slot_of
        .iter()
        .enumerate()
        .filter_map(|(x, s)| s.map(|s| (s, chains[x][y])))
        .filter(|&(_, c)| c > 0)
        .collect();
    Pick {
        contrib,
        uses: Vec::new(),
        fresh: false,
    }
}

fn deficit(ctx: &Ctx, d: &Draft, v: usize) -> usize {
    ctx.up_need[d.rank[v]] - d.up[v].len()
}

fn expand(ctx: &Ctx, d: &Draft) -> Vec<Draft> {
    let Some(stage) = ctx.stage(d) else {
        return Vec::new();
    };
    let chains = d.chains();
    match stage {
        Stage::Single(l) => {
            let pool: Vec<usize> = d.levels[l - 1]
                .iter()
                .copied()
                .filter(|&v| deficit(ctx, d, v) > 0)
                .collect();
            let (slot_of, slot_rank, slot_bound) = slots(ctx, d, l);
            let picks: Vec<Pick> = pool
                .iter()
                .map(|&y| existing_pick(&chains, &slot_of, y))
                .collect();
            let chooser = Chooser {
                slot_rank,
                slot_bound,
                per_pick: per_pick(ctx, l - 1),
                picks: &picks,
                size: ctx.a[l],
                forced: true,
                fresh_room: 0,
                capacity: Vec::new(),
            };
            chooser
                .run()
                .into_iter()
                .map(|ks| {
                    let mut child = d.clone();
                    child.add(l, ks.iter().map(|&k| pool[k]).collect());
                    child
                })
                .collect()
        }
        Stage::Pair(l) => {
            // fresh level-l candidates: admissible a_l-subsets of level l-1
            let below = &d.levels[l - 1];
            let (slot_of_l, rank_l, bound_l) = slots(ctx, d, l);
            let base_picks: Vec<Pick> = below
                .iter()
                .map(|&y| existing_pick(&chains, &slot_of_l, y))
                .collect();
            let fresh_sets = Chooser {
                slot_rank: rank_l,
                slot_bound: bound_l,
                per_pick: per_pick(ctx, l - 1),
                picks: &base_picks,
                size: ctx.a[l],
                forced: false,
                fresh_room: 0,
                capacity: Vec::new(),
            }
            .run();

            let pool: Vec<usize> = d
                .levels
                .get(l)
                .map(|lv| {
                    lv.iter()
                        .copied()
                        .filter(|&v| deficit(ctx, d, v) > 0)
                        .collect()
                })
                .unwrap_or_default();
            let (slot_of, slot_rank, slot_bound) = slots(ctx, d, l + 1);
            let mut picks: Vec<Pick> = pool
                .iter()
                .map(|&y| existing_pick(&chains, &slot_of, y))
                .collect();
            for set in &fresh_sets {
                let members: Vec<usize> = set.iter().map(|&k| below[k]).collect();
                let mut acc = vec![0u64; slot_rank.len()];
                for &m in &members {
                    for (x, s) in slot_of.iter().enumerate() {
                        if let Some(s) = s {
                            acc[*s] += chains[x][m];
                        }
                    }
                }
                picks.push(Pick {
                    contrib: acc
                        .into_iter()
                        .enumerate()
                        .filter(|&(_, c)| c > 0)
                        .collect(),
                    uses: members,
                    fresh: true,
                });
            }
            let capacity: Vec<usize> = (0..d.order())
                .map(|v| {
                    if d.rank[v] == l - 1 {
                        deficit(ctx, d, v)
                    } else {
                        0
                    }
                })
                .collect();
            let chooser = Chooser {
                slot_rank,
                slot_bound,
                per_pick: per_pick(ctx, l),
                picks: &picks,
                size: ctx.a[l + 1],
                forced: !pool.is_empty(),
                fresh_room: ctx.widths[l] - d.width(l),
                capacity,
            };
            chooser
                .run()
                .into_iter()
                .map(|ks| {
                    let mut child = d.clone();
                    let mut lower = Vec::with_capacity(ks.len());
                    for &k in &ks {
                        if k < pool.len() {
                            lower.push(pool[k]);
                        } else {
                            lower.push(child.add(l, picks[k].uses.clone()));
                        }
                    }
                    child.add(l + 1, lower);
                    child
                })
                .collect()
        }
    }
}

fn is_complete(ctx: &Ctx, d: &Draft) -> bool {
    ctx.stage(d).is_none()
}

/// Does some `[0, z]` at rank `r` have the given certificate?
fn contains_base(d: &Draft, r: usize, cert: &CanonicalCertificate) -> Result<bool, SeqCheckError> {
    let p = d.to_poset();
    for &z in p.level(r) {
        let iv = interval_by_index(&p, p.bottom(), z)?;
        if &canonical_form(iv.poset())? == cert {
            return Ok(true);
        }
    }
    Ok(false)
}

type Classes = Vec<(CanonicalCertificate, GradedPoset)>;

fn run(
    target: &AtomicSequence,
    rank: usize,
    base: Option<(usize, CanonicalCertificate)>,
    opts: &SearchOptions,
    keep_all: bool,
) -> Result<(Classes, SearchReport), SeqCheckError> {
    let started = Instant::now();
    let limits = opts.limits;
    if limits.max_nodes == 0 || limits.max_seconds.is_nan() || limits.max_seconds <= 0.0 {
        return Err(SeqCheckError::Config("caps must be positive".into()));
    }
    if rank == 0 {
        return Err(SeqCheckError::Config("target rank must be positive".into()));
    }
    let mut report = SearchReport {
        outcome: SearchOutcome::Exhausted,
        nodes: 0,
        solutions: 0,
        frontier_sizes: Vec::new(),
        elapsed: Duration::ZERO,
    };
    let Some(ctx) = Ctx::new(target, rank, opts.paired_levels)? else {
        report.elapsed = started.elapsed();
        return Ok((Vec::new(), report));
    };
    let cfg = IsoConfig::default();
    let nodes = AtomicU64::new(0);
    let over = AtomicBool::new(false);
    let deadline = Duration::from_secs_f64(limits.max_seconds);
    let check_caps = |n: u64| {
        if n > limits.max_nodes || started.elapsed() > deadline {
            over.store(true, Ordering::Relaxed);
        }
    };

    let start = Draft::start(ctx.widths.get(1).copied().unwrap_or(0));
    let mut frontier = vec![if opts.iso_pruning {
        start.canonical(&cfg)?.1
    } else {
        start
    }];
    let mut solutions: Vec<(CanonicalCertificate, Draft)> = Vec::new();
    let mut capped = None;

    while !frontier.is_empty() {
        report.frontier_sizes.push(frontier.len());
        let (done, open): (Vec<Draft>, Vec<Draft>) =
            frontier.into_iter().partition(|d| is_complete(&ctx, d));
        for d in done {
            if let Some((r, cert)) = &base {
                if !contains_base(&d, *r, cert)? {
                    continue;
                }
            }
            solutions.push((d.canonical(&cfg)?.0, d));
        }
        if open.is_empty() {
            break;
        }
        let children: Vec<Vec<Draft>> = open
            .par_iter()
            .map(|d| {
                if over.load(Ordering::Relaxed) {
                    return Vec::new();
                }
                let kids = expand(&ctx, d);
                let n = nodes.fetch_add(1 + kids.len() as u64, Ordering::Relaxed);
                check_caps(n + 1 + kids.len() as u64);
                kids
            })
            .collect();
        if over.load(Ordering::Relaxed) {
            capped = Some(if started.elapsed() > deadline {
                format!("time cap of {}s reached", limits.max_seconds)
            } else {
                format!("node cap of {} reached", limits.max_nodes)
            });
            break;
        }
        let children: Vec<Draft> = children.into_iter().flatten().collect();
        frontier = if opts.iso_pruning {
            let mut canon: Vec<(CanonicalCertificate, Draft)> = children
                .par_iter()
                .map(|c| c.canonical(&cfg))
                .collect::<Result<_, _>>()?;
            canon.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
            let mut seen = HashSet::new();
            canon
                .into_iter()
                .filter(|(c, _)| seen.insert(c.clone()))
                .map(|(_, d)| d)
                .collect()
        } else {
            children
        };
    }

    solutions.sort_by(|a, b| a.0.cmp(&b.0));
    solutions.dedup_by(|a, b| a.0 == b.0);
    report.nodes = nodes.load(Ordering::Relaxed);
    report.solutions = solutions.len();
    report.elapsed = started.elapsed();
    let classes: Classes = if keep_all {
        solutions
            .iter()
            .map(|(c, d)| (c.clone(), d.to_poset()))
            .collect()
    } else {
        Vec::new()
    };
    report.outcome = match (solutions.first(), capped) {
        (Some((cert, d)), _) => SearchOutcome::Found {
            witness: d.to_poset(),
            certificate: cert.clone(),
        },
        (None, Some(reason)) => SearchOutcome::Capped { reason },
        (None, None) => SearchOutcome::Exhausted,
    };
    Ok((classes, report))
}
