use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use binposet::chains::{count_maximal_chains, verify_binomial};
use binposet::classify::{check_partition_avoidance, AvoidanceVerdict};
use binposet::construct::{poset_from_string, stripped_boolean_interval};
use binposet::iso::{are_isomorphic, canonical_form};
use binposet::seqcheck::coefficient_parts;
use binposet::{interval, GradedPoset};

/// Random graded poset with a unique bottom and level widths in `1..=max_width`.
fn random_poset(rng: &mut StdRng, height: usize, max_width: usize) -> GradedPoset {
    let mut widths = vec![1];
    for _ in 0..height {
        widths.push(rng.gen_range(1..=max_width));
    }
    let name = |r: usize, i: usize| format!("v{r}_{i}");
    let mut covers: BTreeSet<(String, String)> = BTreeSet::new();
    for r in 1..=height {
        for i in 0..widths[r] {
            let k = rng.gen_range(1..=widths[r - 1]);
            let mut below: Vec<usize> = (0..widths[r - 1]).collect();
            below.shuffle(rng);
            for &j in &below[..k] {
                covers.insert((name(r - 1, j), name(r, i)));
            }
        }
        for j in 0..widths[r - 1] {
            if !covers.iter().any(|(a, _)| *a == name(r - 1, j)) {
                let i = rng.gen_range(0..widths[r]);
                covers.insert((name(r - 1, j), name(r, i)));
            }
        }
    }
    let levels: Vec<Vec<String>> = widths
        .iter()
        .enumerate()
        .map(|(r, &w)| (0..w).map(|i| name(r, i)).collect())
        .collect();
    GradedPoset::new(levels, covers.into_iter().collect()).unwrap()
}

/// Same poset with fresh ids and shuffled level and cover order.
fn relabel(p: &GradedPoset, rng: &mut StdRng) -> GradedPoset {
    let mut names: Vec<usize> = (0..p.len()).collect();
    names.shuffle(rng);
    let fresh = |v: usize| format!("e{}", names[v]);
    let levels: Vec<Vec<String>> = p
        .levels()
        .iter()
        .map(|l| {
            let mut l: Vec<String> = l.iter().map(|&v| fresh(v)).collect();
            l.shuffle(rng);
            l
        })
        .collect();
    let mut covers: Vec<(String, String)> = (0..p.len())
        .flat_map(|v| p.up(v).iter().map(move |&u| (v, u)))
        .map(|(v, u)| (fresh(v), fresh(u)))
        .collect();
    covers.shuffle(rng);
    GradedPoset::new(levels, covers).unwrap()
}

/// Saturated chains from `x` to `y` by explicit path enumeration.
fn paths(p: &GradedPoset, x: usize, y: usize) -> u64 {
    if x == y {
        return 1;
    }
    p.up(x)
        .iter()
        .filter(|&&u| p.rank(u) <= p.rank(y))
        .map(|&u| paths(p, u, y))
        .sum()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Exhaustive search over rank-preserving bijections.
fn brute_isomorphic(p: &GradedPoset, q: &GradedPoset) -> bool {
    if p.widths() != q.widths() || p.cover_count() != q.cover_count() {
        return false;
    }
    let qcovers: BTreeSet<(usize, usize)> = (0..q.len())
        .flat_map(|v| q.up(v).iter().map(move |&u| (v, u)))
        .collect();
    let per_level: Vec<Vec<Vec<usize>>> = q.levels().iter().map(|l| permutations(l)).collect();
    let mut choice = vec![0usize; per_level.len()];
    loop {
        let mut map = vec![0usize; p.len()];
        for (r, l) in p.levels().iter().enumerate() {
            for (k, &v) in l.iter().enumerate() {
                map[v] = per_level[r][choice[r]][k];
            }
        }
        if (0..p.len()).all(|v| p.up(v).iter().all(|&u| qcovers.contains(&(map[v], map[u])))) {
            return true;
        }
        let mut r = 0;
        loop {
            if r == choice.len() {
                return false;
            }
            choice[r] += 1;
            if choice[r] < per_level[r].len() {
                break;
            }
            choice[r] = 0;
            r += 1;
        }
    }
}

/// Type (1,1,2,...) poset: fixed bottom block, then each 4-4 section is the
/// union of two disjoint perfect matchings, drawn at random.
fn random_sections(rng: &mut StdRng, sections: usize) -> GradedPoset {
    let mut levels = vec![vec!["0".to_string()], vec!["1.0".into(), "1.1".into()]];
    let mut covers: Vec<(String, String)> = vec![
        ("0".into(), "1.0".into()),
        ("0".into(), "1.1".into()),
        ("1.0".into(), "2.0".into()),
        ("1.0".into(), "2.2".into()),
        ("1.1".into(), "2.1".into()),
        ("1.1".into(), "2.3".into()),
    ];
    levels.push((0..4).map(|i| format!("2.{i}")).collect());
    for s in 0..sections {
        let (lo, hi) = (s + 2, s + 3);
        let (sigma, tau) = loop {
            let mut a: Vec<usize> = (0..4).collect();
            let mut b: Vec<usize> = (0..4).collect();
            a.shuffle(rng);
            b.shuffle(rng);
            if (0..4).all(|j| a[j] != b[j]) {
                break (a, b);
            }
        };
        for j in 0..4 {
            covers.push((format!("{lo}.{}", sigma[j]), format!("{hi}.{j}")));
            covers.push((format!("{lo}.{}", tau[j]), format!("{hi}.{j}")));
        }
        levels.push((0..4).map(|i| format!("{hi}.{i}")).collect());
    }
    GradedPoset::new(levels, covers).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_counts_match_path_enumeration(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_poset(&mut rng, 4, 3);
        for x in 0..p.len() {
            for y in 0..p.len() {
                let Ok(iv) = interval(&p, p.id(x), p.id(y)) else { continue };
                prop_assert_eq!(count_maximal_chains(&iv), BigUint::from(paths(&p, x, y)));
            }
        }
    }

    #[test]
    fn interval_of_interval_is_itself(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_poset(&mut rng, 4, 3);
        for x in 0..p.len() {
            for y in 0..p.len() {
                let Ok(iv) = interval(&p, p.id(x), p.id(y)) else { continue };
                let again = interval(iv.poset(), p.id(x), p.id(y)).unwrap();
                prop_assert_eq!(again.poset().to_json(), iv.poset().to_json());
            }
        }
    }

    #[test]
    fn iso_agrees_with_brute_force(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_poset(&mut rng, 3, 3);
        let q = if rng.gen_bool(0.5) { relabel(&p, &mut rng) } else { random_poset(&mut rng, 3, 3) };
        prop_assume!(p.len() <= 12 && q.len() <= 12);
        let fast = are_isomorphic(&p, &q).unwrap().isomorphic;
        prop_assert_eq!(fast, brute_isomorphic(&p, &q));
        prop_assert_eq!(fast, canonical_form(&p).unwrap() == canonical_form(&q).unwrap());
    }

    #[test]
    fn coefficient_integrality_is_symmetric(
        steps in proptest::collection::vec(0u64..4, 1..8),
        i in 1usize..5,
        j in 1usize..5,
    ) {
        let mut terms = vec![1u64];
        for s in steps {
            let last = *terms.last().unwrap();
            terms.push(last + s);
        }
        prop_assume!(i + j <= terms.len());
        let (n1, d1) = coefficient_parts(&terms, i, j);
        let (n2, d2) = coefficient_parts(&terms, j, i);
        prop_assert_eq!(n1 % d1 == BigUint::from(0u32), n2 % d2 == BigUint::from(0u32));
    }

    #[test]
    fn avoidance_iff_binomial(seed in any::<u64>(), sections in 1usize..5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_sections(&mut rng, sections);
        let avoids = check_partition_avoidance(&p).unwrap() == AvoidanceVerdict::Pass;
        prop_assert_eq!(avoids, verify_binomial(&p).is_pass());
    }
}

#[test]
fn certificates_survive_relabeling() {
    let mut rng = StdRng::seed_from_u64(7);
    let posets = vec![
        poset_from_string(&"1212".parse().unwrap(), 6).unwrap(),
        stripped_boolean_interval(3, 2).unwrap(),
        random_poset(&mut rng, 4, 4),
    ];
    for p in &posets {
        let cert = canonical_form(p).unwrap();
        for _ in 0..1000 {
            assert_eq!(canonical_form(&relabel(p, &mut rng)).unwrap(), cert);
        }
    }
}

#[test]
fn relabeling_oracle_sees_all_pairs() {
    // the oracle itself: relabeled copies are isomorphic, a perturbed copy is not
    let p = stripped_boolean_interval(3, 1).unwrap();
    let mut rng = StdRng::seed_from_u64(1);
    assert!(brute_isomorphic(&p, &relabel(&p, &mut rng)));
    let chain = GradedPoset::new(
        vec![vec!["a"], vec!["b"], vec!["c"]],
        vec![("a", "b"), ("b", "c")],
    )
    .unwrap();
    assert!(!brute_isomorphic(&p, &chain));
    let counts: BTreeMap<usize, u64> = (0..p.len())
        .map(|v| (v, paths(&p, p.bottom(), v)))
        .collect();
    assert_eq!(counts.values().max(), Some(&6));
}

#[test]
fn random_sections_hit_both_verdicts() {
    let mut seen = BTreeSet::new();
    for seed in 0..200 {
        let p = random_sections(&mut StdRng::seed_from_u64(seed), 3);
        seen.insert(verify_binomial(&p).is_pass());
    }
    assert_eq!(seen.len(), 2);
}
