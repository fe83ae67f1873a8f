//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;

use binposet::chains::{
    atomic_numbers, compare_rank_sizes, verify_binomial, AtomicNumbers, BinomialVerdict,
};
use binposet::classify::{
    enumerate_interval_classes, phi, valid_words, versal_string, SectionString,
};
use binposet::construct::{
    debruijn_poset, divisible_poset, m_interval, poset_from_string, stripped_boolean_interval,
};
use binposet::iso::{are_isomorphic, canonical_form};
use binposet::poset::Interval;
use binposet::seqcheck::{
    check_compatibility, check_r_equivalence, check_terms, enumerate_intervals, extension_search,
    SearchOptions, SearchOutcome, Violation,
};
use binposet::{AtomicSequence, GradedPoset};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn seq(s: &str) -> AtomicSequence {
    s.parse().expect("valid sequence")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn string_poset(w: &SectionString) -> GradedPoset {
    poset_from_string(w, w.len() + 2).expect("valid word")
}

fn type_112_atoms(height: usize) -> Vec<u64> {
    (1..=height).map(|n| if n <= 2 { 1 } else { 2 }).collect()
}

/// Word counts without adjacent 2s, by the recurrence alone.
fn word_count(len: usize) -> usize {
    let (mut prev, mut cur) = (1usize, 1usize);
    for _ in 0..len {
        (prev, cur) = (cur, prev + cur);
    }
    cur
}

fn criterion_1() -> Check {
    let mut total = 0;
    for len in 0..=6 {
        for w in valid_words(len) {
            let p = string_poset(&w);
            let back = phi(&p).map_err(|e| format!("phi({w}): {e}"))?;
            ensure(back == w, || format!("phi round trip {w} -> {back}"))?;
            ensure(verify_binomial(&p).is_pass(), || {
                format!("{w} not binomial")
            })?;
            let atoms = atomic_numbers(&p);
            ensure(
                atoms.values() == Some(&type_112_atoms(p.height())[..]),
                || format!("{w}: atoms {atoms:?}"),
            )?;
            total += 1;
        }
    }
    ensure(total == 53, || format!("{total} words"))?;
    Ok(format!("{total} words of length 0..=6 round trip"))
}

fn criterion_2() -> Check {
    let mut pairs = 0;
    for len in 0..=5 {
        let posets: Vec<(SectionString, GradedPoset)> = valid_words(len)
            .into_iter()
            .map(|w| {
                let p = string_poset(&w);
                (w, p)
            })
            .collect();
        for (u, p) in &posets {
            for (v, q) in &posets {
                let iso = are_isomorphic(p, q).map_err(|e| e.to_string())?.isomorphic;
                ensure(iso == (u == v), || {
                    format!("{u} vs {v}: isomorphic = {iso}")
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} ordered pairs"))
}

fn criterion_3() -> Check {
    let w = versal_string(5);
    let p = string_poset(&w);
    let mut counts = Vec::new();
    for n in 1..=9 {
        let classes = enumerate_interval_classes(&p, n).map_err(|e| e.to_string())?;
        let expected = if n < 4 { 1 } else { word_count(n - 4) };
        ensure(classes.count() == expected, || {
            format!(
                "length {n}: {} classes, recurrence gives {expected}",
                classes.count()
            )
        })?;
        counts.push(classes.count());
    }
    ensure(counts[..8] == [1, 1, 1, 1, 2, 3, 5, 8], || {
        format!("{counts:?}")
    })?;
    Ok(format!("lengths 1..=9 -> {counts:?}"))
}

fn check_rank_sizes(p: &GradedPoset, s: &AtomicSequence, label: &str) -> Result<(), String> {
    let measured = atomic_numbers(p);
    let prefix = s.prefix(p.height()).map_err(|e| e.to_string())?;
    ensure(measured.values() == Some(&prefix[..]), || {
        format!("{label}: atoms {measured:?}")
    })?;
    for row in compare_rank_sizes(p, s).map_err(|e| e.to_string())? {
        ensure(row.agrees(), || {
            format!(
                "{label} level {}: {} vs {}",
                row.level, row.observed, row.predicted
            )
        })?;
    }
    // levels past the head have reached the supremal width
    let sup = s
        .profile()
        .predicted_sup_width()
        .map_err(|e| e.to_string())?;
    for (level, &w) in p.widths().iter().enumerate().skip(s.head().len()) {
        ensure(sup == BigRational::from_integer(w.into()), || {
            format!("{label} level {level}: width {w}, sup {sup}")
        })?;
    }
    Ok(())
}

fn criterion_4() -> Check {
    let mut checked = 0;
    for len in 0..=6 {
        for w in valid_words(len) {
            check_rank_sizes(&string_poset(&w), &seq("1,1,2*"), &format!("string {w}"))?;
            checked += 1;
        }
    }
    for m in 0..=3 {
        for n in 1..=3 {
            for height in 1..=8 {
                let p = debruijn_poset(m, n, height).map_err(|e| e.to_string())?;
                let tail = if m == 0 { 1 } else { n as u64 };
                let s = AtomicSequence::with_tail(vec![1; m], tail).unwrap();
                check_rank_sizes(&p, &s, &format!("debruijn({m},{n},{height})"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} posets"))
}

fn check_b_law(p: &GradedPoset, label: &str) -> Result<(), String> {
    let atoms = atomic_numbers(p)
        .values()
        .ok_or_else(|| format!("{label}: inconsistent atoms"))?
        .to_vec();
    let BinomialVerdict::Pass { chain_counts } = verify_binomial(p) else {
        return Err(format!("{label}: not binomial"));
    };
    let mut b = BigUint::from(1u32);
    for (n, count) in chain_counts.iter().enumerate() {
        if n > 0 {
            b *= atoms[n - 1];
        }
        ensure(*count == b, || {
            format!("{label}: length {n} has {count} chains, B = {b}")
        })?;
    }
    Ok(())
}

fn criterion_5() -> Check {
    let mut checked = 0;
    for len in 0..=6 {
        for w in valid_words(len) {
            let p = string_poset(&w);
            check_b_law(&p, &format!("string {w}"))?;
            let BinomialVerdict::Pass { chain_counts } = verify_binomial(&p) else {
                unreachable!()
            };
            for (n, c) in chain_counts.iter().enumerate() {
                let want = BigUint::from(1u32) << n.saturating_sub(2);
                ensure(*c == want, || {
                    format!("string {w}: length {n} has {c} chains")
                })?;
            }
            checked += 1;
        }
    }
    let mut others: Vec<(String, GradedPoset)> = Vec::new();
    for m in 0..=3 {
        for n in 1..=3 {
            others.push((
                format!("debruijn({m},{n},6)"),
                debruijn_poset(m, n, 6).unwrap(),
            ));
        }
    }
    for n in 2..=5 {
        for k in 1..=3 {
            others.push((
                format!("strip({n},{k})"),
                stripped_boolean_interval(n, k).unwrap(),
            ));
        }
    }
    for m in 1..=5 {
        others.push((format!("m_interval({m})"), m_interval(m).unwrap()));
    }
    for (s, h) in [
        ("1,2,4*", 4),
        ("1,1,2,6*", 5),
        ("1,3,6,12*", 4),
        ("1,2,2,4,8", 5),
    ] {
        others.push((
            format!("divisible({s})"),
            divisible_poset(&seq(s), h).unwrap(),
        ));
    }
    for (label, p) in &others {
        check_b_law(p, label)?;
        checked += 1;
    }
    Ok(format!(
        "{checked} posets, type (1,1,2,...) counts are max(1, 2^(n-2))"
    ))
}

fn criterion_6() -> Check {
    for n in 2..=5 {
        for k in 1..=3 {
            let p = stripped_boolean_interval(n, k).map_err(|e| e.to_string())?;
            let mut want: Vec<u64> = (1..n as u64).collect();
            want.push((k * n) as u64);
            ensure(verify_binomial(&p).is_pass(), || {
                format!("strip({n},{k}) not binomial")
            })?;
            let got = atomic_numbers(&p);
            ensure(got == AtomicNumbers::Consistent(want.clone()), || {
                format!("strip({n},{k}): {got:?}")
            })?;
            if n >= 3 {
                let iv = Interval::from_poset(p).map_err(|e| e.to_string())?;
                let r = check_r_equivalence(&iv).map_err(|e| e.to_string())?;
                ensure(r.k == k && r.classes.iter().all(|c| c.len() == n), || {
                    format!("strip({n},{k}): {} classes", r.k)
                })?;
            }
        }
    }
    Ok("n in 2..=5, k in 1..=3".into())
}

fn outcome_name(o: &SearchOutcome) -> String {
    match o {
        SearchOutcome::Found { .. } => "found".into(),
        SearchOutcome::Exhausted => "exhausted".into(),
        SearchOutcome::Capped { reason } => format!("capped ({reason})"),
    }
}

fn criterion_7() -> Check {
    let base = stripped_boolean_interval(4, 1).unwrap();
    let r = extension_search(&base, &seq("1,2,3,4,4"), 1, &SearchOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(r.outcome == SearchOutcome::Exhausted, || {
        outcome_name(&r.outcome)
    })?;
    Ok(format!("exhausted after {} nodes", r.nodes))
}

fn criterion_8() -> Check {
    let admissible: Vec<u64> = (4..=12)
        .filter(|&a4| check_terms(&[1, 3, 4, a4], 4).unwrap().passes())
        .collect();
    ensure(admissible == [6, 9, 12], || {
        format!("admissible a4 {admissible:?}")
    })?;
    let base = m_interval(3).unwrap();
    let mut notes = Vec::new();
    for a4 in admissible {
        let target = AtomicSequence::finite(vec![1, 3, 4, a4]).unwrap();
        let r = extension_search(&base, &target, 1, &SearchOptions::default())
            .map_err(|e| e.to_string())?;
        ensure(r.outcome == SearchOutcome::Exhausted, || {
            format!("a4 = {a4}: {}", outcome_name(&r.outcome))
        })?;
        notes.push(format!("a4={a4}: {} nodes", r.nodes));
    }
    Ok(format!("exhausted for {}", notes.join(", ")))
}

fn criterion_9() -> Check {
    let ok = check_compatibility(&seq("1,2,3,4,4"), 5).map_err(|e| e.to_string())?;
    ensure(ok.passes(), || format!("(1,2,3,4,4): {:?}", ok.violation))?;
    let bad = check_compatibility(&seq("1,2,3,3"), 4).map_err(|e| e.to_string())?;
    ensure(
        matches!(
            bad.violation,
            Some(Violation::NonIntegral { i: 2, j: 2, .. })
        ),
        || format!("(1,2,3,3): {:?}", bad.violation),
    )?;
    let tail = check_compatibility(&seq("1,2,3,4,4,6*"), 12).map_err(|e| e.to_string())?;
    ensure(tail.passes(), || {
        format!("(1,2,3,4,4,6*): {:?}", tail.violation)
    })?;
    Ok("(1,2,3,4,4) passes, (1,2,3,3) fails at (2,2), (1,2,3,4,4,6*) passes to 12".into())
}

fn criterion_10() -> Check {
    let e = enumerate_intervals(&seq("1,3,4"), 3, &SearchOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(e.complete, || "enumeration capped".into())?;
    let expected = canonical_form(&m_interval(3).unwrap()).map_err(|e| e.to_string())?;
    let certs: Vec<_> = e.classes.iter().map(|(c, _)| c.clone()).collect();
    ensure(certs == [expected.clone()], || {
        format!("{} classes", certs.len())
    })?;
    Ok(format!(
        "one class, certificate {}",
        &expected.to_hex()[..16]
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("string round trip", criterion_1),
        ("classification by word", criterion_2),
        ("Fibonacci interval counts", criterion_3),
        ("rank-size formula", criterion_4),
        ("B(n) chain law", criterion_5),
        ("n | a_n criterion", criterion_6),
        ("(1,2,3,4,4) not realizable", criterion_7),
        ("(1,3,4) not extendable", criterion_8),
        ("compatibility checker", criterion_9),
        ("(1,3,4) interval unique", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = run();
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
