//! `binposet`: build, verify, classify and search binomial poset truncations.
//!
//! Reports are TSV on stdout, diagnostics on stderr. Exit codes: 0 pass or
//! found, 1 fail or exhausted, 2 unreadable input, 3 capped or unknown.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use binposet::chains::{atomic_numbers, verify_binomial, AtomicNumbers, BinomialVerdict};
use binposet::classify::{enumerate_interval_classes, phi};
use binposet::construct::{
    debruijn_poset, divisible_poset, m_interval, poset_from_string, stripped_boolean_interval,
};
use binposet::seqcheck::{
    check_terms, decide_family, enumerate_intervals, extension_search, Decision, SearchLimits,
    SearchOptions, SearchOutcome, SearchReport,
};
use binposet::sequence::parse_terms;
use binposet::{AtomicSequence, GradedPoset};

const THREADS_VAR: &str = "BINPOSET_THREADS";

#[derive(Parser)]
#[command(name = "binposet", version, about = "Binomial poset truncations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a poset and write it as JSON.
    Build {
        #[command(subcommand)]
        kind: BuildKind,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check the binomial property and report chain counts and atomic numbers.
    Verify { file: PathBuf },
    /// Print the section string of a type (1,1,2,...) poset.
    Classify { file: PathBuf },
    /// Tabulate isomorphism classes of intervals of one length.
    Intervals {
        file: PathBuf,
        #[arg(long)]
        length: usize,
    },
    /// Check the compatibility condition on an atomic sequence.
    CheckSeq {
        /// Comma separated terms; a trailing `*` marks the constant tail.
        sequence: String,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Decide realizability for the known families.
    Decide {
        sequence: String,
        /// Write the realizing poset here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Search for an extension of a base interval with the target numbers.
    SearchExtension {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1)]
        extra_ranks: usize,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the witness here when one is found.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Enumerate all binomial intervals of a rank with the target numbers.
    SearchIntervals {
        #[arg(long)]
        target: String,
        #[arg(long)]
        rank: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Write a Graphviz Hasse diagram.
    ExportDot {
        file: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BuildKind {
    /// Type (1,1,2,...) poset with a given section string.
    String {
        #[arg(long)]
        word: String,
        /// Defaults to the word length plus 2.
        #[arg(long)]
        height: Option<usize>,
    },
    /// Word poset realizing (1^m, n, n, ...).
    Debruijn {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        height: usize,
    },
    /// k copies of the boolean lattice with bottoms and tops identified.
    BooleanStrip {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// The rank-3 interval with atomic numbers (1, m, m+1).
    MInterval {
        #[arg(long)]
        m: usize,
    },
    /// Poset realizing a sequence in which each term divides the next.
    Divisible {
        #[arg(long)]
        sequence: String,
        #[arg(long)]
        height: usize,
    },
}

#[derive(Args)]
struct OutArgs {
    /// JSON output path; stdout when absent.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Also write a DOT diagram here.
    #[arg(long, global = true)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    max_nodes: Option<u64>,
    #[arg(long)]
    max_seconds: Option<f64>,
    /// Keep isomorphic partial states apart.
    #[arg(long)]
    no_iso_pruning: bool,
    /// Build one level at a time.
    #[arg(long)]
    single_levels: bool,
}

impl SearchArgs {
    fn options(&self) -> SearchOptions {
        let d = SearchLimits::default();
        SearchOptions {
            limits: SearchLimits {
                max_nodes: self.max_nodes.unwrap_or(d.max_nodes),
                max_seconds: self.max_seconds.unwrap_or(d.max_seconds),
            },
            iso_pruning: !self.no_iso_pruning,
            paired_levels: !self.single_levels,
        }
    }
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn input(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn failed(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 1,
        error: error.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn load(path: &Path) -> Result<GradedPoset, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(input)?;
    GradedPoset::from_json(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(input)
}

fn sequence(text: &str) -> Result<AtomicSequence, Failure> {
    text.parse::<AtomicSequence>()
        .with_context(|| format!("sequence {text:?}"))
        .map_err(input)
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(failed),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build(kind: &BuildKind, out: &OutArgs) -> Outcome {
    let poset = match kind {
        BuildKind::String { word, height } => {
            let w = word.parse().map_err(input)?;
            poset_from_string(&w, height.unwrap_or(word.len() + 2))
        }
        BuildKind::Debruijn { m, n, height } => debruijn_poset(*m, *n, *height),
        BuildKind::BooleanStrip { n, k } => stripped_boolean_interval(*n, *k),
        BuildKind::MInterval { m } => m_interval(*m),
        BuildKind::Divisible {
            sequence: s,
            height,
        } => divisible_poset(&sequence(s)?, *height),
    }
    .map_err(input)?;
    write_or_print(out.out.as_deref(), &poset.to_json())?;
    if let Some(dot) = &out.dot {
        write_or_print(Some(dot), &poset.to_dot())?;
    }
    eprintln!(
        "built {} elements, widths {:?}",
        poset.len(),
        poset.widths()
    );
    Ok(0)
}

fn verify(file: &Path) -> Outcome {
    let p = load(file)?;
    println!("widths\t{}", join(&p.widths()));
    match verify_binomial(&p) {
        BinomialVerdict::Pass { chain_counts } => {
            println!("verdict\tpass");
            for (n, c) in chain_counts.iter().enumerate() {
                println!("chains\t{n}\t{c}");
            }
            match atomic_numbers(&p) {
                AtomicNumbers::Consistent(v) => println!("atoms\t{}", join(&v)),
                AtomicNumbers::Inconsistent { length, .. } => {
                    println!("atoms\tinconsistent at length {length}")
                }
            }
            Ok(0)
        }
        BinomialVerdict::Fail { first, second } => {
            println!("verdict\tfail");
            for w in [first, second] {
                println!(
                    "witness\t{}\t{}\t{}\t{}",
                    w.length, w.bottom, w.top, w.count
                );
            }
            Ok(1)
        }
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn print_report(r: &SearchReport) {
    let outcome = match &r.outcome {
        SearchOutcome::Found { .. } => "found".to_string(),
        SearchOutcome::Exhausted => "exhausted".to_string(),
        SearchOutcome::Capped { reason } => {
            eprintln!("{reason}");
            "capped".to_string()
        }
    };
    println!("outcome\t{outcome}");
    println!("nodes\t{}", r.nodes);
    println!("solutions\t{}", r.solutions);
    println!("seconds\t{:.3}", r.elapsed.as_secs_f64());
}

fn outcome_code(o: &SearchOutcome) -> u8 {
    match o {
        SearchOutcome::Found { .. } => 0,
        SearchOutcome::Exhausted => 1,
        SearchOutcome::Capped { .. } => 3,
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Build { kind, out } => build(&kind, &out),
        Command::Verify { file } => verify(&file),
        Command::Classify { file } => {
            let p = load(&file)?;
            println!("{}", phi(&p).map_err(failed)?);
            Ok(0)
        }
        Command::Intervals { file, length } => {
            let p = load(&file)?;
            let classes = enumerate_interval_classes(&p, length).map_err(failed)?;
            eprintln!("{} classes of length {length}", classes.count());
            println!("length\tclasses\tbottom\ttop\tmultiplicity\tcertificate");
            for c in &classes.classes {
                println!(
                    "{length}\t{}\t{}\t{}\t{}\t{}",
                    classes.count(),
                    c.bottom,
                    c.top,
                    c.multiplicity,
                    c.certificate
                );
            }
            Ok(0)
        }
        Command::CheckSeq { sequence, horizon } => {
            let (head, tail) = parse_terms(&sequence).map_err(input)?;
            let horizon = horizon.unwrap_or(match tail {
                Some(_) => 3 * (head.len() + 1),
                None => head.len(),
            });
            let terms: Vec<u64> = (0..horizon)
                .map(|i| head.get(i).copied().or(tail))
                .collect::<Option<_>>()
                .ok_or_else(|| {
                    input(anyhow!(
                        "sequence has {} terms, horizon {horizon}",
                        head.len()
                    ))
                })?;
            let report = check_terms(&terms, horizon).map_err(input)?;
            println!("horizon\t{horizon}");
            match report.violation {
                None => {
                    println!("verdict\tpass");
                    Ok(0)
                }
                Some(v) => {
                    println!("verdict\tfail");
                    println!("violation\t{v}");
                    Ok(1)
                }
            }
        }
        Command::Decide { sequence: s, out } => match decide_family(&sequence(&s)?) {
            Decision::Realizable(w) => {
                println!("realizable\t{w}");
                if let Some(path) = out {
                    let p = w.build().map_err(failed)?;
                    write_or_print(Some(&path), &p.to_json())?;
                }
                Ok(0)
            }
            Decision::NonRealizable(reason) => {
                println!("non-realizable\t{reason}");
                Ok(1)
            }
            Decision::Unknown => {
                println!("unknown");
                Ok(3)
            }
        },
        Command::SearchExtension {
            base,
            target,
            extra_ranks,
            search,
            out,
        } => {
            let base = load(&base)?;
            let target = sequence(&target)?;
            let r =
                extension_search(&base, &target, extra_ranks, &search.options()).map_err(input)?;
            print_report(&r);
            if let (
                SearchOutcome::Found {
                    witness,
                    certificate,
                },
                Some(path),
            ) = (&r.outcome, out)
            {
                println!("certificate\t{certificate}");
                write_or_print(Some(&path), &witness.to_json())?;
            }
            Ok(outcome_code(&r.outcome))
        }
        Command::SearchIntervals {
            target,
            rank,
            search,
        } => {
            let target = sequence(&target)?;
            let e = enumerate_intervals(&target, rank, &search.options()).map_err(input)?;
            print_report(&e.report);
            for (cert, p) in &e.classes {
                println!("class\t{}\t{cert}", join(&p.widths()));
            }
            Ok(if e.complete { 0 } else { 3 })
        }
        Command::ExportDot { file, out } => {
            let p = load(&file)?;
            write_or_print(out.as_deref(), &p.to_dot())?;
            Ok(0)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .parse()
            .with_context(|| format!("{THREADS_VAR}={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
