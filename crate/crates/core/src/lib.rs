//! Finite truncations of binomial posets.
//!
//! The crate builds graded posets (string posets of type `(1,1,2,2,...)`,
//! stripped boolean intervals, de Bruijn style posets and their products),
//! verifies the binomial property by exact maximal-chain counting, classifies
//! type `(1,1,2,2,...)` posets by their section strings, and decides or
//! searches for realizations of atomic sequences.

pub mod chains;
pub mod classify;
pub mod construct;
pub mod error;
pub mod iso;
pub mod poset;
pub mod seqcheck;
pub mod sequence;

pub use chains::{
    atomic_numbers, count_maximal_chains, rank_sizes, verify_binomial, AtomicNumbers,
    BinomialVerdict,
};
pub use error::{
    ClassifyError, ConstructError, IsoError, PosetError, SeqCheckError, SequenceError,
};
pub use iso::{are_isomorphic, canonical_form, CanonicalCertificate};
pub use poset::{interval, GradedPoset, Interval};
pub use sequence::{AtomicSequence, FactorialProfile};
