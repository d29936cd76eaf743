//! Counting quasimorphisms on free groups, their pullbacks under Nielsen
//! moves, and quasi-endomorphisms acting on them.

pub mod cli;
pub mod counting;
pub mod enumerate;
pub mod error;
pub mod expr;
pub mod independence;
pub mod linalg;
pub mod nielsen;
pub mod quasimaps;
pub mod verify;
pub mod word;

pub use counting::{
    count_nonoverlapping, count_overlapping, defect_scan, eval, homogenize_eval, DefectScanResult,
    Horizon, Sampler,
};
pub use error::{Error, Result};
pub use independence::{grigorchuk_enumerate, is_independent_set, is_self_independent, overlaps, LetterOrder};
pub use nielsen::{apply_move, apply_word, pullback_expr, NielsenMove, NielsenWord, RewriteResult};
pub use quasimaps::{surjection_map, surjection_preimage, QuasiMap, ReplacementPair, WobblingMap};
pub use verify::{list_checks, run_check, CheckParams, VerificationReport};
pub use expr::{Kind, QmExpr, QmTerm, Rational};
pub use word::{Letter, NormalForm, Word};
