//! Path counting on correlated binary sequences.
//!
//! Binary sequences correlated in pairs carry quantum numbers `(j, m, g, l)`.
//! Composing two relations that share a reference sequence and counting the
//! sequence paths that realize each outcome yields probabilities that approach
//! squared Clebsch-Gordan coefficients as the sequences grow.

pub use num_bigint;
pub use num_rational;

pub mod brute;
pub mod cg;
pub mod decimal;
pub mod error;
pub mod half;
pub mod pathcount;
pub mod qnum;
pub mod selection;
pub mod seq;

pub use cg::{cg_squared, convergence_scan, delta, DeltaRow, ScanRow};
pub use decimal::{to_decimal, DEFAULT_DIGITS};
pub use error::{Error, Result};
pub use half::HalfInt;
pub use pathcount::{
    phi, probability_table, upsilon, PathCounter, Priors, ProbabilityRow, ProbabilityTable,
};
pub use qnum::{Counts4, Counts8, Pairwise, QN4, QN8};
pub use selection::{allowed_m_pairs, check_triangle, j12_bounds_constrained, verify_triple};
pub use seq::{
    apply_map, correlate, count_symbols, enumerate, BitSeq, Budget, CorrSeq, SymbolCounts,
};
