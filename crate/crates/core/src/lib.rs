//! Dilated sumsets `A + k·A` over the integers: set algebra, residue-class
//! machinery, lower bounds, and exhaustive search.

pub mod arith;
pub mod bitset;
pub mod bounds;
pub mod decomposition;
pub mod error;
pub mod modular;
pub mod search;
pub mod sets;

pub use bounds::{chs_bound, classify_k, factorial_bound, threshold, BoundReport, KClass};
pub use decomposition::{decompose, normalize, Decomposition};
pub use error::{Error, Result};
pub use modular::ResidueSet;
pub use search::{
    find_violations, min_sumset_size, verify_lemma, SearchMode, SearchResult, SearchSpec,
    VerifyParams, VerifyReport,
};
pub use sets::{add_dilated, add_dilated_naive, sumset, IntSet};
