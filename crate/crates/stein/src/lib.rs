//! Construction and certification of equi-n-squares with small maximum
//! partial transversals, plus exact and heuristic transversal solvers.
//!
//! An *equi-n-square* is an n×n array over n symbols in which every symbol
//! occurs exactly n times. The library builds structured equi-n-squares whose
//! region layout confines a scarce symbol class to a small family of blocks,
//! which yields a machine-checkable upper bound on the size of any partial
//! transversal. Solvers (branch-and-bound, brute force, greedy, nibble) search
//! for large partial transversals, and the certifier audits solver output
//! against the counting argument behind the bound.

pub mod certify;
pub mod construct;
pub mod grid;
pub mod layout;
pub mod ratio;
pub mod seq;
pub mod solve;

pub use grid::{Cell, Grid, PartialTransversal};
pub use layout::{ConstructionParams, RegionLayout, SymbolPartition};
pub use ratio::Ratio;
