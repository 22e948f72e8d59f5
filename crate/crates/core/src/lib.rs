pub mod affine;
pub mod arith;
pub mod conjecture;
pub mod error;
pub mod idempotents;
pub mod limits;
pub mod measure;
pub mod patience;
pub mod perm;
pub mod polyfactor;
pub mod report;
pub mod series;
pub mod shuffle;
pub mod tsv;
pub mod verify;

pub use error::{Error, Result};
pub use limits::Limits;
pub use perm::{CycleType, PermStats, Permutation};
pub use measure::{ClassMeasure, PermMeasure};
