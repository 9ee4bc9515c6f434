//! Compact indexes for permutations that avoid a fixed pattern.
//!
//! The [`CompactIndex`] answers `τ(i)`, `τ⁻¹(v)`, interval range minimum and
//! next-smaller queries in constant time. The [`GeoIndex`] adds rectangle
//! counting and rectangle minimum on top of it.
//!
//! All public positions and values are 1-based.

pub mod codec;
pub mod compact;
pub mod decomposition;
pub mod error;
pub mod geo;
pub mod gridded;
pub mod perm;
pub mod succinct;
pub mod tally;

pub use compact::{CompactIndex, SpaceReport};
pub use decomposition::{build_hierarchy, DecompositionHierarchy, Division};
pub use error::{Error, Result};
pub use geo::{GeoIndex, LevelTrace, PieceInfo, PieceKind};
pub use gridded::{CellRef, GriddedPermTable, GriddedPermutation};
pub use perm::{Family, Pattern, Permutation, QueryRect};
