//! Finite-model workbench for intuitionistic and classical modal logics over
//! neighborhood frames.
//!
//! Frames carry, for every world, a *minimal* and a *maximal* neighborhood;
//! the full neighborhood family is the interval between them and is never
//! materialized. On top of that sit two forcing relations (intuitionistic and
//! classical), frame-condition checkers with concrete witnesses, conversions
//! to and from bi-relational models, filtration, bounded morphisms and
//! (n-)bisimulations, per-world topologies, a syntactic translation between
//! the intuitionistic and classical systems, and exhaustive countermodel
//! search over small frames.
//!
//! Everything is deterministic: enumeration orders, witness selection, and
//! search results are all fixed by the declared world order and a size-major
//! formula order, so every reported countermodel or witness is reproducible.

pub mod birel;
pub mod catalog;
pub mod conditions;
pub mod equiv;
pub mod eval;
pub mod formula;
pub mod nmodel;
pub mod parse;
pub mod search;
pub mod topology;
pub mod translate;
pub mod world;

pub use formula::{Formula, Fragment};
pub use nmodel::{NFrame, NModel, Semantics};
pub use world::WorldSet;
