//! Block-world simulator for a mechanical model of self-replication.
//!
//! Three block kinds (normal, mover, gluer) live on an unbounded integer
//! grid. Movers push, gluers bond, and out of these primitives the crate
//! builds codon matchers, a builder, a copier, an assembler and simple
//! Turing machines, together with the two text formats that describe them:
//! MDL (machine layouts) and BDL (builder programs).

pub mod bdl;
pub mod codons;
pub mod engine;
pub mod machines;
pub mod mdl;
pub mod par;
pub mod trace;
pub mod turing;
pub mod world;

pub use engine::{compute_push_set, run, step, Event, EventKind};
pub use trace::Trace;
pub use world::{
    canonical_form, canonical_form_of, BlockId, Cell, Direction, GluerMode, Kind, World,
    WorldConfig,
};
