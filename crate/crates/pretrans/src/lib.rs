//! Workbench for pretransitive modal logics on finite Kripke structures.
//!
//! The crate covers the `K4`-family of weakly transitive logics and their
//! generalizations: formulas over `⊥ → ◊`, axiom schemes such as
//! `Trans_n`, `A4_γ`, `Aw4_γ` and `ALöb_◊β`, frame validity (brute force and
//! Sahlqvist-style minimal valuations), path combinatorics on pretransitive
//! frames, selective filtration, and small-scale countermodel search.
//!
//! Modules:
//!
//! * [`bits`] — dense bit sets and boolean matrices used for relations.
//! * [`formula`] — modal formulas, parsing, printing, schemes, analysis.
//! * [`kripke`] — frames, models, closures, skeletons, evaluation.
//! * [`validity`] — validity checks, logic specifications, the logic catalog.
//! * [`paths`] — labeled paths, reducibility, zigzag and grid links, bounds.
//! * [`filtration`] — selective filtration extractors and traces.
//! * [`decide`] — frame enumeration, countermodel search, inclusion probes.

pub mod bits;
pub mod decide;
pub mod filtration;
pub mod formula;
pub mod kripke;
pub mod paths;
pub mod validity;
