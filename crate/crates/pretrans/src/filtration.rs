//! Selective-filtration extractors: carving a small countermodel out of a
//! big one while preserving the truth of a target formula `ζ`.
//!
//! Both extractors grow layers `W₀ = {x}, W₁, W₂, …` by resolving *demands*:
//! a demand is a pair `(w, ψ)` with `w` already kept, `ψ` the argument of
//! some `◊ψ` inside `ζ`, and `R₀(w) ∩ ϑ₀(ψ) ≠ ∅`. Every demand gets a
//! witness successor, so the result is `ζ`-selective and therefore agrees
//! with the big model on every subformula of `ζ` at the kept worlds.
//!
//! - [`extract_k4`] prefers witnesses already kept (*backward*) and
//!   otherwise takes a maximal fresh one (*forward*); the kept relation is
//!   the full restriction of `R₀`, so the result is a **submodel**. It
//!   applies to frames validating the degree-`n` strictly positive core.
//! - [`extract_gl`] always takes a maximal witness and keeps only the
//!   relation `R₀ ∩ S*`, where `S` collects the (keeper, witness) links; the
//!   result is a **semisubmodel** that is conversely well founded with an
//!   irreflexive relation. It applies to the conversely well-founded
//!   frames of the class.
//!
//! The layer recursion provably terminates within the [`Bounds`] budget
//! (`C_k4` resp. `C_gl`) on validated frames; the `*_unchecked` variants
//! skip the frame-class validation for experiments, in which case the loop
//! may hit the budget and reports that loudly instead of spinning.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::bits::{BitMatrix, BitSet};
use crate::formula::Formula;
use crate::kripke::{Frame, KripkeError, Model};
use crate::paths::{Bounds, PathsError};
use crate::validity::{is_lambda_frame, resolve, ValidityError};

/// Errors from the extractors and the selectivity check.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FiltrationError {
    #[error("frame does not validate {logic}, required for the extraction to terminate in bound")]
    FrameNotInClass { logic: String },
    #[error("world {world} out of range for a frame of size {size}")]
    WorldOutOfRange { world: usize, size: usize },
    #[error("not a weak submodel: {reason}")]
    NotAWeakSubmodel { reason: String },
    #[error(
        "layer {layer} is still nonempty although the construction must terminate \
         within {cap} rounds; was frame validation skipped?"
    )]
    BoundExceeded { layer: usize, cap: u64 },
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error(transparent)]
    Validity(#[from] ValidityError),
    #[error(transparent)]
    Paths(#[from] PathsError),
}

/// A full record of one extraction run, in the coordinates of the big model.
///
/// `layers` always ends with the empty layer that stopped the recursion, and
/// `witnesses` maps each resolved demand `(w, ψ)` to its chosen successor.
/// For the submodel variant, `backward_hits` lists demands resolved by an
/// already-kept world; for the semisubmodel variant, `link_rel` is the link
/// set `S` and the kept relation is `R₀ ∩ S*` instead of `R₀` restricted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationTrace {
    pub layers: Vec<BitSet>,
    pub witnesses: BTreeMap<(usize, Formula), usize>,
    pub backward_hits: BTreeSet<(usize, Formula)>,
    pub link_rel: BTreeSet<(usize, usize)>,
    pub kept_worlds: BitSet,
    pub kept_rel: BitMatrix,
    /// Ascending list of kept worlds; position `i` is the big world that the
    /// small model's world `i` stands for.
    pub embedding: Vec<usize>,
    /// The root the recursion started from.
    pub x: usize,
    /// Whether `x` was maximal among the worlds refuting the target formula.
    pub x_maximal: bool,
}

#[derive(Serialize, Deserialize)]
struct WitnessEntry {
    w: usize,
    psi: String,
    v: usize,
}

#[derive(Serialize, Deserialize)]
struct DemandEntry {
    w: usize,
    psi: String,
}

#[derive(Serialize, Deserialize)]
struct TraceDoc {
    worlds: usize,
    layers: Vec<Vec<usize>>,
    witnesses: Vec<WitnessEntry>,
    backward_hits: Vec<DemandEntry>,
    link_rel: Vec<(usize, usize)>,
    kept_worlds: Vec<usize>,
    kept_rel: Vec<(usize, usize)>,
    embedding: Vec<usize>,
    x: usize,
    x_maximal: bool,
}

impl Serialize for FiltrationTrace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let doc = TraceDoc {
            worlds: self.kept_rel.size(),
            layers: self.layers.iter().map(|l| l.iter().collect()).collect(),
            witnesses: self
                .witnesses
                .iter()
                .map(|((w, psi), v)| WitnessEntry {
                    w: *w,
                    psi: psi.to_string(),
                    v: *v,
                })
                .collect(),
            backward_hits: self
                .backward_hits
                .iter()
                .map(|(w, psi)| DemandEntry {
                    w: *w,
                    psi: psi.to_string(),
                })
                .collect(),
            link_rel: self.link_rel.iter().copied().collect(),
            kept_worlds: self.kept_worlds.iter().collect(),
            kept_rel: self.kept_rel.edges(),
            embedding: self.embedding.clone(),
            x: self.x,
            x_maximal: self.x_maximal,
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiltrationTrace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = TraceDoc::deserialize(deserializer)?;
        let size = doc.worlds;
        let worlds_in_range = doc
            .layers
            .iter()
            .flatten()
            .chain(doc.kept_worlds.iter())
            .chain(doc.embedding.iter())
            .chain(doc.witnesses.iter().flat_map(|e| [&e.w, &e.v]))
            .chain(doc.backward_hits.iter().map(|e| &e.w))
            .chain(doc.link_rel.iter().flat_map(|(u, v)| [u, v]))
            .chain(doc.kept_rel.iter().flat_map(|(u, v)| [u, v]))
            .chain(std::iter::once(&doc.x))
            .all(|&w| w < size);
        if !worlds_in_range {
            return Err(D::Error::custom(format!(
                "trace mentions a world outside 0..{size}"
            )));
        }
        let parse = |text: &str| text.parse::<Formula>().map_err(D::Error::custom);
        let mut witnesses = BTreeMap::new();
        for entry in &doc.witnesses {
            witnesses.insert((entry.w, parse(&entry.psi)?), entry.v);
        }
        let mut backward_hits = BTreeSet::new();
        for entry in &doc.backward_hits {
            backward_hits.insert((entry.w, parse(&entry.psi)?));
        }
        Ok(FiltrationTrace {
            layers: doc
                .layers
                .iter()
                .map(|l| BitSet::from_indices(size, l.iter().copied()))
                .collect(),
            witnesses,
            backward_hits,
            link_rel: doc.link_rel.into_iter().collect(),
            kept_worlds: BitSet::from_indices(size, doc.kept_worlds.iter().copied()),
            kept_rel: BitMatrix::from_edges(size, doc.kept_rel),
            embedding: doc.embedding,
            x: doc.x,
            x_maximal: doc.x_maximal,
        })
    }
}

/// Whether `small` is a `ζ`-selective weak submodel of `big` under
/// `embedding`: every demand `R₀(w) ∩ ϑ₀(ψ) ≠ ∅` with `ψ` a `◊`-argument of
/// `zeta` is answered by a kept successor of `w` that satisfies `ψ` in `big`.
///
/// Errors if `small` is not a weak submodel at all (relation or valuation
/// escaping the restriction of `big`).
pub fn is_selective(
    small: &Model,
    big: &Model,
    embedding: &[usize],
    zeta: &Formula,
) -> Result<bool, FiltrationError> {
    let relations = small.frame().subframe_relations(big.frame(), embedding)?;
    if !relations.weak_subframe {
        return Err(FiltrationError::NotAWeakSubmodel {
            reason: "the small relation is not contained in the big one".into(),
        });
    }
    let vars: BTreeSet<&String> = small
        .valuation()
        .keys()
        .chain(big.valuation().keys())
        .collect();
    for var in vars {
        for i in 0..small.frame().size() {
            let here = small.var_set(var).is_some_and(|s| s.contains(i));
            let there = big.var_set(var).is_some_and(|s| s.contains(embedding[i]));
            if here != there {
                return Err(FiltrationError::NotAWeakSubmodel {
                    reason: format!(
                        "valuation of {var} disagrees at world {i} (host world {})",
                        embedding[i]
                    ),
                });
            }
        }
    }
    for psi in zeta.dia_args() {
        let truth = big.eval(&psi);
        for i in 0..small.frame().size() {
            let demanded = big.frame().successors(embedding[i]).intersects(&truth);
            if demanded
                && !small
                    .frame()
                    .successors(i)
                    .iter()
                    .any(|j| truth.contains(embedding[j]))
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn ensure_class(frame: &Frame, key: &str, n: u64) -> Result<(), FiltrationError> {
    let spec = resolve(key, Some(n as usize))?;
    if !is_lambda_frame(frame, &spec)? {
        return Err(FiltrationError::FrameNotInClass { logic: spec.name });
    }
    Ok(())
}

/// The small model over the kept worlds, with the valuation restricted and
/// worlds renumbered ascending; returns it with the embedding back into `big`.
fn restrict_model(big: &Model, kept: &BitSet, kept_rel: &BitMatrix) -> (Model, Vec<usize>) {
    let embedding: Vec<usize> = kept.iter().collect();
    let size = embedding.len();
    let mut edges = Vec::new();
    for (i, &u) in embedding.iter().enumerate() {
        for (j, &v) in embedding.iter().enumerate() {
            if kept_rel.get(u, v) {
                edges.push((i, j));
            }
        }
    }
    let frame = Frame::new(size, &edges).expect("the kept set always contains the root");
    let valuation = big
        .valuation()
        .iter()
        .map(|(var, set)| {
            let restricted = BitSet::from_indices(
                size,
                embedding
                    .iter()
                    .enumerate()
                    .filter(|(_, &u)| set.contains(u))
                    .map(|(i, _)| i),
            );
            (var.clone(), restricted)
        })
        .collect();
    let model = Model::new(frame, valuation).expect("restricted valuation stays in range");
    (model, embedding)
}

struct Setup {
    psis: Vec<Formula>,
    truth: BTreeMap<Formula, BitSet>,
    cap_k4: u64,
    cap_gl: u64,
}

fn setup(big: &Model, x: usize, zeta: &Formula, n: u64) -> Result<Setup, FiltrationError> {
    let size = big.frame().size();
    if x >= size {
        return Err(FiltrationError::WorldOutOfRange { world: x, size });
    }
    let psis: Vec<Formula> = zeta.dia_args().into_iter().collect();
    let bounds = Bounds::new(n, psis.len().max(1) as u64)?;
    let truth = psis.iter().map(|p| (p.clone(), big.eval(p))).collect();
    Ok(Setup {
        psis,
        truth,
        cap_k4: bounds.c_k4,
        cap_gl: bounds.c_gl,
    })
}

/// Extracts a `ζ`-selective submodel from `big`, rooted at `x`, after
/// checking that the frame validates the degree-`n` strictly positive core.
pub fn extract_k4(
    big: &Model,
    x: usize,
    zeta: &Formula,
    n: u64,
) -> Result<(Model, FiltrationTrace), FiltrationError> {
    ensure_class(big.frame(), "K4sigma", n)?;
    extract_k4_unchecked(big, x, zeta, n)
}

/// [`extract_k4`] without the frame-class validation. The termination bound
/// is then no longer guaranteed and may be reported as exceeded.
pub fn extract_k4_unchecked(
    big: &Model,
    x: usize,
    zeta: &Formula,
    n: u64,
) -> Result<(Model, FiltrationTrace), FiltrationError> {
    let Setup {
        psis,
        truth,
        cap_k4: cap,
        ..
    } = setup(big, x, zeta, n)?;
    let size = big.frame().size();
    let mut layers = vec![BitSet::singleton(size, x)];
    let mut union = layers[0].clone();
    let mut witnesses = BTreeMap::new();
    let mut backward_hits = BTreeSet::new();
    let mut k = 0;
    loop {
        if layers[k].is_empty() {
            break;
        }
        if k as u64 >= cap {
            return Err(FiltrationError::BoundExceeded { layer: k, cap });
        }
        let mut next = BitSet::new(size);
        for w in layers[k].iter() {
            for psi in &psis {
                let mut candidates = big.frame().successors(w);
                candidates.intersect_with(&truth[psi]);
                if candidates.is_empty() {
                    continue;
                }
                let mut backward = candidates.clone();
                backward.intersect_with(&union);
                let witness = match backward.first() {
                    Some(v) => {
                        backward_hits.insert((w, psi.clone()));
                        v
                    }
                    None => {
                        let v = big
                            .frame()
                            .max_in(&candidates)
                            .first()
                            .expect("a nonempty set in a finite frame has a maximal world");
                        next.insert(v);
                        v
                    }
                };
                witnesses.insert((w, psi.clone()), witness);
            }
        }
        union.union_with(&next);
        layers.push(next);
        k += 1;
    }
    // The submodel keeps the full restriction of the big relation.
    let mut kept_rel = BitMatrix::new(size);
    for u in union.iter() {
        let mut row = big.frame().successors(u);
        row.intersect_with(&union);
        for v in row.iter() {
            kept_rel.set(u, v);
        }
    }
    let refuting = big.eval(&Formula::neg(zeta.clone()));
    let x_maximal = big.frame().max_in(&refuting).contains(x);
    let (small, embedding) = restrict_model(big, &union, &kept_rel);
    let trace = FiltrationTrace {
        layers,
        witnesses,
        backward_hits,
        link_rel: BTreeSet::new(),
        kept_worlds: union,
        kept_rel,
        embedding,
        x,
        x_maximal,
    };
    debug_assert!(matches!(
        is_selective(&small, big, &trace.embedding, zeta),
        Ok(true)
    ));
    Ok((small, trace))
}

/// Extracts a `ζ`-selective, conversely well-founded semisubmodel from
/// `big`, rooted at `x`, after checking that the frame validates the
/// degree-`n` class including converse well-foundedness.
///
/// For a genuine countermodel, pick `x` maximal among the worlds refuting
/// `zeta`; the trace records whether that side condition held.
pub fn extract_gl(
    big: &Model,
    x: usize,
    zeta: &Formula,
    n: u64,
) -> Result<(Model, FiltrationTrace), FiltrationError> {
    ensure_class(big.frame(), "GLsigma", n)?;
    extract_gl_unchecked(big, x, zeta, n)
}

/// [`extract_gl`] without the frame-class validation. Neither the
/// termination bound nor converse well-foundedness of the result is then
/// guaranteed.
pub fn extract_gl_unchecked(
    big: &Model,
    x: usize,
    zeta: &Formula,
    n: u64,
) -> Result<(Model, FiltrationTrace), FiltrationError> {
    let Setup {
        psis,
        truth,
        cap_gl: cap,
        ..
    } = setup(big, x, zeta, n)?;
    let size = big.frame().size();
    let mut layers = vec![BitSet::singleton(size, x)];
    let mut union = layers[0].clone();
    let mut witnesses = BTreeMap::new();
    let mut link_rel = BTreeSet::new();
    let mut k = 0;
    loop {
        if layers[k].is_empty() {
            break;
        }
        if k as u64 >= cap {
            return Err(FiltrationError::BoundExceeded { layer: k, cap });
        }
        let mut next = BitSet::new(size);
        for w in layers[k].iter() {
            for psi in &psis {
                let mut candidates = big.frame().successors(w);
                candidates.intersect_with(&truth[psi]);
                if candidates.is_empty() {
                    continue;
                }
                let v = big
                    .frame()
                    .max_in(&candidates)
                    .first()
                    .expect("a nonempty set in a finite frame has a maximal world");
                witnesses.insert((w, psi.clone()), v);
                link_rel.insert((w, v));
                if !union.contains(v) {
                    next.insert(v);
                }
            }
        }
        union.union_with(&next);
        layers.push(next);
        k += 1;
    }
    // The semisubmodel keeps only big edges along chains of links: R₀ ∩ S*.
    let links = BitMatrix::from_edges(size, link_rel.iter().copied());
    let star = links.transitive_closure().reflexive_closure();
    let mut kept_rel = BitMatrix::new(size);
    for u in union.iter() {
        let mut row = big.frame().successors(u);
        row.intersect_with(&star.row(u));
        row.intersect_with(&union);
        for v in row.iter() {
            kept_rel.set(u, v);
        }
    }
    let refuting = big.eval(&Formula::neg(zeta.clone()));
    let x_maximal = big.frame().max_in(&refuting).contains(x);
    let (small, embedding) = restrict_model(big, &union, &kept_rel);
    let trace = FiltrationTrace {
        layers,
        witnesses,
        backward_hits: BTreeSet::new(),
        link_rel,
        kept_worlds: union,
        kept_rel,
        embedding,
        x,
        x_maximal,
    };
    debug_assert!(matches!(
        is_selective(&small, big, &trace.embedding, zeta),
        Ok(true)
    ));
    Ok((small, trace))
}
