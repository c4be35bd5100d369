//! Finite Kripke frames and models.
//!
//! A frame is a nonempty set of worlds `0..size` with a binary relation `R`
//! stored as a dense bit-matrix. This module provides the relation algebra
//! around a frame (powers `Rᵏ`, transitive closure `R⁺`, reflexive-transitive
//! closure `R*`), the cluster/skeleton decomposition induced by `R*`, maximal
//! worlds of a subset, structural predicates (`n`-transitivity, converse
//! well-foundedness, irreflexivity), subframe classification, and model
//! checking of formulas.
//!
//! Closure tables are computed lazily once per frame and shared between
//! clones; all queries afterward are pure. Worlds are dense integer ids;
//! human-readable names live only in the file formats (see [`io`]).

pub mod io;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::bits::{BitMatrix, BitSet};
use crate::formula::Formula;

/// Errors from frame/model construction and structural queries.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum KripkeError {
    /// Frames must carry at least one world.
    #[error("a frame needs at least one world")]
    EmptyFrame,
    /// A world id fell outside `0..size`.
    #[error("world {world} out of range for a frame of size {size}")]
    WorldOutOfRange { world: usize, size: usize },
    /// A transitivity degree of zero was requested.
    #[error("transitivity degree must be at least 1")]
    ZeroDegree,
    /// Two worlds of the small frame map to the same world of the host.
    #[error("embedding is not injective: worlds {first} and {second} share image {image}")]
    EmbeddingNotInjective {
        first: usize,
        second: usize,
        image: usize,
    },
    /// The embedding list does not cover exactly the worlds of the small frame.
    #[error("embedding must list an image for each of the {expected} worlds, got {got}")]
    EmbeddingWrongLength { expected: usize, got: usize },
    /// A valuation mentioned a world outside the frame.
    #[error("valuation of {var:?} mentions world {world}, but the frame has {size} worlds")]
    ValuationOutOfRange {
        var: String,
        world: usize,
        size: usize,
    },
}

/// Cached relation algebra of a frame: `R⁰..R^size`, `R⁺`, and `R*`.
///
/// The power list stops at exponent `size`: over a finite carrier a shortest
/// `R`-path repeating no world has length at most `size`, so
/// `R⁺ = R¹ ∪ … ∪ R^size` and higher powers satisfy the recurrence
/// `Rᵏ = R^size · R^(k−size)` without contributing new pairs to the closure.
#[derive(Debug)]
pub struct ClosureTables {
    /// `powers[k]` is `Rᵏ` for `k = 0..=size`.
    pub powers: Vec<BitMatrix>,
    /// Transitive closure `R⁺ = ⋃_{k≥1} Rᵏ`.
    pub trans: BitMatrix,
    /// Reflexive-transitive closure `R* = R⁺ ∪ R⁰`.
    pub refl_trans: BitMatrix,
}

impl ClosureTables {
    fn build(rel: &BitMatrix) -> Self {
        let n = rel.size();
        let mut powers = Vec::with_capacity(n + 1);
        powers.push(BitMatrix::identity(n));
        let mut trans = BitMatrix::new(n);
        for k in 1..=n {
            let next = powers[k - 1].mul(rel);
            trans.union_with(&next);
            powers.push(next);
        }
        let refl_trans = trans.reflexive_closure();
        ClosureTables {
            powers,
            trans,
            refl_trans,
        }
    }
}

/// Structural predicates of a frame at a given transitivity degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FrameClassChecks {
    /// `R⁺ ⊆ R¹ ∪ … ∪ Rⁿ` (the other inclusion holds by definition).
    pub n_transitive: bool,
    /// `R⁺` is irreflexive. On a finite carrier this is equivalent to the
    /// absence of infinite ascending `R`-sequences.
    pub conversely_well_founded: bool,
    /// The diagonal of `R` is empty.
    pub irreflexive: bool,
}

/// How a candidate subframe sits inside a host frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SubframeRelations {
    /// `R ⊆ R₀` under the embedding.
    pub weak_subframe: bool,
    /// `R = R₀` restricted to the embedded worlds.
    pub subframe: bool,
    /// Subframe whose worlds are closed under `R₀`-successors.
    pub generated_subframe: bool,
    /// Weak subframe where `w R* v` and `w R₀ v` together force `w R v`,
    /// with `R*` computed in the small frame.
    pub semisubframe: bool,
}

/// A finite Kripke frame `(W, R)` with `W = {0, …, size−1}`.
pub struct Frame {
    rel: BitMatrix,
    closures: OnceLock<Arc<ClosureTables>>,
}

impl Frame {
    /// Builds a frame from an edge list.
    pub fn new(size: usize, edges: &[(usize, usize)]) -> Result<Self, KripkeError> {
        if size == 0 {
            return Err(KripkeError::EmptyFrame);
        }
        let mut rel = BitMatrix::new(size);
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= size {
                    return Err(KripkeError::WorldOutOfRange { world: w, size });
                }
            }
            rel.set(u, v);
        }
        Ok(Frame {
            rel,
            closures: OnceLock::new(),
        })
    }

    /// Wraps an adjacency matrix as a frame.
    pub fn from_rel(rel: BitMatrix) -> Result<Self, KripkeError> {
        if rel.size() == 0 {
            return Err(KripkeError::EmptyFrame);
        }
        Ok(Frame {
            rel,
            closures: OnceLock::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.rel.size()
    }

    pub fn rel(&self) -> &BitMatrix {
        &self.rel
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rel.get(u, v)
    }

    /// The `R`-image of a world as a fresh bit-set.
    pub fn successors(&self, w: usize) -> BitSet {
        self.rel.row(w)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.rel.edges()
    }

    /// The cached closure tables, computed on first use.
    pub fn closure(&self) -> &ClosureTables {
        self.closures
            .get_or_init(|| Arc::new(ClosureTables::build(&self.rel)))
    }

    /// `Rᵏ`. Exponents above `size` are recomputed on demand; they never add
    /// pairs beyond the cached closure.
    pub fn power(&self, k: usize) -> BitMatrix {
        let tables = self.closure();
        match tables.powers.get(k) {
            Some(m) => m.clone(),
            None => self.rel.pow(k as u32),
        }
    }

    /// `R¹ ∪ … ∪ Rⁿ`. For `n ≥ size` this is exactly `R⁺`.
    pub fn power_union(&self, n: usize) -> BitMatrix {
        let tables = self.closure();
        if n >= self.size() {
            return tables.trans.clone();
        }
        let mut acc = BitMatrix::new(self.size());
        for power in &tables.powers[1..=n] {
            acc.union_with(power);
        }
        acc
    }

    /// Whether `R⁺ = R¹ ∪ … ∪ Rⁿ` (requires `n ≥ 1`).
    pub fn is_n_transitive(&self, n: usize) -> bool {
        debug_assert!(n >= 1, "transitivity degree must be at least 1");
        self.closure().trans.is_subset_of(&self.power_union(n))
    }

    /// Whether `R⁺` is irreflexive; over a finite carrier this coincides with
    /// the absence of infinite ascending `R`-sequences.
    pub fn is_conversely_well_founded(&self) -> bool {
        self.closure().trans.diagonal_empty()
    }

    pub fn is_irreflexive(&self) -> bool {
        self.rel.diagonal_empty()
    }

    /// All three structural predicates at degree `n ≥ 1`.
    pub fn frame_class_checks(&self, n: usize) -> Result<FrameClassChecks, KripkeError> {
        if n == 0 {
            return Err(KripkeError::ZeroDegree);
        }
        Ok(FrameClassChecks {
            n_transitive: self.is_n_transitive(n),
            conversely_well_founded: self.is_conversely_well_founded(),
            irreflexive: self.is_irreflexive(),
        })
    }

    /// The worlds of `x` that are maximal in `x`: every `R*`-move inside `x`
    /// can be answered by a move back. Nonempty whenever `x` is nonempty.
    pub fn max_in(&self, x: &BitSet) -> BitSet {
        let rt = &self.closure().refl_trans;
        let back = rt.transpose();
        let mut out = BitSet::new(self.size());
        for v in x.iter() {
            let mut above = rt.row(v);
            above.intersect_with(x);
            if above.is_subset_of(&back.row(v)) {
                out.insert(v);
            }
        }
        out
    }

    /// Cluster decomposition and the induced order on clusters.
    pub fn skeleton(&self) -> Skeleton {
        let n = self.size();
        let rt = &self.closure().refl_trans;
        let back = rt.transpose();
        let mut cluster_of = vec![usize::MAX; n];
        let mut clusters: Vec<BitSet> = Vec::new();
        for w in 0..n {
            if cluster_of[w] != usize::MAX {
                continue;
            }
            let id = clusters.len();
            let mut members = rt.row(w);
            members.intersect_with(&back.row(w));
            for v in members.iter() {
                cluster_of[v] = id;
            }
            clusters.push(members);
        }
        let mut order = BitMatrix::new(clusters.len());
        for (i, ci) in clusters.iter().enumerate() {
            let rep_i = ci.first().expect("clusters are nonempty");
            for (j, cj) in clusters.iter().enumerate() {
                let rep_j = cj.first().expect("clusters are nonempty");
                if rt.get(rep_i, rep_j) {
                    order.set(i, j);
                }
            }
        }
        Skeleton {
            cluster_of,
            clusters,
            order,
        }
    }

    /// Classifies how `self` sits inside `host` under `embedding`, which maps
    /// each world of `self` to a world of `host`.
    pub fn subframe_relations(
        &self,
        host: &Frame,
        embedding: &[usize],
    ) -> Result<SubframeRelations, KripkeError> {
        let n = self.size();
        if embedding.len() != n {
            return Err(KripkeError::EmbeddingWrongLength {
                expected: n,
                got: embedding.len(),
            });
        }
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for (w, &img) in embedding.iter().enumerate() {
            if img >= host.size() {
                return Err(KripkeError::WorldOutOfRange {
                    world: img,
                    size: host.size(),
                });
            }
            if let Some(&first) = seen.get(&img) {
                return Err(KripkeError::EmbeddingNotInjective {
                    first,
                    second: w,
                    image: img,
                });
            }
            seen.insert(img, w);
        }

        let mut weak = true;
        let mut sub = true;
        let mut semi = true;
        let small_rt = &self.closure().refl_trans;
        for u in 0..n {
            for v in 0..n {
                let here = self.rel.get(u, v);
                let there = host.rel.get(embedding[u], embedding[v]);
                weak &= !here || there;
                sub &= here == there;
                semi &= !(small_rt.get(u, v) && there) || here;
            }
        }
        let generated = sub
            && (0..n).all(|u| {
                host.successors(embedding[u])
                    .iter()
                    .collect::<Vec<_>>()
                    .into_iter()
                    .all(|x| seen.contains_key(&x))
            });
        Ok(SubframeRelations {
            weak_subframe: weak,
            subframe: sub,
            generated_subframe: generated,
            semisubframe: weak && semi,
        })
    }
}

impl Clone for Frame {
    fn clone(&self) -> Self {
        let closures = OnceLock::new();
        if let Some(tables) = self.closures.get() {
            let _ = closures.set(Arc::clone(tables));
        }
        Frame {
            rel: self.rel.clone(),
            closures,
        }
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.rel == other.rel
    }
}

impl Eq for Frame {}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({} worlds, R = {:?})", self.size(), self.rel)
    }
}

/// The quotient of a frame by mutual `R*`-reachability.
///
/// Cluster ids are assigned in increasing order of each cluster's least
/// world, so id 0 always contains world 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    cluster_of: Vec<usize>,
    clusters: Vec<BitSet>,
    order: BitMatrix,
}

impl Skeleton {
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_of(&self, w: usize) -> usize {
        self.cluster_of[w]
    }

    pub fn clusters(&self) -> &[BitSet] {
        &self.clusters
    }

    /// The induced partial order: `order().get(i, j)` iff cluster `i ⪯ j`.
    pub fn order(&self) -> &BitMatrix {
        &self.order
    }
}

/// A model: a frame together with a valuation of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    frame: Frame,
    valuation: BTreeMap<String, BitSet>,
}

impl Model {
    /// Builds a model, checking every valuation set fits the frame.
    pub fn new(
        frame: Frame,
        valuation: BTreeMap<String, BitSet>,
    ) -> Result<Self, KripkeError> {
        let size = frame.size();
        for (var, set) in &valuation {
            if set.universe() != size {
                let world = set.iter().find(|&w| w >= size).unwrap_or(set.universe());
                return Err(KripkeError::ValuationOutOfRange {
                    var: var.clone(),
                    world,
                    size,
                });
            }
        }
        Ok(Model { frame, valuation })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn valuation(&self) -> &BTreeMap<String, BitSet> {
        &self.valuation
    }

    pub fn var_set(&self, var: &str) -> Option<&BitSet> {
        self.valuation.get(var)
    }

    /// The worlds where `formula` holds. Unvalued variables hold nowhere.
    pub fn eval(&self, formula: &Formula) -> BitSet {
        let mut memo = BTreeMap::new();
        self.eval_memo(formula, &mut memo);
        memo.remove(formula).expect("root was just evaluated")
    }

    /// Evaluates `formula` and returns the truth set of every subformula.
    pub fn eval_subformulas(&self, formula: &Formula) -> BTreeMap<Formula, BitSet> {
        let mut memo = BTreeMap::new();
        self.eval_memo(formula, &mut memo);
        memo
    }

    fn eval_memo(&self, formula: &Formula, memo: &mut BTreeMap<Formula, BitSet>) {
        if memo.contains_key(formula) {
            return;
        }
        let size = self.frame.size();
        let set = match formula {
            Formula::Bot => BitSet::new(size),
            Formula::Var(p) => self
                .valuation
                .get(p)
                .cloned()
                .unwrap_or_else(|| BitSet::new(size)),
            Formula::Imp(a, b) => {
                self.eval_memo(a, memo);
                self.eval_memo(b, memo);
                let mut out = memo[a.as_ref()].clone();
                out.complement();
                out.union_with(&memo[b.as_ref()]);
                out
            }
            Formula::Dia(a) => {
                self.eval_memo(a, memo);
                let arg = &memo[a.as_ref()];
                let mut out = BitSet::new(size);
                for w in 0..size {
                    if self.frame.rel.row_intersects(w, arg) {
                        out.insert(w);
                    }
                }
                out
            }
        };
        memo.insert(formula.clone(), set);
    }
}

#[cfg(test)]
pub(crate) mod strategies {
    use super::*;
    use proptest::prelude::*;

    /// Frames of 1..=6 worlds with arbitrary relations.
    pub(crate) fn arb_frame() -> impl Strategy<Value = Frame> {
        (1usize..=6).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * n).prop_map(move |cells| {
                let mut rel = BitMatrix::new(n);
                for (idx, &on) in cells.iter().enumerate() {
                    if on {
                        rel.set(idx / n, idx % n);
                    }
                }
                Frame::from_rel(rel).expect("n >= 1")
            })
        })
    }

    /// A model over an arbitrary frame valuing `p0` and `p1`.
    pub(crate) fn arb_model() -> impl Strategy<Value = Model> {
        arb_frame().prop_flat_map(|frame| {
            let n = frame.size();
            (
                Just(frame),
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n),
            )
                .prop_map(|(frame, v0, v1)| {
                    let set = |bools: &[bool]| {
                        BitSet::from_indices(
                            bools.len(),
                            bools
                                .iter()
                                .enumerate()
                                .filter_map(|(i, &b)| b.then_some(i)),
                        )
                    };
                    let mut valuation = BTreeMap::new();
                    valuation.insert("p0".to_owned(), set(&v0));
                    valuation.insert("p1".to_owned(), set(&v1));
                    Model::new(frame, valuation).expect("sets sized to frame")
                })
        })
    }
}
