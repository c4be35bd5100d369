//! Labeled paths in models and the combinatorial bounds that govern them.
//!
//! A labeled path alternates worlds and formulas, `u₀, ψ₀, u₁, …, u_m`, with
//! each step landing in `R(u_k) ∩ ϑ(ψ_k)`. Over frames validating the
//! degree-`n` strictly positive core (`◊²σₙ(p) → ◊p`), long enough families
//! of such paths are forced to interact: given `N + 1 = nⁿ + 1` plain paths
//! of length `n` chained by `R*`, some world of an earlier path sees a world
//! of a later one ([`find_zigzag_link`]); given `M + 1 = nⁿ|Ψ|ⁿ + 1` labeled
//! paths, the link can be chosen to respect a label ([`grid_link`]). The
//! derived constants live in [`Bounds`]; the reducibility and optimality
//! predicates on single paths are [`find_reduction`] and [`is_optimal`].
//!
//! Existence of the links is a theorem, so both finders simply scan all
//! candidate triples and return the lexicographically least hit; a missing
//! link after the preconditions pass is reported as a loud error instead of
//! being papered over.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::bits::BitSet;
use crate::formula::Formula;
use crate::kripke::{Frame, Model};
use crate::validity::{is_lambda_frame, resolve, ValidityError};

/// Errors from path validation, link discovery, and bound arithmetic.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathsError {
    #[error("{which} must be at least 1")]
    ZeroParameter { which: &'static str },
    #[error("bound {what} overflows 64 bits for n={n}, |Ψ|={psi_size}")]
    Overflow {
        what: &'static str,
        n: u64,
        psi_size: u64,
    },
    #[error("a path needs at least one world")]
    EmptyPath,
    #[error("a path over {worlds} worlds needs {expected} labels, got {got}")]
    LabelCount {
        worlds: usize,
        expected: usize,
        got: usize,
    },
    #[error("world {world} out of range for a frame of size {size}")]
    WorldOutOfRange { world: usize, size: usize },
    #[error("step {k} is invalid: {to} is not in R({from}) ∩ ϑ(ψ_{k})")]
    InvalidStep { k: usize, from: usize, to: usize },
    #[error("expected exactly {expected} paths, got {got}")]
    PathCount { expected: u64, got: usize },
    #[error("needs at least {expected} labeled paths, got {got}")]
    TooFewPaths { expected: u64, got: usize },
    #[error("path {index} must have length {expected}, got {got}")]
    PathLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("path {index} breaks at step {step}: no edge {from} -> {to}")]
    BrokenPath {
        index: usize,
        step: usize,
        from: usize,
        to: usize,
    },
    #[error("path {i} does not reach path {next}: its end must be R*-related to the next start")]
    ConnectivityMissing { i: usize, next: usize },
    #[error("frame does not validate {logic}, required for the link to exist")]
    FrameNotInClass { logic: String },
    #[error("no link found although the preconditions hold; this contradicts the combinatorial bound")]
    LinkMissing,
    #[error(transparent)]
    Validity(#[from] ValidityError),
}

/// The bound constants for degree `n` and a label alphabet of `psi_size`
/// formulas: `N = nⁿ`, `M = N·|Ψ|ⁿ`, and the two path-length budgets
/// `C_k4 = n(M² + M + 1)` and `C_gl = nⁿ⁺¹|Ψ|ⁿ + n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub n: u64,
    pub psi_size: u64,
    #[serde(rename = "N")]
    pub big_n: u64,
    #[serde(rename = "M")]
    pub big_m: u64,
    #[serde(rename = "C_k4")]
    pub c_k4: u64,
    #[serde(rename = "C_gl")]
    pub c_gl: u64,
}

impl Bounds {
    /// Computes the constants, rejecting zero inputs and 64-bit overflow.
    pub fn new(n: u64, psi_size: u64) -> Result<Self, PathsError> {
        if n == 0 {
            return Err(PathsError::ZeroParameter { which: "n" });
        }
        if psi_size == 0 {
            return Err(PathsError::ZeroParameter { which: "psi_size" });
        }
        let overflow = |what: &'static str| PathsError::Overflow { what, n, psi_size };
        let exp: u32 = n.try_into().map_err(|_| overflow("N"))?;
        let big_n = n.checked_pow(exp).ok_or_else(|| overflow("N"))?;
        let psi_pow = psi_size.checked_pow(exp).ok_or_else(|| overflow("M"))?;
        let big_m = big_n.checked_mul(psi_pow).ok_or_else(|| overflow("M"))?;
        let c_k4 = big_m
            .checked_mul(big_m)
            .and_then(|m2| m2.checked_add(big_m))
            .and_then(|s| s.checked_add(1))
            .and_then(|s| s.checked_mul(n))
            .ok_or_else(|| overflow("C_k4"))?;
        let c_gl = big_n
            .checked_mul(n)
            .and_then(|np| np.checked_mul(psi_pow))
            .and_then(|t| t.checked_add(n))
            .ok_or_else(|| overflow("C_gl"))?;
        Ok(Bounds {
            n,
            psi_size,
            big_n,
            big_m,
            c_k4,
            c_gl,
        })
    }
}

/// A `Ψ`-labeled path `u₀, ψ₀, u₁, …, u_m`: one label per step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPath {
    worlds: Vec<usize>,
    labels: Vec<Formula>,
}

impl LabeledPath {
    /// Pairs up worlds and labels, checking the alternation shape only; use
    /// [`LabeledPath::validate`] to check the steps against a model.
    pub fn new(worlds: Vec<usize>, labels: Vec<Formula>) -> Result<Self, PathsError> {
        if worlds.is_empty() {
            return Err(PathsError::EmptyPath);
        }
        if labels.len() != worlds.len() - 1 {
            return Err(PathsError::LabelCount {
                worlds: worlds.len(),
                expected: worlds.len() - 1,
                got: labels.len(),
            });
        }
        Ok(LabeledPath { worlds, labels })
    }

    /// Number of steps `m` (one less than the number of worlds).
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn worlds(&self) -> &[usize] {
        &self.worlds
    }

    pub fn labels(&self) -> &[Formula] {
        &self.labels
    }

    /// The set of distinct labels used.
    pub fn alphabet(&self) -> impl Iterator<Item = &Formula> {
        let mut seen = std::collections::BTreeSet::new();
        self.labels.iter().filter(move |f| seen.insert((*f).clone()))
    }

    /// Checks every step: `u_{k+1} ∈ R(u_k) ∩ ϑ(ψ_k)`.
    pub fn validate(&self, model: &Model) -> Result<(), PathsError> {
        let size = model.frame().size();
        for &w in &self.worlds {
            if w >= size {
                return Err(PathsError::WorldOutOfRange { world: w, size });
            }
        }
        for (k, label) in self.labels.iter().enumerate() {
            let (from, to) = (self.worlds[k], self.worlds[k + 1]);
            if !model.frame().has_edge(from, to) || !model.eval(label).contains(to) {
                return Err(PathsError::InvalidStep { k, from, to });
            }
        }
        Ok(())
    }
}

impl Serialize for LabeledPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.worlds.len() + self.labels.len()))?;
        for k in 0..self.labels.len() {
            seq.serialize_element(&self.worlds[k])?;
            seq.serialize_element(&self.labels[k].to_string())?;
        }
        seq.serialize_element(self.worlds.last().expect("paths are nonempty"))?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for LabeledPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<serde_json::Value>::deserialize(deserializer)?;
        if items.len() % 2 == 0 {
            return Err(D::Error::custom(
                "a labeled path alternates worlds and labels, ending on a world",
            ));
        }
        let mut worlds = Vec::with_capacity(items.len() / 2 + 1);
        let mut labels = Vec::with_capacity(items.len() / 2);
        for (idx, item) in items.iter().enumerate() {
            if idx % 2 == 0 {
                let w = item
                    .as_u64()
                    .ok_or_else(|| D::Error::custom(format!("expected a world id at {idx}")))?;
                worlds.push(w as usize);
            } else {
                let text = item
                    .as_str()
                    .ok_or_else(|| D::Error::custom(format!("expected a label at {idx}")))?;
                labels.push(text.parse::<Formula>().map_err(D::Error::custom)?);
            }
        }
        LabeledPath::new(worlds, labels).map_err(D::Error::custom)
    }
}

/// The truth sets of every label, computed once per call.
fn label_sets(model: &Model, labels: &[&Formula]) -> BTreeMap<Formula, BitSet> {
    let mut sets = BTreeMap::new();
    for &label in labels {
        sets.entry(label.clone())
            .or_insert_with(|| model.eval(label));
    }
    sets
}

/// The lexicographically least `(k, k′)` with `k′ ≤ k < m` and
/// `u_{k′} ∈ R(u_k) ∩ ϑ(ψ_k)`, or `None` when the path is irreducible.
pub fn find_reduction(
    model: &Model,
    path: &LabeledPath,
) -> Result<Option<(usize, usize)>, PathsError> {
    path.validate(model)?;
    let sets = label_sets(model, &path.labels().iter().collect::<Vec<_>>());
    for k in 0..path.len() {
        let set = &sets[&path.labels()[k]];
        let from = path.worlds()[k];
        for kp in 0..=k {
            let target = path.worlds()[kp];
            if model.frame().has_edge(from, target) && set.contains(target) {
                return Ok(Some((k, kp)));
            }
        }
    }
    Ok(None)
}

/// Whether every step lands in `max(R(u_k) ∩ ϑ(ψ_k))`.
pub fn is_optimal(model: &Model, path: &LabeledPath) -> Result<bool, PathsError> {
    path.validate(model)?;
    let sets = label_sets(model, &path.labels().iter().collect::<Vec<_>>());
    for k in 0..path.len() {
        let mut candidates = model.frame().successors(path.worlds()[k]);
        candidates.intersect_with(&sets[&path.labels()[k]]);
        let max = model.frame().max_in(&candidates);
        if !max.contains(path.worlds()[k + 1]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Extends an optimal path greedily from `start` for `length` steps, cycling
/// `psi` round-robin and always taking the least world of
/// `max(R(u) ∩ ϑ(ψ))`. Returns `None` if some step has no candidate.
pub fn greedy_optimal_path(
    model: &Model,
    psi: &[Formula],
    start: usize,
    length: usize,
) -> Option<LabeledPath> {
    assert!(!psi.is_empty(), "the label alphabet must be nonempty");
    let sets = label_sets(model, &psi.iter().collect::<Vec<_>>());
    let mut worlds = vec![start];
    let mut labels = Vec::with_capacity(length);
    for k in 0..length {
        let label = &psi[k % psi.len()];
        let mut candidates = model.frame().successors(*worlds.last().unwrap());
        candidates.intersect_with(&sets[label]);
        let next = model.frame().max_in(&candidates).first()?;
        worlds.push(next);
        labels.push(label.clone());
    }
    Some(LabeledPath { worlds, labels })
}

/// Like [`greedy_optimal_path`] but confined to the cluster of `start`, and
/// taking the least candidate rather than a maximal one.
pub fn cluster_path(
    model: &Model,
    psi: &[Formula],
    start: usize,
    length: usize,
) -> Option<LabeledPath> {
    assert!(!psi.is_empty(), "the label alphabet must be nonempty");
    let sets = label_sets(model, &psi.iter().collect::<Vec<_>>());
    let skeleton = model.frame().skeleton();
    let cluster = &skeleton.clusters()[skeleton.cluster_of(start)];
    let mut worlds = vec![start];
    let mut labels = Vec::with_capacity(length);
    for k in 0..length {
        let label = &psi[k % psi.len()];
        let mut candidates = model.frame().successors(*worlds.last().unwrap());
        candidates.intersect_with(&sets[label]);
        candidates.intersect_with(cluster);
        let next = candidates.first()?;
        worlds.push(next);
        labels.push(label.clone());
    }
    Some(LabeledPath { worlds, labels })
}

fn check_frame_class(frame: &Frame, n: u64) -> Result<(), PathsError> {
    let spec = resolve("K4sigma", Some(n as usize))?;
    if !is_lambda_frame(frame, &spec)? {
        return Err(PathsError::FrameNotInClass { logic: spec.name });
    }
    Ok(())
}

/// Given `N + 1 = nⁿ + 1` plain paths of length `n` in a frame validating the
/// degree-`n` strictly positive core, chained so that each path's end is
/// `R*`-related to the next path's start, finds `(i, i′, j)` with `i < i′`
/// and `u^i_j R u^{i′}_{j+1}`. The scan is exhaustive and returns the
/// lexicographically least triple.
pub fn find_zigzag_link(
    frame: &Frame,
    n: u64,
    paths: &[Vec<usize>],
) -> Result<(usize, usize, usize), PathsError> {
    if n == 0 {
        return Err(PathsError::ZeroParameter { which: "n" });
    }
    check_frame_class(frame, n)?;
    let bounds = Bounds::new(n, 1)?;
    let expected = bounds.big_n + 1;
    if paths.len() as u64 != expected {
        return Err(PathsError::PathCount {
            expected,
            got: paths.len(),
        });
    }
    let n = n as usize;
    for (index, path) in paths.iter().enumerate() {
        if path.len() != n + 1 {
            return Err(PathsError::PathLength {
                index,
                expected: n,
                got: path.len().saturating_sub(1),
            });
        }
        for &w in path {
            if w >= frame.size() {
                return Err(PathsError::WorldOutOfRange {
                    world: w,
                    size: frame.size(),
                });
            }
        }
        for step in 0..n {
            if !frame.has_edge(path[step], path[step + 1]) {
                return Err(PathsError::BrokenPath {
                    index,
                    step,
                    from: path[step],
                    to: path[step + 1],
                });
            }
        }
    }
    let star = &frame.closure().refl_trans;
    for i in 0..paths.len() - 1 {
        if !star.get(paths[i][n], paths[i + 1][0]) {
            return Err(PathsError::ConnectivityMissing { i, next: i + 1 });
        }
    }
    for i in 0..paths.len() {
        for ip in i + 1..paths.len() {
            for j in 0..n {
                if frame.has_edge(paths[i][j], paths[ip][j + 1]) {
                    debug_assert!(frame.rel().get(paths[i][j], paths[ip][j + 1]));
                    return Ok((i, ip, j));
                }
            }
        }
    }
    Err(PathsError::LinkMissing)
}

/// Given at least `M + 1 = nⁿ|Ψ|ⁿ + 1` labeled paths of length `n` (with `Ψ`
/// the set of labels they use) in a model whose frame validates the
/// degree-`n` strictly positive core, chained by `R*`, finds `(i, i′, j)`
/// with `i < i′` and `u^{i′}_{j+1} ∈ R(u^i_j) ∩ ϑ(ψ^i_j)`.
pub fn grid_link(
    model: &Model,
    n: u64,
    paths: &[LabeledPath],
) -> Result<(usize, usize, usize), PathsError> {
    if n == 0 {
        return Err(PathsError::ZeroParameter { which: "n" });
    }
    check_frame_class(model.frame(), n)?;
    let alphabet: std::collections::BTreeSet<&Formula> =
        paths.iter().flat_map(|p| p.labels()).collect();
    let bounds = Bounds::new(n, alphabet.len().max(1) as u64)?;
    let expected = bounds.big_m + 1;
    if (paths.len() as u64) < expected {
        return Err(PathsError::TooFewPaths {
            expected,
            got: paths.len(),
        });
    }
    let n = n as usize;
    for (index, path) in paths.iter().enumerate() {
        if path.len() != n {
            return Err(PathsError::PathLength {
                index,
                expected: n,
                got: path.len(),
            });
        }
        path.validate(model)?;
    }
    let star = &model.frame().closure().refl_trans;
    for i in 0..paths.len() - 1 {
        if !star.get(paths[i].worlds()[n], paths[i + 1].worlds()[0]) {
            return Err(PathsError::ConnectivityMissing { i, next: i + 1 });
        }
    }
    let sets = label_sets(model, &alphabet.iter().copied().collect::<Vec<_>>());
    for i in 0..paths.len() {
        for ip in i + 1..paths.len() {
            for j in 0..n {
                let target = paths[ip].worlds()[j + 1];
                let from = paths[i].worlds()[j];
                let label = &paths[i].labels()[j];
                if model.frame().has_edge(from, target) && sets[label].contains(target) {
                    return Ok((i, ip, j));
                }
            }
        }
    }
    Err(PathsError::LinkMissing)
}
