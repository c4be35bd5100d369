//! Frame validity of formulas and axiom schemes.
//!
//! The ground truth here is [`valid_bruteforce`]: a formula is valid in a
//! frame when it is true at every world under every valuation of its
//! variables. The sweep is exponential in `worlds × variables`, so it is
//! guarded by a caller-set bit budget.
//!
//! For the strictly positive axiom families there are fast checkers built on
//! minimal valuations ([`min_p_sets`]): an antecedent `γ ∈ Fm⁺(p)` is true at
//! `w` for some valuation iff it is true for one of the ⊆-minimal sets
//! `ϑ(p) = S`, and validity of `γ → ◊p` (and friends) reduces to a
//! first-order check on those sets. The Löb-style schemes additionally reduce
//! to converse well-foundedness. Every fast path agrees with the brute-force
//! oracle; the test suite pins that down.
//!
//! A small catalog maps logic names (`K4`, `wK4n`, `GLsigma`, …) to
//! [`LogicSpec`] values: axiom lists plus a pretransitivity degree, the `n`
//! for which the logic contains the degree-`n` strictly positive core. All
//! functions are pure over immutable inputs; long sweeps stay deterministic
//! (ascending valuation masks, early exit on the first countermodel).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitMatrix, BitSet};
use crate::formula::{Formula, Scheme, SchemeError, SpFormula};
use crate::kripke::Frame;

/// Default cap on `worlds × variables` for brute-force sweeps (2²⁴ masks).
pub const DEFAULT_VALUATION_BITS: usize = 24;

/// Default cap on candidate sets produced by the minimal-valuation recursion.
pub const DEFAULT_MINSETS_BUDGET: usize = 1 << 14;

/// Errors from validity checking and catalog lookup.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidityError {
    /// A sweep or recursion outgrew its budget.
    #[error("{task} needs {needed} {unit}, over the limit of {limit}")]
    BudgetExceeded {
        task: &'static str,
        unit: &'static str,
        needed: usize,
        limit: usize,
    },
    /// The scheme failed its own side conditions.
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    /// Minimal valuations are only defined for strictly positive formulas.
    #[error("formula {formula} is not strictly positive")]
    NotStrictlyPositive { formula: String },
    /// Minimal valuations track a single variable.
    #[error("formula {formula} mentions more than one variable")]
    MixedVariables { formula: String },
    /// Logic specifications must declare a positive pretransitivity degree.
    #[error("logic {name:?} must declare a pretransitivity degree of at least 1")]
    ZeroPretransDegree { name: String },
    /// The catalog has no entry under this key.
    #[error("unknown logic key {key:?}")]
    UnknownLogic { key: String },
    /// The catalog entry needs a parameter in range.
    #[error("logic {key:?} takes a parameter n >= {min}")]
    LogicParameter { key: String, min: usize },
    /// The catalog entry takes no parameter.
    #[error("logic {key:?} does not take a parameter")]
    LogicNoParameter { key: String },
}

/// Compiled form of a formula for single-word valuation sweeps: a post-order
/// op list over deduplicated subformulas, evaluated on `u64` world masks.
struct WordProgram {
    ops: Vec<WordOp>,
    vars: Vec<String>,
    size: usize,
    full: u64,
    rows: Vec<u64>,
}

enum WordOp {
    Bot,
    Var(usize),
    Imp(usize, usize),
    Dia(usize),
}

impl WordProgram {
    fn compile(frame: &Frame, phi: &Formula) -> Self {
        let size = frame.size();
        debug_assert!(size <= 64);
        let vars: Vec<String> = phi.vars().into_iter().collect();
        let mut ops = Vec::new();
        let mut index: BTreeMap<Formula, usize> = BTreeMap::new();
        Self::compile_into(phi, &vars, &mut ops, &mut index);
        let rows = (0..size)
            .map(|w| frame.successors(w).words()[0])
            .collect();
        let full = if size == 64 { !0 } else { (1u64 << size) - 1 };
        WordProgram {
            ops,
            vars,
            size,
            full,
            rows,
        }
    }

    fn compile_into(
        phi: &Formula,
        vars: &[String],
        ops: &mut Vec<WordOp>,
        index: &mut BTreeMap<Formula, usize>,
    ) -> usize {
        if let Some(&slot) = index.get(phi) {
            return slot;
        }
        let op = match phi {
            Formula::Bot => WordOp::Bot,
            Formula::Var(p) => {
                let v = vars.iter().position(|q| q == p).expect("collected var");
                WordOp::Var(v)
            }
            Formula::Imp(a, b) => {
                let a = Self::compile_into(a, vars, ops, index);
                let b = Self::compile_into(b, vars, ops, index);
                WordOp::Imp(a, b)
            }
            Formula::Dia(a) => {
                let a = Self::compile_into(a, vars, ops, index);
                WordOp::Dia(a)
            }
        };
        ops.push(op);
        let slot = ops.len() - 1;
        index.insert(phi.clone(), slot);
        slot
    }

    /// Truth set of the root under the packed valuation `mask`, where
    /// variable `i` occupies bits `i·size‥(i+1)·size`, least world first.
    fn eval(&self, mask: u64, scratch: &mut Vec<u64>) -> u64 {
        scratch.clear();
        for op in &self.ops {
            let out = match *op {
                WordOp::Bot => 0,
                WordOp::Var(v) => (mask >> (v * self.size)) & self.full,
                WordOp::Imp(a, b) => (!scratch[a] | scratch[b]) & self.full,
                WordOp::Dia(a) => {
                    let arg = scratch[a];
                    let mut out = 0;
                    for (w, &row) in self.rows.iter().enumerate() {
                        if row & arg != 0 {
                            out |= 1 << w;
                        }
                    }
                    out
                }
            };
            scratch.push(out);
        }
        *scratch.last().expect("programs are nonempty")
    }
}

/// Whether `phi` is true at every world under every valuation.
///
/// `limit_bits` caps `worlds × variables`; beyond it the sweep refuses to run
/// rather than silently taking forever. Masks are enumerated in ascending
/// order with early exit, so the first countermodel found is deterministic.
pub fn valid_bruteforce(
    frame: &Frame,
    phi: &Formula,
    limit_bits: usize,
) -> Result<bool, ValidityError> {
    let nvars = phi.vars().len();
    let bits = frame.size() * nvars;
    if bits > limit_bits.min(63) {
        return Err(ValidityError::BudgetExceeded {
            task: "brute-force validity sweep",
            unit: "valuation bits",
            needed: bits,
            limit: limit_bits.min(63),
        });
    }
    let program = WordProgram::compile(frame, phi);
    let mut scratch = Vec::with_capacity(program.ops.len());
    for mask in 0..(1u64 << bits) {
        if program.eval(mask, &mut scratch) != program.full {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The first refuting valuation and world for `phi` on `frame`, if any, in
/// ascending mask order (so repeated runs find the same countermodel).
pub fn first_countermodel(
    frame: &Frame,
    phi: &Formula,
    limit_bits: usize,
) -> Result<Option<(BTreeMap<String, BitSet>, usize)>, ValidityError> {
    let nvars = phi.vars().len();
    let bits = frame.size() * nvars;
    if bits > limit_bits.min(63) {
        return Err(ValidityError::BudgetExceeded {
            task: "brute-force countermodel sweep",
            unit: "valuation bits",
            needed: bits,
            limit: limit_bits.min(63),
        });
    }
    let program = WordProgram::compile(frame, phi);
    let mut scratch = Vec::with_capacity(program.ops.len());
    for mask in 0..(1u64 << bits) {
        let truth = program.eval(mask, &mut scratch);
        if truth != program.full {
            let world = (!truth & program.full).trailing_zeros() as usize;
            let valuation = program
                .vars
                .iter()
                .enumerate()
                .map(|(i, var)| {
                    let word = (mask >> (i * program.size)) & program.full;
                    let set = BitSet::from_indices(
                        frame.size(),
                        (0..frame.size()).filter(|&w| word & (1 << w) != 0),
                    );
                    (var.clone(), set)
                })
                .collect();
            return Ok(Some((valuation, world)));
        }
    }
    Ok(None)
}

/// The ⊆-minimal valuations of a strictly positive formula's variable that
/// make it true at a fixed world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinSets {
    antichain: Vec<BitSet>,
}

impl MinSets {
    /// The minimal sets, pairwise ⊆-incomparable, in ascending order.
    pub fn sets(&self) -> &[BitSet] {
        &self.antichain
    }

    /// No valuation at all makes the formula true at the world.
    pub fn is_unsatisfiable(&self) -> bool {
        self.antichain.is_empty()
    }
}

/// Keeps only the ⊆-minimal sets, deduplicated and sorted.
fn prune_antichain(mut sets: Vec<BitSet>) -> Vec<BitSet> {
    sets.sort();
    sets.dedup();
    let mut kept: Vec<BitSet> = Vec::with_capacity(sets.len());
    for s in sets {
        if !kept.iter().any(|t| t.is_subset_of(&s)) {
            kept.push(s);
        }
    }
    kept
}

struct MinSetsBuilder<'a> {
    frame: &'a Frame,
    budget: usize,
    produced: usize,
    memo: BTreeMap<(usize, usize), Vec<BitSet>>,
}

impl MinSetsBuilder<'_> {
    fn run(&mut self, node: usize, shape: &[SpNode], w: usize) -> Result<Vec<BitSet>, ValidityError> {
        if let Some(hit) = self.memo.get(&(node, w)) {
            return Ok(hit.clone());
        }
        let n = self.frame.size();
        let raw = match &shape[node] {
            SpNode::Top => vec![BitSet::new(n)],
            SpNode::Var => vec![BitSet::singleton(n, w)],
            SpNode::And(a, b) => {
                let left = self.run(*a, shape, w)?;
                let right = self.run(*b, shape, w)?;
                let mut out = Vec::with_capacity(left.len() * right.len());
                for s in &left {
                    for t in &right {
                        let mut u = s.clone();
                        u.union_with(t);
                        out.push(u);
                    }
                }
                out
            }
            SpNode::Dia(a) => {
                let mut out = Vec::new();
                for v in self.frame.successors(w).iter() {
                    out.extend(self.run(*a, shape, v)?);
                }
                out
            }
        };
        self.produced += raw.len();
        if self.produced > self.budget {
            return Err(ValidityError::BudgetExceeded {
                task: "minimal-valuation recursion",
                unit: "candidate sets",
                needed: self.produced,
                limit: self.budget,
            });
        }
        let pruned = prune_antichain(raw);
        self.memo.insert((node, w), pruned.clone());
        Ok(pruned)
    }
}

/// Flattened strictly positive skeleton, indexed for memoization.
enum SpNode {
    Top,
    Var,
    And(usize, usize),
    Dia(usize),
}

fn flatten_sp(shape: &SpFormula, out: &mut Vec<SpNode>) -> usize {
    let node = match shape {
        SpFormula::Top => SpNode::Top,
        SpFormula::Var(_) => SpNode::Var,
        SpFormula::And(a, b) => {
            let a = flatten_sp(a, out);
            let b = flatten_sp(b, out);
            SpNode::And(a, b)
        }
        SpFormula::Dia(a) => {
            let a = flatten_sp(a, out);
            SpNode::Dia(a)
        }
    };
    out.push(node);
    out.len() - 1
}

/// [`min_p_sets`] with an explicit budget on produced candidate sets.
pub fn min_p_sets_with_budget(
    frame: &Frame,
    w: usize,
    gamma: &Formula,
    budget: usize,
) -> Result<MinSets, ValidityError> {
    let shape = gamma
        .sp_shape()
        .ok_or_else(|| ValidityError::NotStrictlyPositive {
            formula: gamma.to_string(),
        })?;
    if gamma.vars().len() > 1 {
        return Err(ValidityError::MixedVariables {
            formula: gamma.to_string(),
        });
    }
    let mut nodes = Vec::new();
    let root = flatten_sp(&shape, &mut nodes);
    let mut builder = MinSetsBuilder {
        frame,
        budget,
        produced: 0,
        memo: BTreeMap::new(),
    };
    let antichain = builder.run(root, &nodes, w)?;
    Ok(MinSets { antichain })
}

/// The ⊆-minimal sets `S` such that `gamma` is true at `w` when its variable
/// is valued `S`. An empty antichain means no valuation works.
///
/// The recursion follows the strictly positive shape: `⊤ ↦ {∅}`,
/// `p ↦ {{w}}`, conjunctions take pairwise unions, diamonds union over
/// successors, pruning to the antichain of minimal sets at every node.
pub fn min_p_sets(frame: &Frame, w: usize, gamma: &Formula) -> Result<MinSets, ValidityError> {
    min_p_sets_with_budget(frame, w, gamma, DEFAULT_MINSETS_BUDGET)
}

/// `GLn` and the two-step Löb variant are aliases for `ALob` instances.
fn canonical(scheme: &Scheme) -> Scheme {
    match scheme {
        Scheme::GLn { n } => Scheme::ALob {
            beta: Formula::dia_k(n - 1, Formula::var("p0")),
        },
        Scheme::GL2Variant => Scheme::ALob {
            beta: Formula::dia(Formula::sigma(2, "p0")),
        },
        other => other.clone(),
    }
}

/// Whether every instance of `scheme` is valid in `frame`, via the fastest
/// sound route available.
///
/// `Trans`/`WTrans` and the graded reflexivity/symmetry schemes are
/// first-order conditions on closure matrices. The strictly positive families
/// go through minimal valuations; a frame validates the Löb scheme for `β`
/// iff it validates the weak scheme for `◊β` and is conversely well-founded.
/// On an `n`-transitive frame the graded Löb scheme is equivalent to converse
/// well-foundedness; elsewhere it, like the remaining schemes, falls back to
/// the brute-force sweep. Whenever both routes are affordable they agree.
pub fn valid_axiom(frame: &Frame, scheme: &Scheme) -> Result<bool, ValidityError> {
    scheme.validate()?;
    match canonical(scheme) {
        Scheme::Trans { n } => {
            let n = n as usize;
            Ok(frame.power(n + 1).is_subset_of(&frame.power_union(n)))
        }
        Scheme::WTrans { n } => {
            let n = n as usize;
            let mut allowed = frame.power_union(n);
            allowed.union_with(&BitMatrix::identity(frame.size()));
            Ok(frame.power(n + 1).is_subset_of(&allowed))
        }
        Scheme::A4 { gamma } => {
            for w in 0..frame.size() {
                let succ = frame.successors(w);
                for s in min_p_sets(frame, w, &gamma)?.sets() {
                    if s.is_disjoint_from(&succ) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        Scheme::Aw4 { gamma } => {
            for w in 0..frame.size() {
                let mut reach = frame.successors(w);
                reach.insert(w);
                for s in min_p_sets(frame, w, &gamma)?.sets() {
                    if s.is_disjoint_from(&reach) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        Scheme::ALob { beta } => {
            let weak = Scheme::Aw4 {
                gamma: Formula::dia(beta),
            };
            Ok(valid_axiom(frame, &weak)? && frame.is_conversely_well_founded())
        }
        Scheme::ALobPlus { n } => {
            if frame.is_n_transitive(n as usize) {
                Ok(frame.is_conversely_well_founded())
            } else {
                let phi = scheme.instance()?;
                valid_bruteforce(frame, &phi, DEFAULT_VALUATION_BITS)
            }
        }
        Scheme::ATPlus { n } => Ok(frame.power_union(n as usize).diagonal_full()),
        Scheme::ABPlus { n } => Ok(frame.power_union(n as usize).is_symmetric()),
        Scheme::Sigma { .. }
        | Scheme::DiaPlus { .. }
        | Scheme::BoxPlus { .. }
        | Scheme::A3Plus { .. }
        | Scheme::L2 => {
            let phi = scheme.instance()?;
            valid_bruteforce(frame, &phi, DEFAULT_VALUATION_BITS)
        }
        Scheme::GLn { .. } | Scheme::GL2Variant => unreachable!("canonicalized above"),
    }
}

/// A named logic: axiom schemes plus structural metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicSpec {
    pub name: String,
    pub axioms: Vec<Scheme>,
    /// Degree `n` such that the logic contains the degree-`n` strictly
    /// positive core (and is therefore `n`-transitive).
    #[serde(rename = "n")]
    pub pretrans_degree: usize,
    /// Frames must additionally be conversely well-founded (Löb family).
    #[serde(rename = "cwf")]
    pub requires_cwf: bool,
}

impl LogicSpec {
    /// Checks the degree and every axiom's side conditions.
    pub fn validate(&self) -> Result<(), ValidityError> {
        if self.pretrans_degree == 0 {
            return Err(ValidityError::ZeroPretransDegree {
                name: self.name.clone(),
            });
        }
        for axiom in &self.axioms {
            axiom.validate()?;
        }
        Ok(())
    }
}

/// Whether `frame` validates every axiom of `spec` (plus converse
/// well-foundedness when the spec demands it).
pub fn is_lambda_frame(frame: &Frame, spec: &LogicSpec) -> Result<bool, ValidityError> {
    spec.validate()?;
    if spec.requires_cwf && !frame.is_conversely_well_founded() {
        return Ok(false);
    }
    for axiom in &spec.axioms {
        if !valid_axiom(frame, axiom)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One row of the built-in logic table.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub key: &'static str,
    /// Minimal admissible parameter; `None` when the key takes no parameter.
    pub min_n: Option<usize>,
    pub summary: &'static str,
}

/// The built-in logic table, keyed for [`resolve`].
pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry { key: "K4", min_n: None, summary: "transitivity: <><>p0 -> <>p0" },
    CatalogEntry { key: "wK4", min_n: None, summary: "weak transitivity: <><>p0 -> <>p0 | p0" },
    CatalogEntry { key: "GL", min_n: None, summary: "Goedel-Loeb: <>p0 -> <>(p0 & ~<>p0)" },
    CatalogEntry { key: "K4n", min_n: Some(2), summary: "<>^n p0 -> <>p0" },
    CatalogEntry { key: "wK4n", min_n: Some(2), summary: "<>^n p0 -> <>p0 | p0" },
    CatalogEntry { key: "GLn", min_n: Some(2), summary: "<>p0 -> <>(p0 & ~<>^(n-1) p0)" },
    CatalogEntry { key: "K4sigma", min_n: Some(1), summary: "<><>sigma_n(p0) -> <>p0" },
    CatalogEntry { key: "wK4sigma", min_n: Some(1), summary: "<><>sigma_n(p0) -> <>p0 | p0" },
    CatalogEntry { key: "GLsigma", min_n: Some(1), summary: "<>p0 -> <>(p0 & ~<>sigma_n(p0))" },
    CatalogEntry { key: "S4sigma", min_n: Some(1), summary: "K4sigma plus graded reflexivity" },
    CatalogEntry { key: "S5sigma", min_n: Some(1), summary: "S4sigma plus graded symmetry" },
    CatalogEntry { key: "K4.3sigma", min_n: Some(1), summary: "K4sigma plus graded linearity" },
    CatalogEntry { key: "S4.3sigma", min_n: Some(1), summary: "S4sigma plus graded linearity" },
    CatalogEntry { key: "GL2v", min_n: None, summary: "<>p0 -> <>(p0 & ~<>(p0 & <>p0))" },
    CatalogEntry { key: "L2", min_n: None, summary: "least 2-transitive subframe-hereditary logic" },
];

/// Resolves a catalog key (with its parameter, where one is required) to a
/// full logic specification.
pub fn resolve(key: &str, n: Option<usize>) -> Result<LogicSpec, ValidityError> {
    let entry = CATALOG
        .iter()
        .find(|e| e.key == key)
        .ok_or_else(|| ValidityError::UnknownLogic { key: key.to_owned() })?;
    let arity_error = || ValidityError::LogicParameter {
        key: key.to_owned(),
        min: entry.min_n.unwrap_or(0),
    };
    let n = match entry.min_n {
        None => {
            if n.is_some() {
                return Err(ValidityError::LogicNoParameter { key: key.to_owned() });
            }
            0
        }
        Some(min) => {
            let n = n.ok_or_else(arity_error)?;
            if n < min {
                return Err(arity_error());
            }
            n
        }
    };
    let p = || Formula::var("p0");
    let sigma_core = |m: usize| Formula::dia_k(2, Formula::sigma(m as u32, "p0"));
    let spec = match key {
        "K4" => LogicSpec {
            name: "K4".to_owned(),
            axioms: vec![Scheme::A4 { gamma: sigma_core(1) }],
            pretrans_degree: 1,
            requires_cwf: false,
        },
        "wK4" => LogicSpec {
            name: "wK4".to_owned(),
            axioms: vec![Scheme::Aw4 { gamma: sigma_core(1) }],
            pretrans_degree: 2,
            requires_cwf: false,
        },
        "GL" => LogicSpec {
            name: "GL".to_owned(),
            axioms: vec![Scheme::ALob { beta: Formula::dia(p()) }],
            pretrans_degree: 1,
            requires_cwf: true,
        },
        "K4n" => LogicSpec {
            name: format!("K4_1_{n}"),
            axioms: vec![Scheme::A4 { gamma: Formula::dia_k(n as u32, p()) }],
            pretrans_degree: n - 1,
            requires_cwf: false,
        },
        "wK4n" => LogicSpec {
            name: format!("wK4_1_{n}"),
            axioms: vec![Scheme::Aw4 { gamma: Formula::dia_k(n as u32, p()) }],
            pretrans_degree: n,
            requires_cwf: false,
        },
        "GLn" => LogicSpec {
            name: format!("GL_{n}"),
            axioms: vec![Scheme::GLn { n: n as u32 }],
            pretrans_degree: n - 1,
            requires_cwf: true,
        },
        "K4sigma" => LogicSpec {
            name: format!("K4sigma_{n}"),
            axioms: vec![Scheme::A4 { gamma: sigma_core(n) }],
            pretrans_degree: n,
            requires_cwf: false,
        },
        "wK4sigma" => LogicSpec {
            name: format!("wK4sigma_{n}"),
            axioms: vec![Scheme::Aw4 { gamma: sigma_core(n) }],
            pretrans_degree: n + 1,
            requires_cwf: false,
        },
        "GLsigma" => LogicSpec {
            name: format!("GLsigma_{n}"),
            axioms: vec![Scheme::ALob { beta: Formula::dia(Formula::sigma(n as u32, "p0")) }],
            pretrans_degree: n,
            requires_cwf: true,
        },
        "S4sigma" => LogicSpec {
            name: format!("S4sigma_{n}"),
            axioms: vec![
                Scheme::A4 { gamma: sigma_core(n) },
                Scheme::ATPlus { n: n as u32 },
            ],
            pretrans_degree: n,
            requires_cwf: false,
        },
        "S5sigma" => LogicSpec {
            name: format!("S5sigma_{n}"),
            axioms: vec![
                Scheme::A4 { gamma: sigma_core(n) },
                Scheme::ATPlus { n: n as u32 },
                Scheme::ABPlus { n: n as u32 },
            ],
            pretrans_degree: n,
            requires_cwf: false,
        },
        "K4.3sigma" => LogicSpec {
            name: format!("K4.3sigma_{n}"),
            axioms: vec![
                Scheme::A4 { gamma: sigma_core(n) },
                Scheme::A3Plus { n: n as u32 },
            ],
            pretrans_degree: n,
            requires_cwf: false,
        },
        "S4.3sigma" => LogicSpec {
            name: format!("S4.3sigma_{n}"),
            axioms: vec![
                Scheme::A4 { gamma: sigma_core(n) },
                Scheme::ATPlus { n: n as u32 },
                Scheme::A3Plus { n: n as u32 },
            ],
            pretrans_degree: n,
            requires_cwf: false,
        },
        "GL2v" => LogicSpec {
            name: "GL2v".to_owned(),
            axioms: vec![Scheme::GL2Variant],
            pretrans_degree: 2,
            requires_cwf: true,
        },
        "L2" => LogicSpec {
            name: "L2".to_owned(),
            axioms: vec![Scheme::L2],
            pretrans_degree: 2,
            requires_cwf: false,
        },
        _ => unreachable!("key was found in the catalog"),
    };
    debug_assert!(spec.validate().is_ok());
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::strategies::arb_frame;
    use proptest::prelude::*;

    fn frame(size: usize, edges: &[(usize, usize)]) -> Frame {
        Frame::new(size, edges).expect("valid test frame")
    }

    fn p() -> Formula {
        Formula::var("p0")
    }

    #[test]
    fn bruteforce_on_known_frames() {
        // One irreflexive world: every diamond is false, so the Löb axiom
        // holds vacuously.
        let point = frame(1, &[]);
        let gl = Scheme::ALob { beta: Formula::dia(p()) }.instance().unwrap();
        assert_eq!(valid_bruteforce(&point, &gl, 24), Ok(true));

        let two_cycle = frame(2, &[(0, 1), (1, 0)]);
        let trans1 = Scheme::Trans { n: 1 }.instance().unwrap();
        assert_eq!(valid_bruteforce(&two_cycle, &trans1, 24), Ok(false));
        let wtrans1 = Scheme::WTrans { n: 1 }.instance().unwrap();
        assert_eq!(valid_bruteforce(&two_cycle, &wtrans1, 24), Ok(true));
    }

    #[test]
    fn first_countermodel_is_deterministic() {
        // On the 2-cycle, the first mask refuting ◊²p → ◊p values p at {0}
        // (mask 1) and fails at world 0: R²(0) = {0} but R(0) = {1}.
        let two_cycle = frame(2, &[(0, 1), (1, 0)]);
        let trans1 = Scheme::Trans { n: 1 }.instance().unwrap();
        let (valuation, world) = first_countermodel(&two_cycle, &trans1, 24)
            .unwrap()
            .expect("Trans1 fails on the 2-cycle");
        assert_eq!(world, 0);
        assert_eq!(valuation["p0"], BitSet::singleton(2, 0));

        let wtrans1 = Scheme::WTrans { n: 1 }.instance().unwrap();
        assert_eq!(first_countermodel(&two_cycle, &wtrans1, 24), Ok(None));
    }

    #[test]
    fn bruteforce_enforces_budget() {
        let f = frame(5, &[]);
        let three_vars = Formula::or(
            Formula::var("p0"),
            Formula::or(Formula::var("p1"), Formula::var("p2")),
        );
        let err = valid_bruteforce(&f, &three_vars, 10).unwrap_err();
        assert_eq!(
            err,
            ValidityError::BudgetExceeded {
                task: "brute-force validity sweep",
                unit: "valuation bits",
                needed: 15,
                limit: 10,
            }
        );
        assert!(valid_bruteforce(&f, &three_vars, 15).is_ok());
    }

    #[test]
    fn min_sets_examples() {
        let three_cycle = frame(3, &[(0, 1), (1, 2), (2, 0)]);
        let sets = min_p_sets(&three_cycle, 0, &Formula::dia_k(2, p())).unwrap();
        assert_eq!(sets.sets(), &[BitSet::singleton(3, 2)]);

        let sets = min_p_sets(&three_cycle, 1, &Formula::top()).unwrap();
        assert_eq!(sets.sets(), &[BitSet::new(3)]);

        let point = frame(1, &[]);
        let sets = min_p_sets(&point, 0, &Formula::and(p(), Formula::dia(p()))).unwrap();
        assert!(sets.is_unsatisfiable());

        assert!(matches!(
            min_p_sets(&point, 0, &Formula::neg(p())),
            Err(ValidityError::NotStrictlyPositive { .. })
        ));
        assert!(matches!(
            min_p_sets(&point, 0, &Formula::and(p(), Formula::var("p1"))),
            Err(ValidityError::MixedVariables { .. })
        ));
    }

    #[test]
    fn min_sets_budget() {
        // A wide conjunction of diamonds on a complete frame multiplies fast.
        let complete = Frame::from_rel(crate::bits::BitMatrix::from_edges(
            6,
            (0..6).flat_map(|u| (0..6).map(move |v| (u, v))),
        ))
        .unwrap();
        let mut gamma = Formula::dia(p());
        for _ in 0..6 {
            gamma = Formula::and(Formula::dia(p()), Formula::dia(gamma));
        }
        assert!(matches!(
            min_p_sets_with_budget(&complete, 0, &gamma, 64),
            Err(ValidityError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn axiom_fast_paths_on_known_frames() {
        let three_cycle = frame(3, &[(0, 1), (1, 2), (2, 0)]);
        // R³ is the identity, so the minimal set at each w is {w}, never a
        // successor.
        let a4_loop = Scheme::A4 { gamma: Formula::dia_k(3, p()) };
        assert_eq!(valid_axiom(&three_cycle, &a4_loop), Ok(false));
        // ◊⁴p → ◊p holds: R⁴ = R.
        let a4_four = Scheme::A4 { gamma: Formula::dia_k(4, p()) };
        assert_eq!(valid_axiom(&three_cycle, &a4_four), Ok(true));

        let complete_reflexive = Frame::from_rel(crate::bits::BitMatrix::from_edges(
            3,
            (0..3).flat_map(|u| (0..3).map(move |v| (u, v))),
        ))
        .unwrap();
        let a4 = Scheme::A4 { gamma: Formula::dia_k(2, p()) };
        assert_eq!(valid_axiom(&complete_reflexive, &a4), Ok(true));

        let two_cycle = frame(2, &[(0, 1), (1, 0)]);
        let gl = Scheme::ALob { beta: Formula::dia(p()) };
        assert_eq!(valid_axiom(&two_cycle, &gl), Ok(false));

        // Graded reflexivity and symmetry use R¹ ∪ … ∪ Rⁿ, not R⁺.
        assert_eq!(valid_axiom(&three_cycle, &Scheme::ATPlus { n: 1 }), Ok(false));
        assert_eq!(valid_axiom(&three_cycle, &Scheme::ATPlus { n: 3 }), Ok(true));
        assert_eq!(valid_axiom(&three_cycle, &Scheme::ABPlus { n: 1 }), Ok(false));
        assert_eq!(valid_axiom(&three_cycle, &Scheme::ABPlus { n: 3 }), Ok(true));
    }

    #[test]
    fn lambda_frame_examples() {
        let chain = frame(3, &[(0, 1), (1, 2)]);
        let k4s2 = resolve("K4sigma", Some(2)).unwrap();
        assert_eq!(is_lambda_frame(&chain, &k4s2), Ok(true));

        let reflexive_point = frame(1, &[(0, 0)]);
        let gl = resolve("GL", None).unwrap();
        assert_eq!(is_lambda_frame(&reflexive_point, &gl), Ok(false));

        let three_cycle = frame(3, &[(0, 1), (1, 2), (2, 0)]);
        let k4_1_4 = resolve("K4n", Some(4)).unwrap();
        assert_eq!(is_lambda_frame(&three_cycle, &k4_1_4), Ok(true));
    }

    #[test]
    fn catalog_resolution() {
        for entry in CATALOG {
            let spec = resolve(entry.key, entry.min_n).unwrap();
            spec.validate().unwrap();
            assert!(spec.pretrans_degree >= 1);
        }
        assert_eq!(
            resolve("K4", None).unwrap().axioms,
            resolve("K4sigma", Some(1)).unwrap().axioms
        );
        assert_eq!(
            resolve("GLn", Some(1)).unwrap_err(),
            ValidityError::LogicParameter { key: "GLn".to_owned(), min: 2 }
        );
        assert_eq!(
            resolve("K4n", None).unwrap_err(),
            ValidityError::LogicParameter { key: "K4n".to_owned(), min: 2 }
        );
        assert!(matches!(
            resolve("T", None),
            Err(ValidityError::UnknownLogic { .. })
        ));
    }

    #[test]
    fn logic_spec_wire_format() {
        let json = r#"{"name":"custom","axioms":[{"scheme":"A4","gamma":"<><>p0"}],"n":1,"cwf":false}"#;
        let spec: LogicSpec = serde_json::from_str(json).unwrap();
        spec.validate().unwrap();
        assert_eq!(spec.axioms, vec![Scheme::A4 { gamma: Formula::dia_k(2, p()) }]);
        assert_eq!(serde_json::to_string(&spec).unwrap(), json);

        let zero = LogicSpec { name: "z".into(), axioms: vec![], pretrans_degree: 0, requires_cwf: false };
        assert!(matches!(
            zero.validate(),
            Err(ValidityError::ZeroPretransDegree { .. })
        ));
    }

    /// A modest scheme pool that exercises every fast path.
    fn scheme_pool() -> Vec<Scheme> {
        let sigma2 = Formula::dia_k(2, Formula::sigma(2, "p0"));
        vec![
            Scheme::Trans { n: 1 },
            Scheme::Trans { n: 2 },
            Scheme::WTrans { n: 1 },
            Scheme::WTrans { n: 2 },
            Scheme::A4 { gamma: Formula::dia_k(2, p()) },
            Scheme::A4 { gamma: sigma2.clone() },
            Scheme::Aw4 { gamma: Formula::dia_k(3, p()) },
            Scheme::Aw4 { gamma: sigma2 },
            Scheme::ALob { beta: Formula::dia(p()) },
            Scheme::ALob { beta: Formula::dia(Formula::sigma(2, "p0")) },
            Scheme::ALobPlus { n: 1 },
            Scheme::ALobPlus { n: 2 },
            Scheme::ATPlus { n: 2 },
            Scheme::ABPlus { n: 2 },
            Scheme::GLn { n: 3 },
            Scheme::GL2Variant,
        ]
    }

    proptest! {
        #[test]
        fn fast_paths_agree_with_bruteforce(
            f in arb_frame(),
            which in any::<proptest::sample::Index>(),
        ) {
            let pool = scheme_pool();
            let scheme = &pool[which.index(pool.len())];
            let fast = valid_axiom(&f, scheme).unwrap();
            let slow = valid_bruteforce(&f, &scheme.instance().unwrap(), 24).unwrap();
            prop_assert_eq!(fast, slow, "scheme {} on {:?}", scheme, f);
        }

        #[test]
        fn min_sets_against_subset_enumeration(
            f in arb_frame(),
            w_pick in any::<proptest::sample::Index>(),
            depth in 1u32..=2,
        ) {
            prop_assume!(f.size() <= 4);
            let w = w_pick.index(f.size());
            let gamma = Formula::and(Formula::dia_k(depth, p()), Formula::dia(p()));
            let min_sets = min_p_sets(&f, w, &gamma).unwrap();
            // Oracle: evaluate gamma at w for every subset S, keep minimal.
            let mut truthy: Vec<BitSet> = Vec::new();
            for mask in 0u64..(1 << f.size()) {
                let mut s = BitSet::new(f.size());
                for i in 0..f.size() {
                    if mask & (1 << i) != 0 {
                        s.insert(i);
                    }
                }
                let model = crate::kripke::Model::new(
                    f.clone(),
                    [("p0".to_owned(), s.clone())].into_iter().collect(),
                )
                .unwrap();
                if model.eval(&gamma).contains(w) {
                    truthy.push(s);
                }
            }
            let oracle = prune_antichain(truthy);
            prop_assert_eq!(min_sets.sets(), &oracle[..]);
        }

        #[test]
        fn antichain_invariant(f in arb_frame(), w_pick in any::<proptest::sample::Index>()) {
            let w = w_pick.index(f.size());
            let gamma = Formula::and(p(), Formula::dia(Formula::and(p(), Formula::dia(p()))));
            let sets = min_p_sets(&f, w, &gamma).unwrap();
            for (i, s) in sets.sets().iter().enumerate() {
                for (j, t) in sets.sets().iter().enumerate() {
                    if i != j {
                        prop_assert!(!s.is_subset_of(t));
                    }
                }
            }
        }
    }
}
