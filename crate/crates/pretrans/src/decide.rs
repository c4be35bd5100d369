//! Frame enumeration and budgeted countermodel search.
//!
//! Non-derivability of `ζ` in one of the catalog logics is witnessed by a
//! frame of the logic's class carrying a valuation that refutes `ζ`; the
//! finite model property guarantees such a witness exists whenever `ζ` is
//! not a theorem, though possibly only at the astronomical completeness
//! threshold `|Ψ^ζ|^C`. [`countermodel_search`] therefore scans frames in a
//! fixed deterministic order — all frames up to a small size, then seeded
//! random frames — and reports either the first refuting model or the exact
//! budget it exhausted. **An absent result is not a derivability proof** and
//! is reported alongside the untouched completeness threshold.
//!
//! [`inclusion_probe`] uses the same scan to compare two logics: a frame
//! validating every axiom of the second while refuting an axiom of the
//! first shows the first is not contained in the second.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitMatrix, BitSet};
use crate::formula::{Formula, Scheme};
use crate::kripke::{Frame, KripkeError, Model};
use crate::paths::Bounds;
use crate::validity::{
    first_countermodel, is_lambda_frame, valid_axiom, LogicSpec, ValidityError,
    DEFAULT_VALUATION_BITS,
};

/// Largest size for which full enumeration is allowed without an override.
pub const ENUMERATION_CAP: usize = 5;

/// Edge densities cycled through during the random phase.
pub const DENSITIES: [f64; 3] = [0.2, 0.4, 0.6];

/// Errors from enumeration and search plumbing.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecideError {
    #[error("frame enumeration needs at least one world")]
    ZeroSize,
    #[error("refusing to enumerate all {size}-world frames; the cap is {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("exhaustive_up_to ({exhaustive_up_to}) exceeds max_worlds ({max_worlds})")]
    BadBudget {
        exhaustive_up_to: usize,
        max_worlds: usize,
    },
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error(transparent)]
    Validity(#[from] ValidityError),
}

/// How far a search is allowed to go.
///
/// Sizes `1..=exhaustive_up_to` are scanned completely; each remaining size
/// up to `max_worlds` gets `max_frames` seeded random frames with densities
/// cycling through [`DENSITIES`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_worlds: usize,
    pub max_frames: u64,
    pub seed: u64,
    pub exhaustive_up_to: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_worlds: 4,
            max_frames: 512,
            seed: 0,
            exhaustive_up_to: 3,
        }
    }
}

impl SearchBudget {
    /// A purely exhaustive budget over all sizes up to `size`.
    pub fn exhaustive(size: usize) -> Self {
        SearchBudget {
            max_worlds: size,
            max_frames: 0,
            seed: 0,
            exhaustive_up_to: size,
        }
    }

    pub fn validate(&self) -> Result<(), DecideError> {
        if self.exhaustive_up_to > self.max_worlds {
            return Err(DecideError::BadBudget {
                exhaustive_up_to: self.exhaustive_up_to,
                max_worlds: self.max_worlds,
            });
        }
        Ok(())
    }
}

/// The adjacency matrix of `size²` bits read row-major, most significant
/// bit first, so that ascending codes enumerate matrices lexicographically.
pub fn frame_from_code(size: usize, code: u64) -> Frame {
    let cells = size * size;
    let mut rel = BitMatrix::new(size);
    for i in 0..size {
        for j in 0..size {
            if code >> (cells - 1 - (i * size + j)) & 1 == 1 {
                rel.set(i, j);
            }
        }
    }
    Frame::from_rel(rel).expect("size is validated by the callers")
}

/// Inverse of [`frame_from_code`].
pub fn frame_code(frame: &Frame) -> u64 {
    let size = frame.size();
    let cells = size * size;
    let mut code = 0;
    for (u, v) in frame.edges() {
        code |= 1 << (cells - 1 - (u * size + v));
    }
    code
}

fn check_enumerable(size: usize, cap: usize) -> Result<(), DecideError> {
    if size == 0 {
        return Err(DecideError::ZeroSize);
    }
    if size > cap || size * size >= u64::BITS as usize {
        return Err(DecideError::SizeCap { size, cap });
    }
    Ok(())
}

/// All `2^(size²)` frames of the given size in lexicographic matrix order.
pub fn enumerate_frames(size: usize) -> Result<impl Iterator<Item = Frame>, DecideError> {
    check_enumerable(size, ENUMERATION_CAP)?;
    Ok((0..1u64 << (size * size)).map(move |code| frame_from_code(size, code)))
}

/// Like [`enumerate_frames`] but keeping only one representative per
/// isomorphism class: the frame whose matrix code is smallest among all
/// relabelings by a vertex permutation.
pub fn enumerate_frames_reduced(size: usize) -> Result<impl Iterator<Item = Frame>, DecideError> {
    check_enumerable(size, ENUMERATION_CAP)?;
    Ok((0..1u64 << (size * size)).filter_map(move |code| {
        let frame = frame_from_code(size, code);
        (canonical_code(&frame) == code).then_some(frame)
    }))
}

/// The code of `frame` relabeled so that world `w` becomes `perm[w]`.
fn code_under(frame: &Frame, perm: &[usize]) -> u64 {
    let size = frame.size();
    let cells = size * size;
    let mut code = 0;
    for (u, v) in frame.edges() {
        code |= 1 << (cells - 1 - (perm[u] * size + perm[v]));
    }
    code
}

/// The least matrix code among all relabelings of `frame`.
pub fn canonical_code(frame: &Frame) -> u64 {
    use itertools::Itertools;
    (0..frame.size())
        .permutations(frame.size())
        .map(|perm| code_under(frame, &perm))
        .min()
        .expect("there is at least the identity permutation")
}

/// A uniform random frame where each edge appears with probability `density`.
pub fn random_frame(size: usize, density: f64, rng: &mut impl RngCore) -> Frame {
    assert!(size >= 1, "frames need at least one world");
    let threshold = (density * u64::MAX as f64) as u64;
    let mut rel = BitMatrix::new(size);
    for i in 0..size {
        for j in 0..size {
            if rng.next_u64() < threshold {
                rel.set(i, j);
            }
        }
    }
    Frame::from_rel(rel).expect("size checked above")
}

/// Whether `value < base^exp`, computed without big integers.
pub fn lt_pow(value: u64, base: u64, exp: u32) -> bool {
    if base == 0 {
        return exp == 0 && value == 0;
    }
    let mut acc: u64 = 1;
    for _ in 0..exp {
        match acc.checked_mul(base) {
            // `base ≥ 1` keeps the sequence monotone, so an early lead or an
            // overflow already decides the comparison.
            Some(next) => {
                acc = next;
                if value < acc {
                    return true;
                }
            }
            None => return true,
        }
    }
    value < acc
}

/// A model refuting the searched formula at `world`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub model: Model,
    pub world: usize,
}

/// Outcome of a [`countermodel_search`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub counterexample: Option<Counterexample>,
    /// Frames examined, counted in the deterministic scan order.
    pub frames_checked: u64,
    /// The size `|Ψ^ζ|^C` a complete search would need to reach before
    /// absence became a derivability proof. Never approached in practice.
    pub completeness_bound: String,
}

fn completeness_bound(spec: &LogicSpec, zeta: &Formula) -> String {
    let psi = zeta.dia_args().len().max(1) as u64;
    let n = spec.pretrans_degree as u64;
    match Bounds::new(n, psi) {
        Ok(bounds) => {
            let cap = if spec.requires_cwf {
                bounds.c_gl
            } else {
                bounds.c_k4
            };
            format!("{psi}^{cap}")
        }
        Err(_) => format!("{psi}^C with C beyond 64 bits (n = {n})"),
    }
}

/// Scans the frames of `spec`'s class for one refuting `zeta`, in a fixed
/// deterministic order: sizes ascending, codes ascending within a size, then
/// the seeded random phase. Returns the first hit, or the budget consumed.
///
/// Absence within a finite budget never proves derivability; the report
/// carries the completeness threshold to make the gap explicit.
pub fn countermodel_search(
    spec: &LogicSpec,
    zeta: &Formula,
    budget: &SearchBudget,
) -> Result<SearchReport, DecideError> {
    budget.validate()?;
    spec.validate()?;
    let bound = completeness_bound(spec, zeta);
    let mut frames_checked = 0;
    let report = |frames_checked, frame, valuation, world| -> Result<SearchReport, DecideError> {
        let model = Model::new(frame, valuation)?;
        debug_assert!(!model.eval(zeta).contains(world));
        Ok(SearchReport {
            counterexample: Some(Counterexample { model, world }),
            frames_checked,
            completeness_bound: bound.clone(),
        })
    };
    for size in 1..=budget.max_worlds {
        if size <= budget.exhaustive_up_to {
            check_enumerable(size, ENUMERATION_CAP)?;
            let total = 1u64 << (size * size);
            let hit = (0..total).into_par_iter().find_map_first(|code| {
                let frame = frame_from_code(size, code);
                refutation(&frame, spec, zeta)
                    .map(|found| found.map(|(valuation, world)| (code, frame, valuation, world)))
                    .transpose()
            });
            match hit {
                Some(Ok((code, frame, valuation, world))) => {
                    return report(frames_checked + code + 1, frame, valuation, world);
                }
                Some(Err(e)) => return Err(e.into()),
                None => frames_checked += total,
            }
        } else {
            let mut rng = rng_for(budget.seed, size);
            for trial in 0..budget.max_frames {
                let frame = random_frame(size, DENSITIES[(trial % 3) as usize], &mut rng);
                frames_checked += 1;
                if let Some((valuation, world)) = refutation(&frame, spec, zeta)? {
                    return report(frames_checked, frame, valuation, world);
                }
            }
        }
    }
    Ok(SearchReport {
        counterexample: None,
        frames_checked,
        completeness_bound: bound,
    })
}

/// One independent random stream per size, so the phases are deterministic
/// regardless of how earlier sizes ended.
fn rng_for(seed: u64, size: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (size as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn refutation(
    frame: &Frame,
    spec: &LogicSpec,
    zeta: &Formula,
) -> Result<Option<(BTreeMap<String, BitSet>, usize)>, ValidityError> {
    if !is_lambda_frame(frame, spec)? {
        return Ok(None);
    }
    first_countermodel(frame, zeta, DEFAULT_VALUATION_BITS)
}

/// Verdict of an [`inclusion_probe`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InclusionVerdict {
    /// A frame of `strong`'s class refuting one of `weak`'s axioms: the
    /// theorems of `weak` are not all theorems of `strong`.
    Separated {
        frame: Frame,
        refuted: Scheme,
        frames_checked: u64,
    },
    /// No separating frame within the budget. Evidence, not a proof, of
    /// `weak ⊆ strong`.
    NotSeparated { frames_checked: u64 },
}

/// Searches for a frame validating all axioms of `strong` (and its converse
/// well-foundedness requirement, if any) while refuting some axiom of
/// `weak`, in the same deterministic order as [`countermodel_search`].
pub fn inclusion_probe(
    weak: &LogicSpec,
    strong: &LogicSpec,
    budget: &SearchBudget,
) -> Result<InclusionVerdict, DecideError> {
    budget.validate()?;
    weak.validate()?;
    strong.validate()?;
    let mut frames_checked = 0;
    for size in 1..=budget.max_worlds {
        if size <= budget.exhaustive_up_to {
            check_enumerable(size, ENUMERATION_CAP)?;
            let total = 1u64 << (size * size);
            let hit = (0..total).into_par_iter().find_map_first(|code| {
                let frame = frame_from_code(size, code);
                separation(&frame, weak, strong)
                    .map(|found| found.map(|axiom| (code, frame, axiom)))
                    .transpose()
            });
            match hit {
                Some(Ok((code, frame, refuted))) => {
                    return Ok(InclusionVerdict::Separated {
                        frame,
                        refuted,
                        frames_checked: frames_checked + code + 1,
                    });
                }
                Some(Err(e)) => return Err(e.into()),
                None => frames_checked += total,
            }
        } else {
            let mut rng = rng_for(budget.seed, size);
            for trial in 0..budget.max_frames {
                let frame = random_frame(size, DENSITIES[(trial % 3) as usize], &mut rng);
                frames_checked += 1;
                if let Some(refuted) = separation(&frame, weak, strong)? {
                    return Ok(InclusionVerdict::Separated {
                        frame,
                        refuted,
                        frames_checked,
                    });
                }
            }
        }
    }
    Ok(InclusionVerdict::NotSeparated { frames_checked })
}

fn separation(
    frame: &Frame,
    weak: &LogicSpec,
    strong: &LogicSpec,
) -> Result<Option<Scheme>, ValidityError> {
    if !is_lambda_frame(frame, strong)? {
        return Ok(None);
    }
    for axiom in &weak.axioms {
        if !valid_axiom(frame, axiom)? {
            return Ok(Some(axiom.clone()));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validity::resolve;
    use proptest::prelude::*;

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_frames(1).unwrap().count(), 2);
        assert_eq!(enumerate_frames(2).unwrap().count(), 16);
        assert_eq!(enumerate_frames(3).unwrap().count(), 512);

        let mut frames = enumerate_frames(2).unwrap();
        assert!(frames.next().unwrap().edges().is_empty());
        assert_eq!(frames.next().unwrap().edges(), [(1, 1)]);
        assert_eq!(
            frames.last().unwrap().edges(),
            [(0, 0), (0, 1), (1, 0), (1, 1)]
        );

        assert_eq!(enumerate_frames(0).err(), Some(DecideError::ZeroSize));
        assert_eq!(
            enumerate_frames(6).err(),
            Some(DecideError::SizeCap { size: 6, cap: 5 })
        );
    }

    #[test]
    fn reduction_keeps_one_frame_per_isomorphism_class() {
        let reduced: Vec<Frame> = enumerate_frames_reduced(2).unwrap().collect();
        assert_eq!(reduced.len(), 10);
        // Swapping the two worlds pairs the 16 codes into the orbits
        // {0} {1,8} {2,4} {3,12} {5,10} {6} {7,14} {9} {11,13} {15}.
        let codes: Vec<u64> = reduced.iter().map(frame_code).collect();
        assert_eq!(codes, [0, 1, 2, 3, 5, 6, 7, 9, 11, 15]);
        // Every frame is represented: its canonical code is in the list.
        for frame in enumerate_frames(2).unwrap() {
            assert!(codes.contains(&canonical_code(&frame)));
        }
    }

    #[test]
    fn random_frames_are_seeded_and_density_bound() {
        let mut a = rng_for(42, 3);
        let mut b = rng_for(42, 3);
        assert_eq!(random_frame(3, 0.4, &mut a), random_frame(3, 0.4, &mut b));
        let mut rng = rng_for(7, 4);
        assert!(random_frame(4, 0.0, &mut rng).edges().is_empty());
    }

    #[test]
    fn lt_pow_agrees_with_arithmetic() {
        assert!(lt_pow(7, 2, 3));
        assert!(!lt_pow(8, 2, 3));
        assert!(lt_pow(0, 2, 0));
        assert!(!lt_pow(1, 2, 0));
        assert!(!lt_pow(3, 1, 100));
        assert!(lt_pow(0, 1, 100));
        assert!(lt_pow(u64::MAX, 2, 64));
        assert!(lt_pow(0, 0, 0) && !lt_pow(1, 0, 0) && !lt_pow(0, 0, 3));
    }

    #[test]
    fn budget_validation() {
        let bad = SearchBudget {
            exhaustive_up_to: 5,
            max_worlds: 4,
            ..SearchBudget::default()
        };
        assert_eq!(
            bad.validate().unwrap_err(),
            DecideError::BadBudget {
                exhaustive_up_to: 5,
                max_worlds: 4
            }
        );
    }

    #[test]
    fn search_finds_the_two_cycle_refuting_transitivity() {
        // ◊◊p → ◊p over the weakly transitive frames: the first hit in scan
        // order is the 2-cycle (code 6 at size 2) with p true at world 0.
        let spec = resolve("wK4", None).unwrap();
        let zeta: Formula = "<><>p0 -> <>p0".parse().unwrap();
        let report = countermodel_search(&spec, &zeta, &SearchBudget::exhaustive(2)).unwrap();
        let hit = report.counterexample.expect("the 2-cycle refutes it");
        assert_eq!(hit.model.frame().edges(), [(0, 1), (1, 0)]);
        assert_eq!(hit.model.var_set("p0").unwrap(), &BitSet::singleton(2, 0));
        assert_eq!(hit.world, 0);
        // 2 one-world frames, then codes 0..=6 at size two.
        assert_eq!(report.frames_checked, 9);

        // The hit re-validates: class membership and refutation.
        assert!(is_lambda_frame(hit.model.frame(), &spec).unwrap());
        assert!(!hit.model.eval(&zeta).contains(hit.world));
    }

    #[test]
    fn search_finds_a_dead_end_edge_refuting_density() {
        // ◊p → ◊◊p over the transitive frames: the first transitive frame
        // with an edge into a dead end is the single edge 1 → 0 (code 2).
        let spec = resolve("K4", None).unwrap();
        let zeta: Formula = "<>p0 -> <><>p0".parse().unwrap();
        let report = countermodel_search(&spec, &zeta, &SearchBudget::exhaustive(2)).unwrap();
        let hit = report.counterexample.expect("a dead-end edge refutes it");
        let edges = hit.model.frame().edges();
        assert_eq!(edges, [(1, 0)]);
        // ◊p holds at the source, ◊◊p fails: p at the sink, refuted at 1.
        assert_eq!(hit.model.var_set("p0").unwrap(), &BitSet::singleton(2, 0));
        assert_eq!(hit.world, 1);
        assert_eq!(report.frames_checked, 5);
        assert!(is_lambda_frame(hit.model.frame(), &spec).unwrap());
        assert!(!hit.model.eval(&zeta).contains(hit.world));
    }

    #[test]
    fn search_never_refutes_an_axiom() {
        // The weak-density axiom ◊◊p → ◊p ∨ p is valid on its own class.
        let spec = resolve("wK4", None).unwrap();
        let zeta: Formula = "<><>p0 -> <>p0 | p0".parse().unwrap();
        let report = countermodel_search(&spec, &zeta, &SearchBudget::exhaustive(3)).unwrap();
        assert_eq!(report.counterexample, None);
        assert_eq!(report.frames_checked, 2 + 16 + 512);
        // Ψ^ζ = {◊p, p} and the weakly transitive degree is 2, so
        // C = n(M² + M + 1) with M = n^n·|Ψ|^n = 16.
        assert_eq!(report.completeness_bound, "2^546");
    }

    #[test]
    fn search_is_deterministic_across_runs_and_uses_the_random_phase() {
        let spec = resolve("GL", None).unwrap();
        // ◊⊤ is refuted on any conversely well-founded frame; force the
        // random phase by keeping the exhaustive range empty.
        let zeta: Formula = "<>top".parse().unwrap();
        let budget = SearchBudget {
            max_worlds: 3,
            max_frames: 40,
            seed: 11,
            exhaustive_up_to: 0,
        };
        let first = countermodel_search(&spec, &zeta, &budget).unwrap();
        let second = countermodel_search(&spec, &zeta, &budget).unwrap();
        assert_eq!(first, second);
        let hit = first.counterexample.expect("cwf frames refute ◊⊤ somewhere");
        assert!(is_lambda_frame(hit.model.frame(), &spec).unwrap());
        assert!(!hit.model.eval(&zeta).contains(hit.world));
    }

    #[test]
    fn probe_separates_incomparable_graded_transitivity() {
        // ◊³p → ◊p is not derivable from ◊⁴p → ◊p: some frame with R⁴ ⊆ R
        // has R³ ⊄ R. The 3-cycle is such a witness; the probe must return
        // one that re-validates.
        let weak = resolve("K4n", Some(3)).unwrap();
        let strong = resolve("K4n", Some(4)).unwrap();
        let budget = SearchBudget::exhaustive(3);
        match inclusion_probe(&weak, &strong, &budget).unwrap() {
            InclusionVerdict::Separated { frame, refuted, .. } => {
                assert!(is_lambda_frame(&frame, &strong).unwrap());
                assert!(!valid_axiom(&frame, &refuted).unwrap());
                assert!(weak.axioms.contains(&refuted));
            }
            InclusionVerdict::NotSeparated { .. } => panic!("the 3-cycle separates these"),
        }
        // The 3-cycle itself is a witness: R³ = Id, R⁴ = R.
        let cycle = Frame::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(is_lambda_frame(&cycle, &strong).unwrap());
        assert!(!valid_axiom(&cycle, &weak.axioms[0]).unwrap());
    }

    #[test]
    fn probe_respects_the_divisibility_lattice() {
        // ◊⁵p → ◊p follows from ◊³p → ◊p (compose R³ ⊆ R twice), so no
        // frame separates them in that direction…
        let weak = resolve("K4n", Some(5)).unwrap();
        let strong = resolve("K4n", Some(3)).unwrap();
        let budget = SearchBudget::exhaustive(4);
        assert_eq!(
            inclusion_probe(&weak, &strong, &budget).unwrap(),
            InclusionVerdict::NotSeparated {
                frames_checked: 2 + 16 + 512 + 65536
            }
        );
        // …while the converse direction is separated by the 4-cycle.
        match inclusion_probe(&strong, &weak, &budget).unwrap() {
            InclusionVerdict::Separated { frame, refuted, .. } => {
                assert!(is_lambda_frame(&frame, &weak).unwrap());
                assert!(!valid_axiom(&frame, &refuted).unwrap());
            }
            InclusionVerdict::NotSeparated { .. } => panic!("the 4-cycle separates these"),
        }
    }

    #[test]
    fn probe_confirms_weak_density_weaker_than_density() {
        // γ → ◊p ∨ p follows from γ → ◊p, so no frame of the stronger
        // class refutes the weaker axiom.
        let weak = resolve("wK4sigma", Some(2)).unwrap();
        let strong = resolve("K4sigma", Some(2)).unwrap();
        let budget = SearchBudget::exhaustive(4);
        assert_eq!(
            inclusion_probe(&weak, &strong, &budget).unwrap(),
            InclusionVerdict::NotSeparated {
                frames_checked: 2 + 16 + 512 + 65536
            }
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn codes_round_trip(size in 1usize..=3, seed in any::<u16>()) {
            let total = 1u64 << (size * size);
            let code = seed as u64 % total;
            prop_assert_eq!(frame_code(&frame_from_code(size, code)), code);
        }

        #[test]
        fn canonical_codes_are_invariant_under_relabeling(code in 0u64..512) {
            use itertools::Itertools;
            let frame = frame_from_code(3, code);
            let canon = canonical_code(&frame);
            for perm in (0..3).permutations(3) {
                let relabeled = frame_from_code(3, code_under(&frame, &perm));
                prop_assert_eq!(canonical_code(&relabeled), canon);
            }
        }
    }
}
