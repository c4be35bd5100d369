//! Modal formulas over the primitive connectives `⊥`, `→`, `◊`.
//!
//! Everything else is sugar expanded at construction time:
//! `¬φ := φ → ⊥`, `⊤ := ¬⊥`, `φ ∧ ψ := ¬(φ → ¬ψ)`, `φ ∨ ψ := ¬φ → ψ`,
//! `□φ := ¬◊¬φ`, and the graded forms `◊ᵏ`, `□ᵏφ := ¬◊ᵏ¬φ`,
//! `◊⁺ⁿφ := ⋁_{k=1..n} ◊ᵏφ`, `□⁺ⁿφ := ⋀_{k=1..n} □ᵏφ`, and
//! `σ₁(p) := p`, `σ_{k+1}(p) := p ∧ ◊σ_k(p)`.
//!
//! The printer re-folds that sugar for display; the tree itself is always the
//! primitive one, so structural equality is equality of desugared trees.

mod parse;
mod print;
mod scheme;

pub use parse::{parse, ParseError};
pub use print::{render, render_core};
pub use scheme::{Scheme, SchemeError};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// A modal formula in primitive form.
///
/// The derived `Ord` (⊥ < variables < implications < diamonds, then
/// lexicographic on parts) is used wherever a deterministic formula order is
/// needed, e.g. when iterating `Ψ^ζ` during filtration.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Bot,
    Var(String),
    Imp(Arc<Formula>, Arc<Formula>),
    Dia(Arc<Formula>),
}

use Formula::{Bot, Dia, Imp, Var};

impl Formula {
    pub fn bot() -> Self {
        Bot
    }

    pub fn var(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn imp(lhs: Formula, rhs: Formula) -> Self {
        Imp(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn dia(arg: Formula) -> Self {
        Dia(Arc::new(arg))
    }

    /// `¬φ := φ → ⊥`
    pub fn neg(arg: Formula) -> Self {
        Self::imp(arg, Bot)
    }

    /// `⊤ := ¬⊥`
    pub fn top() -> Self {
        Self::neg(Bot)
    }

    /// `φ ∧ ψ := ¬(φ → ¬ψ)`
    pub fn and(lhs: Formula, rhs: Formula) -> Self {
        Self::neg(Self::imp(lhs, Self::neg(rhs)))
    }

    /// `φ ∨ ψ := ¬φ → ψ`
    pub fn or(lhs: Formula, rhs: Formula) -> Self {
        Self::imp(Self::neg(lhs), rhs)
    }

    /// `□φ := ¬◊¬φ`
    pub fn nec(arg: Formula) -> Self {
        Self::neg(Self::dia(Self::neg(arg)))
    }

    /// `◊ᵏφ` (`k = 0` returns `φ` unchanged).
    pub fn dia_k(k: u32, arg: Formula) -> Self {
        (0..k).fold(arg, |f, _| Self::dia(f))
    }

    /// `□ᵏφ := ¬◊ᵏ¬φ` (`k = 0` returns `φ` unchanged).
    pub fn nec_k(k: u32, arg: Formula) -> Self {
        if k == 0 {
            arg
        } else {
            Self::neg(Self::dia_k(k, Self::neg(arg)))
        }
    }

    /// Right-folded conjunction of a non-empty list.
    ///
    /// # Panics
    /// Panics on an empty list.
    pub fn and_all(parts: Vec<Formula>) -> Self {
        let mut it = parts.into_iter().rev();
        let last = it.next().expect("conjunction of an empty list");
        it.fold(last, |acc, f| Self::and(f, acc))
    }

    /// Right-folded disjunction of a non-empty list.
    ///
    /// # Panics
    /// Panics on an empty list.
    pub fn or_all(parts: Vec<Formula>) -> Self {
        let mut it = parts.into_iter().rev();
        let last = it.next().expect("disjunction of an empty list");
        it.fold(last, |acc, f| Self::or(f, acc))
    }

    /// `◊⁺ⁿφ := ◊φ ∨ ◊²φ ∨ … ∨ ◊ⁿφ` (requires `n ≥ 1`).
    pub fn dia_plus(n: u32, arg: Formula) -> Self {
        assert!(n >= 1, "◊⁺ⁿ requires n ≥ 1");
        Self::or_all((1..=n).map(|k| Self::dia_k(k, arg.clone())).collect())
    }

    /// `□⁺ⁿφ := □φ ∧ □²φ ∧ … ∧ □ⁿφ` (requires `n ≥ 1`).
    pub fn nec_plus(n: u32, arg: Formula) -> Self {
        assert!(n >= 1, "□⁺ⁿ requires n ≥ 1");
        Self::and_all((1..=n).map(|k| Self::nec_k(k, arg.clone())).collect())
    }

    /// `σ₁(p) := p`, `σ_{k+1}(p) := p ∧ ◊σ_k(p)` (requires `n ≥ 1`).
    pub fn sigma(n: u32, p: &str) -> Self {
        assert!(n >= 1, "σₙ requires n ≥ 1");
        (1..n).fold(Self::var(p), |prev, _| Self::and(Self::var(p), Self::dia(prev)))
    }

    /// Uniform substitution of `with` for every occurrence of `var`.
    pub fn substitute(&self, var: &str, with: &Formula) -> Formula {
        match self {
            Bot => Bot,
            Var(p) => {
                if p == var {
                    with.clone()
                } else {
                    self.clone()
                }
            }
            Imp(a, b) => Formula::imp(a.substitute(var, with), b.substitute(var, with)),
            Dia(a) => Formula::dia(a.substitute(var, with)),
        }
    }

    /// Modal depth: maximal nesting of `◊`.
    pub fn depth(&self) -> usize {
        match self {
            Bot | Var(_) => 0,
            Imp(a, b) => a.depth().max(b.depth()),
            Dia(a) => a.depth() + 1,
        }
    }

    /// The set of variables occurring in the formula.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Bot => {}
            Var(p) => {
                out.insert(p.clone());
            }
            Imp(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Dia(a) => a.collect_vars(out),
        }
    }

    /// All subformulas, including the formula itself.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Bot | Var(_) => {}
            Imp(a, b) => {
                a.collect_subformulas(out);
                b.collect_subformulas(out);
            }
            Dia(a) => a.collect_subformulas(out),
        }
    }

    /// `Ψ^φ`: the set of `ψ` such that `◊ψ` is a subformula of `φ`.
    pub fn dia_args(&self) -> BTreeSet<Formula> {
        self.subformulas()
            .into_iter()
            .filter_map(|g| match g {
                Dia(a) => Some((*a).clone()),
                _ => None,
            })
            .collect()
    }

    /// Is the formula in the strictly positive fragment (built from variables
    /// and `⊤` using `∧` and `◊`)? Folded sugar (`⊤`, `∧`, double negation) is
    /// recognized; any other use of `→` or a bare `⊥` is rejected.
    pub fn is_strictly_positive(&self) -> bool {
        self.sp_shape().is_some()
    }

    /// Is the formula in `Fm⁺(p)`, the strictly positive fragment over the
    /// single variable `p`?
    pub fn is_strictly_positive_in(&self, p: &str) -> bool {
        self.is_strictly_positive() && self.vars().iter().all(|v| v == p)
    }

    /// Strictly positive skeleton of the formula, if it has one.
    pub(crate) fn sp_shape(&self) -> Option<SpFormula> {
        match self {
            Var(p) => Some(SpFormula::Var(p.clone())),
            Dia(a) => Some(SpFormula::Dia(Box::new(a.sp_shape()?))),
            Imp(a, b) if **b == Bot => match &**a {
                // ⊤ = ⊥ → ⊥
                Bot => Some(SpFormula::Top),
                Imp(x, z) => match &**z {
                    // ¬¬x
                    Bot => x.sp_shape(),
                    // x ∧ y = (x → (y → ⊥)) → ⊥
                    Imp(y, z2) if **z2 == Bot => Some(SpFormula::And(
                        Box::new(x.sp_shape()?),
                        Box::new(y.sp_shape()?),
                    )),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }
}

/// Skeleton of a strictly positive formula, with all sugar folded away.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum SpFormula {
    Top,
    Var(String),
    And(Box<SpFormula>, Box<SpFormula>),
    Dia(Box<SpFormula>),
}

/// Structural facts about a formula gathered in one pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaAnalysis {
    /// Modal depth `d(φ)`.
    pub depth: usize,
    /// `D_p(φ)`: for each variable, the set of modal depths of its occurrences.
    pub var_depths: BTreeMap<String, BTreeSet<usize>>,
    /// All subformulas including `φ` itself.
    pub subformulas: BTreeSet<Formula>,
    /// `Ψ^φ`: arguments of `◊`-subformulas.
    pub dia_args: BTreeSet<Formula>,
    /// For each occurring variable `p`: is `φ ∈ Fm⁺(p)`?
    pub strictly_positive_in: BTreeMap<String, bool>,
}

impl FormulaAnalysis {
    /// `d̲_p(φ)`: least occurrence depth of `p`, or `None` when `p` is absent
    /// (the paper convention `d̲_p = ∞`).
    pub fn min_depth(&self, p: &str) -> Option<usize> {
        self.var_depths.get(p).and_then(|ds| ds.iter().next().copied())
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.var_depths.keys().map(|s| s.as_str())
    }
}

/// Computes depth, occurrence depths, subformulas, `Ψ^φ`, and
/// strict-positivity flags for `φ`.
pub fn analyze(phi: &Formula) -> FormulaAnalysis {
    let mut var_depths: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    fn walk(f: &Formula, d: usize, out: &mut BTreeMap<String, BTreeSet<usize>>) {
        match f {
            Bot => {}
            Var(p) => {
                out.entry(p.clone()).or_default().insert(d);
            }
            Imp(a, b) => {
                walk(a, d, out);
                walk(b, d, out);
            }
            Dia(a) => walk(a, d + 1, out),
        }
    }
    walk(phi, 0, &mut var_depths);

    let sp = phi.is_strictly_positive();
    let single_var = var_depths.len() == 1;
    let strictly_positive_in = var_depths
        .keys()
        .map(|p| (p.clone(), sp && single_var))
        .collect();

    FormulaAnalysis {
        depth: phi.depth(),
        var_depths,
        subformulas: phi.subformulas(),
        dia_args: phi.dia_args(),
        strictly_positive_in,
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Wire representation: `{"op":"bot"}`, `{"op":"var","name":…}`,
/// `{"op":"imp","lhs":…,"rhs":…}`, `{"op":"dia","arg":…}`.
#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum FormulaRepr {
    Bot,
    Var { name: String },
    Imp { lhs: Box<FormulaRepr>, rhs: Box<FormulaRepr> },
    Dia { arg: Box<FormulaRepr> },
}

impl From<&Formula> for FormulaRepr {
    fn from(f: &Formula) -> Self {
        match f {
            Bot => FormulaRepr::Bot,
            Var(p) => FormulaRepr::Var { name: p.clone() },
            Imp(a, b) => FormulaRepr::Imp {
                lhs: Box::new(FormulaRepr::from(&**a)),
                rhs: Box::new(FormulaRepr::from(&**b)),
            },
            Dia(a) => FormulaRepr::Dia { arg: Box::new(FormulaRepr::from(&**a)) },
        }
    }
}

impl From<FormulaRepr> for Formula {
    fn from(r: FormulaRepr) -> Self {
        match r {
            FormulaRepr::Bot => Bot,
            FormulaRepr::Var { name } => Var(name),
            FormulaRepr::Imp { lhs, rhs } => Formula::imp((*lhs).into(), (*rhs).into()),
            FormulaRepr::Dia { arg } => Formula::dia((*arg).into()),
        }
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FormulaRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(FormulaRepr::deserialize(deserializer)?.into())
    }
}

/// Strategy producing small random formulas, biased toward the sugared
/// constructors so that printer folds get exercised.
#[cfg(test)]
pub(crate) fn arb_formula() -> impl proptest::strategy::Strategy<Value = Formula> {
    use proptest::prelude::*;
    let leaf = prop_oneof![
        Just(Formula::bot()),
        (0u8..3).prop_map(|i| Formula::var(format!("p{i}"))),
        Just(Formula::var("long name".to_string())),
    ];
    leaf.prop_recursive(5, 48, 4, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            inner.clone().prop_map(Formula::dia),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            inner.clone().prop_map(Formula::neg),
            inner.prop_map(Formula::nec),
        ]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> Formula {
        Formula::var("p0")
    }

    #[test]
    fn sugar_expansion() {
        assert_eq!(Formula::top(), Formula::imp(Bot, Bot));
        assert_eq!(Formula::neg(p()), Formula::imp(p(), Bot));
        assert_eq!(
            Formula::and(p(), Formula::var("p1")),
            Formula::imp(Formula::imp(p(), Formula::imp(Formula::var("p1"), Bot)), Bot)
        );
        assert_eq!(
            Formula::or(p(), Formula::var("p1")),
            Formula::imp(Formula::imp(p(), Bot), Formula::var("p1"))
        );
        assert_eq!(Formula::nec(p()), Formula::neg(Formula::dia(Formula::neg(p()))));
        // □² is ¬◊²¬, not a doubled □.
        assert_eq!(Formula::nec_k(2, p()), Formula::neg(Formula::dia(Formula::dia(Formula::neg(p())))));
        assert_eq!(Formula::dia_k(0, p()), p());
        assert_eq!(Formula::dia_k(3, p()), Formula::dia(Formula::dia(Formula::dia(p()))));
    }

    #[test]
    fn sigma_tower() {
        assert_eq!(Formula::sigma(1, "p0"), p());
        assert_eq!(Formula::sigma(2, "p0"), Formula::and(p(), Formula::dia(p())));
        assert_eq!(
            Formula::sigma(3, "p0"),
            Formula::and(p(), Formula::dia(Formula::and(p(), Formula::dia(p()))))
        );
    }

    #[test]
    fn dia_plus_shape() {
        assert_eq!(Formula::dia_plus(1, p()), Formula::dia(p()));
        assert_eq!(
            Formula::dia_plus(2, p()),
            Formula::or(Formula::dia(p()), Formula::dia_k(2, p()))
        );
        assert_eq!(Formula::nec_plus(1, p()), Formula::nec(p()));
    }

    #[test]
    fn substitution() {
        let f = Formula::imp(Formula::dia(p()), p());
        let g = f.substitute("p0", &Formula::and(p(), Formula::var("p1")));
        assert_eq!(
            g,
            Formula::imp(
                Formula::dia(Formula::and(p(), Formula::var("p1"))),
                Formula::and(p(), Formula::var("p1"))
            )
        );
        // Substituting an absent variable is the identity.
        assert_eq!(f.substitute("p7", &Bot), f);
        // σ₂(p)[p := q] = σ₂(q).
        assert_eq!(
            Formula::sigma(2, "p0").substitute("p0", &Formula::var("q")),
            Formula::sigma(2, "q")
        );
    }

    #[test]
    fn analysis_of_dia_dia_p() {
        let zeta = Formula::dia_k(2, p());
        let a = analyze(&zeta);
        assert_eq!(a.depth, 2);
        assert_eq!(a.var_depths["p0"], BTreeSet::from([2]));
        assert_eq!(a.min_depth("p0"), Some(2));
        assert_eq!(a.min_depth("p1"), None);
        assert_eq!(a.dia_args, BTreeSet::from([p(), Formula::dia(p())]));
        assert_eq!(
            a.subformulas,
            BTreeSet::from([p(), Formula::dia(p()), Formula::dia_k(2, p())])
        );
    }

    #[test]
    fn occurrence_depths_union_over_branches() {
        // p occurs at depth 0 (left of →) and depth 2 (under ◊◊).
        let f = Formula::imp(p(), Formula::dia_k(2, p()));
        let a = analyze(&f);
        assert_eq!(a.var_depths["p0"], BTreeSet::from([0, 2]));
        assert_eq!(a.min_depth("p0"), Some(0));
    }

    #[test]
    fn strict_positivity_accepts_the_fragment() {
        for f in [
            p(),
            Formula::top(),
            Formula::dia(p()),
            Formula::and(p(), Formula::dia(p())),
            Formula::sigma(3, "p0"),
            Formula::dia_k(2, Formula::and(Formula::top(), p())),
            // double negation folds away
            Formula::neg(Formula::neg(Formula::dia(p()))),
        ] {
            assert!(f.is_strictly_positive(), "{f} should be strictly positive");
            assert!(f.is_strictly_positive_in("p0") || f.vars().is_empty());
        }
    }

    #[test]
    fn strict_positivity_rejects_everything_else() {
        for f in [
            Formula::bot(),
            Formula::neg(p()),
            Formula::imp(p(), p()),
            Formula::or(p(), p()),
            Formula::nec(p()),
            Formula::dia(Formula::imp(p(), Bot)),
            Formula::dia_plus(2, p()),
        ] {
            assert!(!f.is_strictly_positive(), "{f} should not be strictly positive");
        }
        // Two distinct variables: strictly positive, but not in any single p.
        let two = Formula::and(p(), Formula::var("p1"));
        assert!(two.is_strictly_positive());
        assert!(!two.is_strictly_positive_in("p0"));
        let a = analyze(&two);
        assert_eq!(a.strictly_positive_in["p0"], false);
    }

    #[test]
    fn json_round_trip() {
        let f = Formula::imp(Formula::dia(p()), Formula::and(p(), Formula::bot()));
        let js = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<Formula>(&js).unwrap(), f);
        let lit: Formula =
            serde_json::from_str(r#"{"op":"imp","lhs":{"op":"bot"},"rhs":{"op":"var","name":"p3"}}"#)
                .unwrap();
        assert_eq!(lit, Formula::imp(Bot, Formula::var("p3")));
    }

    proptest! {
        #[test]
        fn min_depth_bounded_by_depth(f in arb_formula()) {
            let a = analyze(&f);
            for v in f.vars() {
                let d = a.min_depth(&v).expect("occurring variable has a depth");
                prop_assert!(d <= a.depth);
                prop_assert!(a.var_depths[&v].iter().all(|&k| k <= a.depth));
            }
        }

        #[test]
        fn substitution_for_absent_var_is_identity(f in arb_formula()) {
            prop_assert_eq!(f.substitute("zz", &Formula::bot()), f.clone());
        }

        #[test]
        fn dia_args_are_subformula_arguments(f in arb_formula()) {
            let subs = f.subformulas();
            for psi in f.dia_args() {
                prop_assert!(subs.contains(&Formula::dia(psi.clone())));
                prop_assert!(subs.contains(&psi));
            }
        }

        #[test]
        fn serde_round_trip(f in arb_formula()) {
            let js = serde_json::to_string(&f).unwrap();
            prop_assert_eq!(serde_json::from_str::<Formula>(&js).unwrap(), f);
        }

        #[test]
        fn print_parse_round_trip(f in arb_formula()) {
            prop_assert_eq!(parse(&render(&f)).unwrap(), f.clone());
            prop_assert_eq!(parse(&render_core(&f)).unwrap(), f);
        }

        #[test]
        fn strict_positivity_closed_under_substitution(
            n in 1u32..4, m in 1u32..4
        ) {
            // Members of Fm⁺(p) composed with members of Fm⁺(p) stay in Fm⁺(p).
            let inner = Formula::sigma(n, "p0");
            let outer = Formula::dia_k(m, Formula::and(Formula::top(), Formula::var("p0")));
            let composed = outer.substitute("p0", &inner);
            prop_assert!(composed.is_strictly_positive_in("p0"));
        }
    }
}
