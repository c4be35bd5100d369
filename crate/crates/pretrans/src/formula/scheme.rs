//! Axiom schemes of the pretransitive `K4`-family.
//!
//! The parametric schemes instantiate over the conventional variables
//! `p0` (and `p1`, `p2` for the two- and three-variable schemes):
//!
//! * `Trans_n := ◊ⁿ⁺¹p → ◊⁺ⁿp` and `wTrans_n := ◊ⁿ⁺¹p → p ∨ ◊⁺ⁿp`
//! * `A4_γ := γ → ◊p` and `Aw4_γ := γ → ◊p ∨ p` for strictly positive `γ`
//! * `ALöb_◊β := ◊p → ◊(p ∧ ¬β)` — the parameter is the formula `β` that
//!   appears negated; the subscript of the logic name carries an extra `◊`
//! * `ALöb⁺ⁿ := ◊⁺ⁿp → ◊⁺ⁿ(p ∧ ¬◊⁺ⁿp)`, `AT⁺ⁿ := p → ◊⁺ⁿp`,
//!   `AB⁺ⁿ := p → □⁺ⁿ◊⁺ⁿp`, and the two-variable `A.3⁺ⁿ`
//! * `GLn` is kept in its diamond form `◊p → ◊(p ∧ ¬◊ⁿ⁻¹p)`, i.e. it is the
//!   `ALöb` instance with `β = ◊ⁿ⁻¹p`

use super::{analyze, Formula};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("parameter n must be at least {min}, got {got}")]
    BadParameter { min: u32, got: u32 },
    #[error("{role} must be strictly positive (built from a variable and top using & and <>), got: {formula}")]
    NotStrictlyPositive { role: &'static str, formula: String },
    #[error("{role} must contain exactly one variable")]
    NotSingleVariable { role: &'static str },
    #[error("{role} must have minimal variable depth at least {needed}, got {got}")]
    TooShallow { role: &'static str, needed: usize, got: usize },
}

/// An axiom scheme identifier together with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SchemeRepr", into = "SchemeRepr")]
pub enum Scheme {
    /// `◊ⁿ⁺¹p → ◊⁺ⁿp`
    Trans { n: u32 },
    /// `◊ⁿ⁺¹p → p ∨ ◊⁺ⁿp`
    WTrans { n: u32 },
    /// `σₙ(p)` (not an axiom; exposed for experiments)
    Sigma { n: u32 },
    /// `◊⁺ⁿp`
    DiaPlus { n: u32 },
    /// `□⁺ⁿp`
    BoxPlus { n: u32 },
    /// `γ → ◊p`, `γ ∈ Fm⁺(p)` with `d̲_p(γ) ≥ 2`
    A4 { gamma: Formula },
    /// `γ → ◊p ∨ p`, `γ ∈ Fm⁺(p)` with `d̲_p(γ) ≥ 2`
    Aw4 { gamma: Formula },
    /// `◊p → ◊(p ∧ ¬β)`, `β ∈ Fm⁺(p)` with `d̲_p(β) ≥ 1`
    ALob { beta: Formula },
    /// `◊⁺ⁿp → ◊⁺ⁿ(p ∧ ¬◊⁺ⁿp)`
    ALobPlus { n: u32 },
    /// `p → ◊⁺ⁿp`
    ATPlus { n: u32 },
    /// `p → □⁺ⁿ◊⁺ⁿp`
    ABPlus { n: u32 },
    /// `◊⁺ⁿp ∧ ◊⁺ⁿq → ◊⁺ⁿ(p ∧ ◊⁺ⁿq) ∨ ◊⁺ⁿ(q ∧ ◊⁺ⁿp) ∨ ◊⁺ⁿ(p ∧ q)`
    A3Plus { n: u32 },
    /// `◊p → ◊(p ∧ ¬◊ⁿ⁻¹p)`, the `ALöb` instance with `β = ◊ⁿ⁻¹p`
    GLn { n: u32 },
    /// `◊p → ◊(p ∧ ¬◊(p ∧ ◊p))`, the `ALöb` instance with `β = ◊σ₂`
    GL2Variant,
    /// `◊(p ∧ ◊(q ∧ ◊r)) → ◊(p ∧ ◊r) ∨ ◊q ∨ ◊r`
    L2,
}

const P: &str = "p0";
const Q: &str = "p1";
const R: &str = "p2";

fn require_n(n: u32, min: u32) -> Result<(), SchemeError> {
    if n < min {
        Err(SchemeError::BadParameter { min, got: n })
    } else {
        Ok(())
    }
}

/// The single variable of a strictly positive parameter, after checking the
/// side conditions: membership in `Fm⁺(p)`, exactly one variable, minimal
/// occurrence depth at least `min_depth`.
fn positive_param(f: &Formula, role: &'static str, min_depth: usize) -> Result<String, SchemeError> {
    if !f.is_strictly_positive() {
        return Err(SchemeError::NotStrictlyPositive { role, formula: f.to_string() });
    }
    let vars = f.vars();
    if vars.len() != 1 {
        return Err(SchemeError::NotSingleVariable { role });
    }
    let v = vars.into_iter().next().unwrap();
    let got = analyze(f).min_depth(&v).expect("variable occurs");
    if got < min_depth {
        return Err(SchemeError::TooShallow { role, needed: min_depth, got });
    }
    Ok(v)
}

impl Scheme {
    /// Checks the scheme's side conditions without building the instance.
    pub fn validate(&self) -> Result<(), SchemeError> {
        match self {
            Scheme::Trans { n }
            | Scheme::WTrans { n }
            | Scheme::Sigma { n }
            | Scheme::DiaPlus { n }
            | Scheme::BoxPlus { n }
            | Scheme::ALobPlus { n }
            | Scheme::ATPlus { n }
            | Scheme::ABPlus { n }
            | Scheme::A3Plus { n } => require_n(*n, 1),
            Scheme::GLn { n } => require_n(*n, 2),
            Scheme::A4 { gamma } | Scheme::Aw4 { gamma } => {
                positive_param(gamma, "gamma", 2).map(|_| ())
            }
            Scheme::ALob { beta } => positive_param(beta, "beta", 1).map(|_| ()),
            Scheme::GL2Variant | Scheme::L2 => Ok(()),
        }
    }

    /// Builds the formula instance of the scheme.
    pub fn instance(&self) -> Result<Formula, SchemeError> {
        self.validate()?;
        let p = || Formula::var(P);
        Ok(match self {
            Scheme::Trans { n } => {
                Formula::imp(Formula::dia_k(n + 1, p()), Formula::dia_plus(*n, p()))
            }
            Scheme::WTrans { n } => Formula::imp(
                Formula::dia_k(n + 1, p()),
                Formula::or_all((0..=*n).map(|k| Formula::dia_k(k, p())).collect()),
            ),
            Scheme::Sigma { n } => Formula::sigma(*n, P),
            Scheme::DiaPlus { n } => Formula::dia_plus(*n, p()),
            Scheme::BoxPlus { n } => Formula::nec_plus(*n, p()),
            Scheme::A4 { gamma } => {
                let v = positive_param(gamma, "gamma", 2)?;
                Formula::imp(gamma.clone(), Formula::dia(Formula::var(v)))
            }
            Scheme::Aw4 { gamma } => {
                let v = positive_param(gamma, "gamma", 2)?;
                Formula::imp(
                    gamma.clone(),
                    Formula::or(Formula::dia(Formula::var(&v)), Formula::var(v)),
                )
            }
            Scheme::ALob { beta } => {
                let v = positive_param(beta, "beta", 1)?;
                Formula::imp(
                    Formula::dia(Formula::var(&v)),
                    Formula::dia(Formula::and(Formula::var(v), Formula::neg(beta.clone()))),
                )
            }
            Scheme::ALobPlus { n } => Formula::imp(
                Formula::dia_plus(*n, p()),
                Formula::dia_plus(
                    *n,
                    Formula::and(p(), Formula::neg(Formula::dia_plus(*n, p()))),
                ),
            ),
            Scheme::ATPlus { n } => Formula::imp(p(), Formula::dia_plus(*n, p())),
            Scheme::ABPlus { n } => Formula::imp(
                p(),
                Formula::nec_plus(*n, Formula::dia_plus(*n, p())),
            ),
            Scheme::A3Plus { n } => {
                let q = || Formula::var(Q);
                let dp = |f: Formula| Formula::dia_plus(*n, f);
                Formula::imp(
                    Formula::and(dp(p()), dp(q())),
                    Formula::or_all(vec![
                        dp(Formula::and(p(), dp(q()))),
                        dp(Formula::and(q(), dp(p()))),
                        dp(Formula::and(p(), q())),
                    ]),
                )
            }
            Scheme::GLn { n } => {
                return Scheme::ALob { beta: Formula::dia_k(n - 1, p()) }.instance()
            }
            Scheme::GL2Variant => {
                return Scheme::ALob { beta: Formula::dia(Formula::sigma(2, P)) }.instance()
            }
            Scheme::L2 => {
                let q = Formula::var(Q);
                let r = || Formula::var(R);
                Formula::imp(
                    Formula::dia(Formula::and(
                        p(),
                        Formula::dia(Formula::and(q.clone(), Formula::dia(r()))),
                    )),
                    Formula::or_all(vec![
                        Formula::dia(Formula::and(p(), Formula::dia(r()))),
                        Formula::dia(q),
                        Formula::dia(r()),
                    ]),
                )
            }
        })
    }

    /// Scheme name without parameters, as used in the wire format.
    pub fn kind(&self) -> &'static str {
        match self {
            Scheme::Trans { .. } => "Trans",
            Scheme::WTrans { .. } => "wTrans",
            Scheme::Sigma { .. } => "Sigma",
            Scheme::DiaPlus { .. } => "DiaPlus",
            Scheme::BoxPlus { .. } => "BoxPlus",
            Scheme::A4 { .. } => "A4",
            Scheme::Aw4 { .. } => "Aw4",
            Scheme::ALob { .. } => "ALob",
            Scheme::ALobPlus { .. } => "ALobPlus",
            Scheme::ATPlus { .. } => "ATPlus",
            Scheme::ABPlus { .. } => "ABPlus",
            Scheme::A3Plus { .. } => "A3Plus",
            Scheme::GLn { .. } => "GLn",
            Scheme::GL2Variant => "GL2v",
            Scheme::L2 => "L2",
        }
    }

    /// Builds a scheme from its wire-format parts: the kind name, an optional
    /// numeric parameter, and an optional strictly positive parameter.
    pub fn from_parts(
        kind: &str,
        n: Option<u32>,
        formula: Option<Formula>,
    ) -> Result<Scheme, String> {
        let need_n = || n.ok_or_else(|| format!("scheme {kind} requires parameter n"));
        let need_f = |role: &str| {
            formula
                .clone()
                .ok_or_else(|| format!("scheme {kind} requires parameter {role}"))
        };
        let scheme = match kind {
            "Trans" => Scheme::Trans { n: need_n()? },
            "wTrans" => Scheme::WTrans { n: need_n()? },
            "Sigma" => Scheme::Sigma { n: need_n()? },
            "DiaPlus" => Scheme::DiaPlus { n: need_n()? },
            "BoxPlus" => Scheme::BoxPlus { n: need_n()? },
            "A4" => Scheme::A4 { gamma: need_f("gamma")? },
            "Aw4" => Scheme::Aw4 { gamma: need_f("gamma")? },
            "ALob" => Scheme::ALob { beta: need_f("beta")? },
            "ALobPlus" => Scheme::ALobPlus { n: need_n()? },
            "ATPlus" => Scheme::ATPlus { n: need_n()? },
            "ABPlus" => Scheme::ABPlus { n: need_n()? },
            "A3Plus" => Scheme::A3Plus { n: need_n()? },
            "GLn" => Scheme::GLn { n: need_n()? },
            "GL2v" => Scheme::GL2Variant,
            "L2" => Scheme::L2,
            other => return Err(format!("unknown scheme '{other}'")),
        };
        scheme.validate().map_err(|e| e.to_string())?;
        Ok(scheme)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Trans { n }
            | Scheme::WTrans { n }
            | Scheme::Sigma { n }
            | Scheme::DiaPlus { n }
            | Scheme::BoxPlus { n }
            | Scheme::ALobPlus { n }
            | Scheme::ATPlus { n }
            | Scheme::ABPlus { n }
            | Scheme::A3Plus { n }
            | Scheme::GLn { n } => write!(f, "{}({})", self.kind(), n),
            Scheme::A4 { gamma } | Scheme::Aw4 { gamma } => {
                write!(f, "{}[{}]", self.kind(), gamma)
            }
            Scheme::ALob { beta } => write!(f, "{}[{}]", self.kind(), beta),
            Scheme::GL2Variant | Scheme::L2 => f.write_str(self.kind()),
        }
    }
}

/// Wire format: `{"scheme":"Trans","n":2}` or `{"scheme":"A4","gamma":"<><>p0"}`.
#[derive(Serialize, Deserialize)]
struct SchemeRepr {
    scheme: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<String>,
}

impl From<Scheme> for SchemeRepr {
    fn from(s: Scheme) -> Self {
        let kind = s.kind().to_string();
        match s {
            Scheme::Trans { n }
            | Scheme::WTrans { n }
            | Scheme::Sigma { n }
            | Scheme::DiaPlus { n }
            | Scheme::BoxPlus { n }
            | Scheme::ALobPlus { n }
            | Scheme::ATPlus { n }
            | Scheme::ABPlus { n }
            | Scheme::A3Plus { n }
            | Scheme::GLn { n } => SchemeRepr { scheme: kind, n: Some(n), gamma: None, beta: None },
            Scheme::A4 { gamma } | Scheme::Aw4 { gamma } => SchemeRepr {
                scheme: kind,
                n: None,
                gamma: Some(gamma.to_string()),
                beta: None,
            },
            Scheme::ALob { beta } => SchemeRepr {
                scheme: kind,
                n: None,
                gamma: None,
                beta: Some(beta.to_string()),
            },
            Scheme::GL2Variant | Scheme::L2 => {
                SchemeRepr { scheme: kind, n: None, gamma: None, beta: None }
            }
        }
    }
}

impl TryFrom<SchemeRepr> for Scheme {
    type Error = String;

    fn try_from(r: SchemeRepr) -> Result<Self, String> {
        let formula = match (&r.gamma, &r.beta) {
            (Some(_), Some(_)) => return Err("scheme takes gamma or beta, not both".into()),
            (Some(g), None) => Some(super::parse(g).map_err(|e| e.to_string())?),
            (None, Some(b)) => Some(super::parse(b).map_err(|e| e.to_string())?),
            (None, None) => None,
        };
        Scheme::from_parts(&r.scheme, r.n, formula)
    }
}
