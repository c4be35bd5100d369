//! Formula rendering.
//!
//! [`render`] re-folds sugar (`⊤ ¬ ∧ ∨ □`) for readability; [`render_core`]
//! prints the primitive tree as-is. Both emit exactly the surface syntax
//! accepted by the parser, with minimal parentheses, so
//! `parse(render(φ)) == φ` for every formula.

use super::parse::is_pvar;
use super::Formula;
use std::fmt::Write;

/// Display view of a formula with sugar folded back in.
enum Sugar<'a> {
    Bot,
    Top,
    Var(&'a str),
    Neg(Box<Sugar<'a>>),
    Dia(Box<Sugar<'a>>),
    Nec(Box<Sugar<'a>>),
    And(Box<Sugar<'a>>, Box<Sugar<'a>>),
    Or(Box<Sugar<'a>>, Box<Sugar<'a>>),
    Imp(Box<Sugar<'a>>, Box<Sugar<'a>>),
}

fn sugarize(f: &Formula) -> Sugar<'_> {
    match f {
        Formula::Bot => Sugar::Bot,
        Formula::Var(p) => Sugar::Var(p),
        Formula::Dia(a) => Sugar::Dia(Box::new(sugarize(a))),
        Formula::Imp(a, b) => {
            if **b == Formula::Bot {
                match &**a {
                    // ⊤ = ¬⊥
                    Formula::Bot => Sugar::Top,
                    // □y = ¬◊¬y, unless the ◊-argument is itself a conjunction
                    // ¬(u → ¬v): then ¬◊(u ∧ v) reads better than □(u → ¬v).
                    Formula::Dia(x) => match &**x {
                        Formula::Imp(y, z)
                            if **z == Formula::Bot
                                && !matches!(&**y,
                                    Formula::Imp(_, w) if matches!(&**w,
                                        Formula::Imp(_, b2) if **b2 == Formula::Bot)) =>
                        {
                            Sugar::Nec(Box::new(sugarize(y)))
                        }
                        _ => Sugar::Neg(Box::new(sugarize(a))),
                    },
                    // x ∧ y = ¬(x → ¬y); anything else negated stays ¬
                    Formula::Imp(x, z) => match &**z {
                        Formula::Imp(y, w) if **w == Formula::Bot => {
                            Sugar::And(Box::new(sugarize(x)), Box::new(sugarize(y)))
                        }
                        _ => Sugar::Neg(Box::new(sugarize(a))),
                    },
                    _ => Sugar::Neg(Box::new(sugarize(a))),
                }
            } else {
                // x ∨ y = ¬x → y, unless the antecedent negation is itself a
                // conjunction ¬(u → ¬v): then (u ∧ v) → y reads better.
                match &**a {
                    Formula::Imp(x, z)
                        if **z == Formula::Bot
                            && !matches!(&**x,
                                Formula::Imp(_, w) if matches!(&**w,
                                    Formula::Imp(_, b2) if **b2 == Formula::Bot)) =>
                    {
                        Sugar::Or(Box::new(sugarize(x)), Box::new(sugarize(b)))
                    }
                    _ => Sugar::Imp(Box::new(sugarize(a)), Box::new(sugarize(b))),
                }
            }
        }
    }
}

const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_PREFIX: u8 = 4;
const PREC_ATOM: u8 = 5;

fn prec(s: &Sugar) -> u8 {
    match s {
        Sugar::Imp(..) => PREC_IMP,
        Sugar::Or(..) => PREC_OR,
        Sugar::And(..) => PREC_AND,
        Sugar::Neg(_) | Sugar::Dia(_) | Sugar::Nec(_) => PREC_PREFIX,
        Sugar::Bot | Sugar::Top | Sugar::Var(_) => PREC_ATOM,
    }
}

fn write_var(out: &mut String, name: &str) {
    if is_pvar(name) {
        out.push_str(name);
    } else {
        let _ = write!(out, "\"{name}\"");
    }
}

fn write_sugar(s: &Sugar, out: &mut String, min: u8) {
    let parens = prec(s) < min;
    if parens {
        out.push('(');
    }
    match s {
        Sugar::Bot => out.push_str("bot"),
        Sugar::Top => out.push_str("top"),
        Sugar::Var(name) => write_var(out, name),
        Sugar::Neg(x) => {
            out.push('~');
            write_sugar(x, out, PREC_PREFIX);
        }
        Sugar::Dia(x) => {
            out.push_str("<>");
            write_sugar(x, out, PREC_PREFIX);
        }
        Sugar::Nec(x) => {
            out.push_str("[]");
            write_sugar(x, out, PREC_PREFIX);
        }
        Sugar::And(a, b) => {
            write_sugar(a, out, PREC_AND + 1);
            out.push_str(" & ");
            write_sugar(b, out, PREC_AND);
        }
        Sugar::Or(a, b) => {
            write_sugar(a, out, PREC_OR + 1);
            out.push_str(" | ");
            write_sugar(b, out, PREC_OR);
        }
        Sugar::Imp(a, b) => {
            write_sugar(a, out, PREC_IMP + 1);
            out.push_str(" -> ");
            write_sugar(b, out, PREC_IMP);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Renders with sugar folded (`top`, `~`, `&`, `|`, `[]`).
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write_sugar(&sugarize(f), &mut out, 0);
    out
}

fn write_core(f: &Formula, out: &mut String, min: u8) {
    let p = match f {
        Formula::Imp(..) => PREC_IMP,
        Formula::Dia(_) => PREC_PREFIX,
        Formula::Bot | Formula::Var(_) => PREC_ATOM,
    };
    let parens = p < min;
    if parens {
        out.push('(');
    }
    match f {
        Formula::Bot => out.push_str("bot"),
        Formula::Var(name) => write_var(out, name),
        Formula::Dia(a) => {
            out.push_str("<>");
            write_core(a, out, PREC_PREFIX);
        }
        Formula::Imp(a, b) => {
            write_core(a, out, PREC_IMP + 1);
            out.push_str(" -> ");
            write_core(b, out, PREC_IMP);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Renders the primitive tree without folding any sugar.
pub fn render_core(f: &Formula) -> String {
    let mut out = String::new();
    write_core(f, &mut out, 0);
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn p() -> Formula {
        Formula::var("p0")
    }

    #[test]
    fn folds_sugar() {
        assert_eq!(render(&Formula::top()), "top");
        assert_eq!(render(&Formula::neg(p())), "~p0");
        assert_eq!(render(&Formula::sigma(2, "p0")), "p0 & <>p0");
        assert_eq!(render(&Formula::nec(p())), "[]p0");
        assert_eq!(render(&Formula::or(p(), Formula::var("p1"))), "p0 | p1");
        assert_eq!(
            render(&Formula::neg(Formula::neg(p()))),
            "~~p0",
            "double negation is displayed, not folded"
        );
    }

    #[test]
    fn core_mode_keeps_primitives() {
        assert_eq!(render_core(&Formula::top()), "bot -> bot");
        assert_eq!(render_core(&Formula::neg(p())), "p0 -> bot");
        assert_eq!(
            render_core(&Formula::sigma(2, "p0")),
            "(p0 -> <>p0 -> bot) -> bot"
        );
        assert_eq!(render_core(&Formula::dia(Formula::imp(p(), p()))), "<>(p0 -> p0)");
    }

    #[test]
    fn minimal_parentheses() {
        let f = Formula::imp(
            Formula::or(Formula::and(p(), Formula::var("p1")), Formula::var("p2")),
            Formula::var("p3"),
        );
        assert_eq!(render(&f), "p0 & p1 | p2 -> p3");
        let g = Formula::imp(Formula::imp(p(), p()), p());
        assert_eq!(render(&g), "(p0 -> p0) -> p0");
        let h = Formula::and(Formula::and(p(), p()), p());
        assert_eq!(render(&h), "(p0 & p0) & p0");
        let k = Formula::dia(Formula::and(p(), Formula::var("p1")));
        assert_eq!(render(&k), "<>(p0 & p1)");
    }

    #[test]
    fn loeb_style_example() {
        // ◊p → ◊(p ∧ ¬◊(p ∧ ◊p))
        let beta = Formula::dia(Formula::sigma(2, "p0"));
        let f = Formula::imp(
            Formula::dia(p()),
            Formula::dia(Formula::and(p(), Formula::neg(beta))),
        );
        assert_eq!(render(&f), "<>p0 -> <>(p0 & ~<>(p0 & <>p0))");
    }

    #[test]
    fn quoted_names() {
        let f = Formula::dia(Formula::var("state ok"));
        assert_eq!(render(&f), "<>\"state ok\"");
        assert_eq!(parse(&render(&f)).unwrap(), f);
    }

    #[test]
    fn round_trips_on_fixed_examples() {
        for s in [
            "bot",
            "top",
            "p0 -> p1 -> p2",
            "~~p0",
            "p0 & (p1 | p2)",
            "[](p0 -> p1)",
            "<>p0 -> <>(p0 & ~<>(p0 & <>p0))",
            "(p0 | p1) & p2",
        ] {
            let f = parse(s).unwrap();
            assert_eq!(parse(&render(&f)).unwrap(), f, "sugar round trip for {s}");
            assert_eq!(parse(&render_core(&f)).unwrap(), f, "core round trip for {s}");
        }
    }
}
