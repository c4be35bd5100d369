//! Recursive-descent parser for the formula surface syntax.
//!
//! ```text
//! imp   := or ('->' imp)?            right-associative
//! or    := and ('|' or)?             right-associative
//! and   := unary ('&' and)?          right-associative
//! unary := ('~' | '<>' | 'dia' | '[]' | 'box') unary | atom
//! atom  := 'bot' | 'top' | VAR | '(' imp ')'
//! VAR   := p[0-9]+ | '"' any chars except '"' '"'
//! ```
//!
//! Binding strength: prefix operators bind tighter than `&`, then `|`,
//! then `->`. All sugar is expanded into the primitive tree immediately.

use super::Formula;
use thiserror::Error;

/// Syntax error with the byte offset of the offending token and the set of
/// tokens that would have been accepted there.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: found {found}, expected {}", expected.join(", "))]
pub struct ParseError {
    pub offset: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    BotKw,
    TopKw,
    DiaKw,
    BoxKw,
    Neg,
    AndOp,
    OrOp,
    Arrow,
    LPar,
    RPar,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Var(name) => format!("variable '{name}'"),
            Tok::BotKw => "'bot'".into(),
            Tok::TopKw => "'top'".into(),
            Tok::DiaKw | Tok::BoxKw => "modality".into(),
            Tok::Neg => "'~'".into(),
            Tok::AndOp => "'&'".into(),
            Tok::OrOp => "'|'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::LPar => "'('".into(),
            Tok::RPar => "')'".into(),
        }
    }
}

const ATOM_STARTS: &[&str] = &[
    "'bot'", "'top'", "variable", "'('", "'~'", "'<>'", "'[]'", "'dia'", "'box'",
];

pub(super) fn is_pvar(word: &str) -> bool {
    let mut chars = word.chars();
    chars.next() == Some('p') && {
        let rest = chars.as_str();
        !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit())
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'(' => {
                toks.push((Tok::LPar, start));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RPar, start));
                i += 1;
            }
            b'~' => {
                toks.push((Tok::Neg, start));
                i += 1;
            }
            b'&' => {
                toks.push((Tok::AndOp, start));
                i += 1;
            }
            b'|' => {
                toks.push((Tok::OrOp, start));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Arrow, start));
                    i += 2;
                } else {
                    return Err(ParseError {
                        offset: start,
                        found: "'-'".into(),
                        expected: vec!["'->'"],
                    });
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::DiaKw, start));
                    i += 2;
                } else {
                    return Err(ParseError {
                        offset: start,
                        found: "'<'".into(),
                        expected: vec!["'<>'"],
                    });
                }
            }
            b'[' => {
                if bytes.get(i + 1) == Some(&b']') {
                    toks.push((Tok::BoxKw, start));
                    i += 2;
                } else {
                    return Err(ParseError {
                        offset: start,
                        found: "'['".into(),
                        expected: vec!["'[]'"],
                    });
                }
            }
            b'"' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j] != b'"' {
                    j += 1;
                }
                if j == bytes.len() {
                    return Err(ParseError {
                        offset: start,
                        found: "unterminated quoted name".into(),
                        expected: vec!["closing '\"'"],
                    });
                }
                toks.push((Tok::Var(text[i + 1..j].to_string()), start));
                i = j + 1;
            }
            _ if b.is_ascii_alphabetic() || b == b'_' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                let word = &text[i..j];
                let tok = match word {
                    "bot" => Tok::BotKw,
                    "top" => Tok::TopKw,
                    "dia" => Tok::DiaKw,
                    "box" => Tok::BoxKw,
                    _ if is_pvar(word) => Tok::Var(word.to_string()),
                    _ => {
                        return Err(ParseError {
                            offset: start,
                            found: format!("'{word}'"),
                            expected: vec!["'bot'", "'top'", "'dia'", "'box'", "variable"],
                        })
                    }
                };
                toks.push((tok, start));
                i = j;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(ParseError {
                    offset: start,
                    found: format!("'{ch}'"),
                    expected: ATOM_STARTS.to_vec(),
                });
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    text_len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> (String, usize) {
        match self.toks.get(self.pos) {
            Some((t, off)) => (t.describe(), *off),
            None => ("end of input".into(), self.text_len),
        }
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        let (found, offset) = self.here();
        ParseError { offset, found, expected }
    }

    fn eat(&mut self, tok: &Tok, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(vec![expected]))
        }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.imp()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.and()?;
        if self.peek() == Some(&Tok::OrOp) {
            self.pos += 1;
            let rhs = self.or()?;
            Ok(Formula::or(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.peek() == Some(&Tok::AndOp) {
            self.pos += 1;
            let rhs = self.and()?;
            Ok(Formula::and(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Neg) => {
                self.pos += 1;
                Ok(Formula::neg(self.unary()?))
            }
            Some(Tok::DiaKw) => {
                self.pos += 1;
                Ok(Formula::dia(self.unary()?))
            }
            Some(Tok::BoxKw) => {
                self.pos += 1;
                Ok(Formula::nec(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::BotKw) => {
                self.pos += 1;
                Ok(Formula::bot())
            }
            Some(Tok::TopKw) => {
                self.pos += 1;
                Ok(Formula::top())
            }
            Some(Tok::Var(name)) => {
                self.pos += 1;
                Ok(Formula::var(name))
            }
            Some(Tok::LPar) => {
                self.pos += 1;
                let inner = self.imp()?;
                self.eat(&Tok::RPar, "')'")?;
                Ok(inner)
            }
            _ => Err(self.error(ATOM_STARTS.to_vec())),
        }
    }
}

/// Parses the surface syntax into a primitive formula tree.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, text_len: text.len() };
    let f = p.imp()?;
    if p.pos < p.toks.len() {
        return Err(p.error(vec!["'->'", "'&'", "'|'", "end of input"]));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_and_keywords() {
        assert_eq!(parse("bot").unwrap(), Formula::bot());
        assert_eq!(parse("top").unwrap(), Formula::top());
        assert_eq!(parse("p0").unwrap(), Formula::var("p0"));
        assert_eq!(parse("p12").unwrap(), Formula::var("p12"));
        assert_eq!(parse("\"my var\"").unwrap(), Formula::var("my var"));
    }

    #[test]
    fn sugar_desugars_on_parse() {
        assert_eq!(parse("~p0").unwrap(), Formula::neg(Formula::var("p0")));
        assert_eq!(parse("<>p0").unwrap(), Formula::dia(Formula::var("p0")));
        assert_eq!(parse("dia p0").unwrap(), Formula::dia(Formula::var("p0")));
        assert_eq!(parse("[]p0").unwrap(), Formula::nec(Formula::var("p0")));
        assert_eq!(parse("box p0").unwrap(), Formula::nec(Formula::var("p0")));
        assert_eq!(
            parse("p0 & <>p0").unwrap(),
            Formula::and(Formula::var("p0"), Formula::dia(Formula::var("p0")))
        );
        assert_eq!(parse("p0 & <>p0").unwrap(), Formula::sigma(2, "p0"));
    }

    #[test]
    fn precedence_and_associativity() {
        // Prefix > & > | > ->, with -> (and & and |) right-associative.
        assert_eq!(
            parse("p0 -> p1 -> p2").unwrap(),
            Formula::imp(
                Formula::var("p0"),
                Formula::imp(Formula::var("p1"), Formula::var("p2"))
            )
        );
        assert_eq!(
            parse("p0 & p1 | p2 -> p3").unwrap(),
            Formula::imp(
                Formula::or(Formula::and(Formula::var("p0"), Formula::var("p1")), Formula::var("p2")),
                Formula::var("p3")
            )
        );
        assert_eq!(
            parse("~<>p0 & p1").unwrap(),
            Formula::and(Formula::neg(Formula::dia(Formula::var("p0"))), Formula::var("p1"))
        );
        assert_eq!(
            parse("p0 & p1 & p2").unwrap(),
            Formula::and(Formula::var("p0"), Formula::and(Formula::var("p1"), Formula::var("p2")))
        );
        assert_eq!(
            parse("(p0 -> p1) -> p2").unwrap(),
            Formula::imp(
                Formula::imp(Formula::var("p0"), Formula::var("p1")),
                Formula::var("p2")
            )
        );
    }

    #[test]
    fn errors_carry_offset_and_expectations() {
        let e = parse("p0 ->").unwrap_err();
        assert_eq!(e.offset, 5);
        assert_eq!(e.found, "end of input");
        assert!(e.expected.contains(&"variable"));

        let e = parse("p0 p1").unwrap_err();
        assert_eq!(e.offset, 3);
        assert!(e.expected.contains(&"end of input"));

        let e = parse("(p0 -> p1").unwrap_err();
        assert_eq!(e.offset, 9);
        assert_eq!(e.expected, vec!["')'"]);

        let e = parse("q1").unwrap_err();
        assert_eq!(e.offset, 0);
        assert!(e.expected.contains(&"variable"));

        let e = parse("p0 - p1").unwrap_err();
        assert_eq!(e.offset, 3);
        assert_eq!(e.expected, vec!["'->'"]);

        let e = parse("\"oops").unwrap_err();
        assert_eq!(e.offset, 0);
        assert_eq!(e.expected, vec!["closing '\"'"]);

        let e = parse("p0 & ✗").unwrap_err();
        assert_eq!(e.offset, 5);
    }

    #[test]
    fn error_display_mentions_position() {
        let msg = parse("p0 ->").unwrap_err().to_string();
        assert!(msg.contains("byte 5"), "{msg}");
        assert!(msg.contains("end of input"), "{msg}");
    }
}
