//! Recursive-descent parser for propositional formulas.
//!
//! ```text
//! implies := disj ( "=>" implies )?
//! disj    := conj ( ("or" | "|") conj )*
//! conj    := unary ( ("and" | "&") unary )*
//! unary   := ("not" | "!") unary | primary
//! primary := IDENT | "(" implies ")"
//! ```

use std::fmt;

use thiserror::Error;

use super::Formula;

/// Syntax error. `position` is a 0-based character offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub position: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at position {}: expected {}, found {}",
            self.position,
            self.expected.join(" | "),
            self.found
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Not => "`not`".into(),
            Tok::And => "`and`".into(),
            Tok::Or => "`or`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

const OPERAND: &[&str] = &["identifier", "`not`", "`(`"];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '!' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '=' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Implies
            }
            c if c.is_alphabetic() || c == '_' => {
                while i + 1 < chars.len() && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '_')
                {
                    i += 1;
                }
                let word: String = chars[start..=i].iter().collect();
                match word.as_str() {
                    "not" => Tok::Not,
                    "and" => Tok::And,
                    "or" => Tok::Or,
                    _ => Tok::Ident(word),
                }
            }
            other => {
                return Err(ParseError {
                    position: start,
                    found: format!("character `{other}`"),
                    expected: vec!["identifier", "operator", "`(`", "`)`"],
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        let (position, tok) = &self.toks[self.pos];
        ParseError {
            position: *position,
            found: tok.describe(),
            expected: expected.to_vec(),
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conj()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.implies()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`)`", "`and`", "`or`", "`=>`"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(OPERAND)),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.implies()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["`and`", "`or`", "`=>`", "end of input"]));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula as F;

    fn atom(s: &str) -> F {
        F::atom(s)
    }

    #[test]
    fn examples() {
        assert_eq!(parse("A and B").unwrap(), F::and(atom("A"), atom("B")));
        assert_eq!(
            parse("(x3 => x2) => x1").unwrap(),
            F::implies(F::implies(atom("x3"), atom("x2")), atom("x1"))
        );
        assert_eq!(
            parse("A or not A").unwrap(),
            F::or(atom("A"), F::not(atom("A")))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("!a & b | c => d").unwrap(),
            F::implies(
                F::or(F::and(F::not(atom("a")), atom("b")), atom("c")),
                atom("d")
            )
        );
        assert_eq!(
            parse("a => b => c").unwrap(),
            F::implies(atom("a"), F::implies(atom("b"), atom("c")))
        );
        assert_eq!(
            parse("a or b or c").unwrap(),
            F::or(F::or(atom("a"), atom("b")), atom("c"))
        );
        assert_eq!(parse("not not a").unwrap(), F::not(F::not(atom("a"))));
        assert_eq!(parse("  ((a))  ").unwrap(), atom("a"));
        assert_eq!(parse("nota").unwrap(), atom("nota"));
    }

    #[test]
    fn error_positions() {
        let e = parse("A and").unwrap_err();
        assert_eq!(e.position, 5);
        assert_eq!(e.found, "end of input");
        assert!(e.expected.contains(&"identifier"));

        let e = parse("(A or B").unwrap_err();
        assert_eq!(e.position, 7);
        assert!(e.expected.contains(&"`)`"));

        let e = parse("A B").unwrap_err();
        assert_eq!(e.position, 2);
        assert_eq!(e.found, "identifier `B`");

        let e = parse("A = B").unwrap_err();
        assert_eq!(e.position, 2);

        let e = parse("").unwrap_err();
        assert_eq!(e.position, 0);

        let e = parse("é and ?").unwrap_err();
        assert_eq!(e.position, 6);
        assert!(e.to_string().contains("position 6"));
    }
}
