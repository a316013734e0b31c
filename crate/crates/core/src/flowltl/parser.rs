//! Flow-LTL concrete syntax.
//!
//! Precedence from tight to loose: unary operators (`!`, `X`, `F`, `G`, `A`),
//! `U` (left), `&&`, `||`, `->` (right). The single letters `X F G U A` and
//! `true`/`false` are reserved.

use thiserror::Error;

use super::formula::{FlowSubformula, Ltl, RunAtom, RunFormula};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("column {column}: flow quantifier A nested inside another A")]
    NestedFlowQuantifier { column: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Finally,
    Globally,
    Until,
    Flow,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let col = |i: usize| text[..i].chars().count() + 1;
    let mut i = 0;
    while i < chars.len() {
        let (at, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two = |s: &str| text[at..].starts_with(s);
        let tok = if c == '(' {
            i += 1;
            Tok::LParen
        } else if c == ')' {
            i += 1;
            Tok::RParen
        } else if c == '!' {
            i += 1;
            Tok::Not
        } else if two("&&") {
            i += 2;
            Tok::And
        } else if two("||") {
            i += 2;
            Tok::Or
        } else if two("->") {
            i += 2;
            Tok::Implies
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let end = chars.get(i).map_or(text.len(), |&(b, _)| b);
            match &text[at..end] {
                "true" => Tok::True,
                "false" => Tok::False,
                "X" => Tok::Next,
                "F" => Tok::Finally,
                "G" => Tok::Globally,
                "U" => Tok::Until,
                "A" => Tok::Flow,
                w => Tok::Ident(w.to_string()),
            }
        } else {
            return Err(FormulaError::Syntax {
                column: col(at),
                message: format!("unexpected character `{c}`"),
            });
        };
        out.push((tok, col(at)));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_column: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_column, |&(_, c)| c)
    }

    fn error(&self, message: impl Into<String>) -> FormulaError {
        FormulaError::Syntax {
            column: self.column(),
            message: message.into(),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<RunFormula, FormulaError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            Ok(Ltl::implies(lhs, self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<RunFormula, FormulaError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            lhs = Ltl::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<RunFormula, FormulaError> {
        let mut lhs = self.until()?;
        while self.eat(&Tok::And) {
            lhs = Ltl::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<RunFormula, FormulaError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Until) {
            lhs = Ltl::until(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<RunFormula, FormulaError> {
        let column = self.column();
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Ltl::not(self.unary()?))
            }
            Some(Tok::Next) => {
                self.pos += 1;
                Ok(Ltl::next(self.unary()?))
            }
            Some(Tok::Finally) => {
                self.pos += 1;
                Ok(Ltl::finally(self.unary()?))
            }
            Some(Tok::Globally) => {
                self.pos += 1;
                Ok(Ltl::globally(self.unary()?))
            }
            Some(Tok::Flow) => {
                self.pos += 1;
                let body = self.unary()?;
                let body = body.try_substitute(&mut |a| match a {
                    RunAtom::Name(n) => Ok(Ltl::Atom(n.clone())),
                    RunAtom::Flow(_) => Err(FormulaError::NestedFlowQuantifier { column }),
                })?;
                Ok(Ltl::Atom(RunAtom::Flow(FlowSubformula { body })))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<RunFormula, FormulaError> {
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Ltl::True)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Ltl::False)
            }
            Some(Tok::Ident(n)) => {
                self.pos += 1;
                Ok(Ltl::Atom(RunAtom::Name(n)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.implication()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error("expected `)`"));
                }
                Ok(f)
            }
            Some(_) => Err(self.error("expected formula")),
            None => Err(self.error("unexpected end of formula")),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<RunFormula, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_column: text.chars().count() + 1,
    };
    let f = p.implication()?;
    if p.pos < p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name(n: &str) -> RunFormula {
        Ltl::Atom(RunAtom::Name(n.into()))
    }

    fn flow(body: Ltl<String>) -> RunFormula {
        Ltl::Atom(RunAtom::Flow(FlowSubformula { body }))
    }

    #[test]
    fn flow_subformula() {
        let f = parse_formula("A F s5").unwrap();
        assert_eq!(f, flow(Ltl::finally(Ltl::Atom("s5".into()))));
    }

    #[test]
    fn guarded_flow() {
        let f = parse_formula("G u0 -> A F s2").unwrap();
        assert_eq!(
            f,
            Ltl::implies(
                Ltl::globally(name("u0")),
                flow(Ltl::finally(Ltl::Atom("s2".into())))
            )
        );
    }

    #[test]
    fn nested_flow_rejected() {
        assert_eq!(
            parse_formula("A (A F p)"),
            Err(FormulaError::NestedFlowQuantifier { column: 1 })
        );
    }

    #[test]
    fn precedence() {
        let f = parse_formula("a U b U c && d || e -> f -> g").unwrap();
        let ab = Ltl::until(name("a"), name("b"));
        let abc = Ltl::until(ab, name("c"));
        let and = Ltl::and(abc, name("d"));
        let or = Ltl::or(and, name("e"));
        assert_eq!(f, Ltl::implies(or, Ltl::implies(name("f"), name("g"))));
        let g = parse_formula("F a U !b").unwrap();
        assert_eq!(g, Ltl::until(Ltl::finally(name("a")), Ltl::not(name("b"))));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse_formula("a &&"), Err(FormulaError::Syntax { column: 5, .. })));
        assert!(matches!(parse_formula("(a"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse_formula("a $ b"), Err(FormulaError::Syntax { column: 3, .. })));
        assert!(matches!(parse_formula("a b"), Err(FormulaError::Syntax { column: 3, .. })));
    }

    #[test]
    fn display_reparses() {
        for s in [
            "A F s5",
            "G u0 -> A F s2",
            "(a -> b) -> c",
            "a U (b U c)",
            "!(a && b) || X (c U d)",
            "A (a U b) && G F c",
        ] {
            let f = parse_formula(s).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "{s} -> {f}");
        }
        assert_eq!(parse_formula("(a -> b) -> c").unwrap().to_string(), "(a -> b) -> c");
    }
}
