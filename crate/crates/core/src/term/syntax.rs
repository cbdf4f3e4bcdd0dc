//! Concrete syntax.
//!
//! ```text
//! term := lam | app
//! lam  := ("λ" | "\") (ident ".")? term
//! app  := atom+
//! atom := numeral | ident | "(" term ")"
//! ```
//!
//! De Bruijn notation uses numerals and anonymous binders; named notation
//! uses identifiers and `\x.` binders. The caller picks one and the other
//! form is rejected.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Notation {
    DeBruijn,
    Named,
}

impl FromStr for Notation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "debruijn" | "de-bruijn" | "db" => Ok(Notation::DeBruijn),
            "named" => Ok(Notation::Named),
            other => Err(format!("unknown notation `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unbound name `{name}` at position {pos}")]
    Unbound { name: String, pos: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::Unbound { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Lambda,
    Dot,
    Open,
    Close,
    Num(usize),
    Ident(String),
}

fn is_ident_start(c: char) -> bool {
    c != 'λ' && (c.is_alphabetic() || c == '_')
}

fn is_ident_continue(c: char) -> bool {
    c != 'λ' && (c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Splits `text` into tokens paired with their character offsets.
fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            'λ' | '\\' => Token::Lambda,
            '.' => Token::Dot,
            '(' => Token::Open,
            ')' => Token::Close,
            c if c.is_ascii_digit() => {
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..=i].iter().collect();
                let n = digits.parse().map_err(|_| ParseError::Syntax {
                    pos: start,
                    message: format!("index `{digits}` is too large"),
                })?;
                Token::Num(n)
            }
            c if is_ident_start(c) => {
                while i + 1 < chars.len() && is_ident_continue(chars[i + 1]) {
                    i += 1;
                }
                Token::Ident(chars[start..=i].iter().collect())
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        tokens.push((start, tok));
        i += 1;
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    at: usize,
    end: usize,
    notation: Notation,
    scope: Vec<&'a str>,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if self.peek() == Some(&Token::Lambda) {
            self.lam()
        } else {
            self.app()
        }
    }

    fn lam(&mut self) -> Result<Term, ParseError> {
        self.at += 1;
        let bound = match (self.notation, self.peek()) {
            (Notation::Named, Some(Token::Ident(_))) => {
                let idx = self.at;
                self.at += 1;
                self.expect(Token::Dot, "`.` after binder")?;
                Some(idx)
            }
            (Notation::Named, _) => return self.error("expected a binder name"),
            (Notation::DeBruijn, Some(Token::Ident(_))) => {
                return self.error("binder names are not allowed in de Bruijn notation")
            }
            (Notation::DeBruijn, _) => None,
        };
        let body = match bound {
            Some(idx) => {
                let name = self.names[idx].as_str();
                self.scope.push(name);
                let body = self.term();
                self.scope.pop();
                body?
            }
            None => self.term()?,
        };
        Ok(Term::lam(body))
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.atom()?;
        while matches!(
            self.peek(),
            Some(Token::Num(_) | Token::Ident(_) | Token::Open)
        ) {
            let arg = self.atom()?;
            acc = Term::app(acc, arg);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Token::Num(n)) => {
                if self.notation == Notation::Named {
                    return self.error("numeric indices are not allowed in named notation");
                }
                self.at += 1;
                Ok(Term::var(n))
            }
            Some(Token::Ident(name)) => {
                if self.notation == Notation::DeBruijn {
                    return self.error("names are not allowed in de Bruijn notation");
                }
                self.at += 1;
                match self.scope.iter().rev().position(|s| *s == name) {
                    Some(index) => Ok(Term::var(index)),
                    None => Err(ParseError::Unbound { name, pos }),
                }
            }
            Some(Token::Open) => {
                self.at += 1;
                let t = self.term()?;
                self.expect(Token::Close, "`)`")?;
                Ok(t)
            }
            Some(Token::Lambda) => {
                self.error("an abstraction in argument position must be parenthesized")
            }
            Some(_) => self.error("expected a term"),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses `text` in the given notation.
pub fn parse(text: &str, notation: Notation) -> Result<Term, ParseError> {
    let tokens = tokenize(text)?;
    let names: Vec<String> = tokens
        .iter()
        .map(|(_, t)| match t {
            Token::Ident(s) => s.clone(),
            _ => String::new(),
        })
        .collect();
    let mut p = Parser {
        tokens,
        at: 0,
        end: text.chars().count(),
        notation,
        scope: Vec::new(),
        names: &names,
    };
    let t = p.term()?;
    if p.at != p.tokens.len() {
        return p.error("unexpected trailing input");
    }
    Ok(t)
}

/// One layer of a printable tree. `Hole` is only produced by partial terms.
pub(crate) enum Shape<'a, T: ?Sized> {
    Var(usize),
    App(&'a T, &'a T),
    Lam(&'a T),
    Hole,
}

pub(crate) trait Syntax {
    fn shape(&self) -> Shape<'_, Self>;
}

impl Syntax for Term {
    fn shape(&self) -> Shape<'_, Term> {
        match self {
            Term::Var(n) => Shape::Var(*n),
            Term::App(f, a) => Shape::App(f, a),
            Term::Lam(b) => Shape::Lam(b),
        }
    }
}

const BASE_NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

/// Binder name for binder depth `depth`; distinct along any path from the root.
fn binder_name(depth: usize) -> String {
    let base = BASE_NAMES[depth % BASE_NAMES.len()];
    match depth / BASE_NAMES.len() {
        0 => base.to_string(),
        k => format!("{base}{k}"),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Position {
    Top,
    Fun,
    Arg,
}

fn write_syntax<S: Syntax + ?Sized>(
    t: &S,
    notation: Notation,
    depth: usize,
    pos: Position,
    out: &mut String,
) {
    match t.shape() {
        Shape::Hole => out.push('□'),
        Shape::Var(n) => match notation {
            Notation::DeBruijn => {
                let _ = write!(out, "{n}");
            }
            Notation::Named if n < depth => out.push_str(&binder_name(depth - 1 - n)),
            // Free variables have no binder; give them a name no binder uses.
            Notation::Named => {
                let _ = write!(out, "free{}", n - depth);
            }
        },
        Shape::Lam(body) => {
            let paren = pos != Position::Top;
            if paren {
                out.push('(');
            }
            match notation {
                Notation::DeBruijn => out.push_str("λ "),
                Notation::Named => {
                    let _ = write!(out, "λ{}. ", binder_name(depth));
                }
            }
            write_syntax(body, notation, depth + 1, Position::Top, out);
            if paren {
                out.push(')');
            }
        }
        Shape::App(f, a) => {
            let paren = pos == Position::Arg;
            if paren {
                out.push('(');
            }
            write_syntax(f, notation, depth, Position::Fun, out);
            out.push(' ');
            write_syntax(a, notation, depth, Position::Arg, out);
            if paren {
                out.push(')');
            }
        }
    }
}

pub(crate) fn print_syntax<S: Syntax + ?Sized>(t: &S, notation: Notation) -> String {
    let mut out = String::new();
    write_syntax(t, notation, 0, Position::Top, &mut out);
    out
}

/// Renders `t`; `parse(&print(t, n), n) == Ok(t)` for closed terms in both
/// notations and for every term in de Bruijn notation.
pub fn print(t: &Term, notation: Notation) -> String {
    print_syntax(t, notation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::tests::arb_term;
    use proptest::prelude::*;

    fn v(n: usize) -> Term {
        Term::var(n)
    }

    #[test]
    fn parse_examples() {
        let self_app = Term::lam(Term::app(v(0), v(0)));
        assert_eq!(parse("λ 0 0", Notation::DeBruijn), Ok(self_app.clone()));
        assert_eq!(parse(r"\x. x x", Notation::Named), Ok(self_app.clone()));
        assert_eq!(parse("λx.x x", Notation::Named), Ok(self_app));
        assert_eq!(
            parse(r"\x. y", Notation::Named),
            Err(ParseError::Unbound {
                name: "y".into(),
                pos: 4
            })
        );
    }

    #[test]
    fn parse_shadowing_and_nesting() {
        let t = parse(r"\x. \x. x", Notation::Named).unwrap();
        assert_eq!(t, Term::lam(Term::lam(v(0))));
        let t = parse(r"\f. \x. f (f x)", Notation::Named).unwrap();
        assert_eq!(t, crate::term::church(2));
        let t = parse("λ (λ λ 1) (λ 0) (λ ((λ 0 0)(λ 0 0)))", Notation::DeBruijn).unwrap();
        assert_eq!(t.size(), 18);
    }

    #[test]
    fn parse_rejects_mixed_and_malformed_input() {
        assert!(parse(r"\x. 0", Notation::Named).is_err());
        assert!(parse("λ x", Notation::DeBruijn).is_err());
        assert!(parse(r"\x. x", Notation::DeBruijn).is_err());
        assert!(parse("(0 0", Notation::DeBruijn).is_err());
        assert!(parse("0 0)", Notation::DeBruijn).is_err());
        assert!(parse("", Notation::DeBruijn).is_err());
        assert!(parse("0 λ 0", Notation::DeBruijn).is_err());
        assert!(parse("0 # 1", Notation::DeBruijn).is_err());
        let err = parse("(0 0", Notation::DeBruijn).unwrap_err();
        assert_eq!(err.position(), 4);
    }

    #[test]
    fn print_examples() {
        let self_app = Term::lam(Term::app(v(0), v(0)));
        assert_eq!(print(&self_app, Notation::DeBruijn), "λ 0 0");
        let ii = Term::app(Term::lam(v(0)), Term::lam(v(0)));
        assert_eq!(print(&ii, Notation::DeBruijn), "(λ 0) (λ 0)");
        assert_eq!(print(&v(2), Notation::DeBruijn), "2");
        assert_eq!(print(&self_app, Notation::Named), "λx. x x");
        let nested = Term::app(v(0), Term::app(v(1), v(2)));
        assert_eq!(print(&nested, Notation::DeBruijn), "0 (1 2)");
        assert_eq!(print(&crate::term::church(2), Notation::Named), "λx. λy. x (x y)");
    }

    proptest! {
        #[test]
        fn debruijn_round_trip(t in arb_term()) {
            prop_assert_eq!(parse(&print(&t, Notation::DeBruijn), Notation::DeBruijn), Ok(t));
        }

        #[test]
        fn named_round_trip(t in arb_term()) {
            // Close the term first; named notation has no free variables.
            let closed = (0..crate::term::open_count(&t)).fold(t, |acc, _| Term::lam(acc));
            let text = print(&closed, Notation::Named);
            prop_assert_eq!(parse(&text, Notation::Named), Ok(closed));
        }
    }
}
