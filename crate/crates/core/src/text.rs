//! Textual term syntax with named binders: `op(x y. body, u)`.
//!
//! Free variables are declared implicitly by first use, ordered by first
//! occurrence; that order is the ambient context.  Identifiers may contain
//! dots (qualified names like `left.app`) — a dot is part of an identifier
//! only when the next character could start one, so the binder dot in
//! `x. body` still separates.

use crate::error::{Error, Result};
use crate::signature::AlgebraicSignature;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                tokens.push(Token::LParen);
            }
            ')' => {
                chars.next();
                tokens.push(Token::RParen);
            }
            ',' => {
                chars.next();
                tokens.push(Token::Comma);
            }
            '.' => {
                chars.next();
                tokens.push(Token::Dot);
            }
            c if is_ident_start(c) => {
                let mut name = String::new();
                loop {
                    match chars.peek() {
                        Some(&c) if is_ident_char(c) => {
                            name.push(c);
                            chars.next();
                        }
                        Some('.') => {
                            // qualified-name dot: only if an identifier follows
                            let mut ahead = chars.clone();
                            ahead.next();
                            match ahead.peek() {
                                Some(&c) if is_ident_start(c) => {
                                    name.push('.');
                                    chars.next();
                                }
                                _ => break,
                            }
                        }
                        _ => break,
                    }
                }
                tokens.push(Token::Ident(name));
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    sig: &'a AlgebraicSignature,
    free: Vec<String>,
    bound: Vec<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<Token> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Token) -> Result<()> {
        let got = self.next()?;
        if got == want {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {want:?}, found {got:?}")))
        }
    }

    fn variable(&mut self, name: &str) -> Term {
        // innermost binder first, then the free context below it
        if let Some(rev) = self.bound.iter().rev().position(|b| b == name) {
            return Term::Var(rev);
        }
        let pos = match self.free.iter().position(|f| f == name) {
            Some(pos) => pos,
            None => {
                self.free.push(name.to_string());
                self.free.len() - 1
            }
        };
        Term::Var(self.bound.len() + pos)
    }

    /// One argument slot: optional binder names, then a term.  The names bind
    /// left to right, the last one innermost (index 0).
    fn argument(&mut self, binders: usize) -> Result<Term> {
        let mut names = Vec::new();
        // lookahead: a run of identifiers ending in a dot is a binder list
        let save = self.pos;
        loop {
            match self.peek() {
                Some(Token::Ident(_)) => {
                    if let Token::Ident(name) = self.next()? {
                        names.push(name);
                    }
                }
                Some(Token::Dot) if !names.is_empty() => {
                    self.next()?;
                    break;
                }
                _ => {
                    self.pos = save;
                    names.clear();
                    break;
                }
            }
        }
        if names.len() != binders {
            return Err(Error::Parse(format!(
                "argument binds {} variables, operation expects {binders}",
                names.len()
            )));
        }
        if names.len()
            != names
                .iter()
                .collect::<std::collections::HashSet<_>>()
                .len()
        {
            return Err(Error::Parse("repeated binder name".into()));
        }
        let depth = self.bound.len();
        self.bound.extend(names);
        let body = self.term()?;
        self.bound.truncate(depth);
        Ok(body)
    }

    fn term(&mut self) -> Result<Term> {
        let name = match self.next()? {
            Token::Ident(name) => name,
            other => return Err(Error::Parse(format!("expected a term, found {other:?}"))),
        };
        let is_application = self.peek() == Some(&Token::LParen);
        match self.sig.op(&name) {
            Some(decl) if is_application => {
                let arity = decl.arity.clone();
                self.expect(Token::LParen)?;
                let mut args = Vec::new();
                for (i, &a) in arity.entries().iter().enumerate() {
                    if i > 0 {
                        self.expect(Token::Comma)?;
                    }
                    args.push(self.argument(a)?);
                }
                self.expect(Token::RParen)?;
                Ok(Term::Con(name, args))
            }
            Some(decl) => {
                if !decl.arity.is_empty() {
                    return Err(Error::Parse(format!(
                        "operation `{name}` takes arguments"
                    )));
                }
                Ok(Term::Con(name, vec![]))
            }
            None if is_application => Err(Error::UnknownOp(name)),
            None => Ok(self.variable(&name)),
        }
    }
}

/// Parses a term, threading an existing free-variable context (extended in
/// place by first use).  Returns the term over context `free.len()`.
pub fn parse_with_context(
    input: &str,
    sig: &AlgebraicSignature,
    free: &mut Vec<String>,
) -> Result<Term> {
    let mut parser = Parser {
        tokens: tokenize(input)?,
        pos: 0,
        sig,
        free: std::mem::take(free),
        bound: Vec::new(),
    };
    let term = parser.term()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!(
            "trailing input after term: {:?}",
            &parser.tokens[parser.pos..]
        )));
    }
    *free = parser.free;
    Ok(term)
}

/// Parses a standalone term; the returned names are the implicit context.
pub fn parse(input: &str, sig: &AlgebraicSignature) -> Result<(Term, Vec<String>)> {
    let mut free = Vec::new();
    let term = parse_with_context(input, sig, &mut free)?;
    Ok((term, free))
}

struct Printer<'a> {
    sig: &'a AlgebraicSignature,
    used: std::collections::HashSet<String>,
    counter: usize,
}

impl<'a> Printer<'a> {
    fn fresh(&mut self) -> String {
        loop {
            let name = format!("x{}", self.counter);
            self.counter += 1;
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }

    fn go(&mut self, t: &Term, env: &[String], out: &mut String) {
        match t {
            Term::Var(i) => out.push_str(
                env.get(*i)
                    .map(String::as_str)
                    .unwrap_or("<out-of-scope>"),
            ),
            Term::Con(op, args) => {
                out.push_str(op);
                if args.is_empty() {
                    return;
                }
                out.push('(');
                let arity = self
                    .sig
                    .arity(op)
                    .expect("op in signature")
                    .entries()
                    .to_vec();
                for (i, (arg, &a)) in args.iter().zip(&arity).enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let names: Vec<String> = (0..a).map(|_| self.fresh()).collect();
                    for name in &names {
                        out.push_str(name);
                        out.push(' ');
                    }
                    if a > 0 {
                        // replace the trailing space with the binder dot
                        out.pop();
                        out.push_str(". ");
                    }
                    // last-listed binder is innermost (index 0)
                    let mut inner: Vec<String> = names.iter().rev().cloned().collect();
                    inner.extend(env.iter().cloned());
                    self.go(arg, &inner, out);
                }
                out.push(')');
            }
            Term::Meta { id, renaming } => {
                out.push('?');
                out.push_str(id);
                out.push('[');
                for (i, &r) in renaming.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(env.get(r).map(String::as_str).unwrap_or("<out-of-scope>"));
                }
                out.push(']');
            }
            Term::Subst { body, env: bindings } => {
                let names: Vec<String> = (0..bindings.len()).map(|_| self.fresh()).collect();
                self.go(body, &names, out);
                out.push('[');
                for (i, (name, b)) in names.iter().zip(bindings).enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(name);
                    out.push_str(" := ");
                    self.go(b, env, out);
                }
                out.push(']');
            }
        }
    }
}

/// Prints a term with the given free-variable names; binder names are
/// generated fresh (`x0`, `x1`, …) avoiding the free names and op names.
pub fn print(t: &Term, sig: &AlgebraicSignature, free: &[String]) -> String {
    let mut used: std::collections::HashSet<String> =
        free.iter().cloned().collect();
    used.extend(sig.ops().iter().map(|o| o.name.clone()));
    let mut printer = Printer {
        sig,
        used,
        counter: 0,
    };
    let mut out = String::new();
    printer.go(t, &free.to_vec(), &mut out);
    out
}

/// Default context names for a context known only by size.
pub fn default_names(ctx: usize) -> Vec<String> {
    (0..ctx).map(|i| format!("v{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lc() -> AlgebraicSignature {
        AlgebraicSignature::new(vec![("app", [0, 0].into()), ("abs", [1].into())]).unwrap()
    }

    fn monoid() -> AlgebraicSignature {
        AlgebraicSignature::new(vec![("m", [0, 0].into()), ("e", [].into())]).unwrap()
    }

    #[test]
    fn parses_binders_and_free_vars() {
        let (t, free) = parse("app(abs(x. x), y)", &lc()).unwrap();
        assert_eq!(free, vec!["y"]);
        assert_eq!(
            t,
            Term::Con(
                "app".into(),
                vec![
                    Term::Con("abs".into(), vec![Term::Var(0)]),
                    Term::Var(0),
                ]
            )
        );
    }

    #[test]
    fn free_variables_ordered_by_first_use() {
        let (t, free) = parse("app(b, app(a, b))", &lc()).unwrap();
        assert_eq!(free, vec!["b", "a"]);
        assert_eq!(
            t,
            Term::Con(
                "app".into(),
                vec![
                    Term::Var(0),
                    Term::Con("app".into(), vec![Term::Var(1), Term::Var(0)]),
                ]
            )
        );
    }

    #[test]
    fn constants_need_no_parens() {
        let (t, free) = parse("m(e, a)", &monoid()).unwrap();
        assert_eq!(free, vec!["a"]);
        assert_eq!(
            t,
            Term::Con(
                "m".into(),
                vec![Term::Con("e".into(), vec![]), Term::Var(0)]
            )
        );
    }

    #[test]
    fn shadowing_resolves_to_innermost() {
        // abs(x. abs(x. x)): inner x is index 0 of the inner binder
        let (t, free) = parse("abs(x. abs(x. x))", &lc()).unwrap();
        assert!(free.is_empty());
        assert_eq!(
            t,
            Term::Con(
                "abs".into(),
                vec![Term::Con("abs".into(), vec![Term::Var(0)])]
            )
        );
    }

    #[test]
    fn multi_binder_last_name_is_innermost() {
        let sig = AlgebraicSignature::new(vec![("pair", [2].into())]).unwrap();
        let (t, _) = parse("pair(x y. x)", &sig).unwrap();
        assert_eq!(t, Term::Con("pair".into(), vec![Term::Var(1)]));
        let (t, _) = parse("pair(x y. y)", &sig).unwrap();
        assert_eq!(t, Term::Con("pair".into(), vec![Term::Var(0)]));
    }

    #[test]
    fn qualified_names_parse_but_binder_dot_separates() {
        let sig = AlgebraicSignature::new(vec![
            ("left.app", [0, 0].into()),
            ("left.abs", [1].into()),
        ])
        .unwrap();
        let (t, free) = parse("left.app(left.abs(x. x), y)", &sig).unwrap();
        assert_eq!(free, vec!["y"]);
        assert_eq!(
            t,
            Term::Con(
                "left.app".into(),
                vec![
                    Term::Con("left.abs".into(), vec![Term::Var(0)]),
                    Term::Var(0),
                ]
            )
        );
    }

    #[test]
    fn shared_context_across_two_parses() {
        let sig = lc();
        let mut free = Vec::new();
        let a = parse_with_context("app(f, g)", &sig, &mut free).unwrap();
        let b = parse_with_context("app(g, f)", &sig, &mut free).unwrap();
        assert_eq!(free, vec!["f", "g"]);
        assert_eq!(a, Term::Con("app".into(), vec![Term::Var(0), Term::Var(1)]));
        assert_eq!(b, Term::Con("app".into(), vec![Term::Var(1), Term::Var(0)]));
    }

    #[test]
    fn print_parse_round_trip() {
        let sig = lc();
        let (terms, _) = crate::term::enumerate_terms(&sig, 2, 3, Some(300));
        let free = default_names(2);
        for t in &terms {
            let s = print(t, &sig, &free);
            let mut names = free.clone();
            let back = parse_with_context(&s, &sig, &mut names)
                .unwrap_or_else(|e| panic!("failed to reparse `{s}`: {e}"));
            assert_eq!(&back, t, "round trip through `{s}`");
            assert_eq!(names, free);
        }
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(parse("app(x)", &lc()).is_err()); // arity mismatch
        assert!(parse("abs(x. x", &lc()).is_err()); // unclosed
        assert!(parse("nope(x)", &lc()).is_err()); // unknown op applied
        assert!(parse("abs(x x. x)", &lc()).is_err()); // too many binders
        assert!(parse("e(x)", &monoid()).is_err()); // constant applied
        assert!(parse("m(a, b) c", &monoid()).is_err()); // trailing input
    }
}
