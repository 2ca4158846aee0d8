//! Test-side oracles, written independently of the library's internals:
//! a named-variable λ-term reducer, Church numerals, a word oracle for the
//! free monoid, and a closed-form term counter.

#![allow(dead_code)]

use bindsig::signature::AlgebraicSignature;
use bindsig::term::Term;

/// λ-terms with named variables — the cross-check representation.  All
/// operations here (substitution, reduction, α-equality) are deliberately
/// naive and share no code with the de Bruijn implementation.
#[derive(Debug, Clone, PartialEq)]
pub enum Named {
    V(String),
    App(Box<Named>, Box<Named>),
    Lam(String, Box<Named>),
}

impl Named {
    pub fn v(name: &str) -> Named {
        Named::V(name.to_string())
    }

    pub fn app(f: Named, a: Named) -> Named {
        Named::App(Box::new(f), Box::new(a))
    }

    pub fn lam(name: &str, body: Named) -> Named {
        Named::Lam(name.to_string(), Box::new(body))
    }
}

fn free_names(t: &Named, out: &mut Vec<String>) {
    match t {
        Named::V(x) => {
            if !out.contains(x) {
                out.push(x.clone());
            }
        }
        Named::App(f, a) => {
            free_names(f, out);
            free_names(a, out);
        }
        Named::Lam(x, b) => {
            let mut inner = Vec::new();
            free_names(b, &mut inner);
            for n in inner {
                if n != *x && !out.contains(&n) {
                    out.push(n);
                }
            }
        }
    }
}

/// Capture-avoiding substitution `t[x := s]`, renaming binders away from the
/// free names of `s` with a fresh counter.
pub fn named_subst(t: &Named, x: &str, s: &Named, fresh: &mut usize) -> Named {
    match t {
        Named::V(y) if y == x => s.clone(),
        Named::V(_) => t.clone(),
        Named::App(f, a) => Named::app(
            named_subst(f, x, s, fresh),
            named_subst(a, x, s, fresh),
        ),
        Named::Lam(y, _) if y == x => t.clone(),
        Named::Lam(y, b) => {
            let mut avoid = Vec::new();
            free_names(s, &mut avoid);
            if avoid.contains(y) {
                let y2 = loop {
                    let candidate = format!("r{}", *fresh);
                    *fresh += 1;
                    if !avoid.contains(&candidate) {
                        break candidate;
                    }
                };
                let renamed = named_subst(b, y, &Named::v(&y2), fresh);
                Named::lam(&y2, named_subst(&renamed, x, s, fresh))
            } else {
                Named::Lam(y.clone(), Box::new(named_subst(b, x, s, fresh)))
            }
        }
    }
}

/// One leftmost-outermost β step, if any.
fn named_step(t: &Named, fresh: &mut usize) -> Option<Named> {
    match t {
        Named::App(f, a) => {
            if let Named::Lam(x, b) = f.as_ref() {
                return Some(named_subst(b, x, a, fresh));
            }
            if let Some(f2) = named_step(f, fresh) {
                return Some(Named::App(Box::new(f2), a.clone()));
            }
            named_step(a, fresh).map(|a2| Named::App(f.clone(), Box::new(a2)))
        }
        Named::Lam(x, b) => {
            named_step(b, fresh).map(|b2| Named::Lam(x.clone(), Box::new(b2)))
        }
        Named::V(_) => None,
    }
}

/// Normal-order β normalization; `None` when the step budget runs out.
pub fn named_normalize(t: &Named, mut fuel: usize) -> Option<Named> {
    let mut fresh = 0;
    let mut cur = t.clone();
    while let Some(next) = named_step(&cur, &mut fresh) {
        if fuel == 0 {
            return None;
        }
        fuel -= 1;
        cur = next;
    }
    Some(cur)
}

/// α-equality by threading a stack of paired binder names.
pub fn alpha_eq(a: &Named, b: &Named) -> bool {
    fn go(a: &Named, b: &Named, pairs: &mut Vec<(String, String)>) -> bool {
        match (a, b) {
            (Named::V(x), Named::V(y)) => {
                for (px, py) in pairs.iter().rev() {
                    if px == x || py == y {
                        return px == x && py == y;
                    }
                }
                x == y
            }
            (Named::App(f1, a1), Named::App(f2, a2)) => {
                go(f1, f2, pairs) && go(a1, a2, pairs)
            }
            (Named::Lam(x, b1), Named::Lam(y, b2)) => {
                pairs.push((x.clone(), y.clone()));
                let ok = go(b1, b2, pairs);
                pairs.pop();
                ok
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// Reads a de Bruijn λ-term (over `app`/`abs`) into the named representation;
/// `names[0]` is the innermost binding.
pub fn db_to_named(t: &Term, names: &mut Vec<String>, fresh: &mut usize) -> Named {
    match t {
        Term::Var(i) => Named::v(names.get(*i).expect("index in scope")),
        Term::Con(op, args) => match (op.as_str(), args.as_slice()) {
            ("app", [f, a]) => Named::app(
                db_to_named(f, names, fresh),
                db_to_named(a, names, fresh),
            ),
            ("abs", [b]) => {
                let name = format!("n{}", *fresh);
                *fresh += 1;
                names.insert(0, name.clone());
                let body = db_to_named(b, names, fresh);
                names.remove(0);
                Named::lam(&name, body)
            }
            other => panic!("not a λ-term constructor: {other:?}"),
        },
        other => panic!("not a plain λ-term: {other:?}"),
    }
}

fn app2(f: Term, a: Term) -> Term {
    Term::Con("app".into(), vec![f, a])
}

fn abs1(b: Term) -> Term {
    Term::Con("abs".into(), vec![b])
}

/// The Church numeral `λf. λx. f^n x` in de Bruijn form.
pub fn church(n: usize) -> Term {
    let mut body = Term::Var(0);
    for _ in 0..n {
        body = app2(Term::Var(1), body);
    }
    abs1(abs1(body))
}

/// `λm. λn. λf. λx. m f (n f x)`.
pub fn church_plus() -> Term {
    let m = Term::Var(3);
    let n = Term::Var(2);
    let f = Term::Var(1);
    let x = Term::Var(0);
    abs1(abs1(abs1(abs1(app2(
        app2(m, f.clone()),
        app2(app2(n, f), x),
    )))))
}

/// `λm. λn. λf. m (n f)`.
pub fn church_times() -> Term {
    let m = Term::Var(2);
    let n = Term::Var(1);
    let f = Term::Var(0);
    abs1(abs1(abs1(app2(m, app2(n, f)))))
}

/// Flattens a monoid term (binary `m`, constant `e`) to its word of variable
/// indices — the free-monoid oracle.
pub fn flatten(t: &Term) -> Vec<usize> {
    match t {
        Term::Var(i) => vec![*i],
        Term::Con(op, args) => match (op.as_str(), args.as_slice()) {
            ("e", []) => Vec::new(),
            ("m", [a, b]) => {
                let mut out = flatten(a);
                out.extend(flatten(b));
                out
            }
            other => panic!("not a monoid constructor: {other:?}"),
        },
        other => panic!("not a plain monoid term: {other:?}"),
    }
}

/// The right-nested canonical representative of a word: `e` for the empty
/// word, the bare variable for a letter, `m(a, m(b, …))` otherwise.
pub fn word_to_right_nested(word: &[usize]) -> Term {
    match word {
        [] => Term::Con("e".into(), vec![]),
        [i] => Term::Var(*i),
        [i, rest @ ..] => Term::Con(
            "m".into(),
            vec![Term::Var(*i), word_to_right_nested(rest)],
        ),
    }
}

/// Closed-form count of terms of height `<= depth` over `ctx` variables — a
/// plain recursion, independent of the enumerator's iteration scheme.
pub fn count_terms(sig: &AlgebraicSignature, ctx: usize, depth: usize) -> usize {
    if depth == 0 {
        return 0;
    }
    let mut total = ctx;
    for op in sig.ops() {
        let mut prod = 1usize;
        for &a in op.arity.entries() {
            prod *= count_terms(sig, ctx + a, depth - 1);
        }
        total += prod;
    }
    total
}
