//! De Bruijn terms over an algebraic signature: the free monad, with
//! renaming and capture-avoiding simultaneous substitution.
//!
//! Convention: under an arity entry `a`, indices `0..a` are the newly bound
//! variables (innermost binder is 0); ambient indices shift up by `a`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::signature::AlgebraicSignature;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Con(String, Vec<Term>),
    /// Miller-style metavariable: stands for a term whose free variables are
    /// listed (injectively) by `renaming`.  Pattern/template use only.
    Meta { id: String, renaming: Vec<usize> },
    /// Explicit substitution, produced when a metavariable meets a
    /// non-renaming substitution.  Template use only; eliminated eagerly at
    /// instantiation.  `body` lives over context `env.len()`.
    Subst { body: Box<Term>, env: Vec<Term> },
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn con(sig: &AlgebraicSignature, op: &str, args: Vec<Term>) -> Result<Term> {
        let decl = sig
            .op(op)
            .ok_or_else(|| Error::UnknownOp(op.to_string()))?;
        if decl.arity.len() != args.len() {
            return Err(Error::ArityMismatch {
                op: op.to_string(),
                expected: decl.arity.len(),
                got: args.len(),
            });
        }
        Ok(Term::Con(op.to_string(), args))
    }

    pub fn meta(id: &str, renaming: Vec<usize>) -> Term {
        Term::Meta {
            id: id.to_string(),
            renaming,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Con(_, args) => args.iter().all(|a| a.is_ground()),
            Term::Meta { .. } | Term::Subst { .. } => false,
        }
    }

    /// Calls `f` with every free index, offset by the binder depth at which
    /// it occurs: `f(i - depth)` for occurrences `Var(i)` with `i >= depth`.
    pub fn for_each_free(&self, sig: &AlgebraicSignature, f: &mut impl FnMut(usize)) {
        self.for_each_free_at(sig, 0, f)
    }

    fn for_each_free_at(&self, sig: &AlgebraicSignature, depth: usize, f: &mut impl FnMut(usize)) {
        match self {
            Term::Var(i) => {
                if *i >= depth {
                    f(*i - depth)
                }
            }
            Term::Con(op, args) => {
                let arity = sig.arity(op).expect("op in signature");
                for (arg, &a) in args.iter().zip(arity.entries()) {
                    arg.for_each_free_at(sig, depth + a, f);
                }
            }
            Term::Meta { renaming, .. } => {
                for &i in renaming {
                    if i >= depth {
                        f(i - depth)
                    }
                }
            }
            Term::Subst { env, .. } => {
                for t in env {
                    t.for_each_free_at(sig, depth, f);
                }
            }
        }
    }

    pub fn uses_index(&self, sig: &AlgebraicSignature, idx: usize) -> bool {
        let mut found = false;
        self.for_each_free(sig, &mut |i| {
            if i == idx {
                found = true
            }
        });
        found
    }
}

/// Checks well-scopedness in a context of `ctx` free variables (and the
/// arity discipline of every constructor node).
pub fn scope_check(t: &Term, sig: &AlgebraicSignature, ctx: usize) -> Result<()> {
    match t {
        Term::Var(i) => {
            if *i < ctx {
                Ok(())
            } else {
                Err(Error::OutOfScope { index: *i, ctx })
            }
        }
        Term::Con(op, args) => {
            let decl = sig
                .op(op)
                .ok_or_else(|| Error::UnknownOp(op.clone()))?;
            if decl.arity.len() != args.len() {
                return Err(Error::ArityMismatch {
                    op: op.clone(),
                    expected: decl.arity.len(),
                    got: args.len(),
                });
            }
            for (arg, &a) in args.iter().zip(decl.arity.entries()) {
                scope_check(arg, sig, ctx + a)?;
            }
            Ok(())
        }
        Term::Meta { renaming, .. } => {
            let mut seen = std::collections::HashSet::new();
            for &i in renaming {
                if i >= ctx {
                    return Err(Error::OutOfScope { index: i, ctx });
                }
                if !seen.insert(i) {
                    return Err(Error::Shape("metavariable renaming not injective".into()));
                }
            }
            Ok(())
        }
        Term::Subst { body, env } => {
            for e in env {
                scope_check(e, sig, ctx)?;
            }
            scope_check(body, sig, env.len())
        }
    }
}

/// Shifts free indices `>= cutoff` up by `by`.
pub fn shift(t: &Term, sig: &AlgebraicSignature, by: usize, cutoff: usize) -> Term {
    match t {
        Term::Var(i) => Term::Var(if *i >= cutoff { i + by } else { *i }),
        Term::Con(op, args) => {
            let arity = sig.arity(op).expect("op in signature").entries().to_vec();
            Term::Con(
                op.clone(),
                args.iter()
                    .zip(&arity)
                    .map(|(arg, &a)| shift(arg, sig, by, cutoff + a))
                    .collect(),
            )
        }
        Term::Meta { id, renaming } => Term::Meta {
            id: id.clone(),
            renaming: renaming
                .iter()
                .map(|&i| if i >= cutoff { i + by } else { i })
                .collect(),
        },
        Term::Subst { body, env } => Term::Subst {
            body: body.clone(),
            env: env.iter().map(|e| shift(e, sig, by, cutoff)).collect(),
        },
    }
}

/// Renames free indices by the total map `map` (index i ↦ map[i]).  Under a
/// binder of `a` fresh variables the map is lifted: the first `a` indices are
/// fixed, images shift by `a`.
pub fn rename(t: &Term, sig: &AlgebraicSignature, map: &[usize]) -> Result<Term> {
    let lookup = |i: usize| -> Result<usize> {
        map.get(i)
            .copied()
            .ok_or(Error::OutOfScope { index: i, ctx: map.len() })
    };
    match t {
        Term::Var(i) => Ok(Term::Var(lookup(*i)?)),
        Term::Con(op, args) => {
            let arity = sig.arity(op)?.entries().to_vec();
            let mut out = Vec::with_capacity(args.len());
            for (arg, &a) in args.iter().zip(&arity) {
                if a == 0 {
                    out.push(rename(arg, sig, map)?);
                } else {
                    let mut lifted: Vec<usize> = (0..a).collect();
                    lifted.extend(map.iter().map(|&j| j + a));
                    out.push(rename(arg, sig, &lifted)?);
                }
            }
            Ok(Term::Con(op.clone(), out))
        }
        Term::Meta { id, renaming } => Ok(Term::Meta {
            id: id.clone(),
            renaming: renaming
                .iter()
                .map(|&i| lookup(i))
                .collect::<Result<Vec<_>>>()?,
        }),
        Term::Subst { body, env } => Ok(Term::Subst {
            body: body.clone(),
            env: env
                .iter()
                .map(|e| rename(e, sig, map))
                .collect::<Result<Vec<_>>>()?,
        }),
    }
}

/// Capture-avoiding simultaneous substitution: `t` over context `env.len()`,
/// `env[i]` replaces variable `i`.  Under binders the environment is lifted.
pub fn subst(t: &Term, sig: &AlgebraicSignature, env: &[Term]) -> Result<Term> {
    match t {
        Term::Var(i) => env
            .get(*i)
            .cloned()
            .ok_or(Error::OutOfScope { index: *i, ctx: env.len() }),
        Term::Con(op, args) => {
            let arity = sig.arity(op)?.entries().to_vec();
            let mut out = Vec::with_capacity(args.len());
            for (arg, &a) in args.iter().zip(&arity) {
                if a == 0 {
                    out.push(subst(arg, sig, env)?);
                } else {
                    let mut lifted: Vec<Term> = (0..a).map(Term::Var).collect();
                    lifted.extend(env.iter().map(|e| shift(e, sig, a, 0)));
                    out.push(subst(arg, sig, &lifted)?);
                }
            }
            Ok(Term::Con(op.clone(), out))
        }
        Term::Meta { id, renaming } => {
            // A substitution that is a renaming on the metavariable's scope
            // composes into the renaming; anything else becomes explicit.
            let mut new_renaming = Vec::with_capacity(renaming.len());
            let mut ok = true;
            for &i in renaming {
                match env.get(i) {
                    Some(Term::Var(v)) if !new_renaming.contains(v) => new_renaming.push(*v),
                    Some(_) => {
                        ok = false;
                        break;
                    }
                    None => return Err(Error::OutOfScope { index: i, ctx: env.len() }),
                }
            }
            if ok {
                Ok(Term::Meta {
                    id: id.clone(),
                    renaming: new_renaming,
                })
            } else {
                Ok(Term::Subst {
                    body: Box::new(t.clone()),
                    env: env.to_vec(),
                })
            }
        }
        Term::Subst { body, env: inner } => Ok(Term::Subst {
            body: body.clone(),
            env: inner
                .iter()
                .map(|e| subst(e, sig, env))
                .collect::<Result<Vec<_>>>()?,
        }),
    }
}

/// The smallest context a term fits in: max free index + 1.
pub fn needed_ctx(t: &Term, sig: &AlgebraicSignature) -> usize {
    let mut max: Option<usize> = None;
    t.for_each_free(sig, &mut |i| max = Some(max.map_or(i, |m| m.max(i))));
    max.map_or(0, |m| m + 1)
}

/// The identity environment for a context of size `n`.
pub fn identity_env(n: usize) -> Vec<Term> {
    (0..n).map(Term::Var).collect()
}

/// All ground terms of height <= `depth` over `ctx` free variables,
/// deterministically ordered: variables first, then ops in table order with
/// argument tuples in lexicographic order.  The optional `budget` caps the
/// result size at every level; the flag reports truncation.
pub fn enumerate_terms(
    sig: &AlgebraicSignature,
    ctx: usize,
    depth: usize,
    budget: Option<usize>,
) -> (Vec<Term>, bool) {
    let mut memo = HashMap::new();
    let mut truncated = false;
    let terms = enumerate_rec(sig, ctx, depth, budget, &mut memo, &mut truncated);
    (terms, truncated)
}

fn enumerate_rec(
    sig: &AlgebraicSignature,
    ctx: usize,
    depth: usize,
    budget: Option<usize>,
    memo: &mut HashMap<(usize, usize), Vec<Term>>,
    truncated: &mut bool,
) -> Vec<Term> {
    if depth == 0 {
        return Vec::new();
    }
    if let Some(hit) = memo.get(&(ctx, depth)) {
        return hit.clone();
    }
    let cap = budget.unwrap_or(usize::MAX);
    let mut out: Vec<Term> = (0..ctx).map(Term::Var).collect();
    'ops: for op in sig.ops() {
        let arg_lists: Vec<Vec<Term>> = op
            .arity
            .entries()
            .iter()
            .map(|&a| enumerate_rec(sig, ctx + a, depth - 1, budget, memo, truncated))
            .collect();
        if arg_lists.iter().any(|l| l.is_empty()) {
            continue;
        }
        // lexicographic cartesian product, leftmost argument most significant
        let mut idx = vec![0usize; arg_lists.len()];
        loop {
            let args: Vec<Term> = idx
                .iter()
                .zip(&arg_lists)
                .map(|(&i, l)| l[i].clone())
                .collect();
            out.push(Term::Con(op.name.clone(), args));
            if out.len() >= cap {
                *truncated = true;
                break 'ops;
            }
            // advance odometer
            let mut k = idx.len();
            let mut done = true;
            while k > 0 {
                k -= 1;
                idx[k] += 1;
                if idx[k] < arg_lists[k].len() {
                    done = false;
                    break;
                }
                idx[k] = 0;
            }
            if done {
                break;
            }
        }
    }
    out.truncate(cap);
    memo.insert((ctx, depth), out.clone());
    out
}
