//! Seeded random generation of ground terms and substitution environments,
//! for randomized law checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::signature::AlgebraicSignature;
use crate::term::Term;

/// A reproducible generator; the same seed always yields the same stream.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Whether any term of height <= `depth` exists at context `ctx`.
fn inhabited(sig: &AlgebraicSignature, ctx: usize, depth: usize) -> bool {
    if depth == 0 {
        return false;
    }
    if ctx > 0 {
        return true;
    }
    sig.ops().iter().any(|op| {
        op.arity
            .entries()
            .iter()
            .all(|&a| inhabited(sig, ctx + a, depth - 1))
    })
}

/// A uniform-ish random term of height <= `depth` over `ctx` variables, or
/// `None` when no such term exists (e.g. closed terms of a signature with no
/// closed constants at small depth).
pub fn random_term(
    sig: &AlgebraicSignature,
    ctx: usize,
    depth: usize,
    rng: &mut impl Rng,
) -> Option<Term> {
    if depth == 0 {
        return None;
    }
    // candidate ops: those whose every argument slot is inhabited below
    let ops: Vec<usize> = sig
        .ops()
        .iter()
        .enumerate()
        .filter(|(_, op)| {
            op.arity
                .entries()
                .iter()
                .all(|&a| inhabited(sig, ctx + a, depth - 1))
        })
        .map(|(i, _)| i)
        .collect();
    // one choice per variable plus one per viable op; bias towards ops so
    // deep structure actually appears
    let op_weight = 2usize;
    let total = ctx + op_weight * ops.len();
    if total == 0 {
        return None;
    }
    let pick = rng.gen_range(0..total);
    if pick < ctx {
        return Some(Term::Var(pick));
    }
    let op = &sig.ops()[ops[(pick - ctx) / op_weight]];
    let args = op
        .arity
        .entries()
        .iter()
        .map(|&a| random_term(sig, ctx + a, depth - 1, rng))
        .collect::<Option<Vec<_>>>()?;
    Some(Term::Con(op.name.clone(), args))
}

/// A random substitution environment `ctx → ctx` with entries of height <=
/// `depth`.
pub fn random_env(
    sig: &AlgebraicSignature,
    ctx: usize,
    depth: usize,
    rng: &mut impl Rng,
) -> Option<Vec<Term>> {
    (0..ctx)
        .map(|_| random_term(sig, ctx, depth, rng))
        .collect()
}
