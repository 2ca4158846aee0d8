//! The Σ-module / Σ-module-morphism DSL with a typed evaluator.
//!
//! A [`MorphismExpr`] denotes, at any model and any context, a function
//! between module values.  Composition order: `Comp(f, g)` means "g then f".

use crate::error::{Error, Result};
use crate::model::{EqVerdict, ModelHooks};
use crate::signature::{AlgebraicSignature, BindingArity};
use crate::term::{enumerate_terms, Term};
use std::collections::HashMap;

/// Module expressions: the tautological module Θ, derivation, finite
/// products, and the signature module itself.  `Θ^(a₁,…,aₙ)` is expressed as
/// `Prod([Derivᵃ¹(Theta), …])`; the unit module is the empty product.
#[derive(Debug, Clone, PartialEq)]
pub enum ModuleExpr {
    Theta,
    Deriv(Box<ModuleExpr>),
    Prod(Vec<ModuleExpr>),
    Sig(AlgebraicSignature),
}

impl ModuleExpr {
    pub fn unit() -> Self {
        ModuleExpr::Prod(vec![])
    }

    pub fn deriv(m: ModuleExpr) -> Self {
        ModuleExpr::Deriv(Box::new(m))
    }

    /// Θ′…′ with `n` derivations.
    pub fn theta_deriv(n: usize) -> Self {
        let mut m = ModuleExpr::Theta;
        for _ in 0..n {
            m = ModuleExpr::deriv(m);
        }
        m
    }

    /// Θ^(a) as a product of iterated derivatives.
    pub fn theta_pow(arity: &BindingArity) -> Self {
        ModuleExpr::Prod(
            arity
                .entries()
                .iter()
                .map(|&a| ModuleExpr::theta_deriv(a))
                .collect(),
        )
    }

    /// Number of derivations if this is `Derivⁿ(Theta)`.
    pub fn as_theta_derivs(&self) -> Option<usize> {
        match self {
            ModuleExpr::Theta => Some(0),
            ModuleExpr::Deriv(m) => m.as_theta_derivs().map(|n| n + 1),
            _ => None,
        }
    }

    /// Decomposes an algebraic module expression into the binder depths of
    /// its Θ-components: Θ ↦ [0], Θ′ ↦ [1], Prod flattens componentwise.
    pub fn algebraic_components(&self) -> Option<Vec<usize>> {
        if let Some(n) = self.as_theta_derivs() {
            return Some(vec![n]);
        }
        match self {
            ModuleExpr::Prod(ms) => {
                let mut out = Vec::new();
                for m in ms {
                    out.extend(m.algebraic_components()?);
                }
                Some(out)
            }
            _ => None,
        }
    }
}

/// Morphism expressions between module expressions.
#[derive(Debug, Clone, PartialEq)]
pub enum MorphismExpr {
    Id(ModuleExpr),
    /// `Comp(f, g)`: first `g`, then `f`.
    Comp(Box<MorphismExpr>, Box<MorphismExpr>),
    /// The tautological morphism `Σ → Θ`, the model's action.
    Tau(AlgebraicSignature),
    /// Summand injection `Θ^(arity op) → Σ`.
    OpInj { sig: AlgebraicSignature, op: String },
    Proj(usize),
    Tuple(Vec<MorphismExpr>),
    /// Case analysis out of a signature module: one arm per operation.
    Case {
        sig: AlgebraicSignature,
        arms: Vec<MorphismExpr>,
    },
    /// `f′`: apply `f` one context deeper.
    DerivM(Box<MorphismExpr>),
    /// `M×Θ → N` becomes `M → N′`.
    Curry(Box<MorphismExpr>),
    /// `M → N′` becomes `M×Θ → N`.
    Uncurry(Box<MorphismExpr>),
    /// The context inclusion `M → M′` (renaming, never substitution).
    Weaken(ModuleExpr),
    /// One-variable substitution `Θ′×Θ → Θ`, i.e. `(t, u) ↦ t[*≔u]`.
    SigmaSubst,
}

impl MorphismExpr {
    pub fn comp(f: MorphismExpr, g: MorphismExpr) -> Self {
        MorphismExpr::Comp(Box::new(f), Box::new(g))
    }

    pub fn curry(f: MorphismExpr) -> Self {
        MorphismExpr::Curry(Box::new(f))
    }

    pub fn uncurry(f: MorphismExpr) -> Self {
        MorphismExpr::Uncurry(Box::new(f))
    }

    /// `τ ∘ inj_op : Θ^(arity op) → Θ`, the operation as a morphism.
    pub fn op_ref(sig: AlgebraicSignature, op: &str) -> Self {
        MorphismExpr::comp(
            MorphismExpr::Tau(sig.clone()),
            MorphismExpr::OpInj {
                sig,
                op: op.to_string(),
            },
        )
    }

    /// Inverse of [`MorphismExpr::op_ref`]: the op name, if this expression
    /// is a plain op reference.
    pub fn as_op_ref(&self) -> Option<&str> {
        match self {
            MorphismExpr::Comp(f, g) => match (f.as_ref(), g.as_ref()) {
                (MorphismExpr::Tau(_), MorphismExpr::OpInj { op, .. }) => Some(op),
                _ => None,
            },
            _ => None,
        }
    }

    /// `op(f₁, …, fₙ)` as a morphism: each `fᵢ : S → Θ^(aᵢ)`.
    pub fn op_apply(sig: &AlgebraicSignature, op: &str, args: Vec<MorphismExpr>) -> Self {
        MorphismExpr::comp(
            MorphismExpr::op_ref(sig.clone(), op),
            MorphismExpr::Tuple(args),
        )
    }

    /// Renames operation references throughout, for transport along a
    /// coproduct injection.
    pub fn rename_ops(&self, map: &HashMap<String, String>) -> Result<MorphismExpr> {
        let rn = |name: &str| -> String {
            map.get(name).cloned().unwrap_or_else(|| name.to_string())
        };
        let rn_sig = |sig: &AlgebraicSignature| -> Result<AlgebraicSignature> {
            AlgebraicSignature::new(
                sig.ops()
                    .iter()
                    .map(|o| (rn(&o.name), o.arity.clone()))
                    .collect(),
            )
        };
        Ok(match self {
            MorphismExpr::Id(m) => MorphismExpr::Id(rename_module_ops(m, &rn_sig)?),
            MorphismExpr::Comp(f, g) => {
                MorphismExpr::comp(f.rename_ops(map)?, g.rename_ops(map)?)
            }
            MorphismExpr::Tau(sig) => MorphismExpr::Tau(rn_sig(sig)?),
            MorphismExpr::OpInj { sig, op } => MorphismExpr::OpInj {
                sig: rn_sig(sig)?,
                op: rn(op),
            },
            MorphismExpr::Proj(i) => MorphismExpr::Proj(*i),
            MorphismExpr::Tuple(fs) => MorphismExpr::Tuple(
                fs.iter()
                    .map(|f| f.rename_ops(map))
                    .collect::<Result<Vec<_>>>()?,
            ),
            MorphismExpr::Case { sig, arms } => MorphismExpr::Case {
                sig: rn_sig(sig)?,
                arms: arms
                    .iter()
                    .map(|f| f.rename_ops(map))
                    .collect::<Result<Vec<_>>>()?,
            },
            MorphismExpr::DerivM(f) => MorphismExpr::DerivM(Box::new(f.rename_ops(map)?)),
            MorphismExpr::Curry(f) => MorphismExpr::Curry(Box::new(f.rename_ops(map)?)),
            MorphismExpr::Uncurry(f) => MorphismExpr::Uncurry(Box::new(f.rename_ops(map)?)),
            MorphismExpr::Weaken(m) => MorphismExpr::Weaken(rename_module_ops(m, &rn_sig)?),
            MorphismExpr::SigmaSubst => MorphismExpr::SigmaSubst,
        })
    }
}

/// Renames operation references inside a module expression (its `Sig` parts).
pub fn rename_ops_in_module(
    m: &ModuleExpr,
    map: &HashMap<String, String>,
) -> Result<ModuleExpr> {
    let rn = |name: &str| -> String {
        map.get(name).cloned().unwrap_or_else(|| name.to_string())
    };
    rename_module_ops(m, &|sig: &AlgebraicSignature| {
        AlgebraicSignature::new(
            sig.ops()
                .iter()
                .map(|o| (rn(&o.name), o.arity.clone()))
                .collect(),
        )
    })
}

fn rename_module_ops(
    m: &ModuleExpr,
    rn_sig: &impl Fn(&AlgebraicSignature) -> Result<AlgebraicSignature>,
) -> Result<ModuleExpr> {
    Ok(match m {
        ModuleExpr::Theta => ModuleExpr::Theta,
        ModuleExpr::Deriv(inner) => ModuleExpr::deriv(rename_module_ops(inner, rn_sig)?),
        ModuleExpr::Prod(ms) => ModuleExpr::Prod(
            ms.iter()
                .map(|x| rename_module_ops(x, rn_sig))
                .collect::<Result<Vec<_>>>()?,
        ),
        ModuleExpr::Sig(sig) => ModuleExpr::Sig(rn_sig(sig)?),
    })
}

/// Typechecks a morphism expression over an ambient signature, returning its
/// principal `(source, target)`.  Some nodes (Proj, empty Tuple) have no
/// principal source on their own; `expected` propagates the source through
/// compositions, and equations always supply their declared source.
pub fn typecheck(
    e: &MorphismExpr,
    ambient: &AlgebraicSignature,
    expected: Option<&ModuleExpr>,
) -> Result<(ModuleExpr, ModuleExpr)> {
    let check_sub = |sig: &AlgebraicSignature| -> Result<()> {
        if sig.is_subsignature_of(ambient) {
            Ok(())
        } else {
            Err(Error::Type(
                "signature is not a sub-signature of the ambient signature".into(),
            ))
        }
    };
    let require = |got: &ModuleExpr, want: Option<&ModuleExpr>| -> Result<()> {
        match want {
            Some(w) if w != got => Err(Error::Type(format!(
                "source mismatch: expected {w:?}, found {got:?}"
            ))),
            _ => Ok(()),
        }
    };
    match e {
        MorphismExpr::Id(m) => {
            require(m, expected)?;
            Ok((m.clone(), m.clone()))
        }
        MorphismExpr::Comp(f, g) => {
            let (gs, gt) = typecheck(g, ambient, expected)?;
            let (_, ft) = typecheck(f, ambient, Some(&gt))?;
            Ok((gs, ft))
        }
        MorphismExpr::Tau(sig) => {
            check_sub(sig)?;
            let src = ModuleExpr::Sig(sig.clone());
            require(&src, expected)?;
            Ok((src, ModuleExpr::Theta))
        }
        MorphismExpr::OpInj { sig, op } => {
            check_sub(sig)?;
            let decl = sig.op(op).ok_or_else(|| Error::UnknownOp(op.clone()))?;
            let src = ModuleExpr::theta_pow(&decl.arity);
            require(&src, expected)?;
            Ok((src, ModuleExpr::Sig(sig.clone())))
        }
        MorphismExpr::Proj(i) => {
            let src = expected
                .ok_or_else(|| Error::Type("projection needs a source from context".into()))?;
            match src {
                ModuleExpr::Prod(ms) if *i < ms.len() => Ok((src.clone(), ms[*i].clone())),
                ModuleExpr::Prod(ms) => Err(Error::Type(format!(
                    "projection index {i} out of bounds for product of {}",
                    ms.len()
                ))),
                other => Err(Error::Type(format!(
                    "projection out of non-product {other:?}"
                ))),
            }
        }
        MorphismExpr::Tuple(fs) => {
            let src = match expected {
                Some(s) => s.clone(),
                None => {
                    let first = fs.first().ok_or_else(|| {
                        Error::Type("empty tuple needs a source from context".into())
                    })?;
                    typecheck(first, ambient, None)?.0
                }
            };
            let mut targets = Vec::with_capacity(fs.len());
            for f in fs {
                let (_, t) = typecheck(f, ambient, Some(&src))?;
                targets.push(t);
            }
            Ok((src, ModuleExpr::Prod(targets)))
        }
        MorphismExpr::Case { sig, arms } => {
            if arms.len() != sig.len() {
                return Err(Error::Type(format!(
                    "case has {} arms for a signature of {} ops",
                    arms.len(),
                    sig.len()
                )));
            }
            let src = ModuleExpr::Sig(sig.clone());
            require(&src, expected)?;
            let mut target: Option<ModuleExpr> = None;
            for (op, arm) in sig.ops().iter().zip(arms) {
                let arm_src = ModuleExpr::theta_pow(&op.arity);
                let (_, t) = typecheck(arm, ambient, Some(&arm_src))?;
                match &target {
                    None => target = Some(t),
                    Some(prev) if *prev == t => {}
                    Some(prev) => {
                        return Err(Error::Type(format!(
                            "case arms disagree on target: {prev:?} vs {t:?}"
                        )))
                    }
                }
            }
            // the empty case is vacuous; Θ is the conventional target
            Ok((src, target.unwrap_or(ModuleExpr::Theta)))
        }
        MorphismExpr::DerivM(f) => {
            let inner_expected = match expected {
                Some(ModuleExpr::Deriv(m)) => Some(m.as_ref().clone()),
                Some(other) => {
                    return Err(Error::Type(format!(
                        "derived morphism applied at non-derived source {other:?}"
                    )))
                }
                None => None,
            };
            let (s, t) = typecheck(f, ambient, inner_expected.as_ref())?;
            Ok((ModuleExpr::deriv(s), ModuleExpr::deriv(t)))
        }
        MorphismExpr::Curry(f) => {
            let inner_expected = expected
                .map(|s| ModuleExpr::Prod(vec![s.clone(), ModuleExpr::Theta]));
            let (s, t) = typecheck(f, ambient, inner_expected.as_ref())?;
            match s {
                ModuleExpr::Prod(ms) if ms.len() == 2 && ms[1] == ModuleExpr::Theta => {
                    Ok((ms[0].clone(), ModuleExpr::deriv(t)))
                }
                other => Err(Error::Type(format!(
                    "curry requires source M×Θ, found {other:?}"
                ))),
            }
        }
        MorphismExpr::Uncurry(g) => {
            let inner_expected = match expected {
                Some(ModuleExpr::Prod(ms)) if ms.len() == 2 && ms[1] == ModuleExpr::Theta => {
                    Some(ms[0].clone())
                }
                Some(other) => {
                    return Err(Error::Type(format!(
                        "uncurry requires source M×Θ, found {other:?}"
                    )))
                }
                None => None,
            };
            let (s, t) = typecheck(g, ambient, inner_expected.as_ref())?;
            match t {
                ModuleExpr::Deriv(n) => Ok((
                    ModuleExpr::Prod(vec![s, ModuleExpr::Theta]),
                    n.as_ref().clone(),
                )),
                other => Err(Error::Type(format!(
                    "uncurry requires target N′, found {other:?}"
                ))),
            }
        }
        MorphismExpr::Weaken(m) => {
            require(m, expected)?;
            Ok((m.clone(), ModuleExpr::deriv(m.clone())))
        }
        MorphismExpr::SigmaSubst => {
            let src = ModuleExpr::Prod(vec![ModuleExpr::theta_deriv(1), ModuleExpr::Theta]);
            require(&src, expected)?;
            Ok((src, ModuleExpr::Theta))
        }
    }
}

/// A value of a module expression at a model: the pointwise reading.
/// `Deriv` wraps a value living one context deeper.
#[derive(Debug, Clone, PartialEq)]
pub enum ModuleValue<E> {
    Theta(E),
    Deriv(Box<ModuleValue<E>>),
    Prod(Vec<ModuleValue<E>>),
    Sig { op: String, arg: Box<ModuleValue<E>> },
}

impl<E> ModuleValue<E> {
    pub fn deriv(v: ModuleValue<E>) -> Self {
        ModuleValue::Deriv(Box::new(v))
    }

    pub fn sig(op: &str, arg: ModuleValue<E>) -> Self {
        ModuleValue::Sig {
            op: op.to_string(),
            arg: Box::new(arg),
        }
    }

    /// Wraps elements in extended contexts as a Θ^(a) product value.
    pub fn theta_pow_of(elems: Vec<E>, arity: &BindingArity) -> Self {
        ModuleValue::Prod(
            elems
                .into_iter()
                .zip(arity.entries())
                .map(|(e, &a)| {
                    let mut v = ModuleValue::Theta(e);
                    for _ in 0..a {
                        v = ModuleValue::deriv(v);
                    }
                    v
                })
                .collect(),
        )
    }

    /// Inverse of [`ModuleValue::theta_pow_of`].
    pub fn theta_pow_elems(&self) -> Result<Vec<&E>>
    where
        E: std::fmt::Debug,
    {
        let comps = match self {
            ModuleValue::Prod(vs) => vs,
            other => return Err(Error::Shape(format!("expected product value, got {other:?}"))),
        };
        comps
            .iter()
            .map(|mut v| loop {
                match v {
                    ModuleValue::Theta(e) => return Ok(e),
                    ModuleValue::Deriv(inner) => v = inner,
                    other => {
                        return Err(Error::Shape(format!(
                            "expected Θ-component, got {other:?}"
                        )))
                    }
                }
            })
            .collect()
    }
}

/// Weakens a module value at context `ctx` by inserting a fresh variable at
/// position `pos` (ambient indices `>= pos` shift up by one).
pub fn weaken_value<M: ModelHooks>(
    m: &M,
    v: &ModuleValue<M::Elem>,
    ctx: usize,
    pos: usize,
) -> ModuleValue<M::Elem> {
    match v {
        ModuleValue::Theta(e) => {
            let env: Vec<M::Elem> = (0..ctx)
                .map(|i| m.var(ctx + 1, if i < pos { i } else { i + 1 }))
                .collect();
            ModuleValue::Theta(m.subst(e, &env, ctx + 1))
        }
        ModuleValue::Deriv(w) => ModuleValue::deriv(weaken_value(m, w, ctx + 1, pos + 1)),
        ModuleValue::Prod(vs) => {
            ModuleValue::Prod(vs.iter().map(|x| weaken_value(m, x, ctx, pos)).collect())
        }
        ModuleValue::Sig { op, arg } => ModuleValue::Sig {
            op: op.clone(),
            arg: Box::new(weaken_value(m, arg, ctx, pos)),
        },
    }
}

/// Substitutes the distinguished variable at index `pos` of a value over
/// context `vctx` by `t`, which lives at context `vctx - 1 - pos` extended by
/// the `pos` inner binders; the result lives at `vctx - 1`.
fn subst_star<M: ModelHooks>(
    m: &M,
    v: &ModuleValue<M::Elem>,
    vctx: usize,
    pos: usize,
    t: &M::Elem,
) -> ModuleValue<M::Elem> {
    match v {
        ModuleValue::Theta(e) => {
            let target = vctx - 1;
            let ambient = vctx - 1 - pos;
            // lift t under the `pos` inner binders
            let lift_env: Vec<M::Elem> = (0..ambient).map(|j| m.var(target, j + pos)).collect();
            let lifted = m.subst(t, &lift_env, target);
            let env: Vec<M::Elem> = (0..vctx)
                .map(|i| {
                    if i < pos {
                        m.var(target, i)
                    } else if i == pos {
                        lifted.clone()
                    } else {
                        m.var(target, i - 1)
                    }
                })
                .collect();
            ModuleValue::Theta(m.subst(e, &env, target))
        }
        ModuleValue::Deriv(w) => ModuleValue::deriv(subst_star(m, w, vctx + 1, pos + 1, t)),
        ModuleValue::Prod(vs) => ModuleValue::Prod(
            vs.iter()
                .map(|x| subst_star(m, x, vctx, pos, t))
                .collect(),
        ),
        ModuleValue::Sig { op, arg } => ModuleValue::Sig {
            op: op.clone(),
            arg: Box::new(subst_star(m, arg, vctx, pos, t)),
        },
    }
}

/// Module substitution on values: applies `env : ctx_from → ctx_to` to every
/// Θ-leaf, lifting under derivations.
pub fn subst_value<M: ModelHooks>(
    m: &M,
    v: &ModuleValue<M::Elem>,
    ctx_from: usize,
    env: &[M::Elem],
    ctx_to: usize,
) -> ModuleValue<M::Elem> {
    match v {
        ModuleValue::Theta(e) => ModuleValue::Theta(m.subst(e, env, ctx_to)),
        ModuleValue::Deriv(w) => {
            let mut lifted: Vec<M::Elem> = vec![m.var(ctx_to + 1, 0)];
            let shift: Vec<M::Elem> = (0..ctx_to).map(|j| m.var(ctx_to + 1, j + 1)).collect();
            lifted.extend(env.iter().map(|e| m.subst(e, &shift, ctx_to + 1)));
            ModuleValue::deriv(subst_value(m, w, ctx_from + 1, &lifted, ctx_to + 1))
        }
        ModuleValue::Prod(vs) => ModuleValue::Prod(
            vs.iter()
                .map(|x| subst_value(m, x, ctx_from, env, ctx_to))
                .collect(),
        ),
        ModuleValue::Sig { op, arg } => ModuleValue::Sig {
            op: op.clone(),
            arg: Box::new(subst_value(m, arg, ctx_from, env, ctx_to)),
        },
    }
}

/// Pointwise equality of two values of the same shape, through the model's
/// equality.
pub fn value_equal<M: ModelHooks>(
    m: &M,
    a: &ModuleValue<M::Elem>,
    b: &ModuleValue<M::Elem>,
) -> EqVerdict {
    match (a, b) {
        (ModuleValue::Theta(x), ModuleValue::Theta(y)) => m.equal(x, y),
        (ModuleValue::Deriv(x), ModuleValue::Deriv(y)) => value_equal(m, x, y),
        (ModuleValue::Prod(xs), ModuleValue::Prod(ys)) if xs.len() == ys.len() => {
            let mut verdict = EqVerdict::Equal;
            for (x, y) in xs.iter().zip(ys) {
                match value_equal(m, x, y) {
                    EqVerdict::Distinct => return EqVerdict::Distinct,
                    EqVerdict::Unknown => verdict = EqVerdict::Unknown,
                    EqVerdict::Equal => {}
                }
            }
            verdict
        }
        (ModuleValue::Sig { op: o1, arg: a1 }, ModuleValue::Sig { op: o2, arg: a2 }) => {
            if o1 != o2 {
                EqVerdict::Distinct
            } else {
                value_equal(m, a1, a2)
            }
        }
        _ => EqVerdict::Distinct,
    }
}

/// Evaluates a morphism expression at a model: `v` must have the shape of
/// the expression's source at context `ctx`; the result has the target's
/// shape.
pub fn eval<M: ModelHooks>(
    e: &MorphismExpr,
    m: &M,
    ctx: usize,
    v: ModuleValue<M::Elem>,
) -> Result<ModuleValue<M::Elem>> {
    match e {
        MorphismExpr::Id(_) => Ok(v),
        MorphismExpr::Comp(f, g) => {
            let mid = eval(g, m, ctx, v)?;
            eval(f, m, ctx, mid)
        }
        MorphismExpr::Tau(sig) => match v {
            ModuleValue::Sig { op, arg } => {
                let arity = sig.arity(&op)?.clone();
                let elems: Vec<M::Elem> =
                    arg.theta_pow_elems()?.into_iter().cloned().collect();
                if elems.len() != arity.len() {
                    return Err(Error::Shape(format!(
                        "op `{op}` value has {} components, arity has {}",
                        elems.len(),
                        arity.len()
                    )));
                }
                Ok(ModuleValue::Theta(m.action(ctx, &op, &elems)))
            }
            other => Err(Error::Shape(format!("τ applied to non-Σ value {other:?}"))),
        },
        MorphismExpr::OpInj { op, .. } => Ok(ModuleValue::sig(op, v)),
        MorphismExpr::Proj(i) => match v {
            ModuleValue::Prod(mut vs) if *i < vs.len() => Ok(vs.swap_remove(*i)),
            other => Err(Error::Shape(format!(
                "projection {i} applied to {other:?}"
            ))),
        },
        MorphismExpr::Tuple(fs) => Ok(ModuleValue::Prod(
            fs.iter()
                .map(|f| eval(f, m, ctx, v.clone()))
                .collect::<Result<Vec<_>>>()?,
        )),
        MorphismExpr::Case { sig, arms } => match v {
            ModuleValue::Sig { op, arg } => {
                let idx = sig
                    .op_index(&op)
                    .ok_or_else(|| Error::UnknownOp(op.clone()))?;
                eval(&arms[idx], m, ctx, *arg)
            }
            other => Err(Error::Shape(format!("case applied to {other:?}"))),
        },
        MorphismExpr::DerivM(f) => match v {
            ModuleValue::Deriv(w) => Ok(ModuleValue::deriv(eval(f, m, ctx + 1, *w)?)),
            other => Err(Error::Shape(format!(
                "derived morphism applied to {other:?}"
            ))),
        },
        MorphismExpr::Curry(f) => {
            let weakened = weaken_value(m, &v, ctx, 0);
            let fresh = ModuleValue::Theta(m.var(ctx + 1, 0));
            let inner = eval(
                f,
                m,
                ctx + 1,
                ModuleValue::Prod(vec![weakened, fresh]),
            )?;
            Ok(ModuleValue::deriv(inner))
        }
        MorphismExpr::Uncurry(g) => match v {
            ModuleValue::Prod(vs) if vs.len() == 2 => {
                let mut it = vs.into_iter();
                let arg = it.next().unwrap();
                let t = match it.next().unwrap() {
                    ModuleValue::Theta(t) => t,
                    other => {
                        return Err(Error::Shape(format!(
                            "uncurry second component must be Θ, got {other:?}"
                        )))
                    }
                };
                match eval(g, m, ctx, arg)? {
                    ModuleValue::Deriv(w) => Ok(subst_star(m, &w, ctx + 1, 0, &t)),
                    other => Err(Error::Shape(format!(
                        "uncurry inner result must be derived, got {other:?}"
                    ))),
                }
            }
            other => Err(Error::Shape(format!("uncurry applied to {other:?}"))),
        },
        MorphismExpr::Weaken(_) => Ok(ModuleValue::deriv(weaken_value(m, &v, ctx, 0))),
        MorphismExpr::SigmaSubst => match v {
            ModuleValue::Prod(vs) if vs.len() == 2 => {
                let mut it = vs.into_iter();
                let body = match it.next().unwrap() {
                    ModuleValue::Deriv(w) => w,
                    other => {
                        return Err(Error::Shape(format!(
                            "σ first component must be Θ′, got {other:?}"
                        )))
                    }
                };
                let t = match it.next().unwrap() {
                    ModuleValue::Theta(t) => t,
                    other => {
                        return Err(Error::Shape(format!(
                            "σ second component must be Θ, got {other:?}"
                        )))
                    }
                };
                Ok(subst_star(m, &body, ctx + 1, 0, &t))
            }
            other => Err(Error::Shape(format!("σ applied to {other:?}"))),
        },
    }
}

/// All syntactic values of a module expression at a context, built from the
/// enumerated terms of the ambient signature (height <= `depth`).
pub fn syntactic_values(
    expr: &ModuleExpr,
    sig: &AlgebraicSignature,
    ctx: usize,
    depth: usize,
    budget: Option<usize>,
) -> Vec<ModuleValue<Term>> {
    match expr {
        ModuleExpr::Theta => enumerate_terms(sig, ctx, depth, budget)
            .0
            .into_iter()
            .map(ModuleValue::Theta)
            .collect(),
        ModuleExpr::Deriv(inner) => syntactic_values(inner, sig, ctx + 1, depth, budget)
            .into_iter()
            .map(ModuleValue::deriv)
            .collect(),
        ModuleExpr::Prod(ms) => {
            let lists: Vec<Vec<ModuleValue<Term>>> = ms
                .iter()
                .map(|x| syntactic_values(x, sig, ctx, depth, budget))
                .collect();
            let mut out: Vec<Vec<ModuleValue<Term>>> = vec![Vec::new()];
            for list in &lists {
                let mut next = Vec::new();
                for prefix in &out {
                    for item in list {
                        let mut p = prefix.clone();
                        p.push(item.clone());
                        next.push(p);
                        if let Some(cap) = budget {
                            if next.len() >= cap {
                                break;
                            }
                        }
                    }
                    if let Some(cap) = budget {
                        if next.len() >= cap {
                            break;
                        }
                    }
                }
                out = next;
            }
            out.into_iter().map(ModuleValue::Prod).collect()
        }
        ModuleExpr::Sig(s) => {
            let mut out = Vec::new();
            for op in s.ops() {
                let pow = ModuleExpr::theta_pow(&op.arity);
                for v in syntactic_values(&pow, sig, ctx, depth, budget) {
                    out.push(ModuleValue::sig(&op.name, v));
                }
            }
            out
        }
    }
}

/// Maps a syntactic value into a model by folding every Θ-leaf.
pub fn fold_value<M: ModelHooks>(
    v: &ModuleValue<Term>,
    m: &M,
    ctx: usize,
) -> Result<ModuleValue<M::Elem>> {
    match v {
        ModuleValue::Theta(t) => Ok(ModuleValue::Theta(crate::model::fold(t, m, ctx)?)),
        ModuleValue::Deriv(w) => Ok(ModuleValue::deriv(fold_value(w, m, ctx + 1)?)),
        ModuleValue::Prod(vs) => Ok(ModuleValue::Prod(
            vs.iter()
                .map(|x| fold_value(x, m, ctx))
                .collect::<Result<Vec<_>>>()?,
        )),
        ModuleValue::Sig { op, arg } => Ok(ModuleValue::Sig {
            op: op.clone(),
            arg: Box::new(fold_value(arg, m, ctx)?),
        }),
    }
}

/// Renders a value for reports.
pub fn render_value<M: ModelHooks>(m: &M, v: &ModuleValue<M::Elem>) -> String {
    match v {
        ModuleValue::Theta(e) => m.render(e),
        ModuleValue::Deriv(w) => format!("↑{}", render_value(m, w)),
        ModuleValue::Prod(vs) => format!(
            "({})",
            vs.iter()
                .map(|x| render_value(m, x))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        ModuleValue::Sig { op, arg } => format!("{op}⟨{}⟩", render_value(m, arg)),
    }
}

/// Report of a linearity check: a module morphism must commute with
/// substitution.
#[derive(Debug, Default)]
pub struct LinearityReport {
    pub checks: usize,
    pub unknown: usize,
    pub counterexamples: Vec<String>,
}

impl LinearityReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Checks `eval(e, v[σ]) = eval(e, v)[σ]` on sampled inputs: source values of
/// height <= `depth` at context `ctx`, substitutions into context `ctx` with
/// entries of height <= `env_depth`.
pub fn check_linearity<M: ModelHooks>(
    e: &MorphismExpr,
    m: &M,
    ctx: usize,
    depth: usize,
    env_depth: usize,
    budget: usize,
) -> Result<LinearityReport> {
    let sig = m.signature().clone();
    let (source, _) = typecheck(e, &sig, None)?;
    let values = syntactic_values(&source, &sig, ctx, depth, Some(budget));
    let (env_terms, _) = enumerate_terms(&sig, ctx, env_depth, Some(budget));
    let mut report = LinearityReport::default();
    let mut envs: Vec<Vec<Term>> = vec![Vec::new()];
    for _ in 0..ctx {
        let mut next = Vec::new();
        for prefix in &envs {
            for t in &env_terms {
                let mut p = prefix.clone();
                p.push(t.clone());
                next.push(p);
                if next.len() >= budget {
                    break;
                }
            }
            if next.len() >= budget {
                break;
            }
        }
        envs = next;
    }
    for v in &values {
        let mv = fold_value(v, m, ctx)?;
        for env in &envs {
            let menv: Vec<M::Elem> = env
                .iter()
                .map(|t| crate::model::fold(t, m, ctx))
                .collect::<Result<Vec<_>>>()?;
            let lhs = eval(e, m, ctx, subst_value(m, &mv, ctx, &menv, ctx))?;
            let rhs = subst_value(m, &eval(e, m, ctx, mv.clone())?, ctx, &menv, ctx);
            report.checks += 1;
            match value_equal(m, &lhs, &rhs) {
                EqVerdict::Equal => {}
                EqVerdict::Unknown => report.unknown += 1,
                EqVerdict::Distinct => report.counterexamples.push(format!(
                    "input {} under substitution: {} ≠ {}",
                    render_value(m, &mv),
                    render_value(m, &lhs),
                    render_value(m, &rhs)
                )),
            }
            if report.checks >= budget {
                return Ok(report);
            }
        }
    }
    Ok(report)
}
