//! Elementary equations between module morphisms, their compilation into
//! second-order rewrite rules, and satisfaction checking in models.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::modcalc::{
    eval, fold_value, rename_ops_in_module, syntactic_values, typecheck, value_equal, ModuleExpr,
    ModuleValue, MorphismExpr,
};
use crate::model::{EqVerdict, ModelHooks, SyntacticModel};
use crate::rewrite::{RewriteRule, RuleSet};
use crate::signature::{AlgebraicSignature, TwoSignature};
use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Rewrite left side to right side.
    LeftToRight,
    /// Rewrite right side to left side.
    RightToLeft,
    /// No rewriting; only the congruence oracle sees this equation.
    Unoriented,
}

/// An elementary equation: a parallel pair of module morphisms
/// `lhs, rhs : source → target` over a signature.
#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    pub name: String,
    pub source: ModuleExpr,
    pub target: ModuleExpr,
    pub lhs: MorphismExpr,
    pub rhs: MorphismExpr,
    pub orientation: Orientation,
}

impl Equation {
    pub fn new(
        name: impl Into<String>,
        source: ModuleExpr,
        target: ModuleExpr,
        lhs: MorphismExpr,
        rhs: MorphismExpr,
        orientation: Orientation,
        sig: &AlgebraicSignature,
    ) -> Result<Equation> {
        let eq = Equation {
            name: name.into(),
            source,
            target,
            lhs,
            rhs,
            orientation,
        };
        eq.validate(sig)?;
        Ok(eq)
    }

    /// Both sides must typecheck as `source → target` over `sig`.
    pub fn validate(&self, sig: &AlgebraicSignature) -> Result<()> {
        for (side, expr) in [("left", &self.lhs), ("right", &self.rhs)] {
            let (_, t) = typecheck(expr, sig, Some(&self.source)).map_err(|e| {
                Error::Type(format!("equation `{}`, {side} side: {e}", self.name))
            })?;
            if t != self.target {
                return Err(Error::Type(format!(
                    "equation `{}`, {side} side has target {:?}, declared {:?}",
                    self.name, t, self.target
                )));
            }
        }
        Ok(())
    }

    /// Transports the equation along an operation renaming into `new_sig`.
    pub fn rename_ops(
        &self,
        map: &HashMap<String, String>,
        new_sig: &AlgebraicSignature,
    ) -> Result<Equation> {
        Equation::new(
            self.name.clone(),
            rename_ops_in_module(&self.source, map)?,
            rename_ops_in_module(&self.target, map)?,
            self.lhs.rename_ops(map)?,
            self.rhs.rename_ops(map)?,
            self.orientation,
            new_sig,
        )
    }
}

fn collect_metas(t: &Term, out: &mut HashMap<String, usize>) {
    match t {
        Term::Var(_) => {}
        Term::Con(_, args) => args.iter().for_each(|a| collect_metas(a, out)),
        Term::Meta { id, .. } => *out.entry(id.clone()).or_insert(0) += 1,
        Term::Subst { body, env } => {
            collect_metas(body, out);
            env.iter().for_each(|e| collect_metas(e, out));
        }
    }
}

fn contains_subst(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Meta { .. } => false,
        Term::Con(_, args) => args.iter().any(contains_subst),
        Term::Subst { .. } => true,
    }
}

/// The generic symbolic input for a module expression: one fresh
/// metavariable per Θ-component, carrying the identity renaming on the
/// binders above it.
fn symbolic_value(expr: &ModuleExpr, depth: usize, counter: &mut usize) -> Result<ModuleValue<Term>> {
    match expr {
        ModuleExpr::Theta => {
            let id = format!("m{}", *counter);
            *counter += 1;
            Ok(ModuleValue::Theta(Term::meta(&id, (0..depth).collect())))
        }
        ModuleExpr::Deriv(inner) => Ok(ModuleValue::deriv(symbolic_value(
            inner,
            depth + 1,
            counter,
        )?)),
        ModuleExpr::Prod(ms) => Ok(ModuleValue::Prod(
            ms.iter()
                .map(|m| symbolic_value(m, depth, counter))
                .collect::<Result<Vec<_>>>()?,
        )),
        ModuleExpr::Sig(_) => Err(Error::NotAPattern(
            "signature-module source must be case-split before compilation".into(),
        )),
    }
}

fn compile_one(
    sig: &AlgebraicSignature,
    name: &str,
    source: &ModuleExpr,
    target: &ModuleExpr,
    pattern_side: &MorphismExpr,
    template_side: &MorphismExpr,
) -> Result<RewriteRule> {
    // bring the target down to Θ by uncurrying both sides
    let derivs = target.as_theta_derivs().ok_or_else(|| {
        Error::NotAPattern(format!(
            "equation `{name}` has non-algebraic target {target:?}"
        ))
    })?;
    let mut counter = 0usize;
    let mut input = symbolic_value(source, 0, &mut counter)?;
    let mut pat = pattern_side.clone();
    let mut tmpl = template_side.clone();
    for _ in 0..derivs {
        pat = MorphismExpr::uncurry(pat);
        tmpl = MorphismExpr::uncurry(tmpl);
        let slot = format!("m{counter}");
        counter += 1;
        input = ModuleValue::Prod(vec![input, ModuleValue::Theta(Term::meta(&slot, vec![]))]);
    }
    let model = SyntacticModel::new(sig.clone());
    let pattern = match eval(&pat, &model, 0, input.clone())? {
        ModuleValue::Theta(t) => t,
        other => {
            return Err(Error::NotAPattern(format!(
                "equation `{name}` compiles to non-Θ value {other:?}"
            )))
        }
    };
    let template = match eval(&tmpl, &model, 0, input)? {
        ModuleValue::Theta(t) => t,
        other => {
            return Err(Error::NotAPattern(format!(
                "equation `{name}` compiles to non-Θ value {other:?}"
            )))
        }
    };
    if contains_subst(&pattern) {
        return Err(Error::NotAPattern(format!(
            "equation `{name}`: rewriting side performs substitution"
        )));
    }
    if !matches!(pattern, Term::Con(_, _)) {
        return Err(Error::NotAPattern(format!(
            "equation `{name}`: rewriting side is not headed by an operation"
        )));
    }
    let mut pattern_metas = HashMap::new();
    collect_metas(&pattern, &mut pattern_metas);
    let mut template_metas = HashMap::new();
    collect_metas(&template, &mut template_metas);
    for id in template_metas.keys() {
        if !pattern_metas.contains_key(id) {
            return Err(Error::NotAPattern(format!(
                "equation `{name}`: replacement side invents `{id}`"
            )));
        }
    }
    let nonlinear = pattern_metas.values().any(|&n| n > 1);
    Ok(RewriteRule {
        name: name.to_string(),
        pattern,
        template,
        nonlinear,
    })
}

/// Compiles an oriented equation into rewrite rules by evaluating both sides
/// on a generic symbolic input.  A signature-module source yields one rule
/// per operation.
pub fn compile_rule(eq: &Equation, sig: &AlgebraicSignature) -> Result<Vec<RewriteRule>> {
    let (pattern_side, template_side) = match eq.orientation {
        Orientation::LeftToRight => (&eq.lhs, &eq.rhs),
        Orientation::RightToLeft => (&eq.rhs, &eq.lhs),
        Orientation::Unoriented => {
            return Err(Error::NotAPattern(format!(
                "equation `{}` is unoriented",
                eq.name
            )))
        }
    };
    match &eq.source {
        ModuleExpr::Sig(case_sig) => case_sig
            .ops()
            .iter()
            .map(|op| {
                let inj = MorphismExpr::OpInj {
                    sig: case_sig.clone(),
                    op: op.name.clone(),
                };
                let src = ModuleExpr::theta_pow(&op.arity);
                compile_one(
                    sig,
                    &format!("{}.{}", eq.name, op.name),
                    &src,
                    &eq.target,
                    &MorphismExpr::comp(pattern_side.clone(), inj.clone()),
                    &MorphismExpr::comp(template_side.clone(), inj),
                )
            })
            .collect(),
        src => Ok(vec![compile_one(
            sig,
            &eq.name,
            src,
            &eq.target,
            pattern_side,
            template_side,
        )?]),
    }
}

/// Compiles every oriented equation of a 2-signature; unoriented equations
/// are skipped (the congruence oracle handles them).
pub fn compile_rules(two: &TwoSignature) -> Result<RuleSet> {
    let mut rules = Vec::new();
    for eq in &two.equations {
        if eq.orientation == Orientation::Unoriented {
            continue;
        }
        rules.extend(compile_rule(eq, &two.sig)?);
    }
    Ok(RuleSet::new(two.sig.clone(), rules))
}

/// Outcome of probing an equation in a model.
#[derive(Debug, Default)]
pub struct SatisfactionReport {
    pub probes: usize,
    pub unknown: usize,
    pub counterexamples: Vec<String>,
}

impl SatisfactionReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Probes `eq` in a model on syntactic inputs of height <= `depth` over each
/// context in `ctxs`.  When more inputs exist than `budget`, they are
/// subsampled at a uniform stride so coverage stays spread out.
pub fn satisfies<M: ModelHooks>(
    m: &M,
    eq: &Equation,
    ctxs: std::ops::Range<usize>,
    depth: usize,
    budget: usize,
) -> Result<SatisfactionReport> {
    let sig = m.signature().clone();
    eq.validate(&sig)?;
    let mut report = SatisfactionReport::default();
    for ctx in ctxs {
        let inputs = syntactic_values(&eq.source, &sig, ctx, depth, None);
        let stride = usize::max(1, inputs.len().div_ceil(budget));
        for v in inputs.iter().step_by(stride) {
            let folded = fold_value(v, m, ctx)?;
            let l = eval(&eq.lhs, m, ctx, folded.clone())?;
            let r = eval(&eq.rhs, m, ctx, folded)?;
            report.probes += 1;
            match value_equal(m, &l, &r) {
                EqVerdict::Equal => {}
                EqVerdict::Unknown => report.unknown += 1,
                EqVerdict::Distinct => {
                    let seen: HashSet<String> = report.counterexamples.iter().cloned().collect();
                    let msg = format!(
                        "`{}` fails at context {ctx} on input {}",
                        eq.name,
                        crate::modcalc::render_value(m, &fold_value(v, m, ctx)?)
                    );
                    if !seen.contains(&msg) {
                        report.counterexamples.push(msg);
                    }
                }
            }
        }
    }
    Ok(report)
}
