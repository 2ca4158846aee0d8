//! Models of a signature: carriers with variables, substitution, and an
//! action for each operation, plus the unique fold from the free syntax.

use crate::error::{Error, Result};
use crate::modcalc::{eval, ModuleValue};
use crate::rewrite::{Regime, RuleSet};
use crate::signature::{AlgebraicSignature, SignatureMorphism, TwoSignature};
use crate::term::{enumerate_terms, identity_env, subst as term_subst, Term};

/// Outcome of an equality test in a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqVerdict {
    Equal,
    Distinct,
    Unknown,
}

/// A model of an algebraic signature: a context-indexed carrier with
/// variables, simultaneous substitution, one operation per signature entry,
/// and a (possibly partial) equality test.
///
/// In `action(ctx, op, args)`, argument `i` lives at context `ctx + a_i`
/// where `a_i` is the op's binding depth for that slot.  In
/// `subst(t, env, target_ctx)`, `t` lives at context `env.len()` and every
/// `env[i]` at `target_ctx`.
pub trait ModelHooks {
    type Elem: Clone + std::fmt::Debug;

    fn signature(&self) -> &AlgebraicSignature;
    fn var(&self, ctx: usize, i: usize) -> Self::Elem;
    fn subst(&self, t: &Self::Elem, env: &[Self::Elem], target_ctx: usize) -> Self::Elem;
    fn action(&self, ctx: usize, op: &str, args: &[Self::Elem]) -> Self::Elem;
    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> EqVerdict;
    fn render(&self, t: &Self::Elem) -> String;
}

/// The unique structure-respecting map out of the free syntax.
pub fn fold<M: ModelHooks>(t: &Term, m: &M, ctx: usize) -> Result<M::Elem> {
    match t {
        Term::Var(i) => {
            if *i >= ctx {
                return Err(Error::OutOfScope { index: *i, ctx });
            }
            Ok(m.var(ctx, *i))
        }
        Term::Con(op, args) => {
            let arity = m.signature().arity(op)?.entries().to_vec();
            let folded: Vec<M::Elem> = args
                .iter()
                .zip(&arity)
                .map(|(arg, &a)| fold(arg, m, ctx + a))
                .collect::<Result<Vec<_>>>()?;
            Ok(m.action(ctx, op, &folded))
        }
        other => Err(Error::NotGround(format!("{other:?}"))),
    }
}

/// Plain display of a de Bruijn term, used for reports.
pub fn render_term(t: &Term) -> String {
    match t {
        Term::Var(i) => format!("#{i}"),
        Term::Con(op, args) if args.is_empty() => op.clone(),
        Term::Con(op, args) => format!(
            "{op}({})",
            args.iter().map(render_term).collect::<Vec<_>>().join(", ")
        ),
        Term::Meta { id, renaming } => format!("?{id}{renaming:?}"),
        Term::Subst { body, env } => format!(
            "{}[{}]",
            render_term(body),
            env.iter().map(render_term).collect::<Vec<_>>().join(", ")
        ),
    }
}

/// The free syntax itself as a model.  Equality is syntactic identity, which
/// is exact here.  Substitution is metavariable-aware, so this model also
/// drives symbolic evaluation of morphism expressions.
#[derive(Debug, Clone)]
pub struct SyntacticModel {
    pub sig: AlgebraicSignature,
}

impl SyntacticModel {
    pub fn new(sig: AlgebraicSignature) -> Self {
        SyntacticModel { sig }
    }
}

impl ModelHooks for SyntacticModel {
    type Elem = Term;

    fn signature(&self) -> &AlgebraicSignature {
        &self.sig
    }

    fn var(&self, _ctx: usize, i: usize) -> Term {
        Term::Var(i)
    }

    fn subst(&self, t: &Term, env: &[Term], _target_ctx: usize) -> Term {
        term_subst(t, &self.sig, env).expect("well-scoped substitution")
    }

    fn action(&self, _ctx: usize, op: &str, args: &[Term]) -> Term {
        Term::Con(op.to_string(), args.to_vec())
    }

    fn equal(&self, a: &Term, b: &Term) -> EqVerdict {
        if a == b {
            EqVerdict::Equal
        } else {
            EqVerdict::Distinct
        }
    }

    fn render(&self, t: &Term) -> String {
        render_term(t)
    }
}

/// The syntax quotiented by a rule set, with equality decided per regime.
#[derive(Debug, Clone)]
pub struct QuotientModel {
    pub rules: RuleSet,
    pub regime: Regime,
    pub fuel: usize,
}

impl QuotientModel {
    pub fn new(rules: RuleSet, regime: Regime, fuel: usize) -> Self {
        QuotientModel { rules, regime, fuel }
    }

    fn reduce(&self, t: Term, ctx: usize) -> Term {
        // with a terminating system every element is kept in normal form, so
        // syntactic identity of representatives is sound and complete
        if self.regime == Regime::Terminating {
            self.rules.normalize(&t, ctx, self.fuel).0
        } else {
            t
        }
    }
}

impl ModelHooks for QuotientModel {
    type Elem = Term;

    fn signature(&self) -> &AlgebraicSignature {
        &self.rules.sig
    }

    fn var(&self, _ctx: usize, i: usize) -> Term {
        Term::Var(i)
    }

    fn subst(&self, t: &Term, env: &[Term], target_ctx: usize) -> Term {
        let raw = term_subst(t, &self.rules.sig, env).expect("well-scoped substitution");
        self.reduce(raw, target_ctx)
    }

    fn action(&self, ctx: usize, op: &str, args: &[Term]) -> Term {
        self.reduce(Term::Con(op.to_string(), args.to_vec()), ctx)
    }

    fn equal(&self, a: &Term, b: &Term) -> EqVerdict {
        if a == b {
            return EqVerdict::Equal;
        }
        match self.regime {
            Regime::Terminating => {
                // representatives are normal already; still renormalize in
                // case callers hand us raw terms
                let guess = 2 * usize::max(1, self.fuel);
                let (na, ea) = self.rules.normalize(a, guess, self.fuel);
                let (nb, eb) = self.rules.normalize(b, guess, self.fuel);
                if ea || eb {
                    EqVerdict::Unknown
                } else if na == nb {
                    EqVerdict::Equal
                } else {
                    EqVerdict::Distinct
                }
            }
            Regime::Confluent => {
                // elements do not carry their context; the smallest one that
                // fits both terms is equivalent for matching
                let ctx = usize::max(
                    crate::term::needed_ctx(a, &self.rules.sig),
                    crate::term::needed_ctx(b, &self.rules.sig),
                );
                let (verdict, _) = self.rules.joinable(a, b, ctx, self.fuel);
                verdict
            }
            Regime::Unoriented => EqVerdict::Unknown,
        }
    }

    fn render(&self, t: &Term) -> String {
        render_term(t)
    }
}

/// The free monoid on variables: an element over context `n` is a word of
/// indices `< n`.  Interprets a signature with a binary `m` and a constant
/// `e` (names configurable).
#[derive(Debug, Clone)]
pub struct ListModel {
    sig: AlgebraicSignature,
    mul: String,
    unit: String,
}

impl ListModel {
    pub fn new(sig: AlgebraicSignature, mul: &str, unit: &str) -> Result<Self> {
        if sig.arity(mul)?.entries() != [0, 0] {
            return Err(Error::Type(format!("`{mul}` must be binary with no binders")));
        }
        if !sig.arity(unit)?.is_empty() {
            return Err(Error::Type(format!("`{unit}` must be a constant")));
        }
        Ok(ListModel {
            sig,
            mul: mul.to_string(),
            unit: unit.to_string(),
        })
    }
}

impl ModelHooks for ListModel {
    type Elem = Vec<usize>;

    fn signature(&self) -> &AlgebraicSignature {
        &self.sig
    }

    fn var(&self, _ctx: usize, i: usize) -> Vec<usize> {
        vec![i]
    }

    fn subst(&self, t: &Vec<usize>, env: &[Vec<usize>], _target_ctx: usize) -> Vec<usize> {
        t.iter().flat_map(|&i| env[i].iter().copied()).collect()
    }

    fn action(&self, _ctx: usize, op: &str, args: &[Vec<usize>]) -> Vec<usize> {
        if op == self.mul {
            let mut out = args[0].clone();
            out.extend_from_slice(&args[1]);
            out
        } else if op == self.unit {
            Vec::new()
        } else {
            panic!("list model has no interpretation for `{op}`")
        }
    }

    fn equal(&self, a: &Vec<usize>, b: &Vec<usize>) -> EqVerdict {
        if a == b {
            EqVerdict::Equal
        } else {
            EqVerdict::Distinct
        }
    }

    fn render(&self, t: &Vec<usize>) -> String {
        format!(
            "[{}]",
            t.iter().map(|i| format!("x{i}")).collect::<Vec<_>>().join(", ")
        )
    }
}

/// A model of the morphism's source signature obtained by interpreting each
/// operation through its assigned morphism expression in the target model.
pub struct TranslationModel<'a, M: ModelHooks> {
    pub morphism: &'a SignatureMorphism,
    pub target: &'a M,
}

impl<'a, M: ModelHooks> TranslationModel<'a, M> {
    pub fn new(morphism: &'a SignatureMorphism, target: &'a M) -> Self {
        TranslationModel { morphism, target }
    }
}

impl<'a, M: ModelHooks> ModelHooks for TranslationModel<'a, M> {
    type Elem = M::Elem;

    fn signature(&self) -> &AlgebraicSignature {
        &self.morphism.source
    }

    fn var(&self, ctx: usize, i: usize) -> M::Elem {
        self.target.var(ctx, i)
    }

    fn subst(&self, t: &M::Elem, env: &[M::Elem], target_ctx: usize) -> M::Elem {
        self.target.subst(t, env, target_ctx)
    }

    fn action(&self, ctx: usize, op: &str, args: &[M::Elem]) -> M::Elem {
        let idx = self
            .morphism
            .source
            .op_index(op)
            .expect("op in source signature");
        let arity = self.morphism.source.ops()[idx].arity.clone();
        let input = ModuleValue::theta_pow_of(args.to_vec(), &arity);
        match eval(&self.morphism.assignment[idx], self.target, ctx, input) {
            Ok(ModuleValue::Theta(e)) => e,
            other => panic!("assignment for `{op}` did not produce a Θ-value: {other:?}"),
        }
    }

    fn equal(&self, a: &M::Elem, b: &M::Elem) -> EqVerdict {
        self.target.equal(a, b)
    }

    fn render(&self, t: &M::Elem) -> String {
        self.target.render(t)
    }
}

/// Shared shape for law/verification reports.
#[derive(Debug, Default)]
pub struct LawsReport {
    pub checks: usize,
    pub unknown: usize,
    pub violations: Vec<String>,
}

impl LawsReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(&mut self, verdict: EqVerdict, describe: impl FnOnce() -> String) {
        self.checks += 1;
        match verdict {
            EqVerdict::Equal => {}
            EqVerdict::Unknown => self.unknown += 1,
            EqVerdict::Distinct => self.violations.push(describe()),
        }
    }
}

/// Sampling bounds for law checks.
#[derive(Debug, Clone, Copy)]
pub struct LawsConfig {
    pub ctx: usize,
    pub depth: usize,
    pub env_depth: usize,
    pub budget: usize,
}

impl Default for LawsConfig {
    fn default() -> Self {
        LawsConfig {
            ctx: 2,
            depth: 2,
            env_depth: 2,
            budget: 200,
        }
    }
}

fn term_envs(sig: &AlgebraicSignature, ctx: usize, depth: usize, cap: usize) -> Vec<Vec<Term>> {
    let (entries, _) = enumerate_terms(sig, ctx, depth, Some(cap));
    let mut envs: Vec<Vec<Term>> = vec![Vec::new()];
    for _ in 0..ctx {
        let mut next = Vec::new();
        for prefix in &envs {
            for t in &entries {
                let mut p = prefix.clone();
                p.push(t.clone());
                next.push(p);
                if next.len() >= cap {
                    break;
                }
            }
            if next.len() >= cap {
                break;
            }
        }
        envs = next;
    }
    envs
}

/// Checks the monad/module laws of a model on sampled elements: unit laws,
/// associativity of substitution, linearity of each operation's action, and
/// reflexivity of the equality test.
pub fn check_model<M: ModelHooks>(m: &M, cfg: &LawsConfig) -> Result<LawsReport> {
    let sig = m.signature().clone();
    let mut report = LawsReport::default();
    let ctx = cfg.ctx;
    let (terms, _) = enumerate_terms(&sig, ctx, cfg.depth, Some(cfg.budget));
    let elems: Vec<M::Elem> = terms
        .iter()
        .map(|t| fold(t, m, ctx))
        .collect::<Result<Vec<_>>>()?;
    let envs: Vec<Vec<M::Elem>> = term_envs(&sig, ctx, cfg.env_depth, cfg.budget)
        .iter()
        .map(|env| env.iter().map(|t| fold(t, m, ctx)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let id_env: Vec<M::Elem> = (0..ctx).map(|i| m.var(ctx, i)).collect();

    for x in &elems {
        // reflexivity of the equality test
        report.record(
            match m.equal(x, x) {
                EqVerdict::Distinct => EqVerdict::Distinct,
                _ => EqVerdict::Equal,
            },
            || format!("equality not reflexive at {}", m.render(x)),
        );
        // right unit: x[id] = x
        report.record(m.equal(&m.subst(x, &id_env, ctx), x), || {
            format!("right unit fails at {}", m.render(x))
        });
    }
    for env in envs.iter().take(cfg.budget) {
        // left unit: var(i)[env] = env[i]
        for i in 0..ctx {
            report.record(m.equal(&m.subst(&m.var(ctx, i), env, ctx), &env[i]), || {
                format!("left unit fails at variable {i}")
            });
        }
        for env2 in envs.iter().take(4) {
            // associativity: (x[env])[env2] = x[env ∘ env2]
            let composed: Vec<M::Elem> =
                env.iter().map(|e| m.subst(e, env2, ctx)).collect();
            for x in elems.iter().take(8) {
                let lhs = m.subst(&m.subst(x, env, ctx), env2, ctx);
                let rhs = m.subst(x, &composed, ctx);
                report.record(m.equal(&lhs, &rhs), || {
                    format!("substitution associativity fails at {}", m.render(x))
                });
                if report.checks >= cfg.budget * 4 {
                    break;
                }
            }
        }
    }
    // linearity of each action: op(args)[env] = op(args[lifted env])
    for op in sig.ops() {
        let arity = op.arity.clone();
        let arg_terms: Vec<Vec<Term>> = arity
            .entries()
            .iter()
            .map(|&a| enumerate_terms(&sig, ctx + a, cfg.depth, Some(6)).0)
            .collect();
        if arg_terms.iter().any(|l| l.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; arg_terms.len()];
        let mut tuples = Vec::new();
        loop {
            tuples.push(idx.clone());
            if tuples.len() >= 20 {
                break;
            }
            let mut k = idx.len();
            let mut done = true;
            while k > 0 {
                k -= 1;
                idx[k] += 1;
                if idx[k] < arg_terms[k].len() {
                    done = false;
                    break;
                }
                idx[k] = 0;
            }
            if done {
                break;
            }
        }
        for tuple in &tuples {
            let args: Vec<M::Elem> = tuple
                .iter()
                .zip(&arg_terms)
                .zip(arity.entries())
                .map(|((&i, l), &a)| fold(&l[i], m, ctx + a))
                .collect::<Result<Vec<_>>>()?;
            // spread the sample so every env position actually varies
            let stride = usize::max(1, envs.len() / 6);
            for env in envs.iter().step_by(stride).take(6) {
                let lhs = m.subst(&m.action(ctx, &op.name, &args), env, ctx);
                let sub_args: Vec<M::Elem> = args
                    .iter()
                    .zip(arity.entries())
                    .map(|(arg, &a)| {
                        let mut lifted: Vec<M::Elem> =
                            (0..a).map(|j| m.var(ctx + a, j)).collect();
                        let shift: Vec<M::Elem> =
                            (0..ctx).map(|j| m.var(ctx + a, j + a)).collect();
                        lifted.extend(env.iter().map(|e| m.subst(e, &shift, ctx + a)));
                        m.subst(arg, &lifted, ctx + a)
                    })
                    .collect();
                let rhs = m.action(ctx, &op.name, &sub_args);
                report.record(m.equal(&lhs, &rhs), || {
                    format!("action of `{}` is not substitution-linear", op.name)
                });
            }
        }
    }
    Ok(report)
}

/// Checks that folding commutes with substitution, and (when a rule set is
/// supplied) that the model identifies rewrite-related terms — together, that
/// the fold is a morphism out of the quotient.
pub fn check_fold_is_morphism<M: ModelHooks>(
    m: &M,
    rules: Option<&RuleSet>,
    cfg: &LawsConfig,
) -> Result<LawsReport> {
    let sig = m.signature().clone();
    let ctx = cfg.ctx;
    let mut report = LawsReport::default();
    let (terms, _) = enumerate_terms(&sig, ctx, cfg.depth, Some(cfg.budget));
    let envs = term_envs(&sig, ctx, cfg.env_depth, 12);
    for t in &terms {
        for env in &envs {
            let substituted = term_subst(t, &sig, env)?;
            let lhs = fold(&substituted, m, ctx)?;
            let folded_env: Vec<M::Elem> = env
                .iter()
                .map(|e| fold(e, m, ctx))
                .collect::<Result<Vec<_>>>()?;
            let rhs = m.subst(&fold(t, m, ctx)?, &folded_env, ctx);
            report.record(m.equal(&lhs, &rhs), || {
                format!("fold does not commute with substitution at {}", render_term(t))
            });
            if report.checks >= cfg.budget {
                break;
            }
        }
        if report.checks >= cfg.budget {
            break;
        }
    }
    if let Some(rules) = rules {
        for t in &terms {
            let ft = fold(t, m, ctx)?;
            for t2 in rules.all_steps(t, ctx) {
                report.record(m.equal(&ft, &fold(&t2, m, ctx)?), || {
                    format!(
                        "fold distinguishes rewrite-related terms {} and {}",
                        render_term(t),
                        render_term(&t2)
                    )
                });
            }
        }
    }
    Ok(report)
}

/// Checks amalgamation for a pushout of 2-signatures: the two composites
/// base → pushout agree in the pushout's quotient, the injections cover the
/// pushout signature, and they are injective on operations.
pub fn check_modularity(
    base: &TwoSignature,
    f: &SignatureMorphism,
    g: &SignatureMorphism,
    pushout: &TwoSignature,
    inl: &SignatureMorphism,
    inr: &SignatureMorphism,
    rules: &RuleSet,
    fuel: usize,
    cfg: &LawsConfig,
) -> Result<LawsReport> {
    let mut report = LawsReport::default();

    // coverage: every pushout op is hit by an injection
    let lmap = inl
        .renaming_map()
        .ok_or_else(|| Error::Type("pushout injections must be renamings".into()))?;
    let rmap = inr
        .renaming_map()
        .ok_or_else(|| Error::Type("pushout injections must be renamings".into()))?;
    for op in pushout.sig.ops() {
        report.record(
            if lmap.values().any(|v| v == &op.name) || rmap.values().any(|v| v == &op.name) {
                EqVerdict::Equal
            } else {
                EqVerdict::Distinct
            },
            || format!("pushout op `{}` is not in the image of either leg", op.name),
        );
    }
    // injectivity of each injection on operations
    for (label, map) in [("left", &lmap), ("right", &rmap)] {
        let mut images: Vec<&String> = map.values().collect();
        images.sort();
        images.dedup();
        report.record(
            if images.len() == map.len() {
                EqVerdict::Equal
            } else {
                EqVerdict::Distinct
            },
            || format!("{label} injection merges operations"),
        );
    }

    // agreement: both composites base → pushout identify every base term
    let via_left = f.then_renaming(inl)?;
    let via_right = g.then_renaming(inr)?;
    let target = SyntacticModel::new(pushout.sig.clone());
    let left_model = TranslationModel::new(&via_left, &target);
    let right_model = TranslationModel::new(&via_right, &target);
    let (base_terms, _) = enumerate_terms(&base.sig, cfg.ctx, cfg.depth, Some(cfg.budget));
    for t in &base_terms {
        let l = fold(t, &left_model, cfg.ctx)?;
        let r = fold(t, &right_model, cfg.ctx)?;
        let (verdict, _) = rules.joinable(&l, &r, cfg.ctx, fuel);
        // the glue equation is unoriented, so fall back to the congruence
        // oracle when plain joinability cannot see it
        let verdict = if verdict == EqVerdict::Equal {
            verdict
        } else {
            crate::congruence::congruence_oracle(
                pushout,
                &l,
                &r,
                cfg.ctx,
                &crate::congruence::CongruenceConfig::default(),
            )?
        };
        report.record(
            match verdict {
                EqVerdict::Equal => EqVerdict::Equal,
                // inability to confirm is reported as unknown, not failure
                _ => EqVerdict::Unknown,
            },
            String::new,
        );
        // still surface hard disagreements in normal form
        if verdict == EqVerdict::Distinct {
            report.violations.push(format!(
                "base term {} maps to visibly distinct classes {} and {}",
                render_term(t),
                render_term(&l),
                render_term(&r)
            ));
        }
    }
    Ok(report)
}

/// Reads `identity_env` through a model.
pub fn model_identity_env<M: ModelHooks>(m: &M, ctx: usize) -> Vec<M::Elem> {
    identity_env(ctx)
        .iter()
        .map(|t| fold(t, m, ctx).expect("variables fold"))
        .collect()
}
