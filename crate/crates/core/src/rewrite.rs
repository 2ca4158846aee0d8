//! Second-order rewriting with Miller-pattern left-hand sides.
//!
//! A rule's pattern and template are terms compiled at context 0 whose
//! metavariables carry injective renamings into the pattern's binders.  A
//! redex at ambient context `n` matches when every pattern-bound variable a
//! subterm uses is listed in the metavariable's renaming; ambient variables
//! always pass through.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::model::EqVerdict;
use crate::signature::AlgebraicSignature;
use crate::term::{rename, subst, Term};

/// How equality is decided in the quotient presented by a rule set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Rewriting terminates: normalize and compare, verdicts are definitive.
    Terminating,
    /// Confluent but possibly nonterminating: bounded joinability search.
    Confluent,
    /// No orientation at all: only the congruence-closure oracle applies.
    Unoriented,
}

#[derive(Debug, Clone)]
pub struct RewriteRule {
    pub name: String,
    pub pattern: Term,
    pub template: Term,
    /// Some metavariable occurs twice in the pattern; matched by syntactic
    /// equality of the solutions.
    pub nonlinear: bool,
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    pub sig: AlgebraicSignature,
    pub rules: Vec<RewriteRule>,
}

/// Solutions for metavariables.  A solution for a metavariable with renaming
/// of length `k`, found at ambient context `n`, lives over context `k + n`.
type Bindings = HashMap<String, Term>;

impl RuleSet {
    pub fn new(sig: AlgebraicSignature, rules: Vec<RewriteRule>) -> Self {
        RuleSet { sig, rules }
    }

    /// Matches `pattern` against ground `s`, both at binder depth `b` below
    /// the redex root, redex root at ambient context `n`.
    fn match_term(
        &self,
        pattern: &Term,
        s: &Term,
        b: usize,
        n: usize,
        bindings: &mut Bindings,
    ) -> bool {
        match pattern {
            Term::Var(i) => s == &Term::Var(*i),
            Term::Con(op, pargs) => match s {
                Term::Con(sop, sargs) if sop == op && sargs.len() == pargs.len() => {
                    let arity = self.sig.arity(op).expect("op in signature").entries().to_vec();
                    pargs
                        .iter()
                        .zip(sargs)
                        .zip(&arity)
                        .all(|((p, t), &a)| self.match_term(p, t, b + a, n, bindings))
                }
                _ => false,
            },
            Term::Meta { id, renaming } => {
                // every pattern-bound variable of s must be in the renaming
                let mut ok = true;
                s.for_each_free(&self.sig, &mut |i| {
                    if i < b && !renaming.contains(&i) {
                        ok = false;
                    }
                });
                if !ok {
                    return false;
                }
                let k = renaming.len();
                // solution over context k + n: renamed bound vars first,
                // then the ambient context
                let mut map = vec![0usize; b + n];
                for (pos, &i) in renaming.iter().enumerate() {
                    map[i] = pos;
                }
                for m in 0..n {
                    map[b + m] = k + m;
                }
                let sol = match rename(s, &self.sig, &map) {
                    Ok(sol) => sol,
                    Err(_) => return false,
                };
                match bindings.get(id) {
                    Some(prev) => prev == &sol,
                    None => {
                        bindings.insert(id.clone(), sol);
                        true
                    }
                }
            }
            Term::Subst { .. } => false,
        }
    }

    /// Builds the contractum from a template at binder depth `b`, ambient
    /// context `n`.
    fn instantiate(&self, template: &Term, b: usize, n: usize, bindings: &Bindings) -> Result<Term> {
        match template {
            Term::Var(i) => Ok(Term::Var(*i)),
            Term::Con(op, args) => {
                let arity = self.sig.arity(op)?.entries().to_vec();
                Ok(Term::Con(
                    op.clone(),
                    args.iter()
                        .zip(&arity)
                        .map(|(arg, &a)| self.instantiate(arg, b + a, n, bindings))
                        .collect::<Result<Vec<_>>>()?,
                ))
            }
            Term::Meta { id, renaming } => {
                let sol = bindings
                    .get(id)
                    .ok_or_else(|| Error::NotGround(format!("unsolved metavariable `{id}`")))?;
                let k = renaming.len();
                // solution context k + n back into b + n
                let mut map = Vec::with_capacity(k + n);
                map.extend(renaming.iter().copied());
                map.extend((0..n).map(|m| b + m));
                rename(sol, &self.sig, &map)
            }
            Term::Subst { body, env } => {
                // explicit substitution: realize it now that metas are solved
                let inst_env: Vec<Term> = env
                    .iter()
                    .map(|e| self.instantiate(e, b, n, bindings))
                    .collect::<Result<Vec<_>>>()?;
                let inner = env.len();
                let inst_body = self.instantiate(body, inner, n, bindings)?;
                let mut full_env = inst_env;
                full_env.extend((0..n).map(|m| Term::Var(b + m)));
                subst(&inst_body, &self.sig, &full_env)
            }
        }
    }

    /// Applies `rule` at the root of `t` (ambient context `n`).
    fn try_rule_at(&self, rule: &RewriteRule, t: &Term, n: usize) -> Option<Term> {
        let mut bindings = Bindings::new();
        if !self.match_term(&rule.pattern, t, 0, n, &mut bindings) {
            return None;
        }
        let out = self
            .instantiate(&rule.template, 0, n, &bindings)
            .expect("template metavariables are covered by the pattern");
        debug_assert!(out.is_ground());
        Some(out)
    }

    /// One leftmost-outermost step: rules in declaration order at the root,
    /// then arguments left to right.
    pub fn rewrite_step(&self, t: &Term, ctx: usize) -> Option<Term> {
        for rule in &self.rules {
            if let Some(out) = self.try_rule_at(rule, t, ctx) {
                return Some(out);
            }
        }
        if let Term::Con(op, args) = t {
            let arity = self.sig.arity(op).expect("op in signature").entries().to_vec();
            for (i, (arg, &a)) in args.iter().zip(&arity).enumerate() {
                if let Some(new_arg) = self.rewrite_step(arg, ctx + a) {
                    let mut new_args = args.clone();
                    new_args[i] = new_arg;
                    return Some(Term::Con(op.clone(), new_args));
                }
            }
        }
        None
    }

    /// Normalizes with at most `fuel` steps.  The flag reports fuel
    /// exhaustion with the term still reducible.
    pub fn normalize(&self, t: &Term, ctx: usize, fuel: usize) -> (Term, bool) {
        let mut cur = t.clone();
        for _ in 0..fuel {
            match self.rewrite_step(&cur, ctx) {
                Some(next) => cur = next,
                None => return (cur, false),
            }
        }
        let exhausted = self.rewrite_step(&cur, ctx).is_some();
        (cur, exhausted)
    }

    /// One-step rewrites at the root position only, one per matching rule.
    pub fn root_steps(&self, t: &Term, ctx: usize) -> Vec<Term> {
        self.rules
            .iter()
            .filter_map(|rule| self.try_rule_at(rule, t, ctx))
            .collect()
    }

    /// All one-step rewrites of `t` at every position, every rule.
    pub fn all_steps(&self, t: &Term, ctx: usize) -> Vec<Term> {
        let mut out = Vec::new();
        for rule in &self.rules {
            if let Some(r) = self.try_rule_at(rule, t, ctx) {
                out.push(r);
            }
        }
        if let Term::Con(op, args) = t {
            let arity = self.sig.arity(op).expect("op in signature").entries().to_vec();
            for (i, (arg, &a)) in args.iter().zip(&arity).enumerate() {
                for new_arg in self.all_steps(arg, ctx + a) {
                    let mut new_args = args.clone();
                    new_args[i] = new_arg;
                    out.push(Term::Con(op.clone(), new_args));
                }
            }
        }
        out
    }

    /// Bounded joinability: breadth-first reachability from both sides under
    /// all-position rewriting.  `fuel` bounds the total number of node
    /// expansions.  `Distinct` is only reported when both reachability sets
    /// were fully explored without meeting.
    pub fn joinable(&self, a: &Term, b: &Term, ctx: usize, fuel: usize) -> (EqVerdict, bool) {
        let mut seen_a: HashSet<Term> = HashSet::new();
        let mut seen_b: HashSet<Term> = HashSet::new();
        let mut queue_a: VecDeque<Term> = VecDeque::new();
        let mut queue_b: VecDeque<Term> = VecDeque::new();
        seen_a.insert(a.clone());
        seen_b.insert(b.clone());
        if a == b {
            return (EqVerdict::Equal, false);
        }
        queue_a.push_back(a.clone());
        queue_b.push_back(b.clone());
        let mut budget = fuel;
        // strictly alternate sides: biasing toward the smaller frontier can
        // starve the other side when one graph keeps cycling into seen terms
        let mut turn_a = false;
        while !queue_a.is_empty() || !queue_b.is_empty() {
            if budget == 0 {
                return (EqVerdict::Unknown, true);
            }
            turn_a = !turn_a;
            let expand_a = match (queue_a.is_empty(), queue_b.is_empty()) {
                (false, true) => true,
                (true, false) => false,
                _ => turn_a,
            };
            budget -= 1;
            let (queue, seen, other_seen) = if expand_a {
                (&mut queue_a, &mut seen_a, &seen_b)
            } else {
                (&mut queue_b, &mut seen_b, &seen_a)
            };
            let node = queue.pop_front().expect("frontier nonempty");
            for succ in self.all_steps(&node, ctx) {
                if other_seen.contains(&succ) {
                    return (EqVerdict::Equal, false);
                }
                if seen.insert(succ.clone()) {
                    queue.push_back(succ);
                }
            }
        }
        (EqVerdict::Distinct, false)
    }
    /// Confluence falsification aid: for every enumerated term, compare the
    /// normal form reached from each one-step successor.  Returns triples
    /// `(term, nf1, nf2)` with two distinct fully-reduced normal forms.
    /// Finding none proves nothing; finding one disproves confluence.
    pub fn unique_normal_form_violations(
        &self,
        ctx: usize,
        depth: usize,
        fuel: usize,
        budget: usize,
    ) -> Vec<(Term, Term, Term)> {
        let (terms, _) = crate::term::enumerate_terms(&self.sig, ctx, depth, Some(budget));
        let mut violations = Vec::new();
        for t in &terms {
            let mut nf: Option<Term> = None;
            for succ in self.all_steps(t, ctx) {
                let (cand, exhausted) = self.normalize(&succ, ctx, fuel);
                if exhausted {
                    continue;
                }
                match &nf {
                    None => nf = Some(cand),
                    Some(prev) if *prev != cand => {
                        violations.push((t.clone(), prev.clone(), cand));
                        break;
                    }
                    Some(_) => {}
                }
            }
        }
        violations
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::scope_check;

    fn lc() -> AlgebraicSignature {
        AlgebraicSignature::new(vec![("app", [0, 0].into()), ("abs", [1].into())]).unwrap()
    }

    /// The β rule written by hand:
    /// `app(abs(M), U) → M[*≔U]` as `Subst{body: M[0], env: [U]}`.
    fn beta_rules() -> RuleSet {
        let pattern = Term::Con(
            "app".into(),
            vec![
                Term::Con("abs".into(), vec![Term::meta("M", vec![0])]),
                Term::meta("U", vec![]),
            ],
        );
        let template = Term::Subst {
            body: Box::new(Term::meta("M", vec![0])),
            env: vec![Term::meta("U", vec![])],
        };
        RuleSet::new(
            lc(),
            vec![RewriteRule {
                name: "beta".into(),
                pattern,
                template,
                nonlinear: false,
            }],
        )
    }

    fn eta_rule() -> RewriteRule {
        // abs(app(M, var 0)) → M, where M must not use the bound variable
        let pattern = Term::Con(
            "abs".into(),
            vec![Term::Con(
                "app".into(),
                vec![Term::meta("M", vec![]), Term::Var(0)],
            )],
        );
        RewriteRule {
            name: "eta".into(),
            pattern,
            template: Term::meta("M", vec![]),
            nonlinear: false,
        }
    }

    fn app(a: Term, b: Term) -> Term {
        Term::Con("app".into(), vec![a, b])
    }

    fn abs(a: Term) -> Term {
        Term::Con("abs".into(), vec![a])
    }

    #[test]
    fn beta_identity_application() {
        let rules = beta_rules();
        // (λx.x) y → y at ctx 1
        let t = app(abs(Term::Var(0)), Term::Var(0));
        let (nf, exhausted) = rules.normalize(&t, 1, 10);
        assert_eq!(nf, Term::Var(0));
        assert!(!exhausted);
    }

    #[test]
    fn beta_discards_and_duplicates() {
        let rules = beta_rules();
        // (λx. y) z → y at ctx 2 (x unused, ambient y=0 z=1)
        let t = app(abs(Term::Var(1)), Term::Var(1));
        assert_eq!(rules.normalize(&t, 2, 10).0, Term::Var(0));
        // (λx. x x) y → y y
        let dup = app(abs(app(Term::Var(0), Term::Var(0))), Term::Var(0));
        assert_eq!(
            rules.normalize(&dup, 1, 10).0,
            app(Term::Var(0), Term::Var(0))
        );
    }

    #[test]
    fn beta_under_binder_shifts_ambient() {
        let rules = beta_rules();
        // λy. ((λx. x) y)  → λy. y
        let t = abs(app(abs(Term::Var(0)), Term::Var(0)));
        assert_eq!(rules.normalize(&t, 0, 10).0, abs(Term::Var(0)));
        // λy. ((λx. y) z) at ctx 1 (z ambient) → λy. y
        let t = abs(app(abs(Term::Var(1)), Term::Var(1)));
        let nf = rules.normalize(&t, 1, 10).0;
        assert_eq!(nf, abs(Term::Var(0)));
        scope_check(&nf, &lc(), 1).unwrap();
    }

    #[test]
    fn eta_side_condition_via_empty_renaming() {
        let mut rules = beta_rules();
        rules.rules.push(eta_rule());
        // λx. (y x) → y: M solved as the ambient var
        let t = abs(app(Term::Var(1), Term::Var(0)));
        assert_eq!(rules.normalize(&t, 1, 10).0, Term::Var(0));
        // λx. (x x) must NOT η-contract (M would capture the binder), and it
        // is β-normal
        let t = abs(app(Term::Var(0), Term::Var(0)));
        assert_eq!(rules.normalize(&t, 0, 10).0, t);
    }

    #[test]
    fn omega_exhausts_fuel() {
        let rules = beta_rules();
        let omega = abs(app(Term::Var(0), Term::Var(0)));
        let t = app(omega.clone(), omega);
        let (nf, exhausted) = rules.normalize(&t, 0, 25);
        assert!(exhausted);
        assert_eq!(nf, app(abs(app(Term::Var(0), Term::Var(0))), abs(app(Term::Var(0), Term::Var(0)))));
    }

    #[test]
    fn joinable_on_church_numerals() {
        let rules = beta_rules();
        // two ≡ λf.λx. f (f x)
        let two = abs(abs(app(Term::Var(1), app(Term::Var(1), Term::Var(0)))));
        // succ one ≡ (λn.λf.λx. f (n f x)) (λf.λx. f x)
        let succ = abs(abs(abs(app(
            Term::Var(1),
            app(app(Term::Var(2), Term::Var(1)), Term::Var(0)),
        ))));
        let one = abs(abs(app(Term::Var(1), Term::Var(0))));
        let t = app(succ, one);
        let (verdict, _) = rules.joinable(&t, &two, 0, 500);
        assert_eq!(verdict, EqVerdict::Equal);
    }

    #[test]
    fn joinable_distinct_normal_forms() {
        let rules = beta_rules();
        let x = Term::Var(0);
        let y = Term::Var(1);
        let (verdict, exhausted) = rules.joinable(&x, &y, 2, 100);
        assert_eq!(verdict, EqVerdict::Distinct);
        assert!(!exhausted);
    }

    #[test]
    fn joinable_fuel_exhaustion_is_unknown() {
        let rules = beta_rules();
        // (λx. x x x) (λx. x x x) grows forever, so neither reduction graph
        // can be fully explored
        let grow = abs(app(app(Term::Var(0), Term::Var(0)), Term::Var(0)));
        let t = app(grow.clone(), grow);
        let (verdict, exhausted) = rules.joinable(&t, &Term::Var(0), 1, 30);
        assert_eq!(verdict, EqVerdict::Unknown);
        assert!(exhausted);
    }

    #[test]
    fn omega_loop_has_a_finite_graph() {
        // Ω steps to itself, so its graph is fully explored and genuinely
        // distinct from a normal variable
        let rules = beta_rules();
        let omega = abs(app(Term::Var(0), Term::Var(0)));
        let t = app(omega.clone(), omega);
        let (verdict, exhausted) = rules.joinable(&t, &Term::Var(0), 1, 30);
        assert_eq!(verdict, EqVerdict::Distinct);
        assert!(!exhausted);
    }

    #[test]
    fn all_steps_finds_inner_redexes() {
        let rules = beta_rules();
        // app(redex, redex): two one-step successors
        let r = app(abs(Term::Var(0)), Term::Var(0));
        let t = app(r.clone(), r.clone());
        let steps = rules.all_steps(&t, 1);
        assert_eq!(steps.len(), 2);
        assert!(steps.contains(&app(Term::Var(0), r.clone())));
        assert!(steps.contains(&app(r, Term::Var(0))));
    }

    #[test]
    fn beta_eta_has_no_unique_nf_violations_at_small_depth() {
        let mut rules = beta_rules();
        rules.rules.push(eta_rule());
        assert!(rules.unique_normal_form_violations(2, 3, 50, 300).is_empty());
    }

    #[test]
    fn competing_rules_are_reported_as_nonconfluent() {
        // two rules collapsing the same redex differently
        let mk = |name: &str, to: usize| RewriteRule {
            name: name.into(),
            pattern: app(Term::meta("A", vec![]), Term::meta("B", vec![])),
            template: Term::meta(if to == 0 { "A" } else { "B" }, vec![]),
            nonlinear: false,
        };
        let rules = RuleSet::new(lc(), vec![mk("first", 0), mk("second", 1)]);
        assert!(!rules.unique_normal_form_violations(2, 2, 10, 100).is_empty());
    }

    #[test]
    fn nonlinear_pattern_requires_equal_solutions() {
        // first-order idempotence-like rule: app(M, M) → M
        let rules = RuleSet::new(
            lc(),
            vec![RewriteRule {
                name: "collapse".into(),
                pattern: app(Term::meta("M", vec![]), Term::meta("M", vec![])),
                template: Term::meta("M", vec![]),
                nonlinear: true,
            }],
        );
        let t = app(Term::Var(0), Term::Var(0));
        assert_eq!(rules.rewrite_step(&t, 1), Some(Term::Var(0)));
        let t = app(Term::Var(0), Term::Var(1));
        assert_eq!(rules.rewrite_step(&t, 2), None);
    }
}
