//! Ready-made 2-signatures: monoids, the λ-calculus with βη, an explicit
//! fixpoint operator, their combination, and a few first-order theories.
//! Also the translation model that eliminates the fixpoint operator through
//! a fixpoint combinator.

use crate::equation::{compile_rules, Equation, Orientation};
use crate::error::Result;
use crate::modcalc::{ModuleExpr, MorphismExpr};
use crate::model::{EqVerdict, ModelHooks, QuotientModel};
use crate::rewrite::{Regime, RuleSet};
use crate::signature::{
    pushout_as_algebraic, AlgebraicSignature, SignatureMorphism, TwoSignature,
};
use crate::term::{subst as term_subst, Term};

/// A 2-signature packaged with the equality regime of its presentation and a
/// default fuel for bounded searches.
#[derive(Debug, Clone)]
pub struct ExampleBundle {
    pub name: String,
    pub two: TwoSignature,
    pub regime: Regime,
    pub fuel: usize,
}

impl ExampleBundle {
    pub fn rules(&self) -> Result<RuleSet> {
        compile_rules(&self.two)
    }

    pub fn quotient(&self) -> Result<QuotientModel> {
        Ok(QuotientModel::new(self.rules()?, self.regime, self.fuel))
    }
}

fn theta() -> ModuleExpr {
    ModuleExpr::Theta
}

fn theta1() -> ModuleExpr {
    ModuleExpr::theta_deriv(1)
}

/// `app₁ : Θ → Θ′`: apply a weakened term to the fresh variable.
pub fn app_partial(sig: &AlgebraicSignature) -> MorphismExpr {
    MorphismExpr::curry(MorphismExpr::op_apply(
        sig,
        "app",
        vec![MorphismExpr::Proj(0), MorphismExpr::Proj(1)],
    ))
}

/// A unary binder op as a morphism `Θ′ → Θ`.
pub fn binder_ref(sig: &AlgebraicSignature, op: &str) -> MorphismExpr {
    MorphismExpr::comp(
        MorphismExpr::op_ref(sig.clone(), op),
        MorphismExpr::Tuple(vec![MorphismExpr::Id(theta1())]),
    )
}

pub fn lc_signature() -> AlgebraicSignature {
    AlgebraicSignature::new(vec![("app", [0, 0].into()), ("abs", [1].into())]).unwrap()
}

pub fn beta_equation(sig: &AlgebraicSignature) -> Equation {
    Equation::new(
        "beta",
        theta1(),
        theta1(),
        MorphismExpr::comp(app_partial(sig), binder_ref(sig, "abs")),
        MorphismExpr::Id(theta1()),
        Orientation::LeftToRight,
        sig,
    )
    .expect("β typechecks")
}

pub fn eta_equation(sig: &AlgebraicSignature) -> Equation {
    Equation::new(
        "eta",
        theta(),
        theta(),
        MorphismExpr::comp(binder_ref(sig, "abs"), app_partial(sig)),
        MorphismExpr::Id(theta()),
        Orientation::LeftToRight,
        sig,
    )
    .expect("η typechecks")
}

/// λ-calculus with βη: confluent, nonterminating.
pub fn lc_beta_eta() -> ExampleBundle {
    let sig = lc_signature();
    let two = TwoSignature::new(sig.clone(), vec![beta_equation(&sig), eta_equation(&sig)])
        .expect("equations validate");
    ExampleBundle {
        name: "lc".into(),
        two,
        regime: Regime::Confluent,
        fuel: 1000,
    }
}

pub fn fix_equation(sig: &AlgebraicSignature) -> Equation {
    let fix1 = binder_ref(sig, "fix");
    // σ∘⟨id, fix⟩ = fix, oriented to unfold the fixpoint
    Equation::new(
        "fix",
        theta1(),
        theta(),
        MorphismExpr::comp(
            MorphismExpr::SigmaSubst,
            MorphismExpr::Tuple(vec![MorphismExpr::Id(theta1()), fix1.clone()]),
        ),
        fix1,
        Orientation::RightToLeft,
        sig,
    )
    .expect("fixpoint equation typechecks")
}

/// A lone binding fixpoint operator with its unfolding equation.
pub fn fixpoint() -> ExampleBundle {
    let sig = AlgebraicSignature::new(vec![("fix", [1].into())]).unwrap();
    let two =
        TwoSignature::new(sig.clone(), vec![fix_equation(&sig)]).expect("equation validates");
    ExampleBundle {
        name: "fix".into(),
        two,
        regime: Regime::Confluent,
        fuel: 1000,
    }
}

/// λ-calculus with βη plus the fixpoint operator, assembled as the pushout
/// of the two bundles over the empty base.
pub fn lc_fix() -> ExampleBundle {
    let (two, _, _) = lc_fix_pushout();
    ExampleBundle {
        name: "lc_fix".into(),
        two,
        regime: Regime::Confluent,
        fuel: 1000,
    }
}

/// The pushout itself, with its injections.
pub fn lc_fix_pushout() -> (TwoSignature, SignatureMorphism, SignatureMorphism) {
    let base = TwoSignature::new(AlgebraicSignature::empty(), vec![]).unwrap();
    let lc = lc_beta_eta();
    let fix = fixpoint();
    let f = SignatureMorphism::new(AlgebraicSignature::empty(), lc.two.sig.clone(), vec![])
        .unwrap();
    let g = SignatureMorphism::new(AlgebraicSignature::empty(), fix.two.sig.clone(), vec![])
        .unwrap();
    pushout_as_algebraic(&base, (&f, &lc.two), (&g, &fix.two)).expect("pushout assembles")
}

/// First-order terms over numbered variables, for presenting theories whose
/// operations bind nothing.
#[derive(Debug, Clone)]
pub enum FoTerm {
    Var(usize),
    Op(String, Vec<FoTerm>),
}

impl FoTerm {
    pub fn v(i: usize) -> FoTerm {
        FoTerm::Var(i)
    }

    pub fn op(name: &str, args: Vec<FoTerm>) -> FoTerm {
        FoTerm::Op(name.to_string(), args)
    }

    fn to_morphism(&self, sig: &AlgebraicSignature) -> MorphismExpr {
        match self {
            FoTerm::Var(i) => MorphismExpr::Proj(*i),
            FoTerm::Op(name, args) => MorphismExpr::op_apply(
                sig,
                name,
                args.iter().map(|a| a.to_morphism(sig)).collect(),
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FoEquation {
    pub name: String,
    pub vars: usize,
    pub lhs: FoTerm,
    pub rhs: FoTerm,
    pub orientation: Orientation,
}

/// An algebraic (no-binding) theory as a bundle.
pub fn algebraic_theory(
    name: &str,
    ops: &[(&str, usize)],
    equations: &[FoEquation],
    regime: Regime,
    fuel: usize,
) -> Result<ExampleBundle> {
    let sig = AlgebraicSignature::new(
        ops.iter()
            .map(|&(n, k)| (n, vec![0; k].into()))
            .collect(),
    )?;
    let eqs = equations
        .iter()
        .map(|e| {
            Equation::new(
                e.name.clone(),
                ModuleExpr::Prod(vec![theta(); e.vars]),
                theta(),
                e.lhs.to_morphism(&sig),
                e.rhs.to_morphism(&sig),
                e.orientation,
                &sig,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let two = TwoSignature::new(sig, eqs)?;
    Ok(ExampleBundle {
        name: name.to_string(),
        two,
        regime,
        fuel,
    })
}

/// Monoids: associativity oriented to right-nest, units removed.
pub fn monoid() -> ExampleBundle {
    use FoTerm as F;
    let m = |a, b| F::op("m", vec![a, b]);
    algebraic_theory(
        "monoid",
        &[("m", 2), ("e", 0)],
        &[
            FoEquation {
                name: "assoc".into(),
                vars: 3,
                lhs: m(m(F::v(0), F::v(1)), F::v(2)),
                rhs: m(F::v(0), m(F::v(1), F::v(2))),
                orientation: Orientation::LeftToRight,
            },
            FoEquation {
                name: "unitL".into(),
                vars: 1,
                lhs: m(F::op("e", vec![]), F::v(0)),
                rhs: F::v(0),
                orientation: Orientation::LeftToRight,
            },
            FoEquation {
                name: "unitR".into(),
                vars: 1,
                lhs: m(F::v(0), F::op("e", vec![])),
                rhs: F::v(0),
                orientation: Orientation::LeftToRight,
            },
        ],
        Regime::Terminating,
        1000,
    )
    .expect("monoid presentation is well-formed")
}

/// A commutative binary operation: inherently unoriented.
pub fn commutative() -> ExampleBundle {
    use FoTerm as F;
    algebraic_theory(
        "commutative",
        &[("plus", 2)],
        &[FoEquation {
            name: "comm".into(),
            vars: 2,
            lhs: F::op("plus", vec![F::v(0), F::v(1)]),
            rhs: F::op("plus", vec![F::v(1), F::v(0)]),
            orientation: Orientation::Unoriented,
        }],
        Regime::Unoriented,
        1000,
    )
    .expect("commutative presentation is well-formed")
}

/// An idempotent unary operation: `u(u(x)) = u(x)`, terminating.
pub fn idempotent() -> ExampleBundle {
    use FoTerm as F;
    algebraic_theory(
        "idempotent",
        &[("u", 1)],
        &[FoEquation {
            name: "idem".into(),
            vars: 1,
            lhs: F::op("u", vec![F::op("u", vec![F::v(0)])]),
            rhs: F::op("u", vec![F::v(0)]),
            orientation: Orientation::LeftToRight,
        }],
        Regime::Terminating,
        1000,
    )
    .expect("idempotent presentation is well-formed")
}

/// Curry's fixpoint combinator `λf.(λx.f (x x)) (λx.f (x x))`.
pub fn y_combinator() -> Term {
    let inner = Term::Con(
        "abs".into(),
        vec![Term::Con(
            "app".into(),
            vec![
                Term::Var(1),
                Term::Con("app".into(), vec![Term::Var(0), Term::Var(0)]),
            ],
        )],
    );
    Term::Con("abs".into(), vec![Term::Con("app".into(), vec![inner.clone(), inner])])
}

/// A model of the λ-calculus-with-fixpoint signature carried by plain
/// λ-terms: `app` and `abs` are themselves, `fix t` becomes `app(Y, abs t)`,
/// and equality is βη-joinability.
pub struct FixIntoLc {
    source: AlgebraicSignature,
    lc: AlgebraicSignature,
    rules: RuleSet,
    pub fuel: usize,
}

impl FixIntoLc {
    pub fn new(fuel: usize) -> Result<Self> {
        let lc = lc_beta_eta();
        Ok(FixIntoLc {
            source: lc_fix().two.sig,
            lc: lc.two.sig.clone(),
            rules: lc.rules()?,
            fuel,
        })
    }
}

impl ModelHooks for FixIntoLc {
    type Elem = Term;

    fn signature(&self) -> &AlgebraicSignature {
        &self.source
    }

    fn var(&self, _ctx: usize, i: usize) -> Term {
        Term::Var(i)
    }

    fn subst(&self, t: &Term, env: &[Term], _target_ctx: usize) -> Term {
        term_subst(t, &self.lc, env).expect("well-scoped substitution")
    }

    fn action(&self, _ctx: usize, op: &str, args: &[Term]) -> Term {
        match op {
            "app" | "abs" => Term::Con(op.to_string(), args.to_vec()),
            // the combinator is closed, so no shifting is needed
            "fix" => Term::Con(
                "app".into(),
                vec![
                    y_combinator(),
                    Term::Con("abs".into(), vec![args[0].clone()]),
                ],
            ),
            other => panic!("no interpretation for `{other}`"),
        }
    }

    fn equal(&self, a: &Term, b: &Term) -> EqVerdict {
        let ctx = usize::max(
            crate::term::needed_ctx(a, &self.lc),
            crate::term::needed_ctx(b, &self.lc),
        );
        let (verdict, _) = self.rules.joinable(a, b, ctx, self.fuel);
        verdict
    }

    fn render(&self, t: &Term) -> String {
        crate::model::render_term(t)
    }
}
