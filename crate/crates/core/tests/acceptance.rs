//! The acceptance gate: nine end-to-end checks, each printing one pass/fail
//! line.  Every check compares the library against an independent oracle or
//! an exhaustively enumerated ground truth.

mod common;

use std::collections::HashMap;
use std::path::PathBuf;

use bindsig::bundles::{self, FixIntoLc};
use bindsig::congruence::{congruence_classes, congruence_oracle, class_count, CongruenceConfig};
use bindsig::equation::{compile_rule, compile_rules, satisfies};
use bindsig::json::{document_to_json, to_canonical_string, SignatureDocument};
use bindsig::model::{
    check_modularity, fold, LawsConfig, ModelHooks, QuotientModel, SyntacticModel,
};
use bindsig::rewrite::{Regime, RuleSet};
use bindsig::sample;
use bindsig::signature::{
    pushout_as_algebraic, AlgebraicSignature, SignatureMorphism, TwoSignature,
};
use bindsig::term::{enumerate_terms, identity_env, subst, Term};
use bindsig::EqVerdict;

use common::{
    alpha_eq, church, church_plus, church_times, count_terms, db_to_named, flatten,
    named_normalize, word_to_right_nested,
};

fn conclude(number: usize, what: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("acceptance {number} ({what}): PASS");
    } else {
        println!("acceptance {number} ({what}): FAIL");
        for f in failures.iter().take(10) {
            println!("  {f}");
        }
        panic!("acceptance {number} ({what}) failed with {} problems", failures.len());
    }
}

fn all_bundles() -> Vec<bundles::ExampleBundle> {
    vec![
        bundles::monoid(),
        bundles::lc_beta_eta(),
        bundles::fixpoint(),
        bundles::lc_fix(),
        bundles::commutative(),
        bundles::idempotent(),
    ]
}

/// All environments mapping `ctx` variables to terms of height <= `depth`.
fn all_envs(sig: &AlgebraicSignature, ctx: usize, depth: usize) -> Vec<Vec<Term>> {
    let (entries, truncated) = enumerate_terms(sig, ctx, depth, None);
    assert!(!truncated);
    let mut envs: Vec<Vec<Term>> = vec![Vec::new()];
    for _ in 0..ctx {
        envs = envs
            .iter()
            .flat_map(|prefix| {
                entries.iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect();
    }
    envs
}

#[test]
fn acceptance_1_monad_laws_hold_exhaustively() {
    let mut failures = Vec::new();
    for bundle in all_bundles() {
        let sig = bundle.two.sig.clone();
        let m = SyntacticModel::new(sig.clone());
        for ctx in 0..=2usize {
            let (terms, truncated) = enumerate_terms(&sig, ctx, 3, None);
            assert!(!truncated);
            assert_eq!(terms.len(), count_terms(&sig, ctx, 3), "enumerator count");
            let id_env: Vec<Term> = identity_env(ctx);
            for t in &terms {
                if m.subst(t, &id_env, ctx) != *t {
                    failures.push(format!("{}: right unit fails at {t:?}", bundle.name));
                }
            }
            let envs = all_envs(&sig, ctx, 2);
            for env in &envs {
                for i in 0..ctx {
                    if m.subst(&Term::Var(i), env, ctx) != env[i] {
                        failures.push(format!("{}: left unit fails at var {i}", bundle.name));
                    }
                }
            }
            // associativity: exhaustive first substitution, strided second
            let stride = usize::max(1, envs.len() / 8);
            for env1 in &envs {
                for env2 in envs.iter().step_by(stride) {
                    let composed: Vec<Term> =
                        env1.iter().map(|e| m.subst(e, env2, ctx)).collect();
                    for t in &terms {
                        let lhs = m.subst(&m.subst(t, env1, ctx), env2, ctx);
                        let rhs = m.subst(t, &composed, ctx);
                        if lhs != rhs {
                            failures.push(format!(
                                "{}: associativity fails at {t:?}",
                                bundle.name
                            ));
                        }
                    }
                }
            }
        }
    }
    conclude(1, "monad laws on every syntactic model", failures);
}

#[test]
fn acceptance_2_free_monoid_correspondence() {
    let mut failures = Vec::new();
    let bundle = bundles::monoid();
    let ctx = 2;
    let (terms, _) = enumerate_terms(&bundle.two.sig, ctx, 3, None);

    // the oracle partition: group by flattened word
    let mut by_word: HashMap<Vec<usize>, Vec<Term>> = HashMap::new();
    for t in &terms {
        by_word.entry(flatten(t)).or_default().push(t.clone());
    }
    // every word over 2 letters up to the maximal length occurs
    let max_len = by_word.keys().map(Vec::len).max().unwrap();
    let expected_words: usize = (0..=max_len).map(|l| 2usize.pow(l as u32)).sum();
    if by_word.len() != expected_words {
        failures.push(format!(
            "{} words realized, expected all {expected_words} of length <= {max_len}",
            by_word.len()
        ));
    }

    // the congruence partition coincides with the word partition
    let classes = congruence_classes(&bundle.two, ctx, &CongruenceConfig::default()).unwrap();
    if classes.len() != by_word.len() {
        failures.push(format!(
            "congruence found {} classes, word oracle {}",
            classes.len(),
            by_word.len()
        ));
    }
    for class in &classes {
        let words: Vec<Vec<usize>> = class.iter().map(flatten).collect();
        if words.iter().any(|w| w != &words[0]) {
            failures.push(format!("congruence class mixes words: {words:?}"));
        }
    }

    // normalization lands on the right-nested canonical form
    let rules = bundle.rules().unwrap();
    for t in &terms {
        let (nf, exhausted) = rules.normalize(t, ctx, 1000);
        if exhausted || nf != word_to_right_nested(&flatten(t)) {
            failures.push(format!("wrong canonical form for {t:?}: {nf:?}"));
        }
    }
    conclude(2, "free-monoid correspondence", failures);
}

#[test]
fn acceptance_3_beta_eta_behavior() {
    let mut failures = Vec::new();
    let lc = bundles::lc_beta_eta();
    let sig = lc.two.sig.clone();
    let rules = lc.rules().unwrap();

    // (a) the identity redex contracts in a single step
    let redex = Term::Con(
        "app".into(),
        vec![
            Term::Con("abs".into(), vec![Term::Var(0)]),
            Term::Var(0),
        ],
    );
    match rules.rewrite_step(&redex, 1) {
        Some(t) if t == Term::Var(0) => {}
        other => failures.push(format!("identity redex stepped to {other:?}")),
    }

    // (b) the η rule refuses exactly the bodies that use the bound variable
    let eta_only = RuleSet::new(
        sig.clone(),
        compile_rule(&bundles::eta_equation(&sig), &sig).unwrap(),
    );
    for ctx in 0..=2usize {
        let (bodies, _) = enumerate_terms(&sig, ctx + 1, 3, None);
        for b in &bodies {
            let candidate = Term::Con(
                "abs".into(),
                vec![Term::Con("app".into(), vec![b.clone(), Term::Var(0)])],
            );
            let roots = eta_only.root_steps(&candidate, ctx);
            let uses = b.uses_index(&sig, 0);
            if uses && !roots.is_empty() {
                failures.push(format!("η fired under an occurring variable: {b:?}"));
            }
            if !uses && roots.len() != 1 {
                failures.push(format!("η failed to fire on {b:?}"));
            }
        }
    }

    // (c) Church arithmetic, cross-checked against the named-variable reducer
    let app = |f: Term, a: Term| Term::Con("app".into(), vec![f, a]);
    let cases = [
        ("2+2", app(app(church_plus(), church(2)), church(2)), church(4)),
        ("2*3", app(app(church_times(), church(2)), church(3)), church(6)),
    ];
    for (label, lhs, rhs) in cases {
        let (verdict, _) = rules.joinable(&lhs, &rhs, 0, 200);
        if verdict != EqVerdict::Equal {
            failures.push(format!("{label}: joinability said {verdict:?}"));
        }
        let mut fresh = 0;
        let a = named_normalize(&db_to_named(&lhs, &mut Vec::new(), &mut fresh), 500);
        let b = named_normalize(&db_to_named(&rhs, &mut Vec::new(), &mut fresh), 500);
        match (a, b) {
            (Some(a), Some(b)) if alpha_eq(&a, &b) => {}
            other => failures.push(format!("{label}: named reducer disagrees: {other:?}")),
        }
    }
    conclude(3, "βη normalization and Church arithmetic", failures);
}

#[test]
fn acceptance_4_quotient_is_a_model() {
    let mut failures = Vec::new();
    let bundle = bundles::monoid();
    let sig = bundle.two.sig.clone();
    let rules = bundle.rules().unwrap();
    let ctx = 2;
    let nf = |t: &Term| {
        let (out, exhausted) = rules.normalize(t, ctx, 1000);
        assert!(!exhausted);
        out
    };
    let (terms, _) = enumerate_terms(&sig, ctx, 3, None);
    for t in &terms {
        for env in all_envs(&sig, ctx, 2) {
            let direct = nf(&subst(t, &sig, &env).unwrap());
            let nf_env: Vec<Term> = env.iter().map(|e| nf(e)).collect();
            let via_representatives = nf(&subst(&nf(t), &sig, &nf_env).unwrap());
            if direct != via_representatives {
                failures.push(format!(
                    "substitution not welldefined on classes at {t:?} / {env:?}"
                ));
            }
        }
    }
    conclude(4, "the monoid quotient carries a model", failures);
}

#[test]
fn acceptance_5_quotients_satisfy_their_equations() {
    let mut failures = Vec::new();
    for bundle in all_bundles() {
        let quotient = QuotientModel::new(bundle.rules().unwrap(), bundle.regime, 100);
        let mut probes = 0;
        let mut unknown = 0;
        for eq in &bundle.two.equations {
            let report = satisfies(&quotient, eq, 0..3, 3, 150).unwrap();
            probes += report.probes;
            unknown += report.unknown;
            for c in report.counterexamples {
                failures.push(format!("{}: {c}", bundle.name));
            }
        }
        if bundle.name == "lc" && unknown * 20 > probes {
            failures.push(format!(
                "lc: unknown rate {unknown}/{probes} exceeds 5%"
            ));
        }
    }
    conclude(5, "each quotient satisfies its own equations", failures);
}

#[test]
fn acceptance_6_recursion_principle_for_fixpoints() {
    let mut failures = Vec::new();
    let model = FixIntoLc::new(50).unwrap();
    let sig = model.signature().clone();
    let fix = |b: Term| Term::Con("fix".into(), vec![b]);

    // the translation is syntactic: fix(t) becomes app(Y, abs(t'))
    for ctx in 0..=1usize {
        let (bodies, _) = enumerate_terms(&sig, ctx + 1, 2, None);
        for b in &bodies {
            let image = fold(&fix(b.clone()), &model, ctx).unwrap();
            let expected = Term::Con(
                "app".into(),
                vec![
                    bundles::y_combinator(),
                    Term::Con("abs".into(), vec![fold(b, &model, ctx + 1).unwrap()]),
                ],
            );
            if image != expected {
                failures.push(format!("translation of fix({b:?}) is {image:?}"));
            }
        }
    }

    // folding commutes with substitution on 500 seeded random pairs
    let mut rng = sample::rng(0);
    let ctx = 2;
    let mut checked = 0;
    while checked < 500 {
        let t = sample::random_term(&sig, ctx, 3, &mut rng).unwrap();
        let env = sample::random_env(&sig, ctx, 3, &mut rng).unwrap();
        let lhs = fold(&subst(&t, &sig, &env).unwrap(), &model, ctx).unwrap();
        let folded_env: Vec<Term> = env
            .iter()
            .map(|e| fold(e, &model, ctx).unwrap())
            .collect();
        let rhs = model.subst(&fold(&t, &model, ctx).unwrap(), &folded_env, ctx);
        if model.equal(&lhs, &rhs) != EqVerdict::Equal {
            failures.push(format!("fold does not commute with substitution at {t:?}"));
        }
        checked += 1;
    }

    // the image respects fixpoint unfolding up to βη
    for ctx in 0..=1usize {
        let (bodies, _) = enumerate_terms(&sig, ctx + 1, 2, None);
        for b in &bodies {
            let folded = fold(&fix(b.clone()), &model, ctx).unwrap();
            let mut env = vec![fix(b.clone())];
            env.extend(identity_env(ctx));
            let unfolded = fold(&subst(b, &sig, &env).unwrap(), &model, ctx).unwrap();
            if model.equal(&folded, &unfolded) != EqVerdict::Equal {
                failures.push(format!("unfolding not respected at fix({b:?})"));
            }
        }
    }
    conclude(6, "fixpoints fold through the Y combinator", failures);
}

fn signatures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../signatures")
}

#[test]
fn acceptance_7_modularity_of_pushouts() {
    let mut failures = Vec::new();
    let cfg = LawsConfig {
        ctx: 2,
        depth: 2,
        ..LawsConfig::default()
    };

    // empty base: λ-calculus and the fixpoint operator share nothing
    let (two, inl, inr) = bundles::lc_fix_pushout();
    let empty_base = TwoSignature::new(AlgebraicSignature::empty(), vec![]).unwrap();
    let f = SignatureMorphism::new(
        AlgebraicSignature::empty(),
        bundles::lc_beta_eta().two.sig,
        vec![],
    )
    .unwrap();
    let g = SignatureMorphism::new(
        AlgebraicSignature::empty(),
        bundles::fixpoint().two.sig,
        vec![],
    )
    .unwrap();
    let rules = compile_rules(&two).unwrap();
    let report =
        check_modularity(&empty_base, &f, &g, &two, &inl, &inr, &rules, 200, &cfg).unwrap();
    failures.extend(report.violations);

    // the amalgam is pinned byte-for-byte
    let rendered = to_canonical_string(&document_to_json(&SignatureDocument {
        two,
        regime: Regime::Confluent,
        fuel: 1000,
    }));
    let golden = std::fs::read_to_string(signatures_dir().join("lc_fix.json")).unwrap();
    if rendered != golden {
        failures.push("amalgamated document drifted from the golden file".into());
    }

    // nontrivial base: the fixpoint theory shared by both legs
    let base = bundles::fixpoint().two;
    let left = bundles::lc_fix().two;
    let right = bundles::fixpoint().two;
    let f = SignatureMorphism::renaming_from(&base.sig, &left.sig, |n| n.to_string()).unwrap();
    let g = SignatureMorphism::identity(&base.sig);
    let (pushout, inl, inr) =
        pushout_as_algebraic(&base, (&f, &left), (&g, &right)).unwrap();
    let rules = compile_rules(&pushout).unwrap();
    let report =
        check_modularity(&base, &f, &g, &pushout, &inl, &inr, &rules, 200, &cfg).unwrap();
    failures.extend(report.violations);
    if report.unknown > 0 {
        failures.push(format!(
            "{} base terms could not be confirmed equal across the square",
            report.unknown
        ));
    }
    conclude(7, "pushout squares commute", failures);
}

#[test]
fn acceptance_8_coequalizer_as_an_equation() {
    let mut failures = Vec::new();
    let two_ops =
        AlgebraicSignature::new(vec![("op1", [0, 0].into()), ("op2", [0, 0].into())]).unwrap();
    let pattern = AlgebraicSignature::elementary([0, 0], "c");
    let f = SignatureMorphism::renaming_from(&pattern, &two_ops, |_| "op1".into()).unwrap();
    let g = SignatureMorphism::renaming_from(&pattern, &two_ops, |_| "op2".into()).unwrap();
    let eq = bindsig::signature::coequalizer_as_equation(&f, &g, "identified").unwrap();
    let quotiented = TwoSignature::new(two_ops.clone(), vec![eq]).unwrap();

    let ctx = 2;
    let cfg = CongruenceConfig {
        depth: 3,
        ..CongruenceConfig::default()
    };
    // every pair of arguments lands in the same class under both operations
    let (args, _) = enumerate_terms(&two_ops, ctx, 2, None);
    for a in &args {
        for b in &args {
            let l = Term::Con("op1".into(), vec![a.clone(), b.clone()]);
            let r = Term::Con("op2".into(), vec![a.clone(), b.clone()]);
            if congruence_oracle(&quotiented, &l, &r, ctx, &cfg).unwrap() != EqVerdict::Equal {
                failures.push(format!("op1/op2 not identified on ({a:?}, {b:?})"));
            }
        }
    }

    // the quotient counts exactly as many classes as the one-op syntax has terms
    let shallow = CongruenceConfig {
        depth: 2,
        fill_depth: Some(1),
        ..CongruenceConfig::default()
    };
    let quotient_count = class_count(&quotiented, ctx, &shallow).unwrap();
    let single = TwoSignature::new(pattern.clone(), vec![]).unwrap();
    let single_count = class_count(&single, ctx, &shallow).unwrap();
    if quotient_count != single_count {
        failures.push(format!(
            "{quotient_count} classes in the quotient, {single_count} one-op terms"
        ));
    }
    assert_eq!(single_count, count_terms(&pattern, ctx, 2));
    conclude(8, "identifying two operations by an equation", failures);
}

#[test]
fn acceptance_9_oracles_agree() {
    let mut failures = Vec::new();
    for bundle in all_bundles() {
        let sig = bundle.two.sig.clone();
        let rules = bundle.rules().unwrap();
        match bundle.regime {
            Regime::Terminating => {
                for ctx in 1..=2usize {
                    let (terms, _) = enumerate_terms(&sig, ctx, 3, None);
                    let nfs: Vec<Term> = terms
                        .iter()
                        .map(|t| rules.normalize(t, ctx, 1000).0)
                        .collect();
                    let classes =
                        congruence_classes(&bundle.two, ctx, &CongruenceConfig::default())
                            .unwrap();
                    let mut class_of: HashMap<Term, usize> = HashMap::new();
                    for (i, class) in classes.iter().enumerate() {
                        for t in class {
                            class_of.insert(t.clone(), i);
                        }
                    }
                    for i in 0..terms.len() {
                        for j in (i + 1)..terms.len() {
                            let same_nf = nfs[i] == nfs[j];
                            let same_class = class_of[&terms[i]] == class_of[&terms[j]];
                            if same_nf != same_class {
                                failures.push(format!(
                                    "{}: partitions disagree on {:?} / {:?}",
                                    bundle.name, terms[i], terms[j]
                                ));
                            }
                        }
                    }
                }
            }
            Regime::Confluent => {
                let ctx = 1;
                let (terms, _) = enumerate_terms(&sig, ctx, 3, None);
                let classes =
                    congruence_classes(&bundle.two, ctx, &CongruenceConfig::default()).unwrap();
                let mut class_of: HashMap<Term, usize> = HashMap::new();
                for (i, class) in classes.iter().enumerate() {
                    for t in class {
                        class_of.insert(t.clone(), i);
                    }
                }
                let mut pairs: Vec<(usize, usize)> = Vec::new();
                for i in 0..terms.len() {
                    for j in (i + 1)..terms.len() {
                        pairs.push((i, j));
                    }
                }
                let stride = usize::max(1, pairs.len() / 600);
                for &(i, j) in pairs.iter().step_by(stride) {
                    let (verdict, _) = rules.joinable(&terms[i], &terms[j], ctx, 150);
                    if verdict == EqVerdict::Equal
                        && class_of[&terms[i]] != class_of[&terms[j]]
                    {
                        failures.push(format!(
                            "{}: joinable pair in different classes: {:?} / {:?}",
                            bundle.name, terms[i], terms[j]
                        ));
                    }
                }
            }
            Regime::Unoriented => {}
        }
    }
    conclude(9, "rewriting and congruence closure agree", failures);
}
