//! A congruence-closure oracle over a finite universe of terms.
//!
//! The universe collects every term up to a height bound, across every
//! context reachable from the starting one through binder entries.  The
//! equations seed identifications; closure alternates a congruence round
//! (same op, pairwise-identified arguments) and a substitution round
//! (identified terms stay identified under variable renamings) to fixpoint.
//!
//! The oracle is sound but incomplete: `Equal` is definitive, anything else
//! is `Unknown`.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::modcalc::{eval, syntactic_values, ModuleExpr, ModuleValue, MorphismExpr};
use crate::model::{EqVerdict, SyntacticModel};
use crate::signature::TwoSignature;
use crate::term::{enumerate_terms, scope_check, subst, Term};

#[derive(Debug, Clone, Copy)]
pub struct CongruenceConfig {
    /// Height bound of the universe at the starting context.
    pub depth: usize,
    /// Height bound for equation instantiations (default: `depth - 1`).
    pub fill_depth: Option<usize>,
    /// Height bound for substitution-closure environments (1 = renamings).
    pub env_depth: usize,
    /// Maximum closure rounds.
    pub rounds: usize,
    /// Hard cap on universe size; beyond it the oracle gives up.
    pub max_nodes: usize,
}

impl Default for CongruenceConfig {
    fn default() -> Self {
        CongruenceConfig {
            depth: 3,
            fill_depth: None,
            env_depth: 1,
            rounds: 8,
            max_nodes: 20_000,
        }
    }
}

struct Universe {
    /// context size -> height bound explored there
    ctx_depths: HashMap<usize, usize>,
    ids: HashMap<(usize, Term), usize>,
    parent: Vec<usize>,
}

impl Universe {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }

    fn id(&self, ctx: usize, t: &Term) -> Option<usize> {
        self.ids.get(&(ctx, t.clone())).copied()
    }
}

fn build_universe(two: &TwoSignature, ctx: usize, cfg: &CongruenceConfig) -> Result<Universe> {
    // reachable (context, depth) pairs through binder entries
    let mut ctx_depths: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    queue.push_back((ctx, cfg.depth));
    while let Some((c, d)) = queue.pop_front() {
        if d == 0 {
            continue;
        }
        let known = ctx_depths.entry(c).or_insert(0);
        if *known >= d {
            continue;
        }
        *known = d;
        for op in two.sig.ops() {
            for &a in op.arity.entries() {
                if a > 0 {
                    queue.push_back((c + a, d - 1));
                }
            }
        }
    }
    let mut ids = HashMap::new();
    let mut parent = Vec::new();
    for (&c, &d) in &ctx_depths {
        let (terms, _) = enumerate_terms(&two.sig, c, d, Some(cfg.max_nodes));
        for t in terms {
            let next = parent.len();
            if ids.insert((c, t), next) == None {
                parent.push(next);
            }
        }
        if parent.len() > cfg.max_nodes {
            return Err(Error::Shape(format!(
                "congruence universe exceeds {} nodes",
                cfg.max_nodes
            )));
        }
    }
    Ok(Universe {
        ctx_depths,
        ids,
        parent,
    })
}

/// Unions every pair of Θ-leaves of two structurally parallel values,
/// provided both terms are present in the universe.
fn seed_pairs(
    uni: &mut Universe,
    a: &ModuleValue<Term>,
    b: &ModuleValue<Term>,
    ctx: usize,
) -> bool {
    match (a, b) {
        (ModuleValue::Theta(x), ModuleValue::Theta(y)) => {
            match (uni.id(ctx, x), uni.id(ctx, y)) {
                (Some(i), Some(j)) => uni.union(i, j),
                _ => false,
            }
        }
        (ModuleValue::Deriv(x), ModuleValue::Deriv(y)) => seed_pairs(uni, x, y, ctx + 1),
        (ModuleValue::Prod(xs), ModuleValue::Prod(ys)) => {
            let mut changed = false;
            for (x, y) in xs.iter().zip(ys) {
                changed |= seed_pairs(uni, x, y, ctx);
            }
            changed
        }
        (ModuleValue::Sig { arg: x, .. }, ModuleValue::Sig { arg: y, .. }) => {
            seed_pairs(uni, x, y, ctx)
        }
        _ => false,
    }
}

/// Argument key for the congruence round: the argument's class if it is in
/// the universe, otherwise the argument itself.
#[derive(PartialEq, Eq, Hash)]
enum ArgKey {
    Class(usize),
    Opaque(Term),
}

fn closure(two: &TwoSignature, uni: &mut Universe, cfg: &CongruenceConfig) {
    let nodes: Vec<((usize, Term), usize)> = uni
        .ids
        .iter()
        .map(|(k, &v)| (k.clone(), v))
        .collect();
    let contexts: Vec<usize> = uni.ctx_depths.keys().copied().collect();
    // variable-only environments per context (the substitution round uses
    // renamings; deeper environments explode combinatorially)
    let mut envs_by_ctx: HashMap<usize, Vec<Vec<Term>>> = HashMap::new();
    for &c in &contexts {
        let (entries, _) = enumerate_terms(&two.sig, c, cfg.env_depth, Some(64));
        let mut envs: Vec<Vec<Term>> = vec![Vec::new()];
        for _ in 0..c {
            let mut next = Vec::new();
            for prefix in &envs {
                for e in &entries {
                    let mut p = prefix.clone();
                    p.push(e.clone());
                    next.push(p);
                }
            }
            envs = next;
            if envs.len() > 4096 {
                envs.truncate(4096);
                break;
            }
        }
        // drop the identity-only trivial case is unnecessary; keep all
        envs_by_ctx.insert(c, envs);
    }
    for _ in 0..cfg.rounds {
        let mut changed = false;
        // congruence: op applied to identified arguments
        let mut by_key: HashMap<(usize, String, Vec<ArgKey>), usize> = HashMap::new();
        for ((c, t), id) in &nodes {
            if let Term::Con(op, args) = t {
                let arity = two.sig.arity(op).expect("op in signature").entries().to_vec();
                let key: Vec<ArgKey> = args
                    .iter()
                    .zip(&arity)
                    .map(|(arg, &a)| match uni.id(c + a, arg) {
                        Some(i) => ArgKey::Class(uni.find(i)),
                        None => ArgKey::Opaque(arg.clone()),
                    })
                    .collect();
                match by_key.entry((*c, op.clone(), key)) {
                    std::collections::hash_map::Entry::Occupied(e) => {
                        changed |= uni.union(*e.get(), *id);
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(*id);
                    }
                }
            }
        }
        // substitution: identified terms stay identified under renamings
        let mut by_subst: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
        for ((c, t), id) in &nodes {
            let envs = &envs_by_ctx[c];
            for env in envs {
                let s = match subst(t, &two.sig, env) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                let sid = match uni.id(*c, &s) {
                    Some(sid) => sid,
                    None => continue,
                };
                let repr = uni.find(*id);
                let env_key: Vec<usize> = env
                    .iter()
                    .map(|e| match uni.id(*c, e) {
                        Some(i) => uni.find(i),
                        None => usize::MAX,
                    })
                    .collect();
                match by_subst.entry((*c, repr, env_key)) {
                    std::collections::hash_map::Entry::Occupied(e) => {
                        changed |= uni.union(*e.get(), sid);
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(sid);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn seed_equations(two: &TwoSignature, uni: &mut Universe, cfg: &CongruenceConfig) -> Result<()> {
    let fill = cfg.fill_depth.unwrap_or(cfg.depth.saturating_sub(1));
    let model = SyntacticModel::new(two.sig.clone());
    let contexts: Vec<usize> = uni.ctx_depths.keys().copied().collect();
    for eq in &two.equations {
        // uncurry derived targets: an equation into N′ only yields instances
        // whose bound slot is the fresh variable, whereas its uncurried form
        // over M×Θ gets instantiated with every enumerated filler term
        let mut source = eq.source.clone();
        let mut target = eq.target.clone();
        let mut lhs = eq.lhs.clone();
        let mut rhs = eq.rhs.clone();
        while let ModuleExpr::Deriv(inner) = target {
            lhs = MorphismExpr::uncurry(lhs);
            rhs = MorphismExpr::uncurry(rhs);
            source = ModuleExpr::Prod(vec![source, ModuleExpr::Theta]);
            target = *inner;
        }
        for &c in &contexts {
            for v in syntactic_values(&source, &two.sig, c, fill, Some(2000)) {
                let l = eval(&lhs, &model, c, v.clone())?;
                let r = eval(&rhs, &model, c, v)?;
                seed_pairs(uni, &l, &r, c);
            }
        }
    }
    Ok(())
}

/// The partition of all terms of height <= `cfg.depth` at context `ctx`
/// induced by congruence closure of the 2-signature's equations.
pub fn congruence_classes(
    two: &TwoSignature,
    ctx: usize,
    cfg: &CongruenceConfig,
) -> Result<Vec<Vec<Term>>> {
    let mut uni = build_universe(two, ctx, cfg)?;
    seed_equations(two, &mut uni, cfg)?;
    closure(two, &mut uni, cfg);
    let (terms, _) = enumerate_terms(&two.sig, ctx, cfg.depth, Some(cfg.max_nodes));
    let mut classes: HashMap<usize, Vec<Term>> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    for t in terms {
        let id = uni.id(ctx, &t).expect("universe covers its own depth");
        let repr = uni.find(id);
        if !classes.contains_key(&repr) {
            order.push(repr);
        }
        classes.entry(repr).or_default().push(t);
    }
    Ok(order.into_iter().map(|r| classes.remove(&r).unwrap()).collect())
}

/// Sound, incomplete equality: `Equal` when congruence closure merges the
/// two terms, `Unknown` otherwise (including terms outside the universe).
pub fn congruence_oracle(
    two: &TwoSignature,
    a: &Term,
    b: &Term,
    ctx: usize,
    cfg: &CongruenceConfig,
) -> Result<EqVerdict> {
    scope_check(a, &two.sig, ctx)?;
    scope_check(b, &two.sig, ctx)?;
    if a == b {
        return Ok(EqVerdict::Equal);
    }
    let mut uni = match build_universe(two, ctx, cfg) {
        Ok(u) => u,
        Err(_) => return Ok(EqVerdict::Unknown),
    };
    let (ia, ib) = match (uni.id(ctx, a), uni.id(ctx, b)) {
        (Some(ia), Some(ib)) => (ia, ib),
        _ => return Ok(EqVerdict::Unknown),
    };
    seed_equations(two, &mut uni, cfg)?;
    closure(two, &mut uni, cfg);
    if uni.find(ia) == uni.find(ib) {
        Ok(EqVerdict::Equal)
    } else {
        Ok(EqVerdict::Unknown)
    }
}

/// Counts classes among closed terms, a convenience for reports.
pub fn class_count(two: &TwoSignature, ctx: usize, cfg: &CongruenceConfig) -> Result<usize> {
    Ok(congruence_classes(two, ctx, cfg)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modcalc::{ModuleExpr, MorphismExpr};
    use crate::signature::AlgebraicSignature;
    use crate::equation::{Equation, Orientation};

    fn monoid_two() -> TwoSignature {
        let sig = AlgebraicSignature::new(vec![("m", [0, 0].into()), ("e", [].into())]).unwrap();
        let theta = || ModuleExpr::Theta;
        let m = |a, b| MorphismExpr::op_apply(&sig_m(), "m", vec![a, b]);
        fn sig_m() -> AlgebraicSignature {
            AlgebraicSignature::new(vec![("m", [0, 0].into()), ("e", [].into())]).unwrap()
        }
        let e = || MorphismExpr::op_apply(&sig_m(), "e", vec![]);
        let p = |i| MorphismExpr::Proj(i);
        let assoc = Equation::new(
            "assoc",
            ModuleExpr::Prod(vec![theta(), theta(), theta()]),
            theta(),
            m(m(p(0), p(1)), p(2)),
            m(p(0), m(p(1), p(2))),
            Orientation::LeftToRight,
            &sig,
        )
        .unwrap();
        let unit_l = Equation::new(
            "unitL",
            theta(),
            theta(),
            m(e(), MorphismExpr::Id(theta())),
            MorphismExpr::Id(theta()),
            Orientation::LeftToRight,
            &sig,
        )
        .unwrap();
        let unit_r = Equation::new(
            "unitR",
            theta(),
            theta(),
            m(MorphismExpr::Id(theta()), e()),
            MorphismExpr::Id(theta()),
            Orientation::LeftToRight,
            &sig,
        )
        .unwrap();
        TwoSignature::new(sig, vec![assoc, unit_l, unit_r]).unwrap()
    }

    #[test]
    fn monoid_classes_are_words() {
        // over 1 variable, terms of height <= 3 cover words x^0..x^4;
        // every term flattens to some word, so classes = word lengths seen
        let two = monoid_two();
        let classes = congruence_classes(&two, 1, &CongruenceConfig::default()).unwrap();
        // the flattening length is constant on each class
        let len_of = |t: &Term| {
            fn go(t: &Term, acc: &mut usize) {
                match t {
                    Term::Var(_) => *acc += 1,
                    Term::Con(op, args) if op == "m" => {
                        go(&args[0], acc);
                        go(&args[1], acc);
                    }
                    _ => {}
                }
            }
            let mut n = 0;
            go(t, &mut n);
            n
        };
        let mut lengths = std::collections::HashSet::new();
        for class in &classes {
            let l0 = len_of(&class[0]);
            for t in class {
                assert_eq!(len_of(t), l0, "mixed class: {class:?}");
            }
            assert!(lengths.insert(l0), "two classes with the same word");
        }
        // heights <= 3 over one variable produce word lengths 0..=4
        assert_eq!(classes.len(), 5);
    }

    #[test]
    fn oracle_equates_unit_padding() {
        let two = monoid_two();
        let e = Term::Con("e".into(), vec![]);
        let x = Term::Var(0);
        let t = Term::Con("m".into(), vec![e.clone(), x.clone()]);
        assert_eq!(
            congruence_oracle(&two, &t, &x, 1, &CongruenceConfig::default()).unwrap(),
            EqVerdict::Equal
        );
        // x vs x·x: not equated (and genuinely distinct)
        let xx = Term::Con("m".into(), vec![x.clone(), x.clone()]);
        assert_eq!(
            congruence_oracle(&two, &x, &xx, 1, &CongruenceConfig::default()).unwrap(),
            EqVerdict::Unknown
        );
    }

    #[test]
    fn oracle_uses_associativity_transitively() {
        let two = monoid_two();
        let x = Term::Var(0);
        let m = |a: Term, b: Term| Term::Con("m".into(), vec![a, b]);
        let left = m(m(x.clone(), x.clone()), x.clone());
        let right = m(x.clone(), m(x.clone(), x.clone()));
        assert_eq!(
            congruence_oracle(&two, &left, &right, 1, &CongruenceConfig::default()).unwrap(),
            EqVerdict::Equal
        );
    }
}
