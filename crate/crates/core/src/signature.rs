//! Binding signatures, signature morphisms, and their colimit-style
//! combinations (coproduct, pushout, coequalizer-as-equation).

use std::collections::HashMap;

use crate::equation::{Equation, Orientation};
use crate::error::{Error, Result};
use crate::modcalc::{typecheck, ModuleExpr, MorphismExpr};

/// A binding arity `(a_1, ..., a_n)`: the operation takes `n` arguments and
/// binds `a_i` fresh variables in the i-th one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BindingArity(Vec<usize>);

impl BindingArity {
    pub fn new(entries: Vec<usize>) -> Self {
        BindingArity(entries)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<usize>> for BindingArity {
    fn from(v: Vec<usize>) -> Self {
        BindingArity(v)
    }
}

impl<const N: usize> From<[usize; N]> for BindingArity {
    fn from(v: [usize; N]) -> Self {
        BindingArity(v.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub arity: BindingArity,
}

/// An ordered table of named operations with binding arities.  Ordering is
/// stable: coproduct injection indices are meaningful.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlgebraicSignature {
    ops: Vec<OpDecl>,
}

impl AlgebraicSignature {
    pub fn new(ops: Vec<(impl Into<String>, BindingArity)>) -> Result<Self> {
        let mut sig = AlgebraicSignature { ops: Vec::new() };
        for (name, arity) in ops {
            sig.push(name.into(), arity)?;
        }
        Ok(sig)
    }

    pub fn empty() -> Self {
        AlgebraicSignature::default()
    }

    /// The one-operation signature `Θ^(arity)`.
    pub fn elementary(arity: impl Into<BindingArity>, name: impl Into<String>) -> Self {
        AlgebraicSignature {
            ops: vec![OpDecl {
                name: name.into(),
                arity: arity.into(),
            }],
        }
    }

    fn push(&mut self, name: String, arity: BindingArity) -> Result<()> {
        if self.op(&name).is_some() {
            return Err(Error::DuplicateOp(name));
        }
        self.ops.push(OpDecl { name, arity });
        Ok(())
    }

    pub fn ops(&self) -> &[OpDecl] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn op(&self, name: &str) -> Option<&OpDecl> {
        self.ops.iter().find(|o| o.name == name)
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    pub fn arity(&self, name: &str) -> Result<&BindingArity> {
        self.op(name)
            .map(|o| &o.arity)
            .ok_or_else(|| Error::UnknownOp(name.to_string()))
    }

    /// Every op of `self` present in `other` with the same arity.
    pub fn is_subsignature_of(&self, other: &AlgebraicSignature) -> bool {
        self.ops
            .iter()
            .all(|o| other.op(&o.name).map(|d| d.arity == o.arity).unwrap_or(false))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionPolicy {
    /// Colliding names get qualified as `<label>.<name>`.
    Qualify,
    Reject,
}

/// A morphism of algebraic signatures, given by its component on each
/// elementary summand: for a source op of arity `(a)`, a morphism expression
/// of type `Θ^(a) → Θ` over the target signature.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureMorphism {
    pub source: AlgebraicSignature,
    pub target: AlgebraicSignature,
    pub assignment: Vec<MorphismExpr>,
}

impl SignatureMorphism {
    pub fn new(
        source: AlgebraicSignature,
        target: AlgebraicSignature,
        assignment: Vec<MorphismExpr>,
    ) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::Type(format!(
                "morphism assignment covers {} ops, source has {}",
                assignment.len(),
                source.len()
            )));
        }
        for (op, expr) in source.ops().iter().zip(&assignment) {
            let expected = ModuleExpr::theta_pow(&op.arity);
            let (_, tgt) = typecheck(expr, &target, Some(&expected))?;
            if tgt != ModuleExpr::Theta {
                return Err(Error::Type(format!(
                    "assignment for `{}` has target {:?}, expected Θ",
                    op.name, tgt
                )));
            }
        }
        Ok(SignatureMorphism {
            source,
            target,
            assignment,
        })
    }

    pub fn identity(sig: &AlgebraicSignature) -> Self {
        Self::renaming_from(sig, sig, |n| n.to_string())
            .expect("identity renaming is always valid")
    }

    /// A morphism that just renames operations, `op ↦ rename(op)`.
    pub fn renaming_from(
        source: &AlgebraicSignature,
        target: &AlgebraicSignature,
        rename: impl Fn(&str) -> String,
    ) -> Result<Self> {
        let mut assignment = Vec::new();
        for op in source.ops() {
            let tname = rename(&op.name);
            let decl = target
                .op(&tname)
                .ok_or_else(|| Error::UnknownOp(tname.clone()))?;
            if decl.arity != op.arity {
                return Err(Error::Type(format!(
                    "renaming `{}` -> `{}` changes arity",
                    op.name, tname
                )));
            }
            assignment.push(MorphismExpr::op_ref(target.clone(), &tname));
        }
        SignatureMorphism::new(source.clone(), target.clone(), assignment)
    }

    /// If every component is a plain op reference, return the name map.
    pub fn renaming_map(&self) -> Option<HashMap<String, String>> {
        let mut map = HashMap::new();
        for (op, expr) in self.source.ops().iter().zip(&self.assignment) {
            map.insert(op.name.clone(), expr.as_op_ref()?.to_string());
        }
        Some(map)
    }

    /// Postcompose with a renaming morphism `inj : target → bigger`.
    pub fn then_renaming(&self, inj: &SignatureMorphism) -> Result<SignatureMorphism> {
        let map = inj
            .renaming_map()
            .ok_or_else(|| Error::Type("composition requires a renaming morphism".into()))?;
        let assignment = self
            .assignment
            .iter()
            .map(|e| e.rename_ops(&map))
            .collect::<Result<Vec<_>>>()?;
        SignatureMorphism::new(self.source.clone(), inj.target.clone(), assignment)
    }
}

/// Coproduct of signatures.  Returns the concatenated table plus one
/// injection morphism per summand.
pub fn coproduct(
    parts: &[AlgebraicSignature],
    policy: CollisionPolicy,
) -> Result<(AlgebraicSignature, Vec<SignatureMorphism>)> {
    let labels: Vec<String> = match parts.len() {
        2 => vec!["left".into(), "right".into()],
        n => (0..n).map(|i| format!("s{i}")).collect(),
    };
    // Which names collide across summands?
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for part in parts {
        for op in part.ops() {
            *seen.entry(op.name.as_str()).or_insert(0) += 1;
        }
    }
    let mut result = AlgebraicSignature::empty();
    let mut maps: Vec<HashMap<String, String>> = Vec::new();
    for (part, label) in parts.iter().zip(&labels) {
        let mut map = HashMap::new();
        for op in part.ops() {
            let name = if seen[op.name.as_str()] > 1 {
                match policy {
                    CollisionPolicy::Reject => return Err(Error::NameCollision(op.name.clone())),
                    CollisionPolicy::Qualify => format!("{label}.{}", op.name),
                }
            } else {
                op.name.clone()
            };
            map.insert(op.name.clone(), name.clone());
            result.push(name, op.arity.clone())?;
        }
        maps.push(map);
    }
    let injections = parts
        .iter()
        .zip(&maps)
        .map(|(part, map)| SignatureMorphism::renaming_from(part, &result, |n| map[n].clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok((result, injections))
}

/// A signature plus a family of elementary equations.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSignature {
    pub sig: AlgebraicSignature,
    pub equations: Vec<Equation>,
}

impl TwoSignature {
    pub fn new(sig: AlgebraicSignature, equations: Vec<Equation>) -> Result<Self> {
        for eq in &equations {
            eq.validate(&sig)?;
        }
        Ok(TwoSignature { sig, equations })
    }
}

/// The elementary equation `τ∘f = τ∘g` for a parallel pair of signature
/// morphisms `f, g : Σ₁ ⇒ Σ₂`.  Attaching it to Σ₂'s equations yields a
/// 2-signature whose models are the models of the coequalizer of `f` and `g`.
pub fn coequalizer_as_equation(
    f: &SignatureMorphism,
    g: &SignatureMorphism,
    name: impl Into<String>,
) -> Result<Equation> {
    if f.source != g.source || f.target != g.target {
        return Err(Error::Type(
            "coequalizer requires a parallel pair of morphisms".into(),
        ));
    }
    Equation::new(
        name,
        ModuleExpr::Sig(f.source.clone()),
        ModuleExpr::Theta,
        MorphismExpr::Case {
            sig: f.source.clone(),
            arms: f.assignment.clone(),
        },
        MorphismExpr::Case {
            sig: g.source.clone(),
            arms: g.assignment.clone(),
        },
        Orientation::Unoriented,
        &f.target,
    )
}

/// Pushout of 2-signatures: coproduct of the legs, union of their equations,
/// plus the glue equation identifying the two images of the base.  The glue
/// equation is omitted when the base signature is empty (degenerate source).
pub fn pushout_as_algebraic(
    base: &TwoSignature,
    left: (&SignatureMorphism, &TwoSignature),
    right: (&SignatureMorphism, &TwoSignature),
) -> Result<(TwoSignature, SignatureMorphism, SignatureMorphism)> {
    let (f, left_sig) = left;
    let (g, right_sig) = right;
    if f.source != base.sig || g.source != base.sig {
        return Err(Error::Type("pushout legs must share the base as source".into()));
    }
    if f.target != left_sig.sig || g.target != right_sig.sig {
        return Err(Error::Type("pushout leg targets do not match the given 2-signatures".into()));
    }
    let (sum, injections) = coproduct(
        &[left_sig.sig.clone(), right_sig.sig.clone()],
        CollisionPolicy::Qualify,
    )?;
    let inl = injections[0].clone();
    let inr = injections[1].clone();
    let lmap = inl.renaming_map().expect("injections are renamings");
    let rmap = inr.renaming_map().expect("injections are renamings");

    let mut equations = Vec::new();
    for eq in &left_sig.equations {
        equations.push(eq.rename_ops(&lmap, &sum)?);
    }
    for eq in &right_sig.equations {
        equations.push(eq.rename_ops(&rmap, &sum)?);
    }
    if !base.sig.is_empty() {
        let via_left = f.then_renaming(&inl)?;
        let via_right = g.then_renaming(&inr)?;
        equations.push(coequalizer_as_equation(&via_left, &via_right, "glue")?);
    }
    let two = TwoSignature::new(sum, equations)?;
    Ok((two, inl, inr))
}
