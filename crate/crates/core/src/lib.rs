//! Binding signatures with equations, realized as executable syntax.
//!
//! The pipeline: declare an [`signature::AlgebraicSignature`] of operations
//! with binding arities, attach elementary equations over the
//! [`modcalc`] morphism DSL to get a [`signature::TwoSignature`], compile the
//! equations into second-order rewrite rules ([`equation`], [`rewrite`]),
//! and work with the resulting quotient of the free de Bruijn syntax
//! ([`term`]): normalization, joinability, congruence closure
//! ([`congruence`]), and folds into user models ([`model`]).

pub mod bundles;
pub mod congruence;
pub mod equation;
pub mod error;
pub mod json;
pub mod modcalc;
pub mod model;
pub mod rewrite;
pub mod sample;
pub mod signature;
pub mod term;
pub mod text;

pub use error::{Error, Result};
pub use model::EqVerdict;
