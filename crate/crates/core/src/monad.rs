//! The monad structure on rational trees: unit, algebra structure,
//! decomposition `MY = HMY + Y`, and Kleisli extension (substitution).
//!
//! Multiplication is not a separate operation. A tree of trees is a tree with
//! tree-valued parameters, and flattening it is `kleisli_extend` of that
//! valuation.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sig::{OpId, Signature};
use crate::solve::substitute_with;
use crate::tree::{GraphBuilder, Name, Node, RatTree};

/// The single parameter leaf `y`.
pub fn eta(sig: &Arc<Signature>, y: &str) -> RatTree {
    RatTree::param(sig.clone(), y)
}

/// A new root labelled `symbol` over the given children.
pub fn delta(sig: &Arc<Signature>, symbol: &str, children: &[RatTree]) -> Result<RatTree> {
    let full = sig.strict_closure();
    let op = full
        .lookup(symbol)
        .filter(|op| sig.is_strict() || Some(*op) != full.bottom())
        .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
    delta_op(sig, op, children)
}

pub fn delta_op(sig: &Arc<Signature>, op: OpId, children: &[RatTree]) -> Result<RatTree> {
    let expected = sig.strict_closure().arity(op);
    if children.len() != expected {
        return Err(Error::ArityMismatch {
            symbol: sig.strict_closure().symbol(op).to_string(),
            expected,
            found: children.len(),
        });
    }
    let mut builder = GraphBuilder::new(sig.clone());
    let root = builder.push(Node::Op { op, children: vec![] });
    let mut ids = Vec::with_capacity(children.len());
    for c in children {
        ids.push(builder.import(c)?);
    }
    *builder.node_mut(root) = Node::Op { op, children: ids };
    builder.finish(root)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposed {
    Param(Name),
    Op(OpId, Vec<RatTree>),
}

/// Splits a tree into a parameter or an operation applied to subtrees.
pub fn decompose(t: &RatTree) -> Decomposed {
    match t.root_node() {
        Node::Param(p) => Decomposed::Param(p.clone()),
        Node::Op { op, children } => Decomposed::Op(*op, children.iter().map(|&c| t.subtree(c)).collect()),
    }
}

/// Inverse of [`decompose`], up to bisimilarity.
pub fn recompose(sig: &Arc<Signature>, d: &Decomposed) -> Result<RatTree> {
    match d {
        Decomposed::Param(y) => Ok(eta(sig, y)),
        Decomposed::Op(op, children) => delta_op(sig, *op, children),
    }
}

/// `ĥ`: replaces every parameter `y` by `h(y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KleisliExt {
    h: HashMap<Name, RatTree>,
}

pub fn kleisli_extend(h: HashMap<Name, RatTree>) -> KleisliExt {
    KleisliExt { h }
}

impl KleisliExt {
    pub fn mapping(&self) -> &HashMap<Name, RatTree> {
        &self.h
    }

    /// Fails when a parameter of `t` is outside the domain of `h`.
    pub fn apply(&self, t: &RatTree) -> Result<RatTree> {
        if let Some(y) = t.params().into_iter().find(|y| !self.h.contains_key(y)) {
            return Err(Error::UnknownParameter(y.to_string()));
        }
        substitute_with(t, |y| self.h.get(y))
    }

    /// `k̂ ∘ h` as a mapping, so that `extend(k̂ ∘ h) = k̂ ∘ ĥ`.
    pub fn then(&self, k: &KleisliExt) -> Result<KleisliExt> {
        let h = self
            .h
            .iter()
            .map(|(y, t)| Ok((y.clone(), k.apply(t)?)))
            .collect::<Result<_>>()?;
        Ok(KleisliExt { h })
    }
}

/// `η` as a Kleisli mapping on the given parameters.
pub fn unit_mapping<S: AsRef<str>>(sig: &Arc<Signature>, params: &[S]) -> HashMap<Name, RatTree> {
    params
        .iter()
        .map(|y| (Name::from(y.as_ref()), eta(sig, y.as_ref())))
        .collect()
}
