//! Finite signatures, i.e. polynomial set functors `H X = ∐ Σ_n × X^n`, and
//! their extension by a reserved nullary symbol `bot`.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};

/// The reserved bottom symbol of a strict signature.
pub const BOTTOM: &str = "bot";

/// Index of an operation symbol inside its signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpId(pub u32);

impl OpId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpDecl {
    pub symbol: String,
    pub arity: usize,
}

/// An ordered list of operation symbols with arities.
///
/// Two signatures are equal when they declare the same symbols with the same
/// arities in the same order; the name is a label only.
#[derive(Debug, Clone)]
pub struct Signature {
    name: String,
    ops: Vec<OpDecl>,
    strict: bool,
    index: HashMap<String, OpId>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.strict == other.strict && self.ops == other.ops
    }
}

impl Eq for Signature {}

impl Signature {
    /// Builds a signature from `(symbol, arity)` declarations, in order.
    pub fn new<S: AsRef<str>>(decls: &[(S, usize)]) -> Result<Arc<Signature>> {
        Self::named("sig", decls)
    }

    pub fn named<S: AsRef<str>>(name: &str, decls: &[(S, usize)]) -> Result<Arc<Signature>> {
        let mut ops = Vec::with_capacity(decls.len());
        let mut index = HashMap::new();
        for (symbol, arity) in decls {
            let symbol = symbol.as_ref();
            if symbol == BOTTOM {
                return Err(Error::ReservedSymbol);
            }
            if index
                .insert(symbol.to_string(), OpId(ops.len() as u32))
                .is_some()
            {
                return Err(Error::DuplicateSymbol(symbol.to_string()));
            }
            ops.push(OpDecl {
                symbol: symbol.to_string(),
                arity: *arity,
            });
        }
        Ok(Arc::new(Signature {
            name: name.to_string(),
            ops,
            strict: false,
            index,
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
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

    pub fn op_ids(&self) -> impl Iterator<Item = OpId> + '_ {
        (0..self.ops.len() as u32).map(OpId)
    }

    pub fn arity(&self, op: OpId) -> usize {
        self.ops[op.index()].arity
    }

    pub fn symbol(&self, op: OpId) -> &str {
        &self.ops[op.index()].symbol
    }

    pub fn lookup(&self, symbol: &str) -> Option<OpId> {
        self.index.get(symbol).copied()
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// The `bot` symbol, present only in strict signatures.
    pub fn bottom(&self) -> Option<OpId> {
        self.strict.then(|| OpId(self.ops.len() as u32 - 1))
    }

    /// Symbols other than `bot`.
    pub fn user_ops(&self) -> &[OpDecl] {
        if self.strict {
            &self.ops[..self.ops.len() - 1]
        } else {
            &self.ops
        }
    }

    pub fn max_arity(&self) -> usize {
        self.ops.iter().map(|d| d.arity).max().unwrap_or(0)
    }

    /// The signature with `bot` appended, or `self` if it is already strict.
    pub fn strict_closure(self: &Arc<Self>) -> Arc<Signature> {
        if self.strict {
            self.clone()
        } else {
            add_bottom(self)
                .expect("non-strict signature accepts bot")
                .into_inner()
        }
    }

    /// The common signature of two trees: equal signatures, or a signature and
    /// its strict extension (whose op ids agree on the shared prefix).
    pub fn join(a: &Arc<Signature>, b: &Arc<Signature>) -> Option<Arc<Signature>> {
        if Arc::ptr_eq(a, b) || a == b {
            Some(a.clone())
        } else if a.strict && !b.strict && a.user_ops() == b.ops.as_slice() {
            Some(a.clone())
        } else if b.strict && !a.strict && b.user_ops() == a.ops.as_slice() {
            Some(b.clone())
        } else {
            None
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sig {}", self.name)?;
        for d in self.user_ops() {
            writeln!(f, "op {}/{}", d.symbol, d.arity)?;
        }
        Ok(())
    }
}

/// A signature known to end with the nullary `bot` symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictSignature(Arc<Signature>);

impl StrictSignature {
    pub fn base(&self) -> Arc<Signature> {
        let decls: Vec<_> = self
            .0
            .user_ops()
            .iter()
            .map(|d| (d.symbol.as_str(), d.arity))
            .collect();
        Signature::named(&self.0.name, &decls).expect("base of a strict signature is valid")
    }

    pub fn bottom(&self) -> OpId {
        self.0.bottom().expect("strict")
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.0
    }

    pub fn into_inner(self) -> Arc<Signature> {
        self.0
    }
}

impl Deref for StrictSignature {
    type Target = Signature;

    fn deref(&self) -> &Signature {
        &self.0
    }
}

/// Appends `bot/0`. Fails on a signature that already carries it.
pub fn add_bottom(sig: &Signature) -> Result<StrictSignature> {
    if sig.strict {
        return Err(Error::AlreadyStrict);
    }
    let mut ops = sig.ops.clone();
    let mut index = sig.index.clone();
    index.insert(BOTTOM.to_string(), OpId(ops.len() as u32));
    ops.push(OpDecl {
        symbol: BOTTOM.to_string(),
        arity: 0,
    });
    Ok(StrictSignature(Arc::new(Signature {
        name: sig.name.clone(),
        ops,
        strict: true,
        index,
    })))
}
