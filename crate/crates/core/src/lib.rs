//! Rational trees over finite signatures, recursive equation systems and
//! their (strict) solutions, the substitution monad, randomized law checks,
//! and a workbench for finite algebras.

pub mod chain;
pub mod error;
pub mod exec;
pub mod finalg;
pub mod laws;
pub mod monad;
pub mod sig;
pub mod solve;
pub mod text;
pub mod tree;

pub use chain::{enumerate_chain, ChainKind};
pub use error::{Error, Result};
pub use exec::Execution;
pub use finalg::{AlgHom, FiniteAlgebra, FlatSystem};
pub use monad::{decompose, delta, eta, kleisli_extend, Decomposed, KleisliExt};
pub use sig::{add_bottom, OpId, Signature, StrictSignature, BOTTOM};
pub use solve::{Class, DerivedChain, EqSystem, Rhs, Solution};
pub use text::{parse_algebra, parse_system, parse_tree, parse_tree_file};
pub use tree::{Name, Node, NodeId, Occurrences, PartialTerm, RatTree, Term};
