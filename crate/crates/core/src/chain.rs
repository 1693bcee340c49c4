//! Finite stages of the free-algebra chain `V_{n+1} = H V_n + Y` and the
//! free-corecursive-algebra chain `U_{n+1} = H U_n + Y`.
//!
//! Level 0 of the free-algebra chain is `Y` plus the constants, i.e. the terms
//! of height 0; level `n` holds the terms of height at most `n`. Level 0 of the
//! corecursive chain is the set of closed trees `T`, which is only finite when
//! the signature has no symbol of positive arity, or exactly one symbol.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::monad::{delta_op, eta};
use crate::sig::Signature;
use crate::tree::{Node, RatTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    FreeAlg,
    Corec,
}

/// The closed trees over `sig`, when there are finitely many.
pub fn closed_trees(sig: &Arc<Signature>) -> Option<Vec<RatTree>> {
    let positive: Vec<_> = sig.op_ids().filter(|&op| sig.arity(op) > 0).collect();
    if positive.is_empty() {
        return Some(
            sig.op_ids()
                .map(|op| delta_op(sig, op, &[]).expect("nullary"))
                .collect(),
        );
    }
    if sig.len() == 1 {
        let op = positive[0];
        let t = RatTree::from_graph(
            sig.clone(),
            vec![Node::Op {
                op,
                children: vec![0; sig.arity(op)],
            }],
            0,
        )
        .expect("one-node loop");
        return Some(vec![t]);
    }
    None
}

/// The `n`-th stage as minimized trees, sorted and free of duplicates.
pub fn enumerate_chain<S: AsRef<str>>(
    sig: &Arc<Signature>,
    params: &[S],
    n: usize,
    kind: ChainKind,
) -> Result<Vec<RatTree>> {
    let leaves: Vec<RatTree> = params.iter().map(|y| eta(sig, y.as_ref())).collect();
    let mut level: BTreeSet<RatTree> = match kind {
        ChainKind::FreeAlg => {
            let mut base: BTreeSet<RatTree> = leaves.iter().cloned().collect();
            base.extend(
                sig.op_ids()
                    .filter(|&op| sig.arity(op) == 0)
                    .map(|op| delta_op(sig, op, &[]).expect("nullary")),
            );
            base
        }
        ChainKind::Corec => closed_trees(sig)
            .ok_or(Error::InfiniteChain { level: 0 })?
            .into_iter()
            .collect(),
    };
    for _ in 0..n {
        level = step(sig, &level, &leaves);
    }
    Ok(level.into_iter().collect())
}

fn step(sig: &Arc<Signature>, level: &BTreeSet<RatTree>, leaves: &[RatTree]) -> BTreeSet<RatTree> {
    let prev: Vec<&RatTree> = level.iter().collect();
    let mut next: BTreeSet<RatTree> = leaves.iter().cloned().collect();
    for op in sig.op_ids() {
        let ar = sig.arity(op);
        let total = prev.len().pow(ar as u32);
        for code in 0..total {
            let mut rest = code;
            let mut children = Vec::with_capacity(ar);
            for _ in 0..ar {
                children.push(prev[rest % prev.len()].clone());
                rest /= prev.len();
            }
            children.reverse();
            next.insert(delta_op(sig, op, &children).expect("arity matches").minimize());
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(sig: &Arc<Signature>, kind: ChainKind, upto: usize) -> Vec<usize> {
        (0..=upto)
            .map(|n| enumerate_chain(sig, &["y"], n, kind).unwrap().len())
            .collect()
    }

    #[test]
    fn binary_chains() {
        let sig = Signature::new(&[("*", 2)]).unwrap();
        assert_eq!(sizes(&sig, ChainKind::FreeAlg, 3), vec![1, 2, 5, 26]);
        assert_eq!(sizes(&sig, ChainKind::Corec, 2), vec![1, 2, 5]);
    }

    #[test]
    fn unary_corec_chain() {
        let sig = Signature::new(&[("s", 1)]).unwrap();
        assert_eq!(sizes(&sig, ChainKind::Corec, 5), vec![1, 2, 3, 4, 5, 6]);
        for n in 0..5 {
            for t in enumerate_chain(&sig, &["y"], n, ChainKind::Corec).unwrap() {
                assert!(t.is_in_un(n));
            }
        }
    }

    #[test]
    fn corec_levels_are_nested() {
        let sig = Signature::new(&[("*", 2)]).unwrap();
        let u1 = enumerate_chain(&sig, &["y"], 1, ChainKind::Corec).unwrap();
        let u2 = enumerate_chain(&sig, &["y"], 2, ChainKind::Corec).unwrap();
        assert!(u1.iter().all(|t| u2.iter().any(|u| u.bisim_eq(t).unwrap())));
    }

    #[test]
    fn infinite_base_is_rejected() {
        let sig = Signature::new(&[("*", 2), ("c", 0)]).unwrap();
        assert_eq!(
            enumerate_chain(&sig, &["y"], 1, ChainKind::Corec).unwrap_err(),
            Error::InfiniteChain { level: 0 }
        );
        let sig = Signature::new(&[("c", 0), ("d", 0)]).unwrap();
        assert_eq!(enumerate_chain(&sig, &["y"], 0, ChainKind::Corec).unwrap().len(), 2);
        let empty = Signature::new::<&str>(&[]).unwrap();
        assert!(enumerate_chain(&empty, &["y"], 0, ChainKind::Corec).unwrap().is_empty());
        assert_eq!(enumerate_chain(&empty, &["y"], 1, ChainKind::Corec).unwrap().len(), 1);
    }
}
