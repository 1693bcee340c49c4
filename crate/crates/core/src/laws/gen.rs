//! Seeded generators for systems, trees and law instances.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sig::{OpId, Signature};
use crate::solve::{EqSystem, Rhs};
use crate::tree::{Name, Node, RatTree};

use super::CoalgHom;

#[derive(Debug, Clone)]
pub struct GenBounds {
    pub sig: Arc<Signature>,
    pub max_vars: usize,
    pub params: Vec<Name>,
    pub max_rhs_nodes: usize,
    /// Probability that a right-hand side is a tree rather than a bare variable.
    pub guarded: f64,
}

impl Default for GenBounds {
    fn default() -> Self {
        GenBounds {
            sig: Signature::named("law", &[("*", 2), ("s", 1), ("c", 0)]).expect("valid"),
            max_vars: 4,
            params: vec![Name::from("a"), Name::from("b")],
            max_rhs_nodes: 6,
            guarded: 0.6,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn var_names(prefix: &str, n: usize) -> Vec<Name> {
    (0..n).map(|i| Name::from(format!("{prefix}{i}"))).collect()
}

fn random_op<R: Rng>(rng: &mut R, sig: &Signature) -> OpId {
    let user = sig.user_ops().len();
    match sig.bottom() {
        Some(bot) if user == 0 || rng.gen_bool(0.05) => bot,
        _ => OpId(rng.gen_range(0..user) as u32),
    }
}

/// A random graph of at most `max_nodes` nodes. Leaves are drawn from
/// `leaves`; once the budget is spent, open child slots point back at
/// existing nodes, which creates sharing and cycles.
pub fn gen_tree<R: Rng>(
    rng: &mut R,
    sig: &Arc<Signature>,
    leaves: &[Name],
    max_nodes: usize,
    guarded_root: bool,
) -> RatTree {
    let budget = rng.gen_range(1..=max_nodes.max(1));
    let mut nodes: Vec<Node> = Vec::new();
    let mut slots: Vec<(usize, usize)> = Vec::new();
    let push_op = |rng: &mut R, nodes: &mut Vec<Node>, slots: &mut Vec<(usize, usize)>| {
        let op = random_op(rng, sig);
        let id = nodes.len();
        let ar = sig.arity(op);
        nodes.push(Node::Op {
            op,
            children: vec![usize::MAX; ar],
        });
        slots.extend((0..ar).map(|i| (id, i)));
        id
    };
    if guarded_root || leaves.is_empty() || rng.gen_bool(0.8) {
        push_op(rng, &mut nodes, &mut slots);
    } else {
        nodes.push(Node::Param(leaves.choose(rng).expect("nonempty").clone()));
    }
    let mut next = 0;
    while next < slots.len() {
        let (parent, slot) = slots[next];
        next += 1;
        let r: f64 = rng.gen();
        let child = if nodes.len() < budget && r < 0.45 {
            push_op(rng, &mut nodes, &mut slots)
        } else if nodes.len() < budget && !leaves.is_empty() {
            nodes.push(Node::Param(leaves.choose(rng).expect("nonempty").clone()));
            nodes.len() - 1
        } else {
            let existing_leaves: Vec<usize> = (0..nodes.len())
                .filter(|&i| matches!(nodes[i], Node::Param(_)))
                .collect();
            match existing_leaves.choose(rng) {
                Some(&leaf) if r < 0.7 => leaf,
                _ => rng.gen_range(0..nodes.len()),
            }
        };
        if let Node::Op { children, .. } = &mut nodes[parent] {
            children[slot] = child;
        }
    }
    RatTree::from_graph(sig.clone(), nodes, 0).expect("generated graph is well formed")
}

/// A bare variable leaf becomes [`Rhs::Var`]; anything else is a tree.
pub fn rhs_from_tree(t: RatTree, vars: &[Name]) -> Rhs {
    match t.root_node() {
        Node::Param(p) if vars.contains(p) => Rhs::Var(p.clone()),
        _ => Rhs::Tree(t),
    }
}

/// A random system on `x0, x1, …` over the strict closure of the bounds'
/// signature, with parameters from the bounds.
pub fn gen_system(seed: u64, bounds: &GenBounds) -> EqSystem {
    let mut rng = rng(seed);
    gen_system_with(&mut rng, bounds, "x")
}

pub(crate) fn gen_system_with<R: Rng>(rng: &mut R, bounds: &GenBounds, prefix: &str) -> EqSystem {
    let n = rng.gen_range(1..=bounds.max_vars.max(1));
    gen_system_on(rng, bounds, &var_names(prefix, n))
}

fn gen_system_on<R: Rng>(rng: &mut R, bounds: &GenBounds, vars: &[Name]) -> EqSystem {
    let sig = bounds.sig.strict_closure();
    let rhs = vars
        .iter()
        .map(|_| {
            if rng.gen_bool(bounds.guarded.clamp(0.0, 1.0)) {
                let leaves = leaf_pool(rng, vars, &bounds.params);
                Rhs::Tree(gen_tree(rng, &sig, &leaves, bounds.max_rhs_nodes, true))
            } else {
                Rhs::Var(vars.choose(rng).expect("nonempty").clone())
            }
        })
        .collect();
    EqSystem::new(sig, vars.to_vec(), bounds.params.clone(), rhs).expect("generated system is well formed")
}

/// Variables weighted above parameters.
fn leaf_pool<R: Rng>(rng: &mut R, vars: &[Name], params: &[Name]) -> Vec<Name> {
    let mut pool: Vec<Name> = vars.iter().flat_map(|v| [v.clone(), v.clone()]).collect();
    pool.extend(params.iter().cloned());
    if rng.gen_bool(0.2) {
        pool.retain(|p| vars.contains(p));
    }
    pool
}

/// Lifts `target` along the surjection `h: source_vars → target vars`: each
/// right-hand side is copied from the image variable, with every variable
/// leaf replaced by a random preimage.
pub fn lift_hom<R: Rng>(rng: &mut R, target: &EqSystem, source_vars: Vec<Name>, h: Vec<usize>) -> Result<CoalgHom> {
    let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); target.len()];
    for (x, &y) in h.iter().enumerate() {
        preimages.get_mut(y).ok_or(Error::NotSurjective)?.push(x);
    }
    if h.len() != source_vars.len() || preimages.iter().any(Vec::is_empty) {
        return Err(Error::NotSurjective);
    }
    let pick = |y: &str, rng: &mut R| -> Name {
        let j = target.var_index(y).expect("target variable");
        source_vars[*preimages[j].choose(rng).expect("surjective")].clone()
    };
    let rhs = h
        .iter()
        .map(|&y| match target.rhs(y) {
            Rhs::Var(v) => Rhs::Var(pick(v, rng)),
            Rhs::Tree(t) => {
                let nodes = t
                    .nodes()
                    .iter()
                    .map(|n| match n {
                        Node::Param(p) if target.is_var(p) => Node::Param(pick(p, rng)),
                        other => other.clone(),
                    })
                    .collect();
                Rhs::Tree(RatTree::from_graph(t.sig().clone(), nodes, t.root()).expect("relabelled graph"))
            }
        })
        .collect();
    let source = EqSystem::new(target.sig().clone(), source_vars, target.params().to_vec(), rhs)?;
    CoalgHom::new(source, target.clone(), h)
}

pub fn gen_hom_instance(seed: u64, bounds: &GenBounds) -> CoalgHom {
    let mut rng = rng(seed);
    let target = gen_system_with(&mut rng, bounds, "x");
    let n = target.len() + rng.gen_range(0..=bounds.max_vars.max(1));
    let mut h: Vec<usize> = (0..target.len()).collect();
    h.extend((target.len()..n).map(|_| rng.gen_range(0..target.len())));
    h.shuffle(&mut rng);
    lift_hom(&mut rng, &target, var_names("u", n), h).expect("surjection by construction")
}

/// A parameter substitution `h: Y → trees over Y`.
pub fn gen_param_map<R: Rng>(rng: &mut R, bounds: &GenBounds) -> HashMap<Name, RatTree> {
    let sig = bounds.sig.strict_closure();
    bounds
        .params
        .iter()
        .map(|y| {
            let leaves = if rng.gen_bool(0.3) { vec![] } else { bounds.params.clone() };
            (y.clone(), gen_tree(rng, &sig, &leaves, bounds.max_rhs_nodes, false))
        })
        .collect()
}

/// Mappings `f: X → trees over Z ∪ Y` and `g: Z → trees over X ∪ Y`.
#[derive(Debug, Clone)]
pub struct DinatInstance {
    pub sig: Arc<Signature>,
    pub params: Vec<Name>,
    pub xs: Vec<Name>,
    pub zs: Vec<Name>,
    pub f: Vec<RatTree>,
    pub g: Vec<RatTree>,
}

pub fn gen_dinaturality(seed: u64, bounds: &GenBounds) -> DinatInstance {
    let mut rng = rng(seed);
    let sig = bounds.sig.strict_closure();
    let xs = var_names("x", rng.gen_range(1..=bounds.max_vars.max(1)));
    let zs = var_names("z", rng.gen_range(1..=bounds.max_vars.max(1)));
    let side = |targets: &[Name], count: usize, rng: &mut ChaCha8Rng| -> Vec<RatTree> {
        (0..count)
            .map(|_| {
                let leaves = leaf_pool(rng, targets, &bounds.params);
                gen_tree(rng, &sig, &leaves, bounds.max_rhs_nodes, false)
            })
            .collect()
    };
    let f = side(&zs, xs.len(), &mut rng);
    let g = side(&xs, zs.len(), &mut rng);
    DinatInstance {
        sig,
        params: bounds.params.clone(),
        xs,
        zs,
        f,
        g,
    }
}
