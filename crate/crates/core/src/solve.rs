//! Recursive equation systems `e: X → SX` over rational trees and their
//! solutions.
//!
//! A right-hand side is either a bare variable or a tree whose leaves name
//! variables or parameters. Ideal systems (no bare variables) have unique
//! solutions; arbitrary systems have unique *strict* solutions, which send the
//! variables of the derived intersection `X_∞` to `bot`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sig::Signature;
use crate::tree::{GraphBuilder, Name, Node, NodeId, RatTree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rhs {
    /// A bare variable: the non-ideal summand.
    Var(Name),
    /// A tree over `X ∪ Y` leaves not rooted at a variable.
    Tree(RatTree),
}

impl Rhs {
    pub fn is_var(&self) -> bool {
        matches!(self, Rhs::Var(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Flat,
    Ideal,
    General,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqSystem {
    sig: Arc<Signature>,
    vars: Vec<Name>,
    params: Vec<Name>,
    rhs: Vec<Rhs>,
    index: HashMap<Name, usize>,
}

impl EqSystem {
    pub fn new(sig: Arc<Signature>, vars: Vec<Name>, params: Vec<Name>, rhs: Vec<Rhs>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateVariable(v.to_string()));
            }
        }
        let mut seen = BTreeSet::new();
        for p in &params {
            if index.contains_key(p) {
                return Err(Error::NameClash(p.to_string()));
            }
            if !seen.insert(p.clone()) {
                return Err(Error::DuplicateVariable(p.to_string()));
            }
        }
        if rhs.len() != vars.len() {
            let missing = vars.get(rhs.len()).map(|v| v.to_string()).unwrap_or_default();
            return Err(Error::UnknownVariable(missing));
        }
        let mut sig = sig;
        for r in &rhs {
            if let Rhs::Tree(t) = r {
                sig = Signature::join(&sig, t.sig()).ok_or(Error::SignatureMismatch)?;
            }
        }
        let mut checked = Vec::with_capacity(rhs.len());
        for (x, r) in vars.iter().zip(rhs) {
            checked.push(match r {
                Rhs::Var(y) => {
                    if !index.contains_key(&y) {
                        return Err(Error::UnknownVariable(y.to_string()));
                    }
                    Rhs::Var(y)
                }
                Rhs::Tree(t) => {
                    for leaf in t.params() {
                        if !index.contains_key(&leaf) && !seen.contains(&leaf) {
                            return Err(Error::UnknownParameter(leaf.to_string()));
                        }
                    }
                    if let Node::Param(p) = t.root_node() {
                        if index.contains_key(p) {
                            return Err(Error::UnguardedTree(x.to_string()));
                        }
                    }
                    Rhs::Tree(t.retarget(&sig)?)
                }
            });
        }
        Ok(EqSystem {
            sig,
            vars,
            params,
            rhs: checked,
            index,
        })
    }

    /// Convenience constructor from `(variable, rhs)` pairs.
    pub fn from_equations(sig: Arc<Signature>, params: &[&str], eqs: Vec<(&str, Rhs)>) -> Result<Self> {
        let (vars, rhs): (Vec<Name>, Vec<Rhs>) = eqs.into_iter().map(|(v, r)| (Name::from(v), r)).unzip();
        Self::new(sig, vars, params.iter().map(|&p| Name::from(p)).collect(), rhs)
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn vars(&self) -> &[Name] {
        &self.vars
    }

    pub fn params(&self) -> &[Name] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn rhs(&self, i: usize) -> &Rhs {
        &self.rhs[i]
    }

    pub fn equations(&self) -> impl Iterator<Item = (&Name, &Rhs)> {
        self.vars.iter().zip(&self.rhs)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn rhs_of(&self, name: &str) -> Option<&Rhs> {
        self.var_index(name).map(|i| &self.rhs[i])
    }

    pub fn is_var(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Variables whose right-hand side is a bare variable.
    pub fn unguarded_vars(&self) -> Vec<Name> {
        self.equations()
            .filter(|(_, r)| r.is_var())
            .map(|(x, _)| x.clone())
            .collect()
    }

    pub fn classify(&self) -> Class {
        if self.rhs.iter().any(Rhs::is_var) {
            return Class::General;
        }
        let flat = self.rhs.iter().all(|r| match r {
            Rhs::Tree(t) => match t.root_node() {
                Node::Op { children, .. } => children.iter().all(|&c| {
                    c != t.root() && matches!(t.node(c), Node::Param(p) if self.is_var(p))
                }),
                Node::Param(_) => false,
            },
            Rhs::Var(_) => false,
        });
        if flat {
            Class::Flat
        } else {
            Class::Ideal
        }
    }

    pub fn derived_chain(&self) -> DerivedChain {
        let redirect: Vec<Option<usize>> = self
            .rhs
            .iter()
            .map(|r| match r {
                Rhs::Var(y) => Some(self.index[y]),
                Rhs::Tree(_) => None,
            })
            .collect();
        let mut current: Vec<bool> = vec![true; self.vars.len()];
        let mut stages = vec![current.clone()];
        // X_{i+1} = { x ∈ X_i : e(x) = η(y) with y ∈ X_i }, X_0 = X
        loop {
            let next: Vec<bool> = (0..self.vars.len())
                .map(|x| current[x] && redirect[x].is_some_and(|y| current[y]))
                .collect();
            let stable = next == current;
            stages.push(next.clone());
            if stable {
                break;
            }
            current = next;
        }
        DerivedChain {
            vars: self.vars.clone(),
            stages: stages
                .into_iter()
                .map(|s| s.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect())
                .collect(),
            redirect,
        }
    }

    /// The unique solution of an ideal system.
    pub fn solve_unique(&self) -> Result<Solution> {
        if self.classify() == Class::General {
            return Err(Error::NotIdeal(
                self.unguarded_vars().iter().map(|v| v.to_string()).collect(),
            ));
        }
        Ok(self.solve_with(&vec![false; self.len()], self.sig.clone()))
    }

    /// The unique strict solution, over the signature extended by `bot`.
    pub fn solve_strict(&self) -> Solution {
        let chain = self.derived_chain();
        let mut bottom = vec![false; self.len()];
        for &x in chain.x_infinity() {
            bottom[x] = true;
        }
        self.solve_with(&bottom, self.sig.strict_closure())
    }

    fn solve_with(&self, bottom: &[bool], sig: Arc<Signature>) -> Solution {
        enum Target {
            Bottom,
            Guarded(usize),
        }
        // chase bare-variable chains to the first guarded right-hand side
        let targets: Vec<Target> = (0..self.len())
            .map(|x| {
                if bottom[x] {
                    return Target::Bottom;
                }
                let mut cur = x;
                for _ in 0..=self.len() {
                    match &self.rhs[cur] {
                        Rhs::Tree(_) => return Target::Guarded(cur),
                        Rhs::Var(y) => cur = self.index[y],
                    }
                }
                unreachable!("variable outside X_∞ reaches a guarded equation")
            })
            .collect();

        let mut builder = GraphBuilder::new(sig.clone());
        let bot_node = if bottom.iter().any(|&b| b) {
            let bot = sig.bottom().expect("strict signature for bottom values");
            Some(builder.push(Node::Op { op: bot, children: vec![] }))
        } else {
            None
        };
        let mut roots: Vec<Option<NodeId>> = vec![None; self.len()];
        for (x, r) in self.rhs.iter().enumerate() {
            if let Rhs::Tree(t) = r {
                roots[x] = Some(builder.import(t).expect("rhs trees share the system signature"));
            }
        }
        let target_node = |x: usize| match targets[x] {
            Target::Bottom => bot_node.expect("bottom node allocated"),
            Target::Guarded(g) => roots[g].expect("guarded variable has a tree"),
        };
        let forward: Vec<NodeId> = (0..builder.len())
            .map(|id| match builder.node(id) {
                Node::Param(p) => match self.index.get(p) {
                    Some(&x) => target_node(x),
                    None => id,
                },
                _ => id,
            })
            .collect();
        builder.redirect(&forward);
        let values = (0..self.len())
            .map(|x| {
                builder
                    .finish(target_node(x))
                    .expect("solution graph is well formed")
                    .minimize()
            })
            .collect();
        Solution {
            sig,
            vars: self.vars.clone(),
            values,
        }
    }

    /// `ê·e`: each right-hand side with its variables replaced by their own
    /// right-hand sides.
    pub fn self_substitute(&self) -> EqSystem {
        let images: HashMap<Name, RatTree> = self
            .equations()
            .map(|(x, r)| {
                let image = match r {
                    Rhs::Var(y) => RatTree::param(self.sig.clone(), y),
                    Rhs::Tree(t) => t.clone(),
                };
                (x.clone(), image)
            })
            .collect();
        let rhs = self
            .rhs
            .iter()
            .map(|r| match r {
                Rhs::Var(y) => self.rhs[self.index[y]].clone(),
                Rhs::Tree(t) => Rhs::Tree(substitute(t, &images).expect("compatible signatures")),
            })
            .collect();
        EqSystem::new(self.sig.clone(), self.vars.clone(), self.params.clone(), rhs)
            .expect("self-substitution preserves well-formedness")
    }

    /// Replaces every parameter leaf `y` by `h(y)`; the new parameters are the
    /// leaves of the images.
    pub fn substitute_params(&self, h: &HashMap<Name, RatTree>) -> Result<EqSystem> {
        let mut params: BTreeSet<Name> = BTreeSet::new();
        for y in &self.params {
            match h.get(y) {
                Some(t) => params.extend(t.params()),
                None => {
                    params.insert(y.clone());
                }
            }
        }
        let rhs = self
            .rhs
            .iter()
            .map(|r| match r {
                Rhs::Var(y) => Ok(Rhs::Var(y.clone())),
                Rhs::Tree(t) => Ok(Rhs::Tree(substitute(t, h)?)),
            })
            .collect::<Result<Vec<_>>>()?;
        EqSystem::new(self.sig.clone(), self.vars.clone(), params.into_iter().collect(), rhs)
    }
}

/// The descending chain `X = X_0 ⊇ X_1 ⊇ …` of derived subobjects.
///
/// `stages` ends with the first repetition, so its last two entries agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedChain {
    vars: Vec<Name>,
    stages: Vec<Vec<usize>>,
    redirect: Vec<Option<usize>>,
}

impl DerivedChain {
    pub fn stages(&self) -> &[Vec<usize>] {
        &self.stages
    }

    /// `X_n`, for any `n` (stationary past the end of `stages`).
    pub fn stage(&self, n: usize) -> &[usize] {
        &self.stages[n.min(self.stages.len() - 1)]
    }

    pub fn stage_names(&self, n: usize) -> Vec<Name> {
        self.stage(n).iter().map(|&i| self.vars[i].clone()).collect()
    }

    pub fn x_infinity(&self) -> &[usize] {
        self.stages.last().expect("chain has a stage")
    }

    pub fn x_infinity_names(&self) -> Vec<Name> {
        self.x_infinity().iter().map(|&i| self.vars[i].clone()).collect()
    }

    /// First index `k` with `X_k = X_{k+1}`.
    pub fn stable_index(&self) -> usize {
        self.stages.len() - 2
    }

    /// The variable named by a bare right-hand side.
    pub fn redirect(&self, x: usize) -> Option<usize> {
        self.redirect[x]
    }
}

/// An assignment of trees to the variables of a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    sig: Arc<Signature>,
    vars: Vec<Name>,
    values: Vec<RatTree>,
}

impl Solution {
    pub fn new(sig: Arc<Signature>, vars: Vec<Name>, values: Vec<RatTree>) -> Self {
        assert_eq!(vars.len(), values.len());
        Solution { sig, vars, values }
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn vars(&self) -> &[Name] {
        &self.vars
    }

    pub fn values(&self) -> &[RatTree] {
        &self.values
    }

    pub fn get(&self, var: &str) -> Option<&RatTree> {
        self.vars.iter().position(|v| &**v == var).map(|i| &self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &RatTree)> {
        self.vars.iter().zip(&self.values)
    }

    pub fn as_map(&self) -> HashMap<Name, RatTree> {
        self.iter().map(|(v, t)| (v.clone(), t.clone())).collect()
    }

    /// Pointwise bisimilarity.
    pub fn bisim_eq(&self, other: &Solution) -> Result<bool> {
        if self.vars != other.vars {
            return Ok(false);
        }
        for (a, b) in self.values.iter().zip(&other.values) {
            if !a.bisim_eq(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Replaces each leaf named in `s` by (a shared copy of) its image; other
/// leaves are kept.
pub fn substitute(tree: &RatTree, s: &HashMap<Name, RatTree>) -> Result<RatTree> {
    substitute_with(tree, |name| s.get(name))
}

/// Like [`substitute`], but every leaf not listed in `keep` must have an image.
pub fn substitute_total(tree: &RatTree, s: &HashMap<Name, RatTree>, keep: &[Name]) -> Result<RatTree> {
    if let Some(p) = tree.params().into_iter().find(|p| !s.contains_key(p) && !keep.contains(p)) {
        return Err(Error::DanglingLeaf(p.to_string()));
    }
    substitute(tree, s)
}

/// Substitution into a right-hand side; a bare variable becomes its image.
pub fn substitute_rhs(rhs: &Rhs, sig: &Arc<Signature>, s: &HashMap<Name, RatTree>) -> Result<RatTree> {
    match rhs {
        Rhs::Var(y) => Ok(s.get(y).cloned().unwrap_or_else(|| RatTree::param(sig.clone(), y))),
        Rhs::Tree(t) => substitute(t, s),
    }
}

pub(crate) fn substitute_with<'a>(
    tree: &RatTree,
    image: impl Fn(&str) -> Option<&'a RatTree>,
) -> Result<RatTree> {
    let mut builder = GraphBuilder::new(tree.sig().clone());
    let root = builder.import(tree)?;
    let original = builder.len();
    let mut imported: HashMap<Name, NodeId> = HashMap::new();
    let mut forward: Vec<NodeId> = (0..original).collect();
    for (id, slot) in forward.iter_mut().enumerate() {
        let name = match builder.node(id) {
            Node::Param(p) => p.clone(),
            _ => continue,
        };
        let Some(t) = image(&name) else { continue };
        let target = match imported.get(&name) {
            Some(&r) => r,
            None => {
                let r = builder.import(t)?;
                imported.insert(name, r);
                r
            }
        };
        *slot = target;
    }
    forward.extend(original..builder.len());
    builder.redirect(&forward);
    builder.finish(forward[root])
}
