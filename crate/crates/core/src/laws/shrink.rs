use std::collections::HashMap;

use crate::monad::delta_op;
use crate::solve::{substitute, EqSystem, Rhs};
use crate::tree::{Node, RatTree};

/// Greedily deletes variables and right-hand-side nodes (replacing them by
/// `bot`) while `fails` keeps holding.
pub fn shrink_system(sys: EqSystem, fails: impl Fn(&EqSystem) -> bool) -> EqSystem {
    if !fails(&sys) {
        return sys;
    }
    let mut current = sys;
    'outer: loop {
        for candidate in smaller(&current) {
            if fails(&candidate) {
                current = candidate;
                continue 'outer;
            }
        }
        return current;
    }
}

fn smaller(sys: &EqSystem) -> Vec<EqSystem> {
    let sig = sys.sig().strict_closure();
    let bot_op = sig.bottom().expect("strict");
    let bot = delta_op(&sig, bot_op, &[]).expect("nullary");
    let mut out = Vec::new();
    if sys.len() > 1 {
        for (i, x) in sys.vars().iter().enumerate() {
            let map = HashMap::from([(x.clone(), bot.clone())]);
            let mut vars = Vec::new();
            let mut rhs = Vec::new();
            for (j, (y, r)) in sys.equations().enumerate() {
                if j == i {
                    continue;
                }
                vars.push(y.clone());
                rhs.push(match r {
                    Rhs::Var(v) if v == x => Rhs::Tree(bot.clone()),
                    Rhs::Var(v) => Rhs::Var(v.clone()),
                    Rhs::Tree(t) => Rhs::Tree(substitute(t, &map).expect("same signature")),
                });
            }
            if let Ok(s) = EqSystem::new(sig.clone(), vars, sys.params().to_vec(), rhs) {
                out.push(s);
            }
        }
    }
    for i in 0..sys.len() {
        let replacements: Vec<Rhs> = match sys.rhs(i) {
            Rhs::Var(_) => vec![Rhs::Tree(bot.clone())],
            Rhs::Tree(t) => (0..t.len())
                .filter(|&v| v != t.root() && t.node(v) != &Node::Op { op: bot_op, children: vec![] })
                .filter_map(|v| {
                    let mut nodes = t.nodes().to_vec();
                    nodes[v] = Node::Op {
                        op: bot_op,
                        children: vec![],
                    };
                    RatTree::from_graph(sig.clone(), nodes, t.root()).ok().map(Rhs::Tree)
                })
                .collect(),
        };
        for r in replacements {
            let mut rhs: Vec<Rhs> = (0..sys.len()).map(|j| sys.rhs(j).clone()).collect();
            rhs[i] = r;
            if let Ok(s) = EqSystem::new(sig.clone(), sys.vars().to_vec(), sys.params().to_vec(), rhs) {
                out.push(s);
            }
        }
    }
    out
}
