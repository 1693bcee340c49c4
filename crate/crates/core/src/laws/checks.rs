use std::collections::HashMap;

use crate::monad::kleisli_extend;
use crate::solve::{substitute, substitute_rhs, EqSystem, Solution};
use crate::tree::{Name, RatTree};

use super::gen::rhs_from_tree;
use super::{CoalgHom, DinatInstance, Failure, Law, LawReport};

fn failure(systems: &[&EqSystem], variable: impl Into<String>) -> Option<Failure> {
    Some(Failure {
        seed: None,
        systems: systems.iter().map(|s| s.to_string()).collect(),
        variable: variable.into(),
    })
}

fn same(a: &RatTree, b: &RatTree) -> bool {
    a.bisim_eq(b).unwrap_or(false)
}

/// Each strict solution value equals its right-hand side with the solution
/// substituted in.
pub fn check_fixpoint(sys: &EqSystem) -> LawReport {
    let sol = sys.solve_strict();
    let map = sol.as_map();
    let bad = sys.equations().zip(sol.values()).find_map(|((x, r), value)| {
        match substitute_rhs(r, sol.sig(), &map) {
            Ok(unfolded) if same(value, &unfolded) => None,
            _ => Some(x.to_string()),
        }
    });
    LawReport::single(Law::Fixpoint, bad.and_then(|x| failure(&[sys], x)))
}

/// Solutions of the source are the target's solutions composed with `h`.
pub fn check_functoriality(hom: &CoalgHom) -> LawReport {
    let s = hom.source().solve_strict();
    let t = hom.target().solve_strict();
    let bad = hom
        .map()
        .iter()
        .enumerate()
        .find(|&(x, &y)| !same(&s.values()[x], &t.values()[y]))
        .map(|(x, _)| hom.source().vars()[x].to_string());
    LawReport::single(
        Law::Functoriality,
        bad.and_then(|x| failure(&[hom.source(), hom.target()], x)),
    )
}

/// Substituting parameters before or after solving gives the same result.
/// Closed solution values are also checked to be fixed by the substitution.
pub fn check_parameter(sys: &EqSystem, h: &HashMap<Name, RatTree>) -> LawReport {
    let mut total = h.clone();
    for y in sys.params() {
        total
            .entry(y.clone())
            .or_insert_with(|| RatTree::param(sys.sig().clone(), y));
    }
    let ext = kleisli_extend(total);
    let substituted = match sys.substitute_params(h) {
        Ok(s) => s,
        Err(e) => return LawReport::single(Law::Parameter, failure(&[sys], format!("substitution: {e}"))),
    };
    let before = sys.solve_strict();
    let after = substituted.solve_strict();
    let mut bad = None;
    for ((x, value), other) in before.iter().zip(after.values()) {
        let Ok(mapped) = ext.apply(value) else {
            bad = Some(format!("{x} (dangling parameter)"));
            break;
        };
        if !same(&mapped, other) {
            bad = Some(x.to_string());
            break;
        }
        if value.is_closed() && mapped != *value {
            bad = Some(format!("{x} (closed value moved)"));
            break;
        }
    }
    LawReport::single(Law::Parameter, bad.and_then(|x| failure(&[sys, &substituted], x)))
}

/// `e` and `ê·e` have the same strict solution, and the derived chain of
/// `ê·e` is the even part of the chain of `e`.
pub fn check_double(sys: &EqSystem) -> LawReport {
    let doubled = sys.self_substitute();
    let (c1, c2) = (sys.derived_chain(), doubled.derived_chain());
    if let Some(n) = (0..=sys.len() + 1).find(|&n| c2.stage(n) != c1.stage(2 * n)) {
        return LawReport::single(Law::Double, failure(&[sys, &doubled], format!("stage X_{n}")));
    }
    let (s1, s2) = (sys.solve_strict(), doubled.solve_strict());
    let bad = s1
        .iter()
        .zip(s2.values())
        .find(|((_, a), b)| !same(a, b))
        .map(|((x, _), _)| x.to_string());
    LawReport::single(Law::Double, bad.and_then(|x| failure(&[sys, &doubled], x)))
}

fn mapping(names: &[Name], trees: &[RatTree]) -> HashMap<Name, RatTree> {
    names.iter().cloned().zip(trees.iter().cloned()).collect()
}

fn composite(
    inst: &DinatInstance,
    vars: &[Name],
    first: &[RatTree],
    then: &HashMap<Name, RatTree>,
) -> crate::error::Result<EqSystem> {
    let rhs = first
        .iter()
        .map(|t| substitute(t, then).map(|u| rhs_from_tree(u, vars)))
        .collect::<crate::error::Result<Vec<_>>>()?;
    EqSystem::new(inst.sig.clone(), vars.to_vec(), inst.params.clone(), rhs)
}

/// `(ĝ·f)† = ((f̂·g)†)^·f`.
pub fn check_dinaturality(inst: &DinatInstance) -> LawReport {
    let (f, g) = (mapping(&inst.xs, &inst.f), mapping(&inst.zs, &inst.g));
    let (left, right) = match (composite(inst, &inst.xs, &inst.f, &g), composite(inst, &inst.zs, &inst.g, &f)) {
        (Ok(l), Ok(r)) => (l, r),
        (l, r) => {
            let err = l.err().or(r.err()).expect("one side failed");
            return LawReport::single(
                Law::Dinaturality,
                Some(Failure {
                    seed: None,
                    systems: vec![],
                    variable: format!("construction: {err}"),
                }),
            );
        }
    };
    let s: Solution = left.solve_strict();
    let t = right.solve_strict().as_map();
    let bad = inst.xs.iter().zip(&inst.f).zip(s.values()).find_map(|((x, fx), value)| {
        match substitute(fx, &t) {
            Ok(expected) if same(value, &expected) => None,
            _ => Some(x.to_string()),
        }
    });
    LawReport::single(Law::Dinaturality, bad.and_then(|x| failure(&[&left, &right], x)))
}
