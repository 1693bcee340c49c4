use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::Result;
use crate::exec::Execution;
use crate::monad::{delta_op, eta, kleisli_extend, unit_mapping};
use crate::sig::OpId;
use crate::tree::{Name, RatTree};

use super::gen::{gen_tree, rng, GenBounds};
use super::{Failure, LawReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonadLaw {
    /// `η̂ = id`
    LeftUnit,
    /// `ĥ ∘ η = h`
    RightUnit,
    /// `k̂ ∘ ĥ = (k̂ ∘ h)^`
    Associativity,
    /// `ĥ(σ(t_1, …)) = σ(ĥ t_1, …)`
    DeltaNaturality,
}

impl MonadLaw {
    pub const ALL: [MonadLaw; 4] = [
        MonadLaw::LeftUnit,
        MonadLaw::RightUnit,
        MonadLaw::Associativity,
        MonadLaw::DeltaNaturality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MonadLaw::LeftUnit => "left-unit",
            MonadLaw::RightUnit => "right-unit",
            MonadLaw::Associativity => "associativity",
            MonadLaw::DeltaNaturality => "delta-naturality",
        }
    }
}

impl fmt::Display for MonadLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MonadLaw {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        MonadLaw::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown monad law `{s}`"))
    }
}

fn random_map<R: Rng>(rng: &mut R, bounds: &GenBounds) -> HashMap<Name, RatTree> {
    let sig = bounds.sig.strict_closure();
    bounds
        .params
        .iter()
        .map(|y| (y.clone(), gen_tree(rng, &sig, &bounds.params, bounds.max_rhs_nodes, false)))
        .collect()
}

fn trial(law: MonadLaw, seed: u64, bounds: &GenBounds) -> Result<Option<String>> {
    let mut rng = rng(seed);
    let sig = bounds.sig.strict_closure();
    let t = gen_tree(&mut rng, &sig, &bounds.params, bounds.max_rhs_nodes, false);
    let h = random_map(&mut rng, bounds);
    let k = random_map(&mut rng, bounds);
    let differ = |a: &RatTree, b: &RatTree| a.bisim_eq(b).map(|eq| !eq);
    Ok(match law {
        MonadLaw::LeftUnit => {
            let id = kleisli_extend(unit_mapping(&sig, &bounds.params));
            differ(&id.apply(&t)?, &t)?.then(|| format!("tree {t}"))
        }
        MonadLaw::RightUnit => {
            let ext = kleisli_extend(h.clone());
            let mut bad = None;
            for y in &bounds.params {
                if differ(&ext.apply(&eta(&sig, y))?, &h[y])? {
                    bad = Some(format!("param {y}"));
                    break;
                }
            }
            bad
        }
        MonadLaw::Associativity => {
            let (eh, ek) = (kleisli_extend(h), kleisli_extend(k));
            let lhs = ek.apply(&eh.apply(&t)?)?;
            let rhs = eh.then(&ek)?.apply(&t)?;
            differ(&lhs, &rhs)?.then(|| format!("tree {t}"))
        }
        MonadLaw::DeltaNaturality => {
            let op = OpId(rng.gen_range(0..sig.len()) as u32);
            let children: Vec<RatTree> = (0..sig.arity(op))
                .map(|_| gen_tree(&mut rng, &sig, &bounds.params, bounds.max_rhs_nodes, false))
                .collect();
            let ext = kleisli_extend(h);
            let lhs = ext.apply(&delta_op(&sig, op, &children)?)?;
            let mapped = children.iter().map(|c| ext.apply(c)).collect::<Result<Vec<_>>>()?;
            let rhs = delta_op(&sig, op, &mapped)?;
            differ(&lhs, &rhs)?.then(|| format!("symbol {}", sig.symbol(op)))
        }
    })
}

pub fn run_monad_law(law: MonadLaw, trials: usize, seed: u64, bounds: &GenBounds, exec: Execution) -> LawReport {
    let results = exec.map_range(seed..seed + trials as u64, |s| {
        let outcome = trial(law, s, bounds).unwrap_or_else(|e| Some(format!("error: {e}")));
        outcome.map(|variable| Failure {
            seed: Some(s),
            systems: vec![],
            variable,
        })
    });
    LawReport {
        law: law.name().to_string(),
        trials,
        failures: results.into_iter().flatten().collect(),
    }
}
