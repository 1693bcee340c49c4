//! Randomized checks of the equational laws of strict solutions: fixpoint,
//! functoriality, parameter, double iteration and dinaturality, all at the
//! free monad on the strict signature. Also the monad laws of substitution.

mod checks;
mod gen;
mod monad_laws;
mod shrink;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::solve::{substitute, EqSystem, Rhs};
use std::collections::HashMap;

use crate::tree::{Name, RatTree};

pub use checks::{check_dinaturality, check_double, check_fixpoint, check_functoriality, check_parameter};
pub use gen::{
    gen_dinaturality, gen_hom_instance, gen_param_map, gen_system, gen_tree, lift_hom, rhs_from_tree, rng,
    DinatInstance, GenBounds,
};
pub use monad_laws::{run_monad_law, MonadLaw};
pub use shrink::shrink_system;

/// A map of variables `h: X → X'` between two systems that commutes with
/// their right-hand sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalgHom {
    source: EqSystem,
    target: EqSystem,
    h: Vec<usize>,
}

impl CoalgHom {
    /// Checks the square: relabelling `source(x)` along `h` gives
    /// `target(h(x))`.
    pub fn new(source: EqSystem, target: EqSystem, h: Vec<usize>) -> Result<Self> {
        if h.len() != source.len() || h.iter().any(|&y| y >= target.len()) {
            return Err(Error::UnknownVariable("h is not total".into()));
        }
        let relabel: HashMap<Name, RatTree> = source
            .vars()
            .iter()
            .zip(&h)
            .map(|(x, &y)| (x.clone(), RatTree::param(target.sig().clone(), &target.vars()[y])))
            .collect();
        for (&y, (name, r)) in h.iter().zip(source.equations()) {
            let ok = match (r, target.rhs(y)) {
                (Rhs::Var(v), Rhs::Var(w)) => target.vars()[h[source.var_index(v).expect("var")]] == *w,
                (Rhs::Tree(t), Rhs::Tree(u)) => substitute(t, &relabel)?.bisim_eq(u)?,
                _ => false,
            };
            if !ok {
                return Err(Error::SquareViolated(name.to_string()));
            }
        }
        Ok(CoalgHom { source, target, h })
    }

    pub fn identity(sys: &EqSystem) -> Self {
        CoalgHom {
            source: sys.clone(),
            target: sys.clone(),
            h: (0..sys.len()).collect(),
        }
    }

    pub fn source(&self) -> &EqSystem {
        &self.source
    }

    pub fn target(&self) -> &EqSystem {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Law {
    Fixpoint,
    Functoriality,
    Parameter,
    Double,
    Dinaturality,
}

impl Law {
    pub const ALL: [Law; 5] = [
        Law::Fixpoint,
        Law::Functoriality,
        Law::Parameter,
        Law::Double,
        Law::Dinaturality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::Fixpoint => "fixpoint",
            Law::Functoriality => "functoriality",
            Law::Parameter => "parameter",
            Law::Double => "double",
            Law::Dinaturality => "dinaturality",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Law {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Law::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown law `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub seed: Option<u64>,
    /// Rendered systems making up the counterexample.
    pub systems: Vec<String>,
    pub variable: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport {
    pub law: String,
    pub trials: usize,
    pub failures: Vec<Failure>,
}

impl LawReport {
    pub fn new(law: impl Into<String>) -> Self {
        LawReport {
            law: law.into(),
            trials: 0,
            failures: Vec::new(),
        }
    }

    pub(crate) fn single(law: Law, failure: Option<Failure>) -> Self {
        LawReport {
            law: law.name().to_string(),
            trials: 1,
            failures: failure.into_iter().collect(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// The summary line followed by one block per failure.
    pub fn render_details(&self) -> String {
        let mut out = format!("{self}\n");
        for f in &self.failures {
            match f.seed {
                Some(seed) => out.push_str(&format!("  seed={seed} variable={}\n", f.variable)),
                None => out.push_str(&format!("  variable={}\n", f.variable)),
            }
            for s in &f.systems {
                for line in s.lines() {
                    out.push_str(&format!("    {line}\n"));
                }
            }
        }
        out
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "law={} trials={} failures={}", self.law, self.trials, self.failures.len())
    }
}

/// Runs `trials` instances with seeds `seed, seed+1, …`. Failures are
/// shrunk and sorted by seed, so the report does not depend on `exec`.
pub fn run_law(law: Law, trials: usize, seed: u64, bounds: &GenBounds, exec: Execution) -> LawReport {
    let results = exec.map_range(seed..seed + trials as u64, |s| run_trial(law, s, bounds));
    let mut failures: Vec<Failure> = results.into_iter().flatten().collect();
    failures.sort_by_key(|f| f.seed);
    LawReport {
        law: law.name().to_string(),
        trials,
        failures,
    }
}

fn run_trial(law: Law, seed: u64, bounds: &GenBounds) -> Option<Failure> {
    let report = match law {
        Law::Fixpoint => {
            let sys = gen_system(seed, bounds);
            let sys = shrink_system(sys, |s| !check_fixpoint(s).passed());
            check_fixpoint(&sys)
        }
        Law::Double => {
            let sys = gen_system(seed, bounds);
            let sys = shrink_system(sys, |s| !check_double(s).passed());
            check_double(&sys)
        }
        Law::Functoriality => check_functoriality(&gen_hom_instance(seed, bounds)),
        Law::Parameter => {
            let mut r = rng(seed);
            let sys = gen::gen_system_with(&mut r, bounds, "x");
            let h = gen_param_map(&mut r, bounds);
            let sys = shrink_system(sys, |s| !check_parameter(s, &h).passed());
            check_parameter(&sys, &h)
        }
        Law::Dinaturality => check_dinaturality(&gen_dinaturality(seed, bounds)),
    };
    report.failures.into_iter().next().map(|f| Failure { seed: Some(seed), ..f })
}
