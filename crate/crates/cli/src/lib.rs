//! Command-line front end for the `corec` library.
//!
//! [`run`] does all the work and returns the exit status with the rendered
//! output, so the binary is a thin wrapper and tests need no subprocess.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use corec::chain::{enumerate_chain, ChainKind};
use corec::finalg::{
    bloom_witness, completely_factorizable, find_system, fixpoints, idempotents, periodic_points, solutions_of,
};
use corec::laws::{run_law, run_monad_law, GenBounds, Law, LawReport, MonadLaw};
use corec::text::{parse_signature, SignatureRecord, TreeRecord};
use corec::{parse_algebra, parse_system, parse_tree_file, Error, Execution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "corec", version, about = "Rational trees, recursive equations and corecursive algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Run sequentially even when built with parallel support.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Freealg,
    Corec,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an equation system.
    Solve {
        file: PathBuf,
        /// Allow unguarded variables; they are sent to `bot`.
        #[arg(long)]
        strict: bool,
    },
    /// Decide whether two trees are equal. Exits 1 when they differ.
    Eq { left: PathBuf, right: PathBuf },
    /// Print the first levels of a tree.
    Unfold {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Enumerate a level of the free-algebra or corecursive chain.
    Chain {
        /// Signature file; its `params` line gives the parameters.
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        level: usize,
    },
    /// Run the randomized law suites. Exits 1 on any failure.
    Laws {
        /// A law name, `dagger`, `monad` or `all`.
        #[arg(long, default_value = "all")]
        law: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_vars: Option<usize>,
    },
    /// Finite algebra commands.
    Alg {
        #[command(subcommand)]
        command: AlgCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum AlgCommand {
    /// Check corecursiveness of a finite algebra against all flat systems
    /// with at most K variables (default: the carrier size).
    Check {
        file: PathBuf,
        #[arg(long)]
        max_vars: Option<usize>,
    },
}

/// Exit status plus what goes to stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome::with_code(EXIT_OK, stdout)
    }

    fn with_code(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome::usage(text)
            } else {
                Outcome::ok(text)
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let result = match &cli.command {
        Command::Solve { file, strict } => solve(file, *strict, cli.format),
        Command::Eq { left, right } => eq(left, right, cli.format),
        Command::Unfold { file, depth } => unfold(file, *depth, cli.format),
        Command::Chain { file, kind, level } => chain(file, *kind, *level, cli.format),
        Command::Laws {
            law,
            trials,
            seed,
            max_vars,
        } => laws(law, *trials, *seed, *max_vars, cli.format, exec),
        Command::Alg {
            command: AlgCommand::Check { file, max_vars },
        } => alg_check(file, *max_vars, cli.format),
    };
    result.unwrap_or_else(Outcome::usage)
}

type CmdResult = std::result::Result<Outcome, String>;

fn read(path: &Path) -> std::result::Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn located(path: &Path) -> impl Fn(Error) -> String + '_ {
    move |e| format!("{}: {e}", path.display())
}

fn render_json(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn solve(path: &Path, strict: bool, format: Format) -> CmdResult {
    let sys = parse_system(&read(path)?).map_err(located(path))?;
    let sol = if strict {
        sys.solve_strict()
    } else {
        match sys.solve_unique() {
            Ok(sol) => sol,
            Err(Error::NotIdeal(vars)) => {
                return Err(format!(
                    "{}: system is not guarded; variables with a bare variable right-hand side: {}; use --strict",
                    path.display(),
                    vars.join(", ")
                ))
            }
            Err(e) => return Err(located(path)(e)),
        }
    };
    Ok(Outcome::ok(match format {
        Format::Text => sol.to_string(),
        Format::Json => render_json(json!({
            "v": 1,
            "command": "solve",
            "strict": strict,
            "sig": SignatureRecord::from_sig(sol.sig()),
            "solution": sol
                .iter()
                .map(|(x, t)| json!({ "var": x.to_string(), "text": t.to_string(), "tree": TreeRecord::from_tree(t) }))
                .collect::<Vec<_>>(),
        })),
    }))
}

fn eq(left: &Path, right: &Path, format: Format) -> CmdResult {
    let a = parse_tree_file(&read(left)?).map_err(located(left))?;
    let b = parse_tree_file(&read(right)?).map_err(located(right))?;
    let equal = a.bisim_eq(&b).map_err(|e| e.to_string())?;
    let code = if equal { EXIT_OK } else { EXIT_FAIL };
    Ok(Outcome::with_code(
        code,
        match format {
            Format::Text => format!("{}\n", if equal { "equal" } else { "not equal" }),
            Format::Json => render_json(json!({ "v": 1, "command": "eq", "equal": equal })),
        },
    ))
}

fn unfold(path: &Path, depth: usize, format: Format) -> CmdResult {
    let t = parse_tree_file(&read(path)?).map_err(located(path))?;
    let term = t.unfold(depth).to_string();
    Ok(Outcome::ok(match format {
        Format::Text => format!("{term}\n"),
        Format::Json => render_json(json!({ "v": 1, "command": "unfold", "depth": depth, "term": term })),
    }))
}

fn chain(path: &Path, kind: Kind, level: usize, format: Format) -> CmdResult {
    let (sig, params) = parse_signature(&read(path)?).map_err(located(path))?;
    let (ck, name) = match kind {
        Kind::Freealg => (ChainKind::FreeAlg, "freealg"),
        Kind::Corec => (ChainKind::Corec, "corec"),
    };
    let params: Vec<&str> = params.iter().map(|p| &**p).collect();
    let elems = enumerate_chain(&sig, &params, level, ck).map_err(|e| e.to_string())?;
    let rendered: Vec<String> = elems.iter().map(ToString::to_string).collect();
    Ok(Outcome::ok(match format {
        Format::Text => {
            let mut out = String::new();
            for e in &rendered {
                out.push_str(e);
                out.push('\n');
            }
            out.push_str(&format!("cardinality {}\n", rendered.len()));
            out
        }
        Format::Json => render_json(json!({
            "v": 1,
            "command": "chain",
            "kind": name,
            "level": level,
            "cardinality": rendered.len(),
            "elements": rendered,
        })),
    }))
}

#[derive(Debug)]
enum Suite {
    Dagger(Law),
    Monad(MonadLaw),
}

fn select_laws(name: &str) -> std::result::Result<Vec<Suite>, String> {
    let dagger = || Law::ALL.into_iter().map(Suite::Dagger);
    let monad = || MonadLaw::ALL.into_iter().map(Suite::Monad);
    Ok(match name {
        "all" => dagger().chain(monad()).collect(),
        "dagger" => dagger().collect(),
        "monad" => monad().collect(),
        _ => {
            if let Ok(l) = name.parse::<Law>() {
                vec![Suite::Dagger(l)]
            } else if let Ok(l) = name.parse::<MonadLaw>() {
                vec![Suite::Monad(l)]
            } else {
                let known: Vec<&str> = Law::ALL
                    .iter()
                    .map(|l| l.name())
                    .chain(MonadLaw::ALL.iter().map(|l| l.name()))
                    .collect();
                return Err(format!("unknown law `{name}`; expected all, dagger, monad or one of {}", known.join(", ")));
            }
        }
    })
}

fn laws(name: &str, trials: usize, seed: u64, max_vars: Option<usize>, format: Format, exec: Execution) -> CmdResult {
    let suites = select_laws(name)?;
    let mut bounds = GenBounds::default();
    if let Some(k) = max_vars {
        if k == 0 {
            return Err("--max-vars must be positive".into());
        }
        bounds.max_vars = k;
    }
    let reports: Vec<LawReport> = suites
        .into_iter()
        .map(|s| match s {
            Suite::Dagger(l) => run_law(l, trials, seed, &bounds, exec),
            Suite::Monad(l) => run_monad_law(l, trials, seed, &bounds, exec),
        })
        .collect();
    let code = if reports.iter().all(LawReport::passed) {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    let out = match format {
        Format::Text => reports.iter().map(LawReport::render_details).collect(),
        Format::Json => render_json(json!({
            "v": 1,
            "command": "laws",
            "seed": seed,
            "reports": reports.iter().map(|r| json!({
                "law": r.law,
                "trials": r.trials,
                "failures": r.failures.iter().map(|f| json!({
                    "seed": f.seed,
                    "variable": f.variable,
                    "systems": f.systems,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })),
    };
    Ok(Outcome::with_code(code, out))
}

fn alg_check(path: &Path, max_vars: Option<usize>, format: Format) -> CmdResult {
    let alg = parse_algebra(&read(path)?).map_err(located(path))?;
    let k = max_vars.unwrap_or(alg.size()).max(1);
    let names = |s: &BTreeSet<usize>| -> Vec<String> { s.iter().map(|&a| alg.carrier()[a].clone()).collect() };

    let witness = find_system(&alg, k, |c| c == 1);
    let corecursive = witness.is_none();
    let mut facts: Vec<(&str, Value)> = vec![
        ("size", json!(alg.size())),
        ("max_vars", json!(k)),
        ("bounded_corecursive", json!(corecursive)),
        ("bloom_witness", json!(bloom_witness(&alg, k))),
    ];
    if let Ok(idem) = idempotents(&alg) {
        facts.push(("idempotents", json!(names(&idem))));
        let cf = completely_factorizable(&alg).expect("binary shape already checked");
        facts.push(("completely_factorizable", json!(names(&cf))));
    }
    if let Ok(fix) = fixpoints(&alg) {
        facts.push(("fixpoints", json!(names(&fix))));
        let per = periodic_points(&alg).expect("unary shape already checked");
        facts.push(("periodic_points", json!(names(&per))));
    }
    let witness = match witness {
        Some(flat) => {
            let sys = flat.to_system(alg.sig()).map_err(|e| e.to_string())?;
            let sols = solutions_of(&sys, &alg).map_err(|e| e.to_string())?;
            Some((sys, sols.len()))
        }
        None => None,
    };

    Ok(Outcome::ok(match format {
        Format::Text => {
            let mut out = String::new();
            for (key, value) in &facts {
                let shown = match value {
                    Value::Array(items) => {
                        let items: Vec<&str> = items.iter().filter_map(Value::as_str).collect();
                        format!("{{{}}}", items.join(", "))
                    }
                    other => other.to_string(),
                };
                out.push_str(&format!("{key}: {shown}\n"));
            }
            if let Some((sys, count)) = &witness {
                out.push_str(&format!("witness: {count} solutions\n"));
                for line in system_lines(sys) {
                    out.push_str(&format!("  {line}\n"));
                }
            }
            out
        }
        Format::Json => {
            let mut record = serde_json::Map::new();
            record.insert("v".into(), json!(1));
            record.insert("command".into(), json!("alg check"));
            for (key, value) in facts {
                record.insert(key.into(), value);
            }
            if let Some((sys, count)) = &witness {
                record.insert(
                    "witness".into(),
                    json!({ "solutions": count, "equations": system_lines(sys) }),
                );
            }
            render_json(Value::Object(record))
        }
    }))
}

fn system_lines(sys: &corec::EqSystem) -> Vec<String> {
    sys.equations()
        .map(|(x, r)| format!("{x} = {}", corec::text::render_rhs(r)))
        .collect()
}
