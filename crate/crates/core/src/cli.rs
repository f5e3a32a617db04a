//! Command-line front end. Every subcommand parses its inputs, calls the
//! library, and formats the result; [`run`] returns the output instead of
//! printing so it can be tested.

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forcing::{self, AtomicTuple, FrcEngine, LabeledPoset};
use crate::formula::Formula;
use crate::hfset::{parse_list, HFSet};
use crate::lab::{self, Encoding, LabConfig};
use crate::semantics::{self, AxiomName, AxiomSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "forcing-lab", version, about = "Executable forcing over hereditarily finite sets")]
pub struct Cli {
    #[arg(long, value_enum, global = true, default_value = "text")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct PosetArg {
    /// `builtin:trivial|C2|A2`, a JSON file, or inline JSON.
    #[arg(long)]
    pub poset: String,
    /// Take the reflexive-transitive closure of the given order.
    #[arg(long)]
    pub close_leq: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Echo the canonical form and arity of a formula.
    Parse { formula: String },
    Arity { formula: String },
    /// Evaluate a formula in a model (`Vn` or an HF literal).
    Sats {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "")]
        env: String,
        /// Require arity ≤ |env| and env ⊆ model.
        #[arg(long)]
        strict: bool,
        formula: String,
    },
    /// Emit the forcing formula of a core formula.
    Forces { formula: String },
    #[command(name = "frc-at")]
    FrcAt {
        #[command(flatten)]
        poset: PosetArg,
        #[arg(long)]
        ft: u8,
        #[arg(long)]
        t1: String,
        #[arg(long)]
        t2: String,
        #[arg(long)]
        p: String,
    },
    Val {
        #[command(flatten)]
        poset: PosetArg,
        /// Comma-separated condition labels.
        #[arg(long)]
        filter: String,
        #[arg(long)]
        name: String,
    },
    #[command(name = "check-axioms")]
    CheckAxioms {
        #[arg(long)]
        model: String,
        /// Comma-separated axiom names, or an axiom set (ZFfin, Z, ZC, ZF, ZFC).
        #[arg(long)]
        axioms: Option<String>,
    },
    Generics {
        #[command(flatten)]
        poset: PosetArg,
    },
    Lab(LabArgs),
    Registry,
}

#[derive(Debug, Args)]
pub struct LabArgs {
    /// truth, density, definability, powerset, extension, check or adequacy.
    pub experiment: String,
    #[arg(long)]
    pub poset_bound: Option<usize>,
    #[arg(long)]
    pub name_rank_bound: Option<usize>,
    #[arg(long)]
    pub name_width: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub env_len: Option<usize>,
    #[arg(long)]
    pub max_index: Option<usize>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub closure_depth: Option<usize>,
    #[arg(long, value_parser = ["vonneumann", "tag"])]
    pub encoding: Option<String>,
    #[arg(long)]
    pub no_iso_reduce: bool,
    #[arg(long)]
    pub max_counterexamples: Option<usize>,
    /// Name for the powerset experiment (default: every small name in the ground).
    #[arg(long)]
    pub tau: Option<String>,
    #[arg(long)]
    pub parallel: bool,
}

impl LabArgs {
    pub fn config(&self) -> Result<LabConfig> {
        let d = LabConfig::default();
        Ok(LabConfig {
            poset_bound: self.poset_bound.unwrap_or(d.poset_bound),
            name_rank_bound: self.name_rank_bound.unwrap_or(d.name_rank_bound),
            name_width: self.name_width.unwrap_or(d.name_width),
            formula_depth_bound: self.depth.unwrap_or(d.formula_depth_bound),
            formula_size_bound: self.size.unwrap_or(d.formula_size_bound),
            env_len: self.env_len.unwrap_or(d.env_len),
            max_index: self.max_index.unwrap_or(d.max_index),
            ground_seed: match &self.seed {
                Some(s) => s.parse()?,
                None => d.ground_seed,
            },
            closure_depth: self.closure_depth.unwrap_or(d.closure_depth),
            encoding: match self.encoding.as_deref() {
                Some("tag") => Encoding::Tag,
                _ => d.encoding,
            },
            iso_reduce: !self.no_iso_reduce,
            parallel: self.parallel,
            max_counterexamples: self.max_counterexamples.unwrap_or(d.max_counterexamples),
        })
    }
}

/// Result of one invocation.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// `Vn` for a rank stage, otherwise an HF literal.
pub fn parse_model(s: &str) -> Result<HFSet> {
    let t = s.trim();
    if let Some(n) = t.strip_prefix('V').and_then(|n| n.parse::<usize>().ok()) {
        return Ok(HFSet::v_stage(n)?);
    }
    Ok(t.parse()?)
}

fn parse_formula(s: &str) -> Result<Formula> {
    Ok(s.parse()?)
}

fn parse_axioms(s: Option<&str>) -> Result<Vec<AxiomName>> {
    let Some(s) = s else {
        return Ok(AxiomName::ALL.to_vec());
    };
    if let Ok(set) = s.parse::<AxiomSet>() {
        return Ok(set.axioms());
    }
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<AxiomName>())
        .collect()
}

fn load(p: &PosetArg) -> Result<LabeledPoset> {
    forcing::load_poset(&p.poset, p.close_leq)
}

struct Emit {
    code: i32,
    json: Value,
    text: String,
}

fn emit(json: Value, text: impl Into<String>) -> Emit {
    Emit {
        code: 0,
        json,
        text: text.into(),
    }
}

fn dispatch(cli: &Cli) -> Result<Emit> {
    Ok(match &cli.command {
        Command::Parse { formula } => {
            let f = parse_formula(formula)?;
            emit(
                json!({"formula": f.render(), "arity": f.arity()}),
                format!("{f}\narity: {}", f.arity()),
            )
        }
        Command::Arity { formula } => {
            let f = parse_formula(formula)?;
            emit(json!({"arity": f.arity()}), f.arity().to_string())
        }
        Command::Sats {
            model,
            env,
            strict,
            formula,
        } => {
            let m = parse_model(model)?;
            let env = parse_list(env)?;
            let f = parse_formula(formula)?;
            let holds = if *strict {
                semantics::sats_strict(&m, &env, &f)?
            } else {
                semantics::sats(&m, &env, &f)?
            };
            emit(json!({"holds": holds}), holds.to_string())
        }
        Command::Forces { formula } => {
            let f = forcing::forces(&parse_formula(formula)?)?;
            emit(
                json!({"formula": f.render(), "arity": f.arity()}),
                format!("{f}\narity: {}", f.arity()),
            )
        }
        Command::FrcAt {
            poset,
            ft,
            t1,
            t2,
            p,
        } => {
            let lp = load(poset)?;
            if *ft > 1 {
                return Err(Error::Unsupported(format!("ft must be 0 or 1, got {ft}")));
            }
            let t = AtomicTuple::new(*ft, t1.parse()?, t2.parse()?, lp.resolve(p)?);
            let holds = FrcEngine::new(std::sync::Arc::new(lp.notion.clone())).frc_at(&t)?;
            emit(json!({"holds": holds}), holds.to_string())
        }
        Command::Val {
            poset,
            filter,
            name,
        } => {
            let lp = load(poset)?;
            let g = HFSet::from_elements(
                filter
                    .split(',')
                    .filter(|x| !x.trim().is_empty())
                    .map(|x| lp.resolve(x.trim()))
                    .collect::<Result<Vec<_>>>()?,
            );
            let v = forcing::val(&g, &name.parse()?);
            emit(json!({"val": v}), v.to_string())
        }
        Command::CheckAxioms { model, axioms } => {
            let m = parse_model(model)?;
            let report = semantics::satisfies(&m, &parse_axioms(axioms.as_deref())?);
            let all = report.results.iter().all(|r| r.holds);
            let text = report
                .results
                .iter()
                .map(|r| {
                    let mut line = format!("{}: {}", r.axiom, r.holds);
                    if let Some(w) = &r.witness {
                        line.push_str(&format!(" (witness {w})"));
                    }
                    if let Some(c) = &r.counterexample {
                        line.push_str(&format!(" (counterexample {c})"));
                    }
                    line
                })
                .collect::<Vec<_>>()
                .join("\n");
            Emit {
                code: if all { 0 } else { 1 },
                json: serde_json::to_value(&report).expect("report serializes"),
                text,
            }
        }
        Command::Generics { poset } => {
            let lp = load(poset)?;
            let gs = forcing::generic_filters(&lp.notion)?;
            let label = |x: &HFSet| {
                lp.labels
                    .iter()
                    .find(|(_, y)| y == x)
                    .map(|(l, _)| l.clone())
                    .unwrap_or_else(|| x.to_string())
            };
            let rows: Vec<Vec<String>> = gs
                .iter()
                .map(|g| g.elems.iter().map(label).collect())
                .collect();
            let text = rows
                .iter()
                .map(|r| format!("{{{}}}", r.join(",")))
                .collect::<Vec<_>>()
                .join("\n");
            emit(json!({"generics": rows}), text)
        }
        Command::Lab(args) => {
            let cfg = args.config()?;
            let report = match (args.experiment.as_str(), &args.tau) {
                ("powerset", Some(t)) => lab::run_powerset_demo(&cfg, Some(&t.parse()?))?,
                (name, _) => lab::run(name, &cfg)?,
            };
            Emit {
                code: if report.pass { 0 } else { 1 },
                json: serde_json::to_value(&report).expect("report serializes"),
                text: report.to_text().trim_end().to_owned(),
            }
        }
        Command::Registry => {
            let r = semantics::registry();
            let mut text = String::new();
            for (name, members) in &r.groups {
                text.push_str(&format!("{name} ({}): {}\n", members.len(), members.join(", ")));
            }
            text.push_str(&format!("overhead: {}\n", r.overhead.len()));
            text.push_str(&format!("overhead_notCH: {}\n", r.overhead_not_ch.len()));
            text.push_str(&format!("overhead_CH: {}", r.overhead_ch.len()));
            emit(serde_json::to_value(&r).expect("registry serializes"), text)
        }
    })
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(e) => Outcome {
            code: e.code,
            stdout: match cli.format {
                Format::Json => {
                    serde_json::to_string_pretty(&e.json).expect("json output") + "\n"
                }
                Format::Text => e.text + "\n",
            },
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

pub fn main() -> i32 {
    let out = run(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}
