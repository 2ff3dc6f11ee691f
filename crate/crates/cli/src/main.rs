mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperflow::analysis;
use hyperflow::lang::{parse_value, parse_with, ParseOptions, Program, Stmt};
use hyperflow::lawcheck::{check, run_catalog, suite_for, Catalog, CatalogOptions, PriorSuite, Relation};
use hyperflow::prob::{parse_rat, Rat};
use hyperflow::semantics::{loop_fixpoint, loop_limit, Config, Evaluator, LoopMode, Space};
use hyperflow::{Dist, InitState, Value};
use num_traits::{One, Zero};
use serde_json::Value as Json;

#[derive(Parser, Debug)]
#[command(name = "hyperflow", version, about = "Evaluate, compare and measure programs that leak hidden state")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the output hyper of a program.
    Eval {
        file: PathBuf,
        #[command(flatten)]
        prior: PriorArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Check equivalence or refinement between a specification and an implementation.
    Compare {
        spec: PathBuf,
        imp: PathBuf,
        #[arg(long, default_value = "refine")]
        relation: RelationArg,
        #[command(flatten)]
        prior: PriorArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random priors in the suite.
        #[arg(long, default_value_t = 16)]
        k: usize,
        /// Include refinement witnesses.
        #[arg(long)]
        explain: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Leakage measures before and after running a program.
    Entropy {
        file: PathBuf,
        #[command(flatten)]
        prior: PriorArgs,
        /// Report entropies in bits instead of nats.
        #[arg(long)]
        bits: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Iterate a program whose body is a single while loop and report convergence.
    Loop {
        file: PathBuf,
        #[command(flatten)]
        prior: PriorArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Run the bundled law catalog.
    Laws {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        k: usize,
        /// Only laws whose name contains this text.
        #[arg(long)]
        filter: Option<String>,
        /// Use this catalog file instead of the bundled one.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct PriorArgs {
    /// `uniform`, `point=<hidden tuple>` or `file=<json>`.
    #[arg(long)]
    prior: Option<String>,
    /// Initial visible state; defaults to the first in canonical order.
    #[arg(long)]
    vis: Option<String>,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Loop convergence tolerance, a rational such as 1/1000000.
    #[arg(long)]
    tol: Option<String>,
    /// Iteration bound for loops.
    #[arg(long)]
    max_k: Option<usize>,
    /// `auto` solves loops exactly unless --tol or --max-k is given.
    #[arg(long, value_enum, default_value = "auto")]
    loops: LoopsArg,
    /// Locals start uniformly distributed instead of at their first value.
    #[arg(long)]
    implicit_uniform_locals: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum LoopsArg {
    Auto,
    Exact,
    Iterate,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum RelationArg {
    Equiv,
    Refine,
    EntropyRefine,
}

impl From<RelationArg> for Relation {
    fn from(r: RelationArg) -> Relation {
        match r {
            RelationArg::Equiv => Relation::Equiv,
            RelationArg::Refine => Relation::Refine,
            RelationArg::EntropyRefine => Relation::EntropyRefine,
        }
    }
}

impl Common {
    fn config(&self) -> anyhow::Result<Config> {
        let mut cfg = Config::default();
        if let Some(t) = &self.tol {
            let t = parse_rat(t).ok_or_else(|| anyhow!("--tol: not a rational: {t}"))?;
            if t <= Rat::zero() {
                bail!("--tol must be positive");
            }
            cfg.tol = t;
        }
        if let Some(k) = self.max_k {
            cfg.max_k = k;
        }
        cfg.loops = match self.loops {
            LoopsArg::Exact => LoopMode::Exact,
            LoopsArg::Iterate => LoopMode::Iterate,
            LoopsArg::Auto if self.tol.is_some() || self.max_k.is_some() => LoopMode::Iterate,
            LoopsArg::Auto => LoopMode::Exact,
        };
        cfg.implicit_uniform_locals = self.implicit_uniform_locals;
        Ok(cfg)
    }

    fn parse_opts(&self) -> ParseOptions {
        ParseOptions { implicit_uniform_locals: self.implicit_uniform_locals }
    }

    fn emit(&self, json: Json, text: String) {
        match self.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&json).expect("json values serialise")),
            Format::Text => print!("{text}"),
        }
    }
}

fn load(path: &Path, opts: ParseOptions) -> anyhow::Result<Program> {
    let src = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_with(&src, opts).with_context(|| format!("in {}", path.display()))
}

/// Parses a state literal; a bare value is accepted for one-variable spaces.
fn state_value(src: &str, prog: &Program, ok: impl Fn(&Value) -> bool) -> anyhow::Result<Value> {
    let v = parse_value(src, prog).with_context(|| format!("state literal '{src}'"))?;
    if ok(&v) {
        return Ok(v);
    }
    let wrapped = Value::Tuple(vec![v]);
    if ok(&wrapped) {
        return Ok(wrapped);
    }
    bail!("'{src}' is not a state of the declared space")
}

fn prior_file(path: &str, prog: &Program, space: &Space) -> anyhow::Result<Dist<Value>> {
    let src = std::fs::read_to_string(path).with_context(|| format!("reading prior {path}"))?;
    let map: serde_json::Map<String, Json> = serde_json::from_str(&src).context("prior file must be a JSON object")?;
    let mut pairs = Vec::new();
    for (k, v) in map {
        let h = state_value(&k, prog, |h| space.contains_hid(h))?;
        let p = v.as_str().and_then(parse_rat).ok_or_else(|| anyhow!("prior weight for {k} must be a rational string"))?;
        pairs.push((h, p));
    }
    let d = Dist::from_pairs(pairs).context("prior weights")?;
    if !d.weight().is_one() {
        bail!("prior weights sum to {}, not 1", hyperflow::prob::fmt_rat(&d.weight()));
    }
    Ok(d)
}

fn initial_state(args: &PriorArgs, prog: &Program) -> anyhow::Result<InitState> {
    let space = Space::of(prog);
    let hid = match args.prior.as_deref() {
        None | Some("uniform") => space.uniform_prior(),
        Some(p) if p.starts_with("point=") => Dist::point(state_value(&p[6..], prog, |h| space.contains_hid(h))?),
        Some(p) if p.starts_with("file=") => prior_file(&p[5..], prog, &space)?,
        Some(p) => bail!("--prior: expected uniform, point=... or file=..., got '{p}'"),
    };
    let vis = match &args.vis {
        Some(v) => state_value(v, prog, |x| space.contains_vis(x))?,
        None => space.vis_states().remove(0),
    };
    Ok(InitState::new(vis, hid)?)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Cmd::Eval { file, prior, common } => {
            let prog = load(&file, common.parse_opts())?;
            let s = initial_state(&prior, &prog)?;
            let h = Evaluator::new(common.config()?).run(&prog.body, &s)?;
            common.emit(render::hyper(&h), render::hyper_text(&h));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Compare { spec, imp, relation, prior, seed, k, explain, common } => {
            let ps = load(&spec, common.parse_opts())?;
            let pi = load(&imp, common.parse_opts())?;
            if ps.decls != pi.decls {
                bail!("{} and {} declare different global variables", spec.display(), imp.display());
            }
            let suite = if prior.prior.is_some() || prior.vis.is_some() {
                PriorSuite::single(initial_state(&prior, &ps)?)
            } else {
                suite_for(&ps, seed, k)
            };
            let ev = Evaluator::new(common.config()?);
            let v = check(&ev, &ps, &pi, &suite, relation.into())?;
            common.emit(render::verdict(&v, explain), render::verdict_text(&v, explain));
            Ok(if v.holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Entropy { file, prior, bits, common } => {
            let prog = load(&file, common.parse_opts())?;
            let s = initial_state(&prior, &prog)?;
            let h = Evaluator::new(common.config()?).run(&prog.body, &s)?;
            let r = analysis::report(&s, &h)?;
            let scale = if bits { std::f64::consts::LOG2_E } else { 1.0 };
            common.emit(render::leak(&r, scale), render::leak_text(&r, scale));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Loop { file, prior, common } => {
            let prog = load(&file, common.parse_opts())?;
            let Stmt::While(guard, body) = &prog.body else {
                bail!("the program body must be a single while loop");
            };
            let s = initial_state(&prior, &prog)?;
            let cfg = common.config()?;
            let ev = Evaluator::new(cfg.clone());
            // this command exists to watch iteration, so it iterates unless told otherwise
            let r = if common.loops == LoopsArg::Exact {
                loop_limit(&ev, body, guard, &s)?
            } else {
                loop_fixpoint(&ev, body, guard, &s, &cfg.tol, cfg.max_k)?
            };
            common.emit(render::loop_report(&r), render::loop_text(&r));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Laws { seed, k, filter, catalog, common } => {
            let cat = match catalog {
                Some(p) => Catalog::from_toml(&std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?,
                None => Catalog::bundled()?,
            };
            let ev = Evaluator::new(common.config()?);
            let r = run_catalog(&cat, &ev, &CatalogOptions { seed, k, filter, mutual: true });
            common.emit(render::catalog(&r), render::catalog_text(&r));
            Ok(if r.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
