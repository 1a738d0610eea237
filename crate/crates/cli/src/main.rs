use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use symdl::algebra::{find_hm_chain, verify_hm_chain, EnumerationConfig, HmChain, RelationalStructure};
use symdl::bubble::{decide_csp, pathwidth_to_path, BubbleConfig};
use symdl::canon::{canon_evaluate, derivation_to_trace, trace_id, trace_to_derivation, CanonConfig};
use symdl::engine::{derivation_graph, evaluate, DatalogProgram, EvalOptions};
use symdl::instances::{is_satisfiable, OracleConfig, PathInstance};
use symdl::pathsolver::{lambda_relation, shrink_instance, solve_path, PathSolverConfig};
use symdl::workbench::{
    decomposition_from_json, export_artifacts, instance_from_json, load_structure, path_as_named_csp, path_to_json, report_text,
    run_experiment, to_json, ExperimentConfig, ExportFormat, ExportTarget, LoadedInstance, Report, SolverKind,
};
use symdl::{Error, Exec};

#[derive(Parser)]
#[command(name = "symdl", version, about = "Symmetric Datalog and path-instance CSP workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Built-in structure (AK2, AZ2, IMP2) or a structure JSON file.
    #[arg(long, default_value = "AZ2")]
    structure: String,
    /// Instance JSON file.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Brute-force budget in assignments.
    #[arg(long)]
    budget: Option<u64>,
    /// Output format: json, text or dot.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a Hagemann-Mitschke chain of polymorphisms.
    HmSearch {
        #[command(flatten)]
        common: Common,
        /// Longest chain tried.
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Decide an instance: path instances with the path solver, general
    /// instances through a path decomposition or the oracle.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        decomposition: Option<PathBuf>,
        /// Shrinking window length for the path solver.
        #[arg(long)]
        width: Option<usize>,
        /// Chain JSON file; searched for when absent.
        #[arg(long)]
        chain: Option<PathBuf>,
        /// Directory for the refutation trace.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Evaluate a Datalog program, or the canonical program of width
    /// `--width` when no program is given.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        program: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        width: usize,
    },
    /// Print λ between two positions of a path instance.
    Lambda {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
    /// Apply one shrinking step to a path instance.
    Shrink {
        #[command(flatten)]
        common: Common,
        /// Window length; defaults to 2d²+2.
        #[arg(long)]
        width: Option<usize>,
    },
    /// Reduce a general instance to a path instance over a bubble power.
    Bubble {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        decomposition: PathBuf,
        /// Also decide the instance.
        #[arg(long)]
        decide: bool,
    },
    /// Run seeded random trials and compare solvers.
    Experiment {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated list of oracle, path, end-to-end, canon.
        #[arg(long, default_value = "oracle,path")]
        solvers: String,
        #[arg(long, default_value_t = 10)]
        max_length: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Canonical program width.
        #[arg(long, default_value_t = 2)]
        width: usize,
        /// Draw relations by name instead of closing random ones.
        #[arg(long)]
        named: bool,
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Export an instance, program, derivation graph, trace or report.
    Export {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        program: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Experiment report JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn structure_arg(s: &str) -> anyhow::Result<(String, RelationalStructure)> {
    let text = if Path::new(s).is_file() { read(Path::new(s))? } else { s.to_string() };
    let st = load_structure(&text)?;
    Ok((text, st))
}

fn instance_arg(c: &Common, s: &RelationalStructure) -> anyhow::Result<LoadedInstance> {
    let Some(path) = &c.instance else { bail!("--instance is required") };
    Ok(instance_from_json(&read(path)?, s)?)
}

fn path_arg(c: &Common, s: &RelationalStructure) -> anyhow::Result<PathInstance> {
    match instance_arg(c, s)? {
        LoadedInstance::Path(p) => Ok(p),
        LoadedInstance::Csp(_) => bail!("expected a path instance"),
    }
}

fn oracle(c: &Common) -> OracleConfig {
    OracleConfig {
        budget: c.budget.unwrap_or(symdl::instances::DEFAULT_ORACLE_BUDGET),
        ..OracleConfig::default()
    }
}

fn chain_arg(path: Option<&PathBuf>, s: &RelationalStructure) -> anyhow::Result<HmChain> {
    let chain = match path {
        Some(p) => serde_json::from_str(&read(p)?)?,
        None => find_hm_chain(s, 4, &EnumerationConfig::default())?.context("the structure has no chain up to length 4")?,
    };
    verify_hm_chain(&chain, s).map_err(|v| Error::InvalidHmChain(v.to_string()))?;
    Ok(chain)
}

fn print_json(v: &serde_json::Value) {
    print!("{}", to_json(v));
}

fn write_trace(dir: &Path, text: &str) -> anyhow::Result<String> {
    let id = trace_id(text);
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{id}.trace.json")), text)?;
    Ok(id)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::HmSearch { common, max_n } => {
            let (_, s) = structure_arg(&common.structure)?;
            let cfg = EnumerationConfig {
                budget: common.budget.unwrap_or(EnumerationConfig::default().budget),
                ..EnumerationConfig::default()
            };
            match find_hm_chain(&s, max_n, &cfg)? {
                Some(c) => print_json(&json!({ "found": true, "n": c.n(), "chain": c })),
                None => print_json(&json!({ "found": false, "n_max": max_n })),
            }
        }
        Command::Solve {
            common,
            decomposition,
            width,
            chain,
            trace_dir,
        } => {
            let (_, s) = structure_arg(&common.structure)?;
            match instance_arg(&common, &s)? {
                LoadedInstance::Path(p) => {
                    let hm = chain_arg(chain.as_ref(), &s)?;
                    let cfg = PathSolverConfig {
                        window: width,
                        ..PathSolverConfig::default()
                    };
                    let v = solve_path(&s, &hm, &p, &cfg)?;
                    let mut trace = None;
                    if let (Some(dir), Some(d)) = (&trace_dir, &v.derivation) {
                        trace = Some(write_trace(dir, &derivation_to_trace(&p.to_csp(), d)?)?);
                    }
                    print_json(&json!({
                        "satisfiable": v.verdict.satisfiable,
                        "witness": v.verdict.witness,
                        "refutation": v.verdict.refutation,
                        "trace": trace,
                        "stats": v.stats,
                    }));
                }
                LoadedInstance::Csp(i) => match decomposition {
                    Some(dpath) => {
                        let hm = chain_arg(chain.as_ref(), &s)?;
                        let d = decomposition_from_json(&read(&dpath)?, &i)?;
                        let cfg = BubbleConfig {
                            oracle: oracle(&common),
                            ..BubbleConfig::default()
                        };
                        let v = decide_csp(&s, &hm, &i, &d, &cfg)?;
                        print_json(&json!({
                            "satisfiable": v.verdict.satisfiable,
                            "witness": v.verdict.witness,
                            "path_length": v.path_length,
                            "k": v.k,
                        }));
                    }
                    None => {
                        let sat = is_satisfiable(&i, &oracle(&common))?;
                        print_json(&json!({ "satisfiable": sat, "solver": "oracle" }));
                    }
                },
            }
        }
        Command::Eval { common, program, width } => {
            let (_, s) = structure_arg(&common.structure)?;
            let csp = match instance_arg(&common, &s)? {
                LoadedInstance::Path(p) if program.is_some() => path_as_named_csp(&p, &s).unwrap_or_else(|| p.to_csp()),
                i => i.to_csp(),
            };
            match program {
                Some(path) => {
                    let p = DatalogProgram::parse(&read(&path)?)?;
                    let e = evaluate(
                        &p,
                        &csp,
                        &EvalOptions {
                            short_circuit: false,
                            exec: Exec::default(),
                        },
                    )?;
                    print_json(&json!({
                        "fragment": p.classify().to_string(),
                        "goal_reached": e.goal_reached,
                        "facts": e.store.len(),
                        "rounds": e.rounds,
                    }));
                }
                None => {
                    let run = canon_evaluate(csp.structure(), &CanonConfig::all(width), &csp)?;
                    print_json(&json!({
                        "width": width,
                        "goal_reached": run.goal,
                        "facts": run.store.len(),
                    }));
                }
            }
        }
        Command::Lambda { common, from, to } => {
            let (_, s) = structure_arg(&common.structure)?;
            let p = path_arg(&common, &s)?;
            print_json(&serde_json::to_value(lambda_relation(&p, from, to)?)?);
        }
        Command::Shrink { common, width } => {
            let (_, s) = structure_arg(&common.structure)?;
            let p = path_arg(&common, &s)?;
            let window = width.unwrap_or_else(|| PathSolverConfig::default().window_for(p.domain()));
            let k = shrink_instance(&p, window)?;
            print_json(&json!({
                "window": window,
                "indices": k.indices,
                "length": k.instance.len(),
                "instance": serde_json::from_str::<serde_json::Value>(&path_to_json(&k.instance, None))?,
            }));
        }
        Command::Bubble {
            common,
            decomposition,
            decide,
        } => {
            let (_, s) = structure_arg(&common.structure)?;
            let i = instance_arg(&common, &s)?.to_csp();
            let d = decomposition_from_json(&read(&decomposition)?, &i)?;
            let cfg = BubbleConfig {
                oracle: oracle(&common),
                ..BubbleConfig::default()
            };
            let red = pathwidth_to_path(&i, &d, &cfg)?;
            let mut out = json!({
                "k": red.bubble.k,
                "domain": red.bubble.domain_size(),
                "length": red.instance.len(),
                "unary_sizes": red.instance.unaries().iter().map(|r| r.len()).collect::<Vec<_>>(),
            });
            if decide {
                let hm = chain_arg(None, &s)?;
                let v = decide_csp(&s, &hm, &i, &d, &cfg)?;
                out["satisfiable"] = json!(v.verdict.satisfiable);
                out["witness"] = json!(v.verdict.witness);
            }
            print_json(&out);
        }
        Command::Experiment {
            common,
            trials,
            seed,
            solvers,
            max_length,
            density,
            width,
            named,
            sequential,
            timing,
            trace_dir,
        } => {
            let (text, _) = structure_arg(&common.structure)?;
            let mut cfg = ExperimentConfig::new(text, trials, seed);
            cfg.solvers = solvers.split(',').map(|s| SolverKind::parse(s.trim())).collect::<Result<_, _>>()?;
            cfg.generator.max_length = max_length;
            cfg.generator.density = density;
            cfg.generator.closed = !named;
            cfg.budgets.canon_width = width;
            if let Some(b) = common.budget {
                cfg.budgets.oracle = b;
            }
            cfg.exec = if sequential { Exec::Sequential } else { Exec::Parallel };
            cfg.record_timing = timing;
            cfg.trace_dir = trace_dir;
            let r = run_experiment(&cfg)?;
            match ExportFormat::parse(&common.format)? {
                ExportFormat::Text => print!("{}", report_text(&r)),
                ExportFormat::Json => print!("{}", to_json(&r)),
                ExportFormat::Dot => return Err(Error::Unsupported("report as dot".into()).into()),
            }
            return Ok(r.exit_code() as u8);
        }
        Command::Export {
            common,
            program,
            trace,
            report,
        } => {
            let format = ExportFormat::parse(&common.format)?;
            if let Some(path) = report {
                let r: Report = serde_json::from_str(&read(&path)?)?;
                print!("{}", export_artifacts(ExportTarget::Report(&r), format)?);
                return Ok(0);
            }
            let (_, s) = structure_arg(&common.structure)?;
            let loaded = common.instance.as_ref().map(|_| instance_arg(&common, &s)).transpose()?;
            let out = match (program, trace, &loaded) {
                (Some(pp), _, Some(i)) => {
                    let p = DatalogProgram::parse(&read(&pp)?)?;
                    let csp = i.to_csp();
                    if format == ExportFormat::Dot {
                        let g = derivation_graph(&p, &csp)?;
                        export_artifacts(ExportTarget::Graph(&p, &csp, &g), format)?
                    } else {
                        export_artifacts(ExportTarget::Program(&p), format)?
                    }
                }
                (Some(pp), _, None) => {
                    let p = DatalogProgram::parse(&read(&pp)?)?;
                    export_artifacts(ExportTarget::Program(&p), format)?
                }
                (None, Some(tp), Some(i)) => {
                    let csp = i.to_csp();
                    let d = trace_to_derivation(&csp, &read(&tp)?)?;
                    export_artifacts(ExportTarget::Trace(&csp, &d), format)?
                }
                (None, None, Some(i)) => export_artifacts(ExportTarget::Instance(i), format)?,
                _ => bail!("nothing to export: give --instance, --program, --trace or --report"),
            };
            print!("{out}");
        }
    }
    Ok(0)
}

fn exit_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => 3,
        Some(Error::Inconsistent(_) | Error::Replay { .. } | Error::InvalidHmChain(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_for(&e))
        }
    }
}
