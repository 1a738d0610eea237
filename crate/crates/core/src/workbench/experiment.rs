use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{find_hm_chain, EnumerationConfig, HmChain, RelationalStructure};
use crate::bubble::{decide_csp, BubbleConfig};
use crate::canon::{canon_evaluate, derivation_to_trace, trace_id, CanonConfig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::instances::{is_satisfiable, OracleConfig, PathDecomposition, PathInstance};
use crate::pathsolver::{check_refutation, solve_path, PathSolverConfig};

use super::formats::load_structure;
use super::generate::{gen_random_path_instance, GenMode, PathGenConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Oracle,
    Path,
    EndToEnd,
    Canon,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [SolverKind::Oracle, SolverKind::Path, SolverKind::EndToEnd, SolverKind::Canon];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Oracle => "oracle",
            SolverKind::Path => "path",
            SolverKind::EndToEnd => "end-to-end",
            SolverKind::Canon => "canon",
        }
    }

    pub fn parse(s: &str) -> Result<SolverKind> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown solver `{s}`")))
    }

    /// Whether the solver decides every instance; the canonical program
    /// only refutes.
    pub fn is_complete(self) -> bool {
        self != SolverKind::Canon
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub min_length: usize,
    pub max_length: usize,
    pub density: f64,
    pub unary_density: f64,
    /// Close relations under the structure's chain instead of drawing names.
    pub closed: bool,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            min_length: 1,
            max_length: 10,
            density: 0.5,
            unary_density: 0.75,
            closed: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub oracle: u64,
    pub canon_width: usize,
    pub canon_relation_cap: u64,
    pub hm_n_max: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            oracle: crate::instances::DEFAULT_ORACLE_BUDGET,
            canon_width: 2,
            canon_relation_cap: crate::canon::DEFAULT_RELATION_CAP,
            hm_n_max: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Built-in name or structure JSON.
    pub structure: String,
    pub generator: GeneratorParams,
    pub seed: u64,
    pub trials: usize,
    pub solvers: Vec<SolverKind>,
    pub budgets: Budgets,
    /// Directory receiving UNSAT traces, one file per content hash.
    pub trace_dir: Option<PathBuf>,
    pub exec: Exec,
    /// Timing makes reports nondeterministic and is off by default.
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(structure: impl Into<String>, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            structure: structure.into(),
            generator: GeneratorParams::default(),
            seed,
            trials,
            solvers: vec![SolverKind::Oracle, SolverKind::Path],
            budgets: Budgets::default(),
            trace_dir: None,
            exec: Exec::default(),
            record_timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Sat,
    Unsat,
    Budget(String),
    Error(String),
}

impl Outcome {
    pub fn verdict(&self) -> Option<bool> {
        match self {
            Outcome::Sat => Some(true),
            Outcome::Unsat => Some(false),
            _ => None,
        }
    }

    fn of(r: Result<bool>) -> Outcome {
        match r {
            Ok(true) => Outcome::Sat,
            Ok(false) => Outcome::Unsat,
            Err(e @ Error::BudgetExceeded { .. }) => Outcome::Budget(e.to_string()),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Sat => f.write_str("SAT"),
            Outcome::Unsat => f.write_str("UNSAT"),
            Outcome::Budget(_) => f.write_str("BUDGET"),
            Outcome::Error(_) => f.write_str("ERROR"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRef {
    pub id: String,
    pub steps: usize,
    pub width: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub length: usize,
    pub outcomes: BTreeMap<SolverKind, Outcome>,
    pub trace: Option<TraceRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micros: Option<BTreeMap<SolverKind, u64>>,
    pub violations: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub checked: usize,
    pub failed: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Properties {
    pub witness_valid: Tally,
    pub trace_replay: Tally,
    /// Canonical goal never reached on a satisfiable instance.
    pub canon_sound: Tally,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub structure: String,
    pub seed: u64,
    pub solvers: Vec<SolverKind>,
    pub chain: Option<HmChain>,
    pub trials: Vec<TrialRecord>,
    /// `agreement[a][b]`: trials where both solvers returned a verdict and
    /// the verdicts agree.
    pub agreement: Vec<Vec<usize>>,
    /// `compared[a][b]`: trials where both solvers returned a verdict.
    pub compared: Vec<Vec<usize>>,
    pub properties: Properties,
    pub budget_exceeded: usize,
    pub errors: usize,
    pub violations: usize,
}

impl Report {
    /// 0 when clean, 2 on a property violation, 3 when only budgets failed.
    pub fn exit_code(&self) -> i32 {
        if self.violations > 0 {
            2
        } else if self.budget_exceeded > 0 {
            3
        } else {
            0
        }
    }

    pub fn agree(&self, a: SolverKind, b: SolverKind) -> Option<(usize, usize)> {
        let i = self.solvers.iter().position(|&k| k == a)?;
        let j = self.solvers.iter().position(|&k| k == b)?;
        Some((self.agreement[i][j], self.compared[i][j]))
    }
}

struct Ctx {
    structure: RelationalStructure,
    chain: Option<HmChain>,
    oracle: OracleConfig,
}

fn run_trial(cfg: &ExperimentConfig, ctx: &Ctx, index: usize) -> Result<(TrialRecord, Properties, Option<String>)> {
    let seed = cfg.seed.wrapping_add(index as u64);
    let g = &cfg.generator;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let length = rng.random_range(g.min_length.max(1)..=g.max_length.max(g.min_length).max(1));
    let mode = match (&ctx.chain, g.closed) {
        (Some(c), true) => GenMode::Closed(c.clone()),
        (None, true) => return Err(Error::Precondition("closed generation needs a chain".into())),
        (_, false) => GenMode::Named,
    };
    let p = gen_random_path_instance(
        &ctx.structure,
        &PathGenConfig {
            length,
            density: g.density,
            unary_density: g.unary_density,
            seed: rng.random(),
            mode,
        },
    )?;
    let csp = p.to_csp();
    let mut outcomes = BTreeMap::new();
    let mut micros = BTreeMap::new();
    let mut violations = Vec::new();
    let mut props = Properties::default();
    let mut trace = None;
    let mut trace_text = None;
    for &k in &cfg.solvers {
        let start = Instant::now();
        let out = match k {
            SolverKind::Oracle => Outcome::of(is_satisfiable(&csp, &ctx.oracle)),
            SolverKind::Path => Outcome::of(run_path(ctx, &p, &mut props, &mut trace, &mut trace_text)),
            SolverKind::EndToEnd => Outcome::of(run_bubble(ctx, &p, &mut props)),
            SolverKind::Canon => {
                let ccfg = CanonConfig {
                    relation_cap: cfg.budgets.canon_relation_cap,
                    stop_at_goal: true,
                    ..CanonConfig::all(cfg.budgets.canon_width)
                };
                Outcome::of(canon_evaluate(&p.structure(), &ccfg, &csp).map(|r| !r.goal))
            }
        };
        micros.insert(k, start.elapsed().as_micros() as u64);
        outcomes.insert(k, out);
    }
    let complete: Vec<(SolverKind, bool)> = outcomes
        .iter()
        .filter(|(k, _)| k.is_complete())
        .filter_map(|(&k, o)| o.verdict().map(|v| (k, v)))
        .collect();
    if let Some(&(k0, v0)) = complete.first() {
        for &(k, v) in &complete[1..] {
            if v != v0 {
                violations.push(format!("{k0} and {k} disagree"));
            }
        }
    }
    if let Some(Outcome::Unsat) = outcomes.get(&SolverKind::Canon) {
        if let Some(&(_, sat)) = complete.first() {
            props.canon_sound.record(!sat);
            if sat {
                violations.push("canonical goal on a satisfiable instance".into());
            }
        }
    }
    if props.witness_valid.failed > 0 {
        violations.push("invalid witness".into());
    }
    if props.trace_replay.failed > 0 {
        violations.push("trace does not replay".into());
    }
    let record = TrialRecord {
        index,
        seed,
        length,
        outcomes,
        trace,
        micros: cfg.record_timing.then_some(micros),
        violations,
    };
    Ok((record, props, trace_text))
}

fn run_path(
    ctx: &Ctx,
    p: &PathInstance,
    props: &mut Properties,
    trace: &mut Option<TraceRef>,
    trace_text: &mut Option<String>,
) -> Result<bool> {
    let chain = ctx.chain.as_ref().ok_or_else(|| Error::Precondition("no chain for the structure".into()))?;
    let cfg = PathSolverConfig {
        verify_trace: false,
        check_chain: false,
        ..PathSolverConfig::default()
    };
    let v = solve_path(&p.structure(), chain, p, &cfg)?;
    if let Some(w) = &v.verdict.witness {
        props.witness_valid.record(p.is_solution(w.values()));
    }
    if let Some(d) = &v.derivation {
        let width = check_refutation(p, d);
        props.trace_replay.record(width.is_ok());
        let text = derivation_to_trace(&p.to_csp(), d)?;
        *trace = Some(TraceRef {
            id: trace_id(&text),
            steps: d.steps.len(),
            width: width.unwrap_or(0),
        });
        *trace_text = Some(text);
    }
    Ok(v.verdict.satisfiable)
}

fn run_bubble(ctx: &Ctx, p: &PathInstance, props: &mut Properties) -> Result<bool> {
    let chain = ctx.chain.as_ref().ok_or_else(|| Error::Precondition("no chain for the structure".into()))?;
    let csp = p.to_csp();
    let bags = if p.len() == 1 {
        vec![[0].into_iter().collect()]
    } else {
        (0..p.len() - 1).map(|i| [i, i + 1].into_iter().collect()).collect()
    };
    let d = PathDecomposition::new(bags, 1);
    let cfg = BubbleConfig {
        oracle: ctx.oracle,
        ..BubbleConfig::default()
    };
    let v = decide_csp(&p.structure(), chain, &csp, &d, &cfg)?;
    if let Some(w) = &v.verdict.witness {
        props.witness_valid.record(csp.is_solution(w.values()));
    }
    Ok(v.verdict.satisfiable)
}

/// Runs every trial, in parallel under `cfg.exec`, and collects the
/// results in trial order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    let structure = load_structure(&cfg.structure)?;
    let needs_chain = cfg.generator.closed || cfg.solvers.iter().any(|k| matches!(k, SolverKind::Path | SolverKind::EndToEnd));
    let chain = if needs_chain {
        find_hm_chain(&structure, cfg.budgets.hm_n_max, &EnumerationConfig::default())?
    } else {
        None
    };
    let ctx = Ctx {
        structure,
        chain,
        oracle: OracleConfig {
            budget: cfg.budgets.oracle,
            exec: Exec::Sequential,
        },
    };
    let results = cfg.exec.map_range(0..cfg.trials, |i| run_trial(cfg, &ctx, i));
    let n = cfg.solvers.len();
    let mut report = Report {
        structure: cfg.structure.clone(),
        seed: cfg.seed,
        solvers: cfg.solvers.clone(),
        chain: ctx.chain.clone(),
        trials: Vec::with_capacity(cfg.trials),
        agreement: vec![vec![0; n]; n],
        compared: vec![vec![0; n]; n],
        properties: Properties::default(),
        budget_exceeded: 0,
        errors: 0,
        violations: 0,
    };
    for r in results {
        let (t, props, text) = r?;
        for (acc, x) in [
            (&mut report.properties.witness_valid, props.witness_valid),
            (&mut report.properties.trace_replay, props.trace_replay),
            (&mut report.properties.canon_sound, props.canon_sound),
        ] {
            acc.checked += x.checked;
            acc.failed += x.failed;
        }
        if let (Some(dir), Some(text), Some(tr)) = (&cfg.trace_dir, &text, &t.trace) {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{}.trace.json", tr.id)), text)?;
        }
        for (a, ka) in cfg.solvers.iter().enumerate() {
            for (b, kb) in cfg.solvers.iter().enumerate() {
                if let (Some(x), Some(y)) = (t.outcomes[ka].verdict(), t.outcomes[kb].verdict()) {
                    report.compared[a][b] += 1;
                    if x == y {
                        report.agreement[a][b] += 1;
                    }
                }
            }
        }
        for o in t.outcomes.values() {
            match o {
                Outcome::Budget(_) => report.budget_exceeded += 1,
                Outcome::Error(_) => report.errors += 1,
                _ => {}
            }
        }
        report.violations += t.violations.len();
        report.trials.push(t);
    }
    Ok(report)
}
