//! Command-line front end for the nml workbench.
//!
//! Every command reads models from JSON files and formulas from argument
//! strings, prints one JSON report to stdout (or prose with `--human`), and
//! exits 0 on success, 1 when the checked property fails or a countermodel
//! is found, 2 on input errors. Diagnostics go to stderr only.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nml::birel::{birel_to_nbhd, filtrate, nbhd_to_birel, BrModel};
use nml::conditions::{check_conditions, Condition, Verdict};
use nml::equiv::{
    check_bisimulation, check_bounded_morphism, max_bisimulation, n_bisimulation, BisimReport,
    EquivError, MorphismReport, PairRelation, WorldMap,
};
use nml::eval::{extension, EvalError};
use nml::nmodel::{check_heredity, HeredityReport};
use nml::parse::{parse, pretty};
use nml::search::{find_countermodel, find_logic, logic_registry, Outcome, SearchBudget};
use nml::topology::{open_sets, verify_topology, CheckOutcome, Variant};
use nml::translate::star;
use nml::{NFrame, NModel, WorldSet};

#[derive(Parser)]
#[command(name = "nml", version, about = "Finite-model workbench for neighborhood semantics")]
struct Cli {
    /// Render the report as prose instead of JSON.
    #[arg(long, global = true)]
    human: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and report its shape.
    Parse { formula: String },
    /// Evaluate a formula on a model, at one world or across all of them.
    Eval {
        model: PathBuf,
        formula: String,
        #[arg(long)]
        world: Option<String>,
    },
    /// Check frame conditions, reporting the first witness per failure.
    CheckFrame {
        model: PathBuf,
        /// Comma-separated list: base, arrow, delta, t, f1, f2, ps1, ps2, u, max4.
        #[arg(long, value_delimiter = ',', required = true)]
        conditions: Vec<String>,
    },
    /// Check that atom truth persists along min-neighborhood membership.
    CheckHeredity { model: PathBuf },
    /// Test whether a formula holds at every world of a model.
    Valid { model: PathBuf, formula: String },
    /// Search a logic's frame class for a countermodel.
    Countermodel {
        formula: String,
        #[arg(long)]
        logic: String,
        #[arg(long)]
        max_worlds: usize,
        #[arg(long)]
        max_vars: usize,
        /// Time budget in seconds; the search stops early once it is spent.
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Convert between neighborhood and bi-relational presentations.
    Convert {
        model: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
    },
    /// Filtrate a bi-relational model through a formula's subformulas.
    Filtrate { brmodel: PathBuf, formula: String },
    /// Compute the largest bisimulation, or the depth-bounded chain with --n.
    Bisim {
        m1: PathBuf,
        m2: PathBuf,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Check a world map against the bounded-morphism clauses.
    Morphism {
        m1: PathBuf,
        m2: PathBuf,
        map: PathBuf,
    },
    /// Build one world's open-set family and run the topology report.
    Topology {
        model: PathBuf,
        #[arg(long)]
        world: String,
        #[arg(long, default_value = "min-closed")]
        variant: Variant,
    },
    /// Star-translate a formula into the box fragment.
    Translate { formula: String },
    /// List the registered logics.
    Logics,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    /// Bi-relational presentation (preorder plus accessibility).
    Birel,
    /// Neighborhood presentation (min/max interval per world).
    Nbhd,
}

#[derive(Debug, thiserror::Error)]
enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
    #[error(transparent)]
    Formula(#[from] nml::parse::ParseError),
    #[error("unknown condition `{0}`; valid names: base, arrow, delta, t, f1, f2, ps1, ps2, u, max4")]
    UnknownCondition(String),
    #[error("unknown logic `{0}`; run `nml logics` for the registry")]
    UnknownLogic(String),
    #[error(transparent)]
    Search(#[from] nml::search::SearchError),
    #[error(transparent)]
    Topology(#[from] nml::topology::TopologyError),
    #[error(transparent)]
    Translate(#[from] nml::translate::TranslateError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Br(#[from] nml::birel::BrError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

/// One finished command: the JSON report, its prose rendering, and the exit
/// code (0 or 1; input errors never reach this type).
struct Report {
    json: Value,
    human: String,
    code: u8,
}

impl Report {
    fn ok(json: Value, human: String) -> Report {
        Report {
            json,
            human,
            code: 0,
        }
    }

    fn fail(json: Value, human: String) -> Report {
        Report {
            json,
            human,
            code: 1,
        }
    }

    fn with_code(pass: bool, json: Value, human: String) -> Report {
        if pass {
            Report::ok(json, human)
        } else {
            Report::fail(json, human)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let human = cli.human;
    match run(cli.command) {
        Ok(report) => {
            let text = if human {
                report.human
            } else {
                serde_json::to_string_pretty(&report.json).expect("report serializes")
            };
            // a closed pipe (e.g. `nml logics | head`) keeps the verdict code
            if let Err(e) = writeln!(io::stdout().lock(), "{text}") {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: cannot write report: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(report.code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Report, InputError> {
    match command {
        Command::Parse { formula } => cmd_parse(&formula),
        Command::Eval {
            model,
            formula,
            world,
        } => cmd_eval(&model, &formula, world.as_deref()),
        Command::CheckFrame { model, conditions } => cmd_check_frame(&model, &conditions),
        Command::CheckHeredity { model } => cmd_check_heredity(&model),
        Command::Valid { model, formula } => cmd_valid(&model, &formula),
        Command::Countermodel {
            formula,
            logic,
            max_worlds,
            max_vars,
            time_limit,
        } => cmd_countermodel(&formula, &logic, max_worlds, max_vars, time_limit),
        Command::Convert { model, to } => cmd_convert(&model, to),
        Command::Filtrate { brmodel, formula } => cmd_filtrate(&brmodel, &formula),
        Command::Bisim { m1, m2, n } => cmd_bisim(&m1, &m2, n),
        Command::Morphism { m1, m2, map } => cmd_morphism(&m1, &m2, &map),
        Command::Topology {
            model,
            world,
            variant,
        } => cmd_topology(&model, &world, variant),
        Command::Translate { formula } => cmd_translate(&formula),
        Command::Logics => cmd_logics(),
    }
}

fn read_file(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_model(path: &Path) -> Result<NModel, InputError> {
    NModel::from_json(&read_file(path)?).map_err(|e| InputError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_br(path: &Path) -> Result<BrModel, InputError> {
    BrModel::from_json(&read_file(path)?).map_err(|e| InputError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_map(path: &Path) -> Result<WorldMap, InputError> {
    WorldMap::from_json(&read_file(path)?).map_err(|e| InputError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn set_names(frame: &NFrame, set: WorldSet) -> Vec<String> {
    frame.set_names(set)
}

fn model_value(model: &NModel) -> Value {
    serde_json::to_value(model).expect("model serializes")
}

fn cmd_parse(text: &str) -> Result<Report, InputError> {
    let f = parse(text)?;
    let atoms = f.atoms();
    let json = json!({
        "pretty": pretty(&f),
        "atoms": atoms,
        "size": f.size(),
        "degree": f.degree(),
    });
    let human = format!(
        "{}\natoms: [{}]  size: {}  degree: {}",
        pretty(&f),
        atoms.join(", "),
        f.size(),
        f.degree()
    );
    Ok(Report::ok(json, human))
}

fn cmd_eval(path: &Path, formula: &str, world: Option<&str>) -> Result<Report, InputError> {
    let model = load_model(path)?;
    let f = parse(formula)?;
    let ext = extension(&model, &f).map_err(InputError::Eval)?;
    let mut truth = serde_json::Map::new();
    for (w, name) in model.frame().names().iter().enumerate() {
        truth.insert(name.clone(), Value::Bool(ext.contains(w)));
    }
    let (json, human) = match world {
        Some(name) => {
            let w = model
                .frame()
                .index(name)
                .ok_or_else(|| InputError::Eval(EvalError::UnknownWorld(name.to_string())))?;
            (
                json!({
                    "formula": pretty(&f),
                    "world": name,
                    "value": ext.contains(w),
                    "truth": truth,
                }),
                format!("{} at {}: {}", pretty(&f), name, ext.contains(w)),
            )
        }
        None => {
            let lines: Vec<String> = model
                .frame()
                .names()
                .iter()
                .enumerate()
                .map(|(w, n)| format!("{}: {}", n, ext.contains(w)))
                .collect();
            (
                json!({ "formula": pretty(&f), "truth": truth }),
                format!("{}\n{}", pretty(&f), lines.join("\n")),
            )
        }
    };
    Ok(Report::ok(json, human))
}

fn cmd_check_frame(path: &Path, names: &[String]) -> Result<Report, InputError> {
    let model = load_model(path)?;
    let conds = names
        .iter()
        .map(|s| {
            s.parse::<Condition>()
                .map_err(|e| InputError::UnknownCondition(e.0))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = check_conditions(model.frame(), &conds);
    let mut items = Vec::new();
    let mut lines = Vec::new();
    for (cond, verdict) in &report.results {
        match verdict {
            Verdict::Pass => {
                items.push(json!({ "condition": cond.name(), "holds": true }));
                lines.push(format!("{}: holds", cond.name()));
            }
            Verdict::Fail(witness) => {
                items.push(json!({
                    "condition": cond.name(),
                    "holds": false,
                    "witness": witness,
                }));
                lines.push(format!("{}: fails at ({})", cond.name(), witness.join(", ")));
            }
        }
    }
    Ok(Report::with_code(
        report.all_pass(),
        json!({ "conditions": items, "all_pass": report.all_pass() }),
        lines.join("\n"),
    ))
}

fn cmd_check_heredity(path: &Path) -> Result<Report, InputError> {
    let model = load_model(path)?;
    Ok(match check_heredity(&model) {
        HeredityReport::Pass => Report::ok(
            json!({ "heredity": "pass" }),
            "heredity holds".to_string(),
        ),
        HeredityReport::Fail {
            atom,
            world,
            successor,
        } => Report::fail(
            json!({
                "heredity": "fail",
                "atom": atom,
                "world": world,
                "successor": successor,
            }),
            format!("heredity fails: {atom} true at {world} but not at {successor}"),
        ),
    })
}

fn cmd_valid(path: &Path, formula: &str) -> Result<Report, InputError> {
    let model = load_model(path)?;
    let f = parse(formula)?;
    let ext = extension(&model, &f).map_err(InputError::Eval)?;
    let failing: Vec<String> = (0..model.frame().n())
        .filter(|&w| !ext.contains(w))
        .map(|w| model.frame().name(w).to_string())
        .collect();
    let valid = failing.is_empty();
    let human = if valid {
        format!("{} holds at every world", pretty(&f))
    } else {
        format!("{} fails at {}", pretty(&f), failing.join(", "))
    };
    Ok(Report::with_code(
        valid,
        json!({ "formula": pretty(&f), "valid": valid, "failing_worlds": failing }),
        human,
    ))
}

fn cmd_countermodel(
    formula: &str,
    logic_name: &str,
    max_worlds: usize,
    max_vars: usize,
    time_limit: Option<f64>,
) -> Result<Report, InputError> {
    let f = parse(formula)?;
    let logic =
        find_logic(logic_name).ok_or_else(|| InputError::UnknownLogic(logic_name.to_string()))?;
    let budget = SearchBudget {
        max_worlds,
        max_vars,
        time_limit: time_limit.map(Duration::from_secs_f64),
    };
    Ok(match find_countermodel(&f, &logic, &budget)? {
        Outcome::Counter { model, world } => {
            let human = format!(
                "countermodel at world {world}:\n{}",
                model.to_json()
            );
            Report::fail(
                json!({
                    "verdict": "countermodel",
                    "formula": pretty(&f),
                    "logic": logic.name,
                    "world": world,
                    "model": model_value(&model),
                }),
                human,
            )
        }
        Outcome::NoneWithinBudget {
            frames_checked,
            models_checked,
        } => Report::ok(
            json!({
                "verdict": "none-within-budget",
                "formula": pretty(&f),
                "logic": logic.name,
                "frames_checked": frames_checked,
                "models_checked": models_checked,
            }),
            format!(
                "no countermodel within budget ({frames_checked} frames, {models_checked} models)"
            ),
        ),
        Outcome::BudgetExhausted {
            elapsed,
            frames_checked,
            models_checked,
        } => Report::ok(
            json!({
                "verdict": "budget-exhausted",
                "formula": pretty(&f),
                "logic": logic.name,
                "elapsed_ms": elapsed.as_millis() as u64,
                "frames_checked": frames_checked,
                "models_checked": models_checked,
            }),
            format!(
                "time budget exhausted after {} ms ({frames_checked} frames, {models_checked} models)",
                elapsed.as_millis()
            ),
        ),
    })
}

fn cmd_convert(path: &Path, to: Target) -> Result<Report, InputError> {
    match to {
        Target::Birel => {
            let model = load_model(path)?;
            let converted = nbhd_to_birel(&model)?;
            let json = serde_json::to_value(&converted).expect("model serializes");
            let human = converted.to_json();
            Ok(Report::ok(json, human))
        }
        Target::Nbhd => {
            let model = load_br(path)?;
            let converted = birel_to_nbhd(&model)?;
            let human = converted.to_json();
            Ok(Report::ok(model_value(&converted), human))
        }
    }
}

fn cmd_filtrate(path: &Path, formula: &str) -> Result<Report, InputError> {
    let model = load_br(path)?;
    let gamma = parse(formula)?;
    let filtered = filtrate(&model, &gamma)?;
    let classes = filtered.model.frame().n();
    let human = format!(
        "{} worlds collapse to {} classes over {} subformulas:\n{}",
        model.frame().n(),
        classes,
        filtered.sigma.len(),
        filtered.to_json()
    );
    Ok(Report::ok(
        serde_json::to_value(&filtered).expect("model serializes"),
        human,
    ))
}

fn pairs_value(rel: &PairRelation) -> Value {
    let pairs: Vec<Value> = rel.pairs.iter().map(|(a, b)| json!([a, b])).collect();
    Value::Array(pairs)
}

fn pairs_human(rel: &PairRelation) -> String {
    if rel.is_empty() {
        "(none)".to_string()
    } else {
        rel.pairs
            .iter()
            .map(|(a, b)| format!("{a} ~ {b}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn cmd_bisim(p1: &Path, p2: &Path, n: Option<usize>) -> Result<Report, InputError> {
    let m1 = load_model(p1)?;
    let m2 = load_model(p2)?;
    if m1.semantics() != m2.semantics() {
        return Err(InputError::Equiv(EquivError::SemanticsMismatch));
    }
    Ok(match n {
        None => {
            let rel = max_bisimulation(&m1, &m2);
            let check = match check_bisimulation(&m1, &m2, &rel)? {
                BisimReport::Pass => json!("pass"),
                BisimReport::Empty => json!("empty"),
                BisimReport::Fail {
                    clause,
                    left,
                    right,
                } => json!({ "clause": clause, "left": left, "right": right }),
            };
            let human = format!(
                "max bisimulation: {} pairs\n{}",
                rel.pairs.len(),
                pairs_human(&rel)
            );
            Report::with_code(
                !rel.is_empty(),
                json!({
                    "pairs": pairs_value(&rel),
                    "count": rel.pairs.len(),
                    "check": check,
                }),
                human,
            )
        }
        Some(depth) => {
            let chain = n_bisimulation(&m1, &m2, depth);
            let stages: Vec<Value> = chain
                .iter()
                .enumerate()
                .map(|(i, rel)| {
                    json!({ "depth": i, "pairs": pairs_value(rel), "count": rel.pairs.len() })
                })
                .collect();
            let lines: Vec<String> = chain
                .iter()
                .enumerate()
                .map(|(i, rel)| format!("depth {i}: {}", pairs_human(rel)))
                .collect();
            let last_nonempty = !chain.last().expect("chain has depth 0").is_empty();
            Report::with_code(
                last_nonempty,
                json!({ "chain": stages }),
                lines.join("\n"),
            )
        }
    })
}

fn cmd_morphism(p1: &Path, p2: &Path, map_path: &Path) -> Result<Report, InputError> {
    let m1 = load_model(p1)?;
    let m2 = load_model(p2)?;
    let map = load_map(map_path)?;
    Ok(match check_bounded_morphism(&m1, &m2, &map)? {
        MorphismReport::Pass => Report::ok(
            json!({ "morphism": "pass" }),
            "bounded morphism: all clauses hold".to_string(),
        ),
        MorphismReport::Fail { clause, world } => Report::fail(
            json!({ "morphism": "fail", "clause": clause, "world": world }),
            format!("bounded morphism fails clause {clause} at {world}"),
        ),
    })
}

fn outcome_value(frame: &NFrame, outcome: &CheckOutcome) -> Value {
    match outcome {
        CheckOutcome::Pass => json!("pass"),
        CheckOutcome::Fail { sets, missing } => json!({
            "sets": sets.iter().map(|s| set_names(frame, *s)).collect::<Vec<_>>(),
            "missing": set_names(frame, *missing),
        }),
    }
}

fn cmd_topology(path: &Path, world: &str, variant: Variant) -> Result<Report, InputError> {
    let model = load_model(path)?;
    let frame = model.frame();
    let family = open_sets(frame, world, variant)?;
    let report = verify_topology(&family);
    let opens: Vec<Vec<String>> = family.opens.iter().map(|o| set_names(frame, *o)).collect();
    let json = json!({
        "world": family.world,
        "variant": variant.name(),
        "universe": set_names(frame, family.universe),
        "opens": opens,
        "report": {
            "empty_member": outcome_value(frame, &report.empty_member),
            "universe_member": outcome_value(frame, &report.universe_member),
            "pairwise_union": outcome_value(frame, &report.pairwise_union),
            "pairwise_intersection": outcome_value(frame, &report.pairwise_intersection),
            "family_union": outcome_value(frame, &report.family_union),
            "family_intersection": outcome_value(frame, &report.family_intersection),
        },
        "is_topology": report.is_topology(),
        "all_pass": report.all_pass(),
    });
    let opens_text: Vec<String> = opens.iter().map(|o| format!("{{{}}}", o.join(", "))).collect();
    let human = format!(
        "{} opens at {} ({}): {}\ntopology: {}  alexandroff intersection: {}",
        family.opens.len(),
        family.world,
        variant.name(),
        opens_text.join(" "),
        if report.is_topology() { "yes" } else { "no" },
        if report.family_intersection.passed() { "yes" } else { "no" },
    );
    Ok(Report::with_code(report.all_pass(), json, human))
}

fn cmd_translate(text: &str) -> Result<Report, InputError> {
    let f = parse(text)?;
    let starred = star(&f)?;
    Ok(Report::ok(
        json!({ "input": pretty(&f), "star": pretty(&starred) }),
        pretty(&starred),
    ))
}

fn cmd_logics() -> Result<Report, InputError> {
    let mut items = Vec::new();
    let mut lines = Vec::new();
    for logic in logic_registry() {
        let conditions: Vec<&str> = logic.conditions.iter().map(|c| c.name()).collect();
        let schemata: Vec<Value> = logic
            .schemata
            .iter()
            .map(|(name, f)| json!({ "name": name, "formula": pretty(f) }))
            .collect();
        lines.push(format!(
            "{} ({}): conditions [{}]; schemata [{}]; rules [{}]",
            logic.name,
            logic.semantics.as_str(),
            conditions.join(", "),
            logic
                .schemata
                .iter()
                .map(|(n, _)| *n)
                .collect::<Vec<_>>()
                .join(", "),
            logic.rules.join(", "),
        ));
        items.push(json!({
            "name": logic.name,
            "semantics": logic.semantics.as_str(),
            "conditions": conditions,
            "schemata": schemata,
            "rules": logic.rules,
        }));
    }
    Ok(Report::ok(json!({ "logics": items }), lines.join("\n")))
}
