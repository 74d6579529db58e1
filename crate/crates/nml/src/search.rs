//! Bounded countermodel search over exhaustively enumerated frames.
//!
//! Frames are enumerated without isomorphism pruning so that identical
//! inputs always produce the identical first countermodel. The world count
//! is capped at 4: per-world neighborhood choices grow as 3^n-ish factors
//! and the cap keeps every sweep in this crate comfortably sub-second.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use itertools::Itertools;

use crate::conditions::Condition;
use crate::eval::extension;
use crate::formula::{Formula, Fragment, NodeKind};
use crate::nmodel::{NFrame, NModel, Semantics};
use crate::parse::parse;
use crate::world::{subsets, WorldSet};

/// A named logic: a frame class together with the axiom schemata and rules
/// sound for it. Schema atoms `phi`, `psi` are metavariables; instantiate
/// with [`crate::formula::instantiate_schema`].
#[derive(Debug, Clone)]
pub struct LogicSystem {
    pub name: &'static str,
    pub semantics: Semantics,
    pub conditions: Vec<Condition>,
    pub schemata: Vec<(&'static str, Formula)>,
    /// Informative only: rules are exercised as meta-properties of validity
    /// sweeps (premise valid implies conclusion valid), never as schemata.
    pub rules: Vec<&'static str>,
    /// Connectives admitted in formulas searched under this logic.
    pub language: Fragment,
}

fn schema(src: &str) -> Formula {
    parse(src).expect("registry schema source parses")
}

/// The fixed roster of supported logics, intuitionistic systems first.
pub fn logic_registry() -> Vec<LogicSystem> {
    use Condition::*;

    let intuit = |name, conditions: Vec<Condition>| LogicSystem {
        name,
        semantics: Semantics::Intuitionistic,
        conditions,
        schemata: vec![
            ("k", schema("delta (phi -> psi) -> (delta phi -> delta psi)")),
            ("t", schema("delta phi -> phi")),
        ],
        rules: vec!["mp", "rn"],
        language: Fragment::intuitionistic(),
    };

    let classical_core = || {
        vec![
            ("k-box", schema("box (phi -> psi) -> (box phi -> box psi)")),
            ("t-box", schema("box phi -> phi")),
            ("k-delta", schema("delta (phi -> psi) -> (delta phi -> delta psi)")),
            ("t-delta", schema("delta phi -> phi")),
            ("delta-n", schema("delta phi -> box phi")),
        ]
    };
    let sfc2 = || ("sfc-2", schema("delta phi -> box delta phi"));
    let sfc3 = || ("sfc-3", schema("delta phi -> delta box phi"));
    let sfc4 = || ("sfc-4", schema("box phi -> box box phi"));
    let sfc5 = || ("sfc-5", schema("delta phi -> delta delta phi"));
    let classical = |name, conditions: Vec<Condition>, sfcs: Vec<(&'static str, Formula)>| {
        LogicSystem {
            name,
            semantics: Semantics::Classical,
            conditions,
            schemata: classical_core().into_iter().chain(sfcs).collect(),
            rules: vec!["mp", "rn-box", "rn-delta"],
            language: Fragment::classical(),
        }
    };

    vec![
        intuit("IML1", vec![Base, Arrow, Delta]),
        intuit("IML2", vec![Base, Arrow, Delta, T]),
        intuit("IML1-F1", vec![Base, Arrow, Delta, F1]),
        intuit("IML2-F1", vec![Base, Arrow, Delta, T, F1]),
        classical("CL1", vec![Base], vec![]),
        classical("CL2", vec![Base, Delta], vec![sfc2()]),
        classical("CL3", vec![Base, T], vec![sfc3()]),
        classical("CL4", vec![Base, Arrow], vec![sfc4()]),
        classical("CL5", vec![Base, Max4], vec![sfc5()]),
        classical("CL2.4", vec![Base, Delta, Arrow], vec![sfc2(), sfc4()]),
        classical(
            "CL2.4.5",
            vec![Base, Delta, Arrow, Max4],
            vec![sfc2(), sfc4(), sfc5()],
        ),
    ]
}

/// Look up a registry entry by its exact name.
pub fn find_logic(name: &str) -> Option<LogicSystem> {
    logic_registry().into_iter().find(|l| l.name == name)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("world count {0} is outside the searchable range 1..=4")]
    WorldBound(usize),
    #[error("`{kind}` is outside the {logic} language")]
    OutsideLanguage { kind: NodeKind, logic: String },
    #[error("formula has {atoms} variables but the budget allows max_vars = {max_vars}")]
    TooManyVars { atoms: usize, max_vars: usize },
}

/// Resource ceiling for one search call. `max_worlds` must stay within
/// 1..=4; `time_limit` of `None` means unbounded time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_worlds: usize,
    pub max_vars: usize,
    pub time_limit: Option<Duration>,
}

impl SearchBudget {
    pub fn worlds(max_worlds: usize) -> SearchBudget {
        SearchBudget {
            max_worlds,
            max_vars: 2,
            time_limit: None,
        }
    }
}

/// Legal (min, max) pairs for world `w`, min-major in subset-binary order.
fn world_choices(n: usize, w: usize) -> Vec<(WorldSet, WorldSet)> {
    let mut out = Vec::new();
    for min in subsets(n) {
        if !min.contains(w) {
            continue;
        }
        for max in subsets(n) {
            if min.is_subset(max) {
                out.push((min, max));
            }
        }
    }
    out
}

/// Every frame over canonical worlds `w0..w{n-1}` satisfying `conds`.
/// Deterministic order: world 0's (min, max) choice varies slowest and each
/// world's choices run min-major in subset-binary order. No isomorphism
/// pruning, so a search's first witness is reproducible.
pub fn enumerate_frames(
    n: usize,
    conds: &[Condition],
) -> Result<impl Iterator<Item = NFrame>, SearchError> {
    if !(1..=4).contains(&n) {
        return Err(SearchError::WorldBound(n));
    }
    let names: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let conds = conds.to_vec();
    let iter = (0..n)
        .map(|w| world_choices(n, w).into_iter())
        .multi_cartesian_product()
        .filter_map(move |combo| {
            let (min, max) = combo.into_iter().unzip();
            let frame = NFrame::new(names.clone(), min, max)
                .expect("per-world choices satisfy the frame invariants");
            conds.iter().all(|c| c.holds(&frame)).then_some(frame)
        });
    Ok(iter)
}

/// Every model over `frame` and `vars`. Deterministic order: `vars[0]`'s
/// extension varies slowest and extensions run in subset-binary order. In
/// intuitionistic semantics only hereditary valuations are yielded.
pub fn enumerate_models<'a>(
    frame: &NFrame,
    vars: &'a [String],
    semantics: Semantics,
) -> impl Iterator<Item = NModel> + use<'a> {
    assert!(!vars.is_empty(), "enumerate_models needs at least one variable");
    let n = frame.n();
    // Heredity is a per-variable property, so filtering each variable's
    // candidate list up front equals filtering the full product.
    let legal: Vec<WorldSet> = subsets(n)
        .filter(|set| {
            semantics == Semantics::Classical
                || set.iter().all(|w| frame.min(w).is_subset(*set))
        })
        .collect();
    let frame = frame.clone();
    vars.iter()
        .map(|_| legal.clone().into_iter())
        .multi_cartesian_product()
        .map(move |sets| {
            let valuation: BTreeMap<String, WorldSet> =
                vars.iter().cloned().zip(sets).collect();
            NModel::new(frame.clone(), valuation, semantics)
                .expect("enumerated valuations are hereditary")
        })
}

/// Result of a bounded countermodel search. Exhausting the time budget is
/// reported distinctly from exhausting the enumeration.
#[derive(Debug, Clone)]
pub enum Outcome {
    Counter {
        model: NModel,
        world: String,
    },
    NoneWithinBudget {
        frames_checked: u64,
        models_checked: u64,
    },
    BudgetExhausted {
        elapsed: Duration,
        frames_checked: u64,
        models_checked: u64,
    },
}

fn language_check(f: &Formula, logic: &LogicSystem) -> Result<(), SearchError> {
    for node in f.subformulas() {
        if !logic.language.contains(node.kind()) {
            return Err(SearchError::OutsideLanguage {
                kind: node.kind(),
                logic: logic.name.to_string(),
            });
        }
    }
    Ok(())
}

/// First (frame, model, world) in enumeration order where `f` fails, over
/// frames of 1..=budget.max_worlds worlds in `logic`'s frame class. Worlds
/// are scanned in declared order within each model.
pub fn find_countermodel(
    f: &Formula,
    logic: &LogicSystem,
    budget: &SearchBudget,
) -> Result<Outcome, SearchError> {
    language_check(f, logic)?;
    let atoms = f.atoms();
    if atoms.len() > budget.max_vars {
        return Err(SearchError::TooManyVars {
            atoms: atoms.len(),
            max_vars: budget.max_vars,
        });
    }
    if !(1..=4).contains(&budget.max_worlds) {
        return Err(SearchError::WorldBound(budget.max_worlds));
    }

    let started = Instant::now();
    let mut frames_checked = 0u64;
    let mut models_checked = 0u64;
    for n in 1..=budget.max_worlds {
        for frame in enumerate_frames(n, &logic.conditions)? {
            frames_checked += 1;
            let candidates: Box<dyn Iterator<Item = NModel>> = if atoms.is_empty() {
                let closed = NModel::new(frame.clone(), BTreeMap::new(), logic.semantics)
                    .expect("the empty valuation is hereditary");
                Box::new(std::iter::once(closed))
            } else {
                Box::new(enumerate_models(&frame, &atoms, logic.semantics))
            };
            for model in candidates {
                if let Some(limit) = budget.time_limit {
                    if started.elapsed() >= limit {
                        return Ok(Outcome::BudgetExhausted {
                            elapsed: started.elapsed(),
                            frames_checked,
                            models_checked,
                        });
                    }
                }
                models_checked += 1;
                let ext = extension(&model, f).expect("language was checked up front");
                if ext != model.frame().universe() {
                    let w = ext
                        .complement(n)
                        .first()
                        .expect("a non-full extension misses some world");
                    return Ok(Outcome::Counter {
                        world: model.frame().name(w).to_string(),
                        model,
                    });
                }
            }
        }
    }
    Ok(Outcome::NoneWithinBudget {
        frames_checked,
        models_checked,
    })
}

/// Verdict of [`decide_bounded_validity`]. A clean sweep is only ever
/// "valid up to the bound"; `complete_by_fmp` marks the one case where the
/// bound itself is conclusive.
#[derive(Debug, Clone)]
pub enum Verdict {
    ValidUpToBound {
        complete_by_fmp: bool,
        frames_checked: u64,
        models_checked: u64,
    },
    Countermodel {
        model: NModel,
        world: String,
    },
    BudgetExhausted {
        elapsed: Duration,
        frames_checked: u64,
        models_checked: u64,
    },
}

/// Wrap [`find_countermodel`] as a validity check. The verdict is flagged
/// complete when the logic is IML1, `f` stays in the {atoms, bot, &, |, ->,
/// delta} fragment, and the world budget reaches 2^|subformulas|: that
/// fragment has the finite model property at exactly that bound.
pub fn decide_bounded_validity(
    f: &Formula,
    logic: &LogicSystem,
    budget: &SearchBudget,
) -> Result<Verdict, SearchError> {
    Ok(match find_countermodel(f, logic, budget)? {
        Outcome::Counter { model, world } => Verdict::Countermodel { model, world },
        Outcome::NoneWithinBudget {
            frames_checked,
            models_checked,
        } => {
            let fmp_bound = 1u64.checked_shl(f.subformulas().len() as u32);
            let complete_by_fmp = logic.name == "IML1"
                && f.within(Fragment::delta_language())
                && fmp_bound.is_some_and(|b| budget.max_worlds as u64 >= b);
            Verdict::ValidUpToBound {
                complete_by_fmp,
                frames_checked,
                models_checked,
            }
        }
        Outcome::BudgetExhausted {
            elapsed,
            frames_checked,
            models_checked,
        } => Verdict::BudgetExhausted {
            elapsed,
            frames_checked,
            models_checked,
        },
    })
}
