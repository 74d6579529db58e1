//! Forcing: extensions of formulas over a model, computed bottom-up.

use std::collections::HashMap;

use crate::formula::{Formula, NodeKind};
use crate::nmodel::{NModel, Semantics};
use crate::world::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("`{kind}` is not part of the {semantics} language")]
    Disallowed {
        kind: NodeKind,
        semantics: Semantics,
    },
}

/// The set of worlds forcing `f`, with every subformula's extension computed
/// once (post-order, memoized by node).
///
/// Intuitionistic clauses: `→`/`!` quantify over min(w), `⇝`/`~` and `Δ`/`∇`
/// over max(w), `◇` asks every u ∈ min(w) to see a witness in max(u), and
/// `♡` looks for a u with w ∈ min(u) and a witness in max(u). `□` is
/// rejected. Classical clauses: material `→`, `□` over min(w), `Δ` over
/// max(w); `⇝`, `∇`, `◇`, `♡` are rejected.
pub fn extension(model: &NModel, f: &Formula) -> Result<WorldSet, EvalError> {
    let subs = f.subformulas();
    let mut ext: HashMap<&Formula, WorldSet> = HashMap::new();
    for node in &subs {
        let set = node_extension(model, node, &|g| ext[g])?;
        ext.insert(node, set);
    }
    Ok(ext[f])
}

/// One clause-table step: the extension of `node` given its children's
/// extensions through `of`. Exposed within the crate so corpus sweeps can
/// keep their own cache across formulas.
pub(crate) fn node_extension(
    model: &NModel,
    node: &Formula,
    of: &dyn Fn(&Formula) -> WorldSet,
) -> Result<WorldSet, EvalError> {
    let frame = model.frame();
    let n = frame.n();
    let classical = model.semantics() == Semantics::Classical;
    let reject = |kind| {
        Err(EvalError::Disallowed {
            kind,
            semantics: model.semantics(),
        })
    };
    {
        let set = match node {
            Formula::Atom(q) => model.atom_extension(q),
            Formula::Bot => WorldSet::EMPTY,
            Formula::And(l, r) => of(l).intersection(of(r)),
            Formula::Or(l, r) => of(l).union(of(r)),
            Formula::Imp(l, r) => {
                // {v : v ⊮ l or v ⊩ r}
                let table = of(l).complement(n).union(of(r));
                if classical {
                    table
                } else {
                    sieve(n, |w| frame.min(w).is_subset(table))
                }
            }
            Formula::MaxImp(l, r) => {
                if classical {
                    return reject(NodeKind::MaxImp);
                }
                let table = of(l).complement(n).union(of(r));
                sieve(n, |w| frame.max(w).is_subset(table))
            }
            Formula::Delta(c) => sieve(n, |w| frame.max(w).is_subset(of(c))),
            Formula::Nabla(c) => {
                if classical {
                    return reject(NodeKind::Nabla);
                }
                sieve(n, |w| frame.max(w).intersects(of(c)))
            }
            Formula::Box_(c) => {
                if !classical {
                    return reject(NodeKind::Box_);
                }
                sieve(n, |w| frame.min(w).is_subset(of(c)))
            }
            Formula::Dia(c) => {
                if classical {
                    return reject(NodeKind::Dia);
                }
                let sees = sieve(n, |x| frame.max(x).intersects(of(c)));
                sieve(n, |w| frame.min(w).is_subset(sees))
            }
            Formula::Heart(c) => {
                if classical {
                    return reject(NodeKind::Heart);
                }
                // worlds reachable as min-members of some u whose max sees c
                let mut set = WorldSet::EMPTY;
                for u in 0..n {
                    if frame.max(u).intersects(of(c)) {
                        set = set.union(frame.min(u));
                    }
                }
                set
            }
        };
        Ok(set)
    }
}

fn sieve(n: usize, pred: impl Fn(usize) -> bool) -> WorldSet {
    let mut set = WorldSet::EMPTY;
    for w in 0..n {
        if pred(w) {
            set.insert(w);
        }
    }
    set
}

/// Truth of `f` at a named world.
pub fn force(model: &NModel, world: &str, f: &Formula) -> Result<bool, EvalError> {
    let w = model
        .frame()
        .index(world)
        .ok_or_else(|| EvalError::UnknownWorld(world.to_string()))?;
    Ok(extension(model, f)?.contains(w))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonotonicityReport {
    Pass,
    /// `world` forces the formula but `successor ∈ min(world)` does not.
    Fail { world: String, successor: String },
}

/// Check `w ⊩ f ⇒ min(w) ⊆ ext(f)` over the whole model.
///
/// Requires an intuitionistic model; evaluation errors (a `box` inside `f`)
/// propagate.
pub fn check_monotonicity(model: &NModel, f: &Formula) -> Result<MonotonicityReport, EvalError> {
    assert_eq!(
        model.semantics(),
        Semantics::Intuitionistic,
        "monotonicity is an intuitionistic property"
    );
    let ext = extension(model, f)?;
    let frame = model.frame();
    for w in ext.iter() {
        if let Some(u) = frame.min(w).iter().find(|&u| !ext.contains(u)) {
            return Ok(MonotonicityReport::Fail {
                world: frame.name(w).to_string(),
                successor: frame.name(u).to_string(),
            });
        }
    }
    Ok(MonotonicityReport::Pass)
}
