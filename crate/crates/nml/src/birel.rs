//! Bi-relational frames and models, their forcing, both conversions to and
//! from neighborhood models, and filtration.
//!
//! A bi-relational frame carries an intuitionistic preorder `≤` and a modal
//! relation `R` with `≤ ⊆ R` and the mixing law `w ≤ v, v R u ⇒ w R u`.
//! Forcing is defined on the `{∧, ∨, →, ⊥, Δ}` fragment only.

use std::collections::BTreeMap;

use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::conditions::{check_conditions, Condition, Verdict};
use crate::formula::{Formula, Fragment, NodeKind};
use crate::nmodel::{ModelError, NFrame, NModel, Semantics};
use crate::world::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BrError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("relational law `{law}` fails, witness ({})", witness.join(", "))]
    Law {
        law: &'static str,
        witness: Vec<String>,
    },
    #[error("`{0}` is outside the bi-relational fragment (atoms, bot, &, |, ->, delta)")]
    Fragment(NodeKind),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("classical models have no bi-relational counterpart")]
    Classical,
    #[error(
        "frame fails the `{}` condition, witness ({})", condition.name(), witness.join(", ")
    )]
    Condition {
        condition: Condition,
        witness: Vec<String>,
    },
}

/// Worlds plus the two relations, stored as successor rows. Only shape is
/// checked at construction; the relational laws are diagnosed by
/// [`validate_br`], so law-violating frames are representable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrFrame {
    names: Vec<String>,
    leq: Vec<WorldSet>,
    r: Vec<WorldSet>,
}

impl BrFrame {
    pub fn new(
        names: Vec<String>,
        leq: Vec<WorldSet>,
        r: Vec<WorldSet>,
    ) -> Result<Self, ModelError> {
        assert_eq!(names.len(), leq.len());
        assert_eq!(names.len(), r.len());
        if names.is_empty() {
            return Err(ModelError::NoWorlds);
        }
        if names.len() > crate::world::MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(names.len()));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(ModelError::DuplicateWorld(name.clone()));
            }
        }
        let universe = WorldSet::full(names.len());
        for (w, name) in names.iter().enumerate() {
            for (set, which) in [(leq[w], "leq"), (r[w], "r")] {
                if !set.is_subset(universe) {
                    return Err(ModelError::UnknownWorld {
                        name: format!("#{}", set.iter().find(|&b| b >= names.len()).unwrap()),
                        place: format!("{which}({name})"),
                    });
                }
            }
        }
        Ok(BrFrame { names, leq, r })
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, w: usize) -> &str {
        &self.names[w]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `{v : w ≤ v}`.
    pub fn leq(&self, w: usize) -> WorldSet {
        self.leq[w]
    }

    /// `{v : w R v}`.
    pub fn r(&self, w: usize) -> WorldSet {
        self.r[w]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrModel {
    frame: BrFrame,
    valuation: BTreeMap<String, WorldSet>,
}

impl BrModel {
    /// Validates shape, the relational laws, and heredity along `≤`.
    pub fn new(frame: BrFrame, valuation: BTreeMap<String, WorldSet>) -> Result<Self, BrError> {
        let m = BrModel::new_unchecked(frame, valuation)?;
        if let Some((law, witness)) = validate_br(&m.frame).first_failure() {
            return Err(BrError::Law { law, witness });
        }
        for (atom, ext) in &m.valuation {
            for w in ext.iter() {
                if let Some(v) = m.frame.leq(w).iter().find(|&v| !ext.contains(v)) {
                    return Err(ModelError::Heredity {
                        atom: atom.clone(),
                        world: m.frame.name(w).to_string(),
                        successor: m.frame.name(v).to_string(),
                    }
                    .into());
                }
            }
        }
        Ok(m)
    }

    /// Shape checks only; laws and heredity left to the caller.
    pub fn new_unchecked(
        frame: BrFrame,
        valuation: BTreeMap<String, WorldSet>,
    ) -> Result<Self, BrError> {
        let universe = WorldSet::full(frame.n());
        for (atom, set) in &valuation {
            if !set.is_subset(universe) {
                return Err(ModelError::UnknownWorld {
                    name: format!("#{}", set.iter().find(|&b| b >= frame.n()).unwrap()),
                    place: format!("valuation of `{atom}`"),
                }
                .into());
            }
        }
        Ok(BrModel { frame, valuation })
    }

    pub fn frame(&self) -> &BrFrame {
        &self.frame
    }

    pub fn atom_extension(&self, atom: &str) -> WorldSet {
        self.valuation.get(atom).copied().unwrap_or(WorldSet::EMPTY)
    }

    pub fn valuation(&self) -> impl Iterator<Item = (&str, WorldSet)> {
        self.valuation.iter().map(|(a, s)| (a.as_str(), *s))
    }

    pub fn from_json(text: &str) -> Result<Self, BrError> {
        let raw: RawBrModel =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        let names = raw.worlds;
        if names.is_empty() {
            return Err(ModelError::NoWorlds.into());
        }
        if names.len() > crate::world::MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(names.len()).into());
        }
        let index = |name: &str, place: &str| {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| ModelError::UnknownWorld {
                    name: name.to_string(),
                    place: place.to_string(),
                })
        };
        let mut leq = vec![WorldSet::EMPTY; names.len()];
        let mut r = vec![WorldSet::EMPTY; names.len()];
        for (pairs, rows, which) in [(&raw.leq, &mut leq, "leq"), (&raw.r, &mut r, "r")] {
            for [from, to] in pairs {
                rows[index(from, which)?].insert(index(to, which)?);
            }
        }
        let mut valuation = BTreeMap::new();
        for (atom, worlds) in &raw.valuation {
            let mut set = WorldSet::EMPTY;
            for name in worlds {
                set.insert(index(name, &format!("valuation of `{atom}`"))?);
            }
            valuation.insert(atom.clone(), set);
        }
        BrModel::new(BrFrame::new(names, leq, r)?, valuation)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBrModel {
    worlds: Vec<String>,
    leq: Vec<[String; 2]>,
    r: Vec<[String; 2]>,
    valuation: BTreeMap<String, Vec<String>>,
}

impl Serialize for BrModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let f = &self.frame;
        let pairs = |rows: &dyn Fn(usize) -> WorldSet| -> Vec<[String; 2]> {
            let mut out = Vec::new();
            for w in 0..f.n() {
                for v in rows(w).iter() {
                    out.push([f.name(w).to_string(), f.name(v).to_string()]);
                }
            }
            out
        };
        let mut map = serializer.serialize_map(Some(4))?;
        map.serialize_entry("worlds", f.names())?;
        map.serialize_entry("leq", &pairs(&|w| f.leq(w)))?;
        map.serialize_entry("r", &pairs(&|w| f.r(w)))?;
        let val: BTreeMap<&str, Vec<&str>> = self
            .valuation
            .iter()
            .map(|(a, s)| {
                (
                    a.as_str(),
                    s.iter().map(|w| f.name(w)).collect::<Vec<&str>>(),
                )
            })
            .collect();
        map.serialize_entry("valuation", &val)?;
        map.end()
    }
}

/// Verdicts for the relational laws, each with a first witness in declared
/// world order. `antisymmetry` is informational: the conversion theorems
/// only ever yield a preorder, so it is reported but never required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrReport {
    pub reflexivity: Verdict,
    pub transitivity: Verdict,
    pub leq_in_r: Verdict,
    pub mix: Verdict,
    pub antisymmetry: Verdict,
}

impl BrReport {
    /// First failing required law, in report order.
    pub fn first_failure(&self) -> Option<(&'static str, Vec<String>)> {
        for (law, verdict) in [
            ("reflexivity", &self.reflexivity),
            ("transitivity", &self.transitivity),
            ("leq-in-r", &self.leq_in_r),
            ("mix", &self.mix),
        ] {
            if let Verdict::Fail(witness) = verdict {
                return Some((law, witness.clone()));
            }
        }
        None
    }

    pub fn is_valid(&self) -> bool {
        self.first_failure().is_none()
    }
}

pub fn validate_br(frame: &BrFrame) -> BrReport {
    let n = frame.n();
    let name = |w: usize| frame.name(w).to_string();
    let fail1 = |w| Verdict::Fail(vec![name(w)]);
    let fail2 = |w, v| Verdict::Fail(vec![name(w), name(v)]);
    let fail3 = |w, v, u| Verdict::Fail(vec![name(w), name(v), name(u)]);

    let mut reflexivity = Verdict::Pass;
    for w in 0..n {
        if !frame.leq(w).contains(w) {
            reflexivity = fail1(w);
            break;
        }
    }
    let mut transitivity = Verdict::Pass;
    'tr: for w in 0..n {
        for v in frame.leq(w).iter() {
            if let Some(u) = frame.leq(v).iter().find(|&u| !frame.leq(w).contains(u)) {
                transitivity = fail3(w, v, u);
                break 'tr;
            }
        }
    }
    let mut leq_in_r = Verdict::Pass;
    for w in 0..n {
        if let Some(v) = frame.leq(w).iter().find(|&v| !frame.r(w).contains(v)) {
            leq_in_r = fail2(w, v);
            break;
        }
    }
    // w ≤ v and v R u must give w R u
    let mut mix = Verdict::Pass;
    'mix: for w in 0..n {
        for v in frame.leq(w).iter() {
            if let Some(u) = frame.r(v).iter().find(|&u| !frame.r(w).contains(u)) {
                mix = fail3(w, v, u);
                break 'mix;
            }
        }
    }
    let mut antisymmetry = Verdict::Pass;
    'anti: for w in 0..n {
        for v in frame.leq(w).iter() {
            if v != w && frame.leq(v).contains(w) {
                antisymmetry = fail2(w, v);
                break 'anti;
            }
        }
    }
    BrReport {
        reflexivity,
        transitivity,
        leq_in_r,
        mix,
        antisymmetry,
    }
}

fn fragment_check(f: &Formula) -> Result<(), BrError> {
    let allowed = Fragment::delta_language();
    match f.within(allowed) {
        true => Ok(()),
        false => {
            let kind = f
                .subformulas()
                .iter()
                .map(|g| g.kind())
                .find(|&k| !allowed.contains(k))
                .unwrap();
            Err(BrError::Fragment(kind))
        }
    }
}

/// Extension of a fragment formula: `→` quantifies over `≤`-successors, `Δ`
/// over `R`-successors.
pub fn br_extension(model: &BrModel, f: &Formula) -> Result<WorldSet, BrError> {
    fragment_check(f)?;
    let frame = model.frame();
    let n = frame.n();
    let subs = f.subformulas();
    let mut ext: std::collections::HashMap<&Formula, WorldSet> =
        std::collections::HashMap::new();
    for node in &subs {
        let of = |g: &Formula| ext[g];
        let row = |pred: &dyn Fn(usize) -> bool| {
            let mut set = WorldSet::EMPTY;
            for w in 0..n {
                if pred(w) {
                    set.insert(w);
                }
            }
            set
        };
        let set = match node {
            Formula::Atom(q) => model.atom_extension(q),
            Formula::Bot => WorldSet::EMPTY,
            Formula::And(l, r) => of(l).intersection(of(r)),
            Formula::Or(l, r) => of(l).union(of(r)),
            Formula::Imp(l, r) => {
                let table = of(l).complement(n).union(of(r));
                row(&|w| frame.leq(w).is_subset(table))
            }
            Formula::Delta(c) => row(&|w| frame.r(w).is_subset(of(c))),
            _ => unreachable!("fragment checked above"),
        };
        ext.insert(node, set);
    }
    Ok(ext[f])
}

pub fn br_force(model: &BrModel, world: &str, f: &Formula) -> Result<bool, BrError> {
    let w = model
        .frame()
        .index(world)
        .ok_or_else(|| BrError::UnknownWorld(world.to_string()))?;
    Ok(br_extension(model, f)?.contains(w))
}

/// Reads `≤` as the minimal and `R` as the maximal neighborhood. The result
/// satisfies BASE, ARROW and DELTA, and forces exactly the same fragment
/// formulas at every world.
pub fn birel_to_nbhd(model: &BrModel) -> Result<NModel, BrError> {
    if let Some((law, witness)) = validate_br(model.frame()).first_failure() {
        return Err(BrError::Law { law, witness });
    }
    let f = model.frame();
    let frame = NFrame::new(
        f.names().to_vec(),
        (0..f.n()).map(|w| f.leq(w)).collect(),
        (0..f.n()).map(|w| f.r(w)).collect(),
    )?;
    let valuation = model.valuation.clone();
    Ok(NModel::new(frame, valuation, Semantics::Intuitionistic)?)
}

/// Reads the minimal neighborhood as `≤` and the maximal one as `R`.
/// Requires an intuitionistic model over an ARROW+DELTA frame: ARROW makes
/// `≤` transitive and DELTA gives the mixing law.
pub fn nbhd_to_birel(model: &NModel) -> Result<BrModel, BrError> {
    if model.semantics() == Semantics::Classical {
        return Err(BrError::Classical);
    }
    let frame = model.frame();
    let report = check_conditions(
        frame,
        &[Condition::Base, Condition::Arrow, Condition::Delta],
    );
    for (condition, verdict) in report.results {
        if let Verdict::Fail(witness) = verdict {
            return Err(BrError::Condition { condition, witness });
        }
    }
    let br = BrFrame::new(
        frame.names().to_vec(),
        (0..frame.n()).map(|w| frame.min(w)).collect(),
        (0..frame.n()).map(|w| frame.max(w)).collect(),
    )?;
    let valuation = model.valuation().map(|(a, s)| (a.to_string(), s)).collect();
    BrModel::new(br, valuation)
}

/// Quotient of a model by agreement on `Σ = Sub(γ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredModel {
    pub model: BrModel,
    /// Original world name → name of its class representative.
    pub class_of: BTreeMap<String, String>,
    /// Sub(γ) in post-order.
    pub sigma: Vec<Formula>,
}

impl Serialize for FilteredModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("model", &self.model)?;
        map.serialize_entry("class_of", &self.class_of)?;
        let sigma: Vec<String> = self.sigma.iter().map(crate::parse::pretty).collect();
        map.serialize_entry("sigma", &sigma)?;
        map.end()
    }
}

impl FilteredModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialization cannot fail")
    }
}

/// Filtrate `model` through the subformulas of `gamma`.
///
/// Worlds collapse when they force the same part of Σ; each class is named
/// after its earliest member. `[w] ≤ [v]` iff v's Σ-theory extends w's, and
/// `[w] R [v]` iff v forces every β with Δβ ∈ w's Σ-theory. Forcing of every
/// α ∈ Σ survives the quotient: `br_force(model, w, α)` equals
/// `br_force(filtered, class_of(w), α)`.
pub fn filtrate(model: &BrModel, gamma: &Formula) -> Result<FilteredModel, BrError> {
    fragment_check(gamma)?;
    let sigma = gamma.subformulas();
    let frame = model.frame();
    let n = frame.n();

    // sig[w] = bitmask of forced Σ-members
    let exts: Vec<WorldSet> = sigma
        .iter()
        .map(|a| br_extension(model, a))
        .collect::<Result<_, _>>()?;
    let sig = |w: usize| -> u64 {
        let mut bits = 0u64;
        for (i, ext) in exts.iter().enumerate() {
            if ext.contains(w) {
                bits |= 1 << i;
            }
        }
        bits
    };
    let sigs: Vec<u64> = (0..n).map(sig).collect();

    // representatives in declared order
    let mut reps: Vec<usize> = Vec::new();
    let mut class_index = vec![usize::MAX; n];
    for w in 0..n {
        match reps.iter().position(|&r| sigs[r] == sigs[w]) {
            Some(c) => class_index[w] = c,
            None => {
                class_index[w] = reps.len();
                reps.push(w);
            }
        }
    }

    let names: Vec<String> = reps.iter().map(|&r| frame.name(r).to_string()).collect();
    let theory_of = |c: usize| sigs[reps[c]];
    let mut leq = vec![WorldSet::EMPTY; reps.len()];
    let mut r = vec![WorldSet::EMPTY; reps.len()];
    for a in 0..reps.len() {
        for b in 0..reps.len() {
            if theory_of(a) & !theory_of(b) == 0 {
                leq[a].insert(b);
            }
            let delta_obliges = sigma.iter().enumerate().all(|(i, alpha)| {
                match alpha {
                    Formula::Delta(beta) => {
                        // w ⊩ Δβ must push β to v
                        theory_of(a) >> i & 1 == 0
                            || exts[sigma.iter().position(|s| s == &**beta).unwrap()]
                                .contains(reps[b])
                    }
                    _ => true,
                }
            });
            if delta_obliges {
                r[a].insert(b);
            }
        }
    }

    let mut valuation = BTreeMap::new();
    for (atom, ext) in model.valuation() {
        if sigma.iter().any(|a| matches!(a, Formula::Atom(q) if q == atom)) {
            let mut set = WorldSet::EMPTY;
            for w in ext.iter() {
                set.insert(class_index[w]);
            }
            valuation.insert(atom.to_string(), set);
        }
    }

    let filtered = BrModel::new(BrFrame::new(names.clone(), leq, r)?, valuation)?;
    let class_of = (0..n)
        .map(|w| (frame.name(w).to_string(), names[class_index[w]].clone()))
        .collect();
    Ok(FilteredModel {
        model: filtered,
        class_of,
        sigma,
    })
}
