//! Bounded morphisms, behavioral equivalence, bisimulations (maximal and
//! n-indexed chains), and an exhaustive formula-agreement oracle.
//!
//! Throughout, relations between two models are stored as one world-set row
//! per left-model world; rows over the right model's indices.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::eval::{node_extension, EvalError};
use crate::formula::{enumerate_formulas, Formula, Fragment};
use crate::nmodel::NModel;
use crate::world::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EquivError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("map is missing an image for world `{0}`")]
    PartialMap(String),
    #[error("models use different semantics modes")]
    SemanticsMismatch,
    #[error("invalid map JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A candidate bounded morphism: a total map from source worlds to target
/// worlds, by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldMap {
    pub map: BTreeMap<String, String>,
}

impl WorldMap {
    pub fn from_json(text: &str) -> Result<Self, EquivError> {
        serde_json::from_str(text).map_err(|e| EquivError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialization cannot fail")
    }

    /// Resolve to an index table, total on `m1` with images in `m2`.
    fn resolve(&self, m1: &NModel, m2: &NModel) -> Result<Vec<usize>, EquivError> {
        for name in self.map.keys() {
            if m1.frame().index(name).is_none() {
                return Err(EquivError::UnknownWorld(name.clone()));
            }
        }
        m1.frame()
            .names()
            .iter()
            .map(|name| {
                let image = self
                    .map
                    .get(name)
                    .ok_or_else(|| EquivError::PartialMap(name.clone()))?;
                m2.frame()
                    .index(image)
                    .ok_or_else(|| EquivError::UnknownWorld(image.clone()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismReport {
    Pass,
    /// Clause 1: atoms differ at `world`/its image. Clause 2: the image of
    /// min(world) is not exactly min(image). Clause 3: likewise for max.
    Fail { clause: u8, world: String },
}

/// All atoms named by either model's valuation.
fn atom_union<'a>(m1: &'a NModel, m2: &'a NModel) -> BTreeSet<&'a str> {
    m1.valuation()
        .map(|(a, _)| a)
        .chain(m2.valuation().map(|(a, _)| a))
        .collect()
}

/// Verify the three bounded-morphism clauses at every source world: atom
/// agreement, and literal image equality `f[min(w)] = min(f(w))` and
/// `f[max(w)] = max(f(w))`.
pub fn check_bounded_morphism(
    m1: &NModel,
    m2: &NModel,
    map: &WorldMap,
) -> Result<MorphismReport, EquivError> {
    if m1.semantics() != m2.semantics() {
        return Err(EquivError::SemanticsMismatch);
    }
    let f = map.resolve(m1, m2)?;
    let atoms = atom_union(m1, m2);
    let image = |set: WorldSet| -> WorldSet { set.iter().map(|x| f[x]).collect() };
    for w in 0..m1.frame().n() {
        let fail = |clause: u8| {
            Ok(MorphismReport::Fail {
                clause,
                world: m1.frame().name(w).to_string(),
            })
        };
        if atoms
            .iter()
            .any(|q| m1.atom_extension(q).contains(w) != m2.atom_extension(q).contains(f[w]))
        {
            return fail(1);
        }
        if image(m1.frame().min(w)) != m2.frame().min(f[w]) {
            return fail(2);
        }
        if image(m1.frame().max(w)) != m2.frame().max(f[w]) {
            return fail(3);
        }
    }
    Ok(MorphismReport::Pass)
}

/// Are `w1` and `w2` identified by the pair of candidate morphisms into `b`?
/// True iff both maps verify as bounded morphisms and `f(w1) = g(w2)`.
pub fn check_behavioral_equivalence(
    m1: &NModel,
    w1: &str,
    m2: &NModel,
    w2: &str,
    b: &NModel,
    f: &WorldMap,
    g: &WorldMap,
) -> Result<bool, EquivError> {
    let i1 = m1
        .frame()
        .index(w1)
        .ok_or_else(|| EquivError::UnknownWorld(w1.to_string()))?;
    let i2 = m2
        .frame()
        .index(w2)
        .ok_or_else(|| EquivError::UnknownWorld(w2.to_string()))?;
    if check_bounded_morphism(m1, b, f)? != MorphismReport::Pass {
        return Ok(false);
    }
    if check_bounded_morphism(m2, b, g)? != MorphismReport::Pass {
        return Ok(false);
    }
    let ft = f.resolve(m1, b)?;
    let gt = g.resolve(m2, b)?;
    Ok(ft[i1] == gt[i2])
}

/// A set of (left-model world, right-model world) pairs, by name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairRelation {
    pub pairs: BTreeSet<(String, String)>,
}

impl PairRelation {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, w1: &str, w2: &str) -> bool {
        self.pairs.contains(&(w1.to_string(), w2.to_string()))
    }

    fn from_rows(rows: &[WorldSet], m1: &NModel, m2: &NModel) -> PairRelation {
        let mut pairs = BTreeSet::new();
        for (w1, row) in rows.iter().enumerate() {
            for w2 in row.iter() {
                pairs.insert((
                    m1.frame().name(w1).to_string(),
                    m2.frame().name(w2).to_string(),
                ));
            }
        }
        PairRelation { pairs }
    }

    fn to_rows(&self, m1: &NModel, m2: &NModel) -> Result<Vec<WorldSet>, EquivError> {
        let mut rows = vec![WorldSet::EMPTY; m1.frame().n()];
        for (a, b) in &self.pairs {
            let w1 = m1
                .frame()
                .index(a)
                .ok_or_else(|| EquivError::UnknownWorld(a.clone()))?;
            let w2 = m2
                .frame()
                .index(b)
                .ok_or_else(|| EquivError::UnknownWorld(b.clone()))?;
            rows[w1].insert(w2);
        }
        Ok(rows)
    }
}

/// First violated zig-zag clause for the pair, numbered as in the 5-clause
/// bisimulation definition (2 min-back, 3 max-back, 4 min-forth,
/// 5 max-forth); `None` when all four hold against `rows`.
fn zigzag_violation(
    m1: &NModel,
    m2: &NModel,
    w1: usize,
    w2: usize,
    rows: &[WorldSet],
) -> Option<u8> {
    let f1 = m1.frame();
    let f2 = m2.frame();
    for y in f2.min(w2).iter() {
        if !f1.min(w1).iter().any(|x| rows[x].contains(y)) {
            return Some(2);
        }
    }
    for y in f2.max(w2).iter() {
        if !f1.max(w1).iter().any(|x| rows[x].contains(y)) {
            return Some(3);
        }
    }
    for x in f1.min(w1).iter() {
        if !f2.min(w2).iter().any(|y| rows[x].contains(y)) {
            return Some(4);
        }
    }
    for x in f1.max(w1).iter() {
        if !f2.max(w2).iter().any(|y| rows[x].contains(y)) {
            return Some(5);
        }
    }
    None
}

/// Rows of the atom-agreement relation: pairs satisfying clause 1.
fn atom_agreement_rows(m1: &NModel, m2: &NModel) -> Vec<WorldSet> {
    let atoms = atom_union(m1, m2);
    (0..m1.frame().n())
        .map(|w1| {
            let mut row = WorldSet::EMPTY;
            for w2 in 0..m2.frame().n() {
                if atoms
                    .iter()
                    .all(|q| m1.atom_extension(q).contains(w1) == m2.atom_extension(q).contains(w2))
                {
                    row.insert(w2);
                }
            }
            row
        })
        .collect()
}

/// The greatest bisimulation between the two models, possibly empty: start
/// from all atom-agreeing pairs and delete zig-zag violators until stable.
/// Every bisimulation between the models is contained in the result.
pub fn max_bisimulation(m1: &NModel, m2: &NModel) -> PairRelation {
    assert_eq!(
        m1.semantics(),
        m2.semantics(),
        "bisimulation needs a shared semantics mode"
    );
    let mut rows = atom_agreement_rows(m1, m2);
    loop {
        let mut changed = false;
        let snapshot = rows.clone();
        for w1 in 0..rows.len() {
            for w2 in snapshot[w1].iter() {
                if zigzag_violation(m1, m2, w1, w2, &snapshot).is_some() {
                    rows[w1] = rows[w1].intersection(WorldSet::singleton(w2).complement(64));
                    changed = true;
                }
            }
        }
        if !changed {
            return PairRelation::from_rows(&rows, m1, m2);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BisimReport {
    Pass,
    /// The definition wants a non-empty relation.
    Empty,
    /// `clause` 1 is atom agreement; 2–5 as in [`zigzag_violation`].
    Fail {
        clause: u8,
        left: String,
        right: String,
    },
}

/// Verify a candidate relation against all five bisimulation clauses at
/// every pair, in declared world order.
pub fn check_bisimulation(
    m1: &NModel,
    m2: &NModel,
    relation: &PairRelation,
) -> Result<BisimReport, EquivError> {
    if relation.is_empty() {
        return Ok(BisimReport::Empty);
    }
    let rows = relation.to_rows(m1, m2)?;
    let atoms = atom_union(m1, m2);
    for w1 in 0..rows.len() {
        for w2 in rows[w1].iter() {
            let clause = if atoms
                .iter()
                .any(|q| m1.atom_extension(q).contains(w1) != m2.atom_extension(q).contains(w2))
            {
                Some(1)
            } else {
                zigzag_violation(m1, m2, w1, w2, &rows)
            };
            if let Some(clause) = clause {
                return Ok(BisimReport::Fail {
                    clause,
                    left: m1.frame().name(w1).to_string(),
                    right: m2.frame().name(w2).to_string(),
                });
            }
        }
    }
    Ok(BisimReport::Pass)
}

/// The maximal chain `R_0 ⊇ R_1 ⊇ … ⊇ R_n`: `R_0` is atom agreement and
/// `R_{i+1}` keeps the `R_i` pairs whose four zig-zag clauses hold against
/// `R_i`. Two worlds are n-bisimilar exactly when the last relation pairs
/// them.
pub fn n_bisimulation(m1: &NModel, m2: &NModel, n: usize) -> Vec<PairRelation> {
    assert_eq!(
        m1.semantics(),
        m2.semantics(),
        "bisimulation needs a shared semantics mode"
    );
    let mut chain = Vec::with_capacity(n + 1);
    let mut rows = atom_agreement_rows(m1, m2);
    chain.push(PairRelation::from_rows(&rows, m1, m2));
    for _ in 0..n {
        let prev = rows.clone();
        for w1 in 0..rows.len() {
            for w2 in prev[w1].iter() {
                if zigzag_violation(m1, m2, w1, w2, &prev).is_some() {
                    rows[w1] = rows[w1].intersection(WorldSet::singleton(w2).complement(64));
                }
            }
        }
        chain.push(PairRelation::from_rows(&rows, m1, m2));
    }
    chain
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    /// First formula, in enumeration order, on which the two worlds differ.
    Disagree(Formula),
}

/// Exhaustively compare two worlds on every `fragment` formula over `vars`
/// within the degree and size bounds, in enumeration order.
///
/// Children always enumerate before parents, so extensions are built with a
/// single cache per model rather than re-deriving each formula from scratch.
pub fn formula_agreement(
    m1: &NModel,
    w1: &str,
    m2: &NModel,
    w2: &str,
    vars: &[&str],
    fragment: Fragment,
    max_degree: usize,
    max_size: usize,
) -> Result<Agreement, EquivError> {
    let i1 = m1
        .frame()
        .index(w1)
        .ok_or_else(|| EquivError::UnknownWorld(w1.to_string()))?;
    let i2 = m2
        .frame()
        .index(w2)
        .ok_or_else(|| EquivError::UnknownWorld(w2.to_string()))?;
    let mut cache1: HashMap<Formula, WorldSet> = HashMap::new();
    let mut cache2: HashMap<Formula, WorldSet> = HashMap::new();
    for f in enumerate_formulas(vars, fragment, max_degree, max_size) {
        let e1 = node_extension(m1, &f, &|g| cache1[g])?;
        let e2 = node_extension(m2, &f, &|g| cache2[g])?;
        if e1.contains(i1) != e2.contains(i2) {
            return Ok(Agreement::Disagree(f));
        }
        cache1.insert(f.clone(), e1);
        cache2.insert(f, e2);
    }
    Ok(Agreement::Agree)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::nmodel::{NFrame, Semantics};
    use crate::parse::parse;

    fn ws(worlds: &[usize]) -> WorldSet {
        worlds.iter().copied().collect()
    }

    fn model(
        names: &[&str],
        min: &[&[usize]],
        max: &[&[usize]],
        val: &[(&str, &[usize])],
    ) -> NModel {
        let frame = NFrame::new(
            names.iter().map(|s| s.to_string()).collect(),
            min.iter().map(|s| ws(s)).collect(),
            max.iter().map(|s| ws(s)).collect(),
        )
        .unwrap();
        let valuation = val.iter().map(|(a, s)| (a.to_string(), ws(s))).collect();
        NModel::new(frame, valuation, Semantics::Intuitionistic).unwrap()
    }

    fn identity_map(m: &NModel) -> WorldMap {
        WorldMap {
            map: m
                .frame()
                .names()
                .iter()
                .map(|n| (n.clone(), n.clone()))
                .collect(),
        }
    }

    fn shared_model() -> NModel {
        model(
            &["w", "v", "z"],
            &[&[0, 1], &[1], &[2]],
            &[&[0, 1], &[1, 2], &[2]],
            &[("p", &[0, 1])],
        )
    }

    #[test]
    fn identity_is_a_bounded_morphism() {
        let m = shared_model();
        let report = check_bounded_morphism(&m, &m, &identity_map(&m)).unwrap();
        assert_eq!(report, MorphismReport::Pass);
    }

    #[test]
    fn morphism_clause_failures() {
        // atoms differ under a constant map
        let two = model(&["a", "b"], &[&[0], &[1]], &[&[0], &[1]], &[("p", &[0])]);
        let one = model(&["u"], &[&[0]], &[&[0]], &[]);
        let constant = WorldMap {
            map: [("a", "u"), ("b", "u")]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        };
        assert_eq!(
            check_bounded_morphism(&two, &one, &constant).unwrap(),
            MorphismReport::Fail {
                clause: 1,
                world: "a".into()
            }
        );

        // min-image too small: discrete source into a chain target
        let discrete = model(&["a", "b"], &[&[0], &[1]], &[&[0], &[1]], &[]);
        let chain = model(&["c", "d"], &[&[0, 1], &[1]], &[&[0, 1], &[1]], &[]);
        let embed = WorldMap {
            map: [("a", "c"), ("b", "d")]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        };
        assert_eq!(
            check_bounded_morphism(&discrete, &chain, &embed).unwrap(),
            MorphismReport::Fail {
                clause: 2,
                world: "a".into()
            }
        );

        // a partial map errors out
        let partial = WorldMap {
            map: [("a".to_string(), "c".to_string())].into_iter().collect(),
        };
        assert_eq!(
            check_bounded_morphism(&discrete, &chain, &partial),
            Err(EquivError::PartialMap("b".into()))
        );
    }

    #[test]
    fn max_image_mismatch_hits_clause_3() {
        // min structure matches (all reflexive singletons) but the source
        // max points nowhere extra while the target's does
        let src = model(&["a", "b"], &[&[0], &[1]], &[&[0], &[1]], &[]);
        let tgt = model(&["c", "d"], &[&[0], &[1]], &[&[0, 1], &[1]], &[]);
        let f = WorldMap {
            map: [("a", "c"), ("b", "d")]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        };
        assert_eq!(
            check_bounded_morphism(&src, &tgt, &f).unwrap(),
            MorphismReport::Fail {
                clause: 3,
                world: "a".into()
            }
        );
    }

    #[test]
    fn behavioral_equivalence_via_identity() {
        let m = shared_model();
        let id = identity_map(&m);
        assert_eq!(
            check_behavioral_equivalence(&m, "w", &m, "w", &m, &id, &id),
            Ok(true)
        );
        // both morphisms fine but the images differ
        assert_eq!(
            check_behavioral_equivalence(&m, "w", &m, "v", &m, &id, &id),
            Ok(false)
        );
    }

    #[test]
    fn one_world_bisimulation() {
        let m = model(&["w"], &[&[0]], &[&[0]], &[("p", &[0])]);
        let rel = max_bisimulation(&m, &m);
        assert!(rel.contains("w", "w"));
        assert_eq!(check_bisimulation(&m, &m, &rel), Ok(BisimReport::Pass));
    }

    #[test]
    fn empty_relation_is_rejected() {
        let m1 = model(&["w"], &[&[0]], &[&[0]], &[("p", &[0])]);
        let m2 = model(&["w"], &[&[0]], &[&[0]], &[]);
        let rel = max_bisimulation(&m1, &m2);
        assert!(rel.is_empty(), "no atom-agreeing pairs at all");
        assert_eq!(check_bisimulation(&m1, &m2, &rel), Ok(BisimReport::Empty));
    }

    #[test]
    fn pre_refinement_atom_pairs_need_not_be_a_bisimulation() {
        let m = shared_model();
        let rows = atom_agreement_rows(&m, &m);
        let raw = PairRelation::from_rows(&rows, &m, &m);
        // (w, v) agree on p but differ structurally
        assert!(raw.contains("w", "v"));
        match check_bisimulation(&m, &m, &raw).unwrap() {
            BisimReport::Fail { .. } => {}
            other => panic!("expected a zig-zag failure, got {other:?}"),
        }
        // whereas the refined relation passes
        let refined = max_bisimulation(&m, &m);
        assert_eq!(check_bisimulation(&m, &m, &refined), Ok(BisimReport::Pass));
        assert!(refined.pairs.is_subset(&raw.pairs));
    }

    #[test]
    fn isomorphic_models_keep_the_isomorphism_graph() {
        let m1 = shared_model();
        let m2 = model(
            &["a", "b", "c"],
            &[&[0, 1], &[1], &[2]],
            &[&[0, 1], &[1, 2], &[2]],
            &[("p", &[0, 1])],
        );
        let rel = max_bisimulation(&m1, &m2);
        for (from, to) in [("w", "a"), ("v", "b"), ("z", "c")] {
            assert!(rel.contains(from, to));
        }
        assert_eq!(check_bisimulation(&m1, &m2, &rel), Ok(BisimReport::Pass));
    }

    #[test]
    fn n_bisimulation_chain_is_monotone_and_starts_from_atoms() {
        let m = shared_model();
        let chain = n_bisimulation(&m, &m, 3);
        assert_eq!(chain.len(), 4);
        let atoms = PairRelation::from_rows(&atom_agreement_rows(&m, &m), &m, &m);
        assert_eq!(chain[0], atoms);
        for i in 0..3 {
            assert!(chain[i + 1].pairs.is_subset(&chain[i].pairs));
        }
        // the diagonal survives to every depth on identical models
        for rel in &chain {
            for w in ["w", "v", "z"] {
                assert!(rel.contains(w, w));
            }
        }
    }

    #[test]
    fn formula_agreement_finds_the_first_witness() {
        let m = shared_model();
        assert_eq!(
            formula_agreement(&m, "w", &m, "w", &["p"], Fragment::agreement_language(), 2, 5),
            Ok(Agreement::Agree)
        );
        // w forces p, z does not; the witness is the atom itself
        assert_eq!(
            formula_agreement(&m, "w", &m, "z", &["p"], Fragment::agreement_language(), 2, 5),
            Ok(Agreement::Disagree(parse("p").unwrap()))
        );
    }

    #[test]
    fn bisimilar_pairs_agree_on_the_corpus() {
        let m1 = shared_model();
        let m2 = model(
            &["a", "b", "c"],
            &[&[0, 1], &[1], &[2]],
            &[&[0, 1], &[1, 2], &[2]],
            &[("p", &[0, 1])],
        );
        let rel = max_bisimulation(&m1, &m2);
        for (w1, w2) in &rel.pairs {
            assert_eq!(
                formula_agreement(
                    &m1,
                    w1,
                    &m2,
                    w2,
                    &["p"],
                    Fragment::agreement_language(),
                    2,
                    5
                ),
                Ok(Agreement::Agree),
                "bisimilar pair ({w1}, {w2}) must agree"
            );
        }
    }

    #[test]
    fn world_map_json_round_trip() {
        let map = WorldMap {
            map: BTreeMap::from([("w".to_string(), "a".to_string())]),
        };
        let text = map.to_json();
        assert!(text.contains("\"map\""));
        assert_eq!(WorldMap::from_json(&text).unwrap(), map);
        assert!(WorldMap::from_json("{\"maps\": {}}").is_err());
    }
}
