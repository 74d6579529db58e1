//! Neighborhood frames and models.
//!
//! A frame stores, for each world, the pair (minimal neighborhood, maximal
//! neighborhood). The full neighborhood family at `w` is exactly the interval
//! `{X : min(w) ⊆ X ⊆ max(w)}` and is never materialized.
//!
//! Frames and models are immutable after validation; every checker and
//! evaluator downstream is a pure function, so sharing across threads is safe.

use std::collections::BTreeMap;

use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::world::WorldSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    Intuitionistic,
    Classical,
}

impl Semantics {
    pub fn as_str(self) -> &'static str {
        match self {
            Semantics::Intuitionistic => "intuitionistic",
            Semantics::Classical => "classical",
        }
    }
}

impl std::fmt::Display for Semantics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Semantics {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s {
            "intuitionistic" => Ok(Semantics::Intuitionistic),
            "classical" => Ok(Semantics::Classical),
            other => Err(ModelError::BadSemantics(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("a frame needs at least one world")]
    NoWorlds,
    #[error("{0} worlds exceed the representation limit of 64")]
    TooManyWorlds(usize),
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("unknown world `{name}` in {place}")]
    UnknownWorld { name: String, place: String },
    #[error("`{which}` is missing an entry for world `{world}`")]
    MissingEntry { which: &'static str, world: String },
    #[error("world `{0}` is not a member of its own minimal neighborhood")]
    NotReflexive(String),
    #[error("minimal neighborhood of `{0}` is not contained in its maximal neighborhood")]
    MinExceedsMax(String),
    #[error(
        "heredity fails for atom `{atom}`: true at `{world}` but not at `{successor}` \
         in min({world})"
    )]
    Heredity {
        atom: String,
        world: String,
        successor: String,
    },
    #[error("unrecognized semantics `{0}`: expected `intuitionistic` or `classical`")]
    BadSemantics(String),
    #[error("invalid model JSON: {0}")]
    Json(String),
}

/// Worlds in declared order plus one (min, max) neighborhood pair per world.
///
/// Invariants, checked at construction: at least one world, no duplicate
/// names, `w ∈ min(w)`, and `min(w) ⊆ max(w)` for every `w`. The declared
/// order fixes witness selection and enumeration order everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NFrame {
    names: Vec<String>,
    min: Vec<WorldSet>,
    max: Vec<WorldSet>,
}

impl NFrame {
    pub fn new(
        names: Vec<String>,
        min: Vec<WorldSet>,
        max: Vec<WorldSet>,
    ) -> Result<Self, ModelError> {
        assert_eq!(names.len(), min.len());
        assert_eq!(names.len(), max.len());
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
            for (set, which) in [(min[w], "min"), (max[w], "max")] {
                if !set.is_subset(universe) {
                    return Err(ModelError::UnknownWorld {
                        name: format!("#{}", set.iter().find(|&b| b >= names.len()).unwrap()),
                        place: format!("{which}({name})"),
                    });
                }
            }
            if !min[w].contains(w) {
                return Err(ModelError::NotReflexive(name.clone()));
            }
            if !min[w].is_subset(max[w]) {
                return Err(ModelError::MinExceedsMax(name.clone()));
            }
        }
        Ok(NFrame { names, min, max })
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

    pub fn min(&self, w: usize) -> WorldSet {
        self.min[w]
    }

    pub fn max(&self, w: usize) -> WorldSet {
        self.max[w]
    }

    pub fn universe(&self) -> WorldSet {
        WorldSet::full(self.n())
    }

    /// Render a world set as names in declared order.
    pub fn set_names(&self, set: WorldSet) -> Vec<String> {
        set.iter().map(|w| self.names[w].clone()).collect()
    }
}

/// A frame with a valuation and a semantics mode.
///
/// Intuitionistic models satisfy heredity (`w ∈ V(q)` implies
/// `min(w) ⊆ V(q)`), enforced by [`NModel::new`]. Use
/// [`NModel::new_unchecked`] to hold a shape-valid model whose heredity is
/// yet to be examined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NModel {
    frame: NFrame,
    valuation: BTreeMap<String, WorldSet>,
    semantics: Semantics,
}

impl NModel {
    pub fn new(
        frame: NFrame,
        valuation: BTreeMap<String, WorldSet>,
        semantics: Semantics,
    ) -> Result<Self, ModelError> {
        let m = NModel::new_unchecked(frame, valuation, semantics)?;
        if m.semantics == Semantics::Intuitionistic {
            if let HeredityReport::Fail {
                atom,
                world,
                successor,
            } = check_heredity(&m)
            {
                return Err(ModelError::Heredity {
                    atom,
                    world,
                    successor,
                });
            }
        }
        Ok(m)
    }

    /// Shape validation only: the heredity invariant is not enforced, so the
    /// result can be fed to [`check_heredity`] for a diagnosis.
    pub fn new_unchecked(
        frame: NFrame,
        valuation: BTreeMap<String, WorldSet>,
        semantics: Semantics,
    ) -> Result<Self, ModelError> {
        let universe = frame.universe();
        for (atom, set) in &valuation {
            if !set.is_subset(universe) {
                return Err(ModelError::UnknownWorld {
                    name: format!("#{}", set.iter().find(|&b| b >= frame.n()).unwrap()),
                    place: format!("valuation of `{atom}`"),
                });
            }
        }
        Ok(NModel {
            frame,
            valuation,
            semantics,
        })
    }

    pub fn frame(&self) -> &NFrame {
        &self.frame
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    /// Extension of an atom; atoms absent from the valuation are false
    /// everywhere.
    pub fn atom_extension(&self, atom: &str) -> WorldSet {
        self.valuation.get(atom).copied().unwrap_or(WorldSet::EMPTY)
    }

    /// Valuation entries in atom-name order.
    pub fn valuation(&self) -> impl Iterator<Item = (&str, WorldSet)> {
        self.valuation.iter().map(|(a, s)| (a.as_str(), *s))
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let m = NModel::from_json_unchecked(text)?;
        if m.semantics == Semantics::Intuitionistic {
            if let HeredityReport::Fail {
                atom,
                world,
                successor,
            } = check_heredity(&m)
            {
                return Err(ModelError::Heredity {
                    atom,
                    world,
                    successor,
                });
            }
        }
        Ok(m)
    }

    /// Parse and shape-check a model without enforcing heredity.
    pub fn from_json_unchecked(text: &str) -> Result<Self, ModelError> {
        let raw: RawModel =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        let semantics: Semantics = raw.semantics.parse()?;
        let lookup = |place: &dyn Fn() -> String, worlds: &[String], names: &[String]| {
            let mut set = WorldSet::EMPTY;
            for name in worlds {
                match names.iter().position(|n| n == name) {
                    Some(i) => set.insert(i),
                    None => {
                        return Err(ModelError::UnknownWorld {
                            name: name.clone(),
                            place: place(),
                        })
                    }
                }
            }
            Ok(set)
        };
        let names = raw.worlds;
        if names.is_empty() {
            return Err(ModelError::NoWorlds);
        }
        if names.len() > crate::world::MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(names.len()));
        }
        let mut min = Vec::with_capacity(names.len());
        let mut max = Vec::with_capacity(names.len());
        for (pairs, out, which) in [(&raw.min, &mut min, "min"), (&raw.max, &mut max, "max")] {
            for name in &names {
                let worlds = pairs.get(name).ok_or_else(|| ModelError::MissingEntry {
                    which,
                    world: name.clone(),
                })?;
                out.push(lookup(&|| format!("{which}({name})"), worlds, &names)?);
            }
            if let Some(extra) = pairs.keys().find(|k| !names.contains(k)) {
                return Err(ModelError::UnknownWorld {
                    name: extra.clone(),
                    place: format!("{which} keys"),
                });
            }
        }
        let frame = NFrame::new(names, min, max)?;
        let mut valuation = BTreeMap::new();
        for (atom, worlds) in &raw.valuation {
            let set = lookup(
                &|| format!("valuation of `{atom}`"),
                worlds,
                frame.names(),
            )?;
            valuation.insert(atom.clone(), set);
        }
        NModel::new_unchecked(frame, valuation, semantics)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    semantics: String,
    worlds: Vec<String>,
    min: BTreeMap<String, Vec<String>>,
    max: BTreeMap<String, Vec<String>>,
    valuation: BTreeMap<String, Vec<String>>,
}

impl Serialize for NModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        // keys and their order are part of the file format
        let f = &self.frame;
        let sets_by_world = |pick: &dyn Fn(usize) -> WorldSet| -> Vec<(String, Vec<String>)> {
            (0..f.n())
                .map(|w| (f.name(w).to_string(), f.set_names(pick(w))))
                .collect()
        };
        let mut map = serializer.serialize_map(Some(5))?;
        map.serialize_entry("semantics", self.semantics.as_str())?;
        map.serialize_entry("worlds", f.names())?;
        map.serialize_entry(
            "min",
            &BTreeMapOrdered(sets_by_world(&|w| f.min(w))),
        )?;
        map.serialize_entry(
            "max",
            &BTreeMapOrdered(sets_by_world(&|w| f.max(w))),
        )?;
        let val: Vec<(String, Vec<String>)> = self
            .valuation
            .iter()
            .map(|(a, s)| (a.clone(), f.set_names(*s)))
            .collect();
        map.serialize_entry("valuation", &BTreeMapOrdered(val))?;
        map.end()
    }
}

/// Serializes key/value pairs as a JSON object in the order given, so model
/// files list worlds in declared order rather than alphabetically.
struct BTreeMapOrdered(Vec<(String, Vec<String>)>);

impl Serialize for BTreeMapOrdered {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeredityReport {
    Pass,
    Fail {
        atom: String,
        world: String,
        successor: String,
    },
}

/// Check heredity atom by atom: `w ∈ V(q)` must imply `min(w) ⊆ V(q)`.
///
/// Atoms are scanned in name order, worlds in declared order, and the first
/// violation is reported. Classical models pass vacuously, as do models with
/// an empty valuation.
pub fn check_heredity(model: &NModel) -> HeredityReport {
    if model.semantics == Semantics::Classical {
        return HeredityReport::Pass;
    }
    let f = model.frame();
    for (atom, ext) in &model.valuation {
        for w in ext.iter() {
            if !f.min(w).is_subset(*ext) {
                let successor = f.min(w).iter().find(|u| !ext.contains(*u)).unwrap();
                return HeredityReport::Fail {
                    atom: atom.clone(),
                    world: f.name(w).to_string(),
                    successor: f.name(successor).to_string(),
                };
            }
        }
    }
    HeredityReport::Pass
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ws(worlds: &[usize]) -> WorldSet {
        worlds.iter().copied().collect()
    }

    fn frame3() -> NFrame {
        // min(w)=max(w)={w,v}; min(v)={v}, max(v)={v,z}; min(z)=max(z)={z}
        NFrame::new(
            vec!["w".into(), "v".into(), "z".into()],
            vec![ws(&[0, 1]), ws(&[1]), ws(&[2])],
            vec![ws(&[0, 1]), ws(&[1, 2]), ws(&[2])],
        )
        .unwrap()
    }

    #[test]
    fn constructor_rejects_invariant_violations() {
        let err = NFrame::new(vec!["w".into()], vec![WorldSet::EMPTY], vec![ws(&[0])]);
        assert_eq!(err, Err(ModelError::NotReflexive("w".into())));

        let err = NFrame::new(
            vec!["w".into(), "v".into()],
            vec![ws(&[0, 1]), ws(&[1])],
            vec![ws(&[0]), ws(&[1])],
        );
        assert_eq!(err, Err(ModelError::MinExceedsMax("w".into())));

        let err = NFrame::new(
            vec!["w".into(), "w".into()],
            vec![ws(&[0]), ws(&[1])],
            vec![ws(&[0]), ws(&[1])],
        );
        assert_eq!(err, Err(ModelError::DuplicateWorld("w".into())));

        assert_eq!(NFrame::new(vec![], vec![], vec![]), Err(ModelError::NoWorlds));
    }

    #[test]
    fn heredity_examples() {
        let mut v = BTreeMap::new();
        v.insert("p".to_string(), ws(&[0, 1]));
        let m = NModel::new(frame3(), v, Semantics::Intuitionistic).unwrap();
        assert_eq!(check_heredity(&m), HeredityReport::Pass);

        // V(p) = {w} with v ∈ min(w) breaks heredity at (w, v)
        let mut v = BTreeMap::new();
        v.insert("p".to_string(), ws(&[0]));
        let m = NModel::new_unchecked(frame3(), v.clone(), Semantics::Intuitionistic).unwrap();
        assert_eq!(
            check_heredity(&m),
            HeredityReport::Fail {
                atom: "p".into(),
                world: "w".into(),
                successor: "v".into(),
            }
        );
        assert!(matches!(
            NModel::new(frame3(), v.clone(), Semantics::Intuitionistic),
            Err(ModelError::Heredity { .. })
        ));

        // same valuation is fine classically, and an empty valuation always is
        assert!(NModel::new(frame3(), v, Semantics::Classical).is_ok());
        let m = NModel::new(frame3(), BTreeMap::new(), Semantics::Intuitionistic).unwrap();
        assert_eq!(check_heredity(&m), HeredityReport::Pass);
    }

    #[test]
    fn json_round_trip_preserves_world_order() {
        let text = r#"{
            "semantics": "intuitionistic",
            "worlds": ["w", "v", "z"],
            "min": {"w": ["w", "v"], "v": ["v"], "z": ["z"]},
            "max": {"w": ["w", "v"], "v": ["v", "z"], "z": ["z"]},
            "valuation": {"p": ["w", "v"]}
        }"#;
        let m = NModel::from_json(text).unwrap();
        assert_eq!(m.frame().names(), ["w", "v", "z"]);
        assert_eq!(m.frame().min(0), ws(&[0, 1]));
        assert_eq!(m.frame().max(1), ws(&[1, 2]));
        assert_eq!(m.atom_extension("p"), ws(&[0, 1]));
        assert_eq!(m.atom_extension("q"), WorldSet::EMPTY);

        let round = NModel::from_json(&m.to_json()).unwrap();
        assert_eq!(round, m);

        // serialized form keeps declared world order, not alphabetical
        let out = m.to_json();
        let w_pos = out.find("\"w\": [").unwrap();
        let v_pos = out.find("\"v\": [").unwrap();
        assert!(w_pos < v_pos);
        for key in ["semantics", "worlds", "min", "max", "valuation"] {
            assert!(out.contains(&format!("\"{key}\"")));
        }
    }

    #[test]
    fn json_shape_errors() {
        let missing = r#"{
            "semantics": "intuitionistic",
            "worlds": ["w", "v"],
            "min": {"w": ["w"]},
            "max": {"w": ["w"], "v": ["v"]},
            "valuation": {}
        }"#;
        assert_eq!(
            NModel::from_json(missing),
            Err(ModelError::MissingEntry {
                which: "min",
                world: "v".into()
            })
        );

        let unknown = r#"{
            "semantics": "classical",
            "worlds": ["w"],
            "min": {"w": ["w"]},
            "max": {"w": ["w", "ghost"]},
            "valuation": {}
        }"#;
        assert_eq!(
            NModel::from_json(unknown),
            Err(ModelError::UnknownWorld {
                name: "ghost".into(),
                place: "max(w)".into()
            })
        );

        let bad_semantics = r#"{
            "semantics": "modal",
            "worlds": ["w"],
            "min": {"w": ["w"]},
            "max": {"w": ["w"]},
            "valuation": {}
        }"#;
        assert_eq!(
            NModel::from_json(bad_semantics),
            Err(ModelError::BadSemantics("modal".into()))
        );

        // heredity is rejected on load unless the unchecked path is used
        let broken = r#"{
            "semantics": "intuitionistic",
            "worlds": ["w", "v"],
            "min": {"w": ["w", "v"], "v": ["v"]},
            "max": {"w": ["w", "v"], "v": ["v"]},
            "valuation": {"p": ["w"]}
        }"#;
        assert!(matches!(
            NModel::from_json(broken),
            Err(ModelError::Heredity { .. })
        ));
        assert!(NModel::from_json_unchecked(broken).is_ok());
    }
}
