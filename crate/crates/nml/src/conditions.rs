//! Frame conditions with witness-producing checkers.

use crate::nmodel::NFrame;
use crate::world::subsets;

/// Conditions on (min, max) neighborhood pairs. `Base` is the pair of frame
/// invariants themselves (kept so every name the CLI accepts has a checker);
/// the rest carve out the frame classes the logic registry is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Base,
    Arrow,
    Delta,
    T,
    F1,
    F2,
    Ps1,
    Ps2,
    U,
    Max4,
}

pub const ALL_CONDITIONS: [Condition; 10] = [
    Condition::Base,
    Condition::Arrow,
    Condition::Delta,
    Condition::T,
    Condition::F1,
    Condition::F2,
    Condition::Ps1,
    Condition::Ps2,
    Condition::U,
    Condition::Max4,
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown condition name `{0}`; known: base arrow delta t f1 f2 ps1 ps2 u max4")]
pub struct UnknownCondition(pub String);

impl std::str::FromStr for Condition {
    type Err = UnknownCondition;

    fn from_str(s: &str) -> Result<Self, UnknownCondition> {
        match s {
            "base" => Ok(Condition::Base),
            "arrow" => Ok(Condition::Arrow),
            "delta" => Ok(Condition::Delta),
            "t" => Ok(Condition::T),
            "f1" => Ok(Condition::F1),
            "f2" => Ok(Condition::F2),
            "ps1" => Ok(Condition::Ps1),
            "ps2" => Ok(Condition::Ps2),
            "u" => Ok(Condition::U),
            "max4" => Ok(Condition::Max4),
            other => Err(UnknownCondition(other.to_string())),
        }
    }
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Base => "base",
            Condition::Arrow => "arrow",
            Condition::Delta => "delta",
            Condition::T => "t",
            Condition::F1 => "f1",
            Condition::F2 => "f2",
            Condition::Ps1 => "ps1",
            Condition::Ps2 => "ps2",
            Condition::U => "u",
            Condition::Max4 => "max4",
        }
    }

    /// First violating witness in declared world order, scanning the
    /// quantifier prefix outermost-first; `None` when the condition holds.
    ///
    /// Witness arities: base 1; arrow/delta/t/u/max4 2; f1/f2/ps1/ps2 3.
    pub fn first_witness(self, f: &NFrame) -> Option<Vec<usize>> {
        let n = f.n();
        match self {
            // w ∈ min(w) and min(w) ⊆ max(w); true by NFrame construction
            Condition::Base => (0..n)
                .find(|&w| !f.min(w).contains(w) || !f.min(w).is_subset(f.max(w)))
                .map(|w| vec![w]),
            // ∀w ∀u ∈ min(w): min(u) ⊆ min(w)
            Condition::Arrow => {
                for w in 0..n {
                    for u in f.min(w).iter() {
                        if !f.min(u).is_subset(f.min(w)) {
                            return Some(vec![w, u]);
                        }
                    }
                }
                None
            }
            // ∀w ∀u ∈ min(w): max(u) ⊆ max(w)
            Condition::Delta => {
                for w in 0..n {
                    for u in f.min(w).iter() {
                        if !f.max(u).is_subset(f.max(w)) {
                            return Some(vec![w, u]);
                        }
                    }
                }
                None
            }
            // ∀w ∀v ∈ max(w): min(v) ⊆ max(w)
            Condition::T => {
                for w in 0..n {
                    for v in f.max(w).iter() {
                        if !f.min(v).is_subset(f.max(w)) {
                            return Some(vec![w, v]);
                        }
                    }
                }
                None
            }
            // ∀w ∀u ∈ min(w) ∀v ∈ max(w) ∃z: z ∈ max(u) ∧ z ∈ min(v)
            Condition::F1 => {
                for w in 0..n {
                    for u in f.min(w).iter() {
                        for v in f.max(w).iter() {
                            if !f.max(u).intersects(f.min(v)) {
                                return Some(vec![w, u, v]);
                            }
                        }
                    }
                }
                None
            }
            // ∀w ∀v ∈ max(w) ∀u ∈ min(v) ∃z ∈ min(w): u ∈ max(z)
            Condition::F2 => {
                for w in 0..n {
                    for v in f.max(w).iter() {
                        for u in f.min(v).iter() {
                            if !f.min(w).iter().any(|z| f.max(z).contains(u)) {
                                return Some(vec![w, v, u]);
                            }
                        }
                    }
                }
                None
            }
            // ∀w ∀v ∈ min(w) ∀u ∈ max(v) ∃z ∈ max(w): u ∈ min(z)
            Condition::Ps1 => {
                for w in 0..n {
                    for v in f.min(w).iter() {
                        for u in f.max(v).iter() {
                            if !f.max(w).iter().any(|z| f.min(z).contains(u)) {
                                return Some(vec![w, v, u]);
                            }
                        }
                    }
                }
                None
            }
            // ∀w ∀v ∈ min(w) ∀u with v ∈ max(u) ∃z: w ∈ max(z) ∧ u ∈ min(z)
            Condition::Ps2 => {
                for w in 0..n {
                    for v in f.min(w).iter() {
                        for u in (0..n).filter(|&u| f.max(u).contains(v)) {
                            if !(0..n).any(|z| f.max(z).contains(w) && f.min(z).contains(u)) {
                                return Some(vec![w, v, u]);
                            }
                        }
                    }
                }
                None
            }
            // ∀w ∀v: max(w) ∩ max(v) ≠ ∅ ⇒ min(w) ∩ min(v) ≠ ∅
            Condition::U => {
                for w in 0..n {
                    for v in 0..n {
                        if f.max(w).intersects(f.max(v)) && !f.min(w).intersects(f.min(v)) {
                            return Some(vec![w, v]);
                        }
                    }
                }
                None
            }
            // ∀w ∀v ∈ max(w): max(v) ⊆ max(w)
            Condition::Max4 => {
                for w in 0..n {
                    for v in f.max(w).iter() {
                        if !f.max(v).is_subset(f.max(w)) {
                            return Some(vec![w, v]);
                        }
                    }
                }
                None
            }
        }
    }

    pub fn holds(self, f: &NFrame) -> bool {
        self.first_witness(f).is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// World names bound by the condition's quantifier prefix, outermost
    /// first, at the first point of failure.
    Fail(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    /// One entry per requested condition, in request order.
    pub results: Vec<(Condition, Verdict)>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|(_, v)| *v == Verdict::Pass)
    }
}

pub fn check_conditions(frame: &NFrame, conds: &[Condition]) -> ConditionReport {
    let results = conds
        .iter()
        .map(|&c| {
            let verdict = match c.first_witness(frame) {
                None => Verdict::Pass,
                Some(ws) => Verdict::Fail(
                    ws.into_iter().map(|w| frame.name(w).to_string()).collect(),
                ),
            };
            (c, verdict)
        })
        .collect();
    ConditionReport { results }
}

/// Does the element-wise condition agree with its quantified-subset
/// formulation on this frame? Supported for `Arrow`, `Delta` and `T`; the
/// subset side quantifies over the literal powerset, so frames are capped at
/// 16 worlds.
pub fn check_formulation_equivalence(frame: &NFrame, which: Condition) -> bool {
    assert!(
        frame.n() <= 16,
        "powerset quantification is capped at 16 worlds"
    );
    let n = frame.n();
    let elementwise = which.holds(frame);
    let subsetwise = match which {
        // ∀w ∀X: min(w) ⊆ X ⇒ min(w) ⊆ {v : min(v) ⊆ X}
        Condition::Arrow => (0..n).all(|w| {
            subsets(n)
                .filter(|&x| frame.min(w).is_subset(x))
                .all(|x| frame.min(w).iter().all(|v| frame.min(v).is_subset(x)))
        }),
        // ∀w ∀X: max(w) ⊆ X ⇒ min(w) ⊆ {v : max(v) ⊆ X}
        Condition::Delta => (0..n).all(|w| {
            subsets(n)
                .filter(|&x| frame.max(w).is_subset(x))
                .all(|x| frame.min(w).iter().all(|v| frame.max(v).is_subset(x)))
        }),
        // ∀w ∀X: max(w) ⊆ X ⇒ max(w) ⊆ {v : min(v) ⊆ X}
        Condition::T => (0..n).all(|w| {
            subsets(n)
                .filter(|&x| frame.max(w).is_subset(x))
                .all(|x| frame.max(w).iter().all(|v| frame.min(v).is_subset(x)))
        }),
        other => panic!("no subset formulation for condition `{}`", other.name()),
    };
    elementwise == subsetwise
}
