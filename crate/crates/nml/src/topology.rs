//! Per-world open-set families read off the neighborhood structure.

use crate::nmodel::NFrame;
use crate::world::WorldSet;

/// Which defining clause produces the family of w-open sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// X ⊆ max(w) and every member's minimal neighborhood stays inside:
    /// v ∈ X implies min(v) ⊆ X.
    MinClosed,
    /// X = ∅, or min(w) ⊆ X ⊆ max(w). Anchoring at the center world makes
    /// the family a topology on any frame, with no extra frame condition.
    MinAnchored,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::MinClosed => "min-closed",
            Variant::MinAnchored => "min-anchored",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown variant `{0}`; expected `min-closed` or `min-anchored`")]
pub struct UnknownVariant(pub String);

impl std::str::FromStr for Variant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, UnknownVariant> {
        match s {
            "min-closed" => Ok(Variant::MinClosed),
            "min-anchored" => Ok(Variant::MinAnchored),
            other => Err(UnknownVariant(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("max({world}) has {size} worlds; open-set enumeration is capped at 16")]
    UniverseTooLarge { world: String, size: usize },
}

/// The w-open sets of one world. `universe` is max(w); members are listed
/// in subset-binary order over the universe, so ∅ comes first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenFamily {
    pub world: String,
    pub universe: WorldSet,
    pub opens: Vec<WorldSet>,
    pub variant: Variant,
}

/// Enumerate the subsets of max(`world`) kept by `variant`'s clause.
pub fn open_sets(
    frame: &NFrame,
    world: &str,
    variant: Variant,
) -> Result<OpenFamily, TopologyError> {
    let w = frame
        .index(world)
        .ok_or_else(|| TopologyError::UnknownWorld(world.to_string()))?;
    let universe = frame.max(w);
    let members: Vec<usize> = universe.iter().collect();
    if members.len() > 16 {
        return Err(TopologyError::UniverseTooLarge {
            world: world.to_string(),
            size: members.len(),
        });
    }
    let mut opens = Vec::new();
    for mask in 0u32..1u32 << members.len() {
        let x: WorldSet = members
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let keep = match variant {
            Variant::MinClosed => x.iter().all(|v| frame.min(v).is_subset(x)),
            Variant::MinAnchored => x.is_empty() || frame.min(w).is_subset(x),
        };
        if keep {
            opens.push(x);
        }
    }
    Ok(OpenFamily {
        world: world.to_string(),
        universe,
        opens,
        variant,
    })
}

/// One closure/membership check over an [`OpenFamily`]. A failure carries
/// the sets that produced the missing combination (empty for the membership
/// and whole-family checks) and the set that should have been a member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    Fail {
        sets: Vec<WorldSet>,
        missing: WorldSet,
    },
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CheckOutcome::Pass)
    }
}

/// Verdicts for the topology axioms on a finite family, plus the
/// whole-family intersection check that marks an Alexandroff space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopologyReport {
    pub empty_member: CheckOutcome,
    pub universe_member: CheckOutcome,
    pub pairwise_union: CheckOutcome,
    pub pairwise_intersection: CheckOutcome,
    pub family_union: CheckOutcome,
    pub family_intersection: CheckOutcome,
}

impl TopologyReport {
    /// The four topology axioms; on a finite family pairwise closure
    /// already implies closure under arbitrary unions and intersections.
    pub fn is_topology(&self) -> bool {
        self.empty_member.passed()
            && self.universe_member.passed()
            && self.pairwise_union.passed()
            && self.pairwise_intersection.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.is_topology()
            && self.family_union.passed()
            && self.family_intersection.passed()
    }
}

/// Check every topology axiom on `fam`, reporting the first witness per
/// failed check. Quadratic in the family size.
pub fn verify_topology(fam: &OpenFamily) -> TopologyReport {
    let member = |x: WorldSet| fam.opens.contains(&x);
    let membership = |x: WorldSet| {
        if member(x) {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail {
                sets: Vec::new(),
                missing: x,
            }
        }
    };

    let pairwise = |op: fn(WorldSet, WorldSet) -> WorldSet| {
        for (i, &a) in fam.opens.iter().enumerate() {
            for &b in &fam.opens[i..] {
                let combined = op(a, b);
                if !member(combined) {
                    return CheckOutcome::Fail {
                        sets: vec![a, b],
                        missing: combined,
                    };
                }
            }
        }
        CheckOutcome::Pass
    };
    let pairwise_union = pairwise(WorldSet::union);
    let pairwise_intersection = pairwise(WorldSet::intersection);

    let family_union = membership(
        fam.opens
            .iter()
            .fold(WorldSet::EMPTY, |acc, &x| acc.union(x)),
    );
    let family_intersection = membership(
        fam.opens
            .iter()
            .fold(fam.universe, |acc, &x| acc.intersection(x)),
    );

    TopologyReport {
        empty_member: membership(WorldSet::EMPTY),
        universe_member: membership(fam.universe),
        pairwise_union,
        pairwise_intersection,
        family_union,
        family_intersection,
    }
}
