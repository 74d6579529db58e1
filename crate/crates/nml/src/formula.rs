//! Formula ASTs, degree, subformulas, schema instantiation, and bounded
//! enumeration.
//!
//! The variant order of [`Formula`] is load-bearing: the derived `Ord` is the
//! tie-breaker inside each size bucket of [`enumerate_formulas`], and several
//! frozen test expectations (first countermodel, first disagreeing formula)
//! depend on it.

use std::collections::BTreeMap;
use std::fmt;

use crate::parse::pretty;

/// Formula of the object language. `!x` is stored as `Imp(x, Bot)`, `~x` as
/// `MaxImp(x, Bot)`, `top` as `Imp(Bot, Bot)`; there are no other sugared
/// nodes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// Implication evaluated over the minimal neighborhood (intuitionistic)
    /// or material at the world (classical).
    Imp(Box<Formula>, Box<Formula>),
    /// Implication evaluated over the maximal neighborhood. Intuitionistic
    /// only.
    MaxImp(Box<Formula>, Box<Formula>),
    /// Necessity over the maximal neighborhood.
    Delta(Box<Formula>),
    /// Possibility over the maximal neighborhood. Intuitionistic only.
    Nabla(Box<Formula>),
    /// Necessity over the minimal neighborhood. Classical only.
    Box_(Box<Formula>),
    /// Possibility with built-in persistence over the minimal neighborhood.
    /// Intuitionistic only.
    Dia(Box<Formula>),
    /// Possibility through a world that sees the evaluation point
    /// intuitionistically. Intuitionistic only.
    Heart(Box<Formula>),
}

/// Node kinds, used for fragment membership tests.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum NodeKind {
    Atom,
    Bot,
    And,
    Or,
    Imp,
    MaxImp,
    Delta,
    Nabla,
    Box_,
    Dia,
    Heart,
}

pub const ALL_KINDS: [NodeKind; 11] = [
    NodeKind::Atom,
    NodeKind::Bot,
    NodeKind::And,
    NodeKind::Or,
    NodeKind::Imp,
    NodeKind::MaxImp,
    NodeKind::Delta,
    NodeKind::Nabla,
    NodeKind::Box_,
    NodeKind::Dia,
    NodeKind::Heart,
];

impl std::fmt::Display for NodeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NodeKind::Atom => "atom",
            NodeKind::Bot => "bot",
            NodeKind::And => "&",
            NodeKind::Or => "|",
            NodeKind::Imp => "->",
            NodeKind::MaxImp => "~>",
            NodeKind::Delta => "delta",
            NodeKind::Nabla => "nabla",
            NodeKind::Box_ => "box",
            NodeKind::Dia => "dia",
            NodeKind::Heart => "heart",
        })
    }
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn max_imp(l: Formula, r: Formula) -> Formula {
        Formula::MaxImp(Box::new(l), Box::new(r))
    }

    pub fn neg(f: Formula) -> Formula {
        Formula::imp(f, Formula::Bot)
    }

    pub fn max_neg(f: Formula) -> Formula {
        Formula::max_imp(f, Formula::Bot)
    }

    pub fn top() -> Formula {
        Formula::imp(Formula::Bot, Formula::Bot)
    }

    pub fn delta(f: Formula) -> Formula {
        Formula::Delta(Box::new(f))
    }

    pub fn nabla(f: Formula) -> Formula {
        Formula::Nabla(Box::new(f))
    }

    pub fn box_(f: Formula) -> Formula {
        Formula::Box_(Box::new(f))
    }

    pub fn dia(f: Formula) -> Formula {
        Formula::Dia(Box::new(f))
    }

    pub fn heart(f: Formula) -> Formula {
        Formula::Heart(Box::new(f))
    }

    pub fn kind(&self) -> NodeKind {
        match self {
            Formula::Atom(_) => NodeKind::Atom,
            Formula::Bot => NodeKind::Bot,
            Formula::And(..) => NodeKind::And,
            Formula::Or(..) => NodeKind::Or,
            Formula::Imp(..) => NodeKind::Imp,
            Formula::MaxImp(..) => NodeKind::MaxImp,
            Formula::Delta(_) => NodeKind::Delta,
            Formula::Nabla(_) => NodeKind::Nabla,
            Formula::Box_(_) => NodeKind::Box_,
            Formula::Dia(_) => NodeKind::Dia,
            Formula::Heart(_) => NodeKind::Heart,
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Bot => vec![],
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Imp(l, r)
            | Formula::MaxImp(l, r) => vec![l, r],
            Formula::Delta(c)
            | Formula::Nabla(c)
            | Formula::Box_(c)
            | Formula::Dia(c)
            | Formula::Heart(c) => vec![c],
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Modal/implication nesting depth: atoms and ⊥ are 0, ∧/∨ take the max
    /// of their parts, →/⇝ and every unary modal add 1.
    pub fn degree(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bot => 0,
            Formula::And(l, r) | Formula::Or(l, r) => l.degree().max(r.degree()),
            Formula::Imp(l, r) | Formula::MaxImp(l, r) => 1 + l.degree().max(r.degree()),
            Formula::Delta(c)
            | Formula::Nabla(c)
            | Formula::Box_(c)
            | Formula::Dia(c)
            | Formula::Heart(c) => 1 + c.degree(),
        }
    }

    /// All subformulas including `self`, structurally deduplicated, in
    /// post-order (children before parents).
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut Vec<Formula>) {
        for c in self.children() {
            c.collect_subformulas(out);
        }
        if !out.contains(self) {
            out.push(self.clone());
        }
    }

    /// Atom names occurring in the formula, sorted and deduplicated.
    pub fn atoms(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Atom(name) => Some(name),
                _ => None,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// True when every node kind belongs to `fragment`.
    pub fn within(&self, fragment: Fragment) -> bool {
        fragment.contains(self.kind()) && self.children().iter().all(|c| c.within(fragment))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", pretty(self))
    }
}

/// A set of allowed node kinds.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fragment(u16);

impl Fragment {
    pub const EMPTY: Fragment = Fragment(0);

    pub fn of(kinds: &[NodeKind]) -> Fragment {
        let mut f = Fragment(0);
        for &k in kinds {
            f.0 |= 1 << k as u16;
        }
        f
    }

    pub fn contains(self, kind: NodeKind) -> bool {
        self.0 >> kind as u16 & 1 == 1
    }

    pub fn with(self, kind: NodeKind) -> Fragment {
        Fragment(self.0 | 1 << kind as u16)
    }

    pub fn without(self, kind: NodeKind) -> Fragment {
        Fragment(self.0 & !(1 << kind as u16))
    }

    /// Atoms, ⊥, ∧, ∨, →.
    pub fn propositional() -> Fragment {
        Fragment::of(&[
            NodeKind::Atom,
            NodeKind::Bot,
            NodeKind::And,
            NodeKind::Or,
            NodeKind::Imp,
        ])
    }

    /// The intuitionistic Δ language: atoms, ⊥, ∧, ∨, →, Δ. This is both
    /// the translation source language and the filtration fragment.
    pub fn delta_language() -> Fragment {
        Fragment::propositional().with(NodeKind::Delta)
    }

    /// The fragment with a defined degree rule in the bounded-agreement
    /// theorem: atoms, ⊥, ∧, ∨, →, ⇝, Δ.
    pub fn agreement_language() -> Fragment {
        Fragment::delta_language().with(NodeKind::MaxImp)
    }

    /// Everything evaluable in intuitionistic semantics (no □).
    pub fn intuitionistic() -> Fragment {
        Fragment::of(&ALL_KINDS).without(NodeKind::Box_)
    }

    /// Everything evaluable in classical semantics: atoms, ⊥, ∧, ∨, →, □, Δ.
    pub fn classical() -> Fragment {
        Fragment::delta_language().with(NodeKind::Box_)
    }
}

/// Every formula over `vars` inside `fragment` with degree ≤ `max_degree`
/// and node count ≤ `max_size`, each exactly once, in size-major order with
/// the derived `Ord` breaking ties inside each size.
pub fn enumerate_formulas(
    vars: &[&str],
    fragment: Fragment,
    max_degree: usize,
    max_size: usize,
) -> Vec<Formula> {
    assert!(!vars.is_empty(), "enumeration needs at least one variable");
    assert!(max_size >= 1, "enumeration needs max_size >= 1");

    // degree never decreases from child to parent, so pruning by degree
    // inside the buckets loses nothing
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(); max_size + 1];
    if fragment.contains(NodeKind::Atom) {
        for v in vars {
            by_size[1].push(Formula::atom(v));
        }
    }
    if fragment.contains(NodeKind::Bot) {
        by_size[1].push(Formula::Bot);
    }
    by_size[1].retain(|f| f.degree() <= max_degree);
    by_size[1].sort();

    for size in 2..=max_size {
        let mut bucket = Vec::new();
        let binary: [(NodeKind, fn(Formula, Formula) -> Formula); 4] = [
            (NodeKind::And, Formula::and),
            (NodeKind::Or, Formula::or),
            (NodeKind::Imp, Formula::imp),
            (NodeKind::MaxImp, Formula::max_imp),
        ];
        for (kind, build) in binary {
            if !fragment.contains(kind) {
                continue;
            }
            for left_size in 1..size - 1 {
                let right_size = size - 1 - left_size;
                for l in &by_size[left_size] {
                    for r in &by_size[right_size] {
                        let f = build(l.clone(), r.clone());
                        if f.degree() <= max_degree {
                            bucket.push(f);
                        }
                    }
                }
            }
        }
        let unary: [(NodeKind, fn(Formula) -> Formula); 5] = [
            (NodeKind::Delta, Formula::delta),
            (NodeKind::Nabla, Formula::nabla),
            (NodeKind::Box_, Formula::box_),
            (NodeKind::Dia, Formula::dia),
            (NodeKind::Heart, Formula::heart),
        ];
        for (kind, build) in unary {
            if !fragment.contains(kind) {
                continue;
            }
            for c in &by_size[size - 1] {
                let f = build(c.clone());
                if f.degree() <= max_degree {
                    bucket.push(f);
                }
            }
        }
        bucket.sort();
        by_size[size] = bucket;
    }

    by_size.into_iter().flatten().collect()
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("schema metavariable `{0}` has no binding")]
pub struct MissingMetavariable(pub String);

/// Replace every atom of `schema` by its image under `subst`. Atoms are the
/// metavariables; there are no binders, so substitution is plain.
pub fn instantiate_schema(
    schema: &Formula,
    subst: &BTreeMap<String, Formula>,
) -> Result<Formula, MissingMetavariable> {
    Ok(match schema {
        Formula::Atom(name) => subst
            .get(name)
            .cloned()
            .ok_or_else(|| MissingMetavariable(name.clone()))?,
        Formula::Bot => Formula::Bot,
        Formula::And(l, r) => Formula::and(
            instantiate_schema(l, subst)?,
            instantiate_schema(r, subst)?,
        ),
        Formula::Or(l, r) => Formula::or(
            instantiate_schema(l, subst)?,
            instantiate_schema(r, subst)?,
        ),
        Formula::Imp(l, r) => Formula::imp(
            instantiate_schema(l, subst)?,
            instantiate_schema(r, subst)?,
        ),
        Formula::MaxImp(l, r) => Formula::max_imp(
            instantiate_schema(l, subst)?,
            instantiate_schema(r, subst)?,
        ),
        Formula::Delta(c) => Formula::delta(instantiate_schema(c, subst)?),
        Formula::Nabla(c) => Formula::nabla(instantiate_schema(c, subst)?),
        Formula::Box_(c) => Formula::box_(instantiate_schema(c, subst)?),
        Formula::Dia(c) => Formula::dia(instantiate_schema(c, subst)?),
        Formula::Heart(c) => Formula::heart(instantiate_schema(c, subst)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn degree_of_paper_examples() {
        assert_eq!(p().degree(), 0);
        assert_eq!(Formula::delta(p()).degree(), 1);
        assert_eq!(Formula::imp(p(), Formula::delta(q())).degree(), 2);
        assert_eq!(Formula::and(p(), q()).degree(), 0);
        assert_eq!(Formula::neg(p()).degree(), 1);
        assert_eq!(Formula::Bot.degree(), 0);
        // unary modals all add one, like delta
        assert_eq!(Formula::nabla(Formula::delta(p())).degree(), 2);
        assert_eq!(Formula::dia(p()).degree(), 1);
        assert_eq!(Formula::heart(p()).degree(), 1);
        assert_eq!(Formula::box_(p()).degree(), 1);
    }

    #[test]
    fn degree_is_bounded_by_size() {
        for f in enumerate_formulas(&["p"], Fragment::agreement_language(), 99, 5) {
            assert!(f.degree() <= f.size());
        }
    }

    #[test]
    fn subformulas_are_postorder_and_deduplicated() {
        let f = Formula::delta(p());
        assert_eq!(f.subformulas(), vec![p(), f.clone()]);

        let g = Formula::imp(p(), q());
        assert_eq!(g.subformulas(), vec![p(), q(), g.clone()]);

        assert_eq!(p().subformulas(), vec![p()]);

        // shared subterm appears once
        let h = Formula::and(p(), p());
        assert_eq!(h.subformulas(), vec![p(), h.clone()]);
    }

    #[test]
    fn subformulas_of_node_are_contained_in_parent() {
        let f = Formula::imp(Formula::delta(p()), Formula::and(p(), q()));
        let subs = f.subformulas();
        for g in &subs {
            for s in g.subformulas() {
                assert!(subs.contains(&s));
            }
        }
    }

    #[test]
    fn enumerate_atoms_and_bot_only() {
        let out = enumerate_formulas(
            &["p"],
            Fragment::of(&[NodeKind::Atom, NodeKind::Bot]),
            0,
            1,
        );
        assert_eq!(out, vec![p(), Formula::Bot]);
    }

    #[test]
    fn enumerate_respects_fragment() {
        let out = enumerate_formulas(&["p"], Fragment::of(&[NodeKind::Atom, NodeKind::Delta]), 1, 2);
        assert_eq!(out, vec![p(), Formula::delta(p())]);
    }

    #[test]
    fn enumerate_degree_zero_conjunctions() {
        let out = enumerate_formulas(&["p"], Fragment::of(&[NodeKind::Atom, NodeKind::And]), 0, 3);
        assert_eq!(out, vec![p(), Formula::and(p(), p())]);
        assert!(out.iter().all(|f| f.degree() == 0));
    }

    #[test]
    fn enumerate_has_no_duplicates_and_respects_bounds() {
        // cross-checked against a naive filter over the unrestricted stream
        let frag = Fragment::agreement_language();
        let out = enumerate_formulas(&["p", "q"], frag, 2, 4);
        let mut seen = std::collections::HashSet::new();
        for f in &out {
            assert!(f.size() <= 4 && f.degree() <= 2 && f.within(frag));
            assert!(seen.insert(f.clone()), "duplicate {f:?}");
        }
        let naive: Vec<Formula> = enumerate_formulas(&["p", "q"], frag, 99, 4)
            .into_iter()
            .filter(|f| f.degree() <= 2)
            .collect();
        assert_eq!(out, naive);
    }

    #[test]
    fn enumeration_is_size_major_then_lexicographic() {
        let out = enumerate_formulas(&["p", "q"], Fragment::delta_language(), 99, 3);
        for pair in out.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            assert!(a.size() < b.size() || (a.size() == b.size() && a < b));
        }
    }

    #[test]
    fn instantiate_axiom_schemata() {
        let phi = Formula::atom("phi");
        let psi = Formula::atom("psi");
        let k = Formula::imp(
            Formula::delta(Formula::imp(phi.clone(), psi.clone())),
            Formula::imp(
                Formula::delta(phi.clone()),
                Formula::delta(psi.clone()),
            ),
        );
        let mut subst = BTreeMap::new();
        subst.insert("phi".to_string(), p());
        subst.insert("psi".to_string(), q());
        let inst = instantiate_schema(&k, &subst).unwrap();
        assert_eq!(
            inst,
            Formula::imp(
                Formula::delta(Formula::imp(p(), q())),
                Formula::imp(Formula::delta(p()), Formula::delta(q())),
            )
        );

        let t = Formula::imp(Formula::delta(phi.clone()), phi.clone());
        let mut only_phi = BTreeMap::new();
        only_phi.insert("phi".to_string(), p());
        assert_eq!(
            instantiate_schema(&t, &only_phi).unwrap(),
            Formula::imp(Formula::delta(p()), p())
        );

        assert_eq!(
            instantiate_schema(&phi, &only_phi).unwrap(),
            p(),
            "identity schema"
        );

        assert_eq!(
            instantiate_schema(&psi, &only_phi),
            Err(MissingMetavariable("psi".to_string()))
        );
    }
}
