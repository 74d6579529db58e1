//! The box translation between the intuitionistic and classical readings.
//!
//! `star` rewrites a {atom, ⊥, ∧, ∨, →, Δ} formula for classical
//! evaluation: atoms and implications grow a □, while anything under a Δ
//! is kept verbatim. That last clause is deliberate and is preserved here
//! even though it costs per-world equivalence on some models; see
//! `verify_translation`.

use std::collections::BTreeMap;

use crate::conditions::Condition;
use crate::eval::extension;
use crate::formula::{Formula, Fragment, NodeKind};
use crate::nmodel::{NFrame, NModel, Semantics};
use crate::world::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("`{0}` has no star translation")]
    Untranslatable(NodeKind),
    #[error("expected a {expected} model")]
    WrongSemantics { expected: Semantics },
    #[error("frame fails {} at ({})", condition.name(), witness.join(", "))]
    Condition {
        condition: Condition,
        witness: Vec<String>,
    },
}

/// Rewrite `f` for classical evaluation: p ↦ □p, γ→δ ↦ □(γ*→δ*), ∧/∨/⊥
/// recurse structurally, and Δγ is returned as-is with γ untranslated.
/// `f` must stay within {atom, ⊥, ∧, ∨, →, Δ}, including under Δ.
pub fn star(f: &Formula) -> Result<Formula, TranslateError> {
    for node in f.subformulas() {
        if !Fragment::delta_language().contains(node.kind()) {
            return Err(TranslateError::Untranslatable(node.kind()));
        }
    }
    Ok(star_checked(f))
}

fn star_checked(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) => Formula::box_(f.clone()),
        Formula::Bot => Formula::Bot,
        Formula::And(l, r) => Formula::and(star_checked(l), star_checked(r)),
        Formula::Or(l, r) => Formula::or(star_checked(l), star_checked(r)),
        Formula::Imp(l, r) => {
            Formula::box_(Formula::imp(star_checked(l), star_checked(r)))
        }
        Formula::Delta(_) => f.clone(),
        _ => unreachable!("star caller checked the fragment"),
    }
}

fn require_conditions(
    frame: &NFrame,
    conds: &[Condition],
) -> Result<(), TranslateError> {
    for &condition in conds {
        if let Some(witness) = condition.first_witness(frame) {
            return Err(TranslateError::Condition {
                condition,
                witness: witness.iter().map(|&w| frame.name(w).to_string()).collect(),
            });
        }
    }
    Ok(())
}

/// Intuitionistic counterpart of a classical model: same frame, and
/// V̄(q) = {v : min(v) ⊆ V(q)}, which is the extension of □q. The frame
/// must satisfy the base, Δ- and arrow conditions; the arrow condition is
/// what makes V̄ hereditary.
pub fn to_intuitionistic(m: &NModel) -> Result<NModel, TranslateError> {
    if m.semantics() != Semantics::Classical {
        return Err(TranslateError::WrongSemantics {
            expected: Semantics::Classical,
        });
    }
    let frame = m.frame();
    require_conditions(frame, &[Condition::Base, Condition::Delta, Condition::Arrow])?;
    let n = frame.n();
    let mut valuation = BTreeMap::new();
    for (atom, ext) in m.valuation() {
        let mut bar = WorldSet::EMPTY;
        for v in 0..n {
            if frame.min(v).is_subset(ext) {
                bar.insert(v);
            }
        }
        valuation.insert(atom.to_string(), bar);
    }
    Ok(NModel::new(frame.clone(), valuation, Semantics::Intuitionistic)
        .expect("min-preimages are hereditary once the arrow condition holds"))
}

/// Classical counterpart of an intuitionistic model: identical worlds,
/// neighborhoods and valuation, reinterpreted classically.
pub fn to_classical(m: &NModel) -> Result<NModel, TranslateError> {
    if m.semantics() != Semantics::Intuitionistic {
        return Err(TranslateError::WrongSemantics {
            expected: Semantics::Intuitionistic,
        });
    }
    require_conditions(
        m.frame(),
        &[Condition::Base, Condition::Arrow, Condition::Delta],
    )?;
    let valuation = m
        .valuation()
        .map(|(a, s)| (a.to_string(), s))
        .collect();
    Ok(
        NModel::new_unchecked(m.frame().clone(), valuation, Semantics::Classical)
            .expect("the valuation already fits the frame"),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranslationVerdict {
    Pass,
    Fail { world: String },
}

/// Check per-world equivalence between `f` on the intuitionistic side and
/// `star(f)` on the classical side, pairing `m` with its counterpart from
/// [`to_intuitionistic`] or [`to_classical`] according to `m`'s semantics.
/// Reports the first world (declared order) where the two sides disagree;
/// the kept-verbatim Δ clause of `star` makes such worlds possible.
pub fn verify_translation(
    m: &NModel,
    f: &Formula,
) -> Result<TranslationVerdict, TranslateError> {
    let starred = star(f)?;
    let (intuit, classical) = match m.semantics() {
        Semantics::Classical => (to_intuitionistic(m)?, m.clone()),
        Semantics::Intuitionistic => (m.clone(), to_classical(m)?),
    };
    let lhs = extension(&intuit, f).expect("the delta fragment evaluates intuitionistically");
    let rhs = extension(&classical, &starred).expect("starred formulas evaluate classically");
    let n = m.frame().n();
    let disagree = lhs
        .intersection(rhs.complement(n))
        .union(rhs.intersection(lhs.complement(n)));
    Ok(match disagree.first() {
        None => TranslationVerdict::Pass,
        Some(w) => TranslationVerdict::Fail {
            world: m.frame().name(w).to_string(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmodel::{check_heredity, HeredityReport};
    use crate::parse::parse;
    use crate::search::{enumerate_frames, enumerate_models, find_logic};

    fn model(
        names: &[&str],
        min: &[&[usize]],
        max: &[&[usize]],
        valuation: &[(&str, &[usize])],
        semantics: Semantics,
    ) -> NModel {
        let frame = NFrame::new(
            names.iter().map(|s| s.to_string()).collect(),
            min.iter().map(|s| s.iter().copied().collect()).collect(),
            max.iter().map(|s| s.iter().copied().collect()).collect(),
        )
        .unwrap();
        let valuation = valuation
            .iter()
            .map(|(a, s)| (a.to_string(), s.iter().copied().collect()))
            .collect();
        NModel::new_unchecked(frame, valuation, semantics).unwrap()
    }

    #[test]
    fn star_rewrites_atoms_and_implications_only() {
        let cases = [
            ("p", "box p"),
            ("bot", "bot"),
            ("p -> q", "box (box p -> box q)"),
            ("p & q", "box p & box q"),
            ("p | bot", "box p | bot"),
            ("delta (p -> q)", "delta (p -> q)"),
            ("delta p -> delta p", "box (delta p -> delta p)"),
            ("p -> q -> p", "box (box p -> box (box q -> box p))"),
        ];
        for (input, expected) in cases {
            let got = star(&parse(input).unwrap()).unwrap();
            assert_eq!(got, parse(expected).unwrap(), "star({input})");
        }
    }

    #[test]
    fn star_rejects_modalities_outside_the_delta_fragment() {
        for (input, kind) in [
            ("nabla p", NodeKind::Nabla),
            ("box p", NodeKind::Box_),
            ("p ~> q", NodeKind::MaxImp),
            ("dia p", NodeKind::Dia),
            ("heart p", NodeKind::Heart),
            ("delta (nabla p)", NodeKind::Nabla),
        ] {
            assert_eq!(
                star(&parse(input).unwrap()).unwrap_err(),
                TranslateError::Untranslatable(kind),
                "star({input})"
            );
        }
    }

    #[test]
    fn counterpart_valuation_is_the_box_extension() {
        // min(w0) = {w0, w1} keeps w0 out of V̄(p) when V(p) = {w1}.
        let m = model(
            &["w0", "w1"],
            &[&[0, 1], &[1]],
            &[&[0, 1], &[1]],
            &[("p", &[1]), ("q", &[0, 1])],
            Semantics::Classical,
        );
        let bar = to_intuitionistic(&m).unwrap();
        assert_eq!(bar.semantics(), Semantics::Intuitionistic);
        assert_eq!(bar.atom_extension("p"), WorldSet::singleton(1));
        assert_eq!(bar.atom_extension("q"), WorldSet::from_iter([0, 1]));
        for atom in ["p", "q"] {
            let boxed = Formula::box_(Formula::atom(atom));
            assert_eq!(bar.atom_extension(atom), extension(&m, &boxed).unwrap());
        }
    }

    #[test]
    fn counterparts_require_the_frame_conditions() {
        let m = model(
            &["w0", "w1"],
            &[&[0, 1], &[1]],
            &[&[0, 1], &[1]],
            &[],
            Semantics::Classical,
        );
        assert!(to_intuitionistic(&m).is_ok());

        // max(w1) leaks outside max(w0) while w1 sits in min(w0).
        let bad = model(
            &["w0", "w1", "w2"],
            &[&[0, 1], &[1], &[2]],
            &[&[0, 1], &[1, 2], &[2]],
            &[],
            Semantics::Classical,
        );
        assert_eq!(
            to_intuitionistic(&bad).unwrap_err(),
            TranslateError::Condition {
                condition: Condition::Delta,
                witness: vec!["w0".into(), "w1".into()],
            }
        );

        assert_eq!(
            to_classical(&m).unwrap_err(),
            TranslateError::WrongSemantics {
                expected: Semantics::Intuitionistic
            }
        );
        assert_eq!(
            to_intuitionistic(&to_intuitionistic(&m).unwrap()).unwrap_err(),
            TranslateError::WrongSemantics {
                expected: Semantics::Classical
            }
        );
    }

    #[test]
    fn counterparts_are_hereditary_and_round_trip_the_frame() {
        let logic = find_logic("CL2.4").unwrap();
        let vars = vec!["p".to_string()];
        for n in 1..=2 {
            for frame in enumerate_frames(n, &logic.conditions).unwrap() {
                for m in enumerate_models(&frame, &vars, Semantics::Classical) {
                    let bar = to_intuitionistic(&m).unwrap();
                    assert_eq!(check_heredity(&bar), HeredityReport::Pass);
                    let back = to_classical(&bar).unwrap();
                    assert_eq!(back.frame(), m.frame());
                    // The round trip lands on the box extension, not V.
                    assert_eq!(
                        back.atom_extension("p"),
                        extension(&m, &parse("box p").unwrap()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn per_world_equivalence_holds_for_recursively_starred_formulas() {
        let logic = find_logic("CL2.4").unwrap();
        let vars = vec!["p".to_string(), "q".to_string()];
        let corpus: Vec<Formula> = ["p", "p -> q", "p & q", "p | q", "!p", "bot"]
            .iter()
            .map(|s| parse(s).unwrap())
            .collect();
        for n in 1..=2 {
            for frame in enumerate_frames(n, &logic.conditions).unwrap() {
                for m in enumerate_models(&frame, &vars, Semantics::Classical) {
                    for f in &corpus {
                        assert_eq!(
                            verify_translation(&m, f).unwrap(),
                            TranslationVerdict::Pass,
                            "{f:?} on {m:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn the_verbatim_delta_clause_breaks_equivalence() {
        // V̄(q) = ∅ makes q→⊥ true everywhere intuitionistically, so
        // Δ(q→⊥) holds at w1; classically q holds at w1 ∈ max(w1).
        let m = model(
            &["w", "v"],
            &[&[0], &[0, 1]],
            &[&[0], &[0, 1]],
            &[("p", &[]), ("q", &[1])],
            Semantics::Classical,
        );
        assert_eq!(
            verify_translation(&m, &parse("delta (q -> bot)").unwrap()).unwrap(),
            TranslationVerdict::Fail { world: "v".into() }
        );
        // The same model is fine on fully-starred shapes.
        assert_eq!(
            verify_translation(&m, &parse("q -> bot").unwrap()).unwrap(),
            TranslationVerdict::Pass
        );
    }

    #[test]
    fn even_delta_p_fails_on_a_three_world_model() {
        let m = model(
            &["a", "b", "c"],
            &[&[0], &[1, 2], &[2]],
            &[&[0, 1], &[1, 2], &[2]],
            &[("p", &[0, 1])],
            Semantics::Classical,
        );
        assert_eq!(
            verify_translation(&m, &parse("delta p").unwrap()).unwrap(),
            TranslationVerdict::Fail { world: "a".into() }
        );
    }

    #[test]
    fn intuitionistic_models_verify_through_their_classical_counterpart() {
        let m = model(
            &["w0", "w1"],
            &[&[0, 1], &[1]],
            &[&[0, 1], &[1]],
            &[("p", &[1])],
            Semantics::Intuitionistic,
        );
        assert_eq!(
            verify_translation(&m, &parse("p -> p").unwrap()).unwrap(),
            TranslationVerdict::Pass
        );
        assert!(matches!(
            verify_translation(&m, &parse("nabla p").unwrap()),
            Err(TranslateError::Untranslatable(NodeKind::Nabla))
        ));
    }
}
