//! Small fixed models, each named for the property it witnesses. They are
//! shared between the CLI fixtures, the integration tests, and docs; every
//! structural fact claimed in a constructor's comment is asserted in this
//! module's tests.

use std::collections::BTreeMap;

use crate::nmodel::{NFrame, NModel, Semantics};
use crate::world::WorldSet;

fn frame(names: &[&str], min: &[&[usize]], max: &[&[usize]]) -> NFrame {
    NFrame::new(
        names.iter().map(|s| s.to_string()).collect(),
        min.iter().map(|s| s.iter().copied().collect()).collect(),
        max.iter().map(|s| s.iter().copied().collect()).collect(),
    )
    .expect("catalog frames are well-formed")
}

fn model(frame: NFrame, valuation: &[(&str, &[usize])]) -> NModel {
    let valuation: BTreeMap<String, WorldSet> = valuation
        .iter()
        .map(|(a, s)| (a.to_string(), s.iter().copied().collect()))
        .collect();
    NModel::new(frame, valuation, Semantics::Intuitionistic)
        .expect("catalog valuations are hereditary")
}

/// Three worlds w, v, z where max(v) reaches z but max(w) does not, so the
/// Δ-condition fails at (w, v): Δp holds at w only, and truth of Δp is not
/// inherited along min(w) ∋ v.
pub fn delta_monotonicity_counterexample() -> NModel {
    model(
        frame(
            &["w", "v", "z"],
            &[&[0, 1], &[1], &[2]],
            &[&[0, 1], &[1, 2], &[2]],
        ),
        &[("p", &[0, 1])],
    )
}

/// min(w) = {w, u} and max(w) also reaches v, while u and v only see
/// themselves: F1 fails at (w, u, v). Everything an IML1 frame needs holds.
pub fn f1_breaking_frame() -> NFrame {
    frame(
        &["w", "u", "v"],
        &[&[0, 1], &[1], &[2]],
        &[&[0, 1, 2], &[1], &[2]],
    )
}

/// [`f1_breaking_frame`] with V(p) = {v}: ∇p holds at w (v ∈ max(w)) but
/// not at u ∈ min(w), so ∇ is not monotone without F1.
pub fn nabla_monotonicity_counterexample() -> NModel {
    model(f1_breaking_frame(), &[("p", &[2])])
}

/// Worlds w, u, v where max(w) reaches v, min(v) = {v, u}, yet nothing in
/// min(w) = {w} can see u: F2 fails at (w, v, u). The IML1 conditions all
/// hold (and with them the T condition necessarily fails too).
pub fn f2_breaking_frame() -> NFrame {
    frame(
        &["w", "u", "v"],
        &[&[0], &[1], &[1, 2]],
        &[&[0, 2], &[1], &[1, 2]],
    )
}

/// Worlds w, v, u with v ∈ min(w) and v ∈ max(u), but no world's
/// neighborhoods put w in max and u in min simultaneously: PS2 fails at
/// (w, v, u). The IML1 conditions all hold.
pub fn ps2_breaking_frame() -> NFrame {
    frame(
        &["w", "v", "u"],
        &[&[0, 1], &[1], &[2]],
        &[&[0, 1], &[1], &[1, 2]],
    )
}

/// One world whose max covers two incompatible singletons: ◇(p∨q) holds at
/// w while ◇p and ◇q both fail, so ◇ does not distribute over ∨.
pub fn dia_distributivity_counterexample() -> NModel {
    model(
        frame(
            &["w", "u", "v"],
            &[&[0, 1, 2], &[1], &[2]],
            &[&[0, 1, 2], &[1], &[2]],
        ),
        &[("p", &[1]), ("q", &[2])],
    )
}

/// max(w) meets max(u) while min(w) misses min(u): the U condition fails at
/// (w, u), and p ∧ ∇¬p is satisfiable (at w, with V(p) = {w}).
pub fn u_breaking_model() -> NModel {
    model(
        frame(&["w", "u"], &[&[0], &[1]], &[&[0, 1], &[1]]),
        &[("p", &[0])],
    )
}

/// Two models that agree at w on every Δ-free, ⇝-free formula, yet Δp (and
/// !bot ~> p) holds at w only in the first: neither Δ nor ⇝ is definable
/// from the remaining connectives. Both frames satisfy the IML1 conditions
/// plus F1.
pub fn delta_undefinable_pair() -> (NModel, NModel) {
    let m1 = model(
        frame(&["w", "v"], &[&[0], &[1]], &[&[0, 1], &[1]]),
        &[("p", &[0, 1])],
    );
    let m2 = model(
        frame(
            &["w", "v", "u"],
            &[&[0], &[1], &[2, 1]],
            &[&[0, 1, 2], &[1], &[2, 1]],
        ),
        &[("p", &[0, 1])],
    );
    (m1, m2)
}

/// Two models that agree at w on every propositional formula, yet ∇p holds
/// at w only in the second: ∇ is not definable from {∧, ∨, →, ⊥}.
pub fn nabla_undefinable_pair() -> (NModel, NModel) {
    let m1 = model(frame(&["w", "v"], &[&[0], &[1]], &[&[0, 1], &[1]]), &[("p", &[])]);
    let m2 = model(
        frame(
            &["w", "v", "u"],
            &[&[0], &[1, 2], &[2]],
            &[&[0, 1, 2], &[1, 2], &[2]],
        ),
        &[("p", &[2])],
    );
    (m1, m2)
}

/// Both worlds share min = max = {w, v}: the only min-closed open sets are
/// ∅ and the whole universe.
pub fn trivial_opens_frame() -> NFrame {
    frame(&["w", "v"], &[&[0, 1], &[0, 1]], &[&[0, 1], &[0, 1]])
}
