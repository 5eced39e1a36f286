//! Reflexive Kripke frames, their complex algebras, subjunctive implication
//! `p → q := □(¬p ∨ q)`, and local satisfiability by bounded frame search.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{modal_signature, subset_label, AlgebraError, FiniteAlgebra, OpTable, Valuation};
use crate::syntax::Formula;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModalError {
    #[error("frame has {0} worlds; between 1 and {MAX_FRAME_WORLDS} are supported")]
    WorldCount(usize),
    #[error("relation pair ({0}, {1}) mentions a world outside the frame")]
    PairOutOfRange(usize, usize),
    #[error("frame is not reflexive: world {0} does not see itself")]
    NotReflexive(usize),
    #[error("complex algebra violates `{0}`")]
    Identity(&'static str),
    #[error("search bound {0} is outside 1..={MAX_SEARCH_WORLDS}")]
    SearchBound(usize),
    #[error("malformed frame: {0}")]
    Malformed(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub const MAX_FRAME_WORLDS: usize = 8;
pub const MAX_SEARCH_WORLDS: usize = 4;

/// Worlds `0..worlds` with an accessibility relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KripkeFrame {
    worlds: usize,
    /// Sorted, without duplicates.
    relation: Vec<(usize, usize)>,
}

impl KripkeFrame {
    pub fn new(worlds: usize, relation: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ModalError> {
        if worlds == 0 || worlds > MAX_FRAME_WORLDS {
            return Err(ModalError::WorldCount(worlds));
        }
        let set: BTreeSet<(usize, usize)> = relation.into_iter().collect();
        if let Some(&(a, b)) = set.iter().find(|(a, b)| *a >= worlds || *b >= worlds) {
            return Err(ModalError::PairOutOfRange(a, b));
        }
        Ok(Self {
            worlds,
            relation: set.into_iter().collect(),
        })
    }

    /// Reflexive closure of `extra`.
    pub fn reflexive(worlds: usize, extra: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ModalError> {
        let loops: Vec<_> = (0..worlds).map(|w| (w, w)).collect();
        Self::new(worlds, loops.into_iter().chain(extra))
    }

    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn relation(&self) -> &[(usize, usize)] {
        &self.relation
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.worlds).all(|w| self.relation.binary_search(&(w, w)).is_ok())
    }

    /// Successors of `w`, as a bitmask.
    pub fn successors(&self, w: usize) -> u32 {
        self.relation
            .iter()
            .filter(|(a, _)| *a == w)
            .fold(0, |acc, (_, b)| acc | 1 << b)
    }

    /// Reads `{"worlds": n, "relation": [[a, b], ...]}`.
    pub fn from_json_value(value: &Value) -> Result<Self, ModalError> {
        let worlds = value
            .get("worlds")
            .and_then(Value::as_u64)
            .ok_or_else(|| ModalError::Malformed("`worlds` must be a number".into()))? as usize;
        let pairs = value
            .get("relation")
            .and_then(Value::as_array)
            .ok_or_else(|| ModalError::Malformed("`relation` must be a list".into()))?
            .iter()
            .map(|p| match p.as_array().map(Vec::as_slice) {
                Some([a, b]) => a
                    .as_u64()
                    .zip(b.as_u64())
                    .map(|(a, b)| (a as usize, b as usize))
                    .ok_or_else(|| ModalError::Malformed("relation pairs must be numbers".into())),
                _ => Err(ModalError::Malformed("relation entries must be pairs".into())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(worlds, pairs)
    }

    pub fn from_json(text: &str) -> Result<Self, ModalError> {
        let value: Value = serde_json::from_str(text).map_err(|e| ModalError::Malformed(e.to_string()))?;
        Self::from_json_value(&value)
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::json!({
            "worlds": self.worlds,
            "relation": self.relation.iter().map(|(a, b)| [a, b]).collect::<Vec<_>>(),
        })
    }
}

/// The complex algebra of a reflexive frame: subsets of worlds (as
/// bitmasks) with set operations and `□a = {w : R[w] ⊆ a}`.
pub fn bao_from_frame(fr: &KripkeFrame) -> Result<FiniteAlgebra, ModalError> {
    if let Some(w) = (0..fr.worlds).find(|&w| fr.relation.binary_search(&(w, w)).is_err()) {
        return Err(ModalError::NotReflexive(w));
    }
    let n = fr.worlds;
    let size = 1usize << n;
    let full = size - 1;
    let succ: Vec<usize> = (0..n).map(|w| fr.successors(w) as usize).collect();
    let boxed = |a: usize| (0..n).filter(|&w| succ[w] & !a == 0).fold(0, |acc, w| acc | 1 << w);
    let sig = modal_signature();
    let tables = sig
        .connectives()
        .iter()
        .map(|c| match c.name.as_str() {
            "bot" => OpTable::new(0, vec![0]),
            "top" => OpTable::new(0, vec![full]),
            "not" => OpTable::from_fn(1, size, |a| full & !a[0]),
            "or" => OpTable::from_fn(2, size, |a| a[0] | a[1]),
            "and" => OpTable::from_fn(2, size, |a| a[0] & a[1]),
            "impl" => OpTable::from_fn(2, size, |a| (full & !a[0]) | a[1]),
            "box" => OpTable::from_fn(1, size, |a| boxed(a[0])),
            other => unreachable!("modal signature has no `{other}`"),
        })
        .collect();
    let labels = (0..size).map(|m| subset_label(m as u32, n)).collect();
    let alg = FiniteAlgebra::new(sig, labels, tables)?.with_class("bao-t");
    check_bao_identities(&alg)?;
    Ok(alg)
}

/// `□1 = 1`, `□(x∧y) = □x∧□y` and `□x ≤ x`, exhaustively.
pub fn check_bao_identities(alg: &FiniteAlgebra) -> Result<(), ModalError> {
    let op = |name: &str| alg.op_index(name).ok_or(ModalError::Identity("modal signature"));
    let (top, and, bx) = (op("top")?, op("and")?, op("box")?);
    let one = alg.apply(top, &[]);
    if alg.apply(bx, &[one]) != one {
        return Err(ModalError::Identity("□1 = 1"));
    }
    for x in 0..alg.size() {
        let bxx = alg.apply(bx, &[x]);
        if alg.apply(and, &[bxx, x]) != bxx {
            return Err(ModalError::Identity("□x ≤ x"));
        }
        for y in 0..alg.size() {
            let lhs = alg.apply(bx, &[alg.apply(and, &[x, y])]);
            let rhs = alg.apply(and, &[bxx, alg.apply(bx, &[y])]);
            if lhs != rhs {
                return Err(ModalError::Identity("□(x∧y) = □x∧□y"));
            }
        }
    }
    Ok(())
}

/// `□(¬p ∨ q)`
pub fn subjunctive_implication(p: Formula, q: Formula) -> Formula {
    Formula::unary("box", material_implication(p, q))
}

/// `¬p ∨ q`
pub fn material_implication(p: Formula, q: Formula) -> Formula {
    Formula::binary("or", Formula::unary("not", p), q)
}

/// Reflexive frames with `worlds` worlds, ordered by the bitmask of their
/// non-loop pairs (pairs in lexicographic order, first pair lowest bit).
pub fn reflexive_frames(worlds: usize) -> impl Iterator<Item = KripkeFrame> {
    let pairs: Vec<(usize, usize)> = (0..worlds)
        .flat_map(|a| (0..worlds).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let extra = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &p)| p);
        KripkeFrame::reflexive(worlds, extra).expect("worlds within bounds")
    })
}

/// A pointed model of a set of formulas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyWitness {
    pub frame: KripkeFrame,
    /// Each variable's extension, as a world bitmask.
    #[serde(serialize_with = "serialize_valuation")]
    pub valuation: Valuation,
    pub world: usize,
}

fn serialize_valuation<S: serde::Serializer>(v: &Valuation, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(v.iter())
}

/// The first frame (by size, then relation), valuation and world making
/// every formula in `gamma` true at that world.
pub fn is_consistent(gamma: &[Formula], max_worlds: usize) -> Result<Option<ConsistencyWitness>, ModalError> {
    if max_worlds == 0 || max_worlds > MAX_SEARCH_WORLDS {
        return Err(ModalError::SearchBound(max_worlds));
    }
    let vars: Vec<String> = gamma
        .iter()
        .fold(BTreeSet::new(), |mut acc, f| {
            acc.extend(f.variables());
            acc
        })
        .into_iter()
        .collect();
    for worlds in 1..=max_worlds {
        for frame in reflexive_frames(worlds) {
            let alg = bao_from_frame(&frame)?;
            for v in crate::algebra::valuations(&vars, alg.size()) {
                let mut common = alg.size() - 1;
                for f in gamma {
                    common &= alg.evaluate(f, &v)?;
                    if common == 0 {
                        break;
                    }
                }
                if common != 0 {
                    return Ok(Some(ConsistencyWitness {
                        frame,
                        valuation: v,
                        world: common.trailing_zeros() as usize,
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reading {
    Subjunctive,
    Material,
}

impl Reading {
    pub fn implication(self, p: Formula, q: Formula) -> Formula {
        match self {
            Reading::Subjunctive => subjunctive_implication(p, q),
            Reading::Material => material_implication(p, q),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DietrichItem {
    pub condition: &'static str,
    pub formulas: Vec<String>,
    pub expected_consistent: bool,
    pub consistent: bool,
    pub passes: bool,
    pub witness: Option<ConsistencyWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DietrichReport {
    pub reading: Reading,
    pub max_worlds: usize,
    pub a: bool,
    pub b: bool,
    pub items: Vec<DietrichItem>,
    /// A consistency expected under the modal reading was not found within
    /// the bound; a larger bound may find it.
    pub insufficient_bound: bool,
}

/// Condition (a): `p → q` is inconsistent with `{p, ¬q}` and consistent
/// with the other three literal pairs. Condition (b): `¬(p → q)` is
/// consistent with all four.
pub fn check_dietrich_conditions(max_worlds: usize, reading: Reading) -> Result<DietrichReport, ModalError> {
    let p = Formula::var("x1");
    let q = Formula::var("x2");
    let neg = |f: &Formula| Formula::unary("not", f.clone());
    let imp = reading.implication(p.clone(), q.clone());
    let literals = [
        (p.clone(), neg(&q)),
        (p.clone(), q.clone()),
        (neg(&p), q.clone()),
        (neg(&p), neg(&q)),
    ];
    let mut items = Vec::new();
    for (condition, head) in [("a", imp.clone()), ("b", neg(&imp))] {
        for (i, (l1, l2)) in literals.iter().enumerate() {
            let gamma = vec![head.clone(), l1.clone(), l2.clone()];
            let expected_consistent = !(condition == "a" && i == 0);
            let witness = is_consistent(&gamma, max_worlds)?;
            let consistent = witness.is_some();
            items.push(DietrichItem {
                condition,
                formulas: gamma.iter().map(ToString::to_string).collect(),
                expected_consistent,
                consistent,
                passes: consistent == expected_consistent,
                witness,
            });
        }
    }
    let holds = |c: &str| items.iter().filter(|i| i.condition == c).all(|i| i.passes);
    let (a, b) = (holds("a"), holds("b"));
    let insufficient_bound =
        reading == Reading::Subjunctive && items.iter().any(|i| i.expected_consistent && !i.consistent);
    Ok(DietrichReport {
        reading,
        max_worlds,
        a,
        b,
        items,
        insufficient_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BottomDerivation {
    pub max_worlds: usize,
    pub frames: usize,
    pub pairs: usize,
    pub holds: bool,
    /// First failing (frame, p, q), if any.
    pub counterexample: Option<(KripkeFrame, usize, usize)>,
}

/// Checks, for every `p, q` in every complex algebra of a reflexive frame
/// with at most `max_worlds` worlds:
/// `□(¬p∨q) ∧ p ∧ ¬q ≤ (¬p∨q) ∧ p ∧ ¬q = (¬p ∧ (p∧¬q)) ∨ (q ∧ (p∧¬q)) = ⊥ ∨ ⊥ = ⊥`.
pub fn bottom_derivation(max_worlds: usize) -> Result<BottomDerivation, ModalError> {
    if max_worlds == 0 || max_worlds > MAX_SEARCH_WORLDS {
        return Err(ModalError::SearchBound(max_worlds));
    }
    let mut report = BottomDerivation {
        max_worlds,
        frames: 0,
        pairs: 0,
        holds: true,
        counterexample: None,
    };
    for worlds in 1..=max_worlds {
        for frame in reflexive_frames(worlds) {
            report.frames += 1;
            let alg = bao_from_frame(&frame)?;
            let op = |name: &str| alg.op_index(name).expect("modal signature");
            let (not, or, and, bx) = (op("not"), op("or"), op("and"), op("box"));
            let bot = alg.constant("bot").expect("modal signature");
            let ap = |o: usize, args: &[usize]| alg.apply(o, args);
            for p in 0..alg.size() {
                for q in 0..alg.size() {
                    report.pairs += 1;
                    let np = ap(not, &[p]);
                    let nq = ap(not, &[q]);
                    let p_nq = ap(and, &[p, nq]);
                    let mat = ap(or, &[np, q]);
                    let lhs = ap(and, &[ap(and, &[ap(bx, &[mat]), p]), nq]);
                    let middle = ap(and, &[ap(and, &[mat, p]), nq]);
                    let left = ap(and, &[np, p_nq]);
                    let right = ap(and, &[q, p_nq]);
                    let ok = ap(and, &[lhs, middle]) == lhs
                        && middle == ap(or, &[left, right])
                        && left == bot
                        && right == bot
                        && ap(or, &[left, right]) == bot;
                    if !ok && report.holds {
                        report.holds = false;
                        report.counterexample = Some((frame.clone(), p, q));
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DietrichSummary {
    pub a: &'static str,
    pub b: &'static str,
    pub material_a: &'static str,
    pub material_b: &'static str,
    pub bottom_derivation: &'static str,
    pub subjunctive: DietrichReport,
    pub material: DietrichReport,
    pub derivation: BottomDerivation,
}

impl DietrichSummary {
    /// The subjunctive reading meets (a) and (b), the material one only (a).
    pub fn as_expected(&self) -> bool {
        self.subjunctive.a && self.subjunctive.b && self.material.a && !self.material.b && self.derivation.holds
    }
}

pub fn dietrich_summary(max_worlds: usize, derivation_worlds: usize) -> Result<DietrichSummary, ModalError> {
    let subjunctive = check_dietrich_conditions(max_worlds, Reading::Subjunctive)?;
    let material = check_dietrich_conditions(max_worlds, Reading::Material)?;
    let derivation = bottom_derivation(derivation_worlds)?;
    let pf = |ok: bool| if ok { "pass" } else { "fail" };
    Ok(DietrichSummary {
        a: pf(subjunctive.a),
        b: pf(subjunctive.b),
        material_a: pf(material.a),
        material_b: pf(material.b),
        bottom_derivation: pf(derivation.holds),
        subjunctive,
        material,
        derivation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::modal_signature;
    use crate::syntax::parse_formula;

    fn f(text: &str) -> Formula {
        parse_formula(text, &modal_signature()).unwrap()
    }

    #[test]
    fn one_world_box_is_identity() {
        let alg = bao_from_frame(&KripkeFrame::reflexive(1, []).unwrap()).unwrap();
        assert_eq!(alg.size(), 2);
        assert_eq!(alg.apply_named("box", &[0]), Ok(0));
        assert_eq!(alg.apply_named("box", &[1]), Ok(1));
    }

    #[test]
    fn two_world_successors() {
        // w = 0 sees v = 1
        let alg = bao_from_frame(&KripkeFrame::reflexive(2, [(0, 1)]).unwrap()).unwrap();
        let v = alg.element_by_label("{1}").unwrap();
        let w = alg.element_by_label("{0}").unwrap();
        assert_eq!(alg.apply_named("box", &[v]), Ok(v));
        assert_eq!(alg.apply_named("box", &[w]), Ok(0));

        let complete = bao_from_frame(&KripkeFrame::reflexive(2, [(0, 1), (1, 0)]).unwrap()).unwrap();
        for a in 0..4 {
            let expected = if a == 3 { 3 } else { 0 };
            assert_eq!(complete.apply_named("box", &[a]), Ok(expected));
        }
    }

    #[test]
    fn rejects_irreflexive_frames() {
        assert_eq!(
            bao_from_frame(&KripkeFrame::new(2, [(0, 0), (0, 1)]).unwrap()),
            Err(ModalError::NotReflexive(1))
        );
        assert!(KripkeFrame::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn identities_hold_for_small_frames() {
        for worlds in 1..=3 {
            let frames: Vec<_> = reflexive_frames(worlds).collect();
            assert_eq!(frames.len(), 1 << (worlds * (worlds - 1)));
            for fr in frames {
                assert!(fr.is_reflexive());
                check_bao_identities(&bao_from_frame(&fr).unwrap()).unwrap();
            }
        }
    }

    #[test]
    fn frame_json() {
        let fr = KripkeFrame::from_json(r#"{"worlds":2,"relation":[[0,0],[1,1],[0,1]]}"#).unwrap();
        assert_eq!(fr.successors(0), 0b11);
        assert_eq!(KripkeFrame::from_json_value(&fr.to_json_value()).unwrap(), fr);
        assert!(KripkeFrame::from_json(r#"{"worlds":2,"relation":[[0]]}"#).is_err());
    }

    #[test]
    fn implication_shapes() {
        assert_eq!(subjunctive_implication(f("x1"), f("x2")), f("(box (or (not x1) x2))"));
        assert_eq!(subjunctive_implication(f("x1"), f("x1")), f("(box (or (not x1) x1))"));
        let inner = subjunctive_implication(f("x1"), f("x2"));
        assert_eq!(
            subjunctive_implication(inner, f("x3")),
            f("(box (or (not (box (or (not x1) x2))) x3))")
        );
    }

    #[test]
    fn consistency_examples() {
        let imp = f("(box (or (not x1) x2))");
        for bound in 1..=3 {
            assert_eq!(is_consistent(&[imp.clone(), f("x1"), f("(not x2)")], bound).unwrap(), None);
        }
        let w = is_consistent(&[imp.clone(), f("x1"), f("x2")], 2).unwrap().unwrap();
        assert_eq!(w.frame.worlds(), 1);
        assert_eq!((w.valuation.get("x1"), w.valuation.get("x2")), (Some(1), Some(1)));

        let w = is_consistent(&[f("(not (box (or (not x1) x2)))"), f("x1"), f("x2")], 2)
            .unwrap()
            .unwrap();
        assert_eq!(w.frame.worlds(), 2);
        let fr = &w.frame;
        let other = 1 - w.world;
        assert!(fr.successors(w.world) & (1 << other) != 0);
        let x1 = w.valuation.get("x1").unwrap();
        let x2 = w.valuation.get("x2").unwrap();
        assert!(x1 & (1 << other) != 0 && x2 & (1 << other) == 0);
        assert_eq!(is_consistent(&[], 0), Err(ModalError::SearchBound(0)));
    }

    #[test]
    fn dietrich_readings() {
        let s = check_dietrich_conditions(2, Reading::Subjunctive).unwrap();
        assert!(s.a && s.b && !s.insufficient_bound);
        assert_eq!(s.items.len(), 8);

        let m = check_dietrich_conditions(2, Reading::Material).unwrap();
        assert!(m.a && !m.b);
        let failing: Vec<_> = m.items.iter().filter(|i| !i.passes).map(|i| i.formulas[1..].to_vec()).collect();
        assert_eq!(
            failing,
            vec![
                vec!["x1".to_string(), "x2".to_string()],
                vec!["(not x1)".to_string(), "x2".to_string()],
                vec!["(not x1)".to_string(), "(not x2)".to_string()],
            ]
        );

        let one = check_dietrich_conditions(1, Reading::Subjunctive).unwrap();
        assert!(one.a && !one.b && one.insufficient_bound);
    }

    #[test]
    fn derivation_reaches_bottom() {
        let d = bottom_derivation(3).unwrap();
        assert!(d.holds);
        assert_eq!(d.frames, 1 + 4 + 64);
        assert!(dietrich_summary(2, 3).unwrap().as_expected());
    }
}
