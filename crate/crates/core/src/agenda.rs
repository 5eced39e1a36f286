//! Agendas over a matrix-presented logic: equivalence to variables,
//! pseudo-richness and strict contingency.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::Value;

use crate::algebra::{FiniteAlgebra, Odometer};
use crate::semantics::{interderivable, LogicError, Matrix};
use crate::syntax::{parse_formula, Formula, Signature};

/// A finite set of formulas together with the ambient logic `S` and its
/// algebra `B`. Formulas are kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agenda {
    formulas: Vec<Formula>,
    matrix: Matrix,
}

impl Agenda {
    pub fn new(matrix: Matrix, formulas: impl IntoIterator<Item = Formula>) -> Result<Self, LogicError> {
        let set: BTreeSet<Formula> = formulas.into_iter().collect();
        let sig = matrix.algebra().signature();
        for f in &set {
            f.check(sig)
                .map_err(|e| LogicError::Malformed(format!("agenda formula {f}: {e}")))?;
        }
        Ok(Self {
            formulas: set.into_iter().collect(),
            matrix,
        })
    }

    pub fn parse(matrix: Matrix, texts: &[&str]) -> Result<Self, LogicError> {
        let sig = matrix.algebra().signature().clone();
        let formulas = texts
            .iter()
            .map(|t| parse_formula(t, &sig).map_err(|e| LogicError::Malformed(format!("`{t}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(matrix, formulas)
    }

    /// Reads `{"signature_ref": ..., "formulas": [...]}`. When `signature_ref`
    /// resolves to a signature (via `resolve`), it must match the logic's.
    pub fn from_json_value(
        matrix: Matrix,
        value: &Value,
        resolve: impl Fn(&str) -> Option<Signature>,
    ) -> Result<Self, LogicError> {
        let list = value
            .get("formulas")
            .and_then(Value::as_array)
            .ok_or_else(|| LogicError::Malformed("agenda needs a `formulas` array".into()))?;
        if let Some(reference) = value.get("signature_ref") {
            let declared = match reference {
                Value::String(s) => resolve(s).ok_or_else(|| {
                    LogicError::Malformed(format!("cannot resolve signature_ref `{s}`"))
                })?,
                Value::Object(_) => serde_json::from_value(reference.clone())
                    .map_err(|e| LogicError::Malformed(e.to_string()))?,
                _ => return Err(LogicError::Malformed("bad signature_ref".into())),
            };
            if !declared.same_symbols(matrix.algebra().signature()) {
                return Err(LogicError::SignatureMismatch);
            }
        }
        let texts = list
            .iter()
            .map(|v| {
                v.as_str()
                    .ok_or_else(|| LogicError::Malformed("agenda formulas must be strings".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::parse(matrix, &texts)
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn position(&self, f: &Formula) -> Option<usize> {
        self.formulas.binary_search(f).ok()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        self.matrix.algebra()
    }

    pub fn signature(&self) -> &Signature {
        self.matrix.algebra().signature()
    }

    /// Variables occurring in the agenda, sorted.
    pub fn variables(&self) -> Vec<String> {
        let mut vars = BTreeSet::new();
        for f in &self.formulas {
            f.collect_variables(&mut vars);
        }
        vars.into_iter().collect()
    }
}

fn fresh_variable(taken: &BTreeSet<String>) -> String {
    (0..)
        .map(|i| format!("fresh{i}"))
        .find(|v| !taken.contains(v))
        .expect("unbounded name supply")
}

/// A variable `x` with `φ ≡ x`, trying the variables of `φ` in order and
/// then one fresh variable.
///
/// A match on the fresh variable only happens when `φ` is constant-valued
/// and every formula is equivalent to every other, i.e. over a trivial `B`.
pub fn is_provably_equivalent_to_variable(
    phi: &Formula,
    matrix: &Matrix,
) -> Result<Option<String>, LogicError> {
    let vars = phi.variables();
    for x in vars.iter().cloned().chain([fresh_variable(&vars)]) {
        if interderivable(matrix, phi, &Formula::var(x.clone()))? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PseudoRichWitness {
    pub formula: String,
    pub variable: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoRichness {
    /// Agenda formulas `δ_j` (as indices) and their pairwise distinct variables.
    pub witnesses: Vec<(usize, String)>,
}

impl PseudoRichness {
    pub fn level(&self) -> usize {
        self.witnesses.len()
    }
}

/// Greedy choice of agenda formulas equivalent to pairwise distinct
/// variables, in agenda order. Over a nontrivial `B` no formula is
/// equivalent to two distinct variables, so greedy is maximal.
pub fn pseudo_richness(ag: &Agenda) -> Result<PseudoRichness, LogicError> {
    let mut used = BTreeSet::new();
    let mut witnesses = Vec::new();
    for (i, f) in ag.formulas.iter().enumerate() {
        if let Some(x) = is_provably_equivalent_to_variable(f, &ag.matrix)? {
            if used.insert(x.clone()) {
                witnesses.push((i, x));
            }
        }
    }
    Ok(PseudoRichness { witnesses })
}

/// Whether the agenda is `n`-pseudo-rich, with the first `n` witnesses.
pub fn check_pseudo_rich(ag: &Agenda, n: usize) -> Result<Option<Vec<PseudoRichWitness>>, LogicError> {
    let pr = pseudo_richness(ag)?;
    if pr.level() < n {
        return Ok(None);
    }
    Ok(Some(
        pr.witnesses
            .iter()
            .take(n)
            .map(|(i, x)| PseudoRichWitness {
                formula: ag.formulas[*i].to_string(),
                variable: x.clone(),
            })
            .collect(),
    ))
}

/// The set of values `φ` takes over all valuations of its variables.
pub fn image(phi: &Formula, b: &FiniteAlgebra) -> Result<BTreeSet<usize>, LogicError> {
    let vars: Vec<String> = phi.variables().into_iter().collect();
    let mut out = BTreeSet::new();
    for digits in Odometer::new(vars.len(), b.size()) {
        let lookup = |name: &str| vars.iter().position(|v| v == name).map(|i| digits[i]);
        out.insert(b.evaluate_with(phi, &lookup)?);
    }
    Ok(out)
}

/// `φ` attains every element of `B` under some valuation.
pub fn is_strictly_contingent(phi: &Formula, b: &FiniteAlgebra) -> Result<bool, LogicError> {
    Ok(image(phi, b)?.len() == b.size())
}
