//! Consequence relations induced by finite matrices: entailment,
//! interderivability, closure-operator laws on finite fragments,
//! depth-bounded selfextensionality and generated S-filters.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{boolean2, mv_chain, AlgebraError, FiniteAlgebra, Odometer};
use crate::syntax::{bounded_closure_within, ClosureBudgetExceeded, Formula, DEFAULT_CLOSURE_BUDGET};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogicError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Closure(#[from] ClosureBudgetExceeded),
    #[error("degree-preserving consequence needs a lattice reduct (`and`/`meet` or `or`/`join`)")]
    NoLatticeReduct,
    #[error("the designated set is empty")]
    EmptyDesignated,
    #[error("designated element {0} is outside the carrier")]
    DesignatedOutOfRange(usize),
    #[error("fragment has {size} formulas, at most {limit} are supported")]
    FragmentTooLarge { size: usize, limit: usize },
    #[error("{rows} valuations exceed the budget of {budget}")]
    ValuationBudget { rows: u64, budget: u64 },
    #[error("algebras have different signatures")]
    SignatureMismatch,
    #[error("malformed matrix description: {0}")]
    Malformed(String),
}

/// How a matrix turns values into consequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    /// `Γ ⊢ φ` iff every valuation sending `Γ` into the designated set sends
    /// `φ` there too.
    Filter { designated: BTreeSet<usize> },
    /// `Γ ⊢ φ` iff every lower bound of the values of `Γ` is below the value
    /// of `φ`, under every valuation. `leq[a][b]` is the lattice order.
    Degree { leq: Vec<Vec<bool>> },
}

/// A logic presented by a finite algebra and a consequence mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    algebra: FiniteAlgebra,
    mode: Mode,
}

/// Cap on `|B|^vars` rows materialized for one entailment question.
pub const DEFAULT_VALUATION_BUDGET: u64 = 10_000_000;

impl Matrix {
    pub fn filter(algebra: FiniteAlgebra, designated: BTreeSet<usize>) -> Result<Self, LogicError> {
        if designated.is_empty() {
            return Err(LogicError::EmptyDesignated);
        }
        if let Some(&d) = designated.iter().find(|&&d| d >= algebra.size()) {
            return Err(LogicError::DesignatedOutOfRange(d));
        }
        Ok(Self {
            algebra,
            mode: Mode::Filter { designated },
        })
    }

    pub fn degree(algebra: FiniteAlgebra) -> Result<Self, LogicError> {
        let leq = algebra.lattice_order().ok_or(LogicError::NoLatticeReduct)?;
        Ok(Self {
            algebra,
            mode: Mode::Degree { leq },
        })
    }

    /// Classical logic: `2` with `{1}` designated.
    pub fn classical() -> Self {
        Self::filter(boolean2(), [1].into()).expect("static matrix")
    }

    /// Łukasiewicz logic preserving absolute truth on `Ł_k`.
    pub fn lukasiewicz(k: usize) -> Result<Self, LogicError> {
        let alg = mv_chain(k)?;
        Self::filter(alg, [k - 1].into())
    }

    /// Łukasiewicz logic preserving degrees of truth on `Ł_k`.
    pub fn lukasiewicz_degree(k: usize) -> Result<Self, LogicError> {
        Self::degree(mv_chain(k)?)
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn mode_name(&self) -> &'static str {
        match self.mode {
            Mode::Filter { .. } => "filter",
            Mode::Degree { .. } => "degree",
        }
    }

    pub fn is_designated(&self, a: usize) -> bool {
        match &self.mode {
            Mode::Filter { designated } => designated.contains(&a),
            Mode::Degree { leq } => (0..self.algebra.size()).all(|b| leq[b][a]),
        }
    }

    /// Reads an algebra object extended with `"designated": [...]` or
    /// `"mode": "degree"`.
    pub fn from_json(text: &str) -> Result<Self, LogicError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| LogicError::Malformed(e.to_string()))?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &Value) -> Result<Self, LogicError> {
        let algebra = FiniteAlgebra::from_json_value(value)?;
        let mode = value.get("mode").and_then(Value::as_str);
        match (mode, value.get("designated")) {
            (Some("degree"), None) => Self::degree(algebra),
            (Some("filter") | None, Some(d)) => {
                let designated = d
                    .as_array()
                    .ok_or_else(|| LogicError::Malformed("`designated` must be an array".into()))?
                    .iter()
                    .map(|v| match v {
                        Value::Number(n) => n.as_u64().map(|n| n as usize),
                        Value::String(s) => algebra.element_by_label(s),
                        _ => None,
                    })
                    .collect::<Option<BTreeSet<usize>>>()
                    .ok_or_else(|| {
                        LogicError::Malformed("designated values must be indices or labels".into())
                    })?;
                Self::filter(algebra, designated)
            }
            (Some("degree"), Some(_)) => Err(LogicError::Malformed(
                "`designated` is meaningless in degree mode".into(),
            )),
            (Some(other), _) => Err(LogicError::Malformed(format!("unknown mode `{other}`"))),
            (None, None) => Err(LogicError::Malformed(
                "expected `designated` or `\"mode\": \"degree\"`".into(),
            )),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let mut v = self.algebra.to_json_value();
        match &self.mode {
            Mode::Filter { designated } => v["designated"] = serde_json::json!(designated),
            Mode::Degree { .. } => v["mode"] = serde_json::json!("degree"),
        }
        v
    }

    /// Values of each formula under every valuation of `vars`, in
    /// lexicographic valuation order.
    pub fn truth_tables(
        &self,
        formulas: &[&Formula],
        vars: &[String],
    ) -> Result<Vec<Vec<usize>>, LogicError> {
        let k = self.algebra.size();
        let rows = (k as u64).checked_pow(vars.len() as u32).unwrap_or(u64::MAX);
        if rows > DEFAULT_VALUATION_BUDGET {
            return Err(LogicError::ValuationBudget {
                rows,
                budget: DEFAULT_VALUATION_BUDGET,
            });
        }
        let mut out = vec![Vec::with_capacity(rows as usize); formulas.len()];
        for digits in Odometer::new(vars.len(), k) {
            let lookup = |name: &str| vars.iter().position(|v| v == name).map(|i| digits[i]);
            for (table, f) in out.iter_mut().zip(formulas) {
                table.push(self.algebra.evaluate_with(f, &lookup)?);
            }
        }
        Ok(out)
    }

    /// Entailment over precomputed truth tables with aligned rows.
    fn entails_tables(&self, premises: &[&[usize]], conclusion: &[usize]) -> bool {
        match &self.mode {
            Mode::Filter { designated } => (0..conclusion.len()).all(|row| {
                !premises.iter().all(|p| designated.contains(&p[row]))
                    || designated.contains(&conclusion[row])
            }),
            Mode::Degree { leq } => {
                let k = self.algebra.size();
                (0..conclusion.len()).all(|row| {
                    (0..k).all(|a| {
                        !premises.iter().all(|p| leq[a][p[row]]) || leq[a][conclusion[row]]
                    })
                })
            }
        }
    }
}

fn variables_of<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Vec<String> {
    let mut vars = BTreeSet::new();
    for f in formulas {
        f.collect_variables(&mut vars);
    }
    vars.into_iter().collect()
}

/// Semantic consequence in the matrix, quantifying over valuations of the
/// variables that occur.
pub fn entails(m: &Matrix, premises: &[Formula], conclusion: &Formula) -> Result<bool, LogicError> {
    let vars = variables_of(premises.iter().chain([conclusion]));
    let all: Vec<&Formula> = premises.iter().chain([conclusion]).collect();
    let tables = m.truth_tables(&all, &vars)?;
    let (concl, prem) = tables.split_last().expect("conclusion present");
    let prem: Vec<&[usize]> = prem.iter().map(Vec::as_slice).collect();
    Ok(m.entails_tables(&prem, concl))
}

pub fn interderivable(m: &Matrix, phi: &Formula, psi: &Formula) -> Result<bool, LogicError> {
    Ok(entails(m, std::slice::from_ref(phi), psi)? && entails(m, std::slice::from_ref(psi), phi)?)
}

pub const MAX_FRAGMENT: usize = 20;

/// The consequence relation restricted to a finite fragment, materialized as
/// the closure `C(Γ)` of every subset `Γ`.
#[derive(Debug, Clone)]
pub struct BoundedConsequence {
    matrix: Matrix,
    fragment: Vec<Formula>,
    variables: Vec<String>,
    depth: Option<usize>,
    /// `closure[Γ]` as bitmasks over `fragment`.
    closure: Vec<u32>,
}

impl BoundedConsequence {
    /// The fragment is exactly `formulas`.
    pub fn from_fragment(matrix: Matrix, formulas: BTreeSet<Formula>) -> Result<Self, LogicError> {
        Self::build(matrix, formulas.into_iter().collect(), None)
    }

    /// The fragment is the closure of `generators` up to `depth`.
    pub fn generate(
        matrix: Matrix,
        generators: &BTreeSet<Formula>,
        depth: usize,
    ) -> Result<Self, LogicError> {
        let fragment = bounded_closure_within(
            generators,
            matrix.algebra.signature(),
            depth,
            MAX_FRAGMENT,
        )
        .map_err(|_| LogicError::FragmentTooLarge {
            size: MAX_FRAGMENT + 1,
            limit: MAX_FRAGMENT,
        })?;
        Self::build(matrix, fragment.into_iter().collect(), Some(depth))
    }

    fn build(matrix: Matrix, fragment: Vec<Formula>, depth: Option<usize>) -> Result<Self, LogicError> {
        if fragment.len() > MAX_FRAGMENT {
            return Err(LogicError::FragmentTooLarge {
                size: fragment.len(),
                limit: MAX_FRAGMENT,
            });
        }
        let variables = variables_of(&fragment);
        let refs: Vec<&Formula> = fragment.iter().collect();
        let tables = matrix.truth_tables(&refs, &variables)?;
        let n = fragment.len();
        let closure = (0u32..1 << n)
            .map(|mask| {
                let prem: Vec<&[usize]> = (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| tables[i].as_slice())
                    .collect();
                (0..n)
                    .filter(|&j| matrix.entails_tables(&prem, &tables[j]))
                    .fold(0u32, |acc, j| acc | (1 << j))
            })
            .collect();
        Ok(Self {
            matrix,
            fragment,
            variables,
            depth,
            closure,
        })
    }

    pub fn fragment(&self) -> &[Formula] {
        &self.fragment
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn subsets(&self) -> usize {
        self.closure.len()
    }

    /// `C(Γ)` for `Γ` given as a bitmask over the fragment.
    pub fn close(&self, premises: u32) -> u32 {
        self.closure[premises as usize]
    }

    /// All pairs `(Γ, φ)` with `Γ ⊢ φ` on the fragment.
    pub fn relation(&self) -> Vec<(Vec<&Formula>, &Formula)> {
        let n = self.fragment.len();
        let members = |mask: u32| -> Vec<&Formula> {
            (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &self.fragment[i]).collect()
        };
        let mut out = Vec::new();
        for (mask, &closed) in self.closure.iter().enumerate() {
            for j in (0..n).filter(|j| closed & (1 << j) != 0) {
                out.push((members(mask as u32), &self.fragment[j]));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureLawReport {
    pub fragment_size: usize,
    pub depth: Option<usize>,
    pub extensive: bool,
    pub monotone: bool,
    pub idempotent: bool,
    pub violations: Vec<String>,
}

impl ClosureLawReport {
    pub fn holds(&self) -> bool {
        self.extensive && self.monotone && self.idempotent
    }
}

/// Extensivity, monotonicity and idempotence of `C` on every subset of the
/// fragment. Monotonicity is checked on one-element extensions, which
/// implies it for all inclusions.
pub fn check_closure_laws(bc: &BoundedConsequence) -> ClosureLawReport {
    let n = bc.fragment.len();
    let describe = |mask: u32| -> String {
        let parts: Vec<String> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| bc.fragment[i].to_string())
            .collect();
        format!("{{{}}}", parts.join(", "))
    };
    let mut report = ClosureLawReport {
        fragment_size: n,
        depth: bc.depth,
        extensive: true,
        monotone: true,
        idempotent: true,
        violations: Vec::new(),
    };
    for mask in 0u32..1 << n {
        let c = bc.close(mask);
        if mask & !c != 0 && report.extensive {
            report.extensive = false;
            report.violations.push(format!("extensivity fails at {}", describe(mask)));
        }
        if bc.close(c) != c && report.idempotent {
            report.idempotent = false;
            report.violations.push(format!("idempotence fails at {}", describe(mask)));
        }
        for i in (0..n).filter(|i| mask & (1 << i) == 0) {
            let bigger = mask | (1 << i);
            if c & !bc.close(bigger) != 0 && report.monotone {
                report.monotone = false;
                report.violations.push(format!(
                    "monotonicity fails from {} to {}",
                    describe(mask),
                    describe(bigger)
                ));
            }
        }
    }
    report
}

/// A failure of the congruence property on the fragment: `left[i] ≡ right[i]`
/// for every `i`, yet `g(left) ≢ g(right)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceWitness {
    pub connective: String,
    pub left: Vec<String>,
    pub right: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfextReport {
    /// `true` means no counterexample up to `depth`, not a proof.
    pub selfextensional: bool,
    pub mode: String,
    pub variables: Vec<String>,
    pub depth: usize,
    pub fragment_size: usize,
    pub equivalence_classes: usize,
    pub witness: Option<CongruenceWitness>,
}

/// Decides `≡` on formulas by comparing keys derived from truth tables.
///
/// Filter mode: the rows at which the value is designated. Degree mode: the
/// table itself, since `φ ⊢ ψ` iff `v(φ) ≤ v(ψ)` under every valuation.
pub fn equivalence_key(m: &Matrix, table: &[usize]) -> Vec<usize> {
    match &m.mode {
        Mode::Filter { designated } => table
            .iter()
            .map(|a| usize::from(designated.contains(a)))
            .collect(),
        Mode::Degree { .. } => table.to_vec(),
    }
}

/// Searches the closure of `variables` up to `depth` for a failure of
/// `φ̄ ≡ ψ̄ ⇒ g(φ̄) ≡ g(ψ̄)`.
///
/// Formulas are grouped by truth table (the table of `g(φ̄)` depends only on
/// the tables of `φ̄`), tables are grouped into `≡`-classes, and each
/// connective is tried on every tuple of classes. Representatives are the
/// smallest formulas by size, then by the formula order.
pub fn check_selfextensionality(
    m: &Matrix,
    variables: &[String],
    depth: usize,
) -> Result<SelfextReport, LogicError> {
    check_selfextensionality_within(m, variables, depth, DEFAULT_CLOSURE_BUDGET)
}

pub fn check_selfextensionality_within(
    m: &Matrix,
    variables: &[String],
    depth: usize,
    budget: usize,
) -> Result<SelfextReport, LogicError> {
    let alg = &m.algebra;
    let gens: BTreeSet<Formula> = variables.iter().map(Formula::var).collect();
    let fragment = bounded_closure_within(&gens, alg.signature(), depth, budget)?;
    let mut vars: Vec<String> = variables.to_vec();
    vars.sort();
    vars.dedup();
    let refs: Vec<&Formula> = fragment.iter().collect();
    let tables = m.truth_tables(&refs, &vars)?;

    // truth table -> smallest representative
    let mut reps: BTreeMap<Vec<usize>, &Formula> = BTreeMap::new();
    for (f, t) in refs.iter().zip(tables) {
        reps.entry(t)
            .and_modify(|r| {
                if (f.size(), *f) < (r.size(), *r) {
                    *r = f;
                }
            })
            .or_insert(f);
    }
    let mut members: Vec<(Vec<usize>, &Formula)> = reps.into_iter().collect();
    members.sort_by(|a, b| (a.1.size(), a.1).cmp(&(b.1.size(), b.1)));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of_key: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for (i, (t, _)) in members.iter().enumerate() {
        let key = equivalence_key(m, t);
        let next = classes.len();
        let c = *class_of_key.entry(key).or_insert(next);
        if c == next {
            classes.push(Vec::new());
        }
        classes[c].push(i);
    }

    let rows = members.first().map_or(0, |(t, _)| t.len());
    let mut witness = None;
    'search: for (op, conn) in alg.signature().connectives().iter().enumerate() {
        if conn.arity == 0 {
            continue;
        }
        for class_tuple in Odometer::new(conn.arity, classes.len()) {
            if class_tuple.iter().all(|&c| classes[c].len() == 1) {
                continue;
            }
            let apply = |choice: &[usize]| -> Vec<usize> {
                let mut args = vec![0usize; choice.len()];
                let table: Vec<usize> = (0..rows)
                    .map(|row| {
                        for (a, &i) in args.iter_mut().zip(choice) {
                            *a = members[i].0[row];
                        }
                        alg.apply(op, &args)
                    })
                    .collect();
                equivalence_key(m, &table)
            };
            let first: Vec<usize> = class_tuple.iter().map(|&c| classes[c][0]).collect();
            let first_key = apply(&first);
            let sizes: Vec<usize> = class_tuple.iter().map(|&c| classes[c].len()).collect();
            let mut pick = vec![0usize; conn.arity];
            'combos: loop {
                for slot in (0..conn.arity).rev() {
                    pick[slot] += 1;
                    if pick[slot] < sizes[slot] {
                        let choice: Vec<usize> = class_tuple
                            .iter()
                            .zip(&pick)
                            .map(|(&c, &p)| classes[c][p])
                            .collect();
                        if apply(&choice) != first_key {
                            let show = |idx: &[usize]| {
                                idx.iter().map(|&i| members[i].1.to_string()).collect()
                            };
                            witness = Some(CongruenceWitness {
                                connective: conn.name.clone(),
                                left: show(&first),
                                right: show(&choice),
                            });
                            break 'search;
                        }
                        continue 'combos;
                    }
                    pick[slot] = 0;
                }
                break;
            }
        }
    }

    Ok(SelfextReport {
        selfextensional: witness.is_none(),
        mode: m.mode_name().into(),
        variables: vars,
        depth,
        fragment_size: fragment.len(),
        equivalence_classes: classes.len(),
        witness,
    })
}

/// Parameters of the fragment whose entailments generate S-filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FilterFragment {
    pub variables: usize,
    pub depth: usize,
    pub max_premises: usize,
}

impl Default for FilterFragment {
    fn default() -> Self {
        Self {
            variables: 2,
            depth: 1,
            max_premises: 2,
        }
    }
}

/// A subset of an algebra closed under the fragment's entailments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SFilter {
    pub elements: BTreeSet<usize>,
    /// Closure is only guaranteed for the entailments of this fragment; the
    /// full consequence relation may force more.
    pub fragment: FilterFragment,
    pub entailments_used: usize,
    pub rounds: usize,
}

struct FilterRules {
    /// For each entailment, the premise and conclusion indices into `values`.
    rules: Vec<(Vec<usize>, usize)>,
    /// `values[formula][row]` over valuations into the target algebra.
    values: Vec<Vec<usize>>,
}

fn filter_rules(m: &Matrix, target: &FiniteAlgebra, frag: FilterFragment) -> Result<FilterRules, LogicError> {
    if !m.algebra.signature().same_symbols(target.signature()) {
        return Err(LogicError::SignatureMismatch);
    }
    let vars: Vec<String> = (1..=frag.variables).map(|i| format!("x{i}")).collect();
    let gens: BTreeSet<Formula> = vars.iter().map(Formula::var).collect();
    let fragment: Vec<Formula> =
        bounded_closure_within(&gens, m.algebra.signature(), frag.depth, DEFAULT_CLOSURE_BUDGET)?
            .into_iter()
            .collect();
    let refs: Vec<&Formula> = fragment.iter().collect();
    let logic_tables = m.truth_tables(&refs, &vars)?;
    let target_matrix = Matrix {
        algebra: target.clone(),
        mode: Mode::Filter {
            designated: [0].into(),
        },
    };
    let values = target_matrix.truth_tables(&refs, &vars)?;

    let n = fragment.len();
    let mut rules = Vec::new();
    for size in 0..=frag.max_premises.min(n) {
        for combo in combinations(n, size) {
            let prem: Vec<&[usize]> = combo.iter().map(|&i| logic_tables[i].as_slice()).collect();
            for (j, concl) in logic_tables.iter().enumerate() {
                if !combo.contains(&j) && m.entails_tables(&prem, concl) {
                    rules.push((combo.clone(), j));
                }
            }
        }
    }
    Ok(FilterRules { rules, values })
}

fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// One pass of the closure step; returns the elements it forces.
fn filter_step(rules: &FilterRules, current: &BTreeSet<usize>) -> BTreeSet<usize> {
    let rows = rules.values.first().map_or(0, Vec::len);
    let mut forced = BTreeSet::new();
    for (prem, concl) in &rules.rules {
        for row in 0..rows {
            let value = rules.values[*concl][row];
            if !current.contains(&value)
                && prem.iter().all(|&p| current.contains(&rules.values[p][row]))
            {
                forced.insert(value);
            }
        }
    }
    forced
}

/// The least superset of `seed` closed under every fragment entailment
/// `Γ ⊢ φ` and every valuation `h` into `target`: `h[Γ] ⊆ F ⇒ h(φ) ∈ F`.
pub fn generate_sfilter(
    m: &Matrix,
    target: &FiniteAlgebra,
    seed: &BTreeSet<usize>,
    frag: FilterFragment,
) -> Result<SFilter, LogicError> {
    if let Some(&a) = seed.iter().find(|&&a| a >= target.size()) {
        return Err(LogicError::DesignatedOutOfRange(a));
    }
    let rules = filter_rules(m, target, frag)?;
    let mut elements = seed.clone();
    let mut rounds = 0;
    loop {
        let forced = filter_step(&rules, &elements);
        if forced.is_empty() {
            break;
        }
        rounds += 1;
        elements.extend(forced);
    }
    Ok(SFilter {
        elements,
        fragment: frag,
        entailments_used: rules.rules.len(),
        rounds,
    })
}

/// Whether `elements` is already closed under the fragment's entailments.
pub fn is_sfilter(
    m: &Matrix,
    target: &FiniteAlgebra,
    elements: &BTreeSet<usize>,
    frag: FilterFragment,
) -> Result<bool, LogicError> {
    let rules = filter_rules(m, target, frag)?;
    Ok(filter_step(&rules, elements).is_empty())
}
