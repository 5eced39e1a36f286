//! Attitude functions, profiles, aggregators and decision criteria over a
//! finite algebra of truth values, and the two directions of the
//! correspondence between rational, universal, strongly systematic
//! aggregators and homomorphisms `B^N → B`.
//!
//! Rationality of an attitude function is decided by searching for a
//! valuation of the agenda's variables that reproduces it. For a
//! matrix-presented selfextensional logic this is the same as extending the
//! attitude to a homomorphism from the Lindenbaum–Tarski algebra.

mod systematicity;
mod theorem;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::agenda::{pseudo_richness, Agenda};
use crate::algebra::{
    decode_tuple, encode_tuple, valuations, AlgebraError, FiniteAlgebra, HomViolation, Odometer,
    Valuation,
};
use crate::semantics::LogicError;
use crate::syntax::Formula;

pub use systematicity::{
    check_rational_universal, check_systematicity, Level, Occurrence, RationalUniversalReport,
    SystematicityReport, SystematicityViolation,
};
pub use theorem::{
    aggregator_from_criterion, check_pareto, criterion_from_aggregator, extract_criterion,
    extract_criterion_via, verify_bijection, BijectionItem, BijectionReport, ParetoReport,
    ParetoViolation,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregationError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("agenda is only {found}-pseudo-rich, {required} needed")]
    NotPseudoRich { required: usize, found: usize },
    #[error("witness for `{formula}` has value {found}, expected {expected}; the logic is likely not selfextensional")]
    LemmaPostcondition {
        formula: String,
        expected: usize,
        found: usize,
    },
    #[error("{what}: {count} exceeds the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        count: f64,
        budget: u64,
    },
    #[error("aggregator is not universal: a rational profile is outside its domain")]
    NotUniversal { profile: Profile },
    #[error("aggregator is not rational: it maps a rational profile to an irrational attitude")]
    NotRational {
        profile: Profile,
        output: AttitudeFunction,
    },
    #[error("aggregator is not {level}: {detail}")]
    NotSystematic { level: &'static str, detail: String },
    #[error("the agenda contains no strictly contingent formula")]
    NoStrictlyContingent,
    #[error("`{formula}` is not strictly contingent")]
    NotStrictlyContingent { formula: String },
    #[error("decision criterion is not a homomorphism: `{}` fails at {:?}", .0.connective, .0.args)]
    NotHomomorphism(HomViolation),
    #[error("invalid decision criterion: {0}")]
    InvalidCriterion(String),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
}

/// An element of `B^X`, aligned with the agenda's formula order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AttitudeFunction(pub Vec<usize>);

impl AttitudeFunction {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, formula: usize) -> usize {
        self.0[formula]
    }

    pub fn to_json_value(&self, ag: &Agenda) -> Value {
        let map: serde_json::Map<String, Value> = ag
            .formulas()
            .iter()
            .zip(&self.0)
            .map(|(f, &v)| (f.to_string(), Value::from(v)))
            .collect();
        Value::Object(map)
    }

    /// Reads `{"formula": value, ...}`; values are carrier indices or labels.
    pub fn from_json_value(ag: &Agenda, value: &Value) -> Result<Self, AggregationError> {
        let obj = value
            .as_object()
            .ok_or_else(|| AggregationError::InvalidProfile("attitude must be an object".into()))?;
        let sig = ag.signature();
        let mut values = vec![None; ag.len()];
        for (text, v) in obj {
            let f = crate::syntax::parse_formula(text, sig)
                .map_err(|e| AggregationError::InvalidProfile(format!("`{text}`: {e}")))?;
            let pos = ag
                .position(&f)
                .ok_or_else(|| AggregationError::InvalidProfile(format!("`{text}` is not in the agenda")))?;
            let element = match v {
                Value::Number(n) => n.as_u64().map(|n| n as usize).filter(|&n| n < ag.algebra().size()),
                Value::String(s) => ag.algebra().element_by_label(s),
                _ => None,
            }
            .ok_or_else(|| AggregationError::InvalidProfile(format!("bad value for `{text}`")))?;
            values[pos] = Some(element);
        }
        values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    AggregationError::InvalidProfile(format!("no value for `{}`", ag.formulas()[i]))
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(AttitudeFunction)
    }
}

/// An `N`-sequence of attitude functions over one agenda.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Profile(pub Vec<AttitudeFunction>);

impl Profile {
    pub fn electorate(&self) -> usize {
        self.0.len()
    }

    pub fn voter(&self, i: usize) -> &AttitudeFunction {
        &self.0[i]
    }

    /// `⃗A(φ)`, the tuple of the voters' values on one agenda formula.
    pub fn column(&self, formula: usize) -> Vec<usize> {
        self.0.iter().map(|a| a.get(formula)).collect()
    }

    pub fn to_json_value(&self, ag: &Agenda) -> Value {
        Value::Array(self.0.iter().map(|a| a.to_json_value(ag)).collect())
    }

    /// Reads a JSON list of attitude maps.
    pub fn from_json_value(ag: &Agenda, value: &Value) -> Result<Self, AggregationError> {
        value
            .as_array()
            .ok_or_else(|| AggregationError::InvalidProfile("profile must be a list".into()))?
            .iter()
            .map(|v| AttitudeFunction::from_json_value(ag, v))
            .collect::<Result<Vec<_>, _>>()
            .map(Profile)
    }
}

/// A total map `f: B^N → B`, tabulated over little-endian tuple codes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DecisionCriterion {
    electorate: usize,
    table: Vec<usize>,
}

impl DecisionCriterion {
    pub fn new(k: usize, electorate: usize, table: Vec<usize>) -> Result<Self, AggregationError> {
        if electorate == 0 {
            return Err(AggregationError::InvalidCriterion("empty electorate".into()));
        }
        let expected = k.checked_pow(electorate as u32).unwrap_or(usize::MAX);
        if table.len() != expected {
            return Err(AggregationError::InvalidCriterion(format!(
                "table has {} entries, {k}^{electorate} = {expected} expected",
                table.len()
            )));
        }
        if let Some(v) = table.iter().find(|&&v| v >= k) {
            return Err(AggregationError::InvalidCriterion(format!(
                "value {v} outside a carrier of size {k}"
            )));
        }
        Ok(Self { electorate, table })
    }

    pub fn from_fn(k: usize, electorate: usize, f: impl Fn(&[usize]) -> usize) -> Self {
        let table = (0..k.pow(electorate as u32))
            .map(|c| f(&decode_tuple(c, k, electorate)))
            .collect();
        Self { electorate, table }
    }

    /// Dictatorship of voter `i`.
    pub fn projection(k: usize, electorate: usize, i: usize) -> Self {
        Self::from_fn(k, electorate, |t| t[i])
    }

    /// Boolean majority rule (`B = 2`).
    pub fn majority(electorate: usize) -> Self {
        Self::from_fn(2, electorate, |t| usize::from(2 * t.iter().sum::<usize>() > electorate))
    }

    pub fn electorate(&self) -> usize {
        self.electorate
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn at_code(&self, code: usize) -> usize {
        self.table[code]
    }

    pub fn apply(&self, tuple: &[usize], k: usize) -> usize {
        self.table[encode_tuple(tuple, k)]
    }

    /// The voter `i` with `f = π_i`, if any.
    pub fn projection_of(&self, k: usize) -> Option<usize> {
        (0..self.electorate).find(|&i| *self == Self::projection(k, self.electorate, i))
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::json!({ "electorate": self.electorate, "table": self.table })
    }

    /// Reads `{"electorate": N, "table": [...]}`.
    pub fn from_json_value(value: &Value, k: usize) -> Result<Self, AggregationError> {
        #[derive(Deserialize)]
        struct Raw {
            electorate: usize,
            table: Vec<usize>,
        }
        let raw: Raw = serde_json::from_value(value.clone())
            .map_err(|e| AggregationError::InvalidCriterion(e.to_string()))?;
        Self::new(k, raw.electorate, raw.table)
    }
}

/// A partial map `(B^X)^N ⇸ B^X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Aggregator {
    /// `F(⃗A)(φ) = f(⃗A(φ))` on every rational profile.
    Criterion(DecisionCriterion),
    /// An explicit table; its keys are the domain.
    Extensional(BTreeMap<Profile, AttitudeFunction>),
}

impl Aggregator {
    pub fn apply(&self, setting: &Setting, profile: &Profile) -> Option<AttitudeFunction> {
        match self {
            Aggregator::Criterion(f) => {
                if !setting.is_rational_profile(profile) {
                    return None;
                }
                Some(setting.apply_criterion(f, profile))
            }
            Aggregator::Extensional(table) => table.get(profile).cloned(),
        }
    }

    /// Tabulates `self` over every rational profile in its domain.
    pub fn tabulate(&self, setting: &Setting) -> Aggregator {
        Aggregator::Extensional(
            setting
                .rational_profiles()
                .filter_map(|p| self.apply(setting, &p).map(|a| (p, a)))
                .collect(),
        )
    }
}

pub const DEFAULT_PROFILE_BUDGET: u64 = 5_000_000;

/// An agenda with a fixed electorate size, plus the precomputed list of
/// rational attitude functions.
#[derive(Debug, Clone)]
pub struct Setting {
    agenda: Agenda,
    electorate: usize,
    power: FiniteAlgebra,
    variables: Vec<String>,
    rational: Vec<AttitudeFunction>,
    /// Lexicographically least valuation realizing each rational attitude.
    realizers: Vec<Valuation>,
    rational_index: HashMap<AttitudeFunction, usize>,
}

fn budget_check(what: &'static str, base: usize, exp: usize, budget: u64) -> Result<(), AggregationError> {
    let count = (base as f64).powf(exp as f64);
    if count > budget as f64 {
        return Err(AggregationError::BudgetExceeded { what, count, budget });
    }
    Ok(())
}

impl Setting {
    pub fn new(agenda: Agenda, electorate: usize) -> Result<Self, AggregationError> {
        Self::with_budget(agenda, electorate, DEFAULT_PROFILE_BUDGET)
    }

    pub fn with_budget(agenda: Agenda, electorate: usize, budget: u64) -> Result<Self, AggregationError> {
        if electorate == 0 {
            return Err(AggregationError::InvalidProfile("electorate must be nonempty".into()));
        }
        let b = agenda.algebra();
        let variables = agenda.variables();
        budget_check("valuations", b.size(), variables.len(), budget)?;
        let mut rational = Vec::new();
        let mut realizers = Vec::new();
        let mut rational_index = HashMap::new();
        for v in valuations(&variables, b.size()) {
            let a = attitude_under(&agenda, &v)?;
            if !rational_index.contains_key(&a) {
                rational_index.insert(a.clone(), rational.len());
                rational.push(a);
                realizers.push(v);
            }
        }
        budget_check("rational profiles", rational.len(), electorate, budget)?;
        let power = b.power(electorate)?;
        Ok(Self {
            agenda,
            electorate,
            power,
            variables,
            rational,
            realizers,
            rational_index,
        })
    }

    pub fn agenda(&self) -> &Agenda {
        &self.agenda
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        self.agenda.algebra()
    }

    /// `B^N`.
    pub fn power(&self) -> &FiniteAlgebra {
        &self.power
    }

    pub fn electorate(&self) -> usize {
        self.electorate
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn rational_attitudes(&self) -> &[AttitudeFunction] {
        &self.rational
    }

    pub fn is_rational(&self, a: &AttitudeFunction) -> bool {
        self.rational_index.contains_key(a)
    }

    pub fn realizer(&self, a: &AttitudeFunction) -> Option<&Valuation> {
        self.rational_index.get(a).map(|&i| &self.realizers[i])
    }

    pub fn is_rational_profile(&self, p: &Profile) -> bool {
        p.electorate() == self.electorate && p.0.iter().all(|a| self.is_rational(a))
    }

    pub fn profile_count(&self) -> usize {
        self.rational.len().pow(self.electorate as u32)
    }

    /// Every rational profile, voter 0 varying slowest.
    pub fn rational_profiles(&self) -> impl Iterator<Item = Profile> + '_ {
        Odometer::new(self.electorate, self.rational.len())
            .map(move |idx| Profile(idx.iter().map(|&i| self.rational[i].clone()).collect()))
    }

    /// Code of `⃗A(φ)` in `B^N`.
    pub fn column_code(&self, p: &Profile, formula: usize) -> usize {
        encode_tuple(&p.column(formula), self.algebra().size())
    }

    pub fn apply_criterion(&self, f: &DecisionCriterion, p: &Profile) -> AttitudeFunction {
        AttitudeFunction(
            (0..self.agenda.len())
                .map(|i| f.at_code(self.column_code(p, i)))
                .collect(),
        )
    }
}

fn attitude_under(ag: &Agenda, v: &Valuation) -> Result<AttitudeFunction, AggregationError> {
    let b = ag.algebra();
    ag.formulas()
        .iter()
        .map(|f| b.evaluate(f, v).map_err(AggregationError::from))
        .collect::<Result<Vec<_>, _>>()
        .map(AttitudeFunction)
}

/// The lexicographically least valuation of the agenda's variables that
/// reproduces `a` on every agenda formula, if one exists.
pub fn is_rational_attitude(ag: &Agenda, a: &AttitudeFunction) -> Result<Option<Valuation>, AggregationError> {
    if a.0.len() != ag.len() {
        return Err(AggregationError::InvalidProfile(format!(
            "attitude has {} values for {} formulas",
            a.0.len(),
            ag.len()
        )));
    }
    let vars = ag.variables();
    for v in valuations(&vars, ag.algebra().size()) {
        if attitude_under(ag, &v)? == *a {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma1Witness {
    /// Agenda indices of `δ_1, …, δ_m`.
    pub deltas: Vec<usize>,
    pub attitude: AttitudeFunction,
    pub valuation: Valuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma2Witness {
    pub deltas: Vec<usize>,
    pub profile: Profile,
}

/// A rational attitude taking prescribed values on `m` pseudo-rich witnesses.
///
/// The witnesses' variables get the targets, every other variable the least
/// carrier element, and the attitude is the resulting evaluation of `X`.
pub fn lemma1_witness(ag: &Agenda, targets: &[usize]) -> Result<Lemma1Witness, AggregationError> {
    let pr = pseudo_richness(ag)?;
    lemma1_with(ag, &pr.witnesses, targets)
}

fn lemma1_with(
    ag: &Agenda,
    witnesses: &[(usize, String)],
    targets: &[usize],
) -> Result<Lemma1Witness, AggregationError> {
    let m = targets.len();
    if witnesses.len() < m {
        return Err(AggregationError::NotPseudoRich {
            required: m,
            found: witnesses.len(),
        });
    }
    let k = ag.algebra().size();
    if let Some(t) = targets.iter().find(|&&t| t >= k) {
        return Err(AggregationError::InvalidTarget(format!("{t} is outside a carrier of size {k}")));
    }
    let mut valuation: Valuation = ag.variables().into_iter().map(|x| (x, 0)).collect();
    for ((_, x), &a) in witnesses.iter().zip(targets) {
        valuation.insert(x.clone(), a);
    }
    let attitude = attitude_under(ag, &valuation)?;
    let deltas: Vec<usize> = witnesses.iter().take(m).map(|(i, _)| *i).collect();
    for (&d, &a) in deltas.iter().zip(targets) {
        if attitude.get(d) != a {
            return Err(AggregationError::LemmaPostcondition {
                formula: ag.formulas()[d].to_string(),
                expected: a,
                found: attitude.get(d),
            });
        }
    }
    Ok(Lemma1Witness {
        deltas,
        attitude,
        valuation,
    })
}

/// A rational profile with `⃗A(δ_j) = ā_j`, built voter by voter.
pub fn lemma2_witness(
    ag: &Agenda,
    electorate: usize,
    targets: &[Vec<usize>],
) -> Result<Lemma2Witness, AggregationError> {
    let pr = pseudo_richness(ag)?;
    lemma2_with(ag, &pr.witnesses, electorate, targets)
}

pub(crate) fn lemma2_with(
    ag: &Agenda,
    witnesses: &[(usize, String)],
    electorate: usize,
    targets: &[Vec<usize>],
) -> Result<Lemma2Witness, AggregationError> {
    if let Some(t) = targets.iter().find(|t| t.len() != electorate) {
        return Err(AggregationError::InvalidTarget(format!(
            "tuple of length {} for an electorate of {electorate}",
            t.len()
        )));
    }
    let mut deltas = Vec::new();
    let mut voters = Vec::with_capacity(electorate);
    for i in 0..electorate {
        let column: Vec<usize> = targets.iter().map(|t| t[i]).collect();
        let w = lemma1_with(ag, witnesses, &column)?;
        deltas = w.deltas;
        voters.push(w.attitude);
    }
    Ok(Lemma2Witness {
        deltas,
        profile: Profile(voters),
    })
}

pub(crate) fn formula_at(ag: &Agenda, i: usize) -> &Formula {
    &ag.formulas()[i]
}
