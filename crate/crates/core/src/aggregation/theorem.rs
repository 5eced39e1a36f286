use serde::Serialize;

use super::systematicity::{domain, value_pairs};
use super::{
    check_rational_universal, check_systematicity, formula_at, lemma2_with, AggregationError, Aggregator,
    DecisionCriterion, Level, Profile, Setting,
};
use crate::agenda::{is_strictly_contingent, pseudo_richness};
use crate::algebra::{decode_tuple, enumerate_homomorphisms, is_homomorphism, HomCheck, Odometer};

fn require_rational_universal(setting: &Setting, f: &Aggregator) -> Result<(), AggregationError> {
    let ru = check_rational_universal(setting, f);
    if let Some(profile) = ru.missing {
        return Err(AggregationError::NotUniversal { profile });
    }
    if let Some((profile, output)) = ru.irrational {
        return Err(AggregationError::NotRational { profile, output });
    }
    Ok(())
}

fn require_strongly_systematic(setting: &Setting, f: &Aggregator, depth: usize) -> Result<(), AggregationError> {
    let sys = check_systematicity(setting, f, Level::StronglySystematic, depth);
    if let Some(v) = sys.violation {
        return Err(AggregationError::NotSystematic {
            level: Level::StronglySystematic.name(),
            detail: format!(
                "tuple {} gets {} via `{}` and {} via `{}` (depth {depth})",
                setting.power().label(v.tuple),
                v.first.value,
                v.first.formula,
                v.second.value,
                v.second.formula
            ),
        });
    }
    Ok(())
}

/// First agenda formula attaining every element of `B`.
fn strictly_contingent_formula(setting: &Setting) -> Result<Option<usize>, AggregationError> {
    let ag = setting.agenda();
    for (i, phi) in ag.formulas().iter().enumerate() {
        if is_strictly_contingent(phi, ag.algebra())? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// The decision criterion of `F`, read off witness profiles: for each tuple
/// `ā` (in code order) a rational profile with `⃗A(δ) = ā` is built and
/// `f(ā) = F(⃗A)(δ)`, with `δ` the first pseudo-rich witness.
pub fn extract_criterion(setting: &Setting, f: &Aggregator) -> Result<DecisionCriterion, AggregationError> {
    let ag = setting.agenda();
    let pr = pseudo_richness(ag)?;
    let k = setting.algebra().size();
    let n = setting.electorate();
    let mut table = Vec::with_capacity(setting.power().size());
    for code in 0..setting.power().size() {
        let tuple = decode_tuple(code, k, n);
        let w = lemma2_with(ag, &pr.witnesses, n, std::slice::from_ref(&tuple))?;
        let out = f
            .apply(setting, &w.profile)
            .ok_or_else(|| AggregationError::NotUniversal { profile: w.profile.clone() })?;
        table.push(out.get(w.deltas[0]));
    }
    DecisionCriterion::new(k, n, table)
}

/// The decision criterion of `F`, read off one strictly contingent agenda
/// formula `φ`: voter `i` takes the first rational attitude with value `a_i`
/// on `φ`.
pub fn extract_criterion_via(
    setting: &Setting,
    f: &Aggregator,
    formula: usize,
) -> Result<DecisionCriterion, AggregationError> {
    let ag = setting.agenda();
    let phi = formula_at(ag, formula);
    if !is_strictly_contingent(phi, ag.algebra())? {
        return Err(AggregationError::NotStrictlyContingent {
            formula: phi.to_string(),
        });
    }
    let k = setting.algebra().size();
    let n = setting.electorate();
    let by_value: Vec<_> = (0..k)
        .map(|a| {
            setting
                .rational_attitudes()
                .iter()
                .find(|att| att.get(formula) == a)
                .cloned()
                .expect("strictly contingent formulas attain every value")
        })
        .collect();
    let mut table = Vec::with_capacity(setting.power().size());
    for code in 0..setting.power().size() {
        let tuple = decode_tuple(code, k, n);
        let profile = Profile(tuple.iter().map(|&a| by_value[a].clone()).collect());
        let out = f
            .apply(setting, &profile)
            .ok_or(AggregationError::NotUniversal { profile })?;
        table.push(out.get(formula));
    }
    DecisionCriterion::new(k, n, table)
}

/// The decision criterion of a rational, universal, strongly systematic
/// aggregator, verified to be a homomorphism `B^N → B`.
pub fn criterion_from_aggregator(
    setting: &Setting,
    f: &Aggregator,
    depth: usize,
) -> Result<DecisionCriterion, AggregationError> {
    require_rational_universal(setting, f)?;
    if strictly_contingent_formula(setting)?.is_none() {
        return Err(AggregationError::NoStrictlyContingent);
    }
    let required = setting.algebra().signature().max_arity().max(1);
    let level = pseudo_richness(setting.agenda())?.level();
    if level < required {
        return Err(AggregationError::NotPseudoRich { required, found: level });
    }
    require_strongly_systematic(setting, f, depth)?;
    let criterion = extract_criterion(setting, f)?;
    match is_homomorphism(criterion.table(), setting.power(), setting.algebra())? {
        HomCheck::Homomorphism => Ok(criterion),
        HomCheck::Violation(v) => Err(AggregationError::NotHomomorphism(v)),
    }
}

/// The aggregator `F(⃗A)(φ) = f(⃗A(φ))` on all rational profiles, for a
/// homomorphism `f`.
pub fn aggregator_from_criterion(setting: &Setting, f: &DecisionCriterion) -> Result<Aggregator, AggregationError> {
    let k = setting.algebra().size();
    if f.electorate() != setting.electorate() || f.table().len() != setting.power().size() {
        return Err(AggregationError::InvalidCriterion(format!(
            "criterion over {} voters for an electorate of {}",
            f.electorate(),
            setting.electorate()
        )));
    }
    if f.table().iter().any(|&v| v >= k) {
        return Err(AggregationError::InvalidCriterion("value outside the carrier".into()));
    }
    match is_homomorphism(f.table(), setting.power(), setting.algebra())? {
        HomCheck::Homomorphism => Ok(Aggregator::Criterion(f.clone())),
        HomCheck::Violation(v) => Err(AggregationError::NotHomomorphism(v)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParetoViolation {
    pub constant: String,
    pub formula: String,
    pub value: usize,
    #[serde(skip)]
    pub profile: Profile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParetoReport {
    pub holds: bool,
    pub depth: usize,
    pub constants: Vec<String>,
    /// Unanimous (profile, formula value) instances examined.
    pub instances: usize,
    pub violation: Option<ParetoViolation>,
}

/// Unanimity at a constant `c^B`, on the agenda or its closure up to
/// `depth`, yields `c^B`.
pub fn check_pareto(setting: &Setting, f: &Aggregator, depth: usize) -> Result<ParetoReport, AggregationError> {
    require_rational_universal(setting, f)?;
    require_strongly_systematic(setting, f, depth)?;
    let b = setting.algebra();
    let power = setting.power();
    let constants: Vec<(String, usize, usize)> = b
        .constants()
        .into_iter()
        .map(|(name, value)| {
            let op = b.op_index(&name).expect("constant is in the signature");
            let code = power.apply(op, &[]);
            (name, code, value)
        })
        .collect();
    let mut report = ParetoReport {
        holds: true,
        depth,
        constants: constants.iter().map(|c| c.0.clone()).collect(),
        instances: 0,
        violation: None,
    };
    for (p, out) in domain(setting, f) {
        if !setting.is_rational_profile(&p) {
            continue;
        }
        for (code, value, formula) in value_pairs(setting, &p, &out, depth) {
            for (name, c_code, c_value) in &constants {
                if code != *c_code {
                    continue;
                }
                report.instances += 1;
                if value != *c_value && report.violation.is_none() {
                    report.holds = false;
                    report.violation = Some(ParetoViolation {
                        constant: name.clone(),
                        formula: formula.to_string(),
                        value,
                        profile: p.clone(),
                    });
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectionItem {
    pub table: Vec<usize>,
    pub dictator: Option<usize>,
    pub homomorphism: bool,
    pub qualifying: bool,
    /// `criterion_from_aggregator(aggregator_from_criterion(f)) = f`
    pub round_trip_a: Option<bool>,
    /// `aggregator_from_criterion(criterion_from_aggregator(F))` agrees with `F`
    pub round_trip_b: Option<bool>,
    pub pareto: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectionReport {
    pub algebra_size: usize,
    pub electorate: usize,
    pub agenda: Vec<String>,
    pub depth: usize,
    pub rational_attitudes: usize,
    pub rational_profiles: usize,
    pub candidates: usize,
    pub homs: usize,
    pub aggregators: usize,
    pub counts_equal: bool,
    pub criteria_match: bool,
    pub roundtrips: &'static str,
    pub pareto: &'static str,
    pub items: Vec<BijectionItem>,
}

impl BijectionReport {
    pub fn passes(&self) -> bool {
        self.counts_equal && self.criteria_match && self.roundtrips == "pass" && self.pareto == "pass"
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Qualifying criteria: maps `f: B^N → B` whose induced aggregator is
/// rational and strongly systematic (it is universal by construction).
/// With a strictly contingent formula in the agenda this is the same as
/// enumerating qualifying aggregators, since each has exactly one criterion.
fn qualifying_criteria(setting: &Setting, depth: usize) -> Vec<DecisionCriterion> {
    let k = setting.algebra().size();
    let n = setting.electorate();
    let m = setting.agenda().len();
    let columns: Vec<Vec<usize>> = setting
        .rational_profiles()
        .map(|p| (0..m).map(|i| setting.column_code(&p, i)).collect())
        .collect();
    let mut out = Vec::new();
    let mut buf = super::AttitudeFunction(vec![0; m]);
    for table in Odometer::new(setting.power().size(), k) {
        let rational = columns.iter().all(|cols| {
            for (slot, &c) in buf.0.iter_mut().zip(cols) {
                *slot = table[c];
            }
            setting.is_rational(&buf)
        });
        if !rational {
            continue;
        }
        let f = DecisionCriterion::new(k, n, table).expect("odometer tables are well formed");
        let agg = Aggregator::Criterion(f.clone());
        if check_systematicity(setting, &agg, Level::StronglySystematic, depth).holds {
            out.push(f);
        }
    }
    out
}

/// Enumerates homomorphisms `B^N → B` and qualifying aggregators, compares
/// them, and runs both round trips and the Pareto check on every item.
pub fn verify_bijection(setting: &Setting, depth: usize, budget: u64) -> Result<BijectionReport, AggregationError> {
    let b = setting.algebra();
    let k = b.size();
    let power = setting.power();
    let candidates = (k as f64).powf(power.size() as f64);
    if candidates > budget as f64 {
        return Err(AggregationError::BudgetExceeded {
            what: "decision criteria",
            count: candidates,
            budget,
        });
    }
    let homs: Vec<DecisionCriterion> = enumerate_homomorphisms(power, b, budget)?
        .into_iter()
        .map(|h| DecisionCriterion::new(k, setting.electorate(), h.into_map()))
        .collect::<Result<_, _>>()?;
    let qualifying = qualifying_criteria(setting, depth);

    let mut tables: Vec<&DecisionCriterion> = homs.iter().chain(&qualifying).collect();
    tables.sort();
    tables.dedup();

    let mut items = Vec::new();
    for f in tables {
        let homomorphism = homs.contains(f);
        let is_qualifying = qualifying.contains(f);
        let mut item = BijectionItem {
            table: f.table().to_vec(),
            dictator: f.projection_of(k),
            homomorphism,
            qualifying: is_qualifying,
            round_trip_a: None,
            round_trip_b: None,
            pareto: None,
            error: None,
        };
        let mut note = |e: AggregationError| {
            item.error.get_or_insert_with(|| e.to_string());
            false
        };
        if homomorphism {
            let lifted = aggregator_from_criterion(setting, f).and_then(|agg| {
                let back = criterion_from_aggregator(setting, &agg, depth)?;
                let pareto = check_pareto(setting, &agg, depth)?;
                Ok((back == *f, pareto.holds))
            });
            match lifted {
                Ok((rt, pareto)) => {
                    item.round_trip_a = Some(rt);
                    item.pareto = Some(pareto);
                }
                Err(e) => {
                    item.round_trip_a = Some(note(e));
                }
            }
        }
        if is_qualifying {
            let table = Aggregator::Criterion(f.clone()).tabulate(setting);
            let rt = criterion_from_aggregator(setting, &table, depth).and_then(|g| {
                let again = aggregator_from_criterion(setting, &g)?;
                Ok(setting
                    .rational_profiles()
                    .all(|p| again.apply(setting, &p) == table.apply(setting, &p)))
            });
            item.round_trip_b = Some(rt.unwrap_or_else(&mut note));
        }
        items.push(item);
    }

    let criteria_match = homs == qualifying;
    let roundtrips = items.iter().all(|i| {
        i.homomorphism && i.qualifying && i.round_trip_a == Some(true) && i.round_trip_b == Some(true)
    });
    let pareto = items.iter().all(|i| i.pareto == Some(true));
    Ok(BijectionReport {
        algebra_size: k,
        electorate: setting.electorate(),
        agenda: setting.agenda().formulas().iter().map(ToString::to_string).collect(),
        depth,
        rational_attitudes: setting.rational_attitudes().len(),
        rational_profiles: setting.profile_count(),
        candidates: candidates as usize,
        homs: homs.len(),
        aggregators: qualifying.len(),
        counts_equal: homs.len() == qualifying.len(),
        criteria_match,
        roundtrips: pass(roundtrips),
        pareto: pass(pareto),
        items,
    })
}
