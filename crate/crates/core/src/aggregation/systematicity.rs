use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{formula_at, Aggregator, AttitudeFunction, Profile, Setting};
use crate::syntax::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Independent,
    Systematic,
    StronglySystematic,
}

impl Level {
    pub fn name(self) -> &'static str {
        match self {
            Level::Independent => "independent",
            Level::Systematic => "systematic",
            Level::StronglySystematic => "strongly systematic",
        }
    }
}

/// One value seen while reading off a decision criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Occurrence {
    /// Position of the profile in the aggregator's domain order.
    pub profile: usize,
    pub formula: String,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystematicityViolation {
    /// Code of the shared tuple in `B^N`.
    pub tuple: usize,
    /// The formula as well, for independence checks.
    pub formula: Option<String>,
    pub first: Occurrence,
    pub second: Occurrence,
    #[serde(skip)]
    pub profiles: (Profile, Profile),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystematicityReport {
    pub level: Level,
    /// Closure depth used for the strong level.
    pub depth: Option<usize>,
    pub holds: bool,
    pub profiles_checked: usize,
    /// The criterion read off the constraints: one entry per tuple code,
    /// `None` where the tuple is never attained. Empty for independence.
    pub criterion: Vec<Option<usize>>,
    pub violation: Option<SystematicityViolation>,
}

pub(crate) fn domain(setting: &Setting, f: &Aggregator) -> Vec<(Profile, AttitudeFunction)> {
    match f {
        Aggregator::Criterion(_) => setting
            .rational_profiles()
            .map(|p| {
                let out = f.apply(setting, &p).expect("rational profiles are in the domain");
                (p, out)
            })
            .collect(),
        Aggregator::Extensional(table) => table.iter().map(|(p, a)| (p.clone(), a.clone())).collect(),
    }
}

/// Pairs `(⃗A(ψ), F(⃗A)(ψ))` for every `ψ` in the closure of `X` under the
/// connectives up to `depth`, each with one witnessing formula.
///
/// Values on the closure are determined by the homomorphic extensions of
/// the rational profile and of its rational output; the pairs are closed
/// under the coordinatewise operations of `B^N × B`.
pub(crate) fn value_pairs(
    setting: &Setting,
    profile: &Profile,
    output: &AttitudeFunction,
    depth: usize,
) -> Vec<(usize, usize, Formula)> {
    let b = setting.algebra();
    let power = setting.power();
    let ag = setting.agenda();
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for i in 0..ag.len() {
        let pair = (setting.column_code(profile, i), output.get(i));
        if seen.insert(pair) {
            pairs.push((pair.0, pair.1, formula_at(ag, i).clone()));
        }
    }
    let sig = b.signature();
    for (op, c) in sig.connectives().iter().enumerate() {
        if c.is_constant() {
            let pair = (power.apply(op, &[]), b.apply(op, &[]));
            if seen.insert(pair) {
                pairs.push((pair.0, pair.1, Formula::constant(c.name.clone())));
            }
        }
    }
    let mut codes = Vec::new();
    let mut outs = Vec::new();
    for _ in 0..depth {
        let frozen = pairs.len();
        if frozen == 0 {
            break;
        }
        for (op, c) in sig.connectives().iter().enumerate() {
            if c.is_constant() {
                continue;
            }
            let mut idx = vec![0usize; c.arity];
            'tuples: loop {
                codes.clear();
                outs.clear();
                for &j in &idx {
                    codes.push(pairs[j].0);
                    outs.push(pairs[j].1);
                }
                let pair = (power.apply(op, &codes), b.apply(op, &outs));
                if seen.insert(pair) {
                    let args = idx.iter().map(|&j| pairs[j].2.clone()).collect();
                    pairs.push((pair.0, pair.1, Formula::app(c.name.clone(), args)));
                }
                for slot in idx.iter_mut().rev() {
                    *slot += 1;
                    if *slot < frozen {
                        continue 'tuples;
                    }
                    *slot = 0;
                }
                break;
            }
        }
        if pairs.len() == frozen {
            break;
        }
    }
    pairs
}

/// Checks whether `F` factors through a decision criterion.
///
/// For the strong level each rational profile with a rational output also
/// contributes the pairs of its closure up to `depth`; other profiles in
/// the domain contribute their agenda values only.
pub fn check_systematicity(setting: &Setting, f: &Aggregator, level: Level, depth: usize) -> SystematicityReport {
    let dom = domain(setting, f);
    let ag = setting.agenda();
    let mut report = SystematicityReport {
        level,
        depth: (level == Level::StronglySystematic).then_some(depth),
        holds: true,
        profiles_checked: dom.len(),
        criterion: Vec::new(),
        violation: None,
    };

    if level == Level::Independent {
        let mut seen: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (p_idx, (p, out)) in dom.iter().enumerate() {
            for i in 0..ag.len() {
                let code = setting.column_code(p, i);
                let value = out.get(i);
                let (q_idx, first) = *seen.entry((i, code)).or_insert((p_idx, value));
                if first != value {
                    let formula = formula_at(ag, i).to_string();
                    report.holds = false;
                    report.violation = Some(SystematicityViolation {
                        tuple: code,
                        formula: Some(formula.clone()),
                        first: Occurrence {
                            profile: q_idx,
                            formula: formula.clone(),
                            value: first,
                        },
                        second: Occurrence {
                            profile: p_idx,
                            formula,
                            value,
                        },
                        profiles: (dom[q_idx].0.clone(), p.clone()),
                    });
                    return report;
                }
            }
        }
        return report;
    }

    let mut criterion: Vec<Option<(usize, Occurrence)>> = vec![None; setting.power().size()];
    for (p_idx, (p, out)) in dom.iter().enumerate() {
        let pairs = if level == Level::StronglySystematic
            && setting.is_rational_profile(p)
            && setting.is_rational(out)
        {
            value_pairs(setting, p, out, depth)
        } else {
            (0..ag.len())
                .map(|i| (setting.column_code(p, i), out.get(i), formula_at(ag, i).clone()))
                .collect()
        };
        for (code, value, formula) in pairs {
            let occ = Occurrence {
                profile: p_idx,
                formula: formula.to_string(),
                value,
            };
            match &criterion[code] {
                None => criterion[code] = Some((value, occ)),
                Some((first, first_occ)) if *first != value => {
                    report.holds = false;
                    report.violation = Some(SystematicityViolation {
                        tuple: code,
                        formula: None,
                        first: first_occ.clone(),
                        second: occ,
                        profiles: (dom[first_occ.profile].0.clone(), p.clone()),
                    });
                    report.criterion = criterion.iter().map(|c| c.as_ref().map(|(v, _)| *v)).collect();
                    return report;
                }
                Some(_) => {}
            }
        }
    }
    report.criterion = criterion.into_iter().map(|c| c.map(|(v, _)| v)).collect();
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalUniversalReport {
    pub universal: bool,
    pub rational: bool,
    pub profiles: usize,
    /// A rational profile outside the domain.
    #[serde(skip)]
    pub missing: Option<Profile>,
    /// A rational profile in the domain with an irrational output.
    #[serde(skip)]
    pub irrational: Option<(Profile, AttitudeFunction)>,
}

impl RationalUniversalReport {
    pub fn holds(&self) -> bool {
        self.universal && self.rational
    }
}

/// Universality and rationality over every rational profile.
pub fn check_rational_universal(setting: &Setting, f: &Aggregator) -> RationalUniversalReport {
    let mut report = RationalUniversalReport {
        universal: true,
        rational: true,
        profiles: 0,
        missing: None,
        irrational: None,
    };
    for p in setting.rational_profiles() {
        report.profiles += 1;
        match f.apply(setting, &p) {
            None => {
                if report.missing.is_none() {
                    report.universal = false;
                    report.missing = Some(p);
                }
            }
            Some(out) => {
                if report.irrational.is_none() && !setting.is_rational(&out) {
                    report.rational = false;
                    report.irrational = Some((p, out));
                }
            }
        }
        if !report.universal && !report.rational {
            break;
        }
    }
    report
}
