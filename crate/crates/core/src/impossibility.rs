//! The Boolean case: homomorphisms `2^N → 2`, ultrafilters of decisive
//! coalitions, and dictators.

use serde::Serialize;
use thiserror::Error;

use crate::aggregation::DecisionCriterion;
use crate::algebra::{encode_tuple, is_homomorphism, subset_label, AlgebraError, FiniteAlgebra, HomViolation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImpossibilityError {
    #[error("decisive coalitions need a two-element algebra, found {0} elements")]
    NotTwoElement(usize),
    #[error("criterion is over {found} voters, {expected} expected")]
    ElectorateMismatch { expected: usize, found: usize },
    #[error("electorate of {0} voters is too large for coalition enumeration")]
    ElectorateTooLarge(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub const MAX_ELECTORATE: usize = 20;

/// Coalitions as bitmasks over voters `0..N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UltrafilterView {
    pub electorate: usize,
    /// Sorted by bitmask.
    pub decisive: Vec<u32>,
}

impl UltrafilterView {
    pub fn new(electorate: usize, mut decisive: Vec<u32>) -> Self {
        decisive.sort_unstable();
        decisive.dedup();
        Self { electorate, decisive }
    }

    pub fn contains(&self, coalition: u32) -> bool {
        self.decisive.binary_search(&coalition).is_ok()
    }

    fn full(&self) -> u32 {
        ((1u64 << self.electorate) - 1) as u32
    }

    pub fn label(&self, coalition: u32) -> String {
        subset_label(coalition, self.electorate)
    }

    pub fn labels(&self) -> Vec<String> {
        self.decisive.iter().map(|&c| self.label(c)).collect()
    }

    /// Coalitions as sorted voter lists.
    pub fn members(&self) -> Vec<Vec<usize>> {
        self.decisive
            .iter()
            .map(|&c| (0..self.electorate).filter(|i| c & (1 << i) != 0).collect())
            .collect()
    }
}

/// The designated truth value and its complement in a two-element algebra:
/// `top` when the signature has it, else element 1.
fn truth_values(b: &FiniteAlgebra) -> Result<(usize, usize), ImpossibilityError> {
    if b.size() != 2 {
        return Err(ImpossibilityError::NotTwoElement(b.size()));
    }
    let one = b.constant("top").unwrap_or(1);
    Ok((one, 1 - one))
}

fn characteristic_code(coalition: u32, n: usize, one: usize, zero: usize) -> usize {
    let tuple: Vec<usize> = (0..n)
        .map(|i| if coalition & (1 << i) != 0 { one } else { zero })
        .collect();
    encode_tuple(&tuple, 2)
}

/// `{C ⊆ N : f(χ_C) = 1}`.
pub fn decisive_coalitions(f: &DecisionCriterion, b: &FiniteAlgebra) -> Result<UltrafilterView, ImpossibilityError> {
    let (one, zero) = truth_values(b)?;
    let n = f.electorate();
    if n > MAX_ELECTORATE {
        return Err(ImpossibilityError::ElectorateTooLarge(n));
    }
    let decisive = (0..(1u32 << n))
        .filter(|&c| f.at_code(characteristic_code(c, n, one, zero)) == one)
        .collect();
    Ok(UltrafilterView::new(n, decisive))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "kebab-case")]
pub enum UltrafilterViolation {
    /// The empty coalition is decisive.
    Proper,
    /// `coalition` is decisive but its superset is not.
    Upward { coalition: String, superset: String },
    /// Both are decisive but their intersection is not.
    Intersection { left: String, right: String, meet: String },
    /// Neither or both of `coalition` and its complement are decisive.
    Maximality { coalition: String, complement: String },
}

impl std::fmt::Display for UltrafilterViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UltrafilterViolation::Proper => write!(f, "proper: the empty coalition is decisive"),
            UltrafilterViolation::Upward { coalition, superset } => {
                write!(f, "upward: {coalition} is decisive but {superset} is not")
            }
            UltrafilterViolation::Intersection { left, right, meet } => {
                write!(f, "intersection: {left} ∩ {right} = {meet} is not decisive")
            }
            UltrafilterViolation::Maximality { coalition, complement } => {
                write!(f, "maximality: exactly one of {coalition} and {complement} must be decisive")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UltrafilterCheck {
    pub ultrafilter: bool,
    /// Proper, upward closed, closed under intersection and containing `N`.
    pub filter: bool,
    /// The first violation of each failing axiom.
    pub violations: Vec<UltrafilterViolation>,
    /// Intersection of all decisive coalitions, for a filter that is not an
    /// ultrafilter.
    pub oligarchs: Option<Vec<usize>>,
}

pub fn is_ultrafilter(u: &UltrafilterView) -> UltrafilterCheck {
    let full = u.full();
    let mut violations = Vec::new();
    if u.contains(0) {
        violations.push(UltrafilterViolation::Proper);
    }
    'upward: for &c in &u.decisive {
        for s in c..=full {
            if s & c == c && !u.contains(s) {
                violations.push(UltrafilterViolation::Upward {
                    coalition: u.label(c),
                    superset: u.label(s),
                });
                break 'upward;
            }
        }
    }
    'meet: for &a in &u.decisive {
        for &b in &u.decisive {
            if !u.contains(a & b) {
                violations.push(UltrafilterViolation::Intersection {
                    left: u.label(a),
                    right: u.label(b),
                    meet: u.label(a & b),
                });
                break 'meet;
            }
        }
    }
    for c in 0..=full {
        if u.contains(c) == u.contains(full & !c) {
            violations.push(UltrafilterViolation::Maximality {
                coalition: u.label(c),
                complement: u.label(full & !c),
            });
            break;
        }
    }
    let filter = u.contains(full)
        && !violations
            .iter()
            .any(|v| !matches!(v, UltrafilterViolation::Maximality { .. }));
    let ultrafilter = violations.is_empty();
    let oligarchs = (filter && !ultrafilter).then(|| {
        let meet = u.decisive.iter().fold(full, |acc, &c| acc & c);
        (0..u.electorate).filter(|i| meet & (1 << i) != 0).collect()
    });
    UltrafilterCheck {
        ultrafilter,
        filter,
        violations,
        oligarchs,
    }
}

/// The voter `i` with `f = π_i` when `f` is a homomorphism `2^N → 2`.
pub fn classify_dictator(f: &DecisionCriterion, b: &FiniteAlgebra) -> Result<Option<usize>, ImpossibilityError> {
    truth_values(b)?;
    let power = b.power(f.electorate())?;
    if !is_homomorphism(f.table(), &power, b)?.holds() {
        return Ok(None);
    }
    Ok(f.projection_of(2))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DictatorReport {
    pub homomorphism: bool,
    pub ultrafilter: bool,
    pub dictator: Option<usize>,
    pub violations: Vec<String>,
    pub filter: bool,
    pub oligarchs: Option<Vec<usize>>,
    pub decisive: Vec<String>,
    pub hom_violation: Option<HomViolation>,
}

impl DictatorReport {
    /// The three characterizations agree.
    pub fn consistent(&self) -> bool {
        self.homomorphism == self.ultrafilter && self.homomorphism == self.dictator.is_some()
    }
}

pub fn dictator_report(f: &DecisionCriterion, b: &FiniteAlgebra) -> Result<DictatorReport, ImpossibilityError> {
    let u = decisive_coalitions(f, b)?;
    let check = is_ultrafilter(&u);
    let power = b.power(f.electorate())?;
    let hom = is_homomorphism(f.table(), &power, b)?;
    Ok(DictatorReport {
        homomorphism: hom.holds(),
        ultrafilter: check.ultrafilter,
        dictator: classify_dictator(f, b)?,
        violations: check.violations.iter().map(ToString::to_string).collect(),
        filter: check.filter,
        oligarchs: check.oligarchs,
        decisive: u.labels(),
        hom_violation: hom.violation().cloned(),
    })
}
