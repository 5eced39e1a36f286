use serde::Serialize;

use super::{row_major_decode, AlgebraError, FiniteAlgebra};

pub const DEFAULT_HOM_BUDGET: u64 = 100_000_000;

/// A failure of `h(g(ā)) = g(h(ā))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomViolation {
    pub connective: String,
    /// Argument tuple, as source carrier indices.
    pub args: Vec<usize>,
    /// `h(g^src(ā))`
    pub image: usize,
    /// `g^tgt(h(ā))`
    pub expected: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomCheck {
    Homomorphism,
    Violation(HomViolation),
}

impl HomCheck {
    pub fn holds(&self) -> bool {
        matches!(self, HomCheck::Homomorphism)
    }

    pub fn violation(&self) -> Option<&HomViolation> {
        match self {
            HomCheck::Homomorphism => None,
            HomCheck::Violation(v) => Some(v),
        }
    }
}

/// Source connective index paired with the matching target connective index.
fn connective_pairs(
    src: &FiniteAlgebra,
    tgt: &FiniteAlgebra,
) -> Result<Vec<(usize, usize)>, AlgebraError> {
    if !src.signature().same_symbols(tgt.signature()) {
        return Err(AlgebraError::SignatureMismatch);
    }
    Ok(src
        .signature()
        .connectives()
        .iter()
        .enumerate()
        .map(|(i, c)| (i, tgt.op_index(&c.name).expect("same symbols")))
        .collect())
}

fn check_map_shape(map: &[usize], src: &FiniteAlgebra, tgt: &FiniteAlgebra) -> Result<(), AlgebraError> {
    if map.len() != src.size() {
        return Err(AlgebraError::MapNotTotal {
            expected: src.size(),
            found: map.len(),
        });
    }
    if let Some(&value) = map.iter().find(|&&v| v >= tgt.size()) {
        return Err(AlgebraError::MapOutOfRange {
            value,
            size: tgt.size(),
        });
    }
    Ok(())
}

/// Checks the homomorphism equation for every connective and every argument
/// tuple, connectives in signature order and tuples in row-major order.
pub fn is_homomorphism(
    map: &[usize],
    src: &FiniteAlgebra,
    tgt: &FiniteAlgebra,
) -> Result<HomCheck, AlgebraError> {
    let pairs = connective_pairs(src, tgt)?;
    check_map_shape(map, src, tgt)?;
    let k = src.size();
    for (s_op, t_op) in pairs {
        let table = src.table(s_op);
        let arity = table.arity();
        let mut args = vec![0usize; arity];
        let mut mapped = vec![0usize; arity];
        for (row, &value) in table.values().iter().enumerate() {
            row_major_decode(row, k, &mut args);
            for (m, &a) in mapped.iter_mut().zip(&args) {
                *m = map[a];
            }
            let image = map[value];
            let expected = tgt.apply(t_op, &mapped);
            if image != expected {
                return Ok(HomCheck::Violation(HomViolation {
                    connective: src.signature().connectives()[s_op].name.clone(),
                    args,
                    image,
                    expected,
                }));
            }
        }
    }
    Ok(HomCheck::Homomorphism)
}

/// A map between carriers verified to be a homomorphism.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AlgebraHomomorphism {
    map: Vec<usize>,
}

impl AlgebraHomomorphism {
    pub fn new(map: Vec<usize>, src: &FiniteAlgebra, tgt: &FiniteAlgebra) -> Result<Self, AlgebraError> {
        match is_homomorphism(&map, src, tgt)? {
            HomCheck::Homomorphism => Ok(Self { map }),
            HomCheck::Violation(v) => Err(AlgebraError::NotHomomorphism(v)),
        }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn into_map(self) -> Vec<usize> {
        self.map
    }

    pub fn apply(&self, element: usize) -> usize {
        self.map[element]
    }
}

struct Constraint {
    t_op: usize,
    args: Vec<usize>,
    result: usize,
}

/// All homomorphisms `src → tgt`, in lexicographic order of their tables.
///
/// Depth-first search over the source carrier in index order. Each
/// equation `h(g(ā)) = g(h(ā))` is checked as soon as every element it
/// mentions has been assigned.
pub fn enumerate_homomorphisms(
    src: &FiniteAlgebra,
    tgt: &FiniteAlgebra,
    budget: u64,
) -> Result<Vec<AlgebraHomomorphism>, AlgebraError> {
    let pairs = connective_pairs(src, tgt)?;
    let candidates = (tgt.size() as f64).powf(src.size() as f64);
    if candidates > budget as f64 {
        return Err(AlgebraError::BudgetExceeded { candidates, budget });
    }
    let n = src.size();
    let mut by_last: Vec<Vec<Constraint>> = (0..n).map(|_| Vec::new()).collect();
    for (s_op, t_op) in pairs {
        let table = src.table(s_op);
        let mut args = vec![0usize; table.arity()];
        for (row, &result) in table.values().iter().enumerate() {
            row_major_decode(row, n, &mut args);
            let last = args.iter().copied().chain([result]).max().expect("nonempty");
            by_last[last].push(Constraint {
                t_op,
                args: args.clone(),
                result,
            });
        }
    }

    let mut out = Vec::new();
    let mut map = vec![0usize; n];
    let mut mapped = Vec::new();
    let mut pos = 0usize;
    // map[pos] holds the next value to try at depth `pos`
    loop {
        if map[pos] >= tgt.size() {
            if pos == 0 {
                break;
            }
            map[pos] = 0;
            pos -= 1;
            map[pos] += 1;
            continue;
        }
        let consistent = by_last[pos].iter().all(|c| {
            mapped.clear();
            mapped.extend(c.args.iter().map(|&a| map[a]));
            tgt.apply(c.t_op, &mapped) == map[c.result]
        });
        if !consistent {
            map[pos] += 1;
        } else if pos + 1 == n {
            out.push(AlgebraHomomorphism { map: map.clone() });
            map[pos] += 1;
        } else {
            pos += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{boolean2, encode_tuple, mv_chain, Odometer};

    fn majority3() -> Vec<usize> {
        (0..8).map(|c: usize| usize::from(c.count_ones() >= 2)).collect()
    }

    #[test]
    fn identity_is_a_homomorphism() {
        let b = boolean2();
        assert!(is_homomorphism(&[0, 1], &b, &b).unwrap().holds());
    }

    #[test]
    fn majority_fails_on_join() {
        let b = boolean2();
        let b3 = b.power(3).unwrap();
        let check = is_homomorphism(&majority3(), &b3, &b).unwrap();
        let v = check.violation().expect("majority is not a homomorphism");
        assert_eq!(v.connective, "or");
        assert_eq!(v.args, vec![encode_tuple(&[1, 0, 0], 2), encode_tuple(&[0, 1, 0], 2)]);
        assert_eq!((v.image, v.expected), (1, 0));
    }

    #[test]
    fn projections_are_homomorphisms() {
        for alg in [boolean2(), mv_chain(3).unwrap(), mv_chain(4).unwrap()] {
            for n in 1..=3 {
                let p = alg.power(n).unwrap();
                for i in 0..n {
                    assert!(is_homomorphism(&alg.projection_table(n, i), &p, &alg).unwrap().holds());
                }
            }
        }
    }

    #[test]
    fn rejects_partial_maps() {
        let b = boolean2();
        assert_eq!(
            is_homomorphism(&[0], &b, &b),
            Err(AlgebraError::MapNotTotal { expected: 2, found: 1 })
        );
        assert!(matches!(
            is_homomorphism(&[0, 5], &b, &b),
            Err(AlgebraError::MapOutOfRange { .. })
        ));
        let l3 = mv_chain(3).unwrap();
        assert_eq!(is_homomorphism(&[0, 1], &b, &l3), Err(AlgebraError::SignatureMismatch));
    }

    // Oracle: filter every map through the checker.
    fn brute_force(src: &FiniteAlgebra, tgt: &FiniteAlgebra) -> Vec<Vec<usize>> {
        Odometer::new(src.size(), tgt.size())
            .filter(|m| is_homomorphism(m, src, tgt).unwrap().holds())
            .collect()
    }

    #[test]
    fn boolean_cube_has_three_homomorphisms() {
        let b = boolean2();
        let b3 = b.power(3).unwrap();
        let oracle = brute_force(&b3, &b);
        assert_eq!(oracle.len(), 3);
        let homs: Vec<_> = enumerate_homomorphisms(&b3, &b, DEFAULT_HOM_BUDGET)
            .unwrap()
            .into_iter()
            .map(AlgebraHomomorphism::into_map)
            .collect();
        assert_eq!(homs, oracle);
        let mut projections: Vec<_> = (0..3).map(|i| b.projection_table(3, i)).collect();
        projections.sort();
        assert_eq!(homs, projections);
    }

    #[test]
    fn singleton_power_has_only_identity() {
        let b = boolean2();
        let homs = enumerate_homomorphisms(&b.power(1).unwrap(), &b, DEFAULT_HOM_BUDGET).unwrap();
        assert_eq!(homs.len(), 1);
        assert_eq!(homs[0].map(), &[0, 1]);
    }

    #[test]
    fn mv_square_contains_projections() {
        let l3 = mv_chain(3).unwrap();
        let sq = l3.power(2).unwrap();
        let homs: Vec<_> = enumerate_homomorphisms(&sq, &l3, DEFAULT_HOM_BUDGET)
            .unwrap()
            .into_iter()
            .map(AlgebraHomomorphism::into_map)
            .collect();
        for i in 0..2 {
            assert!(homs.contains(&l3.projection_table(2, i)));
        }
        assert_eq!(homs, brute_force(&sq, &l3));
    }

    #[test]
    fn budget_is_enforced() {
        let l3 = mv_chain(3).unwrap();
        let cube = l3.power(3).unwrap();
        assert!(matches!(
            enumerate_homomorphisms(&cube, &l3, DEFAULT_HOM_BUDGET),
            Err(AlgebraError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn constructor_checks_equation() {
        let b = boolean2();
        let b3 = b.power(3).unwrap();
        assert!(AlgebraHomomorphism::new(b.projection_table(3, 1), &b3, &b).is_ok());
        assert!(matches!(
            AlgebraHomomorphism::new(majority3(), &b3, &b),
            Err(AlgebraError::NotHomomorphism(_))
        ));
    }
}
