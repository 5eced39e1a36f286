use serde::{Deserialize, Serialize};

use super::{conn, AlgebraError, FiniteAlgebra, OpTable};
use crate::syntax::Signature;

/// `bot, top, not, or, and, impl`.
pub fn boolean_signature() -> Signature {
    Signature::new(vec![
        conn("bot", 0),
        conn("top", 0),
        conn("not", 1),
        conn("or", 2),
        conn("and", 2),
        conn("impl", 2),
    ])
    .expect("static signature")
}

/// The Boolean signature extended with a unary `box`.
pub fn modal_signature() -> Signature {
    let mut cs = boolean_signature().connectives().to_vec();
    cs.push(conn("box", 1));
    Signature::new(cs).expect("static signature")
}

/// `bot, top, not, oplus, odot, impl, and, or`.
pub fn mv_signature() -> Signature {
    Signature::new(vec![
        conn("bot", 0),
        conn("top", 0),
        conn("not", 1),
        conn("oplus", 2),
        conn("odot", 2),
        conn("impl", 2),
        conn("and", 2),
        conn("or", 2),
    ])
    .expect("static signature")
}

/// Bounded lattices: `bot, top, and, or`.
pub fn lattice_signature() -> Signature {
    Signature::new(vec![conn("bot", 0), conn("top", 0), conn("and", 2), conn("or", 2)])
        .expect("static signature")
}

/// The two-element Boolean algebra, `0 < 1`.
pub fn boolean2() -> FiniteAlgebra {
    let sig = boolean_signature();
    let tables = vec![
        OpTable::new(0, vec![0]),
        OpTable::new(0, vec![1]),
        OpTable::from_fn(1, 2, |a| 1 - a[0]),
        OpTable::from_fn(2, 2, |a| a[0] | a[1]),
        OpTable::from_fn(2, 2, |a| a[0] & a[1]),
        OpTable::from_fn(2, 2, |a| (1 - a[0]) | a[1]),
    ];
    FiniteAlgebra::new(sig, vec!["0".into(), "1".into()], tables)
        .expect("static algebra")
        .with_class("boolean")
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn fraction_label(num: usize, den: usize) -> String {
    if num == 0 {
        return "0".into();
    }
    if num == den {
        return "1".into();
    }
    let g = gcd(num, den);
    format!("{}/{}", num / g, den / g)
}

/// The Łukasiewicz chain `Ł_k` on `{0, 1/(k-1), ..., 1}`.
///
/// Element `i` stands for `i/(k-1)`, so all operations are integer
/// arithmetic on indices with `top = k-1`.
pub fn mv_chain(k: usize) -> Result<FiniteAlgebra, AlgebraError> {
    if k < 2 {
        return Err(AlgebraError::InvalidParameter(format!(
            "an MV chain needs at least 2 elements, got {k}"
        )));
    }
    let top = k - 1;
    let tables = vec![
        OpTable::new(0, vec![0]),
        OpTable::new(0, vec![top]),
        OpTable::from_fn(1, k, |a| top - a[0]),
        OpTable::from_fn(2, k, |a| (a[0] + a[1]).min(top)),
        OpTable::from_fn(2, k, |a| (a[0] + a[1]).saturating_sub(top)),
        OpTable::from_fn(2, k, |a| (top - a[0] + a[1]).min(top)),
        OpTable::from_fn(2, k, |a| a[0].min(a[1])),
        OpTable::from_fn(2, k, |a| a[0].max(a[1])),
    ];
    let carrier = (0..k).map(|i| fraction_label(i, top)).collect();
    Ok(FiniteAlgebra::new(mv_signature(), carrier, tables)?.with_class("mv"))
}

/// A finite poset given by generating pairs `a ≤ b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poset {
    pub size: usize,
    pub leq: Vec<(usize, usize)>,
}

impl Poset {
    pub fn chain(n: usize) -> Self {
        Self {
            size: n,
            leq: (1..n).map(|i| (i - 1, i)).collect(),
        }
    }

    pub fn antichain(n: usize) -> Self {
        Self {
            size: n,
            leq: Vec::new(),
        }
    }

    fn closure(&self) -> Result<Vec<Vec<bool>>, AlgebraError> {
        let n = self.size;
        let mut r = vec![vec![false; n]; n];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in &self.leq {
            if a >= n || b >= n {
                return Err(AlgebraError::InvalidParameter(format!(
                    "poset pair ({a},{b}) outside 0..{n}"
                )));
            }
            r[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && r[i][j] && r[j][i] {
                    return Err(AlgebraError::InvalidParameter(format!(
                        "poset relation is not antisymmetric on {i} and {j}"
                    )));
                }
            }
        }
        Ok(r)
    }
}

/// The bounded distributive lattice of down-sets of a finite poset.
///
/// Every finite distributive lattice arises this way. Elements are sorted
/// by their bitmask, so `∅` is element 0 and the full set is the last.
pub fn distributive_lattice(poset: &Poset) -> Result<FiniteAlgebra, AlgebraError> {
    if poset.size > 12 {
        return Err(AlgebraError::InvalidParameter(
            "posets with more than 12 points are not supported".into(),
        ));
    }
    let leq = poset.closure()?;
    let n = poset.size;
    let downsets: Vec<u32> = (0u32..1 << n)
        .filter(|&s| {
            (0..n).all(|b| s & (1 << b) == 0 || (0..n).all(|a| !leq[a][b] || s & (1 << a) != 0))
        })
        .collect();
    let index = |s: u32| downsets.binary_search(&s).expect("down-sets closed under ∩, ∪");
    let k = downsets.len();
    let tables = vec![
        OpTable::new(0, vec![0]),
        OpTable::new(0, vec![k - 1]),
        OpTable::from_fn(2, k, |a| index(downsets[a[0]] & downsets[a[1]])),
        OpTable::from_fn(2, k, |a| index(downsets[a[0]] | downsets[a[1]])),
    ];
    let carrier = downsets.iter().map(|&s| subset_label(s, n)).collect();
    Ok(FiniteAlgebra::new(lattice_signature(), carrier, tables)?.with_class("distributive-lattice"))
}

pub(crate) fn subset_label(mask: u32, n: usize) -> String {
    let items: Vec<String> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}
