//! Finite algebras given by operation tables.
//!
//! Carrier elements are indices `0..size`; labels are for presentation only.
//! Tables are stored row-major with the first argument most significant.
//! Elements of a power `B^N` are tuples encoded little-endian: voter 0 is
//! the least significant digit (see [`encode_tuple`]).

mod builtin;
mod hom;

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::syntax::{Connective, Formula, Signature};

pub use builtin::{
    boolean2, boolean_signature, distributive_lattice, lattice_signature, modal_signature,
    mv_chain, mv_signature, Poset,
};
pub(crate) use builtin::subset_label;
pub use hom::{
    enumerate_homomorphisms, is_homomorphism, AlgebraHomomorphism, HomCheck, HomViolation,
    DEFAULT_HOM_BUDGET,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("variable `{0}` has no value in the valuation")]
    UnboundVariable(String),
    #[error("connective `{0}` is not interpreted by the algebra")]
    UnknownConnective(String),
    #[error("`{symbol}` applied to {found} argument(s), its arity is {expected}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("table for `{symbol}` has {found} entries, expected {expected}")]
    TableShape {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("table for `{symbol}` contains {value}, outside the carrier of size {size}")]
    ValueOutOfRange {
        symbol: String,
        value: usize,
        size: usize,
    },
    #[error("connective `{0}` of the signature has no table")]
    MissingTable(String),
    #[error("the carrier is empty")]
    EmptyCarrier,
    #[error("source and target have different signatures")]
    SignatureMismatch,
    #[error("map has {found} entries but the source carrier has {expected} elements")]
    MapNotTotal { expected: usize, found: usize },
    #[error("map sends an element to {value}, outside the target carrier of size {size}")]
    MapOutOfRange { value: usize, size: usize },
    #[error("not a homomorphism: `{}` fails at arguments {:?}", .0.connective, .0.args)]
    NotHomomorphism(HomViolation),
    #[error("{candidates} candidate maps exceed the budget of {budget}")]
    BudgetExceeded { candidates: f64, budget: u64 },
    #[error("{0}")]
    InvalidParameter(String),
    #[error("malformed algebra description: {0}")]
    Malformed(String),
}

/// One operation table: `values[row_major(args)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpTable {
    arity: usize,
    values: Vec<usize>,
}

impl OpTable {
    pub fn new(arity: usize, values: Vec<usize>) -> Self {
        Self { arity, values }
    }

    pub fn from_fn(arity: usize, size: usize, mut f: impl FnMut(&[usize]) -> usize) -> Self {
        let total = size.pow(arity as u32);
        let mut args = vec![0usize; arity];
        let mut values = Vec::with_capacity(total);
        for idx in 0..total {
            row_major_decode(idx, size, &mut args);
            values.push(f(&args));
        }
        Self { arity, values }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }
}

fn row_major_decode(mut idx: usize, size: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = idx % size;
        idx /= size;
    }
}

fn row_major_index(args: &[usize], size: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

/// Little-endian code of a tuple in `B^N`, `k = |B|`.
pub fn encode_tuple(tuple: &[usize], k: usize) -> usize {
    tuple.iter().rev().fold(0, |acc, &a| acc * k + a)
}

pub fn decode_tuple(mut code: usize, k: usize, n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(code % k);
        code /= k;
    }
    out
}

/// A finite algebra over a signature.
///
/// `class` is an optional label naming the class the algebra is claimed to
/// belong to ("boolean", "mv", "bao-t", ...). Membership is not verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    signature: Signature,
    carrier: Vec<String>,
    tables: Vec<OpTable>,
    class: Option<String>,
}

impl FiniteAlgebra {
    /// `tables` must be given in signature order.
    pub fn new(
        signature: Signature,
        carrier: Vec<String>,
        tables: Vec<OpTable>,
    ) -> Result<Self, AlgebraError> {
        if carrier.is_empty() {
            return Err(AlgebraError::EmptyCarrier);
        }
        if tables.len() != signature.connectives().len() {
            let missing = signature
                .connectives()
                .get(tables.len())
                .map(|c| c.name.clone())
                .unwrap_or_default();
            return Err(AlgebraError::MissingTable(missing));
        }
        let size = carrier.len();
        for (conn, table) in signature.connectives().iter().zip(&tables) {
            let expected = size.pow(conn.arity as u32);
            if table.arity != conn.arity || table.values.len() != expected {
                return Err(AlgebraError::TableShape {
                    symbol: conn.name.clone(),
                    expected,
                    found: table.values.len(),
                });
            }
            if let Some(&value) = table.values.iter().find(|&&v| v >= size) {
                return Err(AlgebraError::ValueOutOfRange {
                    symbol: conn.name.clone(),
                    value,
                    size,
                });
            }
        }
        Ok(Self {
            signature,
            carrier,
            tables,
            class: None,
        })
    }

    pub fn with_class(mut self, class: impl Into<String>) -> Self {
        self.class = Some(class.into());
        self
    }

    pub fn class(&self) -> Option<&str> {
        self.class.as_deref()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.carrier.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.carrier
    }

    pub fn label(&self, element: usize) -> &str {
        &self.carrier[element]
    }

    pub fn element_by_label(&self, label: &str) -> Option<usize> {
        self.carrier.iter().position(|l| l == label)
    }

    pub fn table(&self, op: usize) -> &OpTable {
        &self.tables[op]
    }

    pub fn op_index(&self, symbol: &str) -> Option<usize> {
        self.signature.position(symbol)
    }

    /// Applies the `op`-th connective (signature order).
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        let table = &self.tables[op];
        debug_assert_eq!(table.arity, args.len());
        table.values[row_major_index(args, self.size())]
    }

    pub fn apply_named(&self, symbol: &str, args: &[usize]) -> Result<usize, AlgebraError> {
        let op = self
            .op_index(symbol)
            .ok_or_else(|| AlgebraError::UnknownConnective(symbol.into()))?;
        let arity = self.tables[op].arity;
        if arity != args.len() {
            return Err(AlgebraError::ArityMismatch {
                symbol: symbol.into(),
                expected: arity,
                found: args.len(),
            });
        }
        Ok(self.apply(op, args))
    }

    /// Value of a constant symbol.
    pub fn constant(&self, symbol: &str) -> Option<usize> {
        let op = self.op_index(symbol)?;
        (self.tables[op].arity == 0).then(|| self.tables[op].values[0])
    }

    pub fn constants(&self) -> Vec<(String, usize)> {
        self.signature
            .connectives()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_constant())
            .map(|(i, c)| (c.name.clone(), self.tables[i].values[0]))
            .collect()
    }

    pub fn evaluate(&self, f: &Formula, v: &Valuation) -> Result<usize, AlgebraError> {
        self.evaluate_with(f, &|name| v.get(name))
    }

    /// Structural evaluation with an arbitrary variable lookup.
    pub fn evaluate_with(
        &self,
        f: &Formula,
        lookup: &dyn Fn(&str) -> Option<usize>,
    ) -> Result<usize, AlgebraError> {
        match f {
            Formula::Var(name) => {
                lookup(name).ok_or_else(|| AlgebraError::UnboundVariable(name.clone()))
            }
            Formula::App(symbol, args) => {
                let op = self
                    .op_index(symbol)
                    .ok_or_else(|| AlgebraError::UnknownConnective(symbol.clone()))?;
                let arity = self.tables[op].arity;
                if arity != args.len() {
                    return Err(AlgebraError::ArityMismatch {
                        symbol: symbol.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.evaluate_with(a, lookup)?);
                }
                Ok(self.apply(op, &vals))
            }
        }
    }

    /// The partial order of the lattice reduct, if the algebra has one.
    ///
    /// Read off a binary `and`/`meet` (`a ≤ b` iff `a∧b = a`) or, failing
    /// that, `or`/`join` (`a ≤ b` iff `a∨b = b`). Returns `None` when no such
    /// connective exists or the induced relation is not a partial order.
    pub fn lattice_order(&self) -> Option<Vec<Vec<bool>>> {
        let k = self.size();
        let by_meet = ["and", "meet"]
            .iter()
            .find_map(|s| self.op_index(s).filter(|&i| self.tables[i].arity == 2));
        let by_join = ["or", "join"]
            .iter()
            .find_map(|s| self.op_index(s).filter(|&i| self.tables[i].arity == 2));
        let leq: Vec<Vec<bool>> = if let Some(op) = by_meet {
            (0..k)
                .map(|a| (0..k).map(|b| self.apply(op, &[a, b]) == a).collect())
                .collect()
        } else if let Some(op) = by_join {
            (0..k)
                .map(|a| (0..k).map(|b| self.apply(op, &[a, b]) == b).collect())
                .collect()
        } else {
            return None;
        };
        for a in 0..k {
            if !leq[a][a] {
                return None;
            }
            for b in 0..k {
                if a != b && leq[a][b] && leq[b][a] {
                    return None;
                }
                for c in 0..k {
                    if leq[a][b] && leq[b][c] && !leq[a][c] {
                        return None;
                    }
                }
            }
        }
        Some(leq)
    }

    /// The direct power `B^N` with coordinatewise operations.
    pub fn power(&self, n: usize) -> Result<FiniteAlgebra, AlgebraError> {
        if n == 0 {
            return Err(AlgebraError::InvalidParameter(
                "electorate size must be at least 1".into(),
            ));
        }
        let k = self.size();
        let size = k
            .checked_pow(n as u32)
            .filter(|&s| s <= 1 << 20)
            .ok_or_else(|| AlgebraError::InvalidParameter(format!("{k}^{n} elements is too large")))?;
        for conn in self.signature.connectives() {
            if size.checked_pow(conn.arity as u32).map_or(true, |t| t > 1 << 26) {
                return Err(AlgebraError::InvalidParameter(format!(
                    "table for `{}` in the {k}^{n} power is too large",
                    conn.name
                )));
            }
        }
        let tuples: Vec<Vec<usize>> = (0..size).map(|c| decode_tuple(c, k, n)).collect();
        let carrier = tuples
            .iter()
            .map(|t| {
                let parts: Vec<&str> = t.iter().map(|&a| self.label(a)).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let tables = self
            .signature
            .connectives()
            .iter()
            .enumerate()
            .map(|(op, conn)| {
                let mut coords = vec![0usize; conn.arity];
                OpTable::from_fn(conn.arity, size, |args| {
                    let out: Vec<usize> = (0..n)
                        .map(|i| {
                            for (slot, &a) in coords.iter_mut().zip(args) {
                                *slot = tuples[a][i];
                            }
                            self.apply(op, &coords)
                        })
                        .collect();
                    encode_tuple(&out, k)
                })
            })
            .collect();
        let alg = FiniteAlgebra::new(self.signature.clone(), carrier, tables)?;
        Ok(match &self.class {
            Some(c) => alg.with_class(format!("{c}^{n}")),
            None => alg,
        })
    }

    /// The `i`-th projection `B^N → B` as a table over the power's carrier.
    pub fn projection_table(&self, n: usize, i: usize) -> Vec<usize> {
        let k = self.size();
        (0..k.pow(n as u32)).map(|c| decode_tuple(c, k, n)[i]).collect()
    }

    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| AlgebraError::Malformed(e.to_string()))?;
        Self::from_json_value(&value)
    }

    /// Reads `{"signature": {...}, "carrier": [...], "ops": {...}}`.
    ///
    /// Each table is a nested array indexed by the arguments in order; any
    /// nesting that flattens row-major to `size^arity` entries is accepted.
    pub fn from_json_value(value: &Value) -> Result<Self, AlgebraError> {
        let malformed = |m: &str| AlgebraError::Malformed(m.to_string());
        let obj = value.as_object().ok_or_else(|| malformed("expected an object"))?;
        let signature: Signature = serde_json::from_value(
            obj.get("signature")
                .cloned()
                .ok_or_else(|| malformed("missing `signature`"))?,
        )
        .map_err(|e| AlgebraError::Malformed(e.to_string()))?;
        let carrier: Vec<String> = obj
            .get("carrier")
            .and_then(Value::as_array)
            .ok_or_else(|| malformed("missing `carrier` array"))?
            .iter()
            .map(|v| match v {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(malformed("carrier labels must be strings")),
            })
            .collect::<Result<_, _>>()?;
        let ops = obj
            .get("ops")
            .and_then(Value::as_object)
            .ok_or_else(|| malformed("missing `ops` object"))?;
        let mut tables = Vec::new();
        for conn in signature.connectives() {
            let raw = ops
                .get(&conn.name)
                .ok_or_else(|| AlgebraError::MissingTable(conn.name.clone()))?;
            let mut flat = Vec::new();
            flatten_table(raw, &mut flat).map_err(|m| {
                AlgebraError::Malformed(format!("table for `{}`: {m}", conn.name))
            })?;
            tables.push(OpTable::new(conn.arity, flat));
        }
        let alg = FiniteAlgebra::new(signature, carrier, tables)?;
        Ok(match obj.get("class").and_then(Value::as_str) {
            Some(c) => alg.with_class(c),
            None => alg,
        })
    }

    pub fn to_json_value(&self) -> Value {
        let k = self.size();
        let mut ops = serde_json::Map::new();
        for (conn, table) in self.signature.connectives().iter().zip(&self.tables) {
            ops.insert(conn.name.clone(), nest_table(&table.values, k, conn.arity));
        }
        let mut obj = json!({
            "signature": self.signature,
            "carrier": self.carrier,
            "ops": Value::Object(ops),
        });
        if let Some(c) = &self.class {
            obj["class"] = json!(c);
        }
        obj
    }
}

fn flatten_table(v: &Value, out: &mut Vec<usize>) -> Result<(), String> {
    match v {
        Value::Number(n) => {
            let x = n.as_u64().ok_or("entries must be nonnegative integers")?;
            out.push(x as usize);
            Ok(())
        }
        Value::Array(items) => items.iter().try_for_each(|i| flatten_table(i, out)),
        _ => Err("entries must be integers or arrays".into()),
    }
}

fn nest_table(values: &[usize], k: usize, arity: usize) -> Value {
    match arity {
        0 => json!([values[0]]),
        1 => Value::Array(values.iter().map(|v| json!([v])).collect()),
        2 => Value::Array(values.chunks(k).map(|row| json!(row)).collect()),
        _ => Value::Array(
            values
                .chunks(k.pow(arity as u32 - 1))
                .map(|chunk| nest_table(chunk, k, arity - 1))
                .collect(),
        ),
    }
}

/// A map from variable names to carrier elements.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(BTreeMap<String, usize>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, value: usize) -> Self {
        self.0.insert(var.into(), value);
        self
    }

    pub fn insert(&mut self, var: impl Into<String>, value: usize) {
        self.0.insert(var.into(), value);
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.0.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &usize)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, usize)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (String, usize)>>(iter: T) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

/// Every valuation of `vars` into a carrier of size `k`, lexicographically
/// (the first variable varies slowest).
pub fn valuations(vars: &[String], k: usize) -> impl Iterator<Item = Valuation> + '_ {
    Odometer::new(vars.len(), k).map(move |digits| {
        vars.iter().cloned().zip(digits.iter().copied()).collect()
    })
}

/// Counts through `base^len` digit vectors, most significant first.
#[derive(Debug, Clone)]
pub struct Odometer {
    digits: Vec<usize>,
    base: usize,
    done: bool,
}

impl Odometer {
    pub fn new(len: usize, base: usize) -> Self {
        Self {
            digits: vec![0; len],
            base,
            done: base == 0 && len > 0,
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.digits.clone();
        self.done = true;
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.base {
                self.done = false;
                break;
            }
            *d = 0;
        }
        Some(out)
    }
}

pub(crate) fn conn(name: &str, arity: usize) -> Connective {
    Connective::new(name, arity)
}
