//! Signatures, formulas over a signature, the s-expression reader/printer,
//! substitutions and depth-bounded closure under the connectives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A connective symbol together with its arity. Arity 0 entries are constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Connective {
    pub name: String,
    pub arity: usize,
}

impl Connective {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Self {
            name: name.into(),
            arity,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.arity == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("connective `{0}` is declared more than once")]
    DuplicateSymbol(String),
    #[error("connective name `{0}` is not a valid symbol")]
    InvalidSymbol(String),
}

/// A finite propositional language: an ordered list of connectives with
/// pairwise distinct names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Signature {
    connectives: Vec<Connective>,
    #[serde(skip)]
    max_arity: usize,
}

#[derive(Deserialize)]
struct RawSignature {
    connectives: Vec<Connective>,
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawSignature::deserialize(deserializer)?;
        Signature::new(raw.connectives).map_err(serde::de::Error::custom)
    }
}

impl Signature {
    pub fn new(connectives: Vec<Connective>) -> Result<Self, SignatureError> {
        let mut seen = BTreeSet::new();
        for c in &connectives {
            if c.name.is_empty() || c.name.chars().any(|ch| ch.is_whitespace() || ch == '(' || ch == ')')
            {
                return Err(SignatureError::InvalidSymbol(c.name.clone()));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(SignatureError::DuplicateSymbol(c.name.clone()));
            }
        }
        let max_arity = connectives.iter().map(|c| c.arity).max().unwrap_or(0);
        Ok(Self {
            connectives,
            max_arity,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn connectives(&self) -> &[Connective] {
        &self.connectives
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.connectives.iter().position(|c| c.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&Connective> {
        self.connectives.iter().find(|c| c.name == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.get(name).map(|c| c.arity)
    }

    pub fn constants(&self) -> impl Iterator<Item = &Connective> {
        self.connectives.iter().filter(|c| c.is_constant())
    }

    /// Two signatures with the same connectives, ignoring declaration order.
    pub fn same_symbols(&self, other: &Signature) -> bool {
        let a: BTreeSet<_> = self.connectives.iter().collect();
        let b: BTreeSet<_> = other.connectives.iter().collect();
        a == b
    }
}

/// A term over a signature. Equality is syntactic.
///
/// The derived order puts variables before applications, compares
/// applications by symbol and then by children; it is the order used
/// wherever a deterministic choice between formulas is needed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(String),
    App(String, Vec<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Formula>) -> Self {
        Formula::App(symbol.into(), args)
    }

    pub fn constant(symbol: impl Into<String>) -> Self {
        Formula::App(symbol.into(), Vec::new())
    }

    pub fn unary(symbol: impl Into<String>, arg: Formula) -> Self {
        Formula::App(symbol.into(), vec![arg])
    }

    pub fn binary(symbol: impl Into<String>, lhs: Formula, rhs: Formula) -> Self {
        Formula::App(symbol.into(), vec![lhs, rhs])
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Formula::Var(name) => Some(name),
            Formula::App(..) => None,
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    pub(crate) fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(name) => {
                out.insert(name.clone());
            }
            Formula::App(_, args) => args.iter().for_each(|a| a.collect_variables(out)),
        }
    }

    /// Nesting depth of connectives; variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::App(_, args) if args.is_empty() => 0,
            Formula::App(_, args) => 1 + args.iter().map(Formula::depth).max().unwrap_or(0),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) => 1,
            Formula::App(_, args) => 1 + args.iter().map(Formula::size).sum::<usize>(),
        }
    }

    /// Checks every application node against the signature.
    pub fn check(&self, sig: &Signature) -> Result<(), ParseError> {
        match self {
            Formula::Var(_) => Ok(()),
            Formula::App(symbol, args) => {
                let expected = sig.arity(symbol).ok_or_else(|| ParseError::UnknownSymbol {
                    pos: 0,
                    symbol: symbol.clone(),
                })?;
                if expected != args.len() {
                    return Err(ParseError::ArityMismatch {
                        pos: 0,
                        symbol: symbol.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
        }
    }

    pub fn substitute(&self, s: &Substitution) -> Formula {
        match self {
            Formula::Var(name) => s.get(name).cloned().unwrap_or_else(|| self.clone()),
            Formula::App(symbol, args) => {
                Formula::App(symbol.clone(), args.iter().map(|a| a.substitute(s)).collect())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(name) => write!(f, "{name}"),
            Formula::App(symbol, args) => {
                write!(f, "({symbol}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn is_valid_varname(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected end of input at byte {pos}")]
    UnexpectedEnd { pos: usize },
    #[error("unexpected `{found}` at byte {pos}")]
    UnexpectedToken { pos: usize, found: String },
    #[error("unknown symbol `{symbol}` at byte {pos}")]
    UnknownSymbol { pos: usize, symbol: String },
    #[error("`{symbol}` at byte {pos} takes {expected} argument(s), found {found}")]
    ArityMismatch {
        pos: usize,
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("trailing input at byte {pos}")]
    TrailingInput { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<(usize, Token<'_>)> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push((i, Token::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Token::Close));
                i += 1;
            }
            b if b.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                // atoms may contain multi-byte characters; advance to a char boundary
                while !text.is_char_boundary(i) {
                    i += 1;
                }
                out.push((start, Token::Atom(&text[start..i])));
            }
        }
    }
    out
}

struct Parser<'a, 's> {
    tokens: Vec<(usize, Token<'a>)>,
    cursor: usize,
    end: usize,
    sig: &'s Signature,
}

impl<'a> Parser<'a, '_> {
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let Some((pos, tok)) = self.tokens.get(self.cursor).cloned() else {
            return Err(ParseError::UnexpectedEnd { pos: self.end });
        };
        self.cursor += 1;
        match tok {
            Token::Close => Err(ParseError::UnexpectedToken {
                pos,
                found: ")".into(),
            }),
            Token::Atom(atom) => match self.sig.arity(atom) {
                Some(0) => Ok(Formula::constant(atom)),
                Some(expected) => Err(ParseError::ArityMismatch {
                    pos,
                    symbol: atom.into(),
                    expected,
                    found: 0,
                }),
                None if is_valid_varname(atom) => Ok(Formula::var(atom)),
                None => Err(ParseError::UnknownSymbol {
                    pos,
                    symbol: atom.into(),
                }),
            },
            Token::Open => {
                let (sym_pos, symbol) = match self.tokens.get(self.cursor).cloned() {
                    Some((p, Token::Atom(a))) => (p, a),
                    Some((p, Token::Open)) => {
                        return Err(ParseError::UnexpectedToken {
                            pos: p,
                            found: "(".into(),
                        })
                    }
                    Some((p, Token::Close)) => {
                        return Err(ParseError::UnexpectedToken {
                            pos: p,
                            found: ")".into(),
                        })
                    }
                    None => return Err(ParseError::UnexpectedEnd { pos: self.end }),
                };
                self.cursor += 1;
                let expected = self.sig.arity(symbol).ok_or_else(|| ParseError::UnknownSymbol {
                    pos: sym_pos,
                    symbol: symbol.into(),
                })?;
                let mut args = Vec::new();
                loop {
                    match self.tokens.get(self.cursor) {
                        Some((_, Token::Close)) => {
                            self.cursor += 1;
                            break;
                        }
                        Some(_) => args.push(self.formula()?),
                        None => return Err(ParseError::UnexpectedEnd { pos: self.end }),
                    }
                }
                if args.len() != expected {
                    return Err(ParseError::ArityMismatch {
                        pos,
                        symbol: symbol.into(),
                        expected,
                        found: args.len(),
                    });
                }
                Ok(Formula::App(symbol.into(), args))
            }
        }
    }
}

/// Reads one formula in prefix s-expression syntax.
///
/// `formula := VARNAME | "(" SYMBOL formula* ")"`. A bare atom naming a
/// constant of `sig` is that constant; any other bare atom must be a
/// variable name.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(text),
        cursor: 0,
        end: text.len(),
        sig,
    };
    let f = parser.formula()?;
    if let Some((pos, _)) = parser.tokens.get(parser.cursor) {
        return Err(ParseError::TrailingInput { pos: *pos });
    }
    Ok(f)
}

/// A finite map from variable names to formulas, applied homomorphically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<String, Formula>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, f: Formula) -> Self {
        self.0.insert(var.into(), f);
        self
    }

    pub fn insert(&mut self, var: impl Into<String>, f: Formula) {
        self.0.insert(var.into(), f);
    }

    pub fn get(&self, var: &str) -> Option<&Formula> {
        self.0.get(var)
    }

    /// `self` followed by `then`: applying the result equals applying
    /// `self` and then `then`.
    pub fn then(&self, then: &Substitution) -> Substitution {
        let mut out: BTreeMap<String, Formula> = self
            .0
            .iter()
            .map(|(k, v)| (k.clone(), v.substitute(then)))
            .collect();
        for (k, v) in &then.0 {
            out.entry(k.clone()).or_insert_with(|| v.clone());
        }
        Substitution(out)
    }
}

impl FromIterator<(String, Formula)> for Substitution {
    fn from_iter<T: IntoIterator<Item = (String, Formula)>>(iter: T) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

pub fn apply_substitution(f: &Formula, s: &Substitution) -> Formula {
    f.substitute(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("closure at depth {depth} exceeds the budget of {budget} formulas")]
pub struct ClosureBudgetExceeded {
    pub depth: usize,
    pub budget: usize,
}

pub const DEFAULT_CLOSURE_BUDGET: usize = 500_000;

/// `X` closed under the connectives of `sig` up to `depth` rounds.
///
/// Depth 0 is `X` plus every constant; each further round adds all
/// applications whose arguments come from the previous round.
pub fn bounded_closure(
    formulas: &BTreeSet<Formula>,
    sig: &Signature,
    depth: usize,
) -> BTreeSet<Formula> {
    bounded_closure_within(formulas, sig, depth, usize::MAX)
        .expect("unbounded closure cannot exceed its budget")
}

pub fn bounded_closure_within(
    formulas: &BTreeSet<Formula>,
    sig: &Signature,
    depth: usize,
    budget: usize,
) -> Result<BTreeSet<Formula>, ClosureBudgetExceeded> {
    let mut current: BTreeSet<Formula> = formulas.clone();
    current.extend(sig.constants().map(|c| Formula::constant(c.name.clone())));
    if current.len() > budget {
        return Err(ClosureBudgetExceeded { depth: 0, budget });
    }
    for round in 1..=depth {
        let base: Vec<Formula> = current.iter().cloned().collect();
        let mut next = current.clone();
        for conn in sig.connectives().iter().filter(|c| c.arity > 0) {
            let mut idx = vec![0usize; conn.arity];
            'tuples: loop {
                let args = idx.iter().map(|&i| base[i].clone()).collect();
                next.insert(Formula::App(conn.name.clone(), args));
                if next.len() > budget {
                    return Err(ClosureBudgetExceeded {
                        depth: round,
                        budget,
                    });
                }
                for slot in (0..conn.arity).rev() {
                    idx[slot] += 1;
                    if idx[slot] < base.len() {
                        continue 'tuples;
                    }
                    idx[slot] = 0;
                }
                break;
            }
        }
        current = next;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boolean() -> Signature {
        Signature::new(vec![
            Connective::new("bot", 0),
            Connective::new("top", 0),
            Connective::new("not", 1),
            Connective::new("or", 2),
            Connective::new("and", 2),
        ])
        .unwrap()
    }

    fn x(i: usize) -> Formula {
        Formula::var(format!("x{i}"))
    }

    #[test]
    fn parses_nested_application() {
        let f = parse_formula("(or x1 (not x2))", &boolean()).unwrap();
        assert_eq!(f, Formula::binary("or", x(1), Formula::unary("not", x(2))));
        assert_eq!(parse_formula("x1", &boolean()).unwrap(), x(1));
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let err = parse_formula("(and x1)", &boolean()).unwrap_err();
        assert!(matches!(
            err,
            ParseError::ArityMismatch { expected: 2, found: 1, .. }
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let sig = boolean();
        assert_eq!(
            parse_formula("(xor x1 x2)", &sig).unwrap_err(),
            ParseError::UnknownSymbol { pos: 1, symbol: "xor".into() }
        );
        assert_eq!(
            parse_formula("(or x1 x2", &sig).unwrap_err(),
            ParseError::UnexpectedEnd { pos: 9 }
        );
        assert_eq!(
            parse_formula("x1 x2", &sig).unwrap_err(),
            ParseError::TrailingInput { pos: 3 }
        );
        assert!(matches!(
            parse_formula("1x", &sig).unwrap_err(),
            ParseError::UnknownSymbol { .. }
        ));
        assert!(matches!(
            parse_formula(")", &sig).unwrap_err(),
            ParseError::UnexpectedToken { pos: 0, .. }
        ));
        assert!(matches!(
            parse_formula("not", &sig).unwrap_err(),
            ParseError::ArityMismatch { expected: 1, found: 0, .. }
        ));
    }

    #[test]
    fn constants_parse_bare_or_parenthesized() {
        let sig = boolean();
        assert_eq!(parse_formula("top", &sig).unwrap(), Formula::constant("top"));
        assert_eq!(parse_formula("( top )", &sig).unwrap(), Formula::constant("top"));
        assert_eq!(Formula::constant("top").to_string(), "(top)");
    }

    #[test]
    fn duplicate_connectives_rejected() {
        let err = Signature::new(vec![Connective::new("or", 2), Connective::new("or", 1)]);
        assert_eq!(err, Err(SignatureError::DuplicateSymbol("or".into())));
    }

    #[test]
    fn signature_json() {
        let sig = Signature::from_json(r#"{"connectives":[{"name":"or","arity":2},{"name":"c","arity":0}]}"#)
            .unwrap();
        assert_eq!(sig.max_arity(), 2);
        assert_eq!(sig.constants().count(), 1);
        assert!(Signature::from_json(r#"{"connectives":[{"name":"or","arity":2},{"name":"or","arity":2}]}"#).is_err());
    }

    #[test]
    fn substitution_examples() {
        let s = Substitution::new().with("x1", Formula::unary("not", x(2)));
        assert_eq!(x(1).substitute(&s), Formula::unary("not", x(2)));
        let s = Substitution::new().with("x1", x(2));
        assert_eq!(
            Formula::binary("or", x(1), x(1)).substitute(&s),
            Formula::binary("or", x(2), x(2))
        );
        let c = Formula::constant("top");
        assert_eq!(c.substitute(&s), c);
        assert_eq!(x(3).substitute(&s), x(3));
    }

    #[test]
    fn closure_depth_zero_adds_constants() {
        let xs: BTreeSet<_> = [x(1)].into();
        let got = bounded_closure(&xs, &boolean(), 0);
        let want: BTreeSet<_> = [x(1), Formula::constant("bot"), Formula::constant("top")].into();
        assert_eq!(got, want);
    }

    #[test]
    fn closure_small_signatures() {
        let neg = Signature::new(vec![Connective::new("not", 1)]).unwrap();
        let got = bounded_closure(&[x(1)].into(), &neg, 1);
        assert_eq!(got, [x(1), Formula::unary("not", x(1))].into());

        let or = Signature::new(vec![Connective::new("or", 2)]).unwrap();
        let got = bounded_closure(&[x(1), x(2)].into(), &or, 1);
        let want: BTreeSet<_> = [
            x(1),
            x(2),
            Formula::binary("or", x(1), x(1)),
            Formula::binary("or", x(1), x(2)),
            Formula::binary("or", x(2), x(1)),
            Formula::binary("or", x(2), x(2)),
        ]
        .into();
        assert_eq!(got, want);
    }

    #[test]
    fn closure_budget() {
        let r = bounded_closure_within(&[x(1), x(2)].into(), &boolean(), 3, 1000);
        assert!(r.is_err());
    }

    #[test]
    fn depth_and_variables() {
        let f = parse_formula("(or x2 (not (and x1 top)))", &boolean()).unwrap();
        assert_eq!(f.depth(), 3);
        assert_eq!(f.size(), 6);
        assert_eq!(f.variables(), ["x1".to_string(), "x2".to_string()].into());
    }
}
