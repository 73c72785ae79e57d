//! Text format for reaction networks.
//!
//! ```text
//! # DNA duplex formation
//! 2 S <-> D : k+=k1, k-=k2, tau+=t1, tau-=t2
//! D -> 0    : k=k3
//! 0 <-> S   : k+=k4, k-=k5
//! k1 = 0.5
//! ```
//!
//! Each non-empty line is a reaction, a parameter binding `name = number`,
//! or a species declaration `species A, B, C` that fixes species order.
//! Coefficients are exact rationals written as `3`, `1/2` or `0.5`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use num::{BigInt, One, Zero};
use thiserror::Error;

use crate::exact::{format_rational, Rational};
use crate::netcore::{Binding, Complex, NetworkError, Reaction, ReactionNetwork};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("negative stoichiometric coefficient")]
    NegativeCoefficient,
    #[error("zero stoichiometric coefficient")]
    ZeroCoefficient,
    #[error("reactant equals product")]
    ReactantEqualsProduct,
    #[error("`{0}=` is ambiguous on a reversible reaction; use `{0}+=` and `{0}-=`")]
    AmbiguousReversible(String),
    #[error("`{0}` only applies to reversible reactions")]
    DirectionalOnIrreversible(String),
    #[error("attribute `{0}` given twice")]
    DuplicateAttribute(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("rate constant must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("delay must be nonnegative, got {0}")]
    NegativeDelay(f64),
    #[error("parameter `{0}` bound twice")]
    DuplicateBinding(String),
    #[error("species `{0}` declared twice")]
    DuplicateSpecies(String),
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error(transparent)]
    Network(NetworkError),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Number(f64),
    Ident(String),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Attributes {
    pub k: Option<Value>,
    pub k_forward: Option<Value>,
    pub k_backward: Option<Value>,
    pub tau: Option<Value>,
    pub tau_forward: Option<Value>,
    pub tau_backward: Option<Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReactionStatement {
    pub line: usize,
    pub reactant: Complex,
    pub product: Complex,
    pub reversible: bool,
    pub attrs: Attributes,
}

/// A parsed file before parameter resolution.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NetworkFile {
    pub species: Vec<String>,
    pub statements: Vec<ReactionStatement>,
    pub bindings: BTreeMap<String, f64>,
    binding_lines: HashMap<String, usize>,
}

impl NetworkFile {
    /// Symbolic parameters referenced by reactions but absent from the bindings.
    pub fn free_parameters(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .statements
            .iter()
            .flat_map(|s| {
                let a = &s.attrs;
                [&a.k, &a.k_forward, &a.k_backward, &a.tau, &a.tau_forward, &a.tau_backward]
            })
            .filter_map(|v| match v {
                Some(Value::Ident(n)) if !self.bindings.contains_key(n) => Some(n.clone()),
                _ => None,
            })
            .collect();
        names.sort();
        names.dedup();
        names
    }

    pub fn to_network(&self) -> Result<ReactionNetwork, ParseError> {
        let mut reactions = Vec::new();
        let mut pairs = Vec::new();
        let mut rate_names = HashSet::new();
        let mut delay_names = HashSet::new();
        for st in &self.statements {
            let mut make = |reactant: &Complex, product: &Complex, k: &Option<Value>, tau: &Option<Value>| {
                let rate = self.binding(k);
                let delay = if tau.is_some() { self.binding(tau) } else { Binding::no_delay() };
                if let Some(n) = &rate.name {
                    rate_names.insert(n.clone());
                }
                if let Some(n) = &delay.name {
                    delay_names.insert(n.clone());
                }
                Reaction::new(reactant.clone(), product.clone()).with_rate(rate).with_delay(delay)
            };
            let a = &st.attrs;
            if st.reversible {
                let r = reactions.len();
                reactions.push(make(&st.reactant, &st.product, &a.k_forward, &a.tau_forward));
                reactions.push(make(&st.product, &st.reactant, &a.k_backward, &a.tau_backward));
                pairs.push((r, r + 1));
            } else {
                reactions.push(make(&st.reactant, &st.product, &a.k, &a.tau));
            }
        }
        for (name, &v) in &self.bindings {
            let line = self.binding_lines.get(name).copied().unwrap_or(0);
            if rate_names.contains(name) && v <= 0.0 {
                return Err(ParseError { line, column: 1, kind: ParseErrorKind::NonPositiveRate(v) });
            }
            if delay_names.contains(name) && v < 0.0 {
                return Err(ParseError { line, column: 1, kind: ParseErrorKind::NegativeDelay(v) });
            }
        }
        ReactionNetwork::with_pairs(self.species.clone(), reactions, pairs, true).map_err(|e| {
            let line = match &e {
                NetworkError::ReactantEqualsProduct(r)
                | NetworkError::NonPositiveRate { reaction: r, .. }
                | NetworkError::NegativeDelay { reaction: r, .. } => self.line_of_reaction(*r),
                _ => 0,
            };
            ParseError { line, column: 1, kind: ParseErrorKind::Network(e) }
        })
    }

    fn binding(&self, v: &Option<Value>) -> Binding {
        match v {
            None => Binding::free(),
            Some(Value::Number(x)) => Binding::numeric(*x),
            Some(Value::Ident(n)) => Binding { name: Some(n.clone()), value: self.bindings.get(n).copied() },
        }
    }

    fn line_of_reaction(&self, r: usize) -> usize {
        let mut k = 0;
        for st in &self.statements {
            k += if st.reversible { 2 } else { 1 };
            if r < k {
                return st.line;
            }
        }
        0
    }
}

pub fn parse_network(text: &str) -> Result<ReactionNetwork, ParseError> {
    parse_network_file(text)?.to_network()
}

pub fn parse_network_file(text: &str) -> Result<NetworkFile, ParseError> {
    let mut file = NetworkFile::default();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor::new(content, line_no);
        if content.contains("->") {
            let st = cur.reaction(&mut file.species, &mut index)?;
            file.statements.push(st);
        } else if cur.keyword("species") {
            cur.species_declaration(&mut file.species, &mut index)?;
        } else {
            let (name, value) = cur.binding()?;
            if file.bindings.insert(name.clone(), value).is_some() {
                return Err(ParseError { line: line_no, column: 1, kind: ParseErrorKind::DuplicateBinding(name) });
            }
            file.binding_lines.insert(name, line_no);
        }
    }
    Ok(file)
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(s: &str, line: usize) -> Self {
        Self { chars: s.chars().collect(), pos: 0, line }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        self.err_at(self.pos, kind)
    }

    fn err_at(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: pos + 1, kind }
    }

    fn syntax(&self, msg: &str) -> ParseError {
        self.err(ParseErrorKind::Syntax(msg.to_string()))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        let save = self.pos;
        match self.ident() {
            Some(id) if id == kw && self.peek().is_none_or(char::is_whitespace) => true,
            _ => {
                self.pos = save;
                false
            }
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            return None;
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    /// Exact rational literal: `123`, `1.25`, `.5` or `3/4`.
    fn rational(&mut self) -> Result<Rational, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let int_part = self.digits();
        let mut frac = String::new();
        if self.peek() == Some('.') {
            self.pos += 1;
            frac = self.digits();
        }
        if int_part.is_empty() && frac.is_empty() {
            return Err(self.err_at(start, ParseErrorKind::InvalidNumber(self.chars[start..self.pos].iter().collect())));
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let whole: BigInt = format!("{}{}", if int_part.is_empty() { "0" } else { &int_part }, frac)
            .parse()
            .expect("digits");
        let mut q = Rational::new(whole, scale);
        if frac.is_empty() && self.peek() == Some('/') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            let den: BigInt = self.digits().parse().expect("digits");
            if den.is_zero() {
                return Err(self.err_at(start, ParseErrorKind::InvalidNumber(self.chars[start..self.pos].iter().collect())));
            }
            q /= Rational::from_integer(den);
        }
        Ok(q)
    }

    /// Floating literal with optional sign and exponent.
    fn float(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some('+' | '-')) {
            self.pos += 1;
        }
        self.digits();
        if self.peek() == Some('.') {
            self.pos += 1;
            self.digits();
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.digits().is_empty() {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err_at(start, ParseErrorKind::InvalidNumber(text))),
        }
    }

    fn species_ref(&mut self, species: &mut Vec<String>, index: &mut HashMap<String, usize>) -> Result<usize, ParseError> {
        let name = self.ident().ok_or_else(|| self.syntax("expected species name"))?;
        Ok(*index.entry(name.clone()).or_insert_with(|| {
            species.push(name);
            species.len() - 1
        }))
    }

    fn complex(&mut self, species: &mut Vec<String>, index: &mut HashMap<String, usize>) -> Result<Complex, ParseError> {
        self.skip_ws();
        if self.peek() == Some('0') {
            let save = self.pos;
            self.pos += 1;
            let standalone = !self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.' || c == '/');
            self.skip_ws();
            if standalone && !self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                return Ok(Complex::zero());
            }
            self.pos = save;
        }
        let mut terms = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            if self.peek() == Some('-') && self.peek_at(1) != Some('>') {
                return Err(self.err(ParseErrorKind::NegativeCoefficient));
            }
            let coeff = if self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                self.rational()?
            } else {
                Rational::one()
            };
            if coeff.is_zero() {
                return Err(self.err_at(start, ParseErrorKind::ZeroCoefficient));
            }
            let s = self.species_ref(species, index)?;
            terms.push((s, coeff));
            self.skip_ws();
            if self.peek() == Some('+') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(Complex::from_terms(terms).expect("coefficients are positive"))
    }

    fn reaction(&mut self, species: &mut Vec<String>, index: &mut HashMap<String, usize>) -> Result<ReactionStatement, ParseError> {
        let reactant = self.complex(species, index)?;
        let reversible = if self.eat("<->") {
            true
        } else if self.eat("->") {
            false
        } else {
            return Err(self.syntax("expected `->` or `<->`"));
        };
        let product = self.complex(species, index)?;
        if reactant == product {
            return Err(self.err_at(0, ParseErrorKind::ReactantEqualsProduct));
        }
        let mut attrs = Attributes::default();
        if !self.at_end() {
            if !self.eat(":") {
                return Err(self.syntax("expected `:` before attributes"));
            }
            self.attributes(reversible, &mut attrs)?;
        }
        Ok(ReactionStatement { line: self.line, reactant, product, reversible, attrs })
    }

    fn attributes(&mut self, reversible: bool, attrs: &mut Attributes) -> Result<(), ParseError> {
        while !self.at_end() {
            let start = self.pos;
            let base = self.ident().ok_or_else(|| self.syntax("expected attribute name"))?;
            let dir = match self.peek() {
                Some(c @ ('+' | '-')) => {
                    self.pos += 1;
                    Some(c)
                }
                _ => None,
            };
            let key = format!("{base}{}", dir.map(String::from).unwrap_or_default());
            if !self.eat("=") {
                return Err(self.syntax("expected `=` after attribute name"));
            }
            let is_rate = match base.as_str() {
                "k" => true,
                "tau" => false,
                _ => return Err(self.err_at(start, ParseErrorKind::UnknownAttribute(key))),
            };
            match (reversible, dir) {
                (true, None) => return Err(self.err_at(start, ParseErrorKind::AmbiguousReversible(base))),
                (false, Some(_)) => return Err(self.err_at(start, ParseErrorKind::DirectionalOnIrreversible(key))),
                _ => {}
            }
            self.skip_ws();
            let vpos = self.pos;
            let value = if self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                Value::Ident(self.ident().expect("starts with a letter"))
            } else {
                let v = self.float()?;
                if is_rate && v <= 0.0 {
                    return Err(self.err_at(vpos, ParseErrorKind::NonPositiveRate(v)));
                }
                if !is_rate && v < 0.0 {
                    return Err(self.err_at(vpos, ParseErrorKind::NegativeDelay(v)));
                }
                Value::Number(v)
            };
            let slot = match (is_rate, dir) {
                (true, None) => &mut attrs.k,
                (true, Some('+')) => &mut attrs.k_forward,
                (true, Some(_)) => &mut attrs.k_backward,
                (false, None) => &mut attrs.tau,
                (false, Some('+')) => &mut attrs.tau_forward,
                (false, Some(_)) => &mut attrs.tau_backward,
            };
            if slot.replace(value).is_some() {
                return Err(self.err_at(start, ParseErrorKind::DuplicateAttribute(key)));
            }
            self.skip_ws();
            if self.peek() == Some(',') {
                self.pos += 1;
            }
        }
        Ok(())
    }

    fn binding(&mut self) -> Result<(String, f64), ParseError> {
        let name = self.ident().ok_or_else(|| self.syntax("expected a reaction, binding or species declaration"))?;
        if !self.eat("=") {
            return Err(self.syntax("expected `=` in parameter binding"));
        }
        let v = self.float()?;
        if !self.at_end() {
            return Err(self.syntax("unexpected text after binding value"));
        }
        Ok((name, v))
    }

    fn species_declaration(&mut self, species: &mut Vec<String>, index: &mut HashMap<String, usize>) -> Result<(), ParseError> {
        while !self.at_end() {
            let start = self.pos;
            let name = self.ident().ok_or_else(|| self.syntax("expected species name"))?;
            if index.contains_key(&name) {
                return Err(self.err_at(start, ParseErrorKind::DuplicateSpecies(name)));
            }
            index.insert(name.clone(), species.len());
            species.push(name);
            self.skip_ws();
            if self.peek() == Some(',') {
                self.pos += 1;
            }
        }
        Ok(())
    }
}

/// Renders a network in the text format; `parse_network` reads it back.
pub fn serialize_network(net: &ReactionNetwork) -> String {
    let mut out = String::new();
    let names = net.species_names();
    if !names.is_empty() {
        let _ = writeln!(out, "species {}", names.join(", "));
    }
    let mut bindings: BTreeMap<String, f64> = BTreeMap::new();
    let mut note = |b: &Binding| {
        if let (Some(n), Some(v)) = (&b.name, b.value) {
            bindings.entry(n.clone()).or_insert(v);
        }
    };
    let mut r = 0;
    while r < net.n_reactions() {
        let rx = net.reaction(r);
        note(&rx.rate);
        note(&rx.delay);
        let lhs = complex_text(&rx.reactant, names);
        let rhs = complex_text(&rx.product, names);
        if net.partner(r) == Some(r + 1) {
            let back = net.reaction(r + 1);
            note(&back.rate);
            note(&back.delay);
            let attrs: Vec<String> = [
                attr("k+", &rx.rate, false),
                attr("k-", &back.rate, false),
                attr("tau+", &rx.delay, true),
                attr("tau-", &back.delay, true),
            ]
            .into_iter()
            .flatten()
            .collect();
            push_line(&mut out, &lhs, "<->", &rhs, &attrs);
            r += 2;
        } else {
            let attrs: Vec<String> = [attr("k", &rx.rate, false), attr("tau", &rx.delay, true)]
                .into_iter()
                .flatten()
                .collect();
            push_line(&mut out, &lhs, "->", &rhs, &attrs);
            r += 1;
        }
    }
    for (n, v) in bindings {
        let _ = writeln!(out, "{n} = {v:?}");
    }
    out
}

fn push_line(out: &mut String, lhs: &str, arrow: &str, rhs: &str, attrs: &[String]) {
    if attrs.is_empty() {
        let _ = writeln!(out, "{lhs} {arrow} {rhs}");
    } else {
        let _ = writeln!(out, "{lhs} {arrow} {rhs} : {}", attrs.join(", "));
    }
}

fn attr(key: &str, b: &Binding, is_delay: bool) -> Option<String> {
    if is_delay && b.is_literal_zero() {
        return None;
    }
    match (&b.name, b.value) {
        (Some(n), _) => Some(format!("{key}={n}")),
        (None, Some(v)) => Some(format!("{key}={v:?}")),
        (None, None) => None,
    }
}

fn complex_text(c: &Complex, names: &[String]) -> String {
    if c.is_zero() {
        return "0".into();
    }
    c.iter()
        .map(|(s, q)| {
            if q.is_one() {
                names[s].clone()
            } else {
                format!("{} {}", format_rational(q), names[s])
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}
