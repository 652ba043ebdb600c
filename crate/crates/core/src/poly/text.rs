//! Parser for constraint text: `1 <= x & x <= 2*p`, chains `0 <= x < p`,
//! rational constants `1/2`, and `true`. Disjunctions use `|`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

use super::linear::{AtomicConstraint, LinearTerm, Relation};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl TextError {
    fn at(col: usize, message: impl Into<String>) -> Self {
        TextError {
            line: 1,
            column: col,
            message: message.into(),
        }
    }

    /// Relocates an error from a sub-string starting at (`line`, `column`).
    pub fn shifted(mut self, line: usize, column: usize) -> Self {
        if self.line == 1 {
            self.column += column - 1;
        }
        self.line += line - 1;
        self
    }
}

impl fmt::Display for TextError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for TextError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Rel(Relation),
    Plus,
    Minus,
    Star,
    Slash,
    And,
    Or,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, TextError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().unwrap()), col));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            ('<', Some('=')) => (Tok::Rel(Relation::Le), 2),
            ('>', Some('=')) => (Tok::Rel(Relation::Ge), 2),
            ('=', Some('=')) => (Tok::Rel(Relation::Eq), 2),
            ('&', Some('&')) => (Tok::And, 2),
            ('|', Some('|')) => (Tok::Or, 2),
            ('<', _) => (Tok::Rel(Relation::Lt), 1),
            ('>', _) => (Tok::Rel(Relation::Gt), 1),
            ('=', _) => (Tok::Rel(Relation::Eq), 1),
            ('≤', _) => (Tok::Rel(Relation::Le), 1),
            ('≥', _) => (Tok::Rel(Relation::Ge), 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('&', _) | ('∧', _) => (Tok::And, 1),
            ('|', _) | ('∨', _) => (Tok::Or, 1),
            (',', _) => (Tok::And, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            _ => return Err(TextError::at(col, format!("unexpected character `{c}`"))),
        };
        out.push((tok, col));
        i += len;
    }
    Ok(out)
}

/// Linear term with rational coefficients, used only while parsing.
#[derive(Default, Clone)]
struct RatTerm {
    coeffs: BTreeMap<String, Rational>,
    constant: Rational,
}

impl RatTerm {
    fn add(&mut self, other: RatTerm, sign: &Rational) {
        for (k, v) in other.coeffs {
            *self.coeffs.entry(k).or_insert_with(Rational::zero) += v * sign;
        }
        self.constant += other.constant * sign;
    }

    fn scale(&mut self, k: &Rational) {
        for v in self.coeffs.values_mut() {
            *v *= k;
        }
        self.constant *= k;
    }

    /// Integer term obtained by clearing denominators (positive factor).
    fn to_integer(&self) -> LinearTerm {
        let mut l = self.constant.denom().clone();
        for v in self.coeffs.values() {
            l = l.lcm(v.denom());
        }
        let lq = Rational::from_integer(l);
        let mut t = LinearTerm::constant((&self.constant * &lq).to_integer());
        for (k, v) in &self.coeffs {
            let c = (v * &lq).to_integer();
            if !c.is_zero() {
                t = t.plus_var(k.clone(), c);
            }
        }
        t
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, TextError> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            end_col: text.chars().count() + 1,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn error(&self, msg: impl Into<String>) -> TextError {
        TextError::at(self.col(), msg)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn number(&mut self) -> Result<Rational, TextError> {
        match self.bump() {
            Some(Tok::Int(n)) => {
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    match self.bump() {
                        Some(Tok::Int(d)) if !d.is_zero() => Ok(Rational::new(n, d)),
                        _ => {
                            self.pos -= 1;
                            Err(self.error("expected a nonzero denominator"))
                        }
                    }
                } else {
                    Ok(Rational::from_integer(n))
                }
            }
            _ => {
                self.pos -= 1;
                Err(self.error("expected a number"))
            }
        }
    }

    fn factor(&mut self) -> Result<RatTerm, TextError> {
        match self.peek() {
            Some(Tok::Int(_)) => {
                let k = self.number()?;
                let mut t = RatTerm::default();
                if self.peek() == Some(&Tok::Star) {
                    self.pos += 1;
                    let mut f = self.factor()?;
                    f.scale(&k);
                    return Ok(f);
                }
                if let Some(Tok::Ident(_)) | Some(Tok::LParen) = self.peek() {
                    let mut f = self.factor()?;
                    f.scale(&k);
                    return Ok(f);
                }
                t.constant = k;
                Ok(t)
            }
            Some(Tok::Ident(name)) => {
                if name == "true" || name == "false" {
                    return Err(self.error(format!("`{name}` cannot appear inside a term")));
                }
                let name = name.clone();
                self.pos += 1;
                let mut t = RatTerm::default();
                t.coeffs.insert(name, Rational::one());
                if self.peek() == Some(&Tok::Star) {
                    self.pos += 1;
                    let k = self.number()?;
                    t.scale(&k);
                }
                Ok(t)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                if self.bump() != Some(Tok::RParen) {
                    self.pos -= 1;
                    return Err(self.error("expected `)`"));
                }
                Ok(t)
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                let mut t = self.factor()?;
                t.scale(&-Rational::one());
                Ok(t)
            }
            _ => Err(self.error("expected a term")),
        }
    }

    fn term(&mut self) -> Result<RatTerm, TextError> {
        let mut acc = RatTerm::default();
        let first_sign = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -Rational::one()
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                Rational::one()
            }
            _ => Rational::one(),
        };
        let f = self.factor()?;
        acc.add(f, &first_sign);
        loop {
            let sign = match self.peek() {
                Some(Tok::Plus) => Rational::one(),
                Some(Tok::Minus) => -Rational::one(),
                _ => break,
            };
            self.pos += 1;
            let f = self.factor()?;
            acc.add(f, &sign);
        }
        Ok(acc)
    }

    /// A chain `t0 r1 t1 r2 t2 ...` or the keyword `true`.
    fn chain(&mut self) -> Result<Vec<AtomicConstraint>, TextError> {
        if let Some(Tok::Ident(k)) = self.peek() {
            if k == "true" {
                self.pos += 1;
                return Ok(Vec::new());
            }
            if k == "false" {
                self.pos += 1;
                return Ok(vec![AtomicConstraint::new(LinearTerm::constant(1), Relation::Le)]);
            }
        }
        let start = self.col();
        let mut lhs = self.term()?;
        let mut out = Vec::new();
        while let Some(Tok::Rel(rel)) = self.peek() {
            let rel = *rel;
            self.pos += 1;
            let rhs = self.term()?;
            let mut diff = lhs.clone();
            diff.add(rhs.clone(), &-Rational::one());
            out.push(AtomicConstraint::new(diff.to_integer(), rel));
            lhs = rhs;
        }
        if out.is_empty() {
            return Err(TextError::at(start, "expected a relation"));
        }
        Ok(out)
    }

    fn conjunction(&mut self) -> Result<Vec<AtomicConstraint>, TextError> {
        let mut out = self.chain()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            out.extend(self.chain()?);
        }
        Ok(out)
    }
}

/// Parses a conjunction of (possibly chained) comparisons.
pub fn parse_conjunction(text: &str) -> Result<Vec<AtomicConstraint>, TextError> {
    let mut p = Parser::new(text)?;
    if p.at_end() {
        return Err(p.error("empty constraint"));
    }
    let out = p.conjunction()?;
    if !p.at_end() {
        return Err(p.error("unexpected token"));
    }
    Ok(out)
}

/// Parses a disjunction of conjunctions (`false` is the empty disjunction).
pub(crate) fn parse_disjunction(text: &str) -> Result<Vec<Vec<AtomicConstraint>>, TextError> {
    let mut p = Parser::new(text)?;
    if p.at_end() {
        return Err(p.error("empty constraint"));
    }
    let mut out = Vec::new();
    loop {
        if p.peek() == Some(&Tok::Ident("false".into())) {
            p.pos += 1;
        } else {
            out.push(p.conjunction()?);
        }
        if p.peek() == Some(&Tok::Or) {
            p.pos += 1;
        } else {
            break;
        }
    }
    if !p.at_end() {
        return Err(p.error("unexpected token"));
    }
    Ok(out)
}

/// Parses a linear term with integer (or rational, scaled away) coefficients.
pub fn parse_linear_term(text: &str) -> Result<LinearTerm, TextError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    if !p.at_end() {
        return Err(p.error("unexpected token"));
    }
    let mut l = t.constant.denom().clone();
    for v in t.coeffs.values() {
        l = l.lcm(v.denom());
    }
    if !l.is_one() {
        return Err(TextError::at(1, "linear terms must have integer coefficients"));
    }
    Ok(t.to_integer())
}

/// Parses a rational literal such as `3`, `-1/2`.
pub fn parse_rational(text: &str) -> Result<Rational, TextError> {
    let mut p = Parser::new(text)?;
    let neg = if p.peek() == Some(&Tok::Minus) {
        p.pos += 1;
        true
    } else {
        false
    };
    let q = p.number()?;
    if !p.at_end() {
        return Err(p.error("unexpected token"));
    }
    Ok(if neg { -q } else { q })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chains_split_into_atoms() {
        let a = parse_conjunction("0 <= x < 2*p & y = 1").unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a[1].rel, Relation::Lt);
        assert_eq!(a[1].term.coeff("p"), BigInt::from(-2));
    }

    #[test]
    fn rational_constants_are_scaled() {
        let a = parse_conjunction("1/2 <= p").unwrap();
        assert_eq!(a[0].term.coeff("p"), BigInt::from(-2));
        assert_eq!(a[0].term.constant_part(), &BigInt::from(1));
    }

    #[test]
    fn juxtaposed_coefficients() {
        let t = parse_linear_term("2p - q + 3").unwrap();
        assert_eq!(t.coeff("p"), BigInt::from(2));
        assert_eq!(t.coeff("q"), BigInt::from(-1));
    }

    #[test]
    fn errors_carry_columns() {
        let e = parse_conjunction("x <= $").unwrap_err();
        assert_eq!(e.column, 6);
        let e = parse_conjunction("x").unwrap_err();
        assert_eq!(e.column, 1);
        let e = parse_conjunction("x <= 1 1").unwrap_err();
        assert_eq!(e.column, 8);
    }

    #[test]
    fn disjunctions() {
        assert_eq!(parse_disjunction("false").unwrap().len(), 0);
        assert_eq!(parse_disjunction("p <= 1 | p >= 2 & q = 1").unwrap().len(), 2);
        assert_eq!(parse_disjunction("true").unwrap(), vec![vec![]]);
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-3/6").unwrap(), Rational::new((-1).into(), 2.into()));
    }
}
