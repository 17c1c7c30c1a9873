//! Text form `x2+x3+x1*x2`: signed terms, each a product of an optional
//! integer and at most two distinct variables `x1, x2, ...` (1-based).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::MultilinearPoly;
use crate::error::{Error, Result};

/// Parses a polynomial; the slot count is the largest variable index used.
pub fn parse_poly(text: &str) -> Result<MultilinearPoly> {
    let terms = parse_terms(text)?;
    let num_vars = terms
        .iter()
        .flat_map(|t| t.vars.iter().copied())
        .max()
        .map_or(0, |v| v + 1);
    build(num_vars, &terms)
}

impl MultilinearPoly {
    /// Parses a polynomial into exactly `num_vars` slots.
    pub fn parse_with_vars(text: &str, num_vars: usize) -> Result<MultilinearPoly> {
        build(num_vars, &parse_terms(text)?)
    }
}

impl core::str::FromStr for MultilinearPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}

struct Term {
    coeff: i64,
    vars: Vec<usize>,
}

fn build(num_vars: usize, terms: &[Term]) -> Result<MultilinearPoly> {
    let mut poly = MultilinearPoly::zero(num_vars);
    for term in terms {
        match term.vars[..] {
            [] => poly.add_constant(term.coeff),
            [i] => poly.add_linear(i, term.coeff)?,
            [i, j] => poly.add_quadratic(i, j, term.coeff)?,
            _ => unreachable!("parse_term limits monomials to degree two"),
        }
    }
    Ok(poly)
}

fn parse_terms(text: &str) -> Result<Vec<Term>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let mut negative = false;
        while let Some(c) = rest.chars().next().filter(|c| *c == '+' || *c == '-') {
            negative ^= c == '-';
            rest = &rest[1..];
        }
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let (body, tail) = rest.split_at(end);
        let mut term = parse_term(body)?;
        if negative {
            term.coeff = -term.coeff;
        }
        terms.push(term);
        rest = tail;
    }
    Ok(terms)
}

fn parse_term(body: &str) -> Result<Term> {
    if body.is_empty() {
        return Err(Error::Parse("empty term".into()));
    }
    let mut coeff: i64 = 1;
    let mut vars = Vec::new();
    for factor in body.split('*') {
        if let Some(index) = factor.strip_prefix('x') {
            let index: usize = index
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable {factor:?}")))?;
            if index == 0 {
                return Err(Error::Parse("variables are numbered from x1".into()));
            }
            if vars.contains(&(index - 1)) {
                return Err(Error::Parse(format!("repeated variable in {body:?}")));
            }
            vars.push(index - 1);
        } else {
            let c: i64 = factor
                .parse()
                .map_err(|_| Error::Parse(format!("bad factor {factor:?}")))?;
            coeff = coeff
                .checked_mul(c)
                .ok_or_else(|| Error::Parse(format!("coefficient overflow in {body:?}")))?;
        }
    }
    if vars.len() > 2 {
        return Err(Error::Parse(format!("degree above two in {body:?}")));
    }
    Ok(Term { coeff, vars })
}

impl fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        let mut write_term = |f: &mut fmt::Formatter<'_>, c: i64, mono: Option<String>| {
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            first = false;
            match (c.unsigned_abs(), mono) {
                (a, None) => write!(f, "{sign}{a}"),
                (1, Some(m)) => write!(f, "{sign}{m}"),
                (a, Some(m)) => write!(f, "{sign}{a}*{m}"),
            }
        };
        if self.constant != 0 {
            write_term(f, self.constant, None)?;
        }
        for (&i, &c) in &self.linear {
            write_term(f, c, Some(format!("x{}", i + 1)))?;
        }
        for (&(i, j), &c) in &self.quadratic {
            write_term(f, c, Some(format!("x{}*x{}", i + 1, j + 1)))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    #[test]
    fn parses_examples() {
        let f = parse_poly("x2+x3+x1*x2").unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(f.linear_coeff(1), 1);
        assert_eq!(f.quadratic_coeff(0, 1), 1);
        assert_eq!(f.to_string(), "x2+x3+x1*x2");

        let g = parse_poly(" 1 - x1 - x2 + x1 * x2 ").unwrap();
        assert_eq!(g.constant(), 1);
        assert_eq!(g.linear_coeff(0), -1);
        assert_eq!(g.to_string(), "1-x1-x2+x1*x2");

        let h = parse_poly("2*x1+3*x1-x2*x1*4").unwrap();
        assert_eq!(h.to_string(), "5*x1-4*x1*x2");

        assert_eq!(parse_poly("x1-x1").unwrap().to_string(), "0");
        assert_eq!(parse_poly("0").unwrap().num_vars(), 0);
    }

    #[test]
    fn rejects_malformed_text() {
        for bad in ["", "x0", "x1*x1", "x1*x2*x3", "x1++", "y2", "x1+*x2", "3x1"] {
            assert!(parse_poly(bad).is_err(), "{bad:?} should fail");
        }
        assert!(MultilinearPoly::parse_with_vars("x3", 2).is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(
            n in 1usize..8,
            c in -5i64..=5,
            lin in proptest::collection::vec((0usize..8, -4i64..=4), 0..6),
            quad in proptest::collection::vec((0usize..8, 0usize..8, -4i64..=4), 0..10),
        ) {
            let f = MultilinearPoly::from_terms(
                n, c,
                lin.into_iter().filter(|(i, _)| *i < n),
                quad.into_iter().filter(|(i, j, _)| i != j && *i < n && *j < n),
            ).unwrap();
            let text = f.to_string();
            prop_assert_eq!(MultilinearPoly::parse_with_vars(&text, n).unwrap(), f);
        }
    }
}
