//! Term-list JSON form of [`SuperPoly`].
//!
//! `[{"coeff": "p/q" | {"re": "p/q", "im": "p/q"}, "hbar": k, "monomial": ["x", "δy", ...]}, ...]`.
//! Monomials are read as ordered products; output is normal-ordered.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::generator::GeneratorTable;
use super::poly::SuperPoly;
use super::scalar::{format_rational, parse_rational, real, Scalar};
use crate::error::Result;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CoeffJson {
    Real(String),
    Complex { re: String, im: String },
}

impl CoeffJson {
    pub fn from_scalar(c: &Scalar) -> Self {
        if c.im.is_zero() {
            CoeffJson::Real(format_rational(&c.re))
        } else {
            CoeffJson::Complex { re: format_rational(&c.re), im: format_rational(&c.im) }
        }
    }

    pub fn to_scalar(&self) -> Result<Scalar> {
        match self {
            CoeffJson::Real(s) => Ok(real(parse_rational(s)?)),
            CoeffJson::Complex { re, im } => Ok(Complex::new(parse_rational(re)?, parse_rational(im)?)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub coeff: CoeffJson,
    #[serde(default)]
    pub hbar: i32,
    pub monomial: Vec<String>,
}

pub fn to_terms(p: &SuperPoly) -> Vec<TermJson> {
    let table = p.table();
    let mut out = Vec::new();
    for (m, s) in p.terms() {
        let names: Vec<String> = m
            .factors()
            .iter()
            .flat_map(|(g, e)| std::iter::repeat_n(table.name(*g).to_string(), *e as usize))
            .collect();
        for (k, c) in s.iter() {
            out.push(TermJson { coeff: CoeffJson::from_scalar(c), hbar: k, monomial: names.clone() });
        }
    }
    out
}

pub fn from_terms(table: &Arc<GeneratorTable>, terms: &[TermJson], order: i32) -> Result<SuperPoly> {
    let mut p = SuperPoly::zero(table).with_order(order);
    for t in terms {
        let ids = t.monomial.iter().map(|n| table.lookup(n)).collect::<Result<Vec<_>>>()?;
        let term = SuperPoly::from_product(table, t.coeff.to_scalar()?, t.hbar, &ids).with_order(order);
        p = p.add(&term);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{imag_unit, rat};

    #[test]
    fn parses_ordered_products_with_signs() {
        let mut b = GeneratorTable::builder();
        b.coordinate("x", 0).unwrap();
        b.coordinate("c", 1).unwrap();
        let t = b.build();
        let json = r#"[{"coeff": "3/2", "hbar": 1, "monomial": ["δc", "x"]},
                      {"coeff": {"re": "0/1", "im": "1/1"}, "monomial": ["δx", "c"]}]"#;
        let terms: Vec<TermJson> = serde_json::from_str(json).unwrap();
        let p = from_terms(&t, &terms, 2).unwrap();
        // δc is even, so "δc x" is already normal-ordered up to id order; δx c = -c δx.
        let c = SuperPoly::named(&t, "c").unwrap();
        let dx = SuperPoly::named(&t, "δx").unwrap();
        let expected_second = dx.mul(&c).scale(&imag_unit());
        assert_eq!(p.sub(&expected_second).len(), 1);
        let back = to_terms(&p);
        let again = from_terms(&t, &back, 2).unwrap();
        assert_eq!(again, p);
        assert!(back.iter().any(|t| t.coeff == CoeffJson::Real(format_rational(&rat(3, 2)))));
    }
}
