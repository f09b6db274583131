//! Exact complex-rational scalars and truncated (Laurent) series in ħ.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact Gaussian rational `re + i·im`.
pub type Scalar = Complex<BigRational>;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn real(r: BigRational) -> Scalar {
    Complex::new(r, BigRational::zero())
}

pub fn real_int(n: i64) -> Scalar {
    real(int(n))
}

pub fn imag_unit() -> Scalar {
    Complex::new(BigRational::zero(), BigRational::one())
}

/// `p/q` with an explicit denominator, even when it is 1.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_scalar(c: &Scalar) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => c.re.to_string(),
        (true, false) => {
            if c.im.is_one() {
                "i".to_string()
            } else if (-c.im.clone()).is_one() {
                "-i".to_string()
            } else {
                format!("{}i", c.im)
            }
        }
        (false, false) => format!("({} {} {}i)", c.re, if c.im.is_negative() { "-" } else { "+" }, c.im.abs()),
    }
}

/// A finite series `Σ_k c_k ħ^k` with exact coefficients.
///
/// Powers may be negative: they appear transiently when the density
/// Laplacian produces `(i/ħ)` factors that the Gaussian integral later
/// cancels. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Series(BTreeMap<i32, Scalar>);

impl Series {
    pub fn zero() -> Self {
        Series(BTreeMap::new())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(0, c)
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn monomial(power: i32, c: Scalar) -> Self {
        let mut s = Series::zero();
        s.add_term(power, c);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &Scalar)> {
        self.0.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, power: i32) -> Scalar {
        self.0.get(&power).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn min_power(&self) -> Option<i32> {
        self.0.keys().next().copied()
    }

    pub fn max_power(&self) -> Option<i32> {
        self.0.keys().next_back().copied()
    }

    pub fn add_term(&mut self, power: i32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(power).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&power);
        }
    }

    pub fn add_assign(&mut self, other: &Series) {
        for (k, v) in other.iter() {
            self.add_term(k, v.clone());
        }
    }

    pub fn scale(&self, c: &Scalar) -> Series {
        if c.is_zero() {
            return Series::zero();
        }
        Series(self.0.iter().map(|(k, v)| (*k, v * c)).collect())
    }

    pub fn neg(&self) -> Series {
        Series(self.0.iter().map(|(k, v)| (*k, -v.clone())).collect())
    }

    pub fn shift(&self, by: i32) -> Series {
        Series(self.0.iter().map(|(k, v)| (*k + by, v.clone())).collect())
    }

    /// Product truncated above `order`; the flag reports whether anything was dropped.
    pub fn mul_truncated(&self, other: &Series, order: i32) -> (Series, bool) {
        let mut out = Series::zero();
        let mut dropped = false;
        for (a, x) in self.iter() {
            for (b, y) in other.iter() {
                if a + b > order {
                    dropped = true;
                    continue;
                }
                out.add_term(a + b, x * y);
            }
        }
        (out, dropped)
    }

    pub fn truncate(&self, order: i32) -> (Series, bool) {
        let dropped = self.max_power().is_some_and(|p| p > order);
        (Series(self.0.range(..=order).map(|(k, v)| (*k, v.clone())).collect()), dropped)
    }

    /// `self / other` as a Laurent series truncated above `order`.
    pub fn div_truncated(&self, other: &Series, order: i32) -> Result<Series> {
        let lead = other.min_power().ok_or(Error::DegenerateGauge)?;
        let lead_c = other.coeff(lead);
        let inv_lead = Scalar::one() / lead_c;
        let mut rem = self.clone();
        let mut out = Series::zero();
        while let Some(p) = rem.min_power() {
            let q = p - lead;
            if q > order {
                break;
            }
            let c = rem.coeff(p) * &inv_lead;
            out.add_term(q, c.clone());
            let sub = other.shift(q).scale(&c);
            rem.add_assign(&sub.neg());
            // guard against runaway when `other` has very high powers
            if rem.min_power().is_some_and(|np| np <= p) {
                return Err(Error::Internal("series division failed to progress".into()));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(k, c)| match k {
                0 => format_scalar(c),
                1 => format!("{}·ħ", format_scalar(c)),
                _ => format!("{}·ħ^{}", format_scalar(c), k),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let r = rat(-6, 4);
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("-3/2").unwrap(), r);
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn series_division_inverts_multiplication() {
        let mut a = Series::monomial(-1, real_int(2));
        a.add_term(0, imag_unit());
        let mut b = Series::one();
        b.add_term(1, real_int(3));
        let (prod, _) = a.mul_truncated(&b, 6);
        let back = prod.div_truncated(&b, 4).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn truncation_flags_dropped_terms() {
        let s = Series::monomial(1, real_int(1));
        let (sq, dropped) = s.mul_truncated(&s, 1);
        assert!(sq.is_zero());
        assert!(dropped);
    }
}
