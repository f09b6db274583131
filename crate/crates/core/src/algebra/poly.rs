use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::generator::{GenId, GeneratorTable};
use super::scalar::{format_scalar, imag_unit, real, Scalar, Series};
use crate::error::{Error, Result};
use num_rational::BigRational;

pub const DEFAULT_HBAR_ORDER: i32 = 2;

/// Truncation order of polynomials that have never been truncated.
pub const EXACT: i32 = i32::MAX;

/// Normal-ordered monomial: generator ids strictly increasing, odd
/// generators with exponent 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(GenId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn generator(id: GenId) -> Self {
        Monomial(vec![(id, 1)])
    }

    pub fn factors(&self) -> &[(GenId, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, id: GenId) -> u32 {
        self.0.iter().find(|(g, _)| *g == id).map_or(0, |(_, e)| *e)
    }

    pub fn contains(&self, id: GenId) -> bool {
        self.exponent(id) > 0
    }

    /// Builds a monomial from factors sorted by id (odd exponents ≤ 1).
    pub fn from_sorted(factors: Vec<(GenId, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        Monomial(factors)
    }

    /// Splits off the factors selected by `take`. No sign is produced, so the
    /// selected factors must be even.
    pub fn partition(&self, take: impl Fn(GenId) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().partition(|(g, _)| take(*g));
        (Monomial(a), Monomial(b))
    }

    /// Product with its Koszul sign (`true` = negative), or `None` when an
    /// odd generator would appear twice.
    pub fn mul(&self, other: &Monomial, table: &GeneratorTable) -> Option<(Monomial, bool)> {
        let mut negative = false;
        for &(b, _) in &other.0 {
            if !table.get(b).is_odd() {
                continue;
            }
            for &(a, _) in &self.0 {
                if a == b {
                    return None;
                }
                if a > b && table.get(a).is_odd() {
                    negative = !negative;
                }
            }
        }
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = self.0[i];
            let (b, eb) = other.0[j];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    out.push((a, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Some((Monomial(out), negative))
    }

    /// Graded left derivative: `(coefficient, negative sign, result)`.
    fn left_derivative(&self, id: GenId, table: &GeneratorTable) -> Option<(u32, bool, Monomial)> {
        let pos = self.0.iter().position(|(g, _)| *g == id)?;
        let exp = self.0[pos].1;
        let negative = table.get(id).is_odd()
            && self.0[..pos].iter().filter(|(g, _)| table.get(*g).is_odd()).count() % 2 == 1;
        let mut rest = self.0.clone();
        if exp == 1 {
            rest.remove(pos);
        } else {
            rest[pos].1 -= 1;
        }
        Some((exp, negative, Monomial(rest)))
    }

    pub fn parity(&self, table: &GeneratorTable) -> u8 {
        (self.0.iter().filter(|(g, _)| table.get(*g).is_odd()).count() % 2) as u8
    }

    pub fn ghost(&self, table: &GeneratorTable) -> i32 {
        self.0.iter().map(|(g, e)| table.get(*g).ghost * *e as i32).sum()
    }

    pub fn form_degree(&self, table: &GeneratorTable) -> u32 {
        self.0.iter().map(|(g, e)| table.get(*g).form_degree as u32 * e).sum()
    }
}

/// Element of the supercommutative algebra generated by a table, with
/// coefficients that are truncated ħ-series of exact complex rationals.
#[derive(Clone)]
pub struct SuperPoly {
    table: Arc<GeneratorTable>,
    order: i32,
    terms: BTreeMap<Monomial, Series>,
    truncated: bool,
}

impl PartialEq for SuperPoly {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.table, &other.table) && self.terms == other.terms
    }
}

impl fmt::Debug for SuperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperPoly({self})")
    }
}

fn check_tables(a: &Arc<GeneratorTable>, b: &Arc<GeneratorTable>) -> Result<()> {
    if Arc::ptr_eq(a, b) {
        Ok(())
    } else {
        Err(Error::TableMismatch)
    }
}

impl SuperPoly {
    pub fn zero(table: &Arc<GeneratorTable>) -> Self {
        SuperPoly {
            table: table.clone(),
            order: EXACT,
            terms: BTreeMap::new(),
            truncated: false,
        }
    }

    pub fn constant(table: &Arc<GeneratorTable>, c: Scalar) -> Self {
        Self::from_term(table, Monomial::one(), Series::constant(c))
    }

    pub fn one(table: &Arc<GeneratorTable>) -> Self {
        Self::constant(table, Scalar::one())
    }

    pub fn rational(table: &Arc<GeneratorTable>, r: BigRational) -> Self {
        Self::constant(table, real(r))
    }

    pub fn generator(table: &Arc<GeneratorTable>, id: GenId) -> Self {
        Self::from_term(table, Monomial::generator(id), Series::one())
    }

    pub fn named(table: &Arc<GeneratorTable>, name: &str) -> Result<Self> {
        Ok(Self::generator(table, table.lookup(name)?))
    }

    /// `ħ^power` times the unit.
    pub fn hbar_power(table: &Arc<GeneratorTable>, power: i32) -> Self {
        Self::from_term(table, Monomial::one(), Series::monomial(power, Scalar::one()))
    }

    pub fn from_term(table: &Arc<GeneratorTable>, m: Monomial, s: Series) -> Self {
        let mut p = Self::zero(table);
        p.add_series(m, &s);
        p
    }

    /// Product of generators in the listed order, scaled by `c`.
    pub fn from_product(table: &Arc<GeneratorTable>, c: Scalar, hbar: i32, gens: &[GenId]) -> Self {
        let mut p = Self::from_term(table, Monomial::one(), Series::monomial(hbar, c));
        for &g in gens {
            p = p.mul(&Self::generator(table, g));
        }
        p
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Sets the ħ truncation order, dropping terms above it.
    pub fn with_order(mut self, order: i32) -> Self {
        self.order = order;
        let mut dropped = false;
        let terms = std::mem::take(&mut self.terms);
        for (m, s) in terms {
            let (t, d) = s.truncate(order);
            dropped |= d;
            if !t.is_zero() {
                self.terms.insert(m, t);
            }
        }
        self.truncated |= dropped;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Series)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Series {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Series {
        self.coefficient(&Monomial::one())
    }

    pub fn add_series(&mut self, m: Monomial, s: &Series) {
        let (s, dropped) = s.truncate(self.order);
        self.truncated |= dropped;
        if s.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_default();
        slot.add_assign(&s);
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn try_add(&self, other: &SuperPoly) -> Result<SuperPoly> {
        check_tables(&self.table, &other.table)?;
        let mut out = self.clone();
        out.order = self.order.min(other.order);
        out.truncated |= other.truncated;
        if out.order < self.order {
            let o = out.order;
            out = out.with_order(o);
        }
        for (m, s) in &other.terms {
            out.add_series(m.clone(), s);
        }
        Ok(out)
    }

    /// Sum; panics on mismatched tables (use [`SuperPoly::try_add`] at API boundaries).
    pub fn add(&self, other: &SuperPoly) -> SuperPoly {
        self.try_add(other).expect("generator table mismatch")
    }

    pub fn sub(&self, other: &SuperPoly) -> SuperPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SuperPoly {
        self.map_series(|s| s.neg())
    }

    pub fn scale(&self, c: &Scalar) -> SuperPoly {
        self.map_series(|s| s.scale(c))
    }

    pub fn scale_rational(&self, r: &BigRational) -> SuperPoly {
        self.scale(&real(r.clone()))
    }

    pub fn mul_i(&self) -> SuperPoly {
        self.scale(&imag_unit())
    }

    /// Multiplies by `ħ^by`.
    pub fn shift_hbar(&self, by: i32) -> SuperPoly {
        let mut out = SuperPoly { terms: BTreeMap::new(), ..self.clone() };
        for (m, s) in &self.terms {
            out.add_series(m.clone(), &s.shift(by));
        }
        if by > 0 {
            let o = out.order;
            out = out.with_order(o);
        }
        out
    }

    fn map_series(&self, f: impl Fn(&Series) -> Series) -> SuperPoly {
        let mut out = SuperPoly { terms: BTreeMap::new(), ..self.clone() };
        for (m, s) in &self.terms {
            let t = f(s);
            if !t.is_zero() {
                out.terms.insert(m.clone(), t);
            }
        }
        out
    }

    pub fn try_mul(&self, other: &SuperPoly) -> Result<SuperPoly> {
        check_tables(&self.table, &other.table)?;
        let order = self.order.min(other.order);
        let mut out = SuperPoly::zero(&self.table);
        out.order = order;
        out.truncated = self.truncated || other.truncated;
        for (ma, sa) in &self.terms {
            for (mb, sb) in &other.terms {
                let Some((m, negative)) = ma.mul(mb, &self.table) else { continue };
                let (s, dropped) = sa.mul_truncated(sb, order);
                out.truncated |= dropped;
                let s = if negative { s.neg() } else { s };
                out.add_series(m, &s);
            }
        }
        Ok(out)
    }

    /// Supercommutative product; panics on mismatched tables.
    pub fn mul(&self, other: &SuperPoly) -> SuperPoly {
        self.try_mul(other).expect("generator table mismatch")
    }

    pub fn pow(&self, n: u32) -> SuperPoly {
        let mut out = SuperPoly::one(&self.table).with_order(self.order);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Graded left derivative `∂_l/∂g`.
    pub fn left_derivative(&self, g: GenId) -> SuperPoly {
        let mut out = SuperPoly { terms: BTreeMap::new(), ..self.clone() };
        for (m, s) in &self.terms {
            if let Some((e, negative, rest)) = m.left_derivative(g, &self.table) {
                let mut c = real(BigRational::from_integer(e.into()));
                if negative {
                    c = -c;
                }
                out.add_series(rest, &s.scale(&c));
            }
        }
        out
    }

    pub fn try_left_derivative(&self, g: GenId) -> Result<SuperPoly> {
        if g >= self.table.len() {
            return Err(Error::UnknownGenerator(format!("#{g}")));
        }
        Ok(self.left_derivative(g))
    }

    /// Algebra morphism sending each listed generator to its image; unlisted
    /// generators are fixed. Images must have the parity of the generator
    /// they replace.
    pub fn substitute(&self, images: &HashMap<GenId, SuperPoly>) -> SuperPoly {
        let mut cache: HashMap<(GenId, u32), SuperPoly> = HashMap::new();
        let mut out = SuperPoly::zero(&self.table).with_order(self.order);
        out.truncated = self.truncated;
        for (m, s) in &self.terms {
            if !m.factors().iter().any(|(g, _)| images.contains_key(g)) {
                out.add_series(m.clone(), s);
                continue;
            }
            let mut acc = SuperPoly::from_term(&self.table, Monomial::one(), s.clone()).with_order(self.order);
            for &(g, e) in m.factors() {
                let factor = match images.get(&g) {
                    Some(img) => cache.entry((g, e)).or_insert_with(|| img.pow(e)).clone(),
                    None => SuperPoly::from_term(&self.table, Monomial(vec![(g, e)]), Series::one()),
                };
                acc = acc.mul(&factor);
                if acc.is_zero() {
                    break;
                }
            }
            out = out.add(&acc);
        }
        out
    }

    /// Sets every listed generator to zero.
    pub fn restrict_zero(&self, gens: &BTreeSet<GenId>) -> SuperPoly {
        let mut out = SuperPoly { terms: BTreeMap::new(), ..self.clone() };
        for (m, s) in &self.terms {
            if !m.factors().iter().any(|(g, _)| gens.contains(g)) {
                out.terms.insert(m.clone(), s.clone());
            }
        }
        out
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> SuperPoly {
        let mut out = SuperPoly { terms: BTreeMap::new(), ..self.clone() };
        for (m, s) in &self.terms {
            if keep(m) {
                out.terms.insert(m.clone(), s.clone());
            }
        }
        out
    }

    pub fn generators(&self) -> BTreeSet<GenId> {
        self.terms.keys().flat_map(|m| m.factors().iter().map(|(g, _)| *g)).collect()
    }

    pub fn involves(&self, g: GenId) -> bool {
        self.terms.keys().any(|m| m.contains(g))
    }

    /// Parity if homogeneous (zero counts as even).
    pub fn parity(&self) -> Option<u8> {
        homogeneous(self.terms.keys().map(|m| m.parity(&self.table)), 0)
    }

    pub fn ghost_degree(&self) -> Option<i32> {
        homogeneous(self.terms.keys().map(|m| m.ghost(&self.table)), 0)
    }

    pub fn form_degree(&self) -> Option<u32> {
        homogeneous(self.terms.keys().map(|m| m.form_degree(&self.table)), 0)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Splits into even and odd parts.
    pub fn split_parity(&self) -> (SuperPoly, SuperPoly) {
        let t = self.table.clone();
        (self.filter_terms(|m| m.parity(&t) == 0), self.filter_terms(|m| m.parity(&t) == 1))
    }

    /// Lowest ħ power present in any coefficient.
    pub fn min_hbar_power(&self) -> Option<i32> {
        self.terms.values().filter_map(Series::min_power).min()
    }

    /// Keeps only the coefficient of `ħ^k`, as an ħ-free polynomial.
    pub fn hbar_component(&self, k: i32) -> SuperPoly {
        let mut out = SuperPoly { terms: BTreeMap::new(), ..self.clone() };
        for (m, s) in &self.terms {
            let c = s.coeff(k);
            if !c.is_zero() {
                out.terms.insert(m.clone(), Series::constant(c));
            }
        }
        out
    }

    /// Real/imaginary split of every coefficient: `(Re, Im)` both with real coefficients.
    pub fn complex_parts(&self) -> (SuperPoly, SuperPoly) {
        let re = self.map_series(|s| {
            let mut o = Series::zero();
            for (k, c) in s.iter() {
                o.add_term(k, real(c.re.clone()));
            }
            o
        });
        let im = self.map_series(|s| {
            let mut o = Series::zero();
            for (k, c) in s.iter() {
                o.add_term(k, real(c.im.clone()));
            }
            o
        });
        (re, im)
    }
}

fn homogeneous<T: PartialEq + Copy>(mut it: impl Iterator<Item = T>, empty: T) -> Option<T> {
    let Some(first) = it.next() else { return Some(empty) };
    it.all(|x| x == first).then_some(first)
}

impl fmt::Display for SuperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, s) in &self.terms {
            for (k, c) in s.iter() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                let mono: Vec<String> = m
                    .factors()
                    .iter()
                    .map(|(g, e)| {
                        let n = self.table.name(*g);
                        if *e == 1 {
                            n.to_string()
                        } else {
                            format!("{n}^{e}")
                        }
                    })
                    .collect();
                let mut parts = Vec::new();
                if !c.is_one() || (mono.is_empty() && k == 0) {
                    parts.push(format_scalar(c));
                }
                match k {
                    0 => {}
                    1 => parts.push("ħ".into()),
                    _ => parts.push(format!("ħ^{k}")),
                }
                parts.extend(mono);
                write!(f, "{}", parts.join("·"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::real_int;

    fn table() -> (Arc<GeneratorTable>, GenId, GenId, GenId, GenId) {
        let mut b = GeneratorTable::builder();
        let x = b.bare("x", 0).unwrap();
        let y = b.bare("y", 0).unwrap();
        let t1 = b.bare("t1", 1).unwrap();
        let t2 = b.bare("t2", 1).unwrap();
        (b.build(), x, y, t1, t2)
    }

    #[test]
    fn odd_square_vanishes() {
        let (t, _, _, t1, _) = table();
        let th = SuperPoly::generator(&t, t1);
        assert!(th.mul(&th).is_zero());
    }

    #[test]
    fn odd_generators_anticommute() {
        let (t, _, _, t1, t2) = table();
        let a = SuperPoly::generator(&t, t1);
        let b = SuperPoly::generator(&t, t2);
        assert!(a.mul(&b).add(&b.mul(&a)).is_zero());
        assert!(!a.mul(&b).is_zero());
    }

    #[test]
    fn even_product_is_commutative() {
        let (t, x, _, _, _) = table();
        let two_x = SuperPoly::generator(&t, x).scale(&real_int(2));
        let three_x = SuperPoly::generator(&t, x).scale(&real_int(3));
        let expected = SuperPoly::from_product(&t, real_int(6), 0, &[x, x]);
        assert_eq!(two_x.mul(&three_x), expected);
    }

    #[test]
    fn left_derivative_signs() {
        let (t, x, _, t1, t2) = table();
        let th12 = SuperPoly::from_product(&t, real_int(1), 0, &[t1, t2]);
        assert_eq!(th12.left_derivative(t1), SuperPoly::generator(&t, t2));
        assert_eq!(th12.left_derivative(t2), SuperPoly::generator(&t, t1).neg());
        let x2t = SuperPoly::from_product(&t, real_int(1), 0, &[x, x, t1]);
        assert_eq!(x2t.left_derivative(x), SuperPoly::from_product(&t, real_int(2), 0, &[x, t1]));
        // twice along an odd generator vanishes
        assert!(th12.left_derivative(t1).left_derivative(t1).is_zero());
    }

    #[test]
    fn truncation_is_flagged() {
        let (t, x, _, _, _) = table();
        let p = SuperPoly::generator(&t, x).shift_hbar(2).with_order(DEFAULT_HBAR_ORDER);
        let q = p.mul(&SuperPoly::hbar_power(&t, 1));
        assert!(q.is_zero());
        assert!(q.is_truncated());
    }

    #[test]
    fn mismatched_tables_error() {
        let (t, x, _, _, _) = table();
        let (u, _, _, _, _) = table();
        let a = SuperPoly::generator(&t, x);
        let b = SuperPoly::generator(&u, x);
        assert!(matches!(a.try_mul(&b), Err(Error::TableMismatch)));
        assert!(matches!(a.try_add(&b), Err(Error::TableMismatch)));
    }

    #[test]
    fn substitution_is_an_algebra_morphism() {
        let (t, x, y, t1, t2) = table();
        let f = SuperPoly::from_product(&t, real_int(1), 0, &[x, t2, t1]);
        let mut img = HashMap::new();
        img.insert(x, SuperPoly::generator(&t, y).add(&SuperPoly::one(&t)));
        img.insert(t1, SuperPoly::generator(&t, t2).scale(&real_int(2)));
        // x t2 t1 -> (y+1) t2 (2 t2) = 0
        assert!(f.substitute(&img).is_zero());
    }
}
