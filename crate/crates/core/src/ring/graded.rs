//! Graded coefficient rings.
//!
//! Coefficients live in one of two polynomial rings:
//!
//! * `ZetaQ` — `Q[z2, z4, z6, ...]` where `z2k` stands for the q-zeta value
//!   of weight 2k and carries degree 2k,
//! * `PiSquared` — `Q[pi2]` where `pi2` stands for pi^2 and carries degree 2.
//!
//! In both cases generator index `i` (zero-based) has degree `2(i+1)`, so a
//! single sparse-monomial representation serves both families. All arithmetic
//! is exact over arbitrary-precision rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. Always reduced, denominator positive.
pub type Rational = BigRational;

/// Convenience constructor for a rational from machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// The generator family of a graded coefficient.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Family {
    /// Generators z2, z4, z6, ... of degrees 2, 4, 6, ...
    ZetaQ,
    /// Single generator pi2 of degree 2.
    PiSquared,
}

impl Family {
    /// Printable name of generator `i` (zero-based).
    pub fn generator_name(self, i: usize) -> String {
        match self {
            Family::ZetaQ => format!("z{}", 2 * (i + 1)),
            Family::PiSquared => {
                debug_assert_eq!(i, 0);
                "pi2".to_string()
            }
        }
    }
}

/// A monomial in the ring generators, stored as a trimmed exponent vector.
/// Entry `i` is the exponent of generator `i`; trailing zeros are removed so
/// equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    exps: Vec<u16>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    pub fn generator(index: usize) -> Self {
        let mut exps = vec![0; index + 1];
        exps[index] = 1;
        Monomial { exps }
    }

    pub fn from_exponents(exps: Vec<u16>) -> Self {
        let mut m = Monomial { exps };
        m.trim();
        m
    }

    fn trim(&mut self) {
        while self.exps.last() == Some(&0) {
            self.exps.pop();
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn exponent(&self, i: usize) -> u16 {
        self.exps.get(i).copied().unwrap_or(0)
    }

    /// Graded degree: generator `i` weighs `2(i+1)`.
    pub fn degree(&self) -> u32 {
        self.exps
            .iter()
            .enumerate()
            .map(|(i, &e)| 2 * (i as u32 + 1) * e as u32)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let len = self.exps.len().max(other.exps.len());
        let mut exps = vec![0u16; len];
        for (i, e) in exps.iter_mut().enumerate() {
            *e = self.exponent(i) + other.exponent(i);
        }
        Monomial::from_exponents(exps)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded-lexicographic order: degree first, then exponents left to right.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let len = self.exps.len().max(other.exps.len());
            for i in 0..len {
                match self.exponent(i).cmp(&other.exponent(i)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

/// The grade of a coefficient; the zero coefficient has grade `NegInfinity`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Grade {
    NegInfinity,
    Finite(u32),
}

impl Grade {
    pub fn finite(self) -> Option<u32> {
        match self {
            Grade::NegInfinity => None,
            Grade::Finite(d) => Some(d),
        }
    }
}

/// An exact element of the graded ring: a sparse map from monomials to
/// nonzero rationals. Zero coefficients are pruned eagerly, so structural
/// equality is semantic equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedCoefficient {
    family: Family,
    terms: BTreeMap<Monomial, Rational>,
}

impl GradedCoefficient {
    pub fn zero(family: Family) -> Self {
        GradedCoefficient {
            family,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(family: Family) -> Self {
        Self::from_rational(family, Rational::one())
    }

    pub fn from_rational(family: Family, r: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(Monomial::one(), r);
        }
        GradedCoefficient { family, terms }
    }

    pub fn from_int(family: Family, v: i64) -> Self {
        Self::from_rational(family, rat(v, 1))
    }

    /// The q-zeta generator of weight `2k` (so `zeta_q(2)` is `k = 1`).
    pub fn zeta_q(k: usize) -> Self {
        assert!(k >= 1, "zeta_q weight index must be >= 1");
        Self::monomial(Family::ZetaQ, Monomial::generator(k - 1), Rational::one())
    }

    /// The generator pi^2 of the classical family.
    pub fn pi2() -> Self {
        Self::monomial(Family::PiSquared, Monomial::generator(0), Rational::one())
    }

    pub fn monomial(family: Family, m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        GradedCoefficient { family, terms }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the unit monomial.
    pub fn constant_part(&self) -> Rational {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// True when the value is a plain rational (no generators).
    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let remove = match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                v.is_zero()
            }
            None => {
                self.terms.insert(m.clone(), c.clone());
                false
            }
        };
        if remove {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.family);
        }
        GradedCoefficient {
            family: self.family,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Maximal graded degree over monomials; `NegInfinity` for zero.
    pub fn grade(&self) -> Grade {
        self.terms
            .keys()
            .map(Monomial::degree)
            .max()
            .map_or(Grade::NegInfinity, Grade::Finite)
    }

    /// The part of this coefficient whose monomials have degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        GradedCoefficient {
            family: self.family,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, v)| (m.clone(), v.clone()))
                .collect(),
        }
    }

    /// True when every monomial has degree exactly `d`.
    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    fn assert_family(&self, other: &Self) {
        assert_eq!(
            self.family, other.family,
            "graded coefficient family mismatch"
        );
    }

    /// Map each `zeta_q(2k)` to the classical `zeta(2k)` in `Q[pi2]`.
    pub fn specialize_classical(&self) -> Result<GradedCoefficient> {
        if self.family != Family::ZetaQ {
            return Err(Error::FamilyMismatch);
        }
        let mut out = GradedCoefficient::zero(Family::PiSquared);
        for (m, c) in &self.terms {
            let mut factor = GradedCoefficient::from_rational(Family::PiSquared, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    factor = &factor * &classical_zeta(i + 1);
                }
            }
            out = &out + &factor;
        }
        Ok(out)
    }

    /// Map every generator to zero, keeping the constant term.
    pub fn specialize_zero(&self) -> GradedCoefficient {
        GradedCoefficient::from_rational(self.family, self.constant_part())
    }

    /// Evaluate with generator `i` replaced by `values(i)`.
    pub fn eval_f64(&self, values: &mut dyn FnMut(usize) -> f64) -> f64 {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut v = rational_to_f64(c);
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    v *= values(i).powi(e as i32);
                }
            }
            total += v;
        }
        total
    }

    /// Canonical text rendering, e.g. `5/2*z4 + 7/2*z2^2 - 1/2*z2 + 1/12`.
    /// Terms print in descending grade, then descending monomial order.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            parts.push((c.is_negative(), render_monomial(self.family, m, c)));
        }
        join_signed(parts)
    }
}

pub(crate) fn render_monomial(family: Family, m: &Monomial, c: &Rational) -> String {
    let abs = c.abs();
    let mut factors: Vec<String> = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 1 {
            factors.push(family.generator_name(i));
        } else if e > 1 {
            factors.push(format!("{}^{}", family.generator_name(i), e));
        }
    }
    if factors.is_empty() {
        format!("{}", abs)
    } else if abs.is_one() {
        factors.join("*")
    } else {
        format!("{}*{}", abs, factors.join("*"))
    }
}

pub(crate) fn join_signed(parts: Vec<(bool, String)>) -> String {
    let mut out = String::new();
    for (i, (neg, body)) in parts.into_iter().enumerate() {
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&body);
    }
    out
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    // exact enough for the oracle's spot checks; numerators stay small here
    let num = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let den = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    num / den
}

impl fmt::Display for GradedCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl Add for &GradedCoefficient {
    type Output = GradedCoefficient;
    fn add(self, rhs: &GradedCoefficient) -> GradedCoefficient {
        self.assert_family(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Sub for &GradedCoefficient {
    type Output = GradedCoefficient;
    fn sub(self, rhs: &GradedCoefficient) -> GradedCoefficient {
        self.assert_family(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &(-c.clone()));
        }
        out
    }
}

impl Neg for &GradedCoefficient {
    type Output = GradedCoefficient;
    fn neg(self) -> GradedCoefficient {
        GradedCoefficient {
            family: self.family,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &GradedCoefficient {
    type Output = GradedCoefficient;
    fn mul(self, rhs: &GradedCoefficient) -> GradedCoefficient {
        self.assert_family(rhs);
        let mut out = GradedCoefficient::zero(self.family);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }
}

/// Bernoulli number B_n (B_1 = -1/2 convention), exact.
pub fn bernoulli(n: usize) -> Rational {
    // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(Rational::one());
            continue;
        }
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            let c = num_integer::binomial(BigInt::from(m + 1), BigInt::from(j));
            acc += Rational::from_integer(c) * bj;
        }
        let denom = Rational::from_integer(BigInt::from(m + 1));
        b.push(-acc / denom);
    }
    b[n].clone()
}

/// Classical even zeta value zeta(2i) as an exact multiple of pi^{2i},
/// via zeta(2i) = (-1)^{i+1} B_{2i} (2 pi)^{2i} / (2 (2i)!). zeta(0) = -1/2.
pub fn classical_zeta(i: usize) -> GradedCoefficient {
    if i == 0 {
        return GradedCoefficient::from_rational(Family::PiSquared, rat(-1, 2));
    }
    let b2i = bernoulli(2 * i);
    let mut two_pow = BigInt::one();
    let mut fact = BigInt::one();
    for j in 1..=2 * i {
        two_pow *= 2;
        fact *= j;
    }
    let sign = if i % 2 == 1 { 1 } else { -1 };
    let coeff = b2i * Rational::new(BigInt::from(sign) * two_pow, BigInt::from(2) * fact);
    GradedCoefficient::monomial(
        Family::PiSquared,
        Monomial::from_exponents(vec![i as u16]),
        coeff,
    )
}

/// Exact factorial as a rational.
pub fn factorial(n: u32) -> Rational {
    let mut f = BigInt::one();
    for i in 1..=n as u64 {
        f *= i;
    }
    Rational::from_integer(f)
}

/// Exact binomial coefficient as a rational.
pub fn binomial(n: u64, k: u64) -> Rational {
    if k > n {
        return Rational::zero();
    }
    Rational::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grade_of_products_and_display_coefficient() {
        let z2 = GradedCoefficient::zeta_q(1);
        let z4 = GradedCoefficient::zeta_q(2);
        assert_eq!((&z2 * &z4).grade(), Grade::Finite(6));

        // the (g,n) = (1,2) constant: 5/2 z4 + 7/2 z2^2 - 1/2 z2 + 1/12
        let c = &(&(&z4.scale(&rat(5, 2)) + &(&z2 * &z2).scale(&rat(7, 2)))
            - &z2.scale(&rat(1, 2)))
            + &GradedCoefficient::from_rational(Family::ZetaQ, rat(1, 12));
        assert_eq!(c.grade(), Grade::Finite(4));
        assert_eq!(
            GradedCoefficient::zero(Family::ZetaQ).grade(),
            Grade::NegInfinity
        );
    }

    #[test]
    fn classical_zeta_closed_forms() {
        // zeta(0) = -1/2, zeta(2) = pi^2/6, zeta(6) = pi^6/945
        assert_eq!(classical_zeta(0).constant_part(), rat(-1, 2));
        let expected = [
            (1usize, rat(1, 6)),
            (2, rat(1, 90)),
            (3, rat(1, 945)),
            (4, rat(1, 9450)),
            (5, rat(1, 93555)),
            (6, Rational::new(BigInt::from(691), BigInt::from(638512875i64))),
        ];
        for (i, c) in expected {
            let z = classical_zeta(i);
            let m = Monomial::from_exponents(vec![i as u16]);
            assert_eq!(z.terms().next().unwrap(), (&m, &c), "zeta(2*{i})");
        }
    }

    #[test]
    fn specialize_examples() {
        // zeta_q(2)/2 -> pi^2/12
        let half_z2 = GradedCoefficient::zeta_q(1).scale(&rat(1, 2));
        let s = half_z2.specialize_classical().unwrap();
        assert_eq!(s, classical_zeta(1).scale(&rat(1, 2)));
        // 7 zeta_q(2)^2 + 5 zeta_q(4) -> pi^4/4
        let z2 = GradedCoefficient::zeta_q(1);
        let v = &(&z2 * &z2).scale(&rat(7, 1)) + &GradedCoefficient::zeta_q(2).scale(&rat(5, 1));
        let s = v.specialize_classical().unwrap();
        let pi4_over_4 = GradedCoefficient::monomial(
            Family::PiSquared,
            Monomial::from_exponents(vec![2]),
            rat(1, 4),
        );
        assert_eq!(s, pi4_over_4);
        // zero specialization
        let z = &(&z2 * &z2) + &GradedCoefficient::zeta_q(2);
        assert!(z.specialize_zero().is_zero());
    }

    #[test]
    fn render_canonical() {
        let z2 = GradedCoefficient::zeta_q(1);
        let c = &z2.scale(&rat(1, 2)) + &GradedCoefficient::from_rational(Family::ZetaQ, rat(-1, 12));
        assert_eq!(c.render(), "1/2*z2 - 1/12");
        assert_eq!(GradedCoefficient::zero(Family::ZetaQ).render(), "0");
        assert_eq!(classical_zeta(2).render(), "1/90*pi2^2");
    }
}
