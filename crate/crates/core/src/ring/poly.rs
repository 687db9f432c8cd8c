//! Sparse polynomials in boundary variables and parity quasi-polynomials.
//!
//! A `BoundaryPolynomial` is a polynomial in `n` variables (the boundary
//! lengths `b_i` or `L_i`) with `GradedCoefficient` coefficients. Total
//! degree weights a variable exponent as 1 and a coefficient by its grade.
//!
//! A `ParityQuasiPolynomial` stores one `BoundaryPolynomial` per residue
//! class of the variables modulo 2; absent classes are zero.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ring::graded::{
    join_signed, render_monomial, Family, Grade, GradedCoefficient, Rational,
};
use num_traits::Signed;

/// Exponent vector of the boundary variables, fixed length `n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarMonomial(pub Vec<u16>);

impl VarMonomial {
    pub fn unit(n: usize) -> Self {
        VarMonomial(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &VarMonomial) -> VarMonomial {
        VarMonomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn permuted(&self, perm: &[usize]) -> VarMonomial {
        VarMonomial(perm.iter().map(|&i| self.0[i]).collect())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoundaryPolynomial {
    n: usize,
    family: Family,
    terms: BTreeMap<VarMonomial, GradedCoefficient>,
}

impl BoundaryPolynomial {
    pub fn zero(family: Family, n: usize) -> Self {
        BoundaryPolynomial {
            n,
            family,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: GradedCoefficient) -> Self {
        let mut p = Self::zero(c.family(), n);
        p.add_term(VarMonomial::unit(n), &c);
        p
    }

    pub fn one(family: Family, n: usize) -> Self {
        Self::constant(n, GradedCoefficient::one(family))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&VarMonomial, &GradedCoefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &VarMonomial) -> GradedCoefficient {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| GradedCoefficient::zero(self.family))
    }

    pub fn add_term(&mut self, m: VarMonomial, c: &GradedCoefficient) {
        debug_assert_eq!(m.0.len(), self.n);
        if c.is_zero() {
            return;
        }
        let remove = match self.terms.get_mut(&m) {
            Some(v) => {
                *v = &*v + c;
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

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.family, self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &GradedCoefficient) -> Self {
        let mut out = Self::zero(self.family, self.n);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &(v * c));
        }
        out
    }

    pub fn scale_rat(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.family, self.n);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &v.scale(c));
        }
        out
    }

    /// Total degree of the polynomial: max over terms of variable degree
    /// plus coefficient grade.
    pub fn total_degree(&self) -> Grade {
        let mut best = Grade::NegInfinity;
        for (m, c) in &self.terms {
            if let Grade::Finite(g) = c.grade() {
                best = best.max(Grade::Finite(m.degree() + g));
            }
        }
        best
    }

    /// Keep exactly the terms of total degree `d` (variable degree plus
    /// coefficient grade, computed monomial by monomial).
    pub fn top_part(&self, d: u32) -> Self {
        let mut out = Self::zero(self.family, self.n);
        for (m, c) in &self.terms {
            let vd = m.degree();
            if vd > d {
                continue;
            }
            let part = c.homogeneous_part(d - vd);
            out.add_term(m.clone(), &part);
        }
        out
    }

    /// True when invariant under every simultaneous permutation of variables.
    pub fn is_symmetric(&self) -> bool {
        let perms = permutations(self.n);
        for perm in &perms {
            for (m, c) in &self.terms {
                if &self.coefficient(&m.permuted(perm)) != c {
                    return false;
                }
            }
        }
        true
    }

    /// Apply a permutation to the variables: variable `perm[i]` of `self`
    /// becomes variable `i` of the result.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(self.family, self.n);
        for (m, c) in &self.terms {
            out.add_term(m.permuted(perm), c);
        }
        out
    }

    /// Map every coefficient through `zeta_q(2k) -> zeta(2k)`.
    pub fn specialize_classical(&self) -> Result<Self> {
        let mut out = Self::zero(Family::PiSquared, self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &c.specialize_classical()?);
        }
        Ok(out)
    }

    /// Map every generator to zero in each coefficient.
    pub fn specialize_zero(&self) -> Self {
        let mut out = Self::zero(self.family, self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &c.specialize_zero());
        }
        out
    }

    /// Evaluate at integer arguments with generator `i` replaced by
    /// `gen_values(i)`.
    pub fn eval_f64(&self, args: &[f64], gen_values: &mut dyn FnMut(usize) -> f64) -> f64 {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut v = c.eval_f64(gen_values);
            for (x, &e) in args.iter().zip(&m.0) {
                if e > 0 {
                    v *= x.powi(e as i32);
                }
            }
            total += v;
        }
        total
    }

    /// Canonical rendering with the given variable prefix ("b" or "L").
    /// Terms print by descending total degree, then descending variable
    /// monomial, then ascending generator monomial.
    pub fn render(&self, var_prefix: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut flat: Vec<(u32, VarMonomial, String, bool)> = Vec::new();
        for (m, c) in &self.terms {
            for (gm, r) in c.terms() {
                let total = m.degree() + gm.degree();
                let body = render_poly_monomial(self.family, gm, r, m, var_prefix);
                flat.push((total, m.clone(), body, r.is_negative()));
            }
        }
        flat.sort_by(|a, b| {
            b.0.cmp(&a.0)
                .then_with(|| b.1.cmp(&a.1))
                .then_with(|| a.2.cmp(&b.2))
        });
        join_signed(flat.into_iter().map(|(_, _, s, neg)| (neg, s)).collect())
    }
}

fn render_poly_monomial(
    family: Family,
    gm: &crate::ring::graded::Monomial,
    r: &Rational,
    vm: &VarMonomial,
    var_prefix: &str,
) -> String {
    let head = render_monomial(family, gm, r);
    let mut factors: Vec<String> = Vec::new();
    for (i, &e) in vm.0.iter().enumerate() {
        if e == 1 {
            factors.push(format!("{}{}", var_prefix, i + 1));
        } else if e > 1 {
            factors.push(format!("{}{}^{}", var_prefix, i + 1, e));
        }
    }
    if factors.is_empty() {
        head
    } else if head == "1" {
        factors.join("*")
    } else {
        format!("{}*{}", head, factors.join("*"))
    }
}

impl fmt::Display for BoundaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("b"))
    }
}

/// Parity of one boundary variable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(b: u64) -> Parity {
        if b % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A quasi-polynomial: one polynomial per parity class of the variables.
/// Missing classes are the zero polynomial.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParityQuasiPolynomial {
    n: usize,
    family: Family,
    classes: BTreeMap<Vec<Parity>, BoundaryPolynomial>,
}

impl ParityQuasiPolynomial {
    pub fn new(family: Family, n: usize) -> Self {
        ParityQuasiPolynomial {
            n,
            family,
            classes: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set_class(&mut self, parity: Vec<Parity>, p: BoundaryPolynomial) {
        assert_eq!(parity.len(), self.n);
        assert_eq!(p.n(), self.n);
        if p.is_zero() {
            self.classes.remove(&parity);
        } else {
            self.classes.insert(parity, p);
        }
    }

    pub fn class(&self, parity: &[Parity]) -> BoundaryPolynomial {
        self.classes
            .get(parity)
            .cloned()
            .unwrap_or_else(|| BoundaryPolynomial::zero(self.family, self.n))
    }

    pub fn classes(&self) -> impl Iterator<Item = (&Vec<Parity>, &BoundaryPolynomial)> {
        self.classes.iter()
    }

    /// All 2^n parity vectors in canonical order.
    pub fn all_parities(n: usize) -> Vec<Vec<Parity>> {
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0..(1u32 << n) {
            out.push(
                (0..n)
                    .map(|i| {
                        if mask >> i & 1 == 0 {
                            Parity::Even
                        } else {
                            Parity::Odd
                        }
                    })
                    .collect(),
            );
        }
        out
    }

    /// Evaluate at a vector of positive integers.
    pub fn eval_f64(&self, b: &[u64], gen_values: &mut dyn FnMut(usize) -> f64) -> f64 {
        let parity: Vec<Parity> = b.iter().map(|&x| Parity::of(x)).collect();
        let args: Vec<f64> = b.iter().map(|&x| x as f64).collect();
        self.class(&parity).eval_f64(&args, gen_values)
    }

    /// Check that every class polynomial is even in every variable.
    pub fn assert_even_exponents(&self) -> Result<()> {
        for (parity, p) in &self.classes {
            for (m, _) in p.terms() {
                if m.0.iter().any(|&e| e % 2 == 1) {
                    return Err(Error::OddPowerSurvivor {
                        class: parity
                            .iter()
                            .map(|p| match p {
                                Parity::Even => 0,
                                Parity::Odd => 1,
                            })
                            .collect(),
                        monomial: m.0.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Symmetry under simultaneous permutation of variables and parities.
    pub fn is_symmetric(&self) -> bool {
        let perms = permutations(self.n);
        for perm in &perms {
            for parity in Self::all_parities(self.n) {
                let permuted_parity: Vec<Parity> = perm.iter().map(|&i| parity[i]).collect();
                if self.class(&parity).permute(perm) != self.class(&permuted_parity) {
                    return false;
                }
            }
        }
        true
    }

    /// Max total degree over classes.
    pub fn total_degree(&self) -> Grade {
        self.classes
            .values()
            .map(BoundaryPolynomial::total_degree)
            .max()
            .unwrap_or(Grade::NegInfinity)
    }
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    permute_rec(&mut items, 0, &mut out);
    out
}

fn permute_rec(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute_rec(items, k + 1, out);
        items.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::graded::rat;

    fn zq(k: usize) -> GradedCoefficient {
        GradedCoefficient::zeta_q(k)
    }

    #[test]
    fn top_part_keeps_mixed_degree_layer() {
        // b^2/48 + z2/2 - 1/12, top degree 2 -> b^2/48 + z2/2
        let mut p = BoundaryPolynomial::zero(Family::ZetaQ, 1);
        p.add_term(
            VarMonomial(vec![2]),
            &GradedCoefficient::from_rational(Family::ZetaQ, rat(1, 48)),
        );
        let c = &zq(1).scale(&rat(1, 2))
            + &GradedCoefficient::from_rational(Family::ZetaQ, rat(-1, 12));
        p.add_term(VarMonomial(vec![0]), &c);
        let top = p.top_part(2);
        assert_eq!(
            top.coefficient(&VarMonomial(vec![2])),
            GradedCoefficient::from_rational(Family::ZetaQ, rat(1, 48))
        );
        assert_eq!(top.coefficient(&VarMonomial(vec![0])), zq(1).scale(&rat(1, 2)));
        assert_eq!(p.total_degree(), Grade::Finite(2));

        // identity on constants
        let one = BoundaryPolynomial::one(Family::ZetaQ, 1);
        assert_eq!(one.top_part(0), one);
        // zero in, zero out
        let zero = BoundaryPolynomial::zero(Family::ZetaQ, 1);
        assert!(zero.top_part(4).is_zero());
    }

    #[test]
    fn render_matches_canonical_format() {
        let mut p = BoundaryPolynomial::zero(Family::ZetaQ, 1);
        p.add_term(
            VarMonomial(vec![2]),
            &GradedCoefficient::from_rational(Family::ZetaQ, rat(1, 48)),
        );
        p.add_term(VarMonomial(vec![0]), &zq(1).scale(&rat(1, 2)));
        assert_eq!(p.render("b"), "1/48*b1^2 + 1/2*z2");
    }

    #[test]
    fn quasi_polynomial_class_lookup_defaults_to_zero() {
        let q = ParityQuasiPolynomial::new(Family::ZetaQ, 2);
        assert!(q.class(&[Parity::Odd, Parity::Even]).is_zero());
    }
}
