//! From correlation differentials to the polynomial objects: discrete
//! volumes (parity quasi-polynomials), inverse-Laplace volumes, top-degree
//! parts and the classical limit.

use crate::curves::CurveId;
use crate::error::{Error, Result};
use crate::ring::graded::{factorial, rat, Family, GradedCoefficient, Rational};
use crate::ring::poly::{BoundaryPolynomial, Parity, ParityQuasiPolynomial, VarMonomial};
use crate::trec::CorrelationDifferential;
use num_traits::One;

/// Expansion of one basis factor into a polynomial of the boundary variable:
/// the coefficient of `z^{b-1}` in `b^{-1}/(z - a)^{k+2}` is
/// `sign * (b+1)(b+2)...(b+k)/(k+1)!` with `sign = (-1)^k` at `a = +1` and
/// `(-1)^{b-1}` at `a = -1`. Returns the polynomial coefficients of
/// `(b+1)...(b+k)/(k+1)!` in ascending powers of `b`.
fn rising_factor_poly(k: u32) -> Vec<Rational> {
    let mut coeffs = vec![Rational::one()];
    for j in 1..=k as i64 {
        // multiply by (b + j)
        let mut next = vec![Rational::from_integer(0.into()); coeffs.len() + 1];
        for (e, c) in coeffs.iter().enumerate() {
            next[e] = &next[e] + &(c * rat(j, 1));
            next[e + 1] = &next[e + 1] + c;
        }
        coeffs = next;
    }
    let f = factorial(k + 1);
    coeffs.into_iter().map(|c| c / &f).collect()
}

/// Okuyama's discrete volume: the quasi-polynomial `N` with
/// `omega_{g,n} = sum N(b) prod b_i z_i^{b_i - 1} dz_i`.
pub fn discrete_volume(omega: &CorrelationDifferential) -> Result<ParityQuasiPolynomial> {
    if omega.curve() != CurveId::Okuyama {
        return Err(Error::WrongCurve(format!(
            "discrete_volume needs the two-branch curve, got {}",
            omega.curve().name()
        )));
    }
    let n = omega.n() as usize;
    let family = Family::ZetaQ;
    let mut out = ParityQuasiPolynomial::new(family, n);
    for parity in ParityQuasiPolynomial::all_parities(n) {
        let mut class_poly = BoundaryPolynomial::zero(family, n);
        for (key, coeff) in omega.terms() {
            // per-variable polynomial factors with their parity signs
            let mut acc: Vec<(VarMonomial, Rational)> =
                vec![(VarMonomial::unit(n), Rational::one())];
            for i in 0..n {
                let k = key.orders[i];
                debug_assert!(k >= 0, "corrupted differential fed to discrete_volume");
                let poly = rising_factor_poly(k as u32);
                let sign = match key.branches[i] {
                    1 => {
                        if k % 2 == 0 {
                            Rational::one()
                        } else {
                            -Rational::one()
                        }
                    }
                    _ => match parity[i] {
                        Parity::Odd => Rational::one(),
                        Parity::Even => -Rational::one(),
                    },
                };
                let mut next = Vec::with_capacity(acc.len() * poly.len());
                for (m, c) in &acc {
                    for (e, pc) in poly.iter().enumerate() {
                        if num_traits::Zero::is_zero(pc) {
                            continue;
                        }
                        let mut m2 = m.clone();
                        m2.0[i] += e as u16;
                        next.push((m2, c * pc * &sign));
                    }
                }
                acc = next;
            }
            for (m, c) in acc {
                class_poly.add_term(m, &coeff.scale(&c));
            }
        }
        out.set_class(parity, class_poly);
    }
    out.assert_even_exponents()?;
    Ok(out)
}

/// Inverse Laplace transform of a one-branch correlator: the coefficient of
/// `prod L_i^{2 a_i}` in `V` is `C_{(2a_i)} / prod (2a_i + 1)!`.
pub fn inverse_laplace_volume(omega: &CorrelationDifferential) -> Result<BoundaryPolynomial> {
    match omega.curve() {
        CurveId::TopQ | CurveId::WpClassical | CurveId::Airy => {}
        other => {
            return Err(Error::WrongCurve(format!(
                "inverse_laplace_volume needs a one-branch curve, got {}",
                other.name()
            )))
        }
    }
    let n = omega.n() as usize;
    let family = omega.curve().family();
    let mut out = BoundaryPolynomial::zero(family, n);
    for (key, coeff) in omega.terms() {
        let mut m = VarMonomial::unit(n);
        let mut denom = Rational::one();
        for i in 0..n {
            let k = key.orders[i];
            if k < 0 || k % 2 != 0 {
                return Err(Error::OddOrder {
                    order: k.unsigned_abs(),
                });
            }
            m.0[i] = k as u16;
            denom *= factorial(k as u32 + 1);
        }
        out.add_term(m, &coeff.scale(&(Rational::one() / denom)));
    }
    Ok(out)
}

/// The degree-(6g-6+2n) part of the discrete volume. Parity classes whose
/// top part vanishes identically are skipped; all remaining classes must
/// agree (and at least one must be nonzero, except for the zero input).
pub fn top_degree_volume(
    n_poly: &ParityQuasiPolynomial,
    g: u32,
    n: u32,
) -> Result<BoundaryPolynomial> {
    let d = (6 * g as i64 - 6 + 2 * n as i64) as u32;
    let mut common: Option<BoundaryPolynomial> = None;
    for parity in ParityQuasiPolynomial::all_parities(n as usize) {
        let top = n_poly.class(&parity).top_part(d);
        if top.is_zero() {
            continue;
        }
        match &common {
            None => common = Some(top),
            Some(c) => {
                if *c != top {
                    return Err(Error::ParityDisagreement);
                }
            }
        }
    }
    Ok(common.unwrap_or_else(|| BoundaryPolynomial::zero(Family::ZetaQ, n as usize)))
}

/// The classical limit: top-degree part with every `zeta_q(2k)` replaced by
/// `zeta(2k)`. Equals `2^{3-2g-n} V_{g,n}` with boundary variables renamed.
pub fn wp_limit(n_poly: &ParityQuasiPolynomial, g: u32, n: u32) -> Result<BoundaryPolynomial> {
    top_degree_volume(n_poly, g, n)?.specialize_classical()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::graded::classical_zeta;
    use crate::trec::Engine;

    fn zq(k: usize) -> GradedCoefficient {
        GradedCoefficient::zeta_q(k)
    }

    #[test]
    fn discrete_volume_of_omega_11() {
        let engine = Engine::new();
        let om = engine.correlator(CurveId::Okuyama, 1, 1).unwrap();
        let nq = discrete_volume(&om).unwrap();
        // even class: b^2/48 + z2/2 - 1/12
        let even = nq.class(&[Parity::Even]);
        assert_eq!(
            even.coefficient(&VarMonomial(vec![2])),
            GradedCoefficient::from_rational(Family::ZetaQ, rat(1, 48))
        );
        let c0 = &zq(1).scale(&rat(1, 2))
            + &GradedCoefficient::from_rational(Family::ZetaQ, rat(-1, 12));
        assert_eq!(even.coefficient(&VarMonomial(vec![0])), c0);
        assert_eq!(even.terms().count(), 2);
        // odd class: 0
        assert!(nq.class(&[Parity::Odd]).is_zero());
    }

    /// Independent oracle: read the z-expansion coefficients of omega_{1,1}
    /// directly (exact rational geometric expansions at a sample exponent b)
    /// and compare with the extracted class polynomial evaluated at b.
    #[test]
    fn discrete_volume_matches_direct_series_coefficients() {
        let engine = Engine::new();
        let om = engine.correlator(CurveId::Okuyama, 1, 1).unwrap();
        let nq = discrete_volume(&om).unwrap();
        for b in 1u64..=12 {
            // coefficient of z^{b-1} in 1/(z-1)^{k+2} is (-1)^k C(b+k, k+1);
            // in 1/(z+1)^{k+2} it is (-1)^{b-1} C(b+k, k+1)
            let mut direct = GradedCoefficient::zero(Family::ZetaQ);
            for (key, c) in om.terms() {
                let k = key.orders[0] as u64;
                let binom = crate::ring::graded::binomial(b + k, k + 1);
                let sign = match key.branches[0] {
                    1 => {
                        if k % 2 == 0 {
                            rat(1, 1)
                        } else {
                            rat(-1, 1)
                        }
                    }
                    _ => {
                        if (b - 1) % 2 == 0 {
                            rat(1, 1)
                        } else {
                            rat(-1, 1)
                        }
                    }
                };
                direct = &direct + &c.scale(&(binom * sign));
            }
            // N(b) = direct / b
            let direct = direct.scale(&Rational::new(1.into(), b.into()));
            let class = nq.class(&[Parity::of(b)]);
            // evaluate the class polynomial at b exactly
            let mut val = GradedCoefficient::zero(Family::ZetaQ);
            for (m, c) in class.terms() {
                let mut factor = Rational::one();
                for _ in 0..m.0[0] {
                    factor *= rat(b as i64, 1);
                }
                val = &val + &c.scale(&factor);
            }
            assert_eq!(val, direct, "b = {b}");
        }
    }

    #[test]
    fn discrete_volume_of_omega_03_class_table() {
        let engine = Engine::new();
        let om = engine.correlator(CurveId::Okuyama, 0, 3).unwrap();
        let nq = discrete_volume(&om).unwrap();
        for parity in ParityQuasiPolynomial::all_parities(3) {
            let odd_count = parity.iter().filter(|&&p| p == Parity::Odd).count();
            let class = nq.class(&parity);
            if odd_count % 2 == 0 {
                assert_eq!(class, BoundaryPolynomial::one(Family::ZetaQ, 3));
            } else {
                assert!(class.is_zero());
            }
        }
        // N^q_{0,3}(2,2,2) = 1
        let mut vals = |_: usize| 0.5f64;
        assert_eq!(nq.eval_f64(&[2, 2, 2], &mut vals), 1.0);
    }

    #[test]
    fn inverse_laplace_examples() {
        let engine = Engine::new();
        // omega^top_{1,1} -> L^2/48 + z2/2
        let om = engine.correlator(CurveId::TopQ, 1, 1).unwrap();
        let v = inverse_laplace_volume(&om).unwrap();
        assert_eq!(
            v.coefficient(&VarMonomial(vec![2])),
            GradedCoefficient::from_rational(Family::ZetaQ, rat(1, 48))
        );
        assert_eq!(v.coefficient(&VarMonomial(vec![0])), zq(1).scale(&rat(1, 2)));
        // omega^top_{0,3} -> 1
        let om = engine.correlator(CurveId::TopQ, 0, 3).unwrap();
        let v = inverse_laplace_volume(&om).unwrap();
        assert_eq!(v, BoundaryPolynomial::one(Family::ZetaQ, 3));
        // classical (1,1) -> L^2/48 + pi^2/12
        let om = engine.correlator(CurveId::WpClassical, 1, 1).unwrap();
        let v = inverse_laplace_volume(&om).unwrap();
        assert_eq!(
            v.coefficient(&VarMonomial(vec![0])),
            classical_zeta(1).scale(&rat(1, 2))
        );
    }

    #[test]
    fn top_degree_and_wp_limit_of_n11() {
        let engine = Engine::new();
        let om = engine.correlator(CurveId::Okuyama, 1, 1).unwrap();
        let nq = discrete_volume(&om).unwrap();
        let top = top_degree_volume(&nq, 1, 1).unwrap();
        // b^2/48 + z2/2 = 2^0 V^q_{1,1}
        assert_eq!(
            top.coefficient(&VarMonomial(vec![2])),
            GradedCoefficient::from_rational(Family::ZetaQ, rat(1, 48))
        );
        assert_eq!(top.coefficient(&VarMonomial(vec![0])), zq(1).scale(&rat(1, 2)));
        assert_eq!(top.terms().count(), 2);
        let wp = wp_limit(&nq, 1, 1).unwrap();
        assert_eq!(
            wp.coefficient(&VarMonomial(vec![0])),
            classical_zeta(1).scale(&rat(1, 2))
        );
    }

    #[test]
    fn wp_limit_of_zero_is_zero() {
        let nq = ParityQuasiPolynomial::new(Family::ZetaQ, 2);
        let w = wp_limit(&nq, 1, 2).unwrap();
        assert!(w.is_zero());
    }
}
