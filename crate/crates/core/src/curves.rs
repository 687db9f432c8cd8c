//! Spectral-curve local data: branch points, recursion-kernel Laurent
//! expansions, deck-transformation coordinates, and the local expansion of
//! the bidifferential channel.
//!
//! Only the local data at the branch points enters the recursion:
//!
//! * the kernel factor `1/(2 y(z) x'(z))` expanded at each branch point,
//! * the deck coordinate `s(t) = sigma(alpha + t) - alpha`,
//! * the expansion of `omega_{0,2}` combinations in the pole basis.
//!
//! Four curves are supported. The two-branch curve (`Okuyama`) has branch
//! points at z = +1 and z = -1 with involution z -> 1/z; the one-branch
//! curves (`TopQ`, `WpClassical`, `Airy`) sit at z = 0 with involution
//! z -> -z.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::One;

use crate::error::{Error, Result};
use crate::ring::graded::{binomial, rat, Family, GradedCoefficient, Rational};
use crate::ring::series::LaurentSeries;

/// Identifier of one of the supported spectral curves.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum CurveId {
    /// x = z + 1/z, y = (1/2)(z - 1/z) prod (1-q^k z^2)(1-q^k z^-2)/(1-q^k)^2.
    Okuyama,
    /// x = z^2/2, y = z exp(-sum zeta_q(2m) (4 z^2)^m / m).
    TopQ,
    /// x = z^2/2, y = sin(2 pi z)/(2 pi); the classical image of `TopQ`.
    WpClassical,
    /// x = z^2/2, y = z.
    Airy,
}

/// Branch-point label: +1 or -1 for the two-branch curve, 0 otherwise.
pub type Branch = i8;

impl CurveId {
    pub fn branches(self) -> &'static [Branch] {
        match self {
            CurveId::Okuyama => &[1, -1],
            _ => &[0],
        }
    }

    pub fn family(self) -> Family {
        match self {
            CurveId::Okuyama | CurveId::TopQ => Family::ZetaQ,
            CurveId::WpClassical | CurveId::Airy => Family::PiSquared,
        }
    }

    /// All four curves have odd x and y up to the curve symmetry, so their
    /// stable correlators flip sign under z -> 1/z (Okuyama) or z -> -z.
    pub fn odd_symmetry(self) -> bool {
        true
    }

    pub fn name(self) -> &'static str {
        match self {
            CurveId::Okuyama => "okuyama",
            CurveId::TopQ => "topq",
            CurveId::WpClassical => "wp-classical",
            CurveId::Airy => "airy",
        }
    }

    pub fn parse(s: &str) -> Option<CurveId> {
        match s {
            "okuyama" => Some(CurveId::Okuyama),
            "topq" => Some(CurveId::TopQ),
            "wp-classical" | "wpclassical" | "wp" => Some(CurveId::WpClassical),
            "airy" => Some(CurveId::Airy),
            _ => None,
        }
    }
}

/// Side selector for the kernel-exponent coefficient tables.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    /// Expansion at z = +1 (the `a_{mk}` table).
    Plus,
    /// Expansion at z = -1 (the `b_{mk}` table).
    Minus,
}

/// Coefficient of `t^{m-2k}` in `(1/k) ((2 -+ t)/(1 -+ t))^{2k}`: the
/// expansion tables of the kernel exponent at z = +-1.
pub fn a_coefficient(m: u32, k: u32, side: Side) -> Result<Rational> {
    if k < 1 || m < 2 || k > m / 2 {
        return Err(Error::IndexOutOfRange(format!(
            "a_coefficient needs m >= 2, 1 <= k <= m/2, got m={m}, k={k}"
        )));
    }
    let hi = (m - 2 * k) as i64;
    // (2 - t + t^2 - ...) = (2 + t)/(1 + t); the minus side flips t -> -t,
    // giving (2 - t)/(1 - t) = 2 + t + t^2 + ...
    let base = match side {
        Side::Plus => geometric_kernel_base(hi, 1),
        Side::Minus => geometric_kernel_base(hi, -1),
    };
    let pow = base.pow(2 * k);
    let c = pow.coeff(hi)?;
    Ok(c.constant_part() / Rational::from_integer(k.into()))
}

/// Series of 2 ∓ t + t^2 ∓ t^3 + ... = 1 + 1/(1 ± t) on [0, hi].
fn geometric_kernel_base(hi: i64, sign: i64) -> LaurentSeries {
    let mut s = LaurentSeries::zero(Family::ZetaQ, 0, hi.max(0));
    s.set(0, GradedCoefficient::from_int(Family::ZetaQ, 2));
    let mut c = 1i64;
    for d in 1..=hi {
        c *= -sign;
        s.set(d, GradedCoefficient::from_int(Family::ZetaQ, c));
    }
    s
}

/// Laurent expansion of `1/(2 y(z) x'(z))` at the given branch point, in the
/// local variable `t = z - branch`, exact on `[-2, max_degree]`.
pub fn kernel_series(curve: CurveId, branch: Branch, max_degree: i64) -> Result<LaurentSeries> {
    if !curve.branches().contains(&branch) {
        return Err(Error::IndexOutOfRange(format!(
            "curve {} has no branch point {branch}",
            curve.name()
        )));
    }
    if max_degree < -2 {
        return Err(Error::IndexOutOfRange("kernel window must reach -2".into()));
    }
    let cache = kernel_cache();
    {
        let guard = cache.lock().unwrap();
        if let Some(s) = guard.get(&(curve, branch)) {
            if s.high() >= max_degree {
                return Ok(s.truncate(max_degree));
            }
        }
    }
    let computed = compute_kernel(curve, branch, max_degree)?;
    let mut guard = cache.lock().unwrap();
    guard.insert((curve, branch), computed.clone());
    Ok(computed)
}

fn kernel_cache() -> &'static Mutex<HashMap<(CurveId, Branch), LaurentSeries>> {
    static CACHE: OnceLock<Mutex<HashMap<(CurveId, Branch), LaurentSeries>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn compute_kernel(curve: CurveId, branch: Branch, hi: i64) -> Result<LaurentSeries> {
    let family = curve.family();
    match curve {
        CurveId::Airy => {
            // y = z, x' = z: kernel is exactly (1/2) t^-2
            let mut s = LaurentSeries::zero(family, -2, hi);
            s.set(
                -2,
                GradedCoefficient::from_rational(family, rat(1, 2)),
            );
            Ok(s)
        }
        CurveId::TopQ | CurveId::WpClassical => {
            // (1/2) t^-2 exp(sum_k c_k (4 t^2)^k / k) with c_k the weight-2k
            // zeta generator (formal for TopQ, pi-power for WpClassical)
            let w = hi + 2;
            let mut expo = LaurentSeries::zero(family, 1, w.max(1));
            let mut four_pow = Rational::one();
            for k in 1..=(w / 2).max(0) {
                four_pow *= rat(4, 1);
                let gen = match curve {
                    CurveId::TopQ => GradedCoefficient::zeta_q(k as usize),
                    _ => crate::ring::graded::classical_zeta(k as usize),
                };
                let c = gen.scale(&(four_pow.clone() / Rational::from_integer(k.into())));
                expo.add_at(2 * k, &c);
            }
            let e = expo.exp()?;
            Ok(e.scale_rat(&rat(1, 2)).shift(-2).truncate(hi))
        }
        CurveId::Okuyama => {
            let w = hi + 2;
            // prefactor z^3/(z^2-1)^2 at z = a + t: (a+t)^3 / (t^2 (t+2a)^2)
            let a = branch as i64;
            let mut num = LaurentSeries::zero(family, 0, w.max(3));
            // (a+t)^3 = a^3 + 3a^2 t + 3a t^2 + t^3 with a = +-1
            num.set(0, GradedCoefficient::from_int(family, a * a * a));
            num.set(1, GradedCoefficient::from_int(family, 3 * a * a));
            num.set(2, GradedCoefficient::from_int(family, 3 * a));
            num.set(3, GradedCoefficient::from_int(family, 1));
            let mut den = LaurentSeries::zero(family, 0, w.max(2));
            // (t + 2a)^2 = 4 + 4a t + t^2
            den.set(0, GradedCoefficient::from_int(family, 4));
            den.set(1, GradedCoefficient::from_int(family, 4 * a));
            den.set(2, GradedCoefficient::from_int(family, 1));
            let pref = num.mul(&den.invert()?).shift(-2);
            // exponent sum_{m>=2} sum_k a_mk zeta_q(2k) t^m
            let side = if branch == 1 { Side::Plus } else { Side::Minus };
            let mut expo = LaurentSeries::zero(family, 1, w.max(1));
            for m in 2..=w.max(2) {
                let mut c = GradedCoefficient::zero(family);
                for k in 1..=(m / 2) {
                    let amk = a_coefficient(m as u32, k as u32, side)?;
                    c = &c + &GradedCoefficient::zeta_q(k as usize).scale(&amk);
                }
                expo.add_at(m, &c);
            }
            Ok(pref.mul(&expo.exp()?).truncate(hi))
        }
    }
}

/// The deck-transformation coordinate `s(t) = sigma(alpha + t) - alpha`
/// expanded at the branch point, exact on `[1, max_degree]`.
///
/// Okuyama (`sigma(z) = 1/z`): `s = -t/(1 + at)` at branch `a`. One-branch
/// curves (`sigma(z) = -z`): `s = -t` exactly.
pub fn sigma_coordinate(curve: CurveId, branch: Branch, max_degree: i64) -> Result<LaurentSeries> {
    if !curve.branches().contains(&branch) {
        return Err(Error::IndexOutOfRange(format!(
            "curve {} has no branch point {branch}",
            curve.name()
        )));
    }
    let family = curve.family();
    let hi = max_degree.max(1);
    let mut s = LaurentSeries::zero(family, 1, hi);
    match curve {
        CurveId::Okuyama => {
            // -t/(1+at) = -t + a t^2 - a^2 t^3 + ... = sum (-1)^m a^{m-1} t^m
            let a = branch as i64;
            let mut c = 1i64;
            for d in 1..=hi {
                c = -c;
                s.set(d, GradedCoefficient::from_int(family, c));
                // multiply subsequent coefficients by a
                if a == -1 {
                    // handled via closed form below instead
                }
            }
            if a == -1 {
                // s = -t/(1 - t) = -(t + t^2 + t^3 + ...)
                for d in 1..=hi {
                    s.set(d, GradedCoefficient::from_int(family, -1));
                }
            }
        }
        _ => {
            s.set(1, GradedCoefficient::from_int(family, -1));
        }
    }
    Ok(s)
}

/// One basis term of an `omega_{0,2}` channel expansion: the coefficient of
/// `(z1 - branch)^m` contributes `coefficient / (z_j - branch)^{order + 2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Omega02Term {
    pub order: u32,
    pub coefficient: Rational,
}

/// Expansion of the `omega_{0,2}` recursion channel at a branch point.
///
/// For the two-branch curve this is the Taylor expansion in `z1` of
/// `1/(z1 - z_j)^2 + 1/(1 - z1 z_j)^2`, re-expressed in the pole basis of
/// `z_j` at the same branch. For the one-branch curves it is the expansion
/// of `1/(z1 - z_j)^2 + 1/(z1 + z_j)^2`, whose odd rows vanish.
pub fn omega02_expansion(curve: CurveId, branch: Branch, m: u32) -> Result<Vec<Omega02Term>> {
    if !curve.branches().contains(&branch) {
        return Err(Error::IndexOutOfRange(format!(
            "curve {} has no branch point {branch}",
            curve.name()
        )));
    }
    let mm = m as u64;
    let mut out = Vec::new();
    match curve {
        CurveId::Okuyama => {
            // row m at +1: (m+1) [ (-1)^m C(m, m-k) + delta_{k,m} ] / (z_j-1)^{k+2}
            // row m at -1: (m+1) [ (-1)^k C(m, m-k) + delta_{k,m} ] / (z_j+1)^{k+2}
            for k in 0..=m {
                let binom = binomial(mm, (m - k) as u64);
                let sign = match branch {
                    1 => {
                        if m % 2 == 0 {
                            Rational::one()
                        } else {
                            -Rational::one()
                        }
                    }
                    _ => {
                        if k % 2 == 0 {
                            Rational::one()
                        } else {
                            -Rational::one()
                        }
                    }
                };
                let mut c = binom * sign;
                if k == m {
                    c += Rational::one();
                }
                c *= Rational::from_integer((mm + 1).into());
                if !num_traits::Zero::is_zero(&c) {
                    out.push(Omega02Term {
                        order: k,
                        coefficient: c,
                    });
                }
            }
        }
        _ => {
            if m % 2 == 0 {
                out.push(Omega02Term {
                    order: m,
                    coefficient: Rational::from_integer((2 * (mm + 1)).into()),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::graded::{classical_zeta, GradedCoefficient};

    fn zq(k: usize) -> GradedCoefficient {
        GradedCoefficient::zeta_q(k)
    }

    #[test]
    fn a_coefficient_anchors() {
        assert_eq!(a_coefficient(2, 1, Side::Plus).unwrap(), rat(4, 1));
        assert_eq!(a_coefficient(4, 2, Side::Plus).unwrap(), rat(8, 1));
        assert_eq!(a_coefficient(3, 1, Side::Plus).unwrap(), rat(-4, 1));
        // a_{2k,k} = 4^k / k
        for k in 1..=6u32 {
            let expect = Rational::new(num_bigint::BigInt::from(4).pow(k), k.into());
            assert_eq!(a_coefficient(2 * k, k, Side::Plus).unwrap(), expect);
            assert_eq!(a_coefficient(2 * k, k, Side::Minus).unwrap(), expect);
        }
        // b_{mk} = (-1)^m a_{mk}
        for m in 2..=8u32 {
            for k in 1..=m / 2 {
                let a = a_coefficient(m, k, Side::Plus).unwrap();
                let b = a_coefficient(m, k, Side::Minus).unwrap();
                if m % 2 == 0 {
                    assert_eq!(a, b);
                } else {
                    assert_eq!(a, -b);
                }
            }
        }
        assert!(a_coefficient(3, 2, Side::Plus).is_err());
    }

    #[test]
    fn kernel_fixtures_at_plus_one() {
        // frozen by brute-force series expansion of z^3/(z^2-1)^2 times the
        // kernel exponential
        let k = kernel_series(CurveId::Okuyama, 1, 2).unwrap();
        assert_eq!(k.coeff(-2).unwrap().constant_part(), rat(1, 4));
        assert_eq!(k.coeff(-1).unwrap().constant_part(), rat(1, 2));
        let c0 = &GradedCoefficient::from_rational(Family::ZetaQ, rat(3, 16)) + &zq(1);
        assert_eq!(k.coeff(0).unwrap(), c0);
        let c1 = &zq(1) + &GradedCoefficient::from_rational(Family::ZetaQ, rat(-1, 16));
        assert_eq!(k.coeff(1).unwrap(), c1);
    }

    #[test]
    fn kernel_at_minus_one_alternates_sign() {
        // [t^m] k_minus = (-1)^{m+1} [t^m] k_plus
        let kp = kernel_series(CurveId::Okuyama, 1, 4).unwrap();
        let km = kernel_series(CurveId::Okuyama, -1, 4).unwrap();
        assert_eq!(km.coeff(-2).unwrap().constant_part(), rat(-1, 4));
        for m in -2..=4i64 {
            let sign = if (m.rem_euclid(2)) == 0 { -1 } else { 1 };
            assert_eq!(
                km.coeff(m).unwrap(),
                kp.coeff(m).unwrap().scale(&rat(sign, 1)),
                "degree {m}"
            );
        }
    }

    #[test]
    fn kernel_one_branch_values() {
        let k = kernel_series(CurveId::Airy, 0, 4).unwrap();
        assert_eq!(k.coeff(-2).unwrap().constant_part(), rat(1, 2));
        for d in -1..=4 {
            assert!(k.coeff(d).unwrap().is_zero());
        }
        // (1/2) z^-2 (1 + 4 z2 z^2 + 8(z2^2+z4) z^4 + ...)
        let k = kernel_series(CurveId::TopQ, 0, 2).unwrap();
        assert_eq!(k.coeff(-2).unwrap().constant_part(), rat(1, 2));
        assert!(k.coeff(-1).unwrap().is_zero());
        assert_eq!(k.coeff(0).unwrap(), zq(1).scale(&rat(2, 1)));
        let k = kernel_series(CurveId::TopQ, 0, 3).unwrap();
        assert!(k.coeff(1).unwrap().is_zero());
        assert!(k.coeff(3).unwrap().is_zero());
        let k4 = kernel_series(CurveId::TopQ, 0, 2).unwrap();
        let expect = (&(&zq(1) * &zq(1)) + &zq(2)).scale(&rat(4, 1));
        assert_eq!(
            kernel_series(CurveId::TopQ, 0, 4).unwrap().coeff(2).unwrap(),
            expect
        );
        drop(k4);
    }

    #[test]
    fn wp_classical_kernel_is_specialized_topq_kernel() {
        let kq = kernel_series(CurveId::TopQ, 0, 8).unwrap();
        let kc = kernel_series(CurveId::WpClassical, 0, 8).unwrap();
        for d in -2..=8 {
            assert_eq!(
                kq.coeff(d).unwrap().specialize_classical().unwrap(),
                kc.coeff(d).unwrap(),
                "degree {d}"
            );
        }
        // spot value: degree-0 coefficient is 2 zeta(2) = pi^2/3
        assert_eq!(kc.coeff(0).unwrap(), classical_zeta(1).scale(&rat(2, 1)));
    }

    #[test]
    fn omega02_row_two_at_plus_one() {
        // 3 (z_j^2+1)/(z_j-1)^4 = 3 [ 2/(z_j-1)^4 + 2/(z_j-1)^3 + 1/(z_j-1)^2 ]
        let row = omega02_expansion(CurveId::Okuyama, 1, 2).unwrap();
        let map: std::collections::BTreeMap<u32, Rational> =
            row.into_iter().map(|t| (t.order, t.coefficient)).collect();
        assert_eq!(map[&0], rat(3, 1));
        assert_eq!(map[&1], rat(6, 1));
        assert_eq!(map[&2], rat(6, 1));
    }

    #[test]
    fn omega02_one_branch_parity() {
        assert!(omega02_expansion(CurveId::TopQ, 0, 3).unwrap().is_empty());
        let row = omega02_expansion(CurveId::TopQ, 0, 4).unwrap();
        assert_eq!(row.len(), 1);
        assert_eq!(row[0].order, 4);
        assert_eq!(row[0].coefficient, rat(10, 1));
    }

    /// Brute-force check of the omega02 rows: sum the basis terms at a
    /// rational sample point z_j and compare against the direct Taylor
    /// coefficient of 1/(z1-z_j)^2 + 1/(1-z1 z_j)^2 at z1 = branch.
    #[test]
    fn omega02_rows_match_rational_function_expansion() {
        let zj = rat(3, 1);
        for &branch in CurveId::Okuyama.branches() {
            let a = rat(branch as i64, 1);
            for m in 0..=6u32 {
                let row = omega02_expansion(CurveId::Okuyama, branch, m).unwrap();
                let mut from_basis = Rational::from_integer(0.into());
                for t in &row {
                    let mut den = Rational::one();
                    for _ in 0..t.order + 2 {
                        den *= &zj - &a;
                    }
                    from_basis += &t.coefficient / den;
                }
                // Taylor coefficient of u^m of 1/((zj-a) - u)^2 + 1/((1-a zj) - u zj)^2
                // first: sum (l+1) u^l/(zj-a)^{l+2}; second: sum (l+1) zj^l u^l/(1-a zj)^{l+2}
                let mut direct = Rational::from_integer(0.into());
                {
                    let mut den = Rational::one();
                    for _ in 0..m + 2 {
                        den *= &zj - &a;
                    }
                    direct += Rational::from_integer((m as i64 + 1).into()) / den;
                }
                {
                    let mut den = Rational::one();
                    for _ in 0..m + 2 {
                        den *= Rational::one() - &a * &zj;
                    }
                    let mut num = Rational::from_integer((m as i64 + 1).into());
                    for _ in 0..m {
                        num *= &zj;
                    }
                    direct += num / den;
                }
                assert_eq!(from_basis, direct, "branch {branch}, row {m}");
            }
        }
    }
}
