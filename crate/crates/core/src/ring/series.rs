//! Truncated Laurent series over a graded coefficient ring.
//!
//! A series carries an explicit exactness window `[low, high]`: coefficients
//! inside the window are exact, everything below `low` is zero (the valuation
//! is at least `low`), and nothing is claimed above `high`. Window bookkeeping
//! follows the usual rules: sums intersect windows, products are exact on
//! `[low1 + low2, min(high1 + low2, high2 + low1)]`.

use crate::error::{Error, Result};
use crate::ring::graded::{Family, GradedCoefficient, Rational};
use num_traits::{One, Zero};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentSeries {
    family: Family,
    low: i64,
    /// Dense coefficients for degrees `low ..= low + coeffs.len() - 1`.
    coeffs: Vec<GradedCoefficient>,
}

impl LaurentSeries {
    pub fn zero(family: Family, low: i64, high: i64) -> Self {
        assert!(low <= high, "series window must satisfy low <= high");
        LaurentSeries {
            family,
            low,
            coeffs: vec![GradedCoefficient::zero(family); (high - low + 1) as usize],
        }
    }

    /// The series `c * t^degree`, exact on `[degree, high]`.
    pub fn monomial(c: GradedCoefficient, degree: i64, high: i64) -> Self {
        let family = c.family();
        let mut s = Self::zero(family, degree, high);
        s.set(degree, c);
        s
    }

    pub fn from_coeffs(family: Family, low: i64, coeffs: Vec<GradedCoefficient>) -> Self {
        assert!(!coeffs.is_empty());
        LaurentSeries { family, low, coeffs }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    /// Coefficient of `t^degree`. Degrees below the window are exactly zero;
    /// degrees above it are a window underrun.
    pub fn coeff(&self, degree: i64) -> Result<GradedCoefficient> {
        if degree < self.low {
            return Ok(GradedCoefficient::zero(self.family));
        }
        if degree > self.high() {
            return Err(Error::WindowUnderrun {
                degree,
                low: self.low,
                high: self.high(),
            });
        }
        Ok(self.coeffs[(degree - self.low) as usize].clone())
    }

    pub fn set(&mut self, degree: i64, c: GradedCoefficient) {
        let idx = (degree - self.low) as usize;
        self.coeffs[idx] = c;
    }

    pub fn add_at(&mut self, degree: i64, c: &GradedCoefficient) {
        if degree < self.low || degree > self.high() {
            return;
        }
        let idx = (degree - self.low) as usize;
        self.coeffs[idx] = &self.coeffs[idx] + c;
    }

    /// Lowest degree with a nonzero coefficient inside the window, if any.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.low + i as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(GradedCoefficient::is_zero)
    }

    /// Restrict the exactness window from above. Tightening `low` is not
    /// offered because it would discard the valuation guarantee.
    pub fn truncate(&self, high: i64) -> Self {
        assert!(high >= self.low);
        let keep = ((high - self.low + 1) as usize).min(self.coeffs.len());
        LaurentSeries {
            family: self.family,
            low: self.low,
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            family: self.family,
            low: self.low + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, c: &GradedCoefficient) -> Self {
        LaurentSeries {
            family: self.family,
            low: self.low,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn scale_rat(&self, c: &Rational) -> Self {
        LaurentSeries {
            family: self.family,
            low: self.low,
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.family, other.family);
        let low = self.low.min(other.low);
        let high = self.high().min(other.high());
        let mut out = Self::zero(self.family, low, high.max(low));
        for d in low..=high {
            let a = self.coeff(d).unwrap_or_else(|_| GradedCoefficient::zero(self.family));
            let b = other.coeff(d).unwrap_or_else(|_| GradedCoefficient::zero(self.family));
            out.set(d, &a + &b);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.family, other.family);
        let low = self.low + other.low;
        let high = (self.high() + other.low).min(other.high() + self.low);
        assert!(high >= low, "empty product window");
        let mut out = Self::zero(self.family, low, high);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let da = self.low + i as i64;
            for (j, b) in other.coeffs.iter().enumerate() {
                let db = other.low + j as i64;
                let d = da + db;
                if d > high {
                    break;
                }
                out.add_at(d, &(a * b));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        assert!(e >= 1);
        let mut out = self.clone();
        for _ in 1..e {
            out = out.mul(self);
        }
        out
    }

    /// Formal exponential. Requires strictly positive valuation; the result
    /// is exact on `[0, high]`.
    pub fn exp(&self) -> Result<Self> {
        if self.low < 1 {
            if let Some(v) = self.valuation() {
                if v < 1 {
                    return Err(Error::SeriesPrecondition(format!(
                        "exp needs positive valuation, found term at degree {v}"
                    )));
                }
            }
        }
        let high = self.high();
        let mut out = Self::zero(self.family, 0, high);
        out.set(0, GradedCoefficient::one(self.family));
        let mut term = out.clone();
        let val = self.valuation().unwrap_or(high + 1).max(1);
        let mut n: i64 = 1;
        while n * val <= high {
            term = term.mul(self).truncate(high);
            term = term.scale_rat(&Rational::new(1.into(), n.into()));
            // widen the bookkeeping window back to [0, high]: exp terms of
            // order > n*val are supplied by later summands
            let mut padded = Self::zero(self.family, 0, high);
            for d in term.low()..=term.high() {
                padded.add_at(d, &term.coeff(d)?);
            }
            for d in 0..=high {
                let c = padded.coeff(d)?;
                out.add_at(d, &c);
            }
            term = padded;
            n += 1;
        }
        Ok(out)
    }

    /// Formal logarithm. Requires constant term 1; exact on `[1, high]`.
    pub fn log(&self) -> Result<Self> {
        if self.low > 0 {
            return Err(Error::SeriesPrecondition(
                "log needs constant term 1, window excludes degree 0".into(),
            ));
        }
        let c0 = self.coeff(0)?;
        if !(c0.is_rational() && c0.constant_part().is_one()) {
            return Err(Error::SeriesPrecondition(format!(
                "log needs constant term 1, found {c0}"
            )));
        }
        if let Some(v) = self.valuation() {
            if v < 0 {
                return Err(Error::SeriesPrecondition(format!(
                    "log needs constant term 1, found term at degree {v}"
                )));
            }
        }
        let high = self.high();
        // u = self - 1 has valuation >= 1
        let mut u = Self::zero(self.family, 1, high.max(1));
        for d in 1..=high {
            u.set(d, self.coeff(d)?);
        }
        let mut out = Self::zero(self.family, 1, high.max(1));
        let mut term = u.clone();
        let mut n: i64 = 1;
        while n <= high {
            let sign = if n % 2 == 1 {
                Rational::new(1.into(), n.into())
            } else {
                Rational::new((-1).into(), n.into())
            };
            for d in term.low()..=term.high().min(high) {
                let c = term.coeff(d)?.scale(&sign);
                out.add_at(d, &c);
            }
            if (n + 1) > high {
                break;
            }
            term = term.mul(&u).truncate(high);
            n += 1;
        }
        Ok(out)
    }

    /// Multiplicative inverse. The leading coefficient must be a nonzero
    /// rational; the result is exact on `[-low, high - 2*low]`.
    pub fn invert(&self) -> Result<Self> {
        let val = self.valuation().ok_or_else(|| {
            Error::SeriesPrecondition("cannot invert the zero series".into())
        })?;
        if val != self.low {
            return Err(Error::SeriesPrecondition(format!(
                "invert needs a nonzero leading coefficient at the window low {}, valuation is {val}",
                self.low
            )));
        }
        let lead = self.coeff(val)?;
        if !lead.is_rational() {
            return Err(Error::SeriesPrecondition(format!(
                "invert needs a rational leading coefficient, found {lead}"
            )));
        }
        let c = lead.constant_part();
        if c.is_zero() {
            return Err(Error::SeriesPrecondition("zero leading coefficient".into()));
        }
        // self = c t^val (1 + r), inverse = c^-1 t^-val sum (-r)^j
        let width = self.high() - val;
        let inv_c = Rational::one() / c;
        let mut r = Self::zero(self.family, 1, width.max(1));
        for d in 1..=width {
            r.set(d, self.coeff(val + d)?.scale(&inv_c));
        }
        let mut geom = Self::zero(self.family, 0, width);
        geom.set(0, GradedCoefficient::one(self.family));
        let mut term = geom.clone();
        let mut j = 1;
        while j <= width {
            term = term.mul(&r).truncate(width);
            let mut padded = Self::zero(self.family, 0, width);
            for d in term.low()..=term.high() {
                padded.add_at(d, &term.coeff(d)?);
            }
            let sign = if j % 2 == 1 { rat_neg_one() } else { Rational::one() };
            for d in 0..=width {
                geom.add_at(d, &padded.coeff(d)?.scale(&sign));
            }
            term = padded;
            j += 1;
        }
        Ok(geom.scale_rat(&inv_c).shift(-val))
    }
}

fn rat_neg_one() -> Rational {
    -Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::graded::rat;

    fn zq(k: usize) -> GradedCoefficient {
        GradedCoefficient::zeta_q(k)
    }

    #[test]
    fn exp_of_zero_is_one() {
        let s = LaurentSeries::zero(Family::ZetaQ, 1, 6);
        let e = s.exp().unwrap();
        assert!(e.coeff(0).unwrap().constant_part().is_one());
        for d in 1..=6 {
            assert!(e.coeff(d).unwrap().is_zero());
        }
    }

    #[test]
    fn exp_matches_displayed_kernel_series() {
        // exp(4 z2 t^2 + 8 z4 t^4) = 1 + 4 z2 t^2 + (8 z2^2 + 8 z4) t^4 + ...
        let mut s = LaurentSeries::zero(Family::ZetaQ, 1, 4);
        s.set(2, zq(1).scale(&rat(4, 1)));
        s.set(4, zq(2).scale(&rat(8, 1)));
        let e = s.exp().unwrap();
        assert_eq!(e.coeff(2).unwrap(), zq(1).scale(&rat(4, 1)));
        let expected = &(&zq(1) * &zq(1)).scale(&rat(8, 1)) + &zq(2).scale(&rat(8, 1));
        assert_eq!(e.coeff(4).unwrap(), expected);
    }

    #[test]
    fn log_inverts_exp() {
        let mut s = LaurentSeries::zero(Family::ZetaQ, 1, 7);
        s.set(1, zq(1).scale(&rat(2, 3)));
        s.set(2, GradedCoefficient::from_int(Family::ZetaQ, -5));
        s.set(3, &zq(2) + &zq(1));
        let round = s.exp().unwrap().log().unwrap();
        for d in 1..=7 {
            assert_eq!(round.coeff(d).unwrap(), s.coeff(d).unwrap(), "degree {d}");
        }
    }

    #[test]
    fn invert_geometric() {
        // (1 - t)^-1 = 1 + t + t^2 + ...
        let mut s = LaurentSeries::zero(Family::ZetaQ, 0, 5);
        s.set(0, GradedCoefficient::one(Family::ZetaQ));
        s.set(1, GradedCoefficient::from_int(Family::ZetaQ, -1));
        let inv = s.invert().unwrap();
        for d in 0..=5 {
            assert!(inv.coeff(d).unwrap().constant_part().is_one());
        }
        // sanity: s * inv = 1 on the common window
        let prod = s.mul(&inv);
        assert!(prod.coeff(0).unwrap().constant_part().is_one());
        for d in 1..=prod.high() {
            assert!(prod.coeff(d).unwrap().is_zero());
        }
    }

    #[test]
    fn invert_rejects_symbolic_lead() {
        let s = LaurentSeries::monomial(zq(1), -2, 3);
        assert!(matches!(s.invert(), Err(Error::SeriesPrecondition(_))));
    }

    #[test]
    fn exp_rejects_constant_term() {
        let s = LaurentSeries::monomial(GradedCoefficient::one(Family::ZetaQ), 0, 3);
        assert!(matches!(s.exp(), Err(Error::SeriesPrecondition(_))));
    }

    #[test]
    fn product_window_shrinks_high_only() {
        let a = LaurentSeries::zero(Family::ZetaQ, -2, 4);
        let b = LaurentSeries::zero(Family::ZetaQ, -1, 2);
        let p = a.mul(&b);
        assert_eq!(p.low(), -3);
        assert_eq!(p.high(), 0); // min(4 + -1, 2 + -2)
    }
}
