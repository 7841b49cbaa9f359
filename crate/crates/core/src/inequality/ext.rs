//! Extended-precision reals for inequality comparisons.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

/// Significand bits of every [`ExtFloat`].
pub const PRECISION: usize = 192;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache allocation"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// A 192-bit binary float with an exponent range far beyond `f64`.
#[derive(Clone, Debug)]
pub struct ExtFloat(BigFloat);

impl ExtFloat {
    pub fn from_f64(x: f64) -> Self {
        Self(BigFloat::from_f64(x, PRECISION))
    }

    pub fn from_u64(x: u64) -> Self {
        Self(BigFloat::from_u64(x, PRECISION))
    }

    pub fn zero() -> Self {
        Self::from_u64(0)
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(self.0.add(&o.0, PRECISION, RM))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self(self.0.sub(&o.0, PRECISION, RM))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self(self.0.mul(&o.0, PRECISION, RM))
    }

    pub fn div(&self, o: &Self) -> Self {
        Self(self.0.div(&o.0, PRECISION, RM))
    }

    pub fn ln(&self) -> Self {
        Self(with_consts(|cc| self.0.ln(PRECISION, RM, cc)))
    }

    pub fn exp(&self) -> Self {
        Self(with_consts(|cc| self.0.exp(PRECISION, RM, cc)))
    }

    pub fn neg(&self) -> Self {
        Self(self.0.neg())
    }

    pub fn abs(&self) -> Self {
        if self.0.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn max(&self, o: &Self) -> Self {
        if self >= o {
            self.clone()
        } else {
            o.clone()
        }
    }

    pub fn is_nan(&self) -> bool {
        self.0.is_nan()
    }

    /// Nearest `f64`; saturates to ±inf and flushes to ±0 outside its range.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((words, _, sign, exponent, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        let sign = if sign == Sign::Neg { -1.0 } else { 1.0 };
        // Words are little-endian; the value is 0.m × 2^exponent.
        let top = match words.last() {
            Some(&w) if w != 0 => w,
            _ => return 0.0 * sign,
        };
        if exponent > 1100 {
            return sign * f64::INFINITY;
        }
        if exponent < -1200 {
            return sign * 0.0;
        }
        let frac = top as f64 / 2f64.powi(64);
        let half = exponent / 2;
        sign * frac * 2f64.powi(half) * 2f64.powi(exponent - half)
    }
}

impl PartialEq for ExtFloat {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for ExtFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl fmt::Display for ExtFloat {
    /// Shortest round-trip `f64` text when representable, otherwise
    /// scientific notation with 17 significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.to_f64();
        if x.is_nan() || (x.is_finite() && (x == 0.0) == self.0.is_zero() && (x == 0.0 || x.abs() >= f64::MIN_POSITIVE)) {
            return write!(f, "{x:?}");
        }
        let ln10 = ExtFloat::from_u64(10).ln();
        let log10 = self.abs().ln().div(&ln10);
        let e = log10.to_f64().floor();
        let mantissa = log10.sub(&ExtFloat::from_f64(e)).mul(&ln10).exp().to_f64();
        let sign = if self.0.is_negative() { "-" } else { "" };
        write!(f, "{sign}{mantissa:.16}e{e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_f64() {
        for x in [0.0, 1.0, -2.5, 1e-300, 3.0e300, std::f64::consts::PI, f64::MAX, f64::MIN_POSITIVE] {
            assert_eq!(ExtFloat::from_f64(x).to_f64(), x);
        }
        assert_eq!(ExtFloat::from_u64(123_456_789).to_f64(), 123_456_789.0);
    }

    #[test]
    fn arithmetic_and_transcendentals() {
        let two = ExtFloat::from_u64(2);
        assert_eq!(two.ln().to_f64(), std::f64::consts::LN_2);
        assert_eq!(ExtFloat::one().exp().to_f64(), std::f64::consts::E);
        let third = ExtFloat::one().div(&ExtFloat::from_u64(3));
        assert!(third.mul(&ExtFloat::from_u64(3)).sub(&ExtFloat::one()).abs() < ExtFloat::from_f64(1e-55));
        assert!(two.neg() < ExtFloat::zero());
        assert_eq!(two.neg().abs(), two);
    }

    #[test]
    fn beyond_double_range() {
        let big = ExtFloat::from_u64(1000).exp();
        assert_eq!(big.to_f64(), f64::INFINITY);
        assert_eq!(big.ln().to_f64(), 1000.0);
        assert!(big.to_string().starts_with("1.970071114017"));
        assert!(big.to_string().ends_with("e434"));
        assert_eq!(ExtFloat::from_f64(-1000.0).exp().to_string().split('e').nth(1), Some("-435"));
        assert_eq!(ExtFloat::from_f64(0.5).to_string(), "0.5");
    }
}
