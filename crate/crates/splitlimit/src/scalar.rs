//! Real scalars used by the numeric parts of the crate.
//!
//! [`Real`] is implemented for `f64` and for [`MpFloat`], a software float
//! whose mantissa width is taken from a per-thread working precision (see
//! [`with_precision`]).

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};
use num_bigint::{BigInt, Sign as BigSign};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

/// Default mantissa width for [`MpFloat`], in bits.
pub const DEFAULT_PRECISION: usize = 128;

pub trait Real:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + FromPrimitive
    + Send
    + Sync
    + 'static
{
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn pi() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    /// Spacing of representable numbers near 1.
    fn epsilon() -> Self;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn int(x: i64) -> Self {
        Self::from_i64(x).expect("integer literal")
    }
}

impl Real for f64 {
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn from_rational(r: &BigRational) -> Self {
        ratio_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
}

/// Converts a big rational to the nearest-ish `f64`, without overflowing on
/// huge numerators and denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let (mn, en) = split_bigint(r.numer());
    let (md, ed) = split_bigint(r.denom());
    let e = en - ed;
    (mn / md) * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Natural logarithm of |x| for a nonzero big integer.
pub fn ln_bigint(x: &BigInt) -> f64 {
    let (m, e) = split_bigint(x);
    m.abs().ln() + e as f64 * std::f64::consts::LN_2
}

// x = m * 2^e with 2^52 <= |m| < 2^64
fn split_bigint(x: &BigInt) -> (f64, i64) {
    let bits = x.bits() as i64;
    let shift = (bits - 64).max(0);
    let top: BigInt = x >> shift as usize;
    (top.to_f64().unwrap(), shift)
}

thread_local! {
    static PRECISION: Cell<usize> = const { Cell::new(DEFAULT_PRECISION) };
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

const RM: RoundingMode = RoundingMode::ToEven;

/// Current working precision of [`MpFloat`] on this thread.
pub fn precision() -> usize {
    PRECISION.with(|p| p.get())
}

/// Runs `f` with the [`MpFloat`] working precision set to `bits`.
pub fn with_precision<T>(bits: usize, f: impl FnOnce() -> T) -> T {
    let old = PRECISION.with(|p| p.replace(bits));
    let out = f();
    PRECISION.with(|p| p.set(old));
    out
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Arbitrary-precision binary float.
#[derive(Clone)]
pub struct MpFloat(BigFloat);

impl MpFloat {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    fn from_bigint(x: &BigInt, p: usize) -> BigFloat {
        let (sign, digits) = x.to_u64_digits();
        if digits.is_empty() {
            return BigFloat::from_word(0, p);
        }
        let words: Vec<Word> = digits.iter().map(|&d| d as Word).collect();
        let s = if sign == BigSign::Minus {
            Sign::Neg
        } else {
            Sign::Pos
        };
        let e = (words.len() * 64) as i32;
        let mut v = BigFloat::from_words(&words, s, e);
        v.set_precision(p.max(64), RM).expect("precision");
        v
    }
}

impl fmt::Debug for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).map_err(|_| fmt::Error)?;
        f.write_str(&s)
    }
}

impl PartialEq for MpFloat {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for MpFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! bin_op {
    ($tr:ident, $m:ident) => {
        impl $tr for MpFloat {
            type Output = MpFloat;
            fn $m(self, rhs: MpFloat) -> MpFloat {
                MpFloat(self.0.$m(&rhs.0, precision(), RM))
            }
        }
    };
}
bin_op!(Add, add);
bin_op!(Sub, sub);
bin_op!(Mul, mul);
bin_op!(Div, div);

impl Rem for MpFloat {
    type Output = MpFloat;
    fn rem(self, rhs: MpFloat) -> MpFloat {
        MpFloat(self.0.rem(&rhs.0))
    }
}

impl Neg for MpFloat {
    type Output = MpFloat;
    fn neg(self) -> MpFloat {
        MpFloat(self.0.neg())
    }
}

impl Zero for MpFloat {
    fn zero() -> Self {
        MpFloat(BigFloat::from_word(0, precision()))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for MpFloat {
    fn one() -> Self {
        MpFloat(BigFloat::from_word(1, precision()))
    }
}

impl Num for MpFloat {
    type FromStrRadixErr = astro_float::Error;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let rdx = match radix {
            2 => Radix::Bin,
            8 => Radix::Oct,
            10 => Radix::Dec,
            16 => Radix::Hex,
            _ => return Err(astro_float::Error::InvalidArgument),
        };
        let v = with_consts(|cc| BigFloat::parse(s, rdx, precision(), RM, cc));
        match v.err() {
            Some(e) => Err(e),
            None => Ok(MpFloat(v)),
        }
    }
}

impl FromPrimitive for MpFloat {
    fn from_i64(n: i64) -> Option<Self> {
        Some(MpFloat(BigFloat::from_i64(n, precision())))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(MpFloat(BigFloat::from_u64(n, precision())))
    }
    fn from_f64(n: f64) -> Option<Self> {
        n.is_finite()
            .then(|| MpFloat(BigFloat::from_f64(n, precision().max(64))))
    }
}

impl Real for MpFloat {
    fn sqrt(&self) -> Self {
        MpFloat(self.0.sqrt(precision(), RM))
    }
    fn exp(&self) -> Self {
        MpFloat(with_consts(|cc| self.0.exp(precision(), RM, cc)))
    }
    fn ln(&self) -> Self {
        MpFloat(with_consts(|cc| self.0.ln(precision(), RM, cc)))
    }
    fn pi() -> Self {
        MpFloat(with_consts(|cc| cc.pi(precision(), RM)))
    }
    fn from_rational(r: &BigRational) -> Self {
        let p = precision();
        let n = Self::from_bigint(r.numer(), p + r.numer().bits() as usize);
        let d = Self::from_bigint(r.denom(), p + r.denom().bits() as usize);
        MpFloat(n.div(&d, p, RM))
    }
    fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf() {
            return if self.0.is_positive() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
        let (m, _, s, e, _) = self.0.as_raw_parts().expect("finite value");
        let top = *m.last().unwrap() as f64 / 2f64.powi(64);
        let v = top * 2f64.powi(e);
        if s == Sign::Neg {
            -v
        } else {
            v
        }
    }
    fn epsilon() -> Self {
        let p = precision();
        MpFloat(BigFloat::from_f64(0.5, p).powi(p - 1, p, RM))
    }
}

impl Signed for MpFloat {
    fn abs(&self) -> Self {
        MpFloat(self.0.abs())
    }
    fn abs_sub(&self, other: &Self) -> Self {
        if *self <= *other {
            Self::zero()
        } else {
            self.clone() - other.clone()
        }
    }
    fn signum(&self) -> Self {
        MpFloat(self.0.signum())
    }
    fn is_positive(&self) -> bool {
        self.0.is_positive() && !self.0.is_zero()
    }
    fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mp_matches_f64_on_elementary_functions() {
        with_precision(128, || {
            let x = MpFloat::lit(0.3);
            assert!((x.exp().to_f64() - 0.3f64.exp()).abs() < 1e-15);
            assert!((x.ln().to_f64() - 0.3f64.ln()).abs() < 1e-15);
            assert!((x.sqrt().to_f64() - 0.3f64.sqrt()).abs() < 1e-15);
            assert!((MpFloat::pi().to_f64() - std::f64::consts::PI).abs() < 1e-15);
        });
    }

    #[test]
    fn rational_conversion_handles_huge_parts() {
        let big = BigInt::from(10u32).pow(400);
        let r = BigRational::new(big.clone() * 3, big * 7);
        assert!((ratio_to_f64(&r) - 3.0 / 7.0).abs() < 1e-15);
        let v = with_precision(256, || MpFloat::from_rational(&r).to_f64());
        assert!((v - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn epsilon_tracks_precision() {
        let e1 = with_precision(128, || MpFloat::epsilon().to_f64());
        let e2 = with_precision(256, || MpFloat::epsilon().to_f64());
        assert!((e1 - 2f64.powi(-127)).abs() < 1e-50);
        assert!(e2 < e1 * 1e-30);
    }
}
