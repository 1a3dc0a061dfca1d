//! Gaussian rationals `re + im*i` with arbitrary-precision rational parts.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PolyError;

/// Exact element of `Q(i)`. Both parts are kept in lowest terms by `BigRational`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GRat { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GRat::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    /// `(re_num/re_den) + (im_num/im_den) i`.
    pub fn from_fracs(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        GRat::new(BigRational::new(re_num.into(), re_den.into()), BigRational::new(im_num.into(), im_den.into()))
    }

    pub fn real(re: BigRational) -> Self {
        GRat::new(re, BigRational::zero())
    }

    pub fn i() -> Self {
        GRat::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        GRat::new(self.re.clone(), -self.im.clone())
    }

    /// `|x|^2 = re^2 + im^2`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GRat::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = GRat::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        GRat::new(&self.re * r, &self.im * r)
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Least common multiple of the two denominators.
    pub fn common_denominator(&self) -> BigInt {
        num_integer::Integer::lcm(self.re.denom(), self.im.denom())
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Very large parts: scale down both before dividing.
            let bits = r.numer().bits().max(r.denom().bits()) as i64;
            let shift = (bits - 900).max(0) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

impl Zero for GRat {
    fn zero() -> Self {
        GRat::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GRat {
    fn one() -> Self {
        GRat::new(BigRational::one(), BigRational::zero())
    }
}

impl From<i64> for GRat {
    fn from(v: i64) -> Self {
        GRat::from_ints(v, 0)
    }
}

impl From<BigRational> for GRat {
    fn from(v: BigRational) -> Self {
        GRat::real(v)
    }
}

impl<'a> Add<&'a GRat> for &'a GRat {
    type Output = GRat;
    fn add(self, o: &GRat) -> GRat {
        GRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GRat> for &'a GRat {
    type Output = GRat;
    fn sub(self, o: &GRat) -> GRat {
        GRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GRat> for &'a GRat {
    type Output = GRat;
    fn mul(self, o: &GRat) -> GRat {
        GRat::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}

impl<'a> Div<&'a GRat> for &'a GRat {
    type Output = GRat;
    /// Panics on division by zero, like `BigRational`.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &GRat) -> GRat {
        self * &o.inv().expect("division by zero Gaussian rational")
    }
}

impl Neg for &GRat {
    type Output = GRat;
    fn neg(self) -> GRat {
        GRat::new(-&self.re, -&self.im)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GRat> for GRat {
            type Output = GRat;
            fn $m(self, o: GRat) -> GRat {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a GRat> for GRat {
            type Output = GRat;
            fn $m(self, o: &GRat) -> GRat {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GRat {
    type Output = GRat;
    fn neg(self) -> GRat {
        -&self
    }
}

impl AddAssign<&GRat> for GRat {
    fn add_assign(&mut self, o: &GRat) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GRat> for GRat {
    fn sub_assign(&mut self, o: &GRat) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GRat> for GRat {
    fn mul_assign(&mut self, o: &GRat) {
        *self = &*self * o;
    }
}

/// Parses `a`, `a/b`, `-a/b`.
pub fn parse_rational(s: &str) -> Result<BigRational, PolyError> {
    let s = s.trim();
    let bad = || PolyError::Parse(format!("invalid rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GRat {
    /// Canonical form `re+im*i` / `re-im*i`, both parts always present.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}*i", format_rational(&self.re), sign, format_rational(&self.im.abs()))
    }
}

impl FromStr for GRat {
    type Err = PolyError;

    /// Accepts the canonical form as well as a bare rational.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = t.strip_suffix("*i") else {
            return Ok(GRat::real(parse_rational(&t)?));
        };
        // split at the last sign that is not the leading one
        let split = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(i, _)| i).last();
        match split {
            Some(i) => {
                let re = parse_rational(&body[..i])?;
                let im_s = &body[i..];
                let im = parse_rational(im_s.strip_prefix('+').unwrap_or(im_s))?;
                Ok(GRat::new(re, im))
            }
            None => Ok(GRat::new(BigRational::zero(), parse_rational(body)?)),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GRatWire {
    re: String,
    im: String,
}

impl Serialize for GRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GRatWire { re: format_rational(&self.re), im: format_rational(&self.im) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = GRatWire::deserialize(d)?;
        let re = parse_rational(&w.re).map_err(serde::de::Error::custom)?;
        let im = parse_rational(&w.im).map_err(serde::de::Error::custom)?;
        Ok(GRat::new(re, im))
    }
}

/// Serde adapter for `BigRational` as a `"num/den"` string.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// A Gaussian rational of modulus exactly one; the exact stand-in for `e^{i theta}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnimodularGRat(GRat);

impl UnimodularGRat {
    pub fn new(value: GRat) -> Result<Self, PolyError> {
        if value.norm_sqr().is_one() {
            Ok(UnimodularGRat(value))
        } else {
            Err(PolyError::NotUnimodular(value.to_string()))
        }
    }

    pub fn one() -> Self {
        UnimodularGRat(GRat::one())
    }

    /// `(a + b i)^2 / (a^2 + b^2)`, a rational point on the unit circle.
    pub fn from_pythagorean(a: i64, b: i64) -> Self {
        assert!(a != 0 || b != 0, "from_pythagorean(0, 0)");
        let g = GRat::from_ints(a, b);
        let n = g.norm_sqr();
        UnimodularGRat((&g * &g).scale(&n.recip()))
    }

    pub fn value(&self) -> &GRat {
        &self.0
    }

    pub fn into_inner(self) -> GRat {
        self.0
    }

    pub fn conj(&self) -> Self {
        UnimodularGRat(self.0.conj())
    }

    pub fn mul(&self, o: &Self) -> Self {
        UnimodularGRat(&self.0 * &o.0)
    }

    pub fn pow(&self, e: u32) -> Self {
        UnimodularGRat(self.0.pow(e))
    }

    /// Exact `q`-th root inside `Q(i)`, if one exists.
    ///
    /// A unimodular `mu = (a + b i)/d` in lowest terms has `mu^q` with rational
    /// denominator exactly `d^q`, so `d` is recovered as an integer root of the
    /// denominator and `a`, `b` are located by rounding the floating candidates.
    /// Candidates are tried nearest-to-one first.
    pub fn exact_root(&self, q: u32) -> Option<UnimodularGRat> {
        if q == 1 {
            return Some(self.clone());
        }
        let den = self.0.common_denominator();
        let d = den.nth_root(q);
        if d.pow(q) != den {
            return None;
        }
        let d_f = d.to_f64()?;
        if d_f > 1e12 {
            return None;
        }
        let z = self.0.to_complex64();
        let arg = z.arg();
        let mut cands: Vec<Complex64> = (0..q)
            .map(|m| {
                let t = (arg + 2.0 * std::f64::consts::PI * m as f64) / q as f64;
                Complex64::from_polar(1.0, t)
            })
            .collect();
        cands.sort_by(|a, b| (a - 1.0).norm().total_cmp(&(b - 1.0).norm()));
        for c in cands {
            let a = (c.re * d_f).round() as i64;
            let b = (c.im * d_f).round() as i64;
            let cand = GRat::new(BigRational::new(a.into(), d.clone()), BigRational::new(b.into(), d.clone()));
            if cand.norm_sqr().is_one() && cand.pow(q) == self.0 {
                return Some(UnimodularGRat(cand));
            }
        }
        None
    }
}

impl Serialize for UnimodularGRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnimodularGRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let g = GRat::deserialize(d)?;
        UnimodularGRat::new(g).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip() {
        let a = GRat::from_fracs(3, 7, -2, 5);
        let b = GRat::from_fracs(-1, 4, 9, 11);
        let inv = a.inv().unwrap();
        assert_eq!(&a * &inv, GRat::one());
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(&(&a * &b) / &b, a);
        assert!(GRat::zero().inv().is_none());
    }

    #[test]
    fn conj_is_involution() {
        let a = GRat::from_fracs(1, 2, 3, 4);
        assert_eq!(a.conj().conj(), a);
        assert_eq!((&a * &a.conj()).im, BigRational::zero());
    }

    #[test]
    fn norm_of_one_plus_i() {
        let a = GRat::from_ints(1, 1);
        assert_eq!(a.norm_sqr(), BigRational::from_integer(2.into()));
        assert_eq!(&a * &a.conj(), GRat::from_ints(2, 0));
    }

    #[test]
    fn text_round_trip() {
        for g in [GRat::from_fracs(1, 2, -3, 1), GRat::zero(), GRat::from_ints(0, 1), GRat::from_fracs(-7, 3, 5, 9)] {
            let s = g.to_string();
            assert_eq!(s.parse::<GRat>().unwrap(), g, "{s}");
        }
        assert_eq!("1/2-3*i".parse::<GRat>().unwrap(), GRat::from_fracs(1, 2, -3, 1));
        assert_eq!("-2".parse::<GRat>().unwrap(), GRat::from_ints(-2, 0));
        assert!("1/0".parse::<GRat>().is_err());
    }

    #[test]
    fn unimodular_checks() {
        let u = UnimodularGRat::new(GRat::from_fracs(3, 5, 4, 5)).unwrap();
        assert_eq!(u.mul(&u.conj()), UnimodularGRat::one());
        assert!(UnimodularGRat::new(GRat::from_fracs(1, 2, 1, 2)).is_err());
        let p = UnimodularGRat::from_pythagorean(2, 1);
        assert_eq!(p.value(), &GRat::from_fracs(3, 5, 4, 5));
    }

    #[test]
    fn exact_roots() {
        let mu = UnimodularGRat::from_pythagorean(2, 1);
        for q in 1..=4 {
            let phi = mu.pow(q);
            let r = phi.exact_root(q).expect("root exists");
            assert_eq!(r.pow(q), phi);
        }
        // (3+4i)/5 is not a square in Q(i).
        let phi = UnimodularGRat::new(GRat::from_fracs(3, 5, 4, 5)).unwrap();
        assert!(phi.exact_root(2).is_none());
        // -1 = i^2
        let m1 = UnimodularGRat::new(GRat::from_ints(-1, 0)).unwrap();
        assert_eq!(m1.exact_root(2).unwrap().pow(2), m1);
    }

    #[test]
    fn serde_shape() {
        let g = GRat::from_fracs(3, 5, -4, 5);
        let j = serde_json::to_string(&g).unwrap();
        assert_eq!(j, r#"{"re":"3/5","im":"-4/5"}"#);
        assert_eq!(serde_json::from_str::<GRat>(&j).unwrap(), g);
    }
}
