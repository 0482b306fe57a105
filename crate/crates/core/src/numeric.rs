//! Exact rational and phase arithmetic.
//!
//! Every invariant computed by this crate has the shape `sqrt(r) * exp(2*pi*i*t)` with
//! `r`, `t` rational, or is a finite sum of unit phases. [`Rational`], [`UnitPhase`] and
//! [`PolarValue`] carry the exact data; [`ApproxComplex`] is the double-precision side
//! used by the brute-force sums and is only ever compared through [`approx_eq`].

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Panics if `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Representative of `self mod 1` in `[0, 1)`.
    pub fn fract_mod1(&self) -> Self {
        let (n, d) = (self.0.numer(), self.0.denom());
        Rational(BigRational::new(n.mod_floor(d), d.clone()))
    }

    /// Representative of `self mod m` in `[0, m)`, for `m > 0`.
    pub fn rem_euclid(&self, m: &Rational) -> Self {
        let q = (&self.0 / &m.0).floor();
        Rational(&self.0 - q * &m.0)
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // numerator or denominator beyond f64 range: divide in scaled steps
            let n = self.0.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.0.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! rational_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($tr::$method(self.0, rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($tr::$method(self.0, &rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($tr::$method(&self.0, rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational($tr::$method(&self.0, &rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"p/q"` or a bare integer `"p"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid rational {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Rational::new(p, q))
            }
            None => Ok(Rational::from_integer(
                s.parse::<BigInt>().map_err(|_| bad())?,
            )),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The root of unity `exp(2*pi*i*angle)`, with `angle` kept in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "PhaseRepr", into = "PhaseRepr")]
pub struct UnitPhase {
    angle: Rational,
}

#[derive(Serialize, Deserialize)]
struct PhaseRepr {
    angle: Rational,
}

impl From<PhaseRepr> for UnitPhase {
    fn from(r: PhaseRepr) -> Self {
        UnitPhase::new(r.angle)
    }
}

impl From<UnitPhase> for PhaseRepr {
    fn from(p: UnitPhase) -> Self {
        PhaseRepr { angle: p.angle }
    }
}

impl UnitPhase {
    pub fn new(angle: Rational) -> Self {
        UnitPhase {
            angle: angle.fract_mod1(),
        }
    }

    /// `exp(2*pi*i*num/den)`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        UnitPhase::new(Rational::new(num, den))
    }

    pub fn one() -> Self {
        UnitPhase::default()
    }

    pub fn angle(&self) -> &Rational {
        &self.angle
    }

    pub fn is_one(&self) -> bool {
        self.angle.is_zero()
    }

    pub fn inv(&self) -> Self {
        UnitPhase::new(-&self.angle)
    }

    pub fn conj(&self) -> Self {
        self.inv()
    }

    pub fn pow(&self, n: i64) -> Self {
        UnitPhase::new(&self.angle * Rational::from_integer(n))
    }

    pub fn eval(&self) -> ApproxComplex {
        unit_phase_eval(self)
    }
}

impl Mul for UnitPhase {
    type Output = UnitPhase;
    fn mul(self, rhs: UnitPhase) -> UnitPhase {
        UnitPhase::new(self.angle + rhs.angle)
    }
}

impl<'a> Mul<&'a UnitPhase> for &'a UnitPhase {
    type Output = UnitPhase;
    fn mul(self, rhs: &UnitPhase) -> UnitPhase {
        UnitPhase::new(&self.angle + &rhs.angle)
    }
}

impl fmt::Display for UnitPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^(2πi·{})", self.angle)
    }
}

/// `sqrt(mag2) * phase`, exact. The phase is meaningless when `mag2 == 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolarValue {
    mag2: Rational,
    #[serde(with = "phase_as_angle")]
    phase: UnitPhase,
}

mod phase_as_angle {
    use super::{Rational, UnitPhase};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &UnitPhase, s: S) -> Result<S::Ok, S::Error> {
        p.angle().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<UnitPhase, D::Error> {
        Ok(UnitPhase::new(Rational::deserialize(d)?))
    }
}

impl PolarValue {
    /// Panics if `mag2` is negative.
    pub fn new(mag2: Rational, phase: UnitPhase) -> Self {
        assert!(!mag2.is_negative(), "squared magnitude must be nonnegative");
        let phase = if mag2.is_zero() {
            UnitPhase::one()
        } else {
            phase
        };
        PolarValue { mag2, phase }
    }

    pub fn zero() -> Self {
        PolarValue::new(Rational::zero(), UnitPhase::one())
    }

    pub fn one() -> Self {
        PolarValue::new(Rational::one(), UnitPhase::one())
    }

    pub fn from_phase(phase: UnitPhase) -> Self {
        PolarValue::new(Rational::one(), phase)
    }

    pub fn mag2(&self) -> &Rational {
        &self.mag2
    }

    pub fn phase(&self) -> &UnitPhase {
        &self.phase
    }

    pub fn is_zero(&self) -> bool {
        self.mag2.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        Some(PolarValue::new(self.mag2.recip()?, self.phase.inv()))
    }

    pub fn conj(&self) -> Self {
        PolarValue::new(self.mag2.clone(), self.phase.conj())
    }

    pub fn to_approx(&self) -> ApproxComplex {
        polar_to_approx(self)
    }
}

impl PartialEq for PolarValue {
    fn eq(&self, other: &Self) -> bool {
        self.mag2 == other.mag2 && (self.mag2.is_zero() || self.phase == other.phase)
    }
}

impl Eq for PolarValue {}

impl Mul for PolarValue {
    type Output = PolarValue;
    fn mul(self, rhs: PolarValue) -> PolarValue {
        PolarValue::new(self.mag2 * rhs.mag2, self.phase * rhs.phase)
    }
}

impl<'a> Mul<&'a PolarValue> for &'a PolarValue {
    type Output = PolarValue;
    fn mul(self, rhs: &PolarValue) -> PolarValue {
        PolarValue::new(&self.mag2 * &rhs.mag2, &self.phase * &rhs.phase)
    }
}

/// Double-precision complex number for oracle-side sums.
///
/// No `PartialEq`: use [`approx_eq`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ApproxComplex {
    pub re: f64,
    pub im: f64,
}

impl ApproxComplex {
    pub const ZERO: ApproxComplex = ApproxComplex { re: 0.0, im: 0.0 };
    pub const ONE: ApproxComplex = ApproxComplex { re: 1.0, im: 0.0 };
    pub const I: ApproxComplex = ApproxComplex { re: 0.0, im: 1.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        ApproxComplex { re, im }
    }

    pub fn real(re: f64) -> Self {
        ApproxComplex { re, im: 0.0 }
    }

    pub fn conj(self) -> Self {
        ApproxComplex::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Argument in `(-pi, pi]`.
    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn scale(self, s: f64) -> Self {
        ApproxComplex::new(self.re * s, self.im * s)
    }

    /// `None` when dividing by exact zero.
    pub fn checked_div(self, rhs: ApproxComplex) -> Option<Self> {
        let d = rhs.norm_sqr();
        if d == 0.0 {
            return None;
        }
        Some(ApproxComplex::new(
            (self.re * rhs.re + self.im * rhs.im) / d,
            (self.im * rhs.re - self.re * rhs.im) / d,
        ))
    }
}

impl Add for ApproxComplex {
    type Output = ApproxComplex;
    fn add(self, rhs: ApproxComplex) -> ApproxComplex {
        ApproxComplex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign for ApproxComplex {
    fn add_assign(&mut self, rhs: ApproxComplex) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for ApproxComplex {
    type Output = ApproxComplex;
    fn sub(self, rhs: ApproxComplex) -> ApproxComplex {
        ApproxComplex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for ApproxComplex {
    type Output = ApproxComplex;
    fn neg(self) -> ApproxComplex {
        ApproxComplex::new(-self.re, -self.im)
    }
}

impl Mul for ApproxComplex {
    type Output = ApproxComplex;
    fn mul(self, rhs: ApproxComplex) -> ApproxComplex {
        ApproxComplex::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl MulAssign for ApproxComplex {
    fn mul_assign(&mut self, rhs: ApproxComplex) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for ApproxComplex {
    fn sum<I: Iterator<Item = ApproxComplex>>(iter: I) -> Self {
        iter.fold(ApproxComplex::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for ApproxComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < 0.0 {
            write!(f, "{:.12}-{:.12}i", self.re, -self.im)
        } else {
            write!(f, "{:.12}+{:.12}i", self.re, self.im)
        }
    }
}

impl Serialize for ApproxComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.re, self.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ApproxComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(ApproxComplex::new(re, im))
    }
}

/// `cos(2*pi*angle) + i sin(2*pi*angle)`.
///
/// The angle is split exactly as a multiple of a quarter turn plus a remainder in
/// `[-1/8, 1/8]`, so quarter turns come out exact and the float trig call only ever
/// sees a small argument.
pub fn unit_phase_eval(p: &UnitPhase) -> ApproxComplex {
    let a = p.angle();
    let four = BigInt::from(4);
    // nearest quarter: floor(4a + 1/2) = floor((8n + d) / (2d))
    let (n, d) = (a.numer(), a.denom());
    let quarter = (BigInt::from(8) * n + d).div_floor(&(BigInt::from(2) * d));
    let rem = a - Rational::new(quarter.clone(), four.clone());
    let theta = TAU * rem.to_f64();
    let (s, c) = theta.sin_cos();
    let q = quarter.mod_floor(&four).to_u8().unwrap_or(0);
    match q {
        0 => ApproxComplex::new(c, s),
        1 => ApproxComplex::new(-s, c),
        2 => ApproxComplex::new(-c, -s),
        _ => ApproxComplex::new(s, -c),
    }
}

pub fn polar_to_approx(v: &PolarValue) -> ApproxComplex {
    if v.is_zero() {
        return ApproxComplex::ZERO;
    }
    unit_phase_eval(v.phase()).scale(v.mag2().to_f64().sqrt())
}

/// `|a - b| <= tol`.
pub fn approx_eq(a: ApproxComplex, b: ApproxComplex, tol: f64) -> bool {
    debug_assert!(tol > 0.0);
    (a - b).abs() <= tol
}

/// Tolerance policy shared by every brute-force comparison: `base * sqrt(terms)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Tolerance {
    pub base: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { base: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(base: f64) -> Self {
        Tolerance { base }
    }

    pub fn for_terms(&self, terms: f64) -> f64 {
        self.base * terms.max(1.0).sqrt()
    }
}

/// Precomputed `exp(pi*i*j/k)` for `j` in `0..2k`, indexed by residues mod `2k`.
#[derive(Clone, Debug)]
pub(crate) struct HalfTurnTable {
    values: Vec<ApproxComplex>,
}

impl HalfTurnTable {
    pub(crate) fn new(k: u64) -> Self {
        let period = 2 * k as i64;
        let values = (0..period)
            .map(|j| UnitPhase::from_ratio(j, period).eval())
            .collect();
        HalfTurnTable { values }
    }

    /// Sum of `counts[j] * exp(pi*i*j/k)`.
    pub(crate) fn contract(&self, counts: &[u64]) -> ApproxComplex {
        counts
            .iter()
            .zip(&self.values)
            .filter(|(c, _)| **c != 0)
            .map(|(&c, v)| v.scale(c as f64))
            .sum()
    }
}
