//! Exact arithmetic in the biquadratic field ℚ(√2, √3).
//!
//! An element is stored as `a + b√2 + c√3 + d√6` with rational coefficients.
//! The representation is unique, so equality and hashing work on coefficients.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = Ratio<i128>;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct QNum {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

/// Element `r + s√2` of ℚ(√2); used for norms and signs.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Q2 {
    r: Rational,
    s: Rational,
}

impl Q2 {
    fn mul(self, o: Q2) -> Q2 {
        Q2 {
            r: self.r * o.r + Rational::from_integer(2) * self.s * o.s,
            s: self.r * o.s + self.s * o.r,
        }
    }

    fn sub(self, o: Q2) -> Q2 {
        Q2 { r: self.r - o.r, s: self.s - o.s }
    }

    fn scale(self, k: Rational) -> Q2 {
        Q2 { r: self.r * k, s: self.s * k }
    }

    fn conj(self) -> Q2 {
        Q2 { r: self.r, s: -self.s }
    }

    fn norm(self) -> Rational {
        self.r * self.r - Rational::from_integer(2) * self.s * self.s
    }

    fn signum(self) -> i32 {
        let sr = rsign(&self.r);
        let ss = rsign(&self.s);
        if sr == 0 || ss == 0 || sr == ss {
            return if sr != 0 { sr } else { ss };
        }
        // opposite signs: compare r² with 2s²
        let n = rsign(&self.norm());
        n * sr
    }
}

fn rsign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl QNum {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        QNum { a, b, c, d }
    }

    pub fn zero() -> Self {
        QNum::default()
    }

    pub fn one() -> Self {
        QNum::int(1)
    }

    pub fn int(n: i64) -> Self {
        QNum::rational(Rational::from_integer(n as i128))
    }

    pub fn frac(p: i64, q: i64) -> Self {
        QNum::rational(Rational::new(p as i128, q as i128))
    }

    pub fn rational(r: Rational) -> Self {
        QNum { a: r, ..QNum::default() }
    }

    pub fn sqrt2() -> Self {
        QNum { b: Rational::one(), ..QNum::default() }
    }

    pub fn sqrt3() -> Self {
        QNum { c: Rational::one(), ..QNum::default() }
    }

    pub fn sqrt6() -> Self {
        QNum { d: Rational::one(), ..QNum::default() }
    }

    /// Exact square root of a nonnegative rational when it lies in the field
    /// (i.e. the square-free part is 1, 2, 3 or 6).
    pub fn sqrt_rational(r: Rational) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        if r.is_zero() {
            return Some(QNum::zero());
        }
        for (k, unit) in [(1, QNum::one()), (2, QNum::sqrt2()), (3, QNum::sqrt3()), (6, QNum::sqrt6())] {
            let k = Rational::from_integer(k);
            if let Some(s) = rational_sqrt(r / k) {
                return Some(unit * QNum::rational(s));
            }
        }
        None
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    fn split(self) -> (Q2, Q2) {
        (Q2 { r: self.a, s: self.b }, Q2 { r: self.c, s: self.d })
    }

    fn join(p: Q2, q: Q2) -> Self {
        QNum { a: p.r, b: p.s, c: q.r, d: q.s }
    }

    /// Exact sign: writing `x = p + q√3` with `p, q ∈ ℚ(√2)`.
    pub fn signum(&self) -> i32 {
        let (p, q) = self.split();
        let sp = p.signum();
        let sq = q.signum();
        if sp == 0 || sq == 0 || sp == sq {
            return if sp != 0 { sp } else { sq };
        }
        let n = p.mul(p).sub(q.mul(q).scale(Rational::from_integer(3)));
        n.signum() * sp
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -*self
        } else {
            *self
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let (p, q) = self.split();
        // 1/(p + q√3) = (p − q√3)/(p² − 3q²), then rationalize in ℚ(√2)
        let n = p.mul(p).sub(q.mul(q).scale(Rational::from_integer(3)));
        let nn = n.norm();
        let ninv = n.conj().scale(nn.recip());
        Some(QNum::join(p.mul(ninv), q.mul(ninv).scale(-Rational::one())))
    }

    pub fn to_f64(&self) -> f64 {
        let f = |r: &Rational| *r.numer() as f64 / *r.denom() as f64;
        f(&self.a) + f(&self.b) * std::f64::consts::SQRT_2 + f(&self.c) * 3f64.sqrt() + f(&self.d) * 6f64.sqrt()
    }

    pub fn square(&self) -> Self {
        *self * *self
    }
}

fn rational_sqrt(r: Rational) -> Option<Rational> {
    let n = int_sqrt(*r.numer())?;
    let d = int_sqrt(*r.denom())?;
    Some(Rational::new(n, d))
}

fn int_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let s = (n as f64).sqrt().round() as i128;
    (s.saturating_sub(1)..=s + 1).find(|&t| t >= 0 && t * t == n)
}

impl Add for QNum {
    type Output = QNum;
    fn add(self, o: QNum) -> QNum {
        QNum { a: self.a + o.a, b: self.b + o.b, c: self.c + o.c, d: self.d + o.d }
    }
}

impl Sub for QNum {
    type Output = QNum;
    fn sub(self, o: QNum) -> QNum {
        QNum { a: self.a - o.a, b: self.b - o.b, c: self.c - o.c, d: self.d - o.d }
    }
}

impl Neg for QNum {
    type Output = QNum;
    fn neg(self) -> QNum {
        QNum { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

impl Mul for QNum {
    type Output = QNum;
    fn mul(self, o: QNum) -> QNum {
        let two = Rational::from_integer(2);
        let three = Rational::from_integer(3);
        let six = Rational::from_integer(6);
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let (e, f, g, h) = (o.a, o.b, o.c, o.d);
        // √2√3 = √6, √2√6 = 2√3, √3√6 = 3√2
        QNum {
            a: a * e + two * b * f + three * c * g + six * d * h,
            b: a * f + b * e + three * (c * h + d * g),
            c: a * g + c * e + two * (b * h + d * f),
            d: a * h + d * e + b * g + c * f,
        }
    }
}

impl Mul<Rational> for QNum {
    type Output = QNum;
    fn mul(self, k: Rational) -> QNum {
        QNum { a: self.a * k, b: self.b * k, c: self.c * k, d: self.d * k }
    }
}

impl Div for QNum {
    type Output = QNum;
    fn div(self, o: QNum) -> QNum {
        self * o.inv().expect("division by zero in QNum")
    }
}

impl AddAssign for QNum {
    fn add_assign(&mut self, o: QNum) {
        *self = *self + o;
    }
}

impl SubAssign for QNum {
    fn sub_assign(&mut self, o: QNum) {
        *self = *self - o;
    }
}

impl MulAssign for QNum {
    fn mul_assign(&mut self, o: QNum) {
        *self = *self * o;
    }
}

impl Sum for QNum {
    fn sum<I: Iterator<Item = QNum>>(iter: I) -> QNum {
        iter.fold(QNum::zero(), |s, x| s + x)
    }
}

impl PartialOrd for QNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QNum {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).signum().cmp(&0)
    }
}

impl From<i64> for QNum {
    fn from(n: i64) -> Self {
        QNum::int(n)
    }
}

impl fmt::Debug for QNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (r, unit) in [(self.a, ""), (self.b, "√2"), (self.c, "√3"), (self.d, "√6")] {
            if r.is_zero() {
                continue;
            }
            if unit.is_empty() {
                parts.push(r.to_string());
            } else if r.is_one() {
                parts.push(unit.to_string());
            } else if r == -Rational::one() {
                parts.push(format!("-{unit}"));
            } else {
                parts.push(format!("{r}{unit}"));
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(p);
            }
        }
        write!(f, "{s}")
    }
}

fn ratio_string(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = i128::from_str(p.trim()).map_err(|e| format!("bad numerator {p:?}: {e}"))?;
            let q = i128::from_str(q.trim()).map_err(|e| format!("bad denominator {q:?}: {e}"))?;
            if q == 0 {
                return Err("zero denominator".into());
            }
            Ok(Rational::new(p, q))
        }
        None => i128::from_str(s).map(Rational::from_integer).map_err(|e| format!("bad rational {s:?}: {e}")),
    }
}

#[derive(Serialize, Deserialize)]
struct QNumRepr {
    #[serde(default)]
    a: Option<String>,
    #[serde(default)]
    b: Option<String>,
    #[serde(default)]
    c: Option<String>,
    #[serde(default)]
    d: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum QNumInput {
    Int(i64),
    Text(String),
    Full(QNumRepr),
}

/// Rationals serialize as strings (`"-1/2"`), anything else as the
/// coefficient object `{a, b, c, d}` of `a + b√2 + c√3 + d√6`.
impl Serialize for QNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_rational() {
            return s.serialize_str(&ratio_string(&self.a));
        }
        QNumRepr {
            a: Some(ratio_string(&self.a)),
            b: Some(ratio_string(&self.b)),
            c: Some(ratio_string(&self.c)),
            d: Some(ratio_string(&self.d)),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let get = |x: Option<String>| -> Result<Rational, D::Error> {
            match x {
                None => Ok(Rational::zero()),
                Some(s) => parse_rational(&s).map_err(D::Error::custom),
            }
        };
        match QNumInput::deserialize(d)? {
            QNumInput::Int(n) => Ok(QNum::int(n)),
            QNumInput::Text(t) => Ok(QNum::rational(get(Some(t))?)),
            QNumInput::Full(r) => Ok(QNum { a: get(r.a)?, b: get(r.b)?, c: get(r.c)?, d: get(r.d)? }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64, c: i64, d: i64) -> QNum {
        QNum::new(
            Rational::from_integer(a as i128),
            Rational::from_integer(b as i128),
            Rational::from_integer(c as i128),
            Rational::from_integer(d as i128),
        )
    }

    #[test]
    fn surd_products() {
        assert_eq!(QNum::sqrt2() * QNum::sqrt2(), QNum::int(2));
        assert_eq!(QNum::sqrt3() * QNum::sqrt3(), QNum::int(3));
        assert_eq!(QNum::sqrt6() * QNum::sqrt6(), QNum::int(6));
        assert_eq!(QNum::sqrt2() * QNum::sqrt3(), QNum::sqrt6());
        assert_eq!(QNum::sqrt2() * QNum::sqrt6(), QNum::sqrt3() * QNum::int(2));
        assert_eq!(QNum::sqrt3() * QNum::sqrt6(), QNum::sqrt2() * QNum::int(3));
    }

    #[test]
    fn inverse_roundtrip() {
        let x = q(1, -2, 3, 1);
        assert_eq!(x * x.inv().unwrap(), QNum::one());
        assert!(QNum::zero().inv().is_none());
    }

    #[test]
    fn signs_near_cancellation() {
        // 1 + √2 − √3 − ... values checked against floats
        let cases = [q(1, 1, -1, 0), q(5, 0, 0, -2), q(-7, 5, 0, 0), q(0, 0, 7, -5), q(3, -2, 1, 0), q(10, -7, 0, 0)];
        for x in cases {
            let f = x.to_f64();
            assert_eq!(x.signum(), if f > 0.0 { 1 } else { -1 }, "{x} ~ {f}");
        }
        assert_eq!(QNum::zero().signum(), 0);
    }

    #[test]
    fn ordering_matches_reals() {
        let xs = [QNum::sqrt2(), QNum::sqrt3(), QNum::frac(3, 2), QNum::sqrt6() * QNum::frac(1, 2), QNum::int(-1)];
        for x in xs {
            for y in xs {
                assert_eq!(x.cmp(&y), x.to_f64().partial_cmp(&y.to_f64()).unwrap());
            }
        }
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(QNum::sqrt_rational(Rational::new(3, 4)), Some(QNum::sqrt3() * QNum::frac(1, 2)));
        assert_eq!(QNum::sqrt_rational(Rational::new(1, 2)), Some(QNum::sqrt2() * QNum::frac(1, 2)));
        assert_eq!(QNum::sqrt_rational(Rational::from_integer(5)), None);
    }

    #[test]
    fn json_roundtrip() {
        let x = q(1, 0, -3, 2) * QNum::frac(1, 3);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"a":"1/3","b":"0","c":"-1","d":"2/3"}"#);
        let y: QNum = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        let z: QNum = serde_json::from_str(r#"{"c":"1/2"}"#).unwrap();
        assert_eq!(z, QNum::sqrt3() * QNum::frac(1, 2));
        assert_eq!(serde_json::to_string(&QNum::frac(-1, 2)).unwrap(), r#""-1/2""#);
        assert_eq!(serde_json::from_str::<QNum>("-3").unwrap(), QNum::int(-3));
        assert_eq!(serde_json::from_str::<QNum>(r#""2/4""#).unwrap(), QNum::frac(1, 2));
        assert!(serde_json::from_str::<QNum>("0.5").is_err());
    }

    #[test]
    fn display_is_compact() {
        assert_eq!((QNum::sqrt3() * QNum::frac(-1, 2)).to_string(), "-1/2√3");
        assert_eq!((QNum::int(1) - QNum::sqrt2()).to_string(), "1 - √2");
        assert_eq!(QNum::zero().to_string(), "0");
    }
}
