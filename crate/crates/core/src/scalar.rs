//! Scalar values with an explicit exactness regime.
//!
//! A [`Scalar`] is a complex number that is either exact (rational real and
//! imaginary parts of unbounded precision) or inexact (a `Complex64`).
//! Arithmetic is contagious: combining two exact scalars stays exact, and any
//! operation touching an inexact scalar yields an inexact one.
//!
//! A [`Magnitude`] is a non-negative real quantity (a modulus, a norm value, a
//! weighted distance). Exact magnitudes are stored by their *square*, which is
//! always rational for an exact complex scalar even when the modulus itself is
//! irrational; comparisons and products therefore remain exact.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact complex number with rational components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactComplex {
    fn modulus_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::INFINITY),
            self.im.to_f64().unwrap_or(f64::INFINITY),
        )
    }
}

/// A complex scalar tagged with its arithmetic regime.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(ExactComplex),
    Float(Complex64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::from_integer(0)
    }

    pub fn one() -> Self {
        Scalar::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar::Exact(ExactComplex {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        })
    }

    /// Exact real rational p/q. Panics if q == 0.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        Scalar::Exact(ExactComplex {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        })
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Exact(ExactComplex {
            re: r,
            im: BigRational::zero(),
        })
    }

    pub fn exact(re: BigRational, im: BigRational) -> Self {
        Scalar::Exact(ExactComplex { re, im })
    }

    pub fn from_f64(x: f64) -> Self {
        Scalar::Float(Complex64::new(x, 0.0))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.re.is_zero() && z.im.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.re.is_one() && z.im.is_zero(),
            Scalar::Float(z) => z.re == 1.0 && z.im == 0.0,
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        match self {
            Scalar::Exact(z) => z.to_complex64(),
            Scalar::Float(z) => *z,
        }
    }

    /// Exact rational value when the scalar is exact and purely real.
    pub fn as_real_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Exact(z) if z.im.is_zero() => Some(z.re.clone()),
            _ => None,
        }
    }

    pub fn modulus(&self) -> Magnitude {
        match self {
            Scalar::Exact(z) => Magnitude::ExactSq(z.modulus_sq()),
            Scalar::Float(z) => Magnitude::Float(z.norm()),
        }
    }

    /// `self^n` by repeated squaring; stays exact for exact scalars.
    pub fn powu(&self, n: u64) -> Scalar {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        // Contagion: an inexact base must yield an inexact power even for n = 0.
        if !self.is_exact() && acc.is_exact() {
            return Scalar::Float(acc.to_complex64());
        }
        acc
    }

    /// Multiplicative inverse; errors on zero.
    pub fn recip(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::PreconditionUnmet("division by zero scalar".into()));
        }
        Ok(match self {
            Scalar::Exact(z) => {
                let d = z.modulus_sq();
                Scalar::Exact(ExactComplex {
                    re: &z.re / &d,
                    im: -(&z.im / &d),
                })
            }
            Scalar::Float(z) => Scalar::Float(z.inv()),
        })
    }

    /// Parse `a+bi` with rational (`3/2`, `-1`) or decimal (`1.5`, `2e-3`)
    /// components. Rational components produce an exact scalar; any decimal
    /// component makes the whole value inexact.
    pub fn parse(input: &str) -> Result<Scalar> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::InvalidSpec("empty scalar".into()));
        }
        // Split into at most two signed components; '+'/'-' inside exponents
        // (after 'e'/'E') do not split.
        let bytes = s.as_bytes();
        let mut split_at = None;
        for i in 1..bytes.len() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split_at = Some(i);
            }
        }
        let (first, second) = match split_at {
            Some(i) => (&s[..i], Some(&s[i..])),
            None => (&s[..], None),
        };
        let mut re: Option<Component> = None;
        let mut im: Option<Component> = None;
        for part in [Some(first), second].into_iter().flatten() {
            let comp = parse_component(part)?;
            if comp.imaginary {
                if im.is_some() {
                    return Err(Error::InvalidSpec(format!(
                        "two imaginary components in `{input}`"
                    )));
                }
                im = Some(comp);
            } else {
                if re.is_some() {
                    return Err(Error::InvalidSpec(format!(
                        "two real components in `{input}`"
                    )));
                }
                re = Some(comp);
            }
        }
        let exact = re.as_ref().map_or(true, |c| c.exact) && im.as_ref().map_or(true, |c| c.exact);
        if exact {
            let re = re.map_or_else(BigRational::zero, |c| c.rational);
            let im = im.map_or_else(BigRational::zero, |c| c.rational);
            Ok(Scalar::exact(re, im))
        } else {
            let re = re.map_or(0.0, |c| c.approx);
            let im = im.map_or(0.0, |c| c.approx);
            Ok(Scalar::complex(re, im))
        }
    }
}

struct Component {
    imaginary: bool,
    exact: bool,
    rational: BigRational,
    approx: f64,
}

fn parse_component(part: &str) -> Result<Component> {
    let bad = || Error::InvalidSpec(format!("cannot parse scalar component `{part}`"));
    let mut body = part;
    let mut imaginary = false;
    // Accept `i`, `-i`, `2i`, `1/2i`, and the `i/2` spelling of 1/2 i.
    if let Some(stripped) = body.strip_suffix('i') {
        imaginary = true;
        body = stripped;
    } else if body.contains('i') {
        let replaced = body.replacen('i', "1", 1);
        if replaced.contains('i') {
            return Err(bad());
        }
        imaginary = true;
        return parse_numeric(&replaced, imaginary).ok_or_else(bad);
    }
    if imaginary && (body.is_empty() || body == "+") {
        body = "1";
    } else if imaginary && body == "-" {
        body = "-1";
    }
    parse_numeric(body, imaginary).ok_or_else(bad)
}

fn parse_numeric(body: &str, imaginary: bool) -> Option<Component> {
    if body.contains('.') || body.contains('e') || body.contains('E') {
        let approx: f64 = body.parse().ok()?;
        return Some(Component {
            imaginary,
            exact: false,
            rational: BigRational::zero(),
            approx,
        });
    }
    let rational = if let Some((num, den)) = body.split_once('/') {
        let num: BigInt = num.parse().ok()?;
        let den: BigInt = den.parse().ok()?;
        if den.is_zero() {
            return None;
        }
        BigRational::new(num, den)
    } else {
        BigRational::from_integer(body.parse::<BigInt>().ok()?)
    };
    let approx = rational.to_f64().unwrap_or(f64::NAN);
    Some(Component {
        imaginary,
        exact: true,
        rational,
        approx,
    })
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (a, b) => a.to_complex64() == b.to_complex64(),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(ExactComplex {
                        re: binop_re!($op, a, b),
                        im: binop_im!($op, a, b),
                    }),
                    (a, b) => Scalar::Float(a.to_complex64() $op b.to_complex64()),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

macro_rules! binop_re {
    (+, $a:ident, $b:ident) => {
        &$a.re + &$b.re
    };
    (-, $a:ident, $b:ident) => {
        &$a.re - &$b.re
    };
    (*, $a:ident, $b:ident) => {
        &$a.re * &$b.re - &$a.im * &$b.im
    };
}
macro_rules! binop_im {
    (+, $a:ident, $b:ident) => {
        &$a.im + &$b.im
    };
    (-, $a:ident, $b:ident) => {
        &$a.im - &$b.im
    };
    (*, $a:ident, $b:ident) => {
        &$a.re * &$b.im + &$a.im * &$b.re
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(ExactComplex {
                re: -z.re.clone(),
                im: -z.im.clone(),
            }),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(z) => {
                if z.im.is_zero() {
                    return write!(f, "{}", z.re);
                }
                if z.re.is_zero() {
                    return write!(f, "{}i", z.im);
                }
                if z.im.is_negative() {
                    write!(f, "{}-{}i", z.re, -z.im.clone())
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    return write!(f, "{}", z.re);
                }
                if z.im < 0.0 {
                    write!(f, "{}-{}i", z.re, -z.im)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let z = self.to_complex64();
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("re", &z.re)?;
        map.serialize_entry("im", &z.im)?;
        map.serialize_entry("exact", &self.is_exact())?;
        if let Scalar::Exact(e) = self {
            map.serialize_entry("re_exact", &e.re.to_string())?;
            map.serialize_entry("im_exact", &e.im.to_string())?;
        }
        map.end()
    }
}

/// A non-negative real quantity, exact or floating point.
///
/// The exact variant stores the squared value, which keeps moduli of exact
/// complex scalars exactly comparable even when the modulus itself is
/// irrational. Display and `approx()` report the value itself.
#[derive(Clone, Debug)]
pub enum Magnitude {
    ExactSq(BigRational),
    Float(f64),
}

impl Magnitude {
    pub fn zero() -> Self {
        Magnitude::ExactSq(BigRational::zero())
    }

    /// Exact magnitude with the given non-negative value.
    pub fn exact_value(v: BigRational) -> Self {
        debug_assert!(!v.is_negative());
        Magnitude::ExactSq(&v * &v)
    }

    pub fn from_count(n: u64) -> Self {
        Magnitude::exact_value(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Magnitude::ExactSq(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Magnitude::ExactSq(sq) => sq.is_zero(),
            Magnitude::Float(v) => *v == 0.0,
        }
    }

    /// Floating point approximation of the value.
    pub fn approx(&self) -> f64 {
        match self {
            Magnitude::ExactSq(sq) => sq.to_f64().map_or(f64::INFINITY, f64::sqrt),
            Magnitude::Float(v) => *v,
        }
    }

    /// The exact value as a rational, when it is one (perfect-square square).
    pub fn exact_rational(&self) -> Option<BigRational> {
        match self {
            Magnitude::ExactSq(sq) => rational_sqrt(sq),
            Magnitude::Float(_) => None,
        }
    }

    pub fn mul(&self, other: &Magnitude) -> Magnitude {
        match (self, other) {
            (Magnitude::ExactSq(a), Magnitude::ExactSq(b)) => Magnitude::ExactSq(a * b),
            (a, b) => Magnitude::Float(a.approx() * b.approx()),
        }
    }

    /// `self / other`; errors on a zero divisor.
    pub fn div(&self, other: &Magnitude) -> Result<Magnitude> {
        if other.is_zero() {
            return Err(Error::PreconditionUnmet(
                "division by zero magnitude".into(),
            ));
        }
        Ok(match (self, other) {
            (Magnitude::ExactSq(a), Magnitude::ExactSq(b)) => Magnitude::ExactSq(a / b),
            (a, b) => Magnitude::Float(a.approx() / b.approx()),
        })
    }

    pub fn powu(&self, n: u64) -> Magnitude {
        match self {
            Magnitude::ExactSq(sq) => {
                let mut acc = BigRational::one();
                let mut base = sq.clone();
                let mut k = n;
                while k > 0 {
                    if k & 1 == 1 {
                        acc *= &base;
                    }
                    base = &base * &base;
                    k >>= 1;
                }
                Magnitude::ExactSq(acc)
            }
            Magnitude::Float(v) => Magnitude::Float(v.powi(n as i32)),
        }
    }

    /// n-th root of the value; exact when the squared value has an exact
    /// rational n-th root.
    pub fn nth_root(&self, n: u32) -> Magnitude {
        assert!(n >= 1);
        match self {
            Magnitude::ExactSq(sq) => match rational_nth_root(sq, n) {
                Some(root_sq) => Magnitude::ExactSq(root_sq),
                None => Magnitude::Float(self.approx().powf(1.0 / f64::from(n))),
            },
            Magnitude::Float(v) => Magnitude::Float(v.powf(1.0 / f64::from(n))),
        }
    }

    /// Exact comparison against a non-negative rational value.
    pub fn le_value(&self, bound: &BigRational) -> bool {
        debug_assert!(!bound.is_negative());
        match self {
            Magnitude::ExactSq(sq) => *sq <= bound * bound,
            Magnitude::Float(v) => *v <= bound.to_f64().unwrap_or(f64::INFINITY),
        }
    }

    pub fn lt_value(&self, bound: &BigRational) -> bool {
        debug_assert!(!bound.is_negative());
        match self {
            Magnitude::ExactSq(sq) => *sq < bound * bound,
            Magnitude::Float(v) => *v < bound.to_f64().unwrap_or(f64::INFINITY),
        }
    }

    pub fn eq_value(&self, bound: &BigRational) -> bool {
        match self {
            Magnitude::ExactSq(sq) => *sq == bound * bound,
            Magnitude::Float(v) => *v == bound.to_f64().unwrap_or(f64::INFINITY),
        }
    }
}

impl PartialEq for Magnitude {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Magnitude {}

impl PartialOrd for Magnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Magnitude {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Magnitude::ExactSq(a), Magnitude::ExactSq(b)) => a.cmp(b),
            (a, b) => a.approx().total_cmp(&b.approx()),
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.exact_rational() {
            write!(f, "{r}")
        } else {
            write!(f, "{}", self.approx())
        }
    }
}

impl Serialize for Magnitude {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("value", &self.approx())?;
        map.serialize_entry("exact", &self.is_exact())?;
        if let Some(r) = self.exact_rational() {
            map.serialize_entry("exact_value", &r.to_string())?;
        } else if let Magnitude::ExactSq(sq) = self {
            map.serialize_entry("exact_square", &sq.to_string())?;
        }
        map.end()
    }
}

/// Exact square root of a non-negative rational, when it exists.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

/// Exact n-th root of a non-negative rational, when it exists.
pub fn rational_nth_root(r: &BigRational, n: u32) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let rn = r.numer().nth_root(n);
    let rd = r.denom().nth_root(n);
    if &pow_bigint(&rn, n) == r.numer() && &pow_bigint(&rd, n) == r.denom() {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

fn pow_bigint(b: &BigInt, n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..n {
        acc *= b;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contagion() {
        let e = Scalar::from_ratio(3, 2);
        let f = Scalar::from_f64(0.5);
        assert!((&e * &e).is_exact());
        assert!(!(&e * &f).is_exact());
        assert!(!(&f + &f).is_exact());
        assert!(!f.powu(0).is_exact());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Scalar::parse("3/2").unwrap(), Scalar::from_ratio(3, 2));
        assert_eq!(Scalar::parse("-1/3").unwrap(), Scalar::from_ratio(-1, 3));
        assert_eq!(
            Scalar::parse("3/2-1/2i").unwrap(),
            Scalar::exact(
                BigRational::new(3.into(), 2.into()),
                BigRational::new((-1).into(), 2.into())
            )
        );
        assert_eq!(
            Scalar::parse("i/2").unwrap(),
            Scalar::exact(BigRational::zero(), BigRational::new(1.into(), 2.into()))
        );
        assert_eq!(Scalar::parse("-i").unwrap().to_complex64().im, -1.0);
        let f = Scalar::parse("1.5+0.5i").unwrap();
        assert!(!f.is_exact());
        assert_eq!(f.to_complex64(), Complex64::new(1.5, 0.5));
        assert!(Scalar::parse("1/0").is_err());
        assert!(Scalar::parse("").is_err());
    }

    #[test]
    fn modulus_of_complex_rational_compares_exactly() {
        // |1+i| = sqrt(2) is irrational but its square is exactly 2.
        let z = Scalar::exact(BigRational::one(), BigRational::one());
        let m = z.modulus();
        assert!(m.is_exact());
        assert!(m.exact_rational().is_none());
        assert!(m.lt_value(&BigRational::new(3.into(), 2.into())));
        assert!(!m.le_value(&BigRational::new(7.into(), 5.into())));
    }

    #[test]
    fn magnitude_roots() {
        let m = Magnitude::from_count(65536); // 2^16
        let r = m.nth_root(16);
        assert!(r.is_exact());
        assert_eq!(
            r.exact_rational().unwrap(),
            BigRational::from_integer(2.into())
        );
        let irr = Magnitude::from_count(2).nth_root(2);
        assert!(irr.is_exact()); // sqrt(2): square is exactly 2
        assert!(irr.exact_rational().is_none());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::from_ratio(-3, 2).to_string(), "-3/2");
        assert_eq!(
            Scalar::exact(BigRational::one(), BigRational::new((-1).into(), 2.into())).to_string(),
            "1-1/2i"
        );
        assert_eq!(Magnitude::from_count(4).to_string(), "4");
    }

    #[test]
    fn recip_and_pow() {
        let l = Scalar::from_ratio(-1, 3);
        let r = l.recip().unwrap();
        assert_eq!(&l * &r, Scalar::one());
        assert_eq!(l.powu(3), Scalar::from_ratio(-1, 27));
        assert!(Scalar::zero().recip().is_err());
    }
}
