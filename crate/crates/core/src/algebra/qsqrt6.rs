//! Exact arithmetic in `ℚ[√6]`: numbers `a + b√6` with rational `a`, `b`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QSqrt6 {
    pub a: BigRational,
    pub b: BigRational,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QSqrt6 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        Self { a, b: BigRational::zero() }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Self { a: int(a), b: int(b) }
    }

    /// `√6`.
    pub fn root() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// `a − b√6`.
    pub fn conjugate(&self) -> Self {
        Self { a: self.a.clone(), b: -self.b.clone() }
    }

    /// `a² − 6b²` (the field norm).
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - int(6) * &self.b * &self.b
    }

    /// Exact sign of `a + b√6`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare a² with 6b²
        match (&self.a * &self.a).cmp(&(int(6) * &self.b * &self.b)) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * 6f64.sqrt()
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conjugate();
        Some(Self { a: c.a / &n, b: c.b / n })
    }
}

impl fmt::Display for QSqrt6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}·√6", self.b),
            (false, false) => {
                let sign = if self.b.is_negative() { "-" } else { "+" };
                write!(f, "{} {} {}·√6", self.a, sign, self.b.abs())
            }
        }
    }
}

impl<'a> Add<&'a QSqrt6> for &'a QSqrt6 {
    type Output = QSqrt6;
    fn add(self, o: &QSqrt6) -> QSqrt6 {
        QSqrt6 { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl<'a> Sub<&'a QSqrt6> for &'a QSqrt6 {
    type Output = QSqrt6;
    fn sub(self, o: &QSqrt6) -> QSqrt6 {
        QSqrt6 { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl<'a> Mul<&'a QSqrt6> for &'a QSqrt6 {
    type Output = QSqrt6;
    fn mul(self, o: &QSqrt6) -> QSqrt6 {
        QSqrt6 { a: &self.a * &o.a + int(6) * &self.b * &o.b, b: &self.a * &o.b + &self.b * &o.a }
    }
}

impl<'a> Div<&'a QSqrt6> for &'a QSqrt6 {
    type Output = QSqrt6;
    fn div(self, o: &QSqrt6) -> QSqrt6 {
        self * &o.recip().expect("division by zero in Q[√6]")
    }
}

impl Neg for QSqrt6 {
    type Output = QSqrt6;
    fn neg(self) -> QSqrt6 {
        QSqrt6 { a: -self.a, b: -self.b }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QSqrt6 {
            type Output = QSqrt6;
            fn $m(self, o: QSqrt6) -> QSqrt6 {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Mul<&QSqrt6> for &BigRational {
    type Output = QSqrt6;
    fn mul(self, o: &QSqrt6) -> QSqrt6 {
        QSqrt6 { a: self * &o.a, b: self * &o.b }
    }
}

impl One for QSqrt6 {
    fn one() -> Self {
        QSqrt6::one()
    }
}
