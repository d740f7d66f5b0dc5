//! Exact complex-rational scalars: the coefficient field of the expression core.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A Gaussian rational `re + im*i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn zero() -> Self {
        CRat {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        CRat {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn i() -> Self {
        CRat {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_rat(r: BigRational) -> Self {
        CRat {
            re: r,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Exact rational value, if purely real.
    pub fn as_rat(&self) -> Option<&BigRational> {
        if self.im.is_zero() {
            Some(&self.re)
        } else {
            None
        }
    }

    /// Exact integer value, if purely real and integral.
    pub fn as_int(&self) -> Option<BigInt> {
        let r = self.as_rat()?;
        if r.is_integer() {
            Some(r.to_integer())
        } else {
            None
        }
    }

    pub fn conj(&self) -> Self {
        CRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        let n = &self.re * &self.re + &self.im * &self.im;
        assert!(!n.is_zero(), "division by zero CRat");
        CRat {
            re: &self.re / &n,
            im: -(&self.im / &n),
        }
    }

    /// Integer power (negative allowed for nonzero values).
    pub fn powi(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().powi(-e);
        }
        let mut acc = CRat::one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Nonnegative real content used to canonicalize sums: gcd of all
    /// numerators over lcm of all denominators of re and im parts.
    pub fn abs_content(&self) -> BigRational {
        let a = self.re.abs();
        let b = self.im.abs();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let num = num_integer::gcd(a.numer().clone(), b.numer().clone());
        let den = num_integer::lcm(a.denom().clone(), b.denom().clone());
        BigRational::new(num, den)
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64()
        .unwrap_or_else(|| r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN))
}

/// `base^(num/den)` when it is exactly rational (e.g. `4^(1/2)`, `8^(-2/3)`).
pub fn rat_pow_exact(base: &BigRational, expo: &BigRational) -> Option<BigRational> {
    if expo.is_integer() {
        let e = expo.to_integer().to_i64()?;
        if base.is_zero() {
            return if e > 0 { Some(BigRational::zero()) } else { None };
        }
        let mut out = BigRational::one();
        let b = if e < 0 { base.recip() } else { base.clone() };
        for _ in 0..e.unsigned_abs() {
            out *= &b;
        }
        return Some(out);
    }
    if base.is_negative() || base.is_zero() {
        return None;
    }
    let den = expo.denom().to_u32()?;
    let num = expo.numer().to_i64()?;
    let root_n = base.numer().nth_root(den);
    let root_d = base.denom().nth_root(den);
    if &root_n.pow(den) == base.numer() && &root_d.pow(den) == base.denom() {
        let root = BigRational::new(root_n, root_d);
        rat_pow_exact(&root, &BigRational::from_integer(BigInt::from(num)))
    } else {
        None
    }
}

impl Add for &CRat {
    type Output = CRat;
    fn add(self, rhs: &CRat) -> CRat {
        CRat {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &CRat {
    type Output = CRat;
    fn sub(self, rhs: &CRat) -> CRat {
        CRat {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &CRat {
    type Output = CRat;
    fn mul(self, rhs: &CRat) -> CRat {
        CRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let im_part = |f: &mut fmt::Formatter<'_>, im: &BigRational| -> fmt::Result {
            if im.is_one() {
                write!(f, "i")
            } else if (-im).is_one() {
                write!(f, "-i")
            } else {
                write!(f, "{}*i", im)
            }
        };
        if self.re.is_zero() {
            return im_part(f, &self.im);
        }
        write!(f, "{} ", self.re)?;
        if self.im.is_negative() {
            write!(f, "- ")?;
            im_part(f, &self.im.abs())
        } else {
            write!(f, "+ ")?;
            im_part(f, &self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_arithmetic() {
        let i = CRat::i();
        assert_eq!(&i * &i, CRat::from_int(-1));
        assert_eq!(i.powi(4), CRat::one());
        let z = CRat {
            re: BigRational::from_integer(3.into()),
            im: BigRational::from_integer(4.into()),
        };
        assert_eq!(&z * &z.inv(), CRat::one());
    }

    #[test]
    fn exact_rational_powers() {
        let four = BigRational::from_integer(4.into());
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(rat_pow_exact(&four, &half), Some(BigRational::from_integer(2.into())));
        let two = BigRational::from_integer(2.into());
        assert_eq!(rat_pow_exact(&two, &half), None);
        assert_eq!(
            rat_pow_exact(&four, &BigRational::from_integer((-1).into())),
            Some(BigRational::new(1.into(), 4.into()))
        );
    }
}
