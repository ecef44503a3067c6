//! Fixed-precision p-adic integers.
//!
//! A [`PAdicApprox`] is a residue modulo `p^K` stored as `K` base-`p` digits,
//! least significant first. Precision travels with the value: binary
//! operations truncate to the smaller precision of their operands.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest prime accepted; digits and digit products then fit in `u32`/`u64`.
pub const MAX_PRIME: u32 = 65521;

/// A prime `p` with `2 <= p <= 65521`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..=MAX_PRIME as u64).contains(&p) {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    pub fn to_biguint(self) -> BigUint {
        BigUint::from(self.0)
    }

    /// `p^k` as a big integer.
    pub fn pow(self, k: usize) -> BigUint {
        num_traits::pow(self.to_biguint(), k)
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Base-`p` digits of `m`, least significant first. Zero has no digits.
pub fn natural_digits(m: &BigUint, p: Prime) -> Vec<u32> {
    let pv = p.get() as u64;
    if let Some(mut v) = m.to_u64() {
        let mut out = Vec::new();
        while v > 0 {
            out.push((v % pv) as u32);
            v /= pv;
        }
        return out;
    }
    if pv <= 256 {
        return m
            .to_radix_le(pv as u32)
            .into_iter()
            .map(u32::from)
            .collect();
    }
    let big_p = p.to_biguint();
    let mut out = Vec::new();
    let mut v = m.clone();
    while !v.is_zero() {
        let (q, r) = v.div_rem(&big_p);
        out.push(r.to_u32().unwrap_or(0));
        v = q;
    }
    out
}

/// Number of base-`p` digits of `m` (zero for `m = 0`).
pub fn digit_len(m: &BigUint, p: Prime) -> usize {
    natural_digits(m, p).len()
}

/// Inverse of [`natural_digits`]; digits are assumed to be `< p`.
pub fn natural_from_digits(digits: &[u32], p: Prime) -> BigUint {
    let pv = p.get() as u64;
    // p^len < 2^63 keeps the u64 Horner loop exact.
    let bits = 64 - (pv - 1).leading_zeros() as usize;
    if digits.len() * bits < 63 {
        let v = digits
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * pv + d as u64);
        return BigUint::from(v);
    }
    if pv <= 256 {
        let bytes: Vec<u8> = digits.iter().map(|&d| d as u8).collect();
        return BigUint::from_radix_le(&bytes, pv as u32).unwrap_or_default();
    }
    let big_p = p.to_biguint();
    digits
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, &d| acc * &big_p + BigUint::from(d))
}

/// p-adic valuation of a residue known modulo `p^K`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Valuation {
    Finite(usize),
    /// All known digits vanish; the valuation is only bounded below by `K`.
    AtLeast(usize),
}

impl Valuation {
    /// True when the residue certifiably has valuation `>= k`.
    pub fn certifies_at_least(self, k: usize) -> bool {
        match self {
            Valuation::Finite(v) => v >= k,
            Valuation::AtLeast(bound) => bound >= k,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// The value if finite, otherwise the lower bound.
    pub fn lower_bound(self) -> usize {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(k) => write!(f, ">={k}"),
        }
    }
}

/// A p-adic integer known exactly modulo `p^K`, `K = digits.len() >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPAdic", into = "RawPAdic")]
pub struct PAdicApprox {
    prime: Prime,
    digits: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawPAdic {
    p: u64,
    digits: Vec<u32>,
}

impl TryFrom<RawPAdic> for PAdicApprox {
    type Error = Error;
    fn try_from(raw: RawPAdic) -> Result<Self> {
        PAdicApprox::new(Prime::new(raw.p)?, raw.digits)
    }
}

impl From<PAdicApprox> for RawPAdic {
    fn from(x: PAdicApprox) -> RawPAdic {
        RawPAdic {
            p: x.prime.get() as u64,
            digits: x.digits,
        }
    }
}

impl PAdicApprox {
    pub fn new(prime: Prime, digits: Vec<u32>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::ZeroPrecision);
        }
        if let Some((position, &digit)) = digits.iter().enumerate().find(|(_, &d)| d >= prime.get())
        {
            return Err(Error::DigitOutOfRange {
                digit,
                position,
                p: prime.get(),
            });
        }
        Ok(PAdicApprox { prime, digits })
    }

    fn from_digits_unchecked(prime: Prime, mut digits: Vec<u32>, precision: usize) -> Self {
        digits.resize(precision, 0);
        PAdicApprox { prime, digits }
    }

    pub fn zero(prime: Prime, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        Ok(Self::from_digits_unchecked(prime, Vec::new(), precision))
    }

    /// Base-`p` expansion of `m mod p^K`.
    pub fn from_natural(m: &BigUint, prime: Prime, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let mut digits = natural_digits(m, prime);
        digits.truncate(precision);
        Ok(Self::from_digits_unchecked(prime, digits, precision))
    }

    pub fn from_u64(m: u64, prime: Prime, precision: usize) -> Result<Self> {
        Self::from_natural(&BigUint::from(m), prime, precision)
    }

    /// Residue of a signed integer modulo `p^K`.
    pub fn from_integer(m: &BigInt, prime: Prime, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let modulus = BigInt::from(prime.pow(precision));
        let r = m.mod_floor(&modulus);
        Self::from_natural(r.magnitude(), prime, precision)
    }

    /// Parses a (possibly negative) decimal integer.
    pub fn from_decimal_str(s: &str, prime: Prime, precision: usize) -> Result<Self> {
        let m: BigInt = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))?;
        Self::from_integer(&m, prime, precision)
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.prime
    }

    #[inline]
    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    #[inline]
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn digit(&self, i: usize) -> u32 {
        self.digits[i]
    }

    /// The residue as a natural number in `[0, p^K)`.
    pub fn to_natural(&self) -> BigUint {
        natural_from_digits(&self.digits, self.prime)
    }

    pub fn to_decimal_string(&self) -> String {
        self.to_natural().to_string()
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    pub fn valuation(&self) -> Valuation {
        match self.digits.iter().position(|&d| d != 0) {
            Some(v) => Valuation::Finite(v),
            None => Valuation::AtLeast(self.precision()),
        }
    }

    /// Reduction modulo `p^k`, `1 <= k <= K`.
    pub fn truncate(&self, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        if precision > self.precision() {
            return Err(Error::InsufficientPrecision {
                needed: precision,
                available: self.precision(),
            });
        }
        Ok(PAdicApprox {
            prime: self.prime,
            digits: self.digits[..precision].to_vec(),
        })
    }

    /// Exact division by `p^k` of a residue divisible by `p^k`; the result
    /// is known modulo `p^(K-k)`.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k >= self.precision() {
            return Err(Error::InsufficientPrecision {
                needed: k + 1,
                available: self.precision(),
            });
        }
        if !self.valuation().certifies_at_least(k) {
            return Err(Error::Precondition(format!(
                "residue not divisible by p^{k}"
            )));
        }
        Ok(PAdicApprox {
            prime: self.prime,
            digits: self.digits[k..].to_vec(),
        })
    }

    fn reduce(&self, value: BigUint, precision: usize) -> Self {
        let modulus = self.prime.pow(precision);
        let r = value % modulus;
        let digits = natural_digits(&r, self.prime);
        Self::from_digits_unchecked(self.prime, digits, precision)
    }

    fn common(&self, other: &Self) -> Result<(usize, BigUint, BigUint)> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch {
                left: self.prime.get(),
                right: other.prime.get(),
            });
        }
        let k = self.precision().min(other.precision());
        let a = natural_from_digits(&self.digits[..k], self.prime);
        let b = natural_from_digits(&other.digits[..k], self.prime);
        Ok((k, a, b))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let (k, a, b) = self.common(other)?;
        Ok(self.reduce(a + b, k))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let (k, a, b) = self.common(other)?;
        let modulus = self.prime.pow(k);
        Ok(self.reduce(a + modulus - b, k))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let (k, a, b) = self.common(other)?;
        Ok(self.reduce(a * b, k))
    }

    pub fn neg(&self) -> Self {
        let k = self.precision();
        let a = self.to_natural();
        if a.is_zero() {
            return self.clone();
        }
        self.reduce(self.prime.pow(k) - a, k)
    }

    /// Multiplication by `p^k` (digits move up, precision unchanged).
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.precision();
        let mut digits = vec![0; k.min(n)];
        digits.extend_from_slice(&self.digits[..n - k.min(n)]);
        PAdicApprox {
            prime: self.prime,
            digits,
        }
    }
}

impl fmt::Display for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (mod {}^{})",
            self.to_natural(),
            self.prime,
            self.precision()
        )
    }
}

/// Reduces a signed big integer into `[0, p^k)`.
pub(crate) fn residue_of(value: &BigInt, prime: Prime, precision: usize) -> BigUint {
    let modulus = BigInt::from(prime.pow(precision));
    value.mod_floor(&modulus).magnitude().clone()
}
