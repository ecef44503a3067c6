//! Continuous functions `Z_p -> Z_p` as exact digit oracles, the window
//! estimate of the modulus of continuity `psi(f; n)`, and the scale function
//! built from it.
//!
//! Every oracle is evaluated only at nonnegative integers and must return the
//! exact residue of `f(m)` modulo `p^K`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{natural_digits, residue_of, PAdicApprox, Prime};
use crate::scale::ScaleFn;

/// Largest window (number of points) the exhaustive scans in this crate accept.
pub const WINDOW_CAP: u64 = 100_000_000;

/// A continuous `f: Z_p -> Z_p` known through exact evaluation at integers.
pub trait FunctionOracle: Send + Sync {
    fn prime(&self) -> Prime;

    /// `f(m) mod p^precision`, exactly.
    fn eval(&self, m: &BigUint, precision: usize) -> Result<PAdicApprox>;

    fn name(&self) -> String;

    /// The scale function this family is known to belong to, if any.
    fn declared_scale(&self) -> Option<ScaleFn> {
        None
    }
}

impl<F: FunctionOracle + ?Sized> FunctionOracle for Box<F> {
    fn prime(&self) -> Prime {
        (**self).prime()
    }
    fn eval(&self, m: &BigUint, precision: usize) -> Result<PAdicApprox> {
        (**self).eval(m, precision)
    }
    fn name(&self) -> String {
        (**self).name()
    }
    fn declared_scale(&self) -> Option<ScaleFn> {
        (**self).declared_scale()
    }
}

/// A constant in `Z_p`: either an integer (exact at every precision) or a
/// residue known to finite precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PadicConstant {
    Integer(BigInt),
    Residue(PAdicApprox),
}

impl PadicConstant {
    pub fn integer(v: i64) -> Self {
        PadicConstant::Integer(BigInt::from(v))
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.trim()
            .parse()
            .map(PadicConstant::Integer)
            .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
    }

    /// The constant as a natural residue in `[0, p^precision)`.
    pub fn residue(&self, prime: Prime, precision: usize) -> Result<BigUint> {
        match self {
            PadicConstant::Integer(v) => Ok(residue_of(v, prime, precision)),
            PadicConstant::Residue(x) => {
                if x.prime() != prime {
                    return Err(Error::PrimeMismatch {
                        left: prime.get(),
                        right: x.prime().get(),
                    });
                }
                Ok(x.truncate(precision)?.to_natural())
            }
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            PadicConstant::Integer(v) => v.is_zero(),
            PadicConstant::Residue(x) => x.is_zero(),
        }
    }
}

impl From<PAdicApprox> for PadicConstant {
    fn from(x: PAdicApprox) -> Self {
        PadicConstant::Residue(x)
    }
}

impl From<i64> for PadicConstant {
    fn from(v: i64) -> Self {
        PadicConstant::integer(v)
    }
}

impl fmt::Display for PadicConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicConstant::Integer(v) => v.fmt(f),
            PadicConstant::Residue(x) => x.fmt(f),
        }
    }
}

fn finish(prime: Prime, value: BigUint, precision: usize) -> Result<PAdicApprox> {
    PAdicApprox::from_natural(&(value % prime.pow(precision)), prime, precision)
}

/// `sum_j g(m_{2j}) p^j` over the even-position digits of `m`, keeping only
/// the terms that matter modulo `p^precision`.
fn even_digit_sum(
    m: &BigUint,
    prime: Prime,
    precision: usize,
    g: impl Fn(u64) -> BigUint,
) -> BigUint {
    let digits = natural_digits(m, prime);
    let p = prime.to_biguint();
    let mut weight = BigUint::one();
    let mut acc = BigUint::zero();
    for d in digits.iter().step_by(2).take(precision) {
        if *d != 0 {
            acc += g(*d as u64) * &weight;
        }
        weight *= &p;
    }
    acc
}

/// `f(x) = a + sum_j x_{2j}^e p^j`; `e = 1` is the digit-linear family and
/// `p = 5, e = 3` the digit-cube family.
#[derive(Clone, Debug)]
pub struct DigitPower {
    prime: Prime,
    exponent: u32,
    a: PadicConstant,
}

impl DigitPower {
    /// Requires `x -> x^e` to be a bijection of `Z/pZ`.
    pub fn new(prime: Prime, exponent: u32, a: PadicConstant) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::Precondition(
                "digit power exponent must be at least 1".into(),
            ));
        }
        let p = prime.get() as u64;
        let mut seen = vec![false; p as usize];
        for x in 0..p {
            let y = (0..exponent).fold(1u64, |acc, _| acc * x % p) as usize;
            if seen[y] {
                return Err(Error::Precondition(format!(
                    "x -> x^{exponent} is not a bijection mod {p}"
                )));
            }
            seen[y] = true;
        }
        check_constant_prime(&a, prime)?;
        Ok(DigitPower { prime, exponent, a })
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }
}

fn check_constant_prime(a: &PadicConstant, prime: Prime) -> Result<()> {
    if let PadicConstant::Residue(x) = a {
        if x.prime() != prime {
            return Err(Error::PrimeMismatch {
                left: prime.get(),
                right: x.prime().get(),
            });
        }
    }
    Ok(())
}

/// `f(x) = a + sum_j x_{2j} p^j`, a member of `F(Phi)` for `Phi(n) = 2n + 1`.
pub fn digit_linear(prime: Prime, a: impl Into<PadicConstant>) -> Result<DigitPower> {
    DigitPower::new(prime, 1, a.into())
}

/// `f(x) = a + sum_j x_{2j}^3 5^j` over `Z_5`.
pub fn digit_cube(a: impl Into<PadicConstant>) -> Result<DigitPower> {
    let a = a.into();
    if let PadicConstant::Residue(x) = &a {
        if x.prime().get() != 5 {
            return Err(Error::WrongPrime {
                family: "digit_cube",
                expected: 5,
                got: x.prime().get(),
            });
        }
    }
    DigitPower::new(Prime::new(5)?, 3, a)
}

impl FunctionOracle for DigitPower {
    fn prime(&self) -> Prime {
        self.prime
    }

    fn eval(&self, m: &BigUint, precision: usize) -> Result<PAdicApprox> {
        let e = self.exponent;
        let sum = even_digit_sum(m, self.prime, precision, |d| BigUint::from(d).pow(e));
        finish(
            self.prime,
            sum + self.a.residue(self.prime, precision)?,
            precision,
        )
    }

    fn name(&self) -> String {
        match self.exponent {
            1 => format!("digit_linear(p={}, a={})", self.prime, self.a),
            3 if self.prime.get() == 5 => format!("digit_cube(a={})", self.a),
            e => format!("digit_power(p={}, e={e}, a={})", self.prime, self.a),
        }
    }

    fn declared_scale(&self) -> Option<ScaleFn> {
        ScaleFn::affine(2, 1).ok()
    }
}

/// `f(x) = -a + (sum_j x_{2j} p^j)^2`.
#[derive(Clone, Debug)]
pub struct DigitSquare {
    prime: Prime,
    a: PadicConstant,
}

/// Requires `a = 1 mod p` for odd `p` and `a = 1 mod 8` for `p = 2`.
pub fn digit_square(prime: Prime, a: impl Into<PadicConstant>) -> Result<DigitSquare> {
    let a = a.into();
    check_constant_prime(&a, prime)?;
    let (modulus_exp, label) = if prime.get() == 2 { (3, "8") } else { (1, "p") };
    if a.residue(prime, modulus_exp)? != BigUint::one() {
        return Err(Error::Precondition(format!(
            "digit_square needs a = 1 mod {label}; got a = {a}"
        )));
    }
    Ok(DigitSquare { prime, a })
}

impl FunctionOracle for DigitSquare {
    fn prime(&self) -> Prime {
        self.prime
    }

    fn eval(&self, m: &BigUint, precision: usize) -> Result<PAdicApprox> {
        let inner = even_digit_sum(m, self.prime, precision, BigUint::from);
        let modulus = self.prime.pow(precision);
        let square = (&inner * &inner) % &modulus;
        let a = self.a.residue(self.prime, precision)?;
        finish(self.prime, square + &modulus - a, precision)
    }

    fn name(&self) -> String {
        format!("digit_square(p={}, a={})", self.prime, self.a)
    }

    fn declared_scale(&self) -> Option<ScaleFn> {
        ScaleFn::affine(2, 1).ok()
    }
}

/// A polynomial with coefficients in `Z_p`, constant term first.
#[derive(Clone, Debug)]
pub struct Polynomial {
    prime: Prime,
    coeffs: Vec<PadicConstant>,
}

pub fn polynomial(prime: Prime, coeffs: Vec<PadicConstant>) -> Result<Polynomial> {
    if coeffs.iter().skip(1).all(PadicConstant::is_zero) {
        return Err(Error::Precondition(
            "polynomial must have a nonconstant term".into(),
        ));
    }
    for c in &coeffs {
        check_constant_prime(c, prime)?;
    }
    Ok(Polynomial { prime, coeffs })
}

impl Polynomial {
    pub fn coeffs(&self) -> &[PadicConstant] {
        &self.coeffs
    }

    /// The formal derivative.
    pub fn derivative(&self) -> Result<Vec<PadicConstant>> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| match c {
                PadicConstant::Integer(v) => Ok(PadicConstant::Integer(v * BigInt::from(i))),
                PadicConstant::Residue(x) => {
                    let k = PAdicApprox::from_u64(i as u64, self.prime, x.precision())?;
                    Ok(PadicConstant::Residue(x.try_mul(&k)?))
                }
            })
            .collect()
    }
}

/// Horner evaluation of `coeffs` at `m` modulo `p^precision`.
pub fn horner(
    coeffs: &[PadicConstant],
    prime: Prime,
    m: &BigUint,
    precision: usize,
) -> Result<BigUint> {
    let modulus = prime.pow(precision);
    let x = m % &modulus;
    let mut acc = BigUint::zero();
    for c in coeffs.iter().rev() {
        acc = (acc * &x + c.residue(prime, precision)?) % &modulus;
    }
    Ok(acc)
}

impl FunctionOracle for Polynomial {
    fn prime(&self) -> Prime {
        self.prime
    }

    fn eval(&self, m: &BigUint, precision: usize) -> Result<PAdicApprox> {
        let v = horner(&self.coeffs, self.prime, m, precision)?;
        PAdicApprox::from_natural(&v, self.prime, precision)
    }

    fn name(&self) -> String {
        let terms: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!(
            "polynomial(p={}, coeffs=[{}])",
            self.prime,
            terms.join(", ")
        )
    }

    fn declared_scale(&self) -> Option<ScaleFn> {
        Some(ScaleFn::identity())
    }
}

/// `f(x) = c`.
#[derive(Clone, Debug)]
pub struct Constant {
    prime: Prime,
    value: PadicConstant,
}

pub fn constant(prime: Prime, value: impl Into<PadicConstant>) -> Result<Constant> {
    let value = value.into();
    check_constant_prime(&value, prime)?;
    Ok(Constant { prime, value })
}

impl FunctionOracle for Constant {
    fn prime(&self) -> Prime {
        self.prime
    }

    fn eval(&self, _m: &BigUint, precision: usize) -> Result<PAdicApprox> {
        PAdicApprox::from_natural(
            &self.value.residue(self.prime, precision)?,
            self.prime,
            precision,
        )
    }

    fn name(&self) -> String {
        format!("constant(p={}, c={})", self.prime, self.value)
    }

    fn declared_scale(&self) -> Option<ScaleFn> {
        Some(ScaleFn::identity())
    }
}

/// JSON function description, e.g. `{"family":"digit_linear","p":3,"a":"1"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    DigitLinear {
        p: u64,
        a: String,
    },
    DigitCube {
        #[serde(default = "five")]
        p: u64,
        a: String,
    },
    DigitPower {
        p: u64,
        e: u32,
        a: String,
    },
    DigitSquare {
        p: u64,
        a: String,
    },
    Polynomial {
        p: u64,
        coeffs: Vec<String>,
    },
    Constant {
        p: u64,
        c: String,
    },
}

fn five() -> u64 {
    5
}

impl FunctionSpec {
    pub fn build(&self) -> Result<Box<dyn FunctionOracle>> {
        Ok(match self {
            FunctionSpec::DigitLinear { p, a } => {
                Box::new(digit_linear(Prime::new(*p)?, PadicConstant::parse(a)?)?)
            }
            FunctionSpec::DigitCube { p, a } => {
                if *p != 5 {
                    return Err(Error::WrongPrime {
                        family: "digit_cube",
                        expected: 5,
                        got: *p as u32,
                    });
                }
                Box::new(digit_cube(PadicConstant::parse(a)?)?)
            }
            FunctionSpec::DigitPower { p, e, a } => Box::new(DigitPower::new(
                Prime::new(*p)?,
                *e,
                PadicConstant::parse(a)?,
            )?),
            FunctionSpec::DigitSquare { p, a } => {
                Box::new(digit_square(Prime::new(*p)?, PadicConstant::parse(a)?)?)
            }
            FunctionSpec::Polynomial { p, coeffs } => {
                let coeffs = coeffs
                    .iter()
                    .map(|c| PadicConstant::parse(c))
                    .collect::<Result<Vec<_>>>()?;
                Box::new(polynomial(Prime::new(*p)?, coeffs)?)
            }
            FunctionSpec::Constant { p, c } => {
                Box::new(constant(Prime::new(*p)?, PadicConstant::parse(c)?)?)
            }
        })
    }
}

/// Window estimates of `psi(f; n)` for `n = 1..=entries.len()`.
///
/// These are certified only for inputs below `p^search_depth`; they are not
/// the modulus of continuity over all of `Z_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusTable {
    pub entries: Vec<usize>,
    pub search_depth: usize,
    pub window_certified_only: bool,
}

impl ModulusTable {
    pub fn new(entries: Vec<usize>, search_depth: usize) -> Result<Self> {
        if entries.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Precondition(
                "psi estimates must be non-decreasing in n".into(),
            ));
        }
        Ok(ModulusTable {
            entries,
            search_depth,
            window_certified_only: true,
        })
    }

    /// Entry for `psi(f; n)`, `n >= 1`.
    pub fn psi(&self, n: usize) -> Option<usize> {
        n.checked_sub(1).and_then(|i| self.entries.get(i).copied())
    }
}

pub(crate) fn window_size(prime: Prime, exponent: usize) -> Result<u64> {
    let size = prime.pow(exponent);
    match size.to_u64() {
        Some(s) if s <= WINDOW_CAP => Ok(s),
        _ => Err(Error::CapExceeded {
            size,
            cap: WINDOW_CAP,
        }),
    }
}

/// Least `l < search_depth` such that every pair `x, y < p^search_depth` with
/// `x = y mod p^l` has `f(x) = f(y) mod p^n`.
///
/// `l = search_depth` always holds vacuously inside the window, so it is
/// reported as [`Error::PsiNotFound`] rather than as an estimate.
pub fn estimate_psi(f: &dyn FunctionOracle, n: usize, search_depth: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::Precondition("psi(f; n) needs n >= 1".into()));
    }
    let prime = f.prime();
    let size = window_size(prime, search_depth)?;
    let values = (0..size)
        .map(|x| f.eval(&BigUint::from(x), n).map(|v| v.to_natural()))
        .collect::<Result<Vec<_>>>()?;
    for l in 0..search_depth {
        let class = window_size(prime, l)? as usize;
        // Pairs agreeing mod p^l all share the representative x mod p^l.
        let ok = values
            .iter()
            .enumerate()
            .all(|(x, v)| *v == values[x % class]);
        if ok {
            return Ok(l);
        }
    }
    Err(Error::PsiNotFound {
        n,
        depth: search_depth,
    })
}

pub fn modulus_table(
    f: &dyn FunctionOracle,
    n_max: usize,
    search_depth: usize,
) -> Result<ModulusTable> {
    let entries = (1..=n_max)
        .map(|n| estimate_psi(f, n, search_depth))
        .collect::<Result<Vec<_>>>()?;
    ModulusTable::new(entries, search_depth)
}

/// Scale function from modulus-of-continuity data:
/// `Phi(0) = max(0, psi(1) - 1)`, `Phi(n) = max(Phi(n-1) + 1, psi(n+1) - 1)`.
///
/// A table with entries for `n = 1..=N+1` fixes `Phi(0..=N)`; beyond that
/// the last increment is continued.
pub fn phi_from_psi(table: &ModulusTable) -> Result<ScaleFn> {
    if table.entries.is_empty() {
        return Err(Error::Precondition("modulus table is empty".into()));
    }
    let mut phi: Vec<usize> = Vec::with_capacity(table.entries.len());
    for (n, &psi_next) in table.entries.iter().enumerate() {
        let floor = psi_next.saturating_sub(1);
        let v = match phi.last() {
            None => floor,
            Some(&prev) => (prev + 1).max(floor),
        };
        debug_assert!(n == 0 || v > phi[n - 1]);
        phi.push(v);
    }
    let slope = match phi.as_slice() {
        [.., a, b] => b - a,
        _ => 1,
    };
    ScaleFn::new(phi, slope.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn ev(f: &dyn FunctionOracle, m: u64, k: usize) -> BigUint {
        f.eval(&BigUint::from(m), k).unwrap().to_natural()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn digit_linear_examples() {
        let f = digit_linear(p(3), 1).unwrap();
        assert_eq!(ev(&f, 4, 3), big(2));
        assert_eq!(ev(&f, 0, 3), big(1));
        assert_eq!(ev(&f, 9, 3), big(4));
        assert_eq!(f.declared_scale().unwrap(), ScaleFn::affine(2, 1).unwrap());
    }

    #[test]
    fn digit_linear_precision_of_a() {
        let a = PAdicApprox::from_u64(1, p(3), 2).unwrap();
        let f = digit_linear(p(3), a).unwrap();
        assert_eq!(ev(&f, 4, 2), big(2));
        assert!(matches!(
            f.eval(&big(4), 3),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn digit_cube_examples() {
        let f = digit_cube(0).unwrap();
        assert_eq!(ev(&f, 2, 3), big(8));
        assert_eq!(ev(&f, 0, 3), big(0));
        let g = digit_cube(1).unwrap();
        assert_eq!(ev(&g, 4, 2), big(15));
        let a7 = PAdicApprox::from_u64(1, p(7), 3).unwrap();
        assert!(matches!(digit_cube(a7), Err(Error::WrongPrime { .. })));
        assert!(FunctionSpec::DigitCube {
            p: 7,
            a: "1".into()
        }
        .build()
        .is_err());
    }

    #[test]
    fn digit_power_bijectivity() {
        assert!(DigitPower::new(p(7), 3, 0.into()).is_err());
        assert!(DigitPower::new(p(7), 5, 0.into()).is_ok());
        assert!(DigitPower::new(p(3), 2, 0.into()).is_err());
    }

    #[test]
    fn digit_square_examples() {
        let f = digit_square(p(7), 1).unwrap();
        assert_eq!(ev(&f, 1, 3), big(0));
        let g = digit_square(p(7), 8).unwrap();
        assert_eq!(ev(&g, 1, 2), big(42));
        let h = digit_square(p(2), 17).unwrap();
        assert_eq!(ev(&h, 1, 4), big(0));
        assert!(digit_square(p(7), 2).is_err());
        assert!(digit_square(p(2), 5).is_err());
        assert!(digit_square(p(2), 9).is_ok());
    }

    #[test]
    fn polynomial_examples() {
        let q = polynomial(p(7), vec![(-2).into(), 0.into(), 1.into()]).unwrap();
        assert_eq!(q.eval(&big(3), 2).unwrap().digits(), &[0, 1]);
        assert_eq!(ev(&q, 10, 2), big(0));
        let x = polynomial(p(7), vec![0.into(), 1.into()]).unwrap();
        assert_eq!(ev(&x, 5, 3), big(5));
        assert!(polynomial(p(7), vec![3.into(), 0.into()]).is_err());
        let d = q.derivative().unwrap();
        assert_eq!(horner(&d, p(7), &big(3), 2).unwrap(), big(6));
    }

    #[test]
    fn spec_json() {
        let spec: FunctionSpec =
            serde_json::from_str(r#"{"family":"polynomial","p":7,"coeffs":["-2","0","1"]}"#)
                .unwrap();
        let f = spec.build().unwrap();
        assert_eq!(ev(f.as_ref(), 3, 2), big(7));
        let spec: FunctionSpec =
            serde_json::from_str(r#"{"family":"digit_square","p":2,"a":"17"}"#).unwrap();
        assert!(spec.build().is_ok());
        let spec: FunctionSpec =
            serde_json::from_str(r#"{"family":"digit_cube","a":"2"}"#).unwrap();
        assert_eq!(
            spec,
            FunctionSpec::DigitCube {
                p: 5,
                a: "2".into()
            }
        );
        assert!(
            serde_json::from_str::<FunctionSpec>(r#"{"family":"digit_linear","p":4,"a":"1"}"#)
                .unwrap()
                .build()
                .is_err()
        );
        assert!(serde_json::from_str::<FunctionSpec>(r#"{"family":"nope","p":3}"#).is_err());
    }

    #[test]
    fn psi_estimates() {
        // f mod 3 only sees x_0, so agreement mod 3 suffices.
        let f = digit_linear(p(3), 1).unwrap();
        assert_eq!(estimate_psi(&f, 1, 4).unwrap(), 1);
        assert_eq!(estimate_psi(&f, 2, 4).unwrap(), 3);
        let id = polynomial(p(3), vec![0.into(), 1.into()]).unwrap();
        for n in 1..4 {
            assert_eq!(estimate_psi(&id, n, 5).unwrap(), n);
        }
        let sq = digit_square(p(7), 1).unwrap();
        assert_eq!(estimate_psi(&sq, 1, 4).unwrap(), 1);
        assert!(matches!(
            estimate_psi(&id, 4, 4),
            Err(Error::PsiNotFound { .. })
        ));
        let c = constant(p(5), 3).unwrap();
        assert_eq!(estimate_psi(&c, 2, 3).unwrap(), 0);
    }

    #[test]
    fn phi_from_psi_examples() {
        let lipschitz = ModulusTable::new((1..=6).collect(), 8).unwrap();
        let phi = phi_from_psi(&lipschitz).unwrap();
        assert!((0..5).all(|n| phi.at(n) == n));

        let digit = ModulusTable::new((1..=6).map(|n| 2 * n).collect(), 8).unwrap();
        let phi = phi_from_psi(&digit).unwrap();
        assert!((0..12).all(|n| phi.at(n) == 2 * n + 1));

        let flat = ModulusTable::new(vec![0; 5], 8).unwrap();
        let phi = phi_from_psi(&flat).unwrap();
        assert!((0..10).all(|n| phi.at(n) == n));

        assert!(ModulusTable::new(vec![2, 1], 4).is_err());
    }

    #[test]
    fn measured_table_yields_valid_scale() {
        let f = digit_linear(p(3), 1).unwrap();
        let table = modulus_table(&f, 2, 5).unwrap();
        assert_eq!(table.entries, vec![1, 3]);
        let phi = phi_from_psi(&table).unwrap();
        assert_eq!((phi.at(0), phi.at(1)), (0, 2));
    }

    #[test]
    fn digit_linear_perturbation_identity() {
        let q = p(3);
        let f = digit_linear(q, 1).unwrap();
        for n in 0..2usize {
            let step = q.pow(2 * n + 2);
            for m in (0..q.pow(2 * n + 2).to_u64().unwrap()).step_by(5) {
                for i in 1..3u64 {
                    let base = f.eval(&big(m), 8).unwrap();
                    let moved = f.eval(&(big(m) + &step * i), 8).unwrap();
                    let expect = PAdicApprox::from_natural(&(q.pow(n + 1) * i), q, 8).unwrap();
                    assert_eq!(moved.try_sub(&base).unwrap(), expect);
                }
            }
        }
    }

    fn builtins() -> Vec<Box<dyn FunctionOracle>> {
        vec![
            Box::new(digit_linear(p(3), 1).unwrap()),
            Box::new(digit_linear(p(2), -3).unwrap()),
            Box::new(digit_cube(2).unwrap()),
            Box::new(digit_square(p(7), 8).unwrap()),
            Box::new(digit_square(p(2), 17).unwrap()),
            Box::new(polynomial(p(7), vec![(-2).into(), 0.into(), 1.into()]).unwrap()),
            Box::new(constant(p(3), -5).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn oracle_coherence(idx in 0usize..7, m in 0u64..u64::MAX / 4, k in 1usize..12, extra in 0usize..8) {
            let fs = builtins();
            let f = &fs[idx];
            let hi = f.eval(&big(m), k + extra).unwrap();
            let lo = f.eval(&big(m), k).unwrap();
            prop_assert_eq!(hi.truncate(k).unwrap(), lo.clone());
            prop_assert_eq!(f.eval(&big(m), k).unwrap(), lo);
        }
    }
}
