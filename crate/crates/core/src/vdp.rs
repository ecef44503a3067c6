//! Generalized van der Put coefficients.
//!
//! For a scale function `Phi`, the coefficients are
//!
//! ```text
//! B(m) = f(m)                 if m < p^(1+Phi(0))
//!        f(m) - f(m - M(m))   otherwise
//! ```
//!
//! and `f(x) = sum_m B(m) chi(Phi, m; x)`. The normalized coefficient
//! `b(m) = p^(-tau(m)) B(m)` is integral for every `m` exactly when `f` lies
//! in `F(Phi)`.

use dashmap::DashMap;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{window_size, FunctionOracle};
use crate::padic::{PAdicApprox, Prime, Valuation};
use crate::scale::{big_m, jump_set, tau, truncate_x_j, ScaleFn};

/// One coefficient record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VdpCoeff {
    #[serde(with = "crate::serde_decimal")]
    pub m: BigUint,
    pub tau: usize,
    #[serde(with = "crate::serde_decimal::option")]
    pub top_block: Option<BigUint>,
    pub big_b: PAdicApprox,
    pub valuation: Valuation,
    /// `b(m)`, present when `v_p(B(m)) >= tau(m)` is certified.
    pub b: Option<PAdicApprox>,
}

/// Working precision for window tools at `depth`: `1 + Phi(depth + 1)`.
pub fn default_window_precision(phi: &ScaleFn, depth: usize) -> usize {
    phi.prefix_len(depth + 1)
}

/// Coefficient computations for one `(f, Phi)` pair, with an on-demand
/// cache of `B(m)` keyed by `m`.
pub struct CoefficientEngine<'f> {
    f: &'f dyn FunctionOracle,
    phi: ScaleFn,
    cache: DashMap<BigUint, PAdicApprox>,
}

impl<'f> CoefficientEngine<'f> {
    pub fn new(f: &'f dyn FunctionOracle, phi: ScaleFn) -> Self {
        CoefficientEngine {
            f,
            phi,
            cache: DashMap::new(),
        }
    }

    pub fn function(&self) -> &'f dyn FunctionOracle {
        self.f
    }

    pub fn scale(&self) -> &ScaleFn {
        &self.phi
    }

    pub fn prime(&self) -> Prime {
        self.f.prime()
    }

    fn compute_big_b(&self, m: &BigUint, precision: usize) -> Result<PAdicApprox> {
        let value = self.f.eval(m, precision)?;
        if tau(&self.phi, m, self.prime()) == 0 {
            return Ok(value);
        }
        let parent = m - big_m(&self.phi, m, self.prime())?;
        value.try_sub(&self.f.eval(&parent, precision)?)
    }

    /// `B(Phi, f; m) mod p^precision`.
    pub fn big_b(&self, m: &BigUint, precision: usize) -> Result<PAdicApprox> {
        if let Some(hit) = self.cache.get(m) {
            if hit.precision() >= precision {
                return hit.truncate(precision);
            }
        }
        let value = self.compute_big_b(m, precision)?;
        self.cache.insert(m.clone(), value.clone());
        Ok(value)
    }

    /// `b(Phi, f; m) mod p^precision`, computed from `B` at precision
    /// `precision + tau(m)`.
    pub fn b(&self, m: &BigUint, precision: usize) -> Result<PAdicApprox> {
        let t = tau(&self.phi, m, self.prime());
        let big = self.big_b(m, precision + t)?;
        normalize(m, t, &big)
    }

    pub fn record(&self, m: &BigUint, precision: usize) -> Result<VdpCoeff> {
        let t = tau(&self.phi, m, self.prime());
        let big = self.big_b(m, precision + t)?;
        let b = normalize(m, t, &big).ok();
        let top_block = if t > 0 {
            Some(big_m(&self.phi, m, self.prime())?)
        } else {
            None
        };
        let big_b = big.truncate(precision)?;
        Ok(VdpCoeff {
            m: m.clone(),
            tau: t,
            top_block,
            valuation: big.valuation(),
            big_b,
            b,
        })
    }

    /// Series value at `x` summed along the path `x(j)`, `j in J(x)`,
    /// `j <= j_max`; equals `f(x(j_max))` modulo `p^K` with `K` the
    /// precision of `x`. When `f` is in `F(Phi)` it agrees with `f(x)`
    /// modulo `p^(j_max + 1)`.
    pub fn eval_series(&self, x: &PAdicApprox, j_max: usize) -> Result<PAdicApprox> {
        let precision = x.precision();
        let mut acc = PAdicApprox::zero(self.prime(), precision)?;
        for j in jump_set(x, j_max, &self.phi)? {
            let m = truncate_x_j(x, j, &self.phi)?;
            acc = acc.try_add(&self.big_b(&m, precision)?)?;
        }
        Ok(acc)
    }

    /// Checks `v_p(B(m)) >= tau(m)` for every `m < p^(1+Phi(depth))`.
    pub fn verify_membership(&self, depth: usize, precision: usize) -> Result<MembershipReport> {
        let window_exponent = self.phi.prefix_len(depth);
        if precision < depth {
            return Err(Error::InsufficientPrecision {
                needed: depth,
                available: precision,
            });
        }
        let size = window_size(self.prime(), window_exponent)?;
        let failure = (0..size).into_par_iter().find_map_first(|m| {
            let m = BigUint::from(m);
            let t = tau(&self.phi, &m, self.prime());
            match self.compute_big_b(&m, precision) {
                Err(e) => Some(Err(e)),
                Ok(big) if big.valuation().certifies_at_least(t) => None,
                Ok(big) => Some(Ok(MembershipFailure {
                    m,
                    tau: t,
                    valuation: big.valuation(),
                })),
            }
        });
        let failure = failure.transpose()?;
        Ok(MembershipReport {
            window_exponent,
            precision,
            points_checked: size,
            failure,
        })
    }
}

fn normalize(m: &BigUint, t: usize, big: &PAdicApprox) -> Result<PAdicApprox> {
    match big.valuation() {
        Valuation::Finite(v) if v < t => Err(Error::MembershipViolation {
            m: m.clone(),
            tau: t,
            valuation: v,
        }),
        _ => big.shift_down(t),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipFailure {
    #[serde(with = "crate::serde_decimal")]
    pub m: BigUint,
    pub tau: usize,
    pub valuation: Valuation,
}

/// Result of a window membership scan; a pass certifies the continuity
/// condition only for inputs below `p^window_exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub window_exponent: usize,
    pub precision: usize,
    pub points_checked: u64,
    pub failure: Option<MembershipFailure>,
}

impl MembershipReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn coeff_big_b(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    m: &BigUint,
    precision: usize,
) -> Result<PAdicApprox> {
    CoefficientEngine::new(f, phi.clone()).compute_big_b(m, precision)
}

pub fn coeff_b(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    m: &BigUint,
    precision: usize,
) -> Result<PAdicApprox> {
    CoefficientEngine::new(f, phi.clone()).b(m, precision)
}

pub fn eval_series(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    x: &PAdicApprox,
    j_max: usize,
) -> Result<PAdicApprox> {
    CoefficientEngine::new(f, phi.clone()).eval_series(x, j_max)
}

pub fn verify_membership(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    depth: usize,
    precision: usize,
) -> Result<MembershipReport> {
    CoefficientEngine::new(f, phi.clone()).verify_membership(depth, precision)
}

/// Coefficient rows for `m` in `[from, to)`.
pub fn coefficient_table(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    from: u64,
    to: u64,
    precision: usize,
) -> Result<Vec<VdpCoeff>> {
    let engine = CoefficientEngine::new(f, phi.clone());
    (from..to)
        .map(|m| engine.record(&BigUint::from(m), precision))
        .collect()
}

/// The series of an engine, viewed as a new function: `m` is evaluated as
/// the series at `x = m` summed up to level `tau(m)`.
pub struct SeriesOracle<'e, 'f> {
    engine: &'e CoefficientEngine<'f>,
}

impl<'e, 'f> SeriesOracle<'e, 'f> {
    pub fn new(engine: &'e CoefficientEngine<'f>) -> Self {
        SeriesOracle { engine }
    }
}

impl FunctionOracle for SeriesOracle<'_, '_> {
    fn prime(&self) -> Prime {
        self.engine.prime()
    }

    fn eval(&self, m: &BigUint, precision: usize) -> Result<PAdicApprox> {
        let phi = self.engine.scale();
        let level = tau(phi, m, self.prime());
        let len = precision.max(phi.prefix_len(level));
        let x = PAdicApprox::from_natural(m, self.prime(), len)?;
        self.engine.eval_series(&x, level)?.truncate(precision)
    }

    fn name(&self) -> String {
        format!("series[{}]", self.engine.function().name())
    }
}

/// Number of points in `[0, p^(1+Phi(depth)))`, if it fits a `u64`.
pub fn window_points(p: Prime, phi: &ScaleFn, depth: usize) -> Option<u64> {
    p.pow(phi.prefix_len(depth)).to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{constant, digit_linear, polynomial};
    use crate::padic::natural_digits;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn two_n_plus_one() -> ScaleFn {
        ScaleFn::affine(2, 1).unwrap()
    }

    #[test]
    fn big_b_examples() {
        let f = digit_linear(p(3), 1).unwrap();
        let phi = two_n_plus_one();
        assert_eq!(
            coeff_big_b(&f, &phi, &big(4), 4).unwrap().to_natural(),
            big(2)
        );
        assert_eq!(
            coeff_big_b(&f, &phi, &big(9), 4).unwrap().to_natural(),
            big(3)
        );
        assert_eq!(
            coeff_big_b(&f, &phi, &big(0), 4).unwrap(),
            f.eval(&big(0), 4).unwrap()
        );
    }

    #[test]
    fn small_b_examples() {
        let f = digit_linear(p(3), 1).unwrap();
        let phi = two_n_plus_one();
        assert_eq!(coeff_b(&f, &phi, &big(9), 3).unwrap().to_natural(), big(1));
        assert_eq!(coeff_b(&f, &phi, &big(18), 3).unwrap().to_natural(), big(2));
        assert_eq!(coeff_b(&f, &phi, &big(18), 3).unwrap().precision(), 3);

        let id = polynomial(p(5), vec![0.into(), 1.into()]).unwrap();
        for k in 1..5 {
            let m = p(5).pow(k);
            assert_eq!(
                coeff_big_b(&id, &ScaleFn::identity(), &m, 6)
                    .unwrap()
                    .to_natural(),
                m
            );
            assert_eq!(
                coeff_b(&id, &ScaleFn::identity(), &m, 3)
                    .unwrap()
                    .to_natural(),
                big(1)
            );
        }
    }

    #[test]
    fn small_b_reports_violation() {
        let f = digit_linear(p(3), 1).unwrap();
        // Not 1-Lipschitz: B(Id; 3) = f(3) - f(0) = 0 but B(Id; 9) = f(9) - f(0) = 3 with tau = 2.
        let err = coeff_b(&f, &ScaleFn::identity(), &big(9), 2).unwrap_err();
        assert_eq!(
            err,
            Error::MembershipViolation {
                m: big(9),
                tau: 2,
                valuation: 1
            }
        );
    }

    #[test]
    fn records() {
        let f = digit_linear(p(3), 1).unwrap();
        let rows = coefficient_table(&f, &two_n_plus_one(), 8, 11, 3).unwrap();
        assert_eq!(rows[0].tau, 0);
        assert_eq!(rows[0].top_block, None);
        assert_eq!(rows[1].top_block, Some(big(9)));
        assert_eq!(rows[1].b.as_ref().unwrap().to_natural(), big(1));
        let json = serde_json::to_string(&rows[1]).unwrap();
        let back: VdpCoeff = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rows[1]);
    }

    #[test]
    fn series_examples() {
        let f = digit_linear(p(3), 1).unwrap();
        let phi = two_n_plus_one();
        let x = PAdicApprox::new(p(3), vec![2, 0, 2, 0]).unwrap();
        assert_eq!(
            eval_series(&f, &phi, &x, 1).unwrap().digits(),
            &[0, 0, 1, 0]
        );
        let z = PAdicApprox::zero(p(3), 4).unwrap();
        assert_eq!(
            eval_series(&f, &phi, &z, 1).unwrap(),
            f.eval(&big(0), 4).unwrap()
        );
        assert!(eval_series(&f, &phi, &x, 2).is_err());
        for m in 0..729u64 {
            let x = PAdicApprox::from_u64(m, p(3), 6).unwrap();
            assert_eq!(
                eval_series(&f, &phi, &x, 2).unwrap(),
                f.eval(&big(m), 6).unwrap()
            );
        }
    }

    #[test]
    fn membership_examples() {
        let f = digit_linear(p(3), 1).unwrap();
        let phi = two_n_plus_one();
        let pass = verify_membership(&f, &phi, 2, default_window_precision(&phi, 2)).unwrap();
        assert!(pass.passed());
        assert_eq!(pass.points_checked, 729);

        let id = ScaleFn::identity();
        let fail = verify_membership(&f, &id, 2, default_window_precision(&id, 2)).unwrap();
        let failure = fail.failure.unwrap();
        assert!(failure.valuation.lower_bound() < failure.tau);
        // Digit x_1 is invisible to f, so all m < 9 pass; B(Id; 9) = 3 has tau 2.
        assert_eq!(failure.m, big(9));

        let c = constant(p(5), 7).unwrap();
        assert!(verify_membership(&c, &phi, 2, 6).unwrap().passed());
    }

    /// The classic coefficient `f(m) - f(m - m_k p^k)` written directly.
    fn classic_big_b(f: &dyn FunctionOracle, m: u64, precision: usize) -> PAdicApprox {
        let q = f.prime();
        let value = f.eval(&big(m), precision).unwrap();
        if m < q.get() as u64 {
            return value;
        }
        let digits = natural_digits(&big(m), q);
        let k = digits.len() - 1;
        let top = big(digits[k] as u64) * q.pow(k);
        value
            .try_sub(&f.eval(&(big(m) - top), precision).unwrap())
            .unwrap()
    }

    #[test]
    fn identity_scale_matches_classic_formula() {
        let fs: Vec<Box<dyn FunctionOracle>> = vec![
            Box::new(digit_linear(p(3), 1).unwrap()),
            Box::new(polynomial(p(5), vec![3.into(), (-1).into(), 0.into(), 2.into()]).unwrap()),
        ];
        for f in &fs {
            let engine = CoefficientEngine::new(f.as_ref(), ScaleFn::identity());
            for m in 0..2000u64 {
                assert_eq!(
                    engine.big_b(&big(m), 5).unwrap(),
                    classic_big_b(f.as_ref(), m, 5)
                );
            }
        }
    }

    #[test]
    fn polynomial_valuation_bound() {
        for (q, coeffs) in [
            (2u64, vec![1i64, -3, 0, 5]),
            (3, vec![-2, 0, 1]),
            (7, vec![-2, 0, 1]),
        ] {
            let f = polynomial(p(q), coeffs.into_iter().map(Into::into).collect()).unwrap();
            let engine = CoefficientEngine::new(&f, ScaleFn::identity());
            for m in 1..3000u64 {
                let k = natural_digits(&big(m), p(q)).len() - 1;
                let b = engine.big_b(&big(m), k + 3).unwrap();
                assert!(b.valuation().certifies_at_least(k), "m = {m}, p = {q}");
            }
        }
    }

    #[test]
    fn cache_respects_precision() {
        let f = digit_linear(p(3), 1).unwrap();
        let engine = CoefficientEngine::new(&f, two_n_plus_one());
        let lo = engine.big_b(&big(18), 2).unwrap();
        let hi = engine.big_b(&big(18), 5).unwrap();
        assert_eq!(hi.truncate(2).unwrap(), lo);
        assert_eq!(engine.big_b(&big(18), 3).unwrap(), hi.truncate(3).unwrap());
    }
}
