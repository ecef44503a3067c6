//! Approximability: the first-order behaviour of `f` under block perturbations,
//!
//! `f(u + p^(1+Phi(n-1)) u') = f(u) + p^(h+n) u' delta_n(u)  (mod p^(h+n+1))`,
//!
//! window checks of it on residue classes, the lift it drives with
//! `S(n) = {1, ..., p-1}`, and the bridge from derivatives modulo `p^s`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::FunctionOracle;
use crate::hensel::{admissible_points, lift, LiftProblem, LiftTrace, SStrategy};
use crate::padic::{PAdicApprox, Prime, Valuation};
use crate::scale::ScaleFn;

/// Perturbations `u'` used to cross-check a single `delta_n`: all single
/// digits and two two-digit values.
fn sample_perturbations(p: Prime) -> Vec<BigUint> {
    let pv = p.get() as u64;
    let mut out: Vec<BigUint> = (1..pv).map(BigUint::from).collect();
    out.push(BigUint::from(pv + 1));
    out.push(BigUint::from(pv * pv - 1));
    out
}

/// `delta_n f(u) mod p`, read off from `u' = 1` and cross-checked on
/// `sample_perturbations`.
pub fn estimate_delta(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    u: &BigUint,
    n: usize,
    h: usize,
) -> Result<u32> {
    if n == 0 {
        return Err(Error::Precondition("delta_n needs n >= 1".into()));
    }
    let p = f.prime();
    let weight = p.pow(phi.prefix_len(n - 1));
    let precision = h + n + 1;
    let base = f.eval(u, precision)?;
    let diff = |u_prime: &BigUint| -> Result<PAdicApprox> {
        f.eval(&(u + &weight * u_prime), precision)?.try_sub(&base)
    };
    let first = diff(&BigUint::from(1u32))?;
    if !first.valuation().certifies_at_least(h + n) {
        return Err(Error::ValuationDeficit {
            n,
            valuation: first.valuation().lower_bound(),
            needed: h + n,
        });
    }
    let delta = first.digit(h + n);
    for u_prime in sample_perturbations(p) {
        let class = (&u_prime * delta) % p.to_biguint();
        let expected = PAdicApprox::from_natural(&(class * p.pow(h + n)), p, precision)?;
        if diff(&u_prime)? != expected {
            return Err(Error::ApproxInconsistent { n, u_prime });
        }
    }
    Ok(delta)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxWindow {
    /// Sampled points are `u' < p^window_exponent` in the class of `u`.
    pub window_exponent: usize,
    pub points: u64,
    pub n_lo: usize,
    pub n_hi: usize,
}

/// `delta_n f(u) mod p` over a tested range of `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxCertificate {
    pub p: u32,
    #[serde(with = "crate::serde_decimal")]
    pub u: BigUint,
    pub h: usize,
    pub l: usize,
    pub delta_by_n: BTreeMap<usize, u32>,
    /// Every tested `delta_n` is nonzero mod p.
    pub unit_flag: bool,
    pub window: ApproxWindow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ApproxViolationKind {
    /// `f(u') != 0 mod p^(h+n0+1)` at the representative.
    StartResidue,
    ValuationDeficit {
        valuation: usize,
    },
    Inconsistent {
        #[serde(with = "crate::serde_decimal")]
        perturbation: BigUint,
    },
    NonUnit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxViolation {
    #[serde(with = "crate::serde_decimal")]
    pub u_prime: BigUint,
    pub n: usize,
    pub kind: ApproxViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub certificate: ApproxCertificate,
    /// First violation in the order of `(u', n)`.
    pub failure: Option<ApproxViolation>,
}

impl ApproxReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn classify(e: Error) -> Result<ApproxViolationKind> {
    match e {
        Error::ValuationDeficit { valuation, .. } => {
            Ok(ApproxViolationKind::ValuationDeficit { valuation })
        }
        Error::ApproxInconsistent { u_prime, .. } => Ok(ApproxViolationKind::Inconsistent {
            perturbation: u_prime,
        }),
        other => Err(other),
    }
}

/// Deltas of one point over `n_lo..=n_hi`, stopping at the first violation.
fn scan_point(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    v: &BigUint,
    h: usize,
    n_lo: usize,
    n_hi: usize,
    require_unit: bool,
) -> Result<(BTreeMap<usize, u32>, Option<ApproxViolation>)> {
    let mut deltas = BTreeMap::new();
    for n in n_lo..=n_hi {
        let kind = match estimate_delta(f, phi, v, n, h) {
            Ok(0) if require_unit => ApproxViolationKind::NonUnit,
            Ok(d) => {
                deltas.insert(n, d);
                continue;
            }
            Err(e) => classify(e)?,
        };
        return Ok((
            deltas,
            Some(ApproxViolation {
                u_prime: v.clone(),
                n,
                kind,
            }),
        ));
    }
    Ok((deltas, None))
}

/// Window check of uniform approximability on `Lambda = {u' = u mod p^(1+Phi(n0))}`:
/// consistency and the unit condition for every sampled `u' < p^(1+Phi(depth))`
/// and `n` in `[max(n0, l, 1), n_hi]`, plus `f(u) = 0 mod p^(h+n0+1)`.
#[allow(clippy::too_many_arguments)]
pub fn verify_uniform_approx(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    u: &BigUint,
    n0: usize,
    h: usize,
    l: usize,
    n_hi: usize,
    depth: usize,
) -> Result<ApproxReport> {
    let p = f.prime();
    let n_lo = n0.max(l).max(1);
    if n_hi < n_lo {
        return Err(Error::Precondition(format!(
            "empty n range [{n_lo}, {n_hi}]"
        )));
    }
    let depth = depth.max(n0);
    let points = admissible_points(p, phi, u, n0, depth)?;
    let (delta_by_n, first) = scan_point(f, phi, u, h, n_lo, n_hi, true)?;
    let start_ok = f.eval(u, h + n0 + 1)?.is_zero();
    let mut failure = if start_ok {
        None
    } else {
        Some(ApproxViolation {
            u_prime: u.clone(),
            n: n0,
            kind: ApproxViolationKind::StartResidue,
        })
    };
    if failure.is_none() {
        failure = points
            .par_iter()
            .map(|v| scan_point(f, phi, v, h, n_lo, n_hi, true).map(|(_, bad)| bad))
            .find_map_first(|r| r.transpose())
            .transpose()?;
    }
    let failure = failure.or(first);
    let unit_flag = failure.is_none();
    let certificate = ApproxCertificate {
        p: p.get(),
        u: u.clone(),
        h,
        l,
        delta_by_n,
        unit_flag,
        window: ApproxWindow {
            window_exponent: phi.prefix_len(depth),
            points: points.len() as u64,
            n_lo,
            n_hi,
        },
    };
    Ok(ApproxReport {
        certificate,
        failure,
    })
}

/// Least `l` in `1..=n_hi` making the approximation consistent for every
/// `n` in `[l, n_hi]` on the window, optionally also with unit deltas.
#[allow(clippy::too_many_arguments)]
pub fn scan_l(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    u: &BigUint,
    n0: usize,
    h: usize,
    n_hi: usize,
    depth: usize,
    require_unit: bool,
) -> Result<Option<usize>> {
    let points = admissible_points(f.prime(), phi, u, n0, depth.max(n0))?;
    let bad_levels = points
        .par_iter()
        .map(|v| -> Result<Option<usize>> {
            let mut worst = None;
            for n in 1..=n_hi {
                match estimate_delta(f, phi, v, n, h) {
                    Ok(0) if require_unit => worst = Some(n),
                    Ok(_) => {}
                    Err(e) => {
                        classify(e)?;
                        worst = Some(n);
                    }
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?;
    match bad_levels.into_iter().flatten().max() {
        None => Ok(Some(1)),
        Some(n) if n < n_hi => Ok(Some(n + 1)),
        Some(_) => Ok(None),
    }
}

/// Lift with `S(n) = {1, ..., p-1}` at every level.
pub fn corollary_lift(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    u: &BigUint,
    n0: usize,
    h: usize,
    l: usize,
    n_max: usize,
) -> Result<LiftTrace> {
    if l > n0 + 1 {
        return Err(Error::Precondition(format!(
            "need l <= n0 + 1, got l = {l}, n0 = {n0}"
        )));
    }
    let problem = LiftProblem::new(
        f,
        phi.clone(),
        h,
        n0,
        u.clone(),
        n_max,
        SStrategy::FullRange,
    )?;
    let trace = lift(&problem);
    if let Some(x) = trace.root_approx() {
        for n in n0..n_max {
            let block = crate::scale::rho(&x, n + 1, phi)?;
            if block >= f.prime().to_biguint() {
                return Err(Error::Precondition(format!(
                    "block {} of the root is {block}, not a digit",
                    n + 1
                )));
            }
        }
    }
    Ok(trace)
}

/// With `Phi = Id`, turns `f(u + p^n u') = f(u) + p^n u' D  (mod p^(n+s))`
/// into `h = s - 1` and `delta_n = D / p^h mod p`. `D mod p^s` is the
/// difference quotient, and `l` is the least `n` from which it is stable on
/// `1..=n_window`.
pub fn from_derivative_mod_ps(
    f: &dyn FunctionOracle,
    s: usize,
    u: &BigUint,
    n_window: usize,
) -> Result<ApproxCertificate> {
    if s == 0 || n_window < 2 {
        return Err(Error::Precondition(
            "need s >= 1 and a window of at least two levels".into(),
        ));
    }
    let p = f.prime();
    let h = s - 1;
    let quotient = |n: usize, u_prime: &BigUint| -> Result<Option<PAdicApprox>> {
        let precision = n + s;
        let d = f
            .eval(&(u + p.pow(n) * u_prime), precision)?
            .try_sub(&f.eval(u, precision)?)?;
        if !d.valuation().certifies_at_least(n) {
            return Ok(None);
        }
        Ok(Some(d.shift_down(n)?))
    };
    let one = BigUint::from(1u32);
    let qs = (1..=n_window)
        .map(|n| quotient(n, &one))
        .collect::<Result<Vec<_>>>()?;
    let last = qs[n_window - 1].clone();
    let Some(derivative) = last else {
        return Err(Error::Precondition(format!(
            "f is not differentiable modulo p^{s} at {u}"
        )));
    };
    let mut l = n_window;
    while l > 1 && qs[l - 2].as_ref() == Some(&derivative) {
        l -= 1;
    }
    if l == n_window {
        return Err(Error::Precondition(format!(
            "derivative modulo p^{s} at {u} is not stable on the window"
        )));
    }
    for n in l..=n_window {
        for k in 1..p.get() {
            let u_prime = BigUint::from(k);
            let expected = PAdicApprox::from_natural(&(derivative.to_natural() * &u_prime), p, s)?;
            if quotient(n, &u_prime)? != Some(expected) {
                return Err(Error::ApproxInconsistent { n, u_prime });
            }
        }
    }
    match derivative.valuation() {
        Valuation::Finite(v) if v == h => {}
        v => {
            return Err(Error::NonUnitDerivative {
                s,
                valuation: v.to_string(),
                expected: h,
            })
        }
    }
    let delta = derivative.digit(h);
    let delta_by_n = (l..=n_window).map(|n| (n, delta)).collect();
    Ok(ApproxCertificate {
        p: p.get(),
        u: u.clone(),
        h,
        l,
        delta_by_n,
        unit_flag: !delta.is_zero(),
        window: ApproxWindow {
            window_exponent: n_window,
            points: 1,
            n_lo: l,
            n_hi: n_window,
        },
    })
}
