//! Hensel lifting for functions in `F(Phi)`.
//!
//! Starting from `u < p^(1+Phi(n0))` with `f(u) = 0 mod p^(1+h+n0)`, each
//! level `l` adds one block correction `i * p^(1+Phi(l))` with `i` drawn from
//! `{0} ∪ S(l)`, raising the certified vanishing order of `f` by one. The
//! sets `S(l)` must make the normalized coefficients
//! `b(u_l + i p^(1+Phi(l))) mod p^(h+1)` hit every class `j p^h`,
//! `j = 1..p-1`, exactly once.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{window_size, FunctionOracle, WINDOW_CAP};
use crate::padic::{PAdicApprox, Prime};
use crate::scale::{rho, ScaleFn};
use crate::vdp::CoefficientEngine;

/// A candidate correction set `S(n) ⊂ (0, p^(Phi(n+1)-Phi(n)))` with `p - 1` members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SSet {
    pub level: usize,
    #[serde(with = "crate::serde_decimal::vec")]
    members: Vec<BigUint>,
}

impl SSet {
    pub fn new(
        level: usize,
        members: impl IntoIterator<Item = BigUint>,
        p: Prime,
        phi: &ScaleFn,
    ) -> Result<Self> {
        let set: BTreeSet<BigUint> = members.into_iter().collect();
        let bound = p.pow(phi.block_width(level + 1));
        if set.len() != p.get() as usize - 1 {
            return Err(Error::Precondition(format!(
                "S({level}) needs {} distinct members, got {}",
                p.get() - 1,
                set.len()
            )));
        }
        if let Some(bad) = set.iter().find(|i| i.is_zero() || **i >= bound) {
            return Err(Error::Precondition(format!(
                "S({level}) member {bad} is outside (0, {bound})"
            )));
        }
        Ok(SSet {
            level,
            members: set.into_iter().collect(),
        })
    }

    pub fn from_u64s(level: usize, members: &[u64], p: Prime, phi: &ScaleFn) -> Result<Self> {
        SSet::new(level, members.iter().map(|&i| BigUint::from(i)), p, phi)
    }

    /// `{1, ..., p-1}`.
    pub fn full_range(level: usize, p: Prime, phi: &ScaleFn) -> Result<Self> {
        SSet::new(level, (1..p.get()).map(BigUint::from), p, phi)
    }

    pub fn members(&self) -> &[BigUint] {
        &self.members
    }

    pub fn contains(&self, i: &BigUint) -> bool {
        self.members.binary_search(i).is_ok()
    }
}

/// Where the S-condition is checked during discovery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiscoveryMode {
    /// Only at the given point `m` (the current iterate during a lift).
    Trajectory(BigUint),
    /// At every `m < p^(1+Phi(n))` with `m = u mod p^(1+Phi(n0))`.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SStrategy {
    /// `S(n0), S(n0+1), ...`; the last set is reused for deeper levels.
    Explicit(Vec<Vec<BigUint>>),
    /// Greedy discovery at each level, at the current iterate.
    DiscoverTrajectory,
    /// Greedy discovery valid for every admissible `m` at each level.
    DiscoverExhaustive,
    /// `S(n) = {1, ..., p-1}`.
    FullRange,
}

/// `b(m + i p^(1+Phi(n))) mod p^(h+1)` as a class multiplier `j` when it
/// equals `j p^h` with `1 <= j < p`.
fn s_class(
    engine: &CoefficientEngine<'_>,
    h: usize,
    n: usize,
    m: &BigUint,
    i: &BigUint,
) -> Result<Option<u32>> {
    let p = engine.prime();
    let point = m + i * p.pow(engine.scale().prefix_len(n));
    let b = engine.b(&point, h + 1)?;
    let digits = b.digits();
    if digits[..h].iter().any(|&d| d != 0) || digits[h] == 0 {
        return Ok(None);
    }
    Ok(Some(digits[h]))
}

fn check_admissible(engine: &CoefficientEngine<'_>, n: usize, m: &BigUint) -> Result<()> {
    let bound = engine.prime().pow(engine.scale().prefix_len(n));
    if *m >= bound {
        return Err(Error::Precondition(format!(
            "m = {m} must be below p^(1+Phi({n})) = {bound}"
        )));
    }
    Ok(())
}

/// Whether `{b(m + i p^(1+Phi(n))) mod p^(h+1) : i in S}` is exactly
/// `{j p^h mod p^(h+1) : j = 1..p-1}`.
pub fn check_s_condition(
    engine: &CoefficientEngine<'_>,
    h: usize,
    n: usize,
    m: &BigUint,
    s: &SSet,
) -> Result<bool> {
    check_admissible(engine, n, m)?;
    let p = engine.prime().get() as usize;
    let mut hit = vec![false; p];
    for i in s.members() {
        match s_class(engine, h, n, m, i)? {
            Some(j) if !hit[j as usize] => hit[j as usize] = true,
            _ => return Ok(false),
        }
    }
    Ok(hit[1..].iter().all(|&x| x))
}

/// The admissible `m` at level `n`: `m < p^(1+Phi(n))`, `m = u mod p^(1+Phi(n0))`.
pub fn admissible_points(
    p: Prime,
    phi: &ScaleFn,
    u: &BigUint,
    n0: usize,
    n: usize,
) -> Result<Vec<BigUint>> {
    let step = p.pow(phi.prefix_len(n0));
    let count = p.pow(phi.prefix_len(n) - phi.prefix_len(n0.min(n)));
    let count = match count.to_u64() {
        Some(c) if c <= WINDOW_CAP => c,
        _ => {
            return Err(Error::CapExceeded {
                size: count,
                cap: WINDOW_CAP,
            })
        }
    };
    let base = u % &step;
    Ok((0..count).map(|k| &base + &step * k).collect())
}

/// Greedy S-set discovery: scanning `i = 1, 2, ...`, keep `i` when its class
/// is a fresh `j p^h` at every checked point; stop at `p - 1` members.
pub fn discover_s(
    engine: &CoefficientEngine<'_>,
    h: usize,
    n: usize,
    u: &BigUint,
    n0: usize,
    mode: &DiscoveryMode,
) -> Result<SSet> {
    let p = engine.prime();
    let phi = engine.scale();
    let points = match mode {
        DiscoveryMode::Trajectory(m) => vec![m.clone()],
        DiscoveryMode::Exhaustive => admissible_points(p, phi, u, n0, n)?,
    };
    for m in &points {
        check_admissible(engine, n, m)?;
    }
    let pv = p.get() as usize;
    let limit = window_size(p, phi.block_width(n + 1))?;
    let mut covered = vec![vec![false; pv]; points.len()];
    let mut members = Vec::new();
    for i in 1..limit {
        let i = BigUint::from(i);
        let classes = points
            .par_iter()
            .map(|m| s_class(engine, h, n, m, &i))
            .collect::<Result<Vec<_>>>()?;
        let usable = classes
            .iter()
            .zip(&covered)
            .all(|(c, cov)| matches!(c, Some(j) if !cov[*j as usize]));
        if usable {
            for (c, cov) in classes.iter().zip(covered.iter_mut()) {
                cov[c.unwrap_or(0) as usize] = true;
            }
            members.push(i);
            if members.len() == pv - 1 {
                return SSet::new(n, members, p, phi);
            }
        }
    }
    let (at, cov) = covered
        .iter()
        .enumerate()
        .find(|(_, cov)| cov[1..].iter().any(|&c| !c))
        .unwrap_or((0, &covered[0]));
    let missing = (1..pv).find(|&j| !cov[j]).unwrap_or(1) as u32;
    Err(Error::NoSSet {
        level: n,
        missing,
        at_m: points[at].clone(),
    })
}

/// Outcome of one lifting step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub next: BigUint,
    pub digit: BigUint,
    /// Other members of `{0} ∪ S` that also work; nonempty means the
    /// uniqueness argument was violated and the smallest digit was taken.
    pub alternatives: Vec<BigUint>,
}

/// One step from level `l`: the `i in {0} ∪ S` with
/// `f(u_l + i p^(1+Phi(l))) = 0 mod p^(2+h+l)`, found by direct evaluation
/// and cross-checked against `f(u_l + i p^(1+Phi(l))) = f(u_l) + p^(l+1) b(...)`.
pub fn lift_step(
    engine: &CoefficientEngine<'_>,
    h: usize,
    l: usize,
    u_l: &BigUint,
    s: &SSet,
) -> Result<StepOutcome> {
    let f = engine.function();
    let p = engine.prime();
    check_admissible(engine, l, u_l)?;
    let base_value = f.eval(u_l, 2 + h + l)?;
    if !base_value.valuation().certifies_at_least(1 + h + l) {
        return Err(Error::Precondition(format!(
            "f({u_l}) is not 0 mod p^{}",
            1 + h + l
        )));
    }
    let weight = p.pow(engine.scale().prefix_len(l));
    let mut working = Vec::new();
    for i in std::iter::once(BigUint::zero()).chain(s.members().iter().cloned()) {
        let candidate = u_l + &i * &weight;
        if f.eval(&candidate, 2 + h + l)?.is_zero() {
            working.push(i);
        }
    }
    let Some(digit) = working.first().cloned() else {
        return Err(Error::NoLiftDigit {
            level: l,
            u: u_l.clone(),
        });
    };
    let next = u_l + &digit * &weight;
    if !digit.is_zero() {
        let lhs = f.eval(&next, 2 + h + l)?.try_sub(&base_value)?;
        let b = engine.b(&next, h + 1)?;
        let rhs = PAdicApprox::from_natural(&(b.to_natural() * p.pow(l + 1)), p, 2 + h + l)?;
        if lhs != rhs {
            return Err(Error::LiftIdentity { level: l, digit });
        }
    }
    Ok(StepOutcome {
        next,
        digit,
        alternatives: working[1..].to_vec(),
    })
}

/// Inputs of a lifting run.
pub struct LiftProblem<'f> {
    pub f: &'f dyn FunctionOracle,
    pub phi: ScaleFn,
    pub h: usize,
    pub n0: usize,
    pub u: BigUint,
    pub n_max: usize,
    pub strategy: SStrategy,
}

impl<'f> LiftProblem<'f> {
    pub fn new(
        f: &'f dyn FunctionOracle,
        phi: ScaleFn,
        h: usize,
        n0: usize,
        u: BigUint,
        n_max: usize,
        strategy: SStrategy,
    ) -> Result<Self> {
        let p = f.prime();
        let bound = p.pow(phi.prefix_len(n0));
        if u >= bound {
            return Err(Error::Precondition(format!(
                "u = {u} must be below p^(1+Phi(n0)) = {bound}"
            )));
        }
        if n_max < n0 {
            return Err(Error::Precondition(format!(
                "n_max = {n_max} is below n0 = {n0}"
            )));
        }
        if let SStrategy::Explicit(sets) = &strategy {
            if sets.is_empty() {
                return Err(Error::Precondition(
                    "explicit S strategy needs at least one set".into(),
                ));
            }
        }
        if !f.eval(&u, 1 + h + n0)?.is_zero() {
            return Err(Error::Precondition(format!(
                "f({u}) is not 0 mod p^{}",
                1 + h + n0
            )));
        }
        Ok(LiftProblem {
            f,
            phi,
            h,
            n0,
            u,
            n_max,
            strategy,
        })
    }

    fn s_set(&self, engine: &CoefficientEngine<'_>, level: usize, u_l: &BigUint) -> Result<SSet> {
        let p = self.f.prime();
        match &self.strategy {
            SStrategy::Explicit(sets) => {
                let idx = (level - self.n0).min(sets.len() - 1);
                SSet::new(level, sets[idx].iter().cloned(), p, &self.phi)
            }
            SStrategy::FullRange => SSet::full_range(level, p, &self.phi),
            SStrategy::DiscoverTrajectory => discover_s(
                engine,
                self.h,
                level,
                &self.u,
                self.n0,
                &DiscoveryMode::Trajectory(u_l.clone()),
            ),
            SStrategy::DiscoverExhaustive => discover_s(
                engine,
                self.h,
                level,
                &self.u,
                self.n0,
                &DiscoveryMode::Exhaustive,
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LiftStatus {
    Success,
    StepFailure { level: usize, reason: String },
}

/// Full record of a lifting run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftTrace {
    pub p: u32,
    pub h: usize,
    pub n0: usize,
    pub n_max: usize,
    /// `u_{n0}, u_{n0+1}, ...`
    #[serde(with = "crate::serde_decimal::vec")]
    pub iterates: Vec<BigUint>,
    /// Block corrections `i_l`, `l = n0, n0+1, ...`
    #[serde(with = "crate::serde_decimal::vec")]
    pub chosen_i: Vec<BigUint>,
    pub s_sets: Vec<SSet>,
    /// `f(u_j) mod p^(1+h+j)`, all zero on success.
    pub certification: Vec<PAdicApprox>,
    /// `xi = u_{n_max}`, digits modulo `p^(1+Phi(n_max))`.
    pub root_digits: Vec<u32>,
    #[serde(with = "crate::serde_decimal::option")]
    pub root: Option<BigUint>,
    /// `f(root) = 0 mod p^certification_level`.
    pub certification_level: usize,
    pub ambiguous_levels: Vec<usize>,
    pub status: LiftStatus,
}

impl LiftTrace {
    pub fn succeeded(&self) -> bool {
        self.status == LiftStatus::Success
    }

    /// The root as a p-adic approximation modulo `p^(1+Phi(n_max))`.
    pub fn root_approx(&self) -> Option<PAdicApprox> {
        let p = Prime::new(self.p as u64).ok()?;
        self.root
            .as_ref()
            .and(PAdicApprox::new(p, self.root_digits.clone()).ok())
    }
}

/// Runs `lift_step` for `l = n0 .. n_max - 1`.
pub fn lift(problem: &LiftProblem<'_>) -> LiftTrace {
    let f = problem.f;
    let p = f.prime();
    let engine = CoefficientEngine::new(f, problem.phi.clone());
    let h = problem.h;
    let mut trace = LiftTrace {
        p: p.get(),
        h,
        n0: problem.n0,
        n_max: problem.n_max,
        iterates: vec![problem.u.clone()],
        chosen_i: Vec::new(),
        s_sets: Vec::new(),
        certification: Vec::new(),
        root_digits: Vec::new(),
        root: None,
        certification_level: 1 + h + problem.n_max,
        ambiguous_levels: Vec::new(),
        status: LiftStatus::Success,
    };
    let fail = |trace: &mut LiftTrace, level: usize, reason: String| {
        trace.status = LiftStatus::StepFailure { level, reason };
    };
    match f.eval(&problem.u, 1 + h + problem.n0) {
        Ok(r) => trace.certification.push(r),
        Err(e) => {
            fail(&mut trace, problem.n0, e.to_string());
            return trace;
        }
    }
    let mut current = problem.u.clone();
    for level in problem.n0..problem.n_max {
        let step = problem.s_set(&engine, level, &current).and_then(|s| {
            if !check_s_condition(&engine, h, level, &current, &s)? {
                return Err(Error::Precondition(format!(
                    "S({level}) = {:?} fails the coefficient condition at m = {current}",
                    s.members()
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                )));
            }
            let out = lift_step(&engine, h, level, &current, &s)?;
            let residue = f.eval(&out.next, 2 + h + level)?;
            Ok((s, out, residue))
        });
        match step {
            Ok((s, out, residue)) => {
                if !out.alternatives.is_empty() {
                    trace.ambiguous_levels.push(level);
                }
                trace.s_sets.push(s);
                trace.chosen_i.push(out.digit);
                trace.iterates.push(out.next.clone());
                trace.certification.push(residue);
                current = out.next;
            }
            Err(e) => {
                fail(&mut trace, level, e.to_string());
                return trace;
            }
        }
    }
    match PAdicApprox::from_natural(&current, p, problem.phi.prefix_len(problem.n_max)) {
        Ok(x) => trace.root_digits = x.digits().to_vec(),
        Err(e) => {
            fail(&mut trace, problem.n_max, e.to_string());
            return trace;
        }
    }
    trace.root = Some(current);
    trace
}

/// Re-derives every invariant of a successful trace directly from the
/// oracle; returns the list of violations.
pub fn verify_trace(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    trace: &LiftTrace,
) -> Result<Vec<String>> {
    let p = f.prime();
    let engine = CoefficientEngine::new(f, phi.clone());
    let mut bad = Vec::new();
    let levels = trace.n_max - trace.n0;
    if trace.iterates.len() != levels + 1
        || trace.chosen_i.len() != levels
        || trace.s_sets.len() != levels
    {
        bad.push("trace length does not match n_max - n0".to_string());
        return Ok(bad);
    }
    let u = &trace.iterates[0];
    if *u >= p.pow(phi.prefix_len(trace.n0)) {
        bad.push(format!("u = {u} exceeds p^(1+Phi(n0))"));
    }
    for (k, u_j) in trace.iterates.iter().enumerate() {
        let j = trace.n0 + k;
        if !f.eval(u_j, 1 + trace.h + j)?.is_zero() {
            bad.push(format!("f(u_{j}) is not 0 mod p^{}", 1 + trace.h + j));
        }
        if *u_j >= p.pow(phi.prefix_len(j)) {
            bad.push(format!("u_{j} = {u_j} is not below p^(1+Phi({j}))"));
        }
    }
    for k in 0..levels {
        let l = trace.n0 + k;
        let (u_l, next, i) = (
            &trace.iterates[k],
            &trace.iterates[k + 1],
            &trace.chosen_i[k],
        );
        let weight = p.pow(phi.prefix_len(l));
        if *next != u_l + i * &weight {
            bad.push(format!("u_{} != u_{l} + i p^(1+Phi({l}))", l + 1));
        }
        if !i.is_zero() && !trace.s_sets[k].contains(i) {
            bad.push(format!("i_{l} = {i} is not in {{0}} ∪ S({l})"));
        }
        let full = 2 + trace.h + l;
        let lhs = f.eval(next, full)?.try_sub(&f.eval(u_l, full)?)?;
        let b = engine.b(next, full - (l + 1)).map(|b| b.to_natural());
        match b {
            Ok(b) if !i.is_zero() => {
                let rhs = PAdicApprox::from_natural(&(b * p.pow(l + 1)), p, full)?;
                if lhs != rhs {
                    bad.push(format!(
                        "f(u_{}) - f(u_{l}) != p^{} b(u_{})",
                        l + 1,
                        l + 1,
                        l + 1
                    ));
                }
            }
            Ok(_) => {}
            Err(e) => bad.push(format!("b(u_{}) unavailable: {e}", l + 1)),
        }
    }
    if let Some(root) = &trace.root {
        let x = PAdicApprox::from_natural(root, p, phi.prefix_len(trace.n_max))?;
        if x.digits() != trace.root_digits.as_slice() {
            bad.push("root digits disagree with the root value".into());
        }
        let step = p.pow(phi.prefix_len(trace.n0));
        if root.mod_floor(&step) != u.mod_floor(&step) {
            bad.push("root is not congruent to u mod p^(1+Phi(n0))".into());
        }
        for k in 0..levels {
            let n = trace.n0 + k;
            let block = rho(&x, n + 1, phi)?;
            if !block.is_zero() && !trace.s_sets[k].contains(&block) {
                bad.push(format!(
                    "rho(root; {}) = {block} is not in {{0}} ∪ S({n})",
                    n + 1
                ));
            }
        }
        if !f.eval(root, trace.certification_level)?.is_zero() {
            bad.push(format!(
                "f(root) is not 0 mod p^{}",
                trace.certification_level
            ));
        }
    }
    Ok(bad)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquenessFailure {
    #[serde(with = "crate::serde_decimal")]
    pub m: BigUint,
    pub b_mod_ph: PAdicApprox,
}

/// Window check of `b(m) = 0 mod p^h` for every `m >= p^(1+Phi(n0))`,
/// `m = u mod p^(1+Phi(n0))`, below `p^(1+Phi(depth))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub h: usize,
    pub window_exponent: usize,
    pub points_checked: u64,
    /// `h = 0`: the condition holds with nothing to check.
    pub trivial: bool,
    pub failure: Option<UniquenessFailure>,
}

impl UniquenessReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn verify_uniqueness_condition(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    h: usize,
    u: &BigUint,
    n0: usize,
    depth: usize,
) -> Result<UniquenessReport> {
    let window_exponent = phi.prefix_len(depth);
    if h == 0 {
        return Ok(UniquenessReport {
            h,
            window_exponent,
            points_checked: 0,
            trivial: true,
            failure: None,
        });
    }
    let p = f.prime();
    let engine = CoefficientEngine::new(f, phi.clone());
    let points = admissible_points(p, phi, u, n0, depth.max(n0))?;
    let lower = p.pow(phi.prefix_len(n0));
    let failure = points
        .par_iter()
        .filter(|m| **m >= lower)
        .map(|m| -> Result<Option<UniquenessFailure>> {
            let b = engine.b(m, h)?;
            Ok((!b.is_zero()).then(|| UniquenessFailure {
                m: m.clone(),
                b_mod_ph: b,
            }))
        })
        .find_map_first(|r| r.transpose());
    let failure = failure.transpose()?;
    let checked = points.iter().filter(|m| **m >= lower).count() as u64;
    Ok(UniquenessReport {
        h,
        window_exponent,
        points_checked: checked,
        trivial: false,
        failure,
    })
}

/// All `u < p^(1+Phi(n0))` with `f(u) = 0 mod p^(1+h+n0)`.
pub fn starting_points(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    h: usize,
    n0: usize,
) -> Result<Vec<BigUint>> {
    let size = window_size(f.prime(), phi.prefix_len(n0))?;
    (0..size)
        .into_par_iter()
        .map(|u| {
            let u = BigUint::from(u);
            f.eval(&u, 1 + h + n0).map(|r| r.is_zero().then_some(u))
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{constant, digit_linear, digit_square, polynomial, DigitPower};

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn phi21() -> ScaleFn {
        ScaleFn::affine(2, 1).unwrap()
    }

    fn sets(v: &[&[u64]]) -> SStrategy {
        SStrategy::Explicit(
            v.iter()
                .map(|s| s.iter().map(|&i| big(i)).collect())
                .collect(),
        )
    }

    #[test]
    fn sset_validation() {
        let phi = phi21();
        assert!(SSet::from_u64s(0, &[1, 2], p(3), &phi).is_ok());
        assert!(SSet::from_u64s(0, &[0, 2], p(3), &phi).is_err());
        assert!(SSet::from_u64s(0, &[1, 9], p(3), &phi).is_err());
        assert!(SSet::from_u64s(0, &[1], p(3), &phi).is_err());
        assert!(SSet::from_u64s(0, &[1, 1], p(3), &phi).is_err());
        assert!(SSet::from_u64s(0, &[1, 3], p(3), &ScaleFn::identity()).is_err());
    }

    #[test]
    fn s_condition_examples() {
        let f = digit_linear(p(3), 1).unwrap();
        let engine = CoefficientEngine::new(&f, phi21());
        let s12 = SSet::from_u64s(0, &[1, 2], p(3), &phi21()).unwrap();
        let s36 = SSet::from_u64s(0, &[3, 6], p(3), &phi21()).unwrap();
        let s45 = SSet::from_u64s(0, &[4, 5], p(3), &phi21()).unwrap();
        assert!(check_s_condition(&engine, 0, 0, &big(2), &s12).unwrap());
        assert!(!check_s_condition(&engine, 0, 0, &big(2), &s36).unwrap());
        assert!(check_s_condition(&engine, 0, 0, &big(2), &s45).unwrap());
        assert!(check_s_condition(&engine, 0, 0, &big(9), &s12).is_err());
    }

    #[test]
    fn discovery_examples() {
        let f = digit_linear(p(3), 1).unwrap();
        let engine = CoefficientEngine::new(&f, phi21());
        let s = discover_s(&engine, 0, 0, &big(2), 0, &DiscoveryMode::Exhaustive).unwrap();
        assert_eq!(s.members(), &[big(1), big(2)]);
        let s = discover_s(&engine, 0, 1, &big(2), 0, &DiscoveryMode::Exhaustive).unwrap();
        assert_eq!(s.members(), &[big(1), big(2)]);

        let g = digit_square(p(7), 8).unwrap();
        let engine = CoefficientEngine::new(&g, phi21());
        let s = discover_s(
            &engine,
            0,
            0,
            &big(1),
            0,
            &DiscoveryMode::Trajectory(big(1)),
        )
        .unwrap();
        assert_eq!(s.members().len(), 6);
        assert!(check_s_condition(&engine, 0, 0, &big(1), &s).unwrap());

        let c = constant(p(3), 0).unwrap();
        let engine = CoefficientEngine::new(&c, phi21());
        let err = discover_s(
            &engine,
            0,
            0,
            &big(0),
            0,
            &DiscoveryMode::Trajectory(big(0)),
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::NoSSet {
                level: 0,
                missing: 1,
                at_m: big(0)
            }
        );
    }

    #[test]
    fn step_examples() {
        let f = digit_linear(p(3), 1).unwrap();
        let engine = CoefficientEngine::new(&f, phi21());
        let s = SSet::from_u64s(0, &[1, 2], p(3), &phi21()).unwrap();
        let out = lift_step(&engine, 0, 0, &big(2), &s).unwrap();
        assert_eq!((out.digit.clone(), out.next.clone()), (big(2), big(20)));
        assert!(out.alternatives.is_empty());
        let s1 = SSet::from_u64s(1, &[1, 2], p(3), &phi21()).unwrap();
        let out = lift_step(&engine, 0, 1, &big(20), &s1).unwrap();
        assert_eq!((out.digit, out.next), (big(2), big(182)));
        let out = lift_step(
            &engine,
            0,
            2,
            &big(182),
            &SSet::from_u64s(2, &[1, 2], p(3), &phi21()).unwrap(),
        )
        .unwrap();
        assert_eq!(out.digit, big(2));
        assert!(lift_step(&engine, 0, 0, &big(1), &s).is_err());
    }

    #[test]
    fn no_lift_digit() {
        // S = {3, 6} hits only the zero class; f(2) = 3 cannot be corrected.
        let f = digit_linear(p(3), 1).unwrap();
        let engine = CoefficientEngine::new(&f, phi21());
        let s = SSet::from_u64s(0, &[3, 6], p(3), &phi21()).unwrap();
        assert_eq!(
            lift_step(&engine, 0, 0, &big(2), &s).unwrap_err(),
            Error::NoLiftDigit {
                level: 0,
                u: big(2)
            }
        );
    }

    #[test]
    fn example_lifts() {
        let f = digit_linear(p(3), 1).unwrap();
        let pr = LiftProblem::new(&f, phi21(), 0, 0, big(2), 2, sets(&[&[1, 2]])).unwrap();
        let t = lift(&pr);
        assert!(t.succeeded(), "{:?}", t.status);
        assert_eq!(t.iterates, vec![big(2), big(20), big(182)]);
        assert_eq!(t.root_digits, vec![2, 0, 2, 0, 2, 0]);
        assert_eq!(t.certification_level, 3);
        assert!(verify_trace(&f, &phi21(), &t).unwrap().is_empty());

        let pr = LiftProblem::new(&f, phi21(), 0, 0, big(2), 2, sets(&[&[4, 5]])).unwrap();
        let t = lift(&pr);
        assert_eq!(t.root, Some(big(452)));
        assert_eq!(t.root_digits, vec![2, 0, 2, 1, 2, 1]);
        assert!(verify_trace(&f, &phi21(), &t).unwrap().is_empty());

        for strategy in [
            SStrategy::DiscoverTrajectory,
            SStrategy::DiscoverExhaustive,
            SStrategy::FullRange,
        ] {
            let pr = LiftProblem::new(&f, phi21(), 0, 0, big(2), 2, strategy).unwrap();
            assert_eq!(lift(&pr).root, Some(big(182)));
        }

        let q = polynomial(p(7), vec![(-2).into(), 0.into(), 1.into()]).unwrap();
        let pr = LiftProblem::new(
            &q,
            ScaleFn::identity(),
            0,
            0,
            big(3),
            2,
            SStrategy::FullRange,
        )
        .unwrap();
        let t = lift(&pr);
        assert_eq!(t.root, Some(big(108)));
        assert!(verify_trace(&q, &ScaleFn::identity(), &t)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn problem_validation() {
        let f = digit_linear(p(3), 1).unwrap();
        assert!(LiftProblem::new(&f, phi21(), 0, 0, big(9), 2, SStrategy::FullRange).is_err());
        assert!(LiftProblem::new(&f, phi21(), 0, 0, big(1), 2, SStrategy::FullRange).is_err());
        assert!(LiftProblem::new(&f, phi21(), 0, 1, big(2), 0, SStrategy::FullRange).is_err());
        assert!(
            LiftProblem::new(&f, phi21(), 0, 0, big(2), 2, SStrategy::Explicit(vec![])).is_err()
        );
    }

    #[test]
    fn failing_strategy_reports_level() {
        let f = digit_linear(p(3), 1).unwrap();
        let pr = LiftProblem::new(&f, phi21(), 0, 0, big(2), 2, sets(&[&[1, 2], &[3, 6]])).unwrap();
        let t = lift(&pr);
        assert!(matches!(t.status, LiftStatus::StepFailure { level: 1, .. }));
        assert_eq!(t.iterates, vec![big(2), big(20)]);
        assert!(t.root.is_none());
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<LiftTrace>(&json).unwrap(), t);
    }

    #[test]
    fn uniqueness_examples() {
        let f = digit_linear(p(3), 1).unwrap();
        let r = verify_uniqueness_condition(&f, &phi21(), 0, &big(2), 0, 2).unwrap();
        assert!(r.passed() && r.trivial);

        let r = verify_uniqueness_condition(&f, &phi21(), 1, &big(0), 0, 2).unwrap();
        assert_eq!(r.failure.unwrap().m, big(9));

        let g = digit_square(p(2), 17).unwrap();
        let r = verify_uniqueness_condition(&g, &phi21(), 1, &big(1), 1, 3).unwrap();
        assert!(r.passed());
        assert_eq!(r.points_checked, 15);
    }

    #[test]
    fn starting_point_scan() {
        let f = digit_linear(p(3), 1).unwrap();
        // f(u) = 1 + u_0 = 0 mod 3 iff u_0 = 2.
        assert_eq!(
            starting_points(&f, &phi21(), 0, 0).unwrap(),
            vec![big(2), big(5), big(8)]
        );
        let cube = DigitPower::new(p(5), 3, 2.into()).unwrap();
        let us = starting_points(&cube, &phi21(), 0, 0).unwrap();
        assert!(us.contains(&big(2)));
    }

    mod properties {
        use super::*;
        use crate::oracle::{brute_roots, BlockConstraint, RootQuery};
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn digit_power_lifts_match_oracle(pi in 0usize..3, ei in 0usize..2, a in -40i64..40) {
                let (pv, e) = [(3u64, [1u32, 3]), (5, [1, 3]), (7, [1, 5])][pi];
                let f = DigitPower::new(p(pv), e[ei], a.into()).unwrap();
                let phi = phi21();
                let u = starting_points(&f, &phi, 0, 0).unwrap()[0].clone();
                let pr = LiftProblem::new(&f, phi.clone(), 0, 0, u.clone(), 1, SStrategy::FullRange).unwrap();
                let t = lift(&pr);
                prop_assert!(t.succeeded(), "{:?}", t.status);
                prop_assert!(verify_trace(&f, &phi, &t).unwrap().is_empty());
                let digits: Vec<u64> = (0..pv).collect();
                let q = RootQuery::new(&f, phi.prefix_len(1), t.certification_level)
                    .congruent_to(u, phi.prefix_len(0))
                    .with_blocks(BlockConstraint::uniform(phi, 0, &digits));
                prop_assert_eq!(brute_roots(&q).unwrap(), vec![t.root.unwrap()]);
            }

            #[test]
            fn quadratic_lifts_match_oracle(pi in 0usize..2, b in -30i64..30, c in -30i64..30) {
                let pv = [5u64, 7][pi];
                let q = polynomial(p(pv), vec![c.into(), b.into(), 1.into()]).unwrap();
                let id = ScaleFn::identity();
                let simple = (0..pv).find(|&u| {
                    let uu = u as i64;
                    (uu * uu + b * uu + c).rem_euclid(pv as i64) == 0
                        && (2 * uu + b).rem_euclid(pv as i64) != 0
                });
                prop_assume!(simple.is_some());
                let u = big(simple.unwrap());
                let pr = LiftProblem::new(&q, id.clone(), 0, 0, u.clone(), 3, SStrategy::FullRange).unwrap();
                let t = lift(&pr);
                prop_assert!(t.succeeded(), "{:?}", t.status);
                prop_assert!(verify_trace(&q, &id, &t).unwrap().is_empty());
                let roots = brute_roots(&RootQuery::new(&q, 4, 4).congruent_to(u, 1)).unwrap();
                prop_assert_eq!(roots, vec![t.root.unwrap()]);
            }
        }
    }
}
