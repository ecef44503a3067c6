//! Exhaustive ground truth: root search over all residues below `p^K` and
//! a direct pairwise check of the continuity condition
//! `x = y mod p^(1+Phi(n-1))  =>  f(x) = f(y) mod p^n`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{window_size, FunctionOracle};
use crate::padic::PAdicApprox;
use crate::scale::{rho_natural, ScaleFn};

/// Admissible block values `rho(r; n+1)` for `n = n0, n0+1, ...`; the last
/// list is reused for deeper levels. Only levels whose block lies entirely
/// below `p^K_search` are constrained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockConstraint {
    pub phi: ScaleFn,
    pub n0: usize,
    pub allowed: Vec<Vec<BigUint>>,
}

impl BlockConstraint {
    pub fn new(phi: ScaleFn, n0: usize, allowed: Vec<Vec<BigUint>>) -> Result<Self> {
        if allowed.is_empty() {
            return Err(Error::Precondition(
                "block constraint needs at least one level".into(),
            ));
        }
        Ok(BlockConstraint { phi, n0, allowed })
    }

    /// The same set at every level.
    pub fn uniform(phi: ScaleFn, n0: usize, allowed: &[u64]) -> Self {
        BlockConstraint {
            phi,
            n0,
            allowed: vec![allowed.iter().map(|&v| BigUint::from(v)).collect()],
        }
    }

    fn admits(&self, r: &BigUint, f: &dyn FunctionOracle, k_search: usize) -> bool {
        let p = f.prime();
        (self.n0..)
            .take_while(|&n| self.phi.prefix_len(n + 1) <= k_search)
            .all(|n| {
                let set = &self.allowed[(n - self.n0).min(self.allowed.len() - 1)];
                set.contains(&rho_natural(r, n + 1, &self.phi, p))
            })
    }
}

pub struct RootQuery<'f> {
    pub f: &'f dyn FunctionOracle,
    pub k_search: usize,
    pub k_target: usize,
    /// `r = u mod p^exponent`.
    pub congruence: Option<(BigUint, usize)>,
    pub blocks: Option<BlockConstraint>,
}

impl<'f> RootQuery<'f> {
    pub fn new(f: &'f dyn FunctionOracle, k_search: usize, k_target: usize) -> Self {
        RootQuery {
            f,
            k_search,
            k_target,
            congruence: None,
            blocks: None,
        }
    }

    pub fn congruent_to(mut self, u: BigUint, exponent: usize) -> Self {
        self.congruence = Some((u, exponent));
        self
    }

    pub fn with_blocks(mut self, blocks: BlockConstraint) -> Self {
        self.blocks = Some(blocks);
        self
    }
}

/// Every `r < p^K_search` with `f(r) = 0 mod p^K_target` meeting the
/// constraints, ascending.
pub fn brute_roots(q: &RootQuery<'_>) -> Result<Vec<BigUint>> {
    let p = q.f.prime();
    window_size(p, q.k_search)?;
    let (base, exponent) = match &q.congruence {
        Some((u, e)) => {
            let e = (*e).min(q.k_search);
            (u.mod_floor(&p.pow(e)), e)
        }
        None => (BigUint::ZERO, 0),
    };
    let step = p.pow(exponent);
    let count = p.pow(q.k_search - exponent).to_u64().unwrap_or(u64::MAX);
    let hits = (0..count)
        .into_par_iter()
        .map(|k| -> Result<Option<BigUint>> {
            let r = &base + &step * k;
            if let Some(b) = &q.blocks {
                if !b.admits(&r, q.f, q.k_search) {
                    return Ok(None);
                }
            }
            Ok(q.f.eval(&r, q.k_target)?.is_zero().then_some(r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(hits.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuityCounterexample {
    #[serde(with = "crate::serde_decimal")]
    pub x: BigUint,
    #[serde(with = "crate::serde_decimal")]
    pub y: BigUint,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub window_exponent: usize,
    pub points_checked: u64,
    /// Least `(n, y)` with some `x` in its class breaking the condition.
    pub counterexample: Option<ContinuityCounterexample>,
}

impl ContinuityReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// For `1 <= n <= depth`, compares `f(y) mod p^n` across every class
/// `y mod p^(1+Phi(n-1))` of `y < p^(1+Phi(depth))`.
pub fn brute_check_xxx(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    depth: usize,
) -> Result<ContinuityReport> {
    let p = f.prime();
    let window_exponent = phi.prefix_len(depth);
    let size = window_size(p, window_exponent)?;
    let values: Vec<PAdicApprox> = (0..size)
        .into_par_iter()
        .map(|x| f.eval(&BigUint::from(x), depth.max(1)))
        .collect::<Result<_>>()?;
    let mut counterexample = None;
    for n in 1..=depth {
        let modulus = p.pow(phi.prefix_len(n - 1)).to_u64().unwrap_or(u64::MAX);
        let bad = (0..size).into_par_iter().find_map_first(|y| {
            let x = y % modulus;
            let differ = values[x as usize].digits()[..n] != values[y as usize].digits()[..n];
            differ.then_some((x, y))
        });
        if let Some((x, y)) = bad {
            counterexample = Some(ContinuityCounterexample {
                x: x.into(),
                y: y.into(),
                n,
            });
            break;
        }
    }
    Ok(ContinuityReport {
        window_exponent,
        points_checked: size,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{constant, digit_linear, polynomial};
    use crate::padic::Prime;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn bigs(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn phi21() -> ScaleFn {
        ScaleFn::affine(2, 1).unwrap()
    }

    #[test]
    fn root_examples() {
        let f = digit_linear(p(3), 1).unwrap();
        let q = RootQuery::new(&f, 6, 3)
            .congruent_to(BigUint::from(2u32), 2)
            .with_blocks(BlockConstraint::uniform(phi21(), 0, &[0, 1, 2]));
        assert_eq!(brute_roots(&q).unwrap(), bigs(&[182]));
        let q = RootQuery::new(&f, 6, 3)
            .congruent_to(BigUint::from(2u32), 2)
            .with_blocks(BlockConstraint::uniform(phi21(), 0, &[0, 4, 5]));
        assert_eq!(brute_roots(&q).unwrap(), bigs(&[452]));

        let q2 = polynomial(p(7), vec![(-2).into(), 0.into(), 1.into()]).unwrap();
        assert_eq!(
            brute_roots(&RootQuery::new(&q2, 3, 3)).unwrap(),
            bigs(&[108, 235])
        );
        let q = RootQuery::new(&q2, 3, 3).congruent_to(BigUint::from(3u32), 1);
        assert_eq!(brute_roots(&q).unwrap(), bigs(&[108]));
    }

    #[test]
    fn cap() {
        let f = digit_linear(p(3), 1).unwrap();
        assert!(matches!(
            brute_roots(&RootQuery::new(&f, 40, 3)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn continuity_examples() {
        let f = digit_linear(p(3), 1).unwrap();
        assert!(brute_check_xxx(&f, &phi21(), 2).unwrap().passed());
        let r = brute_check_xxx(&f, &ScaleFn::identity(), 2).unwrap();
        // x = 0, y = 3^2: equal mod 3^2 (n = 2 needs agreement through x_1), f differs mod 9.
        let c = r.counterexample.unwrap();
        assert_eq!(c.n, 2);
        assert_eq!(c.x, BigUint::from(0u32));
        assert_eq!(c.y, BigUint::from(9u32));
        let c0 = constant(p(5), 7).unwrap();
        assert!(brute_check_xxx(&c0, &phi21(), 2).unwrap().passed());
    }

    mod properties {
        use super::*;
        use crate::funcspace::DigitPower;
        use crate::vdp::{default_window_precision, verify_membership};
        use proptest::prelude::*;

        fn scale(k: usize) -> ScaleFn {
            match k {
                0 => ScaleFn::identity(),
                1 => phi21(),
                _ => ScaleFn::new(vec![0, 2, 3], 1).unwrap(),
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn membership_matches_direct_check(kind in 0usize..3, k in 0usize..3, a in -20i64..20, b in -20i64..20) {
                let f: Box<dyn FunctionOracle> = match kind {
                    0 => Box::new(DigitPower::new(p(3), 1, a.into()).unwrap()),
                    1 => Box::new(polynomial(p(3), vec![a.into(), b.into(), 1.into()]).unwrap()),
                    _ => Box::new(constant(p(3), a).unwrap()),
                };
                let phi = scale(k);
                let m = verify_membership(f.as_ref(), &phi, 2, default_window_precision(&phi, 2)).unwrap();
                let d = brute_check_xxx(f.as_ref(), &phi, 2).unwrap();
                prop_assert_eq!(m.passed(), d.passed());
            }
        }
    }
}
