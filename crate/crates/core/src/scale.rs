//! Scale functions `Phi` and the digit-block machinery they induce.
//!
//! A scale function cuts the base-`p` digits of a p-adic integer into blocks:
//! block `j` holds positions `1 + Phi(j-1) ..= Phi(j)`, with `Phi(-1) = -1`,
//! so block 0 starts at position 0.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{digit_len, natural_digits, natural_from_digits, PAdicApprox, Prime};

/// A strictly increasing `Phi: N -> N`, given as a finite table followed by
/// an affine tail `Phi(n) = Phi(N) + slope * (n - N)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ScaleSpec", into = "ScaleSpec")]
pub struct ScaleFn {
    table: Vec<usize>,
    tail_slope: usize,
}

/// JSON form: `{"table":[1,3,5],"tail_slope":2}` or `{"id":true}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScaleSpec {
    Identity {
        id: bool,
    },
    Table {
        table: Vec<usize>,
        tail_slope: usize,
    },
}

impl TryFrom<ScaleSpec> for ScaleFn {
    type Error = Error;
    fn try_from(spec: ScaleSpec) -> Result<Self> {
        match spec {
            ScaleSpec::Identity { id: true } => Ok(ScaleFn::identity()),
            ScaleSpec::Identity { id: false } => Err(Error::InvalidScale(
                "`id` must be true; give a table otherwise".into(),
            )),
            ScaleSpec::Table { table, tail_slope } => ScaleFn::new(table, tail_slope),
        }
    }
}

impl From<ScaleFn> for ScaleSpec {
    fn from(phi: ScaleFn) -> ScaleSpec {
        if phi.is_identity() {
            ScaleSpec::Identity { id: true }
        } else {
            ScaleSpec::Table {
                table: phi.table,
                tail_slope: phi.tail_slope,
            }
        }
    }
}

impl ScaleFn {
    pub fn new(table: Vec<usize>, tail_slope: usize) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidScale("empty table".into()));
        }
        if tail_slope == 0 {
            return Err(Error::InvalidScale("tail slope must be at least 1".into()));
        }
        if let Some(w) = table.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidScale(format!(
                "Phi({}) = {} is not above Phi({}) = {}",
                w + 1,
                table[w + 1],
                w,
                table[w]
            )));
        }
        Ok(ScaleFn { table, tail_slope })
    }

    pub fn identity() -> Self {
        ScaleFn {
            table: vec![0],
            tail_slope: 1,
        }
    }

    /// `Phi(n) = slope * n + offset`.
    pub fn affine(slope: usize, offset: usize) -> Result<Self> {
        ScaleFn::new(vec![offset], slope)
    }

    pub fn is_identity(&self) -> bool {
        self.tail_slope == 1 && self.table.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn tail_slope(&self) -> usize {
        self.tail_slope
    }

    /// `Phi(n)`.
    pub fn at(&self, n: usize) -> usize {
        match self.table.get(n) {
            Some(&v) => v,
            None => {
                let last = self.table.len() - 1;
                self.table[last] + self.tail_slope * (n - last)
            }
        }
    }

    /// `Phi(n)` with the `Phi(-1) = -1` convention.
    pub fn at_signed(&self, n: isize) -> isize {
        if n < 0 {
            -1
        } else {
            self.at(n as usize) as isize
        }
    }

    /// `1 + Phi(j)`: the number of digits covered by blocks `0..=j`.
    pub fn prefix_len(&self, j: usize) -> usize {
        1 + self.at(j)
    }

    /// `1 + Phi(j-1)`: first digit position of block `j`.
    pub fn block_start(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.prefix_len(j - 1)
        }
    }

    /// `Phi(j) - Phi(j-1)`.
    pub fn block_width(&self, j: usize) -> usize {
        self.prefix_len(j) - self.block_start(j)
    }
}

/// `tau(Phi; m)`: least `h` with `m < p^(1+Phi(h))`.
pub fn tau(phi: &ScaleFn, m: &BigUint, p: Prime) -> usize {
    // m < p^L  <=>  m has at most L base-p digits.
    let len = digit_len(m, p);
    let mut h = 0;
    while phi.prefix_len(h) < len {
        h += 1;
    }
    h
}

/// `M(Phi; m)`: the top digit block of `m`, kept at its own weight.
pub fn big_m(phi: &ScaleFn, m: &BigUint, p: Prime) -> Result<BigUint> {
    let t = tau(phi, m, p);
    if t == 0 {
        return Err(Error::Precondition(format!(
            "M(m) is defined only for tau(m) >= 1; m = {m}"
        )));
    }
    let mut digits = natural_digits(m, p);
    let start = phi.block_start(t);
    for d in digits.iter_mut().take(start) {
        *d = 0;
    }
    Ok(natural_from_digits(&digits, p))
}

fn require_precision(x: &PAdicApprox, needed: usize) -> Result<()> {
    if x.precision() < needed {
        return Err(Error::InsufficientPrecision {
            needed,
            available: x.precision(),
        });
    }
    Ok(())
}

/// `rho(x; j)`: block `j` of `x`, shifted down to weight `p^0`.
pub fn rho(x: &PAdicApprox, j: usize, phi: &ScaleFn) -> Result<BigUint> {
    require_precision(x, phi.prefix_len(j))?;
    let block = &x.digits()[phi.block_start(j)..phi.prefix_len(j)];
    Ok(natural_from_digits(block, x.prime()))
}

/// `rho(m; j)` for an integer.
pub fn rho_natural(m: &BigUint, j: usize, phi: &ScaleFn, p: Prime) -> BigUint {
    let digits = natural_digits(m, p);
    let start = phi.block_start(j).min(digits.len());
    let end = phi.prefix_len(j).min(digits.len());
    natural_from_digits(&digits[start..end], p)
}

/// `x(j) = sum_{i <= Phi(j)} x_i p^i`.
pub fn truncate_x_j(x: &PAdicApprox, j: usize, phi: &ScaleFn) -> Result<BigUint> {
    let len = phi.prefix_len(j);
    require_precision(x, len)?;
    Ok(natural_from_digits(&x.digits()[..len], x.prime()))
}

/// `J(x)` restricted to `[0, j_max]`: zero plus every level whose block is nonzero.
pub fn jump_set(x: &PAdicApprox, j_max: usize, phi: &ScaleFn) -> Result<BTreeSet<usize>> {
    require_precision(x, phi.prefix_len(j_max))?;
    let digits = x.digits();
    let mut out = BTreeSet::from([0]);
    for j in 1..=j_max {
        if digits[phi.block_start(j)..phi.prefix_len(j)]
            .iter()
            .any(|&d| d != 0)
        {
            out.insert(j);
        }
    }
    Ok(out)
}

/// `chi(Phi, m; x)`: whether `x` agrees with `m` on the first `1 + Phi(tau(m))` digits.
pub fn chi(phi: &ScaleFn, m: &BigUint, x: &PAdicApprox) -> Result<bool> {
    let p = x.prime();
    let len = phi.prefix_len(tau(phi, m, p));
    require_precision(x, len)?;
    let mut m_digits = natural_digits(m, p);
    m_digits.resize(len, 0);
    Ok(x.digits()[..len] == m_digits[..])
}
