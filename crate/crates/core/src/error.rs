use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime in the supported range 2..=65521")]
    NotPrime(u64),

    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u32, right: u32 },

    #[error("insufficient precision: need {needed} digits, have {available}")]
    InsufficientPrecision { needed: usize, available: usize },

    #[error("digit {digit} at position {position} is out of range for p = {p}")]
    DigitOutOfRange { digit: u32, position: usize, p: u32 },

    #[error("precision must be at least 1")]
    ZeroPrecision,

    #[error("scale function is not strictly increasing: {0}")]
    InvalidScale(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("wrong prime for {family}: expected {expected}, got {got}")]
    WrongPrime {
        family: &'static str,
        expected: u32,
        got: u32,
    },

    /// `v_p(B(m)) < tau(m)`: a counterexample to membership of `f` in `F(Phi)`.
    #[error("membership violation at m = {m}: v_p(B) = {valuation} < tau = {tau}")]
    MembershipViolation {
        m: BigUint,
        tau: usize,
        valuation: usize,
    },

    #[error(
        "no S-set at level {level}: residue class {missing}*p^h is never attained (m = {at_m})"
    )]
    NoSSet {
        level: usize,
        missing: u32,
        at_m: BigUint,
    },

    #[error("no lift digit at level {level} from u = {u}")]
    NoLiftDigit { level: usize, u: BigUint },

    #[error("identity f(u + i p^(1+Phi(l))) - f(u) = p^(l+1) b(...) failed at level {level}, i = {digit}")]
    LiftIdentity { level: usize, digit: BigUint },

    #[error("approximation inconsistent at n = {n}, u' = {u_prime}")]
    ApproxInconsistent { n: usize, u_prime: BigUint },

    #[error("valuation deficit at n = {n}: difference has valuation {valuation}, need {needed}")]
    ValuationDeficit {
        n: usize,
        valuation: usize,
        needed: usize,
    },

    #[error("derivative modulo p^{s} has valuation {valuation}, expected {expected}")]
    NonUnitDerivative {
        s: usize,
        valuation: String,
        expected: usize,
    },

    #[error("no modulus of continuity below the window depth {depth} for n = {n}")]
    PsiNotFound { n: usize, depth: usize },

    #[error("search space {size} exceeds the cap {cap}")]
    CapExceeded { size: BigUint, cap: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}
