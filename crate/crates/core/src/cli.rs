//! Command-line front end.
//!
//! Every run is determined by its arguments. Exit status is 0 on success,
//! 2 when a mathematical check fails, 1 on usage errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::approx::{
    corollary_lift, estimate_delta, from_derivative_mod_ps, verify_uniform_approx, ApproxReport,
    ApproxViolation, ApproxWindow,
};
use crate::error::{Error, Result};
use crate::funcspace::{modulus_table, phi_from_psi, FunctionOracle, FunctionSpec, ModulusTable};
use crate::hensel::{
    lift, verify_trace, verify_uniqueness_condition, LiftProblem, LiftTrace, SStrategy,
};
use crate::oracle::{brute_check_xxx, brute_roots, BlockConstraint, ContinuityReport, RootQuery};
use crate::scale::ScaleFn;
use crate::vdp::{
    coefficient_table, default_window_precision, verify_membership, MembershipReport, VdpCoeff,
};

#[derive(Parser, Debug, Clone)]
#[command(
    name = "padlift",
    version,
    about = "van der Put coefficients and Hensel lifting over Z_p"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format; `examples` prints a text table unless one is given.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct FnArgs {
    /// Function spec: inline JSON or a path to a JSON file.
    #[arg(long = "fn", value_name = "SPEC")]
    pub function: String,
    /// Scale function: `id`, `affine:A,B` for `A n + B`, or JSON; defaults to the family's own.
    #[arg(long)]
    pub phi: Option<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Coefficient table for m in [from, to).
    Coeffs {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, default_value_t = 0)]
        from: u64,
        /// Defaults to p^(1+Phi(2)).
        #[arg(long)]
        to: Option<u64>,
        /// Working precision; defaults to 1 + Phi(3).
        #[arg(long = "K")]
        k: Option<usize>,
    },
    /// Membership window check together with the direct continuity check.
    Verify {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long = "K")]
        k: Option<usize>,
    },
    /// Hensel lift from u.
    Lift {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        start: StartArgs,
        #[arg(long)]
        nmax: usize,
        /// `full`, `discover`, `discover-exhaustive`, or explicit sets such as `1,2;4,5`.
        #[arg(long = "s", default_value = "discover")]
        strategy: String,
    },
    /// Approximability window check at u, or the derivative bridge with `--s-order`.
    Approx {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        start: StartArgs,
        #[arg(long, default_value_t = 1)]
        l: usize,
        /// Defaults to max(n0, l, 1) + 2.
        #[arg(long)]
        nhi: Option<usize>,
        /// Defaults to n0 + 1.
        #[arg(long)]
        depth: Option<usize>,
        /// Use the derivative-modulo-p^s bridge (identity scale) with this s.
        #[arg(long)]
        s_order: Option<usize>,
    },
    /// Exhaustive root search below p^ksearch.
    Oracle {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long)]
        ksearch: usize,
        #[arg(long)]
        ktarget: usize,
        /// Restrict to r = u mod p^(1+Phi(n0)).
        #[arg(long)]
        u: Option<String>,
        #[arg(long, default_value_t = 0)]
        n0: usize,
        /// Restrict blocks rho(r; n+1) to {0} and these sets, as in `lift`.
        #[arg(long = "s")]
        strategy: Option<String>,
    },
    /// Window estimates of the modulus of continuity and the induced scale.
    Psi {
        #[arg(long = "fn", value_name = "SPEC")]
        function: String,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Built-in example suite.
    Examples,
}

#[derive(Args, Debug, Clone)]
pub struct StartArgs {
    #[arg(long, default_value_t = 0)]
    pub h: usize,
    #[arg(long, default_value_t = 0)]
    pub n0: usize,
    #[arg(long)]
    pub u: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffsDoc {
    pub function: String,
    pub phi: ScaleFn,
    pub precision: usize,
    pub coefficients: Vec<VdpCoeff>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyDoc {
    pub function: String,
    pub phi: ScaleFn,
    pub passed: bool,
    pub membership: MembershipReport,
    pub continuity: ContinuityReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxDoc {
    pub p: u32,
    #[serde(with = "crate::serde_decimal")]
    pub u: BigUint,
    pub h: usize,
    pub l: usize,
    pub delta_by_n: BTreeMap<usize, u32>,
    pub unit_flag: bool,
    pub window: ApproxWindow,
    pub failure: Option<ApproxViolation>,
}

impl From<ApproxReport> for ApproxDoc {
    fn from(r: ApproxReport) -> Self {
        let c = r.certificate;
        ApproxDoc {
            p: c.p,
            u: c.u,
            h: c.h,
            l: c.l,
            delta_by_n: c.delta_by_n,
            unit_flag: c.unit_flag,
            window: c.window,
            failure: r.failure,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleDoc {
    pub p: u32,
    pub k_search: usize,
    pub k_target: usize,
    #[serde(with = "crate::serde_decimal::vec")]
    pub roots: Vec<BigUint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiDoc {
    pub function: String,
    pub table: ModulusTable,
    pub phi: ScaleFn,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamplesDoc {
    pub results: Vec<ExampleResult>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDoc {
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Coeffs(CoeffsDoc),
    Verify(VerifyDoc),
    Lift(LiftTrace),
    Approx(ApproxDoc),
    Oracle(OracleDoc),
    Psi(PsiDoc),
    Examples(ExamplesDoc),
    Error(ErrorDoc),
}

impl Document {
    fn passed(&self) -> bool {
        match self {
            Document::Coeffs(_) | Document::Oracle(_) | Document::Psi(_) => true,
            Document::Verify(d) => d.passed,
            Document::Lift(t) => t.succeeded(),
            Document::Approx(d) => d.failure.is_none(),
            Document::Examples(d) => d.results.iter().all(|r| r.passed),
            Document::Error(_) => false,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let s = match self {
            Document::Coeffs(d) => serde_json::to_string(d),
            Document::Verify(d) => serde_json::to_string(d),
            Document::Lift(d) => serde_json::to_string(d),
            Document::Approx(d) => serde_json::to_string(d),
            Document::Oracle(d) => serde_json::to_string(d),
            Document::Psi(d) => serde_json::to_string(d),
            Document::Examples(d) => serde_json::to_string(d),
            Document::Error(d) => serde_json::to_string(d),
        };
        s.map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        match self {
            Document::Coeffs(d) => {
                out.push_str("m,tau,top_block,B,valuation,b\n");
                for c in &d.coefficients {
                    let top = c
                        .top_block
                        .as_ref()
                        .map(|t| t.to_string())
                        .unwrap_or_default();
                    let b =
                        c.b.as_ref()
                            .map(|b| b.to_decimal_string())
                            .unwrap_or_default();
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        c.m,
                        c.tau,
                        top,
                        c.big_b.to_decimal_string(),
                        c.valuation,
                        b
                    );
                }
            }
            Document::Lift(t) => {
                out.push_str("level,iterate,chosen_i,s_set\n");
                for (k, u) in t.iterates.iter().enumerate() {
                    let i = t.chosen_i.get(k).map(|i| i.to_string()).unwrap_or_default();
                    let s = t
                        .s_sets
                        .get(k)
                        .map(|s| {
                            s.members()
                                .iter()
                                .map(|m| m.to_string())
                                .collect::<Vec<_>>()
                                .join(" ")
                        })
                        .unwrap_or_default();
                    let _ = writeln!(out, "{},{},{},{}", t.n0 + k, u, i, s);
                }
            }
            Document::Oracle(d) => {
                out.push_str("root\n");
                for r in &d.roots {
                    let _ = writeln!(out, "{r}");
                }
            }
            Document::Psi(d) => {
                out.push_str("n,psi,phi\n");
                for (k, psi) in d.table.entries.iter().enumerate() {
                    let _ = writeln!(out, "{},{},{}", k + 1, psi, d.phi.at(k));
                }
            }
            Document::Approx(d) => {
                out.push_str("n,delta\n");
                for (n, delta) in &d.delta_by_n {
                    let _ = writeln!(out, "{n},{delta}");
                }
            }
            Document::Examples(d) => {
                out.push_str("name,passed,detail\n");
                for r in &d.results {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        r.name,
                        r.passed,
                        r.detail.replace(',', ";")
                    );
                }
            }
            Document::Verify(_) | Document::Error(_) => {
                return Err(Error::Precondition(
                    "csv output is not available for this document".into(),
                ));
            }
        }
        Ok(out)
    }
}

fn examples_table(d: &ExamplesDoc) -> String {
    let width = d.results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in &d.results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{tag}  {:width$}  {}", r.name, r.detail);
    }
    let passed = d.results.iter().filter(|r| r.passed).count();
    let _ = writeln!(out, "{passed}/{} passed", d.results.len());
    out
}

/// Result of one invocation.
pub struct RunOutcome {
    pub exit_code: i32,
    pub document: Option<Document>,
    pub rendered: String,
}

fn is_math_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::MembershipViolation { .. }
            | Error::NoSSet { .. }
            | Error::NoLiftDigit { .. }
            | Error::LiftIdentity { .. }
            | Error::ApproxInconsistent { .. }
            | Error::ValuationDeficit { .. }
            | Error::NonUnitDerivative { .. }
            | Error::PsiNotFound { .. }
    )
}

pub fn run(cli: &Cli) -> RunOutcome {
    let doc = match execute(&cli.command) {
        Ok(doc) => doc,
        Err(e) => {
            let code = if is_math_failure(&e) { 2 } else { 1 };
            let doc = Document::Error(ErrorDoc {
                error: e.to_string(),
            });
            let rendered = doc.to_json().unwrap_or_default();
            return RunOutcome {
                exit_code: code,
                document: Some(doc),
                rendered,
            };
        }
    };
    let rendered = match (cli.format, &doc) {
        (None, Document::Examples(d)) => Ok(examples_table(d)),
        (None | Some(Format::Json), _) => doc.to_json(),
        (Some(Format::Csv), _) => doc.to_csv(),
    };
    match rendered {
        Ok(rendered) => RunOutcome {
            exit_code: if doc.passed() { 0 } else { 2 },
            document: Some(doc),
            rendered,
        },
        Err(e) => RunOutcome {
            exit_code: 1,
            document: None,
            rendered: ErrorDoc {
                error: e.to_string(),
            }
            .error,
        },
    }
}

fn read_spec(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("cannot read {arg}: {e}")))
}

pub fn parse_function(arg: &str) -> Result<Box<dyn FunctionOracle>> {
    let text = read_spec(arg)?;
    let spec: FunctionSpec =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("function spec: {e}")))?;
    spec.build()
}

pub fn parse_scale(arg: &str) -> Result<ScaleFn> {
    let arg = arg.trim();
    if arg == "id" || arg == "identity" {
        return Ok(ScaleFn::identity());
    }
    if let Some(rest) = arg.strip_prefix("affine:") {
        let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
        let [a, b] = parts.as_slice() else {
            return Err(Error::Parse(format!("expected affine:A,B, got {arg}")));
        };
        let a = a
            .parse()
            .map_err(|_| Error::Parse(format!("bad slope {a}")))?;
        let b = b
            .parse()
            .map_err(|_| Error::Parse(format!("bad offset {b}")))?;
        return ScaleFn::affine(a, b);
    }
    let text = read_spec(arg)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("scale spec: {e}")))
}

pub fn parse_strategy(arg: &str) -> Result<SStrategy> {
    match arg.trim() {
        "full" => Ok(SStrategy::FullRange),
        "discover" => Ok(SStrategy::DiscoverTrajectory),
        "discover-exhaustive" => Ok(SStrategy::DiscoverExhaustive),
        list => list
            .split(';')
            .map(|set| {
                set.split(',')
                    .map(|i| {
                        i.trim()
                            .parse::<BigUint>()
                            .map_err(|_| Error::Parse(format!("bad S member {i:?}")))
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()
            .map(SStrategy::Explicit),
    }
}

fn parse_natural(arg: &str) -> Result<BigUint> {
    arg.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{arg:?} is not a nonnegative integer")))
}

fn load(f: &FnArgs) -> Result<(Box<dyn FunctionOracle>, ScaleFn)> {
    let func = parse_function(&f.function)?;
    let phi = match &f.phi {
        Some(s) => parse_scale(s)?,
        None => func.declared_scale().ok_or_else(|| {
            Error::Precondition("no --phi given and the family declares none".into())
        })?,
    };
    Ok((func, phi))
}

fn execute(command: &Command) -> Result<Document> {
    match command {
        Command::Coeffs { f, from, to, k } => {
            let (func, phi) = load(f)?;
            let p = func.prime();
            let to = match to {
                Some(t) => *t,
                None => crate::funcspace::window_size(p, phi.prefix_len(2))?,
            };
            let precision = k.unwrap_or_else(|| phi.prefix_len(3));
            let coefficients = coefficient_table(func.as_ref(), &phi, *from, to, precision)?;
            Ok(Document::Coeffs(CoeffsDoc {
                function: func.name(),
                phi,
                precision,
                coefficients,
            }))
        }
        Command::Verify { f, depth, k } => {
            let (func, phi) = load(f)?;
            let precision = k.unwrap_or_else(|| default_window_precision(&phi, *depth));
            let membership = verify_membership(func.as_ref(), &phi, *depth, precision)?;
            let continuity = brute_check_xxx(func.as_ref(), &phi, *depth)?;
            let passed = membership.passed() && continuity.passed();
            Ok(Document::Verify(VerifyDoc {
                function: func.name(),
                phi,
                passed,
                membership,
                continuity,
            }))
        }
        Command::Lift {
            f,
            start,
            nmax,
            strategy,
        } => {
            let (func, phi) = load(f)?;
            let problem = LiftProblem::new(
                func.as_ref(),
                phi,
                start.h,
                start.n0,
                parse_natural(&start.u)?,
                *nmax,
                parse_strategy(strategy)?,
            )?;
            Ok(Document::Lift(lift(&problem)))
        }
        Command::Approx {
            f,
            start,
            l,
            nhi,
            depth,
            s_order,
        } => {
            let (func, phi) = load(f)?;
            let u = parse_natural(&start.u)?;
            let report = match s_order {
                Some(s) => {
                    let window = nhi.unwrap_or(start.n0.max(*l).max(1) + 2);
                    let certificate = from_derivative_mod_ps(func.as_ref(), *s, &u, window)?;
                    ApproxReport {
                        certificate,
                        failure: None,
                    }
                }
                None => {
                    let n_hi = nhi.unwrap_or(start.n0.max(*l).max(1) + 2);
                    let depth = depth.unwrap_or(start.n0 + 1);
                    verify_uniform_approx(
                        func.as_ref(),
                        &phi,
                        &u,
                        start.n0,
                        start.h,
                        *l,
                        n_hi,
                        depth,
                    )?
                }
            };
            Ok(Document::Approx(report.into()))
        }
        Command::Oracle {
            f,
            ksearch,
            ktarget,
            u,
            n0,
            strategy,
        } => {
            let func = parse_function(&f.function)?;
            let mut query = RootQuery::new(func.as_ref(), *ksearch, *ktarget);
            let phi = match &f.phi {
                Some(s) => Some(parse_scale(s)?),
                None => func.declared_scale(),
            };
            if let Some(u) = u {
                let phi = phi
                    .clone()
                    .ok_or_else(|| Error::Precondition("--u needs a scale function".into()))?;
                query = query.congruent_to(parse_natural(u)?, phi.prefix_len(*n0));
            }
            if let Some(s) = strategy {
                let phi =
                    phi.ok_or_else(|| Error::Precondition("--s needs a scale function".into()))?;
                let allowed = match parse_strategy(s)? {
                    SStrategy::Explicit(sets) => sets
                        .into_iter()
                        .map(|mut set| {
                            set.push(BigUint::ZERO);
                            set
                        })
                        .collect(),
                    SStrategy::FullRange => {
                        vec![(0..func.prime().get()).map(BigUint::from).collect()]
                    }
                    _ => {
                        return Err(Error::Precondition(
                            "oracle --s takes explicit sets or `full`".into(),
                        ))
                    }
                };
                query = query.with_blocks(BlockConstraint::new(phi, *n0, allowed)?);
            }
            let roots = brute_roots(&query)?;
            Ok(Document::Oracle(OracleDoc {
                p: func.prime().get(),
                k_search: *ksearch,
                k_target: *ktarget,
                roots,
            }))
        }
        Command::Psi {
            function,
            nmax,
            depth,
        } => {
            let func = parse_function(function)?;
            let table = modulus_table(func.as_ref(), *nmax, *depth)?;
            let phi = phi_from_psi(&table)?;
            Ok(Document::Psi(PsiDoc {
                function: func.name(),
                table,
                phi,
            }))
        }
        Command::Examples => Ok(Document::Examples(ExamplesDoc {
            results: example_suite(),
        })),
    }
}

fn spec(json: &str) -> Box<dyn FunctionOracle> {
    parse_function(json).expect("built-in function spec")
}

fn check(name: &str, outcome: Result<(bool, String)>) -> ExampleResult {
    match outcome {
        Ok((passed, detail)) => ExampleResult {
            name: name.into(),
            passed,
            detail,
        },
        Err(e) => ExampleResult {
            name: name.into(),
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn explicit(sets: &[&[u64]]) -> SStrategy {
    SStrategy::Explicit(
        sets.iter()
            .map(|s| s.iter().map(|&i| BigUint::from(i)).collect())
            .collect(),
    )
}

#[allow(clippy::too_many_arguments)]
fn lift_and_confirm(
    f: &dyn FunctionOracle,
    phi: &ScaleFn,
    h: usize,
    n0: usize,
    u: u64,
    n_max: usize,
    strategy: SStrategy,
    allowed: &[u64],
) -> Result<(bool, String)> {
    let problem = LiftProblem::new(f, phi.clone(), h, n0, BigUint::from(u), n_max, strategy)?;
    let trace = lift(&problem);
    let Some(root) = trace.root.clone() else {
        return Ok((false, format!("{:?}", trace.status)));
    };
    let violations = verify_trace(f, phi, &trace)?;
    let query = RootQuery::new(f, phi.prefix_len(n_max), trace.certification_level)
        .congruent_to(BigUint::from(u), phi.prefix_len(n0))
        .with_blocks(BlockConstraint::uniform(phi.clone(), n0, allowed));
    let roots = brute_roots(&query)?;
    let ok = violations.is_empty() && roots.contains(&root);
    Ok((
        ok,
        format!(
            "root {root} digits {:?}; oracle roots {roots:?}",
            trace.root_digits
        ),
    ))
}

/// Golden configurations covering the worked examples.
pub fn example_suite() -> Vec<ExampleResult> {
    let phi21 = ScaleFn::affine(2, 1).expect("affine scale");
    let id = ScaleFn::identity();
    let linear = spec(r#"{"family":"digit_linear","p":3,"a":"1"}"#);
    let cube = spec(r#"{"family":"digit_cube","a":"2"}"#);
    let sq7 = spec(r#"{"family":"digit_square","p":7,"a":"8"}"#);
    let sq2 = spec(r#"{"family":"digit_square","p":2,"a":"17"}"#);
    let x2m2 = spec(r#"{"family":"polynomial","p":7,"coeffs":["-2","0","1"]}"#);
    let mut out = Vec::new();

    out.push(check(
        "digit_linear_p3_membership",
        verify_membership(linear.as_ref(), &phi21, 2, 7)
            .map(|r| (r.passed(), format!("{} points", r.points_checked))),
    ));
    out.push(check(
        "digit_linear_p3_identity_scale_fails",
        verify_membership(linear.as_ref(), &id, 2, 3).map(|r| match r.failure {
            Some(f) => (true, format!("counterexample m = {}", f.m)),
            None => (false, "unexpected pass".into()),
        }),
    ));
    out.push(check(
        "digit_linear_p3_lift_s12",
        lift_and_confirm(
            linear.as_ref(),
            &phi21,
            0,
            0,
            2,
            2,
            explicit(&[&[1, 2]]),
            &[0, 1, 2],
        ),
    ));
    out.push(check(
        "digit_linear_p3_lift_s45",
        lift_and_confirm(
            linear.as_ref(),
            &phi21,
            0,
            0,
            2,
            2,
            explicit(&[&[4, 5]]),
            &[0, 4, 5],
        ),
    ));
    out.push(check(
        "digit_cube_p5_lift",
        lift_and_confirm(
            cube.as_ref(),
            &phi21,
            0,
            0,
            2,
            2,
            SStrategy::DiscoverTrajectory,
            &[0, 1, 2, 3, 4],
        ),
    ));
    out.push(check(
        "digit_square_p7_corollary",
        (|| {
            let deltas = (1..=3)
                .map(|n| estimate_delta(sq7.as_ref(), &phi21, &BigUint::from(1u32), n, 0))
                .collect::<Result<Vec<_>>>()?;
            let trace = corollary_lift(sq7.as_ref(), &phi21, &BigUint::from(1u32), 0, 0, 1, 3)?;
            let ok = trace.succeeded() && deltas.iter().all(|&d| d == 2);
            Ok((
                ok,
                format!("deltas {deltas:?}, root digits {:?}", trace.root_digits),
            ))
        })(),
    ));
    out.push(check(
        "digit_square_p2_h1",
        (|| {
            let u = BigUint::from(1u32);
            let approx = verify_uniform_approx(sq2.as_ref(), &phi21, &u, 1, 1, 2, 4, 3)?;
            let unique = verify_uniqueness_condition(sq2.as_ref(), &phi21, 1, &u, 1, 3)?;
            let (lifted, detail) = lift_and_confirm(
                sq2.as_ref(),
                &phi21,
                1,
                1,
                1,
                4,
                SStrategy::FullRange,
                &[0, 1],
            )?;
            Ok((approx.passed() && unique.passed() && lifted, detail))
        })(),
    ));
    out.push(check(
        "x2_minus_2_p7",
        lift_and_confirm(
            x2m2.as_ref(),
            &id,
            0,
            0,
            3,
            2,
            SStrategy::FullRange,
            &[0, 1, 2, 3, 4, 5, 6],
        ),
    ));
    out.push(check(
        "x2_minus_2_p7_all_roots",
        brute_roots(&RootQuery::new(x2m2.as_ref(), 3, 3)).map(|r| {
            let expected: Vec<BigUint> = vec![108u32.into(), 235u32.into()];
            (r == expected, format!("{r:?}"))
        }),
    ));
    out
}
