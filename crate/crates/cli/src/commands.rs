use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use witt_residue::brieskorn::{
    flat_extend_pairing, pairing_basis, spectral_numbers, verify_axioms, AxiomReport, FamilyLattice,
};
use witt_residue::coeff::{parse_rational, Coeff, ModInt, Modulus};
use witt_residue::poly::{format_monomial, qh_check, Monomial, MultiPoly, TieBreak};
use witt_residue::residue::{family_residue_matrix, hessian, MilnorAlgebra};
use witt_residue::witt::{witt_to_zpm, WittVector};
use witt_residue::witt_lift::{
    compat_chain, rational_consistency, witt_pairing, Consistency, DenominatorPolicy, LevelOutcome, WittContext,
};
use witt_residue::Error;

use crate::expr::{parse_poly, Var};
use crate::report::{matrix_json, rational_json, scalar_matrix_json, Format, Report, ToJson};

pub const SEED_ENV: &str = "WITT_RESIDUE_SEED";

/// Largest p^{m−1} for which `witt add|mul` builds universal polynomials.
const MAX_WITT_DEGREE: u64 = 343;

#[derive(Debug, Parser)]
#[command(name = "witt-residue", version, about = "Higher residue pairings over Q and over W_m(F_p) = Z/p^m")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Witt vector arithmetic.
    Witt {
        #[command(subcommand)]
        op: WittOp,
    },
    /// Jacobian Gröbner basis, Milnor number, monomial basis and spectrum.
    Milnor {
        #[command(flatten)]
        germ: GermArgs,
        /// Tie-break inside the weighted order.
        #[arg(long, value_enum, default_value_t = Tie::Grevlex)]
        order: Tie,
    },
    /// Grothendieck residue pairing, and res(g) if --g is given.
    Residue {
        #[command(flatten)]
        germ: GermArgs,
        /// Polynomial whose residue res(g) is reported.
        #[arg(long)]
        g: Option<String>,
    },
    /// Higher residue pairing on the monomial basis.
    Pairing {
        #[command(flatten)]
        germ: GermArgs,
        /// Truncation order N in t.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(i64).range(1..))]
        torder: i64,
    },
    /// Flat extension of the pairing over f + s·g.
    Family {
        #[command(flatten)]
        germ: GermArgs,
        /// Deformation direction g, of weighted degree at most 1.
        #[arg(long)]
        g: String,
        /// Truncation order M in the parameter s.
        #[arg(long, default_value_t = 4)]
        sorder: usize,
        /// Truncation order N in t.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(i64).range(1..))]
        torder: i64,
    },
    /// Check the pairing axioms on basis classes and random sections.
    Verify {
        #[command(flatten)]
        germ: GermArgs,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Defaults to $WITT_RESIDUE_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Truncation order N in t.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(i64).range(1..))]
        torder: i64,
        /// Run over Z/p^m instead of Q (needs --m).
        #[arg(long, requires = "m")]
        p: Option<u64>,
        #[arg(long, requires = "p")]
        m: Option<u32>,
        /// Verify the flat extension over f + s·g instead.
        #[arg(long, conflicts_with = "p")]
        g: Option<String>,
        /// Truncation order M in s, with --g.
        #[arg(long, default_value_t = 4)]
        sorder: usize,
    },
    /// Higher residue pairing over Z/p^m.
    WittPairing {
        #[command(flatten)]
        germ: GermArgs,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        /// Truncation order N in t.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(i64).range(1..))]
        torder: i64,
    },
    /// Compatibility of the levels m = 1..mmax under reduction mod p^m.
    Compat {
        #[command(flatten)]
        germ: GermArgs,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        mmax: u32,
        /// Truncation order N in t.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(i64).range(1..))]
        torder: i64,
        /// Report bad primes as skipped levels instead of failing.
        #[arg(long)]
        track: bool,
    },
}

#[derive(Debug, Subcommand)]
enum WittOp {
    /// Sum of two Witt vectors.
    Add(WittArgs),
    /// Product of two Witt vectors.
    Mul(WittArgs),
    /// Ghost components of x (over Q only).
    Ghost(WittArgs),
}

#[derive(Debug, Args)]
struct WittArgs {
    /// The prime.
    #[arg(long)]
    p: u64,
    /// Vector length.
    #[arg(long)]
    m: usize,
    /// Comma-separated components; missing ones are zero.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Second operand for add and mul.
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    /// Base ring of the components.
    #[arg(long, value_enum, default_value_t = Base::Q)]
    over: Base,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Base {
    Q,
    Fp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Tie {
    Grevlex,
    Grlex,
}

#[derive(Debug, Args)]
struct GermArgs {
    /// The polynomial f.
    #[arg(long)]
    f: String,
    /// Comma-separated rational weights, one per variable.
    #[arg(long)]
    weights: String,
}

/// Exit status and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Failures before any computation: the command line itself is wrong.
struct Usage(String);

enum Failure {
    Usage(Usage),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u)
    }
}

type Run<T> = std::result::Result<T, Failure>;

/// Parse `args` (including the program name) and run the command.
/// `env_seed` is the value of WITT_RESIDUE_SEED, if set.
pub fn run<I, T>(args: I, env_seed: Option<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 1, stdout: String::new(), stderr: text },
            };
        }
    };
    let mut report = Report::new(command_name(&cli.command));
    let code = match dispatch(&cli.command, &mut report, env_seed.as_deref()) {
        Ok(()) => 0,
        Err(Failure::Usage(Usage(msg))) => {
            report.usage_error(&msg);
            1
        }
        Err(Failure::Domain(e)) => {
            report.error(&e);
            2
        }
    };
    let stderr = if code == 0 { String::new() } else { format!("error: {}\n", last_message(&report)) };
    Outcome { code, stdout: report.render(cli.format), stderr }
}

fn last_message(r: &Report) -> String {
    let v = r.to_value();
    v["errors"].as_array().and_then(|a| a.last()).map_or(String::new(), |e| {
        format!("{}: {}", e["kind"].as_str().unwrap_or(""), e["message"].as_str().unwrap_or(""))
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Witt { op: WittOp::Add(_) } => "witt add",
        Command::Witt { op: WittOp::Mul(_) } => "witt mul",
        Command::Witt { op: WittOp::Ghost(_) } => "witt ghost",
        Command::Milnor { .. } => "milnor",
        Command::Residue { .. } => "residue",
        Command::Pairing { .. } => "pairing",
        Command::Family { .. } => "family",
        Command::Verify { .. } => "verify",
        Command::WittPairing { .. } => "witt-pairing",
        Command::Compat { .. } => "compat",
    }
}

/// Parsed f with its weights and variable names.
struct Germ {
    f: MultiPoly<BigRational>,
    weights: Vec<BigRational>,
    names: Vec<String>,
}

fn parse_weights(s: &str) -> Run<Vec<BigRational>> {
    s.split(',')
        .map(|w| parse_rational(w).ok_or_else(|| Usage(format!("cannot read weight '{}'", w.trim())).into()))
        .collect()
}

fn names_for(n: usize, indexed: bool) -> Vec<String> {
    if indexed || n > 3 {
        (1..=n).map(|i| format!("x{i}")).collect()
    } else {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    }
}

fn parse_in(text: &str, what: &str, nvars: usize) -> Run<(MultiPoly<BigRational>, bool)> {
    let e = parse_poly(text).map_err(|e| Usage(format!("--{what}: {e}")))?;
    let indexed = e.variables().iter().any(|v| matches!(v, Var::Indexed(_)));
    Ok((e.to_poly(&(), nvars)?, indexed))
}

fn germ(args: &GermArgs, report: &mut Report) -> Run<Germ> {
    let weights = parse_weights(&args.weights)?;
    let (f, indexed) = parse_in(&args.f, "f", weights.len())?;
    let names = names_for(weights.len(), indexed);
    report.config("f", f.to_string_with(&names));
    report.config("weights", Value::Array(weights.iter().map(rational_json).collect()));
    Ok(Germ { f, weights, names })
}

fn algebra<C: Coeff>(f: &MultiPoly<C>, weights: &[BigRational], tie: TieBreak) -> Run<MilnorAlgebra<C>> {
    Ok(MilnorAlgebra::new(qh_check(f, weights, tie)?)?)
}

fn monomials(ms: &[Monomial], names: &[String]) -> Value {
    Value::Array(ms.iter().map(|m| Value::String(format_monomial(m, names))).collect())
}

fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Run<u64> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer")).into()),
        (None, None) => Ok(0),
    }
}

fn dispatch(cmd: &Command, report: &mut Report, env_seed: Option<&str>) -> Run<()> {
    match cmd {
        Command::Witt { op } => witt(op, report),
        Command::Milnor { germ: g, order } => {
            let tie = match order {
                Tie::Grevlex => TieBreak::Grevlex,
                Tie::Grlex => TieBreak::Grlex,
            };
            let gm = germ(g, report)?;
            let sing = qh_check(&gm.f, &gm.weights, tie)?;
            report.config("order", sing.groebner().order().name());
            let alg = MilnorAlgebra::new(sing)?;
            let sing = alg.singularity();
            report.result("mu", alg.mu());
            report.result("basis", monomials(alg.basis(), &gm.names));
            report.result(
                "groebner_basis",
                Value::Array(sing.groebner().basis().iter().map(|p| Value::String(p.to_string_with(&gm.names))).collect()),
            );
            report.result("socle", format_monomial(&alg.basis()[alg.socle_index()], &gm.names));
            report.result("spectrum", Value::Array(spectral_numbers(&alg).iter().map(rational_json).collect()));
            report.result("hessian", alg.hessian().to_string_with(&gm.names));
            Ok(())
        }
        Command::Residue { germ: g, g: extra } => {
            let gm = germ(g, report)?;
            let alg = algebra(&gm.f, &gm.weights, TieBreak::Grevlex)?;
            report.result("mu", alg.mu());
            report.result("basis", monomials(alg.basis(), &gm.names));
            report.result("socle", format_monomial(&alg.basis()[alg.socle_index()], &gm.names));
            report.result("socle_residue", alg.socle_residue().to_json());
            report.result("residue_of_hessian", alg.groth_residue(&hessian(&gm.f))?.to_json());
            report.result("residue_matrix", scalar_matrix_json(&alg.residue_pairing_matrix()?));
            if let Some(text) = extra {
                let (h, _) = parse_in(text, "g", gm.weights.len())?;
                report.config("g", h.to_string_with(&gm.names));
                report.result("residue_of_g", alg.groth_residue(&h)?.to_json());
            }
            Ok(())
        }
        Command::Pairing { germ: g, torder } => {
            let gm = germ(g, report)?;
            report.config("torder", *torder);
            let alg = algebra(&gm.f, &gm.weights, TieBreak::Grevlex)?;
            report.result("basis", monomials(alg.basis(), &gm.names));
            report.result("spectrum", Value::Array(spectral_numbers(&alg).iter().map(rational_json).collect()));
            report.result("K", matrix_json(&pairing_basis(&alg, *torder)?));
            Ok(())
        }
        Command::Family { germ: g, g: dir, sorder, torder } => {
            let gm = germ(g, report)?;
            let (h, _) = parse_in(dir, "g", gm.weights.len())?;
            report.config("g", h.to_string_with(&gm.names));
            report.config("sorder", *sorder);
            report.config("torder", *torder);
            let alg = algebra(&gm.f, &gm.weights, TieBreak::Grevlex)?;
            let fam = FamilyLattice::new(alg.clone(), h, *sorder)?;
            let k0 = pairing_basis(&alg, *torder + *sorder as i64 - 1)?;
            let k = flat_extend_pairing(&fam, &k0, *torder)?;
            let fiber = family_residue_matrix(fam.algebra(), fam.family())?;
            let matches = (0..alg.mu()).all(|i| {
                (0..alg.mu()).all(|j| k.entry(i, j).coeff(0).is_some_and(|c| c.agrees_with(&fiber[i][j])))
            });
            report.result("basis", monomials(alg.basis(), &gm.names));
            report.result("K", matrix_json(&k));
            report.result("fiber_residue_matrix", scalar_matrix_json(&fiber));
            report.result("fiber_matches_residue", matches);
            Ok(())
        }
        Command::Verify { germ: g, trials, seed, torder, p, m, g: dir, sorder } => {
            let gm = germ(g, report)?;
            let seed = resolve_seed(*seed, env_seed)?;
            report.config("seed", seed);
            report.config("trials", *trials);
            report.config("torder", *torder);
            let rep = match (p, m, dir) {
                (Some(p), Some(m), _) => {
                    let ctx = WittContext::new(*p, *m)?;
                    report.config("p", *p);
                    report.config("m", *m);
                    let w = witt_pairing(&gm.f, &gm.weights, &ctx, *torder)?;
                    verify_axioms(&w.algebra, &w.matrix, *torder, *trials, seed)?
                }
                (_, _, Some(text)) => {
                    let (h, _) = parse_in(text, "g", gm.weights.len())?;
                    report.config("g", h.to_string_with(&gm.names));
                    report.config("sorder", *sorder);
                    let alg = algebra(&gm.f, &gm.weights, TieBreak::Grevlex)?;
                    let fam = FamilyLattice::new(alg.clone(), h, *sorder)?;
                    let k0 = pairing_basis(&alg, *torder + *sorder as i64 - 1)?;
                    let k = flat_extend_pairing(&fam, &k0, *torder)?;
                    verify_axioms(&fam, &k, *torder, *trials, seed)?
                }
                _ => {
                    let alg = algebra(&gm.f, &gm.weights, TieBreak::Grevlex)?;
                    let k = pairing_basis(&alg, *torder)?;
                    verify_axioms(&alg, &k, *torder, *trials, seed)?
                }
            };
            report.result("axioms", axiom_json(&rep));
            report.result("all_passed", rep.all_passed());
            Ok(())
        }
        Command::WittPairing { germ: g, p, m, torder } => {
            let gm = germ(g, report)?;
            report.config("p", *p);
            report.config("m", *m);
            report.config("torder", *torder);
            let ctx = WittContext::new(*p, *m)?;
            let w = witt_pairing(&gm.f, &gm.weights, &ctx, *torder)?;
            report.result("basis", monomials(w.algebra.basis(), &gm.names));
            report.result("K", matrix_json(&w.matrix));
            let consistent = match rational_consistency(&gm.f, &gm.weights, &ctx, *torder)? {
                Consistency::Consistent { .. } => json!(true),
                Consistency::SkippedBadPrime { scalar } => json!({ "skipped_bad_prime": scalar }),
            };
            report.result("matches_rational", consistent);
            Ok(())
        }
        Command::Compat { germ: g, p, mmax, torder, track } => {
            let gm = germ(g, report)?;
            let policy = if *track { DenominatorPolicy::Track } else { DenominatorPolicy::Error };
            report.config("p", *p);
            report.config("mmax", *mmax);
            report.config("torder", *torder);
            report.config("policy", if *track { "track" } else { "error" });
            let chain = compat_chain(&gm.f, &gm.weights, *p, *mmax, *torder, policy)?;
            let levels: Vec<Value> = chain
                .levels
                .iter()
                .map(|l| match l {
                    LevelOutcome::Computed(w) => json!({ "m": w.context.m(), "K": matrix_json(&w.matrix) }),
                    LevelOutcome::SkippedBadPrime { level, scalar } => {
                        json!({ "m": level, "skipped_bad_prime": scalar })
                    }
                })
                .collect();
            let links: Vec<Value> = chain
                .links
                .iter()
                .map(|c| json!({ "upper": c.upper, "lower": c.upper - 1, "entries_compared": c.entries_compared, "compatible": true }))
                .collect();
            report.result("levels", levels);
            report.result("links", links);
            Ok(())
        }
    }
}

fn axiom_json(rep: &AxiomReport) -> Value {
    Value::Array(
        rep.checks
            .iter()
            .map(|c| {
                let mut o = json!({ "axiom": c.axiom, "name": c.name, "status": c.status.to_string(), "cases": c.cases });
                if let Some(ce) = &c.counterexample {
                    o["counterexample"] = json!(ce);
                }
                o
            })
            .collect(),
    )
}

fn components(s: &str) -> Run<Vec<BigRational>> {
    s.split(',')
        .map(|c| parse_rational(c).ok_or_else(|| Usage(format!("cannot read Witt component '{}'", c.trim())).into()))
        .collect()
}

fn padded(s: &str, m: usize) -> Run<Vec<BigRational>> {
    let mut v = components(s)?;
    if v.len() > m {
        return Err(Usage(format!("{} components given for length {m}", v.len())).into());
    }
    v.resize(m, BigRational::from_integer(0.into()));
    Ok(v)
}

fn witt(op: &WittOp, report: &mut Report) -> Run<()> {
    let (args, kind) = match op {
        WittOp::Add(a) => (a, "add"),
        WittOp::Mul(a) => (a, "mul"),
        WittOp::Ghost(a) => (a, "ghost"),
    };
    report.config("p", args.p);
    report.config("m", args.m);
    report.config("over", if args.over == Base::Q { "Q" } else { "F_p" });
    let x = padded(&args.x, args.m)?;
    let y = match (&args.y, kind) {
        (Some(s), _) => Some(padded(s, args.m)?),
        (None, "ghost") => None,
        (None, _) => return Err(Usage(format!("witt {kind} needs --y")).into()),
    };
    if kind != "ghost" && args.m > 1 {
        let deg = args.p.checked_pow(args.m as u32 - 1);
        if deg.is_none_or(|d| d > MAX_WITT_DEGREE) {
            return Err(Error::Unsupported(format!(
                "universal Witt polynomials of weighted degree p^(m-1) = {}^{} exceed the supported bound {MAX_WITT_DEGREE}",
                args.p,
                args.m - 1
            ))
            .into());
        }
    }
    match args.over {
        Base::Q => {
            let xv = WittVector::new(args.p, (), x)?;
            report.result("x", comps_json(&xv));
            let out = match (kind, &y) {
                ("ghost", _) => {
                    report.result("ghost", Value::Array(xv.ghost()?.iter().map(rational_json).collect()));
                    return Ok(());
                }
                ("add", Some(y)) => xv.add(&WittVector::new(args.p, (), y.clone())?)?,
                (_, Some(y)) => xv.mul(&WittVector::new(args.p, (), y.clone())?)?,
                _ => unreachable!("--y checked above"),
            };
            report.result("y", comps_json(&WittVector::new(args.p, (), y.unwrap())?));
            report.result("result", comps_json(&out));
            report.result("ghost", Value::Array(out.ghost()?.iter().map(rational_json).collect()));
        }
        Base::Fp => {
            let md = Modulus::new(args.p, 1)?;
            let to_fp = |v: &[BigRational]| -> Run<WittVector<ModInt>> {
                let comps = v.iter().map(|q| ModInt::from_rational(&md, q)).collect::<Result<Vec<_>, _>>()?;
                Ok(WittVector::new(args.p, md, comps)?)
            };
            let xv = to_fp(&x)?;
            report.result("x", comps_json(&xv));
            let out = match (kind, &y) {
                ("ghost", _) => {
                    xv.ghost()?;
                    unreachable!("ghost over F_p is refused by the library")
                }
                ("add", Some(y)) => xv.add(&to_fp(y)?)?,
                (_, Some(y)) => xv.mul(&to_fp(y)?)?,
                _ => unreachable!("--y checked above"),
            };
            report.result("y", comps_json(&to_fp(y.as_ref().unwrap())?));
            report.result("result", comps_json(&out));
            if !out.is_empty() {
                report.result("zpm", witt_to_zpm(&out)?.to_json());
            }
        }
    }
    Ok(())
}

fn comps_json<C: ToJson>(v: &WittVector<C>) -> Value {
    Value::Array(v.components().iter().map(|c| c.to_json()).collect())
}

