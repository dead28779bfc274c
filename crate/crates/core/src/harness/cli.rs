//! `sck` command line: `transform`, `product`, `mu`, `lift`, `equipartition`,
//! `verify` and `demo`.
//!
//! Exit codes: 0 on success, 1 when a theorem-scope check fails, 2 on
//! invalid input or a pipeline error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use super::{parse_m_range, run_campaign, Campaign, CampaignConfig, Format, GridFn};
use crate::equipartition::{equipartition_map, snap_frame};
use crate::error::{Error, Result};
use crate::functions::json::{base_to_json, parse_fn, sfn_to_json, to_string};
use crate::functions::named::parse_named;
use crate::functions::{make_named, Base, SConcaveFn};
use crate::geometry::rational::*;
use crate::integrals::{
    bipolar_deficit_mu, inverse_power_integral, mu_m, p_m, q_m, volume_product, volume_product_f64, ProductReport,
    Scope,
};
use crate::lifted::{
    lifted_volume, mc_volume, partition_report, santalo_product, santalo_via_functional, Family, FiberNorm,
    LiftedBodySpec,
};
use crate::transforms::{bipolar, l_transform, ls_transform, m_transform, perspective_body};

#[derive(Parser, Debug)]
#[command(name = "sck", version, about = "Exact s-polarity transforms and functional volume products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Function JSON file.
    #[arg(long = "in", value_name = "PATH", conflicts_with = "named")]
    input: Option<PathBuf>,
    /// A named function instead of a file, e.g. `indicator`, `tent:l1`, `max-one-norm:inf`.
    #[arg(long, value_name = "NAME")]
    named: Option<String>,
    /// Dimension for `--named`.
    #[arg(long, default_value_t = 2)]
    n: usize,
}

#[derive(Args, Debug, Clone)]
struct Output {
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// `text` or `json` (`csv` for `verify`).
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    #[value(name = "L")]
    L,
    #[value(name = "M")]
    M,
    #[value(name = "Ls")]
    Ls,
    #[value(name = "bipolar")]
    Bipolar,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FiberArg {
    #[value(name = "inf")]
    Inf,
    #[value(name = "1")]
    One,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply `L`, `M`, `L_s` or `L_s L_s` and write the result as JSON.
    Transform {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        op: Op,
        /// Exponent for `Ls` and `bipolar` when the input carries none.
        #[arg(long)]
        m: Option<String>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// `P_m` or `Q_m` of the base function and the volume product of `f^{±m}`.
    Product {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        m: Option<String>,
        /// Floating-point mode; required for non-integer `m`.
        #[arg(long)]
        float: bool,
        #[command(flatten)]
        output: Output,
    },
    /// `μ_m` of the perspective body and of its hull.
    Mu {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Volumes and volume product of a lifted body.
    Lift {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum, default_value = "inf")]
        fiber: FiberArg,
        /// Monte Carlo samples (0 skips the estimate).
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Search a basis making `f ∘ T` equipartitioned and check the partition hypotheses.
    Equipartition {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        m: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Run a seeded campaign and write its report.
    Verify {
        #[arg(long)]
        campaign: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inclusive range `a..b`.
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Record wall-clock times in `runtime_ms`.
        #[arg(long)]
        timings: bool,
    },
    /// Log-concave limit on a grid-sampled Gaussian.
    Demo {
        /// Comma-separated exponents.
        #[arg(long, default_value = "1,2,4,8,16,32,64,128")]
        m: String,
        #[arg(long, default_value_t = 0.2)]
        step: f64,
        #[arg(long, default_value_t = 30)]
        half: usize,
        #[command(flatten)]
        output: Output,
    },
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(parsed.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load(input: &Input) -> Result<(Base, Option<Q>)> {
    match (&input.input, &input.named) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("bad JSON: {e}")))?;
            parse_fn(&v)
        }
        (None, Some(name)) => Ok((make_named(input.n, &parse_named(input.n, name)?)?, None)),
        (None, None) => Err(Error::InvalidInput("give --in PATH or --named NAME".into())),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_mode(format: &str) -> Result<bool> {
    match format {
        "text" => Ok(false),
        "json" => Ok(true),
        other => Err(Error::InvalidInput(format!("unknown format {other:?}"))),
    }
}

fn report_json(r: &ProductReport) -> Value {
    json!({
        "context": r.context,
        "n": r.n,
        "m": fmt_q(&r.m),
        "lhs": fmt_q(&r.lhs),
        "lhs_approx": to_f64(&r.lhs),
        "bound": fmt_q(&r.bound),
        "bound_approx": to_f64(&r.bound),
        "margin": fmt_q(&r.margin),
        "equality": r.equality,
        "holds": r.holds(),
        "scope": r.scope,
    })
}

fn theorem_ok(reports: &[&ProductReport]) -> bool {
    reports.iter().all(|r| r.holds() || r.scope == Scope::Conjecture)
}

fn pick_m(flag: &Option<String>, carried: Option<Q>) -> Result<Q> {
    match flag {
        Some(s) => parse_q(s),
        None => carried.ok_or_else(|| Error::InvalidInput("give --m".into())),
    }
}

fn integer_m(m: &Q) -> Option<u32> {
    if m.is_integer() {
        m.to_integer().to_u32()
    } else {
        None
    }
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Transform { input, op, m, out } => {
            let (f, carried) = load(&input)?;
            let text = match op {
                Op::L => match &f {
                    Base::Concave(g) => to_string(&base_to_json(&Base::Concave(l_transform(g)?), None)),
                    Base::Convex(_) => return Err(Error::InvalidInput("L acts on concave functions".into())),
                },
                Op::M => match &f {
                    Base::Convex(g) => to_string(&base_to_json(&Base::Convex(m_transform(g)?), None)),
                    Base::Concave(_) => return Err(Error::InvalidInput("M acts on convex functions".into())),
                },
                Op::Ls | Op::Bipolar => {
                    let g = SConcaveFn::new(f, pick_m(&m, carried)?)?;
                    let h = if op == Op::Ls { ls_transform(&g)? } else { bipolar(&g)? };
                    to_string(&sfn_to_json(&h))
                }
            };
            emit(&out, &(text + "\n"))?;
            Ok(true)
        }
        Command::Product { input, m, float, output } => {
            let as_json = json_mode(&output.format)?;
            let (f, carried) = load(&input)?;
            let m = pick_m(&m, carried)?;
            let g = SConcaveFn::new(f.clone(), m.clone())?;
            match (integer_m(&m), float) {
                (Some(k), false) => {
                    let base = match &f {
                        Base::Concave(h) => p_m(h, k)?,
                        Base::Convex(h) => q_m(h, k)?,
                    };
                    let vp = volume_product(&g)?;
                    let text = if as_json {
                        to_string(&json!({"base": report_json(&base), "volume_product": report_json(&vp)})) + "\n"
                    } else {
                        format!("{base}\n{vp}\n")
                    };
                    emit(&output.out, &text)?;
                    Ok(theorem_ok(&[&base, &vp]))
                }
                _ => {
                    let r = volume_product_f64(&g)?;
                    let text = if as_json {
                        to_string(&serde_json::to_value(&r).expect("serializable")) + "\n"
                    } else {
                        format!("{r}\n")
                    };
                    emit(&output.out, &text)?;
                    Ok(r.margin >= -1e-9 * r.bound || r.scope == Scope::Conjecture)
                }
            }
        }
        Command::Mu { input, m, output } => {
            let as_json = json_mode(&output.format)?;
            let (f, _) = load(&input)?;
            let Base::Convex(h) = f else {
                return Err(Error::InvalidInput("μ_m is defined through convex functions".into()));
            };
            let body = perspective_body(&h)?;
            let mu = inverse_power_integral(&h, m)?;
            let mu_hull = mu_m(&body.hull(), m, h.n())?;
            let r = bipolar_deficit_mu(&h, m)?;
            let text = if as_json {
                to_string(&json!({
                    "mu_body": fmt_q(&mu),
                    "mu_hull": fmt_q(&mu_hull),
                    "body_convex": body.convex,
                    "bipolar": report_json(&r),
                })) + "\n"
            } else {
                format!(
                    "mu_m(C_1 f) = int f^-m = {} ~ {:.12}\nmu_m(Conv C_1 f) = {} ~ {:.12}\nC_1 f convex: {}\n{r}\n",
                    fmt_q(&mu),
                    to_f64(&mu),
                    fmt_q(&mu_hull),
                    to_f64(&mu_hull),
                    body.convex
                )
            };
            emit(&output.out, &text)?;
            Ok(theorem_ok(&[&r]))
        }
        Command::Lift { input, m, fiber, samples, seed, output } => {
            let as_json = json_mode(&output.format)?;
            let (f, _) = load(&input)?;
            let family = match f {
                Base::Concave(_) => Family::KBody,
                Base::Convex(_) => Family::CBody,
            };
            let fiber = match fiber {
                FiberArg::Inf => FiberNorm::LInf,
                FiberArg::One => FiberNorm::L1,
            };
            let spec = LiftedBodySpec::new(family, f, m, fiber)?;
            let volume = lifted_volume(&spec)?;
            let polar_volume = lifted_volume(&spec.polar()?)?;
            let r = santalo_product(&spec)?;
            let routes_agree = santalo_via_functional(&spec)? == r.lhs;
            let mc = if samples > 0 { Some(mc_volume(&spec, samples, seed)?) } else { None };
            let text = if as_json {
                to_string(&json!({
                    "family": family,
                    "fiber": fiber,
                    "ambient_dim": spec.ambient_dim(),
                    "volume": fmt_q(&volume),
                    "polar_volume": fmt_q(&polar_volume),
                    "santalo": report_json(&r),
                    "routes_agree": routes_agree,
                    "monte_carlo": mc.map(|(e, s)| json!({"estimate": e, "stderr": s, "samples": samples, "seed": seed})),
                })) + "\n"
            } else {
                let mut t = format!(
                    "{family:?} {fiber:?} in dimension {}\nvolume = {} ~ {:.12}\npolar volume = {} ~ {:.12}\n{r}\nroutes agree: {routes_agree}\n",
                    spec.ambient_dim(),
                    fmt_q(&volume),
                    to_f64(&volume),
                    fmt_q(&polar_volume),
                    to_f64(&polar_volume)
                );
                if let Some((e, s)) = mc {
                    t.push_str(&format!("Monte Carlo ({samples} samples, seed {seed}): {e:.6} ± {s:.2e}\n"));
                }
                t
            };
            emit(&output.out, &text)?;
            Ok(theorem_ok(&[&r]) && routes_agree)
        }
        Command::Equipartition { input, m, tol, output } => {
            let as_json = json_mode(&output.format)?;
            let (f, _) = load(&input)?;
            let mq = parse_q(&m)?;
            if !mq.is_positive() {
                return Err(Error::BadParams("m must be positive".into()));
            }
            let e = equipartition_map(&f, to_f64(&mq), tol)?;
            let family = match f {
                Base::Concave(_) => Family::KBody,
                Base::Convex(_) => Family::CBody,
            };
            let checks = match integer_m(&mq) {
                Some(k) => Some((snap_frame(&f, k, &e.t)?, partition_report(&f, k, family, Some(&e.t), tol)?)),
                None => None,
            };
            let ok = checks.as_ref().map_or(true, |(_, p)| p.passes());
            let text = if as_json {
                to_string(&json!({
                    "t": e.t,
                    "u": e.u,
                    "v": e.v,
                    "report": e.report,
                    "scan_steps": e.scan_steps,
                    "bisection_steps": e.bisection_steps,
                    "snapped": checks.as_ref().map(|(s, _)| json!({
                        "t": s.t.iter().map(|r| r.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>(),
                        "max_exact_residual": s.max_residual,
                    })),
                    "hypotheses": checks.as_ref().map(|(_, p)| json!({
                        "residuals": p.residuals,
                        "orthants_equal": p.orthants_equal,
                        "sections_equal": p.sections_equal,
                        "sections_mahler": format!("{:?}", p.sections_mahler),
                        "section_products": p.section_products.iter().map(report_json).collect::<Vec<_>>(),
                        "violated": p.violated,
                    })),
                })) + "\n"
            } else {
                let mut t = format!(
                    "u = [{:.15}, {:.15}]\nv = [{:.15}, {:.15}]\nmax residual = {:.3e} ({} scan, {} bisection steps)\n",
                    e.u[0], e.u[1], e.v[0], e.v[1], e.report.max_residual, e.scan_steps, e.bisection_steps
                );
                if let Some((s, p)) = &checks {
                    t.push_str(&format!("snapped T exact max residual = {:.3e}\n", s.max_residual));
                    t.push_str(&format!(
                        "(a) orthants equal: {}\n(b) sections split equally: {}\n(c) section Mahler products: {:?}\n",
                        p.orthants_equal, p.sections_equal, p.sections_mahler
                    ));
                    for r in &p.section_products {
                        t.push_str(&format!("    {r}\n"));
                    }
                }
                t
            };
            emit(&output.out, &text)?;
            Ok(ok)
        }
        Command::Verify { campaign, count, seed, m, n, tol, samples, format, out, timings } => {
            let campaign: Campaign = campaign.parse()?;
            let format: Format = format.parse()?;
            let mut cfg = CampaignConfig::new(campaign);
            cfg.count = count;
            cfg.seed = seed;
            if let Some(r) = m {
                cfg.m_range = parse_m_range(&r)?;
            }
            if let Some(n) = n {
                cfg.n = n;
            }
            cfg.tol = tol;
            cfg.samples = samples;
            cfg.format = format;
            cfg.out = out.clone();
            cfg.timings = timings;
            let report = run_campaign(&cfg)?;
            emit(&out, &report.render(format))?;
            let s = &report.summary;
            eprintln!(
                "{}: {} checks on {} functions, {} theorem failures, {} conjecture failures, {} errors, min margin {}",
                campaign,
                s.checks,
                s.functions,
                s.theorem_failures,
                s.conjecture_failures,
                s.errors,
                s.min_margin.as_ref().map_or("n/a".to_string(), fmt_q)
            );
            if s.errors > 0 {
                return Err(Error::InvalidInput(format!("{} checks raised errors", s.errors)));
            }
            Ok(report.ok())
        }
        Command::Demo { m, step, half, output } => {
            let as_json = json_mode(&output.format)?;
            let ms: Vec<u32> = m
                .split(',')
                .map(|s| s.trim().parse::<u32>().map_err(|_| Error::InvalidInput(format!("bad exponent {s:?}"))))
                .collect::<Result<_>>()?;
            let t = super::log_concave_demo(&GridFn::gaussian(step, half), &ms)?;
            let text = if as_json {
                to_string(&serde_json::to_value(&t).expect("serializable")) + "\n"
            } else {
                let mut s = format!(
                    "Gaussian on [-{h}, {h}]^2, step {step}; approximate, tolerance {:.0e}\n{:>5} {:>14} {:>14} {:>14} {:>14}\n",
                    t.tolerance,
                    "m",
                    "int f_m",
                    "int L f_m",
                    "product",
                    "bound",
                    h = t.half_width
                );
                for r in &t.rows {
                    s.push_str(&format!(
                        "{:>5} {:>14.9} {:>14.9} {:>14.9} {:>14.9}\n",
                        r.m, r.integral_fm, r.integral_dual, r.product, r.bound
                    ));
                }
                s.push_str(&format!(
                    "int f = {:.9}, int f° = {:.9}, limit product = {:.9}\nmonotone: {}, final gap = {:.3e}\n",
                    t.integral_f, t.integral_polar, t.limit_product, t.monotone, t.final_gap
                ));
                s
            };
            emit(&output.out, &text)?;
            Ok(t.rows.iter().all(|r| r.above_bound))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_and_product_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("f.json");
        let mf = dir.path().join("mf.json");
        let base = make_named(2, &parse_named(2, "max-one-norm").unwrap()).unwrap();
        std::fs::write(&f, to_string(&base_to_json(&base, Some(&q(4))))).unwrap();
        let code = cli(["sck", "transform", "--in", f.to_str().unwrap(), "--op", "M", "--out", mf.to_str().unwrap()]);
        assert_eq!(code, 0);
        let (g, _) = parse_fn(&serde_json::from_str(&std::fs::read_to_string(&mf).unwrap()).unwrap()).unwrap();
        assert_eq!(g, make_named(2, &parse_named(2, "one-plus-norm:l1").unwrap()).unwrap());
        let out = dir.path().join("p.json");
        let code = cli(["sck", "product", "--in", f.to_str().unwrap(), "--format", "json", "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(v["base"]["equality"], json!(true));
    }

    #[test]
    fn invalid_input_exits_two() {
        assert_eq!(cli(["sck", "product", "--named", "nonsense", "--m", "2"]), 2);
        assert_eq!(cli(["sck", "verify", "--campaign", "nope"]), 2);
        assert_eq!(cli(["sck", "lift", "--named", "indicator", "--m", "2", "--fiber", "7"]), 2);
    }
}
