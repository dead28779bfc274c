//! Corpora and per-function checks of each campaign.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Campaign, CampaignConfig, CaseResult};
use crate::equipartition::equipartition_map;
use crate::error::{Error, Result};
use crate::functions::named::parse_named;
use crate::functions::{make_named, random_fn, Base, Ext, PLConcaveFn, PLConvexFn, RandomKind, SConcaveFn};
use crate::geometry::rational::*;
use crate::integrals::{bipolar_deficit, bipolar_deficit_mu, half_integrals, p_m, q_m};
use crate::lifted::{
    lifted_volume, mc_volume, partition_report, random_grid_point, santalo_product, santalo_via_functional, Family,
    FiberNorm, LiftedBodySpec, SectionStatus,
};
use crate::transforms::{l_transform, l_vertex_formula, m_transform, m_vertex_formula};

pub(super) struct Item {
    seed: u64,
    source: String,
    planted: bool,
    f: Result<Base>,
}

const MAPS_PER_FUNCTION: usize = 20;
const SAMPLE_POINTS: usize = 100;
const SECTION_POINTS: usize = 50;
/// Monte Carlo agreement threshold in standard errors.
const MC_SIGMAS: f64 = 4.0;

/// Invertible rational matrix with entries `p/q`, `|p| <= 3`, `q <= 2`.
pub fn random_linear_map(rng: &mut impl Rng, n: usize) -> Matrix {
    loop {
        let t: Matrix = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| Q::new(BigInt::from(rng.gen_range(-3i64..=3)), BigInt::from(rng.gen_range(1i64..=2))))
                    .collect()
            })
            .collect();
        if !det(&t).is_zero() {
            return t;
        }
    }
}

fn case_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(i as u64)
}

fn named(n: usize, s: &str) -> Result<Base> {
    make_named(n, &parse_named(n, s)?)
}

fn planted(c: Campaign, n: usize) -> Vec<(String, Result<Base>)> {
    let names: &[&str] = match c {
        Campaign::Dim1Monotone => &["indicator", "tent", "indicator:2", "tent:1/2"],
        Campaign::Dim2P => &["indicator", "tent:l1", "indicator:3/2"],
        Campaign::Dim2QClassF => &["max-one-norm:inf", "one-plus-norm:l1", "max-one-norm:l1"],
        Campaign::Dim1Q => &["const-plus-indicator:1", "one-plus-norm", "max-one-norm", "const-plus-indicator:2:3"],
        Campaign::Dim1Bipolar => &["const-plus-indicator:1", "const-plus-indicator:2:3", "const-plus-indicator:1/2:1/3"],
        Campaign::Invariance | Campaign::LiftedConsistency => &["indicator", "max-one-norm"],
        Campaign::DualityInvolutions => &["indicator", "tent", "max-one-norm", "const-plus-indicator:1"],
        Campaign::EquipartitionSuite => &["indicator", "tent:l1"],
    };
    let mut out: Vec<(String, Result<Base>)> = names.iter().map(|s| (s.to_string(), named(n, s))).collect();
    if c == Campaign::Dim2P {
        // a sheared square is still an equality case
        let t = vec![pt(&[2, 1]), pt(&[0, 1])];
        out.push(("indicator∘T".into(), named(n, "indicator").and_then(|f| f.apply_linear(&t))));
    }
    out
}

fn random_kind(c: Campaign, i: usize) -> RandomKind {
    match c {
        Campaign::Dim1Monotone | Campaign::Dim2P | Campaign::EquipartitionSuite => RandomKind::Concave,
        Campaign::Dim2QClassF => RandomKind::ClassF,
        Campaign::Dim1Q | Campaign::Dim1Bipolar => RandomKind::ConvexCoercive,
        Campaign::Invariance | Campaign::LiftedConsistency => {
            [RandomKind::Concave, RandomKind::ClassF][i % 2]
        }
        Campaign::DualityInvolutions => [RandomKind::Concave, RandomKind::ClassF, RandomKind::ConvexCoercive][i % 3],
    }
}

pub(super) fn corpus(cfg: &CampaignConfig) -> Result<Vec<Item>> {
    let mut items: Vec<Item> = planted(cfg.campaign, cfg.n)
        .into_iter()
        .map(|(name, f)| Item { seed: cfg.seed, source: format!("planted {name}"), planted: true, f })
        .collect();
    for i in 0..cfg.count {
        let seed = case_seed(cfg.seed, i);
        let kind = random_kind(cfg.campaign, i);
        let k = 1 + (seed % 3) as usize;
        let source = format!("random {kind:?} k={k}");
        items.push(Item { seed, source, planted: false, f: random_fn(seed, kind, cfg.n, k) });
    }
    Ok(items)
}

fn attempt(check: &str, m: u32, n: usize, f: impl FnOnce() -> Result<Vec<CaseResult>>) -> Vec<CaseResult> {
    f().unwrap_or_else(|e| vec![CaseResult::error(check, m, n, &e)])
}

pub(super) fn run_item(cfg: &CampaignConfig, index: usize, item: &Item) -> Vec<CaseResult> {
    let start = Instant::now();
    let n = cfg.n;
    let mut rows = match &item.f {
        Err(e) => vec![CaseResult::error("generate", cfg.m_range.0, n, e)],
        Ok(f) => match cfg.campaign {
            Campaign::Dim1Monotone => monotone(cfg, f),
            Campaign::Dim2P => ms(cfg).flat_map(|m| attempt("P_m", m, n, || Ok(vec![CaseResult::product(&p_m(concave(f)?, m)?, m)]))).collect(),
            Campaign::Dim2QClassF | Campaign::Dim1Q => {
                ms(cfg).flat_map(|m| attempt("Q_m", m, n, || Ok(vec![CaseResult::product(&q_m(convex(f)?, m)?, m)]))).collect()
            }
            Campaign::Dim1Bipolar => bipolar(cfg, f),
            Campaign::Invariance => invariance(cfg, f, item.seed),
            Campaign::DualityInvolutions => involutions(f, item.seed),
            Campaign::LiftedConsistency => lifted(cfg, f, item.seed),
            Campaign::EquipartitionSuite => equipartition(cfg, f),
        },
    };
    let ms_elapsed = if cfg.timings { start.elapsed().as_millis() as u64 } else { 0 };
    for r in &mut rows {
        r.function_index = index;
        r.seed = item.seed;
        r.source = item.source.clone();
        r.planted = item.planted;
        r.runtime_ms = ms_elapsed;
    }
    rows
}

fn ms(cfg: &CampaignConfig) -> impl Iterator<Item = u32> {
    cfg.m_range.0..=cfg.m_range.1
}

fn concave(f: &Base) -> Result<&PLConcaveFn> {
    match f {
        Base::Concave(g) => Ok(g),
        Base::Convex(_) => Err(Error::InvalidInput("expected a concave function".into())),
    }
}

fn convex(f: &Base) -> Result<&PLConvexFn> {
    match f {
        Base::Convex(g) => Ok(g),
        Base::Concave(_) => Err(Error::InvalidInput("expected a convex function".into())),
    }
}

fn monotone(cfg: &CampaignConfig, f: &Base) -> Vec<CaseResult> {
    let mut rows = Vec::new();
    let mut prev: Option<Q> = None;
    for m in ms(cfg) {
        rows.extend(attempt("I_m J_m", m, 1, || {
            let g = concave(f)?;
            let (i, j) = half_integrals(g, m)?;
            let prod = i * j;
            let mut out = vec![
                CaseResult::product(&p_m(g, m)?, m),
                CaseResult::inequality("I_m J_m >= 1", m, 1, prod.clone(), Q::one()),
            ];
            if let Some(p) = prev.take() {
                let (mq, mq1) = (q(m as i64), q(m as i64 - 1));
                out.push(CaseResult::inequality(
                    "(m+1)^2 P_m - 4m non-decreasing",
                    m,
                    1,
                    q(4) * &prod - q(4) * mq,
                    q(4) * &p - q(4) * mq1,
                ));
                out.push(CaseResult::inequality("I_{m-1} J_{m-1} <= I_m J_m - 1", m, 1, &prod - Q::one(), p));
            }
            prev = Some(prod);
            Ok(out)
        }));
    }
    rows
}

/// `f = c + I_P`: constant on a bounded domain.
fn is_const_plus_indicator(f: &PLConvexFn) -> bool {
    let c = Ext::Finite(f.min_value());
    f.domain().is_some_and(|d| d.vertices().iter().all(|v| f.eval(v) == c))
}

fn bipolar(cfg: &CampaignConfig, f: &Base) -> Vec<CaseResult> {
    ms(cfg)
        .flat_map(|m| {
            attempt("bipolar", m, 1, || {
                let g = convex(f)?;
                let expected = is_const_plus_indicator(g);
                let reports = [bipolar_deficit(&SConcaveFn::convex(g.clone(), m)?)?, bipolar_deficit_mu(g, m)?];
                Ok(reports
                    .iter()
                    .map(|r| {
                        let mut row = CaseResult::product(r, m);
                        row.passed = r.holds() && r.equality == expected;
                        row.with_detail(format!("equality expected: {expected}"))
                    })
                    .collect())
            })
        })
        .collect()
}

fn invariance(cfg: &CampaignConfig, f: &Base, seed: u64) -> Vec<CaseResult> {
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let maps: Vec<Matrix> = (0..MAPS_PER_FUNCTION).map(|_| random_linear_map(&mut rng, n)).collect();
    let mut rows = Vec::new();
    for m in ms(cfg) {
        rows.extend(attempt("invariance", m, n, || {
            let mut out = Vec::new();
            match f {
                Base::Concave(g) => {
                    let base = p_m(g, m)?.lhs;
                    let lg = l_transform(g)?;
                    for t in &maps {
                        let gt = g.apply_linear(t)?;
                        out.push(CaseResult::equal_values("P_m(f∘T) = P_m(f)", m, n, p_m(&gt, m)?.lhs, base.clone()));
                        let dual = inverse(&transpose(t))?;
                        out.push(CaseResult::identity("L(f∘T) = (Lf)∘T^-T", m, n, l_transform(&gt)? == lg.apply_linear(&dual)?));
                    }
                }
                Base::Convex(g) => {
                    let mq = m + n as u32;
                    let base = q_m(g, mq)?.lhs;
                    for t in &maps {
                        let gt = g.apply_linear(t)?;
                        out.push(CaseResult::equal_values("Q_m(f∘T) = Q_m(f)", mq, n, q_m(&gt, mq)?.lhs, base.clone()));
                    }
                }
            }
            Ok(out)
        }));
    }
    rows
}

fn involutions(f: &Base, seed: u64) -> Vec<CaseResult> {
    let n = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    attempt("involutions", 1, n, || {
        let mut out = Vec::new();
        match f {
            Base::Concave(g) => {
                let lg = l_transform(g)?;
                out.push(CaseResult::identity("L L f = f", 1, n, &l_transform(&lg)? == g));
                let polar = g.support().polar()?;
                out.push(CaseResult::identity("supp Lf = (supp f)°", 1, n, lg.support() == &polar));
                let (lo, hi) = polar.bounding_box();
                let r = lo.iter().chain(&hi).map(|x| x.abs()).max().unwrap_or_else(Q::one) * qr(5, 4);
                let agree = (0..SAMPLE_POINTS).all(|_| {
                    let y = random_grid_point(&mut rng, n, &r);
                    l_vertex_formula(g, &y) == lg.eval(&y)
                });
                out.push(CaseResult::identity("L vertex formula = polar route (100 points)", 1, n, agree));
            }
            Base::Convex(g) => {
                let mg = m_transform(g)?;
                let mmg = m_transform(&mg)?;
                if g.check_class_f().passes() {
                    out.push(CaseResult::identity("M M f = f (class F)", 1, n, &mmg == g));
                }
                out.push(CaseResult::identity("M M M f = M f", 1, n, m_transform(&mmg)? == mg));
                let agree = (0..SAMPLE_POINTS).all(|_| {
                    let y = random_grid_point(&mut rng, n, &q(3));
                    Ext::Finite(m_vertex_formula(g, &y)) == mg.eval(&y)
                });
                out.push(CaseResult::identity("M vertex formula = polar route (100 points)", 1, n, agree));
            }
        }
        Ok(out)
    })
}

fn lifted_rows(spec: &LiftedBodySpec, samples: u64, rng: &mut ChaCha8Rng) -> Result<Vec<CaseResult>> {
    let (m, n) = (spec.m, spec.n());
    let r = santalo_product(spec)?;
    let mut out = vec![
        CaseResult::product(&r, m),
        CaseResult::equal_values("santalo via P_m / Q_m", m, n, santalo_via_functional(spec)?, r.lhs.clone()),
    ];
    if let Ok(section) = spec.fiber_section() {
        let radius = q(3);
        let d = spec.ambient_dim() as usize;
        let mut agree = true;
        for _ in 0..SECTION_POINTS {
            let z = random_grid_point(rng, d - 1, &radius);
            let mut full = z.clone();
            full.insert(n, Q::zero());
            agree &= section.contains(&z)? == spec.contains(&full)?;
        }
        out.push(CaseResult::identity("section t_1 = 0 is the lift with m - 1 fibers", m, n, agree));
    }
    if samples > 0 && spec.ambient_dim() <= 6 {
        let exact = to_f64(&lifted_volume(spec)?);
        let (est, se) = mc_volume(spec, samples, rng.gen())?;
        let sigmas = if se > 0.0 { (est - exact).abs() / se } else { (est - exact).abs() };
        out.push(
            CaseResult::residual("Monte Carlo volume (standard errors)", m, n, sigmas, MC_SIGMAS)
                .with_detail(format!("estimate {est:.6} ± {se:.2e}, exact {exact:.6}")),
        );
    }
    Ok(out)
}

fn lifted(cfg: &CampaignConfig, f: &Base, seed: u64) -> Vec<CaseResult> {
    let n = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    match f {
        Base::Concave(_) => {
            for m in ms(cfg) {
                let fiber = if m % 2 == 0 { FiberNorm::LInf } else { FiberNorm::L1 };
                rows.extend(attempt("santalo K-body", m, n, || {
                    let spec = LiftedBodySpec::new(Family::KBody, f.clone(), m, fiber)?;
                    lifted_rows(&spec, cfg.samples, &mut rng)
                }));
            }
        }
        Base::Convex(_) => {
            for m in [n as u32 + 1, n as u32 + 2] {
                rows.extend(attempt("santalo C-body", m, n, || {
                    let spec = LiftedBodySpec::new(Family::CBody, f.clone(), m, FiberNorm::LInf)?;
                    lifted_rows(&spec, cfg.samples, &mut rng)
                }));
            }
        }
    }
    rows
}

fn equipartition(cfg: &CampaignConfig, f: &Base) -> Vec<CaseResult> {
    let n = f.n();
    ms(cfg)
        .flat_map(|m| {
            attempt("equipartition", m, n, || {
                let e = equipartition_map(f, m as f64, cfg.tol)?;
                let p = partition_report(f, m, Family::KBody, Some(&e.t), cfg.tol)?;
                let max = |j: usize| p.residuals[j].iter().copied().fold(0.0, f64::max);
                let detail = p
                    .section_products
                    .iter()
                    .map(|r| format!("{}: margin {}", r.context, fmt_q(&r.margin)))
                    .collect::<Vec<_>>()
                    .join("; ");
                let c_ok = p.sections_mahler != SectionStatus::Failed;
                let mut b = CaseResult::residual("(b) coordinate sections split equally", m, n, max(1), cfg.tol);
                b.passed &= p.even;
                Ok(vec![
                    CaseResult::residual("equipartition residual", m, n, e.report.max_residual, cfg.tol)
                        .with_detail(format!("u = {:?}, v = {:?}", e.u, e.v)),
                    CaseResult::residual("(a) orthant volumes equal", m, n, max(0), cfg.tol),
                    b,
                    CaseResult::identity("(c) section Mahler products", m, n, c_ok).with_detail(detail),
                ])
            })
        })
        .collect()
}
