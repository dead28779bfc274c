//! Acceptance run. Prints one line per criterion and exits non-zero if a
//! blocking criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sck::functions::named::parse_named;
use sck::functions::{make_named, random_fn, Base, RandomKind, SConcaveFn};
use sck::geometry::{integrate_affine_power, pt, q, qr, to_f64, Affine, Simplex, Q};
use sck::harness::{log_concave_demo, run_campaign, Campaign, CampaignConfig, CampaignReport, GridFn};
use sck::integrals::{p_m, q_m, volume_product};
use sck::lifted::{
    lifted_volume, mahler_bound, mc_volume, partition_report, santalo_product, Family, FiberNorm, LiftedBodySpec,
};

fn named(n: usize, s: &str) -> Base {
    make_named(n, &parse_named(n, s).unwrap()).unwrap()
}

fn concave(b: Base) -> sck::functions::PLConcaveFn {
    match b {
        Base::Concave(f) => f,
        Base::Convex(_) => panic!("expected a concave function"),
    }
}

fn convex(b: Base) -> sck::functions::PLConvexFn {
    match b {
        Base::Convex(f) => f,
        Base::Concave(_) => panic!("expected a convex function"),
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

fn equality_constants() -> Outcome {
    let mut bad = Vec::new();
    let mut count = 0;
    let mut expect = |label: String, got: Q, want: Q| {
        count += 1;
        if got != want {
            bad.push(format!("{label}: got {got}, want {want}"));
        }
    };
    let square = concave(named(2, "indicator"));
    for m in 1..=6u32 {
        let mq = q(m as i64);
        expect(format!("P_{m}(1_[-1,1]^2)"), p_m(&square, m).unwrap().lhs, q(16) / ((&mq + q(1)) * (&mq + q(2))));
    }
    let segment = concave(named(1, "indicator"));
    let tent = concave(named(1, "tent"));
    for m in 1..=8u32 {
        let want = q(4) / q(m as i64 + 1);
        expect(format!("P_{m}(1_[-1,1])"), p_m(&segment, m).unwrap().lhs, want.clone());
        expect(format!("P_{m}(tent)"), p_m(&tent, m).unwrap().lhs, want);
    }
    let cpi = convex(named(1, "const-plus-indicator:1"));
    let opn = convex(named(1, "one-plus-norm"));
    for m in 2..=8u32 {
        let mq = q(m as i64);
        expect(format!("Q_{m}(1+I)"), q_m(&cpi, m).unwrap().lhs, q(4) / (&mq - q(1)));
        let d = &mq - q(1);
        expect(format!("Q_{m}(1+|x|)"), q_m(&opn, m).unwrap().lhs, q(4) * &mq / (&d * &d));
    }
    let mon = convex(named(2, "max-one-norm:inf"));
    for m in 3..=8u32 {
        let mq = q(m as i64);
        let d = &mq - q(2);
        let want = q(16) * &mq / ((&mq - q(1)) * &d * &d);
        expect(format!("Q_{m}(max(1,|x|_inf))"), q_m(&mon, m).unwrap().lhs, want);
        let s = -Q::new(1.into(), m.into());
        let one_2s = q(1) + q(2) * &s;
        let want = q(16) / ((q(1) + &s) * &one_2s * &one_2s);
        let g = SConcaveFn::convex(mon.clone(), m).unwrap();
        expect(format!("volume product of max(1,|x|_inf)^-{m}"), volume_product(&g).unwrap().lhs, want);
    }
    let ok = bad.is_empty();
    Outcome::new(ok, if ok { format!("{count} exact values match") } else { bad.join("; ") })
}

fn campaign(c: Campaign, count: usize) -> CampaignReport {
    let mut cfg = CampaignConfig::new(c);
    cfg.count = count;
    cfg.seed = 2024;
    run_campaign(&cfg).unwrap()
}

fn summarize(r: &CampaignReport) -> String {
    let s = &r.summary;
    format!(
        "{}: {} checks / {} functions, {} failures, {} errors",
        r.campaign, s.checks, s.functions, s.theorem_failures + s.conjecture_failures, s.errors
    )
}

fn clean(r: &CampaignReport) -> bool {
    r.summary.errors == 0 && r.summary.theorem_failures == 0 && r.summary.conjecture_failures == 0
}

fn inequality_campaigns() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for c in [Campaign::Dim2P, Campaign::Dim1Monotone, Campaign::Dim2QClassF, Campaign::Dim1Bipolar] {
        let r = campaign(c, 200);
        let margins_ok = r.cases.iter().all(|x| x.margin.as_ref().map_or(true, |m| *m >= q(0)));
        let mut good = clean(&r) && margins_ok && r.summary.functions >= 200;
        if c == Campaign::Dim1Bipolar {
            // rows pass only when equality matches the c + I form; random draws can land on that form too
            let rows: Vec<_> = r.cases.iter().filter(|x| x.lhs.is_some()).collect();
            good &= rows.iter().filter(|x| x.planted).all(|x| x.equality);
            let random_eq = rows.iter().filter(|x| x.equality && !x.planted).count();
            parts.push(format!("dim1-bipolar: {random_eq} equality rows on random draws of c + I form"));
        }
        ok &= good;
        parts.push(summarize(&r));
    }
    Outcome::new(ok, parts.join("; "))
}

fn structural_identities() -> Outcome {
    let inv = campaign(Campaign::Invariance, 40);
    let dual = campaign(Campaign::DualityInvolutions, 60);
    let want = ["L L f = f", "M M f = f (class F)", "M M M f = M f", "supp Lf = (supp f)°", "L(f∘T) = (Lf)∘T^-T"];
    let seen = |name: &str| inv.cases.iter().chain(&dual.cases).any(|x| x.check == name);
    let missing: Vec<&str> = want.iter().copied().filter(|w| !seen(w)).collect();
    let ok = clean(&inv) && clean(&dual) && missing.is_empty();
    Outcome::new(ok, format!("{}; {}; missing checks: {:?}", summarize(&inv), summarize(&dual), missing))
}

/// Composite Simpson on the unit square pulled back to the triangle.
fn simpson_triangle(v: &[[f64; 2]; 3], ell: &[f64; 3], p: u32, n: usize) -> f64 {
    let w = |i: usize| if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
    let h = 1.0 / n as f64;
    let area2 = ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1])).abs();
    let mut total = 0.0;
    for i in 0..=n {
        let u = i as f64 * h;
        for j in 0..=n {
            let t = j as f64 * h;
            let x = [0, 1].map(|d| v[0][d] + u * (v[1][d] - v[0][d]) + u * t * (v[2][d] - v[1][d]));
            total += w(i) * w(j) * u * (ell[0] * x[0] + ell[1] * x[1] + ell[2]).powi(p as i32);
        }
    }
    total * h * h / 9.0 * area2
}

fn oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut cases = 0;
    while cases < 100 {
        let raw: Vec<i64> = (0..9).map(|_| rng.gen_range(-8i64..=8)).collect();
        let vs: Vec<Vec<Q>> = (0..3).map(|i| vec![qr(raw[2 * i], 2), qr(raw[2 * i + 1], 2)]).collect();
        let s = Simplex::new(vs.clone());
        if s.volume() == q(0) {
            continue;
        }
        cases += 1;
        let p = (raw[8].unsigned_abs() % 6) as u32;
        let ell = Affine::new(pt(&[raw[6], raw[7]]), qr(raw[8] + 195, 3));
        let exact = to_f64(&integrate_affine_power(&s, &ell, p).unwrap());
        let fv = [0, 1, 2].map(|i| [to_f64(&vs[i][0]), to_f64(&vs[i][1])]);
        let approx = simpson_triangle(&fv, &[raw[6] as f64, raw[7] as f64, (raw[8] + 195) as f64 / 3.0], p, 400);
        worst = worst.max((exact - approx).abs() / exact.abs().max(1.0));
    }
    let simplex_ok = worst <= 1e-6;

    let concave_fn = |s: u64| random_fn(s, RandomKind::Concave, 2, 2).unwrap();
    let specs = vec![
        LiftedBodySpec::new(Family::KBody, named(2, "indicator"), 1, FiberNorm::LInf),
        LiftedBodySpec::new(Family::KBody, named(2, "tent:l1"), 2, FiberNorm::L1),
        LiftedBodySpec::new(Family::KBody, named(2, "tent"), 3, FiberNorm::LInf),
        LiftedBodySpec::new(Family::KBody, concave_fn(1), 2, FiberNorm::LInf),
        LiftedBodySpec::new(Family::KBody, concave_fn(2), 3, FiberNorm::L1),
        LiftedBodySpec::new(Family::KBody, named(1, "tent"), 4, FiberNorm::L1),
        LiftedBodySpec::new(Family::CBody, named(2, "max-one-norm:inf"), 3, FiberNorm::LInf),
        LiftedBodySpec::new(Family::CBody, named(2, "one-plus-norm:l1"), 4, FiberNorm::L1),
        LiftedBodySpec::new(Family::CBody, random_fn(3, RandomKind::ClassF, 2, 2).unwrap(), 4, FiberNorm::LInf),
        LiftedBodySpec::new(Family::CBody, named(1, "max-one-norm"), 5, FiberNorm::L1),
    ];
    let mut mc_ok = true;
    let mut worst_sigma = 0.0f64;
    for (i, spec) in specs.into_iter().enumerate() {
        let spec = spec.unwrap();
        assert!(spec.ambient_dim() <= 6);
        let exact = to_f64(&lifted_volume(&spec).unwrap());
        let (est, se) = mc_volume(&spec, 1_000_000, i as u64).unwrap();
        // a body filling its sampling box gives est = exact with zero stderr
        let sigma = if est == exact { 0.0 } else { (est - exact).abs() / se };
        worst_sigma = worst_sigma.max(sigma);
        mc_ok &= sigma <= 4.0;
    }

    let dual = campaign(Campaign::DualityInvolutions, 30);
    let vertex: Vec<_> = dual.cases.iter().filter(|x| x.check.contains("vertex formula")).collect();
    let vertex_ok = !vertex.is_empty() && vertex.iter().all(|x| x.passed && x.error.is_none());
    Outcome::new(
        simplex_ok && mc_ok && vertex_ok,
        format!(
            "simplex quadrature worst rel err {worst:.2e} on 100 cases; Monte Carlo worst {worst_sigma:.2} stderr on 10 specs; {} vertex-formula rows agree",
            vertex.len()
        ),
    )
}

fn equipartition(elapsed: &mut Duration) -> Outcome {
    let start = Instant::now();
    let mut cfg = CampaignConfig::new(Campaign::EquipartitionSuite);
    cfg.count = 50;
    cfg.seed = 2024;
    cfg.m_range = (2, 4);
    cfg.tol = 1e-9;
    let r = run_campaign(&cfg).unwrap();
    *elapsed = start.elapsed();
    let rows = |prefix: &'static str| r.cases.iter().filter(move |x| x.check.starts_with(prefix));
    let residual_ok = rows("equipartition residual").all(|x| x.passed && x.residual.map_or(false, |v| v <= 1e-9));
    let ab_ok = rows("(a)").chain(rows("(b)")).all(|x| x.passed);
    let count = rows("equipartition residual").count();
    let ok = clean(&r) && residual_ok && ab_ok && count >= 150 && *elapsed < Duration::from_secs(300);
    Outcome::new(
        ok,
        format!(
            "{count} (f, m) frames, max residual {:.2e}, (a)/(b) {}, {:.0} s",
            r.summary.max_residual.unwrap_or(f64::NAN),
            if ab_ok { "pass" } else { "fail" },
            elapsed.as_secs_f64()
        ),
    )
}

fn substituted() -> Outcome {
    // Hanner cylinders reach the Mahler bound; other lifted bodies stay above it
    let hanner = [
        (Family::KBody, named(2, "indicator"), 1, FiberNorm::LInf),
        (Family::KBody, named(2, "indicator"), 2, FiberNorm::L1),
        (Family::KBody, named(1, "indicator"), 3, FiberNorm::LInf),
    ];
    let mut ok = true;
    for (family, f, m, fiber) in hanner {
        let spec = LiftedBodySpec::new(family, f, m, fiber).unwrap();
        let r = santalo_product(&spec).unwrap();
        ok &= r.lhs == mahler_bound(spec.ambient_dim()) && r.equality;
    }
    for seed in 0..10 {
        let spec = LiftedBodySpec::new(Family::KBody, random_fn(seed, RandomKind::Concave, 2, 2).unwrap(), 2, FiberNorm::LInf)
            .unwrap();
        ok &= santalo_product(&spec).unwrap().holds();
    }
    let f = named(2, "indicator");
    let rep = partition_report(&f, 2, Family::KBody, None, 1e-9).unwrap();
    ok &= rep.passes();
    let c = partition_report(&named(2, "max-one-norm:inf"), 3, Family::CBody, None, 1e-9).unwrap();
    let delegated = format!("{:?}", c.sections_mahler);
    Outcome::new(
        ok,
        format!(
            "SUBSTITUTED: general (m+2)-dimensional Mahler statement replaced by hypothesis checks and closed-form santalo_product identities; DELEGATED: 3D Mahler base case for the C-body ({delegated})"
        ),
    )
}

fn demo() -> Outcome {
    let t = log_concave_demo(&GridFn::gaussian(0.2, 30), &[1, 2, 4, 8, 16, 32, 64]).unwrap();
    let ok = t.limit_product >= 16.0 && t.rows.iter().all(|r| r.above_bound) && t.monotone;
    Outcome::new(
        ok,
        format!(
            "limit product {:.6} (4π² = {:.6}), final gap {:.2e}, monotone {}",
            t.limit_product,
            4.0 * std::f64::consts::PI.powi(2),
            t.final_gap,
            t.monotone
        ),
    )
}

fn main() {
    let mut equi_time = Duration::ZERO;
    let mut failed = false;
    let mut line = |id: u32, name: &str, blocking: bool, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = run();
        let status = match (o.passed, blocking) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (non-blocking)",
        };
        failed |= blocking && !o.passed;
        println!("criterion {id} {status} [{name}, {:.1} s] {}", start.elapsed().as_secs_f64(), o.detail);
    };
    line(1, "equality constants", true, &mut || {
        let start = Instant::now();
        let o = equality_constants();
        let fast = start.elapsed() < Duration::from_secs(60);
        Outcome::new(o.passed && fast, o.detail)
    });
    line(2, "inequality campaigns", true, &mut inequality_campaigns);
    line(3, "structural identities", true, &mut structural_identities);
    line(4, "oracle cross-checks", true, &mut oracles);
    line(5, "equipartition", true, &mut || equipartition(&mut equi_time));
    line(6, "substituted and delegated", true, &mut substituted);
    line(7, "log-concave demo", false, &mut demo);
    if failed {
        std::process::exit(1);
    }
}
