//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::time::{Duration, Instant};

use ifsmeasure::symbolic::CylinderIndex;
use ifsmeasure::transversality::build_pm_translation;
use ifsmeasure::*;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn unit() -> Interval {
    Interval::new(0.0, 1.0).unwrap()
}

fn affine(maps: &[(f64, f64)], domain: Interval) -> IfsFamily {
    similarity_family(&maps.iter().map(|m| m.0).collect::<Vec<_>>(), &maps.iter().map(|m| m.1).collect::<Vec<_>>(), domain)
        .unwrap()
}

fn moebius_shifts(c: &[f64]) -> IfsFamily {
    let fix = |c: f64| ((c * c + 4.0 * c).sqrt() - c) / 2.0;
    let lo = c.iter().cloned().map(fix).fold(f64::INFINITY, f64::min);
    let hi = c.iter().cloned().map(fix).fold(0.0, f64::max);
    let maps = c.iter().map(|&c| MapKind::MoebiusShift { shift: Curve::constant(c) }).collect();
    IfsFamily::new("shifts", maps, Interval::new(lo, hi).unwrap(), Interval::point(0.0)).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn bowen_exactness() -> Outcome {
    let opts = BowenOptions::for_alphabet(2);
    let mut notes = Vec::new();
    for (maps, expected) in [
        (vec![(0.5, 0.0), (0.5, 0.5)], 1.0),
        (vec![(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)], 2f64.ln() / 3f64.ln()),
    ] {
        let fam = affine(&maps, unit());
        let (root, dt) = timed(|| bowen_root(&fam, 0.0, opts));
        let root = root.map_err(e)?;
        check((root.s - expected).abs() <= 1e-6, format!("s = {} expected {expected}", root.s))?;
        check(dt < Duration::from_secs(1), format!("runtime {dt:?}"))?;
        notes.push(format!("s = {:.9} in {dt:.1?}", root.s));
    }
    Ok(notes.join(", "))
}

fn transfer_closed_forms() -> Outcome {
    let fam = affine(&[(0.5, 0.0), (0.5, 0.5)], unit());
    let pot = Potential::constant_bernoulli(vec![0.3, 0.7]).map_err(e)?;
    let spec = transfer_spectrum(&fam, &pot, 0.0, 6).map_err(e)?;
    check((spec.gamma - 1.0).abs() <= 1e-12, format!("γ = {}", spec.gamma))?;
    let h_err = spec.h.iter().fold(0.0f64, |a, h| a.max((h - 1.0).abs()));
    check(h_err <= 1e-12, format!("max |h − 1| = {h_err}"))?;
    let index = CylinderIndex::new(2, 6).map_err(e)?;
    let mut nu_err = 0.0f64;
    for (id, &nu) in spec.nu.iter().enumerate() {
        let w = index.decode(id).map_err(e)?;
        let prod: f64 = w.symbols().iter().map(|&s| if s == 1 { 0.3 } else { 0.7 }).product();
        nu_err = nu_err.max((nu - prod).abs());
    }
    check(nu_err <= 1e-12, format!("max |ν − Πp| = {nu_err}"))?;
    Ok(format!("|γ−1| = {:.1e}, |h−1| ≤ {h_err:.1e}, |ν−Πp| ≤ {nu_err:.1e}", (spec.gamma - 1.0).abs()))
}

fn bernoulli_sandwich() -> Outcome {
    let b = bernoulli_entropy_bounds(0.6, 0.0, 12).map_err(e)?;
    let ln2 = 2f64.ln();
    check((b.lower - ln2).abs() <= 1e-14 && (b.upper - ln2).abs() <= 1e-14, format!("ρ=0 bounds {b:?}"))?;
    let b = bernoulli_entropy_bounds(0.668, 0.45, 12).map_err(e)?;
    let target = -0.668f64.ln();
    check(b.lower > target, format!("lower {} ≤ −log 0.668 = {target}", b.lower))?;
    let (grid, dt) = timed(|| {
        bernoulli_region_scan(
            Axis::new("rho", 0.0, 0.5 - 1e-3, 50).unwrap(),
            Axis::new("lambda", 0.5, 0.7, 50).unwrap(),
            12,
        )
    });
    check(dt < Duration::from_secs(10), format!("scan took {dt:?}"))?;
    check(grid.values.len() == 2500, "scan size")?;
    Ok(format!(
        "lower(0.45, 0.668) = {:.6} > {target:.6}; 50×50 scan in {dt:.1?} ({} supercritical)",
        b.lower,
        grid.count(CellVerdict::Supercritical)
    ))
}

fn moment_oracle() -> Outcome {
    let f = bernoulli_moments(0.5, 0.0, 2).map_err(e)?;
    check((f[1] - 1.0 / 3.0).abs() <= 1e-12, format!("F_1 = {}", f[1]))?;
    check((f[2] - 0.2).abs() <= 1e-12, format!("F_2 = {}", f[2]))?;
    Ok(format!("F_1 = {:.15}, F_2 = {:.15}", f[1], f[2]))
}

fn blackwell_region() -> Outcome {
    let mut notes = Vec::new();
    for (eps, p) in [(0.45, 0.775), (0.55, 0.775), (0.45, 0.225)] {
        let c = blackwell_ratio(eps, p, 8).map_err(e)?;
        check(c.ratio > 1.0, format!("h/χ({eps}, {p}) = {}", c.ratio))?;
        notes.push(format!("{:.4}", c.ratio));
    }
    let mut asym = 0.0f64;
    for (eps, p) in [(0.3, 0.8), (0.2, 0.6), (0.45, 0.225), (0.4, 0.9)] {
        let a = blackwell_ratio(eps, p, 8).map_err(e)?.ratio;
        let b = blackwell_ratio(1.0 - eps, p, 8).map_err(e)?.ratio;
        asym = asym.max((a - b).abs());
    }
    check(asym <= 1e-6, format!("ε ↔ 1−ε asymmetry {asym}"))?;
    let (grid, dt) = timed(|| {
        blackwell_region_scan(Axis::new("eps", 0.01, 0.99, 50).unwrap(), Axis::new("p", 0.01, 0.99, 50).unwrap(), 8)
    });
    check(dt < Duration::from_secs(60), format!("scan took {dt:?}"))?;
    Ok(format!(
        "h/χ = [{}], asymmetry {asym:.1e}, 50×50 scan in {dt:.1?} ({} supercritical, {} audit-fail)",
        notes.join(", "),
        grid.count(CellVerdict::Supercritical),
        grid.count(CellVerdict::AuditFail)
    ))
}

fn cross_method_entropy() -> Outcome {
    let fam = bernoulli_family(Interval::new(0.5, 0.7).map_err(e)?).map_err(e)?;
    let pot = bernoulli_potential(0.2, &fam).map_err(e)?;
    let spec = transfer_spectrum(&fam, &pot, 0.6, 10).map_err(e)?;
    let h = entropy(&spec).value;
    let b = bernoulli_entropy_bounds(0.6, 0.2, 10).map_err(e)?;
    let slack = 2.0 * spec.truncation_bound;
    check(
        h >= b.lower - slack && h <= b.upper + slack,
        format!("h = {h} outside [{}, {}] ± {slack}", b.lower, b.upper),
    )?;
    Ok(format!("h = {h:.8} in [{:.8}, {:.8}] ± {slack:.1e}", b.lower, b.upper))
}

fn transversality_certificate() -> Outcome {
    let base = affine(&[(0.3, 0.15), (0.3, 0.55)], unit());
    let pm = build_pm_translation(&base, 0.0, Some(vec![1.0, -1.0]), 0.1).map_err(e)?;
    let cert = pm.family.vertical_certificate();
    let margin = cert.min_margin().unwrap_or(f64::NAN);
    check(cert.verdict == Verdict::CertifiedCond1, format!("ratio 0.3 verdict {}", cert.verdict))?;
    check(margin >= 1.1, format!("margin {margin}"))?;

    let wide = affine(&[(0.6, 0.05), (0.6, 0.35)], unit());
    let pm = build_pm_translation(&wide, 0.0, Some(vec![1.0, -1.0]), 0.04).map_err(e)?;
    let wide_cert = pm.family.vertical_certificate();
    check(wide_cert.verdict == Verdict::Inconclusive, format!("ratio 0.6 verdict {}", wide_cert.verdict))?;

    let twins = IfsFamily::new(
        "twins",
        vec![
            MapKind::Affine { slope: Curve::constant(0.5), offset: Curve::identity() },
            MapKind::Affine { slope: Curve::constant(0.5), offset: Curve::identity() },
        ],
        unit(),
        Interval::new(0.1, 0.4).map_err(e)?,
    )
    .map_err(e)?;
    let probe = mc_transversality_probe(&twins, &ProbeOptions { samples: 1000, ..Default::default() }).map_err(e)?;
    check(probe.verdict == ProbeVerdict::Falsified && probe.witness.is_some(), "identical maps not falsified")?;
    Ok(format!("margin {margin:.4}, ratio 0.6 {}, twins {}", wide_cert.verdict, probe.verdict))
}

fn monte_carlo_transversality() -> Outcome {
    let fam = bernoulli_family(Interval::new(0.5, 0.66).map_err(e)?).map_err(e)?;
    let opts = ProbeOptions { samples: 10_000, depth: 40, seed: 2024, ..Default::default() };
    let (a, dt) = timed(|| mc_transversality_probe(&fam, &opts));
    let a = a.map_err(e)?;
    check(dt < Duration::from_secs(30), format!("probe took {dt:?}"))?;
    check(a.falsifications == 0, format!("{} falsifications", a.falsifications))?;
    let eta = a.empirical_eta.unwrap_or(0.0);
    check(eta > 0.0, format!("empirical η = {eta}"))?;
    let b = mc_transversality_probe(&fam, &opts).map_err(e)?;
    check(a == b, "probe is not deterministic")?;
    Ok(format!("{} events, empirical η = {eta:.4e}, in {dt:.1?}", a.events))
}

fn pressure_drop() -> Outcome {
    let halves = affine(&[(0.5, 0.0), (0.5, 0.5)], unit());
    let mixed_a = affine(&[(0.5, 0.0), (1.0 / 3.0, 2.0 / 3.0)], unit());
    let mixed_b = affine(&[(1.0 / 3.0, 0.0), (0.5, 0.5)], unit());
    let mut strict = 0;
    for t in [0.5, 1.0] {
        for n in 1..=6 {
            let r = pressure_drop_check(&halves, 0.0, t, n).map_err(e)?;
            check(r.holds, format!("homogeneous fails at t={t}, n={n}"))?;
            check((r.z_full - r.rhs).abs() <= 1e-12 * r.z_full, format!("homogeneous gap {} at t={t}, n={n}", r.z_full - r.rhs))?;
            for fam in [&mixed_a, &mixed_b] {
                let r = pressure_drop_check(fam, 0.0, t, n).map_err(e)?;
                check(r.holds, format!("(1/2, 1/3) fails at t={t}, n={n}"))?;
            }
            let r = pressure_drop_check(&mixed_b, 0.0, t, n).map_err(e)?;
            check(r.strict, format!("(1/3, 1/2) not strict at t={t}, n={n}"))?;
            strict += 1;
        }
    }
    Ok(format!("equality on halves, {strict} strict cases on (1/3, 1/2)"))
}

fn continued_fractions() -> Outcome {
    let o = cf_overlap(1e-4, 0.4142).map_err(e)?;
    check(o.overlapping && (o.slack - 0.298).abs() <= 1e-3, format!("overlap {o:?}"))?;
    let fam = cf_family(1e-4, 0.4142).map_err(e)?;
    let root = bowen_root(&fam, 0.0, BowenOptions { depth: 8, ..BowenOptions::for_alphabet(2) }).map_err(e)?;
    check(root.s > 1.0, format!("s = {}", root.s))?;
    Ok(format!("slack {:.4}, s = {:.5}", o.slack, root.s))
}

fn correlation_dimensions() -> Outcome {
    let cantor = affine(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)], unit());
    let fair = Potential::constant_bernoulli(vec![0.5, 0.5]).map_err(e)?;
    let mu = gibbs_cylinder_measure(&transfer_spectrum(&cantor, &fair, 0.0, 12).map_err(e)?);
    let d = correlation_dimension(&cantor, 0.0, &mu, 11).map_err(e)?;
    let target = 2f64.ln() / 3f64.ln();
    check((d.value - target).abs() <= 0.02, format!("Cantor dim_cor = {}", d.value))?;

    let fam = moebius_shifts(&[1.0, 2.0]);
    let s = bowen_root(&fam, 0.0, BowenOptions::for_alphabet(2)).map_err(e)?.s;
    let pot = Potential::t_log_derivative(s, &fam).map_err(e)?;
    let mu = gibbs_cylinder_measure(&transfer_spectrum(&fam, &pot, 0.0, 12).map_err(e)?);
    let d2 = correlation_dimension(&fam, 0.0, &mu, 11).map_err(e)?;
    check((d2.value - s).abs() <= 0.03, format!("equilibrium dim_cor = {} vs s = {s}", d2.value))?;
    Ok(format!("Cantor {:.4} (target {target:.4}); equilibrium {:.4} vs s = {s:.4}", d.value, d2.value))
}

fn condition_m() -> Outcome {
    let fam = bernoulli_family(Interval::new(0.5, 0.7).map_err(e)?).map_err(e)?;
    let pot = bernoulli_potential(0.2, &fam).map_err(e)?;
    let pairs: Vec<(f64, f64)> =
        [1e-3, 3e-3, 1e-2, 3e-2, 1e-1].iter().map(|d| (0.6 - d / 2.0, 0.6 + d / 2.0)).collect();
    let rep = m_condition_probe(&fam, &pot, &pairs, 8).map_err(e)?;
    let (c, theta) = rep.fit.ok_or("no fit")?;
    check(theta >= 0.9, format!("θ' = {theta}"))?;
    let spread = rep.lipschitz_spread.ok_or("no Lipschitz ratios")?;
    check(spread <= 3.0, format!("R/|Δλ| spread {spread}"))?;
    let max_lip = rep.rows.iter().map(|r| r.ratio / (r.lambda - r.lambda_prime).abs()).fold(0.0, f64::max);
    Ok(format!("θ' = {theta:.4}, c = {c:.4}, max R/|Δλ| = {max_lip:.4}, spread {spread:.3}"))
}

fn sobolev_sanity() -> Outcome {
    let opts = SobolevOptions::default();
    let fair = ProbabilityModel::Linear { intercept: vec![0.5, 0.5], slope: vec![0.0, 0.0] };
    let uniform = bernoulli_family(Interval::point(0.5)).map_err(e)?;
    let s = chaos_game_sample(&uniform, &fair, 0.5, 100_000, 100, 1).map_err(e)?;
    let du = sobolev_estimate(&s, 1e3, opts).map_err(e)?.dim_s;
    check((1.7..=2.3).contains(&du), format!("uniform dim_S = {du}"))?;
    let dirac = EmpiricalSample { points: vec![0.25; 100_000], family: "dirac".into(), lambda: 0.0, seed: 0, burn_in: 0 };
    let dd = sobolev_estimate(&dirac, 1e3, opts).map_err(e)?.dim_s;
    check(dd <= 0.1, format!("Dirac dim_S = {dd}"))?;
    let cantor = bernoulli_family(Interval::point(1.0 / 3.0)).map_err(e)?;
    let s = chaos_game_sample(&cantor, &fair, 1.0 / 3.0, 100_000, 100, 1).map_err(e)?;
    let dc = sobolev_estimate(&s, 1e3, opts).map_err(e)?.dim_s;
    check((dc - 0.63).abs() <= 0.08, format!("Cantor dim_S = {dc}"))?;
    Ok(format!("uniform {du:.3}, Dirac {dd:.3}, Cantor {dc:.3}"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 13] = [
        ("bowen root exactness", bowen_exactness),
        ("transfer spectrum closed forms", transfer_closed_forms),
        ("bernoulli entropy sandwich", bernoulli_sandwich),
        ("moment oracle", moment_oracle),
        ("blackwell region", blackwell_region),
        ("cross-method entropy", cross_method_entropy),
        ("transversality certificate", transversality_certificate),
        ("monte carlo transversality", monte_carlo_transversality),
        ("pressure drop", pressure_drop),
        ("continued fractions", continued_fractions),
        ("correlation dimension", correlation_dimensions),
        ("condition (M) probe", condition_m),
        ("sobolev heuristic", sobolev_sanity),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", k + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL {name}: {why}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
