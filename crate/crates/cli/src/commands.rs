//! One function per subcommand. Each returns a key-value report, named CSV
//! artifacts and an exit code.

use ifsmeasure::report::{num, Csv, KeyValues};
use ifsmeasure::symbolic::{CylinderIndex, SymbolWord};
use ifsmeasure::thermo::{WordDerivatives, ENUMERATION_CAP};
use ifsmeasure::{
    bernoulli_region_scan, blackwell_region_scan, bowen_root, cf_overlap, chaos_game_sample, correlation_dimension,
    energy, entropy, gibbs_cylinder_measure, lyapunov_dimension, lyapunov_exponent, m_condition_probe,
    mc_transversality_probe, pressure_drop_check, similarity_dimension, sobolev_estimate, transfer_spectrum,
    AuditVerdict, BowenOptions, CellVerdict, CylinderMeasure, DerivativeMethod, EmpiricalSample, IfsFamily,
    PressureMethod, ProbeOptions, ProbeVerdict, RegionGrid, SobolevEstimate, SobolevOptions, SumMode,
    TransferSpectrum, Verdict,
};

use crate::config::Config;
use crate::error::CliError;
use crate::setup;

pub const EXIT_FALSIFIED: i32 = 3;

#[derive(Debug, Default)]
pub struct Output {
    pub report: KeyValues,
    pub files: Vec<(String, String)>,
    pub exit: i32,
}

impl Output {
    fn file(&mut self, name: &str, content: String) {
        self.files.push((name.to_string(), content));
    }
}

type Run = Result<Output, CliError>;

pub fn audit(cfg: &Config) -> Run {
    let fam = setup::family(cfg)?;
    let rep = fam.regularity_audit(cfg.get_or("run.grid", 1024)?)?;
    let mut out = Output::default();
    out.report
        .push("family", fam.name())
        .push("verdict", rep.verdict)
        .push("grid", rep.grid)
        .push("gamma1_est", num(rep.gamma1_est))
        .push("gamma2_est", num(rep.gamma2_est))
        .push("invariant", rep.invariant)
        .push("finite_difference", rep.finite_difference);
    for f in &rep.failures {
        out.report.push("failure", f);
    }
    if rep.verdict == AuditVerdict::Fail {
        out.exit = 2;
    }
    Ok(out)
}

pub fn project(cfg: &Config) -> Run {
    let fam = setup::family(cfg)?;
    let lambda = setup::lambda(cfg, &fam)?;
    let word = SymbolWord::parse(cfg.require("run.word")?, fam.alphabet())?;
    let n = cfg.get_or("run.n", word.len().max(1))?;
    let p = fam.natural_projection(lambda, &word, n)?;
    let mut out = Output::default();
    out.report
        .push("word", &word)
        .push("n", n)
        .push("lambda", num(lambda))
        .push("x", num(p.x))
        .push("error_bound", num(p.error_bound));
    match fam.projection_lambda_derivative(lambda, &word, n, DerivativeMethod::Auto) {
        Ok(d) => {
            out.report
                .push("dlambda", num(d.value))
                .push("dlambda_method", format!("{:?}", d.method))
                .push("dlambda_remainder_bound", num(d.remainder_bound));
        }
        Err(e) => {
            out.report.push("dlambda", format!("unavailable ({e})"));
        }
    }
    Ok(out)
}

fn spectrum_of(cfg: &Config) -> Result<(IfsFamily, f64, TransferSpectrum), CliError> {
    let fam = setup::family(cfg)?;
    let lambda = setup::lambda(cfg, &fam)?;
    let pot = setup::potential(cfg, &fam)?;
    let spec = transfer_spectrum(&fam, &pot, lambda, setup::depth(cfg)?)?;
    Ok((fam, lambda, spec))
}

fn push_spectrum(kv: &mut KeyValues, spec: &TransferSpectrum) {
    kv.push("depth", spec.depth)
        .push("lambda", num(spec.lambda))
        .push("gamma", num(spec.gamma))
        .push("pressure", num(spec.pressure))
        .push("truncation_bound", num(spec.truncation_bound))
        .push("iterations", spec.iterations)
        .push("residual_right", num(spec.residual_right))
        .push("residual_left", num(spec.residual_left));
}

pub fn spectrum(cfg: &Config) -> Run {
    let (_, _, spec) = spectrum_of(cfg)?;
    let mut out = Output::default();
    push_spectrum(&mut out.report, &spec);
    let mu = gibbs_cylinder_measure(&spec);
    let index = CylinderIndex::new(spec.alphabet, spec.depth)?;
    let mut csv = Csv::new(&["word", "nu", "h", "mu"]);
    for id in 0..index.count() {
        csv.row([index.decode(id)?.to_string(), num(spec.nu[id]), num(spec.h[id]), num(mu.weights[id])]);
    }
    out.file("spectrum", csv.into_string());
    Ok(out)
}

fn t_values(cfg: &Config) -> Result<Vec<f64>, CliError> {
    Ok(cfg.list("run.t")?.unwrap_or_else(|| vec![0.0, 0.5, 1.0]))
}

pub fn pressure(cfg: &Config) -> Run {
    let fam = setup::family(cfg)?;
    let lambda = setup::lambda(cfg, &fam)?;
    let method = match cfg.raw("run.method").unwrap_or("transfer") {
        "transfer" => PressureMethod::Transfer { depth: setup::depth(cfg)? },
        "partition" => PressureMethod::PartitionSum { n: cfg.get_or("run.n", 10)? },
        m => return Err(CliError::Config(format!("run.method must be `transfer` or `partition`, got `{m}`"))),
    };
    let mut csv = Csv::new(&["t", "value", "lower", "upper"]);
    for t in t_values(cfg)? {
        let p = ifsmeasure::pressure(&fam, t, lambda, method)?;
        csv.row([num(t), num(p.value), num(p.lower), num(p.upper)]);
    }
    let mut out = Output::default();
    out.report.push("lambda", num(lambda)).push("method", format!("{method:?}"));
    out.file("pressure", csv.into_string());
    Ok(out)
}

pub fn bowen(cfg: &Config) -> Run {
    let fam = setup::family(cfg)?;
    let lambda = setup::lambda(cfg, &fam)?;
    let mut opts = BowenOptions::for_alphabet(fam.alphabet());
    opts.depth = cfg.get_or("run.depth", opts.depth)?;
    opts.partition_n = cfg.get_or("run.n", opts.partition_n)?;
    let root = bowen_root(&fam, lambda, opts)?;
    let mut out = Output::default();
    out.report
        .push("s", num(root.s))
        .push("pressure_at_root", num(root.pressure_at_root))
        .push("bracket_lo", num(root.bracket.0))
        .push("bracket_hi", num(root.bracket.1))
        .push("iterations", root.iterations)
        .push("depth", opts.depth)
        .push("partition_n", opts.partition_n);
    Ok(out)
}

pub fn entropy_cmd(cfg: &Config) -> Run {
    let (fam, lambda, spec) = spectrum_of(cfg)?;
    let h = entropy(&spec);
    let chi = lyapunov_exponent(&fam, lambda, &spec.extended_measure())?;
    let mut out = Output::default();
    push_spectrum(&mut out.report, &spec);
    out.report.push("entropy", num(h.value)).push("lyapunov", num(chi));
    if let Ok(d) = lyapunov_dimension(h.value, chi) {
        out.report.push("lyapunov_dimension", num(d.clipped)).push("ratio", num(d.raw));
    }
    let mut csv = Csv::new(&["n", "block_entropy", "conditional_entropy"]);
    for (k, (s, c)) in h.shannon.iter().zip(&h.conditional).enumerate() {
        csv.row([(k + 1).to_string(), num(*s), num(*c)]);
    }
    out.file("entropy", csv.into_string());
    Ok(out)
}

fn region_output(name: &str, grid: RegionGrid) -> Output {
    let mut out = Output::default();
    out.report
        .push("axis1", format!("{} [{}, {}] × {}", grid.axis1.name, grid.axis1.range.lo, grid.axis1.range.hi, grid.axis1.points))
        .push("axis2", format!("{} [{}, {}] × {}", grid.axis2.name, grid.axis2.range.lo, grid.axis2.range.hi, grid.axis2.points));
    for v in [CellVerdict::Supercritical, CellVerdict::Subcritical, CellVerdict::Degenerate, CellVerdict::AuditFail] {
        out.report.push(&v.to_string().to_lowercase(), grid.count(v));
    }
    out.file(name, grid.to_csv());
    out
}

pub fn region_bernoulli(cfg: &Config) -> Run {
    let rho = setup::axis(cfg, "region.axis1", "rho", (0.0, 0.499, 50))?;
    let lambda = setup::axis(cfg, "region.axis2", "lambda", (0.5, 0.7, 50))?;
    let n = cfg.get_or("region.moments", 12)?;
    Ok(region_output("region_bernoulli", bernoulli_region_scan(rho, lambda, n)))
}

pub fn region_blackwell(cfg: &Config) -> Run {
    let eps = setup::axis(cfg, "region.axis1", "eps", (0.01, 0.99, 50))?;
    let p = setup::axis(cfg, "region.axis2", "p", (0.01, 0.99, 50))?;
    Ok(region_output("region_blackwell", blackwell_region_scan(eps, p, setup::depth(cfg)?)))
}

pub fn certify(cfg: &Config) -> Run {
    let (tf, warning) = setup::translation_family(cfg)?;
    let rep = tf.vertical_certificate();
    let mut out = Output::default();
    for line in rep.to_text().lines() {
        if let Some((k, v)) = line.split_once(": ") {
            out.report.push(k, v);
        }
    }
    if let Some(w) = warning {
        out.report.push("warning", w);
    }
    if rep.verdict == Verdict::Falsified {
        out.exit = EXIT_FALSIFIED;
    }
    out.file("margins", rep.margins_csv());
    Ok(out)
}

pub fn probe(cfg: &Config) -> Run {
    let fam = setup::family(cfg)?;
    let defaults = ProbeOptions::default();
    let opts = ProbeOptions {
        samples: cfg.get_or("probe.samples", defaults.samples)?,
        depth: cfg.get_or("probe.depth", defaults.depth)?,
        eta0: cfg.get("probe.eta0")?,
        seed: setup::seed(cfg)?,
        lambda_grid: cfg.get_or("probe.lambda_grid", defaults.lambda_grid)?,
    };
    let rep = mc_transversality_probe(&fam, &opts)?;
    let mut out = Output::default();
    for line in rep.to_text().lines() {
        if let Some((k, v)) = line.split_once(": ") {
            out.report.push(k, v);
        }
    }
    if rep.verdict == ProbeVerdict::Falsified {
        out.exit = EXIT_FALSIFIED;
    }
    Ok(out)
}

pub fn partition(cfg: &Config) -> Run {
    let fam = setup::family(cfg)?;
    let lambda = setup::lambda(cfg, &fam)?;
    let n_max: usize = cfg.get_or("run.n", 8)?;
    let all: Vec<usize> = (1..=fam.alphabet()).collect();
    let ts = t_values(cfg)?;
    let mut csv = Csv::new(&["n", "t", "z_inf", "z_sup", "p_lower", "p_upper"]);
    for n in 1..=n_max {
        let words = WordDerivatives::enumerate(&fam, lambda, &all, n)?;
        for &t in &ts {
            let (lo, hi) = words.pressure_bracket(t);
            csv.row([n.to_string(), num(t), num(words.z(t, SumMode::Inf)), num(words.z(t, SumMode::Sup)), num(lo), num(hi)]);
        }
    }
    let mut out = Output::default();
    out.report.push("lambda", num(lambda)).push("n_max", n_max).push("enumeration_cap", ENUMERATION_CAP);
    out.file("partition", csv.into_string());
    Ok(out)
}

fn gibbs_measure(cfg: &Config, extra_depth: usize) -> Result<(IfsFamily, f64, CylinderMeasure, usize), CliError> {
    let fam = setup::family(cfg)?;
    let lambda = setup::lambda(cfg, &fam)?;
    let max_depth: usize = cfg.get_or("run.max_depth", 9)?;
    let pot = setup::potential(cfg, &fam)?;
    let spec = transfer_spectrum(&fam, &pot, lambda, max_depth + extra_depth)?;
    Ok((fam, lambda, gibbs_cylinder_measure(&spec), max_depth))
}

pub fn energy_cmd(cfg: &Config) -> Run {
    let (fam, lambda, mu, max_depth) = gibbs_measure(cfg, 1)?;
    let alpha = cfg.need("run.alpha")?;
    let rep = energy(&fam, lambda, &mu, alpha, max_depth)?;
    let mut out = Output::default();
    out.report
        .push("alpha", num(alpha))
        .push("tail_ratio", num(rep.tail_ratio))
        .push("slope_error", num(rep.slope_error))
        .push("finite_looking", rep.finite_looking);
    let mut csv = Csv::new(&["level", "sum"]);
    for (n, s) in rep.sums.iter().enumerate() {
        csv.row([n.to_string(), num(*s)]);
    }
    out.file("energy", csv.into_string());
    Ok(out)
}

pub fn dimcor(cfg: &Config) -> Run {
    let (fam, lambda, mu, max_depth) = gibbs_measure(cfg, 1)?;
    let d = correlation_dimension(&fam, lambda, &mu, max_depth)?;
    let mut out = Output::default();
    out.report
        .push("dim_cor", num(d.value))
        .push("lower", num(d.lower))
        .push("upper", num(d.upper))
        .push("max_depth", max_depth);
    Ok(out)
}

fn draw(cfg: &Config) -> Result<EmpiricalSample, CliError> {
    let fam = setup::family(cfg)?;
    let lambda = setup::lambda(cfg, &fam)?;
    let probabilities = setup::probabilities(cfg, &fam)?;
    Ok(chaos_game_sample(
        &fam,
        &probabilities,
        lambda,
        cfg.get_or("run.samples", 100_000)?,
        cfg.get_or("run.burn_in", 100)?,
        setup::seed(cfg)?,
    )?)
}

pub fn sample(cfg: &Config) -> Run {
    let s = draw(cfg)?;
    let mut out = Output::default();
    out.report.push("samples", s.len()).push("lambda", num(s.lambda)).push("seed", s.seed);
    for k in 1..=4 {
        out.report
            .push(&format!("moment{k}"), num(s.moment(k)))
            .push(&format!("moment{k}_std_error"), num(s.moment_std_error(k)));
    }
    out.file("sample", s.to_csv());
    Ok(out)
}

pub fn sobolev(cfg: &Config) -> Run {
    let s = draw(cfg)?;
    let est = sobolev_estimate(&s, cfg.get_or("run.xi_max", 1e3)?, SobolevOptions::default())?;
    let mut out = Output::default();
    out.report
        .push("label", SobolevEstimate::LABEL)
        .push("dim_s", num(est.dim_s))
        .push("slope", num(est.slope))
        .push("kept", est.kept)
        .push("samples", s.len());
    if let Some(w) = &est.warning {
        out.report.push("warning", w);
    }
    out.file("sobolev", est.spectrum_csv());
    Ok(out)
}

pub fn mprobe(cfg: &Config) -> Run {
    let fam = setup::family(cfg)?;
    let pot = setup::potential(cfg, &fam)?;
    let center: f64 = cfg.get_or("mprobe.center", fam.parameter().midpoint())?;
    let gaps: Vec<f64> = cfg.list("mprobe.gaps")?.unwrap_or_else(|| vec![1e-3, 3e-3, 1e-2, 3e-2, 1e-1]);
    let pairs: Vec<(f64, f64)> = gaps.iter().map(|g| (center - g / 2.0, center + g / 2.0)).collect();
    let rep = m_condition_probe(&fam, &pot, &pairs, setup::depth(cfg)?)?;
    let mut out = Output::default();
    match rep.fit {
        Some((c, theta)) => out.report.push("fit_c", num(c)).push("fit_theta", num(theta)),
        None => out.report.push("fit", "none"),
    };
    if let Some(s) = rep.lipschitz_spread {
        out.report.push("lipschitz_spread", num(s));
    }
    let mut csv = Csv::new(&["lambda", "lambda_prime", "ratio", "ratio_per_gap"]);
    for r in &rep.rows {
        let gap = (r.lambda - r.lambda_prime).abs();
        csv.row([num(r.lambda), num(r.lambda_prime), num(r.ratio), if gap > 0.0 { num(r.ratio / gap) } else { String::new() }]);
    }
    out.file("mprobe", csv.into_string());
    Ok(out)
}

pub fn pressure_drop(cfg: &Config) -> Run {
    let fam = setup::family(cfg)?;
    let lambda = setup::lambda(cfg, &fam)?;
    let n_max: usize = cfg.get_or("run.n", 6)?;
    let mut csv = Csv::new(&["n", "t", "z_full", "z_dropped", "delta", "rhs", "holds", "strict"]);
    let mut all_hold = true;
    for n in 1..=n_max {
        for t in t_values(cfg)? {
            let r = pressure_drop_check(&fam, lambda, t, n)?;
            all_hold &= r.holds;
            csv.row([
                n.to_string(),
                num(t),
                num(r.z_full),
                num(r.z_dropped),
                num(r.delta),
                num(r.rhs),
                r.holds.to_string(),
                r.strict.to_string(),
            ]);
        }
    }
    let mut out = Output::default();
    out.report.push("lambda", num(lambda)).push("all_hold", all_hold);
    out.file("pressure_drop", csv.into_string());
    Ok(out)
}

pub fn cf_overlap_cmd(cfg: &Config) -> Run {
    let (alpha, beta) = (cfg.need("family.alpha")?, cfg.need("family.beta")?);
    let o = cf_overlap(alpha, beta)?;
    let mut out = Output::default();
    out.report
        .push("alpha", num(alpha))
        .push("beta", num(beta))
        .push("overlapping", o.overlapping)
        .push("slack", num(o.slack));
    Ok(out)
}

pub fn simdim(cfg: &Config) -> Run {
    let ratios: Vec<f64> = cfg.need_list("family.ratios")?;
    let s = similarity_dimension(&ratios)?;
    let mut out = Output::default();
    out.report.push("similarity_dimension", num(s)).push("tolerance", num(1e-12));
    Ok(out)
}
