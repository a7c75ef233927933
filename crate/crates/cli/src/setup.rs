//! Families, potentials and knobs described by a [`Config`].

use ifsmeasure::transversality::PmTranslation;
use ifsmeasure::{
    bernoulli_family, blackwell_family, build_pm_translation, cf_family, Curve, IfsFamily, Interval, MapKind,
    Potential, ProbabilityModel, TranslationFamily,
};

use crate::config::Config;
use crate::error::CliError;

pub const FAMILY_KINDS: &[&str] = &["affine", "shifts", "bernoulli", "blackwell", "cf", "pm-translation"];
pub const POTENTIAL_KINDS: &[&str] = &["constant", "bernoulli", "blackwell", "tlog", "linear"];

/// `lo, hi` or a single point.
fn interval(cfg: &Config, key: &str) -> Result<Option<Interval>, CliError> {
    let Some(v) = cfg.list::<f64>(key)? else { return Ok(None) };
    match v.as_slice() {
        [x] => Ok(Some(Interval::point(*x))),
        [lo, hi] => Ok(Some(Interval::new(*lo, *hi)?)),
        _ => Err(CliError::Config(format!("`{key}` must be `lo, hi` or a single value"))),
    }
}

fn kind(cfg: &Config) -> Result<&str, CliError> {
    let k = cfg.require("family.kind")?;
    if !FAMILY_KINDS.contains(&k) {
        return Err(CliError::Config(format!("unknown family.kind `{k}` (expected one of {})", FAMILY_KINDS.join(", "))));
    }
    Ok(k)
}

fn affine_base(cfg: &Config) -> Result<IfsFamily, CliError> {
    let ratios: Vec<f64> = cfg.need_list("family.ratios")?;
    let offsets: Vec<f64> = cfg.need_list("family.offsets")?;
    if ratios.len() != offsets.len() {
        return Err(CliError::Config("family.ratios and family.offsets differ in length".into()));
    }
    let domain = interval(cfg, "family.domain")?.unwrap_or(Interval::new(0.0, 1.0)?);
    let maps = ratios.iter().zip(&offsets).map(|(&r, &o)| MapKind::affine(r, o)).collect();
    Ok(IfsFamily::new("affine", maps, domain, Interval::point(0.0))?)
}

pub fn family(cfg: &Config) -> Result<IfsFamily, CliError> {
    let fam = match kind(cfg)? {
        "affine" => {
            let base = affine_base(cfg)?;
            let slopes: Vec<f64> = cfg.list("family.offset_slopes")?.unwrap_or_else(|| vec![0.0; base.alphabet()]);
            if slopes.len() != base.alphabet() {
                return Err(CliError::Config("family.offset_slopes needs one entry per map".into()));
            }
            let mut maps = Vec::new();
            for (map, s) in base.maps().iter().zip(&slopes) {
                let MapKind::Affine { slope, offset } = map else { unreachable!() };
                let c = offset.coeffs()[0];
                maps.push(MapKind::Affine { slope: slope.clone(), offset: Curve::linear(c, *s) });
            }
            let parameter = interval(cfg, "family.parameter")?.unwrap_or(Interval::point(0.0));
            IfsFamily::new("affine", maps, base.domain(), parameter)?
        }
        "shifts" => {
            let shifts: Vec<f64> = cfg.need_list("family.shifts")?;
            let fix = |c: f64| ((c * c + 4.0 * c).sqrt() - c) / 2.0;
            let domain = match interval(cfg, "family.domain")? {
                Some(d) => d,
                None => Interval::new(
                    shifts.iter().cloned().map(fix).fold(f64::INFINITY, f64::min),
                    shifts.iter().cloned().map(fix).fold(f64::NEG_INFINITY, f64::max),
                )?,
            };
            let maps = shifts.iter().map(|&c| MapKind::MoebiusShift { shift: Curve::constant(c) }).collect();
            IfsFamily::new("shifts", maps, domain, Interval::point(0.0))?
        }
        "bernoulli" => bernoulli_family(interval(cfg, "family.parameter")?.unwrap_or(Interval::new(0.5, 0.7)?))?,
        "blackwell" => blackwell_family(cfg.need("family.eps")?, cfg.need("family.p")?)?.family,
        "cf" => cf_family(cfg.need("family.alpha")?, cfg.need("family.beta")?)?,
        "pm-translation" => pm_translation(cfg)?.family.family().clone(),
        _ => unreachable!(),
    };
    Ok(fam)
}

fn pm_translation(cfg: &Config) -> Result<PmTranslation, CliError> {
    let base = affine_base(cfg)?;
    let kappa = cfg.list("family.kappa")?;
    Ok(build_pm_translation(&base, 0.0, kappa, cfg.need("family.halfwidth")?)?)
}

/// The translation structure needed by the certificate.
pub fn translation_family(cfg: &Config) -> Result<(TranslationFamily, Option<String>), CliError> {
    match kind(cfg)? {
        "pm-translation" => {
            let pm = pm_translation(cfg)?;
            Ok((pm.family, pm.warning))
        }
        "affine" => {
            let base = affine_base(cfg)?;
            let slopes: Vec<f64> = cfg.need_list("family.offset_slopes")?;
            if slopes.len() != base.alphabet() {
                return Err(CliError::Config("family.offset_slopes needs one entry per map".into()));
            }
            let parameter = interval(cfg, "family.parameter")?
                .ok_or_else(|| CliError::Config("missing `family.parameter`".into()))?;
            let translations = slopes.iter().map(|&s| Curve::linear(0.0, s)).collect();
            Ok((TranslationFamily::new(&base, 0.0, translations, parameter)?, None))
        }
        k => Err(CliError::Config(format!("certification needs an affine or pm-translation family, got `{k}`"))),
    }
}

/// Place-dependent probabilities for the chaos game.
pub fn probabilities(cfg: &Config, fam: &IfsFamily) -> Result<ProbabilityModel, CliError> {
    let m = fam.alphabet();
    let default = match cfg.raw("family.kind") {
        Some("blackwell") => "blackwell",
        Some("bernoulli") => "bernoulli",
        _ => "constant",
    };
    let model = match cfg.raw("potential.kind").unwrap_or(default) {
        "constant" => {
            let p = cfg.list("potential.p")?.unwrap_or_else(|| vec![1.0 / m as f64; m]);
            ProbabilityModel::Linear { intercept: p, slope: vec![0.0; m] }
        }
        "bernoulli" => ProbabilityModel::bernoulli_place_dependent(cfg.get_or("potential.rho", 0.0)?),
        "blackwell" => ProbabilityModel::blackwell(cfg.need("family.eps")?, cfg.need("family.p")?),
        "linear" => ProbabilityModel::Linear {
            intercept: cfg.need_list("potential.intercept")?,
            slope: cfg.need_list("potential.slope")?,
        },
        k => return Err(CliError::Config(format!("potential.kind `{k}` does not define probabilities"))),
    };
    if let ProbabilityModel::Linear { intercept, slope } = &model {
        if intercept.len() != m || slope.len() != m {
            return Err(CliError::Config(format!("probabilities need {m} entries")));
        }
    }
    Ok(model)
}

pub fn potential(cfg: &Config, fam: &IfsFamily) -> Result<Potential, CliError> {
    let kind = cfg.raw("potential.kind");
    if let Some(k) = kind {
        if !POTENTIAL_KINDS.contains(&k) {
            return Err(CliError::Config(format!("unknown potential.kind `{k}` (expected one of {})", POTENTIAL_KINDS.join(", "))));
        }
    }
    if kind == Some("tlog") {
        return Ok(Potential::t_log_derivative(cfg.need("potential.t")?, fam)?);
    }
    if kind == Some("constant") || (kind.is_none() && !matches!(cfg.raw("family.kind"), Some("blackwell" | "bernoulli"))) {
        let m = fam.alphabet();
        return Ok(Potential::constant_bernoulli(cfg.list("potential.p")?.unwrap_or_else(|| vec![1.0 / m as f64; m]))?);
    }
    Ok(Potential::log_probability(probabilities(cfg, fam)?, fam)?)
}

/// `run.lambda`, defaulting to the midpoint of the parameter interval.
pub fn lambda(cfg: &Config, fam: &IfsFamily) -> Result<f64, CliError> {
    let l = cfg.get_or("run.lambda", fam.parameter().midpoint())?;
    fam.check_lambda(l)?;
    Ok(l)
}

pub fn depth(cfg: &Config) -> Result<usize, CliError> {
    cfg.get_or("run.depth", 8)
}

pub fn axis(cfg: &Config, key: &str, name: &str, default: (f64, f64, usize)) -> Result<ifsmeasure::Axis, CliError> {
    let (lo, hi, n) = match cfg.list::<f64>(key)? {
        None => default,
        Some(v) if v.len() == 3 && v[2] >= 1.0 && v[2].fract() == 0.0 => (v[0], v[1], v[2] as usize),
        Some(_) => return Err(CliError::Config(format!("`{key}` must be `lo, hi, points`"))),
    };
    Ok(ifsmeasure::Axis::new(name, lo, hi, n)?)
}

pub fn seed(cfg: &Config) -> Result<u64, CliError> {
    cfg.get("run.seed")?.ok_or_else(|| CliError::Config("stochastic commands need `run.seed` or --seed".into()))
}
