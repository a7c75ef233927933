//! Measure diagnostics: symbolic energies and correlation dimension,
//! chaos-game samples, Fourier decay and the λ-regularity probe of Gibbs
//! measures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ifs::{FrozenIfs, IfsFamily};
use crate::report::{num, Csv};
use crate::symbolic::CylinderIndex;
use crate::thermo::{gibbs_cylinder_measure, transfer_spectrum, CylinderMeasure, Potential, ProbabilityModel};

/// `|f_u(X)|` for every `|u| = n`, by cylinder id. Maps are assumed
/// monotone, so images of `X` are spanned by the images of its endpoints.
pub fn cylinder_lengths(frozen: &FrozenIfs<'_>, n: usize) -> Vec<f64> {
    let m = frozen.family().alphabet();
    let dom = frozen.family().domain();
    let mut ends = vec![(dom.lo, dom.hi)];
    for _ in 0..n {
        let k = ends.len();
        let mut next = vec![(0.0, 0.0); k * m];
        for i in 0..m {
            for (id, &(a, b)) in ends.iter().enumerate() {
                next[i * k + id] = (frozen.value(i + 1, a), frozen.value(i + 1, b));
            }
        }
        ends = next;
    }
    ends.into_iter().map(|(a, b)| (b - a).abs()).collect()
}

/// Least-squares line through `(x, y)`: `(slope, intercept, slope standard error)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let se = if x.len() > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, se)
}

/// Levels used for the geometric tail fit.
pub const TAIL_LEVELS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    pub alpha: f64,
    /// `S_0, …, S_{N_d}`.
    pub sums: Vec<f64>,
    /// `exp` of the fitted slope of `log S_n` over the last levels.
    pub tail_ratio: f64,
    /// Standard error of that slope.
    pub slope_error: f64,
    pub finite_looking: bool,
}

/// Level sums `S_n = Σ_{|u|=n} |f_u(X)|^{−α} Σ_{i≠j} μ(ui) μ(uj)` for `n ≤ max_depth`.
pub fn energy(fam: &IfsFamily, lambda: f64, measure: &CylinderMeasure, alpha: f64, max_depth: usize) -> Result<EnergyReport> {
    let levels = EnergyLevels::new(fam, lambda, measure, max_depth)?;
    levels.report(alpha)
}

/// Precomputed cylinder lengths and off-diagonal mass products.
struct EnergyLevels {
    /// Per level `n`: pairs `(log |X_u|, Σ_{i≠j} μ(ui)μ(uj))` with positive weight.
    levels: Vec<Vec<(f64, f64)>>,
}

impl EnergyLevels {
    fn new(fam: &IfsFamily, lambda: f64, measure: &CylinderMeasure, max_depth: usize) -> Result<Self> {
        if measure.alphabet != fam.alphabet() {
            return Err(Error::InvalidInput("measure alphabet differs from the family".into()));
        }
        if max_depth + 1 > measure.depth {
            return Err(Error::InvalidInput(format!(
                "energy to level {max_depth} needs a measure of depth {}, got {}",
                max_depth + 1,
                measure.depth
            )));
        }
        if max_depth + 1 < TAIL_LEVELS {
            return Err(Error::InvalidInput(format!("need at least {TAIL_LEVELS} levels")));
        }
        let m = fam.alphabet();
        let frozen = fam.at(lambda)?;
        let mut levels = Vec::with_capacity(max_depth + 1);
        for n in 0..=max_depth {
            let lengths = cylinder_lengths(&frozen, n);
            let child = measure.coarsen(n + 1)?;
            let mut level = Vec::new();
            for (u, len) in lengths.iter().enumerate() {
                let kids = &child.weights[u * m..(u + 1) * m];
                let total: f64 = kids.iter().sum();
                let off = total * total - kids.iter().map(|w| w * w).sum::<f64>();
                if off > 0.0 {
                    if !(*len > 0.0) {
                        return Err(Error::Estimator(format!("degenerate cylinder at level {n}")));
                    }
                    level.push((len.ln(), off));
                }
            }
            levels.push(level);
        }
        Ok(Self { levels })
    }

    fn sums(&self, alpha: f64) -> Vec<f64> {
        self.levels.iter().map(|l| l.iter().map(|(ll, w)| w * (-alpha * ll).exp()).sum()).collect()
    }

    fn report(&self, alpha: f64) -> Result<EnergyReport> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidInput(format!("α must be positive, got {alpha}")));
        }
        let sums = self.sums(alpha);
        let tail = &sums[sums.len() - TAIL_LEVELS..];
        if tail.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Estimator("energy level sums vanish; the measure has no overlap structure".into()));
        }
        let xs: Vec<f64> = (0..TAIL_LEVELS).map(|k| k as f64).collect();
        let ys: Vec<f64> = tail.iter().map(|s| s.ln()).collect();
        let (slope, _, slope_error) = linear_fit(&xs, &ys);
        let tail_ratio = slope.exp();
        Ok(EnergyReport { alpha, sums, tail_ratio, slope_error, finite_looking: tail_ratio < 0.99 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationDimension {
    pub value: f64,
    /// α where the fitted log-ratio equals ± its standard error.
    pub lower: f64,
    pub upper: f64,
}

/// Bisection on α for a unit energy tail ratio.
pub fn correlation_dimension(fam: &IfsFamily, lambda: f64, measure: &CylinderMeasure, max_depth: usize) -> Result<CorrelationDimension> {
    if max_depth < 7 {
        return Err(Error::InvalidInput("correlation dimension needs a measure chain to depth 8".into()));
    }
    let levels = EnergyLevels::new(fam, lambda, measure, max_depth)?;
    let log_ratio = |alpha: f64| -> Result<(f64, f64)> {
        let r = levels.report(alpha)?;
        Ok((r.tail_ratio.ln(), r.slope_error))
    };
    // the fitted slope is nondecreasing in α; check on a coarse grid
    let hi_alpha = 4.0;
    let samples: Vec<(f64, f64)> = (1..=40).map(|k| log_ratio(hi_alpha * k as f64 / 40.0)).collect::<Result<_>>()?;
    for w in samples.windows(2) {
        if w[1].0 < w[0].0 - 1e-9 - 3.0 * (w[0].1 + w[1].1) {
            return Err(Error::Estimator("energy tail ratio is not monotone in α".into()));
        }
    }
    let root = |shift: f64| -> Result<f64> {
        let f = |a: f64| log_ratio(a).map(|(l, se)| l - shift * se);
        let (mut lo, mut hi) = (1e-9, hi_alpha);
        if f(lo)? > 0.0 {
            return Ok(0.0);
        }
        if f(hi)? < 0.0 {
            return Err(Error::BracketFailure(format!("energy stays finite-looking up to α = {hi_alpha}")));
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if f(mid)? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    let value = root(0.0)?;
    let a = root(1.0)?;
    let b = root(-1.0)?;
    Ok(CorrelationDimension { value, lower: a.min(b), upper: a.max(b) })
}

/// Chaos-game points together with how they were generated.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalSample {
    pub points: Vec<f64>,
    pub family: String,
    pub lambda: f64,
    pub seed: u64,
    pub burn_in: usize,
}

impl EmpiricalSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `N⁻¹ Σ x^k`.
    pub fn moment(&self, k: i32) -> f64 {
        self.points.iter().map(|x| x.powi(k)).sum::<f64>() / self.len() as f64
    }

    /// Standard error of [`EmpiricalSample::moment`] for independent draws.
    pub fn moment_std_error(&self, k: i32) -> f64 {
        let n = self.len() as f64;
        let mean = self.moment(k);
        let var = self.points.iter().map(|x| (x.powi(k) - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        (var / n).sqrt()
    }

    /// One-column CSV with header `x`.
    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(&["x"]);
        for &x in &self.points {
            csv.row([num(x)]);
        }
        csv.into_string()
    }
}

/// Random iteration `x ← f_j(x)` with `j` drawn from `p(x)`. Zero
/// probabilities are allowed here.
pub fn chaos_game_sample(
    fam: &IfsFamily,
    probabilities: &ProbabilityModel,
    lambda: f64,
    n: usize,
    burn_in: usize,
    seed: u64,
) -> Result<EmpiricalSample> {
    let m = fam.alphabet();
    let frozen = fam.at(lambda)?;
    for x in fam.domain().grid(1024) {
        let ps: Vec<f64> = (1..=m).map(|j| probabilities.prob(j, lambda, x)).collect();
        if let Some(p) = ps.iter().find(|&&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::ProbabilityAudit(format!("probability {p} at x = {x}")));
        }
        let total: f64 = ps.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::ProbabilityAudit(format!("probabilities sum to {total} at x = {x}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = fam.domain().midpoint();
    let mut points = Vec::with_capacity(n);
    for k in 0..burn_in + n {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut pick = m;
        for j in 1..=m {
            acc += probabilities.prob(j, lambda, x);
            if u < acc {
                pick = j;
                break;
            }
        }
        // rounding can leave u ≥ acc; fall back to the last symbol with mass
        if pick == m {
            while pick > 1 && probabilities.prob(pick, lambda, x) <= 0.0 {
                pick -= 1;
            }
        }
        x = frozen.value(pick, x);
        if k >= burn_in {
            points.push(x);
        }
    }
    Ok(EmpiricalSample { points, family: fam.name().to_string(), lambda, seed, burn_in })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevOptions {
    /// Reporting points per decade.
    pub per_decade: usize,
    /// Evaluation points per decade on the fine grid.
    pub fine_per_decade: usize,
}

impl Default for SobolevOptions {
    fn default() -> Self {
        Self { per_decade: 64, fine_per_decade: 512 }
    }
}

/// Heuristic decay-rate reading of the empirical Fourier transform.
#[derive(Clone, Debug, PartialEq)]
pub struct SobolevEstimate {
    /// `−slope` of the log-log fit, clamped at 0. HEURISTIC.
    pub dim_s: f64,
    pub slope: f64,
    /// Smoothed `(ξ, |ν̂(ξ)|² − 1/N)` on the reporting grid.
    pub spectrum: Vec<(f64, f64)>,
    /// How many reporting points cleared the noise floor.
    pub kept: usize,
    pub warning: Option<String>,
}

impl SobolevEstimate {
    pub const LABEL: &'static str = "HEURISTIC";

    pub fn spectrum_csv(&self) -> String {
        let mut csv = Csv::new(&["xi", "power"]);
        for &(xi, p) in &self.spectrum {
            csv.row([num(xi), num(p)]);
        }
        csv.into_string()
    }
}

/// Decay exponent of `|ν̂(ξ)|²` over the upper two decades below `ξ_max`.
///
/// The debiased power `|N⁻¹ Σ e^{iξx}|² − 1/N` is evaluated on a fine
/// log-spaced grid over three decades. Each reporting frequency `ξ_k`
/// averages the fine values on `[ξ_k/√10, ξ_k]` with weight `ξ`, and is
/// kept only above the noise floor `3/(N √n_window)`.
pub fn sobolev_estimate(sample: &EmpiricalSample, xi_max: f64, opts: SobolevOptions) -> Result<SobolevEstimate> {
    let n = sample.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    if !(xi_max > 0.0) || opts.per_decade == 0 || opts.fine_per_decade == 0 {
        return Err(Error::InvalidInput("ξ_max and grid densities must be positive".into()));
    }
    let warning = (n < 10_000).then(|| format!("sample of {n} points is below the recommended 10^4"));
    let first = sample.points[0];
    if sample.points.iter().all(|&x| x == first) {
        return Ok(SobolevEstimate { dim_s: 0.0, slope: 0.0, spectrum: Vec::new(), kept: 0, warning });
    }
    let fine_count = 3 * opts.fine_per_decade;
    let fine: Vec<f64> = (0..=fine_count)
        .map(|k| xi_max * 10f64.powf(-((fine_count - k) as f64) / opts.fine_per_decade as f64))
        .collect();
    let inv_n = 1.0 / n as f64;
    let power: Vec<f64> = fine
        .par_iter()
        .map(|&xi| {
            let (c, s) = sample.points.iter().fold((0.0, 0.0), |(c, s), &x| {
                let (sn, cs) = (xi * x).sin_cos();
                (c + cs, s + sn)
            });
            (c * c + s * s) * inv_n * inv_n - inv_n
        })
        .collect();
    let report_count = 2 * opts.per_decade;
    let width = 10f64.sqrt();
    let mut spectrum = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..=report_count {
        let xi = xi_max * 10f64.powf(-((report_count - k) as f64) / opts.per_decade as f64);
        let lo = xi / width * (1.0 - 1e-12);
        let hi = xi * (1.0 + 1e-12);
        let (mut num_sum, mut den, mut count) = (0.0, 0.0, 0usize);
        for (f, p) in fine.iter().zip(&power) {
            if *f >= lo && *f <= hi {
                num_sum += p * f;
                den += f;
                count += 1;
            }
        }
        if count == 0 {
            continue;
        }
        let value = num_sum / den;
        spectrum.push((xi, value));
        if value > 3.0 * inv_n / (count as f64).sqrt() {
            xs.push(xi.ln());
            ys.push(value.ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::Estimator(format!("only {} frequencies clear the noise floor", xs.len())));
    }
    let (slope, _, _) = linear_fit(&xs, &ys);
    Ok(SobolevEstimate { dim_s: (-slope).max(0.0), slope, spectrum, kept: xs.len(), warning })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioRow {
    pub lambda: f64,
    pub lambda_prime: f64,
    /// `max_w |log(μ_λ(w)/μ_λ'(w))| / |w|`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MConditionReport {
    pub rows: Vec<RatioRow>,
    /// Fit `R ≈ c |λ − λ'|^θ'` over pairs with `R > 0`; `None` when no pair qualifies.
    pub fit: Option<(f64, f64)>,
    /// `max / min` of `R / |λ − λ'|` over pairs with distinct parameters.
    pub lipschitz_spread: Option<f64>,
}

/// Gibbs measures at each parameter pair, compared cylinder by cylinder at
/// every depth up to `r`.
pub fn m_condition_probe(fam: &IfsFamily, pot: &Potential, pairs: &[(f64, f64)], r: usize) -> Result<MConditionReport> {
    if pairs.len() < 3 {
        return Err(Error::InvalidInput("condition (M) probe needs at least 3 parameter pairs".into()));
    }
    CylinderIndex::new(fam.alphabet(), r)?;
    let rows: Vec<RatioRow> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let ma = gibbs_cylinder_measure(&transfer_spectrum(fam, pot, a, r)?);
            let mb = gibbs_cylinder_measure(&transfer_spectrum(fam, pot, b, r)?);
            let mut ratio = 0.0f64;
            for depth in 1..=r {
                let (ca, cb) = (ma.coarsen(depth)?, mb.coarsen(depth)?);
                for (id, (&x, &y)) in ca.weights.iter().zip(&cb.weights).enumerate() {
                    let zero_a = x <= 0.0;
                    let zero_b = y <= 0.0;
                    if zero_a != zero_b {
                        let word = CylinderIndex::new(fam.alphabet(), depth)?.decode(id)?;
                        return Err(Error::SupportMismatch { witness: word.to_string() });
                    }
                    if !zero_a {
                        ratio = ratio.max((x / y).ln().abs() / depth as f64);
                    }
                }
            }
            Ok(RatioRow { lambda: a, lambda_prime: b, ratio })
        })
        .collect::<Result<_>>()?;
    let fit_pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|row| row.ratio > 0.0 && row.lambda != row.lambda_prime)
        .map(|row| ((row.lambda - row.lambda_prime).abs().ln(), row.ratio.ln()))
        .collect();
    let fit = (fit_pts.len() >= 2).then(|| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = fit_pts.iter().cloned().unzip();
        let (slope, intercept, _) = linear_fit(&xs, &ys);
        (intercept.exp(), slope)
    });
    let lipschitz: Vec<f64> = rows
        .iter()
        .filter(|row| row.lambda != row.lambda_prime)
        .map(|row| row.ratio / (row.lambda - row.lambda_prime).abs())
        .collect();
    let lipschitz_spread = lipschitz
        .iter()
        .cloned()
        .reduce(f64::min)
        .filter(|&lo| lo > 0.0)
        .map(|lo| lipschitz.iter().cloned().fold(0.0, f64::max) / lo);
    Ok(MConditionReport { rows, fit, lipschitz_spread })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{Interval, MapKind};

    fn cantor() -> IfsFamily {
        IfsFamily::new(
            "cantor",
            vec![MapKind::affine(1.0 / 3.0, 0.0), MapKind::affine(1.0 / 3.0, 2.0 / 3.0)],
            Interval::new(0.0, 1.0).unwrap(),
            Interval::point(0.0),
        )
        .unwrap()
    }

    fn fair(fam: &IfsFamily, depth: usize) -> CylinderMeasure {
        let pot = Potential::constant_bernoulli(vec![0.5; fam.alphabet()]).unwrap();
        gibbs_cylinder_measure(&transfer_spectrum(fam, &pot, 0.0, depth).unwrap())
    }

    fn bernoulli_family(lo: f64, hi: f64) -> IfsFamily {
        IfsFamily::new(
            "bernoulli",
            vec![MapKind::BernoulliPsi { sign: -1.0 }, MapKind::BernoulliPsi { sign: 1.0 }],
            Interval::new(-1.0, 1.0).unwrap(),
            Interval::new(lo, hi).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn energy_closed_form() {
        let fam = cantor();
        let mu = fair(&fam, 10);
        for alpha in [0.3, 0.5, 0.7] {
            let e = energy(&fam, 0.0, &mu, alpha, 9).unwrap();
            let q = 3f64.powf(alpha) / 2.0;
            for (n, s) in e.sums.iter().enumerate() {
                let exact = q.powi(n as i32) / 2.0;
                assert!((s - exact).abs() <= 1e-12 * exact, "n={n}: {s} vs {exact}");
            }
            assert!((e.tail_ratio - q).abs() < 1e-12);
        }
        assert!(energy(&fam, 0.0, &mu, 0.5, 9).unwrap().finite_looking);
        assert!(!energy(&fam, 0.0, &mu, 0.7, 9).unwrap().finite_looking);
        let tiny = energy(&fam, 0.0, &mu, 1e-9, 9).unwrap();
        assert!(tiny.sums.iter().all(|&s| (0.0..=1.0).contains(&s)));
        assert!(energy(&fam, 0.0, &mu, 0.5, 10).is_err());
    }

    #[test]
    fn correlation_dimension_examples() {
        let fam = cantor();
        let d = correlation_dimension(&fam, 0.0, &fair(&fam, 10), 9).unwrap();
        assert!((d.value - 2f64.ln() / 3f64.ln()).abs() < 0.01);
        assert!(d.lower <= d.value && d.value <= d.upper);

        let halves = IfsFamily::new(
            "halves",
            vec![MapKind::affine(0.5, 0.0), MapKind::affine(0.5, 0.5)],
            Interval::new(0.0, 1.0).unwrap(),
            Interval::point(0.0),
        )
        .unwrap();
        let d = correlation_dimension(&halves, 0.0, &fair(&halves, 10), 9).unwrap();
        assert!((d.value - 1.0).abs() < 0.01);
    }

    #[test]
    fn chaos_game_examples() {
        let fam = IfsFamily::new(
            "halves",
            vec![MapKind::affine(0.5, -0.5), MapKind::affine(0.5, 0.5)],
            Interval::new(-1.0, 1.0).unwrap(),
            Interval::point(0.0),
        )
        .unwrap();
        let stuck = ProbabilityModel::Linear { intercept: vec![1.0, 0.0], slope: vec![0.0, 0.0] };
        let s = chaos_game_sample(&fam, &stuck, 0.0, 100, 40, 3).unwrap();
        assert!(s.points.iter().all(|&x| (x + 1.0).abs() <= 0.5f64.powi(40) * 2.0));

        let fair = ProbabilityModel::Linear { intercept: vec![0.5, 0.5], slope: vec![0.0, 0.0] };
        let s = chaos_game_sample(&fam, &fair, 0.0, 100_000, 100, 11).unwrap();
        assert!(s.moment(1).abs() <= 4.0 * s.moment_std_error(1));
        assert!((s.moment(2) - 1.0 / 3.0).abs() <= 4.0 * s.moment_std_error(2));
        assert_eq!(s, chaos_game_sample(&fam, &fair, 0.0, 100_000, 100, 11).unwrap());
        let other = chaos_game_sample(&fam, &fair, 0.0, 100_000, 100, 12).unwrap();
        let pooled = (s.moment_std_error(2).powi(2) + other.moment_std_error(2).powi(2)).sqrt();
        assert!((s.moment(2) - other.moment(2)).abs() <= 6.0 * pooled);

        let bad = ProbabilityModel::Linear { intercept: vec![0.6, 0.6], slope: vec![0.0, 0.0] };
        assert!(matches!(chaos_game_sample(&fam, &bad, 0.0, 10, 0, 1), Err(Error::ProbabilityAudit(_))));
        assert!(s.to_csv().starts_with("x\n"));
    }

    #[test]
    fn sobolev_examples() {
        let fam = bernoulli_family(0.3, 0.6);
        let fair = ProbabilityModel::Linear { intercept: vec![0.5, 0.5], slope: vec![0.0, 0.0] };
        let opts = SobolevOptions::default();
        // λ = 1/2 gives the uniform law on [−1, 1]
        let s = chaos_game_sample(&fam.with_parameter(Interval::point(0.5)).unwrap(), &fair, 0.5, 100_000, 100, 5).unwrap();
        let e = sobolev_estimate(&s, 1e3, opts).unwrap();
        assert!(e.dim_s >= 1.7 && e.dim_s <= 2.3, "{}", e.dim_s);
        let cantor_like = chaos_game_sample(&fam, &fair, 1.0 / 3.0, 100_000, 100, 5).unwrap();
        let e = sobolev_estimate(&cantor_like, 1e3, opts).unwrap();
        assert!((e.dim_s - 2f64.ln() / 3f64.ln()).abs() < 0.08, "{}", e.dim_s);
        let dirac = EmpiricalSample { points: vec![0.3; 1000], family: "dirac".into(), lambda: 0.0, seed: 0, burn_in: 0 };
        let e = sobolev_estimate(&dirac, 1e3, opts).unwrap();
        assert_eq!(e.dim_s, 0.0);
        assert!(e.warning.is_some());
    }

    #[test]
    fn m_condition_examples() {
        let fam = bernoulli_family(0.5, 0.7);
        let pot = Potential::log_probability(ProbabilityModel::bernoulli_place_dependent(0.2), &fam).unwrap();
        let same = m_condition_probe(&fam, &pot, &[(0.6, 0.6), (0.55, 0.55), (0.65, 0.65)], 6).unwrap();
        assert!(same.rows.iter().all(|r| r.ratio == 0.0));
        assert!(same.fit.is_none());

        let flat = Potential::constant_bernoulli(vec![0.3, 0.7]).unwrap();
        let pairs = [(0.6, 0.61), (0.6, 0.62), (0.6, 0.65)];
        let rep = m_condition_probe(&fam, &flat, &pairs, 6).unwrap();
        assert!(rep.rows.iter().all(|r| r.ratio < 1e-12));

        let pairs: Vec<(f64, f64)> = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1].iter().map(|d| (0.6 - d / 2.0, 0.6 + d / 2.0)).collect();
        let rep = m_condition_probe(&fam, &pot, &pairs, 8).unwrap();
        let (_, theta) = rep.fit.unwrap();
        assert!(theta >= 0.9, "θ' = {theta}");
        assert!(m_condition_probe(&fam, &pot, &pairs[..2], 8).is_err());
    }
}
