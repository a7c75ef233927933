//! Ready-made families: place-dependent Bernoulli convolutions, Blackwell
//! measures of the noisy binary channel, random continued fractions and
//! self-similar systems, with parameter-region scanners.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ifs::{Curve, IfsFamily, Interval, MapKind};
use crate::report::{num, Csv};
use crate::thermo::{entropy, lyapunov_exponent, transfer_spectrum, Potential, ProbabilityModel};

/// `ψ_0 = λx − (1 − λ)` and `ψ_1 = λx + (1 − λ)` on `[−1, 1]` for `λ ∈ Ū`.
pub fn bernoulli_family(parameter: Interval) -> Result<IfsFamily> {
    if parameter.lo <= 0.0 || parameter.hi >= 1.0 {
        return Err(Error::InvalidInput(format!("λ must lie in (0, 1), got {parameter}")));
    }
    IfsFamily::new(
        "bernoulli",
        vec![MapKind::BernoulliPsi { sign: -1.0 }, MapKind::BernoulliPsi { sign: 1.0 }],
        Interval::new(-1.0, 1.0)?,
        parameter,
    )
}

/// `log p` potential with `p_1 = 1/2 + ρx` on `ψ_0` and `p_2 = 1/2 − ρx` on `ψ_1`.
pub fn bernoulli_potential(rho: f64, fam: &IfsFamily) -> Result<Potential> {
    if !(0.0..0.5).contains(&rho) {
        return Err(Error::InvalidInput(format!("ρ must lie in [0, 1/2), got {rho}")));
    }
    Potential::log_probability(ProbabilityModel::bernoulli_place_dependent(rho), fam)
}

fn check_bernoulli(lambda: f64, rho: f64, n: usize) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidInput(format!("λ must lie in (0, 1), got {lambda}")));
    }
    if !(0.0..0.5).contains(&rho) {
        return Err(Error::InvalidInput(format!("ρ must lie in [0, 1/2), got {rho}")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    Ok(())
}

/// Even moments `F_n = ∫ x^{2n} dν` for `n = 0..=N` by the moment recursion.
pub fn bernoulli_moments(lambda: f64, rho: f64, n_max: usize) -> Result<Vec<f64>> {
    check_bernoulli(lambda, rho, n_max)?;
    let mu = 1.0 - lambda;
    let mut f = vec![1.0];
    // binomial row C(2n, ·), rebuilt per n
    for n in 1..=n_max {
        let nn = n as f64;
        let den = 1.0 + lambda.powi(2 * n as i32 - 1) * (4.0 * nn * rho * mu - lambda);
        if den.abs() < 1e-12 {
            return Err(Error::SingularDenominator { n, value: den });
        }
        let binom = binomial_row(2 * n);
        let mut acc = mu.powi(2 * n as i32);
        for m in 1..n {
            let mm = m as f64;
            acc += 2.0 * mm
                * mu.powi(2 * (n - m) as i32)
                * lambda.powi(2 * m as i32 - 1)
                * binom[2 * m]
                * (lambda / (2.0 * mm) - 2.0 * rho * mu / (2.0 * (nn - mm) + 1.0))
                * f[m];
        }
        f.push(acc / den);
    }
    Ok(f)
}

fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * (n - k + 1) as f64 / k as f64;
    }
    row
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Entropy sandwich from the first `N` even moments.
pub fn bernoulli_entropy_bounds(lambda: f64, rho: f64, n_max: usize) -> Result<EntropyBounds> {
    let f = bernoulli_moments(lambda, rho, n_max)?;
    let q = 2.0 * rho;
    let series: f64 = (1..=n_max)
        .map(|n| {
            let k = 2.0 * n as f64;
            q.powi(2 * n as i32) / (k * (k - 1.0)) * f[n]
        })
        .sum();
    let upper = 2f64.ln() - series;
    let big = n_max as f64;
    let tail = q.powi(n_max as i32 + 1) / ((2.0 * big + 2.0) * (2.0 * big + 1.0) * (1.0 - q * q));
    Ok(EntropyBounds { lower: upper - tail, upper })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellVerdict {
    Supercritical,
    Subcritical,
    Degenerate,
    AuditFail,
}

impl fmt::Display for CellVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellVerdict::Supercritical => "SUPERCRITICAL",
            CellVerdict::Subcritical => "SUBCRITICAL",
            CellVerdict::Degenerate => "DEGENERATE",
            CellVerdict::AuditFail => "AUDIT-FAIL",
        })
    }
}

/// Axis of a region scan: `n` equally spaced points including both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub range: Interval,
    pub points: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64, points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidInput("axis needs at least one point".into()));
        }
        Ok(Self { name: name.into(), range: Interval::new(lo, hi)?, points })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.range.lo];
        }
        self.range.grid(self.points)
    }
}

/// Cell values and verdicts over a two-parameter grid, row-major by axis 1.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionGrid {
    pub axis1: Axis,
    pub axis2: Axis,
    pub values: Vec<f64>,
    pub verdicts: Vec<CellVerdict>,
    /// Cell-level failure messages, by cell index.
    pub notes: Vec<(usize, String)>,
}

impl RegionGrid {
    fn scan(axis1: Axis, axis2: Axis, cell: impl Fn(f64, f64) -> (f64, CellVerdict, Option<String>) + Sync) -> Self {
        let (a, b) = (axis1.values(), axis2.values());
        let cells: Vec<(f64, f64)> = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect();
        let out: Vec<_> = cells.par_iter().map(|&(x, y)| cell(x, y)).collect();
        let mut values = Vec::with_capacity(out.len());
        let mut verdicts = Vec::with_capacity(out.len());
        let mut notes = Vec::new();
        for (k, (v, verdict, note)) in out.into_iter().enumerate() {
            values.push(v);
            verdicts.push(verdict);
            if let Some(n) = note {
                notes.push((k, n));
            }
        }
        Self { axis1, axis2, values, verdicts, notes }
    }

    /// Value and verdict at grid indices `(i, j)`.
    pub fn cell(&self, i: usize, j: usize) -> (f64, CellVerdict) {
        let k = i * self.axis2.points + j;
        (self.values[k], self.verdicts[k])
    }

    pub fn count(&self, verdict: CellVerdict) -> usize {
        self.verdicts.iter().filter(|&&v| v == verdict).count()
    }

    /// `axis1,axis2,value,verdict`.
    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(&["axis1", "axis2", "value", "verdict"]);
        let (a, b) = (self.axis1.values(), self.axis2.values());
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let (v, verdict) = self.cell(i, j);
                csv.row([num(*x), num(*y), num(v), verdict.to_string()]);
            }
        }
        csv.into_string()
    }
}

/// Scan over `ρ` (axis 1) and `λ` (axis 2); value `lower + log λ`.
pub fn bernoulli_region_scan(rho: Axis, lambda: Axis, n_max: usize) -> RegionGrid {
    RegionGrid::scan(rho, lambda, |r, l| match bernoulli_entropy_bounds(l, r, n_max) {
        Ok(b) => {
            let v = b.lower + l.ln();
            (v, if v > 0.0 { CellVerdict::Supercritical } else { CellVerdict::Subcritical }, None)
        }
        Err(e) => (f64::NAN, CellVerdict::AuditFail, Some(e.to_string())),
    })
}

/// The Blackwell maps with their place-dependent probabilities.
#[derive(Clone, Debug)]
pub struct BlackwellSystem {
    pub eps: f64,
    pub p: f64,
    pub family: IfsFamily,
    pub probabilities: ProbabilityModel,
    /// `ε = 1/2`: both maps coincide and the stationary measure is the Dirac mass at 1/2.
    pub degenerate: bool,
}

pub fn blackwell_family(eps: f64, p: f64) -> Result<BlackwellSystem> {
    for (name, v) in [("ε", eps), ("p", p)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidInput(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    let family = IfsFamily::new(
        format!("blackwell(eps={eps}, p={p})"),
        vec![
            MapKind::BlackwellS0 { eps: Curve::constant(eps), p: Curve::constant(p) },
            MapKind::BlackwellS1 { eps: Curve::constant(eps), p: Curve::constant(p) },
        ],
        Interval::new(0.0, 1.0)?,
        Interval::point(0.0),
    )?;
    Ok(BlackwellSystem {
        eps,
        p,
        family,
        probabilities: ProbabilityModel::blackwell(eps, p),
        degenerate: (eps - 0.5).abs() < 1e-12,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlackwellCell {
    pub entropy: f64,
    pub lyapunov: f64,
    pub ratio: f64,
    pub truncation_bound: f64,
}

/// `h/χ` of the Blackwell measure from a depth-`r` transfer spectrum.
pub fn blackwell_ratio(eps: f64, p: f64, r: usize) -> Result<BlackwellCell> {
    let sys = blackwell_family(eps, p)?;
    let pot = Potential::log_probability(sys.probabilities.clone(), &sys.family)?;
    let spec = transfer_spectrum(&sys.family, &pot, 0.0, r)?;
    let h = entropy(&spec).value;
    let chi = lyapunov_exponent(&sys.family, 0.0, &spec.extended_measure())?;
    if !(chi.is_finite() && chi > 0.0) {
        return Err(Error::NonFinite { what: format!("Lyapunov exponent {chi}") });
    }
    Ok(BlackwellCell { entropy: h, lyapunov: chi, ratio: h / chi, truncation_bound: spec.truncation_bound })
}

/// Scan over `ε` (axis 1) and `p` (axis 2); value `h/χ`.
pub fn blackwell_region_scan(eps: Axis, p: Axis, r: usize) -> RegionGrid {
    RegionGrid::scan(eps, p, |e, q| {
        if (e - 0.5).abs() < 1e-12 {
            // Dirac mass at 1/2: zero entropy
            return (0.0, CellVerdict::Degenerate, None);
        }
        match blackwell_ratio(e, q, r) {
            Ok(c) => (c.ratio, if c.ratio > 1.0 { CellVerdict::Supercritical } else { CellVerdict::Subcritical }, None),
            Err(err) => (f64::NAN, CellVerdict::AuditFail, Some(err.to_string())),
        }
    })
}

/// `(√(c² + 4c) − c)/2`, the fixed point of `x ↦ (x+c)/(x+c+1)`.
pub fn cf_fixed_point(c: f64) -> f64 {
    ((c * c + 4.0 * c).sqrt() - c) / 2.0
}

/// `x ↦ (x+α)/(x+α+1)` and `x ↦ (x+β)/(x+β+1)` on the hull of their attractor.
pub fn cf_family(alpha: f64, beta: f64) -> Result<IfsFamily> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("α must be positive (α = 0 is parabolic), got {alpha}")));
    }
    if !(beta > alpha) {
        return Err(Error::InvalidInput(format!("need α < β, got α = {alpha}, β = {beta}")));
    }
    IfsFamily::new(
        format!("cf(alpha={alpha}, beta={beta})"),
        vec![
            MapKind::MoebiusShift { shift: Curve::constant(alpha) },
            MapKind::MoebiusShift { shift: Curve::constant(beta) },
        ],
        Interval::new(cf_fixed_point(alpha), cf_fixed_point(beta))?,
        Interval::point(0.0),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfOverlap {
    pub overlapping: bool,
    /// `β + α + 4 − 3(√(β² + 4β) + √(α² + 4α))`.
    pub slack: f64,
}

pub fn cf_overlap(alpha: f64, beta: f64) -> Result<CfOverlap> {
    if !(alpha >= 0.0 && beta > alpha) {
        return Err(Error::InvalidInput(format!("need 0 ≤ α < β, got α = {alpha}, β = {beta}")));
    }
    let slack = beta + alpha + 4.0 - 3.0 * ((beta * beta + 4.0 * beta).sqrt() + (alpha * alpha + 4.0 * alpha).sqrt());
    Ok(CfOverlap { overlapping: slack > 0.0, slack })
}

/// Root of `Σ r_j^s = 1`; `0` for a single map.
pub fn similarity_dimension(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() || ratios.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::InvalidInput(format!("ratios must lie in (0, 1): {ratios:?}")));
    }
    if ratios.len() == 1 {
        return Ok(0.0);
    }
    let f = |s: f64| ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `x ↦ r_j x + t_j` on `domain`.
pub fn similarity_family(ratios: &[f64], translations: &[f64], domain: Interval) -> Result<IfsFamily> {
    if ratios.len() != translations.len() || ratios.is_empty() {
        return Err(Error::InvalidInput("need one translation per ratio".into()));
    }
    let maps = ratios.iter().zip(translations).map(|(&r, &t)| MapKind::affine(r, t)).collect();
    IfsFamily::new("similarity", maps, domain, Interval::point(0.0))
}
