//! Transversality certificates for vertical translation families and
//! Monte-Carlo probing of the transversality condition for general families.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ifs::{Curve, IfsFamily, Interval, MapKind};
use crate::report::{num, Csv, KeyValues};
use crate::symbolic::SymbolWord;

/// Points used for sweeps over the parameter interval.
pub const LAMBDA_SWEEP: usize = 1024;

/// `f_j^λ = f_j + a_j(λ)` with λ-independent base maps.
#[derive(Clone, Debug)]
pub struct TranslationFamily {
    base: IfsFamily,
    base_lambda: f64,
    translations: Vec<Curve>,
    family: IfsFamily,
}

impl TranslationFamily {
    /// `base` is evaluated at `base_lambda`; `translations[j]` is `a_{j+1}`.
    pub fn new(base: &IfsFamily, base_lambda: f64, translations: Vec<Curve>, parameter: Interval) -> Result<Self> {
        if translations.len() != base.alphabet() {
            return Err(Error::InvalidInput(format!(
                "need {} translation curves, got {}",
                base.alphabet(),
                translations.len()
            )));
        }
        if !base.is_mobius() {
            return Err(Error::InvalidInput("translation families need built-in base maps".into()));
        }
        base.check_lambda(base_lambda)?;
        let base = base.with_parameter(Interval::point(base_lambda))?;
        let maps = base
            .maps()
            .iter()
            .zip(&translations)
            .map(|(m, a)| MapKind::Translated { base: Box::new(m.clone()), frozen_lambda: base_lambda, shift: a.clone() })
            .collect();
        let family = IfsFamily::new(format!("{}+translation", base.name()), maps, base.domain(), parameter)?;
        if translations.iter().any(|a| a.coeffs().iter().any(|c| !c.is_finite())) {
            return Err(Error::NonFinite { what: "translation coefficients".into() });
        }
        Ok(Self { base, base_lambda, translations, family })
    }

    /// Places where `f_j(X) + a_j(λ)` leaves `X` for some `λ`.
    pub fn invariance_failures(&self) -> Vec<String> {
        let dom = self.family.domain();
        let tol = 1e-12 * dom.len();
        let mut failures = Vec::new();
        for (j, a) in self.translations.iter().enumerate() {
            let image = self.base_image(j + 1, &dom);
            let (lo, hi) = curve_range(a, &self.family.parameter());
            if image.lo + lo < dom.lo - tol || image.hi + hi > dom.hi + tol {
                failures.push(format!("map {} leaves X = {dom} under translations in [{lo}, {hi}]", j + 1));
            }
        }
        failures
    }

    pub fn family(&self) -> &IfsFamily {
        &self.family
    }

    pub fn base(&self) -> &IfsFamily {
        &self.base
    }

    pub fn translations(&self) -> &[Curve] {
        &self.translations
    }

    pub fn alphabet(&self) -> usize {
        self.base.alphabet()
    }

    fn base_image(&self, j: usize, iv: &Interval) -> Interval {
        self.base.at_unchecked(self.base_lambda).image(&[j], iv)
    }

    /// `sup |f_j'|` over `iv` (Möbius maps: endpoints).
    fn base_norm(&self, j: usize, iv: &Interval) -> f64 {
        let frozen = self.base.at_unchecked(self.base_lambda);
        [iv.lo, iv.hi].iter().fold(0.0f64, |a, &x| a.max(frozen.dx(j, x).abs()))
    }

    /// `f_j^{-1}(iv)` for `iv ⊆ f_j(X)`, by bisection on the monotone map.
    fn base_preimage(&self, j: usize, iv: &Interval) -> Interval {
        let frozen = self.base.at_unchecked(self.base_lambda);
        let dom = self.base.domain();
        let increasing = frozen.value(j, dom.hi) >= frozen.value(j, dom.lo);
        let solve = |y: f64| {
            let (mut lo, mut hi) = (dom.lo, dom.hi);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (frozen.value(j, mid) < y) == increasing {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        Interval::spanning(solve(iv.lo), solve(iv.hi))
    }

    /// `‖a_j'‖ = sup |a_j'|` over the parameter interval.
    pub fn translation_speed(&self, j: usize) -> f64 {
        let a = &self.translations[j - 1];
        self.family.parameter().grid(LAMBDA_SWEEP).iter().fold(0.0f64, |m, &l| m.max(a.derivative(l).abs()))
    }

    /// `D_max = max_i ‖a_i'‖ / (1 − ‖f_i'‖)`.
    pub fn d_max(&self) -> f64 {
        let dom = self.base.domain();
        (1..=self.alphabet())
            .map(|i| self.translation_speed(i) / (1.0 - self.base_norm(i, &dom)))
            .fold(0.0, f64::max)
    }

    /// `X_ij`: the part of `X` that `f_i` sends into the reach of the
    /// translated `j`-cylinder over the whole parameter interval.
    pub fn overlap_domain(&self, i: usize, j: usize) -> Result<Option<Interval>> {
        let m = self.alphabet();
        for s in [i, j] {
            if s == 0 || s > m {
                return Err(Error::SymbolOutOfRange { symbol: s, alphabet: m });
            }
        }
        if i == j {
            return Err(Error::InvalidInput("overlap domain needs i ≠ j".into()));
        }
        let dom = self.base.domain();
        let diff = Curve::polynomial(sub_coeffs(self.translations[j - 1].coeffs(), self.translations[i - 1].coeffs()));
        let (lo, hi) = curve_range(&diff, &self.family.parameter());
        let fj = self.base_image(j, &dom);
        let reach = Interval { lo: fj.lo + lo, hi: fj.hi + hi };
        let fi = self.base_image(i, &dom);
        Ok(reach.intersect(&fi).map(|target| self.base_preimage(i, &target)))
    }

    /// `η_ij = min_λ |a_i'(λ) − a_j'(λ)|`, padded by the sampled curvature.
    pub fn eta(&self, i: usize, j: usize) -> f64 {
        let diff = Curve::polynomial(sub_coeffs(self.translations[i - 1].coeffs(), self.translations[j - 1].coeffs()));
        let u = self.family.parameter();
        let grid = u.grid(LAMBDA_SWEEP);
        let step = if grid.len() > 1 { u.len() / (grid.len() - 1) as f64 } else { 0.0 };
        let curvature = grid.iter().fold(0.0f64, |m, &l| m.max(diff.second_derivative(l).abs()));
        let min = grid.iter().fold(f64::INFINITY, |m, &l| m.min(diff.derivative(l).abs()));
        (min - 0.5 * step * curvature).max(0.0)
    }

    /// Certificate from the sufficient conditions for vertical families.
    pub fn vertical_certificate(&self) -> TransversalityReport {
        let m = self.alphabet();
        let d_max = self.d_max();
        let dom = self.base.domain();
        let frozen = self.base.at_unchecked(self.base_lambda);
        let increasing = (1..=m).all(|j| frozen.dx(j, dom.lo) > 0.0 && frozen.dx(j, dom.hi) > 0.0);
        let u = self.family.parameter();
        let nondecreasing = self
            .translations
            .iter()
            .all(|a| u.grid(LAMBDA_SWEEP).iter().all(|&l| a.derivative(l) >= 0.0));
        let notes = self.invariance_failures();
        let mut pairs = Vec::new();
        for i in 1..=m {
            for j in i + 1..=m {
                let x_ij = self.overlap_domain(i, j).expect("valid symbols");
                let x_ji = self.overlap_domain(j, i).expect("valid symbols");
                let norm_i = x_ij.map_or(0.0, |iv| self.base_norm(i, &iv));
                let norm_j = x_ji.map_or(0.0, |iv| self.base_norm(j, &iv));
                let eta = self.eta(i, j);
                let (margin1, margin2) = if x_ij.is_none() && x_ji.is_none() {
                    (None, None)
                } else {
                    let m1 = eta - (norm_i + norm_j) * d_max;
                    let m2 = if increasing && nondecreasing {
                        // orient so that a_i' − a_j' > 0; the trailing map's norm enters
                        let mid = u.midpoint();
                        let lead_is_i = self.translations[i - 1].derivative(mid) >= self.translations[j - 1].derivative(mid);
                        let trailing = if lead_is_i { norm_j } else { norm_i };
                        Some(eta - trailing * d_max)
                    } else {
                        None
                    };
                    (Some(m1), m2)
                };
                pairs.push(PairCertificate { i, j, x_ij, x_ji, norm_i, norm_j, eta, margin1, margin2 });
            }
        }
        let active: Vec<&PairCertificate> = pairs.iter().filter(|p| p.margin1.is_some()).collect();
        let verdict = if !notes.is_empty() {
            Verdict::Inconclusive
        } else if active.iter().all(|p| p.margin1.unwrap() > 0.0) {
            Verdict::CertifiedCond1
        } else if increasing && nondecreasing && active.iter().all(|p| p.margin2.is_some_and(|v| v > 0.0)) {
            Verdict::CertifiedCond2
        } else {
            Verdict::Inconclusive
        };
        TransversalityReport { pairs, d_max, verdict, notes }
    }
}

fn sub_coeffs(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n).map(|k| a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).collect()
}

/// Range of a curve over an interval: grid extremes widened by
/// half a step times the sampled derivative bound.
fn curve_range(c: &Curve, u: &Interval) -> (f64, f64) {
    if c.is_constant() {
        let v = c.value(u.lo);
        return (v, v);
    }
    let grid = u.grid(LAMBDA_SWEEP);
    let step = if grid.len() > 1 { u.len() / (grid.len() - 1) as f64 } else { 0.0 };
    let (mut lo, mut hi, mut slope) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &l in &grid {
        let v = c.value(l);
        lo = lo.min(v);
        hi = hi.max(v);
        slope = slope.max(c.derivative(l).abs());
    }
    // linear curves attain their extremes at the grid endpoints
    let pad = if c.coeffs().len() <= 2 { 0.0 } else { 0.5 * step * slope };
    (lo - pad, hi + pad)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CertifiedCond1,
    CertifiedCond2,
    Inconclusive,
    Falsified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CertifiedCond1 => "CERTIFIED-cond1",
            Verdict::CertifiedCond2 => "CERTIFIED-cond2",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Falsified => "FALSIFIED",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairCertificate {
    pub i: usize,
    pub j: usize,
    pub x_ij: Option<Interval>,
    pub x_ji: Option<Interval>,
    /// `‖f_i'‖` over `X_ij`.
    pub norm_i: f64,
    /// `‖f_j'‖` over `X_ji`.
    pub norm_j: f64,
    pub eta: f64,
    /// `None` when both overlap domains are empty.
    pub margin1: Option<f64>,
    pub margin2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransversalityReport {
    pub pairs: Vec<PairCertificate>,
    pub d_max: f64,
    pub verdict: Verdict,
    /// Audit failures that block certification.
    pub notes: Vec<String>,
}

fn interval_cell(iv: &Option<Interval>) -> (String, String) {
    iv.map_or(("".into(), "".into()), |iv| (num(iv.lo), num(iv.hi)))
}

impl TransversalityReport {
    pub fn min_margin(&self) -> Option<f64> {
        self.pairs.iter().filter_map(|p| p.margin1).reduce(f64::min)
    }

    pub fn to_text(&self) -> String {
        let mut kv = KeyValues::new();
        kv.push("verdict", self.verdict).push("d_max", num(self.d_max)).push("pairs", self.pairs.len());
        if let Some(m) = self.min_margin() {
            kv.push("min_margin1", num(m));
        }
        for n in &self.notes {
            kv.push("note", n);
        }
        kv.into_string()
    }

    /// Per-pair margins as CSV.
    pub fn margins_csv(&self) -> String {
        let mut csv = Csv::new(&[
            "i", "j", "xij_lo", "xij_hi", "xji_lo", "xji_hi", "norm_i", "norm_j", "eta", "margin1", "margin2",
        ]);
        for p in &self.pairs {
            let (a, b) = interval_cell(&p.x_ij);
            let (c, d) = interval_cell(&p.x_ji);
            csv.row([
                p.i.to_string(),
                p.j.to_string(),
                a,
                b,
                c,
                d,
                num(p.norm_i),
                num(p.norm_j),
                num(p.eta),
                p.margin1.map_or(String::new(), num),
                p.margin2.map_or(String::new(), num),
            ]);
        }
        csv.into_string()
    }
}

/// Classes `I_1` (κ = +1) and `I_{−1}` (κ = −1), as 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

impl Partition {
    /// `κ(j)` for `j = 1..=n`.
    pub fn kappa(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|j| if self.minus.contains(&j) { -1.0 } else { 1.0 }).collect()
    }
}

/// Splits closed intervals into two classes of pairwise disjoint members,
/// provided no point is covered more than twice.
pub fn greedy_partition(intervals: &[Interval]) -> Result<Partition> {
    if intervals.is_empty() {
        return Err(Error::InvalidInput("no intervals to partition".into()));
    }
    // coverage of closed intervals peaks at some left endpoint
    for iv in intervals {
        let count = intervals.iter().filter(|o| o.contains(iv.lo, 0.0)).count();
        if count > 2 {
            return Err(Error::Multiplicity { point: iv.lo, count });
        }
    }
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&intervals[a], &intervals[b]);
        x.lo.total_cmp(&y.lo).then(y.len().total_cmp(&x.len())).then(a.cmp(&b))
    });
    let mut plus = vec![order[0]];
    for &k in &order[1..] {
        if intervals[k].lo > intervals[*plus.last().unwrap()].hi {
            plus.push(k);
        }
    }
    let minus: Vec<usize> = order.iter().copied().filter(|k| !plus.contains(k)).collect();
    for class in [&plus, &minus] {
        for (a, &x) in class.iter().enumerate() {
            for &y in &class[a + 1..] {
                if intervals[x].intersect(&intervals[y]).is_some() {
                    return Err(Error::InvalidInput(format!("classes intersect at intervals {} and {}", x + 1, y + 1)));
                }
            }
        }
    }
    let mut plus: Vec<usize> = plus.into_iter().map(|k| k + 1).collect();
    let mut minus: Vec<usize> = minus.into_iter().map(|k| k + 1).collect();
    plus.sort_unstable();
    minus.sort_unstable();
    Ok(Partition { plus, minus })
}

#[derive(Clone, Debug)]
pub struct PmTranslation {
    pub family: TranslationFamily,
    pub kappa: Vec<f64>,
    pub halfwidth: f64,
    /// Set when the base contraction reaches 1/2.
    pub warning: Option<String>,
}

/// `f_j + κ(j) λ` on `[−h, h]`, halving `h` until the translated system
/// stays inside `X`. Without an explicit `κ`, the greedy partition of the
/// first-level cylinders at `base_lambda` is used.
pub fn build_pm_translation(
    base: &IfsFamily,
    base_lambda: f64,
    kappa: Option<Vec<f64>>,
    halfwidth: f64,
) -> Result<PmTranslation> {
    if !(halfwidth > 0.0 && halfwidth.is_finite()) {
        return Err(Error::InvalidInput(format!("half-width must be positive, got {halfwidth}")));
    }
    let m = base.alphabet();
    let frozen = base.at(base_lambda)?;
    let dom = base.domain();
    let cylinders: Vec<Interval> = (1..=m).map(|j| frozen.image(&[j], &dom)).collect();
    let kappa = match kappa {
        Some(k) => {
            if k.len() != m || k.iter().any(|&v| v != 1.0 && v != -1.0) {
                return Err(Error::InvalidInput("κ must list ±1 for every map".into()));
            }
            k
        }
        None => greedy_partition(&cylinders)?.kappa(m),
    };
    // translations within a class are equal, so disjointness there does not depend on λ
    for a in 0..m {
        for b in a + 1..m {
            if kappa[a] == kappa[b] && cylinders[a].intersect(&cylinders[b]).is_some() {
                return Err(Error::InvalidInput(format!("maps {} and {} share a class but overlap", a + 1, b + 1)));
            }
        }
    }
    let tol = 1e-12 * dom.len();
    let fits = |h: f64| {
        cylinders.iter().all(|c| c.lo - h >= dom.lo - tol && c.hi + h <= dom.hi + tol)
    };
    let mut h = halfwidth;
    while !fits(h) {
        h *= 0.5;
        if h < 1e-6 * dom.len() {
            return Err(Error::NoHalfwidth(format!("no translation keeps the cylinders inside {dom}")));
        }
    }
    let warning = (base.bounds().gamma2 >= 0.5)
        .then(|| format!("base contraction γ2 ≈ {} is not below 1/2", base.bounds().gamma2));
    let translations = kappa.iter().map(|&k| Curve::linear(0.0, k)).collect();
    let family = TranslationFamily::new(base, base_lambda, translations, Interval::new(-h, h)?)?;
    Ok(PmTranslation { family, kappa, halfwidth: h, warning })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeOptions {
    pub samples: usize,
    pub depth: usize,
    /// Near-collision threshold; defaults to `1e−3 |X|`.
    pub eta0: Option<f64>,
    pub seed: u64,
    pub lambda_grid: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { samples: 10_000, depth: 40, eta0: None, seed: 0, lambda_grid: 64 }
    }
}

pub const FALSIFY_VALUE_TOL: f64 = 1e-9;
pub const FALSIFY_DERIVATIVE_TOL: f64 = 1e-6;
const BATCH: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub u: SymbolWord,
    pub v: SymbolWord,
    pub lambda: f64,
    pub phi: f64,
    pub dphi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeVerdict {
    NotFalsified,
    Falsified,
}

impl fmt::Display for ProbeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbeVerdict::NotFalsified => "NOT-FALSIFIED",
            ProbeVerdict::Falsified => "FALSIFIED",
        })
    }
}

/// Monte-Carlo evidence about the transversality condition. Never a proof.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub samples: usize,
    pub depth: usize,
    pub eta0: f64,
    /// Number of `(pair, λ)` events with `|Φ| < η₀`.
    pub events: usize,
    /// `min |dΦ/dλ|` over the events.
    pub empirical_eta: Option<f64>,
    pub min_abs_phi: f64,
    pub falsifications: usize,
    pub verdict: ProbeVerdict,
    pub witness: Option<Witness>,
}

impl ProbeReport {
    pub fn to_text(&self) -> String {
        let mut kv = KeyValues::new();
        kv.push("verdict", self.verdict)
            .push("samples", self.samples)
            .push("depth", self.depth)
            .push("eta0", num(self.eta0))
            .push("events", self.events)
            .push("empirical_eta", self.empirical_eta.map_or("none".into(), num))
            .push("min_abs_phi", num(self.min_abs_phi))
            .push("falsifications", self.falsifications);
        if let Some(w) = &self.witness {
            kv.push("witness_u", &w.u)
                .push("witness_v", &w.v)
                .push("witness_lambda", num(w.lambda))
                .push("witness_phi", num(w.phi))
                .push("witness_dphi", num(w.dphi));
        }
        kv.into_string()
    }
}

struct BatchResult {
    events: usize,
    eta: f64,
    min_phi: f64,
    falsifications: usize,
    witness: Option<Witness>,
}

/// Samples pairs of words with different first symbols and scans a grid of
/// parameters for near-collisions `|Φ| < η₀`, where `Φ = Π^λ(u) − Π^λ(v)`.
/// The parameter derivative is propagated along the composition; maps
/// without closed-form derivatives fall back to central differences.
pub fn mc_transversality_probe(fam: &IfsFamily, opts: &ProbeOptions) -> Result<ProbeReport> {
    let m = fam.alphabet();
    if m < 2 {
        return Err(Error::InvalidInput("the probe needs at least two maps".into()));
    }
    if opts.samples == 0 || opts.depth == 0 || opts.lambda_grid == 0 {
        return Err(Error::InvalidInput("samples, depth and λ grid must be positive".into()));
    }
    let width = fam.domain().len();
    let eta0 = opts.eta0.unwrap_or(1e-3 * width);
    let lambdas = fam.parameter().grid(opts.lambda_grid.max(2));
    let frozen: Vec<_> = lambdas.iter().map(|&l| fam.at_unchecked(l)).collect();
    let x0 = fam.domain().midpoint();
    let batches = opts.samples.div_ceil(BATCH);
    let results: Vec<BatchResult> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(opts.samples - b * BATCH);
            let mut out = BatchResult { events: 0, eta: f64::INFINITY, min_phi: f64::INFINITY, falsifications: 0, witness: None };
            let mut u = vec![0usize; opts.depth];
            let mut v = vec![0usize; opts.depth];
            for _ in 0..count {
                u[0] = rng.gen_range(1..=m);
                v[0] = rng.gen_range(1..m);
                if v[0] >= u[0] {
                    v[0] += 1;
                }
                for k in 1..opts.depth {
                    u[k] = rng.gen_range(1..=m);
                    v[k] = rng.gen_range(1..=m);
                }
                for (li, f) in frozen.iter().enumerate() {
                    let (pu, du) = f.project_with_derivative(&u, x0);
                    let (pv, dv) = f.project_with_derivative(&v, x0);
                    let phi = pu - pv;
                    let dphi = du - dv;
                    out.min_phi = out.min_phi.min(phi.abs());
                    if phi.abs() < eta0 {
                        out.events += 1;
                        out.eta = out.eta.min(dphi.abs());
                        if phi.abs() < FALSIFY_VALUE_TOL * width && dphi.abs() < FALSIFY_DERIVATIVE_TOL {
                            out.falsifications += 1;
                            if out.witness.is_none() {
                                out.witness = Some(Witness {
                                    u: SymbolWord::new(u.clone(), m).expect("sampled symbols are valid"),
                                    v: SymbolWord::new(v.clone(), m).expect("sampled symbols are valid"),
                                    lambda: lambdas[li],
                                    phi,
                                    dphi,
                                });
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut events = 0;
    let mut eta = f64::INFINITY;
    let mut min_phi = f64::INFINITY;
    let mut falsifications = 0;
    let mut witness = None;
    for r in results {
        events += r.events;
        eta = eta.min(r.eta);
        min_phi = min_phi.min(r.min_phi);
        falsifications += r.falsifications;
        if witness.is_none() {
            witness = r.witness;
        }
    }
    Ok(ProbeReport {
        samples: opts.samples,
        depth: opts.depth,
        eta0,
        events,
        empirical_eta: (events > 0).then_some(eta),
        min_abs_phi: min_phi,
        falsifications,
        verdict: if falsifications > 0 { ProbeVerdict::Falsified } else { ProbeVerdict::NotFalsified },
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn affine_base(maps: &[(f64, f64)]) -> IfsFamily {
        IfsFamily::new(
            "base",
            maps.iter().map(|&(a, b)| MapKind::affine(a, b)).collect(),
            unit(),
            Interval::point(0.0),
        )
        .unwrap()
    }

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn overlap_domain_examples() {
        let base = affine_base(&[(0.3, 0.0), (0.3, 0.5)]);
        let tf = TranslationFamily::new(&base, 0.0, vec![Curve::identity(), Curve::linear(0.0, -1.0)], iv(-0.05, 0.05))
            .unwrap();
        // reach of the second cylinder is [0.4, 0.9]; the first cylinder is [0, 0.3]
        assert_eq!(tf.overlap_domain(1, 2).unwrap(), None);
        assert_eq!(tf.overlap_domain(2, 1).unwrap(), None);
        // f_1(0) − 0.05 leaves X, so this family cannot be certified
        assert!(!tf.invariance_failures().is_empty());
        assert_eq!(tf.vertical_certificate().verdict, Verdict::Inconclusive);

        let same = affine_base(&[(0.5, 0.25), (0.5, 0.25)]);
        let tf = TranslationFamily::new(&same, 0.0, vec![Curve::constant(0.0), Curve::constant(0.0)], iv(-0.1, 0.1))
            .unwrap();
        let x = tf.overlap_domain(1, 2).unwrap().unwrap();
        assert!((x.lo - 0.0).abs() < 1e-12 && (x.hi - 1.0).abs() < 1e-12);

        let base = affine_base(&[(0.3, 0.15), (0.3, 0.55)]);
        let tf = TranslationFamily::new(&base, 0.0, vec![Curve::identity(), Curve::linear(0.0, -1.0)], iv(-0.1, 0.1))
            .unwrap();
        // reach [0.35, 1.05] ∩ [0.15, 0.45] = [0.35, 0.45], pulled back by f_1
        let x = tf.overlap_domain(1, 2).unwrap().unwrap();
        assert!((x.lo - 2.0 / 3.0).abs() < 1e-9 && (x.hi - 1.0).abs() < 1e-9, "{x}");
        assert!(tf.overlap_domain(1, 1).is_err());
    }

    #[test]
    fn certificate_examples() {
        let base = affine_base(&[(0.3, 0.15), (0.3, 0.55)]);
        let pm = build_pm_translation(&base, 0.0, Some(vec![1.0, -1.0]), 0.1).unwrap();
        assert_eq!(pm.halfwidth, 0.1);
        assert!(pm.warning.is_none());
        let report = pm.family.vertical_certificate();
        assert_eq!(report.verdict, Verdict::CertifiedCond1);
        assert!((report.d_max - 1.0 / 0.7).abs() < 1e-12);
        let pair = &report.pairs[0];
        assert!((pair.eta - 2.0).abs() < 1e-12);
        assert!((pair.margin1.unwrap() - (2.0 - 0.6 / 0.7)).abs() < 1e-9);

        let wide = affine_base(&[(0.6, 0.05), (0.6, 0.35)]);
        let pm = build_pm_translation(&wide, 0.0, Some(vec![1.0, -1.0]), 0.04).unwrap();
        assert!(pm.warning.is_some());
        let report = pm.family.vertical_certificate();
        assert!((report.pairs[0].margin1.unwrap() + 1.0).abs() < 1e-9);
        assert_eq!(report.verdict, Verdict::Inconclusive);

        let apart = affine_base(&[(0.2, 0.05), (0.2, 0.75)]);
        let tf = TranslationFamily::new(&apart, 0.0, vec![Curve::identity(), Curve::linear(0.0, -1.0)], iv(-0.01, 0.01))
            .unwrap();
        let report = tf.vertical_certificate();
        assert_eq!(report.verdict, Verdict::CertifiedCond1);
        assert!(report.pairs[0].margin1.is_none());
        assert!(report.margins_csv().starts_with("i,j,"));
    }

    #[test]
    fn cond2_applies_to_increasing_translations() {
        let base = affine_base(&[(0.45, 0.0), (0.45, 0.4)]);
        let tf = TranslationFamily::new(&base, 0.0, vec![Curve::linear(0.0, 1.0), Curve::constant(0.0)], iv(0.0, 0.1))
            .unwrap();
        let report = tf.vertical_certificate();
        // η = 1, D_max = 1/0.55, cond1: 1 − 0.9/0.55 < 0, cond2: 1 − 0.45/0.55 > 0
        assert!(report.pairs[0].margin1.unwrap() < 0.0);
        assert!(report.pairs[0].margin2.unwrap() > 0.0);
        assert_eq!(report.verdict, Verdict::CertifiedCond2);
    }

    #[test]
    fn greedy_partition_examples() {
        let p = greedy_partition(&[iv(0.0, 0.3), iv(0.2, 0.5), iv(0.45, 0.7)]).unwrap();
        assert_eq!(p, Partition { plus: vec![1, 3], minus: vec![2] });
        assert_eq!(p.kappa(3), vec![1.0, -1.0, 1.0]);
        let p = greedy_partition(&[iv(0.5, 0.6), iv(0.0, 0.1), iv(0.2, 0.3)]).unwrap();
        assert_eq!(p, Partition { plus: vec![1, 2, 3], minus: vec![] });
        match greedy_partition(&[iv(0.0, 0.5), iv(0.2, 0.6), iv(0.4, 0.9)]) {
            Err(Error::Multiplicity { point, count }) => {
                assert_eq!(count, 3);
                assert!((0.4..=0.5).contains(&point));
            }
            other => panic!("expected multiplicity failure, got {other:?}"),
        }
        // touching closed intervals share an endpoint
        let p = greedy_partition(&[iv(0.0, 0.5), iv(0.5, 1.0)]).unwrap();
        assert_eq!(p.minus, vec![2]);
        // ties go to the longer interval first
        let p = greedy_partition(&[iv(0.0, 0.2), iv(0.0, 0.4), iv(0.3, 0.5)]).unwrap();
        assert_eq!(p, Partition { plus: vec![2], minus: vec![1, 3] });
    }

    #[test]
    fn single_map_base_is_vacuous() {
        let base = affine_base(&[(0.5, 0.25)]);
        let pm = build_pm_translation(&base, 0.0, None, 0.5).unwrap();
        assert_eq!(pm.kappa, vec![1.0]);
        assert!((pm.halfwidth - 0.25).abs() < 1e-15);
        let report = pm.family.vertical_certificate();
        assert!(report.pairs.is_empty());
        assert_eq!(report.verdict, Verdict::CertifiedCond1);
    }

    #[test]
    fn pm_translation_without_room_fails() {
        let base = affine_base(&[(0.5, 0.0), (0.5, 0.5)]);
        assert!(matches!(build_pm_translation(&base, 0.0, Some(vec![1.0, -1.0]), 0.1), Err(Error::NoHalfwidth(_))));
    }

    #[test]
    fn identical_maps_are_falsified() {
        let fam = IfsFamily::new(
            "twins",
            vec![
                MapKind::Affine { slope: Curve::constant(0.5), offset: Curve::identity() },
                MapKind::Affine { slope: Curve::constant(0.5), offset: Curve::identity() },
            ],
            unit(),
            iv(0.1, 0.4),
        )
        .unwrap();
        let report = mc_transversality_probe(&fam, &ProbeOptions { samples: 100, ..Default::default() }).unwrap();
        assert_eq!(report.verdict, ProbeVerdict::Falsified);
        let w = report.witness.unwrap();
        assert_ne!(w.u.first(), w.v.first());
        assert!(w.phi.abs() < 1e-9 && w.dphi.abs() < 1e-6);
    }

    #[test]
    fn probe_is_deterministic_and_respects_certificate() {
        // three maps whose attractor cylinders overlap, so near-collisions occur
        let base = affine_base(&[(0.35, 0.05), (0.35, 0.325), (0.35, 0.6)]);
        let pm = build_pm_translation(&base, 0.0, None, 0.05).unwrap();
        assert_eq!(pm.kappa, vec![1.0, -1.0, 1.0]);
        let cert = pm.family.vertical_certificate();
        assert_eq!(cert.verdict, Verdict::CertifiedCond1);
        let margin = cert.min_margin().unwrap();
        let opts = ProbeOptions { samples: 1000, seed: 7, ..Default::default() };
        let a = mc_transversality_probe(pm.family.family(), &opts).unwrap();
        let b = mc_transversality_probe(pm.family.family(), &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.verdict, ProbeVerdict::NotFalsified);
        assert!(a.events > 0);
        assert!(a.empirical_eta.unwrap() >= margin);
    }
}
