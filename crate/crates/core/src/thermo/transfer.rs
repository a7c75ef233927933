//! The Perron operator on depth-`r` cylinder functions and the Gibbs data
//! built from its lead eigenvectors.

use crate::error::{Error, Result};
use crate::ifs::IfsFamily;
use crate::symbolic::{checked_pow, CylinderIndex, SymbolWord};

use super::potential::{cylinder_points, truncate_potential, Potential};

pub const MAX_ITERATIONS: usize = 10_000;
pub const TOLERANCE: f64 = 1e-12;

/// Lead eigendata `(γ, h, ν)` at cylinder depth `r`.
#[derive(Clone, Debug)]
pub struct TransferSpectrum {
    pub depth: usize,
    pub alphabet: usize,
    pub lambda: f64,
    pub gamma: f64,
    pub pressure: f64,
    /// Right eigenvector, positive.
    pub h: Vec<f64>,
    /// Left eigenvector, `Σ ν = 1`.
    pub nu: Vec<f64>,
    pub iterations: usize,
    pub residual_right: f64,
    pub residual_left: f64,
    /// Bound on `|φ − φ_r|`; `log γ` inherits it.
    pub truncation_bound: f64,
    /// The truncated potential on depth-`(r+1)` words.
    pub phi: Vec<f64>,
}

struct Operator<'a> {
    weights: &'a [f64],
    m: usize,
    n: usize,
    lead: usize,
}

impl Operator<'_> {
    // (L h)(w) = Σ_i e^{φ(iw)} h((iw)|_r)
    fn right(&self, h: &[f64], out: &mut [f64]) {
        for (w, o) in out.iter_mut().enumerate() {
            let base = w / self.m;
            *o = (0..self.m).map(|i| self.weights[i * self.n + w] * h[i * self.lead + base]).sum();
        }
    }

    // (ν L)(v) = Σ_{w : (iw)|_r = v} e^{φ(iw)} ν(w)
    fn left(&self, nu: &[f64], out: &mut [f64]) {
        for (v, o) in out.iter_mut().enumerate() {
            let i = v / self.lead;
            let base = (v % self.lead) * self.m;
            *o = (0..self.m).map(|k| self.weights[i * self.n + base + k] * nu[base + k]).sum();
        }
    }
}

fn power_iteration(
    apply: impl Fn(&[f64], &mut [f64]),
    n: usize,
    norm: impl Fn(&[f64]) -> f64,
) -> Result<(f64, Vec<f64>, usize, f64)> {
    let mut v = vec![1.0; n];
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    let mut next = vec![0.0; n];
    let mut gamma = 0.0;
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        apply(&v, &mut next);
        let g = norm(&next);
        if !(g > 0.0) || !g.is_finite() {
            return Err(if g == 0.0 { Error::ZeroEigenvector } else { Error::NonFinite { what: "power iteration".into() } });
        }
        next.iter_mut().for_each(|x| *x /= g);
        let scale = v.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        change = v.iter().zip(&next).fold(0.0f64, |a, (x, y)| a.max((x - y).abs())) / scale;
        let gamma_change = (g - gamma).abs() / g;
        gamma = g;
        std::mem::swap(&mut v, &mut next);
        if change < TOLERANCE && gamma_change < TOLERANCE {
            break;
        }
    }
    // residual ‖A v − γ v‖∞ / ‖v‖∞
    apply(&v, &mut next);
    let scale = v.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let residual = v.iter().zip(&next).fold(0.0f64, |a, (x, y)| a.max((y - gamma * x).abs())) / (gamma * scale);
    if change >= TOLERANCE && residual > 1e-10 {
        return Err(Error::NonConvergence { iterations, residual });
    }
    Ok((gamma, v, iterations, residual))
}

/// Lead eigendata of the transfer operator of `pot` at depth `r`.
pub fn transfer_spectrum(fam: &IfsFamily, pot: &Potential, lambda: f64, r: usize) -> Result<TransferSpectrum> {
    let index = CylinderIndex::new(fam.alphabet(), r)?;
    let table = truncate_potential(pot, fam, lambda, r)?;
    let m = index.alphabet();
    let n = index.count();
    let weights: Vec<f64> = table.values.iter().map(|v| v.exp()).collect();
    let op = Operator { weights: &weights, m, n, lead: n / m };
    let max_norm = |v: &[f64]| v.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let sum_norm = |v: &[f64]| v.iter().sum::<f64>();
    let (gamma, mut h, it_r, residual_right) = power_iteration(|a, b| op.right(a, b), n, max_norm)?;
    let (gamma_left, nu, it_l, residual_left) = power_iteration(|a, b| op.left(a, b), n, sum_norm)?;
    if (gamma - gamma_left).abs() > 1e-9 * gamma {
        return Err(Error::NonConvergence { iterations: it_r.max(it_l), residual: (gamma - gamma_left).abs() / gamma });
    }
    if h.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Estimator("right eigenvector is not strictly positive".into()));
    }
    let pairing: f64 = h.iter().zip(&nu).map(|(a, b)| a * b).sum();
    h.iter_mut().for_each(|x| *x /= pairing);
    Ok(TransferSpectrum {
        depth: r,
        alphabet: m,
        lambda,
        gamma,
        pressure: gamma.ln(),
        h,
        nu,
        iterations: it_r.max(it_l),
        residual_right,
        residual_left,
        truncation_bound: table.error_bound,
        phi: table.values,
    })
}

impl TransferSpectrum {
    /// The shift-invariant Markov extension to depth `r + 1`:
    /// `μ(iw) = ν(w) e^{φ(iw)} h((iw)|_r) / γ`.
    pub fn extended_measure(&self) -> CylinderMeasure {
        let (m, n) = (self.alphabet, self.h.len());
        let lead = n / m;
        let mut weights = vec![0.0; n * m];
        for i in 0..m {
            for w in 0..n {
                weights[i * n + w] = self.nu[w] * self.phi[i * n + w].exp() * self.h[i * lead + w / m] / self.gamma;
            }
        }
        CylinderMeasure { depth: self.depth + 1, alphabet: m, weights }
    }
}

/// Nonnegative weights on the depth-`r` cylinders.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderMeasure {
    pub depth: usize,
    pub alphabet: usize,
    pub weights: Vec<f64>,
}

impl CylinderMeasure {
    pub fn new(depth: usize, alphabet: usize, weights: Vec<f64>) -> Result<Self> {
        let n = checked_pow(alphabet, depth).ok_or(Error::EnumerationCap { alphabet, n: depth })?;
        if weights.len() != n {
            return Err(Error::InvalidInput(format!("expected {n} weights, got {}", weights.len())));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput("weights must be finite and nonnegative".into()));
        }
        Ok(Self { depth, alphabet, weights })
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Marginal on prefixes of length `depth`.
    pub fn coarsen(&self, depth: usize) -> Result<CylinderMeasure> {
        if depth > self.depth {
            return Err(Error::InvalidInput(format!("cannot refine depth {} to {depth}", self.depth)));
        }
        let block = checked_pow(self.alphabet, self.depth - depth).unwrap_or(usize::MAX);
        let weights = self.weights.chunks(block).map(|c| c.iter().sum()).collect();
        Ok(CylinderMeasure { depth, alphabet: self.alphabet, weights })
    }

    pub fn mass(&self, word: &SymbolWord) -> Result<f64> {
        let index = CylinderIndex::new(self.alphabet, word.len())?;
        let coarse = self.coarsen(word.len())?;
        Ok(coarse.weights[index.encode(word)?])
    }
}

/// `μ = h ν` on depth-`r` cylinders.
pub fn gibbs_cylinder_measure(spec: &TransferSpectrum) -> CylinderMeasure {
    let weights = spec.h.iter().zip(&spec.nu).map(|(a, b)| a * b).collect();
    CylinderMeasure { depth: spec.depth, alphabet: spec.alphabet, weights }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyEstimate {
    /// `log γ − ∫ φ_r dμ`.
    pub value: f64,
    /// Block entropies `−n⁻¹ Σ μ log μ` for `n = 1..=r+1`.
    pub shannon: Vec<f64>,
    /// Conditional entropies `H_n − H_{n−1}`, which converge faster.
    pub conditional: Vec<f64>,
}

fn xlogx_sum(w: &[f64]) -> f64 {
    w.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

pub fn entropy(spec: &TransferSpectrum) -> EntropyEstimate {
    let ext = spec.extended_measure();
    let integral: f64 = ext.weights.iter().zip(&spec.phi).map(|(mu, phi)| mu * phi).sum();
    let mut shannon = Vec::with_capacity(ext.depth);
    let mut conditional = Vec::with_capacity(ext.depth);
    let mut prev = 0.0;
    for n in 1..=ext.depth {
        let h = xlogx_sum(&ext.coarsen(n).expect("coarsening to a shallower depth").weights);
        shannon.push(h / n as f64);
        conditional.push(h - prev);
        prev = h;
    }
    EntropyEstimate { value: spec.pressure - integral, shannon, conditional }
}

/// `χ = −Σ_w log|f'_{w_1}(f_{σw}(x_0))| μ(w)`.
pub fn lyapunov_exponent(fam: &IfsFamily, lambda: f64, measure: &CylinderMeasure) -> Result<f64> {
    if measure.depth == 0 {
        return Err(Error::InvalidInput("measure depth must be at least 1".into()));
    }
    if measure.alphabet != fam.alphabet() {
        return Err(Error::InvalidInput("measure alphabet differs from the family".into()));
    }
    let frozen = fam.at(lambda)?;
    let pts = cylinder_points(&frozen, measure.depth - 1);
    let n = pts.len();
    let mut chi = 0.0;
    for (id, &mu) in measure.weights.iter().enumerate() {
        if mu > 0.0 {
            chi -= frozen.dx(id / n + 1, pts[id % n]).abs().ln() * mu;
        }
    }
    let total = measure.total();
    if !(total > 0.0) {
        return Err(Error::InvalidInput("measure has zero mass".into()));
    }
    Ok(chi / total)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LyapunovDimension {
    pub clipped: f64,
    pub raw: f64,
}

pub fn lyapunov_dimension(h: f64, chi: f64) -> Result<LyapunovDimension> {
    if !(chi > 0.0) {
        return Err(Error::InvalidInput(format!("Lyapunov exponent must be positive, got {chi}")));
    }
    let raw = h / chi;
    Ok(LyapunovDimension { clipped: raw.min(1.0), raw })
}
