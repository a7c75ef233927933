//! Potentials on symbol space and their finite-depth truncations.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ifs::{FrozenIfs, IfsFamily};
use crate::symbolic::checked_pow;

type ProbFn = Arc<dyn Fn(usize, f64, f64) -> f64 + Send + Sync>;

/// Place-dependent probabilities `x ↦ (p_1(x), …, p_m(x))`.
#[derive(Clone)]
pub enum ProbabilityModel {
    /// `p_j(x) = intercept_j + slope_j · x`.
    Linear { intercept: Vec<f64>, slope: Vec<f64> },
    /// `(symbol, λ, x) ↦ p_symbol(x)`.
    Custom(ProbFn),
}

impl ProbabilityModel {
    /// `p_1 = 1/2 + ρx`, `p_2 = 1/2 − ρx`.
    pub fn bernoulli_place_dependent(rho: f64) -> Self {
        ProbabilityModel::Linear { intercept: vec![0.5, 0.5], slope: vec![rho, -rho] }
    }

    /// `p_0(x) = x b + (1 − x) a` and `p_1 = 1 − p_0`, as symbols 1 and 2.
    pub fn blackwell(eps: f64, p: f64) -> Self {
        let b = p * (1.0 - eps) + (1.0 - p) * eps;
        let a = (1.0 - p) * (1.0 - eps) + p * eps;
        ProbabilityModel::Linear { intercept: vec![a, 1.0 - a], slope: vec![b - a, a - b] }
    }

    pub fn custom(f: impl Fn(usize, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        ProbabilityModel::Custom(Arc::new(f))
    }

    #[inline]
    pub fn prob(&self, symbol: usize, lambda: f64, x: f64) -> f64 {
        match self {
            ProbabilityModel::Linear { intercept, slope } => intercept[symbol - 1] + slope[symbol - 1] * x,
            ProbabilityModel::Custom(f) => f(symbol, lambda, x),
        }
    }
}

impl fmt::Debug for ProbabilityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbabilityModel::Linear { intercept, slope } => {
                f.debug_struct("Linear").field("intercept", intercept).field("slope", slope).finish()
            }
            ProbabilityModel::Custom(_) => f.write_str("Custom"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum PotentialKind {
    /// `φ(ω) = log p_{ω_1}(Π σω)`.
    LogProbability(ProbabilityModel),
    /// `φ(ω) = t log |f'_{ω_1}(Π σω)|`.
    TLogDerivative { t: f64 },
    /// `φ(ω) = log p_{ω_1}`.
    ConstantBernoulli { p: Vec<f64> },
}

/// A potential with variation constants `var_k φ ≤ b α^k`.
#[derive(Clone, Debug)]
pub struct Potential {
    kind: PotentialKind,
    b: f64,
    alpha: f64,
    holder: Option<(f64, f64)>,
}

const AUDIT_GRID: usize = 1024;
const LAMBDA_GRID: usize = 9;

impl Potential {
    pub fn constant_bernoulli(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() || p.iter().any(|&q| !(q > 0.0 && q <= 1.0)) {
            return Err(Error::InvalidInput(format!("probabilities must lie in (0, 1]: {p:?}")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::ProbabilityAudit(format!("probabilities sum to {total}")));
        }
        Ok(Self { kind: PotentialKind::ConstantBernoulli { p }, b: 0.0, alpha: 0.5, holder: None })
    }

    /// Log-probability potential; audits `Σ p_j = 1` and `p_j > 0` on a grid
    /// of `X × Ū` and estimates the Lipschitz constant of `log p_j`.
    pub fn log_probability(model: ProbabilityModel, fam: &IfsFamily) -> Result<Self> {
        let m = fam.alphabet();
        if let ProbabilityModel::Linear { intercept, slope } = &model {
            if intercept.len() != m || slope.len() != m {
                return Err(Error::InvalidInput(format!("probability model needs {m} entries")));
            }
        }
        let xs = fam.domain().grid(AUDIT_GRID);
        let step = fam.domain().len() / (AUDIT_GRID - 1) as f64;
        let mut lip = 0.0f64;
        for lambda in fam.parameter().grid(LAMBDA_GRID) {
            let mut prev: Option<Vec<f64>> = None;
            for &x in &xs {
                let logs: Vec<f64> = (1..=m)
                    .map(|j| {
                        let p = model.prob(j, lambda, x);
                        if !(p > 0.0) || !p.is_finite() {
                            return Err(Error::ProbabilityAudit(format!("p_{j}({x}) = {p} at λ={lambda}")));
                        }
                        Ok(p.ln())
                    })
                    .collect::<Result<_>>()?;
                let total: f64 = logs.iter().map(|l| l.exp()).sum();
                if (total - 1.0).abs() > 1e-10 {
                    return Err(Error::ProbabilityAudit(format!("Σ p_j({x}) = {total} at λ={lambda}")));
                }
                if let Some(p) = &prev {
                    for (a, b) in p.iter().zip(&logs) {
                        lip = lip.max((a - b).abs() / step);
                    }
                }
                prev = Some(logs);
            }
        }
        Self::with_lipschitz(PotentialKind::LogProbability(model), lip, fam)
    }

    /// `t log|f'|`, with the Lipschitz constant of `log|f'_j|` estimated on a grid.
    pub fn t_log_derivative(t: f64, fam: &IfsFamily) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidInput(format!("t must be finite and nonnegative, got {t}")));
        }
        let xs = fam.domain().grid(AUDIT_GRID);
        let step = fam.domain().len() / (AUDIT_GRID - 1) as f64;
        let mut lip = 0.0f64;
        for lambda in fam.parameter().grid(LAMBDA_GRID) {
            let frozen = fam.at_unchecked(lambda);
            for j in 1..=fam.alphabet() {
                let logs: Vec<f64> = xs.iter().map(|&x| frozen.dx(j, x).abs().ln()).collect();
                if logs.iter().any(|l| !l.is_finite()) {
                    return Err(Error::NonFinite { what: format!("log|f_{j}'| at λ={lambda}") });
                }
                for w in logs.windows(2) {
                    lip = lip.max((w[1] - w[0]).abs() / step);
                }
            }
        }
        Self::with_lipschitz(PotentialKind::TLogDerivative { t }, t * lip, fam)
    }

    fn with_lipschitz(kind: PotentialKind, lip: f64, fam: &IfsFamily) -> Result<Self> {
        let gamma2 = fam.bounds().gamma2;
        if !(gamma2 > 0.0 && gamma2.is_finite()) {
            return Err(Error::InvalidInput(format!("contraction bound γ2 ≈ {gamma2} is unusable")));
        }
        if gamma2 >= 1.0 {
            // contracting at most on average: no variation bound
            let b = if lip > 0.0 { f64::INFINITY } else { 0.0 };
            return Ok(Self { kind, b, alpha: 1.0, holder: None });
        }
        Ok(Self { kind, b: lip * fam.domain().len() / gamma2, alpha: gamma2, holder: None })
    }

    /// Attach Hölder-in-λ constants `(c_0, θ)`; recorded, not used numerically.
    pub fn with_holder(mut self, c0: f64, theta: f64) -> Self {
        self.holder = Some((c0, theta));
        self
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// `(b, α)`.
    pub fn variation(&self) -> (f64, f64) {
        (self.b, self.alpha)
    }

    pub fn holder(&self) -> Option<(f64, f64)> {
        self.holder
    }

    /// `φ` on a sequence whose first symbol is `first` and whose shift projects to `x`.
    #[inline]
    pub fn value(&self, frozen: &FrozenIfs<'_>, first: usize, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::LogProbability(model) => model.prob(first, frozen.lambda(), x).ln(),
            PotentialKind::TLogDerivative { t } => t * frozen.dx(first, x).abs().ln(),
            PotentialKind::ConstantBernoulli { p } => p[first - 1].ln(),
        }
    }

    /// Bound on `|φ − φ_r|` for the depth-`r` truncation.
    pub fn truncation_bound(&self, r: usize) -> f64 {
        if self.b == 0.0 {
            return 0.0;
        }
        self.b * self.alpha.powi(r as i32 + 1)
    }
}

/// `f_w(x_0)` for every word of length `depth`, indexed by cylinder id.
pub(crate) fn cylinder_points(frozen: &FrozenIfs<'_>, depth: usize) -> Vec<f64> {
    let m = frozen.family().alphabet();
    let mut pts = vec![frozen.family().domain().midpoint()];
    for _ in 0..depth {
        let n = pts.len();
        let mut next = vec![0.0; n * m];
        for i in 0..m {
            for (id, &y) in pts.iter().enumerate() {
                next[i * n + id] = frozen.value(i + 1, y);
            }
        }
        pts = next;
    }
    pts
}

/// The potential evaluated on every word of length `r + 1`, each word
/// continued by the base point of the projection.
#[derive(Clone, Debug)]
pub struct TruncatedPotential {
    pub depth: usize,
    pub alphabet: usize,
    /// Indexed by the depth-`(r+1)` cylinder id.
    pub values: Vec<f64>,
    pub error_bound: f64,
}

pub fn truncate_potential(pot: &Potential, fam: &IfsFamily, lambda: f64, r: usize) -> Result<TruncatedPotential> {
    if r == 0 {
        return Err(Error::InvalidInput("truncation depth must be at least 1".into()));
    }
    let m = fam.alphabet();
    if let PotentialKind::ConstantBernoulli { p } = &pot.kind {
        if p.len() != m {
            return Err(Error::InvalidInput(format!("probability vector needs {m} entries")));
        }
    }
    let n = checked_pow(m, r)
        .filter(|&n| n <= crate::symbolic::MAX_CELLS)
        .ok_or(Error::DepthCap { alphabet: m, depth: r, cap: crate::symbolic::MAX_CELLS })?;
    let frozen = fam.at(lambda)?;
    let pts = cylinder_points(&frozen, r);
    let mut values = vec![0.0; n * m];
    for i in 0..m {
        for (id, &x) in pts.iter().enumerate() {
            let v = pot.value(&frozen, i + 1, x);
            if !v.is_finite() {
                return Err(Error::NonFinite { what: format!("potential at symbol {} cylinder {id}", i + 1) });
            }
            values[i * n + id] = v;
        }
    }
    Ok(TruncatedPotential { depth: r, alphabet: m, values, error_bound: pot.truncation_bound(r) })
}
