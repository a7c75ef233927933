//! Parametrized iterated function systems on a compact interval.
//!
//! Every built-in map is a Möbius transformation `x ↦ (a x + b)/(c x + d)`
//! whose coefficients depend on the parameter `λ`. That covers affine maps,
//! the continued-fraction shifts `(x+c)/(x+c+1)`, the Blackwell maps and
//! the Bernoulli-convolution maps, and it keeps compositions inside the same
//! class: `|f_u'|` is monotone on any interval avoiding the pole, so extrema
//! over `X` are attained at the endpoints. Arbitrary maps go through
//! [`CustomMap`], with finite-difference fallbacks for missing derivatives.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symbolic::{common_prefix, SymbolWord};

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidInput(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// Interval spanned by two values in either order.
    pub fn spanning(a: f64, b: f64) -> Self {
        Self { lo: a.min(b), hi: a.max(b) }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn contains_interval(&self, other: &Interval, tol: f64) -> bool {
        other.lo >= self.lo - tol && other.hi <= self.hi + tol
    }

    /// Closed intersection; `None` when disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// `n` equally spaced points including both endpoints (`n >= 2`), or the
    /// midpoint for degenerate intervals.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        if self.is_degenerate() || n < 2 {
            return vec![self.midpoint()];
        }
        let step = self.len() / (n - 1) as f64;
        (0..n)
            .map(|k| if k + 1 == n { self.hi } else { self.lo + step * k as f64 })
            .collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Polynomial parameter curve `Σ c_k λ^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    coeffs: Vec<f64>,
}

impl Curve {
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `c0 + c1 λ`.
    pub fn linear(c0: f64, c1: f64) -> Self {
        Self { coeffs: vec![c0, c1] }
    }

    /// `λ` itself.
    pub fn identity() -> Self {
        Self::linear(0.0, 1.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().skip(1).all(|&c| c == 0.0)
    }

    pub fn value(&self, lambda: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * lambda + c)
    }

    pub fn derivative(&self, lambda: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * lambda + k as f64 * c)
    }

    pub fn second_derivative(&self, lambda: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(2)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * lambda + (k * (k - 1)) as f64 * c)
    }
}

/// Coefficients of `x ↦ (a x + b)/(c x + d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mobius {
    pub fn value(&self, x: f64) -> f64 {
        (self.a * x + self.b) / (self.c * x + self.d)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn dx(&self, x: f64) -> f64 {
        let den = self.c * x + self.d;
        self.det() / (den * den)
    }

    /// Derivative of the value with respect to the parameter, given the
    /// coefficient derivatives `dm`.
    pub fn dvalue(&self, dm: &Mobius, x: f64) -> f64 {
        let num = self.a * x + self.b;
        let den = self.c * x + self.d;
        ((dm.a * x + dm.b) * den - num * (dm.c * x + dm.d)) / (den * den)
    }

    /// Pole position, if any.
    pub fn pole(&self) -> Option<f64> {
        (self.c != 0.0).then(|| -self.d / self.c)
    }
}

type Eval2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// User-supplied map `(λ, x) ↦ f^λ(x)` with optional derivative callbacks.
#[derive(Clone)]
pub struct CustomMap {
    pub name: String,
    value: Eval2,
    dx: Option<Eval2>,
    dlambda: Option<Eval2>,
}

impl CustomMap {
    pub fn new(name: impl Into<String>, value: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), value: Arc::new(value), dx: None, dlambda: None }
    }

    pub fn with_dx(mut self, dx: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.dx = Some(Arc::new(dx));
        self
    }

    pub fn with_dlambda(mut self, dl: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.dlambda = Some(Arc::new(dl));
        self
    }
}

impl fmt::Debug for CustomMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMap")
            .field("name", &self.name)
            .field("dx", &self.dx.is_some())
            .field("dlambda", &self.dlambda.is_some())
            .finish()
    }
}

/// The kinds of maps a family can be built from.
#[derive(Clone, Debug)]
pub enum MapKind {
    /// `x ↦ slope(λ) x + offset(λ)`.
    Affine { slope: Curve, offset: Curve },
    /// `x ↦ (x + c(λ))/(x + c(λ) + 1)`.
    MoebiusShift { shift: Curve },
    /// Blackwell map `S_0^{ε,p}`.
    BlackwellS0 { eps: Curve, p: Curve },
    /// Blackwell map `S_1^{ε,p}`.
    BlackwellS1 { eps: Curve, p: Curve },
    /// `x ↦ λ x + sign·(1 − λ)`; `sign = -1` is `ψ_0`, `+1` is `ψ_1`.
    BernoulliPsi { sign: f64 },
    /// `x ↦ base^{λ0}(x) + shift(λ)`, the base frozen at `λ0`.
    Translated { base: Box<MapKind>, frozen_lambda: f64, shift: Curve },
    Custom(CustomMap),
}

impl MapKind {
    pub fn affine(slope: f64, offset: f64) -> Self {
        MapKind::Affine { slope: Curve::constant(slope), offset: Curve::constant(offset) }
    }

    /// Möbius coefficients at `λ` and their `λ`-derivatives.
    pub fn mobius(&self, lambda: f64) -> Option<(Mobius, Mobius)> {
        match self {
            MapKind::Affine { slope, offset } => Some((
                Mobius { a: slope.value(lambda), b: offset.value(lambda), c: 0.0, d: 1.0 },
                Mobius { a: slope.derivative(lambda), b: offset.derivative(lambda), c: 0.0, d: 0.0 },
            )),
            MapKind::MoebiusShift { shift } => {
                let c = shift.value(lambda);
                let dc = shift.derivative(lambda);
                Some((Mobius { a: 1.0, b: c, c: 1.0, d: c + 1.0 }, Mobius { a: 0.0, b: dc, c: 0.0, d: dc }))
            }
            MapKind::BlackwellS0 { eps, p } | MapKind::BlackwellS1 { eps, p } => {
                let zero = matches!(self, MapKind::BlackwellS0 { .. });
                let (e, q) = (eps.value(lambda), p.value(lambda));
                let m = blackwell_coeffs(e, q, zero);
                // Coefficients are affine in ε for fixed p and in p for fixed ε,
                // so unit differences are exact partial derivatives.
                let de = diff(&blackwell_coeffs(e + 1.0, q, zero), &m);
                let dp = diff(&blackwell_coeffs(e, q + 1.0, zero), &m);
                let (e1, p1) = (eps.derivative(lambda), p.derivative(lambda));
                let dm = Mobius {
                    a: de.a * e1 + dp.a * p1,
                    b: de.b * e1 + dp.b * p1,
                    c: de.c * e1 + dp.c * p1,
                    d: de.d * e1 + dp.d * p1,
                };
                Some((m, dm))
            }
            MapKind::BernoulliPsi { sign } => Some((
                Mobius { a: lambda, b: sign * (1.0 - lambda), c: 0.0, d: 1.0 },
                Mobius { a: 1.0, b: -sign, c: 0.0, d: 0.0 },
            )),
            MapKind::Translated { base, frozen_lambda, shift } => {
                let (m, _) = base.mobius(*frozen_lambda)?;
                let s = shift.value(lambda);
                let ds = shift.derivative(lambda);
                Some((
                    Mobius { a: m.a + s * m.c, b: m.b + s * m.d, c: m.c, d: m.d },
                    Mobius { a: ds * m.c, b: ds * m.d, c: 0.0, d: 0.0 },
                ))
            }
            MapKind::Custom(_) => None,
        }
    }

    pub fn is_mobius(&self) -> bool {
        match self {
            MapKind::Custom(_) => false,
            MapKind::Translated { base, .. } => base.is_mobius(),
            _ => true,
        }
    }

    /// True when the map does not depend on `λ` except through an additive
    /// translation, i.e. it belongs to a vertical translation family.
    pub fn is_vertical(&self) -> bool {
        match self {
            MapKind::Affine { slope, .. } => slope.is_constant(),
            MapKind::Translated { .. } => true,
            _ => false,
        }
    }
}

fn blackwell_coeffs(e: f64, p: f64, zero: bool) -> Mobius {
    let q = 2.0 * p - 1.0;
    let a0 = (1.0 - p) * (1.0 - e) + p * e;
    let c = q * (1.0 - 2.0 * e);
    if zero {
        // numerator (1-ε)[x p + (1-x)(1-p)], denominator p_0(x)
        Mobius { a: (1.0 - e) * q, b: (1.0 - e) * (1.0 - p), c, d: a0 }
    } else {
        // numerator ε[x p + (1-x)(1-p)], denominator p_1(x) = 1 - p_0(x)
        Mobius { a: e * q, b: e * (1.0 - p), c: -c, d: 1.0 - a0 }
    }
}

fn diff(x: &Mobius, y: &Mobius) -> Mobius {
    Mobius { a: x.a - y.a, b: x.b - y.b, c: x.c - y.c, d: x.d - y.d }
}

/// Value and first derivatives of one map at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapEval {
    pub value: f64,
    pub dx: f64,
    pub dlambda: f64,
    /// Set when a derivative came from the finite-difference fallback.
    pub finite_difference: bool,
}

/// Central-difference step `cbrt(ε_mach)·max(1, |t|)`.
pub fn fd_step(t: f64) -> f64 {
    f64::EPSILON.cbrt() * t.abs().max(1.0)
}

/// Sampled bounds `γ1 ≤ |f_j'| ≤ γ2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionBounds {
    pub gamma1: f64,
    pub gamma2: f64,
}

const BOUNDS_X_GRID: usize = 257;
const BOUNDS_LAMBDA_GRID: usize = 65;

/// A parametrized IFS `{f_j^λ}` on `X` with `λ ∈ Ū`.
#[derive(Clone, Debug)]
pub struct IfsFamily {
    name: String,
    maps: Vec<MapKind>,
    domain: Interval,
    parameter: Interval,
    bounds: ContractionBounds,
}

impl IfsFamily {
    pub fn new(name: impl Into<String>, maps: Vec<MapKind>, domain: Interval, parameter: Interval) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidInput("an IFS needs at least one map".into()));
        }
        if domain.is_degenerate() {
            return Err(Error::InvalidInput("domain must have positive length".into()));
        }
        if maps.iter().any(|m| matches!(m, MapKind::Translated { base, .. } if !base.is_mobius())) {
            return Err(Error::InvalidInput("translated maps need a built-in base map".into()));
        }
        let mut fam = Self {
            name: name.into(),
            maps,
            domain,
            parameter,
            bounds: ContractionBounds { gamma1: 0.0, gamma2: 0.0 },
        };
        fam.bounds = fam.sample_bounds(BOUNDS_X_GRID, BOUNDS_LAMBDA_GRID)?;
        Ok(fam)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn maps(&self) -> &[MapKind] {
        &self.maps
    }

    pub fn alphabet(&self) -> usize {
        self.maps.len()
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn parameter(&self) -> Interval {
        self.parameter
    }

    /// Sampled contraction bounds (not a proof; see [`IfsFamily::regularity_audit`]).
    pub fn bounds(&self) -> ContractionBounds {
        self.bounds
    }

    pub fn is_mobius(&self) -> bool {
        self.maps.iter().all(MapKind::is_mobius)
    }

    pub fn is_vertical(&self) -> bool {
        self.maps.iter().all(MapKind::is_vertical)
    }

    /// Same family with a different parameter interval.
    pub fn with_parameter(&self, parameter: Interval) -> Result<Self> {
        Self::new(self.name.clone(), self.maps.clone(), self.domain, parameter)
    }

    pub fn check_lambda(&self, lambda: f64) -> Result<()> {
        let tol = 1e-12 * self.parameter.lo.abs().max(self.parameter.hi.abs()).max(1.0);
        if !lambda.is_finite() || !self.parameter.contains(lambda, tol) {
            return Err(Error::OutOfParameterRange { lambda, lo: self.parameter.lo, hi: self.parameter.hi });
        }
        Ok(())
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if !x.is_finite() || !self.domain.contains(x, 1e-9 * self.domain.len()) {
            return Err(Error::OutOfDomain { x, lo: self.domain.lo, hi: self.domain.hi });
        }
        Ok(())
    }

    fn check_symbol(&self, symbol: usize) -> Result<()> {
        if symbol == 0 || symbol > self.alphabet() {
            return Err(Error::SymbolOutOfRange { symbol, alphabet: self.alphabet() });
        }
        Ok(())
    }

    /// The maps frozen at `λ`, for fast repeated evaluation.
    pub fn at(&self, lambda: f64) -> Result<FrozenIfs<'_>> {
        self.check_lambda(lambda)?;
        Ok(self.at_unchecked(lambda))
    }

    pub(crate) fn at_unchecked(&self, lambda: f64) -> FrozenIfs<'_> {
        let maps = self
            .maps
            .iter()
            .map(|m| match m.mobius(lambda) {
                Some((coef, dcoef)) => FrozenMap::Mobius { coef, dcoef },
                None => match m {
                    MapKind::Custom(c) => FrozenMap::Custom(c),
                    _ => unreachable!("translated custom bases are rejected at construction"),
                },
            })
            .collect();
        FrozenIfs { family: self, lambda, maps }
    }

    /// `(f_j^λ(x), ∂x, ∂λ)`.
    pub fn evaluate_map(&self, symbol: usize, lambda: f64, x: f64) -> Result<MapEval> {
        self.check_symbol(symbol)?;
        self.check_x(x)?;
        let frozen = self.at(lambda)?;
        let eval = frozen.eval(symbol, x);
        if !(eval.value.is_finite() && eval.dx.is_finite() && eval.dlambda.is_finite()) {
            return Err(Error::NonFinite { what: format!("map {symbol} at λ={lambda}, x={x}") });
        }
        Ok(eval)
    }

    /// `(f_u^λ(x), d/dx f_u^λ(x))` by the chain rule over the suffix points.
    pub fn compose_word(&self, word: &SymbolWord, lambda: f64, x: f64) -> Result<(f64, f64)> {
        self.check_x(x)?;
        for &s in word.symbols() {
            self.check_symbol(s)?;
        }
        let (v, d) = self.at(lambda)?.compose(word.symbols(), x);
        if !(v.is_finite() && d.is_finite()) {
            return Err(Error::NonFinite { what: format!("composition {word}") });
        }
        Ok((v, d))
    }

    /// `f_{u|n}(x_0)` with `x_0` the midpoint of `X`, and the tail bound `γ2^n |X|`.
    pub fn natural_projection(&self, lambda: f64, word: &SymbolWord, n: usize) -> Result<Projection> {
        if n == 0 {
            return Err(Error::InvalidInput("projection depth must be at least 1".into()));
        }
        let w = word.truncate_or_pad(n);
        let (x, _) = self.compose_word(&w, lambda, self.domain.midpoint())?;
        Ok(Projection { x, error_bound: self.bounds.gamma2.powi(n as i32) * self.domain.len() })
    }

    /// `D_max = max_j sup |∂λ f_j| / (1 − γ2)` sampled over `X × Ū`.
    pub fn d_max(&self) -> f64 {
        let gamma2 = self.bounds.gamma2;
        let mut sup = 0.0f64;
        for lambda in self.parameter.grid(BOUNDS_LAMBDA_GRID) {
            let frozen = self.at_unchecked(lambda);
            for s in 1..=self.alphabet() {
                for x in self.domain.grid(BOUNDS_X_GRID) {
                    sup = sup.max(frozen.dlambda(s, x).abs());
                }
            }
        }
        sup / (1.0 - gamma2)
    }

    /// `d/dλ Π^λ(u|_n)`.
    ///
    /// The recursion `dΠ(u) = ∂λ f_{u1}(Πσu) + ∂x f_{u1}(Πσu)·dΠ(σu)` is used
    /// whenever every map has closed-form `λ`-derivatives; its truncation
    /// remainder is at most `D_max γ2^n`. Otherwise a central difference in
    /// `λ` is taken.
    pub fn projection_lambda_derivative(
        &self,
        lambda: f64,
        word: &SymbolWord,
        n: usize,
        method: DerivativeMethod,
    ) -> Result<LambdaDerivative> {
        if n == 0 {
            return Err(Error::InvalidInput("projection depth must be at least 1".into()));
        }
        self.check_lambda(lambda)?;
        let w = word.truncate_or_pad(n);
        let use_recursion = match method {
            DerivativeMethod::Recursion => true,
            DerivativeMethod::FiniteDifference => false,
            DerivativeMethod::Auto => self.is_mobius() || self.maps.iter().all(|m| matches!(m, MapKind::Custom(c) if c.dlambda.is_some())),
        };
        if use_recursion {
            let (_, d) = self.at(lambda)?.project_with_derivative(w.symbols(), self.domain.midpoint());
            let remainder_bound = self.d_max() * self.bounds.gamma2.powi(n as i32);
            return Ok(LambdaDerivative { value: d, method: DerivativeMethod::Recursion, remainder_bound });
        }
        let h = fd_step(lambda);
        let (lo, hi) = (lambda - h, lambda + h);
        self.check_lambda(lo)?;
        self.check_lambda(hi)?;
        let x0 = self.domain.midpoint();
        let plus = self.at_unchecked(hi).compose(w.symbols(), x0).0;
        let minus = self.at_unchecked(lo).compose(w.symbols(), x0).0;
        Ok(LambdaDerivative {
            value: (plus - minus) / (2.0 * h),
            method: DerivativeMethod::FiniteDifference,
            remainder_bound: self.d_max() * self.bounds.gamma2.powi(n as i32),
        })
    }

    /// The image `f_u^λ(X)`.
    pub fn cylinder_interval(&self, lambda: f64, word: &SymbolWord) -> Result<Interval> {
        let frozen = self.at(lambda)?;
        Ok(frozen.image(word.symbols(), &self.domain))
    }

    /// `d_λ(u, v) = |f_{u∧v}^λ(X)|`.
    pub fn metric(&self, lambda: f64, u: &SymbolWord, v: &SymbolWord) -> Result<f64> {
        let prefix = common_prefix(u, v)?;
        Ok(self.cylinder_interval(lambda, &prefix)?.len())
    }

    /// Fixed point of `f_j^λ` by iteration from the midpoint.
    pub fn fixed_point(&self, symbol: usize, lambda: f64) -> Result<f64> {
        self.check_symbol(symbol)?;
        let frozen = self.at(lambda)?;
        let mut x = self.domain.midpoint();
        for _ in 0..100_000 {
            let next = frozen.value(symbol, x);
            if (next - x).abs() <= 1e-15 * x.abs().max(1.0) {
                return Ok(next);
            }
            x = next;
        }
        Err(Error::NonConvergence { iterations: 100_000, residual: (frozen.value(symbol, x) - x).abs() })
    }

    fn sample_bounds(&self, gx: usize, gl: usize) -> Result<ContractionBounds> {
        let mut gamma1 = f64::INFINITY;
        let mut gamma2 = 0.0f64;
        let xs = if self.is_mobius() { vec![self.domain.lo, self.domain.hi] } else { self.domain.grid(gx) };
        for lambda in self.parameter.grid(gl) {
            let frozen = self.at_unchecked(lambda);
            for s in 1..=self.alphabet() {
                for &x in &xs {
                    let d = frozen.dx(s, x).abs();
                    if !d.is_finite() {
                        return Err(Error::NonFinite { what: format!("∂x f_{s} at λ={lambda}, x={x}") });
                    }
                    gamma1 = gamma1.min(d);
                    gamma2 = gamma2.max(d);
                }
            }
        }
        Ok(ContractionBounds { gamma1, gamma2 })
    }

    /// Grid audit of hyperbolicity, contraction and domain invariance.
    pub fn regularity_audit(&self, grid: usize) -> Result<RegularityReport> {
        if grid < 2 {
            return Err(Error::InvalidInput("audit grid must have at least 2 points".into()));
        }
        let xs = self.domain.grid(grid);
        let lambdas = self.parameter.grid(grid);
        let step = self.domain.len() / (grid - 1) as f64;
        let tol = 1e-12 * self.domain.len();
        let mut gamma1 = f64::INFINITY;
        let mut gamma2 = 0.0f64;
        let mut failures = Vec::new();
        let mut monotone = vec![true; self.alphabet()];
        let mut finite_difference = false;
        let mut invariant = true;
        for (si, mono) in monotone.iter_mut().enumerate() {
            let s = si + 1;
            for &lambda in &lambdas {
                let frozen = self.at_unchecked(lambda);
                let mut sign = 0.0f64;
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                let mut dmax = 0.0f64;
                for &x in &xs {
                    let e = frozen.eval(s, x);
                    finite_difference |= e.finite_difference;
                    if !(e.value.is_finite() && e.dx.is_finite()) {
                        failures.push(format!("map {s}: non-finite value at λ={lambda}, x={x}"));
                        continue;
                    }
                    let d = e.dx.abs();
                    gamma1 = gamma1.min(d);
                    gamma2 = gamma2.max(d);
                    dmax = dmax.max(d);
                    if e.dx != 0.0 {
                        if sign != 0.0 && sign != e.dx.signum() {
                            *mono = false;
                        }
                        sign = e.dx.signum();
                    }
                    lo = lo.min(e.value);
                    hi = hi.max(e.value);
                }
                // Extremes of a monotone map sit at the grid endpoints; a
                // non-monotone one may peak between samples.
                let pad = if *mono { 0.0 } else { 0.5 * step * dmax };
                if lo - pad < self.domain.lo - tol || hi + pad > self.domain.hi + tol {
                    invariant = false;
                    failures.push(format!(
                        "map {s}: image [{lo}, {hi}] leaves X = {} at λ={lambda}",
                        self.domain
                    ));
                }
            }
        }
        let contracting = gamma2 < 1.0;
        let hyperbolic = gamma1 > 0.0;
        if !contracting {
            failures.push(format!("expansion detected: sup |f'| ≈ {gamma2}"));
        }
        if !hyperbolic {
            failures.push("derivative vanishes on the grid".into());
        }
        failures.dedup();
        let verdict = if contracting && hyperbolic && invariant && failures.is_empty() {
            AuditVerdict::Pass
        } else {
            AuditVerdict::Fail
        };
        Ok(RegularityReport {
            grid,
            gamma1_est: gamma1,
            gamma2_est: gamma2,
            invariant,
            monotone,
            finite_difference,
            verdict,
            failures,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    pub x: f64,
    pub error_bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMethod {
    Auto,
    Recursion,
    FiniteDifference,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaDerivative {
    pub value: f64,
    pub method: DerivativeMethod,
    pub remainder_bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditVerdict {
    Pass,
    Fail,
}

impl fmt::Display for AuditVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuditVerdict::Pass => "PASS",
            AuditVerdict::Fail => "FAIL",
        })
    }
}

/// Outcome of [`IfsFamily::regularity_audit`]. Estimates are only as good
/// as the grid resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularityReport {
    pub grid: usize,
    pub gamma1_est: f64,
    pub gamma2_est: f64,
    pub invariant: bool,
    /// Per map: `∂x f_j` kept a constant sign on the grid.
    pub monotone: Vec<bool>,
    pub finite_difference: bool,
    pub verdict: AuditVerdict,
    pub failures: Vec<String>,
}

enum FrozenMap<'a> {
    Mobius { coef: Mobius, dcoef: Mobius },
    Custom(&'a CustomMap),
}

/// An [`IfsFamily`] evaluated at one parameter value.
pub struct FrozenIfs<'a> {
    family: &'a IfsFamily,
    lambda: f64,
    maps: Vec<FrozenMap<'a>>,
}

impl FrozenIfs<'_> {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn family(&self) -> &IfsFamily {
        self.family
    }

    #[inline]
    pub fn value(&self, symbol: usize, x: f64) -> f64 {
        match &self.maps[symbol - 1] {
            FrozenMap::Mobius { coef, .. } => coef.value(x),
            FrozenMap::Custom(c) => (c.value)(self.lambda, x),
        }
    }

    #[inline]
    pub fn dx(&self, symbol: usize, x: f64) -> f64 {
        match &self.maps[symbol - 1] {
            FrozenMap::Mobius { coef, .. } => coef.dx(x),
            FrozenMap::Custom(c) => match &c.dx {
                Some(f) => f(self.lambda, x),
                None => {
                    let h = fd_step(x);
                    ((c.value)(self.lambda, x + h) - (c.value)(self.lambda, x - h)) / (2.0 * h)
                }
            },
        }
    }

    #[inline]
    pub fn dlambda(&self, symbol: usize, x: f64) -> f64 {
        match &self.maps[symbol - 1] {
            FrozenMap::Mobius { coef, dcoef } => coef.dvalue(dcoef, x),
            FrozenMap::Custom(c) => match &c.dlambda {
                Some(f) => f(self.lambda, x),
                None => {
                    let h = fd_step(self.lambda);
                    ((c.value)(self.lambda + h, x) - (c.value)(self.lambda - h, x)) / (2.0 * h)
                }
            },
        }
    }

    pub fn eval(&self, symbol: usize, x: f64) -> MapEval {
        let finite_difference = match &self.maps[symbol - 1] {
            FrozenMap::Mobius { .. } => false,
            FrozenMap::Custom(c) => c.dx.is_none() || c.dlambda.is_none(),
        };
        MapEval { value: self.value(symbol, x), dx: self.dx(symbol, x), dlambda: self.dlambda(symbol, x), finite_difference }
    }

    /// `(f_u(x), f_u'(x))` for a symbol slice.
    pub fn compose(&self, symbols: &[usize], x: f64) -> (f64, f64) {
        symbols.iter().rev().fold((x, 1.0), |(y, d), &s| (self.value(s, y), d * self.dx(s, y)))
    }

    /// `(f_u(x), d/dλ f_u(x))` by forward propagation of the parameter derivative.
    pub fn project_with_derivative(&self, symbols: &[usize], x: f64) -> (f64, f64) {
        symbols.iter().rev().fold((x, 0.0), |(y, dy), &s| (self.value(s, y), self.dlambda(s, y) + self.dx(s, y) * dy))
    }

    /// `f_u(I)` for an interval `I ⊆ X`.
    pub fn image(&self, symbols: &[usize], interval: &Interval) -> Interval {
        if self.family.is_mobius() {
            let a = self.compose(symbols, interval.lo).0;
            let b = self.compose(symbols, interval.hi).0;
            return Interval::spanning(a, b);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in interval.grid(1024) {
            let y = self.compose(symbols, x).0;
            lo = lo.min(y);
            hi = hi.max(y);
        }
        Interval { lo, hi }
    }

    /// `inf` and `sup` of `|f_u'|` over `X` (endpoints for Möbius systems,
    /// grid otherwise).
    pub fn derivative_range(&self, symbols: &[usize], grid: usize) -> (f64, f64) {
        let dom = self.family.domain;
        let xs = if self.family.is_mobius() { vec![dom.lo, dom.hi] } else { dom.grid(grid) };
        xs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| {
            let d = self.compose(symbols, x).1.abs();
            (lo.min(d), hi.max(d))
        })
    }
}
