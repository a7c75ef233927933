//! Pressure of `t log|f'|`, Bowen roots and partition sums.

use crate::error::{Error, Result};
use crate::ifs::IfsFamily;

use super::potential::Potential;
use super::transfer::transfer_spectrum;

/// Largest number of words a partition sum may enumerate.
pub const ENUMERATION_CAP: usize = 1 << 24;
const GRID: usize = 257;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PressureMethod {
    Transfer { depth: usize },
    PartitionSum { n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumMode {
    Inf,
    Sup,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Pressure of `t log|f'|` at `λ`. The transfer bracket is the truncation
/// bound around `log γ`; the partition-sum bracket is
/// `[n⁻¹ log Z_n^inf, n⁻¹ log Z_n^sup]` with its midpoint as the estimate.
pub fn pressure(fam: &IfsFamily, t: f64, lambda: f64, method: PressureMethod) -> Result<PressureEstimate> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("t must be nonnegative, got {t}")));
    }
    match method {
        PressureMethod::Transfer { depth } => {
            let pot = Potential::t_log_derivative(t, fam)?;
            let spec = transfer_spectrum(fam, &pot, lambda, depth)?;
            let e = spec.truncation_bound;
            Ok(PressureEstimate { value: spec.pressure, lower: spec.pressure - e, upper: spec.pressure + e })
        }
        PressureMethod::PartitionSum { n } => {
            let all: Vec<usize> = (1..=fam.alphabet()).collect();
            let ranges = WordDerivatives::enumerate(fam, lambda, &all, n)?;
            let (lower, upper) = ranges.pressure_bracket(t);
            Ok(PressureEstimate { value: 0.5 * (lower + upper), lower, upper })
        }
    }
}

/// `inf` and `sup` of `|f_u'|` over `X` for every `u ∈ subset^n`.
#[derive(Clone, Debug)]
pub struct WordDerivatives {
    pub n: usize,
    pub inf: Vec<f64>,
    pub sup: Vec<f64>,
}

impl WordDerivatives {
    pub fn enumerate(fam: &IfsFamily, lambda: f64, subset: &[usize], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("word length must be at least 1".into()));
        }
        if subset.is_empty() {
            return Err(Error::InvalidInput("symbol subset is empty".into()));
        }
        for &s in subset {
            if s == 0 || s > fam.alphabet() {
                return Err(Error::SymbolOutOfRange { symbol: s, alphabet: fam.alphabet() });
            }
        }
        let count = crate::symbolic::checked_pow(subset.len(), n)
            .filter(|&c| c <= ENUMERATION_CAP)
            .ok_or(Error::EnumerationCap { alphabet: subset.len(), n })?;
        let frozen = fam.at(lambda)?;
        let dom = fam.domain();
        // Möbius compositions have monotone |f_u'|, so endpoints suffice.
        let xs = if fam.is_mobius() { vec![dom.lo, dom.hi] } else { dom.grid(GRID) };
        let mut inf = Vec::with_capacity(count);
        let mut sup = Vec::with_capacity(count);
        // depth-first over words built by prepending symbols
        let mut stack: Vec<(usize, Vec<f64>, Vec<f64>)> = vec![(0, xs.clone(), vec![1.0; xs.len()])];
        while let Some((len, vals, ders)) = stack.pop() {
            if len == n {
                let (lo, hi) = ders.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &d| (a.min(d.abs()), b.max(d.abs())));
                inf.push(lo);
                sup.push(hi);
                continue;
            }
            for &s in subset.iter().rev() {
                let v: Vec<f64> = vals.iter().map(|&y| frozen.value(s, y)).collect();
                let d: Vec<f64> = vals.iter().zip(&ders).map(|(&y, &d)| d * frozen.dx(s, y)).collect();
                stack.push((len + 1, v, d));
            }
        }
        Ok(Self { n, inf, sup })
    }

    pub fn z(&self, t: f64, mode: SumMode) -> f64 {
        let v = match mode {
            SumMode::Inf => &self.inf,
            SumMode::Sup => &self.sup,
        };
        v.iter().map(|d| d.powf(t)).sum()
    }

    pub fn pressure_bracket(&self, t: f64) -> (f64, f64) {
        let n = self.n as f64;
        (self.z(t, SumMode::Inf).ln() / n, self.z(t, SumMode::Sup).ln() / n)
    }
}

/// `Z_n(subset, t)` with the inf or sup of `|f_u'|` over `X`.
pub fn partition_sum(fam: &IfsFamily, lambda: f64, subset: &[usize], t: f64, n: usize, mode: SumMode) -> Result<f64> {
    Ok(WordDerivatives::enumerate(fam, lambda, subset, n)?.z(t, mode))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BowenOptions {
    pub depth: usize,
    /// Word length for the partition-sum bracket.
    pub partition_n: usize,
}

impl BowenOptions {
    pub fn for_alphabet(m: usize) -> Self {
        let depth = crate::symbolic::default_depth_cap(m).min(10);
        let partition_n = ((16.0 * 2f64.ln()) / (m.max(2) as f64).ln()).floor().max(1.0) as usize;
        Self { depth, partition_n }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BowenRoot {
    pub s: f64,
    pub pressure_at_root: f64,
    pub iterations: usize,
    /// Roots of the inf- and sup-based partition-sum pressures.
    pub bracket: (f64, f64),
}

fn bisect(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64, usize)> {
    let mut it = 0;
    loop {
        it += 1;
        let mid = 0.5 * (lo + hi);
        let p = f(mid)?;
        if p.abs() <= tol || hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(1.0) || it >= 200 {
            return Ok((mid, p, it));
        }
        if p > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Zero of the transfer pressure of `t log|f'|`, found by bisection on
/// `[0, log m / −log γ2]`.
pub fn bowen_root(fam: &IfsFamily, lambda: f64, opts: BowenOptions) -> Result<BowenRoot> {
    let m = fam.alphabet();
    let gamma2 = fam.bounds().gamma2;
    if !(gamma2 > 0.0 && gamma2 < 1.0) {
        return Err(Error::InvalidInput(format!("family is not contracting (γ2 ≈ {gamma2})")));
    }
    let p = |t: f64| -> Result<f64> {
        let pot = Potential::t_log_derivative(t, fam)?;
        Ok(transfer_spectrum(fam, &pot, lambda, opts.depth)?.pressure)
    };
    let p0 = p(0.0)?;
    if !(p0 > 0.0) {
        return Err(Error::BracketFailure(format!("P(0) = {p0} is not positive")));
    }
    let t_max = (m as f64).ln() / -gamma2.ln();
    let p_max = p(t_max)?;
    let (s, pressure_at_root, iterations) = if p_max.abs() <= 1e-14 {
        (t_max, p_max, 2)
    } else if p_max > 0.0 {
        return Err(Error::BracketFailure(format!("P(t_max = {t_max}) = {p_max} is still positive")));
    } else {
        bisect(0.0, t_max, 1e-10, p)?
    };

    let all: Vec<usize> = (1..=m).collect();
    let words = WordDerivatives::enumerate(fam, lambda, &all, opts.partition_n)?;
    let root_of = |mode: SumMode| -> Result<f64> {
        let f = |t: f64| Ok(words.z(t, mode).ln() / words.n as f64);
        let hi = if mode == SumMode::Sup { 2.0 * t_max } else { t_max };
        let mut top = hi.max(1e-12);
        while f(top)? > 0.0 {
            top *= 2.0;
            if top > 1e6 {
                return Err(Error::BracketFailure("partition-sum pressure stays positive".into()));
            }
        }
        Ok(bisect(0.0, top, 1e-13, f)?.0)
    };
    let bracket = (root_of(SumMode::Inf)?, root_of(SumMode::Sup)?);
    Ok(BowenRoot { s, pressure_at_root, iterations, bracket })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureDropReport {
    pub n: usize,
    pub t: f64,
    pub z_full: f64,
    pub z_dropped: f64,
    pub delta: f64,
    /// `Z_n(B, t) (1 + δ_t)^n`.
    pub rhs: f64,
    pub holds: bool,
    pub strict: bool,
}

/// Checks `Z_n(A,t) ≥ Z_n(B,t) (1+δ_t)^n` with `B` the alphabet minus its
/// last symbol and `δ_t = γ1^t / ((m−1) γ2^t)`.
pub fn pressure_drop_check(fam: &IfsFamily, lambda: f64, t: f64, n: usize) -> Result<PressureDropReport> {
    let m = fam.alphabet();
    if m < 2 {
        return Err(Error::InvalidInput("pressure drop needs at least two maps".into()));
    }
    let full: Vec<usize> = (1..=m).collect();
    let z_full = partition_sum(fam, lambda, &full, t, n, SumMode::Inf)?;
    let z_dropped = partition_sum(fam, lambda, &full[..m - 1], t, n, SumMode::Inf)?;
    let b = fam.bounds();
    let delta = b.gamma1.powf(t) / ((m - 1) as f64 * b.gamma2.powf(t));
    let rhs = z_dropped * (1.0 + delta).powi(n as i32);
    let tol = 1e-12 * z_full.abs().max(rhs.abs());
    Ok(PressureDropReport {
        n,
        t,
        z_full,
        z_dropped,
        delta,
        rhs,
        holds: z_full >= rhs - tol,
        strict: z_full > rhs + tol,
    })
}
