//! Lower-tail extreme-value tools: min-stable laws, tail-index estimators,
//! regular-variation probes and block-minima experiments.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WicksellError};
use crate::real::Real;
use crate::rng;

/// Default probe offsets s for [`local_tail_exponent`].
pub const DEFAULT_S_LIST: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Smallest CDF value the local-exponent estimator accepts.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// Slopes may wander by this much against the overall trend before an
/// estimate is flagged as ill-conditioned.
const MONOTONE_SLACK: f64 = 1e-3;

/// Limit laws for normalized minima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MinStableLaw {
    Frechet { alpha: f64 },
    Weibull { alpha: f64 },
    Gumbel,
}

impl MinStableLaw {
    pub fn frechet(alpha: f64) -> Result<Self> {
        positive(alpha, "Frechet index")?;
        Ok(Self::Frechet { alpha })
    }

    pub fn weibull(alpha: f64) -> Result<Self> {
        positive(alpha, "Weibull index")?;
        Ok(Self::Weibull { alpha })
    }

    /// H_{1,α}, H_{2,α} or H₃ at `x`, with the 0/1 limits outside each domain.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Frechet { alpha } => {
                if x < 0.0 {
                    -(-(-x).powf(-alpha)).exp_m1()
                } else {
                    1.0
                }
            }
            Self::Weibull { alpha } => {
                if x > 0.0 {
                    -(-x.powf(alpha)).exp_m1()
                } else {
                    0.0
                }
            }
            Self::Gumbel => -(-x.exp()).exp_m1(),
        }
    }
}

impl std::fmt::Display for MinStableLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Frechet { alpha } => write!(f, "H1({alpha})"),
            Self::Weibull { alpha } => write!(f, "H2({alpha})"),
            Self::Gumbel => write!(f, "H3"),
        }
    }
}

pub fn min_stable_cdf(law: MinStableLaw, x: f64) -> f64 {
    law.cdf(x)
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(WicksellError::InvalidParameter(format!("{what} must be positive and finite, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailModel {
    Plain,
    LogCorrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMethod {
    LocalExponent,
    ReciprocalHill,
}

impl std::fmt::Display for TailMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::LocalExponent => "local-exponent",
            Self::ReciprocalHill => "reciprocal-hill",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopePoint {
    pub s: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailIndexEstimate {
    pub beta_hat: f64,
    pub slopes: Vec<SlopePoint>,
    pub model: TailModel,
    pub stderr: Option<f64>,
    pub method: TailMethod,
    pub ill_conditioned: bool,
}

/// Lower-tail index from the ratio F(η + xs)/F(η + s) over a sequence of s.
///
/// Each s gives the local slope log[F(η+xs)/F(η+s)] / log x. The plain model
/// reports the slope at the last s; the log-corrected model fits
/// slope = β + c/log(1/s) by least squares and reports β.
pub fn local_tail_exponent<T: Real, F: Fn(T) -> T>(
    cdf: F,
    eta: T,
    s_list: &[T],
    ratio: T,
    model: TailModel,
) -> Result<TailIndexEstimate> {
    if !(ratio > T::one() && ratio.is_finite()) {
        return Err(WicksellError::InvalidParameter(format!("probe ratio must exceed 1, got {ratio}")));
    }
    if s_list.is_empty() {
        return Err(WicksellError::InvalidParameter("no probe offsets given".into()));
    }
    let log_ratio = ratio.as_f64().ln();
    let mut slopes = Vec::with_capacity(s_list.len());
    for &s in s_list {
        if !(s > T::zero() && s.is_finite()) {
            return Err(WicksellError::InvalidParameter(format!("probe offsets must be positive, got {s}")));
        }
        let lo = cdf(eta + s).as_f64();
        if !(lo >= UNDERFLOW_FLOOR) {
            return Err(WicksellError::Underflow { s: s.as_f64() });
        }
        let hi = cdf(eta + ratio * s).as_f64();
        slopes.push(SlopePoint { s: s.as_f64(), slope: (hi / lo).ln() / log_ratio });
    }
    let ill_conditioned = !is_monotone(&slopes);
    let beta_hat = match model {
        TailModel::Plain => slopes[slopes.len() - 1].slope,
        TailModel::LogCorrected => log_corrected_intercept(&slopes)?,
    };
    if !(beta_hat.is_finite() && beta_hat > 0.0) {
        return Err(WicksellError::Domain(format!("tail index estimate {beta_hat} is not a positive number")));
    }
    Ok(TailIndexEstimate { beta_hat, slopes, model, stderr: None, method: TailMethod::LocalExponent, ill_conditioned })
}

fn is_monotone(slopes: &[SlopePoint]) -> bool {
    let (first, last) = (slopes[0].slope, slopes[slopes.len() - 1].slope);
    let trend = (last - first).signum();
    slopes.windows(2).all(|w| (w[1].slope - w[0].slope) * trend >= -MONOTONE_SLACK)
}

fn log_corrected_intercept(slopes: &[SlopePoint]) -> Result<f64> {
    if slopes.iter().any(|p| !(p.s < 1.0)) {
        return Err(WicksellError::InvalidParameter(
            "the log-corrected model needs every probe offset below 1".into(),
        ));
    }
    let z: Vec<f64> = slopes.iter().map(|p| 1.0 / (1.0 / p.s).ln()).collect();
    let n = z.len() as f64;
    let zm = z.iter().sum::<f64>() / n;
    let ym = slopes.iter().map(|p| p.slope).sum::<f64>() / n;
    let sxx: f64 = z.iter().map(|v| (v - zm) * (v - zm)).sum();
    if !(sxx > 0.0) {
        return Ok(ym);
    }
    let sxy: f64 = z.iter().zip(slopes).map(|(v, p)| (v - zm) * (p.slope - ym)).sum();
    Ok(ym - sxy / sxx * zm)
}

/// Hill estimator applied to Y = 1/(X − η), estimating the lower-tail index of X.
pub fn reciprocal_hill<T: Real>(samples: &[T], eta: T, k: usize) -> Result<TailIndexEstimate> {
    let n = samples.len();
    if k == 0 || k >= n {
        return Err(WicksellError::Domain(format!("need 1 <= k < n, got k = {k}, n = {n}")));
    }
    let mut logs = Vec::with_capacity(n);
    for &x in samples {
        let d = x - eta;
        if !(d > T::zero()) {
            return Err(WicksellError::Domain(format!("sample {x} is not above the endpoint {eta}")));
        }
        logs.push(-d.as_f64().ln());
    }
    // Largest k + 1 values of log Y, in descending order.
    let (_, pivot, top) = logs.select_nth_unstable_by(n - k - 1, f64::total_cmp);
    let threshold = *pivot;
    let mean = top.iter().sum::<f64>() / k as f64;
    let spacing = mean - threshold;
    if !(spacing > 0.0) {
        return Err(WicksellError::DegenerateThreshold(format!(
            "the top {k} reciprocal values do not exceed the threshold"
        )));
    }
    let beta_hat = 1.0 / spacing;
    Ok(TailIndexEstimate {
        beta_hat,
        slopes: Vec::new(),
        model: TailModel::Plain,
        stderr: Some(beta_hat / (k as f64).sqrt()),
        method: TailMethod::ReciprocalHill,
        ill_conditioned: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbePoint {
    Zero,
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RvProbe {
    pub at: ProbePoint,
    pub estimates: Vec<(f64, f64)>,
    pub last: f64,
}

/// Regular-variation exponent ρ of `func` near 0 or ∞, read off as
/// log[R(tx)/R(t)] / log x along `t_list`.
pub fn rv_exponent_probe<T: Real, F: Fn(T) -> T>(func: F, at: ProbePoint, t_list: &[T], ratio: T) -> Result<RvProbe> {
    if !(ratio > T::zero() && ratio != T::one() && ratio.is_finite()) {
        return Err(WicksellError::InvalidParameter(format!("probe ratio must be positive and not 1, got {ratio}")));
    }
    if t_list.is_empty() {
        return Err(WicksellError::InvalidParameter("no probe points given".into()));
    }
    let log_ratio = ratio.as_f64().ln();
    let mut estimates = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let (a, b) = (func(t), func(t * ratio));
        if !(a > T::zero() && b > T::zero()) {
            return Err(WicksellError::Domain(format!("function not positive near t = {t}")));
        }
        estimates.push((t.as_f64(), (b.as_f64() / a.as_f64()).ln() / log_ratio));
    }
    let last = estimates[estimates.len() - 1].1;
    Ok(RvProbe { at, estimates, last })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCheck {
    pub s: f64,
    /// (n, s^{−n} F(η + s)).
    pub values: Vec<(u32, f64)>,
    /// The same quantities at s/10.
    pub secondary: Vec<(u32, f64)>,
    pub consistent_with_gumbel: bool,
}

impl DecayCheck {
    pub fn max_value(&self) -> f64 {
        self.values.iter().map(|v| v.1).fold(0.0, f64::max)
    }
}

/// Checks that (x − η)^{−n} F(x) is small near η for n = 1..=n_max, as it
/// must be for a law attracted to the Gumbel type.
pub fn gumbel_decay_check<T: Real, F: Fn(T) -> T>(cdf: F, eta: T, n_max: u32, s: T) -> Result<DecayCheck> {
    if n_max == 0 {
        return Err(WicksellError::InvalidParameter("n_max must be at least 1".into()));
    }
    if !(s > T::zero() && s.is_finite()) {
        return Err(WicksellError::InvalidParameter(format!("offset must be positive, got {s}")));
    }
    let scaled = |s: T| -> Vec<(u32, f64)> {
        let f = cdf(eta + s).as_f64().max(0.0);
        let ls = s.as_f64().ln();
        (1..=n_max)
            .map(|n| {
                let v = if f > 0.0 { (f.ln() - n as f64 * ls).exp() } else { 0.0 };
                (n, v)
            })
            .collect()
    };
    let values = scaled(s);
    let secondary = scaled(s / T::lit(10.0));
    let small = values.iter().all(|&(_, v)| v < 1e-3);
    let decreasing = values.iter().zip(&secondary).all(|(a, b)| b.1 <= a.1);
    Ok(DecayCheck { s: s.as_f64(), values, secondary, consistent_with_gumbel: small && decreasing })
}

/// Largest distance between the empirical CDF of `sample` and `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Largest distance between two empirical CDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMinimaResult {
    pub block_size: usize,
    pub n_blocks: usize,
    pub a_m: f64,
    pub b_m: f64,
    pub normalized: Vec<f64>,
    pub candidate: MinStableLaw,
    pub ks_stat: f64,
}

/// Draws `n_blocks` blocks of `m` values, normalizes each block minimum by
/// b_m = η and a_m = Q(1/m) − η, and measures the KS distance to `candidate`.
///
/// `sampler(m, seed)` must return `m` draws; block seeds are derived from `seed`.
pub fn block_minima_experiment<T, S, Q>(
    sampler: S,
    quantile: Q,
    eta: T,
    m: usize,
    n_blocks: usize,
    candidate: MinStableLaw,
    seed: u64,
) -> Result<BlockMinimaResult>
where
    T: Real,
    S: Fn(usize, u64) -> Result<Vec<T>> + Sync,
    Q: Fn(T) -> Result<T>,
{
    if m < 2 {
        return Err(WicksellError::InvalidParameter(format!("block size must be at least 2, got {m}")));
    }
    if n_blocks < 100 {
        return Err(WicksellError::InvalidParameter(format!("need at least 100 blocks, got {n_blocks}")));
    }
    let a_m = quantile(T::one() / T::from_usize(m).unwrap())? - eta;
    if !(a_m > T::zero() && a_m.is_finite()) {
        return Err(WicksellError::Scale(format!("quantile at 1/{m} gives scale {a_m}; no normalization possible")));
    }
    let seeds = rng::par_draw(n_blocks, seed, rand::Rng::random::<u64>);
    let minima: Vec<Result<T>> = seeds
        .par_iter()
        .map(|&s| {
            let block = sampler(m, s)?;
            if block.len() != m {
                return Err(WicksellError::InvalidParameter(format!(
                    "sampler returned {} values instead of {m}",
                    block.len()
                )));
            }
            Ok(block.into_iter().fold(T::infinity(), T::min))
        })
        .collect();
    let normalized = minima
        .into_iter()
        .map(|w| w.map(|w| ((w - eta) / a_m).as_f64()))
        .collect::<Result<Vec<f64>>>()?;
    let ks_stat = ks_one_sample(&normalized, |x| candidate.cdf(x));
    Ok(BlockMinimaResult {
        block_size: m,
        n_blocks,
        a_m: a_m.as_f64(),
        b_m: eta.as_f64(),
        normalized,
        candidate,
        ks_stat,
    })
}
