//! Catalog of sphere-radius distributions.
//!
//! Every law is split into an absolutely continuous part (`ac_*`) and a finite
//! list of atoms; the transform integrates the former and evaluates the latter
//! exactly.

use std::fmt;
use std::sync::Arc;

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WicksellError};
use crate::interp::MonotoneCubic;
use crate::real::Real;
use crate::rng;

/// Min-domain of attraction of a law (minima convention).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum EvtClass {
    Weibull { alpha: f64 },
    Gumbel,
    Frechet { alpha: f64 },
    /// Point mass: the normalized minimum is degenerate.
    Degenerate,
}

impl EvtClass {
    pub fn weibull(alpha: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        Ok(Self::Weibull { alpha })
    }

    pub fn frechet(alpha: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        Ok(Self::Frechet { alpha })
    }
}

impl fmt::Display for EvtClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Weibull { alpha } => write!(f, "weibull({alpha})"),
            Self::Gumbel => write!(f, "gumbel"),
            Self::Frechet { alpha } => write!(f, "frechet({alpha})"),
            Self::Degenerate => write!(f, "degenerate"),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(WicksellError::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Parsed law description, the form used on the command line and in sidecars.
///
/// Grammar: `power --alpha A`, `uniform`, `dirac --rho R`,
/// `weibull --alpha A --lambda L`, `shifted --eta0 E --inner <spec>`,
/// `scaled --c C --inner <spec>`, `truncrecipexp`. Everything after
/// `--inner` is the nested spec.
#[derive(Debug, Clone, PartialEq)]
pub enum LawSpec {
    Power { alpha: f64 },
    Uniform,
    Dirac { rho: f64 },
    Weibull { alpha: f64, lambda: f64 },
    Shifted { eta0: f64, inner: Box<LawSpec> },
    Scaled { c: f64, inner: Box<LawSpec> },
    TruncRecipExp,
}

impl LawSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let Some((&kind, rest)) = tokens.split_first() else {
            return Err(WicksellError::Parse("empty law spec".into()));
        };
        let mut alpha = None;
        let mut rho = None;
        let mut lambda = None;
        let mut eta0 = None;
        let mut c = None;
        let mut inner = None;
        let mut i = 0;
        while i < rest.len() {
            let flag = rest[i];
            if flag == "--inner" {
                inner = Some(rest[i + 1..].join(" "));
                break;
            }
            let value = rest
                .get(i + 1)
                .ok_or_else(|| WicksellError::Parse(format!("missing value after {flag}")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| WicksellError::Parse(format!("bad number `{value}` for {flag}")))?;
            let slot = match flag {
                "--alpha" => &mut alpha,
                "--rho" => &mut rho,
                "--lambda" => &mut lambda,
                "--eta0" => &mut eta0,
                "--c" => &mut c,
                other => return Err(WicksellError::Parse(format!("unknown law flag {other}"))),
            };
            *slot = Some(value);
            i += 2;
        }
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| WicksellError::Parse(format!("law `{kind}` needs --{name}")))
        };
        let nested = |inner: Option<String>| -> Result<Box<LawSpec>> {
            let text = inner.ok_or_else(|| WicksellError::Parse(format!("law `{kind}` needs --inner")))?;
            Ok(Box::new(LawSpec::parse(&text)?))
        };
        match kind {
            "power" => Ok(Self::Power { alpha: need(alpha, "alpha")? }),
            "uniform" => Ok(Self::Uniform),
            "dirac" => Ok(Self::Dirac { rho: need(rho, "rho")? }),
            "weibull" => Ok(Self::Weibull { alpha: need(alpha, "alpha")?, lambda: need(lambda, "lambda")? }),
            "shifted" => Ok(Self::Shifted { eta0: need(eta0, "eta0")?, inner: nested(inner)? }),
            "scaled" => Ok(Self::Scaled { c: need(c, "c")?, inner: nested(inner)? }),
            "truncrecipexp" => Ok(Self::TruncRecipExp),
            other => Err(WicksellError::Parse(format!("unknown law kind `{other}`"))),
        }
    }

    pub fn build<T: Real>(&self) -> Result<RadiusLaw<T>> {
        match self {
            Self::Power { alpha } => RadiusLaw::power(*alpha),
            Self::Uniform => Ok(RadiusLaw::uniform()),
            Self::Dirac { rho } => RadiusLaw::dirac(*rho),
            Self::Weibull { alpha, lambda } => RadiusLaw::weibull(*alpha, *lambda),
            Self::Shifted { eta0, inner } => RadiusLaw::shifted(inner.build()?, *eta0),
            Self::Scaled { c, inner } => RadiusLaw::scaled(inner.build()?, *c),
            Self::TruncRecipExp => Ok(RadiusLaw::TruncRecipExp),
        }
    }
}

impl fmt::Display for LawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { alpha } => write!(f, "power --alpha {alpha}"),
            Self::Uniform => write!(f, "uniform"),
            Self::Dirac { rho } => write!(f, "dirac --rho {rho}"),
            Self::Weibull { alpha, lambda } => write!(f, "weibull --alpha {alpha} --lambda {lambda}"),
            Self::Shifted { eta0, inner } => write!(f, "shifted --eta0 {eta0} --inner {inner}"),
            Self::Scaled { c, inner } => write!(f, "scaled --c {c} --inner {inner}"),
            Self::TruncRecipExp => write!(f, "truncrecipexp"),
        }
    }
}

impl std::str::FromStr for LawSpec {
    type Err = WicksellError;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// A distribution tabulated on a grid, read through a monotone cubic.
///
/// Below the first knot the CDF is continued as a pure power whose exponent
/// matches the log-derivative at that knot; above the last knot it is 1.
#[derive(Debug, Clone)]
pub struct TabulatedCdf<T> {
    curve: MonotoneCubic<T>,
    lower_exponent: T,
    label: String,
}

impl<T: Real> TabulatedCdf<T> {
    pub fn new(xs: Vec<T>, cdf: Vec<T>, pdf: Option<&[T]>, label: impl Into<String>) -> Result<Self> {
        if xs.first().is_none_or(|&x| !(x > T::zero())) {
            return Err(WicksellError::InvalidParameter("tabulated law needs positive abscissae".into()));
        }
        let top = *cdf.last().unwrap_or(&T::zero());
        if !(top > T::zero()) {
            return Err(WicksellError::InvalidParameter("tabulated law carries no mass".into()));
        }
        // Normalize and repair rounding-level non-monotonicity.
        let mut running = T::zero();
        let cdf: Vec<T> = cdf
            .iter()
            .map(|&v| {
                running = running.max((v / top).min(T::one()).max(T::zero()));
                running
            })
            .collect();
        let pdf: Option<Vec<T>> = pdf.map(|p| p.iter().map(|&v| v / top).collect());
        let curve = MonotoneCubic::new(xs, cdf, pdf.as_deref())?;
        let (x0, f0, d0) = (curve.x_min(), curve.values()[0], curve.slopes()[0]);
        let lower_exponent = if f0 > T::zero() && d0 > T::zero() { d0 * x0 / f0 } else { T::one() };
        Ok(Self { curve, lower_exponent, label: label.into() })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn knots(&self) -> &[T] {
        self.curve.knots()
    }

    pub fn x_max(&self) -> T {
        self.curve.x_max()
    }

    pub fn cdf(&self, x: T) -> T {
        let x0 = self.curve.x_min();
        if x <= T::zero() {
            T::zero()
        } else if x < x0 {
            self.curve.values()[0] * (x / x0).powf(self.lower_exponent)
        } else {
            self.curve.eval(x)
        }
    }

    pub fn density(&self, x: T) -> T {
        let x0 = self.curve.x_min();
        if x <= T::zero() || x > self.curve.x_max() {
            T::zero()
        } else if x < x0 {
            self.lower_exponent * self.cdf(x) / x
        } else {
            self.curve.derivative(x)
        }
    }

    pub fn increment(&self, a: T, h: T) -> T {
        let b = a + h;
        let x0 = self.curve.x_min();
        if b <= T::zero() || a >= self.curve.x_max() {
            return T::zero();
        }
        if a > T::zero() && b <= x0 {
            return self.cdf(a) * (self.lower_exponent * (h / a).ln_1p()).exp_m1();
        }
        if a >= x0 {
            return self.curve.increment(a, h.min(self.curve.x_max() - a));
        }
        self.cdf(b) - self.cdf(a)
    }

    pub fn quantile(&self, p: T) -> T {
        let (mut lo, mut hi) = (T::zero(), self.curve.x_max());
        for _ in 0..200 {
            let mid = T::half() * (lo + hi);
            if !(mid > lo && mid < hi) {
                break;
            }
            if self.cdf(mid) >= p {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Sphere-radius distribution F with lower endpoint η.
#[derive(Debug, Clone)]
pub enum RadiusLaw<T> {
    /// F(x) = x^α on [0, 1].
    Power { alpha: T },
    /// Point mass at ρ.
    Dirac { rho: T },
    /// F(x) = 1 − exp(−(x/λ)^α).
    Weibull { alpha: T, lambda: T },
    /// F(x) = inner(x − η₀).
    Shifted { inner: Box<RadiusLaw<T>>, eta0: T },
    /// F(x) = inner(x / c).
    Scaled { inner: Box<RadiusLaw<T>>, c: T },
    /// F(x) = exp(−1/x) on (0, 1), with the remaining mass 1 − 1/e as an atom at 1.
    TruncRecipExp,
    Tabulated(Arc<TabulatedCdf<T>>),
}

impl<T: Real> RadiusLaw<T> {
    pub fn power(alpha: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        Ok(Self::Power { alpha: T::lit(alpha) })
    }

    pub fn uniform() -> Self {
        Self::Power { alpha: T::one() }
    }

    pub fn dirac(rho: f64) -> Result<Self> {
        positive("rho", rho)?;
        Ok(Self::Dirac { rho: T::lit(rho) })
    }

    pub fn weibull(alpha: f64, lambda: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("lambda", lambda)?;
        Ok(Self::Weibull { alpha: T::lit(alpha), lambda: T::lit(lambda) })
    }

    pub fn shifted(inner: Self, eta0: f64) -> Result<Self> {
        if !(eta0.is_finite() && eta0 >= 0.0) {
            return Err(WicksellError::InvalidParameter(format!("eta0 must be non-negative, got {eta0}")));
        }
        Ok(Self::Shifted { inner: Box::new(inner), eta0: T::lit(eta0) })
    }

    pub fn scaled(inner: Self, c: f64) -> Result<Self> {
        positive("c", c)?;
        Ok(Self::Scaled { inner: Box::new(inner), c: T::lit(c) })
    }

    pub fn truncrecipexp() -> Self {
        Self::TruncRecipExp
    }

    pub fn tabulated(table: TabulatedCdf<T>) -> Self {
        Self::Tabulated(Arc::new(table))
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Power { alpha } if *alpha == T::one() => "uniform".into(),
            Self::Power { alpha } => format!("power --alpha {alpha}"),
            Self::Dirac { rho } => format!("dirac --rho {rho}"),
            Self::Weibull { alpha, lambda } => format!("weibull --alpha {alpha} --lambda {lambda}"),
            Self::Shifted { inner, eta0 } => format!("shifted --eta0 {eta0} --inner {}", inner.describe()),
            Self::Scaled { inner, c } => format!("scaled --c {c} --inner {}", inner.describe()),
            Self::TruncRecipExp => "truncrecipexp".into(),
            Self::Tabulated(t) => format!("tabulated[{}]", t.label()),
        }
    }

    /// η = inf{x : F(x) > 0}.
    pub fn lower_endpoint(&self) -> T {
        match self {
            Self::Dirac { rho } => *rho,
            Self::Shifted { inner, eta0 } => inner.lower_endpoint() + *eta0,
            Self::Scaled { inner, c } => inner.lower_endpoint() * *c,
            _ => T::zero(),
        }
    }

    /// Right end of the support; infinite for unbounded laws.
    pub fn upper_support(&self) -> T {
        match self {
            Self::Power { .. } | Self::TruncRecipExp => T::one(),
            Self::Dirac { rho } => *rho,
            Self::Weibull { .. } => T::infinity(),
            Self::Shifted { inner, eta0 } => inner.upper_support() + *eta0,
            Self::Scaled { inner, c } => inner.upper_support() * *c,
            Self::Tabulated(t) => t.x_max(),
        }
    }

    /// Upper integration limit: the support end, or the 1 − 10⁻¹² quantile.
    pub fn truncation_point(&self) -> T {
        let u = self.upper_support();
        if u.is_finite() {
            u
        } else {
            self.quantile(T::one() - T::lit(1e-12)).unwrap_or(u)
        }
    }

    /// Declared domain of attraction; unknown for tabulated laws.
    pub fn evt_class(&self) -> Option<EvtClass> {
        match self {
            Self::Power { alpha } | Self::Weibull { alpha, .. } => {
                Some(EvtClass::Weibull { alpha: alpha.as_f64() })
            }
            Self::Dirac { .. } => Some(EvtClass::Degenerate),
            Self::Shifted { inner, .. } | Self::Scaled { inner, .. } => inner.evt_class(),
            Self::TruncRecipExp => Some(EvtClass::Gumbel),
            Self::Tabulated(_) => None,
        }
    }

    /// (location, mass) of every atom.
    pub fn atoms(&self) -> Vec<(T, T)> {
        match self {
            Self::Dirac { rho } => vec![(*rho, T::one())],
            Self::TruncRecipExp => vec![(T::one(), T::one() - (-T::one()).exp())],
            Self::Shifted { inner, eta0 } => {
                inner.atoms().into_iter().map(|(a, m)| (a + *eta0, m)).collect()
            }
            Self::Scaled { inner, c } => inner.atoms().into_iter().map(|(a, m)| (a * *c, m)).collect(),
            _ => Vec::new(),
        }
    }

    /// Abscissae where the law loses smoothness: endpoints, atoms, table knots.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut pts = match self {
            Self::Shifted { inner, eta0 } => inner.breakpoints().into_iter().map(|p| p + *eta0).collect(),
            Self::Scaled { inner, c } => inner.breakpoints().into_iter().map(|p| p * *c).collect(),
            Self::Tabulated(t) => t.knots().to_vec(),
            _ => Vec::new(),
        };
        pts.push(self.lower_endpoint());
        let u = self.upper_support();
        if u.is_finite() {
            pts.push(u);
        }
        pts.extend(self.atoms().into_iter().map(|(a, _)| a));
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        pts.dedup();
        pts
    }

    /// CDF of the absolutely continuous part (a sub-distribution when atoms exist).
    pub fn ac_cdf(&self, x: T) -> T {
        match self {
            Self::Power { alpha } => {
                if x <= T::zero() {
                    T::zero()
                } else if x >= T::one() {
                    T::one()
                } else {
                    x.powf(*alpha)
                }
            }
            Self::Dirac { .. } => T::zero(),
            Self::Weibull { alpha, lambda } => {
                if x <= T::zero() {
                    T::zero()
                } else {
                    -(-(x / *lambda).powf(*alpha)).exp_m1()
                }
            }
            Self::Shifted { inner, eta0 } => inner.ac_cdf(x - *eta0),
            Self::Scaled { inner, c } => inner.ac_cdf(x / *c),
            Self::TruncRecipExp => {
                if x <= T::zero() {
                    T::zero()
                } else {
                    (-T::one() / x.min(T::one())).exp()
                }
            }
            Self::Tabulated(t) => t.cdf(x),
        }
    }

    /// F_ac(a + h) − F_ac(a), accurate in relative terms for small `h`.
    pub fn ac_increment(&self, a: T, h: T) -> T {
        let b = a + h;
        if !(h > T::zero()) {
            return T::zero();
        }
        match self {
            Self::Power { alpha } => {
                if b <= T::zero() || a >= T::one() {
                    T::zero()
                } else if a <= T::zero() {
                    b.min(T::one()).powf(*alpha)
                } else if b >= T::one() {
                    -(*alpha * a.ln()).exp_m1()
                } else {
                    a.powf(*alpha) * (*alpha * (h / a).ln_1p()).exp_m1()
                }
            }
            Self::Dirac { .. } => T::zero(),
            Self::Weibull { alpha, lambda } => {
                if b <= T::zero() {
                    T::zero()
                } else if a <= T::zero() {
                    self.ac_cdf(b)
                } else {
                    let base = (a / *lambda).powf(*alpha);
                    let gap = base * (*alpha * (h / a).ln_1p()).exp_m1();
                    (-base).exp() * -(-gap).exp_m1()
                }
            }
            Self::Shifted { inner, eta0 } => inner.ac_increment(a - *eta0, h),
            Self::Scaled { inner, c } => inner.ac_increment(a / *c, h / *c),
            Self::TruncRecipExp => {
                if b <= T::zero() || a >= T::one() {
                    T::zero()
                } else if a <= T::zero() {
                    self.ac_cdf(b)
                } else if b >= T::one() {
                    (-T::one()).exp() * -(-(T::one() - a) / a).exp_m1()
                } else {
                    (-T::one() / b).exp() * -(-h / (a * b)).exp_m1()
                }
            }
            Self::Tabulated(t) => t.increment(a, h),
        }
    }

    /// Density of the absolutely continuous part.
    pub fn ac_density(&self, x: T) -> T {
        match self {
            Self::Power { alpha } => {
                if x > T::zero() && x < T::one() {
                    *alpha * x.powf(*alpha - T::one())
                } else {
                    T::zero()
                }
            }
            Self::Dirac { .. } => T::zero(),
            Self::Weibull { alpha, lambda } => {
                if x > T::zero() {
                    let z = x / *lambda;
                    *alpha / *lambda * z.powf(*alpha - T::one()) * (-z.powf(*alpha)).exp()
                } else {
                    T::zero()
                }
            }
            Self::Shifted { inner, eta0 } => inner.ac_density(x - *eta0),
            Self::Scaled { inner, c } => inner.ac_density(x / *c) / *c,
            Self::TruncRecipExp => {
                if x > T::zero() && x < T::one() {
                    (-T::one() / x).exp() / (x * x)
                } else {
                    T::zero()
                }
            }
            Self::Tabulated(t) => t.density(x),
        }
    }

    pub fn has_density(&self) -> bool {
        match self {
            Self::Dirac { .. } => false,
            Self::Shifted { inner, .. } | Self::Scaled { inner, .. } => inner.has_density(),
            _ => true,
        }
    }

    pub fn cdf(&self, x: T) -> T {
        let jumps = self
            .atoms()
            .into_iter()
            .filter(|(a, _)| x >= *a)
            .fold(T::zero(), |acc, (_, m)| acc + m);
        (self.ac_cdf(x) + jumps).min(T::one())
    }

    /// Density at `x`; `None` for purely atomic laws and at atom locations.
    pub fn pdf(&self, x: T) -> Option<T> {
        if !self.has_density() || self.atoms().iter().any(|(a, _)| *a == x) {
            None
        } else {
            Some(self.ac_density(x))
        }
    }

    /// Generalized inverse inf{x : F(x) ≥ p}.
    pub fn quantile(&self, p: T) -> Result<T> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(WicksellError::Domain(format!("quantile level {p} outside [0, 1]")));
        }
        Ok(match self {
            Self::Power { alpha } => p.powf(T::one() / *alpha),
            Self::Dirac { rho } => *rho,
            Self::Weibull { alpha, lambda } => *lambda * (-(-p).ln_1p()).powf(T::one() / *alpha),
            Self::Shifted { inner, eta0 } => inner.quantile(p)? + *eta0,
            Self::Scaled { inner, c } => inner.quantile(p)? * *c,
            Self::TruncRecipExp => {
                if p <= T::zero() {
                    T::zero()
                } else if p < (-T::one()).exp() {
                    -T::one() / p.ln()
                } else {
                    T::one()
                }
            }
            Self::Tabulated(t) => t.quantile(p),
        })
    }

    /// Closed-form E ξ^r where the law provides one.
    pub fn analytic_moment(&self, r: u32) -> Option<T> {
        let rr = T::from_u32(r)?;
        match self {
            Self::Power { alpha } => Some(*alpha / (*alpha + rr)),
            Self::Dirac { rho } => Some(rho.powi(r as i32)),
            Self::Weibull { alpha, lambda } => Some(lambda.powi(r as i32) * (T::one() + rr / *alpha).gamma()),
            Self::Scaled { inner, c } => inner.analytic_moment(r).map(|m| m * c.powi(r as i32)),
            _ => None,
        }
    }

    /// `n` radii by inverse transform, deterministic in `(seed, n)`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<T> {
        rng::par_draw(n, seed, |g| {
            let p = T::lit(rng::open01(g));
            self.quantile(p).expect("open unit interval is a valid level")
        })
    }

    /// Closed-form draw from the size-biased law u^r dF(u) / M_r, when one exists.
    pub(crate) fn biased_draw(&self, r: u32, g: &mut rand_chacha::ChaCha8Rng) -> Option<T> {
        let rr = T::from_u32(r)?;
        match self {
            Self::Power { alpha } => Some(T::lit(rng::open01(g)).powf(T::one() / (*alpha + rr))),
            Self::Dirac { rho } => Some(*rho),
            Self::Weibull { alpha, lambda } => {
                let shape = (T::one() + rr / *alpha).as_f64();
                let gamma = Gamma::new(shape, 1.0).ok()?;
                Some(*lambda * T::lit(gamma.sample(g)).powf(T::one() / *alpha))
            }
            Self::Scaled { inner, c } => inner.biased_draw(r, g).map(|v| v * *c),
            _ => None,
        }
    }

    pub(crate) fn has_closed_biased_draw(&self) -> bool {
        match self {
            Self::Power { .. } | Self::Dirac { .. } | Self::Weibull { .. } => true,
            Self::Scaled { inner, .. } => inner.has_closed_biased_draw(),
            _ => false,
        }
    }
}
