//! Forward Wicksell transform: the law F^(r) of section radii for codimension
//! r = n − k, given the sphere-radius law F.
//!
//! With the substitution u = √(x² + s²) and M_r = r∫ s^{r−1}(1 − F(s)) ds the
//! section CDF becomes
//!
//! ```text
//! F^(r)(x) = (r / M_r) ∫₀^∞ s^{r−1} [F(√(x² + s²)) − F(s)] ds,
//! ```
//!
//! whose integrand is bounded, non-negative and free of the 1 − (…) cancellation
//! that would otherwise swamp the lower tail. Atoms of F are integrated in
//! closed form.

mod gfactor;
mod oracles;
mod table;

pub use gfactor::GFactorLaw;
pub use oracles::{decomposed_cdf_oracle, mixture_cdf_oracle, DecomposedCdf};
pub use table::{iterate_section, load_cdf_table, tabulate_section_law, GridSpec, SectionLaw, SectionSidecar};

use crate::error::{Result, WicksellError};
use crate::laws::RadiusLaw;
use crate::quad::{integrate, QuadConfig};
use crate::real::Real;

/// Codimension r = n − k of a k-dimensional section of n-space.
pub fn codimension(n: u32, k: u32) -> Result<u32> {
    if k == 0 || k >= n {
        return Err(WicksellError::InvalidParameter(format!("need 1 ≤ k < n, got n = {n}, k = {k}")));
    }
    Ok(n - k)
}

fn check_order(r: u32) -> Result<()> {
    if r == 0 {
        Err(WicksellError::InvalidParameter("codimension r must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn sort_dedup<T: Real>(v: &mut Vec<T>) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v.dedup();
}

/// Geometric ladder of breakpoints from `from` up to `to`.
fn ladder<T: Real>(from: T, to: T, out: &mut Vec<T>) {
    if !(from > T::zero()) {
        return;
    }
    let mut p = from;
    while p < to {
        out.push(p);
        p = p * T::lit(4.0);
    }
}

/// u^r − (u² − x²)_+^{r/2}, without cancellation for u ≫ x.
pub(crate) fn chord_gap<T: Real>(u: T, x: T, r: u32) -> T {
    if u <= x {
        return u.powi(r as i32);
    }
    let b = ((u - x) * (u + x)).sqrt();
    let diff = x * x / (u + b);
    let mut sum = T::zero();
    for j in 0..r {
        sum = sum + u.powi(j as i32) * b.powi((r - 1 - j) as i32);
    }
    diff * sum
}

/// r-th moment M_r = E ξ^r; closed form where available, else
/// r ∫ u^{r−1} (1 − F(u)) du by adaptive quadrature.
pub fn moment<T: Real>(law: &RadiusLaw<T>, r: u32) -> Result<T> {
    check_order(r)?;
    if let Some(m) = law.analytic_moment(r) {
        return Ok(m);
    }
    let cfg = QuadConfig::new(0.0, 1e-12);
    let rr = T::from_u32(r).expect("small integer");
    let integrand = |u: T| rr * u.powi(r as i32 - 1) * (T::one() - law.cdf(u));
    let breaks = law.breakpoints();
    let upper = law.truncation_point();
    let value = integrate(integrand, T::zero(), upper, &breaks, &cfg).value;
    if !law.upper_support().is_finite() {
        let further = law.quantile(T::one() - T::lit(1e-15))?.max(upper);
        let extended = integrate(integrand, T::zero(), further, &breaks, &cfg).value;
        if !extended.is_finite() || (extended - value).abs() > T::lit(1e-6) * value.abs() {
            return Err(WicksellError::DivergentMoment { order: r });
        }
    }
    if !(value.is_finite() && value > T::zero()) {
        return Err(WicksellError::DivergentMoment { order: r });
    }
    Ok(value)
}

/// The transform of one law at one codimension, with M_r and breakpoints cached.
#[derive(Debug, Clone)]
pub struct SectionTransform<T> {
    law: RadiusLaw<T>,
    r: u32,
    moment: T,
    upper: T,
    breaks: Vec<T>,
    atoms: Vec<(T, T)>,
    cfg: QuadConfig<T>,
}

impl<T: Real> SectionTransform<T> {
    pub fn new(law: &RadiusLaw<T>, r: u32) -> Result<Self> {
        check_order(r)?;
        let moment = moment(law, r)?;
        let breaks = law.breakpoints().into_iter().filter(|b| *b > T::zero()).collect();
        Ok(Self {
            law: law.clone(),
            r,
            moment,
            upper: law.truncation_point(),
            breaks,
            atoms: law.atoms(),
            cfg: QuadConfig::relative(1e-10),
        })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn moment(&self) -> T {
        self.moment
    }

    pub fn law(&self) -> &RadiusLaw<T> {
        &self.law
    }

    /// Right end of the section-radius support.
    pub fn upper(&self) -> T {
        self.upper
    }

    fn rr(&self) -> T {
        T::from_u32(self.r).expect("small integer")
    }

    fn s_breakpoints(&self, x: T) -> Vec<T> {
        let mut pts = Vec::with_capacity(2 * self.breaks.len() + 24);
        for &b in &self.breaks {
            pts.push(b);
            if b > x {
                pts.push(((b - x) * (b + x)).sqrt());
            }
        }
        pts.push(x);
        ladder(x, self.upper, &mut pts);
        sort_dedup(&mut pts);
        pts
    }

    fn accept(&self, x: T, value: T, error: T, converged: bool) -> Result<T> {
        let slack = T::lit(1e-6).max(T::lit(10.0) * T::tol_floor());
        if converged || error <= slack * value.abs() || error <= T::lit(1e-14) {
            Ok(value)
        } else {
            Err(WicksellError::Quadrature { abscissa: x.as_f64(), value: value.as_f64(), error: error.as_f64() })
        }
    }

    /// F^(r)(x).
    pub fn cdf(&self, x: T) -> Result<T> {
        if !(x > T::zero()) {
            return Err(WicksellError::Domain(format!("section radius must be positive, got {x}")));
        }
        if x >= self.upper {
            return Ok(T::one());
        }
        let r = self.r;
        let law = &self.law;
        let integrand = |s: T| {
            let h = x * x / ((x * x + s * s).sqrt() + s);
            s.powi(r as i32 - 1) * law.ac_increment(s, h)
        };
        let q = integrate(integrand, T::zero(), self.upper, &self.s_breakpoints(x), &self.cfg);
        let continuous = self.accept(x, q.value, q.error, q.converged)? * self.rr();
        let atomic = self
            .atoms
            .iter()
            .fold(T::zero(), |acc, &(a, m)| acc + m * chord_gap(a, x, r));
        Ok(((continuous + atomic) / self.moment).max(T::zero()).min(T::one()))
    }

    /// f^(r)(x).
    pub fn pdf(&self, x: T) -> Result<T> {
        if !(x > T::zero()) {
            return Err(WicksellError::Domain(format!("section radius must be positive, got {x}")));
        }
        let r = self.r;
        let mut atomic = T::zero();
        for &(a, m) in &self.atoms {
            if r == 1 && a == x {
                return Err(WicksellError::SingularDensity { x: x.as_f64() });
            }
            if a > x || (r >= 3 && a == x) {
                let gap = (a - x) * (a + x);
                atomic = atomic + m * gap.powf(T::lit((r as f64 - 2.0) / 2.0));
            }
        }
        let mut continuous = T::zero();
        if x < self.upper && self.law.has_density() {
            let law = &self.law;
            let top = ((self.upper - x) * (self.upper + x)).sqrt();
            let integrand = |s: T| {
                let u = (x * x + s * s).sqrt();
                s.powi(r as i32 - 1) * law.ac_density(u) / u
            };
            let q = integrate(integrand, T::zero(), top, &self.s_breakpoints(x), &self.cfg);
            continuous = self.accept(x, q.value, q.error, q.converged)?;
        }
        Ok(x * self.rr() / self.moment * (continuous + atomic))
    }
}

/// F^(r)(x) for a single abscissa.
pub fn section_cdf<T: Real>(law: &RadiusLaw<T>, r: u32, x: T) -> Result<T> {
    SectionTransform::new(law, r)?.cdf(x)
}

/// f^(r)(x) for a single abscissa.
pub fn section_pdf<T: Real>(law: &RadiusLaw<T>, r: u32, x: T) -> Result<T> {
    SectionTransform::new(law, r)?.pdf(x)
}
