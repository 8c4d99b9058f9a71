//! Independent evaluations of F^(1) used to cross-check the transform.

use serde::Serialize;

use super::moment;
use crate::error::{Result, WicksellError};
use crate::laws::RadiusLaw;
use crate::quad::{integrate, QuadConfig};
use crate::real::Real;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecomposedCdf<T> {
    /// ∫₀^t u dF(u)
    pub i1: T,
    /// ∫_t^∞ (u − √(u² − t²)) dF(u)
    pub i2: T,
    /// (I₁ + I₂) / M₁
    pub total: T,
}

fn check_t<T: Real>(t: T) -> Result<()> {
    if t > T::zero() {
        Ok(())
    } else {
        Err(WicksellError::Domain(format!("abscissa must be positive, got {t}")))
    }
}

fn oracle_cfg<T: Real>() -> QuadConfig<T> {
    QuadConfig::new(1e-15, 1e-11)
}

/// F^(1)(t) as (I₁ + I₂)/M₁, integrating against the density in the radius variable.
pub fn decomposed_cdf_oracle<T: Real>(law: &RadiusLaw<T>, t: T) -> Result<DecomposedCdf<T>> {
    check_t(t)?;
    let m1 = moment(law, 1)?;
    let cfg = oracle_cfg();
    let upper = law.truncation_point();
    let breaks = law.breakpoints();
    let mut i1 = integrate(|u: T| u * law.ac_density(u), T::zero(), t.min(upper), &breaks, &cfg).value;
    let mut i2 = integrate(
        |u: T| t * t / (u + ((u - t) * (u + t)).sqrt()) * law.ac_density(u),
        t,
        upper,
        &breaks,
        &cfg,
    )
    .value;
    for (a, m) in law.atoms() {
        if a <= t {
            i1 = i1 + m * a;
        } else {
            i2 = i2 + m * (a - (a * a - t * t).sqrt());
        }
    }
    Ok(DecomposedCdf { i1, i2, total: (i1 + i2) / m1 })
}

/// F^(1)(t) = (t/M₁)[P(ξ ≤ tη₁) − P(ξ ≤ tη₂)], η₁ with density g, η₂ uniform on [0, 1].
pub fn mixture_cdf_oracle<T: Real>(law: &RadiusLaw<T>, t: T) -> Result<T> {
    check_t(t)?;
    let m1 = moment(law, 1)?;
    let cfg = oracle_cfg();
    let upper = law.truncation_point();
    let breaks = law.breakpoints();

    // P(ξ ≤ tη₁) = ∫₀^∞ F(t cosh w) e^{−w} dw; F = 1 once t cosh w ≥ upper.
    let p1 = if t >= upper {
        T::one()
    } else {
        let w_top = (upper / t).acosh();
        let w_breaks: Vec<T> = breaks.iter().filter(|b| **b > t).map(|b| (*b / t).acosh()).collect();
        let body = integrate(|w: T| law.cdf(t * w.cosh()) * (-w).exp(), T::zero(), w_top, &w_breaks, &cfg);
        body.value + t / (upper + ((upper - t) * (upper + t)).sqrt())
    };
    // P(ξ ≤ tη₂) = ∫₀¹ F(tv) dv
    let v_breaks: Vec<T> = breaks.iter().filter(|b| **b < t).map(|b| *b / t).collect();
    let p2 = integrate(|v: T| law.cdf(t * v), T::zero(), T::one(), &v_breaks, &cfg).value;
    Ok((t / m1 * (p1 - p2)).max(T::zero()))
}
