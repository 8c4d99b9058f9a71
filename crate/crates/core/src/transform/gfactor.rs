//! The mixing law with density g(v) = v/√(v² − 1) − 1 on (1, ∞).
//!
//! Under v = cosh w the measure g(v) dv becomes e^{−w} dw.

use crate::error::{Result, WicksellError};
use crate::real::Real;
use crate::rng;

#[derive(Debug, Clone, Copy, Default)]
pub struct GFactorLaw;

impl GFactorLaw {
    pub fn pdf<T: Real>(&self, v: T) -> T {
        self.pdf_above_one(v - T::one())
    }

    /// g(1 + d), exact for offsets `d` below the resolution of 1 + d.
    pub fn pdf_above_one<T: Real>(&self, d: T) -> T {
        if d <= T::zero() {
            return T::zero();
        }
        let root = (d * (d + T::two())).sqrt();
        // v/√(v²−1) − 1 = 1 / (√(v²−1) (v + √(v²−1)))
        T::one() / (root * (T::one() + d + root))
    }

    /// G(v) = 1 + √(v² − 1) − v.
    pub fn cdf<T: Real>(&self, v: T) -> T {
        if v <= T::one() {
            return T::zero();
        }
        let root = ((v - T::one()) * (v + T::one())).sqrt();
        T::one() - T::one() / (v + root)
    }

    /// G⁻¹(p) = (1 + (1 − p)²) / (2(1 − p)) on the open unit interval.
    pub fn quantile<T: Real>(&self, p: T) -> Result<T> {
        if !(p > T::zero() && p < T::one()) {
            return Err(WicksellError::Domain(format!("g-factor quantile needs p in (0, 1), got {p}")));
        }
        let q = T::one() - p;
        Ok((T::one() + q * q) / (T::two() * q))
    }

    pub fn sample<T: Real>(&self, n: usize, seed: u64) -> Vec<T> {
        rng::par_draw(n, seed, |g| {
            self.quantile(T::lit(rng::open01(g))).expect("open unit interval")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadConfig};

    #[test]
    fn density_integrates_to_one() {
        let g = GFactorLaw;
        let top = 100.0f64;
        let cfg = QuadConfig::relative(1e-13);
        // v = 1 + y² removes the inverse square-root singularity at v = 1.
        let body = integrate(|y: f64| 2.0 * y * g.pdf_above_one(y * y), 0.0, top, &[0.01, 0.1, 1.0, 10.0], &cfg);
        let tail = 1.0 - g.cdf(1.0 + top * top);
        assert!((body.value + tail - 1.0).abs() < 1e-10, "{}", body.value + tail);
    }

    #[test]
    fn cdf_matches_naive_form_and_inverts() {
        let g = GFactorLaw;
        for &v in &[1.0001f64, 1.25, 3.0, 40.0] {
            let naive = 1.0 + (v * v - 1.0).sqrt() - v;
            assert!((g.cdf(v) - naive).abs() < 1e-12);
            assert!((g.quantile(g.cdf(v)).unwrap() - v).abs() < 1e-9 * v);
        }
        assert_eq!(g.quantile(0.5f64).unwrap(), 1.25);
        assert!((g.quantile(1e-12f64).unwrap() - 1.0).abs() < 1e-11);
        assert!(g.quantile(0.0f64).is_err());
        assert!(g.quantile(1.0f64).is_err());
    }
}
