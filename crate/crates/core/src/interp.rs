//! Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson).

use crate::error::{Result, WicksellError};
use crate::real::Real;

#[derive(Debug, Clone)]
pub struct MonotoneCubic<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    ds: Vec<T>,
}

impl<T: Real> MonotoneCubic<T> {
    /// Builds the interpolant through non-decreasing data.
    ///
    /// Knot slopes are taken from `slopes` where given and finite, otherwise
    /// estimated from the data; the limiter then enforces monotonicity.
    pub fn new(xs: Vec<T>, ys: Vec<T>, slopes: Option<&[T]>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(WicksellError::InvalidParameter(format!(
                "interpolation needs at least two knots with matching values (got {n} / {})",
                ys.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(WicksellError::InvalidParameter("knots must be strictly increasing".into()));
        }
        if ys.windows(2).any(|w| w[1] < w[0]) {
            return Err(WicksellError::InvalidParameter("values must be non-decreasing".into()));
        }
        let secants: Vec<T> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let estimated = estimate_slopes(&xs, &secants);
        let mut ds: Vec<T> = match slopes {
            Some(given) if given.len() == n => given
                .iter()
                .zip(&estimated)
                .map(|(&g, &e)| if g.is_finite() && g >= T::zero() { g } else { e })
                .collect(),
            _ => estimated,
        };
        limit(&secants, &mut ds);
        Ok(Self { xs, ys, ds })
    }

    pub fn knots(&self) -> &[T] {
        &self.xs
    }

    pub fn values(&self) -> &[T] {
        &self.ys
    }

    pub fn slopes(&self) -> &[T] {
        &self.ds
    }

    pub fn x_min(&self) -> T {
        self.xs[0]
    }

    pub fn x_max(&self) -> T {
        self.xs[self.xs.len() - 1]
    }

    /// Segment index containing `x`, clamped to the knot range.
    fn segment(&self, x: T) -> usize {
        let idx = self.xs.partition_point(|&k| k <= x);
        idx.saturating_sub(1).min(self.xs.len() - 2)
    }

    fn coeffs(&self, i: usize) -> [T; 4] {
        let h = self.xs[i + 1] - self.xs[i];
        let delta = (self.ys[i + 1] - self.ys[i]) / h;
        let (d0, d1) = (self.ds[i], self.ds[i + 1]);
        let three = T::lit(3.0);
        [
            self.ys[i],
            d0,
            (three * delta - T::two() * d0 - d1) / h,
            (d0 + d1 - T::two() * delta) / (h * h),
        ]
    }

    /// Value at `x`; clamped to the end values outside the knot range.
    pub fn eval(&self, x: T) -> T {
        if x <= self.x_min() {
            return self.ys[0];
        }
        if x >= self.x_max() {
            return self.ys[self.ys.len() - 1];
        }
        let i = self.segment(x);
        let c = self.coeffs(i);
        let t = x - self.xs[i];
        c[0] + t * (c[1] + t * (c[2] + t * c[3]))
    }

    /// First derivative at `x`; zero outside the knot range.
    pub fn derivative(&self, x: T) -> T {
        if x < self.x_min() || x > self.x_max() {
            return T::zero();
        }
        let i = self.segment(x);
        let c = self.coeffs(i);
        let t = x - self.xs[i];
        c[1] + t * (T::two() * c[2] + T::lit(3.0) * t * c[3])
    }

    /// `eval(a + h) - eval(a)` without cancellation when both ends share a segment.
    pub fn increment(&self, a: T, h: T) -> T {
        let b = a + h;
        if a >= self.x_min() && b <= self.x_max() {
            let i = self.segment(a);
            if b <= self.xs[i + 1] {
                let c = self.coeffs(i);
                let t1 = a - self.xs[i];
                let t2 = t1 + h;
                return h * (c[1] + c[2] * (t1 + t2) + c[3] * (t1 * t1 + t1 * t2 + t2 * t2));
            }
        }
        self.eval(b) - self.eval(a)
    }

    /// Exact integral of the interpolant over `[a, b]` within the knot range.
    pub fn integral(&self, a: T, b: T) -> T {
        let a = a.max(self.x_min());
        let b = b.min(self.x_max());
        if !(b > a) {
            return T::zero();
        }
        let prim = |c: &[T; 4], t: T| {
            t * (c[0] + t * (c[1] / T::two() + t * (c[2] / T::lit(3.0) + t * c[3] / T::lit(4.0))))
        };
        let (ia, ib) = (self.segment(a), self.segment(b));
        let mut total = T::zero();
        for i in ia..=ib {
            let c = self.coeffs(i);
            let lo = if i == ia { a } else { self.xs[i] } - self.xs[i];
            let hi = if i == ib { b } else { self.xs[i + 1] } - self.xs[i];
            total = total + prim(&c, hi) - prim(&c, lo);
        }
        total
    }
}

fn estimate_slopes<T: Real>(xs: &[T], secants: &[T]) -> Vec<T> {
    let n = xs.len();
    let mut ds = vec![T::zero(); n];
    if n == 2 {
        ds[0] = secants[0];
        ds[1] = secants[0];
        return ds;
    }
    for k in 1..n - 1 {
        let (s0, s1) = (secants[k - 1], secants[k]);
        if s0 <= T::zero() || s1 <= T::zero() {
            continue;
        }
        let h0 = xs[k] - xs[k - 1];
        let h1 = xs[k + 1] - xs[k];
        let w1 = T::two() * h1 + h0;
        let w2 = h1 + T::two() * h0;
        ds[k] = (w1 + w2) / (w1 / s0 + w2 / s1);
    }
    ds[0] = edge_slope(xs[1] - xs[0], xs[2] - xs[1], secants[0], secants[1]);
    ds[n - 1] = edge_slope(
        xs[n - 1] - xs[n - 2],
        xs[n - 2] - xs[n - 3],
        secants[n - 2],
        secants[n - 3],
    );
    ds
}

fn edge_slope<T: Real>(h0: T, h1: T, s0: T, s1: T) -> T {
    let d = ((T::two() * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d.signum() != s0.signum() {
        T::zero()
    } else if s0.signum() != s1.signum() && d.abs() > T::lit(3.0) * s0.abs() {
        T::lit(3.0) * s0
    } else {
        d
    }
}

fn limit<T: Real>(secants: &[T], ds: &mut [T]) {
    for (k, &delta) in secants.iter().enumerate() {
        if delta == T::zero() {
            ds[k] = T::zero();
            ds[k + 1] = T::zero();
            continue;
        }
        let a = ds[k] / delta;
        let b = ds[k + 1] / delta;
        let r2 = a * a + b * b;
        if r2 > T::lit(9.0) {
            let tau = T::lit(3.0) / r2.sqrt();
            ds[k] = tau * a * delta;
            ds[k + 1] = tau * b * delta;
        }
    }
}
