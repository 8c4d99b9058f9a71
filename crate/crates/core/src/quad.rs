//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature.
//!
//! The interval is first split at caller supplied breakpoints; the subinterval
//! with the largest error estimate is then bisected until the summed error
//! meets `max(abs_tol, rel_tol * |I|)` or the subdivision budget is spent.
//! Error scaling follows QUADPACK's `qk21`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::real::Real;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd Kronrod nodes (1, 3, 5, 7, 9).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> QuadConfig<T> {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol: T::lit(abs_tol),
            rel_tol: T::lit(rel_tol).max(T::tol_floor()),
            max_intervals: 4000,
        }
    }

    pub fn relative(rel_tol: f64) -> Self {
        Self::new(1e-300_f64.max(T::min_positive_value().as_f64()), rel_tol)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
    pub converged: bool,
}

struct Piece<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<T: Real> Eq for Piece<T> {}

impl<T: Real> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn rescale_error<T: Real>(err: T, res_abs: T, res_asc: T) -> T {
    let mut err = err.abs();
    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor_mag = T::min_positive_value() / (T::lit(50.0) * T::epsilon());
    if res_abs > floor_mag {
        let min_err = T::lit(50.0) * T::epsilon() * res_abs;
        if min_err > err {
            err = min_err;
        }
    }
    err
}

/// One 21-point Kronrod panel with its embedded 10-point Gauss error estimate.
pub fn gk21<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let center = T::half() * (a + b);
    let half = T::half() * (b - a);
    let fc = f(center);
    let mut res_g = T::zero();
    let mut res_k = fc * T::lit(WGK[10]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * T::half();
    let mut res_asc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let hl = half.abs();
    (res_k * half, rescale_error(err, res_abs * hl, res_asc * hl))
}

/// Integrates `f` over `[a, b]`, splitting first at every breakpoint strictly inside.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    breakpoints: &[T],
    cfg: &QuadConfig<T>,
) -> QuadResult<T> {
    if !(b > a) {
        return QuadResult { value: T::zero(), error: T::zero(), intervals: 0, converged: true };
    }
    let mut cuts: Vec<T> = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(a);
    cuts.extend(breakpoints.iter().copied().filter(|p| p.is_finite() && *p > a && *p < b));
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    cuts.dedup();

    let mut heap = BinaryHeap::with_capacity(cuts.len() * 2);
    let mut settled_value = T::zero();
    let mut settled_error = T::zero();
    let mut total_value = T::zero();
    let mut total_error = T::zero();
    for w in cuts.windows(2) {
        let (value, error) = gk21(&f, w[0], w[1]);
        total_value = total_value + value;
        total_error = total_error + error;
        heap.push(Piece { a: w[0], b: w[1], value, error });
    }

    let target = |v: T| cfg.abs_tol.max(cfg.rel_tol * v.abs());
    let mut count = heap.len();
    while total_error > target(total_value) && count < cfg.max_intervals {
        let Some(worst) = heap.pop() else { break };
        let mid = T::half() * (worst.a + worst.b);
        // Interval no longer resolvable in this precision: freeze it.
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= T::lit(100.0) * T::epsilon() * mid.abs().max(T::min_positive_value())
        {
            settled_value = settled_value + worst.value;
            settled_error = settled_error + worst.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        total_value = total_value - worst.value + v1 + v2;
        total_error = total_error - worst.error + e1 + e2;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        count += 1;
    }

    // Re-sum to shed the drift of the running totals.
    let value = heap.iter().map(|p| p.value).fold(settled_value, |acc, v| acc + v);
    let error = heap.iter().map(|p| p.error).fold(settled_error, |acc, v| acc + v);
    QuadResult { value, error, intervals: count, converged: error <= target(value) }
}
