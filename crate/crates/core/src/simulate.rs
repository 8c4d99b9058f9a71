//! Monte Carlo section radii.
//!
//! A k-plane hits a sphere of radius u with probability proportional to u^r,
//! so hit spheres follow the size-biased law u^r dF(u) / M_r. The distance
//! from the centre to the plane, within the r-dimensional orthogonal
//! complement, has density r d^{r-1} / u^r on (0, u); hence D = R·U^{1/r} and
//! the section radius is X = √(R² − D²) = R·√(1 − U^{2/r}).

use std::path::{Path, PathBuf};

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WicksellError};
use crate::laws::RadiusLaw;
use crate::quad::gk21;
use crate::real::Real;
use crate::rng;
use crate::transform::{moment, GridSpec};

/// Largest expected number of sphere centres the geometric mode will generate.
pub const SPHERE_BUDGET: f64 = 1e7;

const BIASED_CELLS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    Analytic,
    Geometric3d,
}

impl std::fmt::Display for SampleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Analytic => "analytic",
            Self::Geometric3d => "geometric3d",
        })
    }
}

impl std::str::FromStr for SampleMode {
    type Err = WicksellError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "geometric3d" => Ok(Self::Geometric3d),
            other => Err(WicksellError::Usage(format!("unknown sampling mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSidecar {
    pub law_spec: String,
    pub r: u32,
    pub n: usize,
    pub seed: u64,
    pub mode: SampleMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionSample<T> {
    pub law_spec: String,
    pub r: u32,
    pub n: usize,
    pub seed: u64,
    pub values: Vec<T>,
    pub mode: SampleMode,
}

impl<T: Real> SectionSample<T> {
    pub fn sidecar(&self) -> SampleSidecar {
        SampleSidecar {
            law_spec: self.law_spec.clone(),
            r: self.r,
            n: self.n,
            seed: self.seed,
            mode: self.mode,
        }
    }

    /// Writes a `value` column to `path` and the sidecar next to it (`.json`).
    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["value"])?;
        for v in &self.values {
            w.write_record([v.as_f64().to_string()])?;
        }
        w.flush()?;
        let side = path.with_extension("json");
        std::fs::write(&side, serde_json::to_string_pretty(&self.sidecar())?)?;
        Ok(side)
    }
}

/// Reads the `value` column of a sample CSV.
pub fn load_samples<T: Real>(path: &Path) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let col = rdr
        .headers()?
        .iter()
        .position(|h| h.trim() == "value")
        .ok_or_else(|| WicksellError::Parse(format!("no `value` column in {}", path.display())))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let v: f64 = rec[col]
            .trim()
            .parse()
            .map_err(|_| WicksellError::Parse(format!("bad number `{}` in {}", &rec[col], path.display())))?;
        out.push(T::lit(v));
    }
    Ok(out)
}

/// Draws from u^r dF(u) / M_r: in closed form where the law allows it,
/// otherwise from a cell table of the biased distribution.
enum BiasedSampler<'a, T> {
    Closed(&'a RadiusLaw<T>),
    Table(BiasedTable<T>),
}

/// Biased law as atoms plus cells with linear CDF inside each cell.
struct BiasedTable<T> {
    atoms: Vec<(T, T)>,
    edges: Vec<T>,
    cumulative: Vec<T>,
}

impl<T: Real> BiasedTable<T> {
    fn new(law: &RadiusLaw<T>, r: u32) -> Result<Self> {
        let lo = law.lower_endpoint();
        let hi = law.truncation_point();
        let rr = T::from_u32(r).unwrap();
        let atoms: Vec<(T, T)> = law.atoms().into_iter().map(|(a, m)| (a, m * a.powi(r as i32))).collect();
        let mut edges = vec![lo];
        if hi > lo {
            let spec = GridSpec { min_fraction: 1e-9, points: BIASED_CELLS };
            edges.extend(spec.abscissae(hi - lo)?.into_iter().map(|d| lo + d));
        }
        edges.dedup();
        // ∫_a^b u^r dF_ac = a^r (F(b) − F(a)) + ∫_a^b r u^{r−1} (F(b) − F(u)) du,
        // whose integrand stays bounded where the density does not.
        let mut cumulative = Vec::with_capacity(edges.len());
        cumulative.push(T::zero());
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let fb = law.ac_cdf(b);
            let tail = |u: T| rr * u.powi(r as i32 - 1) * (fb - law.ac_cdf(u));
            let (body, _) = gk21(&tail, a, b);
            let cell = a.powi(r as i32) * law.ac_increment(a, b - a) + body.max(T::zero());
            let prev = *cumulative.last().unwrap();
            cumulative.push(prev + cell);
        }
        let atom_mass = atoms.iter().fold(T::zero(), |acc, (_, m)| acc + *m);
        let total = atom_mass + *cumulative.last().unwrap();
        if !(total > T::zero() && total.is_finite()) {
            return Err(WicksellError::DivergentMoment { order: r });
        }
        let atoms = atoms.into_iter().map(|(a, m)| (a, m / total)).collect();
        let cumulative = cumulative.into_iter().map(|c| c / total).collect();
        Ok(Self { atoms, edges, cumulative })
    }

    fn draw(&self, g: &mut ChaCha8Rng) -> T {
        let mut p = T::lit(rng::open01(g));
        for (a, m) in &self.atoms {
            if p < *m {
                return *a;
            }
            p = p - *m;
        }
        let total = *self.cumulative.last().unwrap();
        let p = p.min(total * (T::one() - T::epsilon()));
        let i = self.cumulative.partition_point(|&c| c <= p).clamp(1, self.edges.len() - 1);
        let (c0, c1) = (self.cumulative[i - 1], self.cumulative[i]);
        let (a, b) = (self.edges[i - 1], self.edges[i]);
        let t = if c1 > c0 { (p - c0) / (c1 - c0) } else { T::half() };
        a + t * (b - a)
    }
}

impl<'a, T: Real> BiasedSampler<'a, T> {
    fn new(law: &'a RadiusLaw<T>, r: u32) -> Result<Self> {
        moment(law, r)?;
        if law.has_closed_biased_draw() {
            Ok(Self::Closed(law))
        } else {
            Ok(Self::Table(BiasedTable::new(law, r)?))
        }
    }

    fn draw(&self, r: u32, g: &mut ChaCha8Rng) -> T {
        match self {
            Self::Closed(law) => law.biased_draw(r, g).expect("law has a closed-form biased draw"),
            Self::Table(t) => t.draw(g),
        }
    }
}

fn check_r(r: u32) -> Result<()> {
    if r == 0 {
        return Err(WicksellError::InvalidParameter("codimension r must be at least 1".into()));
    }
    Ok(())
}

/// `n` radii from the size-biased law u^r dF(u) / M_r.
pub fn sample_size_biased<T: Real>(law: &RadiusLaw<T>, r: u32, n: usize, seed: u64) -> Result<Vec<T>> {
    check_r(r)?;
    let sampler = BiasedSampler::new(law, r)?;
    Ok(rng::par_draw(n, seed, |g| sampler.draw(r, g)))
}

/// `n` section radii whose law is F^(r).
pub fn sample_section_radii<T: Real>(law: &RadiusLaw<T>, r: u32, n: usize, seed: u64) -> Result<SectionSample<T>> {
    check_r(r)?;
    let sampler = BiasedSampler::new(law, r)?;
    let exponent = T::two() / T::from_u32(r).unwrap();
    let values = rng::par_draw(n, seed, |g| {
        let radius = sampler.draw(r, g);
        let u = T::lit(rng::open01(g));
        radius * (-(exponent * u.ln()).exp_m1()).sqrt()
    });
    Ok(SectionSample { law_spec: law.describe(), r, n, seed, values, mode: SampleMode::Analytic })
}

/// Poisson sphere centres in the slab |z| < `half_thickness` over a window of
/// area `window_area`, cut by the plane z = 0.
///
/// Returns the radii of the circular profiles, in centre order.
pub fn simulate_planar_section_3d<T: Real>(
    law: &RadiusLaw<T>,
    intensity: f64,
    half_thickness: f64,
    window_area: f64,
    seed: u64,
) -> Result<SectionSample<T>> {
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(WicksellError::InvalidParameter(format!("intensity must be finite and non-negative, got {intensity}")));
    }
    if !(half_thickness > 0.0 && window_area > 0.0 && half_thickness.is_finite() && window_area.is_finite()) {
        return Err(WicksellError::InvalidParameter(format!(
            "slab half-thickness and window area must be positive, got {half_thickness} and {window_area}"
        )));
    }
    let upper = law.upper_support().as_f64();
    if !(upper <= half_thickness) {
        return Err(WicksellError::InvalidParameter(format!(
            "radius support extends to {upper}, beyond the slab half-thickness {half_thickness}"
        )));
    }
    let expected = intensity * window_area * 2.0 * half_thickness;
    if expected > SPHERE_BUDGET {
        return Err(WicksellError::Resource(format!(
            "{expected:.3e} expected spheres exceeds the budget of {SPHERE_BUDGET:e}"
        )));
    }
    let centres = if expected > 0.0 {
        let poisson = Poisson::new(expected).map_err(|e| WicksellError::InvalidParameter(e.to_string()))?;
        poisson.sample(&mut rng::stream(seed, u64::MAX)) as usize
    } else {
        0
    };
    let h = T::lit(half_thickness);
    let hits = rng::par_draw(centres, seed, |g| {
        let z = (T::two() * T::lit(rng::open01(g)) - T::one()).abs() * h;
        let radius = law.quantile(T::lit(rng::open01(g))).expect("open unit interval is a valid level");
        (z < radius).then(|| ((radius - z) * (radius + z)).sqrt())
    });
    let values: Vec<T> = hits.into_iter().flatten().collect();
    Ok(SectionSample { law_spec: law.describe(), r: 1, n: values.len(), seed, values, mode: SampleMode::Geometric3d })
}
