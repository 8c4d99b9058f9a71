//! Tabulated section laws: grids, iteration and CSV/JSON persistence.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SectionTransform;
use crate::error::{Result, WicksellError};
use crate::laws::{RadiusLaw, TabulatedCdf};
use crate::real::Real;

/// Tabulation grid: smallest abscissa as a fraction of the support scale, and
/// the number of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min_fraction: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { min_fraction: 1e-7, points: 512 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_fraction > 0.0 && self.min_fraction < 0.5) {
            return Err(WicksellError::InvalidParameter(format!(
                "grid minimum fraction must lie in (0, 0.5), got {}",
                self.min_fraction
            )));
        }
        if self.points < 8 {
            return Err(WicksellError::InvalidParameter(format!(
                "grid needs at least 8 points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    /// Abscissae on (0, scale]: geometric from `min_fraction·scale` up to
    /// scale/2, then geometric in the distance to `scale` down to the same
    /// relative gap, ending exactly at `scale`.
    pub fn abscissae<T: Real>(&self, scale: T) -> Result<Vec<T>> {
        self.validate()?;
        let half = T::half() * scale;
        let gap = T::lit(self.min_fraction) * scale;
        let n_lo = self.points / 2;
        let n_hi = self.points - n_lo;
        let mut xs = Vec::with_capacity(self.points);
        let ratio = |k: usize, n: usize| T::from_usize(k).unwrap() / T::from_usize(n).unwrap();
        for i in 0..n_lo {
            xs.push(gap * (half / gap).powf(ratio(i, n_lo)));
        }
        for j in 0..n_hi - 1 {
            let d = half * (gap / half).powf(ratio(j, n_hi - 2));
            xs.push(scale - d);
        }
        xs.push(scale);
        Ok(xs)
    }

    /// [`GridSpec::abscissae`] plus geometric clusters on both sides of every
    /// interior point in `breaks`, where the section density may be singular.
    pub fn abscissae_with_breaks<T: Real>(&self, scale: T, breaks: &[T]) -> Result<Vec<T>> {
        let mut xs = self.abscissae(scale)?;
        let gap = T::lit(self.min_fraction) * scale;
        let width = T::lit(CLUSTER_WIDTH) * scale;
        for &b in breaks.iter().filter(|&&b| b > width && b < scale - width) {
            for k in 0..CLUSTER_POINTS {
                let d = gap * (width / gap).powf(T::from_usize(k).unwrap() / T::from_usize(CLUSTER_POINTS - 1).unwrap());
                xs.push(b - d);
                xs.push(b + d);
            }
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        xs.dedup();
        Ok(xs)
    }
}

/// Points per side, and half-width as a fraction of the scale, of the grid
/// clusters placed around interior breakpoints.
const CLUSTER_POINTS: usize = 48;
const CLUSTER_WIDTH: f64 = 0.05;

/// JSON sidecar accompanying a section-law CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionSidecar {
    pub r: u32,
    pub moment: f64,
    pub source: String,
    pub grid_min: f64,
    pub points: usize,
}

/// F^(r) and f^(r) tabulated on a grid.
///
/// `moment` is the moment of the input law the transform divided by: M_r for a
/// direct tabulation, the input table's own M₁ for an iterated one.
#[derive(Debug, Clone)]
pub struct SectionLaw<T> {
    pub r: u32,
    pub moment: T,
    pub grid: Vec<T>,
    pub cdf_values: Vec<T>,
    pub pdf_values: Vec<T>,
    pub source: String,
    pub grid_spec: GridSpec,
    curve: Arc<TabulatedCdf<T>>,
}

impl<T: Real> SectionLaw<T> {
    pub fn from_parts(
        r: u32,
        moment: T,
        grid: Vec<T>,
        cdf_values: Vec<T>,
        pdf_values: Vec<T>,
        source: String,
        grid_spec: GridSpec,
    ) -> Result<Self> {
        if grid.len() < 2 || cdf_values.len() != grid.len() || pdf_values.len() != grid.len() {
            return Err(WicksellError::InvalidParameter(format!(
                "section table needs at least two rows of matching length (grid {}, cdf {}, pdf {})",
                grid.len(),
                cdf_values.len(),
                pdf_values.len()
            )));
        }
        let curve = TabulatedCdf::new(grid.clone(), cdf_values.clone(), Some(&pdf_values), source.clone())?;
        Ok(Self { r, moment, grid, cdf_values, pdf_values, source, grid_spec, curve: Arc::new(curve) })
    }

    /// Interpolated CDF (monotone cubic, power-law continuation below the grid).
    pub fn cdf(&self, x: T) -> T {
        self.curve.cdf(x)
    }

    pub fn density(&self, x: T) -> T {
        self.curve.density(x)
    }

    /// The table viewed as a radius law, for further sectioning.
    pub fn to_law(&self) -> RadiusLaw<T> {
        RadiusLaw::Tabulated(Arc::clone(&self.curve))
    }

    pub fn sidecar(&self) -> SectionSidecar {
        SectionSidecar {
            r: self.r,
            moment: self.moment.as_f64(),
            source: self.source.clone(),
            grid_min: self.grid_spec.min_fraction,
            points: self.grid_spec.points,
        }
    }

    /// Trapezoid integral of the tabulated density over the grid.
    pub fn pdf_mass(&self) -> T {
        self.grid
            .windows(2)
            .zip(self.pdf_values.windows(2))
            .map(|(x, p)| T::half() * (x[1] - x[0]) * (p[0] + p[1]))
            .sum()
    }

    /// Checks the table invariants; the message names the first violation.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |m: String| Err(WicksellError::InvalidParameter(m));
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("grid not strictly increasing".into());
        }
        if self.cdf_values.windows(2).any(|w| w[1] < w[0]) {
            return bad("cdf decreases".into());
        }
        if self.cdf_values.iter().any(|v| !(*v >= T::zero() && *v <= T::one())) {
            return bad("cdf outside [0, 1]".into());
        }
        if self.cdf_values[0] > T::lit(1e-6) {
            return bad(format!("first cdf value {} above 1e-6", self.cdf_values[0]));
        }
        let last = self.cdf_values[self.cdf_values.len() - 1];
        if last < T::one() - T::lit(1e-6) {
            return bad(format!("last cdf value {last} below 1 - 1e-6"));
        }
        if self.pdf_values.iter().any(|v| !(*v >= T::zero())) {
            return bad("negative or undefined density".into());
        }
        let mass = self.pdf_mass();
        if !(mass >= T::lit(0.999) && mass <= T::lit(1.001)) {
            return bad(format!("density mass {mass} outside [0.999, 1.001]"));
        }
        Ok(())
    }

    /// Writes `x,cdf,pdf` rows to `path` and the sidecar next to it (`.json`).
    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["x", "cdf", "pdf"])?;
        for i in 0..self.grid.len() {
            w.write_record([
                self.grid[i].as_f64().to_string(),
                self.cdf_values[i].as_f64().to_string(),
                self.pdf_values[i].as_f64().to_string(),
            ])?;
        }
        w.flush()?;
        let side = path.with_extension("json");
        std::fs::write(&side, serde_json::to_string_pretty(&self.sidecar())?)?;
        Ok(side)
    }

    /// Reads a table written by [`SectionLaw::write`]; the sidecar is required.
    pub fn read(path: &Path) -> Result<Self> {
        let side: SectionSidecar = serde_json::from_str(&std::fs::read_to_string(path.with_extension("json"))?)?;
        let (xs, cdf, pdf) = read_rows(path)?;
        Self::from_parts(
            side.r,
            T::lit(side.moment),
            xs,
            cdf,
            pdf,
            side.source,
            GridSpec { min_fraction: side.grid_min, points: side.points },
        )
    }
}

fn read_rows<T: Real>(path: &Path) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "cdf", "pdf"] {
        return Err(WicksellError::Parse(format!("expected header x,cdf,pdf in {}", path.display())));
    }
    let (mut xs, mut cdf, mut pdf) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<T> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map(T::lit)
                .map_err(|_| WicksellError::Parse(format!("bad number `{}` in {}", &rec[i], path.display())))
        };
        xs.push(num(0)?);
        cdf.push(num(1)?);
        pdf.push(num(2)?);
    }
    Ok((xs, cdf, pdf))
}

/// Reads only the `x,cdf,pdf` rows as an interpolated CDF (no sidecar needed).
pub fn load_cdf_table<T: Real>(path: &Path) -> Result<TabulatedCdf<T>> {
    let (xs, cdf, pdf) = read_rows::<T>(path)?;
    TabulatedCdf::new(xs, cdf, Some(&pdf), path.display().to_string())
}

fn evaluate_on_grid<T: Real>(tr: &SectionTransform<T>, grid: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let rows: Vec<Result<(T, Option<T>)>> = grid
        .par_iter()
        .map(|&x| {
            let cdf = tr.cdf(x)?;
            let pdf = match tr.pdf(x) {
                Ok(p) => Some(p),
                Err(WicksellError::SingularDensity { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok((cdf, pdf))
        })
        .collect();
    let mut cdf = Vec::with_capacity(grid.len());
    let mut pdf = Vec::with_capacity(grid.len());
    let mut running = T::zero();
    for (i, row) in rows.into_iter().enumerate() {
        let (c, p) = row?;
        running = running.max(c);
        cdf.push(running);
        // Where the density is infinite, store the value that makes the last
        // trapezoid cell carry the exact CDF increment.
        let p = p.unwrap_or_else(|| match i {
            0 => T::zero(),
            _ => {
                let cell = (cdf[i] - cdf[i - 1]) / (grid[i] - grid[i - 1]);
                (T::two() * cell - pdf[i - 1]).max(T::zero())
            }
        });
        pdf.push(p);
    }
    Ok((cdf, pdf))
}

/// Tabulates F^(r) and f^(r) of `law` on the grid described by `spec`.
pub fn tabulate_section_law<T: Real>(law: &RadiusLaw<T>, r: u32, spec: GridSpec) -> Result<SectionLaw<T>> {
    let tr = SectionTransform::new(law, r)?;
    let grid = spec.abscissae_with_breaks(tr.upper(), &law.breakpoints())?;
    let (cdf, pdf) = evaluate_on_grid(&tr, &grid)?;
    SectionLaw::from_parts(r, tr.moment(), grid, cdf, pdf, format!("section(r={r}) of {}", law.describe()), spec)
}

/// Sections a tabulated section law once more (r → r + 1), on the same grid.
pub fn iterate_section<T: Real>(sl: &SectionLaw<T>) -> Result<SectionLaw<T>> {
    if sl.grid.len() < 2 {
        return Err(WicksellError::InvalidParameter("cannot iterate a table with fewer than two points".into()));
    }
    let tr = SectionTransform::new(&sl.to_law(), 1)?;
    let (cdf, pdf) = evaluate_on_grid(&tr, &sl.grid)?;
    SectionLaw::from_parts(
        sl.r + 1,
        tr.moment(),
        sl.grid.clone(),
        cdf,
        pdf,
        format!("iterate({})", sl.source),
        sl.grid_spec,
    )
}
