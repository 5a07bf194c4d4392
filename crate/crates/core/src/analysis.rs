//! Component tables for the separation model: localization-error sums,
//! mobility expansion against broadcast interval, and sampled uNMAC sizes.
//!
//! Every table is plain data; [`write_tables`] turns them into CSV files with
//! unit-suffixed headers and fixed-notation numbers.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::Serialize;

use crate::error::{ensure_positive, invalid};
use crate::separation::{
    loc_error_sum_mean, loc_error_sum_pdf, loc_error_sum_quantile, relative_displacement_moments,
    relative_displacement_quantile, sample_half_normal, SpeedCategory, AF_MAX, AF_MIN,
};
use crate::sim::percentile;
use crate::Result;

/// Probability level of the localization quantile column.
pub const LOC_QUANTILE_P: f64 = 0.999;
/// Probability level of the mobility quantile column.
pub const MOBILITY_QUANTILE_P: f64 = 0.997;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisParams {
    pub sigmas: Vec<f64>,
    pub dts: Vec<f64>,
    /// Speed category indices, 1-based.
    pub categories: Vec<usize>,
    /// Samples per (category, sigma, dt) cell of the uNMAC table.
    pub unmac_samples: usize,
    pub seed: u64,
    /// Spacing of the density curves, meters.
    pub pdf_step: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            sigmas: vec![1.9, 3.5, 4.85, 10.0],
            dts: vec![0.01, 0.05, 0.1, 0.2, 0.5, 1.0],
            categories: vec![1, 2, 3, 4],
            unmac_samples: 100_000,
            seed: 1,
            pdf_step: 0.25,
        }
    }
}

impl AnalysisParams {
    pub fn validate(&self) -> Result<()> {
        if self.sigmas.is_empty() || self.dts.is_empty() || self.categories.is_empty() {
            return Err(invalid("sigma, dt and category lists must be non-empty"));
        }
        for &s in &self.sigmas {
            ensure_positive("sigma", s)?;
        }
        for &dt in &self.dts {
            ensure_positive("dt", dt)?;
        }
        for &c in &self.categories {
            SpeedCategory::by_index(c)?;
        }
        if self.unmac_samples == 0 {
            return Err(invalid("unmac_samples must be at least 1"));
        }
        ensure_positive("pdf_step", self.pdf_step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocCurvePoint {
    pub sigma_i: f64,
    pub sigma_j: f64,
    pub x: f64,
    pub pdf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocQuantileRow {
    pub sigma_i: f64,
    pub sigma_j: f64,
    pub mean: f64,
    pub q999: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MobilityRow {
    pub category_i: usize,
    pub category_j: usize,
    pub dt: f64,
    pub mean: f64,
    pub sd: f64,
    pub q997: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnmacRow {
    pub category: usize,
    pub sigma: f64,
    pub dt: f64,
    pub samples: usize,
    pub mean: f64,
    pub p50: f64,
    pub p95: f64,
    pub p99: f64,
    pub p999: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AnalysisTables {
    pub loc_curves: Vec<LocCurvePoint>,
    pub loc_quantiles: Vec<LocQuantileRow>,
    pub mobility: Vec<MobilityRow>,
    pub unmac: Vec<UnmacRow>,
}

impl AnalysisTables {
    /// Quantile row for an unordered sigma pair.
    pub fn loc_quantile(&self, sigma_i: f64, sigma_j: f64) -> Option<&LocQuantileRow> {
        self.loc_quantiles
            .iter()
            .find(|r| (r.sigma_i == sigma_i && r.sigma_j == sigma_j) || (r.sigma_i == sigma_j && r.sigma_j == sigma_i))
    }

    pub fn mobility_row(&self, category_i: usize, category_j: usize, dt: f64) -> Option<&MobilityRow> {
        self.mobility.iter().find(|r| {
            r.dt == dt
                && ((r.category_i, r.category_j) == (category_i, category_j)
                    || (r.category_i, r.category_j) == (category_j, category_i))
        })
    }
}

fn unordered_pairs<T: Copy>(items: &[T]) -> Vec<(T, T)> {
    let mut out = Vec::new();
    for (a, &x) in items.iter().enumerate() {
        for &y in &items[a..] {
            out.push((x, y));
        }
    }
    out
}

pub fn loc_error_tables(sigmas: &[f64], pdf_step: f64) -> Result<(Vec<LocCurvePoint>, Vec<LocQuantileRow>)> {
    let mut curves = Vec::new();
    let mut quantiles = Vec::new();
    for (si, sj) in unordered_pairs(sigmas) {
        let mean = loc_error_sum_mean(si, sj)?;
        let q999 = loc_error_sum_quantile(LOC_QUANTILE_P, si, sj)?;
        quantiles.push(LocQuantileRow { sigma_i: si, sigma_j: sj, mean, q999 });
        // curve runs a little past the quantile so the tail is visible
        let n = (1.2 * q999 / pdf_step).ceil() as usize;
        for k in 0..=n {
            let x = k as f64 * pdf_step;
            curves.push(LocCurvePoint { sigma_i: si, sigma_j: sj, x, pdf: loc_error_sum_pdf(x, si, sj)? });
        }
    }
    Ok((curves, quantiles))
}

pub fn mobility_table(categories: &[usize], dts: &[f64]) -> Result<Vec<MobilityRow>> {
    let mut rows = Vec::new();
    for (ci, cj) in unordered_pairs(categories) {
        let (cat_i, cat_j) = (SpeedCategory::by_index(ci)?, SpeedCategory::by_index(cj)?);
        for &dt in dts {
            let (mean, sd) = relative_displacement_moments(cat_i, cat_j, dt);
            let q997 = relative_displacement_quantile(MOBILITY_QUANTILE_P, cat_i, cat_j, dt)?;
            rows.push(MobilityRow { category_i: ci, category_j: cj, dt, mean, sd, q997 });
        }
    }
    Ok(rows)
}

/// Sampled pairwise uNMAC radius for two UAVs of the same category and
/// accuracy: uniform airframes, half-normal errors, Gaussian speeds (clipped
/// at zero).
pub fn unmac_table(
    categories: &[usize],
    sigmas: &[f64],
    dts: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<UnmacRow>> {
    let airframe = Uniform::new_inclusive(AF_MIN, AF_MAX).map_err(|e| invalid(e.to_string()))?;
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &c in categories {
        let cat = SpeedCategory::by_index(c)?;
        let speed = Normal::new(cat.cruise, cat.sigma()).map_err(|e| invalid(e.to_string()))?;
        for &sigma in sigmas {
            for &dt in dts {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(cell);
                cell += 1;
                let mut radii: Vec<f64> = (0..samples)
                    .map(|_| {
                        let mac = 0.5 * (airframe.sample(&mut rng) + airframe.sample(&mut rng));
                        let loc = sample_half_normal(&mut rng, sigma) + sample_half_normal(&mut rng, sigma);
                        let v = speed.sample(&mut rng).max(0.0) + speed.sample(&mut rng).max(0.0);
                        mac + loc + dt * v
                    })
                    .collect();
                radii.sort_by(f64::total_cmp);
                let mean = radii.iter().sum::<f64>() / samples as f64;
                let pct = |p: f64| percentile(&radii, p).unwrap_or(f64::NAN);
                rows.push(UnmacRow {
                    category: c,
                    sigma,
                    dt,
                    samples,
                    mean,
                    p50: pct(50.0),
                    p95: pct(95.0),
                    p99: pct(99.0),
                    p999: pct(99.9),
                });
            }
        }
    }
    Ok(rows)
}

pub fn analyze(params: &AnalysisParams) -> Result<AnalysisTables> {
    params.validate()?;
    let (loc_curves, loc_quantiles) = loc_error_tables(&params.sigmas, params.pdf_step)?;
    Ok(AnalysisTables {
        loc_curves,
        loc_quantiles,
        mobility: mobility_table(&params.categories, &params.dts)?,
        unmac: unmac_table(&params.categories, &params.sigmas, &params.dts, params.unmac_samples, params.seed)?,
    })
}

/// Fixed-notation formatting used in every CSV file.
pub fn fixed(x: f64, decimals: usize) -> String {
    format!("{x:.decimals$}")
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `analysis_*.csv` into `dir` (created if missing) and returns the paths.
pub fn write_tables(tables: &AnalysisTables, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let f = |x: f64| fixed(x, 4);
    let paths = [
        dir.join("analysis_loc_error_pdf.csv"),
        dir.join("analysis_loc_error_quantiles.csv"),
        dir.join("analysis_mobility.csv"),
        dir.join("analysis_unmac.csv"),
    ];
    write_csv(
        &paths[0],
        &["sigma_i_m", "sigma_j_m", "x_m", "pdf_per_m"],
        tables.loc_curves.iter().map(|r| vec![f(r.sigma_i), f(r.sigma_j), f(r.x), fixed(r.pdf, 8)]),
    )?;
    write_csv(
        &paths[1],
        &["sigma_i_m", "sigma_j_m", "mean_m", "q99.9_m"],
        tables.loc_quantiles.iter().map(|r| vec![f(r.sigma_i), f(r.sigma_j), f(r.mean), f(r.q999)]),
    )?;
    write_csv(
        &paths[2],
        &["category_i", "category_j", "dt_s", "mean_m", "sd_m", "q99.7_m"],
        tables
            .mobility
            .iter()
            .map(|r| vec![r.category_i.to_string(), r.category_j.to_string(), f(r.dt), f(r.mean), f(r.sd), f(r.q997)]),
    )?;
    write_csv(
        &paths[3],
        &["category", "sigma_m", "dt_s", "samples", "mean_m", "p50_m", "p95_m", "p99_m", "p99.9_m"],
        tables.unmac.iter().map(|r| {
            vec![
                r.category.to_string(),
                f(r.sigma),
                f(r.dt),
                r.samples.to_string(),
                f(r.mean),
                f(r.p50),
                f(r.p95),
                f(r.p99),
                f(r.p999),
            ]
        }),
    )?;
    Ok(paths.to_vec())
}
