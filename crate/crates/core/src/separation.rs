//! Separation model: airframe, localization-error and mobility components of
//! the pairwise UAV near-mid-air-collision (uNMAC) volume.
//!
//! All functions are pure. Distances are meters, speeds m/s, times seconds.

use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erf;

use crate::error::{ensure_non_negative, ensure_positive, invalid};
use crate::geometry::Vec2;
use crate::quad::{bisect_increasing, integrate};
use crate::Result;

/// Largest airframe in the fleet model (m).
pub const AF_MAX: f64 = 7.5;
/// Smallest airframe in the fleet model (m).
pub const AF_MIN: f64 = 0.1;

/// Tolerance (m) of the numeric quantile inversion.
pub const QUANTILE_XTOL: f64 = 1e-6;
const QUAD_TOL: f64 = 1e-12;

/// GNSS accuracy class; `sigma` is the standard deviation of the scalar
/// Gaussian position error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyClass {
    pub sigma: f64,
    pub label: String,
}

impl AccuracyClass {
    pub fn new(sigma: f64, label: impl Into<String>) -> Result<Self> {
        ensure_positive("sigma", sigma)?;
        Ok(Self { sigma, label: label.into() })
    }

    /// The four GPS SPS classes, from zero age-of-data to worst case.
    pub fn canonical() -> [AccuracyClass; 4] {
        [
            Self { sigma: 1.9, label: "zero-aod".into() },
            Self { sigma: 3.5, label: "all-aod".into() },
            Self { sigma: 4.85, label: "any-aod".into() },
            Self { sigma: 10.0, label: "worst-case".into() },
        ]
    }

    pub fn worst_case() -> Self {
        Self { sigma: 10.0, label: "worst-case".into() }
    }

    /// 99.7% bound on a single error.
    pub fn three_sigma(&self) -> f64 {
        3.0 * self.sigma
    }
}

/// Cruise / maximum airspeed of a weight category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedCategory {
    pub cruise: f64,
    pub max: f64,
}

impl SpeedCategory {
    pub const CATEGORY_1: SpeedCategory = SpeedCategory { cruise: 12.9, max: 20.6 };
    pub const CATEGORY_2: SpeedCategory = SpeedCategory { cruise: 10.3, max: 15.4 };
    pub const CATEGORY_3: SpeedCategory = SpeedCategory { cruise: 15.4, max: 30.7 };
    pub const CATEGORY_4: SpeedCategory = SpeedCategory { cruise: 30.7, max: 51.5 };

    pub fn new(cruise: f64, max: f64) -> Result<Self> {
        ensure_positive("cruise speed", cruise)?;
        if !(max.is_finite() && max > cruise) {
            return Err(invalid(format!("max speed {max} must exceed cruise speed {cruise}")));
        }
        Ok(Self { cruise, max })
    }

    /// Category by its 1-based table index.
    pub fn by_index(index: usize) -> Result<Self> {
        match index {
            1 => Ok(Self::CATEGORY_1),
            2 => Ok(Self::CATEGORY_2),
            3 => Ok(Self::CATEGORY_3),
            4 => Ok(Self::CATEGORY_4),
            _ => Err(invalid(format!("speed category must be 1..=4, got {index}"))),
        }
    }

    /// Speed spread: the max speed sits three standard deviations above cruise.
    pub fn sigma(&self) -> f64 {
        (self.max - self.cruise) / 3.0
    }
}

/// Static per-UAV truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavSpec {
    pub airframe_diameter: f64,
    pub speed: SpeedCategory,
    /// Cruise speed of this particular airframe, drawn from the category model.
    pub cruise_speed: f64,
    pub accuracy: AccuracyClass,
    pub broadcast_interval: f64,
}

impl UavSpec {
    pub fn new(
        airframe_diameter: f64,
        speed: SpeedCategory,
        cruise_speed: f64,
        accuracy: AccuracyClass,
        broadcast_interval: f64,
    ) -> Result<Self> {
        if !(AF_MIN..=AF_MAX).contains(&airframe_diameter) {
            return Err(invalid(format!("airframe diameter {airframe_diameter} outside [{AF_MIN}, {AF_MAX}]")));
        }
        ensure_positive("cruise speed", cruise_speed)?;
        ensure_positive("broadcast interval", broadcast_interval)?;
        Ok(Self { airframe_diameter, speed, cruise_speed, accuracy, broadcast_interval })
    }
}

/// Pairwise radii, all in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationBreakdown {
    pub mac_radius: f64,
    pub loc_term: f64,
    pub mobility_term: f64,
    pub unmac_radius: f64,
}

/// Triangular density of the pairwise MAC radius `(d_i + d_j) / 2` when both
/// airframes are uniform on `[lo, hi]`; the mode sits at the midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangularAirframe {
    pub lo: f64,
    pub hi: f64,
}

impl Default for TriangularAirframe {
    fn default() -> Self {
        Self { lo: AF_MIN, hi: AF_MAX }
    }
}

impl TriangularAirframe {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        ensure_non_negative("lower limit", lo)?;
        if !(hi.is_finite() && hi > lo) {
            return Err(invalid(format!("upper limit {hi} must exceed lower limit {lo}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn mode(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let width = self.hi - self.lo;
        let peak = 2.0 / width;
        let mode = self.mode();
        if x <= self.lo || x >= self.hi {
            0.0
        } else if x < mode {
            peak * (x - self.lo) / (mode - self.lo)
        } else {
            peak * (self.hi - x) / (self.hi - mode)
        }
    }

    pub fn mean(&self) -> f64 {
        self.mode()
    }
}

/// MAC-radius density over `[0, af_max]` with mode `af_max / 2`.
pub fn triangular_mac_pdf(x: f64, af_max: f64) -> Result<f64> {
    ensure_positive("af_max", af_max)?;
    Ok(TriangularAirframe { lo: 0.0, hi: af_max }.pdf(x))
}

/// Density of `|X|`, `X ~ N(0, sigma^2)`.
pub fn half_normal_pdf(x: f64, sigma: f64) -> Result<f64> {
    ensure_positive("sigma", sigma)?;
    if x < 0.0 {
        return Ok(0.0);
    }
    Ok(SQRT_2 / (sigma * PI.sqrt()) * (-x * x / (2.0 * sigma * sigma)).exp())
}

pub fn half_normal_cdf(x: f64, sigma: f64) -> Result<f64> {
    ensure_positive("sigma", sigma)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok(erf(x / (sigma * SQRT_2)))
}

pub fn half_normal_mean(sigma: f64) -> f64 {
    sigma * (2.0 / PI).sqrt()
}

/// Density of `eps_i + eps_j` for independent half-normal errors.
pub fn loc_error_sum_pdf(x: f64, sigma_i: f64, sigma_j: f64) -> Result<f64> {
    ensure_positive("sigma_i", sigma_i)?;
    ensure_positive("sigma_j", sigma_j)?;
    if x < 0.0 {
        return Err(invalid(format!("x must be non-negative, got {x}")));
    }
    Ok(sum_pdf_unchecked(x, sigma_i, sigma_j))
}

fn sum_pdf_unchecked(x: f64, si: f64, sj: f64) -> f64 {
    let s2 = si * si + sj * sj;
    let s = s2.sqrt();
    // 1/s * sqrt(2/pi) == FRAC_2_SQRT_PI / (SQRT_2 * s)
    let lead = FRAC_2_SQRT_PI / (SQRT_2 * s) * (-x * x / (2.0 * s2)).exp();
    let a = erf(si * x / (SQRT_2 * sj * s));
    let b = erf(sj * x / (SQRT_2 * si * s));
    lead * (a + b)
}

/// Upper integration limit beyond which the sum density is below 1e-300.
fn sum_support_limit(si: f64, sj: f64) -> f64 {
    40.0 * (si * si + sj * sj).sqrt()
}

pub fn loc_error_sum_cdf(x: f64, sigma_i: f64, sigma_j: f64) -> Result<f64> {
    ensure_positive("sigma_i", sigma_i)?;
    ensure_positive("sigma_j", sigma_j)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    let x = x.min(sum_support_limit(sigma_i, sigma_j));
    Ok(integrate(|t| sum_pdf_unchecked(t, sigma_i, sigma_j), 0.0, x, QUAD_TOL).min(1.0))
}

/// Mean of the error sum by numeric moment integral.
pub fn loc_error_sum_mean(sigma_i: f64, sigma_j: f64) -> Result<f64> {
    ensure_positive("sigma_i", sigma_i)?;
    ensure_positive("sigma_j", sigma_j)?;
    let hi = sum_support_limit(sigma_i, sigma_j);
    Ok(integrate(|t| t * sum_pdf_unchecked(t, sigma_i, sigma_j), 0.0, hi, QUAD_TOL))
}

/// Smallest `x` with `P(eps_i + eps_j <= x) >= p`.
pub fn loc_error_sum_quantile(p: f64, sigma_i: f64, sigma_j: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("probability must lie in (0, 1), got {p}")));
    }
    ensure_positive("sigma_i", sigma_i)?;
    ensure_positive("sigma_j", sigma_j)?;
    let cdf = |x: f64| integrate(|t| sum_pdf_unchecked(t, sigma_i, sigma_j), 0.0, x, QUAD_TOL);
    let mut hi = (sigma_i + sigma_j).max(f64::MIN_POSITIVE);
    while cdf(hi) < p {
        hi *= 2.0;
    }
    Ok(bisect_increasing(cdf, p, 0.0, hi, QUANTILE_XTOL))
}

/// Quantile of the combined displacement `dt * (v_i + v_j)` with Gaussian
/// speeds. `p = 0.997` is read as the three-sigma bound.
pub fn relative_displacement_quantile(p: f64, cat_i: SpeedCategory, cat_j: SpeedCategory, dt: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("probability must lie in (0, 1), got {p}")));
    }
    ensure_positive("dt", dt)?;
    let (mean, sd) = relative_displacement_moments(cat_i, cat_j, dt);
    let z = if (p - 0.997).abs() < 1e-12 { 3.0 } else { Normal::standard().inverse_cdf(p) };
    Ok(mean + z * sd)
}

/// Mean and standard deviation of `dt * (v_i + v_j)`.
pub fn relative_displacement_moments(cat_i: SpeedCategory, cat_j: SpeedCategory, dt: f64) -> (f64, f64) {
    let mean = dt * (cat_i.cruise + cat_j.cruise);
    let sd = dt * (cat_i.sigma().powi(2) + cat_j.sigma().powi(2)).sqrt();
    (mean, sd)
}

/// Diameter of the region a UAV may occupy when its heading is unknown.
pub fn unmac_diameter_unknown_dir(d_af: f64, eps: f64, v: f64, dt: f64) -> Result<f64> {
    ensure_non_negative("airframe", d_af)?;
    ensure_non_negative("eps", eps)?;
    ensure_non_negative("speed", v)?;
    ensure_non_negative("dt", dt)?;
    Ok(d_af + 2.0 * (eps + v * dt))
}

/// Pairwise MAC and uNMAC radii for two UAVs.
#[allow(clippy::too_many_arguments)]
pub fn pairwise_unmac(
    spec_i: &UavSpec,
    spec_j: &UavSpec,
    eps_i: f64,
    eps_j: f64,
    v_i: f64,
    v_j: f64,
    dt: f64,
) -> Result<SeparationBreakdown> {
    pairwise_unmac_from_airframes(spec_i.airframe_diameter, spec_j.airframe_diameter, eps_i, eps_j, v_i, v_j, dt)
}

#[allow(clippy::too_many_arguments)]
pub fn pairwise_unmac_from_airframes(
    d_i: f64,
    d_j: f64,
    eps_i: f64,
    eps_j: f64,
    v_i: f64,
    v_j: f64,
    dt: f64,
) -> Result<SeparationBreakdown> {
    for (name, value) in [
        ("airframe_i", d_i),
        ("airframe_j", d_j),
        ("eps_i", eps_i),
        ("eps_j", eps_j),
        ("v_i", v_i),
        ("v_j", v_j),
        ("dt", dt),
    ] {
        ensure_non_negative(name, value)?;
    }
    let mac_radius = 0.5 * (d_i + d_j);
    let loc_term = eps_i + eps_j;
    let mobility_term = dt * (v_i + v_j);
    Ok(SeparationBreakdown { mac_radius, loc_term, mobility_term, unmac_radius: mac_radius + loc_term + mobility_term })
}

/// Swept disk: a disk of `radius` translated along `displacement`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stadium {
    pub radius: f64,
    pub displacement: Vec2,
}

impl Stadium {
    /// Extent along the displacement direction.
    pub fn length(&self) -> f64 {
        2.0 * self.radius + self.displacement.norm()
    }

    pub fn width(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn max_extent(&self) -> f64 {
        self.length()
    }

    /// Whether `p` lies in the region when the disk starts centred at `origin`.
    pub fn contains(&self, origin: Vec2, p: Vec2) -> bool {
        let rel = p - origin;
        let d2 = self.displacement.norm_sq();
        let t = if d2 > 0.0 { (rel.dot(self.displacement) / d2).clamp(0.0, 1.0) } else { 0.0 };
        (rel - self.displacement * t).norm() <= self.radius
    }
}

/// Region a UAV may occupy when its velocity vector is known.
pub fn unmac_known_direction(d_af: f64, eps: f64, velocity: Vec2, dt: f64) -> Result<Stadium> {
    ensure_non_negative("airframe", d_af)?;
    ensure_non_negative("eps", eps)?;
    ensure_non_negative("dt", dt)?;
    if !velocity.is_finite() {
        return Err(invalid("velocity must be finite"));
    }
    Ok(Stadium { radius: 0.5 * d_af + eps, displacement: velocity * dt })
}

pub fn sample_half_normal<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sigma * z.abs()
}

/// Planar localization error: uniform bearing, half-normal magnitude.
pub fn sample_radial_error<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> Vec2 {
    let magnitude = sample_half_normal(rng, sigma);
    let bearing = rng.random_range(0.0..std::f64::consts::TAU);
    Vec2::from_polar(magnitude, bearing)
}
