use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, invalid};
use crate::separation::{AccuracyClass, SpeedCategory, UavSpec, AF_MAX, AF_MIN};
use crate::Result;

/// Population the simulated UAVs are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FleetModel {
    #[serde(default = "default_af_min")]
    pub airframe_min: f64,
    #[serde(default = "default_af_max")]
    pub airframe_max: f64,
    /// Localization error sigma, meters.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Speed category index (1..=4).
    #[serde(default = "default_category")]
    pub speed_category: usize,
}

fn default_af_min() -> f64 {
    AF_MIN
}
fn default_af_max() -> f64 {
    AF_MAX
}
fn default_sigma() -> f64 {
    10.0
}
fn default_category() -> usize {
    3
}

impl Default for FleetModel {
    fn default() -> Self {
        Self { airframe_min: AF_MIN, airframe_max: AF_MAX, sigma: default_sigma(), speed_category: default_category() }
    }
}

impl FleetModel {
    pub fn validate(&self) -> Result<()> {
        if !(AF_MIN..AF_MAX).contains(&self.airframe_min)
            || !(self.airframe_min < self.airframe_max && self.airframe_max <= AF_MAX)
        {
            return Err(invalid(format!(
                "airframe range [{}, {}] must lie within [{AF_MIN}, {AF_MAX}]",
                self.airframe_min, self.airframe_max
            )));
        }
        ensure_positive("fleet sigma", self.sigma)?;
        SpeedCategory::by_index(self.speed_category)?;
        Ok(())
    }

    /// Draws `n` UAVs: uniform airframes, one accuracy class, and per-UAV
    /// cruise speeds from the category's Gaussian truncated to `(0, max]`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, broadcast_interval: f64, rng: &mut R) -> Result<Vec<UavSpec>> {
        self.validate()?;
        ensure_positive("broadcast interval", broadcast_interval)?;
        let category = SpeedCategory::by_index(self.speed_category)?;
        let accuracy = AccuracyClass::new(self.sigma, format!("sigma-{}", self.sigma))?;
        let speed_dist =
            Normal::new(category.cruise, category.sigma()).map_err(|e| invalid(format!("speed distribution: {e}")))?;
        (0..n)
            .map(|_| {
                let airframe = rng.random_range(self.airframe_min..=self.airframe_max);
                let cruise = loop {
                    let v = speed_dist.sample(rng);
                    if v > 0.0 && v <= category.max {
                        break v;
                    }
                };
                UavSpec::new(airframe, category, cruise, accuracy.clone(), broadcast_interval)
            })
            .collect()
    }
}

/// Default fleet of `n` UAVs, deterministic in `seed`.
pub fn generate_fleet(n: usize, seed: u64) -> Result<Vec<UavSpec>> {
    if n == 0 {
        return Err(invalid("fleet size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FleetModel::default().sample(n, 0.1, &mut rng)
}
