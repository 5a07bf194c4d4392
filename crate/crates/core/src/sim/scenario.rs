use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fleet::FleetModel;
use super::world::UavState;
use crate::error::{ensure_positive, invalid};
use crate::geometry::Vec2;
use crate::remoteid::{MessageFormat, SafetyDiskPolicy, EPS_UPPER_BOUND};
use crate::rvo::RvoParams;
use crate::separation::{UavSpec, AF_MAX};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// Eight UAVs on a circle, each bound for the antipodal point.
    Circle8,
    /// Twenty-four UAVs on a square perimeter around a central obstacle,
    /// each bound for its point reflection through the centre.
    Square24,
}

impl Layout {
    pub fn agent_count(self) -> usize {
        match self {
            Layout::Circle8 => 8,
            Layout::Square24 => 24,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Layout::Circle8 => "circle8",
            Layout::Square24 => "square24",
        }
    }
}

/// Square static obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleConfig {
    pub center: Vec2,
    pub half_extent: f64,
}

impl Default for ObstacleConfig {
    fn default() -> Self {
        Self { center: Vec2::ZERO, half_extent: 20.0 }
    }
}

impl ObstacleConfig {
    /// Radius of the circumscribed disk used for avoidance.
    pub fn avoidance_radius(&self) -> f64 {
        self.half_extent * std::f64::consts::SQRT_2
    }
}

/// Disk-policy constants shared by every policy of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskParams {
    #[serde(default = "default_af_max")]
    pub af_max: f64,
    #[serde(default = "default_eps_upper_bound")]
    pub eps_upper_bound: f64,
}

fn default_af_max() -> f64 {
    AF_MAX
}
fn default_eps_upper_bound() -> f64 {
    EPS_UPPER_BOUND
}

impl Default for DiskParams {
    fn default() -> Self {
        Self { af_max: AF_MAX, eps_upper_bound: EPS_UPPER_BOUND }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub layout: Layout,
    #[serde(default = "default_circle_radius")]
    pub circle_radius: f64,
    #[serde(default = "default_square_side")]
    pub square_side: f64,
    /// Obstacle; `square24` gets the default one when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle: Option<ObstacleConfig>,
    #[serde(default = "default_sensing_range")]
    pub sensing_range: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_policy")]
    pub policy: MessageFormat,
    #[serde(default = "default_fleet_seed")]
    pub fleet_seed: u64,
    #[serde(default = "default_noise_seed")]
    pub noise_seed: u64,
    #[serde(default = "default_arrival_tolerance")]
    pub arrival_tolerance: f64,
    #[serde(default = "default_max_sim_time")]
    pub max_sim_time: f64,
    #[serde(default)]
    pub fleet: FleetModel,
    #[serde(default)]
    pub disk: DiskParams,
    #[serde(default)]
    pub rvo: RvoParams,
}

fn default_circle_radius() -> f64 {
    200.0
}
fn default_square_side() -> f64 {
    400.0
}
fn default_sensing_range() -> f64 {
    400.0
}
fn default_dt() -> f64 {
    0.1
}
fn default_policy() -> MessageFormat {
    MessageFormat::Candidate2
}
fn default_fleet_seed() -> u64 {
    1
}
fn default_noise_seed() -> u64 {
    2
}
fn default_arrival_tolerance() -> f64 {
    5.0
}
fn default_max_sim_time() -> f64 {
    600.0
}

impl ScenarioConfig {
    pub fn new(layout: Layout) -> Self {
        Self {
            layout,
            circle_radius: default_circle_radius(),
            square_side: default_square_side(),
            obstacle: None,
            sensing_range: default_sensing_range(),
            dt: default_dt(),
            policy: default_policy(),
            fleet_seed: default_fleet_seed(),
            noise_seed: default_noise_seed(),
            arrival_tolerance: default_arrival_tolerance(),
            max_sim_time: default_max_sim_time(),
            fleet: FleetModel::default(),
            disk: DiskParams::default(),
            rvo: RvoParams::default(),
        }
    }

    pub fn circle8() -> Self {
        Self::new(Layout::Circle8)
    }

    pub fn square24() -> Self {
        Self::new(Layout::Square24)
    }

    pub fn with_policy(mut self, policy: MessageFormat) -> Self {
        self.policy = policy;
        self
    }

    pub fn effective_obstacle(&self) -> Option<ObstacleConfig> {
        match (self.obstacle, self.layout) {
            (Some(o), _) => Some(o),
            (None, Layout::Square24) => Some(ObstacleConfig::default()),
            (None, Layout::Circle8) => None,
        }
    }

    pub fn disk_policy(&self) -> SafetyDiskPolicy {
        SafetyDiskPolicy { format: self.policy, af_max: self.disk.af_max, eps_upper_bound: self.disk.eps_upper_bound }
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| Error::InvalidConfig(e.to_string());
        ensure_positive("circle_radius", self.circle_radius).map_err(wrap)?;
        ensure_positive("square_side", self.square_side).map_err(wrap)?;
        ensure_positive("sensing_range", self.sensing_range).map_err(wrap)?;
        ensure_positive("dt", self.dt).map_err(wrap)?;
        ensure_positive("arrival_tolerance", self.arrival_tolerance).map_err(wrap)?;
        ensure_positive("max_sim_time", self.max_sim_time).map_err(wrap)?;
        if let Some(o) = self.obstacle {
            ensure_positive("obstacle.half_extent", o.half_extent).map_err(wrap)?;
            if !o.center.is_finite() {
                return Err(Error::InvalidConfig("obstacle.center must be finite".into()));
            }
        }
        self.fleet.validate().map_err(wrap)?;
        self.disk_policy().validate().map_err(wrap)?;
        self.rvo.validate().map_err(wrap)?;
        Ok(())
    }

    /// Start positions in agent order.
    pub fn start_positions(&self) -> Vec<Vec2> {
        match self.layout {
            Layout::Circle8 => (0..8).map(|k| Vec2::from_polar(self.circle_radius, TAU * k as f64 / 8.0)).collect(),
            Layout::Square24 => {
                let h = 0.5 * self.square_side;
                let spacing = 4.0 * self.square_side / 24.0;
                (0..24)
                    .map(|k| {
                        let s = (k as f64 + 0.5) * spacing;
                        let side = (s / self.square_side).floor() as usize;
                        let along = s - side as f64 * self.square_side;
                        // counter-clockwise from the bottom-left corner
                        match side {
                            0 => Vec2::new(-h + along, -h),
                            1 => Vec2::new(h, -h + along),
                            2 => Vec2::new(h - along, h),
                            _ => Vec2::new(-h, h - along),
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Agents for `cfg`, flying the fleet drawn from `cfg.fleet_seed`.
pub fn build_scenario(cfg: &ScenarioConfig) -> Result<Vec<UavState>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.fleet_seed);
    let fleet = cfg.fleet.sample(cfg.layout.agent_count(), cfg.dt, &mut rng)?;
    build_scenario_with_fleet(cfg, fleet)
}

pub(crate) fn build_scenario_with_fleet(cfg: &ScenarioConfig, fleet: Vec<UavSpec>) -> Result<Vec<UavState>> {
    let starts = cfg.start_positions();
    if fleet.len() != starts.len() {
        return Err(invalid(format!(
            "{} layout needs {} UAVs, fleet has {}",
            cfg.layout.name(),
            starts.len(),
            fleet.len()
        )));
    }
    Ok(fleet
        .into_iter()
        .zip(starts)
        .enumerate()
        .map(|(k, (spec, start))| UavState::new(k as u32, spec, start, -start))
        .collect())
}
