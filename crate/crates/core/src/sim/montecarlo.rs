use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{build_scenario_with_fleet, ScenarioConfig};
use super::world::{SimOutcome, UavStatus, World};
use crate::error::invalid;
use crate::remoteid::MessageFormat;
use crate::Result;

/// One run. The fleet and noise streams are both selected by `run_index`,
/// so every policy sees the same fleets for the same run.
pub fn run_single(cfg: &ScenarioConfig, run_index: u64) -> Result<SimOutcome> {
    cfg.validate()?;
    let mut fleet_rng = ChaCha8Rng::seed_from_u64(cfg.fleet_seed);
    fleet_rng.set_stream(run_index);
    let fleet = cfg.fleet.sample(cfg.layout.agent_count(), cfg.dt, &mut fleet_rng)?;
    let agents = build_scenario_with_fleet(cfg, fleet)?;
    World::new(cfg.clone(), agents, run_index)?.run_to_completion()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: MessageFormat,
    pub runs: usize,
    pub flights: usize,
    pub arrived: usize,
    pub collided: usize,
    /// Flights cut off by the time limit.
    pub stalled: usize,
    pub mac_count: usize,
    pub runs_with_mac: usize,
    /// Fraction of runs with at least one MAC.
    pub mac_rate: f64,
    pub median_time: Option<f64>,
    pub mean_time: Option<f64>,
    pub p95_time: Option<f64>,
}

impl PolicySummary {
    pub fn from_outcomes(policy: MessageFormat, outcomes: &[SimOutcome]) -> Self {
        let mut times: Vec<f64> = outcomes.iter().flat_map(|o| o.arrival_times()).collect();
        times.sort_by(f64::total_cmp);
        let count = |s: UavStatus| outcomes.iter().map(|o| o.count(s)).sum::<usize>();
        let runs_with_mac = outcomes.iter().filter(|o| o.mac_count > 0).count();
        let runs = outcomes.len();
        Self {
            policy,
            runs,
            flights: outcomes.iter().map(|o| o.agents.len()).sum(),
            arrived: count(UavStatus::Arrived),
            collided: count(UavStatus::Collided),
            stalled: count(UavStatus::Active),
            mac_count: outcomes.iter().map(|o| o.mac_count).sum(),
            runs_with_mac,
            mac_rate: if runs > 0 { runs_with_mac as f64 / runs as f64 } else { 0.0 },
            median_time: percentile(&times, 50.0),
            mean_time: (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64),
            p95_time: percentile(&times, 95.0),
        }
    }
}

/// Linear-interpolation percentile of sorted data.
pub fn percentile(sorted: &[f64], pct: f64) -> Option<f64> {
    match sorted.len() {
        0 => None,
        1 => Some(sorted[0]),
        n => {
            let pos = pct / 100.0 * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub config: ScenarioConfig,
    pub summary: PolicySummary,
    pub outcomes: Vec<SimOutcome>,
}

/// `runs` independent runs of `cfg`, ordered by run index.
pub fn run_monte_carlo(cfg: &ScenarioConfig, runs: usize) -> Result<MonteCarloResult> {
    if runs == 0 {
        return Err(invalid("runs must be at least 1"));
    }
    cfg.validate()?;
    let outcomes = (0..runs as u64).into_par_iter().map(|r| run_single(cfg, r)).collect::<Result<Vec<_>>>()?;
    Ok(MonteCarloResult { config: cfg.clone(), summary: PolicySummary::from_outcomes(cfg.policy, &outcomes), outcomes })
}
