use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scenario::ScenarioConfig;
use crate::geometry::{min_distance_linear_motion, Vec2};
use crate::remoteid::{MessageFormat, RemoteIdMessage, SafetyDiskPolicy, UavId};
use crate::rvo::{preferred_velocity, select_velocity_with_preference, AgentKinematics, Neighbor};
use crate::separation::{sample_radial_error, UavSpec};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UavStatus {
    Active,
    Arrived,
    Collided,
}

/// Dynamic truth and last report of one UAV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavState {
    pub id: u32,
    pub spec: UavSpec,
    pub true_position: Vec2,
    pub reported_position: Vec2,
    pub velocity: Vec2,
    pub goal: Vec2,
    pub control_station: Vec2,
    pub status: UavStatus,
    pub arrival_time: Option<f64>,
}

impl UavState {
    pub fn new(id: u32, spec: UavSpec, start: Vec2, goal: Vec2) -> Self {
        Self {
            id,
            spec,
            true_position: start,
            reported_position: start,
            velocity: Vec2::ZERO,
            goal,
            control_station: start,
            status: UavStatus::Active,
            arrival_time: None,
        }
    }

    pub fn is_active(&self) -> bool {
        self.status == UavStatus::Active
    }

    /// Broadcast for the current step under `format`.
    pub fn message(&self, timestamp: f64, format: MessageFormat) -> RemoteIdMessage {
        RemoteIdMessage {
            uav_id: UavId::from_index(self.id),
            timestamp,
            position: self.reported_position,
            velocity: self.velocity,
            control_station: self.control_station,
            emergency: false,
            loc_error: format.carries_loc_error().then(|| self.spec.accuracy.three_sigma()),
            airframe: format.carries_airframe().then_some(self.spec.airframe_diameter),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacEvent {
    pub time: f64,
    pub uav_a: u32,
    pub uav_b: u32,
    /// Minimum true centre distance during the step.
    pub distance: f64,
}

/// Mid-air collision test for one pair over one step of linear motion.
///
/// `prev_positions` are the true positions at the start of the step; the
/// states carry the positions at its end.
pub fn detect_mac(state_i: &UavState, state_j: &UavState, prev_positions: (Vec2, Vec2), time: f64) -> Option<MacEvent> {
    if !state_i.is_active() || !state_j.is_active() {
        return None;
    }
    let mac_radius = 0.5 * (state_i.spec.airframe_diameter + state_j.spec.airframe_diameter);
    let d =
        min_distance_linear_motion(prev_positions.0, state_i.true_position, prev_positions.1, state_j.true_position);
    (d < mac_radius).then_some(MacEvent { time, uav_a: state_i.id, uav_b: state_j.id, distance: d })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentOutcome {
    pub id: u32,
    pub airframe: f64,
    pub cruise_speed: f64,
    pub status: UavStatus,
    pub arrival_time: Option<f64>,
}

/// Log of one run. Agents still `Active` at the end were cut off by the
/// time limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub policy: MessageFormat,
    pub run_index: u64,
    pub fleet_seed: u64,
    pub noise_seed: u64,
    pub agents: Vec<AgentOutcome>,
    pub mac_count: usize,
    pub mac_events: Vec<MacEvent>,
    /// Minimum true pairwise distance per step, while two or more UAVs fly.
    pub min_separation_trace: Vec<f64>,
    pub steps: u64,
    pub sim_time: f64,
}

impl SimOutcome {
    pub fn arrival_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.agents.iter().filter_map(|a| a.arrival_time)
    }

    pub fn count(&self, status: UavStatus) -> usize {
        self.agents.iter().filter(|a| a.status == status).count()
    }

    pub fn min_separation(&self) -> Option<f64> {
        self.min_separation_trace.iter().copied().reduce(f64::min)
    }
}

/// One simulation in progress.
#[derive(Debug, Clone)]
pub struct World {
    cfg: ScenarioConfig,
    policy: SafetyDiskPolicy,
    agents: Vec<UavState>,
    noise: ChaCha8Rng,
    steps: u64,
    mac_events: Vec<MacEvent>,
    min_separation_trace: Vec<f64>,
    run_index: u64,
}

impl World {
    /// `noise_stream` selects an independent noise sequence (the run index).
    pub fn new(cfg: ScenarioConfig, agents: Vec<UavState>, noise_stream: u64) -> Result<Self> {
        cfg.validate()?;
        let mut noise = ChaCha8Rng::seed_from_u64(cfg.noise_seed);
        noise.set_stream(noise_stream);
        let policy = cfg.disk_policy();
        Ok(Self {
            cfg,
            policy,
            agents,
            noise,
            steps: 0,
            mac_events: Vec::new(),
            min_separation_trace: Vec::new(),
            run_index: noise_stream,
        })
    }

    pub fn agents(&self) -> &[UavState] {
        &self.agents
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.cfg.dt
    }

    pub fn mac_events(&self) -> &[MacEvent] {
        &self.mac_events
    }

    pub fn is_finished(&self) -> bool {
        !self.agents.iter().any(UavState::is_active) || self.time() >= self.cfg.max_sim_time - 1e-9
    }

    /// Advances one broadcast interval.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.cfg.dt;
        let now = self.time();
        let format = self.cfg.policy;

        // 1. fresh fixes and broadcasts
        let mut radii = vec![0.0; self.agents.len()];
        for (k, a) in self.agents.iter_mut().enumerate() {
            if !a.is_active() {
                continue;
            }
            a.reported_position = a.true_position + sample_radial_error(&mut self.noise, a.spec.accuracy.sigma);
            radii[k] = self.policy.disk_radius(&a.message(now, format), dt)?;
        }

        // 2. decisions against a frozen snapshot of the broadcasts
        let obstacle = self.cfg.effective_obstacle();
        let mut new_velocities = vec![Vec2::ZERO; self.agents.len()];
        let mut neighbors = Vec::with_capacity(self.agents.len());
        for (i, a) in self.agents.iter().enumerate() {
            if !a.is_active() {
                continue;
            }
            neighbors.clear();
            for (j, b) in self.agents.iter().enumerate() {
                if i == j || !b.is_active() {
                    continue;
                }
                if a.reported_position.distance(b.reported_position) <= self.cfg.sensing_range {
                    neighbors.push(Neighbor::agent(b.reported_position, b.velocity, radii[i] + radii[j]));
                }
            }
            if let Some(o) = obstacle {
                let reach = self.cfg.sensing_range + o.avoidance_radius();
                if a.reported_position.distance(o.center) <= reach {
                    neighbors.push(Neighbor::obstacle(o.center, radii[i] + o.avoidance_radius()));
                }
            }
            let kin = AgentKinematics {
                position: a.reported_position,
                velocity: a.velocity,
                radius: radii[i],
                max_speed: a.spec.speed.max,
                goal: a.goal,
                cruise_speed: a.spec.cruise_speed,
            };
            let v_pref = preferred_velocity(a.true_position, a.goal, a.spec.cruise_speed, dt);
            new_velocities[i] = select_velocity_with_preference(&kin, &neighbors, v_pref, &self.cfg.rvo);
        }

        // 3. single-integrator motion
        let previous: Vec<Vec2> = self.agents.iter().map(|a| a.true_position).collect();
        for (a, v) in self.agents.iter_mut().zip(&new_velocities) {
            if a.is_active() {
                a.velocity = *v;
                a.true_position += *v * dt;
            }
        }

        // 4. swept MAC check on true positions
        let end = now + dt;
        let mut min_sep = f64::INFINITY;
        let mut pairs = 0usize;
        for i in 0..self.agents.len() {
            for j in (i + 1)..self.agents.len() {
                let (a, b) = (&self.agents[i], &self.agents[j]);
                if !a.is_active() || !b.is_active() {
                    continue;
                }
                pairs += 1;
                let d = min_distance_linear_motion(previous[i], a.true_position, previous[j], b.true_position);
                min_sep = min_sep.min(d);
                if let Some(event) = detect_mac(a, b, (previous[i], previous[j]), end) {
                    self.mac_events.push(event);
                    self.agents[i].status = UavStatus::Collided;
                    self.agents[j].status = UavStatus::Collided;
                    self.agents[i].velocity = Vec2::ZERO;
                    self.agents[j].velocity = Vec2::ZERO;
                }
            }
        }
        if pairs > 0 {
            self.min_separation_trace.push(min_sep);
        }

        // 5. arrivals
        let tol = self.cfg.arrival_tolerance;
        for a in self.agents.iter_mut().filter(|a| a.is_active()) {
            if a.true_position.distance(a.goal) <= tol {
                a.status = UavStatus::Arrived;
                a.arrival_time = Some(end);
                a.velocity = Vec2::ZERO;
            }
        }

        self.steps += 1;
        Ok(())
    }

    pub fn run_to_completion(mut self) -> Result<SimOutcome> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(self.into_outcome())
    }

    pub fn into_outcome(self) -> SimOutcome {
        let sim_time = self.time();
        SimOutcome {
            policy: self.cfg.policy,
            run_index: self.run_index,
            fleet_seed: self.cfg.fleet_seed,
            noise_seed: self.cfg.noise_seed,
            agents: self
                .agents
                .iter()
                .map(|a| AgentOutcome {
                    id: a.id,
                    airframe: a.spec.airframe_diameter,
                    cruise_speed: a.spec.cruise_speed,
                    status: a.status,
                    arrival_time: a.arrival_time,
                })
                .collect(),
            mac_count: self.mac_events.len(),
            mac_events: self.mac_events,
            min_separation_trace: self.min_separation_trace,
            steps: self.steps,
            sim_time,
        }
    }
}
