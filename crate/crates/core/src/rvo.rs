//! Velocity obstacles, reciprocal velocity obstacles and sampled velocity
//! selection.
//!
//! Positions are meters, velocities m/s. A constraint value is in m² and a
//! velocity is admissible when it is non-negative.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, invalid};
use crate::geometry::Vec2;
use crate::separation::sample_radial_error;
use crate::{Error, Result};

/// Relative tolerance used when ranking candidate velocities.
const TIE_EPS: f64 = 1e-9;

/// Pairwise reciprocal constraint between agent `i` and neighbour `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RvoConstraint {
    /// `p_i - p_j`.
    pub r_ij: Vec2,
    pub v_i: Vec2,
    pub v_j: Vec2,
    /// `R_i + R_j`.
    pub combined_radius: f64,
}

impl RvoConstraint {
    pub fn new(p_i: Vec2, p_j: Vec2, v_i: Vec2, v_j: Vec2, combined_radius: f64) -> Result<Self> {
        ensure_positive("combined radius", combined_radius)?;
        Ok(Self { r_ij: p_i - p_j, v_i, v_j, combined_radius })
    }

    /// Effective relative velocity `2 v_rvo - v_i - v_j`.
    pub fn relative_velocity(&self, v_rvo: Vec2) -> Vec2 {
        v_rvo * 2.0 - self.v_i - self.v_j
    }
}

/// Two-sided RVO function: squared distance from `p_j` to the line through
/// `p_i` along `2 v_rvo - v_i - v_j`, minus `R_ij²`.
///
/// When `2 v_rvo = v_i + v_j` the pair keeps its current separation and the
/// value is `|r|² - R_ij²`.
pub fn rvo_value(c: &RvoConstraint, v_rvo: Vec2) -> f64 {
    line_value(c.r_ij, c.relative_velocity(v_rvo), c.combined_radius)
}

fn line_value(r: Vec2, w: Vec2, radius: f64) -> f64 {
    let ww = w.norm_sq();
    let rr = r.norm_sq();
    if ww <= f64::MIN_POSITIVE * rr.max(1.0) {
        return rr - radius * radius;
    }
    let proj = r.dot(w);
    rr - proj * proj / ww - radius * radius
}

/// Forward-looking margin: like [`line_value`] but only counts the part of
/// the relative trajectory with `t > 0` (and `t <= horizon` if given).
fn cone_margin(r: Vec2, w: Vec2, radius: f64, horizon: Option<f64>) -> f64 {
    let rr = r.norm_sq();
    let r2 = radius * radius;
    let ww = w.norm_sq();
    let rw = r.dot(w);
    if ww == 0.0 || rw >= 0.0 {
        return rr - r2;
    }
    let t_star = -rw / ww;
    match horizon {
        Some(h) if t_star > h => (r + w * h).norm_sq() - r2,
        _ => rr - rw * rw / ww - r2,
    }
}

/// Forward-looking RVO margin; non-negative iff the relative ray starting at
/// the current configuration never enters the combined disk.
pub fn rvo_cone_margin(c: &RvoConstraint, v_rvo: Vec2) -> f64 {
    cone_margin(c.r_ij, c.relative_velocity(v_rvo), c.combined_radius, None)
}

/// Whether `v_candidate` for agent `i` is inside the velocity obstacle that
/// `j` (moving at `v_j`) induces.
pub fn point_in_vo(p_i: Vec2, p_j: Vec2, v_candidate: Vec2, v_j: Vec2, combined_radius: f64) -> Result<bool> {
    ensure_positive("combined radius", combined_radius)?;
    if p_i == p_j {
        return Err(Error::DegenerateGeometry("coincident positions".into()));
    }
    let to_j = p_j - p_i;
    let w = v_candidate - v_j;
    let r2 = combined_radius * combined_radius;
    if to_j.norm_sq() < r2 {
        return Ok(true);
    }
    let ww = w.norm_sq();
    if ww == 0.0 {
        return Ok(false);
    }
    let along = to_j.dot(w);
    if along <= 0.0 {
        return Ok(false);
    }
    let perp2 = to_j.norm_sq() - along * along / ww;
    Ok(perp2 < r2)
}

/// What a neighbour is: another agent sharing the avoidance effort, or a
/// static obstacle that does not reciprocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeighborKind {
    Agent,
    Obstacle,
}

/// A neighbour as seen by the deciding agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub position: Vec2,
    pub velocity: Vec2,
    /// Minkowski-sum radius with the deciding agent.
    pub combined_radius: f64,
    pub kind: NeighborKind,
}

impl Neighbor {
    pub fn agent(position: Vec2, velocity: Vec2, combined_radius: f64) -> Self {
        Self { position, velocity, combined_radius, kind: NeighborKind::Agent }
    }

    pub fn obstacle(position: Vec2, combined_radius: f64) -> Self {
        Self { position, velocity: Vec2::ZERO, combined_radius, kind: NeighborKind::Obstacle }
    }
}

/// The deciding agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentKinematics {
    pub position: Vec2,
    pub velocity: Vec2,
    /// Own safety-disk radius.
    pub radius: f64,
    pub max_speed: f64,
    pub goal: Vec2,
    pub cruise_speed: f64,
}

impl AgentKinematics {
    /// `cruise_speed * unit(goal - position)`, shortened on the last step so
    /// the agent lands on its goal.
    pub fn preferred_velocity(&self, dt: f64) -> Vec2 {
        preferred_velocity(self.position, self.goal, self.cruise_speed, dt)
    }
}

pub fn preferred_velocity(position: Vec2, goal: Vec2, cruise_speed: f64, dt: f64) -> Vec2 {
    let to_goal = goal - position;
    let dist = to_goal.norm();
    if dist == 0.0 {
        return Vec2::ZERO;
    }
    let speed = if dt > 0.0 { cruise_speed.min(dist / dt) } else { cruise_speed };
    to_goal * (speed / dist)
}

/// Candidate-grid resolution and optional look-ahead for velocity selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RvoParams {
    #[serde(default = "default_directions")]
    pub directions: usize,
    #[serde(default = "default_speed_levels")]
    pub speed_levels: usize,
    /// Look-ahead in seconds; `None` considers the whole future trajectory.
    #[serde(default = "default_time_horizon")]
    pub time_horizon: Option<f64>,
}

fn default_directions() -> usize {
    24
}

fn default_speed_levels() -> usize {
    8
}

fn default_time_horizon() -> Option<f64> {
    Some(10.0)
}

impl Default for RvoParams {
    fn default() -> Self {
        Self {
            directions: default_directions(),
            speed_levels: default_speed_levels(),
            time_horizon: default_time_horizon(),
        }
    }
}

impl RvoParams {
    pub fn validate(&self) -> Result<()> {
        if self.directions < 4 {
            return Err(invalid(format!("need at least 4 directions, got {}", self.directions)));
        }
        if self.speed_levels < 2 {
            return Err(invalid(format!("need at least 2 speed levels, got {}", self.speed_levels)));
        }
        if let Some(h) = self.time_horizon {
            ensure_positive("time horizon", h)?;
        }
        Ok(())
    }
}

/// Candidate velocities: a polar grid aligned with `v_pref` (so the grid is
/// the same for mirrored agents), plus `v_pref` and the current velocity.
pub fn candidate_velocities(v_pref: Vec2, current: Vec2, max_speed: f64, params: &RvoParams) -> Vec<Vec2> {
    let base_angle = if v_pref.norm_sq() > 0.0 {
        v_pref.angle()
    } else if current.norm_sq() > 0.0 {
        current.angle()
    } else {
        0.0
    };
    let levels = params.speed_levels - 1;
    let mut out = Vec::with_capacity(params.directions * levels + 3);
    out.push(v_pref.clamp_norm(max_speed));
    out.push(current.clamp_norm(max_speed));
    out.push(Vec2::ZERO);
    for k in 0..params.directions {
        let angle = base_angle + std::f64::consts::TAU * k as f64 / params.directions as f64;
        for level in 1..=levels {
            out.push(Vec2::from_polar(max_speed * level as f64 / levels as f64, angle));
        }
    }
    out
}

/// Smallest forward margin of `v` against every neighbour; `+inf` with none.
pub fn min_margin(agent: &AgentKinematics, neighbors: &[Neighbor], v: Vec2, horizon: Option<f64>) -> f64 {
    neighbors
        .iter()
        .map(|n| {
            let r = agent.position - n.position;
            let w = match n.kind {
                NeighborKind::Agent => v * 2.0 - agent.velocity - n.velocity,
                NeighborKind::Obstacle => v - n.velocity,
            };
            cone_margin(r, w, n.combined_radius, horizon)
        })
        .fold(f64::INFINITY, f64::min)
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_EPS * (1.0 + a.abs().max(b.abs()))
}

/// Picks a new velocity for `agent` given its preferred velocity.
///
/// Among candidates admissible against every neighbour the one closest to
/// `v_pref` wins; ties go to the candidate furthest clockwise of `v_pref`, so
/// all agents turn the same way. Without an admissible candidate the one
/// with the largest worst-case margin is taken.
pub fn select_velocity_with_preference(
    agent: &AgentKinematics,
    neighbors: &[Neighbor],
    v_pref: Vec2,
    params: &RvoParams,
) -> Vec2 {
    let candidates = candidate_velocities(v_pref, agent.velocity, agent.max_speed, params);
    if neighbors.is_empty() {
        return candidates[0];
    }

    struct Scored {
        v: Vec2,
        margin: f64,
        cost: f64,
        side: f64,
    }
    let scored: Vec<Scored> = candidates
        .into_iter()
        .map(|v| Scored {
            v,
            margin: min_margin(agent, neighbors, v, params.time_horizon),
            cost: (v - v_pref).norm(),
            side: v_pref.cross(v),
        })
        .collect();

    let prefer_by_cost = |a: &Scored, b: &Scored| -> bool {
        if !nearly_equal(a.cost, b.cost) {
            a.cost < b.cost
        } else {
            a.side < b.side - TIE_EPS
        }
    };

    let mut best: Option<&Scored> = None;
    for s in scored.iter().filter(|s| s.margin >= 0.0) {
        if best.is_none_or(|b| prefer_by_cost(s, b)) {
            best = Some(s);
        }
    }
    if let Some(b) = best {
        return b.v;
    }

    for s in &scored {
        let better = match best {
            None => true,
            Some(b) if nearly_equal(s.margin, b.margin) => prefer_by_cost(s, b),
            Some(b) => s.margin > b.margin,
        };
        if better {
            best = Some(s);
        }
    }
    best.expect("candidate set is never empty").v
}

/// [`select_velocity_with_preference`] with the goal-seeking preferred velocity.
pub fn select_velocity(agent: &AgentKinematics, neighbors: &[Neighbor], dt: f64, params: &RvoParams) -> Vec2 {
    select_velocity_with_preference(agent, neighbors, agent.preferred_velocity(dt), params)
}

/// Position uncertainty of one agent: bias of the mean and radial sigma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionUncertainty {
    pub mean: Vec2,
    pub sigma: f64,
}

impl PositionUncertainty {
    pub fn isotropic(sigma: f64) -> Self {
        Self { mean: Vec2::ZERO, sigma }
    }
}

/// Monte Carlo estimate of `P(f_RVO >= 0)` when both positions carry radial
/// half-normal errors around `c.r_ij` shifted by the uncertainty means.
pub fn estimate_avoidance_probability(
    c: &RvoConstraint,
    v_rvo: Vec2,
    unc_i: PositionUncertainty,
    unc_j: PositionUncertainty,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(invalid("samples must be at least 1"));
    }
    ensure_non_negative("sigma_i", unc_i.sigma)?;
    ensure_non_negative("sigma_j", unc_j.sigma)?;
    ensure_positive("combined radius", c.combined_radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nominal = c.r_ij + unc_i.mean - unc_j.mean;
    let mut hits = 0usize;
    for _ in 0..samples {
        let e_i = if unc_i.sigma > 0.0 { sample_radial_error(&mut rng, unc_i.sigma) } else { Vec2::ZERO };
        let e_j = if unc_j.sigma > 0.0 { sample_radial_error(&mut rng, unc_j.sigma) } else { Vec2::ZERO };
        let sample = RvoConstraint { r_ij: nominal + e_i - e_j, ..*c };
        if rvo_value(&sample, v_rvo) >= 0.0 {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}
