//! Discrete-time multi-UAV simulation: fleets, scenarios, the step loop with
//! mid-air-collision detection, and the Monte Carlo harness.

mod fleet;
mod montecarlo;
mod scenario;
mod world;

pub use fleet::{generate_fleet, FleetModel};
pub use montecarlo::{percentile, run_monte_carlo, run_single, MonteCarloResult, PolicySummary};
pub use scenario::{build_scenario, DiskParams, Layout, ObstacleConfig, ScenarioConfig};
pub use world::{detect_mac, AgentOutcome, MacEvent, SimOutcome, UavState, UavStatus, World};
