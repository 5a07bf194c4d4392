//! Run reports: a JSON document for machines and a per-flight CSV table.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::fixed;
use crate::config::ExperimentConfig;
use crate::remoteid::MessageFormat;
use crate::sim::{AgentOutcome, MacEvent, MonteCarloResult, PolicySummary, SimOutcome, UavStatus};
use crate::Result;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub fleet_seed: u64,
    pub noise_seed: u64,
}

/// One simulated run, with every flight so the summaries can be rebuilt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub policy: MessageFormat,
    pub run: u64,
    pub mac_count: usize,
    pub min_separation: Option<f64>,
    pub sim_time: f64,
    pub agents: Vec<AgentOutcome>,
    pub mac_events: Vec<MacEvent>,
}

impl From<&SimOutcome> for RunRow {
    fn from(o: &SimOutcome) -> Self {
        Self {
            policy: o.policy,
            run: o.run_index,
            mac_count: o.mac_count,
            min_separation: o.min_separation(),
            sim_time: o.sim_time,
            agents: o.agents.clone(),
            mac_events: o.mac_events.clone(),
        }
    }
}

impl RunRow {
    /// Reconstructs the parts of a [`SimOutcome`] the summary depends on.
    fn as_outcome(&self, seeds: &Seeds) -> SimOutcome {
        SimOutcome {
            policy: self.policy,
            run_index: self.run,
            fleet_seed: seeds.fleet_seed,
            noise_seed: seeds.noise_seed,
            agents: self.agents.clone(),
            mac_count: self.mac_count,
            mac_events: self.mac_events.clone(),
            min_separation_trace: self.min_separation.into_iter().collect(),
            steps: 0,
            sim_time: self.sim_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub config: ExperimentConfig,
    /// TOML text of `config`; feeding it back to `simulate` repeats the experiment.
    pub config_toml: String,
    pub seeds: Seeds,
    pub summaries: Vec<PolicySummary>,
    pub runs: Vec<RunRow>,
}

impl RunReport {
    pub fn new(config: &ExperimentConfig, results: &[MonteCarloResult]) -> Result<Self> {
        Ok(Self {
            tool_version: TOOL_VERSION.to_string(),
            config: config.clone(),
            config_toml: config.to_toml_string()?,
            seeds: Seeds { fleet_seed: config.scenario.fleet_seed, noise_seed: config.scenario.noise_seed },
            summaries: results.iter().map(|r| r.summary.clone()).collect(),
            runs: results.iter().flat_map(|r| r.outcomes.iter().map(RunRow::from)).collect(),
        })
    }

    /// Summaries rebuilt from the per-run rows alone.
    pub fn recompute_summaries(&self) -> Vec<PolicySummary> {
        self.summaries
            .iter()
            .map(|s| {
                let outcomes: Vec<SimOutcome> =
                    self.runs.iter().filter(|r| r.policy == s.policy).map(|r| r.as_outcome(&self.seeds)).collect();
                PolicySummary::from_outcomes(s.policy, &outcomes)
            })
            .collect()
    }

    pub fn summary(&self, policy: MessageFormat) -> Option<&PolicySummary> {
        self.summaries.iter().find(|s| s.policy == policy)
    }

    /// Policies that must be collision free but recorded a MAC.
    pub fn safety_violations(&self) -> Vec<MessageFormat> {
        self.summaries.iter().filter(|s| s.policy.must_be_safe() && s.mac_count > 0).map(|s| s.policy).collect()
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n")?;
        f.flush()?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        Ok(serde_json::from_reader(f)?)
    }

    /// One row per flight, ordered by policy, run and UAV.
    pub fn write_runs_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "policy",
            "run",
            "uav",
            "airframe_m",
            "cruise_speed_mps",
            "status",
            "arrival_time_s",
            "run_mac_count",
            "run_min_separation_m",
        ])?;
        for row in &self.runs {
            let min_sep = row.min_separation.map(|d| fixed(d, 4)).unwrap_or_default();
            for a in &row.agents {
                w.write_record([
                    row.policy.name().to_string(),
                    row.run.to_string(),
                    a.id.to_string(),
                    fixed(a.airframe, 4),
                    fixed(a.cruise_speed, 4),
                    status_name(a.status).to_string(),
                    a.arrival_time.map(|t| fixed(t, 2)).unwrap_or_default(),
                    row.mac_count.to_string(),
                    min_sep.clone(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_runs_csv_file(&self, path: &Path) -> Result<()> {
        self.write_runs_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

pub fn status_name(status: UavStatus) -> &'static str {
    match status {
        UavStatus::Active => "stalled",
        UavStatus::Arrived => "arrived",
        UavStatus::Collided => "collided",
    }
}

/// Plain-text summary table.
pub fn format_summary_table(summaries: &[PolicySummary]) -> String {
    let opt = |x: Option<f64>| x.map(|t| fixed(t, 2)).unwrap_or_else(|| "-".into());
    let mut s = format!(
        "{:<11} {:>5} {:>7} {:>8} {:>8} {:>7} {:>5} {:>8} {:>9} {:>9} {:>9}\n",
        "policy",
        "runs",
        "flights",
        "arrived",
        "collided",
        "stalled",
        "macs",
        "mac_rate",
        "median_s",
        "mean_s",
        "p95_s"
    );
    for p in summaries {
        s.push_str(&format!(
            "{:<11} {:>5} {:>7} {:>8} {:>8} {:>7} {:>5} {:>8} {:>9} {:>9} {:>9}\n",
            p.policy.name(),
            p.runs,
            p.flights,
            p.arrived,
            p.collided,
            p.stalled,
            p.mac_count,
            fixed(p.mac_rate, 4),
            opt(p.median_time),
            opt(p.mean_time),
            opt(p.p95_time),
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run_monte_carlo, ScenarioConfig};

    fn small_report() -> RunReport {
        let mut cfg = ExperimentConfig::new(ScenarioConfig::circle8());
        cfg.runs = 2;
        cfg.policies = vec![MessageFormat::SnmacBaseline, MessageFormat::Candidate2];
        let results: Vec<_> =
            cfg.policies.iter().map(|&p| run_monte_carlo(&cfg.scenario_for(p), cfg.runs).unwrap()).collect();
        RunReport::new(&cfg, &results).unwrap()
    }

    #[test]
    fn summaries_recompute_from_rows() {
        let r = small_report();
        assert_eq!(r.recompute_summaries(), r.summaries);
    }

    #[test]
    fn json_round_trip_and_config_echo() {
        let r = small_report();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("report.json");
        r.write_json(&p).unwrap();
        let back = RunReport::read_json(&p).unwrap();
        assert_eq!(back.summaries, r.summaries);
        assert_eq!(ExperimentConfig::from_toml_str(&back.config_toml).unwrap(), r.config);
    }

    #[test]
    fn csv_has_one_row_per_flight() {
        let r = small_report();
        let mut buf = Vec::new();
        r.write_runs_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 2 * 8);
        assert!(text.starts_with("policy,run,uav,"));
    }
}
