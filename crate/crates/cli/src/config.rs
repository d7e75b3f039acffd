//! Repeater scenarios from flat TOML files.
//!
//! ```toml
//! modulus = 5
//! stations = 50
//! transmission = 0.05
//! gate = 0.001
//! measurement = 0.01
//! storage = 0.0001
//! distance = 3          # optional: [[2d-1, 1, d]] code
//! k_max = 1             # optional: abortion threshold
//! absorption = 0.05     # optional, defaults to transmission
//! ```

use ept_core::entanglement::{fidelity, log_negativity, BellDiagonalState};
use ept_core::qpcode::CodeParams;
use ept_core::repeater::{
    final_statistics, scenario_distribution_probability, ErrorRates, RepeaterScenario,
};
use ept_core::CosetStatistics;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepeaterConfig {
    pub modulus: u32,
    pub stations: usize,
    pub transmission: f64,
    pub gate: f64,
    pub measurement: f64,
    pub storage: f64,
    pub distance: Option<usize>,
    /// Physical qudits per logical qudit; defaults to `2d - 1`.
    pub physical: Option<usize>,
    pub k_max: Option<usize>,
    pub absorption: Option<f64>,
}

impl RepeaterConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn scenario(&self) -> Result<RepeaterScenario<f64>> {
        let rates = ErrorRates::new(self.transmission, self.gate, self.measurement, self.storage)?;
        let mut sc = RepeaterScenario::new(self.modulus, self.stations, rates)?;
        match (self.distance, self.physical) {
            (Some(d), None) => sc = sc.with_code(CodeParams::polynomial_shape(self.modulus, d)?)?,
            (Some(d), Some(n)) => sc = sc.with_code(CodeParams::new(self.modulus, n, d)?)?,
            (None, Some(_)) => return Err(CliError::Config("physical needs distance".into())),
            (None, None) => {}
        }
        match (self.k_max, self.absorption) {
            (Some(k), f) => sc = sc.with_abortion(k, f.unwrap_or(self.transmission))?,
            (None, Some(_)) => return Err(CliError::Config("absorption needs k_max".into())),
            (None, None) => {}
        }
        Ok(sc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepeaterSummary {
    pub modulus: u32,
    pub stations: usize,
    pub fidelity: f64,
    pub log_negativity: f64,
    pub p00: f64,
    #[serde(rename = "P_distr")]
    pub p_distr: Option<f64>,
    /// `[r, s, probability]` rows.
    pub table: Vec<(u32, u32, f64)>,
}

pub fn run_repeater(config: &RepeaterConfig) -> Result<(RepeaterSummary, CosetStatistics<f64>)> {
    let sc = config.scenario()?;
    let stats = final_statistics(&sc)?;
    let state = BellDiagonalState::new(&stats);
    let p_distr = match sc.encoding().and_then(|e| e.abortion) {
        Some(_) => Some(scenario_distribution_probability(&sc)?),
        None => None,
    };
    let m = config.modulus;
    let table = (0..m)
        .flat_map(|r| (0..m).map(move |s| (r, s)))
        .map(|(r, s)| (r, s, stats.get(r, s)))
        .collect();
    let summary = RepeaterSummary {
        modulus: m,
        stations: config.stations,
        fidelity: fidelity(&state),
        log_negativity: log_negativity(&state),
        p00: stats.get(0, 0),
        p_distr,
        table,
    };
    Ok((summary, stats))
}
