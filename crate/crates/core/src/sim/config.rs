//! Simulation configuration: calendar, replications, arrival model, seed
//! and optional per-transaction branch probabilities. Read from CLI flags
//! or a TOML key-value file; flags win over file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ontology::TransactionId;

use super::SimError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrivalModel {
    /// Every root spawns exactly round(frequency) instances per workday.
    #[default]
    Deterministic,
    /// Per-day instance counts drawn from Poisson(frequency).
    Poisson,
}

impl FromStr for ArrivalModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "deterministic" => Ok(ArrivalModel::Deterministic),
            "poisson" => Ok(ArrivalModel::Poisson),
            other => Err(format!(
                "unknown arrival model {other:?} (expected deterministic or poisson)"
            )),
        }
    }
}

/// Scenario configuration. Defaults: 6 months of 6-workday weeks at 8 hours
/// a day, 3 replications, deterministic arrivals, seed 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub months: u32,
    pub workdays_per_week: u32,
    pub hours_per_day: u32,
    pub replications: u32,
    pub arrival_model: ArrivalModel,
    pub seed: u64,
    /// Probability that a transaction's request is declined (then quit).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub decline_probability: BTreeMap<TransactionId, f64>,
    /// Probability that a stated result is rejected (then stopped).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub reject_probability: BTreeMap<TransactionId, f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            months: 6,
            workdays_per_week: 6,
            hours_per_day: 8,
            replications: 3,
            arrival_model: ArrivalModel::Deterministic,
            seed: 0,
            decline_probability: BTreeMap::new(),
            reject_probability: BTreeMap::new(),
        }
    }
}

impl SimConfig {
    /// Workdays per replication: months × workdays_per_week × 13/3 weeks
    /// per month, rounded down (26 workdays per month at 6-day weeks).
    pub fn workdays(&self) -> u32 {
        self.months * self.workdays_per_week * 13 / 3
    }

    /// Workday capacity in minutes.
    pub fn day_capacity_minutes(&self) -> u32 {
        self.hours_per_day * 60
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (field, value) in [
            ("months", self.months),
            ("workdays_per_week", self.workdays_per_week),
            ("hours_per_day", self.hours_per_day),
            ("replications", self.replications),
        ] {
            if value < 1 {
                return Err(SimError::InvalidConfig(format!("{field} must be >= 1")));
            }
        }
        for (what, probs) in [
            ("decline_probability", &self.decline_probability),
            ("reject_probability", &self.reject_probability),
        ] {
            for (tx, p) in probs {
                if !(0.0..=1.0).contains(p) {
                    return Err(SimError::InvalidConfig(format!(
                        "{what} for {tx} must lie in [0, 1], got {p}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Reads a TOML key-value file; keys mirror the struct fields
    /// (`months`, `workdays_per_week`, `hours_per_day`, `replications`,
    /// `arrival_model`, `seed`, plus `[decline_probability]` /
    /// `[reject_probability]` tables keyed by transaction id).
    pub fn from_file(path: &Path) -> Result<SimConfig, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        let config: SimConfig = toml::from_str(&text).map_err(|e| {
            SimError::InvalidConfig(format!("cannot parse {}: {e}", path.display()))
        })?;
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_calendar_gives_156_workdays() {
        let config = SimConfig::default();
        assert_eq!(config.workdays(), 156);
        assert_eq!(config.day_capacity_minutes(), 480);
    }

    #[test]
    fn eighteen_months_give_468_workdays() {
        let config = SimConfig {
            months: 18,
            ..Default::default()
        };
        assert_eq!(config.workdays(), 468);
    }

    #[test]
    fn invalid_counts_and_probabilities_are_rejected() {
        let config = SimConfig {
            replications: 0,
            ..Default::default()
        };
        assert!(config.validate().is_err());

        let mut config = SimConfig::default();
        config
            .decline_probability
            .insert(TransactionId::new("B-T01"), 1.5);
        assert!(config.validate().is_err());
    }

    #[test]
    fn config_files_round_trip_through_toml() {
        let config = SimConfig {
            months: 12,
            arrival_model: ArrivalModel::Poisson,
            seed: 42,
            ..Default::default()
        };
        let text = toml::to_string(&config).unwrap();
        let back: SimConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn config_file_reads_branch_probability_tables() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        use std::io::Write as _;
        write!(
            file,
            "months = 2\nseed = 9\narrival_model = \"poisson\"\n\n\
             [decline_probability]\n\"B-T04\" = 0.25\n\n\
             [reject_probability]\n\"B-T07\" = 0.1\n"
        )
        .unwrap();
        file.flush().unwrap();
        let config = SimConfig::from_file(file.path()).unwrap();
        assert_eq!(config.months, 2);
        assert_eq!(config.replications, 3, "unset keys keep defaults");
        assert_eq!(
            config.decline_probability[&TransactionId::new("B-T04")],
            0.25
        );
        assert_eq!(config.reject_probability[&TransactionId::new("B-T07")], 0.1);

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        write!(bad, "months = 0\n").unwrap();
        bad.flush().unwrap();
        assert!(SimConfig::from_file(bad.path()).is_err());
    }
}
