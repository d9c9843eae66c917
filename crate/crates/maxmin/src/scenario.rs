//! Scenario files: a TOML view of the network configuration.
//!
//! Every key is optional; present keys override the values inherited from
//! the selected setup, and command-line flags override both. A custom setup
//! is just a scenario that overrides the grid fields.

use std::path::Path;

use cellfree_core::error::{Error, Result};
use cellfree_core::NetworkConfig64;
use serde::{Deserialize, Serialize};

/// Optional overrides for [`NetworkConfig64`], one key per field.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub num_aps: Option<usize>,
    pub antennas_per_ap: Option<usize>,
    pub num_users: Option<usize>,
    pub inter_ap_distance: Option<f64>,
    pub ap_height_offset: Option<f64>,
    pub pathloss_intercept_db: Option<f64>,
    pub pathloss_db_per_decade: Option<f64>,
    pub shadow_std_db: Option<f64>,
    pub shadow_decorrelation_distance: Option<f64>,
    pub noise_power_dbm: Option<f64>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read scenario {}: {e}", path.display()))
        })?;
        toml::from_str(&text).map_err(|e| {
            Error::Config(format!("cannot parse scenario {}: {e}", path.display()))
        })
    }

    /// Applies the present keys on top of a base configuration.
    pub fn apply(&self, base: &mut NetworkConfig64) {
        if let Some(v) = self.num_aps {
            base.num_aps = v;
        }
        if let Some(v) = self.antennas_per_ap {
            base.antennas_per_ap = v;
        }
        if let Some(v) = self.num_users {
            base.num_users = v;
        }
        if let Some(v) = self.inter_ap_distance {
            base.inter_ap_distance = v;
        }
        if let Some(v) = self.ap_height_offset {
            base.ap_height_offset = v;
        }
        if let Some(v) = self.pathloss_intercept_db {
            base.pathloss_intercept_db = v;
        }
        if let Some(v) = self.pathloss_db_per_decade {
            base.pathloss_db_per_decade = v;
        }
        if let Some(v) = self.shadow_std_db {
            base.shadow_std_db = v;
        }
        if let Some(v) = self.shadow_decorrelation_distance {
            base.shadow_decorrelation_distance = v;
        }
        if let Some(v) = self.noise_power_dbm {
            base.noise_power_dbm = v;
        }
    }
}

/// Serializable echo of the resolved network configuration, for summaries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkEcho {
    pub num_aps: usize,
    pub antennas_per_ap: usize,
    pub num_users: usize,
    pub inter_ap_distance: f64,
    pub ap_height_offset: f64,
    pub pathloss_intercept_db: f64,
    pub pathloss_db_per_decade: f64,
    pub shadow_std_db: f64,
    pub shadow_decorrelation_distance: f64,
    pub noise_power_dbm: f64,
    pub rng_seed: u64,
}

impl From<&NetworkConfig64> for NetworkEcho {
    fn from(cfg: &NetworkConfig64) -> Self {
        NetworkEcho {
            num_aps: cfg.num_aps,
            antennas_per_ap: cfg.antennas_per_ap,
            num_users: cfg.num_users,
            inter_ap_distance: cfg.inter_ap_distance,
            ap_height_offset: cfg.ap_height_offset,
            pathloss_intercept_db: cfg.pathloss_intercept_db,
            pathloss_db_per_decade: cfg.pathloss_db_per_decade,
            shadow_std_db: cfg.shadow_std_db,
            shadow_decorrelation_distance: cfg.shadow_decorrelation_distance,
            noise_power_dbm: cfg.noise_power_dbm,
            rng_seed: cfg.rng_seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_scenario_overrides_only_named_fields() {
        let text = "num_aps = 16\nantennas_per_ap = 3\nshadow_std_db = 0.0\n";
        let scenario: Scenario = toml::from_str(text).unwrap();
        let mut cfg = NetworkConfig64::new(36, 4, 58, 100.0);
        scenario.apply(&mut cfg);
        assert_eq!(cfg.num_aps, 16);
        assert_eq!(cfg.antennas_per_ap, 3);
        assert_eq!(cfg.shadow_std_db, 0.0);
        // Untouched fields keep their defaults.
        assert_eq!(cfg.num_users, 58);
        assert_eq!(cfg.noise_power_dbm, -94.0);
        assert_eq!(cfg.inter_ap_distance, 100.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad: std::result::Result<Scenario, _> = toml::from_str("numaps = 16\n");
        assert!(bad.is_err());
    }

    #[test]
    fn load_reports_missing_files_as_config_errors() {
        let missing = Path::new("/nonexistent/scenario.toml");
        assert!(matches!(Scenario::load(missing), Err(Error::Config(_))));
    }
}
