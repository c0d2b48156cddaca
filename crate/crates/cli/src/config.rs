//! Run configuration: tolerance overrides and knobs shared by the
//! commands.

use std::collections::BTreeMap;

use crate::CliError;

/// Named tolerances with their defaults; every value must stay positive.
#[derive(Clone, Debug)]
pub struct Tolerances {
    values: BTreeMap<&'static str, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        let mut values = BTreeMap::new();
        values.insert("conservation", 1e-10);
        values.insert("general_position", 1e-8);
        values.insert("schlesinger_residual", 1e-6);
        values.insert("monodromy", 1e-6);
        values.insert("initial_condition", 1e-9);
        values.insert("rh_det", 1e-10);
        values.insert("fd_step", 1e-5);
        Tolerances { values }
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        *self.values.get(name).expect("tolerance name is known")
    }

    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), CliError> {
        for spec in overrides {
            let Some((name, value)) = spec.split_once('=') else {
                return Err(CliError::parse(format!(
                    "tolerance override '{spec}' is not NAME=VALUE"
                )));
            };
            let value: f64 = value
                .parse()
                .map_err(|_| CliError::parse(format!("tolerance value '{value}' is not a number")))?;
            if !(value > 0.0) {
                return Err(CliError::parse(format!(
                    "tolerance override {name} must be positive, got {value}"
                )));
            }
            let Some(slot) = self.values.get_mut(name.trim()) else {
                let known: Vec<&str> = self.values.keys().copied().collect();
                return Err(CliError::parse(format!(
                    "unknown tolerance '{name}'; known: {}",
                    known.join(", ")
                )));
            };
            *slot = value;
        }
        Ok(())
    }
}

/// Validate a node-count override: even and at least 16.
pub fn validate_nodes(n: usize) -> Result<usize, CliError> {
    if n < 16 || n % 2 != 0 {
        return Err(CliError::parse(format!(
            "node count must be even and at least 16, got {n}"
        )));
    }
    Ok(n)
}
