//! Flat `key=value` hyperparameter files.

use std::path::Path;

use nlsdr_core::textfmt::exact;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub gamma_x: f64,
    pub eps_x: f64,
    pub gamma_y: f64,
    pub eps_y: f64,
}

impl KernelConfig {
    pub fn to_text(self) -> String {
        format!(
            "gamma_x={}\neps_x={}\ngamma_y={}\neps_y={}\n",
            exact(self.gamma_x),
            exact(self.eps_x),
            exact(self.gamma_y),
            exact(self.eps_y)
        )
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut vals = [None; 4];
        let keys = ["gamma_x", "eps_x", "gamma_y", "eps_y"];
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: String| CliError::Input(format!("config line {}: {m}", k + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad(format!("expected key=value, got `{line}`")))?;
            let slot = keys
                .iter()
                .position(|&want| want == key.trim())
                .ok_or_else(|| bad(format!("unknown key `{}`", key.trim())))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad number `{}`", value.trim())))?;
            vals[slot] = Some(v);
        }
        let get = |i: usize| vals[i].ok_or_else(|| CliError::Input(format!("config is missing `{}`", keys[i])));
        Ok(Self {
            gamma_x: get(0)?,
            eps_x: get(1)?,
            gamma_y: get(2)?,
            eps_y: get(3)?,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}
