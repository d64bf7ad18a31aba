//! Input-file loading and the simulate config schema.

use std::path::Path;

use serde::Deserialize;

use lossnet_core::model::{enumerate_statespace_with_cap, StateSpace, DEFAULT_STATE_CAP};
use lossnet_core::simulator::Observable;
use lossnet_core::{Distribution64, Error, NetworkParams64};

/// The state-space cap, overridable through the environment.
pub const STATE_CAP_ENV: &str = "LOSSNET_STATE_CAP";

pub fn state_cap() -> usize {
    std::env::var(STATE_CAP_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_STATE_CAP)
}

pub fn load_params(path: &Path) -> Result<NetworkParams64, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    NetworkParams64::from_json_str(&text)
}

pub fn enumerate(params: &NetworkParams64) -> Result<StateSpace, Error> {
    enumerate_statespace_with_cap(params, state_cap())
}

/// Initial-condition specifier: a lexicographic state index (point mass),
/// the literal "uniform", or a path to a CSV/plain file holding |X| values.
pub fn parse_y0(spec: &str, space: &StateSpace) -> Result<Distribution64, Error> {
    if spec == "uniform" {
        return Ok(Distribution64::uniform(space));
    }
    if let Ok(idx) = spec.parse::<usize>() {
        return Distribution64::point_mass(space, idx);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Error::Io(format!("y0 file {spec}: {e}")))?;
    let values: Vec<f64> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| Error::Io(format!("y0 entry {s:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if values.len() != space.size() {
        return Err(Error::DimensionMismatch {
            expected: space.size(),
            got: values.len(),
        });
    }
    Distribution64::renormalized(values)
}

/// Simulate config file. `switch.thresholds` may be omitted, in which case
/// the band is derived from the two stable-point predictions of the switch
/// observable (central 50% of the gap).
#[derive(Debug, Deserialize)]
pub struct SimulateFile {
    pub seed: u64,
    pub t_max: f64,
    pub sample_dt: f64,
    pub n_nodes: u64,
    /// same grammar as --y0
    pub y0: serde_json::Value,
    /// "rounding" (default) or "multinomial"
    #[serde(default)]
    pub init: InitSpec,
    pub observables: Vec<Observable>,
    #[serde(default)]
    pub switch: Option<SwitchFile>,
}

#[derive(Debug, Default, Deserialize, PartialEq, Eq, Clone, Copy)]
#[serde(rename_all = "lowercase")]
pub enum InitSpec {
    #[default]
    Rounding,
    Multinomial,
}

#[derive(Debug, Deserialize)]
pub struct SwitchFile {
    /// observable name (see Observable::name), e.g. "zero_frac_k1"
    pub observable: String,
    #[serde(default)]
    pub thresholds: Option<(f64, f64)>,
}

pub fn load_simulate_file(path: &Path) -> Result<SimulateFile, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidParams(format!("config: {e}")))
}

/// y0 field of the config: string spec, integer index, or inline vector.
pub fn y0_from_value(v: &serde_json::Value, space: &StateSpace) -> Result<Distribution64, Error> {
    match v {
        serde_json::Value::String(s) => parse_y0(s, space),
        serde_json::Value::Number(n) => {
            let idx = n
                .as_u64()
                .ok_or_else(|| Error::InvalidParams("y0 index must be a nonnegative integer".into()))?;
            Distribution64::point_mass(space, idx as usize)
        }
        serde_json::Value::Array(items) => {
            let values: Vec<f64> = items
                .iter()
                .map(|x| {
                    x.as_f64()
                        .ok_or_else(|| Error::InvalidParams("y0 array entries must be numbers".into()))
                })
                .collect::<Result<_, _>>()?;
            if values.len() != space.size() {
                return Err(Error::DimensionMismatch {
                    expected: space.size(),
                    got: values.len(),
                });
            }
            Distribution64::renormalized(values)
        }
        _ => Err(Error::InvalidParams(
            "y0 must be \"uniform\", a state index, a vector, or a file path".into(),
        )),
    }
}
