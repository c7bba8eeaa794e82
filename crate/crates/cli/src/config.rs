//! Experiment configuration: a flat TOML file with one section per
//! subsystem, all quantities in atomic units. Command-line flags override
//! file values; a written manifest is itself a valid config file, so any
//! run can be reproduced by pointing `--config` at its manifest.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct Config {
    pub grid: GridCfg,
    pub atom: AtomCfg,
    pub laser: LaserCfg,
    pub probe: ProbeCfg,
    pub noise: NoiseCfg,
    pub chaotic: ChaoticCfg,
    pub propagator: PropCfg,
    pub ensemble: EnsCfg,
    pub sweep: SweepCfg,
    pub laser_scan: LaserScanCfg,
    pub f0_scan: F0ScanCfg,
    pub duration: DurationCfg,
    pub delay: DelayCfg,
    pub frag: FragCfg,
    pub output: OutputCfg,
    pub experiment: ExperimentCfg,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GridCfg {
    pub x_max: f64,
    pub n_points: usize,
}

impl Default for GridCfg {
    fn default() -> Self {
        Self { x_max: 600.0, n_points: 8192 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct AtomCfg {
    pub a_squared: f64,
    pub n_levels: usize,
}

impl Default for AtomCfg {
    fn default() -> Self {
        Self { a_squared: 2.0, n_levels: 4 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct LaserCfg {
    pub f0: f64,
    pub omega: f64,
    pub cep: f64,
    /// Pulse duration in optical cycles.
    pub cycles: f64,
    /// Turn-on/off time in optical cycles.
    pub ramp_cycles: f64,
    /// "ramped-plateau" or "sin2-arch".
    pub envelope: String,
    /// Optional carrier-envelope-phase sweep: when non-empty, noise-scan
    /// additionally writes one enhancement family per phase value.
    pub cep_values: Vec<f64>,
}

impl Default for LaserCfg {
    fn default() -> Self {
        Self {
            f0: 0.02,
            omega: 0.057,
            cep: 0.0,
            cycles: 10.0,
            ramp_cycles: 1.0,
            envelope: "ramped-plateau".into(),
            cep_values: vec![],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeCfg {
    /// Probe amplitude as a fraction of the pump amplitude.
    pub rel_amplitude: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_step: f64,
}

impl Default for ProbeCfg {
    fn default() -> Self {
        Self { rel_amplitude: 0.01, omega_min: 0.05, omega_max: 0.60, omega_step: 0.005 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseCfg {
    /// White-noise amplitude sqrt(D) for single-point runs.
    pub sqrt_d: f64,
}

impl Default for NoiseCfg {
    fn default() -> Self {
        Self { sqrt_d: 0.0015 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ChaoticCfg {
    pub n_modes: usize,
    pub omega_center: f64,
    pub bandwidth: f64,
    /// Hole widths for the holes experiment (0 = unperforated reference).
    pub hole_widths: Vec<f64>,
    /// Hole centers; empty = the first three atomic transition frequencies.
    pub hole_centers: Vec<f64>,
}

impl Default for ChaoticCfg {
    fn default() -> Self {
        Self {
            n_modes: 1024,
            omega_center: 0.375,
            bandwidth: 0.75,
            hole_widths: vec![0.0, 0.013, 0.03, 0.1, 0.15],
            hole_centers: vec![],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PropCfg {
    pub dt: f64,
    pub absorber_width: f64,
    pub absorber_strength: f64,
    pub x_r: f64,
    pub drift_out_time: f64,
}

impl Default for PropCfg {
    fn default() -> Self {
        Self {
            dt: 0.05,
            absorber_width: 90.0,
            absorber_strength: 0.125,
            x_r: 500.0,
            drift_out_time: 500.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EnsCfg {
    pub realizations: usize,
    pub base_seed: u64,
    /// 0 = all available cores.
    pub workers: usize,
}

impl Default for EnsCfg {
    fn default() -> Self {
        Self { realizations: 16, base_seed: 20_260_808, workers: 0 }
    }
}

/// Logarithmic sweep of the noise amplitude sqrt(D); chaotic scans map the
/// same grid onto F_rms through the equal-spectral-density relation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SweepCfg {
    pub points: usize,
    pub min: f64,
    pub max: f64,
}

impl Default for SweepCfg {
    fn default() -> Self {
        Self { points: 12, min: 1e-4, max: 3e-2 }
    }
}

impl SweepCfg {
    pub fn values(&self) -> Vec<f64> {
        log_grid(self.min, self.max, self.points)
    }
}

pub fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let ratio = (max / min).ln() / (points - 1) as f64;
    (0..points).map(|i| min * (ratio * i as f64).exp()).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct LaserScanCfg {
    pub f0_values: Vec<f64>,
    /// Peak amplitudes whose flux profile is written out alongside the scan.
    pub flux_profile_f0s: Vec<f64>,
}

impl Default for LaserScanCfg {
    fn default() -> Self {
        Self {
            f0_values: vec![
                0.004, 0.008, 0.012, 0.016, 0.02, 0.024, 0.028, 0.032, 0.036, 0.04, 0.045, 0.05,
                0.055, 0.06,
            ],
            flux_profile_f0s: vec![],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct F0ScanCfg {
    pub f0_values: Vec<f64>,
    pub sqrt_d: f64,
}

impl Default for F0ScanCfg {
    fn default() -> Self {
        Self {
            f0_values: vec![0.004, 0.008, 0.012, 0.016, 0.02, 0.025, 0.03, 0.04, 0.05],
            sqrt_d: 0.0015,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DurationCfg {
    pub cycles: Vec<f64>,
}

impl Default for DurationCfg {
    fn default() -> Self {
        Self { cycles: vec![5.0, 10.0, 20.0, 30.0] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DelayCfg {
    /// Subset of "simultaneous", "noise-first", "laser-first".
    pub arrangements: Vec<String>,
}

impl Default for DelayCfg {
    fn default() -> Self {
        Self {
            arrangements: vec!["simultaneous".into(), "noise-first".into(), "laser-first".into()],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct FragCfg {
    /// Subset of "bare", "driven", "noise-then-probe".
    pub variants: Vec<String>,
    /// Pump duration for the gain scan, in optical cycles.
    pub cycles: f64,
    pub noise_sqrt_d: f64,
    pub noise_realizations: usize,
}

impl Default for FragCfg {
    fn default() -> Self {
        Self {
            variants: vec!["bare".into(), "driven".into(), "noise-then-probe".into()],
            cycles: 10.0,
            noise_sqrt_d: 0.0015,
            noise_realizations: 8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OutputCfg {
    pub dir: String,
    pub cache_dir: String,
    /// Also write mean-flux time series for sweep points (large files).
    pub write_flux_profiles: bool,
    /// Verbose: dump the (t, flux, norm) table of realization 0 at every
    /// sweep point.
    pub dump_realization_flux: bool,
}

impl Default for OutputCfg {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            cache_dir: "cache".into(),
            write_flux_profiles: false,
            dump_realization_flux: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentCfg {
    /// Experiment kind this config (or manifest) belongs to; when set, it
    /// must match the invoked subcommand.
    pub kind: Option<String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        // strip a [manifest] table if present so manifests load as configs
        let mut table: toml::Table =
            text.parse().map_err(|e| CliError::Config(format!("config parse error: {e}")))?;
        table.remove("manifest");
        table.try_into().map_err(|e| CliError::Config(format!("config error: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// FNV-1a hash of the canonical serialized config with the worker count
    /// normalized away (it never affects results).
    pub fn content_hash(&self) -> u64 {
        let mut normalized = self.clone();
        normalized.ensemble.workers = 0;
        let bytes = normalized.to_toml();
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in bytes.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}
