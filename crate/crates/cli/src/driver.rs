//! One entry point per experiment: prepare the workspace, run, write CSVs
//! and the manifest, and return what was written.

use crate::config::Config;
use crate::csvout;
use crate::error::CliError;
use crate::experiments::{self, ExperimentKind};
use crate::manifest;
use std::path::PathBuf;

pub struct ExecutionReport {
    pub kind: ExperimentKind,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Run `kind` under `cfg`, writing all outputs into `cfg.output.dir`.
pub fn execute(kind: ExperimentKind, cfg: &Config) -> Result<ExecutionReport, CliError> {
    manifest::check_kind(cfg, kind)?;
    let mut bound = cfg.clone();
    bound.experiment.kind = Some(kind.as_str().to_string());
    let ws = experiments::prepare(bound.clone())?;
    let dir = PathBuf::from(&ws.cfg.output.dir);
    std::fs::create_dir_all(&dir)?;
    let mut files = vec![manifest::write_manifest(&dir, kind, &bound)?];
    let summary = match kind {
        ExperimentKind::GroundState => {
            let report = experiments::run_ground_state(&ws);
            files.push(csvout::write_ground_state(&dir, &report)?);
            format!(
                "E0 = {:.6}, first transitions: {:?}",
                report.energies[0],
                &report.transitions[1..]
            )
        }
        ExperimentKind::LaserScan => {
            let scan = experiments::run_laser_scan(&ws)?;
            files.extend(csvout::write_laser_scan(&dir, &scan)?);
            format!("{} amplitudes scanned", scan.rows.len())
        }
        ExperimentKind::NoiseScan => {
            let scan = experiments::run_noise_scan(&ws)?;
            files.extend(csvout::write_noise_scan(&dir, &scan)?);
            experiments::summarize_sr_rows(&scan.rows)
        }
        ExperimentKind::DurationScan => {
            let scan = experiments::run_duration_scan(&ws)?;
            files.push(csvout::write_duration_scan(&dir, &scan)?);
            format!("{} pulse durations", scan.families.len())
        }
        ExperimentKind::F0Scan => {
            let scan = experiments::run_f0_scan(&ws)?;
            files.push(csvout::write_f0_scan(&dir, &scan)?);
            experiments::summarize_sr_rows(&scan.rows)
        }
        ExperimentKind::ChaoticScan => {
            let scan = experiments::run_chaotic_scan(&ws)?;
            files.push(csvout::write_chaotic_scan(&dir, &scan)?);
            experiments::summarize_sr_rows(&scan.rows)
        }
        ExperimentKind::Frag => {
            let scan = experiments::run_frag(&ws)?;
            files.push(csvout::write_frag(&dir, &scan)?);
            format!(
                "{} probe frequencies x {} variants",
                scan.omega_grid.len(),
                ws.cfg.frag.variants.len()
            )
        }
        ExperimentKind::Holes => {
            let scan = experiments::run_holes_scan(&ws)?;
            files.push(csvout::write_holes_scan(&dir, &scan)?);
            format!("hole centers {:?}, {} widths", scan.centers, scan.families.len())
        }
        ExperimentKind::Delay => {
            let scan = experiments::run_delay_scan(&ws)?;
            files.push(csvout::write_delay_scan(&dir, &scan)?);
            format!("{} arrangements", scan.families.len())
        }
    };
    Ok(ExecutionReport { kind, files, summary })
}
