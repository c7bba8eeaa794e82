//! CSV emitters. Column layouts are part of the tool's contract and are
//! documented in the README; values are printed as `{:.12e}` so repeated
//! runs of the same manifest are byte-identical.

use crate::error::CliError;
use crate::experiments::{
    ChaoticScan, DelayScan, DurationScan, F0Scan, FragScan, GroundStateReport, HolesScan,
    LaserScan, NoiseScan, SrRow,
};
use srion_core::propagator::StepSeries;
use std::io::Write;
use std::path::{Path, PathBuf};

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

fn write_lines(path: &Path, header: &str, lines: &[String]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{header}")?;
    for line in lines {
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn sr_line(prefix: &str, row: &SrRow) -> String {
    format!(
        "{prefix}{},{},{},{},{},{},{},{},{},{}",
        fmt(row.sweep),
        fmt(row.p_l),
        fmt(row.p_n),
        fmt(row.p_n_std),
        fmt(row.p_ln),
        fmt(row.p_ln_std),
        fmt(row.eta),
        fmt(row.eta_std),
        fmt(row.p_n_flux),
        fmt(row.p_ln_flux),
    )
}

const SR_COLUMNS: &str = "p_l,p_n,p_n_std,p_ln,p_ln_std,eta,eta_std,p_n_flux,p_ln_flux";

pub fn write_ground_state(dir: &Path, report: &GroundStateReport) -> Result<PathBuf, CliError> {
    let path = dir.join("energies.csv");
    let lines: Vec<String> = report
        .energies
        .iter()
        .zip(&report.transitions)
        .enumerate()
        .map(|(k, (e, w))| format!("{k},{},{}", fmt(*e), fmt(*w)))
        .collect();
    write_lines(&path, "level,energy,transition_from_ground", &lines)?;
    Ok(path)
}

pub fn write_laser_scan(dir: &Path, scan: &LaserScan) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let path = dir.join("laser_scan.csv");
    let lines: Vec<String> =
        scan.rows.iter().map(|r| format!("{},{},{}", fmt(r.f0), fmt(r.p), fmt(r.p_flux))).collect();
    write_lines(&path, "f0,p_l,p_l_flux", &lines)?;
    written.push(path);
    for (f0, series) in &scan.profiles {
        let path = dir.join(format!("flux_f0_{f0:.4}.csv"));
        written.push(write_flux_series(&path, series)?);
    }
    Ok(written)
}

pub fn write_flux_series(path: &Path, series: &StepSeries) -> Result<PathBuf, CliError> {
    let lines: Vec<String> = series.iter().map(|(t, v)| format!("{},{}", fmt(t), fmt(v))).collect();
    write_lines(path, "t,flux", &lines)?;
    Ok(path.to_path_buf())
}

pub fn write_noise_scan(dir: &Path, scan: &NoiseScan) -> Result<Vec<PathBuf>, CliError> {
    let path = dir.join("noise_scan.csv");
    let lines: Vec<String> = scan.rows.iter().map(|r| sr_line("", r)).collect();
    write_lines(&path, &format!("sqrt_d,{SR_COLUMNS}"), &lines)?;
    let mut written = vec![path];
    if !scan.cep_families.is_empty() {
        let path = dir.join("cep_scan.csv");
        let mut lines = Vec::new();
        for (cep, rows) in &scan.cep_families {
            for row in rows {
                lines.push(sr_line(&format!("{},", fmt(*cep)), row));
            }
        }
        write_lines(&path, &format!("cep,sqrt_d,{SR_COLUMNS}"), &lines)?;
        written.push(path);
    }
    written.extend(write_sr_profiles(dir, "noise_scan", &scan.rows)?);
    Ok(written)
}

fn write_sr_profiles(dir: &Path, stem: &str, rows: &[SrRow]) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if let Some(series) = &row.mean_flux_ln {
            let path = dir.join(format!("flux_{stem}_p{i:02}_ln.csv"));
            written.push(write_flux_series(&path, series)?);
        }
        if let Some(series) = &row.mean_flux_n {
            let path = dir.join(format!("flux_{stem}_p{i:02}_n.csv"));
            written.push(write_flux_series(&path, series)?);
        }
        if let Some((flux, norm)) = &row.realization0 {
            let path = dir.join(format!("real0_{stem}_p{i:02}.csv"));
            let lines: Vec<String> = flux
                .iter()
                .zip(&norm.values)
                .map(|((t, f), n)| format!("{},{},{}", fmt(t), fmt(f), fmt(*n)))
                .collect();
            write_lines(&path, "t,flux,norm", &lines)?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn write_duration_scan(dir: &Path, scan: &DurationScan) -> Result<PathBuf, CliError> {
    let path = dir.join("duration_scan.csv");
    let mut lines = Vec::new();
    for (cycles, rows) in &scan.families {
        for row in rows {
            lines.push(sr_line(&format!("{},", fmt(*cycles)), row));
        }
    }
    write_lines(&path, &format!("cycles,sqrt_d,{SR_COLUMNS}"), &lines)?;
    Ok(path)
}

pub fn write_f0_scan(dir: &Path, scan: &F0Scan) -> Result<PathBuf, CliError> {
    let path = dir.join("f0_scan.csv");
    let lines: Vec<String> =
        scan.rows.iter().map(|r| sr_line(&format!("{},", fmt(scan.sqrt_d)), r)).collect();
    write_lines(&path, &format!("sqrt_d,f0,{SR_COLUMNS}"), &lines)?;
    Ok(path)
}

pub fn write_chaotic_scan(dir: &Path, scan: &ChaoticScan) -> Result<PathBuf, CliError> {
    let path = dir.join("chaotic_scan.csv");
    let lines: Vec<String> = scan
        .rows
        .iter()
        .zip(&scan.sqrt_d_equiv)
        .map(|(r, sde)| sr_line(&format!("{},", fmt(*sde)), r))
        .collect();
    write_lines(&path, &format!("sqrt_d_equiv,f_rms,{SR_COLUMNS}"), &lines)?;
    Ok(path)
}

pub fn write_holes_scan(dir: &Path, scan: &HolesScan) -> Result<PathBuf, CliError> {
    let path = dir.join("holes_scan.csv");
    let mut lines = Vec::new();
    for (width, family) in &scan.families {
        for (row, sde) in family.rows.iter().zip(&family.sqrt_d_equiv) {
            lines.push(sr_line(&format!("{},{},", fmt(*width), fmt(*sde)), row));
        }
    }
    write_lines(&path, &format!("hole_width,sqrt_d_equiv,f_rms,{SR_COLUMNS}"), &lines)?;
    Ok(path)
}

pub fn write_delay_scan(dir: &Path, scan: &DelayScan) -> Result<PathBuf, CliError> {
    let path = dir.join("delay_scan.csv");
    let mut lines = Vec::new();
    for (arrangement, rows) in &scan.families {
        for row in rows {
            lines.push(sr_line(&format!("{},", arrangement.as_str()), row));
        }
    }
    write_lines(&path, &format!("arrangement,sqrt_d,{SR_COLUMNS}"), &lines)?;
    Ok(path)
}

pub fn write_frag(dir: &Path, scan: &FragScan) -> Result<PathBuf, CliError> {
    let path = dir.join("frag.csv");
    let lines: Vec<String> = scan
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{}",
                r.variant.as_str(),
                fmt(r.omega_p),
                fmt(r.depletion_gain),
                fmt(r.energy_gain),
                fmt(r.ground_pop),
                fmt(r.energy_absorbed),
            )
        })
        .collect();
    write_lines(
        &path,
        "variant,omega_p,depletion_gain,energy_gain,ground_pop,energy_absorbed",
        &lines,
    )?;
    Ok(path)
}
