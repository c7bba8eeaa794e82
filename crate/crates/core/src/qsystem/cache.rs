//! Disk cache for computed bound spectra.
//!
//! Format (version 1): a plain-text columnar file. Header lines start with
//! `#` and carry the format version, the key (a², grid extent, point count,
//! level count), and the level energies printed with 17 significant digits
//! (exact f64 round-trip). Each following row holds the grid position and
//! the real/imaginary amplitude pair of every state at that point:
//!
//! ```text
//! # srion-spectrum-v1
//! # a_squared <f64>
//! # x_max <f64>
//! # n_points <usize>
//! # n_levels <usize>
//! # energies <E0> <E1> ...
//! <x> <re0> <im0> <re1> <im1> ...
//! ```
//!
//! Files are keyed by name; any header mismatch or parse failure is
//! reported so the caller can recompute.

use super::{RelaxOptions, SoftCoreAtom, SpatialGrid, StationarySpectrum, Wavefunction};
use crate::error::CoreError;
use crate::Result;
use num_complex::Complex64;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

const FORMAT_TAG: &str = "srion-spectrum-v1";

/// File name encoding the cache key.
pub fn cache_file_name(atom: &SoftCoreAtom, grid: &SpatialGrid, n_levels: usize) -> String {
    format!(
        "spectrum-a2_{:.6}-x_{:.3}-n_{}-l_{}.dat",
        atom.a_squared(),
        grid.x_max(),
        grid.n_points(),
        n_levels
    )
}

pub fn save_spectrum(
    path: &Path,
    spectrum: &StationarySpectrum,
    atom: &SoftCoreAtom,
    grid: &SpatialGrid,
) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "# {FORMAT_TAG}")?;
    writeln!(w, "# a_squared {:.17e}", atom.a_squared())?;
    writeln!(w, "# x_max {:.17e}", grid.x_max())?;
    writeln!(w, "# n_points {}", grid.n_points())?;
    writeln!(w, "# n_levels {}", spectrum.states.len())?;
    write!(w, "# energies")?;
    for e in &spectrum.energies {
        write!(w, " {e:.17e}")?;
    }
    writeln!(w)?;
    for j in 0..grid.n_points() {
        write!(w, "{:.17e}", grid.x(j))?;
        for state in &spectrum.states {
            let a = state.amplitudes[j];
            write!(w, " {:.17e} {:.17e}", a.re, a.im)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn load_spectrum(
    path: &Path,
    atom: &SoftCoreAtom,
    grid: &Arc<SpatialGrid>,
    n_levels: usize,
) -> Result<StationarySpectrum> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let mut header = |name: &str| -> Result<String> {
        let line = lines
            .next()
            .ok_or_else(|| CoreError::Cache(format!("truncated header, expected {name}")))??;
        let rest = line
            .strip_prefix("# ")
            .ok_or_else(|| CoreError::Cache(format!("malformed header line: {line}")))?;
        Ok(rest.to_string())
    };
    if header("format tag")? != FORMAT_TAG {
        return Err(CoreError::Cache("unknown format version".into()));
    }
    let field = |s: String, key: &str| -> Result<String> {
        s.strip_prefix(key)
            .map(|v| v.trim().to_string())
            .ok_or_else(|| CoreError::Cache(format!("expected `{key}` header")))
    };
    let a2: f64 = field(header("a_squared")?, "a_squared")?
        .parse()
        .map_err(|e| CoreError::Cache(format!("bad a_squared: {e}")))?;
    let x_max: f64 = field(header("x_max")?, "x_max")?
        .parse()
        .map_err(|e| CoreError::Cache(format!("bad x_max: {e}")))?;
    let n_points: usize = field(header("n_points")?, "n_points")?
        .parse()
        .map_err(|e| CoreError::Cache(format!("bad n_points: {e}")))?;
    let stored_levels: usize = field(header("n_levels")?, "n_levels")?
        .parse()
        .map_err(|e| CoreError::Cache(format!("bad n_levels: {e}")))?;
    if a2 != atom.a_squared() || x_max != grid.x_max() || n_points != grid.n_points() {
        return Err(CoreError::Cache("cache key does not match requested configuration".into()));
    }
    if stored_levels < n_levels {
        return Err(CoreError::Cache(format!(
            "cache holds {stored_levels} levels, {n_levels} requested"
        )));
    }
    let energies: Vec<f64> = field(header("energies")?, "energies")?
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| CoreError::Cache(format!("bad energies: {e}")))?;
    if energies.len() != stored_levels {
        return Err(CoreError::Cache("energy count does not match n_levels".into()));
    }
    let mut states: Vec<Wavefunction> =
        (0..n_levels).map(|_| Wavefunction::zeros(Arc::clone(grid))).collect();
    let mut rows = 0usize;
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let _x = toks.next().ok_or_else(|| CoreError::Cache("empty data row".into()))?;
        for state in states.iter_mut() {
            let re: f64 = toks
                .next()
                .ok_or_else(|| CoreError::Cache("short data row".into()))?
                .parse()
                .map_err(|e| CoreError::Cache(format!("bad amplitude: {e}")))?;
            let im: f64 = toks
                .next()
                .ok_or_else(|| CoreError::Cache("short data row".into()))?
                .parse()
                .map_err(|e| CoreError::Cache(format!("bad amplitude: {e}")))?;
            state.amplitudes[rows] = Complex64::new(re, im);
        }
        rows += 1;
        if rows > n_points {
            return Err(CoreError::Cache("more data rows than grid points".into()));
        }
    }
    if rows != n_points {
        return Err(CoreError::Cache(format!("{rows} data rows for {n_points} grid points")));
    }
    Ok(StationarySpectrum { energies: energies[..n_levels].to_vec(), states })
}

/// Load the spectrum from `cache_dir` if a valid entry exists, otherwise
/// compute it and write the cache entry.
pub fn compute_or_load(
    cache_dir: &Path,
    grid: &Arc<SpatialGrid>,
    atom: &SoftCoreAtom,
    n_levels: usize,
    opts: &RelaxOptions,
) -> Result<StationarySpectrum> {
    let path: PathBuf = cache_dir.join(cache_file_name(atom, grid, n_levels));
    if path.exists() {
        if let Ok(spectrum) = load_spectrum(&path, atom, grid, n_levels) {
            return Ok(spectrum);
        }
        // stale or corrupt entry: fall through and recompute
    }
    let spectrum = super::bound_spectrum(grid, atom, n_levels, opts)?;
    save_spectrum(&path, &spectrum, atom, grid)?;
    Ok(spectrum)
}
