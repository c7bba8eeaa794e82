//! Experiment presets: each runner maps one subcommand onto schedules,
//! ensembles, and aggregated rows ready for CSV output.
//!
//! Sweep conventions shared by all noise-style scans:
//!
//! * The laser-only reference `P_l` is deterministic and computed once.
//! * Each sweep point gets its own seed, `derive(base_seed, point_index)`,
//!   used by both the noise-only and the laser+noise ensemble, which pairs
//!   their realizations and sharpens the enhancement estimate.
//! * `eta` carries the population standard deviation over realizations.
//!
//! Chaotic scans reuse the white-noise sweep grid mapped through the
//! equal-spectral-density relation: a band of total power `F_rms^2` spread
//! over `bandwidth` matches white noise of intensity
//! `D = pi * F_rms^2 / (2 * bandwidth)`.

use crate::config::Config;
use crate::error::CliError;
use srion_core::ensemble::{self, attach_eta, derive, run_ensemble, EnsembleConfig};
use srion_core::fields::{
    ChaoticLightSpec, EnvelopeKind, FieldSchedule, FieldSource, LaserPulse, ProbePulse,
    ScheduleEntry, SpectralHole, WhiteNoiseSpec,
};
use srion_core::observables::EnsembleResult;
use srion_core::propagator::{
    run_realization, GroundObserver, PropagatorConfig, RunOptions, StepSeries, Stepper,
};
use srion_core::qsystem::{self, SoftCoreAtom, SpatialGrid, StationarySpectrum, Wavefunction};
use std::fmt::Write as _;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    GroundState,
    LaserScan,
    NoiseScan,
    DurationScan,
    F0Scan,
    ChaoticScan,
    Frag,
    Holes,
    Delay,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::GroundState => "ground-state",
            Self::LaserScan => "laser-scan",
            Self::NoiseScan => "noise-scan",
            Self::DurationScan => "duration-scan",
            Self::F0Scan => "f0-scan",
            Self::ChaoticScan => "chaotic-scan",
            Self::Frag => "frag",
            Self::Holes => "holes",
            Self::Delay => "delay",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "ground-state" => Self::GroundState,
            "laser-scan" => Self::LaserScan,
            "noise-scan" => Self::NoiseScan,
            "duration-scan" => Self::DurationScan,
            "f0-scan" => Self::F0Scan,
            "chaotic-scan" => Self::ChaoticScan,
            "frag" => Self::Frag,
            "holes" => Self::Holes,
            "delay" => Self::Delay,
            other => return Err(CliError::Config(format!("unknown experiment kind `{other}`"))),
        })
    }
}

/// Prepared simulation context shared by every experiment: grid, atom,
/// cached bound spectrum, relaxed initial state, and the stepping tables.
pub struct Workspace {
    pub cfg: Config,
    pub grid: Arc<SpatialGrid>,
    pub atom: SoftCoreAtom,
    pub spectrum: StationarySpectrum,
    pub psi0: Arc<Wavefunction>,
    pub e0: f64,
    pub stepper: Arc<Stepper>,
}

pub fn prepare(cfg: Config) -> Result<Workspace, CliError> {
    let grid = Arc::new(SpatialGrid::symmetric(cfg.grid.x_max, cfg.grid.n_points)?);
    let atom = SoftCoreAtom::new(cfg.atom.a_squared)?;
    let prop = propagator_config(&cfg);
    prop.validate(&grid)?;
    let spectrum = qsystem::cache::compute_or_load(
        std::path::Path::new(&cfg.output.cache_dir),
        &grid,
        &atom,
        cfg.atom.n_levels.max(1),
        &qsystem::RelaxOptions::default(),
    )?;
    let psi0 = Arc::new(spectrum.ground().clone());
    let e0 = spectrum.ground_energy();
    let stepper = Arc::new(Stepper::for_atom(&grid, &atom, prop)?);
    Ok(Workspace { cfg, grid, atom, spectrum, psi0, e0, stepper })
}

pub fn propagator_config(cfg: &Config) -> PropagatorConfig {
    PropagatorConfig {
        dt: cfg.propagator.dt,
        absorber_width: cfg.propagator.absorber_width,
        absorber_strength: cfg.propagator.absorber_strength,
        x_r: cfg.propagator.x_r,
        drift_out_time: cfg.propagator.drift_out_time,
    }
}

fn envelope_kind(name: &str) -> Result<EnvelopeKind, CliError> {
    match name {
        "ramped-plateau" => Ok(EnvelopeKind::RampedPlateau),
        "sin2-arch" => Ok(EnvelopeKind::SinSquaredArch),
        other => Err(CliError::Config(format!("unknown envelope kind `{other}`"))),
    }
}

impl Workspace {
    /// Pulse with the configured carrier/envelope and the given peak
    /// amplitude and duration in optical cycles.
    pub fn pulse(&self, f0: f64, cycles: f64) -> Result<LaserPulse, CliError> {
        self.pulse_with_cep(f0, cycles, self.cfg.laser.cep)
    }

    pub fn pulse_with_cep(&self, f0: f64, cycles: f64, cep: f64) -> Result<LaserPulse, CliError> {
        let period = std::f64::consts::TAU / self.cfg.laser.omega;
        let envelope = envelope_kind(&self.cfg.laser.envelope)?;
        let duration = cycles * period;
        let ramp = match envelope {
            EnvelopeKind::RampedPlateau => {
                (self.cfg.laser.ramp_cycles * period).min(duration / 2.0)
            }
            EnvelopeKind::SinSquaredArch => 0.0,
        };
        Ok(LaserPulse::new(f0, self.cfg.laser.omega, cep, duration, ramp, envelope)?)
    }

    fn ensemble_config(&self, point_seed: u64) -> EnsembleConfig {
        EnsembleConfig {
            n_realizations: self.cfg.ensemble.realizations,
            base_seed: point_seed,
            parallelism: self.cfg.ensemble.workers,
        }
    }

    /// Deterministic laser-only probability for the given pulse.
    pub fn laser_only_p(&self, pulse: &LaserPulse) -> Result<f64, CliError> {
        let schedule =
            FieldSchedule::simultaneous(vec![FieldSource::Laser(*pulse)], pulse.duration)?;
        let res = run_realization(&self.psi0, &schedule, &self.stepper, 0, &RunOptions::default())?;
        Ok(res.p)
    }

    /// Hole centers: configured explicitly, or the first three transition
    /// frequencies of the cached spectrum.
    pub fn hole_centers(&self) -> Result<Vec<f64>, CliError> {
        if !self.cfg.chaotic.hole_centers.is_empty() {
            return Ok(self.cfg.chaotic.hole_centers.clone());
        }
        if self.spectrum.energies.len() < 4 {
            return Err(CliError::Config(
                "hole centers need at least 4 cached levels (atom.n_levels)".into(),
            ));
        }
        Ok((1..=3).map(|k| self.spectrum.transition(k)).collect())
    }

    pub fn chaotic_spec(
        &self,
        f_rms: f64,
        holes: Vec<SpectralHole>,
    ) -> Result<ChaoticLightSpec, CliError> {
        Ok(ChaoticLightSpec::new(
            self.cfg.chaotic.n_modes,
            self.cfg.chaotic.omega_center,
            self.cfg.chaotic.bandwidth,
            f_rms,
            holes,
        )?)
    }

    /// White-noise amplitude with the same in-band spectral density as a
    /// chaotic field of rms amplitude `f_rms` over the configured band.
    pub fn sqrt_d_equivalent(&self, f_rms: f64) -> f64 {
        f_rms * (std::f64::consts::PI / (2.0 * self.cfg.chaotic.bandwidth)).sqrt()
    }

    /// Inverse of [`Self::sqrt_d_equivalent`].
    pub fn f_rms_for_sqrt_d(&self, sqrt_d: f64) -> f64 {
        sqrt_d / (std::f64::consts::PI / (2.0 * self.cfg.chaotic.bandwidth)).sqrt()
    }
}

/// Relative timing of the laser pulse and the stochastic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arrangement {
    Simultaneous,
    NoiseFirst,
    LaserFirst,
}

impl Arrangement {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Simultaneous => "simultaneous",
            Self::NoiseFirst => "noise-first",
            Self::LaserFirst => "laser-first",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "simultaneous" => Self::Simultaneous,
            "noise-first" => Self::NoiseFirst,
            "laser-first" => Self::LaserFirst,
            other => return Err(CliError::Config(format!("unknown arrangement `{other}`"))),
        })
    }
}

/// Stochastic source of an SR-style scan point.
#[derive(Debug, Clone)]
pub enum NoiseKind {
    White { sqrt_d: f64 },
    Chaotic { spec: ChaoticLightSpec },
}

impl NoiseKind {
    fn source(&self) -> Result<FieldSource, CliError> {
        Ok(match self {
            Self::White { sqrt_d } => {
                FieldSource::WhiteNoise(WhiteNoiseSpec::from_sqrt_d(*sqrt_d)?)
            }
            Self::Chaotic { spec } => FieldSource::Chaotic(spec.clone()),
        })
    }
}

/// One point of an enhancement scan.
#[derive(Debug, Clone)]
pub struct SrRow {
    /// Swept quantity: sqrt(D) for white noise, F_rms for chaotic light.
    pub sweep: f64,
    pub p_l: f64,
    pub p_n: f64,
    pub p_n_std: f64,
    pub p_ln: f64,
    pub p_ln_std: f64,
    pub eta: f64,
    pub eta_std: f64,
    /// Flux-integral cross-checks of the two ensemble means.
    pub p_n_flux: f64,
    pub p_ln_flux: f64,
    pub mean_flux_ln: Option<StepSeries>,
    pub mean_flux_n: Option<StepSeries>,
    /// Verbose dump of the laser+noise realization 0: (flux, norm) series.
    pub realization0: Option<(StepSeries, StepSeries)>,
}

fn progress(kind: ExperimentKind, msg: &str) {
    eprintln!("[{}] {msg}", kind.as_str());
}

/// Laser+noise and noise-only paired ensembles at one sweep point.
pub fn sr_point(
    ws: &Workspace,
    pulse: &LaserPulse,
    noise: &NoiseKind,
    arrangement: Arrangement,
    p_l: f64,
    point_seed: u64,
    record_flux: bool,
) -> Result<SrRow, CliError> {
    let t = pulse.duration;
    let noise_src = noise.source()?;
    let combined = match arrangement {
        Arrangement::Simultaneous => {
            FieldSchedule::simultaneous(vec![FieldSource::Laser(*pulse), noise_src.clone()], t)?
        }
        Arrangement::NoiseFirst => FieldSchedule::new(
            vec![
                ScheduleEntry { source: noise_src.clone(), t_start: 0.0, t_stop: t },
                ScheduleEntry { source: FieldSource::Laser(*pulse), t_start: t, t_stop: 2.0 * t },
            ],
            2.0 * t,
        )?,
        Arrangement::LaserFirst => FieldSchedule::new(
            vec![
                ScheduleEntry { source: FieldSource::Laser(*pulse), t_start: 0.0, t_stop: t },
                ScheduleEntry { source: noise_src.clone(), t_start: t, t_stop: 2.0 * t },
            ],
            2.0 * t,
        )?,
    };
    // The noise-only reference uses its bare window; leading or trailing
    // field-free evolution only adds a global phase, so the sequential
    // arrangements share it.
    let noise_only = FieldSchedule::simultaneous(vec![noise_src], t)?;

    let opts = RunOptions { record_flux, ..Default::default() };
    let ens = ws.ensemble_config(point_seed);
    let n_res = run_ensemble(&ws.psi0, &noise_only, &ws.stepper, &opts, &ens)?;
    let mut ln_res = run_ensemble(&ws.psi0, &combined, &ws.stepper, &opts, &ens)?;
    attach_eta(&mut ln_res, p_l, n_res.p_mean)?;
    let mut row = row_from(f64::NAN, p_l, &n_res, &ln_res);
    if ws.cfg.output.dump_realization_flux {
        let verbose = RunOptions { record_flux: true, record_norm: true, ..Default::default() };
        let r0 =
            run_realization(&ws.psi0, &combined, &ws.stepper, derive(point_seed, 0), &verbose)?;
        row.realization0 = Some((
            r0.flux_series.expect("flux recording requested"),
            r0.norm_series.expect("norm recording requested"),
        ));
    }
    Ok(row)
}

fn row_from(sweep: f64, p_l: f64, n_res: &EnsembleResult, ln_res: &EnsembleResult) -> SrRow {
    SrRow {
        sweep,
        p_l,
        p_n: n_res.p_mean,
        p_n_std: n_res.p_std,
        p_ln: ln_res.p_mean,
        p_ln_std: ln_res.p_std,
        eta: ln_res.eta.unwrap_or(f64::NAN),
        eta_std: ln_res.eta_std.unwrap_or(f64::NAN),
        p_n_flux: n_res.p_flux_mean,
        p_ln_flux: ln_res.p_flux_mean,
        mean_flux_ln: ln_res.mean_flux.clone(),
        mean_flux_n: n_res.mean_flux.clone(),
        realization0: None,
    }
}

// ---------------------------------------------------------------------------
// ground-state

#[derive(Debug, Clone)]
pub struct GroundStateReport {
    pub energies: Vec<f64>,
    pub transitions: Vec<f64>,
}

pub fn run_ground_state(ws: &Workspace) -> GroundStateReport {
    let transitions = (0..ws.spectrum.energies.len()).map(|k| ws.spectrum.transition(k)).collect();
    GroundStateReport { energies: ws.spectrum.energies.clone(), transitions }
}

// ---------------------------------------------------------------------------
// laser-scan

#[derive(Debug, Clone)]
pub struct LaserScanRow {
    pub f0: f64,
    pub p: f64,
    pub p_flux: f64,
}

#[derive(Debug, Clone)]
pub struct LaserScan {
    pub rows: Vec<LaserScanRow>,
    /// (f0, single-trajectory flux series) for the requested amplitudes.
    pub profiles: Vec<(f64, StepSeries)>,
}

pub fn run_laser_scan(ws: &Workspace) -> Result<LaserScan, CliError> {
    let f0s = ws.cfg.laser_scan.f0_values.clone();
    progress(ExperimentKind::LaserScan, &format!("{} amplitudes, D = 0", f0s.len()));
    let runs: Vec<Result<LaserScanRow, CliError>> =
        ensemble::parallel_map(ws.cfg.ensemble.workers, f0s.len(), |i| {
            let pulse = ws.pulse(f0s[i], ws.cfg.laser.cycles)?;
            let schedule =
                FieldSchedule::simultaneous(vec![FieldSource::Laser(pulse)], pulse.duration)?;
            let res = run_realization(&ws.psi0, &schedule, &ws.stepper, 0, &RunOptions::default())?;
            Ok(LaserScanRow { f0: f0s[i], p: res.p, p_flux: res.p_flux })
        });
    let rows = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut profiles = Vec::new();
    for &f0 in &ws.cfg.laser_scan.flux_profile_f0s {
        let pulse = ws.pulse(f0, ws.cfg.laser.cycles)?;
        let schedule =
            FieldSchedule::simultaneous(vec![FieldSource::Laser(pulse)], pulse.duration)?;
        let opts = RunOptions { record_flux: true, ..Default::default() };
        let res = run_realization(&ws.psi0, &schedule, &ws.stepper, 0, &opts)?;
        profiles.push((f0, res.flux_series.expect("flux recording requested")));
    }
    Ok(LaserScan { rows, profiles })
}

// ---------------------------------------------------------------------------
// noise-scan (and the shared machinery for every eta sweep)

#[derive(Debug, Clone)]
pub struct NoiseScan {
    pub rows: Vec<SrRow>,
    /// Optional carrier-envelope-phase robustness families, one per value
    /// of `laser.cep_values`.
    pub cep_families: Vec<(f64, Vec<SrRow>)>,
}

fn eta_sweep(
    ws: &Workspace,
    kind: ExperimentKind,
    pulse: &LaserPulse,
    arrangement: Arrangement,
    noise_for: impl Fn(f64) -> Result<NoiseKind, CliError>,
    sweep_values: &[f64],
) -> Result<Vec<SrRow>, CliError> {
    let p_l = ws.laser_only_p(pulse)?;
    let record_flux = ws.cfg.output.write_flux_profiles;
    let mut rows = Vec::with_capacity(sweep_values.len());
    for (i, &value) in sweep_values.iter().enumerate() {
        progress(
            kind,
            &format!(
                "{} point {}/{} at {value:.4e}",
                arrangement.as_str(),
                i + 1,
                sweep_values.len()
            ),
        );
        let noise = noise_for(value)?;
        let point_seed = derive(ws.cfg.ensemble.base_seed, i as u64);
        let mut row = sr_point(ws, pulse, &noise, arrangement, p_l, point_seed, record_flux)?;
        row.sweep = value;
        rows.push(row);
    }
    Ok(rows)
}

pub fn run_noise_scan(ws: &Workspace) -> Result<NoiseScan, CliError> {
    let pulse = ws.pulse(ws.cfg.laser.f0, ws.cfg.laser.cycles)?;
    let rows = eta_sweep(
        ws,
        ExperimentKind::NoiseScan,
        &pulse,
        Arrangement::Simultaneous,
        |sqrt_d| Ok(NoiseKind::White { sqrt_d }),
        &ws.cfg.sweep.values(),
    )?;
    let mut cep_families = Vec::new();
    for &cep in &ws.cfg.laser.cep_values {
        progress(ExperimentKind::NoiseScan, &format!("carrier-envelope phase {cep}"));
        let pulse = ws.pulse_with_cep(ws.cfg.laser.f0, ws.cfg.laser.cycles, cep)?;
        let family = eta_sweep(
            ws,
            ExperimentKind::NoiseScan,
            &pulse,
            Arrangement::Simultaneous,
            |sqrt_d| Ok(NoiseKind::White { sqrt_d }),
            &ws.cfg.sweep.values(),
        )?;
        cep_families.push((cep, family));
    }
    Ok(NoiseScan { rows, cep_families })
}

// ---------------------------------------------------------------------------
// duration-scan

#[derive(Debug, Clone)]
pub struct DurationScan {
    pub families: Vec<(f64, Vec<SrRow>)>,
}

pub fn run_duration_scan(ws: &Workspace) -> Result<DurationScan, CliError> {
    let mut families = Vec::new();
    for &cycles in &ws.cfg.duration.cycles {
        progress(ExperimentKind::DurationScan, &format!("pulse duration {cycles} cycles"));
        let pulse = ws.pulse(ws.cfg.laser.f0, cycles)?;
        let rows = eta_sweep(
            ws,
            ExperimentKind::DurationScan,
            &pulse,
            Arrangement::Simultaneous,
            |sqrt_d| Ok(NoiseKind::White { sqrt_d }),
            &ws.cfg.sweep.values(),
        )?;
        families.push((cycles, rows));
    }
    Ok(DurationScan { families })
}

// ---------------------------------------------------------------------------
// f0-scan

#[derive(Debug, Clone)]
pub struct F0Scan {
    /// `sweep` holds F0 here; the noise amplitude is fixed.
    pub rows: Vec<SrRow>,
    pub sqrt_d: f64,
}

pub fn run_f0_scan(ws: &Workspace) -> Result<F0Scan, CliError> {
    let sqrt_d = ws.cfg.f0_scan.sqrt_d;
    let noise = NoiseKind::White { sqrt_d };
    let f0s = ws.cfg.f0_scan.f0_values.clone();
    let mut rows = Vec::with_capacity(f0s.len());
    // One shared noise-only ensemble: the stochastic reference does not
    // depend on the pulse amplitude.
    let pulse0 = ws.pulse(f0s[0], ws.cfg.laser.cycles)?;
    let noise_only = FieldSchedule::simultaneous(vec![noise.source()?], pulse0.duration)?;
    let seed = derive(ws.cfg.ensemble.base_seed, 0);
    let n_res = run_ensemble(
        &ws.psi0,
        &noise_only,
        &ws.stepper,
        &RunOptions::default(),
        &ws.ensemble_config(seed),
    )?;
    for (i, &f0) in f0s.iter().enumerate() {
        progress(ExperimentKind::F0Scan, &format!("point {}/{} at F0 = {f0}", i + 1, f0s.len()));
        let pulse = ws.pulse(f0, ws.cfg.laser.cycles)?;
        let p_l = ws.laser_only_p(&pulse)?;
        let combined = FieldSchedule::simultaneous(
            vec![FieldSource::Laser(pulse), noise.source()?],
            pulse.duration,
        )?;
        let mut ln_res = run_ensemble(
            &ws.psi0,
            &combined,
            &ws.stepper,
            &RunOptions::default(),
            &ws.ensemble_config(seed),
        )?;
        attach_eta(&mut ln_res, p_l, n_res.p_mean)?;
        let mut row = row_from(f0, p_l, &n_res, &ln_res);
        row.sweep = f0;
        rows.push(row);
    }
    Ok(F0Scan { rows, sqrt_d })
}

// ---------------------------------------------------------------------------
// chaotic-scan & holes

#[derive(Debug, Clone)]
pub struct ChaoticScan {
    /// `sweep` holds F_rms; `sqrt_d_equiv` the mapped white-noise amplitude.
    pub rows: Vec<SrRow>,
    pub sqrt_d_equiv: Vec<f64>,
}

pub fn run_chaotic_scan(ws: &Workspace) -> Result<ChaoticScan, CliError> {
    chaotic_scan_with_holes(ws, ExperimentKind::ChaoticScan, vec![])
}

fn chaotic_scan_with_holes(
    ws: &Workspace,
    kind: ExperimentKind,
    holes: Vec<SpectralHole>,
) -> Result<ChaoticScan, CliError> {
    let pulse = ws.pulse(ws.cfg.laser.f0, ws.cfg.laser.cycles)?;
    let f_rms_values: Vec<f64> =
        ws.cfg.sweep.values().iter().map(|s| ws.f_rms_for_sqrt_d(*s)).collect();
    let rows = eta_sweep(
        ws,
        kind,
        &pulse,
        Arrangement::Simultaneous,
        |f_rms| Ok(NoiseKind::Chaotic { spec: ws.chaotic_spec(f_rms, holes.clone())? }),
        &f_rms_values,
    )?;
    let sqrt_d_equiv = f_rms_values.iter().map(|f| ws.sqrt_d_equivalent(*f)).collect();
    Ok(ChaoticScan { rows, sqrt_d_equiv })
}

#[derive(Debug, Clone)]
pub struct HolesScan {
    pub centers: Vec<f64>,
    pub families: Vec<(f64, ChaoticScan)>,
}

pub fn run_holes_scan(ws: &Workspace) -> Result<HolesScan, CliError> {
    let centers = ws.hole_centers()?;
    let mut families = Vec::new();
    for &width in &ws.cfg.chaotic.hole_widths {
        progress(ExperimentKind::Holes, &format!("hole width {width}"));
        let holes: Vec<SpectralHole> =
            centers.iter().map(|&center| SpectralHole { center, width }).collect();
        let scan = chaotic_scan_with_holes(ws, ExperimentKind::Holes, holes)?;
        families.push((width, scan));
    }
    Ok(HolesScan { centers, families })
}

// ---------------------------------------------------------------------------
// delay

#[derive(Debug, Clone)]
pub struct DelayScan {
    pub families: Vec<(Arrangement, Vec<SrRow>)>,
}

pub fn run_delay_scan(ws: &Workspace) -> Result<DelayScan, CliError> {
    let pulse = ws.pulse(ws.cfg.laser.f0, ws.cfg.laser.cycles)?;
    let mut families = Vec::new();
    for name in &ws.cfg.delay.arrangements {
        let arrangement = Arrangement::parse(name)?;
        let rows = eta_sweep(
            ws,
            ExperimentKind::Delay,
            &pulse,
            arrangement,
            |sqrt_d| Ok(NoiseKind::White { sqrt_d }),
            &ws.cfg.sweep.values(),
        )?;
        families.push((arrangement, rows));
    }
    Ok(DelayScan { families })
}

// ---------------------------------------------------------------------------
// frag

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragVariant {
    /// Probe alone on the unperturbed atom.
    Bare,
    /// Probe on top of the driving pulse.
    Driven,
    /// White noise first, then the probe.
    NoiseThenProbe,
}

impl FragVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Bare => "bare",
            Self::Driven => "driven",
            Self::NoiseThenProbe => "noise-then-probe",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "bare" => Self::Bare,
            "driven" => Self::Driven,
            "noise-then-probe" => Self::NoiseThenProbe,
            other => return Err(CliError::Config(format!("unknown frag variant `{other}`"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct FragRow {
    pub variant: FragVariant,
    pub omega_p: f64,
    /// Ground-state depletion caused by the probe relative to the
    /// probe-free baseline of the same variant.
    pub depletion_gain: f64,
    /// Net absorbed energy relative to the same baseline.
    pub energy_gain: f64,
    pub ground_pop: f64,
    pub energy_absorbed: f64,
}

#[derive(Debug, Clone)]
pub struct FragScan {
    pub rows: Vec<FragRow>,
    pub omega_grid: Vec<f64>,
}

pub fn run_frag(ws: &Workspace) -> Result<FragScan, CliError> {
    let pump = ws.pulse(ws.cfg.laser.f0, ws.cfg.frag.cycles)?;
    let probe_amplitude = ws.cfg.probe.rel_amplitude * ws.cfg.laser.f0;
    let p = &ws.cfg.probe;
    let n_points = ((p.omega_max - p.omega_min) / p.omega_step).round() as usize + 1;
    let omega_grid: Vec<f64> =
        (0..n_points).map(|i| p.omega_min + i as f64 * p.omega_step).collect();
    let observe = RunOptions {
        ground: Some(GroundObserver::new(Arc::clone(&ws.psi0), ws.e0)),
        ..Default::default()
    };
    let t = pump.duration;
    let mut rows = Vec::new();

    for name in &ws.cfg.frag.variants {
        let variant = FragVariant::parse(name)?;
        progress(
            ExperimentKind::Frag,
            &format!("variant {} over {} probe frequencies", variant.as_str(), omega_grid.len()),
        );
        match variant {
            FragVariant::Bare | FragVariant::Driven => {
                // probe-free baseline
                let (dep0, en0) = match variant {
                    FragVariant::Bare => (0.0, 0.0),
                    _ => {
                        let base = FieldSchedule::simultaneous(vec![FieldSource::Laser(pump)], t)?;
                        let res = run_realization(&ws.psi0, &base, &ws.stepper, 0, &observe)?;
                        (
                            1.0 - res.ground_pop_final.expect("ground observer set"),
                            res.energy_absorbed.unwrap_or(0.0),
                        )
                    }
                };
                let point_rows: Vec<Result<FragRow, CliError>> =
                    ensemble::parallel_map(ws.cfg.ensemble.workers, omega_grid.len(), |i| {
                        let probe = ProbePulse::matching(&pump, probe_amplitude, omega_grid[i])?;
                        let mut sources = vec![FieldSource::Probe(probe)];
                        if variant == FragVariant::Driven {
                            sources.push(FieldSource::Laser(pump));
                        }
                        let schedule = FieldSchedule::simultaneous(sources, t)?;
                        let res = run_realization(&ws.psi0, &schedule, &ws.stepper, 0, &observe)?;
                        let pop = res.ground_pop_final.expect("ground observer set");
                        let energy = res.energy_absorbed.unwrap_or(0.0);
                        Ok(FragRow {
                            variant,
                            omega_p: omega_grid[i],
                            depletion_gain: (1.0 - pop) - dep0,
                            energy_gain: energy - en0,
                            ground_pop: pop,
                            energy_absorbed: energy,
                        })
                    });
                rows.extend(point_rows.into_iter().collect::<Result<Vec<_>, _>>()?);
            }
            FragVariant::NoiseThenProbe => {
                let noise = WhiteNoiseSpec::from_sqrt_d(ws.cfg.frag.noise_sqrt_d)?;
                let ens = EnsembleConfig {
                    n_realizations: ws.cfg.frag.noise_realizations,
                    base_seed: ws.cfg.ensemble.base_seed,
                    parallelism: ws.cfg.ensemble.workers,
                };
                // baseline: the noise window alone (trailing free evolution
                // only adds a phase)
                let base = FieldSchedule::simultaneous(vec![FieldSource::WhiteNoise(noise)], t)?;
                let base_res = run_ensemble(&ws.psi0, &base, &ws.stepper, &observe, &ens)?;
                let dep0 = 1.0 - base_res.ground_pop_mean.expect("ground observer set");
                let en0 = base_res.energy_absorbed_mean.unwrap_or(0.0);
                for (i, &omega_p) in omega_grid.iter().enumerate() {
                    if i % 8 == 0 {
                        progress(
                            ExperimentKind::Frag,
                            &format!("noise-then-probe point {}/{}", i + 1, omega_grid.len()),
                        );
                    }
                    let probe = ProbePulse::matching(&pump, probe_amplitude, omega_p)?;
                    let schedule = FieldSchedule::new(
                        vec![
                            ScheduleEntry {
                                source: FieldSource::WhiteNoise(noise),
                                t_start: 0.0,
                                t_stop: t,
                            },
                            ScheduleEntry {
                                source: FieldSource::Probe(probe),
                                t_start: t,
                                t_stop: 2.0 * t,
                            },
                        ],
                        2.0 * t,
                    )?;
                    let res = run_ensemble(&ws.psi0, &schedule, &ws.stepper, &observe, &ens)?;
                    let pop = res.ground_pop_mean.expect("ground observer set");
                    let energy = res.energy_absorbed_mean.unwrap_or(0.0);
                    rows.push(FragRow {
                        variant,
                        omega_p,
                        depletion_gain: (1.0 - pop) - dep0,
                        energy_gain: energy - en0,
                        ground_pop: pop,
                        energy_absorbed: energy,
                    });
                }
            }
        }
    }
    Ok(FragScan { rows, omega_grid })
}

// ---------------------------------------------------------------------------

/// Human-readable run summary appended to stderr at the end of a command.
pub fn summarize_sr_rows(rows: &[SrRow]) -> String {
    let mut out = String::new();
    if let Some(best) = rows.iter().max_by(|a, b| a.eta.total_cmp(&b.eta)) {
        let _ = write!(
            out,
            "max eta = {:.2} +- {:.2} at sweep = {:.4e}",
            best.eta, best.eta_std, best.sweep
        );
    }
    out
}
