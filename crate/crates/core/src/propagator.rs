//! Stochastic split-operator time stepper with absorbing boundary.
//!
//! One step advances the wavefunction by `dt` as
//!
//! ```text
//! psi <- exp(-i p^2/2 dt/2) exp(-i V_eff(x) dt) exp(-i p^2/2 dt/2) psi
//! V_eff(x) = V(x) + x * [ F(t_mid) + sqrt(2 D / dt) X ]
//! ```
//!
//! with the kinetic half steps applied in momentum space, the deterministic
//! field evaluated at the step midpoint, and `X` a standard normal drawn
//! once per step while a white-noise window is active (the Stratonovich
//! reading of the noise integral). Every factor is a pure phase, so the step
//! is unitary to rounding; the absorbing mask applied after the second
//! kinetic half step is the only nonunitary element, and the norm it removes
//! at each grid edge is tallied as the ionization record.

use crate::error::CoreError;
use crate::fft::FftPlans;
use crate::fields::{FieldSchedule, RealizedSchedule};
use crate::qsystem::{SpatialGrid, Wavefunction};
use crate::Result;
use num_complex::Complex64;
use std::sync::Arc;

/// Points per exact phase anchor in the dipole-phase recurrence; in between,
/// `exp(-i c x_j)` advances by complex rotation.
const PHASE_ANCHOR: usize = 128;

/// Drift-out steps between early-termination checks.
const TAIL_CHECK_STRIDE: usize = 64;

/// Interior norm beyond `x_r/2` below which drift-out stops early.
const TAIL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    /// Time step.
    pub dt: f64,
    /// Absorbing band width at each grid edge.
    pub absorber_width: f64,
    /// Exponent of the cosine mask; `0` disables absorption entirely.
    pub absorber_strength: f64,
    /// Flux probe position (snapped to the nearest grid point).
    pub x_r: f64,
    /// Extra field-free propagation after the schedule ends.
    pub drift_out_time: f64,
}

impl Default for PropagatorConfig {
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

impl PropagatorConfig {
    pub fn validate(&self, grid: &SpatialGrid) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(CoreError::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.absorber_width > 0.0) {
            return Err(CoreError::Config(format!(
                "absorber_width must be > 0, got {}",
                self.absorber_width
            )));
        }
        if self.absorber_strength < 0.0 {
            return Err(CoreError::Config("absorber_strength must be >= 0".into()));
        }
        if !(self.x_r < grid.x_max() - self.absorber_width) {
            return Err(CoreError::Config(format!(
                "flux probe x_r = {} must sit inside the absorber-free interior (|x| < {})",
                self.x_r,
                grid.x_max() - self.absorber_width
            )));
        }
        if self.drift_out_time < 0.0 {
            return Err(CoreError::Config("drift_out_time must be >= 0".into()));
        }
        Ok(())
    }
}

/// Multiplicative damping factors: 1 in the interior, falling as
/// `cos(pi s / 2)^strength` over the normalized depth `s` of the last
/// `absorber_width` at each edge. Zero strength gives an all-ones mask.
pub fn absorber_mask(grid: &SpatialGrid, cfg: &PropagatorConfig) -> Vec<f64> {
    let edge = grid.x_max() - cfg.absorber_width;
    (0..grid.n_points())
        .map(|j| {
            let depth = grid.x(j).abs() - edge;
            if depth <= 0.0 || cfg.absorber_strength == 0.0 {
                1.0
            } else {
                let s = (depth / cfg.absorber_width).min(1.0);
                (std::f64::consts::FRAC_PI_2 * s).cos().powf(cfg.absorber_strength)
            }
        })
        .collect()
}

/// Uniformly sampled scalar time series `values[k]` at `t0 + k*dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSeries {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl StepSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(k, v)| (self.time(k), *v))
    }

    /// Trapezoidal integral over the whole series.
    pub fn trapezoid(&self) -> f64 {
        if self.values.len() < 2 {
            return 0.0;
        }
        let inner: f64 = self.values[1..self.values.len() - 1].iter().sum();
        self.dt * (inner + 0.5 * (self.values[0] + self.values[self.values.len() - 1]))
    }
}

/// Ground-state bookkeeping attached to a run.
#[derive(Debug, Clone)]
pub struct GroundObserver {
    pub state: Arc<Wavefunction>,
    pub e0: f64,
    /// Steps between ground-population samples.
    pub stride: usize,
}

impl GroundObserver {
    pub fn new(state: Arc<Wavefunction>, e0: f64) -> Self {
        Self { state, e0, stride: 50 }
    }
}

/// What a realization records beyond the integrated observables.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub record_flux: bool,
    pub record_norm: bool,
    pub ground: Option<GroundObserver>,
    /// Pre-drawn standard normals consumed instead of the seeded kick
    /// stream, one per scheduled step (refinement studies).
    pub kicks: Option<Arc<Vec<f64>>>,
}

/// Integrated observables of one trajectory.
#[derive(Debug, Clone)]
pub struct RealizationResult {
    pub seed: u64,
    /// Ionization probability by the edge-absorbed-norm convention
    /// (`absorbed_left + absorbed_right`).
    pub p: f64,
    /// Cross-check: time integral of the flux through `+x_r`, clamped at 0.
    pub p_flux: f64,
    pub absorbed_left: f64,
    pub absorbed_right: f64,
    pub final_norm: f64,
    pub ground_pop_final: Option<f64>,
    pub energy_absorbed: Option<f64>,
    pub flux_series: Option<StepSeries>,
    pub norm_series: Option<StepSeries>,
    pub ground_pop_series: Option<StepSeries>,
    pub steps: usize,
}

/// Precomputed tables for stepping one grid/potential/config combination.
/// Immutable and shareable across workers.
pub struct Stepper {
    grid: Arc<SpatialGrid>,
    cfg: PropagatorConfig,
    plans: FftPlans,
    potential: Vec<f64>,
    /// `exp(-i k^2/2 dt/2) / n` (one 1/n per FFT round trip).
    kin_half: Vec<Complex64>,
    /// `exp(-i V(x) dt)`.
    v_phase: Vec<Complex64>,
    mask: Vec<f64>,
    /// Index ranges where the mask is below one.
    left_band: std::ops::Range<usize>,
    right_band: std::ops::Range<usize>,
    ix_r: usize,
    /// Index ranges with `|x| >= x_r/2` for the drift-out tail check.
    tail_left: std::ops::Range<usize>,
    tail_right: std::ops::Range<usize>,
}

impl Stepper {
    pub fn new(grid: Arc<SpatialGrid>, potential: Vec<f64>, cfg: PropagatorConfig) -> Result<Self> {
        cfg.validate(&grid)?;
        if potential.len() != grid.n_points() {
            return Err(CoreError::Config("potential table does not match the grid".into()));
        }
        let n = grid.n_points();
        let plans = FftPlans::new(n);
        let inv_n = 1.0 / n as f64;
        let kin_half = grid
            .momenta()
            .iter()
            .map(|k| Complex64::from_polar(inv_n, -0.5 * k * k * 0.5 * cfg.dt))
            .collect();
        let v_phase = potential.iter().map(|v| Complex64::from_polar(1.0, -v * cfg.dt)).collect();
        let mask = absorber_mask(&grid, &cfg);
        let left_end = mask.iter().position(|m| *m >= 1.0).unwrap_or(n);
        let right_start = mask.iter().rposition(|m| *m >= 1.0).map_or(0, |j| j + 1);
        let ix_r = grid.nearest_index(cfg.x_r);
        let tail_left = 0..grid.nearest_index(-0.5 * cfg.x_r);
        let tail_right = grid.nearest_index(0.5 * cfg.x_r)..n;
        Ok(Self {
            grid,
            cfg,
            plans,
            potential,
            kin_half,
            v_phase,
            mask,
            left_band: 0..left_end,
            right_band: right_start..n,
            ix_r,
            tail_left,
            tail_right,
        })
    }

    pub fn for_atom(
        grid: &Arc<SpatialGrid>,
        atom: &crate::qsystem::SoftCoreAtom,
        cfg: PropagatorConfig,
    ) -> Result<Self> {
        Stepper::new(Arc::clone(grid), atom.potential_table(grid), cfg)
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn config(&self) -> &PropagatorConfig {
        &self.cfg
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn flux_index(&self) -> usize {
        self.ix_r
    }

    pub fn make_scratch(&self) -> Vec<Complex64> {
        vec![Complex64::default(); self.plans.scratch_len()]
    }

    /// One unitary step under the instantaneous effective dipole field
    /// (deterministic field at the midpoint plus any noise kick). The
    /// absorber is not applied here.
    pub fn step_fields(&self, psi: &mut Wavefunction, scratch: &mut [Complex64], eff_field: f64) {
        let buf = &mut psi.amplitudes;
        self.plans.forward(buf, scratch);
        for (a, f) in buf.iter_mut().zip(&self.kin_half) {
            *a *= *f;
        }
        self.plans.inverse(buf, scratch);
        let c = eff_field * self.cfg.dt;
        if c != 0.0 {
            // exp(-i c x_j) by per-point rotation, re-anchored every
            // PHASE_ANCHOR points to keep the modulus at 1.
            let rot = Complex64::from_polar(1.0, -c * self.grid.dx());
            for (chunk_idx, (chunk, vchunk)) in
                buf.chunks_mut(PHASE_ANCHOR).zip(self.v_phase.chunks(PHASE_ANCHOR)).enumerate()
            {
                let x0 = self.grid.x(chunk_idx * PHASE_ANCHOR);
                let mut cur = Complex64::from_polar(1.0, -c * x0);
                for (a, v) in chunk.iter_mut().zip(vchunk) {
                    *a *= *v * cur;
                    cur *= rot;
                }
            }
        } else {
            for (a, v) in buf.iter_mut().zip(&self.v_phase) {
                *a *= *v;
            }
        }
        self.plans.forward(buf, scratch);
        for (a, f) in buf.iter_mut().zip(&self.kin_half) {
            *a *= *f;
        }
        self.plans.inverse(buf, scratch);
    }

    /// Apply the absorbing mask; returns the probability removed at the
    /// (left, right) edge this step.
    pub fn apply_absorber(&self, psi: &mut Wavefunction) -> (f64, f64) {
        if self.cfg.absorber_strength == 0.0 {
            return (0.0, 0.0);
        }
        let dx = self.grid.dx();
        let buf = &mut psi.amplitudes;
        let mut removed = [0.0; 2];
        for (side, band) in
            [self.left_band.clone(), self.right_band.clone()].into_iter().enumerate()
        {
            let mut acc = 0.0;
            for j in band {
                let m = self.mask[j];
                acc += buf[j].norm_sqr() * (1.0 - m * m);
                buf[j] *= m;
            }
            removed[side] = acc * dx;
        }
        (removed[0], removed[1])
    }

    /// Probability current `Re[psi* (-i d/dx) psi]` at the probe point,
    /// 3-point central difference.
    pub fn flux(&self, psi: &Wavefunction) -> f64 {
        crate::observables::probability_current(psi, self.grid.x(self.ix_r))
    }

    fn tail_norm(&self, psi: &Wavefunction) -> f64 {
        let buf = &psi.amplitudes;
        let sum: f64 = buf[self.tail_left.clone()]
            .iter()
            .chain(&buf[self.tail_right.clone()])
            .map(|a| a.norm_sqr())
            .sum();
        sum * self.grid.dx()
    }
}

/// Propagate one realization of `schedule` from `psi0`: the scheduled window
/// first, then field-free drift-out so late slow electrons still reach the
/// probe/absorber (cut short once the norm beyond `x_r/2` falls below 1e-12).
pub fn run_realization(
    psi0: &Wavefunction,
    schedule: &FieldSchedule,
    stepper: &Stepper,
    seed: u64,
    opts: &RunOptions,
) -> Result<RealizationResult> {
    if psi0.grid() != &stepper.grid {
        return Err(CoreError::GridMismatch);
    }
    let dt = stepper.cfg.dt;
    let realized: RealizedSchedule = schedule.realize(seed)?;
    let n_main = (realized.total_duration() / dt).ceil() as usize;
    let n_drift = (stepper.cfg.drift_out_time / dt).ceil() as usize;
    if let Some(kicks) = &opts.kicks {
        if kicks.len() < n_main {
            return Err(CoreError::Config(format!(
                "kick override holds {} values, schedule needs {n_main}",
                kicks.len()
            )));
        }
    }
    let field_mid = realized.sample_midpoints(dt, n_main);
    let has_noise = realized.has_noise();
    let mut gauss = realized.kick_stream();

    let mut psi = psi0.clone();
    let mut scratch = stepper.make_scratch();
    let mut absorbed_left = 0.0;
    let mut absorbed_right = 0.0;

    let mut flux_values = opts.record_flux.then(|| Vec::with_capacity(n_main + n_drift + 1));
    let mut norm_values = opts.record_norm.then(|| Vec::with_capacity(n_main + n_drift + 1));
    let mut pop_values: Option<Vec<f64>> = None;
    let mut prev_flux = stepper.flux(&psi);
    let mut p_flux_acc = 0.0;
    if let Some(v) = flux_values.as_mut() {
        v.push(prev_flux);
    }
    let mut norm = psi.norm_sq();
    if let Some(v) = norm_values.as_mut() {
        v.push(norm);
    }
    if let Some(g) = &opts.ground {
        if g.stride > 0 {
            let p0 = crate::qsystem::project(&psi, &g.state)?.norm_sqr();
            pop_values = Some(vec![p0]);
        }
    }

    let mut steps = 0usize;
    for phase in 0..2 {
        let n_phase = if phase == 0 { n_main } else { n_drift };
        for k in 0..n_phase {
            let mut eff = 0.0;
            if phase == 0 {
                eff = field_mid[k];
                if has_noise {
                    let x = match &opts.kicks {
                        Some(kicks) => kicks[k],
                        None => gauss.next_normal(),
                    };
                    let t_mid = (k as f64 + 0.5) * dt;
                    let rate = realized.noise_variance_rate(t_mid);
                    if rate > 0.0 {
                        eff += (rate / dt).sqrt() * x;
                    }
                }
            }
            stepper.step_fields(&mut psi, &mut scratch, eff);
            let (dl, dr) = stepper.apply_absorber(&mut psi);
            absorbed_left += dl;
            absorbed_right += dr;
            steps += 1;

            let f = stepper.flux(&psi);
            p_flux_acc += 0.5 * (prev_flux + f) * dt;
            prev_flux = f;
            norm = psi.norm_sq();
            if !norm.is_finite() {
                return Err(CoreError::NonFinite { step: steps });
            }
            if let Some(v) = flux_values.as_mut() {
                v.push(f);
            }
            if let Some(v) = norm_values.as_mut() {
                v.push(norm);
            }
            if let (Some(v), Some(g)) = (pop_values.as_mut(), &opts.ground) {
                if steps.is_multiple_of(g.stride) {
                    v.push(crate::qsystem::project(&psi, &g.state)?.norm_sqr());
                }
            }
            if phase == 1
                && (k + 1).is_multiple_of(TAIL_CHECK_STRIDE)
                && stepper.tail_norm(&psi) < TAIL_EPS
            {
                break;
            }
        }
    }

    let (ground_pop_final, energy_absorbed) = match &opts.ground {
        Some(g) => {
            let pop = crate::qsystem::project(&psi, &g.state)?.norm_sqr();
            let energy = crate::observables::energy_absorbed(&psi, &stepper.potential, g.e0).ok();
            (Some(pop), energy)
        }
        None => (None, None),
    };

    let series = |values: Option<Vec<f64>>| values.map(|v| StepSeries { t0: 0.0, dt, values: v });
    let pop_series = pop_values.map(|v| StepSeries {
        t0: 0.0,
        dt: dt * opts.ground.as_ref().map_or(1, |g| g.stride) as f64,
        values: v,
    });
    Ok(RealizationResult {
        seed,
        p: absorbed_left + absorbed_right,
        p_flux: p_flux_acc.max(0.0),
        absorbed_left,
        absorbed_right,
        final_norm: norm,
        ground_pop_final,
        energy_absorbed,
        flux_series: series(flux_values),
        norm_series: series(norm_values),
        ground_pop_series: pop_series,
        steps,
    })
}
