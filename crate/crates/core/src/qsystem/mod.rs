//! Spatial grid, wavefunctions, the soft-core atom, and its bound spectrum.
//!
//! The atom is the regularized one-dimensional Coulomb potential
//! `V(x) = -1/sqrt(x^2 + a^2)`. Bound states are obtained by imaginary-time
//! relaxation of the same split-operator used for real-time propagation;
//! excited levels follow by Gram–Schmidt deflation against the converged
//! lower states. Computed spectra can be cached on disk (see [`cache`]).

pub mod cache;

use crate::error::CoreError;
use crate::fft::FftPlans;
use crate::rng;
use crate::Result;
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::Arc;

/// Uniform symmetric grid `x_j = -x_max + j*dx`, `j = 0..n_points`.
///
/// `n_points` must be a power of two for the spectral kinetic step. The
/// rightmost point is `x_max - dx` (periodic convention), and the momentum
/// grid spans `[-pi/dx, pi/dx)` with spacing `2*pi/(n_points*dx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    dx: f64,
}

impl SpatialGrid {
    pub fn symmetric(x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_max > 0.0) {
            return Err(CoreError::Config(format!("x_max must be positive, got {x_max}")));
        }
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(CoreError::Config(format!(
                "n_points must be a power of two >= 2, got {n_points}"
            )));
        }
        let dx = 2.0 * x_max / n_points as f64;
        Ok(Self { x_min: -x_max, x_max, n_points, dx })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Momentum grid in FFT order: `k_j = 2*pi*j/(n*dx)` for `j < n/2`,
    /// wrapped to negative values above.
    pub fn momenta(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = TAU / (n as f64 * self.dx);
        (0..n).map(|j| if j < n / 2 { j as f64 * dk } else { (j as f64 - n as f64) * dk }).collect()
    }

    /// Index of the grid point closest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((x - self.x_min) / self.dx).round();
        (j.max(0.0) as usize).min(self.n_points - 1)
    }
}

/// Complex amplitudes on a [`SpatialGrid`]; `sum |psi_j|^2 dx` is the norm².
#[derive(Debug, Clone)]
pub struct Wavefunction {
    pub amplitudes: Vec<Complex64>,
    grid: Arc<SpatialGrid>,
}

impl Wavefunction {
    pub fn zeros(grid: Arc<SpatialGrid>) -> Self {
        let n = grid.n_points();
        Self { amplitudes: vec![Complex64::default(); n], grid }
    }

    /// Normalized Gaussian `exp(-(x-x0)^2/(4 sigma^2) + i k0 x)` with
    /// position spread `<x^2> - <x>^2 = sigma^2`.
    pub fn gaussian(grid: Arc<SpatialGrid>, x0: f64, sigma: f64, k0: f64) -> Self {
        let mut wf = Self::zeros(grid);
        for (j, amp) in wf.amplitudes.iter_mut().enumerate() {
            let x = wf.grid.x(j);
            let arg = -((x - x0) * (x - x0)) / (4.0 * sigma * sigma);
            *amp = Complex64::from_polar(arg.exp(), k0 * x);
        }
        wf.normalize();
        wf
    }

    /// Random complex amplitudes, useful as a relaxation start state.
    pub fn random(grid: Arc<SpatialGrid>, seed: u64) -> Self {
        let mut r = rng::chacha(seed);
        let mut wf = Self::zeros(grid);
        for amp in wf.amplitudes.iter_mut() {
            *amp = Complex64::new(rng::uniform01(&mut r) - 0.5, rng::uniform01(&mut r) - 0.5);
        }
        wf.normalize();
        wf
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            for a in self.amplitudes.iter_mut() {
                *a *= inv;
            }
        }
    }

    /// `sum |psi(x) - parity*psi(-x)|^2 dx`; zero for a state of that parity.
    pub fn parity_defect(&self, parity: f64) -> f64 {
        let n = self.grid.n_points();
        let mut acc = 0.0;
        // x_j = -x_max + j dx mirrors onto index n - j; skip j = 0 (no partner).
        for j in 1..n {
            let d = self.amplitudes[j] - parity * self.amplitudes[n - j];
            acc += d.norm_sqr();
        }
        acc * self.grid.dx()
    }
}

/// Soft-core atom `V(x) = -1/sqrt(x^2 + a^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftCoreAtom {
    a_squared: f64,
}

impl SoftCoreAtom {
    pub fn new(a_squared: f64) -> Result<Self> {
        if !(a_squared > 0.0) {
            return Err(CoreError::Config(format!("a_squared must be positive, got {a_squared}")));
        }
        Ok(Self { a_squared })
    }

    pub fn a_squared(&self) -> f64 {
        self.a_squared
    }

    pub fn potential(&self, x: f64) -> f64 {
        -1.0 / (x * x + self.a_squared).sqrt()
    }

    pub fn potential_table(&self, grid: &SpatialGrid) -> Vec<f64> {
        (0..grid.n_points()).map(|j| self.potential(grid.x(j))).collect()
    }
}

/// Free function mirror of [`SoftCoreAtom::potential`].
pub fn soft_core_potential(atom: &SoftCoreAtom, x: f64) -> f64 {
    atom.potential(x)
}

/// Overlap `<phi|psi> = sum phi* psi dx`.
pub fn project(psi: &Wavefunction, phi: &Wavefunction) -> Result<Complex64> {
    if psi.grid != phi.grid {
        return Err(CoreError::GridMismatch);
    }
    let acc: Complex64 =
        phi.amplitudes.iter().zip(&psi.amplitudes).map(|(p, q)| p.conj() * q).sum();
    Ok(acc * psi.grid.dx())
}

/// The lowest bound levels, energies strictly increasing and all negative.
#[derive(Debug, Clone)]
pub struct StationarySpectrum {
    pub energies: Vec<f64>,
    pub states: Vec<Wavefunction>,
}

impl StationarySpectrum {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn ground(&self) -> &Wavefunction {
        &self.states[0]
    }

    /// Transition frequency `E_k - E_0`.
    pub fn transition(&self, k: usize) -> f64 {
        self.energies[k] - self.energies[0]
    }
}

/// Options for imaginary-time relaxation.
#[derive(Debug, Clone, Copy)]
pub struct RelaxOptions {
    /// Imaginary time step.
    pub dt_imag: f64,
    /// Stop when the energy estimate changes by less than this between
    /// successive normalization cycles.
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self { dt_imag: 0.05, tol: 1e-10, max_steps: 200_000 }
    }
}

/// `<psi|p^2/2 + V|psi> / <psi|psi>` via one spectral derivative.
pub fn energy_expectation(psi: &Wavefunction, potential: &[f64], plans: &FftPlans) -> f64 {
    let grid = psi.grid();
    let mut buf = psi.amplitudes.clone();
    let mut scratch = vec![Complex64::default(); plans.scratch_len()];
    plans.forward(&mut buf, &mut scratch);
    let momenta = grid.momenta();
    let mut kin = 0.0;
    let mut den = 0.0;
    for (a, k) in buf.iter().zip(&momenta) {
        let w = a.norm_sqr();
        kin += 0.5 * k * k * w;
        den += w;
    }
    let mut pot = 0.0;
    let mut nrm = 0.0;
    for (a, v) in psi.amplitudes.iter().zip(potential) {
        let w = a.norm_sqr();
        pot += v * w;
        nrm += w;
    }
    kin / den + pot / nrm
}

struct ImagStepper {
    plans: FftPlans,
    kin_half: Vec<f64>,
    pot_full: Vec<f64>,
    scratch: Vec<Complex64>,
}

impl ImagStepper {
    fn new(grid: &SpatialGrid, potential: &[f64], dt: f64) -> Self {
        let plans = FftPlans::new(grid.n_points());
        let inv_n = 1.0 / grid.n_points() as f64;
        let kin_half =
            grid.momenta().iter().map(|k| (-0.5 * k * k * 0.5 * dt).exp() * inv_n).collect();
        let pot_full = potential.iter().map(|v| (-v * dt).exp()).collect();
        let scratch = vec![Complex64::default(); plans.scratch_len()];
        Self { plans, kin_half, pot_full, scratch }
    }

    fn step(&mut self, psi: &mut Wavefunction) {
        let buf = &mut psi.amplitudes;
        self.plans.forward(buf, &mut self.scratch);
        for (a, f) in buf.iter_mut().zip(&self.kin_half) {
            *a *= *f;
        }
        self.plans.inverse(buf, &mut self.scratch);
        for (a, f) in buf.iter_mut().zip(&self.pot_full) {
            *a *= *f;
        }
        self.plans.forward(buf, &mut self.scratch);
        for (a, f) in buf.iter_mut().zip(&self.kin_half) {
            *a *= *f;
        }
        self.plans.inverse(buf, &mut self.scratch);
        psi.normalize();
    }
}

fn relax_state(
    start: Wavefunction,
    potential: &[f64],
    lower: &[Wavefunction],
    opts: &RelaxOptions,
) -> Result<(f64, Wavefunction)> {
    let grid = Arc::clone(start.grid());
    let mut stepper = ImagStepper::new(&grid, potential, opts.dt_imag);
    let plans = FftPlans::new(grid.n_points());
    let mut psi = start;
    orthogonalize(&mut psi, lower)?;
    psi.normalize();
    let mut energy = energy_expectation(&psi, potential, &plans);
    for step in 1..=opts.max_steps {
        stepper.step(&mut psi);
        if !lower.is_empty() {
            orthogonalize(&mut psi, lower)?;
            psi.normalize();
        }
        let next = energy_expectation(&psi, potential, &plans);
        let delta = (next - energy).abs();
        energy = next;
        if delta < opts.tol {
            return Ok((energy, psi));
        }
        if !energy.is_finite() {
            return Err(CoreError::NonFinite { step });
        }
    }
    Err(CoreError::NotConverged { steps: opts.max_steps, last_energy: energy })
}

fn orthogonalize(psi: &mut Wavefunction, lower: &[Wavefunction]) -> Result<()> {
    for phi in lower {
        let c = project(psi, phi)?;
        for (a, b) in psi.amplitudes.iter_mut().zip(&phi.amplitudes) {
            *a -= c * b;
        }
    }
    Ok(())
}

/// Relax to the ground state from a Gaussian start.
pub fn relax_ground_state(
    grid: &Arc<SpatialGrid>,
    atom: &SoftCoreAtom,
    opts: &RelaxOptions,
) -> Result<(f64, Wavefunction)> {
    let start = Wavefunction::gaussian(Arc::clone(grid), 0.0, 2.0, 0.0);
    relax_ground_state_from(start, atom, opts)
}

/// Relax to the ground state from an arbitrary start state (any state with
/// nonzero ground-state overlap converges to the same fixed point).
pub fn relax_ground_state_from(
    start: Wavefunction,
    atom: &SoftCoreAtom,
    opts: &RelaxOptions,
) -> Result<(f64, Wavefunction)> {
    if !(opts.dt_imag > 0.0) || !(opts.tol > 0.0) {
        return Err(CoreError::Config("relaxation needs dt_imag > 0 and tol > 0".into()));
    }
    let potential = atom.potential_table(start.grid());
    relax_state(start, &potential, &[], opts)
}

/// Lowest `n_levels` bound states by deflated imaginary-time relaxation.
///
/// Start states `x^l exp(-x^2/8)` seed the alternating parity ladder; each
/// level is kept orthogonal to all converged ones while it relaxes. Levels
/// that converge to non-negative energy are not bound on this grid and
/// trigger a shortfall error.
pub fn bound_spectrum(
    grid: &Arc<SpatialGrid>,
    atom: &SoftCoreAtom,
    n_levels: usize,
    opts: &RelaxOptions,
) -> Result<StationarySpectrum> {
    if n_levels == 0 {
        return Err(CoreError::Config("n_levels must be at least 1".into()));
    }
    let potential = atom.potential_table(grid);
    let mut energies = Vec::with_capacity(n_levels);
    let mut states: Vec<Wavefunction> = Vec::with_capacity(n_levels);
    for level in 0..n_levels {
        let mut start = Wavefunction::zeros(Arc::clone(grid));
        for (j, amp) in start.amplitudes.iter_mut().enumerate() {
            let x = grid.x(j);
            *amp = Complex64::new(x.powi(level as i32) * (-x * x / 8.0).exp(), 0.0);
        }
        start.normalize();
        let (energy, psi) = relax_state(start, &potential, &states, opts)?;
        if energy >= 0.0 {
            return Err(CoreError::BoundStateShortfall { found: level, requested: n_levels });
        }
        if let Some(&prev) = energies.last() {
            if energy <= prev {
                return Err(CoreError::Config(format!(
                    "deflation produced non-increasing energies ({prev} then {energy})"
                )));
            }
        }
        energies.push(energy);
        states.push(psi);
    }
    Ok(StationarySpectrum { energies, states })
}
