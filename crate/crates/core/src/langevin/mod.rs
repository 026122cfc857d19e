//! Semiclassical Langevin dynamics of bare and polariton modes.
//!
//! Each mode follows the complex Ornstein–Uhlenbeck equation
//!
//! ```text
//!     dA = (−iω − γ/2) A dt + √(γ n̄) dξ,   ⟨dξ* dξ⟩ = dt
//! ```
//!
//! so ⟨|A|²⟩ relaxes to the normally ordered occupation n̄ at rate γ. Noise
//! on different modes is independent. Trajectory `k` draws from stream `k`
//! of a ChaCha8 generator keyed by the master seed, and ensemble sums are
//! merged in trajectory order, so results do not depend on thread count.

mod spectral;
mod stats;

pub use spectral::{fit_lorentzian, periodogram, steady_periodogram, LorentzianFit, Periodogram};
pub use stats::{Moments, Stat};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectrum::{Branch, PolaritonSpectrum};
use crate::sta::Schedule;
use crate::thermo::{polariton_occupation, BathSpec};

/// Upper bound on dt·max(|ω|, γ).
pub const STABILITY_LIMIT: f64 = 0.1;
/// Trajectories per parallel work unit.
const CHUNK: usize = 64;

/// One damped mode: rotation frequency, damping rate and bath occupation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeNoise<T> {
    pub frequency: T,
    pub damping: T,
    pub occupation: T,
}

impl<T: Real> ModeNoise<T> {
    pub fn validate(&self) -> Result<()> {
        if !self.frequency.is_finite() {
            return Err(Error::invalid("frequency", "must be finite"));
        }
        if !(self.damping > T::zero() && self.damping.is_finite()) {
            return Err(Error::invalid("damping", format!("must be positive, got {}", self.damping)));
        }
        if !(self.occupation >= T::zero() && self.occupation.is_finite()) {
            return Err(Error::invalid("occupation", format!("must be >= 0, got {}", self.occupation)));
        }
        Ok(())
    }
}

/// Independent noise on each mode, plus the master seed.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec<T> {
    pub modes: Vec<ModeNoise<T>>,
    pub seed: u64,
}

/// γ_eff = X_a² γ_photon + (X_c² + X_d²) γ_phonon.
pub fn effective_damping<T: Real>(weights: [T; 3], photon_decay: T, phonon_decay: T) -> T {
    let [xa, xc, xd] = weights;
    xa * xa * photon_decay + (xc * xc + xd * xd) * phonon_decay
}

/// Branch as a single damped mode: ω of the branch, γ_eff and the
/// Hopfield-weighted phonon-bath occupation.
pub fn polariton_mode<T: Real>(spectrum: &PolaritonSpectrum<T>, branch: Branch, baths: &BathSpec<T>) -> Result<ModeNoise<T>> {
    Ok(ModeNoise {
        frequency: spectrum.frequency(branch),
        damping: effective_damping(spectrum.weights(branch), baths.photon_decay, baths.phonon_decay),
        occupation: polariton_occupation(spectrum, baths, branch)?,
    })
}

/// Discrete update rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Stepper {
    /// A' = e^{−iω dt}[A(1 − γdt/2) + √(γ n̄ dt) ξ]
    #[default]
    EulerMaruyama,
    /// A' = A e^{(−iω − γ/2)dt} + √(n̄(1 − e^{−γdt})) ξ, free of discretization bias.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationOptions<T> {
    pub dt: T,
    pub steps: usize,
    pub trajectories: usize,
    /// Statistics are recorded every this many steps, and at t = 0.
    pub record_every: usize,
    pub stepper: Stepper,
}

impl<T: Real> SimulationOptions<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if self.trajectories == 0 {
            return Err(Error::invalid("trajectories", "must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every", "must be at least 1"));
        }
        Ok(())
    }

    pub fn horizon(&self) -> T {
        self.dt * T::lit(self.steps as f64)
    }

    fn records(&self) -> usize {
        self.steps / self.record_every + 1
    }
}

/// Amplitudes at t = 0.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState<T> {
    Vacuum,
    /// Complex Gaussian with the bath occupation of each mode.
    Stationary,
    /// Complex Gaussian with the given occupation per mode.
    Thermal(Vec<T>),
    Amplitudes(Vec<Complex<T>>),
}

/// Re and Im parts of a complex moment, per record.
pub type ComplexStat<T> = (Vec<Stat<T>>, Vec<Stat<T>>);

/// Ensemble statistics at the record times.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryEnsemble<T> {
    pub times: Vec<T>,
    /// ⟨|A_m|²⟩ per mode, per record.
    pub occupation: Vec<Vec<Stat<T>>>,
    /// Re and Im of ⟨A_0* A_1⟩ per record, for two or more modes.
    pub cross: Option<ComplexStat<T>>,
    /// Σ_m ω_m |A_m|² per record.
    pub energy: Vec<Stat<T>>,
    /// Work, heat and energy change over each record interval (length records − 1).
    pub work_increments: Vec<Stat<T>>,
    pub heat_increments: Vec<Stat<T>>,
    pub energy_increments: Vec<Stat<T>>,
    pub total_work: Stat<T>,
    pub total_heat: Stat<T>,
    /// E(T) − E(0) − Q + W per trajectory.
    pub first_law_residual: Stat<T>,
    pub trajectories: usize,
    pub dt: T,
    pub record_every: usize,
}

/// Rates averaged over one record interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatWorkRate<T> {
    pub t_start: T,
    pub t_end: T,
    pub work_rate: Stat<T>,
    pub heat_rate: Stat<T>,
    pub energy_rate: Stat<T>,
}

/// dW/dt, dQ/dt and dE/dt per record interval, with dE = dQ − dW per step.
pub fn heat_work_rates<T: Real>(ensemble: &TrajectoryEnsemble<T>) -> Vec<HeatWorkRate<T>> {
    let scale = |s: &Stat<T>, dt: T| Stat { mean: s.mean / dt, std_err: s.std_err / dt, count: s.count };
    (1..ensemble.times.len())
        .map(|r| {
            let (t0, t1) = (ensemble.times[r - 1], ensemble.times[r]);
            let span = t1 - t0;
            HeatWorkRate {
                t_start: t0,
                t_end: t1,
                work_rate: scale(&ensemble.work_increments[r - 1], span),
                heat_rate: scale(&ensemble.heat_increments[r - 1], span),
                energy_rate: scale(&ensemble.energy_increments[r - 1], span),
            }
        })
        .collect()
}

pub(crate) fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T>
where
    StandardNormal: Distribution<T>,
{
    let re: T = StandardNormal.sample(rng);
    let im: T = StandardNormal.sample(rng);
    Complex::new(re, im) * T::half().sqrt()
}

pub(crate) fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Per-step linear factor and noise amplitude.
#[derive(Clone, Copy)]
pub(crate) struct StepCoefficients<T> {
    pub(crate) factor: Complex<T>,
    pub(crate) noise: Complex<T>,
}

pub(crate) fn step_coefficients<T: Real>(stepper: Stepper, omega: T, mode: &ModeNoise<T>, dt: T) -> StepCoefficients<T> {
    let rotation = Complex::new(T::zero(), -omega * dt).exp();
    let g = mode.damping;
    match stepper {
        Stepper::Exact => StepCoefficients {
            factor: rotation * (-g * dt * T::half()).exp(),
            noise: Complex::new((mode.occupation * -(-g * dt).exp_m1()).sqrt(), T::zero()),
        },
        Stepper::EulerMaruyama => StepCoefficients {
            factor: rotation * (T::one() - g * dt * T::half()),
            noise: rotation * (g * mode.occupation * dt).sqrt(),
        },
    }
}

pub(crate) fn check_stability<T: Real>(dt: T, omega: T, damping: T) -> Result<()> {
    let product = dt * omega.abs().max(damping);
    if !(product < T::lit(STABILITY_LIMIT)) {
        return Err(Error::Stability { product: product.as_f64(), limit: STABILITY_LIMIT });
    }
    Ok(())
}

pub(crate) fn initial_amplitudes<T: Real, R: Rng + ?Sized>(
    init: &InitialState<T>,
    modes: &[ModeNoise<T>],
    rng: &mut R,
) -> Vec<Complex<T>>
where
    StandardNormal: Distribution<T>,
{
    match init {
        InitialState::Vacuum => vec![Complex::new(T::zero(), T::zero()); modes.len()],
        InitialState::Stationary => modes.iter().map(|m| complex_gaussian(rng) * m.occupation.sqrt()).collect(),
        InitialState::Thermal(n) => n.iter().map(|n| complex_gaussian(rng) * n.sqrt()).collect(),
        InitialState::Amplitudes(a) => a.clone(),
    }
}

fn validate_initial<T: Real>(init: &InitialState<T>, n_modes: usize) -> Result<()> {
    let len = match init {
        InitialState::Thermal(n) => {
            if n.iter().any(|x| !(*x >= T::zero())) {
                return Err(Error::invalid("initial_state", "occupations must be >= 0"));
            }
            n.len()
        }
        InitialState::Amplitudes(a) => a.len(),
        _ => n_modes,
    };
    if len != n_modes {
        return Err(Error::invalid("initial_state", format!("expected {n_modes} modes, got {len}")));
    }
    Ok(())
}

/// Per-chunk accumulators.
#[derive(Clone)]
struct Accumulator<T> {
    occupation: Vec<Vec<Moments<T>>>,
    cross_re: Vec<Moments<T>>,
    cross_im: Vec<Moments<T>>,
    energy: Vec<Moments<T>>,
    work: Vec<Moments<T>>,
    heat: Vec<Moments<T>>,
    denergy: Vec<Moments<T>>,
    total_work: Moments<T>,
    total_heat: Moments<T>,
    residual: Moments<T>,
}

impl<T: Real> Accumulator<T> {
    fn new(modes: usize, records: usize) -> Self {
        let row = |n: usize| vec![Moments::new(); n];
        Self {
            occupation: vec![row(records); modes],
            cross_re: row(if modes > 1 { records } else { 0 }),
            cross_im: row(if modes > 1 { records } else { 0 }),
            energy: row(records),
            work: row(records.saturating_sub(1)),
            heat: row(records.saturating_sub(1)),
            denergy: row(records.saturating_sub(1)),
            total_work: Moments::new(),
            total_heat: Moments::new(),
            residual: Moments::new(),
        }
    }

    fn merge(&mut self, other: &Self) {
        let zip = |a: &mut Vec<Moments<T>>, b: &Vec<Moments<T>>| a.iter_mut().zip(b).for_each(|(x, y)| x.merge(y));
        for (a, b) in self.occupation.iter_mut().zip(&other.occupation) {
            zip(a, b);
        }
        zip(&mut self.cross_re, &other.cross_re);
        zip(&mut self.cross_im, &other.cross_im);
        zip(&mut self.energy, &other.energy);
        zip(&mut self.work, &other.work);
        zip(&mut self.heat, &other.heat);
        zip(&mut self.denergy, &other.denergy);
        self.total_work.merge(&other.total_work);
        self.total_heat.merge(&other.total_heat);
        self.residual.merge(&other.residual);
    }

    fn record(&mut self, r: usize, amps: &[Complex<T>], omegas: &[T]) -> T {
        let mut energy = T::zero();
        for (m, (a, w)) in amps.iter().zip(omegas).enumerate() {
            let n = a.norm_sqr();
            self.occupation[m][r].push(n);
            energy += *w * n;
        }
        if amps.len() > 1 {
            let c = amps[0].conj() * amps[1];
            self.cross_re[r].push(c.re);
            self.cross_im[r].push(c.im);
        }
        self.energy[r].push(energy);
        energy
    }
}

/// Frequencies of every mode on the half-step grid t = k dt/2.
struct FrequencyGrid<T> {
    values: Vec<Vec<T>>,
}

impl<T: Real> FrequencyGrid<T> {
    fn build<F: Fn(usize, T) -> T>(modes: usize, steps: usize, dt: T, omega: F) -> Self {
        let values = (0..modes)
            .map(|m| (0..=2 * steps).map(|k| omega(m, dt * T::lit(k as f64) * T::half())).collect())
            .collect();
        Self { values }
    }

    fn at_step(&self, m: usize, k: usize) -> T {
        self.values[m][2 * k]
    }

    fn midpoint(&self, m: usize, k: usize) -> T {
        self.values[m][2 * k + 1]
    }
}

fn run<T>(
    noise: &NoiseSpec<T>,
    opts: &SimulationOptions<T>,
    init: &InitialState<T>,
    grid: &FrequencyGrid<T>,
) -> Result<TrajectoryEnsemble<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    opts.validate()?;
    if noise.modes.is_empty() {
        return Err(Error::invalid("modes", "need at least one mode"));
    }
    for m in &noise.modes {
        m.validate()?;
    }
    validate_initial(init, noise.modes.len())?;
    for (m, mode) in noise.modes.iter().enumerate() {
        let fastest = grid.values[m].iter().fold(T::zero(), |acc, w| acc.max(w.abs()));
        check_stability(opts.dt, fastest, mode.damping)?;
    }

    let n_modes = noise.modes.len();
    let records = opts.records();
    let coefficients: Vec<Vec<StepCoefficients<T>>> = noise
        .modes
        .iter()
        .enumerate()
        .map(|(m, mode)| (0..opts.steps).map(|k| step_coefficients(opts.stepper, grid.midpoint(m, k), mode, opts.dt)).collect())
        .collect();

    let simulate_chunk = |chunk: usize| {
        let mut acc = Accumulator::new(n_modes, records);
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(opts.trajectories);
        let mut omegas = vec![T::zero(); n_modes];
        for traj in start..end {
            let mut rng = trajectory_rng(noise.seed, traj);
            let mut amps = initial_amplitudes(init, &noise.modes, &mut rng);
            for (m, w) in omegas.iter_mut().enumerate() {
                *w = grid.at_step(m, 0);
            }
            let e_start = acc.record(0, &amps, &omegas);
            let mut e_prev = e_start;
            let (mut w_int, mut q_int) = (T::zero(), T::zero());
            let (mut w_tot, mut q_tot) = (T::zero(), T::zero());
            for k in 0..opts.steps {
                for m in 0..n_modes {
                    let (w0, w1) = (grid.at_step(m, k), grid.at_step(m, k + 1));
                    let n0 = amps[m].norm_sqr();
                    let c = coefficients[m][k];
                    let xi: Complex<T> = complex_gaussian(&mut rng);
                    amps[m] = c.factor * amps[m] + c.noise * xi;
                    let n1 = amps[m].norm_sqr();
                    let dw = -(w1 - w0) * n0;
                    let dq = w1 * (n1 - n0);
                    w_int += dw;
                    q_int += dq;
                    omegas[m] = w1;
                }
                if (k + 1) % opts.record_every == 0 {
                    let r = (k + 1) / opts.record_every;
                    let e = acc.record(r, &amps, &omegas);
                    acc.work[r - 1].push(w_int);
                    acc.heat[r - 1].push(q_int);
                    acc.denergy[r - 1].push(e - e_prev);
                    w_tot += w_int;
                    q_tot += q_int;
                    w_int = T::zero();
                    q_int = T::zero();
                    e_prev = e;
                }
            }
            w_tot += w_int;
            q_tot += q_int;
            let e_end: T = amps.iter().zip(&omegas).map(|(a, w)| *w * a.norm_sqr()).sum();
            acc.total_work.push(w_tot);
            acc.total_heat.push(q_tot);
            acc.residual.push(e_end - e_start - q_tot + w_tot);
        }
        acc
    };

    let n_chunks = opts.trajectories.div_ceil(CHUNK);
    let partial: Vec<Accumulator<T>> = (0..n_chunks).into_par_iter().map(simulate_chunk).collect();
    let mut total = Accumulator::new(n_modes, records);
    for p in &partial {
        total.merge(p);
    }

    let stats = |v: &Vec<Moments<T>>| v.iter().map(Moments::stat).collect::<Vec<_>>();
    Ok(TrajectoryEnsemble {
        times: (0..records).map(|r| opts.dt * T::lit((r * opts.record_every) as f64)).collect(),
        occupation: total.occupation.iter().map(stats).collect(),
        cross: (n_modes > 1).then(|| (stats(&total.cross_re), stats(&total.cross_im))),
        energy: stats(&total.energy),
        work_increments: stats(&total.work),
        heat_increments: stats(&total.heat),
        energy_increments: stats(&total.denergy),
        total_work: total.total_work.stat(),
        total_heat: total.total_heat.stat(),
        first_law_residual: total.residual.stat(),
        trajectories: opts.trajectories,
        dt: opts.dt,
        record_every: opts.record_every,
    })
}

/// Independent bare modes at fixed frequencies.
pub fn simulate_bare<T>(noise: &NoiseSpec<T>, opts: &SimulationOptions<T>, init: &InitialState<T>) -> Result<TrajectoryEnsemble<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    let grid = FrequencyGrid::build(noise.modes.len(), opts.steps, opts.dt, |m, _| noise.modes[m].frequency);
    run(noise, opts, init, &grid)
}

/// Single polariton mode at fixed frequency.
pub fn simulate_polariton<T>(
    mode: ModeNoise<T>,
    seed: u64,
    opts: &SimulationOptions<T>,
    init: &InitialState<T>,
) -> Result<TrajectoryEnsemble<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    simulate_bare(&NoiseSpec { modes: vec![mode], seed }, opts, init)
}

/// Single mode whose frequency follows `schedule`; `mode.frequency` is ignored.
pub fn simulate_driven<T, S>(
    mode: ModeNoise<T>,
    seed: u64,
    schedule: &S,
    opts: &SimulationOptions<T>,
    init: &InitialState<T>,
) -> Result<TrajectoryEnsemble<T>>
where
    T: Real,
    S: Schedule<T>,
    StandardNormal: Distribution<T>,
{
    let grid = FrequencyGrid::build(1, opts.steps, opts.dt, |_, t| schedule.omega(t));
    run(&NoiseSpec { modes: vec![mode], seed }, opts, init, &grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sta::LinearRamp;

    fn opts(steps: usize, trajectories: usize, record_every: usize) -> SimulationOptions<f64> {
        SimulationOptions { dt: 0.01, steps, trajectories, record_every, stepper: Stepper::Exact }
    }

    #[test]
    fn noiseless_decay_is_deterministic() {
        let mode = ModeNoise { frequency: 2.0, damping: 1.0, occupation: 0.0 };
        let init = InitialState::Amplitudes(vec![Complex::new(1.0, 0.0)]);
        let e = simulate_polariton(mode, 1, &opts(300, 3, 100), &init).unwrap();
        for (t, s) in e.times.iter().zip(&e.occupation[0]) {
            assert!((s.mean - (-t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_occupation_and_cross_noise() {
        let noise = NoiseSpec {
            modes: vec![
                ModeNoise { frequency: 3.0, damping: 0.5, occupation: 2.0 },
                ModeNoise { frequency: 1.0, damping: 0.8, occupation: 0.7 },
            ],
            seed: 42,
        };
        let e = simulate_bare(&noise, &opts(400, 4000, 400), &InitialState::Stationary).unwrap();
        let last = e.times.len() - 1;
        assert!(e.occupation[0][last].within(2.0, 3.0));
        assert!(e.occupation[1][last].within(0.7, 3.0));
        let (re, im) = e.cross.unwrap();
        assert!(re[last].within(0.0, 3.0) && im[last].within(0.0, 3.0));
    }

    #[test]
    fn first_law_closes_per_trajectory() {
        let mode = ModeNoise { frequency: 1.0, damping: 0.3, occupation: 1.5 };
        let ramp = LinearRamp { tau: 5.0, omega_i: 4.0, omega_f: 1.0 };
        let e = simulate_driven(mode, 9, &ramp, &opts(500, 256, 50), &InitialState::Stationary).unwrap();
        assert!(e.first_law_residual.mean.abs() < 1e-10);
        let rates = heat_work_rates(&e);
        assert_eq!(rates.len(), 10);
        for r in &rates {
            let closure = r.energy_rate.mean - (r.heat_rate.mean - r.work_rate.mean);
            assert!(closure.abs() < 1e-9);
        }
        // Stationary occupation is independent of ω, so W = −Δω n̄ on average.
        assert!(e.total_work.within(3.0 * 1.5, 3.0));
    }

    #[test]
    fn seeds_are_reproducible() {
        let mode = ModeNoise { frequency: 1.0, damping: 0.3, occupation: 1.5 };
        let a = simulate_polariton(mode, 5, &opts(50, 130, 10), &InitialState::Vacuum).unwrap();
        let b = simulate_polariton(mode, 5, &opts(50, 130, 10), &InitialState::Vacuum).unwrap();
        let c = simulate_polariton(mode, 6, &opts(50, 130, 10), &InitialState::Vacuum).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn stability_guard() {
        let mode = ModeNoise { frequency: 20.0, damping: 0.3, occupation: 1.5 };
        let r = simulate_polariton(mode, 5, &opts(10, 1, 1), &InitialState::Vacuum);
        assert!(matches!(r, Err(Error::Stability { .. })));
    }

    #[test]
    fn euler_maruyama_matches_exact_stepper() {
        let mode = ModeNoise { frequency: 1.0, damping: 1.0, occupation: 1.0 };
        let mut o = opts(300, 4000, 100);
        o.stepper = Stepper::EulerMaruyama;
        let e = simulate_polariton(mode, 3, &o, &InitialState::Vacuum).unwrap();
        for (t, s) in e.times.iter().zip(&e.occupation[0]) {
            // Discretization bias is O(γdt).
            assert!((s.mean - (1.0 - (-t).exp())).abs() <= 3.0 * s.std_err + 0.01);
        }
    }

    #[test]
    fn effective_damping_limits() {
        assert_eq!(effective_damping([1.0, 0.0, 0.0], 1.0, 1e-3), 1.0);
        assert_eq!(effective_damping([0.0, 0.0, 1.0], 1.0, 1e-3), 1e-3);
    }

    #[test]
    fn mismatched_initial_state_is_rejected() {
        let mode = ModeNoise { frequency: 1.0, damping: 0.3, occupation: 1.5 };
        let r = simulate_polariton(mode, 5, &opts(10, 1, 1), &InitialState::Thermal(vec![1.0, 2.0]));
        assert!(matches!(r, Err(Error::InvalidParameter { .. })));
    }
}
