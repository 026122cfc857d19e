//! Shortcuts to adiabaticity for the isentropic strokes.
//!
//! A scaling function ρ(t) with ρ(0) = 1, ρ(τ) = √(Ω_i/Ω_f) and vanishing
//! first and second derivatives at both ends fixes the frequency protocol
//! through the Ermakov–Pinney equation
//!
//! ```text
//!     ρ̈ + Ω(t)² ρ = Ω_i² / ρ³   ⇒   Ω(t)² = Ω_i²/ρ⁴ − ρ̈/ρ
//! ```
//!
//! The detuning that realizes Ω(t) on branch A is then found by inverting
//! the monotone map −Δ̄ ↦ ω_A(−Δ̄).

use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};
use crate::scalar::Real;
use crate::spectrum::{polariton_spectrum, Branch, CouplingMatrix};

/// Shape of the scaling function between its boundary values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ansatz {
    /// 1 + b(6s⁵ − 15s⁴ + 10s³)
    Polynomial,
    /// 1 + b[½ − (9/16)cos πs + (1/16)cos 3πs]
    Trigonometric,
}

/// ρ and its first two time derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaling<T> {
    pub rho: T,
    pub rho_dot: T,
    pub rho_ddot: T,
}

fn check_endpoints<T: Real>(tau: T, omega_i: T, omega_f: T) -> Result<()> {
    if !(tau > T::zero() && tau.is_finite()) {
        return Err(Error::invalid("tau", format!("must be positive, got {tau}")));
    }
    for (name, w) in [("omega_i", omega_i), ("omega_f", omega_f)] {
        if !(w > T::zero() && w.is_finite()) {
            return Err(Error::invalid(name, format!("must be positive, got {w}")));
        }
    }
    Ok(())
}

fn check_time<T: Real>(t: T, tau: T) -> Result<()> {
    if !(t >= T::zero() && t <= tau) {
        return Err(Error::Domain { t: t.as_f64(), tau: tau.as_f64() });
    }
    Ok(())
}

pub fn rho_polynomial<T: Real>(t: T, tau: T, omega_i: T, omega_f: T) -> Result<Scaling<T>> {
    check_endpoints(tau, omega_i, omega_f)?;
    check_time(t, tau)?;
    let b = (omega_i / omega_f).sqrt() - T::one();
    let s = t / tau;
    let s2 = s * s;
    let lit = T::lit;
    Ok(Scaling {
        rho: T::one() + b * s2 * s * (lit(10.0) + s * (lit(-15.0) + lit(6.0) * s)),
        rho_dot: b * lit(30.0) * s2 * (T::one() - s) * (T::one() - s) / tau,
        rho_ddot: b * lit(60.0) * s * (T::one() - s) * (T::one() - T::two() * s) / (tau * tau),
    })
}

pub fn rho_trigonometric<T: Real>(t: T, tau: T, omega_i: T, omega_f: T) -> Result<Scaling<T>> {
    check_endpoints(tau, omega_i, omega_f)?;
    check_time(t, tau)?;
    let b = (omega_i / omega_f).sqrt() - T::one();
    let x = T::PI() * t / tau;
    let three = T::lit(3.0);
    let sixteenth = T::lit(1.0 / 16.0);
    let w = T::PI() / tau;
    Ok(Scaling {
        rho: T::one() + b * (T::half() - T::lit(9.0) * sixteenth * x.cos() + sixteenth * (three * x).cos()),
        rho_dot: b * w * T::lit(9.0) * sixteenth * (x.sin() - (three * x).sin() / three),
        rho_ddot: b * w * w * T::lit(9.0) * sixteenth * (x.cos() - (three * x).cos()),
    })
}

impl Ansatz {
    pub fn scaling<T: Real>(self, t: T, tau: T, omega_i: T, omega_f: T) -> Result<Scaling<T>> {
        match self {
            Ansatz::Polynomial => rho_polynomial(t, tau, omega_i, omega_f),
            Ansatz::Trigonometric => rho_trigonometric(t, tau, omega_i, omega_f),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ansatz::Polynomial => "polynomial",
            Ansatz::Trigonometric => "trigonometric",
        }
    }
}

/// One protocol sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaSample<T> {
    pub t: T,
    pub rho: T,
    pub rho_dot: T,
    pub rho_ddot: T,
    pub omega_sq: T,
    /// −Δ̄(t), filled by [`detuning_protocol`].
    pub detuning: Option<T>,
}

impl<T: Real> StaSample<T> {
    /// Signed square root of Ω².
    pub fn omega(&self) -> T {
        self.omega_sq.signum() * self.omega_sq.abs().sqrt()
    }
}

/// Stroke between Ω_i and Ω_f in time τ (γ0⁻¹).
#[derive(Clone, Debug, PartialEq)]
pub struct StaProtocol<T> {
    pub tau: T,
    pub omega_i: T,
    pub omega_f: T,
    pub ansatz: Ansatz,
    pub samples: Vec<StaSample<T>>,
    /// Ω² > 0 at every sample.
    pub feasible: bool,
}

impl<T: Real> StaProtocol<T> {
    pub fn min_omega_sq(&self) -> (T, T) {
        self.samples
            .iter()
            .map(|s| (s.omega_sq, s.t))
            .fold((T::infinity(), T::zero()), |acc, x| if x.0 < acc.0 { x } else { acc })
    }

    /// Ω² at an arbitrary time, from the analytic ρ.
    pub fn omega_sq_at(&self, t: T) -> Result<T> {
        let s = self.ansatz.scaling(t, self.tau, self.omega_i, self.omega_f)?;
        Ok(ermakov_frequency_sq(self.omega_i, &s))
    }

    /// max |ρ̈ + Ω²ρ − Ω_i²/ρ³| over the samples.
    pub fn ermakov_pinney_residual(&self) -> T {
        let wi2 = self.omega_i * self.omega_i;
        self.samples
            .iter()
            .map(|s| (s.rho_ddot + s.omega_sq * s.rho - wi2 / (s.rho * s.rho * s.rho)).abs())
            .fold(T::zero(), T::max)
    }

    pub fn schedule(&self) -> StaSchedule<T> {
        StaSchedule { ansatz: self.ansatz, tau: self.tau, omega_i: self.omega_i, omega_f: self.omega_f }
    }
}

fn ermakov_frequency_sq<T: Real>(omega_i: T, s: &Scaling<T>) -> T {
    let r2 = s.rho * s.rho;
    omega_i * omega_i / (r2 * r2) - s.rho_ddot / s.rho
}

/// Samples the protocol on a uniform grid without rejecting Ω² ≤ 0.
pub fn sample_protocol<T: Real>(ansatz: Ansatz, tau: T, omega_i: T, omega_f: T, n_samples: usize) -> Result<StaProtocol<T>> {
    check_endpoints(tau, omega_i, omega_f)?;
    if n_samples < 2 {
        return Err(Error::invalid("n_samples", format!("need at least 2, got {n_samples}")));
    }
    let last = T::lit((n_samples - 1) as f64);
    let samples = (0..n_samples)
        .map(|k| {
            let t = if k + 1 == n_samples { tau } else { tau * T::lit(k as f64) / last };
            let s = ansatz.scaling(t, tau, omega_i, omega_f)?;
            Ok(StaSample {
                t,
                rho: s.rho,
                rho_dot: s.rho_dot,
                rho_ddot: s.rho_ddot,
                omega_sq: ermakov_frequency_sq(omega_i, &s),
                detuning: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let feasible = samples.iter().all(|s| s.omega_sq > T::zero());
    Ok(StaProtocol { tau, omega_i, omega_f, ansatz, samples, feasible })
}

/// Frequency protocol Ω(t)² = Ω_i²/ρ⁴ − ρ̈/ρ; rejects strokes that need Ω² ≤ 0.
pub fn omega_protocol<T: Real>(ansatz: Ansatz, tau: T, omega_i: T, omega_f: T, n_samples: usize) -> Result<StaProtocol<T>> {
    let p = sample_protocol(ansatz, tau, omega_i, omega_f, n_samples)?;
    if !p.feasible {
        let (min, at) = p.min_omega_sq();
        return Err(Error::InfeasibleProtocol { min_omega_sq: min.as_f64(), at: at.as_f64() });
    }
    Ok(p)
}

/// Shortest τ with Ω² > 0 on a dense grid. Ω² = Ω_i²/ρ⁴ − ρ̈₁/(τ²ρ) with
/// ρ and τ²ρ̈ = ρ̈₁ independent of τ, so τ*² = max_s ρ³ρ̈₁/Ω_i².
pub fn minimum_feasible_duration<T: Real>(ansatz: Ansatz, omega_i: T, omega_f: T, grid: usize) -> Result<T> {
    check_endpoints(T::one(), omega_i, omega_f)?;
    let n = grid.max(3);
    let ratio = |k: usize| -> Result<T> {
        let s = ansatz.scaling(T::lit(k as f64) / T::lit((n - 1) as f64), T::one(), omega_i, omega_f)?;
        Ok(s.rho * s.rho * s.rho * s.rho_ddot)
    };
    let mut best = (T::zero(), 0usize);
    for k in 0..n {
        let r = ratio(k)?;
        if r > best.0 {
            best = (r, k);
        }
    }
    // Golden-section refinement around the best grid point.
    let h = T::one() / T::lit((n - 1) as f64);
    let centre = T::lit(best.1 as f64) * h;
    let f = |s: T| -> Result<T> {
        let s = s.max(T::zero()).min(T::one());
        let sc = ansatz.scaling(s, T::one(), omega_i, omega_f)?;
        Ok(sc.rho * sc.rho * sc.rho * sc.rho_ddot)
    };
    let (mut a, mut b) = ((centre - h).max(T::zero()), (centre + h).min(T::one()));
    let g = T::lit(0.618_033_988_749_894_8);
    for _ in 0..100 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if f(x1)? < f(x2)? {
            a = x1;
        } else {
            b = x2;
        }
    }
    let peak = best.0.max(f((a + b) * T::half())?);
    Ok(peak.max(T::zero()).sqrt() / omega_i)
}

/// Lower-branch frequency at detuning `detuning` with the other Λ entries from `template`.
pub fn lower_branch_frequency<T: Real>(template: &CouplingMatrix<T>, detuning: T) -> Result<T> {
    Ok(polariton_spectrum(&template.at_detuning(detuning))?.frequency(Branch::A))
}

/// Detuning bracket used for inversion: [1e-6, 1e3·max(ω_c, ω_d, −Δ̄ of the template)].
pub fn inversion_bracket<T: Real>(template: &CouplingMatrix<T>) -> (T, T) {
    let hi = template.omega_c.max(template.omega_d).max(template.detuning).max(T::one());
    (T::lit(1e-6), T::lit(1e3) * hi)
}

/// Solves ω_A(−Δ̄) = Ω by bisection.
pub fn invert_lower_branch<T: Real>(omega: T, template: &CouplingMatrix<T>) -> Result<T> {
    template.validate()?;
    let (mut lo, mut hi) = inversion_bracket(template);
    let w_lo = lower_branch_frequency(template, lo)?;
    let w_hi = lower_branch_frequency(template, hi)?;
    if !(omega > w_lo.max(T::zero()) && omega < w_hi) {
        return Err(Error::UnattainableFrequency { omega: omega.as_f64(), min: w_lo.as_f64(), max: w_hi.as_f64() });
    }
    for _ in 0..200 {
        let mid = lo + (hi - lo) * T::half();
        if mid <= lo || mid >= hi {
            break;
        }
        if lower_branch_frequency(template, mid)? < omega {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (e_lo, e_hi) =
        ((lower_branch_frequency(template, lo)? - omega).abs(), (lower_branch_frequency(template, hi)? - omega).abs());
    Ok(if e_lo <= e_hi { lo } else { hi })
}

/// Fills −Δ̄(t) for every sample of a feasible protocol.
pub fn detuning_protocol<T: Real>(protocol: &StaProtocol<T>, template: &CouplingMatrix<T>) -> Result<StaProtocol<T>> {
    if !protocol.feasible {
        let (min, at) = protocol.min_omega_sq();
        return Err(Error::InfeasibleProtocol { min_omega_sq: min.as_f64(), at: at.as_f64() });
    }
    let mut out = protocol.clone();
    for s in out.samples.iter_mut() {
        s.detuning = Some(invert_lower_branch(s.omega(), template)?);
    }
    Ok(out)
}

/// ⟨H⟩ in level n: (2n+1)/(4Ω_i)(ρ̇² + Ω²ρ² + Ω_i²/ρ²), in ħγ0 units.
pub fn mean_energy<T: Real>(protocol: &StaProtocol<T>, level: u32) -> Vec<T> {
    let wi = protocol.omega_i;
    let pref = T::lit(2.0 * level as f64 + 1.0) / (T::lit(4.0) * wi);
    protocol
        .samples
        .iter()
        .map(|s| pref * (s.rho_dot * s.rho_dot + s.omega_sq * s.rho * s.rho + wi * wi / (s.rho * s.rho)))
        .collect()
}

/// Time-dependent frequency Ω(t) on [0, τ].
pub trait Schedule<T: Real> {
    fn duration(&self) -> T;
    fn omega_sq(&self, t: T) -> T;
    fn omega(&self, t: T) -> T {
        let w2 = self.omega_sq(t);
        w2.signum() * w2.abs().sqrt()
    }
}

/// Analytic STA frequency schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaSchedule<T> {
    pub ansatz: Ansatz,
    pub tau: T,
    pub omega_i: T,
    pub omega_f: T,
}

impl<T: Real> Schedule<T> for StaSchedule<T> {
    fn duration(&self) -> T {
        self.tau
    }

    fn omega_sq(&self, t: T) -> T {
        let t = t.max(T::zero()).min(self.tau);
        match self.ansatz.scaling(t, self.tau, self.omega_i, self.omega_f) {
            Ok(s) => ermakov_frequency_sq(self.omega_i, &s),
            Err(_) => T::nan(),
        }
    }
}

/// Ω(t) = Ω_i + (Ω_f − Ω_i) t/τ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearRamp<T> {
    pub tau: T,
    pub omega_i: T,
    pub omega_f: T,
}

impl<T: Real> Schedule<T> for LinearRamp<T> {
    fn duration(&self) -> T {
        self.tau
    }

    fn omega_sq(&self, t: T) -> T {
        let w = self.omega(t);
        w * w
    }

    fn omega(&self, t: T) -> T {
        let s = (t / self.tau).max(T::zero()).min(T::one());
        self.omega_i + (self.omega_f - self.omega_i) * s
    }
}

/// Uniformly sampled Ω(t), interpolated by cubic Hermite segments with
/// centred-difference slopes.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSchedule<T> {
    pub tau: T,
    pub omega: Vec<T>,
}

impl<T: Real> SampledSchedule<T> {
    pub fn new(tau: T, omega: Vec<T>) -> Result<Self> {
        if omega.len() < 2 {
            return Err(Error::invalid("samples", "need at least 2 frequency samples"));
        }
        check_endpoints(tau, T::one(), T::one())?;
        Ok(Self { tau, omega })
    }

    fn slope(&self, k: usize, h: T) -> T {
        let n = self.omega.len();
        if k == 0 {
            (self.omega[1] - self.omega[0]) / h
        } else if k + 1 == n {
            (self.omega[n - 1] - self.omega[n - 2]) / h
        } else {
            (self.omega[k + 1] - self.omega[k - 1]) / (T::two() * h)
        }
    }
}

impl<T: Real> Schedule<T> for SampledSchedule<T> {
    fn duration(&self) -> T {
        self.tau
    }

    fn omega_sq(&self, t: T) -> T {
        let w = self.omega(t);
        w * w
    }

    fn omega(&self, t: T) -> T {
        let n = self.omega.len();
        let h = self.tau / T::lit((n - 1) as f64);
        let x = (t / h).max(T::zero()).min(T::lit((n - 1) as f64));
        let k = x.floor().to_usize().unwrap_or(0).min(n - 2);
        let u = x - T::lit(k as f64);
        let (u2, u3) = (u * u, u * u * u);
        let two = T::two();
        let three = T::lit(3.0);
        let h00 = two * u3 - three * u2 + T::one();
        let h10 = u3 - two * u2 + u;
        let h01 = -two * u3 + three * u2;
        let h11 = u3 - u2;
        h00 * self.omega[k] + h10 * h * self.slope(k, h) + h01 * self.omega[k + 1] + h11 * h * self.slope(k + 1, h)
    }
}

/// Husimi adiabaticity parameter and integration diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Adiabaticity<T> {
    pub q_star: T,
    /// max |XẎ − YẊ − 1| along the integration.
    pub wronskian_drift: T,
}

fn ode_options<T: Real, S: Schedule<T>>(schedule: &S) -> OdeOptions<T> {
    OdeOptions { rtol: T::lit(1e-12), atol: T::lit(1e-14), max_step: Some(schedule.duration() / T::lit(50.0)), ..OdeOptions::default() }
}

/// Q* from the fundamental solutions X (X=1, Ẋ=0) and Y (Y=0, Ẏ=1) of ẍ + Ω²x = 0:
/// Q* = [Ω_i²(Ω_f²Y² + Ẏ²) + (Ω_f²X² + Ẋ²)]/(2Ω_iΩ_f) at t = τ.
pub fn adiabaticity_parameter<T: Real, S: Schedule<T>>(schedule: &S) -> Result<Adiabaticity<T>> {
    let tau = schedule.duration();
    let wi = schedule.omega(T::zero());
    let wf = schedule.omega(tau);
    check_endpoints(tau, wi, wf)?;
    let mut drift = T::zero();
    let y = integrate(
        |t, y: &[T; 4]| {
            let w2 = schedule.omega_sq(t);
            [y[1], -w2 * y[0], y[3], -w2 * y[2]]
        },
        T::zero(),
        [T::one(), T::zero(), T::zero(), T::one()],
        tau,
        &ode_options(schedule),
        |_, y| drift = drift.max((y[0] * y[3] - y[2] * y[1] - T::one()).abs()),
    )?;
    let [x, xd, yy, yd] = y;
    let q_star = (wi * wi * (wf * wf * yy * yy + yd * yd) + (wf * wf * x * x + xd * xd)) / (T::two() * wi * wf);
    Ok(Adiabaticity { q_star, wronskian_drift: drift })
}

/// Largest relative change of the Ermakov–Lewis invariant
/// I = ½[(x/ρ)²Ω_i² + (ρẋ − ρ̇x)²]/Ω_i along a trajectory from (x0, v0).
pub fn ermakov_lewis_drift<T: Real>(protocol: &StaProtocol<T>, x0: T, v0: T) -> Result<T> {
    let schedule = protocol.schedule();
    let wi = protocol.omega_i;
    let invariant = |t: T, x: T, v: T| -> Result<T> {
        let s = protocol.ansatz.scaling(t.min(protocol.tau), protocol.tau, wi, protocol.omega_f)?;
        let q = x / s.rho;
        let p = s.rho * v - s.rho_dot * x;
        Ok(T::half() * (q * q * wi * wi + p * p) / wi)
    };
    let i0 = invariant(T::zero(), x0, v0)?;
    if i0 == T::zero() {
        return Ok(T::zero());
    }
    let mut worst = T::zero();
    let mut failure = None;
    integrate(
        |t, y: &[T; 2]| [y[1], -schedule.omega_sq(t) * y[0]],
        T::zero(),
        [x0, v0],
        protocol.tau,
        &ode_options(&schedule),
        |t, y| match invariant(t, y[0], y[1]) {
            Ok(i) => worst = worst.max(((i - i0) / i0).abs()),
            Err(e) => failure = Some(e),
        },
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(worst),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const WI: f64 = 126.55;
    const WF: f64 = 1.7781;

    #[test]
    fn boundary_conditions() {
        for ansatz in [Ansatz::Polynomial, Ansatz::Trigonometric] {
            let a = ansatz.scaling(0.0, 2.0, WI, WF).unwrap();
            let b = ansatz.scaling(2.0, 2.0, WI, WF).unwrap();
            assert!((a.rho - 1.0).abs() < 1e-14 && a.rho_dot.abs() < 1e-14 && a.rho_ddot.abs() < 1e-12);
            assert!((b.rho - (WI / WF).sqrt()).abs() < 1e-13);
            assert!(b.rho_dot.abs() < 1e-12 && b.rho_ddot.abs() < 1e-12);
            let m = ansatz.scaling(1.0, 2.0, WI, WF).unwrap();
            assert!((m.rho - 0.5 * (1.0 + (WI / WF).sqrt())).abs() < 1e-13);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let (tau, h) = (0.7, 1e-5);
        for ansatz in [Ansatz::Polynomial, Ansatz::Trigonometric] {
            for t in [0.1, 0.3, 0.5, 0.61] {
                let s = ansatz.scaling(t, tau, WI, WF).unwrap();
                let p = ansatz.scaling(t + h, tau, WI, WF).unwrap();
                let m = ansatz.scaling(t - h, tau, WI, WF).unwrap();
                assert!(((p.rho - m.rho) / (2.0 * h) - s.rho_dot).abs() < 1e-5 * (1.0 + s.rho_dot.abs()));
                assert!(((p.rho_dot - m.rho_dot) / (2.0 * h) - s.rho_ddot).abs() < 1e-4 * (1.0 + s.rho_ddot.abs()));
            }
        }
    }

    #[test]
    fn out_of_range_time_is_a_domain_error() {
        assert!(matches!(rho_polynomial(-0.1, 1.0, WI, WF), Err(Error::Domain { .. })));
        assert!(matches!(rho_trigonometric(1.1, 1.0, WI, WF), Err(Error::Domain { .. })));
    }

    #[test]
    fn equal_endpoints_give_constant_protocol() {
        let p = omega_protocol(Ansatz::Polynomial, 1.0f64, 3.0, 3.0, 11).unwrap();
        assert!(p.samples.iter().all(|s| s.rho == 1.0 && (s.omega_sq - 9.0).abs() < 1e-12));
        let q = adiabaticity_parameter(&p.schedule()).unwrap();
        assert!((q.q_star - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fast_strokes_are_infeasible() {
        let tau_star = minimum_feasible_duration(Ansatz::Polynomial, WI, WF, 10_000).unwrap();
        assert!(tau_star > 0.0);
        assert!(omega_protocol(Ansatz::Polynomial, 1.05 * tau_star, WI, WF, 10_000).is_ok());
        match omega_protocol(Ansatz::Polynomial, 0.95 * tau_star, WI, WF, 10_000) {
            Err(Error::InfeasibleProtocol { min_omega_sq, .. }) => assert!(min_omega_sq <= 0.0),
            other => panic!("{other:?}"),
        }
        assert!(omega_protocol(Ansatz::Polynomial, 10.0, WI, WF, 1000).unwrap().feasible);
    }

    #[test]
    fn compression_is_time_reversed_expansion() {
        for ansatz in [Ansatz::Polynomial, Ansatz::Trigonometric] {
            let exp = omega_protocol(ansatz, 5.0, WI, WF, 101).unwrap();
            let comp = omega_protocol(ansatz, 5.0, WF, WI, 101).unwrap();
            for (a, b) in exp.samples.iter().zip(comp.samples.iter().rev()) {
                assert!((a.omega_sq - b.omega_sq).abs() < 1e-9 * WI * WI);
            }
        }
    }

    #[test]
    fn ansaetze_agree_only_at_three_points() {
        let p = sample_protocol(Ansatz::Polynomial, 1.0, WI, WF, 101).unwrap();
        let q = sample_protocol(Ansatz::Trigonometric, 1.0, WI, WF, 101).unwrap();
        for k in [0, 50, 100] {
            assert!((p.samples[k].rho - q.samples[k].rho).abs() < 1e-13);
        }
        let diff = p.samples.iter().zip(&q.samples).map(|(a, b)| (a.rho - b.rho).abs()).fold(0.0, f64::max);
        assert!(diff > 1e-3);
    }

    #[test]
    fn mean_energy_endpoints_and_uncertainty_bound() {
        let p = omega_protocol(Ansatz::Trigonometric, 2.0, WI, WF, 501).unwrap();
        for n in [0u32, 3] {
            let e = mean_energy(&p, n);
            let half = n as f64 + 0.5;
            assert!((e[0] - half * WI).abs() < 1e-10 * WI);
            assert!((e[e.len() - 1] - half * WF).abs() < 1e-9 * WI);
            for (s, en) in p.samples.iter().zip(&e) {
                assert!(*en >= half * s.omega() * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn sta_strokes_are_adiabatic_and_ramps_are_not() {
        let p = omega_protocol(Ansatz::Polynomial, 1.0, WI, WF, 1001).unwrap();
        let q = adiabaticity_parameter(&p.schedule()).unwrap();
        assert!((q.q_star - 1.0).abs() < 1e-6, "{}", q.q_star);
        assert!(q.wronskian_drift < 1e-8);
        let ramp = adiabaticity_parameter(&LinearRamp { tau: 0.1, omega_i: WI, omega_f: WF }).unwrap();
        assert!(ramp.q_star - 1.0 > 1e-3);
    }

    #[test]
    fn ermakov_lewis_invariant_is_conserved() {
        let p = omega_protocol(Ansatz::Trigonometric, 1.0, WI, WF, 11).unwrap();
        assert!(ermakov_lewis_drift(&p, 1.0, 0.0).unwrap() < 1e-6);
        assert!(ermakov_lewis_drift(&p, 0.3, 40.0).unwrap() < 1e-6);
    }

    #[test]
    fn sampled_schedule_reproduces_linear_data() {
        let s = SampledSchedule::new(2.0f64, vec![1.0, 2.0, 3.0]).unwrap();
        assert!((s.omega(0.5) - 1.5).abs() < 1e-14);
        assert!((s.omega(2.0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn detuning_round_trip() {
        let template = CouplingMatrix::new(0.0f64, 173.27, 126.56, 4.0).unwrap();
        for det in [0.5, 2.0, 50.0, 250.0, 1732.7] {
            let w = lower_branch_frequency(&template, det).unwrap();
            let back = invert_lower_branch(w, &template).unwrap();
            assert!((lower_branch_frequency(&template, back).unwrap() - w).abs() < 1e-9);
        }
        assert!(matches!(invert_lower_branch(200.0, &template), Err(Error::UnattainableFrequency { .. })));
        assert!(lower_branch_frequency(&template, 0.05).unwrap() < 0.0);
        assert!(matches!(invert_lower_branch(-0.01, &template), Err(Error::UnattainableFrequency { .. })));
        assert!(matches!(invert_lower_branch(-1.0, &template), Err(Error::UnattainableFrequency { .. })));
    }

    proptest! {
        #[test]
        fn ermakov_pinney_residual_is_small(tau in 0.5f64..20.0, wf in 0.5f64..50.0, poly in any::<bool>()) {
            let ansatz = if poly { Ansatz::Polynomial } else { Ansatz::Trigonometric };
            let p = sample_protocol(ansatz, tau, WI, wf, 1000).unwrap();
            prop_assert!(p.ermakov_pinney_residual() < 1e-8);
            let first = p.samples[0];
            let last = p.samples[p.samples.len() - 1];
            prop_assert!((first.omega_sq - WI * WI).abs() < 1e-8 * WI * WI);
            prop_assert!((last.omega_sq - wf * wf).abs() < 1e-8 * WI * WI);
        }
    }
}
