//! Otto cycles with incomplete thermalization on the isochores.
//!
//! Corners follow the cycle order a → b → c → d → a: (a) after the phonon
//! isochore at −Δ̄_i, (b) after expansion to −Δ̄_f, (c) after the photon
//! isochore, (d) after compression back to −Δ̄_i. Isentropes carry the
//! occupation unchanged; each isochore relaxes exponentially toward its
//! equilibrium for a finite time. Occupations are those of the limit cycle.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::thermo::{cycle_endpoints, CycleResult, OttoCycleSpec};

/// n(τ) = n_eq + (n_start − n_eq) e^{−γτ}.
pub fn isochore_relax<T: Real>(n_start: T, n_eq: T, rate: T, duration: T) -> T {
    n_eq + (n_start - n_eq) * (-rate * duration).exp()
}

/// Isochore durations (γ0⁻¹) and relaxation rates (γ0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsochoreTiming<T> {
    /// Photon-bath isochore b → c.
    pub tau_bc: T,
    /// Phonon-bath isochore d → a.
    pub tau_da: T,
    pub photon_rate: T,
    pub phonon_rate: T,
}

impl<T: Real> IsochoreTiming<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tau_bc", self.tau_bc), ("tau_da", self.tau_da)] {
            if !(v >= T::zero()) {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        for (name, v) in [("photon_rate", self.photon_rate), ("phonon_rate", self.phonon_rate)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// e^{−γτ} for the photon and phonon isochores.
    pub fn decay_factors(&self) -> (T, T) {
        ((-self.photon_rate * self.tau_bc).exp(), (-self.phonon_rate * self.tau_da).exp())
    }

    /// 1 − e^{−γτ}, accurate for short isochores.
    fn relaxed_fractions(&self) -> (T, T) {
        (-(-self.photon_rate * self.tau_bc).exp_m1(), -(-self.phonon_rate * self.tau_da).exp_m1())
    }

    /// The phonon isochore outlasts the condensate lifetime 1/γ_m.
    pub fn exceeds_lifetime(&self) -> bool {
        self.tau_da * self.phonon_rate > T::one()
    }
}

/// Ideal cycle plus isochore timing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteCycleSpec<T> {
    pub ideal: OttoCycleSpec<T>,
    pub timing: IsochoreTiming<T>,
}

impl<T: Real> FiniteCycleSpec<T> {
    /// Bare rates from the baths: photon decay on b → c, phonon decay on d → a.
    pub fn new(ideal: OttoCycleSpec<T>, tau_bc: T, tau_da: T) -> Self {
        let timing = IsochoreTiming {
            tau_bc,
            tau_da,
            photon_rate: ideal.baths.photon_decay,
            phonon_rate: ideal.baths.phonon_decay,
        };
        Self { ideal, timing }
    }
}

/// Occupations at the corners a, b, c, d of the limit cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitCycleState<T> {
    pub corners: [T; 4],
    pub converged: bool,
}

impl<T: Real> LimitCycleState<T> {
    pub fn hot(&self) -> T {
        self.corners[0]
    }

    pub fn cold(&self) -> T {
        self.corners[2]
    }
}

/// One pass around the cycle starting from corner a.
pub fn cycle_map<T: Real>(n_a: T, n_hot_eq: T, n_cold_eq: T, timing: &IsochoreTiming<T>) -> T {
    let n_c = isochore_relax(n_a, n_cold_eq, timing.photon_rate, timing.tau_bc);
    isochore_relax(n_c, n_hot_eq, timing.phonon_rate, timing.tau_da)
}

/// Closed-form fixed point of [`cycle_map`]:
/// n_a = [n_i(1 − y) + n_f y(1 − x)]/(1 − xy), n_c = n_f + (n_a − n_f)x.
pub fn limit_cycle_occupations<T: Real>(n_hot_eq: T, n_cold_eq: T, timing: &IsochoreTiming<T>) -> Result<LimitCycleState<T>> {
    timing.validate()?;
    let (x, y) = timing.decay_factors();
    let (one_minus_x, one_minus_y) = timing.relaxed_fractions();
    // 1 − xy = (1 − x) + x(1 − y)
    let denom = one_minus_x + x * one_minus_y;
    if denom == T::zero() {
        return Err(Error::DegenerateMap);
    }
    let n_a = (n_hot_eq * one_minus_y + n_cold_eq * y * one_minus_x) / denom;
    let n_c = n_cold_eq + (n_a - n_cold_eq) * x;
    Ok(LimitCycleState { corners: [n_a, n_a, n_c, n_c], converged: true })
}

/// Finite-time cycle with its ideal reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteCycleResult<T> {
    pub cycle: CycleResult<T>,
    pub ideal: CycleResult<T>,
    pub state: LimitCycleState<T>,
    pub lifetime_warning: bool,
}

/// Limit-cycle energetics for given endpoint frequencies and equilibrium occupations.
pub fn relax_cycle<T: Real>(endpoints: (T, T, T, T), timing: &IsochoreTiming<T>) -> Result<FiniteCycleResult<T>> {
    let (wi, wf, ni, nf) = endpoints;
    let state = limit_cycle_occupations(ni, nf, timing)?;
    let ideal = CycleResult::evaluate(wi, wf, ni, nf)?;
    let cycle = CycleResult::evaluate(wi, wf, state.hot(), state.cold())?;
    Ok(FiniteCycleResult { cycle, ideal, state, lifetime_warning: timing.exceeds_lifetime() })
}

pub fn limit_cycle<T: Real>(spec: &FiniteCycleSpec<T>) -> Result<LimitCycleState<T>> {
    let (_, _, ni, nf) = cycle_endpoints(&spec.ideal)?;
    limit_cycle_occupations(ni, nf, &spec.timing)
}

pub fn finite_cycle<T: Real>(spec: &FiniteCycleSpec<T>) -> Result<FiniteCycleResult<T>> {
    relax_cycle(cycle_endpoints(&spec.ideal)?, &spec.timing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::{ideal_otto, BathSpec};
    use proptest::prelude::*;

    const WC: f64 = 173.27;
    const WD: f64 = 126.56;

    fn spec(tau_bc: f64, tau_da: f64) -> FiniteCycleSpec<f64> {
        // Warm phonon bath so that occupations are O(1).
        let ideal = OttoCycleSpec::new(10.0 * WC, 2.0, WC, WD, 4.0, BathSpec::phonon_only(300.0, 1e-3));
        FiniteCycleSpec::new(ideal, tau_bc, tau_da)
    }

    fn timing(tau_bc: f64, tau_da: f64) -> IsochoreTiming<f64> {
        IsochoreTiming { tau_bc, tau_da, photon_rate: 1.0, phonon_rate: 1e-3 }
    }

    #[test]
    fn relaxation_limits() {
        assert_eq!(isochore_relax(3.0, 1.0, 2.0, 0.0), 3.0);
        assert_eq!(isochore_relax(3.0, 1.0, 2.0, f64::INFINITY), 1.0);
        assert!((isochore_relax(3.0, 1.0, 1.0, 2.0f64.ln()) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn full_thermalization_recovers_ideal_cycle() {
        let r = finite_cycle(&spec(f64::INFINITY, f64::INFINITY)).unwrap();
        let ideal = ideal_otto(&spec(1.0, 1.0).ideal).unwrap();
        assert!((r.cycle.work - ideal.work).abs() <= 1e-12 * ideal.work.abs());
        assert!((r.cycle.efficiency - ideal.efficiency).abs() < 1e-12);
        assert_eq!(r.state.corners[0], ideal.n_i);
    }

    #[test]
    fn single_bath_pins_corners() {
        let s = limit_cycle_occupations(2.0, 0.5, &timing(0.0, f64::INFINITY)).unwrap();
        assert_eq!(s.corners, [2.0; 4]);
        assert!(matches!(limit_cycle_occupations(2.0, 0.5, &timing(0.0, 0.0)), Err(Error::DegenerateMap)));
        assert!(matches!(finite_cycle(&spec(0.0, 0.0)), Err(Error::DegenerateMap)));
    }

    #[test]
    fn fixed_point_matches_iteration() {
        let t = timing(2.0f64.ln(), 1e3 * 2.0f64.ln());
        let s = limit_cycle_occupations(2.0, 0.1, &t).unwrap();
        let mut n = 7.0;
        for _ in 0..200 {
            n = cycle_map(n, 2.0, 0.1, &t);
        }
        assert!((n - s.hot()).abs() < 1e-12);
        assert!((isochore_relax(n, 0.1, 1.0, t.tau_bc) - s.cold()).abs() < 1e-12);
        // x = y = ½: n_a = (n_i/2 + n_f/4)/(3/4)
        assert!((s.hot() - (1.0 + 0.025) / 0.75).abs() < 1e-12);
    }

    #[test]
    fn half_relaxation_keeps_efficiency_and_loses_work() {
        let r = finite_cycle(&spec(2.0f64.ln(), 1e3 * 2.0f64.ln())).unwrap();
        assert!((r.cycle.efficiency - r.ideal.efficiency).abs() < 1e-12);
        assert!(r.cycle.work < r.ideal.work);
        assert!((r.cycle.work - r.ideal.work / 3.0).abs() < 1e-12 * r.ideal.work);
        assert!(!r.lifetime_warning);
        assert!(finite_cycle(&spec(1.0, 2000.0)).unwrap().lifetime_warning);
    }

    #[test]
    fn first_law_at_limit_cycle() {
        let r = finite_cycle(&spec(0.3, 400.0)).unwrap();
        assert!(r.cycle.first_law_residual().abs() <= 1e-12 * r.cycle.heat_in);
    }

    proptest! {
        #[test]
        fn efficiency_invariance_and_work_monotonicity(
            tau_bc in 0.01f64..10.0, tau_da in 10.0f64..5000.0, shrink in 0.1f64..0.99,
        ) {
            let r = finite_cycle(&spec(tau_bc, tau_da)).unwrap();
            prop_assert!((r.cycle.efficiency - r.ideal.efficiency).abs() < 1e-12);
            let a = finite_cycle(&spec(tau_bc * shrink, tau_da)).unwrap();
            let b = finite_cycle(&spec(tau_bc, tau_da * shrink)).unwrap();
            prop_assert!(a.cycle.work < r.cycle.work);
            prop_assert!(b.cycle.work < r.cycle.work);
            let lo = r.ideal.n_f.min(r.ideal.n_i);
            let hi = r.ideal.n_f.max(r.ideal.n_i);
            for n in r.state.corners {
                prop_assert!(n >= lo - 1e-15 && n <= hi + 1e-15);
            }
        }
    }
}
