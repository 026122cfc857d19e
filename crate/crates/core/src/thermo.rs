//! Thermal occupations and ideal Otto-cycle energetics.
//!
//! Temperatures enter as thermal energies θ = k_B T/(ħγ0), so the Bose
//! factor is `1/(exp(ω/θ) − 1)` with ω in γ0 units. Energies are in ħγ0.

use crate::error::{Error, Result};
use crate::params::{ScaledConfig, UnitSystem};
use crate::scalar::Real;
use crate::spectrum::{polariton_spectrum, Branch, CouplingMatrix, PolaritonSpectrum, RegimeGuard};

/// Bose–Einstein occupation at frequency `omega` and thermal energy `thermal`.
pub fn bose_occupation<T: Real>(omega: T, thermal: T) -> Result<T> {
    if !(thermal >= T::zero()) || !thermal.is_finite() {
        return Err(Error::invalid("temperature", format!("must be finite and >= 0, got {thermal}")));
    }
    if thermal == T::zero() {
        return Ok(T::zero());
    }
    if !(omega > T::zero()) {
        return Err(Error::DivergentOccupation { frequency: omega.as_f64() });
    }
    Ok(T::one() / (omega / thermal).exp_m1())
}

/// Occupation assigned to the cavity photon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhotonOccupation<T> {
    /// Optical-frequency photons are frozen out.
    Zero,
    /// Bose factor at the photon detuning and the photon bath temperature.
    Thermal,
    Fixed(T),
}

/// Reservoir temperatures (thermal-energy units) and reference rates (γ0 units).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpec<T> {
    pub photon_thermal: T,
    pub phonon_thermal: T,
    pub photon_decay: T,
    pub phonon_decay: T,
    pub photon_occupation: PhotonOccupation<T>,
}

impl<T: Real> BathSpec<T> {
    /// Photon bath at zero temperature, phonon bath at `phonon_thermal`.
    pub fn phonon_only(phonon_thermal: T, phonon_decay: T) -> Self {
        Self {
            photon_thermal: T::zero(),
            phonon_thermal,
            photon_decay: T::one(),
            phonon_decay,
            photon_occupation: PhotonOccupation::Zero,
        }
    }

    pub fn from_kelvin(photon_kelvin: f64, phonon_kelvin: f64, phonon_decay: T, units: &UnitSystem) -> Self {
        Self {
            photon_thermal: T::lit(units.temperature_to_thermal(photon_kelvin)),
            phonon_thermal: T::lit(units.temperature_to_thermal(phonon_kelvin)),
            ..Self::phonon_only(T::zero(), phonon_decay)
        }
    }

    pub fn from_config(cfg: &ScaledConfig<T>) -> Self {
        Self {
            photon_thermal: cfg.photon_thermal,
            phonon_thermal: cfg.phonon_thermal,
            ..Self::phonon_only(T::zero(), cfg.phonon_decay)
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("photon_temperature", self.photon_thermal),
            ("phonon_temperature", self.phonon_thermal),
            ("photon_decay", self.photon_decay),
            ("phonon_decay", self.phonon_decay),
        ] {
            if !(v.is_finite() && v >= T::zero()) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if let PhotonOccupation::Fixed(n) = self.photon_occupation {
            if !(n.is_finite() && n >= T::zero()) {
                return Err(Error::invalid("photon_occupation", format!("must be finite and >= 0, got {n}")));
            }
        }
        Ok(())
    }

    pub fn photon_occupation(&self, detuning: T) -> Result<T> {
        match self.photon_occupation {
            PhotonOccupation::Zero => Ok(T::zero()),
            PhotonOccupation::Thermal => bose_occupation(detuning, self.photon_thermal),
            PhotonOccupation::Fixed(n) => Ok(n),
        }
    }

    /// Bare occupations (n_a, n_c, n_d) in equilibrium with the phonon bath.
    pub fn phonon_state(&self, m: &CouplingMatrix<T>) -> Result<[T; 3]> {
        Ok([
            self.photon_occupation(m.detuning)?,
            bose_occupation(m.omega_c, self.phonon_thermal)?,
            bose_occupation(m.omega_d, self.phonon_thermal)?,
        ])
    }

    /// Bare occupations after thermalizing against the photon bath.
    pub fn photon_state(&self, m: &CouplingMatrix<T>) -> Result<[T; 3]> {
        Ok([self.photon_occupation(m.detuning)?, T::zero(), T::zero()])
    }
}

/// Branch occupation ⟨A†A⟩ with bare occupations from the phonon bath.
pub fn polariton_occupation<T: Real>(spec: &PolaritonSpectrum<T>, baths: &BathSpec<T>, branch: Branch) -> Result<T> {
    baths.validate()?;
    let omega = spec.frequency(branch);
    if !(omega > T::zero()) {
        return Err(Error::invalid("branch frequency", format!("must be positive, got {omega}")));
    }
    Ok(spec.occupation(branch, &baths.phonon_state(&spec.matrix)?))
}

/// How the two isochoric strokes set the bare occupations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReservoirModel {
    /// Endpoint i against the phonon bath, endpoint f against the photon bath.
    #[default]
    Stroke,
    /// Both endpoints use the same bare occupations (n_a, n_c, n_d) from the phonon bath.
    Shared,
}

/// Which mode is driven around the cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleBranch {
    Polariton(Branch),
    /// Lower branch of the two-mode reduction.
    LowerTwoMode,
}

/// Four-stroke cycle between detunings −Δ̄_i > −Δ̄_f > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OttoCycleSpec<T> {
    pub initial_detuning: T,
    pub final_detuning: T,
    pub omega_c: T,
    pub omega_d: T,
    pub coupling: T,
    pub branch: CycleBranch,
    pub baths: BathSpec<T>,
    pub reservoir: ReservoirModel,
}

impl<T: Real> OttoCycleSpec<T> {
    pub fn new(initial_detuning: T, final_detuning: T, omega_c: T, omega_d: T, coupling: T, baths: BathSpec<T>) -> Self {
        Self {
            initial_detuning,
            final_detuning,
            omega_c,
            omega_d,
            coupling,
            branch: CycleBranch::Polariton(Branch::A),
            baths,
            reservoir: ReservoirModel::Stroke,
        }
    }

    pub fn from_config(cfg: &ScaledConfig<T>, initial_detuning: T, final_detuning: T) -> Self {
        Self::new(initial_detuning, final_detuning, cfg.omega_c(), cfg.omega_d(), cfg.coupling, BathSpec::from_config(cfg))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.final_detuning > T::zero() && self.final_detuning.is_finite()) {
            return Err(Error::invalid("final_detuning", format!("must be positive, got {}", self.final_detuning)));
        }
        // Equal detunings pass here and surface as NotAnEngine with W = 0.
        if !(self.initial_detuning >= self.final_detuning && self.initial_detuning.is_finite()) {
            return Err(Error::invalid(
                "initial_detuning",
                format!("must not be below final detuning {}, got {}", self.final_detuning, self.initial_detuning),
            ));
        }
        self.initial_matrix()?;
        self.baths.validate()
    }

    pub fn initial_matrix(&self) -> Result<CouplingMatrix<T>> {
        CouplingMatrix::new(self.initial_detuning, self.omega_c, self.omega_d, self.coupling)
    }

    pub fn final_matrix(&self) -> Result<CouplingMatrix<T>> {
        CouplingMatrix::new(self.final_detuning, self.omega_c, self.omega_d, self.coupling)
    }

    /// Bare occupations (n_a, n_c, n_d) at endpoints i and f.
    pub fn endpoint_states(&self) -> Result<([T; 3], [T; 3])> {
        let (mi, mf) = (self.initial_matrix()?, self.final_matrix()?);
        match self.reservoir {
            ReservoirModel::Stroke => Ok((self.baths.phonon_state(&mi)?, self.baths.photon_state(&mf)?)),
            ReservoirModel::Shared => Ok((self.baths.phonon_state(&mi)?, self.baths.phonon_state(&mf)?)),
        }
    }

    /// Non-fatal notes when the detunings leave the engine regime.
    pub fn regime_warnings(&self) -> Vec<String> {
        let guard = RegimeGuard::<T>::default();
        let hi = self.omega_c.max(self.omega_d);
        let lo = self.omega_c.min(self.omega_d);
        let mut out = Vec::new();
        if !(self.initial_detuning > guard.large_multiple * hi) {
            out.push(format!(
                "initial detuning {} is not large compared with the sidemodes (max {})",
                self.initial_detuning, hi
            ));
        }
        if !(self.final_detuning < guard.small_fraction * lo) {
            out.push(format!(
                "final detuning {} is not small compared with the sidemodes (min {})",
                self.final_detuning, lo
            ));
        }
        out
    }
}

/// Energetics of one cycle; energies in ħγ0, frequencies in γ0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleResult<T> {
    pub work: T,
    pub heat_in: T,
    pub heat_out: T,
    pub efficiency: T,
    pub omega_i: T,
    pub omega_f: T,
    pub n_i: T,
    pub n_f: T,
}

impl<T: Real> CycleResult<T> {
    /// W = (Ω_i − Ω_f)(n_i − n_f), Q_in = Ω_i(n_i − n_f), Q_out = −Ω_f(n_i − n_f), η = W/Q_in.
    pub fn evaluate(omega_i: T, omega_f: T, n_i: T, n_f: T) -> Result<Self> {
        if !(omega_i > T::zero() && omega_f > T::zero()) {
            return Err(Error::invalid(
                "branch frequency",
                format!("must be positive at both endpoints, got {omega_i} and {omega_f}"),
            ));
        }
        let contrast = n_i - n_f;
        let work = (omega_i - omega_f) * contrast;
        let heat_in = omega_i * contrast;
        let heat_out = -omega_f * contrast;
        if !(work > T::zero()) {
            return Err(Error::NotAnEngine {
                work: work.as_f64(),
                heat_in: heat_in.as_f64(),
                efficiency: (heat_in != T::zero()).then(|| (work / heat_in).as_f64()),
            });
        }
        Ok(Self { work, heat_in, heat_out, efficiency: work / heat_in, omega_i, omega_f, n_i, n_f })
    }

    /// W − Q_in − Q_out.
    pub fn first_law_residual(&self) -> T {
        self.work - self.heat_in - self.heat_out
    }
}

/// Frequencies and branch occupations at the two cycle endpoints.
fn branch_endpoints<T: Real>(spec: &OttoCycleSpec<T>, branch: Branch) -> Result<(T, T, T, T)> {
    spec.validate()?;
    let si = polariton_spectrum(&spec.initial_matrix()?)?;
    let sf = polariton_spectrum(&spec.final_matrix()?)?;
    let (bare_i, bare_f) = spec.endpoint_states()?;
    Ok((si.frequency(branch), sf.frequency(branch), si.occupation(branch, &bare_i), sf.occupation(branch, &bare_f)))
}

/// (Ω_i, Ω_f, n_i, n_f) on the configured branch, with equilibrium occupations.
pub fn cycle_endpoints<T: Real>(spec: &OttoCycleSpec<T>) -> Result<(T, T, T, T)> {
    match spec.branch {
        CycleBranch::Polariton(branch) => branch_endpoints(spec, branch),
        CycleBranch::LowerTwoMode => {
            crate::twomode::two_mode_endpoints(spec, &crate::twomode::ValidityGuard::default())
        }
    }
}

/// Quasi-static cycle on the configured branch.
pub fn ideal_otto<T: Real>(spec: &OttoCycleSpec<T>) -> Result<CycleResult<T>> {
    let (wi, wf, ni, nf) = cycle_endpoints(spec)?;
    CycleResult::evaluate(wi, wf, ni, nf)
}

/// The same cycle evaluated on branch B. Typically `NotAnEngine`, whose
/// payload carries the (negative) work.
pub fn branch_b_diagnostic<T: Real>(spec: &OttoCycleSpec<T>) -> Result<CycleResult<T>> {
    let spec = OttoCycleSpec { branch: CycleBranch::Polariton(Branch::B), ..*spec };
    ideal_otto(&spec)
}

/// η ≈ 1 − (−Δ̄_f)/ω_d + (G̃²/ω_d)(1/ω_d + 1/ω_c), valid for
/// −Δ̄_i > 5 max(ω_c, ω_d) and −Δ̄_f < min(ω_c, ω_d)/10.
pub fn asymptotic_efficiency<T: Real>(spec: &OttoCycleSpec<T>) -> Result<T> {
    spec.validate()?;
    let hi = spec.omega_c.max(spec.omega_d);
    let lo = spec.omega_c.min(spec.omega_d);
    if !(spec.initial_detuning > T::lit(5.0) * hi && spec.final_detuning < lo / T::lit(10.0)) {
        return Err(Error::Regime {
            regime: "engine",
            detail: format!(
                "need -Δ_i > {} and -Δ_f < {}, got {} and {}",
                T::lit(5.0) * hi,
                lo / T::lit(10.0),
                spec.initial_detuning,
                spec.final_detuning
            ),
        });
    }
    let g2 = spec.coupling * spec.coupling;
    let wd = spec.omega_d;
    Ok(T::one() - spec.final_detuning / wd + g2 / wd * (T::one() / wd + T::one() / spec.omega_c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const WC: f64 = 173.27;
    const WD: f64 = 126.56;
    /// ħγ0/k_B for γ0 = 2π·10³ rad/s, in nK.
    const NK_PER_GAMMA0: f64 = 47.992_430;

    fn reference_spec(thermal: f64) -> OttoCycleSpec<f64> {
        OttoCycleSpec::new(10.0 * WC, 2.0, WC, WD, 4.0, BathSpec::phonon_only(thermal, 1e-3))
    }

    #[test]
    fn bose_factor_identities() {
        assert_eq!(bose_occupation(3.0, 0.0).unwrap(), 0.0);
        let n = bose_occupation(2.0f64.ln(), 1.0).unwrap();
        assert!((n - 1.0).abs() < 1e-15);
        let n = bose_occupation(0.712, 100.0 / NK_PER_GAMMA0).unwrap();
        assert!((n - 2.455).abs() < 1e-3, "{n}");
        assert!(matches!(bose_occupation(0.0, 1.0), Err(Error::DivergentOccupation { .. })));
        assert!(matches!(bose_occupation(-1.0, 1.0), Err(Error::DivergentOccupation { .. })));
        assert!(bose_occupation(1.0, -1.0).is_err());
    }

    #[test]
    fn uncoupled_occupations() {
        let baths = BathSpec::phonon_only(2.0, 1e-3);
        let s = polariton_spectrum(&CouplingMatrix::new(2.0, WC, WD, 0.0).unwrap()).unwrap();
        assert_eq!(polariton_occupation(&s, &baths, Branch::A).unwrap(), 0.0);
        let nd = bose_occupation(WD, 2.0).unwrap();
        assert_eq!(polariton_occupation(&s, &baths, Branch::C).unwrap(), nd);
    }

    #[test]
    fn equal_bath_occupations_pass_through() {
        let s = polariton_spectrum(&CouplingMatrix::new(150.0, WC, WD, 4.0).unwrap()).unwrap();
        for b in Branch::ALL {
            assert!((s.occupation(b, &[0.7, 0.7, 0.7]) - 0.7).abs() < 1e-14);
        }
    }

    #[test]
    fn reference_cycle_efficiency() {
        let r = ideal_otto(&reference_spec(2.0)).unwrap();
        assert!((r.omega_i - 126.55).abs() < 0.01);
        assert!((r.omega_f - 1.78).abs() < 0.01);
        assert!((r.efficiency - 0.986).abs() < 0.01);
        assert!((r.efficiency - (1.0 - r.omega_f / r.omega_i)).abs() < 1e-12);
        assert!(r.first_law_residual().abs() <= 1e-12 * r.heat_in.abs());
        assert!(r.heat_out <= 0.0);
        let approx = asymptotic_efficiency(&reference_spec(2.0)).unwrap();
        assert!((approx - r.efficiency).abs() < 1e-2);
        assert!(reference_spec(2.0).regime_warnings().is_empty());
    }

    #[test]
    fn degenerate_cycles_are_errors() {
        let e = CycleResult::evaluate(3.0, 3.0, 1.0, 0.0).unwrap_err();
        assert!(matches!(e, Error::NotAnEngine { efficiency: Some(x), .. } if x == 0.0));
        let e = CycleResult::evaluate(3.0, 1.0, 0.5, 0.5).unwrap_err();
        assert!(matches!(e, Error::NotAnEngine { efficiency: None, .. }));
        // Zero phonon temperature leaves no occupation contrast.
        assert!(matches!(ideal_otto(&reference_spec(0.0)), Err(Error::NotAnEngine { .. })));
        assert!(matches!(CycleResult::evaluate(3.0, -0.1, 1.0, 0.0), Err(Error::InvalidParameter { .. })));
        let mut flat = reference_spec(200.0);
        flat.initial_detuning = flat.final_detuning;
        assert!(matches!(ideal_otto(&flat), Err(Error::NotAnEngine { work, .. }) if work == 0.0));
    }

    #[test]
    fn branch_b_does_negative_work() {
        let mut spec = reference_spec(200.0);
        spec.reservoir = ReservoirModel::Shared;
        match branch_b_diagnostic(&spec) {
            Err(Error::NotAnEngine { work, .. }) => assert!(work < 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shared_reservoir_matches_direct_formula() {
        let mut spec = reference_spec(2.0);
        spec.reservoir = ReservoirModel::Shared;
        let r = ideal_otto(&spec).unwrap();
        let si = polariton_spectrum(&spec.initial_matrix().unwrap()).unwrap();
        let sf = polariton_spectrum(&spec.final_matrix().unwrap()).unwrap();
        let bare_i = spec.baths.phonon_state(&spec.initial_matrix().unwrap()).unwrap();
        let ni = si.occupation(Branch::A, &bare_i);
        let nf = sf.occupation(Branch::A, &bare_i);
        assert!((r.n_i - ni).abs() < 1e-15 && (r.n_f - nf).abs() < 1e-15);
    }

    #[test]
    fn photon_occupation_override() {
        let mut spec = reference_spec(2.0);
        spec.baths.photon_occupation = PhotonOccupation::Fixed(0.25);
        let (bi, bf) = spec.endpoint_states().unwrap();
        assert_eq!(bi[0], 0.25);
        assert_eq!(bf, [0.25, 0.0, 0.0]);
        spec.baths.photon_occupation = PhotonOccupation::Thermal;
        spec.baths.photon_thermal = 1.0;
        let (_, bf) = spec.endpoint_states().unwrap();
        assert!((bf[0] - bose_occupation(2.0, 1.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn invalid_detuning_order() {
        let mut spec = reference_spec(2.0);
        spec.initial_detuning = 1.0;
        assert!(matches!(ideal_otto(&spec), Err(Error::InvalidParameter { .. })));
        spec.initial_detuning = 100.0;
        spec.final_detuning = 80.0;
        assert_eq!(spec.regime_warnings().len(), 2);
        assert!(asymptotic_efficiency(&spec).is_err());
    }

    #[test]
    fn bare_limit_of_asymptotic_efficiency() {
        let mut spec = reference_spec(2.0);
        spec.coupling = 0.0;
        let eta = asymptotic_efficiency(&spec).unwrap();
        assert!((eta - (1.0 - 2.0 / WD)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn occupation_sum_rule_and_bounds(
            det in 0.1f64..1e3, g in 0.0f64..10.0, wc in 1.0f64..300.0, wd in 0.1f64..300.0,
            na in 0.0f64..5.0, nc in 0.0f64..5.0, nd in 0.0f64..5.0,
        ) {
            prop_assume!((wc - wd).abs() > 1e-3);
            let s = match polariton_spectrum(&CouplingMatrix::new(det, wc, wd, g).unwrap()) {
                Ok(s) => s,
                Err(_) => return Ok(()),
            };
            let bare = [na, nc, nd];
            let total: f64 = Branch::ALL.iter().map(|&b| s.occupation(b, &bare)).sum();
            prop_assert!((total - (na + nc + nd)).abs() <= 1e-12 * (1.0 + na + nc + nd));
            let lo = na.min(nc).min(nd);
            let hi = na.max(nc).max(nd);
            for b in Branch::ALL {
                let n = s.occupation(b, &bare);
                prop_assert!(n >= lo - 1e-12 && n <= hi + 1e-12);
            }
        }

        #[test]
        fn efficiency_is_temperature_independent(
            det_i in 400.0f64..3000.0, det_f in 0.1f64..10.0, g in 0.1f64..8.0,
            t1 in 0.5f64..10.0, t2 in 0.5f64..10.0,
        ) {
            let mut spec = reference_spec(t1);
            spec.initial_detuning = det_i;
            spec.final_detuning = det_f;
            spec.coupling = g;
            let a = match ideal_otto(&spec) {
                Ok(a) => a,
                Err(Error::InvalidParameter { .. }) => return Ok(()),
                Err(e) => panic!("{e}"),
            };
            spec.baths.phonon_thermal = t2;
            let b = ideal_otto(&spec).unwrap();
            prop_assert!((a.efficiency - b.efficiency).abs() < 1e-12);
            prop_assert!((a.efficiency - (1.0 - a.omega_f / a.omega_i)).abs() < 1e-12);
            prop_assert!(a.efficiency > 0.0 && a.efficiency < 1.0);
            prop_assert!(a.first_law_residual().abs() <= 1e-12 * a.heat_in.abs());
        }
    }
}
