//! Experimental inputs, physical constants, and the bare-mode frequencies
//! derived from them.
//!
//! This is the only module that touches SI values. Everything it hands out is
//! expressed in units of the photon decay rate γ0 (frequencies), ħγ0
//! (energies) and k_B T / (ħγ0) (temperatures).

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Atomic mass unit, kg (CODATA 2018).
pub const AMU: f64 = 1.660_539_066_60e-27;

/// All experimental inputs in SI units (mass in amu).
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalConfig {
    pub atom_mass: f64,
    pub ring_radius: f64,
    /// Winding number L_p of the macroscopically occupied persistent current.
    pub winding_number: i64,
    /// Orbital angular momentum ℓ carried by the cavity fields.
    pub oam: u32,
    pub trap_frequency: f64,
    pub atom_number: u64,
    pub scattering_length: f64,
    /// Photon decay rate γ0 in rad/s; the unit of every derived frequency.
    pub photon_decay: f64,
    pub phonon_decay: f64,
    /// Linearized light-atom coupling G̃ in rad/s.
    pub coupling: f64,
    pub photon_temperature: f64,
    pub phonon_temperature: f64,
    /// Use Bogoliubov-dressed sidemode frequencies downstream instead of bare ones.
    pub use_dressed: bool,
}

impl PhysicalConfig {
    /// Sodium ring parameter set: L_p = 20, m = 23 amu, R = 10 µm,
    /// ω_ρ/2π = 840 Hz, N = 10⁴, a = 0.1 nm, γ0 = 2π·10³ s⁻¹, G̃ = 4γ0,
    /// T_phonon = 100 nK, γ_m = 10⁻³ γ0.
    pub fn sodium_ring(oam: u32) -> Self {
        let gamma0 = 2.0 * std::f64::consts::PI * 1.0e3;
        Self {
            atom_mass: 23.0,
            ring_radius: 10.0e-6,
            winding_number: 20,
            oam,
            trap_frequency: 2.0 * std::f64::consts::PI * 840.0,
            atom_number: 10_000,
            scattering_length: 0.1e-9,
            photon_decay: gamma0,
            phonon_decay: 1.0e-3 * gamma0,
            coupling: 4.0 * gamma0,
            photon_temperature: 0.0,
            phonon_temperature: 100.0e-9,
            use_dressed: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("atom_mass", self.atom_mass),
            ("ring_radius", self.ring_radius),
            ("trap_frequency", self.trap_frequency),
            ("scattering_length", self.scattering_length),
            ("photon_decay", self.photon_decay),
            ("phonon_decay", self.phonon_decay),
            ("coupling", self.coupling),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {value}")));
            }
        }
        for (name, value) in [
            ("photon_temperature", self.photon_temperature),
            ("phonon_temperature", self.phonon_temperature),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {value}")));
            }
        }
        if self.oam == 0 {
            return Err(Error::invalid("oam", "must be at least 1"));
        }
        Ok(())
    }

    pub fn units(&self) -> UnitSystem {
        UnitSystem { gamma0: self.photon_decay }
    }

    /// Rotational frequency scale ħ/(2mR²) in rad/s.
    fn rotational_quantum(&self) -> f64 {
        HBAR / (2.0 * self.atom_mass * AMU * self.ring_radius * self.ring_radius)
    }

    /// Converts every input the physics modules need into γ0 units.
    pub fn scaled<T: Real>(&self) -> Result<ScaledConfig<T>> {
        let frequencies = sidemode_frequencies(self)?;
        let units = self.units();
        Ok(ScaledConfig {
            frequencies,
            coupling: T::lit(units.frequency_to_gamma0(self.coupling)),
            phonon_decay: T::lit(units.frequency_to_gamma0(self.phonon_decay)),
            photon_thermal: T::lit(units.temperature_to_thermal(self.photon_temperature)),
            phonon_thermal: T::lit(units.temperature_to_thermal(self.phonon_temperature)),
            use_dressed: self.use_dressed,
        })
    }
}

/// Conversions between SI and γ0-relative quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitSystem {
    /// γ0 in rad/s.
    pub gamma0: f64,
}

impl UnitSystem {
    pub fn frequency_to_gamma0(&self, rad_per_s: f64) -> f64 {
        rad_per_s / self.gamma0
    }

    pub fn frequency_to_si(&self, scaled: f64) -> f64 {
        scaled * self.gamma0
    }

    /// k_B T / (ħ γ0).
    pub fn temperature_to_thermal(&self, kelvin: f64) -> f64 {
        K_B * kelvin / (HBAR * self.gamma0)
    }

    pub fn thermal_to_temperature(&self, thermal: f64) -> f64 {
        thermal * HBAR * self.gamma0 / K_B
    }

    /// Energy in ħγ0 units to joules.
    pub fn energy_to_si(&self, scaled: f64) -> f64 {
        scaled * HBAR * self.gamma0
    }

    /// Time in γ0⁻¹ units to seconds.
    pub fn time_to_si(&self, scaled: f64) -> f64 {
        scaled / self.gamma0
    }

    pub fn time_to_gamma0(&self, seconds: f64) -> f64 {
        seconds * self.gamma0
    }
}

/// Bare and dressed mode frequencies in γ0 units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedFrequencies<T> {
    /// ω_c, sidemode with winding number L_p + 2ℓ.
    pub omega_c: T,
    /// ω_d, sidemode with winding number L_p − 2ℓ.
    pub omega_d: T,
    /// Ω_p, rotational frequency of the persistent current.
    pub rotational: T,
    /// 4g̃N.
    pub interaction: T,
    pub omega_c_dressed: T,
    pub omega_d_dressed: T,
}

/// Everything downstream modules need, in γ0 units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledConfig<T> {
    pub frequencies: DerivedFrequencies<T>,
    pub coupling: T,
    pub phonon_decay: T,
    pub photon_thermal: T,
    pub phonon_thermal: T,
    pub use_dressed: bool,
}

impl<T: Real> ScaledConfig<T> {
    pub fn omega_c(&self) -> T {
        if self.use_dressed {
            self.frequencies.omega_c_dressed
        } else {
            self.frequencies.omega_c
        }
    }

    pub fn omega_d(&self) -> T {
        if self.use_dressed {
            self.frequencies.omega_d_dressed
        } else {
            self.frequencies.omega_d
        }
    }
}

/// ω_{c(d)} = ħ(L_p ± 2ℓ)²/(2mR²) and Ω_p = ħL_p²/(2mR²), with the
/// interaction scale and dressed values, all in γ0 units.
pub fn sidemode_frequencies<T: Real>(cfg: &PhysicalConfig) -> Result<DerivedFrequencies<T>> {
    cfg.validate()?;
    let quantum = cfg.rotational_quantum() / cfg.photon_decay;
    let two_l = 2 * i64::from(cfg.oam);
    let upper = (cfg.winding_number + two_l) as f64;
    let lower = (cfg.winding_number - two_l) as f64;
    let omega_c = quantum * upper * upper;
    let omega_d = quantum * lower * lower;
    let rotational = quantum * (cfg.winding_number as f64).powi(2);
    let interaction = interaction_scale(cfg);
    Ok(DerivedFrequencies {
        omega_c: T::lit(omega_c),
        omega_d: T::lit(omega_d),
        rotational: T::lit(rotational),
        interaction: T::lit(interaction),
        omega_c_dressed: T::lit(bogoliubov_dress(omega_c, interaction)),
        omega_d_dressed: T::lit(bogoliubov_dress(omega_d, interaction)),
    })
}

/// 4g̃N = gN/(πħ) = 2ω_ρ a N/(πR), in γ0 units.
pub fn interaction_scale(cfg: &PhysicalConfig) -> f64 {
    2.0 * cfg.trap_frequency * cfg.scattering_length * cfg.atom_number as f64
        / (std::f64::consts::PI * cfg.ring_radius)
        / cfg.photon_decay
}

/// Bogoliubov-dressed frequency √(ω(ω + 4g̃N)).
pub fn bogoliubov_dress<T: Real>(omega: T, interaction: T) -> T {
    (omega * (omega + interaction)).sqrt()
}

/// Exact ratio ω_c/ω_d = ((L_p + 2ℓ)/(L_p − 2ℓ))². `None` when L_p = 2ℓ.
pub fn sidemode_ratio(winding_number: i64, oam: u32) -> Option<Ratio<i64>> {
    let two_l = 2 * i64::from(oam);
    let upper = winding_number + two_l;
    let lower = winding_number - two_l;
    if lower == 0 {
        return None;
    }
    Some(Ratio::new(upper * upper, lower * lower))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn within(value: f64, target: f64, rel: f64) -> bool {
        ((value - target) / target).abs() <= rel
    }

    #[test]
    fn reference_sidemodes_match_known_values() {
        let f = sidemode_frequencies::<f64>(&PhysicalConfig::sodium_ring(130)).unwrap();
        assert!(within(f.omega_c, 173.27, 0.01), "omega_c = {}", f.omega_c);
        assert!(within(f.omega_d, 126.56, 0.01), "omega_d = {}", f.omega_d);
        let f = sidemode_frequencies::<f64>(&PhysicalConfig::sodium_ring(19)).unwrap();
        assert!(within(f.omega_c, 7.392, 0.01));
        assert!(within(f.omega_d, 0.712, 0.01));
    }

    #[test]
    fn lower_sidemode_vanishes_at_half_winding() {
        let mut cfg = PhysicalConfig::sodium_ring(10);
        cfg.winding_number = 20;
        let f = sidemode_frequencies::<f64>(&cfg).unwrap();
        assert_eq!(f.omega_d, 0.0);
        assert_eq!(f.omega_d_dressed, 0.0);
        assert!(sidemode_ratio(20, 10).is_none());
    }

    #[test]
    fn integer_ratios() {
        assert_eq!(sidemode_ratio(20, 12), Some(Ratio::from_integer(121)));
        assert_eq!(sidemode_ratio(20, 15), Some(Ratio::from_integer(25)));
    }

    #[test]
    fn interaction_scale_reference_and_limits() {
        let cfg = PhysicalConfig::sodium_ring(130);
        let g = interaction_scale(&cfg);
        assert!(within(g, 0.05, 0.10), "4gN = {g}");
        let mut empty = cfg.clone();
        empty.atom_number = 0;
        assert_eq!(interaction_scale(&empty), 0.0);
        let mut doubled = cfg.clone();
        doubled.atom_number *= 2;
        assert!((interaction_scale(&doubled) - 2.0 * g).abs() < 1e-15);
    }

    #[test]
    fn dressing_limits() {
        assert_eq!(bogoliubov_dress(3.0, 0.0), 3.0);
        assert_eq!(bogoliubov_dress(0.0, 0.05), 0.0);
        let dressed = bogoliubov_dress(126.56, 0.05);
        let shift = (dressed - 126.56) / 126.56;
        assert!(shift > 0.0 && shift < 2e-4, "shift {shift}");
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let mut cfg = PhysicalConfig::sodium_ring(130);
        cfg.oam = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = PhysicalConfig::sodium_ring(130);
        cfg.phonon_temperature = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = PhysicalConfig::sodium_ring(130);
        cfg.ring_radius = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameter { name: "ring_radius", .. })));
    }

    #[test]
    fn dressed_switch_selects_values() {
        let mut cfg = PhysicalConfig::sodium_ring(130);
        cfg.use_dressed = true;
        let s = cfg.scaled::<f64>().unwrap();
        assert_eq!(s.omega_c(), s.frequencies.omega_c_dressed);
        assert!(s.omega_d() > s.frequencies.omega_d);
    }

    proptest! {
        #[test]
        fn ratio_matches_float_frequencies(l in 1u32..400, lp in -60i64..60) {
            prop_assume!(lp != 2 * i64::from(l));
            let mut cfg = PhysicalConfig::sodium_ring(l);
            cfg.winding_number = lp;
            let f = sidemode_frequencies::<f64>(&cfg).unwrap();
            let r = sidemode_ratio(lp, l).unwrap();
            let exact = *r.numer() as f64 / *r.denom() as f64;
            prop_assert!((f.omega_c / f.omega_d - exact).abs() <= 1e-12 * exact);
        }

        #[test]
        fn dressing_inequality(omega in 0.0f64..1e3, g in 0.0f64..10.0) {
            let dressed = bogoliubov_dress(omega, g);
            prop_assert!(dressed >= omega * (1.0 - 1e-15));
            prop_assert!(dressed <= omega + 2.0 * g + 1e-12);
        }

        #[test]
        fn unit_round_trip(x in 1e-6f64..1e9, kelvin in 0.0f64..1e-3) {
            let u = PhysicalConfig::sodium_ring(130).units();
            let f = u.frequency_to_si(u.frequency_to_gamma0(x));
            prop_assert!((f - x).abs() <= 1e-12 * x);
            let t = u.thermal_to_temperature(u.temperature_to_thermal(kelvin));
            prop_assert!((t - kelvin).abs() <= 1e-12 * kelvin.max(1e-300));
            let s = u.time_to_gamma0(u.time_to_si(x));
            prop_assert!((s - x).abs() <= 1e-12 * x);
        }
    }
}
