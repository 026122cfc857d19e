//! JSON run configuration.
//!
//! Every block rejects unknown keys. Quantities are either a plain number,
//! read in the unit system chosen by `--units`, or `{"value": x, "unit": "..."}`.
//!
//! | kind        | `gamma0` plain     | `si` plain | tags                                   |
//! |-------------|--------------------|------------|----------------------------------------|
//! | frequency   | γ0                 | rad/s      | gamma0, rad/s, Hz, kHz, MHz            |
//! | time        | 1/γ0               | s          | gamma0, s, ms, us                      |
//! | temperature | ħγ0/k_B            | K          | gamma0, K, mK, uK, nK                  |
//! | length      | m                  | m          | m, mm, um, nm                          |
//! | mass        | amu                | amu        | amu, kg                                |
//!
//! `physical.photon_decay` defines γ0 itself, so a plain number is always rad/s.

use std::f64::consts::PI;

use serde::Deserialize;

use polariton_core::params::{PhysicalConfig, ScaledConfig, UnitSystem, AMU};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum UnitMode {
    #[default]
    Gamma0,
    Si,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Frequency,
    Time,
    Temperature,
    Length,
    Mass,
    Number,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tagged {
    pub value: f64,
    pub unit: String,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Plain(f64),
    Tagged(Tagged),
}

impl From<f64> for Quantity {
    fn from(x: f64) -> Self {
        Quantity::Plain(x)
    }
}

/// Resolves quantities into γ0 units (or SI base units for length and mass).
#[derive(Clone, Copy, Debug)]
pub struct Units {
    pub mode: UnitMode,
    pub system: UnitSystem,
}

impl Units {
    pub fn resolve(&self, q: &Quantity, kind: Kind, field: &str) -> Result<f64, CliError> {
        let v = match q {
            Quantity::Plain(x) => match (kind, self.mode) {
                (Kind::Frequency, UnitMode::Si) => self.system.frequency_to_gamma0(*x),
                (Kind::Time, UnitMode::Si) => self.system.time_to_gamma0(*x),
                (Kind::Temperature, UnitMode::Si) => self.system.temperature_to_thermal(*x),
                _ => *x,
            },
            Quantity::Tagged(Tagged { value, unit }) => self.tagged(*value, unit, kind, field)?,
        };
        if !v.is_finite() {
            return Err(CliError::Validation(format!("`{field}` must be finite")));
        }
        Ok(v)
    }

    fn tagged(&self, x: f64, unit: &str, kind: Kind, field: &str) -> Result<f64, CliError> {
        let s = &self.system;
        let v = match (kind, unit) {
            (Kind::Frequency, "gamma0") => x,
            (Kind::Frequency, "rad/s") => s.frequency_to_gamma0(x),
            (Kind::Frequency, "Hz") => s.frequency_to_gamma0(2.0 * PI * x),
            (Kind::Frequency, "kHz") => s.frequency_to_gamma0(2.0 * PI * x * 1e3),
            (Kind::Frequency, "MHz") => s.frequency_to_gamma0(2.0 * PI * x * 1e6),
            (Kind::Time, "gamma0") => x,
            (Kind::Time, "s") => s.time_to_gamma0(x),
            (Kind::Time, "ms") => s.time_to_gamma0(x * 1e-3),
            (Kind::Time, "us") => s.time_to_gamma0(x * 1e-6),
            (Kind::Temperature, "gamma0") => x,
            (Kind::Temperature, "K") => s.temperature_to_thermal(x),
            (Kind::Temperature, "mK") => s.temperature_to_thermal(x * 1e-3),
            (Kind::Temperature, "uK") => s.temperature_to_thermal(x * 1e-6),
            (Kind::Temperature, "nK") => s.temperature_to_thermal(x * 1e-9),
            (Kind::Length, "m") => x,
            (Kind::Length, "mm") => x * 1e-3,
            (Kind::Length, "um") => x * 1e-6,
            (Kind::Length, "nm") => x * 1e-9,
            (Kind::Mass, "amu") => x,
            (Kind::Mass, "kg") => x / AMU,
            _ => {
                return Err(CliError::Validation(format!("`{field}`: unit `{unit}` not accepted for a {kind:?} quantity")))
            }
        };
        Ok(v)
    }
}

/// Frequencies in rad/s for the SI-level physical config.
fn frequency_si(q: &Quantity, mode: UnitMode, gamma0: f64, field: &str) -> Result<f64, CliError> {
    let units = Units { mode, system: UnitSystem { gamma0 } };
    Ok(units.resolve(q, Kind::Frequency, field)? * gamma0)
}

fn temperature_si(q: &Quantity, mode: UnitMode, gamma0: f64, field: &str) -> Result<f64, CliError> {
    let units = Units { mode, system: UnitSystem { gamma0 } };
    Ok(units.system.thermal_to_temperature(units.resolve(q, Kind::Temperature, field)?))
}

/// Experimental inputs. Absent fields take the sodium-ring values with ℓ = 130.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalBlock {
    pub atom_mass: Option<Quantity>,
    pub ring_radius: Option<Quantity>,
    pub winding_number: Option<i64>,
    pub oam: Option<u32>,
    pub trap_frequency: Option<Quantity>,
    pub atom_number: Option<u64>,
    pub scattering_length: Option<Quantity>,
    pub photon_decay: Option<Quantity>,
    pub phonon_decay: Option<Quantity>,
    pub coupling: Option<Quantity>,
    pub photon_temperature: Option<Quantity>,
    pub phonon_temperature: Option<Quantity>,
    pub use_dressed: Option<bool>,
}

pub const DEFAULT_OAM: u32 = 130;

impl PhysicalBlock {
    pub fn to_config(&self, mode: UnitMode) -> Result<PhysicalConfig, CliError> {
        let mut cfg = PhysicalConfig::sodium_ring(self.oam.unwrap_or(DEFAULT_OAM));
        let fixed = Units { mode, system: UnitSystem { gamma0: cfg.photon_decay } };
        if let Some(q) = &self.photon_decay {
            cfg.photon_decay = match q {
                Quantity::Plain(x) => *x,
                Quantity::Tagged(t) if t.unit == "gamma0" => {
                    return Err(CliError::Validation("`photon_decay` defines γ0 and cannot be tagged `gamma0`".into()))
                }
                q => fixed.resolve(q, Kind::Frequency, "photon_decay")? * fixed.system.gamma0,
            };
        }
        let g0 = cfg.photon_decay;
        if let Some(q) = &self.atom_mass {
            cfg.atom_mass = fixed.resolve(q, Kind::Mass, "atom_mass")?;
        }
        if let Some(q) = &self.ring_radius {
            cfg.ring_radius = fixed.resolve(q, Kind::Length, "ring_radius")?;
        }
        if let Some(q) = &self.scattering_length {
            cfg.scattering_length = fixed.resolve(q, Kind::Length, "scattering_length")?;
        }
        if let Some(w) = self.winding_number {
            cfg.winding_number = w;
        }
        if let Some(n) = self.atom_number {
            cfg.atom_number = n;
        }
        if let Some(q) = &self.trap_frequency {
            cfg.trap_frequency = frequency_si(q, mode, g0, "trap_frequency")?;
        }
        if let Some(q) = &self.phonon_decay {
            cfg.phonon_decay = frequency_si(q, mode, g0, "phonon_decay")?;
        } else {
            cfg.phonon_decay = 1e-3 * g0;
        }
        if let Some(q) = &self.coupling {
            cfg.coupling = frequency_si(q, mode, g0, "coupling")?;
        } else {
            cfg.coupling = 4.0 * g0;
        }
        if let Some(q) = &self.photon_temperature {
            cfg.photon_temperature = temperature_si(q, mode, g0, "photon_temperature")?;
        }
        if let Some(q) = &self.phonon_temperature {
            cfg.phonon_temperature = temperature_si(q, mode, g0, "phonon_temperature")?;
        }
        if let Some(d) = self.use_dressed {
            cfg.use_dressed = d;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// Uniform or logarithmic grid on one axis.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    #[serde(default)]
    pub name: Option<String>,
    pub min: Quantity,
    pub max: Quantity,
    pub n_points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Axis {
    pub fn values(&self, units: &Units, kind: Kind, field: &str) -> Result<Vec<f64>, CliError> {
        let lo = units.resolve(&self.min, kind, field)?;
        let hi = units.resolve(&self.max, kind, field)?;
        grid(lo, hi, self.n_points, self.scale, field)
    }
}

pub fn grid(lo: f64, hi: f64, n: usize, scale: Scale, field: &str) -> Result<Vec<f64>, CliError> {
    if n < 2 {
        return Err(CliError::Validation(format!("`{field}`: n_points must be at least 2, got {n}")));
    }
    if !(lo < hi) {
        return Err(CliError::Validation(format!("`{field}`: need min < max, got [{lo}, {hi}]")));
    }
    if scale == Scale::Log && !(lo > 0.0) {
        return Err(CliError::Validation(format!("`{field}`: log axis needs min > 0")));
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|k| {
            if k == 0 {
                return lo;
            }
            if k == n - 1 {
                return hi;
            }
            let s = k as f64 / last;
            match scale {
                Scale::Linear => lo + (hi - lo) * s,
                Scale::Log => (lo.ln() + (hi.ln() - lo.ln()) * s).exp(),
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumBlock {
    pub detuning: Axis,
    /// Replaces the physical coupling, e.g. 0 for the bare lines.
    pub coupling: Option<Quantity>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfieldBlock {
    pub detuning: Quantity,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PhotonOccupationInput {
    Named(String),
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OttoBlock {
    pub detuning_i: Quantity,
    pub detuning_f: Quantity,
    /// "A" (default) or "two-mode".
    pub branch: Option<String>,
    /// "stroke" (default) or "shared".
    pub reservoir: Option<String>,
    /// "zero" (default), "thermal", or a fixed occupation.
    pub photon_occupation: Option<PhotonOccupationInput>,
    /// Also evaluate the same cycle on branch B.
    pub branch_b_diagnostic: Option<bool>,
    /// Two-mode guard on −Δ̄/ω_c and G̃/ω_c (default 0.2).
    pub max_detuning_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub axes: Vec<Axis>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaBlock {
    /// "polynomial" (default) or "trigonometric".
    pub ansatz: Option<String>,
    pub tau: Option<Quantity>,
    pub omega_i: Option<Quantity>,
    pub omega_f: Option<Quantity>,
    pub detuning_i: Option<Quantity>,
    pub detuning_f: Option<Quantity>,
    pub samples: Option<usize>,
    /// Integrate the Husimi parameter Q* (default true).
    pub q_star: Option<bool>,
    /// Also report Q* of a linear Ω ramp of equal duration.
    pub linear_reference: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteBlock {
    pub tau_bc: Quantity,
    pub tau_da: Quantity,
    /// "bare" (default) or "hopfield".
    pub rates: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoModeBlock {
    /// Dispersion grid for Ω_±.
    pub detuning: Option<Axis>,
    /// Efficiency grid over (−Δ̄_f, G̃) at fixed −Δ̄_i.
    pub detuning_i: Option<Quantity>,
    pub detuning_f: Option<Axis>,
    pub coupling: Option<Axis>,
    pub max_detuning_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InitialInput {
    Named(String),
    Thermal { thermal: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LangevinBlock {
    /// "polariton" (default) or "bare".
    pub modes: Option<String>,
    /// Polariton branch: "A" (default), "C" or "B".
    pub branch: Option<String>,
    pub detuning: Quantity,
    pub dt: Quantity,
    pub horizon: Quantity,
    pub trajectories: usize,
    pub record_every: Option<usize>,
    /// "euler-maruyama" (default) or "exact".
    pub stepper: Option<String>,
    /// "stationary" (default), "vacuum", or {"thermal": [n, ...]}.
    pub initial: Option<InitialInput>,
    /// CSV with columns t, omega on a uniform grid starting at t = 0.
    pub schedule: Option<String>,
    pub damping: Option<Quantity>,
    pub occupation: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<String>,
    pub format: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub physical: PhysicalBlock,
    pub spectrum: Option<SpectrumBlock>,
    pub hopfield: Option<HopfieldBlock>,
    pub otto: Option<OttoBlock>,
    pub sweep: Option<SweepBlock>,
    pub sta: Option<StaBlock>,
    pub finite: Option<FiniteBlock>,
    pub twomode: Option<TwoModeBlock>,
    pub langevin: Option<LangevinBlock>,
    pub output: Option<OutputBlock>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    fn present(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        for (name, on) in [
            ("spectrum", self.spectrum.is_some()),
            ("hopfield", self.hopfield.is_some()),
            ("otto", self.otto.is_some()),
            ("sweep", self.sweep.is_some()),
            ("sta", self.sta.is_some()),
            ("finite", self.finite.is_some()),
            ("twomode", self.twomode.is_some()),
            ("langevin", self.langevin.is_some()),
        ] {
            if on {
                v.push(name);
            }
        }
        v
    }

    /// Rejects missing required blocks and blocks the command would ignore.
    pub fn check_blocks(&self, command: &str, required: &[&str], optional: &[&str]) -> Result<(), CliError> {
        let present = self.present();
        for r in required {
            if !present.contains(r) {
                return Err(CliError::Validation(format!("`{command}` needs a `{r}` block")));
            }
        }
        for p in present {
            if !required.contains(&p) && !optional.contains(&p) {
                return Err(CliError::Validation(format!("`{command}` does not use the `{p}` block")));
            }
        }
        Ok(())
    }
}

/// Physical config plus its γ0-scaled view.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub physical: PhysicalConfig,
    pub scaled: ScaledConfig<f64>,
    pub units: Units,
}

impl Resolved {
    pub fn new(block: &PhysicalBlock, mode: UnitMode) -> Result<Self, CliError> {
        let physical = block.to_config(mode)?;
        let scaled = physical.scaled()?;
        let units = Units { mode, system: physical.units() };
        Ok(Self { physical, scaled, units })
    }

    pub fn with_oam(&self, oam: u32) -> Result<Self, CliError> {
        let mut physical = self.physical.clone();
        physical.oam = oam;
        physical.validate()?;
        let scaled = physical.scaled()?;
        Ok(Self { physical, scaled, units: self.units })
    }

    pub fn omega_c(&self) -> f64 {
        self.scaled.omega_c()
    }

    pub fn omega_d(&self) -> f64 {
        self.scaled.omega_d()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn units(mode: UnitMode) -> Units {
        Units { mode, system: UnitSystem { gamma0: 2.0 * PI * 1e3 } }
    }

    #[test]
    fn plain_and_tagged_quantities() {
        let u = units(UnitMode::Gamma0);
        assert_eq!(u.resolve(&Quantity::Plain(4.0), Kind::Frequency, "x").unwrap(), 4.0);
        let khz = Quantity::Tagged(Tagged { value: 1.0, unit: "kHz".into() });
        assert!((u.resolve(&khz, Kind::Frequency, "x").unwrap() - 1.0).abs() < 1e-15);
        let si = units(UnitMode::Si);
        let v = si.resolve(&Quantity::Plain(2.0 * PI * 2e3), Kind::Frequency, "x").unwrap();
        assert!((v - 2.0).abs() < 1e-14);
        let bad = Quantity::Tagged(Tagged { value: 1.0, unit: "nK".into() });
        assert!(u.resolve(&bad, Kind::Frequency, "x").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse(r#"{"physical": {"oam": 19, "coupling_typo": 1}}"#).is_err());
        assert!(RunConfig::parse(r#"{"otto": {"detuning_i": 10, "detuning_f": 2, "extra": 0}}"#).is_err());
        assert!(RunConfig::parse(r#"{"hopfield": {"detuning": {"value": 1, "unit": "gamma0", "x": 2}}}"#).is_err());
        assert!(RunConfig::parse(r#"{"physical": {"oam": 19}}"#).is_ok());
    }

    #[test]
    fn defaults_are_the_sodium_ring() {
        let r = Resolved::new(&PhysicalBlock::default(), UnitMode::Gamma0).unwrap();
        assert!((r.scaled.coupling - 4.0).abs() < 1e-12);
        assert!((r.scaled.phonon_decay - 1e-3).abs() < 1e-15);
        assert!((r.omega_c() / 173.27 - 1.0).abs() < 0.01);
    }

    #[test]
    fn temperatures_in_both_unit_systems() {
        let block = PhysicalBlock {
            phonon_temperature: Some(Quantity::Tagged(Tagged { value: 100.0, unit: "nK".into() })),
            ..Default::default()
        };
        let a = Resolved::new(&block, UnitMode::Gamma0).unwrap();
        let block = PhysicalBlock { phonon_temperature: Some(Quantity::Plain(100e-9)), ..Default::default() };
        let b = Resolved::new(&block, UnitMode::Si).unwrap();
        assert!((a.scaled.phonon_thermal - b.scaled.phonon_thermal).abs() < 1e-12);
        assert!((a.scaled.phonon_thermal - 100.0 / 47.992430).abs() < 1e-4);
    }

    #[test]
    fn grids() {
        assert_eq!(grid(1.0, 3.0, 3, Scale::Linear, "g").unwrap(), vec![1.0, 2.0, 3.0]);
        let g = grid(1.0, 100.0, 3, Scale::Log, "g").unwrap();
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert!(grid(1.0, 1.0, 3, Scale::Linear, "g").is_err());
        assert!(grid(0.0, 1.0, 3, Scale::Log, "g").is_err());
        assert!(grid(0.0, 1.0, 1, Scale::Linear, "g").is_err());
    }

    #[test]
    fn block_policy() {
        let cfg = RunConfig::parse(r#"{"otto": {"detuning_i": 10, "detuning_f": 2}}"#).unwrap();
        assert!(cfg.check_blocks("otto", &["otto"], &[]).is_ok());
        assert!(cfg.check_blocks("spectrum", &["spectrum"], &[]).is_err());
        assert!(cfg.check_blocks("finite", &["finite", "otto"], &[]).is_err());
    }
}
