//! Normal modes, Otto-cycle thermodynamics, shortcut-to-adiabaticity
//! protocols and Langevin dynamics for a ring Bose–Einstein condensate
//! coupled to a cavity photon through two counter-propagating sidemodes.
//!
//! All frequencies, rates and temperatures are in units of the photon
//! decay rate γ0 unless a type says otherwise. Every numerical routine is
//! generic over [`Real`]; the aliases below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cubic;
pub mod eigen;
pub mod error;
pub mod finitetime;
pub mod langevin;
pub mod ode;
pub mod params;
pub mod scalar;
pub mod spectrum;
pub mod sta;
pub mod thermo;
pub mod twomode;

pub use error::{Error, ErrorClass, Result};
pub use scalar::{CompensatedSum, Real};
pub use spectrum::{polariton_spectrum, Branch};
pub use thermo::{ideal_otto, ReservoirModel};

pub type Matrix = spectrum::CouplingMatrix<f64>;
pub type Spectrum = spectrum::PolaritonSpectrum<f64>;
pub type Baths = thermo::BathSpec<f64>;
pub type OttoSpec = thermo::OttoCycleSpec<f64>;
pub type Cycle = thermo::CycleResult<f64>;
pub type FiniteSpec = finitetime::FiniteCycleSpec<f64>;
pub type FiniteCycle = finitetime::FiniteCycleResult<f64>;
pub type Protocol = sta::StaProtocol<f64>;
pub type TwoMode = twomode::TwoModeParams<f64>;
pub type Ensemble = langevin::TrajectoryEnsemble<f64>;
