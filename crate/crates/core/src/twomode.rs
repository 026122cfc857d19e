//! Two-mode reduction: the fast sidemode `c` is slaved to the photon,
//! c ≈ −(G̃/ω_c)a, leaving a beam-splitter coupling between `a` and `d`
//! with the photon detuning shifted to −Δ̄_eff = −Δ̄ − G̃²/ω_c.
//!
//! Squeezing (counter-rotating) corrections are not modeled; they are part
//! of the approximation error together with the O(ω_d/ω_c) slaving error.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectrum::CouplingMatrix;
use crate::thermo::{CycleResult, OttoCycleSpec};

/// Regression bound C in |Ω_− − ω_A| ≤ C (ω_d/ω_c) ω_d over the validity
/// regime at ℓ = 19, G̃ = 0.2γ0 (observed maximum 3.24e-3).
pub const LOWER_BRANCH_DEVIATION_BOUND: f64 = 5e-3;

/// Limits on −Δ̄/ω_c and G̃/ω_c for the elimination to be trusted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidityGuard<T> {
    pub max_detuning_ratio: T,
    pub max_coupling_ratio: T,
}

impl<T: Real> Default for ValidityGuard<T> {
    fn default() -> Self {
        Self { max_detuning_ratio: T::lit(0.2), max_coupling_ratio: T::lit(0.2) }
    }
}

impl<T: Real> ValidityGuard<T> {
    pub fn with_detuning_ratio(ratio: T) -> Self {
        Self { max_detuning_ratio: ratio, ..Self::default() }
    }

    pub fn check(&self, m: &CouplingMatrix<T>) -> Result<()> {
        let wc = m.omega_c;
        let fail = |detail: String| Error::Validity {
            detail,
            coupling_ratio: (m.coupling / wc).as_f64(),
            slow_ratio: (m.omega_d / wc).as_f64(),
            detuning_ratio: (m.detuning / wc).as_f64(),
        };
        if !(wc > T::zero()) {
            return Err(fail(format!("eliminated mode frequency {wc} must be positive")));
        }
        if m.detuning < T::zero() {
            return Err(fail(format!("detuning {} must be >= 0", m.detuning)));
        }
        if !(m.detuning < self.max_detuning_ratio * wc) {
            return Err(fail(format!("-Δ/ω_c must be below {}", self.max_detuning_ratio)));
        }
        if !(m.coupling < self.max_coupling_ratio * wc) {
            return Err(fail(format!("G/ω_c must be below {}", self.max_coupling_ratio)));
        }
        Ok(())
    }
}

/// Reduced parameters, γ0 units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeParams<T> {
    /// −Δ̄
    pub detuning: T,
    /// −Δ̄_eff = −Δ̄ − G̃²/ω_c
    pub effective_detuning: T,
    pub omega_d: T,
    pub omega_c: T,
    pub coupling: T,
}

/// Lower (Ω_−) or upper (Ω_+) two-mode branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoModeBranch {
    Lower,
    Upper,
}

pub fn eliminate_c<T: Real>(m: &CouplingMatrix<T>, guard: &ValidityGuard<T>) -> Result<TwoModeParams<T>> {
    m.validate()?;
    guard.check(m)?;
    Ok(TwoModeParams {
        detuning: m.detuning,
        effective_detuning: m.detuning - m.coupling * m.coupling / m.omega_c,
        omega_d: m.omega_d,
        omega_c: m.omega_c,
        coupling: m.coupling,
    })
}

/// (Ω_−, Ω_+) = ½(ω_d − Δ̄_eff) ∓ √(¼(ω_d + Δ̄_eff)² + G̃²).
pub fn two_mode_frequencies<T: Real>(p: &TwoModeParams<T>) -> (T, T) {
    let mean = (p.omega_d + p.effective_detuning) * T::half();
    let radius = ((p.omega_d - p.effective_detuning) * T::half()).hypot(p.coupling);
    let upper = mean + radius;
    let product = p.omega_d * p.effective_detuning - p.coupling * p.coupling;
    let lower = if mean > T::zero() { product / upper } else { mean - radius };
    (lower, upper)
}

/// Unit weights (X_a, X_d) of a two-mode branch, photon component non-negative.
pub fn two_mode_weights<T: Real>(p: &TwoModeParams<T>, branch: TwoModeBranch) -> [T; 2] {
    let (lower, upper) = two_mode_frequencies(p);
    let omega = match branch {
        TwoModeBranch::Lower => lower,
        TwoModeBranch::Upper => upper,
    };
    let g = p.coupling;
    let from_photon_row = [g, omega - p.effective_detuning];
    let from_phonon_row = [omega - p.omega_d, g];
    let norm_a = from_photon_row[0].hypot(from_photon_row[1]);
    let norm_b = from_phonon_row[0].hypot(from_phonon_row[1]);
    let (v, norm) = if norm_a >= norm_b { (from_photon_row, norm_a) } else { (from_phonon_row, norm_b) };
    if norm == T::zero() {
        return match branch {
            TwoModeBranch::Lower => [T::one(), T::zero()],
            TwoModeBranch::Upper => [T::zero(), T::one()],
        };
    }
    let mut w = [v[0] / norm, v[1] / norm];
    if w[0] < T::zero() || (w[0] == T::zero() && w[1] < T::zero()) {
        w = [-w[0], -w[1]];
    }
    w
}

/// Ω_− and its occupation at both cycle endpoints, (Ω_i, Ω_f, n_i, n_f).
pub fn two_mode_endpoints<T: Real>(spec: &OttoCycleSpec<T>, guard: &ValidityGuard<T>) -> Result<(T, T, T, T)> {
    if !(spec.final_detuning > T::zero()) {
        return Err(Error::invalid("final_detuning", format!("must be positive, got {}", spec.final_detuning)));
    }
    if spec.initial_detuning < spec.final_detuning {
        return Err(Error::invalid("initial_detuning", "must not be below the final detuning"));
    }
    spec.baths.validate()?;
    let mi = spec.initial_matrix()?;
    let mf = spec.final_matrix()?;
    let pi = eliminate_c(&mi, guard)?;
    let pf = eliminate_c(&mf, guard)?;
    let (bare_i, bare_f) = spec.endpoint_states()?;
    let occupation = |p: &TwoModeParams<T>, bare: &[T; 3]| {
        let [xa, xd] = two_mode_weights(p, TwoModeBranch::Lower);
        xa * xa * bare[0] + xd * xd * bare[2]
    };
    Ok((
        two_mode_frequencies(&pi).0,
        two_mode_frequencies(&pf).0,
        occupation(&pi, &bare_i),
        occupation(&pf, &bare_f),
    ))
}

/// Quasi-static cycle on Ω_−; the bath recipe is that of the three-mode cycle.
pub fn two_mode_otto<T: Real>(spec: &OttoCycleSpec<T>, guard: &ValidityGuard<T>) -> Result<CycleResult<T>> {
    let (wi, wf, ni, nf) = two_mode_endpoints(spec, guard)?;
    CycleResult::evaluate(wi, wf, ni, nf)
}
