//! Polaritonic normal modes of the linearized three-mode Hamiltonian
//!
//! ```text
//!     H/ħ = −Δ̄ a†a + ω_c c†c + ω_d d†d + G̃(a†c + ac†) + G̃(a†d + ad†)
//! ```
//!
//! with coefficient matrix
//!
//! ```text
//!         ⎡ −Δ̄  G̃   G̃  ⎤
//!     Λ = ⎢ G̃   ω_c  0  ⎥
//!         ⎣ G̃   0   ω_d ⎦
//! ```
//!
//! Branches are labeled by sorted frequency: A (lowest), C (middle),
//! B (highest). Hopfield columns are the eigenvectors of Λ with the photon
//! component chosen non-negative.
//!
//! Roots come from Cardano's formula and are then refined on the secular
//! equation `(−Δ̄ − λ) + G̃²/(λ − ω_c) + G̃²/(λ − ω_d) = 0`, solved in the
//! offset from the nearest sidemode pole. That keeps `λ − ω_{c,d}` accurate
//! to full relative precision, which the weights `G̃/(λ − ω_{c,d})` need
//! when a branch hugs a bare sidemode.

use crate::cubic::cardano_roots;
use crate::eigen::jacobi_eigen;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Two roots closer than this (γ0 units) are treated as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;
/// Distance (γ0 units) below which a frequency is considered to sit on a bare sidemode.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Polariton branch, in ascending frequency order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    A,
    C,
    B,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::A, Branch::C, Branch::B];

    pub fn index(self) -> usize {
        match self {
            Branch::A => 0,
            Branch::C => 1,
            Branch::B => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::A => "A",
            Branch::C => "C",
            Branch::B => "B",
        }
    }
}

/// Bare mode: cavity photon `a`, sidemodes `c` and `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BareMode {
    Photon,
    SidemodeC,
    SidemodeD,
}

impl BareMode {
    pub const ALL: [BareMode; 3] = [BareMode::Photon, BareMode::SidemodeC, BareMode::SidemodeD];

    pub fn index(self) -> usize {
        match self {
            BareMode::Photon => 0,
            BareMode::SidemodeC => 1,
            BareMode::SidemodeD => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BareMode::Photon => "a",
            BareMode::SidemodeC => "c",
            BareMode::SidemodeD => "d",
        }
    }
}

/// Parameters of Λ, all in γ0 units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingMatrix<T> {
    /// −Δ̄, the photon diagonal entry (positive in the engine regime).
    pub detuning: T,
    pub omega_c: T,
    pub omega_d: T,
    /// G̃ ≥ 0.
    pub coupling: T,
}

impl<T: Real> CouplingMatrix<T> {
    pub fn new(detuning: T, omega_c: T, omega_d: T, coupling: T) -> Result<Self> {
        let m = Self { detuning, omega_c, omega_d, coupling };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.detuning.is_finite() {
            return Err(Error::invalid("detuning", "must be finite"));
        }
        for (name, v) in [("omega_c", self.omega_c), ("omega_d", self.omega_d), ("coupling", self.coupling)] {
            if !(v.is_finite() && v >= T::zero()) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Same parameters at a different detuning.
    pub fn at_detuning(&self, detuning: T) -> Self {
        Self { detuning, ..*self }
    }

    pub fn entries(&self) -> [[T; 3]; 3] {
        let g = self.coupling;
        let z = T::zero();
        [[self.detuning, g, g], [g, self.omega_c, z], [g, z, self.omega_d]]
    }

    pub fn trace(&self) -> T {
        self.detuning + self.omega_c + self.omega_d
    }

    pub fn determinant(&self) -> T {
        let g2 = self.coupling * self.coupling;
        self.detuning * self.omega_c * self.omega_d - g2 * (self.omega_c + self.omega_d)
    }

    /// (c1, c2, c3) of λ³ + c1λ² + c2λ + c3 = det(λ − Λ).
    pub fn characteristic_coefficients(&self) -> (T, T, T) {
        let bar = -self.detuning;
        let (wc, wd) = (self.omega_c, self.omega_d);
        let g2 = self.coupling * self.coupling;
        let c1 = bar - wc - wd;
        let c2 = wc * wd - bar * (wc + wd) - T::two() * g2;
        let c3 = g2 * (wc + wd) + bar * wc * wd;
        (c1, c2, c3)
    }
}

/// Free-function form of [`CouplingMatrix::characteristic_coefficients`].
pub fn characteristic_coefficients<T: Real>(m: &CouplingMatrix<T>) -> (T, T, T) {
    m.characteristic_coefficients()
}

/// Branch frequencies and Hopfield mixing matrix at one detuning.
#[derive(Clone, Debug, PartialEq)]
pub struct PolaritonSpectrum<T> {
    pub matrix: CouplingMatrix<T>,
    /// ω_A ≤ ω_C ≤ ω_B.
    pub frequencies: [T; 3],
    /// `hopfield[k][j]`: weight of bare mode `k` (a, c, d) in branch `j` (A, C, B).
    pub hopfield: [[T; 3]; 3],
    /// N_j = 1/X_a^(j); infinite for a branch with no photon content.
    pub normalizers: [T; 3],
}

impl<T: Real> PolaritonSpectrum<T> {
    pub fn frequency(&self, branch: Branch) -> T {
        self.frequencies[branch.index()]
    }

    /// (X_a, X_c, X_d) of a branch.
    pub fn weights(&self, branch: Branch) -> [T; 3] {
        let j = branch.index();
        [self.hopfield[0][j], self.hopfield[1][j], self.hopfield[2][j]]
    }

    pub fn weight(&self, mode: BareMode, branch: Branch) -> T {
        self.hopfield[mode.index()][branch.index()]
    }

    /// |X_a|² n_a + |X_c|² n_c + |X_d|² n_d for bare occupations (n_a, n_c, n_d).
    pub fn occupation(&self, branch: Branch, bare: &[T; 3]) -> T {
        self.weights(branch).iter().zip(bare).map(|(x, n)| *x * *x * *n).sum()
    }

    /// ‖Λv − ωv‖ for the branch eigenvector.
    pub fn eigen_residual(&self, branch: Branch) -> T {
        let a = self.matrix.entries();
        let v = self.weights(branch);
        let w = self.frequency(branch);
        (0..3)
            .map(|i| {
                let r = (0..3).map(|k| a[i][k] * v[k]).sum::<T>() - w * v[i];
                r * r
            })
            .sum::<T>()
            .sqrt()
    }
}

/// Exact normal modes of Λ.
pub fn polariton_spectrum<T: Real>(m: &CouplingMatrix<T>) -> Result<PolaritonSpectrum<T>> {
    m.validate()?;
    if m.coupling == T::zero() || m.coupling * m.coupling == T::zero() {
        return Ok(bare_spectrum(m));
    }
    if m.omega_c == m.omega_d {
        return jacobi_spectrum(m);
    }

    let (c1, c2, c3) = m.characteristic_coefficients();
    let estimates = match cardano_roots(c1, c2, c3) {
        Ok(r) => r,
        Err(Error::ComplexRoot { .. }) => jacobi_eigen(m.entries())?.values,
        Err(e) => return Err(e),
    };

    let secular = Secular::new(m);
    let (lo, hi) = secular.gershgorin();
    let (p_lo, p_hi) = if m.omega_c < m.omega_d { (m.omega_c, m.omega_d) } else { (m.omega_d, m.omega_c) };
    let brackets = [(lo, p_lo), (p_lo, p_hi), (p_hi, hi)];

    let mut frequencies = [T::zero(); 3];
    let mut hopfield = [[T::zero(); 3]; 3];
    let mut normalizers = [T::zero(); 3];
    for (j, (&(a, b), &estimate)) in brackets.iter().zip(&estimates).enumerate() {
        let root = secular.solve(estimate, a, b);
        let r_c = m.coupling / root.offset_c;
        let r_d = m.coupling / root.offset_d;
        let norm = T::one().hypot(r_c).hypot(r_d);
        frequencies[j] = root.lambda;
        hopfield[0][j] = T::one() / norm;
        hopfield[1][j] = r_c / norm;
        hopfield[2][j] = r_d / norm;
        normalizers[j] = norm;
    }
    check_degeneracy(&frequencies)?;
    Ok(PolaritonSpectrum { matrix: *m, frequencies, hopfield, normalizers })
}

fn check_degeneracy<T: Real>(f: &[T; 3]) -> Result<()> {
    for k in 0..2 {
        if f[k + 1] - f[k] < T::lit(DEGENERACY_TOLERANCE) {
            return Err(Error::DegenerateSpectrum { lower: f[k].as_f64(), upper: f[k + 1].as_f64() });
        }
    }
    Ok(())
}

fn bare_spectrum<T: Real>(m: &CouplingMatrix<T>) -> PolaritonSpectrum<T> {
    let diag = [m.detuning, m.omega_c, m.omega_d];
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let mut hopfield = [[T::zero(); 3]; 3];
    let mut normalizers = [T::infinity(); 3];
    for (j, &k) in order.iter().enumerate() {
        hopfield[k][j] = T::one();
        if k == 0 {
            normalizers[j] = T::one();
        }
    }
    PolaritonSpectrum { matrix: *m, frequencies: order.map(|k| diag[k]), hopfield, normalizers }
}

fn jacobi_spectrum<T: Real>(m: &CouplingMatrix<T>) -> Result<PolaritonSpectrum<T>> {
    let e = jacobi_eigen(m.entries())?;
    check_degeneracy(&e.values)?;
    let mut hopfield = e.vectors;
    let mut normalizers = [T::infinity(); 3];
    for j in 0..3 {
        let leading = (0..3).map(|k| hopfield[k][j]).find(|x| x.abs() > T::epsilon()).unwrap_or(T::one());
        let flip = if hopfield[0][j].abs() > T::epsilon() { hopfield[0][j] < T::zero() } else { leading < T::zero() };
        if flip {
            for row in hopfield.iter_mut() {
                row[j] = -row[j];
            }
        }
        if hopfield[0][j] > T::zero() {
            normalizers[j] = T::one() / hopfield[0][j];
        }
    }
    Ok(PolaritonSpectrum { matrix: *m, frequencies: e.values, hopfield, normalizers })
}

struct SecularRoot<T> {
    lambda: T,
    offset_c: T,
    offset_d: T,
}

struct Secular<T> {
    detuning: T,
    omega_c: T,
    omega_d: T,
    coupling: T,
    g2: T,
}

impl<T: Real> Secular<T> {
    fn new(m: &CouplingMatrix<T>) -> Self {
        Self {
            detuning: m.detuning,
            omega_c: m.omega_c,
            omega_d: m.omega_d,
            coupling: m.coupling,
            g2: m.coupling * m.coupling,
        }
    }

    /// Strict bounds on the spectrum from Gershgorin discs.
    fn gershgorin(&self) -> (T, T) {
        let g = self.coupling;
        let two_g = T::two() * g;
        let lo = (self.detuning - two_g).min(self.omega_c - g).min(self.omega_d - g);
        let hi = (self.detuning + two_g).max(self.omega_c + g).max(self.omega_d + g);
        let pad = T::one() + lo.abs().max(hi.abs());
        (lo - pad * T::lit(1e-8), hi + pad * T::lit(1e-8))
    }

    /// Solves h(λ) = 0 inside (a, b), where one end is a sidemode pole.
    fn solve(&self, estimate: T, a: T, b: T) -> SecularRoot<T> {
        // Work in δ = λ − P, with P the pole closest to the estimate.
        let pole_c_near = {
            let candidates = [a, b];
            let nearest = if (estimate - a).abs() <= (estimate - b).abs() { candidates[0] } else { candidates[1] };
            let is_pole = |x: T| x == self.omega_c || x == self.omega_d;
            let pole = if is_pole(nearest) { nearest } else if is_pole(a) { a } else { b };
            pole == self.omega_c
        };
        let (pole, other) = if pole_c_near { (self.omega_c, self.omega_d) } else { (self.omega_d, self.omega_c) };
        let split = pole - other;
        let base = self.detuning - pole;
        let h = |d: T| (base - d) + self.g2 / d + self.g2 / (split + d);
        let dh = |d: T| -T::one() - self.g2 / (d * d) - self.g2 / ((split + d) * (split + d));

        let (mut lo, mut hi) = (a - pole, b - pole);
        let mut x = estimate - pole;
        if !(x > lo && x < hi) {
            x = lo + (hi - lo) * T::half();
        }
        for _ in 0..300 {
            let hx = h(x);
            if hx == T::zero() || !hx.is_finite() {
                break;
            }
            if hx > T::zero() {
                lo = x;
            } else {
                hi = x;
            }
            let mut next = x - hx / dh(x);
            if !(next > lo && next < hi) {
                next = lo + (hi - lo) * T::half();
            }
            let converged = (next - x).abs() <= T::two() * T::epsilon() * next.abs()
                || hi - lo <= T::two() * T::epsilon() * lo.abs().max(hi.abs());
            x = next;
            if converged {
                break;
            }
        }
        let lambda = pole + x;
        let (offset_c, offset_d) = if pole_c_near { (x, split + x) } else { (split + x, x) };
        SecularRoot { lambda, offset_c, offset_d }
    }
}

/// Normalized weights (X_a, X_c, X_d) for a given branch frequency,
/// X_a = 1/N, X_c = G̃/((ω − ω_c)N), X_d = G̃/((ω − ω_d)N).
pub fn hopfield_weights<T: Real>(omega: T, m: &CouplingMatrix<T>) -> Result<[T; 3]> {
    m.validate()?;
    let g = m.coupling;
    if g == T::zero() {
        let diag = [m.detuning, m.omega_c, m.omega_d];
        let k = (0..3)
            .min_by(|&i, &j| {
                (diag[i] - omega).abs().partial_cmp(&(diag[j] - omega).abs()).unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(0);
        let mut w = [T::zero(); 3];
        w[k] = T::one();
        return Ok(w);
    }
    for pole in [m.omega_c, m.omega_d] {
        if (omega - pole).abs() < T::lit(POLE_TOLERANCE) {
            return Err(Error::SingularWeight { frequency: omega.as_f64(), pole: pole.as_f64() });
        }
    }
    let r_c = g / (omega - m.omega_c);
    let r_d = g / (omega - m.omega_d);
    let norm = T::one().hypot(r_c).hypot(r_d);
    Ok([T::one() / norm, r_c / norm, r_d / norm])
}

/// Detuning regime of the second-order expansions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// −Δ̄ ≪ ω_{c,d}
    SmallDetuning,
    /// −Δ̄ ≫ ω_{c,d}
    LargeDetuning,
}

impl Regime {
    fn name(self) -> &'static str {
        match self {
            Regime::SmallDetuning => "small-detuning",
            Regime::LargeDetuning => "large-detuning",
        }
    }
}

/// Guard for the asymptotic regimes: small requires −Δ̄ < `small_fraction`·min(ω_c, ω_d),
/// large requires −Δ̄ > `large_multiple`·max(ω_c, ω_d).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeGuard<T> {
    pub small_fraction: T,
    pub large_multiple: T,
}

impl<T: Real> Default for RegimeGuard<T> {
    fn default() -> Self {
        Self { small_fraction: T::half(), large_multiple: T::two() }
    }
}

impl<T: Real> RegimeGuard<T> {
    pub fn check(&self, regime: Regime, m: &CouplingMatrix<T>) -> Result<()> {
        let lo = m.omega_c.min(m.omega_d);
        let hi = m.omega_c.max(m.omega_d);
        let ok = match regime {
            Regime::SmallDetuning => m.detuning < self.small_fraction * lo,
            Regime::LargeDetuning => m.detuning > self.large_multiple * hi,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Regime {
                regime: regime.name(),
                detail: format!("-Δ = {} with ω_c = {}, ω_d = {}", m.detuning, m.omega_c, m.omega_d),
            })
        }
    }
}

/// Second-order frequency and first-order vector for each bare mode, sorted.
fn perturbative_modes<T: Real>(m: &CouplingMatrix<T>) -> [(T, [T; 3]); 3] {
    let g = m.coupling;
    let g2 = g * g;
    let det = m.detuning;
    let (wc, wd) = (m.omega_c, m.omega_d);
    let mut modes = [
        (det - g2 / (wc - det) - g2 / (wd - det), [T::one(), g / (det - wc), g / (det - wd)]),
        (wc + g2 / (wc - det), [g / (wc - det), T::one(), T::zero()]),
        (wd + g2 / (wd - det), [g / (wd - det), T::zero(), T::one()]),
    ];
    modes.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    for (_, v) in modes.iter_mut() {
        if v[0] < T::zero() {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
    modes
}

/// Second-order-in-G̃ branch frequencies (ω_A, ω_C, ω_B).
pub fn asymptotic_frequencies<T: Real>(
    regime: Regime,
    m: &CouplingMatrix<T>,
    guard: &RegimeGuard<T>,
) -> Result<[T; 3]> {
    m.validate()?;
    guard.check(regime, m)?;
    Ok(perturbative_modes(m).map(|(w, _)| w))
}

/// First-order (unnormalized) weight matrix, columns in branch order A, C, B.
pub fn asymptotic_mixing<T: Real>(
    regime: Regime,
    m: &CouplingMatrix<T>,
    guard: &RegimeGuard<T>,
) -> Result<[[T; 3]; 3]> {
    m.validate()?;
    guard.check(regime, m)?;
    let modes = perturbative_modes(m);
    Ok(std::array::from_fn(|k| std::array::from_fn(|j| modes[j].1[k])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const WC: f64 = 173.27;
    const WD: f64 = 126.56;

    fn reference(detuning: f64) -> CouplingMatrix<f64> {
        CouplingMatrix::new(detuning, WC, WD, 4.0).unwrap()
    }

    #[test]
    fn characteristic_coefficients_of_bare_modes() {
        let m = CouplingMatrix::new(1.0, 2.0, 3.0, 0.0).unwrap();
        assert_eq!(m.characteristic_coefficients(), (-6.0, 11.0, -6.0));
        let m = CouplingMatrix::new(0.0, WC, WD, 4.0).unwrap();
        assert_eq!(m.characteristic_coefficients().2, 16.0 * (WC + WD));
    }

    #[test]
    fn coefficients_match_direct_substitution() {
        // Δ̄ = −2: c1 = −2 − ω_c − ω_d, c2 = ω_cω_d + 2(ω_c + ω_d) − 32, c3 = 16(ω_c + ω_d) − 2ω_cω_d
        let (c1, c2, c3) = reference(2.0).characteristic_coefficients();
        assert!((c1 - (-301.83)).abs() < 1e-10);
        assert!((c2 - (WC * WD + 2.0 * (WC + WD) - 32.0)).abs() < 1e-9);
        assert!((c3 - (16.0 * (WC + WD) - 2.0 * WC * WD)).abs() < 1e-9);
    }

    #[test]
    fn uncoupled_spectrum_is_a_permutation() {
        let s = polariton_spectrum(&CouplingMatrix::new(50.0, WC, WD, 0.0).unwrap()).unwrap();
        assert_eq!(s.frequencies, [50.0, WD, WC]);
        assert_eq!(s.weights(Branch::A), [1.0, 0.0, 0.0]);
        assert_eq!(s.weights(Branch::C), [0.0, 0.0, 1.0]);
        assert_eq!(s.weights(Branch::B), [0.0, 1.0, 0.0]);
        assert_eq!(s.normalizers[0], 1.0);
        assert!(s.normalizers[1].is_infinite());
    }

    #[test]
    fn weak_coupling_limit_recovers_bare_values() {
        let s = polariton_spectrum(&CouplingMatrix::new(10.0, WC, WD, 1e-6).unwrap()).unwrap();
        assert!((s.frequency(Branch::A) - 10.0).abs() < 1e-9);
        assert!((s.frequency(Branch::C) - WD).abs() < 1e-9);
        assert!((s.frequency(Branch::B) - WC).abs() < 1e-9);
    }

    #[test]
    fn spectrum_matches_jacobi_and_is_orthonormal() {
        for det in [0.1, 2.0, 100.0, 150.0, 173.27, 250.0, 1732.7] {
            let m = reference(det);
            let s = polariton_spectrum(&m).unwrap();
            let e = jacobi_eigen(m.entries()).unwrap();
            for j in 0..3 {
                assert!((s.frequencies[j] - e.values[j]).abs() < 1e-10, "det {det}");
                assert!(s.eigen_residual(Branch::ALL[j]) < 1e-9);
                assert!(s.hopfield[0][j] > 0.0);
            }
            for i in 0..3 {
                for j in 0..3 {
                    let dot: f64 = (0..3).map(|k| s.hopfield[k][i] * s.hopfield[k][j]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn equal_sidemodes_use_dark_mode_fallback() {
        let m = CouplingMatrix::new(5.0f64, 3.0, 3.0, 0.5).unwrap();
        let s = polariton_spectrum(&m).unwrap();
        assert!((s.frequency(Branch::C) - 3.0).abs() < 1e-12);
        assert!(s.weight(BareMode::Photon, Branch::C).abs() < 1e-12);
        for b in Branch::ALL {
            assert!(s.eigen_residual(b) < 1e-10);
        }
    }

    #[test]
    fn degenerate_roots_are_reported() {
        let m = CouplingMatrix::new(WC, WC, WD, 1e-12).unwrap();
        assert!(matches!(polariton_spectrum(&m), Err(Error::DegenerateSpectrum { .. })));
    }

    #[test]
    fn hopfield_weights_match_spectrum() {
        let m = reference(150.0);
        let s = polariton_spectrum(&m).unwrap();
        for b in Branch::ALL {
            let w = hopfield_weights(s.frequency(b), &m).unwrap();
            let norm: f64 = w.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-14);
            for (x, y) in w.iter().zip(s.weights(b)) {
                assert!((x - y).abs() < 1e-9);
            }
        }
        assert!(matches!(hopfield_weights(WC, &m), Err(Error::SingularWeight { .. })));
    }

    #[test]
    fn photonlike_and_phononlike_limits() {
        let small = reference(2.0);
        let s = polariton_spectrum(&small).unwrap();
        let w = s.weights(Branch::A);
        let wa = s.frequency(Branch::A);
        assert!((w[1] / w[0] - 4.0 / (wa - WC)).abs() < 1e-12);
        assert!((w[2] / w[0] - 4.0 / (wa - WD)).abs() < 1e-12);
        assert!((w[1] / w[0] + 4.0 / (WC - 2.0)).abs() < 1e-2 * 4.0 / WC);
        assert!((w[2] / w[0] + 4.0 / (WD - 2.0)).abs() < 1e-2 * 4.0 / WD);

        let large = reference(10.0 * WC);
        let s = polariton_spectrum(&large).unwrap();
        let w = s.weights(Branch::A);
        assert!(w[2].abs() > 0.999);
        let expected = 4.0 / (10.0 * WC - WD);
        assert!((w[0] - expected).abs() < 1e-2 * expected);
        assert!(w[1].abs() < 1e-3);
    }

    #[test]
    fn asymptotics_in_both_regimes() {
        let guard = RegimeGuard::default();
        let bound = 5.0 * 64.0 / WD.powi(2);
        for (regime, det) in [(Regime::SmallDetuning, 2.0), (Regime::LargeDetuning, 10.0 * WC)] {
            let m = reference(det);
            let exact = polariton_spectrum(&m).unwrap();
            let approx = asymptotic_frequencies(regime, &m, &guard).unwrap();
            for j in 0..3 {
                assert!((approx[j] - exact.frequencies[j]).abs() <= bound);
            }
        }
        assert!(asymptotic_frequencies(Regime::SmallDetuning, &reference(100.0), &guard).is_err());
        assert!(asymptotic_mixing(Regime::LargeDetuning, &reference(100.0), &guard).is_err());
    }

    #[test]
    fn asymptotic_labels_follow_bare_modes() {
        let guard = RegimeGuard::default();
        let small = asymptotic_frequencies(Regime::SmallDetuning, &reference(2.0), &guard).unwrap();
        assert!((small[0] - 2.0).abs() < 1.0 && (small[1] - WD).abs() < 1.0 && (small[2] - WC).abs() < 1.0);
        let large = asymptotic_frequencies(Regime::LargeDetuning, &reference(10.0 * WC), &guard).unwrap();
        assert!((large[0] - WD).abs() < 1.0 && (large[1] - WC).abs() < 1.0);
        assert!((large[2] - 10.0 * WC).abs() < 1.0);
    }

    #[test]
    fn uncoupled_mixing_is_a_permutation() {
        let guard = RegimeGuard::default();
        let m = CouplingMatrix::new(2.0, WC, WD, 0.0).unwrap();
        let mix = asymptotic_mixing(Regime::SmallDetuning, &m, &guard).unwrap();
        assert_eq!(mix, [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]);
        let freqs = asymptotic_frequencies(Regime::SmallDetuning, &m, &guard).unwrap();
        assert_eq!(freqs, [2.0, WD, WC]);
    }

    #[test]
    fn small_detuning_mixing_matches_exact_weights() {
        let guard = RegimeGuard::default();
        let m = reference(2.0);
        let mix = asymptotic_mixing(Regime::SmallDetuning, &m, &guard).unwrap();
        let exact = polariton_spectrum(&m).unwrap();
        for j in 0..3 {
            let norm = (0..3).map(|k| mix[k][j] * mix[k][j]).sum::<f64>().sqrt();
            for k in 0..3 {
                let x = exact.hopfield[k][j];
                let y = mix[k][j] / norm;
                assert!((x - y).abs() <= 1e-2, "k {k} j {j}: {x} vs {y}");
                if x.abs() > 1e-2 {
                    assert!((x - y).abs() <= 1e-2 * x.abs());
                }
            }
        }
        let large = asymptotic_mixing(Regime::LargeDetuning, &reference(10.0 * WC), &guard).unwrap();
        assert_eq!(large[1][0], 0.0);
    }

    #[test]
    fn lower_branch_is_bounded_and_monotone() {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=2500 {
            let det = 0.1 * i as f64;
            let w = polariton_spectrum(&reference(det)).unwrap().frequency(Branch::A);
            assert!(w >= prev);
            assert!(w <= WD);
            prev = w;
        }
    }

    #[test]
    fn single_precision_spectrum() {
        let m = CouplingMatrix::new(150.0f32, 173.27, 126.56, 4.0).unwrap();
        let s = polariton_spectrum(&m).unwrap();
        let sum: f32 = s.frequencies.iter().sum();
        assert!((sum - m.trace()).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn vieta_orthogonality_and_residual(
            det in 0.1f64..1e3,
            g in 0.0f64..10.0,
            wc in 1.0f64..300.0,
            wd in 0.1f64..300.0,
        ) {
            prop_assume!((wc - wd).abs() > 1e-3);
            let m = CouplingMatrix::new(det, wc, wd, g).unwrap();
            let s = match polariton_spectrum(&m) {
                Ok(s) => s,
                Err(Error::DegenerateSpectrum { .. }) => return Ok(()),
                Err(e) => panic!("{e}"),
            };
            let f = s.frequencies;
            let scale = 1.0 + det + wc + wd + g;
            prop_assert!((f.iter().sum::<f64>() - m.trace()).abs() <= 1e-10 * scale);
            prop_assert!((f[0] * f[1] * f[2] - m.determinant()).abs() <= 1e-10 * scale.powi(3));
            for i in 0..3 {
                prop_assert!(s.eigen_residual(Branch::ALL[i]) < 1e-9);
                for j in 0..3 {
                    let dot: f64 = (0..3).map(|k| s.hopfield[k][i] * s.hopfield[k][j]).sum();
                    let row: f64 = (0..3).map(|k| s.hopfield[i][k] * s.hopfield[j][k]).sum();
                    let e = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((dot - e).abs() < 1e-10);
                    prop_assert!((row - e).abs() < 1e-10);
                }
            }
        }
    }
}
