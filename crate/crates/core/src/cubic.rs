//! Real roots of monic cubics via the trigonometric form of Cardano's formula.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance on |acos argument| − 1 before the cubic is declared to have
/// complex roots.
pub const ACOS_TOLERANCE: f64 = 1e-9;

/// Coefficients of λ³ + c1 λ² + c2 λ + c3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cubic<T> {
    pub c1: T,
    pub c2: T,
    pub c3: T,
}

impl<T: Real> Cubic<T> {
    pub fn new(c1: T, c2: T, c3: T) -> Self {
        Self { c1, c2, c3 }
    }

    pub fn eval(&self, x: T) -> T {
        ((x + self.c1) * x + self.c2) * x + self.c3
    }

    pub fn derivative(&self, x: T) -> T {
        (T::lit(3.0) * x + T::two() * self.c1) * x + self.c2
    }

    /// Three real roots in ascending order.
    pub fn real_roots(&self) -> Result<[T; 3]> {
        cardano_roots(self.c1, self.c2, self.c3)
    }
}

/// Roots R_k = −c1/3 + ρ cos((θ − 2πk)/3) with ρ = 2√(−p/3) and
/// θ = acos((3q/2p)√(−3/p)), sorted ascending and polished by guarded Newton
/// steps on the cubic.
pub fn cardano_roots<T: Real>(c1: T, c2: T, c3: T) -> Result<[T; 3]> {
    let three = T::lit(3.0);
    let shift = -c1 / three;
    let p = c2 - c1 * c1 / three;
    let q = T::two() * c1 * c1 * c1 / T::lit(27.0) - c1 * c2 / three + c3;

    if p == T::zero() {
        if q == T::zero() {
            return Ok([shift; 3]);
        }
        return Err(Error::ComplexRoot { argument: f64::INFINITY });
    }
    if p > T::zero() {
        return Err(Error::ComplexRoot { argument: f64::INFINITY });
    }

    let mut argument = three * q / (T::two() * p) * (-three / p).sqrt();
    if argument.abs() > T::one() + T::lit(ACOS_TOLERANCE) || !argument.is_finite() {
        return Err(Error::ComplexRoot { argument: argument.as_f64() });
    }
    argument = argument.max(-T::one()).min(T::one());
    let theta = argument.acos();
    let rho = T::two() * (-p / three).sqrt();
    let two_pi = T::two() * T::PI();
    let mut roots: [T; 3] = std::array::from_fn(|k| {
        let k = T::lit(k as f64);
        shift + rho * ((theta - two_pi * k) / three).cos()
    });
    sort3(&mut roots);

    let cubic = Cubic::new(c1, c2, c3);
    let polished = roots;
    for k in 0..3 {
        let gap = (0..3)
            .filter(|&j| j != k)
            .map(|j| (polished[j] - polished[k]).abs())
            .fold(T::infinity(), T::min);
        roots[k] = polish(&cubic, polished[k], gap);
    }
    sort3(&mut roots);
    Ok(roots)
}

fn polish<T: Real>(cubic: &Cubic<T>, mut x: T, gap: T) -> T {
    let start = x;
    let mut residual = cubic.eval(x).abs();
    for _ in 0..3 {
        let slope = cubic.derivative(x);
        if slope == T::zero() || residual == T::zero() {
            break;
        }
        let candidate = x - cubic.eval(x) / slope;
        let candidate_residual = cubic.eval(candidate).abs();
        if candidate_residual >= residual || (candidate - start).abs() > T::lit(0.25) * gap {
            break;
        }
        x = candidate;
        residual = candidate_residual;
    }
    x
}

fn sort3<T: Real>(r: &mut [T; 3]) {
    r.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
}
