//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Largest allowed step; `None` means the whole interval.
    pub max_step: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self { rtol: T::lit(1e-10), atol: T::lit(1e-12), max_step: None, max_steps: 10_000_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`, calling `observer`
/// at the start and after every accepted step. Returns the state at `t1`.
pub fn integrate<T, const N: usize, F, O>(
    mut f: F,
    t0: T,
    y0: [T; N],
    t1: T,
    opts: &OdeOptions<T>,
    mut observer: O,
) -> Result<[T; N]>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> [T; N],
    O: FnMut(T, &[T; N]),
{
    if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::invalid("interval", format!("need finite t0 <= t1, got [{t0}, {t1}]")));
    }
    let mut t = t0;
    let mut y = y0;
    observer(t, &y);
    if t1 == t0 {
        return Ok(y);
    }
    let span = t1 - t0;
    let max_step = opts.max_step.unwrap_or(span).min(span);
    let mut k0 = f(t, &y);
    let mut h = initial_step(&y, &k0, opts).min(max_step);
    let coef = |x: f64| T::lit(x);

    for _ in 0..opts.max_steps {
        if t >= t1 {
            return Ok(y);
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let min_step = T::lit(16.0) * T::epsilon() * t.abs().max(span);
        if h < min_step {
            return Err(Error::Integration { t: t.as_f64(), step: h.as_f64() });
        }

        let mut k = [[T::zero(); N]; 7];
        k[0] = k0;
        // The last stage row equals the fifth-order weights, so its stage
        // state is the new solution and k[6] is reused as the next k[0].
        let mut y_new = y;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = coef(A[s][j]);
                if a != T::zero() {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(t + h * coef(C[s]), &ys);
            y_new = ys;
        }

        let mut err = T::zero();
        for i in 0..N {
            let e = h * (0..7).map(|s| coef(E[s]) * k[s][i]).sum::<T>();
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            let r = e / scale;
            err += r * r;
        }
        err = (err / T::lit(N.max(1) as f64)).sqrt();
        if !err.is_finite() {
            h *= T::lit(0.1);
            continue;
        }

        if err <= T::one() {
            t = if last { t1 } else { t + h };
            y = y_new;
            k0 = k[6];
            observer(t, &y);
        }
        let factor = if err == T::zero() {
            T::lit(5.0)
        } else {
            (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.2)).min(T::lit(5.0))
        };
        h = (h * factor).min(max_step);
    }
    if t >= t1 {
        return Ok(y);
    }
    Err(Error::Integration { t: t.as_f64(), step: h.as_f64() })
}

fn initial_step<T: Real, const N: usize>(y: &[T; N], dy: &[T; N], opts: &OdeOptions<T>) -> T {
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for i in 0..N {
        let scale = opts.atol + opts.rtol * y[i].abs();
        d0 += (y[i] / scale) * (y[i] / scale);
        d1 += (dy[i] / scale) * (dy[i] / scale);
    }
    let (d0, d1) = (d0.sqrt(), d1.sqrt());
    if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0, &OdeOptions::default(), |_, _| {}).unwrap();
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_conserves_energy() {
        let w = 30.0;
        let opts = OdeOptions { rtol: 1e-11, atol: 1e-13, ..Default::default() };
        let mut worst: f64 = 0.0;
        let y = integrate(
            |_, y: &[f64; 2]| [y[1], -w * w * y[0]],
            0.0,
            [1.0, 0.0],
            10.0,
            &opts,
            |_, y| worst = worst.max((w * w * y[0] * y[0] + y[1] * y[1] - w * w).abs() / (w * w)),
        )
        .unwrap();
        assert!((y[0] - (w * 10.0).cos()).abs() < 1e-7);
        assert!(worst < 1e-7);
    }

    #[test]
    fn observer_sees_endpoints() {
        let mut times = Vec::new();
        integrate(|t, _: &[f64; 1]| [t], 1.0, [0.0], 2.0, &OdeOptions::default(), |t, _| times.push(t)).unwrap();
        assert_eq!(times.first(), Some(&1.0));
        assert_eq!(times.last(), Some(&2.0));
        assert!(times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(integrate(|_, y: &[f64; 1]| *y, 1.0, [0.0], 0.0, &OdeOptions::default(), |_, _| {}).is_err());
    }

    #[test]
    fn step_budget_exhaustion_is_reported() {
        let opts = OdeOptions { max_steps: 3, ..Default::default() };
        let r = integrate(|_, y: &[f64; 2]| [y[1], -1e4 * y[0]], 0.0, [1.0, 0.0], 10.0, &opts, |_, _| {});
        assert!(matches!(r, Err(Error::Integration { .. })));
    }
}
