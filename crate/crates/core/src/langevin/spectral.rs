use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::{FftNum, FftPlanner};

use super::{check_stability, complex_gaussian, step_coefficients, trajectory_rng, ModeNoise, Stepper};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Power spectrum S(ν) = ⟨|∫ A(t) e^{iνt} dt|²⟩/T_record on ascending ν.
#[derive(Clone, Debug, PartialEq)]
pub struct Periodogram<T> {
    pub frequencies: Vec<T>,
    pub power: Vec<T>,
    pub records: usize,
}

impl<T: Real> Periodogram<T> {
    pub fn peak(&self) -> (T, T) {
        let k = argmax(&self.power);
        (self.frequencies[k], self.power[k])
    }
}

fn argmax<T: Real>(v: &[T]) -> usize {
    v.iter().enumerate().fold(0, |best, (i, x)| if *x > v[best] { i } else { best })
}

/// ν_k = 2πk/(N dt), with k ≥ N/2 mapped to negative frequencies.
fn frequency_axis<T: Real>(n: usize, dt: T) -> Vec<T> {
    let scale = T::lit(2.0 * std::f64::consts::PI) / (T::lit(n as f64) * dt);
    (0..n)
        .map(|k| {
            let signed = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
            T::lit(signed) * scale
        })
        .collect()
}

/// Sorts a wrapped spectrum onto ascending frequency.
fn unwrap_axis<T: Real>(freq: Vec<T>, power: Vec<T>) -> (Vec<T>, Vec<T>) {
    let mut pairs: Vec<(T, T)> = freq.into_iter().zip(power).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    pairs.into_iter().unzip()
}

/// Periodogram of a single sampled record.
pub fn periodogram<T: Real + FftNum>(series: &[Complex<T>], dt: T) -> Result<Periodogram<T>> {
    if series.len() < 2 {
        return Err(Error::invalid("series", "need at least two samples"));
    }
    if !(dt > T::zero()) {
        return Err(Error::invalid("dt", "must be positive"));
    }
    let n = series.len();
    let fft = FftPlanner::<T>::new().plan_fft_inverse(n);
    let mut buf = series.to_vec();
    fft.process(&mut buf);
    let norm = dt / T::lit(n as f64);
    let power = buf.iter().map(|x| x.norm_sqr() * norm).collect();
    let (frequencies, power) = unwrap_axis(frequency_axis(n, dt), power);
    Ok(Periodogram { frequencies, power, records: 1 })
}

/// Periodogram of a stationary mode averaged over independent records.
/// Record `r` starts from a stationary draw on stream `r` of `seed`.
pub fn steady_periodogram<T>(
    mode: ModeNoise<T>,
    seed: u64,
    dt: T,
    samples: usize,
    records: usize,
    stepper: Stepper,
) -> Result<Periodogram<T>>
where
    T: Real + FftNum,
    StandardNormal: Distribution<T>,
{
    mode.validate()?;
    check_stability(dt, mode.frequency, mode.damping)?;
    if samples < 2 || records == 0 {
        return Err(Error::invalid("samples", "need at least two samples and one record"));
    }
    let coeff = step_coefficients(stepper, mode.frequency, &mode, dt);
    let fft = FftPlanner::<T>::new().plan_fft_inverse(samples);
    let norm = dt / T::lit(samples as f64);

    let one_record = |r: usize| {
        let mut rng = trajectory_rng(seed, r);
        let mut a: Complex<T> = complex_gaussian(&mut rng) * mode.occupation.sqrt();
        let mut buf = Vec::with_capacity(samples);
        buf.push(a);
        for _ in 1..samples {
            let xi: Complex<T> = complex_gaussian(&mut rng);
            a = coeff.factor * a + coeff.noise * xi;
            buf.push(a);
        }
        fft.process(&mut buf);
        buf.iter().map(|x| x.norm_sqr() * norm).collect::<Vec<T>>()
    };
    let spectra: Vec<Vec<T>> = (0..records).into_par_iter().map(one_record).collect();
    let mut total = vec![T::zero(); samples];
    for s in &spectra {
        for (acc, x) in total.iter_mut().zip(s) {
            *acc += *x;
        }
    }
    let inv = T::one() / T::lit(records as f64);
    let power = total.into_iter().map(|x| x * inv).collect();
    let (frequencies, power) = unwrap_axis(frequency_axis(samples, dt), power);
    Ok(Periodogram { frequencies, power, records })
}

/// Peak position and half width at half maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzianFit<T> {
    pub center: T,
    pub half_width: T,
    pub bins_used: usize,
}

/// Fits S(ν) ∝ 1/((ν − ν₀)² + Γ²) over the contiguous bins around the peak
/// with S ≥ `threshold`·S_max, by linear least squares on 1/S.
pub fn fit_lorentzian<T: Real>(p: &Periodogram<T>, threshold: T) -> Result<LorentzianFit<T>> {
    if p.power.len() < 3 {
        return Err(Error::invalid("periodogram", "need at least three bins"));
    }
    if !(threshold > T::zero() && threshold < T::one()) {
        return Err(Error::invalid("threshold", "must lie in (0, 1)"));
    }
    let k = argmax(&p.power);
    let cut = p.power[k] * threshold;
    let mut lo = k;
    while lo > 0 && p.power[lo - 1] >= cut {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < p.power.len() && p.power[hi + 1] >= cut {
        hi += 1;
    }
    if hi - lo < 2 {
        lo = lo.saturating_sub(1);
        hi = (hi + 1).min(p.power.len() - 1);
    }
    if hi - lo < 2 {
        return Err(Error::invalid("periodogram", "peak narrower than three bins"));
    }

    // Minimize Σ (S_i (a u² + b u + c) − 1)² with u = ν − ν_peak.
    let origin = p.frequencies[k];
    let mut m = [[T::zero(); 3]; 3];
    let mut rhs = [T::zero(); 3];
    for i in lo..=hi {
        let u = p.frequencies[i] - origin;
        let s = p.power[i];
        let row = [s * u * u, s * u, s];
        for r in 0..3 {
            rhs[r] += row[r];
            for c in 0..3 {
                m[r][c] += row[r] * row[c];
            }
        }
    }
    let [a, b, c] = solve3(m, rhs).ok_or_else(|| Error::invalid("periodogram", "singular fit"))?;
    if !(a > T::zero()) {
        return Err(Error::invalid("periodogram", "no Lorentzian peak"));
    }
    let u0 = -b / (T::two() * a);
    let width_sq = c / a - u0 * u0;
    if !(width_sq > T::zero()) {
        return Err(Error::invalid("periodogram", "fitted width is not real"));
    }
    Ok(LorentzianFit { center: origin + u0, half_width: width_sq.sqrt(), bins_used: hi - lo + 1 })
}

fn solve3<T: Real>(mut m: [[T; 3]; 3], mut b: [T; 3]) -> Option<[T; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[pivot][col] == T::zero() || !m[pivot][col].is_finite() {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for c in col..3 {
                let v = m[col][c];
                m[row][c] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let tail: T = (row + 1..3).map(|c| m[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / m[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tone_peaks_at_its_frequency() {
        // A(t) = e^{−iωt} appears at ν = ω under the e^{+iνt} convention.
        let dt = 0.01;
        let n = 1000;
        let omega = 2.0 * std::f64::consts::PI * 10.0 / (n as f64 * dt);
        let series: Vec<_> = (0..n).map(|k| Complex::new(0.0, -omega * dt * k as f64).exp()).collect();
        let p = periodogram(&series, dt).unwrap();
        assert!((p.peak().0 - omega).abs() < 1e-9);
        assert!(p.frequencies.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn exact_lorentzian_is_recovered() {
        let freqs: Vec<f64> = (0..401).map(|k| -2.0 + 0.01 * k as f64).collect();
        let power = freqs.iter().map(|v| 1.0 / ((v - 0.37) * (v - 0.37) + 0.04)).collect();
        let fit = fit_lorentzian(&Periodogram { frequencies: freqs, power, records: 1 }, 0.2).unwrap();
        assert!((fit.center - 0.37).abs() < 1e-10);
        assert!((fit.half_width - 0.2).abs() < 1e-10);
    }

    #[test]
    fn stationary_mode_has_lorentzian_line() {
        let mode = ModeNoise::<f64> { frequency: 1.5, damping: 0.2, occupation: 1.0 };
        let p = steady_periodogram(mode, 11, 0.05, 16384, 200, Stepper::Exact).unwrap();
        let fit = fit_lorentzian(&p, 0.2).unwrap();
        assert!((fit.center - 1.5).abs() < 0.02);
        assert!((fit.half_width - 0.1).abs() < 0.01);
        // Total power equals ⟨|A|²⟩ = n̄ (Parseval).
        let dnu = p.frequencies[1] - p.frequencies[0];
        let area: f64 = p.power.iter().sum::<f64>() * dnu / (2.0 * std::f64::consts::PI);
        assert!((area - 1.0).abs() < 0.05);
    }
}
