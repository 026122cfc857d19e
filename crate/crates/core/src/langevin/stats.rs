use crate::scalar::{CompensatedSum, Real};

/// Ensemble mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat<T> {
    pub mean: T,
    pub std_err: T,
    pub count: usize,
}

impl<T: Real> Stat<T> {
    /// |mean − target| ≤ k·std_err.
    pub fn within(&self, target: T, k: T) -> bool {
        (self.mean - target).abs() <= k * self.std_err
    }

    /// Distance from `target` in standard errors.
    pub fn z_score(&self, target: T) -> T {
        if self.std_err == T::zero() {
            if self.mean == target { T::zero() } else { T::infinity() }
        } else {
            (self.mean - target).abs() / self.std_err
        }
    }
}

/// First and second moments, mergeable in a fixed order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments<T> {
    sum: CompensatedSum<T>,
    sum_sq: CompensatedSum<T>,
    count: usize,
}

impl<T: Real> Moments<T> {
    pub fn new() -> Self {
        Self { sum: CompensatedSum::new(), sum_sq: CompensatedSum::new(), count: 0 }
    }

    pub fn push(&mut self, x: T) {
        self.sum.add(x);
        self.sum_sq.add(x * x);
        self.count += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
        self.count += other.count;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn stat(&self) -> Stat<T> {
        let n = self.count;
        if n == 0 {
            return Stat { mean: T::nan(), std_err: T::nan(), count: 0 };
        }
        let nf = T::lit(n as f64);
        let mean = self.sum.value() / nf;
        let std_err = if n > 1 {
            let var = ((self.sum_sq.value() - nf * mean * mean) / (nf - T::one())).max(T::zero());
            (var / nf).sqrt()
        } else {
            T::infinity()
        };
        Stat { mean, std_err, count: n }
    }
}
