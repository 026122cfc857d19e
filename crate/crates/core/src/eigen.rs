//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricEigen<T, const N: usize> {
    /// Ascending eigenvalues.
    pub values: [T; N],
    /// `vectors[k][j]` is component `k` of the eigenvector for `values[j]`.
    pub vectors: [[T; N]; N],
}

/// Diagonalizes `a` by plane rotations until the off-diagonal mass falls
/// below machine precision relative to the Frobenius norm.
pub fn jacobi_eigen<T: Real, const N: usize>(mut a: [[T; N]; N]) -> Result<SymmetricEigen<T, N>> {
    for i in 0..N {
        for j in 0..i {
            let asym = (a[i][j] - a[j][i]).abs();
            let scale = a[i][j].abs().max(a[j][i].abs()).max(T::one());
            if !(asym <= T::lit(1e3) * T::epsilon() * scale) {
                return Err(Error::invalid("matrix", "not symmetric"));
            }
        }
    }
    let mut v = [[T::zero(); N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }
    let norm = a.iter().flatten().map(|x| *x * *x).sum::<T>().sqrt();
    let threshold = T::epsilon() * norm;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = (0..N)
            .flat_map(|p| ((p + 1)..N).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum::<T>()
            .sqrt();
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::two() * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..N {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
                a[p][q] = T::zero();
                a[q][p] = T::zero();
                for row in v.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::invalid("matrix", "Jacobi sweeps did not converge"));
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = std::array::from_fn(|j| a[order[j]][order[j]]);
    let vectors = std::array::from_fn(|k| std::array::from_fn(|j| v[k][order[j]]));
    Ok(SymmetricEigen { values, vectors })
}
