//! Dense spectral decomposition of real symmetric tridiagonal matrices.
//!
//! Implicit QL with Wilkinson shifts and accumulated rotations (the classic
//! `tql2` scheme). Chains in this crate stay below ~10^4 sites, so the full
//! O(n^3) vector accumulation is the simplest adequate tool; no iterative
//! partial solvers are needed.

use crate::error::{CoreError, Result};

/// Full eigendecomposition `H = Q diag(values) Q^T` of a symmetric
/// tridiagonal matrix. Eigenvalues ascend; `Q`'s columns are orthonormal.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    n: usize,
    values: Vec<f64>,
    /// Column-major: eigenvector `k` occupies `vectors[k*n..(k+1)*n]`.
    vectors: Vec<f64>,
}

impl TridiagEigen {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Components of the `k`-th eigenvector in the site basis.
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    /// `<site|k>` without bounds ceremony in hot loops.
    #[inline]
    pub fn component(&self, k: usize, site: usize) -> f64 {
        self.vectors[k * self.n + site]
    }
}

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of the symmetric tridiagonal matrix with main diagonal
/// `diag` and sub/super-diagonal `offdiag` (`offdiag.len() == diag.len() - 1`).
pub fn eigh_tridiagonal(diag: &[f64], offdiag: &[f64]) -> Result<TridiagEigen> {
    let n = diag.len();
    if n == 0 {
        return Err(CoreError::InvalidParameter(
            "empty tridiagonal matrix".into(),
        ));
    }
    if offdiag.len() + 1 != n {
        return Err(CoreError::InvalidParameter(format!(
            "offdiag length {} does not match diag length {}",
            offdiag.len(),
            n
        )));
    }
    if diag.iter().chain(offdiag).any(|x| !x.is_finite()) {
        return Err(CoreError::InvalidParameter(
            "non-finite matrix entry".into(),
        ));
    }

    let mut d = diag.to_vec();
    let mut e = vec![0.0f64; n];
    e[..n - 1].copy_from_slice(offdiag);

    let mut z = vec![0.0f64; n * n];
    for k in 0..n {
        z[k * n + k] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0usize;
        loop {
            // Look for a negligible subdiagonal element splitting the matrix.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(CoreError::EigenNonConvergence { index: l, sweeps });
            }

            // Wilkinson shift from the leading 2x2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));

            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut underflow = false;

            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Deflate: the rotation chain annihilated early.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                // Apply the rotation to eigenvector columns i and i+1.
                let (left, right) = z[i * n..].split_at_mut(n);
                let col_i = &mut left[..n];
                let col_i1 = &mut right[..n];
                for row in 0..n {
                    let f = col_i1[row];
                    col_i1[row] = s * col_i[row] + c * f;
                    col_i[row] = c * col_i[row] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // Sort ascending, permuting eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut vectors = vec![0.0f64; n * n];
    for (dst, &src) in order.iter().enumerate() {
        vectors[dst * n..(dst + 1) * n].copy_from_slice(&z[src * n..(src + 1) * n]);
    }

    Ok(TridiagEigen { n, values, vectors })
}

/// Solve `(T - shift I) x = rhs` for symmetric tridiagonal `T` by LU with
/// partial pivoting (adjacent-row swaps introduce one fill-in diagonal).
/// Exactly singular pivots are nudged to a tiny value, which is what
/// inverse iteration wants.
fn solve_shifted_tridiagonal(diag: &[f64], offdiag: &[f64], shift: f64, rhs: &mut [f64]) {
    let n = diag.len();
    let mut b: Vec<f64> = diag.iter().map(|&x| x - shift).collect();
    let mut c: Vec<f64> = offdiag.to_vec();
    c.push(0.0);
    let mut d = vec![0.0f64; n]; // second superdiagonal fill-in
    let scale = diag
        .iter()
        .chain(offdiag)
        .fold(1.0f64, |a, &x| a.max(x.abs()));
    let tiny = f64::EPSILON * scale + f64::MIN_POSITIVE;

    for i in 0..n.saturating_sub(1) {
        let sub = offdiag[i];
        if b[i].abs() >= sub.abs() {
            let pivot = if b[i] == 0.0 { tiny } else { b[i] };
            b[i] = pivot;
            let m = sub / pivot;
            b[i + 1] -= m * c[i];
            rhs[i + 1] -= m * rhs[i];
        } else {
            // Swap rows i and i+1.
            let m = b[i] / sub;
            b[i] = sub;
            let b_next = b[i + 1];
            let c_next = c[i + 1];
            b[i + 1] = c[i] - m * b_next;
            c[i] = b_next;
            d[i] = c_next;
            c[i + 1] = -m * c_next;
            rhs.swap(i, i + 1);
            rhs[i + 1] -= m * rhs[i];
        }
    }
    if b[n - 1] == 0.0 {
        b[n - 1] = tiny;
    }
    rhs[n - 1] /= b[n - 1];
    if n >= 2 {
        rhs[n - 2] = (rhs[n - 2] - c[n - 2] * rhs[n - 1]) / b[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - c[i] * rhs[i + 1] - d[i] * rhs[i + 2]) / b[i];
    }
}

/// Polish an eigenpair of a symmetric tridiagonal matrix by inverse
/// iteration. For well-separated eigenvalues this drives eigenvector
/// components to near componentwise accuracy, which matters when tiny
/// components carry physical weight (weak environment couplings).
pub fn refine_eigenpair(diag: &[f64], offdiag: &[f64], value: f64, vector: &mut [f64]) {
    let n = diag.len();
    debug_assert_eq!(vector.len(), n);
    let mut work = vector.to_vec();
    for _ in 0..2 {
        solve_shifted_tridiagonal(diag, offdiag, value, &mut work);
        let norm = work.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return;
        }
        for x in &mut work {
            *x /= norm;
        }
    }
    // Keep the original orientation.
    let align: f64 = work.iter().zip(vector.iter()).map(|(a, b)| a * b).sum();
    let sign = if align < 0.0 { -1.0 } else { 1.0 };
    for (dst, &src) in vector.iter_mut().zip(&work) {
        *dst = sign * src;
    }
}
