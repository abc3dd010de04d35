//! Dense symmetric eigendecomposition and the small-matrix helpers built on
//! top of it.
//!
//! Householder tridiagonalization followed by implicit-shift QL — the classic
//! EISPACK `tred2`/`tql2` pair. Pure Rust so the crate stays generic over the
//! scalar type and needs no LAPACK backend; adequate for the adjacency-sized
//! problems the estimators run on (n in the low thousands).

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigendecomposition of a symmetric matrix: `a = V diag(values) V'`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<F> {
    /// Eigenvalues in ascending order.
    pub values: Array1<F>,
    /// Orthonormal eigenvectors; column `k` pairs with `values[k]`.
    pub vectors: Array2<F>,
}

/// Eigendecomposition of a square symmetric matrix.
///
/// The input is symmetrized as `(a + a')/2` first, so tiny asymmetries from
/// accumulated rounding are tolerated.
pub fn symmetric_eigen<F: Scalar>(a: &Array2<F>) -> Result<SymmetricEigen<F>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "symmetric_eigen",
            expected: n,
            actual: a.ncols(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }

    let half = F::from_f64_lossy(0.5);
    // Row-major flat working copy, symmetrized.
    let mut v = vec![F::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            v[i * n + j] = (a[(i, j)] + a[(j, i)]) * half;
        }
    }
    let mut d = vec![F::zero(); n];
    let mut e = vec![F::zero(); n];

    tred2(&mut v, &mut d, &mut e, n);
    tql2(&mut v, &mut d, &mut e, n)?;

    // Sort ascending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));

    let mut values = Array1::zeros(n);
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = d[src];
        for row in 0..n {
            vectors[(row, dst)] = v[row * n + src];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Householder reduction of `v` (n x n, row-major) to tridiagonal form,
/// accumulating the orthogonal transform back into `v`.
fn tred2<F: Scalar>(v: &mut [F], d: &mut [F], e: &mut [F], n: usize) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }

    for i in (1..n).rev() {
        let mut scale = F::zero();
        let mut h = F::zero();
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == F::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = F::zero();
                v[j * n + i] = F::zero();
            }
        } else {
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > F::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = F::zero();
            }

            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + v[j * n + j] * f;
                for k in (j + 1)..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            f = F::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k * n + j] = v[k * n + j] - (f * e[k] + g * d[k]);
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = F::zero();
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..n.saturating_sub(1) {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = F::one();
        let h = d[i + 1];
        if h != F::zero() {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / h;
            }
            for j in 0..=i {
                let mut g = F::zero();
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] = v[k * n + j] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = F::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = F::zero();
    }
    v[(n - 1) * n + (n - 1)] = F::one();
    e[0] = F::zero();
}

/// Implicit-shift QL iteration on the tridiagonal form, with eigenvector
/// accumulation in `v`.
fn tql2<F: Scalar>(v: &mut [F], d: &mut [F], e: &mut [F], n: usize) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = F::zero();

    let mut f = F::zero();
    let mut tst1 = F::zero();
    let eps = F::epsilon();

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }

        if m > l {
            let mut iter = 0usize;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Numerical(
                        "QL eigenvalue iteration failed to converge".into(),
                    ));
                }

                let g = d[l];
                let two = F::from_f64_lossy(2.0);
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(F::one());
                if p < F::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = F::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = F::zero();
                let mut s2 = F::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let gg = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * gg;
                    d[i + 1] = h + s * (c * gg + s * d[i]);

                    for k in 0..n {
                        h = v[k * n + i + 1];
                        v[k * n + i + 1] = s * v[k * n + i] + c * h;
                        v[k * n + i] = c * v[k * n + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = F::zero();
    }
    Ok(())
}

/// Inverse of a symmetric matrix via its eigendecomposition.
///
/// Fails when the condition number (max |eigenvalue| / min |eigenvalue|)
/// exceeds `max_cond`, so near-singular curvature blocks fail loudly instead
/// of producing garbage variances.
pub fn sym_inverse<F: Scalar>(a: &Array2<F>, max_cond: F) -> Result<Array2<F>> {
    let eig = symmetric_eigen(a)?;
    let n = a.nrows();
    let max_abs = eig
        .values
        .iter()
        .fold(F::zero(), |acc, &x| acc.max(x.abs()));
    let min_abs = eig
        .values
        .iter()
        .fold(F::infinity(), |acc, &x| acc.min(x.abs()));
    if min_abs <= F::zero() || max_abs / min_abs > max_cond {
        return Err(Error::Numerical(format!(
            "matrix is singular or ill-conditioned (|lambda| in [{:e}, {:e}])",
            min_abs.to_f64_lossy(),
            max_abs.to_f64_lossy()
        )));
    }
    let mut out = Array2::zeros((n, n));
    for k in 0..n {
        let inv_l = F::one() / eig.values[k];
        for i in 0..n {
            let vik = eig.vectors[(i, k)];
            for j in 0..n {
                out[(i, j)] += inv_l * vik * eig.vectors[(j, k)];
            }
        }
    }
    Ok(out)
}

/// True when all eigenvalues of the symmetrized input exceed `floor`.
pub fn is_positive_definite<F: Scalar>(a: &Array2<F>, floor: F) -> Result<bool> {
    let eig = symmetric_eigen(a)?;
    Ok(eig.values.iter().all(|&x| x > floor))
}

/// `(a + a')/2`.
pub fn symmetrize<F: Scalar>(a: &Array2<F>) -> Array2<F> {
    let half = F::from_f64_lossy(0.5);
    let mut out = a.clone();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            out[(i, j)] = (a[(i, j)] + a[(j, i)]) * half;
        }
    }
    out
}

/// Frobenius norm.
pub fn frobenius_norm<F: Scalar>(a: &Array2<F>) -> F {
    a.iter().map(|&x| x * x).sum::<F>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reconstruct(eig: &SymmetricEigen<f64>) -> Array2<f64> {
        let n = eig.values.len();
        let mut out = Array2::<f64>::zeros((n, n));
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += eig.values[k] * eig.vectors[(i, k)] * eig.vectors[(j, k)];
                }
            }
        }
        out
    }

    #[test]
    fn two_by_two_analytic() {
        // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
        let a = array![[2.0, 1.0], [1.0, 2.0]];
        let eig = symmetric_eigen(&a).unwrap();
        assert_abs_diff_eq!(eig.values[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.values[1], 3.0, epsilon = 1e-12);
        let rec = reconstruct(&eig);
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(rec[(i, j)], a[(i, j)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_matrix_is_fixed_point() {
        let a = array![[5.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, 0.5]];
        let eig = symmetric_eigen(&a).unwrap();
        assert_abs_diff_eq!(eig.values[0], -2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(eig.values[1], 0.5, epsilon = 1e-13);
        assert_abs_diff_eq!(eig.values[2], 5.0, epsilon = 1e-13);
    }

    #[test]
    fn random_matrices_reconstruct_and_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 3, 5, 17, 40] {
            let mut a = Array2::<f64>::zeros((n, n));
            for i in 0..n {
                for j in 0..=i {
                    let x: f64 = crate::scalar::Scalar::standard_normal(&mut rng);
                    a[(i, j)] = x;
                    a[(j, i)] = x;
                }
            }
            let eig = symmetric_eigen(&a).unwrap();
            // ascending order
            for k in 1..n {
                assert!(eig.values[k] >= eig.values[k - 1]);
            }
            // reconstruction
            let rec = reconstruct(&eig);
            for i in 0..n {
                for j in 0..n {
                    assert_abs_diff_eq!(rec[(i, j)], a[(i, j)], epsilon = 1e-9 * (n as f64));
                }
            }
            // orthonormal columns
            let vtv = eig.vectors.t().dot(&eig.vectors);
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(vtv[(i, j)], want, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn repeated_eigenvalues_are_handled() {
        // Identity has a fully degenerate spectrum.
        let a = Array2::<f64>::eye(6);
        let eig = symmetric_eigen(&a).unwrap();
        for k in 0..6 {
            assert_abs_diff_eq!(eig.values[k], 1.0, epsilon = 1e-13);
        }
        let rec = reconstruct(&eig);
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(rec[(i, j)], want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = array![[4.0, 1.0, 0.2], [1.0, 3.0, -0.5], [0.2, -0.5, 2.0]];
        let inv = sym_inverse(&a, 1e12).unwrap();
        let prod = a.dot(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(prod[(i, j)], want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn inverse_rejects_singular() {
        let a = array![[1.0, 1.0], [1.0, 1.0]];
        assert!(sym_inverse(&a, 1e12).is_err());
    }

    #[test]
    fn works_for_f32() {
        let a = array![[2.0f32, 1.0], [1.0, 2.0]];
        let eig = symmetric_eigen(&a).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-5);
        assert!((eig.values[1] - 3.0).abs() < 1e-5);
    }
}
