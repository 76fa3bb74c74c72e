//! One-sided Jacobi singular value decomposition for square complex
//! matrices.

use crate::scalar::Scalar;
use ndarray::Array2;
use num_complex::Complex;

const MAX_SWEEPS: usize = 60;

/// Full SVD `a = w . diag(sigma) . v_dagger` with unitary `w`, `v` and
/// singular values descending.
pub fn svd<T: Scalar>(a: &Array2<Complex<T>>) -> (Array2<Complex<T>>, Vec<T>, Array2<Complex<T>>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "svd expects a square matrix");
    let mut u = a.clone();
    let mut v = super::eye::<T>(n);
    if n == 0 {
        return (u, Vec::new(), v);
    }

    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let mut app = T::zero();
                let mut aqq = T::zero();
                let mut apq = Complex::new(T::zero(), T::zero());
                for r in 0..n {
                    let up = u[[r, p]];
                    let uq = u[[r, q]];
                    app += up.norm_sqr();
                    aqq += uq.norm_sqr();
                    apq += up.conj() * uq;
                }
                let m = apq.norm();
                if m == T::zero() || m <= eps * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                // phase-align column q, then a real Givens on the 2x2 Gram
                let phase = (apq / m).conj();
                let tau = (aqq - app) / (m + m);
                let t = if tau >= T::zero() {
                    T::one() / (tau + T::one().hypot(tau))
                } else {
                    -T::one() / (-tau + T::one().hypot(tau))
                };
                let c = T::one() / T::one().hypot(t);
                let s = c * t;
                for r in 0..n {
                    let x = u[[r, p]];
                    let y = u[[r, q]] * phase;
                    u[[r, p]] = x * c - y * s;
                    u[[r, q]] = x * s + y * c;
                }
                for r in 0..n {
                    let x = v[[r, p]];
                    let y = v[[r, q]] * phase;
                    v[[r, p]] = x * c - y * s;
                    v[[r, q]] = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<T> = (0..n)
        .map(|j| (0..n).map(|r| u[[r, j]].norm_sqr()).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].partial_cmp(&sigma[x]).expect("non-NaN"));
    let mut w = Array2::zeros((n, n));
    let mut v_sorted = Array2::zeros((n, n));
    let sigma_sorted: Vec<T> = order.iter().map(|&j| sigma[j]).collect();
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            w[[r, new]] = u[[r, old]];
            v_sorted[[r, new]] = v[[r, old]];
        }
    }
    sigma = sigma_sorted;

    // normalize left singular vectors; complete the basis on null columns
    let cutoff = sigma.first().cloned().unwrap_or(T::zero())
        * eps
        * T::from_usize(n).expect("usize fits scalar");
    let mut null_columns = Vec::new();
    for j in 0..n {
        if sigma[j] > cutoff && sigma[j] > T::zero() {
            for r in 0..n {
                w[[r, j]] /= sigma[j];
            }
        } else {
            null_columns.push(j);
        }
    }
    for &j in &null_columns {
        complete_column(&mut w, j, &null_columns);
    }
    (w, sigma, v_sorted)
}

/// Replaces column `j` of `w` with a unit vector orthogonal to every
/// column not listed in `pending` and to already-completed pending
/// columns before `j`.
fn complete_column<T: Scalar>(w: &mut Array2<Complex<T>>, j: usize, pending: &[usize]) {
    let n = w.nrows();
    let half = T::from_f64(0.5).expect("constant");
    for cand in 0..n {
        let mut col: Vec<Complex<T>> = vec![Complex::new(T::zero(), T::zero()); n];
        col[cand] = Complex::new(T::one(), T::zero());
        for other in 0..n {
            let skip = other == j || pending.iter().any(|&p| p == other && p > j);
            if skip {
                continue;
            }
            let mut overlap = Complex::new(T::zero(), T::zero());
            for r in 0..n {
                overlap += w[[r, other]].conj() * col[r];
            }
            for r in 0..n {
                let sub = w[[r, other]] * overlap;
                col[r] -= sub;
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm > half {
            for r in 0..n {
                w[[r, j]] = col[r] / norm;
            }
            return;
        }
    }
    // unreachable for consistent input sizes; leave the column as zeros
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{adjoint, eye};
    use crate::scalar::cplx;
    use rand::{Rng, SeedableRng};

    fn reconstruction_error(
        a: &Array2<Complex<f64>>,
        w: &Array2<Complex<f64>>,
        sigma: &[f64],
        v: &Array2<Complex<f64>>,
    ) -> f64 {
        let n = a.nrows();
        let mut ws = w.clone();
        for j in 0..n {
            for r in 0..n {
                ws[[r, j]] *= cplx::<f64>(sigma[j], 0.0);
            }
        }
        let rec = ws.dot(&adjoint(v));
        (&rec - a).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn unitarity_error(m: &Array2<Complex<f64>>) -> f64 {
        let n = m.nrows();
        let gram = adjoint(m).dot(m);
        (&gram - &eye::<f64>(n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn negative_scalar_absorbs_sign() {
        let a = Array2::from_shape_fn((1, 1), |_| cplx::<f64>(-1.0, 0.0));
        let (w, sigma, v) = svd(&a);
        assert!((sigma[0] - 1.0).abs() < 1e-15);
        assert!(reconstruction_error(&a, &w, &sigma, &v) < 1e-15);
    }

    #[test]
    fn rank_deficient_keeps_unitary_factors() {
        let mut a = Array2::zeros((3, 3));
        a[[0, 0]] = cplx::<f64>(2.0, 0.0);
        a[[1, 0]] = cplx::<f64>(0.0, 1.0);
        let (w, sigma, v) = svd(&a);
        assert!(sigma[1].abs() < 1e-12 && sigma[2].abs() < 1e-12);
        assert!(unitarity_error(&w) < 1e-12, "w not unitary");
        assert!(unitarity_error(&v) < 1e-12, "v not unitary");
        assert!(reconstruction_error(&a, &w, &sigma, &v) < 1e-12);
    }

    #[test]
    fn random_matrices_reconstruct() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 4, 7, 16] {
            let a: Array2<Complex<f64>> = Array2::from_shape_fn((n, n), |_| {
                cplx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let (w, sigma, v) = svd(&a);
            assert!(reconstruction_error(&a, &w, &sigma, &v) < 1e-12, "n={n}");
            assert!(unitarity_error(&w) < 1e-12);
            assert!(unitarity_error(&v) < 1e-12);
            for pair in sigma.windows(2) {
                assert!(pair[0] >= pair[1]);
            }
        }
    }

    #[test]
    fn singular_values_match_hermitian_spectrum() {
        // for Hermitian input, singular values are |eigenvalues|
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let n = 6;
        let g: Array2<Complex<f64>> = Array2::from_shape_fn((n, n), |_| {
            cplx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = &g + &adjoint(&g);
        let (_, sigma, _) = svd(&h);
        let mut abs_eigs: Vec<f64> = crate::linalg::hermitian_eigenvalues(&h)
            .unwrap()
            .into_iter()
            .map(f64::abs)
            .collect();
        abs_eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (s, e) in sigma.iter().zip(abs_eigs.iter()) {
            assert!((s - e).abs() < 1e-10);
        }
    }
}
