//! Hermitian eigenvalue solvers.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use ndarray::Array2;
use num_complex::Complex;

const MAX_QL_ITERATIONS: usize = 64;
const MAX_JACOBI_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The input must already be Hermitian (callers symmetrize first). Matrices
/// with negligible imaginary part are routed through a real-symmetric
/// reduction, which is what the large state-family checks hit.
pub fn hermitian_eigenvalues<T: Scalar>(h: &Array2<Complex<T>>) -> Result<Vec<T>> {
    let n = h.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![h[[0, 0]].re]);
    }
    let (mut max_re, mut max_im) = (T::zero(), T::zero());
    for z in h.iter() {
        max_re = max_re.max(z.re.abs());
        max_im = max_im.max(z.im.abs());
    }
    let (mut d, mut e) = if max_im <= max_re * T::epsilon() {
        let mut a: Vec<T> = h.iter().map(|z| z.re).collect();
        sym_tridiagonalize(&mut a, n)
    } else {
        let mut a: Vec<Complex<T>> = h.iter().cloned().collect();
        herm_tridiagonalize(&mut a, n)
    };
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).expect("non-NaN eigenvalue"));
    Ok(d)
}

/// Householder reduction of a real symmetric matrix to tridiagonal form.
///
/// `a` is the row-major full matrix; only its lower triangle is referenced
/// and the storage is destroyed. Returns `(diagonal, subdiagonal)` with
/// `sub[i]` coupling rows `i-1` and `i` (`sub[0]` unused).
fn sym_tridiagonalize<T: Scalar>(a: &mut [T], n: usize) -> (Vec<T>, Vec<T>) {
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    let mut v = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    for i in (1..n).rev() {
        let l = i;
        let row_i = i * n;
        let mut scale = T::zero();
        for j in 0..l {
            scale += a[row_i + j].abs();
        }
        if scale == T::zero() || l == 1 {
            e[i] = a[row_i + l - 1];
            continue;
        }
        let mut h = T::zero();
        for j in 0..l {
            v[j] = a[row_i + j] / scale;
            h += v[j] * v[j];
        }
        let f = v[l - 1];
        let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        let denom = h - f * g;
        v[l - 1] = f - g;

        // p = A v / denom over the leading l x l block, lower triangle only
        p[..l].fill(T::zero());
        for j in 0..l {
            let row_j = j * n;
            let vj = v[j];
            let mut s = a[row_j + j] * vj;
            for k in 0..j {
                s += a[row_j + k] * v[k];
                p[k] += a[row_j + k] * vj;
            }
            p[j] += s;
        }
        let mut vp = T::zero();
        for j in 0..l {
            p[j] /= denom;
            vp += v[j] * p[j];
        }
        // q = p - (v.p / 2 denom) v, then A -= v qT + q vT
        let kk = vp / (denom + denom);
        for j in 0..l {
            p[j] -= kk * v[j];
        }
        for j in 0..l {
            let row_j = j * n;
            let vj = v[j];
            let qj = p[j];
            for k in 0..=j {
                a[row_j + k] -= vj * p[k] + qj * v[k];
            }
        }
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    (d, e)
}

/// Householder reduction of a complex Hermitian matrix to a real
/// tridiagonal with the same spectrum (subdiagonal phases are a diagonal
/// unitary similarity and are dropped).
fn herm_tridiagonalize<T: Scalar>(a: &mut [Complex<T>], n: usize) -> (Vec<T>, Vec<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for i in (1..n).rev() {
        let l = i;
        let row_i = i * n;
        let mut scale = T::zero();
        for j in 0..l {
            scale += a[row_i + j].re.abs() + a[row_i + j].im.abs();
        }
        if scale == T::zero() || l == 1 {
            e[i] = a[row_i + l - 1].norm();
            continue;
        }
        // Householder vector from the column A[0..l, i] = conj(row entries)
        let mut h = T::zero();
        for j in 0..l {
            v[j] = (a[row_i + j] / scale).conj();
            h += v[j].norm_sqr();
        }
        let g = h.sqrt();
        e[i] = scale * g;
        let f = v[l - 1].norm();
        let phase = if f > T::zero() {
            v[l - 1] / f
        } else {
            Complex::new(T::one(), T::zero())
        };
        v[l - 1] += phase * g;
        let denom = h + f * g; // ||v||^2 / 2

        p[..l].fill(zero);
        for j in 0..l {
            let row_j = j * n;
            let vj = v[j];
            let mut s = a[row_j + j] * vj;
            for k in 0..j {
                s += a[row_j + k] * v[k];
                p[k] += a[row_j + k].conj() * vj;
            }
            p[j] += s;
        }
        let mut vp = zero;
        for j in 0..l {
            p[j] /= denom;
            vp += v[j].conj() * p[j];
        }
        let kk = vp / (denom + denom);
        for j in 0..l {
            p[j] -= kk * v[j];
        }
        for j in 0..l {
            let row_j = j * n;
            let vj = v[j];
            let qj = p[j];
            for k in 0..=j {
                a[row_j + k] = a[row_j + k] - vj * p[k].conj() - qj * v[k].conj();
            }
        }
    }
    for i in 0..n {
        d[i] = a[i * n + i].re;
    }
    (d, e)
}

/// Implicit-shift QL on a symmetric tridiagonal; `d` receives the
/// eigenvalues (unsorted), `e[i]` couples rows `i-1` and `i`.
fn tridiagonal_eigenvalues<T: Scalar>(d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    // shift to the convention f[i] = coupling(i, i+1)
    let mut f = vec![T::zero(); n];
    f[..n - 1].copy_from_slice(&e[1..n]);
    let eps = T::epsilon();
    // absolute deflation floor: couplings below eps * ||T|| move any
    // eigenvalue by at most that much (needed when whole diagonal blocks
    // vanish, as they do for the very sparse transposed states)
    let mut anorm = T::zero();
    for i in 0..n {
        let left = if i > 0 { f[i - 1].abs() } else { T::zero() };
        let right = if i < n - 1 { f[i].abs() } else { T::zero() };
        anorm = anorm.max(d[i].abs() + left + right);
    }
    let floor = eps * anorm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if f[m].abs() <= eps * dd || f[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (f[l] + f[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + f[l] / (g + r.copysign(g));
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut fv = s * f[i];
                let b = c * f[i];
                r = fv.hypot(g);
                f[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    f[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = fv / r;
                c = g / r;
                g = d[i + 1] - p;
                fv = (d[i] - g) * s + (c + c) * b;
                p = s * fv;
                d[i + 1] = g + p;
                g = c * fv - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            f[l] = g;
            f[m] = T::zero();
        }
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns ascending eigenvalues and the matrix whose columns are the
/// matching eigenvectors. Quadratic-in-sweeps and meant for the small
/// matrices (purifications, twisting blocks); the tridiagonal route above
/// is the one to use when only eigenvalues of a large matrix are needed.
pub fn hermitian_eigen<T: Scalar>(h: &Array2<Complex<T>>) -> Result<(Vec<T>, Array2<Complex<T>>)> {
    let n = h.nrows();
    let mut a = h.clone();
    let mut vecs = super::eye::<T>(n);
    if n <= 1 {
        return Ok((a.iter().map(|z| z.re).collect(), vecs));
    }
    let fro = a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if fro > T::zero() {
        for sweep in 0..MAX_JACOBI_SWEEPS {
            let off: T = offdiag_norm(&a);
            if off <= T::epsilon() * fro {
                break;
            }
            let thresh = if sweep < 3 {
                let nn = T::from_usize(n * n).expect("usize fits scalar");
                T::from_f64(0.2).expect("constant") * off / nn
            } else {
                T::zero()
            };
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a[[p, q]];
                    let m = apq.norm();
                    if m <= thresh || m == T::zero() {
                        continue;
                    }
                    let (c, s) = jacobi_rotation(a[[p, p]].re, a[[q, q]].re, apq, m);
                    apply_similarity_rotation(&mut a, p, q, c, s);
                    apply_column_rotation(&mut vecs, p, q, c, s);
                }
            }
        }
        let off: T = offdiag_norm(&a);
        if off > T::from_f64(1e-7).expect("constant") * fro {
            return Err(Error::NoConvergence);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<T> = (0..n).map(|i| a[[i, i]].re).collect();
    order.sort_by(|&x, &y| vals[x].partial_cmp(&vals[y]).expect("non-NaN"));
    let sorted_vals: Vec<T> = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_vecs = Array2::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            sorted_vecs[[r, new]] = vecs[[r, old]];
        }
    }
    Ok((sorted_vals, sorted_vecs))
}

fn offdiag_norm<T: Scalar>(a: &Array2<Complex<T>>) -> T {
    let n = a.nrows();
    let mut off = T::zero();
    for p in 0..n {
        for q in 0..n {
            if p != q {
                off += a[[p, q]].norm_sqr();
            }
        }
    }
    off.sqrt()
}

/// Rotation (c, s-with-phase) zeroing the (p, q) entry of the Hermitian
/// 2x2 block [[app, apq], [conj(apq), aqq]].
fn jacobi_rotation<T: Scalar>(app: T, aqq: T, apq: Complex<T>, m: T) -> (T, Complex<T>) {
    let phase = apq / m;
    let tau = (aqq - app) / (m + m);
    let t = if tau >= T::zero() {
        T::one() / (tau + T::one().hypot(tau))
    } else {
        -T::one() / (-tau + T::one().hypot(tau))
    };
    let c = T::one() / T::one().hypot(t);
    let s = phase * (c * t);
    (c, s)
}

/// A <- R* A R with R the identity except R[p,p]=c, R[p,q]=s, R[q,p]=-conj(s), R[q,q]=c.
fn apply_similarity_rotation<T: Scalar>(
    a: &mut Array2<Complex<T>>,
    p: usize,
    q: usize,
    c: T,
    s: Complex<T>,
) {
    let n = a.nrows();
    for r in 0..n {
        let x = a[[r, p]];
        let y = a[[r, q]];
        a[[r, p]] = x * c - y * s.conj();
        a[[r, q]] = x * s + y * c;
    }
    for col in 0..n {
        let x = a[[p, col]];
        let y = a[[q, col]];
        a[[p, col]] = x * c - y * s;
        a[[q, col]] = x * s.conj() + y * c;
    }
}

fn apply_column_rotation<T: Scalar>(
    v: &mut Array2<Complex<T>>,
    p: usize,
    q: usize,
    c: T,
    s: Complex<T>,
) {
    let n = v.nrows();
    for r in 0..n {
        let x = v[[r, p]];
        let y = v[[r, q]];
        v[[r, p]] = x * c - y * s.conj();
        v[[r, q]] = x * s + y * c;
    }
}
