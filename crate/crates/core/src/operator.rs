//! Dense complex operators tagged with a multipartite tensor structure.
//!
//! [`MultipartiteOperator`] is the universal carrier for states and
//! operators in this crate: a square row-major complex matrix together
//! with the ordered list of subsystem dimensions whose product is the
//! matrix side. Subsystem indices are 0-based and refer to positions in
//! that list.

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{re_c, Scalar};
use ndarray::Array2;
use num_complex::Complex;

/// Unit-trace gate for entropy inputs.
const TRACE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct MultipartiteOperator<T: Scalar> {
    dims: Vec<usize>,
    entries: Array2<Complex<T>>,
}

/// Real eigenvalues of a Hermitian operator, sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T: Scalar> {
    values: Vec<T>,
}

impl<T: Scalar> Spectrum<T> {
    pub(crate) fn from_ascending(mut values: Vec<T>) -> Self {
        values.reverse();
        Spectrum { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn min(&self) -> T {
        self.values.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.values.first().cloned().unwrap_or_else(T::zero)
    }

    pub fn sum(&self) -> T {
        self.values.iter().cloned().sum()
    }

    pub fn abs_sum(&self) -> T {
        self.values.iter().map(|v| v.abs()).sum()
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

impl<T: Scalar> MultipartiteOperator<T> {
    /// Wraps a matrix after checking that its side matches the dims product.
    pub fn new(dims: Vec<usize>, entries: Array2<Complex<T>>) -> Result<Self> {
        let side: usize = dims.iter().product();
        if dims.contains(&0) {
            return Err(Error::InvalidParameter("zero subsystem dimension".into()));
        }
        if entries.nrows() != side || entries.ncols() != side {
            return Err(Error::ShapeMismatch {
                rows: entries.nrows(),
                cols: entries.ncols(),
                side,
                dims,
            });
        }
        Ok(MultipartiteOperator { dims, entries })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let side: usize = dims.iter().product();
        MultipartiteOperator {
            dims,
            entries: Array2::zeros((side, side)),
        }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let mut op = Self::zeros(dims);
        for i in 0..op.side() {
            op.entries[[i, i]] = re_c(T::one());
        }
        op
    }

    pub fn from_fn(dims: Vec<usize>, f: impl Fn(usize, usize) -> Complex<T>) -> Self {
        let side: usize = dims.iter().product();
        MultipartiteOperator {
            dims,
            entries: Array2::from_shape_fn((side, side), |(r, c)| f(r, c)),
        }
    }

    pub fn from_diagonal(dims: Vec<usize>, diag: &[Complex<T>]) -> Result<Self> {
        let side: usize = dims.iter().product();
        if diag.len() != side {
            return Err(Error::ShapeMismatch {
                rows: diag.len(),
                cols: diag.len(),
                side,
                dims,
            });
        }
        let mut op = Self::zeros(dims);
        for (i, z) in diag.iter().enumerate() {
            op.entries[[i, i]] = *z;
        }
        Ok(op)
    }

    /// Rank-one projector onto the given (not necessarily normalized)
    /// amplitude vector.
    pub fn projector(dims: Vec<usize>, amplitudes: &[Complex<T>]) -> Result<Self> {
        let side: usize = dims.iter().product();
        if amplitudes.len() != side {
            return Err(Error::ShapeMismatch {
                rows: amplitudes.len(),
                cols: 1,
                side,
                dims,
            });
        }
        Ok(MultipartiteOperator {
            dims,
            entries: Array2::from_shape_fn((side, side), |(r, c)| {
                amplitudes[r] * amplitudes[c].conj()
            }),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn side(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex<T>> {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut Array2<Complex<T>> {
        &mut self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.entries[[r, c]]
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.side()).map(|i| self.entries[[i, i]]).sum()
    }

    pub fn dagger(&self) -> Self {
        MultipartiteOperator {
            dims: self.dims.clone(),
            entries: linalg::adjoint(&self.entries),
        }
    }

    pub fn max_abs(&self) -> T {
        linalg::max_abs(&self.entries)
    }

    /// Largest magnitude of `M - M^dagger` entries.
    pub fn hermiticity_residual(&self) -> T {
        let n = self.side();
        let mut res = T::zero();
        for r in 0..n {
            for c in r..n {
                let d = self.entries[[r, c]] - self.entries[[c, r]].conj();
                res = res.max(d.norm());
            }
        }
        res
    }

    /// Checks `max|M - M^dagger| <= rel_tol * max|M|`.
    pub fn ensure_hermitian(&self, rel_tol: T) -> Result<()> {
        let residual = self.hermiticity_residual();
        let bound = rel_tol * self.max_abs();
        if residual > bound {
            return Err(Error::NotHermitian {
                residual: residual.to_f64().unwrap_or(f64::NAN),
                tol: bound.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    pub fn scale(&mut self, w: Complex<T>) {
        self.entries.mapv_inplace(|z| z * w);
    }

    pub fn scaled(&self, w: Complex<T>) -> Self {
        let mut out = self.clone();
        out.scale(w);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(MultipartiteOperator {
            dims: self.dims.clone(),
            entries: &self.entries + &other.entries,
        })
    }

    pub fn add_scaled(&mut self, other: &Self, w: Complex<T>) -> Result<()> {
        self.check_same_dims(other)?;
        self.entries
            .zip_mut_with(&other.entries, |a, b| *a += *b * w);
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(MultipartiteOperator {
            dims: self.dims.clone(),
            entries: &self.entries - &other.entries,
        })
    }

    /// Matrix product; dims must agree entrywise.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(MultipartiteOperator {
            dims: self.dims.clone(),
            entries: self.entries.dot(&other.entries),
        })
    }

    /// Largest entry magnitude of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut res = T::zero();
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            res = res.max((*a - *b).norm());
        }
        res
    }

    fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                left: self.dims.clone(),
                right: other.dims.clone(),
            });
        }
        Ok(())
    }

    fn validated_subset(&self, subsystems: &[usize]) -> Result<Vec<usize>> {
        let count = self.dims.len();
        let mut sel: Vec<usize> = subsystems.to_vec();
        sel.sort_unstable();
        sel.dedup();
        if let Some(&bad) = sel.iter().find(|&&k| k >= count) {
            return Err(Error::SubsystemOutOfRange { index: bad, count });
        }
        Ok(sel)
    }

    /// Kronecker product; dims concatenate.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        MultipartiteOperator {
            dims,
            entries: ndarray::linalg::kron(&self.entries, &other.entries),
        }
    }

    /// `self += weight * (a tensor b)` without materializing the product.
    /// Zero entries of `a` are skipped, which makes assembling sums of
    /// sparse-key terms cheap.
    pub fn accumulate_kron(&mut self, a: &Self, b: &Self, weight: Complex<T>) -> Result<()> {
        let expected: Vec<usize> = a.dims.iter().chain(b.dims.iter()).cloned().collect();
        if self.dims != expected {
            return Err(Error::DimensionMismatch {
                left: self.dims.clone(),
                right: expected,
            });
        }
        let nb = b.side();
        for r1 in 0..a.side() {
            for c1 in 0..a.side() {
                let av = a.entries[[r1, c1]] * weight;
                if av.re == T::zero() && av.im == T::zero() {
                    continue;
                }
                for r2 in 0..nb {
                    for c2 in 0..nb {
                        self.entries[[r1 * nb + r2, c1 * nb + c2]] += av * b.entries[[r2, c2]];
                    }
                }
            }
        }
        Ok(())
    }

    /// Transposes the listed subsystems; dims and trace are unchanged.
    pub fn partial_transpose(&self, subsystems: &[usize]) -> Result<Self> {
        let sel = self.validated_subset(subsystems)?;
        if sel.is_empty() {
            return Ok(self.clone());
        }
        let n = self.side();
        let st = strides(&self.dims);
        // flattened contribution of the selected digits for every index
        let mut sel_part = vec![0usize; n];
        for (idx, part) in sel_part.iter_mut().enumerate() {
            let mut s = 0;
            for &k in &sel {
                s += ((idx / st[k]) % self.dims[k]) * st[k];
            }
            *part = s;
        }
        let mut out = Array2::zeros((n, n));
        for r in 0..n {
            let rb = r - sel_part[r];
            for c in 0..n {
                let cb = c - sel_part[c];
                out[[rb + sel_part[c], cb + sel_part[r]]] = self.entries[[r, c]];
            }
        }
        Ok(MultipartiteOperator {
            dims: self.dims.clone(),
            entries: out,
        })
    }

    /// Traces out the listed subsystems; tracing all of them leaves a
    /// 1x1 scalar operator with an empty dims list.
    pub fn partial_trace(&self, subsystems: &[usize]) -> Result<Self> {
        let sel = self.validated_subset(subsystems)?;
        if sel.is_empty() {
            return Ok(self.clone());
        }
        let n = self.side();
        let st = strides(&self.dims);
        let kept: Vec<usize> = (0..self.dims.len()).filter(|k| !sel.contains(k)).collect();
        let kept_dims: Vec<usize> = kept.iter().map(|&k| self.dims[k]).collect();
        let kept_strides = strides(&kept_dims);
        let mut traced_key = vec![0usize; n];
        let mut kept_key = vec![0usize; n];
        for idx in 0..n {
            let mut t = 0;
            for &k in &sel {
                t = t * self.dims[k] + (idx / st[k]) % self.dims[k];
            }
            traced_key[idx] = t;
            let mut kk = 0;
            for (pos, &k) in kept.iter().enumerate() {
                kk += ((idx / st[k]) % self.dims[k]) * kept_strides[pos];
            }
            kept_key[idx] = kk;
        }
        let n_out: usize = kept_dims.iter().product();
        let mut out = Array2::zeros((n_out, n_out));
        for r in 0..n {
            for c in 0..n {
                if traced_key[r] == traced_key[c] {
                    out[[kept_key[r], kept_key[c]]] += self.entries[[r, c]];
                }
            }
        }
        Ok(MultipartiteOperator {
            dims: kept_dims,
            entries: out,
        })
    }

    /// Reorders subsystems; `perm[new] = old`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let count = self.dims.len();
        if perm.len() != count {
            return Err(Error::InvalidParameter(format!(
                "permutation length {} does not match {} subsystems",
                perm.len(),
                count
            )));
        }
        let mut seen = vec![false; count];
        for &old in perm {
            if old >= count || seen[old] {
                return Err(Error::InvalidParameter(format!(
                    "invalid subsystem permutation {perm:?}"
                )));
            }
            seen[old] = true;
        }
        let n = self.side();
        let st_old = strides(&self.dims);
        let new_dims: Vec<usize> = perm.iter().map(|&old| self.dims[old]).collect();
        let st_new = strides(&new_dims);
        let mut map = vec![0usize; n];
        for (idx, entry) in map.iter_mut().enumerate() {
            let mut out = 0;
            for (new, &old) in perm.iter().enumerate() {
                out += ((idx / st_old[old]) % self.dims[old]) * st_new[new];
            }
            *entry = out;
        }
        let mut out = Array2::zeros((n, n));
        for r in 0..n {
            for c in 0..n {
                out[[map[r], map[c]]] = self.entries[[r, c]];
            }
        }
        Ok(MultipartiteOperator {
            dims: new_dims,
            entries: out,
        })
    }

    /// Eigenvalues after verifying Hermiticity (relative tolerance) and
    /// symmetrizing.
    pub fn hermitian_spectrum(&self, rel_tol: T) -> Result<Spectrum<T>> {
        self.ensure_hermitian(rel_tol)?;
        let h = self.symmetrized();
        let vals = linalg::hermitian_eigenvalues(&h)?;
        Ok(Spectrum::from_ascending(vals))
    }

    /// Eigenvalues and eigenvectors (descending, columns matching), via
    /// the Jacobi route. Intended for small operators.
    pub fn hermitian_eigenpairs(&self, rel_tol: T) -> Result<(Spectrum<T>, Array2<Complex<T>>)> {
        self.ensure_hermitian(rel_tol)?;
        let h = self.symmetrized();
        let (vals, vecs) = linalg::hermitian_eigen(&h)?;
        let n = vals.len();
        let mut rev_vecs = Array2::zeros((n, n));
        for j in 0..n {
            for r in 0..n {
                rev_vecs[[r, j]] = vecs[[r, n - 1 - j]];
            }
        }
        Ok((Spectrum::from_ascending(vals), rev_vecs))
    }

    fn symmetrized(&self) -> Array2<Complex<T>> {
        let half = re_c(T::from_f64(0.5).expect("constant"));
        let adj = linalg::adjoint(&self.entries);
        (&self.entries + &adj).mapv(|z| z * half)
    }

    /// Operator absolute value `sqrt(M^dagger M)` computed from the SVD.
    pub fn operator_abs(&self) -> Self {
        let (_, sigma, v) = linalg::svd(&self.entries);
        let n = self.side();
        let mut vs = v.clone();
        for j in 0..n {
            for r in 0..n {
                vs[[r, j]] *= sigma[j];
            }
        }
        MultipartiteOperator {
            dims: self.dims.clone(),
            entries: vs.dot(&linalg::adjoint(&v)),
        }
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> T {
        let (_, sigma, _) = linalg::svd(&self.entries);
        sigma.into_iter().sum()
    }

    /// Factors `M = W . diag(sigma) . V^dagger`; `W`, `V` carry the same
    /// dims as `M` and sigma is descending.
    pub fn svd_factors(&self) -> (Self, Vec<T>, Self) {
        let (w, sigma, v) = linalg::svd(&self.entries);
        (
            MultipartiteOperator {
                dims: self.dims.clone(),
                entries: w,
            },
            sigma,
            MultipartiteOperator {
                dims: self.dims.clone(),
                entries: v,
            },
        )
    }

    /// Von Neumann entropy in bits of a unit-trace positive operator.
    ///
    /// Eigenvalues in `[-tol, 0]` are clipped to zero; anything more
    /// negative is an error, as is a trace off 1 by more than 1e-8.
    pub fn von_neumann_entropy(&self, tol: T) -> Result<T> {
        let spectrum = self.hermitian_spectrum(tol)?;
        let trace = spectrum.sum();
        let trace_tol = T::from_f64(TRACE_TOL).expect("constant");
        if (trace - T::one()).abs() > trace_tol {
            return Err(Error::NotUnitTrace {
                trace: trace.to_f64().unwrap_or(f64::NAN),
                tol: TRACE_TOL,
            });
        }
        entropy_bits(spectrum.values(), tol)
    }
}

/// Shannon entropy in bits of a nonnegative vector (zeros contribute
/// nothing); values in `[-tol, 0]` are clipped, more negative ones are
/// rejected.
pub fn entropy_bits<T: Scalar>(values: &[T], tol: T) -> Result<T> {
    let mut h = T::zero();
    for &v in values {
        if v < -tol {
            return Err(Error::NotPositive {
                value: v.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        if v > T::zero() {
            h -= v * v.log2();
        }
    }
    Ok(h)
}

/// Kronecker product of a nonempty list, in order.
pub fn tensor_all<T: Scalar>(ops: &[&MultipartiteOperator<T>]) -> Result<MultipartiteOperator<T>> {
    let (first, rest) = ops.split_first().ok_or(Error::EmptyTensorList)?;
    let mut acc = (*first).clone();
    for op in rest {
        acc = acc.tensor(op);
    }
    Ok(acc)
}
