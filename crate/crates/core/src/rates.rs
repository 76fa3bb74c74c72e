//! ccq states, mutual informations and the distillable-key lower bound.
//!
//! Measuring the two key qubits of a purification in the computational
//! basis leaves the eavesdropper with one conditional pure state per
//! outcome. All the entropies entering the key bound depend only on the
//! Gram matrix of those unnormalized conditionals, which coincides
//! entrywise with the measured density matrix itself; no explicit
//! purification is ever materialized here. The purification route exists
//! in the test suites as an independent oracle.

use crate::error::{Error, Result};
use crate::operator::{entropy_bits, MultipartiteOperator};
use crate::scalar::Scalar;
use crate::squeeze::XState;
use crate::{linalg, scalar::re_c};
use ndarray::Array2;
use num_complex::Complex;

const TRACE_TOL: f64 = 1e-8;

/// Joint key distribution plus the Gram matrix of the eavesdropper's
/// unnormalized conditional states, `gram[kl][ij] = <kl|rho|ij>`.
#[derive(Clone, Debug)]
pub struct CcqState<T: Scalar> {
    p: [T; 4],
    gram: Array2<Complex<T>>,
}

impl<T: Scalar> CcqState<T> {
    /// Builds the ccq data of a two-qubit density matrix, verifying it is
    /// PSD and unit-trace.
    pub fn from_density(rho4: &MultipartiteOperator<T>, tol: T) -> Result<Self> {
        if rho4.side() != 4 {
            return Err(Error::DimensionMismatch {
                left: rho4.dims().to_vec(),
                right: vec![2, 2],
            });
        }
        let spectrum = rho4.hermitian_spectrum(tol)?;
        if spectrum.min() < -tol {
            return Err(Error::NotPositive {
                value: spectrum.min().to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        let trace = spectrum.sum();
        if (trace - T::one()).abs() > T::from_f64(TRACE_TOL).expect("constant") {
            return Err(Error::NotUnitTrace {
                trace: trace.to_f64().unwrap_or(f64::NAN),
                tol: TRACE_TOL,
            });
        }
        let gram = rho4.entries().clone();
        let p = [
            gram[[0, 0]].re.max(T::zero()),
            gram[[1, 1]].re.max(T::zero()),
            gram[[2, 2]].re.max(T::zero()),
            gram[[3, 3]].re.max(T::zero()),
        ];
        Ok(CcqState { p, gram })
    }

    /// Exact ccq data of an X-state, no eigenvalue check needed.
    pub fn from_xstate(x: &XState<T>) -> Self {
        let p = x.probabilities();
        let mut gram = Array2::zeros((4, 4));
        for (i, pi) in p.iter().enumerate() {
            gram[[i, i]] = re_c(*pi);
        }
        gram[[1, 2]] = re_c(x.c / x.norm);
        gram[[2, 1]] = re_c(x.c / x.norm);
        CcqState { p, gram }
    }

    pub fn probabilities(&self) -> [T; 4] {
        self.p
    }

    pub fn gram(&self) -> &Array2<Complex<T>> {
        &self.gram
    }
}

/// Mutual informations (bits) and their difference, the achievable rate.
#[derive(Clone, Copy, Debug)]
pub struct RateRecord<T: Scalar> {
    pub i_ab: T,
    pub i_ae: T,
    pub rate: T,
}

/// One-way key-rate lower bound `I(A:B) - I(A:E)` of a ccq state.
///
/// Negative values are returned as-is; clamping for display is up to the
/// caller.
pub fn dw_rate<T: Scalar>(ccq: &CcqState<T>, tol: T) -> Result<RateRecord<T>> {
    let p = ccq.p;
    let pa = [p[0] + p[1], p[2] + p[3]];
    let pb = [p[0] + p[2], p[1] + p[3]];
    let i_ab = entropy_bits(&pa, tol)? + entropy_bits(&pb, tol)? - entropy_bits(&p, tol)?;

    let eve_total = linalg::hermitian_eigenvalues(ccq.gram())?;
    let s_e = entropy_bits(&eve_total, tol)?;
    let mut conditional = T::zero();
    for (a, &w) in pa.iter().enumerate() {
        if w <= T::zero() {
            continue;
        }
        let block: Array2<Complex<T>> =
            Array2::from_shape_fn((2, 2), |(r, c)| ccq.gram()[[2 * a + r, 2 * a + c]] / w);
        let eigs = linalg::hermitian_eigenvalues(&block)?;
        conditional += w * entropy_bits(&eigs, tol)?;
    }
    let i_ae = s_e - conditional;
    Ok(RateRecord {
        i_ab,
        i_ae,
        rate: i_ab - i_ae,
    })
}

/// Multipartite rate when every neighboring pair shares key at rate `r`:
/// the chain configuration yields `r / (n - 1)`.
pub fn chain_multikey<T: Scalar>(r: T, n_parties: usize) -> Result<T> {
    if r < T::zero() {
        return Err(Error::InvalidParameter(format!(
            "chain rate needs a nonnegative pair rate, got {r}"
        )));
    }
    if n_parties < 2 {
        return Err(Error::InvalidParameter(format!(
            "chain rate needs at least 2 parties, got {n_parties}"
        )));
    }
    Ok(r / T::from_usize(n_parties - 1).expect("count"))
}

/// Three-party rate from pairwise rates satisfying the triangle
/// inequality: `(r1 + r2 + r3) / 2`. Degenerate triangles are accepted.
pub fn triangle_multikey<T: Scalar>(r1: T, r2: T, r3: T) -> Result<T> {
    for (name, r) in [("r1", r1), ("r2", r2), ("r3", r3)] {
        if r < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "triangle rate needs nonnegative rates, got {name} = {r}"
            )));
        }
    }
    let checks = [
        ("r1", r1, "r2 + r3", r2 + r3),
        ("r2", r2, "r1 + r3", r1 + r3),
        ("r3", r3, "r1 + r2", r1 + r2),
    ];
    for (lhs, lv, rhs, rv) in checks {
        if lv > rv {
            return Err(Error::TriangleViolation {
                lhs,
                lhs_value: lv.to_f64().unwrap_or(f64::NAN),
                rhs,
                rhs_value: rv.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok((r1 + r2 + r3) / (T::one() + T::one()))
}
