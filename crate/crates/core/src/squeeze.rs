//! Key-basis twistings and privacy squeezing of two-party reductions.
//!
//! A twisting is a unitary controlled by the two-qubit key basis that acts
//! on the shield. Conjugating a key-shield state by a twisting leaves every
//! key-basis measurement outcome unchanged; tracing out the shield
//! afterwards gives the privacy-squeezed two-qubit state whose key rate
//! lower-bounds that of the original.

use crate::error::{Error, Result};
use crate::family::StateFamilyParams;
use crate::linalg;
use crate::operator::MultipartiteOperator;
use crate::scalar::{count, re_c, Scalar};
use ndarray::Array2;
use num_complex::Complex;

/// Key-controlled shield unitary `sum_ij |ij><ij| (x) U_ij`.
#[derive(Clone, Debug)]
pub struct Twisting<T: Scalar> {
    blocks: [Array2<Complex<T>>; 4],
}

impl<T: Scalar> Twisting<T> {
    pub fn identity(shield_side: usize) -> Self {
        let eye = linalg::eye::<T>(shield_side);
        Twisting {
            blocks: [eye.clone(), eye.clone(), eye.clone(), eye],
        }
    }

    /// Blocks in key-basis order 00, 01, 10, 11; each must be unitary.
    pub fn from_blocks(blocks: [Array2<Complex<T>>; 4], tol: T) -> Result<Self> {
        let tw = Twisting { blocks };
        tw.validate(tol)?;
        Ok(tw)
    }

    /// The singular-value-adapted twisting of an operator: with
    /// `x = w sigma v^dagger`, uses `U_01 = w^dagger` and `U_10 =
    /// v^dagger` so that `U_01 x U_10^dagger` is the diagonal of singular
    /// values; the 00 and 11 blocks stay trivial.
    pub fn from_operator_svd(x: &MultipartiteOperator<T>) -> Self {
        let (w, _, v) = x.svd_factors();
        let eye = linalg::eye::<T>(x.side());
        Twisting {
            blocks: [
                eye.clone(),
                linalg::adjoint(w.entries()),
                linalg::adjoint(v.entries()),
                eye,
            ],
        }
    }

    pub fn shield_side(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn block(&self, key_index: usize) -> &Array2<Complex<T>> {
        &self.blocks[key_index]
    }

    pub fn validate(&self, tol: T) -> Result<()> {
        let n = self.shield_side();
        for block in &self.blocks {
            if block.nrows() != n || block.ncols() != n {
                return Err(Error::InvalidParameter(
                    "twisting blocks must share one square shield size".into(),
                ));
            }
            let gram = linalg::adjoint(block).dot(block);
            let mut residual = T::zero();
            for r in 0..n {
                for c in 0..n {
                    let want = if r == c { T::one() } else { T::zero() };
                    residual = residual.max((gram[[r, c]] - re_c(want)).norm());
                }
            }
            if residual > tol {
                return Err(Error::NotUnitary {
                    residual: residual.to_f64().unwrap_or(f64::NAN),
                    tol: tol.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }
}

/// Traces every key qubit except parties `k` and `l` (1-based) out of the
/// family state; the full shield is retained and the output key order is
/// `(k, l)` as passed.
pub fn pair_reduction<T: Scalar>(
    rho: &MultipartiteOperator<T>,
    params: &StateFamilyParams<T>,
    k: usize,
    l: usize,
) -> Result<MultipartiteOperator<T>> {
    let n = params.n_parties();
    if k == l || !(1..=n).contains(&k) || !(1..=n).contains(&l) {
        return Err(Error::InvalidParameter(format!(
            "invalid party pair ({k}, {l}) for {n} parties"
        )));
    }
    if rho.dims() != params.full_dims().as_slice() {
        return Err(Error::DimensionMismatch {
            left: rho.dims().to_vec(),
            right: params.full_dims(),
        });
    }
    let traced: Vec<usize> = (0..n).filter(|&s| s != k - 1 && s != l - 1).collect();
    let reduced = rho.partial_trace(&traced)?;
    if k < l {
        Ok(reduced)
    } else {
        // partial_trace keeps slot order; restore the requested key order
        let mut perm: Vec<usize> = (0..reduced.dims().len()).collect();
        perm.swap(0, 1);
        reduced.permute_subsystems(&perm)
    }
}

/// Conjugates a `[2, 2] ++ shield` state by the twisting and traces the
/// shield, returning the squeezed two-qubit state with its coherence
/// rotated to be real nonnegative.
pub fn privacy_squeeze<T: Scalar>(
    pair_state: &MultipartiteOperator<T>,
    twisting: &Twisting<T>,
) -> Result<MultipartiteOperator<T>> {
    let dims = pair_state.dims();
    if dims.len() < 2 || dims[0] != 2 || dims[1] != 2 {
        return Err(Error::DimensionMismatch {
            left: dims.to_vec(),
            right: vec![2, 2],
        });
    }
    let shield: usize = dims[2..].iter().product();
    if shield != twisting.shield_side() {
        return Err(Error::DimensionMismatch {
            left: vec![shield],
            right: vec![twisting.shield_side()],
        });
    }
    let entries = pair_state.entries();
    let mut squeezed = Array2::zeros((4, 4));
    for x in 0..4 {
        for y in 0..4 {
            // trace(U_x B_xy U_y^dagger) = trace(B_xy C) with C = U_y^dagger U_x
            let c = linalg::adjoint(twisting.block(y)).dot(twisting.block(x));
            let mut acc = Complex::new(T::zero(), T::zero());
            for r in 0..shield {
                for s in 0..shield {
                    acc += entries[[x * shield + r, y * shield + s]] * c[[s, r]];
                }
            }
            squeezed[[x, y]] = acc;
        }
    }
    // local key-diagonal phase making the (01,10) coherence real >= 0
    let coh = squeezed[[1, 2]];
    if coh.norm() > T::zero() {
        let phase = (coh / coh.norm()).conj();
        for c in 0..4 {
            squeezed[[1, c]] *= phase;
        }
        for r in 0..4 {
            squeezed[[r, 1]] *= phase.conj();
        }
    }
    MultipartiteOperator::new(vec![2, 2], squeezed)
}

/// Two-qubit X-state record: unnormalized diagonal `(a, b, b, d)` with a
/// real coherence `c` between the single-excitation entries, normalized
/// by `norm`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XState<T: Scalar> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub norm: T,
}

impl<T: Scalar> XState<T> {
    pub fn new(a: T, b: T, c: T, d: T, norm: T) -> Result<Self> {
        if a < T::zero() || b < T::zero() || c < T::zero() || d < T::zero() || norm <= T::zero() {
            return Err(Error::InvalidParameter(
                "x-state entries must be nonnegative with a positive norm".into(),
            ));
        }
        let slack = T::from_f64(1e-12).expect("constant") * norm;
        if ((a + b + b + d) - norm).abs() > slack {
            return Err(Error::InvalidParameter(format!(
                "x-state norm mismatch: a+2b+d != norm ({:?} vs {:?})",
                a + b + b + d,
                norm
            )));
        }
        if c > b + slack {
            return Err(Error::InvalidParameter(
                "x-state coherence exceeds its diagonal, state not PSD".into(),
            ));
        }
        Ok(XState { a, b, c, d, norm })
    }

    /// Privacy-squeezed pair reduction of the family state in closed
    /// form, for any party count >= 3 and any shield dimension >= 2.
    pub fn family_closed_form(n_parties: usize, shield_dim: usize) -> Result<Self> {
        if n_parties < 3 || shield_dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "closed form needs n >= 3 and d >= 2, got ({n_parties}, {shield_dim})"
            )));
        }
        let n = count::<T>(n_parties);
        let d = count::<T>(shield_dim);
        let one = T::one();
        let two = one + one;
        let three = two + one;
        let a = (n - two) * (n - one) * d
            + (three * n * n - (T::from_f64(11.0).unwrap()) * n + T::from_f64(12.0).unwrap()) / two
                * n;
        let b = (n - one) * d + two * (n - two) * n;
        let c = d;
        let dd = n;
        let norm = n * ((n - one) * d + (three * n * n - three * n - two) / two);
        XState::new(a, b, c, dd, norm)
    }

    /// Normalized 4x4 density matrix, dims `[2, 2]`.
    pub fn to_density(&self) -> MultipartiteOperator<T> {
        let mut m = Array2::zeros((4, 4));
        m[[0, 0]] = re_c(self.a / self.norm);
        m[[1, 1]] = re_c(self.b / self.norm);
        m[[2, 2]] = re_c(self.b / self.norm);
        m[[3, 3]] = re_c(self.d / self.norm);
        m[[1, 2]] = re_c(self.c / self.norm);
        m[[2, 1]] = re_c(self.c / self.norm);
        MultipartiteOperator::new(vec![2, 2], m).expect("4x4 matches dims [2,2]")
    }

    /// Reads the X-state pattern off a two-qubit density matrix; entries
    /// outside the pattern or asymmetries beyond `tol` are rejected.
    pub fn from_density(op: &MultipartiteOperator<T>, tol: T) -> Result<Self> {
        if op.dims() != [2, 2] {
            return Err(Error::DimensionMismatch {
                left: op.dims().to_vec(),
                right: vec![2, 2],
            });
        }
        let m = op.entries();
        for r in 0..4 {
            for c in 0..4 {
                let in_pattern = r == c || (r == 1 && c == 2) || (r == 2 && c == 1);
                if !in_pattern && m[[r, c]].norm() > tol {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({r}, {c}) = {} breaks the x-state pattern",
                        m[[r, c]]
                    )));
                }
            }
        }
        let b01 = m[[1, 1]].re;
        let b10 = m[[2, 2]].re;
        if (b01 - b10).abs() > tol || m[[1, 2]].im.abs() > tol {
            return Err(Error::InvalidParameter(
                "x-state pattern requires equal middle diagonals and a real coherence".into(),
            ));
        }
        let half = T::from_f64(0.5).expect("constant");
        let trace = m[[0, 0]].re + b01 + b10 + m[[3, 3]].re;
        XState::new(
            m[[0, 0]].re,
            (b01 + b10) * half,
            m[[1, 2]].re.max(T::zero()),
            m[[3, 3]].re,
            trace,
        )
    }

    /// Key-basis outcome probabilities `(00, 01, 10, 11)`.
    pub fn probabilities(&self) -> [T; 4] {
        [
            self.a / self.norm,
            self.b / self.norm,
            self.b / self.norm,
            self.d / self.norm,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::StateFamilyParams;
    use crate::scalar::cplx;

    const TOL: f64 = 1e-10;

    fn params23() -> StateFamilyParams<f64> {
        StateFamilyParams::with_builtin_unitary(3, 2).unwrap()
    }

    #[test]
    fn svd_twisting_blocks_are_unitary_and_diagonalize() {
        let p = params23();
        let x = p.shield_ring().unwrap();
        let tw = Twisting::from_operator_svd(&x);
        tw.validate(TOL).unwrap();
        // trace(U01 X U10^dagger) equals the trace norm
        let prod = tw
            .block(1)
            .dot(x.entries())
            .dot(&linalg::adjoint(tw.block(2)));
        let tr: Complex<f64> = (0..prod.nrows()).map(|i| prod[[i, i]]).sum();
        let want = x.trace_norm();
        assert!((tr.re - want).abs() < 1e-10);
        assert!(tr.im.abs() < 1e-10);
    }

    #[test]
    fn svd_twisting_of_diagonal_psd_operator_is_phase_trivial() {
        let p = params23();
        let xabs = p.shield_ring_abs();
        let tw = Twisting::from_operator_svd(&xabs);
        let prod = tw
            .block(1)
            .dot(xabs.entries())
            .dot(&linalg::adjoint(tw.block(2)));
        let tr: Complex<f64> = (0..prod.nrows()).map(|i| prod[[i, i]]).sum();
        assert!((tr.norm() - xabs.trace().re).abs() < 1e-10);
    }

    #[test]
    fn pair_reduction_shape_trace_and_masses() {
        let p = params23();
        let rho = p.density_matrix().unwrap();
        let red = pair_reduction(&rho, &p, 1, 2).unwrap();
        assert_eq!(red.side(), 256);
        assert_eq!(&red.dims()[..2], &[2, 2]);
        assert!((red.trace().re - 1.0).abs() < 1e-12);
        // key-diagonal masses follow the (alpha, beta, beta, N) pattern
        let shield: Vec<usize> = (2..8).collect();
        let key = red.partial_trace(&shield).unwrap();
        let closed = XState::<f64>::family_closed_form(3, 2).unwrap();
        for (idx, want) in closed.probabilities().into_iter().enumerate() {
            assert!((key.get(idx, idx).re - want).abs() < 1e-12, "idx {idx}");
        }
    }

    #[test]
    fn pair_reduction_is_symmetric_under_swap() {
        let p = params23();
        let rho = p.density_matrix().unwrap();
        let r12 = pair_reduction(&rho, &p, 1, 2).unwrap();
        let r21 = pair_reduction(&rho, &p, 2, 1).unwrap();
        let mut perm: Vec<usize> = (0..r12.dims().len()).collect();
        perm.swap(0, 1);
        let swapped = r12.permute_subsystems(&perm).unwrap();
        assert!(swapped.max_abs_diff(&r21) < 1e-14);
    }

    #[test]
    fn pair_reduction_rejects_bad_pairs() {
        let p = params23();
        let rho = p.density_matrix().unwrap();
        assert!(pair_reduction(&rho, &p, 2, 2).is_err());
        assert!(pair_reduction(&rho, &p, 0, 1).is_err());
        assert!(pair_reduction(&rho, &p, 1, 4).is_err());
    }

    #[test]
    fn squeeze_matches_family_closed_form() {
        let p = params23();
        let rho = p.density_matrix().unwrap();
        let red = pair_reduction(&rho, &p, 1, 2).unwrap();
        let tw = Twisting::from_operator_svd(&p.shield_ring().unwrap());
        let squeezed = privacy_squeeze(&red, &tw).unwrap();
        let want = XState::<f64>::family_closed_form(3, 2)
            .unwrap()
            .to_density();
        assert!(squeezed.max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn squeeze_preserves_key_diagonal() {
        // twisting is key-diagonal: measurement statistics in the key
        // basis match the untwisted marginal
        let p = params23();
        let rho = p.density_matrix().unwrap();
        let red = pair_reduction(&rho, &p, 1, 3).unwrap();
        let tw = Twisting::from_operator_svd(&p.shield_ring().unwrap());
        let squeezed = privacy_squeeze(&red, &tw).unwrap();
        let shield: Vec<usize> = (2..8).collect();
        let marginal = red.partial_trace(&shield).unwrap();
        for idx in 0..4 {
            assert!((squeezed.get(idx, idx) - marginal.get(idx, idx)).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_twisting_returns_key_marginal() {
        let key = MultipartiteOperator::<f64>::from_diagonal(
            vec![2, 2],
            &[
                cplx(0.1, 0.0),
                cplx(0.2, 0.0),
                cplx(0.3, 0.0),
                cplx(0.4, 0.0),
            ],
        )
        .unwrap();
        let shield = MultipartiteOperator::<f64>::from_fn(vec![3], |r, c| {
            cplx(((r + c) as f64) / 10.0, 0.0) / 3.0
        });
        let product = key.tensor(&shield);
        let tw = Twisting::identity(3);
        let squeezed = privacy_squeeze(&product, &tw).unwrap();
        let want = key.scaled(shield.trace());
        assert!(squeezed.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn degenerate_svd_choices_leave_the_squeezed_state_unchanged() {
        use rand::{Rng, SeedableRng};
        // all singular values of the ring coincide, so w q, v q is an
        // equally valid decomposition for any unitary q
        let p = params23();
        let rho = p.density_matrix().unwrap();
        let red = pair_reduction(&rho, &p, 1, 2).unwrap();
        let x = p.shield_ring().unwrap();
        let (w, _, v) = x.svd_factors();

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let side = x.side();
        let g: Array2<Complex<f64>> = Array2::from_shape_fn((side, side), |_| {
            cplx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = &g + &linalg::adjoint(&g);
        let (_, q) = linalg::hermitian_eigen(&h).unwrap(); // unitary eigenbasis

        let w_alt = w.entries().dot(&q);
        let v_alt = v.entries().dot(&q);
        let eye = linalg::eye::<f64>(side);
        let tw_alt = Twisting::from_blocks(
            [
                eye.clone(),
                linalg::adjoint(&w_alt),
                linalg::adjoint(&v_alt),
                eye,
            ],
            TOL,
        )
        .unwrap();
        let s_ref = privacy_squeeze(&red, &Twisting::from_operator_svd(&x)).unwrap();
        let s_alt = privacy_squeeze(&red, &tw_alt).unwrap();
        assert!(s_ref.max_abs_diff(&s_alt) < 1e-10);
    }

    #[test]
    fn closed_form_values() {
        let x = XState::<f64>::family_closed_form(3, 2).unwrap();
        assert_eq!((x.a, x.b, x.c, x.d, x.norm), (13.0, 10.0, 2.0, 3.0, 36.0));
        for d in [2usize, 5, 17, 120] {
            let x = XState::<f64>::family_closed_form(3, d).unwrap();
            assert!((x.norm - 6.0 * (d as f64 + 4.0)).abs() < 1e-9);
        }
        // the 00 weight dominates for large shield dimension
        for n in [3usize, 4, 5] {
            let x = XState::<f64>::family_closed_form(n, 1_000_000_000).unwrap();
            let want = (n as f64 - 2.0) / n as f64;
            assert!((x.a / x.norm - want).abs() < 1e-6, "n={n}");
        }
    }

    #[test]
    fn xstate_validation() {
        assert!(XState::<f64>::new(1.0, 1.0, 2.0, 1.0, 4.0).is_err()); // c > b
        assert!(XState::<f64>::new(1.0, 1.0, 0.5, 1.0, 5.0).is_err()); // norm mismatch
        assert!(XState::<f64>::new(-1.0, 2.0, 0.5, 1.0, 4.0).is_err());
        let x = XState::<f64>::new(1.0, 1.0, 0.5, 1.0, 4.0).unwrap();
        let rho = x.to_density();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        let back = XState::from_density(&rho, TOL).unwrap();
        assert!((back.a - 0.25).abs() < 1e-15 && (back.c - 0.125).abs() < 1e-15);
        let spectrum = rho.hermitian_spectrum(TOL).unwrap();
        assert!(spectrum.min() >= -1e-15);
    }
}
