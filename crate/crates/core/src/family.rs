//! The N-partite state family, its building blocks and the PPT check.
//!
//! Layout convention used everywhere: subsystems are ordered as the N key
//! qubits (one per party, party `i` at slot `i-1`) followed by the 2N
//! shield factors in coupled pairs. Shield pair `j` (1-based, coupling
//! parties `j` and `j+1` cyclically) occupies slots `N + 2(j-1)` and
//! `N + 2(j-1) + 1`; the first factor belongs to party `j`, the second to
//! party `j+1`. Party `k` therefore holds its key qubit, the first factor
//! of pair `k` and the second factor of pair `k-1`.

use crate::error::{Error, Result};
use crate::operator::MultipartiteOperator;
use crate::scalar::{count, re_c, Scalar};
use ndarray::Array2;
use num_complex::Complex;

/// Default refusal threshold for dense construction.
pub const DEFAULT_MAX_SIDE: usize = 8192;

/// A validated D x D matrix that is both Hermitian and unitary.
#[derive(Clone, Debug)]
pub struct HermitianUnitary<T: Scalar> {
    matrix: Array2<Complex<T>>,
}

impl<T: Scalar> HermitianUnitary<T> {
    /// Validates Hermiticity and unitarity within `tol` (absolute on
    /// entries of `U U^dagger - I` and `U - U^dagger`).
    pub fn from_matrix(matrix: Array2<Complex<T>>, tol: T) -> Result<Self> {
        let d = matrix.nrows();
        if d == 0 || matrix.ncols() != d {
            return Err(Error::InvalidParameter(format!(
                "unitary must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut herm_residual = T::zero();
        for r in 0..d {
            for c in r..d {
                herm_residual = herm_residual.max((matrix[[r, c]] - matrix[[c, r]].conj()).norm());
            }
        }
        if herm_residual > tol {
            return Err(Error::NotHermitian {
                residual: herm_residual.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        let gram = crate::linalg::adjoint(&matrix).dot(&matrix);
        let mut unitary_residual = T::zero();
        for r in 0..d {
            for c in 0..d {
                let want = if r == c { T::one() } else { T::zero() };
                unitary_residual = unitary_residual.max((gram[[r, c]] - re_c(want)).norm());
            }
        }
        if unitary_residual > tol {
            return Err(Error::NotUnitary {
                residual: unitary_residual.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(HermitianUnitary { matrix })
    }

    /// `H^(tensor k)`: the built-in generator, covering D = 2^k. Every
    /// entry has magnitude `1/sqrt(D)`.
    pub fn hadamard_power(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "hadamard power needs k >= 1".into(),
            ));
        }
        let s = T::one() / (T::one() + T::one()).sqrt();
        let h: Array2<Complex<T>> =
            Array2::from_shape_fn(
                (2, 2),
                |(r, c)| {
                    if r == 1 && c == 1 {
                        re_c(-s)
                    } else {
                        re_c(s)
                    }
                },
            );
        let mut m = h.clone();
        for _ in 1..k {
            m = ndarray::linalg::kron(&m, &h);
        }
        Ok(HermitianUnitary { matrix: m })
    }

    /// Built-in unitary for a given shield dimension; only powers of two
    /// are covered.
    pub fn builtin(d: usize) -> Result<Self> {
        if d < 2 || !d.is_power_of_two() {
            return Err(Error::NoBuiltinUnitary { d });
        }
        Self::hadamard_power(d.trailing_zeros())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex<T>> {
        &self.matrix
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex<T> {
        self.matrix[[r, c]]
    }

    /// Sum of the magnitudes of all entries.
    pub fn abs_entry_sum(&self) -> T {
        self.matrix.iter().map(|z| z.norm()).sum()
    }
}

/// Basis vectors and projectors of the N-qubit key space with zero, one
/// or two excitations. Party indices are 1-based.
#[derive(Clone, Debug)]
pub struct KeyProjectors {
    n: usize,
}

impl KeyProjectors {
    pub fn new(n: usize) -> Self {
        KeyProjectors { n }
    }

    pub fn key_dims(&self) -> Vec<usize> {
        vec![2; self.n]
    }

    fn excitation_index(&self, party: usize) -> usize {
        debug_assert!((1..=self.n).contains(&party));
        1 << (self.n - party)
    }

    pub fn vacuum_index(&self) -> usize {
        0
    }

    pub fn single_index(&self, i: usize) -> usize {
        self.excitation_index(i)
    }

    pub fn double_index(&self, i: usize, j: usize) -> usize {
        self.excitation_index(i) | self.excitation_index(j)
    }

    /// `|a><b|` on the key space, for flat basis indices.
    pub fn basis_outer<T: Scalar>(&self, a: usize, b: usize) -> MultipartiteOperator<T> {
        let mut op = MultipartiteOperator::zeros(self.key_dims());
        op.entries_mut()[[a, b]] = re_c(T::one());
        op
    }

    pub fn vacuum_projector<T: Scalar>(&self) -> MultipartiteOperator<T> {
        self.basis_outer(0, 0)
    }

    pub fn single_projector<T: Scalar>(&self, i: usize) -> MultipartiteOperator<T> {
        let idx = self.single_index(i);
        self.basis_outer(idx, idx)
    }

    pub fn pair_projector<T: Scalar>(&self, i: usize, j: usize) -> MultipartiteOperator<T> {
        let idx = self.double_index(i, j);
        self.basis_outer(idx, idx)
    }

    /// `|psi_i><psi_j|` between single-excitation states.
    pub fn single_transfer<T: Scalar>(&self, i: usize, j: usize) -> MultipartiteOperator<T> {
        self.basis_outer(self.single_index(i), self.single_index(j))
    }
}

/// Parameters selecting one member of the family.
#[derive(Clone, Debug)]
pub struct StateFamilyParams<T: Scalar> {
    n_parties: usize,
    unitary: HermitianUnitary<T>,
    max_side: usize,
}

impl<T: Scalar> StateFamilyParams<T> {
    pub fn new(n_parties: usize, unitary: HermitianUnitary<T>) -> Result<Self> {
        if n_parties < 3 {
            return Err(Error::InvalidParameter(format!(
                "the family needs at least 3 parties, got {n_parties}"
            )));
        }
        Ok(StateFamilyParams {
            n_parties,
            unitary,
            max_side: DEFAULT_MAX_SIDE,
        })
    }

    /// Family member with the built-in unitary for shield dimension `d`.
    pub fn with_builtin_unitary(n_parties: usize, d: usize) -> Result<Self> {
        Self::new(n_parties, HermitianUnitary::builtin(d)?)
    }

    pub fn with_max_side(mut self, max_side: usize) -> Self {
        self.max_side = max_side;
        self
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn shield_dim(&self) -> usize {
        self.unitary.dim()
    }

    pub fn unitary(&self) -> &HermitianUnitary<T> {
        &self.unitary
    }

    pub fn key_projectors(&self) -> KeyProjectors {
        KeyProjectors::new(self.n_parties)
    }

    pub fn key_dims(&self) -> Vec<usize> {
        vec![2; self.n_parties]
    }

    pub fn shield_dims(&self) -> Vec<usize> {
        vec![self.unitary.dim(); 2 * self.n_parties]
    }

    pub fn full_dims(&self) -> Vec<usize> {
        let mut dims = self.key_dims();
        dims.extend(self.shield_dims());
        dims
    }

    pub fn full_side(&self) -> usize {
        (1 << self.n_parties) * self.unitary.dim().pow(2 * self.n_parties as u32)
    }

    fn check_size(&self) -> Result<()> {
        let side = self.full_side();
        if side > self.max_side {
            return Err(Error::SizeLimit {
                side,
                limit: self.max_side,
            });
        }
        Ok(())
    }

    /// Sum of entry magnitudes of the unitary; `D sqrt(D)` for the
    /// built-in generator.
    pub fn unitary_abs_sum(&self) -> T {
        self.unitary.abs_entry_sum()
    }

    /// Global slot indices (0-based) held by party `k` (1-based): its key
    /// qubit plus the two shield factors it owns.
    pub fn party_slots(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.n_parties;
        if !(1..=n).contains(&k) {
            return Err(Error::InvalidParameter(format!(
                "party index {k} out of 1..={n}"
            )));
        }
        let own_pair_first = n + 2 * (k - 1);
        let prev_pair = (k + n - 2) % n; // 0-based index of pair k-1
        let prev_pair_second = n + 2 * prev_pair + 1;
        Ok(vec![k - 1, prev_pair_second, own_pair_first])
    }

    /// Pair-coupling matrix `sum_ij u_ij |ii><jj|` on one shield pair.
    pub fn pair_coupling(&self) -> MultipartiteOperator<T> {
        let d = self.unitary.dim();
        let mut op = MultipartiteOperator::zeros(vec![d, d]);
        for i in 0..d {
            for j in 0..d {
                op.entries_mut()[[i * d + i, j * d + j]] = self.unitary.entry(i, j);
            }
        }
        op
    }

    /// `sum_i |ii><ii|`, the operator absolute value of the pair coupling.
    pub fn aligned_projector(d: usize) -> MultipartiteOperator<T> {
        let mut op = MultipartiteOperator::zeros(vec![d, d]);
        for i in 0..d {
            op.entries_mut()[[i * d + i, i * d + i]] = re_c(T::one());
        }
        op
    }

    /// Diagonal absolute value of the second-factor transposed coupling:
    /// `sum_ij |u_ij| |ji><ji|`.
    pub fn transposed_coupling_abs(&self) -> MultipartiteOperator<T> {
        let d = self.unitary.dim();
        let mut op = MultipartiteOperator::zeros(vec![d, d]);
        for i in 0..d {
            for j in 0..d {
                let idx = j * d + i;
                op.entries_mut()[[idx, idx]] = re_c(self.unitary.entry(i, j).norm());
            }
        }
        op
    }

    /// The ring of second-factor transposed couplings over the whole
    /// shield: one factor per pair, dims `[D; 2N]`.
    pub fn shield_ring(&self) -> Result<MultipartiteOperator<T>> {
        let z = self.pair_coupling();
        let factor = z.partial_transpose(&[1])?;
        let mut ring = factor.clone();
        for _ in 1..self.n_parties {
            ring = ring.tensor(&factor);
        }
        Ok(ring)
    }

    /// Closed-form operator absolute value of the ring: the tensor power
    /// of the diagonal coupling magnitudes.
    pub fn shield_ring_abs(&self) -> MultipartiteOperator<T> {
        let zeta = self.transposed_coupling_abs();
        let mut out = zeta.clone();
        for _ in 1..self.n_parties {
            out = out.tensor(&zeta);
        }
        out
    }

    /// Shield-local slot indices transposed by party `k`'s cut, relative
    /// to an operator over the shield only (such as the ring).
    pub fn party_shield_local_slots(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.n_parties;
        if !(1..=n).contains(&k) {
            return Err(Error::InvalidParameter(format!(
                "party index {k} out of 1..={n}"
            )));
        }
        let own_pair_first = 2 * (k - 1);
        let prev_pair_second = 2 * ((k + n - 2) % n) + 1;
        Ok(vec![prev_pair_second, own_pair_first])
    }

    /// `|ring^(Gamma_k)|` in closed form: aligned projectors on the two
    /// pairs touching party `k`, coupling magnitudes elsewhere.
    pub fn transposed_ring_abs(&self, k: usize) -> Result<MultipartiteOperator<T>> {
        let n = self.n_parties;
        if !(1..=n).contains(&k) {
            return Err(Error::InvalidParameter(format!(
                "party index {k} out of 1..={n}"
            )));
        }
        let d = self.unitary.dim();
        let zeta = self.transposed_coupling_abs();
        let aligned = Self::aligned_projector(d);
        let prev_pair = (k + n - 2) % n + 1; // 1-based pair label k-1
        let mut out: Option<MultipartiteOperator<T>> = None;
        for pair in 1..=n {
            let factor = if pair == k || pair == prev_pair {
                &aligned
            } else {
                &zeta
            };
            out = Some(match out {
                None => factor.clone(),
                Some(acc) => acc.tensor(factor),
            });
        }
        Ok(out.expect("n >= 3"))
    }

    /// PSD envelope dominating every single-party transpose of the ring:
    /// the sum of their absolute values. Diagonal by construction.
    pub fn shield_envelope(&self) -> Result<MultipartiteOperator<T>> {
        let mut acc = MultipartiteOperator::zeros(self.shield_dims());
        for k in 1..=self.n_parties {
            let term = self.transposed_ring_abs(k)?;
            acc.add_scaled(&term, re_c(T::one()))?;
        }
        Ok(acc)
    }

    /// Normalization factor of the family state.
    pub fn normalization(&self) -> T {
        let n = count::<T>(self.n_parties);
        let d = count::<T>(self.unitary.dim());
        let u = self.unitary_abs_sum();
        let u_pow = u.powi(self.n_parties as i32 - 2);
        let two = T::one() + T::one();
        let three = two + T::one();
        let poly = three * n * n - three * n - two;
        n * u_pow * ((n - T::one()) * u * u + d * d / two * poly)
    }

    /// The normalized family state on key plus shield.
    pub fn density_matrix(&self) -> Result<MultipartiteOperator<T>> {
        self.check_size()?;
        let n = self.n_parties;
        let key = self.key_projectors();
        let ring = self.shield_ring()?;
        let ring_abs = self.shield_ring_abs();
        let envelope = self.shield_envelope()?;
        let one = re_c(T::one());

        let mut rho = MultipartiteOperator::zeros(self.full_dims());
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    rho.accumulate_kron(&key.single_transfer(i, j), &ring, one)?;
                }
            }
        }
        rho.accumulate_kron(&key.vacuum_projector(), &envelope, re_c(count::<T>(n - 1)))?;
        for i in 1..=n {
            for j in i + 1..=n {
                rho.accumulate_kron(&key.pair_projector(i, j), &envelope, one)?;
            }
        }
        let single_shield = ring_abs
            .scaled(re_c(count::<T>(n - 1)))
            .add(&envelope.scaled(re_c(count::<T>(n - 2))))?;
        for i in 1..=n {
            rho.accumulate_kron(&key.single_projector(i), &single_shield, one)?;
        }
        rho.scale(re_c(T::one() / self.normalization()));
        Ok(rho)
    }

    /// Term-by-term assembly of the party-`k` partial transpose of the
    /// state, written directly in its manifestly grouped form. Equals the
    /// generic partial transpose of [`Self::density_matrix`]; the
    /// agreement of the two routes is the module's strongest oracle.
    pub fn transposed_density_direct(&self, k: usize) -> Result<MultipartiteOperator<T>> {
        self.check_size()?;
        let n = self.n_parties;
        if !(1..=n).contains(&k) {
            return Err(Error::InvalidParameter(format!(
                "party index {k} out of 1..={n}"
            )));
        }
        let key = self.key_projectors();
        let ring = self.shield_ring()?;
        let ring_gk = ring.partial_transpose(&self.party_shield_local_slots(k)?)?;
        let ring_abs = self.shield_ring_abs();
        let envelope = self.shield_envelope()?;
        let one = re_c(T::one());
        let vac = key.vacuum_index();

        let mut rho = MultipartiteOperator::zeros(self.full_dims());
        for i in 1..=n {
            if i == k {
                continue;
            }
            let dbl = key.double_index(i, k);
            rho.accumulate_kron(&key.basis_outer(vac, dbl), &ring_gk, one)?;
            rho.accumulate_kron(&key.basis_outer(dbl, vac), &ring_gk, one)?;
            rho.accumulate_kron(&key.pair_projector(i, k), &envelope, one)?;
            rho.accumulate_kron(&key.single_projector(i), &envelope, re_c(count::<T>(n - 2)))?;
            // the diagonal ring-abs part of every single-excitation term is
            // invariant under the transpose and stays in full
            rho.accumulate_kron(&key.single_projector(i), &ring_abs, re_c(count::<T>(n - 1)))?;
        }
        rho.accumulate_kron(&key.vacuum_projector(), &envelope, re_c(count::<T>(n - 1)))?;
        for i in 1..=n {
            for j in 1..=n {
                if i != j && i != k && j != k {
                    rho.accumulate_kron(&key.single_transfer(i, j), &ring_gk, one)?;
                }
            }
        }
        let own_shield = ring_abs
            .scaled(re_c(count::<T>(n - 1)))
            .add(&envelope.scaled(re_c(count::<T>(n - 2))))?;
        rho.accumulate_kron(&key.single_projector(k), &own_shield, one)?;
        for i in 1..=n {
            for j in i + 1..=n {
                if i != k && j != k {
                    rho.accumulate_kron(&key.pair_projector(i, j), &envelope, one)?;
                }
            }
        }
        rho.scale(re_c(T::one() / self.normalization()));
        Ok(rho)
    }

    /// Partial transpose of `rho` over party `k`'s subsystems followed by
    /// an eigenvalue check against `-tol`.
    pub fn ppt_check_party(
        &self,
        rho: &MultipartiteOperator<T>,
        k: usize,
        tol: T,
    ) -> Result<PptReport<T>> {
        if rho.dims() != self.full_dims().as_slice() {
            return Err(Error::DimensionMismatch {
                left: rho.dims().to_vec(),
                right: self.full_dims(),
            });
        }
        ppt_check(rho, &self.party_slots(k)?, tol)
    }
}

/// Outcome of a positivity check of a partial transpose.
#[derive(Clone, Copy, Debug)]
pub struct PptReport<T: Scalar> {
    pub min_eigenvalue: T,
    pub is_ppt: bool,
}

/// Transposes the listed subsystems and reports the minimum eigenvalue
/// against `-tol`.
pub fn ppt_check<T: Scalar>(
    op: &MultipartiteOperator<T>,
    subsystems: &[usize],
    tol: T,
) -> Result<PptReport<T>> {
    let transposed = op.partial_transpose(subsystems)?;
    let spectrum = transposed.hermitian_spectrum(T::default_tol())?;
    let min_eigenvalue = spectrum.min();
    Ok(PptReport {
        min_eigenvalue,
        is_ppt: min_eigenvalue >= -tol,
    })
}

/// Amplitudes of the N-qubit state with a uniform single excitation.
pub fn w_state_amplitudes<T: Scalar>(n: usize) -> Result<Vec<Complex<T>>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "the single-excitation state needs at least 2 qubits, got {n}"
        )));
    }
    let amp = T::one() / count::<T>(n).sqrt();
    let mut v = vec![Complex::new(T::zero(), T::zero()); 1 << n];
    for i in 0..n {
        v[1 << (n - 1 - i)] = re_c(amp);
    }
    Ok(v)
}

/// Projector onto the uniform single-excitation state, dims `[2; n]`.
pub fn w_state_projector<T: Scalar>(n: usize) -> Result<MultipartiteOperator<T>> {
    let amps = w_state_amplitudes::<T>(n)?;
    MultipartiteOperator::projector(vec![2; n], &amps)
}
