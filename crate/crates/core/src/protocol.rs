//! Key-distillation procedures and parameter sweeps.
//!
//! Two routes produce a two-qubit state ready for the one-way rate bound:
//! local filtering of the privacy-squeezed pair reduction, and an M-round
//! randomized procedure in which every party measures a two-outcome POVM
//! on its key qubit each round and the surviving pair is decided by the
//! outcomes. Both come with closed forms in the parameters; the exact
//! branch-by-branch recursion over the dense state is kept alongside as
//! the oracle for the closed forms.

use crate::error::{Error, Result};
use crate::family::StateFamilyParams;
use crate::operator::MultipartiteOperator;
use crate::rates::{dw_rate, CcqState};
use crate::scalar::{count, re_c, Scalar};
use crate::squeeze::XState;
use rayon::prelude::*;

/// One evaluated parameter point: success probability, mutual
/// informations of the conditioned state, and the probability-weighted
/// rate `q (I(A:B) - I(A:E))`.
#[derive(Clone, Copy, Debug)]
pub struct SweepRecord<T: Scalar> {
    pub q: T,
    pub i_ab: T,
    pub i_ae: T,
    pub rate: T,
}

impl<T: Scalar> SweepRecord<T> {
    /// Rate with negative values replaced by zero, the display convention
    /// for sweep surfaces.
    pub fn rate_clamped(&self) -> T {
        self.rate.max(T::zero())
    }
}

fn check_epsilon<T: Scalar>(epsilon: T) -> Result<()> {
    if epsilon < T::zero() || epsilon > T::one() {
        return Err(Error::InvalidParameter(format!(
            "filter parameter must lie in [0, 1], got {epsilon}"
        )));
    }
    Ok(())
}

/// Both parties apply the local filter `diag[eps, 1]` to their key
/// qubits of an X-state. Returns the renormalized output and the success
/// probability.
pub fn filter_xstate<T: Scalar>(x: &XState<T>, epsilon: T) -> Result<(XState<T>, T)> {
    check_epsilon(epsilon)?;
    let e2 = epsilon * epsilon;
    let a = x.a * e2 * e2;
    let b = x.b * e2;
    let c = x.c * e2;
    let d = x.d;
    let new_norm = a + b + b + d;
    if new_norm <= T::zero() {
        return Err(Error::InvalidParameter(
            "filter annihilated the state".into(),
        ));
    }
    let q = new_norm / x.norm;
    Ok((XState::new(a, b, c, d, new_norm)?, q))
}

/// Filtered-state rate of the family member `(n_parties, d)` at filter
/// strength `epsilon`, entirely in closed form.
pub fn filter_rate<T: Scalar>(n_parties: usize, d: u64, epsilon: T) -> Result<SweepRecord<T>> {
    let x = XState::family_closed_form(n_parties, d as usize)?;
    let (filtered, q) = filter_xstate(&x, epsilon)?;
    let rec = dw_rate(&CcqState::from_xstate(&filtered), T::default_tol())?;
    Ok(SweepRecord {
        q,
        i_ab: rec.i_ab,
        i_ae: rec.i_ae,
        rate: q * rec.rate,
    })
}

/// The two-outcome POVM `{diag[sqrt(1-eps^2), 1], diag[eps, 0]}`,
/// represented by the diagonals of its operators.
#[derive(Clone, Copy, Debug)]
pub struct PovmPair<T: Scalar> {
    /// Keeps the state in play; outcome that continues the protocol.
    pub keep: [T; 2],
    /// Extracts the party from the protocol; nonzero only on `|0>`.
    pub extract: [T; 2],
}

pub fn povm_pair<T: Scalar>(epsilon: T) -> Result<PovmPair<T>> {
    check_epsilon(epsilon)?;
    Ok(PovmPair {
        keep: [(T::one() - epsilon * epsilon).sqrt(), T::one()],
        extract: [epsilon, T::zero()],
    })
}

impl<T: Scalar> PovmPair<T> {
    /// Largest deviation of `V^dagger V + W^dagger W` from the identity.
    pub fn completeness_residual(&self) -> T {
        let mut res = T::zero();
        for i in 0..2 {
            let sum = self.keep[i] * self.keep[i] + self.extract[i] * self.extract[i];
            res = res.max((sum - T::one()).abs());
        }
        res
    }
}

/// The per-round filter strengths `1/sqrt(1+i)` for `i = m..1`, in the
/// order they are applied (weakest first).
pub fn epsilon_schedule<T: Scalar>(m_rounds: u64) -> Result<Vec<T>> {
    if m_rounds == 0 {
        return Err(Error::InvalidParameter(
            "the randomized protocol needs at least one round".into(),
        ));
    }
    Ok((1..=m_rounds)
        .rev()
        .map(|i| T::one() / (T::one() + count::<T>(i as usize)).sqrt())
        .collect())
}

/// Probability that a fixed pair survives the M-round randomized
/// protocol, in closed form.
pub fn random_success_prob<T: Scalar>(d: u64, m_rounds: u64) -> T {
    let dd = count::<T>(d as usize);
    let m = count::<T>(m_rounds as usize);
    let one = T::one();
    let two = one + one;
    let four = two + two;
    let six = four + two;
    let seven = six + one;
    let numer = two * m * m * (dd + four) + m * (two * dd + seven);
    numer / (six * (dd + four) * (m + one) * (m + one))
}

/// Privacy-squeezed two-qubit output of the randomized protocol, in
/// closed form.
pub fn random_xstate<T: Scalar>(d: u64, m_rounds: u64) -> Result<XState<T>> {
    if m_rounds == 0 {
        return Err(Error::InvalidParameter(
            "the randomized protocol needs at least one round".into(),
        ));
    }
    let dd = count::<T>(d as usize);
    let m = count::<T>(m_rounds as usize);
    let one = T::one();
    let two = one + one;
    let four = two + two;
    let six = four + two;
    let seven = six + one;
    let a = two * (two * m + one) / (m + one);
    let b = two * dd + two + one;
    let c = dd;
    let dentry = six;
    let norm = two * (two * m * (dd + four) + two * dd + seven) / (m + one);
    XState::new(a, b, c, dentry, norm)
}

/// Probability-weighted rate of the randomized protocol at `(d, m)`.
pub fn random_rate<T: Scalar>(d: u64, m_rounds: u64) -> Result<SweepRecord<T>> {
    let x = random_xstate(d, m_rounds)?;
    let q = random_success_prob(d, m_rounds);
    let rec = dw_rate(&CcqState::from_xstate(&x), T::default_tol())?;
    Ok(SweepRecord {
        q,
        i_ab: rec.i_ab,
        i_ae: rec.i_ae,
        rate: q * rec.rate,
    })
}

fn key_digit(dims: &[usize], idx: usize, slot: usize) -> usize {
    let stride: usize = dims[slot + 1..].iter().product();
    (idx / stride) % dims[slot]
}

fn check_pair(pair: (usize, usize)) -> Result<usize> {
    let (k, l) = pair;
    if k == l || !(1..=3).contains(&k) || !(1..=3).contains(&l) {
        return Err(Error::InvalidParameter(format!(
            "success pair must be two distinct parties from 1..=3, got ({k}, {l})"
        )));
    }
    Ok(6 - k - l)
}

/// Exact branch sum of the M-round protocol on the dense three-party
/// state: continue-outcomes for rounds `1..m-1` followed by a success at
/// round `m`, summed over `m`. Returns the normalized surviving state
/// (key part still three qubits) and its total probability.
///
/// Every POVM operator is diagonal on the key and extended by the
/// identity on the shield, so branches are plain diagonal reweightings.
pub fn random_branch_state<T: Scalar>(
    params: &StateFamilyParams<T>,
    m_rounds: u64,
    success_pair: (usize, usize),
) -> Result<(MultipartiteOperator<T>, T)> {
    if params.n_parties() != 3 {
        return Err(Error::InvalidParameter(
            "the randomized protocol is defined for 3 parties".into(),
        ));
    }
    let excluded = check_pair(success_pair)?;
    let schedule = epsilon_schedule::<T>(m_rounds)?;
    let rho = params.density_matrix()?;
    let dims = rho.dims().to_vec();
    let side = rho.side();

    let mut cumulative = vec![T::one(); side];
    let mut branch_sum = MultipartiteOperator::zeros(dims.clone());
    for &eps in &schedule {
        let povm = povm_pair(eps)?;
        let mut branch = vec![T::zero(); side];
        for (idx, weight) in branch.iter_mut().enumerate() {
            let mut w = cumulative[idx];
            for party in 1..=3usize {
                let digit = key_digit(&dims, idx, party - 1);
                w *= if party == excluded {
                    povm.extract[digit]
                } else {
                    povm.keep[digit]
                };
            }
            *weight = w;
        }
        {
            let acc = branch_sum.entries_mut();
            let src = rho.entries();
            for r in 0..side {
                if branch[r] == T::zero() {
                    continue;
                }
                for c in 0..side {
                    acc[[r, c]] += src[[r, c]] * re_c(branch[r] * branch[c]);
                }
            }
        }
        for (idx, w) in cumulative.iter_mut().enumerate() {
            for party in 0..3 {
                *w *= povm.keep[key_digit(&dims, idx, party)];
            }
        }
    }
    let prob = branch_sum.trace().re;
    branch_sum.scale(re_c(T::one() / prob));
    Ok((branch_sum, prob))
}

/// Probability bookkeeping of one full run: all-continue survival,
/// per-pair success masses, and the failure mass, which add up to one.
#[derive(Clone, Copy, Debug)]
pub struct OutcomeSummary<T: Scalar> {
    pub continue_prob: T,
    /// Success masses for pairs (1,2), (1,3), (2,3).
    pub success_probs: [T; 3],
    pub failure_prob: T,
}

impl<T: Scalar> OutcomeSummary<T> {
    pub fn total(&self) -> T {
        self.continue_prob + self.failure_prob + self.success_probs.iter().cloned().sum()
    }
}

/// Exact outcome accounting of the M-round protocol on the dense state.
pub fn random_outcome_summary<T: Scalar>(
    params: &StateFamilyParams<T>,
    m_rounds: u64,
) -> Result<OutcomeSummary<T>> {
    if params.n_parties() != 3 {
        return Err(Error::InvalidParameter(
            "the randomized protocol is defined for 3 parties".into(),
        ));
    }
    let schedule = epsilon_schedule::<T>(m_rounds)?;
    let rho = params.density_matrix()?;
    let dims = rho.dims().to_vec();
    let side = rho.side();
    let diag: Vec<T> = (0..side).map(|i| rho.get(i, i).re).collect();

    let mut cumulative = vec![T::one(); side];
    let mut success = [T::zero(); 3];
    let mut failure = T::zero();
    for &eps in &schedule {
        let povm = povm_pair(eps)?;
        // all 8 outcome patterns this round; bit set = that party measured
        // the extract outcome
        for pattern in 0u8..8 {
            if pattern == 0 {
                continue; // continue-branch handled via `cumulative`
            }
            let mut mass = T::zero();
            for idx in 0..side {
                let mut w = cumulative[idx];
                for party in 0..3usize {
                    let digit = key_digit(&dims, idx, party);
                    let extract = pattern & (1 << party) != 0;
                    w *= if extract {
                        povm.extract[digit]
                    } else {
                        povm.keep[digit]
                    };
                }
                mass += w * w * diag[idx];
            }
            match pattern {
                0b100 => success[0] += mass, // extract on party 3
                0b010 => success[1] += mass, // extract on party 2
                0b001 => success[2] += mass, // extract on party 1
                _ => failure += mass,
            }
        }
        for (idx, w) in cumulative.iter_mut().enumerate() {
            for party in 0..3 {
                *w *= povm.keep[key_digit(&dims, idx, party)];
            }
        }
    }
    let continue_prob = (0..side)
        .map(|idx| cumulative[idx] * cumulative[idx] * diag[idx])
        .sum();
    Ok(OutcomeSummary {
        continue_prob,
        success_probs: success,
        failure_prob: failure,
    })
}

/// One row of a filtering sweep.
#[derive(Clone, Copy, Debug)]
pub struct FilterSweepPoint<T: Scalar> {
    pub n_parties: usize,
    pub d: u64,
    pub epsilon: T,
    pub record: SweepRecord<T>,
}

/// One row of a randomized-protocol sweep.
#[derive(Clone, Copy, Debug)]
pub struct RandomSweepPoint<T: Scalar> {
    pub d: u64,
    pub m_rounds: u64,
    pub record: SweepRecord<T>,
}

/// Evaluates the filter rate over the Cartesian grid, rows ordered by
/// `d` then `epsilon` regardless of execution order.
pub fn sweep_filter<T: Scalar>(
    n_parties: usize,
    d_grid: &[u64],
    eps_grid: &[T],
) -> Result<Vec<FilterSweepPoint<T>>> {
    let points: Vec<(u64, T)> = d_grid
        .iter()
        .flat_map(|&d| eps_grid.iter().map(move |&e| (d, e)))
        .collect();
    points
        .into_par_iter()
        .map(|(d, epsilon)| {
            Ok(FilterSweepPoint {
                n_parties,
                d,
                epsilon,
                record: filter_rate(n_parties, d, epsilon)?,
            })
        })
        .collect()
}

/// Evaluates the randomized-protocol rate over the Cartesian grid, rows
/// ordered by `d` then `m`.
pub fn sweep_random<T: Scalar>(d_grid: &[u64], m_grid: &[u64]) -> Result<Vec<RandomSweepPoint<T>>> {
    let points: Vec<(u64, u64)> = d_grid
        .iter()
        .flat_map(|&d| m_grid.iter().map(move |&m| (d, m)))
        .collect();
    points
        .into_par_iter()
        .map(|(d, m_rounds)| {
            Ok(RandomSweepPoint {
                d,
                m_rounds,
                record: random_rate(d, m_rounds)?,
            })
        })
        .collect()
}

/// Which protocol a threshold scan evaluates.
#[derive(Clone, Debug)]
pub enum ThresholdMode<T: Scalar> {
    Filter { n_parties: usize, eps_grid: Vec<T> },
    Random { m_rounds: u64 },
}

/// First `d` in the scan (in the given order) with a strictly positive
/// rate; for the filter mode, positive for some grid `epsilon`.
pub fn find_threshold_d<T: Scalar>(mode: &ThresholdMode<T>, d_grid: &[u64]) -> Result<Option<u64>> {
    let positive = |d: u64| -> Result<bool> {
        match mode {
            ThresholdMode::Filter {
                n_parties,
                eps_grid,
            } => {
                for &eps in eps_grid {
                    if filter_rate::<T>(*n_parties, d, eps)?.rate > T::zero() {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            ThresholdMode::Random { m_rounds } => {
                Ok(random_rate::<T>(d, *m_rounds)?.rate > T::zero())
            }
        }
    };
    let flags: Result<Vec<bool>> = d_grid.par_iter().map(|&d| positive(d)).collect();
    Ok(flags?
        .into_iter()
        .zip(d_grid.iter())
        .find(|(hit, _)| *hit)
        .map(|(_, &d)| d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squeeze::{pair_reduction, privacy_squeeze, Twisting};

    const TOL: f64 = 1e-10;

    #[test]
    fn unit_filter_is_identity() {
        let x = XState::<f64>::family_closed_form(3, 2).unwrap();
        let (filtered, q) = filter_xstate(&x, 1.0).unwrap();
        assert_eq!(filtered, x);
        assert!((q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn filter_success_probability_half_strength() {
        // (13/16 + 2*10/4 + 3)/36 = 141/576
        let x = XState::<f64>::family_closed_form(3, 2).unwrap();
        let (_, q) = filter_xstate(&x, 0.5).unwrap();
        assert!((q - 141.0 / 576.0).abs() < 1e-15);
    }

    #[test]
    fn filter_rate_matches_frozen_pipeline_values() {
        // frozen from an independent numpy implementation of the chain
        let rec = filter_rate::<f64>(3, 2, 0.5).unwrap();
        assert!((rec.q - 0.244_791_666_666_666_66).abs() < 1e-12);
        assert!((rec.i_ab - 0.032_591_287_842_589_8).abs() < 1e-9);
        assert!((rec.i_ae - 0.938_602_990_870_011_5).abs() < 1e-9);
        assert!((rec.rate - (-0.221_784_114_803_587_6)).abs() < 1e-9);
        assert_eq!(rec.rate_clamped(), 0.0);

        let rec = filter_rate::<f64>(3, 2500, 0.2).unwrap();
        assert!((rec.rate - 2.559_620_548_267e-4).abs() < 1e-9);

        // other party counts, same independent source
        let rec = filter_rate::<f64>(5, 200_000, 0.04).unwrap();
        assert!((rec.q - 6.427_867_501_803e-4).abs() < 1e-12);
        assert!((rec.rate - 3.300_856_386_942e-6).abs() < 1e-12);
        let rec = filter_rate::<f64>(4, 50, 0.30).unwrap();
        assert!((rec.i_ab - 0.316_824_492_720_265_9).abs() < 1e-9);
        assert!((rec.i_ae - 0.944_760_726_112_144_5).abs() < 1e-9);
        assert!((rec.rate - (-0.034_375_936_685_859_7)).abs() < 1e-9);
    }

    #[test]
    fn zero_filter_concentrates_on_the_double_excitation() {
        let x = XState::<f64>::family_closed_form(3, 2).unwrap();
        let (filtered, q) = filter_xstate(&x, 0.0).unwrap();
        assert!((q - 3.0 / 36.0).abs() < 1e-15);
        let p = filtered.probabilities();
        assert_eq!(p, [0.0, 0.0, 0.0, 1.0]);
        let rec = filter_rate::<f64>(3, 2, 0.0).unwrap();
        assert!(rec.rate.abs() < 1e-12);
    }

    #[test]
    fn filters_compose_multiplicatively() {
        let x = XState::<f64>::family_closed_form(3, 7).unwrap();
        for (e1, e2) in [(0.3, 0.9), (0.5, 0.5), (1.0, 0.2), (0.7, 0.0)] {
            let (once, q1) = filter_xstate(&x, e1).unwrap();
            let (twice, q2) = filter_xstate(&once, e2).unwrap();
            let (direct, q) = filter_xstate(&x, e1 * e2).unwrap();
            assert!(twice.to_density().max_abs_diff(&direct.to_density()) < 1e-12);
            assert!((q1 * q2 - q).abs() < 1e-12);
        }
    }

    #[test]
    fn filter_rejects_out_of_range_strength() {
        let x = XState::<f64>::family_closed_form(3, 2).unwrap();
        assert!(filter_xstate(&x, -0.1).is_err());
        assert!(filter_xstate(&x, 1.1).is_err());
    }

    #[test]
    fn povm_forms_and_completeness() {
        let p0 = povm_pair::<f64>(0.0).unwrap();
        assert_eq!(p0.keep, [1.0, 1.0]);
        assert_eq!(p0.extract, [0.0, 0.0]);
        let p1 = povm_pair::<f64>(1.0).unwrap();
        assert_eq!(p1.keep[0], 0.0);
        assert_eq!(p1.keep[1], 1.0);
        for step in 0..=100 {
            let eps = step as f64 / 100.0;
            let p = povm_pair::<f64>(eps).unwrap();
            assert!(p.completeness_residual() < 1e-12, "eps={eps}");
        }
        let p = povm_pair::<f64>(1.0 / 3.0f64.sqrt()).unwrap();
        assert!(p.completeness_residual() < 1e-15);
    }

    #[test]
    fn schedule_is_reversed_and_increasing() {
        let s1 = epsilon_schedule::<f64>(1).unwrap();
        assert_eq!(s1.len(), 1);
        assert!((s1[0] - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
        let s3 = epsilon_schedule::<f64>(3).unwrap();
        assert!((s3[0] - 0.5).abs() < 1e-15);
        assert!((s3[1] - 1.0 / 3.0f64.sqrt()).abs() < 1e-15);
        assert!((s3[2] - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
        for w in s3.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(epsilon_schedule::<f64>(0).is_err());
    }

    #[test]
    fn success_probability_closed_form() {
        assert!((random_success_prob::<f64>(2, 1) - 23.0 / 144.0).abs() < 1e-15);
        assert!((random_success_prob::<f64>(2, 2) - 35.0 / 162.0).abs() < 1e-15);
        assert!((random_success_prob::<f64>(2, 100_000) - 1.0 / 3.0).abs() < 1e-4);
        // D-independent limit of one third
        for d in [2u64, 50, 100_000] {
            assert!((random_success_prob::<f64>(d, 3_000_000) - 1.0 / 3.0).abs() < 1e-5);
        }
    }

    #[test]
    fn random_xstate_closed_form_values() {
        let x = random_xstate::<f64>(2, 1).unwrap();
        assert_eq!((x.a, x.b, x.c, x.d, x.norm), (3.0, 7.0, 2.0, 6.0, 23.0));
        // large-D limit: diag(0, 1/2, 1/2, 0) with coherence 1/4, any M
        for m in [1u64, 7, 1000] {
            let x = random_xstate::<f64>(1_000_000_000, m).unwrap();
            assert!(x.a / x.norm < 1e-8);
            assert!((x.b / x.norm - 0.5).abs() < 1e-8);
            assert!((x.c / x.norm - 0.25).abs() < 1e-8);
            assert!(x.d / x.norm < 1e-8);
        }
    }

    #[test]
    fn random_rate_signs_and_frozen_value() {
        let rec = random_rate::<f64>(100, 100).unwrap();
        assert!(rec.rate > 0.0);
        // frozen from the independent numpy implementation
        assert!((rec.rate - 5.255_140_318_872e-3).abs() < 1e-9);
        assert!(random_rate::<f64>(10, 100).unwrap().rate < 0.0);
        // asymptotics: q -> 1/3 against the limit-state rate
        let rec = random_rate::<f64>(100_000_000, 1_000_000).unwrap();
        assert!((rec.rate - 0.188_721_875_5 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn branch_recursion_reproduces_the_probability_formula() {
        let params = StateFamilyParams::<f64>::with_builtin_unitary(3, 2).unwrap();
        for m in 1..=3u64 {
            let (_, prob) = random_branch_state(&params, m, (1, 2)).unwrap();
            let want = random_success_prob::<f64>(2, m);
            assert!((prob - want).abs() < 1e-12, "m={m}: {prob} vs {want}");
        }
    }

    #[test]
    fn all_success_pairs_are_equivalent() {
        let params = StateFamilyParams::<f64>::with_builtin_unitary(3, 2).unwrap();
        let tw = Twisting::from_operator_svd(&params.shield_ring().unwrap());
        let want = random_xstate::<f64>(2, 1).unwrap().to_density();
        let mut probs = Vec::new();
        for &(k, l) in &[(1usize, 2usize), (1, 3), (2, 3)] {
            let (state, prob) = random_branch_state(&params, 1, (k, l)).unwrap();
            probs.push(prob);
            // drop the excluded party's key qubit, then squeeze
            let excluded = 6 - k - l;
            let reduced = state.partial_trace(&[excluded - 1]).unwrap();
            let squeezed = privacy_squeeze(&reduced, &tw).unwrap();
            assert!(
                squeezed.max_abs_diff(&want) < 1e-10,
                "pair ({k},{l}) diverges from the closed form"
            );
        }
        assert!((probs[0] - probs[1]).abs() < 1e-14);
        assert!((probs[0] - probs[2]).abs() < 1e-14);
    }

    #[test]
    fn branch_state_squeezes_to_the_closed_form_for_two_rounds() {
        let params = StateFamilyParams::<f64>::with_builtin_unitary(3, 2).unwrap();
        let tw = Twisting::from_operator_svd(&params.shield_ring().unwrap());
        for m in [1u64, 2] {
            let (state, _) = random_branch_state(&params, m, (1, 2)).unwrap();
            let reduced = state.partial_trace(&[2]).unwrap();
            let squeezed = privacy_squeeze(&reduced, &tw).unwrap();
            let want = random_xstate::<f64>(2, m).unwrap().to_density();
            assert!(squeezed.max_abs_diff(&want) < 1e-10, "m={m}");
        }
    }

    #[test]
    fn randomized_protocol_rejects_bad_setups() {
        let params = StateFamilyParams::<f64>::with_builtin_unitary(3, 2).unwrap();
        assert!(random_branch_state(&params, 0, (1, 2)).is_err());
        assert!(random_branch_state(&params, 1, (1, 1)).is_err());
        assert!(random_branch_state(&params, 1, (0, 2)).is_err());
        assert!(random_branch_state(&params, 1, (2, 4)).is_err());
        let four = StateFamilyParams::<f64>::with_builtin_unitary(4, 2).unwrap();
        assert!(random_branch_state(&four, 1, (1, 2)).is_err());
    }

    #[test]
    fn outcome_masses_sum_to_one() {
        let params = StateFamilyParams::<f64>::with_builtin_unitary(3, 2).unwrap();
        for m in 1..=3u64 {
            let summary = random_outcome_summary(&params, m).unwrap();
            assert!((summary.total() - 1.0).abs() < 1e-10, "m={m}");
            let want = random_success_prob::<f64>(2, m);
            for (i, p) in summary.success_probs.iter().enumerate() {
                assert!((p - want).abs() < 1e-12, "m={m} pair {i}");
            }
        }
    }

    #[test]
    fn filtering_commutes_with_squeezing() {
        // filtering the key qubits of the pair reduction and then
        // squeezing equals squeezing first and filtering the 4x4 state
        let params = StateFamilyParams::<f64>::with_builtin_unitary(3, 2).unwrap();
        let rho = params.density_matrix().unwrap();
        let red = pair_reduction(&rho, &params, 1, 2).unwrap();
        let tw = Twisting::from_operator_svd(&params.shield_ring().unwrap());
        let eps = 0.6f64;

        // route 1: diagonal filter on the two key qubits, then squeeze
        let dims = red.dims().to_vec();
        let side = red.side();
        let mut filtered = red.clone();
        {
            let entries = filtered.entries_mut();
            let weight = |idx: usize| -> f64 {
                let d0 = key_digit(&dims, idx, 0);
                let d1 = key_digit(&dims, idx, 1);
                let w = |digit: usize| if digit == 0 { eps } else { 1.0 };
                w(d0) * w(d1)
            };
            for r in 0..side {
                for c in 0..side {
                    entries[[r, c]] *= crate::scalar::cplx::<f64>(weight(r) * weight(c), 0.0);
                }
            }
        }
        let norm = filtered.trace().re;
        filtered.scale(crate::scalar::cplx(1.0 / norm, 0.0));
        let route1 = privacy_squeeze(&filtered, &tw).unwrap();

        // route 2: squeeze, then the closed-form filter
        let squeezed = privacy_squeeze(&red, &tw).unwrap();
        let x = XState::from_density(&squeezed, TOL).unwrap();
        let (xf, _) = filter_xstate(&x, eps).unwrap();
        let route2 = xf.to_density();

        assert!(route1.max_abs_diff(&route2) < 1e-10);
    }

    #[test]
    fn sweeps_preserve_grid_order() {
        let rows = sweep_random::<f64>(&[2, 10], &[1, 2, 3]).unwrap();
        let keys: Vec<(u64, u64)> = rows.iter().map(|r| (r.d, r.m_rounds)).collect();
        assert_eq!(
            keys,
            vec![(2, 1), (2, 2), (2, 3), (10, 1), (10, 2), (10, 3)]
        );
        let rows = sweep_filter::<f64>(3, &[2, 3], &[0.25, 0.75]).unwrap();
        let keys: Vec<(u64, String)> = rows
            .iter()
            .map(|r| (r.d, format!("{}", r.epsilon)))
            .collect();
        assert_eq!(keys[0], (2, "0.25".to_string()));
        assert_eq!(keys[3], (3, "0.75".to_string()));
    }

    #[test]
    fn threshold_search_results() {
        // no threshold at tiny shield dimensions for a single round
        let mode = ThresholdMode::<f64>::Random { m_rounds: 1 };
        let grid: Vec<u64> = (2..=10).collect();
        assert_eq!(find_threshold_d(&mode, &grid).unwrap(), None);
        // the hundred-round scan crosses between 80 and 100
        let mode = ThresholdMode::<f64>::Random { m_rounds: 100 };
        let grid: Vec<u64> = (80..=100).collect();
        assert_eq!(find_threshold_d(&mode, &grid).unwrap(), Some(90));
    }

    #[test]
    fn large_shield_filter_rate_is_positive() {
        let eps_grid: Vec<f64> = (1..=100).map(|k| k as f64 / 100.0).collect();
        let best = eps_grid
            .iter()
            .map(|&e| filter_rate::<f64>(3, 3000, e).unwrap().rate)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best > 0.0);
    }

    #[test]
    fn more_parties_lower_the_rate_surface() {
        // at a shield size where three parties already distill key, five
        // parties do not yet; their onset sits at larger dimensions
        let eps_grid: Vec<f64> = (1..=100).map(|k| k as f64 / 100.0).collect();
        let best = |n: usize, d: u64| -> f64 {
            eps_grid
                .iter()
                .map(|&e| filter_rate::<f64>(n, d, e).unwrap().rate)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let (three, five) = (best(3, 5000), best(5, 5000));
        assert!(three > 0.0 && five < 0.0);
        assert!(five < three);
    }
}
