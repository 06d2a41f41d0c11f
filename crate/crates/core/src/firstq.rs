//! First-quantized propagation over `M^N` position tuples.
//!
//! Amplitudes are stored row-major with particle 0 varying slowest:
//! `index = Σ_i x_i · M^(N−1−i)`. Tuples with repeated sites are stored
//! explicitly and carry zero amplitude in antisymmetric states.
//!
//! Evolution alternates a diagonal position-space phase (potential plus pair
//! interaction, computed per tuple) with a kinetic step that rotates each
//! particle leg into the kinetic eigenbasis, applies the eigenphases and
//! rotates back. Antisymmetry is only ever imposed on the initial state; the
//! propagator preserves it because every term is permutation invariant.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bridge::plucker_overlap;
use crate::fixedpoint::{inv_distance, quantize, PhaseBits};
use crate::lattice::{MomentumTransform, PairForm, PairInteraction, PotentialField};
use crate::linalg::{factorial, inner, norm};
use crate::{CMatrix, Error, Result, Splitting};

/// Largest first-quantized amplitude vector the crate will allocate.
pub const MAX_AMPLITUDES: usize = 1 << 24;

pub(crate) fn tensor_dimension(sites: usize, particles: usize) -> Result<usize> {
    let dim = u32::try_from(particles)
        .ok()
        .and_then(|n| sites.checked_pow(n))
        .filter(|&d| d <= MAX_AMPLITUDES);
    dim.ok_or(Error::SizeGuard {
        what: "first-quantized state",
        dimension: (sites as u128).saturating_pow(particles.min(u32::MAX as usize) as u32),
        limit: MAX_AMPLITUDES as u128,
    })
}

/// Decodes a flat index into its position tuple.
pub(crate) fn decode_tuple(mut index: usize, sites: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = index % sites;
        index /= sites;
    }
}

pub(crate) fn encode_tuple(tuple: &[usize], sites: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * sites + x)
}

/// Sorts `tuple` in place and returns the permutation sign, or `None` if an
/// entry repeats.
pub(crate) fn sort_with_sign(tuple: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..tuple.len() {
        let mut j = i;
        while j > 0 && tuple[j - 1] > tuple[j] {
            tuple.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && tuple[j - 1] == tuple[j] {
            return None;
        }
    }
    Some(sign)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstQuantState {
    particles: usize,
    sites: usize,
    amplitudes: Vec<Complex64>,
}

impl FirstQuantState {
    pub fn from_amplitudes(particles: usize, sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = tensor_dimension(sites, particles)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            particles,
            sites,
            amplitudes,
        })
    }

    pub fn zeros(particles: usize, sites: usize) -> Result<Self> {
        let dim = tensor_dimension(sites, particles)?;
        Ok(Self {
            particles,
            sites,
            amplitudes: vec![Complex64::new(0.0, 0.0); dim],
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, tuple: &[usize]) -> Complex64 {
        self.amplitudes[encode_tuple(tuple, self.sites)]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::DegenerateInput("cannot normalize the zero state".into()));
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: other.amplitudes.len(),
            });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Largest `|Ψ(…x_j…x_i…) + Ψ(…x_i…x_j…)|` over all tuples and leg pairs.
    pub fn antisymmetry_violation(&self) -> f64 {
        let n = self.particles;
        let mut tuple = vec![0; n];
        let mut worst = 0.0f64;
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            decode_tuple(idx, self.sites, &mut tuple);
            for i in 0..n {
                for j in i + 1..n {
                    tuple.swap(i, j);
                    let swapped = self.amplitudes[encode_tuple(&tuple, self.sites)];
                    tuple.swap(i, j);
                    worst = worst.max((swapped + amp).norm());
                }
            }
        }
        worst
    }

    /// Expected occupation `⟨n_p⟩` of every site.
    pub fn occupations(&self) -> Vec<f64> {
        let mut occ = vec![0.0; self.sites];
        let mut tuple = vec![0; self.particles];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let w = amp.norm_sqr();
            if w == 0.0 {
                continue;
            }
            decode_tuple(idx, self.sites, &mut tuple);
            for &x in &tuple {
                occ[x] += w;
            }
        }
        occ
    }
}

fn check_orbitals(orbitals: &[usize], sites: usize) -> Result<()> {
    if orbitals.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotAscending);
    }
    if let Some(&bad) = orbitals.iter().find(|&&j| j >= sites) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: sites,
        });
    }
    Ok(())
}

/// Slater determinant built from rows `orbitals` of the single-particle
/// transform `c` (row `j` is orbital `j` as a function of position).
///
/// `Ψ(B) = det C[orbitals, B] / √N!`.
pub fn slater_state(c: &CMatrix, orbitals: &[usize]) -> Result<FirstQuantState> {
    if c.nrows() != c.ncols() {
        return Err(Error::DimensionMismatch {
            expected: c.nrows(),
            found: c.ncols(),
        });
    }
    let sites = c.ncols();
    check_orbitals(orbitals, sites)?;
    let n = orbitals.len();
    let mut state = FirstQuantState::zeros(n, sites)?;
    let scale = 1.0 / factorial(n).sqrt();
    let mut tuple = vec![0; n];
    for (idx, amp) in state.amplitudes.iter_mut().enumerate() {
        decode_tuple(idx, sites, &mut tuple);
        let mut sorted = tuple.clone();
        if sort_with_sign(&mut sorted).is_none() {
            continue;
        }
        *amp = plucker_overlap(c, orbitals, &tuple)? * scale;
    }
    state.normalize().map_err(|_| Error::DegenerateInput("orbitals are linearly dependent".into()))?;
    Ok(state)
}

/// Normalized projection of `raw` onto the antisymmetric subspace,
/// `(1/N!) Σ_π sgn(π) P_π raw`.
pub fn antisymmetrize(raw: &[Complex64], particles: usize, sites: usize) -> Result<FirstQuantState> {
    let dim = tensor_dimension(sites, particles)?;
    if raw.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: raw.len(),
        });
    }
    // signed sum over each orbit, keyed by the orbit's ascending representative
    let mut orbit_sum = vec![Complex64::new(0.0, 0.0); dim];
    let mut tuple = vec![0; particles];
    for (idx, amp) in raw.iter().enumerate() {
        decode_tuple(idx, sites, &mut tuple);
        if let Some(sign) = sort_with_sign(&mut tuple) {
            orbit_sum[encode_tuple(&tuple, sites)] += amp * sign;
        }
    }
    let inv_nfact = 1.0 / factorial(particles);
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (idx, slot) in out.iter_mut().enumerate() {
        decode_tuple(idx, sites, &mut tuple);
        if let Some(sign) = sort_with_sign(&mut tuple) {
            *slot = orbit_sum[encode_tuple(&tuple, sites)] * (sign * inv_nfact);
        }
    }
    let projected = norm(&out);
    if projected <= 1e-14 * norm(raw).max(f64::MIN_POSITIVE) || projected == 0.0 {
        return Err(Error::DegenerateInput(
            "input has no component in the antisymmetric subspace".into(),
        ));
    }
    let mut state = FirstQuantState {
        particles,
        sites,
        amplitudes: out,
    };
    state.normalize()?;
    Ok(state)
}

fn signed_quantize(x: f64, bits: u32) -> Result<f64> {
    Ok(x.signum() * quantize(x.abs(), bits)?.value())
}

/// Per-pair interaction energy as seen by the phase arithmetic.
fn pair_table(pair: &PairInteraction, phase_bits: Option<PhaseBits>) -> Result<Vec<f64>> {
    let m = pair.sites();
    let mut table = vec![0.0; m * m];
    for p in 0..m {
        for q in 0..m {
            if p == q {
                continue;
            }
            table[p * m + q] = match (phase_bits, pair.form()) {
                (None, _) => pair.values()[(p, q)],
                (Some(pb), PairForm::Coulomb { strength, lattice }) => {
                    strength * inv_distance(&lattice, p, q, pb.bits, pb.path)?.value()
                }
                (Some(pb), PairForm::Tabulated) => signed_quantize(pair.values()[(p, q)], pb.bits)?,
            };
        }
    }
    Ok(table)
}

/// Multiplies every tuple amplitude by `exp(−i·dt·[Σ_i V(x_i) + Σ_{i<j} W(x_i, x_j)])`.
///
/// With `phase_bits` set, each `1/d` entering a Coulomb pair energy comes from
/// the fixed-point inverse-distance routine (tabulated pair values are
/// quantized directly).
pub fn apply_diagonal_phase(
    state: &mut FirstQuantState,
    potential: &PotentialField,
    pair: &PairInteraction,
    dt: f64,
    phase_bits: Option<PhaseBits>,
) -> Result<()> {
    let m = state.sites;
    for found in [potential.sites(), pair.sites()] {
        if found != m {
            return Err(Error::DimensionMismatch { expected: m, found });
        }
    }
    let table = pair_table(pair, phase_bits)?;
    let v = potential.values();
    let n = state.particles;
    state.amplitudes.par_iter_mut().enumerate().for_each_init(
        || vec![0usize; n],
        |tuple, (idx, amp)| {
            decode_tuple(idx, m, tuple);
            let mut energy = 0.0;
            for (i, &xi) in tuple.iter().enumerate() {
                energy += v[xi];
                for &xj in &tuple[i + 1..] {
                    energy += table[xi * m + xj];
                }
            }
            *amp *= Complex64::cis(-dt * energy);
        },
    );
    Ok(())
}

/// Applies the single-particle matrix `u` to tensor leg `leg`.
fn apply_leg(amplitudes: &mut [Complex64], sites: usize, particles: usize, leg: usize, u: &CMatrix) {
    let stride = sites.pow((particles - 1 - leg) as u32);
    let block = stride * sites;
    amplitudes.par_chunks_mut(block).for_each(|chunk| {
        let mut column = vec![Complex64::new(0.0, 0.0); sites];
        for inner_offset in 0..stride {
            for (x, slot) in column.iter_mut().enumerate() {
                *slot = chunk[inner_offset + x * stride];
            }
            for k in 0..sites {
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, val) in column.iter().enumerate() {
                    acc += u[(k, x)] * val;
                }
                chunk[inner_offset + k * stride] = acc;
            }
        }
    });
}

fn apply_leg_phases(amplitudes: &mut [Complex64], sites: usize, particles: usize, leg: usize, phases: &[Complex64]) {
    let stride = sites.pow((particles - 1 - leg) as u32);
    amplitudes
        .par_iter_mut()
        .enumerate()
        .for_each(|(idx, amp)| *amp *= phases[(idx / stride) % sites]);
}

/// `exp(−i·dt·Σ_i T^(i))`: for every particle leg, rotate into the kinetic
/// eigenbasis with `C†`, apply `exp(−i·dt·ε_k)`, and rotate back with `C`.
pub fn apply_kinetic_step(state: &mut FirstQuantState, transform: &MomentumTransform, dt: f64) -> Result<()> {
    if transform.sites() != state.sites {
        return Err(Error::DimensionMismatch {
            expected: state.sites,
            found: transform.sites(),
        });
    }
    let to_momentum = transform.matrix().adjoint();
    let phases: Vec<Complex64> = transform
        .eigenvalues()
        .iter()
        .map(|&e| Complex64::cis(-dt * e))
        .collect();
    for leg in 0..state.particles {
        apply_leg(&mut state.amplitudes, state.sites, state.particles, leg, &to_momentum);
        apply_leg_phases(&mut state.amplitudes, state.sites, state.particles, leg, &phases);
        apply_leg(&mut state.amplitudes, state.sites, state.particles, leg, transform.matrix());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A1Plan {
    dt: f64,
    steps: usize,
    splitting: Splitting,
    phase_bits: Option<PhaseBits>,
}

impl A1Plan {
    pub fn new(dt: f64, steps: usize, splitting: Splitting, phase_bits: Option<PhaseBits>) -> Result<Self> {
        if dt == 0.0 || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step must be finite and nonzero, got {dt}")));
        }
        if steps == 0 {
            return Err(Error::InvalidArgument("need at least one step".into()));
        }
        Ok(Self {
            dt,
            steps,
            splitting,
            phase_bits,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn splitting(&self) -> Splitting {
        self.splitting
    }

    pub fn phase_bits(&self) -> Option<PhaseBits> {
        self.phase_bits
    }
}

/// Trotterized evolution under `(V + W)` and `T`.
///
/// Lie-Trotter applies the diagonal phase then the kinetic step; Strang
/// sandwiches a full kinetic step between two half-step diagonal phases.
pub fn evolve_a1(
    state: &mut FirstQuantState,
    plan: &A1Plan,
    potential: &PotentialField,
    pair: &PairInteraction,
    transform: &MomentumTransform,
) -> Result<()> {
    let dt = plan.dt;
    for _ in 0..plan.steps {
        match plan.splitting {
            Splitting::LieTrotter1 => {
                apply_diagonal_phase(state, potential, pair, dt, plan.phase_bits)?;
                apply_kinetic_step(state, transform, dt)?;
            }
            Splitting::Strang2 => {
                apply_diagonal_phase(state, potential, pair, dt / 2.0, plan.phase_bits)?;
                apply_kinetic_step(state, transform, dt)?;
                apply_diagonal_phase(state, potential, pair, dt / 2.0, plan.phase_bits)?;
            }
        }
    }
    Ok(())
}

/// Qubits for `N` registers of `⌈log2 M⌉` bits each.
pub fn qubit_cost_a1(sites: usize, particles: usize) -> usize {
    let bits_per_register = if sites <= 1 {
        0
    } else {
        (usize::BITS - (sites - 1).leading_zeros()) as usize
    };
    particles * bits_per_register
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{dft_matrix, KineticMatrix, LatticeSpec};
    use crate::oracle;
    use crate::random;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn tuple_codec_is_row_major() {
        assert_eq!(encode_tuple(&[1, 2], 4), 6);
        let mut t = [0; 3];
        decode_tuple(encode_tuple(&[3, 0, 2], 4), 4, &mut t);
        assert_eq!(t, [3, 0, 2]);
    }

    #[test]
    fn sort_sign() {
        let mut t = [2, 0, 1];
        assert_eq!(sort_with_sign(&mut t), Some(1.0));
        assert_eq!(t, [0, 1, 2]);
        let mut t = [1, 0];
        assert_eq!(sort_with_sign(&mut t), Some(-1.0));
        let mut t = [1, 0, 1];
        assert_eq!(sort_with_sign(&mut t), None);
    }

    #[test]
    fn slater_identity_two_sites() {
        let s = slater_state(&CMatrix::identity(2, 2), &[0, 1]).unwrap();
        assert!((s.amplitude(&[0, 1]) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.amplitude(&[1, 0]) - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert_eq!(s.amplitude(&[0, 0]), c(0.0, 0.0));
        assert_eq!(s.amplitude(&[1, 1]), c(0.0, 0.0));
    }

    #[test]
    fn slater_single_particle_is_row() {
        let u = random::unitary(5, &mut random::rng(3, 0));
        let s = slater_state(&u, &[2]).unwrap();
        for b in 0..5 {
            assert!((s.amplitude(&[b]) - u[(2, b)]).norm() < 1e-14);
        }
    }

    #[test]
    fn slater_matches_permutation_sum() {
        let dft = dft_matrix(4);
        let s = slater_state(&dft, &[0, 1]).unwrap();
        let mut tuple = [0; 2];
        for idx in 0..16 {
            decode_tuple(idx, 4, &mut tuple);
            let expected = oracle::brute_force_antisym_overlap(&dft, &[0, 1], &tuple).unwrap() / 2f64.sqrt();
            assert!((s.amplitudes()[idx] - expected).norm() < 1e-14);
        }
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!(s.antisymmetry_violation() < 1e-12);
    }

    #[test]
    fn slater_rejects_unsorted() {
        assert_eq!(slater_state(&CMatrix::identity(3, 3), &[1, 0]), Err(Error::NotAscending));
        assert_eq!(slater_state(&CMatrix::identity(3, 3), &[1, 1]), Err(Error::NotAscending));
        assert!(slater_state(&CMatrix::identity(3, 3), &[1, 3]).is_err());
    }

    #[test]
    fn antisymmetrize_examples() {
        let mut raw = vec![c(0.0, 0.0); 4];
        raw[encode_tuple(&[0, 1], 2)] = c(1.0, 0.0);
        let s = antisymmetrize(&raw, 2, 2).unwrap();
        assert!((s.amplitude(&[0, 1]) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.amplitude(&[1, 0]) + c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);

        let mut doubly = vec![c(0.0, 0.0); 4];
        doubly[encode_tuple(&[0, 0], 2)] = c(1.0, 0.0);
        assert!(matches!(antisymmetrize(&doubly, 2, 2), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn antisymmetrize_is_idempotent_projector() {
        let mut rng = random::rng(11, 0);
        let raw = random::state(64, &mut rng);
        let once = antisymmetrize(&raw, 3, 4).unwrap();
        assert!(once.antisymmetry_violation() < 1e-12);
        let twice = antisymmetrize(once.amplitudes(), 3, 4).unwrap();
        assert!(max_diff(once.amplitudes(), twice.amplitudes()) < 1e-12);
    }

    #[test]
    fn two_electron_pair_phase_on_ring() {
        let ring = LatticeSpec::ring(8).unwrap();
        let w = PairInteraction::coulomb(&ring, 1.0).unwrap();
        let v = PotentialField::zero(8);
        let xi = 0.7;
        let mut amps = vec![c(0.0, 0.0); 64];
        amps[encode_tuple(&[2, 5], 8)] = c(1.0, 0.0);
        let mut s = FirstQuantState::from_amplitudes(2, 8, amps).unwrap();
        apply_diagonal_phase(&mut s, &v, &w, xi, None).unwrap();
        let got = s.amplitude(&[2, 5]);
        assert!((got - Complex64::cis(-xi / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_interactions_leave_state() {
        let mut rng = random::rng(5, 0);
        let raw = random::state(16, &mut rng);
        let mut s = FirstQuantState::from_amplitudes(2, 4, raw.clone()).unwrap();
        apply_diagonal_phase(&mut s, &PotentialField::zero(4), &PairInteraction::zero(4), 0.3, None).unwrap();
        assert_eq!(s.amplitudes(), raw.as_slice());
    }

    #[test]
    fn single_particle_potential_matches_dense_exponential() {
        let v = PotentialField::new(vec![0.3, -1.2, 0.8, 2.0]).unwrap();
        let mut rng = random::rng(9, 0);
        let psi = random::state(4, &mut rng);
        let mut s = FirstQuantState::from_amplitudes(1, 4, psi.clone()).unwrap();
        apply_diagonal_phase(&mut s, &v, &PairInteraction::zero(4), 0.9, None).unwrap();
        let h = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            4,
            v.values().iter().map(|&x| c(x, 0.0)),
        ));
        let u = oracle::dense_expm(&h, 0.9).unwrap();
        let expected = &u * nalgebra::DVector::from_vec(psi);
        assert!(max_diff(s.amplitudes(), expected.as_slice()) < 1e-12);
    }

    fn kinetic_fixture(m: usize) -> (KineticMatrix, MomentumTransform) {
        let spec = LatticeSpec::ring(m).unwrap();
        let t = KineticMatrix::ring(&spec, 1.0).unwrap();
        let c = MomentumTransform::new(&t).unwrap();
        (t, c)
    }

    #[test]
    fn kinetic_step_zero_time_is_identity() {
        let (_, tr) = kinetic_fixture(4);
        let raw = random::state(16, &mut random::rng(1, 0));
        let mut s = FirstQuantState::from_amplitudes(2, 4, raw.clone()).unwrap();
        apply_kinetic_step(&mut s, &tr, 0.0).unwrap();
        assert!(max_diff(s.amplitudes(), &raw) < 1e-14);
    }

    #[test]
    fn kinetic_step_matches_dense_oracle() {
        let (t, tr) = kinetic_fixture(4);
        let raw = random::state(4, &mut random::rng(2, 0));
        let mut s = FirstQuantState::from_amplitudes(1, 4, raw.clone()).unwrap();
        apply_kinetic_step(&mut s, &tr, 0.37).unwrap();
        let u = oracle::dense_expm(t.entries(), 0.37).unwrap();
        let expected = &u * nalgebra::DVector::from_vec(raw);
        assert!(max_diff(s.amplitudes(), expected.as_slice()) < 1e-10);

        let raw2 = random::state(16, &mut random::rng(3, 0));
        let mut s2 = FirstQuantState::from_amplitudes(2, 4, raw2.clone()).unwrap();
        apply_kinetic_step(&mut s2, &tr, 0.37).unwrap();
        let h2 = oracle::first_quant_hamiltonian_dense(
            4,
            2,
            t.entries(),
            &[0.0; 4],
            &nalgebra::DMatrix::zeros(4, 4),
        )
        .unwrap();
        let expected2 = oracle::dense_expm(&h2, 0.37).unwrap() * nalgebra::DVector::from_vec(raw2);
        assert!(max_diff(s2.amplitudes(), expected2.as_slice()) < 1e-10);
    }

    #[test]
    fn kinetic_step_with_numerical_eigenbasis() {
        let t = KineticMatrix::from_complex(random::hermitian(3, &mut random::rng(4, 0))).unwrap();
        let tr = MomentumTransform::new(&t).unwrap();
        let raw = random::state(27, &mut random::rng(4, 1));
        let mut s = FirstQuantState::from_amplitudes(3, 3, raw.clone()).unwrap();
        apply_kinetic_step(&mut s, &tr, 0.8).unwrap();
        let h = oracle::first_quant_hamiltonian_dense(3, 3, t.entries(), &[0.0; 3], &nalgebra::DMatrix::zeros(3, 3))
            .unwrap();
        let expected = oracle::dense_expm(&h, 0.8).unwrap() * nalgebra::DVector::from_vec(raw);
        assert!(max_diff(s.amplitudes(), expected.as_slice()) < 1e-10);
    }

    #[test]
    fn evolve_identity_and_commuting_cases() {
        let (_, tr) = kinetic_fixture(4);
        let start = slater_state(&CMatrix::identity(4, 4), &[0, 1]).unwrap();
        let v = PotentialField::zero(4);
        let w = PairInteraction::zero(4);

        assert!(A1Plan::new(0.0, 1, Splitting::Strang2, None).is_err());
        assert!(A1Plan::new(0.1, 0, Splitting::Strang2, None).is_err());

        let plan = A1Plan::new(0.25, 8, Splitting::LieTrotter1, None).unwrap();
        let mut trotter = start.clone();
        evolve_a1(&mut trotter, &plan, &v, &w, &tr).unwrap();
        let mut exact = start.clone();
        apply_kinetic_step(&mut exact, &tr, 2.0).unwrap();
        assert!(max_diff(trotter.amplitudes(), exact.amplitudes()) < 1e-12);
    }

    #[test]
    fn evolution_preserves_norm_and_antisymmetry() {
        let ring = LatticeSpec::ring(5).unwrap();
        let t = KineticMatrix::ring(&ring, 1.0).unwrap();
        let tr = MomentumTransform::new(&t).unwrap();
        let v = PotentialField::new(vec![0.1, -0.4, 0.7, 0.0, 0.3]).unwrap();
        let w = PairInteraction::coulomb(&ring, 1.3).unwrap();
        let mut s = slater_state(&random::unitary(5, &mut random::rng(8, 0)), &[0, 2, 3]).unwrap();
        for splitting in [Splitting::LieTrotter1, Splitting::Strang2] {
            let plan = A1Plan::new(0.1, 10, splitting, Some(PhaseBits::new(8))).unwrap();
            evolve_a1(&mut s, &plan, &v, &w, &tr).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
            assert!(s.antisymmetry_violation() < 1e-10);
        }
    }

    #[test]
    fn qubit_costs() {
        assert_eq!(qubit_cost_a1(8, 2), 6);
        assert_eq!(qubit_cost_a1(2, 1), 1);
        assert_eq!(qubit_cost_a1(6, 3), 9);
        assert_eq!(qubit_cost_a1(9, 1), 4);
    }

    #[test]
    fn size_guard() {
        assert!(matches!(FirstQuantState::zeros(9, 8), Err(Error::SizeGuard { .. })));
    }
}
