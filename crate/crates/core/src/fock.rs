//! Second-quantized propagation on the Fock space of `M` modes.
//!
//! Basis states are occupation bitstrings: mode `p` is bit `p` of the index
//! and the vacuum is the all-zeros string. Ladder operators carry the
//! Jordan-Wigner sign `(−1)^(occupied modes below p)`.
//!
//! A Trotter step applies, in order, the diagonal one-body phases
//! `exp(−i dt h_pp n_p)`, the pair phases `exp(−i dt W_pq n_p n_q)`, and exact
//! two-mode hopping rotations `exp(−i dt (h_pq a†_p a_q + h.c.))` for
//! `p < q` in ascending lexicographic order. In online mode the potential
//! and pair phases are instead computed per bitstring from its occupied
//! positions, so no interaction table is consulted; only the kinetic matrix
//! is precomputed.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fixedpoint::{inv_distance, PhaseBits};
use crate::lattice::{KineticMatrix, LatticeSpec, PairForm, PairInteraction, PotentialField};
use crate::linalg::{inner, norm};
use crate::{CMatrix, Error, Result, Splitting};

/// Largest mode count for Fock-space vectors.
pub const MAX_MODES: usize = 24;

/// Largest dense operator dimension assembled by this module.
pub const DENSE_LIMIT: usize = crate::oracle::DENSE_LIMIT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Create,
    Annihilate,
}

/// Action of a single ladder operator on a basis bitstring: the image and its
/// sign, or `None` when the result vanishes.
pub fn ladder_on_bits(bits: u64, p: usize, kind: LadderKind) -> Option<(u64, i32)> {
    let mask = 1u64 << p;
    let occupied = bits & mask != 0;
    let below = (bits & (mask - 1)).count_ones();
    let sign = if below % 2 == 0 { 1 } else { -1 };
    match (kind, occupied) {
        (LadderKind::Create, false) => Some((bits | mask, sign)),
        (LadderKind::Annihilate, true) => Some((bits & !mask, sign)),
        _ => None,
    }
}

fn check_modes(modes: usize) -> Result<()> {
    if modes > MAX_MODES {
        return Err(Error::SizeGuard {
            what: "Fock space",
            dimension: 1u128 << modes.min(127),
            limit: 1u128 << MAX_MODES,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    amplitudes: Vec<Complex64>,
}

impl FockState {
    pub fn vacuum(modes: usize) -> Result<Self> {
        Self::basis(modes, 0)
    }

    pub fn basis(modes: usize, bits: u64) -> Result<Self> {
        check_modes(modes)?;
        let dim = 1usize << modes;
        if bits as usize >= dim {
            return Err(Error::IndexOutOfRange {
                index: bits as usize,
                len: dim,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[bits as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { modes, amplitudes })
    }

    pub fn from_amplitudes(modes: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_modes(modes)?;
        if amplitudes.len() != 1 << modes {
            return Err(Error::DimensionMismatch {
                expected: 1 << modes,
                found: amplitudes.len(),
            });
        }
        Ok(Self { modes, amplitudes })
    }

    /// Embeds a sector-coordinate vector into the full Fock space.
    pub fn from_sector(sector: &SectorBasis, coefficients: &[Complex64]) -> Result<Self> {
        if coefficients.len() != sector.len() {
            return Err(Error::DimensionMismatch {
                expected: sector.len(),
                found: coefficients.len(),
            });
        }
        let mut state = Self::from_amplitudes(sector.modes(), vec![Complex64::new(0.0, 0.0); 1 << sector.modes()])?;
        for (&bits, &a) in sector.bitstrings().iter().zip(coefficients) {
            state.amplitudes[bits as usize] = a;
        }
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, bits: u64) -> Complex64 {
        self.amplitudes[bits as usize]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// True when every amplitude is exactly zero, e.g. after annihilating an
    /// empty mode.
    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|a| *a == Complex64::new(0.0, 0.0))
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::DegenerateInput("cannot normalize the zero state".into()));
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(())
    }

    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.modes != other.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: other.modes,
            });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Coordinates in `sector`, ignoring any weight outside it.
    pub fn sector_amplitudes(&self, sector: &SectorBasis) -> Vec<Complex64> {
        sector.bitstrings().iter().map(|&b| self.amplitudes[b as usize]).collect()
    }

    /// Probability weight outside the `particles`-sector.
    pub fn weight_outside_sector(&self, particles: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(bits, _)| bits.count_ones() as usize != particles)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn occupations(&self) -> Vec<f64> {
        let mut occ = vec![0.0; self.modes];
        for (bits, a) in self.amplitudes.iter().enumerate() {
            let w = a.norm_sqr();
            for (p, slot) in occ.iter_mut().enumerate() {
                if bits >> p & 1 == 1 {
                    *slot += w;
                }
            }
        }
        occ
    }
}

/// Applies `a†_p` or `a_p`. The result is not renormalized and may be the
/// zero vector; check [`FockState::is_zero`].
pub fn apply_ladder(state: &FockState, p: usize, kind: LadderKind) -> Result<FockState> {
    if p >= state.modes {
        return Err(Error::IndexOutOfRange {
            index: p,
            len: state.modes,
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); state.amplitudes.len()];
    for (bits, &a) in state.amplitudes.iter().enumerate() {
        if let Some((image, sign)) = ladder_on_bits(bits as u64, p, kind) {
            out[image as usize] += a * sign as f64;
        }
    }
    Ok(FockState {
        modes: state.modes,
        amplitudes: out,
    })
}

/// Integer matrix of a ladder operator on the full `2^M` space.
pub fn ladder_matrix(modes: usize, p: usize, kind: LadderKind) -> Result<nalgebra::DMatrix<i32>> {
    let dim = dense_fock_dimension(modes)?;
    if p >= modes {
        return Err(Error::IndexOutOfRange { index: p, len: modes });
    }
    let mut m = nalgebra::DMatrix::<i32>::zeros(dim, dim);
    for col in 0..dim {
        if let Some((row, sign)) = ladder_on_bits(col as u64, p, kind) {
            m[(row as usize, col)] = sign;
        }
    }
    Ok(m)
}

fn dense_fock_dimension(modes: usize) -> Result<usize> {
    if modes >= 63 || (1usize << modes) > DENSE_LIMIT {
        return Err(Error::SizeGuard {
            what: "dense Fock operator",
            dimension: 1u128 << modes.min(127),
            limit: DENSE_LIMIT as u128,
        });
    }
    Ok(1 << modes)
}

/// The fixed-particle-number subspace: all `C(M, N)` bitstrings with `N` set
/// bits, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    modes: usize,
    particles: usize,
    bitstrings: Vec<u64>,
}

impl SectorBasis {
    pub fn new(modes: usize, particles: usize) -> Result<Self> {
        check_modes(modes)?;
        if particles > modes {
            return Err(Error::InvalidArgument(format!(
                "particle count {particles} exceeds mode count {modes}"
            )));
        }
        let mut bitstrings = Vec::new();
        if particles == 0 {
            bitstrings.push(0);
        } else {
            // Gosper's hack: next larger integer with the same popcount
            let limit = 1u64 << modes;
            let mut s = (1u64 << particles) - 1;
            while s < limit {
                bitstrings.push(s);
                let lowest = s & s.wrapping_neg();
                let ripple = s + lowest;
                s = (((ripple ^ s) >> 2) / lowest) | ripple;
            }
        }
        Ok(Self {
            modes,
            particles,
            bitstrings,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn bitstrings(&self) -> &[u64] {
        &self.bitstrings
    }

    pub fn len(&self) -> usize {
        self.bitstrings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bitstrings.is_empty()
    }

    pub fn index_of(&self, bits: u64) -> Option<usize> {
        self.bitstrings.binary_search(&bits).ok()
    }
}

/// `H = Σ h_pq a†_p a_q + Σ_{p<q} W_pq n_p n_q` with `h = T + diag(V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondQuantHamiltonian {
    kinetic: KineticMatrix,
    potential: PotentialField,
    pair: PairInteraction,
}

impl SecondQuantHamiltonian {
    pub fn new(kinetic: KineticMatrix, potential: PotentialField, pair: PairInteraction) -> Result<Self> {
        let m = kinetic.sites();
        for found in [potential.sites(), pair.sites()] {
            if found != m {
                return Err(Error::DimensionMismatch { expected: m, found });
            }
        }
        Ok(Self {
            kinetic,
            potential,
            pair,
        })
    }

    pub fn modes(&self) -> usize {
        self.kinetic.sites()
    }

    pub fn kinetic(&self) -> &KineticMatrix {
        &self.kinetic
    }

    pub fn potential(&self) -> &PotentialField {
        &self.potential
    }

    pub fn pair(&self) -> &PairInteraction {
        &self.pair
    }

    pub fn one_body(&self) -> CMatrix {
        let mut h = self.kinetic.entries().clone();
        for (p, v) in self.potential.values().iter().enumerate() {
            h[(p, p)] += Complex64::new(*v, 0.0);
        }
        h
    }
}

/// Dense matrix of `h` on the full Fock space, or on `sector` when given.
pub fn build_hamiltonian_matrix(h: &SecondQuantHamiltonian, sector: Option<&SectorBasis>) -> Result<CMatrix> {
    let m = h.modes();
    let full;
    let basis: &[u64] = match sector {
        Some(s) => {
            if s.modes() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: s.modes(),
                });
            }
            if s.len() > DENSE_LIMIT {
                return Err(Error::SizeGuard {
                    what: "dense sector Hamiltonian",
                    dimension: s.len() as u128,
                    limit: DENSE_LIMIT as u128,
                });
            }
            s.bitstrings()
        }
        None => {
            let dim = dense_fock_dimension(m)?;
            full = (0..dim as u64).collect::<Vec<_>>();
            &full
        }
    };
    let row_of = |bits: u64| -> Option<usize> {
        match sector {
            Some(s) => s.index_of(bits),
            None => Some(bits as usize),
        }
    };

    let one_body = h.one_body();
    let w = h.pair().values();
    let dim = basis.len();
    let mut out = CMatrix::zeros(dim, dim);
    for (col, &bits) in basis.iter().enumerate() {
        for q in 0..m {
            let Some((mid, s1)) = ladder_on_bits(bits, q, LadderKind::Annihilate) else {
                continue;
            };
            for p in 0..m {
                let coeff = one_body[(p, q)];
                if coeff == Complex64::new(0.0, 0.0) {
                    continue;
                }
                if let Some((target, s2)) = ladder_on_bits(mid, p, LadderKind::Create) {
                    if let Some(row) = row_of(target) {
                        out[(row, col)] += coeff * (s1 * s2) as f64;
                    }
                }
            }
        }
        let mut pair_energy = 0.0;
        for p in 0..m {
            if bits >> p & 1 == 0 {
                continue;
            }
            for q in p + 1..m {
                if bits >> q & 1 == 1 {
                    pair_energy += w[(p, q)];
                }
            }
        }
        out[(col, col)] += Complex64::new(pair_energy, 0.0);
    }
    Ok(out)
}

fn check_state_modes(state: &FockState, modes: usize) -> Result<()> {
    if state.modes != modes {
        return Err(Error::DimensionMismatch {
            expected: modes,
            found: state.modes,
        });
    }
    Ok(())
}

/// `exp(−i dt Σ_p d_p n_p)`.
fn apply_number_phases(state: &mut FockState, diagonal: &[f64], dt: f64) {
    state.amplitudes.par_iter_mut().enumerate().for_each(|(bits, a)| {
        let mut energy = 0.0;
        let mut rest = bits;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            energy += diagonal[p];
            rest &= rest - 1;
        }
        *a *= Complex64::cis(-dt * energy);
    });
}

/// `exp(−i dt Σ_{p<q} W_pq n_p n_q)` from the precomputed table.
fn apply_pair_phases(state: &mut FockState, pair: &PairInteraction, dt: f64) {
    let w = pair.values();
    let m = state.modes;
    state.amplitudes.par_iter_mut().enumerate().for_each(|(bits, a)| {
        let mut energy = 0.0;
        for p in 0..m {
            if bits >> p & 1 == 0 {
                continue;
            }
            for q in p + 1..m {
                if bits >> q & 1 == 1 {
                    energy += w[(p, q)];
                }
            }
        }
        *a *= Complex64::cis(-dt * energy);
    });
}

/// Exact `exp(−i dt (h_pq a†_p a_q + h_pq* a†_q a_p))` for `p ≠ q`.
///
/// The generator only couples `|…1_p…0_q…⟩` with `|…0_p…1_q…⟩`; on each such
/// pair it is a 2×2 Hermitian block with off-diagonal `σ·h_pq`, where `σ` is
/// the parity of the modes strictly between `p` and `q`.
pub fn apply_hopping(state: &mut FockState, p: usize, q: usize, h_pq: Complex64, dt: f64) -> Result<()> {
    let m = state.modes;
    for idx in [p, q] {
        if idx >= m {
            return Err(Error::IndexOutOfRange { index: idx, len: m });
        }
    }
    if p == q {
        return Err(Error::InvalidArgument("hopping needs two distinct modes".into()));
    }
    let magnitude = h_pq.norm();
    if magnitude == 0.0 || dt == 0.0 {
        return Ok(());
    }
    let (lo, hi) = (p.min(q), p.max(q));
    let between = ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1);
    let cos = (dt * magnitude).cos();
    let sin_over = (dt * magnitude).sin() / magnitude;
    let (pm, qm) = (1usize << p, 1usize << q);
    for s1 in 0..state.amplitudes.len() {
        if s1 & pm == 0 || s1 & qm != 0 {
            continue;
        }
        let s2 = s1 ^ pm ^ qm;
        let sigma = if (s1 as u64 & between).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let g = h_pq * sigma;
        let (a1, a2) = (state.amplitudes[s1], state.amplitudes[s2]);
        let minus_i = Complex64::new(0.0, -1.0);
        state.amplitudes[s1] = a1 * cos + minus_i * sin_over * g * a2;
        state.amplitudes[s2] = a2 * cos + minus_i * sin_over * g.conj() * a1;
    }
    Ok(())
}

fn hopping_pairs(one_body: &CMatrix) -> Vec<(usize, usize, Complex64)> {
    let m = one_body.nrows();
    let mut pairs = Vec::new();
    for p in 0..m {
        for q in p + 1..m {
            let h = one_body[(p, q)];
            if h != Complex64::new(0.0, 0.0) {
                pairs.push((p, q, h));
            }
        }
    }
    pairs
}

fn apply_hoppings(state: &mut FockState, pairs: &[(usize, usize, Complex64)], dt: f64, reverse: bool) -> Result<()> {
    if reverse {
        for &(p, q, h) in pairs.iter().rev() {
            apply_hopping(state, p, q, h, dt)?;
        }
    } else {
        for &(p, q, h) in pairs {
            apply_hopping(state, p, q, h, dt)?;
        }
    }
    Ok(())
}

fn diagonal_of(m: &CMatrix) -> Vec<f64> {
    (0..m.nrows()).map(|p| m[(p, p)].re).collect()
}

/// One first-order step with precomputed integrals: one-body diagonal phases,
/// pair phases, then hoppings in ascending `(p, q)` order.
pub fn trotter_step_a2(state: &mut FockState, h: &SecondQuantHamiltonian, dt: f64) -> Result<()> {
    check_state_modes(state, h.modes())?;
    let one_body = h.one_body();
    apply_number_phases(state, &diagonal_of(&one_body), dt);
    apply_pair_phases(state, h.pair(), dt);
    apply_hoppings(state, &hopping_pairs(&one_body), dt, false)
}

/// Potential and pair phases computed per bitstring from the occupied sites.
///
/// Each bitstring `s` acquires `exp(−i dt [Σ_{p∈s} V_p + Σ_{p<q∈s} g·1/d(p,q)])`
/// where `g` is the Coulomb strength and `1/d` is either exact or the
/// fixed-point result of the inverse-distance arithmetic.
pub fn online_diagonal_phase(
    state: &mut FockState,
    potential: &PotentialField,
    pair: &PairInteraction,
    dt: f64,
    phase_bits: Option<PhaseBits>,
) -> Result<()> {
    let PairForm::Coulomb { strength, lattice } = pair.form() else {
        return Err(Error::InvalidArgument(
            "online phases need a distance-based (Coulomb) pair interaction".into(),
        ));
    };
    let m = state.modes;
    for found in [potential.sites(), lattice.sites()] {
        if found != m {
            return Err(Error::DimensionMismatch { expected: m, found });
        }
    }
    let v = potential.values();
    // validate the arithmetic once so the per-bitstring closure cannot fail
    if let (Some(pb), true) = (phase_bits, m >= 2) {
        inv_distance(&lattice, 0, 1, pb.bits, pb.path)?;
    }
    state.amplitudes.par_iter_mut().enumerate().for_each_init(
        || Vec::with_capacity(m),
        |occupied, (bits, a)| {
            occupied.clear();
            let mut rest = bits;
            while rest != 0 {
                occupied.push(rest.trailing_zeros() as usize);
                rest &= rest - 1;
            }
            let mut energy = 0.0;
            for (i, &p) in occupied.iter().enumerate() {
                energy += v[p];
                for &q in &occupied[i + 1..] {
                    energy += strength * inverse_distance(&lattice, p, q, phase_bits);
                }
            }
            *a *= Complex64::cis(-dt * energy);
        },
    );
    Ok(())
}

// Site indices come from a bitstring of the lattice's own width and the bit
// budget was validated by the caller, so neither lookup can fail.
fn inverse_distance(lattice: &LatticeSpec, p: usize, q: usize, phase_bits: Option<PhaseBits>) -> f64 {
    match phase_bits {
        None => 1.0 / lattice.distance(p, q).expect("occupied sites lie on the lattice"),
        Some(pb) => inv_distance(lattice, p, q, pb.bits, pb.path)
            .expect("bit budget validated")
            .value(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum A2Mode {
    /// All integrals precomputed classically.
    Precomputed,
    /// Only the kinetic matrix precomputed; potential and pair phases computed
    /// per bitstring, exactly (`None`) or with fixed-point arithmetic.
    Online(Option<PhaseBits>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A2Plan {
    dt: f64,
    steps: usize,
    splitting: Splitting,
    mode: A2Mode,
}

impl A2Plan {
    pub fn new(dt: f64, steps: usize, splitting: Splitting, mode: A2Mode) -> Result<Self> {
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
            mode,
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

    pub fn mode(&self) -> A2Mode {
        self.mode
    }
}

struct A2Factors {
    number_diagonal: Vec<f64>,
    hoppings: Vec<(usize, usize, Complex64)>,
}

impl A2Factors {
    fn new(h: &SecondQuantHamiltonian, mode: A2Mode) -> Self {
        let one_body = h.one_body();
        let number_diagonal = match mode {
            A2Mode::Precomputed => diagonal_of(&one_body),
            A2Mode::Online(_) => diagonal_of(h.kinetic().entries()),
        };
        Self {
            number_diagonal,
            hoppings: hopping_pairs(&one_body),
        }
    }

    fn diagonal(&self, state: &mut FockState, h: &SecondQuantHamiltonian, mode: A2Mode, dt: f64) -> Result<()> {
        apply_number_phases(state, &self.number_diagonal, dt);
        match mode {
            A2Mode::Precomputed => apply_pair_phases(state, h.pair(), dt),
            A2Mode::Online(bits) => online_diagonal_phase(state, h.potential(), h.pair(), dt, bits)?,
        }
        Ok(())
    }
}

/// Trotterized evolution.
///
/// Lie-Trotter repeats [`trotter_step_a2`] (with online phases in online
/// mode). Strang applies half-step diagonal phases, hoppings ascending for
/// `dt/2`, hoppings descending for `dt/2`, and half-step diagonal phases.
pub fn evolve_a2(state: &mut FockState, plan: &A2Plan, h: &SecondQuantHamiltonian) -> Result<()> {
    check_state_modes(state, h.modes())?;
    let factors = A2Factors::new(h, plan.mode);
    let dt = plan.dt;
    for _ in 0..plan.steps {
        match plan.splitting {
            Splitting::LieTrotter1 => {
                factors.diagonal(state, h, plan.mode, dt)?;
                apply_hoppings(state, &factors.hoppings, dt, false)?;
            }
            Splitting::Strang2 => {
                factors.diagonal(state, h, plan.mode, dt / 2.0)?;
                apply_hoppings(state, &factors.hoppings, dt / 2.0, false)?;
                apply_hoppings(state, &factors.hoppings, dt / 2.0, true)?;
                factors.diagonal(state, h, plan.mode, dt / 2.0)?;
            }
        }
    }
    Ok(())
}

/// One qubit per mode.
pub fn qubit_cost_a2(modes: usize) -> usize {
    modes
}
