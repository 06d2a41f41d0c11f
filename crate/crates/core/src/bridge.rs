//! Correspondence between the first- and second-quantized pictures.
//!
//! The second-quantized coefficient of an ascending tuple `K` is
//! `D_K = √N! · Ψ(K)`, which makes both representations carry unit norm. For
//! two particles on two sites, `Ψ(0,1) = 1/√2`, `Ψ(1,0) = −1/√2` maps to
//! `D_{11} = 1`.

use num_complex::Complex64;

use crate::firstq::{
    decode_tuple, encode_tuple, evolve_a1, slater_state, sort_with_sign, tensor_dimension, A1Plan, FirstQuantState,
};
use crate::fock::{build_hamiltonian_matrix, evolve_a2, A2Mode, A2Plan, FockState, SecondQuantHamiltonian, SectorBasis};
use crate::lattice::MomentumTransform;
use crate::linalg::{determinant, factorial};
use crate::oracle;
use crate::{CMatrix, Error, Result, Splitting};

/// Antisymmetry tolerance required before mapping a first-quantized state.
pub const ANTISYMMETRY_GATE: f64 = 1e-8;

/// Amplitudes below this magnitude do not count as sector support.
pub const SUPPORT_TOL: f64 = 1e-12;

/// `det C[rows, cols]`, with the column order as given.
pub fn plucker_overlap(c: &CMatrix, rows: &[usize], cols: &[usize]) -> Result<Complex64> {
    let n = rows.len();
    if cols.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: cols.len(),
        });
    }
    for &r in rows {
        if r >= c.nrows() {
            return Err(Error::IndexOutOfRange { index: r, len: c.nrows() });
        }
    }
    for &col in cols {
        if col >= c.ncols() {
            return Err(Error::IndexOutOfRange { index: col, len: c.ncols() });
        }
    }
    let mut sub = Vec::with_capacity(n * n);
    for &r in rows {
        for &col in cols {
            sub.push(c[(r, col)]);
        }
    }
    Ok(determinant(sub, n))
}

fn tuple_bits(tuple: &[usize]) -> u64 {
    tuple.iter().fold(0, |acc, &x| acc | 1 << x)
}

fn occupied_sites(bits: u64) -> Vec<usize> {
    (0..64).filter(|p| bits >> p & 1 == 1).collect()
}

/// Maps between `M^N` antisymmetric tensors and the `N`-particle sector of
/// the `2^M` Fock space. Tuples are row-major with particle 0 slowest; mode
/// `p` is bit `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrespondenceMap {
    modes: usize,
    particles: usize,
}

impl CorrespondenceMap {
    pub const ORDERING: &'static str = "row-major tuples, particle 0 slowest; mode p is bit p";

    pub fn new(modes: usize, particles: usize) -> Result<Self> {
        if particles > modes {
            return Err(Error::InvalidArgument(format!(
                "{particles} fermions do not fit on {modes} sites"
            )));
        }
        tensor_dimension(modes, particles)?;
        Ok(Self { modes, particles })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    /// `√N!`.
    pub fn normalization(&self) -> f64 {
        factorial(self.particles).sqrt()
    }

    pub fn to_fock(&self, state: &FirstQuantState) -> Result<FockState> {
        if state.sites() != self.modes || state.particles() != self.particles {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: state.sites(),
            });
        }
        let violation = state.antisymmetry_violation();
        if violation > ANTISYMMETRY_GATE {
            return Err(Error::NotAntisymmetric { violation });
        }
        let sector = SectorBasis::new(self.modes, self.particles)?;
        let scale = self.normalization();
        let coefficients: Vec<Complex64> = sector
            .bitstrings()
            .iter()
            .map(|&bits| state.amplitudes()[encode_tuple(&occupied_sites(bits), self.modes)] * scale)
            .collect();
        FockState::from_sector(&sector, &coefficients)
    }

    pub fn to_first(&self, state: &FockState) -> Result<FirstQuantState> {
        if state.modes() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: state.modes(),
            });
        }
        for (bits, a) in state.amplitudes().iter().enumerate() {
            if a.norm() > SUPPORT_TOL && bits.count_ones() as usize != self.particles {
                return Err(Error::CrossSector);
            }
        }
        let scale = 1.0 / self.normalization();
        let mut out = FirstQuantState::zeros(self.particles, self.modes)?.into_amplitudes();
        let mut tuple = vec![0; self.particles];
        for (idx, slot) in out.iter_mut().enumerate() {
            decode_tuple(idx, self.modes, &mut tuple);
            if let Some(sign) = sort_with_sign(&mut tuple) {
                *slot = state.amplitude(tuple_bits(&tuple)) * (sign * scale);
            }
        }
        FirstQuantState::from_amplitudes(self.particles, self.modes, out)
    }
}

/// Sector image of an antisymmetric first-quantized state.
pub fn first_to_fock(state: &FirstQuantState) -> Result<FockState> {
    CorrespondenceMap::new(state.sites(), state.particles())?.to_fock(state)
}

/// Antisymmetric tensor of a state supported on a single particle-number
/// sector.
pub fn fock_to_first(state: &FockState) -> Result<FirstQuantState> {
    let mut sector = None;
    for (bits, a) in state.amplitudes().iter().enumerate() {
        if a.norm() > SUPPORT_TOL {
            let n = bits.count_ones() as usize;
            match sector {
                None => sector = Some(n),
                Some(k) if k != n => return Err(Error::CrossSector),
                Some(_) => {}
            }
        }
    }
    let particles = sector.ok_or_else(|| Error::DegenerateInput("state has no support".into()))?;
    CorrespondenceMap::new(state.modes(), particles)?.to_first(state)
}

/// Spectrum of a first-quantized operator restricted to the antisymmetric
/// subspace, using the images of the sector basis states as an orthonormal
/// basis.
pub fn antisymmetric_spectrum(h_first: &CMatrix, modes: usize, particles: usize) -> Result<Vec<f64>> {
    let dim = tensor_dimension(modes, particles)?;
    if h_first.nrows() != dim || h_first.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: h_first.nrows(),
        });
    }
    let map = CorrespondenceMap::new(modes, particles)?;
    let sector = SectorBasis::new(modes, particles)?;
    let basis = sector
        .bitstrings()
        .iter()
        .map(|&bits| {
            let v = map.to_first(&FockState::basis(modes, bits)?)?.into_amplitudes();
            Ok(nalgebra::DVector::from_vec(v))
        })
        .collect::<Result<Vec<_>>>()?;
    let images: Vec<_> = basis.iter().map(|v| h_first * v).collect();
    let restricted = CMatrix::from_fn(basis.len(), basis.len(), |i, j| basis[i].dotc(&images[j]));
    oracle::exact_spectrum(&restricted)
}

/// Inputs for a cross-representation run.
#[derive(Debug, Clone)]
pub struct CompareSetup {
    pub hamiltonian: SecondQuantHamiltonian,
    /// Single-particle orbitals as rows.
    pub orbital_basis: CMatrix,
    pub orbitals: Vec<usize>,
    pub time: f64,
    pub steps: usize,
    pub splitting: Splitting,
}

/// Overlap magnitudes `|⟨ψ|φ⟩|` between the two representations and against
/// the dense references.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    /// Dense first-quantized evolution vs dense sector evolution.
    pub oracle: f64,
    /// Trotterized first-quantized vs Trotterized second-quantized evolution.
    pub trotter: f64,
    /// Trotterized first-quantized vs its dense reference.
    pub a1_vs_oracle: f64,
    /// Trotterized second-quantized vs its dense reference.
    pub a2_vs_oracle: f64,
}

/// Evolves a Slater determinant in both pictures, maps the second-quantized
/// result back to a tensor, and reports the overlaps.
pub fn compare_evolutions(setup: &CompareSetup) -> Result<FidelityReport> {
    let h = &setup.hamiltonian;
    let m = h.modes();
    let n = setup.orbitals.len();
    let start_first = slater_state(&setup.orbital_basis, &setup.orbitals)?;
    let start_fock = first_to_fock(&start_first)?;
    let sector = SectorBasis::new(m, n)?;

    let h_first = oracle::first_quant_hamiltonian_dense(
        m,
        n,
        h.kinetic().entries(),
        h.potential().values(),
        h.pair().values(),
    )?;
    let u_first = oracle::dense_expm(&h_first, setup.time)?;
    let first_exact = FirstQuantState::from_amplitudes(
        n,
        m,
        (&u_first * nalgebra::DVector::from_column_slice(start_first.amplitudes()))
            .as_slice()
            .to_vec(),
    )?;
    let h_sector = build_hamiltonian_matrix(h, Some(&sector))?;
    let u_sector = oracle::dense_expm(&h_sector, setup.time)?;
    let sector_exact = &u_sector * nalgebra::DVector::from_vec(start_fock.sector_amplitudes(&sector));
    let fock_exact = FockState::from_sector(&sector, sector_exact.as_slice())?;

    let mut first_trotter = start_first.clone();
    let mut fock_trotter = start_fock.clone();
    if setup.time != 0.0 {
        let dt = setup.time / setup.steps as f64;
        let transform = MomentumTransform::new(h.kinetic())?;
        evolve_a1(
            &mut first_trotter,
            &A1Plan::new(dt, setup.steps, setup.splitting, None)?,
            h.potential(),
            h.pair(),
            &transform,
        )?;
        evolve_a2(
            &mut fock_trotter,
            &A2Plan::new(dt, setup.steps, setup.splitting, A2Mode::Precomputed)?,
            h,
        )?;
    }

    let back_exact = fock_to_first(&fock_exact)?;
    let back_trotter = fock_to_first(&fock_trotter)?;
    Ok(FidelityReport {
        oracle: first_exact.overlap(&back_exact)?.norm(),
        trotter: first_trotter.overlap(&back_trotter)?.norm(),
        a1_vs_oracle: first_exact.overlap(&first_trotter)?.norm(),
        a2_vs_oracle: fock_exact.overlap(&fock_trotter)?.norm(),
    })
}
