//! Fixtures shared by the benchmarks.

use fockforge_core::bridge::first_to_fock;
use fockforge_core::firstq::{slater_state, FirstQuantState};
use fockforge_core::fock::{FockState, SecondQuantHamiltonian};
use fockforge_core::lattice::{dft_matrix, KineticMatrix, LatticeSpec, PairInteraction, PotentialField};

/// Ring with unit hopping, a linear potential ramp and unit Coulomb pairs.
pub fn ring_hamiltonian(sites: usize) -> SecondQuantHamiltonian {
    let spec = LatticeSpec::ring(sites).expect("ring needs two sites");
    SecondQuantHamiltonian::new(
        KineticMatrix::ring(&spec, 1.0).expect("ring geometry"),
        PotentialField::new((0..sites).map(|p| 0.1 * p as f64).collect()).expect("finite ramp"),
        PairInteraction::coulomb(&spec, 1.0).expect("nonnegative strength"),
    )
    .expect("matching sizes")
}

/// Plane-wave Slater determinant on the lowest `particles` momenta.
pub fn plane_wave_state(sites: usize, particles: usize) -> FirstQuantState {
    let orbitals: Vec<usize> = (0..particles).collect();
    slater_state(&dft_matrix(sites), &orbitals).expect("orbitals in range")
}

pub fn plane_wave_fock(sites: usize, particles: usize) -> FockState {
    first_to_fock(&plane_wave_state(sites, particles)).expect("antisymmetric")
}
