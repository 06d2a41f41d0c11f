//! Seeded random instances.
//!
//! Every random draw in the workbench comes from [`rng`], which derives an
//! independent ChaCha8 stream from one 64-bit seed and a stream id. Callers
//! pick a distinct stream id per purpose, so adding draws to one purpose never
//! shifts the numbers another purpose sees.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::CMatrix;

/// Stream ids used by the command-line front end.
pub mod streams {
    pub const OBSERVABLE: u64 = 1;
    pub const STATE: u64 = 2;
    pub const SAMPLING: u64 = 3;
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Normalized complex Gaussian vector.
pub fn state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
    v
}

/// Hermitian matrix `(G + G†)/2` with complex Gaussian `G`.
pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Real symmetric matrix with Gaussian entries.
pub fn real_symmetric<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> nalgebra::DMatrix<f64> {
    let g = nalgebra::DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    (&g + g.transpose()) * 0.5
}

/// Haar-distributed unitary from the QR decomposition of a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| rng(7, 1).random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let x: u64 = rng(7, 1).random();
        let y: u64 = rng(7, 2).random();
        assert_ne!(x, y);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = unitary(6, &mut rng(1, 0));
        let err = (u.adjoint() * &u - CMatrix::identity(6, 6)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }
}
