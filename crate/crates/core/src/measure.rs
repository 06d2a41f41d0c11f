//! Measurement schemes: von Neumann pointer, Kitaev circuit, phase kickback
//! and Ramsey protocol, plus eigenvalue estimation from sampled kickback
//! outcomes.
//!
//! Probe outcome labels follow the circuit algebra. With
//! `G(θ) = |0⟩⟨0| + e^{−iθ}|1⟩⟨1|`, the Hadamard sandwich puts
//! `½(1 + cos θ)` on outcome `0`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::lattice::dft_matrix;
use crate::linalg::{check_square, eigh_sorted, hermitian_deviation, norm};
use crate::oracle;
use crate::{CMatrix, Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const RECONSTRUCTION_TOL: f64 = 1e-10;
const STATE_NORM_TOL: f64 = 1e-10;
/// Largest denominator tried when looking for a common time quantum.
const MAX_TIME_DENOMINATOR: u64 = 4096;
/// Likelihood grid points per fastest fringe period.
const GRID_PER_FRINGE: f64 = 64.0;
const MAX_GRID: usize = 1 << 22;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Hermitian `d×d` observable with its eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl Observable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let (eigenvalues, eigenvectors) = eigh_sorted(&matrix);
        let mut scaled = eigenvectors.clone();
        for (j, &lambda) in eigenvalues.iter().enumerate() {
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= lambda);
        }
        let rebuilt = scaled * eigenvectors.adjoint();
        let error = (&rebuilt - &matrix).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if error > RECONSTRUCTION_TOL {
            return Err(Error::DegenerateInput(format!(
                "eigendecomposition reconstructs the observable only to {error:e}"
            )));
        }
        Ok(Self {
            matrix,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("diagonal entries must be finite and nonempty".into()));
        }
        let n = values.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                zero()
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns match [`Observable::eigenvalues`].
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// `c_a = ⟨a|ψ⟩` for a normalized state, in eigenvalue order.
    pub fn components(&self, state: &[Complex64]) -> Result<Vec<Complex64>> {
        check_state(state, self.dim())?;
        Ok((0..self.dim())
            .map(|a| {
                self.eigenvectors
                    .column(a)
                    .iter()
                    .zip(state)
                    .map(|(v, s)| v.conj() * s)
                    .sum()
            })
            .collect())
    }

    /// `exp(−iAt)` from the cached eigendecomposition.
    pub fn evolution(&self, t: f64) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let phase = Complex64::cis(-lambda * t);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
        scaled * self.eigenvectors.adjoint()
    }
}

fn check_state(state: &[Complex64], dim: usize) -> Result<()> {
    if state.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: state.len(),
        });
    }
    let n = norm(state);
    if (n - 1.0).abs() > STATE_NORM_TOL {
        return Err(Error::InvalidArgument(format!("state norm {n} is not 1")));
    }
    Ok(())
}

/// `M_p`-site pointer with momentum `p̂ = C† diag(0, …, M_p − 1) C`, where
/// `C[k][x] = e^{−2πikx/M_p}/√M_p`. Evolving `|x = 0⟩` under
/// `exp(−2πiλp̂/M_p)` lands on `|x = λ⟩` for integer `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerRegister {
    size: usize,
    fourier: CMatrix,
}

impl PointerRegister {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidArgument("pointer needs at least 2 positions".into()));
        }
        Ok(Self {
            size,
            fourier: dft_matrix(size),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Dense `p̂` in the position basis.
    pub fn momentum(&self) -> CMatrix {
        let m = self.size;
        let mut scaled = self.fourier.adjoint();
        for k in 0..m {
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= k as f64);
        }
        scaled * &self.fourier
    }

    /// `exp(−iθp̂)|x = 0⟩` in the position basis.
    pub fn shifted_origin(&self, theta: f64) -> Vec<Complex64> {
        let m = self.size;
        (0..m)
            .map(|x| {
                (0..m)
                    .map(|k| self.fourier[(k, x)].conj() * Complex64::cis(-theta * k as f64) * self.fourier[(k, 0)])
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    VonNeumann,
    Kitaev,
    Kickback,
    Ramsey,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::VonNeumann, Scheme::Kitaev, Scheme::Kickback, Scheme::Ramsey];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::VonNeumann => "vn",
            Scheme::Kitaev => "kitaev",
            Scheme::Kickback => "kickback",
            Scheme::Ramsey => "ramsey",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme '{s}'")))
    }
}

/// Outcome distribution and the pre-measurement joint state.
///
/// Joint ordering: system ⊗ pointer for the von Neumann scheme, probe ⊗
/// system for the Kitaev circuit, probe alone for kickback and Ramsey.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub distribution: Vec<f64>,
    pub joint: Vec<Complex64>,
}

impl SchemeResult {
    pub fn max_deviation(&self, other: &SchemeResult) -> Result<f64> {
        if self.distribution.len() != other.distribution.len() {
            return Err(Error::DimensionMismatch {
                expected: self.distribution.len(),
                found: other.distribution.len(),
            });
        }
        Ok(self
            .distribution
            .iter()
            .zip(&other.distribution)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Pointer measurement with the canonical time `2π/M_p`.
pub fn von_neumann_measure(a: &Observable, state: &[Complex64], pointer_size: usize) -> Result<SchemeResult> {
    von_neumann_measure_for(a, state, pointer_size, TAU / pointer_size as f64)
}

/// Applies `exp(−i·time·A⊗p̂)` to `ψ ⊗ |x = 0⟩` and reads the pointer
/// position.
pub fn von_neumann_measure_for(
    a: &Observable,
    state: &[Complex64],
    pointer_size: usize,
    time: f64,
) -> Result<SchemeResult> {
    let pointer = PointerRegister::new(pointer_size)?;
    let coefficients = a.components(state)?;
    let d = a.dim();
    let m = pointer.size();
    let mut joint = vec![zero(); d * m];
    for (idx, &c) in coefficients.iter().enumerate() {
        let shifted = pointer.shifted_origin(a.eigenvalues()[idx] * time);
        for s in 0..d {
            let weight = c * a.eigenvectors()[(s, idx)];
            for (x, &phi) in shifted.iter().enumerate() {
                joint[s * m + x] += weight * phi;
            }
        }
    }
    let mut distribution = vec![0.0; m];
    for (i, z) in joint.iter().enumerate() {
        distribution[i % m] += z.norm_sqr();
    }
    Ok(SchemeResult {
        scheme: Scheme::VonNeumann,
        distribution,
        joint,
    })
}

/// Hadamard on the probe, controlled `exp(−iAt)`, Hadamard, probe readout.
pub fn kitaev_circuit(a: &Observable, t: f64, state: &[Complex64]) -> Result<SchemeResult> {
    check_state(state, a.dim())?;
    let u = a.evolution(t);
    let psi = nalgebra::DVector::from_column_slice(state);
    let evolved = &u * &psi;
    let d = a.dim();
    let mut joint = vec![zero(); 2 * d];
    for s in 0..d {
        joint[s] = (psi[s] + evolved[s]) * 0.5;
        joint[d + s] = (psi[s] - evolved[s]) * 0.5;
    }
    let p0: f64 = joint[..d].iter().map(|z| z.norm_sqr()).sum();
    let p1: f64 = joint[d..].iter().map(|z| z.norm_sqr()).sum();
    Ok(SchemeResult {
        scheme: Scheme::Kitaev,
        distribution: vec![p0, p1],
        joint,
    })
}

fn hadamard() -> [[Complex64; 2]; 2] {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// `exp(−iπσ^y/4)`.
fn pi_half() -> [[Complex64; 2]; 2] {
    let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [[c, -c], [c, c]]
}

fn sandwich(pulse: [[Complex64; 2]; 2], theta: f64, scheme: Scheme) -> SchemeResult {
    // pulse |0⟩, then G(θ), then pulse
    let phase = Complex64::cis(-theta);
    let mid = [pulse[0][0], pulse[1][0] * phase];
    let joint = vec![
        pulse[0][0] * mid[0] + pulse[0][1] * mid[1],
        pulse[1][0] * mid[0] + pulse[1][1] * mid[1],
    ];
    let distribution = joint.iter().map(|z| z.norm_sqr()).collect();
    SchemeResult {
        scheme,
        distribution,
        joint,
    }
}

/// `H G(λt) H |0⟩` on the probe alone.
pub fn phase_kickback_circuit(lambda: f64, t: f64) -> SchemeResult {
    sandwich(hadamard(), lambda * t, Scheme::Kickback)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pulse {
    #[default]
    Hadamard,
    /// `exp(−iπσ^y/4)`; outcomes come out relabelled relative to Hadamard.
    PiHalf,
}

impl Pulse {
    pub fn name(self) -> &'static str {
        match self {
            Pulse::Hadamard => "hadamard",
            Pulse::PiHalf => "pi-half",
        }
    }
}

impl FromStr for Pulse {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hadamard" => Ok(Pulse::Hadamard),
            "pi-half" => Ok(Pulse::PiHalf),
            other => Err(Error::InvalidArgument(format!("unknown pulse '{other}'"))),
        }
    }
}

/// Pulse, free evolution under `diag(0, λ)` for time `t`, pulse.
pub fn ramsey_protocol(lambda: f64, t: f64, pulse: Pulse) -> SchemeResult {
    let p = match pulse {
        Pulse::Hadamard => hadamard(),
        Pulse::PiHalf => pi_half(),
    };
    sandwich(p, lambda * t, Scheme::Ramsey)
}

/// `max |exp(−it p̂⊗A) − (H⊗I) exp(−it |1⟩⟨1|⊗A) (H⊗I)|` with
/// `p̂ = (1 − σ^x)/2`.
pub fn generator_identity_check(a: &Observable, t: f64) -> Result<f64> {
    let d = a.dim();
    let p = PointerRegister::new(2)?.momentum();
    let kron = |left: &CMatrix| {
        CMatrix::from_fn(2 * d, 2 * d, |i, j| left[(i / d, j / d)] * a.matrix()[(i % d, j % d)])
    };
    let lhs = oracle::dense_expm(&kron(&p), t)?;
    let mut projector = CMatrix::zeros(2, 2);
    projector[(1, 1)] = Complex64::new(1.0, 0.0);
    let controlled = oracle::dense_expm(&kron(&projector), t)?;
    let h = CMatrix::from_fn(2 * d, 2 * d, |i, j| {
        if i % d == j % d {
            hadamard()[i / d][j / d]
        } else {
            zero()
        }
    });
    let rhs = &h * controlled * &h;
    Ok((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Phase estimate reported inside `[0, window/2]`.
///
/// The cosine law cannot tell `λ` from `−λ`, and every time in the grid is an
/// integer multiple of `2π/window`, so `λ` is only known modulo `window` and
/// up to sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimate {
    pub value: f64,
    pub window: f64,
}

impl PhaseEstimate {
    /// Distance from `lambda` once both are folded into the window.
    pub fn folded_error(&self, lambda: f64) -> f64 {
        (fold(lambda, self.window) - self.value).abs()
    }
}

/// Maps `lambda` into `[0, window/2]` through periodicity and `λ → −λ`.
pub fn fold(lambda: f64, window: f64) -> f64 {
    let r = lambda.rem_euclid(window);
    r.min(window - r)
}

/// Largest `τ` with every time an integer multiple of `τ`.
pub fn time_quantum(times: &[f64]) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::DegenerateInput("time grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(Error::DegenerateInput("times must be positive and finite".into()));
    }
    let smallest = times.iter().copied().fold(f64::INFINITY, f64::min);
    for q in 1..=MAX_TIME_DENOMINATOR {
        let tau = smallest / q as f64;
        let commensurate = times.iter().all(|t| {
            let ratio = t / tau;
            (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0)
        });
        if commensurate {
            return Ok(tau);
        }
    }
    Err(Error::DegenerateInput("times share no common quantum".into()))
}

/// Samples kickback outcomes of `A` on `state` at each time, `shots` per
/// time, and returns the maximum-likelihood phase.
pub fn estimate_eigenvalue<R: Rng + ?Sized>(
    a: &Observable,
    state: &[Complex64],
    times: &[f64],
    shots: u64,
    rng: &mut R,
) -> Result<PhaseEstimate> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let tau = time_quantum(times)?;
    let window = TAU / tau;
    let mut zeros = Vec::with_capacity(times.len());
    for &t in times {
        let p0 = kitaev_circuit(a, t, state)?.distribution[0].clamp(0.0, 1.0);
        let draw = Binomial::new(shots, p0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        zeros.push(draw.sample(rng));
    }
    let log_likelihood = |lambda: f64| -> f64 {
        times
            .iter()
            .zip(&zeros)
            .map(|(&t, &k)| {
                let p0 = (0.5 * (1.0 + (lambda * t).cos())).clamp(1e-300, 1.0);
                let p1 = (1.0 - p0).max(1e-300);
                k as f64 * p0.ln() + (shots - k) as f64 * p1.ln()
            })
            .sum()
    };
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let half = window / 2.0;
    let step = TAU / t_max / GRID_PER_FRINGE;
    let points = (half / step).ceil() as usize + 1;
    if points > MAX_GRID {
        return Err(Error::DegenerateInput(format!(
            "likelihood grid of {points} points exceeds {MAX_GRID}"
        )));
    }
    let step = half / (points - 1) as f64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..points {
        let lambda = i as f64 * step;
        let ll = log_likelihood(lambda);
        if ll > best.0 {
            best = (ll, lambda);
        }
    }
    let value = golden_maximum(&log_likelihood, (best.1 - step).max(0.0), (best.1 + step).min(half));
    Ok(PhaseEstimate { value, window })
}

fn golden_maximum(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Outcome distribution of a two-outcome scheme on a general state, built
/// from its eigenstate distributions weighted by `|⟨a|ψ⟩|²`.
pub fn eigen_mixture(
    a: &Observable,
    state: &[Complex64],
    per_eigenvalue: impl Fn(f64) -> SchemeResult,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; 2];
    for (c, &lambda) in a.components(state)?.iter().zip(a.eigenvalues()) {
        let r = per_eigenvalue(lambda);
        for (o, p) in out.iter_mut().zip(&r.distribution) {
            *o += c.norm_sqr() * p;
        }
    }
    Ok(out)
}

/// `½(1 + cos λt)`.
pub fn cosine_law(lambda: f64, t: f64) -> f64 {
    0.5 * (1.0 + (lambda * t).cos())
}

/// Shift that leaves every distribution at time `t` unchanged.
pub fn alias_period(t: f64) -> f64 {
    TAU / t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn basis(d: usize, k: usize) -> Vec<Complex64> {
        let mut v = vec![zero(); d];
        v[k] = c(1.0);
        v
    }

    #[test]
    fn observable_rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0);
        assert!(matches!(Observable::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn pointer_momentum_spectrum() {
        for m in [2, 3, 5, 8] {
            let p = PointerRegister::new(m).unwrap().momentum();
            assert!(hermitian_deviation(&p) < 1e-14);
            let spec = oracle::exact_spectrum(&p).unwrap();
            for (k, v) in spec.iter().enumerate() {
                assert!((v - k as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_site_pointer_momentum_is_half_one_minus_sigma_x() {
        let p = PointerRegister::new(2).unwrap().momentum();
        let expected = [[0.5, -0.5], [-0.5, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((p[(i, j)] - c(expected[i][j])).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn integer_eigenvalue_moves_pointer() {
        let a = Observable::diagonal(&(0..8).map(f64::from).collect::<Vec<_>>()).unwrap();
        let r = von_neumann_measure(&a, &basis(8, 2), 8).unwrap();
        assert!(r.distribution[2] >= 1.0 - 1e-12);
    }

    #[test]
    fn zero_observable_leaves_pointer() {
        let a = Observable::new(CMatrix::zeros(3, 3)).unwrap();
        let psi = random::state(3, &mut random::rng(50, 0));
        let r = von_neumann_measure(&a, &psi, 5).unwrap();
        assert!((r.distribution[0] - 1.0).abs() < 1e-14);
    }

    fn dense_pointer(a: &Observable, state: &[Complex64], m: usize, time: f64) -> Vec<f64> {
        let d = a.dim();
        let p = PointerRegister::new(m).unwrap().momentum();
        let gen = CMatrix::from_fn(d * m, d * m, |i, j| a.matrix()[(i / m, j / m)] * p[(i % m, j % m)]);
        let u = oracle::dense_expm(&gen, time).unwrap();
        let mut dist = vec![0.0; m];
        for i in 0..d * m {
            let amp: Complex64 = (0..d).map(|s| u[(i, s * m)] * state[s]).sum();
            dist[i % m] += amp.norm_sqr();
        }
        dist
    }

    #[test]
    fn fractional_eigenvalue_matches_dense_pointer() {
        let a = Observable::diagonal(&[1.5, 0.25]).unwrap();
        let r = von_neumann_measure(&a, &basis(2, 0), 8).unwrap();
        let dense = dense_pointer(&a, &basis(2, 0), 8, TAU / 8.0);
        for (x, y) in r.distribution.iter().zip(&dense) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(r.distribution.iter().all(|&p| p < 0.9));
    }

    #[test]
    fn random_observable_matches_dense_pointer() {
        let mut rng = random::rng(51, 0);
        let a = Observable::new(random::hermitian(3, &mut rng)).unwrap();
        let psi = random::state(3, &mut rng);
        let r = von_neumann_measure(&a, &psi, 4).unwrap();
        let dense = dense_pointer(&a, &psi, 4, TAU / 4.0);
        for (x, y) in r.distribution.iter().zip(&dense) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((r.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kitaev_endpoints() {
        let a = Observable::diagonal(&[1.0]).unwrap();
        assert!((kitaev_circuit(&a, 0.0, &basis(1, 0)).unwrap().distribution[0] - 1.0).abs() < 1e-15);
        assert!(kitaev_circuit(&a, PI, &basis(1, 0)).unwrap().distribution[0].abs() < 1e-15);
    }

    #[test]
    fn kitaev_matches_two_site_pointer() {
        let mut rng = random::rng(52, 0);
        let a = Observable::new(random::hermitian(4, &mut rng)).unwrap();
        let psi = random::state(4, &mut rng);
        let t = 1.7;
        let k = kitaev_circuit(&a, t, &psi).unwrap();
        let v = von_neumann_measure_for(&a, &psi, 2, t).unwrap();
        assert!(k.max_deviation(&v).unwrap() < 1e-12);
    }

    #[test]
    fn kickback_values() {
        assert!((phase_kickback_circuit(0.0, 1.0).distribution[0] - 1.0).abs() < 1e-15);
        assert!((phase_kickback_circuit(PI / 2.0, 1.0).distribution[0] - 0.5).abs() < 1e-15);
        assert!((phase_kickback_circuit(PI, 1.0).distribution[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kickback_reduces_kitaev_on_eigenstates() {
        let a = Observable::diagonal(&[-0.4, 0.9, 2.3]).unwrap();
        for i in 0..64 {
            let t = 0.1 * i as f64;
            for (k, &lambda) in [-0.4, 0.9, 2.3].iter().enumerate() {
                let kit = kitaev_circuit(&a, t, &basis(3, k)).unwrap();
                let kick = phase_kickback_circuit(lambda, t);
                assert!(kit.max_deviation(&kick).unwrap() < 1e-14);
            }
        }
    }

    #[test]
    fn ramsey_relabels() {
        for i in 0..64 {
            let theta = TAU * i as f64 / 64.0;
            let h = ramsey_protocol(theta, 1.0, Pulse::Hadamard);
            let y = ramsey_protocol(theta, 1.0, Pulse::PiHalf);
            assert_eq!(h.distribution, phase_kickback_circuit(theta, 1.0).distribution);
            assert!((h.distribution[0] - y.distribution[1]).abs() < 1e-12);
            assert!((h.distribution[0] - cosine_law(theta, 1.0)).abs() < 1e-12);
        }
        let d = ramsey_protocol(PI / 2.0, 1.0, Pulse::PiHalf).distribution;
        assert!((d[0] - 0.5).abs() < 1e-15 && (d[1] - 0.5).abs() < 1e-15);
        assert!((ramsey_protocol(0.0, 3.0, Pulse::Hadamard).distribution[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generator_identity() {
        let zero_a = Observable::new(CMatrix::zeros(2, 2)).unwrap();
        assert!(generator_identity_check(&zero_a, 1.3).unwrap() < 1e-15);
        let scalar = Observable::diagonal(&[1.0]).unwrap();
        assert!(generator_identity_check(&scalar, 2.9).unwrap() < 1e-14);
        let mut rng = random::rng(53, 0);
        let a = Observable::new(random::hermitian(8, &mut rng)).unwrap();
        for t in [0.1, 1.0, 10.0] {
            assert!(generator_identity_check(&a, t).unwrap() < 1e-11);
        }
    }

    #[test]
    fn aliasing_leaves_distribution_unchanged() {
        let t = 0.7;
        for lambda in [0.0, 0.3, 1.9, -2.2] {
            let a = phase_kickback_circuit(lambda, t);
            let b = phase_kickback_circuit(lambda + alias_period(t), t);
            assert!(a.max_deviation(&b).unwrap() < 1e-14);
        }
    }

    #[test]
    fn superposition_is_weighted_mixture() {
        let values = [0.3, 1.1, -0.8, 2.0];
        let a = Observable::diagonal(&values).unwrap();
        let psi = random::state(4, &mut random::rng(54, 0));
        let t = 0.9;
        let r = kitaev_circuit(&a, t, &psi).unwrap();
        let mixed: f64 = values.iter().zip(&psi).map(|(&l, z)| z.norm_sqr() * cosine_law(l, t)).sum();
        assert!((r.distribution[0] - mixed).abs() < 1e-12);
    }

    #[test]
    fn time_quantum_cases() {
        assert!((time_quantum(&[1.0, 0.5, 0.25]).unwrap() - 0.25).abs() < 1e-15);
        assert!((time_quantum(&[0.4, 0.6]).unwrap() - 0.2).abs() < 1e-12);
        assert!(time_quantum(&[]).is_err());
        assert!(time_quantum(&[1.0, 0.0]).is_err());
        assert!(time_quantum(&[1.0, 2f64.sqrt()]).is_err());
    }

    #[test]
    fn estimate_zero_phase() {
        let a = Observable::diagonal(&[0.0]).unwrap();
        let est = estimate_eigenvalue(&a, &basis(1, 0), &[1.0, 0.5], 256, &mut random::rng(55, 3)).unwrap();
        assert!(est.folded_error(0.0) < 1e-6);
    }

    #[test]
    fn estimate_recovers_phase() {
        let a = Observable::diagonal(&[1.25]).unwrap();
        let times: Vec<f64> = (-3..=3).map(|k| 2f64.powi(-k)).collect();
        let est = estimate_eigenvalue(&a, &basis(1, 0), &times, 4096, &mut random::rng(56, 3)).unwrap();
        assert!((est.window - TAU * 8.0).abs() < 1e-9);
        assert!(est.folded_error(1.25) <= 0.02, "{est:?}");
    }

    #[test]
    fn estimate_is_deterministic() {
        let a = Observable::diagonal(&[0.7]).unwrap();
        let run = || estimate_eigenvalue(&a, &basis(1, 0), &[1.0, 2.0], 100, &mut random::rng(57, 3)).unwrap();
        assert_eq!(run(), run());
    }

    #[test]
    fn kickback_mixture_matches_kitaev() {
        let mut rng = random::rng(58, 0);
        let a = Observable::new(random::hermitian(5, &mut rng)).unwrap();
        let psi = random::state(5, &mut rng);
        let t = 1.3;
        let mixed = eigen_mixture(&a, &psi, |l| phase_kickback_circuit(l, t)).unwrap();
        let kit = kitaev_circuit(&a, t, &psi).unwrap();
        for (x, y) in mixed.iter().zip(&kit.distribution) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn distributions_normalized(seed in any::<u64>(), d in 1usize..6, t in -5.0f64..5.0) {
            let mut rng = random::rng(seed, 0);
            let a = Observable::new(random::hermitian(d, &mut rng)).unwrap();
            let psi = random::state(d, &mut rng);
            for r in [kitaev_circuit(&a, t, &psi).unwrap(), von_neumann_measure(&a, &psi, 3).unwrap()] {
                prop_assert!(r.distribution.iter().all(|&p| p >= 0.0));
                prop_assert!((r.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn kickback_follows_cosine_law(lambda in -20.0f64..20.0, t in -3.0f64..3.0) {
            let r = phase_kickback_circuit(lambda, t);
            prop_assert!((r.distribution[0] - cosine_law(lambda, t)).abs() < 1e-12);
        }
    }
}
