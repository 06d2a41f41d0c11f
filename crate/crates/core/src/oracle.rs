//! Brute-force references.
//!
//! Nothing here calls into the algorithm modules: tuple indexing, permutation
//! signs and Hermiticity checks are re-derived locally so that agreement with
//! [`crate::firstq`], [`crate::fock`] and [`crate::bridge`] is evidence rather
//! than tautology. Sizes are guarded and exceeding a guard is an error, never
//! a silent approximation.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{CMatrix, Error, Result};

/// Largest dense operator dimension the oracles will build.
pub const DENSE_LIMIT: usize = 4096;

/// Largest particle count for the factorial-cost overlap.
pub const MAX_PERMUTATION_ORDER: usize = 6;

const HERMITIAN_TOL: f64 = 1e-10;

fn check_hermitian(h: &CMatrix) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: h.ncols(),
        });
    }
    let deviation = (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// `exp(−iHt)` through the eigendecomposition of `H`.
pub fn dense_expm(h: &CMatrix, t: f64) -> Result<CMatrix> {
    check_hermitian(h)?;
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::cis(-lambda * t);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(scaled * v.adjoint())
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn exact_spectrum(h: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let mut values: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn recurse(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), sign));
            return;
        }
        for k in 0..rest.len() {
            let chosen = rest.remove(k);
            prefix.push(chosen);
            // picking the k-th remaining element moves it past k others
            let s = if k % 2 == 0 { sign } else { -sign };
            recurse(prefix, rest, s, out);
            prefix.pop();
            rest.insert(k, chosen);
        }
    }
    let mut out = Vec::new();
    recurse(&mut Vec::new(), &mut (0..n).collect(), 1.0, &mut out);
    out
}

/// `Σ_π sgn(π) Π_i C[rows_i, cols_π(i)]`.
pub fn brute_force_antisym_overlap(c: &CMatrix, rows: &[usize], cols: &[usize]) -> Result<Complex64> {
    let n = rows.len();
    if cols.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: cols.len(),
        });
    }
    if n > MAX_PERMUTATION_ORDER {
        return Err(Error::SizeGuard {
            what: "permutation-sum overlap",
            dimension: n as u128,
            limit: MAX_PERMUTATION_ORDER as u128,
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
    let mut total = Complex64::new(0.0, 0.0);
    for (perm, sign) in permutations(n) {
        let mut term = Complex64::new(sign, 0.0);
        for (i, &pi) in perm.iter().enumerate() {
            term *= c[(rows[i], cols[pi])];
        }
        total += term;
    }
    Ok(total)
}

fn digits(index: usize, sites: usize, particles: usize) -> Vec<usize> {
    (0..particles)
        .map(|i| (index / sites.pow((particles - 1 - i) as u32)) % sites)
        .collect()
}

fn dense_dimension(sites: usize, particles: usize) -> Result<usize> {
    let dim = (sites as u128).saturating_pow(particles as u32);
    if dim > DENSE_LIMIT as u128 {
        return Err(Error::SizeGuard {
            what: "dense first-quantized Hamiltonian",
            dimension: dim,
            limit: DENSE_LIMIT as u128,
        });
    }
    Ok(dim as usize)
}

/// `Σ_i T^(i) + Σ_i V(x_i) + Σ_{i<j} W(x_i, x_j)` on the full `M^N` tuple space.
pub fn first_quant_hamiltonian_dense(
    sites: usize,
    particles: usize,
    kinetic: &CMatrix,
    potential: &[f64],
    pair: &DMatrix<f64>,
) -> Result<CMatrix> {
    if kinetic.nrows() != sites || kinetic.ncols() != sites {
        return Err(Error::DimensionMismatch {
            expected: sites,
            found: kinetic.nrows(),
        });
    }
    if potential.len() != sites || pair.nrows() != sites || pair.ncols() != sites {
        return Err(Error::DimensionMismatch {
            expected: sites,
            found: potential.len(),
        });
    }
    let dim = dense_dimension(sites, particles)?;
    let mut h = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let y = digits(col, sites, particles);
        let mut diag = 0.0;
        for i in 0..particles {
            diag += potential[y[i]];
            for j in i + 1..particles {
                diag += pair[(y[i], y[j])];
            }
        }
        h[(col, col)] += Complex64::new(diag, 0.0);
        for (leg, &yl) in y.iter().enumerate() {
            let weight = sites.pow((particles - 1 - leg) as u32);
            let base = col - yl * weight;
            for a in 0..sites {
                h[(base + a * weight, col)] += kinetic[(a, yl)];
            }
        }
    }
    Ok(h)
}

/// Permutation matrix exchanging particle legs `i` and `j`.
pub fn swap_operator(sites: usize, particles: usize, i: usize, j: usize) -> Result<CMatrix> {
    let dim = dense_dimension(sites, particles)?;
    let mut p = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut x = digits(col, sites, particles);
        x.swap(i, j);
        let row = x.iter().fold(0, |acc, &d| acc * sites + d);
        p[(row, col)] = Complex64::new(1.0, 0.0);
    }
    Ok(p)
}
