//! Lattice geometry and the one- and two-body Hamiltonian ingredients.
//!
//! Sites are labelled `0..M`. The potential is diagonal in the site (position)
//! basis, the Coulomb-type pair interaction depends only on the distance
//! between two sites, and the kinetic matrix is an arbitrary Hermitian matrix
//! whose eigenbasis defines momentum space.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{check_square, eigh_sorted, hermitian_deviation};
use crate::{CMatrix, Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// Periodic chain; distances use the minimum image.
    Ring,
    /// Open chain.
    Line,
}

impl Geometry {
    pub fn name(self) -> &'static str {
        match self {
            Geometry::Ring => "ring",
            Geometry::Line => "line",
        }
    }
}

impl std::str::FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ring" => Ok(Geometry::Ring),
            "line" => Ok(Geometry::Line),
            other => Err(Error::InvalidArgument(format!("unknown geometry `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    sites: usize,
    geometry: Geometry,
    spacing: f64,
}

impl LatticeSpec {
    pub fn new(sites: usize, geometry: Geometry, spacing: f64) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidLattice(format!("need at least 2 sites, got {sites}")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidLattice(format!("spacing must be positive, got {spacing}")));
        }
        Ok(Self {
            sites,
            geometry,
            spacing,
        })
    }

    pub fn ring(sites: usize) -> Result<Self> {
        Self::new(sites, Geometry::Ring, 1.0)
    }

    pub fn line(sites: usize) -> Result<Self> {
        Self::new(sites, Geometry::Line, 1.0)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    fn check_site(&self, p: usize) -> Result<()> {
        if p >= self.sites {
            return Err(Error::IndexOutOfRange {
                index: p,
                len: self.sites,
            });
        }
        Ok(())
    }

    /// Separation between sites `p` and `q` in units of the spacing, as an
    /// integer hop count (minimum image on a ring).
    pub fn hop_count(&self, p: usize, q: usize) -> Result<usize> {
        self.check_site(p)?;
        self.check_site(q)?;
        let direct = p.abs_diff(q);
        Ok(match self.geometry {
            Geometry::Line => direct,
            Geometry::Ring => direct.min(self.sites - direct),
        })
    }

    /// Distance between sites `p` and `q`.
    pub fn distance(&self, p: usize, q: usize) -> Result<f64> {
        Ok(self.hop_count(p, q)? as f64 * self.spacing)
    }
}

/// Hermitian one-body kinetic matrix `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticMatrix {
    entries: CMatrix,
    time_reversal_broken: bool,
}

impl KineticMatrix {
    /// Real symmetric kinetic matrix.
    pub fn from_real(entries: &DMatrix<f64>) -> Result<Self> {
        let complex = entries.map(|x| Complex64::new(x, 0.0));
        check_square(&complex)?;
        let deviation = hermitian_deviation(&complex);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            entries: complex,
            time_reversal_broken: false,
        })
    }

    /// General Hermitian kinetic matrix. Marked time-reversal broken when any
    /// entry has a nonzero imaginary part.
    pub fn from_complex(entries: CMatrix) -> Result<Self> {
        check_square(&entries)?;
        let deviation = hermitian_deviation(&entries);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let time_reversal_broken = entries.iter().any(|z| z.im != 0.0);
        Ok(Self {
            entries,
            time_reversal_broken,
        })
    }

    /// Nearest-neighbour hopping on a ring: `T[n][n±1 mod M] = -hopping`.
    ///
    /// For `M >= 3` the eigenvalues are `-2·hopping·cos(2πk/M)`. On two sites
    /// both neighbours coincide and the matrix is `-hopping·σx`.
    pub fn ring(spec: &LatticeSpec, hopping: f64) -> Result<Self> {
        if spec.geometry() != Geometry::Ring {
            return Err(Error::GeometryMismatch { expected: "ring" });
        }
        let m = spec.sites();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for n in 0..m {
            t[(n, (n + 1) % m)] = -hopping;
            t[((n + 1) % m, n)] = -hopping;
        }
        Self::from_real(&t)
    }

    /// Nearest-neighbour hopping for either geometry; a line omits the
    /// `(M−1, 0)` bond.
    pub fn nearest_neighbour(spec: &LatticeSpec, hopping: f64) -> Result<Self> {
        if spec.geometry() == Geometry::Ring {
            return Self::ring(spec, hopping);
        }
        let m = spec.sites();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for n in 0..m - 1 {
            t[(n, n + 1)] = -hopping;
            t[(n + 1, n)] = -hopping;
        }
        Self::from_real(&t)
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn sites(&self) -> usize {
        self.entries.nrows()
    }

    pub fn time_reversal_broken(&self) -> bool {
        self.time_reversal_broken
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    values: Vec<f64>,
}

impl PotentialField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite potential value {bad}")));
        }
        Ok(Self { values })
    }

    pub fn zero(sites: usize) -> Self {
        Self {
            values: vec![0.0; sites],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sites(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairForm {
    /// `W_pq = strength / distance(p, q)` on the given lattice.
    Coulomb { strength: f64, lattice: LatticeSpec },
    /// Arbitrary symmetric table.
    Tabulated,
}

/// Position-diagonal pair interaction `½ Σ W_pq n_p n_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairInteraction {
    values: DMatrix<f64>,
    form: PairForm,
}

impl PairInteraction {
    pub fn coulomb(spec: &LatticeSpec, strength: f64) -> Result<Self> {
        if !(strength >= 0.0 && strength.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coulomb strength must be nonnegative, got {strength}"
            )));
        }
        let m = spec.sites();
        let mut values = DMatrix::<f64>::zeros(m, m);
        for p in 0..m {
            for q in 0..m {
                if p != q {
                    values[(p, q)] = strength / spec.distance(p, q)?;
                }
            }
        }
        Ok(Self {
            values,
            form: PairForm::Coulomb {
                strength,
                lattice: *spec,
            },
        })
    }

    pub fn tabulated(values: DMatrix<f64>) -> Result<Self> {
        let m = values.nrows();
        if values.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: values.ncols(),
            });
        }
        for p in 0..m {
            if values[(p, p)] != 0.0 {
                return Err(Error::InvalidArgument("pair interaction diagonal must be zero".into()));
            }
            for q in 0..p {
                if values[(p, q)] != values[(q, p)] {
                    return Err(Error::InvalidArgument("pair interaction must be symmetric".into()));
                }
            }
        }
        Ok(Self {
            values,
            form: PairForm::Tabulated,
        })
    }

    pub fn zero(sites: usize) -> Self {
        Self {
            values: DMatrix::zeros(sites, sites),
            form: PairForm::Tabulated,
        }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn form(&self) -> PairForm {
        self.form
    }

    pub fn sites(&self) -> usize {
        self.values.nrows()
    }
}

/// Unitary change of basis from position to momentum space.
///
/// Columns of `matrix` are kinetic eigenvectors, so `C† T C` is diagonal with
/// `eigenvalues` on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumTransform {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    is_dft: bool,
}

/// `C[k][n] = exp(-2πi k n / M) / √M`.
pub fn dft_matrix(m: usize) -> CMatrix {
    let scale = 1.0 / (m as f64).sqrt();
    CMatrix::from_fn(m, m, |k, n| {
        Complex64::from_polar(scale, -2.0 * PI * ((k * n) as f64) / m as f64)
    })
}

fn max_off_diagonal(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

impl MomentumTransform {
    /// Diagonalizes `kinetic`.
    ///
    /// Diagonal input gives a permutation that sorts the diagonal (the
    /// identity when already ascending). Input diagonalized by the discrete
    /// Fourier transform (any circulant matrix, in particular the ring
    /// hopping) returns the DFT with eigenvalues in DFT index order, which
    /// pins the basis inside degenerate `±k` pairs. Everything else is
    /// diagonalized numerically with ascending eigenvalues.
    pub fn new(kinetic: &KineticMatrix) -> Result<Self> {
        let t = kinetic.entries();
        let m = t.nrows();

        if max_off_diagonal(t) == 0.0 {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| t[(a, a)].re.total_cmp(&t[(b, b)].re));
            let matrix = CMatrix::from_fn(m, m, |i, j| {
                if i == order[j] {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let eigenvalues = order.iter().map(|&k| t[(k, k)].re).collect();
            return Ok(Self {
                matrix,
                eigenvalues,
                is_dft: false,
            });
        }

        let dft = dft_matrix(m);
        let rotated = dft.adjoint() * t * &dft;
        if max_off_diagonal(&rotated) <= 1e-12 {
            let eigenvalues = (0..m).map(|k| rotated[(k, k)].re).collect();
            return Ok(Self {
                matrix: dft,
                eigenvalues,
                is_dft: true,
            });
        }

        let (eigenvalues, matrix) = eigh_sorted(t);
        Ok(Self {
            matrix,
            eigenvalues,
            is_dft: false,
        })
    }

    /// The DFT transform of `m` sites with the given eigenvalues attached.
    pub fn dft(m: usize, eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: eigenvalues.len(),
            });
        }
        Ok(Self {
            matrix: dft_matrix(m),
            eigenvalues,
            is_dft: true,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn is_dft(&self) -> bool {
        self.is_dft
    }

    pub fn sites(&self) -> usize {
        self.matrix.nrows()
    }
}
