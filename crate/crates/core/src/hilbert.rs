//! Finite-dimensional state arithmetic: pure states as rays, projectors,
//! density operators, convex decompositions and the qubit Bloch sphere.
//!
//! Everything here is immutable after construction. Algebraic identities are
//! held to [`ALG_TOL`].

use nalgebra::DMatrix;
pub use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for algebraic identities (normalization, orthonormality, traces).
pub const ALG_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A normalized vector of amplitudes. Two states describe the same ray when
/// they differ by a global phase; see [`PureState::same_ray`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl TryFrom<Vec<Complex64>> for PureState {
    type Error = Error;

    fn try_from(amplitudes: Vec<Complex64>) -> Result<Self> {
        PureState::new(amplitudes)
    }
}

impl From<PureState> for Vec<Complex64> {
    fn from(s: PureState) -> Self {
        s.amplitudes
    }
}

impl PureState {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidState(format!(
                "dimension must be at least 2, got {}",
                amplitudes.len()
            )));
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > ALG_TOL {
            return Err(Error::InvalidState(format!(
                "squared norm {norm2} is not 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Convenience constructor from real amplitudes (normalized on the way in).
    pub fn from_real(v: &[f64]) -> Result<Self> {
        Self::normalized(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(dim >= 2 && index < dim);
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    /// Haar-random state: a normalized vector of independent complex Gaussians.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(s) = Self::normalized(v) {
                return s;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Equality as rays: `|<a|b>| = 1` within [`ALG_TOL`].
    pub fn same_ray(&self, other: &PureState) -> bool {
        self.dim() == other.dim() && (self.inner_unchecked(other).norm() - 1.0).abs() <= ALG_TOL
    }

    pub fn is_orthogonal(&self, other: &PureState) -> bool {
        self.dim() == other.dim() && self.inner_unchecked(other).norm() <= ALG_TOL
    }

    /// Bloch vector of a qubit state, `|0>` at the north pole.
    pub fn bloch(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        let (a, b) = (self.amplitudes[0], self.amplitudes[1]);
        let c = a.conj() * b;
        let (x, y, z) = (2.0 * c.re, 2.0 * c.im, a.norm_sqr() - b.norm_sqr());
        // renormalize away rounding so the vector is unit to machine precision
        let n = (x * x + y * y + z * z).sqrt();
        Ok(BlochVector {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    /// Inverse of [`PureState::bloch`], up to global phase.
    pub fn from_bloch(n: &BlochVector) -> Result<Self> {
        n.check_unit()?;
        let xy = Complex64::new(n.x, n.y);
        let amplitudes = if n.z >= 0.0 {
            let a = ((1.0 + n.z) / 2.0).sqrt();
            vec![Complex64::new(a, 0.0), xy / (2.0 * a)]
        } else {
            let b = ((1.0 - n.z) / 2.0).sqrt();
            vec![xy.conj() / (2.0 * b), Complex64::new(b, 0.0)]
        };
        Self::normalized(amplitudes)
    }

    /// The orthogonal qubit state (Bloch antipode).
    pub fn qubit_complement(&self) -> Result<Self> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        let (a, b) = (self.amplitudes[0], self.amplitudes[1]);
        Self::normalized(vec![-b.conj(), a.conj()])
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// `|<phi|psi>|^2`. Symmetric in its arguments.
pub fn born_probability(phi: &PureState, psi: &PureState) -> Result<f64> {
    Ok(phi.inner(psi)?.norm_sqr())
}

/// The rank-one projector `|target><target|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    target: PureState,
}

impl Projector {
    pub fn new(target: PureState) -> Self {
        Self { target }
    }

    pub fn target(&self) -> &PureState {
        &self.target
    }

    /// Expectation value in `psi`, which for a projector is a Born probability.
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        born_probability(&self.target, psi)
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        outer(&self.target)
    }
}

fn outer(s: &PureState) -> DMatrix<Complex64> {
    let d = s.dim();
    DMatrix::from_fn(d, d, |i, j| s.amplitudes[i] * s.amplitudes[j].conj())
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = matrix.nrows();
        if d != matrix.ncols() || d < 2 {
            return Err(Error::InvalidState(format!(
                "density operator must be square with dim >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for i in 0..d {
            for j in 0..d {
                if (matrix[(i, j)] - matrix[(j, i)].conj()).norm() > ALG_TOL {
                    return Err(Error::InvalidState("matrix is not Hermitian".into()));
                }
            }
        }
        let trace = matrix.trace();
        if (trace - ONE).norm() > ALG_TOL {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let eig = matrix.clone().symmetric_eigenvalues();
        if let Some(min) = eig.iter().copied().reduce(f64::min) {
            if min < -ALG_TOL {
                return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
            }
        }
        Ok(Self { matrix })
    }

    pub fn pure(state: &PureState) -> Self {
        Self {
            matrix: outer(state),
        }
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        Self {
            matrix: DMatrix::from_diagonal_element(dim, dim, w),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Largest entrywise modulus of the difference.
    pub fn distance(&self, other: &DensityOperator) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok((&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }
}

/// A convex combination of pure states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    components: Vec<(f64, PureState)>,
}

impl Decomposition {
    pub fn new(components: Vec<(f64, PureState)>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidState("empty decomposition".into()))?;
        let dim = first.1.dim();
        let mut total = 0.0;
        for (w, s) in &components {
            check_dims(dim, s.dim())?;
            if !(*w >= 0.0) {
                return Err(Error::InvalidState(format!("negative weight {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > ALG_TOL {
            return Err(Error::WeightsNotNormalized(total));
        }
        Ok(Self { components })
    }

    /// Equal-weight mixture of the vectors of a basis.
    pub fn uniform(basis: &Basis) -> Self {
        let w = 1.0 / basis.dim() as f64;
        Self {
            components: basis.vectors().iter().map(|v| (w, v.clone())).collect(),
        }
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components[0].1.dim()
    }
}

/// `sum_k w_k |psi_k><psi_k|`.
pub fn mix(decomp: &Decomposition) -> Result<DensityOperator> {
    let d = decomp.dim();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for (w, s) in decomp.components() {
        m += outer(s) * Complex64::new(*w, 0.0);
    }
    DensityOperator::new(m)
}

/// A point on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z };
        v.check_unit()?;
        Ok(v)
    }

    /// `(sin t cos p, sin t sin p, cos t)`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    fn check_unit(&self) -> Result<()> {
        let n2 = self.x * self.x + self.y * self.y + self.z * self.z;
        if (n2 - 1.0).abs() > ALG_TOL {
            return Err(Error::InvalidState(format!(
                "Bloch vector has squared norm {n2}"
            )));
        }
        Ok(())
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// An ordered orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Basis {
    vectors: Vec<PureState>,
}

impl Basis {
    pub fn new(vectors: Vec<PureState>) -> Result<Self> {
        let d = vectors
            .first()
            .map(PureState::dim)
            .ok_or_else(|| Error::NotOrthonormal("empty basis".into()))?;
        if vectors.len() != d {
            return Err(Error::NotOrthonormal(format!(
                "{} vectors in dimension {d}",
                vectors.len()
            )));
        }
        for (i, a) in vectors.iter().enumerate() {
            check_dims(d, a.dim())?;
            for b in &vectors[i + 1..] {
                let ov = a.inner_unchecked(b).norm();
                if ov > ALG_TOL {
                    return Err(Error::NotOrthonormal(format!("overlap {ov:.3e}")));
                }
            }
        }
        Ok(Self { vectors })
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            vectors: (0..dim).map(|i| PureState::basis(dim, i)).collect(),
        }
    }

    /// Canonical completion: `first` followed by Gram-Schmidt on the
    /// computational basis vectors, skipping near-dependent ones.
    pub fn completing(first: &PureState) -> Self {
        let d = first.dim();
        let candidates = (0..d).map(|i| PureState::basis(d, i).amplitudes);
        complete(first, candidates)
    }

    /// Completion of `first` by a Haar-random basis of its complement.
    pub fn random_completion<R: Rng + ?Sized>(first: &PureState, rng: &mut R) -> Self {
        let d = first.dim();
        loop {
            let candidates = (0..d - 1).map(|_| PureState::random(d, rng).amplitudes);
            let b = complete(first, candidates);
            if b.vectors.len() == d {
                return b;
            }
        }
    }

    /// Haar-random basis.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let first = PureState::random(dim, rng);
        Self::random_completion(&first, rng)
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    /// Index of the basis vector equal (as a ray) to `state`.
    pub fn position(&self, state: &PureState) -> Option<usize> {
        self.vectors.iter().position(|v| v.same_ray(state))
    }
}

fn complete(first: &PureState, candidates: impl Iterator<Item = Vec<Complex64>>) -> Basis {
    let d = first.dim();
    let mut out = vec![first.clone()];
    for mut v in candidates {
        if out.len() == d {
            break;
        }
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for u in &out {
                let c: Complex64 = u.amplitudes.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(&u.amplitudes) {
                    *x -= c * a;
                }
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            out.push(PureState::normalized(v).expect("nonzero after Gram-Schmidt"));
        }
    }
    Basis { vectors: out }
}
