//! Dense statevectors and density matrices.
//!
//! Basis index `i` of an `n`-qubit register reads qubit 0 as the most
//! significant bit, so the ket `|q0 q1 ... q(n-1)>` is the binary integer
//! written left to right.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Practical cap for dense simulation.
pub const MAX_QUBITS: usize = 24;

/// Numerical tolerances shared by the simulator and its checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Default tolerance for assertions and report pass/fail decisions.
    pub assertion: f64,
    /// Allowed normalization drift of a statevector.
    pub drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            assertion: 1e-10,
            drift: 1e-12,
        }
    }
}

/// Bit mask of `qubit` inside an `n_qubits` register.
#[inline]
pub fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from explicit amplitudes, rejecting anything that is
    /// not normalized within the default drift tolerance.
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(n_qubits, amps, Tolerances::default().drift)
    }

    pub fn with_tolerance(n_qubits: usize, amps: Vec<Complex64>, tol: f64) -> Result<Self> {
        check_register(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::BadLength {
                expected: 1 << n_qubits,
                got: amps.len(),
            });
        }
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n_qubits: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        check_register(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::BadLength {
                expected: 1 << n_qubits,
                got: amps.len(),
            });
        }
        let norm = norm_sqr(&amps).sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n_qubits, amps })
    }

    pub fn from_real(n_qubits: usize, amps: &[f64]) -> Result<Self> {
        Self::new(n_qubits, amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        if index >= 1 << n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "basis index {index} outside {n_qubits}-qubit register"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Single qubit `a|0> + b|1>`.
    pub fn qubit(a: Complex64, b: Complex64) -> Result<Self> {
        Self::new(1, vec![a, b])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`, with `self` occupying the leading (more significant) qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n_qubits + other.n_qubits;
        check_register(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(Self { n_qubits: n, amps })
    }

    /// `k`-fold tensor product of `self` with itself.
    pub fn tensor_power(&self, k: usize) -> Result<StateVector> {
        if k == 0 {
            return Err(Error::EmptyRegister);
        }
        let mut out = self.clone();
        for _ in 1..k {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    /// Largest amplitude deviation after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        // other ≈ phase * self
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        let d = self.dim();
        let elements = DMatrix::from_fn(d, d, |i, j| self.amps[i] * self.amps[j].conj());
        DensityMatrix {
            n_qubits: self.n_qubits,
            elements,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    elements: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking hermiticity, unit trace and positivity.
    pub fn new(n_qubits: usize, elements: DMatrix<Complex64>) -> Result<Self> {
        check_register(n_qubits)?;
        let d = 1 << n_qubits;
        if elements.nrows() != d || elements.ncols() != d {
            return Err(Error::BadLength {
                expected: d,
                got: elements.nrows(),
            });
        }
        let rho = Self { n_qubits, elements };
        let tol = Tolerances::default().drift;
        if rho.hermiticity_error() > tol {
            return Err(Error::DimensionMismatch("matrix is not Hermitian".into()));
        }
        if (rho.trace().re - 1.0).abs() > tol {
            return Err(Error::NotNormalized(rho.trace().re));
        }
        if rho.min_eigenvalue() < -1e-10 {
            return Err(Error::DimensionMismatch("matrix is not positive semidefinite".into()));
        }
        Ok(rho)
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let d = 1 << n_qubits;
        Ok(Self {
            n_qubits,
            elements: DMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    Complex64::new(1.0 / d as f64, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &DMatrix<Complex64> {
        &self.elements
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elements[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.elements.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.elements[(i, j)] - self.elements[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let eig = nalgebra::SymmetricEigen::new(self.elements.clone());
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Largest element-wise deviation between two matrices of equal size.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .elements
            .iter()
            .zip(other.elements.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Reduction to a subset of qubits. Kept qubits appear in ascending index
/// order in the result, the smallest index being most significant.
pub trait PartialTrace {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix>;
}

impl PartialTrace for StateVector {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let split = Split::new(self.n_qubits, keep)?;
        let dk = 1 << split.kept.len();
        let mut elements = DMatrix::<Complex64>::zeros(dk, dk);
        // group amplitudes by environment index, then accumulate outer products
        let de = 1 << (self.n_qubits - split.kept.len());
        let mut columns = vec![Complex64::new(0.0, 0.0); dk * de];
        for (x, a) in self.amps.iter().enumerate() {
            let (k, e) = split.apply(x);
            columns[e * dk + k] = *a;
        }
        for e in 0..de {
            let col = &columns[e * dk..(e + 1) * dk];
            for i in 0..dk {
                if col[i].norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..dk {
                    elements[(i, j)] += col[i] * col[j].conj();
                }
            }
        }
        Ok(DensityMatrix {
            n_qubits: split.kept.len(),
            elements,
        })
    }
}

impl PartialTrace for DensityMatrix {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let split = Split::new(self.n_qubits, keep)?;
        let dk = 1 << split.kept.len();
        let mut elements = DMatrix::<Complex64>::zeros(dk, dk);
        let d = self.dim();
        let parts: Vec<(usize, usize)> = (0..d).map(|x| split.apply(x)).collect();
        for x in 0..d {
            let (kx, ex) = parts[x];
            for y in 0..d {
                let (ky, ey) = parts[y];
                if ex == ey {
                    elements[(kx, ky)] += self.elements[(x, y)];
                }
            }
        }
        Ok(DensityMatrix {
            n_qubits: split.kept.len(),
            elements,
        })
    }
}

/// `<psi|rho|psi>`.
pub fn fidelity_against_pure(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    if rho.n_qubits() != psi.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "density matrix on {} qubits, state on {}",
            rho.n_qubits(),
            psi.n_qubits()
        )));
    }
    let amps = psi.amps();
    let d = amps.len();
    let mut f = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            f += amps[i].conj() * rho.get(i, j) * amps[j];
        }
    }
    if f.im.abs() > 1e-10 {
        return Err(Error::Inconsistent(format!(
            "fidelity has imaginary part {}",
            f.im
        )));
    }
    Ok(f.re)
}

struct Split {
    n_qubits: usize,
    kept: Vec<usize>,
    traced: Vec<usize>,
}

impl Split {
    fn new(n_qubits: usize, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyRegister);
        }
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        for w in kept.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateQubit(w[0]));
            }
        }
        if let Some(&q) = kept.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
        let traced = (0..n_qubits).filter(|q| !kept.contains(q)).collect();
        Ok(Self {
            n_qubits,
            kept,
            traced,
        })
    }

    fn apply(&self, x: usize) -> (usize, usize) {
        let gather = |qs: &[usize]| {
            qs.iter().fold(0usize, |acc, &q| {
                (acc << 1) | usize::from(x & qubit_mask(self.n_qubits, q) != 0)
            })
        };
        (gather(&self.kept), gather(&self.traced))
    }
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::EmptyRegister);
    }
    if n_qubits > MAX_QUBITS {
        return Err(Error::DimensionMismatch(format!(
            "{n_qubits} qubits exceeds the dense simulation cap of {MAX_QUBITS}"
        )));
    }
    Ok(())
}
