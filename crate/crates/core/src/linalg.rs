//! Dense complex matrices shared by the ZX semantics and the simulators.
//!
//! Qubit `q` of a register always corresponds to bit `q` of a basis index
//! (little-endian), both for matrix rows/columns and for statevectors.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;

pub const fn c64(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

/// A linear map `2^inputs -> 2^outputs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    matrix: DMatrix<C64>,
}

impl LinearMap {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Self {
        LinearMap { matrix }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        LinearMap {
            matrix: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        LinearMap {
            matrix: DMatrix::identity(d, d),
        }
    }

    /// Row-major construction.
    pub fn from_rows(rows: usize, cols: usize, data: &[C64]) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows*cols");
        LinearMap {
            matrix: DMatrix::from_row_slice(rows, cols, data),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn scale(&self, s: C64) -> LinearMap {
        LinearMap {
            matrix: self.matrix.map(|z| z * s),
        }
    }

    /// `self · rhs`
    pub fn compose(&self, rhs: &LinearMap) -> LinearMap {
        LinearMap {
            matrix: &self.matrix * &rhs.matrix,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Elementwise `max |a - b|`.
    pub fn max_diff(&self, other: &LinearMap) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Same map rescaled so that its largest-magnitude entry has modulus 1.
    pub fn normalized(&self) -> LinearMap {
        let m = self.max_abs();
        if m == 0.0 {
            self.clone()
        } else {
            self.scale(c64(1.0 / m, 0.0))
        }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let (r, c) = self.shape();
        if r != c {
            return false;
        }
        let prod = self.matrix.adjoint() * &self.matrix;
        let id = DMatrix::<C64>::identity(r, c);
        prod.iter().zip(id.iter()).all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// Picks `λ` from the largest-magnitude entry of `b` and returns
/// `‖a − λ·b‖_max`, or `None` when `b` is zero but `a` is not.
pub fn scalar_deviation(a: &LinearMap, b: &LinearMap) -> Option<f64> {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    let (idx, pivot) = b
        .matrix
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .map(|(i, z)| (i, *z))
        .unwrap_or((0, c64(0.0, 0.0)));
    if pivot.norm() == 0.0 {
        return if a.max_abs() == 0.0 { Some(0.0) } else { None };
    }
    let lambda = a.matrix.as_slice()[idx] / pivot;
    let dev = a
        .matrix
        .iter()
        .zip(b.matrix.iter())
        .map(|(x, y)| (x - lambda * y).norm())
        .fold(0.0, f64::max);
    Some(dev)
}

/// True iff some nonzero `λ` gives `‖a − λ·b‖_max ≤ tol`.
pub fn equal_up_to_scalar(a: &LinearMap, b: &LinearMap, tol: f64) -> bool {
    match scalar_deviation(a, b) {
        Some(d) => d <= tol && !(a.max_abs() == 0.0 && b.max_abs() != 0.0),
        None => false,
    }
}

/// Scale-free variant: both maps are normalized to unit max-entry first.
pub fn proportional(a: &LinearMap, b: &LinearMap, tol: f64) -> bool {
    equal_up_to_scalar(&a.normalized(), &b.normalized(), tol)
}

/// Kronecker product with `high` acting on the more significant qubits.
pub fn kron(high: &LinearMap, low: &LinearMap) -> LinearMap {
    LinearMap {
        matrix: high.matrix.kronecker(&low.matrix),
    }
}

pub fn pauli_x() -> LinearMap {
    let o = c64(0.0, 0.0);
    let l = c64(1.0, 0.0);
    LinearMap::from_rows(2, 2, &[o, l, l, o])
}

pub fn pauli_z() -> LinearMap {
    let o = c64(0.0, 0.0);
    let l = c64(1.0, 0.0);
    LinearMap::from_rows(2, 2, &[l, o, o, -l])
}

pub fn hadamard() -> LinearMap {
    let h = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    LinearMap::from_rows(2, 2, &[h, h, h, -h])
}
