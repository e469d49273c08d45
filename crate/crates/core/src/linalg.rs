//! Small dense complex matrices and a cyclic Jacobi eigensolver for the
//! Hermitian case.
//!
//! Fiber matrices have order `ν` (the number of vertex classes), which stays
//! in the tens, so everything here is plain row-major storage and `O(ν³)`
//! sweeps.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FiberMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl FiberMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Order of a square matrix.
    pub fn order(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `A + cI`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] += c;
        }
        m
    }

    /// Leading principal submatrix of order `k`.
    pub fn leading(&self, k: usize) -> Self {
        Self::from_fn(k, k, |i, j| self[(i, j)])
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise `|A_ij − conj(A_ji)|`, including imaginary diagonals.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `⟨A x, x⟩ = x^* A x`.
    pub fn quadratic_form(&self, x: &[Complex64]) -> Complex64 {
        self.mul_vec(x)
            .iter()
            .zip(x)
            .map(|(ax, xi)| ax * xi.conj())
            .sum()
    }

    pub fn eigen(&self) -> Result<EigenDecomposition> {
        jacobi(self, true)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        jacobi(self, false).map(|e| e.values)
    }
}

impl std::ops::Index<(usize, usize)> for FiberMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for FiberMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &FiberMatrix {
    type Output = FiberMatrix;
    fn add(self, rhs: &FiberMatrix) -> FiberMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        FiberMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &FiberMatrix {
    type Output = FiberMatrix;
    fn sub(self, rhs: &FiberMatrix) -> FiberMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        FiberMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &FiberMatrix {
    type Output = FiberMatrix;
    fn mul(self, rhs: &FiberMatrix) -> FiberMatrix {
        assert_eq!(self.cols, rhs.rows);
        FiberMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum()
        })
    }
}

/// Eigenvalues in ascending order; eigenvectors are the matching columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: FiberMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }
}

fn off_diagonal_max(a: &FiberMatrix) -> f64 {
    let n = a.rows;
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// Cyclic Jacobi with complex Givens rotations.
///
/// Each rotation first removes the phase of `a_pq` and then applies the real
/// symmetric Jacobi rotation, so `a_pq` is annihilated exactly. Sweeps stop
/// once every off-diagonal entry is below `1e-13 · ‖A‖_F`.
pub fn jacobi(input: &FiberMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    assert_eq!(input.rows, input.cols, "eigenproblem needs a square matrix");
    let n = input.rows;
    let scale = input.max_abs().max(1.0);
    let deviation = input.hermitian_deviation();
    if deviation > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation });
    }

    // start from the exactly Hermitian part
    let mut a = FiberMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(input[(i, i)].re, 0.0)
        } else if i < j {
            (input[(i, j)] + input[(j, i)].conj()) * 0.5
        } else {
            (input[(j, i)] + input[(i, j)].conj()).conj() * 0.5
        }
    });
    let mut v = if want_vectors {
        FiberMatrix::identity(n)
    } else {
        FiberMatrix::zeros(0, 0)
    };
    let threshold = OFF_DIAGONAL_TOL * a.frobenius();

    let mut sweeps = 0;
    while off_diagonal_max(&a) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off_diagonal_max(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let phase = apq / g; // e^{iα}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = diag(1, e^{-iα}) · [[c, s], [-s, c]] in the (p, q) plane
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * jqp;
                    a[(k, q)] = akp * s + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * jqp.conj();
                    a[(q, k)] = apk * s + aqk * jqq.conj();
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(app - t * g, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * g, 0.0);
                if want_vectors {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c + vkq * jqp;
                        v[(k, q)] = vkp * s + vkq * jqq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    if !want_vectors {
        return Ok(EigenDecomposition {
            values,
            vectors: FiberMatrix::zeros(0, 0),
        });
    }
    let vectors = FiberMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);

    let tol = RESIDUAL_TOL * input.frobenius().max(1.0);
    for (k, &lambda) in values.iter().enumerate() {
        let x = vectors.column(k);
        let ax = input.mul_vec(&x);
        let residual = ax
            .iter()
            .zip(&x)
            .map(|(y, xi)| (y - xi * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > tol {
            return Err(Error::NoConvergence { sweeps, residual });
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenvalues of a real symmetric matrix given row-wise.
pub fn symmetric_eigenvalues(m: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = m.len();
    FiberMatrix::from_fn(n, n, |i, j| Complex64::new(m[i][j], 0.0)).eigenvalues()
}

/// Inverse of a small real matrix by Gauss–Jordan with partial pivoting.
pub fn invert_real(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[p][col] == 0.0 {
            return None;
        }
        a.swap(col, p);
        let pivot = a[col][col];
        a[col].iter_mut().for_each(|x| *x /= pivot);
        let prow = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col];
                row.iter_mut().zip(&prow).for_each(|(x, y)| *x -= f * y);
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let m = FiberMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        assert_eq!(m.eigenvalues().unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2
        let m = FiberMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(0.0, 1.0),
            (1, 0) => c(0.0, -1.0),
            _ => c(1.0, 0.0),
        });
        let e = m.eigen().unwrap();
        assert!((e.values[0]).abs() < 1e-15);
        assert!((e.values[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = FiberMatrix::from_fn(2, 2, |i, j| if i < j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert!(matches!(m.eigen(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigenvectors_are_unitary() {
        let m = FiberMatrix::from_fn(4, 4, |i, j| {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            let im = if i < j {
                0.3 * (a + 1.0)
            } else if i > j {
                -0.3 * (a + 1.0)
            } else {
                0.0
            };
            c(1.0 / (1.0 + a + b), im)
        });
        let e = m.eigen().unwrap();
        let gram = &e.vectors.adjoint() * &e.vectors;
        assert!((&gram - &FiberMatrix::identity(4)).max_abs() < 1e-13);
    }

    #[test]
    fn empty_and_scalar() {
        assert!(FiberMatrix::zeros(0, 0).eigenvalues().unwrap().is_empty());
        assert_eq!(
            FiberMatrix::from_real_diagonal(&[-4.5])
                .eigenvalues()
                .unwrap(),
            vec![-4.5]
        );
    }

    #[test]
    fn real_inverse() {
        let m = vec![vec![4.0, 1.0], vec![2.0, 3.0]];
        let inv = invert_real(&m).unwrap();
        assert!((inv[0][0] - 0.3).abs() < 1e-15);
        assert!((inv[1][0] + 0.2).abs() < 1e-15);
        assert!(invert_real(&[vec![1.0, 2.0], vec![2.0, 4.0]]).is_none());
    }
}
