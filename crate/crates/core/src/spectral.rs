//! Dense symmetric eigendecomposition by cyclic Jacobi rotations, and
//! quadratic forms.

use crate::error::{Error, Result};
use crate::numeric::KahanSum;

/// Symmetry tolerance accepted at construction.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default stopping tolerance on the off-diagonal Frobenius mass.
pub const DEFAULT_JACOBI_TOL: f64 = 1e-12;

/// Sweep cap for [`jacobi_eigh`].
pub const MAX_SWEEPS: usize = 100;

/// A dense real symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = v;
        }
        m
    }

    /// Builds a matrix from row-major data, checking that it is square and
    /// symmetric within [`SYMMETRY_TOL`]. The stored matrix is the exact
    /// symmetric part `(A + Aᵀ)/2`.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let mut m = Self { dim, data };
        for r in 0..dim {
            for c in r + 1..dim {
                let (a, b) = (m.get(r, c), m.get(c, r));
                if (a - b).abs() > SYMMETRY_TOL {
                    return Err(Error::NotSymmetric { row: r, col: c });
                }
                let mid = 0.5 * (a + b);
                m.data[r * dim + c] = mid;
                m.data[c * dim + r] = mid;
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(dim, data)
    }

    /// Builds the matrix from `f(r, c)` evaluated on the upper triangle.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in r..dim {
                let v = f(r, c);
                m.data[r * dim + c] = v;
                m.data[c * dim + r] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.dim + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `A + cI`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.data[i * self.dim + i] += c;
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        Ok((0..self.dim)
            .map(|r| {
                let mut acc = KahanSum::new();
                acc.extend(self.row(r).iter().zip(v).map(|(a, b)| a * b));
                acc.value()
            })
            .collect())
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: v.len(),
            });
        }
        Ok(())
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    sweeps: usize,
}

impl EigenDecomposition {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Unit eigenvector paired with `values()[m]`.
    pub fn vector(&self, m: usize) -> &[f64] {
        &self.vectors[m]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// `max_m ‖A v_m − λ_m v_m‖∞`.
    pub fn max_residual(&self, a: &SymmetricMatrix) -> f64 {
        self.values
            .iter()
            .zip(&self.vectors)
            .map(|(&lambda, v)| {
                let av = a.mul_vec(v).expect("eigenvectors match the matrix size");
                av.iter()
                    .zip(v)
                    .map(|(x, y)| (x - lambda * y).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `max_{m,l} |⟨v_m, v_l⟩ − δ_{ml}|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (m, a) in self.vectors.iter().enumerate() {
            for (l, b) in self.vectors.iter().enumerate().skip(m) {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let expected = if m == l { 1.0 } else { 0.0 };
                worst = worst.max((dot - expected).abs());
            }
        }
        worst
    }

    /// `V Λ Vᵀ`.
    pub fn reconstruct(&self) -> SymmetricMatrix {
        let dim = self.values.len();
        SymmetricMatrix::from_fn(dim, |r, c| {
            self.values
                .iter()
                .zip(&self.vectors)
                .map(|(l, v)| l * v[r] * v[c])
                .sum()
        })
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps over all pairs `p < q` until the off-diagonal Frobenius mass is at
/// most `tol · max(1, ‖A‖_F)`, for at most [`MAX_SWEEPS`] sweeps. Eigenvalues
/// are sorted descending; equal eigenvalues keep the order in which they sit
/// on the diagonal of the converged matrix.
pub fn jacobi_eigh(m: &SymmetricMatrix, tol: f64) -> Result<EigenDecomposition> {
    jacobi_capped(m, tol, MAX_SWEEPS)
}

fn jacobi_capped(m: &SymmetricMatrix, tol: f64, max_sweeps: usize) -> Result<EigenDecomposition> {
    assert!(tol > 0.0, "Jacobi tolerance must be positive");
    let n = m.dim();
    let mut a = m.data.clone();
    let mut v = SymmetricMatrix::identity(n).data;
    let threshold = tol * m.frobenius_norm().max(1.0);

    let off_mass = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += a[r * n + c] * a[r * n + c];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let residual = off_mass(&a);
        if residual <= threshold {
            break;
        }
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence { sweeps, residual });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let g = 100.0 * apq.abs();
                if sweeps > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                } else {
                    0.0
                };
                if t == 0.0 {
                    // |apq| is negligible against the diagonal gap.
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
        .collect();
    Ok(EigenDecomposition {
        values,
        vectors,
        sweeps,
    })
}

/// Top eigenpair, with the eigenvector's sign fixed so that its
/// largest-magnitude entry (first one on ties) is positive.
pub fn max_eigenpair(m: &SymmetricMatrix) -> Result<(f64, Vec<f64>)> {
    if m.dim() == 0 {
        return Err(Error::InvalidSize("empty matrix has no eigenpair".into()));
    }
    let eig = jacobi_eigh(m, DEFAULT_JACOBI_TOL)?;
    let mut v = eig.vectors[0].clone();
    fix_sign(&mut v);
    Ok((eig.values[0], v))
}

pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut lead = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[lead].abs() {
            lead = i;
        }
    }
    if v[lead] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// `vᵀ A v` with compensated summation.
pub fn quadratic_form(m: &SymmetricMatrix, v: &[f64]) -> Result<f64> {
    m.check_len(v)?;
    let mut acc = KahanSum::new();
    for r in 0..m.dim() {
        if v[r] == 0.0 {
            continue;
        }
        for (c, a) in m.row(r).iter().enumerate() {
            acc.add(v[r] * a * v[c]);
        }
    }
    Ok(acc.value())
}
