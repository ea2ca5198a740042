//! Reference eigensolver for small dense symmetric matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hamiltonian::check_dense;

/// Ascending eigenvalues with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct DenseSpectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl DenseSpectrum {
    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }
}

/// Full symmetric diagonalization, eigenvalues ascending.
pub fn dense_oracle(matrix: &DMatrix<f64>) -> Result<DenseSpectrum> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::Dimension {
            expected: matrix.nrows(),
            got: matrix.ncols(),
        });
    }
    check_dense(matrix.nrows())?;
    let eig = SymmetricEigen::new(matrix.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(matrix.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Ok(DenseSpectrum { values, vectors })
}

/// Eigenvalues only.
pub fn dense_eigenvalues(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_dense(matrix.nrows())?;
    let mut values: Vec<f64> = matrix.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `det(M − λI)` by LU factorization.
pub fn dense_char_poly(matrix: &DMatrix<f64>, lambda: f64) -> Result<f64> {
    check_dense(matrix.nrows())?;
    let shifted = matrix - DMatrix::<f64>::identity(matrix.nrows(), matrix.ncols()) * lambda;
    Ok(shifted.lu().determinant())
}
