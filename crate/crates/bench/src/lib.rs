//! Fixture systems shared by the kernel benchmarks.

use sadim_core::{AffineIFS, Matrix};

pub fn diagonal_pair() -> AffineIFS {
    AffineIFS::linear(vec![
        Matrix::from_row_slice(2, 2, &[0.4, 0.0, 0.0, 0.2]),
        Matrix::from_row_slice(2, 2, &[0.3, 0.0, 0.0, 0.25]),
    ])
    .expect("valid system")
}

pub fn generic_planar() -> AffineIFS {
    AffineIFS::linear(vec![
        Matrix::from_row_slice(2, 2, &[0.3, 0.1, -0.05, 0.2]),
        Matrix::from_row_slice(2, 2, &[0.25, -0.1, 0.1, 0.3]),
        Matrix::from_row_slice(2, 2, &[0.1, 0.0, 0.2, 0.35]),
    ])
    .expect("valid system")
}

pub fn generic_spatial() -> AffineIFS {
    AffineIFS::linear(vec![
        Matrix::from_row_slice(3, 3, &[0.3, 0.1, 0.0, -0.05, 0.2, 0.1, 0.0, 0.05, 0.25]),
        Matrix::from_row_slice(3, 3, &[0.25, -0.1, 0.05, 0.1, 0.3, 0.0, 0.02, 0.0, 0.2]),
    ])
    .expect("valid system")
}
