#![allow(dead_code)]

use nalgebra::DMatrix;

/// Published joint spectrum of the worked instance: rows are graph
/// frequencies, columns time frequencies.
pub fn reference_spectrum() -> DMatrix<f64> {
    let mut xf = DMatrix::zeros(4, 4);
    xf[(1, 1)] = 0.733;
    xf[(2, 1)] = 0.612;
    xf[(2, 2)] = 0.517;
    xf
}

/// Published `Ψ'Ũ_J`, rows at `(0,0) (0,2) (1,0) (1,2)`.
#[rustfmt::skip]
pub fn reference_product_rows() -> DMatrix<f64> {
    DMatrix::from_row_slice(4, 3, &[
        0.0,  0.0,     0.5774,
        0.0,  0.0,    -0.2887,
        0.0, -0.5774,  0.0,
        0.5,  0.2887,  0.0,
    ])
}

pub const REFERENCE_SAMPLES: [(usize, usize); 3] = [(0, 0), (1, 0), (1, 2)];
pub const REFERENCE_VALUES: [f64; 3] = [0.2985, -0.3533, 0.5432];

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
