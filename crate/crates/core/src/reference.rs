//! The 4 x 4 worked instance: a 4-slot time cycle joined with a 4-vertex
//! star centred on vertex 1, carrying a signal with three non-zero joint
//! frequencies.
//!
//! The restricted bases and the signal are the published 4-digit values.
//! Both Laplacians have repeated eigenvalues, so these bases are one valid
//! choice among many and generally differ from what [`crate::eig_sym`]
//! returns.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::bandlimit::SpectralSupport;
use crate::error::Result;
use crate::graph::{cycle_graph, star_graph, Graph};
use crate::spectral::JointSignal;

pub const TIMES: usize = 4;
pub const VERTICES: usize = 4;
pub const STAR_CENTER: usize = 1;

/// Occupied `(j_t, j_g)` pairs, 0-based.
pub const SUPPORT_PAIRS: [(usize, usize); 3] = [(1, 1), (1, 2), (2, 2)];
pub const COEFFICIENTS: [f64; 3] = [0.733, 0.612, 0.517];

#[rustfmt::skip]
const TIME_BASIS: [f64; 8] = [
    0.0,     0.7071,
   -0.7071,  0.0,
    0.0,    -0.7071,
    0.7071,  0.0,
];

#[rustfmt::skip]
const GRAPH_BASIS: [f64; 8] = [
    0.0,     0.8165,
    0.0,     0.0,
   -0.7071, -0.4082,
    0.7071, -0.4082,
];

#[rustfmt::skip]
const SIGNAL: [f64; 16] = [
    0.2985, -0.3533, -0.2985,  0.3533,
    0.0,     0.0,     0.0,     0.0,
   -0.1492,  0.5432,  0.1492, -0.5432,
   -0.1492, -0.1898,  0.1492,  0.1898,
];

pub fn time_graph() -> Graph {
    cycle_graph(TIMES).expect("4-cycle")
}

pub fn vertex_graph() -> Graph {
    star_graph(VERTICES, STAR_CENTER).expect("4-star")
}

pub fn support() -> SpectralSupport {
    SpectralSupport::new(TIMES, VERTICES, SUPPORT_PAIRS).expect("valid support")
}

pub fn coefficients() -> BTreeMap<(usize, usize), f64> {
    SUPPORT_PAIRS.into_iter().zip(COEFFICIENTS).collect()
}

/// Published `Ũ_T` (4 x 2), columns at time frequencies 1 and 2.
pub fn restricted_time_basis() -> DMatrix<f64> {
    DMatrix::from_row_slice(TIMES, 2, &TIME_BASIS)
}

/// Published `Ũ_G` (4 x 2), columns at graph frequencies 1 and 2.
pub fn restricted_graph_basis() -> DMatrix<f64> {
    DMatrix::from_row_slice(VERTICES, 2, &GRAPH_BASIS)
}

/// Published signal, rounded to four digits.
pub fn signal() -> Result<JointSignal> {
    JointSignal::new(DMatrix::from_row_slice(VERTICES, TIMES, &SIGNAL))
}

/// Full time basis: the published columns completed with the constant and
/// alternating eigenvectors of the 4-cycle.
pub fn full_time_basis() -> DMatrix<f64> {
    let r = restricted_time_basis();
    let mut u = DMatrix::zeros(TIMES, TIMES);
    u.column_mut(0).fill(0.5);
    u.set_column(1, &r.column(0));
    u.set_column(2, &r.column(1));
    u.set_column(3, &nalgebra::DVector::from_vec(vec![0.5, -0.5, 0.5, -0.5]));
    u
}

/// Full graph basis: the published columns completed with the constant
/// vector and the eigenvalue-4 eigenvector of the star.
pub fn full_graph_basis() -> DMatrix<f64> {
    let r = restricted_graph_basis();
    let s = 12f64.sqrt();
    let mut u = DMatrix::zeros(VERTICES, VERTICES);
    u.column_mut(0).fill(0.5);
    u.set_column(1, &r.column(0));
    u.set_column(2, &r.column(1));
    u.set_column(3, &nalgebra::DVector::from_vec(vec![-1.0 / s, 3.0 / s, -1.0 / s, -1.0 / s]));
    u
}
