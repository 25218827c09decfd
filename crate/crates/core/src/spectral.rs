//! Symmetric eigendecomposition and the graph / joint time-vertex Fourier
//! transforms built on it.

use nalgebra::{DMatrix, DVector};

use crate::bandlimit::SpectralSupport;
use crate::error::{Error, Result};
use crate::graph::Laplacian;

const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Orthonormal eigenvectors (as columns) with ascending eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenBasis {
    vectors: DMatrix<f64>,
    values: Vec<f64>,
}

impl EigenBasis {
    /// Builds a basis from externally supplied vectors, e.g. a hand-picked
    /// basis inside a degenerate eigenspace. Only shapes are checked.
    pub fn from_parts(vectors: DMatrix<f64>, values: Vec<f64>) -> Result<Self> {
        if vectors.nrows() != vectors.ncols() || vectors.ncols() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "basis is {}x{} with {} eigenvalues",
                vectors.nrows(),
                vectors.ncols(),
                values.len()
            )));
        }
        Ok(Self { vectors, values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps over the strict upper triangle in row order until the off-diagonal
/// Frobenius norm drops below `1e-12 * ||L||_F`. Each eigenvector is flipped
/// so that its largest-magnitude entry is positive (lowest index on ties).
pub fn eig_sym(l: &Laplacian) -> Result<EigenBasis> {
    eig_sym_matrix(l.matrix())
}

pub fn eig_sym_matrix(m: &DMatrix<f64>) -> Result<EigenBasis> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of non-square {}x{} matrix",
            n,
            m.ncols()
        )));
    }
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let threshold = OFF_DIAGONAL_TOL * m.norm();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).into_owned();
        fix_sign(&mut col);
        vectors.set_column(dst, &col);
    }
    Ok(EigenBasis { vectors, values })
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.nrows();

    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn fix_sign(col: &mut DVector<f64>) {
    let peak = col.amax();
    if peak == 0.0 {
        return;
    }
    // entries within rounding of the peak count as ties
    let lead = col
        .iter()
        .position(|x| x.abs() >= peak * (1.0 - 1e-9))
        .unwrap_or(0);
    if col[lead] < 0.0 {
        col.neg_mut();
    }
}

/// Joint time-vertex signal stored as an `N x T` matrix: row `v` is vertex
/// `v` over time, column `t` is the graph signal at instant `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointSignal(DMatrix<f64>);

impl JointSignal {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Malformed("signal contains non-finite values".into()));
        }
        Ok(Self(x))
    }

    /// Rebuilds the matrix from `vec(X)`, columns stacked.
    pub fn from_vec(n: usize, t: usize, x: &DVector<f64>) -> Result<Self> {
        if x.len() != n * t {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} cannot fill a {n}x{t} signal",
                x.len()
            )));
        }
        Self::new(DMatrix::from_column_slice(n, t, x.as_slice()))
    }

    pub fn vertices(&self) -> usize {
        self.0.nrows()
    }

    pub fn times(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// `vec(X)`: entry `(v, t)` lands at index `t * N + v`.
    pub fn vec(&self) -> DVector<f64> {
        DVector::from_column_slice(self.0.as_slice())
    }
}

pub fn gft(basis: &EigenBasis, x: &DVector<f64>) -> Result<DVector<f64>> {
    check_len(basis.dim(), x.len())?;
    Ok(basis.vectors.tr_mul(x))
}

pub fn igft(basis: &EigenBasis, xf: &DVector<f64>) -> Result<DVector<f64>> {
    check_len(basis.dim(), xf.len())?;
    Ok(&basis.vectors * xf)
}

fn check_len(dim: usize, len: usize) -> Result<()> {
    if dim != len {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {len} against basis of dimension {dim}"
        )));
    }
    Ok(())
}

/// `X_f = U_G^T X U_T`; rows index graph frequencies, columns time frequencies.
pub fn jft(u_t: &EigenBasis, u_g: &EigenBasis, x: &JointSignal) -> Result<DMatrix<f64>> {
    check_joint(u_t, u_g, x.vertices(), x.times())?;
    Ok(u_g.vectors.tr_mul(&x.0) * &u_t.vectors)
}

pub fn ijft(u_t: &EigenBasis, u_g: &EigenBasis, xf: &DMatrix<f64>) -> Result<JointSignal> {
    check_joint(u_t, u_g, xf.nrows(), xf.ncols())?;
    JointSignal::new(&u_g.vectors * xf * u_t.vectors.transpose())
}

fn check_joint(u_t: &EigenBasis, u_g: &EigenBasis, n: usize, t: usize) -> Result<()> {
    if u_g.dim() != n || u_t.dim() != t {
        return Err(Error::DimensionMismatch(format!(
            "{n}x{t} signal against graph basis {} and time basis {}",
            u_g.dim(),
            u_t.dim()
        )));
    }
    Ok(())
}

/// Columns of `U_T ⊗ U_G` picked out by `support`, in the support's
/// `(j_t, j_g)` order, without forming the full Kronecker product.
pub fn joint_basis_columns(
    u_t: &DMatrix<f64>,
    u_g: &DMatrix<f64>,
    support: &SpectralSupport,
) -> Result<DMatrix<f64>> {
    let (t, n) = (u_t.nrows(), u_g.nrows());
    if support.times() != t || support.vertices() != n {
        return Err(Error::DimensionMismatch(format!(
            "support is {}x{} (T x N) but bases are {}x{}",
            support.times(),
            support.vertices(),
            t,
            n
        )));
    }
    for &(jt, jg) in support.pairs() {
        if jt >= u_t.ncols() || jg >= u_g.ncols() {
            return Err(Error::IndexOutOfRange(format!(
                "frequency pair ({jt}, {jg}) outside {}x{} bases",
                u_t.ncols(),
                u_g.ncols()
            )));
        }
    }
    Ok(kron_columns(u_t, u_g, support.pairs().iter().copied()))
}

/// Column `k` is `u_t[:, a_k] ⊗ u_g[:, b_k]` for the `k`-th index pair.
pub(crate) fn kron_columns(
    u_t: &DMatrix<f64>,
    u_g: &DMatrix<f64>,
    pairs: impl ExactSizeIterator<Item = (usize, usize)>,
) -> DMatrix<f64> {
    let (t, n) = (u_t.nrows(), u_g.nrows());
    let mut out = DMatrix::zeros(n * t, pairs.len());
    for (k, (a, b)) in pairs.enumerate() {
        let mut col = out.column_mut(k);
        for tt in 0..t {
            let s = u_t[(tt, a)];
            for v in 0..n {
                col[tt * n + v] = s * u_g[(v, b)];
            }
        }
    }
    out
}

/// Dense Kronecker product, for tests and small reference computations.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}
