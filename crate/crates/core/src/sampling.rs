//! Sampling sets on the joint time-vertex graph.
//!
//! The central routine is [`critical_sampling_set`], which picks a set of
//! `(t, v)` samples that is simultaneously minimal in the number of samples
//! (`K`), the number of distinct time slots (`K_T`) and the number of distinct
//! vertices (`K_G`):
//!
//! 1. independent rows of the restricted time basis give the time slots
//!    `S_T`, independent rows of the restricted graph basis give the
//!    vertices `S_G`;
//! 2. the rows of the restricted joint basis at `S_T x S_G` form a
//!    `K_T K_G x K` matrix of full column rank;
//! 3. `K` independent rows of that matrix are the samples.
//!
//! Only `K_T K_G` rows of the joint basis are ever touched, instead of all
//! `N T` rows a direct search would scan.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bandlimit::{check_coeffs, SpectralSupport};
use crate::error::{Error, Result};
use crate::linalg::{rank, solve_guarded, RANK_EPS};
use crate::spectral::{kron_columns, JointSignal};

/// Relative residual below which a row counts as dependent.
pub const ROW_EPS: f64 = 1e-9;

/// Indices (ascending) of a maximal set of linearly independent rows,
/// chosen greedily from the top.
///
/// A row is kept when its residual after projecting out the rows already
/// kept exceeds `eps` times its own norm. Zero rows are never kept, and a
/// row whose norm is below `eps` times the largest row norm counts as zero.
pub fn max_lin_indep_rows(m: &DMatrix<f64>, eps: f64) -> Vec<usize> {
    let cols = m.ncols();
    let floor = eps * m.row_iter().map(|r| r.norm()).fold(0.0, f64::max);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(cols);
    let mut picked = Vec::new();
    for i in 0..m.nrows() {
        if basis.len() == cols {
            break;
        }
        let row = m.row(i).transpose();
        let norm = row.norm();
        if norm == 0.0 || norm <= floor {
            continue;
        }
        let mut r = row;
        // two Gram-Schmidt passes keep the basis orthogonal to working precision
        for _ in 0..2 {
            for q in &basis {
                let d = q.dot(&r);
                r.axpy(-d, q, 1.0);
            }
        }
        let res = r.norm();
        if res > eps * norm {
            basis.push(r / res);
            picked.push(i);
        }
    }
    picked
}

/// Restricted bases of a support: `Ũ_T` (`T x K_T`), `Ũ_G` (`N x K_G`) and
/// `Ũ_J` (`NT x K`, one column per support pair in `(j_t, j_g)` order).
#[derive(Clone, Debug)]
pub struct ReducedBases {
    support: SpectralSupport,
    u_t: DMatrix<f64>,
    u_g: DMatrix<f64>,
    u_j: DMatrix<f64>,
}

impl ReducedBases {
    /// From full `T x T` and `N x N` eigenbases.
    pub fn from_full(
        u_t: &DMatrix<f64>,
        u_g: &DMatrix<f64>,
        support: &SpectralSupport,
    ) -> Result<Self> {
        let (rt, rg) = crate::bandlimit::restrict_bases(u_t, u_g, support)?;
        Self::from_restricted(rt, rg, support)
    }

    /// From already restricted bases whose columns follow the support's
    /// ascending time and graph frequencies.
    pub fn from_restricted(
        u_t: DMatrix<f64>,
        u_g: DMatrix<f64>,
        support: &SpectralSupport,
    ) -> Result<Self> {
        let tf = support.time_freqs();
        let gf = support.graph_freqs();
        if u_t.shape() != (support.times(), tf.len()) || u_g.shape() != (support.vertices(), gf.len()) {
            return Err(Error::DimensionMismatch(format!(
                "restricted bases {:?} and {:?} do not fit T={} N={} K_T={} K_G={}",
                u_t.shape(),
                u_g.shape(),
                support.times(),
                support.vertices(),
                tf.len(),
                gf.len()
            )));
        }
        let pos = |list: &[usize], x: usize| list.binary_search(&x).expect("frequency in support");
        let cols: Vec<_> = support
            .pairs()
            .iter()
            .map(|&(a, b)| (pos(&tf, a), pos(&gf, b)))
            .collect();
        let u_j = kron_columns(&u_t, &u_g, cols.into_iter());
        Ok(Self {
            support: support.clone(),
            u_t,
            u_g,
            u_j,
        })
    }

    pub fn support(&self) -> &SpectralSupport {
        &self.support
    }

    pub fn time(&self) -> &DMatrix<f64> {
        &self.u_t
    }

    pub fn graph(&self) -> &DMatrix<f64> {
        &self.u_g
    }

    pub fn joint(&self) -> &DMatrix<f64> {
        &self.u_j
    }

    /// Bandlimited signal `Σ c_(j_t, j_g) ũ_G[:, j_g] ũ_T[:, j_t]^T`.
    pub fn synthesize(&self, coeffs: &BTreeMap<(usize, usize), f64>) -> Result<JointSignal> {
        check_coeffs(&self.support, coeffs)?;
        let c = DVector::from_iterator(
            self.support.k(),
            self.support.pairs().iter().map(|p| coeffs[p]),
        );
        JointSignal::from_vec(self.support.vertices(), self.support.times(), &(&self.u_j * c))
    }

    pub fn critical_plan(&self) -> Result<(SamplingPlan, QualificationReport)> {
        critical_sampling_set(&self.u_t, &self.u_g, &self.u_j, &self.support)
    }
}

/// A set of joint samples `(t, v)`, kept sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SamplingPlan {
    times: usize,
    vertices: usize,
    samples: Vec<(usize, usize)>,
}

impl SamplingPlan {
    pub fn new(
        times: usize,
        vertices: usize,
        samples: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let set: BTreeSet<_> = samples.into_iter().collect();
        if set.is_empty() {
            return Err(Error::Malformed("sampling plan is empty".into()));
        }
        if let Some(&(t, v)) = set.iter().find(|&&(t, v)| t >= times || v >= vertices) {
            return Err(Error::IndexOutOfRange(format!(
                "sample ({t}, {v}) outside T={times}, N={vertices}"
            )));
        }
        Ok(Self {
            times,
            vertices,
            samples: set.into_iter().collect(),
        })
    }

    /// Every joint vertex.
    pub fn full(times: usize, vertices: usize) -> Result<Self> {
        Self::new(times, vertices, (0..times).flat_map(|t| (0..vertices).map(move |v| (t, v))))
    }

    pub fn times(&self) -> usize {
        self.times
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    /// Samples in lexicographic `(t, v)` order.
    pub fn samples(&self) -> &[(usize, usize)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time slots touched by at least one sample.
    pub fn proj_t(&self) -> Vec<usize> {
        let s: BTreeSet<_> = self.samples.iter().map(|p| p.0).collect();
        s.into_iter().collect()
    }

    /// Vertices sampled at least once.
    pub fn proj_g(&self) -> Vec<usize> {
        let s: BTreeSet<_> = self.samples.iter().map(|p| p.1).collect();
        s.into_iter().collect()
    }

    /// Rows of the joint basis (`t * N + v`) hit by the plan.
    pub fn joint_rows(&self) -> Vec<usize> {
        self.samples.iter().map(|&(t, v)| t * self.vertices + v).collect()
    }

    /// Vertex -> time slots at which it is sampled. Vertices that are never
    /// sampled are absent.
    pub fn schedule(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(t, v) in &self.samples {
            out.entry(v).or_default().push(t);
        }
        out
    }

    fn check_dims(&self, support: &SpectralSupport) -> Result<()> {
        if self.times != support.times() || self.vertices != support.vertices() {
            return Err(Error::DimensionMismatch(format!(
                "plan is T={} N={} but support is T={} N={}",
                self.times,
                self.vertices,
                support.times(),
                support.vertices()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualificationReport {
    pub rank: usize,
    pub qualified: bool,
    pub critical: bool,
    pub samples: usize,
    pub time_slots: usize,
    pub vertices: usize,
    pub k: usize,
    pub k_t: usize,
    pub k_g: usize,
}

fn check_joint_shape(u_j: &DMatrix<f64>, support: &SpectralSupport) -> Result<()> {
    let rows = support.times() * support.vertices();
    if u_j.shape() != (rows, support.k()) {
        return Err(Error::DimensionMismatch(format!(
            "joint basis is {:?}, expected ({rows}, {})",
            u_j.shape(),
            support.k()
        )));
    }
    Ok(())
}

/// Rank of the joint basis restricted to the plan's rows, and whether the
/// plan meets the three lower bounds `|S| >= K`, `|S_T| >= K_T`,
/// `|S_G| >= K_G` with equality.
pub fn qualify(
    plan: &SamplingPlan,
    u_j: &DMatrix<f64>,
    support: &SpectralSupport,
) -> Result<QualificationReport> {
    plan.check_dims(support)?;
    check_joint_shape(u_j, support)?;
    let rows = u_j.select_rows(&plan.joint_rows());
    let r = rank(&rows, RANK_EPS);
    let (k, k_t, k_g) = (support.k(), support.k_t(), support.k_g());
    let (s, st, sg) = (plan.len(), plan.proj_t().len(), plan.proj_g().len());
    let qualified = r == k;
    Ok(QualificationReport {
        rank: r,
        qualified,
        critical: qualified && s == k && st == k_t && sg == k_g,
        samples: s,
        time_slots: st,
        vertices: sg,
        k,
        k_t,
        k_g,
    })
}

/// Builds a critical sampling set from the restricted time, graph and joint
/// bases and qualifies it. See the module docs for the three steps.
pub fn critical_sampling_set(
    u_t: &DMatrix<f64>,
    u_g: &DMatrix<f64>,
    u_j: &DMatrix<f64>,
    support: &SpectralSupport,
) -> Result<(SamplingPlan, QualificationReport)> {
    let plan = critical_samples(u_t, u_g, u_j, support)?;
    let report = qualify(&plan, u_j, support)?;
    Ok((plan, report))
}

/// The selection itself, without the final qualification pass.
pub fn critical_samples(
    u_t: &DMatrix<f64>,
    u_g: &DMatrix<f64>,
    u_j: &DMatrix<f64>,
    support: &SpectralSupport,
) -> Result<SamplingPlan> {
    let (t, n) = (support.times(), support.vertices());
    let (k, k_t, k_g) = (support.k(), support.k_t(), support.k_g());
    if u_t.shape() != (t, k_t) || u_g.shape() != (n, k_g) {
        return Err(Error::DimensionMismatch(format!(
            "restricted bases {:?} and {:?}, expected ({t}, {k_t}) and ({n}, {k_g})",
            u_t.shape(),
            u_g.shape()
        )));
    }
    check_joint_shape(u_j, support)?;

    let s_t = max_lin_indep_rows(u_t, ROW_EPS);
    if s_t.len() != k_t {
        return Err(Error::RankDeficient {
            step: "time-slot selection",
            rank: s_t.len(),
            expected: k_t,
        });
    }
    let s_g = max_lin_indep_rows(u_g, ROW_EPS);
    if s_g.len() != k_g {
        return Err(Error::RankDeficient {
            step: "vertex selection",
            rank: s_g.len(),
            expected: k_g,
        });
    }

    let product: Vec<(usize, usize)> = s_t
        .iter()
        .flat_map(|&a| s_g.iter().map(move |&b| (a, b)))
        .collect();
    let rows: Vec<usize> = product.iter().map(|&(a, b)| a * n + b).collect();
    let reduced = u_j.select_rows(&rows);

    let picked = max_lin_indep_rows(&reduced, ROW_EPS);
    if picked.len() != k {
        return Err(Error::RankDeficient {
            step: "joint selection on S_T x S_G",
            rank: picked.len(),
            expected: k,
        });
    }
    SamplingPlan::new(t, n, picked.into_iter().map(|i| product[i]))
}

/// The rows of `Ũ_J` at `S_T x S_G`, in lexicographic `(t, v)` order, along
/// with that product set. Exposed for inspection of step 2.
pub fn product_rows(
    u_t: &DMatrix<f64>,
    u_g: &DMatrix<f64>,
    u_j: &DMatrix<f64>,
) -> (Vec<(usize, usize)>, DMatrix<f64>) {
    let n = u_g.nrows();
    let s_t = max_lin_indep_rows(u_t, ROW_EPS);
    let s_g = max_lin_indep_rows(u_g, ROW_EPS);
    let product: Vec<(usize, usize)> = s_t
        .iter()
        .flat_map(|&a| s_g.iter().map(move |&b| (a, b)))
        .collect();
    let rows: Vec<usize> = product.iter().map(|&(a, b)| a * n + b).collect();
    (product, u_j.select_rows(&rows))
}

/// Independent rows of the whole `NT x K` joint basis, without exploiting
/// its Kronecker structure. Qualified, but usually not critical.
pub fn naive_sampling_set(u_j: &DMatrix<f64>, support: &SpectralSupport) -> Result<SamplingPlan> {
    check_joint_shape(u_j, support)?;
    let n = support.vertices();
    let rows = max_lin_indep_rows(u_j, ROW_EPS);
    SamplingPlan::new(support.times(), n, rows.into_iter().map(|r| (r / n, r % n)))
}

/// Separate sampling: every pair of `S_T x S_G`, `K_T K_G` samples in all.
pub fn separate_sampling(u_t: &DMatrix<f64>, u_g: &DMatrix<f64>) -> Result<SamplingPlan> {
    let s_t = max_lin_indep_rows(u_t, ROW_EPS);
    let s_g = max_lin_indep_rows(u_g, ROW_EPS);
    SamplingPlan::new(
        u_t.nrows(),
        u_g.nrows(),
        s_t.iter().flat_map(|&a| s_g.iter().map(move |&b| (a, b))),
    )
}

/// Signal values at the plan's samples, in plan order.
pub fn sample(x: &JointSignal, plan: &SamplingPlan) -> Result<Vec<f64>> {
    if x.times() != plan.times || x.vertices() != plan.vertices {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} signal against plan for N={} T={}",
            x.vertices(),
            x.times(),
            plan.vertices,
            plan.times
        )));
    }
    Ok(plan.samples.iter().map(|&(t, v)| x.matrix()[(v, t)]).collect())
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub signal: JointSignal,
    /// Recovered non-zero spectral coefficients in support order.
    pub coefficients: DVector<f64>,
}

/// Recovers the full signal from its samples.
///
/// With exactly `K` samples the square system `(Ψ Ũ_J) c = y` is solved;
/// with more, the normal equations. Either way the result is `Ũ_J c`.
pub fn reconstruct(
    values: &[f64],
    plan: &SamplingPlan,
    u_j: &DMatrix<f64>,
    support: &SpectralSupport,
) -> Result<Reconstruction> {
    plan.check_dims(support)?;
    check_joint_shape(u_j, support)?;
    if values.len() != plan.len() {
        return Err(Error::Malformed(format!(
            "{} sample values for a plan of {} samples",
            values.len(),
            plan.len()
        )));
    }
    let m = u_j.select_rows(&plan.joint_rows());
    let k = support.k();
    let r = rank(&m, RANK_EPS);
    if r < k {
        return Err(Error::Unqualified { rank: r, k });
    }
    let y = DVector::from_column_slice(values);
    let coefficients = if plan.len() == k {
        solve_guarded(&m, &y)?
    } else {
        solve_guarded(&m.tr_mul(&m), &m.tr_mul(&y))?
    };
    let x = u_j * &coefficients;
    Ok(Reconstruction {
        signal: JointSignal::from_vec(support.vertices(), support.times(), &x)?,
        coefficients,
    })
}
