//! Brute-force checks of the sampling theory on tiny instances.
//!
//! Every sample subset up to a size bound is enumerated and its rank is
//! computed with a plain row-echelon routine kept separate from the one the
//! sampling module uses.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bandlimit::SpectralSupport;
use crate::error::{Error, Result};
use crate::par::Execution;

pub const MAX_JOINT_VERTICES: usize = 20;

const ORACLE_EPS: f64 = 1e-9;

/// A qualified set that breaks one of the lower bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub samples: Vec<(usize, usize)>,
    pub bound: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveReport {
    /// Smallest qualified subset size found, `None` if nothing up to the size
    /// bound is qualified.
    pub min_qualified_size: Option<usize>,
    pub count_qualified_at_k: u64,
    pub bound_violations: Vec<Violation>,
    pub exists_critical_set: bool,
    pub subsets_checked: u64,
    pub k: usize,
    pub k_t: usize,
    pub k_g: usize,
}

#[derive(Default)]
struct Tally {
    min: Option<usize>,
    at_k: u64,
    violations: Vec<(u64, &'static str)>,
    critical: bool,
    checked: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.min = match (self.min, other.min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.at_k += other.at_k;
        self.violations.extend(other.violations);
        self.critical |= other.critical;
        self.checked += other.checked;
        self
    }
}

/// Row-echelon rank with partial pivoting on a copy of `rows`.
pub fn elimination_rank(mut rows: Vec<Vec<f64>>) -> usize {
    let Some(cols) = rows.first().map(Vec::len) else {
        return 0;
    };
    let peak = rows.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return 0;
    }
    let tol = ORACLE_EPS * peak;
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows.len() {
            break;
        }
        let (best, val) = (rank..rows.len())
            .map(|r| (r, rows[r][c].abs()))
            .fold((rank, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        rows.swap(rank, best);
        for r in rank + 1..rows.len() {
            let f = rows[r][c] / rows[rank][c];
            if f != 0.0 {
                for j in c..cols {
                    rows[r][j] -= f * rows[rank][j];
                }
            }
        }
        rank += 1;
    }
    rank
}

fn rows_of(u_j: &DMatrix<f64>, idx: impl Iterator<Item = usize>) -> Vec<Vec<f64>> {
    idx.map(|i| u_j.row(i).iter().copied().collect()).collect()
}

fn mask_rows(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |b| mask >> b & 1 == 1)
}

/// Whether the joint rows in `samples` (as `(t, v)`) have rank `K`, using
/// the oracle's own elimination.
pub fn is_qualified(u_j: &DMatrix<f64>, support: &SpectralSupport, samples: &[(usize, usize)]) -> bool {
    let n = support.vertices();
    elimination_rank(rows_of(u_j, samples.iter().map(|&(t, v)| t * n + v))) == support.k()
}

/// Enumerates every sample subset of size `1..=max_size` and checks the
/// lower bounds `|S| >= K`, `|S_T| >= K_T`, `|S_G| >= K_G` on each qualified
/// one.
pub fn exhaustive_check(
    u_j: &DMatrix<f64>,
    support: &SpectralSupport,
    max_size: usize,
    exec: Execution,
) -> Result<ExhaustiveReport> {
    let (t, n) = (support.times(), support.vertices());
    let (k, k_t, k_g) = (support.k(), support.k_t(), support.k_g());
    let joint = t * n;
    if joint > MAX_JOINT_VERTICES {
        return Err(Error::GuardExceeded(format!(
            "NT = {joint} exceeds the enumeration limit of {MAX_JOINT_VERTICES}"
        )));
    }
    if max_size > k + 1 {
        return Err(Error::GuardExceeded(format!(
            "subset size {max_size} exceeds K + 1 = {}",
            k + 1
        )));
    }
    if u_j.shape() != (joint, k) {
        return Err(Error::DimensionMismatch(format!(
            "joint basis is {:?}, expected ({joint}, {k})",
            u_j.shape()
        )));
    }

    let visit = |mut acc: Tally, mask: u64| {
        let size = mask.count_ones() as usize;
        if size == 0 || size > max_size {
            return acc;
        }
        acc.checked += 1;
        if elimination_rank(rows_of(u_j, mask_rows(mask))) != k {
            return acc;
        }
        let mut times = 0u64;
        let mut verts = 0u64;
        for r in mask_rows(mask) {
            times |= 1 << (r / n);
            verts |= 1 << (r % n);
        }
        let (st, sg) = (times.count_ones() as usize, verts.count_ones() as usize);
        acc.min = Some(acc.min.map_or(size, |m| m.min(size)));
        if size == k {
            acc.at_k += 1;
            acc.critical |= st == k_t && sg == k_g;
        }
        if size < k {
            acc.violations.push((mask, "|S| >= K"));
        }
        if st < k_t {
            acc.violations.push((mask, "|S_T| >= K_T"));
        }
        if sg < k_g {
            acc.violations.push((mask, "|S_G| >= K_G"));
        }
        acc
    };
    let tally = exec.fold_range(0..1u64 << joint, Tally::default, visit, Tally::merge);

    let mut violations: Vec<_> = tally
        .violations
        .into_iter()
        .map(|(mask, bound)| Violation {
            samples: mask_rows(mask).map(|r| (r / n, r % n)).collect(),
            bound: bound.to_string(),
        })
        .collect();
    violations.sort_by(|a, b| (&a.samples, &a.bound).cmp(&(&b.samples, &b.bound)));

    Ok(ExhaustiveReport {
        min_qualified_size: tally.min,
        count_qualified_at_k: tally.at_k,
        bound_violations: violations,
        exists_critical_set: tally.critical,
        subsets_checked: tally.checked,
        k,
        k_t,
        k_g,
    })
}

/// Draws `trials` random nested pairs `S1 ⊆ S2` of joint rows and checks
/// `rank(S1) <= rank(S2)`. `S1` may be empty (rank 0).
pub fn check_monotonicity(u_j: &DMatrix<f64>, trials: usize, seed: u64) -> Result<bool> {
    let joint = u_j.nrows();
    if joint > MAX_JOINT_VERTICES {
        return Err(Error::GuardExceeded(format!(
            "NT = {joint} exceeds the enumeration limit of {MAX_JOINT_VERTICES}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all: Vec<usize> = (0..joint).collect();
    for _ in 0..trials {
        all.shuffle(&mut rng);
        let big = rng.random_range(0..=joint);
        let small = rng.random_range(0..=big);
        let r2 = elimination_rank(rows_of(u_j, all[..big].iter().copied()));
        let r1 = elimination_rank(rows_of(u_j, all[..small].iter().copied()));
        if r1 > r2 {
            return Ok(false);
        }
    }
    Ok(true)
}
