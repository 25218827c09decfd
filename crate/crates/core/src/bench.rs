//! Timing comparison of the factored critical-set search against a direct
//! independent-row search over all `NT` rows of the joint basis.

use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bandlimit::{random_support, SpectralSupport};
use crate::error::{Error, Result};
use crate::graph::{cycle_graph, laplacian, random_connected_graph};
use crate::par::Execution;
use crate::reference;
use crate::sampling::{critical_samples, naive_sampling_set, separate_sampling, ReducedBases};
use crate::spectral::eig_sym;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchCase {
    pub n: usize,
    pub t: usize,
    pub k_t: usize,
    pub k_g: usize,
}

impl BenchCase {
    /// Square case with both projection bandwidths at `ceil(n / 4)`.
    pub fn square(n: usize) -> Self {
        let k = n.div_ceil(4);
        Self { n, t: n, k_t: k, k_g: k }
    }

    /// Parses `N`, `NxT` or `NxT:KTxKG`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Malformed(format!("bad bench size {s:?}, expected N, NxT or NxT:KTxKG"));
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
        let (dims, bands) = match s.split_once(':') {
            Some((d, b)) => (d, Some(b)),
            None => (s, None),
        };
        let (n, t) = match dims.split_once('x') {
            Some((a, b)) => (num(a)?, num(b)?),
            None => (num(dims)?, num(dims)?),
        };
        let (k_t, k_g) = match bands {
            Some(b) => {
                let (a, c) = b.split_once('x').ok_or_else(bad)?;
                (num(a)?, num(c)?)
            }
            None => (t.div_ceil(4), n.div_ceil(4)),
        };
        if t < 3 || n == 0 || k_t == 0 || k_g == 0 || k_t > t || k_g > n {
            return Err(bad());
        }
        Ok(Self { n, t, k_t, k_g })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub label: String,
    pub n: usize,
    pub t: usize,
    pub k_t: usize,
    pub k_g: usize,
    pub k: usize,
    pub factored_secs: f64,
    pub naive_secs: f64,
    pub ratio: f64,
    pub critical_samples: usize,
    pub separate_samples: usize,
}

/// Support size halfway between the two ends of `max(K_T, K_G) <= K <= K_T K_G`.
pub fn bench_k(k_t: usize, k_g: usize) -> usize {
    (k_t.max(k_g) + k_t * k_g).div_ceil(2)
}

fn build_case(case: BenchCase, seed: u64) -> Result<ReducedBases> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bt = eig_sym(&laplacian(&cycle_graph(case.t)?))?;
    let p = (4.0 / case.n as f64).min(1.0);
    let bg = eig_sym(&laplacian(&random_connected_graph(case.n, p, &mut rng)?))?;
    let s = random_support(case.t, case.n, case.k_t, case.k_g, bench_k(case.k_t, case.k_g), &mut rng)?;
    ReducedBases::from_full(bt.vectors(), bg.vectors(), &s)
}

fn best_of<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<(f64, T)> {
    let mut best = f64::INFINITY;
    let mut out = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let v = f()?;
        best = best.min(start.elapsed().as_secs_f64());
        out = Some(v);
    }
    Ok((best, out.expect("at least one repetition")))
}

fn time_instance(label: String, rb: &ReducedBases, reps: usize) -> Result<BenchRow> {
    let s: &SpectralSupport = rb.support();
    let (factored_secs, crit) =
        best_of(reps, || critical_samples(rb.time(), rb.graph(), rb.joint(), s))?;
    let (naive_secs, _) = best_of(reps, || naive_sampling_set(rb.joint(), s))?;
    let separate = separate_sampling(rb.time(), rb.graph())?;
    Ok(BenchRow {
        label,
        n: s.vertices(),
        t: s.times(),
        k_t: s.k_t(),
        k_g: s.k_g(),
        k: s.k(),
        factored_secs,
        naive_secs,
        ratio: factored_secs / naive_secs,
        critical_samples: crit.len(),
        separate_samples: separate.len(),
    })
}

/// Runs every case. Instances are built concurrently under `exec`; the
/// timed sections always run one at a time. Each time is the best of `reps`.
pub fn run(cases: &[BenchCase], reps: usize, seed: u64, exec: Execution) -> Result<Vec<BenchRow>> {
    let seeded: Vec<(usize, BenchCase)> = cases.iter().copied().enumerate().collect();
    let built = exec.map(&seeded, |&(i, c)| build_case(c, seed.wrapping_add(i as u64)));
    cases
        .iter()
        .zip(built)
        .map(|(c, rb)| time_instance(format!("{}x{}", c.n, c.t), &rb?, reps))
        .collect()
}

/// The worked 4 x 4 instance with its published bases.
pub fn reference_row(reps: usize) -> Result<BenchRow> {
    let rb = ReducedBases::from_restricted(
        reference::restricted_time_basis(),
        reference::restricted_graph_basis(),
        &reference::support(),
    )?;
    time_instance("reference".into(), &rb, reps)
}

pub fn write_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
