//! Joint spectral supports: detection, general and projection bandwidths,
//! and synthesis of bandlimited test signals.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::JointSignal;

pub const DEFAULT_SUPPORT_EPS: f64 = 1e-8;

/// Set of occupied joint frequencies `(j_t, j_g)`, 0-based.
///
/// `K` is the number of pairs, `K_T` the number of distinct time frequencies
/// and `K_G` the number of distinct graph frequencies, so
/// `max(K_T, K_G) <= K <= K_T * K_G` always holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SupportFile", into = "SupportFile")]
pub struct SpectralSupport {
    times: usize,
    vertices: usize,
    pairs: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct SupportFile {
    #[serde(rename = "T")]
    t: usize,
    #[serde(rename = "N")]
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl TryFrom<SupportFile> for SpectralSupport {
    type Error = Error;

    fn try_from(f: SupportFile) -> Result<Self> {
        if f.pairs.iter().collect::<BTreeSet<_>>().len() != f.pairs.len() {
            return Err(Error::InvalidSupport("duplicate frequency pair".into()));
        }
        SpectralSupport::new(f.t, f.n, f.pairs)
    }
}

impl From<SpectralSupport> for SupportFile {
    fn from(s: SpectralSupport) -> Self {
        SupportFile {
            t: s.times,
            n: s.vertices,
            pairs: s.pairs.into_iter().collect(),
        }
    }
}

impl SpectralSupport {
    pub fn new(
        times: usize,
        vertices: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let pairs: BTreeSet<_> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::InvalidSupport("support must contain at least one pair".into()));
        }
        if let Some(&(jt, jg)) = pairs.iter().find(|&&(jt, jg)| jt >= times || jg >= vertices) {
            return Err(Error::InvalidSupport(format!(
                "pair ({jt}, {jg}) out of range for T={times}, N={vertices}"
            )));
        }
        Ok(Self {
            times,
            vertices,
            pairs,
        })
    }

    /// Every joint frequency of a `T x N` product graph.
    pub fn full(times: usize, vertices: usize) -> Result<Self> {
        Self::new(
            times,
            vertices,
            (0..times).flat_map(|a| (0..vertices).map(move |b| (a, b))),
        )
    }

    pub fn times(&self) -> usize {
        self.times
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn k_t(&self) -> usize {
        self.time_freqs().len()
    }

    pub fn k_g(&self) -> usize {
        self.graph_freqs().len()
    }

    /// Occupied time frequencies, ascending.
    pub fn time_freqs(&self) -> Vec<usize> {
        let s: BTreeSet<_> = self.pairs.iter().map(|p| p.0).collect();
        s.into_iter().collect()
    }

    /// Occupied graph frequencies, ascending.
    pub fn graph_freqs(&self) -> Vec<usize> {
        let s: BTreeSet<_> = self.pairs.iter().map(|p| p.1).collect();
        s.into_iter().collect()
    }

    /// True when the support fills its whole `K_T x K_G` bounding rectangle.
    pub fn is_rectangle(&self) -> bool {
        self.k() == self.k_t() * self.k_g()
    }
}

/// Thresholds `|X_f| > eps * max|X_f|`. Rows of `xf` are graph frequencies,
/// columns time frequencies.
pub fn detect_support(xf: &DMatrix<f64>, eps: f64) -> Result<SpectralSupport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidSupport(format!("threshold must be positive, got {eps}")));
    }
    let peak = xf.amax();
    if peak == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let cut = eps * peak;
    let mut pairs = Vec::new();
    for jt in 0..xf.ncols() {
        for jg in 0..xf.nrows() {
            if xf[(jg, jt)].abs() > cut {
                pairs.push((jt, jg));
            }
        }
    }
    SpectralSupport::new(xf.ncols(), xf.nrows(), pairs)
}

/// Simultaneously bandlimited: `K_T < T` and `K_G < N`.
pub fn is_sbl(s: &SpectralSupport) -> bool {
    s.k_t() < s.times && s.k_g() < s.vertices
}

/// Columns of the full bases at the occupied time and graph frequencies.
pub fn restrict_bases(
    u_t: &DMatrix<f64>,
    u_g: &DMatrix<f64>,
    s: &SpectralSupport,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_full_bases(u_t, u_g, s)?;
    Ok((u_t.select_columns(&s.time_freqs()), u_g.select_columns(&s.graph_freqs())))
}

fn check_full_bases(u_t: &DMatrix<f64>, u_g: &DMatrix<f64>, s: &SpectralSupport) -> Result<()> {
    if u_t.shape() != (s.times, s.times) || u_g.shape() != (s.vertices, s.vertices) {
        return Err(Error::DimensionMismatch(format!(
            "bases {:?} and {:?} do not fit a T={} N={} support",
            u_t.shape(),
            u_g.shape(),
            s.times,
            s.vertices
        )));
    }
    Ok(())
}

/// Inverse JFT of the sparse spectrum holding `coeffs` on `s`.
pub fn synth_signal(
    u_t: &DMatrix<f64>,
    u_g: &DMatrix<f64>,
    s: &SpectralSupport,
    coeffs: &BTreeMap<(usize, usize), f64>,
) -> Result<JointSignal> {
    check_full_bases(u_t, u_g, s)?;
    check_coeffs(s, coeffs)?;
    let mut xf = DMatrix::zeros(s.vertices, s.times);
    for (&(jt, jg), &c) in coeffs {
        xf[(jg, jt)] = c;
    }
    JointSignal::new(u_g * xf * u_t.transpose())
}

pub(crate) fn check_coeffs(s: &SpectralSupport, coeffs: &BTreeMap<(usize, usize), f64>) -> Result<()> {
    if coeffs.len() != s.k() || !coeffs.keys().all(|p| s.pairs.contains(p)) {
        return Err(Error::InvalidSupport(
            "coefficients must be keyed exactly by the support pairs".into(),
        ));
    }
    if let Some((&p, _)) = coeffs.iter().find(|(_, &c)| c == 0.0 || !c.is_finite()) {
        return Err(Error::ZeroCoefficient(p));
    }
    Ok(())
}

/// Coefficients drawn uniformly from `±[0.5, 1.5]`.
pub fn random_coefficients<R: Rng + ?Sized>(
    s: &SpectralSupport,
    rng: &mut R,
) -> BTreeMap<(usize, usize), f64> {
    s.pairs
        .iter()
        .map(|&p| {
            let mag = rng.random_range(0.5..=1.5);
            (p, if rng.random::<bool>() { mag } else { -mag })
        })
        .collect()
}

/// Random support with exactly `k_t` time and `k_g` graph frequencies and
/// `k` pairs inside their rectangle.
pub fn random_support<R: Rng + ?Sized>(
    times: usize,
    vertices: usize,
    k_t: usize,
    k_g: usize,
    k: usize,
    rng: &mut R,
) -> Result<SpectralSupport> {
    if k_t == 0 || k_g == 0 || k_t > times || k_g > vertices {
        return Err(Error::InvalidSupport(format!(
            "projection bandwidths ({k_t}, {k_g}) invalid for T={times}, N={vertices}"
        )));
    }
    if k < k_t.max(k_g) || k > k_t * k_g {
        return Err(Error::InvalidSupport(format!(
            "K={k} violates max(K_T, K_G) <= K <= K_T*K_G for ({k_t}, {k_g})"
        )));
    }
    let mut tf: Vec<usize> = rand::seq::index::sample(rng, times, k_t).into_vec();
    let mut gf: Vec<usize> = rand::seq::index::sample(rng, vertices, k_g).into_vec();
    tf.shuffle(rng);
    gf.shuffle(rng);

    // a diagonal-like cover touches every chosen row and column once
    let mut pairs: BTreeSet<_> = (0..k_t.max(k_g)).map(|i| (tf[i % k_t], gf[i % k_g])).collect();
    let mut rest: Vec<_> = tf
        .iter()
        .flat_map(|&a| gf.iter().map(move |&b| (a, b)))
        .filter(|p| !pairs.contains(p))
        .collect();
    rest.shuffle(rng);
    pairs.extend(rest.into_iter().take(k - pairs.len()));
    SpectralSupport::new(times, vertices, pairs)
}

/// Random simultaneously bandlimited support (`K_T < T`, `K_G < N`).
/// Needs `T >= 2` and `N >= 2`.
pub fn random_sbl_support<R: Rng + ?Sized>(
    times: usize,
    vertices: usize,
    rng: &mut R,
) -> Result<SpectralSupport> {
    if times < 2 || vertices < 2 {
        return Err(Error::InvalidSupport(format!(
            "no SBL support exists for T={times}, N={vertices}"
        )));
    }
    let k_t = rng.random_range(1..times);
    let k_g = rng.random_range(1..vertices);
    let k = rng.random_range(k_t.max(k_g)..=k_t * k_g);
    random_support(times, vertices, k_t, k_g, k, rng)
}
