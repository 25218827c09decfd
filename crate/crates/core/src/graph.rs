//! Undirected weighted graphs, their Laplacians, and the Cartesian product
//! used to join the time axis with the vertex graph.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Undirected graph without self-loops or repeated edges.
///
/// Serialized as `{"n": 4, "edges": [[0, 1, 1.0], ...]}` with 0-based
/// vertex indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;

    fn try_from(f: GraphFile) -> Result<Self> {
        let edges = f.edges.into_iter().map(|(i, j, w)| Edge { i, j, w }).collect();
        Graph::new(f.n, edges)
    }
}

impl From<Graph> for GraphFile {
    fn from(g: Graph) -> Self {
        GraphFile {
            n: g.n,
            edges: g.edges.iter().map(|e| (e.i, e.j, e.w)).collect(),
        }
    }
}

impl Graph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            if e.i >= n || e.j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) out of range for {} vertices",
                    e.i, e.j, n
                )));
            }
            if e.i == e.j {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {}", e.i)));
            }
            if !(e.w.is_finite() && e.w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has non-positive weight {}",
                    e.i, e.j, e.w
                )));
            }
            if !seen.insert((e.i.min(e.j), e.i.max(e.j))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", e.i, e.j)));
            }
        }
        Ok(Self { n, edges })
    }

    pub fn from_unweighted(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let edges = pairs.iter().map(|&(i, j)| Edge { i, j, w: 1.0 }).collect();
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Cycle graph on `t` vertices with unit edges `(k, k+1 mod t)`. This is the
/// time axis of a joint time-vertex signal.
pub fn cycle_graph(t: usize) -> Result<Graph> {
    if t < 3 {
        return Err(Error::CycleTooShort(t));
    }
    let pairs: Vec<_> = (0..t).map(|k| (k, (k + 1) % t)).collect();
    Graph::from_unweighted(t, &pairs)
}

pub fn path_graph(n: usize) -> Result<Graph> {
    let pairs: Vec<_> = (1..n).map(|k| (k - 1, k)).collect();
    Graph::from_unweighted(n, &pairs)
}

pub fn star_graph(n: usize, center: usize) -> Result<Graph> {
    if center >= n {
        return Err(Error::InvalidGraph(format!(
            "star center {center} out of range for {n} vertices"
        )));
    }
    let pairs: Vec<_> = (0..n).filter(|&v| v != center).map(|v| (center, v)).collect();
    Graph::from_unweighted(n, &pairs)
}

/// Erdős–Rényi graph with edge probability `p` and weights drawn from
/// `[0.5, 1.5]`, redrawn until connected.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidGraph(format!("edge probability {p} not in (0, 1]")));
    }
    if n == 1 {
        return Graph::new(1, Vec::new());
    }
    loop {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    edges.push(Edge {
                        i,
                        j,
                        w: rng.random_range(0.5..=1.5),
                    });
                }
            }
        }
        let g = Graph::new(n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
}

/// Dense symmetric Laplacian `L = D - W`.
#[derive(Clone, Debug, PartialEq)]
pub struct Laplacian(DMatrix<f64>);

impl Laplacian {
    /// Wraps an existing matrix after checking symmetry, zero row sums and
    /// non-positive off-diagonals.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidLaplacian(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        let scale = m.amax().max(1.0);
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..n {
                row_sum += m[(i, j)];
                if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::InvalidLaplacian(format!("not symmetric at ({i}, {j})")));
                }
                if i != j && m[(i, j)] > 0.0 {
                    return Err(Error::InvalidLaplacian(format!(
                        "positive off-diagonal at ({i}, {j})"
                    )));
                }
            }
            if row_sum.abs() > SYMMETRY_TOL * scale * n as f64 {
                return Err(Error::InvalidLaplacian(format!("row {i} sums to {row_sum}")));
            }
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

pub fn laplacian(g: &Graph) -> Laplacian {
    let mut m = DMatrix::zeros(g.n, g.n);
    for e in &g.edges {
        m[(e.i, e.j)] -= e.w;
        m[(e.j, e.i)] -= e.w;
        m[(e.i, e.i)] += e.w;
        m[(e.j, e.j)] += e.w;
    }
    Laplacian(m)
}

/// Kronecker sum `(L_T ⊗ I_N) + (I_T ⊗ L_G)`.
///
/// Joint vertex `(t, v)` sits at row `t * N + v`, matching the column-major
/// vectorization of an `N x T` signal.
pub fn cartesian_laplacian(l_t: &Laplacian, l_g: &Laplacian) -> Laplacian {
    let (t, n) = (l_t.dim(), l_g.dim());
    let mut m = DMatrix::zeros(n * t, n * t);
    for a in 0..t {
        for b in 0..t {
            let w = l_t.0[(a, b)];
            if w != 0.0 {
                for v in 0..n {
                    m[(a * n + v, b * n + v)] += w;
                }
            }
        }
        for u in 0..n {
            for v in 0..n {
                m[(a * n + u, a * n + v)] += l_g.0[(u, v)];
            }
        }
    }
    Laplacian(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    #[test]
    fn star_laplacian_matches_worked_example() {
        let l = laplacian(&star_graph(4, 1).unwrap());
        let expected = mat(&[
            &[1.0, -1.0, 0.0, 0.0],
            &[-1.0, 3.0, -1.0, -1.0],
            &[0.0, -1.0, 1.0, 0.0],
            &[0.0, -1.0, 0.0, 1.0],
        ]);
        assert_eq!(l.matrix(), &expected);
    }

    #[test]
    fn single_vertex_and_weighted_path() {
        let l = laplacian(&Graph::new(1, vec![]).unwrap());
        assert_eq!(l.matrix(), &DMatrix::zeros(1, 1));

        let g = Graph::new(2, vec![Edge { i: 0, j: 1, w: 3.0 }]).unwrap();
        assert_eq!(laplacian(&g).matrix(), &mat(&[&[3.0, -3.0], &[-3.0, 3.0]]));
    }

    #[test]
    fn cycle_graphs() {
        let l = laplacian(&cycle_graph(4).unwrap());
        let expected = mat(&[
            &[2.0, -1.0, 0.0, -1.0],
            &[-1.0, 2.0, -1.0, 0.0],
            &[0.0, -1.0, 2.0, -1.0],
            &[-1.0, 0.0, -1.0, 2.0],
        ]);
        assert_eq!(l.matrix(), &expected);

        let tri = laplacian(&cycle_graph(3).unwrap());
        assert!((0..3).all(|i| tri.matrix()[(i, i)] == 2.0));

        assert!(matches!(cycle_graph(2), Err(Error::CycleTooShort(2))));
        assert!(cycle_graph(1).is_err());
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::from_unweighted(3, &[(0, 0)]).is_err());
        assert!(Graph::from_unweighted(3, &[(0, 3)]).is_err());
        assert!(Graph::from_unweighted(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, vec![Edge { i: 0, j: 1, w: -1.0 }]).is_err());
        assert!(Graph::new(0, vec![]).is_err());
    }

    #[test]
    fn graph_json_shape() {
        let g: Graph = serde_json::from_str(r#"{"n":3,"edges":[[0,1,1.0],[1,2,2.5]]}"#).unwrap();
        assert_eq!(g.edges()[1], Edge { i: 1, j: 2, w: 2.5 });
        let back: Graph = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<Graph>(r#"{"n":2,"edges":[[0,0,1.0]]}"#).is_err());
    }

    #[test]
    fn kronecker_sum_of_two_paths() {
        let p = laplacian(&path_graph(2).unwrap());
        let j = cartesian_laplacian(&p, &p);
        let expected = mat(&[
            &[2.0, -1.0, -1.0, 0.0],
            &[-1.0, 2.0, 0.0, -1.0],
            &[-1.0, 0.0, 2.0, -1.0],
            &[0.0, -1.0, -1.0, 2.0],
        ]);
        assert_eq!(j.matrix(), &expected);
    }

    #[test]
    fn product_with_trivial_graph() {
        let l_t = laplacian(&cycle_graph(5).unwrap());
        let trivial = laplacian(&Graph::new(1, vec![]).unwrap());
        assert_eq!(cartesian_laplacian(&l_t, &trivial), l_t);
    }

    #[test]
    fn laplacian_from_matrix_rejects_garbage() {
        assert!(Laplacian::from_matrix(mat(&[&[1.0, 1.0], &[1.0, 1.0]])).is_err());
        assert!(Laplacian::from_matrix(mat(&[&[1.0, -1.0], &[-1.0, 2.0]])).is_err());
        assert!(Laplacian::from_matrix(mat(&[&[1.0, -1.0], &[-0.5, 0.5]])).is_err());
        assert!(Laplacian::from_matrix(mat(&[&[1.0, -1.0], &[-1.0, 1.0]])).is_ok());
    }

    proptest! {
        #[test]
        fn random_laplacians_are_valid(seed in any::<u64>(), n in 1usize..12, p in 0.2f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_connected_graph(n, p, &mut rng).unwrap();
            prop_assert!(g.is_connected());
            let l = laplacian(&g);
            prop_assert!(Laplacian::from_matrix(l.matrix().clone()).is_ok());
        }

        #[test]
        fn cartesian_is_laplacian(seed in any::<u64>(), t in 3usize..7, n in 1usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l_t = laplacian(&cycle_graph(t).unwrap());
            let l_g = laplacian(&random_connected_graph(n, 0.5, &mut rng).unwrap());
            let j = cartesian_laplacian(&l_t, &l_g);
            prop_assert_eq!(j.dim(), n * t);
            prop_assert!(Laplacian::from_matrix(j.into_matrix()).is_ok());
        }
    }
}
