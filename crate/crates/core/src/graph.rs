//! Undirected social graphs with self-loops and their random-walk matrix.
//!
//! Two degree conventions coexist. The random walk uses neighbor sets, so a
//! self-loop puts `v` in `N(v)` once. [`DegreeProfile`] counts a self-loop
//! twice, which is what makes `Σ d_i = 2|E|` hold and reproduces the
//! star-graph figures (center degree `n + 1`, leaves degree 3).

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};

/// Graphs up to this many nodes get a dense transition matrix.
pub const DENSE_LIMIT: usize = 2048;

/// Default cap on vector–matrix products in [`matrix_power_column_weights`].
pub const DEFAULT_ITERATION_CAP: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    neighbors: Vec<Vec<usize>>,
    labels: Vec<String>,
    edge_count: usize,
}

impl SocialGraph {
    /// Builds a graph on nodes `0..n` labelled by their index.
    pub fn from_edges<I>(n: usize, edges: I, auto_loop: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::build(labels, edges, auto_loop)
    }

    fn build<I>(labels: Vec<String>, edges: I, auto_loop: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        if n == 0 {
            return Err(Error::DegenerateGraph("graph has no nodes".into()));
        }
        let mut neighbors = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            neighbors[u].push(v);
            if u != v {
                neighbors[v].push(u);
            }
        }
        if auto_loop {
            for (v, nb) in neighbors.iter_mut().enumerate() {
                nb.push(v);
            }
        }
        for nb in neighbors.iter_mut() {
            nb.sort_unstable();
            nb.dedup();
        }
        if let Some(v) = neighbors.iter().position(Vec::is_empty) {
            return Err(Error::DegenerateGraph(format!(
                "node '{}' has no neighbors and self-loops are disabled",
                labels[v]
            )));
        }
        let loops = (0..n).filter(|&v| neighbors[v].binary_search(&v).is_ok()).count();
        let incidences: usize = neighbors.iter().map(Vec::len).sum();
        let edge_count = (incidences - loops) / 2 + loops;
        Ok(SocialGraph {
            neighbors,
            labels,
            edge_count,
        })
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Number of undirected edges; a self-loop counts as one edge.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbor set `N(v)`, containing `v` itself when looped.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn has_self_loop(&self, v: usize) -> bool {
        self.neighbors[v].binary_search(&v).is_ok()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let degrees = (0..self.node_count())
            .map(|v| self.neighbors[v].len() as u64 + u64::from(self.has_self_loop(v)))
            .collect();
        DegreeProfile {
            degrees,
            edge_count: self.edge_count as u64,
        }
    }

    pub fn summary(&self) -> GraphSummary {
        let profile = self.degree_profile();
        let mut degree_histogram = BTreeMap::new();
        for &d in &profile.degrees {
            *degree_histogram.entry(d).or_insert(0usize) += 1;
        }
        GraphSummary {
            nodes: self.node_count(),
            edges: self.edge_count,
            self_loops: (0..self.node_count()).filter(|&v| self.has_self_loop(v)).count(),
            degree_convention: DEGREE_CONVENTION,
            degree_histogram,
            labels: self.labels.clone(),
        }
    }
}

pub const DEGREE_CONVENTION: &str = "self-loop adds 2 to the degree";

/// Graph summary report.
#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub self_loops: usize,
    pub degree_convention: &'static str,
    pub degree_histogram: BTreeMap<u64, usize>,
    pub labels: Vec<String>,
}

/// Parses a whitespace-separated edge list.
///
/// `#` starts a comment. A line with a single label declares a node
/// without adding an edge. Labels are arbitrary strings and are numbered
/// densely in order of first appearance.
pub fn load_edge_list(text: &str, auto_loop: bool) -> Result<SocialGraph> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() > 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected 'u v', found {} fields", tokens.len()),
            });
        }
        let ids: Vec<usize> = tokens
            .iter()
            .map(|&label| {
                *index.entry(label).or_insert_with(|| {
                    labels.push(label.to_string());
                    labels.len() - 1
                })
            })
            .collect();
        if let [u, v] = ids[..] {
            edges.push((u, v));
        }
    }
    if labels.is_empty() {
        return Err(Error::DegenerateGraph("edge list declares no nodes".into()));
    }
    SocialGraph::build(labels, edges, auto_loop)
}

/// Per-node degrees with self-loops counted twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub degrees: Vec<u64>,
    pub edge_count: u64,
}

impl DegreeProfile {
    /// `d_u / 2|E|` for every node.
    pub fn degree_shares(&self) -> Vec<f64> {
        let total = 2.0 * self.edge_count as f64;
        self.degrees.iter().map(|&d| d as f64 / total).collect()
    }
}

/// Row-stochastic matrix `M(v,u) = 1/|N(v)|` for `u ∈ N(v)`.
#[derive(Debug, Clone, PartialEq)]
pub enum TransitionMatrix {
    Dense { n: usize, entries: Vec<f64> },
    Sparse { neighbors: Vec<Vec<usize>>, inv_degree: Vec<f64> },
}

/// Dense storage up to [`DENSE_LIMIT`] nodes, sparse above.
pub fn transition_matrix(g: &SocialGraph) -> TransitionMatrix {
    if g.node_count() <= DENSE_LIMIT {
        TransitionMatrix::dense(g)
    } else {
        TransitionMatrix::sparse(g)
    }
}

impl TransitionMatrix {
    pub fn dense(g: &SocialGraph) -> Self {
        let n = g.node_count();
        let mut entries = vec![0.0; n * n];
        for v in 0..n {
            let nb = g.neighbors(v);
            let p = 1.0 / nb.len() as f64;
            for &u in nb {
                entries[v * n + u] = p;
            }
        }
        TransitionMatrix::Dense { n, entries }
    }

    pub fn sparse(g: &SocialGraph) -> Self {
        let neighbors = g.neighbors.clone();
        let inv_degree = neighbors.iter().map(|nb| 1.0 / nb.len() as f64).collect();
        TransitionMatrix::Sparse {
            neighbors,
            inv_degree,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            TransitionMatrix::Dense { n, .. } => *n,
            TransitionMatrix::Sparse { neighbors, .. } => neighbors.len(),
        }
    }

    pub fn get(&self, v: usize, u: usize) -> f64 {
        match self {
            TransitionMatrix::Dense { n, entries } => entries[v * n + u],
            TransitionMatrix::Sparse {
                neighbors,
                inv_degree,
            } => {
                if neighbors[v].binary_search(&u).is_ok() {
                    inv_degree[v]
                } else {
                    0.0
                }
            }
        }
    }

    /// Dense row-major copy of the matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            TransitionMatrix::Dense { entries, .. } => entries.clone(),
            TransitionMatrix::Sparse { .. } => {
                let n = self.size();
                let mut out = vec![0.0; n * n];
                for v in 0..n {
                    for u in 0..n {
                        out[v * n + u] = self.get(v, u);
                    }
                }
                out
            }
        }
    }

    /// Row-vector product `out = w · M`.
    pub fn left_multiply(&self, w: &[f64], out: &mut [f64]) {
        match self {
            TransitionMatrix::Dense { n, entries } => {
                out.iter_mut().for_each(|x| *x = 0.0);
                for (v, &wv) in w.iter().enumerate() {
                    if wv == 0.0 {
                        continue;
                    }
                    let row = &entries[v * n..(v + 1) * n];
                    for (o, &m) in out.iter_mut().zip(row) {
                        *o += wv * m;
                    }
                }
            }
            TransitionMatrix::Sparse {
                neighbors,
                inv_degree,
            } => {
                // M(v,u) > 0 iff u ∈ N(v) iff v ∈ N(u), so column u gathers from N(u).
                for (u, o) in out.iter_mut().enumerate() {
                    *o = neighbors[u].iter().map(|&v| w[v] * inv_degree[v]).sum();
                }
            }
        }
    }
}

/// Column sums of `M^t`, computed as `t` products of the all-ones row vector.
pub fn matrix_power_column_weights(m: &TransitionMatrix, t: u64) -> Result<Vec<f64>> {
    column_weights_with_cap(m, t, DEFAULT_ITERATION_CAP)
}

pub fn column_weights_with_cap(m: &TransitionMatrix, t: u64, cap: u64) -> Result<Vec<f64>> {
    if t > cap {
        return Err(Error::IterationCap { requested: t, cap });
    }
    let mut walk = ColumnWeights::new(m);
    for _ in 0..t {
        walk.advance();
    }
    Ok(walk.weights().to_vec())
}

/// Successive column-weight vectors `w_0 = 1, w_{t+1} = w_t · M`.
#[derive(Debug, Clone)]
pub struct ColumnWeights<'a> {
    matrix: &'a TransitionMatrix,
    current: Vec<f64>,
    scratch: Vec<f64>,
    step: u64,
}

impl<'a> ColumnWeights<'a> {
    pub fn new(matrix: &'a TransitionMatrix) -> Self {
        let n = matrix.size();
        ColumnWeights {
            matrix,
            current: vec![1.0; n],
            scratch: vec![0.0; n],
            step: 0,
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn weights(&self) -> &[f64] {
        &self.current
    }

    pub fn advance(&mut self) -> &[f64] {
        self.matrix.left_multiply(&self.current, &mut self.scratch);
        std::mem::swap(&mut self.current, &mut self.scratch);
        self.step += 1;
        &self.current
    }
}

/// `M^t` by repeated squaring on the dense form, for small reports.
pub fn dense_power(m: &TransitionMatrix, t: u64) -> Result<Vec<f64>> {
    let n = m.size();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge(format!(
            "dense power needs n <= {DENSE_LIMIT}, got {n}"
        )));
    }
    let mut result = identity(n);
    let mut base = m.to_dense();
    let mut e = t;
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul(&result, &base, n);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul(&base, &base, n);
        }
    }
    Ok(result)
}

fn identity(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        out[i * n + i] = 1.0;
    }
    out
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryOptions {
    /// Required bound on `‖πM − π‖∞`.
    pub tolerance: f64,
    pub max_iterations: u64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        StationaryOptions {
            tolerance: 1e-10,
            max_iterations: 10_000_000,
        }
    }
}

/// Fixed point of the walk plus the degree-share closed forms it is
/// compared against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stationary {
    pub distribution: Vec<f64>,
    pub residual: f64,
    pub iterations: u64,
    /// `d_u / 2|E|` with self-loops counted twice.
    pub degree_share: Vec<f64>,
    /// `|N(u)| / Σ_v |N(v)|`, self-loops counted once.
    pub neighbor_share: Vec<f64>,
    pub degree_share_deviation: f64,
    pub neighbor_share_deviation: f64,
}

pub fn stationary_distribution(g: &SocialGraph, m: &TransitionMatrix) -> Result<Stationary> {
    stationary_with_options(g, m, StationaryOptions::default())
}

/// Power iteration from the uniform vector (the column weights scaled by
/// `1/n`).
///
/// Iteration continues past `tolerance` until the residual either falls
/// three orders of magnitude lower or stops improving, so the returned
/// vector is accurate well beyond the acceptance bound.
pub fn stationary_with_options(
    g: &SocialGraph,
    m: &TransitionMatrix,
    opts: StationaryOptions,
) -> Result<Stationary> {
    let n = m.size();
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let target = opts.tolerance * 1e-3;
    let mut best = f64::INFINITY;
    let mut stale = 0u32;
    let mut iterations = 0u64;
    let mut residual;
    loop {
        m.left_multiply(&pi, &mut next);
        residual = max_abs_diff(&pi, &next);
        std::mem::swap(&mut pi, &mut next);
        iterations += 1;
        if residual <= target {
            break;
        }
        if residual < best {
            best = residual;
            stale = 0;
        } else {
            stale += 1;
        }
        if residual <= opts.tolerance && stale >= 100 {
            break;
        }
        if iterations >= opts.max_iterations {
            if residual <= opts.tolerance {
                break;
            }
            return Err(Error::NonConvergence {
                iterations,
                residual,
            });
        }
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);

    let degree_share = g.degree_profile().degree_shares();
    let incidences: usize = (0..n).map(|v| g.neighbors(v).len()).sum();
    let neighbor_share: Vec<f64> = (0..n)
        .map(|v| g.neighbors(v).len() as f64 / incidences as f64)
        .collect();
    Ok(Stationary {
        degree_share_deviation: max_abs_diff(&pi, &degree_share),
        neighbor_share_deviation: max_abs_diff(&pi, &neighbor_share),
        distribution: pi,
        residual,
        iterations,
        degree_share,
        neighbor_share,
    })
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Small graph families used by examples, reports and tests.
pub mod generators {
    use rand::Rng;

    use super::SocialGraph;
    use crate::rng::{CounterRng, Domain};

    /// Star with center 0 and leaves `1..n`, every node self-looped.
    pub fn star(n: usize) -> SocialGraph {
        SocialGraph::from_edges(n, (1..n).map(|leaf| (0, leaf)), true)
            .expect("star is well formed")
    }

    pub fn cycle(n: usize) -> SocialGraph {
        SocialGraph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)), true)
            .expect("cycle is well formed")
    }

    pub fn complete(n: usize) -> SocialGraph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        SocialGraph::from_edges(n, edges, true).expect("complete graph is well formed")
    }

    /// Self-looped nodes with no other edges.
    pub fn edgeless(n: usize) -> SocialGraph {
        SocialGraph::from_edges(n, std::iter::empty(), true).expect("edgeless graph is well formed")
    }

    /// `G(n, p)` with self-loops on every node.
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> SocialGraph {
        let mut rng = CounterRng::new(seed, Domain::Corpus).stream(n as u64);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        SocialGraph::from_edges(n, edges, true).expect("random graph is well formed")
    }
}
