//! Network topologies and their spectra.
//!
//! A [`Topology`] is a symmetric weighted graph without self-loops. Besides
//! the usual builders it supports H-hop augmentation: the level-h graph has
//! adjacency `Aʰ` with the diagonal removed, so a pair `(i, s)` carries the
//! summed weight of every h-step walk between them. The union of levels
//! 1..H models the virtual links that multi-hop forwarding creates, and
//! [`spectral_report`] checks that its algebraic connectivity dominates the
//! sum of the per-level values.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::rng::{self, Purpose};

/// Numerical slack for spectral inequalities.
pub const SPECTRAL_EPS: f64 = 1e-9;

const EIGEN_MAX_ITER: usize = 10_000;
const RGG_ATTEMPTS: usize = 1_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    adjacency: Vec<BTreeMap<usize, f64>>,
}

impl Topology {
    /// Graph with `n` isolated nodes.
    pub fn empty(n: usize) -> Self {
        Self { adjacency: vec![BTreeMap::new(); n] }
    }

    /// Builds from undirected edges; each `(i, j, w)` becomes both `(i,j)`
    /// and `(j,i)`. Repeated edges accumulate weight.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self, GraphError> {
        let mut t = Self::empty(n);
        for (i, j, w) in edges {
            t.add_edge(i, j, w)?;
        }
        Ok(t)
    }

    fn add_edge(&mut self, i: usize, j: usize, w: f64) -> Result<(), GraphError> {
        let n = self.n();
        if i >= n || j >= n {
            return Err(GraphError::BadEdge(i, j, format!("node out of range for n = {n}")));
        }
        if i == j {
            return Err(GraphError::BadEdge(i, j, "self-loop".into()));
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(GraphError::BadEdge(i, j, format!("weight {w} is not positive")));
        }
        *self.adjacency[i].entry(j).or_insert(0.0) += w;
        *self.adjacency[j].entry(i).or_insert(0.0) += w;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    /// Neighbors of `i` in ascending id order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i].keys().copied()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.adjacency[i].get(&j).copied()
    }

    /// Undirected edges `(i, j, w)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, row) in self.adjacency.iter().enumerate() {
            for (&j, &w) in row.range(i + 1..) {
                out.push((i, j, w));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    /// Sum of `w_ij` over ordered pairs `i ≠ j`.
    pub fn total_weight(&self) -> f64 {
        self.adjacency.iter().flat_map(|row| row.values()).sum()
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for v in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Longest shortest path; `None` if disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for s in 0..self.n() {
            for d in self.bfs_distances(s) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut a = DMatrix::zeros(n, n);
        for (i, row) in self.adjacency.iter().enumerate() {
            for (&j, &w) in row {
                a[(i, j)] = w;
            }
        }
        a
    }

    /// Interprets the off-diagonal positive entries of a symmetric matrix as
    /// edge weights. The diagonal is ignored.
    pub fn from_adjacency_matrix(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let mut t = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                if i != j && a[(i, j)] > 0.0 {
                    t.adjacency[i].insert(j, a[(i, j)]);
                }
            }
        }
        t
    }

    /// Edge-list text: one `i j weight` line per undirected edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# nodes {}", self.n());
        for (i, j, w) in self.edges() {
            let _ = writeln!(out, "{i} {j} {w}");
        }
        out
    }

    /// Parses [`Topology::to_edge_list`] output. Blank lines and `#`
    /// comments are skipped; a `# nodes N` comment fixes the node count,
    /// otherwise it is one more than the largest id seen.
    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut declared = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let parse_err = |message: String| GraphError::Parse { line: idx + 1, message };
            if let Some(comment) = line.strip_prefix('#') {
                let mut parts = comment.split_whitespace();
                if parts.next() == Some("nodes") {
                    let n = parts
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| parse_err("bad node count".into()))?;
                    declared = Some(n);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 && fields.len() != 3 {
                return Err(parse_err(format!("expected `i j [weight]`, got {line:?}")));
            }
            let i = fields[0].parse::<usize>().map_err(|e| parse_err(e.to_string()))?;
            let j = fields[1].parse::<usize>().map_err(|e| parse_err(e.to_string()))?;
            let w = match fields.get(2) {
                Some(s) => s.parse::<f64>().map_err(|e| parse_err(e.to_string()))?,
                None => 1.0,
            };
            edges.push((i, j, w));
        }
        let n = declared.unwrap_or_else(|| edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0));
        let mut t = Self::empty(n);
        for (i, j, w) in edges {
            // Symmetric pairs may appear twice in hand-written files.
            if t.weight(i, j).is_some() {
                continue;
            }
            t.add_edge(i, j, w)?;
        }
        Ok(t)
    }
}

/// `rows × cols` 4-neighbor lattice; node `(r, c)` has id `r·cols + c`.
pub fn build_grid(rows: usize, cols: usize) -> Result<Topology, GraphError> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(GraphError::BadDimensions(format!("grid {rows}x{cols}")));
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let id = r * cols + c;
            if c + 1 < cols {
                edges.push((id, id + 1, 1.0));
            }
            if r + 1 < rows {
                edges.push((id, id + cols, 1.0));
            }
        }
    }
    Topology::from_edges(rows * cols, edges)
}

pub fn build_line(n: usize) -> Result<Topology, GraphError> {
    if n < 2 {
        return Err(GraphError::BadDimensions(format!("line of {n}")));
    }
    build_grid(1, n)
}

/// Uniform points in the unit square, linked when within `radius`.
/// Redraws until the graph is connected.
pub fn build_random_geometric(n: usize, radius: f64, seed: u64) -> Result<Topology, GraphError> {
    if n < 2 {
        return Err(GraphError::BadDimensions(format!("random geometric graph of {n}")));
    }
    if !(radius > 0.0) {
        return Err(GraphError::BadDimensions(format!("radius {radius}")));
    }
    for attempt in 0..RGG_ATTEMPTS {
        let mut rng = rng::stream(seed, Purpose::Topology, attempt as u64);
        let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
                if (dx * dx + dy * dy).sqrt() <= radius {
                    edges.push((i, j, 1.0));
                }
            }
        }
        let t = Topology::from_edges(n, edges)?;
        if t.is_connected() {
            return Ok(t);
        }
    }
    Err(GraphError::NoConnectedInstance(RGG_ATTEMPTS))
}

/// `L = D − A` with weighted degrees on the diagonal.
pub fn laplacian(t: &Topology) -> DMatrix<f64> {
    let n = t.n();
    let mut l = DMatrix::zeros(n, n);
    for (i, row) in t.adjacency.iter().enumerate() {
        let mut deg = 0.0;
        for (&j, &w) in row {
            l[(i, j)] = -w;
            deg += w;
        }
        l[(i, i)] = deg;
    }
    l
}

/// Ascending eigenvalues of a symmetric matrix together with their
/// eigenvectors (as columns, same order).
pub fn symmetric_spectrum(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>), GraphError> {
    let eig = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(GraphError::EigenNonConvergence)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Second-smallest Laplacian eigenvalue. Zero (to rounding) exactly when
/// the graph is disconnected.
pub fn algebraic_connectivity(t: &Topology) -> Result<f64, GraphError> {
    if t.n() < 2 {
        return Err(GraphError::BadDimensions(format!("{} nodes", t.n())));
    }
    let l = laplacian(t);
    let (values, vectors) = symmetric_spectrum(&l)?;
    let lambda2 = values[1];
    let x: DVector<f64> = vectors.column(1).into_owned();
    let residual = (&l * &x - lambda2 * &x).norm();
    let tolerance = 1e-8 * l.norm().max(1.0);
    if residual > tolerance {
        return Err(GraphError::EigenResidual { residual, tolerance });
    }
    Ok(lambda2)
}

/// Per-level graphs and their union for hop depths 1..=`hops`.
#[derive(Debug, Clone)]
pub struct HopAugmentation {
    pub levels: Vec<Topology>,
    pub union: Topology,
}

pub fn h_hop_augment(t: &Topology, hops: usize) -> Result<HopAugmentation, GraphError> {
    if hops == 0 {
        return Err(GraphError::BadDimensions("hop count must be at least 1".into()));
    }
    let n = t.n();
    let base = t.adjacency_matrix();
    let mut power = base.clone();
    let mut union = DMatrix::<f64>::zeros(n, n);
    let mut levels = Vec::with_capacity(hops);
    for h in 1..=hops {
        if h > 1 {
            power = &power * &base;
        }
        let mut level = power.clone();
        level.fill_diagonal(0.0);
        union += &level;
        levels.push(Topology::from_adjacency_matrix(&level));
    }
    Ok(HopAugmentation { levels, union: Topology::from_adjacency_matrix(&union) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub hops: usize,
    pub lambda2_per_hop: Vec<f64>,
    pub lambda2_union: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

impl SpectralReport {
    /// Flat `key = value` lines.
    pub fn to_record(&self, prefix: &str) -> Vec<(String, String)> {
        let per_hop = self.lambda2_per_hop.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
        vec![
            (format!("{prefix}hops"), self.hops.to_string()),
            (format!("{prefix}lambda2_per_hop"), per_hop),
            (format!("{prefix}lambda2_union"), self.lambda2_union.to_string()),
            (format!("{prefix}lower_bound"), self.lower_bound.to_string()),
            (format!("{prefix}upper_bound"), self.upper_bound.to_string()),
        ]
    }
}

/// λ₂ of every hop level and of their union, with the additive lower
/// bound `Σ_h λ₂(h)` and the equal-weight upper bound `Σ w / (n − 1)`.
pub fn spectral_report(t: &Topology, hops: usize) -> Result<SpectralReport, GraphError> {
    if !t.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let aug = h_hop_augment(t, hops)?;
    let lambda2_per_hop = aug.levels.iter().map(algebraic_connectivity).collect::<Result<Vec<_>, _>>()?;
    let lambda2_union = algebraic_connectivity(&aug.union)?;
    let lower_bound: f64 = lambda2_per_hop.iter().sum();
    let upper_bound = aug.union.total_weight() / (t.n() - 1) as f64;
    let scale = upper_bound.max(1.0);
    assert!(
        lambda2_union >= lower_bound - SPECTRAL_EPS * scale,
        "union λ₂ {lambda2_union} below additive bound {lower_bound}"
    );
    assert!(
        lambda2_union <= upper_bound + SPECTRAL_EPS * scale,
        "union λ₂ {lambda2_union} above weight bound {upper_bound}"
    );
    Ok(SpectralReport { hops, lambda2_per_hop, lambda2_union, lower_bound, upper_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shapes() {
        let g = build_grid(5, 5).unwrap();
        assert_eq!(g.n(), 25);
        assert_eq!(g.edge_count(), 5 * 4 + 5 * 4);
        assert_eq!(g.diameter(), Some(8));

        let g = build_grid(1, 2).unwrap();
        assert_eq!(g.edges(), vec![(0, 1, 1.0)]);

        let g = build_grid(1, 9).unwrap();
        assert_eq!(g.diameter(), Some(8));
        assert!(build_grid(0, 4).is_err());
        assert!(build_grid(1, 1).is_err());
    }

    #[test]
    fn line_shapes() {
        assert_eq!(build_line(9).unwrap().diameter(), Some(8));
        assert_eq!(build_line(2).unwrap().edges(), vec![(0, 1, 1.0)]);
        let l3 = build_line(3).unwrap();
        assert_eq!(l3.edges(), vec![(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(l3.weight(1, 0), Some(1.0));
        assert!(build_line(1).is_err());
    }

    #[test]
    fn random_geometric_small_cases() {
        let t = build_random_geometric(2, 2.0, 99).unwrap();
        assert_eq!(t.edges(), vec![(0, 1, 1.0)]);
        let a = build_random_geometric(25, 0.3, 7).unwrap();
        let b = build_random_geometric(25, 0.3, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.bfs_distances(0).iter().all(Option::is_some));
        assert!(matches!(build_random_geometric(30, 0.01, 1), Err(GraphError::NoConnectedInstance(_))));
    }

    #[test]
    fn laplacian_examples() {
        let l = laplacian(&build_line(2).unwrap());
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        let l = laplacian(&build_line(3).unwrap());
        assert_eq!(l.diagonal().as_slice(), &[1.0, 2.0, 1.0]);
        let l = laplacian(&build_grid(2, 2).unwrap());
        for i in 0..4 {
            assert_eq!(l.row(i).sum(), 0.0);
            assert_eq!(l[(i, i)], 2.0);
        }
    }

    #[test]
    fn lambda2_small_cases() {
        assert!((algebraic_connectivity(&build_line(2).unwrap()).unwrap() - 2.0).abs() < 1e-12);
        assert!((algebraic_connectivity(&build_line(3).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        let disconnected = Topology::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(algebraic_connectivity(&disconnected).unwrap().abs() < 1e-12);
    }

    #[test]
    fn two_hop_line3_by_hand() {
        // A = [[0,1,0],[1,0,1],[0,1,0]], A² = [[1,0,1],[0,2,0],[1,0,1]].
        let aug = h_hop_augment(&build_line(3).unwrap(), 2).unwrap();
        assert_eq!(aug.levels[0], build_line(3).unwrap());
        assert_eq!(aug.levels[1].edges(), vec![(0, 2, 1.0)]);
        assert_eq!(aug.union.edges(), vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]);
        // Union is the triangle: spectrum {0, 3, 3}.
        assert!((algebraic_connectivity(&aug.union).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_hop_union_is_identity() {
        let g = build_grid(3, 4).unwrap();
        assert_eq!(h_hop_augment(&g, 1).unwrap().union, g);
        assert!(h_hop_augment(&g, 0).is_err());
    }

    #[test]
    fn spectral_report_line3() {
        let r1 = spectral_report(&build_line(3).unwrap(), 1).unwrap();
        assert!((r1.lambda2_union - 1.0).abs() < 1e-12);
        assert!((r1.lower_bound - 1.0).abs() < 1e-12);
        let r2 = spectral_report(&build_line(3).unwrap(), 2).unwrap();
        assert!(r2.lambda2_union >= 1.0 + r2.lambda2_per_hop[1] - SPECTRAL_EPS);
    }

    #[test]
    fn spectral_report_rejects_disconnected() {
        let t = Topology::from_edges(3, [(0, 1, 1.0)]).unwrap();
        assert_eq!(spectral_report(&t, 1), Err(GraphError::Disconnected));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = build_random_geometric(12, 0.5, 3).unwrap();
        let text = g.to_edge_list();
        assert_eq!(Topology::from_edge_list(&text).unwrap(), g);
        let sym = Topology::from_edge_list("0 1 2.5\n1 0 2.5\n1 2\n").unwrap();
        assert_eq!(sym.edges(), vec![(0, 1, 2.5), (1, 2, 1.0)]);
        assert!(matches!(Topology::from_edge_list("0 x"), Err(GraphError::Parse { line: 1, .. })));
        assert!(Topology::from_edge_list("1 1").is_err());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Topology::from_edges(2, [(0, 0, 1.0)]).is_err());
        assert!(Topology::from_edges(2, [(0, 2, 1.0)]).is_err());
        assert!(Topology::from_edges(2, [(0, 1, 0.0)]).is_err());
    }
}
