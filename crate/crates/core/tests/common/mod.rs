//! Reference implementations used as oracles by the integration tests.
//! They share no code with the library.

#![allow(dead_code)]

use std::collections::VecDeque;

use macts::Topology;
use nalgebra::DMatrix;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Level-h adjacency for h = 1..=hops: weighted walk counts of length h,
/// self-loops dropped, computed with plain nested loops.
pub fn path_sum_levels(t: &Topology, hops: usize) -> Vec<DMatrix<f64>> {
    let n = t.n();
    let a = DMatrix::from_fn(n, n, |i, j| t.weight(i, j).unwrap_or(0.0));
    let mut power = a.clone();
    let mut out = Vec::new();
    for h in 1..=hops {
        if h > 1 {
            let mut next = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += power[(i, k)] * a[(k, j)];
                    }
                    next[(i, j)] = s;
                }
            }
            power = next;
        }
        let mut level = power.clone();
        for i in 0..n {
            level[(i, i)] = 0.0;
        }
        out.push(level);
    }
    out
}

/// Connectivity by breadth-first search over an adjacency list.
pub fn bfs_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}
