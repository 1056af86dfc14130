//! Exact bottleneck distance between persistence diagrams.
//!
//! The diagonal is handled by the usual reduction to a square assignment
//! problem: every point of one diagram may be matched to a point of the other
//! diagram or to its own orthogonal projection onto the diagonal, and
//! projections match each other at zero cost. The optimum is one of finitely
//! many realized costs, so a binary search over the sorted candidate set with
//! a perfect-matching test at each threshold is exact.

use std::collections::VecDeque;

use crate::persistence::PersistenceDiagram;

fn linf(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).abs().max((p.1 - q.1).abs())
}

/// Sup-norm distance from a point to the diagonal.
fn to_diagonal(p: (f64, f64)) -> f64 {
    (p.1 - p.0) / 2.0
}

/// Finite points of two diagrams together with every cost a matching can
/// realize.
#[derive(Debug, Clone)]
pub struct MatchingInstance {
    a: Vec<(f64, f64)>,
    b: Vec<(f64, f64)>,
    candidates: Vec<f64>,
}

impl MatchingInstance {
    pub fn new(a: Vec<(f64, f64)>, b: Vec<(f64, f64)>) -> Self {
        let mut candidates: Vec<f64> = Vec::with_capacity(a.len() * b.len() + a.len() + b.len() + 1);
        candidates.push(0.0);
        candidates.extend(a.iter().chain(&b).map(|&p| to_diagonal(p)));
        for &p in &a {
            candidates.extend(b.iter().map(|&q| linf(p, q)));
        }
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();
        MatchingInstance { a, b, candidates }
    }

    /// Sorted, deduplicated realized costs; the optimum is one of them.
    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    /// Left side: `a` then projections of `b`. Right side: `b` then
    /// projections of `a`.
    fn graph(&self, c: f64) -> Vec<Vec<usize>> {
        let (p, q) = (self.a.len(), self.b.len());
        let mut adj = vec![Vec::new(); p + q];
        for (i, &pa) in self.a.iter().enumerate() {
            for (j, &pb) in self.b.iter().enumerate() {
                if linf(pa, pb) <= c {
                    adj[i].push(j);
                }
            }
            if to_diagonal(pa) <= c {
                adj[i].push(q + i);
            }
        }
        for (j, &pb) in self.b.iter().enumerate() {
            let row = &mut adj[p + j];
            if to_diagonal(pb) <= c {
                row.push(j);
            }
            row.extend(q..q + p);
        }
        adj
    }

    /// True if a perfect matching exists using only edges of cost `<= c`.
    pub fn feasible(&self, c: f64) -> bool {
        let n = self.a.len() + self.b.len();
        max_bipartite_matching(&self.graph(c), n) == n
    }

    /// Smallest feasible candidate cost.
    pub fn solve(&self) -> f64 {
        if self.a.is_empty() && self.b.is_empty() {
            return 0.0;
        }
        // the largest candidate is always feasible: send everything to the diagonal
        let (mut lo, mut hi) = (0usize, self.candidates.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.feasible(self.candidates[mid]) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        self.candidates[lo]
    }
}

/// Size of a maximum matching (Hopcroft–Karp). `adj[u]` lists the right
/// vertices adjacent to left vertex `u`.
pub fn max_bipartite_matching(adj: &[Vec<usize>], n_right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_left = vec![FREE; n_left];
    let mut match_right = vec![FREE; n_right];
    let mut dist = vec![0usize; n_left];
    let mut size = 0;

    loop {
        // BFS layers from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = FREE;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_right[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == FREE {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return size;
        }
        for u in 0..n_left {
            if match_left[u] == FREE && augment(u, adj, &mut match_left, &mut match_right, &mut dist) {
                size += 1;
            }
        }
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_left: &mut [usize],
    match_right: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &v in &adj[u] {
        let w = match_right[v];
        let ok = w == usize::MAX
            || (dist[w] == dist[u].wrapping_add(1) && augment(w, adj, match_left, match_right, dist));
        if ok {
            match_left[u] = v;
            match_right[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// Bottleneck distance between the degree-`k` parts of two diagrams.
///
/// Finite points go through [`MatchingInstance`]. Essential classes are
/// matched to each other in order of birth; if their counts differ the
/// distance is `+∞`. The result is the larger of the two parts.
pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram, k: usize) -> f64 {
    let ea = a.essential_births(k);
    let eb = b.essential_births(k);
    if ea.len() != eb.len() {
        return f64::INFINITY;
    }
    let essential = ea
        .iter()
        .zip(&eb)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let finite = MatchingInstance::new(a.finite_points(k), b.finite_points(k)).solve();
    finite.max(essential)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistances {
    pub per_degree: Vec<(usize, f64)>,
    pub max: f64,
}

/// Bottleneck distance in every degree from 0 up to the highest degree
/// present in either diagram.
pub fn bottleneck_all_degrees(a: &PersistenceDiagram, b: &PersistenceDiagram) -> DegreeDistances {
    let top = a.max_degree().max(b.max_degree());
    let per_degree: Vec<(usize, f64)> = top
        .map(|t| (0..=t).map(|k| (k, bottleneck_distance(a, b, k))).collect())
        .unwrap_or_default();
    let max = per_degree.iter().map(|&(_, d)| d).fold(0.0, f64::max);
    DegreeDistances { per_degree, max }
}
