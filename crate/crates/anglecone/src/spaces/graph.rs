//! Weighted graphs with cached single-source shortest-path trees.
//!
//! Distance fields r_p and r_q are the only quantities a scan ever queries,
//! so one cached Dijkstra tree per source node serves an entire run. The
//! cache is behind a mutex; readers either hit a finished tree or compute it
//! once, so concurrent scans see consistent distances.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};

#[derive(Debug)]
pub struct Graph {
    adj: Vec<Vec<(usize, f64)>>,
    edges: Vec<(usize, usize, f64)>,
    cache: Mutex<HashMap<usize, Arc<Vec<f64>>>>,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        Graph {
            adj: self.adj.clone(),
            edges: self.edges.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl Graph {
    pub fn from_edges(edges: &[(usize, usize, f64)]) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidSpace("graph has no edges".into()));
        }
        let n = edges
            .iter()
            .map(|&(u, v, _)| u.max(v))
            .max()
            .unwrap_or(0)
            + 1;
        let mut adj = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidSpace(format!(
                    "edge ({u},{v}) has non-positive weight {w}"
                )));
            }
            if u == v {
                return Err(Error::InvalidSpace(format!("self-loop at node {u}")));
            }
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for nbrs in &mut adj {
            nbrs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        }
        Ok(Graph {
            adj,
            edges: edges.to_vec(),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn min_edge_weight(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.2)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check_node(&self, id: usize) -> Result<()> {
        if id < self.adj.len() {
            Ok(())
        } else {
            Err(Error::InvalidPoint(format!(
                "node {id} out of range (graph has {} nodes)",
                self.adj.len()
            )))
        }
    }

    pub fn is_connected(&self) -> bool {
        let d = self.distances_from(0);
        d.iter().all(|x| x.is_finite())
    }

    /// Shortest-path distances from `src` to every node, cached.
    pub fn distances_from(&self, src: usize) -> Arc<Vec<f64>> {
        if let Some(hit) = self.cache.lock().unwrap().get(&src) {
            return Arc::clone(hit);
        }
        let dist = Arc::new(self.dijkstra(src));
        self.cache
            .lock()
            .unwrap()
            .entry(src)
            .or_insert_with(|| Arc::clone(&dist));
        dist
    }

    /// Warms the cache so a following parallel scan only reads.
    pub fn precompute(&self, sources: &[usize]) {
        for &s in sources {
            let _ = self.distances_from(s);
        }
    }

    fn dijkstra(&self, src: usize) -> Vec<f64> {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        dist[src] = 0.0;
        let mut heap: BinaryHeap<Reverse<(ordered::F64, usize)>> = BinaryHeap::new();
        heap.push(Reverse((ordered::F64(0.0), src)));
        while let Some(Reverse((ordered::F64(d), u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((ordered::F64(nd), v)));
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: usize, b: usize) -> Result<f64> {
        self.check_node(a)?;
        self.check_node(b)?;
        let d = self.distances_from(a)[b];
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::Disconnected(a, b))
        }
    }

    /// Nodes within shortest-path distance `r` of `x`, excluding `x`.
    pub fn ball(&self, x: usize, r: f64) -> Vec<(usize, f64)> {
        let dist = self.distances_from(x);
        dist.iter()
            .enumerate()
            .filter(|&(y, &d)| y != x && d > 0.0 && d <= r)
            .map(|(y, &d)| (y, d))
            .collect()
    }

    /// All minimum-length paths from `x` to `z` in deterministic
    /// (lexicographic by node id) order, capped at `max_paths`.
    ///
    /// Equal-length alternatives are admitted up to a 1e-12 relative
    /// tolerance on accumulated float sums.
    pub fn shortest_paths(&self, x: usize, z: usize, max_paths: usize) -> Result<Vec<Vec<usize>>> {
        self.check_node(x)?;
        self.check_node(z)?;
        let dist = self.distances_from(z);
        if !dist[x].is_finite() {
            return Err(Error::Disconnected(x, z));
        }
        let tol = 1e-12 * dist[x].max(1.0);
        let mut out = Vec::new();
        let mut path = vec![x];
        self.enumerate(x, z, &dist, tol, &mut path, &mut out, max_paths);
        Ok(out)
    }

    fn enumerate(
        &self,
        u: usize,
        z: usize,
        dist_to_z: &[f64],
        tol: f64,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if u == z {
            out.push(path.clone());
            return;
        }
        for &(v, w) in &self.adj[u] {
            if (dist_to_z[u] - (w + dist_to_z[v])).abs() <= tol {
                path.push(v);
                self.enumerate(v, z, dist_to_z, tol, path, out, cap);
                path.pop();
            }
        }
    }
}

mod ordered {
    /// Total order on finite non-NaN distances for the heap.
    #[derive(PartialEq)]
    pub struct F64(pub f64);
    impl Eq for F64 {}
    impl PartialOrd for F64 {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for F64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force shortest path by enumerating all simple paths.
    fn brute_shortest(edges: &[(usize, usize, f64)], a: usize, b: usize) -> f64 {
        let n = edges.iter().map(|&(u, v, _)| u.max(v)).max().unwrap() + 1;
        let mut adj = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        fn dfs(
            adj: &[Vec<(usize, f64)>],
            u: usize,
            b: usize,
            seen: &mut Vec<bool>,
            acc: f64,
            best: &mut f64,
        ) {
            if u == b {
                *best = best.min(acc);
                return;
            }
            for &(v, w) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    dfs(adj, v, b, seen, acc + w, best);
                    seen[v] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        let mut seen = vec![false; n];
        seen[a] = true;
        dfs(&adj, a, b, &mut seen, 0.0, &mut best);
        best
    }

    #[test]
    fn path_graph_distance_matches_enumeration() {
        let edges = [(0, 1, 1.0), (1, 2, 2.0)];
        let g = Graph::from_edges(&edges).unwrap();
        assert_eq!(g.distance(0, 2).unwrap(), 3.0);
        assert_eq!(g.distance(0, 2).unwrap(), brute_shortest(&edges, 0, 2));
    }

    #[test]
    fn dijkstra_matches_brute_force_on_random_graph() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 8;
        let mut edges = Vec::new();
        for u in 0..n - 1 {
            edges.push((u, u + 1, rng.gen_range(0.1..2.0)));
        }
        for _ in 0..6 {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                edges.push((u.min(v), u.max(v), rng.gen_range(0.1..2.0)));
            }
        }
        let g = Graph::from_edges(&edges).unwrap();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let d = g.distance(a, b).unwrap();
                let bf = brute_shortest(&edges, a, b);
                assert!((d - bf).abs() < 1e-12, "{a}->{b}: {d} vs {bf}");
            }
        }
    }

    #[test]
    fn disconnected_nodes_error() {
        let g = Graph::from_edges(&[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!g.is_connected());
        assert!(matches!(g.distance(0, 3), Err(Error::Disconnected(0, 3))));
    }

    #[test]
    fn equal_length_paths_enumerate_deterministically() {
        // Diamond: two paths 0-1-3 and 0-2-3 of equal length.
        let g = Graph::from_edges(&[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)]).unwrap();
        let paths = g.shortest_paths(0, 3, 16).unwrap();
        assert_eq!(paths, vec![vec![0, 1, 3], vec![0, 2, 3]]);
        let again = g.shortest_paths(0, 3, 16).unwrap();
        assert_eq!(paths, again);
    }
}
