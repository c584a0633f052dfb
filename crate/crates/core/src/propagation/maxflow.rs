//! Dinic max-flow on real capacities.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: f64,
}

/// Residual graph. Arcs are stored in pairs, `e ^ 1` being the reverse of `e`.
#[derive(Debug, Clone)]
pub struct FlowGraph {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    cursor: Vec<usize>,
    /// Residuals at or below this are treated as saturated.
    tol: f64,
}

impl FlowGraph {
    pub fn new(nodes: usize) -> Self {
        Self {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
            level: vec![-1; nodes],
            cursor: vec![0; nodes],
            tol: 0.0,
        }
    }

    pub fn nodes(&self) -> usize {
        self.adj.len()
    }

    /// Adds `u -> v` with capacity `cap` and `v -> u` with capacity `rev`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: f64, rev: f64) {
        debug_assert!(cap >= 0.0 && rev >= 0.0);
        self.adj[u].push(self.arcs.len());
        self.arcs.push(Arc { to: v, cap });
        self.adj[v].push(self.arcs.len());
        self.arcs.push(Arc { to: u, cap: rev });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let a = &self.arcs[e];
                if a.cap > self.tol && self.level[a.to] < 0 {
                    self.level[a.to] = self.level[u] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        self.level[t] >= 0
    }

    /// One blocking-flow augmentation along a level path, iteratively.
    fn augment(&mut self, s: usize, t: usize) -> f64 {
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let push = path
                    .iter()
                    .map(|&e| self.arcs[e].cap)
                    .fold(f64::INFINITY, f64::min);
                for &e in &path {
                    self.arcs[e].cap -= push;
                    self.arcs[e ^ 1].cap += push;
                }
                return push;
            }
            let mut advanced = false;
            while self.cursor[u] < self.adj[u].len() {
                let e = self.adj[u][self.cursor[u]];
                let a = &self.arcs[e];
                if a.cap > self.tol && self.level[a.to] == self.level[u] + 1 {
                    path.push(e);
                    u = a.to;
                    advanced = true;
                    break;
                }
                self.cursor[u] += 1;
            }
            if !advanced {
                // dead end: retreat and skip the arc that led here
                self.level[u] = -1;
                match path.pop() {
                    Some(e) => {
                        u = self.arcs[e ^ 1].to;
                        self.cursor[u] += 1;
                    }
                    None => return 0.0,
                }
            }
        }
    }

    /// Maximum flow from `s` to `t`; the residual graph is left in place for
    /// [`FlowGraph::source_side`].
    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let scale = self.arcs.iter().map(|a| a.cap).fold(0.0, f64::max);
        self.tol = 1e-13 * scale;
        let mut flow = 0.0;
        while self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let f = self.augment(s, t);
                if f <= 0.0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }

    /// Nodes reachable from `s` in the residual graph after [`FlowGraph::max_flow`].
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &e in &self.adj[u] {
                let a = &self.arcs[e];
                if a.cap > self.tol && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        // CLRS flow network, max flow 23
        let mut g = FlowGraph::new(6);
        for (u, v, c) in [
            (0, 1, 16.0),
            (0, 2, 13.0),
            (2, 1, 4.0),
            (1, 3, 12.0),
            (3, 2, 9.0),
            (2, 4, 14.0),
            (4, 3, 7.0),
            (3, 5, 20.0),
            (4, 5, 4.0),
        ] {
            g.add_edge(u, v, c, 0.0);
        }
        assert!((g.max_flow(0, 5) - 23.0).abs() < 1e-12);
        let side = g.source_side(0);
        assert!(side[0] && !side[5]);
    }

    #[test]
    fn disconnected_sink() {
        let mut g = FlowGraph::new(3);
        g.add_edge(0, 1, 5.0, 0.0);
        assert_eq!(g.max_flow(0, 2), 0.0);
        assert_eq!(g.source_side(0), [true, true, false]);
    }
}
