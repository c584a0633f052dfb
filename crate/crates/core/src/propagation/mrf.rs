use alloc::vec;
use alloc::vec::Vec;

use super::maxflow::FlowGraph;
use super::{Blend, PropagationError, SuperpixelGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrfEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Energy `sum_i c_i |u_i - V_i| + lambda sum_ij w_ij min(|u_i - u_j|, T)`
/// over labellings drawn from a sorted set of depths.
#[derive(Debug, Clone, PartialEq)]
pub struct MrfProblem {
    initial: Vec<f64>,
    data_weights: Vec<f64>,
    edges: Vec<MrfEdge>,
    lambda: f64,
    truncation: f64,
    labels: Vec<f64>,
}

impl MrfProblem {
    /// `truncation` may be infinite for plain linear smoothness.
    pub fn new(
        initial: Vec<f64>,
        data_weights: Vec<f64>,
        edges: Vec<MrfEdge>,
        lambda: f64,
        truncation: f64,
        labels: Vec<f64>,
    ) -> Result<Self, PropagationError> {
        use PropagationError::InvalidProblem;
        let n = initial.len();
        if data_weights.len() != n {
            return Err(PropagationError::LengthMismatch {
                expected: n,
                got: data_weights.len(),
            });
        }
        if initial.iter().any(|v| !v.is_finite()) {
            return Err(InvalidProblem("initial depths must be finite"));
        }
        if data_weights.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(InvalidProblem("data weights must be finite and non-negative"));
        }
        if labels.len() < 2 || labels.iter().any(|l| !l.is_finite()) {
            return Err(InvalidProblem("need at least two finite labels"));
        }
        if labels.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(InvalidProblem("labels must be strictly increasing"));
        }
        for e in &edges {
            if e.a >= n || e.b >= n || e.a == e.b {
                return Err(InvalidProblem("edge endpoints must be distinct regions"));
            }
            if !(e.weight.is_finite() && e.weight >= 0.0) {
                return Err(InvalidProblem("edge weights must be finite and non-negative"));
            }
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(InvalidProblem("lambda must be finite and non-negative"));
        }
        if !(truncation > 0.0) {
            return Err(InvalidProblem("truncation must be positive"));
        }
        Ok(Self {
            initial,
            data_weights,
            edges,
            lambda,
            truncation,
            labels,
        })
    }

    /// Problem over a superpixel graph: confident regions weigh their data
    /// term by pixel count, low-confidence regions not at all, and edges weigh
    /// shared boundary length by colour similarity.
    pub fn from_graph(
        graph: &SuperpixelGraph,
        blend: &Blend,
        labels: Vec<f64>,
        lambda: f64,
        sigma_c: f64,
        truncation: f64,
    ) -> Result<Self, PropagationError> {
        if blend.values.len() != graph.regions.len() {
            return Err(PropagationError::LengthMismatch {
                expected: graph.regions.len(),
                got: blend.values.len(),
            });
        }
        let data_weights = graph
            .regions
            .iter()
            .zip(&blend.low_confidence)
            .map(|(r, &low)| if low { 0.0 } else { r.pixel_count as f64 })
            .collect();
        let edges = graph
            .edges
            .iter()
            .map(|e| {
                let d = graph.color_distance(e.a, e.b);
                MrfEdge {
                    a: e.a,
                    b: e.b,
                    weight: e.boundary as f64 * libm::exp(-d * d / (2.0 * sigma_c * sigma_c)),
                }
            })
            .collect();
        Self::new(blend.values.clone(), data_weights, edges, lambda, truncation, labels)
    }

    pub fn regions(&self) -> usize {
        self.initial.len()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn data_weights(&self) -> &[f64] {
        &self.data_weights
    }

    pub fn edges(&self) -> &[MrfEdge] {
        &self.edges
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    fn data(&self, i: usize, label: usize) -> f64 {
        self.data_weights[i] * (self.labels[label] - self.initial[i]).abs()
    }

    fn smooth(&self, w: f64, la: usize, lb: usize) -> f64 {
        self.lambda * w * (self.labels[la] - self.labels[lb]).abs().min(self.truncation)
    }

    /// Energy of a labelling given as label indices.
    pub fn energy(&self, labelling: &[usize]) -> f64 {
        let data: f64 = labelling.iter().enumerate().map(|(i, &l)| self.data(i, l)).sum();
        let smooth: f64 = self
            .edges
            .iter()
            .map(|e| self.smooth(e.weight, labelling[e.a], labelling[e.b]))
            .sum();
        data + smooth
    }

    /// Index of the label closest to `v`, lower on ties.
    pub fn nearest_label(&self, v: f64) -> usize {
        let mut best = 0;
        for (k, &l) in self.labels.iter().enumerate() {
            if (l - v).abs() < (self.labels[best] - v).abs() {
                best = k;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MrfSolution {
    /// Label index per region.
    pub labels: Vec<usize>,
    /// Depth per region.
    pub values: Vec<f64>,
    pub energy: f64,
    /// Energy of the winning search before its first move, then after every move.
    pub trace: Vec<f64>,
    pub sweeps: usize,
}

/// Optimal alpha-expansion move; returns the proposed labelling.
fn expansion_move(p: &MrfProblem, current: &[usize], alpha: usize) -> Vec<usize> {
    let n = p.regions();
    let (s, t) = (n, n + 1);
    let cost0: Vec<f64> = (0..n).map(|i| p.data(i, current[i])).collect();
    let mut cost1: Vec<f64> = (0..n).map(|i| p.data(i, alpha)).collect();
    let mut g = FlowGraph::new(n + 2);
    for e in &p.edges {
        let (i, j) = (e.a, e.b);
        let a = p.smooth(e.weight, current[i], current[j]);
        let b = p.smooth(e.weight, current[i], alpha);
        let c = p.smooth(e.weight, alpha, current[j]);
        cost1[i] += c - a;
        cost1[j] -= c;
        let pair = (b + c - a).max(0.0);
        if pair > 0.0 {
            g.add_edge(i, j, pair, 0.0);
        }
    }
    for i in 0..n {
        let m = cost0[i].min(cost1[i]);
        let (up, down) = (cost1[i] - m, cost0[i] - m);
        if up > 0.0 {
            g.add_edge(s, i, up, 0.0);
        }
        if down > 0.0 {
            g.add_edge(i, t, down, 0.0);
        }
    }
    g.max_flow(s, t);
    let source = g.source_side(s);
    (0..n)
        .map(|i| if source[i] { current[i] } else { alpha })
        .collect()
}

/// Optimal alpha-beta swap move among regions labelled `alpha` or `beta`.
fn swap_move(p: &MrfProblem, current: &[usize], alpha: usize, beta: usize) -> Vec<usize> {
    let n = p.regions();
    let active: Vec<Option<usize>> = {
        let mut next = 0;
        current
            .iter()
            .map(|&l| {
                (l == alpha || l == beta).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let m = active.iter().flatten().count();
    if m == 0 {
        return current.to_vec();
    }
    let (s, t) = (m, m + 1);
    // x = 0 keeps alpha, x = 1 takes beta
    let mut cost0 = vec![0.0; m];
    let mut cost1 = vec![0.0; m];
    for i in 0..n {
        if let Some(k) = active[i] {
            cost0[k] += p.data(i, alpha);
            cost1[k] += p.data(i, beta);
        }
    }
    let mut g = FlowGraph::new(m + 2);
    for e in &p.edges {
        match (active[e.a], active[e.b]) {
            (Some(ka), Some(kb)) => {
                let v = p.smooth(e.weight, alpha, beta);
                if v > 0.0 {
                    g.add_edge(ka, kb, v, v);
                }
            }
            (Some(k), None) | (None, Some(k)) => {
                let fixed = if active[e.a].is_some() { current[e.b] } else { current[e.a] };
                cost0[k] += p.smooth(e.weight, alpha, fixed);
                cost1[k] += p.smooth(e.weight, beta, fixed);
            }
            (None, None) => {}
        }
    }
    for k in 0..m {
        let low = cost0[k].min(cost1[k]);
        if cost1[k] > low {
            g.add_edge(s, k, cost1[k] - low, 0.0);
        }
        if cost0[k] > low {
            g.add_edge(k, t, cost0[k] - low, 0.0);
        }
    }
    g.max_flow(s, t);
    let source = g.source_side(s);
    (0..n)
        .map(|i| match active[i] {
            Some(k) => {
                if source[k] {
                    alpha
                } else {
                    beta
                }
            }
            None => current[i],
        })
        .collect()
}

struct Search<'a> {
    problem: &'a MrfProblem,
    labels: Vec<usize>,
    energy: f64,
    trace: Vec<f64>,
}

impl Search<'_> {
    fn offer(&mut self, proposal: Vec<usize>) -> bool {
        let e = self.problem.energy(&proposal);
        let accepted = e < self.energy - 1e-12 * self.energy.abs().max(1.0);
        if accepted {
            self.labels = proposal;
            self.energy = e;
        }
        debug_assert!(self.energy <= self.trace[self.trace.len() - 1]);
        self.trace.push(self.energy);
        accepted
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MrfOptions {
    /// Also search from every constant labelling and keep the lowest energy.
    pub constant_restarts: bool,
    pub max_sweeps: usize,
}

impl Default for MrfOptions {
    fn default() -> Self {
        Self {
            constant_restarts: true,
            max_sweeps: 100,
        }
    }
}

/// [`solve_mrf_with`] under default options.
pub fn solve_mrf(problem: &MrfProblem) -> MrfSolution {
    solve_mrf_with(problem, &MrfOptions::default())
}

/// Alpha-expansion from the nearest-label initialisation, alternated with
/// alpha-beta swap sweeps once expansion stalls, optionally repeated from each
/// constant labelling. The lowest-energy result wins, earlier starts on ties.
pub fn solve_mrf_with(problem: &MrfProblem, options: &MrfOptions) -> MrfSolution {
    let nearest: Vec<usize> = problem
        .initial
        .iter()
        .map(|&v| problem.nearest_label(v))
        .collect();
    let mut best = search(problem, nearest, options.max_sweeps);
    if options.constant_restarts && problem.regions() > 1 {
        for label in 0..problem.labels.len() {
            let s = search(problem, vec![label; problem.regions()], options.max_sweeps);
            if s.energy < best.energy {
                best = s;
            }
        }
    }
    best
}

/// Move-making search from a given labelling of label indices.
///
/// # Panics
/// If `labels` has the wrong length or an index out of range.
pub fn solve_mrf_from(problem: &MrfProblem, labels: Vec<usize>) -> MrfSolution {
    assert_eq!(labels.len(), problem.regions());
    assert!(labels.iter().all(|&l| l < problem.labels.len()));
    search(problem, labels, MrfOptions::default().max_sweeps)
}

fn search(problem: &MrfProblem, labels: Vec<usize>, max_sweeps: usize) -> MrfSolution {
    let energy = problem.energy(&labels);
    let mut search = Search {
        problem,
        labels,
        energy,
        trace: vec![energy],
    };
    let n_labels = problem.labels.len();
    let mut sweeps = 0;
    if problem.regions() > 0 {
        while sweeps < max_sweeps {
            sweeps += 1;
            let mut improved = false;
            for alpha in 0..n_labels {
                let proposal = expansion_move(problem, &search.labels, alpha);
                improved |= search.offer(proposal);
            }
            if improved {
                continue;
            }
            for alpha in 0..n_labels {
                for beta in alpha + 1..n_labels {
                    let proposal = swap_move(problem, &search.labels, alpha, beta);
                    improved |= search.offer(proposal);
                }
            }
            if !improved {
                break;
            }
        }
    }
    let values = search.labels.iter().map(|&l| problem.labels[l]).collect();
    MrfSolution {
        labels: search.labels,
        values,
        energy: search.energy,
        trace: search.trace,
        sweeps,
    }
}
