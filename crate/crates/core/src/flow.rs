//! A small Edmonds-Karp max-flow over `f64` capacities, used to decide
//! transportation feasibility between observed-set masses and world
//! probabilities.

const EPS: f64 = 1e-13;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: f64,
    flow: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct MaxFlow {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl MaxFlow {
    pub fn new(nodes: usize) -> MaxFlow {
        MaxFlow {
            adj: vec![Vec::new(); nodes],
            edges: Vec::new(),
        }
    }

    /// Adds a directed edge and its residual twin; returns the edge id.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, flow: 0.0 });
        self.edges.push(Edge {
            to: from,
            cap: 0.0,
            flow: 0.0,
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    pub fn flow_on(&self, id: usize) -> f64 {
        self.edges[id].flow
    }

    fn residual(&self, id: usize) -> f64 {
        self.edges[id].cap - self.edges[id].flow
    }

    /// Runs Edmonds-Karp from `source` to `sink`; returns the total flow.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> f64 {
        let mut total = 0.0;
        loop {
            // BFS for the shortest augmenting path.
            let mut pred: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(source);
            let mut seen = vec![false; self.adj.len()];
            seen[source] = true;
            'bfs: while let Some(u) = queue.pop_front() {
                for &id in &self.adj[u] {
                    let v = self.edges[id].to;
                    if !seen[v] && self.residual(id) > EPS {
                        seen[v] = true;
                        pred[v] = Some(id);
                        if v == sink {
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            if !seen[sink] {
                return total;
            }
            // Bottleneck along the path.
            let mut bottleneck = f64::INFINITY;
            let mut v = sink;
            while v != source {
                let id = pred[v].unwrap();
                bottleneck = bottleneck.min(self.residual(id));
                v = self.edges[id ^ 1].to;
            }
            let mut v = sink;
            while v != source {
                let id = pred[v].unwrap();
                self.edges[id].flow += bottleneck;
                self.edges[id ^ 1].flow -= bottleneck;
                v = self.edges[id ^ 1].to;
            }
            total += bottleneck;
        }
    }

    /// Nodes reachable from `source` in the residual graph (the source side
    /// of a minimum cut once `max_flow` has run).
    pub fn reachable(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[source] = true;
        let mut stack = vec![source];
        while let Some(u) = stack.pop() {
            for &id in &self.adj[u] {
                let v = self.edges[id].to;
                if !seen[v] && self.residual(id) > EPS {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}
