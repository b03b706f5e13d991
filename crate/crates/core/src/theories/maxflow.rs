use std::collections::VecDeque;

use crate::scalar::Scalar;

#[derive(Clone, Debug)]
struct Edge<T> {
    to: usize,
    cap: T,
    flow: T,
}

/// Edmonds–Karp max flow with a deterministic augmentation order: each round
/// augments along the lexicographically smallest (by node id sequence)
/// among the shortest residual source-sink paths.
///
/// Residual capacities at or below `floor` are treated as saturated, which
/// keeps the loop from chasing rounding noise.
#[derive(Clone, Debug)]
pub struct LexMaxFlow<T> {
    edges: Vec<Edge<T>>,
    adj: Vec<Vec<usize>>,
    sorted: bool,
    floor: T,
}

impl<T: Scalar> LexMaxFlow<T> {
    pub fn new(nodes: usize) -> Self {
        LexMaxFlow {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
            sorted: true,
            floor: T::mass_floor(),
        }
    }

    pub fn with_floor(mut self, floor: T) -> Self {
        self.floor = floor;
        self
    }

    pub fn nodes(&self) -> usize {
        self.adj.len()
    }

    /// Adds a directed edge and returns its id for [`flow`](Self::flow).
    pub fn add_edge(&mut self, from: usize, to: usize, cap: T) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge {
            to,
            cap,
            flow: T::zero(),
        });
        self.edges.push(Edge {
            to: from,
            cap: T::zero(),
            flow: T::zero(),
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        self.sorted = false;
        id
    }

    pub fn flow(&self, edge: usize) -> T {
        self.edges[edge].flow
    }

    #[inline]
    fn residual(&self, e: usize) -> T {
        if e & 1 == 0 {
            self.edges[e].cap - self.edges[e].flow
        } else {
            self.edges[e ^ 1].flow
        }
    }

    fn push(&mut self, e: usize, amount: T) {
        if e & 1 == 0 {
            self.edges[e].flow = self.edges[e].flow + amount;
        } else {
            self.edges[e ^ 1].flow = self.edges[e ^ 1].flow - amount;
        }
    }

    /// Residual distance to `sink` for every node (`usize::MAX` if cut off).
    fn distances_to(&self, sink: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.nodes()];
        dist[sink] = 0;
        let mut queue = VecDeque::from([sink]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                // e runs v -> w; its twin runs w -> v
                let w = self.edges[e].to;
                if dist[w] == usize::MAX && self.residual(e ^ 1) > self.floor {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Runs to completion and returns the flow value.
    pub fn run(&mut self, source: usize, sink: usize) -> T {
        if !self.sorted {
            for list in &mut self.adj {
                list.sort_by_key(|&e| self.edges[e].to);
            }
            self.sorted = true;
        }
        let mut value = T::zero();
        let mut path = Vec::new();
        loop {
            let dist = self.distances_to(sink);
            if dist[source] == usize::MAX {
                break;
            }
            path.clear();
            let mut u = source;
            let mut bottleneck = T::infinity();
            while u != sink {
                let e = self.adj[u]
                    .iter()
                    .copied()
                    .find(|&e| {
                        let w = self.edges[e].to;
                        dist[w] != usize::MAX
                            && dist[w] + 1 == dist[u]
                            && self.residual(e) > self.floor
                    })
                    .expect("BFS layering guarantees a next hop");
                bottleneck = bottleneck.min(self.residual(e));
                path.push(e);
                u = self.edges[e].to;
            }
            for &e in &path {
                self.push(e, bottleneck);
            }
            value = value + bottleneck;
        }
        value
    }
}
