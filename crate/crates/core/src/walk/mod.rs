//! Conductance-weighted random walks, loop erasure, Wilson's algorithm and
//! the Monte Carlo estimators built on them.
//!
//! Every sampler draws from a [`WalkRng`] obtained from an [`RngStream`], so
//! a `(seed, stream)` pair replays a run exactly.

mod estimate;
mod experiments;
mod rng;
mod trips;

pub use estimate::{estimate_mean, map_chunks, proportion, Estimator, EstimatorReport, CHUNK_SIZE, Z_99};
pub use experiments::{
    bag_count_distribution, escape_curve, escape_probability, memorable_tail_curve, memorable_tail_probability,
    phase_probe, BagCountReport, HypothesisFlags, PhaseRow, PhaseTable, Sampler,
};
pub use rng::{RngStream, WalkRng};
pub use trips::{decompose_trips, erased_bag_check, memorable_bags, ErasureCheck, SkipReason, Trip};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exact::SpanningTree;
use crate::graph::{Conductance, EdgeId, GraphError, VertexId, WeightedGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("stopping set is empty")]
    EmptyTarget,
    #[error("no stopping vertex is reachable from {start}")]
    Unreachable { start: VertexId },
    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: VertexId, vertex_count: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("endpoints must differ")]
    SameEndpoints,
    #[error("sample count must be positive")]
    NoSamples,
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("trip precondition violated: {0}")]
    TripPrecondition(String),
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A walk as a vertex sequence. `stream` is set when the walk was drawn
/// from a fresh generator and can be replayed from it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Walk {
    pub vertices: Vec<VertexId>,
    pub stream: Option<RngStream>,
}

impl Walk {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> Option<VertexId> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<VertexId> {
        self.vertices.last().copied()
    }
}

/// Hit-set stopping rule: the walk ends at its first visit to a member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopSet {
    members: Vec<bool>,
    size: usize,
}

impl StopSet {
    pub fn new<I: IntoIterator<Item = VertexId>>(vertex_count: usize, vertices: I) -> Result<Self, WalkError> {
        let mut members = vec![false; vertex_count];
        let mut size = 0;
        for v in vertices {
            if v >= vertex_count {
                return Err(WalkError::VertexOutOfRange { vertex: v, vertex_count });
            }
            if !members[v] {
                members[v] = true;
                size += 1;
            }
        }
        Ok(Self { members, size })
    }

    pub fn single(vertex_count: usize, v: VertexId) -> Result<Self, WalkError> {
        Self::new(vertex_count, [v])
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.get(v).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }
}

/// Adjacency with cumulative conductances, built once per graph and shared
/// across samples.
#[derive(Debug, Clone)]
pub struct Walker {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    edge_ids: Vec<EdgeId>,
    cumulative: Vec<f64>,
    component: Vec<usize>,
}

impl Walker {
    pub fn new<W: Conductance>(g: &WeightedGraph<W>) -> Self {
        let n = g.vertex_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut edge_ids = Vec::new();
        let mut cumulative = Vec::new();
        offsets.push(0);
        for v in 0..n {
            let mut acc = 0.0;
            for &(u, e) in g.neighbors(v) {
                acc += g.edge(e).weight.to_f64();
                targets.push(u);
                edge_ids.push(e);
                cumulative.push(acc);
            }
            offsets.push(targets.len());
        }
        let mut component = vec![usize::MAX; n];
        let mut label = 0;
        for s in 0..n {
            if component[s] != usize::MAX {
                continue;
            }
            component[s] = label;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in &targets[offsets[x]..offsets[x + 1]] {
                    if component[y] == usize::MAX {
                        component[y] = label;
                        stack.push(y);
                    }
                }
            }
            label += 1;
        }
        Self { offsets, targets, edge_ids, cumulative, component }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_connected(&self) -> bool {
        self.component.iter().all(|&c| c == 0)
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), WalkError> {
        if v >= self.vertex_count() {
            return Err(WalkError::VertexOutOfRange { vertex: v, vertex_count: self.vertex_count() });
        }
        Ok(())
    }

    fn check_reachable(&self, start: VertexId, stop: &StopSet) -> Result<(), WalkError> {
        self.check_vertex(start)?;
        if stop.is_empty() {
            return Err(WalkError::EmptyTarget);
        }
        let reachable = (0..self.vertex_count()).any(|v| stop.contains(v) && self.component[v] == self.component[start]);
        if !reachable {
            return Err(WalkError::Unreachable { start });
        }
        Ok(())
    }

    /// One conductance-weighted step, returning the new vertex and the edge used.
    pub fn step_edge<R: Rng + ?Sized>(&self, v: VertexId, rng: &mut R) -> (VertexId, EdgeId) {
        let (lo, hi) = (self.offsets[v], self.offsets[v + 1]);
        assert!(hi > lo, "vertex {v} is isolated");
        let cum = &self.cumulative[lo..hi];
        let x = rng.gen::<f64>() * cum[cum.len() - 1];
        let i = cum.iter().position(|&c| c > x).unwrap_or(cum.len() - 1);
        (self.targets[lo + i], self.edge_ids[lo + i])
    }

    pub fn step<R: Rng + ?Sized>(&self, v: VertexId, rng: &mut R) -> VertexId {
        self.step_edge(v, rng).0
    }

    /// Walk from `start` until the first visit to `stop`, inclusive.
    pub fn walk<R: Rng + ?Sized>(&self, start: VertexId, stop: &StopSet, rng: &mut R) -> Result<Vec<VertexId>, WalkError> {
        self.check_reachable(start, stop)?;
        let mut path = vec![start];
        let mut x = start;
        while !stop.contains(x) {
            x = self.step(x, rng);
            path.push(x);
        }
        Ok(path)
    }

    /// Loop-erased walk from `a` to `b`, erasing loops as they close.
    pub fn lerw<R: Rng + ?Sized>(&self, a: VertexId, b: VertexId, rng: &mut R) -> Result<Vec<VertexId>, WalkError> {
        self.check_vertex(b)?;
        if a == b {
            return Err(WalkError::SameEndpoints);
        }
        self.check_reachable(a, &StopSet::single(self.vertex_count(), b)?)?;
        let mut position = vec![usize::MAX; self.vertex_count()];
        let mut path = vec![a];
        position[a] = 0;
        let mut x = a;
        while x != b {
            x = self.step(x, rng);
            if position[x] != usize::MAX {
                for &v in &path[position[x] + 1..] {
                    position[v] = usize::MAX;
                }
                path.truncate(position[x] + 1);
            } else {
                position[x] = path.len();
                path.push(x);
            }
        }
        Ok(path)
    }

    /// Edge ids of a spanning tree drawn by Wilson's algorithm, adding
    /// branches from the vertices in increasing id order.
    pub fn wilson<R: Rng + ?Sized>(&self, root: VertexId, rng: &mut R) -> Result<Vec<EdgeId>, WalkError> {
        self.check_vertex(root)?;
        if !self.is_connected() {
            return Err(WalkError::Disconnected);
        }
        let n = self.vertex_count();
        let mut in_tree = vec![false; n];
        let mut next = vec![(usize::MAX, usize::MAX); n];
        in_tree[root] = true;
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        for v in 0..n {
            let mut x = v;
            while !in_tree[x] {
                next[x] = self.step_edge(x, rng);
                x = next[x].0;
            }
            // Following the last exit from each vertex traces the loop erasure.
            let mut x = v;
            while !in_tree[x] {
                in_tree[x] = true;
                edges.push(next[x].1);
                x = next[x].0;
            }
        }
        edges.sort_unstable();
        Ok(edges)
    }
}

/// Chronological loop erasure: keep a simple path and cut it back whenever
/// the walk returns to one of its vertices.
pub fn loop_erase(walk: &[VertexId]) -> Vec<VertexId> {
    let mut position = std::collections::HashMap::new();
    let mut path: Vec<VertexId> = Vec::with_capacity(walk.len());
    for &v in walk {
        if let Some(&i) = position.get(&v) {
            for u in path.drain(i + 1..) {
                position.remove(&u);
            }
        } else {
            position.insert(v, path.len());
            path.push(v);
        }
    }
    path
}

pub fn random_walk<W: Conductance>(
    g: &WeightedGraph<W>,
    start: VertexId,
    stop: &StopSet,
    stream: RngStream,
) -> Result<Walk, WalkError> {
    let vertices = Walker::new(g).walk(start, stop, &mut stream.rng())?;
    Ok(Walk { vertices, stream: Some(stream) })
}

/// Loop-erased random walk from `a` stopped at `b`. Consumes the same draws
/// as [`random_walk`] with the same stream, so it equals the erasure of that walk.
pub fn lerw<W: Conductance>(g: &WeightedGraph<W>, a: VertexId, b: VertexId, stream: RngStream) -> Result<Walk, WalkError> {
    let vertices = Walker::new(g).lerw(a, b, &mut stream.rng())?;
    Ok(Walk { vertices, stream: Some(stream) })
}

pub fn wilson_ust<W: Conductance>(g: &WeightedGraph<W>, root: VertexId, stream: RngStream) -> Result<SpanningTree<W>, WalkError> {
    let edges = Walker::new(g).wilson(root, &mut stream.rng())?;
    let weight = g.weight_of(&edges);
    Ok(SpanningTree { edges, weight })
}
