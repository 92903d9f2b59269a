//! Finite weighted graphs, rooted trees and tree-by-fiber products.
//!
//! All graphs are immutable once built and use dense vertex ids. Trees are
//! numbered in breadth-first order from the root, and a product vertex
//! `(x, y)` gets the id `x * |H| + y`, so bag membership is a division.

mod io;
mod product;
mod tree;

pub use io::{parse_dot, parse_edge_list, to_dot, to_edge_list};
pub use product::{BagId, FiberReport, ProductGraph};
pub use tree::{TreeGraph, TreeKind};

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("tree degree must be at least 3, got {0}")]
    InvalidDegree(usize),
    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: VertexId, vertex_count: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge weights must be strictly positive, got {0}")]
    NonPositiveWeight(String),
    #[error("fiber graph is disconnected")]
    DisconnectedFiber,
    #[error("fiber graph must have at least one vertex")]
    EmptyFiber,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Positive edge weight. Implemented for exact rationals and for `f64`;
/// a graph uses exactly one of the two.
pub trait Conductance: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn one() -> Self;
    fn is_positive(&self) -> bool;
    fn to_f64(&self) -> f64;
    fn mul(&self, other: &Self) -> Self;
    /// Lossless text form used by the edge-list and DOT writers.
    fn to_token(&self) -> String;
    fn from_token(token: &str) -> Option<Self>;
}

impl Conductance for BigRational {
    fn one() -> Self {
        One::one()
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn to_token(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn from_token(token: &str) -> Option<Self> {
        parse_rational(token)
    }
}

impl Conductance for f64 {
    fn one() -> Self {
        1.0
    }

    fn is_positive(&self) -> bool {
        *self > 0.0 && self.is_finite()
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn to_token(&self) -> String {
        // `{:?}` is the shortest representation that parses back to the same bits.
        format!("{self:?}")
    }

    fn from_token(token: &str) -> Option<Self> {
        token.trim().parse().ok()
    }
}

/// Parses `num/den`, an integer, or a decimal (optionally with exponent)
/// into an exact rational.
pub fn parse_rational(token: &str) -> Option<BigRational> {
    let token = token.trim();
    if token.is_empty() {
        return None;
    }
    if let Some((num, den)) = token.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match token.find(['e', 'E']) {
        Some(pos) => (&token[..pos], token[pos + 1..].parse::<i32>().ok()?),
        None => (token, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<W> {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: W,
}

impl<W> Edge<W> {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected simple graph with positive conductances on its edges.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<W = BigRational> {
    edges: Vec<Edge<W>>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
}

impl<W: Conductance> WeightedGraph<W> {
    pub fn new(vertex_count: usize) -> Self {
        Self {
            edges: Vec::new(),
            adjacency: vec![Vec::new(); vertex_count],
        }
    }

    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId, W)>,
    {
        let mut graph = Self::new(vertex_count);
        for (u, v, weight) in edges {
            graph.add_edge(u, v, weight)?;
        }
        Ok(graph)
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, weight: W) -> Result<EdgeId, GraphError> {
        let n = self.vertex_count();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::VertexOutOfRange { vertex: x, vertex_count: n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !weight.is_positive() {
            return Err(GraphError::NonPositiveWeight(weight.to_string()));
        }
        if self.find_edge(u, v).is_some() {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        let id = self.edges.len();
        self.edges.push(Edge { u, v, weight });
        self.adjacency[u].push((v, id));
        self.adjacency[v].push((u, id));
        Ok(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge<W> {
        &self.edges[id]
    }

    /// `(neighbor, edge id)` pairs incident to `v`.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let (a, b) = if self.adjacency[u].len() <= self.adjacency[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a].iter().find(|&&(x, _)| x == b).map(|&(_, e)| e)
    }

    /// Sum of conductances at `v`, as a float.
    pub fn weighted_degree(&self, v: VertexId) -> f64 {
        self.adjacency[v].iter().map(|&(_, e)| self.edges[e].weight.to_f64()).sum()
    }

    /// Vertices reachable from `start`.
    pub fn component_of(&self, start: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        if start >= seen.len() {
            return seen;
        }
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.component_of(0).iter().all(|&s| s)
    }

    /// Converts every weight to `f64`.
    pub fn to_real(&self) -> WeightedGraph<f64> {
        WeightedGraph {
            edges: self
                .edges
                .iter()
                .map(|e| Edge { u: e.u, v: e.v, weight: e.weight.to_f64() })
                .collect(),
            adjacency: self.adjacency.clone(),
        }
    }

    /// Product of the weights of the given edges.
    pub fn weight_of(&self, edges: &[EdgeId]) -> W {
        edges.iter().fold(W::one(), |acc, &e| acc.mul(&self.edges[e].weight))
    }

    /// True when `edges` is the edge set of a spanning tree.
    pub fn is_spanning_tree(&self, edges: &[EdgeId]) -> bool {
        let n = self.vertex_count();
        if n == 0 || edges.len() != n - 1 {
            return false;
        }
        if edges.iter().collect::<HashSet<_>>().len() != edges.len() {
            return false;
        }
        let mut dsu = DisjointSets::new(n);
        edges.iter().all(|&e| {
            let edge = &self.edges[e];
            dsu.union(edge.u, edge.v)
        })
    }
}

/// Union-find with path halving; small helper shared by the enumerators.
#[derive(Debug, Clone)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Complete graph `K_k` with unit weights; `K_2` is the single edge.
pub fn complete_graph<W: Conductance>(k: usize) -> WeightedGraph<W> {
    let mut g = WeightedGraph::new(k);
    for u in 0..k {
        for v in u + 1..k {
            g.add_edge(u, v, W::one()).expect("complete graph edges are valid");
        }
    }
    g
}

/// Cycle `C_k` with unit weights; `k >= 3`.
pub fn cycle_graph<W: Conductance>(k: usize) -> WeightedGraph<W> {
    let mut g = WeightedGraph::new(k);
    if k >= 3 {
        for u in 0..k {
            g.add_edge(u, (u + 1) % k, W::one()).expect("cycle edges are valid");
        }
    }
    g
}

/// Path on `k` vertices with unit weights.
pub fn path_graph<W: Conductance>(k: usize) -> WeightedGraph<W> {
    let mut g = WeightedGraph::new(k);
    for u in 1..k {
        g.add_edge(u - 1, u, W::one()).expect("path edges are valid");
    }
    g
}
