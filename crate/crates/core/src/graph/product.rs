use serde::Serialize;

use super::{Conductance, GraphError, TreeGraph, VertexId, WeightedGraph};

/// A bag `{x} × H` is named by its tree coordinate `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BagId(pub VertexId);

/// Cartesian product `T □ wH`: tree edges carry weight 1, fiber edges carry
/// `w` times their weight in `H`.
#[derive(Debug, Clone)]
pub struct ProductGraph<W = num_rational::BigRational> {
    base: TreeGraph,
    fiber: WeightedGraph<W>,
    bag_weight: W,
    underlying: WeightedGraph<W>,
}

impl<W: Conductance> ProductGraph<W> {
    pub fn new(base: TreeGraph, fiber: WeightedGraph<W>, w: W) -> Result<Self, GraphError> {
        if !w.is_positive() {
            return Err(GraphError::NonPositiveWeight(w.to_string()));
        }
        if fiber.vertex_count() == 0 {
            return Err(GraphError::EmptyFiber);
        }
        if !fiber.is_connected() {
            return Err(GraphError::DisconnectedFiber);
        }
        let k = fiber.vertex_count();
        let mut underlying = WeightedGraph::new(base.vertex_count() * k);
        for x in 0..base.vertex_count() {
            for e in fiber.edges() {
                underlying.add_edge(x * k + e.u, x * k + e.v, w.mul(&e.weight))?;
            }
        }
        for (p, c) in base.edges() {
            for y in 0..k {
                underlying.add_edge(p * k + y, c * k + y, W::one())?;
            }
        }
        Ok(Self { base, fiber, bag_weight: w, underlying })
    }

    pub fn base(&self) -> &TreeGraph {
        &self.base
    }

    pub fn fiber(&self) -> &WeightedGraph<W> {
        &self.fiber
    }

    pub fn bag_weight(&self) -> &W {
        &self.bag_weight
    }

    pub fn graph(&self) -> &WeightedGraph<W> {
        &self.underlying
    }

    pub fn fiber_size(&self) -> usize {
        self.fiber.vertex_count()
    }

    pub fn bag_count(&self) -> usize {
        self.base.vertex_count()
    }

    pub fn vertex(&self, tree_vertex: VertexId, fiber_vertex: VertexId) -> VertexId {
        debug_assert!(fiber_vertex < self.fiber_size());
        tree_vertex * self.fiber_size() + fiber_vertex
    }

    /// `(tree, fiber)` coordinates of a product vertex.
    pub fn coordinates(&self, v: VertexId) -> (VertexId, VertexId) {
        (v / self.fiber_size(), v % self.fiber_size())
    }

    pub fn bag_of(&self, v: VertexId) -> Result<BagId, GraphError> {
        if v >= self.underlying.vertex_count() {
            return Err(GraphError::VertexOutOfRange {
                vertex: v,
                vertex_count: self.underlying.vertex_count(),
            });
        }
        Ok(BagId(v / self.fiber_size()))
    }

    /// Product vertices of a bag.
    pub fn bag_vertices(&self, bag: BagId) -> std::ops::Range<VertexId> {
        let k = self.fiber_size();
        bag.0 * k..(bag.0 + 1) * k
    }

    /// The bag of the tree root.
    pub fn central_bag(&self) -> BagId {
        BagId(self.base.root())
    }

    /// Same product with `f64` conductances, for the samplers.
    pub fn to_real(&self) -> ProductGraph<f64> {
        ProductGraph {
            base: self.base.clone(),
            fiber: self.fiber.to_real(),
            bag_weight: self.bag_weight.to_f64(),
            underlying: self.underlying.to_real(),
        }
    }
}

/// Structural facts about a fiber graph that some estimators assume.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub vertex_count: usize,
    pub connected: bool,
    /// Common degree when every vertex has the same degree.
    pub regular_degree: Option<usize>,
    /// Every vertex can be mapped to every other by a weight-preserving automorphism.
    pub vertex_transitive: bool,
}

impl FiberReport {
    pub fn inspect<W: Conductance>(h: &WeightedGraph<W>) -> Self {
        let n = h.vertex_count();
        let degrees: Vec<usize> = (0..n).map(|v| h.degree(v)).collect();
        let regular_degree = match degrees.first() {
            Some(&d0) if degrees.iter().all(|&d| d == d0) => Some(d0),
            _ => None,
        };
        let vertex_transitive = regular_degree.is_some() && (1..n).all(|v| automorphism_maps(h, 0, v));
        Self {
            vertex_count: n,
            connected: h.is_connected(),
            regular_degree,
            vertex_transitive,
        }
    }
}

/// Backtracking search for an automorphism sending `from` to `to`.
fn automorphism_maps<W: Conductance>(h: &WeightedGraph<W>, from: VertexId, to: VertexId) -> bool {
    let n = h.vertex_count();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    image[from] = to;
    used[to] = true;
    let order: Vec<VertexId> = std::iter::once(from).chain((0..n).filter(|&v| v != from)).collect();

    fn consistent<W: Conductance>(h: &WeightedGraph<W>, image: &[usize], v: VertexId) -> bool {
        if h.degree(v) != h.degree(image[v]) {
            return false;
        }
        (0..image.len()).filter(|&x| image[x] != usize::MAX && x != v).all(|x| {
            let here = h.find_edge(v, x).map(|e| &h.edge(e).weight);
            let there = h.find_edge(image[v], image[x]).map(|e| &h.edge(e).weight);
            here == there
        })
    }

    fn extend<W: Conductance>(
        h: &WeightedGraph<W>,
        order: &[VertexId],
        depth: usize,
        image: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        for t in 0..image.len() {
            if used[t] {
                continue;
            }
            image[v] = t;
            if consistent(h, image, v) {
                used[t] = true;
                if extend(h, order, depth + 1, image, used) {
                    return true;
                }
                used[t] = false;
            }
            image[v] = usize::MAX;
        }
        false
    }

    consistent(h, &image, from) && extend(h, &order, 1, &mut image, &mut used)
}
