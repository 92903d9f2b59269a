use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{contracted_count, CountError, ExactScalar};
use crate::graph::{complete_graph, DisjointSets, EdgeId, ProductGraph, TreeGraph, TreeKind, VertexId, WeightedGraph};

pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// Vertex cap for [`classify_by_paths`]; each class costs one sparse
/// determinant of this size.
pub const DEFAULT_CLASSIFICATION_CAP: usize = 1024;

/// Edge set of a spanning tree together with its weight (product of the
/// conductances of its edges).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanningTree<W = BigRational> {
    pub edges: Vec<EdgeId>,
    #[serde(skip)]
    pub weight: W,
}

/// All spanning trees of a graph with at most `max_vertices` vertices.
pub fn enumerate_spanning_trees(
    g: &WeightedGraph<BigRational>,
    max_vertices: usize,
) -> Result<Vec<SpanningTree>, CountError> {
    let n = g.vertex_count();
    if n > max_vertices {
        return Err(CountError::GraphTooLarge { vertex_count: n, cap: max_vertices });
    }
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    let mut chosen = Vec::with_capacity(n - 1);
    search(g, 0, &mut chosen, DisjointSets::new(n), &mut out);
    Ok(out)
}

fn search(
    g: &WeightedGraph<BigRational>,
    next: EdgeId,
    chosen: &mut Vec<EdgeId>,
    dsu: DisjointSets,
    out: &mut Vec<SpanningTree>,
) {
    let need = g.vertex_count() - 1 - chosen.len();
    if need == 0 {
        out.push(SpanningTree { edges: chosen.clone(), weight: g.weight_of(chosen) });
        return;
    }
    if g.edge_count() - next < need {
        return;
    }
    let edge = g.edge(next);
    let mut with = dsu.clone();
    if with.union(edge.u, edge.v) {
        chosen.push(next);
        search(g, next + 1, chosen, with, out);
        chosen.pop();
    }
    search(g, next + 1, chosen, dsu, out);
}

fn check_edge_fiber(g: &ProductGraph<BigRational>) -> Result<(), CountError> {
    if g.fiber_size() != 2 || g.fiber().edge_count() != 1 {
        return Err(CountError::FiberNotEdge);
    }
    Ok(())
}

/// Number of bags entered by the tree path between the two vertices of the
/// root bag.
fn bags_on_root_path(g: &ProductGraph<BigRational>, tree: &SpanningTree) -> usize {
    let graph = g.graph();
    let n = graph.vertex_count();
    let mut adjacency: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for &e in &tree.edges {
        let edge = graph.edge(e);
        adjacency[edge.u].push(edge.v);
        adjacency[edge.v].push(edge.u);
    }
    let root = g.base().root();
    let (start, goal) = (g.vertex(root, 0), g.vertex(root, 1));
    let mut previous = vec![usize::MAX; n];
    let mut stack = vec![start];
    previous[start] = start;
    while let Some(x) = stack.pop() {
        if x == goal {
            break;
        }
        for &y in &adjacency[x] {
            if previous[y] == usize::MAX {
                previous[y] = x;
                stack.push(y);
            }
        }
    }
    let mut bags = std::collections::BTreeSet::new();
    let mut x = goal;
    loop {
        bags.insert(g.coordinates(x).0);
        if x == start {
            break;
        }
        x = previous[x];
    }
    bags.len()
}

/// Splits the weighted spanning-tree count of `T □ wK_2` by the number of
/// bags that the path between `(root, 0)` and `(root, 1)` enters, by
/// enumerating every spanning tree.
pub fn classify_spanning_trees(
    g: &ProductGraph<BigRational>,
    max_vertices: usize,
) -> Result<BTreeMap<usize, ExactScalar>, CountError> {
    check_edge_fiber(g)?;
    let mut classes = BTreeMap::new();
    for tree in enumerate_spanning_trees(g.graph(), max_vertices)? {
        let m = bags_on_root_path(g, &tree);
        *classes.entry(m).or_insert_with(BigRational::zero) += tree.weight;
    }
    Ok(classes)
}

/// How [`classify_by_paths`] visits candidate paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathGrouping {
    /// One determinant per tree vertex.
    Exhaustive,
    /// One determinant per depth, scaled by the number of vertices at that
    /// depth. Valid for perfect trees and balls rooted at their center,
    /// whose rooted automorphisms act transitively on every level; other
    /// trees fall back to [`PathGrouping::Exhaustive`].
    ByDepth,
}

/// Same split as [`classify_spanning_trees`], computed without enumeration.
///
/// In `T □ wK_2` the root-bag path descends the tree along one branch,
/// crosses a bag at its deepest point and climbs back, so it is fixed by its
/// turning vertex `x`. The weight of the trees containing that path is the
/// path weight times the count of the graph with the path contracted.
pub fn classify_by_paths(
    g: &ProductGraph<BigRational>,
    grouping: PathGrouping,
    max_vertices: usize,
) -> Result<BTreeMap<usize, ExactScalar>, CountError> {
    check_edge_fiber(g)?;
    let graph = g.graph();
    if graph.vertex_count() > max_vertices {
        return Err(CountError::GraphTooLarge { vertex_count: graph.vertex_count(), cap: max_vertices });
    }
    let base = g.base();
    let symmetric = grouping == PathGrouping::ByDepth && matches!(base.kind(), TreeKind::Perfect | TreeKind::Ball);
    let mut per_depth: Vec<usize> = vec![0; base.height() + 1];
    for x in 0..base.vertex_count() {
        per_depth[base.depth(x)] += 1;
    }
    let mut classes = BTreeMap::new();
    let mut representative_done = vec![false; base.height() + 1];
    for turn in 0..base.vertex_count() {
        let depth = base.depth(turn);
        let multiplicity = if symmetric {
            if representative_done[depth] {
                continue;
            }
            representative_done[depth] = true;
            per_depth[depth]
        } else {
            1
        };
        let bags = base.path(base.root(), turn);
        let mut edges = Vec::with_capacity(2 * bags.len() - 1);
        for pair in bags.windows(2) {
            for y in 0..2 {
                edges.push(graph.find_edge(g.vertex(pair[0], y), g.vertex(pair[1], y)).expect("tree edge"));
            }
        }
        edges.push(graph.find_edge(g.vertex(turn, 0), g.vertex(turn, 1)).expect("bag edge"));
        let count = contracted_count(graph, &edges) * BigRational::from_integer(multiplicity.into());
        *classes.entry(bags.len()).or_insert_with(BigRational::zero) += count;
    }
    Ok(classes)
}

/// `t_m / t` for every class `m`: the law of the number of bags on the path
/// between the two vertices of the central bag in the weighted uniform
/// spanning tree of the ball product `T_n □ wK_2`.
pub fn bag_count_law(
    d: usize,
    w: &ExactScalar,
    n: usize,
    max_vertices: usize,
) -> Result<BTreeMap<usize, ExactScalar>, CountError> {
    super::check_params(d, w)?;
    let g = ProductGraph::new(TreeGraph::ball(d, n)?, complete_graph(2), w.clone())?;
    let classes = classify_by_paths(&g, PathGrouping::ByDepth, max_vertices)?;
    let total: BigRational = classes.values().cloned().sum();
    Ok(classes.into_iter().map(|(m, count)| (m, count / &total)).collect())
}
