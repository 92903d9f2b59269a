//! Matrix-tree counts by fraction-free elimination.
//!
//! The weighted Laplacian is scaled by the lcm `L` of the weight
//! denominators, one vertex is deleted, and the remaining integer matrix is
//! reduced with Bareiss' recurrence
//!
//! ```text
//! a[i][j] <- (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / p
//! ```
//!
//! where `p` is the previous pivot. Every intermediate entry is a minor of
//! the input, so all divisions are exact. The reduced Laplacian of a
//! connected graph is positive definite, hence no pivoting is needed and the
//! elimination order is free: vertices are eliminated leaves-first along a
//! breadth-first order, which keeps tree-like graphs sparse. Rows are stored
//! sparsely and rescaled lazily (a row that no pivot touches only gets
//! multiplied by `p_new / p_old`).

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ExactScalar;
use crate::graph::{VertexId, WeightedGraph};

/// Weighted number of spanning trees; zero for a disconnected graph.
pub fn matrix_tree_count(g: &WeightedGraph<BigRational>) -> ExactScalar {
    let edges = g.edges().iter().map(|e| (e.u, e.v, e.weight.clone()));
    laplacian_cofactor(g.vertex_count(), edges)
}

/// Weighted number of spanning trees of `g` that contain every edge of
/// the connected subgraph spanned by `edges`, computed as the weight of
/// those edges times the count of the contracted multigraph.
pub fn contracted_count(g: &WeightedGraph<BigRational>, edges: &[usize]) -> ExactScalar {
    let n = g.vertex_count();
    let mut dsu = crate::graph::DisjointSets::new(n);
    for &e in edges {
        let edge = g.edge(e);
        if !dsu.union(edge.u, edge.v) {
            // The forced edges contain a cycle.
            return BigRational::zero();
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        let r = dsu.find(v);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        label[v] = label[r];
    }
    let forced = g.weight_of(edges);
    let rest = g
        .edges()
        .iter()
        .filter(|e| label[e.u] != label[e.v])
        .map(|e| (label[e.u], label[e.v], e.weight.clone()));
    forced * laplacian_cofactor(next, rest)
}

/// Cofactor of the weighted Laplacian of a multigraph. Self-loops must be
/// filtered out by the caller.
pub(crate) fn laplacian_cofactor<I>(vertex_count: usize, edges: I) -> ExactScalar
where
    I: IntoIterator<Item = (VertexId, VertexId, BigRational)>,
{
    if vertex_count <= 1 {
        return BigRational::one();
    }
    let edges: Vec<_> = edges.into_iter().collect();
    let lcm = edges.iter().fold(BigInt::one(), |acc, (_, _, w)| acc.lcm(w.denom()));

    let mut adjacency: Vec<Vec<VertexId>> = vec![Vec::new(); vertex_count];
    for &(u, v, _) in &edges {
        debug_assert_ne!(u, v);
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let order = bfs_order(&adjacency);
    if order.len() < vertex_count {
        return BigRational::zero();
    }
    // position[v] = row index; vertex order[0] is deleted, the rest are
    // eliminated deepest-first.
    let mut position = vec![usize::MAX; vertex_count];
    for (row, &v) in order[1..].iter().rev().enumerate() {
        position[v] = row;
    }
    let size = vertex_count - 1;
    let mut rows: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); size];
    for (u, v, w) in &edges {
        let scaled = w.numer() * (&lcm / w.denom());
        let (pu, pv) = (position[*u], position[*v]);
        for (p, q) in [(pu, pv), (pv, pu)] {
            if p != usize::MAX {
                *rows[p].entry(p).or_insert_with(BigInt::zero) += &scaled;
                if q != usize::MAX {
                    *rows[p].entry(q).or_insert_with(BigInt::zero) -= &scaled;
                }
            }
        }
    }
    let det = bareiss_symmetric(rows);
    BigRational::new(det, num_traits::pow(lcm, size))
}

fn bfs_order(adjacency: &[Vec<VertexId>]) -> Vec<VertexId> {
    let mut seen = vec![false; adjacency.len()];
    let mut order = Vec::with_capacity(adjacency.len());
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &y in &adjacency[x] {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    order
}

/// Determinant of a symmetric positive semidefinite integer matrix given as
/// sparse rows. Returns zero as soon as a pivot vanishes.
fn bareiss_symmetric(mut rows: Vec<BTreeMap<usize, BigInt>>) -> BigInt {
    let size = rows.len();
    if size == 0 {
        return BigInt::one();
    }
    // pivots[l] is the pivot after l steps; pivots[0] = 1.
    let mut pivots: Vec<BigInt> = Vec::with_capacity(size + 1);
    pivots.push(BigInt::one());
    // level[i]: number of elimination steps already applied to row i.
    let mut level = vec![0usize; size];

    fn lift(row: &mut BTreeMap<usize, BigInt>, level: &mut usize, target: usize, pivots: &[BigInt]) {
        if *level == target {
            return;
        }
        let (num, den) = (&pivots[target], &pivots[*level]);
        for value in row.values_mut() {
            *value = &*value * num / den;
        }
        *level = target;
    }

    for k in 0..size {
        let mut pivot_row = std::mem::take(&mut rows[k]);
        lift(&mut pivot_row, &mut level[k], k, &pivots);
        let pivot = pivot_row.get(&k).cloned().unwrap_or_else(BigInt::zero);
        if pivot.is_zero() {
            return BigInt::zero();
        }
        let targets: Vec<usize> = pivot_row.range(k + 1..).map(|(&j, _)| j).collect();
        for i in targets {
            let row = &mut rows[i];
            lift(row, &mut level[i], k, &pivots);
            let factor = match row.remove(&k) {
                Some(f) if !f.is_zero() => f,
                _ => continue,
            };
            let prev = &pivots[k];
            for value in row.values_mut() {
                *value *= &pivot;
            }
            for (&j, a_kj) in pivot_row.range(k + 1..) {
                *row.entry(j).or_insert_with(BigInt::zero) -= &factor * a_kj;
            }
            row.retain(|_, v| {
                *v /= prev;
                !v.is_zero()
            });
            level[i] = k + 1;
        }
        pivots.push(pivot);
    }
    pivots.pop().expect("at least one pivot")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, parse_rational, path_graph};

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    /// Cofactor by cofactor expansion over rationals: independent of the
    /// elimination above, feasible for tiny graphs only.
    fn expansion_cofactor(g: &WeightedGraph<BigRational>) -> BigRational {
        let n = g.vertex_count();
        let mut lap = vec![vec![BigRational::zero(); n]; n];
        for e in g.edges() {
            lap[e.u][e.u] += &e.weight;
            lap[e.v][e.v] += &e.weight;
            lap[e.u][e.v] -= &e.weight;
            lap[e.v][e.u] -= &e.weight;
        }
        let minor: Vec<Vec<BigRational>> = lap[1..].iter().map(|r| r[1..].to_vec()).collect();
        fn det(m: &[Vec<BigRational>]) -> BigRational {
            if m.is_empty() {
                return BigRational::one();
            }
            let mut total = BigRational::zero();
            for (j, x) in m[0].iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let sub: Vec<Vec<BigRational>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect()).collect();
                let term = x * det(&sub);
                if j % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            total
        }
        det(&minor)
    }

    #[test]
    fn classical_counts() {
        assert_eq!(matrix_tree_count(&complete_graph(3)), q("3"));
        assert_eq!(matrix_tree_count(&complete_graph(5)), q("125"));
        assert_eq!(matrix_tree_count(&cycle_graph(4)), q("4"));
        assert_eq!(matrix_tree_count(&path_graph(6)), q("1"));
        let single = WeightedGraph::from_edges(2, [(0, 1, q("7"))]).unwrap();
        assert_eq!(matrix_tree_count(&single), q("7"));
        assert_eq!(matrix_tree_count(&WeightedGraph::new(1)), q("1"));
    }

    #[test]
    fn disconnected_is_zero() {
        let g = WeightedGraph::from_edges(4, [(0, 1, q("1")), (2, 3, q("1"))]).unwrap();
        assert_eq!(matrix_tree_count(&g), q("0"));
    }

    #[test]
    fn weighted_triangle() {
        // Trees of a triangle with weights a, b, c: ab + bc + ca.
        let g = WeightedGraph::from_edges(3, [(0, 1, q("1/2")), (1, 2, q("2/3")), (0, 2, q("5"))]).unwrap();
        assert_eq!(matrix_tree_count(&g), q("1/3") + q("10/3") + q("5/2"));
    }

    #[test]
    fn agrees_with_cofactor_expansion() {
        let g = WeightedGraph::from_edges(
            6,
            [
                (0, 1, q("1/2")),
                (1, 2, q("3")),
                (2, 3, q("2/5")),
                (3, 4, q("1")),
                (4, 5, q("7/3")),
                (5, 0, q("1")),
                (0, 3, q("4")),
                (1, 4, q("1/9")),
                (2, 5, q("6")),
            ],
        )
        .unwrap();
        assert_eq!(matrix_tree_count(&g), expansion_cofactor(&g));
    }

    #[test]
    fn contraction_counts_trees_through_edges() {
        // K_4: 16 trees, each edge lies in 16 * 3 / 6 = 8 of them.
        let k4 = complete_graph::<BigRational>(4);
        assert_eq!(contracted_count(&k4, &[0]), q("8"));
        assert_eq!(contracted_count(&k4, &[]), q("16"));
        // A forced triangle is not part of any tree.
        let cyc = [k4.find_edge(0, 1).unwrap(), k4.find_edge(1, 2).unwrap(), k4.find_edge(0, 2).unwrap()];
        assert_eq!(contracted_count(&k4, &cyc), q("0"));
    }
}
