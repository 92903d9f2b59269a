//! Spanning trees and loop-erased random walks on products `T □ wH` of a
//! regular tree with a weighted fiber graph.
//!
//! - [`graph`]: weighted graphs, trees, products and their text formats.
//! - [`exact`]: exact spanning-tree counts by recursion, determinant and enumeration.
//! - [`closed_form`]: limits of the count ratios and the bag-distance law of the free spanning forest.
//! - [`walk`]: random walks, loop erasure, Wilson's algorithm and Monte Carlo estimators.
//!
//! ```
//! use treebag::exact::{count_ball, matrix_tree_count};
//! use treebag::graph::{complete_graph, parse_rational, ProductGraph, TreeGraph};
//!
//! let w = parse_rational("1").unwrap();
//! let ball = ProductGraph::new(TreeGraph::ball(3, 1).unwrap(), complete_graph(2), w.clone()).unwrap();
//! assert_eq!(matrix_tree_count(ball.graph()), count_ball(3, &w, 1).unwrap());
//! ```

pub mod closed_form;
pub mod exact;
pub mod graph;
pub mod walk;

use thiserror::Error;

/// Any error raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Count(#[from] exact::CountError),
    #[error(transparent)]
    ClosedForm(#[from] closed_form::ClosedFormError),
    #[error(transparent)]
    Walk(#[from] walk::WalkError),
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/exact-counting.md")]
    mod exact_counting {}
    #[doc = include_str!("../../../book/src/closed-form.md")]
    mod closed_form {}
    #[doc = include_str!("../../../book/src/random-walks.md")]
    mod random_walks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
