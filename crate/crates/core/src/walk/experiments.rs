use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::estimate::{map_chunks, proportion, EstimatorReport};
use super::trips::{memorable_bags, Trip};
use super::{RngStream, WalkError, Walker};
use crate::graph::{FiberReport, ProductGraph, TreeGraph, VertexId, WeightedGraph};

/// A ball `T_n □ wH` prepared for repeated sampling.
#[derive(Debug, Clone)]
pub struct Sampler {
    product: ProductGraph<f64>,
    walker: Walker,
}

impl Sampler {
    pub fn ball(d: usize, fiber: &WeightedGraph<f64>, w: f64, n: usize) -> Result<Self, WalkError> {
        let base = TreeGraph::ball(d, n)?;
        Ok(Self::new(ProductGraph::new(base, fiber.clone(), w)?))
    }

    pub fn new(product: ProductGraph<f64>) -> Self {
        let walker = Walker::new(product.graph());
        Self { product, walker }
    }

    pub fn product(&self) -> &ProductGraph<f64> {
        &self.product
    }

    pub fn walker(&self) -> &Walker {
        &self.walker
    }

    /// Tree distance from the product vertex's bag to the center.
    pub fn depth(&self, v: VertexId) -> usize {
        self.product.base().depth(self.product.coordinates(v).0)
    }

    /// Product vertex of fiber vertex `y` in the central bag.
    pub fn central(&self, y: VertexId) -> Result<VertexId, WalkError> {
        if y >= self.product.fiber_size() {
            return Err(WalkError::VertexOutOfRange { vertex: y, vertex_count: self.product.fiber_size() });
        }
        Ok(self.product.vertex(self.product.base().root(), y))
    }

    /// Number of distinct bags on a path.
    pub fn bags_entered(&self, path: &[VertexId]) -> usize {
        let mut bags: Vec<usize> = path.iter().map(|&v| self.product.coordinates(v).0).collect();
        bags.sort_unstable();
        bags.dedup();
        bags.len()
    }

    /// A trip from `start`, conditioned on its first step leaving the
    /// central bag.
    pub fn trip<R: Rng + ?Sized>(&self, start: VertexId, rng: &mut R) -> Result<Trip, WalkError> {
        let center = self.product.central_bag();
        if self.product.bag_of(start)? != center {
            return Err(WalkError::TripPrecondition(format!("start {start} outside the central bag")));
        }
        let graph = self.product.graph();
        let exits: Vec<(VertexId, f64)> = graph
            .neighbors(start)
            .iter()
            .filter(|&&(y, _)| self.product.coordinates(y).0 != center.0)
            .map(|&(y, e)| (y, graph.edge(e).weight))
            .collect();
        let total: f64 = exits.iter().map(|e| e.1).sum();
        if exits.is_empty() {
            return Err(WalkError::InvalidGeometry("the central bag has no neighbours".into()));
        }
        let mut x = rng.gen::<f64>() * total;
        let mut next = exits[exits.len() - 1].0;
        for &(y, weight) in &exits {
            if x < weight {
                next = y;
                break;
            }
            x -= weight;
        }
        let mut vertices = vec![start, next];
        while self.product.coordinates(next).0 != center.0 {
            next = self.walker.step(next, rng);
            vertices.push(next);
        }
        Ok(Trip { offset: 0, vertices, center })
    }

    /// Largest depth of a memorable bag of a sampled trip, 0 when none.
    pub fn memorable_depth<R: Rng + ?Sized>(&self, start: VertexId, rng: &mut R) -> Result<usize, WalkError> {
        let trip = self.trip(start, rng)?;
        let base = self.product.base();
        Ok(memorable_bags(&trip, &self.product).iter().map(|b| base.depth(b.0)).max().unwrap_or(0))
    }

    /// Largest bag depth on a loop-erased walk from `a` to `b`.
    pub fn escape_depth<R: Rng + ?Sized>(&self, a: VertexId, b: VertexId, rng: &mut R) -> Result<usize, WalkError> {
        let path = self.walker.lerw(a, b, rng)?;
        Ok(path.iter().map(|&v| self.depth(v)).max().unwrap_or(0))
    }
}

fn check_samples(samples: usize) -> Result<(), WalkError> {
    if samples == 0 {
        Err(WalkError::NoSamples)
    } else {
        Ok(())
    }
}

fn check_depth(m: usize, n: usize) -> Result<(), WalkError> {
    if m >= n {
        return Err(WalkError::InvalidGeometry(format!("need m < n, got m = {m}, n = {n}")));
    }
    Ok(())
}

/// Per-sample depths, collected in sample order.
fn depths<F>(samples: usize, stream: RngStream, draw: F) -> Result<Vec<usize>, WalkError>
where
    F: Fn(&mut super::WalkRng) -> Result<usize, WalkError> + Sync,
{
    let chunks = map_chunks(samples, stream, |rng, len| (0..len).map(|_| draw(rng)).collect::<Result<Vec<_>, _>>());
    let mut out = Vec::with_capacity(samples);
    for chunk in chunks {
        out.extend(chunk?);
    }
    Ok(out)
}

fn tail_reports(depths: &[usize], ms: &[usize]) -> Vec<EstimatorReport> {
    ms.iter()
        .map(|&m| proportion(depths.iter().filter(|&&x| x > m).count() as u64, depths.len() as u64))
        .collect()
}

/// Probability that the loop-erased walk between fiber vertices `a` and `b`
/// of the central bag of `T_n □ wH` leaves `T_m □ wH`, for each `m` in
/// `ms`. All values of `m` share the same samples.
#[allow(clippy::too_many_arguments)]
pub fn escape_curve(
    d: usize,
    h: &WeightedGraph<f64>,
    w: f64,
    n: usize,
    ms: &[usize],
    (a, b): (VertexId, VertexId),
    samples: usize,
    stream: RngStream,
) -> Result<Vec<EstimatorReport>, WalkError> {
    check_samples(samples)?;
    ms.iter().try_for_each(|&m| check_depth(m, n))?;
    let sampler = Sampler::ball(d, h, w, n)?;
    let (a, b) = (sampler.central(a)?, sampler.central(b)?);
    if a == b {
        return Err(WalkError::SameEndpoints);
    }
    let depths = depths(samples, stream, |rng| sampler.escape_depth(a, b, rng))?;
    Ok(tail_reports(&depths, ms))
}

#[allow(clippy::too_many_arguments)]
pub fn escape_probability(
    d: usize,
    h: &WeightedGraph<f64>,
    w: f64,
    n: usize,
    m: usize,
    endpoints: (VertexId, VertexId),
    samples: usize,
    stream: RngStream,
) -> Result<EstimatorReport, WalkError> {
    Ok(escape_curve(d, h, w, n, &[m], endpoints, samples, stream)?[0])
}

/// Probability that a trip from fiber vertex 0 of the central bag has a
/// memorable bag outside `T_m □ wH`, for each `m` in `ms`, on shared samples.
pub fn memorable_tail_curve(
    d: usize,
    h: &WeightedGraph<f64>,
    w: f64,
    n: usize,
    ms: &[usize],
    samples: usize,
    stream: RngStream,
) -> Result<Vec<EstimatorReport>, WalkError> {
    check_samples(samples)?;
    ms.iter().try_for_each(|&m| check_depth(m, n))?;
    let sampler = Sampler::ball(d, h, w, n)?;
    let u = sampler.central(0)?;
    let depths = depths(samples, stream, |rng| sampler.memorable_depth(u, rng))?;
    Ok(tail_reports(&depths, ms))
}

pub fn memorable_tail_probability(
    d: usize,
    h: &WeightedGraph<f64>,
    w: f64,
    n: usize,
    m: usize,
    samples: usize,
    stream: RngStream,
) -> Result<EstimatorReport, WalkError> {
    Ok(memorable_tail_curve(d, h, w, n, &[m], samples, stream)?[0])
}

/// Distribution of the number of bags on the loop-erased walk between two
/// fiber vertices of the central bag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BagCountReport {
    pub samples: u64,
    pub classes: BTreeMap<usize, EstimatorReport>,
}

impl BagCountReport {
    /// Estimate for `m` bags; zero hits when the class was never seen.
    pub fn class(&self, m: usize) -> EstimatorReport {
        self.classes.get(&m).copied().unwrap_or_else(|| proportion(0, self.samples))
    }
}

#[allow(clippy::too_many_arguments)]
pub fn bag_count_distribution(
    d: usize,
    h: &WeightedGraph<f64>,
    w: f64,
    n: usize,
    (a, b): (VertexId, VertexId),
    samples: usize,
    stream: RngStream,
) -> Result<BagCountReport, WalkError> {
    check_samples(samples)?;
    let sampler = Sampler::ball(d, h, w, n)?;
    let (a, b) = (sampler.central(a)?, sampler.central(b)?);
    if a == b {
        return Err(WalkError::SameEndpoints);
    }
    let counts = depths(samples, stream, |rng| Ok(sampler.bags_entered(&sampler.walker.lerw(a, b, rng)?)))?;
    let mut histogram: BTreeMap<usize, u64> = BTreeMap::new();
    for m in counts {
        *histogram.entry(m).or_default() += 1;
    }
    let classes = histogram.into_iter().map(|(m, hits)| (m, proportion(hits, samples as u64))).collect();
    Ok(BagCountReport { samples: samples as u64, classes })
}

/// Which hypotheses of the small-weight disconnection regime the fiber meets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HypothesisFlags {
    pub regular: bool,
    pub transitive: bool,
    pub exceeds_d_5_2: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRow {
    pub w: f64,
    pub n: usize,
    pub m: usize,
    pub escape: EstimatorReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseTable {
    pub fiber: FiberReport,
    pub hypotheses: HypothesisFlags,
    pub rows: Vec<PhaseRow>,
}

/// Escape estimates between fiber vertices 0 and 1 over a `(w, n)` grid.
/// Row `i` in `w`-major order draws from `stream.substream(i)`.
pub fn phase_probe(
    d: usize,
    h: &WeightedGraph<f64>,
    w_grid: &[f64],
    n_grid: &[usize],
    m: usize,
    samples: usize,
    stream: RngStream,
) -> Result<PhaseTable, WalkError> {
    if w_grid.is_empty() || n_grid.is_empty() {
        return Err(WalkError::EmptyGrid);
    }
    if h.vertex_count() < 2 {
        return Err(WalkError::InvalidGeometry("fiber needs at least two vertices".into()));
    }
    let fiber = FiberReport::inspect(h);
    let hypotheses = HypothesisFlags {
        regular: fiber.regular_degree.is_some(),
        transitive: fiber.vertex_transitive,
        exceeds_d_5_2: fiber.vertex_count as f64 > (d as f64).powf(2.5),
    };
    let mut rows = Vec::with_capacity(w_grid.len() * n_grid.len());
    for &w in w_grid {
        for &n in n_grid {
            let escape = escape_probability(d, h, w, n, m, (0, 1), samples, stream.substream(rows.len() as u64))?;
            rows.push(PhaseRow { w, n, m, escape });
        }
    }
    Ok(PhaseTable { fiber, hypotheses, rows })
}
