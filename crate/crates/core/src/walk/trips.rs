use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{loop_erase, WalkError};
use crate::graph::{BagId, Conductance, ProductGraph, VertexId};

/// An excursion from the central bag: first and last vertex in `center`,
/// every other vertex outside it. `offset` is the index of the first vertex
/// in the walk it was cut from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trip {
    pub offset: usize,
    pub vertices: Vec<VertexId>,
    pub center: BagId,
}

impl Trip {
    pub fn end(&self) -> usize {
        self.offset + self.vertices.len()
    }

    pub fn validate<W: Conductance>(&self, g: &ProductGraph<W>) -> Result<(), WalkError> {
        let t = self.vertices.len();
        if t < 2 {
            return Err(WalkError::TripPrecondition(format!("trip of length {t}")));
        }
        for (i, &v) in self.vertices.iter().enumerate() {
            let inside = g.bag_of(v)? == self.center;
            if inside != (i == 0 || i == t - 1) {
                return Err(WalkError::TripPrecondition(format!("vertex {v} at position {i}")));
            }
        }
        Ok(())
    }
}

/// Cuts a walk into its trips. A trip starts at the last vertex of `center`
/// before the walk leaves it and ends at the first return. A final
/// excursion that never returns is not a trip and is dropped.
pub fn decompose_trips<W: Conductance>(
    walk: &[VertexId],
    center: BagId,
    g: &ProductGraph<W>,
) -> Result<Vec<Trip>, WalkError> {
    let Some(&first) = walk.first() else {
        return Err(WalkError::TripPrecondition("empty walk".into()));
    };
    if g.bag_of(first)? != center {
        return Err(WalkError::TripPrecondition(format!("walk starts at {first}, outside the central bag")));
    }
    let inside: Vec<bool> = walk.iter().map(|&v| g.bag_of(v).map(|b| b == center)).collect::<Result<_, _>>()?;
    let mut trips = Vec::new();
    let mut start = None;
    for i in 1..walk.len() {
        match (inside[i - 1], inside[i], start) {
            (true, false, _) => start = Some(i - 1),
            (false, true, Some(s)) => {
                trips.push(Trip { offset: s, vertices: walk[s..=i].to_vec(), center });
                start = None;
            }
            _ => {}
        }
    }
    Ok(trips)
}

/// Bags visited by the trip whose separating bags are not fully covered
/// after the last visit. Bags other than the center are separated from it
/// by the interior of their tree path to the center.
pub fn memorable_bags<W: Conductance>(trip: &Trip, g: &ProductGraph<W>) -> BTreeSet<BagId> {
    let k = g.fiber_size();
    let base = g.base();
    let mut covered: HashMap<VertexId, (Vec<bool>, usize)> = HashMap::new();
    let mut seen = BTreeSet::new();
    let mut memorable = BTreeSet::new();
    for &v in trip.vertices.iter().rev() {
        let (bag, y) = g.coordinates(v);
        if bag != trip.center.0 && seen.insert(bag) {
            let path = base.path(bag, trip.center.0);
            let blocked = path[1..path.len() - 1]
                .iter()
                .any(|x| covered.get(x).is_some_and(|(_, count)| *count == k));
            if !blocked {
                memorable.insert(BagId(bag));
            }
        }
        let entry = covered.entry(bag).or_insert_with(|| (vec![false; k], 0));
        if !entry.0[y] {
            entry.0[y] = true;
            entry.1 += 1;
        }
    }
    memorable
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    NotVisited,
    Memorable,
    CentralBag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErasureCheck {
    /// The erased prefix avoids the bag.
    Holds,
    Violated,
    Skipped(SkipReason),
}

/// For a trip cut from `walk` that visits a non-memorable bag `bag`, checks
/// that the loop erasure of `walk` up to the end of the trip avoids `bag`.
pub fn erased_bag_check<W: Conductance>(
    walk: &[VertexId],
    trip: &Trip,
    bag: BagId,
    g: &ProductGraph<W>,
) -> Result<ErasureCheck, WalkError> {
    trip.validate(g)?;
    if walk.get(trip.offset..trip.end()) != Some(&trip.vertices[..]) {
        return Err(WalkError::TripPrecondition("trip is not a subwalk at its offset".into()));
    }
    if g.bag_of(walk[0])? != trip.center {
        return Err(WalkError::TripPrecondition("walk does not start in the central bag".into()));
    }
    if bag == trip.center {
        return Ok(ErasureCheck::Skipped(SkipReason::CentralBag));
    }
    let visits = trip.vertices.iter().any(|&v| g.coordinates(v).0 == bag.0);
    if !visits {
        return Ok(ErasureCheck::Skipped(SkipReason::NotVisited));
    }
    if memorable_bags(trip, g).contains(&bag) {
        return Ok(ErasureCheck::Skipped(SkipReason::Memorable));
    }
    let erased = loop_erase(&walk[..trip.end()]);
    Ok(if erased.iter().any(|&v| g.coordinates(v).0 == bag.0) {
        ErasureCheck::Violated
    } else {
        ErasureCheck::Holds
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, TreeGraph};

    /// Ball of radius 3 for d = 3 times K_2: bag 0 is the center, bags
    /// 1..=3 its children, 4 and 5 the children of 1, 10 and 11 of 4.
    fn product() -> ProductGraph<f64> {
        ProductGraph::new(TreeGraph::ball(3, 3).unwrap(), complete_graph(2), 1.0).unwrap()
    }

    fn v(bag: usize, y: usize) -> VertexId {
        2 * bag + y
    }

    #[test]
    fn fixture_layout() {
        let base = product().base().clone();
        assert_eq!(base.children(0), &[1, 2, 3]);
        assert_eq!(base.children(1), &[4, 5]);
        assert_eq!(base.children(4), &[10, 11]);
    }

    #[test]
    fn walk_inside_center_has_no_trips() {
        let g = product();
        let walk = [v(0, 0), v(0, 1), v(0, 0)];
        assert!(decompose_trips(&walk, BagId(0), &g).unwrap().is_empty());
    }

    #[test]
    fn one_excursion() {
        let g = product();
        let walk = [v(0, 0), v(0, 1), v(1, 1), v(1, 0), v(0, 0), v(0, 1)];
        let trips = decompose_trips(&walk, BagId(0), &g).unwrap();
        assert_eq!(trips, vec![Trip { offset: 1, vertices: vec![v(0, 1), v(1, 1), v(1, 0), v(0, 0)], center: BagId(0) }]);
    }

    #[test]
    fn three_excursions() {
        let g = product();
        let walk = [
            v(0, 0),
            v(1, 0),
            v(0, 0),
            v(0, 1),
            v(2, 1),
            v(2, 0),
            v(0, 0),
            v(3, 0),
            v(0, 0),
            v(1, 0),
        ];
        let trips = decompose_trips(&walk, BagId(0), &g).unwrap();
        let spans: Vec<(usize, usize)> = trips.iter().map(|t| (t.offset, t.end())).collect();
        assert_eq!(spans, vec![(0, 3), (3, 7), (6, 9)]);
        for t in &trips {
            t.validate(&g).unwrap();
        }
    }

    #[test]
    fn walk_must_start_in_center() {
        let g = product();
        assert!(decompose_trips(&[v(1, 0), v(0, 0)], BagId(0), &g).is_err());
        assert!(decompose_trips(&[], BagId(0), &g).is_err());
    }

    #[test]
    fn neighbours_of_center_are_memorable() {
        let g = product();
        let trip = Trip { offset: 0, vertices: vec![v(0, 0), v(1, 0), v(1, 1), v(0, 1)], center: BagId(0) };
        assert_eq!(memorable_bags(&trip, &g), BTreeSet::from([BagId(1)]));
        let center_only = Trip { offset: 0, vertices: vec![v(0, 0), v(0, 1)], center: BagId(0) };
        assert!(memorable_bags(&center_only, &g).is_empty());
    }

    #[test]
    fn covered_separator_forgets_deeper_bag() {
        let g = product();
        // After the last visit to bag 4 the walk covers both vertices of bag 1.
        let trip = Trip {
            offset: 0,
            vertices: vec![v(0, 0), v(1, 0), v(4, 0), v(1, 0), v(1, 1), v(0, 1)],
            center: BagId(0),
        };
        assert_eq!(memorable_bags(&trip, &g), BTreeSet::from([BagId(1)]));
        // Covering bag 1 only partially keeps bag 4.
        let trip = Trip {
            offset: 0,
            vertices: vec![v(0, 0), v(1, 0), v(4, 0), v(4, 1), v(1, 1), v(0, 1)],
            center: BagId(0),
        };
        assert_eq!(memorable_bags(&trip, &g), BTreeSet::from([BagId(1), BagId(4)]));
    }

    #[test]
    fn separator_must_be_covered_after_last_visit() {
        let g = product();
        // Bag 1 is covered before the final visit to bag 10, which does not count.
        let trip = Trip {
            offset: 0,
            vertices: vec![v(0, 0), v(1, 0), v(1, 1), v(4, 1), v(10, 1), v(4, 1), v(1, 1), v(0, 1)],
            center: BagId(0),
        };
        assert_eq!(memorable_bags(&trip, &g), BTreeSet::from([BagId(1), BagId(4), BagId(10)]));
    }

    #[test]
    fn erasure_check_outcomes() {
        let g = product();
        let walk = vec![v(0, 0), v(1, 0), v(4, 0), v(1, 0), v(1, 1), v(0, 1)];
        let trip = decompose_trips(&walk, BagId(0), &g).unwrap().remove(0);
        assert_eq!(erased_bag_check(&walk, &trip, BagId(4), &g), Ok(ErasureCheck::Holds));
        assert_eq!(erased_bag_check(&walk, &trip, BagId(1), &g), Ok(ErasureCheck::Skipped(SkipReason::Memorable)));
        assert_eq!(erased_bag_check(&walk, &trip, BagId(2), &g), Ok(ErasureCheck::Skipped(SkipReason::NotVisited)));
        assert_eq!(erased_bag_check(&walk, &trip, BagId(0), &g), Ok(ErasureCheck::Skipped(SkipReason::CentralBag)));
        let shifted = Trip { offset: 1, ..trip.clone() };
        assert!(erased_bag_check(&walk, &shifted, BagId(4), &g).is_err());
    }
}
