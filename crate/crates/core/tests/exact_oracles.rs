use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use treebag::exact::{
    bag_count_law, classify_by_paths, count_ball, count_by_bags, exact_ratio_sequence, matrix_tree_count,
    ratio_sequence, recursion_a, to_f64, CountError, CountTable, PathGrouping,
};
use treebag::graph::{complete_graph, parse_rational, ProductGraph, TreeGraph};

fn q(s: &str) -> BigRational {
    parse_rational(s).unwrap()
}

fn edge_product(base: TreeGraph, w: &BigRational) -> ProductGraph {
    ProductGraph::new(base, complete_graph(2), w.clone()).unwrap()
}

#[test]
fn recursion_matches_determinant_one_level_deeper() {
    for (d, w) in [(3, "1"), (3, "3/7"), (4, "2")] {
        let w = q(w);
        let (a, _) = recursion_a(d, &w, 3).unwrap();
        assert_eq!(a, matrix_tree_count(edge_product(TreeGraph::perfect(d, 3).unwrap(), &w).graph()));
        let t = count_ball(d, &w, 3).unwrap();
        assert_eq!(t, matrix_tree_count(edge_product(TreeGraph::ball(d, 3).unwrap(), &w).graph()));
    }
}

#[test]
fn known_values() {
    let mut table = CountTable::up_to(3, q("1"), 3).unwrap();
    assert_eq!((table.a(2), table.a_prime(2)), (q("2691"), q("1521")));
    assert_eq!(table.a(3), q("84803355"));
    assert_eq!(table.count_ball(2).unwrap(), q("127764"));
    assert_eq!(count_by_bags(3, &q("1"), 2, 1).unwrap(), q("59319"));
    let (a, a_prime) = recursion_a(3, &q("2"), 1).unwrap();
    assert_eq!((a, a_prime), (q("70"), q("50")));
}

#[test]
fn lemma_classes_match_classification() {
    for d in [3, 4] {
        for w in ["1/2", "1", "3"] {
            let w = q(w);
            for n in 2..=4 {
                let classes = classify_by_paths(&edge_product(TreeGraph::ball(d, n).unwrap(), &w), PathGrouping::ByDepth, 4096)
                    .unwrap();
                for m in 1..n {
                    assert_eq!(Some(&count_by_bags(d, &w, n, m).unwrap()), classes.get(&m), "d={d} w={w} n={n} m={m}");
                }
                let total: BigRational = classes.values().cloned().sum();
                assert_eq!(total, count_ball(d, &w, n).unwrap());
            }
        }
    }
}

#[test]
fn domain_is_enforced() {
    let w = q("1");
    assert_eq!(count_by_bags(3, &w, 1, 1), Err(CountError::BagCountOutOfRange { n: 1, m: 1 }));
    assert_eq!(count_by_bags(3, &w, 4, 4), Err(CountError::BagCountOutOfRange { n: 4, m: 4 }));
    assert_eq!(count_by_bags(3, &w, 4, 5), Err(CountError::BagCountOutOfRange { n: 4, m: 5 }));
    assert_eq!(count_by_bags(3, &w, 4, 0), Err(CountError::BagCountOutOfRange { n: 4, m: 0 }));
    assert_eq!(count_ball(3, &w, 0), Err(CountError::BallTooSmall(0)));
    assert_eq!(recursion_a(2, &w, 1), Err(CountError::InvalidDegree(2)));
    assert!(recursion_a(3, &q("0"), 1).is_err());
}

#[test]
fn complement_shrinks() {
    let w = q("1");
    let shares: Vec<f64> = (3..=6)
        .map(|n| {
            let t = count_ball(3, &w, n).unwrap();
            let inside: BigRational = (1..n).map(|m| count_by_bags(3, &w, n, m).unwrap()).sum();
            to_f64(&((&t - inside) / t))
        })
        .collect();
    assert_eq!(shares[0], 0.234375);
    let frozen = [0.234375, 0.10274, 0.04505, 0.01975];
    for (s, f) in shares.iter().zip(frozen) {
        assert!((s - f).abs() < 1e-5, "{s} vs {f}");
    }
}

#[test]
fn law_is_a_distribution() {
    for n in 1..=4 {
        let law = bag_count_law(3, &q("2/3"), n, 1024).unwrap();
        assert_eq!(law.values().cloned().sum::<BigRational>(), BigRational::one());
        assert!(law.values().all(|p| *p > BigRational::zero()));
        assert_eq!(*law.keys().last().unwrap(), n + 1);
    }
}

#[test]
fn doubly_exponential_growth() {
    for d in [3, 4, 5] {
        let table = CountTable::up_to(d, q("1"), 5).unwrap();
        for pair in table.rows().windows(2) {
            assert!(pair[1].a >= num_traits::pow(pair[0].a.clone(), d - 1));
        }
    }
}

#[test]
fn csv_export() {
    let table = CountTable::up_to(3, q("1"), 2).unwrap();
    let csv = table.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,a_n,a_prime_n,c_n,s_n");
    assert_eq!(lines[1], "0,1/1,1/1,1.0,");
    assert_eq!(lines[2], "1,15/1,9/1,0.6,0.06666666666666667");
    assert!(lines[3].starts_with("2,2691/1,1521/1,"));
}

#[test]
fn ratios_are_monotone_and_match_table() {
    for w in ["1/2", "1", "2"] {
        let table = CountTable::up_to(3, q(w), 8).unwrap();
        let rows = ratio_sequence(3, to_f64(&q(w)), 8).unwrap();
        for row in &rows {
            let exact = to_f64(&table.c(row.n).unwrap());
            assert!((row.c - exact).abs() < 1e-12);
            assert!(row.c > 0.0 && row.c <= 1.0);
        }
        let decreasing = rows.windows(2).all(|p| p[1].c <= p[0].c);
        let increasing = rows.windows(2).all(|p| p[1].c >= p[0].c);
        assert!(decreasing || increasing, "w={w}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_ratios_agree_with_counts(num in 1u32..12, den in 1u32..12, d in 3usize..6) {
        let w = BigRational::new(num.into(), den.into());
        let table = CountTable::up_to(d, w.clone(), 3).unwrap();
        let rows = exact_ratio_sequence(d, &w, 3).unwrap();
        for row in rows {
            prop_assert_eq!(Some(row.c), table.c(row.n));
            prop_assert_eq!(row.s, table.s(row.n));
        }
    }

    #[test]
    fn determinant_agrees_for_random_weights(num in 1u32..20, den in 1u32..20) {
        let w = BigRational::new(num.into(), den.into());
        let g = edge_product(TreeGraph::ball(3, 2).unwrap(), &w);
        prop_assert_eq!(matrix_tree_count(g.graph()), count_ball(3, &w, 2).unwrap());
    }
}
