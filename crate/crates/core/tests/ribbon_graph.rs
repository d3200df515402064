use std::collections::{BTreeMap, HashSet};

use belyi_core::ribbon_graph::{sample, sample_connected, RibbonGraph};
use proptest::prelude::*;

/// Every perfect matching of `0..2m`, by brute force.
fn all_matchings(points: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(rest: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some((&first, tail)) = rest.split_first() else {
            out.push(acc.clone());
            return;
        };
        for i in 0..tail.len() {
            let mut remaining = tail.to_vec();
            let partner = remaining.remove(i);
            acc.push((first, partner));
            go(&remaining, acc, out);
            acc.pop();
        }
    }
    let points: Vec<usize> = (0..points).collect();
    let mut out = Vec::new();
    go(&points, &mut Vec::new(), &mut out);
    out
}

/// Independent face counter: builds the face permutation as an explicit
/// table from the pair list and the vertex triples, then counts cycles with
/// a hash set.
fn naive_faces(n: usize, pairs: &[(usize, usize)]) -> (usize, Vec<usize>) {
    let mut partner = BTreeMap::new();
    for &(a, b) in pairs {
        partner.insert(a, b);
        partner.insert(b, a);
    }
    let turn = |d: usize| if d % 3 == 2 { d - 2 } else { d + 1 };
    let phi: Vec<usize> = (0..6 * n).map(|d| turn(partner[&d])).collect();
    let mut seen = HashSet::new();
    let mut lengths = Vec::new();
    for start in 0..6 * n {
        if seen.contains(&start) {
            continue;
        }
        let mut len = 0;
        let mut d = start;
        while seen.insert(d) {
            len += 1;
            d = phi[d];
        }
        lengths.push(len);
    }
    lengths.sort_unstable();
    (lengths.len(), lengths)
}

fn canonical(pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut p: Vec<_> = pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    p.sort_unstable();
    p
}

#[test]
fn fifteen_matchings_on_six_darts() {
    let all = all_matchings(6);
    assert_eq!(all.len(), 15);
    // every one of them gives a connected two-vertex graph
    for m in &all {
        let g = RibbonGraph::from_matching(1, m).unwrap();
        assert!(g.is_connected());
        assert!(g.faces().genus().is_some());
    }
}

#[test]
fn sampler_is_uniform_on_matchings_for_n_1() {
    let all: Vec<_> = all_matchings(6).iter().map(|m| canonical(m)).collect();
    let mut counts = vec![0u64; all.len()];
    let trials = 100_000u64;
    for seed in 0..trials {
        let g = sample(1, seed).unwrap();
        let key = canonical(&g.pairs());
        let idx = all.iter().position(|m| *m == key).unwrap();
        counts[idx] += 1;
    }
    let expected = trials as f64 / 15.0;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    // 14 degrees of freedom, 0.1% critical value
    assert!(chi2 < 36.12, "chi-square {chi2}, counts {counts:?}");
}

#[test]
fn faces_match_naive_tracer_exhaustively() {
    for n in 1..=2 {
        for m in all_matchings(6 * n) {
            let g = RibbonGraph::from_matching(n, &m).unwrap();
            let fd = g.faces();
            let (lht, lengths) = naive_faces(n, &m);
            assert_eq!(fd.lht(), lht);
            let mut degrees: Vec<_> = fd.degrees().collect();
            degrees.sort_unstable();
            assert_eq!(degrees, lengths);
        }
    }
}

#[test]
fn connected_sampler_for_n_1_and_large_n() {
    for seed in 0..200 {
        let s = sample_connected(1, seed).unwrap();
        assert_eq!(s.rejections, 0);
    }
    let big = sample_connected(1000, 3).unwrap();
    assert!(big.graph.faces().is_connected());
    assert_eq!(big, sample_connected(1000, 3).unwrap());
}

#[test]
fn sampled_identities() {
    for n in [1usize, 2, 5, 37, 400] {
        for seed in 0..50 {
            let g = sample(n, seed).unwrap();
            let fd = g.faces();
            assert_eq!(fd.sum_degrees(), 6 * n);
            let mut covered = vec![0u8; 6 * n];
            for face in fd.faces() {
                for d in face {
                    covered[d.index()] += 1;
                }
            }
            assert!(covered.iter().all(|&c| c == 1));
            if fd.is_connected() {
                let genus = fd.genus().unwrap() as i64;
                assert_eq!(2 - 2 * genus, 2 * n as i64 - 3 * n as i64 + fd.lht() as i64);
                assert_eq!((n as i64 - fd.lht() as i64).rem_euclid(2), 0);
            }
        }
    }
}

fn relabel(g: &RibbonGraph, perm: &[usize], shifts: &[usize]) -> RibbonGraph {
    let map = |d: usize| 3 * perm[d / 3] + (d % 3 + shifts[d / 3]) % 3;
    let pairs: Vec<_> = g
        .pairs()
        .into_iter()
        .map(|(a, b)| (map(a), map(b)))
        .collect();
    RibbonGraph::from_matching(g.n(), &pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn faces_invariant_under_relabelling(
        n in 1usize..40,
        seed in any::<u64>(),
        perm_seed in any::<u64>(),
    ) {
        let g = sample(n, seed).unwrap();
        // vertex permutation and per-vertex cyclic shifts from a second sample
        let aux = sample(n, perm_seed).unwrap();
        let mut perm: Vec<usize> = (0..2 * n).collect();
        perm.sort_by_key(|&v| aux.matched(belyi_core::Dart(3 * v)).index());
        let shifts: Vec<usize> = (0..2 * n).map(|v| aux.matched(belyi_core::Dart(3 * v + 1)).index() % 3).collect();
        let h = relabel(&g, &perm, &shifts);
        let (a, b) = (g.faces(), h.faces());
        prop_assert_eq!(a.lht(), b.lht());
        prop_assert_eq!(a.genus(), b.genus());
        let mut da: Vec<_> = a.degrees().collect();
        let mut db: Vec<_> = b.degrees().collect();
        da.sort_unstable();
        db.sort_unstable();
        prop_assert_eq!(da, db);
    }

    #[test]
    fn round_trip_through_pairs(n in 1usize..60, seed in any::<u64>()) {
        let g = sample(n, seed).unwrap();
        prop_assert_eq!(RibbonGraph::from_matching(n, &g.pairs()).unwrap(), g);
    }
}
