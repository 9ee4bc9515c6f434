use permidx::perm::{contains, generate_avoiding, oracle, Family};
use permidx::succinct::{BitVector, OrderedTree, RangeMinIndex};
use permidx::{build_hierarchy, CompactIndex, GeoIndex, Pattern, Permutation, QueryRect};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Avoid231), Just(Family::Separable), (2usize..6).prop_map(Family::InterleavedRuns), Just(Family::Identity), Just(Family::Reverse)]
}

fn avoiding(max: usize) -> impl Strategy<Value = Permutation> {
    (family(), 1..=max, any::<u64>()).prop_map(|(f, n, seed)| generate_avoiding(f, n, seed))
}

fn shuffled(max: usize) -> impl Strategy<Value = Permutation> {
    (1..=max as u32).prop_flat_map(|n| Just((1..=n).collect::<Vec<u32>>()).prop_shuffle()).prop_map(|v| Permutation::new(v).unwrap())
}

fn any_perm(max: usize) -> impl Strategy<Value = Permutation> {
    prop_oneof![avoiding(max), shuffled(max)]
}

/// A permutation with random 1-based argument quadruples.
fn with_args(max: usize) -> impl Strategy<Value = (Permutation, Vec<(usize, usize, usize, usize)>)> {
    (any_perm(max), prop::collection::vec(any::<(u32, u32, u32, u32)>(), 1..40)).prop_map(|(tau, raw)| {
        let n = tau.len();
        let pick = |x: u32| x as usize % n + 1;
        let args = raw
            .into_iter()
            .map(|(a, b, c, d)| {
                let (a, b, c, d) = (pick(a), pick(b), pick(c), pick(d));
                (a.min(b), a.max(b), c.min(d), c.max(d))
            })
            .collect();
        (tau, args)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn base_queries_match_the_oracle((tau, args) in with_args(600)) {
        let idx = CompactIndex::build(&tau).unwrap();
        for (a, b, c, _) in args {
            prop_assert_eq!(idx.rank(c).unwrap(), oracle::rank(&tau, c).unwrap());
            prop_assert_eq!(idx.unrank(c).unwrap(), oracle::unrank(&tau, c).unwrap());
            prop_assert_eq!(idx.unrank(idx.rank(a).unwrap()).unwrap(), a);
            prop_assert_eq!(idx.range_min(a, b).unwrap(), oracle::range_min(&tau, a, b).unwrap());
            prop_assert_eq!(idx.next_smaller(b).unwrap(), oracle::next_smaller(&tau, b).unwrap());
        }
        prop_assert_eq!(idx.to_permutation(), tau);
    }

    #[test]
    fn rectangle_queries_match_the_oracle((tau, args) in with_args(600)) {
        let idx = GeoIndex::build(&tau).unwrap();
        for (a, b, c, d) in args {
            let r = QueryRect::new(a, b, c, d);
            prop_assert_eq!(idx.rect_count(&r).unwrap(), oracle::rect_count(&tau, &r).unwrap());
            prop_assert_eq!(idx.rect_min(&r).unwrap(), oracle::rect_min(&tau, &r).unwrap());
        }
    }

    #[test]
    fn pieces_partition_the_rectangle((tau, args) in with_args(400)) {
        let idx = GeoIndex::build(&tau).unwrap();
        for (a, b, c, d) in args {
            let r = QueryRect::new(a, b, c, d);
            let pieces = idx.pieces(&r).unwrap();
            let mut total = 0;
            for (k, p) in pieces.iter().enumerate() {
                prop_assert!(p.count > 0);
                prop_assert!(c <= p.cols.0 && p.cols.1 <= d && a <= p.rows.0 && p.rows.1 <= b, "{:?} outside {:?}", p, r);
                let bx = QueryRect::new(p.rows.0, p.rows.1, p.cols.0, p.cols.1);
                prop_assert_eq!(p.count, oracle::rect_count(&tau, &bx).unwrap());
                for q in &pieces[k + 1..] {
                    let apart = p.cols.1 < q.cols.0 || q.cols.1 < p.cols.0 || p.rows.1 < q.rows.0 || q.rows.1 < p.rows.0;
                    prop_assert!(apart, "{:?} overlaps {:?}", p, q);
                }
                total += p.count;
            }
            prop_assert_eq!(total, oracle::rect_count(&tau, &r).unwrap());
        }
    }

    #[test]
    fn serialization_round_trips(tau in any_perm(800)) {
        let idx = GeoIndex::build(&tau).unwrap();
        let bytes = idx.to_bytes();
        let back = GeoIndex::from_bytes(&bytes).unwrap();
        prop_assert_eq!(back.to_bytes(), bytes);
        prop_assert_eq!(back.base().to_permutation(), tau.clone());
        let base = CompactIndex::from_bytes(&idx.base().to_bytes()).unwrap();
        prop_assert_eq!(base.to_permutation(), tau);
    }

    #[test]
    fn hierarchies_nest_and_repeat(tau in any_perm(3000), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let n = tau.len();
        prop_assume!(n >= 4);
        let m1 = 2 + (a * (n - 3) as f64) as usize;
        let m2 = m1 + 1 + (b * (n - m1 - 1) as f64) as usize;
        prop_assume!(m2 < n);
        let h = build_hierarchy(&tau, &[m1, m2]).unwrap();
        prop_assert!(h.violations(&tau).is_empty(), "{:?}", h.violations(&tau));
        let again = build_hierarchy(&tau, &[m1, m2]).unwrap();
        prop_assert_eq!(&h.divisions, &again.divisions);
        prop_assert_eq!(h.d_max, again.d_max);
        let (coarse, fine) = (&h.divisions[0], &h.divisions[1]);
        for (c, f) in [(coarse.col_starts(), fine.col_starts()), (coarse.row_starts(), fine.row_starts())] {
            prop_assert!(c.iter().all(|x| f.binary_search(x).is_ok()));
        }
    }

    #[test]
    fn generators_avoid_their_patterns(f in family(), n in 1usize..60, seed in any::<u64>()) {
        let tau = generate_avoiding(f, n, seed);
        prop_assert_eq!(tau.len(), n);
        for p in f.avoided() {
            prop_assert!(!contains(&tau, &p), "{} contains {}", f, p);
        }
    }

    #[test]
    fn containment_survives_reversal(tau in shuffled(12), k in 1usize..5, seed in any::<u64>()) {
        let p = generate_avoiding(Family::UniformRandom, k, seed);
        let pi = Pattern::new(p.values().to_vec()).unwrap();
        prop_assert_eq!(contains(&tau, &pi), contains(&tau.reversed(), &pi.reversed()));
        prop_assert!(contains(&tau, &Pattern::new(vec![1]).unwrap()));
    }

    #[test]
    fn bitvector_rank_and_select(bits in prop::collection::vec(any::<bool>(), 0..2000)) {
        let bv = BitVector::from_bits(&bits);
        let mut ones = 0;
        for (i, &b) in bits.iter().enumerate() {
            prop_assert_eq!(bv.rank(i), ones);
            prop_assert_eq!(bv.read(i + 1), b);
            if b {
                ones += 1;
                prop_assert_eq!(bv.select(ones), i + 1);
            }
        }
        prop_assert_eq!(bv.rank(bits.len()), ones);
        prop_assert_eq!(bv.count_ones(), ones);
        prop_assert!(bv.try_select(ones + 1).is_err());
    }

    #[test]
    fn range_minima_match_a_scan(values in prop::collection::vec(0u32..50, 1..400), raw in prop::collection::vec(any::<(u16, u16)>(), 1..50)) {
        let rmq = RangeMinIndex::build(&values);
        for (x, y) in raw {
            let (a, b) = (x as usize % values.len() + 1, y as usize % values.len() + 1);
            let (a, b) = (a.min(b), a.max(b));
            let best = (a..=b).min_by_key(|&i| (values[i - 1], i)).unwrap();
            prop_assert_eq!(rmq.query(a, b).unwrap(), best);
        }
    }

    #[test]
    fn tree_navigation_is_consistent(raw in prop::collection::vec(any::<u16>(), 0..300)) {
        // Non-decreasing parents in level order.
        let mut parents = Vec::new();
        for (i, r) in raw.iter().enumerate() {
            let p = (*r as usize % (i + 1)).max(parents.last().copied().unwrap_or(0));
            parents.push(p);
        }
        let mut degrees = vec![0u32; parents.len() + 1];
        for &p in &parents {
            degrees[p] += 1;
        }
        let t = OrderedTree::from_degrees(degrees).unwrap();
        prop_assert_eq!(t.node_count(), parents.len() + 1);
        for (i, &p) in parents.iter().enumerate() {
            let v = i + 1;
            prop_assert_eq!(t.parent(v), Some(p));
            prop_assert_eq!(t.child(p, t.child_rank(v) + 1), v);
        }
        for i in 1..=t.leaf_count() {
            let v = t.leaf_select(i);
            prop_assert!(t.is_leaf(v));
            prop_assert_eq!(t.leaf_rank(v), i - 1);
        }
        prop_assert_eq!(t.leaves_under(0), t.leaf_count());
    }
}
