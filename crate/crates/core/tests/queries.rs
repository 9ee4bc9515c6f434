use permidx::perm::{generate_avoiding, oracle, Family};
use permidx::{build_hierarchy, CompactIndex, Error, GeoIndex, Permutation, QueryRect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FAMILIES: [Family; 6] = [Family::Avoid231, Family::Separable, Family::InterleavedRuns(3), Family::Identity, Family::Reverse, Family::UniformRandom];

fn pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
    (a.min(b), a.max(b))
}

fn check_base(idx: &CompactIndex, tau: &Permutation, rng: &mut ChaCha8Rng) {
    let n = tau.len();
    for i in 1..=n {
        assert_eq!(idx.rank(i).unwrap(), oracle::rank(tau, i).unwrap(), "rank {i}");
        assert_eq!(idx.unrank(i).unwrap(), oracle::unrank(tau, i).unwrap(), "unrank {i}");
        assert_eq!(idx.next_smaller(i).unwrap(), oracle::next_smaller(tau, i).unwrap(), "next_smaller {i}");
    }
    if n <= 64 {
        for a in 1..=n {
            for b in a..=n {
                assert_eq!(idx.range_min(a, b).unwrap(), oracle::range_min(tau, a, b).unwrap(), "range_min {a} {b}");
            }
        }
    } else {
        for _ in 0..2000 {
            let (a, b) = pair(rng, n);
            assert_eq!(idx.range_min(a, b).unwrap(), oracle::range_min(tau, a, b).unwrap(), "range_min {a} {b}");
        }
    }
}

fn check_rects(idx: &GeoIndex, tau: &Permutation, rng: &mut ChaCha8Rng, count: usize) {
    let n = tau.len();
    for _ in 0..count {
        let (a, b) = pair(rng, n);
        let (c, d) = pair(rng, n);
        let r = QueryRect::new(a, b, c, d);
        assert_eq!(idx.rect_count(&r).unwrap(), oracle::rect_count(tau, &r).unwrap(), "{r:?}");
        assert_eq!(idx.rect_min(&r).unwrap(), oracle::rect_min(tau, &r).unwrap(), "{r:?}");
    }
}

#[test]
fn small_inputs_use_the_direct_layout_and_match() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for f in FAMILIES {
        for n in 1..=70 {
            let tau = generate_avoiding(f, n, n as u64);
            let idx = GeoIndex::build(&tau).unwrap();
            check_base(idx.base(), &tau, &mut rng);
            check_rects(&idx, &tau, &mut rng, 200);
        }
    }
    assert!(CompactIndex::build(&Permutation::identity(20)).unwrap().is_direct());
}

#[test]
fn two_level_sizes_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for f in FAMILIES {
        for n in [100, 255, 256, 300, 1000, 2048, 5000] {
            let tau = generate_avoiding(f, n, 11);
            let idx = GeoIndex::build(&tau).unwrap();
            assert!(!idx.base().is_direct(), "{f} {n}");
            check_base(idx.base(), &tau, &mut rng);
            check_rects(&idx, &tau, &mut rng, 2000);
        }
    }
}

#[test]
fn worked_example() {
    let tau = Permutation::new(vec![4, 2, 5, 1, 3, 9, 7, 11, 6, 10, 8]).unwrap();
    let idx = GeoIndex::build(&tau).unwrap();
    let base = idx.base();
    assert_eq!(base.rank(3).unwrap(), 5);
    assert_eq!(base.unrank(11).unwrap(), 8);
    assert_eq!(base.range_min(1, 3).unwrap(), 2);
    assert_eq!(base.range_min(6, 11).unwrap(), 9);
    assert_eq!(base.next_smaller(1).unwrap(), Some(2));
    assert_eq!(base.next_smaller(4).unwrap(), None);
    assert_eq!(base.next_smaller(8).unwrap(), Some(9));
    assert_eq!(idx.rect_count(&QueryRect::new(1, 5, 1, 5)).unwrap(), 5);
    assert_eq!(idx.rect_count(&QueryRect::new(6, 11, 1, 5)).unwrap(), 0);
    assert_eq!(idx.rect_min(&QueryRect::new(6, 11, 1, 5)).unwrap(), None);
    assert_eq!(idx.rect_count(&QueryRect::new(7, 10, 6, 11)).unwrap(), 4);
}

#[test]
fn singleton_full_and_empty_rectangles() {
    for f in [Family::Avoid231, Family::Separable, Family::UniformRandom] {
        for n in [1, 40, 3000] {
            let tau = generate_avoiding(f, n, 5);
            let idx = GeoIndex::build(&tau).unwrap();
            let full = QueryRect::full(n);
            assert_eq!(idx.rect_count(&full).unwrap(), n);
            assert_eq!(idx.rect_min(&full).unwrap(), oracle::rect_min(&tau, &full).unwrap());
            for i in (1..=n).step_by(7) {
                let v = tau.get(i) as usize;
                let hit = QueryRect::new(v, v, i, i);
                assert_eq!(idx.rect_count(&hit).unwrap(), 1);
                assert_eq!(idx.rect_min(&hit).unwrap(), oracle::rect_min(&tau, &hit).unwrap());
                if n > 1 {
                    let w = if v == 1 { 2 } else { v - 1 };
                    let miss = QueryRect::new(w, w, i, i);
                    assert_eq!(idx.rect_count(&miss).unwrap(), 0);
                    assert_eq!(idx.rect_min(&miss).unwrap(), None);
                }
            }
        }
    }
}

#[test]
fn out_of_range_arguments_are_errors() {
    let tau = generate_avoiding(Family::Avoid231, 500, 1);
    let idx = GeoIndex::build(&tau).unwrap();
    let base = idx.base();
    assert!(base.rank(0).is_err());
    assert!(base.rank(501).is_err());
    assert!(base.unrank(0).is_err());
    assert!(base.range_min(5, 4).is_err());
    assert!(base.range_min(1, 501).is_err());
    assert!(base.next_smaller(0).is_err());
    for r in [QueryRect::new(0, 3, 1, 3), QueryRect::new(4, 3, 1, 3), QueryRect::new(1, 3, 1, 501)] {
        assert!(idx.rect_count(&r).is_err(), "{r:?}");
        assert!(idx.rect_min(&r).is_err(), "{r:?}");
        assert!(idx.pieces(&r).is_err(), "{r:?}");
    }
    assert!(matches!(GeoIndex::from_bytes(&base.to_bytes()), Err(Error::NoGeo)));
}

#[test]
fn finest_geo_level_is_the_base_fine_division() {
    for f in [Family::Avoid231, Family::Separable] {
        for n in [1 << 11, 5000] {
            let tau = generate_avoiding(f, n, 2);
            let idx = GeoIndex::build(&tau).unwrap();
            let p = idx.base().params();
            let h = build_hierarchy(&tau, &[p.m1, p.m2]).unwrap();
            let divs = idx.divisions();
            let last = &divs[idx.levels()];
            assert_eq!(last.size(), p.m2);
            assert_eq!(last.col_starts(), h.divisions[1].col_starts());
            assert_eq!(last.row_starts(), h.divisions[1].row_starts());
            assert_eq!(idx.sizes().last(), Some(&p.m2));
        }
    }
}

#[test]
fn rectangles_in_one_fine_strip_touch_few_tables() {
    let n = 1 << 12;
    let tau = generate_avoiding(Family::Avoid231, n, 8);
    let idx = GeoIndex::build(&tau).unwrap();
    let d = idx.base().d_max().unwrap() as u64;
    let (cols, rows) = idx.base().fine_widths().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut start = 1;
    for (k, &w) in cols.iter().enumerate() {
        if k % 5 == 0 {
            let (c, e) = pair(&mut rng, w);
            let (y1, y2) = pair(&mut rng, n);
            let r = QueryRect::new(y1, y2, start + c - 1, start + e - 1);
            let (count, t) = idx.rect_count_traced(&r).unwrap();
            assert_eq!(count, oracle::rect_count(&tau, &r).unwrap());
            assert!(t.visits <= 1 + 2 * d, "{r:?}: {} visits", t.visits);
        }
        start += w;
    }
    let mut start = 1;
    for (k, &w) in rows.iter().enumerate() {
        if k % 3 == 0 {
            let r = QueryRect::new(start, start + w - 1, 1, n);
            let (count, t) = idx.rect_count_traced(&r).unwrap();
            assert_eq!(count, w);
            assert!(t.visits <= 1 + 2 * d, "{r:?}: {} visits", t.visits);
        }
        start += w;
    }
}

#[test]
fn rectangle_visits_grow_with_levels_only() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for f in [Family::Avoid231, Family::Separable, Family::InterleavedRuns(4)] {
        let n = 1 << 13;
        let tau = generate_avoiding(f, n, 3);
        let idx = GeoIndex::build(&tau).unwrap();
        let bound = 4 * (idx.levels() as u64 + 1);
        // Minima also descend into the pieces they pick.
        let min_bound = 2 * bound;
        for _ in 0..2000 {
            let (a, b) = pair(&mut rng, n);
            let (c, d) = pair(&mut rng, n);
            let r = QueryRect::new(a, b, c, d);
            let (_, t) = idx.rect_count_traced(&r).unwrap();
            assert!(t.visits <= bound, "{f}: {r:?} took {} visits, bound {bound}", t.visits);
            let (_, t) = idx.rect_min_traced(&r).unwrap();
            assert!(t.visits <= min_bound, "{f}: {r:?} took {} visits, bound {min_bound}", t.visits);
        }
    }
}
