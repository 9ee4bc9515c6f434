use std::panic::{catch_unwind, AssertUnwindSafe};

use permidx::codec::{seal, unseal};
use permidx::perm::{generate_avoiding, oracle, Family};
use permidx::{CompactIndex, Error, GeoIndex, QueryRect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn reloaded_indexes_answer_like_the_originals() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (f, n) in [(Family::Avoid231, 3000), (Family::Separable, 1 << 12), (Family::InterleavedRuns(3), 40), (Family::UniformRandom, 2000)] {
        let tau = generate_avoiding(f, n, 4);
        let idx = GeoIndex::build(&tau).unwrap();
        let bytes = idx.to_bytes();
        let back = GeoIndex::from_bytes(&bytes).unwrap();
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(back.levels(), idx.levels());
        assert_eq!(back.sizes(), idx.sizes());
        for _ in 0..1000 {
            let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
            let (c, d) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
            let (a, b, c, d) = (a.min(b), a.max(b), c.min(d), c.max(d));
            let r = QueryRect::new(a, b, c, d);
            assert_eq!(back.base().rank(a).unwrap(), idx.base().rank(a).unwrap());
            assert_eq!(back.base().unrank(b).unwrap(), idx.base().unrank(b).unwrap());
            assert_eq!(back.base().range_min(c, d).unwrap(), oracle::range_min(&tau, c, d).unwrap());
            assert_eq!(back.base().next_smaller(c).unwrap(), idx.base().next_smaller(c).unwrap());
            assert_eq!(back.rect_count(&r).unwrap(), idx.rect_count(&r).unwrap());
            assert_eq!(back.rect_min(&r).unwrap(), idx.rect_min(&r).unwrap());
            assert_eq!(back.pieces(&r).unwrap(), idx.pieces(&r).unwrap());
        }
        let base = CompactIndex::from_bytes(&idx.base().to_bytes()).unwrap();
        assert_eq!(base.to_bytes(), idx.base().to_bytes());
        assert!(base.build_info().is_none());
    }
}

#[test]
fn building_twice_gives_identical_bytes() {
    let tau = generate_avoiding(Family::Separable, 5000, 6);
    assert_eq!(GeoIndex::build(&tau).unwrap().to_bytes(), GeoIndex::build(&tau).unwrap().to_bytes());
}

#[test]
fn the_loaders_refuse_each_others_files() {
    let tau = generate_avoiding(Family::Avoid231, 1000, 1);
    let geo = GeoIndex::build(&tau).unwrap();
    assert!(matches!(GeoIndex::from_bytes(&geo.base().to_bytes()), Err(Error::NoGeo)));
    assert!(matches!(CompactIndex::from_bytes(&geo.to_bytes()), Err(Error::Format(_))));
}

#[test]
fn damaged_files_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tau = generate_avoiding(Family::Avoid231, 2000, 3);
    let bytes = GeoIndex::build(&tau).unwrap().to_bytes();
    for _ in 0..300 {
        let mut b = bytes.clone();
        let i = rng.gen_range(0..b.len());
        b[i] ^= 1 << rng.gen_range(0..8);
        assert!(GeoIndex::from_bytes(&b).is_err());
    }
    for len in [0, 3, 4, 20, bytes.len() / 2, bytes.len() - 1] {
        assert!(GeoIndex::from_bytes(&bytes[..len]).is_err(), "length {len}");
    }
    let mut longer = bytes.clone();
    longer.push(0);
    assert!(GeoIndex::from_bytes(&longer).is_err());
}

#[test]
fn bad_headers_are_format_errors() {
    let tau = generate_avoiding(Family::Separable, 500, 2);
    let body = unseal(&CompactIndex::build(&tau).unwrap().to_bytes()).unwrap().to_vec();
    let mut magic = body.clone();
    magic[0] = b'X';
    let mut version = body.clone();
    version[8] = 99;
    let mut flags = body.clone();
    flags[12] |= 0x80;
    let mut trailing = body.clone();
    trailing.push(7);
    for b in [magic, version, flags, trailing] {
        assert!(matches!(CompactIndex::from_bytes(&seal(b)), Err(Error::Format(_))));
    }
}

/// Corruption behind a valid checksum must surface as an error, never a panic.
#[test]
fn resealed_corruption_never_panics() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (n, geo) in [(60, true), (3000, false), (3000, true)] {
        let tau = generate_avoiding(Family::Avoid231, n, 2);
        let sealed = if geo { GeoIndex::build(&tau).unwrap().to_bytes() } else { CompactIndex::build(&tau).unwrap().to_bytes() };
        let body = unseal(&sealed).unwrap().to_vec();
        for t in 0..600 {
            let mut b = body.clone();
            if t % 4 == 0 {
                b.truncate(rng.gen_range(0..b.len()));
            } else {
                let i = rng.gen_range(0..b.len());
                b[i] ^= 1 << rng.gen_range(0..8);
            }
            let b = seal(b);
            let run = catch_unwind(AssertUnwindSafe(|| {
                if geo {
                    if let Ok(g) = GeoIndex::from_bytes(&b) {
                        let _ = g.rect_count(&QueryRect::full(n));
                    }
                } else if let Ok(c) = CompactIndex::from_bytes(&b) {
                    let _ = c.range_min(1, n);
                }
            }));
            assert!(run.is_ok(), "panic on damaged input (n={n}, geo={geo}, trial {t})");
        }
    }
}
