//! End-to-end checks at desk scale. Prints one line per check and exits
//! non-zero when any of them fails.

use std::collections::BTreeSet;
use std::time::Instant;

use permidx::geo::geo_sizes;
use permidx::perm::{generate_avoiding, oracle, Family};
use permidx::tally::OpCount;
use permidx::{build_hierarchy, CompactIndex, GeoIndex, Permutation, QueryRect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FAMILIES: [Family; 3] = [Family::Avoid231, Family::Separable, Family::InterleavedRuns(4)];
const SIZES: [u32; 4] = [11, 14, 16, 18];
const SEED: u64 = 1;
const QUERIES: usize = 10_000;

/// Slack constant on the payload bound. The first build needed none: the
/// payload stayed under 4n at every size.
const PAYLOAD_SLACK: f64 = 1.0;
/// Extra rectangle visits beyond four per level. Measured maximum: 0.
const EXTRA_VISITS: u64 = 0;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
    (a.min(b), a.max(b))
}

fn rect(rng: &mut ChaCha8Rng, n: usize) -> QueryRect {
    let (a, b) = pair(rng, n);
    let (c, d) = pair(rng, n);
    QueryRect::new(a, b, c, d)
}

fn oracle_equivalence() -> Outcome {
    let mut mismatches = Vec::new();
    let mut note = |what: String| {
        if mismatches.len() < 5 {
            mismatches.push(what);
        }
    };
    for f in FAMILIES {
        for lg in SIZES {
            let n = 1usize << lg;
            let tau = generate_avoiding(f, n, SEED);
            let idx = GeoIndex::build(&tau).expect("build");
            let base = idx.base();
            let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ lg as u64);
            let positions: Vec<usize> = if lg <= 14 { (1..=n).collect() } else { (0..QUERIES).map(|_| rng.gen_range(1..=n)).collect() };
            let inverse = tau.inverse();
            for &i in &positions {
                if base.rank(i).ok() != Some(tau.get(i) as usize) || base.unrank(i).ok() != Some(inverse.get(i) as usize) {
                    note(format!("{f} n={n}: rank/unrank at {i}"));
                }
            }
            for _ in 0..QUERIES {
                let (a, b) = pair(&mut rng, n);
                if base.range_min(a, b).ok() != oracle::range_min(&tau, a, b).ok() {
                    note(format!("{f} n={n}: rangemin {a} {b}"));
                }
                let i = rng.gen_range(1..=n);
                if base.next_smaller(i).ok() != oracle::next_smaller(&tau, i).ok() {
                    note(format!("{f} n={n}: nextsmaller {i}"));
                }
                let r = rect(&mut rng, n);
                if idx.rect_count(&r).ok() != oracle::rect_count(&tau, &r).ok() {
                    note(format!("{f} n={n}: rect {r:?}"));
                }
                let r = rect(&mut rng, n);
                if idx.rect_min(&r).ok() != oracle::rect_min(&tau, &r).ok() {
                    note(format!("{f} n={n}: rectmin {r:?}"));
                }
            }
        }
    }
    let detail = if mismatches.is_empty() { "no mismatches".to_string() } else { mismatches.join("; ") };
    Outcome { pass: mismatches.is_empty(), detail }
}

/// All snapshot sizes a geometric build at `n` takes.
fn snapshot_sizes(n: usize, base: &CompactIndex) -> Vec<usize> {
    let p = base.params();
    let mut all = geo_sizes(n, p.m2).1;
    all.push(p.m1);
    all.sort_unstable();
    all.dedup();
    all
}

fn decomposition_invariants() -> Outcome {
    let mut problems = Vec::new();
    let mut snapshots = 0;
    for f in FAMILIES {
        for lg in SIZES {
            let n = 1usize << lg;
            let tau = generate_avoiding(f, n, SEED);
            let base = CompactIndex::build(&tau).expect("build");
            let sizes = snapshot_sizes(n, &base);
            let h = build_hierarchy(&tau, &sizes).expect("hierarchy");
            let again = build_hierarchy(&tau, &sizes).expect("hierarchy");
            snapshots += sizes.len();
            if h.delta != 20 {
                problems.push(format!("{f} n={n}: constant {}", 2 * h.delta));
            }
            for v in h.violations(&tau).into_iter().take(2) {
                problems.push(format!("{f} n={n}: {v}"));
            }
            if again.d_max != h.d_max || again.divisions != h.divisions {
                problems.push(format!("{f} n={n}: rebuild differs"));
            }
            if base.d_max() != Some(h.d_max) {
                problems.push(format!("{f} n={n}: index dMax {:?} vs {}", base.d_max(), h.d_max));
            }
        }
    }
    let detail = if problems.is_empty() { format!("{snapshots} snapshots sound, dMax repeatable") } else { problems.join("; ") };
    Outcome { pass: problems.is_empty(), detail }
}

fn payload_bound() -> Outcome {
    let mut per = Vec::new();
    let mut within = true;
    for lg in [14u32, 16, 18] {
        let n = 1usize << lg;
        let tau = generate_avoiding(Family::Avoid231, n, SEED);
        let space = CompactIndex::build(&tau).expect("build").space();
        let (nf, l) = (n as f64, lg as f64);
        let bound = 4.0 * nf + PAYLOAD_SLACK * nf * l.log2() / l.sqrt();
        if lg == 18 {
            within = space.payload_bits() as f64 <= bound;
        }
        per.push((n, space.payload_per_element(), bound / nf));
    }
    let monotone = per.windows(2).all(|w| w[1].1 <= w[0].1);
    let shown: Vec<String> = per.iter().map(|(n, b, _)| format!("{b:.3} at {n}")).collect();
    Outcome {
        pass: within && monotone,
        detail: format!(
            "payload bits/n {}; bound at 2^18 {:.3} ({}); non-increasing: {}",
            shown.join(", "),
            per[2].2,
            if within { "met" } else { "exceeded" },
            if monotone { "yes" } else { "no" }
        ),
    }
}

fn overhead() -> Outcome {
    let n = 1usize << 18;
    let tau = generate_avoiding(Family::Avoid231, n, SEED);
    let idx = GeoIndex::build(&tau).expect("build");
    let base = idx.base().space().overhead_bits();
    let geo: u64 = idx.space().components.iter().filter(|c| c.name.starts_with("geo.")).map(|c| c.model_bits).sum();
    let half = n as u64 / 2;
    Outcome {
        pass: base <= half && geo <= half,
        detail: format!(
            "limit {half} bits; base overhead {base} ({:.1} bits/n); geometric nodes {geo} ({:.1} bits/n)",
            base as f64 / n as f64,
            geo as f64 / n as f64
        ),
    }
}

fn op_counts(idx: &CompactIndex, n: usize, rng: &mut ChaCha8Rng) -> BTreeSet<(char, u64)> {
    let mut seen = BTreeSet::new();
    for _ in 0..QUERIES {
        let i = rng.gen_range(1..=n);
        let mut c = OpCount::default();
        idx.rank_counted(i, &mut c).expect("rank");
        seen.insert(('r', c.ops));
        let mut c = OpCount::default();
        idx.unrank_counted(i, &mut c).expect("unrank");
        seen.insert(('u', c.ops));
    }
    seen
}

fn query_cost() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let small = CompactIndex::build(&generate_avoiding(Family::Avoid231, 1 << 12, SEED)).expect("build");
    let n = 1usize << 18;
    let tau = generate_avoiding(Family::Avoid231, n, SEED);
    let idx = GeoIndex::build(&tau).expect("build");
    let (a, b) = (op_counts(&small, 1 << 12, &mut rng), op_counts(idx.base(), n, &mut rng));
    let flat = a == b && a.len() == 2;
    let levels = idx.levels();
    let limit = 4 * (levels as u64 + 1) + EXTRA_VISITS;
    let mut worst = 0;
    for _ in 0..QUERIES {
        let (_, t) = idx.rect_count_traced(&rect(&mut rng, n)).expect("rect");
        worst = worst.max(t.visits);
    }
    let shallow = levels <= 6;
    Outcome {
        pass: flat && worst <= limit && shallow,
        detail: format!(
            "rank/unrank ops {:?} at 2^12, {:?} at 2^18; rect visits max {worst} vs {limit}; levels {levels} (limit 6)",
            a.iter().map(|x| x.1).collect::<Vec<_>>(),
            b.iter().map(|x| x.1).collect::<Vec<_>>()
        ),
    }
}

fn piece_soundness() -> Outcome {
    let mut problems = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pieces_seen = 0;
    for f in FAMILIES {
        for n in [1usize << 8, 1 << 10] {
            let tau = generate_avoiding(f, n, SEED);
            let idx = GeoIndex::build(&tau).expect("build");
            for _ in 0..1000 {
                let r = rect(&mut rng, n);
                let pieces = idx.pieces(&r).expect("pieces");
                pieces_seen += pieces.len();
                let mut owner = vec![0usize; n + 1];
                for p in &pieces {
                    let bx = QueryRect::new(p.rows.0, p.rows.1, p.cols.0, p.cols.1);
                    if p.count != oracle::rect_count(&tau, &bx).unwrap_or(usize::MAX) {
                        problems.push(format!("{f} n={n} {r:?}: count of {p:?}"));
                    }
                    for (i, slot) in owner.iter_mut().enumerate().take(p.cols.1 + 1).skip(p.cols.0) {
                        if bx.contains(i, tau.get(i) as usize) {
                            *slot += 1;
                        }
                    }
                }
                for (i, &o) in owner.iter().enumerate().skip(1) {
                    if o != usize::from(r.contains(i, tau.get(i) as usize)) {
                        problems.push(format!("{f} n={n} {r:?}: point at {i} in {o} pieces"));
                    }
                }
                let overlap = pieces
                    .iter()
                    .enumerate()
                    .any(|(k, p)| pieces[k + 1..].iter().any(|q| p.cols.0 <= q.cols.1 && q.cols.0 <= p.cols.1 && p.rows.0 <= q.rows.1 && q.rows.0 <= p.rows.1));
                if overlap {
                    problems.push(format!("{f} n={n} {r:?}: overlapping pieces"));
                }
            }
        }
    }
    problems.truncate(5);
    let detail = if problems.is_empty() { format!("{pieces_seen} pieces checked") } else { problems.join("; ") };
    Outcome { pass: problems.is_empty(), detail }
}

fn answers(idx: &GeoIndex, n: usize, rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    let mut out = Vec::new();
    for _ in 0..1000 {
        let (a, b) = pair(rng, n);
        let base = idx.base();
        out.push(base.rank(a).ok());
        out.push(base.unrank(b).ok());
        out.push(base.range_min(a, b).ok());
        out.push(base.next_smaller(a).ok().flatten());
        let r = rect(rng, n);
        out.push(idx.rect_count(&r).ok());
        out.push(idx.rect_min(&r).ok().flatten());
    }
    out
}

fn round_trip() -> Outcome {
    let mut problems = Vec::new();
    for f in FAMILIES {
        for n in [1usize << 11, 1 << 14] {
            let tau: Permutation = generate_avoiding(f, n, SEED);
            let idx = GeoIndex::build(&tau).expect("build");
            let bytes = idx.to_bytes();
            let back = match GeoIndex::from_bytes(&bytes) {
                Ok(b) => b,
                Err(e) => {
                    problems.push(format!("{f} n={n}: {e}"));
                    continue;
                }
            };
            if back.to_bytes() != bytes {
                problems.push(format!("{f} n={n}: bytes differ"));
            }
            let seed = SEED ^ n as u64;
            if answers(&idx, n, &mut ChaCha8Rng::seed_from_u64(seed)) != answers(&back, n, &mut ChaCha8Rng::seed_from_u64(seed)) {
                problems.push(format!("{f} n={n}: answers differ"));
            }
        }
    }
    let detail = if problems.is_empty() { "identical bytes and answers".to_string() } else { problems.join("; ") };
    Outcome { pass: problems.is_empty(), detail }
}

fn main() {
    let checks: [(&str, Check); 7] = [
        ("oracle equivalence", oracle_equivalence),
        ("decomposition invariants", decomposition_invariants),
        ("payload bound", payload_bound),
        ("sublinear overhead", overhead),
        ("query cost", query_cost),
        ("piece soundness", piece_soundness),
        ("round trip", round_trip),
    ];
    let mut failed = 0;
    for (k, (name, check)) in checks.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {:<5} {name}: {} ({:.1} s)", k + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail, t.elapsed().as_secs_f64());
    }
    println!("{} of {} passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
