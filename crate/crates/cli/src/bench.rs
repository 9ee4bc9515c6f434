//! Build and query sweeps over growing inputs.

use std::time::Instant;

use anyhow::Result;
use permidx::perm::{generate_avoiding, Family};
use permidx::tally::OpCount;
use permidx::{GeoIndex, QueryRect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{Format, Loaded, Query};

const CHUNK: usize = 16;

fn random_queries(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Query> {
    let pair = |rng: &mut ChaCha8Rng| {
        let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
        (a.min(b), a.max(b))
    };
    let mut out = Vec::with_capacity(count * 6);
    for _ in 0..count {
        let (a, b) = pair(rng);
        let (c, d) = pair(rng);
        let r = QueryRect::new(a, b, c, d);
        out.push(Query::Rank(rng.gen_range(1..=n)));
        out.push(Query::Unrank(rng.gen_range(1..=n)));
        out.push(Query::RangeMin(c, d));
        out.push(Query::NextSmaller(rng.gen_range(1..=n)));
        out.push(Query::Rect(r));
        out.push(Query::RectMin(r));
    }
    out
}

fn kind(q: &Query) -> usize {
    match q {
        Query::Rank(_) => 0,
        Query::Unrank(_) => 1,
        Query::RangeMin(..) => 2,
        Query::NextSmaller(_) => 3,
        Query::Rect(_) => 4,
        Query::RectMin(_) => 5,
    }
}

const KINDS: [&str; 6] = ["rank", "unrank", "rangemin", "nextsmaller", "rect", "rectmin"];

/// Per-query nanoseconds, one sample per chunk of same-kind queries.
fn time_queries(idx: &Loaded, queries: &[Query], threads: usize) -> Result<Vec<Vec<f64>>> {
    let mut by_kind: Vec<Vec<Query>> = vec![Vec::new(); KINDS.len()];
    for q in queries {
        by_kind[kind(q)].push(*q);
    }
    let mut samples = vec![Vec::new(); KINDS.len()];
    for (k, qs) in by_kind.iter().enumerate() {
        let per = qs.len().div_ceil(threads).max(CHUNK);
        let parts: Vec<Result<Vec<f64>>> = std::thread::scope(|s| {
            let handles: Vec<_> = qs
                .chunks(per)
                .map(|part| {
                    s.spawn(move || {
                        let mut out = Vec::new();
                        for chunk in part.chunks(CHUNK) {
                            let t = Instant::now();
                            for q in chunk {
                                std::hint::black_box(q.run(idx)?);
                            }
                            out.push(t.elapsed().as_nanos() as f64 / chunk.len() as f64);
                        }
                        Ok(out)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("query thread panicked")).collect()
        });
        for p in parts {
            samples[k].extend(p?);
        }
    }
    Ok(samples)
}

fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    xs[xs.len() / 2]
}

pub fn run(format: Format, family: Family, lgs: &[u32], count: usize, threads: usize, seed: u64) -> Result<()> {
    let mut rows: Vec<Value> = Vec::new();
    for &lg in lgs {
        let n = 1usize << lg;
        let tau = generate_avoiding(family, n, seed);
        let t = Instant::now();
        let geo = GeoIndex::build(&tau)?;
        let build = t.elapsed().as_secs_f64();
        let levels = geo.levels();
        let space = geo.space();
        let idx = Loaded::Geo(geo);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ lg as u64);
        let queries = random_queries(n, count, &mut rng);
        let mut samples = time_queries(&idx, &queries, threads)?;

        // Operation counters over the same queries.
        let (base, geo) = (idx.base(), idx.geo().expect("built with geo"));
        let (mut rank_ops, mut unrank_ops, mut visits) = ((u64::MAX, 0), (u64::MAX, 0), 0u64);
        for q in &queries {
            match *q {
                Query::Rank(i) => {
                    let mut c = OpCount::default();
                    base.rank_counted(i, &mut c)?;
                    rank_ops = (rank_ops.0.min(c.ops), rank_ops.1.max(c.ops));
                }
                Query::Unrank(v) => {
                    let mut c = OpCount::default();
                    base.unrank_counted(v, &mut c)?;
                    unrank_ops = (unrank_ops.0.min(c.ops), unrank_ops.1.max(c.ops));
                }
                Query::Rect(r) => visits = visits.max(geo.rect_count_traced(&r)?.1.visits),
                _ => {}
            }
        }
        let medians: Vec<f64> = samples.iter_mut().map(|s| median(s)).collect();
        rows.push(json!({
            "n": n,
            "build_seconds": build,
            "levels": levels,
            "payload_per_element": space.payload_per_element(),
            "median_ns": KINDS.iter().zip(&medians).map(|(k, m)| (k.to_string(), json!(m))).collect::<serde_json::Map<_, _>>(),
            "rank_ops": [rank_ops.0, rank_ops.1],
            "unrank_ops": [unrank_ops.0, unrank_ops.1],
            "rect_max_visits": visits,
            "rect_visit_bound": 4 * (levels + 1),
        }));
    }
    let value = json!({ "family": family.to_string(), "queries": count, "threads": threads, "seed": seed, "rows": rows });
    crate::emit(
        format,
        || {
            let mut s = format!("{family}, {count} queries of each kind, {threads} thread(s)\n");
            s += &format!("{:>9} {:>8} {:>3} {:>7}", "n", "build s", "l", "bits/n");
            for k in KINDS {
                s += &format!(" {k:>11}");
            }
            s += "   rank ops  unrank ops   visits\n";
            for r in &rows {
                s += &format!(
                    "{:>9} {:>8.3} {:>3} {:>7.3}",
                    r["n"].as_u64().unwrap_or(0),
                    r["build_seconds"].as_f64().unwrap_or(0.0),
                    r["levels"].as_u64().unwrap_or(0),
                    r["payload_per_element"].as_f64().unwrap_or(0.0)
                );
                for k in KINDS {
                    s += &format!(" {:>9.0}ns", r["median_ns"][k].as_f64().unwrap_or(f64::NAN));
                }
                let range = |v: &Value| format!("{}..{}", v[0], v[1]);
                s += &format!(
                    " {:>10} {:>11} {:>5}/{}\n",
                    range(&r["rank_ops"]),
                    range(&r["unrank_ops"]),
                    r["rect_max_visits"].as_u64().unwrap_or(0),
                    r["rect_visit_bound"].as_u64().unwrap_or(0)
                );
            }
            s.trim_end().to_string()
        },
        value,
    )
}
