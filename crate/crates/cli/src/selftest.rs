//! Oracle comparison over the generator families at bounded sizes.

use anyhow::Result;
use permidx::perm::{contains, generate_avoiding, oracle, Family};
use permidx::{build_hierarchy, GeoIndex, Permutation, QueryRect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::Format;

const QUERIES: usize = 500;

struct Check {
    name: String,
    failures: Vec<String>,
}

fn check_one(tau: &Permutation, family: Family, rng: &mut ChaCha8Rng) -> Result<Vec<String>> {
    let n = tau.len();
    let mut bad = Vec::new();
    let mut note = |what: String| {
        if bad.len() < 5 {
            bad.push(what);
        }
    };
    if n <= 500 {
        for p in family.avoided() {
            if contains(tau, &p) {
                note(format!("generator output contains {p}"));
            }
        }
    }
    let idx = GeoIndex::build(tau)?;
    let base = idx.base();
    if !base.is_direct() {
        let p = base.params();
        let h = build_hierarchy(tau, &[p.m1, p.m2])?;
        for v in h.violations(tau) {
            note(v);
        }
    }
    if let Err(e) = idx.check_nodes() {
        note(e.to_string());
    }
    for i in 1..=n {
        let v = tau.get(i) as usize;
        if base.rank(i)? != v || base.unrank(v)? != i {
            note(format!("rank/unrank at {i}"));
        }
    }
    let pair = |rng: &mut ChaCha8Rng| {
        let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
        (a.min(b), a.max(b))
    };
    for _ in 0..QUERIES {
        let (a, b) = pair(rng);
        if base.range_min(a, b)? != oracle::range_min(tau, a, b)? {
            note(format!("rangemin {a} {b}"));
        }
        if base.next_smaller(a)? != oracle::next_smaller(tau, a)? {
            note(format!("nextsmaller {a}"));
        }
        let (c, d) = pair(rng);
        let r = QueryRect::new(a, b, c, d);
        if idx.rect_count(&r)? != oracle::rect_count(tau, &r)? {
            note(format!("rect {a} {b} {c} {d}"));
        }
        if idx.rect_min(&r)? != oracle::rect_min(tau, &r)? {
            note(format!("rectmin {a} {b} {c} {d}"));
        }
    }
    let bytes = idx.to_bytes();
    let back = GeoIndex::from_bytes(&bytes)?;
    if back.to_bytes() != bytes {
        note("re-serialization differs".into());
    }
    Ok(bad)
}

pub fn run(format: Format, max_lg: u32, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let families = [Family::Avoid231, Family::Separable, Family::InterleavedRuns(4), Family::Identity, Family::Reverse];
    let mut sizes: Vec<usize> = vec![1, 2, 7, 50, 300];
    sizes.extend((8..=max_lg).step_by(3).map(|lg| 1usize << lg));
    if max_lg >= 8 {
        sizes.push(1 << max_lg);
    }
    sizes.sort_unstable();
    sizes.dedup();
    let mut checks = Vec::new();
    for f in families {
        for &n in &sizes {
            let tau = generate_avoiding(f, n, seed);
            let failures = check_one(&tau, f, &mut rng)?;
            checks.push(Check { name: format!("{f} n={n}"), failures });
        }
    }
    let ok = checks.iter().all(|c| c.failures.is_empty());
    let value = json!({
        "passed": ok,
        "checks": checks.iter().map(|c| json!({ "name": c.name, "failures": c.failures })).collect::<Vec<_>>(),
    });
    crate::emit(
        format,
        || {
            let mut s = String::new();
            for c in &checks {
                let status = if c.failures.is_empty() { "ok" } else { "FAIL" };
                s += &format!("{status:>4}  {}\n", c.name);
                for f in &c.failures {
                    s += &format!("      {f}\n");
                }
            }
            s += if ok { "all checks passed" } else { "some checks failed" };
            s
        },
        value,
    )?;
    Ok(ok)
}
