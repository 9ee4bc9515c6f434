//! Command line front end: generate permutations, build and load indexes,
//! answer queries, dump statistics and decompositions, benchmark.

mod bench;
mod selftest;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use permidx::perm::{generate_avoiding, Family};
use permidx::{build_hierarchy, CompactIndex, Error, GeoIndex, Permutation, QueryRect, SpaceReport};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "permidx", version, about = "Compact indexes for pattern-avoiding permutations")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated permutation in the text format.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build an index from a permutation file and write it.
    Build {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Add the rectangle query structures.
        #[arg(long)]
        geo: bool,
    },
    /// Answer a query such as `rank 7` or `rect 1 10 3 8`.
    Query {
        index: PathBuf,
        /// File with one query per line.
        #[arg(long, conflicts_with = "words")]
        batch: Option<PathBuf>,
        words: Vec<String>,
    },
    /// Space report and decomposition figures of an index.
    Stats { index: PathBuf },
    /// Run the decomposition alone and check its invariants.
    Decompose {
        input: PathBuf,
        /// Division sizes, increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
    /// Build and time query sweeps over growing inputs.
    Bench {
        #[arg(long, default_value = "avoid231")]
        family: Family,
        /// Base-2 logarithms of the input sizes.
        #[arg(long, value_delimiter = ',', default_value = "12,14,16")]
        lg: Vec<u32>,
        #[arg(long, default_value_t = 2000)]
        queries: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Compare every query against the brute-force oracle.
    Selftest {
        #[arg(long, default_value_t = 11)]
        max_lg: u32,
    },
}

pub enum Loaded {
    Compact(CompactIndex),
    Geo(GeoIndex),
}

impl Loaded {
    pub fn open(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        match GeoIndex::from_bytes(&bytes) {
            Ok(g) => Ok(Loaded::Geo(g)),
            Err(Error::NoGeo) => Ok(Loaded::Compact(CompactIndex::from_bytes(&bytes)?)),
            Err(e) => Err(e.into()),
        }
    }

    pub fn base(&self) -> &CompactIndex {
        match self {
            Loaded::Compact(c) => c,
            Loaded::Geo(g) => g.base(),
        }
    }

    pub fn geo(&self) -> Option<&GeoIndex> {
        match self {
            Loaded::Compact(_) => None,
            Loaded::Geo(g) => Some(g),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Query {
    Rank(usize),
    Unrank(usize),
    RangeMin(usize, usize),
    NextSmaller(usize),
    Rect(QueryRect),
    RectMin(QueryRect),
}

impl Query {
    pub fn parse(words: &[&str]) -> Result<Self> {
        let (op, args) = words.split_first().ok_or_else(|| anyhow!("empty query"))?;
        let nums = args.iter().map(|a| a.parse::<usize>().with_context(|| format!("bad number `{a}`"))).collect::<Result<Vec<_>>>()?;
        let want = |k: usize| if nums.len() == k { Ok(()) } else { Err(anyhow!("`{op}` takes {k} numbers, got {}", nums.len())) };
        Ok(match op.to_ascii_lowercase().as_str() {
            "rank" => want(1).map(|_| Query::Rank(nums[0]))?,
            "unrank" => want(1).map(|_| Query::Unrank(nums[0]))?,
            "rangemin" => want(2).map(|_| Query::RangeMin(nums[0], nums[1]))?,
            "nextsmaller" => want(1).map(|_| Query::NextSmaller(nums[0]))?,
            "rect" => want(4).map(|_| Query::Rect(QueryRect::new(nums[0], nums[1], nums[2], nums[3])))?,
            "rectmin" => want(4).map(|_| Query::RectMin(QueryRect::new(nums[0], nums[1], nums[2], nums[3])))?,
            _ => bail!("unknown query `{op}`"),
        })
    }

    pub fn run(&self, idx: &Loaded) -> Result<Option<usize>> {
        let base = idx.base();
        let geo = || idx.geo().ok_or_else(|| anyhow!("rectangle queries need an index built with --geo"));
        Ok(match *self {
            Query::Rank(i) => Some(base.rank(i)?),
            Query::Unrank(v) => Some(base.unrank(v)?),
            Query::RangeMin(a, b) => Some(base.range_min(a, b)?),
            Query::NextSmaller(i) => base.next_smaller(i)?,
            Query::Rect(r) => Some(geo()?.rect_count(&r)?),
            Query::RectMin(r) => geo()?.rect_min(&r)?,
        })
    }
}

fn read_perm(path: &Path) -> Result<Permutation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Permutation::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(format: Format, text: impl FnOnce() -> String, value: Value) -> Result<()> {
    let body = match format {
        Format::Text => text(),
        Format::Json => serde_json::to_string_pretty(&value)?,
    };
    match writeln!(io::stdout().lock(), "{body}") {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn cmd_query(format: Format, index: &Path, batch: Option<&Path>, words: &[String]) -> Result<()> {
    let idx = Loaded::open(index)?;
    let lines: Vec<String> = match batch {
        Some(p) => BufReader::new(fs::File::open(p).with_context(|| format!("opening {}", p.display()))?)
            .lines()
            .collect::<io::Result<Vec<_>>>()?
            .into_iter()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .collect(),
        None if words.is_empty() => bail!("give a query or --batch"),
        None => vec![words.join(" ")],
    };
    let mut results = Vec::with_capacity(lines.len());
    for line in &lines {
        let words: Vec<&str> = line.split_whitespace().collect();
        let q = Query::parse(&words).with_context(|| format!("query `{line}`"))?;
        let r = q.run(&idx).with_context(|| format!("query `{line}`"))?;
        results.push((words.join(" "), r));
    }
    let show = |r: &Option<usize>| r.map_or("none".to_string(), |v| v.to_string());
    let json_of = |(q, r): &(String, Option<usize>)| json!({ "query": q, "result": r });
    let value = if batch.is_some() { Value::Array(results.iter().map(json_of).collect()) } else { json_of(&results[0]) };
    emit(format, || results.iter().map(|(_, r)| show(r)).collect::<Vec<_>>().join("\n"), value)
}

fn histogram(widths: &[usize]) -> BTreeMap<String, usize> {
    let mut h: BTreeMap<usize, usize> = BTreeMap::new();
    for &w in widths {
        *h.entry(w).or_default() += 1;
    }
    h.into_iter().map(|(w, c)| (w.to_string(), c)).collect()
}

pub fn space_json(r: &SpaceReport) -> Value {
    json!({
        "payload_bits": r.payload_bits(),
        "overhead_bits": r.overhead_bits(),
        "model_bits": r.model_bits(),
        "physical_bits": r.physical_bits(),
        "payload_per_element": r.payload_per_element(),
        "components": r.components.iter().map(|c| json!({
            "name": c.name,
            "model_bits": c.model_bits,
            "physical_bits": c.physical_bits,
            "payload": c.payload,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_stats(format: Format, index: &Path) -> Result<()> {
    let idx = Loaded::open(index)?;
    let base = idx.base();
    let p = base.params();
    let space = match idx.geo() {
        Some(g) => g.space(),
        None => base.space(),
    };
    let widths = base.fine_widths();
    let layout = if base.is_direct() { "direct" } else { "two-level" };
    let value = json!({
        "n": p.n,
        "layout": layout,
        "params": { "m1": p.m1, "m2": p.m2, "width_cap": p.width_cap },
        "d_max": base.d_max(),
        "space": space_json(&space),
        "strip_widths": widths.as_ref().map(|(c, r)| json!({ "columns": histogram(c), "rows": histogram(r) })),
        "geo": idx.geo().map(|g| json!({
            "levels": g.levels(),
            "sizes": g.sizes(),
            "width_sequence": g.width_sequence(),
        })),
    });
    emit(
        format,
        || {
            let mut s = format!("n = {}  layout = {}  m1 = {}  m2 = {}  d_max = {:?}\n", p.n, layout, p.m1, p.m2, base.d_max());
            s += &format!(
                "payload {:.3} bits/element, overhead {:.3} bits/element\n",
                space.payload_per_element(),
                space.overhead_bits() as f64 / p.n.max(1) as f64
            );
            for c in &space.components {
                s += &format!("  {:<22} {:>12} model  {:>12} physical{}\n", c.name, c.model_bits, c.physical_bits, if c.payload { "  (payload)" } else { "" });
            }
            if let Some(g) = idx.geo() {
                s += &format!("geo levels {} sizes {:?}", g.levels(), g.sizes());
            }
            s.trim_end().to_string()
        },
        value,
    )
}

fn cmd_decompose(format: Format, input: &Path, sizes: &[usize]) -> Result<bool> {
    let tau = read_perm(input)?;
    let h = build_hierarchy(&tau, sizes)?;
    let bad = h.violations(&tau);
    let n = tau.len();
    let divisions: Vec<Value> = h
        .divisions
        .iter()
        .map(|d| {
            let (rows, cols) = (d.row_starts(), d.col_starts());
            let mut cells: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for i in 1..=n {
                *cells.entry((d.col_of(i - 1) + 1, d.row_of(tau.get(i) as usize - 1) + 1)).or_default() += 1;
            }
            json!({
                "size": d.size(),
                "row_starts": rows.iter().map(|&s| s + 1).collect::<Vec<_>>(),
                "col_starts": cols.iter().map(|&s| s + 1).collect::<Vec<_>>(),
                "cells": cells.iter().map(|(&(c, r), &k)| json!([c, r, k])).collect::<Vec<_>>(),
            })
        })
        .collect();
    let value = json!({
        "n": n,
        "sizes": sizes,
        "d_max": h.d_max,
        "d_trace": h.d_trace,
        "delta": h.delta,
        "stats": {
            "merges": h.stats.merges,
            "doublings": h.stats.doublings,
            "cell_ops": h.stats.cell_ops,
            "strip_scans": h.stats.strip_scans,
        },
        "divisions": divisions,
        "violations": bad,
    });
    emit(
        format,
        || {
            let mut s = format!("n = {n}  d_max = {}  merges = {}  doublings = {}\n", h.d_max, h.stats.merges, h.stats.doublings);
            for d in &h.divisions {
                let non_zero: usize = (0..d.size()).map(|j| d.col_cells(j).len()).sum();
                s += &format!("  size {:>8}: {non_zero} non-empty cells\n", d.size());
            }
            if bad.is_empty() {
                s += "invariants hold";
            } else {
                s += &bad.join("\n");
            }
            s
        },
        value,
    )?;
    Ok(bad.is_empty())
}

fn cmd_build(format: Format, input: &Path, out: &Path, geo: bool) -> Result<()> {
    let tau = read_perm(input)?;
    let start = std::time::Instant::now();
    let bytes = if geo { GeoIndex::build(&tau)?.to_bytes() } else { CompactIndex::build(&tau)?.to_bytes() };
    let secs = start.elapsed().as_secs_f64();
    fs::write(out, &bytes).with_context(|| format!("writing {}", out.display()))?;
    emit(
        format,
        || format!("built {} (n = {}, {} bytes, {:.3} s)", out.display(), tau.len(), bytes.len(), secs),
        json!({ "n": tau.len(), "geo": geo, "bytes": bytes.len(), "seconds": secs }),
    )
}

fn run(cli: Cli) -> Result<bool> {
    let f = cli.format;
    match cli.cmd {
        Cmd::Gen { family, n, out } => {
            if n == 0 {
                bail!("n must be positive");
            }
            let text = generate_avoiding(family, n, cli.seed).to_text();
            match out {
                Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => io::stdout().lock().write_all(text.as_bytes())?,
            }
        }
        Cmd::Build { input, out, geo } => cmd_build(f, &input, &out, geo)?,
        Cmd::Query { index, batch, words } => cmd_query(f, &index, batch.as_deref(), &words)?,
        Cmd::Stats { index } => cmd_stats(f, &index)?,
        Cmd::Decompose { input, sizes } => return cmd_decompose(f, &input, &sizes),
        Cmd::Bench { family, lg, queries, threads } => bench::run(f, family, &lg, queries, threads.max(1), cli.seed)?,
        Cmd::Selftest { max_lg } => return selftest::run(f, max_lg, cli.seed),
    }
    Ok(true)
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
