use std::env;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use shortint_core::bounds::{
    c0_of_k, check_uniform_range, epsilon_of_k, k_of_m, lower_bound, mertens_product, BoundInputs,
};
use shortint_core::density::{measure_density, required_limit, Growth};
use shortint_core::fmt::sig12;
use shortint_core::primes::{self, SieveConfig};
use shortint_core::slide::{find_clusters, slide, ScanConfig, SlideStats};
use shortint_core::tuples::{
    count_spaced_selections, covered_prime, greedy_sieve, parse_offsets, progression_tuple,
    select_spaced, singular_series, AdmissibleTuple, Strategy,
};
use shortint_core::{BoundParams, Error, PrimeFilter, PrimeTable, Theorem};

use crate::args::*;
use crate::output::{write_json, writer, Failure, Outcome};

pub const CACHE_ENV: &str = "SHORTINT_CACHE_DIR";

pub struct Output {
    pub json: bool,
    pub path: Option<PathBuf>,
}

impl Output {
    fn open(&self) -> io::Result<Box<dyn Write>> {
        writer(self.path.as_deref())
    }
}

fn cache_path(limit: u64) -> Option<PathBuf> {
    env::var_os(CACHE_ENV).map(|dir| Path::new(&dir).join(format!("primes-{limit}.pbm")))
}

/// Table up to `limit`, read from the cache directory when a matching file exists.
fn table(limit: u64) -> Outcome<PrimeTable> {
    if let Some(path) = cache_path(limit).filter(|p| p.is_file()) {
        return Ok(primes::load(&path, Some(limit))?);
    }
    Ok(PrimeTable::build(limit, primes::DEFAULT_SEGMENT_SIZE)?)
}

fn filter(args: &FilterArgs) -> Outcome<PrimeFilter> {
    Ok(match (args.modulus, args.res, args.disc, args.class) {
        (Some(q), Some(a), None, None) => PrimeFilter::residue(a, q)?,
        (None, None, Some(d), Some(class)) => {
            PrimeFilter::kronecker(d, if class == Class::Split { 1 } else { -1 })?
        }
        (None, None, None, None) => PrimeFilter::All,
        _ => return Err(Failure::usage("use either --mod/--res or --disc/--class")),
    })
}

fn read_params(path: Option<&Path>) -> Outcome<BoundParams> {
    let params = match path {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?)
            .map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
        None => BoundParams::default(),
    };
    params.validate()?;
    Ok(params)
}

pub fn sieve(args: &SieveArgs, out: &Output) -> Outcome {
    let table = PrimeTable::build_with(
        args.limit,
        SieveConfig {
            segment_size: args.segment_size,
            ..SieveConfig::default()
        },
    )?;
    let cache = args.cache.clone().or_else(|| cache_path(args.limit));
    if let Some(path) = &cache {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        primes::save(&table, path)?;
    }
    let mut w = out.open()?;
    if out.json {
        write_json(
            w,
            &json!({ "limit": args.limit, "count": table.count(), "cache": cache }),
        )
    } else {
        writeln!(w, "limit,count")?;
        writeln!(w, "{},{}", args.limit, table.count())?;
        w.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct GrowthRow {
    m: usize,
    #[serde(flatten)]
    growth: Growth,
}

pub fn density(args: &DensityArgs, out: &Output) -> Outcome {
    let filter = filter(&args.filter)?;
    let top_x = if args.growth {
        args.x
            .checked_mul(2)
            .ok_or_else(|| Failure::usage("2x overflows"))?
    } else {
        args.x
    };
    if !(args.lambda > 0.0 && args.lambda.is_finite()) {
        return Err(Failure::usage(format!(
            "lambda must be positive, got {}",
            args.lambda
        )));
    }
    let table = table(required_limit(args.lambda, top_x))?;
    let mut report = measure_density(&table, args.lambda, args.x, args.m_max, &filter)?;
    if !report.partition_holds() {
        return Err(Failure::failed("density buckets do not partition 1..=x"));
    }
    let growth = if args.growth {
        let doubled = measure_density(&table, args.lambda, top_x, args.m_max, &filter)?;
        let rows: Vec<GrowthRow> = (0..=args.m_max)
            .map(|m| GrowthRow {
                m,
                growth: Growth::from_counts(report.counts[m], doubled.counts[m]),
            })
            .collect();
        Some(rows)
    } else {
        None
    };
    let mut w = out.open()?;
    if out.json {
        if !args.compare_poisson {
            report.poisson.clear();
        }
        return write_json(w, &json!({ "report": report, "growth": growth }));
    }
    match growth {
        Some(rows) => {
            writeln!(w, "m,count_x,count_2x,ratio")?;
            for row in rows {
                match row.growth {
                    Growth::Ratio {
                        count_x,
                        count_2x,
                        ratio,
                    } => writeln!(w, "{},{count_x},{count_2x},{}", row.m, sig12(ratio))?,
                    Growth::Empty { count_x, count_2x } => {
                        writeln!(w, "{},{count_x},{count_2x},", row.m)?
                    }
                }
            }
        }
        None => report.write_csv(&mut w, args.compare_poisson)?,
    }
    w.flush()?;
    Ok(())
}

pub fn tuples(cmd: &TuplesCommand, out: &Output) -> Outcome {
    match cmd {
        TuplesCommand::Greedy(args) => greedy(args, out),
        TuplesCommand::Check(args) => check(args, out),
        TuplesCommand::Series(args) => series(args, out),
    }
}

fn greedy(args: &GreedyArgs, out: &Output) -> Outcome {
    if args.k == 0 {
        return Err(Failure::usage("k must be at least 1"));
    }
    let spacing = match args.spacing {
        Some(s) => s,
        None => ((args.window / c0_of_k(args.k.max(2) as f64)?).floor() as u64).max(1),
    };
    let strategy = match args.strategy {
        StrategyArg::FirstFit => Strategy::FirstFit,
        StrategyArg::Random => Strategy::Random(args.seed),
    };
    let k = usize::try_from(args.k).map_err(|_| Failure::usage("k too large"))?;

    let mut report = serde_json::Map::new();
    report.insert("window".into(), json!(args.window));
    report.insert("k".into(), json!(args.k));
    report.insert("spacing".into(), json!(spacing));
    let tuple: Option<AdmissibleTuple> = match (args.modulus, args.res) {
        (Some(q), Some(a)) => {
            report.insert("modulus".into(), json!(q));
            report.insert("residue".into(), json!(a));
            if args.count {
                return Err(Failure::usage("--count is not available with --mod"));
            }
            progression_tuple(args.window, args.k, a, q, spacing, strategy)?
        }
        _ => {
            let set = greedy_sieve(args.window, args.k)?;
            report.insert("survivors".into(), json!(set.len()));
            let removed: Vec<String> = set
                .removed()
                .iter()
                .map(|r| format!("{}:{}", r.prime, r.residue))
                .collect();
            report.insert("removed".into(), json!(removed.join(" ")));
            if args.count {
                let count = count_spaced_selections(&set, k, spacing)?;
                report.insert("exact_count".into(), json!(count.exact.to_string()));
                report.insert("bound".into(), json!(count.bound));
                report.insert("bound_holds".into(), json!(count.bound_holds()));
            }
            select_spaced(&set, k, spacing, strategy)?
        }
    };
    report.insert("tuple".into(), json!(tuple.as_ref().map(|t| t.to_string())));
    report.insert(
        "min_gap".into(),
        json!(tuple.as_ref().and_then(|t| t.min_gap())),
    );

    let mut w = out.open()?;
    if out.json {
        write_json(w, &report)?;
    } else {
        writeln!(w, "key,value")?;
        for (key, value) in &report {
            let text = match value {
                serde_json::Value::Null => String::new(),
                serde_json::Value::String(s) if s.contains(',') || s.contains(' ') => {
                    format!("\"{s}\"")
                }
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => match n.as_f64() {
                    Some(f) if n.is_f64() => sig12(f),
                    _ => n.to_string(),
                },
                other => other.to_string(),
            };
            writeln!(w, "{key},{text}")?;
        }
        w.flush()?;
    }
    if tuple.is_none() {
        return Err(Failure::failed(format!(
            "no {k} offsets with spacing {spacing} fit in the sieved window"
        )));
    }
    Ok(())
}

fn check(args: &OffsetsArgs, out: &Output) -> Outcome {
    let offsets = parse_offsets(&args.offsets)?;
    let covered = covered_prime(&offsets)?;
    let mut w = out.open()?;
    if out.json {
        write_json(
            &mut w,
            &json!({ "offsets": offsets, "admissible": covered.is_none(), "covered_prime": covered }),
        )?;
    } else {
        match covered {
            None => writeln!(w, "admissible")?,
            Some(p) => writeln!(w, "inadmissible (p={p} covered)")?,
        }
        w.flush()?;
    }
    match covered {
        None => Ok(()),
        Some(p) => Err(Failure::failed(format!(
            "every residue class mod {p} is covered"
        ))),
    }
}

fn series(args: &SeriesArgs, out: &Output) -> Outcome {
    let offsets = parse_offsets(&args.offsets)?;
    let value = singular_series(&offsets, args.cutoff)?;
    let mut w = out.open()?;
    if out.json {
        write_json(
            w,
            &json!({ "offsets": offsets, "cutoff": args.cutoff, "singular_series": value }),
        )
    } else {
        writeln!(w, "{}", sig12(value))?;
        w.flush()?;
        Ok(())
    }
}

pub fn run_slide(args: &SlideArgs, out: &Output) -> Outcome {
    let filter = filter(&args.filter)?;
    let params = read_params(args.constants.as_deref())?;
    if !(args.lambda > 0.0 && args.lambda.is_finite()) {
        return Err(Failure::usage(format!(
            "lambda must be positive, got {}",
            args.lambda
        )));
    }
    let mut config = ScanConfig::new(args.lambda, args.x_lo, args.x_hi, args.m, &params)?
        .with_required_spacing(args.require_spacing);
    if let Some(c0) = args.c0 {
        config = config.with_c0(c0);
    }
    let stride = if args.stride == 0 {
        config.disjoint_stride()
    } else {
        args.stride
    };
    config = config.with_stride(stride);

    let table = table(config.required_limit())?;
    let mut traces = match &args.trace_out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            writeln!(w, "j,N_j,count")?;
            Some(w)
        }
        None => None,
    };
    let mut records: Box<dyn Write> = match &args.falsifications {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stderr().lock()),
    };

    let mut stats = SlideStats::default();
    for cluster in find_clusters(&table, &config, &filter)? {
        let trace = slide(&table, &cluster, args.m, &filter)?;
        if let Some(w) = traces.as_mut() {
            trace.write_csv(&mut *w, false)?;
        }
        for f in &trace.falsifications {
            writeln!(records, "{}", f.to_json_line())?;
        }
        stats.add(&cluster, &trace);
    }
    if let Some(mut w) = traces {
        w.flush()?;
    }
    records.flush()?;
    drop(records);

    let mut w = out.open()?;
    if out.json {
        write_json(
            &mut w,
            &json!({
                "lambda": args.lambda,
                "x_lo": args.x_lo,
                "x_hi": args.x_hi,
                "m": args.m,
                "c0": config.c0,
                "spacing_threshold": config.spacing_threshold(),
                "stride": stride,
                "filter": filter,
                "stats": stats,
            }),
        )?;
    } else {
        writeln!(
            w,
            "clusters,spacing_ok,with_j_tilde,interior_j_tilde,runs_checked,shortest_checked_run,longest_run_after_j_tilde,falsifications"
        )?;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            stats.clusters,
            stats.spacing_ok,
            stats.with_j_tilde,
            stats.interior_j_tilde,
            stats.runs_checked,
            stats
                .shortest_checked_run
                .map(|s| s.to_string())
                .unwrap_or_default(),
            stats.longest_run_after_j_tilde,
            stats.falsifications
        )?;
        w.flush()?;
    }
    if stats.falsifications > 0 {
        return Err(Failure::failed(format!(
            "{} falsification records",
            stats.falsifications
        )));
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(untagged)]
enum BoundEntry {
    Value { ln_value: f64, value: f64 },
    Failed { precondition: String },
}

pub fn bounds(args: &BoundsArgs, out: &Output) -> Outcome {
    let params = read_params(args.constants.as_deref())?;
    let ln_x = match (args.x, args.ln_x) {
        (Some(x), _) if x > 1.0 => Some(x.ln()),
        (Some(x), _) => return Err(Failure::usage(format!("x must exceed 1, got {x}"))),
        (None, l) => l,
    };
    let k = k_of_m(args.m, &params)?;
    let mut doc = serde_json::Map::new();
    doc.insert("m".into(), json!(args.m));
    doc.insert("params".into(), serde_json::to_value(params)?);
    doc.insert("k".into(), json!(k));
    if k >= 2.0 {
        doc.insert("epsilon".into(), json!(epsilon_of_k(k)?));
        doc.insert("mertens_product".into(), json!(mertens_product(k)));
        doc.insert("c0".into(), json!(c0_of_k(k)?));
        doc.insert("lambda_cap".into(), json!(1.0 / (k * k.ln())));
    }

    let mut failed = Vec::new();
    if let Some(lambda) = args.lambda {
        let inputs = BoundInputs { q: args.q, ln_x };
        let mut table = serde_json::Map::new();
        for theorem in Theorem::ALL {
            let applicable = match theorem {
                Theorem::Progression => args.q.is_some(),
                Theorem::LargerLambda => ln_x.is_some(),
                _ => true,
            };
            if !applicable {
                continue;
            }
            let entry = match lower_bound(theorem, lambda, args.m, inputs, &params) {
                Ok(v) => BoundEntry::Value {
                    ln_value: v.ln_value,
                    value: v.value,
                },
                Err(Error::Precondition(msg)) => {
                    failed.push(format!("theorem {}: {msg}", theorem.label()));
                    BoundEntry::Failed { precondition: msg }
                }
                Err(e) => return Err(e.into()),
            };
            table.insert(theorem.label().into(), serde_json::to_value(entry)?);
        }
        doc.insert("lambda".into(), json!(lambda));
        doc.insert("bounds".into(), table.into());
        if let Some(ln_x) = ln_x {
            doc.insert("ln_x".into(), json!(ln_x));
            let check = check_uniform_range(args.m, lambda, ln_x, &params)?;
            doc.insert("uniform_range".into(), serde_json::to_value(check)?);
        }
    }
    write_json(out.open()?, &doc)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::failed(failed.join("; ")))
    }
}
