use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use halfdisc::cf::{named, PartialQuotients};
use halfdisc::encode::{encode_prefix, zero_orbit_prefix};
use halfdisc::oracle::{code_orbit, sums as oracle_sums, to_exact, ExactPoint};
use halfdisc::stats::{closed_form_zero, length_pair, scan, trajectory_table, zero_word_length};
use halfdisc::synth::{growth_theta, heaviness_witness, ratio_theta, x_of_theta, GrowthTarget, RatioTarget};
use halfdisc::word::Word;
use num_bigint::BigUint;
use serde_json::json;

use crate::{parse, CliError, Example, Method, SeriesFormat, SynthFormat};

pub fn code(theta: &str, x: &str, n: u64, method: Method, sidecar: Option<&Path>) -> Result<String, CliError> {
    let theta = parse::irrational(theta)?;
    let x = parse::point(x)?;
    let (word, meta) = match method {
        Method::Oracle => {
            let c = code_orbit(&x, &to_exact(&theta), n).map_err(CliError::runtime)?;
            let meta = json!({ "endpoint_hits": c.endpoint_hits, "convention": c.convention });
            (c.word, meta)
        }
        Method::Symbolic => {
            let n = usize::try_from(n).map_err(|_| CliError::Usage("n too large".into()))?;
            let (w, events) = encode_prefix(&x, &theta, n).map_err(CliError::runtime)?;
            (w, json!({ "events": events }))
        }
    };
    if let Some(p) = sidecar {
        std::fs::write(p, format!("{meta}\n"))?;
    }
    Ok(format!("{word}\n"))
}

pub fn sums(theta: &str, x: &str, n: u64, format: SeriesFormat) -> Result<String, CliError> {
    let theta = parse::irrational(theta)?;
    let x = parse::point(x)?;
    let s = oracle_sums(&x, &to_exact(&theta), n).map_err(CliError::runtime)?;
    Ok(match format {
        SeriesFormat::Csv => s.to_csv(),
        SeriesFormat::Json => format!("{}\n", serde_json::to_string(&s).expect("serializable")),
    })
}

fn emit(theta: &PartialQuotients, format: SynthFormat, count: usize) -> Result<String, CliError> {
    Ok(match format {
        SynthFormat::Spec => format!("{}\n", serde_json::to_string(&theta.to_spec()).expect("serializable")),
        SynthFormat::Digits => {
            let d = theta.first(count).map_err(CliError::runtime)?;
            let parts: Vec<String> = d.iter().map(u64::to_string).collect();
            format!("{}\n", parts.join(","))
        }
    })
}

pub fn synth_growth(c: &str, d: &str, prefix: &str, format: SynthFormat, count: usize) -> Result<String, CliError> {
    let target = GrowthTarget { c: parse::growth(c)?, d: parse::growth(d)?, prefix: parse::digits(prefix)? };
    let theta = growth_theta(&target).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(&theta, format, count)
}

pub fn synth_ratio(
    r1: &str,
    r2: &str,
    prefix: &str,
    scale: u64,
    format: SynthFormat,
    count: usize,
) -> Result<String, CliError> {
    let target = RatioTarget { r1: parse::ratio(r1)?, r2: parse::ratio(r2)?, prefix: parse::digits(prefix)?, scale };
    let theta = ratio_theta(&target).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(&theta, format, count)
}

fn kind(p: &ExactPoint) -> &'static str {
    match p {
        ExactPoint::Rational(_) => "rational",
        ExactPoint::Quadratic(_) => "quadratic",
        ExactPoint::Certified(_) => "certified",
    }
}

pub fn xtheta(theta: &str, tol: &str) -> Result<String, CliError> {
    let theta = parse::irrational(theta)?;
    let x = x_of_theta(&theta, &parse::tolerance(tol)?).map_err(CliError::runtime)?;
    Ok(format!("{}\n", json!({ "x": x.to_string(), "kind": kind(&x), "approx": x.to_f64() })))
}

pub fn heavy(theta: &str, n: usize) -> Result<String, CliError> {
    let theta = parse::irrational(theta)?;
    let w = heaviness_witness(&theta, n).map_err(CliError::runtime)?;
    Ok(format!("{}\n", serde_json::to_string(&w).expect("serializable")))
}

/// Levels whose zero-orbit word fits in `n` letters where closed forms and
/// a scan of the oracle word disagree.
pub fn closed_form_mismatches(theta: &PartialQuotients, word: &Word) -> Result<(usize, Vec<usize>), CliError> {
    let sign = if theta.digit(0).map_err(CliError::runtime)? == 1 { -1 } else { 1 };
    let mut bad = Vec::new();
    let mut level = 0;
    loop {
        let len = zero_word_length(theta, level).map_err(CliError::runtime)?;
        if len > BigUint::from(word.len()) {
            return Ok((level, bad));
        }
        let len = usize::try_from(len).expect("bounded by the word");
        let prefix = Word(word.letters()[..len].to_vec());
        let scanned = scan(&prefix, sign).map_err(CliError::runtime)?.extremes();
        if closed_form_zero(theta, level).map_err(CliError::runtime)? != scanned {
            bad.push(level);
        }
        level += 1;
    }
}

pub fn bench(theta: &str, depth: usize, n: u64) -> Result<String, CliError> {
    let theta = parse::irrational(theta)?;
    let t0 = Instant::now();
    let e = closed_form_zero(&theta, depth).map_err(CliError::runtime)?;
    let lp = length_pair(&theta, depth).map_err(CliError::runtime)?;
    let len = zero_word_length(&theta, depth).map_err(CliError::runtime)?;
    let closed = t0.elapsed();
    let t1 = Instant::now();
    let word = code_orbit(&ExactPoint::zero(), &to_exact(&theta), n).map_err(CliError::runtime)?.word;
    let naive = t1.elapsed();
    let (levels, bad) = closed_form_mismatches(&theta, &word)?;
    eprintln!("closed forms at depth {depth}: {closed:?}; oracle scan of {n} letters: {naive:?}");
    let report = json!({
        "theta": theta.to_string(),
        "depth": depth,
        "length": len.to_string(),
        "len_ab": lp.len_ab.to_string(),
        "len_c": lp.len_c.to_string(),
        "M": e.max,
        "m": e.min,
        "overlap_n": n,
        "overlap_levels": levels,
        "agree": bad.is_empty(),
    });
    if !bad.is_empty() {
        return Err(CliError::Breach(json!({ "check": "closed_form_zero", "levels": bad, "report": report })));
    }
    Ok(format!("{report}\n"))
}

pub fn example(name: Example) -> Result<String, CliError> {
    match name {
        Example::Sqrt2Fig => {
            let w = zero_orbit_prefix(&PartialQuotients::sqrt2(), 33461).map_err(CliError::runtime)?;
            Ok(halfdisc::oracle::series_of_word(&w, true).to_csv())
        }
        Example::GoldenMeanFig => {
            let theta = PartialQuotients::golden();
            let th = to_exact(&theta);
            let tol = parse::tolerance("1/1000000000000")?;
            let x = x_of_theta(&theta, &tol).map_err(CliError::runtime)?;
            let mut out = String::new();
            for (label, p) in [("0".to_string(), ExactPoint::zero()), (x.to_string(), x)] {
                let s = oracle_sums(&p, &th, 100).map_err(CliError::runtime)?;
                writeln!(out, "# x = {label}").expect("string");
                out.push_str(&s.to_csv());
            }
            Ok(out)
        }
        Example::Ratio2Fig => {
            let theta = named("ratio2").expect("fixture");
            let rows = trajectory_table(&theta, 40).map_err(CliError::runtime)?;
            let mut out = String::from("n,p,k,M,abs_m,ratio\n");
            for r in rows {
                let ratio = r.max as f64 / r.abs_min as f64;
                writeln!(out, "{},{},{},{},{},{:.6}", r.n, r.parity, r.increment, r.max, r.abs_min, ratio).expect("string");
            }
            Ok(out)
        }
    }
}
