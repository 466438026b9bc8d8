//! `verify --battery`: symbolic machinery against the exact orbit oracle.

use halfdisc::cf::{is_heavy, named, Heaviness, PartialQuotients};
use halfdisc::encode::{encode_prefix, limit_prefix, zero_orbit_prefix};
use halfdisc::oracle::{code_orbit, compare_upto_errors, to_exact, ExactPoint};
use halfdisc::synth::{heaviness_witness, Witness};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cmd::closed_form_mismatches;
use crate::CliError;

fn periodic(prefix: &[u64], period: &[u64]) -> PartialQuotients {
    PartialQuotients::periodic(prefix.to_vec(), period.to_vec()).expect("valid fixture")
}

pub fn battery(name: &str) -> Result<Vec<(&'static str, PartialQuotients)>, CliError> {
    match name {
        "default" => Ok(vec![
            ("sqrt2", PartialQuotients::sqrt2()),
            ("golden", PartialQuotients::golden()),
            ("312", periodic(&[], &[3, 1, 2])),
            ("24", periodic(&[], &[2, 4])),
            ("11;2", periodic(&[1, 1], &[2])),
            ("53", periodic(&[], &[5, 3])),
            ("4;21", periodic(&[4], &[2, 1])),
            ("ratio2", named("ratio2").expect("fixture")),
        ]),
        other => Err(CliError::Usage(format!("unknown battery `{other}`"))),
    }
}

/// Letters compared against the oracle for random rational starts.
const RANDOM_X_LETTERS: u64 = 10_000;
const RANDOM_X_PER_CASE: usize = 3;

fn check_case(theta: &PartialQuotients, n: u64, rng: &mut ChaCha8Rng) -> Result<Vec<Value>, CliError> {
    let mut breaches = Vec::new();
    let exact = to_exact(theta);
    let oracle = code_orbit(&ExactPoint::zero(), &exact, n).map_err(CliError::runtime)?.word;
    let n_us = oracle.len();

    let symbolic = zero_orbit_prefix(theta, n_us).map_err(CliError::runtime)?;
    if symbolic != oracle {
        let at = symbolic.letters().iter().zip(oracle.letters()).position(|(a, b)| a != b);
        breaches.push(json!({ "check": "zero_orbit_prefix", "first_mismatch": at }));
    }

    let (levels, bad) = closed_form_mismatches(theta, &oracle)?;
    if !bad.is_empty() {
        breaches.push(json!({ "check": "closed_form_zero", "levels": bad, "of": levels }));
    }

    if is_heavy(theta, 0) == Heaviness::Yes {
        if limit_prefix(theta, n_us).map_err(CliError::runtime)? != oracle {
            breaches.push(json!({ "check": "limit_prefix" }));
        }
        let w = heaviness_witness(theta, n_us.min(100_000)).map_err(CliError::runtime)?;
        if !matches!(w, Witness::HeavyConsistent { .. }) {
            breaches.push(json!({ "check": "heaviness_witness", "result": w }));
        }
    }

    // the symbolic encoder needs theta in a quadratic field
    let samples = if theta.is_periodic() { RANDOM_X_PER_CASE } else { 0 };
    for _ in 0..samples {
        let q: i64 = rng.gen_range(2..1000);
        let x = ExactPoint::ratio(rng.gen_range(1..q), q);
        let len = RANDOM_X_LETTERS.min(n);
        let o = code_orbit(&x, &exact, len).map_err(CliError::runtime)?.word;
        let (w, _) = encode_prefix(&x, theta, o.len()).map_err(CliError::runtime)?;
        let m = compare_upto_errors(&w, &o, 2).map_err(CliError::runtime)?;
        if m.count > 2 {
            breaches.push(json!({ "check": "encode_prefix", "x": x.to_string(), "positions": m.positions }));
        }
    }
    Ok(breaches)
}

pub fn run(name: &str, n: u64, seed: u64) -> Result<String, CliError> {
    if n == 0 {
        return Err(CliError::Usage("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    let mut failed = Vec::new();
    for (case, theta) in battery(name)? {
        let breaches = check_case(&theta, n, &mut rng)?;
        let line = json!({ "case": case, "theta": theta.to_string(), "n": n, "ok": breaches.is_empty() });
        out.push_str(&format!("{line}\n"));
        if !breaches.is_empty() {
            failed.push(json!({ "case": case, "breaches": breaches }));
        }
    }
    if failed.is_empty() {
        Ok(out)
    } else {
        Err(CliError::Breach(json!({ "battery": name, "failed": failed })))
    }
}
