//! Argument values that clap leaves as strings.

use std::path::Path;

use halfdisc::cf::{named, Digit, PartialQuotients, ThetaSpec};
use halfdisc::oracle::ExactPoint;
use halfdisc::stats::ExtRational;
use halfdisc::synth::{parse_ext, GrowthSequence};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::CliError;

/// A named fixture, inline theta-spec JSON, or a path to one.
pub fn theta(s: &str) -> Result<PartialQuotients, CliError> {
    if let Some(t) = named(s) {
        return Ok(t);
    }
    let text = if s.trim_start().starts_with('{') {
        s.to_string()
    } else if Path::new(s).is_file() {
        std::fs::read_to_string(s)?
    } else {
        return Err(CliError::Usage(format!("unknown theta `{s}`")));
    };
    let spec: ThetaSpec = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("theta spec: {e}")))?;
    PartialQuotients::from_spec(&spec).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn irrational(s: &str) -> Result<PartialQuotients, CliError> {
    let t = theta(s)?;
    t.require_irrational().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(t)
}

pub fn point(s: &str) -> Result<ExactPoint, CliError> {
    s.parse().map_err(|e: halfdisc::oracle::OracleError| CliError::Usage(e.to_string()))
}

pub fn digits(s: &str) -> Result<Vec<Digit>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<Digit>() {
            Ok(d) if d > 0 => Ok(d),
            _ => Err(CliError::Usage(format!("bad digit `{t}`"))),
        })
        .collect()
}

/// `sqrt`, `root:D[:S]`, `log[:S]`, `const:V`.
pub fn growth(s: &str) -> Result<GrowthSequence, CliError> {
    let bad = || CliError::Usage(format!("bad growth sequence `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize, default: u64| -> Result<u64, CliError> {
        parts.get(i).map_or(Ok(default), |t| t.parse().map_err(|_| bad()))
    };
    let seq = match parts[0] {
        "sqrt" if parts.len() == 1 => GrowthSequence::Root { degree: 2, scale: 1 },
        "root" if (2..=3).contains(&parts.len()) => {
            GrowthSequence::Root { degree: num(1, 2)?.try_into().map_err(|_| bad())?, scale: num(2, 1)? }
        }
        "log" if parts.len() <= 2 => GrowthSequence::Log { scale: num(1, 1)? },
        "const" if parts.len() == 2 => GrowthSequence::Constant(num(1, 1)?),
        _ => return Err(bad()),
    };
    Ok(seq)
}

pub fn ratio(s: &str) -> Result<ExtRational, CliError> {
    parse_ext(s).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn tolerance(s: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::Usage(format!("bad tolerance `{s}`"));
    let r = match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            BigRational::new(p.parse().map_err(|_| bad())?, q)
        }
        None => {
            let f: f64 = s.parse().map_err(|_| bad())?;
            BigRational::from_float(f).ok_or_else(bad)?
        }
    };
    if !r.is_positive() {
        return Err(bad());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_specs() {
        assert_eq!(growth("sqrt").unwrap(), GrowthSequence::Root { degree: 2, scale: 1 });
        assert_eq!(growth("root:3:2").unwrap(), GrowthSequence::Root { degree: 3, scale: 2 });
        assert_eq!(growth("log").unwrap(), GrowthSequence::Log { scale: 1 });
        assert_eq!(growth("const:4").unwrap(), GrowthSequence::Constant(4));
        assert!(growth("cube").is_err());
    }

    #[test]
    fn digit_lists() {
        assert_eq!(digits("3, 1").unwrap(), vec![3, 1]);
        assert!(digits("").unwrap().is_empty());
        assert!(digits("0").is_err());
    }

    #[test]
    fn thetas() {
        assert!(theta("sqrt2").is_ok());
        assert_eq!(theta(r#"{"prefix":[3],"period":[1,2]}"#).unwrap().first(4).unwrap(), vec![3, 1, 2, 1]);
        assert!(matches!(theta("nope"), Err(CliError::Usage(_))));
    }
}
