//! Named digit generators usable from theta-spec documents.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::Value;

use crate::cf::{CfError, Digit, DigitStream, Generator, GeneratorSpec};

fn params<T: for<'de> Deserialize<'de> + Default>(v: &Value) -> Result<T, CfError> {
    if v.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(v.clone()).map_err(|e| CfError::BadParams(e.to_string()))
}

/// Instantiate a generator from its spec.
pub fn build(spec: &GeneratorSpec) -> Result<Generator, CfError> {
    match spec.name.as_str() {
        "arithmetic" => {
            let p: Arithmetic = params(&spec.params)?;
            if p.start == 0 {
                return Err(CfError::BadParams("start must be positive".into()));
            }
            Ok(Generator::new(spec.clone(), move || Box::new(ArithmeticStream { next: p.start, step: p.step })))
        }
        "extreme" => Ok(Generator::new(spec.clone(), || Box::new(ExtremeStream::default()))),
        "pseudo-random" => {
            let p: Random = params(&spec.params)?;
            if p.max == 0 {
                return Err(CfError::BadParams("max must be positive".into()));
            }
            Ok(Generator::new(spec.clone(), move || {
                Box::new(RandomStream { rng: ChaCha8Rng::seed_from_u64(p.seed), max: p.max })
            }))
        }
        "growth" => crate::synth::growth_generator(spec),
        "ratio" => crate::synth::ratio_generator(spec),
        other => Err(CfError::UnknownGenerator(other.to_string())),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Arithmetic {
    #[serde(default = "one")]
    start: Digit,
    #[serde(default = "one")]
    step: Digit,
}

impl Default for Arithmetic {
    fn default() -> Self {
        Arithmetic { start: 1, step: 1 }
    }
}

fn one() -> Digit {
    1
}

struct ArithmeticStream {
    next: Digit,
    step: Digit,
}

impl DigitStream for ArithmeticStream {
    fn next_digit(&mut self) -> Result<Digit, CfError> {
        let d = self.next;
        self.next = d.checked_add(self.step).ok_or(CfError::DigitsExhausted(usize::MAX))?;
        Ok(d)
    }
}

/// `[2, 2^2, 2, 2^(2^2), 2, 2^(2^(2^2)), ...]`; the stream ends once the tower
/// no longer fits in a machine digit.
#[derive(Default)]
struct ExtremeStream {
    i: usize,
    tower: Option<Digit>,
}

impl DigitStream for ExtremeStream {
    fn next_digit(&mut self) -> Result<Digit, CfError> {
        let i = self.i;
        self.i += 1;
        if i.is_multiple_of(2) {
            return Ok(2);
        }
        let next = match self.tower {
            None => Some(4),
            Some(t) if t < 64 => Some(1u64 << t),
            Some(_) => None,
        };
        self.tower = next;
        next.ok_or(CfError::DigitsExhausted(i))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Random {
    #[serde(default)]
    seed: u64,
    #[serde(default = "five")]
    max: Digit,
}

impl Default for Random {
    fn default() -> Self {
        Random { seed: 0, max: 5 }
    }
}

fn five() -> Digit {
    5
}

struct RandomStream {
    rng: ChaCha8Rng,
    max: Digit,
}

impl DigitStream for RandomStream {
    fn next_digit(&mut self) -> Result<Digit, CfError> {
        Ok(self.rng.gen_range(1..=self.max))
    }
}
