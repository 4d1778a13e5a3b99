//! Deterministic synthetic streams at unit time spacing.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::types::InputTuple;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad generator parameters: {0}")]
pub struct BadParams(pub String);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    Constant {
        value: f64,
    },
    /// `slope * i` plus uniform noise in `[-noise, noise]`.
    Ramp {
        slope: f64,
        noise: f64,
    },
    /// `0, amplitude, 0, amplitude, ...`
    Alternating {
        amplitude: f64,
    },
    /// Gaussian increments with standard deviation `step`, starting at 0.
    RandomWalk {
        step: f64,
    },
}

impl Generator {
    pub fn generate(&self, n: usize, seed: u64) -> Vec<InputTuple> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut walk = 0.0;
        (0..n)
            .map(|i| {
                let t = i as f64;
                let y = match *self {
                    Generator::Constant { value } => value,
                    Generator::Ramp { slope, noise } => {
                        slope * t
                            + if noise > 0.0 {
                                rng.random_range(-noise..=noise)
                            } else {
                                0.0
                            }
                    }
                    Generator::Alternating { amplitude } => {
                        if i % 2 == 0 {
                            0.0
                        } else {
                            amplitude
                        }
                    }
                    Generator::RandomWalk { step } => {
                        if i > 0 {
                            walk += Normal::new(0.0, step).expect("validated step").sample(&mut rng);
                        }
                        walk
                    }
                };
                InputTuple::new(t, y)
            })
            .collect()
    }

    fn validate(self) -> Result<Self, BadParams> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(BadParams(format!("{what} must be finite")))
            }
        };
        match self {
            Generator::Constant { value } => finite(value, "value")?,
            Generator::Ramp { slope, noise } => {
                finite(slope, "slope")?;
                finite(noise, "noise")?;
                if noise < 0.0 {
                    return Err(BadParams("noise must be non-negative".into()));
                }
            }
            Generator::Alternating { amplitude } => finite(amplitude, "amplitude")?,
            Generator::RandomWalk { step } => {
                if !(step.is_finite() && step >= 0.0) {
                    return Err(BadParams("step must be finite and non-negative".into()));
                }
            }
        }
        Ok(self)
    }
}

/// A generator plus a length, written `KIND:N:PARAMS` with comma-separated
/// parameters, e.g. `constant:100:5`, `ramp:1000:0.1,0.01`,
/// `alternating:64:4`, `random_walk:1000:0.5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerateSpec {
    pub generator: Generator,
    pub n: usize,
}

impl FromStr for GenerateSpec {
    type Err = BadParams;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.splitn(3, ':');
        let kind = parts.next().unwrap_or_default();
        let n = parts
            .next()
            .ok_or_else(|| BadParams(format!("missing length in `{s}`")))?
            .parse::<usize>()
            .map_err(|e| BadParams(format!("length: {e}")))?;
        let params: Vec<f64> = match parts.next() {
            None | Some("") => Vec::new(),
            Some(p) => p
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| BadParams(format!("parameter `{x}`: {e}")))
                })
                .collect::<Result<_, _>>()?,
        };
        let arity = |k: usize| {
            if params.len() == k {
                Ok(())
            } else {
                Err(BadParams(format!(
                    "{kind} takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let generator = match kind {
            "constant" => {
                arity(1)?;
                Generator::Constant { value: params[0] }
            }
            "ramp" => {
                arity(2)?;
                Generator::Ramp {
                    slope: params[0],
                    noise: params[1],
                }
            }
            "alternating" => {
                arity(1)?;
                Generator::Alternating { amplitude: params[0] }
            }
            "random_walk" | "random-walk" => {
                arity(1)?;
                Generator::RandomWalk { step: params[0] }
            }
            other => return Err(BadParams(format!("unknown generator `{other}`"))),
        };
        Ok(Self {
            generator: generator.validate()?,
            n,
        })
    }
}
