//! Parsers for the compact argument syntaxes (`squeezed:0.5`, `1,0.5`, `product:0.5:5:10`).

use std::str::FromStr;

use num_complex::Complex64;
use pointer_entropy::bounds::minimal_variance;
use pointer_entropy::states::make_squeezed;
use pointer_entropy::{FockSuperposition, Grid, MeasurementSetup, NoiseTerms, SystemState};

use crate::error::CliError;

/// A system state as given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Squeezed(f64),
    /// Squeezed vacuum with the minimal-entropy variance `δ_X/(2δ_P)` of the setup.
    SqueezedMin,
    Fock(Vec<Complex64>),
}

impl StateSpec {
    pub fn resolve(&self, noise: Option<&NoiseTerms>) -> Result<SystemState, CliError> {
        match self {
            Self::Squeezed(s) => Ok(make_squeezed(*s)?),
            Self::SqueezedMin => {
                let noise = noise
                    .ok_or_else(|| CliError::config("squeezed:min needs --noise or --setup"))?;
                Ok(make_squeezed(minimal_variance(noise))?)
            }
            Self::Fock(c) => Ok(SystemState::Fock(FockSuperposition::new(c.clone())?)),
        }
    }

    /// Position variance of a squeezed spec, resolved against `noise`.
    pub fn squeezed_variance(&self, noise: Option<&NoiseTerms>) -> Option<f64> {
        match self {
            Self::Squeezed(s) => Some(*s),
            Self::SqueezedMin => noise.map(minimal_variance),
            Self::Fock(_) => None,
        }
    }
}

impl std::fmt::Display for StateSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Squeezed(s) => write!(f, "squeezed:{s}"),
            Self::SqueezedMin => write!(f, "squeezed:min"),
            Self::Fock(c) => {
                let parts: Vec<String> = c
                    .iter()
                    .map(|z| {
                        if z.im == 0.0 {
                            z.re.to_string()
                        } else {
                            z.to_string()
                        }
                    })
                    .collect();
                write!(f, "fock:{}", parts.join(","))
            }
        }
    }
}

fn number(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{what}: '{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{what}: '{s}' is not finite"))
    }
}

fn numbers<const N: usize>(s: &str, sep: char, what: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(sep).collect();
    if parts.len() != N {
        return Err(format!(
            "{what}: expected {N} values separated by '{sep}', got '{s}'"
        ));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = number(part, what)?;
    }
    Ok(out)
}

/// `vacuum`, `squeezed:<σ²>`, `squeezed:min`, or `fock:c0,c1,...` with complex
/// coefficients such as `0.6`, `0.3-0.2i` or `-1i`.
pub fn parse_state(s: &str) -> Result<StateSpec, String> {
    let (kind, params) = s.split_once(':').unwrap_or((s, ""));
    match kind.trim() {
        "vacuum" if params.is_empty() => Ok(StateSpec::Squeezed(0.5)),
        "squeezed" if params.trim() == "min" => Ok(StateSpec::SqueezedMin),
        "squeezed" => {
            let v = number(params, "squeezed variance")?;
            if v > 0.0 {
                Ok(StateSpec::Squeezed(v))
            } else {
                Err(format!("squeezed variance must be positive, got {v}"))
            }
        }
        "fock" => {
            let coeffs = params
                .split(',')
                .map(|c| {
                    Complex64::from_str(c.trim())
                        .map_err(|_| format!("fock coefficient '{c}' is not a complex number"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err("fock coefficients must be finite".into());
            }
            if coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
                return Err("fock coefficients must not all vanish".into());
            }
            Ok(StateSpec::Fock(coeffs))
        }
        other => Err(format!(
            "unknown state kind '{other}' (expected vacuum, squeezed:<v>, squeezed:min or fock:<c0,c1,...>)"
        )),
    }
}

/// `δ_X,δ_P`.
pub fn parse_noise(s: &str) -> Result<NoiseTerms, String> {
    let [dx, dp] = numbers::<2>(s, ',', "noise")?;
    NoiseTerms::new(dx, dp).map_err(|e| e.to_string())
}

/// `κ₁,κ₂,T,σ₁²,σ₂²`.
pub fn parse_setup(s: &str) -> Result<MeasurementSetup, String> {
    let [k1, k2, t, s1, s2] = numbers::<5>(s, ',', "setup")?;
    MeasurementSetup::new(k1, k2, t, s1, s2).map_err(|e| e.to_string())
}

fn parse_count(s: &str, what: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("{what}: '{s}' is not a point count"))
}

/// `min:max:count`.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, count] = parts[..] else {
        return Err(format!("grid: expected min:max:count, got '{s}'"));
    };
    let count = parse_count(count, "grid")?;
    Grid::new(number(min, "grid")?, number(max, "grid")?, count).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Product,
    Sigma2,
    Lambda,
}

impl SweepParam {
    pub fn column(self) -> &'static str {
        match self {
            Self::Product => "noise_product",
            Self::Sigma2 => "sigma2",
            Self::Lambda => "lambda",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepSpec {
    /// Evenly spaced values from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + i as f64 * step
                }
            })
            .collect()
    }
}

/// `param:min:max:count` with `param` one of `product`, `sigma2`, `lambda`.
pub fn parse_sweep(s: &str) -> Result<SweepSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [param, min, max, count] = parts[..] else {
        return Err(format!("sweep: expected param:min:max:count, got '{s}'"));
    };
    let param = match param.trim() {
        "product" => SweepParam::Product,
        "sigma2" => SweepParam::Sigma2,
        "lambda" => SweepParam::Lambda,
        other => {
            return Err(format!(
                "sweep: unknown parameter '{other}' (expected product, sigma2 or lambda)"
            ))
        }
    };
    let (min, max) = (number(min, "sweep")?, number(max, "sweep")?);
    let count = parse_count(count, "sweep")?;
    if count < 2 {
        return Err(format!("sweep: need at least 2 points, got {count}"));
    }
    if !(min < max) {
        return Err(format!("sweep: need min < max, got {min} and {max}"));
    }
    let in_range = match param {
        SweepParam::Product | SweepParam::Sigma2 => min > 0.0,
        SweepParam::Lambda => min >= 0.0 && max <= 1.0,
    };
    if !in_range {
        return Err(format!(
            "sweep: range {min}..{max} is outside the domain of {}",
            param.column()
        ));
    }
    Ok(SweepSpec {
        param,
        min,
        max,
        count,
    })
}
