//! Input file schemas (JSON) and the small literal parsers used by flags.

use crate::error::CliError;
use num_complex::Complex64;
use reflco_core::canonical::{CanonicalSystem, Segment};
use reflco_core::halfplane::UnimodularMatrix;
use reflco_core::herglotz::{BoundaryLadder, HerglotzFunction, RationalPole};
use reflco_core::jacobi::{JacobiOperator, Side};
use reflco_core::reflection::OperatorMap;
use reflco_core::semicont::ExperimentSpec;
use serde::Deserialize;
use std::path::Path;

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::missing_file(path, e))
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::malformed(format!("{what}: {e}")))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorRecord {
    pub window_lo: i64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl OperatorRecord {
    pub fn build(self) -> Result<JacobiOperator, CliError> {
        if self.a.len() != self.b.len() {
            return Err(CliError::invariant(format!(
                "a has {} entries but b has {}",
                self.a.len(),
                self.b.len()
            )));
        }
        if let Some(i) = self.a.iter().position(|&x| !(x > 0.0)) {
            return Err(CliError::invariant(format!(
                "a[{i}] = {} must be > 0 (site {})",
                self.a[i],
                self.window_lo + i as i64
            )));
        }
        JacobiOperator::new(self.window_lo, self.a, self.b).map_err(crate::error::from_core)
    }
}

/// Loads an operator literal `{window_lo, a: [...], b: [...]}`.
pub fn parse_operator(path: &Path) -> Result<JacobiOperator, CliError> {
    let text = read_file(path)?;
    parse_json::<OperatorRecord>(&text, "operator file")?.build()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentRecord {
    pub length: f64,
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

/// Loads a canonical-system literal: a JSON list of
/// `{length, h11, h12, h22}` records, validated segment by segment.
pub fn parse_system(path: &Path) -> Result<CanonicalSystem, CliError> {
    let text = read_file(path)?;
    let records: Vec<SegmentRecord> = parse_json(&text, "canonical system file")?;
    if records.is_empty() {
        return Err(CliError::invariant(
            "canonical system needs at least one segment",
        ));
    }
    let mut segments = Vec::with_capacity(records.len());
    for (i, r) in records.into_iter().enumerate() {
        let segment = Segment::new(r.length, r.h11, r.h12, r.h22)
            .map_err(|e| CliError::invariant(format!("segment {i}: {e}")))?;
        segments.push(segment);
    }
    Ok(CanonicalSystem::new(segments))
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HerglotzRecord {
    Identity,
    Constant {
        re: f64,
        im: f64,
    },
    NegReciprocal,
    FreeMPlus,
    FreeMMinus,
    Rational {
        constant: f64,
        poles: Vec<PoleRecord>,
    },
    Mobius {
        /// Row-major entries `[a, b, c, d]` of a real unimodular matrix.
        matrix: [f64; 4],
        inner: Box<HerglotzRecord>,
    },
    Jacobi {
        side: SideRecord,
        op: OperatorRecord,
    },
    Sum {
        terms: Vec<HerglotzRecord>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleRecord {
    pub position: f64,
    pub weight: f64,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(rename_all = "kebab-case")]
pub enum SideRecord {
    Plus,
    Minus,
}

impl HerglotzRecord {
    pub fn build(self) -> Result<HerglotzFunction, CliError> {
        match self {
            HerglotzRecord::Identity => Ok(HerglotzFunction::Identity),
            HerglotzRecord::Constant { re, im } => {
                HerglotzFunction::constant(Complex64::new(re, im)).map_err(crate::error::from_core)
            }
            HerglotzRecord::NegReciprocal => Ok(HerglotzFunction::NegReciprocal),
            HerglotzRecord::FreeMPlus => Ok(HerglotzFunction::FreeJacobiPlus),
            HerglotzRecord::FreeMMinus => Ok(HerglotzFunction::FreeJacobiMinus),
            HerglotzRecord::Rational { constant, poles } => HerglotzFunction::rational(
                constant,
                poles
                    .into_iter()
                    .map(|p| RationalPole {
                        position: p.position,
                        weight: p.weight,
                    })
                    .collect(),
            )
            .map_err(crate::error::from_core),
            HerglotzRecord::Mobius { matrix, inner } => {
                let m = UnimodularMatrix::from_real(matrix[0], matrix[1], matrix[2], matrix[3])
                    .map_err(crate::error::from_core)?;
                HerglotzFunction::mobius(m, inner.build()?).map_err(crate::error::from_core)
            }
            HerglotzRecord::Jacobi { side, op } => {
                let side = match side {
                    SideRecord::Plus => Side::Plus,
                    SideRecord::Minus => Side::Minus,
                };
                Ok(HerglotzFunction::from_jacobi(op.build()?, side))
            }
            HerglotzRecord::Sum { terms } => {
                let mut built = Vec::with_capacity(terms.len());
                for t in terms {
                    built.push(t.build()?);
                }
                let mut iter = built.into_iter();
                let first = iter
                    .next()
                    .ok_or_else(|| CliError::invariant("sum needs at least one term"))?;
                Ok(iter.fold(first, HerglotzFunction::sum))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalRecord {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakL2Input {
    pub seq: Vec<HerglotzRecord>,
    pub limit: HerglotzRecord,
    pub half_width: f64,
    #[serde(default = "default_cells")]
    pub cells: usize,
    /// Indicator test functions, one per interval.
    pub testfns: Vec<IntervalRecord>,
}

fn default_cells() -> usize {
    512
}

pub fn parse_weak_l2(path: &Path) -> Result<WeakL2Input, CliError> {
    let text = read_file(path)?;
    parse_json(&text, "weak-l2 input file")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplesFile {
    pub lo: f64,
    pub hi: f64,
    pub samples: Vec<f64>,
}

pub fn parse_samples(path: &Path) -> Result<SamplesFile, CliError> {
    let text = read_file(path)?;
    let parsed: SamplesFile = parse_json(&text, "samples file")?;
    if parsed.samples.is_empty() || !(parsed.hi > parsed.lo) {
        return Err(CliError::invariant(
            "samples file needs a proper interval and at least one sample",
        ));
    }
    Ok(parsed)
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleRecord {
    Shift(i64),
    Toda { t: f64, dt: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRecord {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderRecord {
    pub y0: f64,
    pub ratio: f64,
    pub max_steps: usize,
    pub tol: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentRecord {
    pub base: OperatorRecord,
    pub schedule: Vec<ScheduleRecord>,
    pub limit: OperatorRecord,
    pub grid: GridRecord,
    pub ladder: Option<LadderRecord>,
    pub tail_start: usize,
    pub tolerance: f64,
}

pub fn parse_experiment(path: &Path) -> Result<ExperimentSpec, CliError> {
    let text = read_file(path)?;
    let record: ExperimentRecord = parse_json(&text, "experiment file")?;
    let ladder = match record.ladder {
        Some(l) => BoundaryLadder {
            y0: l.y0,
            ratio: l.ratio,
            max_steps: l.max_steps,
            tol: l.tol,
        },
        None => BoundaryLadder::default(),
    };
    let spec = ExperimentSpec {
        base: record.base.build()?,
        schedule: record
            .schedule
            .into_iter()
            .map(|s| match s {
                ScheduleRecord::Shift(k) => OperatorMap::Shift(k),
                ScheduleRecord::Toda { t, dt } => OperatorMap::Toda { t, dt },
            })
            .collect(),
        limit: record.limit.build()?,
        x_grid: build_grid(record.grid.lo, record.grid.hi, record.grid.count)?,
        ladder,
        tail_start: record.tail_start,
        tolerance: record.tolerance,
    };
    spec.validate().map_err(crate::error::from_core)?;
    Ok(spec)
}

/// Builds an inclusive uniform grid; the config contract demands at least
/// two points and `lo < hi`.
pub fn build_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>, CliError> {
    if count < 2 {
        return Err(CliError::invariant("grid count must be at least 2"));
    }
    if !(lo < hi) {
        return Err(CliError::invariant("grid needs lo < hi"));
    }
    Ok((0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect())
}

/// Parses the `lo:hi:count` grid literal used by flags.
pub fn parse_grid_spec(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::malformed(format!(
            "grid spec '{spec}' must have the form lo:hi:count"
        )));
    }
    let lo: f64 = parts[0].parse().map_err(|_| {
        CliError::malformed(format!("grid lower bound '{}' is not a number", parts[0]))
    })?;
    let hi: f64 = parts[1].parse().map_err(|_| {
        CliError::malformed(format!("grid upper bound '{}' is not a number", parts[1]))
    })?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| CliError::malformed(format!("grid count '{}' is not an integer", parts[2])))?;
    build_grid(lo, hi, count)
}

/// Parses a complex literal such as `0+1i`, `2i`, `-1.5`, or `1-2e-3i`.
pub fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(CliError::malformed("empty complex literal"));
    }
    let bad = || CliError::malformed(format!("cannot parse complex literal '{text}'"));
    if let Some(imag_part) = s.strip_suffix('i') {
        // find the split between real and imaginary parts: the last +/-
        // that is not a leading sign or an exponent sign
        let bytes = imag_part.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => {
                let re: f64 = imag_part[..k].parse().map_err(|_| bad())?;
                let im_text = &imag_part[k..];
                let im: f64 = if im_text == "+" {
                    1.0
                } else if im_text == "-" {
                    -1.0
                } else {
                    im_text.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = if imag_part.is_empty() {
                    1.0
                } else if imag_part == "-" {
                    -1.0
                } else {
                    imag_part.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s.parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0+1i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-1.5").unwrap(), Complex64::new(-1.5, 0.0));
        assert_eq!(
            parse_complex("1-2e-3i").unwrap(),
            Complex64::new(1.0, -2e-3)
        );
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1.5+0.5i").unwrap(), Complex64::new(1.5, 0.5));
        assert!(parse_complex("one").is_err());
    }

    #[test]
    fn grid_specs() {
        let g = parse_grid_spec("-1.9:1.9:50").unwrap();
        assert_eq!(g.len(), 50);
        assert!((g[0] + 1.9).abs() < 1e-15);
        assert!((g[49] - 1.9).abs() < 1e-15);
        assert!(parse_grid_spec("0:1:1").is_err());
        assert!(parse_grid_spec("2:1:5").is_err());
        assert!(parse_grid_spec("1:2").is_err());
    }
}
