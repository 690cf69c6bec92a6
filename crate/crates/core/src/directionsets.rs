//! Direction sets and their inverse sequences.
//!
//! A direction is stored structurally rather than as a bare angle: each
//! generated element remembers its index `n`, a weight `w` (the uniform `X_n`,
//! `sin n`, or 1) and a denominator (`n` or `2^n`), so that
//!
//! ```text
//! angle   = π · w / denominator
//! inverse = denominator · w⁻¹
//! ```
//!
//! The inverse is always evaluated as `denominator * (1.0 / w)`, never as
//! `π / angle`; the π cancels symbolically and the evaluation order is fixed
//! so that other modules can reproduce sample values bit-for-bit. For dyadic
//! denominators the pair `(n, w)` stays usable after `2^n` overflows, via
//! [`Direction::log2_inverse`] and [`Direction::inverse_scaled`].

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stream::{RandomStream, UniformSource};

/// Two values are identified when their relative difference is below this.
pub const DEDUP_RELATIVE_TOLERANCE: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("unknown generator id `{0}`")]
    UnknownGenerator(String),
    #[error("count must be at least 1")]
    ZeroCount,
    #[error("generator `{0}` is random and needs a seed")]
    MissingSeed(Generator),
    #[error("generator `{0}` is deterministic and does not take a seed")]
    UnexpectedSeed(Generator),
    #[error("value {value} at position {position} is not a positive finite number")]
    NotPositive { position: usize, value: f64 },
    #[error("values are not strictly increasing at position {0}")]
    NotIncreasing(usize),
    #[error("inverse value of index {0} overflows double precision")]
    Overflow(u64),
    #[error("degenerate sample: values at indices {0} and {1} coincide within tolerance")]
    Degenerate(u64, u64),
    #[error("invalid generator spec: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid sample csv: {0}")]
    Csv(#[from] csv::Error),
}

/// The six named direction sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// `π/n`
    Lin,
    /// `π/2^n`
    Lac,
    /// `π sin(n)/n`, indices with `sin n ≤ 0` dropped
    SinLin,
    /// `π sin(n)/2^n`, indices with `sin n ≤ 0` dropped
    SinLac,
    /// `π X_n/n`
    RandLin,
    /// `π X_n/2^n`
    RandLac,
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::Lin,
        Generator::Lac,
        Generator::SinLin,
        Generator::SinLac,
        Generator::RandLin,
        Generator::RandLac,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Generator::Lin => "lin",
            Generator::Lac => "lac",
            Generator::SinLin => "sin-lin",
            Generator::SinLac => "sin-lac",
            Generator::RandLin => "rand-lin",
            Generator::RandLac => "rand-lac",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, Generator::RandLin | Generator::RandLac)
    }

    /// Element with index `n ≥ 1`, or `None` when the generator skips it.
    pub fn direction<S: UniformSource + ?Sized>(self, n: u64, source: &S) -> Option<Direction> {
        let magnitude = match self {
            Generator::Lin => Magnitude::Linear { weight: 1.0, n },
            Generator::Lac => Magnitude::Dyadic { weight: 1.0, exp: n },
            Generator::SinLin | Generator::SinLac => {
                let s = (n as f64).sin();
                if s <= 0.0 {
                    return None;
                }
                if self == Generator::SinLin {
                    Magnitude::Linear { weight: s, n }
                } else {
                    Magnitude::Dyadic { weight: s, exp: n }
                }
            }
            Generator::RandLin => Magnitude::Linear { weight: source.value(n), n },
            Generator::RandLac => Magnitude::Dyadic { weight: source.value(n), exp: n },
        };
        Some(Direction { index: n, magnitude })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Generator {
    type Err = SampleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Generator::ALL
            .into_iter()
            .find(|g| g.id() == s)
            .ok_or_else(|| SampleError::UnknownGenerator(s.to_string()))
    }
}

/// `{"gen": "rand-lac", "count": 16, "seed": 42}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub gen: String,
    pub count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl GeneratorSpec {
    pub fn new(gen: Generator, count: u64, seed: Option<u64>) -> Self {
        Self { gen: gen.id().to_string(), count, seed }
    }

    pub fn from_json(text: &str) -> Result<Self, SampleError> {
        let spec: GeneratorSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn generator(&self) -> Result<Generator, SampleError> {
        self.gen.parse()
    }

    pub fn validate(&self) -> Result<Generator, SampleError> {
        let gen = self.generator()?;
        if self.count == 0 {
            return Err(SampleError::ZeroCount);
        }
        match (gen.is_random(), self.seed) {
            (true, None) => Err(SampleError::MissingSeed(gen)),
            (false, Some(_)) => Err(SampleError::UnexpectedSeed(gen)),
            _ => Ok(gen),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Magnitude {
    /// A bare angle in radians.
    Angle { theta: f64 },
    /// `π·weight/n`
    Linear { weight: f64, n: u64 },
    /// `π·weight/2^exp`
    Dyadic { weight: f64, exp: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub index: u64,
    pub magnitude: Magnitude,
}

fn pow2(e: i64) -> f64 {
    // exact for the normal range; saturates outside it
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        0.0
    } else if e < -1022 {
        2f64.powi(-1022) * 2f64.powi((e + 1022) as i32)
    } else {
        2f64.powi(e as i32)
    }
}

impl Direction {
    pub fn angle(&self) -> f64 {
        match self.magnitude {
            Magnitude::Angle { theta } => theta,
            Magnitude::Linear { weight, n } => PI * weight / n as f64,
            Magnitude::Dyadic { weight, exp } => PI * weight * pow2(-(exp as i64)),
        }
    }

    /// `π / angle`, evaluated as `denominator * weight⁻¹`.
    pub fn inverse(&self) -> f64 {
        match self.magnitude {
            Magnitude::Angle { theta } => PI / theta,
            Magnitude::Linear { weight, n } => n as f64 * weight.recip(),
            Magnitude::Dyadic { weight, exp } => pow2(exp as i64) * weight.recip(),
        }
    }

    /// `inverse / 2^exponent`, computed without forming the inverse itself.
    pub fn inverse_scaled(&self, exponent: i64) -> f64 {
        match self.magnitude {
            Magnitude::Dyadic { weight, exp } => pow2(exp as i64 - exponent) * weight.recip(),
            _ => self.inverse() * pow2(-exponent),
        }
    }

    pub fn log2_inverse(&self) -> f64 {
        match self.magnitude {
            Magnitude::Angle { theta } => (PI / theta).log2(),
            Magnitude::Linear { weight, n } => (n as f64).log2() - weight.log2(),
            Magnitude::Dyadic { weight, exp } => exp as f64 - weight.log2(),
        }
    }
}

/// Provenance of a generated sample: generator, seed and index range `[1, K]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub gen: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub first_index: u64,
    pub last_index: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSample {
    pub provenance: Provenance,
    pub directions: Vec<Direction>,
}

/// Order-preserving integer key for finite doubles.
fn ordered_key(x: f64) -> i64 {
    let b = x.to_bits() as i64;
    b ^ (((b >> 63) as u64) >> 1) as i64
}

fn log2_tolerance() -> f64 {
    DEDUP_RELATIVE_TOLERANCE * std::f64::consts::LOG2_E
}

/// Generates the first `spec.count` elements of a named set.
pub fn generate(spec: &GeneratorSpec) -> Result<DirectionSample, SampleError> {
    let gen = spec.validate()?;
    let stream = RandomStream::new(spec.seed.unwrap_or(0));
    Ok(generate_with(gen, spec.count, spec.seed, &stream))
}

/// Same as [`generate`], drawing `X_k` from an arbitrary source.
///
/// `count` counts retained elements; the sin-based sets skip indices, so
/// their index range can be longer than `count`.
pub fn generate_with<S: UniformSource + ?Sized>(
    gen: Generator,
    count: u64,
    seed: Option<u64>,
    source: &S,
) -> DirectionSample {
    let tol = log2_tolerance();
    let mut seen: BTreeSet<(i64, u64)> = BTreeSet::new();
    let mut directions = Vec::with_capacity(count as usize);
    let mut n = 0u64;
    while (directions.len() as u64) < count {
        n += 1;
        let Some(dir) = gen.direction(n, source) else { continue };
        let key = dir.log2_inverse();
        let lo = (ordered_key(key - tol), 0);
        let hi = (ordered_key(key + tol), u64::MAX);
        if seen.range(lo..=hi).next().is_some() {
            continue;
        }
        seen.insert((ordered_key(key), n));
        directions.push(dir);
    }
    DirectionSample {
        provenance: Provenance {
            gen: gen.id().to_string(),
            seed,
            first_index: 1,
            last_index: n,
        },
        directions,
    }
}

impl DirectionSample {
    /// A sample of bare angles, indexed from 1 in the given order.
    pub fn from_angles(angles: &[f64]) -> Result<Self, SampleError> {
        for (position, &value) in angles.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(SampleError::NotPositive { position, value });
            }
        }
        let directions = angles
            .iter()
            .enumerate()
            .map(|(i, &theta)| Direction {
                index: i as u64 + 1,
                magnitude: Magnitude::Angle { theta },
            })
            .collect();
        Ok(Self {
            provenance: Provenance {
                gen: "explicit".into(),
                seed: None,
                first_index: 1,
                last_index: angles.len() as u64,
            },
            directions,
        })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn angles(&self) -> Vec<f64> {
        self.directions.iter().map(Direction::angle).collect()
    }

    /// `(index, angle)` rows in CSV form, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        for d in &self.directions {
            out.push_str(&format!("{},{:.16e}\n", d.index, d.angle()));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub index: u64,
    pub value: f64,
}

/// Parses the `index,value` CSV written by [`DirectionSample::to_csv`].
pub fn read_sample_csv(text: &str) -> Result<Vec<SampleRow>, SampleError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (position, record) in reader.deserialize().enumerate() {
        let row: SampleRow = record?;
        if !(row.value.is_finite() && row.value > 0.0) {
            return Err(SampleError::NotPositive { position, value: row.value });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Inverse values `π/θ` sorted strictly increasing.
pub fn invert(sample: &DirectionSample) -> Result<OrderedSample, SampleError> {
    let mut pairs: Vec<(f64, u64)> = Vec::with_capacity(sample.len());
    for d in &sample.directions {
        let u = d.inverse();
        if !u.is_finite() {
            return Err(SampleError::Overflow(d.index));
        }
        if u <= 0.0 {
            return Err(SampleError::NotPositive { position: d.index as usize, value: u });
        }
        pairs.push((u, d.index));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in pairs.windows(2) {
        if (w[1].0 - w[0].0) <= DEDUP_RELATIVE_TOLERANCE * w[1].0 {
            return Err(SampleError::Degenerate(w[0].1, w[1].1));
        }
    }
    OrderedSample::new(pairs.into_iter().map(|p| p.0).collect())
}

/// Strictly increasing positive values `u_1 < … < u_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct OrderedSample {
    values: Vec<f64>,
}

impl OrderedSample {
    pub fn new(values: Vec<f64>) -> Result<Self, SampleError> {
        for (position, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(SampleError::NotPositive { position, value });
            }
        }
        if let Some(i) = values.windows(2).position(|w| w[0] >= w[1]) {
            return Err(SampleError::NotIncreasing(i + 1));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Angles `π/u`, sorted increasing.
    pub fn invert(&self) -> Vec<f64> {
        self.values.iter().rev().map(|u| PI / u).collect()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl std::ops::Deref for OrderedSample {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl TryFrom<Vec<f64>> for OrderedSample {
    type Error = SampleError;

    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        OrderedSample::new(values)
    }
}

impl From<OrderedSample> for Vec<f64> {
    fn from(s: OrderedSample) -> Self {
        s.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::ConstantStream;

    fn spec(gen: Generator, count: u64, seed: Option<u64>) -> GeneratorSpec {
        GeneratorSpec::new(gen, count, seed)
    }

    #[test]
    fn lin_first_four() {
        let s = generate(&spec(Generator::Lin, 4, None)).unwrap();
        assert_eq!(s.angles(), vec![PI, PI / 2.0, PI / 3.0, PI / 4.0]);
    }

    #[test]
    fn unit_stream_reduces_rand_lin_to_lin() {
        let lin = generate(&spec(Generator::Lin, 32, None)).unwrap();
        let forced = generate_with(Generator::RandLin, 32, None, &ConstantStream(1.0));
        assert_eq!(lin.angles(), forced.angles());
        assert_eq!(invert(&lin).unwrap(), invert(&forced).unwrap());
    }

    #[test]
    fn seed_rules_are_enforced() {
        assert!(matches!(
            generate(&spec(Generator::RandLac, 3, None)),
            Err(SampleError::MissingSeed(Generator::RandLac))
        ));
        assert!(matches!(
            generate(&spec(Generator::Lac, 3, Some(1))),
            Err(SampleError::UnexpectedSeed(Generator::Lac))
        ));
        assert!(matches!(
            generate(&spec(Generator::Lin, 0, None)),
            Err(SampleError::ZeroCount)
        ));
        assert!(matches!(
            GeneratorSpec::from_json(r#"{"gen":"sin-sin","count":3}"#),
            Err(SampleError::UnknownGenerator(_))
        ));
    }

    #[test]
    fn spec_json_roundtrip() {
        let s = GeneratorSpec::from_json(r#"{"gen":"rand-lac","count":16,"seed":42}"#).unwrap();
        assert_eq!(s.generator().unwrap(), Generator::RandLac);
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"gen":"rand-lac","count":16,"seed":42}"#);
    }

    #[test]
    fn invert_simple_angles() {
        let s = DirectionSample::from_angles(&[PI, PI / 2.0, PI / 4.0]).unwrap();
        assert_eq!(invert(&s).unwrap().values(), &[1.0, 2.0, 4.0]);
    }

    #[test]
    fn invert_lin_prefix() {
        let s = generate(&spec(Generator::Lin, 5, None)).unwrap();
        assert_eq!(invert(&s).unwrap().values(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn rand_lac_inverse_matches_recomputation() {
        let s = generate(&spec(Generator::RandLac, 40, Some(42))).unwrap();
        let stream = RandomStream::new(42);
        let mut expected: Vec<f64> = (1..=40u64)
            .map(|k| 2f64.powi(k as i32) / stream.value(k))
            .collect();
        expected.sort_by(f64::total_cmp);
        let got = invert(&s).unwrap();
        for (g, e) in got.values().iter().zip(&expected) {
            assert!((g - e).abs() <= 1e-15 * e, "{g} vs {e}");
        }
    }

    #[test]
    fn sin_generators_skip_nonpositive_sine() {
        let s = generate(&spec(Generator::SinLin, 10, None)).unwrap();
        for d in &s.directions {
            assert!((d.index as f64).sin() > 0.0);
            assert!(d.angle() > 0.0);
        }
        // sin 4, sin 5, sin 6 are negative
        assert!(s.directions.iter().all(|d| ![4, 5, 6].contains(&d.index)));
        assert!(s.provenance.last_index > 10);
    }

    #[test]
    fn invert_rejects_overflow() {
        let s = generate(&spec(Generator::Lac, 1100, None)).unwrap();
        assert!(matches!(invert(&s), Err(SampleError::Overflow(_))));
        // the structured form still works at those indices
        let d = s.directions[1099];
        assert_eq!(d.log2_inverse(), 1100.0);
        assert_eq!(d.inverse_scaled(1100), 1.0);
    }

    #[test]
    fn invert_detects_degenerate_sample() {
        let s = DirectionSample::from_angles(&[0.5, 0.5 * (1.0 + 1e-14)]).unwrap();
        assert!(matches!(invert(&s), Err(SampleError::Degenerate(_, _))));
    }

    #[test]
    fn ordered_sample_rejects_bad_input() {
        assert!(OrderedSample::new(vec![1.0, 1.0]).is_err());
        assert!(OrderedSample::new(vec![2.0, 1.0]).is_err());
        assert!(OrderedSample::new(vec![-1.0, 1.0]).is_err());
        assert!(OrderedSample::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let s = generate(&spec(Generator::RandLin, 8, Some(3))).unwrap();
        let rows = read_sample_csv(&s.to_csv()).unwrap();
        assert_eq!(rows.len(), 8);
        for (row, d) in rows.iter().zip(&s.directions) {
            assert_eq!(row.index, d.index);
            assert_eq!(row.value, d.angle());
        }
    }

    #[test]
    fn csv_rejects_non_angles() {
        for bad in ["nan", "-0.5", "0", "inf"] {
            let text = format!("index,value\n1,0.3\n2,{bad}\n");
            assert!(matches!(read_sample_csv(&text), Err(SampleError::NotPositive { position: 1, .. })), "{bad}");
        }
        assert!(read_sample_csv("index,value\n1,abc\n").is_err());
    }

    #[test]
    fn ordered_key_is_monotone() {
        let xs = [-3.5, -1.0, -0.0, 0.0, 1e-300, 0.5, 2.0, 1e300];
        for w in xs.windows(2) {
            assert!(ordered_key(w[0]) <= ordered_key(w[1]));
        }
    }
}
