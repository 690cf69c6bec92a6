//! Constructive witnesses for finite Perron capacity of the two random sets.
//!
//! The linear case looks for a multiplier `a` whose homogeneous set
//! `H_{a,N} = {a, 2a, …, 2^N a}` lands entirely in
//! `E_N = {k : X_k ≥ 1 − 2^{−N}}`; the points `ka / X_{ka}` of the inverse
//! random set are then a small perturbation of `H_{a,N}`.
//!
//! The lacunary case looks for a dyadic block `I_d = [2^d, 2^{d+1}]` whose
//! `2^N` equal subintervals each receive a point `2^k / X_k`, and keeps the
//! points of the even subintervals, which are evenly spaced up to a factor 3.
//! Positions inside `I_d` are computed from the exponent of `X_k` alone, so
//! `d` may be far beyond the double-precision range.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::directionsets::{Generator, OrderedSample, SampleError};
use crate::perron::{perron_factor, Variant};
use crate::stream::UniformSource;

/// Bound on the factor certified by both searches.
pub const FACTOR_BOUND: f64 = 6.0;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("multiplier a must be at least 1")]
    ZeroMultiplier,
    #[error("order N={0} is outside 1..=30")]
    BadOrder(u32),
    #[error("perturbation has {got} values, homogeneous set has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("perturbation value {value} at position {position} is not positive")]
    NonPositive { position: usize, value: f64 },
    #[error("perturbed set is not strictly increasing")]
    OrderingLost(#[source] SampleError),
    #[error("subinterval index l={l} is outside 1..={max}")]
    SubindexOutOfRange { l: u64, max: u64 },
}

fn check_order(order: u32) -> Result<u64, WitnessError> {
    if (1..=30).contains(&order) {
        Ok(1u64 << order)
    } else {
        Err(WitnessError::BadOrder(order))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneousSpec {
    pub a: u64,
    #[serde(rename = "N")]
    pub order: u32,
}

/// `{a, 2a, …, 2^N a}`.
pub fn homogeneous_set(spec: HomogeneousSpec) -> Result<OrderedSample, WitnessError> {
    if spec.a == 0 {
        return Err(WitnessError::ZeroMultiplier);
    }
    let m = check_order(spec.order)?;
    let values = (1..=m).map(|k| (k * spec.a) as f64).collect();
    OrderedSample::new(values).map_err(WitnessError::OrderingLost)
}

/// Values `ε(ka)` for `k = 1..2^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    values: Vec<f64>,
}

impl Perturbation {
    pub fn new(values: Vec<f64>) -> Result<Self, WitnessError> {
        if let Some((position, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(WitnessError::NonPositive { position, value });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// `{(1 + ε(l)) · l : l ∈ H_{a,N}}`.
///
/// When `2^N ‖ε‖∞ ≤ 1/2` consecutive points stay at least `a/2` apart and
/// every term of the factor is at most `10/3`.
pub fn perturbed_homogeneous(spec: HomogeneousSpec, eps: &Perturbation) -> Result<OrderedSample, WitnessError> {
    let base = homogeneous_set(spec)?;
    if eps.values.len() != base.len() {
        return Err(WitnessError::LengthMismatch { expected: base.len(), got: eps.values.len() });
    }
    let values = base
        .iter()
        .zip(&eps.values)
        .map(|(&h, &e)| (1.0 + e) * h)
        .collect();
    OrderedSample::new(values).map_err(WitnessError::OrderingLost)
}

/// Indices `k ≤ horizon` with `X_k ≥ 1 − 2^{−N}`.
pub fn en_indices<S: UniformSource + ?Sized>(stream: &S, order: u32, horizon: u64) -> Vec<u64> {
    let threshold = 1.0 - 0.5f64.powi(order as i32);
    (1..=horizon)
        .into_par_iter()
        .filter(|&k| stream.value(k) >= threshold)
        .collect()
}

/// Whether `H_{a,N} ⊂ E_N`.
pub fn homogeneous_in_en<S: UniformSource + ?Sized>(stream: &S, order: u32, a: u64) -> bool {
    let threshold = 1.0 - 0.5f64.powi(order as i32);
    (1..=1u64 << order).all(|k| stream.value(k * a) >= threshold)
}

/// A named pass/fail outcome recorded in a report.
///
/// Informational checks document a quantity without gating success.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
}

impl Check {
    pub fn new(name: &str, passed: bool, value: Option<f64>) -> Self {
        Self { name: name.to_string(), passed, value, informational: false }
    }

    pub fn info(name: &str, passed: bool, value: Option<f64>) -> Self {
        Self { informational: true, ..Self::new(name, passed, value) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    T1,
    T2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub theorem: Theorem,
    #[serde(rename = "N")]
    pub order: u32,
    pub horizon: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub found: bool,
    /// Witness points; for T2 divided by `2^scale_exponent`.
    pub witness: Vec<f64>,
    pub indices: Vec<u64>,
    /// `None` when the witness has fewer than three points.
    pub g_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale_exponent: Option<u64>,
    /// `log2 δ = d − N`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_log2: Option<i64>,
    /// T2: one point per subinterval `I_{d,l}`, normalised like `witness`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub filling: Vec<f64>,
    /// T1: multipliers below `a` whose set was in `E_N` but failed the factor bound.
    #[serde(default)]
    pub rejected: u64,
    pub checks: Vec<Check>,
}

impl WitnessReport {
    fn empty(theorem: Theorem, order: u32, horizon: u64, seed: Option<u64>) -> Self {
        Self {
            theorem,
            order,
            horizon,
            seed,
            found: false,
            witness: Vec::new(),
            indices: Vec::new(),
            g_value: None,
            a: None,
            d: None,
            scale_exponent: None,
            delta_log2: None,
            filling: Vec::new(),
            rejected: 0,
            checks: Vec::new(),
        }
    }

    /// Found, and every non-informational check passed.
    pub fn passed(&self) -> bool {
        self.found && self.checks.iter().all(|c| c.passed || c.informational)
    }
}

fn factor_or_none(values: &[f64]) -> Option<f64> {
    if values.len() < 3 {
        return None;
    }
    perron_factor(values, Variant::CapacityForm).ok().map(|t| t.value)
}

/// Candidate witness of the linear search at multiplier `a`: points
/// `ka · X_{ka}⁻¹` and their factor (`∞` when ordering is lost).
fn t1_candidate<S: UniformSource + ?Sized>(stream: &S, m: u64, a: u64) -> (Vec<f64>, f64) {
    let points: Vec<f64> = (1..=m).map(|k| (k * a) as f64 * stream.value(k * a).recip()).collect();
    let g = if points.windows(2).all(|w| w[0] < w[1]) {
        factor_or_none(&points).unwrap_or(f64::NEG_INFINITY)
    } else {
        f64::INFINITY
    };
    (points, g)
}

/// Smallest `a ≤ a_max` with `H_{a,N} ⊂ E_N` whose perturbed set has factor below 6.
///
/// `seed` is only echoed into the report.
pub fn t1_witness_search<S: UniformSource + ?Sized>(
    stream: &S,
    order: u32,
    a_max: u64,
    seed: Option<u64>,
) -> Result<WitnessReport, WitnessError> {
    let m = check_order(order)?;
    let mut report = WitnessReport::empty(Theorem::T1, order, a_max, seed);
    let accept = |a: u64| homogeneous_in_en(stream, order, a) && t1_candidate(stream, m, a).1 < FACTOR_BOUND;
    let Some(a) = (1..=a_max).into_par_iter().find_first(|&a| accept(a)) else {
        report.rejected = (1..=a_max)
            .into_par_iter()
            .filter(|&a| homogeneous_in_en(stream, order, a))
            .count() as u64;
        return Ok(report);
    };
    report.rejected = (1..a)
        .into_par_iter()
        .filter(|&b| homogeneous_in_en(stream, order, b))
        .count() as u64;

    let (points, _) = t1_candidate(stream, m, a);
    let indices: Vec<u64> = (1..=m).map(|k| k * a).collect();
    let eps: Vec<f64> = indices.iter().map(|&n| stream.value(n).recip() - 1.0).collect();
    let sup = eps.iter().copied().fold(0.0, f64::max);

    let perturbed = Perturbation::new(eps.clone())
        .and_then(|p| perturbed_homogeneous(HomogeneousSpec { a, order }, &p));
    let identity = match &perturbed {
        Ok(s) => s.values() == points.as_slice(),
        Err(_) => false,
    };
    let in_inverse_set = indices.iter().zip(&points).all(|(&n, &u)| {
        Generator::RandLin
            .direction(n, stream)
            .map(|d| d.inverse() == u)
            .unwrap_or(false)
    });
    let g = factor_or_none(&points);

    report.found = true;
    report.a = Some(a);
    report.checks = vec![
        Check::new("indices_in_E_N", homogeneous_in_en(stream, order, a), None),
        Check::new("perturbation_positive", eps.iter().all(|&e| e > 0.0), Some(sup)),
        Check::new("strictly_increasing", perturbed.is_ok(), None),
        Check::new("perturbation_identity_exact", identity, None),
        Check::new("subset_of_inverse_rand_lin", in_inverse_set, None),
        Check::new("g_below_6", g.is_none_or(|g| g < FACTOR_BOUND), g),
        Check::info("p5_sup_norm_condition", (m as f64) * sup <= 0.5, Some((m as f64) * sup)),
    ];
    report.witness = points;
    report.indices = indices;
    report.g_value = g;
    Ok(report)
}

/// Closed subinterval `I_{d,l}` as `(lo, hi)`; `None` past the double range.
pub fn dyadic_subinterval(d: u64, l: u64, order: u32) -> Result<(f64, f64), WitnessError> {
    let m = check_order(order)?;
    if l == 0 || l > m {
        return Err(WitnessError::SubindexOutOfRange { l, max: m });
    }
    let (lo, hi) = normalized_subinterval(l, m);
    let scale = 2f64.powi(d.min(2000) as i32);
    Ok((lo * scale, hi * scale))
}

/// `I_{d,l} / 2^d = [1 + (l−1)/2^N, 1 + l/2^N]`.
pub fn normalized_subinterval(l: u64, m: u64) -> (f64, f64) {
    let m = m as f64;
    (1.0 + (l - 1) as f64 / m, 1.0 + l as f64 / m)
}

/// Location of the point `2^k / x` among the dyadic subintervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicCell {
    pub d: u64,
    pub l: u64,
    /// `(2^k / x) / 2^d`, in `(1, 2]`.
    pub position: f64,
}

/// Places `2^k / x` (with `x ∈ (0, 1]`, `k ≥ 1`) into `I_{d,l}`.
///
/// Boundary points go to the lower `(d, l)`. Only the binary exponent of `x`
/// and one reciprocal are used, so `k` may be arbitrarily large.
pub fn dyadic_cell(k: u64, x: f64, order: u32) -> DyadicCell {
    debug_assert!(x > 0.0 && x <= 1.0 && x.is_normal());
    let e = ((x.to_bits() >> 52) & 0x7ff) as i64 - 1023; // x ∈ [2^e, 2^{e+1})
    let position = (x * 2f64.powi(-(e as i32) - 1)).recip(); // (1, 2]
    let d = (k as i64 - e - 1) as u64;
    let m = 1u64 << order;
    let t = (position - 1.0) * m as f64; // exact
    let l = (t.ceil() as u64).clamp(1, m);
    DyadicCell { d, l, position }
}

/// `(d, l, k, position)` for every `k ≤ k_max` whose point lands in a block
/// `d ∈ [d_lo, d_hi]`, sorted by `(d, l, k)`.
pub(crate) fn collect_cells<S: UniformSource + ?Sized>(
    stream: &S,
    order: u32,
    k_max: u64,
    d_lo: u64,
    d_hi: u64,
) -> Vec<(u64, u64, u64, f64)> {
    let mut cells: Vec<(u64, u64, u64, f64)> = (1..=k_max)
        .into_par_iter()
        .filter_map(|k| {
            let c = dyadic_cell(k, stream.value(k), order);
            (c.d >= d_lo && c.d <= d_hi).then_some((c.d, c.l, k, c.position))
        })
        .collect();
    cells.sort_by_key(|c| (c.0, c.1, c.2));
    cells
}

/// Per block `d`, the first point (smallest `k`) of each subinterval that has one.
pub(crate) fn blocks(cells: &[(u64, u64, u64, f64)]) -> impl Iterator<Item = (u64, Vec<(u64, u64, f64)>)> + '_ {
    cells.chunk_by(|a, b| a.0 == b.0).map(|chunk| {
        let mut firsts: Vec<(u64, u64, f64)> = Vec::new();
        for &(_, l, k, pos) in chunk {
            if firsts.last().is_none_or(|f| f.0 != l) {
                firsts.push((l, k, pos));
            }
        }
        (chunk[0].0, firsts)
    })
}

/// Smallest `d ≤ d_max` whose `2^N` subintervals are all hit, and the even-indexed extraction.
///
/// Points `2^k / X_k` exceed `2^k`, so only `k ≤ d_max` can reach a block `d ≤ d_max`.
pub fn t2_witness_search<S: UniformSource + ?Sized>(
    stream: &S,
    order: u32,
    d_max: u64,
    seed: Option<u64>,
) -> Result<WitnessReport, WitnessError> {
    let m = check_order(order)?;
    let mut report = WitnessReport::empty(Theorem::T2, order, d_max, seed);
    let cells = collect_cells(stream, order, d_max, 0, d_max);
    let Some((d, firsts)) = blocks(&cells).find(|(_, f)| f.len() as u64 == m) else {
        return Ok(report);
    };

    let filling: Vec<f64> = firsts.iter().map(|f| f.2).collect();
    let chosen: Vec<&(u64, u64, f64)> = firsts.iter().filter(|f| f.0 % 2 == 0).collect();
    let witness: Vec<f64> = chosen.iter().map(|f| f.2).collect();
    let indices: Vec<u64> = chosen.iter().map(|f| f.1).collect();
    let delta = 1.0 / m as f64;

    let in_subintervals = chosen.iter().all(|&&(l, _, pos)| {
        let (lo, hi) = normalized_subinterval(l, m);
        lo <= pos && pos <= hi
    });
    let spacing_ok = witness
        .windows(2)
        .all(|w| (w[1] - w[0]) >= delta && (w[1] - w[0]) <= 3.0 * delta);
    let min_gap = witness.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let max_gap = witness.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let in_inverse_set = chosen.iter().all(|&&(_, k, pos)| {
        Generator::RandLac
            .direction(k, stream)
            .map(|dir| dir.inverse_scaled(d as i64) == pos)
            .unwrap_or(false)
    });
    let g = factor_or_none(&witness);

    report.found = true;
    report.d = Some(d);
    report.scale_exponent = Some(d);
    report.delta_log2 = Some(d as i64 - order as i64);
    report.checks = vec![
        Check::new("all_subintervals_filled", filling.len() as u64 == m, None),
        Check::new("points_in_even_subintervals", in_subintervals, None),
        Check::new(
            "spacing_within_delta_3delta",
            spacing_ok,
            (witness.len() >= 2).then_some(max_gap / delta),
        ),
        Check::info("min_gap_over_delta", spacing_ok, (witness.len() >= 2).then_some(min_gap / delta)),
        Check::new("subset_of_inverse_rand_lac", in_inverse_set, None),
        Check::new("g_at_most_6", g.is_none_or(|g| g <= FACTOR_BOUND), g),
    ];
    report.witness = witness;
    report.indices = indices;
    report.filling = filling;
    report.g_value = g;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{ConstantStream, Draws, FnStream, RandomStream};

    #[test]
    fn homogeneous_examples() {
        let h = homogeneous_set(HomogeneousSpec { a: 1, order: 2 }).unwrap();
        assert_eq!(h.values(), &[1.0, 2.0, 3.0, 4.0]);
        let h = homogeneous_set(HomogeneousSpec { a: 3, order: 1 }).unwrap();
        assert_eq!(h.values(), &[3.0, 6.0]);
        assert!(homogeneous_set(HomogeneousSpec { a: 0, order: 1 }).is_err());
        assert!(homogeneous_set(HomogeneousSpec { a: 1, order: 0 }).is_err());
    }

    #[test]
    fn homogeneous_factor_is_two() {
        for a in [1u64, 2, 5, 17, 1000, 999_983, 1_000_000] {
            for order in 2..=6 {
                let h = homogeneous_set(HomogeneousSpec { a, order }).unwrap();
                assert_eq!(perron_factor(&h, Variant::CapacityForm).unwrap().value, 2.0);
            }
        }
    }

    #[test]
    fn tiny_perturbation_is_near_identity() {
        let spec = HomogeneousSpec { a: 7, order: 3 };
        let eps = Perturbation::new(vec![1e-15; 8]).unwrap();
        let p = perturbed_homogeneous(spec, &eps).unwrap();
        let g = perron_factor(&p, Variant::CapacityForm).unwrap().value;
        assert!((g - 2.0).abs() < 1e-9);
    }

    #[test]
    fn perturbation_errors() {
        assert!(matches!(Perturbation::new(vec![0.1, 0.0]), Err(WitnessError::NonPositive { position: 1, .. })));
        let spec = HomogeneousSpec { a: 1, order: 2 };
        let short = Perturbation::new(vec![0.1; 3]).unwrap();
        assert!(matches!(perturbed_homogeneous(spec, &short), Err(WitnessError::LengthMismatch { .. })));
        // a large bump on the first point overtakes the second
        let big = Perturbation::new(vec![1.5, 0.01, 0.01, 0.01]).unwrap();
        assert!(matches!(perturbed_homogeneous(spec, &big), Err(WitnessError::OrderingLost(_))));
    }

    #[test]
    fn small_perturbations_stay_below_ten_thirds() {
        let mut d = Draws::new(5);
        for order in [2u32, 3, 5] {
            let m = 1usize << order;
            let cap = 0.5 / m as f64;
            for _ in 0..500 {
                let eps: Vec<f64> = (0..m).map(|_| d.next_f64() * cap).collect();
                let p = perturbed_homogeneous(HomogeneousSpec { a: 3, order }, &Perturbation::new(eps).unwrap()).unwrap();
                let g = perron_factor(&p, Variant::CapacityForm).unwrap().value;
                assert!(g <= 10.0 / 3.0 + 1e-9, "{g}");
            }
        }
    }

    #[test]
    fn en_indices_with_forced_streams() {
        let n = 2;
        let all = ConstantStream(1.0 - 0.5f64.powi(n + 1));
        assert_eq!(en_indices(&all, n as u32, 50), (1..=50).collect::<Vec<_>>());
        assert!(en_indices(&ConstantStream(0.5), 2, 50).is_empty());
    }

    #[test]
    fn en_cardinality_is_binomial() {
        let horizon = 10_000u64;
        let count = en_indices(&RandomStream::new(7), 1, horizon).len() as f64;
        let sigma = (horizon as f64 * 0.25).sqrt();
        assert!((count - horizon as f64 / 2.0).abs() < 4.0 * sigma, "{count}");
    }

    #[test]
    fn t1_forced_stream_finds_a_equals_one() {
        for order in 1..=4 {
            let s = ConstantStream(1.0 - 0.5f64.powi(order as i32 + 1));
            let r = t1_witness_search(&s, order, 10, None).unwrap();
            assert!(r.found);
            assert_eq!(r.a, Some(1));
            assert_eq!(r.rejected, 0);
            assert!(r.passed(), "{:?}", r.checks);
            if order >= 2 {
                assert!(r.g_value.unwrap() < FACTOR_BOUND);
            }
        }
    }

    #[test]
    fn t1_no_witness_is_not_an_error() {
        let r = t1_witness_search(&ConstantStream(0.25), 2, 100, None).unwrap();
        assert!(!r.found);
        assert!(!r.passed());
    }

    #[test]
    fn t1_skips_hits_with_large_factor() {
        // a = 1 lands in E_2 but the points 1/x collapse together
        let s = FnStream(|k: u64| match k {
            1 => 0.76,
            2 => 0.99,
            3 => 0.76,
            4 => 0.999,
            _ => 0.9999,
        });
        let r = t1_witness_search(&s, 2, 10, None).unwrap();
        assert_eq!(r.a, Some(2));
        assert_eq!(r.rejected, 1);
    }

    #[test]
    fn subinterval_examples() {
        assert_eq!(dyadic_subinterval(0, 1, 1).unwrap(), (1.0, 1.5));
        assert_eq!(dyadic_subinterval(3, 4, 2).unwrap(), (14.0, 16.0));
        assert!(dyadic_subinterval(3, 5, 2).is_err());
        assert!(dyadic_subinterval(3, 0, 2).is_err());
        for d in [0u64, 5, 20] {
            let mut prev_hi = 2f64.powi(d as i32);
            for l in 1..=8 {
                let (lo, hi) = dyadic_subinterval(d, l, 3).unwrap();
                assert_eq!(lo, prev_hi);
                assert_eq!(hi - lo, 2f64.powi(d as i32 - 3));
                prev_hi = hi;
            }
            assert_eq!(prev_hi, 2f64.powi(d as i32 + 1));
        }
    }

    #[test]
    fn dyadic_cell_agrees_with_direct_evaluation() {
        let s = RandomStream::new(1);
        for k in 1..300u64 {
            let x = s.value(k);
            let c = dyadic_cell(k, x, 3);
            let u = 2f64.powi(k as i32) / x;
            let lo = 2f64.powi(c.d as i32);
            assert!(lo < u && u <= 2.0 * lo, "k={k}");
            let (a, b) = dyadic_subinterval(c.d, c.l, 3).unwrap();
            assert!(a <= u * (1.0 + 1e-15) && u <= b * (1.0 + 1e-15));
            assert!((c.position - u / lo).abs() <= 4e-16 * c.position);
        }
    }

    #[test]
    fn dyadic_cell_boundaries_go_low() {
        // x = 1 puts 2^k on the boundary between I_{k-1} and I_k
        let c = dyadic_cell(5, 1.0, 2);
        assert_eq!((c.d, c.l, c.position), (4, 4, 2.0));
        // x = 1/2 puts 2^{k+1} on the top boundary of I_k
        let c = dyadic_cell(5, 0.5, 2);
        assert_eq!((c.d, c.l, c.position), (5, 4, 2.0));
        // position 1.5 sits between l = 2 and l = 3 at N = 2
        let c = dyadic_cell(5, 1.0 / 1.5, 2);
        assert_eq!(c.position, 1.5);
        assert_eq!((c.d, c.l), (5, 2));
        // huge k: no overflow
        let c = dyadic_cell(1 << 40, 0.3, 2);
        assert_eq!(c.d, (1 << 40) + 1);
    }

    #[test]
    fn t2_forced_filling() {
        // k = d - l for l = 1..4 lands in I_{d,l} at the midpoint of each subinterval
        let d = 10u64;
        let s = FnStream(move |k: u64| {
            if k + 4 >= d && k < d {
                let l = d - k;
                let mid = 1.0 + (l as f64 - 0.5) / 4.0;
                0.5f64.powi(l as i32) / mid
            } else {
                0.999_999
            }
        });
        let r = t2_witness_search(&s, 2, 20, None).unwrap();
        assert!(r.found);
        assert_eq!(r.d, Some(d));
        assert_eq!(r.witness.len(), 2);
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.filling.len(), 4);
    }

    #[test]
    fn t2_seed_42_first_order() {
        let r = t2_witness_search(&RandomStream::new(42), 1, 10_000, Some(42)).unwrap();
        assert!(r.found);
        assert!(r.passed());
        assert_eq!(r.witness.len(), 1);
        assert_eq!(r.g_value, None);
    }
}
