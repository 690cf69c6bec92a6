//! Closed-form probabilities behind the two witness searches, their Monte
//! Carlo counterparts, and the index schedules that make events independent.
//!
//! Monte Carlo trial `t` draws from `stream.substream(t)`, so totals are
//! integer sums that do not depend on how trials are split across threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stream::{RandomStream, UniformSource};
use crate::witnesses::{blocks, collect_cells, dyadic_cell, homogeneous_in_en};

/// Width of every statistical acceptance band, in binomial standard errors.
pub const SIGMA_BAND: f64 = 4.0;

#[derive(Debug, Error, PartialEq)]
pub enum ProbabilityError {
    #[error("order N={0} is outside 1..=30")]
    BadOrder(u32),
    #[error("subinterval index l={l} is outside 1..={max}")]
    SubindexOutOfRange { l: u64, max: u64 },
    #[error("block d={d} leaves no valid index d - l for l={l}")]
    BlockTooLow { d: u64, l: u64 },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("empty block range [{0}, {1}]")]
    EmptyRange(u64, u64),
    #[error("schedule {kind:?} overflows 64-bit integers at element {index}")]
    Overflow { kind: ScheduleKind, index: u64 },
    #[error("count must be at least 1")]
    ZeroCount,
}

fn block_size(order: u32) -> Result<u64, ProbabilityError> {
    if (1..=30).contains(&order) {
        Ok(1u64 << order)
    } else {
        Err(ProbabilityError::BadOrder(order))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEstimate {
    pub trials: u64,
    pub hits: u64,
    pub frequency: f64,
    /// `sqrt(f (1 − f) / trials)` from the observed frequency.
    pub stderr: f64,
}

impl FrequencyEstimate {
    pub fn new(trials: u64, hits: u64) -> Self {
        let frequency = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        let stderr = if trials == 0 {
            0.0
        } else {
            (frequency * (1.0 - frequency) / trials as f64).sqrt()
        };
        Self { trials, hits, frequency, stderr }
    }

    /// Binomial standard error of `trials` draws at probability `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// `|frequency − p| ≤ k · σ(p)`.
    pub fn within(&self, p: f64, k: f64) -> bool {
        (self.frequency - p).abs() <= k * self.sigma_at(p)
    }
}

/// `P(2^{d−l} / X_{d−l} ∈ I_{d,l}) = 2^{−l} · 2^N / ((2^N + l − 1)(2^N + l))`.
///
/// Algebraically equal to `2^{−l}((1 + (l−1)/2^N)^{−1} − (1 + l/2^N)^{−1})`
/// without the cancellation.
pub fn p_analytic(order: u32, l: u64) -> Result<f64, ProbabilityError> {
    Ok(ln_p_analytic(order, l)?.exp())
}

pub fn ln_p_analytic(order: u32, l: u64) -> Result<f64, ProbabilityError> {
    let m = block_size(order)?;
    if l == 0 || l > m {
        return Err(ProbabilityError::SubindexOutOfRange { l, max: m });
    }
    let mf = m as f64;
    let lf = l as f64;
    Ok(-lf * std::f64::consts::LN_2 + mf.ln() - (mf + lf - 1.0).ln() - (mf + lf).ln())
}

/// `η_N = ∏_{l ≤ 2^N} p_{N,l}`, accumulated in log space.
pub fn eta(order: u32) -> Result<f64, ProbabilityError> {
    Ok(ln_eta(order)?.exp())
}

pub fn ln_eta(order: u32) -> Result<f64, ProbabilityError> {
    let m = block_size(order)?;
    (1..=m).map(|l| ln_p_analytic(order, l)).sum()
}

/// `P(H_{a,N} ⊂ E_N) = 2^{−N·2^N}`.
pub fn homogeneous_inclusion_prob(order: u32) -> Result<f64, ProbabilityError> {
    let m = block_size(order)?;
    Ok((-(order as f64) * m as f64 * std::f64::consts::LN_2).exp())
}

/// Frequency of `2^{d−l} / X_{d−l} ∈ I_{d,l}` over independent trials.
pub fn mc_p(order: u32, l: u64, trials: u64, seed: u64, d: u64) -> Result<FrequencyEstimate, ProbabilityError> {
    let m = block_size(order)?;
    if l == 0 || l > m {
        return Err(ProbabilityError::SubindexOutOfRange { l, max: m });
    }
    if d <= l {
        return Err(ProbabilityError::BlockTooLow { d, l });
    }
    mc_p_with(order, l, trials, d, |t| RandomStream::new(seed).substream(t))
}

/// [`mc_p`] with a caller-supplied stream per trial.
pub fn mc_p_with<S, F>(order: u32, l: u64, trials: u64, d: u64, trial_stream: F) -> Result<FrequencyEstimate, ProbabilityError>
where
    S: UniformSource,
    F: Fn(u64) -> S + Sync,
{
    if trials == 0 {
        return Err(ProbabilityError::NoTrials);
    }
    let k = d - l;
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let c = dyadic_cell(k, trial_stream(t).value(k), order);
            c.d == d && c.l == l
        })
        .count() as u64;
    Ok(FrequencyEstimate::new(trials, hits))
}

/// Frequency of `H_{a,N} ⊂ E_N` over independent trials (trial `t` uses `a = t + 1`).
pub fn mc_inclusion(order: u32, trials: u64, seed: u64) -> Result<FrequencyEstimate, ProbabilityError> {
    block_size(order)?;
    if trials == 0 {
        return Err(ProbabilityError::NoTrials);
    }
    let root = RandomStream::new(seed);
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| homogeneous_in_en(&root.substream(t), order, t + 1))
        .count() as u64;
    Ok(FrequencyEstimate::new(trials, hits))
}

/// Frequency of the event "every `I_{d,l}` holds a point" over blocks `d ∈ [d_lo, d_hi]`.
pub fn mc_event_a<S: UniformSource + ?Sized>(
    stream: &S,
    order: u32,
    d_lo: u64,
    d_hi: u64,
) -> Result<FrequencyEstimate, ProbabilityError> {
    let m = block_size(order)?;
    if d_lo > d_hi {
        return Err(ProbabilityError::EmptyRange(d_lo, d_hi));
    }
    let cells = collect_cells(stream, order, d_hi, d_lo, d_hi);
    let hits = blocks(&cells).filter(|(_, f)| f.len() as u64 == m).count() as u64;
    Ok(FrequencyEstimate::new(d_hi - d_lo + 1, hits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    /// `a_i = 2^{2N(i+1)}`, `i ≥ 1`
    Multiplier,
    /// `d_s = 2^N + 1 + (s − 1)(2^N + 2)`, `s ≥ 1`
    Extraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub kind: ScheduleKind,
    #[serde(rename = "N")]
    pub order: u32,
}

/// First `count` elements of a schedule.
pub fn schedule(kind: ScheduleKind, order: u32, count: u64) -> Result<Vec<u64>, ProbabilityError> {
    let m = block_size(order)?;
    if count == 0 {
        return Err(ProbabilityError::ZeroCount);
    }
    (1..=count)
        .map(|i| {
            let v = match kind {
                ScheduleKind::Multiplier => 2u64
                    .checked_mul(order as u64)
                    .and_then(|e| e.checked_mul(i + 1))
                    .and_then(|e| u32::try_from(e).ok())
                    .and_then(|e| 1u64.checked_shl(e).filter(|_| e < 64)),
                ScheduleKind::Extraction => (i - 1)
                    .checked_mul(m + 2)
                    .and_then(|x| x.checked_add(m + 1)),
            };
            v.ok_or(ProbabilityError::Overflow { kind, index: i })
        })
        .collect()
}

/// The defining growth condition of a schedule.
pub fn schedule_is_valid(spec: ScheduleSpec, values: &[u64]) -> bool {
    let m = 1u128 << spec.order;
    values.windows(2).all(|w| match spec.kind {
        ScheduleKind::Multiplier => (w[0] as u128) * m < w[1] as u128,
        ScheduleKind::Extraction => (w[1] as u128) > w[0] as u128 + m + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::ConstantStream;

    /// The probability display evaluated literally.
    fn p_display(order: u32, l: u64) -> f64 {
        let m = 2f64.powi(order as i32);
        let l = l as f64;
        0.5f64.powf(l) * (1.0 / (1.0 + (l - 1.0) / m) - 1.0 / (1.0 + l / m))
    }

    #[test]
    fn p_examples() {
        assert!((p_analytic(1, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((p_analytic(2, 1).unwrap() - 0.1).abs() < 1e-15);
        assert!((p_analytic(2, 4).unwrap() - 1.0 / 224.0).abs() < 1e-16);
        assert!(p_analytic(2, 5).is_err());
        assert!(p_analytic(2, 0).is_err());
    }

    #[test]
    fn p_matches_display_form() {
        for order in 1..=6 {
            for l in 1..=(1u64 << order) {
                let a = p_analytic(order, l).unwrap();
                let b = p_display(order, l);
                assert!((a - b).abs() <= 1e-12 * b, "N={order} l={l}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn p_is_strictly_decreasing_and_sums_below_one() {
        for order in 1..=8 {
            let ps: Vec<f64> = (1..=(1u64 << order)).map(|l| p_analytic(order, l).unwrap()).collect();
            assert!(ps.windows(2).all(|w| w[1] < w[0]));
            assert!(ps.iter().sum::<f64>() <= 1.0);
        }
    }

    #[test]
    fn eta_values() {
        assert!((eta(1).unwrap() - 1.0 / 144.0).abs() < 1e-16);
        let direct: f64 = (1..=4).map(|l| p_display(2, l)).product();
        assert!((eta(2).unwrap() - direct).abs() < 1e-12 * direct);
        assert!((eta(2).unwrap() - 1.0 / 5_644_800.0).abs() < 1e-12 * direct);
        for order in 1..=4 {
            let e = eta(order).unwrap();
            let min_p = (1..=(1u64 << order)).map(|l| p_analytic(order, l).unwrap()).fold(1.0, f64::min);
            assert!(e > 0.0 && e < min_p);
        }
        // log-space stays meaningful where the product underflows
        assert!(ln_eta(10).unwrap().is_finite());
    }

    #[test]
    fn inclusion_prob_values() {
        assert!((homogeneous_inclusion_prob(1).unwrap() - 0.25).abs() < 1e-16);
        assert!((homogeneous_inclusion_prob(2).unwrap() - 1.0 / 256.0).abs() < 1e-17);
        for order in 1..=4 {
            let direct = 0.5f64.powi(order as i32).powi(1 << order);
            assert!((homogeneous_inclusion_prob(order).unwrap() - direct).abs() <= 1e-12 * direct);
        }
    }

    #[test]
    fn forced_stream_always_hits() {
        // X = 1/(2^l · mid) puts the point in the middle of I_{d,l}
        let (order, l, d) = (2u32, 3u64, 9u64);
        let mid = 1.0 + (l as f64 - 0.5) / 4.0;
        let x = 0.5f64.powi(l as i32) / mid;
        let est = mc_p_with(order, l, 1000, d, |_| ConstantStream(x)).unwrap();
        assert_eq!(est.hits, 1000);
        assert_eq!(est.frequency, 1.0);
    }

    #[test]
    fn mc_p_tracks_analytic_value() {
        let est = mc_p(2, 1, 200_000, 3, 10).unwrap();
        assert!(est.within(0.1, SIGMA_BAND), "{est:?}");
        assert!(matches!(mc_p(2, 4, 10, 3, 4), Err(ProbabilityError::BlockTooLow { .. })));
    }

    #[test]
    fn stderr_shrinks_with_more_trials() {
        let a = mc_p(1, 1, 100_000, 1, 7).unwrap();
        let b = mc_p(1, 1, 200_000, 1, 7).unwrap();
        let ratio = a.stderr / b.stderr;
        assert!((ratio - 2f64.sqrt()).abs() < 0.02, "{ratio}");
    }

    #[test]
    fn event_a_with_filling_stream() {
        // one point per index, so at most every other block can be filled at N = 1;
        // the block d = 10 gets both halves from k = 9 and k = 8
        let s = crate::stream::FnStream(|k: u64| match k {
            9 => 0.5 / 1.25,
            8 => 0.25 / 1.75,
            _ => 0.999_999,
        });
        let est = mc_event_a(&s, 1, 10, 10).unwrap();
        assert_eq!((est.trials, est.hits, est.frequency), (1, 1, 1.0));
        let est = mc_event_a(&s, 1, 11, 30).unwrap();
        assert_eq!(est.hits, 0);
        assert!(mc_event_a(&s, 1, 5, 4).is_err());
    }

    #[test]
    fn schedules() {
        assert_eq!(schedule(ScheduleKind::Multiplier, 1, 3).unwrap(), vec![16, 64, 256]);
        let ext = schedule(ScheduleKind::Extraction, 2, 20).unwrap();
        assert!(ext.windows(2).all(|w| w[1] - w[0] > 5));
        assert_eq!(ext[0], 5);
        for order in 1..=4 {
            let spec = ScheduleSpec { kind: ScheduleKind::Multiplier, order };
            let count = (62 / (2 * order as u64)) - 1;
            let a = schedule(spec.kind, order, count).unwrap();
            assert!(schedule_is_valid(spec, &a));
            let ext = ScheduleSpec { kind: ScheduleKind::Extraction, order };
            assert!(schedule_is_valid(ext, &schedule(ext.kind, order, 50).unwrap()));
        }
        assert!(matches!(
            schedule(ScheduleKind::Multiplier, 4, 10),
            Err(ProbabilityError::Overflow { index: 7, .. })
        ));
    }

    #[test]
    fn multiplier_schedule_gives_disjoint_homogeneous_sets() {
        let order = 1;
        let a = schedule(ScheduleKind::Multiplier, order, 6).unwrap();
        let sets: Vec<Vec<u64>> = a.iter().map(|&ai| (1..=2).map(|k| k * ai).collect()).collect();
        for i in 0..sets.len() {
            for j in (i + 1)..sets.len() {
                assert!(sets[i].iter().all(|x| !sets[j].contains(x)));
            }
        }
    }
}
