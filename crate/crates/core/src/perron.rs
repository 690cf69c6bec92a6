//! Perron factor and Perron capacity estimates.
//!
//! For a strictly increasing `u_1 < … < u_n` every admissible index pair
//! `(k, l)` contributes the term `r + 1/r` with
//! `r = (u_{k+2l} − u_{k+l}) / (u_{k+l} − u_k)`. The Perron factor is the
//! supremum of those terms. Two admissibility rules exist:
//!
//! - [`Variant::CapacityForm`]: `k, l ≥ 1`, `k + 2l ≤ n` (default);
//! - [`Variant::OrderedForm`]: additionally `l ≤ k`.
//!
//! The capacity at order `N` is the infimum of the factor over all
//! `2^N`-point subsets of a universe; [`capacity_exact_small`] enumerates it
//! and [`capacity_search`] bounds it from above.
//!
//! Terms are evaluated from the two gaps directly (`b/a + a/b`), never from
//! accumulated sums. Supremum ties keep the lexicographically smallest
//! `(k, l)`; infimum ties keep the lexicographically first subset.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stream::Draws;

/// Default cap on the number of subsets [`capacity_exact_small`] may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum PerronError {
    #[error("index pair (k={k}, l={l}) is not admissible for a sample of size {len}")]
    IndexOutOfRange { k: usize, l: usize, len: usize },
    #[error("zero or negative gap at (k={k}, l={l}); sample is not strictly increasing")]
    ZeroGap { k: usize, l: usize },
    #[error("sample is not strictly increasing at position {0}")]
    NotIncreasing(usize),
    #[error("a sample of size {0} has no admissible index pair")]
    TooSmall(usize),
    #[error("order {0} is unsupported: 2^N must be between 3 and 2^30")]
    BadOrder(u32),
    #[error("universe of size {len} has fewer than {need} points")]
    UniverseTooSmall { len: usize, need: usize },
    #[error("enumeration needs {subsets} subsets, budget is {budget}")]
    BudgetExceeded { subsets: u128, budget: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    CapacityForm,
    OrderedForm,
}

impl Variant {
    fn admits(self, k: usize, l: usize) -> bool {
        match self {
            Variant::CapacityForm => true,
            Variant::OrderedForm => l <= k,
        }
    }
}

/// One summand of the factor; `k` and `l` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerronTerm {
    pub k: usize,
    pub l: usize,
    pub value: f64,
}

#[inline]
fn term_unchecked(u: &[f64], k: usize, l: usize) -> f64 {
    let lo = u[k + l - 1] - u[k - 1];
    let hi = u[k + 2 * l - 1] - u[k + l - 1];
    hi / lo + lo / hi
}

fn check_increasing(u: &[f64]) -> Result<(), PerronError> {
    // negated so NaN counts as out of order
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    match u.windows(2).position(|w| !(w[0] < w[1])) {
        Some(i) => Err(PerronError::NotIncreasing(i + 1)),
        None => Ok(()),
    }
}

/// The term at `(k, l)`.
pub fn perron_term(u: &[f64], k: usize, l: usize) -> Result<f64, PerronError> {
    if k == 0 || l == 0 || k + 2 * l > u.len() {
        return Err(PerronError::IndexOutOfRange { k, l, len: u.len() });
    }
    let lo = u[k + l - 1] - u[k - 1];
    let hi = u[k + 2 * l - 1] - u[k + l - 1];
    if !(lo > 0.0 && hi > 0.0) {
        return Err(PerronError::ZeroGap { k, l });
    }
    Ok(hi / lo + lo / hi)
}

/// Supremum of [`perron_term`] over all admissible pairs, with its argmax.
pub fn perron_factor(u: &[f64], variant: Variant) -> Result<PerronTerm, PerronError> {
    if u.len() < 3 {
        return Err(PerronError::TooSmall(u.len()));
    }
    check_increasing(u)?;
    Ok(factor_unchecked(u, variant))
}

fn factor_unchecked(u: &[f64], variant: Variant) -> PerronTerm {
    let n = u.len();
    let mut best = PerronTerm { k: 1, l: 1, value: f64::NEG_INFINITY };
    for k in 1..=n - 2 {
        let mut l = 1;
        while k + 2 * l <= n {
            if variant.admits(k, l) {
                let v = term_unchecked(u, k, l);
                if v > best.value {
                    best = PerronTerm { k, l, value: v };
                }
            }
            l += 1;
        }
    }
    best
}

/// Largest term among pairs with `k + 2l = j` (the ones that end at `u_j`).
#[inline]
fn max_terms_ending_at(u: &[f64], j: usize) -> f64 {
    let mut m = f64::NEG_INFINITY;
    let mut l = 1;
    while 2 * l < j {
        let v = term_unchecked(u, j - 2 * l, l);
        if v > m {
            m = v;
        }
        l += 1;
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    #[serde(rename = "N")]
    pub order: u32,
    pub exact: bool,
    pub value: f64,
    pub witness: Vec<f64>,
}

fn subset_size(order: u32) -> Result<usize, PerronError> {
    if !(2..=30).contains(&order) {
        return Err(PerronError::BadOrder(order));
    }
    Ok(1usize << order)
}

/// `C(n, m)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, m: u64) -> u128 {
    if m > n {
        return 0;
    }
    let m = m.min(n - m);
    let mut acc: u128 = 1;
    for i in 0..m {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

struct Enumeration<'a> {
    universe: &'a [f64],
    m: usize,
    chosen: Vec<usize>,
    values: Vec<f64>,
    best_value: f64,
    best: Vec<usize>,
}

impl Enumeration<'_> {
    /// Depth-first, lexicographic; `prefix_max` is the largest term among the
    /// pairs fully inside the current prefix.
    fn descend(&mut self, start: usize, prefix_max: f64) {
        let depth = self.chosen.len();
        if depth == self.m {
            if prefix_max < self.best_value {
                self.best_value = prefix_max;
                self.best.clone_from(&self.chosen);
            }
            return;
        }
        let remaining = self.m - depth;
        for i in start..=self.universe.len() - remaining {
            self.chosen.push(i);
            self.values.push(self.universe[i]);
            let p = prefix_max.max(max_terms_ending_at(&self.values, depth + 1));
            // ties cannot displace an earlier subset, so prune on >=
            if p < self.best_value {
                self.descend(i + 1, p);
            }
            self.values.pop();
            self.chosen.pop();
        }
    }
}

/// Exact infimum of the factor over every `2^order`-point subset.
pub fn capacity_exact_small(
    universe: &[f64],
    order: u32,
    budget: u64,
) -> Result<CapacityEstimate, PerronError> {
    let m = subset_size(order)?;
    if universe.len() < m {
        return Err(PerronError::UniverseTooSmall { len: universe.len(), need: m });
    }
    check_increasing(universe)?;
    let subsets = binomial(universe.len() as u64, m as u64);
    if subsets > budget as u128 {
        return Err(PerronError::BudgetExceeded { subsets, budget });
    }
    let n = universe.len();
    // one task per first element; merged in index order
    let per_first: Vec<(f64, Vec<usize>)> = (0..=n - m)
        .into_par_iter()
        .map(|first| {
            let mut e = Enumeration {
                universe,
                m,
                chosen: vec![first],
                values: vec![universe[first]],
                best_value: f64::INFINITY,
                best: Vec::new(),
            };
            e.descend(first + 1, f64::NEG_INFINITY);
            (e.best_value, e.best)
        })
        .collect();
    let (value, best) = per_first
        .into_iter()
        .fold((f64::INFINITY, Vec::new()), |acc, cur| if cur.0 < acc.0 { cur } else { acc });
    Ok(CapacityEstimate {
        order,
        exact: true,
        value,
        witness: best.iter().map(|&i| universe[i]).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStrategy {
    Greedy,
    SwapLocalSearch,
}

/// Factor of the subset given by sorted universe indices.
fn subset_factor(universe: &[f64], idx: &[usize], buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend(idx.iter().map(|&i| universe[i]));
    factor_unchecked(buf, Variant::CapacityForm).value
}

/// Greedy extension from a seed pair: each step adds the point that keeps
/// the running factor smallest, looking near the arithmetic continuation.
fn greedy_from(universe: &[f64], m: usize, first: usize, second: usize) -> Option<(f64, Vec<usize>)> {
    const WINDOW: usize = 8;
    let n = universe.len();
    let mut idx = vec![first, second];
    let mut vals = vec![universe[first], universe[second]];
    let mut running = f64::NEG_INFINITY;
    while idx.len() < m {
        let last = *idx.last().unwrap();
        let needed = m - idx.len();
        let hi_limit = n - needed; // leave room for the remaining picks
        if last + 1 > hi_limit {
            return None;
        }
        let range = if hi_limit - last <= 2 * WINDOW + 1 {
            (last + 1)..=hi_limit
        } else {
            let step = (vals[vals.len() - 1] - vals[0]) / (vals.len() - 1) as f64;
            let target = vals[vals.len() - 1] + step;
            let pos = universe.partition_point(|&x| x < target);
            let lo = pos.saturating_sub(WINDOW).max(last + 1);
            let hi = (pos + WINDOW).min(hi_limit).max(lo);
            lo..=hi
        };
        let mut pick: Option<(f64, usize)> = None;
        for c in range {
            vals.push(universe[c]);
            let v = running.max(max_terms_ending_at(&vals, vals.len()));
            vals.pop();
            if pick.is_none_or(|(pv, _)| v < pv) {
                pick = Some((v, c));
            }
        }
        let (v, c) = pick?;
        running = v;
        idx.push(c);
        vals.push(universe[c]);
    }
    Some((running, idx))
}

fn greedy_starts(n: usize, budget: u64) -> Vec<(usize, usize)> {
    let all = (n as u64) * (n as u64 - 1) / 2;
    let max_gap = if all <= budget {
        n - 1
    } else {
        ((budget / n as u64) as usize).clamp(1, n - 1)
    };
    let mut starts = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n.min(i + max_gap + 1) {
            starts.push((i, j));
        }
    }
    starts
}

/// Best-improvement swap descent from `idx`; returns the local optimum.
fn swap_descent(
    universe: &[f64],
    mut idx: Vec<usize>,
    mut value: f64,
    draws: &mut Draws,
    evals: &mut u64,
    budget: u64,
) -> (f64, Vec<usize>) {
    const FULL_NEIGHBOURHOOD: usize = 4096;
    let n = universe.len();
    let m = idx.len();
    let mut buf = Vec::with_capacity(m);
    let mut cand = idx.clone();
    loop {
        let mut improved: Option<(f64, Vec<usize>)> = None;
        let full = m * (n - m) <= FULL_NEIGHBOURHOOD;
        let moves: Vec<(usize, usize)> = if full {
            (0..m)
                .flat_map(|p| (0..n).map(move |c| (p, c)))
                .filter(|&(_, c)| idx.binary_search(&c).is_err())
                .collect()
        } else {
            (0..FULL_NEIGHBOURHOOD)
                .map(|_| (draws.below(m as u64) as usize, draws.below(n as u64) as usize))
                .filter(|&(_, c)| idx.binary_search(&c).is_err())
                .collect()
        };
        for (p, c) in moves {
            if *evals >= budget {
                break;
            }
            cand.clone_from(&idx);
            cand[p] = c;
            cand.sort_unstable();
            *evals += 1;
            let v = subset_factor(universe, &cand, &mut buf);
            let better = match &improved {
                Some((bv, _)) => v < *bv,
                None => v < value,
            };
            if better {
                improved = Some((v, cand.clone()));
            }
        }
        match improved {
            Some((v, next)) if *evals < budget => {
                value = v;
                idx = next;
            }
            Some((v, next)) => return (v, next),
            None => return (value, idx),
        }
    }
}

fn random_subset(n: usize, m: usize, draws: &mut Draws) -> Vec<usize> {
    // Floyd's sampling
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    for j in (n - m)..n {
        let t = draws.below(j as u64 + 1) as usize;
        if chosen.contains(&t) {
            chosen.push(j);
        } else {
            chosen.push(t);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Upper bound on the capacity at `order` by heuristic subset search.
///
/// `iterations` bounds the number of subset evaluations of the swap search
/// and the number of greedy seed pairs. The result is deterministic in
/// `seed` and independent of the rayon pool size.
pub fn capacity_search(
    universe: &[f64],
    order: u32,
    strategy: SearchStrategy,
    seed: u64,
    iterations: u64,
) -> Result<CapacityEstimate, PerronError> {
    let m = subset_size(order)?;
    let n = universe.len();
    if n < m {
        return Err(PerronError::UniverseTooSmall { len: n, need: m });
    }
    check_increasing(universe)?;

    let mut greedy: Vec<(f64, Vec<usize>)> = greedy_starts(n, iterations.max(1))
        .into_par_iter()
        .filter_map(|(i, j)| greedy_from(universe, m, i, j))
        .collect();
    // stable: equal values keep seed-pair order
    greedy.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut buf = Vec::with_capacity(m);
    let (mut best_value, mut best) = match greedy.first() {
        Some((_, idx)) => (subset_factor(universe, idx, &mut buf), idx.clone()),
        None => {
            let idx: Vec<usize> = (0..m).collect();
            (subset_factor(universe, &idx, &mut buf), idx)
        }
    };

    if strategy == SearchStrategy::SwapLocalSearch {
        let mut draws = Draws::new(seed);
        let mut evals = 0u64;
        let mut starts: Vec<Vec<usize>> = Vec::new();
        for (_, idx) in &greedy {
            if starts.len() == 8 {
                break;
            }
            if !starts.contains(idx) {
                starts.push(idx.clone());
            }
        }
        let mut next_start = 0;
        while evals < iterations {
            let start = if next_start < starts.len() {
                next_start += 1;
                starts[next_start - 1].clone()
            } else {
                random_subset(n, m, &mut draws)
            };
            let v0 = subset_factor(universe, &start, &mut buf);
            evals += 1;
            let (v, idx) = swap_descent(universe, start, v0, &mut draws, &mut evals, iterations);
            if v < best_value {
                best_value = v;
                best = idx;
            }
        }
    }

    Ok(CapacityEstimate {
        order,
        exact: false,
        value: best_value,
        witness: best.iter().map(|&i| universe[i]).collect(),
    })
}
