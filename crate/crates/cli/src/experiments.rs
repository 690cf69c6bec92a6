//! One function per command. Each turns a resolved configuration into
//! checks, a JSON payload and optional artifacts.

use std::f64::consts::PI;

use perron::directionsets::{generate, invert, DirectionSample, GeneratorSpec};
use perron::figures;
use perron::kakeya::{
    discrete_max_op, perron_tree, spread_directions, translate_along_length, union_measure, blow_ratio,
    OrientedRectangle, RasterGrid, ScaleBounds, ANCHOR_OFFSETS, SPROUT_RATIO,
};
use perron::lacunary::{trivial_certificate, verify_order_certificate};
use perron::perron::{
    binomial, capacity_exact_small, capacity_search, perron_factor, DEFAULT_ENUMERATION_BUDGET,
};
use perron::probability::{
    eta, homogeneous_inclusion_prob, mc_event_a, mc_inclusion, mc_p, p_analytic, schedule, ScheduleKind,
    SIGMA_BAND,
};
use perron::stream::{Draws, RandomStream};
use perron::witnesses::{
    perturbed_homogeneous, t1_witness_search, t2_witness_search, HomogeneousSpec, Perturbation, WitnessReport,
};
use perron::{Generator, Variant};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{CommandId, RunConfig};
use crate::report::{sig17, CheckRow};
use crate::CliError;

/// Everything a command produces besides timing.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<CheckRow>,
    pub data: Value,
    /// Human-readable result lines printed before the check summary.
    pub headline: Vec<String>,
    pub artifacts: Artifacts,
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Artifacts {
    pub sample_csv: Option<String>,
    pub svg: Option<String>,
    pub pgm: Option<Vec<u8>>,
}

fn bad(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command()? {
        CommandId::Gen => gen(cfg),
        CommandId::Factor => factor(cfg),
        CommandId::Capacity => capacity(cfg),
        CommandId::WitnessT1 => witness_t1(cfg),
        CommandId::WitnessT2 => witness_t2(cfg),
        CommandId::VerifyProb => verify_prob(cfg),
        CommandId::VerifyP5 => verify_p5(cfg),
        CommandId::VerifySpacing => verify_spacing(cfg),
        CommandId::Blow => blow(cfg),
        CommandId::Maxop => maxop(cfg),
        CommandId::CertifyLacunary => certify_lacunary(cfg),
    }
}

fn sample(cfg: &RunConfig) -> Result<DirectionSample, CliError> {
    let g = cfg.need(&cfg.generator, "generator")?;
    let spec = GeneratorSpec {
        gen: g.gen.ok_or_else(|| bad("missing `generator.gen`"))?,
        count: g.count.ok_or_else(|| bad("missing `generator.count`"))?,
        seed: g.seed,
    };
    generate(&spec).map_err(bad)
}

/// Explicit values, or the inverse set of the generated sample.
fn universe(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    match &cfg.values {
        Some(v) => Ok(v.clone()),
        None => Ok(invert(&sample(cfg)?).map_err(bad)?.into_values()),
    }
}

fn witness_checks(rep: &WitnessReport) -> Vec<CheckRow> {
    let mut out = vec![CheckRow::new("found", None, None, None, rep.found)];
    out.extend(rep.checks.iter().map(|c| {
        let row = CheckRow::new(c.name.clone(), None, c.value, None, c.passed);
        if c.informational {
            row.informational()
        } else {
            row
        }
    }));
    out
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("payload serialises")
}

fn gen(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s = sample(cfg)?;
    let count = cfg.generator.as_ref().and_then(|g| g.count).unwrap_or(0);
    let gen: Generator = s.provenance.gen.parse().map_err(bad)?;
    let mut checks = vec![CheckRow::new("count", Some(count as f64), Some(s.len() as f64), Some(0.0), s.len() as u64 == count)];
    if gen.is_random() {
        let envelope = |k: u64| match gen {
            Generator::RandLin => PI / k as f64,
            _ => PI * 2f64.powi(-(k.min(2000) as i32)),
        };
        let inside = s.directions.iter().all(|d| d.angle() <= envelope(d.index));
        checks.push(CheckRow::new("within_envelope", None, None, None, inside));
    }
    let csv = s.to_csv();
    Ok(Outcome {
        checks,
        headline: csv.lines().map(str::to_string).collect(),
        artifacts: Artifacts {
            svg: Some(figures::direction_scatter(&s.angles())),
            sample_csv: Some(csv),
            pgm: None,
        },
        data: json!({ "sample": to_value(&s) }),
    })
}

fn factor(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let u = universe(cfg)?;
    let variant = cfg.variant.unwrap_or(Variant::CapacityForm);
    let t = perron_factor(&u, variant).map_err(bad)?;
    Ok(Outcome {
        checks: vec![CheckRow::new("g_at_least_2", Some(2.0), Some(t.value), None, t.value >= 2.0)],
        headline: vec![sig17(t.value)],
        data: json!({ "g": t.value, "k": t.k, "l": t.l, "variant": to_value(&variant), "values": u }),
        artifacts: Artifacts::default(),
    })
}

fn capacity(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let u = universe(cfg)?;
    let order = cfg.need(&cfg.order, "N")?;
    let strategy = cfg.need(&cfg.strategy, "strategy")?;
    let seed = cfg.need(&cfg.seed, "seed")?;
    let iterations = cfg.need(&cfg.iterations, "iterations")?;
    let est = capacity_search(&u, order, strategy, seed, iterations).map_err(bad)?;
    let mut checks = vec![CheckRow::new("value_at_least_2", Some(2.0), Some(est.value), None, est.value >= 2.0)];
    let feasible = binomial(u.len() as u64, 1u64 << order) <= DEFAULT_ENUMERATION_BUDGET as u128;
    let exact = match cfg.exact {
        Some(true) => Some(capacity_exact_small(&u, order, DEFAULT_ENUMERATION_BUDGET).map_err(bad)?),
        Some(false) => None,
        None if feasible => Some(capacity_exact_small(&u, order, DEFAULT_ENUMERATION_BUDGET).map_err(bad)?),
        None => None,
    };
    if let Some(ex) = &exact {
        checks.push(CheckRow::new(
            "search_matches_exact",
            Some(ex.value),
            Some(est.value),
            Some(0.0),
            est.value == ex.value,
        ));
    }
    Ok(Outcome {
        checks,
        headline: vec![format!("P_N <= {}", sig17(est.value))],
        data: json!({ "search": to_value(&est), "exact": to_value(&exact) }),
        artifacts: Artifacts::default(),
    })
}

fn witness_t1(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let order = cfg.need(&cfg.order, "N")?;
    let seed = cfg.need(&cfg.seed, "seed")?;
    let a_max = cfg.need(&cfg.a_max, "a_max")?;
    let rep = t1_witness_search(&RandomStream::new(seed), order, a_max, Some(seed)).map_err(bad)?;
    let mut rows: Vec<u64> = schedule(ScheduleKind::Multiplier, order, 3).unwrap_or_default();
    rows.extend(rep.a);
    let headline = match (rep.found, rep.a, rep.g_value) {
        (true, Some(a), Some(g)) => vec![format!("a = {a}, G = {}", sig17(g))],
        _ => vec![format!("no witness up to a = {a_max}")],
    };
    Ok(Outcome {
        checks: witness_checks(&rep),
        headline,
        artifacts: Artifacts { svg: Some(figures::schedule_figure(order, &rows)), ..Default::default() },
        data: to_value(&rep),
    })
}

fn witness_t2(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let order = cfg.need(&cfg.order, "N")?;
    let seed = cfg.need(&cfg.seed, "seed")?;
    let d_max = cfg.need(&cfg.d_max, "d_max")?;
    let stream = RandomStream::new(seed);
    let rep = t2_witness_search(&stream, order, d_max, Some(seed)).map_err(bad)?;
    let mut checks = witness_checks(&rep);
    let mut data = json!({ "witness": to_value(&rep) });
    if let Some([lo, hi]) = cfg.d_range {
        let est = mc_event_a(&stream, 1, lo, hi).map_err(bad)?;
        let target = eta(1).map_err(bad)?;
        let floor = target - SIGMA_BAND * est.stderr;
        checks.push(
            CheckRow::new("event_a_order1_frequency", Some(target), Some(est.frequency), Some(SIGMA_BAND * est.stderr), est.frequency >= floor)
                .with_stderr(est.stderr),
        );
        data["event_a"] = json!({ "N": 1, "d_range": [lo, hi], "estimate": to_value(&est) });
    }
    let headline = match rep.d {
        Some(d) if rep.found => vec![format!("filled dyadic interval at d = {d}")],
        _ => vec![format!("no filled dyadic interval up to d = {d_max}")],
    };
    Ok(Outcome {
        checks,
        headline,
        artifacts: Artifacts {
            svg: Some(figures::dyadic_filling(order, &rep.filling, &rep.witness)),
            ..Default::default()
        },
        data,
    })
}

fn verify_prob(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let order = cfg.need(&cfg.order, "N")?;
    let seed = cfg.need(&cfg.seed, "seed")?;
    let trials = cfg.need(&cfg.trials, "trials")?;
    let ds = cfg.need(&cfg.d_values, "d_values")?;
    if order > 20 {
        return Err(bad("`N` above 20 has too many subintervals to sample"));
    }
    let m = 1u64 << order;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for l in 1..=m {
        let p = p_analytic(order, l).map_err(bad)?;
        let mut per_d = Vec::new();
        for &d in &ds {
            let est = mc_p(order, l, trials, seed, d).map_err(bad)?;
            let sigma = est.sigma_at(p);
            checks.push(
                CheckRow::new(format!("p_N{order}_l{l}_d{d}"), Some(p), Some(est.frequency), Some(SIGMA_BAND * sigma), est.within(p, SIGMA_BAND))
                    .with_stderr(sigma),
            );
            rows.push(json!({ "l": l, "d": d, "analytic": p, "estimate": to_value(&est) }));
            per_d.push(est);
        }
        if let [a, b, ..] = per_d[..] {
            let diff = a.frequency - b.frequency;
            let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
            checks.push(
                CheckRow::new(format!("d_independence_l{l}"), Some(0.0), Some(diff), Some(SIGMA_BAND * se), diff.abs() <= SIGMA_BAND * se)
                    .with_stderr(se),
            );
        }
    }
    let q = homogeneous_inclusion_prob(order).map_err(bad)?;
    let inc = mc_inclusion(order, trials, seed).map_err(bad)?;
    let sigma = inc.sigma_at(q);
    checks.push(
        CheckRow::new(format!("inclusion_N{order}"), Some(q), Some(inc.frequency), Some(SIGMA_BAND * sigma), inc.within(q, SIGMA_BAND))
            .with_stderr(sigma),
    );
    Ok(Outcome {
        checks,
        headline: vec![format!("{trials} trials per estimate")],
        data: json!({ "p": rows, "inclusion": { "analytic": q, "estimate": to_value(&inc) } }),
        artifacts: Artifacts::default(),
    })
}

/// Largest factor over seeded trials; `None` when sets have fewer than three points.
fn max_factor<F>(seed: u64, trials: u64, sample: F) -> Result<Option<f64>, CliError>
where
    F: Fn(&mut Draws) -> Result<Vec<f64>, CliError> + Sync,
{
    let root = RandomStream::new(seed);
    let values: Vec<Option<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut draws = Draws::new(root.substream(t).seed());
            let u = sample(&mut draws)?;
            if u.len() < 3 {
                return Ok(None);
            }
            Ok(Some(perron_factor(&u, Variant::CapacityForm).map_err(bad)?.value))
        })
        .collect::<Result<_, CliError>>()?;
    Ok(values.into_iter().flatten().reduce(f64::max))
}

/// `bound` is strict unless `slack` is given; the sharp bound `10/3` always
/// carries a `1e-9` slack.
fn bound_checks(max: Option<f64>, name: &str, bound: f64, slack: Option<f64>) -> Vec<CheckRow> {
    // a set without admissible pairs satisfies every bound vacuously
    let g = max.unwrap_or(f64::NEG_INFINITY);
    let sharp = 10.0 / 3.0;
    let ok = match slack {
        Some(s) => g <= bound + s,
        None => g < bound,
    };
    vec![
        CheckRow::new(name, Some(bound), max, slack, ok),
        CheckRow::new("g_at_most_10_3", Some(sharp), max, Some(1e-9), g <= sharp + 1e-9),
    ]
}

fn verify_p5(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let order = cfg.need(&cfg.order, "N")?;
    let seed = cfg.need(&cfg.seed, "seed")?;
    let trials = cfg.need(&cfg.trials, "trials")?;
    if !(1..=20).contains(&order) {
        return Err(bad("`N` must lie in 1..=20"));
    }
    let m = 1usize << order;
    // 2^N ‖ε‖∞ ≤ 1/2 with every ε(k) > 0
    let cap = 0.5 / m as f64;
    let max = max_factor(seed, trials, |d| {
        let a = 1 + d.below(1_000_000);
        let eps: Vec<f64> = (0..m).map(|_| cap * d.next_f64()).collect();
        let p = Perturbation::new(eps).map_err(bad)?;
        Ok(perturbed_homogeneous(HomogeneousSpec { a, order }, &p).map_err(bad)?.into_values())
    })?;
    Ok(Outcome {
        checks: bound_checks(max, "g_below_6", 6.0, None),
        headline: vec![match max {
            Some(g) => format!("max G = {}", sig17(g)),
            None => "sets of two points: G is vacuous".to_string(),
        }],
        data: json!({ "N": order, "trials": trials, "eps_cap": cap, "max_g": max, "vacuous": max.is_none() }),
        artifacts: Artifacts::default(),
    })
}

fn verify_spacing(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let order = cfg.need(&cfg.order, "N")?;
    let seed = cfg.need(&cfg.seed, "seed")?;
    let trials = cfg.need(&cfg.trials, "trials")?;
    if !(1..=20).contains(&order) {
        return Err(bad("`N` must lie in 1..=20"));
    }
    let m = 1usize << order;
    // δ = 1; the factor is scale invariant
    let max = max_factor(seed, trials, |d| {
        let mut acc = 0.0;
        Ok((0..m)
            .map(|i| {
                if i > 0 {
                    acc += 1.0 + 2.0 * d.next_f64();
                }
                acc
            })
            .collect())
    })?;
    Ok(Outcome {
        checks: bound_checks(max, "g_at_most_6", 6.0, Some(1e-9)),
        headline: vec![match max {
            Some(g) => format!("max G = {}", sig17(g)),
            None => "sets of two points: G is vacuous".to_string(),
        }],
        data: json!({ "N": order, "trials": trials, "points": m, "max_g": max, "vacuous": max.is_none() }),
        artifacts: Artifacts::default(),
    })
}

/// Perron tree over `2^j` equally spread directions with unit length and
/// aspect `2^{j+1}`, so the total base width does not depend on `j`.
pub fn standard_tree(j: u32, spread: f64) -> Result<(Vec<f64>, Vec<OrientedRectangle>), CliError> {
    if j > 12 {
        return Err(bad("`j` above 12 is not supported"));
    }
    let n = 1usize << j;
    let dirs = spread_directions(n, spread);
    let tree = perron_tree(&dirs, 1.0, (2 * n) as f64).map_err(bad)?;
    Ok((dirs, tree))
}

fn blow(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let j_max = cfg.need(&cfg.j_max, "j_max")?;
    let j_fig = cfg.need(&cfg.j, "j")?;
    let res = cfg.need(&cfg.resolution, "resolution")?;
    let spread = cfg.need(&cfg.spread, "spread")?;
    let mut rows = Vec::new();
    let mut measures: Vec<(u32, f64, f64)> = Vec::new();
    for j in 0..=j_max {
        let (_, tree) = standard_tree(j, spread)?;
        let moved: Vec<_> = tree.iter().map(translate_along_length).collect();
        let grid = RasterGrid::covering(&[&tree, &moved], 0.05, res).map_err(bad)?;
        let area = union_measure(&tree, &grid).map_err(bad)?;
        let ratio = blow_ratio(&tree, &grid).map_err(bad)?;
        rows.push(json!({ "J": j, "union_area": area, "blow_ratio": ratio, "cols": grid.cols, "rows": grid.rows }));
        measures.push((j, area, ratio));
    }
    let mut checks = Vec::new();
    for w in measures.windows(2).filter(|w| w[0].0 >= 1) {
        let (j, a0, r0, a1, r1) = (w[1].0, w[0].1, w[0].2, w[1].1, w[1].2);
        let drop = (a0 - a1) / a0;
        let rise = (r1 - r0) / r0;
        checks.push(CheckRow::new(format!("area_drop_J{j}"), Some(0.02), Some(drop), None, drop >= 0.02));
        checks.push(CheckRow::new(format!("blow_rise_J{j}"), Some(0.02), Some(rise), None, rise >= 0.02));
    }
    let (_, tree) = standard_tree(j_fig, spread)?;
    let moved: Vec<_> = tree.iter().map(translate_along_length).collect();
    let mut grid = RasterGrid::covering(&[&tree, &moved], 0.05, res).map_err(bad)?;
    grid.paint(&tree).map_err(bad)?;
    Ok(Outcome {
        checks,
        headline: measures
            .iter()
            .map(|(j, a, r)| format!("J={j} union={} blow={}", sig17(*a), sig17(*r)))
            .collect(),
        data: json!({ "resolution": res, "spread": spread, "sprout_ratio": SPROUT_RATIO, "families": rows }),
        artifacts: Artifacts {
            svg: Some(figures::rectangle_overlay(&tree, &moved)),
            pgm: Some(grid.to_pgm()),
            sample_csv: None,
        },
    })
}

fn maxop(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let j = cfg.need(&cfg.j, "j")?;
    let res = cfg.need(&cfg.resolution, "resolution")?;
    let spread = cfg.need(&cfg.spread, "spread")?;
    let level = cfg.need(&cfg.level, "level")?;
    let fraction = cfg.need(&cfg.fraction, "fraction")?;
    let (dirs, tree) = standard_tree(j, spread)?;
    let moved: Vec<_> = tree.iter().map(translate_along_length).collect();
    let grid = RasterGrid::covering(&[&tree, &moved], 0.05, res).map_err(bad)?;
    let mut mask = grid.cleared();
    mask.paint(&tree).map_err(bad)?;
    let mut target = grid.cleared();
    target.paint(&moved).map_err(bad)?;
    // R ∪ TR is a rectangle of twice the length in the same direction
    let (length, width) = (tree[0].length, tree[0].width);
    let scales = ScaleBounds { min_length: length, max_length: 2.0 * length, aspects: vec![2.0 * length / width] };
    let field = discrete_max_op(&mask, &dirs, &scales).map_err(bad)?;
    let observed = field.fraction_at_least(&target, level).map_err(bad)?;
    Ok(Outcome {
        checks: vec![CheckRow::new("inclusion_fraction", Some(fraction), Some(observed), None, observed >= fraction)],
        headline: vec![format!("fraction of translated union with field >= {}: {}", sig17(level), sig17(observed))],
        data: json!({
            "J": j,
            "resolution": res,
            "level": level,
            "fraction": observed,
            "lengths": field.lengths,
            "aspects": field.aspects,
            "anchor_offsets_per_axis": ANCHOR_OFFSETS,
            "cols": field.cols,
            "rows": field.rows,
        }),
        artifacts: Artifacts {
            svg: Some(figures::level_set_overlay(&field, &grid, 0.5, &moved)),
            pgm: Some(field.to_pgm()),
            sample_csv: None,
        },
    })
}

fn certify_lacunary(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let omega = match &cfg.values {
        Some(v) => v.clone(),
        None => sample(cfg)?.angles(),
    };
    let cert = cfg.certificate.clone().unwrap_or_else(|| trivial_certificate(&omega));
    let order = cfg.lacunary_order.unwrap_or_else(|| cert.depth().max(1));
    let (valid, error) = match verify_order_certificate(&omega, &cert, order) {
        Ok(v) => (v, None),
        Err(e) => (false, Some(e.to_string())),
    };
    Ok(Outcome {
        checks: vec![CheckRow::new("certificate_valid", None, None, None, valid)],
        headline: vec![format!("order {order} certificate {}", if valid { "verified" } else { "rejected" })],
        data: json!({ "points": omega.len(), "order": order, "depth": cert.depth(), "valid": valid, "error": error }),
        artifacts: Artifacts::default(),
    })
}
