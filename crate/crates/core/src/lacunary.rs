//! Lacunary sequences and certificates of finite lacunary order.
//!
//! Only verification is offered. A finite set is trivially lacunary of
//! order 1, so searching for certificates of finite truncations would say
//! nothing about the infinite sets they come from.
//!
//! A certificate of order at most `N ≥ 1` carries a limit `ℓ`, a ratio
//! `λ ∈ (0, 1)`, a skeleton sequence (in sequence order, converging toward
//! `ℓ`) and one child per gap. Gaps are the open intervals between
//! consecutive points of `sorted(skeleton ∪ {ℓ})`, in increasing order. A
//! point of the set must either sit on the skeleton (or the limit) or fall in
//! a gap; the child for that gap must certify the points inside it at order
//! `N − 1`. The leaf certificate `{}` certifies sets with at most one point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LacunaryError {
    #[error("lambda {0} is outside (0, 1)")]
    LambdaOutOfRange(f64),
    #[error("sequence is empty")]
    EmptySequence,
    #[error("certificate nests deeper than the claimed order {0}")]
    DepthMismatch(u32),
    #[error("certificate node has a skeleton but no limit or lambda")]
    MissingParameters,
    #[error("certificate lists {got} children for {expected} gaps")]
    ChildCount { expected: usize, got: usize },
    #[error("point {0} is not covered by the skeleton hull")]
    UncoveredPoint(f64),
    #[error("non-finite value {0} in certificate or set")]
    NonFinite(f64),
    #[error("invalid certificate json: {0}")]
    Json(String),
}

/// True iff `|ℓ − s_{k+1}| ≤ λ |ℓ − s_k|` for every consecutive pair.
pub fn is_lacunary_sequence(seq: &[f64], limit: f64, lambda: f64) -> Result<bool, LacunaryError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(LacunaryError::LambdaOutOfRange(lambda));
    }
    if seq.is_empty() {
        return Err(LacunaryError::EmptySequence);
    }
    Ok(seq
        .windows(2)
        .all(|w| (limit - w[1]).abs() <= lambda * (limit - w[0]).abs()))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LacunaryCertificate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub skeleton: Vec<f64>,
    #[serde(default)]
    pub children: Vec<LacunaryCertificate>,
}

impl LacunaryCertificate {
    /// The order-0 certificate.
    pub fn leaf() -> Self {
        Self::default()
    }

    pub fn node(limit: f64, lambda: f64, skeleton: Vec<f64>, children: Vec<LacunaryCertificate>) -> Self {
        Self { limit: Some(limit), lambda: Some(lambda), skeleton, children }
    }

    pub fn from_json(text: &str) -> Result<Self, LacunaryError> {
        serde_json::from_str(text).map_err(|e| LacunaryError::Json(e.to_string()))
    }

    pub fn is_leaf(&self) -> bool {
        self.skeleton.is_empty() && self.children.is_empty()
    }

    /// Nesting depth: 0 for a leaf.
    pub fn depth(&self) -> u32 {
        if self.is_leaf() {
            0
        } else {
            1 + self.children.iter().map(Self::depth).max().unwrap_or(0)
        }
    }

    /// Gap endpoints `sorted(skeleton ∪ {ℓ})`, duplicates removed.
    pub fn gap_points(&self) -> Vec<f64> {
        let mut pts = self.skeleton.clone();
        pts.extend(self.limit);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// Splits `omega` into the points inside each open gap of `points`.
///
/// Points equal to a gap endpoint are dropped (they lie on the skeleton).
/// Returns the first point outside `[points[0], points[last]]` as an error.
pub fn partition_into_gaps(omega: &[f64], points: &[f64]) -> Result<Vec<Vec<f64>>, LacunaryError> {
    let gaps = points.len().saturating_sub(1);
    let mut out = vec![Vec::new(); gaps];
    for &x in omega {
        if points.binary_search_by(|p| p.total_cmp(&x)).is_ok() {
            continue;
        }
        let pos = points.partition_point(|&p| p < x);
        if pos == 0 || pos == points.len() {
            return Err(LacunaryError::UncoveredPoint(x));
        }
        out[pos - 1].push(x);
    }
    Ok(out)
}

/// Checks whether `cert` witnesses that `omega` is lacunary of order at most `order`.
///
/// Structural problems (depth beyond `order`, wrong child count, missing
/// parameters, points outside the skeleton hull) are errors; a well-formed
/// certificate whose skeleton is not lacunary or whose leaves hold more than
/// one point yields `Ok(false)`.
pub fn verify_order_certificate(
    omega: &[f64],
    cert: &LacunaryCertificate,
    order: u32,
) -> Result<bool, LacunaryError> {
    if let Some(&x) = omega.iter().find(|x| !x.is_finite()) {
        return Err(LacunaryError::NonFinite(x));
    }
    let mut points = omega.to_vec();
    points.sort_by(f64::total_cmp);
    points.dedup();
    verify_node(&points, cert, order)
}

fn verify_node(omega: &[f64], cert: &LacunaryCertificate, order: u32) -> Result<bool, LacunaryError> {
    if cert.is_leaf() {
        return Ok(omega.len() <= 1);
    }
    if order == 0 {
        return Err(LacunaryError::DepthMismatch(order));
    }
    let (Some(limit), Some(lambda)) = (cert.limit, cert.lambda) else {
        return Err(LacunaryError::MissingParameters);
    };
    if let Some(&x) = cert.skeleton.iter().chain([&limit]).find(|x| !x.is_finite()) {
        return Err(LacunaryError::NonFinite(x));
    }
    let gaps = cert.gap_points();
    let expected = gaps.len().saturating_sub(1);
    if cert.children.len() != expected {
        return Err(LacunaryError::ChildCount { expected, got: cert.children.len() });
    }
    let parts = partition_into_gaps(omega, &gaps)?;
    let mut ok = if cert.skeleton.is_empty() {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(LacunaryError::LambdaOutOfRange(lambda));
        }
        true
    } else {
        is_lacunary_sequence(&cert.skeleton, limit, lambda)?
    };
    // keep walking after a failure so structural errors deeper down still surface
    for (part, child) in parts.iter().zip(&cert.children) {
        ok &= verify_node(part, child, order - 1)?;
    }
    Ok(ok)
}

/// The trivial order-1 certificate of a finite set: the set itself,
/// ascending toward its maximum.
pub fn trivial_certificate(omega: &[f64]) -> LacunaryCertificate {
    let mut pts = omega.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    match pts.last().copied() {
        None => LacunaryCertificate::leaf(),
        Some(max) if pts.len() == 1 => LacunaryCertificate::node(max, 0.5, pts, Vec::new()),
        Some(max) => {
            let ratio = pts
                .windows(2)
                .map(|w| (max - w[1]) / (max - w[0]))
                .fold(0.0, f64::max);
            let lambda = if ratio > 0.0 { ratio } else { 0.5 };
            let gaps = pts.len() - 1;
            LacunaryCertificate::node(max, lambda, pts, vec![LacunaryCertificate::leaf(); gaps])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dyadic_and_factorial_sequences_are_lacunary() {
        let dyadic: Vec<f64> = (2..=10).map(|k| 0.5f64.powi(k)).collect();
        assert!(is_lacunary_sequence(&dyadic, 0.0, 0.5).unwrap());
        let mut fact = 1.0f64;
        let mut inv_fact = Vec::new();
        for k in 1..=9u32 {
            fact *= k as f64;
            if k >= 4 {
                inv_fact.push(1.0 / fact);
            }
        }
        assert!(is_lacunary_sequence(&inv_fact, 0.0, 0.5).unwrap());
        assert!(!is_lacunary_sequence(&[1.0, 0.9, 0.85], 0.0, 0.5).unwrap());
    }

    #[test]
    fn lambda_must_be_in_open_unit_interval() {
        assert_eq!(
            is_lacunary_sequence(&[1.0], 0.0, 1.0),
            Err(LacunaryError::LambdaOutOfRange(1.0))
        );
        assert!(is_lacunary_sequence(&[1.0], 0.0, 0.0).is_err());
        assert_eq!(is_lacunary_sequence(&[], 0.0, 0.5), Err(LacunaryError::EmptySequence));
    }

    #[test]
    fn singleton_and_empty_sets_are_order_zero() {
        let leaf = LacunaryCertificate::leaf();
        assert!(verify_order_certificate(&[0.3], &leaf, 0).unwrap());
        assert!(verify_order_certificate(&[], &leaf, 0).unwrap());
        assert!(!verify_order_certificate(&[0.3, 0.4], &leaf, 0).unwrap());
    }

    /// `{π/2^k + π/4^l : 1 ≤ l ≤ k ≤ 6}` with a dyadic top skeleton and
    /// trivial per-gap certificates.
    fn two_scale_set() -> (Vec<f64>, LacunaryCertificate) {
        let mut omega = Vec::new();
        for k in 1..=6 {
            for l in 1..=k {
                omega.push(PI / 2f64.powi(k) + PI / 4f64.powi(l));
            }
        }
        let skeleton: Vec<f64> = (-1..=7).map(|k| PI / 2f64.powi(k)).collect();
        let top = LacunaryCertificate::node(0.0, 0.5, skeleton, Vec::new());
        let parts = partition_into_gaps(&omega, &top.gap_points()).unwrap();
        let children = parts.iter().map(|p| trivial_certificate(p)).collect();
        (omega, LacunaryCertificate { children, ..top })
    }

    #[test]
    fn two_scale_set_is_order_two() {
        let (omega, cert) = two_scale_set();
        assert_eq!(cert.depth(), 2);
        assert!(verify_order_certificate(&omega, &cert, 2).unwrap());
        // padding the claimed order keeps it valid
        assert!(verify_order_certificate(&omega, &cert, 5).unwrap());
        assert_eq!(
            verify_order_certificate(&omega, &cert, 1),
            Err(LacunaryError::DepthMismatch(0))
        );
    }

    #[test]
    fn two_scale_set_fails_with_flat_children() {
        let (omega, cert) = two_scale_set();
        let flat = LacunaryCertificate {
            children: vec![LacunaryCertificate::leaf(); cert.children.len()],
            ..cert
        };
        assert!(!verify_order_certificate(&omega, &flat, 1).unwrap());
    }

    #[test]
    fn arithmetic_set_rejects_half_ratio_skeleton() {
        let omega = [1.0, 2.0, 3.0, 4.0];
        // every point on the skeleton, converging up to 5
        let cert = LacunaryCertificate::node(5.0, 0.5, omega.to_vec(), vec![LacunaryCertificate::leaf(); 4]);
        assert!(!verify_order_certificate(&omega, &cert, 1).unwrap());
        // converging down to 0 the distances grow
        let down = LacunaryCertificate::node(0.0, 0.5, vec![4.0, 3.0, 2.0, 1.0], vec![LacunaryCertificate::leaf(); 4]);
        assert!(!verify_order_certificate(&omega, &down, 1).unwrap());
    }

    #[test]
    fn trivial_certificate_always_verifies() {
        let omega = [1.0, 2.0, 3.0, 4.0, 10.0, -3.0];
        let cert = trivial_certificate(&omega);
        assert!(verify_order_certificate(&omega, &cert, 1).unwrap());
    }

    #[test]
    fn structural_errors() {
        let cert = LacunaryCertificate::node(0.0, 0.5, vec![1.0, 0.5], vec![]);
        assert_eq!(
            verify_order_certificate(&[0.7], &cert, 1),
            Err(LacunaryError::ChildCount { expected: 2, got: 0 })
        );
        let cert = LacunaryCertificate::node(0.0, 0.5, vec![1.0, 0.5], vec![LacunaryCertificate::leaf(); 2]);
        assert_eq!(
            verify_order_certificate(&[2.0], &cert, 1),
            Err(LacunaryError::UncoveredPoint(2.0))
        );
        let missing = LacunaryCertificate { skeleton: vec![1.0], ..Default::default() };
        assert_eq!(verify_order_certificate(&[1.0], &missing, 1), Err(LacunaryError::MissingParameters));
    }

    #[test]
    fn json_shape() {
        let cert = LacunaryCertificate::from_json(
            r#"{"limit":0.0,"lambda":0.5,"skeleton":[1.0,0.5],"children":[{},{}]}"#,
        )
        .unwrap();
        assert!(verify_order_certificate(&[0.25, 0.75], &cert, 1).unwrap());
        assert_eq!(LacunaryCertificate::from_json("{}").unwrap(), LacunaryCertificate::leaf());
        assert!(LacunaryCertificate::from_json("[").is_err());
    }
}
