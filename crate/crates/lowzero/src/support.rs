//! Closed-form support radii implied by square-root cancellation hypotheses,
//! and the rank bounds they feed.
//!
//! A hypothesis is parametrized by (alpha, A) with alpha in [1/2, 3/4] and
//! A >= 0. The admissible total Fourier support at level n is
//!
//! ```text
//! n sigma = min{ 5/2, 2 + (6-8a)/(1+2A+4a), ..., 2 + (6-8a)/(2n-1+2A+4a) }
//! ```
//!
//! which collapses to the last entry for n >= 2. The weighted vanishing
//! percentage to order >= r follows from the 1- and 2-level supports v1, v2:
//! `P_r <= min{ (1/2 + 1/v1)/r, 1/(3 (r - 1/v2 - 1/2)^2) }`, the second
//! branch admissible only where its denominator is positive.

use crate::{Error, Result};

/// Cancellation-hypothesis parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisParams {
    pub alpha: f64,
    pub a: f64,
    pub n: u32,
}

impl HypothesisParams {
    pub fn new(alpha: f64, a: f64, n: u32) -> Result<Self> {
        if !(0.5..=0.75).contains(&alpha) {
            return Err(Error::Domain(format!(
                "alpha = {alpha} outside [1/2, 3/4]"
            )));
        }
        if !(a >= 0.0) {
            return Err(Error::Domain(format!("A = {a} must be nonnegative")));
        }
        if n == 0 {
            return Err(Error::Domain("level n must be >= 1".to_string()));
        }
        Ok(HypothesisParams { alpha, a, n })
    }
}

/// Inputs to the weighted-vanishing bound.
#[derive(Debug, Clone, Copy)]
pub struct RankBoundInput {
    /// available 1-level support
    pub v1: f64,
    /// available 2-level per-component support
    pub v2: f64,
    /// vanishing order
    pub r: u32,
}

/// Total and per-component support at a given level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportValue {
    pub total: f64,
    pub per_component: f64,
}

fn branch(alpha: f64, a: f64, j: u32) -> f64 {
    2.0 + (6.0 - 8.0 * alpha) / ((2 * j - 1) as f64 + 2.0 * a + 4.0 * alpha)
}

/// sigma = min{5/2, 2 + (6-8a)/(1+2A+4a)} for the 1-level density.
pub fn support_one_level(p: &HypothesisParams) -> Result<f64> {
    if p.n != 1 {
        return Err(Error::Domain(format!("expected n = 1, got {}", p.n)));
    }
    Ok((2.5f64).min(branch(p.alpha, p.a, 1)))
}

/// sigma_1 + sigma_2 = 2 + (6-8a)/(3+2A+4a) for the 2-level density,
/// with the equal-split per-component value.
pub fn support_two_level(p: &HypothesisParams) -> Result<SupportValue> {
    if p.n != 2 {
        return Err(Error::Domain(format!("expected n = 2, got {}", p.n)));
    }
    let total = branch(p.alpha, p.a, 2);
    Ok(SupportValue {
        total,
        per_component: total / 2.0,
    })
}

/// n-level support: the running minimum over every branch up to n, which
/// must reduce to the 1- and 2-level formulas at n = 1, 2.
pub fn support_n_level(p: &HypothesisParams) -> Result<SupportValue> {
    let mut total = 2.5f64;
    for j in 1..=p.n {
        total = total.min(branch(p.alpha, p.a, j));
    }
    Ok(SupportValue {
        total,
        per_component: total / p.n as f64,
    })
}

/// Weighted percentage of forms vanishing to order at least r.
pub fn rank_bound(input: &RankBoundInput) -> f64 {
    assert!(input.r >= 1, "order r must be >= 1");
    assert!(input.v1 > 0.0 && input.v2 > 0.0, "supports must be positive");
    let r = input.r as f64;
    let first = (0.5 + 1.0 / input.v1) / r;
    let denom_root = r - 1.0 / input.v2 - 0.5;
    if denom_root > 0.0 {
        first.min(1.0 / (3.0 * denom_root * denom_root))
    } else {
        first
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(alpha: f64, a: f64, n: u32) -> HypothesisParams {
        HypothesisParams::new(alpha, a, n).unwrap()
    }

    #[test]
    fn one_level_values() {
        assert_eq!(support_one_level(&hp(0.5, 0.0, 1)).unwrap(), 2.5);
        assert_eq!(support_one_level(&hp(0.75, 0.0, 1)).unwrap(), 2.0);
        // along the interpolation of (0.5, 0.5) and (0.55, 0) the min stays 5/2
        assert_eq!(support_one_level(&hp(0.5, 0.5, 1)).unwrap(), 2.5);
        assert_eq!(support_one_level(&hp(0.55, 0.0, 1)).unwrap(), 2.5);
    }

    #[test]
    fn two_level_values() {
        let s = support_two_level(&hp(0.5, 0.0, 2)).unwrap();
        assert!((s.total - 2.4).abs() < 1e-15);
        assert!((s.per_component - 1.2).abs() < 1e-15);
        let s = support_two_level(&hp(0.75, 3.0, 2)).unwrap();
        assert_eq!(s.total, 2.0);
        let s = support_two_level(&hp(0.5, 1.0, 2)).unwrap();
        assert!((s.total - (2.0 + 2.0 / 7.0)).abs() < 1e-15);
    }

    #[test]
    fn n_level_reduces_to_low_levels() {
        for &alpha in &[0.5, 0.55, 0.6, 0.75] {
            for &a in &[0.0, 0.25, 1.0, 4.0] {
                let one = support_one_level(&hp(alpha, a, 1)).unwrap();
                let n1 = support_n_level(&hp(alpha, a, 1)).unwrap();
                assert_eq!(one, n1.total);
                let two = support_two_level(&hp(alpha, a, 2)).unwrap();
                let n2 = support_n_level(&hp(alpha, a, 2)).unwrap();
                // the 5/2 and j=1 branches never bind at n = 2
                assert_eq!(two.total, n2.total);
                assert_eq!(n2.per_component, n2.total / 2.0);
            }
        }
        let n3 = support_n_level(&hp(0.5, 0.0, 3)).unwrap();
        assert!((n3.total - (2.0 + 2.0 / 7.0)).abs() < 1e-15);
        assert!((n3.per_component - 16.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn monotone_in_alpha_and_a() {
        let mut prev = f64::INFINITY;
        for i in 0..=10 {
            let alpha = 0.5 + 0.025 * i as f64;
            let s = support_one_level(&hp(alpha, 0.0, 1)).unwrap();
            assert!(s <= prev + 1e-15);
            prev = s;
        }
        let mut prev = f64::INFINITY;
        for i in 0..=10 {
            let a = 0.5 * i as f64;
            let s = support_one_level(&hp(0.5, a, 1)).unwrap();
            assert!(s <= prev + 1e-15);
            prev = s;
        }
    }

    #[test]
    fn rank_bound_table() {
        let expect = [0.9000, 0.4500, 0.1200, 0.0469, 0.0248];
        for (i, &e) in expect.iter().enumerate() {
            let b = rank_bound(&RankBoundInput {
                v1: 2.5,
                v2: 1.2,
                r: i as u32 + 1,
            });
            assert!(
                (b - e).abs() <= 5e-5,
                "P_{} = {b}, expected {e}",
                i + 1
            );
        }
    }

    #[test]
    fn rank_bound_branch_guard_and_monotonicity() {
        // at r = 1 with v2 = 1.2 the second branch is inadmissible
        let b1 = rank_bound(&RankBoundInput { v1: 2.5, v2: 1.2, r: 1 });
        assert!((b1 - 0.9).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for r in 1..=8 {
            let b = rank_bound(&RankBoundInput { v1: 2.5, v2: 1.2, r });
            assert!(b <= prev + 1e-15, "not monotone at r={r}");
            prev = b;
        }
    }

    #[test]
    fn domain_errors() {
        assert!(HypothesisParams::new(0.4, 0.0, 1).is_err());
        assert!(HypothesisParams::new(0.8, 0.0, 1).is_err());
        assert!(HypothesisParams::new(0.5, -0.1, 1).is_err());
        assert!(HypothesisParams::new(0.5, 0.0, 0).is_err());
    }
}
