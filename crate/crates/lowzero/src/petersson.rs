//! The Petersson trace Delta_k(m,n) from its Bessel-Kloosterman expansion,
//! and the h-weighted trace averages that drive the density statistics.
//!
//! ```text
//! Delta_k(m,n) = delta(m,n) + 2 pi i^k sum_{c>=1} S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c)
//! ```
//!
//! Truncation is certified: with Weil's bound d(c) sqrt(c) sqrt(gcd) and the
//! global envelope |J_nu(x)| <= (x/2)^nu / nu!, the tail beyond C is at most
//!
//! ```text
//! 4 pi sqrt(gcd(m,n)) (2 pi sqrt(mn))^{k-1} / (k-1)!  *  C^{-(k-2)} / (k-2)
//! ```
//!
//! evaluated in log space. A trace is only returned when that bound sits
//! below the requested tolerance; otherwise the caller is told to raise
//! c_max.

use crate::bessel::{bessel_j, bessel_j_many};
use crate::dd::unit_phase;
use crate::kloosterman::{kloosterman, kloosterman_row, weil_bound};
use crate::weight::{HslashEvaluator, WeightFunction, ZETA8_BAR};
use crate::{Error, Result};
use std::f64::consts::PI;

/// One Petersson trace evaluation request.
#[derive(Debug, Clone, Copy)]
pub struct TraceRequest {
    pub m: u64,
    pub n: u64,
    /// even weight >= 4
    pub k: u32,
    /// hard cap on the modulus series
    pub c_max: u64,
    /// certified absolute tolerance for the truncated tail
    pub tol: f64,
}

/// A certified trace value.
#[derive(Debug, Clone, Copy)]
pub struct TraceValue {
    pub value: f64,
    /// rigorous bound on the dropped tail
    pub tail_bound: f64,
    /// last modulus actually summed
    pub c_used: u64,
}

/// An h-weighted trace sum with its aggregated certification.
#[derive(Debug, Clone, Copy)]
pub struct WeightedTrace {
    pub value: f64,
    pub tail_bound: f64,
    pub c_used: u64,
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n as u64).map(|i| (i as f64).ln()).sum()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// log of the certified tail beyond modulus C.
fn ln_tail(m: u64, n: u64, k: u32, c: f64) -> f64 {
    let g = gcd(m, n) as f64;
    let x_half = 2.0 * PI * ((m as f64) * (n as f64)).sqrt(); // (x/2) at c = 1
    (4.0 * PI).ln() + 0.5 * g.ln() + (k as f64 - 1.0) * x_half.ln()
        - ln_factorial(k - 1)
        - (k as f64 - 2.0) * c.ln()
        - (k as f64 - 2.0).ln()
}

/// Smallest C <= c_max whose certified tail is below tol.
fn certify_c(m: u64, n: u64, k: u32, c_max: u64, tol: f64) -> Result<u64> {
    assert!(tol > 0.0, "tolerance must be positive");
    assert!(k >= 4 && k % 2 == 0, "weight must be even and >= 4");
    let ln_tol = tol.ln();
    if ln_tail(m, n, k, c_max as f64) > ln_tol {
        return Err(Error::Truncation {
            bound: ln_tail(m, n, k, c_max as f64).exp(),
            tol,
        });
    }
    let (mut lo, mut hi) = (1u64, c_max);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if ln_tail(m, n, k, mid as f64) <= ln_tol {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

#[inline]
fn i_pow_even(k: u32) -> f64 {
    // i^k for even k
    if k % 4 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Delta_k(m,n) with a certified tail <= req.tol.
pub fn trace_delta(req: &TraceRequest) -> Result<TraceValue> {
    let c_stop = certify_c(req.m, req.n, req.k, req.c_max, req.tol)?;
    let row: Vec<f64> = kloosterman_row(req.m as i64, req.n as i64, c_stop);
    trace_delta_with_row(req, &row)
}

/// Same, with a caller-supplied Kloosterman row (row[c-1] = S(m,n;c)); the
/// row length caps the series.
pub fn trace_delta_with_row(req: &TraceRequest, row: &[f64]) -> Result<TraceValue> {
    let c_cap = req.c_max.min(row.len() as u64);
    let c_stop = certify_c(req.m, req.n, req.k, c_cap, req.tol)?;
    let x = 4.0 * PI * ((req.m as f64) * (req.n as f64)).sqrt();
    let sign = i_pow_even(req.k);
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for c in 1..=c_stop {
        let term = row[(c - 1) as usize] / (c as f64) * bessel_j(req.k - 1, x / c as f64);
        let t = acc + term;
        if acc.abs() >= term.abs() {
            comp += (acc - t) + term;
        } else {
            comp += (term - t) + acc;
        }
        acc = t;
    }
    let series = acc + comp;
    let delta = if req.m == req.n { 1.0 } else { 0.0 };
    Ok(TraceValue {
        value: delta + 2.0 * PI * sign * series,
        tail_bound: ln_tail(req.m, req.n, req.k, c_stop as f64).exp(),
        c_used: c_stop,
    })
}

/// The h-weighted trace sum over even k, each weighted by an extra factor
/// g(k):
/// `sum over even k of 2 h((k-1)/K) g(k) Delta_k(m,n)`.
/// Composed from per-k certified traces sharing one Kloosterman row.
pub fn weighted_trace_with<G: Fn(u32) -> f64>(
    m: u64,
    n: u64,
    big_k: f64,
    weight: &WeightFunction,
    tol: f64,
    g: G,
) -> Result<WeightedTrace> {
    let ks = weight.even_weights(big_k);
    let Some(&k_min) = ks.first() else {
        return Ok(WeightedTrace {
            value: 0.0,
            tail_bound: 0.0,
            c_used: 0,
        });
    };
    let mass: f64 = ks
        .iter()
        .map(|&k| 2.0 * weight.eval((k as f64 - 1.0) / big_k) * g(k).abs())
        .sum();
    let per_tol = tol / mass.max(1e-300);
    // the envelope is largest at the smallest weight in the truncation regime
    let c_need = certify_c(m, n, k_min.max(4), 1 << 22, per_tol)?;
    let row = kloosterman_row(m as i64, n as i64, c_need);
    let mut value = 0.0;
    let mut tail = 0.0;
    let mut c_used = 0;
    for &k in &ks {
        let tv = trace_delta_with_row(
            &TraceRequest {
                m,
                n,
                k,
                c_max: c_need,
                tol: per_tol,
            },
            &row,
        )?;
        let w = 2.0 * weight.eval((k as f64 - 1.0) / big_k) * g(k);
        value += w * tv.value;
        tail += w.abs() * tv.tail_bound;
        c_used = c_used.max(tv.c_used);
    }
    Ok(WeightedTrace {
        value,
        tail_bound: tail,
        c_used,
    })
}

/// `sum over even k of 2 h((k-1)/K) Delta_k(m,n)`; equals hhat(0) K + O(1)
/// on the diagonal and is bounded off it.
pub fn weighted_trace(
    m: u64,
    n: u64,
    big_k: f64,
    weight: &WeightFunction,
    tol: f64,
) -> Result<WeightedTrace> {
    weighted_trace_with(m, n, big_k, weight, tol, |_| 1.0)
}

/// Fast path used by the family averages: the k-sum is folded through one
/// backward-recurrence pass per modulus,
/// `delta(m,n) sum 2h g + 2 pi sum_c S(m,n;c)/c I_g(x_c)`,
/// with I_g the g-weighted Bessel sum. Bit-for-bit reproducible and
/// numerically interchangeable with [`weighted_trace_with`] (tested to
/// 1e-10), at a fraction of the Bessel work.
pub fn weighted_trace_fast<G: Fn(u32) -> f64>(
    m: u64,
    n: u64,
    big_k: f64,
    weight: &WeightFunction,
    tol: f64,
    g: G,
) -> Result<WeightedTrace> {
    let ks = weight.even_weights(big_k);
    let Some(&k_min) = ks.first() else {
        return Ok(WeightedTrace {
            value: 0.0,
            tail_bound: 0.0,
            c_used: 0,
        });
    };
    let k_max = *ks.last().unwrap();
    let hw: Vec<f64> = ks
        .iter()
        .map(|&k| 2.0 * weight.eval((k as f64 - 1.0) / big_k) * g(k))
        .collect();
    let mass: f64 = hw.iter().map(|w| w.abs()).sum();
    let per_tol = tol / mass.max(1e-300);
    let c_stop = certify_c(m, n, k_min.max(4), 1 << 22, per_tol)?;
    let x = 4.0 * PI * ((m as f64) * (n as f64)).sqrt();

    let mut series = 0.0f64;
    let mut comp = 0.0f64;
    for c in 1..=c_stop {
        let s = kloosterman(m as i64, n as i64, c);
        let j = bessel_j_many(k_max as usize - 1, x / c as f64);
        let mut ig = 0.0;
        for (i, &k) in ks.iter().enumerate() {
            ig += hw[i] * i_pow_even(k) * j[k as usize - 1];
        }
        let term = s / c as f64 * ig;
        let t = series + term;
        if series.abs() >= term.abs() {
            comp += (series - t) + term;
        } else {
            comp += (term - t) + series;
        }
        series = t;
    }
    let delta_part = if m == n { hw.iter().sum::<f64>() } else { 0.0 };
    Ok(WeightedTrace {
        value: delta_part + 2.0 * PI * (series + comp),
        tail_bound: mass * ln_tail(m, n, k_min, c_stop as f64).exp(),
        c_used: c_stop,
    })
}

/// The asymptotic form of the weighted trace:
///
/// ```text
/// hhat(0) K delta(m,n)
///   - sqrt(pi) (mn)^{-1/4} K Im( conj(zeta_8) sum_c c^{-1/2} S(m,n;c)
///                                e(2 sqrt(mn)/c) hslash(c K^2 / (8 pi sqrt(mn))) )
/// ```
///
/// The c-series is cut when the transform's rapid decay drives the term
/// bound below tol for three consecutive moduli (and never beyond c_max).
pub fn approx_weighted_trace(
    m: u64,
    n: u64,
    big_k: f64,
    weight: &WeightFunction,
    c_max: u64,
    tol: f64,
) -> Result<WeightedTrace> {
    let hs = HslashEvaluator::new(weight.clone(), (tol * 1e-3).min(1e-10));
    let mn = (m as u128) * (n as u128);
    let sqrt_mn = (mn as f64).sqrt();
    let mut sum = num_complex::Complex64::new(0.0, 0.0);
    let mut quiet_run = 0u32;
    let mut c_used = 0u64;
    let mut tail_estimate = 0.0f64;
    for c in 1..=c_max {
        let v = c as f64 * big_k * big_k / (8.0 * PI * sqrt_mn);
        let h = hs.eval(v)?;
        let prefactor = PI.sqrt() * sqrt_mn.sqrt().recip() * big_k;
        let term_bound = prefactor * (c as f64).sqrt().recip() * weil_bound(m as i64, n as i64, c) * h.norm();
        c_used = c;
        if term_bound < tol {
            quiet_run += 1;
            tail_estimate = tail_estimate.max(term_bound);
            if quiet_run >= 3 && v >= 20.0 {
                break;
            }
        } else {
            quiet_run = 0;
        }
        let s = kloosterman(m as i64, n as i64, c);
        let phase = unit_phase(mn, c);
        sum += (c as f64).sqrt().recip() * s * phase * h;
    }
    let delta = if m == n {
        weight.h_hat_0() * big_k
    } else {
        0.0
    };
    let value = delta - PI.sqrt() * sqrt_mn.sqrt().recip() * big_k * (ZETA8_BAR * sum).im;
    Ok(WeightedTrace {
        value,
        tail_bound: tail_estimate,
        c_used,
    })
}
