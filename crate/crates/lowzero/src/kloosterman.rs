//! Exact Kloosterman sums S(m, n; c) and the elementary arithmetic around
//! them.
//!
//! S(m,n;c) = sum over primitive d mod c of e((m d + n dbar)/c), dbar the
//! inverse of d. Phases are the exact rational residues (m d + n dbar) mod c,
//! so no error accumulates in the angle. The defining sum is real: d and -d
//! pair into conjugate terms, which the fast paths exploit; a separate
//! complex accumulation keeps the imaginary part as a numerical canary.

use crate::{Error, Result};
use rayon::prelude::*;
use std::f64::consts::TAU;

/// S(m, n; c) together with the imaginary residual of the unpaired complex
/// accumulation (a canary: it must be ~1e-9 * d(c) sqrt(c) or below).
#[derive(Debug, Clone, Copy)]
pub struct KloostermanValue {
    pub m: i64,
    pub n: i64,
    pub c: u64,
    pub value: f64,
    pub imag_residual: f64,
}

/// Inverse of d mod c for gcd(d, c) = 1, in [0, c).
pub fn modular_inverse(d: u64, c: u64) -> Result<u64> {
    assert!(c >= 1);
    if c == 1 {
        return Ok(0);
    }
    let d = d % c;
    // extended gcd on (d, c)
    let (mut r0, mut r1) = (d as i128, c as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        let r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        let s2 = s0 - q * s1;
        s0 = s1;
        s1 = s2;
    }
    if r0 != 1 {
        return Err(Error::Domain(format!(
            "{} is not invertible mod {} (gcd = {})",
            d, c, r0
        )));
    }
    let mut inv = s0 % c as i128;
    if inv < 0 {
        inv += c as i128;
    }
    Ok(inv as u64)
}

/// Number of divisors of c.
pub fn divisor_count(c: u64) -> u64 {
    assert!(c >= 1);
    let mut n = c;
    let mut count = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            count *= e + 1;
        }
        p += 1;
    }
    if n > 1 {
        count *= 2;
    }
    count
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Weil's bound d(c) sqrt(c) sqrt(gcd(m, n, c)).
pub fn weil_bound(m: i64, n: i64, c: u64) -> f64 {
    let g = gcd_u64(gcd_u64(m.unsigned_abs(), n.unsigned_abs()), c);
    let g = if g == 0 { c } else { g };
    divisor_count(c) as f64 * (c as f64).sqrt() * (g as f64).sqrt()
}

#[inline]
fn reduce(m: i64, c: u64) -> u64 {
    m.rem_euclid(c as i64) as u64
}

/// S(m, n; c), summing conjugate unit pairs (d, c - d) so the result is real
/// by construction.
pub fn kloosterman(m: i64, n: i64, c: u64) -> f64 {
    assert!(c >= 1);
    if c == 1 {
        return 1.0;
    }
    let mr = reduce(m, c);
    let nr = reduce(n, c);
    let mut acc = 0.0f64;
    let mut comp = 0.0f64; // Neumaier compensation
    let mut add = |v: f64| {
        let t = acc + v;
        if acc.abs() >= v.abs() {
            comp += (acc - t) + v;
        } else {
            comp += (v - t) + acc;
        }
        acc = t;
    };
    for d in 1..=c / 2 {
        if gcd_u64(d, c) != 1 {
            continue;
        }
        let dbar = modular_inverse(d, c).expect("unit");
        let r = (mr * d + nr * dbar) % c;
        let angle = TAU * (r as f64) / (c as f64);
        let term = if d * 2 == c {
            angle.cos()
        } else {
            2.0 * angle.cos()
        };
        add(term);
    }
    acc + comp
}

/// Unpaired complex accumulation; carries the imaginary residual canary.
pub fn kloosterman_full(m: i64, n: i64, c: u64) -> KloostermanValue {
    assert!(c >= 1);
    if c == 1 {
        return KloostermanValue {
            m,
            n,
            c,
            value: 1.0,
            imag_residual: 0.0,
        };
    }
    let mr = reduce(m, c);
    let nr = reduce(n, c);
    let mut re = 0.0f64;
    let mut im = 0.0f64;
    for d in 1..c {
        if gcd_u64(d, c) != 1 {
            continue;
        }
        let dbar = modular_inverse(d, c).expect("unit");
        let r = (mr * d + nr * dbar) % c;
        let (s, co) = (TAU * (r as f64) / (c as f64)).sin_cos();
        re += co;
        im += s;
    }
    KloostermanValue {
        m,
        n,
        c,
        value: re,
        imag_residual: im,
    }
}

/// S(m, n; c) for c = 1..=c_max, parallel over c. This row is the inner
/// series of every Petersson trace, so it is the batch interface of choice.
pub fn kloosterman_row(m: i64, n: i64, c_max: u64) -> Vec<f64> {
    (1..=c_max)
        .into_par_iter()
        .map(|c| kloosterman(m, n, c))
        .collect()
}

/// All S(m, n; c) for 1 <= m <= m_max, 1 <= n <= n_max at a fixed modulus,
/// in one pass over the unit group. Entry (m, n) sits at
/// `(m - 1) * n_max + (n - 1)`.
///
/// One cosine table of length c plus incremental residue updates keep the
/// inner loop to an add, a conditional subtract and a table load.
pub fn kloosterman_block(c: u64, m_max: usize, n_max: usize) -> Vec<f64> {
    assert!(c >= 1);
    if c == 1 {
        return vec![1.0; m_max * n_max];
    }
    let cu = c as usize;
    let mut costab = vec![0.0f64; cu];
    for (r, slot) in costab.iter_mut().enumerate() {
        *slot = (TAU * r as f64 / c as f64).cos();
    }
    let mut acc = vec![0.0f64; m_max * n_max];
    let mut md = vec![0usize; m_max + 1];
    let mut nd = vec![0usize; n_max + 1];

    for d in 1..=c / 2 {
        if gcd_u64(d, c) != 1 {
            continue;
        }
        let dbar = modular_inverse(d, c).expect("unit");
        let du = (d % c) as usize;
        let dbaru = (dbar % c) as usize;
        // md[m] = m*d mod c, nd[n] = n*dbar mod c, built incrementally
        let mut v = 0usize;
        for slot in md.iter_mut().take(m_max + 1) {
            *slot = v;
            v += du;
            if v >= cu {
                v -= cu;
            }
        }
        let mut w = 0usize;
        for slot in nd.iter_mut().take(n_max + 1) {
            *slot = w;
            w += dbaru;
            if w >= cu {
                w -= cu;
            }
        }
        let weight = if d * 2 == c { 1.0 } else { 2.0 };
        for m in 1..=m_max {
            let base = md[m];
            let row = &mut acc[(m - 1) * n_max..m * n_max];
            for n in 1..=n_max {
                let mut idx = base + nd[n];
                if idx >= cu {
                    idx -= cu;
                }
                row[n - 1] += weight * costab[idx];
            }
        }
    }
    acc
}
