//! Exact q-expansions and Hecke eigenvalues for the level-1 eigenforms of
//! weights 12, 16, 18, 20, 22, 26 (the one-dimensional spaces).
//!
//! Delta = q prod (1-q^n)^24 is built from Jacobi's identity
//! prod (1-q^n)^3 = sum_j (-1)^j (2j+1) q^{j(j+1)/2} (a sparse series) by
//! three squarings; the higher weights are Delta times monomials in the
//! Eisenstein series E4 = 1 + 240 sum sigma_3(n) q^n and
//! E6 = 1 - 504 sum sigma_5(n) q^n. All coefficients are exact integers
//! (tau(n) ~ n^{11/2} leaves u64 near n = 1e4); the normalized eigenvalues
//! lambda_f(n) = a_f(n) n^{-(k-1)/2} are materialized in f64 at the boundary.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::io::{Read, Write};

/// Weights k with dim H_k = 1.
pub const SUPPORTED_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

/// A normalized Hecke eigencuspform of level 1 with exact integer
/// coefficients a_f(1..=N).
#[derive(Debug, Clone, PartialEq)]
pub struct HeckeEigenform {
    weight: u32,
    /// a[n] = a_f(n); a[0] = 0 by convention
    coeffs: Vec<BigInt>,
}

/// Truncated product of two integer q-series, degree < n_keep.
/// Naive quadratic schoolbook below the cutover, Karatsuba above it; the
/// output coefficients are computed independently, so the naive path
/// parallelizes over the output index.
pub fn poly_mul_trunc(a: &[BigInt], b: &[BigInt], n_keep: usize) -> Vec<BigInt> {
    let la = a.len().min(n_keep);
    let lb = b.len().min(n_keep);
    if la == 0 || lb == 0 {
        return vec![BigInt::zero(); n_keep];
    }
    let (a, b) = (&a[..la], &b[..lb]);
    if la.min(lb) <= 96 {
        let mut out: Vec<BigInt> = (0..n_keep)
            .into_par_iter()
            .map(|k| {
                let mut acc = BigInt::zero();
                let i_lo = k.saturating_sub(lb - 1);
                let i_hi = k.min(la - 1);
                for i in i_lo..=i_hi {
                    if !a[i].is_zero() && !b[k - i].is_zero() {
                        acc += &a[i] * &b[k - i];
                    }
                }
                acc
            })
            .collect();
        out.truncate(n_keep);
        return out;
    }
    let mut full = karatsuba(a, b);
    full.resize(n_keep, BigInt::zero());
    full.truncate(n_keep);
    full
}

fn naive_full(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn karatsuba(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.len().min(b.len()) <= 96 {
        return naive_full(a, b);
    }
    let m = a.len().max(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(m.min(a.len()));
    let (b0, b1) = b.split_at(m.min(b.len()));
    let sum = |lo: &[BigInt], hi: &[BigInt]| -> Vec<BigInt> {
        let mut s = lo.to_vec();
        if s.len() < hi.len() {
            s.resize(hi.len(), BigInt::zero());
        }
        for (i, h) in hi.iter().enumerate() {
            s[i] += h;
        }
        s
    };
    let ((z0, z2), z1full) = rayon::join(
        || {
            rayon::join(
                || karatsuba(a0, b0),
                || {
                    if a1.is_empty() || b1.is_empty() {
                        Vec::new()
                    } else {
                        karatsuba(a1, b1)
                    }
                },
            )
        },
        || karatsuba(&sum(a0, a1), &sum(b0, b1)),
    );
    let mut z1 = z1full;
    for (i, v) in z0.iter().enumerate() {
        z1[i] -= v;
    }
    for (i, v) in z2.iter().enumerate() {
        z1[i] -= v;
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, v) in z0.into_iter().enumerate() {
        out[i] = v;
    }
    for (i, v) in z1.into_iter().enumerate() {
        if !v.is_zero() {
            out[m + i] += v;
        }
    }
    for (i, v) in z2.into_iter().enumerate() {
        if !v.is_zero() {
            out[2 * m + i] += v;
        }
    }
    out
}

/// prod (1-q^n)^3 up to degree < n, by Jacobi's identity (sparse).
fn jacobi_cubed(n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    let mut j = 0u64;
    loop {
        let e = (j * (j + 1) / 2) as usize;
        if e >= n {
            break;
        }
        let coeff = BigInt::from(2 * j + 1);
        out[e] = if j % 2 == 0 { coeff } else { -coeff };
        j += 1;
    }
    out
}

/// Coefficients a(0..=n) of Delta = q prod (1-q^n)^24.
pub fn delta_qexp(n: usize) -> Vec<BigInt> {
    let j3 = jacobi_cubed(n); // degree < n suffices after the q-shift
    let j6 = poly_mul_trunc(&j3, &j3, n);
    let j12 = poly_mul_trunc(&j6, &j6, n);
    let j24 = poly_mul_trunc(&j12, &j12, n);
    let mut out = vec![BigInt::zero(); n + 1];
    for (i, v) in j24.into_iter().enumerate() {
        if i + 1 <= n {
            out[i + 1] = v;
        }
    }
    out
}

/// Normalized Eisenstein series E_4 or E_6, coefficients 0..=n.
pub fn eisenstein_qexp(weight: u32, n: usize) -> Result<Vec<BigInt>> {
    let (power, scale): (u32, i64) = match weight {
        4 => (3, 240),
        6 => (5, -504),
        _ => {
            return Err(Error::Domain(format!(
                "Eisenstein q-expansion implemented for weights 4 and 6, not {weight}"
            )))
        }
    };
    // sigma_power(m) by a divisor sieve; sigma_5(1e6) ~ 1e30 needs BigInt
    let mut sigma = vec![BigInt::zero(); n + 1];
    for d in 1..=n as u64 {
        let dp = BigInt::from(d).pow(power);
        let mut m = d as usize;
        while m <= n {
            sigma[m] += &dp;
            m += d as usize;
        }
    }
    let mut out = vec![BigInt::zero(); n + 1];
    out[0] = BigInt::one();
    for m in 1..=n {
        out[m] = &sigma[m] * BigInt::from(scale);
    }
    Ok(out)
}

impl HeckeEigenform {
    /// Construct the unique normalized eigenform of the given weight with
    /// exact coefficients up to N.
    pub fn new(weight: u32, n: u64) -> Result<Self> {
        if !SUPPORTED_WEIGHTS.contains(&weight) {
            return Err(Error::UnsupportedWeight(weight));
        }
        if n < 1 || n > 1_000_000 {
            return Err(Error::Domain(format!(
                "coefficient limit {n} outside [1, 1e6]"
            )));
        }
        let nn = n as usize;
        let delta = delta_qexp(nn);
        let coeffs = match weight {
            12 => delta,
            16 => {
                let e4 = eisenstein_qexp(4, nn)?;
                poly_mul_trunc(&delta, &e4, nn + 1)
            }
            18 => {
                let e6 = eisenstein_qexp(6, nn)?;
                poly_mul_trunc(&delta, &e6, nn + 1)
            }
            20 => {
                let e4 = eisenstein_qexp(4, nn)?;
                let e8 = poly_mul_trunc(&e4, &e4, nn + 1);
                poly_mul_trunc(&delta, &e8, nn + 1)
            }
            22 => {
                let e4 = eisenstein_qexp(4, nn)?;
                let e6 = eisenstein_qexp(6, nn)?;
                let e10 = poly_mul_trunc(&e4, &e6, nn + 1);
                poly_mul_trunc(&delta, &e10, nn + 1)
            }
            26 => {
                let e4 = eisenstein_qexp(4, nn)?;
                let e6 = eisenstein_qexp(6, nn)?;
                let e8 = poly_mul_trunc(&e4, &e4, nn + 1);
                let e14 = poly_mul_trunc(&e8, &e6, nn + 1);
                poly_mul_trunc(&delta, &e14, nn + 1)
            }
            _ => unreachable!(),
        };
        let mut coeffs = coeffs;
        coeffs.resize(nn + 1, BigInt::zero());
        debug_assert!(coeffs[1].is_one(), "normalization a_f(1) = 1");
        Ok(HeckeEigenform { weight, coeffs })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Largest n with a_f(n) available.
    pub fn coeff_limit(&self) -> u64 {
        (self.coeffs.len() - 1) as u64
    }

    /// Exact Fourier coefficient a_f(n), 1 <= n <= coeff_limit.
    pub fn a(&self, n: u64) -> Result<&BigInt> {
        self.coeffs
            .get(n as usize)
            .filter(|_| n >= 1)
            .ok_or(Error::CoefficientsExhausted {
                needed: n,
                have: self.coeff_limit(),
            })
    }

    /// lambda_f(n) = a_f(n) n^{-(k-1)/2}; lies in [-2, 2] at primes.
    pub fn lambda(&self, n: u64) -> Result<f64> {
        let a = self.a(n)?;
        let exp = -((self.weight - 1) as f64) / 2.0;
        Ok(a.to_f64().unwrap_or(f64::NAN) * (n as f64).powf(exp))
    }

    /// Binary cache: magic, weight, N, record width; then a_f(1..=N) as
    /// fixed-width little-endian two's complement.
    pub fn write_cache<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let width = self
            .coeffs
            .iter()
            .map(|c| c.to_signed_bytes_le().len())
            .max()
            .unwrap_or(1)
            + 1;
        w.write_all(b"LZEF")?;
        w.write_all(&self.weight.to_le_bytes())?;
        w.write_all(&self.coeff_limit().to_le_bytes())?;
        w.write_all(&(width as u32).to_le_bytes())?;
        for c in &self.coeffs[1..] {
            let mut bytes = c.to_signed_bytes_le();
            let sign_fill = if c.is_negative() { 0xff } else { 0x00 };
            bytes.resize(width, sign_fill);
            w.write_all(&bytes)?;
        }
        Ok(())
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let io_err = |e: std::io::Error| Error::Domain(format!("cache read: {e}"));
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io_err)?;
        if &magic != b"LZEF" {
            return Err(Error::Domain("bad cache magic".to_string()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4).map_err(io_err)?;
        let weight = u32::from_le_bytes(b4);
        r.read_exact(&mut b8).map_err(io_err)?;
        let n = u64::from_le_bytes(b8);
        r.read_exact(&mut b4).map_err(io_err)?;
        let width = u32::from_le_bytes(b4) as usize;
        let mut coeffs = vec![BigInt::zero(); n as usize + 1];
        let mut rec = vec![0u8; width];
        for slot in coeffs.iter_mut().skip(1) {
            r.read_exact(&mut rec).map_err(io_err)?;
            *slot = BigInt::from_signed_bytes_le(&rec);
        }
        if !SUPPORTED_WEIGHTS.contains(&weight) {
            return Err(Error::UnsupportedWeight(weight));
        }
        Ok(HeckeEigenform { weight, coeffs })
    }

    /// CSV rows `n,a_f(n),lambda_f(n)`.
    pub fn export_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,a,lambda")?;
        for n in 1..=self.coeff_limit() {
            writeln!(
                w,
                "{},{},{:.17e}",
                n,
                self.coeffs[n as usize],
                self.lambda(n).unwrap()
            )?;
        }
        Ok(())
    }
}

/// L(1, sym^2 f) for the one-dimensional spaces, extracted from the m = n = 1
/// Petersson trace: Delta_k(1,1) = (2 pi^2 / (k-1)) / L(1, sym^2 f).
pub fn sym_square_l1(weight: u32, delta_k_11: f64) -> Result<f64> {
    if !SUPPORTED_WEIGHTS.contains(&weight) {
        return Err(Error::UnsupportedWeight(weight));
    }
    if !(delta_k_11 > 0.0) {
        return Err(Error::NonPositiveTrace(delta_k_11));
    }
    Ok(2.0 * std::f64::consts::PI.powi(2) / ((weight - 1) as f64 * delta_k_11))
}
