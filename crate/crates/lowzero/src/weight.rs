//! Smooth compactly supported weights h on (0, infinity), their oscillatory
//! transform, and the h-weighted Bessel sums they control.
//!
//! The transform is
//!
//! ```text
//! hslash(v) = int_0^inf h(sqrt(u)) / sqrt(2 pi u) * e^{iuv} du
//!           = sqrt(2/pi) * int h(t) e^{i v t^2} dt        (u = t^2)
//! ```
//!
//! The substituted form has compact support [t0, t1] and phase v t^2, so a
//! panel count growing with v resolves every oscillation; the defining form
//! is kept as an independent cross-check. At v = 0 the substitution gives
//! hslash(0) = sqrt(2/pi) * int h, which is cached at construction.

use crate::bessel::bessel_j_many;
use crate::quad::{integrate, integrate_complex};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_2_PI, TAU};
use std::sync::Arc;

/// conj(zeta_8) with zeta_8 = e^{2 pi i / 8}, the constant of the weighted
/// Bessel-sum asymptotics.
pub const ZETA8_BAR: Complex64 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2);

/// Smooth nonnegative bump supported on [t0, t1] subset (0, inf).
#[derive(Clone)]
pub struct WeightFunction {
    support: (f64, f64),
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    h_hat_0: f64,
}

impl std::fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeightFunction")
            .field("support", &self.support)
            .field("h_hat_0", &self.h_hat_0)
            .finish()
    }
}

impl WeightFunction {
    /// The default bump: h(t) = exp(-1/(1-(2t-3)^2)) on (1, 2), zero
    /// elsewhere. Support [1, 2] makes the weights select k in [K, 2K].
    pub fn standard_bump() -> Self {
        Self::new(1.0, 2.0, |t: f64| {
            let u = 2.0 * t - 3.0;
            let w = 1.0 - u * u;
            if w <= 0.0 {
                0.0
            } else {
                (-1.0 / w).exp()
            }
        })
        .expect("standard bump is admissible")
    }

    /// Wrap an arbitrary smooth bump; rejects negative samples and a
    /// non-positive integral.
    pub fn new<F>(t0: f64, t1: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(t0 > 0.0 && t1 > t0) {
            return Err(Error::Domain(format!(
                "support [{t0}, {t1}] must satisfy 0 < t0 < t1"
            )));
        }
        for i in 0..=256 {
            let t = t0 + (t1 - t0) * i as f64 / 256.0;
            if f(t) < 0.0 {
                return Err(Error::Domain(format!("weight negative at t = {t}")));
            }
        }
        let integral = integrate(&f, t0, t1, 1e-13, 20_000)?.value.re;
        if integral <= 0.0 {
            return Err(Error::Domain(
                "weight must have positive integral".to_string(),
            ));
        }
        Ok(WeightFunction {
            support: (t0, t1),
            eval: Arc::new(f),
            h_hat_0: integral,
        })
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.support.0 || t >= self.support.1 {
            0.0
        } else {
            (self.eval)(t)
        }
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// int h = Fourier transform of h at 0.
    pub fn h_hat_0(&self) -> f64 {
        self.h_hat_0
    }

    /// Even weights k with (k-1)/K inside the support of h, ascending.
    pub fn even_weights(&self, big_k: f64) -> Vec<u32> {
        assert!(big_k >= 2.0, "K must be at least 2");
        let lo = (big_k * self.support.0 + 1.0).ceil() as i64;
        let hi = (big_k * self.support.1 + 1.0).floor() as i64;
        let mut k = lo.max(2);
        if k % 2 == 1 {
            k += 1;
        }
        let mut out = Vec::new();
        while k <= hi {
            out.push(k as u32);
            k += 2;
        }
        out
    }
}

/// Evaluator for the oscillatory transform of a weight function.
#[derive(Debug, Clone)]
pub struct HslashEvaluator {
    weight: WeightFunction,
    tol: f64,
}

impl HslashEvaluator {
    pub fn new(weight: WeightFunction, tol: f64) -> Self {
        HslashEvaluator { weight, tol }
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    /// Value at v = 0: sqrt(2/pi) int h.
    pub fn at_zero(&self) -> f64 {
        FRAC_2_PI.sqrt() * self.weight.h_hat_0()
    }

    fn panels_for(&self, v: f64) -> usize {
        let (t0, t1) = self.weight.support();
        let cycles = v.abs() * (t1 * t1 - t0 * t0) / TAU;
        (4.0 * cycles) as usize + 4_000
    }

    /// hslash(v) via the substituted compact form.
    pub fn eval(&self, v: f64) -> Result<Complex64> {
        let (t0, t1) = self.weight.support();
        let w = self.weight.clone();
        let out = integrate_complex(
            |t| Complex64::from_polar(w.eval(t), v * t * t),
            t0,
            t1,
            self.tol,
            self.panels_for(v),
        )?;
        Ok(out.value * FRAC_2_PI.sqrt())
    }

    /// d/dv hslash(v) = sqrt(2/pi) int h(t) (i t^2) e^{ivt^2} dt.
    pub fn eval_deriv(&self, v: f64) -> Result<Complex64> {
        let (t0, t1) = self.weight.support();
        let w = self.weight.clone();
        let out = integrate_complex(
            |t| Complex64::from_polar(w.eval(t) * t * t, v * t * t) * Complex64::i(),
            t0,
            t1,
            self.tol,
            self.panels_for(v),
        )?;
        Ok(out.value * FRAC_2_PI.sqrt())
    }

    /// The defining integral, without substitution; used as the independent
    /// cross-check of `eval`.
    pub fn eval_direct(&self, v: f64) -> Result<Complex64> {
        let (t0, t1) = self.weight.support();
        let w = self.weight.clone();
        let out = integrate_complex(
            |u| {
                if u <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                Complex64::from_polar(w.eval(u.sqrt()) / (TAU * u).sqrt(), u * v)
            },
            t0 * t0,
            t1 * t1,
            self.tol,
            self.panels_for(v) * 2,
        )?;
        Ok(out.value)
    }
}

/// The finite h-weighted Bessel sum
/// `I(x) = sum over even k of 2 h((k-1)/K) i^k J_{k-1}(x)`;
/// real because i^k = (-1)^{k/2} for even k. One backward-recurrence pass
/// serves every order.
pub fn weighted_bessel_sum(x: f64, big_k: f64, weight: &WeightFunction) -> f64 {
    assert!(x >= 0.0);
    let ks = weight.even_weights(big_k);
    let Some(&k_max) = ks.last() else {
        return 0.0;
    };
    if x == 0.0 {
        return 0.0;
    }
    let j = bessel_j_many(k_max as usize - 1, x);
    let mut sum = 0.0;
    for &k in &ks {
        let sign = if k % 4 == 0 { 1.0 } else { -1.0 };
        sum += 2.0 * weight.eval((k as f64 - 1.0) / big_k) * sign * j[k as usize - 1];
    }
    sum
}

/// Asymptotic main term of the weighted Bessel sum for large K:
/// `-(K/sqrt(x)) Im(conj(zeta_8) e^{ix} hslash(K^2/(2x)))`.
pub fn weighted_bessel_sum_main_term(
    x: f64,
    big_k: f64,
    hslash: &HslashEvaluator,
) -> Result<f64> {
    assert!(x > 0.0);
    let v = big_k * big_k / (2.0 * x);
    let h = hslash.eval(v)?;
    let phase = Complex64::from_polar(1.0, x % TAU);
    Ok(-(big_k / x.sqrt()) * (ZETA8_BAR * phase * h).im)
}
