//! Minimal double-double arithmetic for exponential-sum phases.
//!
//! The phase 2*sqrt(p)/c must be reduced mod 1 before the trig evaluation.
//! In plain f64 the square root of p near 1e9 carries an absolute error of
//! order 1e-12 which survives the reduction, so the root, the division and
//! the reduction are all done on (hi, lo) pairs carrying ~106 bits. Products
//! of up to four primes are taken as exact u128 integers.

use num_complex::Complex64;

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact conversion of a u128 (magnitude below 2^106 keeps it exact).
    pub fn from_u128(n: u128) -> Self {
        let hi = n as f64;
        // hi rounds to nearest; the residue fits in an i128 and then in f64
        // whenever n < 2^106.
        let r = if hi >= u128::MAX as f64 {
            0.0
        } else {
            let hi_int = hi as u128;
            if hi_int >= n {
                -(((hi_int - n) as f64))
            } else {
                (n - hi_int) as f64
            }
        };
        let (s, e) = quick_two_sum(hi, r);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, x: f64) -> Dd {
        let (s, e) = two_sum(self.hi, x);
        let e = e + self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd {
            hi: -other.hi,
            lo: -other.lo,
        })
    }

    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let e = e + self.lo * x;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div_f64(self, x: f64) -> Dd {
        let q1 = self.hi / x;
        let (p, e) = two_prod(q1, x);
        let r = ((self.hi - p) - e + self.lo) / x;
        let (hi, lo) = quick_two_sum(q1, r);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Fractional part in [0, 1). Handles hi large enough that lo carries
    /// integer content of its own.
    pub fn frac(self) -> Dd {
        let f1 = self.hi - self.hi.floor();
        let f2 = self.lo - self.lo.floor();
        let (s, e) = two_sum(f1, f2);
        let mut r = Dd {
            hi: s,
            lo: e,
        };
        // s in [0, 2); one conditional wrap suffices, then renormalize.
        if r.hi >= 1.0 {
            r = r.add_f64(-1.0);
        }
        if r.hi < 0.0 {
            r = r.add_f64(1.0);
        }
        let (hi, lo) = quick_two_sum(r.hi, r.lo);
        Dd { hi, lo }
    }
}

/// sqrt of an exact integer, good to ~1e-31 relative.
pub fn sqrt_u128(n: u128) -> Dd {
    if n == 0 {
        return Dd::from_f64(0.0);
    }
    let s = (n as f64).sqrt();
    // one Newton correction: e = (n - s^2) / (2s), with n - s^2 in dd
    let (p, perr) = two_prod(s, s);
    let nd = Dd::from_u128(n);
    let diff = nd.sub(Dd { hi: p, lo: perr });
    let e = diff.to_f64() / (2.0 * s);
    let (hi, lo) = quick_two_sum(s, e);
    Dd { hi, lo }
}

/// e(t) = exp(2 pi i t) for t given as a dd fractional part in [0, 1).
/// First-order correction in the low half keeps the phase accurate to ~1e-17.
pub fn e_of_frac(t: Dd) -> Complex64 {
    let theta = std::f64::consts::TAU * t.hi;
    let (s, c) = theta.sin_cos();
    let dtheta = std::f64::consts::TAU * t.lo;
    Complex64::new(c - s * dtheta, s + c * dtheta)
}

/// Phase e(2 sqrt(n) / c) with the root, quotient and mod-1 reduction all in
/// double-double precision.
pub fn unit_phase(n: u128, c: u64) -> Complex64 {
    let r = sqrt_u128(n).mul_f64(2.0).div_f64(c as f64);
    e_of_frac(r.frac())
}

/// Reference phase e(2 sqrt(n)/c) through 80-bit fixed point: the integer
/// square root of n * 2^160 reduced mod c * 2^80 as an exact rational. An
/// independent path used as the precision oracle for [`unit_phase`].
pub fn unit_phase_reference(n: u128, c: u64) -> Complex64 {
    use num_bigint::BigUint;
    let scaled: BigUint = BigUint::from(n) << 160u32;
    let root = scaled.sqrt(); // floor(sqrt(n) * 2^80)
    let den = BigUint::from(c) << 80;
    let num = (root << 1) % &den;
    let frac = to_f64(&num) / to_f64(&den);
    let theta = std::f64::consts::TAU * frac;
    Complex64::new(theta.cos(), theta.sin())
}

fn to_f64(b: &num_bigint::BigUint) -> f64 {
    use num_traits::ToPrimitive;
    b.to_f64().expect("finite")
}
