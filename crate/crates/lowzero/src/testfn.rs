//! Even Schwartz test functions with compactly supported Fourier transforms.
//!
//! Convention: phi_hat(u) = int phi(x) e(-ux) dx with e(z) = e^{2 pi i z},
//! so phi(x) = int phi_hat(u) e(ux) du. The workhorse is the Fejer pair
//!
//! ```text
//! phi(x) = (sin(pi v x) / (pi v x))^2,   phi_hat(u) = (1/v)(1 - |u|/v)_+
//! ```
//!
//! Density sums consume phi_hat (the prime-sum side) plus phi(0) and
//! phi_hat(0); phi itself is only needed when pairing against kernels, so
//! the two roles are exposed separately.

use crate::quad::integrate;
use crate::{Error, Result};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunctionKind {
    /// Fejer kernel of parameter v (triangle transform on [-v, v]).
    Fejer(f64),
    /// Square of a Fejer kernel (cubic B-spline transform on [-2v, 2v]).
    FejerSquared(f64),
    /// User-specified sampled transform.
    CustomPair,
}

/// Pointwise decay envelope |phi(x)| <= min(phi_max, coeff / |x|^power).
#[derive(Debug, Clone, Copy)]
pub struct DecayEnvelope {
    pub phi_max: f64,
    pub coeff: f64,
    pub power: u32,
}

impl DecayEnvelope {
    pub fn at(&self, x: f64) -> f64 {
        self.phi_max.min(self.coeff / x.abs().powi(self.power as i32))
    }

    /// bound on int_{|x| > t} |phi| (both tails)
    pub fn tail_integral(&self, t: f64) -> f64 {
        2.0 * self.coeff / ((self.power - 1) as f64 * t.powi(self.power as i32 - 1))
    }
}

/// An even test function together with its compactly supported transform.
#[derive(Clone)]
pub struct TestFunction {
    kind: TestFunctionKind,
    phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    phi_hat: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    phi_hat_deriv: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    support_radius: f64,
    envelope: DecayEnvelope,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("kind", &self.kind)
            .field("support_radius", &self.support_radius)
            .finish()
    }
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-6 {
        1.0 - t * t / 6.0 + t.powi(4) / 120.0
    } else {
        t.sin() / t
    }
}

/// Centered cubic B-spline (triangle self-convolution), support [-2, 2].
fn bspline3(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0
    } else if a <= 2.0 {
        let w = 2.0 - a;
        w * w * w / 6.0
    } else {
        0.0
    }
}

fn bspline3_deriv(t: f64) -> f64 {
    let a = t.abs();
    let s = t.signum();
    if a <= 1.0 {
        s * (-12.0 * a + 9.0 * a * a) / 6.0
    } else if a <= 2.0 {
        let w = 2.0 - a;
        -s * w * w / 2.0
    } else {
        0.0
    }
}

impl TestFunction {
    /// The Fejer pair; phi(0) = 1, phi_hat(0) = 1/v, support radius v.
    pub fn fejer(v: f64) -> Self {
        assert!(v > 0.0, "Fejer parameter must be positive");
        let phi = move |x: f64| {
            let s = sinc(std::f64::consts::PI * v * x);
            s * s
        };
        let phi_hat = move |u: f64| {
            let a = u.abs();
            if a >= v {
                0.0
            } else {
                (1.0 - a / v) / v
            }
        };
        let phi_hat_deriv = move |u: f64| {
            if u.abs() >= v {
                0.0
            } else {
                -u.signum() / (v * v)
            }
        };
        TestFunction {
            kind: TestFunctionKind::Fejer(v),
            phi: Arc::new(phi),
            phi_hat: Arc::new(phi_hat),
            phi_hat_deriv: Arc::new(phi_hat_deriv),
            support_radius: v,
            envelope: DecayEnvelope {
                phi_max: 1.0,
                coeff: 1.0 / (std::f64::consts::PI * v).powi(2),
                power: 2,
            },
        }
    }

    /// Pointwise square. The transform of phi^2 is the self-convolution of
    /// phi_hat: closed form (scaled cubic B-spline) for the Fejer kernel,
    /// gridded numerical convolution otherwise.
    pub fn square(&self) -> TestFunction {
        match self.kind {
            TestFunctionKind::Fejer(v) => {
                let phi = {
                    let base = self.phi.clone();
                    move |x: f64| {
                        let p = base(x);
                        p * p
                    }
                };
                TestFunction {
                    kind: TestFunctionKind::FejerSquared(v),
                    phi: Arc::new(phi),
                    phi_hat: Arc::new(move |u: f64| bspline3(u / v) / v),
                    phi_hat_deriv: Arc::new(move |u: f64| bspline3_deriv(u / v) / (v * v)),
                    support_radius: 2.0 * v,
                    envelope: DecayEnvelope {
                        phi_max: 1.0,
                        coeff: self.envelope.coeff * self.envelope.coeff,
                        power: 4,
                    },
                }
            }
            _ => {
                // numerical self-convolution of phi_hat on a uniform grid
                let r = self.support_radius;
                let grid_n = 2048usize;
                let step = 2.0 * r / grid_n as f64;
                let hat = self.phi_hat.clone();
                let mut samples = Vec::with_capacity(grid_n + 1);
                for i in 0..=grid_n {
                    let u = i as f64 * step;
                    // (phi_hat * phi_hat)(u) over the overlap [u - r, r]
                    let val = integrate(|t| hat(t) * hat(u - t), u - r, r, 1e-12, 4000)
                        .map(|o| o.value.re)
                        .unwrap_or(0.0);
                    samples.push(val);
                }
                let phi = {
                    let base = self.phi.clone();
                    move |x: f64| {
                        let p = base(x);
                        p * p
                    }
                };
                let interp = GridInterp {
                    step,
                    samples: Arc::new(samples),
                };
                let i2 = interp.clone();
                TestFunction {
                    kind: TestFunctionKind::CustomPair,
                    phi: Arc::new(phi),
                    phi_hat: Arc::new(move |u: f64| interp.eval(u.abs())),
                    phi_hat_deriv: Arc::new(move |u: f64| u.signum() * i2.deriv(u.abs())),
                    support_radius: 2.0 * r,
                    envelope: DecayEnvelope {
                        phi_max: self.envelope.phi_max * self.envelope.phi_max,
                        coeff: self.envelope.coeff,
                        power: self.envelope.power,
                    },
                }
            }
        }
    }

    /// Even test function from samples of phi_hat on the uniform grid
    /// 0, step, 2*step, ..., support_radius; cubic interpolation in between,
    /// phi reconstructed by quadrature of the inversion integral.
    pub fn custom_pair(support_radius: f64, samples: Vec<f64>) -> Result<Self> {
        if !(support_radius > 0.0) || samples.len() < 4 {
            return Err(Error::Domain(
                "custom pair needs positive support and at least 4 samples".to_string(),
            ));
        }
        let step = support_radius / (samples.len() - 1) as f64;
        let interp = GridInterp {
            step,
            samples: Arc::new(samples),
        };
        let i_phi = interp.clone();
        let i_deriv = interp.clone();
        let phi = move |x: f64| {
            // phi(x) = 2 int_0^r phi_hat(u) cos(2 pi u x) du
            integrate(
                |u| i_phi.eval(u) * (std::f64::consts::TAU * u * x).cos(),
                0.0,
                support_radius,
                1e-11,
                20_000 + (64.0 * support_radius * x.abs()) as usize,
            )
            .map(|o| 2.0 * o.value.re)
            .unwrap_or(f64::NAN)
        };
        // sampled quadratic-decay coefficient; custom pairs carry no
        // certified envelope
        let mut coeff = 0.0f64;
        let mut phi_max = 0.0f64;
        for i in 0..=60 {
            let x = 0.5 + i as f64 * 0.5;
            let p = phi(x).abs();
            coeff = coeff.max(p * x * x);
            phi_max = phi_max.max(p);
        }
        phi_max = phi_max.max(phi(0.0).abs());
        Ok(TestFunction {
            kind: TestFunctionKind::CustomPair,
            phi: Arc::new(phi),
            phi_hat: Arc::new(move |u: f64| interp.eval(u.abs())),
            phi_hat_deriv: Arc::new(move |u: f64| u.signum() * i_deriv.deriv(u.abs())),
            support_radius,
            envelope: DecayEnvelope {
                phi_max,
                coeff: coeff * 1.5,
                power: 2,
            },
        })
    }

    pub fn kind(&self) -> TestFunctionKind {
        self.kind
    }

    #[inline]
    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    #[inline]
    pub fn phi_hat(&self, u: f64) -> f64 {
        if u.abs() >= self.support_radius {
            0.0
        } else {
            (self.phi_hat)(u)
        }
    }

    pub fn phi_hat_deriv(&self, u: f64) -> f64 {
        if u.abs() >= self.support_radius {
            0.0
        } else {
            (self.phi_hat_deriv)(u)
        }
    }

    /// sup of supp(phi_hat).
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Pointwise decay envelope; certified for the Fejer family, sampled for
    /// custom pairs.
    pub fn decay_envelope(&self) -> DecayEnvelope {
        self.envelope
    }
}

/// Catmull-Rom interpolation on a uniform grid over [0, r], even extension.
#[derive(Clone)]
struct GridInterp {
    step: f64,
    samples: Arc<Vec<f64>>,
}

impl GridInterp {
    fn get(&self, i: i64) -> f64 {
        let n = self.samples.len() as i64;
        let i = i.abs(); // even extension across 0
        if i >= n {
            0.0
        } else {
            self.samples[i as usize]
        }
    }

    fn eval(&self, u: f64) -> f64 {
        let t = u / self.step;
        let i = t.floor() as i64;
        let f = t - i as f64;
        let (p0, p1, p2, p3) = (self.get(i - 1), self.get(i), self.get(i + 1), self.get(i + 2));
        let a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
        let b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
        let c = -0.5 * p0 + 0.5 * p2;
        a * f * f * f + b * f * f + c * f + p1
    }

    fn deriv(&self, u: f64) -> f64 {
        let t = u / self.step;
        let i = t.floor() as i64;
        let f = t - i as f64;
        let (p0, p1, p2, p3) = (self.get(i - 1), self.get(i), self.get(i + 1), self.get(i + 2));
        let a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
        let b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
        let c = -0.5 * p0 + 0.5 * p2;
        (3.0 * a * f * f + 2.0 * b * f + c) / self.step
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use std::f64::consts::TAU;

    fn fourier_roundtrip(tf: &TestFunction, x: f64) -> f64 {
        let r = tf.support_radius();
        integrate(
            |u| tf.phi_hat(u) * (TAU * u * x).cos(),
            0.0,
            r,
            1e-12,
            40_000 + (128.0 * r * x.abs()) as usize,
        )
        .unwrap()
        .value
        .re
            * 2.0
    }

    #[test]
    fn fejer_normalization() {
        for &v in &[0.25, 0.5, 1.0, 2.0] {
            let tf = TestFunction::fejer(v);
            assert_eq!(tf.phi(0.0), 1.0);
            assert!((tf.phi_hat(0.0) - 1.0 / v).abs() < 1e-15);
            assert_eq!(tf.support_radius(), v);
            assert_eq!(tf.phi_hat(v + 1e-9), 0.0);
            // int phi_hat = phi(0) = 1 (triangle area)
            let area = integrate(|u| tf.phi_hat(u), -v, v, 1e-13, 2000)
                .unwrap()
                .value
                .re;
            assert!((area - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_consistency_on_catalog() {
        let members = [
            TestFunction::fejer(0.5),
            TestFunction::fejer(1.0),
            TestFunction::fejer(1.0).square(),
        ];
        for tf in &members {
            for &x in &[0.0, 0.3, 1.0, 2.7, 8.0, 20.0] {
                let direct = tf.phi(x);
                let via_hat = fourier_roundtrip(tf, x);
                assert!(
                    (direct - via_hat).abs() < 1e-8,
                    "{:?} x={x}: {direct} vs {via_hat}",
                    tf.kind()
                );
            }
        }
    }

    #[test]
    fn evenness() {
        let tf = TestFunction::fejer(0.7);
        for &x in &[0.1, 1.3, 5.5] {
            assert_eq!(tf.phi(x), tf.phi(-x));
            assert_eq!(tf.phi_hat(x), tf.phi_hat(-x));
        }
    }

    #[test]
    fn fejer_nonnegative() {
        let tf = TestFunction::fejer(0.5);
        let mut x = -30.0;
        while x <= 30.0 {
            assert!(tf.phi(x) >= 0.0);
            x += 0.37;
        }
    }

    #[test]
    fn square_pointwise_and_support() {
        let tf = TestFunction::fejer(0.5);
        let sq = tf.square();
        assert_eq!(sq.phi(0.0), tf.phi(0.0) * tf.phi(0.0));
        for &x in &[0.4, 1.1, 3.0] {
            let p = tf.phi(x);
            assert!((sq.phi(x) - p * p).abs() < 1e-15);
        }
        assert_eq!(sq.support_radius(), 1.0);
        assert_eq!(sq.phi_hat(1.0 + 1e-12), 0.0);
        assert_eq!(sq.kind(), TestFunctionKind::FejerSquared(0.5));
    }

    #[test]
    fn square_transform_plancherel() {
        // (phi^2)^(0) = int phi^2; Fejer closed form is 2/(3v)
        for &v in &[0.4, 0.5, 1.0] {
            let tf = TestFunction::fejer(v);
            let sq = tf.square();
            let direct = integrate(|x| tf.phi(x) * tf.phi(x), -4000.0, 4000.0, 1e-9, 400_000)
                .unwrap()
                .value
                .re;
            assert!(
                (sq.phi_hat(0.0) - direct).abs() < 1e-7,
                "v={v}: {} vs {direct}",
                sq.phi_hat(0.0)
            );
            assert!((sq.phi_hat(0.0) - 2.0 / (3.0 * v)).abs() < 1e-12);
        }
    }

    #[test]
    fn custom_pair_reproduces_triangle() {
        // sample the Fejer triangle; the cubic interpolant rounds the kink
        // at u = 0 over its two neighboring cells, so reconstruction is
        // O(step^2) there and exact elsewhere
        let v = 0.5f64;
        let n = 256usize;
        let samples: Vec<f64> = (0..=n)
            .map(|i| {
                let u = v * i as f64 / n as f64;
                (1.0 - u / v) / v
            })
            .collect();
        let custom = TestFunction::custom_pair(v, samples).unwrap();
        let fejer = TestFunction::fejer(v);
        for &u in &[0.124, 0.3, 0.49] {
            assert!(
                (custom.phi_hat(u) - fejer.phi_hat(u)).abs() < 1e-10,
                "hat mismatch at {u}"
            );
        }
        for &x in &[0.0, 0.8, 2.5] {
            assert!(
                (custom.phi(x) - fejer.phi(x)).abs() < 5e-6,
                "phi mismatch at {x}: {} vs {}",
                custom.phi(x),
                fejer.phi(x)
            );
        }
    }

    #[test]
    fn custom_pair_square_matches_closed_form() {
        let v = 0.5f64;
        let n = 200usize;
        let samples: Vec<f64> = (0..=n)
            .map(|i| {
                let u = v * i as f64 / n as f64;
                (1.0 - u / v) / v
            })
            .collect();
        let custom = TestFunction::custom_pair(v, samples).unwrap();
        let sq_num = custom.square();
        let sq_exact = TestFunction::fejer(v).square();
        for &u in &[0.0, 0.2, 0.5, 0.77, 0.95] {
            assert!(
                (sq_num.phi_hat(u) - sq_exact.phi_hat(u)).abs() < 5e-5,
                "u={u}: {} vs {}",
                sq_num.phi_hat(u),
                sq_exact.phi_hat(u)
            );
        }
    }

    #[test]
    fn decay_envelope_holds() {
        for tf in [TestFunction::fejer(0.5), TestFunction::fejer(1.0).square()] {
            let env = tf.decay_envelope();
            let mut x = 0.05;
            while x < 200.0 {
                let bound = env.at(x);
                assert!(
                    tf.phi(x).abs() <= bound * (1.0 + 1e-12),
                    "envelope violated at {x}: {} > {bound}",
                    tf.phi(x)
                );
                x *= 1.37;
            }
        }
    }
}
