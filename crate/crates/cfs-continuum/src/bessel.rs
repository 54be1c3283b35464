//! Modified Bessel functions of the second kind K_nu for complex argument
//! with Re z > 0, integer order nu = 0..=4.
//!
//! Three regimes, switched on |z|:
//!   - ascending series with the log term for |z| <= 2,
//!   - an exponentially weighted integral representation (adaptive
//!     quadrature) in the crossover annulus 2 < |z| < 16,
//!   - the large-argument asymptotic expansion for |z| >= 16.
//!
//! Orders 0 and 1 are computed directly; higher orders follow from the
//! upward recurrence K_{nu+1} = K_{nu-1} + (2 nu / z) K_nu, which is stable
//! for K.  Conjugation symmetry K_nu(conj z) = conj(K_nu(z)) holds to the
//! last bit because every path uses real coefficients.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

const EULER_GAMMA: f64 = 0.5772156649015328606;

/// Series cut, quadrature annulus, asymptotic cut.
const SERIES_RADIUS: f64 = 2.0;
const ASYMPTOTIC_RADIUS: f64 = 16.0;
/// e^{-z} underflows past this; relative accuracy is unattainable in f64.
const EXP_UNDERFLOW: f64 = 680.0;

/// K_nu(z) for nu in 0..=3, Re z > 0.
///
/// Relative accuracy is 1e-10 or better for |z| in [1e-6, 1e4] with
/// |arg z| < pi/2, up to the e^{-Re z} underflow limit.
pub fn bessel_k(nu: usize, z: Complex64) -> Result<Complex64> {
    if nu > 3 {
        return Err(Error::IndexOutOfRange {
            what: "bessel_k order",
            index: nu,
        });
    }
    Ok(kv_all(z)?[nu])
}

/// K_0..K_4 at once; the kernel family needs consecutive orders.
pub(crate) fn kv_all(z: Complex64) -> Result<[Complex64; 5]> {
    if !(z.re > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::AccuracyNotAttainable(format!(
            "bessel_k requires finite z with Re z > 0, got {z}"
        )));
    }
    if z.re > EXP_UNDERFLOW {
        return Err(Error::AccuracyNotAttainable(format!(
            "e^(-z) underflows for Re z = {} > {EXP_UNDERFLOW}",
            z.re
        )));
    }
    let r = z.norm();
    let (k0, k1) = if r <= SERIES_RADIUS {
        (k0_series(z), k1_series(z))
    } else if r < ASYMPTOTIC_RADIUS {
        (k_integral(0, z), k_integral(1, z))
    } else {
        (k_asymptotic(0, z)?, k_asymptotic(1, z)?)
    };
    let mut k = [Complex64::new(0.0, 0.0); 5];
    k[0] = k0;
    k[1] = k1;
    for nu in 1..4 {
        k[nu + 1] = k[nu - 1] + k[nu].scale(2.0 * nu as f64) / z;
    }
    Ok(k)
}

/// I_0 ascending series (support for the K series).
fn i0_series(z: Complex64) -> Complex64 {
    let q = z * z * 0.25;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..60 {
        term = term * q / ((k * k) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

fn i1_series(z: Complex64) -> Complex64 {
    let q = z * z * 0.25;
    let mut term = z * 0.5;
    let mut sum = term;
    for k in 1..60 {
        term = term * q / ((k * (k + 1)) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// K_0(z) = -(ln(z/2) + gamma) I_0(z) + sum_{k>=1} (z^2/4)^k / (k!)^2 H_k.
fn k0_series(z: Complex64) -> Complex64 {
    let lg = (z * 0.5).ln() + EULER_GAMMA;
    let q = z * z * 0.25;
    let mut term = Complex64::new(1.0, 0.0);
    let mut h = 0.0f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..60 {
        term = term * q / ((k * k) as f64);
        h += 1.0 / k as f64;
        let add = term.scale(h);
        sum += add;
        if add.norm() < 1e-18 * (sum.norm() + 1.0) {
            break;
        }
    }
    -lg * i0_series(z) + sum
}

/// K_1(z) = 1/z + ln(z/2) I_1(z)
///          - (z/4) sum_k [psi(k+1) + psi(k+2)] (z^2/4)^k / (k! (k+1)!).
fn k1_series(z: Complex64) -> Complex64 {
    let lg = (z * 0.5).ln();
    let q = z * z * 0.25;
    let mut term = Complex64::new(1.0, 0.0); // (z^2/4)^k / (k! (k+1)!)
    let mut psi_sum = -2.0 * EULER_GAMMA + 1.0; // psi(1) + psi(2)
    let mut sum = term.scale(psi_sum);
    for k in 1..60 {
        term = term * q / ((k * (k + 1)) as f64);
        psi_sum += 1.0 / k as f64 + 1.0 / (k + 1) as f64;
        let add = term.scale(psi_sum);
        sum += add;
        if add.norm() < 1e-18 * (sum.norm() + 1.0) {
            break;
        }
    }
    1.0 / z + lg * i1_series(z) - z * sum * 0.25
}

/// Large-argument expansion K_nu ~ sqrt(pi/2z) e^{-z} sum a_k(nu)/z^k.
fn k_asymptotic(nu: usize, z: Complex64) -> Result<Complex64> {
    let mu = 4.0 * (nu * nu) as f64;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev_norm = f64::INFINITY;
    for k in 1..64 {
        let kf = k as f64;
        let num = mu - (2.0 * kf - 1.0) * (2.0 * kf - 1.0);
        term = term.scale(num / (8.0 * kf)) / z;
        if term.norm() >= prev_norm {
            break; // divergent tail reached
        }
        prev_norm = term.norm();
        sum += term;
        if term.norm() < 1e-16 * sum.norm() {
            break;
        }
    }
    let prefactor = (Complex64::new(std::f64::consts::PI, 0.0) / (z * 2.0)).sqrt() * (-z).exp();
    Ok(prefactor * sum)
}

/// Crossover regime: K_nu(z) = sqrt(pi/2z) e^{-z} / Gamma(nu + 1/2)
///   * int_0^inf e^{-u} u^{nu-1/2} (1 + u/2z)^{nu-1/2} du,
/// evaluated after u = v^2 so the integrand is smooth at the origin.
/// The factor 1 + v^2/2z stays in the right half plane for Re z > 0, so the
/// principal power is safe.
fn k_integral(nu: usize, z: Complex64) -> Complex64 {
    let half = Complex64::new(0.5, 0.0);
    let inv2z = half / z;
    let p = nu as f64 - 0.5;
    let f = |v: f64| -> Complex64 {
        let v2 = v * v;
        let base = 1.0 + inv2z.scale(v2);
        let pw = (base.ln().scale(p)).exp();
        let weight = (-v2).exp() * v2.powi(nu as i32);
        pw.scale(2.0 * weight)
    };
    // e^{-v^2} dies by v = 8.2; the algebraic factor grows at most ~ |v|.
    let (integral, _err) = adaptive_simpson(&f, 0.0, 8.2, 1e-14, 32);
    let gamma_half = match nu {
        0 => std::f64::consts::PI.sqrt(),
        1 => 0.5 * std::f64::consts::PI.sqrt(),
        _ => unreachable!(),
    };
    let prefactor = (Complex64::new(std::f64::consts::PI, 0.0) / (z * 2.0)).sqrt() * (-z).exp();
    prefactor * integral.scale(1.0 / gamma_half)
}
