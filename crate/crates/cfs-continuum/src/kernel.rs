//! The regularized kernel family T^(n) and its momentum-space oracle.
//!
//! All closed forms are modified Bessel functions of the complex argument
//! z = m sqrt(r^2 - (t - i eps)^2).  The family is normalized so that the
//! gradient and Klein-Gordon ladder identities
//!     d_mu T^(n+1) = (xi_mu / 2) T^(n),
//!     (box + m^2) T^(n+1) = -(n+1) T^(n)
//! hold exactly; this fixes T^(-1) = -(m^4/4pi^3) K_2(z)/z^2 (the assembled
//! projector then agrees with direct momentum-space integration, which is
//! what the oracle below checks).

use num_complex::Complex64;

use crate::bessel::kv_all;
use crate::error::{Error, Result};
use crate::quad::integrate_complex;

const PI: f64 = std::f64::consts::PI;

/// Physical and regularization configuration shared by all modules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Mass (inverse length).
    pub mass: f64,
    /// Regularization length eps.
    pub epsilon: f64,
    /// Microlocal replacement constant for T^(1).
    pub c: f64,
    /// Lagrange multiplier of the trace constraint; zero in the continuum
    /// limit configuration.
    pub lagrange_r: f64,
}

impl Params {
    pub fn new(mass: f64, epsilon: f64, c: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParams(format!("mass must be > 0, got {mass}")));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParams(format!(
                "epsilon must be > 0, got {epsilon}"
            )));
        }
        if !c.is_finite() {
            return Err(Error::InvalidParams(format!("c must be finite, got {c}")));
        }
        Ok(Params {
            mass,
            epsilon,
            c,
            lagrange_r: 0.0,
        })
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Params::new(self.mass, epsilon, self.c)
    }
}

/// Spacetime displacement y - x reduced to (t, r, direction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimeDisplacement {
    pub t: f64,
    pub r: f64,
    pub direction: [f64; 3],
}

impl SpacetimeDisplacement {
    pub fn new(t: f64, r: f64, direction: [f64; 3]) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::InvalidParams(format!("r must be >= 0, got {r}")));
        }
        if r > 0.0 {
            let n2: f64 = direction.iter().map(|d| d * d).sum();
            if (n2.sqrt() - 1.0).abs() > 1e-14 {
                return Err(Error::InvalidParams(format!(
                    "direction must be a unit vector, |d| = {}",
                    n2.sqrt()
                )));
            }
        }
        Ok(SpacetimeDisplacement { t, r, direction })
    }

    /// Displacement along the z-axis; enough whenever only (t, r) matter.
    pub fn radial(t: f64, r: f64) -> Result<Self> {
        Self::new(t, r, [0.0, 0.0, 1.0])
    }
}

/// The regularized tangent vector xi = (t - i eps, r * direction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedXi {
    pub xi0: Complex64,
    pub xi_spatial: [f64; 3],
}

impl RegularizedXi {
    pub fn new(disp: &SpacetimeDisplacement, params: &Params) -> Self {
        RegularizedXi {
            xi0: Complex64::new(disp.t, -params.epsilon),
            xi_spatial: [
                disp.r * disp.direction[0],
                disp.r * disp.direction[1],
                disp.r * disp.direction[2],
            ],
        }
    }

    /// Build from two real spacetime points x, y (components [x0, x1, x2, x3]).
    pub fn from_points(x: &[f64; 4], y: &[f64; 4], params: &Params) -> Self {
        RegularizedXi {
            xi0: Complex64::new(y[0] - x[0], -params.epsilon),
            xi_spatial: [y[1] - x[1], y[2] - x[2], y[3] - x[3]],
        }
    }

    pub fn t(&self) -> f64 {
        self.xi0.re
    }

    pub fn epsilon(&self) -> f64 {
        -self.xi0.im
    }

    pub fn r(&self) -> f64 {
        let s: f64 = self.xi_spatial.iter().map(|v| v * v).sum();
        s.sqrt()
    }

    /// Unit spatial direction; the z-axis convention at r = 0.
    pub fn direction(&self) -> [f64; 3] {
        let r = self.r();
        if r == 0.0 {
            [0.0, 0.0, 1.0]
        } else {
            [
                self.xi_spatial[0] / r,
                self.xi_spatial[1] / r,
                self.xi_spatial[2] / r,
            ]
        }
    }

    /// The reversed displacement xi(y, x) = -conj(xi(x, y)).
    pub fn reversed(&self) -> Self {
        RegularizedXi {
            xi0: -self.xi0.conj(),
            xi_spatial: [
                -self.xi_spatial[0],
                -self.xi_spatial[1],
                -self.xi_spatial[2],
            ],
        }
    }

    /// -xi_mu xi^mu = r^2 - t^2 + eps^2 + 2 i eps t, assembled from real
    /// parts so the t -> -t conjugation symmetry is exact.
    pub fn minus_xi_squared(&self) -> Complex64 {
        let t = self.t();
        let eps = self.epsilon();
        let r2: f64 = self.xi_spatial.iter().map(|v| v * v).sum();
        Complex64::new(r2 - t * t + eps * eps, 2.0 * eps * t)
    }

    /// xi^mu conj(xi_mu) = t^2 + eps^2 - r^2 (real).
    pub fn xi_dot_xibar(&self) -> f64 {
        let t = self.t();
        let eps = self.epsilon();
        let r2: f64 = self.xi_spatial.iter().map(|v| v * v).sum();
        t * t + eps * eps - r2
    }
}

/// Bessel argument z = m sqrt(r^2 - (t - i eps)^2), principal branch.
///
/// Re z > 0 always (the radicand only meets the branch cut at t = 0 where it
/// is r^2 + eps^2 > 0), and sign(Im z) = sign(t).
pub fn z_arg(xi: &RegularizedXi, params: &Params) -> Complex64 {
    xi.minus_xi_squared().sqrt().scale(params.mass)
}

/// Kernel family T^(n) for n in {-2, -1, 0, 1}.
pub fn t_family(n: i32, xi: &RegularizedXi, params: &Params) -> Result<Complex64> {
    if !(-2..=1).contains(&n) {
        return Err(Error::UnsupportedOrder(n));
    }
    t_extended(n, xi, params)
}

/// Kernel family extended to the higher mass derivatives n = 2, 3 needed by
/// the light-cone series for quartic potentials.
pub(crate) fn t_extended(n: i32, xi: &RegularizedXi, params: &Params) -> Result<Complex64> {
    let z = z_arg(xi, params);
    let k = kv_all(z)?;
    let m = params.mass;
    let m2 = m * m;
    let c8 = 1.0 / (8.0 * PI * PI * PI);
    let v = match n {
        -2 => (k[3] / (z * z * z)).scale(4.0 * c8 * m2 * m2 * m2),
        -1 => -(k[2] / (z * z)).scale(2.0 * c8 * m2 * m2),
        0 => (k[1] / z).scale(c8 * m2),
        1 => (k[1] / z - k[2].scale(0.5)).scale(c8),
        2 => ((z * k[3]).scale(0.25) - k[2]).scale(c8 / m2),
        3 => ((z * k[3]).scale(0.75) - (z * z * k[4]).scale(0.125)).scale(c8 / (m2 * m2)),
        _ => return Err(Error::UnsupportedOrder(n)),
    };
    Ok(v)
}

/// Component selector for the momentum-space oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleComponent {
    /// int d^4k/(2pi)^4 delta(k^2 - m^2) Theta(-k0) e^{ik xi}; equals T^(0).
    Scalar,
    /// The k_0-weighted integral: the gamma^0 coefficient of P(x, y).
    Vector0,
    /// The radial k-weighted integral: the coefficient of d_k gamma^k in
    /// P(x, y).
    VectorRadial,
}

/// Direct numerical integration of the regularized momentum-space kernel,
/// reduced to a 1D radial integral after the analytic angular integration.
///
/// This route never touches the Bessel closed forms; it exists to verify
/// them.
pub fn momentum_oracle(
    component: OracleComponent,
    xi: &RegularizedXi,
    params: &Params,
    tol: f64,
) -> Result<Complex64> {
    if tol < 1e-10 {
        return Err(Error::InvalidParams(format!(
            "oracle tolerance must be >= 1e-10, got {tol:e}"
        )));
    }
    let m = params.mass;
    let eps = params.epsilon;
    let t = xi.t();
    let r = xi.r();

    // e^{-i omega xi0} = e^{-i omega t} e^{-omega eps}
    let phase = |omega: f64| -> Complex64 {
        Complex64::new(0.0, -omega * t).exp().scale((-omega * eps).exp())
    };
    let sinc = |x: f64| if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    // spherical Bessel j1
    let j1 = |x: f64| {
        if x.abs() < 1e-4 {
            x / 3.0 - x * x * x / 30.0
        } else {
            x.sin() / (x * x) - x.cos() / x
        }
    };

    let c8 = 1.0 / (8.0 * PI * PI * PI);
    let integrand = move |k: f64| -> Complex64 {
        let omega = (k * k + m * m).sqrt();
        match component {
            OracleComponent::Scalar => phase(omega).scale(c8 * k * k / omega * sinc(k * r)),
            OracleComponent::Vector0 => phase(omega).scale(-c8 * k * k * sinc(k * r)),
            OracleComponent::VectorRadial => {
                (phase(omega) * Complex64::new(0.0, 1.0)).scale(c8 * k * k * k / omega * j1(k * r))
            }
        }
    };

    // The e^{eps k_0} damping kills the integrand; cut where the tail is
    // negligible at the requested tolerance and verify the cut.
    let k_max = (55.0 + 2.0 * (1.0 / tol).ln()) / eps;
    let peak = integrand(1.0 / eps).norm().max(integrand(1.0).norm());
    let at_cut = integrand(k_max).norm();
    if at_cut > 1e-18 * peak.max(f64::MIN_POSITIVE) {
        return Err(Error::QuadratureNonConvergence(format!(
            "momentum oracle tail bound violated at k = {k_max:e}"
        )));
    }
    // Panel count resolves the oscillation scale max(r, |t|).
    let cycles = k_max * (r + t.abs() + eps) / (2.0 * PI);
    let panels = (cycles as usize).clamp(32, 20000);
    let (value, _err) = integrate_complex(&integrand, 0.0, k_max, tol, panels, "momentum oracle")?;
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> Params {
        Params::new(1.0, 0.1, 0.0).unwrap()
    }

    fn xi(t: f64, r: f64) -> RegularizedXi {
        RegularizedXi::new(&SpacetimeDisplacement::radial(t, r).unwrap(), &params())
    }

    #[test]
    fn z_at_coincident_points_is_m_eps() {
        let p = params();
        let z = z_arg(&xi(0.0, 0.0), &p);
        assert!((z - Complex64::new(p.mass * p.epsilon, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn z_spacelike_is_real() {
        let p = params();
        let z = z_arg(&xi(0.0, 0.5), &p);
        let want = p.mass * (0.25f64 + p.epsilon * p.epsilon).sqrt();
        assert!((z.re - want).abs() < 1e-14);
        assert!(z.im.abs() < 1e-18);
    }

    #[test]
    fn z_conjugates_under_time_flip() {
        let p = params();
        for (t, r) in [(0.3, 0.2), (0.05, 0.4), (1.0, 0.1)] {
            let zp = z_arg(&xi(t, r), &p);
            let zm = z_arg(&xi(-t, r), &p);
            assert_eq!(zp.conj(), zm);
            assert!(zp.re > 0.0);
            assert_eq!(zp.im.signum(), t.signum());
        }
    }

    #[test]
    fn xi_squared_parts() {
        let p = params();
        let x = xi(0.3, 0.2);
        let ms = x.minus_xi_squared();
        assert!((ms.re - (0.04 - 0.09 + p.epsilon * p.epsilon)).abs() < 1e-15);
        assert!((ms.im - 2.0 * p.epsilon * 0.3).abs() < 1e-15);
        assert!((x.xi_dot_xibar() - (0.09 + p.epsilon * p.epsilon - 0.04)).abs() < 1e-15);
    }

    #[test]
    fn t0_peak_matches_small_argument_asymptotics() {
        // T^(0)(0,0) = 1/(8 pi^3 eps^2) (1 + O(m^2 eps^2))
        let p = Params::new(1.0, 0.01, 0.0).unwrap();
        let x = RegularizedXi::new(&SpacetimeDisplacement::radial(0.0, 0.0).unwrap(), &p);
        let t0 = t_family(0, &x, &p).unwrap();
        let lead = 1.0 / (8.0 * PI.powi(3) * p.epsilon * p.epsilon);
        assert!((t0.re / lead - 1.0).abs() < 1e-3);
        assert!(t0.im.abs() < 1e-12 * t0.re.abs());
    }

    #[test]
    fn t_family_conjugation_symmetry() {
        let p = params();
        for n in -2..=1 {
            let a = t_family(n, &xi(0.25, 0.15), &p).unwrap();
            let b = t_family(n, &xi(-0.25, 0.15), &p).unwrap();
            assert_eq!(a.conj(), b, "T^({n}) conjugation");
        }
    }

    #[test]
    fn unsupported_orders_error() {
        let p = params();
        assert!(t_family(2, &xi(0.1, 0.1), &p).is_err());
        assert!(t_family(-3, &xi(0.1, 0.1), &p).is_err());
    }

    /// Gradient ladder d_mu T^(n+1) = (xi_mu/2) T^(n) via central finite
    /// differences in t and r, with O(h^2) convergence.
    #[test]
    fn ladder_identity_finite_differences() {
        let p = params();
        let eps = p.epsilon;
        for n in -2..=2 {
            let (t, r) = (0.07, 0.13);
            let h = eps / 40.0;
            // d/dx^0 = -d/dt
            let tp = t_extended(n + 1, &xi(t + h, r), &p).unwrap();
            let tm = t_extended(n + 1, &xi(t - h, r), &p).unwrap();
            let dt = (tp - tm).scale(1.0 / (2.0 * h));
            let tn = t_extended(n, &xi(t, r), &p).unwrap();
            let x = xi(t, r);
            let lhs = -dt; // xi_0/2 T^(n) with xi_0 = xi^0
            let rhs = (x.xi0 * tn).scale(0.5);
            let rel = (lhs - rhs).norm() / rhs.norm();
            assert!(rel < 2e-3, "time ladder n = {n}: rel = {rel:e}");

            // d/dr T^(n+1) = (r/2) T^(n)
            let rp = t_extended(n + 1, &xi(t, r + h), &p).unwrap();
            let rm = t_extended(n + 1, &xi(t, r - h), &p).unwrap();
            let dr = (rp - rm).scale(1.0 / (2.0 * h));
            let rhs_r = tn.scale(0.5 * r);
            let rel_r = (dr - rhs_r).norm() / rhs_r.norm();
            assert!(rel_r < 2e-3, "radial ladder n = {n}: rel = {rel_r:e}");
        }
    }

    /// Finite-difference convergence order of the ladder residual is 2.
    #[test]
    fn ladder_residual_second_order() {
        let p = params();
        let (t, r) = (0.08, 0.11);
        let mut errs = Vec::new();
        let hs = [p.epsilon / 20.0, p.epsilon / 40.0, p.epsilon / 80.0];
        for &h in &hs {
            let tp = t_family(0, &xi(t + h, r), &p).unwrap();
            let tm = t_family(0, &xi(t - h, r), &p).unwrap();
            let dt = -(tp - tm).scale(1.0 / (2.0 * h));
            let rhs = (xi(t, r).xi0 * t_family(-1, &xi(t, r), &p).unwrap()).scale(0.5);
            errs.push(((dt - rhs).norm() / rhs.norm()).ln());
        }
        let slope1 = (errs[0] - errs[1]) / (2f64).ln();
        let slope2 = (errs[1] - errs[2]) / (2f64).ln();
        for s in [slope1, slope2] {
            assert!((s - 2.0).abs() < 0.1, "convergence slope {s}");
        }
    }

    /// Klein-Gordon ladder (box + m^2) T^(n+1) = -(n+1) T^(n), n = 0.
    #[test]
    fn klein_gordon_ladder_n0() {
        let p = params();
        let (t, r) = (0.06, 0.12);
        let h = p.epsilon / 50.0;
        let lap = |f: &dyn Fn(f64, f64) -> Complex64| -> Complex64 {
            let c = f(t, r);
            let dtt = (f(t + h, r) - c.scale(2.0) + f(t - h, r)).scale(1.0 / (h * h));
            let drr = (f(t, r + h) - c.scale(2.0) + f(t, r - h)).scale(1.0 / (h * h));
            let dr = (f(t, r + h) - f(t, r - h)).scale(1.0 / (2.0 * h));
            // box = d_t^2 - d_r^2 - (2/r) d_r on radial functions
            dtt - drr - dr.scale(2.0 / r)
        };
        let f1 = |tt: f64, rr: f64| t_family(1, &xi(tt, rr), &p).unwrap();
        let kg = lap(&f1) + t_family(1, &xi(t, r), &p).unwrap().scale(p.mass * p.mass);
        let rhs = -t_family(0, &xi(t, r), &p).unwrap();
        let rel = (kg - rhs).norm() / rhs.norm();
        assert!(rel < 1e-4, "KG ladder rel = {rel:e}");
    }

    /// T^(0) and the P-components against the momentum-space oracle.
    #[test]
    fn scalar_component_matches_momentum_oracle() {
        let p = params();
        for (t, r) in [(0.0, 0.0), (0.2, 0.3), (-0.35, 0.1), (0.45, 0.4)] {
            let x = xi(t, r);
            let oracle = momentum_oracle(OracleComponent::Scalar, &x, &p, 1e-9).unwrap();
            let closed = t_family(0, &x, &p).unwrap();
            let rel = (oracle - closed).norm() / closed.norm();
            assert!(rel < 1e-6, "T0 vs oracle at ({t},{r}): rel = {rel:e}");
        }
    }

    #[test]
    fn vector_components_match_momentum_oracle() {
        let p = params();
        let (t, r) = (0.15, 0.25);
        let x = xi(t, r);
        let tm1 = t_family(-1, &x, &p).unwrap();
        // gamma^0 coefficient: (i/2) T^(-1) xi^0
        let v0 = momentum_oracle(OracleComponent::Vector0, &x, &p, 1e-9).unwrap();
        let v0_closed = (x.xi0 * tm1) * Complex64::new(0.0, 0.5);
        assert!(
            (v0 - v0_closed).norm() / v0_closed.norm() < 1e-6,
            "vector0 mismatch"
        );
        // radial coefficient of gamma^k: -(i/2) T^(-1) r
        let vr = momentum_oracle(OracleComponent::VectorRadial, &x, &p, 1e-9).unwrap();
        let vr_closed = tm1 * Complex64::new(0.0, -0.5 * r);
        assert!(
            (vr - vr_closed).norm() / vr_closed.norm() < 1e-6,
            "vector radial mismatch"
        );
    }

    #[test]
    fn vector0_at_t0_is_real_and_matches() {
        let p = params();
        let x = xi(0.0, 0.3);
        let v0 = momentum_oracle(OracleComponent::Vector0, &x, &p, 1e-9).unwrap();
        // At t = 0 the xi^0 contraction (i/2) T^(-1) (-i eps) is real.
        let closed = (x.xi0 * t_family(-1, &x, &p).unwrap()) * Complex64::new(0.0, 0.5);
        assert!(v0.im.abs() < 1e-6 * v0.re.abs());
        assert!((v0 - closed).norm() / closed.norm() < 1e-6);
    }

    #[test]
    fn oracle_integrand_damping() {
        // e^{eps k_0} suppression: magnitude at k = 10/eps is below
        // e^{-10} of the low-k peak (trivially satisfied by the weight).
        let p = params();
        let eps = p.epsilon;
        let f = |k: f64| {
            let omega = (k * k + p.mass * p.mass).sqrt();
            k * k / omega * (-omega * eps).exp()
        };
        let peak = f(1.0 / eps) * (10f64).exp(); // compensate the k^2 growth generously
        assert!(f(10.0 / eps) <= (-10f64).exp() * peak);
    }

    #[test]
    fn t_minus_one_peak_value_and_lightcone_decay() {
        // |T^(-1)|^2 peaks at the origin as 1/(4 pi^6 eps^8) and decays
        // slower along the light cone than along the spacelike axis.
        let p = Params::new(1.0, 0.02, 0.0).unwrap();
        let eps = p.epsilon;
        let at = |t: f64, r: f64| {
            let d = SpacetimeDisplacement::radial(t, r).unwrap();
            t_family(-1, &RegularizedXi::new(&d, &p), &p).unwrap().norm()
        };
        let peak = at(0.0, 0.0).powi(2);
        let expected = 1.0 / (4.0 * PI.powi(6) * eps.powi(8));
        assert!((peak / expected - 1.0).abs() < 2e-3, "peak {peak:e} vs {expected:e}");
        assert!(at(2.0 * eps, 2.0 * eps) > at(0.0, 2.0 * (2f64).sqrt() * eps));
        // even in t, maximal at the origin
        assert!((at(eps, eps) - at(-eps, eps)).abs() < 1e-12 * at(eps, eps));
        assert!(peak > at(eps, 0.0).powi(2));
    }

    #[test]
    fn peak_scaling_slope_is_minus_eight() {
        let mut lns = Vec::new();
        let mut lny = Vec::new();
        for k in 0..8 {
            let eps = 0.02 * (10f64).powf(k as f64 / 7.0);
            let p = Params::new(1.0, eps, 0.0).unwrap();
            let x = RegularizedXi::new(&SpacetimeDisplacement::radial(0.0, 0.0).unwrap(), &p);
            let v = t_family(-1, &x, &p).unwrap().norm().powi(2);
            lns.push(eps.ln());
            lny.push(v.ln());
        }
        let n = lns.len() as f64;
        let mx = lns.iter().sum::<f64>() / n;
        let my = lny.iter().sum::<f64>() / n;
        let slope: f64 = lns
            .iter()
            .zip(&lny)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / lns.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        assert!((slope + 8.0).abs() < 0.05, "peak scaling slope {slope}");
    }
}
