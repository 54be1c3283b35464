//! Assembly of the kernel P(x, y), the closed chain A_xy = P(x,y)P(y,x),
//! its scalar/vector/bilinear components, closed-form and continuum-limit
//! eigenvalues, eigenspace projectors, and the derivative kernel used for
//! first-moment probing.

use num_complex::Complex64;

use crate::clifford::{
    chiral_projector, decompose, gamma, gamma_bilinear, gamma_lower, spin_adjoint, Chirality,
    SpinMatrix, I, ONE,
};
use crate::error::{Error, Result};
use crate::kernel::{t_extended, t_family, Params, RegularizedXi};

/// xi-slash = xi_mu gamma^mu for a complex time component and real spatial
/// components.
pub fn slash(xi0: Complex64, xi_spatial: &[f64; 3]) -> SpinMatrix {
    let mut m = gamma(0).unwrap().scale(xi0);
    for (k, &v) in xi_spatial.iter().enumerate() {
        // xi_k = -xi^k
        m = m + gamma(k + 1).unwrap().scale(Complex64::new(-v, 0.0));
    }
    m
}

/// Kernel of the fermionic projector, P(x,y) = (i/2) T^(-1) xi-slash + m T^(0).
pub fn fermionic_projector(xi: &RegularizedXi, params: &Params) -> Result<SpinMatrix> {
    let tm1 = t_family(-1, xi, params)?;
    let t0 = t_family(0, xi, params)?;
    let vec_part = slash(xi.xi0, &xi.xi_spatial).scale(tm1 * I.scale(0.5));
    let scal_part = SpinMatrix::scalar(t0.scale(params.mass));
    Ok(vec_part + scal_part)
}

/// Continuum-limit kernel (i/2) T^(-1) xi-slash; the mass term is dropped as
/// in the trace computations of the current coefficients.
pub fn continuum_projector(xi: &RegularizedXi, params: &Params) -> Result<SpinMatrix> {
    let tm1 = t_family(-1, xi, params)?;
    Ok(slash(xi.xi0, &xi.xi_spatial).scale(tm1 * I.scale(0.5)))
}

/// Closed chain A_xy = P(x,y) P(y,x); P(y,x) is the spin adjoint of P(x,y).
pub fn closed_chain(xi: &RegularizedXi, params: &Params) -> Result<SpinMatrix> {
    let p = fermionic_projector(xi, params)?;
    Ok(p * spin_adjoint(&p))
}

/// Real components of the closed chain: A = b + a_mu gamma^mu + c_i Gamma^i.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainComponents {
    pub b: f64,
    /// a_mu with the index down (coefficients of gamma^mu).
    pub a: [f64; 4],
    /// c_i = 2 c_{0i}, coefficients of Gamma^i.
    pub c: [f64; 3],
}

impl ChainComponents {
    /// a_mu a^mu - sum_i c_i^2 = a.a + 2 c_{mu nu} c^{mu nu}; the radicand of
    /// the eigenvalue formula.
    pub fn discriminant(&self) -> f64 {
        let aa = self.a[0] * self.a[0]
            - self.a[1] * self.a[1]
            - self.a[2] * self.a[2]
            - self.a[3] * self.a[3];
        let cc: f64 = self.c.iter().map(|v| v * v).sum();
        aa - cc
    }

    /// Rebuild the matrix from the components.
    pub fn reconstruct(&self) -> SpinMatrix {
        let mut m = SpinMatrix::scalar(Complex64::new(self.b, 0.0));
        for mu in 0..4 {
            m = m + gamma(mu).unwrap().scale(Complex64::new(self.a[mu], 0.0));
        }
        for i in 0..3 {
            m = m + gamma_bilinear(i + 1).unwrap().scale(Complex64::new(self.c[i], 0.0));
        }
        m
    }
}

/// Extract (b, a_mu, c_i) from a spin-symmetric chain.
///
/// Rejects inputs whose spin-symmetry residual exceeds 1e-9 relative; the
/// pseudo components and imaginary parts of a symmetric chain stay below
/// 1e-12 relative and are discarded.
pub fn chain_components(a: &SpinMatrix) -> Result<ChainComponents> {
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let sym_residual = spin_adjoint(a).distance(a) / scale;
    if sym_residual > 1e-9 {
        return Err(Error::SymmetryViolation {
            residual: sym_residual,
            tolerance: 1e-9,
        });
    }
    let comp = decompose(a);
    Ok(ChainComponents {
        b: comp.scalar.re,
        a: [
            comp.vector[0].re,
            comp.vector[1].re,
            comp.vector[2].re,
            comp.vector[3].re,
        ],
        c: [
            comp.bilinear[0].re,
            comp.bilinear[1].re,
            comp.bilinear[2].re,
        ],
    })
}

/// Closed-form eigenvalues lambda_pm = b ± sqrt(a.a + 2 c.c), each twofold.
///
/// The square root is the principal complex root of the (real) radicand, so
/// lambda_plus carries the non-negative imaginary part.
pub fn eigenvalues_closed_form(comp: &ChainComponents) -> (Complex64, Complex64) {
    let disc = Complex64::new(comp.discriminant(), 0.0).sqrt();
    let b = Complex64::new(comp.b, 0.0);
    (b + disc, b - disc)
}

/// Exact eigenspace projectors with their measured residuals.
#[derive(Debug, Clone, Copy)]
pub struct ExactProjectors {
    pub plus: SpinMatrix,
    pub minus: SpinMatrix,
    /// max |Lambda^2 - Lambda| over both projectors.
    pub idempotency_residual: f64,
    /// max |A Lambda - lambda Lambda| relative to |A|.
    pub eigen_residual: f64,
}

/// Lambda_pm = 1/2 ± (A - b)/sqrt(tr[(A-b)^2]).
///
/// Fails with a degeneracy error near the light cone, where the discriminant
/// under the root vanishes.
pub fn projectors_exact(a: &SpinMatrix, comp: &ChainComponents) -> Result<ExactProjectors> {
    let disc = comp.discriminant();
    let threshold = 1e-12 * (comp.b * comp.b + 1.0);
    if disc.abs() < threshold {
        return Err(Error::DegenerateDiscriminant {
            discriminant: disc.abs(),
            threshold,
        });
    }
    let root = Complex64::new(disc, 0.0).sqrt();
    let m = *a - SpinMatrix::scalar(Complex64::new(comp.b, 0.0));
    let half = SpinMatrix::scalar(ONE.scale(0.5));
    let dev = m.scale(ONE.scale(0.5) / root);
    let plus = half + dev;
    let minus = half - dev;

    let idem = (plus * plus)
        .distance(&plus)
        .max((minus * minus).distance(&minus));
    let (lp, lm) = eigenvalues_closed_form(comp);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let ep = (*a * plus).distance(&plus.scale(lp)) / scale;
    let em = (*a * minus).distance(&minus.scale(lm)) / scale;
    Ok(ExactProjectors {
        plus,
        minus,
        idempotency_residual: idem,
        eigen_residual: ep.max(em),
    })
}

/// Eigenvalue branch selector of the continuum spectral decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Continuum-limit spectral data: the conjugate eigenvalue pair and the four
/// rank-one chiral eigenspace projectors.
#[derive(Debug, Clone, Copy)]
pub struct SpectralData {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    /// Indexed [branch][chirality] = [(+,L), (+,R); (-,L), (-,R)].
    projectors: [[SpinMatrix; 2]; 2],
}

impl SpectralData {
    pub fn projector(&self, branch: Branch, chir: Chirality) -> &SpinMatrix {
        let b = match branch {
            Branch::Plus => 0,
            Branch::Minus => 1,
        };
        let c = match chir {
            Chirality::Left => 0,
            Chirality::Right => 1,
        };
        &self.projectors[b][c]
    }

    pub fn lambda(&self, branch: Branch) -> Complex64 {
        match branch {
            Branch::Plus => self.lambda_plus,
            Branch::Minus => self.lambda_minus,
        }
    }

    pub fn all(&self) -> [(Branch, Chirality); 4] {
        [
            (Branch::Plus, Chirality::Left),
            (Branch::Plus, Chirality::Right),
            (Branch::Minus, Chirality::Left),
            (Branch::Minus, Chirality::Right),
        ]
    }
}

/// Continuum eigenvalues lambda_pm = (|T^(-1)|^2/4)(t^2 - r^2 + eps^2 ± 2 i eps r)
/// and projectors Lambda_(pm, L/R) = chi_{L/R} (1/2 ± i xi_k Gamma^k / (2r)).
///
/// Requires r > 0; the r = 0 slice has measure zero in every integral that
/// consumes this data.
pub fn continuum_spectral(xi: &RegularizedXi, params: &Params) -> Result<SpectralData> {
    let r = xi.r();
    if r <= 0.0 {
        return Err(Error::RadiusZero);
    }
    let t = xi.t();
    let eps = params.epsilon;
    let tm1 = t_family(-1, xi, params)?;
    let w = tm1.norm_sqr() / 4.0;
    let re = t * t - r * r + eps * eps;
    let lambda_plus = Complex64::new(w * re, w * 2.0 * eps * r);
    let lambda_minus = lambda_plus.conj();

    // i xi_k Gamma^k / (2r) with xi_k = -xi^k: equals -(i/2) d_k Gamma^k.
    let d = xi.direction();
    let mut dev = SpinMatrix::zero();
    for k in 0..3 {
        dev = dev + gamma_bilinear(k + 1).unwrap().scale(I.scale(-0.5 * d[k]));
    }
    let half = SpinMatrix::scalar(ONE.scale(0.5));
    let lam_plus = half + dev;
    let lam_minus = half - dev;
    let chi_l = chiral_projector(Chirality::Left);
    let chi_r = chiral_projector(Chirality::Right);
    Ok(SpectralData {
        lambda_plus,
        lambda_minus,
        projectors: [
            [chi_l * lam_plus, chi_r * lam_plus],
            [chi_l * lam_minus, chi_r * lam_minus],
        ],
    })
}

/// Derivative kernel of first-moment probing,
///   d^(x)_mu P(y,x) = (conj(xi_mu)/2)(conj(T^(-2))/conj(T^(-1))) P(y,x)
///                     + (i/2) conj(T^(-1)) gamma_mu,
/// in the continuum setting (massless P).  Requires r > 0.
pub fn projector_derivative(mu: usize, xi: &RegularizedXi, params: &Params) -> Result<SpinMatrix> {
    if mu > 3 {
        return Err(Error::IndexOutOfRange {
            what: "projector_derivative",
            index: mu,
        });
    }
    if xi.r() <= 0.0 {
        return Err(Error::RadiusZero);
    }
    let tm1 = t_family(-1, xi, params)?;
    let tm2 = t_extended(-2, xi, params)?;
    let p_rev = spin_adjoint(&continuum_projector(xi, params)?);
    // xi-bar with the index down: xi_0 = xi^0, xi_k = -xi^k.
    let xi_bar_lower = match mu {
        0 => xi.xi0.conj(),
        k => Complex64::new(-xi.xi_spatial[k - 1], 0.0),
    };
    let ratio = tm2.conj() / tm1.conj();
    let first = p_rev.scale(xi_bar_lower * ratio * 0.5);
    let second = gamma_lower(mu)?.scale(tm1.conj() * I.scale(0.5));
    Ok(first + second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{OracleComponent, SpacetimeDisplacement};
    use crate::linalg::{eigenvalues4, pair_distance};

    fn params() -> Params {
        Params::new(1.0, 0.1, 0.0).unwrap()
    }

    fn xi_dir(t: f64, r: f64, d: [f64; 3]) -> RegularizedXi {
        RegularizedXi::new(&SpacetimeDisplacement::new(t, r, d).unwrap(), &params())
    }

    fn xi(t: f64, r: f64) -> RegularizedXi {
        xi_dir(t, r, [0.0, 0.0, 1.0])
    }

    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64) / ((1u64 << 53) as f64)
        }
        fn dir(&mut self) -> [f64; 3] {
            let u = 2.0 * self.next() - 1.0;
            let phi = 2.0 * std::f64::consts::PI * self.next();
            let s = (1.0 - u * u).sqrt();
            [s * phi.cos(), s * phi.sin(), u]
        }
    }

    #[test]
    fn projector_symmetry_p_star_equals_reversed() {
        let p = params();
        let mut rng = Lcg(7);
        for _ in 0..6 {
            let t = 0.4 * (rng.next() - 0.5);
            let r = 0.05 + 0.3 * rng.next();
            let d = rng.dir();
            let x = xi_dir(t, r, d);
            let px = fermionic_projector(&x, &p).unwrap();
            let p_rev = fermionic_projector(&x.reversed(), &p).unwrap();
            assert!(
                spin_adjoint(&px).distance(&p_rev) <= 1e-12 * px.max_abs(),
                "P(x,y)* != P(y,x)"
            );
        }
    }

    #[test]
    fn massless_limit_has_no_scalar_part() {
        // The scalar basis component of the vector part alone vanishes.
        let p = params();
        let x = xi(0.2, 0.3);
        let v = continuum_projector(&x, &p).unwrap();
        let comp = decompose(&v);
        assert!(comp.scalar.norm() < 1e-14 * v.max_abs());
    }

    #[test]
    fn full_projector_matches_momentum_oracle() {
        let p = params();
        let x = xi(0.15, 0.25);
        let closed = fermionic_projector(&x, &p).unwrap();
        // Assemble P from the three oracle components.
        let s = crate::kernel::momentum_oracle(OracleComponent::Scalar, &x, &p, 1e-9).unwrap();
        let v0 = crate::kernel::momentum_oracle(OracleComponent::Vector0, &x, &p, 1e-9).unwrap();
        let vr =
            crate::kernel::momentum_oracle(OracleComponent::VectorRadial, &x, &p, 1e-9).unwrap();
        let d = x.direction();
        let mut oracle = SpinMatrix::scalar(s.scale(p.mass)) + gamma(0).unwrap().scale(v0);
        for k in 0..3 {
            // gamma^k coefficient is lower-index: V_k = -d_k * (radial), and
            // the oracle VectorRadial already returns the d_k gamma^k
            // coefficient contracted with the direction.
            oracle = oracle + gamma(k + 1).unwrap().scale(vr.scale(d[k]));
        }
        let rel = closed.distance(&oracle) / closed.max_abs();
        assert!(rel < 1e-6, "P assembly vs oracle: {rel:e}");
    }

    #[test]
    fn chain_is_spin_symmetric_and_components_match_closed_forms() {
        let p = params();
        let mut rng = Lcg(99);
        for _ in 0..8 {
            let t = 0.5 * (rng.next() - 0.5);
            let r = 0.05 + 0.4 * rng.next();
            let d = rng.dir();
            let x = xi_dir(t, r, d);
            let a = closed_chain(&x, &p).unwrap();
            assert!(spin_adjoint(&a).distance(&a) < 1e-12 * a.max_abs());

            let comp = chain_components(&a).unwrap();
            let tm1 = t_family(-1, &x, &p).unwrap();
            let t0 = t_family(0, &x, &p).unwrap();
            // b = 1/4 |T^(-1)|^2 xi.xibar + m^2 |T^(0)|^2
            let b_want =
                0.25 * tm1.norm_sqr() * x.xi_dot_xibar() + p.mass * p.mass * t0.norm_sqr();
            assert!((comp.b - b_want).abs() < 1e-11 * b_want.abs());
            // c_i = (1/2) |T^(-1)|^2 eps xi^i  (= -1/2 |T^(-1)|^2 eps xi_i)
            for i in 0..3 {
                let want = 0.5 * tm1.norm_sqr() * p.epsilon * x.xi_spatial[i];
                assert!(
                    (comp.c[i] - want).abs() <= 1e-11 * comp.b.abs(),
                    "c_{i} = {} want {want}",
                    comp.c[i]
                );
            }
            // a_mu = -m Im[xi_mu T^(-1) conj(T^(0))]
            let w = tm1 * t0.conj();
            let a0_want = -p.mass * (x.xi0 * w).im;
            assert!((comp.a[0] - a0_want).abs() < 1e-11 * a.max_abs());
            for i in 0..3 {
                let want = -p.mass * (-x.xi_spatial[i]) * w.im;
                assert!((comp.a[i + 1] - want).abs() < 1e-11 * a.max_abs());
            }
            // reconstruction closes the loop
            assert!(comp.reconstruct().distance(&a) < 1e-10 * a.max_abs());
        }
    }

    #[test]
    fn chain_components_rejects_asymmetric_input() {
        let mut m = SpinMatrix::identity();
        m.entries[0][1] = Complex64::new(0.5, 0.5);
        assert!(matches!(
            chain_components(&m),
            Err(Error::SymmetryViolation { .. })
        ));
    }

    #[test]
    fn coincident_points_have_no_spatial_components() {
        // At t = r = 0 the c and spatial-a components vanish; the time
        // component a_0 = m eps T^(-1) T^(0) survives (both kernels real).
        let p = params();
        let x = xi(0.0, 0.0);
        let a = closed_chain(&x, &p).unwrap();
        let comp = chain_components(&a).unwrap();
        for i in 0..3 {
            assert!(comp.c[i].abs() < 1e-13 * comp.b.abs());
            assert!(comp.a[i + 1].abs() < 1e-13 * comp.b.abs());
        }
        let tm1 = t_family(-1, &x, &p).unwrap();
        let t0 = t_family(0, &x, &p).unwrap();
        let want = p.mass * p.epsilon * (tm1 * t0).re;
        assert!((comp.a[0] - want).abs() < 1e-11 * comp.b.abs());
    }

    #[test]
    fn scalar_chain_eigenvalues_degenerate_to_b() {
        let comp = ChainComponents {
            b: 2.5,
            a: [0.0; 4],
            c: [0.0; 3],
        };
        let (lp, lm) = eigenvalues_closed_form(&comp);
        assert_eq!(lp, Complex64::new(2.5, 0.0));
        assert_eq!(lm, Complex64::new(2.5, 0.0));
    }

    #[test]
    fn closed_form_matches_dense_eigensolver() {
        let p = params();
        let mut rng = Lcg(2024);
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let t = 1.0 * (rng.next() - 0.5) * 2.0 * p.epsilon * 5.0;
            let r = p.epsilon * (0.02 + 10.0 * rng.next());
            let d = rng.dir();
            let x = xi_dir(t, r, d);
            let a = closed_chain(&x, &p).unwrap();
            let comp = chain_components(&a).unwrap();
            let (lp, lm) = eigenvalues_closed_form(&comp);
            let want = [lp, lp, lm, lm];
            let got = eigenvalues4(&a);
            let dist = pair_distance(&got, &want);
            worst = worst.max(dist / a.max_abs());
        }
        assert!(worst < 1e-10, "worst relative pairing distance {worst:e}");
    }

    #[test]
    fn eigenvalues_at_t0_form_conjugate_pair_or_real() {
        // At t = 0 all kernels are real; the eigenvalues are real at r = 0
        // and a conjugate pair for r > 0 (negative discriminant).
        let p = params();
        let a0 = closed_chain(&xi(0.0, 0.0), &p).unwrap();
        let c0 = chain_components(&a0).unwrap();
        let (lp, lm) = eigenvalues_closed_form(&c0);
        assert!(lp.im.abs() < 1e-12 * lp.norm());
        assert!(lm.im.abs() < 1e-12 * lm.norm());

        let a1 = closed_chain(&xi(0.0, 0.3), &p).unwrap();
        let c1 = chain_components(&a1).unwrap();
        let (lp1, lm1) = eigenvalues_closed_form(&c1);
        assert!(lp1.im > 0.0);
        assert!((lp1.conj() - lm1).norm() < 1e-12 * lp1.norm());
    }

    #[test]
    fn continuum_regime_eigenvalues() {
        // t = 0, r = eps: lambda_pm ~ (|T^(-1)|^2/4)(eps^2 - r^2 ± 2 i eps r);
        // the exact pair differs only by the mass term in b and the a-term.
        let p = Params::new(1.0, 0.01, 0.0).unwrap();
        let d = SpacetimeDisplacement::radial(0.0, p.epsilon).unwrap();
        let x = RegularizedXi::new(&d, &p);
        let a = closed_chain(&x, &p).unwrap();
        let comp = chain_components(&a).unwrap();
        let (lp, _) = eigenvalues_closed_form(&comp);
        let spec = continuum_spectral(&x, &p).unwrap();
        let rel = (lp - spec.lambda_plus).norm() / lp.norm();
        assert!(rel < 1e-3, "continuum eigenvalue error {rel:e}");
        // Purely imaginary conjugate pair at t = 0, r = eps up to mass terms:
        // real part (t^2 - r^2 + eps^2) = 0.
        assert!(spec.lambda_plus.re.abs() < 1e-20 * spec.lambda_plus.norm());
    }

    #[test]
    fn exact_projectors_idempotent_and_complete() {
        let p = params();
        let mut rng = Lcg(5150);
        for _ in 0..8 {
            let t = (rng.next() - 0.5) * 0.4;
            let r = 0.05 + 0.4 * rng.next();
            let x = xi_dir(t, r, rng.dir());
            let a = closed_chain(&x, &p).unwrap();
            let comp = chain_components(&a).unwrap();
            let proj = projectors_exact(&a, &comp).unwrap();
            assert!(
                (proj.plus + proj.minus).distance(&SpinMatrix::identity()) < 1e-12,
                "completeness"
            );
            // The spatial a and c components are parallel, so (A-b)^2 is a
            // multiple of the identity and the projectors are idempotent to
            // rounding; no epsilon-dependent residual survives.
            assert!(proj.idempotency_residual < 1e-10);
            assert!(proj.eigen_residual < 1e-10);
            assert!((proj.plus * proj.minus).max_abs() < 1e-10);
        }
    }

    #[test]
    fn projectors_reject_degenerate_chain() {
        let comp = ChainComponents {
            b: 1.0,
            a: [0.0; 4],
            c: [0.0; 3],
        };
        let a = comp.reconstruct();
        assert!(matches!(
            projectors_exact(&a, &comp),
            Err(Error::DegenerateDiscriminant { .. })
        ));
    }

    #[test]
    fn continuum_spectral_projector_algebra() {
        let p = params();
        let mut rng = Lcg(31337);
        for _ in 0..6 {
            let t = (rng.next() - 0.5) * 0.4;
            let r = 0.05 + 0.4 * rng.next();
            let x = xi_dir(t, r, rng.dir());
            let spec = continuum_spectral(&x, &p).unwrap();
            // completeness
            let mut sum = SpinMatrix::zero();
            for (b, c) in spec.all() {
                sum = sum + *spec.projector(b, c);
            }
            assert!(sum.distance(&SpinMatrix::identity()) < 1e-12);
            // idempotency, orthogonality, rank one
            for (b1, c1) in spec.all() {
                let p1 = spec.projector(b1, c1);
                assert!((*p1 * *p1).distance(p1) < 1e-12);
                assert!((p1.trace() - ONE).norm() < 1e-12);
                for (b2, c2) in spec.all() {
                    if (b1, c1) != (b2, c2) {
                        let p2 = spec.projector(b2, c2);
                        assert!((*p1 * *p2).max_abs() < 1e-12);
                    }
                }
            }
            // |lambda_+| = |lambda_-|
            assert!(
                (spec.lambda_plus.norm() - spec.lambda_minus.norm()).abs()
                    <= 1e-10 * spec.lambda_plus.norm()
            );
        }
    }

    #[test]
    fn chiral_projectors_commute_with_spectral_deviation() {
        // [chi_{L/R}, 1/2 ± i xi_k Gamma^k/(2r)] = 0
        let x = xi_dir(0.07, 0.21, [0.6, 0.0, 0.8]);
        let d = x.direction();
        let mut dev = SpinMatrix::zero();
        for k in 0..3 {
            dev = dev + gamma_bilinear(k + 1).unwrap().scale(I.scale(-0.5 * d[k]));
        }
        let half = SpinMatrix::scalar(ONE.scale(0.5));
        for which in [Chirality::Left, Chirality::Right] {
            let chi = chiral_projector(which);
            for lam in [half + dev, half - dev] {
                assert!((chi * lam).distance(&(lam * chi)) < 1e-13);
            }
        }
    }

    #[test]
    fn continuum_spectral_rejects_r0() {
        let p = params();
        assert!(matches!(
            continuum_spectral(&xi(0.1, 0.0), &p),
            Err(Error::RadiusZero)
        ));
        assert!(matches!(
            projector_derivative(0, &xi(0.1, 0.0), &p),
            Err(Error::RadiusZero)
        ));
    }

    #[test]
    fn projector_derivative_matches_finite_differences() {
        let p = params();
        let h = p.epsilon / 50.0;
        let x_pt = [0.0, 0.0, 0.0, 0.0];
        let y_pt = [0.13, 0.04, -0.07, 0.21];
        // P(y, x) as a function of x, via the reversed displacement.
        let p_rev_at = |x: &[f64; 4]| {
            let xi_xy = RegularizedXi::from_points(x, &y_pt, &p);
            spin_adjoint(&continuum_projector(&xi_xy, &p).unwrap())
        };
        let xi0 = RegularizedXi::from_points(&x_pt, &y_pt, &p);
        for mu in 0..4 {
            let mut xp = x_pt;
            let mut xm = x_pt;
            xp[mu] += h;
            xm[mu] -= h;
            let fd = (p_rev_at(&xp) - p_rev_at(&xm)).scale(ONE.scale(1.0 / (2.0 * h)));
            let closed = projector_derivative(mu, &xi0, &p).unwrap();
            let rel = fd.distance(&closed) / closed.max_abs();
            assert!(rel < 1e-4, "mu = {mu}: finite-difference mismatch {rel:e}");
        }
        // mu = 0 closed form carries (i/2) conj(T^(-1)) gamma_0.
        let tm1 = t_family(-1, &xi0, &p).unwrap();
        let second = gamma_lower(0).unwrap().scale(tm1.conj() * I.scale(0.5));
        let p_rev = spin_adjoint(&continuum_projector(&xi0, &p).unwrap());
        let tm2 = t_extended(-2, &xi0, &p).unwrap();
        let first = p_rev.scale(xi0.xi0.conj() * (tm2.conj() / tm1.conj()) * 0.5);
        let total = projector_derivative(0, &xi0, &p).unwrap();
        assert!((total - first).distance(&second) < 1e-12 * total.max_abs());
    }

    #[test]
    fn projector_derivative_inherits_p_symmetry() {
        // P(y,x) = P(x,y)* implies d^(x)_mu P(y,x) = [d^(x)_mu P(x,y)]*,
        // and the first-argument derivative has the closed form
        //   (xi_mu/2)(T^(-2)/T^(-1)) P(x,y) - (i/2) T^(-1) gamma_mu.
        let p = params();
        let x = xi_dir(0.12, 0.2, [0.0, 0.6, 0.8]);
        let tm1 = t_family(-1, &x, &p).unwrap();
        let tm2 = t_extended(-2, &x, &p).unwrap();
        let p_cont = continuum_projector(&x, &p).unwrap();
        for mu in 0..4 {
            let xi_lower = match mu {
                0 => x.xi0,
                k => Complex64::new(-x.xi_spatial[k - 1], 0.0),
            };
            let first_arg = p_cont.scale(xi_lower * (tm2 / tm1) * 0.5)
                - gamma_lower(mu).unwrap().scale(tm1 * I.scale(0.5));
            let lhs = projector_derivative(mu, &x, &p).unwrap();
            let rhs = spin_adjoint(&first_arg);
            assert!(
                lhs.distance(&rhs) < 1e-12 * lhs.max_abs(),
                "mu = {mu}: derivative kernel breaks the P symmetry"
            );
        }
    }
}
