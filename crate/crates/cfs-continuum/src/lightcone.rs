//! The regularized light-cone expansion: the series solution ΔT[A] of the
//! inhomogeneous Klein-Gordon equation, and the first-order perturbation of
//! the kernel by vector and axial polynomial potentials.
//!
//! Polynomial potentials make the series an exact finite sum (box^n A
//! vanishes beyond n = deg/2) and every tau integral a closed-form monomial
//! integral, so no convergence questions arise.

use num_complex::Complex64;

use crate::clifford::{gamma, gamma5, spin_adjoint, SpinMatrix, I, ONE, ZERO};
use crate::currents::SpinorValue;
use crate::error::{Error, Result};
use crate::kernel::{t_extended, t_family, Params, RegularizedXi};

/// Highest series index n with T^(n+1) available (T^(3)).
const MAX_SERIES_ORDER: usize = 2;

/// A real-coefficient polynomial in the four spacetime coordinates,
/// evaluable at complex arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly4 {
    /// (coefficient, exponents per coordinate), kept sorted and combined.
    terms: Vec<(f64, [u8; 4])>,
}

impl Poly4 {
    pub fn zero() -> Self {
        Poly4 { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly4::from_terms(vec![(c, [0, 0, 0, 0])])
    }

    /// The coordinate x^mu as a polynomial.
    pub fn coordinate(mu: usize) -> Self {
        let mut e = [0u8; 4];
        e[mu] = 1;
        Poly4::from_terms(vec![(1.0, e)])
    }

    pub fn from_terms(terms: Vec<(f64, [u8; 4])>) -> Self {
        let mut p = Poly4 { terms };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        self.terms.sort_by_key(|(_, e)| *e);
        let mut out: Vec<(f64, [u8; 4])> = Vec::with_capacity(self.terms.len());
        for &(c, e) in &self.terms {
            if let Some(last) = out.last_mut() {
                if last.1 == e {
                    last.0 += c;
                    continue;
                }
            }
            out.push((c, e));
        }
        out.retain(|(c, _)| *c != 0.0);
        self.terms = out;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, e)| e.iter().map(|&v| v as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Poly4) -> Poly4 {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Poly4::from_terms(terms)
    }

    pub fn scale(&self, s: f64) -> Poly4 {
        Poly4::from_terms(self.terms.iter().map(|&(c, e)| (c * s, e)).collect())
    }

    pub fn mul(&self, other: &Poly4) -> Poly4 {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(c1, e1) in &self.terms {
            for &(c2, e2) in &other.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                terms.push((c1 * c2, e));
            }
        }
        Poly4::from_terms(terms)
    }

    /// Partial derivative with respect to x^mu.
    pub fn partial(&self, mu: usize) -> Poly4 {
        let mut terms = Vec::new();
        for &(c, e) in &self.terms {
            if e[mu] > 0 {
                let mut e2 = e;
                e2[mu] -= 1;
                terms.push((c * e[mu] as f64, e2));
            }
        }
        Poly4::from_terms(terms)
    }

    /// Wave operator box = d0^2 - d1^2 - d2^2 - d3^2.
    pub fn box_op(&self) -> Poly4 {
        let mut out = self.partial(0).partial(0);
        for k in 1..4 {
            out = out.add(&self.partial(k).partial(k).scale(-1.0));
        }
        out
    }

    pub fn eval(&self, x: &[Complex64; 4]) -> Complex64 {
        let mut sum = ZERO;
        for &(c, e) in &self.terms {
            let mut v = Complex64::new(c, 0.0);
            for mu in 0..4 {
                for _ in 0..e[mu] {
                    v *= x[mu];
                }
            }
            sum += v;
        }
        sum
    }

    /// Coefficients in tau of p(x + tau xi), constant term first.
    fn along_segment(&self, x: &[Complex64; 4], xi: &[Complex64; 4]) -> Vec<Complex64> {
        let deg = self.degree();
        let mut out = vec![ZERO; deg + 1];
        for &(c, e) in &self.terms {
            // Expand prod_mu (x_mu + tau xi_mu)^{e_mu} by convolution.
            let mut poly = vec![Complex64::new(c, 0.0)];
            for mu in 0..4 {
                for _ in 0..e[mu] {
                    let mut next = vec![ZERO; poly.len() + 1];
                    for (j, &pc) in poly.iter().enumerate() {
                        next[j] += pc * x[mu];
                        next[j + 1] += pc * xi[mu];
                    }
                    poly = next;
                }
            }
            for (j, &pc) in poly.iter().enumerate() {
                out[j] += pc;
            }
        }
        out
    }
}

/// int_0^1 (sum_j c_j tau^j)(sum_k w_k tau^k) d tau, exactly.
fn integrate_tau(coeffs: &[Complex64], weight: &[f64]) -> Complex64 {
    let mut sum = ZERO;
    for (j, &c) in coeffs.iter().enumerate() {
        for (k, &w) in weight.iter().enumerate() {
            sum += c.scale(w / (j + k + 1) as f64);
        }
    }
    sum
}

/// Coefficients of (tau - tau^2)^n.
fn tau_weight_pow(n: usize) -> Vec<f64> {
    let mut w = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; w.len() + 2];
        for (j, &c) in w.iter().enumerate() {
            next[j + 1] += c;
            next[j + 2] -= c;
        }
        w = next;
    }
    w
}

/// A polynomial vector potential A_mu (lower index).
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPotential {
    pub components: [Poly4; 4],
}

impl PolynomialPotential {
    pub fn new(components: [Poly4; 4]) -> Self {
        PolynomialPotential { components }
    }

    /// Pure gauge potential A_mu = d_mu Lambda.
    pub fn pure_gauge(lambda: &Poly4) -> Self {
        PolynomialPotential {
            components: [
                lambda.partial(0),
                lambda.partial(1),
                lambda.partial(2),
                lambda.partial(3),
            ],
        }
    }

    pub fn degree(&self) -> usize {
        self.components.iter().map(|p| p.degree()).max().unwrap_or(0)
    }

    /// F_{mu nu} = d_mu A_nu - d_nu A_mu (both indices down).
    pub fn field_tensor(&self) -> [[Poly4; 4]; 4] {
        std::array::from_fn(|mu| {
            std::array::from_fn(|nu| {
                self.components[nu]
                    .partial(mu)
                    .add(&self.components[mu].partial(nu).scale(-1.0))
            })
        })
    }

    /// The current j_mu = d^nu F_{nu mu} (index down).
    pub fn current(&self) -> [Poly4; 4] {
        let f = self.field_tensor();
        std::array::from_fn(|mu| {
            let mut sum = Poly4::zero();
            for nu in 0..4 {
                let metric = if nu == 0 { 1.0 } else { -1.0 };
                sum = sum.add(&f[nu][mu].partial(nu).scale(metric));
            }
            sum
        })
    }
}

/// Truncation order for the light-cone series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    pub n_max: usize,
    /// Magnitude of the first omitted term; zero when the series truncates
    /// exactly (always the case for polynomial potentials).
    pub tail_bound: f64,
}

impl SeriesTruncation {
    /// Exact truncation for a potential of the given degree.
    pub fn exact_for_degree(degree: usize) -> Self {
        SeriesTruncation {
            n_max: degree / 2,
            tail_bound: 0.0,
        }
    }
}

fn complex_xi(xi: &RegularizedXi) -> [Complex64; 4] {
    [
        xi.xi0,
        Complex64::new(xi.xi_spatial[0], 0.0),
        Complex64::new(xi.xi_spatial[1], 0.0),
        Complex64::new(xi.xi_spatial[2], 0.0),
    ]
}

fn complex_point(x: &[f64; 4]) -> [Complex64; 4] {
    std::array::from_fn(|k| Complex64::new(x[k], 0.0))
}

/// The series solution
///   ΔT[a](x,y) = Σ_n T^(n+1)/n! ∫_0^1 (τ-τ²)^n (box^n a)(x + τ ξ) dτ
/// of (box + m²) ΔT = a(x) T^(0), evaluated exactly for polynomial a.
pub fn delta_t(
    a: &Poly4,
    x: &[f64; 4],
    y: &[f64; 4],
    params: &Params,
    trunc: &SeriesTruncation,
) -> Result<Complex64> {
    let xi = RegularizedXi::from_points(x, y, params);
    // Exact truncation order: iterate box until the polynomial dies.
    let mut boxes = vec![a.clone()];
    loop {
        let next = boxes.last().unwrap().box_op();
        if next.is_zero() {
            break;
        }
        boxes.push(next);
    }
    let needed = boxes.len() - 1;
    if trunc.n_max < needed {
        return Err(Error::TruncationTooLow {
            requested: trunc.n_max,
            required: needed,
        });
    }
    if needed > MAX_SERIES_ORDER {
        return Err(Error::UnsupportedOrder(needed as i32 + 1));
    }
    let xc = complex_point(x);
    let xic = complex_xi(&xi);
    let mut sum = ZERO;
    let mut factorial = 1.0f64;
    for (n, bn) in boxes.iter().enumerate() {
        if n > 0 {
            factorial *= n as f64;
        }
        if bn.is_zero() {
            break;
        }
        let coeffs = bn.along_segment(&xc, &xic);
        let tau_int = integrate_tau(&coeffs, &tau_weight_pow(n));
        let t_next = t_extended(n as i32 + 1, &xi, params)?;
        sum += t_next * tau_int.scale(1.0 / factorial);
    }
    Ok(sum)
}

/// Perturbation flavor: a plain vector potential or the axial variant with
/// a gamma5 insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Vector,
    Axial,
}

/// The three groups of the first-order perturbation, already symmetrized.
#[derive(Debug, Clone, Copy)]
pub struct MaxwellParts {
    /// The pure gauge-phase term proportional to int A.xi.
    pub gauge_phase: SpinMatrix,
    /// Terms carrying the field tensor F itself.
    pub field: SpinMatrix,
    /// Terms carrying the current d^nu F_{mu nu}; the only part that feeds
    /// the structure functions.
    pub current: SpinMatrix,
}

impl MaxwellParts {
    pub fn total(&self) -> SpinMatrix {
        self.gauge_phase + self.field + self.current
    }
}

/// Raw five-term expansion at one argument ordering.
fn maxwell_raw(
    a: &PolynomialPotential,
    kind: PotentialKind,
    x: &[f64; 4],
    y: &[f64; 4],
    params: &Params,
) -> Result<[SpinMatrix; 3]> {
    let xi = RegularizedXi::from_points(x, y, params);
    let xc = complex_point(x);
    let xic = complex_xi(&xi);
    let tm1 = t_family(-1, &xi, params)?;
    let t0 = t_family(0, &xi, params)?;
    let t1 = t_family(1, &xi, params)?;
    let xi_slash = crate::chain::slash(xi.xi0, &xi.xi_spatial);

    let f = a.field_tensor();
    // d^nu F_{mu nu} (mu down) = -(current)_mu.
    let j = a.current();
    let dva: [Poly4; 4] = std::array::from_fn(|mu| j[mu].scale(-1.0));

    let w1: Vec<f64> = vec![1.0];
    let w_tau = tau_weight_pow(1); // tau - tau^2
    let w_1mt = vec![1.0, -1.0]; // 1 - tau
    let w_1mt2 = vec![1.0, -2.0, 1.0]; // (1 - tau)^2

    // Term 1: (1/2) xi-slash T^(-1) int A_mu xi^mu.
    let mut a_dot_xi = ZERO;
    for mu in 0..4 {
        let coeffs = a.components[mu].along_segment(&xc, &xic);
        a_dot_xi += integrate_tau(&coeffs, &w1) * xic[mu];
    }
    let gauge_phase = xi_slash.scale(a_dot_xi * tm1 * 0.5);

    // Term 2: -(1/2) xi-slash xi^mu T^(0) int (tau - tau^2) d^nu F_{mu nu}.
    let mut t2_scalar = ZERO;
    for mu in 0..4 {
        let coeffs = dva[mu].along_segment(&xc, &xic);
        t2_scalar += integrate_tau(&coeffs, &w_tau) * xic[mu];
    }
    let term2 = xi_slash.scale(t2_scalar * t0 * (-0.5));

    // Term 3: (1/4) xi-slash gamma^mu gamma^nu T^(0) int F_{mu nu}.
    let mut term3 = SpinMatrix::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            if f[mu][nu].is_zero() {
                continue;
            }
            let coeffs = f[mu][nu].along_segment(&xc, &xic);
            let int = integrate_tau(&coeffs, &w1);
            term3 = term3 + (xi_slash * gamma(mu)? * gamma(nu)?).scale(int * t0 * 0.25);
        }
    }

    // Term 4: - xi^mu gamma^nu T^(0) int (1 - tau) F_{mu nu}.
    let mut term4 = SpinMatrix::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            if f[mu][nu].is_zero() {
                continue;
            }
            let coeffs = f[mu][nu].along_segment(&xc, &xic);
            let int = integrate_tau(&coeffs, &w_1mt);
            term4 = term4 + gamma(nu)?.scale(-xic[mu] * int * t0);
        }
    }

    // Term 5: - gamma^mu T^(1) int (1 - tau)^2 d^nu F_{mu nu}.
    let mut term5 = SpinMatrix::zero();
    for mu in 0..4 {
        let coeffs = dva[mu].along_segment(&xc, &xic);
        let int = integrate_tau(&coeffs, &w_1mt2);
        term5 = term5 + gamma(mu)?.scale(-int * t1);
    }

    let mut parts = [gauge_phase, term3 + term4, term2 + term5];
    if kind == PotentialKind::Axial {
        let g5 = gamma5();
        for m in &mut parts {
            *m = -(g5 * *m);
        }
    }
    Ok(parts)
}

/// First-order kernel perturbation for a polynomial vector or axial
/// potential: the five-term light-cone expansion, symmetrized so that
/// spin_adjoint(D_vP(x,y)) = D_vP(y,x) holds by construction (the raw
/// truncation violates it at order eps times the potential variation).
pub fn maxwell_perturbation(
    a: &PolynomialPotential,
    kind: PotentialKind,
    x: &[f64; 4],
    y: &[f64; 4],
    params: &Params,
) -> Result<MaxwellParts> {
    let fwd = maxwell_raw(a, kind, x, y, params)?;
    let bwd = maxwell_raw(a, kind, y, x, params)?;
    let sym = |i: usize| (fwd[i] + spin_adjoint(&bwd[i])).scale(ONE.scale(0.5));
    Ok(MaxwellParts {
        gauge_phase: sym(0),
        field: sym(1),
        current: sym(2),
    })
}

/// Dirac particle perturbation in the constant-spinor localization
/// approximation: D_uP = (1/2π) φ φ-bar, a rank-one spin-symmetric matrix
/// independent of the displacement.
pub fn dirac_perturbation(phi: &SpinorValue, _params: &Params) -> SpinMatrix {
    let g0 = gamma(0).unwrap();
    let mut m = SpinMatrix::zero();
    // phi-bar = phi^dagger gamma^0 as a row vector.
    let mut bar = [ZERO; 4];
    for c in 0..4 {
        for k in 0..4 {
            bar[c] += phi.phi[k].conj() * g0.entries[k][c];
        }
    }
    for r in 0..4 {
        for c in 0..4 {
            m.entries[r][c] = phi.phi[r] * bar[c];
        }
    }
    m.scale(ONE.scale(1.0 / (2.0 * std::f64::consts::PI)))
}

/// Finite-difference residuals of the two ladder identities at step h:
/// the gradient ladder and the Klein-Gordon ladder, both relative to the
/// magnitude of their right-hand sides.
pub fn ladder_residuals(
    n: i32,
    xi: &RegularizedXi,
    params: &Params,
    h: f64,
) -> Result<(f64, f64)> {
    if h > params.epsilon / 10.0 {
        return Err(Error::StepTooLarge(h));
    }
    let t = xi.t();
    let r = xi.r();
    if r <= h {
        return Err(Error::RadiusZero);
    }
    let at = |tt: f64, rr: f64, order: i32| -> Result<Complex64> {
        let d = crate::kernel::SpacetimeDisplacement::radial(tt, rr)?;
        t_extended(order, &RegularizedXi::new(&d, params), params)
    };

    // Gradient ladder in the time direction: -d_t T^(n+1) = (xi^0/2) T^(n).
    let dt = (at(t + h, r, n + 1)? - at(t - h, r, n + 1)?).scale(1.0 / (2.0 * h));
    let rhs1 = (xi.xi0 * at(t, r, n)?).scale(0.5);
    let res1 = (-dt - rhs1).norm() / rhs1.norm().max(f64::MIN_POSITIVE);

    // Klein-Gordon ladder: (box + m^2) T^(n+1) = -(n+1) T^(n).
    let c = at(t, r, n + 1)?;
    let dtt = (at(t + h, r, n + 1)? - c.scale(2.0) + at(t - h, r, n + 1)?).scale(1.0 / (h * h));
    let drr = (at(t, r + h, n + 1)? - c.scale(2.0) + at(t, r - h, n + 1)?).scale(1.0 / (h * h));
    let dr = (at(t, r + h, n + 1)? - at(t, r - h, n + 1)?).scale(1.0 / (2.0 * h));
    let boxed = dtt - drr - dr.scale(2.0 / r);
    let lhs = boxed + c.scale(params.mass * params.mass);
    let rhs2 = at(t, r, n)?.scale(-(n as f64 + 1.0));
    let res2 = (lhs - rhs2).norm() / rhs2.norm().max(f64::MIN_POSITIVE);
    Ok((res1, res2))
}
