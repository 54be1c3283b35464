//! Angular reduction and adaptive 2D quadrature of the current coefficients,
//! ratio verification, extraction of the coupling constant, and epsilon
//! scans.
//!
//! All integrals run over the rescaled variables (u, v) = (t/eps, r/eps) on
//! the truncated box |u| <= L, 0 < v <= L.  The integrands concentrate
//! within a few regularization lengths of the origin with a slowly decaying
//! ridge along the light cone; the adaptive subdivision follows both.


use crate::bessel::kv_all;
use crate::currents::frozen_ratio;
use crate::error::{Error, Result};
use crate::kernel::{z_arg, Params, RegularizedXi, SpacetimeDisplacement};
use crate::quad::quad2d;

const PI: f64 = std::f64::consts::PI;

/// Domain and tolerance of the coefficient quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Integration box |t| <= L eps, r <= L eps.
    pub domain_scale: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// When set, `coefficient` re-runs on the doubled box and fails if the
    /// result moves by more than rel_tol.  The absolute coefficients carry
    /// a slowly decaying light-cone tail, so this is an expensive strict
    /// check, not the default.
    pub check_tail: bool,
}

impl QuadratureSpec {
    pub fn new(domain_scale: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(domain_scale >= 10.0) {
            return Err(Error::InvalidParams(format!(
                "domain scale must be >= 10, got {domain_scale}"
            )));
        }
        if !(1e-10..=1e-3).contains(&rel_tol) {
            return Err(Error::InvalidParams(format!(
                "rel_tol must lie in [1e-10, 1e-3], got {rel_tol:e}"
            )));
        }
        if max_subdivisions == 0 {
            return Err(Error::InvalidParams("max_subdivisions must be > 0".into()));
        }
        Ok(QuadratureSpec {
            domain_scale,
            rel_tol,
            max_subdivisions,
            check_tail: false,
        })
    }

    pub fn with_tail_check(mut self) -> Self {
        self.check_tail = true;
        self
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            domain_scale: 40.0,
            rel_tol: 1e-8,
            max_subdivisions: 40000,
            check_tail: false,
        }
    }
}

/// Names of the current coefficients: the one-sector family (C0 and the
/// pseudo-scalar/pseudo-bilinear first moments) and the two-sector family
/// (scalar/bilinear first moments).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CoefficientName {
    C0,
    CtPs,
    CtPb,
    CrPs,
    CrPb,
    CtS,
    CtB,
    CrS,
    CrB,
}

impl CoefficientName {
    pub const ALL: [CoefficientName; 9] = [
        CoefficientName::C0,
        CoefficientName::CtPs,
        CoefficientName::CtPb,
        CoefficientName::CrPs,
        CoefficientName::CrPb,
        CoefficientName::CtS,
        CoefficientName::CtB,
        CoefficientName::CrS,
        CoefficientName::CrB,
    ];

    /// The five coefficients entering the coupling-constant ratios.
    pub const ONE_SECTOR: [CoefficientName; 5] = [
        CoefficientName::C0,
        CoefficientName::CtPs,
        CoefficientName::CtPb,
        CoefficientName::CrPs,
        CoefficientName::CrPb,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CoefficientName::C0 => "C0",
            CoefficientName::CtPs => "Ct_PS",
            CoefficientName::CtPb => "Ct_PB",
            CoefficientName::CrPs => "Cr_PS",
            CoefficientName::CrPb => "Cr_PB",
            CoefficientName::CtS => "Ct_S",
            CoefficientName::CtB => "Ct_B",
            CoefficientName::CrS => "Cr_S",
            CoefficientName::CrB => "Cr_B",
        }
    }
}

impl std::fmt::Display for CoefficientName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether the structure functions come from the Dirac perturbation or the
/// (frozen) Maxwell one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Dirac,
    MaxwellFrozen,
}

/// Computed coefficients with error estimates and their provenance.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    entries: Vec<(CoefficientName, f64, f64)>,
    pub family: Family,
    pub params: Params,
    pub quad: QuadratureSpec,
}

impl CoefficientTable {
    pub fn value(&self, name: CoefficientName) -> Result<f64> {
        self.entries
            .iter()
            .find(|(n, _, _)| *n == name)
            .map(|(_, v, _)| *v)
            .ok_or_else(|| Error::InvalidParams(format!("coefficient {name} not in table")))
    }

    pub fn error_estimate(&self, name: CoefficientName) -> Result<f64> {
        self.entries
            .iter()
            .find(|(n, _, _)| *n == name)
            .map(|(_, _, e)| *e)
            .ok_or_else(|| Error::InvalidParams(format!("coefficient {name} not in table")))
    }

    pub fn iter(&self) -> impl Iterator<Item = &(CoefficientName, f64, f64)> {
        self.entries.iter()
    }

    #[cfg(test)]
    pub(crate) fn stub_for_tests(params: &Params) -> Self {
        let values = [2.3, -0.7, 1.9, 0.45, -1.1, 3.2, 0.8, -0.35, 1.4];
        CoefficientTable {
            entries: CoefficientName::ALL
                .iter()
                .zip(values)
                .map(|(&n, v)| (n, v, 1e-12))
                .collect(),
            family: Family::Dirac,
            params: *params,
            quad: QuadratureSpec::default(),
        }
    }

    #[cfg(test)]
    pub(crate) fn scaled_for_tests(&self, factor: f64) -> Self {
        CoefficientTable {
            entries: self
                .entries
                .iter()
                .map(|&(n, v, e)| (n, factor * v, factor.abs() * e))
                .collect(),
            family: Family::MaxwellFrozen,
            params: self.params,
            quad: self.quad,
        }
    }
}

/// S^2 average of a single direction factor xi^i / r: zero by symmetry.
pub fn angular_linear_weight(i: usize) -> Result<f64> {
    if !(1..=3).contains(&i) {
        return Err(Error::IndexOutOfRange {
            what: "angular weight",
            index: i,
        });
    }
    Ok(0.0)
}

/// int_{S^2} xi^i xi^j / r^2 dOmega = (4 pi / 3) delta^{ij}.
pub fn angular_pair_weight(i: usize, j: usize) -> Result<f64> {
    if !(1..=3).contains(&i) || !(1..=3).contains(&j) {
        return Err(Error::IndexOutOfRange {
            what: "angular weight",
            index: i.max(j),
        });
    }
    Ok(if i == j { 4.0 * PI / 3.0 } else { 0.0 })
}

/// Everything the coefficient integrands need at one (t, r) point, computed
/// from a single Bessel evaluation.
struct PointData {
    f_s: f64,
    f_a: f64,
    /// Im[(T^(-2)/T^(-1)) xi^0]
    ratio_im_xi0: f64,
    /// Im[T^(-2)/T^(-1)]
    ratio_im: f64,
    /// |T^(-1)|^4 / |lambda|^2 = 16 m^4 / |z^2|^2 with continuum eigenvalues.
    big_r: f64,
}

fn point_data(t: f64, r: f64, params: &Params, family: Family) -> Result<PointData> {
    let disp = SpacetimeDisplacement::radial(t, r)?;
    let xi = RegularizedXi::new(&disp, params);
    let z = z_arg(&xi, params);
    let k = kv_all(z)?;
    let m = params.mass;
    let m2 = m * m;
    let c8 = 1.0 / (8.0 * PI * PI * PI);
    let tm1 = -(k[2] / (z * z)).scale(2.0 * c8 * m2 * m2);
    let tm2 = (k[3] / (z * z * z)).scale(4.0 * c8 * m2 * m2 * m2);

    let eps = params.epsilon;
    let rho = xi.xi_dot_xibar();
    let w = tm1.norm_sqr() / (8.0 * PI);
    let t_xi0 = tm1 * xi.xi0;
    let mut f_s = w * (2.0 * eps * r * r * tm1.re - rho * t_xi0.im);
    let mut f_a = w * (2.0 * eps * r * t_xi0.re - r * rho * tm1.im);
    if family == Family::MaxwellFrozen {
        let fr = frozen_ratio(params.c);
        f_s *= fr;
        f_a *= fr;
    }

    let ratio = tm2 / tm1;
    let z2 = z * z;
    let big_r = 16.0 * m2 * m2 / z2.norm_sqr();
    Ok(PointData {
        f_s,
        f_a,
        ratio_im_xi0: (ratio * xi.xi0).im,
        ratio_im: ratio.im,
        big_r,
    })
}

/// The (t, r) integrand of a named coefficient before the Jacobian of the
/// (u, v) rescaling.
fn integrand(name: CoefficientName, t: f64, r: f64, params: &Params, family: Family) -> f64 {
    let d = match point_data(t, r, params, family) {
        Ok(d) => d,
        Err(_) => return 0.0,
    };
    let eps = params.epsilon;
    let r2 = r * r;
    let quad_weight = t * t + r2 + eps * eps;
    match name {
        CoefficientName::C0 => 4.0 * PI * r2 * d.f_s,
        CoefficientName::CtPs => -(PI / 2.0) * d.big_r * d.f_a * t * r2 * r * eps,
        CoefficientName::CrPs => -(PI / 12.0) * d.big_r * d.f_s * quad_weight * r2 * eps,
        CoefficientName::CtPb => {
            -(PI / 12.0) * d.big_r * d.f_s * quad_weight * r2 * eps
                + (2.0 * PI / 3.0) * d.f_s * r2 * d.ratio_im_xi0
        }
        CoefficientName::CrPb => {
            -(PI / 2.0) * d.big_r * d.f_a * t * r2 * r * eps
                + (2.0 * PI / 3.0) * d.f_a * r2 * r * d.ratio_im
        }
        CoefficientName::CtS => {
            -(PI / 2.0) * d.big_r * d.f_s * quad_weight * r2 * eps
                - 4.0 * PI * d.f_s * r2 * d.ratio_im_xi0
        }
        CoefficientName::CrS => {
            -(PI / 3.0) * d.big_r * d.f_a * t * r2 * r * eps
                - (4.0 * PI / 3.0) * d.f_a * r2 * r * d.ratio_im
        }
        CoefficientName::CtB => {
            (PI / 24.0) * d.big_r * d.f_s * quad_weight * r2 * eps
                + (4.0 * PI / 3.0) * d.f_s * r2 * d.ratio_im_xi0
        }
        CoefficientName::CrB => -(PI / 2.0) * d.big_r * d.f_s * eps * quad_weight * r2,
    }
}

fn integrate(
    f: &dyn Fn(f64, f64) -> f64,
    params: &Params,
    quad: &QuadratureSpec,
    scale_l: f64,
    what: &str,
) -> Result<(f64, f64)> {
    let eps = params.epsilon;
    let l = scale_l;
    let g = |u: f64, v: f64| f(eps * u, eps * v) * eps * eps;
    let r = quad2d(
        &g,
        (-l, l, 0.0, l),
        quad.rel_tol,
        quad.max_subdivisions,
        what,
    )?;
    Ok((r.value, r.error))
}

/// Adaptive 2D quadrature of a named coefficient.
pub fn coefficient(
    name: CoefficientName,
    family: Family,
    params: &Params,
    quad: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let f = |t: f64, r: f64| integrand(name, t, r, params, family);
    let (value, error) = integrate(&f, params, quad, quad.domain_scale, name.as_str())?;
    if quad.check_tail {
        let (doubled, _) = integrate(&f, params, quad, 2.0 * quad.domain_scale, name.as_str())?;
        let rel_change = (doubled - value).abs() / value.abs().max(f64::MIN_POSITIVE);
        if rel_change > quad.rel_tol {
            return Err(Error::TailBoundViolated {
                rel_change,
                rel_tol: quad.rel_tol,
            });
        }
    }
    Ok((value, error))
}

/// All nine coefficients of one family.
pub fn coefficient_table(
    family: Family,
    params: &Params,
    quad: &QuadratureSpec,
) -> Result<CoefficientTable> {
    let mut entries = Vec::with_capacity(9);
    for name in CoefficientName::ALL {
        let (v, e) = coefficient(name, family, params, quad)?;
        entries.push((name, v, e));
    }
    Ok(CoefficientTable {
        entries,
        family,
        params: *params,
        quad: *quad,
    })
}

/// The parity diagnostic: the C0 integrand with f_a substituted for f_s is
/// odd in t and must integrate to zero within rel_tol times the integrand
/// scale.  Returns (value, scale).
pub fn odd_parity_residual(params: &Params, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    let f = |t: f64, r: f64| match point_data(t, r, params, Family::Dirac) {
        Ok(d) => 4.0 * PI * r * r * d.f_a,
        Err(_) => 0.0,
    };
    let eps = params.epsilon;
    let l = quad.domain_scale;
    let g = |u: f64, v: f64| f(eps * u, eps * v) * eps * eps;
    let r = quad2d(
        &g,
        (-l, l, 0.0, l),
        quad.rel_tol,
        quad.max_subdivisions,
        "odd parity check",
    )?;
    Ok((r.value, r.abs_scale))
}

/// Relative change of a coefficient when the integration box is doubled:
/// the operational tail bound of the truncated integrals.
pub fn tail_change(
    name: CoefficientName,
    family: Family,
    params: &Params,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let f = |t: f64, r: f64| integrand(name, t, r, params, family);
    let (value, _) = integrate(&f, params, quad, quad.domain_scale, name.as_str())?;
    let (doubled, _) = integrate(&f, params, quad, 2.0 * quad.domain_scale, name.as_str())?;
    Ok((doubled - value).abs() / value.abs().max(f64::MIN_POSITIVE))
}

/// Coupling constant from the five Maxwell/Dirac coefficient ratios.
#[derive(Debug, Clone, Copy)]
pub struct AlphaResult {
    pub alpha: f64,
    /// Maximal relative spread among the five ratios.
    pub ratio_spread: f64,
    /// The ratios C^(M)/C^(D) ordered as [C0, Ct_PS, Ct_PB, Cr_PS, Cr_PB].
    pub ratios: [f64; 5],
}

/// Compute all five Maxwell/Dirac coefficient ratios; alpha is the inverse
/// of the C0 ratio, the other four serve as consistency checks.
pub fn coupling_alpha(params: &Params, quad: &QuadratureSpec) -> Result<AlphaResult> {
    let mut ratios = [0.0f64; 5];
    for (k, name) in CoefficientName::ONE_SECTOR.iter().enumerate() {
        let (d_val, d_err) = coefficient(*name, Family::Dirac, params, quad)?;
        let (m_val, _) = coefficient(*name, Family::MaxwellFrozen, params, quad)?;
        if d_val.abs() <= 10.0 * d_err.max(f64::MIN_POSITIVE) {
            return Err(Error::VanishingCoefficient(name.as_str()));
        }
        ratios[k] = m_val / d_val;
    }
    let mean: f64 = ratios.iter().sum::<f64>() / 5.0;
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let spread = (max - min) / mean.abs().max(f64::MIN_POSITIVE);
    Ok(AlphaResult {
        alpha: 1.0 / ratios[0],
        ratio_spread: spread,
        ratios,
    })
}

/// One row of an epsilon scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub epsilon: f64,
    pub table: CoefficientTable,
    pub alpha: f64,
    pub ratio_spread: f64,
    /// |T^(-1)(0,0)|^2, the kernel peak that scales as eps^{-8}.
    pub peak: f64,
}

/// Coefficients, coupling constant and kernel peak for each epsilon.
/// Rows keep the input order.
pub fn epsilon_scan(
    eps_list: &[f64],
    params_base: &Params,
    quad: &QuadratureSpec,
) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let params = params_base.with_epsilon(eps)?;
        let table = coefficient_table(Family::Dirac, &params, quad)?;
        let alpha = coupling_alpha(&params, quad)?;
        let origin = RegularizedXi::new(&SpacetimeDisplacement::radial(0.0, 0.0)?, &params);
        let peak = crate::kernel::t_family(-1, &origin, &params)?.norm_sqr();
        rows.push(ScanRow {
            epsilon: eps,
            table,
            alpha: alpha.alpha,
            ratio_spread: alpha.ratio_spread,
            peak,
        });
    }
    Ok(rows)
}

/// Least-squares slope of ln(y) against ln(x).
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}
