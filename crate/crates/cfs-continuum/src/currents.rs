//! Trace kernels of the perturbed closed chain, the Dirac and Maxwell
//! structure functions, and assembly of the probed current moments.
//!
//! The decomposition contract of the trace kernel is
//!
//!   Re tr[conj(λ_s) Λ_(s,h) D_uA]
//!     = (1/4) [ f_s j_v^0 - f_a j_v^rad + s h (f_s j_a^rad - f_a j_a^0) ]
//!
//! with s = ±1 the eigenvalue branch, h = +1 (left) / -1 (right) the
//! chirality, and j^rad the radial component d_k j^k along the displacement
//! direction.  The structure functions carry the normalization of their
//! closed forms; the overall 1/4 sits in the decomposition.

use num_complex::Complex64;

use crate::chain::{Branch, SpectralData};
use crate::clifford::{gamma, gamma5, spin_adjoint, Chirality, SpinMatrix, ZERO};
use crate::coeffs::{CoefficientName, CoefficientTable};
use crate::error::{Error, Result};
use crate::kernel::{t_family, z_arg, Params, RegularizedXi, SpacetimeDisplacement};

const PI: f64 = std::f64::consts::PI;

/// A constant spinor with its derived vector and axial currents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorValue {
    pub phi: [Complex64; 4],
}

impl SpinorValue {
    pub fn new(phi: [Complex64; 4]) -> Self {
        SpinorValue { phi }
    }

    fn bilinear(&self, m: &SpinMatrix) -> Complex64 {
        // phi-bar M phi with phi-bar = phi^dagger gamma^0.
        let g0 = gamma(0).unwrap();
        let v = m.apply(&self.phi);
        let gv = g0.apply(&v);
        let mut sum = ZERO;
        for k in 0..4 {
            sum += self.phi[k].conj() * gv[k];
        }
        sum
    }

    /// Vector current j_v^mu = phi-bar gamma^mu phi (real).
    pub fn j_v(&self, mu: usize) -> f64 {
        self.bilinear(&gamma(mu).unwrap()).re
    }

    /// Axial current j_a^mu = phi-bar gamma^5 gamma^mu phi (real).
    pub fn j_a(&self, mu: usize) -> f64 {
        self.bilinear(&(gamma5() * gamma(mu).unwrap())).re
    }

    /// Radial component d_k j^k along a unit direction.
    pub fn j_v_radial(&self, d: &[f64; 3]) -> f64 {
        (0..3).map(|k| d[k] * self.j_v(k + 1)).sum()
    }

    pub fn j_a_radial(&self, d: &[f64; 3]) -> f64 {
        (0..3).map(|k| d[k] * self.j_a(k + 1)).sum()
    }
}

/// One (t, r)-sample of the structure functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureFunctionSample {
    pub t: f64,
    pub r: f64,
    pub f_s: f64,
    pub f_a: f64,
}

/// Perturbed closed chain delta A = P(x,y) dP(y,x) + dP(x,y) P(y,x).
///
/// `dp_rev` must be the spin adjoint of `dp` (the perturbation symmetry);
/// violations beyond 1e-9 relative are rejected.
pub fn perturbed_chain(
    p: &SpinMatrix,
    dp: &SpinMatrix,
    dp_rev: &SpinMatrix,
) -> Result<SpinMatrix> {
    let scale = dp.max_abs().max(f64::MIN_POSITIVE);
    let resid = spin_adjoint(dp).distance(dp_rev) / scale;
    if resid > 1e-9 {
        return Err(Error::SymmetryViolation {
            residual: resid,
            tolerance: 1e-9,
        });
    }
    Ok(*p * *dp_rev + *dp * spin_adjoint(p))
}

/// Re tr[conj(lambda) Lambda_(branch, chirality) dA].
pub fn trace_kernel(
    spec: &SpectralData,
    branch: Branch,
    chir: Chirality,
    da: &SpinMatrix,
) -> f64 {
    let lambda_bar = spec.lambda(branch).conj();
    let m = *spec.projector(branch, chir) * *da;
    (lambda_bar * m.trace()).re
}

/// Dirac structure functions
///   f_s = (1/8π)|T|²(2 ε r² Re T - ρ Im(T ξ⁰)),
///   f_a = (1/8π)|T|²(2 ε r Re(T ξ⁰) - r ρ Im T),
/// with T = T^(-1)(t, r), ρ = ξ^μ conj(ξ_μ) = t² + ε² - r², ξ⁰ = t - iε.
pub fn dirac_structure_functions(t: f64, r: f64, params: &Params) -> Result<StructureFunctionSample> {
    if r <= 0.0 {
        return Err(Error::RadiusZero);
    }
    let disp = SpacetimeDisplacement::radial(t, r)?;
    let xi = RegularizedXi::new(&disp, params);
    let tm1 = t_family(-1, &xi, params)?;
    let eps = params.epsilon;
    let rho = xi.xi_dot_xibar();
    let w = tm1.norm_sqr() / (8.0 * PI);
    let t_xi0 = tm1 * xi.xi0;
    let f_s = w * (2.0 * eps * r * r * tm1.re - rho * t_xi0.im);
    let f_a = w * (2.0 * eps * r * t_xi0.re - r * rho * tm1.im);
    Ok(StructureFunctionSample { t, r, f_s, f_a })
}

/// Evaluation mode for the Maxwell structure functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproximationMode {
    /// The reductions z² T^(0)|_{y=x} = m²/8π³ and T^(1) -> c applied; the
    /// result is an exact pointwise multiple of the Dirac functions.
    Frozen,
    /// z² T^(0) and T^(1) evaluated exactly; deviation studies only.
    Exact,
}

/// The frozen-mode Maxwell/Dirac ratio 1/α = 1/(196π²) - (2π/3) c.
pub fn frozen_ratio(c: f64) -> f64 {
    1.0 / (196.0 * PI * PI) - (2.0 * PI / 3.0) * c
}

/// Maxwell structure functions.  In frozen mode they equal
/// `frozen_ratio(c)` times the Dirac functions pointwise; exact mode keeps
/// the full kernels in both correction factors.
pub fn maxwell_structure_functions(
    t: f64,
    r: f64,
    params: &Params,
    mode: ApproximationMode,
) -> Result<StructureFunctionSample> {
    if r <= 0.0 {
        return Err(Error::RadiusZero);
    }
    match mode {
        ApproximationMode::Frozen => {
            let d = dirac_structure_functions(t, r, params)?;
            let rho = frozen_ratio(params.c);
            Ok(StructureFunctionSample {
                t,
                r,
                f_s: rho * d.f_s,
                f_a: rho * d.f_a,
            })
        }
        ApproximationMode::Exact => {
            let disp = SpacetimeDisplacement::radial(t, r)?;
            let xi = RegularizedXi::new(&disp, params);
            let tm1 = t_family(-1, &xi, params)?;
            let t0 = t_family(0, &xi, params)?;
            let t1 = t_family(1, &xi, params)?;
            let eps = params.epsilon;
            let rho = xi.xi_dot_xibar();
            let w = tm1.norm_sqr();
            // |lambda| = |T^(-1)|^2 |z^2| / (4 m^2) (continuum eigenvalues).
            let z = z_arg(&xi, params);
            let lam_abs = w * z.norm_sqr() / (4.0 * params.mass * params.mass);
            let lam2 = lam_abs * lam_abs;
            let t1bar_t = t1.conj() * tm1;
            let t1bar_t_xi0 = t1bar_t * xi.xi0;
            let ratio = t0 / tm1;
            let f_s = -(w / 12.0) * (2.0 * eps * r * r * t1bar_t.re - rho * t1bar_t_xi0.im)
                - (lam2 / 12.0) * (ratio * xi.xi0).im;
            let f_a = -(w / 12.0) * (2.0 * eps * r * t1bar_t_xi0.re - r * rho * t1bar_t.im)
                - (lam2 / 12.0) * r * ratio.im;
            Ok(StructureFunctionSample { t, r, f_s, f_a })
        }
    }
}

/// Basis element labels of moment entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BasisLabel {
    Scalar,
    PseudoScalar,
    Vector(usize),
    Bilinear(usize),
    PseudoBilinear(usize),
}

/// Which current component multiplies a moment entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CurrentSlot {
    Vector(usize),
    Axial(usize),
}

/// One labeled term of an operator-valued moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEntry {
    pub basis: BasisLabel,
    pub current: CurrentSlot,
    pub coeff: Complex64,
}

/// Perturbation family for moment assembly.  For one sector the Maxwell
/// side is the axial potential; for two sectors it is the vector potential
/// coupled to one sector together with its axial counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationFamily {
    Dirac,
    Maxwell,
}

/// Number of fermion sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sectors {
    One,
    Two,
}

/// Assemble the probed moment J_x(u) d_mu Psi(x)* as labeled
/// (basis element, current component, coefficient) triples.
///
/// The coefficient table must belong to the requested family (the Maxwell
/// family is the Dirac family scaled by the frozen ratio).  Both families
/// share the same entry shapes; only the table values differ.
pub fn assemble_moment(
    order: usize,
    mu: usize,
    _family: PerturbationFamily,
    sectors: Sectors,
    table: &CoefficientTable,
) -> Result<Vec<MomentEntry>> {
    if order > 1 || mu > 3 {
        return Err(Error::InvalidParams(format!(
            "unsupported moment (order {order}, mu {mu})"
        )));
    }
    let c = |name: CoefficientName| -> Result<Complex64> {
        Ok(Complex64::new(table.value(name)?, 0.0))
    };
    let i = Complex64::new(0.0, 1.0);
    let mut out = Vec::new();
    match (sectors, order, mu) {
        (Sectors::One, 0, _) => {
            let c0 = c(CoefficientName::C0)?;
            for k in 1..=3 {
                out.push(MomentEntry {
                    basis: BasisLabel::PseudoBilinear(k),
                    current: CurrentSlot::Axial(k),
                    coeff: i * c0.scale(1.0 / 3.0),
                });
            }
        }
        (Sectors::One, 1, 0) => {
            out.push(MomentEntry {
                basis: BasisLabel::PseudoScalar,
                current: CurrentSlot::Axial(0),
                coeff: i * c(CoefficientName::CtPs)?,
            });
            for k in 1..=3 {
                out.push(MomentEntry {
                    basis: BasisLabel::PseudoBilinear(k),
                    current: CurrentSlot::Axial(k),
                    coeff: c(CoefficientName::CtPb)?,
                });
            }
        }
        (Sectors::One, 1, k) => {
            out.push(MomentEntry {
                basis: BasisLabel::PseudoScalar,
                current: CurrentSlot::Axial(k),
                coeff: i * c(CoefficientName::CrPs)?,
            });
            out.push(MomentEntry {
                basis: BasisLabel::PseudoBilinear(k),
                current: CurrentSlot::Axial(0),
                coeff: c(CoefficientName::CrPb)?,
            });
        }
        (Sectors::Two, 0, _) => {
            let c0 = c(CoefficientName::C0)?;
            for k in 1..=3 {
                out.push(MomentEntry {
                    basis: BasisLabel::Vector(k),
                    current: CurrentSlot::Vector(k),
                    coeff: c0.scale(2.0),
                });
                out.push(MomentEntry {
                    basis: BasisLabel::PseudoBilinear(k),
                    current: CurrentSlot::Axial(k),
                    coeff: i * c0.scale(5.0 / 6.0),
                });
            }
        }
        (Sectors::Two, 1, 0) => {
            out.push(MomentEntry {
                basis: BasisLabel::Scalar,
                current: CurrentSlot::Vector(0),
                coeff: i * c(CoefficientName::CtS)?,
            });
            for k in 1..=3 {
                out.push(MomentEntry {
                    basis: BasisLabel::Bilinear(k),
                    current: CurrentSlot::Vector(k),
                    coeff: c(CoefficientName::CtB)?,
                });
            }
            // axial channel, scaled by 5/2
            out.push(MomentEntry {
                basis: BasisLabel::PseudoScalar,
                current: CurrentSlot::Axial(0),
                coeff: i * c(CoefficientName::CtPs)?.scale(2.5),
            });
            for k in 1..=3 {
                out.push(MomentEntry {
                    basis: BasisLabel::PseudoBilinear(k),
                    current: CurrentSlot::Axial(k),
                    coeff: c(CoefficientName::CtPb)?.scale(2.5),
                });
            }
        }
        (Sectors::Two, 1, k) => {
            out.push(MomentEntry {
                basis: BasisLabel::Scalar,
                current: CurrentSlot::Vector(k),
                coeff: i * c(CoefficientName::CrS)?,
            });
            out.push(MomentEntry {
                basis: BasisLabel::Bilinear(k),
                current: CurrentSlot::Vector(0),
                coeff: c(CoefficientName::CrB)?,
            });
            out.push(MomentEntry {
                basis: BasisLabel::PseudoScalar,
                current: CurrentSlot::Axial(k),
                coeff: i * c(CoefficientName::CrPs)?.scale(2.5),
            });
            out.push(MomentEntry {
                basis: BasisLabel::PseudoBilinear(k),
                current: CurrentSlot::Axial(0),
                coeff: c(CoefficientName::CrPb)?.scale(2.5),
            });
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// Residuals of the combined Dirac + Maxwell moments.
#[derive(Debug, Clone)]
pub struct CancellationReport {
    /// max |combined| / max(|dirac part|, |maxwell part|) over all probes
    /// and basis slots.
    pub max_relative_residual: f64,
    /// (order, mu, residual) per probe.
    pub per_probe: Vec<(usize, usize, f64)>,
}

/// Combine a particle perturbation with a compensating potential whose
/// current is J_mu = -(alpha * alpha_scale) times the matching particle
/// current, and report how完 the assembled moments cancel.
///
/// With `alpha_scale = 1` and alpha from the coefficient ratio the
/// combination solves the probed equations; residuals are quadrature
/// limited.  Scaling alpha by 2 leaves half of the larger single moment.
pub fn verify_cancellation(
    phi: &SpinorValue,
    dirac_table: &CoefficientTable,
    maxwell_table: &CoefficientTable,
    alpha: f64,
    alpha_scale: f64,
    sectors: Sectors,
) -> Result<CancellationReport> {
    // Particle currents and the compensating potential currents.
    let j_v: [f64; 4] = std::array::from_fn(|mu| phi.j_v(mu));
    let j_a: [f64; 4] = std::array::from_fn(|mu| phi.j_a(mu));
    let coupling = alpha * alpha_scale;
    let jm_v: [f64; 4] = std::array::from_fn(|mu| -coupling * j_v[mu]);
    let jm_a: [f64; 4] = std::array::from_fn(|mu| -coupling * j_a[mu]);

    let value = |slot: CurrentSlot, maxwell: bool| -> f64 {
        match (slot, maxwell) {
            (CurrentSlot::Vector(mu), false) => j_v[mu],
            (CurrentSlot::Axial(mu), false) => j_a[mu],
            (CurrentSlot::Vector(mu), true) => jm_v[mu],
            (CurrentSlot::Axial(mu), true) => jm_a[mu],
        }
    };

    let probes: Vec<(usize, usize)> = vec![(0, 0), (1, 0), (1, 1), (1, 2), (1, 3)];
    let mut per_probe = Vec::new();
    let mut worst = 0.0f64;
    for &(order, mu) in &probes {
        let d_entries = assemble_moment(order, mu, PerturbationFamily::Dirac, sectors, dirac_table)?;
        let m_entries =
            assemble_moment(order, mu, PerturbationFamily::Maxwell, sectors, maxwell_table)?;
        // Accumulate per basis slot.
        let mut slots: Vec<(BasisLabel, Complex64, f64)> = Vec::new();
        let mut add = |basis: BasisLabel, v: Complex64| {
            if let Some(s) = slots.iter_mut().find(|(b, _, _)| *b == basis) {
                s.1 += v;
                s.2 = s.2.max(v.norm());
            } else {
                slots.push((basis, v, v.norm()));
            }
        };
        for e in &d_entries {
            add(e.basis, e.coeff.scale(value(e.current, false)));
        }
        for e in &m_entries {
            add(e.basis, e.coeff.scale(value(e.current, true)));
        }
        let mut probe_res = 0.0f64;
        for (_, combined, part_scale) in &slots {
            if *part_scale > 0.0 {
                probe_res = probe_res.max(combined.norm() / part_scale);
            }
        }
        per_probe.push((order, mu, probe_res));
        worst = worst.max(probe_res);
    }
    Ok(CancellationReport {
        max_relative_residual: worst,
        per_probe,
    })
}
