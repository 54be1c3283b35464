//! Dirac gamma-matrix algebra in signature (+,-,-,-).
//!
//! Everything here is exact 4x4 complex linear algebra: the generators have
//! entries in {0, ±1, ±i}, so algebraic identities like the anticommutation
//! relations hold to the last bit.  The 16-element symmetric basis
//! (1, iγ⁵, γ^μ, γ⁵γ^μ, Γ^i, iγ⁵Γ^i) with Γ^i = Σ^{0i} spans the spin-symmetric
//! operators; `decompose` projects onto it by trace orthogonality.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Minkowski metric diag(+,-,-,-).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// A 4x4 complex spin operator, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMatrix {
    pub entries: [[Complex64; 4]; 4],
}

impl SpinMatrix {
    pub fn zero() -> Self {
        SpinMatrix {
            entries: [[ZERO; 4]; 4],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for k in 0..4 {
            m.entries[k][k] = ONE;
        }
        m
    }

    pub fn scalar(c: Complex64) -> Self {
        let mut m = Self::zero();
        for k in 0..4 {
            m.entries[k][k] = c;
        }
        m
    }

    pub fn from_rows(rows: [[Complex64; 4]; 4]) -> Self {
        SpinMatrix { entries: rows }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2] + self.entries[3][3]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut m = Self::zero();
        for r in 0..4 {
            for c in 0..4 {
                m.entries[r][c] = self.entries[c][r].conj();
            }
        }
        m
    }

    /// Largest entry modulus; cheap norm used for residual reporting.
    pub fn max_abs(&self) -> f64 {
        let mut n = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                n = n.max(self.entries[r][c].norm());
            }
        }
        n
    }

    /// max |self - other| over entries.
    pub fn distance(&self, other: &SpinMatrix) -> f64 {
        let mut n = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                n = n.max((self.entries[r][c] - other.entries[r][c]).norm());
            }
        }
        n
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut m = *self;
        for r in 0..4 {
            for col in 0..4 {
                m.entries[r][col] *= c;
            }
        }
        m
    }

    /// Apply the matrix to a spinor.
    pub fn apply(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for r in 0..4 {
            for c in 0..4 {
                out[r] += self.entries[r][c] * v[c];
            }
        }
        out
    }
}

impl Add for SpinMatrix {
    type Output = SpinMatrix;
    fn add(self, rhs: SpinMatrix) -> SpinMatrix {
        let mut m = self;
        for r in 0..4 {
            for c in 0..4 {
                m.entries[r][c] += rhs.entries[r][c];
            }
        }
        m
    }
}

impl Sub for SpinMatrix {
    type Output = SpinMatrix;
    fn sub(self, rhs: SpinMatrix) -> SpinMatrix {
        let mut m = self;
        for r in 0..4 {
            for c in 0..4 {
                m.entries[r][c] -= rhs.entries[r][c];
            }
        }
        m
    }
}

impl Neg for SpinMatrix {
    type Output = SpinMatrix;
    fn neg(self) -> SpinMatrix {
        self.scale(-ONE)
    }
}

impl Mul for SpinMatrix {
    type Output = SpinMatrix;
    fn mul(self, rhs: SpinMatrix) -> SpinMatrix {
        let mut m = SpinMatrix::zero();
        for r in 0..4 {
            for k in 0..4 {
                let a = self.entries[r][k];
                if a == ZERO {
                    continue;
                }
                for c in 0..4 {
                    m.entries[r][c] += a * rhs.entries[k][c];
                }
            }
        }
        m
    }
}

fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    match k {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => unreachable!(),
    }
}

/// Dirac-representation generator γ^μ, μ in 0..=3.
pub fn gamma(mu: usize) -> Result<SpinMatrix> {
    if mu > 3 {
        return Err(Error::IndexOutOfRange {
            what: "gamma",
            index: mu,
        });
    }
    let mut m = SpinMatrix::zero();
    if mu == 0 {
        m.entries[0][0] = ONE;
        m.entries[1][1] = ONE;
        m.entries[2][2] = -ONE;
        m.entries[3][3] = -ONE;
    } else {
        let s = pauli(mu);
        for r in 0..2 {
            for c in 0..2 {
                m.entries[r][2 + c] = s[r][c];
                m.entries[2 + r][c] = -s[r][c];
            }
        }
    }
    Ok(m)
}

/// γ_μ = η_{μμ} γ^μ (no sum).
pub fn gamma_lower(mu: usize) -> Result<SpinMatrix> {
    Ok(gamma(mu)?.scale(Complex64::new(METRIC[mu], 0.0)))
}

/// γ⁵ = iγ⁰γ¹γ²γ³.
pub fn gamma5() -> SpinMatrix {
    let g = gamma(0).unwrap() * gamma(1).unwrap() * gamma(2).unwrap() * gamma(3).unwrap();
    g.scale(I)
}

/// Σ^{μν} = (i/2)[γ^μ, γ^ν].
pub fn sigma(mu: usize, nu: usize) -> Result<SpinMatrix> {
    let gm = gamma(mu)?;
    let gn = gamma(nu)?;
    Ok((gm * gn - gn * gm).scale(I.scale(0.5)))
}

/// Γ^i = Σ^{0i}, i in 1..=3.
pub fn gamma_bilinear(i: usize) -> Result<SpinMatrix> {
    if !(1..=3).contains(&i) {
        return Err(Error::IndexOutOfRange {
            what: "gamma_bilinear",
            index: i,
        });
    }
    sigma(0, i)
}

/// Chiral projectors χ_L = (1-γ⁵)/2, χ_R = (1+γ⁵)/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Left,
    Right,
}

pub fn chiral_projector(which: Chirality) -> SpinMatrix {
    let g5 = gamma5();
    let sign = match which {
        Chirality::Left => -ONE,
        Chirality::Right => ONE,
    };
    (SpinMatrix::identity() + g5.scale(sign)).scale(ONE.scale(0.5))
}

/// Spin adjoint M* = γ⁰ M† γ⁰, the adjoint with respect to the indefinite
/// spin inner product.
pub fn spin_adjoint(m: &SpinMatrix) -> SpinMatrix {
    let g0 = gamma(0).unwrap();
    g0 * m.dagger() * g0
}

/// The 16 spin-symmetric basis elements, ordered
/// (1, iγ⁵, γ⁰..γ³, γ⁵γ⁰..γ⁵γ³, Γ¹..Γ³, iγ⁵Γ¹..iγ⁵Γ³).
pub fn basis16() -> [SpinMatrix; 16] {
    let g5 = gamma5();
    let mut out = [SpinMatrix::zero(); 16];
    out[0] = SpinMatrix::identity();
    out[1] = g5.scale(I);
    for mu in 0..4 {
        out[2 + mu] = gamma(mu).unwrap();
        out[6 + mu] = g5 * gamma(mu).unwrap();
    }
    for i in 1..=3 {
        out[9 + i] = gamma_bilinear(i).unwrap();
        out[12 + i] = (g5 * gamma_bilinear(i).unwrap()).scale(I);
    }
    out
}

/// Coefficients of a spin operator in the 16-element symmetric basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisComponents {
    pub scalar: Complex64,
    pub pseudoscalar: Complex64,
    pub vector: [Complex64; 4],
    pub pseudovector: [Complex64; 4],
    pub bilinear: [Complex64; 3],
    pub pseudobilinear: [Complex64; 3],
}

impl BasisComponents {
    pub fn as_array(&self) -> [Complex64; 16] {
        let mut a = [ZERO; 16];
        a[0] = self.scalar;
        a[1] = self.pseudoscalar;
        a[2..6].copy_from_slice(&self.vector);
        a[6..10].copy_from_slice(&self.pseudovector);
        a[10..13].copy_from_slice(&self.bilinear);
        a[13..16].copy_from_slice(&self.pseudobilinear);
        a
    }

    fn from_array(a: [Complex64; 16]) -> Self {
        BasisComponents {
            scalar: a[0],
            pseudoscalar: a[1],
            vector: [a[2], a[3], a[4], a[5]],
            pseudovector: [a[6], a[7], a[8], a[9]],
            bilinear: [a[10], a[11], a[12]],
            pseudobilinear: [a[13], a[14], a[15]],
        }
    }

    /// Largest modulus among the pseudoscalar, pseudovector and
    /// pseudo-bilinear coefficients.
    pub fn max_pseudo(&self) -> f64 {
        let mut n = self.pseudoscalar.norm();
        for c in self.pseudovector {
            n = n.max(c.norm());
        }
        for c in self.pseudobilinear {
            n = n.max(c.norm());
        }
        n
    }

    /// Rebuild the matrix from the coefficients.
    pub fn reconstruct(&self) -> SpinMatrix {
        let basis = basis16();
        let coeff = self.as_array();
        let mut m = SpinMatrix::zero();
        for (c, b) in coeff.iter().zip(basis.iter()) {
            m = m + b.scale(*c);
        }
        m
    }
}

/// Trace normalizations tr(B_a B_a) of the 16 basis elements, computed once
/// by direct projection so a change of representation cannot silently break
/// `decompose`.
fn basis_norms(basis: &[SpinMatrix; 16]) -> [Complex64; 16] {
    let mut n = [ZERO; 16];
    for (k, b) in basis.iter().enumerate() {
        n[k] = (*b * *b).trace();
    }
    n
}

/// Trace projection of an arbitrary spin operator onto the symmetric basis.
pub fn decompose(m: &SpinMatrix) -> BasisComponents {
    let basis = basis16();
    let norms = basis_norms(&basis);
    let mut coeff = [ZERO; 16];
    for k in 0..16 {
        coeff[k] = (basis[k] * *m).trace() / norms[k];
    }
    BasisComponents::from_array(coeff)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Lcg(u64);

    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        }

        fn matrix(&mut self) -> SpinMatrix {
            let mut m = SpinMatrix::zero();
            for r in 0..4 {
                for c in 0..4 {
                    m.entries[r][c] = Complex64::new(self.next(), self.next());
                }
            }
            m
        }
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() <= tol,
            "expected {b}, got {a} (|diff| = {:e})",
            (a - b).norm()
        );
    }

    #[test]
    fn anticommutation_holds_exactly() {
        for mu in 0..4 {
            for nu in 0..4 {
                let gm = gamma(mu).unwrap();
                let gn = gamma(nu).unwrap();
                let anti = gm * gn + gn * gm;
                let expected = if mu == nu {
                    SpinMatrix::scalar(Complex64::new(2.0 * METRIC[mu], 0.0))
                } else {
                    SpinMatrix::zero()
                };
                assert_eq!(anti, expected, "{{γ^{mu}, γ^{nu}}}");
            }
        }
    }

    #[test]
    fn gamma_squares() {
        let g0 = gamma(0).unwrap();
        assert_eq!(g0 * g0, SpinMatrix::identity());
        let g1 = gamma(1).unwrap();
        assert_eq!(g1 * g1, -SpinMatrix::identity());
    }

    #[test]
    fn gammas_are_trace_free() {
        for mu in 0..4 {
            assert_eq!(gamma(mu).unwrap().trace(), ZERO);
        }
        for i in 1..=3 {
            assert_eq!(gamma_bilinear(i).unwrap().trace(), ZERO);
        }
    }

    #[test]
    fn gamma_index_out_of_range() {
        assert!(gamma(4).is_err());
        assert!(gamma_bilinear(0).is_err());
    }

    #[test]
    fn basis_is_trace_orthogonal() {
        let basis = basis16();
        for a in 0..16 {
            for b in 0..16 {
                if a != b {
                    let t = (basis[a] * basis[b]).trace();
                    assert!(t.norm() < 1e-14, "tr(B_{a} B_{b}) = {t}");
                }
            }
        }
    }

    #[test]
    fn basis_elements_are_spin_symmetric() {
        for (k, b) in basis16().iter().enumerate() {
            let adj = spin_adjoint(b);
            assert!(adj.distance(b) < 1e-13, "basis element {k} not symmetric");
        }
    }

    #[test]
    fn bilinear_norms_are_equal_and_nonzero() {
        let basis = basis16();
        let norms = basis_norms(&basis);
        // Γ^i all share one normalization constant (-4 in this representation).
        for i in 0..3 {
            assert_close(norms[10 + i], Complex64::new(-4.0, 0.0), 1e-14);
        }
    }

    #[test]
    fn spin_adjoint_fixes_gammas_and_flips_scalars() {
        for mu in 0..4 {
            let g = gamma(mu).unwrap();
            assert!(spin_adjoint(&g).distance(&g) < 1e-15);
        }
        let m = SpinMatrix::scalar(I);
        assert!(spin_adjoint(&m).distance(&SpinMatrix::scalar(-I)) < 1e-15);
    }

    #[test]
    fn spin_adjoint_is_involutive_and_antimultiplicative() {
        let mut rng = Lcg(0x1234_5678);
        for _ in 0..10 {
            let m1 = rng.matrix();
            let m2 = rng.matrix();
            assert!(spin_adjoint(&spin_adjoint(&m1)).distance(&m1) < 1e-14);
            let lhs = spin_adjoint(&(m1 * m2));
            let rhs = spin_adjoint(&m2) * spin_adjoint(&m1);
            assert!(lhs.distance(&rhs) < 1e-13);
        }
    }

    #[test]
    fn decompose_identity() {
        let c = decompose(&SpinMatrix::identity());
        assert_close(c.scalar, ONE, 1e-15);
        assert!(c.max_pseudo() < 1e-15);
        for k in 0..4 {
            assert!(c.vector[k].norm() < 1e-15);
            assert!(c.pseudovector[k].norm() < 1e-15);
        }
    }

    #[test]
    fn decompose_round_trip_and_linearity() {
        let mut rng = Lcg(0x9e37_79b9);
        for _ in 0..10 {
            let m = rng.matrix();
            let rec = decompose(&m).reconstruct();
            assert!(rec.distance(&m) < 1e-13, "round trip failed");

            let m2 = rng.matrix();
            let alpha = Complex64::new(rng.next(), rng.next());
            let lhs = decompose(&(m.scale(alpha) + m2)).as_array();
            let a1 = decompose(&m).as_array();
            let a2 = decompose(&m2).as_array();
            for k in 0..16 {
                assert_close(lhs[k], alpha * a1[k] + a2[k], 1e-13);
            }
        }
    }

    #[test]
    fn chiral_projectors_partition_identity() {
        let l = chiral_projector(Chirality::Left);
        let r = chiral_projector(Chirality::Right);
        assert!((l + r).distance(&SpinMatrix::identity()) < 1e-15);
        assert!((l * l).distance(&l) < 1e-15);
        assert!((r * r).distance(&r) < 1e-15);
        assert!((l * r).max_abs() < 1e-15);
    }

    #[test]
    fn symmetric_matrices_have_real_coefficients() {
        // Any real combination of basis elements is spin-symmetric and must
        // decompose with real coefficients.
        let basis = basis16();
        let mut m = SpinMatrix::zero();
        for (k, b) in basis.iter().enumerate() {
            m = m + b.scale(Complex64::new(0.3 + 0.1 * k as f64, 0.0));
        }
        assert!(spin_adjoint(&m).distance(&m) < 1e-13);
        for c in decompose(&m).as_array() {
            assert!(c.im.abs() < 1e-13);
        }
    }
}
