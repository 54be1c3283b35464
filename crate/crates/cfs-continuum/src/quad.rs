//! Small deterministic quadrature helpers: adaptive Simpson in 1D for
//! complex-valued integrands, and an adaptive cell-subdivision rule in 2D
//! built on embedded Gauss-Legendre pairs.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Adaptive Simpson for a complex integrand on [a, b].
///
/// Returns (integral, error_estimate).  The error target is absolute; callers
/// convert relative tolerances using a coarse magnitude estimate first.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, abs_tol: f64, max_depth: u32) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    fn simpson(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
        (fa + fm.scale(4.0) + fb).scale(h / 6.0)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
        err_acc: &mut f64,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        // The rounding floor keeps the tolerance from shrinking below what
        // f64 cancellation noise can ever satisfy.
        let floor = 1e-16 * (left.norm() + right.norm());
        if depth == 0 || delta.norm() <= 15.0 * tol.max(floor) {
            *err_acc += delta.norm() / 15.0;
            return left + right + delta.scale(1.0 / 15.0);
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err_acc)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err_acc)
    }

    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    let mut err = 0.0;
    let value = recurse(f, a, b, fa, fm, fb, whole, abs_tol, max_depth, &mut err);
    (value, err)
}

/// Integrate a complex integrand over [a, b] to a relative tolerance.
///
/// A coarse pass over `panels` subintervals fixes the magnitude scale; each
/// panel is then refined adaptively.  Fails if the summed error estimate
/// exceeds the requested tolerance.
pub fn integrate_complex<F>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    panels: usize,
    what: &str,
) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    // Coarse magnitude estimate from panel midpoints.
    let mut scale = 0.0f64;
    for k in 0..n {
        let mid = a + (k as f64 + 0.5) * h;
        scale += f(mid).norm() * h;
    }
    let abs_tol = rel_tol * scale.max(f64::MIN_POSITIVE) / n as f64;

    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0f64;
    for k in 0..n {
        let x0 = a + k as f64 * h;
        let x1 = if k + 1 == n { b } else { a + (k + 1) as f64 * h };
        let (v, e) = adaptive_simpson(f, x0, x1, abs_tol, 32);
        total += v;
        err += e;
    }
    let bound = rel_tol * total.norm().max(scale).max(f64::MIN_POSITIVE);
    if err > bound * 16.0 {
        return Err(Error::QuadratureNonConvergence(format!(
            "{what}: error estimate {err:e} exceeds target {bound:e}"
        )));
    }
    Ok((total, err))
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
/// Hard-coded for the two embedded orders used by the 2D integrator.
pub(crate) fn gauss_legendre(n: usize) -> (&'static [f64], &'static [f64]) {
    const X5: [f64; 5] = [
        -0.9061798459386640,
        -0.5384693101056831,
        0.0,
        0.5384693101056831,
        0.9061798459386640,
    ];
    const W5: [f64; 5] = [
        0.2369268850561891,
        0.4786286704993665,
        0.5688888888888889,
        0.4786286704993665,
        0.2369268850561891,
    ];
    const X10: [f64; 10] = [
        -0.9739065285171717,
        -0.8650633666889845,
        -0.6794095682990244,
        -0.4333953941292472,
        -0.1488743389816312,
        0.1488743389816312,
        0.4333953941292472,
        0.6794095682990244,
        0.8650633666889845,
        0.9739065285171717,
    ];
    const W10: [f64; 10] = [
        0.0666713443086881,
        0.1494513491505806,
        0.2190863625159820,
        0.2692667193099963,
        0.2955242247147529,
        0.2955242247147529,
        0.2692667193099963,
        0.2190863625159820,
        0.1494513491505806,
        0.0666713443086881,
    ];
    match n {
        5 => (&X5, &W5),
        10 => (&X10, &W10),
        _ => unreachable!("unsupported Gauss-Legendre order"),
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    value: f64,
    error: f64,
    id: u64,
}

fn cell_estimate<F: Fn(f64, f64) -> f64>(f: &F, x0: f64, x1: f64, y0: f64, y1: f64) -> (f64, f64) {
    let (xl, wl) = gauss_legendre(5);
    let (xh, wh) = gauss_legendre(10);
    let cx = 0.5 * (x0 + x1);
    let hx = 0.5 * (x1 - x0);
    let cy = 0.5 * (y0 + y1);
    let hy = 0.5 * (y1 - y0);
    let mut low = 0.0;
    for (i, &xi) in xl.iter().enumerate() {
        for (j, &yj) in xl.iter().enumerate() {
            low += wl[i] * wl[j] * f(cx + hx * xi, cy + hy * yj);
        }
    }
    low *= hx * hy;
    let mut high = 0.0;
    for (i, &xi) in xh.iter().enumerate() {
        for (j, &yj) in xh.iter().enumerate() {
            high += wh[i] * wh[j] * f(cx + hx * xi, cy + hy * yj);
        }
    }
    high *= hx * hy;
    (high, (high - low).abs())
}

/// Result of the 2D adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Quad2dResult {
    pub value: f64,
    pub error: f64,
    /// Sum of |cell value|: the natural magnitude scale of the integrand.
    pub abs_scale: f64,
    pub cells: usize,
}

/// Deterministic adaptive quadrature of a real integrand over
/// [x0, x1] x [y0, y1].
///
/// Cells are refined greedily by largest embedded-pair error; ties break on
/// creation order, and the final reduction sums cells in creation order, so
/// the result is bit-reproducible for a fixed spec.
pub fn quad2d<F>(
    f: &F,
    bounds: (f64, f64, f64, f64),
    rel_tol: f64,
    max_cells: usize,
    what: &str,
) -> Result<Quad2dResult>
where
    F: Fn(f64, f64) -> f64,
{
    let (x0, x1, y0, y1) = bounds;
    let mut cells: Vec<Cell> = Vec::new();
    let mut next_id: u64 = 0;

    // Initial 8x4 grid keeps the first refinement decisions local.
    let nx = 8;
    let ny = 4;
    for i in 0..nx {
        for j in 0..ny {
            let cx0 = x0 + (x1 - x0) * i as f64 / nx as f64;
            let cx1 = x0 + (x1 - x0) * (i + 1) as f64 / nx as f64;
            let cy0 = y0 + (y1 - y0) * j as f64 / ny as f64;
            let cy1 = y0 + (y1 - y0) * (j + 1) as f64 / ny as f64;
            let (v, e) = cell_estimate(f, cx0, cx1, cy0, cy1);
            cells.push(Cell {
                x0: cx0,
                x1: cx1,
                y0: cy0,
                y1: cy1,
                value: v,
                error: e,
                id: next_id,
            });
            next_id += 1;
        }
    }

    loop {
        let total: f64 = cells.iter().map(|c| c.value).sum();
        let abs_scale: f64 = cells.iter().map(|c| c.value.abs()).sum();
        let err: f64 = cells.iter().map(|c| c.error).sum();
        let target = rel_tol * total.abs().max(0.01 * abs_scale).max(f64::MIN_POSITIVE);
        if err <= target {
            break;
        }
        if cells.len() >= max_cells {
            return Err(Error::QuadratureNonConvergence(format!(
                "{what}: {} cells, error {err:e} above target {target:e}",
                cells.len()
            )));
        }
        // Worst cell; ties resolved by creation id.
        let worst = cells
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| {
                a.error
                    .partial_cmp(&b.error)
                    .unwrap()
                    .then(b.id.cmp(&a.id))
            })
            .map(|(i, _)| i)
            .unwrap();
        let c = cells.swap_remove(worst);
        let mx = 0.5 * (c.x0 + c.x1);
        let my = 0.5 * (c.y0 + c.y1);
        for (qx0, qx1, qy0, qy1) in [
            (c.x0, mx, c.y0, my),
            (mx, c.x1, c.y0, my),
            (c.x0, mx, my, c.y1),
            (mx, c.x1, my, c.y1),
        ] {
            let (v, e) = cell_estimate(f, qx0, qx1, qy0, qy1);
            cells.push(Cell {
                x0: qx0,
                x1: qx1,
                y0: qy0,
                y1: qy1,
                value: v,
                error: e,
                id: next_id,
            });
            next_id += 1;
        }
    }

    cells.sort_by_key(|c| c.id);
    let mut value = 0.0;
    let mut comp = 0.0;
    for c in &cells {
        // Kahan summation in a fixed order.
        let y = c.value - comp;
        let t = value + y;
        comp = (t - value) - y;
        value = t;
    }
    let error: f64 = cells.iter().map(|c| c.error).sum();
    let abs_scale: f64 = cells.iter().map(|c| c.value.abs()).sum();
    Ok(Quad2dResult {
        value,
        error,
        abs_scale,
        cells: cells.len(),
    })
}
