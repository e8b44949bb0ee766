//! Quadrature engines: adaptive Simpson for coefficient primitives and
//! Gauss-Legendre panels for the propagated forcing integral.

use num_complex::Complex64;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Absolute tolerance for coefficient primitives. Primitives enter exponents
/// scaled by |xi|^2, so their error is amplified by up to Xi^2; 1e-10 keeps
/// the exponent error below 1e-4 at Xi = 256.
pub const PRIMITIVE_TOLERANCE: f64 = 1e-10;

/// Node budget per adaptive quadrature call.
pub const NODE_BUDGET: usize = 1 << 20;

struct SimpsonState<'f, F: Fn(f64) -> Complex64 + ?Sized> {
    f: &'f F,
    nodes_used: usize,
    budget: usize,
}

fn simpson_estimate(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
    (fa + 4.0 * fm + fb) * (h / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F: Fn(f64) -> Complex64 + ?Sized>(
    st: &mut SimpsonState<'_, F>,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Result<Complex64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    st.nodes_used += 2;
    if st.nodes_used > st.budget {
        return Err(Error::QuadratureFailure {
            tolerance: tol,
            budget: st.budget,
        });
    }
    let flm = (st.f)(lm);
    let frm = (st.f)(rm);
    let left = simpson_estimate(fa, flm, fm, m - a);
    let right = simpson_estimate(fm, frm, fb, b - m);
    let refined = left + right;
    let err = (refined - whole).norm();
    if err <= 15.0 * tol || depth >= 52 {
        // Richardson correction of the composite estimate
        return Ok(refined + (refined - whole) / 15.0);
    }
    let lv = adaptive_step(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
    let rv = adaptive_step(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
    Ok(lv + rv)
}

/// Adaptive Simpson integration of a complex-valued function over `[a, b]`
/// (`a <= b`) to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> Complex64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    budget: usize,
) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut st = SimpsonState {
        f,
        nodes_used: 3,
        budget,
    };
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson_estimate(fa, fm, fb, b - a);
    adaptive_step(&mut st, a, b, fa, fm, fb, whole, tol, 0)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and P_n'(x) by three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

const PANEL_ORDER: usize = 16;

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// Composite Gauss-Legendre rule over `[a, b]` with at least `min_nodes`
/// nodes, as a list of `(node, weight)` pairs. The integrand is smooth
/// (continuous coefficients), so fixed-order panels give spectral accuracy
/// per panel.
pub fn composite_gauss_legendre(a: f64, b: f64, min_nodes: usize) -> Vec<(f64, f64)> {
    let (xs, ws) = panel_rule();
    let panels = min_nodes.div_ceil(PANEL_ORDER).max(1);
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * PANEL_ORDER);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        for (x, w) in xs.iter().zip(ws.iter()) {
            out.push((mid + half * x, half * w));
        }
    }
    out
}
