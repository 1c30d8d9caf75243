//! Numerical integration: Gauss-Legendre rules and a vector-valued adaptive
//! Simpson integrator.

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, refined by Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let pn = if n == 0 { 1.0 } else { p1 };
    let pn_1 = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (x * pn - pn_1) / (x * x - 1.0);
    (pn, d)
}

/// Adaptive Simpson integration of a vector-valued integrand.
///
/// Convergence is judged on the max-norm of the component errors against
/// `rel_tol` times the max-norm of the running integral estimate, so
/// components that integrate to zero do not stall refinement.
pub struct AdaptiveSimpson {
    pub rel_tol: f64,
    pub max_depth: u32,
    pub max_evals: usize,
}

impl Default for AdaptiveSimpson {
    fn default() -> Self {
        Self { rel_tol: 1e-9, max_depth: 48, max_evals: 2_000_000 }
    }
}

impl AdaptiveSimpson {
    pub fn integrate<const N: usize, F>(&self, mut f: F, a: f64, b: f64) -> Result<[f64; N]>
    where
        F: FnMut(f64) -> Result<[f64; N]>,
    {
        if !(b > a) {
            return Err(Error::IntegrationFailure(format!("empty interval [{a}, {b}]")));
        }
        // seed with a coarse composite pass so the tolerance has a sensible scale
        const PANELS: usize = 16;
        let h = (b - a) / PANELS as f64;
        let mut evals = 0usize;
        let mut panels = Vec::with_capacity(PANELS);
        let mut scale = 0.0f64;
        for k in 0..PANELS {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == PANELS { b } else { lo + h };
            let mid = 0.5 * (lo + hi);
            let (fl, fm, fh) = (f(lo)?, f(mid)?, f(hi)?);
            evals += 3;
            let whole = simpson(lo, hi, &fl, &fm, &fh);
            scale = scale.max(norm(&whole) * PANELS as f64);
            panels.push((lo, hi, fl, fm, fh, whole));
        }
        let tol = (self.rel_tol * scale).max(f64::MIN_POSITIVE);
        let panel_tol = tol / PANELS as f64;
        let mut total = [0.0; N];
        for (lo, hi, fl, fm, fh, whole) in panels {
            let part = self.recurse(&mut f, lo, hi, fl, fm, fh, whole, panel_tol, 0, &mut evals)?;
            for k in 0..N {
                total[k] += part[k];
            }
        }
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<const N: usize, F>(
        &self,
        f: &mut F,
        a: f64,
        b: f64,
        fa: [f64; N],
        fm: [f64; N],
        fb: [f64; N],
        whole: [f64; N],
        tol: f64,
        depth: u32,
        evals: &mut usize,
    ) -> Result<[f64; N]>
    where
        F: FnMut(f64) -> Result<[f64; N]>,
    {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let flm = f(lm)?;
        let frm = f(rm)?;
        *evals += 2;
        let left = simpson(a, m, &fa, &flm, &fm);
        let right = simpson(m, b, &fm, &frm, &fb);
        let mut err = 0.0f64;
        let mut refined = [0.0; N];
        for k in 0..N {
            let s = left[k] + right[k];
            err = err.max((s - whole[k]).abs());
            refined[k] = s + (s - whole[k]) / 15.0;
        }
        if err <= 15.0 * tol {
            return Ok(refined);
        }
        if depth >= self.max_depth || *evals >= self.max_evals {
            return Err(Error::IntegrationFailure(format!(
                "tolerance not reached on [{a:e}, {b:e}] after {} evaluations (depth {depth})",
                *evals
            )));
        }
        let l = self.recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1, evals)?;
        let r = self.recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1, evals)?;
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = l[k] + r[k];
        }
        Ok(out)
    }
}

fn simpson<const N: usize>(a: f64, b: f64, fa: &[f64; N], fm: &[f64; N], fb: &[f64; N]) -> [f64; N] {
    let h = (b - a) / 6.0;
    let mut out = [0.0; N];
    for k in 0..N {
        out[k] = h * (fa[k] + 4.0 * fm[k] + fb[k]);
    }
    out
}

fn norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}
