//! Powell, Nelder-Mead, nonlinear CG and BFGS.
//!
//! Stopping tolerances follow the usual SciPy defaults; gradients are central
//! differences with step [`FD_STEP`].

use super::{Objective, OptError, RunResult, Tracker};
use std::fmt;

pub const FD_STEP: f64 = 1e-6;

const GOLDEN: f64 = 1.618_033_988_749_895;
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassicalMethod {
    Powell,
    Cg,
    NelderMead,
    Bfgs,
}

impl ClassicalMethod {
    /// Iteration caps used by the benchmark.
    pub fn default_iterations(self) -> usize {
        match self {
            ClassicalMethod::Powell | ClassicalMethod::NelderMead => 2000,
            ClassicalMethod::Cg => 20,
            ClassicalMethod::Bfgs => 50,
        }
    }
}

impl fmt::Display for ClassicalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassicalMethod::Powell => "powell",
            ClassicalMethod::Cg => "cg",
            ClassicalMethod::NelderMead => "nelder-mead",
            ClassicalMethod::Bfgs => "bfgs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalConfig {
    pub max_iterations: usize,
    pub xtol: f64,
    pub ftol: f64,
    pub gtol: f64,
    pub fd_step: f64,
}

impl ClassicalConfig {
    pub fn for_method(method: ClassicalMethod) -> Self {
        Self {
            max_iterations: method.default_iterations(),
            xtol: 1e-4,
            ftol: 1e-4,
            gtol: 1e-5,
            fd_step: FD_STEP,
        }
    }
}

pub fn classical_minimize<O: Objective + ?Sized>(
    method: ClassicalMethod,
    obj: &O,
    theta0: &[f64],
    cfg: &ClassicalConfig,
) -> Result<RunResult, OptError> {
    let mut t = Tracker::new();
    let f0 = obj.value(theta0)?;
    if !f0.is_finite() {
        return Err(OptError::NonFiniteStart);
    }
    t.record(theta0, f0);
    let (iterations, converged) = match method {
        ClassicalMethod::Powell => powell(obj, theta0, f0, cfg, &mut t)?,
        ClassicalMethod::NelderMead => nelder_mead(obj, theta0, f0, cfg, &mut t)?,
        ClassicalMethod::Cg => gradient_method(obj, theta0, f0, cfg, &mut t, false)?,
        ClassicalMethod::Bfgs => gradient_method(obj, theta0, f0, cfg, &mut t, true)?,
    };
    Ok(t.finish(iterations, converged))
}

fn axpy(x: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + a * di).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Central differences, `2n` evaluations.
pub fn finite_difference_gradient<O: Objective + ?Sized>(
    obj: &O,
    x: &[f64],
    h: f64,
) -> Result<Vec<f64>, OptError> {
    let mut t = Tracker::new();
    gradient(obj, x, h, &mut t)
}

fn gradient<O: Objective + ?Sized>(
    obj: &O,
    x: &[f64],
    h: f64,
    t: &mut Tracker,
) -> Result<Vec<f64>, OptError> {
    let mut probe = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = t.eval(obj, &probe)?;
        probe[i] = x[i] - h;
        let fm = t.eval(obj, &probe)?;
        probe[i] = x[i];
        g.push((fp - fm) / (2.0 * h));
    }
    Ok(g)
}

/// Minimize along `d` from `x` (value `fx`): bracket, then golden section to
/// relative tolerance `tol`. Returns `(f, x_new, step)` with `step = α d`.
fn golden_line_search<O: Objective + ?Sized>(
    obj: &O,
    x: &[f64],
    fx: f64,
    d: &[f64],
    tol: f64,
    t: &mut Tracker,
) -> Result<(f64, Vec<f64>, Vec<f64>), OptError> {
    let phi = |a: f64, t: &mut Tracker| t.eval(obj, &axpy(x, a, d));
    let (mut a, mut fa) = (0.0, fx);
    let (mut b, mut fb) = (1.0, phi(1.0, t)?);
    if fb > fa {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = b + GOLDEN * (b - a);
    let mut fc = phi(c, t)?;
    let mut grow = 0;
    while fc < fb && grow < 50 {
        a = b;
        b = c;
        fb = fc;
        c = b + GOLDEN * (b - a);
        fc = phi(c, t)?;
        grow += 1;
    }
    // Golden section on [a, c] around b.
    let (mut lo, mut hi) = if a < c { (a, c) } else { (c, a) };
    let (mut xm, mut fm) = (b, fb);
    let r = 2.0 - GOLDEN;
    while hi - lo > 2.0 * (tol * xm.abs() + 1e-11) {
        let probe = if hi - xm > xm - lo { xm + r * (hi - xm) } else { xm - r * (xm - lo) };
        let fp = phi(probe, t)?;
        if fp < fm {
            if probe > xm {
                lo = xm;
            } else {
                hi = xm;
            }
            xm = probe;
            fm = fp;
        } else if probe > xm {
            hi = probe;
        } else {
            lo = probe;
        }
    }
    let (alpha, f) = if fm < fx { (xm, fm) } else { (0.0, fx) };
    let step: Vec<f64> = d.iter().map(|v| v * alpha).collect();
    Ok((f, axpy(x, 1.0, &step), step))
}

fn powell<O: Objective + ?Sized>(
    obj: &O,
    theta0: &[f64],
    f0: f64,
    cfg: &ClassicalConfig,
    t: &mut Tracker,
) -> Result<(usize, bool), OptError> {
    let n = theta0.len();
    let mut direc: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut x = theta0.to_vec();
    let mut x1 = x.clone();
    let mut fval = f0;
    let line_tol = cfg.xtol * 100.0;
    let mut iter = 0;
    while iter < cfg.max_iterations {
        let fx = fval;
        let mut bigind = 0;
        let mut delta = 0.0;
        for (i, d) in direc.iter().enumerate() {
            if d.iter().all(|v| *v == 0.0) {
                continue;
            }
            let before = fval;
            let (f, xn, _) = golden_line_search(obj, &x, fval, d, line_tol, t)?;
            fval = f;
            x = xn;
            if before - fval > delta {
                delta = before - fval;
                bigind = i;
            }
        }
        iter += 1;
        if 2.0 * (fx - fval) <= cfg.ftol * (fx.abs() + fval.abs()) + 1e-20 {
            return Ok((iter, true));
        }
        if iter >= cfg.max_iterations {
            break;
        }
        let dir1: Vec<f64> = x.iter().zip(&x1).map(|(a, b)| a - b).collect();
        let x2: Vec<f64> = x.iter().zip(&x1).map(|(a, b)| 2.0 * a - b).collect();
        x1 = x.clone();
        let fx2 = t.eval(obj, &x2)?;
        if fx > fx2 {
            let mut tt = 2.0 * (fx + fx2 - 2.0 * fval);
            tt *= (fx - fval - delta).powi(2);
            tt -= delta * (fx - fx2).powi(2);
            if tt < 0.0 {
                let (f, xn, step) = golden_line_search(obj, &x, fval, &dir1, line_tol, t)?;
                fval = f;
                x = xn;
                if step.iter().any(|v| *v != 0.0) {
                    direc[bigind] = direc[n - 1].clone();
                    direc[n - 1] = step;
                }
            }
        }
    }
    Ok((iter, false))
}

fn nelder_mead<O: Objective + ?Sized>(
    obj: &O,
    theta0: &[f64],
    f0: f64,
    cfg: &ClassicalConfig,
    t: &mut Tracker,
) -> Result<(usize, bool), OptError> {
    let (rho, chi, psi, sigma) = (1.0, 2.0, 0.5, 0.5);
    let n = theta0.len();
    let mut sim = vec![theta0.to_vec()];
    let mut fs = vec![f0];
    for k in 0..n {
        let mut y = theta0.to_vec();
        y[k] = if y[k] != 0.0 { 1.05 * y[k] } else { 0.00025 };
        fs.push(t.eval(obj, &y)?);
        sim.push(y);
    }
    let sort = |sim: &mut Vec<Vec<f64>>, fs: &mut Vec<f64>| {
        let mut idx: Vec<usize> = (0..fs.len()).collect();
        idx.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
        *sim = idx.iter().map(|&i| sim[i].clone()).collect();
        *fs = idx.iter().map(|&i| fs[i]).collect();
    };
    sort(&mut sim, &mut fs);
    let mut iter = 0;
    while iter < cfg.max_iterations {
        let xspread = sim[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&sim[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let fspread = fs[1..].iter().map(|f| (f - fs[0]).abs()).fold(0.0, f64::max);
        if xspread <= cfg.xtol && fspread <= cfg.ftol {
            return Ok((iter, true));
        }
        let xbar: Vec<f64> = (0..n).map(|k| sim[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64).collect();
        let worst = sim[n].clone();
        let blend = |a: f64| -> Vec<f64> { xbar.iter().zip(&worst).map(|(b, w)| (1.0 + a) * b - a * w).collect() };
        let xr = blend(rho);
        let fxr = t.eval(obj, &xr)?;
        let mut shrink = false;
        if fxr < fs[0] {
            let xe = blend(rho * chi);
            let fxe = t.eval(obj, &xe)?;
            if fxe < fxr {
                sim[n] = xe;
                fs[n] = fxe;
            } else {
                sim[n] = xr;
                fs[n] = fxr;
            }
        } else if fxr < fs[n - 1] {
            sim[n] = xr;
            fs[n] = fxr;
        } else if fxr < fs[n] {
            let xc = blend(psi * rho);
            let fxc = t.eval(obj, &xc)?;
            if fxc <= fxr {
                sim[n] = xc;
                fs[n] = fxc;
            } else {
                shrink = true;
            }
        } else {
            let xcc = blend(-psi);
            let fxcc = t.eval(obj, &xcc)?;
            if fxcc < fs[n] {
                sim[n] = xcc;
                fs[n] = fxcc;
            } else {
                shrink = true;
            }
        }
        if shrink {
            for j in 1..=n {
                let v: Vec<f64> = sim[j].iter().zip(&sim[0]).map(|(a, b)| b + sigma * (a - b)).collect();
                fs[j] = t.eval(obj, &v)?;
                sim[j] = v;
            }
        }
        sort(&mut sim, &mut fs);
        iter += 1;
    }
    Ok((iter, false))
}

/// Backtracking from `alpha0` until the Armijo condition holds; each retry
/// takes the minimizer of the quadratic through `φ(0)`, `φ'(0)` and `φ(α)`,
/// kept within `[0.1 α, 0.5 α]`.
#[allow(clippy::too_many_arguments)]
fn armijo<O: Objective + ?Sized>(
    obj: &O,
    x: &[f64],
    fx: f64,
    slope: f64,
    d: &[f64],
    alpha0: f64,
    t: &mut Tracker,
) -> Result<Option<(f64, Vec<f64>, f64)>, OptError> {
    let mut alpha = alpha0;
    for _ in 0..MAX_BACKTRACKS {
        let xn = axpy(x, alpha, d);
        let f = t.eval(obj, &xn)?;
        if f <= fx + ARMIJO_C1 * alpha * slope {
            return Ok(Some((f, xn, alpha)));
        }
        let curv = f - fx - slope * alpha;
        let trial = if curv > 0.0 { -slope * alpha * alpha / (2.0 * curv) } else { 0.5 * alpha };
        alpha = if trial.is_finite() { trial.clamp(0.1 * alpha, 0.5 * alpha) } else { 0.5 * alpha };
    }
    Ok(None)
}

/// Polak-Ribière+ CG or inverse-Hessian BFGS, both with Armijo steps.
fn gradient_method<O: Objective + ?Sized>(
    obj: &O,
    theta0: &[f64],
    f0: f64,
    cfg: &ClassicalConfig,
    t: &mut Tracker,
    bfgs: bool,
) -> Result<(usize, bool), OptError> {
    if cfg.max_iterations == 0 {
        return Ok((0, false));
    }
    let n = theta0.len();
    let mut x = theta0.to_vec();
    let mut f = f0;
    let mut g = gradient(obj, &x, cfg.fd_step, t)?;
    let mut h: Option<Vec<f64>> = None;
    let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut prev_f: Option<f64> = None;
    let mut iter = 0;
    while iter < cfg.max_iterations {
        if norm_inf(&g) <= cfg.gtol {
            return Ok((iter, true));
        }
        if bfgs {
            d = match &h {
                Some(h) => (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect(),
                None => g.iter().map(|v| -v).collect(),
            };
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        let alpha0 = match (bfgs, prev_f) {
            (false, Some(pf)) => (1.01 * 2.0 * (f - pf) / slope).clamp(1e-8, 1.0),
            (false, None) => 1.0 / norm_inf(&g).max(1.0),
            (true, _) => 1.0,
        };
        let Some((fnew, xnew, alpha)) = armijo(obj, &x, f, slope, &d, alpha0, t)? else {
            return Ok((iter, false));
        };
        let gnew = gradient(obj, &xnew, cfg.fd_step, t)?;
        let s: Vec<f64> = d.iter().map(|v| alpha * v).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        if bfgs {
            let ys = dot(&y, &s);
            if ys > 1e-10 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                let hm = h.get_or_insert_with(|| {
                    let scale = ys / dot(&y, &y);
                    let mut m = vec![0.0; n * n];
                    (0..n).for_each(|i| m[i * n + i] = scale);
                    m
                });
                bfgs_update(hm, &s, &y, ys, n);
            }
        } else {
            let beta = (dot(&gnew, &y) / dot(&g, &g)).max(0.0);
            d = gnew.iter().zip(&d).map(|(gi, di)| -gi + beta * di).collect();
        }
        prev_f = Some(f);
        x = xnew;
        f = fnew;
        g = gnew;
        iter += 1;
    }
    Ok((iter, norm_inf(&g) <= cfg.gtol))
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], ys: f64, n: usize) {
    let rho = 1.0 / ys;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
