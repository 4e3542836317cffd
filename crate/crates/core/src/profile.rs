//! The hedgehog order-parameter profile `h(r)` on `[1, R]`.
//!
//! `h` solves `h'' + (2/r)h' − (6/r²)h = h f(h)` with `h(1) = h(R) = 1`,
//! where `f(h) = (t/2)(h² − 1) + (3h₊/2)(h² − h)`. The ODE is discretized with
//! standard three-point stencils on a uniform grid and solved by damped Newton,
//! falling back to continuation in `t` from `t = 0`.

use std::io::Write;
use std::sync::OnceLock;

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{domain, HedgehogError, Result};
use crate::linalg::solve_tridiagonal;
use crate::qtensor::{bulk_gradient, QTensor, ScalingParams, SQRT_3_2};
use crate::spline::UniformSpline;

/// Uniform radial nodes from `1` to `R` (both included, endpoints exact).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

impl RadialGrid {
    pub fn uniform(r_outer: f64, n: usize) -> Result<Self> {
        if !(r_outer > 1.0) || !r_outer.is_finite() {
            return domain(format!("outer radius must be > 1, got {r_outer}"));
        }
        if n < 3 {
            return domain(format!("radial grid needs at least 3 nodes, got {n}"));
        }
        let dr = (r_outer - 1.0) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * dr).collect();
        nodes[n - 1] = r_outer;
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dr(&self) -> f64 {
        (self.r_outer() - 1.0) / (self.len() - 1) as f64
    }

    pub fn r_outer(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Composite trapezoid weights.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let dr = self.dr();
        let mut w = vec![dr; self.len()];
        w[0] = 0.5 * dr;
        *w.last_mut().unwrap() = 0.5 * dr;
        w
    }
}

/// `f(h) = (t/2)(h² − 1) + (3h₊/2)(h² − h)`.
pub fn f_of_h(h: f64, p: &ScalingParams) -> f64 {
    p.t / 2.0 * (h * h - 1.0) + 1.5 * p.h_plus * (h * h - h)
}

fn df_of_h(h: f64, p: &ScalingParams) -> f64 {
    p.t * h + 1.5 * p.h_plus * (2.0 * h - 1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct HedgehogProfile {
    pub r_outer: f64,
    pub params: ScalingParams,
    pub grid: RadialGrid,
    pub h: Vec<f64>,
    pub dh: Vec<f64>,
    /// Max-norm of the discrete equations with rows scaled by `dr²`
    /// (the quantity Newton drives to zero).
    pub residual_norm: f64,
    /// Max-norm of the unscaled ODE residual at interior nodes.
    pub ode_residual: f64,
    pub newton_iterations: usize,
    /// Temperatures visited on the way to `params.t`.
    pub continuation_path: Vec<f64>,
    #[serde(skip)]
    spline: UniformSpline,
}

impl HedgehogProfile {
    /// Wraps arbitrary nodal values (e.g. a comparison function) as a profile.
    pub fn from_values(params: ScalingParams, grid: RadialGrid, h: Vec<f64>) -> Result<Self> {
        if h.len() != grid.len() {
            return domain("nodal values do not match the grid");
        }
        let r_outer = grid.r_outer();
        let dr = grid.dr();
        let r = grid.nodes();
        let n = h.len();
        let residual_norm = discrete_residual(r, dr, &h, &params)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let mut dh = vec![0.0; n];
        for i in 1..n - 1 {
            dh[i] = (h[i + 1] - h[i - 1]) / (2.0 * dr);
        }
        dh[0] = (-3.0 * h[0] + 4.0 * h[1] - h[2]) / (2.0 * dr);
        dh[n - 1] = (3.0 * h[n - 1] - 4.0 * h[n - 2] + h[n - 3]) / (2.0 * dr);
        // end curvature from the ODE itself: h'' = h f(h) − 2h'/r + 6h/r²
        let end_d2 = |i: usize| h[i] * f_of_h(h[i], &params) - 2.0 * dh[i] / r[i] + 6.0 * h[i] / (r[i] * r[i]);
        let spline = UniformSpline::new(1.0, dr, h.clone(), end_d2(0), end_d2(n - 1))?;
        Ok(Self {
            r_outer,
            params,
            grid,
            h,
            dh,
            residual_norm,
            ode_residual: residual_norm / (dr * dr),
            newton_iterations: 0,
            continuation_path: Vec::new(),
            spline,
        })
    }

    /// `(h, h', h'')` from the cubic spline through the nodal values.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        self.spline.eval(r)
    }

    pub fn min_h(&self) -> f64 {
        self.h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn argmin_r(&self) -> f64 {
        let (i, _) = self
            .h
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
        self.grid.nodes()[i]
    }
}

/// Rows of the discrete ODE scaled by `dr²` (interior nodes only).
fn discrete_residual(r: &[f64], dr: f64, h: &[f64], p: &ScalingParams) -> Vec<f64> {
    (1..h.len() - 1)
        .map(|i| {
            let a = dr / r[i];
            h[i + 1] * (1.0 + a) - 2.0 * h[i] + h[i - 1] * (1.0 - a)
                - dr * dr * (6.0 / (r[i] * r[i]) + f_of_h(h[i], p)) * h[i]
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct NewtonFailure {
    residual: f64,
    iterations: usize,
    reason: String,
    last: Vec<f64>,
}

const MAX_NEWTON: usize = 60;

fn newton(grid: &RadialGrid, p: &ScalingParams, mut h: Vec<f64>, tol: f64) -> std::result::Result<(Vec<f64>, usize), NewtonFailure> {
    let r = grid.nodes();
    let dr = grid.dr();
    let n = h.len();
    let mut res = discrete_residual(r, dr, &h, p);
    for it in 0..MAX_NEWTON {
        if max_abs(&res) <= tol {
            return Ok((h, it));
        }
        let m = n - 2;
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            let a = dr / r[i];
            lower[k] = 1.0 - a;
            upper[k] = 1.0 + a;
            diag[k] = -2.0 - dr * dr * (6.0 / (r[i] * r[i]) + f_of_h(h[i], p) + h[i] * df_of_h(h[i], p));
        }
        let rhs: Vec<f64> = res.iter().map(|v| -v).collect();
        let step = solve_tridiagonal(&lower, &diag, &upper, &rhs).map_err(|e| NewtonFailure {
            residual: max_abs(&res),
            iterations: it,
            reason: e.to_string(),
            last: h.clone(),
        })?;
        let norm0 = l2(&res);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = h
                .iter()
                .enumerate()
                .map(|(i, &hi)| if i == 0 || i == n - 1 { hi } else { hi + lambda * step[i - 1] })
                .collect();
            if trial.iter().all(|&v| v > 0.0) {
                let tres = discrete_residual(r, dr, &trial, p);
                let tn = l2(&tres);
                if tn < (1.0 - 1e-4 * lambda) * norm0 || max_abs(&tres) <= tol {
                    h = trial;
                    res = tres;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(NewtonFailure {
                residual: max_abs(&res),
                iterations: it,
                reason: "line search stalled".into(),
                last: h,
            });
        }
    }
    if max_abs(&res) <= tol {
        Ok((h, MAX_NEWTON))
    } else {
        Err(NewtonFailure { residual: max_abs(&res), iterations: MAX_NEWTON, reason: "iteration cap".into(), last: h })
    }
}

fn check_grid(r_outer: f64, grid: &RadialGrid) -> Result<()> {
    if !(r_outer > 1.0) {
        return domain(format!("outer radius must be > 1, got {r_outer}"));
    }
    if (grid.r_outer() - r_outer).abs() > 1e-12 * r_outer {
        return domain(format!("grid ends at {} but R = {r_outer}", grid.r_outer()));
    }
    Ok(())
}

fn finish(params: ScalingParams, grid: &RadialGrid, h: Vec<f64>, iters: usize, path: Vec<f64>) -> Result<HedgehogProfile> {
    if let Some((i, &v)) = h.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v <= 1.0)) {
        return Err(HedgehogError::Solver {
            t: params.t,
            residual: f64::NAN,
            iterations: iters,
            reason: format!("solution leaves (0, 1] at node {i} (h = {v})"),
            last_iterate: h,
        });
    }
    let mut prof = HedgehogProfile::from_values(params, grid.clone(), h)?;
    prof.newton_iterations = iters;
    prof.continuation_path = path;
    Ok(prof)
}

/// Continuation step cap in `t`.
const MAX_DT: f64 = 5.0;

/// Solves the profile problem on `grid` to a scaled residual `≤ tol`.
pub fn solve_profile(r_outer: f64, params: &ScalingParams, grid: &RadialGrid, tol: f64) -> Result<HedgehogProfile> {
    check_grid(r_outer, grid)?;
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let flat = vec![1.0; grid.len()];
    match newton(grid, params, flat.clone(), tol) {
        Ok((h, it)) => finish(*params, grid, h, it, vec![params.t]),
        Err(_) => continuation(grid, params, flat, tol),
    }
}

fn continuation(grid: &RadialGrid, params: &ScalingParams, flat: Vec<f64>, tol: f64) -> Result<HedgehogProfile> {
    let target = params.t;
    let start = ScalingParams::new(0.0)?;
    let (mut h, mut total) = newton(grid, &start, flat, tol).map_err(|f| HedgehogError::Solver {
        t: 0.0,
        residual: f.residual,
        iterations: f.iterations,
        reason: f.reason,
        last_iterate: f.last,
    })?;
    let mut path = vec![0.0];
    let mut t = 0.0;
    let mut dt = MAX_DT.min(target);
    while t < target {
        let next = (t + dt).min(target);
        let p = ScalingParams::new(next)?;
        match newton(grid, &p, h.clone(), tol) {
            Ok((hn, it)) => {
                h = hn;
                total += it;
                t = next;
                path.push(t);
                dt = (dt * 2.0).min(MAX_DT);
            }
            Err(f) => {
                dt *= 0.5;
                if dt < 1e-8 {
                    return Err(HedgehogError::Solver {
                        t: next,
                        residual: f.residual,
                        iterations: total + f.iterations,
                        reason: format!("continuation step collapsed ({})", f.reason),
                        last_iterate: f.last,
                    });
                }
            }
        }
    }
    finish(*params, grid, h, total, path)
}

/// Solutions reached from the flat initial guess and from continuation in `t`,
/// deduplicated. Uniqueness of the profile is not assumed anywhere.
pub fn solve_profile_paths(r_outer: f64, params: &ScalingParams, grid: &RadialGrid, tol: f64) -> Result<Vec<(String, HedgehogProfile)>> {
    check_grid(r_outer, grid)?;
    let mut found: Vec<(String, HedgehogProfile)> = Vec::new();
    let flat = vec![1.0; grid.len()];
    if let Ok((h, it)) = newton(grid, params, flat.clone(), tol) {
        found.push(("direct".into(), finish(*params, grid, h, it, vec![params.t])?));
    }
    if let Ok(p) = continuation(grid, params, flat, tol) {
        let distinct = found
            .iter()
            .all(|(_, q)| q.h.iter().zip(&p.h).any(|(a, b)| (a - b).abs() > 1e-8));
        if distinct {
            found.push(("continuation".into(), p));
        }
    }
    if found.is_empty() {
        return solve_profile(r_outer, params, grid, tol).map(|p| vec![("direct".into(), p)]);
    }
    Ok(found)
}

/// Bulk part of the radial energy density, `r²[t(1−h²)² + h₊(1+3h⁴−4h³)]/8`.
fn radial_bulk(r: f64, h: f64, p: &ScalingParams) -> f64 {
    let s = 1.0 - h * h;
    let h2 = h * h;
    r * r * (p.t * s * s + p.h_plus * (1.0 + 3.0 * h2 * h2 - 4.0 * h2 * h)) / 8.0
}

/// Radial energy `∫ (r²/2)h'² + 3h² + bulk dr` of nodal values on `grid`
/// (gradient by cell midpoints, the rest by the trapezoid rule).
pub fn radial_energy(grid: &RadialGrid, h: &[f64], p: &ScalingParams) -> f64 {
    let r = grid.nodes();
    let dr = grid.dr();
    let grad: f64 = (0..h.len() - 1)
        .map(|i| {
            let rm = 0.5 * (r[i] + r[i + 1]);
            let d = (h[i + 1] - h[i]) / dr;
            0.5 * rm * rm * d * d * dr
        })
        .sum();
    let rest: f64 = grid
        .trapezoid_weights()
        .iter()
        .zip(r.iter().zip(h))
        .map(|(w, (&ri, &hi))| w * (3.0 * hi * hi + radial_bulk(ri, hi, p)))
        .sum();
    grad + rest
}

pub fn profile_energy(prof: &HedgehogProfile) -> f64 {
    radial_energy(&prof.grid, &prof.h, &prof.params)
}

/// Comparison function `η(r) = [(R³−1)r² + (R²−1)(R/r)³]/(R⁵−1)`.
pub fn eta(r: f64, r_outer: f64) -> Result<f64> {
    if !(r_outer > 1.0) {
        return domain(format!("outer radius must be > 1, got {r_outer}"));
    }
    if !(r >= 1.0 && r <= r_outer) {
        return domain(format!("r = {r} outside [1, {r_outer}]"));
    }
    Ok(eta_unchecked(r, r_outer))
}

pub(crate) fn eta_unchecked(r: f64, big_r: f64) -> f64 {
    let r3 = big_r.powi(3);
    ((r3 - 1.0) * r * r + (big_r * big_r - 1.0) * (big_r / r).powi(3)) / (big_r.powi(5) - 1.0)
}

/// Closed-form minimum of `η` over `[1, R]`.
pub fn eta_min(r_outer: f64) -> Result<f64> {
    if !(r_outer > 1.0) {
        return domain(format!("outer radius must be > 1, got {r_outer}"));
    }
    let r = r_outer;
    let num = 5.0 * (r.powi(3) * (r * r - 1.0)).powf(0.4) * (r.powi(3) - 1.0).powf(0.6);
    let den = 2f64.powf(0.4) * 3f64.powf(0.6) * (r.powi(5) - 1.0);
    Ok(num / den)
}

/// Root of `min η(R) = 2/3`: below it the comparison function stays above 2/3.
pub fn r_star() -> Result<f64> {
    static CACHE: OnceLock<f64> = OnceLock::new();
    if let Some(&v) = CACHE.get() {
        return Ok(v);
    }
    let g = |r: f64| eta_min(r).map(|m| m - 2.0 / 3.0);
    let (mut lo, mut hi) = (2.0, 2.3);
    if !(g(lo)? > 0.0 && g(hi)? < 0.0) {
        return Err(HedgehogError::Internal("R* bracket does not change sign".into()));
    }
    let mut prev = f64::INFINITY;
    for k in 0..=60 {
        let v = eta_min(lo + (hi - lo) * k as f64 / 60.0)?;
        if v >= prev {
            return Err(HedgehogError::Internal("eta_min not decreasing on the R* bracket".into()));
        }
        prev = v;
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v = 0.5 * (lo + hi);
    let _ = CACHE.set(v);
    Ok(v)
}

/// Nodewise check of `2/3 ≤ η ≤ h ≤ 1` (for `R ≤ R*`) and `h ≥ √(1 − 12/t)` (for `t > 12`).
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub r_outer: f64,
    pub t: f64,
    /// Whether the `η ≤ h` comparison applies (`R ≤ R*`).
    pub eta_checked: bool,
    /// `min (h − η)`, when checked.
    pub eta_margin: Option<f64>,
    /// `min η − 2/3`, when checked.
    pub eta_floor_margin: Option<f64>,
    /// `min (1 − h)`.
    pub upper_margin: f64,
    pub min_h: f64,
    /// `√(1 − 12/t)` or 0 when `t ≤ 12`.
    pub sqrt_bound: f64,
    /// `min (h − √(1 − 12/t))`.
    pub sqrt_margin: f64,
    pub slack: f64,
    pub passed: bool,
}

pub fn sqrt_bound(t: f64) -> f64 {
    if t > 12.0 {
        (1.0 - 12.0 / t).sqrt()
    } else {
        0.0
    }
}

pub fn verify_bounds(prof: &HedgehogProfile) -> Result<BoundsReport> {
    verify_bounds_with(prof, 1e-10)
}

pub fn verify_bounds_with(prof: &HedgehogProfile, slack: f64) -> Result<BoundsReport> {
    let big_r = prof.r_outer;
    let eta_checked = big_r <= r_star()?;
    let r = prof.grid.nodes();
    let mut eta_margin = f64::INFINITY;
    let mut eta_floor = f64::INFINITY;
    let mut upper = f64::INFINITY;
    for (&ri, &hi) in r.iter().zip(&prof.h) {
        let e = eta_unchecked(ri, big_r);
        eta_margin = eta_margin.min(hi - e);
        eta_floor = eta_floor.min(e - 2.0 / 3.0);
        upper = upper.min(1.0 - hi);
    }
    let bound = sqrt_bound(prof.params.t);
    let min_h = prof.min_h();
    let sqrt_margin = min_h - bound;
    let mut passed = upper >= -slack && min_h > 0.0 && sqrt_margin >= -slack;
    if eta_checked {
        passed &= eta_margin >= -slack && eta_floor >= -slack;
    }
    Ok(BoundsReport {
        r_outer: big_r,
        t: prof.params.t,
        eta_checked,
        eta_margin: eta_checked.then_some(eta_margin),
        eta_floor_margin: eta_checked.then_some(eta_floor),
        upper_margin: upper,
        min_h,
        sqrt_bound: bound,
        sqrt_margin,
        slack,
        passed,
    })
}

/// `H(x) = √(3/2) h(|x|)(x̂⊗x̂ − I/3)`.
pub fn hedgehog_field(prof: &HedgehogProfile, x: &Vector3<f64>) -> Result<QTensor> {
    let r = x.norm();
    let tol = 1e-12 * prof.r_outer;
    if !(r >= 1.0 - tol && r <= prof.r_outer + tol) {
        return domain(format!("|x| = {r} outside the shell [1, {}]", prof.r_outer));
    }
    let (h, _, _) = prof.eval(r.clamp(1.0, prof.r_outer));
    Ok(QTensor::uniaxial(SQRT_3_2 * h, &(x / r)))
}

/// Max over `samples` of `|ΔH − ∂f_B(H)|`, with `ΔH` from the radial reduction
/// `ΔH = √(3/2)(h'' + 2h'/r − 6h/r²)(x̂⊗x̂ − I/3)`.
pub fn el_residual(prof: &HedgehogProfile, samples: &[Vector3<f64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in samples {
        let r = x.norm();
        let hq = hedgehog_field(prof, x)?;
        let (h, dh, d2h) = prof.eval(r.clamp(1.0, prof.r_outer));
        let lap = QTensor::uniaxial(SQRT_3_2 * (d2h + 2.0 * dh / r - 6.0 * h / (r * r)), &(x / r));
        let diff = lap - bulk_gradient(&hq, &prof.params);
        worst = worst.max(diff.norm2().sqrt());
    }
    Ok(worst)
}

/// CSV dump with columns `r,h,dh,eta,bound_sqrt`.
pub fn write_profile_csv<W: Write>(prof: &HedgehogProfile, mut w: W) -> Result<()> {
    writeln!(w, "r,h,dh,eta,bound_sqrt")?;
    let bound = sqrt_bound(prof.params.t);
    for (i, &r) in prof.grid.nodes().iter().enumerate() {
        writeln!(w, "{},{},{},{},{}", r, prof.h[i], prof.dh[i], eta_unchecked(r, prof.r_outer), bound)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        while (b - a).abs() > 1e-12 {
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        f(0.5 * (a + b))
    }

    #[test]
    fn f_examples() {
        let p = ScalingParams::new(3.0).unwrap();
        assert_eq!(f_of_h(1.0, &p), 0.0);
        assert_abs_diff_eq!(f_of_h(0.0, &p), -1.5, epsilon = 1e-15);
        let p0 = ScalingParams::new(0.0).unwrap();
        assert_abs_diff_eq!(f_of_h(0.5, &p0), -9.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn eta_examples() {
        assert_abs_diff_eq!(eta(1.0, 2.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(eta(2.0, 2.0).unwrap(), 1.0, epsilon = 1e-15);
        // (7·2.25 + 3·(2/1.5)³)/31
        let direct = (7.0 * 2.25 + 3.0 * (2.0f64 / 1.5).powi(3)) / 31.0;
        assert_abs_diff_eq!(eta(1.5, 2.0).unwrap(), direct, epsilon = 1e-15);
        assert!(eta(0.9, 2.0).is_err());
        assert!(eta(2.1, 2.0).is_err());
        // ODE residual via the exact derivatives
        for big_r in [1.3f64, 2.0, 4.0] {
            let a = (big_r.powi(3) - 1.0) / (big_r.powi(5) - 1.0);
            let b = (big_r * big_r - 1.0) * big_r.powi(3) / (big_r.powi(5) - 1.0);
            for k in 0..20 {
                let r = 1.0 + (big_r - 1.0) * k as f64 / 19.0;
                let e = a * r * r + b / r.powi(3);
                let de = 2.0 * a * r - 3.0 * b / r.powi(4);
                let d2e = 2.0 * a + 12.0 * b / r.powi(5);
                assert!((d2e + 2.0 * de / r - 6.0 * e / (r * r)).abs() < 1e-12);
                assert_abs_diff_eq!(e, eta(r, big_r).unwrap(), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn eta_min_matches_golden_section() {
        for big_r in [1.1, 1.5, 2.0, 3.0] {
            let numeric = golden_min(|r| eta_unchecked(r, big_r), 1.0, big_r);
            assert_abs_diff_eq!(eta_min(big_r).unwrap(), numeric, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(eta_min(1.0 + 1e-4).unwrap(), 1.0, epsilon = 1e-6);
        assert!((eta_min(2.0).unwrap() - 0.7245).abs() < 5e-5);
    }

    #[test]
    fn r_star_root() {
        let rs = r_star().unwrap();
        assert!((rs - 2.20).abs() < 0.01, "R* = {rs}");
        assert_abs_diff_eq!(eta_min(rs).unwrap(), 2.0 / 3.0, epsilon = 1e-9);
        for big_r in [1.2, 1.8, 2.19] {
            let g = RadialGrid::uniform(big_r, 2001).unwrap();
            assert!(g.nodes().iter().all(|&r| eta_unchecked(r, big_r) >= 2.0 / 3.0));
        }
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::uniform(1.0, 10).is_err());
        assert!(RadialGrid::uniform(2.0, 2).is_err());
        let g = RadialGrid::uniform(1.7, 11).unwrap();
        assert_eq!(g.nodes()[0], 1.0);
        assert_eq!(g.nodes()[10], 1.7);
    }

    #[test]
    fn flat_profile_energy() {
        let g = RadialGrid::uniform(2.5, 101).unwrap();
        let p = ScalingParams::new(4.0).unwrap();
        assert_abs_diff_eq!(radial_energy(&g, &vec![1.0; 101], &p), 3.0 * 1.5, epsilon = 1e-12);
    }

    #[test]
    fn solver_rejects_bad_input() {
        let g = RadialGrid::uniform(1.5, 33).unwrap();
        let p = ScalingParams::new(0.0).unwrap();
        assert!(solve_profile(1.6, &p, &g, 1e-10).is_err());
        assert!(solve_profile(1.5, &p, &g, 0.0).is_err());
    }

    #[test]
    fn solved_profile_basics() {
        let g = RadialGrid::uniform(1.5, 2049).unwrap();
        let p = ScalingParams::new(0.0).unwrap();
        let prof = solve_profile(1.5, &p, &g, 1e-10).unwrap();
        assert_eq!(prof.h[0], 1.0);
        assert_eq!(*prof.h.last().unwrap(), 1.0);
        assert!(prof.residual_norm <= 1e-10);
        assert!(prof.min_h() < 1.0 && prof.min_h() > 0.0);
        assert!(profile_energy(&prof) <= 1.5);
        // independent check of the residual with the (r²h')' form plus the first-order correction
        let r = g.nodes();
        let dr = g.dr();
        let worst = (1..r.len() - 1)
            .map(|i| {
                let d2 = (prof.h[i + 1] - 2.0 * prof.h[i] + prof.h[i - 1]) / (dr * dr);
                let d1 = (prof.h[i + 1] - prof.h[i - 1]) / (2.0 * dr);
                (d2 + 2.0 * d1 / r[i] - 6.0 * prof.h[i] / (r[i] * r[i]) - prof.h[i] * f_of_h(prof.h[i], &p)).abs() * dr * dr
            })
            .fold(0.0f64, f64::max);
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn boundary_tensor_at_shell_edges() {
        let g = RadialGrid::uniform(1.8, 257).unwrap();
        let p = ScalingParams::new(2.0).unwrap();
        let prof = solve_profile(1.8, &p, &g, 1e-10).unwrap();
        for x in [Vector3::new(0.0, 0.6, 0.8), Vector3::new(0.0, 0.6 * 1.8, 0.8 * 1.8)] {
            let h = hedgehog_field(&prof, &x).unwrap();
            let qb = QTensor::uniaxial(SQRT_3_2, &(x / x.norm()));
            assert!((h - qb).norm2().sqrt() < 1e-13);
        }
        assert!(hedgehog_field(&prof, &Vector3::new(0.5, 0.0, 0.0)).is_err());
        assert!(hedgehog_field(&prof, &Vector3::new(2.0, 0.0, 0.0)).is_err());
    }
}
