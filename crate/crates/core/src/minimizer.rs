//! Descent on the discrete energy, the cubic/quartic energy expansion about the
//! hedgehog, and the smallest eigenvalue of the discrete second variation.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::linalg::{dot, lanczos_smallest, LanczosOptions, LanczosResult};
use crate::profile::HedgehogProfile;
use crate::qtensor::{QTensor, ScalingParams, SQRT6, SQRT_3_2};
use crate::shell::{
    discrete_energy, discrete_gradient, field_distance, gradient_energy, hedgehog_on_grid, hessian_apply, l2_dot,
    profile_on_radii, random_admissible, QField, ShellGrid,
};
use crate::spectra::frame_components;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Lbfgs,
    GradientFlow,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinOptions {
    /// Stop once the `L²`-gradient norm `‖M^{-1/2} ∇E‖` is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// L-BFGS history length.
    pub memory: usize,
    pub method: Method,
}

impl Default for MinOptions {
    fn default() -> Self {
        Self { tol: 1e-4, max_iter: 5000, memory: 10, method: Method::Lbfgs }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinResult {
    pub final_energy: f64,
    pub initial_energy: f64,
    /// Discrete energy of the sampled hedgehog `H`.
    pub hedgehog_energy: f64,
    /// `final_energy − hedgehog_energy`.
    pub energy_gap: f64,
    /// `‖Q − H‖_{L²}`.
    pub distance: f64,
    pub iterations: usize,
    pub energy_evals: usize,
    pub converged: bool,
    pub grad_norm: f64,
    pub message: String,
}

/// Interior coefficients in mass-scaled form `√m · c`.
struct Scaling {
    range: std::ops::Range<usize>,
    sqrt_m: Vec<f64>,
}

impl Scaling {
    fn new(g: &ShellGrid) -> Self {
        let range = g.interior();
        let sqrt_m = range.clone().map(|n| g.node_volume(n).sqrt()).collect();
        Self { range, sqrt_m }
    }

    fn dim(&self) -> usize {
        5 * self.sqrt_m.len()
    }

    fn to_flat(&self, q: &QField, scale_up: bool) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        out.par_chunks_mut(5).enumerate().for_each(|(k, c)| {
            let s = if scale_up { self.sqrt_m[k] } else { 1.0 / self.sqrt_m[k] };
            for (a, b) in c.iter_mut().zip(q.nodes[self.range.start + k].c) {
                *a = s * b;
            }
        });
        out
    }

    /// Overwrites the interior of `q` with `x / √m`.
    fn write(&self, x: &[f64], q: &mut QField) {
        q.nodes[self.range.clone()].par_iter_mut().enumerate().for_each(|(k, t)| {
            let s = 1.0 / self.sqrt_m[k];
            let mut c = [0.0; 5];
            for (a, b) in c.iter_mut().zip(&x[5 * k..5 * k + 5]) {
                *a = s * b;
            }
            *t = QTensor::new(c);
        });
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(y, x)| *y += a * x);
}

/// Minimizes the discrete energy over fields sharing the Dirichlet layers of `init`.
/// `hedgehog` is the reference for the reported gap and distance.
pub fn minimize(init: &QField, p: &ScalingParams, g: &ShellGrid, opts: &MinOptions, hedgehog: &QField) -> Result<(MinResult, QField)> {
    if init.len() != g.len() || hedgehog.len() != g.len() {
        return domain("field does not match the grid");
    }
    if !(opts.tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let sc = Scaling::new(g);
    let mut q = init.clone();
    let mut x = sc.to_flat(&q, true);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], q: &mut QField| -> Result<(f64, Vec<f64>)> {
        sc.write(x, q);
        evals += 1;
        let e = discrete_energy(q, p, g)?;
        let gr = discrete_gradient(q, p, g)?;
        Ok((e, sc.to_flat(&gr, false)))
    };
    let (mut e, mut gx) = eval(&x, &mut q)?;
    let e0 = e;
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut message = String::from("iteration cap reached");
    let mut gnorm = dot(&gx, &gx).sqrt();
    while iterations < opts.max_iter {
        if gnorm <= opts.tol {
            converged = true;
            message = "gradient tolerance reached".into();
            break;
        }
        let mut d: Vec<f64> = gx.iter().map(|v| -v).collect();
        if opts.method == Method::Lbfgs && !hist.is_empty() {
            let mut alphas = Vec::with_capacity(hist.len());
            for (s, y, rho) in hist.iter().rev() {
                let a = rho * dot(s, &d);
                axpy(&mut d, -a, y);
                alphas.push(a);
            }
            let (s, y, _) = hist.back().unwrap();
            let gamma = dot(s, y) / dot(y, y);
            d.par_iter_mut().for_each(|v| *v *= gamma);
            for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
                let b = rho * dot(y, &d);
                axpy(&mut d, a - b, s);
            }
        }
        let mut slope = dot(&gx, &d);
        if !(slope < 0.0) {
            hist.clear();
            d = gx.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }
        let mut step = if hist.is_empty() { (1e-2 / gnorm).min(1.0) } else { 1.0 };
        if opts.method == Method::GradientFlow {
            step = hist.front().map_or(step, |h| h.2);
        }
        let mut accepted = None;
        for _ in 0..60 {
            let mut xt = x.clone();
            axpy(&mut xt, step, &d);
            let (et, gt) = eval(&xt, &mut q)?;
            // approximate Wolfe test once energy differences reach roundoff
            let flat = (et - e).abs() <= 1e-13 * e.abs() && dot(&gt, &d).abs() <= 0.9 * slope.abs();
            if et <= e + 1e-4 * step * slope || flat {
                accepted = Some((xt, et, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((xt, et, gt)) = accepted else {
            sc.write(&x, &mut q);
            message = "line search failed".into();
            break;
        };
        let s: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gt.iter().zip(&gx).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        match opts.method {
            Method::Lbfgs => {
                if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                    hist.push_back((s, y, 1.0 / sy));
                    if hist.len() > opts.memory {
                        hist.pop_front();
                    }
                }
            }
            // remember the accepted step length (grown) for the next explicit step
            Method::GradientFlow => {
                hist.clear();
                hist.push_back((Vec::new(), Vec::new(), step * 2.0));
            }
        }
        x = xt;
        e = et;
        gx = gt;
        gnorm = dot(&gx, &gx).sqrt();
        iterations += 1;
    }
    sc.write(&x, &mut q);
    if gnorm <= opts.tol {
        converged = true;
    }
    let he = discrete_energy(hedgehog, p, g)?;
    let result = MinResult {
        final_energy: e,
        initial_energy: e0,
        hedgehog_energy: he,
        energy_gap: e - he,
        distance: field_distance(&q, hedgehog, g)?,
        iterations,
        energy_evals: evals,
        converged,
        grad_norm: gnorm,
        message,
    };
    Ok((result, q))
}

/// Terms of `I[H + V] − I[H]` grouped by order in `V`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExpansionTerms {
    /// `⟨∇I_h(H), V⟩`: zero for an exact critical point, `O(grid error)` for the sampled one.
    pub linear: f64,
    /// `∫ ½|∇V|² + ...` (the quadratic group).
    pub quadratic: f64,
    pub cubic: f64,
    pub quartic: f64,
    /// `quadratic + cubic + quartic`.
    pub expansion: f64,
    /// `I_h[H + V] − I_h[H]` evaluated directly.
    pub direct: f64,
}

impl ExpansionTerms {
    /// `|expansion + linear − direct| / |direct|`.
    pub fn relative_error(&self) -> f64 {
        (self.expansion + self.linear - self.direct).abs() / self.direct.abs()
    }

    /// `|expansion − direct| / |direct|` (linear term omitted).
    pub fn relative_error_without_linear(&self) -> f64 {
        (self.expansion - self.direct).abs() / self.direct.abs()
    }
}

/// Bulk part of the expansion at profile value `h` for frame components `v`: `(quadratic, cubic, quartic)`.
pub fn expansion_density(h: f64, v: &[f64; 5], p: &ScalingParams) -> (f64, f64, f64) {
    let (t, hp) = (p.t, p.h_plus);
    let s = v[1] * v[1] + v[2] * v[2] + v[3] * v[3] + v[4] * v[4];
    let v00 = v[0] * v[0];
    let norm2 = 2.0 / 3.0 * v00 + 2.0 * s;
    let quad = t / 4.0 * norm2 * (h * h - 1.0)
        + t / 3.0 * h * h * v00
        + hp * v00 / 2.0 * (3.0 * h * h - 2.0 * h)
        + 1.5 * hp * (h * h + 2.0 * h) * (v[3] * v[3] + v[4] * v[4])
        + 1.5 * hp * (h * h - h) * (v[1] * v[1] + v[2] * v[2]);
    let cubic = (t / SQRT6 + SQRT_3_2 * hp) * h * v[0] * norm2
        - SQRT6 * hp / 2.0
            * (2.0 / 9.0 * v00 * v[0] + v[0] * (v[1] * v[1] + v[2] * v[2]) + 6.0 * v[1] * v[2] * v[3]
                + 3.0 * v[4] * (v[1] * v[1] - v[2] * v[2])
                - 2.0 * v[0] * (v[3] * v[3] + v[4] * v[4]));
    let quartic = (t + 3.0 * hp) / 8.0 * (4.0 / 9.0 * v00 * v00 + 4.0 * s * s + 8.0 / 3.0 * v00 * s);
    (quad, cubic, quartic)
}

/// Evaluates the mode-component expansion of `I[H + V] − I[H]` on the grid next to the direct difference.
pub fn energy_difference_expansion(prof: &HedgehogProfile, g: &ShellGrid, v: &QField) -> Result<ExpansionTerms> {
    if v.len() != g.len() {
        return domain("perturbation does not match the grid");
    }
    let sl = g.slice_len();
    if v.nodes[..sl].iter().chain(&v.nodes[(g.nr - 1) * sl..]).any(|q| *q != QTensor::ZERO) {
        return domain("perturbation must vanish on r = 1 and r = R");
    }
    let p = &prof.params;
    let h = profile_on_radii(g, prof)?;
    let hq = hedgehog_on_grid(g, prof)?;
    let comps = frame_components(g, v)?;
    let (mut quad, mut cubic, mut quartic) = (gradient_energy(v, g)?, 0.0, 0.0);
    for (n, c) in comps.iter().enumerate() {
        let (a, b, d) = expansion_density(h[n / sl], c, p);
        let w = g.node_volume(n);
        quad += w * a;
        cubic += w * b;
        quartic += w * d;
    }
    let grad = discrete_gradient(&hq, p, g)?;
    let linear: f64 = grad.nodes.iter().zip(&v.nodes).map(|(a, b)| a.dot(b)).sum();
    let direct = discrete_energy(&hq.add(v), p, g)? - discrete_energy(&hq, p, g)?;
    Ok(ExpansionTerms { linear, quadratic: quad, cubic, quartic, expansion: quad + cubic + quartic, direct })
}

/// Smallest eigenvalue of the discrete Hessian at the sampled hedgehog, relative to
/// the nodal `L²` mass (Lanczos on `M^{-1/2} A M^{-1/2}`).
pub fn full_dsq_min(prof: &HedgehogProfile, g: &ShellGrid, opts: LanczosOptions) -> Result<LanczosResult> {
    let hq = hedgehog_on_grid(g, prof)?;
    let sc = Scaling::new(g);
    let p = prof.params;
    let apply = |x: &[f64], y: &mut [f64]| {
        let mut v = QField::zeros(g);
        sc.write(x, &mut v);
        let hv = hessian_apply(&hq, &v, &p, g).expect("grid-consistent fields");
        y.copy_from_slice(&sc.to_flat(&hv, false));
    };
    lanczos_smallest(sc.dim(), apply, opts)
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalityRun {
    pub seed: u64,
    pub result: MinResult,
    /// `final_energy − reference_energy`.
    pub gap_to_reference: f64,
    /// `‖Q − reference‖_{L²}`.
    pub distance_to_reference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalitySummary {
    pub r_outer: f64,
    pub t: f64,
    pub shape: (usize, usize, usize),
    pub amplitude: f64,
    pub hedgehog_energy: f64,
    pub hedgehog_norm: f64,
    /// The descent limit started from the sampled hedgehog itself.
    pub reference: MinResult,
    pub runs: Vec<MinimalityRun>,
    pub min_gap_to_reference: f64,
    pub max_distance_to_reference: f64,
    pub min_gap_to_hedgehog: f64,
    pub max_distance_to_hedgehog: f64,
    pub all_converged: bool,
    pub options: MinOptions,
}

/// `runs` descents from `random_admissible(·, amplitude, seed + k)`, compared with
/// the descent limit from the sampled hedgehog.
pub fn minimality_suite(prof: &HedgehogProfile, g: &ShellGrid, runs: usize, amplitude: f64, seed: u64, opts: &MinOptions) -> Result<MinimalitySummary> {
    let p = prof.params;
    let hq = hedgehog_on_grid(g, prof)?;
    let (reference, ref_field) = minimize(&hq, &p, g, opts, &hq)?;
    let out: Vec<Result<MinimalityRun>> = (0..runs as u64)
        .into_par_iter()
        .map(|k| {
            let init = random_admissible(g, prof, amplitude, seed + k)?;
            let (res, q) = minimize(&init, &p, g, opts, &hq)?;
            Ok(MinimalityRun {
                seed: seed + k,
                gap_to_reference: res.final_energy - reference.final_energy,
                distance_to_reference: field_distance(&q, &ref_field, g)?,
                result: res,
            })
        })
        .collect();
    let runs = out.into_iter().collect::<Result<Vec<_>>>()?;
    let fold_min = |f: &dyn Fn(&MinimalityRun) -> f64| runs.iter().map(f).fold(f64::INFINITY, f64::min);
    let fold_max = |f: &dyn Fn(&MinimalityRun) -> f64| runs.iter().map(f).fold(0.0, f64::max);
    Ok(MinimalitySummary {
        r_outer: g.r_outer,
        t: p.t,
        shape: (g.nr, g.ntheta, g.nphi),
        amplitude,
        hedgehog_energy: reference.hedgehog_energy,
        hedgehog_norm: l2_dot(&hq, &hq, g)?.sqrt(),
        min_gap_to_reference: fold_min(&|r| r.gap_to_reference),
        max_distance_to_reference: fold_max(&|r| r.distance_to_reference),
        min_gap_to_hedgehog: fold_min(&|r| r.result.energy_gap),
        max_distance_to_hedgehog: fold_max(&|r| r.result.distance),
        all_converged: reference.converged && runs.iter().all(|r| r.result.converged),
        reference,
        runs,
        options: opts.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{solve_profile, RadialGrid};
    use crate::qtensor::{bulk_density, bulk_gradient, compose, radial_frame};
    use crate::shell::random_perturbation;
    use nalgebra::Vector3;

    fn prof(r: f64, t: f64) -> HedgehogProfile {
        let p = ScalingParams::new(t).unwrap();
        solve_profile(r, &p, &RadialGrid::uniform(r, 513).unwrap(), 1e-11).unwrap()
    }

    #[test]
    fn expansion_density_is_the_bulk_taylor_remainder() {
        let p = ScalingParams::new(7.0).unwrap();
        let x = Vector3::new(0.3, -0.8, 0.5);
        let fr = radial_frame(&x).unwrap();
        for (h, v) in [(0.9, [0.3, -0.2, 0.5, 0.1, -0.4]), (0.7, [-1.0, 0.4, 0.0, 0.7, 0.2])] {
            let hq = compose(&[SQRT_3_2 * h, 0.0, 0.0, 0.0, 0.0], &fr);
            let vq = compose(&v, &fr);
            let exact = bulk_density(&(hq + vq), &p) - bulk_density(&hq, &p) - bulk_gradient(&hq, &p).dot(&vq);
            let (a, b, c) = expansion_density(h, &v, &p);
            assert!((a + b + c - exact).abs() < 1e-12 * exact.abs().max(1.0), "{} vs {exact}", a + b + c);
        }
    }

    #[test]
    fn expansion_agrees_with_direct_difference() {
        let pr = prof(1.5, 5.0);
        let g = ShellGrid::new(1.5, 9, 8, 10).unwrap();
        let v = random_perturbation(&g, 3);
        let v = v.scaled(0.3 / v.max_norm());
        let e = energy_difference_expansion(&pr, &g, &v).unwrap();
        assert!(e.relative_error() < 1e-10, "{e:?}");
        let z = energy_difference_expansion(&pr, &g, &QField::zeros(&g)).unwrap();
        assert_eq!((z.expansion, z.direct), (0.0, 0.0));
    }

    #[test]
    fn descent_from_random_start() {
        let pr = prof(1.5, 5.0);
        let g = ShellGrid::new(1.5, 9, 6, 8).unwrap();
        let h = hedgehog_on_grid(&g, &pr).unwrap();
        let init = random_admissible(&g, &pr, 0.5, 1).unwrap();
        let opts = MinOptions { tol: 1e-9, ..Default::default() };
        let (r, q) = minimize(&init, &pr.params, &g, &opts, &h).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(r.final_energy < r.initial_energy);
        let (r2, q2) = minimize(&h, &pr.params, &g, &opts, &h).unwrap();
        assert!((r.final_energy - r2.final_energy).abs() < 1e-9 * r2.final_energy.abs());
        assert!(field_distance(&q, &q2, &g).unwrap() < 1e-5);
        for n in 0..g.slice_len() {
            assert_eq!(q.nodes[n], h.nodes[n]);
        }
        let flow = MinOptions { method: Method::GradientFlow, tol: 1e-5, max_iter: 20000, ..Default::default() };
        let (r3, _) = minimize(&init, &pr.params, &g, &flow, &h).unwrap();
        assert!(r3.converged && (r3.final_energy - r2.final_energy).abs() < 1e-6 * r2.final_energy.abs(), "{r3:?}");
    }

    #[test]
    fn lanczos_matches_dense_hessian() {
        let pr = prof(1.5, 1.0);
        let g = ShellGrid::new(1.5, 5, 4, 6).unwrap();
        let hq = hedgehog_on_grid(&g, &pr).unwrap();
        let sc = Scaling::new(&g);
        let n = sc.dim();
        let mut dense = nalgebra::DMatrix::zeros(n, n);
        for c in 0..n {
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            let mut v = QField::zeros(&g);
            sc.write(&e, &mut v);
            let hv = sc.to_flat(&hessian_apply(&hq, &v, &pr.params, &g).unwrap(), false);
            for r in 0..n {
                dense[(r, c)] = hv[r];
            }
        }
        assert!((&dense - dense.transpose()).amax() < 1e-10 * dense.amax());
        let exact = dense.symmetric_eigen().eigenvalues.min();
        let lr = full_dsq_min(&pr, &g, LanczosOptions::default()).unwrap();
        assert!((lr.ritz_min - exact).abs() < 1e-8 * exact.abs(), "{} vs {exact}", lr.ritz_min);
    }
}
