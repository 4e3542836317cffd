//! Second variation of the energy about the hedgehog, the radial mode
//! functionals `φ₀ᵢ`, and the Hardy / Wirtinger constants of the shell.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::linalg::{BlockTridiag, LanczosOptions};
use crate::profile::{f_of_h, solve_profile, HedgehogProfile, RadialGrid};
use crate::qtensor::{decompose, radial_frame, ScalingParams};
use crate::shell::{gradient_energy, profile_on_radii, QField, ShellGrid};

/// `(f₀, f₂, f₄)` evaluated at `h`.
pub fn coefficient_functions(h: f64, p: &ScalingParams) -> (f64, f64, f64) {
    let (t, hp) = (p.t, p.h_plus);
    let f0 = t / 2.0 * (3.0 * h * h - 1.0) + 1.5 * hp * (3.0 * h * h - 2.0 * h);
    let f2 = f_of_h(h, p);
    let f4 = t / 2.0 * (h * h - 1.0) + 1.5 * hp * (h * h + 2.0 * h);
    (f0, f2, f4)
}

/// Residuals of `f₀ = f + th² + (3h₊/2)(2h² − h)` and `f₄ = f + (9h₊/2)h`.
pub fn coefficient_identity_residuals(h: f64, p: &ScalingParams) -> (f64, f64) {
    let (f0, f2, f4) = coefficient_functions(h, p);
    let r0 = f0 - (f2 + p.t * h * h + 1.5 * p.h_plus * (2.0 * h * h - h));
    let r4 = f4 - (f2 + 4.5 * p.h_plus * h);
    (r0, r4)
}

/// `λ₀ᵢ = i(i+1)`.
pub fn lambda0(i: usize) -> f64 {
    (i * (i + 1)) as f64
}

/// Radial mode functions on a grid, vanishing at both ends.
#[derive(Debug, Clone)]
pub struct ModeFunctions {
    pub grid: RadialGrid,
    pub v0: Vec<f64>,
    pub v2: Vec<f64>,
    pub v4: Vec<f64>,
}

impl ModeFunctions {
    pub fn new(grid: RadialGrid, v0: Vec<f64>, v2: Vec<f64>, v4: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        for v in [&v0, &v2, &v4] {
            if v.len() != n {
                return domain("mode function length does not match the grid");
            }
            if v[0] != 0.0 || v[n - 1] != 0.0 {
                return domain("mode functions must vanish at r = 1 and r = R");
            }
        }
        Ok(Self { grid, v0, v2, v4 })
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        let n = grid.len();
        Self { grid, v0: vec![0.0; n], v2: vec![0.0; n], v4: vec![0.0; n] }
    }
}

/// Gradient and potential coefficients of `φ₀ᵢ` (per unit `r² dr`, the potential
/// matrix already multiplied by `r²`). Unknown order `(v₀, v₂, v₄)`, truncated to
/// the active block.
fn mode_block(i: usize) -> usize {
    match i {
        0 => 1,
        1 => 2,
        _ => 3,
    }
}

fn mode_coefficients(i: usize, r: f64, h: f64, p: &ScalingParams) -> (Vec<f64>, Vec<Vec<f64>>) {
    let (f0, f2, f4) = coefficient_functions(h, p);
    let r2 = r * r;
    if i == 0 {
        return (vec![2.0 / 3.0], vec![vec![2.0 / 3.0 * (6.0 + r2 * f0)]]);
    }
    let l = lambda0(i);
    let grad = vec![l / 3.0, 1.0, l - 2.0];
    let pot = vec![
        vec![l * (l + 6.0) / 3.0 + l / 3.0 * r2 * f0, -2.0 * l, 0.0],
        vec![-2.0 * l, l + 4.0 + r2 * f2, 2.0 * (l - 2.0)],
        vec![0.0, 2.0 * (l - 2.0), (l - 2.0) * (l - 2.0) + (l - 2.0) * r2 * f4],
    ];
    let b = mode_block(i);
    (grad[..b].to_vec(), pot[..b].iter().map(|row| row[..b].to_vec()).collect())
}

/// `φ₀ᵢ[v₀, v₂, v₄]` by quadrature: gradient terms on cell midpoints, the rest by the trapezoid rule.
pub fn phi_mode(i: usize, prof: &HedgehogProfile, mf: &ModeFunctions) -> Result<f64> {
    let h = resample(prof, &mf.grid);
    let r = mf.grid.nodes();
    let dr = mf.grid.dr();
    let w = mf.grid.trapezoid_weights();
    let vs = [&mf.v0, &mf.v2, &mf.v4];
    let b = mode_block(i);
    let mut total = 0.0;
    for k in 0..r.len() - 1 {
        let rm = 0.5 * (r[k] + r[k + 1]);
        let (grad, _) = mode_coefficients(i, rm, 1.0, &prof.params);
        for c in 0..b {
            let d = (vs[c][k + 1] - vs[c][k]) / dr;
            total += grad[c] * d * d * rm * rm * dr;
        }
    }
    for k in 0..r.len() {
        let (_, pot) = mode_coefficients(i, r[k], h[k], &prof.params);
        let mut acc = 0.0;
        for a in 0..b {
            for c in 0..b {
                acc += pot[a][c] * vs[a][k] * vs[c][k];
            }
        }
        total += w[k] * acc;
    }
    Ok(total)
}

fn resample(prof: &HedgehogProfile, grid: &RadialGrid) -> Vec<f64> {
    if grid == &prof.grid {
        return prof.h.clone();
    }
    let mut h: Vec<f64> = grid.nodes().iter().map(|&r| prof.eval(r.min(prof.r_outer)).0).collect();
    let n = h.len();
    h[0] = 1.0;
    h[n - 1] = 1.0;
    h
}

/// Form matrix of `φ₀ᵢ` on the interior nodes with the `L²(r² dr)` mass.
pub fn phi_mode_pencil(i: usize, prof: &HedgehogProfile, grid: &RadialGrid) -> BlockTridiag {
    let h = resample(prof, grid);
    let r = grid.nodes();
    let dr = grid.dr();
    let w = grid.trapezoid_weights();
    let b = mode_block(i);
    let m = r.len() - 2;
    let mut a = BlockTridiag::new(b, m);
    for k in 0..m {
        let node = k + 1;
        let (_, pot) = mode_coefficients(i, r[node], h[node], &prof.params);
        for x in 0..b {
            for y in 0..b {
                a.diag[k][(x, y)] += w[node] * pot[x][y];
            }
            a.mass[k * b + x] = w[node] * r[node] * r[node];
        }
    }
    for cell in 0..r.len() - 1 {
        let rm = 0.5 * (r[cell] + r[cell + 1]);
        let (grad, _) = mode_coefficients(i, rm, 1.0, &prof.params);
        for c in 0..b {
            let s = grad[c] * rm * rm / dr;
            // cell couples nodes `cell` and `cell + 1`; interior index is node − 1
            if cell >= 1 {
                a.diag[cell - 1][(c, c)] += s;
            }
            if cell + 1 <= m {
                a.diag[cell][(c, c)] += s;
            }
            if cell >= 1 && cell + 1 <= m {
                a.off[cell - 1][(c, c)] -= s;
            }
        }
    }
    a
}

/// Smallest eigenvalue of the `φ₀ᵢ` pencil on an `n`-node grid; positive certifies discrete positivity.
pub fn phi_mode_min_eig(i: usize, prof: &HedgehogProfile, n: usize) -> Result<f64> {
    let grid = if n == prof.grid.len() { prof.grid.clone() } else { RadialGrid::uniform(prof.r_outer, n)? };
    phi_mode_pencil(i, prof, &grid).kth_eigenvalue(1, 1e-12)
}

fn hardy_pencil(r_outer: f64, n: usize) -> Result<BlockTridiag> {
    let grid = RadialGrid::uniform(r_outer, n)?;
    let r = grid.nodes();
    let dr = grid.dr();
    let m = n - 2;
    let stiff: Vec<f64> = (0..n - 1).map(|c| (0.5 * (r[c] + r[c + 1])).powi(2) / dr).collect();
    let mut a = BlockTridiag::new(1, m);
    for k in 0..m {
        a.diag[k][(0, 0)] = stiff[k] + stiff[k + 1];
        a.mass[k] = dr;
        if k + 1 < m {
            a.off[k][(0, 0)] = -stiff[k + 1];
        }
    }
    Ok(a)
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// `k`-th eigenvalue of `−(r²v')' = λv`, `v(1) = v(R) = 0`, from an `N`-node
/// discretization and its refinement combined by Richardson extrapolation.
pub fn hardy_eigen(r_outer: f64, k: usize, n: usize) -> Result<f64> {
    if !(r_outer > 1.0) {
        return domain(format!("outer radius must be > 1, got {r_outer}"));
    }
    if k == 0 {
        return domain("eigenvalue index starts at 1");
    }
    if n < k + 2 {
        return domain(format!("grid of {n} nodes too small for eigenvalue {k}"));
    }
    let coarse = hardy_pencil(r_outer, n)?.kth_eigenvalue(k, 1e-14)?;
    let fine = hardy_pencil(r_outer, 2 * n - 1)?.kth_eigenvalue(k, 1e-14)?;
    Ok(richardson(coarse, fine))
}

/// `k²π²/(ln R)² + 1/4`, from `v = r^{-1/2} sin(√(λ−1/4) ln r)`.
pub fn hardy_closed_form(r_outer: f64, k: usize) -> f64 {
    let l = r_outer.ln();
    (k * k) as f64 * PI * PI / (l * l) + 0.25
}

/// The alternative closed form `k²π²/ln R + 1/4`.
pub fn hardy_printed_form(r_outer: f64, k: usize) -> f64 {
    (k * k) as f64 * PI * PI / r_outer.ln() + 0.25
}

#[derive(Debug, Clone, Serialize)]
pub struct HardyReport {
    pub r_outer: f64,
    pub k: usize,
    pub numeric: f64,
    /// `k²π²/(ln R)² + 1/4`.
    pub log_squared_form: f64,
    /// `k²π²/ln R + 1/4`.
    pub log_form: f64,
    pub rel_err_log_squared: f64,
    pub rel_err_log: f64,
    /// Which closed form the numerics reproduce: `"log_squared"`, `"log"`, `"both"` or `"neither"`.
    pub matches: String,
}

pub fn hardy_report(r_outer: f64, k: usize, n: usize, rel_tol: f64) -> Result<HardyReport> {
    let numeric = hardy_eigen(r_outer, k, n)?;
    let a = hardy_closed_form(r_outer, k);
    let b = hardy_printed_form(r_outer, k);
    let ea = ((numeric - a) / a).abs();
    let eb = ((numeric - b) / b).abs();
    let matches = match (ea <= rel_tol, eb <= rel_tol) {
        (true, true) => "both",
        (true, false) => "log_squared",
        (false, true) => "log",
        (false, false) => "neither",
    };
    Ok(HardyReport {
        r_outer,
        k,
        numeric,
        log_squared_form: a,
        log_form: b,
        rel_err_log_squared: ea,
        rel_err_log: eb,
        matches: matches.into(),
    })
}

/// Largest `R` with `½λ₁(R) − 3 > 0` under each closed form:
/// `exp(4π²/23)` for `π²/ln R + 1/4`, `exp(2π/√23)` for `π²/(ln R)² + 1/4`.
pub fn hardy_radius_thresholds() -> (f64, f64) {
    ((4.0 * PI * PI / 23.0).exp(), (2.0 * PI / 23f64.sqrt()).exp())
}

/// `π²/(R−1)²`.
pub fn wirtinger_const(r_outer: f64) -> Result<f64> {
    if !(r_outer > 1.0) {
        return domain(format!("outer radius must be > 1, got {r_outer}"));
    }
    Ok(PI * PI / ((r_outer - 1.0) * (r_outer - 1.0)))
}

/// Smallest Dirichlet eigenvalue of `−v''` on `[1, R]` (Richardson over `N` and `2N − 1` nodes).
pub fn wirtinger_numeric(r_outer: f64, n: usize) -> Result<f64> {
    let eig = |n: usize| -> Result<f64> {
        let grid = RadialGrid::uniform(r_outer, n)?;
        let dr = grid.dr();
        let m = n - 2;
        let mut a = BlockTridiag::new(1, m);
        for k in 0..m {
            a.diag[k][(0, 0)] = 2.0 / dr;
            a.mass[k] = dr;
            if k + 1 < m {
                a.off[k][(0, 0)] = -1.0 / dr;
            }
        }
        a.kth_eigenvalue(1, 1e-14)
    };
    Ok(richardson(eig(n)?, eig(2 * n - 1)?))
}

/// Both sides of `∫[αv'² + (β/r²)v² + α(f(h)+γ)v²]r² = ∫[α((v/h)')²h² + ((β−6α)/r²)v² + αγv²]r²`.
pub fn hardy_transform_check(alpha: f64, beta: f64, gamma: f64, v: &[f64], prof: &HedgehogProfile) -> Result<(f64, f64)> {
    let grid = &prof.grid;
    let n = grid.len();
    if v.len() != n {
        return domain("test function length does not match the profile grid");
    }
    if v[0] != 0.0 || v[n - 1] != 0.0 {
        return domain("test function must vanish at r = 1 and r = R");
    }
    let r = grid.nodes();
    let dr = grid.dr();
    let wt = grid.trapezoid_weights();
    let h = &prof.h;
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for c in 0..n - 1 {
        let rm = 0.5 * (r[c] + r[c + 1]);
        let dv = (v[c + 1] - v[c]) / dr;
        let dw = (v[c + 1] / h[c + 1] - v[c] / h[c]) / dr;
        lhs += alpha * dv * dv * rm * rm * dr;
        rhs += alpha * dw * dw * h[c] * h[c + 1] * rm * rm * dr;
    }
    for k in 0..n {
        let r2 = r[k] * r[k];
        let v2 = v[k] * v[k];
        lhs += wt[k] * (beta + alpha * (f_of_h(h[k], &prof.params) + gamma) * r2) * v2;
        rhs += wt[k] * ((beta - 6.0 * alpha) + alpha * gamma * r2) * v2;
    }
    Ok((lhs, rhs))
}

fn check_dirichlet(g: &ShellGrid, v: &QField) -> Result<()> {
    if v.len() != g.len() {
        return domain("perturbation does not match the grid");
    }
    let sl = g.slice_len();
    let boundary = v.nodes[..sl].iter().chain(&v.nodes[(g.nr - 1) * sl..]);
    if boundary.into_iter().any(|q| q.c.iter().any(|&c| c != 0.0)) {
        return domain("perturbation must vanish on r = 1 and r = R");
    }
    Ok(())
}

/// Mode-basis components of every node of `v`.
pub fn frame_components(g: &ShellGrid, v: &QField) -> Result<Vec<[f64; 5]>> {
    (0..g.len())
        .map(|n| Ok(decompose(&v.nodes[n], &radial_frame(&g.position(n))?)))
        .collect()
}

/// Bulk integrand of `δ²I` at profile value `h` for frame components `c`.
fn dsq_bulk(h: f64, c: &[f64; 5], p: &ScalingParams) -> f64 {
    let (t, hp) = (p.t, p.h_plus);
    let v2 = 2.0 / 3.0 * c[0] * c[0] + 2.0 * (c[1] * c[1] + c[2] * c[2] + c[3] * c[3] + c[4] * c[4]);
    t / 2.0 * v2 * (h * h - 1.0)
        + 2.0 * t / 3.0 * h * h * c[0] * c[0]
        + hp * c[0] * c[0] * (3.0 * h * h - 2.0 * h)
        + 3.0 * hp * (h * h + 2.0 * h) * (c[3] * c[3] + c[4] * c[4])
        + 3.0 * hp * (h * h - h) * (c[1] * c[1] + c[2] * c[2])
}

/// `δ²I[V] = ∫|∇V|² + (t/2)|V|²(h²−1) + (2t/3)h²v₀² + h₊v₀²(3h²−2h) + 3h₊(h²+2h)(v₃²+v₄²) + 3h₊(h²−h)(v₁²+v₂²)`
/// on the shell grid, with the same elastic discretization as the discrete energy.
pub fn second_variation(prof: &HedgehogProfile, g: &ShellGrid, v: &QField) -> Result<f64> {
    check_dirichlet(g, v)?;
    let h = profile_on_radii(g, prof)?;
    let comps = frame_components(g, v)?;
    let bulk: f64 = (0..g.len())
        .map(|n| {
            let i = n / g.slice_len();
            g.node_volume(n) * dsq_bulk(h[i], &comps[n], &prof.params)
        })
        .sum();
    Ok(2.0 * gradient_energy(v, g)? + bulk)
}

/// `𝓕[V] = ½δ²I[V] − ∫[(t/3)h²v₀² + αh₊v₀² + βh₊(v₃² + v₄²)]`.
pub fn improved_bound_gap(prof: &HedgehogProfile, g: &ShellGrid, v: &QField, alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return domain(format!("alpha must lie in (0, 1/2), got {alpha}"));
    }
    if !(beta > 0.0 && beta < 4.5) {
        return domain(format!("beta must lie in (0, 9/2), got {beta}"));
    }
    let half = 0.5 * second_variation(prof, g, v)?;
    let h = profile_on_radii(g, prof)?;
    let comps = frame_components(g, v)?;
    let (t, hp) = (prof.params.t, prof.params.h_plus);
    let sub: f64 = (0..g.len())
        .map(|n| {
            let hi = h[n / g.slice_len()];
            let c = &comps[n];
            g.node_volume(n) * (t / 3.0 * hi * hi * c[0] * c[0] + alpha * hp * c[0] * c[0] + beta * hp * (c[3] * c[3] + c[4] * c[4]))
        })
        .sum();
    Ok(half - sub)
}

/// Residuals of `f₀ − th² − 3αh₊ = f + (3h₊/2)(2h² − h − 2α)` and `f₄ − βh₊ = f + h₊(9h/2 − β)`.
pub fn improved_identity_residuals(h: f64, p: &ScalingParams, alpha: f64, beta: f64) -> (f64, f64) {
    let (f0, f, f4) = coefficient_functions(h, p);
    let hp = p.h_plus;
    (
        (f0 - p.t * h * h - 3.0 * alpha * hp) - (f + 1.5 * hp * (2.0 * h * h - h - 2.0 * alpha)),
        (f4 - beta * hp) - (f + hp * (4.5 * h - beta)),
    )
}

/// Options shared by the stability report and the threshold search.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityOptions {
    /// Radial nodes for the profile and mode pencils.
    pub n: usize,
    pub i_max: usize,
    /// Shell grid `(nr, nθ, nφ)` for the full second variation; `None` skips it.
    pub full_grid: Option<(usize, usize, usize)>,
    /// Eigenvalues must exceed this to count as positive.
    pub tol: f64,
    pub profile_tol: f64,
    #[serde(skip)]
    pub lanczos: LanczosOptions,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self { n: 1025, i_max: 4, full_grid: None, tol: 1e-9, profile_tol: 1e-10, lanczos: LanczosOptions::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub r_outer: f64,
    pub t: f64,
    pub h_plus: f64,
    /// Smallest pencil eigenvalue of `φ₀ᵢ` for `i = 0..=i_max`.
    pub lambda_min: Vec<f64>,
    pub hardy: HardyReport,
    pub wirtinger_const: f64,
    pub full_dsq_min: Option<f64>,
    /// Residual of the Lanczos Ritz pair behind `full_dsq_min`.
    pub full_dsq_residual: Option<f64>,
    pub min_h: f64,
    pub profile_residual: f64,
    /// Smallest of the reported eigenvalue lower estimates.
    pub margin: f64,
    pub verdict: String,
    pub options: StabilityOptions,
}

pub fn stability_report_for(prof: &HedgehogProfile, opts: &StabilityOptions) -> Result<StabilityReport> {
    let lambda_min = (0..=opts.i_max)
        .map(|i| phi_mode_min_eig(i, prof, opts.n))
        .collect::<Result<Vec<_>>>()?;
    let hardy = hardy_report(prof.r_outer, 1, opts.n.max(257), 1e-6)?;
    let (full, resid) = match opts.full_grid {
        Some((a, b, c)) => {
            let g = ShellGrid::new(prof.r_outer, a, b, c)?;
            let lr = crate::minimizer::full_dsq_min(prof, &g, opts.lanczos)?;
            (Some(lr.ritz_min), Some(lr.residual))
        }
        None => (None, None),
    };
    let mut margin = lambda_min.iter().copied().fold(f64::INFINITY, f64::min);
    if let (Some(f), Some(r)) = (full, resid) {
        margin = margin.min(f - r);
    }
    let verdict = if margin > opts.tol { "stable" } else { "unstable" };
    Ok(StabilityReport {
        r_outer: prof.r_outer,
        t: prof.params.t,
        h_plus: prof.params.h_plus,
        lambda_min,
        hardy,
        wirtinger_const: wirtinger_const(prof.r_outer)?,
        full_dsq_min: full,
        full_dsq_residual: resid,
        min_h: prof.min_h(),
        profile_residual: prof.residual_norm,
        margin,
        verdict: verdict.into(),
        options: opts.clone(),
    })
}

pub fn stability_report(r_outer: f64, t: f64, opts: &StabilityOptions) -> Result<StabilityReport> {
    let p = ScalingParams::new(t)?;
    let grid = RadialGrid::uniform(r_outer, opts.n)?;
    let prof = solve_profile(r_outer, &p, &grid, opts.profile_tol)?;
    stability_report_for(&prof, opts)
}

/// Bisection in `t` for the onset of discrete stability at fixed `R`; 0 if stable at `t = 0`.
pub fn t_star_estimate(r_outer: f64, opts: &StabilityOptions, t_tol: f64) -> Result<f64> {
    let stable = |t: f64| -> Result<bool> { Ok(stability_report(r_outer, t, opts)?.verdict == "stable") };
    if stable(0.0)? {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while !stable(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e7 {
            return Err(crate::error::HedgehogError::Internal(format!("no stable temperature found up to t = {lo} at R = {r_outer}")));
        }
    }
    while hi - lo > t_tol {
        let mid = 0.5 * (lo + hi);
        if stable(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub const STABILITY_CSV_HEADER: &str = "R,t,lambda_min_i0,lambda_min_i1,lambda_min_i2,hardy_lambda1,full_dsq_min,verdict";

/// One CSV row matching [`STABILITY_CSV_HEADER`]; a skipped full check is written as `nan`.
pub fn stability_csv_row(rep: &StabilityReport) -> String {
    let lam = |i: usize| rep.lambda_min.get(i).map_or("nan".to_string(), |v| format!("{v}"));
    let full = rep.full_dsq_min.map_or("nan".to_string(), |v| format!("{v}"));
    format!("{},{},{},{},{},{},{},{}", rep.r_outer, rep.t, lam(0), lam(1), lam(2), rep.hardy.numeric, full, rep.verdict)
}

pub fn write_stability_csv<W: Write>(reports: &[StabilityReport], mut w: W) -> Result<()> {
    writeln!(w, "{STABILITY_CSV_HEADER}")?;
    for r in reports {
        writeln!(w, "{}", stability_csv_row(r))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coefficient_examples() {
        for t in [0.0, 3.0, 100.0] {
            let p = ScalingParams::new(t).unwrap();
            let (f0, f2, f4) = coefficient_functions(1.0, &p);
            assert_eq!(f2, 0.0);
            assert_relative_eq!(f4, 4.5 * p.h_plus, max_relative = 1e-15);
            assert_relative_eq!(f0, t + 1.5 * p.h_plus, max_relative = 1e-15);
            let (a, b, c) = coefficient_functions(0.0, &p);
            assert_eq!((a, b, c), (-t / 2.0, -t / 2.0, -t / 2.0));
        }
    }

    #[test]
    fn mode_one_drops_v4() {
        let (g, pot) = mode_coefficients(1, 1.3, 0.9, &ScalingParams::new(1.0).unwrap());
        assert_eq!(g.len(), 2);
        assert_eq!(pot[0][1], -4.0);
        let (g2, pot2) = mode_coefficients(2, 1.3, 0.9, &ScalingParams::new(1.0).unwrap());
        assert_eq!(g2, vec![2.0, 1.0, 4.0]);
        assert_eq!((2.0 * pot2[0][1], 2.0 * pot2[1][2]), (-24.0, 16.0));
        assert_eq!(pot2[1][1] - 1.3 * 1.3 * f_of_h(0.9, &ScalingParams::new(1.0).unwrap()), 10.0);
    }

    #[test]
    fn wirtinger_examples() {
        assert_relative_eq!(wirtinger_const(2.0).unwrap(), PI * PI, max_relative = 1e-15);
        for r in [1.5, 2.0, 3.5] {
            assert_relative_eq!(wirtinger_numeric(r, 1025).unwrap(), wirtinger_const(r).unwrap(), max_relative = 1e-8);
        }
        assert!(wirtinger_const(1.0).is_err());
    }

    #[test]
    fn hardy_examples() {
        let e = std::f64::consts::E;
        assert_relative_eq!(hardy_eigen(e, 1, 1025).unwrap(), PI * PI + 0.25, max_relative = 1e-6);
        let mut prev = 0.0;
        for k in 1..=5 {
            let l = hardy_eigen(3.0, k, 1025).unwrap();
            assert!(l > prev);
            prev = l;
        }
        for r in [1.1, 2.0, 10.0] {
            assert!(hardy_eigen(r, 1, 513).unwrap() > 0.25);
        }
    }

    #[test]
    fn pencil_agrees_with_quadrature() {
        let p = ScalingParams::new(10.0).unwrap();
        let grid = RadialGrid::uniform(1.5, 65).unwrap();
        let prof = solve_profile(1.5, &p, &grid, 1e-11).unwrap();
        let n = grid.len();
        let mk = |s: f64| -> Vec<f64> {
            let mut v: Vec<f64> = grid.nodes().iter().map(|&r| ((r - 1.0) * s).sin() * (r - 1.0) * (1.5 - r)).collect();
            v[0] = 0.0;
            v[n - 1] = 0.0;
            v
        };
        let mf = ModeFunctions::new(grid.clone(), mk(3.0), mk(7.0), mk(11.0)).unwrap();
        for i in 0..4 {
            let b = mode_block(i);
            let mut x = Vec::new();
            for k in 1..n - 1 {
                let all = [mf.v0[k], mf.v2[k], mf.v4[k]];
                x.extend_from_slice(&all[..b]);
            }
            let a = phi_mode_pencil(i, &prof, &grid);
            assert_relative_eq!(a.quadratic_form(&x), phi_mode(i, &prof, &mf).unwrap(), max_relative = 1e-12);
        }
        assert_eq!(phi_mode(0, &prof, &ModeFunctions::zeros(grid.clone())).unwrap(), 0.0);
        assert!(ModeFunctions::new(grid.clone(), vec![1.0; n], vec![0.0; n], vec![0.0; n]).is_err());
    }
}
