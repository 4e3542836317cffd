//! Seeded sampling suites for the pointwise inequalities.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::critical::{critical_system, h_star_estimate, HStarReport, Y2_AT_ONE};
use super::qsqrt6::{int, rat};
use super::*;

pub const G_GRID_POINTS: usize = 100_000;
const STRATA: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOptions {
    pub samples: usize,
    pub seed: u64,
    pub shards: usize,
    /// Sampling radius for ψ.
    pub radius: f64,
    /// Sampling radius for φ.
    pub varphi_radius: f64,
    pub varphi_h: f64,
    pub g_grid: usize,
    pub g_eps_max: f64,
    pub exact_h_points: usize,
    pub h_star_samples: usize,
    pub h_star_tol: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 42,
            shards: 64,
            radius: 5.0,
            varphi_radius: 3.0,
            varphi_h: 0.99,
            g_grid: G_GRID_POINTS,
            g_eps_max: 1e3,
            exact_h_points: 1000,
            h_star_samples: 1000,
            h_star_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaResult {
    pub name: String,
    pub passed: bool,
    /// Smallest value of the quantity that must be nonnegative (up to `tolerance`).
    pub worst_margin: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactChecks {
    pub y2_at_one: String,
    pub y2_expected: String,
    pub y2_matches: bool,
    pub closed_form_matches: bool,
    pub residual_zero: bool,
    pub x_branch_at_one: String,
    pub z_branch_at_one: String,
    pub x_branch_points: usize,
    pub x_branch_all_negative: bool,
    pub h_star: HStarReport,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub options: SuiteOptions,
    pub results: Vec<LemmaResult>,
    pub exact: ExactChecks,
    pub all_passed: bool,
}

/// Gaussian direction in `ℝ^dim` with radius drawn uniformly inside stratum
/// `stratum` of `[0, rmax]`.
pub fn sample_radial<R: Rng>(rng: &mut R, dim: usize, rmax: f64, stratum: usize, strata: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let u: f64 = rng.random();
    let r = rmax * (stratum as f64 + u) / strata as f64;
    v.iter_mut().for_each(|x| *x *= r / n);
    v
}

/// Minimum of `margin` over `n` samples split into deterministic shards.
fn sweep<F>(n: usize, opts: &SuiteOptions, stream: u64, margin: F) -> f64
where
    F: Fn(&mut ChaCha8Rng, usize) -> f64 + Sync,
{
    let shards = opts.shards.max(1);
    let per = n.div_ceil(shards);
    let mins: Vec<f64> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(stream * 1024 + s as u64);
            let lo = s * per;
            let hi = ((s + 1) * per).min(n);
            let mut m = f64::INFINITY;
            for i in lo..hi {
                let v = margin(&mut rng, i % STRATA);
                if !(v >= m) {
                    m = v;
                }
            }
            m
        })
        .collect();
    mins.into_iter().fold(f64::INFINITY, |a, b| if b.is_nan() || b < a { b } else { a })
}

fn result(name: &str, worst: f64, tol: f64, samples: usize, seed: u64) -> LemmaResult {
    LemmaResult { name: name.into(), passed: worst >= -tol, worst_margin: worst, tolerance: tol, samples, seed }
}

fn wvec(v: &[f64]) -> WVector {
    WVector::new(v[0], v[1], v[2], v[3], v[4])
}

fn sampled_suites(opts: &SuiteOptions) -> Vec<LemmaResult> {
    let n = opts.samples;
    let r = opts.radius;
    let mut out = Vec::new();

    let m = sweep(n, opts, 1, |rng, k| {
        let w = wvec(&sample_radial(rng, 5, r, k, STRATA));
        -(psi(&w) - psi_tensor(&w)).abs()
    });
    out.push(result("psi_two_path", m, 1e-11, n, opts.seed));

    let m = sweep(n, opts, 2, |rng, k| {
        let w = wvec(&sample_radial(rng, 5, r, k, STRATA));
        psi(&w) - psi(&psi_reduce(&w))
    });
    out.push(result("psi_reduction", m, 1e-12, n, opts.seed));

    let nw = (n / 100).max(1);
    let m = sweep(nw, opts, 3, |rng, k| {
        let v = sample_radial(rng, 3, r, k, STRATA);
        let phi1: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let w = equality_witness(v[0], v[1].abs(), v[2].abs(), phi1);
        -(psi(&w) - psi(&psi_reduce(&w))).abs()
    });
    out.push(result("psi_reduction_equality_witness", m, 1e-12, nw, opts.seed));

    let m = sweep(n, opts, 4, |rng, k| {
        let v = sample_radial(rng, 3, r, k, STRATA);
        let w = WVector::new(v[0], v[1], 0.0, 0.0, v[2]);
        let (x, e) = change_of_vars(&w).expect("w2 = w3 = 0");
        let (lo, hi) = x_range(e);
        (x - lo).min(hi - x).min(e + 1.0)
    });
    out.push(result("x_range", m, 1e-12, n, opts.seed));

    let m = sweep(n, opts, 5, |rng, k| {
        let v = sample_radial(rng, 3, r, k, STRATA);
        let w = WVector::new(v[0], v[1], 0.0, 0.0, v[2]);
        let (x, e) = change_of_vars(&w).expect("w2 = w3 = 0");
        let p = psi(&w);
        -(psi_cubic(x, e) - p).abs() / (1.0 + p.abs())
    });
    out.push(result("psi_cubic_substitution", m, 1e-12, n, opts.seed));

    let h = 2.0 / 3.0;
    let m = sweep(n, opts, 6, |rng, k| {
        let w = wvec(&sample_radial(rng, 5, r, k, STRATA));
        psi_positive_check(&w, h).expect("h >= 2/3")
    });
    out.push(result("psi_positive", m, 1e-12, n, opts.seed));

    let m = sweep(n, opts, 7, |rng, k| {
        let w = wvec(&sample_radial(rng, 5, r, k, STRATA));
        let val = psi_positive_check(&w, h).expect("h >= 2/3");
        val - g_unchecked(epsilon(&w))
    });
    out.push(result("psi_positive_chain", m, 1e-12, n, opts.seed));

    out.push(g_grid_result(opts));

    let hv = opts.varphi_h;
    out.push(varphi_result(opts, hv, 8));

    let nc = (n / 1000).max(1);
    let m = sweep(nc, opts, 9, |rng, _| {
        let v = sample_radial(rng, 3, 1.0, STRATA - 1, STRATA);
        let s = 1e3 / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (a, b, c) = (v[0] * s, v[1] * s, v[2] * s);
        let n2 = 2.0 / 3.0 * a * a + 2.0 * b * b + 2.0 * c * c;
        let quartic = (0.375 + 5.0) * n2 * n2;
        let val = varphi(a, b, c, hv);
        if val <= 0.0 {
            return -1.0;
        }
        1e-2 - (val / quartic - 1.0).abs()
    });
    out.push(result("varphi_coercive", m, 0.0, nc, opts.seed));

    out
}

fn g_grid_result(opts: &SuiteOptions) -> LemmaResult {
    let n = opts.g_grid.max(2);
    let top = (opts.g_eps_max + 1.0).log10();
    let bottom = -12.0;
    let worst = (0..n)
        .into_par_iter()
        .map(|i| {
            let eps = if i == 0 {
                -1.0
            } else {
                let u = bottom + (top - bottom) * (i - 1) as f64 / (n - 2).max(1) as f64;
                -1.0 + 10f64.powf(u)
            };
            G(eps).unwrap_or(f64::NEG_INFINITY)
        })
        .reduce(|| f64::INFINITY, f64::min);
    let exact_zeros = G(-1.0).ok() == Some(0.0) && G(0.0).ok() == Some(0.0);
    let mut r = result("G_nonnegative_grid", worst, 1e-12, n, opts.seed);
    r.passed &= exact_zeros;
    r
}

/// Exact rational checks of the critical-point analysis.
pub fn exact_checks(opts: &SuiteOptions) -> ExactChecks {
    let d1 = critical_system(&int(1));
    let expected = BigRational::new(BigInt::from(Y2_AT_ONE.0), BigInt::from(Y2_AT_ONE.1));
    let np = opts.exact_h_points.max(1);
    let negatives = (0..np)
        .into_par_iter()
        .filter(|&k| {
            let h = rat(k as i64, (np - 1).max(1) as i64);
            critical_system(&h).x_branch.excluded
        })
        .count();
    let h_star = h_star_estimate(opts.h_star_samples, opts.h_star_tol);
    let y2_matches = d1.y2_exact == expected;
    let passed = y2_matches && d1.closed_form_matches && d1.residual_zero && negatives == np && h_star.predicate_at_one;
    ExactChecks {
        y2_at_one: d1.y2_exact.to_string(),
        y2_expected: expected.to_string(),
        y2_matches,
        closed_form_matches: d1.closed_form_matches,
        residual_zero: d1.residual_zero,
        x_branch_at_one: d1.x_branch.value.clone(),
        z_branch_at_one: d1.z_branch.value.clone(),
        x_branch_points: np,
        x_branch_all_negative: negatives == np,
        h_star,
        passed,
    }
}

fn varphi_result(opts: &SuiteOptions, h: f64, stream: u64) -> LemmaResult {
    let rv = opts.varphi_radius;
    let m = sweep(opts.samples, opts, stream, |rng, k| {
        let v = sample_radial(rng, 3, rv, k, STRATA);
        varphi(v[0], v[1], v[2], h)
    });
    result(&format!("varphi_nonnegative_h{h}"), m, 1e-12, opts.samples, opts.seed)
}

pub fn run_all(opts: &SuiteOptions) -> LemmaReport {
    let mut results = sampled_suites(opts);
    let exact = exact_checks(opts);
    let h_onset = (exact.h_star.h_star + exact.h_star.tol).min(1.0);
    results.push(varphi_result(opts, h_onset, 10));
    let all_passed = exact.passed && results.iter().all(|r| r.passed);
    LemmaReport { options: opts.clone(), results, exact, all_passed }
}
