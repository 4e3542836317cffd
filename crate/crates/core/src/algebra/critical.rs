//! Critical points of the reduced φ in `(x, y, z) = (v₀, v₁, v₄)`, evaluated
//! exactly over `ℚ[√6]`.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::qsqrt6::{int, rat, QSqrt6};

/// `y²` on the `y ≠ 0` branch at `h = 1`, as (numerator, denominator).
pub const Y2_AT_ONE: (i64, i64) = (-441_133_354_650, 60_505_388_947_441);

#[derive(Debug, Clone, Serialize)]
pub struct BranchReport {
    pub name: &'static str,
    /// Exact value (rational part; the `√6` part is reported separately when nonzero).
    pub value: String,
    pub value_f64: f64,
    pub excluded: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalDiagnostics {
    pub h: String,
    pub h_f64: f64,
    pub x0: String,
    pub z0: String,
    /// The solved `(x₀, z₀)` agree with the closed forms exactly.
    pub closed_form_matches: bool,
    /// Both equations of the reduced system vanish exactly at `(x₀, z₀)`.
    pub residual_zero: bool,
    pub y_branch: BranchReport,
    pub z_branch: BranchReport,
    pub x_branch: BranchReport,
    pub all_excluded: bool,
    pub failing: Vec<&'static str>,
    #[serde(skip)]
    pub y2_exact: BigRational,
}

fn poly(h: &BigRational, coeffs: &[i64]) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, &c| acc * h + int(c))
}

fn q(a: BigRational) -> QSqrt6 {
    QSqrt6::rational(a)
}

fn denominator_d(h: &BigRational) -> BigRational {
    poly(h, &[978_121, 0, 3_560_400, 0, 3_240_000])
}

/// `x₀(h) = −(125√6/2)(473 − 604h − 7480h² + 7200h³)/D(h)`.
pub fn x0_closed_form(h: &BigRational) -> QSqrt6 {
    let b = -rat(125, 2) * poly(h, &[473, -604, -7480, 7200]) / denominator_d(h);
    QSqrt6::new(BigRational::zero(), b)
}

/// `z₀(h) = 75√6(43 + 50h + 100h²)(40h² − 32h − 11)/D(h)`.
pub fn z0_closed_form(h: &BigRational) -> QSqrt6 {
    let b = int(75) * poly(h, &[43, 50, 100]) * poly(h, &[-11, -32, 40]) / denominator_d(h);
    QSqrt6::new(BigRational::zero(), b)
}

fn linear_residuals(h: &BigRational, x: &QSqrt6, z: &QSqrt6) -> (QSqrt6, QSqrt6) {
    let r6 = QSqrt6::root();
    let r1 = &(&q(poly(h, &[516, 600, 1200])) * x) - &(&q(poly(h, &[430, -1800])) * z);
    let lin = &(&q(poly(h, &[-9, 240])) * x) + &(&q(int(145)) * z);
    let quad = &(&(&q(int(43)) * &(x * x)) + &(&q(int(258)) * &(x * z))) + &(&q(int(387)) * &(z * z));
    let r2 = &lin + &(&r6 * &quad);
    (r1, r2)
}

/// Solves the reduced system for its nonzero root, writing `x = a√6`, `z = b√6`.
fn solve_reduced(h: &BigRational) -> (QSqrt6, QSqrt6) {
    // first equation: a = k b; second: b(−9k + 240hk + 145) + 258 b²(k + 3)² = 0
    let k = poly(h, &[430, -1800]) / poly(h, &[516, 600, 1200]);
    let lin = poly(h, &[-9, 240]) * &k + int(145);
    let k3 = &k + int(3);
    let b = -lin / (int(258) * &k3 * &k3);
    let a = &k * &b;
    (QSqrt6::new(BigRational::zero(), a), QSqrt6::new(BigRational::zero(), b))
}

/// `y² = (27z + 9x − 129√6z² − 43√6x² − 240hx)/(129√6)`.
fn y_squared(h: &BigRational, x: &QSqrt6, z: &QSqrt6) -> QSqrt6 {
    let r6 = QSqrt6::root();
    let num = &(&(&q(int(27)) * z) + &(&q(int(9)) * x))
        - &(&(&r6 * &(&(&q(int(129)) * &(z * z)) + &(&q(int(43)) * &(x * x)))) + &(&q(int(240) * h) * x));
    &num / &(&q(int(129)) * &r6)
}

/// Discriminant of `−860√6x² − 4(1 − 600h + 300h²)x − 15√6 − 200√6h`.
fn z_branch_discriminant(h: &BigRational) -> QSqrt6 {
    let a2 = QSqrt6::new(BigRational::zero(), int(-860));
    let a1 = q(int(-4) * poly(h, &[1, -600, 300]));
    let a0 = QSqrt6::new(BigRational::zero(), poly(h, &[-15, -200]));
    &(&a1 * &a1) - &(&q(int(4)) * &(&a2 * &a0))
}

/// `−60570 − 108000h + 96000h²`.
fn x_branch_discriminant(h: &BigRational) -> BigRational {
    poly(h, &[-60_570, -108_000, 96_000])
}

fn report(name: &'static str, v: &QSqrt6) -> BranchReport {
    BranchReport {
        name,
        value: v.to_string(),
        value_f64: v.to_f64(),
        excluded: v.signum() == Ordering::Less,
    }
}

pub fn critical_system(h: &BigRational) -> CriticalDiagnostics {
    let (x, z) = solve_reduced(h);
    let closed_form_matches = x == x0_closed_form(h) && z == z0_closed_form(h);
    let (r1, r2) = linear_residuals(h, &x, &z);
    let y2 = y_squared(h, &x, &z);
    let y_branch = report("y != 0", &y2);
    let z_branch = report("y = 0, z != 0", &z_branch_discriminant(h));
    let x_branch = report("y = z = 0", &q(x_branch_discriminant(h)));
    let failing: Vec<&'static str> =
        [&y_branch, &z_branch, &x_branch].iter().filter(|b| !b.excluded).map(|b| b.name).collect();
    CriticalDiagnostics {
        h: h.to_string(),
        h_f64: h.to_f64().unwrap_or(f64::NAN),
        x0: x.to_string(),
        z0: z.to_string(),
        closed_form_matches,
        residual_zero: r1.is_zero() && r2.is_zero(),
        all_excluded: failing.is_empty(),
        failing,
        y_branch,
        z_branch,
        x_branch,
        y2_exact: if y2.is_rational() { y2.a } else { BigRational::zero() },
    }
}

/// [`critical_system`] at the exact binary value of `h`.
pub fn critical_system_f64(h: f64) -> Option<CriticalDiagnostics> {
    BigRational::from_float(h).map(|r| critical_system(&r))
}

#[derive(Debug, Clone, Serialize)]
pub struct HStarReport {
    /// Smallest `h` such that every scanned `h' ∈ [h, 1]` passes the exclusion test.
    pub h_star: f64,
    pub samples: usize,
    pub tol: f64,
    pub predicate_at_one: bool,
    pub failing_at_zero: Vec<&'static str>,
    pub last_failing_sample: Option<f64>,
}

fn predicate(h: &BigRational) -> bool {
    critical_system(h).all_excluded
}

pub fn h_star_estimate(samples: usize, tol: f64) -> HStarReport {
    let n = samples.max(1);
    let ok: Vec<bool> = (0..=n).into_par_iter().map(|k| predicate(&rat(k as i64, n as i64))).collect();
    let last_fail = ok.iter().rposition(|&p| !p);
    let h_star = match last_fail {
        None => 0.0,
        Some(k) if k == n => 1.0,
        Some(k) => {
            let (mut lo, mut hi) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
            while hi - lo > tol.max(1e-15) {
                let mid = 0.5 * (lo + hi);
                match critical_system_f64(mid) {
                    Some(d) if d.all_excluded => hi = mid,
                    _ => lo = mid,
                }
            }
            hi
        }
    };
    HStarReport {
        h_star,
        samples: n,
        tol,
        predicate_at_one: ok[n],
        failing_at_zero: critical_system(&int(0)).failing,
        last_failing_sample: last_fail.map(|k| k as f64 / n as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn exact_limit_at_one() {
        let d = critical_system(&int(1));
        let expected = BigRational::new(BigInt::from(Y2_AT_ONE.0), BigInt::from(Y2_AT_ONE.1));
        assert_eq!(d.y2_exact, expected);
        assert!(d.closed_form_matches);
        assert!(d.residual_zero);
        assert!(d.all_excluded);
        assert_eq!(d.x_branch.value, "-72570");
        assert_eq!(d.z_branch.value, "-3007184");
        // 60505388947441 = 2789⁴
        assert_eq!(BigInt::from(2789).pow(4u32), BigInt::from(Y2_AT_ONE.1));
    }

    #[test]
    fn rational_round_trip() {
        for (n, d) in [(0, 1), (1, 3), (7, 10), (99, 100), (2, 7)] {
            let h = rat(n, d);
            let (r1, r2) = linear_residuals(&h, &x0_closed_form(&h), &z0_closed_form(&h));
            assert!(r1.is_zero() && r2.is_zero(), "h = {h}");
        }
    }

    #[test]
    fn onset_scan() {
        let r = h_star_estimate(50, 1e-6);
        assert!(r.predicate_at_one);
        let r2 = h_star_estimate(200, 1e-6);
        assert_eq!(r.h_star, r2.h_star);
    }
}
