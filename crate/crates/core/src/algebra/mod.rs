//! Pointwise algebraic inequalities behind the global-minimality arguments:
//! the cubic form ψ, its reduction, the `(X, ε)` substitution, `G(ε)`, the
//! quartic φ and the exact critical-point analysis of φ.

mod critical;
mod qsqrt6;
mod suite;

pub use critical::{
    critical_system, critical_system_f64, h_star_estimate, x0_closed_form, z0_closed_form, BranchReport,
    CriticalDiagnostics, HStarReport, Y2_AT_ONE,
};
pub use qsqrt6::{int, rat, QSqrt6};
pub use suite::{
    exact_checks, run_all, sample_radial, ExactChecks, LemmaReport, LemmaResult, SuiteOptions, G_GRID_POINTS,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::qtensor::{compose, OrthFrame, SQRT6};

/// Components of `W` in the local basis `(E₀, …, E₄)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WVector {
    pub w0: f64,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
}

impl WVector {
    pub const ZERO: WVector = WVector { w0: 0.0, w1: 0.0, w2: 0.0, w3: 0.0, w4: 0.0 };

    pub fn new(w0: f64, w1: f64, w2: f64, w3: f64, w4: f64) -> Self {
        Self { w0, w1, w2, w3, w4 }
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.w0, self.w1, self.w2, self.w3, self.w4]
    }

    /// `|W|² = (2/3)w₀² + 2(w₁² + w₂² + w₃² + w₄²)`.
    pub fn norm2(&self) -> f64 {
        2.0 / 3.0 * self.w0 * self.w0
            + 2.0 * (self.w1 * self.w1 + self.w2 * self.w2 + self.w3 * self.w3 + self.w4 * self.w4)
    }

    /// Coordinate norm `√(Σ wᵢ²)`.
    pub fn euclid(&self) -> f64 {
        self.as_array().iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn reference_frame() -> OrthFrame {
    OrthFrame::from_angles(0.0, 0.0)
}

/// ψ in expanded form.
pub fn psi(w: &WVector) -> f64 {
    let WVector { w0, w1, w2, w3, w4 } = *w;
    let s34 = w3 * w3 + w4 * w4;
    -0.5 * w0 * w0 + 4.5 * s34 + SQRT6 * w0 * s34 + 1.5 * SQRT6 * w4 * (w2 * w2 - w1 * w1)
        - 3.0 * SQRT6 * w1 * w2 * w3
        - 0.5 * SQRT6 * w0 * (w1 * w1 + w2 * w2)
        - SQRT6 / 9.0 * w0 * w0 * w0
}

/// ψ through `−(√6/2) tr W³` of the composed tensor plus the quadratic terms.
pub fn psi_tensor(w: &WVector) -> f64 {
    let q = compose(&w.as_array(), &reference_frame());
    -0.5 * SQRT6 * q.tr_cube() - 0.5 * w.w0 * w.w0 + 4.5 * (w.w3 * w.w3 + w.w4 * w.w4)
}

pub fn psi_reduce(w: &WVector) -> WVector {
    WVector::new(w.w0, w.w1.hypot(w.w2), 0.0, 0.0, w.w3.hypot(w.w4))
}

/// Two sides of the pairing inequality that drives the reduction; the first
/// minus the second is nonnegative.
pub fn reduction_sides(w: &WVector) -> (f64, f64) {
    let WVector { w1, w2, w3, w4, .. } = *w;
    let lhs = 1.5 * SQRT6 * w4 * (w2 * w2 - w1 * w1) - 3.0 * SQRT6 * w1 * w2 * w3;
    let rhs = -1.5 * SQRT6 * w3.hypot(w4) * (w1 * w1 + w2 * w2);
    (lhs, rhs)
}

/// A vector with prescribed `w₀`, `ρ₁ = |(w₁, w₂)|`, `ρ₂ = |(w₃, w₄)|` on which the
/// reduction is an equality: `w₁ + iw₂ = ρ₁e^{iφ₁}`, `w₃ + iw₄ = ρ₂e^{iφ₂}` with
/// `2φ₁ + φ₂ = π/2`.
pub fn equality_witness(w0: f64, rho1: f64, rho2: f64, phi1: f64) -> WVector {
    let phi2 = std::f64::consts::FRAC_PI_2 - 2.0 * phi1;
    WVector::new(w0, rho1 * phi1.cos(), rho1 * phi1.sin(), rho2 * phi2.cos(), rho2 * phi2.sin())
}

/// `(X, ε)` for `w` with `w₂ = w₃ = 0`.
pub fn change_of_vars(w: &WVector) -> Result<(f64, f64)> {
    if w.w2 != 0.0 || w.w3 != 0.0 {
        return domain(format!("change_of_vars needs w2 = w3 = 0, got w2 = {}, w3 = {}", w.w2, w.w3));
    }
    Ok((x_of(w), epsilon(w)))
}

fn x_of(w: &WVector) -> f64 {
    (2.0f64 / 3.0).sqrt() * (w.w0 + 3.0 * w.w4)
}

/// `ε = 2√(2/3) w₀ + |W|²`, i.e. `|Q/h|² − 1` for `Q = h(H/h + W)`.
pub fn epsilon(w: &WVector) -> f64 {
    2.0 * (2.0f64 / 3.0).sqrt() * w.w0 + w.norm2()
}

/// The cubic `¼(X³ + 3X² − 3εX)`.
pub fn psi_cubic(x: f64, eps: f64) -> f64 {
    0.25 * (x * x * x + 3.0 * x * x - 3.0 * eps * x)
}

/// `[−1 − 2√(ε+1), −1 + 2√(ε+1)]`.
pub fn x_range(eps: f64) -> (f64, f64) {
    let s = (eps + 1.0).max(0.0).sqrt();
    (-1.0 - 2.0 * s, -1.0 + 2.0 * s)
}

/// Minimum of [`psi_cubic`] over the admissible `X` range.
pub fn psi_cubic_min(eps: f64) -> f64 {
    0.75 * eps + 0.5 - 0.5 * (eps + 1.0).max(0.0).powf(1.5)
}

/// `G(ε) = ¼ε² + ¾ε + ½ − ½(ε+1)^{3/2}`.
#[allow(non_snake_case)]
pub fn G(eps: f64) -> Result<f64> {
    if !(eps >= -1.0) {
        return domain(format!("G is defined for eps >= -1, got {eps}"));
    }
    Ok(g_unchecked(eps))
}

/// `G` without the domain check; `NaN` below `−1`.
pub fn g_unchecked(eps: f64) -> f64 {
    0.25 * eps * eps + 0.75 * eps + 0.5 - 0.5 * (eps + 1.0).powf(1.5)
}

/// `G'(ε) = ½ε + ¾ − ¾√(ε+1)`.
pub fn g_prime(eps: f64) -> Result<f64> {
    if !(eps >= -1.0) {
        return domain(format!("G' is defined for eps >= -1, got {eps}"));
    }
    Ok(0.5 * eps + 0.75 - 0.75 * (eps + 1.0).sqrt())
}

/// `G` as `¼(ε+1)(√(ε+1) − 1)²`.
pub fn g_factored(eps: f64) -> Result<f64> {
    if !(eps >= -1.0) {
        return domain(format!("G is defined for eps >= -1, got {eps}"));
    }
    let s = (eps + 1.0).sqrt();
    Ok(0.25 * (eps + 1.0) * (s - 1.0) * (s - 1.0))
}

/// `G(ε)` exactly, for rational `ε` with `ε + 1` a rational square `s²` (`s ≥ 0`).
pub fn g_exact(s: &num_rational::BigRational) -> Result<num_rational::BigRational> {
    use num_traits::Signed;
    if s.is_negative() {
        return domain("g_exact expects s = sqrt(eps + 1) >= 0");
    }
    let one = int(1);
    let eps = s * s - &one;
    let quarter = rat(1, 4);
    let three_quarter = rat(3, 4);
    let half = rat(1, 2);
    Ok(&quarter * &eps * &eps + &three_quarter * &eps + &half - &half * s * s * s)
}

/// `ψ(W) + (3h/8) ε²`.
pub fn psi_positive_check(w: &WVector, h: f64) -> Result<f64> {
    if !(h >= 2.0 / 3.0) {
        return domain(format!("psi_positive_check needs h >= 2/3, got {h}"));
    }
    let e = epsilon(w);
    Ok(psi(w) + 3.0 * h / 8.0 * e * e)
}

/// φ in the reduced variables `(v₀, v₁, v₄)`.
pub fn varphi(v0: f64, v1: f64, v4: f64, h: f64) -> f64 {
    let n2 = 2.0 / 3.0 * v0 * v0 + 2.0 * v1 * v1 + 2.0 * v4 * v4;
    let hv = (2.0f64 / 3.0).sqrt() * h * v0;
    let cubic = SQRT6 * (v0 * v4 * v4 - 1.5 * v4 * v1 * v1 - 0.5 * v0 * v1 * v1 - v0 * v0 * v0 / 9.0);
    0.4 * v0 * v0 + v4 * v4 + cubic + 0.375 * n2 * n2 + 5.0 * (2.0 * hv + n2).powi(2)
}

/// φ for a general `V`, with the cubic term built from the tensor.
pub fn varphi_full(v: &WVector, h: f64) -> f64 {
    let q = compose(&v.as_array(), &reference_frame());
    let n2 = q.norm2();
    let hv = (2.0f64 / 3.0).sqrt() * h * v.w0;
    0.4 * v.w0 * v.w0 + v.w3 * v.w3 + v.w4 * v.w4 - 0.5 * SQRT6 * q.tr_cube()
        + 0.375 * n2 * n2
        + 5.0 * (2.0 * hv + n2).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn psi_examples() {
        assert_eq!(psi(&WVector::ZERO), 0.0);
        for w0 in [-2.0, 0.3, 1.7] {
            let w = WVector::new(w0, 0.0, 0.0, 0.0, 0.0);
            assert_abs_diff_eq!(psi(&w), -0.5 * w0 * w0 - SQRT6 / 9.0 * w0 * w0 * w0, epsilon = 1e-14);
        }
        let w = WVector::new(0.3, -1.1, 0.7, 0.25, -0.9);
        assert_abs_diff_eq!(psi(&w), psi_tensor(&w), epsilon = 1e-12);
    }

    #[test]
    fn reduce_example() {
        let r = psi_reduce(&WVector::new(1.0, 3.0, 4.0, 0.0, 1.0));
        assert_eq!(r, WVector::new(1.0, 5.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn witness_attains_equality() {
        for &(w0, r1, r2, p1) in &[(0.4, 1.3, 0.8, 0.3), (-1.0, 0.5, 2.0, 2.1), (0.0, 1.0, 1.0, -0.7)] {
            let w = equality_witness(w0, r1, r2, p1);
            assert_abs_diff_eq!(psi(&w), psi(&psi_reduce(&w)), epsilon = 1e-12);
            let (l, r) = reduction_sides(&w);
            assert_abs_diff_eq!(l, r, epsilon = 1e-12);
        }
    }

    #[test]
    fn substitution_identity() {
        assert_eq!(change_of_vars(&WVector::ZERO).unwrap(), (0.0, 0.0));
        for &(a, b, c) in &[(0.3, 0.0, -0.4), (-1.2, 0.9, 0.5), (2.0, -1.5, 1.1)] {
            let w = WVector::new(a, b, 0.0, 0.0, c);
            let (x, e) = change_of_vars(&w).unwrap();
            assert_abs_diff_eq!(psi_cubic(x, e), psi(&w), epsilon = 1e-12);
            assert!(e >= -1.0);
        }
        assert!(change_of_vars(&WVector::new(0.0, 0.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn g_closed_form() {
        assert_eq!(G(-1.0).unwrap(), 0.0);
        assert_eq!(G(0.0).unwrap(), 0.0);
        assert!(G(-1.5).is_err());
        assert_abs_diff_eq!(g_prime(-0.75).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g_prime(0.0).unwrap(), 0.0, epsilon = 1e-12);
        assert!(G(-0.75).unwrap() > 0.0);
        for e in [-0.9, -0.2, 0.5, 7.0, 300.0] {
            assert_abs_diff_eq!(G(e).unwrap(), g_factored(e).unwrap(), epsilon = 1e-9 * (1.0 + e * e));
        }
        assert_eq!(g_exact(&int(0)).unwrap(), int(0));
        assert_eq!(g_exact(&int(1)).unwrap(), int(0));
        // ε = 3 ⇒ s = 2: 9/4 + 9/4 + 1/2 − 4 = 1
        assert_eq!(g_exact(&int(2)).unwrap(), int(1));
    }

    #[test]
    fn psi_positive_domain() {
        assert_eq!(psi_positive_check(&WVector::ZERO, 1.0).unwrap(), 0.0);
        assert!(psi_positive_check(&WVector::ZERO, 0.5).is_err());
    }

    #[test]
    fn varphi_forms_agree() {
        assert_eq!(varphi(0.0, 0.0, 0.0, 0.8), 0.0);
        for &(a, b, c, h) in &[(0.3, -0.2, 0.5, 1.0), (-1.0, 0.7, 0.1, 0.5), (0.05, 1.3, -0.8, 0.0)] {
            let full = varphi_full(&WVector::new(a, b, 0.0, 0.0, c), h);
            assert_abs_diff_eq!(varphi(a, b, c, h), full, epsilon = 1e-11 * (1.0 + full.abs()));
        }
    }
}
