//! Symmetric traceless 3×3 tensors, the radial frame and its tensor basis,
//! and the rescaled Landau-de Gennes bulk potential.
//!
//! A [`QTensor`] stores five coefficients in a fixed orthonormal basis of the
//! space of symmetric traceless matrices, so `|Q|²` is the plain Euclidean
//! norm of the coefficients. The frame-dependent basis `(E, F, G, X, Y)` used
//! in the mode decomposition is not normalized (`|E|² = 2/3`, the others
//! `2`); it is only ever reached through [`compose`] and [`decompose`].

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{domain, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;
pub const SQRT6: f64 = 2.449_489_742_783_178;
/// `√(3/2)`, the amplitude of the boundary tensor `Q_b`.
pub const SQRT_3_2: f64 = 1.224_744_871_391_589;

/// Symmetric traceless 3×3 tensor in the internal orthonormal basis
///
/// ```text
/// B0 = (e1e1 - e2e2)/√2          B1 = (2 e3e3 - e1e1 - e2e2)/√6
/// B2 = (e1e2 + e2e1)/√2          B3 = (e1e3 + e3e1)/√2
/// B4 = (e2e3 + e3e2)/√2
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QTensor {
    pub c: [f64; 5],
}

impl QTensor {
    pub const ZERO: QTensor = QTensor { c: [0.0; 5] };

    pub fn new(c: [f64; 5]) -> Self {
        Self { c }
    }

    /// Projects an arbitrary 3×3 matrix onto its symmetric traceless part.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let s6 = SQRT6;
        Self {
            c: [
                (m[(0, 0)] - m[(1, 1)]) / SQRT2,
                (2.0 * m[(2, 2)] - m[(0, 0)] - m[(1, 1)]) / s6,
                (m[(0, 1)] + m[(1, 0)]) / SQRT2,
                (m[(0, 2)] + m[(2, 0)]) / SQRT2,
                (m[(1, 2)] + m[(2, 1)]) / SQRT2,
            ],
        }
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        let [a, b, xy, xz, yz] = self.c;
        let d0 = a / SQRT2 - b / SQRT6;
        let d1 = -a / SQRT2 - b / SQRT6;
        let d2 = 2.0 * b / SQRT6;
        let (o01, o02, o12) = (xy / SQRT2, xz / SQRT2, yz / SQRT2);
        Matrix3::new(d0, o01, o02, o01, d1, o12, o02, o12, d2)
    }

    /// `s (n⊗n − I/3)` for a unit vector `n`.
    pub fn uniaxial(s: f64, n: &Vector3<f64>) -> Self {
        Self::from_matrix(&(s * (n * n.transpose())))
    }

    pub fn dot(&self, other: &QTensor) -> f64 {
        self.c.iter().zip(other.c.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    /// `tr Q³`, evaluated as `3 det Q` (valid for traceless Q).
    pub fn tr_cube(&self) -> f64 {
        3.0 * self.to_matrix().determinant()
    }

    /// Traceless part of `Q²`.
    pub fn dev_square(&self) -> QTensor {
        let m = self.to_matrix();
        QTensor::from_matrix(&(m * m))
    }

    /// Traceless part of `QV + VQ`.
    pub fn dev_sym_product(&self, other: &QTensor) -> QTensor {
        let a = self.to_matrix();
        let b = other.to_matrix();
        QTensor::from_matrix(&(a * b + b * a))
    }
}

impl Add for QTensor {
    type Output = QTensor;
    fn add(self, o: QTensor) -> QTensor {
        let mut c = self.c;
        c.iter_mut().zip(o.c).for_each(|(a, b)| *a += b);
        QTensor { c }
    }
}

impl Sub for QTensor {
    type Output = QTensor;
    fn sub(self, o: QTensor) -> QTensor {
        let mut c = self.c;
        c.iter_mut().zip(o.c).for_each(|(a, b)| *a -= b);
        QTensor { c }
    }
}

impl Neg for QTensor {
    type Output = QTensor;
    fn neg(self) -> QTensor {
        QTensor { c: self.c.map(|a| -a) }
    }
}

impl Mul<QTensor> for f64 {
    type Output = QTensor;
    fn mul(self, q: QTensor) -> QTensor {
        QTensor { c: q.c.map(|a| self * a) }
    }
}

/// `(|Q|², tr Q³)`.
pub fn invariants(q: &QTensor) -> (f64, f64) {
    (q.norm2(), q.tr_cube())
}

/// Right-handed orthonormal triad `(n, m, p)` with `n` radial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthFrame {
    pub n: Vector3<f64>,
    pub m: Vector3<f64>,
    pub p: Vector3<f64>,
}

impl OrthFrame {
    /// Spherical-angle frame: `n = x̂`, `m = ∂θ x̂`, `p = ∂φ x̂ / sin θ`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            n: Vector3::new(st * cp, st * sp, ct),
            m: Vector3::new(ct * cp, ct * sp, -st),
            p: Vector3::new(-sp, cp, 0.0),
        }
    }

    pub fn det(&self) -> f64 {
        self.n.dot(&self.m.cross(&self.p))
    }
}

/// Frame at a point `x ≠ 0`. On the polar axis the azimuth is fixed to zero.
pub fn radial_frame(x: &Vector3<f64>) -> Result<OrthFrame> {
    let r = x.norm();
    if !(r > 0.0) || !r.is_finite() {
        return domain("radial frame requires a nonzero finite point");
    }
    let rho = x.x.hypot(x.y);
    let theta = rho.atan2(x.z);
    let phi = if rho == 0.0 { 0.0 } else { x.y.atan2(x.x) };
    let mut f = OrthFrame::from_angles(theta, phi);
    // keep n exactly x/|x| rather than its trigonometric reconstruction
    f.n = x / r;
    Ok(f)
}

/// The frame-dependent basis `(E, F, G, X, Y)` of the mode decomposition.
#[derive(Debug, Clone, Copy)]
pub struct ModeBasis {
    pub e: QTensor,
    pub f: QTensor,
    pub g: QTensor,
    pub x: QTensor,
    pub y: QTensor,
}

impl ModeBasis {
    pub const WEIGHTS: [f64; 5] = [2.0 / 3.0, 2.0, 2.0, 2.0, 2.0];

    pub fn new(fr: &OrthFrame) -> Self {
        let sym = |a: &Vector3<f64>, b: &Vector3<f64>| {
            QTensor::from_matrix(&(a * b.transpose() + b * a.transpose()))
        };
        Self {
            e: QTensor::from_matrix(&(fr.n * fr.n.transpose())),
            f: sym(&fr.n, &fr.m),
            g: sym(&fr.n, &fr.p),
            x: sym(&fr.m, &fr.p),
            y: QTensor::from_matrix(&(fr.m * fr.m.transpose() - fr.p * fr.p.transpose())),
        }
    }

    pub fn as_array(&self) -> [QTensor; 5] {
        [self.e, self.f, self.g, self.x, self.y]
    }
}

/// `v0 E + v1 F + v2 G + v3 X + v4 Y`.
pub fn compose(v: &[f64; 5], frame: &OrthFrame) -> QTensor {
    compose_in(v, &ModeBasis::new(frame))
}

pub fn compose_in(v: &[f64; 5], basis: &ModeBasis) -> QTensor {
    basis
        .as_array()
        .iter()
        .zip(v)
        .fold(QTensor::ZERO, |acc, (b, &vi)| acc + vi * *b)
}

/// Inverse of [`compose`]: projections divided by `|E|² = 2/3` resp. `2`.
pub fn decompose(q: &QTensor, frame: &OrthFrame) -> [f64; 5] {
    decompose_in(q, &ModeBasis::new(frame))
}

pub fn decompose_in(q: &QTensor, basis: &ModeBasis) -> [f64; 5] {
    let b = basis.as_array();
    std::array::from_fn(|i| q.dot(&b[i]) / ModeBasis::WEIGHTS[i])
}

/// `|V|²` of a tensor given by its `(E, F, G, X, Y)` coefficients.
pub fn weighted_norm2(v: &[f64; 5]) -> f64 {
    v.iter()
        .zip(ModeBasis::WEIGHTS)
        .map(|(a, w)| w * a * a)
        .sum()
}

/// Boundary tensor `Q_b = √(3/2)(x̂⊗x̂ − I/3)` in the given frame.
pub fn boundary_tensor(frame: &OrthFrame) -> QTensor {
    QTensor::uniaxial(SQRT_3_2, &frame.n)
}

/// Physical Landau-de Gennes constants, kept alongside the reduced values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub l: f64,
    /// Bulk order `s₊ = B h₊ / (3C)`.
    pub s_plus: f64,
    /// Length scale `27 C L / (2 B²)`; lengths are measured in units of its square root.
    pub l_bar: f64,
}

/// Reduced temperature `t` and `h₊ = (3 + √(9 + 8t))/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub t: f64,
    pub h_plus: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub physical: Option<PhysicalConstants>,
}

pub fn h_plus_of(t: f64) -> f64 {
    (3.0 + (9.0 + 8.0 * t).sqrt()) / 4.0
}

impl ScalingParams {
    pub fn new(t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return domain(format!("reduced temperature must be finite and >= 0, got {t}"));
        }
        Ok(Self { t, h_plus: h_plus_of(t), physical: None })
    }

    /// Residual of `2h₊² = 3h₊ + t`, relative to `max(1, t)`.
    pub fn identity_residual(&self) -> f64 {
        let h = self.h_plus;
        (2.0 * h * h - 3.0 * h - self.t).abs() / self.t.max(1.0)
    }
}

/// Converts physical constants (`A ≤ 0`, `B, C, L > 0`) to reduced parameters.
pub fn reduced_params(a: f64, b: f64, c: f64, l: f64) -> Result<ScalingParams> {
    if a > 0.0 || !a.is_finite() {
        return domain(format!("A = {a}: only temperatures T <= T* (A <= 0) are supported"));
    }
    if !(b > 0.0) || !(c > 0.0) || !(l > 0.0) {
        return domain(format!("B, C and L must be positive (B = {b}, C = {c}, L = {l})"));
    }
    let mut p = ScalingParams::new(27.0 * a.abs() * c / (b * b))?;
    p.physical = Some(PhysicalConstants {
        a,
        b,
        c,
        l,
        s_plus: b * p.h_plus / (3.0 * c),
        l_bar: 27.0 * c * l / (2.0 * b * b),
    });
    Ok(p)
}

/// Same as [`reduced_params`] with `A = α (T − T*)`.
pub fn reduced_params_from_temperature(
    alpha: f64,
    temperature: f64,
    t_star: f64,
    b: f64,
    c: f64,
    l: f64,
) -> Result<ScalingParams> {
    if !(alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    reduced_params(alpha * (temperature - t_star), b, c, l)
}

/// `(t/8)(1 − |Q|²)² + (h₊/8)(1 + 3|Q|⁴ − 4√6 tr Q³)`.
pub fn bulk_density(q: &QTensor, p: &ScalingParams) -> f64 {
    let q2 = q.norm2();
    let q3 = q.tr_cube();
    let s = 1.0 - q2;
    p.t / 8.0 * s * s + p.h_plus / 8.0 * (1.0 + 3.0 * q2 * q2 - 4.0 * SQRT6 * q3)
}

/// Gradient of [`bulk_density`] on the space of symmetric traceless tensors.
pub fn bulk_gradient(q: &QTensor, p: &ScalingParams) -> QTensor {
    let q2 = q.norm2();
    let a = p.t / 2.0 * (q2 - 1.0) + 1.5 * p.h_plus * q2;
    a * *q + (-1.5 * SQRT6 * p.h_plus) * q.dev_square()
}

/// Second derivative of [`bulk_density`] at `q` applied to `v`.
pub fn bulk_hessian_apply(q: &QTensor, v: &QTensor, p: &ScalingParams) -> QTensor {
    let q2 = q.norm2();
    let qv = q.dot(v);
    let diag = p.t / 2.0 * (q2 - 1.0) + 1.5 * p.h_plus * q2;
    let along_q = p.t * qv + 3.0 * p.h_plus * qv;
    diag * *v + along_q * *q + (-1.5 * SQRT6 * p.h_plus) * q.dev_sym_product(v)
}
