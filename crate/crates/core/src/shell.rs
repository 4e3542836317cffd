//! Spherical-coordinate discretization of the shell and the discrete
//! Landau-de Gennes energy `∫ ½|∇Q|² + f_B(Q)`.
//!
//! Nodes are `(r_i, θ_j, φ_k)` with `r` uniform on `[1, R]` (both Dirichlet layers
//! included), `θ` cell-centred in `(0, π)` and `φ` periodic. Tensor components are
//! Cartesian, so `|∇Q|²` is the sum of scalar gradient norms of the five coefficients.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::profile::HedgehogProfile;
use crate::qtensor::{bulk_density, bulk_gradient, bulk_hessian_apply, QTensor, ScalingParams, SQRT_3_2};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellGrid {
    pub r_outer: f64,
    pub nr: usize,
    pub ntheta: usize,
    pub nphi: usize,
    #[serde(skip)]
    w: Weights,
}

#[derive(Debug, Clone, PartialEq, Default)]
struct Weights {
    r: Vec<f64>,
    theta: Vec<f64>,
    /// `kr[i*nθ + j]`: stiffness of the radial edge `(i, i+1)`.
    kr: Vec<f64>,
    /// `kt[i*nθ + j]`: stiffness of the polar edge `(j, j+1)`.
    kt: Vec<f64>,
    /// `kp[i*nθ + j]`: stiffness of every azimuthal edge in ring `(i, j)`.
    kp: Vec<f64>,
    /// Node volume for ring `(i, j)`.
    vol: Vec<f64>,
}

impl ShellGrid {
    pub const DEFAULT_SHAPE: (usize, usize, usize) = (48, 24, 48);

    pub fn new(r_outer: f64, nr: usize, ntheta: usize, nphi: usize) -> Result<Self> {
        if !(r_outer > 1.0) || !r_outer.is_finite() {
            return domain(format!("outer radius must be > 1, got {r_outer}"));
        }
        if nr < 3 || ntheta < 2 || nphi < 3 {
            return domain(format!("shell grid {nr}x{ntheta}x{nphi} below the minimum 3x2x3"));
        }
        let dr = (r_outer - 1.0) / (nr - 1) as f64;
        let dth = PI / ntheta as f64;
        let dph = 2.0 * PI / nphi as f64;
        let mut r: Vec<f64> = (0..nr).map(|i| 1.0 + i as f64 * dr).collect();
        r[nr - 1] = r_outer;
        let theta: Vec<f64> = (0..ntheta).map(|j| (j as f64 + 0.5) * dth).collect();
        let mut wr = vec![dr; nr];
        wr[0] *= 0.5;
        wr[nr - 1] *= 0.5;
        let area: Vec<f64> = (0..ntheta)
            .map(|j| (j as f64 * dth).cos() - ((j + 1) as f64 * dth).cos())
            .collect();
        let rings = nr * ntheta;
        let mut kr = vec![0.0; rings];
        let mut kt = vec![0.0; rings];
        let mut kp = vec![0.0; rings];
        let mut vol = vec![0.0; rings];
        for i in 0..nr {
            for j in 0..ntheta {
                let s = i * ntheta + j;
                if i + 1 < nr {
                    let rm = 0.5 * (r[i] + r[i + 1]);
                    kr[s] = rm * rm * area[j] * dph / dr;
                }
                if j + 1 < ntheta {
                    kt[s] = wr[i] * ((j + 1) as f64 * dth).sin() * dph / dth;
                }
                let st = theta[j].sin();
                kp[s] = wr[i] * area[j] / (st * st * dph);
                vol[s] = wr[i] * r[i] * r[i] * area[j] * dph;
            }
        }
        Ok(Self { r_outer, nr, ntheta, nphi, w: Weights { r, theta, kr, kt, kp, vol } })
    }

    pub fn with_default_shape(r_outer: f64) -> Result<Self> {
        let (a, b, c) = Self::DEFAULT_SHAPE;
        Self::new(r_outer, a, b, c)
    }

    pub fn len(&self) -> usize {
        self.nr * self.ntheta * self.nphi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slice_len(&self) -> usize {
        self.ntheta * self.nphi
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.ntheta + j) * self.nphi + k
    }

    pub fn radii(&self) -> &[f64] {
        &self.w.r
    }

    pub fn thetas(&self) -> &[f64] {
        &self.w.theta
    }

    pub fn phi(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.nphi as f64
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let i = node / self.slice_len();
        i == 0 || i == self.nr - 1
    }

    /// Unit radial direction at `(θ_j, φ_k)`.
    pub fn direction(&self, j: usize, k: usize) -> Vector3<f64> {
        let (st, ct) = self.w.theta[j].sin_cos();
        let (sp, cp) = self.phi(k).sin_cos();
        Vector3::new(st * cp, st * sp, ct)
    }

    pub fn position(&self, node: usize) -> Vector3<f64> {
        let k = node % self.nphi;
        let j = (node / self.nphi) % self.ntheta;
        let i = node / self.slice_len();
        self.w.r[i] * self.direction(j, k)
    }

    /// Quadrature weight of every node (the weights sum to `4π ∫ r² dr` up to the trapezoid error).
    pub fn node_volume(&self, node: usize) -> f64 {
        self.w.vol[node / self.nphi]
    }

    pub fn volumes(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.node_volume(n)).collect()
    }

    /// Range of node indices strictly between the Dirichlet layers.
    pub fn interior(&self) -> std::ops::Range<usize> {
        self.slice_len()..(self.nr - 1) * self.slice_len()
    }
}

/// One tensor per node of a [`ShellGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct QField {
    pub nodes: Vec<QTensor>,
}

impl QField {
    pub fn zeros(g: &ShellGrid) -> Self {
        Self { nodes: vec![QTensor::ZERO; g.len()] }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn axpy(&mut self, a: f64, x: &QField) {
        for (y, x) in self.nodes.iter_mut().zip(&x.nodes) {
            *y = *y + a * *x;
        }
    }

    pub fn scaled(&self, a: f64) -> QField {
        QField { nodes: self.nodes.iter().map(|q| a * *q).collect() }
    }

    pub fn add(&self, other: &QField) -> QField {
        QField { nodes: self.nodes.iter().zip(&other.nodes).map(|(a, b)| *a + *b).collect() }
    }

    pub fn sub(&self, other: &QField) -> QField {
        QField { nodes: self.nodes.iter().zip(&other.nodes).map(|(a, b)| *a - *b).collect() }
    }

    pub fn max_norm(&self) -> f64 {
        self.nodes.iter().map(|q| q.norm2().sqrt()).fold(0.0, f64::max)
    }
}

fn check(q: &QField, g: &ShellGrid) -> Result<()> {
    if q.len() != g.len() {
        return domain(format!("field has {} nodes, grid has {}", q.len(), g.len()));
    }
    Ok(())
}

/// The boundary tensor `Q_b = √(3/2)(x̂⊗x̂ − I/3)` at grid direction `(j, k)`.
pub fn boundary_value(g: &ShellGrid, j: usize, k: usize) -> QTensor {
    QTensor::uniaxial(SQRT_3_2, &g.direction(j, k))
}

/// Nodal `h(r_i)` from the profile spline (exactly 1 on the Dirichlet layers).
pub fn profile_on_radii(g: &ShellGrid, prof: &HedgehogProfile) -> Result<Vec<f64>> {
    if (prof.r_outer - g.r_outer).abs() > 1e-12 * g.r_outer {
        return domain(format!("profile R = {} but grid R = {}", prof.r_outer, g.r_outer));
    }
    let mut h: Vec<f64> = g.radii().iter().map(|&r| prof.eval(r.min(prof.r_outer)).0).collect();
    h[0] = 1.0;
    h[g.nr - 1] = 1.0;
    Ok(h)
}

/// The hedgehog `H = √(3/2) h(r)(x̂⊗x̂ − I/3)` sampled on the grid.
pub fn hedgehog_on_grid(g: &ShellGrid, prof: &HedgehogProfile) -> Result<QField> {
    let h = profile_on_radii(g, prof)?;
    let mut q = QField::zeros(g);
    for i in 0..g.nr {
        for j in 0..g.ntheta {
            for k in 0..g.nphi {
                let n = g.direction(j, k);
                let idx = g.index(i, j, k);
                q.nodes[idx] = if i == 0 || i == g.nr - 1 {
                    boundary_value(g, j, k)
                } else {
                    QTensor::uniaxial(SQRT_3_2 * h[i], &n)
                };
            }
        }
    }
    Ok(q)
}

/// Number of radial sine modes in [`random_admissible`].
const RADIAL_MODES: usize = 3;

/// `H + V` with `V` a smooth random perturbation: a few radial sine modes times
/// random quadratic polynomials in `x̂`, rescaled so that `max |V| = amplitude`.
pub fn random_admissible(g: &ShellGrid, prof: &HedgehogProfile, amplitude: f64, seed: u64) -> Result<QField> {
    if !(amplitude >= 0.0) {
        return domain(format!("amplitude must be nonnegative, got {amplitude}"));
    }
    let h = hedgehog_on_grid(g, prof)?;
    let v = random_perturbation(g, seed);
    let peak = v.max_norm();
    let scale = if peak > 0.0 { amplitude / peak } else { 0.0 };
    let mut q = h.clone();
    q.axpy(scale, &v);
    for n in (0..g.slice_len()).chain((g.nr - 1) * g.slice_len()..g.len()) {
        q.nodes[n] = h.nodes[n];
    }
    Ok(q)
}

/// Unscaled smooth perturbation vanishing on both Dirichlet layers.
pub fn random_perturbation(g: &ShellGrid, seed: u64) -> QField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // per radial mode and component: constant, linear (3) and quadratic (6) coefficients
    let coef: Vec<[[f64; 10]; 5]> = (0..RADIAL_MODES)
        .map(|_| {
            let mut c = [[0.0; 10]; 5];
            for row in c.iter_mut() {
                for v in row.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
            }
            c
        })
        .collect();
    let r = g.radii();
    let mut q = QField::zeros(g);
    for i in 1..g.nr - 1 {
        let s = (r[i] - 1.0) / (g.r_outer - 1.0);
        let radial: Vec<f64> = (0..RADIAL_MODES).map(|m| ((m + 1) as f64 * PI * s).sin() / (m + 1) as f64).collect();
        for j in 0..g.ntheta {
            for k in 0..g.nphi {
                let x = g.direction(j, k);
                let mono = [1.0, x[0], x[1], x[2], x[0] * x[0], x[1] * x[1], x[2] * x[2], x[0] * x[1], x[0] * x[2], x[1] * x[2]];
                let mut c = [0.0; 5];
                for (m, rad) in radial.iter().enumerate() {
                    for (comp, cc) in c.iter_mut().enumerate() {
                        *cc += rad * coef[m][comp].iter().zip(&mono).map(|(a, b)| a * b).sum::<f64>();
                    }
                }
                q.nodes[g.index(i, j, k)] = QTensor::new(c);
            }
        }
    }
    q
}

fn neighbours(g: &ShellGrid, i: usize, j: usize, k: usize) -> [(Option<usize>, f64); 6] {
    let s = i * g.ntheta + j;
    let kp = g.w.kp[s];
    let kplus = (k + 1) % g.nphi;
    let kminus = (k + g.nphi - 1) % g.nphi;
    [
        ((i + 1 < g.nr).then(|| g.index(i + 1, j, k)), g.w.kr[s]),
        ((i > 0).then(|| g.index(i - 1, j, k)), if i > 0 { g.w.kr[s - g.ntheta] } else { 0.0 }),
        ((j + 1 < g.ntheta).then(|| g.index(i, j + 1, k)), g.w.kt[s]),
        ((j > 0).then(|| g.index(i, j - 1, k)), if j > 0 { g.w.kt[s - 1] } else { 0.0 }),
        (Some(g.index(i, j, kplus)), kp),
        (Some(g.index(i, j, kminus)), kp),
    ]
}

/// Elastic part `½∫|∇Q|²` of the discrete energy.
pub fn gradient_energy(q: &QField, g: &ShellGrid) -> Result<f64> {
    check(q, g)?;
    let per_slice: Vec<f64> = (0..g.nr)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..g.ntheta {
                let s = i * g.ntheta + j;
                for k in 0..g.nphi {
                    let a = q.nodes[g.index(i, j, k)];
                    if i + 1 < g.nr {
                        acc += 0.5 * g.w.kr[s] * (q.nodes[g.index(i + 1, j, k)] - a).norm2();
                    }
                    if j + 1 < g.ntheta {
                        acc += 0.5 * g.w.kt[s] * (q.nodes[g.index(i, j + 1, k)] - a).norm2();
                    }
                    acc += 0.5 * g.w.kp[s] * (q.nodes[g.index(i, j, (k + 1) % g.nphi)] - a).norm2();
                }
            }
            acc
        })
        .collect();
    Ok(per_slice.iter().sum())
}

/// Bulk part `∫ f_B(Q)` of the discrete energy.
pub fn bulk_energy(q: &QField, p: &ScalingParams, g: &ShellGrid) -> Result<f64> {
    check(q, g)?;
    let per_slice: Vec<f64> = q
        .nodes
        .par_chunks(g.slice_len())
        .enumerate()
        .map(|(i, sl)| {
            sl.iter()
                .enumerate()
                .map(|(n, qq)| bulk_density(qq, p) * g.w.vol[i * g.ntheta + n / g.nphi])
                .sum::<f64>()
        })
        .collect();
    Ok(per_slice.iter().sum())
}

pub fn discrete_energy(q: &QField, p: &ScalingParams, g: &ShellGrid) -> Result<f64> {
    Ok(gradient_energy(q, g)? + bulk_energy(q, p, g)?)
}

/// Gradient of [`discrete_energy`] with respect to the nodal coefficients; rows of
/// Dirichlet nodes are zero.
pub fn discrete_gradient(q: &QField, p: &ScalingParams, g: &ShellGrid) -> Result<QField> {
    check(q, g)?;
    let mut out = QField::zeros(g);
    let sl = g.slice_len();
    out.nodes.par_chunks_mut(sl).enumerate().for_each(|(i, chunk)| {
        if i == 0 || i == g.nr - 1 {
            return;
        }
        for j in 0..g.ntheta {
            let vol = g.w.vol[i * g.ntheta + j];
            for k in 0..g.nphi {
                let a = q.nodes[g.index(i, j, k)];
                let mut acc = vol * bulk_gradient(&a, p);
                for (nb, w) in neighbours(g, i, j, k) {
                    if let Some(nb) = nb {
                        acc = acc + w * (a - q.nodes[nb]);
                    }
                }
                chunk[j * g.nphi + k] = acc;
            }
        }
    });
    Ok(out)
}

/// Hessian of [`discrete_energy`] at `q` applied to `v` (Dirichlet rows and columns removed).
pub fn hessian_apply(q: &QField, v: &QField, p: &ScalingParams, g: &ShellGrid) -> Result<QField> {
    check(q, g)?;
    check(v, g)?;
    let mut out = QField::zeros(g);
    let sl = g.slice_len();
    out.nodes.par_chunks_mut(sl).enumerate().for_each(|(i, chunk)| {
        if i == 0 || i == g.nr - 1 {
            return;
        }
        for j in 0..g.ntheta {
            let vol = g.w.vol[i * g.ntheta + j];
            for k in 0..g.nphi {
                let idx = g.index(i, j, k);
                let a = v.nodes[idx];
                let mut acc = vol * bulk_hessian_apply(&q.nodes[idx], &a, p);
                for (nb, w) in neighbours(g, i, j, k) {
                    if let Some(nb) = nb {
                        let b = if g.is_boundary(nb) { QTensor::ZERO } else { v.nodes[nb] };
                        acc = acc + w * (a - b);
                    }
                }
                chunk[j * g.nphi + k] = acc;
            }
        }
    });
    Ok(out)
}

/// `Σ_nodes vol · a:b` (the discrete `L²(Ω)` inner product).
pub fn l2_dot(a: &QField, b: &QField, g: &ShellGrid) -> Result<f64> {
    check(a, g)?;
    check(b, g)?;
    let per: Vec<f64> = a
        .nodes
        .par_chunks(g.slice_len())
        .zip(b.nodes.par_chunks(g.slice_len()))
        .enumerate()
        .map(|(i, (x, y))| {
            x.iter()
                .zip(y)
                .enumerate()
                .map(|(n, (p, q))| p.dot(q) * g.w.vol[i * g.ntheta + n / g.nphi])
                .sum::<f64>()
        })
        .collect();
    Ok(per.iter().sum())
}

/// `‖a − b‖_{L²(Ω)}` by the nodal quadrature.
pub fn field_distance(a: &QField, b: &QField, g: &ShellGrid) -> Result<f64> {
    let d = a.sub(b);
    check(b, g)?;
    Ok(l2_dot(&d, &d, g)?.sqrt())
}

/// Field rotated by `R` about the origin, `Q'(x) = R Q(Rᵀx) Rᵀ`, for rotations about
/// `e_3` by `steps` azimuthal cells (the ones that map the grid to itself).
pub fn rotate_about_z(q: &QField, g: &ShellGrid, steps: usize) -> QField {
    let ang = g.phi(steps % g.nphi);
    let (s, c) = ang.sin_cos();
    let rot = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
    let mut out = QField::zeros(g);
    for i in 0..g.nr {
        for j in 0..g.ntheta {
            for k in 0..g.nphi {
                let src = q.nodes[g.index(i, j, k)].to_matrix();
                out.nodes[g.index(i, j, (k + steps) % g.nphi)] = QTensor::from_matrix(&(rot * src * rot.transpose()));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotMeta {
    pub nr: usize,
    pub ntheta: usize,
    pub nphi: usize,
    pub r_outer: f64,
    pub t: f64,
    pub seed: Option<u64>,
}

/// CSV `x,y,z,c0,c1,c2,c3,c4` (coefficients in the internal orthonormal basis).
pub fn write_field_csv<W: Write>(q: &QField, g: &ShellGrid, mut w: W) -> Result<()> {
    check(q, g)?;
    writeln!(w, "x,y,z,c0,c1,c2,c3,c4")?;
    for (n, t) in q.nodes.iter().enumerate() {
        let x = g.position(n);
        writeln!(w, "{},{},{},{},{},{},{},{}", x[0], x[1], x[2], t.c[0], t.c[1], t.c[2], t.c[3], t.c[4])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{profile_energy, solve_profile, RadialGrid};

    fn small_prof(r_outer: f64, t: f64) -> HedgehogProfile {
        let p = ScalingParams::new(t).unwrap();
        let rg = RadialGrid::uniform(r_outer, 513).unwrap();
        solve_profile(r_outer, &p, &rg, 1e-11).unwrap()
    }

    #[test]
    fn volumes_integrate_the_shell() {
        let g = ShellGrid::new(2.0, 41, 16, 20).unwrap();
        let total: f64 = g.volumes().iter().sum();
        let exact = 4.0 * PI * (8.0 - 1.0) / 3.0;
        assert!((total - exact).abs() / exact < 1e-3);
    }

    #[test]
    fn boundary_extension_energy() {
        let g = ShellGrid::new(1.5, 17, 48, 96).unwrap();
        let prof = small_prof(1.5, 0.0);
        let flat = crate::profile::HedgehogProfile::from_values(prof.params, prof.grid.clone(), vec![1.0; prof.grid.len()]).unwrap();
        let q = hedgehog_on_grid(&g, &flat).unwrap();
        let e = discrete_energy(&q, &prof.params, &g).unwrap();
        let exact = 4.0 * PI * 3.0 * 0.5;
        assert!((e - exact).abs() / exact < 5e-3, "{e} vs {exact}");
    }

    #[test]
    fn hedgehog_energy_matches_radial_energy() {
        let prof = small_prof(1.5, 5.0);
        let g = ShellGrid::new(1.5, 33, 48, 96).unwrap();
        let q = hedgehog_on_grid(&g, &prof).unwrap();
        let e = discrete_energy(&q, &prof.params, &g).unwrap();
        let e1 = 4.0 * PI * profile_energy(&prof);
        assert!((e - e1).abs() / e1 < 5e-3, "{e} vs {e1}");
    }

    #[test]
    fn gradient_matches_central_differences() {
        let prof = small_prof(1.5, 5.0);
        let g = ShellGrid::new(1.5, 7, 6, 8).unwrap();
        let p = prof.params;
        let q = random_admissible(&g, &prof, 0.3, 11).unwrap();
        let grad = discrete_gradient(&q, &p, &g).unwrap();
        for n in g.interior().step_by(7) {
            for c in 0..5 {
                let s = 1e-5;
                let mut a = q.clone();
                a.nodes[n].c[c] += s;
                let mut b = q.clone();
                b.nodes[n].c[c] -= s;
                let fd = (discrete_energy(&a, &p, &g).unwrap() - discrete_energy(&b, &p, &g).unwrap()) / (2.0 * s);
                let an = grad.nodes[n].c[c];
                assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-3), "{fd} vs {an}");
            }
        }
        for n in 0..g.slice_len() {
            assert_eq!(grad.nodes[n], QTensor::ZERO);
        }
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let prof = small_prof(1.5, 5.0);
        let g = ShellGrid::new(1.5, 7, 6, 8).unwrap();
        let p = prof.params;
        let q = random_admissible(&g, &prof, 0.3, 3).unwrap();
        let mut v = random_perturbation(&g, 4);
        v = v.scaled(1.0 / v.max_norm());
        let hv = hessian_apply(&q, &v, &p, &g).unwrap();
        let s = 1e-6;
        let mut a = q.clone();
        a.axpy(s, &v);
        let mut b = q.clone();
        b.axpy(-s, &v);
        let ga = discrete_gradient(&a, &p, &g).unwrap();
        let gb = discrete_gradient(&b, &p, &g).unwrap();
        for n in g.interior() {
            let fd = (1.0 / (2.0 * s)) * (ga.nodes[n] - gb.nodes[n]);
            assert!((fd - hv.nodes[n]).norm2().sqrt() < 1e-5 * (1.0 + hv.nodes[n].norm2().sqrt()));
        }
    }

    #[test]
    fn admissible_fields() {
        let prof = small_prof(1.5, 1.0);
        let g = ShellGrid::new(1.5, 9, 6, 10).unwrap();
        let h = hedgehog_on_grid(&g, &prof).unwrap();
        assert_eq!(random_admissible(&g, &prof, 0.0, 5).unwrap(), h);
        let a = random_admissible(&g, &prof, 0.5, 5).unwrap();
        assert_eq!(a, random_admissible(&g, &prof, 0.5, 5).unwrap());
        assert_ne!(a, random_admissible(&g, &prof, 0.5, 6).unwrap());
        for j in 0..g.ntheta {
            for k in 0..g.nphi {
                assert_eq!(a.nodes[g.index(0, j, k)], boundary_value(&g, j, k));
                assert_eq!(a.nodes[g.index(g.nr - 1, j, k)], boundary_value(&g, j, k));
            }
        }
        assert!((a.sub(&h).max_norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rotation_invariance() {
        let prof = small_prof(1.5, 3.0);
        let g = ShellGrid::new(1.5, 9, 8, 12).unwrap();
        let q = random_admissible(&g, &prof, 0.4, 9).unwrap();
        let e = discrete_energy(&q, &prof.params, &g).unwrap();
        for steps in [1, 5] {
            let qr = rotate_about_z(&q, &g, steps);
            let er = discrete_energy(&qr, &prof.params, &g).unwrap();
            assert!((e - er).abs() < 1e-12 * e);
        }
    }

    #[test]
    fn distance_properties() {
        let prof = small_prof(1.5, 1.0);
        let g = ShellGrid::new(1.5, 9, 6, 10).unwrap();
        let h = hedgehog_on_grid(&g, &prof).unwrap();
        let v = random_perturbation(&g, 1);
        assert_eq!(field_distance(&h, &h, &g).unwrap(), 0.0);
        let d1 = field_distance(&h.add(&v), &h, &g).unwrap();
        let d2 = field_distance(&h.add(&v.scaled(2.0)), &h, &g).unwrap();
        assert!((d1 - l2_dot(&v, &v, &g).unwrap().sqrt()).abs() < 1e-12 * d1);
        assert!((d2 - 2.0 * d1).abs() < 1e-12 * d1);
        let other = ShellGrid::new(1.5, 9, 6, 12).unwrap();
        assert!(field_distance(&h, &h, &other).is_err());
    }
}
