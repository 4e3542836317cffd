//! Small dense/banded kernels shared by the profile solver and the spectral code:
//! a tridiagonal solver, inertia counting for symmetric block-tridiagonal
//! pencils `A − σM` (Sylvester's law with a block LDLᵀ sweep), and a
//! memory-light Lanczos iteration for the bottom of a large symmetric spectrum.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{HedgehogError, Result};

/// Thomas algorithm. `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(HedgehogError::Internal("singular tridiagonal system".into()));
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(HedgehogError::Internal("singular tridiagonal system".into()));
        }
        c[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Symmetric block-tridiagonal matrix with square blocks of size `b`,
/// paired with a positive diagonal mass (one entry per unknown).
#[derive(Debug, Clone)]
pub struct BlockTridiag {
    pub b: usize,
    /// Diagonal blocks `A_kk`.
    pub diag: Vec<DMatrix<f64>>,
    /// Coupling blocks `A_{k,k+1}`; `off[k]` couples block `k` to `k+1`.
    pub off: Vec<DMatrix<f64>>,
    /// Mass entries, `b` per block, unknown-major within a block.
    pub mass: Vec<f64>,
}

impl BlockTridiag {
    pub fn new(b: usize, nblocks: usize) -> Self {
        Self {
            b,
            diag: vec![DMatrix::zeros(b, b); nblocks],
            off: vec![DMatrix::zeros(b, b); nblocks.saturating_sub(1)],
            mass: vec![1.0; b * nblocks],
        }
    }

    pub fn nblocks(&self) -> usize {
        self.diag.len()
    }

    pub fn dim(&self) -> usize {
        self.b * self.nblocks()
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let b = self.b;
        let blk = |k: usize| DVector::from_column_slice(&x[k * b..(k + 1) * b]);
        let mut acc = 0.0;
        for k in 0..self.nblocks() {
            let xk = blk(k);
            acc += xk.dot(&(&self.diag[k] * &xk));
            if k + 1 < self.nblocks() {
                acc += 2.0 * xk.dot(&(&self.off[k] * blk(k + 1)));
            }
        }
        acc
    }

    /// Number of eigenvalues of the pencil `(A, M)` strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        if self.b == 1 {
            return self.count_below_scalar(sigma);
        }
        let b = self.b;
        let mut count = 0;
        let mut prev_inv: Option<DMatrix<f64>> = None;
        let scale = self
            .diag
            .iter()
            .chain(&self.off)
            .map(|m| m.amax())
            .chain(self.mass.iter().map(|m| (sigma * m).abs()))
            .fold(f64::MIN_POSITIVE, f64::max);
        let tiny = scale * 1e-15;
        for k in 0..self.nblocks() {
            let mut d = self.diag[k].clone();
            for i in 0..b {
                d[(i, i)] -= sigma * self.mass[k * b + i];
            }
            if let Some(inv) = &prev_inv {
                let c = &self.off[k - 1];
                d -= c.transpose() * inv * c;
            }
            let eig = d.clone().symmetric_eigen();
            let mut inv = DMatrix::zeros(b, b);
            for (i, &l) in eig.eigenvalues.iter().enumerate() {
                if l < 0.0 {
                    count += 1;
                }
                // an exactly singular pivot is nudged; it only shifts σ by an ulp
                let l = if l.abs() < tiny { tiny } else { l };
                let v = eig.eigenvectors.column(i);
                inv += (v * v.transpose()) / l;
            }
            prev_inv = Some(inv);
        }
        count
    }

    fn count_below_scalar(&self, sigma: f64) -> usize {
        let scale = self
            .diag
            .iter()
            .chain(&self.off)
            .map(|m| m[(0, 0)].abs())
            .chain(self.mass.iter().map(|m| (sigma * m).abs()))
            .fold(f64::MIN_POSITIVE, f64::max);
        let tiny = scale * 1e-15;
        let mut count = 0;
        let mut d_prev = 1.0;
        for k in 0..self.nblocks() {
            let mut d = self.diag[k][(0, 0)] - sigma * self.mass[k];
            if k > 0 {
                let c = self.off[k - 1][(0, 0)];
                d -= c * c / d_prev;
            }
            if d < 0.0 {
                count += 1;
            }
            if d.abs() < tiny {
                d = tiny;
            }
            d_prev = d;
        }
        count
    }

    /// Gershgorin interval for the symmetrically scaled matrix `M^{-1/2} A M^{-1/2}`.
    pub fn gershgorin(&self) -> (f64, f64) {
        let b = self.b;
        let n = self.nblocks();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..n {
            for i in 0..b {
                let mi = self.mass[k * b + i];
                let center = self.diag[k][(i, i)] / mi;
                let mut radius = 0.0;
                for j in 0..b {
                    if j != i {
                        radius += self.diag[k][(i, j)].abs() / (mi * self.mass[k * b + j]).sqrt();
                    }
                }
                if k + 1 < n {
                    for j in 0..b {
                        radius += self.off[k][(i, j)].abs() / (mi * self.mass[(k + 1) * b + j]).sqrt();
                    }
                }
                if k > 0 {
                    for j in 0..b {
                        radius += self.off[k - 1][(j, i)].abs() / (mi * self.mass[(k - 1) * b + j]).sqrt();
                    }
                }
                lo = lo.min(center - radius);
                hi = hi.max(center + radius);
            }
        }
        (lo, hi)
    }

    /// The `k`-th smallest (1-based) eigenvalue of the pencil by bisection on the inertia count.
    pub fn kth_eigenvalue(&self, k: usize, rel_tol: f64) -> Result<f64> {
        if k == 0 || k > self.dim() {
            return Err(HedgehogError::Eigen(format!("eigenvalue index {k} out of range 1..={}", self.dim())));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
        lo -= pad;
        hi += pad;
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(HedgehogError::Eigen("non-finite matrix entries".into()));
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) || mid == lo || mid == hi {
                return Ok(mid);
            }
            if self.count_below(mid) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(HedgehogError::Eigen("bisection did not terminate".into()))
    }

    pub fn smallest_eigenvalue(&self) -> Result<f64> {
        self.kth_eigenvalue(1, 1e-13)
    }
}

/// Scalar symmetric tridiagonal matrix with unit mass.
pub fn tridiagonal(diag: &[f64], off: &[f64]) -> BlockTridiag {
    let mut t = BlockTridiag::new(1, diag.len());
    for (k, &d) in diag.iter().enumerate() {
        t.diag[k][(0, 0)] = d;
    }
    for (k, &o) in off.iter().enumerate() {
        t.off[k][(0, 0)] = o;
    }
    t
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    pub max_iter: usize,
    /// Stop once the Ritz residual estimate `β_k |s_k|` is below `tol · max(|θ|, 1)`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { max_iter: 3000, tol: 1e-6, seed: 7 }
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LanczosResult {
    /// Smallest Ritz value (an upper bound for the smallest eigenvalue).
    pub ritz_min: f64,
    /// `‖B y − θ y‖ / ‖y‖` for the Ritz vector: some eigenvalue lies within this of `ritz_min`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Parallel dot product with a fixed reduction order (bitwise reproducible).
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    const CHUNK: usize = 4096;
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

/// Smallest eigenvalue of a symmetric operator given by `apply(x, y)` (`y ← B x`).
///
/// Plain three-term recurrence without reorthogonalization: the lowest Ritz
/// value still converges to the bottom of the spectrum, ghosts only duplicate
/// converged values. A second pass regenerates the basis to form the Ritz
/// vector and its residual.
pub fn lanczos_smallest<F>(n: usize, apply: F, opts: LanczosOptions) -> Result<LanczosResult>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    if n == 0 {
        return Err(HedgehogError::Eigen("empty operator".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let nrm = dot(&start, &start).sqrt();
    start.iter_mut().for_each(|x| *x /= nrm);

    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut q_prev = vec![0.0; n];
    let mut q = start.clone();
    let mut w = vec![0.0; n];
    let mut converged = false;
    const WINDOW: usize = 10;

    for it in 0..opts.max_iter.min(n) {
        apply(&q, &mut w);
        let alpha = dot(&w, &q);
        let beta_prev = betas.last().copied().unwrap_or(0.0);
        w.par_iter_mut()
            .zip(q.par_iter().zip(q_prev.par_iter()))
            .for_each(|(wi, (qi, pi))| *wi -= alpha * qi + beta_prev * pi);
        alphas.push(alpha);
        let beta = dot(&w, &w).sqrt();
        if (it + 1) % WINDOW == 0 || beta < 1e-300 {
            let theta = tridiagonal(&alphas, &betas).smallest_eigenvalue()?;
            let s = tridiagonal_eigenvector(&alphas, &betas, theta)?;
            if beta * s.last().unwrap().abs() <= opts.tol * theta.abs().max(1.0) {
                converged = true;
            }
        }
        if converged || beta < 1e-300 {
            converged = true;
            break;
        }
        betas.push(beta);
        std::mem::swap(&mut q_prev, &mut q);
        q.par_iter_mut().zip(w.par_iter()).for_each(|(qi, wi)| *qi = wi / beta);
    }
    let k = alphas.len();
    betas.truncate(k.saturating_sub(1));
    let t = tridiagonal(&alphas, &betas);
    let theta = t.smallest_eigenvalue()?;
    let s = tridiagonal_eigenvector(&alphas, &betas, theta)?;

    // second pass: y = Σ s_j q_j
    let mut y = vec![0.0; n];
    let mut q_prev = vec![0.0; n];
    let mut q = start;
    for j in 0..k {
        y.par_iter_mut().zip(q.par_iter()).for_each(|(yi, qi)| *yi += s[j] * qi);
        if j + 1 == k {
            break;
        }
        apply(&q, &mut w);
        let bp = if j > 0 { betas[j - 1] } else { 0.0 };
        let (a, b) = (alphas[j], betas[j]);
        w.par_iter_mut()
            .zip(q.par_iter().zip(q_prev.par_iter()))
            .for_each(|(wi, (qi, pi))| *wi = (*wi - a * qi - bp * pi) / b);
        std::mem::swap(&mut q_prev, &mut q);
        std::mem::swap(&mut q, &mut w);
    }
    apply(&y, &mut w);
    let ynorm = dot(&y, &y).sqrt();
    w.par_iter_mut().zip(y.par_iter()).for_each(|(wi, yi)| *wi -= theta * yi);
    let res = dot(&w, &w).sqrt();
    Ok(LanczosResult { ritz_min: theta, residual: res / ynorm, iterations: k, converged })
}

/// Unit eigenvector of the tridiagonal `T` for an accurate eigenvalue `theta` (inverse iteration).
fn tridiagonal_eigenvector(alphas: &[f64], betas: &[f64], theta: f64) -> Result<Vec<f64>> {
    let k = alphas.len();
    if k == 1 {
        return Ok(vec![1.0]);
    }
    let shift = theta - 1e-10 * theta.abs().max(1.0);
    let diag: Vec<f64> = alphas.iter().map(|a| a - shift).collect();
    let mut lower = vec![0.0; k];
    let mut upper = vec![0.0; k];
    lower[1..].copy_from_slice(betas);
    upper[..k - 1].copy_from_slice(betas);
    let mut x = vec![1.0 / (k as f64).sqrt(); k];
    for _ in 0..3 {
        x = solve_tridiagonal(&lower, &diag, &upper, &x)?;
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= n);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn thomas_matches_dense() {
        let lower = [0.0, -1.0, 2.0, 0.5];
        let diag = [4.0, 5.0, 6.0, 3.0];
        let upper = [1.0, -2.0, 0.3, 0.0];
        let rhs = [1.0, 2.0, 3.0, 4.0];
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        let mut m = DMatrix::zeros(4, 4);
        for i in 0..4 {
            m[(i, i)] = diag[i];
            if i > 0 {
                m[(i, i - 1)] = lower[i];
            }
            if i < 3 {
                m[(i, i + 1)] = upper[i];
            }
        }
        let r = &m * DVector::from_column_slice(&x) - DVector::from_column_slice(&rhs);
        assert!(r.amax() < 1e-14);
    }

    #[test]
    fn sturm_count_on_second_difference() {
        // eigenvalues of tridiag(-1, 2, -1) of size n: 2 - 2cos(kπ/(n+1))
        let n = 50;
        let t = tridiagonal(&vec![2.0; n], &vec![-1.0; n - 1]);
        for k in [1, 2, 7, 50] {
            let exact = 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert_relative_eq!(t.kth_eigenvalue(k, 1e-14).unwrap(), exact, max_relative = 1e-11);
        }
        assert_eq!(t.count_below(0.0), 0);
        assert_eq!(t.count_below(4.0), n);
    }

    #[test]
    fn block_pencil_matches_dense() {
        let b = 3;
        let nb = 6;
        let mut bt = BlockTridiag::new(b, nb);
        let mut dense = DMatrix::zeros(b * nb, b * nb);
        let mut seed = 1.0f64;
        let mut rnd = || {
            seed = (seed * 16807.0) % 2147483647.0;
            seed / 2147483647.0 - 0.5
        };
        for k in 0..nb {
            for i in 0..b {
                for j in 0..=i {
                    let v = if i == j { 3.0 + rnd() } else { rnd() };
                    bt.diag[k][(i, j)] = v;
                    bt.diag[k][(j, i)] = v;
                }
                bt.mass[k * b + i] = 1.0 + 0.5 * rnd().abs();
            }
            if k + 1 < nb {
                for i in 0..b {
                    for j in 0..b {
                        bt.off[k][(i, j)] = rnd();
                    }
                }
            }
        }
        for k in 0..nb {
            for i in 0..b {
                for j in 0..b {
                    dense[(k * b + i, k * b + j)] = bt.diag[k][(i, j)];
                    if k + 1 < nb {
                        dense[(k * b + i, (k + 1) * b + j)] = bt.off[k][(i, j)];
                        dense[((k + 1) * b + j, k * b + i)] = bt.off[k][(i, j)];
                    }
                }
            }
        }
        let minv = DMatrix::from_diagonal(&DVector::from_iterator(b * nb, bt.mass.iter().map(|m| 1.0 / m.sqrt())));
        let mut eig: Vec<f64> = (&minv * dense * &minv).symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for k in [1, 4, 18] {
            assert_relative_eq!(bt.kth_eigenvalue(k, 1e-14).unwrap(), eig[k - 1], max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn lanczos_finds_bottom_of_laplacian() {
        let n = 400;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let l = if i > 0 { x[i - 1] } else { 0.0 };
                let r = if i + 1 < n { x[i + 1] } else { 0.0 };
                y[i] = 2.0 * x[i] - l - r + 0.01 * x[i];
            }
        };
        let res = lanczos_smallest(n, apply, LanczosOptions { max_iter: 400, tol: 1e-13, seed: 3 }).unwrap();
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos() + 0.01;
        assert_relative_eq!(res.ritz_min, exact, max_relative = 1e-8);
        assert!(res.residual < 1e-4, "residual {}", res.residual);
    }
}
