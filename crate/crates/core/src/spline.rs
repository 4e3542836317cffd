//! Cubic spline on a uniform grid with prescribed end second derivatives.

use crate::error::{domain, Result};
use crate::linalg::solve_tridiagonal;

#[derive(Debug, Clone)]
pub struct UniformSpline {
    x0: f64,
    dx: f64,
    y: Vec<f64>,
    /// Second derivative at the nodes.
    m: Vec<f64>,
}

impl UniformSpline {
    pub fn new(x0: f64, dx: f64, y: Vec<f64>, m_start: f64, m_end: f64) -> Result<Self> {
        let n = y.len();
        if n < 3 {
            return domain("spline needs at least 3 nodes");
        }
        let k = n - 2;
        let mut rhs: Vec<f64> = (1..n - 1)
            .map(|i| 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (dx * dx))
            .collect();
        rhs[0] -= m_start;
        rhs[k - 1] -= m_end;
        let inner = solve_tridiagonal(&vec![1.0; k], &vec![4.0; k], &vec![1.0; k], &rhs)?;
        let mut m = Vec::with_capacity(n);
        m.push(m_start);
        m.extend(inner);
        m.push(m_end);
        Ok(Self { x0, dx, y, m })
    }

    pub fn second_derivatives(&self) -> &[f64] {
        &self.m
    }

    /// `(s, s', s'')` at `x`; points outside the node range are clamped to the end cells.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.y.len();
        let mut u = (x - self.x0) / self.dx;
        if (u - u.round()).abs() < 1e-10 {
            u = u.round();
        }
        let i = (u.floor().max(0.0) as usize).min(n - 2);
        let a = (i + 1) as f64 - u;
        let b = u - i as f64;
        let h = self.dx;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let s = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let ds = (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        let d2s = a * m0 + b * m1;
        (s, ds, d2s)
    }
}
