//! Monotone cubic (Fritsch–Carlson) interpolation on a uniform grid, with
//! exact piecewise-cubic integration. Used by the weighted module for its
//! cumulative-integral passes.

use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub(crate) struct MonotoneCubic {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneCubic {
    /// Fit to samples `y` at `x0 + i*h`.
    pub fn fit_uniform(x0: f64, h: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        assert!(n >= 2, "need at least two samples");
        assert!(h > 0.0);
        let mut d = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            d.push((y[i + 1] - y[i]) / h);
        }
        let mut m = Vec::with_capacity(n);
        for i in 0..n {
            let s = if i == 0 {
                endpoint_slope(d[0], *d.get(1).unwrap_or(&d[0]))
            } else if i == n - 1 {
                endpoint_slope(d[n - 2], *d.get(n.wrapping_sub(3)).unwrap_or(&d[n - 2]))
            } else if d[i - 1] * d[i] <= 0.0 {
                0.0
            } else {
                // Uniform-grid Fritsch–Carlson harmonic mean.
                2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i])
            };
            m.push(s);
        }
        Self { x0, h, y, m }
    }

    pub fn x_last(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    /// Evaluate; clamps to the boundary values outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        if x <= self.x0 {
            return self.y[0];
        }
        if x >= self.x_last() {
            return self.y[n - 1];
        }
        let s = (x - self.x0) / self.h;
        let i = (s as usize).min(n - 2);
        let t = s - i as f64;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i]
            + h10 * self.h * self.m[i]
            + h01 * self.y[i + 1]
            + h11 * self.h * self.m[i + 1]
    }

    /// Cumulative integral of the interpolant at every grid node
    /// (first entry 0).
    pub fn cumulative(&self) -> Vec<f64> {
        let n = self.y.len();
        let mut out = Vec::with_capacity(n);
        out.push(0.0);
        let mut acc = crate::math::KahanSum::new();
        for i in 0..n - 1 {
            let cell = self.h * (self.y[i] + self.y[i + 1]) / 2.0
                + self.h * self.h * (self.m[i] - self.m[i + 1]) / 12.0;
            acc.add(cell);
            out.push(acc.value());
        }
        out
    }
}

fn endpoint_slope(d_near: f64, d_far: f64) -> f64 {
    // Three-point one-sided estimate with the usual shape clamps.
    let s = 1.5 * d_near - 0.5 * d_far;
    if s * d_near <= 0.0 {
        0.0
    } else if d_near * d_far <= 0.0 && crate::math::abs(s) > 3.0 * crate::math::abs(d_near) {
        3.0 * d_near
    } else {
        s
    }
}
