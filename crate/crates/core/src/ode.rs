//! Fixed-step classical Runge–Kutta integration of scalar ODEs.
//!
//! The step is `t_span / STEPS_PER_SPAN`, shrunk per grid interval so that
//! every requested output time is hit exactly. No adaptivity, so results
//! are bit-reproducible.

use crate::error::{ensure, Error, Result};

/// Number of RK4 steps across the full time span.
pub const STEPS_PER_SPAN: usize = 4096;

/// One RK4 step of `dy/dt = f(t, y)`.
pub fn rk4_step<F: Fn(f64, f64) -> f64>(f: &F, t: f64, y: f64, h: f64) -> f64 {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    let k4 = f(t + h, y + h * k3);
    y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
}

/// Check that `grid` starts at zero and increases strictly.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    ensure(!grid.is_empty(), || "time grid is empty".into())?;
    ensure(grid[0] == 0.0, || format!("time grid must start at 0, got {}", grid[0]))?;
    ensure(grid.windows(2).all(|w| w[1] > w[0]), || {
        "time grid must be strictly increasing".into()
    })?;
    ensure(grid.iter().all(|t| t.is_finite()), || "time grid has non-finite entries".into())
}

/// Integrate `dy/dt = f(t, y)` from `y(grid[0]) = y0` and return `y` at
/// every grid point.
pub fn integrate_on_grid<F: Fn(f64, f64) -> f64>(f: F, y0: f64, grid: &[f64]) -> Result<Vec<f64>> {
    validate_grid(grid)?;
    let span = grid[grid.len() - 1] - grid[0];
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0);
    if grid.len() == 1 {
        return Ok(out);
    }
    let h_max = span / STEPS_PER_SPAN as f64;
    let mut y = y0;
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let n = ((t1 - t0) / h_max).ceil().max(1.0) as usize;
        let h = (t1 - t0) / n as f64;
        if t0 + h == t0 {
            return Err(Error::StepUnderflow { t: t0 });
        }
        for i in 0..n {
            let t = t0 + i as f64 * h;
            y = rk4_step(&f, t, y, h);
        }
        out.push(y);
    }
    Ok(out)
}

/// `n_points` evenly spaced times on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n_points: usize) -> Result<Vec<f64>> {
    ensure(t_max > 0.0, || format!("t_max must be positive, got {t_max}"))?;
    ensure(n_points >= 2, || format!("need at least 2 grid points, got {n_points}"))?;
    let last = (n_points - 1) as f64;
    Ok((0..n_points).map(|i| t_max * i as f64 / last).collect())
}
