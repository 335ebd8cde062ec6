//! Finite-difference integration of the reaction–diffusion systems, plus the
//! front-tracking and profile-fitting helpers the experiments are built on.
//!
//! The marcher is a plain explicit Euler scheme with a centered Laplacian on
//! whichever component is mobile in the chosen variant. Boundaries are pinned
//! at their initial values for the nonlinear equation (the domains are chosen
//! large enough that nothing interesting reaches them) and zero-gradient for
//! the linear co-moving system, which has no resting states to pin to.

use crate::error::{Error, Result};
use crate::model::{ModelParams, Variant};

/// Default time step as a multiple of `dx^2` (the half-Laplacian alone
/// tolerates `dx^2`; 0.4 leaves room for the reaction terms).
pub const DEFAULT_DT_FACTOR: f64 = 0.4;

/// Steps between divergence checks during a march.
const DIVERGENCE_CHECK_EVERY: u64 = 256;

/// Uniform spatial grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl Grid1D {
    /// Grid covering `[x0, x_end]` with spacing `dx` (rounded to a whole
    /// number of cells).
    pub fn from_range(x0: f64, x_end: f64, dx: f64) -> Result<Self> {
        if !x0.is_finite() || !x_end.is_finite() || !dx.is_finite() || dx <= 0.0 || x_end <= x0 {
            return Err(Error::Domain(format!(
                "bad grid range [{x0}, {x_end}] with dx = {dx}"
            )));
        }
        let n = ((x_end - x0) / dx).round() as usize + 1;
        if n < 16 {
            return Err(Error::Domain(format!(
                "grid has only {n} points; need at least 16"
            )));
        }
        Ok(Grid1D { x0, dx, n })
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.n - 1)
    }
}

/// Which field of a [`FieldPair`] to look at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// Active density `u`.
    U,
    /// Dormant density `v`.
    V,
}

/// The two coupled fields at one instant.
#[derive(Debug, Clone)]
pub struct FieldPair {
    pub grid: Grid1D,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl FieldPair {
    /// Builds fields by sampling the given profiles on the grid.
    pub fn from_fn(grid: Grid1D, fu: impl Fn(f64) -> f64, fv: impl Fn(f64) -> f64) -> Self {
        let u = (0..grid.n).map(|i| fu(grid.x(i))).collect();
        let v = (0..grid.n).map(|i| fv(grid.x(i))).collect();
        FieldPair { grid, u, v, t: 0.0 }
    }

    pub fn component(&self, c: Component) -> &[f64] {
        match c {
            Component::U => &self.u,
            Component::V => &self.v,
        }
    }
}

/// Step initial condition: both fields 0 left of the origin, 1 from it on.
/// The grid must contain the origin strictly in its interior.
pub fn heaviside_ic(grid: Grid1D) -> Result<FieldPair> {
    if grid.x0 >= 0.0 || grid.x_end() <= 0.0 {
        return Err(Error::Domain(format!(
            "step initial condition needs the origin inside ({}, {})",
            grid.x0,
            grid.x_end()
        )));
    }
    let step = |x: f64| if x < 0.0 { 0.0 } else { 1.0 };
    Ok(FieldPair::from_fn(grid, step, step))
}

/// Travelling-wave-shaped initial condition with tail decay rate `mu < 0`:
/// `u = exp(-d1 * exp(mu x))`, `v = exp(-d2 * exp(mu x))`. Far right both
/// fields approach 1 like `1 - d * exp(mu x)`; far left they vanish.
pub fn exponential_ic(grid: Grid1D, mu: f64, d: (f64, f64)) -> Result<FieldPair> {
    if !mu.is_finite() || mu >= 0.0 {
        return Err(Error::Domain(format!(
            "tail rate mu = {mu} must be negative"
        )));
    }
    if !(d.0.is_finite() && d.1.is_finite()) || d.0 <= 0.0 || d.1 <= 0.0 {
        return Err(Error::Domain(format!(
            "tail amplitudes must be positive, got ({}, {})",
            d.0, d.1
        )));
    }
    Ok(FieldPair::from_fn(
        grid,
        |x| (-d.0 * (mu * x).exp()).exp(),
        |x| (-d.1 * (mu * x).exp()).exp(),
    ))
}

/// Leftmost crossing of the front, sampled over time.
#[derive(Debug, Clone)]
pub struct FrontTrace {
    pub level: f64,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
}

/// Controls for [`integrate`].
#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    /// Time step; `None` picks a stable default from the grid and rates.
    pub dt: Option<f64>,
    /// Record the front every this many steps (plus first and last).
    pub sample_every: usize,
    /// Level whose leftmost crossing of `u` is tracked.
    pub front_level: f64,
    /// Times at which to keep full field copies, in addition to the final one.
    pub snapshot_times: Vec<f64>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            dt: None,
            sample_every: 1,
            front_level: 0.5,
            snapshot_times: Vec::new(),
        }
    }
}

/// Everything a nonlinear march produces.
#[derive(Debug, Clone)]
pub struct PdeRun {
    pub field: FieldPair,
    pub trace: FrontTrace,
    pub snapshots: Vec<FieldPair>,
}

fn check_final_time(t_final: f64) -> Result<()> {
    if !t_final.is_finite() || t_final <= 0.0 {
        return Err(Error::Domain(format!(
            "final time {t_final} must be positive"
        )));
    }
    Ok(())
}

/// Integrates the nonlinear system from `init` to `t_final`.
///
/// Boundary values stay pinned at their initial values, the fields are
/// clamped to `[0, 1]` each step, and the run aborts with
/// [`Error::Diverged`] if anything turns non-finite. The front of `u` is
/// recorded throughout; requested snapshots are taken at the first step
/// boundary past each time.
pub fn integrate(
    params: &ModelParams,
    init: FieldPair,
    t_final: f64,
    opts: &IntegrateOptions,
) -> Result<PdeRun> {
    check_final_time(t_final)?;
    if opts.sample_every == 0 {
        return Err(Error::Domain("sample_every must be at least 1".into()));
    }
    let grid = init.grid;
    let (n, dx) = (grid.n, grid.dx);
    let rate = params.c + params.c_prime + params.effective_selection();
    let hard_limit = (0.5 * dx * dx).min(1.0 / rate);
    let dt_req = opts
        .dt
        .unwrap_or((DEFAULT_DT_FACTOR * dx * dx).min(0.5 / rate));
    if !dt_req.is_finite() || dt_req <= 0.0 {
        return Err(Error::Domain(format!("bad time step {dt_req}")));
    }
    if dt_req > hard_limit {
        return Err(Error::CflViolation {
            dt: dt_req,
            limit: hard_limit,
        });
    }
    let nsteps = ((t_final / dt_req).ceil() as u64).max(1);
    let dt = t_final / nsteps as f64;

    let mut snap_times: Vec<f64> = opts.snapshot_times.clone();
    snap_times.sort_by(|a, b| a.total_cmp(b));
    snap_times.dedup();
    let mut next_snap = 0usize;
    let mut snapshots = Vec::new();

    let mut u = init.u;
    let mut v = init.v;
    let mut un = u.clone();
    let mut vn = v.clone();
    let inv_dx2 = 1.0 / (dx * dx);
    let (c, cp) = (params.c, params.c_prime);

    let mut trace = FrontTrace {
        level: opts.front_level,
        times: Vec::new(),
        positions: Vec::new(),
    };
    let record = |trace: &mut FrontTrace, u: &[f64], t: f64| -> Result<()> {
        let pos = crossing_position(&grid, u, opts.front_level)?;
        trace.times.push(t);
        trace.positions.push(pos);
        Ok(())
    };
    record(&mut trace, &u, 0.0)?;

    for step in 1..=nsteps {
        match params.variant {
            Variant::Classical => {
                for i in 1..n - 1 {
                    let lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
                    let du = 0.5 * lap + params.selection_unchecked(u[i]);
                    let next = (u[i] + dt * du).clamp(0.0, 1.0);
                    un[i] = next;
                    vn[i] = next; // the dormant field is a mirror here
                }
            }
            Variant::SeedBank => {
                for i in 1..n - 1 {
                    let lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
                    let du = 0.5 * lap + c * (v[i] - u[i]) + params.selection_unchecked(u[i]);
                    let dv = cp * (u[i] - v[i]);
                    un[i] = (u[i] + dt * du).clamp(0.0, 1.0);
                    vn[i] = (v[i] + dt * dv).clamp(0.0, 1.0);
                }
            }
            Variant::Spore => {
                for i in 1..n - 1 {
                    let lap = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_dx2;
                    let du = c * (v[i] - u[i]) + params.selection_unchecked(u[i]);
                    let dv = 0.5 * lap + cp * (u[i] - v[i]);
                    un[i] = (u[i] + dt * du).clamp(0.0, 1.0);
                    vn[i] = (v[i] + dt * dv).clamp(0.0, 1.0);
                }
            }
        }
        std::mem::swap(&mut u, &mut un);
        std::mem::swap(&mut v, &mut vn);
        let t_now = step as f64 * dt;

        if (step % DIVERGENCE_CHECK_EVERY == 0 || step == nsteps)
            && u.iter().chain(v.iter()).any(|x| !x.is_finite())
        {
            return Err(Error::Diverged { step, t: t_now });
        }
        if step % opts.sample_every as u64 == 0 || step == nsteps {
            record(&mut trace, &u, t_now)?;
        }
        while next_snap < snap_times.len() && t_now >= snap_times[next_snap] - 1e-9 {
            snapshots.push(FieldPair {
                grid,
                u: u.clone(),
                v: v.clone(),
                t: t_now,
            });
            next_snap += 1;
        }
    }

    Ok(PdeRun {
        field: FieldPair {
            grid,
            u,
            v,
            t: t_final,
        },
        trace,
        snapshots,
    })
}

/// Integrates the linearized system in a frame moving left at speed
/// `lambda`: diffusion on the mobile component, drift `lambda * d/dx` on
/// both, growth `s * u` on the active one, and zero-gradient boundaries.
/// Values are unconstrained (they grow like `exp(s t)`), so pick `t_final`
/// accordingly.
pub fn integrate_linear_drifted(
    params: &ModelParams,
    init: FieldPair,
    t_final: f64,
    lambda: f64,
    dt: Option<f64>,
) -> Result<FieldPair> {
    check_final_time(t_final)?;
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("bad drift speed {lambda}")));
    }
    let grid = init.grid;
    let (n, dx) = (grid.n, grid.dx);
    let s = params.effective_selection();
    // Combined explicit bound: diffusion + upwind advection + linear rates.
    let stiffness = 1.0 / (dx * dx) + lambda.abs() / dx + params.c + params.c_prime + s;
    let hard_limit = 0.9 / stiffness;
    let dt_req = dt.unwrap_or(DEFAULT_DT_FACTOR / stiffness);
    if !dt_req.is_finite() || dt_req <= 0.0 {
        return Err(Error::Domain(format!("bad time step {dt_req}")));
    }
    if dt_req > hard_limit {
        return Err(Error::CflViolation {
            dt: dt_req,
            limit: hard_limit,
        });
    }
    let nsteps = ((t_final / dt_req).ceil() as u64).max(1);
    let dt = t_final / nsteps as f64;

    let mut u = init.u;
    let mut v = init.v;
    let mut un = u.clone();
    let mut vn = v.clone();
    let inv_dx2 = 1.0 / (dx * dx);
    let (c, cp) = (params.c, params.c_prime);

    for step in 1..=nsteps {
        for i in 1..n - 1 {
            // First-order upwind: difference on the side the data comes from.
            let drift_u = lambda
                * if lambda >= 0.0 {
                    u[i + 1] - u[i]
                } else {
                    u[i] - u[i - 1]
                }
                / dx;
            let drift_v = lambda
                * if lambda >= 0.0 {
                    v[i + 1] - v[i]
                } else {
                    v[i] - v[i - 1]
                }
                / dx;
            let lap_u = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
            let lap_v = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_dx2;
            let (du, dv) = match params.variant {
                Variant::Classical => {
                    let du = 0.5 * lap_u + drift_u + s * u[i];
                    (du, drift_v + s * v[i])
                }
                Variant::SeedBank => (
                    0.5 * lap_u + drift_u + c * (v[i] - u[i]) + s * u[i],
                    drift_v + cp * (u[i] - v[i]),
                ),
                Variant::Spore => (
                    drift_u + c * (v[i] - u[i]) + s * u[i],
                    0.5 * lap_v + drift_v + cp * (u[i] - v[i]),
                ),
            };
            un[i] = u[i] + dt * du;
            vn[i] = v[i] + dt * dv;
        }
        // Zero-gradient ghosts.
        un[0] = un[1];
        un[n - 1] = un[n - 2];
        vn[0] = vn[1];
        vn[n - 1] = vn[n - 2];
        std::mem::swap(&mut u, &mut un);
        std::mem::swap(&mut v, &mut vn);

        if (step % DIVERGENCE_CHECK_EVERY == 0 || step == nsteps)
            && u.iter().chain(v.iter()).any(|x| !x.is_finite())
        {
            return Err(Error::Diverged {
                step,
                t: step as f64 * dt,
            });
        }
    }

    Ok(FieldPair {
        grid,
        u,
        v,
        t: init.t + t_final,
    })
}

fn crossing_position(grid: &Grid1D, f: &[f64], level: f64) -> Result<f64> {
    for i in 0..f.len() - 1 {
        let (a, b) = (f[i] - level, f[i + 1] - level);
        if a == 0.0 {
            return Ok(grid.x(i));
        }
        if a * b < 0.0 {
            return Ok(grid.x(i) + grid.dx * a.abs() / (a - b).abs());
        }
    }
    if let Some(&last) = f.last() {
        if last == level {
            return Ok(grid.x_end());
        }
    }
    Err(Error::NotBracketed { level })
}

/// Leftmost point where the chosen field crosses `level`, linearly
/// interpolated between grid points.
pub fn front_position(field: &FieldPair, component: Component, level: f64) -> Result<f64> {
    crossing_position(&field.grid, field.component(component), level)
}

/// Least-squares front speed over the time window `[t_lo, t_hi]`, returned
/// as `(speed, standard error)`. Wants at least eight trace samples inside
/// the window.
pub fn front_speed(trace: &FrontTrace, t_lo: f64, t_hi: f64) -> Result<(f64, f64)> {
    let pairs: Vec<(f64, f64)> = trace
        .times
        .iter()
        .zip(&trace.positions)
        .filter(|(&t, _)| t >= t_lo && t <= t_hi)
        .map(|(&t, &x)| (t, x))
        .collect();
    fit_line(&pairs).map(|(slope, _, stderr)| (slope, stderr))
}

/// Decay rate of `1 - f` ahead of the front: slope of a linear fit to
/// `ln(1 - f)` over grid points with `x` in `[x_lo, x_hi]`. Saturated cells
/// (where `1 - f` underflows the fit's floor) are skipped.
pub fn tail_decay_rate(
    field: &FieldPair,
    component: Component,
    x_lo: f64,
    x_hi: f64,
) -> Result<f64> {
    let grid = field.grid;
    let f = field.component(component);
    let mut pairs = Vec::new();
    for (i, &fi) in f.iter().enumerate() {
        let x = grid.x(i);
        if x < x_lo || x > x_hi {
            continue;
        }
        let w = 1.0 - fi;
        if w > 1e-14 {
            pairs.push((x, w.ln()));
        }
    }
    fit_line(&pairs).map(|(slope, _, _)| slope)
}

/// Ordinary least squares through `(x, y)` pairs: `(slope, intercept,
/// stderr of slope)`.
fn fit_line(pairs: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let n = pairs.len();
    if n < 8 {
        return Err(Error::InsufficientSamples { needed: 8, got: n });
    }
    let nf = n as f64;
    let mean_x = pairs.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = pairs.iter().map(|p| p.1).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in pairs {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::Domain("all fit abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = pairs
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    Ok((slope, intercept, stderr))
}

/// Field value at an arbitrary point, linearly interpolated.
pub fn value_at(field: &FieldPair, component: Component, x: f64) -> Result<f64> {
    let grid = field.grid;
    if x < grid.x0 || x > grid.x_end() {
        return Err(Error::Domain(format!(
            "x = {x} outside the grid [{}, {}]",
            grid.x0,
            grid.x_end()
        )));
    }
    let fi = (x - grid.x0) / grid.dx;
    let i = (fi.floor() as usize).min(grid.n - 2);
    let w = fi - i as f64;
    let f = field.component(component);
    Ok(f[i] * (1.0 - w) + f[i + 1] * w)
}
