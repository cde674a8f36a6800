//! Weak KAM solutions and the objects built from them.
//!
//! `u₋` is the limit of `T⁻_t φ` for any initial data, `u₊` the limit of
//! `T⁺_t u₋`. Their coincidence set is the projected Aubry set. A forward
//! solution is recovered from its coincidence set as a supremum of backward
//! implicit action functions, and `T⁺_t φ` stays bounded exactly when `φ` lies
//! below `u₋` and touches it somewhere.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{is_unreachable, sup_diff, BoolMask, GridFunction, TorusGrid};
use crate::model::{ContactModel, Monotonicity};
use crate::semigroup::{
    step_backward, step_forward, step_forward_mirror, SemiConfig,
};

/// Stopping rule for the `u₋` / `u₊` iterations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Converged once the one-step change is at most `tol_conv · dt`.
    pub tol_conv: f64,
    pub t_max: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol_conv: 1e-6, t_max: 200.0 }
    }
}

fn require_increasing(m: &ContactModel) -> Result<()> {
    if m.sign() != Monotonicity::Increasing {
        return Err(Error::SignMismatch { expected: "increasing" });
    }
    Ok(())
}

fn iterate_to_fixed_point(
    start: &GridFunction,
    cfg: &SemiConfig,
    opts: &SolveOptions,
    step: impl Fn(&GridFunction) -> Result<GridFunction>,
) -> Result<(GridFunction, f64)> {
    let target = opts.tol_conv * cfg.dt;
    let max_steps = (opts.t_max / cfg.dt).ceil().max(1.0) as usize;
    let mut current = start.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..max_steps {
        let next = step(&current)?;
        residual = sup_diff(&next, &current)?;
        current = next;
        if residual <= target {
            return Ok((current, residual));
        }
    }
    if residual <= 10.0 * target {
        Ok((current, residual))
    } else {
        Err(Error::NoConvergence { t: max_steps as f64 * cfg.dt, residual })
    }
}

/// Limit of `T⁻_t φ₀`: the unique backward weak KAM solution.
pub fn solve_u_minus(
    m: &ContactModel,
    cfg: &SemiConfig,
    phi0: &GridFunction,
    opts: &SolveOptions,
) -> Result<(GridFunction, f64)> {
    require_increasing(m)?;
    iterate_to_fixed_point(phi0, cfg, opts, |u| step_backward(u, m, cfg))
}

/// Nodes where `u₋` comes within `band` of the rest value `−V/λ`.
///
/// Every fixed point of either semigroup lies below `−V/λ`; nodes attaining
/// the maximum of `u − (−V/λ)` are equilibria of the flow and belong to the
/// Aubry set. The returned set is never empty.
pub fn rest_nodes(u: &GridFunction, m: &ContactModel, band: f64) -> BoolMask {
    let grid = *u.grid();
    let excess: Vec<f64> = (0..grid.len())
        .map(|i| u.get(i) + m.potential(&grid.coords(i)[..grid.dim()]) / m.lambda())
        .collect();
    let top = excess.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let flags = excess.iter().map(|&e| e >= top - band).collect();
    BoolMask::new(grid, flags).expect("flags match grid size")
}

/// Maximal forward weak KAM solution below `u₋`.
///
/// Plain iteration of `T⁺` from `u₋` is unstable, since `T⁺` expands by
/// `1/(1 − λdt)` per step and scheme error drifts the iterate off to ±∞.
/// Instead `u₋` is kept on its rest nodes (where `u₊ = u₋` holds exactly)
/// and `w ← min(T⁺w, u₋)` elsewhere. This sequence decreases to the largest
/// fixed point below `u₋` that agrees with it on those nodes. The returned
/// residual is `‖T⁺w − w‖∞`.
pub fn solve_u_plus(
    m: &ContactModel,
    cfg: &SemiConfig,
    u_minus: &GridFunction,
    opts: &SolveOptions,
) -> Result<(GridFunction, f64)> {
    require_increasing(m)?;
    let pins = rest_nodes(u_minus, m, 10.0 * opts.tol_conv / m.lambda());
    let (w, _) = iterate_to_fixed_point(u_minus, cfg, opts, |w| {
        let next = step_forward(w, m, cfg)?;
        let values = (0..next.grid().len())
            .map(|i| if pins.get(i) { u_minus.get(i) } else { next.get(i).min(u_minus.get(i)) })
            .collect();
        GridFunction::new(*w.grid(), values)
    })?;
    let residual = sup_diff(&step_forward(&w, m, cfg)?, &w)?;
    if residual > 10.0 * opts.tol_conv * cfg.dt {
        return Err(Error::NoConvergence { t: opts.t_max, residual });
    }
    Ok((w, residual))
}

/// Default coincidence tolerance `10·(dx + dt)`.
pub fn default_mask_eps(grid: &TorusGrid, cfg: &SemiConfig) -> f64 {
    10.0 * (grid.dx() + cfg.dt)
}

/// Default classification band `5·(dx + dt)`.
pub fn default_touch_eps(grid: &TorusGrid, cfg: &SemiConfig) -> f64 {
    5.0 * (grid.dx() + cfg.dt)
}

#[derive(Clone, Debug)]
pub struct WeakKamResult {
    pub u_minus: GridFunction,
    pub u_plus: GridFunction,
    pub residual_minus: f64,
    pub residual_plus: f64,
    pub aubry_mask: BoolMask,
    pub mask_eps: f64,
    pub sup_bound: f64,
    pub lip_bound: f64,
    /// `max(u₊ − u₋)`, non-positive up to scheme error.
    pub order_gap: f64,
}

/// Runs both solvers and derives the Aubry mask and bound certificate.
pub fn solve_weak_kam(
    m: &ContactModel,
    cfg: &SemiConfig,
    phi0: &GridFunction,
    opts: &SolveOptions,
) -> Result<WeakKamResult> {
    let (u_minus, residual_minus) = solve_u_minus(m, cfg, phi0, opts)?;
    let (u_plus, residual_plus) = solve_u_plus(m, cfg, &u_minus, opts)?;
    let mask_eps = default_mask_eps(u_minus.grid(), cfg);
    let aubry_mask = coincidence_set(&u_minus, &u_plus, mask_eps)?;
    let (sup_bound, lip_bound) = wkam_bound_certificate(std::slice::from_ref(&u_plus));
    let order_gap = u_plus
        .values()
        .iter()
        .zip(u_minus.values())
        .map(|(p, m)| p - m)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(WeakKamResult {
        u_minus,
        u_plus,
        residual_minus,
        residual_plus,
        aubry_mask,
        mask_eps,
        sup_bound,
        lip_bound,
        order_gap,
    })
}

/// Nodes where `|u₋ − v₊| < eps`.
pub fn coincidence_set(u_minus: &GridFunction, v_plus: &GridFunction, eps: f64) -> Result<BoolMask> {
    let diff = u_minus.zip_map(v_plus, |a, b| (a - b).abs())?;
    BoolMask::new(*u_minus.grid(), diff.values().iter().map(|&d| d < eps).collect())
}

/// Projected Aubry set as the coincidence set of `u₋` and `u₊`.
pub fn aubry_set(result: &WeakKamResult, eps: f64) -> Result<BoolMask> {
    coincidence_set(&result.u_minus, &result.u_plus, eps)
}

/// `sup_τ h^{ξ, v₊(ξ)}(·, τ)` over `τ ∈ {dt, …, t_rep}`.
pub fn action_sup(
    v_plus: &GridFunction,
    xi: usize,
    m: &ContactModel,
    cfg: &SemiConfig,
    t_rep: f64,
) -> Result<GridFunction> {
    let steps = cfg.steps_for(t_rep)?;
    let grid = *v_plus.grid();
    let mut h = GridFunction::spike(grid, xi, v_plus.get(xi), -crate::grid::INF);
    let mut best = vec![f64::NEG_INFINITY; grid.len()];
    for _ in 0..steps {
        h = step_forward_mirror(&h, m, cfg)?;
        for (b, &v) in best.iter_mut().zip(h.values()) {
            *b = b.max(v);
        }
    }
    GridFunction::new(grid, best)
}

/// Rebuilds a forward solution from its values on `mask` as the pointwise
/// supremum of backward implicit action functions issued from masked nodes.
pub fn represent(
    v_plus: &GridFunction,
    mask: &BoolMask,
    m: &ContactModel,
    cfg: &SemiConfig,
    t_rep: f64,
) -> Result<GridFunction> {
    if mask.grid() != v_plus.grid() {
        return Err(Error::GridMismatch);
    }
    let nodes: Vec<usize> = mask.nodes().collect();
    if nodes.is_empty() {
        return Err(Error::EmptyMask);
    }
    let parts = nodes
        .par_iter()
        .map(|&xi| action_sup(v_plus, xi, m, cfg, t_rep))
        .collect::<Result<Vec<_>>>()?;
    let grid = *v_plus.grid();
    let values = (0..grid.len())
        .map(|i| parts.iter().map(|p| p.get(i)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    GridFunction::new(grid, values)
}

/// Largest sup-norm and largest discrete Lipschitz constant over a family.
pub fn wkam_bound_certificate(v_list: &[GridFunction]) -> (f64, f64) {
    let sup = v_list.iter().map(GridFunction::sup_norm).fold(0.0, f64::max);
    let lip = v_list.iter().map(GridFunction::lipschitz_constant).fold(0.0, f64::max);
    debug_assert!(sup.is_finite() && lip.is_finite());
    (sup, lip)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Behavior {
    Bounded,
    DivergesUp,
    DivergesDown,
    Indeterminate,
}

impl Behavior {
    pub fn label(self) -> &'static str {
        match self {
            Behavior::Bounded => "bounded",
            Behavior::DivergesUp => "diverges_up",
            Behavior::DivergesDown => "diverges_down",
            Behavior::Indeterminate => "indeterminate",
        }
    }
}

/// Predicts the long-time behaviour of `T⁺_t φ` from its position relative to
/// `u₋`. Non-finite input gives `Indeterminate`.
pub fn classify_initial(phi: &GridFunction, u_minus: &GridFunction, touch_eps: f64) -> Result<Behavior> {
    if phi.grid() != u_minus.grid() {
        return Err(Error::GridMismatch);
    }
    let mut max_excess = f64::NEG_INFINITY;
    for (&p, &u) in phi.values().iter().zip(u_minus.values()) {
        if is_unreachable(p) || is_unreachable(u) || p.is_nan() || u.is_nan() {
            return Ok(Behavior::Indeterminate);
        }
        max_excess = max_excess.max(p - u);
    }
    Ok(if max_excess > touch_eps {
        Behavior::DivergesUp
    } else if max_excess >= -touch_eps {
        Behavior::Bounded
    } else {
        Behavior::DivergesDown
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LongtimeOptions {
    pub t_max: f64,
    pub k_div: f64,
    /// Start of the window over which the uniform and Lipschitz bounds are recorded.
    pub delta: f64,
    pub touch_eps: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LongtimeVerdict {
    pub prediction: Behavior,
    pub empirical: Behavior,
    pub max_abs_seen: f64,
    pub time_horizon: f64,
    /// Time at which `±k_div` was first crossed.
    pub exit_time: Option<f64>,
    /// Largest `‖T⁺_t φ‖∞` for `t ≥ δ`.
    pub k_delta: f64,
    /// Largest discrete Lipschitz constant of `T⁺_t φ` for `t ≥ δ`.
    pub kappa_delta: f64,
}

impl LongtimeVerdict {
    pub fn agrees(&self) -> bool {
        self.prediction == self.empirical || self.prediction == Behavior::Indeterminate
    }
}

/// Evolves `T⁺_t φ` up to `t_max` (or until it leaves `[−k_div, k_div]`) and
/// compares the observed behaviour with [`classify_initial`].
pub fn verify_longtime(
    phi: &GridFunction,
    u_minus: &GridFunction,
    m: &ContactModel,
    cfg: &SemiConfig,
    opts: &LongtimeOptions,
) -> Result<LongtimeVerdict> {
    require_increasing(m)?;
    let prediction = classify_initial(phi, u_minus, opts.touch_eps)?;
    let steps = (opts.t_max / cfg.dt).round() as usize;
    let mut current = phi.clone();
    let mut max_abs = phi.sup_norm();
    let (mut k_delta, mut kappa_delta) = (0.0f64, 0.0f64);
    let mut empirical = Behavior::Bounded;
    let mut exit_time = None;
    for k in 1..=steps {
        current = step_forward(&current, m, cfg)?;
        let t = k as f64 * cfg.dt;
        let hi = current.max_finite().unwrap_or(0.0);
        let lo = current.min_finite().unwrap_or(0.0);
        max_abs = max_abs.max(hi.abs()).max(lo.abs());
        if hi > opts.k_div {
            empirical = Behavior::DivergesUp;
            exit_time = Some(t);
            break;
        }
        if lo < -opts.k_div {
            empirical = Behavior::DivergesDown;
            exit_time = Some(t);
            break;
        }
        if t >= opts.delta {
            k_delta = k_delta.max(current.sup_norm());
            kappa_delta = kappa_delta.max(current.lipschitz_constant());
        }
    }
    Ok(LongtimeVerdict {
        prediction,
        empirical,
        max_abs_seen: max_abs,
        time_horizon: opts.t_max,
        exit_time,
        k_delta,
        kappa_delta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointCheck {
    /// `‖T⁺_dt v − v‖∞`.
    pub residual: f64,
    /// `min (T⁻_dt v − v)`; non-negative for forward solutions.
    pub backward_gap: f64,
    /// Whether `T⁻_dt v ≥ v − 10·tol_fp` everywhere.
    pub backward_dominates: bool,
}

/// One-step residual of `v` as a candidate fixed point of `T⁺`, plus the
/// companion inequality `T⁻_dt v ≥ v`.
pub fn forward_fixed_point_check(v: &GridFunction, m: &ContactModel, cfg: &SemiConfig) -> Result<FixedPointCheck> {
    require_increasing(m)?;
    let residual = sup_diff(&step_forward(v, m, cfg)?, v)?;
    let back = step_backward(v, m, cfg)?;
    let backward_gap = back
        .values()
        .iter()
        .zip(v.values())
        .map(|(b, a)| b - a)
        .fold(f64::INFINITY, f64::min);
    Ok(FixedPointCheck {
        residual,
        backward_gap,
        backward_dominates: backward_gap >= -10.0 * cfg.tol_fp,
    })
}
