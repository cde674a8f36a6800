//! Contact characteristic flow and orbits lifted from grid solutions.
//!
//! The system is `ẋ = H_p`, `u̇ = p·H_p − H`, `ṗ = −H_x − H_u p`, integrated
//! with classical fixed-step RK4. For the builtin family `Ḣ = −σλH`, so
//! `H(t) = H(0)e^{−σλt}` gives an exact check of the integrator.

use crate::error::{Error, Result};
use crate::grid::{BoolMask, GridFunction, TorusGrid};
use crate::model::{wrap_unit, ContactModel, PhasePoint, MAX_DIM};

/// Default RK4 step.
pub const DEFAULT_H_ODE: f64 = 1e-3;
/// Slope jump above which a node counts as a kink for [`lift`].
pub const KINK_KAPPA: f64 = 0.25;
const MAX_STEPS: f64 = 1e7;
const BLOWUP: f64 = 1e8;

/// Time derivative of a phase point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseRate {
    pub dx: [f64; MAX_DIM],
    pub du: f64,
    pub dp: [f64; MAX_DIM],
}

pub fn contact_rhs(m: &ContactModel, s: &PhasePoint) -> PhaseRate {
    let dim = m.dim();
    let h = m.eval_h(s);
    let grad_v = m.potential_gradient(s.x());
    let hu = m.du_coefficient();
    let mut dx = [0.0; MAX_DIM];
    let mut dp = [0.0; MAX_DIM];
    let mut p_hp = 0.0;
    for i in 0..dim {
        dx[i] = s.p[i];
        p_hp += s.p[i] * s.p[i];
        dp[i] = -grad_v[i] - hu * s.p[i];
    }
    PhaseRate { dx, du: p_hp - h, dp }
}

/// An integrated orbit sampled at every RK4 step.
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    pub h_values: Vec<f64>,
    /// Mean position over the trailing 10% of the orbit.
    pub window_mean: [f64; MAX_DIM],
    /// Largest distance from the trailing window to the mask, if one was given.
    pub distance_to_mask: Option<f64>,
    /// Largest `|u(t) − w(x(t))|` against the lifted grid function, if any.
    pub graph_gap: Option<f64>,
    /// Same gap restricted to the trailing window.
    pub trailing_graph_gap: Option<f64>,
}

impl OrbitRecord {
    pub fn last(&self) -> &PhasePoint {
        self.states.last().expect("orbit holds its initial state")
    }

    pub fn sup_abs_h(&self) -> f64 {
        self.h_values.iter().fold(0.0, |a: f64, h| a.max(h.abs()))
    }

    fn window_start(&self) -> usize {
        let n = self.states.len();
        n - (n / 10).max(1)
    }

    fn summarize(&mut self, mask: Option<&BoolMask>, graph: Option<&GridFunction>) {
        let dim = self.states[0].dim;
        let start = self.window_start();
        let window = &self.states[start..];
        let mut mean = [0.0; MAX_DIM];
        for (axis, slot) in mean.iter_mut().enumerate().take(dim) {
            // circular mean so windows straddling 0 ≡ 1 average correctly
            let (s, c) = window.iter().fold((0.0, 0.0), |(s, c), st| {
                let a = std::f64::consts::TAU * st.x[axis];
                (s + a.sin(), c + a.cos())
            });
            *slot = wrap_unit(s.atan2(c) / std::f64::consts::TAU);
        }
        self.window_mean = mean;
        self.distance_to_mask = mask.and_then(|mk| {
            window
                .iter()
                .map(|st| mk.distance_to(st.x()))
                .try_fold(0.0_f64, |acc, d| d.map(|d| acc.max(d)))
        });
        if let Some(w) = graph {
            let gap = |st: &PhasePoint| (st.u - w.interpolate(st.x())).abs();
            self.graph_gap = Some(self.states.iter().map(gap).fold(0.0, f64::max));
            self.trailing_graph_gap = Some(window.iter().map(gap).fold(0.0, f64::max));
        }
    }
}

fn advance(s: &PhasePoint, k: &PhaseRate, h: f64) -> PhasePoint {
    let mut out = *s;
    for i in 0..s.dim {
        out.x[i] += h * k.dx[i];
        out.p[i] += h * k.dp[i];
    }
    out.u += h * k.du;
    out
}

fn rk4_step(m: &ContactModel, s: &PhasePoint, h: f64) -> PhasePoint {
    let k1 = contact_rhs(m, s);
    let k2 = contact_rhs(m, &advance(s, &k1, h / 2.0));
    let k3 = contact_rhs(m, &advance(s, &k2, h / 2.0));
    let k4 = contact_rhs(m, &advance(s, &k3, h));
    let mut out = *s;
    for i in 0..s.dim {
        out.x[i] = wrap_unit(s.x[i] + h / 6.0 * (k1.dx[i] + 2.0 * k2.dx[i] + 2.0 * k3.dx[i] + k4.dx[i]));
        out.p[i] += h / 6.0 * (k1.dp[i] + 2.0 * k2.dp[i] + 2.0 * k3.dp[i] + k4.dp[i]);
    }
    out.u += h / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
    out
}

/// RK4 from `s0` over time `t` (negative runs the flow backwards). The step
/// is `t / ceil(|t| / h_ode)` so the orbit ends exactly at `t`.
pub fn integrate(m: &ContactModel, s0: &PhasePoint, t: f64, h_ode: f64) -> Result<OrbitRecord> {
    if s0.dim != m.dim() {
        return Err(Error::InvalidConfig("phase point and model dimensions differ".into()));
    }
    if !(h_ode > 0.0) || !t.is_finite() {
        return Err(Error::InvalidConfig("integration needs finite t and h_ode > 0".into()));
    }
    let ratio = t.abs() / h_ode;
    if ratio > MAX_STEPS {
        return Err(Error::InvalidConfig(format!("{ratio:.3e} RK4 steps exceed the limit")));
    }
    let steps = (ratio - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { 0.0 } else { t / steps as f64 };
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut h_values = Vec::with_capacity(steps + 1);
    let mut s = *s0;
    for i in 0..s.dim {
        s.x[i] = wrap_unit(s.x[i]);
    }
    times.push(0.0);
    h_values.push(m.eval_h(&s));
    states.push(s);
    for k in 1..=steps {
        s = rk4_step(m, &s, h);
        let tk = k as f64 * h;
        let big = s.u.abs() > BLOWUP || s.p[..s.dim].iter().any(|p| p.abs() > BLOWUP);
        if big || !s.u.is_finite() {
            return Err(Error::Blowup { t: tk });
        }
        times.push(tk);
        h_values.push(m.eval_h(&s));
        states.push(s);
    }
    let mut rec = OrbitRecord {
        times,
        states,
        h_values,
        window_mean: [0.0; MAX_DIM],
        distance_to_mask: None,
        graph_gap: None,
        trailing_graph_gap: None,
    };
    rec.summarize(None, None);
    Ok(rec)
}

/// `(x, u(x), Du(x))` at a node, refusing kinks.
pub fn lift(u: &GridFunction, node: usize, m: &ContactModel) -> Result<PhasePoint> {
    let grid: &TorusGrid = u.grid();
    if grid.dim() != m.dim() {
        return Err(Error::GridMismatch);
    }
    if node >= grid.len() {
        return Err(Error::InvalidConfig(format!("node {node} out of range")));
    }
    if u.kink_mask(KINK_KAPPA).get(node) {
        return Err(Error::KinkNode { node });
    }
    let grad = u.gradient_central()?.at(node);
    let dim = grid.dim();
    Ok(PhasePoint::new(&grid.coords(node)[..dim], u.get(node), &grad[..dim]))
}

fn orbit_on_graph(
    w: &GridFunction,
    x0: usize,
    m: &ContactModel,
    t: f64,
    mask: &BoolMask,
    h_ode: f64,
) -> Result<OrbitRecord> {
    if mask.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    let s0 = lift(w, x0, m)?;
    let mut rec = integrate(m, &s0, t, h_ode)?;
    rec.summarize(Some(mask), Some(w));
    Ok(rec)
}

/// Orbit lifted from `u₋` at `x0` and run backwards for time `t`.
pub fn calibrated_backward_orbit(
    u_minus: &GridFunction,
    x0: usize,
    m: &ContactModel,
    t: f64,
    mask: &BoolMask,
    h_ode: f64,
) -> Result<OrbitRecord> {
    orbit_on_graph(u_minus, x0, m, -t.abs(), mask, h_ode)
}

/// Orbit lifted from a forward solution at `x0` and run forwards for time `t`.
pub fn forward_orbit_to_omega(
    v_plus: &GridFunction,
    x0: usize,
    m: &ContactModel,
    t: f64,
    mask: &BoolMask,
    h_ode: f64,
) -> Result<OrbitRecord> {
    orbit_on_graph(v_plus, x0, m, t.abs(), mask, h_ode)
}
