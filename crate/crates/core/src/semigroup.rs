//! Discrete implicit Lax–Oleinik operators.
//!
//! One backward step solves, at every node `x`,
//!
//! ```text
//! v(x) = min_y [ u(y) + dt·L(x, v(x), (x − y)/dt) ]
//! ```
//!
//! and one forward step solves the `max` / `−dt·L` mirror image. For the
//! mechanical Lagrangians of [`crate::model`] the velocity enters only through
//! `½|v|²`, so the optimisation over `y` is an inf-convolution of `u` with the
//! quadratic kernel `|x − y|²/(2dt)`, computed once per node, and the implicit
//! dependence on `v(x)` is left to a scalar contraction solve.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{is_unreachable, GridFunction, TorusGrid, INF};
use crate::model::ContactModel;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiConfig {
    pub dt: f64,
    /// Per-node fixed-point tolerance on `|m(v) − v|`.
    pub tol_fp: f64,
    pub max_fp: usize,
    /// Search radius in cells per axis; 0 means every node is a candidate.
    pub radius: usize,
}

impl Default for SemiConfig {
    fn default() -> Self {
        SemiConfig { dt: 0.005, tol_fp: 1e-12, max_fp: 200, radius: 0 }
    }
}

impl SemiConfig {
    pub fn new(dt: f64, tol_fp: f64, max_fp: usize, radius: usize) -> Result<Self> {
        let cfg = SemiConfig { dt, tol_fp, max_fp, radius };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_dt(dt: f64) -> Result<Self> {
        Self::new(dt, 1e-12, 200, 0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.tol_fp > 0.0 && self.tol_fp <= 1e-6) {
            return Err(Error::InvalidConfig(format!(
                "tol_fp must lie in (0, 1e-6], got {}",
                self.tol_fp
            )));
        }
        if self.max_fp < 20 {
            return Err(Error::InvalidConfig(format!("max_fp must be at least 20, got {}", self.max_fp)));
        }
        Ok(())
    }

    /// Contraction guard `λ·dt ≤ ½` for the nodal solve.
    pub fn check(&self, m: &ContactModel) -> Result<()> {
        self.validate()?;
        if m.lambda() * self.dt > 0.5 {
            return Err(Error::InvalidConfig(format!(
                "lambda*dt = {} exceeds 1/2",
                m.lambda() * self.dt
            )));
        }
        Ok(())
    }

    /// Number of steps covering `t`, which must be a positive multiple of `dt`.
    pub fn steps_for(&self, t: f64) -> Result<usize> {
        let n = (t / self.dt).round();
        if !(n >= 1.0) || (n * self.dt - t).abs() > 1e-9 * t.abs().max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "t = {t} is not a positive multiple of dt = {}",
                self.dt
            )));
        }
        Ok(n as usize)
    }
}

/// Iterates `v ← map(v)` from `guess` until successive iterates differ by at
/// most `tol_fp` (scaled by `|v|` once `|v| > 1`, where absolute accuracy
/// below one ulp is unattainable).
pub fn nodal_implicit_solve(map: impl Fn(f64) -> f64, guess: f64, cfg: &SemiConfig) -> Result<f64> {
    let mut v = guess;
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_fp {
        let next = map(v);
        residual = (next - v).abs();
        if residual <= cfg.tol_fp * next.abs().max(1.0) {
            return Ok(next);
        }
        v = next;
    }
    Err(Error::NonContraction { iterations: cfg.max_fp, residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `T⁻`: inf over past paths.
    Backward,
    /// `T⁺`: sup over future paths.
    Forward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sense {
    Min,
    Max,
}

impl Sense {
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Min => a < b,
            Sense::Max => a > b,
        }
    }

    fn unreachable(self) -> f64 {
        match self {
            Sense::Min => INF,
            Sense::Max => -INF,
        }
    }

    /// Signed kinetic contribution: `+cost` for inf, `−cost` for sup.
    fn signed(self, cost: f64) -> f64 {
        match self {
            Sense::Min => cost,
            Sense::Max => -cost,
        }
    }
}

/// Candidate offsets along one axis with their kinetic cost `(k·dx)²/(2dt)`.
fn axis_kernel(grid: &TorusGrid, dt: f64, radius: usize) -> Vec<(i64, f64)> {
    let n = grid.n() as i64;
    let (lo, hi) = if radius == 0 || 2 * radius as i64 + 1 >= n {
        (-(n / 2), n - n / 2 - 1)
    } else {
        (-(radius as i64), radius as i64)
    };
    let dx = grid.dx();
    (lo..=hi)
        .map(|k| {
            let d = k as f64 * dx;
            (k, d * d / (2.0 * dt))
        })
        .collect()
}

/// `opt_k [ line[(j + k) mod n] ± cost(k) ]`, skipping sentinel entries.
fn envelope_point(line: &[f64], kernel: &[(i64, f64)], sense: Sense, j: usize) -> f64 {
    let n = line.len() as i64;
    let mut best = sense.unreachable();
    let mut found = false;
    for &(k, cost) in kernel {
        let val = line[(j as i64 + k).rem_euclid(n) as usize];
        if is_unreachable(val) {
            continue;
        }
        let cand = val + sense.signed(cost);
        if !found || sense.better(cand, best) {
            best = cand;
            found = true;
        }
    }
    best
}

fn envelope_line(line: &[f64], kernel: &[(i64, f64)], sense: Sense, out: &mut [f64]) {
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = envelope_point(line, kernel, sense, j);
    }
}

/// `opt_y [ u(y) ± |x − y|²/(2dt) ]` at every node, sentinels skipped.
///
/// The quadratic kernel splits across axes, so two dimensions are handled as
/// two passes of 1-D envelopes.
fn envelope(u: &GridFunction, dt: f64, radius: usize, sense: Sense) -> Vec<f64> {
    let grid = *u.grid();
    let n = grid.n();
    let kernel = axis_kernel(&grid, dt, radius);
    match grid.dim() {
        1 => (0..n)
            .into_par_iter()
            .map(|j| envelope_point(u.values(), &kernel, sense, j))
            .collect(),
        _ => {
            // pass along the second axis (contiguous rows)
            let mut rows = vec![0.0; n * n];
            rows.par_chunks_mut(n)
                .zip(u.values().par_chunks(n))
                .for_each(|(out, line)| envelope_line(line, &kernel, sense, out));
            // pass along the first axis, column by column
            let columns: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map(|j1| {
                    let line: Vec<f64> = (0..n).map(|i0| rows[i0 * n + j1]).collect();
                    let mut out = vec![0.0; n];
                    envelope_line(&line, &kernel, sense, &mut out);
                    out
                })
                .collect();
            let mut out = vec![0.0; n * n];
            for (j1, col) in columns.iter().enumerate() {
                for (i0, &v) in col.iter().enumerate() {
                    out[i0 * n + j1] = v;
                }
            }
            out
        }
    }
}

fn check_inputs(u: &GridFunction, m: &ContactModel, cfg: &SemiConfig) -> Result<()> {
    cfg.check(m)?;
    if u.grid().dim() != m.dim() {
        return Err(Error::InvalidConfig(format!(
            "grid dimension {} does not match model dimension {}",
            u.grid().dim(),
            m.dim()
        )));
    }
    if u.min_finite().is_none() {
        return Err(Error::AllUnreachable { node: 0 });
    }
    check_radius(u, m, cfg)
}

/// A finite radius must admit speeds up to `4·(1 + max|V| + max|u|)^½`.
fn check_radius(u: &GridFunction, m: &ContactModel, cfg: &SemiConfig) -> Result<()> {
    if cfg.radius == 0 {
        return Ok(());
    }
    let speed_cap = cfg.radius as f64 * u.grid().dx() / cfg.dt;
    let needed = 4.0 * (1.0 + m.potential_bound() + u.sup_norm()).sqrt();
    if speed_cap < needed {
        return Err(Error::InvalidConfig(format!(
            "radius {} allows speed {speed_cap:.3} < required {needed:.3}",
            cfg.radius
        )));
    }
    Ok(())
}

fn implicit_step(u: &GridFunction, m: &ContactModel, cfg: &SemiConfig, dir: Direction) -> Result<GridFunction> {
    check_inputs(u, m, cfg)?;
    let grid = *u.grid();
    let dim = grid.dim();
    let (sense, fallback, sign) = match dir {
        Direction::Backward => (Sense::Min, u.min_finite().unwrap(), 1.0),
        Direction::Forward => (Sense::Max, u.max_finite().unwrap(), -1.0),
    };
    let env = envelope(u, cfg.dt, cfg.radius, sense);
    let values = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let base = env[idx];
            if is_unreachable(base) {
                return Err(Error::AllUnreachable { node: idx });
            }
            let x = grid.coords(idx);
            let guess = if is_unreachable(u.get(idx)) { fallback } else { u.get(idx) };
            nodal_implicit_solve(
                |v| base + sign * cfg.dt * m.lagrangian_at_rest(&x[..dim], v),
                guess,
                cfg,
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    GridFunction::new(grid, values)
}

/// One step of the backward semigroup `T⁻_dt`.
pub fn step_backward(u: &GridFunction, m: &ContactModel, cfg: &SemiConfig) -> Result<GridFunction> {
    implicit_step(u, m, cfg, Direction::Backward)
}

/// One step of the forward semigroup `T⁺_dt`.
pub fn step_forward(u: &GridFunction, m: &ContactModel, cfg: &SemiConfig) -> Result<GridFunction> {
    implicit_step(u, m, cfg, Direction::Forward)
}

pub fn step(u: &GridFunction, m: &ContactModel, cfg: &SemiConfig, dir: Direction) -> Result<GridFunction> {
    implicit_step(u, m, cfg, dir)
}

/// Forward-type step that exactly inverts the per-path recursion of
/// [`step_backward`]: the Lagrangian is evaluated at the candidate node and at
/// its known value, so no implicit solve is needed.
///
/// Evolving a negative spike with this step produces the backward implicit
/// action function; it is the discrete mirror of [`action_forward`].
pub fn step_forward_mirror(u: &GridFunction, m: &ContactModel, cfg: &SemiConfig) -> Result<GridFunction> {
    check_inputs(u, m, cfg)?;
    let grid = *u.grid();
    let dim = grid.dim();
    let shifted: Vec<f64> = (0..grid.len())
        .map(|idx| {
            let val = u.get(idx);
            if is_unreachable(val) {
                val
            } else {
                val - cfg.dt * m.lagrangian_at_rest(&grid.coords(idx)[..dim], val)
            }
        })
        .collect();
    let shifted = GridFunction::new(grid, shifted)?;
    let env = envelope(&shifted, cfg.dt, cfg.radius, Sense::Max);
    if let Some(node) = env.iter().position(|&v| is_unreachable(v)) {
        return Err(Error::AllUnreachable { node });
    }
    GridFunction::new(grid, env)
}

/// `T̄⁻_dt` for a decreasing Hamiltonian, computed directly.
pub fn step_backward_dual(u: &GridFunction, m: &ContactModel, cfg: &SemiConfig) -> Result<GridFunction> {
    if m.sign() != crate::model::Monotonicity::Decreasing {
        return Err(Error::SignMismatch { expected: "decreasing" });
    }
    step_backward(u, m, cfg)
}

/// Both routes to `T̄⁻_dt u`: the direct step and `−T⁺_dt(−u)` under the
/// dual (increasing) model.
pub fn dual_routes(u: &GridFunction, m: &ContactModel, cfg: &SemiConfig) -> Result<(GridFunction, GridFunction)> {
    let direct = step_backward_dual(u, m, cfg)?;
    let via_dual = step_forward(&u.map(|v| -v), &m.dualize(), cfg)?.map(|v| -v);
    Ok((direct, via_dual))
}

/// Snapshots of an evolution.
#[derive(Clone, Debug)]
pub struct EvolveRecord {
    pub times: Vec<f64>,
    pub snapshots: Vec<GridFunction>,
    pub sup_norms: Vec<f64>,
}

impl EvolveRecord {
    pub fn last(&self) -> &GridFunction {
        self.snapshots.last().expect("record holds the initial snapshot")
    }
}

/// Applies `t/dt` steps in `dir`, keeping the initial data, every `stride`-th
/// iterate and the final one.
pub fn evolve(
    u: &GridFunction,
    m: &ContactModel,
    cfg: &SemiConfig,
    t: f64,
    dir: Direction,
    stride: usize,
) -> Result<EvolveRecord> {
    evolve_with(u, cfg, t, stride, |w| step(w, m, cfg, dir))
}

fn evolve_with(
    u: &GridFunction,
    cfg: &SemiConfig,
    t: f64,
    stride: usize,
    mut one_step: impl FnMut(&GridFunction) -> Result<GridFunction>,
) -> Result<EvolveRecord> {
    let steps = cfg.steps_for(t)?;
    let stride = stride.max(1);
    let mut record = EvolveRecord {
        times: vec![0.0],
        snapshots: vec![u.clone()],
        sup_norms: vec![u.sup_norm()],
    };
    let mut current = u.clone();
    for k in 1..=steps {
        current = one_step(&current)?;
        if k % stride == 0 || k == steps {
            record.times.push(k as f64 * cfg.dt);
            record.sup_norms.push(current.sup_norm());
            record.snapshots.push(current.clone());
        }
    }
    Ok(record)
}

/// Final state of `t/dt` steps without keeping snapshots.
pub fn evolve_final(u: &GridFunction, m: &ContactModel, cfg: &SemiConfig, t: f64, dir: Direction) -> Result<GridFunction> {
    let steps = cfg.steps_for(t)?;
    let mut current = u.clone();
    for _ in 0..steps {
        current = step(&current, m, cfg, dir)?;
    }
    Ok(current)
}

/// Forward implicit action function `h_{x0,u0}(·, t)`.
pub fn action_forward(
    grid: TorusGrid,
    x0: usize,
    u0: f64,
    m: &ContactModel,
    cfg: &SemiConfig,
    t: f64,
) -> Result<GridFunction> {
    evolve_final(&GridFunction::spike(grid, x0, u0, INF), m, cfg, t, Direction::Backward)
}

/// Backward implicit action function `h^{x0,u0}(·, t)`.
pub fn action_backward(
    grid: TorusGrid,
    x0: usize,
    u0: f64,
    m: &ContactModel,
    cfg: &SemiConfig,
    t: f64,
) -> Result<GridFunction> {
    let steps = cfg.steps_for(t)?;
    let mut current = GridFunction::spike(grid, x0, u0, -INF);
    for _ in 0..steps {
        current = step_forward_mirror(&current, m, cfg)?;
    }
    Ok(current)
}

/// Snapshots of `h^{x0,u0}(·, τ)` for τ on the `dt` lattice.
pub fn action_backward_record(
    grid: TorusGrid,
    x0: usize,
    u0: f64,
    m: &ContactModel,
    cfg: &SemiConfig,
    t: f64,
    stride: usize,
) -> Result<EvolveRecord> {
    let spike = GridFunction::spike(grid, x0, u0, -INF);
    evolve_with(&spike, cfg, t, stride, |w| step_forward_mirror(w, m, cfg))
}

/// Snapshots of `h_{x0,u0}(·, τ)` for τ on the `dt` lattice.
pub fn action_forward_record(
    grid: TorusGrid,
    x0: usize,
    u0: f64,
    m: &ContactModel,
    cfg: &SemiConfig,
    t: f64,
    stride: usize,
) -> Result<EvolveRecord> {
    let spike = GridFunction::spike(grid, x0, u0, INF);
    evolve(&spike, m, cfg, t, Direction::Backward, stride)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sup_diff;
    use crate::model::{CosineTerm, Monotonicity};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::new(1, n).unwrap()
    }

    fn cfg(dt: f64) -> SemiConfig {
        SemiConfig::with_dt(dt).unwrap()
    }

    fn random_fn(g: TorusGrid, rng: &mut ChaCha8Rng) -> GridFunction {
        GridFunction::new(g, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    fn cos_model(sign: Monotonicity) -> ContactModel {
        ContactModel::new(1, 1.0, sign, vec![CosineTerm { axis: 0, k: 1, c: 0.3 }]).unwrap()
    }

    #[test]
    fn nodal_solve_closed_forms() {
        let c = SemiConfig::default();
        let v = nodal_implicit_solve(|v| 1.0 - 0.1 * v, 0.0, &c).unwrap();
        assert!((v - 1.0 / 1.1).abs() < 1e-12);
        assert_eq!(nodal_implicit_solve(|_| 0.5, 0.0, &c).unwrap(), 0.5);
        assert!(matches!(
            nodal_implicit_solve(|v| v + 1.0, 0.0, &c),
            Err(Error::NonContraction { iterations: 200, .. })
        ));
    }

    #[test]
    fn config_guards() {
        assert!(SemiConfig::new(0.1, 1e-12, 200, 0).is_ok());
        assert!(SemiConfig::new(0.1, 1e-5, 200, 0).is_err());
        assert!(SemiConfig::new(0.1, 1e-12, 10, 0).is_err());
        assert!(SemiConfig::new(-0.1, 1e-12, 200, 0).is_err());
        // λ·dt = 1 would make the nodal map non-contractive
        let m = ContactModel::free(1, 1.0, Monotonicity::Increasing).unwrap();
        let u = GridFunction::constant(grid(8), 1.0);
        assert!(matches!(step_backward(&u, &m, &cfg(1.0)), Err(Error::InvalidConfig(_))));
        assert!(cfg(0.1).steps_for(0.35).is_err());
        assert_eq!(cfg(0.1).steps_for(1.0).unwrap(), 10);
    }

    #[test]
    fn constant_data_closed_forms() {
        let m = ContactModel::example_well();
        let g = grid(16);
        let zero = GridFunction::constant(g, 0.0);
        assert_eq!(step_backward(&zero, &m, &cfg(0.1)).unwrap(), zero);
        assert_eq!(step_forward(&zero, &m, &cfg(0.1)).unwrap(), zero);

        let one = GridFunction::constant(g, 1.0);
        let back = step_backward(&one, &m, &cfg(0.1)).unwrap();
        assert!(back.values().iter().all(|v| (v - 1.0 / 1.1).abs() < 1e-12));
        let fwd = step_forward(&one, &m, &cfg(0.1)).unwrap();
        assert!(fwd.values().iter().all(|v| (v - 1.0 / 0.9).abs() < 1e-12));
    }

    #[test]
    fn well_is_nearly_forward_invariant() {
        let g = grid(256);
        let m = ContactModel::example_well();
        let c = cfg(0.002);
        let w = GridFunction::well(g);
        let res = sup_diff(&step_forward(&w, &m, &c).unwrap(), &w).unwrap();
        let constant = res / (g.dx() + c.dt);
        assert!(constant < 1.0, "C = {constant}");
    }

    #[test]
    fn evolve_constant_backward() {
        let m = ContactModel::example_well();
        let one = GridFunction::constant(grid(8), 1.0);
        let rec = evolve(&one, &m, &cfg(0.1), 1.0, Direction::Backward, 1).unwrap();
        assert_eq!(rec.times.len(), 11);
        let expected = (1.0f64 / 1.1).powi(10);
        assert!(rec.last().values().iter().all(|v| (v - expected).abs() < 1e-12));
        assert!(rec.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn evolve_composes() {
        let m = cos_model(Monotonicity::Increasing);
        let c = cfg(0.01);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_fn(grid(32), &mut rng);
        for dir in [Direction::Backward, Direction::Forward] {
            let whole = evolve_final(&u, &m, &c, 0.05, dir).unwrap();
            let half = evolve_final(&u, &m, &c, 0.02, dir).unwrap();
            let split = evolve_final(&half, &m, &c, 0.03, dir).unwrap();
            assert!(sup_diff(&whole, &split).unwrap() <= 10.0 * c.tol_fp);
        }
        let zero = GridFunction::constant(grid(32), 0.0);
        let fwd = evolve_final(&zero, &ContactModel::example_well(), &c, 0.1, Direction::Forward).unwrap();
        assert_eq!(fwd, zero);
    }

    #[test]
    fn action_rest_path_values() {
        let g = grid(16);
        let m = ContactModel::example_well();
        let c = cfg(0.1);
        let h = action_forward(g, 3, 1.0, &m, &c, 0.1).unwrap();
        assert!((h.get(3) - 1.0 / 1.1).abs() < 1e-12);
        assert!(h.first_sentinel().is_none());
        // the mirror scheme inverts the rest-path recursion exactly
        let hb = action_backward(g, 3, 1.0, &m, &c, 0.1).unwrap();
        assert!((hb.get(3) - 1.1).abs() < 1e-12);
        assert!(hb.first_sentinel().is_none());
    }

    #[test]
    fn action_is_monotone_in_initial_value() {
        let g = grid(16);
        let m = cos_model(Monotonicity::Increasing);
        let c = cfg(0.05);
        for steps in 1..=4 {
            let t = steps as f64 * c.dt;
            let lo = action_forward(g, 5, 0.0, &m, &c, t).unwrap();
            let hi = action_forward(g, 5, 1.0, &m, &c, t).unwrap();
            assert!(lo.values().iter().zip(hi.values()).all(|(a, b)| a < b));
            let lo = action_backward(g, 5, 0.0, &m, &c, t).unwrap();
            let hi = action_backward(g, 5, 1.0, &m, &c, t).unwrap();
            assert!(lo.values().iter().zip(hi.values()).all(|(a, b)| a < b));
        }
    }

    #[test]
    fn action_markov_property() {
        let g = grid(16);
        let m = cos_model(Monotonicity::Increasing);
        let c = cfg(0.05);
        let whole = action_forward(g, 2, 0.4, &m, &c, 0.25).unwrap();
        let first = action_forward(g, 2, 0.4, &m, &c, 0.1).unwrap();
        let rest = evolve_final(&first, &m, &c, 0.15, Direction::Backward).unwrap();
        assert!(sup_diff(&whole, &rest).unwrap() <= 10.0 * c.tol_fp);
    }

    #[test]
    fn dual_constant_closed_form() {
        let m = ContactModel::free(1, 1.0, Monotonicity::Decreasing).unwrap();
        let c = cfg(0.1);
        let one = GridFunction::constant(grid(8), 1.0);
        let (direct, via) = dual_routes(&one, &m, &c).unwrap();
        assert!(direct.values().iter().all(|v| (v - 1.0 / 0.9).abs() < 1e-12));
        assert!(sup_diff(&direct, &via).unwrap() <= 10.0 * c.tol_fp);
        let zero = GridFunction::constant(grid(8), 0.0);
        let (a, b) = dual_routes(&zero, &m, &c).unwrap();
        assert_eq!(a, zero);
        assert_eq!(b, zero);
        assert!(matches!(
            step_backward_dual(&one, &ContactModel::example_well(), &c),
            Err(Error::SignMismatch { .. })
        ));
    }

    #[test]
    fn dual_routes_agree_on_random_data() {
        let m = cos_model(Monotonicity::Decreasing);
        let c = SemiConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let u = random_fn(grid(64), &mut rng);
            let (a, b) = dual_routes(&u, &m, &c).unwrap();
            assert!(sup_diff(&a, &b).unwrap() <= 10.0 * c.tol_fp);
        }
    }

    #[test]
    fn separable_envelope_matches_brute_force_in_2d() {
        let g = TorusGrid::new(2, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = GridFunction::new(g, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let dt = 0.03;
        for sense in [Sense::Min, Sense::Max] {
            let env = envelope(&u, dt, 0, sense);
            for (x, &got) in env.iter().enumerate() {
                let xc = g.coords(x);
                let mut best = sense.unreachable();
                for y in 0..g.len() {
                    let d = crate::grid::min_displacement(&g.coords(y)[..2], &xc[..2]);
                    let cand = u.get(y) + sense.signed((d[0] * d[0] + d[1] * d[1]) / (2.0 * dt));
                    if sense.better(cand, best) {
                        best = cand;
                    }
                }
                assert!((got - best).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn radius_guard_and_window() {
        let m = ContactModel::example_well();
        let g = grid(64);
        let u = GridFunction::constant(g, 0.5);
        let tight = SemiConfig::new(0.01, 1e-12, 200, 2).unwrap();
        assert!(matches!(step_backward(&u, &m, &tight), Err(Error::InvalidConfig(_))));
        // speed cap 10·(1/64)/0.01 ≈ 15.6 covers 4·sqrt(1.5) ≈ 4.9
        let wide = SemiConfig::new(0.01, 1e-12, 200, 10).unwrap();
        let global = SemiConfig::new(0.01, 1e-12, 200, 0).unwrap();
        let a = step_backward(&u, &m, &wide).unwrap();
        let b = step_backward(&u, &m, &global).unwrap();
        assert!(sup_diff(&a, &b).unwrap() < 1e-14);
    }

    #[test]
    fn spike_with_all_unreachable_is_rejected() {
        let m = ContactModel::example_well();
        let u = GridFunction::constant(grid(8), INF);
        assert!(matches!(step_backward(&u, &m, &cfg(0.1)), Err(Error::AllUnreachable { .. })));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
            (
                proptest::collection::vec(-1.0f64..1.0, 16),
                proptest::collection::vec(0.001f64..0.5, 16),
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn operators_are_monotone((base, bump) in pair()) {
                let g = grid(16);
                let m = cos_model(Monotonicity::Increasing);
                let c = cfg(0.02);
                let u = GridFunction::new(g, base.clone()).unwrap();
                let w = GridFunction::new(g, base.iter().zip(&bump).map(|(a, b)| a + b).collect()).unwrap();
                for dir in [Direction::Backward, Direction::Forward] {
                    let tu = step(&u, &m, &c, dir).unwrap();
                    let tw = step(&w, &m, &c, dir).unwrap();
                    prop_assert!(tu.values().iter().zip(tw.values()).all(|(a, b)| a <= b));
                }
            }

            #[test]
            fn lipschitz_bounds((a, b) in pair()) {
                let g = grid(16);
                let m = cos_model(Monotonicity::Increasing);
                let c = cfg(0.02);
                let u = GridFunction::new(g, a).unwrap();
                let w = GridFunction::new(g, b).unwrap();
                let before = sup_diff(&u, &w).unwrap();
                let back = sup_diff(&step_backward(&u, &m, &c).unwrap(), &step_backward(&w, &m, &c).unwrap()).unwrap();
                prop_assert!(back <= before * (1.0 + 1e-12));
                let fwd = sup_diff(&step_forward(&u, &m, &c).unwrap(), &step_forward(&w, &m, &c).unwrap()).unwrap();
                prop_assert!(fwd <= before / (1.0 - m.lambda() * c.dt) * (1.0 + 1e-12));
            }
        }
    }
}
