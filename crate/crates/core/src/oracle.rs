//! Exhaustive path enumeration for implicit action functions on tiny grids.
//!
//! Every node path of `n` steps is walked with the same per-step equation as
//! the dynamic-programming semigroup, but the optimisation over paths is done
//! by brute force and the Lagrangian is evaluated directly through
//! [`ContactModel::eval_l`]. Agreement with the semigroup therefore checks the
//! Bellman structure of the discrete operators.

use crate::error::{Error, Result};
use crate::grid::{min_displacement, GridFunction, TorusGrid};
use crate::model::{ContactModel, VelocityPoint};

const MAX_PATHS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct PathEnumSpec {
    pub grid: TorusGrid,
    pub steps: usize,
    pub dt: f64,
    pub model: ContactModel,
    /// Pinned node and value.
    pub x0: usize,
    pub u0: f64,
}

impl PathEnumSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.dim() != 1 || self.grid.n() > 10 {
            return Err(Error::InvalidConfig("oracle needs a 1-D grid with at most 10 nodes".into()));
        }
        if self.model.dim() != 1 {
            return Err(Error::InvalidConfig("oracle needs a 1-D model".into()));
        }
        if self.steps == 0 || self.steps > 4 {
            return Err(Error::InvalidConfig(format!("oracle supports 1..=4 steps, got {}", self.steps)));
        }
        if self.path_count() > MAX_PATHS {
            return Err(Error::InvalidConfig(format!("{} paths exceed the limit", self.path_count())));
        }
        if !(self.dt > 0.0) || self.model.lambda() * self.dt > 0.5 {
            return Err(Error::InvalidConfig("oracle needs dt > 0 and lambda*dt <= 1/2".into()));
        }
        if self.x0 >= self.grid.len() {
            return Err(Error::InvalidConfig(format!("pinned node {} out of range", self.x0)));
        }
        Ok(())
    }

    pub fn path_count(&self) -> usize {
        self.grid.n().saturating_pow(self.steps as u32)
    }

    fn lagrangian(&self, at: usize, u: f64, from: usize, to: usize) -> f64 {
        let a = self.grid.coords(from);
        let b = self.grid.coords(to);
        let d = min_displacement(&a[..1], &b[..1]);
        let x = self.grid.coords(at);
        self.model.eval_l(&VelocityPoint::new(&x[..1], u, &[d[0] / self.dt]))
    }

    /// Free nodes of path number `index`, least significant step last.
    fn free_nodes(&self, mut index: usize) -> Vec<usize> {
        let n = self.grid.n();
        let mut nodes = vec![0; self.steps];
        for slot in nodes.iter_mut().rev() {
            *slot = index % n;
            index /= n;
        }
        nodes
    }
}

/// Solves `v = prev + dt·L(at, v, vel)` by plain contraction iteration.
fn implicit_increment(spec: &PathEnumSpec, prev: f64, at: usize, from: usize, to: usize) -> Result<f64> {
    let mut v = prev;
    for _ in 0..1000 {
        let next = prev + spec.dt * spec.lagrangian(at, v, from, to);
        if (next - v).abs() <= 1e-13 * next.abs().max(1.0) {
            return Ok(next);
        }
        v = next;
    }
    Err(Error::NonContraction { iterations: 1000, residual: f64::NAN })
}

/// `h_{x0,u0}(·, n·dt)` as the minimum over all node paths starting at `x0`.
pub fn enumerate_action_forward(spec: &PathEnumSpec) -> Result<GridFunction> {
    spec.validate()?;
    let mut best = vec![f64::INFINITY; spec.grid.len()];
    for index in 0..spec.path_count() {
        let path = spec.free_nodes(index);
        let mut u = spec.u0;
        let mut prev = spec.x0;
        for &next in &path {
            u = implicit_increment(spec, u, next, prev, next)?;
            prev = next;
        }
        // strict comparison keeps the lowest path index on ties
        if u < best[prev] {
            best[prev] = u;
        }
    }
    GridFunction::new(spec.grid, best)
}

/// `h^{x0,u0}(·, n·dt)` as the maximum over all node paths ending at `x0`,
/// walked backwards with the exact inverse of the forward per-step map.
pub fn enumerate_action_backward(spec: &PathEnumSpec) -> Result<GridFunction> {
    spec.validate()?;
    let mut best = vec![f64::NEG_INFINITY; spec.grid.len()];
    for index in 0..spec.path_count() {
        // path y_0 (free start), …, y_{n−1}, then the pinned y_n = x0
        let mut nodes = spec.free_nodes(index);
        nodes.push(spec.x0);
        let mut u = spec.u0;
        for k in (0..spec.steps).rev() {
            let (from, to) = (nodes[k], nodes[k + 1]);
            u -= spec.dt * spec.lagrangian(to, u, from, to);
        }
        let start = nodes[0];
        if u > best[start] {
            best[start] = u;
        }
    }
    GridFunction::new(spec.grid, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sup_diff, INF};
    use crate::model::{CosineTerm, Monotonicity};
    use crate::semigroup::{action_backward, action_forward, step_backward, step_forward_mirror, SemiConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(n: usize, steps: usize, dt: f64, model: ContactModel, x0: usize, u0: f64) -> PathEnumSpec {
        PathEnumSpec { grid: TorusGrid::new(1, n).unwrap(), steps, dt, model, x0, u0 }
    }

    fn cos_model() -> ContactModel {
        ContactModel::new(1, 1.0, Monotonicity::Increasing, vec![CosineTerm { axis: 0, k: 1, c: 0.4 }]).unwrap()
    }

    #[test]
    fn single_step_matches_semigroup_step() {
        let s = spec(8, 1, 0.1, cos_model(), 3, 0.7);
        let cfg = SemiConfig::with_dt(0.1).unwrap();
        let dp = step_backward(&GridFunction::spike(s.grid, 3, 0.7, INF), &s.model, &cfg).unwrap();
        assert!(sup_diff(&enumerate_action_forward(&s).unwrap(), &dp).unwrap() <= 1e-12);
        let dp = step_forward_mirror(&GridFunction::spike(s.grid, 3, 0.7, -INF), &s.model, &cfg).unwrap();
        assert!(sup_diff(&enumerate_action_backward(&s).unwrap(), &dp).unwrap() <= 1e-12);
    }

    #[test]
    fn rest_path_bounds() {
        let free = ContactModel::example_well();
        let s = spec(8, 2, 0.1, free, 2, 1.0);
        let fwd = enumerate_action_forward(&s).unwrap();
        assert!(fwd.get(2) <= 1.0 / 1.21 + 1e-12);
        let bwd = enumerate_action_backward(&s).unwrap();
        assert!(bwd.get(2) >= 1.21 - 1e-12);
    }

    #[test]
    fn matches_dynamic_programming() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let n = rng.gen_range(4..=8);
            let steps = rng.gen_range(1..=3);
            let x0 = rng.gen_range(0..n);
            let u0 = rng.gen_range(-1.0..1.0);
            let s = spec(n, steps, 0.05, cos_model(), x0, u0);
            let cfg = SemiConfig::with_dt(0.05).unwrap();
            let t = steps as f64 * 0.05;
            let dp = action_forward(s.grid, x0, u0, &s.model, &cfg, t).unwrap();
            assert!(sup_diff(&enumerate_action_forward(&s).unwrap(), &dp).unwrap() <= 1e-9);
            let dp = action_backward(s.grid, x0, u0, &s.model, &cfg, t).unwrap();
            assert!(sup_diff(&enumerate_action_backward(&s).unwrap(), &dp).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn reversibility_at_oracle_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x0 = rng.gen_range(0..6);
            let u0 = rng.gen_range(-1.0..1.0);
            let s = spec(6, 2, 0.1, cos_model(), x0, u0);
            let fwd = enumerate_action_forward(&s).unwrap();
            let x = rng.gen_range(0..6);
            let back = enumerate_action_backward(&PathEnumSpec { x0: x, u0: fwd.get(x), ..s.clone() }).unwrap();
            assert!((back.get(x0) - u0).abs() <= 1e-9);
        }
    }

    #[test]
    fn monotone_in_initial_value_and_lagrangian() {
        let s = spec(6, 3, 0.1, cos_model(), 1, 0.0);
        let lo = enumerate_action_forward(&s).unwrap();
        let hi = enumerate_action_forward(&PathEnumSpec { u0: 0.5, ..s.clone() }).unwrap();
        assert!(lo.values().iter().zip(hi.values()).all(|(a, b)| a < b));

        // L + 0.1 everywhere: lower the potential by 0.1 through a constant term
        let mut terms = s.model.potential_terms().to_vec();
        terms.push(CosineTerm { axis: 0, k: 0, c: -0.1 });
        let raised = ContactModel::new(1, 1.0, Monotonicity::Increasing, terms).unwrap();
        let more = enumerate_action_forward(&PathEnumSpec { model: raised, ..s.clone() }).unwrap();
        assert!(lo.values().iter().zip(more.values()).all(|(a, b)| a < b));
    }

    #[test]
    fn rejects_oversized_specs() {
        assert!(enumerate_action_forward(&spec(11, 1, 0.1, cos_model(), 0, 0.0)).is_err());
        assert!(enumerate_action_forward(&spec(10, 5, 0.1, cos_model(), 0, 0.0)).is_err());
        assert!(enumerate_action_forward(&spec(8, 2, 0.6, cos_model(), 0, 0.0)).is_err());
        assert!(enumerate_action_forward(&spec(10, 4, 0.1, cos_model(), 0, 0.0)).is_ok());
    }
}
