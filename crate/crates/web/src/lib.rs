//! Browser bindings for a one-dimensional model `λu + |p|²/2 + c·cos(2πx)`.
//!
//! Every function returns a flat `Float64Array`; the page slices it.

use wasm_bindgen::prelude::*;
use wkam_core::flow::integrate;
use wkam_core::grid::{GridFunction, TorusGrid};
use wkam_core::model::{ContactModel, CosineTerm, Monotonicity, PhasePoint};
use wkam_core::semigroup::{evolve_final, Direction, SemiConfig};
use wkam_core::weakkam::{solve_weak_kam, SolveOptions};

fn model(lambda: f64, c: f64) -> Result<ContactModel, JsError> {
    let terms = if c == 0.0 { Vec::new() } else { vec![CosineTerm { axis: 0, k: 1, c }] };
    ContactModel::new(1, lambda, Monotonicity::Increasing, terms).map_err(js)
}

fn js(e: wkam_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn setup(n: usize, lambda: f64, c: f64, dt: f64) -> Result<(TorusGrid, ContactModel, SemiConfig), JsError> {
    let grid = TorusGrid::new(1, n).map_err(js)?;
    let m = model(lambda, c)?;
    let cfg = SemiConfig::with_dt(dt).map_err(js)?;
    cfg.check(&m).map_err(js)?;
    Ok((grid, m, cfg))
}

/// Initial profile: `"well"` (−d(x,ℤ)²/2), `"bump"` (sin 2πx / 4) or a constant.
fn initial(grid: TorusGrid, kind: &str, level: f64) -> GridFunction {
    match kind {
        "well" => GridFunction::well(grid),
        "bump" => GridFunction::from_fn(grid, |x| 0.25 * (std::f64::consts::TAU * x[0]).sin()),
        _ => GridFunction::constant(grid, level),
    }
}

/// `T⁻_t φ` (or `T⁺_t φ` when `forward`) for `t` rounded to the `dt` lattice.
#[allow(clippy::too_many_arguments)] // flat scalars keep the JS call simple
#[wasm_bindgen]
pub fn evolve_profile(
    n: usize,
    lambda: f64,
    c: f64,
    dt: f64,
    t: f64,
    forward: bool,
    kind: &str,
    level: f64,
) -> Result<Vec<f64>, JsError> {
    let (grid, m, cfg) = setup(n, lambda, c, dt)?;
    let phi = initial(grid, kind, level);
    let steps = (t / dt).round().max(0.0);
    if steps == 0.0 {
        return Ok(phi.into_values());
    }
    let dir = if forward { Direction::Forward } else { Direction::Backward };
    let out = evolve_final(&phi, &m, &cfg, steps * dt, dir).map_err(js)?;
    Ok(out.into_values())
}

/// `[u₋ (n values), u₊ (n values), Aubry flags (n values of 0/1)]`.
#[wasm_bindgen]
pub fn weak_kam_pair(n: usize, lambda: f64, c: f64, dt: f64) -> Result<Vec<f64>, JsError> {
    let (grid, m, cfg) = setup(n, lambda, c, dt)?;
    let opts = SolveOptions { tol_conv: 1e-6, t_max: 100.0 };
    let r = solve_weak_kam(&m, &cfg, &GridFunction::constant(grid, 0.0), &opts).map_err(js)?;
    let mut out = r.u_minus.into_values();
    out.extend_from_slice(r.u_plus.values());
    out.extend(r.aubry_mask.flags().iter().map(|&f| f64::from(u8::from(f))));
    Ok(out)
}

/// Contact orbit from `(x0, u0, p0)` as rows `t, x, u, p, H`, at most
/// `max_rows` of them.
#[wasm_bindgen]
pub fn contact_orbit(lambda: f64, c: f64, x0: f64, u0: f64, p0: f64, t: f64, max_rows: usize) -> Result<Vec<f64>, JsError> {
    let m = model(lambda, c)?;
    let rec = integrate(&m, &PhasePoint::new(&[x0], u0, &[p0]), t, 1e-3).map_err(js)?;
    let stride = rec.states.len().div_ceil(max_rows.max(2)).max(1);
    let mut out = Vec::new();
    for (i, (s, (&tk, &h))) in rec.states.iter().zip(rec.times.iter().zip(&rec.h_values)).enumerate() {
        if i % stride == 0 || i + 1 == rec.states.len() {
            out.extend_from_slice(&[tk, s.x[0], s.u, s.p[0], h]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evolve_keeps_zero_fixed() {
        let v = evolve_profile(32, 1.0, 0.0, 0.01, 0.5, false, "const", 0.0).unwrap();
        assert_eq!(v.len(), 32);
        assert!(v.iter().all(|x| x.abs() < 1e-9));
    }

    #[test]
    fn pair_layout() {
        let v = weak_kam_pair(32, 1.0, 0.3, 0.02).unwrap();
        assert_eq!(v.len(), 96);
        let (um, rest) = v.split_at(32);
        let (up, mask) = rest.split_at(32);
        assert!(up.iter().zip(um).all(|(p, m)| p <= m));
        assert_eq!(mask[0], 1.0);
    }

    #[test]
    fn orbit_rows_conserve_zero_level() {
        let v = contact_orbit(1.0, 0.0, 0.3, 0.0, 0.0, 1.0, 50).unwrap();
        assert_eq!(v.len() % 5, 0);
        assert!(v.len() / 5 <= 52);
        assert!(v.chunks(5).all(|r| r[4].abs() < 1e-12));
    }
}
