//! Periodic uniform grids on the unit torus and nodal functions on them.
//!
//! Node `i` along an axis sits at coordinate `i / N`. Multi-dimensional grids
//! are flattened row-major: the first axis is the slowest-varying index.

use crate::error::{Error, Result};
use crate::model::{wrap_unit, MAX_DIM};

/// Sentinel for values that cannot be reached (pinned-endpoint action data).
pub const INF: f64 = 1e18;

/// True if `v` is an unreachable sentinel (either sign).
#[inline]
pub fn is_unreachable(v: f64) -> bool {
    !(v.abs() < INF / 2.0)
}

/// Componentwise `b − a` wrapped into `[−½, ½)`.
pub fn min_displacement(a: &[f64], b: &[f64]) -> [f64; MAX_DIM] {
    let mut out = [0.0; MAX_DIM];
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        let d = bi - ai;
        out[i] = d - (d + 0.5).floor();
    }
    out
}

/// Geodesic distance on the flat torus.
pub fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    min_displacement(a, b)[..a.len()].iter().map(|d| d * d).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{1, 2}}")));
        }
        if n < 4 {
            return Err(Error::InvalidGrid(format!("need at least 4 nodes per axis, got {n}")));
        }
        Ok(TorusGrid { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nodes per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn multi_index(&self, idx: usize) -> [usize; MAX_DIM] {
        match self.dim {
            1 => [idx, 0],
            _ => [idx / self.n, idx % self.n],
        }
    }

    pub fn flat_index(&self, mi: [usize; MAX_DIM]) -> usize {
        match self.dim {
            1 => mi[0] % self.n,
            _ => (mi[0] % self.n) * self.n + mi[1] % self.n,
        }
    }

    pub fn coords(&self, idx: usize) -> [f64; MAX_DIM] {
        let mi = self.multi_index(idx);
        let mut c = [0.0; MAX_DIM];
        for a in 0..self.dim {
            c[a] = mi[a] as f64 * self.dx();
        }
        c
    }

    /// Index of the node closest to `x` (ties go to the lower index).
    pub fn nearest_node(&self, x: &[f64]) -> usize {
        let mut mi = [0usize; MAX_DIM];
        for a in 0..self.dim {
            let scaled = wrap_unit(x[a]) * self.n as f64;
            mi[a] = ((scaled + 0.5).floor() as usize) % self.n;
            // floor(k + 0.5) rounds an exact half up; prefer the lower node
            if (scaled - scaled.floor() - 0.5).abs() < 1e-12 {
                mi[a] = (scaled.floor() as usize) % self.n;
            }
        }
        self.flat_index(mi)
    }

    /// Wrapped integer offset `j − i` along one axis, in `[−N/2, N/2)`.
    pub fn axis_offset(&self, i: usize, j: usize) -> i64 {
        let n = self.n as i64;
        let d = (j as i64 - i as i64).rem_euclid(n);
        if 2 * d >= n {
            d - n
        } else {
            d
        }
    }

    /// Neighbour of `idx` shifted by `shift` along `axis`, periodically.
    pub fn shifted(&self, idx: usize, axis: usize, shift: i64) -> usize {
        let mut mi = self.multi_index(idx);
        mi[axis] = (mi[axis] as i64 + shift).rem_euclid(self.n as i64) as usize;
        self.flat_index(mi)
    }
}

/// Nodal values on a [`TorusGrid`]; entries may be ±[`INF`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        GridFunction { grid, values: vec![c; grid.len()] }
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.coords(i)[..grid.dim()])).collect();
        GridFunction { grid, values }
    }

    /// `value` at `node`, `fill` everywhere else.
    pub fn spike(grid: TorusGrid, node: usize, value: f64, fill: f64) -> Self {
        let mut values = vec![fill; grid.len()];
        values[node] = value;
        GridFunction { grid, values }
    }

    /// The forward weak KAM solution `−d(x, ℤ^d)²/2` of `u + ½|Du|² = 0`
    /// (summed over axes in two dimensions).
    pub fn well(grid: TorusGrid) -> Self {
        Self::from_fn(grid, |x| {
            -0.5 * x.iter().map(|&xi| {
                let d = xi.min(1.0 - xi);
                d * d
            }).sum::<f64>()
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridFunction { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.same_grid(other)?;
        Ok(GridFunction {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn first_sentinel(&self) -> Option<usize> {
        self.values.iter().position(|&v| is_unreachable(v))
    }

    pub fn ensure_finite(&self) -> Result<()> {
        match self.first_sentinel() {
            Some(node) => Err(Error::SentinelPresent { node }),
            None => Ok(()),
        }
    }

    pub fn min_finite(&self) -> Option<f64> {
        self.values.iter().copied().filter(|&v| !is_unreachable(v)).reduce(f64::min)
    }

    pub fn max_finite(&self) -> Option<f64> {
        self.values.iter().copied().filter(|&v| !is_unreachable(v)).reduce(f64::max)
    }

    /// Largest absolute value over reachable nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| !is_unreachable(**v))
            .fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    /// Largest difference quotient between neighbouring nodes.
    pub fn lipschitz_constant(&self) -> f64 {
        let dx = self.grid.dx();
        let mut lip: f64 = 0.0;
        for idx in 0..self.grid.len() {
            for axis in 0..self.grid.dim() {
                let j = self.grid.shifted(idx, axis, 1);
                lip = lip.max((self.values[j] - self.values[idx]).abs() / dx);
            }
        }
        lip
    }

    /// Periodic multilinear interpolation at an arbitrary point.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let n = self.grid.n() as f64;
        let mut base = [0usize; MAX_DIM];
        let mut frac = [0.0; MAX_DIM];
        for a in 0..self.grid.dim() {
            let s = wrap_unit(x[a]) * n;
            let fl = s.floor();
            base[a] = fl as usize % self.grid.n();
            frac[a] = s - fl;
        }
        match self.grid.dim() {
            1 => {
                let i0 = base[0];
                let i1 = (i0 + 1) % self.grid.n();
                self.values[i0] * (1.0 - frac[0]) + self.values[i1] * frac[0]
            }
            _ => {
                let mut acc = 0.0;
                for (di, wi) in [(0, 1.0 - frac[0]), (1, frac[0])] {
                    for (dj, wj) in [(0, 1.0 - frac[1]), (1, frac[1])] {
                        let idx = self.grid.flat_index([base[0] + di, base[1] + dj]);
                        acc += wi * wj * self.values[idx];
                    }
                }
                acc
            }
        }
    }

    /// Periodic central differences, one component per axis.
    pub fn gradient_central(&self) -> Result<VectorField> {
        self.ensure_finite()?;
        let inv = 1.0 / (2.0 * self.grid.dx());
        let components = (0..self.grid.dim())
            .map(|axis| {
                let values = (0..self.grid.len())
                    .map(|idx| {
                        let fwd = self.values[self.grid.shifted(idx, axis, 1)];
                        let bwd = self.values[self.grid.shifted(idx, axis, -1)];
                        (fwd - bwd) * inv
                    })
                    .collect();
                GridFunction { grid: self.grid, values }
            })
            .collect();
        Ok(VectorField { components })
    }

    /// Flags nodes where one-sided difference quotients differ by more than
    /// `kappa` along some axis.
    pub fn kink_mask(&self, kappa: f64) -> BoolMask {
        let dx = self.grid.dx();
        let flags = (0..self.grid.len())
            .map(|idx| {
                (0..self.grid.dim()).any(|axis| {
                    let c = self.values[idx];
                    let fwd = (self.values[self.grid.shifted(idx, axis, 1)] - c) / dx;
                    let bwd = (c - self.values[self.grid.shifted(idx, axis, -1)]) / dx;
                    (fwd - bwd).abs() > kappa
                })
            })
            .collect();
        BoolMask { grid: self.grid, flags }
    }
}

/// `max |f − g|` over nodes.
pub fn sup_diff(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    f.same_grid(g)?;
    Ok(f.values.iter().zip(&g.values).fold(0.0, |acc: f64, (a, b)| acc.max((a - b).abs())))
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub components: Vec<GridFunction>,
}

impl VectorField {
    pub fn at(&self, idx: usize) -> [f64; MAX_DIM] {
        let mut out = [0.0; MAX_DIM];
        for (a, c) in self.components.iter().enumerate() {
            out[a] = c.values[idx];
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolMask {
    grid: TorusGrid,
    flags: Vec<bool>,
}

impl BoolMask {
    pub fn new(grid: TorusGrid, flags: Vec<bool>) -> Result<Self> {
        if flags.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} flags, got {}",
                grid.len(),
                flags.len()
            )));
        }
        Ok(BoolMask { grid, flags })
    }

    pub fn full(grid: TorusGrid) -> Self {
        BoolMask { grid, flags: vec![true; grid.len()] }
    }

    pub fn single(grid: TorusGrid, node: usize) -> Self {
        let mut flags = vec![false; grid.len()];
        flags[node] = true;
        BoolMask { grid, flags }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn get(&self, idx: usize) -> bool {
        self.flags[idx]
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i)
    }

    /// Adds every node within one cell (per axis) of a flagged node.
    pub fn dilate(&self) -> Self {
        let mut flags = self.flags.clone();
        for idx in self.nodes() {
            for axis in 0..self.grid.dim() {
                for s in [-1, 1] {
                    flags[self.grid.shifted(idx, axis, s)] = true;
                }
            }
        }
        // corner neighbours in 2D
        if self.grid.dim() == 2 {
            for idx in self.nodes() {
                for s0 in [-1, 1] {
                    for s1 in [-1, 1] {
                        let j = self.grid.shifted(self.grid.shifted(idx, 0, s0), 1, s1);
                        flags[j] = true;
                    }
                }
            }
        }
        BoolMask { grid: self.grid, flags }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.grid == other.grid && self.flags.iter().zip(&other.flags).all(|(&a, &b)| !a || b)
    }

    /// Torus distance from `x` to the nearest flagged node.
    pub fn distance_to(&self, x: &[f64]) -> Option<f64> {
        self.nodes()
            .map(|idx| torus_distance(x, &self.grid.coords(idx)[..self.grid.dim()]))
            .reduce(f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g1(n: usize) -> TorusGrid {
        TorusGrid::new(1, n).unwrap()
    }

    #[test]
    fn displacement_wraps() {
        assert!((min_displacement(&[0.1], &[0.9])[0] + 0.2).abs() < 1e-15);
        assert_eq!(min_displacement(&[0.3], &[0.3])[0], 0.0);
        let d = min_displacement(&[0.95, 0.1], &[0.05, 0.4]);
        assert!((d[0] - 0.1).abs() < 1e-12 && (d[1] - 0.3).abs() < 1e-12);
        assert_eq!(min_displacement(&[0.0], &[0.5])[0], -0.5);
    }

    #[test]
    fn grid_guards_and_indexing() {
        assert!(TorusGrid::new(1, 3).is_err());
        assert!(TorusGrid::new(3, 8).is_err());
        let g = TorusGrid::new(2, 8).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.flat_index(g.multi_index(37)), 37);
        assert_eq!(g.coords(9), [0.125, 0.125]);
        assert_eq!(g.axis_offset(0, 4), -4);
        assert_eq!(g.axis_offset(7, 0), 1);
        assert_eq!(g.nearest_node(&[0.99, 0.5]), 4);
        assert_eq!(g1(256).nearest_node(&[0.5]), 128);
    }

    #[test]
    fn constant_has_zero_gradient() {
        let f = GridFunction::constant(g1(16), 2.5);
        let grad = f.gradient_central().unwrap();
        assert!(grad.components[0].values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn central_gradient_of_sine() {
        let g = g1(256);
        let f = GridFunction::from_fn(g, |x| (2.0 * PI * x[0]).sin());
        let grad = f.gradient_central().unwrap();
        let err = (0..g.len())
            .map(|i| (grad.components[0].get(i) - 2.0 * PI * (2.0 * PI * g.coords(i)[0]).cos()).abs())
            .fold(0.0, f64::max);
        let taylor = (2.0 * PI).powi(3) * g.dx().powi(2) / 6.0;
        assert!(err <= taylor * 1.0001 && err <= 1e-3, "err {err}, bound {taylor}");
    }

    #[test]
    fn gradient_of_symmetric_kink_vanishes_at_origin() {
        let f = GridFunction::well(g1(256)).map(|v| -v);
        assert_eq!(f.gradient_central().unwrap().components[0].get(0), 0.0);
    }

    #[test]
    fn gradient_rejects_sentinels() {
        let f = GridFunction::spike(g1(8), 0, 0.0, INF);
        assert!(matches!(f.gradient_central(), Err(Error::SentinelPresent { node: 1 })));
    }

    #[test]
    fn kink_mask_cases() {
        // second difference quotient of sin(2πx) peaks at (2π)²·dx
        let g = g1(512);
        let f = GridFunction::from_fn(g, |x| (2.0 * PI * x[0]).sin());
        assert_eq!(f.kink_mask(0.1).count(), 0);
        // at N = 64 the smooth curvature already exceeds 0.1
        let coarse = GridFunction::from_fn(g1(64), |x| (2.0 * PI * x[0]).sin());
        assert!(coarse.kink_mask(0.1).count() > 0);

        let g = g1(256);
        let w = GridFunction::well(g).map(|v| -v);
        let mask = w.kink_mask(0.1);
        assert_eq!(mask.nodes().collect::<Vec<_>>(), vec![128]);

        assert_eq!(GridFunction::constant(g, 0.0).kink_mask(0.1).count(), 0);
    }

    #[test]
    fn sup_diff_cases() {
        let g = g1(4);
        let s = GridFunction::from_fn(g, |x| (2.0 * PI * x[0]).sin());
        assert_eq!(sup_diff(&s, &s).unwrap(), 0.0);
        let zero = GridFunction::constant(g, 0.0);
        assert_eq!(sup_diff(&zero, &GridFunction::constant(g, 3.0)).unwrap(), 3.0);
        assert!((sup_diff(&s, &s.map(|v| -v)).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(
            sup_diff(&zero, &GridFunction::constant(g1(8), 0.0)),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn interpolation_is_exact_at_nodes_and_linear_between() {
        let g = g1(8);
        let f = GridFunction::from_fn(g, |x| x[0]);
        assert_eq!(f.interpolate(&[0.25]), 0.25);
        assert!((f.interpolate(&[0.3]) - 0.3).abs() < 1e-15);
        // wraps from the last node back to node 0
        assert!((f.interpolate(&[0.9375]) - 0.4375).abs() < 1e-15);
    }

    #[test]
    fn well_bounds() {
        let f = GridFunction::well(g1(256));
        assert!((f.sup_norm() - 0.125).abs() < 1e-15);
        let lip = f.lipschitz_constant();
        assert!((lip - 0.5).abs() <= 1.0 / 256.0);
    }

    #[test]
    fn mask_dilation_and_distance() {
        let g = g1(8);
        let m = BoolMask::single(g, 0);
        let d = m.dilate();
        assert_eq!(d.nodes().collect::<Vec<_>>(), vec![0, 1, 7]);
        assert!(m.is_subset_of(&d));
        assert!((m.distance_to(&[0.9]).unwrap() - 0.1).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn displacement_is_antisymmetric(a in 0.0f64..1.0, b in 0.0f64..1.0) {
                let d = min_displacement(&[a], &[b])[0];
                prop_assume!((d.abs() - 0.5).abs() > 1e-9);
                let e = min_displacement(&[b], &[a])[0];
                prop_assert!((d + e).abs() < 1e-12);
                prop_assert!((-0.5..0.5).contains(&d));
            }

            #[test]
            fn sup_diff_is_a_metric(
                f in proptest::collection::vec(-10.0f64..10.0, 8),
                g in proptest::collection::vec(-10.0f64..10.0, 8),
                h in proptest::collection::vec(-10.0f64..10.0, 8),
            ) {
                let grid = TorusGrid::new(1, 8).unwrap();
                let f = GridFunction::new(grid, f).unwrap();
                let g = GridFunction::new(grid, g).unwrap();
                let h = GridFunction::new(grid, h).unwrap();
                let fg = sup_diff(&f, &g).unwrap();
                prop_assert_eq!(fg, sup_diff(&g, &f).unwrap());
                prop_assert!(fg <= sup_diff(&f, &h).unwrap() + sup_diff(&h, &g).unwrap() + 1e-12);
            }
        }
    }
}
