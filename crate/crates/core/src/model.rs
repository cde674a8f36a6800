//! Contact Hamiltonians of mechanical type on the flat torus.
//!
//! Every model has the form
//!
//! ```text
//! H(x, u, p) = σ·λ·u + ½|p|² + V(x)
//! L(x, u, v) = ½|v|² − σ·λ·u − V(x)
//! ```
//!
//! with σ = +1 for a Hamiltonian that increases in `u` and σ = −1 for one that
//! decreases, and `V` a cosine polynomial on each axis. The Lagrangian is the
//! exact Legendre transform of the Hamiltonian.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 2;

/// Direction of monotonicity of `H` in the unknown `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

impl Monotonicity {
    pub fn sigma(self) -> f64 {
        match self {
            Monotonicity::Increasing => 1.0,
            Monotonicity::Decreasing => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Monotonicity::Increasing => Monotonicity::Decreasing,
            Monotonicity::Decreasing => Monotonicity::Increasing,
        }
    }
}

/// One term `c · cos(2π k x_axis)` of the potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosineTerm {
    pub axis: usize,
    pub k: u32,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContactModel {
    dim: usize,
    lambda: f64,
    sign: Monotonicity,
    potential: Vec<CosineTerm>,
}

/// State `(x, u, p)` of the contact characteristic system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub dim: usize,
    pub x: [f64; MAX_DIM],
    pub u: f64,
    pub p: [f64; MAX_DIM],
}

/// State `(x, u, ẋ)` on which the Lagrangian is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocityPoint {
    pub dim: usize,
    pub x: [f64; MAX_DIM],
    pub u: f64,
    pub v: [f64; MAX_DIM],
}

pub(crate) fn wrap_unit(x: f64) -> f64 {
    let w = x - x.floor();
    // x - floor(x) can round up to exactly 1.0 for tiny negative x
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

fn pad(dim: usize, xs: &[f64]) -> [f64; MAX_DIM] {
    assert!(xs.len() >= dim, "expected {dim} coordinates, got {}", xs.len());
    let mut out = [0.0; MAX_DIM];
    out[..dim].copy_from_slice(&xs[..dim]);
    out
}

impl PhasePoint {
    pub fn new(x: &[f64], u: f64, p: &[f64]) -> Self {
        let dim = x.len();
        assert!((1..=MAX_DIM).contains(&dim) && p.len() == dim);
        let mut x = pad(dim, x);
        for xi in x.iter_mut().take(dim) {
            *xi = wrap_unit(*xi);
        }
        PhasePoint { dim, x, u, p: pad(dim, p) }
    }

    pub fn x(&self) -> &[f64] {
        &self.x[..self.dim]
    }

    pub fn p(&self) -> &[f64] {
        &self.p[..self.dim]
    }
}

impl VelocityPoint {
    pub fn new(x: &[f64], u: f64, v: &[f64]) -> Self {
        let dim = x.len();
        assert!((1..=MAX_DIM).contains(&dim) && v.len() == dim);
        let mut x = pad(dim, x);
        for xi in x.iter_mut().take(dim) {
            *xi = wrap_unit(*xi);
        }
        VelocityPoint { dim, x, u, v: pad(dim, v) }
    }

    pub fn x(&self) -> &[f64] {
        &self.x[..self.dim]
    }

    pub fn v(&self) -> &[f64] {
        &self.v[..self.dim]
    }
}

impl ContactModel {
    /// Builds a model, enforcing `λ > 0`, finite coefficients and `d ∈ {1, 2}`.
    pub fn new(
        dim: usize,
        lambda: f64,
        sign: Monotonicity,
        potential: Vec<CosineTerm>,
    ) -> Result<Self> {
        let m = Self::unchecked(dim, lambda, sign, potential)?;
        if !(m.lambda > 0.0) {
            return Err(Error::InvalidModel(format!(
                "lambda must be positive, got {}",
                m.lambda
            )));
        }
        Ok(m)
    }

    /// Like [`ContactModel::new`] but accepts any finite `λ`, so that condition
    /// checks can be run on models that fail them.
    pub fn unchecked(
        dim: usize,
        lambda: f64,
        sign: Monotonicity,
        potential: Vec<CosineTerm>,
    ) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidModel(format!("dimension {dim} not in {{1, 2}}")));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidModel("lambda is not finite".into()));
        }
        for t in &potential {
            if t.axis >= dim {
                return Err(Error::InvalidModel(format!(
                    "potential term on axis {} for a {dim}-dimensional model",
                    t.axis
                )));
            }
            if !t.c.is_finite() {
                return Err(Error::InvalidModel("potential coefficient is not finite".into()));
            }
        }
        Ok(ContactModel { dim, lambda, sign, potential })
    }

    /// `H = λu + ½|p|²` (or its decreasing twin) with no potential.
    pub fn free(dim: usize, lambda: f64, sign: Monotonicity) -> Result<Self> {
        Self::new(dim, lambda, sign, Vec::new())
    }

    /// The one-dimensional model `u + ½|p|² = 0`, whose forward weak KAM
    /// solutions include both `0` and `−d(x, ℤ)²/2`.
    pub fn example_well() -> Self {
        Self::free(1, 1.0, Monotonicity::Increasing).expect("valid builtin")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sign(&self) -> Monotonicity {
        self.sign
    }

    pub fn potential_terms(&self) -> &[CosineTerm] {
        &self.potential
    }

    /// `∂H/∂u`, constant for this model family.
    pub fn du_coefficient(&self) -> f64 {
        self.sign.sigma() * self.lambda
    }

    pub fn potential(&self, x: &[f64]) -> f64 {
        self.potential
            .iter()
            .map(|t| t.c * (2.0 * PI * t.k as f64 * x[t.axis]).cos())
            .sum()
    }

    pub fn potential_gradient(&self, x: &[f64]) -> [f64; MAX_DIM] {
        let mut g = [0.0; MAX_DIM];
        for t in &self.potential {
            let w = 2.0 * PI * t.k as f64;
            g[t.axis] -= t.c * w * (w * x[t.axis]).sin();
        }
        g
    }

    /// Upper bound of `|V|` from the coefficient magnitudes.
    pub fn potential_bound(&self) -> f64 {
        self.potential.iter().map(|t| t.c.abs()).sum()
    }

    pub fn eval_h(&self, s: &PhasePoint) -> f64 {
        let kinetic: f64 = s.p().iter().map(|p| 0.5 * p * p).sum();
        self.du_coefficient() * s.u + kinetic + self.potential(s.x())
    }

    pub fn eval_l(&self, s: &VelocityPoint) -> f64 {
        let kinetic: f64 = s.v().iter().map(|v| 0.5 * v * v).sum();
        kinetic - self.du_coefficient() * s.u - self.potential(s.x())
    }

    /// `L(x, u, 0)`: the velocity-independent part of the Lagrangian.
    pub fn lagrangian_at_rest(&self, x: &[f64], u: f64) -> f64 {
        -self.du_coefficient() * u - self.potential(x)
    }

    /// Maps `H̄` to `H(x, u, p) := H̄(x, −u, −p)`. An exact involution.
    pub fn dualize(&self) -> Self {
        ContactModel { sign: self.sign.flipped(), ..self.clone() }
    }
}

/// Legendre transform of [`ContactModel::eval_h`] computed numerically, one
/// coordinate of `p` at a time, using only evaluations of `H`.
pub fn legendre_numeric(m: &ContactModel, s: &VelocityPoint) -> f64 {
    let dim = s.dim;
    let x = s.x();
    let h_at = |p: &[f64]| m.eval_h(&PhasePoint::new(x, s.u, p));
    let zero = [0.0; MAX_DIM];
    let base = h_at(&zero[..dim]);
    let mut total = -base;
    for axis in 0..dim {
        let objective = |q: f64| {
            let mut p = [0.0; MAX_DIM];
            p[axis] = q;
            s.v[axis] * q - (h_at(&p[..dim]) - base)
        };
        total += maximize_concave(objective);
    }
    total
}

/// Golden-section maximization of a concave function on an expanding bracket.
fn maximize_concave(f: impl Fn(f64) -> f64) -> f64 {
    let f0 = f(0.0);
    let mut half = 1.0;
    while (f(half) >= f0 || f(-half) >= f0) && half < 1e12 {
        half *= 2.0;
    }
    let (mut a, mut b) = (-half, half);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
        if b - a < 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    f(0.5 * (a + b)).max(fc).max(fd)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// Positive definite Hessian in `p`.
    Convexity,
    /// `H / |p| → ∞`.
    Superlinearity,
    /// `−λ ≤ ∂H/∂u < 0`.
    ModerateDecreasing,
    /// `0 < ∂H/∂u ≤ λ`.
    ModerateIncreasing,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::Convexity => "H1",
            Condition::Superlinearity => "H2",
            Condition::ModerateDecreasing => "H3",
            Condition::ModerateIncreasing => "H3'",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub convexity: bool,
    pub superlinearity: bool,
    pub moderate_decreasing: bool,
    pub moderate_increasing: bool,
    /// Sampled range of the finite-difference `∂H/∂u`.
    pub du_min: f64,
    pub du_max: f64,
    pub min_hessian_eigenvalue: f64,
    sign: Monotonicity,
}

impl ConditionReport {
    pub fn holds(&self, c: Condition) -> bool {
        match c {
            Condition::Convexity => self.convexity,
            Condition::Superlinearity => self.superlinearity,
            Condition::ModerateDecreasing => self.moderate_decreasing,
            Condition::ModerateIncreasing => self.moderate_increasing,
        }
    }

    /// Conditions the model is required to satisfy given its declared sign.
    pub fn required(&self) -> [Condition; 3] {
        let mono = match self.sign {
            Monotonicity::Increasing => Condition::ModerateIncreasing,
            Monotonicity::Decreasing => Condition::ModerateDecreasing,
        };
        [Condition::Convexity, Condition::Superlinearity, mono]
    }

    pub fn first_failure(&self) -> Option<Condition> {
        self.required().into_iter().find(|&c| !self.holds(c))
    }

    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn ensure(&self) -> Result<()> {
        match self.first_failure() {
            Some(c) => Err(Error::ConditionViolated(c.label())),
            None => Ok(()),
        }
    }

    pub fn lines(&self) -> Vec<String> {
        let verdict = |b: bool| if b { "pass" } else { "fail" };
        vec![
            format!("H1 convexity: {} (min Hessian eigenvalue {:.6})", verdict(self.convexity), self.min_hessian_eigenvalue),
            format!("H2 superlinearity: {}", verdict(self.superlinearity)),
            format!("H3 moderate decreasing: {} (dH/du in [{:.6}, {:.6}])", verdict(self.moderate_decreasing), self.du_min, self.du_max),
            format!("H3' moderate increasing: {} (dH/du in [{:.6}, {:.6}])", verdict(self.moderate_increasing), self.du_min, self.du_max),
            format!("overall: {}", verdict(self.passed())),
        ]
    }
}

/// Probes the Tonelli and monotonicity conditions at `n_samples` random states.
pub fn check_conditions(m: &ContactModel, n_samples: usize) -> Result<ConditionReport> {
    if n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be at least 1".into()));
    }
    let dim = m.dim();
    let lambda = m.lambda();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let h = |x: &[f64], u: f64, p: &[f64]| m.eval_h(&PhasePoint::new(x, u, p));

    let mut min_eig = f64::INFINITY;
    let mut du_min = f64::INFINITY;
    let mut du_max = f64::NEG_INFINITY;
    let mut superlinear = true;

    for _ in 0..n_samples {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        let u = rng.gen_range(-5.0..5.0);
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect();

        let step = 1e-3;
        let mut hess = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..dim {
            for j in 0..dim {
                let shifted = |di: f64, dj: f64| {
                    let mut q = p.clone();
                    q[i] += di;
                    q[j] += dj;
                    h(&x, u, &q)
                };
                hess[i][j] = (shifted(step, step) - shifted(step, -step) - shifted(-step, step)
                    + shifted(-step, -step))
                    / (4.0 * step * step);
            }
        }
        let eig = if dim == 1 {
            hess[0][0]
        } else {
            let tr = hess[0][0] + hess[1][1];
            let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
            0.5 * (tr - (tr * tr - 4.0 * det).max(0.0).sqrt())
        };
        min_eig = min_eig.min(eig);

        let du_step = 1e-4;
        let du = (h(&x, u + du_step, &p) - h(&x, u - du_step, &p)) / (2.0 * du_step);
        du_min = du_min.min(du);
        du_max = du_max.max(du);

        let dir: Vec<f64> = {
            let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = raw.iter().map(|r| r * r).sum::<f64>().sqrt().max(1e-3);
            raw.iter().map(|r| r / norm).collect()
        };
        let growth = |r: f64| {
            let q: Vec<f64> = dir.iter().map(|d| d * r).collect();
            (h(&x, u, &q) - h(&x, u, &vec![0.0; dim])) / r
        };
        let (g10, g100) = (growth(10.0), growth(100.0));
        if !(g10 > 0.0 && g100 >= 5.0 * g10) {
            superlinear = false;
        }
    }

    // ∂H/∂u is constant for the builtin family, so the lower bound δ is λ itself
    let tol = 1e-6 * lambda.abs().max(1.0);
    let moderate_increasing = du_min > 0.0 && du_min >= lambda - tol && du_max <= lambda + tol;
    let moderate_decreasing = du_max < 0.0 && du_min >= -lambda - tol && du_max <= -lambda + tol;

    Ok(ConditionReport {
        convexity: min_eig > 0.0,
        superlinearity: superlinear,
        moderate_decreasing,
        moderate_increasing,
        du_min,
        du_max,
        min_hessian_eigenvalue: min_eig,
        sign: m.sign(),
    })
}

/// On-disk form of a model: `dimension`, `lambda`, `sign`, and per-axis
/// `(k, c_k)` cosine coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub dimension: usize,
    pub lambda: f64,
    pub sign: Monotonicity,
    #[serde(default)]
    pub potential_coeffs: Vec<Vec<(u32, f64)>>,
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn terms(&self) -> Result<Vec<CosineTerm>> {
        if self.potential_coeffs.len() > self.dimension {
            return Err(Error::InvalidModel(format!(
                "{} coefficient lists for dimension {}",
                self.potential_coeffs.len(),
                self.dimension
            )));
        }
        Ok(self
            .potential_coeffs
            .iter()
            .enumerate()
            .flat_map(|(axis, list)| list.iter().map(move |&(k, c)| CosineTerm { axis, k, c }))
            .collect())
    }

    pub fn to_model(&self) -> Result<ContactModel> {
        ContactModel::new(self.dimension, self.lambda, self.sign, self.terms()?)
    }

    pub fn to_model_unchecked(&self) -> Result<ContactModel> {
        ContactModel::unchecked(self.dimension, self.lambda, self.sign, self.terms()?)
    }

    pub fn from_model(m: &ContactModel) -> Self {
        let mut coeffs = vec![Vec::new(); m.dim()];
        for t in m.potential_terms() {
            coeffs[t.axis].push((t.k, t.c));
        }
        ModelFile { dimension: m.dim(), lambda: m.lambda(), sign: m.sign(), potential_coeffs: coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free1(lambda: f64, sign: Monotonicity) -> ContactModel {
        ContactModel::free(1, lambda, sign).unwrap()
    }

    #[test]
    fn hamiltonian_closed_forms() {
        let inc = free1(1.0, Monotonicity::Increasing);
        let dec = free1(1.0, Monotonicity::Decreasing);
        assert_eq!(inc.eval_h(&PhasePoint::new(&[0.0], 0.0, &[0.0])), 0.0);
        assert_eq!(inc.eval_h(&PhasePoint::new(&[0.3], 2.0, &[1.0])), 2.5);
        assert_eq!(dec.eval_h(&PhasePoint::new(&[0.3], 2.0, &[1.0])), -1.5);
    }

    #[test]
    fn lagrangian_closed_forms() {
        let inc = free1(1.0, Monotonicity::Increasing);
        assert_eq!(inc.eval_l(&VelocityPoint::new(&[0.3], 2.0, &[0.0])), -2.0);
        assert_eq!(inc.eval_l(&VelocityPoint::new(&[0.0], 0.0, &[1.0])), 0.5);
    }

    #[test]
    fn numeric_legendre_matches_closed_cases() {
        let inc = free1(1.0, Monotonicity::Increasing);
        for (x, u, v) in [(0.3, 2.0, 0.0), (0.0, 0.0, 1.0)] {
            let s = VelocityPoint::new(&[x], u, &[v]);
            assert!((legendre_numeric(&inc, &s) - inc.eval_l(&s)).abs() < 1e-10);
        }
        let s = VelocityPoint::new(&[0.0], 0.0, &[2.0]);
        assert!((legendre_numeric(&inc, &s) - 2.0).abs() < 1e-10);

        let cos = ContactModel::new(
            1,
            2.0,
            Monotonicity::Increasing,
            vec![CosineTerm { axis: 0, k: 1, c: 1.0 }],
        )
        .unwrap();
        let s = VelocityPoint::new(&[0.0], 1.0, &[0.0]);
        assert!((legendre_numeric(&cos, &s) + 3.0).abs() < 1e-10);
    }

    #[test]
    fn numeric_legendre_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let models = [
            ContactModel::new(
                1,
                1.5,
                Monotonicity::Increasing,
                vec![CosineTerm { axis: 0, k: 2, c: 0.4 }],
            )
            .unwrap(),
            ContactModel::new(
                2,
                0.7,
                Monotonicity::Decreasing,
                vec![CosineTerm { axis: 0, k: 1, c: 0.3 }, CosineTerm { axis: 1, k: 3, c: -0.2 }],
            )
            .unwrap(),
        ];
        for m in &models {
            for _ in 0..100 {
                let x: Vec<f64> = (0..m.dim()).map(|_| rng.gen()).collect();
                let v: Vec<f64> = (0..m.dim()).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let s = VelocityPoint::new(&x, rng.gen_range(-5.0..5.0), &v);
                assert!((m.eval_l(&s) - legendre_numeric(m, &s)).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn legendre_consistency_identity() {
        let m = ContactModel::new(
            1,
            1.0,
            Monotonicity::Increasing,
            vec![CosineTerm { axis: 0, k: 1, c: 0.5 }],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (x, u, v) = (rng.gen::<f64>(), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let l = m.eval_l(&VelocityPoint::new(&[x], u, &[v]));
            let h = m.eval_h(&PhasePoint::new(&[x], u, &[v]));
            assert!((l + h - v * v).abs() <= 1e-10);
        }
    }

    #[test]
    fn dualize_flips_sign_and_arguments() {
        let inc = free1(1.0, Monotonicity::Increasing);
        let dual = inc.dualize();
        assert_eq!(dual.sign(), Monotonicity::Decreasing);
        let lhs = dual.eval_h(&PhasePoint::new(&[0.2], 1.5, &[-0.7]));
        let rhs = inc.eval_h(&PhasePoint::new(&[0.2], -1.5, &[0.7]));
        assert!((lhs - rhs).abs() < 1e-15);
        assert!((lhs + 1.255).abs() < 1e-12);
    }

    #[test]
    fn dualize_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let dim = rng.gen_range(1..=2);
            let terms = (0..rng.gen_range(0..4))
                .map(|_| CosineTerm {
                    axis: rng.gen_range(0..dim),
                    k: rng.gen_range(0..4),
                    c: rng.gen_range(-1.0..1.0),
                })
                .collect();
            let sign = if rng.gen() { Monotonicity::Increasing } else { Monotonicity::Decreasing };
            let m = ContactModel::new(dim, rng.gen_range(0.1..3.0), sign, terms).unwrap();
            assert_eq!(m.dualize().dualize(), m);
        }
    }

    #[test]
    fn builtin_passes_all_conditions() {
        let report = check_conditions(&ContactModel::example_well(), 64).unwrap();
        assert!(report.convexity && report.superlinearity && report.moderate_increasing);
        assert!(report.passed());
    }

    #[test]
    fn zero_lambda_fails_moderate_increasing() {
        let m = ContactModel::unchecked(1, 0.0, Monotonicity::Increasing, vec![]).unwrap();
        let report = check_conditions(&m, 16).unwrap();
        assert!(!report.moderate_increasing);
        assert!(matches!(report.ensure(), Err(Error::ConditionViolated("H3'"))));
        assert!(ContactModel::new(1, 0.0, Monotonicity::Increasing, vec![]).is_err());
    }

    #[test]
    fn decreasing_builtin_satisfies_h3_only() {
        let report = check_conditions(&free1(1.0, Monotonicity::Decreasing), 32).unwrap();
        assert!(report.moderate_decreasing);
        assert!(!report.moderate_increasing);
        assert!(report.passed());
    }

    #[test]
    fn rejects_bad_models() {
        assert!(ContactModel::free(3, 1.0, Monotonicity::Increasing).is_err());
        assert!(ContactModel::new(
            1,
            1.0,
            Monotonicity::Increasing,
            vec![CosineTerm { axis: 1, k: 1, c: 1.0 }]
        )
        .is_err());
        assert!(ContactModel::new(
            1,
            1.0,
            Monotonicity::Increasing,
            vec![CosineTerm { axis: 0, k: 1, c: f64::NAN }]
        )
        .is_err());
        assert!(check_conditions(&ContactModel::example_well(), 0).is_err());
    }

    #[test]
    fn model_file_round_trip() {
        let text = r#"
            dimension = 2
            lambda = 1.5
            sign = "decreasing"
            potential_coeffs = [[[0, 0.5], [1, 0.25]], [[2, -0.1]]]
        "#;
        let file = ModelFile::parse(text).unwrap();
        let m = file.to_model().unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.sign(), Monotonicity::Decreasing);
        assert_eq!(m.potential_terms().len(), 3);
        assert!((m.potential(&[0.0, 0.0]) - 0.65).abs() < 1e-15);
        let again = toml::to_string(&ModelFile::from_model(&m)).unwrap();
        assert_eq!(ModelFile::parse(&again).unwrap().to_model().unwrap(), m);
    }
}
