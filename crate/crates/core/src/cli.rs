//! Command-line front end: a TOML run configuration drives every computation
//! and results are written as CSV plus `key = value` summaries.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::flow::{calibrated_backward_orbit, forward_orbit_to_omega};
use crate::grid::{sup_diff, BoolMask, GridFunction, TorusGrid};
use crate::io::{self, Summary};
use crate::model::{check_conditions, ContactModel, ModelFile};
use crate::oracle::{enumerate_action_backward, enumerate_action_forward, PathEnumSpec};
use crate::semigroup::{action_backward, action_backward_record, action_forward, action_forward_record, evolve, Direction, SemiConfig};
use crate::weakkam::{
    coincidence_set, default_mask_eps, default_touch_eps, represent, solve_weak_kam, verify_longtime, LongtimeOptions,
    SolveOptions, WeakKamResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONDITION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "wkam", version, about = "Weak KAM solutions of contact Hamilton-Jacobi equations on the torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed, overriding the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Suppress the summary on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structural conditions on the model.
    Check {
        /// Print the default configuration with comments and exit.
        #[arg(long)]
        print_defaults: bool,
    },
    /// Compute u₋, u₊ and the Aubry mask.
    Solve,
    /// Evolve a grid function under T⁻ or T⁺.
    Evolve,
    /// Compute an implicit action function.
    Action,
    /// Predict and observe the long-time behaviour of T⁺_t φ.
    Classify,
    /// Rebuild a forward solution from its values on a mask.
    Represent,
    /// Integrate characteristic orbits lifted from a solution.
    Flow,
    /// Compare the semigroup with exhaustive path enumeration.
    Oracle,
}

/// The configuration printed by `check --print-defaults`.
pub const DEFAULT_CONFIG: &str = r#"# Model: either a path to a model file or an inline [model] table.
# Without either the built-in model u + |p|^2/2 on the circle is used.
# model_file = "model.toml"
# [model]
# dimension = 1
# lambda = 1.0
# sign = "increasing"
# potential_coeffs = [[[1, 0.3]]]   # per axis: (k, c) for c*cos(2*pi*k*x)

out = "out"          # output directory, relative to this file
seed = 0             # seed for random initial data and oracle cases

[check]
samples = 200        # random states probed per condition

[grid]
n = 256              # nodes per axis; the dimension comes from the model

[semigroup]
dt = 0.005
tol_fp = 1e-12       # nodal fixed-point tolerance
max_fp = 200         # nodal fixed-point iteration cap
radius = 0           # candidate window in cells per axis, 0 = all nodes

[solver]
tol_conv = 1e-6      # stop when the one-step change is below tol_conv*dt
t_max = 200.0
initial = { kind = "random", amplitude = 0.5 }

# Function sources: zero, well, constant {value}, random {amplitude},
# file {path}, u_minus {shift, raise, at}, u_plus {shift}.

[evolve]
initial = { kind = "well" }
direction = "backward"
t = 1.0
stride = 20          # keep every stride-th snapshot

[action]
direction = "forward"  # forward: h_{x0,u0}; backward: h^{x0,u0}
x0 = [0.0]
u0 = 0.0
t = 0.5
stride = 10

[classify]
phi = { kind = "zero" }
t_max = 50.0
k_div = 1e6
delta = 1.0          # start of the window for the bound certificate
# touch_eps = 0.05   # default 5*(dx + dt)

[represent]
target = { kind = "u_plus" }
mask = { kind = "coincidence" }  # also: aubry, full, nodes {at}
t_rep = 20.0
# mask_eps = 0.1     # default 10*(dx + dt)

[flow]
solution = { kind = "u_minus" }
direction = "backward"  # backward: calibrated orbits of u_minus; forward: orbits of a forward solution
x0 = [[0.25]]
t = 20.0
h_ode = 1e-3
mask = { kind = "aubry" }

[oracle]
n = 8
steps = 2
dt = 0.05
cases = 20
tol = 1e-9
"#;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model_file: Option<PathBuf>,
    pub model: Option<ModelFile>,
    pub out: PathBuf,
    pub seed: u64,
    pub check: CheckSection,
    pub grid: GridSection,
    pub semigroup: SemigroupSection,
    pub solver: SolverSection,
    pub evolve: EvolveSection,
    pub action: ActionSection,
    pub classify: ClassifySection,
    pub represent: RepresentSection,
    pub flow: FlowSection,
    pub oracle: OracleSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model_file: None,
            model: None,
            out: PathBuf::from("out"),
            seed: 0,
            check: CheckSection::default(),
            grid: GridSection::default(),
            semigroup: SemigroupSection::default(),
            solver: SolverSection::default(),
            evolve: EvolveSection::default(),
            action: ActionSection::default(),
            classify: ClassifySection::default(),
            represent: RepresentSection::default(),
            flow: FlowSection::default(),
            oracle: OracleSection::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckSection {
    pub samples: usize,
}

impl Default for CheckSection {
    fn default() -> Self {
        CheckSection { samples: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { n: 256 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemigroupSection {
    pub dt: f64,
    pub tol_fp: f64,
    pub max_fp: usize,
    pub radius: usize,
}

impl Default for SemigroupSection {
    fn default() -> Self {
        let d = SemiConfig::default();
        SemigroupSection { dt: d.dt, tol_fp: d.tol_fp, max_fp: d.max_fp, radius: d.radius }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub tol_conv: f64,
    pub t_max: f64,
    pub initial: FunctionSource,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolveOptions::default();
        SolverSection { tol_conv: d.tol_conv, t_max: d.t_max, initial: FunctionSource::Random { amplitude: 0.5 } }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionName {
    Backward,
    Forward,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSection {
    pub initial: FunctionSource,
    pub direction: DirectionName,
    pub t: f64,
    pub stride: usize,
}

impl Default for EvolveSection {
    fn default() -> Self {
        EvolveSection { initial: FunctionSource::Well, direction: DirectionName::Backward, t: 1.0, stride: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActionSection {
    pub direction: DirectionName,
    pub x0: Vec<f64>,
    pub u0: f64,
    pub t: f64,
    pub stride: usize,
}

impl Default for ActionSection {
    fn default() -> Self {
        ActionSection { direction: DirectionName::Forward, x0: vec![0.0], u0: 0.0, t: 0.5, stride: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySection {
    pub phi: FunctionSource,
    pub t_max: f64,
    pub k_div: f64,
    pub delta: f64,
    pub touch_eps: Option<f64>,
}

impl Default for ClassifySection {
    fn default() -> Self {
        ClassifySection { phi: FunctionSource::Zero, t_max: 50.0, k_div: 1e6, delta: 1.0, touch_eps: None }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepresentSection {
    pub target: FunctionSource,
    pub mask: MaskSource,
    pub t_rep: f64,
    pub mask_eps: Option<f64>,
}

impl Default for RepresentSection {
    fn default() -> Self {
        RepresentSection {
            target: FunctionSource::UPlus { shift: 0.0 },
            mask: MaskSource::Coincidence,
            t_rep: 20.0,
            mask_eps: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowSection {
    pub solution: FunctionSource,
    pub direction: DirectionName,
    pub x0: Vec<Vec<f64>>,
    pub t: f64,
    pub h_ode: f64,
    pub mask: MaskSource,
}

impl Default for FlowSection {
    fn default() -> Self {
        FlowSection {
            solution: FunctionSource::UMinus { shift: 0.0, raise: 0.0, at: Vec::new() },
            direction: DirectionName::Backward,
            x0: vec![vec![0.25]],
            t: 20.0,
            h_ode: crate::flow::DEFAULT_H_ODE,
            mask: MaskSource::Aubry,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    pub n: usize,
    pub steps: usize,
    pub dt: f64,
    pub cases: usize,
    pub tol: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection { n: 8, steps: 2, dt: 0.05, cases: 20, tol: 1e-9 }
    }
}

/// Where a grid function comes from.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSource {
    Zero,
    Well,
    Constant {
        value: f64,
    },
    Random {
        amplitude: f64,
    },
    File {
        path: PathBuf,
    },
    /// `u₋ + shift`, with the node nearest `at` raised by `raise`.
    UMinus {
        #[serde(default)]
        shift: f64,
        #[serde(default)]
        raise: f64,
        #[serde(default)]
        at: Vec<f64>,
    },
    UPlus {
        #[serde(default)]
        shift: f64,
    },
}

/// Where a node mask comes from.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaskSource {
    /// Coincidence of `u₋` with the function the mask is used against.
    Coincidence,
    /// Coincidence of `u₋` and `u₊`.
    Aubry,
    Full,
    Nodes { at: Vec<Vec<f64>> },
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads a configuration and makes its relative paths relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.rebase(base);
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.model_file.as_mut() {
            fix(p);
        }
        fix(&mut self.out);
        for src in [
            &mut self.solver.initial,
            &mut self.evolve.initial,
            &mut self.classify.phi,
            &mut self.represent.target,
            &mut self.flow.solution,
        ] {
            if let FunctionSource::File { path } = src {
                fix(path);
            }
        }
    }

    /// The model as written, without enforcing `λ > 0`.
    pub fn model_file_contents(&self) -> Result<ModelFile> {
        match (&self.model_file, &self.model) {
            (Some(_), Some(_)) => Err(Error::InvalidConfig("give either model_file or [model], not both".into())),
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
                ModelFile::parse(&text)
            }
            (None, Some(m)) => Ok(m.clone()),
            (None, None) => Ok(ModelFile::from_model(&ContactModel::example_well())),
        }
    }

    pub fn semi_config(&self) -> Result<SemiConfig> {
        let s = &self.semigroup;
        SemiConfig::new(s.dt, s.tol_fp, s.max_fp, s.radius)
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { tol_conv: self.solver.tol_conv, t_max: self.solver.t_max }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConditionViolated(_) => EXIT_CONDITION,
        Error::NoConvergence { .. } | Error::NonContraction { .. } | Error::Blowup { .. } => EXIT_NUMERIC,
        _ => EXIT_IO,
    }
}

/// Validated inputs shared by every command, with lazily solved `u₋`/`u₊`.
struct Context {
    cfg: RunConfig,
    model: ContactModel,
    grid: TorusGrid,
    semi: SemiConfig,
    out: PathBuf,
    quiet: bool,
    solved: Option<WeakKamResult>,
}

impl Context {
    fn new(cfg: RunConfig, out: PathBuf, quiet: bool) -> Result<Self> {
        let model = cfg.model_file_contents()?.to_model_unchecked()?;
        check_conditions(&model, cfg.check.samples)?.ensure()?;
        let grid = TorusGrid::new(model.dim(), cfg.grid.n)?;
        let semi = cfg.semi_config()?;
        semi.check(&model)?;
        Ok(Context { cfg, model, grid, semi, out, quiet, solved: None })
    }

    fn solved(&mut self) -> Result<&WeakKamResult> {
        if self.solved.is_none() {
            let phi0 = self.function(&self.cfg.solver.initial.clone())?;
            let opts = self.cfg.solve_options();
            self.solved = Some(solve_weak_kam(&self.model, &self.semi, &phi0, &opts)?);
        }
        Ok(self.solved.as_ref().expect("solved above"))
    }

    fn node(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.grid.dim() {
            return Err(Error::InvalidConfig(format!("point {x:?} does not have {} coordinates", self.grid.dim())));
        }
        Ok(self.grid.nearest_node(x))
    }

    fn function(&mut self, src: &FunctionSource) -> Result<GridFunction> {
        let grid = self.grid;
        Ok(match src {
            FunctionSource::Zero => GridFunction::constant(grid, 0.0),
            FunctionSource::Well => GridFunction::well(grid),
            FunctionSource::Constant { value } => GridFunction::constant(grid, *value),
            FunctionSource::Random { amplitude } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
                let a = amplitude.abs();
                let values = (0..grid.len()).map(|_| if a > 0.0 { rng.gen_range(-a..=a) } else { 0.0 }).collect();
                GridFunction::new(grid, values)?
            }
            FunctionSource::File { path } => io::read_grid_function(path, grid)?,
            FunctionSource::UMinus { shift, raise, at } => {
                let mut f = self.solved()?.u_minus.map(|v| v + shift);
                if *raise != 0.0 {
                    let node = self.node(at)?;
                    f.values_mut()[node] += raise;
                }
                f
            }
            FunctionSource::UPlus { shift } => self.solved()?.u_plus.map(|v| v + shift),
        })
    }

    fn mask(&mut self, src: &MaskSource, against: &GridFunction, eps: Option<f64>) -> Result<BoolMask> {
        let eps = eps.unwrap_or_else(|| default_mask_eps(&self.grid, &self.semi));
        match src {
            MaskSource::Coincidence => {
                let u_minus = self.solved()?.u_minus.clone();
                coincidence_set(&u_minus, against, eps)
            }
            MaskSource::Aubry => {
                let r = self.solved()?;
                coincidence_set(&r.u_minus, &r.u_plus, eps)
            }
            MaskSource::Full => Ok(BoolMask::full(self.grid)),
            MaskSource::Nodes { at } => {
                let mut flags = vec![false; self.grid.len()];
                for x in at {
                    flags[self.node(x)?] = true;
                }
                BoolMask::new(self.grid, flags)
            }
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn finish(&self, name: &str, summary: &Summary) -> Result<()> {
        summary.write(&self.path(name))?;
        if !self.quiet {
            print!("{}", summary.render());
        }
        Ok(())
    }

    fn header(&self, command: &str) -> Summary {
        let mut s = Summary::new();
        s.put("command", command)
            .put("dimension", self.grid.dim())
            .put("n", self.grid.n())
            .num("lambda", self.model.lambda())
            .put("sign", format!("{:?}", self.model.sign()).to_lowercase())
            .num("dt", self.semi.dt);
        s
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    if let Command::Check { print_defaults: true } = cli.command {
        print!("{DEFAULT_CONFIG}");
        return Ok(EXIT_OK);
    }
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli.out.clone().unwrap_or_else(|| cfg.out.clone());
    if let Command::Check { .. } = cli.command {
        return cmd_check(&cfg, &out, cli.quiet);
    }
    let mut ctx = Context::new(cfg, out, cli.quiet)?;
    match cli.command {
        Command::Check { .. } => unreachable!("handled above"),
        Command::Solve => cmd_solve(&mut ctx),
        Command::Evolve => cmd_evolve(&mut ctx),
        Command::Action => cmd_action(&mut ctx),
        Command::Classify => cmd_classify(&mut ctx),
        Command::Represent => cmd_represent(&mut ctx),
        Command::Flow => cmd_flow(&mut ctx),
        Command::Oracle => cmd_oracle(&mut ctx),
    }
}

fn cmd_check(cfg: &RunConfig, out: &Path, quiet: bool) -> Result<i32> {
    let model = cfg.model_file_contents()?.to_model_unchecked()?;
    let report = check_conditions(&model, cfg.check.samples)?;
    let mut s = Summary::new();
    s.put("command", "check")
        .put("dimension", model.dim())
        .num("lambda", model.lambda())
        .put("sign", format!("{:?}", model.sign()).to_lowercase());
    for c in report.required() {
        s.put(c.label(), if report.holds(c) { "pass" } else { "fail" });
    }
    s.num("min_hessian_eigenvalue", report.min_hessian_eigenvalue)
        .num("du_min", report.du_min)
        .num("du_max", report.du_max)
        .put("status", if report.passed() { "pass" } else { "fail" });
    s.write(&out.join("check.txt"))?;
    if !quiet {
        for line in report.lines() {
            println!("{line}");
        }
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_CONDITION })
}

fn cmd_solve(ctx: &mut Context) -> Result<i32> {
    let r = ctx.solved()?.clone();
    io::write_grid_function(&ctx.path("u_minus.csv"), &r.u_minus)?;
    io::write_grid_function(&ctx.path("u_plus.csv"), &r.u_plus)?;
    io::write_mask(&ctx.path("aubry_mask.csv"), &r.aubry_mask)?;
    let mut s = ctx.header("solve");
    s.num("residual_minus", r.residual_minus)
        .num("residual_plus", r.residual_plus)
        .num("u_minus_sup", r.u_minus.sup_norm())
        .num("u_plus_sup", r.u_plus.sup_norm())
        .num("sup_bound", r.sup_bound)
        .num("lip_bound", r.lip_bound)
        .num("order_gap", r.order_gap)
        .num("mask_eps", r.mask_eps)
        .put("aubry_nodes", r.aubry_mask.count());
    ctx.finish("solve_summary.txt", &s)?;
    Ok(EXIT_OK)
}

fn cmd_evolve(ctx: &mut Context) -> Result<i32> {
    let sec = ctx.cfg.evolve.clone();
    let u0 = ctx.function(&sec.initial)?;
    let dir = match sec.direction {
        DirectionName::Backward => Direction::Backward,
        DirectionName::Forward => Direction::Forward,
    };
    let rec = evolve(&u0, &ctx.model, &ctx.semi, sec.t, dir, sec.stride)?;
    io::write_evolve_record(&ctx.out, "evolve", &rec)?;
    let mut s = ctx.header("evolve");
    s.put("direction", format!("{:?}", sec.direction).to_lowercase())
        .num("t", sec.t)
        .put("snapshots", rec.snapshots.len())
        .num("final_sup_norm", rec.last().sup_norm())
        .num("final_lipschitz", rec.last().lipschitz_constant());
    ctx.finish("evolve_summary.txt", &s)?;
    Ok(EXIT_OK)
}

fn cmd_action(ctx: &mut Context) -> Result<i32> {
    let sec = ctx.cfg.action.clone();
    let x0 = ctx.node(&sec.x0)?;
    let (g, m, c) = (ctx.grid, &ctx.model, &ctx.semi);
    let rec = match sec.direction {
        DirectionName::Forward => action_forward_record(g, x0, sec.u0, m, c, sec.t, sec.stride)?,
        DirectionName::Backward => action_backward_record(g, x0, sec.u0, m, c, sec.t, sec.stride)?,
    };
    io::write_evolve_record(&ctx.out, "action", &rec)?;
    let last = rec.last();
    let mut s = ctx.header("action");
    s.put("direction", format!("{:?}", sec.direction).to_lowercase())
        .put("x0_node", x0)
        .num("u0", sec.u0)
        .num("t", sec.t)
        .num("value_at_x0", last.get(x0))
        .num("min", last.min_finite().unwrap_or(f64::NAN))
        .num("max", last.max_finite().unwrap_or(f64::NAN));
    ctx.finish("action_summary.txt", &s)?;
    Ok(EXIT_OK)
}

fn cmd_classify(ctx: &mut Context) -> Result<i32> {
    let sec = ctx.cfg.classify.clone();
    let phi = ctx.function(&sec.phi)?;
    let u_minus = ctx.solved()?.u_minus.clone();
    let opts = LongtimeOptions {
        t_max: sec.t_max,
        k_div: sec.k_div,
        delta: sec.delta,
        touch_eps: sec.touch_eps.unwrap_or_else(|| default_touch_eps(&ctx.grid, &ctx.semi)),
    };
    let v = verify_longtime(&phi, &u_minus, &ctx.model, &ctx.semi, &opts)?;
    io::write_grid_function(&ctx.path("phi.csv"), &phi)?;
    let mut s = ctx.header("classify");
    s.put("prediction", v.prediction.label())
        .put("empirical", v.empirical.label())
        .put("agrees", v.agrees())
        .num("touch_eps", opts.touch_eps)
        .num("time_horizon", v.time_horizon)
        .put("exit_time", v.exit_time.map_or("none".to_string(), |t| format!("{t:e}")))
        .num("max_abs_seen", v.max_abs_seen)
        .num("k_delta", v.k_delta)
        .num("kappa_delta", v.kappa_delta);
    ctx.finish("classify_summary.txt", &s)?;
    Ok(if v.agrees() { EXIT_OK } else { EXIT_NUMERIC })
}

fn cmd_represent(ctx: &mut Context) -> Result<i32> {
    let sec = ctx.cfg.represent.clone();
    let target = ctx.function(&sec.target)?;
    let mask = ctx.mask(&sec.mask, &target, sec.mask_eps)?;
    let rebuilt = represent(&target, &mask, &ctx.model, &ctx.semi, sec.t_rep)?;
    io::write_grid_function(&ctx.path("represent.csv"), &rebuilt)?;
    io::write_grid_function(&ctx.path("target.csv"), &target)?;
    io::write_mask(&ctx.path("represent_mask.csv"), &mask)?;
    let excess = rebuilt.values().iter().zip(target.values()).map(|(r, t)| r - t).fold(f64::NEG_INFINITY, f64::max);
    let mut s = ctx.header("represent");
    s.num("t_rep", sec.t_rep)
        .put("mask_nodes", mask.count())
        .num("max_error", sup_diff(&rebuilt, &target)?)
        .num("max_excess", excess);
    ctx.finish("represent_summary.txt", &s)?;
    Ok(EXIT_OK)
}

fn cmd_flow(ctx: &mut Context) -> Result<i32> {
    let sec = ctx.cfg.flow.clone();
    let w = ctx.function(&sec.solution)?;
    let mask = ctx.mask(&sec.mask, &w, None)?;
    let mut s = ctx.header("flow");
    s.num("t", sec.t).num("h_ode", sec.h_ode).put("direction", format!("{:?}", sec.direction).to_lowercase());
    for (i, x) in sec.x0.iter().enumerate() {
        let node = ctx.node(x)?;
        let rec = match sec.direction {
            DirectionName::Backward => calibrated_backward_orbit(&w, node, &ctx.model, sec.t, &mask, sec.h_ode)?,
            DirectionName::Forward => forward_orbit_to_omega(&w, node, &ctx.model, sec.t, &mask, sec.h_ode)?,
        };
        io::write_orbit(&ctx.path(&format!("orbit_{i:03}.csv")), &rec)?;
        let p = format!("orbit_{i:03}");
        let dim = ctx.grid.dim();
        s.put(format!("{p}.node"), node)
            .put(format!("{p}.window_mean"), format!("{:?}", &rec.window_mean[..dim]))
            .num(format!("{p}.distance_to_mask"), rec.distance_to_mask.unwrap_or(f64::NAN))
            .num(format!("{p}.graph_gap"), rec.graph_gap.unwrap_or(f64::NAN))
            .num(format!("{p}.trailing_graph_gap"), rec.trailing_graph_gap.unwrap_or(f64::NAN))
            .num(format!("{p}.sup_abs_h"), rec.sup_abs_h());
    }
    ctx.finish("flow_summary.txt", &s)?;
    Ok(EXIT_OK)
}

fn cmd_oracle(ctx: &mut Context) -> Result<i32> {
    let sec = ctx.cfg.oracle.clone();
    let grid = TorusGrid::new(1, sec.n)?;
    let semi = SemiConfig::new(sec.dt, ctx.semi.tol_fp, ctx.semi.max_fp, 0)?;
    let t = sec.steps as f64 * sec.dt;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let mut rows = String::from("case,x0,u0,forward_diff,backward_diff\n");
    let mut worst = 0.0f64;
    for case in 0..sec.cases {
        let x0 = rng.gen_range(0..sec.n);
        let u0: f64 = rng.gen_range(-1.0..=1.0);
        let spec = PathEnumSpec { grid, steps: sec.steps, dt: sec.dt, model: ctx.model.clone(), x0, u0 };
        let fwd = sup_diff(&enumerate_action_forward(&spec)?, &action_forward(grid, x0, u0, &ctx.model, &semi, t)?)?;
        let bwd = sup_diff(&enumerate_action_backward(&spec)?, &action_backward(grid, x0, u0, &ctx.model, &semi, t)?)?;
        worst = worst.max(fwd).max(bwd);
        rows.push_str(&format!("{case},{x0},{u0:?},{fwd:e},{bwd:e}\n"));
    }
    io::write_atomic(&ctx.path("oracle.csv"), rows.as_bytes())?;
    let pass = worst <= sec.tol;
    let mut s = ctx.header("oracle");
    s.put("oracle_n", sec.n)
        .put("steps", sec.steps)
        .num("oracle_dt", sec.dt)
        .put("cases", sec.cases)
        .num("max_diff", worst)
        .num("tol", sec.tol)
        .put("status", if pass { "pass" } else { "fail" });
    ctx.finish("oracle_summary.txt", &s)?;
    Ok(if pass { EXIT_OK } else { EXIT_NUMERIC })
}
