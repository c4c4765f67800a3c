use super::errors::{error_norms, ErrorNorms, PointNorm};
use super::exact::{square_solution, ExactSolution};
use super::split::interior_split;
use crate::c0ip::{default_gamma, solve_clamped, AssembledSystem};
use crate::error::{Error, Result};
use crate::fem::{FeFunction, FeSpace};
use crate::linalg::{LinearSolver, SolverRegistry, DEFAULT_TOL};
use crate::mesh::{PatternRegistry, Triangulation};
use crate::recovery::{GradientRecovery, PatchSeed, RecoveryOptions};
use std::io::Write;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub pattern: String,
    pub degree: usize,
    pub n_list: Vec<usize>,
    /// `None` selects `1.5 k²`.
    pub gamma: Option<f64>,
    pub distance: f64,
    pub solver: String,
    pub same_type: bool,
    pub interior_by_nodes: bool,
    pub point_norm: PointNorm,
    pub seed: PatchSeed,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            pattern: "regular".into(),
            degree: 2,
            n_list: vec![16, 32, 64],
            gamma: None,
            distance: 0.1,
            solver: "direct".into(),
            same_type: false,
            interior_by_nodes: false,
            point_norm: PointNorm::default(),
            seed: PatchSeed::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub inv_h: usize,
    pub dofs: usize,
    pub errors: ErrorNorms,
    pub he0_order: Option<f64>,
    pub hre0_order: Option<f64>,
    pub hre_inf_order: Option<f64>,
}

/// Everything produced for one mesh of a study.
pub struct StudyRun {
    pub solution: FeFunction,
    pub system: AssembledSystem,
    pub errors: ErrorNorms,
    pub recovery_fallbacks: usize,
}

/// Solves the square problem on `mesh` and evaluates the error quantities.
pub fn run_single(mesh: Triangulation, config: &StudyConfig, exact: &ExactSolution, solver: &dyn LinearSolver) -> Result<StudyRun> {
    let k = config.degree;
    let space = Arc::new(FeSpace::new(Arc::new(mesh), k)?);
    let gamma = config.gamma.unwrap_or_else(|| default_gamma(k));
    let (u_h, system) = solve_clamped(
        space.clone(),
        exact.f,
        |p| exact.g_d(p),
        |p, n| exact.g_n(p, n),
        gamma,
        solver,
        DEFAULT_TOL,
    )?;
    let recovery = GradientRecovery::new(space.clone(), RecoveryOptions { same_type: config.same_type, seed: config.seed, ..Default::default() })?;
    let hessian = recovery.hessian(&u_h)?;
    let split = interior_split(&space, config.distance, config.interior_by_nodes);
    let errors = error_norms(&u_h, &hessian, exact, &split, config.point_norm, None)?;
    Ok(StudyRun { solution: u_h, system, errors, recovery_fallbacks: recovery.fallback_count() })
}

fn order(prev: f64, cur: f64) -> Option<f64> {
    (prev > 0.0 && cur > 0.0).then(|| (prev / cur).log2())
}

/// Convergence study on the unit square with `u = sin²(πx) sin²(πy)`.
/// `on_run` sees every solved mesh, e.g. for dumps.
pub fn convergence_study_with(
    config: &StudyConfig,
    mut on_run: impl FnMut(usize, &StudyRun) -> Result<()>,
) -> Result<Vec<ConvergenceRow>> {
    if config.n_list.is_empty() || config.n_list.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidArgument(format!("n list must be non-empty, each entry double the last, got {:?}", config.n_list)));
    }
    let patterns = PatternRegistry::default();
    let generator = patterns.get(&config.pattern)?;
    let solvers = SolverRegistry::default();
    let solver = solvers.get(&config.solver)?;
    let exact = square_solution();
    exact.verify()?;
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &n in &config.n_list {
        let run = generator
            .generate(n)
            .and_then(|mesh| run_single(mesh, config, &exact, solver))
            .map_err(|e| e.context(format!("{} n={n} k={}", config.pattern, config.degree)))?;
        on_run(n, &run)?;
        let e = run.errors;
        let mut row = ConvergenceRow {
            inv_h: n,
            dofs: run.solution.coeffs().len(),
            errors: e,
            he0_order: None,
            hre0_order: None,
            hre_inf_order: None,
        };
        if let Some(prev) = rows.last() {
            row.he0_order = order(prev.errors.he0, e.he0);
            row.hre0_order = order(prev.errors.hre0, e.hre0);
            row.hre_inf_order = order(prev.errors.hre_inf, e.hre_inf);
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn convergence_study(config: &StudyConfig) -> Result<Vec<ConvergenceRow>> {
    convergence_study_with(config, |_, _| Ok(()))
}

pub const CONVERGENCE_HEADER: &str = "inv_h,He0,He0_order,Hre0,Hre0_order,HreInf,HreInf_order";

pub fn write_convergence_csv<W: Write>(mut w: W, rows: &[ConvergenceRow]) -> Result<()> {
    writeln!(w, "{CONVERGENCE_HEADER}")?;
    let o = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
    for r in rows {
        writeln!(
            w,
            "{},{:.6e},{},{:.6e},{},{:.6e},{}",
            r.inv_h,
            r.errors.he0,
            o(r.he0_order),
            r.errors.hre0,
            o(r.hre0_order),
            r.errors.hre_inf,
            o(r.hre_inf_order)
        )?;
    }
    Ok(())
}
