use super::exact::lshape_solution;
use crate::adapt::{adaptive_loop, AdaptOptions, AdaptRecord, AdaptiveProblem, IterationState};
use crate::error::Result;
use crate::mesh::{generate_lshape, Triangulation};

/// The L-shape problem: `Δ²u = 0` with clamped data taken from
/// `r^{5/3} sin(5θ/3)`, starting from a regular mesh with cell size `1/n`.
pub fn lshape_problem(n: usize, degree: usize, gamma: Option<f64>) -> Result<AdaptiveProblem> {
    Ok(AdaptiveProblem {
        initial_mesh: generate_lshape(n)?,
        degree,
        gamma,
        data: lshape_solution(),
        exact_known: true,
    })
}

#[derive(Debug, Clone)]
pub struct AdaptiveStudy {
    pub records: Vec<AdaptRecord>,
    pub initial_mesh: Triangulation,
    pub final_mesh: Triangulation,
}

/// Runs the adaptive loop on [`lshape_problem`] with `k = 2` from a
/// 4-cells-per-unit mesh. `on_iteration` sees every solved iteration.
pub fn adaptive_study(options: &AdaptOptions, mut on_iteration: impl FnMut(&IterationState) -> Result<()>) -> Result<AdaptiveStudy> {
    let problem = lshape_problem(4, 2, None)?;
    problem.data.verify()?;
    let mut final_mesh = problem.initial_mesh.clone();
    let records = adaptive_loop(&problem, options, |state| {
        final_mesh = state.solution.space().mesh().clone();
        on_iteration(state)
    })?;
    Ok(AdaptiveStudy { records, initial_mesh: problem.initial_mesh, final_mesh })
}

/// `DOF^{-1/2}`, the effective mesh size used to report adaptive rates.
pub fn effective_h(dofs: usize) -> f64 {
    (dofs as f64).powf(-0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_budget_study() {
        let options = AdaptOptions { max_dofs: 2000, ..Default::default() };
        let mut seen = 0;
        let study = adaptive_study(&options, |_| {
            seen += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, study.records.len());
        assert!(study.records.len() >= 3);
        assert_eq!(study.initial_mesh.n_triangles(), 96);
        assert_eq!(study.final_mesh.n_triangles(), study.records.last().unwrap().triangles);
        assert!(study.records.windows(2).all(|w| w[1].dofs > w[0].dofs));
        assert!(study.records.iter().all(|r| r.dofs <= 2000 && r.kappa.is_some()));
    }

    #[test]
    fn effective_h_convention() {
        assert_eq!(effective_h(400), 0.05);
    }
}
