//! Manufactured solutions, interior error quantities and the convergence
//! and adaptive studies.

mod adaptive;
mod errors;
mod exact;
mod split;
mod study;

pub use adaptive::{adaptive_study, effective_h, lshape_problem, AdaptiveStudy};
pub use errors::{error_norms, ErrorNorms, PointNorm};
pub use exact::{fd_biharmonic, lshape_solution, square_solution, ExactSolution};
pub use split::{interior_split, InteriorSplit};
pub use study::{
    convergence_study, convergence_study_with, run_single, write_convergence_csv, ConvergenceRow, StudyConfig, StudyRun,
    CONVERGENCE_HEADER,
};
