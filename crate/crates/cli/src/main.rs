use anyhow::{bail, Context, Result};
use c0ip_core::adapt::{write_adapt_csv, AdaptOptions, MarkingConvention};
use c0ip_core::bench::{
    adaptive_study, convergence_study_with, effective_h, write_convergence_csv, PointNorm, StudyConfig,
};
use c0ip_core::linalg::SolverRegistry;
use c0ip_core::mesh::{write_mesh, PatternRegistry, Triangulation};
use c0ip_core::recovery::PatchSeed;
use c0ip_core::{Error as CoreError, Result as CoreResult};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "c0ip", version, about = "C0 interior penalty biharmonic solver with PPR Hessian recovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence table on the unit square with u = sin²(πx) sin²(πy).
    Study(StudyArgs),
    /// Adaptive refinement on the L-shaped domain.
    Adaptive(AdaptiveArgs),
    /// List registered mesh patterns and solvers.
    List,
}

#[derive(Args)]
struct Common {
    /// Linear solver strategy.
    #[arg(long, default_value = "direct")]
    solver: String,
    /// Fit PPR patches to same-type nodes only.
    #[arg(long)]
    same_type_sampling: bool,
    /// Write the (finest or final) discrete solution coefficients here.
    #[arg(long)]
    dump_solution: Option<PathBuf>,
    /// Write the (finest or final) constrained system matrix here, COO format.
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedArg {
    Carrier,
    NodeElements,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    MaxEntry,
    Frobenius,
}

#[derive(Clone, Copy, ValueEnum)]
enum MarkingArg {
    ThetaSquared,
    Theta,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long, default_value = "regular")]
    pattern: String,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=4))]
    degree: u8,
    /// Cells per unit length, each double the last.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
    n: Vec<usize>,
    /// Penalty parameter; defaults to 1.5 k².
    #[arg(long)]
    gamma: Option<f64>,
    /// Width of the boundary layer excluded from the interior errors.
    #[arg(long = "L", default_value_t = 0.1)]
    distance: f64,
    /// Build the boundary layer from all Lagrange nodes instead of corners.
    #[arg(long)]
    interior_by_nodes: bool,
    #[arg(long, value_enum, default_value = "carrier")]
    patch_seed: SeedArg,
    #[arg(long, value_enum, default_value = "max-entry")]
    point_norm: NormArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct AdaptiveArgs {
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long, default_value_t = 50_000)]
    max_dofs: usize,
    #[arg(long, value_enum, default_value = "theta-squared")]
    marking: MarkingArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also dump the mesh every N iterations (initial and final are always dumped).
    #[arg(long)]
    dump_mesh_every: Option<usize>,
    /// Directory for mesh dumps.
    #[arg(long, default_value = ".")]
    mesh_dir: PathBuf,
    #[command(flatten)]
    common: Common,
}

fn create(path: &Path) -> CoreResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CoreError::from(e).context(format!("cannot create {}", path.display())))
}

fn dump_mesh(dir: &Path, name: &str, mesh: &Triangulation) -> CoreResult<()> {
    let path = dir.join(name);
    let mut w = create(&path)?;
    write_mesh(&mut w, mesh)?;
    w.flush()?;
    Ok(())
}

fn study(args: StudyArgs) -> Result<()> {
    let config = StudyConfig {
        pattern: args.pattern.clone(),
        degree: args.degree as usize,
        n_list: args.n.clone(),
        gamma: args.gamma,
        distance: args.distance,
        solver: args.common.solver.clone(),
        same_type: args.common.same_type_sampling,
        interior_by_nodes: args.interior_by_nodes,
        point_norm: match args.point_norm {
            NormArg::MaxEntry => PointNorm::MaxEntry,
            NormArg::Frobenius => PointNorm::Frobenius,
        },
        seed: match args.patch_seed {
            SeedArg::Carrier => PatchSeed::CarrierVertices,
            SeedArg::NodeElements => PatchSeed::NodeElements,
        },
    };
    let finest = *args.n.last().context("empty --n list")?;
    let start = Instant::now();
    let rows = convergence_study_with(&config, |n, run| {
        eprintln!("n={n}: {} dofs, {:.2}s, recovery fallbacks {}", run.solution.coeffs().len(), start.elapsed().as_secs_f64(), run.recovery_fallbacks);
        if n == finest {
            if let Some(p) = &args.common.dump_solution {
                run.solution.write(create(p)?)?;
            }
            if let Some(p) = &args.common.dump_matrix {
                run.system.matrix.write_coo(create(p)?)?;
            }
        }
        Ok(())
    })?;
    write_convergence_csv(std::io::stdout().lock(), &rows)?;
    if let Some(p) = &args.out {
        let mut w = create(p)?;
        write_convergence_csv(&mut w, &rows)?;
        w.flush()?;
    }
    Ok(())
}

fn adaptive(args: AdaptiveArgs) -> Result<()> {
    if args.dump_mesh_every == Some(0) {
        bail!("--dump-mesh-every must be positive");
    }
    let options = AdaptOptions {
        theta: args.theta,
        max_dofs: args.max_dofs,
        convention: match args.marking {
            MarkingArg::ThetaSquared => MarkingConvention::ThetaSquared,
            MarkingArg::Theta => MarkingConvention::Theta,
        },
        solver: args.common.solver.clone(),
        same_type: args.common.same_type_sampling,
        ..Default::default()
    };
    let start = Instant::now();
    let mut last_solution = None;
    let mut last_matrix = None;
    let study = adaptive_study(&options, |state| {
        let r = state.record;
        eprintln!(
            "iter {:3}: {:6} dofs, eta {:.4e}, kappa {}, marked {}, {:.1}s",
            r.iter,
            r.dofs,
            r.eta_total,
            r.kappa.map_or("-".into(), |k| format!("{k:.4}")),
            state.marked.len(),
            start.elapsed().as_secs_f64()
        );
        if let Some(every) = args.dump_mesh_every {
            if r.iter % every == 0 {
                dump_mesh(&args.mesh_dir, &format!("mesh_{:03}.txt", r.iter), state.solution.space().mesh())?;
            }
        }
        if args.common.dump_solution.is_some() {
            last_solution = Some(state.solution.clone());
        }
        if args.common.dump_matrix.is_some() {
            last_matrix = Some(state.system.matrix.clone());
        }
        Ok(())
    })?;
    dump_mesh(&args.mesh_dir, "mesh_initial.txt", &study.initial_mesh)?;
    dump_mesh(&args.mesh_dir, "mesh_final.txt", &study.final_mesh)?;
    if let (Some(p), Some(u)) = (&args.common.dump_solution, &last_solution) {
        u.write(create(p)?)?;
    }
    if let (Some(p), Some(a)) = (&args.common.dump_matrix, &last_matrix) {
        a.write_coo(create(p)?)?;
    }
    if let Some(p) = &args.out {
        let mut w = create(p)?;
        write_adapt_csv(&mut w, &study.records)?;
        w.flush()?;
    }
    println!("# effective mesh size h_eff = dofs^(-1/2)");
    println!("iter,dofs,h_eff,eta_total,h2_error,kappa");
    for r in &study.records {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{v:.6e}"));
        println!("{},{},{:.6e},{:.6e},{},{}", r.iter, r.dofs, effective_h(r.dofs), r.eta_total, opt(r.h2_error), opt(r.kappa));
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Study(args) => study(args),
        Command::Adaptive(args) => adaptive(args),
        Command::List => {
            println!("patterns: {}", PatternRegistry::default().names().collect::<Vec<_>>().join(", "));
            println!("solvers:  {}", SolverRegistry::default().names().collect::<Vec<_>>().join(", "));
            Ok(())
        }
    }
}
