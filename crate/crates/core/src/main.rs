use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circle_flow::curvature::curvatures;
use circle_flow::feasibility::{check_exhaustive, check_flow, FeasibilityReport, EXHAUSTIVE_LIMIT};
use circle_flow::io::examples::{example, EXAMPLES};
use circle_flow::io::report::{FeasibilityRow, SolverRow};
use circle_flow::io::trajectory::write_trajectory_csv;
use circle_flow::io::{format_pattern, parse_pattern, PatternFile, RunReport};
use circle_flow::solver::{integrate_flow, newton_solve, FlowConfig, Integrator};
use circle_flow::{KVector, PatternGraph};

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;

/// Margin used by the flow-based check on patterns too large to enumerate.
const FLOW_MARGIN: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(
    name = "circle-flow",
    version,
    about = "Spherical circle patterns with prescribed total geodesic curvature"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Flow,
    Newton,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IntegratorArg {
    Rk4,
    Euler,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the targets are attainable. Exit 0 feasible, 1 infeasible, 2 bad input.
    Check {
        file: PathBuf,
        /// Use the max-flow check with this margin instead of enumeration.
        #[arg(long)]
        flow_margin: Option<f64>,
    },
    /// Solve for the radii realizing the targets.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "flow")]
        method: MethodArg,
        #[arg(long, env = "CIRCLE_FLOW_TOL", default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1e3)]
        max_time: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, value_enum, default_value = "rk4")]
        integrator: IntegratorArg,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long, default_value_t = circle_flow::quadrature::DEFAULT_NODES)]
        quadrature_nodes: usize,
        /// Write the flow trajectory as CSV.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Random initial log-curvatures in [-3, 3] from this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the pattern with the solved radii appended, ready for `report`.
        #[arg(long)]
        emit_pattern: Option<PathBuf>,
    },
    /// Evaluate curvatures and cone angles at the radii given in the file.
    Report { file: PathBuf },
    /// Print a built-in pattern file.
    Example { name: String },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CIRCLE_FLOW_LOG", "warn"))
        .init();
    let cli = Cli::parse();
    let (code, report) = match cli.command {
        Command::Check { file, flow_margin } => cmd_check(&file, flow_margin),
        Command::Solve {
            file,
            method,
            tol,
            max_time,
            step,
            integrator,
            max_iter,
            quadrature_nodes,
            trajectory,
            seed,
            emit_pattern,
        } => {
            let config = FlowConfig {
                step,
                tol,
                max_time,
                integrator: match integrator {
                    IntegratorArg::Rk4 => Integrator::Rk4,
                    IntegratorArg::Euler => Integrator::Euler,
                },
                quadrature_nodes,
                ..FlowConfig::default()
            };
            let opts = SolveOpts {
                method,
                max_iter,
                trajectory,
                seed,
                emit_pattern,
            };
            cmd_solve(&file, &config, &opts)
        }
        Command::Report { file } => cmd_report(&file),
        Command::Example { name } => match example(&name) {
            Some(f) => {
                let _ = write!(std::io::stdout(), "{}", format_pattern(&f));
                return ExitCode::from(EXIT_OK);
            }
            None => {
                eprintln!(
                    "unknown example `{name}`; available: {}",
                    EXAMPLES.join(", ")
                );
                return ExitCode::from(EXIT_INPUT);
            }
        },
    };
    // A closed downstream pipe is not an error worth reporting.
    let _ = writeln!(std::io::stdout(), "{}", report.to_json());
    ExitCode::from(code)
}

fn load(command: &str, path: &Path) -> Result<(PatternFile, PatternGraph), (u8, RunReport)> {
    let fail = |msg: String| {
        eprintln!("{}: {msg}", path.display());
        (EXIT_INPUT, RunReport::failure(command, msg))
    };
    let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
    let file = parse_pattern(&text).map_err(|e| fail(e.to_string()))?;
    let graph = file.graph().map_err(|e| fail(e.to_string()))?;
    for w in graph.warnings() {
        warn!("{w}");
    }
    Ok((file, graph))
}

fn feasibility(
    graph: &PatternGraph,
    flow_margin: Option<f64>,
) -> circle_flow::Result<FeasibilityReport> {
    match flow_margin {
        Some(eps) => check_flow(graph, eps),
        None if graph.vertex_count() <= EXHAUSTIVE_LIMIT => check_exhaustive(graph),
        None => check_flow(graph, FLOW_MARGIN),
    }
}

fn warnings(graph: &PatternGraph) -> Vec<String> {
    graph.warnings().iter().map(|w| w.to_string()).collect()
}

fn cmd_check(path: &Path, flow_margin: Option<f64>) -> (u8, RunReport) {
    let (_, graph) = match load("check", path) {
        Ok(x) => x,
        Err(e) => return e,
    };
    let report = match feasibility(&graph, flow_margin) {
        Ok(r) => r,
        Err(e) => return (EXIT_INPUT, RunReport::failure("check", e)),
    };
    let mut out = RunReport::new("check");
    out.warnings = warnings(&graph);
    let row = FeasibilityRow::new(&graph, &report);
    if !report.feasible {
        eprintln!(
            "infeasible: subset {{{}}} has slack {:e}",
            row.witness.join(", "),
            row.worst_slack
        );
    }
    out.feasibility = Some(row);
    (if report.feasible { EXIT_OK } else { EXIT_FAIL }, out)
}

struct SolveOpts {
    method: MethodArg,
    max_iter: usize,
    trajectory: Option<PathBuf>,
    seed: Option<u64>,
    emit_pattern: Option<PathBuf>,
}

fn cmd_solve(path: &Path, config: &FlowConfig, opts: &SolveOpts) -> (u8, RunReport) {
    let (file, graph) = match load("solve", path) {
        Ok(x) => x,
        Err(e) => return e,
    };
    let fail = |e: &dyn std::fmt::Display| (EXIT_INPUT, RunReport::failure("solve", e));
    let n = graph.vertex_count();
    let k0 = if let Some(seed) = opts.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        KVector::new((0..n).map(|_| rng.gen_range(-3.0..=3.0)).collect()).expect("finite")
    } else {
        match file.radius_vector(&graph) {
            Ok(Some(r)) => r.to_k(),
            Ok(None) => KVector::zeros(n),
            Err(e) => return fail(&e),
        }
    };

    let mut out = RunReport::new("solve");
    out.warnings = warnings(&graph);
    out.config = Some(serde_json::json!({
        "method": format!("{:?}", opts.method).to_lowercase(),
        "step": config.step,
        "tol": config.tol,
        "max_time": config.max_time,
        "integrator": config.integrator,
        "quadrature_nodes": config.quadrature_nodes,
        "max_iter": opts.max_iter,
        "seed": opts.seed,
        "initial_K": k0.as_slice(),
    }));
    let feas = match feasibility(&graph, None) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let feas_row = FeasibilityRow::new(&graph, &feas);
    if !feas.feasible {
        eprintln!(
            "targets are not attainable: subset {{{}}} has slack {:e}",
            feas_row.witness.join(", "),
            feas_row.worst_slack
        );
    }
    out.feasibility = Some(feas_row);

    let mut results = Vec::new();
    if matches!(opts.method, MethodArg::Flow | MethodArg::Both) {
        let (traj, res) = match integrate_flow(&graph, &k0, config) {
            Ok(x) => x,
            Err(e) => return fail(&e),
        };
        info!("flow: {:?} after {} steps", res.termination, res.steps);
        if let Some(p) = &opts.trajectory {
            let written =
                File::create(p).and_then(|f| write_trajectory_csv(BufWriter::new(f), &traj));
            if let Err(e) = written {
                return fail(&format!("{}: {e}", p.display()));
            }
        }
        results.push(("flow", res));
    }
    if matches!(opts.method, MethodArg::Newton | MethodArg::Both) {
        let res = match newton_solve(&graph, &k0, config.tol, opts.max_iter) {
            Ok(x) => x,
            Err(e) => return fail(&e),
        };
        info!(
            "newton: {:?} after {} iterations",
            res.termination, res.steps
        );
        results.push(("newton", res));
    }
    if let [(_, a), (_, b)] = &results[..] {
        out.agreement = Some(a.k_star.max_abs_diff(&b.k_star));
    }
    let primary = &results[0].1;
    match curvatures(&graph, &primary.k_star) {
        Ok(state) => out.set_state(&graph, &primary.k_star, &state),
        Err(e) => return fail(&e),
    }
    if let Some(p) = &opts.emit_pattern {
        let mut with_radii = file.clone();
        with_radii.radii = Some(
            graph
                .vertex_ids()
                .iter()
                .cloned()
                .zip(primary.r_star.as_slice().iter().copied())
                .collect(),
        );
        if let Err(e) = std::fs::write(p, format_pattern(&with_radii)) {
            return fail(&format!("{}: {e}", p.display()));
        }
    }
    let all_converged = results.iter().all(|(_, r)| r.converged);
    out.solvers = results.iter().map(|(m, r)| SolverRow::new(m, r)).collect();
    (if all_converged { EXIT_OK } else { EXIT_FAIL }, out)
}

fn cmd_report(path: &Path) -> (u8, RunReport) {
    let (file, graph) = match load("report", path) {
        Ok(x) => x,
        Err(e) => return e,
    };
    let radii = match file.radius_vector(&graph) {
        Ok(Some(r)) => r,
        Ok(None) => {
            let msg = "missing `radii` section";
            eprintln!("{}: {msg}", path.display());
            return (EXIT_INPUT, RunReport::failure("report", msg));
        }
        Err(e) => return (EXIT_INPUT, RunReport::failure("report", e)),
    };
    let k = radii.to_k();
    let mut out = RunReport::new("report");
    out.warnings = warnings(&graph);
    match curvatures(&graph, &k) {
        Ok(state) => out.set_state(&graph, &k, &state),
        Err(e) => return (EXIT_INPUT, RunReport::failure("report", e)),
    }
    (EXIT_OK, out)
}
