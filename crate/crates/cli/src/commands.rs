use std::time::Instant;

use layerfem::analysis::{
    convergence_study, knot_error, optimize_sigma_golden, sigma_grid, solution_extrema, sweep_sigma,
};
use layerfem::{solve, GradedMesh};

use crate::config::{Command, RatioSetting, RunConfig};
use crate::report::{self, MethodRun, Results, SolveOutput, Summary};
use crate::CliError;

/// Files produced by one command, plus lines for stdout.
pub struct Artifacts {
    pub files: Vec<(String, String)>,
    pub messages: Vec<String>,
}

pub fn execute(config: &RunConfig) -> Result<Artifacts, CliError> {
    let started = Instant::now();
    let problem = config.problem.build()?;
    let options = config.solver_options();
    let mut messages = Vec::new();

    let (mut files, results) = match (config.command, &config.ratio) {
        (Command::Solve, &RatioSetting::Fixed { sigma }) => {
            let elements = config.elements.expect("solve has N");
            let mesh = GradedMesh::new(0.0, 1.0, elements, sigma)?;
            let mut runs = Vec::with_capacity(config.methods.len());
            for &method in &config.methods {
                let solution = solve(&problem, &mesh, method, &options)?;
                let errors = problem.has_exact().then(|| knot_error(&solution, &problem)).transpose()?;
                match &errors {
                    Some(e) => messages.push(format!("{method}: linf = {:e} at x = {}", e.linf, e.argmax_x)),
                    None => messages.push(format!("{method}: solved, no exact solution")),
                }
                runs.push(MethodRun {
                    method,
                    interior_extrema: solution_extrema(&solution),
                    values: solution.knot_values,
                    errors,
                });
            }
            let exact = problem
                .exact
                .as_ref()
                .map(|u| mesh.knots().iter().map(|&x| u.eval(x)).collect());
            let output = SolveOutput { knots: mesh.knots().to_vec(), exact, runs };
            let mut files = vec![("solution.csv".to_string(), output.csv())];
            files.extend(output.plots());
            (files, Results::Solve { methods: output.summaries() })
        }
        (Command::Converge, &RatioSetting::Fixed { sigma }) => {
            let mut tables = Vec::with_capacity(config.methods.len());
            for &method in &config.methods {
                let table = convergence_study(&problem, method, sigma, &config.n_list, &options)?;
                let orders: Vec<String> = table.orders().iter().map(|o| format!("{o:.3}")).collect();
                messages.push(format!("{method}: orders [{}]", orders.join(", ")));
                tables.push(table);
            }
            let mut files = vec![("convergence.csv".to_string(), report::convergence_csv(&tables))];
            files.extend(report::convergence_plots(&tables));
            (files, Results::Convergence { methods: report::convergence_summaries(&tables) })
        }
        (Command::Sweep, &RatioSetting::Grid { lo, step, hi }) => {
            let grid = sigma_grid(lo, step, hi)?;
            let elements = config.elements.expect("sweep has N");
            let mut results = Vec::with_capacity(config.methods.len());
            for &method in &config.methods {
                results.push((method, sweep_sigma(&problem, elements, method, &grid, &options)?));
            }
            for (method, r) in &results {
                messages.push(format!("{method}: best sigma = {} (linf = {:e})", r.best_sigma, r.best_linf));
            }
            let mut files = vec![("sweep.csv".to_string(), report::sweep_csv(&results))];
            files.extend(report::search_plots(&results));
            (files, Results::Search { methods: report::search_summaries(&results) })
        }
        (Command::Tune, &RatioSetting::Golden { lo, hi, tol }) => {
            let elements = config.elements.expect("tune has N");
            let mut results = Vec::with_capacity(config.methods.len());
            for &method in &config.methods {
                results.push((
                    method,
                    optimize_sigma_golden(&problem, elements, method, (lo, hi), tol, &options)?,
                ));
            }
            for (method, r) in &results {
                messages.push(format!("{method}: best sigma = {} (linf = {:e})", r.best_sigma, r.best_linf));
            }
            let mut files = vec![("tune.csv".to_string(), report::search_csv(&results))];
            files.extend(report::search_plots(&results));
            (files, Results::Search { methods: report::search_summaries(&results) })
        }
        (command, ratio) => unreachable!("{command:?} resolved with {ratio:?}"),
    };

    let summary = Summary {
        config,
        results,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    files.insert(1, ("summary.json".to_string(), summary.to_json()));
    Ok(Artifacts { files, messages })
}
