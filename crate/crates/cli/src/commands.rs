//! The four subcommands. Each writes its files into the output directory
//! and returns a one-line report for the terminal.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use petviashvili::continuation::{continue_solve, HomotopyPath};
use petviashvili::diagnostics::{
    fit_phase_line, hypothesis_report, orbit_match, spectrum_shift_check, top_eigenvalues, IterationJacobian,
    IterationMatrix, OrbitFit, SpectrumReport,
};
use petviashvili::factors::FactorSpec;
use petviashvili::iterate::{newton_solve, solve};
use petviashvili::{Domain, Field, IterationConfig, ProblemModel, SolveResult, StabilizingFactor, StopRule, Termination};

use crate::config::{Method, ProblemSpec, RunConfig, SeedSpec, StateSource};
use crate::error::CliError;
use crate::model::{build_problem, build_seed, soliton_parameters};
use crate::output::{trace_csv, write_json, write_profile};

/// Everything needed to re-run a solve, plus its outcome.
#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    status: &'static str,
    termination: &'a Termination,
    iterations: usize,
    residual: f64,
    factor_discrepancy: Option<f64>,
    observed_order: Option<f64>,
    method: Method,
    factor: Option<String>,
    gamma: Option<f64>,
    q: Option<f64>,
    p: f64,
    problem: &'static str,
    domain: Domain,
    residual_tolerance: f64,
    factor_tolerance: f64,
    max_iterations: usize,
    divergence_guard: f64,
    stop_rule: StopRule,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameter: Option<(&'a str, f64)>,
    config: &'a RunConfig,
}

struct Run {
    result: SolveResult,
    factor: Option<StabilizingFactor>,
}

fn factor_for(spec: &FactorSpec, field: &str, problem: &dyn ProblemModel) -> Result<StabilizingFactor, CliError> {
    spec.build(problem).map_err(|e| CliError::config(field, e))
}

fn run_solver(cfg: &RunConfig, problem: &dyn ProblemModel, seed: &Field) -> Result<Run, CliError> {
    let iteration = cfg.iteration.config()?;
    Ok(match cfg.iteration.method {
        Method::Stabilized => {
            let factor = factor_for(&cfg.factor.spec()?, "factor", problem)?;
            Run {
                result: solve(problem, Some(&factor), seed, &iteration)?,
                factor: Some(factor),
            }
        }
        Method::Classical => Run {
            result: solve(problem, None, seed, &iteration)?,
            factor: None,
        },
        Method::Newton => Run {
            result: newton_solve(problem, seed, &iteration)?,
            factor: None,
        },
    })
}

struct Context<'a> {
    command: &'a str,
    cfg: &'a RunConfig,
    iteration: IterationConfig,
}

impl Context<'_> {
    fn write_run(
        &self,
        dir: &Path,
        problem: &dyn ProblemModel,
        run: &Run,
        parameter: Option<(&str, f64)>,
    ) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        let r = &run.result;
        fs::write(dir.join("trace.csv"), trace_csv(&r.trace))?;
        if self.cfg.output.profile {
            write_profile(dir, &r.solution, self.cfg.output.cross_sections)?;
        }
        let it = &self.iteration;
        let summary = Summary {
            command: self.command,
            status: r.trace.termination.label(),
            termination: &r.trace.termination,
            iterations: r.iterations(),
            residual: r.final_residual(),
            factor_discrepancy: r.final_factor_discrepancy(),
            observed_order: r.observed_order,
            method: self.cfg.iteration.method,
            factor: run.factor.as_ref().map(|f| f.descriptor()),
            gamma: run.factor.as_ref().map(|f| f.gamma()),
            q: run.factor.as_ref().map(|f| f.q()),
            p: problem.degree(),
            problem: self.cfg.problem.family(),
            domain: problem.domain(),
            residual_tolerance: it.residual_tolerance,
            factor_tolerance: it.factor_tolerance,
            max_iterations: it.max_iterations,
            divergence_guard: it.divergence_guard,
            stop_rule: it.stop_rule,
            parameter,
            config: self.cfg,
        };
        write_json(dir, "summary.json", &summary)
    }
}

fn describe(r: &SolveResult) -> String {
    format!(
        "{} after {} iterations, residual {:.3e}",
        r.trace.termination.label(),
        r.iterations(),
        r.final_residual()
    )
}

#[derive(Serialize)]
struct OrbitReport {
    eps1: Option<f64>,
    eps2: Option<f64>,
    #[serde(flatten)]
    fit: OrbitFit,
    /// `group_theta0 + lambda2 / 2 * group_x0`, equal to the phase-line
    /// intercept for an exact orbit element.
    group_combination: Option<f64>,
}

fn write_orbit(dir: &Path, spec: &ProblemSpec, seed: &SeedSpec, u: &Field) -> Result<OrbitFit, CliError> {
    let params = soliton_parameters(spec)
        .ok_or_else(|| CliError::config("diagnostics.orbital", "orbit fits need an nls_soliton problem"))?;
    let fit = match orbit_match(u, &params) {
        Ok(f) => f,
        // A diverged run may have no usable peak; still record the line fit
        // when possible.
        Err(_) => fit_phase_line(u, None)?,
    };
    let (eps1, eps2) = match seed {
        SeedSpec::ExactPerturbed { eps1, eps2 } => (Some(*eps1), Some(*eps2)),
        _ => (None, None),
    };
    let group_combination = fit
        .group_theta0
        .zip(fit.group_x0)
        .map(|(t, x)| t + 0.5 * params.lambda2 * x);
    write_json(
        dir,
        "orbitfit.json",
        &OrbitReport {
            eps1,
            eps2,
            fit: fit.clone(),
            group_combination,
        },
    )?;
    Ok(fit)
}

pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<String, CliError> {
    let problem = build_problem(&cfg.problem)?;
    let seed = build_seed(&cfg.seed, &cfg.problem, problem.as_ref())?;
    let run = run_solver(cfg, problem.as_ref(), &seed)?;
    let ctx = Context {
        command: "solve",
        cfg,
        iteration: cfg.iteration.config()?,
    };
    ctx.write_run(out, problem.as_ref(), &run, None)?;
    if cfg.diagnostics.orbital {
        write_orbit(out, &cfg.problem, &cfg.seed, &run.result.solution)?;
    }
    Ok(format!("solve: {}", describe(&run.result)))
}

pub fn cmd_orbital(cfg: &RunConfig, out: &Path) -> Result<String, CliError> {
    if soliton_parameters(&cfg.problem).is_none() {
        return Err(CliError::config("problem.family", "orbital runs need an nls_soliton problem"));
    }
    if !matches!(cfg.seed, SeedSpec::ExactPerturbed { .. }) {
        return Err(CliError::config("seed.kind", "orbital runs need an exact_perturbed seed"));
    }
    let problem = build_problem(&cfg.problem)?;
    let seed = build_seed(&cfg.seed, &cfg.problem, problem.as_ref())?;
    let run = run_solver(cfg, problem.as_ref(), &seed)?;
    let ctx = Context {
        command: "orbital",
        cfg,
        iteration: cfg.iteration.config()?,
    };
    ctx.write_run(out, problem.as_ref(), &run, None)?;
    let fit = write_orbit(out, &cfg.problem, &cfg.seed, &run.result.solution)?;
    Ok(format!(
        "orbital: {}; slope {:.5}, intercept mod 2pi {:.5}",
        describe(&run.result),
        fit.slope,
        fit.intercept_mod_2pi
    ))
}

#[derive(Serialize)]
struct Skipped {
    skipped: String,
}

pub fn cmd_spectrum(cfg: &RunConfig, out: &Path) -> Result<String, CliError> {
    let problem = build_problem(&cfg.problem)?;
    let seed = build_seed(&cfg.seed, &cfg.problem, problem.as_ref())?;
    fs::create_dir_all(out)?;
    let (state, seed_error) = match cfg.diagnostics.state {
        StateSource::Seed => (seed, None),
        StateSource::Solve => {
            let run = run_solver(cfg, problem.as_ref(), &seed)?;
            let ctx = Context {
                command: "spectrum",
                cfg,
                iteration: cfg.iteration.config()?,
            };
            ctx.write_run(out, problem.as_ref(), &run, None)?;
            let error = seed.sub(&run.result.solution).realified();
            (run.result.solution, Some(error))
        }
    };

    let s = IterationMatrix::new(problem.as_ref(), &state)?;
    let k = cfg.diagnostics.spectrum.min(state.real_dim());
    let spec_s = top_eigenvalues(&s, k)?;
    write_json(out, "spectrum_S.json", &spec_s)?;
    let p = problem.degree();
    let report = hypothesis_report(&spec_s, p, seed_error.as_deref());
    write_json(out, "hypothesis_report.json", &report)?;

    // F' needs a factor, which a linear problem does not admit.
    let factor = cfg.factor.spec()?.build(problem.as_ref());
    let shift = match factor {
        Ok(factor) => {
            let jac = IterationJacobian::new(problem.as_ref(), &factor, &state)?;
            let spec_f: SpectrumReport = top_eigenvalues(&jac, k)?;
            write_json(out, "spectrum_F.json", &spec_f)?;
            let shift = spectrum_shift_check(&spec_s, &spec_f, p, factor.q(), cfg.diagnostics.shift_tolerance);
            write_json(out, "shift_check.json", &shift)?;
            Some(shift.passed)
        }
        Err(e) => {
            write_json(
                out,
                "spectrum_F.json",
                &Skipped {
                    skipped: format!("no stabilizing factor for this problem: {e}"),
                },
            )?;
            None
        }
    };

    let moduli: Vec<String> = spec_s.moduli.iter().map(|m| format!("{m:.4}")).collect();
    Ok(format!(
        "spectrum: |lambda(S)| = [{}]; {}{}",
        moduli.join(", "),
        report.verdicts.join("; "),
        match shift {
            Some(true) => "; shift law holds",
            Some(false) => "; shift law FAILS",
            None => "",
        }
    ))
}

#[derive(Serialize)]
struct StageRow {
    parameter: f64,
    refinement: bool,
    status: &'static str,
    iterations: usize,
    residual: f64,
    directory: String,
}

#[derive(Serialize)]
struct ContinuationReport<'a> {
    parameter: &'a str,
    values: &'a [f64],
    completed: bool,
    failure: Option<String>,
    stages: Vec<StageRow>,
}

#[derive(Serialize)]
struct ComparisonRow {
    descriptor: String,
    status: &'static str,
    iterations: usize,
    residual: f64,
    factor_discrepancy: Option<f64>,
    directory: String,
}

fn sanitize(descriptor: &str) -> String {
    descriptor
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' })
        .collect()
}

pub fn cmd_continue(cfg: &RunConfig, out: &Path) -> Result<String, CliError> {
    let block = cfg
        .continuation
        .as_ref()
        .ok_or_else(|| CliError::config("continuation", "the continue command needs a [continuation] block"))?;
    if cfg.iteration.method != Method::Stabilized {
        return Err(CliError::config("iteration.method", "continuation uses the stabilized iteration"));
    }
    let path = match (&block.values, block.start, block.end, block.step) {
        (Some(values), None, None, None) => HomotopyPath::new(&block.parameter, values.clone()),
        (None, Some(a), Some(b), Some(h)) => HomotopyPath::uniform(&block.parameter, a, b, h),
        _ => {
            return Err(CliError::config(
                "continuation",
                "give either `values` or all of `start`, `end`, `step`",
            ))
        }
    }
    .map_err(|e| CliError::config("continuation", e))?
    .with_max_bisections(block.max_bisections);

    let spec_at = |v: f64| cfg.problem.with_parameter(&block.parameter, v);
    let first = build_problem(&spec_at(path.values[0])?)?;
    let seed = build_seed(&cfg.seed, &cfg.problem, first.as_ref())?;
    let factor = cfg.factor.spec()?;
    factor_for(&factor, "factor", first.as_ref())?;
    let iteration = cfg.iteration.config()?;
    let family = |v: f64| -> petviashvili::Result<Box<dyn ProblemModel>> {
        let spec = spec_at(v).map_err(|e| petviashvili::Error::InvalidParameter(e.to_string()))?;
        build_problem(&spec).map_err(|e| petviashvili::Error::InvalidParameter(e.to_string()))
    };
    let result = continue_solve(family, &path, &seed, &factor, &iteration).map_err(|e| match e {
        petviashvili::Error::InvalidParameter(msg) => CliError::Config(msg),
        other => other.into(),
    })?;

    fs::create_dir_all(out)?;
    let ctx = Context {
        command: "continue",
        cfg,
        iteration,
    };
    let mut rows = Vec::new();
    let (mut n_path, mut n_refine) = (0, 0);
    for stage in &result.stages {
        let name = if stage.refinement {
            n_refine += 1;
            format!("refinement_{:02}", n_refine - 1)
        } else {
            n_path += 1;
            format!("stage_{:02}", n_path - 1)
        };
        let problem = build_problem(&spec_at(stage.parameter)?)?;
        let run = Run {
            result: stage.result.clone(),
            factor: Some(factor_for(&factor, "factor", problem.as_ref())?),
        };
        ctx.write_run(&out.join(&name), problem.as_ref(), &run, Some((&block.parameter, stage.parameter)))?;
        rows.push(StageRow {
            parameter: stage.parameter,
            refinement: stage.refinement,
            status: stage.result.trace.termination.label(),
            iterations: stage.result.iterations(),
            residual: stage.result.final_residual(),
            directory: name,
        });
    }
    let counts: Vec<String> = rows.iter().filter(|r| !r.refinement).map(|r| r.iterations.to_string()).collect();
    write_json(
        out,
        "continuation.json",
        &ContinuationReport {
            parameter: &block.parameter,
            values: &path.values,
            completed: result.completed,
            failure: result.failure.clone(),
            stages: rows,
        },
    )?;

    let mut line = format!(
        "continue: {} of {} path values reached{}; stage iterations [{}]",
        result.path_stages().count(),
        path.values.len(),
        if result.completed { "" } else { " (incomplete)" },
        counts.join(", ")
    );
    if result.completed && !block.compare_factors.is_empty() {
        let target = *path.values.last().expect("nonempty path");
        let start = match result.stages.len() {
            0 | 1 => seed.clone(),
            n => result.stages[n - 2].result.solution.clone(),
        };
        let problem = build_problem(&spec_at(target)?)?;
        let ctx = Context {
            command: "continue",
            cfg,
            iteration,
        };
        let mut comparison = Vec::new();
        for d in &block.compare_factors {
            let spec: FactorSpec = d
                .parse()
                .map_err(|e| CliError::config("continuation.compare_factors", e))?;
            let factor = factor_for(&spec, "continuation.compare_factors", problem.as_ref())?;
            let result = solve(problem.as_ref(), Some(&factor), &start, &iteration)?;
            let dir_name = format!("compare_{}", sanitize(d));
            let run = Run {
                result,
                factor: Some(factor),
            };
            ctx.write_run(&out.join(&dir_name), problem.as_ref(), &run, Some((&block.parameter, target)))?;
            let r = &run.result;
            comparison.push(ComparisonRow {
                descriptor: d.clone(),
                status: r.trace.termination.label(),
                iterations: r.iterations(),
                residual: r.final_residual(),
                factor_discrepancy: r.final_factor_discrepancy(),
                directory: dir_name,
            });
        }
        write_json(out, "comparison.json", &comparison)?;
        let parts: Vec<String> = comparison
            .iter()
            .map(|c| format!("{} {} ({})", c.descriptor, c.iterations, c.status))
            .collect();
        line.push_str(&format!("; comparison at {target}: {}", parts.join(", ")));
    }
    Ok(line)
}

/// Output directory: `--out`, else `output.directory`, else `./out`.
pub fn output_dir(cfg: &RunConfig, flag: Option<&PathBuf>) -> PathBuf {
    flag.cloned()
        .or_else(|| cfg.output.directory.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}
