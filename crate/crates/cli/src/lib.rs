//! Command-line front end. [`run`] takes the argument list and the three
//! standard streams so that every subcommand can be driven in-process.

mod args;
mod play;

use std::fmt;
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use clap::Parser;
use plmu::arena::{annotate_arena_values, Arena};
use plmu::denotational::{annotate_env, eval, ConvergenceReport, Env, FixpointConfig, SolveMethod};
use plmu::formula::{Formula, VarName};
use plmu::game::{best_response_sweep, estimate_value, EstimateParams, GreedyStrategy, Player, ValueEstimate};
use plmu::plts::Plts;
use plmu::random::{random_env_seeded, FormulaGenerator};

pub use args::{Cli, Command, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

/// An error attributable to the command line or its input files.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Result<T> = std::result::Result<T, InputError>;

fn input_err(msg: impl Into<String>) -> InputError {
    InputError(msg.into())
}

/// Parse `args` (including the program name) and run the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Eval(a) => cmd_eval(&a, stdout),
        Command::Arena(a) => cmd_arena(&a, stdout),
        Command::Simulate(a) => cmd_simulate(&a, stdout),
        Command::Equiv(a) => cmd_equiv(&a, stdout),
        Command::Play(a) => play::cmd_play(&a, stdin, stdout),
        Command::Gen(a) => cmd_gen(&a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}

struct Problem {
    model: Plts,
    formula: Formula,
    env: Env,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn load(inputs: &args::Inputs) -> Result<Problem> {
    let mut pos = inputs.positional.iter();
    let model_path = match (&inputs.model, pos.next()) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => p.into(),
        (None, None) => return Err(input_err("no model given (use --model PATH)")),
    };
    let model = Plts::parse(&read(&model_path)?).map_err(|e| input_err(format!("{}: {e}", model_path.display())))?;
    let text = match (&inputs.formula, &inputs.formula_file, pos.next()) {
        (Some(f), _, _) => f.clone(),
        (None, Some(p), _) => read(p)?,
        (None, None, Some(f)) => f.clone(),
        (None, None, None) => return Err(input_err("no formula given (use --formula STR)")),
    };
    let formula = text
        .parse::<Formula>()
        .map_err(|e| input_err(format!("formula: {e}")))?
        .to_product_normal_form();
    let env = match &inputs.env {
        Some(p) => Env::parse(&read(p)?, &model)?,
        None => Env::new(),
    };
    Ok(Problem { model, formula, env })
}

fn fix_config(a: &args::FixpointArgs) -> Result<FixpointConfig> {
    let cfg = FixpointConfig {
        tolerance: a.tol,
        max_iters: a.max_iters,
        exact_thresholds: !a.no_exact_thresholds,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn estimate_params(a: &args::SamplingArgs) -> Result<EstimateParams> {
    for (name, v) in [("--samples", a.samples), ("--depth", a.depth), ("--nodes", a.nodes)] {
        if v == 0 {
            return Err(input_err(format!("{name} must be positive")));
        }
    }
    Ok(EstimateParams {
        samples: a.samples,
        depth: a.depth,
        nodes: a.nodes,
        seed: a.seed,
    })
}

fn selected_states(m: &Plts, state: &Option<String>) -> Result<Vec<usize>> {
    match state {
        Some(name) => Ok(vec![m
            .state(name)
            .ok_or_else(|| input_err(format!("unknown state `{name}`")))?]),
        None => Ok((0..m.num_states()).collect()),
    }
}

fn write_report(out: &mut dyn Write, report: &ConvergenceReport, format: Format) -> Result<()> {
    match format {
        Format::Text => {
            if !report.binders.is_empty() {
                writeln!(out, "convergence:")?;
                for line in report.to_table().lines() {
                    writeln!(out, "  {line}")?;
                }
            }
        }
        Format::Kv => {
            for b in &report.binders {
                let method = match b.method {
                    SolveMethod::Exact => "exact",
                    SolveMethod::Iterative => "iterate",
                };
                writeln!(out, "binder.{}.method={method}", b.variable)?;
                writeln!(out, "binder.{}.iterations={}", b.variable, b.iterations)?;
                writeln!(out, "binder.{}.residual={}", b.variable, b.max_residual)?;
                writeln!(out, "binder.{}.converged={}", b.variable, b.converged)?;
            }
        }
    }
    writeln!(out, "converged={}", report.converged())?;
    Ok(())
}

fn cmd_eval(a: &args::EvalArgs, out: &mut dyn Write) -> Result<i32> {
    let pb = load(&a.inputs)?;
    let cfg = fix_config(&a.fix)?;
    let (v, report) = eval(&pb.formula, &pb.env, &pb.model, &cfg)?;
    if a.format == Format::Text {
        writeln!(out, "formula: {}", pb.formula)?;
    }
    for p in 0..pb.model.num_states() {
        writeln!(out, "{}={}", pb.model.state_name(p), v[p])?;
    }
    write_report(out, &report, a.format)?;
    Ok(if report.converged() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_arena(a: &args::ArenaArgs, out: &mut dyn Write) -> Result<i32> {
    let pb = load(&a.inputs)?;
    let arena = Arena::build(&pb.formula, &pb.model, &pb.env)?;
    match a.format {
        Format::Text => write!(out, "{}", arena.dump())?,
        Format::Kv => {
            writeln!(out, "formula={}", arena.formula())?;
            writeln!(out, "states={}", arena.num_states())?;
            for (o, n) in arena.owner_counts() {
                writeln!(out, "owner.{o}={n}")?;
            }
            for (x, pr) in arena.variable_priorities() {
                writeln!(out, "priority.{x}={pr}")?;
            }
            for s in 0..arena.num_states() {
                let succ: Vec<String> = match arena.nature_weights(s) {
                    Some(w) => arena.edges(s).iter().zip(w).map(|(t, w)| format!("{t}:{w}")).collect(),
                    None => arena.edges(s).iter().map(|t| t.to_string()).collect(),
                };
                writeln!(
                    out,
                    "state.{s}={} {} {} -> {}",
                    arena.owner(s),
                    arena.priority(s),
                    arena.describe(s),
                    succ.join(" ")
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// Arena, denotational labelling and greedy strategy for one problem.
struct Solved {
    arena: Arena,
    values: Vec<f64>,
    greedy: GreedyStrategy,
    report: ConvergenceReport,
}

fn solve(pb: &Problem, cfg: &FixpointConfig) -> Result<Solved> {
    let arena = Arena::build(&pb.formula, &pb.model, &pb.env)?;
    let (star, report) = annotate_env(&pb.formula, &pb.env, &pb.model, cfg)?;
    let values = annotate_arena_values(&arena, &star, &pb.model, cfg)?;
    let greedy = GreedyStrategy::new(values.clone());
    Ok(Solved {
        arena,
        values,
        greedy,
        report,
    })
}

fn write_estimate(out: &mut dyn Write, name: &str, e: &ValueEstimate, format: Format) -> Result<()> {
    match format {
        Format::Text => writeln!(out, "{name}: {e}")?,
        Format::Kv => {
            writeln!(out, "state={name}")?;
            write!(out, "{}", e.to_kv())?;
        }
    }
    Ok(())
}

fn cmd_simulate(a: &args::SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let pb = load(&a.inputs)?;
    let cfg = fix_config(&a.fix)?;
    let params = estimate_params(&a.sampling)?;
    let states = selected_states(&pb.model, &a.state)?;
    let s = solve(&pb, &cfg)?;
    if a.format == Format::Text {
        writeln!(out, "formula: {}", pb.formula)?;
    }
    for p in states {
        let root = s.arena.root(p);
        let e = estimate_value(&s.arena, root, &s.greedy, &s.greedy, &params);
        write_estimate(out, pb.model.state_name(p), &e, a.format)?;
        if a.adversaries > 0 {
            let seeds: Vec<u64> = (0..a.adversaries).collect();
            let w = best_response_sweep(&s.arena, root, &s.greedy, Player::P1, &seeds, &s.greedy, &params);
            match a.format {
                Format::Text => writeln!(out, "{} worst of {} adversaries: {w}", pb.model.state_name(p), seeds.len() + 1)?,
                Format::Kv => {
                    writeln!(out, "sweep.lo={}", w.lo)?;
                    writeln!(out, "sweep.hi={}", w.hi)?;
                }
            }
        }
    }
    Ok(EXIT_OK)
}

struct EquivRow {
    state: String,
    denot: f64,
    est: ValueEstimate,
    pass: bool,
}

fn equiv_rows(
    pb: &Problem,
    cfg: &FixpointConfig,
    params: &EstimateParams,
    states: &[usize],
    slack: f64,
    shift: f64,
) -> Result<(Vec<EquivRow>, bool)> {
    let s = solve(pb, cfg)?;
    let rows = states
        .iter()
        .map(|&p| {
            let root = s.arena.root(p);
            let denot = s.values[root] + shift;
            let est = estimate_value(&s.arena, root, &s.greedy, &s.greedy, params);
            let lo = est.lo - 3.0 * est.stderr_lo - slack;
            let hi = est.hi + 3.0 * est.stderr_hi + slack;
            EquivRow {
                state: pb.model.state_name(p).to_string(),
                denot,
                est,
                pass: lo <= denot && denot <= hi,
            }
        })
        .collect();
    Ok((rows, s.report.converged()))
}

fn write_rows(out: &mut dyn Write, rows: &[EquivRow], format: Format, indent: &str) -> Result<()> {
    for r in rows {
        let flag = if r.pass { "PASS" } else { "FAIL" };
        match format {
            Format::Text => writeln!(
                out,
                "{indent}{}: denot={:.6} sim=[{:.4}, {:.4}] stderr=({:.4}, {:.4}) {flag}",
                r.state, r.denot, r.est.lo, r.est.hi, r.est.stderr_lo, r.est.stderr_hi
            )?,
            Format::Kv => {
                writeln!(out, "state={}", r.state)?;
                writeln!(out, "denot={}", r.denot)?;
                write!(out, "{}", r.est.to_kv())?;
                writeln!(out, "result={flag}")?;
            }
        }
    }
    Ok(())
}

/// The `i`-th instance of a random equivalence batch.
fn batch_instance(seed: u64, i: usize) -> Problem {
    let s = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
    let n = 2 + i % 3;
    let model = Plts::random(s, n, 2, 2, 3);
    let formula = FormulaGenerator::branching_light(5, &["a", "b"])
        .with_free_vars(&["Z"])
        .generate_seeded(s);
    let env = random_env_seeded(s, &[VarName::new("Z").expect("valid name")], n);
    Problem { model, formula, env }
}

fn cmd_equiv(a: &args::EquivArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = fix_config(&a.fix)?;
    let params = estimate_params(&a.sampling)?;
    if a.slack.is_nan() || a.slack < 0.0 {
        return Err(input_err("--slack must be non-negative"));
    }
    let shift = a.inject_mismatch.unwrap_or(0.0);
    let Some(n) = a.random else {
        let pb = load(&a.inputs)?;
        let states = selected_states(&pb.model, &a.state)?;
        let (rows, converged) = equiv_rows(&pb, &cfg, &params, &states, a.slack, shift)?;
        if a.format == Format::Text {
            writeln!(out, "formula: {}", pb.formula)?;
        }
        write_rows(out, &rows, a.format, "")?;
        let all = rows.iter().all(|r| r.pass) && converged;
        writeln!(out, "result={}", if all { "PASS" } else { "FAIL" })?;
        return Ok(if all { EXIT_OK } else { EXIT_FAIL });
    };
    if n == 0 {
        return Err(input_err("--random must be positive"));
    }
    let min_pass = a.min_pass.unwrap_or((9 * n).div_ceil(10));
    let mut passed = 0;
    for i in 0..n {
        let pb = batch_instance(a.sampling.seed, i);
        let states: Vec<usize> = (0..pb.model.num_states()).collect();
        let (rows, converged) = equiv_rows(&pb, &cfg, &params, &states, a.slack, shift)?;
        let ok = converged && rows.iter().all(|r| r.pass);
        passed += ok as usize;
        let flag = if ok { "PASS" } else { "FAIL" };
        match a.format {
            Format::Text => writeln!(out, "instance {i}: states={} formula={} {flag}", states.len(), pb.formula)?,
            Format::Kv => {
                writeln!(out, "instance={i}")?;
                writeln!(out, "formula={}", pb.formula)?;
            }
        }
        write_rows(out, &rows, a.format, "  ")?;
        if a.format == Format::Kv {
            writeln!(out, "instance_result={flag}")?;
        }
    }
    let ok = passed >= min_pass;
    writeln!(out, "passed={passed}/{n}")?;
    writeln!(out, "required={min_pass}")?;
    writeln!(out, "result={}", if ok { "PASS" } else { "FAIL" })?;
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_gen(a: &args::GenArgs, out: &mut dyn Write) -> Result<i32> {
    if a.states == 0 || a.labels == 0 || a.depth == 0 {
        return Err(input_err("--states, --labels and --depth must be positive"));
    }
    let model = Plts::random(a.seed, a.states, a.labels, 2, 3);
    let labels: Vec<&str> = model.labels().iter().map(|l| l.as_str()).collect();
    let formula = FormulaGenerator::branching_light(a.depth, &labels).generate_seeded(a.seed);
    let model_text = model.to_text();
    let formula_text = format!("{formula}\n");
    match &a.model_out {
        Some(p) => fs::write(p, &model_text).map_err(|e| input_err(format!("{}: {e}", p.display())))?,
        None => write!(out, "{model_text}")?,
    }
    match &a.formula_out {
        Some(p) => fs::write(p, &formula_text).map_err(|e| input_err(format!("{}: {e}", p.display())))?,
        None => write!(out, "# formula: {formula_text}")?,
    }
    Ok(EXIT_OK)
}
