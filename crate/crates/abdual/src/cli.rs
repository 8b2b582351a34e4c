//! Command-line front door.
//!
//! Subcommands: `dualize`, `wfs`, `solve`, `oracle-solve`, `gsm`, `check`.
//! Input is a framework file or `-` for stdin. Output is deterministic for
//! a fixed seed: sorted, line-oriented, and byte-identical across runs.
//! Exit codes: 0 for success (for `solve`/`oracle-solve`/`gsm`, at least
//! one solution; for `check`, an empty diff), 1 for "no solution" or a
//! non-empty diff, 2 for any error.


use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};

use crate::dual::{dual_fold, dual_unfold, dual_size_check};
use crate::engine::{self, Context, DualTransform, EvalOptions};
use crate::framework::AbductiveFramework;
use crate::gsm::{self, GsmMode};
use crate::interp::Interpretation;
use crate::literal::Literal;
use crate::oracle;
use crate::parser;

#[derive(Parser, Debug)]
#[command(
    name = "abdual",
    about = "Abductive query evaluation over ground extended logic programs"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Partial,
    Total,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the dual program.
    Dualize {
        /// Framework file, or `-` for stdin.
        input: String,
        /// Use the unfolded transformation instead of the folded one.
        #[arg(long)]
        unfold: bool,
        /// Attach a query rule before dualizing.
        #[arg(long)]
        query: Option<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Print the well-founded model.
    Wfs {
        input: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Evaluate a query with the tabled engine; one line per solution.
    Solve {
        input: String,
        #[arg(long)]
        query: String,
        /// Keep only ⊆-minimal answer contexts.
        #[arg(long)]
        minimal: bool,
        /// Dump the final forest.
        #[arg(long)]
        debug_forest: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        step_budget: u64,
        /// Run over the unfolded dual instead of the folded one.
        #[arg(long)]
        unfold: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Enumerate solutions by brute force over all scenarios.
    OracleSolve {
        input: String,
        #[arg(long)]
        query: String,
        #[arg(long)]
        minimal: bool,
        #[arg(long, default_value_t = oracle::DEFAULT_MAX_ABDUCIBLES)]
        max_abducibles: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Compute generalized (partial) stable models.
    Gsm {
        input: String,
        /// Optional filter: keep models in which this literal is true.
        #[arg(long)]
        query: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Partial)]
        mode: ModeArg,
        #[arg(long, default_value_t = oracle::DEFAULT_MAX_ABDUCIBLES)]
        max_abducibles: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Cross-check the engine against the brute-force oracle.
    Check {
        input: String,
        /// Query to check; without it, every literal of the program.
        #[arg(long)]
        query: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        step_budget: u64,
        #[arg(long, default_value_t = oracle::DEFAULT_MAX_ABDUCIBLES)]
        max_abducibles: usize,
    },
}

/// Outcome of a subcommand: exit code plus the text for stdout.
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn load_framework(path: &str) -> Result<AbductiveFramework, String> {
    let text = read_input(path)?;
    parser::parse_framework(&text).map_err(|e| e.to_string())
}

fn render_context(ctx: &Context) -> String {
    let parts: Vec<String> = ctx.iter().map(|o| o.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn render_model_sections(m: &Interpretation, fw: &AbductiveFramework) -> String {
    let mut scope = fw.combined_program().objective_literals();
    scope.extend(fw.abducibles.iter().copied());
    let truths: Vec<String> = m.true_set().iter().map(|o| o.to_string()).collect();
    let falses: Vec<String> = m.false_set().iter().map(|o| format!("not {o}")).collect();
    let undefined: Vec<String> = scope
        .iter()
        .filter(|o| !m.true_set().contains(o) && !m.false_set().contains(o))
        .map(|o| o.to_string())
        .collect();
    let flag = if m.is_consistent() { "no" } else { "yes" };
    format!(
        "true: {}\nfalse: {}\nundefined: {}\nparaconsistent: {}\n",
        truths.join(", "),
        falses.join(", "),
        undefined.join(", "),
        flag
    )
}

/// Run a parsed command, returning output instead of printing, so the
/// whole surface stays testable.
pub fn execute(config: RunConfig) -> Result<Outcome, String> {
    match config.command {
        Command::Dualize { input, unfold, query, format } => {
            let fw = load_framework(&input)?;
            let program = match query {
                Some(q) => {
                    let lit = parser::parse_query(&q).map_err(|e| e.to_string())?;
                    crate::dual::attach_query(&fw, &lit).map_err(|e| e.to_string())?
                }
                None => fw.combined_program(),
            };
            let dp = if unfold {
                dual_unfold(&program, &fw.abducibles)
            } else {
                dual_fold(&program, &fw.abducibles)
            };
            let check = dual_size_check(&program, &fw.abducibles);
            let mut out = parser::serialize(dp.program());
            if format == OutputFormat::Machine {
                out = dp
                    .program()
                    .iter()
                    .zip(dp.origins())
                    .map(|(r, o)| format!("rule\t{o:?}\t{}\n", parser::serialize_rule(r)))
                    .collect::<String>();
                out.push_str(&format!(
                    "size\tin={}\tout={}\tbound_ok={}\n",
                    check.size_in, check.size_out, check.bound_ok
                ));
            }
            Ok(Outcome { exit_code: 0, stdout: out })
        }
        Command::Wfs { input, format } => {
            let fw = load_framework(&input)?;
            let m = oracle::wfs(&fw.combined_program());
            let out = match format {
                OutputFormat::Text => render_model_sections(&m, &fw),
                OutputFormat::Machine => {
                    let mut lines = String::new();
                    for l in m.literals() {
                        lines.push_str(&format!("literal\t{l}\n"));
                    }
                    lines
                }
            };
            Ok(Outcome { exit_code: 0, stdout: out })
        }
        Command::Solve {
            input,
            query,
            minimal,
            debug_forest,
            seed,
            step_budget,
            unfold,
            format,
        } => {
            let fw = load_framework(&input)?;
            let q = parser::parse_query(&query).map_err(|e| e.to_string())?;
            let opts = EvalOptions {
                seed,
                step_budget,
                transform: if unfold { DualTransform::Unfold } else { DualTransform::Fold },
            };
            let eval = engine::run(&fw, Some(&q), opts).map_err(|e| e.to_string())?;
            let answers =
                if minimal { eval.minimal_answers() } else { eval.query_answers() };
            let mut out = String::new();
            match format {
                OutputFormat::Text => {
                    for a in &answers {
                        out.push_str(&render_context(a));
                        out.push('\n');
                    }
                }
                OutputFormat::Machine => {
                    for a in &answers {
                        out.push_str(&format!("answer\t{}\n", render_context(a)));
                    }
                    out.push_str(&format!(
                        "ops\ttotal={}\tbound={}\n",
                        eval.counts.total(),
                        eval.operation_bound
                    ));
                }
            }
            if debug_forest {
                out.push_str("-- forest --\n");
                out.push_str(&eval.forest.dump_text());
                for (ctx, delays) in eval.conditional_query_answers() {
                    let ds: Vec<String> = delays.iter().map(|l| l.to_string()).collect();
                    out.push_str(&format!(
                        "conditional\t{}\tdelays=[{}]\n",
                        render_context(&ctx),
                        ds.join(", ")
                    ));
                }
                if format == OutputFormat::Machine {
                    out.push_str(&eval.forest.dump_records());
                }
            }
            let exit_code = if answers.is_empty() { 1 } else { 0 };
            Ok(Outcome { exit_code, stdout: out })
        }
        Command::OracleSolve { input, query, minimal, max_abducibles, format } => {
            let fw = load_framework(&input)?;
            let q = parser::parse_query(&query).map_err(|e| e.to_string())?;
            let sols = oracle::brute_force_solutions(&fw, &q, max_abducibles)
                .map_err(|e| e.to_string())?;
            let mut out = String::new();
            let mut any = false;
            for sol in &sols {
                if minimal && !sol.minimal {
                    continue;
                }
                any = true;
                let line = render_context(&sol.abduced);
                match format {
                    OutputFormat::Text => out.push_str(&format!("{line}\n")),
                    OutputFormat::Machine => out.push_str(&format!(
                        "solution\t{line}\tminimal={}\n",
                        sol.minimal
                    )),
                }
            }
            Ok(Outcome { exit_code: if any { 0 } else { 1 }, stdout: out })
        }
        Command::Gsm { input, query, mode, max_abducibles, format } => {
            let fw = load_framework(&input)?;
            let q = match query {
                Some(text) => Some(parser::parse_query(&text).map_err(|e| e.to_string())?),
                None => None,
            };
            let mode = match mode {
                ModeArg::Partial => GsmMode::Partial,
                ModeArg::Total => GsmMode::Total,
            };
            let sols = gsm::gsm_solve(&fw, q.as_ref(), mode, max_abducibles)
                .map_err(|e| e.to_string())?;
            let mut out = String::new();
            for sol in &sols {
                match format {
                    OutputFormat::Text => out.push_str(&format!(
                        "{} model: {}\n",
                        render_context(&sol.context),
                        sol.model
                    )),
                    OutputFormat::Machine => out.push_str(&format!(
                        "gsm\t{}\tmodel={}\n",
                        render_context(&sol.context),
                        sol.model
                    )),
                }
            }
            Ok(Outcome { exit_code: if sols.is_empty() { 1 } else { 0 }, stdout: out })
        }
        Command::Check { input, query, seed, step_budget, max_abducibles } => {
            let fw = load_framework(&input)?;
            let queries: Vec<Literal> = match query {
                Some(text) => vec![parser::parse_query(&text).map_err(|e| e.to_string())?],
                None => fw
                    .program
                    .literals()
                    .into_iter()
                    .filter(|l| !l.objective().symbol().is_reserved())
                    .collect(),
            };
            let mut out = String::new();
            let mut diffs = 0usize;
            for q in &queries {
                let opts = EvalOptions { seed, step_budget, transform: DualTransform::Fold };
                let eval = engine::run(&fw, Some(q), opts).map_err(|e| e.to_string())?;
                let answers = eval.query_answers();
                let sols = oracle::brute_force_solutions(&fw, q, max_abducibles)
                    .map_err(|e| e.to_string())?;
                for a in &answers {
                    if !sols.iter().any(|s| a.is_subset(&s.abduced)) {
                        diffs += 1;
                        out.push_str(&format!(
                            "diff\tquery={q}\tanswer {} extends no solution\n",
                            render_context(a)
                        ));
                    }
                }
                for s in sols.iter().filter(|s| s.minimal) {
                    if !answers.contains(&s.abduced) {
                        diffs += 1;
                        out.push_str(&format!(
                            "diff\tquery={q}\tminimal solution {} has no answer\n",
                            render_context(&s.abduced)
                        ));
                    }
                }
            }
            out.push_str(&format!("checked {} queries, {diffs} diffs\n", queries.len()));
            Ok(Outcome { exit_code: if diffs == 0 { 0 } else { 1 }, stdout: out })
        }
    }
}
