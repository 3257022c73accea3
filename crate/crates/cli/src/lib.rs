//! Command-line front end.
//!
//! Exit status: 0 when every assertion holds, 1 when a verification
//! assertion fails (the counterexample is printed), 2 for usage, domain and
//! hypothesis errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use repclass::backend::BackendInfo;
use repclass::identities::{exhaustive_identity_suite, random_identity_suite, DEFAULT_SEED};
use repclass::oracles::{
    eq21_check, lemma21_check, verify_construction, ConstructionCase, ConstructionParams, IntersectionData,
};
use repclass::report::{
    emit_report, parse_set_literal, CheckOutcome, CheckStatus, ReportDocument, ReportFormat, ReportResults, Verdict,
};
use repclass::search::{find_equal_partitions, run_equal_repfn, verify_theorem, SearchSpec, Theorem, VerifyOptions};
use repclass::{Backend, Error, ResidueSet};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "repclass", version, about = "Exact representation functions over Z_m")]
struct Cli {
    /// Convolution backend.
    #[arg(long, global = true, default_value = "auto", value_parser = parse_backend)]
    backend: Backend,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Zero all timing fields and drop --jobs/--checkpoint from the command
    /// echo, so equivalent runs print identical bytes.
    #[arg(long, global = true)]
    stable_output: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse::<Backend>().map_err(|e| e.to_string())
}

fn parse_set(s: &str) -> Result<ResidueSet, String> {
    parse_set_literal(s).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Representation functions of a single set.
    #[command(subcommand)]
    Repfn(RepfnCmd),
    /// Explicit constructions.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Oracle checks.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Exhaustive searches.
    #[command(subcommand)]
    Search(SearchCmd),
    /// Exhaustive verification of a characterization statement.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum RepfnCmd {
    /// Print R_A, or the cross function R_{A,B} with --cross.
    Eval {
        #[arg(long, value_parser = parse_set)]
        set: ResidueSet,
        #[arg(long, value_parser = parse_set)]
        cross: Option<ResidueSet>,
    },
}

#[derive(Subcommand, Debug)]
enum ConstructCmd {
    /// Build the equal-R covering pair for 4 | m.
    Thm2 {
        #[arg(long)]
        m: usize,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        case: u8,
    },
}

#[derive(Subcommand, Debug)]
enum CheckCmd {
    /// Equal R forces an even intersection.
    Lemma21 {
        #[arg(long, value_parser = parse_set)]
        a: ResidueSet,
        #[arg(long, value_parser = parse_set)]
        b: ResidueSet,
    },
    /// The intersection sum identity; C is labeled in increasing order.
    Eq21 {
        #[arg(long, value_parser = parse_set)]
        a: ResidueSet,
        #[arg(long, value_parser = parse_set)]
        c: ResidueSet,
    },
    /// Structural identities over all small sets and seeded random sets.
    Identities {
        #[arg(long, default_value_t = 10)]
        max_m: usize,
        #[arg(long, default_value_t = 1000)]
        random: usize,
        #[arg(long, default_value_t = 4096)]
        random_max_m: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum SearchCmd {
    /// Covering pairs A ∪ B = Z_m with |A ∩ B| = s and R_A = R_B.
    Partitions {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        s: usize,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        up_to_symmetry: bool,
        #[arg(long, hide = true)]
        halt_after_units: Option<usize>,
    },
    /// Classes of k-subsets sharing one representation function.
    EqualRepfn {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        exclude_half_shift: bool,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    theorem: TheoremArg,
    /// Comma-separated moduli.
    #[arg(long, value_delimiter = ',', required = true)]
    m_list: Vec<usize>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    no_prune: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TheoremArg {
    Thm1,
    Thm2,
    Thm3,
}

impl From<TheoremArg> for Theorem {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::Thm1 => Theorem::Thm1,
            TheoremArg::Thm2 => Theorem::Thm2,
            TheoremArg::Thm3 => Theorem::Thm3,
        }
    }
}

/// Runs the tool with `argv` (including the program name) and stdout/stderr.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run_cli`] with explicit output streams.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut command: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    if cli.stable_output {
        command = without_execution_flags(command);
    }
    match execute(&cli, command) {
        Ok(Outcome { mut doc, text }) => {
            if cli.stable_output {
                doc.stabilize();
            }
            let rendered = match cli.format {
                Format::Text => Ok(text),
                Format::Json => emit_report(&doc, ReportFormat::Json),
                Format::Csv => emit_report(&doc, ReportFormat::Csv),
            };
            match rendered {
                Ok(s) => {
                    if out.write_all(s.as_bytes()).is_err() {
                        return EXIT_USAGE;
                    }
                    match doc.verdict {
                        Verdict::Pass => EXIT_PASS,
                        Verdict::Fail => EXIT_FAIL,
                    }
                }
                Err(e) => report_error(err, &e),
            }
        }
        Err(e) => report_error(err, &e),
    }
}

/// Flags that change how a run executes but not what it computes.
const EXECUTION_FLAGS: [&str; 3] = ["--jobs", "--checkpoint", "--halt-after-units"];

/// Drops execution-only flags (and their values) from a command echo.
fn without_execution_flags(args: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        if EXECUTION_FLAGS.contains(&arg.as_str()) {
            iter.next();
        } else if !EXECUTION_FLAGS.iter().any(|f| arg.starts_with(&format!("{f}="))) {
            out.push(arg);
        }
    }
    out
}

fn report_error(err: &mut dyn Write, e: &Error) -> i32 {
    let kind = match e {
        Error::Hypothesis(_) => "hypothesis not met",
        Error::CheckpointIo { .. } | Error::CheckpointCorrupt { .. } => "checkpoint error",
        Error::Interrupted { .. } => "interrupted",
        _ => "error",
    };
    let _ = writeln!(err, "repclass: {kind}: {e}");
    EXIT_USAGE
}

struct Outcome {
    doc: ReportDocument,
    text: String,
}

fn verdict(pass: bool) -> Verdict {
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn execute(cli: &Cli, command: Vec<String>) -> repclass::Result<Outcome> {
    let backend = cli.backend;
    let info = BackendInfo::new(backend);
    let started = std::time::Instant::now();
    let (results, pass, text) = match &cli.command {
        Command::Repfn(RepfnCmd::Eval { set, cross }) => {
            let repfn = match cross {
                Some(b) => backend.cross(set, b)?,
                None => backend.repfn(set)?,
            };
            let text = format!("{repfn}\n");
            let results = ReportResults::RepfnEval {
                set: set.clone(),
                cross_with: cross.clone(),
                backend: backend.resolve(set.modulus()),
                repfn,
            };
            (results, true, text)
        }
        Command::Construct(ConstructCmd::Thm2 { m, case }) => {
            let params = ConstructionParams::new(*m, ConstructionCase::from_number(*case)?)?;
            let summary = verify_construction(&params)?;
            let lit = |v: &[usize]| ResidueSet::new(*m, v.iter().map(|&x| x as i64)).map(|s| s.to_string());
            let text = format!(
                "A = {}\nB = {}\ncovers: {}\nintersection size: {} (claimed {})\nhalf-shift: {}\nequal under: {}\nverdict: {}\n",
                lit(&summary.a)?,
                lit(&summary.b)?,
                summary.covers,
                summary.intersection_size,
                summary.claimed_intersection_size,
                summary.half_shift,
                summary.equal_under.iter().map(|k| k.name()).collect::<Vec<_>>().join(","),
                pass_word(summary.passed),
            );
            let pass = summary.passed;
            (ReportResults::Construction(summary), pass, text)
        }
        Command::Check(cmd) => {
            let (seed, outcomes) = match cmd {
                CheckCmd::Lemma21 { a, b } => {
                    let input = format!("A = {a}, B = {b}");
                    (None, vec![single_check("lemma21", input, lemma21_check(a, b))?])
                }
                CheckCmd::Eq21 { a, c } => {
                    let input = format!("A = {a}, C = {c}");
                    let inter = IntersectionData::new(c.modulus(), c.iter().map(|x| x as i64));
                    let result = inter.and_then(|i| eq21_check(a, &i));
                    (None, vec![single_check("eq21", input, result)?])
                }
                CheckCmd::Identities {
                    max_m,
                    random,
                    random_max_m,
                    seed,
                } => {
                    if *max_m > 16 {
                        return Err(Error::InvalidSpec(format!("--max-m {max_m} exceeds 16")));
                    }
                    if *random > 0 && *random_max_m == 0 {
                        return Err(Error::InvalidSpec("--random-max-m must be positive".into()));
                    }
                    let mut outcomes = exhaustive_identity_suite(*max_m, backend)?;
                    outcomes.extend(random_identity_suite(*random, *random_max_m, *seed, backend)?);
                    (Some(*seed), outcomes)
                }
            };
            let pass = outcomes.iter().all(|o| o.status == CheckStatus::Holds);
            let mut text = String::new();
            if let Some(seed) = seed {
                text.push_str(&format!("seed: {seed}\n"));
            }
            for o in &outcomes {
                text.push_str(&format!(
                    "{}: {} ({} cases) [{}]\n",
                    o.name,
                    status_word(o.status),
                    o.cases,
                    o.input
                ));
                if let Some(d) = &o.detail {
                    text.push_str(&format!("  {d}\n"));
                }
            }
            (ReportResults::Check { seed, outcomes }, pass, text)
        }
        Command::Search(SearchCmd::Partitions {
            m,
            s,
            run,
            checkpoint,
            no_prune,
            up_to_symmetry,
            halt_after_units,
        }) => {
            let mut spec = SearchSpec::partition(*m, *s)
                .jobs(run.jobs)
                .backend(backend)
                .prune(!no_prune)
                .up_to_symmetry(*up_to_symmetry);
            if let Some(p) = checkpoint {
                spec = spec.checkpoint(p);
            }
            if let Some(n) = halt_after_units {
                spec = spec.halt_after_units(*n);
            }
            let report = find_equal_partitions(&spec)?;
            let mut text = format!(
                "m = {m}, s = {s}: {} candidates, {} witnesses ({} half-shift, {} exotic, {} degenerate)\n",
                report.total_candidates,
                report.witness_count,
                report.half_shift_count,
                report.exotic_count,
                report.degenerate_count
            );
            for w in &report.witnesses {
                text.push_str(&format!(
                    "{} {} {}\n",
                    w.a,
                    w.b,
                    if w.half_shift { "half-shift" } else { "exotic" }
                ));
            }
            if let Some(classes) = &report.symmetry_classes {
                text.push_str(&format!("{} classes up to symmetry\n", classes.len()));
                for c in classes {
                    text.push_str(&format!(
                        "  {} {} x{}\n",
                        c.representative_a, c.representative_b, c.size
                    ));
                }
            }
            (ReportResults::Partitions(report), true, text)
        }
        Command::Search(SearchCmd::EqualRepfn {
            m,
            k,
            run,
            exclude_half_shift,
        }) => {
            let spec = SearchSpec::equal_repfn(*m, *k)
                .jobs(run.jobs)
                .backend(backend)
                .exclude_half_shift(*exclude_half_shift);
            let report = run_equal_repfn(&spec)?;
            let mut text = format!(
                "m = {m}, k = {k}: {} subsets, {} classes\n",
                report.total_candidates, report.class_count
            );
            for c in &report.classes {
                let members: Vec<String> = c.members.iter().map(|a| a.to_string()).collect();
                text.push_str(&format!("{} {}\n", c.repfn_key, members.join(" ")));
            }
            (ReportResults::EqualRepfn(report), true, text)
        }
        Command::Verify(args) => {
            let mut opts = VerifyOptions {
                prune: !args.no_prune,
                backend,
                ..VerifyOptions::default()
            };
            if let Some(j) = args.jobs {
                opts.jobs = j;
            }
            let report = verify_theorem(args.theorem.into(), &args.m_list, &opts)?;
            let mut text = String::new();
            for run in &report.runs {
                text.push_str(&format!(
                    "m = {}, s = {}: {} candidates, {} witnesses ({} half-shift, {} exotic), {} oracle checks: {}\n",
                    run.m,
                    run.s,
                    run.total_candidates,
                    run.witness_count,
                    run.half_shift_count,
                    run.exotic_count,
                    run.oracle_checks,
                    pass_word(run.passed)
                ));
                for w in &run.counterexamples {
                    text.push_str(&format!("  counterexample: {} {}\n", w.a, w.b));
                }
                for (a, b) in &run.missing_half_shift {
                    text.push_str(&format!("  missing half-shift pair: {a} {b}\n"));
                }
                for p in run.constructed_pairs.iter().filter(|p| !p.found) {
                    text.push_str(&format!("  construction not found: {} {}\n", p.a, p.b));
                }
                for f in &run.oracle_failures {
                    text.push_str(&format!("  oracle failure: {f}\n"));
                }
            }
            for c in report.constructions.iter().filter(|c| !c.passed) {
                text.push_str(&format!("  construction failed: m = {}, case {}\n", c.m, c.case));
            }
            text.push_str(&format!("{}: {}\n", report.theorem, pass_word(report.passed)));
            let pass = report.passed;
            (ReportResults::Verification(report), pass, text)
        }
    };
    let mut doc = ReportDocument::new(command, results, info, verdict(pass));
    doc.timing_ms = started.elapsed().as_millis() as u64;
    Ok(Outcome { doc, text })
}

fn single_check(name: &str, input: String, result: repclass::Result<bool>) -> repclass::Result<CheckOutcome> {
    let status = if result? {
        CheckStatus::Holds
    } else {
        CheckStatus::Fails
    };
    Ok(CheckOutcome {
        name: name.to_string(),
        input,
        status,
        cases: 1,
        detail: None,
    })
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn status_word(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Holds => "holds",
        CheckStatus::Fails => "FAILS",
        CheckStatus::HypothesisError => "hypothesis error",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn execution_flags_are_dropped() {
        let args = [
            "search",
            "partitions",
            "--jobs",
            "4",
            "--m",
            "8",
            "--checkpoint=x",
            "--s",
            "4",
            "--halt-after-units",
            "3",
        ];
        let kept = without_execution_flags(args.iter().map(|s| s.to_string()).collect());
        assert_eq!(kept, ["search", "partitions", "--m", "8", "--s", "4"]);
    }
}
