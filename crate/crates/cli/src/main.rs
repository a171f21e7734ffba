//! Batch verification and norm reports for finite twisted groupoid
//! algebras. Exit codes: 0 all checks pass, 1 at least one check
//! failed, 2 usage or schema error.

mod checks;
mod model;
mod report;

use anyhow::Result;
use checks::CheckCtx;
use clap::{Args, Parser, Subcommand};
use model::Model;
use report::{CheckLine, ModelReport, Report};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "lpalg", version, about = "Finite twisted groupoid algebra toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Model files (JSON); repeatable
    #[arg(long = "model", required = true, num_args = 1..)]
    model: Vec<PathBuf>,
    /// Scalar mode for sampling-based checks
    #[arg(long, default_value = "real", value_parser = ["real", "complex"])]
    mode: String,
    /// Random seed for the sampled sweeps
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output format
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    /// Worker threads for independent checks
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run the validator/property suites on models
    Verify {
        #[command(flatten)]
        common: Common,
        /// all | axioms | twist | disintegration | tight | ck | norms
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Norm table for an algebra element over a groupoid model
    Norm {
        #[command(flatten)]
        common: Common,
        /// ones | unit | delta:K | coeffs:v1,v2,...
        #[arg(long, default_value = "ones")]
        element: String,
        /// Comma-separated exponent list, e.g. 1,3/2,2,inf
        #[arg(long, default_value = "1,2,inf")]
        p: String,
        /// Bisection family for the projective norm: singletons | none
        #[arg(long, default_value = "singletons")]
        semigroup: String,
    },
    /// Regular representation report
    Rep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "ones")]
        element: String,
        #[arg(long, default_value = "1,2,inf")]
        p: String,
    },
    /// Tight spectrum reports (graphs and semigroups)
    Tight {
        #[command(flatten)]
        common: Common,
    },
    /// Graph classification, boundary space, and Q-family report
    Graph {
        #[command(flatten)]
        common: Common,
    },
    /// Crossed-product checks for partial-action models
    Crossprod {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let started = Instant::now();
    let (common, report) = match &cli.command {
        Command::Verify { common, suite } => {
            let seed = common.seed;
            let cli_complex = common.mode == "complex";
            let suite = suite.clone();
            (common.clone(), run_models(common, "verify", move |m, file_complex| {
                let ctx = CheckCtx {
                    seed,
                    complex_mode: cli_complex || file_complex,
                    suite: suite.clone(),
                };
                Ok((checks::verify_checks(m, &ctx), Vec::new()))
            })?)
        }
        Command::Norm {
            common,
            element,
            p,
            semigroup,
        } => {
            let ps = model::parse_p_list(p)?;
            let element = element.clone();
            let semigroup = semigroup.clone();
            (common.clone(), run_models(common, "norm", move |m, _file_complex| {
                let Model::Groupoid { carrier } = m else {
                    return Ok((
                        vec![CheckLine::skip("norm table", "model is not a groupoid")],
                        Vec::new(),
                    ));
                };
                let f = checks::element_from_spec(carrier, &element)?;
                let family = checks::bisection_family(carrier, &semigroup)?;
                let (rows, lines) =
                    checks::norm_rows(carrier, &f, &ps, family.is_some())?;
                Ok((lines, rows))
            })?)
        }
        Command::Rep { common, element, p } => {
            let ps = model::parse_p_list(p)?;
            let element = element.clone();
            (common.clone(), run_models(common, "rep", move |m, _file_complex| {
                let Model::Groupoid { carrier } = m else {
                    return Ok((
                        vec![CheckLine::skip("regular representation", "model is not a groupoid")],
                        Vec::new(),
                    ));
                };
                let f = checks::element_from_spec(carrier, &element)?;
                let lines = checks::rep_checks(carrier, &f, &ps);
                let (rows, more) = checks::norm_rows(carrier, &f, &ps, false)?;
                let mut all = lines;
                all.extend(more);
                Ok((all, rows))
            })?)
        }
        Command::Tight { common } => {
            let seed = common.seed;
            let complex = common.mode == "complex";
            (common.clone(), run_models(common, "tight", move |m, file_complex| {
                let ctx = CheckCtx {
                    seed,
                    complex_mode: complex || file_complex,
                    suite: "tight".into(),
                };
                Ok((checks::verify_checks(m, &ctx), Vec::new()))
            })?)
        }
        Command::Graph { common } => {
            let seed = common.seed;
            let complex = common.mode == "complex";
            (common.clone(), run_models(common, "graph", move |m, file_complex| {
                let mut lines = Vec::new();
                for suite in ["axioms", "ck", "tight"] {
                    let ctx = CheckCtx {
                        seed,
                        complex_mode: complex || file_complex,
                        suite: suite.into(),
                    };
                    lines.extend(checks::verify_checks(m, &ctx));
                }
                Ok((lines, Vec::new()))
            })?)
        }
        Command::Crossprod { common } => {
            let seed = common.seed;
            let complex = common.mode == "complex";
            (common.clone(), run_models(common, "crossprod", move |m, file_complex| {
                if !matches!(m, Model::PartialAction { .. }) {
                    return Ok((
                        vec![CheckLine::skip("crossed product", "model is not a partial action")],
                        Vec::new(),
                    ));
                }
                let ctx = CheckCtx {
                    seed,
                    complex_mode: complex || file_complex,
                    suite: "all".into(),
                };
                Ok((checks::verify_checks(m, &ctx), Vec::new()))
            })?)
        }
    };
    let text = match common.format.as_str() {
        "json" => report.to_json(),
        _ => report.to_csv(),
    };
    println!("{}", text);
    eprintln!(
        "{} model(s) in {:.3}s",
        report.models.len(),
        started.elapsed().as_secs_f64()
    );
    Ok(if report.has_failure() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_models(
    common: &Common,
    command: &str,
    f: impl Fn(&Model, bool) -> Result<(Vec<CheckLine>, Vec<report::NormRow>)> + Sync,
) -> Result<Report> {
    let f = &f;
    // parse first so schema errors exit with code 2 before any checks run
    let mut parsed = Vec::new();
    for path in &common.model {
        let file = model::load_model(path)?;
        let label = match &file.name {
            Some(name) => format!("{} ({})", path.display(), name),
            None => path.display().to_string(),
        };
        parsed.push((label, file));
    }
    let n = parsed.len();
    let results: Vec<Mutex<Option<ModelReport>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let jobs = common.jobs.max(1).min(n.max(1));
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let (path, file) = &parsed[i];
                let file_complex = file.mode == "complex";
                let (kind, checks, norms) = match model::construct(file) {
                    Ok(model) => match f(&model, file_complex) {
                        Ok((checks, norms)) => (model.kind().to_string(), checks, norms),
                        Err(e) => (
                            model.kind().to_string(),
                            vec![CheckLine::fail("check execution", e.to_string())],
                            Vec::new(),
                        ),
                    },
                    Err(e) => (
                        file.kind.clone(),
                        vec![CheckLine::fail("model axioms", format!("{:#}", e))],
                        Vec::new(),
                    ),
                };
                *results[i].lock().unwrap() = Some(ModelReport {
                    model: path.clone(),
                    kind,
                    checks,
                    norms,
                });
            });
        }
    });
    let models: Vec<ModelReport> = results
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every model processed"))
        .collect();
    Ok(Report {
        command: command.to_string(),
        seed: common.seed,
        models,
    })
}
