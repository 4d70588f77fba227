//! Command-line front end for the extension calculus: validate documents,
//! run the constructions, compute degree-2 cohomology, and execute the
//! verification suites over the built-in corpus.
//!
//! Exit codes: 0 all checks pass, 1 construction or validation failure,
//! 2 I/O or parse error, 3 a capped search left a check unknown.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use groupext::abelian::Elem;
use groupext::bundle::{validate_action, BundleHom};
use groupext::cohomology::{extension_from_cocycle, h2, validate_cocycle};
use groupext::extension::{
    baer_sum, inverse_ext, pushout, semidirect, t_groupoid, validate_extension,
};
use groupext::groupoid::{transformation_groupoid, validate_groupoid};
use groupext::io::{self, FileKind};
use groupext::iso::DEFAULT_NODE_CAP;
use groupext::suites::{self, SuiteOptions, SUITE_NAMES};
use groupext::wedderburn::DEFAULT_TOLERANCE;
use groupext::{CheckResult, CheckStatus, Error, Result, ValidationReport, VerificationReport};

#[derive(Parser)]
#[command(name = "groupext", version, about = "Finite groupoid extensions: build, validate, verify")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Args)]
struct GlobalOpts {
    /// Seed for the randomized numerics behind fingerprints
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Tolerance for rank decisions and eigenvalue clustering
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,

    /// Node cap for isomorphism searches
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_CAP)]
    max_nodes: u64,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Include wall-clock timings in verification reports. Timings vary run
    /// to run; leave this off to get byte-identical reports.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the axioms of any document and report each condition
    Validate { path: PathBuf },
    /// Run a construction and write the result to a file
    Build {
        #[command(subcommand)]
        kind: BuildCmd,
    },
    /// Invariant factors of the degree-2 cohomology of an action
    H2 { action: PathBuf },
    /// Run a named verification suite over the built-in corpus
    Verify {
        #[arg(value_parser = PossibleValuesParser::new(SUITE_NAMES.iter().copied()))]
        suite: String,
    },
}

#[derive(Subcommand)]
enum BuildCmd {
    /// Split extension of the action's groupoid by its bundle
    Semidirect {
        action: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extension with multiplication twisted by a 2-cocycle
    FromCocycle {
        cocycle: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Push an extension forward along a bundle homomorphism
    Pushout {
        extension: PathBuf,
        hom: PathBuf,
        target_action: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Baer sum of two extensions over the same action
    BaerSum {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Baer inverse of an extension
    Inverse {
        extension: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dual-side extension over the character semidirect product
    TGroupoid {
        extension: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Transformation groupoid of a right action on a finite point set
    Transformation {
        space: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io(_) | Error::Json(_) => 2u8,
                Error::SearchCapExceeded { .. } => 3u8,
                _ => 1u8,
            })
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Validate { path } => {
            let v = io::read_json(path)?;
            let report = validate_file(&v, path)?;
            print_validation(&report, &cli.opts);
            Ok(if report.is_valid() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Build { kind } => run_build(kind, &cli.opts),
        Cmd::H2 { action } => {
            let act = io::action_from_json(&io::read_json(action)?, action)?;
            let h = h2(&act)?;
            match cli.opts.format {
                Format::Text => {
                    if h.invariant_factors.is_empty() {
                        println!("trivial");
                    } else {
                        let words: Vec<String> =
                            h.invariant_factors.iter().map(|f| f.to_string()).collect();
                        println!("{}", words.join(" "));
                    }
                }
                Format::Json => print_value(&json!({ "invariant_factors": h.invariant_factors })),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { suite } => {
            let o = SuiteOptions {
                seed: cli.opts.seed,
                tolerance: cli.opts.tolerance,
                max_nodes: cli.opts.max_nodes,
            };
            let report = suites::run_suite(suite, &o)?;
            print_verification(&report, &cli.opts);
            Ok(if report.failed() > 0 {
                ExitCode::from(1)
            } else if report.unknown() > 0 {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn run_build(kind: &BuildCmd, opts: &GlobalOpts) -> Result<ExitCode> {
    match kind {
        BuildCmd::Semidirect { action, out } => {
            let act = io::action_from_json(&io::read_json(action)?, action)?;
            let ext = semidirect(&act)?;
            io::save_extension(out, &ext)?;
            print_built(opts, out, ext.total().n_arrows());
        }
        BuildCmd::FromCocycle { cocycle, out } => {
            let phi = io::cocycle_from_json(&io::read_json(cocycle)?, cocycle)?;
            let ext = extension_from_cocycle(&phi)?;
            io::save_extension(out, &ext)?;
            print_built(opts, out, ext.total().n_arrows());
        }
        BuildCmd::Pushout { extension, hom, target_action, out } => {
            let ext = io::extension_from_json(&io::read_json(extension)?, extension)?;
            let f = io::hom_from_json(&io::read_json(hom)?, hom)?;
            let act = io::action_from_json(&io::read_json(target_action)?, target_action)?;
            let (pushed, _induced) = pushout(&ext, &f, &act)?;
            io::save_extension(out, &pushed)?;
            print_built(opts, out, pushed.total().n_arrows());
        }
        BuildCmd::BaerSum { left, right, out } => {
            let e1 = io::extension_from_json(&io::read_json(left)?, left)?;
            let e2 = io::extension_from_json(&io::read_json(right)?, right)?;
            let ext = baer_sum(&e1, &e2)?;
            io::save_extension(out, &ext)?;
            print_built(opts, out, ext.total().n_arrows());
        }
        BuildCmd::Inverse { extension, out } => {
            let ext = io::extension_from_json(&io::read_json(extension)?, extension)?;
            let inv = inverse_ext(&ext)?;
            io::save_extension(out, &inv)?;
            print_built(opts, out, inv.total().n_arrows());
        }
        BuildCmd::TGroupoid { extension, out } => {
            let ext = io::extension_from_json(&io::read_json(extension)?, extension)?;
            let t = t_groupoid(&ext)?;
            io::save_extension(out, &t.extension)?;
            print_built(opts, out, t.extension.total().n_arrows());
        }
        BuildCmd::Transformation { space, out } => {
            let (sp, g) = io::space_from_json(&io::read_json(space)?, space)?;
            let (tg, _proj) = transformation_groupoid(&g, &sp)?;
            io::write_json(out, &io::groupoid_to_json(&tg))?;
            print_built(opts, out, tg.n_arrows());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn validate_file(v: &Value, path: &Path) -> Result<ValidationReport> {
    Ok(match io::sniff(v)? {
        FileKind::Groupoid => validate_groupoid(&io::groupoid_from_json(v)?),
        FileKind::Bundle => {
            io::bundle_from_json(v)?;
            let mut r = ValidationReport::new("bundle");
            r.push(CheckResult::pass("fibers-well-formed"));
            r
        }
        FileKind::Action => validate_action(&io::action_from_json(v, path)?),
        FileKind::Hom => validate_hom(&io::hom_from_json(v, path)?),
        FileKind::Space => {
            let (space, g) = io::space_from_json(v, path)?;
            space.check(&g)
        }
        FileKind::Extension => validate_extension(&io::extension_from_json(v, path)?),
        FileKind::Cocycle => validate_cocycle(&io::cocycle_from_json(v, path)?),
    })
}

/// Per-unit well-definedness of a bare bundle hom: each matrix has the right
/// shape and kills the source fiber's relations. Equivariance needs a pair of
/// actions and is checked where the hom is used.
fn validate_hom(f: &BundleHom) -> ValidationReport {
    let mut r = ValidationReport::new("bundle hom");
    let mut witnesses = Vec::new();
    for (u, uid) in f.source.unit_ids().iter().enumerate() {
        let src = f.source.fiber(u);
        let tgt = f.target.fiber(u);
        let m = f.matrix(u);
        if m.len() != tgt.rank() || m.iter().any(|row| row.len() != src.rank()) {
            witnesses.push(format!(
                "matrix over {uid} is not {} x {}",
                tgt.rank(),
                src.rank()
            ));
            continue;
        }
        for (j, &d) in src.factors().iter().enumerate() {
            let mut gen = vec![0; src.rank()];
            gen[j] = d;
            match f.apply(u, &Elem(gen)) {
                Ok(img) if img == tgt.zero() => {}
                Ok(img) => witnesses
                    .push(format!("over {uid}: {d} * generator {j} maps to {:?}, not 0", img.0)),
                Err(e) => witnesses.push(format!("over {uid}: {e}")),
            }
        }
    }
    r.check_all("respects-fiber-relations", witnesses);
    r
}

fn print_built(opts: &GlobalOpts, out: &Path, arrows: usize) {
    match opts.format {
        Format::Text => println!("wrote {} ({} arrows)", out.display(), arrows),
        Format::Json => {
            print_value(&json!({ "out": out.display().to_string(), "arrows": arrows }))
        }
    }
}

fn print_validation(r: &ValidationReport, opts: &GlobalOpts) {
    match opts.format {
        Format::Json => print_value(&serde_json::to_value(r).expect("report serializes")),
        Format::Text => {
            println!("{}", r.subject);
            for c in &r.checks {
                print_check(c, false);
            }
            let failed = r.checks.iter().filter(|c| c.status != CheckStatus::Pass).count();
            println!("{} passed, {} failed", r.checks.len() - failed, failed);
        }
    }
}

fn print_verification(r: &VerificationReport, opts: &GlobalOpts) {
    match opts.format {
        Format::Json => {
            let mut v = serde_json::to_value(r).expect("report serializes");
            if opts.timings {
                if let Some(checks) = v.get_mut("checks").and_then(Value::as_array_mut) {
                    for (cv, c) in checks.iter_mut().zip(&r.checks) {
                        cv["wall_ms"] = json!(c.wall_ms);
                    }
                }
            }
            print_value(&v);
        }
        Format::Text => {
            println!("suite {}", r.suite);
            for c in &r.checks {
                print_check(c, opts.timings);
            }
            println!("{} passed, {} failed, {} unknown", r.passed(), r.failed(), r.unknown());
        }
    }
}

fn print_check(c: &CheckResult, timings: bool) {
    let status = match c.status {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "fail",
        CheckStatus::Unknown => "unknown",
    };
    let mut line = format!("  {status} {}", c.name);
    if let Some(w) = &c.witness {
        line.push_str(&format!(": {w}"));
    }
    if timings {
        line.push_str(&format!(" ({} ms)", c.wall_ms));
    }
    println!("{line}");
}

fn print_value(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("value serializes"));
}
