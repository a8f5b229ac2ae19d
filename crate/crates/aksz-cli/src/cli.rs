//! Command-line surface. Exit codes: 0 pass, 1 check failure, 2 input error.

use std::path::{Path, PathBuf};

use aksz::bv::bv_pushforward;
use aksz::loops;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::checks::{fmt_complex, parse_lagrangian, run_checks, RunOptions};
use crate::files::{read_loop_file, read_rep_file};
use crate::model::{load_path, LoopData, Object};
use crate::report::CheckReport;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "aksz", version, about = "Checks AKSZ target, bundle, BV and loop models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run every check directive of a model file.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Use exact arithmetic for loop checks.
        #[arg(long)]
        exact: bool,
        /// Zero the timings so the output is byte-stable.
        #[arg(long)]
        no_timing: bool,
        /// Run checks one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Push a pre-observable forward along a coordinate Lagrangian.
    Pushforward {
        file: PathBuf,
        /// One letter per auxiliary pair: F zeroes the first member, S the second.
        #[arg(long)]
        lagrangian: String,
        /// Name of the pre-observable (needed when the model declares several).
        #[arg(long)]
        pre: Option<String>,
    },
    /// Wilson loop of a lattice loop in a representation.
    Wilson {
        loopfile: PathBuf,
        #[arg(long)]
        rep: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
    },
    /// Torsion det(W − 1) and the lattice Berezin determinant.
    Torsion {
        loopfile: PathBuf,
        #[arg(long)]
        rep: Option<PathBuf>,
        #[arg(long)]
        exact: bool,
    },
    /// Render a report from a model file or a saved JSON report; exits 0 unless the input is bad.
    Report {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        no_timing: bool,
    },
    /// Print the canonical form of a model file.
    Fmt { file: PathBuf },
}

/// Output of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn out(code: i32, stdout: String) -> Outcome {
    Outcome {
        code,
        stdout,
        stderr: String::new(),
    }
}

fn input_error(msg: impl std::fmt::Display) -> Outcome {
    Outcome {
        code: EXIT_INPUT,
        stdout: String::new(),
        stderr: format!("error: {msg}\n"),
    }
}

fn render(r: &CheckReport, format: Format, no_timing: bool) -> String {
    let r = if no_timing { r.comparable() } else { r.clone() };
    match format {
        Format::Json => r.to_json() + "\n",
        Format::Text => r.to_text(),
    }
}

fn model_report(file: &Path, opts: &RunOptions) -> Result<CheckReport, Outcome> {
    let m = load_path(file).map_err(|e| input_error(format!("{}:{e}", file.display())))?;
    Ok(run_checks(&m, opts))
}

pub fn execute(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check {
            file,
            format,
            exact,
            no_timing,
            sequential,
        } => match model_report(&file, &RunOptions { exact, parallel: !sequential }) {
            Ok(r) => out(if r.passed() { EXIT_PASS } else { EXIT_FAIL }, render(&r, format, no_timing)),
            Err(o) => o,
        },
        Command::Report { file, format, no_timing } => {
            let r = if file.extension().is_some_and(|e| e == "json") {
                let src = match std::fs::read_to_string(&file) {
                    Ok(s) => s,
                    Err(e) => return input_error(format!("{}: {e}", file.display())),
                };
                match CheckReport::from_json(&src) {
                    Ok(r) => r,
                    Err(e) => return input_error(format!("{}: not a report: {e}", file.display())),
                }
            } else {
                match model_report(&file, &RunOptions { exact: false, parallel: true }) {
                    Ok(r) => r,
                    Err(o) => return o,
                }
            };
            out(EXIT_PASS, render(&r, format, no_timing))
        }
        Command::Pushforward { file, lagrangian, pre } => pushforward(&file, &lagrangian, pre.as_deref()),
        Command::Wilson { loopfile, rep, exact } => loop_command(&loopfile, rep.as_deref(), exact, false),
        Command::Torsion { loopfile, rep, exact } => loop_command(&loopfile, rep.as_deref(), exact, true),
        Command::Fmt { file } => match std::fs::read_to_string(&file) {
            Ok(src) => match crate::parser::parse_model(&src) {
                Ok(m) => out(EXIT_PASS, crate::printer::print_model(&m)),
                Err(e) => input_error(format!("{}:{e}", file.display())),
            },
            Err(e) => input_error(format!("{}: {e}", file.display())),
        },
    }
}

fn pushforward(file: &Path, lagrangian: &str, pre: Option<&str>) -> Outcome {
    let m = match load_path(file) {
        Ok(m) => m,
        Err(e) => return input_error(format!("{}:{e}", file.display())),
    };
    let pres: Vec<(&String, &Object)> = m
        .env
        .names()
        .filter_map(|n| m.env.get(n).filter(|o| matches!(o, Object::Pre(_))).map(|o| (n, o)))
        .collect();
    let chosen = match pre {
        Some(n) => pres.iter().find(|(k, _)| *k == n),
        None if pres.len() == 1 => pres.first(),
        None => return input_error(format!("the model declares {} pre-observables; choose one with --pre", pres.len())),
    };
    let Some((name, Object::Pre(p))) = chosen else {
        return input_error(format!("no pre-observable `{}`", pre.unwrap_or("")));
    };
    let lag = match parse_lagrangian(lagrangian, p.aux.pairs().len()) {
        Ok(l) => l,
        Err(e) => return input_error(e),
    };
    match bv_pushforward(p, &lag) {
        Ok(pf) => {
            let ok = pf.gauge_residual.is_zero();
            let v = json!({
                "pre": name,
                "lagrangian": lagrangian,
                "observable": pf.observable.render(),
                "gauge_residual": pf.gauge_residual.render(),
                "status": if ok { "pass" } else { "fail" },
            });
            out(if ok { EXIT_PASS } else { EXIT_FAIL }, serde_json::to_string_pretty(&v).unwrap() + "\n")
        }
        Err(e) => {
            let v = json!({ "pre": name, "lagrangian": lagrangian, "status": "fail", "error": e.to_string() });
            out(EXIT_FAIL, serde_json::to_string_pretty(&v).unwrap() + "\n")
        }
    }
}

fn loop_command(loopfile: &Path, rep: Option<&Path>, exact: bool, torsion: bool) -> Outcome {
    let data = match read_loop_file(loopfile) {
        Ok(d) => d,
        Err(e) => return input_error(e),
    };
    let v = match data {
        LoopData::Group(us) => {
            if torsion {
                match loops::torsion_exact(&us) {
                    Ok(t) => json!({ "mode": "exact", "direct": t.direct.render(), "lattice": t.lattice.render(), "match": t.matches() }),
                    Err(e) => return input_error(e),
                }
            } else {
                match loops::wilson_exact(&us) {
                    Ok(w) => json!({ "mode": "exact", "edges": us.len(), "trace": w.render() }),
                    Err(e) => return input_error(e),
                }
            }
        }
        LoopData::Algebra(_) if exact => return input_error("--exact needs a loop file in `format group`"),
        LoopData::Algebra(l) => {
            let Some(rep) = rep else {
                return input_error("--rep is required for algebra-valued loops");
            };
            let rho = match read_rep_file(rep) {
                Ok(r) => r,
                Err(e) => return input_error(e),
            };
            if torsion {
                match loops::torsion_1d(&l, &rho) {
                    Ok(t) => json!({ "mode": "float", "direct": fmt_complex(t.direct), "lattice": fmt_complex(t.lattice), "match": t.matches }),
                    Err(e) => return input_error(e),
                }
            } else {
                match loops::wilson_loop_pexp(&l, &rho) {
                    Ok(w) => json!({ "mode": "float", "edges": l.len(), "trace": fmt_complex(w) }),
                    Err(e) => return input_error(e),
                }
            }
        }
    };
    let code = if v.get("match").and_then(|m| m.as_bool()) == Some(false) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    };
    out(code, serde_json::to_string_pretty(&v).unwrap() + "\n")
}
