//! Loop and representation data files.

use std::cell::RefCell;
use std::path::Path;
use std::str::FromStr;

use aksz::loops::LatticeLoop;
use aksz::{Gq, QMatrix, Representation};
use num_complex::Complex64;

use crate::model::{Ctx, Env, LoopData};

#[derive(Debug, thiserror::Error)]
#[error("{path}:{line}: {message}")]
pub struct FileError {
    pub path: String,
    pub line: usize,
    pub message: String,
}

fn read(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|e| FileError {
        path: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })
}

/// Non-comment lines with their 1-based numbers; `None` marks a blank line.
fn lines(src: &str) -> Vec<(usize, Option<&str>)> {
    src.lines()
        .enumerate()
        .map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            (i + 1, (!l.is_empty()).then_some(l))
        })
        .collect()
}

/// Blank-line separated blocks of rows.
fn blocks<'s>(ls: &[(usize, Option<&'s str>)]) -> Vec<Vec<(usize, &'s str)>> {
    let mut out: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
    for &(n, l) in ls {
        match l {
            Some(l) => out.last_mut().unwrap().push((n, l)),
            None if !out.last().unwrap().is_empty() => out.push(Vec::new()),
            None => {}
        }
    }
    out.retain(|b| !b.is_empty());
    out
}

fn exact_entry(s: &str) -> Result<Gq, String> {
    let e = crate::parser::parse_expr(s).map_err(|e| e.message)?;
    let (env, w) = (Env::default(), RefCell::new(Vec::new()));
    Ctx::new(&env, None, &w).num(&e).map_err(|e| e.message)
}

fn exact_matrix(path: &Path, rows: &[(usize, &str)]) -> Result<QMatrix, FileError> {
    let err = |line, message| FileError {
        path: path.display().to_string(),
        line,
        message,
    };
    let parsed = rows
        .iter()
        .map(|&(n, r)| {
            r.split(',')
                .map(|x| exact_entry(x.trim()).map_err(|m| err(n, m)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    QMatrix::from_rows(parsed).map_err(|e| err(rows[0].0, e.to_string()))
}

/// Reads a `.rep` file: one matrix per generator, blocks separated by blank lines.
pub fn read_rep_file(path: &Path) -> Result<Representation, FileError> {
    let src = read(path)?;
    let mats = blocks(&lines(&src)).iter().map(|b| exact_matrix(path, b)).collect::<Result<Vec<_>, _>>()?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Representation::unchecked(name, mats).map_err(|e| FileError {
        path: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })
}

/// Reads a `.loop` file. The default format has one edge per line with the
/// comma-separated algebra components; `format group` switches to one exact
/// matrix block per edge.
pub fn read_loop_file(path: &Path) -> Result<LoopData, FileError> {
    let src = read(path)?;
    let mut ls = lines(&src);
    let err = |line, message: String| FileError {
        path: path.display().to_string(),
        line,
        message,
    };
    let first = ls.iter().position(|(_, l)| l.is_some());
    let mut group = false;
    if let Some(i) = first {
        if let Some(rest) = ls[i].1.unwrap().strip_prefix("format") {
            match rest.trim() {
                "group" => group = true,
                "algebra" => {}
                other => return Err(err(ls[i].0, format!("unknown loop format `{other}`, expected `algebra` or `group`"))),
            }
            ls.remove(i);
        }
    }
    if group {
        let mats = blocks(&ls).iter().map(|b| exact_matrix(path, b)).collect::<Result<Vec<_>, _>>()?;
        if mats.is_empty() {
            return Err(err(0, "no edges".into()));
        }
        return Ok(LoopData::Group(mats));
    }
    let mut samples = Vec::new();
    for (n, l) in ls {
        let Some(l) = l else { continue };
        let row = l
            .split(',')
            .map(|x| Complex64::from_str(x.trim()).map_err(|_| err(n, format!("bad number `{}`", x.trim()))))
            .collect::<Result<Vec<_>, _>>()?;
        samples.push(row);
    }
    LatticeLoop::new(samples).map(LoopData::Algebra).map_err(|e| err(0, e.to_string()))
}
