//! Canonical rendering of model files.

use crate::ast::*;

const ATOM: u8 = 5;
const NEG: u8 = 3;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(op, ..) => op.precedence(),
        Expr::Neg(_) => NEG,
        _ => ATOM,
    }
}

fn wrap(e: &SExpr, min: u8) -> String {
    let s = print_expr(e);
    if prec(&e.node) < min {
        format!("({s})")
    } else {
        s
    }
}

pub fn print_expr(e: &SExpr) -> String {
    match &e.node {
        Expr::Num(s) => s.clone(),
        Expr::Str(s) => format!("\"{s}\""),
        Expr::Ident(s) => s.clone(),
        Expr::Neg(x) => format!("-{}", wrap(x, NEG)),
        Expr::Bin(BinOp::Pow, l, r) => format!("{}^{}", wrap(l, ATOM), wrap(r, NEG)),
        Expr::Bin(op, l, r) => {
            let p = op.precedence();
            let sep = if p == 1 { format!(" {} ", op.symbol()) } else { op.symbol().to_string() };
            format!("{}{sep}{}", wrap(l, p), wrap(r, p + 1))
        }
        Expr::Call(f, args) => format!("{f}({})", print_args(args)),
        Expr::List(items) => format!("[{}]", items.iter().map(print_expr).collect::<Vec<_>>().join(", ")),
        Expr::Pairing(a, b) => format!("({}, {})", print_expr(a), print_expr(b)),
        Expr::Natural(a, b) => format!("⟨{}, {}⟩", print_expr(a), print_expr(b)),
        Expr::Deriv(x, f) => format!("∂({x}, {})", print_expr(f)),
    }
}

pub fn print_args(args: &[Arg]) -> String {
    args.iter()
        .map(|a| match &a.key {
            Some(k) => format!("{k}={}", print_expr(&a.value)),
            None => print_expr(&a.value),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn print_stmt(s: &Stmt) -> String {
    match s {
        Stmt::Model(n) => format!("model \"{n}\""),
        Stmt::Decl { kind, name, value } => format!("{} {name} = {}", kind.keyword(), print_expr(value)),
        Stmt::Space { name, coords } => {
            let cs: Vec<String> = coords.iter().map(|(c, d)| format!("{c}: {d}")).collect();
            format!("space {name} {{ {} }}", cs.join(", "))
        }
        Stmt::Vector { name, carrier, comps } => format!("vector {name} : {carrier} = [{}]", comps.join(", ")),
        Stmt::Poly { name, on, degree, value } => match degree {
            Some(d) => format!("poly {name} on {on} : {d} = {}", print_expr(value)),
            None => format!("poly {name} on {on} = {}", print_expr(value)),
        },
        Stmt::Check { kind, args } => format!("check {kind}({})", print_args(args)),
    }
}

/// One statement per line, comments dropped.
pub fn print_model(m: &ModelFile) -> String {
    let mut out = String::new();
    for s in &m.stmts {
        out.push_str(&print_stmt(&s.node));
        out.push('\n');
    }
    out
}
