//! Execution of `check` directives.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::time::Instant;

use aksz::bv::{bv_pushforward, q_exactness_witness, Exactness, LagrangianSubspace, Level, Member};
use aksz::loops::{self, QuantizedFiber};
use aksz::qstructures::{Report, Status};
use aksz::*;
use num_complex::Complex64;

use crate::ast::{Arg, Expr, SExpr, Stmt};
use crate::error::Pos;
use crate::model::{Args, Ctx, LoopData, Model, Object};
use crate::printer::print_args;
use crate::report::{CheckReport, CheckResult, Detail};

/// Relative tolerance of floating loop checks.
pub const FLOAT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Require exact arithmetic for loop checks.
    pub exact: bool,
    /// Run the checks of a file on separate threads.
    pub parallel: bool,
}

#[derive(Debug, Default)]
struct Outcome {
    details: Vec<Detail>,
    value: Option<String>,
}

impl Outcome {
    fn push(&mut self, name: &str, ok: bool, residual: impl Into<String>) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.details.push(Detail {
            name: name.into(),
            status,
            residual: residual.into(),
        });
    }

    fn report(&mut self, r: &Report) {
        for c in &r.checks {
            self.details.push(Detail {
                name: c.name.clone(),
                status: c.status,
                residual: c.residual.render(),
            });
        }
    }

    fn poly<C: Coeff>(&mut self, name: &str, p: &Poly<C>) {
        self.push(name, p.is_zero(), p.render());
    }
}

pub fn fmt_complex(z: Complex64) -> String {
    // parts below the printed precision are shown as 0; `+ 0.0` folds negative zero
    let snap = |x: f64| if x.abs() < 5e-13 * z.norm().max(1.0) { 0.0 } else { x + 0.0 };
    let (re, im) = (snap(z.re), snap(z.im));
    if im == 0.0 {
        format!("{re:.12}")
    } else {
        format!("{re:.12}{im:+.12}i")
    }
}

fn check_name(kind: &str, args: &[Arg]) -> String {
    format!("{kind}({})", print_args(args))
}

pub fn run_checks(m: &Model, opts: &RunOptions) -> CheckReport {
    let checks: Vec<(&str, &[Arg], Pos)> = m
        .file
        .checks()
        .filter_map(|s| match &s.node {
            Stmt::Check { kind, args } => Some((kind.as_str(), args.as_slice(), s.pos)),
            _ => None,
        })
        .collect();
    let results: Vec<CheckResult> = if opts.parallel && checks.len() > 1 {
        std::thread::scope(|sc| {
            let handles: Vec<_> = checks.iter().map(|&(k, a, p)| sc.spawn(move || run_timed(m, k, a, p, opts))).collect();
            handles.into_iter().map(|h| h.join().expect("check thread")).collect()
        })
    } else {
        checks.iter().map(|&(k, a, p)| run_timed(m, k, a, p, opts)).collect()
    };
    CheckReport::new(&m.name, m.warnings.clone(), results)
}

fn run_timed(m: &Model, kind: &str, args: &[Arg], pos: Pos, opts: &RunOptions) -> CheckResult {
    let start = Instant::now();
    let res = run_check(m, kind, args, pos, opts);
    let ms = start.elapsed().as_millis() as u64;
    let name = check_name(kind, args);
    match res {
        Ok(o) => {
            let status = if o.details.iter().any(|d| d.status == Status::Fail) {
                Status::Fail
            } else if o.details.iter().any(|d| d.status == Status::Warning) {
                Status::Warning
            } else {
                Status::Pass
            };
            let residual = o
                .details
                .iter()
                .find(|d| d.status != Status::Pass)
                .map_or_else(|| "0".to_string(), |d| d.residual.clone());
            CheckResult {
                name,
                status,
                residual,
                value: o.value,
                details: o.details,
                ms,
            }
        }
        Err(e) => CheckResult {
            name,
            status: Status::Fail,
            residual: format!("error: {e}"),
            value: None,
            details: vec![],
            ms,
        },
    }
}

type R<T> = Result<T, String>;

fn me(e: crate::error::ModelError) -> String {
    match e.pos {
        Some(p) => format!("{p}: {}", e.message),
        None => e.message,
    }
}

fn ae(e: AlgebraError) -> String {
    e.to_string()
}

/// Parses a Lagrangian spec: one letter per auxiliary pair, `F` sets the first
/// member of the pair to zero, `S` the second.
pub fn parse_lagrangian(spec: &str, pairs: usize) -> R<LagrangianSubspace> {
    let zero = spec
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            'F' | 'f' => Ok(Member::First),
            'S' | 's' => Ok(Member::Second),
            other => Err(format!("bad Lagrangian letter `{other}`: use F or S per pair")),
        })
        .collect::<R<Vec<_>>>()?;
    if zero.len() != pairs {
        return Err(format!("Lagrangian `{spec}` has {} letters for {pairs} auxiliary pairs", zero.len()));
    }
    Ok(LagrangianSubspace::new(zero))
}

fn run_check(m: &Model, kind: &str, args: &[Arg], pos: Pos, opts: &RunOptions) -> R<Outcome> {
    let w = RefCell::new(Vec::new());
    let c = Ctx::new(&m.env, None, &w);
    let mut o = Outcome::default();
    match kind {
        "verify" => {
            let a = Args::new(kind, args, pos, &["x"]).map_err(me)?;
            match c.object(a.req(0, "x").map_err(me)?, "target|bundle").map_err(me)? {
                Object::Target(t) => o.report(&t.ham.verify().map_err(ae)?),
                Object::Bundle(b) => o.report(&b.verify().map_err(ae)?),
                _ => unreachable!(),
            }
        }
        "cme" | "qme" => {
            let a = Args::new(kind, args, pos, &["b"]).map_err(me)?;
            let Object::Bv(b) = c.object(a.req(0, "b").map_err(me)?, "bv").map_err(me)? else { unreachable!() };
            let r = if kind == "cme" { b.cme_residual() } else { b.qme_residual() }.map_err(ae)?;
            o.poly(kind, &r);
        }
        "pre_observable" => {
            let a = Args::new(kind, args, pos, &["p", "level"]).map_err(me)?;
            let Object::Pre(p) = c.object(a.req(0, "p").map_err(me)?, "pre").map_err(me)? else { unreachable!() };
            let level = match a.get(1, "level").map(|e| c.string(e)).transpose().map_err(me)?.as_deref() {
                None | Some("semi_quantum") => Level::SemiQuantum,
                Some("classical") => Level::Classical,
                Some("quantum") => Level::Quantum,
                Some(other) => return Err(format!("unknown level `{other}`: use classical, semi_quantum or quantum")),
            };
            o.report(&p.check(level).map_err(ae)?);
        }
        "pushforward" => pushforward(&c, args, pos, &mut o)?,
        "wilson" => wilson(&c, args, pos, opts, &mut o)?,
        "torsion" => torsion(&c, args, pos, opts, &mut o)?,
        "quantized_fiber" => {
            let a = Args::new(kind, args, pos, &["t", "psi", "mu"]).map_err(me)?;
            let t = target(&c, a.req(0, "t").map_err(me)?)?;
            let psi = coord_indices(&c, a.req(1, "psi").map_err(me)?, &t.ham.space)?;
            let mu = c.rep(a.req(2, "mu").map_err(me)?).map_err(me)?;
            let theta_hat = loops::moment_operator(&t.ham.space, &psi, mu.matrices()).map_err(ae)?;
            let qf = QuantizedFiber::new(&t.ham.q_manifold(), mu.dim(), &theta_hat).map_err(ae)?;
            o.poly("fiber_equation", &loops::check_quantized_fiber(&qf).map_err(ae)?);
        }
        "psm_operator" => {
            let a = Args::new(kind, args, pos, &["t", "r", "scale"]).map_err(me)?;
            let t = target(&c, a.req(0, "t").map_err(me)?)?;
            let (cot, pi) = t.psm.as_ref().ok_or("psm_operator needs a poisson_sigma target")?;
            let r = c.rep(a.req(1, "r").map_err(me)?).map_err(me)?;
            let s = match a.get(2, "scale") {
                Some(e) => c.num(e).map_err(me)?,
                None => -Gq::i(),
            };
            let f_hat: Vec<MatrixPolynomial> = r.matrices().iter().map(|m| Poly::constant(&t.ham.space, m.scale(&s))).collect();
            o.poly("operator_equation", &loops::check_psm_f_hat(cot, pi, &f_hat).map_err(ae)?);
        }
        "point" => {
            let a = Args::new(kind, args, pos, &["t", "theta", "p", "*"]).map_err(me)?;
            let t = target(&c, a.req(0, "t").map_err(me)?)?;
            let theta = c.poly_in(a.req(1, "theta").map_err(me)?, &t.ham.space).map_err(me)?;
            let p = a.get(2, "p").map(|e| c.int(e)).transpose().map_err(me)?.map(|p| p as i32);
            let mut x0 = BTreeMap::new();
            for (k, e) in a.extra(&["t", "theta", "p"]) {
                x0.insert(k.to_string(), c.num(e).map_err(me)?.to_c64());
            }
            let q_theta = t.ham.q.apply(&theta).map_err(ae)?;
            let r = loops::point_observable(&t.ham.q_manifold(), &theta, &x0, p).map_err(ae)?;
            o.push("gauge", r.gauge_ok, q_theta.render());
            o.value = Some(fmt_complex(r.value));
        }
        "theta" => {
            let a = Args::new(kind, args, pos, &["t", "expect"]).map_err(me)?;
            let t = target(&c, a.req(0, "t").map_err(me)?)?;
            let expect = c.poly_in(a.req(1, "expect").map_err(me)?, &t.ham.space).map_err(me)?;
            o.value = Some(t.ham.theta.render());
            o.poly("theta", &(&t.ham.theta - &expect));
        }
        "zero" => {
            let a = Args::new(kind, args, pos, &["p"]).map_err(me)?;
            o.poly("zero", &declared_poly(&c, a.req(0, "p").map_err(me)?)?);
        }
        "degree" => {
            let a = Args::new(kind, args, pos, &["p", "d"]).map_err(me)?;
            let p = declared_poly(&c, a.req(0, "p").map_err(me)?)?;
            let d = c.int(a.req(1, "d").map_err(me)?).map_err(me)?;
            let found = match p.grade_of() {
                Grade::Zero => "zero".to_string(),
                Grade::Homogeneous { internal, .. } => internal.to_string(),
                Grade::Mixed(_) => "mixed".to_string(),
            };
            let ok = found == d.to_string();
            o.push("degree", ok, if ok { "0".into() } else { format!("expected {d}, found {found}") });
        }
        "jacobi" => {
            let a = Args::new(kind, args, pos, &["g"]).map_err(me)?;
            let g = c.algebra(a.req(0, "g").map_err(me)?).map_err(me)?;
            let v: Vec<String> = g.jacobi_violations().iter().map(|(i, j, k, l, x)| format!("J({j},{k},{l})^{i} = {}", x.render())).collect();
            o.push("jacobi", v.is_empty(), if v.is_empty() { "0".into() } else { v.join("; ") });
        }
        "homomorphism" => {
            let a = Args::new(kind, args, pos, &["r", "g"]).map_err(me)?;
            let r = c.rep(a.req(0, "r").map_err(me)?).map_err(me)?;
            let g = c.algebra(a.req(1, "g").map_err(me)?).map_err(me)?;
            let v: Vec<String> = r.homomorphism_violations(&g).iter().map(|(i, j, x)| format!("[ρ{i},ρ{j}] - ρ([e{i},e{j}]) = {}", x.render())).collect();
            o.push("homomorphism", v.is_empty(), if v.is_empty() { "0".into() } else { v.join("; ") });
        }
        other => {
            return Err(format!(
                "unknown check `{other}`; available: verify, cme, qme, pre_observable, pushforward, wilson, torsion, quantized_fiber, psm_operator, point, theta, zero, degree, jacobi, homomorphism"
            ))
        }
    }
    for msg in w.into_inner() {
        o.details.push(Detail {
            name: "warning".into(),
            status: Status::Warning,
            residual: msg,
        });
    }
    Ok(o)
}

fn target<'a>(c: &Ctx<'a>, e: &SExpr) -> R<&'a crate::model::Target> {
    match c.object(e, "target").map_err(me)? {
        Object::Target(t) => Ok(t),
        _ => unreachable!(),
    }
}

fn declared_poly(c: &Ctx, e: &SExpr) -> R<GradedPolynomial> {
    match c.object(e, "poly").map_err(me)? {
        Object::Poly(p) => Ok(p.clone()),
        _ => unreachable!(),
    }
}

/// Coordinate indices of a declared vector, or of a list of coordinate names.
fn coord_indices(c: &Ctx, e: &SExpr, sp: &Space) -> R<Vec<usize>> {
    let names: Vec<String> = match &e.node {
        Expr::List(items) => items.iter().map(|i| c.string(i).map_err(me)).collect::<R<_>>()?,
        _ => match c.object(e, "vector").map_err(me)? {
            Object::Vector { comps, .. } => comps.clone(),
            _ => unreachable!(),
        },
    };
    names
        .iter()
        .map(|n| sp.coord_index(n).ok_or_else(|| format!("`{n}` is not a coordinate of the target")))
        .collect()
}

fn pushforward(c: &Ctx, args: &[Arg], pos: Pos, o: &mut Outcome) -> R<()> {
    let a = Args::new("pushforward", args, pos, &["p", "lagrangian", "expect", "swap", "bound"]).map_err(me)?;
    let Object::Pre(p) = c.object(a.req(0, "p").map_err(me)?, "pre").map_err(me)? else {
        unreachable!()
    };
    let npairs = p.aux.pairs().len();
    let lag = match a.get(1, "lagrangian") {
        Some(e) => parse_lagrangian(&c.string(e).map_err(me)?, npairs)?,
        None => LagrangianSubspace::uniform(npairs, Member::Second),
    };
    let pf = bv_pushforward(p, &lag).map_err(ae)?;
    o.value = Some(pf.observable.render());
    o.poly("gauge", &pf.gauge_residual);
    if let Some(e) = a.get(2, "expect") {
        let expect = c.poly_in(e, &p.ambient.space).map_err(me)?;
        o.poly("expect", &(&pf.observable - &expect));
    }
    if let Some(e) = a.get(3, "swap") {
        let i = c.int(e).map_err(me)?;
        if i < 0 || i as usize >= npairs {
            return Err(format!("swap index {i} out of range 0..{npairs}"));
        }
        let bound = a.get(4, "bound").map(|e| c.int(e)).transpose().map_err(me)?.unwrap_or(4) as u32;
        let other = bv_pushforward(p, &lag.swapped(i as usize)).map_err(ae)?;
        let diff = &pf.observable - &other.observable;
        match q_exactness_witness(&p.ambient.q, &diff, bound).map_err(ae)? {
            Exactness::Exact { witness, residual } => {
                o.push("swap_exact", residual.is_zero(), residual.render());
                o.details.push(Detail {
                    name: "witness".into(),
                    status: Status::Pass,
                    residual: witness.render(),
                });
            }
            Exactness::NotExact {
                degree,
                basis_size,
                rank,
                augmented_rank,
            } => o.push(
                "swap_exact",
                false,
                format!("no witness up to size {bound} in degree {degree}: rank {rank} < {augmented_rank} on {basis_size} monomials"),
            ),
        }
    }
    Ok(())
}

enum Loop<'a> {
    Float(&'a aksz::loops::LatticeLoop, Representation),
    Exact(&'a [QMatrix]),
}

fn loop_arg<'a>(c: &Ctx<'a>, a: &Args, opts: &RunOptions) -> R<Loop<'a>> {
    let Object::Loop(l) = c.object(a.req(0, "l").map_err(me)?, "loop").map_err(me)? else {
        unreachable!()
    };
    match l {
        LoopData::Group(us) => Ok(Loop::Exact(us)),
        LoopData::Algebra(_) if opts.exact => Err("exact mode needs group elements per edge (`format group`)".into()),
        LoopData::Algebra(l) => Ok(Loop::Float(l, c.rep(a.req(1, "r").map_err(me)?).map_err(me)?)),
    }
}

fn close(a: Complex64, b: Complex64, scale: f64) -> (bool, String) {
    let d = (a - b).norm();
    (d <= FLOAT_TOLERANCE * scale.max(1.0), format!("{d:.3e}"))
}

fn wilson(c: &Ctx, args: &[Arg], pos: Pos, opts: &RunOptions, o: &mut Outcome) -> R<()> {
    let a = Args::new("wilson", args, pos, &["l", "r", "expect"]).map_err(me)?;
    match loop_arg(c, &a, opts)? {
        Loop::Float(l, rho) => {
            let w = loops::wilson_loop_pexp(l, &rho).map_err(ae)?;
            o.value = Some(fmt_complex(w));
            let scale = w.norm().max(rho.dim() as f64);
            let worst = (1..l.len())
                .map(|k| loops::wilson_loop_pexp(&l.rotated(k), &rho).map(|v| (v - w).norm()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(ae)?
                .into_iter()
                .fold(0.0f64, f64::max);
            o.push("start_edge", worst <= FLOAT_TOLERANCE * scale, format!("{worst:.3e}"));
            if let Some(e) = a.get(2, "expect") {
                let expect = c.num(e).map_err(me)?.to_c64();
                let (ok, r) = close(w, expect, expect.norm());
                o.push("expect", ok, r);
            }
        }
        Loop::Exact(us) => {
            let w = loops::wilson_exact(us).map_err(ae)?;
            o.value = Some(w.render());
            let bad: Vec<String> = (1..us.len())
                .filter_map(|k| {
                    let rot: Vec<QMatrix> = us[k..].iter().chain(&us[..k]).cloned().collect();
                    match loops::wilson_exact(&rot) {
                        Ok(v) if v == w => None,
                        Ok(v) => Some(format!("start {k}: {}", (&v - &w).render())),
                        Err(e) => Some(e.to_string()),
                    }
                })
                .collect();
            o.push("start_edge", bad.is_empty(), if bad.is_empty() { "0".into() } else { bad.join("; ") });
            if let Some(e) = a.get(2, "expect") {
                let d = &w - &c.num(e).map_err(me)?;
                o.push("expect", d.is_zero(), d.render());
            }
        }
    }
    Ok(())
}

fn torsion(c: &Ctx, args: &[Arg], pos: Pos, opts: &RunOptions, o: &mut Outcome) -> R<()> {
    let a = Args::new("torsion", args, pos, &["l", "r", "expect"]).map_err(me)?;
    match loop_arg(c, &a, opts)? {
        Loop::Float(l, rho) => {
            let t = loops::torsion_1d(l, &rho).map_err(ae)?;
            o.value = Some(format!("direct={} lattice={}", fmt_complex(t.direct), fmt_complex(t.lattice)));
            o.push("match", t.matches, format!("{:.3e}", (t.direct - t.lattice).norm()));
            if let Some(e) = a.get(2, "expect") {
                let expect = c.num(e).map_err(me)?.to_c64();
                let (ok, r) = close(t.direct, expect, expect.norm());
                o.push("expect", ok, r);
            }
        }
        Loop::Exact(us) => {
            let t = loops::torsion_exact(us).map_err(ae)?;
            o.value = Some(format!("direct={} lattice={}", t.direct.render(), t.lattice.render()));
            o.push("match", t.matches(), (&t.direct - &t.lattice).render());
            if let Some(e) = a.get(2, "expect") {
                let d = &t.direct - &c.num(e).map_err(me)?;
                o.push("expect", d.is_zero(), d.render());
            }
        }
    }
    Ok(())
}
