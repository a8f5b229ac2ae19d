//! Loading a parsed model: name resolution, expression evaluation and constructors.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use aksz::bv::{BVTheory, OddSymplecticSpace, PreObservable};
use aksz::loops::LatticeLoop;
use aksz::qstructures::*;
use aksz::*;
use num_rational::BigRational;

use crate::ast::*;
use crate::error::{ErrorKind, ModelError, Pos};
use crate::files;
use crate::printer::print_expr;

/// Hamiltonian target, with the cotangent data when it is a Poisson sigma model.
#[derive(Clone, Debug)]
pub struct Target {
    pub ham: HamiltonianQManifold,
    pub psm: Option<(ShiftedCotangent, Vec<Vec<GradedPolynomial>>)>,
}

#[derive(Clone, Debug)]
pub enum LoopData {
    Algebra(LatticeLoop),
    /// Per-edge group elements, evaluated exactly.
    Group(Vec<QMatrix>),
}

#[derive(Clone, Debug)]
pub enum Object {
    Param(Gq),
    Algebra(LieAlgebra),
    Rep(Representation),
    Pairing { carrier: String, matrix: Vec<Vec<Gq>> },
    Space(Space),
    Vector { carrier: String, comps: Vec<String> },
    Poly(GradedPolynomial),
    Target(Box<Target>),
    Bundle(Box<TrivialHamQBundle>),
    Bv(Box<BVTheory>),
    Pre(Box<PreObservable>),
    Loop(LoopData),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Param(_) => "param",
            Object::Algebra(_) => "algebra",
            Object::Rep(_) => "rep",
            Object::Pairing { .. } => "pairing",
            Object::Space(_) => "space",
            Object::Vector { .. } => "vector",
            Object::Poly(_) => "poly",
            Object::Target(_) => "target",
            Object::Bundle(_) => "bundle",
            Object::Bv(_) => "bv",
            Object::Pre(_) => "pre",
            Object::Loop(_) => "loop",
        }
    }

    /// Underlying graded space of space-like objects.
    pub fn space(&self) -> Option<Space> {
        match self {
            Object::Space(s) => Some(s.clone()),
            Object::Target(t) => Some(t.ham.space.clone()),
            Object::Bundle(b) => Some(b.total.clone()),
            Object::Bv(b) => Some(b.space.space().clone()),
            Object::Pre(p) => Some(p.joint.clone()),
            Object::Poly(p) => Some(p.space().clone()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Env {
    objects: BTreeMap<String, Object>,
}

impl Env {
    pub fn get(&self, name: &str) -> Option<&Object> {
        self.objects.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.objects.keys()
    }

    fn insert(&mut self, name: &str, o: Object, pos: Pos) -> Result<(), ModelError> {
        if self.objects.contains_key(name) {
            return Err(ModelError::semantic(
                pos,
                format!("`{name}` is declared twice"),
                "rename one of the declarations",
            ));
        }
        self.objects.insert(name.to_string(), o);
        Ok(())
    }
}

/// A loaded model ready for checks.
#[derive(Clone, Debug)]
pub struct Model {
    pub name: String,
    pub file: ModelFile,
    pub env: Env,
    pub warnings: Vec<String>,
    pub base_dir: PathBuf,
}

pub fn load_model(file: ModelFile, base_dir: &Path) -> Result<Model, ModelError> {
    let mut l = Loader {
        env: Env::default(),
        warnings: RefCell::new(Vec::new()),
        base_dir: base_dir.to_path_buf(),
    };
    for s in &file.stmts {
        l.stmt(s)?;
    }
    let name = file.name().unwrap_or("unnamed").to_string();
    let mut warnings = l.warnings.into_inner();
    warnings.dedup();
    Ok(Model {
        name,
        file,
        env: l.env,
        warnings,
        base_dir: base_dir.to_path_buf(),
    })
}

pub fn load_str(src: &str, base_dir: &Path) -> Result<Model, ModelError> {
    load_model(crate::parser::parse_model(src)?, base_dir)
}

pub fn load_path(path: &Path) -> Result<Model, ModelError> {
    let src = std::fs::read_to_string(path).map_err(|e| ModelError::io(format!("{}: {e}", path.display())))?;
    load_str(&src, path.parent().unwrap_or(Path::new(".")))
}

/// Value of an expression.
#[derive(Clone, Debug)]
pub enum Value {
    Num(Gq),
    Poly(GradedPolynomial),
    Vector { carrier: String, comps: Vec<GradedPolynomial> },
    Matrix { carrier: String, rows: Vec<Vec<GradedPolynomial>> },
    List(Vec<Value>),
    Str(String),
    Ref(String),
}

impl Value {
    fn describe(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Poly(_) => "polynomial",
            Value::Vector { .. } => "vector",
            Value::Matrix { .. } => "matrix",
            Value::List(_) => "list",
            Value::Str(_) => "string",
            Value::Ref(_) => "declared object",
        }
    }
}

pub fn decimal(s: &str) -> Option<Gq> {
    let r = match s.split_once('.') {
        Some((a, b)) => BigRational::from_str(&format!("{a}{b}/1{}", "0".repeat(b.len()))).ok()?,
        None => BigRational::from_str(s).ok()?,
    };
    Some(Gq::from_rational(r))
}

/// Evaluation context shared by the loader and the check runner.
pub struct Ctx<'a> {
    pub env: &'a Env,
    pub space: Option<Space>,
    pub warnings: &'a RefCell<Vec<String>>,
}

fn unknown(env: &Env, name: &str, pos: Pos, extra: &[&str]) -> ModelError {
    let best = env
        .names()
        .map(String::as_str)
        .chain(extra.iter().copied())
        .map(|n| (strsim::levenshtein(n, name), n))
        .filter(|(d, _)| *d <= 2)
        .min();
    let hint = match best {
        Some((_, n)) => format!("did you mean `{n}`?"),
        None => "declare it before use".to_string(),
    };
    ModelError::new(ErrorKind::UnknownIdentifier, Some(pos), format!("unknown identifier `{name}`"), hint)
}

fn type_err(pos: Pos, msg: impl Into<String>) -> ModelError {
    ModelError::semantic(pos, msg, "check the operand types")
}

impl<'a> Ctx<'a> {
    pub fn new(env: &'a Env, space: Option<Space>, warnings: &'a RefCell<Vec<String>>) -> Self {
        Ctx { env, space, warnings }
    }

    fn with_space(&self, space: &Space) -> Ctx<'a> {
        Ctx {
            env: self.env,
            space: Some(space.clone()),
            warnings: self.warnings,
        }
    }

    fn promote(&self, v: Value, pos: Pos) -> Result<GradedPolynomial, ModelError> {
        match v {
            Value::Poly(p) => Ok(p),
            Value::Num(c) => match &self.space {
                Some(sp) => Ok(Poly::constant(sp, c)),
                None => Err(type_err(pos, "a number cannot be used as a polynomial here")),
            },
            other => Err(type_err(pos, format!("expected a polynomial, found a {}", other.describe()))),
        }
    }

    pub fn eval(&self, e: &SExpr) -> Result<Value, ModelError> {
        let pos = e.pos;
        match &e.node {
            Expr::Num(s) => decimal(s)
                .map(Value::Num)
                .ok_or_else(|| ModelError::syntax(pos, format!("bad number `{s}`"), "write digits with an optional decimal point")),
            Expr::Str(s) => Ok(Value::Str(s.clone())),
            Expr::Ident(n) => self.ident(n, pos),
            Expr::Neg(x) => self.neg(self.eval(x)?, pos),
            Expr::Bin(op, l, r) => {
                let (a, b) = (self.eval(l)?, self.eval(r)?);
                self.binary(*op, a, b, pos)
            }
            Expr::Call(f, args) => self.call(f, args, pos),
            Expr::List(items) => {
                let vals: Vec<Value> = items.iter().map(|i| self.eval(i)).collect::<Result<_, _>>()?;
                if let [Value::Vector { carrier: c1, comps: u }, Value::Vector { carrier: c2, comps: v }] = vals.as_slice() {
                    if c1 == c2 {
                        if let Some(Object::Algebra(g)) = self.env.get(c1) {
                            return self.lie_bracket(g, c1, u, v, pos);
                        }
                    }
                }
                Ok(Value::List(vals))
            }
            Expr::Pairing(a, b) => {
                let (Value::Vector { carrier, comps: u }, Value::Vector { comps: v, .. }) = (self.eval(a)?, self.eval(b)?) else {
                    return Err(type_err(pos, "`(a, b)` pairs two vectors"));
                };
                let k = self
                    .env
                    .objects
                    .values()
                    .filter_map(|o| match o {
                        Object::Pairing { carrier: c, matrix } if *c == carrier => Some(matrix),
                        _ => None,
                    })
                    .next_back()
                    .ok_or_else(|| {
                        ModelError::semantic(
                            pos,
                            format!("no pairing declared for `{carrier}`"),
                            format!("add `pairing k = euclidean({carrier})`"),
                        )
                    })?;
                if k.len() != u.len() || v.len() != u.len() {
                    return Err(type_err(pos, "pairing size does not match the vectors"));
                }
                let sp = self.space_req(pos)?;
                let mut out = Poly::zero(&sp);
                for (i, ui) in u.iter().enumerate() {
                    for (j, vj) in v.iter().enumerate() {
                        if !k[i][j].is_zero() {
                            out = &out + &self.mul_poly(ui, vj, pos).scale(&k[i][j]);
                        }
                    }
                }
                Ok(Value::Poly(out))
            }
            Expr::Natural(a, b) => {
                let (Value::Vector { comps: u, .. }, Value::Vector { comps: v, .. }) = (self.eval(a)?, self.eval(b)?) else {
                    return Err(type_err(pos, "`⟨a, b⟩` pairs two vectors"));
                };
                if u.len() != v.len() {
                    return Err(type_err(pos, format!("vectors of lengths {} and {}", u.len(), v.len())));
                }
                let sp = self.space_req(pos)?;
                let out = u.iter().zip(&v).fold(Poly::zero(&sp), |acc, (x, y)| &acc + &self.mul_poly(x, y, pos));
                Ok(Value::Poly(out))
            }
            Expr::Deriv(x, f) => {
                let sp = self.space_req(pos)?;
                let v = sp.var_id(x).ok_or_else(|| unknown(self.env, x, pos, &[]))?;
                let f = self.eval(f)?;
                let f = self.promote(f, pos)?;
                Ok(Value::Poly(f.left_derivative(v)))
            }
        }
    }

    fn space_req(&self, pos: Pos) -> Result<Space, ModelError> {
        self.space
            .clone()
            .ok_or_else(|| ModelError::semantic(pos, "polynomial expression outside of a space", "use it in `poly NAME on SPACE = ...`"))
    }

    fn ident(&self, n: &str, pos: Pos) -> Result<Value, ModelError> {
        if let Some(sp) = &self.space {
            if let Some(v) = sp.var_id(n) {
                return Ok(Value::Poly(Poly::var(sp, v)));
            }
        }
        if n == "i" {
            return Ok(Value::Num(Gq::i()));
        }
        match self.env.get(n) {
            Some(Object::Param(c)) => Ok(Value::Num(c.clone())),
            Some(Object::Poly(p)) => match &self.space {
                Some(sp) => p.embed(sp).map(Value::Poly).map_err(|e| ModelError::algebra(pos, e)),
                None => Ok(Value::Poly(p.clone())),
            },
            Some(Object::Vector { carrier, comps }) => {
                let sp = self.space_req(pos)?;
                let comps = comps
                    .iter()
                    .map(|c| sp.var_id(c).map(|v| Poly::var(&sp, v)).ok_or_else(|| unknown(self.env, c, pos, &[])))
                    .collect::<Result<_, _>>()?;
                Ok(Value::Vector {
                    carrier: carrier.clone(),
                    comps,
                })
            }
            Some(_) => Ok(Value::Ref(n.to_string())),
            None => {
                let coords: Vec<String> = self
                    .space
                    .as_ref()
                    .map(|s| s.coords().iter().map(|c| c.name.clone()).collect())
                    .unwrap_or_default();
                let extra: Vec<&str> = coords.iter().map(String::as_str).collect();
                Err(unknown(self.env, n, pos, &extra))
            }
        }
    }

    fn mul_poly(&self, a: &GradedPolynomial, b: &GradedPolynomial, pos: Pos) -> GradedPolynomial {
        let sp = a.space().clone();
        'outer: for (ma, _) in a.terms() {
            for (mb, _) in b.terms() {
                if let Some(v) = (0..sp.num_vars() as VarId).find(|&v| sp.parity(v) && ma.contains(v) && mb.contains(v)) {
                    self.warnings
                        .borrow_mut()
                        .push(format!("{pos}: odd square: {} appears in both factors and the term vanishes", sp.var_name(v)));
                    break 'outer;
                }
            }
        }
        a * b
    }

    fn neg(&self, v: Value, pos: Pos) -> Result<Value, ModelError> {
        self.binary(BinOp::Mul, Value::Num(-Gq::one()), v, pos)
    }

    fn binary(&self, op: BinOp, a: Value, b: Value, pos: Pos) -> Result<Value, ModelError> {
        use Value::*;
        match (op, a, b) {
            (BinOp::Add, Num(x), Num(y)) => Ok(Num(&x + &y)),
            (BinOp::Sub, Num(x), Num(y)) => Ok(Num(&x - &y)),
            (BinOp::Mul, Num(x), Num(y)) => Ok(Num(&x * &y)),
            (BinOp::Div, x, Num(y)) => {
                let inv = y
                    .inv()
                    .ok_or_else(|| ModelError::semantic(pos, "division by zero", "divide by a nonzero number"))?;
                self.binary(BinOp::Mul, Num(inv), x, pos)
            }
            (BinOp::Div, _, _) => Err(type_err(pos, "only division by numbers is supported")),
            (BinOp::Pow, x, Num(y)) => {
                let e = gq_to_int(&y)
                    .filter(|e| *e >= 0)
                    .ok_or_else(|| ModelError::semantic(pos, "exponents must be non-negative integers", "write e.g. `x^2`"))?;
                match x {
                    Num(x) => Ok(Num(x.pow(e as u32))),
                    Poly(p) => Ok(Poly(p.pow(e as u32))),
                    other => Err(type_err(pos, format!("cannot raise a {} to a power", other.describe()))),
                }
            }
            (BinOp::Pow, _, _) => Err(type_err(pos, "exponents must be numbers")),
            (BinOp::Mul, Num(c), Vector { carrier, comps }) | (BinOp::Mul, Vector { carrier, comps }, Num(c)) => Ok(Vector {
                carrier,
                comps: comps.iter().map(|x| x.scale(&c)).collect(),
            }),
            (BinOp::Mul, Poly(p), Vector { carrier, comps }) => Ok(Vector {
                carrier,
                comps: comps.iter().map(|x| self.mul_poly(&p, x, pos)).collect(),
            }),
            (BinOp::Mul, Num(c), Matrix { carrier, rows }) => Ok(Matrix {
                carrier,
                rows: rows.iter().map(|r| r.iter().map(|x| x.scale(&c)).collect()).collect(),
            }),
            (BinOp::Mul, Matrix { carrier, rows }, Vector { comps, .. }) => {
                if rows.first().map_or(0, Vec::len) != comps.len() {
                    return Err(type_err(pos, "matrix and vector sizes differ"));
                }
                let sp = self.space_req(pos)?;
                let out = rows
                    .iter()
                    .map(|r| r.iter().zip(&comps).fold(aksz::Poly::zero(&sp), |acc, (m, x)| &acc + &self.mul_poly(m, x, pos)))
                    .collect();
                Ok(Vector { carrier, comps: out })
            }
            (BinOp::Add | BinOp::Sub, Vector { carrier, comps: u }, Vector { carrier: c2, comps: v }) => {
                if carrier != c2 || u.len() != v.len() {
                    return Err(type_err(pos, "vectors with different carriers"));
                }
                let comps = u.iter().zip(&v).map(|(x, y)| if op == BinOp::Add { x + y } else { x - y }).collect();
                Ok(Vector { carrier, comps })
            }
            (op, x, y) => {
                let (x, y) = (self.promote(x, pos)?, self.promote(y, pos)?);
                Ok(Poly(match op {
                    BinOp::Add => &x + &y,
                    BinOp::Sub => &x - &y,
                    _ => self.mul_poly(&x, &y, pos),
                }))
            }
        }
    }

    fn lie_bracket(&self, g: &LieAlgebra, carrier: &str, u: &[GradedPolynomial], v: &[GradedPolynomial], pos: Pos) -> Result<Value, ModelError> {
        let d = g.dim();
        if u.len() != d || v.len() != d {
            return Err(type_err(pos, format!("bracket on a {d}-dimensional algebra needs vectors of length {d}")));
        }
        let sp = self.space_req(pos)?;
        let comps = (0..d)
            .map(|a| {
                let mut acc = Poly::zero(&sp);
                for b in 0..d {
                    for c in 0..d {
                        if !g.f(a, b, c).is_zero() {
                            acc = &acc + &self.mul_poly(&u[b], &v[c], pos).scale(g.f(a, b, c));
                        }
                    }
                }
                acc
            })
            .collect();
        Ok(Value::Vector {
            carrier: carrier.to_string(),
            comps,
        })
    }

    fn call(&self, f: &str, args: &[Arg], pos: Pos) -> Result<Value, ModelError> {
        match self.env.get(f) {
            Some(Object::Rep(r)) => {
                let [Arg { key: None, value }] = args else {
                    return Err(ModelError::syntax(
                        pos,
                        format!("`{f}(v)` takes one vector"),
                        "apply a representation to a single vector",
                    ));
                };
                let Value::Vector { comps, .. } = self.eval(value)? else {
                    return Err(type_err(pos, "a representation acts on a vector"));
                };
                if comps.len() != r.len() {
                    return Err(type_err(
                        pos,
                        format!("`{f}` has {} generators, the vector {} components", r.len(), comps.len()),
                    ));
                }
                let sp = self.space_req(pos)?;
                let d = r.dim();
                let rows = (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| comps.iter().zip(r.matrices()).fold(Poly::zero(&sp), |acc, (x, m)| &acc + &x.scale(m.get(i, j))))
                            .collect()
                    })
                    .collect();
                Ok(Value::Matrix { carrier: f.to_string(), rows })
            }
            _ => Err(ModelError::new(
                ErrorKind::UnknownIdentifier,
                Some(pos),
                format!("`{f}(…)` is not a function in expressions"),
                "constructors such as su2() belong on the right of a declaration",
            )),
        }
    }

    pub fn num(&self, e: &SExpr) -> Result<Gq, ModelError> {
        match (Ctx {
            env: self.env,
            space: None,
            warnings: self.warnings,
        })
        .eval(e)?
        {
            Value::Num(c) => Ok(c),
            other => Err(type_err(e.pos, format!("expected a number, found a {}", other.describe()))),
        }
    }

    pub fn int(&self, e: &SExpr) -> Result<i64, ModelError> {
        gq_to_int(&self.num(e)?).ok_or_else(|| type_err(e.pos, "expected an integer"))
    }

    pub fn poly_in(&self, e: &SExpr, sp: &Space) -> Result<GradedPolynomial, ModelError> {
        let c = self.with_space(sp);
        let v = c.eval(e)?;
        c.promote(v, e.pos)
    }

    pub fn num_list(&self, e: &SExpr) -> Result<Vec<Gq>, ModelError> {
        match &e.node {
            Expr::List(items) => items.iter().map(|i| self.num(i)).collect(),
            _ => Err(type_err(e.pos, "expected a list of numbers `[...]`")),
        }
    }

    pub fn int_list(&self, e: &SExpr) -> Result<Vec<i64>, ModelError> {
        match &e.node {
            Expr::List(items) => items.iter().map(|i| self.int(i)).collect(),
            _ => Err(type_err(e.pos, "expected a list of integers `[...]`")),
        }
    }

    pub fn num_matrix(&self, e: &SExpr) -> Result<Vec<Vec<Gq>>, ModelError> {
        let rows = match &e.node {
            Expr::List(items) => items.iter().map(|r| self.num_list(r)).collect::<Result<Vec<_>, _>>()?,
            _ => return Err(type_err(e.pos, "expected a matrix `[[...], ...]`")),
        };
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(ModelError::semantic(e.pos, "matrix is not square", "give as many entries per row as rows"));
        }
        Ok(rows)
    }

    pub fn poly_matrix(&self, e: &SExpr, sp: &Space) -> Result<Vec<Vec<GradedPolynomial>>, ModelError> {
        match &e.node {
            Expr::List(rows) => rows
                .iter()
                .map(|r| match &r.node {
                    Expr::List(items) => items.iter().map(|i| self.poly_in(i, sp)).collect(),
                    _ => Err(type_err(r.pos, "expected a row `[...]`")),
                })
                .collect(),
            _ => Err(type_err(e.pos, "expected a matrix of polynomials")),
        }
    }

    pub fn object(&self, e: &SExpr, kind: &str) -> Result<&'a Object, ModelError> {
        match &e.node {
            Expr::Ident(n) => {
                let o = self.env.get(n).ok_or_else(|| unknown(self.env, n, e.pos, &[]))?;
                if kind.split('|').any(|k| k == o.kind()) {
                    Ok(o)
                } else {
                    Err(ModelError::semantic(
                        e.pos,
                        format!("`{n}` is a {}, expected a {kind}", o.kind()),
                        format!("pass the name of a declared {kind}"),
                    ))
                }
            }
            _ => Err(ModelError::semantic(
                e.pos,
                format!("expected the name of a {kind}"),
                format!("declare the {kind} first and pass its name"),
            )),
        }
    }

    pub fn algebra(&self, e: &SExpr) -> Result<LieAlgebra, ModelError> {
        if let Expr::Call(f, args) = &e.node {
            return build_algebra(self, f, args, e.pos);
        }
        match self.object(e, "algebra")? {
            Object::Algebra(g) => Ok(g.clone()),
            _ => unreachable!(),
        }
    }

    pub fn rep(&self, e: &SExpr) -> Result<Representation, ModelError> {
        if let Expr::Call(f, args) = &e.node {
            return build_rep(self, f, args, e.pos);
        }
        match self.object(e, "rep")? {
            Object::Rep(r) => Ok(r.clone()),
            _ => unreachable!(),
        }
    }

    pub fn pairing(&self, e: &SExpr) -> Result<Vec<Vec<Gq>>, ModelError> {
        match &e.node {
            Expr::List(_) => self.num_matrix(e),
            _ => match self.object(e, "pairing")? {
                Object::Pairing { matrix, .. } => Ok(matrix.clone()),
                _ => unreachable!(),
            },
        }
    }

    pub fn string(&self, e: &SExpr) -> Result<String, ModelError> {
        match &e.node {
            Expr::Str(s) | Expr::Ident(s) => Ok(s.clone()),
            _ => Err(type_err(e.pos, "expected a string")),
        }
    }

    pub fn boolean(&self, e: &SExpr) -> Result<bool, ModelError> {
        match &e.node {
            Expr::Ident(s) if s == "true" => Ok(true),
            Expr::Ident(s) if s == "false" => Ok(false),
            _ => Err(ModelError::semantic(e.pos, "expected `true` or `false`", "write `true` or `false`")),
        }
    }
}

pub fn gq_to_int(c: &Gq) -> Option<i64> {
    let z = c.to_c64();
    (c.is_real() && z.re.fract() == 0.0 && z.re.abs() < 1e15 && Gq::int(z.re as i64) == *c).then_some(z.re as i64)
}

/// Positional/keyword argument access for constructors.
pub struct Args<'s> {
    pub f: String,
    pub pos: Pos,
    args: &'s [Arg],
}

impl<'s> Args<'s> {
    /// Checks the argument list against `allowed`; a trailing `"*"` admits any keyword.
    pub fn new(f: &str, args: &'s [Arg], pos: Pos, allowed: &[&str]) -> Result<Self, ModelError> {
        let open = allowed.last() == Some(&"*");
        let allowed = if open { &allowed[..allowed.len() - 1] } else { allowed };
        for a in args {
            if let Some(k) = &a.key {
                if !open && !allowed.contains(&k.as_str()) {
                    return Err(ModelError::syntax(
                        a.value.pos,
                        format!("`{f}` has no argument `{k}`"),
                        format!("arguments of `{f}`: {}", allowed.join(", ")),
                    ));
                }
            }
        }
        let positional = args.iter().filter(|a| a.key.is_none()).count();
        if positional > allowed.len() {
            return Err(ModelError::syntax(
                pos,
                format!("`{f}` takes at most {} arguments", allowed.len()),
                format!("arguments of `{f}`: {}", allowed.join(", ")),
            ));
        }
        Ok(Args { f: f.to_string(), pos, args })
    }

    /// Argument `i` (positional) or keyword `key`, where `key` is the `i`-th allowed name.
    pub fn get(&self, i: usize, key: &str) -> Option<&'s SExpr> {
        self.args
            .iter()
            .find(|a| a.key.as_deref() == Some(key))
            .or_else(|| self.args.iter().filter(|a| a.key.is_none()).nth(i))
            .map(|a| &a.value)
    }

    pub fn req(&self, i: usize, key: &str) -> Result<&'s SExpr, ModelError> {
        self.get(i, key)
            .ok_or_else(|| ModelError::syntax(self.pos, format!("`{}` needs argument `{key}`", self.f), format!("add `{key}=...`")))
    }

    /// Keyword arguments not in `known`.
    pub fn extra(&self, known: &[&str]) -> Vec<(&'s str, &'s SExpr)> {
        self.args
            .iter()
            .filter_map(|a| a.key.as_deref().filter(|k| !known.contains(k)).map(|k| (k, &a.value)))
            .collect()
    }
}

fn bad_ctor(kind: &str, f: &str, pos: Pos, options: &str) -> ModelError {
    ModelError::new(
        ErrorKind::UnknownIdentifier,
        Some(pos),
        format!("unknown {kind} constructor `{f}`"),
        format!("use one of: {options}"),
    )
}

fn call_of(e: &SExpr) -> Option<(&str, &[Arg])> {
    match &e.node {
        Expr::Call(f, a) => Some((f.as_str(), a.as_slice())),
        _ => None,
    }
}

fn alg_err(pos: Pos) -> impl Fn(AlgebraError) -> ModelError {
    move |e| ModelError::algebra(pos, e)
}

fn idx(c: &Ctx, e: &SExpr, n: usize, what: &str) -> Result<usize, ModelError> {
    let v = c.int(e)?;
    if v < 0 || v as usize >= n {
        return Err(ModelError::semantic(
            e.pos,
            format!("{what} index {v} out of range 0..{n}"),
            "indices are 0-based",
        ));
    }
    Ok(v as usize)
}

pub fn build_algebra(c: &Ctx, f: &str, args: &[Arg], pos: Pos) -> Result<LieAlgebra, ModelError> {
    Ok(match f {
        "su2" => LieAlgebra::su2(),
        "so4" => LieAlgebra::so4(),
        "aff1" => LieAlgebra::aff1(),
        "heisenberg" => LieAlgebra::heisenberg(),
        "abelian" => {
            let a = Args::new(f, args, pos, &["dim"])?;
            LieAlgebra::abelian(c.int(a.req(0, "dim")?)? as usize)
        }
        "lie" => {
            let a = Args::new(f, args, pos, &["dim", "f"])?;
            let dim = c.int(a.req(0, "dim")?)? as usize;
            let fe = a.req(1, "f")?;
            let Expr::List(items) = &fe.node else {
                return Err(type_err(fe.pos, "`f` is a list of `[a, b, c, coeff]` entries"));
            };
            let mut entries = Vec::new();
            for it in items {
                match &it.node {
                    Expr::List(e) if e.len() == 4 => {
                        entries.push((idx(c, &e[0], dim, "a")?, idx(c, &e[1], dim, "b")?, idx(c, &e[2], dim, "c")?, c.num(&e[3])?))
                    }
                    _ => {
                        return Err(ModelError::semantic(
                            it.pos,
                            "structure constant entries are `[a, b, c, coeff]`",
                            "f^a_{bc} with 0-based indices",
                        ))
                    }
                }
            }
            let name = c
                .string(a.get(2, "name").unwrap_or(&Spanned {
                    node: Expr::Str("lie".into()),
                    pos,
                }))
                .unwrap_or_else(|_| "lie".into());
            LieAlgebra::from_entries(name, dim, &entries)
        }
        "perturb" => {
            let a = Args::new(f, args, pos, &["g", "a", "b", "c", "delta"])?;
            let g = c.algebra(a.req(0, "g")?)?;
            let d = g.dim();
            let (i, j, k) = (
                idx(c, a.req(1, "a")?, d, "a")?,
                idx(c, a.req(2, "b")?, d, "b")?,
                idx(c, a.req(3, "c")?, d, "c")?,
            );
            g.perturbed(i, j, k, &c.num(a.req(4, "delta")?)?)
        }
        "direct_sum" => {
            let a = Args::new(f, args, pos, &["g", "h"])?;
            c.algebra(a.req(0, "g")?)?.direct_sum(&c.algebra(a.req(1, "h")?)?)
        }
        _ => return Err(bad_ctor("algebra", f, pos, "su2, so4, aff1, heisenberg, abelian, lie, perturb, direct_sum")),
    })
}

fn qmatrix(c: &Ctx, e: &SExpr) -> Result<QMatrix, ModelError> {
    QMatrix::from_rows(c.num_matrix(e)?).map_err(alg_err(e.pos))
}

pub fn build_rep(c: &Ctx, f: &str, args: &[Arg], pos: Pos) -> Result<Representation, ModelError> {
    Ok(match f {
        "spin_half" => Representation::spin_half(),
        "spin_one" => Representation::spin_one(),
        "adjoint" => {
            let a = Args::new(f, args, pos, &["g"])?;
            Representation::adjoint(&c.algebra(a.req(0, "g")?)?)
        }
        "scalar" => {
            let a = Args::new(f, args, pos, &["weights"])?;
            Representation::scalar(&c.num_list(a.req(0, "weights")?)?)
        }
        "matrices" => {
            let a = Args::new(f, args, pos, &["g", "m"])?;
            let g = c.algebra(a.req(0, "g")?)?;
            let me = a.req(1, "m")?;
            let Expr::List(ms) = &me.node else {
                return Err(type_err(me.pos, "`m` is a list of matrices"));
            };
            let mats = ms.iter().map(|m| qmatrix(c, m)).collect::<Result<Vec<_>, _>>()?;
            Representation::new("matrices", &g, mats).map_err(alg_err(pos))?
        }
        "perturb" => {
            let a = Args::new(f, args, pos, &["r", "a", "i", "j", "delta"])?;
            let r = c.rep(a.req(0, "r")?)?;
            let (n, d) = (r.len(), r.dim());
            r.perturbed(
                idx(c, a.req(1, "a")?, n, "generator")?,
                idx(c, a.req(2, "i")?, d, "row")?,
                idx(c, a.req(3, "j")?, d, "column")?,
                &c.num(a.req(4, "delta")?)?,
            )
        }
        "scaled" => {
            let a = Args::new(f, args, pos, &["r", "s"])?;
            c.rep(a.req(0, "r")?)?.scaled(&c.num(a.req(1, "s")?)?)
        }
        _ => {
            return Err(bad_ctor(
                "rep",
                f,
                pos,
                "spin_half, spin_one, adjoint, scalar, matrices, perturb, scaled (or file in a declaration)",
            ))
        }
    })
}

fn identity(n: usize) -> Vec<Vec<Gq>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Gq::one() } else { Gq::zero() }).collect()).collect()
}

fn carrier_dim(c: &Ctx, e: &SExpr) -> Result<(String, usize), ModelError> {
    let name = c.string(e)?;
    match c.object(e, "algebra|rep")? {
        Object::Algebra(g) => Ok((name, g.dim())),
        Object::Rep(r) => Ok((name, r.dim())),
        _ => unreachable!(),
    }
}

struct Loader {
    env: Env,
    warnings: RefCell<Vec<String>>,
    base_dir: PathBuf,
}

impl Loader {
    fn ctx(&self) -> Ctx<'_> {
        Ctx::new(&self.env, None, &self.warnings)
    }

    fn stmt(&mut self, s: &Spanned<Stmt>) -> Result<(), ModelError> {
        let pos = s.pos;
        match &s.node {
            Stmt::Model(_) | Stmt::Check { .. } => Ok(()),
            Stmt::Space { name, coords } => {
                let sp = GradedSpace::new(coords.iter().cloned()).map_err(alg_err(pos))?;
                self.env.insert(name, Object::Space(sp), pos)
            }
            Stmt::Vector { name, carrier, comps } => {
                let n = match self.env.get(carrier) {
                    Some(Object::Algebra(g)) => g.dim(),
                    Some(Object::Rep(r)) => r.dim(),
                    _ => return Err(unknown(&self.env, carrier, pos, &[])),
                };
                if n != comps.len() {
                    return Err(ModelError::semantic(
                        pos,
                        format!("`{carrier}` has dimension {n}, the vector {} components", comps.len()),
                        format!("list {n} coordinates"),
                    ));
                }
                self.env.insert(
                    name,
                    Object::Vector {
                        carrier: carrier.clone(),
                        comps: comps.clone(),
                    },
                    pos,
                )
            }
            Stmt::Poly { name, on, degree, value } => {
                let sp = self.env.get(on).and_then(Object::space).ok_or_else(|| unknown(&self.env, on, pos, &[]))?;
                let p = self.ctx().poly_in(value, &sp)?;
                if let Some(d) = degree {
                    match p.grade_of() {
                        Grade::Zero => {}
                        Grade::Homogeneous { internal, .. } if internal == *d => {}
                        Grade::Homogeneous { internal, .. } => {
                            return Err(ModelError::new(
                                ErrorKind::DegreeMismatch,
                                Some(pos),
                                format!("`{name}` is declared with degree {d} but has degree {internal}"),
                                format!("change the annotation to `: {internal}` or fix the expression"),
                            ))
                        }
                        Grade::Mixed(_) => {
                            return Err(ModelError::new(
                                ErrorKind::DegreeMismatch,
                                Some(pos),
                                format!("`{name}` is declared with degree {d} but is not homogeneous"),
                                "split it into homogeneous parts or drop the annotation",
                            ))
                        }
                    }
                }
                self.env.insert(name, Object::Poly(p), pos)
            }
            Stmt::Decl { kind, name, value } => {
                let o = self.decl(*kind, value)?;
                self.env.insert(name, o, pos)
            }
        }
    }

    fn decl(&self, kind: DeclKind, e: &SExpr) -> Result<Object, ModelError> {
        let c = self.ctx();
        let pos = e.pos;
        if kind == DeclKind::Param {
            return Ok(Object::Param(c.num(e)?));
        }
        let Some((f, args)) = call_of(e) else {
            return Err(ModelError::syntax(
                pos,
                format!("expected a constructor call, found `{}`", print_expr(e)),
                "write e.g. `algebra g = su2()`",
            ));
        };
        Ok(match kind {
            DeclKind::Param => unreachable!(),
            DeclKind::Algebra => Object::Algebra(build_algebra(&c, f, args, pos)?),
            DeclKind::Rep => Object::Rep(self.rep(&c, f, args, pos)?),
            DeclKind::Pairing => {
                let (carrier, matrix) = match f {
                    "euclidean" => {
                        let a = Args::new(f, args, pos, &["on"])?;
                        let (name, n) = carrier_dim(&c, a.req(0, "on")?)?;
                        (name, identity(n))
                    }
                    "killing" => {
                        let a = Args::new(f, args, pos, &["g"])?;
                        let e = a.req(0, "g")?;
                        (c.string(e)?, c.algebra(e)?.killing_form())
                    }
                    "matrix" => {
                        let a = Args::new(f, args, pos, &["on", "m"])?;
                        let (name, n) = carrier_dim(&c, a.req(0, "on")?)?;
                        let m = c.num_matrix(a.req(1, "m")?)?;
                        if m.len() != n {
                            return Err(ModelError::semantic(
                                pos,
                                format!("pairing on `{name}` must be {n}×{n}"),
                                "match the carrier dimension",
                            ));
                        }
                        (name, m)
                    }
                    _ => return Err(bad_ctor("pairing", f, pos, "euclidean, killing, matrix")),
                };
                Object::Pairing { carrier, matrix }
            }
            DeclKind::Target => Object::Target(Box::new(self.target(&c, f, args, pos)?)),
            DeclKind::Bundle => Object::Bundle(Box::new(self.bundle(&c, f, args, pos)?)),
            DeclKind::Bv => Object::Bv(Box::new(self.bv(&c, f, args, pos)?)),
            DeclKind::Pre => Object::Pre(Box::new(self.pre(&c, f, args, pos)?)),
            DeclKind::Loop => Object::Loop(self.lattice_loop(&c, f, args, pos)?),
        })
    }

    fn path(&self, c: &Ctx, e: &SExpr) -> Result<PathBuf, ModelError> {
        Ok(self.base_dir.join(c.string(e)?))
    }

    fn rep(&self, c: &Ctx, f: &str, args: &[Arg], pos: Pos) -> Result<Representation, ModelError> {
        if f == "file" {
            let a = Args::new(f, args, pos, &["path"])?;
            let p = self.path(c, a.req(0, "path")?)?;
            return files::read_rep_file(&p).map_err(|e| ModelError::semantic(pos, e.to_string(), "check the representation file"));
        }
        build_rep(c, f, args, pos)
    }

    fn target(&self, c: &Ctx, f: &str, args: &[Arg], pos: Pos) -> Result<Target, ModelError> {
        let ham = |t: Result<HamiltonianQManifold, AlgebraError>| t.map(|ham| Target { ham, psm: None }).map_err(alg_err(pos));
        match f {
            "chern_simons" => {
                let a = Args::new(f, args, pos, &["g", "k"])?;
                ham(chern_simons(&c.algebra(a.req(0, "g")?)?, &c.pairing(a.req(1, "k")?)?))
            }
            "bf" => {
                let a = Args::new(f, args, pos, &["g", "D"])?;
                ham(bf(&c.algebra(a.req(0, "g")?)?, c.int(a.req(1, "D")?)? as i32))
            }
            "poisson_sigma" => {
                let a = Args::new(f, args, pos, &["on", "pi"])?;
                let on = a.req(0, "on")?;
                let (x_names, pi) = match a.get(1, "pi") {
                    None => {
                        let g = c.algebra(on)?;
                        let xs: Vec<String> = (1..=g.dim()).map(|i| format!("x{i}")).collect();
                        let refs: Vec<&str> = xs.iter().map(String::as_str).collect();
                        (xs.clone(), lie_poisson(&g, &refs).map_err(alg_err(pos))?)
                    }
                    Some(pe) => {
                        let Object::Space(sp) = c.object(on, "space")? else { unreachable!() };
                        if sp.coords().iter().any(|co| co.degree != 0) {
                            return Err(ModelError::semantic(
                                on.pos,
                                "Poisson sigma base coordinates must have degree 0",
                                "declare the base with degree-0 coordinates",
                            ));
                        }
                        (sp.coords().iter().map(|co| co.name.clone()).collect(), c.poly_matrix(pe, sp)?)
                    }
                };
                let ps: Vec<String> = (1..=x_names.len()).map(|i| format!("p{i}")).collect();
                let xr: Vec<&str> = x_names.iter().map(String::as_str).collect();
                let pr: Vec<&str> = ps.iter().map(String::as_str).collect();
                let h = poisson_sigma(&xr, &pr, &pi).map_err(alg_err(pos))?;
                let pairs: Vec<(&str, &str)> = xr.iter().copied().zip(pr.iter().copied()).collect();
                let cot = ShiftedCotangent::within(&h.space, &pairs).map_err(alg_err(pos))?;
                let pi = pi
                    .iter()
                    .map(|r| r.iter().map(|p| p.embed(&h.space)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(alg_err(pos))?;
                Ok(Target { ham: h, psm: Some((cot, pi)) })
            }
            "hamiltonian" => {
                let a = Args::new(f, args, pos, &["on", "n", "theta", "omega", "alpha", "q"])?;
                let Object::Space(sp) = c.object(a.req(0, "on")?, "space")? else {
                    unreachable!()
                };
                let n = c.int(a.req(1, "n")?)? as i32;
                let theta = c.poly_in(a.req(2, "theta")?, sp)?;
                let form = c.poly_in(a.req(3, "omega")?, sp)?;
                let alpha = c.poly_in(a.req(4, "alpha")?, sp)?;
                let omega = ConstantSymplectic::from_form(&form, n).map_err(alg_err(pos))?;
                let q = match a.get(5, "q") {
                    Some(qe) => {
                        let Expr::List(items) = &qe.node else {
                            return Err(type_err(qe.pos, "`q` lists one component per coordinate"));
                        };
                        if items.len() != sp.n() {
                            return Err(ModelError::semantic(
                                qe.pos,
                                format!("`q` needs {} components", sp.n()),
                                "one component per coordinate, in declaration order",
                            ));
                        }
                        let comps = items.iter().map(|i| c.poly_in(i, sp)).collect::<Result<Vec<_>, _>>()?;
                        VectorField::new(sp, comps, 1).map_err(alg_err(pos))?
                    }
                    None => {
                        let q = omega.hamiltonian_vf(&theta).map_err(alg_err(pos))?;
                        if q.is_zero() {
                            VectorField::zero(sp, 1)
                        } else {
                            q
                        }
                    }
                };
                Ok(Target {
                    ham: HamiltonianQManifold {
                        name: "hamiltonian".into(),
                        space: sp.clone(),
                        q,
                        omega,
                        alpha,
                        theta,
                        n,
                        warnings: Vec::new(),
                    },
                    psm: None,
                })
            }
            _ => Err(bad_ctor("target", f, pos, "chern_simons, bf, poisson_sigma, hamiltonian")),
        }
    }

    fn bundle(&self, c: &Ctx, f: &str, args: &[Arg], pos: Pos) -> Result<TrivialHamQBundle, ModelError> {
        let ae = alg_err(pos);
        match f {
            "orthogonal_module" => {
                let a = Args::new(f, args, pos, &["g", "r", "k", "K", "symplectic"])?;
                let sym = a.get(4, "symplectic").map(|e| c.boolean(e)).transpose()?.unwrap_or(false);
                let kk = a.get(3, "K").map(|e| c.int(e)).transpose()?.unwrap_or(0) as i32;
                orthogonal_module(&c.algebra(a.req(0, "g")?)?, &c.rep(a.req(1, "r")?)?, &c.pairing(a.req(2, "k")?)?, kk, sym).map_err(ae)
            }
            "moment_map" => {
                let a = Args::new(f, args, pos, &["g", "on", "w", "mu"])?;
                let g = c.algebra(a.req(0, "g")?)?;
                let Object::Space(sp) = c.object(a.req(1, "on")?, "space")? else {
                    unreachable!()
                };
                let w = c.num_matrix(a.req(2, "w")?)?;
                let me = a.req(3, "mu")?;
                let Expr::List(items) = &me.node else {
                    return Err(type_err(me.pos, "`mu` lists one polynomial per generator"));
                };
                let mu = items.iter().map(|i| c.poly_in(i, sp)).collect::<Result<Vec<_>, _>>()?;
                let y_names = sp.coords().iter().map(|co| co.name.clone()).collect();
                moment_map(&MomentMapData { g, y_names, w, mu }).map_err(ae)
            }
            "point_fiber" => {
                let a = Args::new(f, args, pos, &["base", "theta", "p"])?;
                let Object::Target(t) = c.object(a.req(0, "base")?, "target")? else {
                    unreachable!()
                };
                let theta = c.poly_in(a.req(1, "theta")?, &t.ham.space)?;
                let p = a.get(2, "p").map(|e| c.int(e)).transpose()?.map(|p| p as i32);
                point_fiber(&t.ham.q_manifold(), Some(&t.ham.omega), &theta, p).map_err(ae)
            }
            "cattaneo_rossi" => {
                let a = Args::new(f, args, pos, &["g", "D"])?;
                cattaneo_rossi(&c.algebra(a.req(0, "g")?)?, c.int(a.req(1, "D")?)? as i32).map_err(ae)
            }
            "linfty_module" => {
                let a = Args::new(f, args, pos, &["g_degrees", "l", "r_degrees", "k", "q", "pairing", "rho", "max_arity"])?;
                let g_degrees: Vec<i32> = c.int_list(a.req(0, "g_degrees")?)?.into_iter().map(|d| d as i32).collect();
                let l = tensor_entries(c, a.get(1, "l"), g_degrees.len())?;
                let r_degrees: Vec<i32> = c.int_list(a.req(2, "r_degrees")?)?.into_iter().map(|d| d as i32).collect();
                let data = LinftyModuleData {
                    l,
                    r_degrees,
                    k: a.get(3, "k").map(|e| c.int(e)).transpose()?.unwrap_or(0) as i32,
                    q: a.get(4, "q").map(|e| c.int(e)).transpose()?.unwrap_or(0) as i32,
                    pairing: c.pairing(a.req(5, "pairing")?)?,
                    rho: module_entries(c, a.get(6, "rho"))?,
                    max_arity: a.get(7, "max_arity").map(|e| c.int(e)).transpose()?.unwrap_or(2) as usize,
                    g_degrees,
                };
                linfty_module(&data).map_err(ae)
            }
            "linfty_ideal" => {
                let a = Args::new(f, args, pos, &["h_degrees", "ideal", "lambda", "pairing", "q"])?;
                let h_degrees: Vec<i32> = c.int_list(a.req(0, "h_degrees")?)?.into_iter().map(|d| d as i32).collect();
                let ideal = c.int_list(a.req(1, "ideal")?)?.into_iter().map(|d| d as usize).collect();
                let lambda = tensor_entries(c, a.get(2, "lambda"), h_degrees.len())?;
                let data = LinftyIdealData {
                    h_degrees,
                    ideal,
                    lambda,
                    pairing: c.pairing(a.req(3, "pairing")?)?,
                    q: a.get(4, "q").map(|e| c.int(e)).transpose()?.unwrap_or(0) as i32,
                };
                linfty_ideal(&data).map_err(ae)
            }
            _ => Err(bad_ctor(
                "bundle",
                f,
                pos,
                "orthogonal_module, moment_map, point_fiber, cattaneo_rossi, linfty_module, linfty_ideal",
            )),
        }
    }

    fn bv(&self, c: &Ctx, f: &str, args: &[Arg], pos: Pos) -> Result<BVTheory, ModelError> {
        if f != "theory" {
            return Err(bad_ctor("bv", f, pos, "theory"));
        }
        let a = Args::new(f, args, pos, &["pairs", "action", "unchecked"])?;
        let pairs = pair_list(c, a.req(0, "pairs")?)?;
        let refs: Vec<(&str, i32, &str)> = pairs.iter().map(|(x, d, y)| (x.as_str(), *d, y.as_str())).collect();
        let sp = OddSymplecticSpace::new(&refs).map_err(alg_err(pos))?;
        let s = c.poly_in(a.req(1, "action")?, sp.space())?;
        let unchecked = a.get(2, "unchecked").map(|e| c.boolean(e)).transpose()?.unwrap_or(false);
        if unchecked { BVTheory::unchecked(sp, &s) } else { BVTheory::new(sp, &s) }.map_err(alg_err(pos))
    }

    fn pre(&self, c: &Ctx, f: &str, args: &[Arg], pos: Pos) -> Result<PreObservable, ModelError> {
        if f != "pre_observable" {
            return Err(bad_ctor("pre", f, pos, "pre_observable"));
        }
        let a = Args::new(f, args, pos, &["ambient", "pairs", "action"])?;
        let (ambient, bv) = match c.object(a.req(0, "ambient")?, "target|bv")? {
            Object::Target(t) => (t.ham.q_manifold(), None),
            Object::Bv(b) => (
                QManifold {
                    space: b.space.space().clone(),
                    q: b.q().map_err(alg_err(pos))?,
                },
                Some((**b).clone()),
            ),
            _ => unreachable!(),
        };
        let pairs = pair_list(c, a.req(1, "pairs")?)?;
        let refs: Vec<(&str, i32, &str)> = pairs.iter().map(|(x, d, y)| (x.as_str(), *d, y.as_str())).collect();
        let joint = PreObservable::joint_space(&ambient.space, &refs).map_err(alg_err(pos))?;
        let s = c.poly_in(a.req(2, "action")?, &joint)?;
        PreObservable::new(ambient, bv, &refs, &s).map_err(alg_err(pos))
    }

    fn lattice_loop(&self, c: &Ctx, f: &str, args: &[Arg], pos: Pos) -> Result<LoopData, ModelError> {
        match f {
            "edges" => {
                let a = Args::new(f, args, pos, &["samples"])?;
                let e = a.req(0, "samples")?;
                let Expr::List(rows) = &e.node else {
                    return Err(type_err(e.pos, "`samples` is a list of edges"));
                };
                let samples = rows
                    .iter()
                    .map(|r| Ok(c.num_list(r)?.iter().map(Gq::to_c64).collect()))
                    .collect::<Result<Vec<_>, ModelError>>()?;
                Ok(LoopData::Algebra(LatticeLoop::new(samples).map_err(alg_err(pos))?))
            }
            "group" => {
                let a = Args::new(f, args, pos, &["elements"])?;
                let e = a.req(0, "elements")?;
                let Expr::List(ms) = &e.node else {
                    return Err(type_err(e.pos, "`elements` is a list of matrices"));
                };
                Ok(LoopData::Group(ms.iter().map(|m| qmatrix(c, m)).collect::<Result<_, _>>()?))
            }
            "file" => {
                let a = Args::new(f, args, pos, &["path"])?;
                let p = self.path(c, a.req(0, "path")?)?;
                files::read_loop_file(&p).map_err(|e| ModelError::semantic(pos, e.to_string(), "check the loop file"))
            }
            _ => Err(bad_ctor("loop", f, pos, "edges, group, file")),
        }
    }
}

/// `[[x, deg, ξ], …]` with bare names.
fn pair_list(c: &Ctx, e: &SExpr) -> Result<Vec<(String, i32, String)>, ModelError> {
    let Expr::List(items) = &e.node else {
        return Err(type_err(e.pos, "`pairs` is a list of `[x, degree, ξ]`"));
    };
    items
        .iter()
        .map(|it| match &it.node {
            Expr::List(t) if t.len() == 3 => match (&t[0].node, &t[2].node) {
                (Expr::Ident(x), Expr::Ident(y)) => Ok((x.clone(), c.int(&t[1])? as i32, y.clone())),
                _ => Err(ModelError::semantic(it.pos, "pair members must be names", "write `[x, 0, ξ]`")),
            },
            _ => Err(ModelError::semantic(it.pos, "each pair is `[x, degree, ξ]`", "write `[x, 0, ξ]`")),
        })
        .collect()
}

/// `[[out, [ins…], coeff], …]` or `lie_entries(g)` (all orderings of the bracket).
fn tensor_entries(c: &Ctx, e: Option<&SExpr>, dim: usize) -> Result<Vec<TensorEntry>, ModelError> {
    let Some(e) = e else { return Ok(Vec::new()) };
    if let Some(("lie_entries", args)) = call_of(e) {
        let a = Args::new("lie_entries", args, e.pos, &["g"])?;
        let g = c.algebra(a.req(0, "g")?)?;
        let mut out = Vec::new();
        for x in 0..g.dim() {
            for y in 0..g.dim() {
                for z in 0..g.dim() {
                    if !g.f(x, y, z).is_zero() {
                        out.push(TensorEntry {
                            out: x,
                            ins: vec![y, z],
                            coeff: g.f(x, y, z).clone(),
                        });
                    }
                }
            }
        }
        return Ok(out);
    }
    let Expr::List(items) = &e.node else {
        return Err(type_err(e.pos, "entries are `[[out, [ins], coeff], ...]`"));
    };
    items
        .iter()
        .map(|it| match &it.node {
            Expr::List(t) if t.len() == 3 => {
                let ins = c.int_list(&t[1])?.into_iter().map(|v| v as usize).collect::<Vec<_>>();
                if ins.iter().any(|&v| v >= dim) {
                    return Err(ModelError::semantic(t[1].pos, "input index out of range", "indices are 0-based"));
                }
                Ok(TensorEntry {
                    out: idx(c, &t[0], dim, "output")?,
                    ins,
                    coeff: c.num(&t[2])?,
                })
            }
            _ => Err(ModelError::semantic(
                it.pos,
                "entry must be `[out, [ins], coeff]`",
                "write e.g. `[2, [0, 1], 1]`",
            )),
        })
        .collect()
}

/// `[[out, [psi…], x, coeff], …]` or `rep_entries(r)`.
fn module_entries(c: &Ctx, e: Option<&SExpr>) -> Result<Vec<ModuleEntry>, ModelError> {
    let Some(e) = e else { return Ok(Vec::new()) };
    if let Some(("rep_entries", args)) = call_of(e) {
        let a = Args::new("rep_entries", args, e.pos, &["r"])?;
        let r = c.rep(a.req(0, "r")?)?;
        let mut out = Vec::new();
        for g in 0..r.len() {
            for i in 0..r.dim() {
                for j in 0..r.dim() {
                    let v = r.matrix(g).get(i, j);
                    if !v.is_zero() {
                        out.push(ModuleEntry {
                            out: i,
                            psi: vec![g],
                            x: j,
                            coeff: v.clone(),
                        });
                    }
                }
            }
        }
        return Ok(out);
    }
    let Expr::List(items) = &e.node else {
        return Err(type_err(e.pos, "entries are `[[out, [psi], x, coeff], ...]`"));
    };
    items
        .iter()
        .map(|it| match &it.node {
            Expr::List(t) if t.len() == 4 => Ok(ModuleEntry {
                out: c.int(&t[0])? as usize,
                psi: c.int_list(&t[1])?.into_iter().map(|v| v as usize).collect(),
                x: c.int(&t[2])? as usize,
                coeff: c.num(&t[3])?,
            }),
            _ => Err(ModelError::semantic(
                it.pos,
                "entry must be `[out, [psi], x, coeff]`",
                "write e.g. `[0, [1], 2, 1]`",
            )),
        })
        .collect()
}
