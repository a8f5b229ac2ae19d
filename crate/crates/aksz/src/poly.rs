//! Graded coordinates and Koszul-signed polynomials.
//!
//! Every coordinate `x` of a [`GradedSpace`] comes with a differential `δx`.
//! Variables are ordered by declaration: all coordinates first, then their
//! differentials in the same order. Commutation signs use the total degree
//! `internal + form` (see `docs/CONVENTIONS.md`).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::AlgebraError;
use crate::scalar::{Gq, QMatrix, Scalar, ScalarMatrix};

/// Index of a variable in a [`GradedSpace`].
pub type VarId = u32;

/// Prefix used to render differentials.
pub const DIFF_PREFIX: &str = "δ";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coordinate {
    pub name: String,
    pub degree: i32,
}

/// A graded variable as seen from the outside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVariable {
    pub name: String,
    pub internal_degree: i32,
    pub form_degree: i32,
    /// Parent coordinate index for a differential.
    pub parent: Option<usize>,
}

impl GradedVariable {
    pub fn parity(&self) -> bool {
        (self.internal_degree + self.form_degree).rem_euclid(2) == 1
    }
}

/// Finite-dimensional graded vector space with auto-generated differentials.
#[derive(Clone, Debug)]
pub struct GradedSpace {
    coords: Vec<Coordinate>,
    index: BTreeMap<String, usize>,
}

pub type Space = Arc<GradedSpace>;

impl PartialEq for GradedSpace {
    fn eq(&self, o: &Self) -> bool {
        self.coords == o.coords
    }
}

impl Eq for GradedSpace {}

impl GradedSpace {
    pub fn new<S: Into<String>>(coords: impl IntoIterator<Item = (S, i32)>) -> Result<Space, AlgebraError> {
        let mut out = GradedSpace {
            coords: Vec::new(),
            index: BTreeMap::new(),
        };
        for (name, degree) in coords {
            out.push(name.into(), degree)?;
        }
        Ok(Arc::new(out))
    }

    pub fn empty() -> Space {
        Arc::new(GradedSpace {
            coords: Vec::new(),
            index: BTreeMap::new(),
        })
    }

    fn push(&mut self, name: String, degree: i32) -> Result<(), AlgebraError> {
        if name.is_empty() || name.starts_with(DIFF_PREFIX) || name == "i" {
            return Err(AlgebraError::Invalid(format!("invalid coordinate name `{name}`")));
        }
        if self.index.contains_key(&name) {
            return Err(AlgebraError::DuplicateCoordinate(name));
        }
        self.index.insert(name.clone(), self.coords.len());
        self.coords.push(Coordinate { name, degree });
        Ok(())
    }

    /// New space with the coordinates of `self` followed by `more`.
    pub fn extend<S: Into<String>>(&self, more: impl IntoIterator<Item = (S, i32)>) -> Result<Space, AlgebraError> {
        let mut out = GradedSpace {
            coords: Vec::new(),
            index: BTreeMap::new(),
        };
        for c in &self.coords {
            out.push(c.name.clone(), c.degree)?;
        }
        for (name, degree) in more {
            out.push(name.into(), degree)?;
        }
        Ok(Arc::new(out))
    }

    /// Number of coordinates.
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn num_vars(&self) -> usize {
        2 * self.coords.len()
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn coord_degree(&self, a: usize) -> i32 {
        self.coords[a].degree
    }

    /// Variable id for a coordinate name or `δ`-prefixed differential name.
    pub fn var_id(&self, name: &str) -> Option<VarId> {
        if let Some(rest) = name.strip_prefix(DIFF_PREFIX) {
            self.coord_index(rest).map(|a| self.differential(a))
        } else {
            self.coord_index(name).map(|a| a as VarId)
        }
    }

    pub fn differential(&self, coord: usize) -> VarId {
        (self.coords.len() + coord) as VarId
    }

    pub fn is_differential(&self, v: VarId) -> bool {
        v as usize >= self.coords.len()
    }

    /// Coordinate underlying `v` (itself for a coordinate).
    pub fn base_coord(&self, v: VarId) -> usize {
        let n = self.coords.len();
        let v = v as usize;
        if v >= n {
            v - n
        } else {
            v
        }
    }

    pub fn internal(&self, v: VarId) -> i32 {
        self.coords[self.base_coord(v)].degree
    }

    pub fn form(&self, v: VarId) -> i32 {
        i32::from(self.is_differential(v))
    }

    /// Total-degree parity: true when odd.
    pub fn parity(&self, v: VarId) -> bool {
        (self.internal(v) + self.form(v)).rem_euclid(2) == 1
    }

    pub fn var_name(&self, v: VarId) -> String {
        let c = &self.coords[self.base_coord(v)].name;
        if self.is_differential(v) {
            format!("{DIFF_PREFIX}{c}")
        } else {
            c.clone()
        }
    }

    pub fn variable(&self, v: VarId) -> GradedVariable {
        GradedVariable {
            name: self.var_name(v),
            internal_degree: self.internal(v),
            form_degree: self.form(v),
            parent: self.is_differential(v).then(|| self.base_coord(v)),
        }
    }
}

/// Canonical monomial: factors sorted by variable id, odd exponents equal 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0.iter().find(|f| f.0 == v).map_or(0, |f| f.1)
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.iter().any(|f| f.0 == v)
    }

    /// `(internal, form)` bidegree.
    pub fn bidegree(&self, sp: &GradedSpace) -> (i32, i32) {
        self.0
            .iter()
            .fold((0, 0), |(i, f), &(v, e)| (i + sp.internal(v) * e as i32, f + sp.form(v) * e as i32))
    }

    pub fn parity(&self, sp: &GradedSpace) -> bool {
        self.0.iter().filter(|&&(v, e)| sp.parity(v) && e % 2 == 1).count() % 2 == 1
    }

    /// Total polynomial degree.
    pub fn size(&self) -> u32 {
        self.0.iter().map(|f| f.1).sum()
    }

    /// Product with Koszul sign; `None` when an odd variable repeats.
    pub fn mul(&self, o: &Monomial, sp: &GradedSpace) -> Option<(bool, Monomial)> {
        let mut neg = false;
        for &(b, _) in &o.0 {
            if sp.parity(b) {
                let passed = self.0.iter().filter(|&&(a, _)| a > b && sp.parity(a)).count();
                neg ^= passed % 2 == 1;
            }
        }
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            match (self.0.get(i), o.0.get(j)) {
                (Some(&(a, ea)), Some(&(b, eb))) if a == b => {
                    if sp.parity(a) {
                        return None;
                    }
                    out.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
                (Some(&(a, ea)), Some(&(b, _))) if a < b => {
                    out.push((a, ea));
                    i += 1;
                }
                (Some(_), Some(&(b, eb))) => {
                    out.push((b, eb));
                    j += 1;
                }
                (Some(&f), None) => {
                    out.push(f);
                    i += 1;
                }
                (None, Some(&f)) => {
                    out.push(f);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Some((neg, Monomial(out)))
    }

    /// Left derivative: `(negated, multiplicity, remaining monomial)`.
    pub fn left_derivative(&self, v: VarId, sp: &GradedSpace) -> Option<(bool, u32, Monomial)> {
        let pos = self.0.iter().position(|f| f.0 == v)?;
        let e = self.0[pos].1;
        let mut rest = self.0.clone();
        if e == 1 {
            rest.remove(pos);
        } else {
            rest[pos].1 -= 1;
        }
        let neg = if sp.parity(v) {
            self.0[..pos].iter().filter(|&&(a, ea)| sp.parity(a) && ea % 2 == 1).count() % 2 == 1
        } else {
            false
        };
        Some((neg, e, Monomial(rest)))
    }

    pub fn render(&self, sp: &GradedSpace) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|&(v, e)| if e == 1 { sp.var_name(v) } else { format!("{}^{}", sp.var_name(v), e) })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Coefficient ring for polynomials; coefficients commute with graded variables.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn is_zero(&self) -> bool;
    fn try_add(&self, o: &Self) -> Result<Self, AlgebraError>;
    fn try_mul(&self, o: &Self) -> Result<Self, AlgebraError>;
    fn scale(&self, s: &Gq) -> Self;
    fn neg(&self) -> Self {
        self.scale(&Gq::int(-1))
    }
    fn render(&self) -> String;
    /// True when `render` can be used as a product factor without parentheses.
    fn atomic(&self) -> bool;
    fn to_scalar(&self) -> Scalar;
}

impl Coeff for Gq {
    fn is_zero(&self) -> bool {
        Gq::is_zero(self)
    }
    fn try_add(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self + o)
    }
    fn try_mul(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self * o)
    }
    fn scale(&self, s: &Gq) -> Self {
        self * s
    }
    fn render(&self) -> String {
        Gq::render(self)
    }
    fn atomic(&self) -> bool {
        self.is_atomic()
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Exact(self.clone())
    }
}

impl Coeff for QMatrix {
    fn is_zero(&self) -> bool {
        QMatrix::is_zero(self)
    }
    fn try_add(&self, o: &Self) -> Result<Self, AlgebraError> {
        QMatrix::try_add(self, o)
    }
    fn try_mul(&self, o: &Self) -> Result<Self, AlgebraError> {
        QMatrix::try_mul(self, o)
    }
    fn scale(&self, s: &Gq) -> Self {
        QMatrix::scale(self, s)
    }
    fn render(&self) -> String {
        QMatrix::render(self)
    }
    fn atomic(&self) -> bool {
        true
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Matrix(ScalarMatrix::from(self))
    }
}

/// Bidegree report of [`Poly::grade_of`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Grade {
    Zero,
    Homogeneous {
        internal: i32,
        form: i32,
    },
    /// Per-term `(monomial, internal, form)` breakdown.
    Mixed(Vec<(String, i32, i32)>),
}

impl Grade {
    pub fn internal(&self) -> Option<i32> {
        match self {
            Grade::Homogeneous { internal, .. } => Some(*internal),
            _ => None,
        }
    }
}

/// Polynomial in graded variables with coefficients in `C`.
#[derive(Clone, Debug)]
pub struct Poly<C: Coeff> {
    space: Space,
    terms: BTreeMap<Monomial, C>,
}

/// Polynomial with exact Gaussian-rational coefficients.
pub type GradedPolynomial = Poly<Gq>;
/// Polynomial with square-matrix coefficients.
pub type MatrixPolynomial = Poly<QMatrix>;

impl<C: Coeff> PartialEq for Poly<C> {
    fn eq(&self, o: &Self) -> bool {
        (Arc::ptr_eq(&self.space, &o.space) || self.space == o.space) && self.terms == o.terms
    }
}

fn same_space(a: &Space, b: &Space) -> Result<(), AlgebraError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(AlgebraError::SpaceMismatch)
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero(space: &Space) -> Self {
        Poly {
            space: space.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(space: &Space, c: C) -> Self {
        Self::term(space, c, Monomial::one())
    }

    pub fn term(space: &Space, c: C, m: Monomial) -> Self {
        let mut p = Self::zero(space);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Normal form of a raw term list; factors may appear in any order.
    pub fn canonicalize(space: &Space, raw: impl IntoIterator<Item = (C, Vec<(VarId, u32)>)>) -> Result<Self, AlgebraError> {
        let mut p = Self::zero(space);
        for (c, factors) in raw {
            let mut fs: Vec<(VarId, u32)> = factors.into_iter().filter(|f| f.1 > 0).collect();
            if fs.iter().any(|f| f.0 as usize >= space.num_vars()) {
                return Err(AlgebraError::UnknownVariable(format!("#{}", fs[0].0)));
            }
            let mut neg = false;
            for i in 1..fs.len() {
                let mut j = i;
                while j > 0 && fs[j - 1].0 > fs[j].0 {
                    let (a, ea) = fs[j - 1];
                    let (b, eb) = fs[j];
                    if space.parity(a) && space.parity(b) && ea % 2 == 1 && eb % 2 == 1 {
                        neg = !neg;
                    }
                    fs.swap(j - 1, j);
                    j -= 1;
                }
            }
            let mut merged: Vec<(VarId, u32)> = Vec::with_capacity(fs.len());
            for (v, e) in fs {
                match merged.last_mut() {
                    Some(last) if last.0 == v => last.1 += e,
                    _ => merged.push((v, e)),
                }
            }
            if merged.iter().any(|&(v, e)| space.parity(v) && e >= 2) {
                continue;
            }
            let c = if neg { c.neg() } else { c };
            p.add_term(Monomial(merged), c)?;
        }
        Ok(p)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) -> Result<(), AlgebraError> {
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                let s = e.try_add(&c)?;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *e = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, AlgebraError> {
        same_space(&self.space, &o.space)?;
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c.clone())?;
        }
        Ok(p)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.try_add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, s: &Gq) -> Self {
        if s.is_zero() {
            return Self::zero(&self.space);
        }
        self.map_coeffs(|c| c.scale(s))
    }

    fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        Poly {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), f(c))).filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Canonical product.
    pub fn try_mul(&self, o: &Self) -> Result<Self, AlgebraError> {
        same_space(&self.space, &o.space)?;
        let mut p = Self::zero(&self.space);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                if let Some((neg, m)) = ma.mul(mb, &self.space) {
                    let c = ca.try_mul(cb)?;
                    p.add_term(m, if neg { c.neg() } else { c })?;
                }
            }
        }
        Ok(p)
    }

    /// Graded left derivative with respect to `v`.
    pub fn left_derivative(&self, v: VarId) -> Self {
        let mut p = Self::zero(&self.space);
        for (m, c) in &self.terms {
            if let Some((neg, e, rest)) = m.left_derivative(v, &self.space) {
                let mut k = c.scale(&Gq::int(e as i64));
                if neg {
                    k = k.neg();
                }
                p.add_term(rest, k).expect("same coefficient kind");
            }
        }
        p
    }

    pub fn grade_of(&self) -> Grade {
        let degs: Vec<(String, i32, i32)> = self
            .terms
            .keys()
            .map(|m| {
                let (i, f) = m.bidegree(&self.space);
                (m.render(&self.space), i, f)
            })
            .collect();
        match degs.first() {
            None => Grade::Zero,
            Some(&(_, i, f)) if degs.iter().all(|d| d.1 == i && d.2 == f) => Grade::Homogeneous { internal: i, form: f },
            _ => Grade::Mixed(degs),
        }
    }

    /// Split into even and odd total-parity parts.
    pub fn parity_split(&self) -> (Self, Self) {
        let mut even = Self::zero(&self.space);
        let mut odd = Self::zero(&self.space);
        for (m, c) in &self.terms {
            let dst = if m.parity(&self.space) { &mut odd } else { &mut even };
            dst.terms.insert(m.clone(), c.clone());
        }
        (even, odd)
    }

    /// Part of internal degree `d`.
    pub fn internal_part(&self, d: i32) -> Self {
        self.filter(|m| m.bidegree(&self.space).0 == d)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Poly {
            space: self.space.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Sets the listed variables to zero.
    pub fn set_zero(&self, vars: &[VarId]) -> Self {
        self.filter(|m| !vars.iter().any(|&v| m.contains(v)))
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.terms.keys().any(|m| m.contains(v))
    }

    pub fn variables(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self.terms.keys().flat_map(|m| m.0.iter().map(|f| f.0)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Re-expresses the polynomial over `target`, matching variables by name.
    pub fn embed(&self, target: &Space) -> Result<Self, AlgebraError> {
        if Arc::ptr_eq(&self.space, target) {
            return Ok(self.clone());
        }
        let mut map = BTreeMap::new();
        for v in self.variables() {
            let name = self.space.var_name(v);
            let w = target.var_id(&name).ok_or_else(|| AlgebraError::UnknownVariable(name.clone()))?;
            if target.internal(w) != self.space.internal(v) {
                return Err(AlgebraError::Invalid(format!("degree of `{name}` differs between spaces")));
            }
            map.insert(v, w);
        }
        let raw: Vec<(C, Vec<(VarId, u32)>)> = self
            .terms
            .iter()
            .map(|(m, c)| (c.clone(), m.0.iter().map(|&(v, e)| (map[&v], e)).collect()))
            .collect();
        Self::canonicalize(target, raw)
    }

    /// Numeric evaluation; all variables must be even coordinates with values.
    pub fn eval_numeric(&self, assignment: &BTreeMap<String, Complex64>) -> Result<Scalar, AlgebraError> {
        let mut acc: Option<Scalar> = None;
        for (m, c) in &self.terms {
            let mut val = Complex64::new(1.0, 0.0);
            for &(v, e) in &m.0 {
                let name = self.space.var_name(v);
                if self.space.is_differential(v) {
                    return Err(AlgebraError::Differential(name));
                }
                if self.space.parity(v) {
                    return Err(AlgebraError::OddVariable(name));
                }
                let x = assignment.get(&name).ok_or(AlgebraError::Unassigned(name))?;
                val *= x.powu(e);
            }
            let t = c.to_scalar().try_mul(&Scalar::Float(val))?;
            acc = Some(match acc {
                None => t,
                Some(a) => a.try_add(&t)?,
            });
        }
        Ok(acc.unwrap_or(Scalar::Float(Complex64::new(0.0, 0.0))))
    }

    /// Canonical rendering with deterministic term order.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let t = render_term(c, m, &self.space);
            if k == 0 {
                out.push_str(&t);
            } else if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&t);
            }
        }
        out
    }
}

fn render_term<C: Coeff>(c: &C, m: &Monomial, sp: &GradedSpace) -> String {
    let cs = c.render();
    if m.is_one() {
        return cs;
    }
    let ms = m.render(sp);
    match cs.as_str() {
        "1" => ms,
        "-1" => format!("-{ms}"),
        _ if c.atomic() => format!("{cs}*{ms}"),
        _ => format!("({cs})*{ms}"),
    }
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Poly<Gq> {
    pub fn var(space: &Space, v: VarId) -> Self {
        Self::term(space, Gq::one(), Monomial::var(v))
    }

    /// Variable by name (coordinate or `δ`-differential).
    pub fn named(space: &Space, name: &str) -> Result<Self, AlgebraError> {
        let v = space.var_id(name).ok_or_else(|| AlgebraError::UnknownVariable(name.into()))?;
        Ok(Self::var(space, v))
    }

    pub fn int(space: &Space, n: i64) -> Self {
        Self::constant(space, Gq::int(n))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::int(&self.space, 1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Constant term.
    pub fn constant_term(&self) -> Gq {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Gq::zero)
    }

    /// Scalar polynomial times a polynomial with any coefficients.
    pub fn times<C: Coeff>(&self, q: &Poly<C>) -> Result<Poly<C>, AlgebraError> {
        same_space(&self.space, &q.space)?;
        let mut p = Poly::zero(&self.space);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &q.terms {
                if let Some((neg, m)) = ma.mul(mb, &self.space) {
                    let c = cb.scale(ca);
                    p.add_term(m, if neg { c.neg() } else { c })?;
                }
            }
        }
        Ok(p)
    }

    /// Scalar polynomial with each coefficient multiplied by the matrix `m`.
    pub fn with_matrix(&self, m: &QMatrix) -> MatrixPolynomial {
        let mut p = Poly::zero(&self.space);
        for (mono, c) in &self.terms {
            p.add_term(mono.clone(), m.scale(c)).expect("same dimension");
        }
        p
    }
}

impl Poly<QMatrix> {
    /// Entry `(r, c)` of every coefficient, as a scalar polynomial.
    pub fn entry(&self, r: usize, c: usize) -> GradedPolynomial {
        let mut p = Poly::zero(&self.space);
        for (m, k) in &self.terms {
            p.add_term(m.clone(), k.get(r, c).clone()).expect("scalar");
        }
        p
    }
}

macro_rules! gq_poly_ops {
    ($tr:ident, $f:ident, $imp:ident) => {
        impl<'a> std::ops::$tr<&'a Poly<Gq>> for &'a Poly<Gq> {
            type Output = Poly<Gq>;
            fn $f(self, o: &Poly<Gq>) -> Poly<Gq> {
                self.$imp(o).expect("polynomials over the same space")
            }
        }
        impl std::ops::$tr for Poly<Gq> {
            type Output = Poly<Gq>;
            fn $f(self, o: Poly<Gq>) -> Poly<Gq> {
                (&self).$imp(&o).expect("polynomials over the same space")
            }
        }
    };
}

gq_poly_ops!(Add, add, try_add);
gq_poly_ops!(Sub, sub, try_sub);
gq_poly_ops!(Mul, mul, try_mul);

impl std::ops::Neg for Poly<Gq> {
    type Output = Poly<Gq>;
    fn neg(self) -> Poly<Gq> {
        Poly::neg(&self)
    }
}

impl std::ops::Neg for &Poly<Gq> {
    type Output = Poly<Gq>;
    fn neg(self) -> Poly<Gq> {
        Poly::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp() -> Space {
        GradedSpace::new([("x", 0), ("ξ", 1), ("η", 1)]).unwrap()
    }

    fn v(s: &Space, n: &str) -> GradedPolynomial {
        Poly::named(s, n).unwrap()
    }

    #[test]
    fn odd_variables_anticommute() {
        let s = sp();
        let (xi, eta) = (v(&s, "ξ"), v(&s, "η"));
        assert_eq!(&xi * &eta, -(&eta * &xi));
        assert!((&xi * &xi).is_zero());
    }

    #[test]
    fn cross_terms_cancel() {
        let s = sp();
        let x = v(&s, "x");
        let xe = &v(&s, "ξ") * &v(&s, "η");
        let p = &(&x + &xe) * &(&x - &xe);
        assert_eq!(p, x.pow(2));
    }

    #[test]
    fn derivative_examples() {
        let s = sp();
        let xe = &v(&s, "ξ") * &v(&s, "η");
        let xi_id = s.var_id("ξ").unwrap();
        let eta_id = s.var_id("η").unwrap();
        assert_eq!(xe.left_derivative(xi_id), v(&s, "η"));
        assert_eq!(xe.left_derivative(eta_id), -v(&s, "ξ"));
        let x3 = v(&s, "x").pow(3);
        assert_eq!(x3.left_derivative(0), v(&s, "x").pow(2).scale(&Gq::int(3)));
        assert!(Poly::int(&s, 5).left_derivative(0).is_zero());
    }

    #[test]
    fn canonicalize_examples() {
        let s = sp();
        let (x, xi, eta) = (0, 1, 2);
        let p = Poly::canonicalize(&s, [(Gq::one(), vec![(eta, 1), (xi, 1)])]).unwrap();
        assert_eq!(p, -(&v(&s, "ξ") * &v(&s, "η")));
        let q = Poly::canonicalize(&s, [(Gq::one(), vec![(x, 1), (xi, 1), (x, 1)])]).unwrap();
        assert_eq!(q, &v(&s, "x").pow(2) * &v(&s, "ξ"));
        let z = Poly::canonicalize(&s, [(Gq::one(), vec![(x, 2)]), (Gq::int(-1), vec![(x, 2)])]).unwrap();
        assert!(z.is_zero());
        let sq = Poly::canonicalize(&s, [(Gq::one(), vec![(xi, 2)])]).unwrap();
        assert!(sq.is_zero());
    }

    #[test]
    fn grade_examples() {
        let s = GradedSpace::new([("x", 2), ("y", 0), ("ξ", 1)]).unwrap();
        assert_eq!(v(&s, "δx").grade_of(), Grade::Homogeneous { internal: 2, form: 1 });
        assert!(matches!((v(&s, "y") + v(&s, "ξ")).grade_of(), Grade::Mixed(_)));
        assert_eq!(Poly::<Gq>::zero(&s).grade_of(), Grade::Zero);
    }

    #[test]
    fn eval_examples() {
        let s = GradedSpace::new([("x", 0), ("c", 0), ("a", 0), ("ξ", 1)]).unwrap();
        let mut asg = BTreeMap::new();
        asg.insert("x".to_string(), Complex64::new(2.0, 0.0));
        assert_eq!(v(&s, "x").pow(2).eval_numeric(&asg).unwrap().to_c64(), Some(Complex64::new(4.0, 0.0)));
        asg.insert("c".into(), Complex64::new(3.0, 0.0));
        asg.insert("a".into(), Complex64::new(0.5, 0.0));
        let ca = &v(&s, "c") * &v(&s, "a");
        assert_eq!(ca.eval_numeric(&asg).unwrap().to_c64(), Some(Complex64::new(1.5, 0.0)));
        assert!(matches!(v(&s, "ξ").eval_numeric(&asg), Err(AlgebraError::OddVariable(_))));
        let empty = BTreeMap::new();
        assert!(matches!(v(&s, "x").eval_numeric(&empty), Err(AlgebraError::Unassigned(_))));
    }

    #[test]
    fn trace_of_matrix_polynomial_value() {
        let s = GradedSpace::new([("b", 0)]).unwrap();
        let m = QMatrix::from_ints(&[&[1, 0], &[0, 2]]);
        let p = Poly::int(&s, 1).with_matrix(&m);
        let val = p.eval_numeric(&BTreeMap::new()).unwrap();
        assert_eq!(val.trace().to_c64(), Some(Complex64::new(3.0, 0.0)));
    }

    #[test]
    fn rendering_is_signed_and_ordered() {
        let s = sp();
        let p = &v(&s, "x").scale(&Gq::ratio(1, 2)) - &(&v(&s, "ξ") * &v(&s, "η"));
        assert_eq!(p.render(), "1/2*x - ξ*η");
        assert_eq!(Poly::<Gq>::zero(&s).render(), "0");
    }
}
