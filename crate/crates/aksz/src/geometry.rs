//! Vector fields, Cartan calculus, constant symplectic forms and brackets.

use std::sync::Arc;

use crate::error::AlgebraError;
use crate::linalg;
use crate::poly::{Coeff, Grade, GradedPolynomial, GradedSpace, Monomial, Poly, Space, VarId};
use crate::scalar::Gq;

/// Differential forms are polynomials that may contain differentials.
pub type DiffForm = GradedPolynomial;

fn odd(k: i32) -> bool {
    k.rem_euclid(2) == 1
}

/// Graded derivation `Σ X^a ∂/∂x^a` of a fixed internal degree.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    space: Space,
    components: Vec<GradedPolynomial>,
    degree: i32,
}

impl VectorField {
    /// Checks that each component is a function of degree `|x^a| + degree`.
    pub fn new(space: &Space, components: Vec<GradedPolynomial>, degree: i32) -> Result<Self, AlgebraError> {
        if components.len() != space.n() {
            return Err(AlgebraError::Invalid(format!(
                "vector field needs {} components, got {}",
                space.n(),
                components.len()
            )));
        }
        for (a, c) in components.iter().enumerate() {
            let expected = space.coord_degree(a) + degree;
            match c.grade_of() {
                Grade::Zero => {}
                Grade::Homogeneous { internal, form: 0 } if internal == expected => {}
                g => {
                    return Err(AlgebraError::FieldDegree {
                        coord: space.coords()[a].name.clone(),
                        found: format!("{g:?}"),
                        expected,
                    })
                }
            }
        }
        let components = components.into_iter().map(|c| c.embed(space)).collect::<Result<_, _>>()?;
        Ok(VectorField {
            space: space.clone(),
            components,
            degree,
        })
    }

    pub fn zero(space: &Space, degree: i32) -> Self {
        VectorField {
            space: space.clone(),
            components: vec![Poly::zero(space); space.n()],
            degree,
        }
    }

    /// Field with the listed `(coordinate, component)` pairs, others zero.
    pub fn from_pairs(space: &Space, pairs: Vec<(usize, GradedPolynomial)>, degree: i32) -> Result<Self, AlgebraError> {
        let mut comps = vec![Poly::zero(space); space.n()];
        for (a, c) in pairs {
            comps[a] = &comps[a] + &c;
        }
        Self::new(space, comps, degree)
    }

    /// Coordinate vector field `∂/∂x^a`.
    pub fn coordinate(space: &Space, a: usize) -> Self {
        let mut comps = vec![Poly::zero(space); space.n()];
        comps[a] = Poly::int(space, 1);
        VectorField {
            space: space.clone(),
            components: comps,
            degree: -space.coord_degree(a),
        }
    }

    /// Euler field `Σ |x^a| x^a ∂/∂x^a`.
    pub fn euler(space: &Space) -> Self {
        let comps = (0..space.n())
            .map(|a| Poly::var(space, a as VarId).scale(&Gq::int(space.coord_degree(a) as i64)))
            .collect();
        VectorField {
            space: space.clone(),
            components: comps,
            degree: 0,
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn components(&self) -> &[GradedPolynomial] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &GradedPolynomial {
        &self.components[a]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    fn compatible_degree(&self, o: &VectorField) -> Result<i32, AlgebraError> {
        if self.degree == o.degree || o.is_zero() {
            Ok(self.degree)
        } else if self.is_zero() {
            Ok(o.degree)
        } else {
            Err(AlgebraError::Invalid(format!("vector field degrees {} and {} differ", self.degree, o.degree)))
        }
    }

    pub fn try_add(&self, o: &VectorField) -> Result<VectorField, AlgebraError> {
        let degree = self.compatible_degree(o)?;
        let components = self.components.iter().zip(&o.components).map(|(a, b)| a.try_add(b)).collect::<Result<_, _>>()?;
        Ok(VectorField {
            space: self.space.clone(),
            components,
            degree,
        })
    }

    pub fn try_sub(&self, o: &VectorField) -> Result<VectorField, AlgebraError> {
        self.try_add(&o.scale(&Gq::int(-1)))
    }

    pub fn scale(&self, s: &Gq) -> VectorField {
        VectorField {
            space: self.space.clone(),
            components: self.components.iter().map(|c| c.scale(s)).collect(),
            degree: self.degree,
        }
    }

    /// `X(f) = Σ X^a ∂f/∂x^a` with left derivatives.
    pub fn apply<C: Coeff>(&self, f: &Poly<C>) -> Result<Poly<C>, AlgebraError> {
        let mut out = Poly::zero(f.space());
        for (a, xa) in self.components.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            let d = f.left_derivative(a as VarId);
            if !d.is_zero() {
                out = out.try_add(&xa.times(&d)?)?;
            }
        }
        Ok(out)
    }

    /// Re-expresses the field over a larger space (extra components zero).
    pub fn embed(&self, target: &Space) -> Result<VectorField, AlgebraError> {
        let mut comps = vec![Poly::zero(target); target.n()];
        for (a, c) in self.components.iter().enumerate() {
            let name = &self.space.coords()[a].name;
            let b = target.coord_index(name).ok_or_else(|| AlgebraError::UnknownVariable(name.clone()))?;
            comps[b] = c.embed(target)?;
        }
        Ok(VectorField {
            space: target.clone(),
            components: comps,
            degree: self.degree,
        })
    }

    /// Polyvector encoding `Σ X^i p_i` on a shifted cotangent space.
    pub fn to_polyvector(&self, cot: &ShiftedCotangent) -> Result<GradedPolynomial, AlgebraError> {
        let mut out = Poly::zero(cot.space());
        for (a, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = &self.space.coords()[a].name;
            let k = cot
                .base_names()
                .iter()
                .position(|b| b == name)
                .ok_or_else(|| AlgebraError::UnknownVariable(name.clone()))?;
            out = &out + &(&c.embed(cot.space())? * &Poly::var(cot.space(), cot.fiber[k] as VarId));
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| format!("{}: {}", self.space.coords()[a].name, c.render()))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("; ")
        }
    }
}

/// `X(f)`.
pub fn vf_apply<C: Coeff>(x: &VectorField, f: &Poly<C>) -> Result<Poly<C>, AlgebraError> {
    x.apply(f)
}

/// Graded commutator `[X,Y] = XY − (−1)^{|X||Y|} YX`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, AlgebraError> {
    let sign = Gq::sign(odd(x.degree) && odd(y.degree));
    let mut comps = Vec::with_capacity(x.space.n());
    for a in 0..x.space.n() {
        let xy = x.apply(&y.components[a])?;
        let yx = y.apply(&x.components[a])?;
        comps.push(xy.try_sub(&yx.scale(&sign))?);
    }
    Ok(VectorField {
        space: x.space.clone(),
        components: comps,
        degree: x.degree + y.degree,
    })
}

/// De Rham differential: odd derivation with `x ↦ δx`, `δx ↦ 0`.
pub fn de_rham<C: Coeff>(f: &Poly<C>) -> Poly<C> {
    let sp = f.space().clone();
    let mut out = Poly::zero(&sp);
    for a in 0..sp.n() {
        let d = f.left_derivative(a as VarId);
        if !d.is_zero() {
            let dx = Poly::var(&sp, sp.differential(a));
            out = out.try_add(&dx.times(&d).expect("same space")).expect("same coefficient kind");
        }
    }
    out
}

/// Contraction `ι_X`: derivation with `ι_X(δx^a) = X^a`, `ι_X(x^a) = 0`.
pub fn contraction<C: Coeff>(x: &VectorField, phi: &Poly<C>) -> Result<Poly<C>, AlgebraError> {
    let sp = phi.space();
    let mut out = Poly::zero(sp);
    for (a, xa) in x.components.iter().enumerate() {
        if xa.is_zero() {
            continue;
        }
        let d = phi.left_derivative(sp.differential(a));
        if !d.is_zero() {
            out = out.try_add(&xa.times(&d)?)?;
        }
    }
    Ok(out)
}

/// Lie derivative by Cartan's formula `L_X = [ι_X, δ] = ι_X δ + (−1)^{|X|} δ ι_X`.
pub fn lie_derivative(x: &VectorField, phi: &DiffForm) -> Result<DiffForm, AlgebraError> {
    let a = contraction(x, &de_rham(phi))?;
    let b = de_rham(&contraction(x, phi)?);
    a.try_add(&b.scale(&Gq::sign(odd(x.degree))))
}

/// Constant symplectic form `ω = ½ ω_ab δx^a δx^b` on a subset of coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantSymplectic {
    space: Space,
    idx: Vec<usize>,
    w: Vec<Vec<Gq>>,
    inv: Vec<Vec<Gq>>,
    degree: i32,
}

impl ConstantSymplectic {
    /// From the matrix `ω_ab` over the coordinates `idx` (in that order).
    pub fn from_matrix(space: &Space, idx: Vec<usize>, w: Vec<Vec<Gq>>, degree: i32) -> Result<Self, AlgebraError> {
        let k = idx.len();
        if w.len() != k || w.iter().any(|r| r.len() != k) {
            return Err(AlgebraError::Invalid("symplectic matrix size does not match coordinates".into()));
        }
        let name = |r: usize| space.coords()[idx[r]].name.clone();
        for r in 0..k {
            for c in 0..k {
                let (dr, dc) = (space.coord_degree(idx[r]), space.coord_degree(idx[c]));
                if !w[r][c].is_zero() && dr + dc != degree {
                    return Err(AlgebraError::FormDegree(name(r), name(c), degree));
                }
                let s = Gq::sign(odd(dr + 1) && odd(dc + 1));
                if w[r][c] != &s * &w[c][r] {
                    return Err(AlgebraError::FormSymmetry(name(r), name(c)));
                }
            }
        }
        let inv = if k == 0 {
            Vec::new()
        } else {
            linalg::inverse(&w).ok_or(AlgebraError::DegenerateForm)?
        };
        Ok(ConstantSymplectic {
            space: space.clone(),
            idx,
            w,
            inv,
            degree,
        })
    }

    /// Reads `ω_ab = ∂_{δx^b} ∂_{δx^a} ω` from a constant 2-form.
    pub fn from_form(form: &DiffForm, degree: i32) -> Result<Self, AlgebraError> {
        let sp = form.space().clone();
        for (m, _) in form.terms() {
            if m.bidegree(&sp).1 != 2 || m.0.iter().any(|&(v, _)| !sp.is_differential(v)) {
                return Err(AlgebraError::NonConstantForm(m.render(&sp)));
            }
        }
        let mut idx: Vec<usize> = form.variables().into_iter().map(|v| sp.base_coord(v)).collect();
        idx.sort_unstable();
        idx.dedup();
        let w: Vec<Vec<Gq>> = idx
            .iter()
            .map(|&a| {
                let da = form.left_derivative(sp.differential(a));
                idx.iter().map(|&b| da.left_derivative(sp.differential(b)).constant_term()).collect()
            })
            .collect();
        let out = Self::from_matrix(&sp, idx, w, degree)?;
        if &out.to_form() != form {
            return Err(AlgebraError::NonConstantForm(form.render()));
        }
        Ok(out)
    }

    /// The empty form on a space (fiber = point).
    pub fn empty(space: &Space, degree: i32) -> Self {
        ConstantSymplectic {
            space: space.clone(),
            idx: Vec::new(),
            w: Vec::new(),
            inv: Vec::new(),
            degree,
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn coordinates(&self) -> &[usize] {
        &self.idx
    }

    pub fn matrix(&self) -> &[Vec<Gq>] {
        &self.w
    }

    /// `½ Σ ω_ab δx^a δx^b`.
    pub fn to_form(&self) -> DiffForm {
        let sp = &self.space;
        let half = Gq::ratio(1, 2);
        let mut raw = Vec::new();
        for (r, &a) in self.idx.iter().enumerate() {
            for (c, &b) in self.idx.iter().enumerate() {
                if !self.w[r][c].is_zero() {
                    raw.push((&self.w[r][c] * &half, vec![(sp.differential(a), 1), (sp.differential(b), 1)]));
                }
            }
        }
        Poly::canonicalize(sp, raw).expect("valid variables")
    }

    /// Re-expresses the form over a larger space.
    pub fn embed(&self, target: &Space) -> Result<Self, AlgebraError> {
        let idx = self
            .idx
            .iter()
            .map(|&a| {
                let name = &self.space.coords()[a].name;
                target.coord_index(name).ok_or_else(|| AlgebraError::UnknownVariable(name.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ConstantSymplectic {
            space: target.clone(),
            idx,
            w: self.w.clone(),
            inv: self.inv.clone(),
            degree: self.degree,
        })
    }

    /// Components of the Hamiltonian field of `f` (no homogeneity requirement).
    ///
    /// `X^c = Σ_b (−1)^{|b||f|+n+1} (∂_b f) (ω⁻¹)^{bc}`, the solution of
    /// `ι_X ω = (−1)^{|X|+1} δf`.
    fn ham_components(&self, f: &GradedPolynomial) -> Vec<GradedPolynomial> {
        let sp = &self.space;
        let mut comps = vec![Poly::zero(sp); sp.n()];
        let (even, oddp) = f.parity_split();
        for (part, fpar) in [(even, false), (oddp, true)] {
            if part.is_zero() {
                continue;
            }
            for (r, &b) in self.idx.iter().enumerate() {
                let d = part.left_derivative(b as VarId);
                if d.is_zero() {
                    continue;
                }
                let s = Gq::sign((odd(sp.coord_degree(b)) && fpar) != odd(self.degree + 1));
                for (c, &cc) in self.idx.iter().enumerate() {
                    let m = &self.inv[r][c];
                    if !m.is_zero() {
                        comps[cc] = &comps[cc] + &d.scale(&(&s * m));
                    }
                }
            }
        }
        comps
    }

    /// Hamiltonian vector field: `ι_X ω = (−1)^{|X|+1} δf`, so that `X(g) = {f, g}`.
    pub fn hamiltonian_vf(&self, f: &GradedPolynomial) -> Result<VectorField, AlgebraError> {
        let f = f.embed(&self.space)?;
        let deg = match f.grade_of() {
            Grade::Zero => return Ok(VectorField::zero(&self.space, 0)),
            Grade::Homogeneous { internal, form: 0 } => internal - self.degree,
            _ => return Err(AlgebraError::Inhomogeneous),
        };
        VectorField::new(&self.space, self.ham_components(&f), deg)
    }

    /// Poisson bracket `{f, g} = X_f(g)`.
    pub fn bracket<C: Coeff>(&self, f: &GradedPolynomial, g: &Poly<C>) -> Result<Poly<C>, AlgebraError> {
        let comps = self.ham_components(&f.embed(&self.space)?);
        let x = VectorField {
            space: self.space.clone(),
            components: comps,
            degree: 0,
        };
        x.apply(g)
    }
}

/// `{f, g}_ω`.
pub fn poisson_bracket(f: &GradedPolynomial, g: &GradedPolynomial, omega: &ConstantSymplectic) -> Result<GradedPolynomial, AlgebraError> {
    omega.bracket(f, g)
}

/// `X_f` with `ι_{X_f} ω = (−1)^{|X_f|+1} δf`.
pub fn hamiltonian_vf(f: &GradedPolynomial, omega: &ConstantSymplectic) -> Result<VectorField, AlgebraError> {
    omega.hamiltonian_vf(f)
}

/// Shifted cotangent bundle `T*[1]M` of a linear space `M`: base `x^i` of degree 0,
/// fiber `p_i` of degree 1, `ω = −Σ δx^i δp_i`, bracket of degree −1.
/// The orientation is the one giving `[X, f] = X(f)` for `X = X^i p_i`.
#[derive(Clone, Debug)]
pub struct ShiftedCotangent {
    space: Space,
    base: Vec<usize>,
    fiber: Vec<usize>,
    omega: ConstantSymplectic,
}

impl ShiftedCotangent {
    /// New space with coordinates `x^i` then `p_i`, from `(x, p)` name pairs.
    pub fn new(pairs: &[(&str, &str)]) -> Result<Self, AlgebraError> {
        let coords: Vec<(String, i32)> = pairs
            .iter()
            .map(|p| (p.0.to_string(), 0))
            .chain(pairs.iter().map(|p| (p.1.to_string(), 1)))
            .collect();
        let sp = GradedSpace::new(coords)?;
        Self::within(&sp, pairs)
    }

    /// Recognizes the cotangent structure inside an existing space.
    pub fn within(space: &Space, pairs: &[(&str, &str)]) -> Result<Self, AlgebraError> {
        let mut base = Vec::new();
        let mut fiber = Vec::new();
        for (x, p) in pairs {
            let a = space.coord_index(x).ok_or_else(|| AlgebraError::NotCotangent(format!("missing `{x}`")))?;
            let b = space.coord_index(p).ok_or_else(|| AlgebraError::NotCotangent(format!("missing `{p}`")))?;
            if space.coord_degree(a) != 0 || space.coord_degree(b) != 1 {
                return Err(AlgebraError::NotCotangent(format!("`{x}` must have degree 0 and `{p}` degree 1")));
            }
            base.push(a);
            fiber.push(b);
        }
        let mut form = Poly::zero(space);
        for (&a, &b) in base.iter().zip(&fiber) {
            form = &form - &(&Poly::var(space, space.differential(a)) * &Poly::var(space, space.differential(b)));
        }
        let omega = if base.is_empty() {
            ConstantSymplectic::empty(space, 1)
        } else {
            ConstantSymplectic::from_form(&form, 1)?
        };
        Ok(ShiftedCotangent {
            space: space.clone(),
            base,
            fiber,
            omega,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn omega(&self) -> &ConstantSymplectic {
        &self.omega
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn fiber(&self) -> &[usize] {
        &self.fiber
    }

    pub fn base_names(&self) -> Vec<String> {
        self.base.iter().map(|&a| self.space.coords()[a].name.clone()).collect()
    }

    /// Bivector `½ π^{ij}(x) p_i p_j` from components `π^{ij}` (antisymmetric).
    pub fn bivector(&self, pi: &[Vec<GradedPolynomial>]) -> Result<GradedPolynomial, AlgebraError> {
        let d = self.base.len();
        if pi.len() != d || pi.iter().any(|r| r.len() != d) {
            return Err(AlgebraError::Invalid("bivector size mismatch".into()));
        }
        let half = Gq::ratio(1, 2);
        let mut out = Poly::zero(&self.space);
        for i in 0..d {
            for j in 0..d {
                if !(&pi[i][j] + &pi[j][i]).is_zero() {
                    return Err(AlgebraError::Invalid(format!("bivector not antisymmetric at ({i},{j})")));
                }
                let pij = pi[i][j].embed(&self.space)?;
                if pij.is_zero() {
                    continue;
                }
                let pp = &Poly::var(&self.space, self.fiber[i] as VarId) * &Poly::var(&self.space, self.fiber[j] as VarId);
                out = &out + &(&pij * &pp).scale(&half);
            }
        }
        Ok(out)
    }

    /// Schouten–Nijenhuis bracket: the canonical degree −1 bracket on `T*[1]M`.
    pub fn schouten<C: Coeff>(&self, p: &GradedPolynomial, q: &Poly<C>) -> Result<Poly<C>, AlgebraError> {
        if !(Arc::ptr_eq(p.space(), &self.space) || **p.space() == *self.space) || !(Arc::ptr_eq(q.space(), &self.space) || **q.space() == *self.space) {
            return Err(AlgebraError::NotCotangent("arguments live over another space".into()));
        }
        self.omega.bracket(p, q)
    }
}

/// `[P, Q]` on a declared shifted cotangent space.
pub fn schouten(cot: &ShiftedCotangent, p: &GradedPolynomial, q: &GradedPolynomial) -> Result<GradedPolynomial, AlgebraError> {
    cot.schouten(p, q)
}

/// Monomial helper used by constructors: coefficient times a product of variables.
pub fn monomial(space: &Space, c: Gq, vars: &[VarId]) -> GradedPolynomial {
    Poly::canonicalize(space, [(c, vars.iter().map(|&v| (v, 1)).collect::<Vec<_>>())]).expect("known variables")
}

/// `Monomial` re-export for constructors working with raw terms.
pub fn mono(vars: &[VarId]) -> Monomial {
    Monomial(vars.iter().map(|&v| (v, 1)).collect())
}
