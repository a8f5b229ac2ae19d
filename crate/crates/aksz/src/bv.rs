//! Finite-dimensional BV formalism: odd symplectic spaces, the BV Laplacian, master
//! equations, pre-observables, fiber push-forwards and Q-exactness witnesses.

use std::collections::BTreeMap;

use crate::error::AlgebraError;
use crate::geometry::{ConstantSymplectic, VectorField};
use crate::linalg;
use crate::poly::{Grade, GradedPolynomial, GradedSpace, Monomial, Poly, Space, VarId};
use crate::qstructures::{AxiomCheck, QManifold, Report, Residual};
use crate::scalar::Gq;

/// Darboux pairs `(x^i, ξ_i)` with `|x^i| + |ξ_i| = −1` inside a graded space, with
/// `ω = Σ δξ_i δx^i` of degree −1. Other coordinates of the space are parameters.
#[derive(Clone, Debug)]
pub struct OddSymplecticSpace {
    space: Space,
    pairs: Vec<(usize, usize)>,
    omega: ConstantSymplectic,
    /// `Δ = Σ_i signs[i] ∂_{x^i} ∂_{ξ_i}`.
    signs: Vec<Gq>,
}

impl OddSymplecticSpace {
    /// New space from `(x, |x|, ξ)` triples; `ξ` gets degree `−1 − |x|`.
    pub fn new(pairs: &[(&str, i32, &str)]) -> Result<Self, AlgebraError> {
        let coords: Vec<(String, i32)> = pairs.iter().flat_map(|&(x, d, xi)| [(x.to_string(), d), (xi.to_string(), -1 - d)]).collect();
        let sp = GradedSpace::new(coords)?;
        let names: Vec<(&str, &str)> = pairs.iter().map(|&(x, _, xi)| (x, xi)).collect();
        Self::within(&sp, &names)
    }

    /// Pairs of existing coordinates of `space`.
    pub fn within(space: &Space, pairs: &[(&str, &str)]) -> Result<Self, AlgebraError> {
        let mut idx = Vec::new();
        let mut used = Vec::new();
        for &(x, xi) in pairs {
            let a = space.coord_index(x).ok_or_else(|| AlgebraError::UnknownVariable(x.into()))?;
            let b = space.coord_index(xi).ok_or_else(|| AlgebraError::UnknownVariable(xi.into()))?;
            if space.coord_degree(a) + space.coord_degree(b) != -1 {
                return Err(AlgebraError::Invalid(format!("degrees of `{x}` and `{xi}` do not sum to −1")));
            }
            for c in [a, b] {
                if used.contains(&c) {
                    return Err(AlgebraError::DuplicateCoordinate(space.coords()[c].name.clone()));
                }
                used.push(c);
            }
            idx.push((a, b));
        }
        Self::from_indices(space, idx)
    }

    fn from_indices(space: &Space, pairs: Vec<(usize, usize)>) -> Result<Self, AlgebraError> {
        let omega = if pairs.is_empty() {
            ConstantSymplectic::empty(space, -1)
        } else {
            let mut form = Poly::zero(space);
            for &(a, b) in &pairs {
                let dx = Poly::var(space, space.differential(a));
                let dxi = Poly::var(space, space.differential(b));
                form = &form + &(&dxi * &dx);
            }
            ConstantSymplectic::from_form(&form, -1)?
        };
        // Δ(x ξ) = (−1)^{|x|} {x, ξ} fixes each constant.
        let mut signs = Vec::new();
        for &(a, b) in &pairs {
            let br = omega.bracket(&Poly::var(space, a as VarId), &Poly::var(space, b as VarId))?;
            signs.push(&br.constant_term() * &Gq::sign(space.coord_degree(a) % 2 != 0));
        }
        Ok(OddSymplecticSpace {
            space: space.clone(),
            pairs,
            omega,
            signs,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Coordinate indices `(x, ξ)` of each pair.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn omega(&self) -> &ConstantSymplectic {
        &self.omega
    }

    /// The same pairs inside a larger space (matched by name).
    pub fn embed(&self, target: &Space) -> Result<Self, AlgebraError> {
        let find = |a: usize| {
            let n = &self.space.coords()[a].name;
            target.coord_index(n).ok_or_else(|| AlgebraError::UnknownVariable(n.clone()))
        };
        let pairs = self
            .pairs
            .iter()
            .map(|&(a, b)| Ok((find(a)?, find(b)?)))
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        Self::from_indices(target, pairs)
    }

    /// Union of two pair sets inside a common space.
    pub fn join(&self, other: &OddSymplecticSpace) -> Result<Self, AlgebraError> {
        let a = self.embed(other.space())?;
        let mut pairs = a.pairs.clone();
        for p in &other.pairs {
            if pairs.iter().any(|q| q.0 == p.0 || q.1 == p.1 || q.0 == p.1 || q.1 == p.0) {
                return Err(AlgebraError::DuplicateCoordinate(other.space.coords()[p.0].name.clone()));
            }
            pairs.push(*p);
        }
        Self::from_indices(other.space(), pairs)
    }

    /// Antibracket `{f, g}`.
    pub fn bracket(&self, f: &GradedPolynomial, g: &GradedPolynomial) -> Result<GradedPolynomial, AlgebraError> {
        self.omega.bracket(f, &g.embed(&self.space)?)
    }

    /// BV Laplacian.
    pub fn laplacian(&self, f: &GradedPolynomial) -> Result<GradedPolynomial, AlgebraError> {
        let f = f.embed(&self.space)?;
        let mut out = Poly::zero(&self.space);
        for (&(a, b), s) in self.pairs.iter().zip(&self.signs) {
            let d = f.left_derivative(b as VarId).left_derivative(a as VarId);
            if !d.is_zero() {
                out = &out + &d.scale(s);
            }
        }
        Ok(out)
    }
}

pub fn bv_laplacian(f: &GradedPolynomial, sp: &OddSymplecticSpace) -> Result<GradedPolynomial, AlgebraError> {
    sp.laplacian(f)
}

fn require_degree_zero(s: &GradedPolynomial, what: &str) -> Result<(), AlgebraError> {
    match s.grade_of() {
        Grade::Zero | Grade::Homogeneous { internal: 0, form: 0 } => Ok(()),
        g => Err(AlgebraError::Invalid(format!("{what} must have degree 0, found {g:?}"))),
    }
}

/// BV action on an odd symplectic space.
#[derive(Clone, Debug)]
pub struct BVTheory {
    pub space: OddSymplecticSpace,
    pub action: GradedPolynomial,
}

impl BVTheory {
    pub fn new(space: OddSymplecticSpace, action: &GradedPolynomial) -> Result<Self, AlgebraError> {
        let action = action.embed(space.space())?;
        require_degree_zero(&action, "BV action")?;
        Ok(BVTheory { space, action })
    }

    /// Skips the degree check, for evaluating the master-equation operators on
    /// actions of other degrees.
    pub fn unchecked(space: OddSymplecticSpace, action: &GradedPolynomial) -> Result<Self, AlgebraError> {
        let action = action.embed(space.space())?;
        Ok(BVTheory { space, action })
    }

    /// `{S, S}`.
    pub fn cme_residual(&self) -> Result<GradedPolynomial, AlgebraError> {
        self.space.bracket(&self.action, &self.action)
    }

    /// `½{S, S} − iΔS`.
    pub fn qme_residual(&self) -> Result<GradedPolynomial, AlgebraError> {
        let half = self.cme_residual()?.scale(&Gq::ratio(1, 2));
        Ok(&half - &self.space.laplacian(&self.action)?.scale(&Gq::i()))
    }

    /// `δ_BV O = {S, O} − iΔO`.
    pub fn delta_bv(&self, o: &GradedPolynomial) -> Result<GradedPolynomial, AlgebraError> {
        let o = o.embed(self.space.space())?;
        Ok(&self.space.bracket(&self.action, &o)? - &self.space.laplacian(&o)?.scale(&Gq::i()))
    }

    /// The Hamiltonian vector field `{S, ·}`.
    pub fn q(&self) -> Result<VectorField, AlgebraError> {
        let x = self.space.omega().hamiltonian_vf(&self.action)?;
        Ok(if x.is_zero() { VectorField::zero(self.space.space(), 1) } else { x })
    }
}

pub fn check_cme(t: &BVTheory) -> Result<GradedPolynomial, AlgebraError> {
    t.cme_residual()
}

pub fn check_qme(t: &BVTheory) -> Result<GradedPolynomial, AlgebraError> {
    t.qme_residual()
}

pub fn delta_bv_apply(t: &BVTheory, o: &GradedPolynomial) -> Result<GradedPolynomial, AlgebraError> {
    t.delta_bv(o)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Classical,
    SemiQuantum,
    Quantum,
}

/// Auxiliary odd symplectic fiber over an ambient Q-manifold with an action `S^aux`.
#[derive(Clone, Debug)]
pub struct PreObservable {
    pub ambient: QManifold,
    pub ambient_bv: Option<BVTheory>,
    /// Ambient coordinates followed by the auxiliary ones.
    pub joint: Space,
    pub aux: OddSymplecticSpace,
    pub s_aux: GradedPolynomial,
}

impl PreObservable {
    /// Ambient coordinates followed by `(x, |x|, ξ)` auxiliary pairs.
    pub fn joint_space(ambient: &Space, aux_pairs: &[(&str, i32, &str)]) -> Result<Space, AlgebraError> {
        ambient.extend(aux_pairs.iter().flat_map(|&(x, d, xi)| [(x.to_string(), d), (xi.to_string(), -1 - d)]))
    }

    pub fn new(ambient: QManifold, ambient_bv: Option<BVTheory>, aux_pairs: &[(&str, i32, &str)], s_aux: &GradedPolynomial) -> Result<Self, AlgebraError> {
        let joint = Self::joint_space(&ambient.space, aux_pairs)?;
        let names: Vec<(&str, &str)> = aux_pairs.iter().map(|&(x, _, xi)| (x, xi)).collect();
        let aux = OddSymplecticSpace::within(&joint, &names)?;
        let s_aux = s_aux.embed(&joint)?;
        require_degree_zero(&s_aux, "S^aux")?;
        if let Some(t) = &ambient_bv {
            if **t.space.space() != *ambient.space {
                return Err(AlgebraError::Invalid("ambient BV theory lives over another space".into()));
            }
        }
        Ok(PreObservable {
            ambient,
            ambient_bv,
            joint,
            aux,
            s_aux,
        })
    }

    fn q_joint(&self) -> Result<VectorField, AlgebraError> {
        self.ambient.q.embed(&self.joint)
    }

    /// `Q S^aux + ½{S^aux, S^aux}_aux`.
    pub fn classical_residual(&self) -> Result<GradedPolynomial, AlgebraError> {
        let qs = self.q_joint()?.apply(&self.s_aux)?;
        Ok(&qs + &self.aux.bracket(&self.s_aux, &self.s_aux)?.scale(&Gq::ratio(1, 2)))
    }

    /// Classical residual `− iΔ^aux S^aux`.
    pub fn semi_quantum_residual(&self) -> Result<GradedPolynomial, AlgebraError> {
        Ok(&self.classical_residual()? - &self.aux.laplacian(&self.s_aux)?.scale(&Gq::i()))
    }

    /// Joint quantum master equation residual of `S + S^aux` on ambient × aux.
    pub fn quantum_residual(&self) -> Result<GradedPolynomial, AlgebraError> {
        let t = self
            .ambient_bv
            .as_ref()
            .ok_or_else(|| AlgebraError::Invalid("quantum level requires an ambient BV theory".into()))?;
        let total = t.space.join(&self.aux)?;
        let s = &t.action.embed(&self.joint)? + &self.s_aux;
        BVTheory::new(total, &s)?.qme_residual()
    }

    pub fn check(&self, level: Level) -> Result<Report, AlgebraError> {
        let mut checks = Vec::new();
        if let Some(t) = &self.ambient_bv {
            let diff = t.q()?.try_sub(&self.ambient.q)?;
            checks.push(AxiomCheck::required("ambient_Q", Residual::Field(diff)));
        }
        let residual = match level {
            Level::Classical => self.classical_residual()?,
            Level::SemiQuantum => self.semi_quantum_residual()?,
            Level::Quantum => self.quantum_residual()?,
        };
        let name = match level {
            Level::Classical => "classical",
            Level::SemiQuantum => "semi_quantum",
            Level::Quantum => "quantum",
        };
        checks.push(AxiomCheck::required(name, Residual::Poly(residual)));
        Ok(Report {
            subject: "pre_observable".into(),
            checks,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Member {
    First,
    Second,
}

impl Member {
    pub fn other(self) -> Member {
        match self {
            Member::First => Member::Second,
            Member::Second => Member::First,
        }
    }
}

/// Coordinate Lagrangian: for each Darboux pair, the member set to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LagrangianSubspace {
    pub zero: Vec<Member>,
}

impl LagrangianSubspace {
    pub fn new(zero: Vec<Member>) -> Self {
        LagrangianSubspace { zero }
    }

    pub fn uniform(pairs: usize, m: Member) -> Self {
        LagrangianSubspace { zero: vec![m; pairs] }
    }

    /// Swaps the choice on pair `i`.
    pub fn swapped(&self, i: usize) -> Self {
        let mut zero = self.zero.clone();
        zero[i] = zero[i].other();
        LagrangianSubspace { zero }
    }

    fn split(&self, aux: &OddSymplecticSpace, pairs: &[usize]) -> Result<(Vec<VarId>, Vec<VarId>), AlgebraError> {
        if self.zero.len() != aux.pairs().len() {
            return Err(AlgebraError::Invalid(format!(
                "Lagrangian has {} choices for {} pairs",
                self.zero.len(),
                aux.pairs().len()
            )));
        }
        let mut zero = Vec::new();
        let mut integrate = Vec::new();
        for &i in pairs {
            let (a, b) = aux.pairs()[i];
            let (z, k) = match self.zero[i] {
                Member::First => (a, b),
                Member::Second => (b, a),
            };
            zero.push(z as VarId);
            integrate.push(k as VarId);
        }
        Ok((zero, integrate))
    }
}

/// `prefactor · e^{i·exponent}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberIntegrand {
    pub prefactor: GradedPolynomial,
    pub exponent: GradedPolynomial,
}

/// `Σ_k X^k / k!` for nilpotent `X`.
fn exp_nilpotent(x: &GradedPolynomial) -> Result<GradedPolynomial, AlgebraError> {
    let sp = x.space();
    if let Some((m, _)) = x.terms().find(|(m, _)| !m.0.iter().any(|&(v, _)| sp.parity(v))) {
        return Err(AlgebraError::NotExpandable(format!("term `{}` contains no odd variable", m.render(sp))));
    }
    let mut out = Poly::int(sp, 1);
    let mut term = Poly::int(sp, 1);
    let mut k = 1;
    loop {
        term = (&term * x).scale(&Gq::ratio(1, k));
        if term.is_zero() {
            return Ok(out);
        }
        out = &out + &term;
        k += 1;
    }
}

/// Gaussian moment `⟨x^α⟩` for the propagator `g`, with `α` given as a list of
/// (position in `g`, exponent).
fn wick_moment(alpha: &[(usize, u32)], g: &[Vec<Gq>], memo: &mut BTreeMap<Vec<(usize, u32)>, Gq>) -> Gq {
    let alpha: Vec<(usize, u32)> = alpha.iter().copied().filter(|a| a.1 > 0).collect();
    if alpha.is_empty() {
        return Gq::one();
    }
    if alpha.iter().map(|a| a.1).sum::<u32>() % 2 == 1 {
        return Gq::zero();
    }
    if let Some(v) = memo.get(&alpha) {
        return v.clone();
    }
    // pair one factor of the first variable with each remaining factor
    let i = alpha[0].0;
    let mut rest = alpha.clone();
    rest[0].1 -= 1;
    let mut total = Gq::zero();
    for k in 0..rest.len() {
        if rest[k].1 == 0 {
            continue;
        }
        let j = rest[k].0;
        let mult = Gq::int(rest[k].1 as i64);
        let mut r2 = rest.clone();
        r2[k].1 -= 1;
        let sub = wick_moment(&r2, g, memo);
        if !sub.is_zero() && !g[i][j].is_zero() {
            total += &(&(&mult * &g[i][j]) * &sub);
        }
    }
    memo.insert(alpha, total.clone());
    total
}

/// Formal Gaussian integral over the even variables `vars` of `prefactor · e^{i·quadratic}`,
/// normalized so that the pure Gaussian integrates to 1. Terms of `quadratic` linear in
/// `vars` are sources and are absorbed by expanding `e^{i·source}` (they must be nilpotent).
pub fn wick_gaussian(quadratic: &GradedPolynomial, prefactor: &GradedPolynomial, vars: &[VarId]) -> Result<GradedPolynomial, AlgebraError> {
    let sp = quadratic.space();
    let prefactor = prefactor.embed(sp)?;
    let (a, rest) = quadratic_form(quadratic, vars)?;
    let integrand = &prefactor * &exp_nilpotent(&rest.scale(&Gq::i()))?;
    wick_with_form(&integrand, &a, vars)
}

/// Splits off the constant-coefficient quadratic part in `vars`: `S = ½ xᵀAx + rest`.
fn quadratic_form(s: &GradedPolynomial, vars: &[VarId]) -> Result<(Vec<Vec<Gq>>, GradedPolynomial), AlgebraError> {
    let sp = s.space();
    let pos = |v: VarId| vars.iter().position(|&w| w == v);
    for &v in vars {
        if sp.parity(v) {
            return Err(AlgebraError::Invalid(format!(
                "`{}` is odd; Wick integration needs even variables",
                sp.var_name(v)
            )));
        }
    }
    let k = vars.len();
    let mut a = vec![vec![Gq::zero(); k]; k];
    let quad = s.filter(|m| m.size() == 2 && m.0.iter().all(|&(v, _)| pos(v).is_some()));
    for (m, c) in quad.terms() {
        match m.0.as_slice() {
            [(v, 2)] => {
                let i = pos(*v).expect("filtered");
                a[i][i] = &a[i][i] + &(c * &Gq::int(2));
            }
            [(v, 1), (w, 1)] => {
                let (i, j) = (pos(*v).expect("filtered"), pos(*w).expect("filtered"));
                a[i][j] = &a[i][j] + c;
                a[j][i] = &a[j][i] + c;
            }
            _ => unreachable!("quadratic monomial"),
        }
    }
    Ok((a, s - &quad))
}

fn wick_with_form(f: &GradedPolynomial, a: &[Vec<Gq>], vars: &[VarId]) -> Result<GradedPolynomial, AlgebraError> {
    let sp = f.space();
    if vars.is_empty() {
        return Ok(f.clone());
    }
    let inv = linalg::inverse(a).ok_or_else(|| {
        let names: Vec<String> = vars.iter().map(|&v| sp.var_name(v)).collect();
        AlgebraError::DegenerateGaugeFixing(format!("even-even block over [{}] is not invertible", names.join(",")))
    })?;
    let g: Vec<Vec<Gq>> = inv.iter().map(|r| r.iter().map(|x| x * &Gq::i()).collect()).collect();
    let mut memo = BTreeMap::new();
    let mut out = Poly::zero(sp);
    for (m, c) in f.terms() {
        let mut alpha = Vec::new();
        let mut rest = Vec::new();
        for &(v, e) in &m.0 {
            match vars.iter().position(|&w| w == v) {
                Some(i) => alpha.push((i, e)),
                None => rest.push((v, e)),
            }
        }
        let w = wick_moment(&alpha, &g, &mut memo);
        if !w.is_zero() {
            out.add_term(Monomial(rest), c * &w)?;
        }
    }
    Ok(out)
}

/// Berezin integral `∫ dθ_k ⋯ dθ_1 f`: `∫dθ` is applied for `θ_1` first, as the left
/// derivative, so `∫dη dξ ξη = 1` is `berezin_integrate(ξη, [ξ, η])`.
pub fn berezin_integrate(f: &GradedPolynomial, odd_vars: &[VarId]) -> Result<GradedPolynomial, AlgebraError> {
    let sp = f.space();
    let mut out = f.clone();
    for &v in odd_vars {
        if !sp.parity(v) {
            return Err(AlgebraError::Invalid(format!(
                "`{}` is even; Berezin integration needs odd variables",
                sp.var_name(v)
            )));
        }
        out = out.left_derivative(v);
    }
    Ok(out)
}

impl FiberIntegrand {
    pub fn new(prefactor: &GradedPolynomial, exponent: &GradedPolynomial) -> Self {
        FiberIntegrand {
            prefactor: prefactor.clone(),
            exponent: exponent.clone(),
        }
    }

    /// Restricts to `zero = 0` and integrates over `vars` (Wick for even, Berezin for
    /// odd in the given order). Exponent terms free of `vars` stay in the exponent.
    pub fn integrate(&self, zero: &[VarId], vars: &[VarId]) -> Result<FiberIntegrand, AlgebraError> {
        let sp = self.exponent.space().clone();
        let p0 = self.prefactor.embed(&sp)?.set_zero(zero);
        let s0 = self.exponent.set_zero(zero);
        let s_int = s0.filter(|m| vars.iter().any(|&v| m.contains(v)));
        let s_rest = &s0 - &s_int;
        let even: Vec<VarId> = vars.iter().copied().filter(|&v| !sp.parity(v)).collect();
        let odd: Vec<VarId> = vars.iter().copied().filter(|&v| sp.parity(v)).collect();
        let (a, v) = quadratic_form(&s_int, &even)?;
        let integrand = &p0 * &exp_nilpotent(&v.scale(&Gq::i()))?;
        let after_wick = wick_with_form(&integrand, &a, &even)?;
        let out = berezin_integrate(&after_wick, &odd)?;
        Ok(FiberIntegrand {
            prefactor: out,
            exponent: s_rest,
        })
    }

    /// `prefactor · e^{i·exponent}` as a polynomial.
    pub fn finalize(&self) -> Result<GradedPolynomial, AlgebraError> {
        Ok(&self.prefactor * &exp_nilpotent(&self.exponent.scale(&Gq::i()))?)
    }
}

/// Result of a push-forward: the observable over the ambient space and `Q(O)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pushforward {
    pub observable: GradedPolynomial,
    pub gauge_residual: GradedPolynomial,
}

/// Integrates the whole auxiliary fiber over `l`; see [`bv_pushforward_staged`].
pub fn bv_pushforward(p: &PreObservable, l: &LagrangianSubspace) -> Result<Pushforward, AlgebraError> {
    let all: Vec<usize> = (0..p.aux.pairs().len()).collect();
    bv_pushforward_staged(p, l, &[all])
}

/// Integrates the auxiliary pairs stage by stage. The concatenated stages must list
/// every pair once, in increasing order (this fixes the Berezin ordering).
pub fn bv_pushforward_staged(p: &PreObservable, l: &LagrangianSubspace, stages: &[Vec<usize>]) -> Result<Pushforward, AlgebraError> {
    let residual = p.semi_quantum_residual()?;
    if !residual.is_zero() {
        return Err(AlgebraError::Invalid(format!(
            "not a semi-quantum pre-observable: residual {}",
            residual.render()
        )));
    }
    let order: Vec<usize> = stages.iter().flatten().copied().collect();
    if order != (0..p.aux.pairs().len()).collect::<Vec<_>>() {
        return Err(AlgebraError::Invalid("stages must cover every auxiliary pair once, in increasing order".into()));
    }
    let mut f = FiberIntegrand::new(&Poly::int(&p.joint, 1), &p.s_aux);
    for stage in stages {
        let (zero, vars) = l.split(&p.aux, stage)?;
        f = f.integrate(&zero, &vars)?;
    }
    let o = f.finalize()?.embed(&p.ambient.space)?;
    let gauge_residual = p.ambient.q.apply(&o)?;
    Ok(Pushforward { observable: o, gauge_residual })
}

/// Outcome of [`q_exactness_witness`].
#[derive(Clone, Debug, PartialEq)]
pub enum Exactness {
    /// `Q(witness) − diff = residual` (always zero when returned).
    Exact { witness: GradedPolynomial, residual: GradedPolynomial },
    /// No witness with polynomial degree ≤ the bound: for the given degree component,
    /// `rank [A] < rank [A | b]` on a basis of `basis_size` monomials.
    NotExact {
        degree: i32,
        basis_size: usize,
        rank: usize,
        augmented_rank: usize,
    },
}

/// Monomials in the coordinates of `sp` with internal degree `deg` and size ≤ `bound`.
fn monomial_basis(sp: &GradedSpace, deg: i32, bound: u32) -> Vec<Monomial> {
    fn go(sp: &GradedSpace, i: usize, deg: i32, left: u32, cur: &mut Vec<(VarId, u32)>, out: &mut Vec<Monomial>) {
        if i == sp.n() {
            if deg == 0 {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        let d = sp.coord_degree(i);
        let max = if d % 2 != 0 { left.min(1) } else { left };
        for e in 0..=max {
            if e > 0 {
                cur.push((i as VarId, e));
            }
            go(sp, i + 1, deg - d * e as i32, left - e, cur, out);
            if e > 0 {
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(sp, 0, deg, bound, &mut Vec::new(), &mut out);
    out
}

/// Solves `Q(ψ) = diff` over monomials of polynomial degree ≤ `degree_bound`,
/// degree component by degree component.
pub fn q_exactness_witness(q: &VectorField, diff: &GradedPolynomial, degree_bound: u32) -> Result<Exactness, AlgebraError> {
    let sp = q.space().clone();
    let diff = diff.embed(&sp)?;
    let mut degrees: Vec<i32> = Vec::new();
    for (m, _) in diff.terms() {
        let (i, f) = m.bidegree(&sp);
        if f != 0 {
            return Err(AlgebraError::Invalid("Q-exactness is decided for functions, not forms".into()));
        }
        if !degrees.contains(&i) {
            degrees.push(i);
        }
    }
    degrees.sort();
    let mut witness = Poly::zero(&sp);
    for d in degrees {
        let b = diff.internal_part(d);
        let basis = monomial_basis(&sp, d - q.degree(), degree_bound);
        let images: Vec<GradedPolynomial> = basis
            .iter()
            .map(|m| q.apply(&Poly::term(&sp, Gq::one(), m.clone())))
            .collect::<Result<_, _>>()?;
        let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
        for p in images.iter().chain(std::iter::once(&b)) {
            for (m, _) in p.terms() {
                let n = rows.len();
                rows.entry(m.clone()).or_insert(n);
            }
        }
        let mut a = vec![vec![Gq::zero(); basis.len()]; rows.len()];
        for (j, p) in images.iter().enumerate() {
            for (m, c) in p.terms() {
                a[rows[m]][j] = c.clone();
            }
        }
        let mut rhs = vec![Gq::zero(); rows.len()];
        for (m, c) in b.terms() {
            rhs[rows[m]] = c.clone();
        }
        match linalg::solve(&a, &rhs) {
            Some(x) => {
                for (m, c) in basis.iter().zip(x) {
                    if !c.is_zero() {
                        witness.add_term(m.clone(), c)?;
                    }
                }
            }
            None => {
                let rank = linalg::rank(&a);
                let aug: Vec<Vec<Gq>> = a.iter().zip(&rhs).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
                return Ok(Exactness::NotExact {
                    degree: d,
                    basis_size: basis.len(),
                    rank,
                    augmented_rank: linalg::rank(&aug),
                });
            }
        }
    }
    let residual = &q.apply(&witness)? - &diff;
    Ok(Exactness::Exact { witness, residual })
}
