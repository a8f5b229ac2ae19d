//! Hamiltonian Q-manifolds, trivial Hamiltonian Q-bundles, their axiom checkers
//! and the standard constructions.

use std::fmt;

use crate::error::AlgebraError;
use crate::geometry::{de_rham, lie_bracket, lie_derivative, ConstantSymplectic, DiffForm, VectorField};
use crate::lie::{is_nondegenerate, is_symmetric, LieAlgebra, Representation};
use crate::poly::{Grade, GradedPolynomial, GradedSpace, Poly, Space, VarId};
use crate::scalar::Gq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Warning,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Warning => "warning",
        })
    }
}

/// Value left over by an axiom check; the axiom holds iff it is zero.
#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    Poly(GradedPolynomial),
    Field(VectorField),
    Degree { expected: String, found: String },
    Entries(Vec<String>),
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        match self {
            Residual::Poly(p) => p.is_zero(),
            Residual::Field(x) => x.is_zero(),
            Residual::Degree { expected, found } => expected == found,
            Residual::Entries(e) => e.is_empty(),
        }
    }

    pub fn render(&self) -> String {
        match self {
            Residual::Poly(p) => p.render(),
            Residual::Field(x) => x.render(),
            Residual::Degree { expected, found } if expected == found => "0".into(),
            Residual::Degree { expected, found } => format!("expected {expected}, found {found}"),
            Residual::Entries(e) if e.is_empty() => "0".into(),
            Residual::Entries(e) => e.join("; "),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomCheck {
    pub name: String,
    pub status: Status,
    pub residual: Residual,
}

impl AxiomCheck {
    /// Fails unless the residual is zero.
    pub fn required(name: &str, residual: Residual) -> Self {
        let status = if residual.is_zero() { Status::Pass } else { Status::Fail };
        AxiomCheck {
            name: name.into(),
            status,
            residual,
        }
    }

    /// Warns unless the residual is zero.
    pub fn advisory(name: &str, residual: Residual) -> Self {
        let status = if residual.is_zero() { Status::Pass } else { Status::Warning };
        AxiomCheck {
            name: name.into(),
            status,
            residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub subject: String,
    pub checks: Vec<AxiomCheck>,
}

impl Report {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&AxiomCheck> {
        self.checks.iter().filter(|c| c.status == Status::Fail).collect()
    }
}

impl serde::Serialize for AxiomCheck {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AxiomCheck", 3)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("status", &self.status)?;
        st.serialize_field("residual", &self.residual.render())?;
        st.end()
    }
}

impl serde::Serialize for Report {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Report", 3)?;
        st.serialize_field("subject", &self.subject)?;
        st.serialize_field("valid", &self.is_valid())?;
        st.serialize_field("checks", &self.checks)?;
        st.end()
    }
}

fn grade_string(p: &GradedPolynomial) -> String {
    match p.grade_of() {
        Grade::Zero => "zero".into(),
        Grade::Homogeneous { internal, form } => format!("({internal},{form})"),
        Grade::Mixed(_) => "mixed".into(),
    }
}

fn degree_check(items: &[(&str, String, String)]) -> Residual {
    let bad: Vec<&(&str, String, String)> = items.iter().filter(|(_, e, f)| e != f && f != "zero").collect();
    if bad.is_empty() {
        Residual::Degree {
            expected: "ok".into(),
            found: "ok".into(),
        }
    } else {
        Residual::Degree {
            expected: bad.iter().map(|(n, e, _)| format!("{n}:{e}")).collect::<Vec<_>>().join(","),
            found: bad.iter().map(|(n, _, f)| format!("{n}:{f}")).collect::<Vec<_>>().join(","),
        }
    }
}

/// Space with a degree-1 vector field.
#[derive(Clone, Debug)]
pub struct QManifold {
    pub space: Space,
    pub q: VectorField,
}

/// `(M, Q, ω = δα, Θ)` of degree `n`.
#[derive(Clone, Debug)]
pub struct HamiltonianQManifold {
    pub name: String,
    pub space: Space,
    pub q: VectorField,
    pub omega: ConstantSymplectic,
    pub alpha: DiffForm,
    pub theta: GradedPolynomial,
    pub n: i32,
    pub warnings: Vec<String>,
}

impl HamiltonianQManifold {
    pub fn q_manifold(&self) -> QManifold {
        QManifold {
            space: self.space.clone(),
            q: self.q.clone(),
        }
    }

    pub fn verify(&self) -> Result<Report, AlgebraError> {
        let mut checks = Vec::new();
        let qq = lie_bracket(&self.q, &self.q)?.scale(&Gq::ratio(1, 2));
        checks.push(AxiomCheck::required("Q^2", Residual::Field(qq)));
        checks.push(AxiomCheck::required(
            "d_alpha",
            Residual::Poly(de_rham(&self.alpha).try_sub(&self.omega.to_form())?),
        ));
        let xt = self.omega.hamiltonian_vf(&self.theta)?;
        checks.push(AxiomCheck::required("ham_Q", Residual::Field(xt.try_sub(&self.q)?)));
        checks.push(AxiomCheck::required("theta_MC", Residual::Poly(self.omega.bracket(&self.theta, &self.theta)?)));
        checks.push(AxiomCheck::required(
            "L_Q_omega",
            Residual::Poly(lie_derivative(&self.q, &self.omega.to_form())?),
        ));
        let qdeg = if self.q.is_zero() { "zero".into() } else { self.q.degree().to_string() };
        checks.push(AxiomCheck::required(
            "degrees",
            degree_check(&[
                ("Q", "1".into(), qdeg),
                ("omega", self.n.to_string(), self.omega.degree().to_string()),
                ("Theta", format!("({},0)", self.n + 1), grade_string(&self.theta)),
                ("alpha", format!("({},1)", self.n), grade_string(&self.alpha)),
            ]),
        ));
        for w in &self.warnings {
            checks.push(AxiomCheck {
                name: "warning".into(),
                status: Status::Warning,
                residual: Residual::Entries(vec![w.clone()]),
            });
        }
        Ok(Report {
            subject: self.name.clone(),
            checks,
        })
    }
}

/// `E = M × N → M` with vertical `A`, fiber form `ω′ = δα′` and Hamiltonian `Θ′`.
#[derive(Clone, Debug)]
pub struct TrivialHamQBundle {
    pub name: String,
    pub base: QManifold,
    pub base_omega: Option<ConstantSymplectic>,
    pub total: Space,
    /// Indices of the fiber coordinates in `total`.
    pub fiber: Vec<usize>,
    pub a: VectorField,
    pub omega_prime: ConstantSymplectic,
    pub alpha_prime: DiffForm,
    pub theta_prime: GradedPolynomial,
    pub n_prime: i32,
    pub warnings: Vec<String>,
    /// Construction-specific checks (equivariance, L∞ relations, ...).
    pub extra: Vec<AxiomCheck>,
}

impl TrivialHamQBundle {
    /// Total space = base coordinates followed by `fiber_coords`.
    pub fn total_space(base: &Space, fiber_coords: &[(String, i32)]) -> Result<(Space, Vec<usize>), AlgebraError> {
        let total = base.extend(fiber_coords.iter().cloned())?;
        let fiber = (base.n()..total.n()).collect();
        Ok((total, fiber))
    }

    pub fn q_total(&self) -> Result<VectorField, AlgebraError> {
        self.base.q.embed(&self.total)
    }

    pub fn verify(&self) -> Result<Report, AlgebraError> {
        let mut checks = Vec::new();
        let q = self.q_total()?;
        let horizontal: Vec<String> = (0..self.total.n())
            .filter(|a| !self.fiber.contains(a) && !self.a.component(*a).is_zero())
            .map(|a| format!("{}: {}", self.total.coords()[a].name, self.a.component(a).render()))
            .collect();
        checks.push(AxiomCheck::required("A_vertical", Residual::Entries(horizontal)));
        let flat = lie_bracket(&q, &self.a)?.try_add(&lie_bracket(&self.a, &self.a)?.scale(&Gq::ratio(1, 2)))?;
        checks.push(AxiomCheck::required("A_flatness", Residual::Field(flat)));
        let xa = self.omega_prime.hamiltonian_vf(&self.theta_prime)?;
        checks.push(AxiomCheck::required("ham_A", Residual::Field(xa.try_sub(&self.a)?)));
        let cme = q
            .apply(&self.theta_prime)?
            .try_add(&self.omega_prime.bracket(&self.theta_prime, &self.theta_prime)?.scale(&Gq::ratio(1, 2)))?;
        checks.push(AxiomCheck::required("fiber_CME", Residual::Poly(cme)));
        checks.push(AxiomCheck::required(
            "d_alpha_prime",
            Residual::Poly(de_rham(&self.alpha_prime).try_sub(&self.omega_prime.to_form())?),
        ));
        let adeg = if self.a.is_zero() { "zero".into() } else { self.a.degree().to_string() };
        checks.push(AxiomCheck::required(
            "degrees",
            degree_check(&[
                ("A", "1".into(), adeg),
                ("omega'", self.n_prime.to_string(), self.omega_prime.degree().to_string()),
                ("Theta'", format!("({},0)", self.n_prime + 1), grade_string(&self.theta_prime)),
                ("alpha'", format!("({},1)", self.n_prime), grade_string(&self.alpha_prime)),
            ]),
        ));
        if let Some(w) = &self.base_omega {
            let w = w.embed(&self.total)?;
            checks.push(AxiomCheck::advisory(
                "base_bracket",
                Residual::Poly(w.bracket(&self.theta_prime, &self.theta_prime)?),
            ));
        }
        checks.extend(self.extra.iter().cloned());
        for w in &self.warnings {
            checks.push(AxiomCheck {
                name: "warning".into(),
                status: Status::Warning,
                residual: Residual::Entries(vec![w.clone()]),
            });
        }
        Ok(Report {
            subject: self.name.clone(),
            checks,
        })
    }
}

// ---------------------------------------------------------------------------
// helpers

fn var(sp: &Space, a: usize) -> GradedPolynomial {
    Poly::var(sp, a as VarId)
}

fn dvar(sp: &Space, a: usize) -> GradedPolynomial {
    Poly::var(sp, sp.differential(a))
}

fn indexed(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// `Σ_{b,c} f^a_{bc} ψ^b ψ^c` style contraction: `Σ t_{bc} u^b v^c`.
fn bilinear(sp: &Space, t: impl Fn(usize, usize) -> Gq, u: &[usize], v: &[usize]) -> GradedPolynomial {
    let mut out = Poly::zero(sp);
    for (i, &b) in u.iter().enumerate() {
        for (j, &c) in v.iter().enumerate() {
            let k = t(i, j);
            if !k.is_zero() {
                out = &out + &(&var(sp, b) * &var(sp, c)).scale(&k);
            }
        }
    }
    out
}

/// Chevalley–Eilenberg field `Qψ^a = ½ f^a_{bc} ψ^b ψ^c` on the coordinates `psi`.
fn ce_components(sp: &Space, g: &LieAlgebra, psi: &[usize]) -> Vec<(usize, GradedPolynomial)> {
    (0..g.dim())
        .map(|a| (psi[a], bilinear(sp, |b, c| g.f(a, b, c) * &Gq::ratio(1, 2), psi, psi)))
        .collect()
}

fn invariance_warning(g: &LieAlgebra, k: &[Vec<Gq>]) -> Option<String> {
    let v = g.invariance_violations(k);
    (!v.is_empty()).then(|| format!("pairing is not ad-invariant ({} violating components)", v.len()))
}

// ---------------------------------------------------------------------------
// standard targets

/// Chern–Simons target `g[1]`: `Q = ½⟨[ψ,ψ],∂_ψ⟩`, `ω = ½(δψ,δψ)`, `α = ½(ψ,δψ)`, `Θ = 1/6 (ψ,[ψ,ψ])`.
pub fn chern_simons(g: &LieAlgebra, k: &[Vec<Gq>]) -> Result<HamiltonianQManifold, AlgebraError> {
    let d = g.dim();
    if k.len() != d || k.iter().any(|r| r.len() != d) {
        return Err(AlgebraError::Invalid("pairing size does not match the Lie algebra".into()));
    }
    if !is_symmetric(k) {
        return Err(AlgebraError::Invalid("pairing is not symmetric".into()));
    }
    if !is_nondegenerate(k) {
        return Err(AlgebraError::DegenerateForm);
    }
    LieAlgebra::from_tensor(g.name.clone(), g.tensor().to_vec())?;
    let sp = GradedSpace::new(indexed("ψ", d).into_iter().map(|n| (n, 1)))?;
    let psi: Vec<usize> = (0..d).collect();
    let q = VectorField::from_pairs(&sp, ce_components(&sp, g, &psi), 1)?;
    let omega = ConstantSymplectic::from_matrix(&sp, psi.clone(), k.to_vec(), 2)?;
    let mut alpha = Poly::zero(&sp);
    let mut theta = Poly::zero(&sp);
    for a in 0..d {
        for b in 0..d {
            if !k[a][b].is_zero() {
                alpha = &alpha + &(&var(&sp, a) * &dvar(&sp, b)).scale(&(&k[a][b] * &Gq::ratio(1, 2)));
            }
        }
        // (ψ,[ψ,ψ]) = k_{ad} f^d_{bc} ψ^a ψ^b ψ^c
        for dd in 0..d {
            if k[a][dd].is_zero() {
                continue;
            }
            let inner = bilinear(&sp, |b, c| g.f(dd, b, c).clone(), &psi, &psi);
            theta = &theta + &(&var(&sp, a) * &inner).scale(&(&k[a][dd] * &Gq::ratio(1, 6)));
        }
    }
    let warnings = invariance_warning(g, k).into_iter().collect();
    Ok(HamiltonianQManifold {
        name: format!("chern_simons({})", g.name),
        space: sp,
        q,
        omega,
        alpha,
        theta,
        n: 2,
        warnings,
    })
}

/// BF target `g[1] ⊕ g*[D−2]`: `ω = ⟨δξ,δψ⟩`, `α = ⟨ξ,δψ⟩`, `Θ = ½⟨ξ,[ψ,ψ]⟩`,
/// `Qψ^a = ½ f^a_{bc} ψ^b ψ^c`, `Qξ_b = (−1)^D f^a_{bd} ξ_a ψ^d`.
pub fn bf(g: &LieAlgebra, dim: i32) -> Result<HamiltonianQManifold, AlgebraError> {
    if dim < 0 {
        return Err(AlgebraError::Invalid("BF theory needs D ≥ 0".into()));
    }
    let d = g.dim();
    let coords: Vec<(String, i32)> = indexed("ψ", d)
        .into_iter()
        .map(|n| (n, 1))
        .chain(indexed("ξ", d).into_iter().map(|n| (n, dim - 2)))
        .collect();
    let sp = GradedSpace::new(coords)?;
    let psi: Vec<usize> = (0..d).collect();
    let xi: Vec<usize> = (d..2 * d).collect();
    let mut comps = ce_components(&sp, g, &psi);
    let s = Gq::sign(dim % 2 != 0);
    for b in 0..d {
        comps.push((xi[b], bilinear(&sp, |a, dd| g.f(a, b, dd) * &s, &xi, &psi)));
    }
    let q = VectorField::from_pairs(&sp, comps, 1)?;
    let mut form = Poly::zero(&sp);
    let mut alpha = Poly::zero(&sp);
    let mut theta = Poly::zero(&sp);
    for a in 0..d {
        form = &form + &(&dvar(&sp, xi[a]) * &dvar(&sp, psi[a]));
        alpha = &alpha + &(&var(&sp, xi[a]) * &dvar(&sp, psi[a]));
        let br = bilinear(&sp, |b, c| g.f(a, b, c) * &Gq::ratio(1, 2), &psi, &psi);
        theta = &theta + &(&var(&sp, xi[a]) * &br);
    }
    let omega = if d == 0 {
        ConstantSymplectic::empty(&sp, dim - 1)
    } else {
        ConstantSymplectic::from_form(&form, dim - 1)?
    };
    let mut warnings = Vec::new();
    if !g.is_unimodular() {
        let tr: Vec<String> = g.ad_traces().iter().map(Gq::render).collect();
        warnings.push(format!("g is not unimodular: tr ad = [{}]", tr.join(",")));
    }
    Ok(HamiltonianQManifold {
        name: format!("bf({},D={dim})", g.name),
        space: sp,
        q,
        omega,
        alpha,
        theta,
        n: dim - 1,
        warnings,
    })
}

/// Poisson sigma model target `T*[1]M`: `ω = ⟨δp,δx⟩`, `α = ⟨p,δx⟩`, `Θ = ½ π^{ij} p_i p_j`,
/// `Q = {Θ, ·}`. `pi` entries may live over any space containing the `x` names.
pub fn poisson_sigma(x_names: &[&str], p_names: &[&str], pi: &[Vec<GradedPolynomial>]) -> Result<HamiltonianQManifold, AlgebraError> {
    let d = x_names.len();
    if p_names.len() != d || pi.len() != d || pi.iter().any(|r| r.len() != d) {
        return Err(AlgebraError::Invalid("Poisson sigma model data sizes disagree".into()));
    }
    let coords: Vec<(String, i32)> = x_names
        .iter()
        .map(|n| (n.to_string(), 0))
        .chain(p_names.iter().map(|n| (n.to_string(), 1)))
        .collect();
    let sp = GradedSpace::new(coords)?;
    let mut theta = Poly::zero(&sp);
    for i in 0..d {
        for j in 0..d {
            let pij = pi[i][j].embed(&sp)?;
            if &pij + &pi[j][i].embed(&sp)? != Poly::zero(&sp) {
                return Err(AlgebraError::Invalid(format!("bivector not antisymmetric at ({},{})", x_names[i], x_names[j])));
            }
            if !pij.is_zero() {
                theta = &theta + &(&pij * &(&var(&sp, d + i) * &var(&sp, d + j))).scale(&Gq::ratio(1, 2));
            }
        }
    }
    let mut form = Poly::zero(&sp);
    let mut alpha = Poly::zero(&sp);
    for i in 0..d {
        form = &form + &(&dvar(&sp, d + i) * &dvar(&sp, i));
        alpha = &alpha + &(&var(&sp, d + i) * &dvar(&sp, i));
    }
    let omega = if d == 0 {
        ConstantSymplectic::empty(&sp, 1)
    } else {
        ConstantSymplectic::from_form(&form, 1)?
    };
    let q = omega.hamiltonian_vf(&theta)?;
    let q = if q.is_zero() { VectorField::zero(&sp, 1) } else { q };
    Ok(HamiltonianQManifold {
        name: "poisson_sigma".into(),
        space: sp,
        q,
        omega,
        alpha,
        theta,
        n: 1,
        warnings: Vec::new(),
    })
}

/// Kirillov–Kostant–Souriau bivector on `g*`: `π^{ij} = f^k_{ij} x_k`, over a space of `x_names`.
pub fn lie_poisson(g: &LieAlgebra, x_names: &[&str]) -> Result<Vec<Vec<GradedPolynomial>>, AlgebraError> {
    let sp = GradedSpace::new(x_names.iter().map(|n| (n.to_string(), 0)))?;
    let d = g.dim();
    Ok((0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).fold(Poly::zero(&sp), |acc, k| &acc + &var(&sp, k).scale(g.f(k, i, j))))
                .collect()
        })
        .collect())
}

// ---------------------------------------------------------------------------
// example bundles

/// Multilinear operation entry: `op(e_{ins[0]}, …) ∋ coeff · e_out`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorEntry {
    pub out: usize,
    pub ins: Vec<usize>,
    pub coeff: Gq,
}

/// Module operation entry: `ρ_j(e_{psi[0]}, …; r_x) ∋ coeff · r_out`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleEntry {
    pub out: usize,
    pub psi: Vec<usize>,
    pub x: usize,
    pub coeff: Gq,
}

/// Expands one entry to all orderings of its inputs with the Koszul signs of
/// coordinates of the given degrees, so that `Σ_{orderings} c z^{b_1}⋯z^{b_m} / m!`
/// reproduces `c z^{b_1}⋯z^{b_m}`.
pub fn symmetrize(entry: &TensorEntry, coord_degrees: &[i32]) -> Vec<TensorEntry> {
    let m = entry.ins.len();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..m).collect();
    permutations(&mut perm, 0, &mut |p| {
        let ins: Vec<usize> = p.iter().map(|&i| entry.ins[i]).collect();
        let s = koszul_sign(&entry.ins, &ins, coord_degrees);
        out.push(TensorEntry {
            out: entry.out,
            ins,
            coeff: &entry.coeff * &Gq::sign(s),
        });
    });
    out
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Sign relating the ordered products `z^{from}` and `z^{to}` (same multiset).
fn koszul_sign(from: &[usize], to: &[usize], deg: &[i32]) -> bool {
    let mut cur = from.to_vec();
    let mut neg = false;
    for (i, &t) in to.iter().enumerate() {
        let j = (i..cur.len()).find(|&j| cur[j] == t).expect("same multiset");
        for k in (i..j).rev() {
            if deg[cur[k]].rem_euclid(2) == 1 && deg[cur[k + 1]].rem_euclid(2) == 1 {
                neg = !neg;
            }
            cur.swap(k, k + 1);
        }
    }
    neg
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// `Σ_entries coeff/m! · z^{ins…}` for one output index, with a coordinate map.
fn tensor_poly(sp: &Space, entries: &[TensorEntry], out: usize, coord: &dyn Fn(usize) -> usize) -> GradedPolynomial {
    let mut p = Poly::zero(sp);
    for e in entries.iter().filter(|e| e.out == out) {
        let raw = vec![(
            &e.coeff * &Gq::ratio(1, factorial(e.ins.len())),
            e.ins.iter().map(|&b| (coord(b) as VarId, 1)).collect(),
        )];
        p = &p + &Poly::canonicalize(sp, raw).expect("known coordinates");
    }
    p
}

fn check_pairing_shape(k: &[Vec<Gq>], m: usize) -> Result<(), AlgebraError> {
    if k.len() != m || k.iter().any(|r| r.len() != m) {
        return Err(AlgebraError::Invalid(format!("pairing must be {m}×{m}")));
    }
    Ok(())
}

/// Example (i): `g[1] × R[2k+1]` (or `R[2k]` for a symplectic pairing) with
/// `A = ⟨ρ(ψ)x, ∂_x⟩`, `ω′ = ½(δx,δx)`, `α′ = ½(x,δx)`, `Θ′ = ½(x,ρ(ψ)x)`.
pub fn orthogonal_module(g: &LieAlgebra, rho: &Representation, pairing: &[Vec<Gq>], k: i32, symplectic: bool) -> Result<TrivialHamQBundle, AlgebraError> {
    let m = rho.dim();
    check_pairing_shape(pairing, m)?;
    if rho.len() != g.dim() {
        return Err(AlgebraError::Invalid("representation size does not match the Lie algebra".into()));
    }
    let xdeg = if symplectic { 2 * k } else { 2 * k + 1 };
    let n_prime = 2 * xdeg;
    let base = chern_like_base(g)?;
    let names: Vec<(String, i32)> = indexed("x", m).into_iter().map(|n| (n, xdeg)).collect();
    let (total, fiber) = TrivialHamQBundle::total_space(&base.space, &names)?;
    let psi: Vec<usize> = (0..g.dim()).collect();
    let mut comps = Vec::new();
    for i in 0..m {
        let c = bilinear(&total, |a, j| rho.matrix(a).get(i, j).clone(), &psi, &fiber);
        comps.push((fiber[i], c));
    }
    let a = VectorField::from_pairs(&total, comps, 1)?;
    let omega_prime = ConstantSymplectic::from_matrix(&total, fiber.clone(), pairing.to_vec(), n_prime)?;
    let mut alpha = Poly::zero(&total);
    let mut theta = Poly::zero(&total);
    for i in 0..m {
        for j in 0..m {
            if pairing[i][j].is_zero() {
                continue;
            }
            let h = &pairing[i][j] * &Gq::ratio(1, 2);
            alpha = &alpha + &(&var(&total, fiber[i]) * &dvar(&total, fiber[j])).scale(&h);
            // ρ(ψ)x in slot j: Σ ρ_a^j_l ψ^a x^l
            let rx = bilinear(&total, |aa, l| rho.matrix(aa).get(j, l).clone(), &psi, &fiber);
            theta = &theta + &(&var(&total, fiber[i]) * &rx).scale(&h);
        }
    }
    let mut extra = vec![AxiomCheck::required(
        "rho_homomorphism",
        Residual::Entries(
            rho.homomorphism_violations(g)
                .iter()
                .map(|(b, c, d)| format!("[ρ{b},ρ{c}]-f·ρ = {}", d.render()))
                .collect(),
        ),
    )];
    extra.push(AxiomCheck::required(
        "rho_preserves_pairing",
        Residual::Entries(if rho.preserves(pairing) {
            vec![]
        } else {
            vec!["ρ_a^T K + K ρ_a ≠ 0".into()]
        }),
    ));
    Ok(TrivialHamQBundle {
        name: format!("orthogonal_module({},k={k}{})", g.name, if symplectic { ",symplectic" } else { "" }),
        base: base.q_manifold(),
        base_omega: None,
        total,
        fiber,
        a,
        omega_prime,
        alpha_prime: alpha,
        theta_prime: theta,
        n_prime,
        warnings: Vec::new(),
        extra,
    })
}

/// `g[1]` with its Chevalley–Eilenberg differential (no pairing needed).
fn chern_like_base(g: &LieAlgebra) -> Result<HamiltonianQManifold, AlgebraError> {
    let sp = GradedSpace::new(indexed("ψ", g.dim()).into_iter().map(|n| (n, 1)))?;
    let psi: Vec<usize> = (0..g.dim()).collect();
    let q = VectorField::from_pairs(&sp, ce_components(&sp, g, &psi), 1)?;
    Ok(HamiltonianQManifold {
        name: format!("g[1]({})", g.name),
        omega: ConstantSymplectic::empty(&sp, 2),
        alpha: Poly::zero(&sp),
        theta: Poly::zero(&sp),
        space: sp,
        q,
        n: 2,
        warnings: Vec::new(),
    })
}

/// Data for example (ii): an L∞ algebra `g` and an L∞ module `R` with pairing of degree `q`.
#[derive(Clone, Debug)]
pub struct LinftyModuleData {
    /// Degrees of the basis of `g`; `ψ^a` has degree `1 − d_a`.
    pub g_degrees: Vec<i32>,
    /// All orderings of each `l_j` entry (see [`symmetrize`]).
    pub l: Vec<TensorEntry>,
    /// Degrees of the basis of `R`; `x^i` has degree `2k+1 − e_i`.
    pub r_degrees: Vec<i32>,
    pub k: i32,
    pub q: i32,
    pub pairing: Vec<Vec<Gq>>,
    /// All orderings of the `ψ`-inputs of each `ρ_j` entry.
    pub rho: Vec<ModuleEntry>,
    /// Largest arity supplied for `l_j` and `ρ_j`.
    pub max_arity: usize,
}

/// Example (ii).
pub fn linfty_module(data: &LinftyModuleData) -> Result<TrivialHamQBundle, AlgebraError> {
    let dg = data.g_degrees.len();
    let m = data.r_degrees.len();
    check_pairing_shape(&data.pairing, m)?;
    let n_prime = 4 * data.k + 2 + data.q;
    if let Some(e) = data.l.iter().find(|e| e.ins.len() > data.max_arity) {
        return Err(AlgebraError::Invalid(format!(
            "l entry of arity {} exceeds max arity {}",
            e.ins.len(),
            data.max_arity
        )));
    }
    if let Some(e) = data.rho.iter().find(|e| e.psi.len() > data.max_arity) {
        return Err(AlgebraError::Invalid(format!(
            "ρ entry of arity {} exceeds max arity {}",
            e.psi.len(),
            data.max_arity
        )));
    }
    let base_sp = GradedSpace::new(indexed("ψ", dg).into_iter().zip(&data.g_degrees).map(|(n, d)| (n, 1 - d)))?;
    let qcomps: Vec<(usize, GradedPolynomial)> = (0..dg).map(|a| (a, tensor_poly(&base_sp, &data.l, a, &|b| b))).collect();
    let q = VectorField::from_pairs(&base_sp, qcomps, 1)?;
    let names: Vec<(String, i32)> = indexed("x", m).into_iter().zip(&data.r_degrees).map(|(n, e)| (n, 2 * data.k + 1 - e)).collect();
    let (total, fiber) = TrivialHamQBundle::total_space(&base_sp, &names)?;
    // ρ(ψ…;x)^i as polynomials
    let rho_poly = |i: usize| {
        let mut p = Poly::zero(&total);
        for e in data.rho.iter().filter(|e| e.out == i) {
            let mut vars: Vec<(VarId, u32)> = e.psi.iter().map(|&b| (b as VarId, 1)).collect();
            vars.push((fiber[e.x] as VarId, 1));
            let c = &e.coeff * &Gq::ratio(1, factorial(e.psi.len()));
            p = &p + &Poly::canonicalize(&total, [(c, vars)]).expect("known coordinates");
        }
        p
    };
    let a = VectorField::from_pairs(&total, (0..m).map(|i| (fiber[i], rho_poly(i))).collect(), 1)?;
    let omega_prime = ConstantSymplectic::from_matrix(&total, fiber.clone(), data.pairing.clone(), n_prime)?;
    let mut alpha = Poly::zero(&total);
    let mut theta = Poly::zero(&total);
    for i in 0..m {
        for j in 0..m {
            if data.pairing[i][j].is_zero() {
                continue;
            }
            let h = &data.pairing[i][j] * &Gq::ratio(1, 2);
            alpha = &alpha + &(&var(&total, fiber[i]) * &dvar(&total, fiber[j])).scale(&h);
            theta = &theta + &(&var(&total, fiber[i]) * &rho_poly(j)).scale(&h);
        }
    }
    let mut extra = Vec::new();
    // L∞ relations on g: ψ-polynomial-degree parts of Q².
    let qq = lie_bracket(&q, &q)?.scale(&Gq::ratio(1, 2));
    // Relation n contains l_i∘l_j with i + j = n + 1; an omitted l_i (i > K) can only
    // enter next to a present l_j with j ≤ n − K.
    let kk = data.max_arity;
    let l_ar: Vec<usize> = data.l.iter().filter(|e| !e.coeff.is_zero()).map(|e| e.ins.len()).collect();
    let r_ar: Vec<usize> = data.rho.iter().filter(|e| !e.coeff.is_zero()).map(|e| e.psi.len()).collect();
    let l_ok = |n: usize| !l_ar.iter().any(|&j| j + kk <= n);
    let (checked, unverifiable) = split_by_arity(&qq, &l_ok, &(0..dg).collect::<Vec<_>>());
    extra.push(AxiomCheck::required("linfty_relations", Residual::Entries(checked)));
    let qt = q.embed(&total)?;
    let mr = lie_bracket(&qt, &a)?.try_add(&lie_bracket(&a, &a)?.scale(&Gq::ratio(1, 2)))?;
    // Module relation of ψ-degree d: ρ_i∘ρ_j (i + j = d) and ρ_i(l_j(…), …) (i + j = d + 1).
    let m_ok = |d: usize| l_ok(d + 1) && !r_ar.iter().any(|&j| j + kk < d) && !r_ar.iter().any(|&i| i >= 1 && i + kk <= d);
    let (mchecked, munver) = split_by_arity(&mr, &m_ok, &(0..dg).collect::<Vec<_>>());
    extra.push(AxiomCheck::required("module_relations", Residual::Entries(mchecked)));
    let mut unver: Vec<String> = unverifiable.into_iter().chain(munver).collect();
    unver.sort();
    unver.dedup();
    extra.push(AxiomCheck::advisory("unverifiable_relations", Residual::Entries(unver)));
    Ok(TrivialHamQBundle {
        name: format!("linfty_module(k={},q={})", data.k, data.q),
        base: QManifold { space: base_sp, q },
        base_omega: None,
        total,
        fiber,
        a,
        omega_prime,
        alpha_prime: alpha,
        theta_prime: theta,
        n_prime,
        warnings: Vec::new(),
        extra,
    })
}

/// Splits a field's nonzero components by polynomial degree in the `psi` coordinates
/// into failures (degree verifiable) and unverifiable entries, where omitted higher
/// operations would contribute.
fn split_by_arity(x: &VectorField, verifiable: &dyn Fn(usize) -> bool, psi: &[usize]) -> (Vec<String>, Vec<String>) {
    let sp = x.space();
    let mut bad = Vec::new();
    let mut unver = Vec::new();
    for (c, comp) in x.components().iter().enumerate() {
        for (mono, coeff) in comp.terms() {
            let arity: u32 = mono.0.iter().filter(|(v, _)| psi.contains(&(*v as usize))).map(|(_, e)| e).sum();
            let arity = arity as usize;
            let s = format!("{}: {}*{}", sp.coords()[c].name, coeff.render(), mono.render(sp));
            if verifiable(arity) {
                bad.push(s);
            } else {
                unver.push(format!("arity {arity} relation at {}", sp.coords()[c].name));
            }
        }
    }
    (bad, unver)
}

/// Data for example (iii): an L∞ algebra `h` with ideal `I` spanned by basis vectors.
#[derive(Clone, Debug)]
pub struct LinftyIdealData {
    pub h_degrees: Vec<i32>,
    /// Basis indices spanning `I`; the others span the chosen complement.
    pub ideal: Vec<usize>,
    /// All orderings of each `λ_j` entry.
    pub lambda: Vec<TensorEntry>,
    /// Pairing on `I` (indexed in the order of `ideal`), of degree `q`.
    pub pairing: Vec<Vec<Gq>>,
    pub q: i32,
}

/// Example (iii): base `(h/I)[1]`, fiber `I[1]`.
pub fn linfty_ideal(data: &LinftyIdealData) -> Result<TrivialHamQBundle, AlgebraError> {
    let dh = data.h_degrees.len();
    let m = data.ideal.len();
    check_pairing_shape(&data.pairing, m)?;
    let comp: Vec<usize> = (0..dh).filter(|b| !data.ideal.contains(b)).collect();
    let n_prime = 2 + data.q;
    let base_sp = GradedSpace::new(indexed("ψ", comp.len()).into_iter().zip(comp.iter().map(|&b| 1 - data.h_degrees[b])))?;
    let names: Vec<(String, i32)> = indexed("x", m).into_iter().zip(data.ideal.iter().map(|&b| 1 - data.h_degrees[b])).collect();
    let (total, fiber) = TrivialHamQBundle::total_space(&base_sp, &names)?;
    // h-basis index → total coordinate
    let coord = |b: usize| -> usize {
        match data.ideal.iter().position(|&i| i == b) {
            Some(k) => fiber[k],
            None => comp.iter().position(|&c| c == b).expect("complement"),
        }
    };
    let base_entries: Vec<TensorEntry> = data.lambda.iter().filter(|e| e.ins.iter().all(|b| !data.ideal.contains(b))).cloned().collect();
    let qcomps: Vec<(usize, GradedPolynomial)> = comp
        .iter()
        .enumerate()
        .map(|(k, &c)| (k, tensor_poly(&base_sp, &base_entries, c, &|b| comp.iter().position(|&x| x == b).unwrap())))
        .collect();
    let q = VectorField::from_pairs(&base_sp, qcomps, 1)?;
    let a = VectorField::from_pairs(
        &total,
        data.ideal
            .iter()
            .enumerate()
            .map(|(k, &i)| (fiber[k], tensor_poly(&total, &data.lambda, i, &coord)))
            .collect(),
        1,
    )?;
    let omega_prime = ConstantSymplectic::from_matrix(&total, fiber.clone(), data.pairing.clone(), n_prime)?;
    let mut alpha = Poly::zero(&total);
    let mut theta = Poly::zero(&total);
    for i in 0..m {
        for j in 0..m {
            if data.pairing[i][j].is_zero() {
                continue;
            }
            let h = &data.pairing[i][j] * &Gq::ratio(1, 2);
            alpha = &alpha + &(&var(&total, fiber[i]) * &dvar(&total, fiber[j])).scale(&h);
            for e in data.lambda.iter().filter(|e| e.out == data.ideal[j]) {
                // 1/(j!(k+1)!) per pattern; a pattern is spread over m!/(j!k!) orderings
                let kx = e.ins.iter().filter(|b| data.ideal.contains(b)).count();
                let c = &(&e.coeff * &data.pairing[i][j]) * &Gq::ratio(1, factorial(e.ins.len()) * (kx as i64 + 1));
                let mut vars = vec![(fiber[i] as VarId, 1)];
                vars.extend(e.ins.iter().map(|&b| (coord(b) as VarId, 1)));
                theta = &theta + &Poly::canonicalize(&total, [(c, vars)])?;
            }
        }
    }
    let mut extra = Vec::new();
    // ideal property
    let leaks: Vec<String> = data
        .lambda
        .iter()
        .filter(|e| e.ins.iter().any(|b| data.ideal.contains(b)) && !data.ideal.contains(&e.out) && !e.coeff.is_zero())
        .map(|e| format!("λ{:?} -> e{}", e.ins, e.out))
        .collect();
    extra.push(AxiomCheck::required("ideal", Residual::Entries(leaks)));
    // L∞ relations on h
    let h_sp = GradedSpace::new(indexed("z", dh).into_iter().zip(data.h_degrees.iter().map(|d| 1 - d)))?;
    let qh = VectorField::from_pairs(&h_sp, (0..dh).map(|c| (c, tensor_poly(&h_sp, &data.lambda, c, &|b| b))).collect(), 1)?;
    extra.push(AxiomCheck::required(
        "linfty_relations",
        Residual::Field(lie_bracket(&qh, &qh)?.scale(&Gq::ratio(1, 2))),
    ));
    let (full, on_i) = cyclicity_residuals(data)?;
    extra.push(AxiomCheck::advisory("cyclic_on_h", Residual::Poly(full)));
    extra.push(AxiomCheck::advisory("cyclic_on_I", Residual::Poly(on_i)));
    Ok(TrivialHamQBundle {
        name: format!("linfty_ideal(q={})", data.q),
        base: QManifold { space: base_sp, q },
        base_omega: None,
        total,
        fiber,
        a,
        omega_prime,
        alpha_prime: alpha,
        theta_prime: theta,
        n_prime,
        warnings: Vec::new(),
        extra,
    })
}

/// Cyclicity of `(u, λ_m(z,…,z))` with the pairing extended by zero: `F(u,z)` must equal
/// its polarization `1/(m+1) Σ_b u^b ∂_{z^b} F(z,z)`. Returns the residual on all of `h`
/// and the residual with every argument restricted to `I`.
fn cyclicity_residuals(data: &LinftyIdealData) -> Result<(GradedPolynomial, GradedPolynomial), AlgebraError> {
    let dh = data.h_degrees.len();
    let coords: Vec<(String, i32)> = indexed("z", dh)
        .into_iter()
        .zip(data.h_degrees.iter().map(|d| 1 - d))
        .chain(indexed("u", dh).into_iter().zip(data.h_degrees.iter().map(|d| 1 - d)))
        .collect();
    let sp = GradedSpace::new(coords)?;
    let mut arities: Vec<usize> = data.lambda.iter().map(|e| e.ins.len()).collect();
    arities.sort_unstable();
    arities.dedup();
    let mut residual = Poly::zero(&sp);
    for &m in &arities {
        let mut f = Poly::zero(&sp);
        for (i, &bi) in data.ideal.iter().enumerate() {
            for (j, &bj) in data.ideal.iter().enumerate() {
                if data.pairing[i][j].is_zero() {
                    continue;
                }
                for e in data.lambda.iter().filter(|e| e.out == bj && e.ins.len() == m) {
                    let mut vars = vec![((dh + bi) as VarId, 1)];
                    vars.extend(e.ins.iter().map(|&b| (b as VarId, 1)));
                    let c = &e.coeff * &data.pairing[i][j];
                    f = &f + &Poly::canonicalize(&sp, [(c, vars)])?;
                }
            }
        }
        // F(z,z): substitute u → z
        let fzz = substitute_u(&f, dh)?;
        let mut pol = Poly::zero(&sp);
        for b in 0..dh {
            let d = fzz.left_derivative(b as VarId);
            if !d.is_zero() {
                pol = &pol + &(&var(&sp, dh + b) * &d);
            }
        }
        residual = &residual + &(&f - &pol.scale(&Gq::ratio(1, m as i64 + 1)));
    }
    let non_ideal: Vec<VarId> = (0..dh)
        .filter(|b| !data.ideal.contains(b))
        .flat_map(|b| [b as VarId, (dh + b) as VarId])
        .collect();
    let on_i = residual.set_zero(&non_ideal);
    Ok((residual, on_i))
}

fn substitute_u(f: &GradedPolynomial, dh: usize) -> Result<GradedPolynomial, AlgebraError> {
    let sp = f.space();
    let raw: Vec<(Gq, Vec<(VarId, u32)>)> = f
        .terms()
        .map(|(m, c)| {
            (
                c.clone(),
                m.0.iter()
                    .map(|&(v, e)| (if (v as usize) >= dh && (v as usize) < 2 * dh { v - dh as VarId } else { v }, e))
                    .collect(),
            )
        })
        .collect();
    Poly::canonicalize(sp, raw)
}

/// Data for example (iv): linear symplectic `R^{2m}` with quadratic moment map.
#[derive(Clone, Debug)]
pub struct MomentMapData {
    pub g: LieAlgebra,
    /// Names of the degree-0 phase-space coordinates.
    pub y_names: Vec<String>,
    /// `ω_M = ½ W_{ij} δy^i δy^j`.
    pub w: Vec<Vec<Gq>>,
    /// Moment map components, over any space containing `y_names`.
    pub mu: Vec<GradedPolynomial>,
}

/// Example (iv): `A = {⟨ψ,μ⟩, ·}`, `ω′ = ω_M`, `α′ = ½ W_{ij} y^i δy^j`, `Θ′ = ⟨ψ,μ⟩`.
pub fn moment_map(data: &MomentMapData) -> Result<TrivialHamQBundle, AlgebraError> {
    let d = data.g.dim();
    if data.mu.len() != d {
        return Err(AlgebraError::Invalid("one moment map component per generator is required".into()));
    }
    check_pairing_shape(&data.w, data.y_names.len())?;
    let base = chern_like_base(&data.g)?;
    let names: Vec<(String, i32)> = data.y_names.iter().map(|n| (n.clone(), 0)).collect();
    let (total, fiber) = TrivialHamQBundle::total_space(&base.space, &names)?;
    let omega_prime = ConstantSymplectic::from_matrix(&total, fiber.clone(), data.w.clone(), 0)?;
    let mu: Vec<GradedPolynomial> = data.mu.iter().map(|p| p.embed(&total)).collect::<Result<_, _>>()?;
    let mut theta = Poly::zero(&total);
    for (a, m) in mu.iter().enumerate() {
        theta = &theta + &(&var(&total, a) * m);
    }
    let a = omega_prime.hamiltonian_vf(&theta)?;
    let a = if a.is_zero() { VectorField::zero(&total, 1) } else { a };
    let mut alpha = Poly::zero(&total);
    for (i, &fi) in fiber.iter().enumerate() {
        for (j, &fj) in fiber.iter().enumerate() {
            if !data.w[i][j].is_zero() {
                alpha = &alpha + &(&var(&total, fi) * &dvar(&total, fj)).scale(&(&data.w[i][j] * &Gq::ratio(1, 2)));
            }
        }
    }
    // {μ_b, μ_c} + f^a_{bc} μ_a = 0 is the form of equivariance the fiber CME requires.
    let mut eq = Vec::new();
    for b in 0..d {
        for c in b + 1..d {
            let mut r = omega_prime.bracket(&mu[b], &mu[c])?;
            for (a, m) in mu.iter().enumerate() {
                r = &r + &m.scale(data.g.f(a, b, c));
            }
            if !r.is_zero() {
                eq.push(format!("({b},{c}): {}", r.render()));
            }
        }
    }
    let extra = vec![AxiomCheck::required("equivariance", Residual::Entries(eq))];
    Ok(TrivialHamQBundle {
        name: format!("moment_map({})", data.g.name),
        base: base.q_manifold(),
        base_omega: None,
        total,
        fiber,
        a,
        omega_prime,
        alpha_prime: alpha,
        theta_prime: theta,
        n_prime: 0,
        warnings: Vec::new(),
        extra,
    })
}

/// Example (v): fiber a point, `Θ′ = θ`, degree `p − 1` with `p = |θ|`.
pub fn point_fiber(
    base: &QManifold,
    base_omega: Option<&ConstantSymplectic>,
    theta: &GradedPolynomial,
    p: Option<i32>,
) -> Result<TrivialHamQBundle, AlgebraError> {
    let theta = theta.embed(&base.space)?;
    let p = match (theta.grade_of(), p) {
        (Grade::Homogeneous { internal, form: 0 }, Some(p)) if internal != p => {
            return Err(AlgebraError::Invalid(format!("θ has degree {internal}, declared {p}")))
        }
        (Grade::Homogeneous { internal, form: 0 }, _) => internal,
        (Grade::Zero, Some(p)) => p,
        (Grade::Zero, None) => 0,
        _ => return Err(AlgebraError::Inhomogeneous),
    };
    let sp = base.space.clone();
    Ok(TrivialHamQBundle {
        name: "point_fiber".into(),
        base: base.clone(),
        base_omega: base_omega.cloned(),
        total: sp.clone(),
        fiber: Vec::new(),
        a: VectorField::zero(&sp, 1),
        omega_prime: ConstantSymplectic::empty(&sp, p - 1),
        alpha_prime: Poly::zero(&sp),
        theta_prime: theta,
        n_prime: p - 1,
        warnings: Vec::new(),
        extra: Vec::new(),
    })
}

/// Cattaneo–Rossi fiber `g ⊕ g*[D−3]` over the BF target:
/// `A = ⟨[ψ,q],∂_q⟩ + ⟨ad*_ψ p,∂_p⟩ + (−1)^D⟨ξ,∂_p⟩`, `ω′ = ⟨δp,δq⟩`, `α′ = ⟨p,δq⟩`,
/// `Θ′ = ⟨p,[ψ,q]⟩ + ⟨ξ,q⟩`.
pub fn cattaneo_rossi(g: &LieAlgebra, dim: i32) -> Result<TrivialHamQBundle, AlgebraError> {
    let base = bf(g, dim)?;
    let d = g.dim();
    let names: Vec<(String, i32)> = indexed("q", d)
        .into_iter()
        .map(|n| (n, 0))
        .chain(indexed("p", d).into_iter().map(|n| (n, dim - 3)))
        .collect();
    let (total, fiber) = TrivialHamQBundle::total_space(&base.space, &names)?;
    let psi: Vec<usize> = (0..d).collect();
    let xi: Vec<usize> = (d..2 * d).collect();
    let qc: Vec<usize> = fiber[..d].to_vec();
    let pc: Vec<usize> = fiber[d..].to_vec();
    let sd = Gq::sign(dim % 2 != 0);
    let mut comps = Vec::new();
    for a in 0..d {
        comps.push((qc[a], bilinear(&total, |b, c| g.f(a, b, c).clone(), &psi, &qc)));
    }
    // ad*_ψ p term: (−1)^D f^a_{cb} p_a ψ^c
    for b in 0..d {
        let ad = bilinear(&total, |a, c| g.f(a, c, b) * &ad_star_sign(dim), &pc, &psi);
        comps.push((pc[b], &ad + &var(&total, xi[b]).scale(&sd)));
    }
    let a = VectorField::from_pairs(&total, comps, 1)?;
    let mut form = Poly::zero(&total);
    let mut alpha = Poly::zero(&total);
    let mut theta = Poly::zero(&total);
    for a in 0..d {
        form = &form + &(&dvar(&total, pc[a]) * &dvar(&total, qc[a]));
        alpha = &alpha + &(&var(&total, pc[a]) * &dvar(&total, qc[a]));
        let br = bilinear(&total, |b, c| g.f(a, b, c).clone(), &psi, &qc);
        theta = &theta + &(&var(&total, pc[a]) * &br);
        theta = &theta + &(&var(&total, xi[a]) * &var(&total, qc[a]));
    }
    let omega_prime = if d == 0 {
        ConstantSymplectic::empty(&total, dim - 3)
    } else {
        ConstantSymplectic::from_form(&form, dim - 3)?
    };
    Ok(TrivialHamQBundle {
        name: format!("cattaneo_rossi({},D={dim})", g.name),
        base: base.q_manifold(),
        base_omega: Some(base.omega.clone()),
        total,
        fiber,
        a,
        omega_prime,
        alpha_prime: alpha,
        theta_prime: theta,
        n_prime: dim - 3,
        warnings: base.warnings.clone(),
        extra: Vec::new(),
    })
}

/// `(−1)^D`, matching the coadjoint term of the BF differential.
fn ad_star_sign(dim: i32) -> Gq {
    Gq::sign(dim % 2 != 0)
}
