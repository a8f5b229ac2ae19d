//! Finite-dimensional Lie algebras by structure constants, and their matrix representations.

use crate::error::AlgebraError;
use crate::linalg;
use crate::scalar::{Gq, QMatrix};

/// Lie algebra with `[e_b, e_c] = f^a_{bc} e_a`, stored as `f[a][b][c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    pub name: String,
    f: Vec<Vec<Vec<Gq>>>,
}

impl LieAlgebra {
    /// Checks antisymmetry `f^a_{bc} = −f^a_{cb}`.
    pub fn from_tensor(name: impl Into<String>, f: Vec<Vec<Vec<Gq>>>) -> Result<Self, AlgebraError> {
        let d = f.len();
        if f.iter().any(|m| m.len() != d || m.iter().any(|r| r.len() != d)) {
            return Err(AlgebraError::Invalid("structure constants must form a d×d×d array".into()));
        }
        for (a, m) in f.iter().enumerate() {
            for b in 0..d {
                for c in 0..d {
                    if m[b][c] != -&m[c][b] {
                        return Err(AlgebraError::Invalid(format!(
                            "structure constants not antisymmetric: f^{a}_{b}{c} = {}, f^{a}_{c}{b} = {}",
                            m[b][c], m[c][b]
                        )));
                    }
                }
            }
        }
        Ok(LieAlgebra { name: name.into(), f })
    }

    /// From nonzero entries `(a, b, c, f^a_{bc})` with `b < c`; the partner `f^a_{cb}` is filled in.
    pub fn from_entries(name: impl Into<String>, dim: usize, entries: &[(usize, usize, usize, Gq)]) -> Self {
        let mut f = vec![vec![vec![Gq::zero(); dim]; dim]; dim];
        for (a, b, c, v) in entries {
            f[*a][*b][*c] = &f[*a][*b][*c] + v;
            f[*a][*c][*b] = &f[*a][*c][*b] - v;
        }
        LieAlgebra { name: name.into(), f }
    }

    pub fn abelian(dim: usize) -> Self {
        let name = if dim == 1 { "R".to_string() } else { format!("R^{dim}") };
        Self::from_entries(name, dim, &[])
    }

    /// `su(2) ≅ so(3)` with `f^a_{bc} = ε_{abc}`.
    pub fn su2() -> Self {
        Self::from_entries("su2", 3, &[(2, 0, 1, Gq::one()), (0, 1, 2, Gq::one()), (1, 2, 0, Gq::one())])
    }

    /// `so(4) ≅ su(2) ⊕ su(2)`.
    pub fn so4() -> Self {
        let mut g = Self::su2().direct_sum(&Self::su2());
        g.name = "so4".into();
        g
    }

    /// Two-dimensional non-unimodular algebra `[e_0, e_1] = e_1`.
    pub fn aff1() -> Self {
        Self::from_entries("aff1", 2, &[(1, 0, 1, Gq::one())])
    }

    /// Heisenberg algebra `[e_0, e_1] = e_2`.
    pub fn heisenberg() -> Self {
        Self::from_entries("heis3", 3, &[(2, 0, 1, Gq::one())])
    }

    pub fn direct_sum(&self, o: &LieAlgebra) -> LieAlgebra {
        let (d1, d) = (self.dim(), self.dim() + o.dim());
        let mut f = vec![vec![vec![Gq::zero(); d]; d]; d];
        for a in 0..d1 {
            for b in 0..d1 {
                for c in 0..d1 {
                    f[a][b][c] = self.f[a][b][c].clone();
                }
            }
        }
        for a in 0..o.dim() {
            for b in 0..o.dim() {
                for c in 0..o.dim() {
                    f[d1 + a][d1 + b][d1 + c] = o.f[a][b][c].clone();
                }
            }
        }
        LieAlgebra {
            name: format!("{}+{}", self.name, o.name),
            f,
        }
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    /// `f^a_{bc}`.
    pub fn f(&self, a: usize, b: usize, c: usize) -> &Gq {
        &self.f[a][b][c]
    }

    pub fn tensor(&self) -> &[Vec<Vec<Gq>>] {
        &self.f
    }

    pub fn is_abelian(&self) -> bool {
        self.f.iter().flatten().flatten().all(Gq::is_zero)
    }

    /// Adds `delta` to `f^a_{bc}` and subtracts it from `f^a_{cb}` (requires `b ≠ c`).
    pub fn perturbed(&self, a: usize, b: usize, c: usize, delta: &Gq) -> LieAlgebra {
        assert_ne!(b, c, "diagonal structure constants are fixed by antisymmetry");
        let mut f = self.f.clone();
        f[a][b][c] = &f[a][b][c] + delta;
        f[a][c][b] = &f[a][c][b] - delta;
        LieAlgebra {
            name: format!("{}~", self.name),
            f,
        }
    }

    pub fn bracket(&self, x: &[Gq], y: &[Gq]) -> Vec<Gq> {
        let d = self.dim();
        let mut out = vec![Gq::zero(); d];
        for b in 0..d {
            if x[b].is_zero() {
                continue;
            }
            for c in 0..d {
                if y[c].is_zero() {
                    continue;
                }
                let xy = &x[b] * &y[c];
                for (a, o) in out.iter_mut().enumerate() {
                    if !self.f[a][b][c].is_zero() {
                        *o += &(&xy * &self.f[a][b][c]);
                    }
                }
            }
        }
        out
    }

    /// Nonzero Jacobiator components `(a, b, c, d, J^a_{bcd})` with `b < c < d`.
    pub fn jacobi_violations(&self) -> Vec<(usize, usize, usize, usize, Gq)> {
        let n = self.dim();
        let mut out = Vec::new();
        for b in 0..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    for a in 0..n {
                        let mut s = Gq::zero();
                        for e in 0..n {
                            s += &(&self.f[e][b][c] * &self.f[a][e][d]);
                            s += &(&self.f[e][c][d] * &self.f[a][e][b]);
                            s += &(&self.f[e][d][b] * &self.f[a][e][c]);
                        }
                        if !s.is_zero() {
                            out.push((a, b, c, d, s));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn satisfies_jacobi(&self) -> bool {
        self.jacobi_violations().is_empty()
    }

    /// `tr ad_{e_b} = Σ_a f^a_{ba}` for each `b`.
    pub fn ad_traces(&self) -> Vec<Gq> {
        (0..self.dim())
            .map(|b| (0..self.dim()).fold(Gq::zero(), |acc, a| &acc + &self.f[a][b][a]))
            .collect()
    }

    pub fn is_unimodular(&self) -> bool {
        self.ad_traces().iter().all(Gq::is_zero)
    }

    /// `K_{bc} = tr(ad e_b ad e_c)`.
    pub fn killing_form(&self) -> Vec<Vec<Gq>> {
        let n = self.dim();
        let mut k = vec![vec![Gq::zero(); n]; n];
        for b in 0..n {
            for c in 0..n {
                let mut s = Gq::zero();
                for a in 0..n {
                    for d in 0..n {
                        s += &(&self.f[a][b][d] * &self.f[d][c][a]);
                    }
                }
                k[b][c] = s;
            }
        }
        k
    }

    /// Nonzero components of `k([e_b,e_c],e_d) + k(e_c,[e_b,e_d])`.
    pub fn invariance_violations(&self, k: &[Vec<Gq>]) -> Vec<(usize, usize, usize, Gq)> {
        let n = self.dim();
        let mut out = Vec::new();
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut s = Gq::zero();
                    for a in 0..n {
                        s += &(&self.f[a][b][c] * &k[a][d]);
                        s += &(&k[c][a] * &self.f[a][b][d]);
                    }
                    if !s.is_zero() {
                        out.push((b, c, d, s));
                    }
                }
            }
        }
        out
    }

    /// Identity pairing.
    pub fn euclidean_pairing(&self) -> Vec<Vec<Gq>> {
        identity(self.dim())
    }
}

pub(crate) fn identity(n: usize) -> Vec<Vec<Gq>> {
    (0..n).map(|r| (0..n).map(|c| if r == c { Gq::one() } else { Gq::zero() }).collect()).collect()
}

pub fn is_symmetric(k: &[Vec<Gq>]) -> bool {
    (0..k.len()).all(|r| (0..k.len()).all(|c| k[r][c] == k[c][r]))
}

pub fn is_nondegenerate(k: &[Vec<Gq>]) -> bool {
    !linalg::det(k).is_zero()
}

/// Matrices `ρ(e_a)` of a representation.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub name: String,
    mats: Vec<QMatrix>,
}

impl Representation {
    /// Checks `[ρ_b, ρ_c] = f^a_{bc} ρ_a`.
    pub fn new(name: impl Into<String>, g: &LieAlgebra, mats: Vec<QMatrix>) -> Result<Self, AlgebraError> {
        let r = Self::unchecked(name, mats)?;
        if r.mats.len() != g.dim() {
            return Err(AlgebraError::Invalid(format!(
                "{} matrices for a {}-dimensional algebra",
                r.mats.len(),
                g.dim()
            )));
        }
        if let Some((b, c, _)) = r.homomorphism_violations(g).first() {
            return Err(AlgebraError::Invalid(format!("not a representation: [ρ_{b}, ρ_{c}] ≠ f^a_{b}{c} ρ_a")));
        }
        Ok(r)
    }

    /// No homomorphism check; only equal sizes.
    pub fn unchecked(name: impl Into<String>, mats: Vec<QMatrix>) -> Result<Self, AlgebraError> {
        if let Some(m) = mats.first() {
            if let Some(o) = mats.iter().find(|o| o.dim != m.dim) {
                return Err(AlgebraError::DimensionMismatch { left: m.dim, right: o.dim });
            }
        }
        Ok(Representation { name: name.into(), mats })
    }

    /// Spin-½ of `su(2)`: `ρ_a = −(i/2) σ_a`.
    pub fn spin_half() -> Self {
        let h = Gq::complex((0, 1), (-1, 2));
        let z = Gq::zero;
        let s1 = vec![vec![z(), Gq::one()], vec![Gq::one(), z()]];
        let s2 = vec![vec![z(), -Gq::i()], vec![Gq::i(), z()]];
        let s3 = vec![vec![Gq::one(), z()], vec![z(), Gq::int(-1)]];
        let mats = [s1, s2, s3].into_iter().map(|s| QMatrix::from_rows(s).expect("square").scale(&h)).collect();
        Representation { name: "spin1/2".into(), mats }
    }

    /// Adjoint representation `(ρ_b)_{ac} = f^a_{bc}`.
    pub fn adjoint(g: &LieAlgebra) -> Self {
        let n = g.dim();
        let mats = (0..n)
            .map(|b| {
                let mut m = QMatrix::zeros(n);
                for a in 0..n {
                    for c in 0..n {
                        m.set(a, c, g.f(a, b, c).clone());
                    }
                }
                m
            })
            .collect();
        Representation {
            name: format!("ad({})", g.name),
            mats,
        }
    }

    /// Spin-1 of `su(2)`, realized as the adjoint (real antisymmetric generators).
    pub fn spin_one() -> Self {
        let mut r = Self::adjoint(&LieAlgebra::su2());
        r.name = "spin1".into();
        r
    }

    /// One-dimensional representation `ρ(e_a) = c_a`.
    pub fn scalar(weights: &[Gq]) -> Self {
        let mats = weights.iter().map(|w| QMatrix::from_rows(vec![vec![w.clone()]]).expect("1x1")).collect();
        Representation { name: "scalar".into(), mats }
    }

    pub fn dim(&self) -> usize {
        self.mats.first().map_or(0, |m| m.dim)
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn matrices(&self) -> &[QMatrix] {
        &self.mats
    }

    pub fn matrix(&self, a: usize) -> &QMatrix {
        &self.mats[a]
    }

    /// `ρ(x) = Σ x^a ρ_a`.
    pub fn apply(&self, x: &[Gq]) -> QMatrix {
        let mut m = QMatrix::zeros(self.dim());
        for (xa, r) in x.iter().zip(&self.mats) {
            if !xa.is_zero() {
                m = m.try_add(&r.scale(xa)).expect("equal sizes");
            }
        }
        m
    }

    /// Pairs `(b, c)` with `b < c` where `[ρ_b, ρ_c] − f^a_{bc} ρ_a ≠ 0`, with the defect.
    pub fn homomorphism_violations(&self, g: &LieAlgebra) -> Vec<(usize, usize, QMatrix)> {
        let n = self.mats.len().min(g.dim());
        let mut out = Vec::new();
        for b in 0..n {
            for c in b + 1..n {
                let mut d = self.mats[b].commutator(&self.mats[c]).expect("equal sizes");
                for a in 0..n {
                    if !g.f(a, b, c).is_zero() {
                        d = d.try_add(&self.mats[a].scale(&-g.f(a, b, c))).expect("equal sizes");
                    }
                }
                if !d.is_zero() {
                    out.push((b, c, d));
                }
            }
        }
        out
    }

    /// Replaces entry `(r, c)` of `ρ_a` by itself plus `delta`.
    pub fn perturbed(&self, a: usize, r: usize, c: usize, delta: &Gq) -> Self {
        let mut mats = self.mats.clone();
        let v = mats[a].get(r, c) + delta;
        mats[a].set(r, c, v);
        Representation {
            name: format!("{}~", self.name),
            mats,
        }
    }

    pub fn scaled(&self, s: &Gq) -> Self {
        Representation {
            name: self.name.clone(),
            mats: self.mats.iter().map(|m| m.scale(s)).collect(),
        }
    }

    /// Nonzero entries of `ρ_a^T k + k ρ_a` (antisymmetry with respect to `k`).
    pub fn preserves(&self, k: &[Vec<Gq>]) -> bool {
        let k = QMatrix::from_rows(k.to_vec()).expect("square pairing");
        self.mats
            .iter()
            .all(|m| m.transpose().try_mul(&k).and_then(|a| a.try_add(&k.try_mul(m)?)).is_ok_and(|s| s.is_zero()))
    }
}
