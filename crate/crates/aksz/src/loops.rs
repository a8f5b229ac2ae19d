//! Holonomies, Wilson loops, torsion and operator-valued target checks.
//!
//! A lattice loop has `N` edges; edge `k` runs from site `k` to site `k+1`
//! (site `N+1` is site `1`) and carries the transport `U_k = exp(ρ(a_k))`.
//! The holonomy based at site 1 is `W = U_N ··· U_1`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::AlgebraError;
use crate::geometry::{vf_apply, ShiftedCotangent};
use crate::lie::Representation;
use crate::linalg;
use crate::poly::{Grade, GradedPolynomial, MatrixPolynomial, Poly, Space, VarId};
use crate::qstructures::QManifold;
use crate::scalar::{Gq, QMatrix, Scalar};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance of the torsion comparison, relative to the Hadamard bound of `B`.
pub const TORSION_TOLERANCE: f64 = 1e-10;

/// Lie-algebra coefficients per edge.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeLoop {
    samples: Vec<Vec<Complex64>>,
}

impl LatticeLoop {
    pub fn new(samples: Vec<Vec<Complex64>>) -> Result<Self, AlgebraError> {
        let Some(first) = samples.first() else {
            return Err(AlgebraError::Invalid("a loop needs at least one edge".into()));
        };
        if let Some(s) = samples.iter().find(|s| s.len() != first.len()) {
            return Err(AlgebraError::DimensionMismatch {
                left: first.len(),
                right: s.len(),
            });
        }
        Ok(LatticeLoop { samples })
    }

    pub fn real(samples: &[Vec<f64>]) -> Result<Self, AlgebraError> {
        Self::new(samples.iter().map(|s| s.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect())
    }

    /// Midpoint edge integrals `a_k = a((k+½)/N)/N` of a connection on `[0,1]`.
    pub fn sampled(n: usize, a: impl Fn(f64) -> Vec<f64>) -> Result<Self, AlgebraError> {
        let h = 1.0 / n as f64;
        let samples: Vec<Vec<f64>> = (0..n).map(|k| a((k as f64 + 0.5) * h).into_iter().map(|x| x * h).collect()).collect();
        Self::real(&samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Number of Lie-algebra coefficients per edge.
    pub fn algebra_dim(&self) -> usize {
        self.samples[0].len()
    }

    pub fn samples(&self) -> &[Vec<Complex64>] {
        &self.samples
    }

    /// Same loop started at edge `k + 1`.
    pub fn rotated(&self, k: usize) -> Self {
        let mut s = self.samples.clone();
        s.rotate_left(k % self.samples.len());
        LatticeLoop { samples: s }
    }
}

pub fn float_matrix(m: &QMatrix) -> CMatrix {
    m.to_c64()
}

/// `ρ(a) = Σ a^i ρ_i` in floating point.
pub fn rho_of(rho: &Representation, a: &[Complex64]) -> Result<CMatrix, AlgebraError> {
    if a.len() != rho.len() {
        return Err(AlgebraError::DimensionMismatch {
            left: rho.len(),
            right: a.len(),
        });
    }
    let d = rho.dim();
    Ok(a.iter()
        .zip(rho.matrices())
        .fold(CMatrix::zeros(d, d), |acc, (x, m)| acc + float_matrix(m) * *x))
}

/// Parallel transports `U_k = exp(ρ(a_k))`.
pub fn transports(l: &LatticeLoop, rho: &Representation) -> Result<Vec<CMatrix>, AlgebraError> {
    l.samples.iter().map(|a| Ok(rho_of(rho, a)?.exp())).collect()
}

/// `U_N ··· U_1`.
pub fn ordered_product(us: &[CMatrix]) -> CMatrix {
    let d = us.first().map_or(0, |u| u.nrows());
    us.iter().fold(CMatrix::identity(d, d), |acc, u| u * acc)
}

pub fn holonomy(l: &LatticeLoop, rho: &Representation) -> Result<CMatrix, AlgebraError> {
    Ok(ordered_product(&transports(l, rho)?))
}

/// `tr W`.
pub fn wilson_loop_pexp(l: &LatticeLoop, rho: &Representation) -> Result<Complex64, AlgebraError> {
    Ok(holonomy(l, rho)?.trace())
}

/// Site-wise gauge transformation `U_k ↦ g_{k+1} U_k g_k⁻¹`.
pub fn gauge_transform(us: &[CMatrix], sites: &[CMatrix]) -> Result<Vec<CMatrix>, AlgebraError> {
    if us.len() != sites.len() {
        return Err(AlgebraError::DimensionMismatch {
            left: us.len(),
            right: sites.len(),
        });
    }
    let n = us.len();
    (0..n)
        .map(|k| {
            let inv = sites[k]
                .clone()
                .try_inverse()
                .ok_or_else(|| AlgebraError::Invalid(format!("gauge element at site {} is singular", k + 1)))?;
            Ok(&sites[(k + 1) % n] * &us[k] * inv)
        })
        .collect()
}

/// Block matrix `B` of the lattice action `Σ_k ⟨p_k, q_{k+1} − U_k q_k⟩ = pᵀ B q`.
pub fn lattice_operator(us: &[CMatrix]) -> CMatrix {
    let n = us.len();
    let d = us.first().map_or(0, |u| u.nrows());
    let mut b = CMatrix::zeros(n * d, n * d);
    for (k, u) in us.iter().enumerate() {
        let next = (k + 1) % n;
        for r in 0..d {
            b[(k * d + r, next * d + r)] += Complex64::new(1.0, 0.0);
            for c in 0..d {
                b[(k * d + r, k * d + c)] -= u[(r, c)];
            }
        }
    }
    b
}

/// Global sign relating `det B` to `det(W − 1)`, fixed by `N = 1`, `dim R = 1`.
pub fn lattice_sign(n: usize, dim: usize) -> f64 {
    if (n * dim).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Torsion {
    pub direct: Complex64,
    pub lattice: Complex64,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Hadamard bound `Π_i ‖row_i‖ ≥ |det M|`, the scale for relative determinant comparisons.
pub fn hadamard_bound(m: &CMatrix) -> f64 {
    m.row_iter().map(|r| r.norm()).product()
}

/// `direct = det(W − 1)`; `lattice = (−1)^{N·dim R} det B`, the Berezin integral
/// `∫ Π_k dq_k dp_k exp(pᵀ B q)` with the normalization documented in CONVENTIONS.
pub fn torsion_from_transports(us: &[CMatrix]) -> Torsion {
    let w = ordered_product(us);
    let d = w.nrows();
    let direct = (w - CMatrix::identity(d, d)).determinant();
    let b = lattice_operator(us);
    let lattice = b.determinant() * lattice_sign(us.len(), d);
    let scale = hadamard_bound(&b).max(direct.norm()).max(lattice.norm()).max(f64::MIN_POSITIVE);
    Torsion {
        direct,
        lattice,
        matches: (direct - lattice).norm() <= TORSION_TOLERANCE * scale,
    }
}

pub fn torsion_1d(l: &LatticeLoop, rho: &Representation) -> Result<Torsion, AlgebraError> {
    if rho.dim() == 0 {
        return Err(AlgebraError::Invalid("torsion needs dim R ≥ 1".into()));
    }
    Ok(torsion_from_transports(&transports(l, rho)?))
}

// exact mode: group elements supplied per edge

pub fn ordered_product_exact(us: &[QMatrix]) -> Result<QMatrix, AlgebraError> {
    let d = us.first().map_or(0, |u| u.dim);
    us.iter().try_fold(QMatrix::identity(d), |acc, u| u.try_mul(&acc))
}

pub fn wilson_exact(us: &[QMatrix]) -> Result<Gq, AlgebraError> {
    Ok(ordered_product_exact(us)?.trace())
}

pub fn gauge_transform_exact(us: &[QMatrix], sites: &[QMatrix]) -> Result<Vec<QMatrix>, AlgebraError> {
    if us.len() != sites.len() {
        return Err(AlgebraError::DimensionMismatch {
            left: us.len(),
            right: sites.len(),
        });
    }
    let n = us.len();
    (0..n)
        .map(|k| {
            let inv = linalg::inverse(&sites[k].to_rows()).ok_or_else(|| AlgebraError::Invalid(format!("gauge element at site {} is singular", k + 1)))?;
            sites[(k + 1) % n].try_mul(&us[k])?.try_mul(&QMatrix::from_rows(inv)?)
        })
        .collect()
}

pub fn lattice_operator_exact(us: &[QMatrix]) -> Vec<Vec<Gq>> {
    let n = us.len();
    let d = us.first().map_or(0, |u| u.dim);
    let mut b = vec![vec![Gq::zero(); n * d]; n * d];
    for (k, u) in us.iter().enumerate() {
        let next = (k + 1) % n;
        for r in 0..d {
            b[k * d + r][next * d + r] += &Gq::one();
            for c in 0..d {
                b[k * d + r][k * d + c] = &b[k * d + r][k * d + c] - u.get(r, c);
            }
        }
    }
    b
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactTorsion {
    pub direct: Gq,
    pub lattice: Gq,
}

impl ExactTorsion {
    pub fn matches(&self) -> bool {
        self.direct == self.lattice
    }
}

pub fn torsion_exact(us: &[QMatrix]) -> Result<ExactTorsion, AlgebraError> {
    let w = ordered_product_exact(us)?;
    let direct = w.try_add(&QMatrix::identity(w.dim).neg())?.det();
    let mut lattice = linalg::det(&lattice_operator_exact(us));
    if lattice_sign(us.len(), w.dim) < 0.0 {
        lattice = -lattice;
    }
    Ok(ExactTorsion { direct, lattice })
}

// operator-valued target data

/// `Θ̂′` over a base Q-manifold, with coefficients in `End(H)`.
#[derive(Clone, Debug)]
pub struct QuantizedFiber {
    pub base: QManifold,
    pub h_dim: usize,
    pub theta_hat: MatrixPolynomial,
}

impl QuantizedFiber {
    pub fn new(base: &QManifold, h_dim: usize, theta_hat: &MatrixPolynomial) -> Result<Self, AlgebraError> {
        let theta_hat = theta_hat.embed(&base.space)?;
        match theta_hat.grade_of() {
            Grade::Zero | Grade::Homogeneous { internal: 1, form: 0 } => {}
            Grade::Homogeneous { internal, form } => return Err(AlgebraError::Invalid(format!("Θ̂′ has degree ({internal},{form}), expected (1,0)"))),
            Grade::Mixed(_) => return Err(AlgebraError::Inhomogeneous),
        }
        if let Some((_, m)) = theta_hat.terms().find(|(_, m)| m.dim != h_dim) {
            return Err(AlgebraError::DimensionMismatch { left: h_dim, right: m.dim });
        }
        Ok(QuantizedFiber {
            base: base.clone(),
            h_dim,
            theta_hat,
        })
    }
}

/// `Θ̂′ = −i ψ^a μ̂_a` for odd coordinates `psi` of `space`.
pub fn moment_operator(space: &Space, psi: &[usize], mu_hat: &[QMatrix]) -> Result<MatrixPolynomial, AlgebraError> {
    if psi.len() != mu_hat.len() {
        return Err(AlgebraError::DimensionMismatch {
            left: psi.len(),
            right: mu_hat.len(),
        });
    }
    let mut out = Poly::zero(space);
    for (&a, m) in psi.iter().zip(mu_hat) {
        out = out.try_add(&Poly::var(space, a as VarId).with_matrix(&m.scale(&-Gq::i())))?;
    }
    Ok(out)
}

/// `QΘ̂′ + i(Θ̂′)²`.
pub fn check_quantized_fiber(qf: &QuantizedFiber) -> Result<MatrixPolynomial, AlgebraError> {
    let q_theta = vf_apply(&qf.base.q, &qf.theta_hat)?;
    let sq = qf.theta_hat.try_mul(&qf.theta_hat)?;
    q_theta.try_add(&sq.scale(&Gq::i()))
}

/// `[π, F̂] + i F̂∧F̂` with `F̂ = F̂^i ∂_i` read as the polyvector `F̂^i p_i`.
pub fn check_psm_f_hat(cot: &ShiftedCotangent, pi: &[Vec<GradedPolynomial>], f_hat: &[MatrixPolynomial]) -> Result<MatrixPolynomial, AlgebraError> {
    let fiber = cot.fiber();
    if f_hat.len() != fiber.len() {
        return Err(AlgebraError::Invalid(format!(
            "F̂ has {} components on a {}-dimensional base",
            f_hat.len(),
            fiber.len()
        )));
    }
    let dims: Vec<usize> = f_hat.iter().flat_map(|f| f.terms().map(|(_, m)| m.dim).collect::<Vec<_>>()).collect();
    if let Some(&d) = dims.first() {
        if let Some(&e) = dims.iter().find(|&&e| e != d) {
            return Err(AlgebraError::DimensionMismatch { left: d, right: e });
        }
    }
    let sp = cot.space();
    let bivector = cot.bivector(pi)?;
    let mut f = Poly::zero(sp);
    for (fi, &p) in f_hat.iter().zip(fiber) {
        f = f.try_add(&Poly::var(sp, p as VarId).times(&fi.embed(sp)?)?)?;
    }
    let bracket = cot.schouten(&bivector, &f)?;
    bracket.try_add(&f.try_mul(&f)?.scale(&Gq::i()))
}

// point observables

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointObservable {
    pub gauge_ok: bool,
    pub value: Complex64,
}

/// `Qθ = 0` and `e^{iθ(X0)}` from the degree-0 part of `θ`.
pub fn point_observable(base: &QManifold, theta: &GradedPolynomial, x0: &BTreeMap<String, Complex64>, p: Option<i32>) -> Result<PointObservable, AlgebraError> {
    let theta = theta.embed(&base.space)?;
    match (theta.grade_of(), p) {
        (Grade::Homogeneous { internal, .. }, Some(p)) if internal != p => return Err(AlgebraError::Invalid(format!("θ has degree {internal}, declared {p}"))),
        (Grade::Mixed(_), _) => return Err(AlgebraError::Inhomogeneous),
        _ => {}
    }
    let gauge_ok = vf_apply(&base.q, &theta)?.is_zero();
    let value = match theta.internal_part(0).filter(|m| m.bidegree(&base.space).1 == 0).eval_numeric(x0)? {
        Scalar::Float(z) => z,
        other => other.to_c64().ok_or_else(|| AlgebraError::Invalid("θ does not evaluate to a scalar".into()))?,
    };
    Ok(PointObservable {
        gauge_ok,
        value: (Complex64::i() * value).exp(),
    })
}

/// `tr f(ρ(ξ))` as a polynomial in the coordinates `xi`, with `f = Σ c_k t^k`.
pub fn trace_function(space: &Space, xi: &[usize], rho: &Representation, coeffs: &[Gq]) -> Result<GradedPolynomial, AlgebraError> {
    if xi.len() != rho.len() {
        return Err(AlgebraError::DimensionMismatch {
            left: xi.len(),
            right: rho.len(),
        });
    }
    let d = rho.dim();
    let mut m: MatrixPolynomial = Poly::zero(space);
    for (&a, r) in xi.iter().zip(rho.matrices()) {
        m = m.try_add(&Poly::var(space, a as VarId).with_matrix(r))?;
    }
    let mut power: MatrixPolynomial = Poly::constant(space, QMatrix::identity(d));
    let mut f: MatrixPolynomial = Poly::zero(space);
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            power = power.try_mul(&m)?;
        }
        f = f.try_add(&power.scale(c))?;
    }
    let mut tr = Poly::zero(space);
    for i in 0..d {
        tr = &tr + &f.entry(i, i);
    }
    Ok(tr)
}

/// `tr f(M)` in floating point.
pub fn trace_function_value(coeffs: &[Complex64], m: &CMatrix) -> Complex64 {
    let d = m.nrows();
    let mut power = CMatrix::identity(d, d);
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            power = &power * m;
        }
        acc += power.trace() * c;
    }
    acc
}

/// Whether every `ρ_a` is traceless.
pub fn is_traceless(rho: &Representation) -> bool {
    rho.matrices().iter().all(|m| m.trace().is_zero())
}
