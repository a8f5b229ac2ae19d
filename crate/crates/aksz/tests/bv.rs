use aksz::bv::*;
use aksz::qstructures::*;
use aksz::*;
use proptest::prelude::*;

fn v(sp: &Space, name: &str) -> GradedPolynomial {
    Poly::named(sp, name).unwrap()
}

fn identity(d: usize) -> Vec<Vec<Gq>> {
    (0..d).map(|i| (0..d).map(|j| if i == j { Gq::one() } else { Gq::zero() }).collect()).collect()
}

/// Every monomial in the coordinates of `sp` of polynomial degree ≤ `max`.
fn all_monomials(sp: &Space, max: u32) -> Vec<GradedPolynomial> {
    fn go(sp: &Space, i: usize, left: u32, cur: GradedPolynomial, out: &mut Vec<GradedPolynomial>) {
        if i == sp.n() {
            out.push(cur);
            return;
        }
        let odd = sp.coord_degree(i) % 2 != 0;
        let top = if odd { left.min(1) } else { left };
        let x = Poly::var(sp, i as VarId);
        let mut m = cur;
        for e in 0..=top {
            if e > 0 {
                m = &m * &x;
            }
            go(sp, i + 1, left - e, m.clone(), out);
        }
    }
    let mut out = Vec::new();
    go(sp, 0, max, Poly::int(sp, 1), &mut out);
    out
}

fn pair_spaces() -> Vec<OddSymplecticSpace> {
    let names = [("x1", "ξ1"), ("x2", "ξ2"), ("x3", "ξ3"), ("x4", "ξ4")];
    let patterns: [&[i32]; 7] = [&[0], &[1], &[0, 1], &[-1, 2], &[0, 0, 1], &[1, -2, 0, 3], &[0, 1, 1, -1]];
    patterns
        .iter()
        .map(|degs| {
            let pairs: Vec<(&str, i32, &str)> = degs.iter().zip(names).map(|(&d, (x, xi))| (x, d, xi)).collect();
            OddSymplecticSpace::new(&pairs).unwrap()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Laplacian

#[test]
fn laplacian_single_pair() {
    for d in [0, 1, -1, 2] {
        let o = OddSymplecticSpace::new(&[("x", d, "ξ")]).unwrap();
        let sp = o.space();
        // Δ(xξ) = (−1)^{|x|}{x, ξ}; with ω = δξ δx this is +1
        assert_eq!(o.laplacian(&(&v(sp, "x") * &v(sp, "ξ"))).unwrap(), Poly::int(sp, 1));
        assert!(o.laplacian(&v(sp, "x")).unwrap().is_zero());
        assert!(o.laplacian(&v(sp, "ξ")).unwrap().is_zero());
        let br = o.bracket(&v(sp, "x"), &v(sp, "ξ")).unwrap();
        assert_eq!(br.constant_term(), Gq::sign(d % 2 != 0));
    }
}

#[test]
fn laplacian_squares_to_zero_exhaustively() {
    let mut count = 0;
    for o in pair_spaces() {
        for m in all_monomials(o.space(), 4) {
            let d2 = o.laplacian(&o.laplacian(&m).unwrap()).unwrap();
            assert!(d2.is_zero(), "Δ²({}) = {}", m.render(), d2.render());
            count += 1;
        }
    }
    assert!(count > 800, "{count}");
}

#[test]
fn laplacian_ignores_parameters() {
    let sp = GradedSpace::new([("x", 0), ("ξ", -1), ("t", 1)]).unwrap();
    let o = OddSymplecticSpace::within(&sp, &[("x", "ξ")]).unwrap();
    let f = &(&v(&sp, "t") * &v(&sp, "x")) * &v(&sp, "ξ");
    // Δ(t x ξ) = −t Δ(xξ): t is odd and sits to the left
    assert_eq!(o.laplacian(&f).unwrap(), v(&sp, "t").neg());
}

#[test]
fn odd_symplectic_space_validation() {
    let sp = GradedSpace::new([("x", 0), ("ξ", 0)]).unwrap();
    assert!(OddSymplecticSpace::within(&sp, &[("x", "ξ")]).is_err());
    let sp = GradedSpace::new([("x", 0), ("ξ", -1)]).unwrap();
    assert!(OddSymplecticSpace::within(&sp, &[("x", "ξ"), ("x", "ξ")]).is_err());
    assert!(OddSymplecticSpace::within(&sp, &[("x", "η")]).is_err());
    let o = OddSymplecticSpace::within(&sp, &[("x", "ξ")]).unwrap();
    assert_eq!(o.omega().degree(), -1);
}

fn random_poly_strategy(n_coords: usize) -> impl Strategy<Value = Vec<(i64, Vec<usize>)>> {
    prop::collection::vec((-3i64..=3, prop::collection::vec(0..n_coords, 0..4)), 1..5)
}

/// Homogeneous part of internal degree `deg` of a random polynomial.
fn build(sp: &Space, terms: &[(i64, Vec<usize>)], deg: i32) -> GradedPolynomial {
    let mut p = Poly::zero(sp);
    for (c, vars) in terms {
        let m = vars.iter().fold(Poly::int(sp, *c), |acc, &i| &acc * &Poly::var(sp, i as VarId));
        p = &p + &m;
    }
    p.internal_part(deg)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bv_algebra_identity(
        ft in random_poly_strategy(8), gt in random_poly_strategy(8),
        df in -3i32..=3, dg in -3i32..=3,
    ) {
        let o = &pair_spaces()[5];
        let sp = o.space();
        let f = build(sp, &ft, df);
        let g = build(sp, &gt, dg);
        let s = Gq::sign(df % 2 != 0);
        let lhs = o.laplacian(&(&f * &g)).unwrap();
        let rhs = &(&(&o.laplacian(&f).unwrap() * &g) + &(&f * &o.laplacian(&g).unwrap()).scale(&s))
            + &o.bracket(&f, &g).unwrap().scale(&s);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bv_stokes_on_odd_lagrangians(ft in random_poly_strategy(8), pattern in 0usize..3) {
        let o = &pair_spaces()[[5, 6, 3][pattern]];
        let sp = o.space();
        let mut f = Poly::zero(sp);
        for d in -4..=4 {
            f = &f + &build(sp, &ft, d);
        }
        let lap = o.laplacian(&f).unwrap();
        // L: every even member set to zero, every odd member integrated
        let mut zero = Vec::new();
        let mut odd = Vec::new();
        for &(a, b) in o.pairs() {
            let (e, od) = if sp.coord_degree(a) % 2 == 0 { (a, b) } else { (b, a) };
            zero.push(e as VarId);
            odd.push(od as VarId);
        }
        let restricted = lap.set_zero(&zero);
        prop_assert!(berezin_integrate(&restricted, &odd).unwrap().is_zero());
    }
}

// ---------------------------------------------------------------------------
// master equations

/// `S = ⟨ξ, D x⟩` on the complex `x³ → x² → x¹` (degrees 0, 1, 2):
/// `S = a ξ_3 x² + b ξ_2 x¹`, so that `Q x³ = a x²`, `Q x² = b x¹` and `D² ∝ ab`.
fn linear_theory(a: i64, b: i64) -> BVTheory {
    let o = OddSymplecticSpace::new(&[("x1", 2, "ξ1"), ("x2", 1, "ξ2"), ("x3", 0, "ξ3")]).unwrap();
    let sp = o.space().clone();
    let s = &(&v(&sp, "ξ3") * &v(&sp, "x2")).scale(&Gq::int(a)) + &(&v(&sp, "ξ2") * &v(&sp, "x1")).scale(&Gq::int(b));
    BVTheory::new(o, &s).unwrap()
}

#[test]
fn cme_linear_differential() {
    assert!(linear_theory(1, 0).cme_residual().unwrap().is_zero());
    assert!(linear_theory(0, 3).cme_residual().unwrap().is_zero());
    let bad = linear_theory(2, 3);
    let r = bad.cme_residual().unwrap();
    // {S,S} ∝ ⟨ξ, D² x⟩ = 6 ξ_3 x¹
    let sp = bad.space.space();
    let d2 = &v(sp, "ξ3") * &v(sp, "x1");
    assert_eq!(r.len(), 1);
    let c = r.terms().next().unwrap().1.clone();
    assert!(c == Gq::int(12) || c == Gq::int(-12), "{}", r.render());
    assert_eq!(r, d2.scale(&c));
    let zero = BVTheory::new(OddSymplecticSpace::new(&[("x", 0, "ξ")]).unwrap(), &Poly::zero(&GradedSpace::empty())).unwrap();
    assert!(zero.cme_residual().unwrap().is_zero());
    assert!(zero.qme_residual().unwrap().is_zero());
}

#[test]
fn odd_actions_have_vanishing_self_bracket() {
    let o = OddSymplecticSpace::new(&[("x1", 1, "ξ1"), ("x2", 1, "ξ2")]).unwrap();
    let sp = o.space().clone();
    let s = &(&v(&sp, "ξ1") * &v(&sp, "x2")) + &(&v(&sp, "ξ2") * &v(&sp, "x1"));
    assert!(BVTheory::unchecked(o, &s).unwrap().cme_residual().unwrap().is_zero());
}

#[test]
fn bv_action_must_have_degree_zero() {
    let o = OddSymplecticSpace::new(&[("x", 0, "ξ")]).unwrap();
    let s = &v(o.space(), "x") * &v(o.space(), "ξ");
    assert!(BVTheory::new(o, &s).is_err());
}

/// BF target with D = 0 as a BV theory on a point: pairs (ψ^a, ξ_a).
fn bf_point(g: &LieAlgebra) -> BVTheory {
    let t = bf(g, 0).unwrap();
    let d = g.dim();
    let names: Vec<(String, String)> = (1..=d).map(|a| (format!("ψ{a}"), format!("ξ{a}"))).collect();
    let pairs: Vec<(&str, &str)> = names.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    BVTheory::new(OddSymplecticSpace::within(&t.space, &pairs).unwrap(), &t.theta).unwrap()
}

#[test]
fn qme_bf_cubic() {
    let t = bf_point(&LieAlgebra::su2());
    assert!(t.cme_residual().unwrap().is_zero());
    assert!(t.qme_residual().unwrap().is_zero());
    assert!(bf_point(&LieAlgebra::so4()).qme_residual().unwrap().is_zero());
    // non-unimodular: CME holds, ΔS = ± tr ad_ψ ≠ 0
    let t = bf_point(&LieAlgebra::aff1());
    assert!(t.cme_residual().unwrap().is_zero());
    let lap = t.space.laplacian(&t.action).unwrap();
    let sp = t.space.space();
    assert!(lap == v(sp, "ψ1") || lap == v(sp, "ψ1").neg(), "{}", lap.render());
    assert_eq!(t.qme_residual().unwrap(), lap.scale(&Gq::i()).neg());
}

#[test]
fn qme_single_pair_quadratic() {
    let o = OddSymplecticSpace::new(&[("x", 0, "ξ")]).unwrap();
    let s = &v(o.space(), "x") * &v(o.space(), "ξ");
    let t = BVTheory::unchecked(o, &s).unwrap();
    let sp = t.space.space();
    // {xξ, xξ} = 2xξ·{x,ξ}-type terms cancel pairwise for this S
    let cme = t.cme_residual().unwrap();
    assert_eq!(t.qme_residual().unwrap(), &cme.scale(&Gq::ratio(1, 2)) - &Poly::constant(sp, Gq::i()));
}

#[test]
fn qme_quadratic_theory() {
    // ΔS = tr D = 0 for nilpotent D
    // ΔS = 0: S never pairs a coordinate with its own antifield
    let t = linear_theory(1, 0);
    assert!(t.space.laplacian(&t.action).unwrap().is_zero());
    assert!(t.qme_residual().unwrap().is_zero());
    assert!(!linear_theory(1, 1).qme_residual().unwrap().is_zero());
}

#[test]
fn delta_bv_basics() {
    let t = bf_point(&LieAlgebra::su2());
    let sp = t.space.space().clone();
    assert!(t.delta_bv(&Poly::int(&sp, 1)).unwrap().is_zero());
    for m in all_monomials(&sp, 3) {
        let dd = t.delta_bv(&t.delta_bv(&m).unwrap()).unwrap();
        assert!(dd.is_zero(), "δ²({}) = {}", m.render(), dd.render());
    }
    let zero = BVTheory::new(t.space.clone(), &Poly::zero(&sp)).unwrap();
    for m in all_monomials(&sp, 3) {
        assert_eq!(zero.delta_bv(&m).unwrap(), zero.space.laplacian(&m).unwrap().scale(&Gq::i()).neg());
    }
}

// ---------------------------------------------------------------------------
// pre-observables

fn cs_su2() -> HamiltonianQManifold {
    chern_simons(&LieAlgebra::su2(), &identity(3)).unwrap()
}

/// `⟨p, ρ(ψ) q⟩` with `q^i` of degree 1 and `p_i` of degree −2.
fn rep_pre_observable(ambient: QManifold, bv: Option<BVTheory>, rho: &Representation) -> PreObservable {
    let n = rho.dim();
    let names: Vec<(String, String)> = (1..=n).map(|i| (format!("q{i}"), format!("p{i}"))).collect();
    let pairs: Vec<(&str, i32, &str)> = names.iter().map(|(a, b)| (a.as_str(), 1, b.as_str())).collect();
    let joint = PreObservable::joint_space(&ambient.space, &pairs).unwrap();
    let mut s = Poly::zero(&joint);
    for (a, m) in rho.matrices().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let c = m.get(i, j);
                if !c.is_zero() {
                    let t = &(&v(&joint, &format!("p{}", i + 1)) * &v(&joint, &format!("ψ{}", a + 1))) * &v(&joint, &format!("q{}", j + 1));
                    s = &s + &t.scale(c);
                }
            }
        }
    }
    PreObservable::new(ambient, bv, &pairs, &s).unwrap()
}

#[test]
fn representation_pre_observable() {
    let g = LieAlgebra::su2();
    for rho in [Representation::spin_one(), Representation::spin_half()] {
        let p = rep_pre_observable(cs_su2().q_manifold(), None, &rho);
        assert!(p.check(Level::Classical).unwrap().is_valid());
        assert!(p.check(Level::SemiQuantum).unwrap().is_valid());
        assert!(p.check(Level::Quantum).is_err());
    }
    let bad = Representation::spin_one().perturbed(0, 1, 2, &Gq::one());
    assert!(!bad.homomorphism_violations(&g).is_empty());
    let p = rep_pre_observable(cs_su2().q_manifold(), None, &bad);
    assert!(!p.classical_residual().unwrap().is_zero());
}

#[test]
fn representation_pre_observable_quantum_over_bf() {
    let t = bf_point(&LieAlgebra::su2());
    let amb = QManifold {
        space: t.space.space().clone(),
        q: t.q().unwrap(),
    };
    let p = rep_pre_observable(amb, Some(t), &Representation::spin_one());
    let r = p.check(Level::Quantum).unwrap();
    assert!(r.is_valid(), "{:?}", r.failures());
    // a trace part breaks the semi-quantum level only
    let n = 2;
    let shifted: Vec<QMatrix> = Representation::spin_half()
        .matrices()
        .iter()
        .enumerate()
        .map(|(a, m)| if a == 0 { m.try_add(&QMatrix::identity(n)).unwrap() } else { m.clone() })
        .collect();
    let rho = Representation::unchecked("shifted", shifted).unwrap();
    let t = bf_point(&LieAlgebra::su2());
    let amb = QManifold {
        space: t.space.space().clone(),
        q: t.q().unwrap(),
    };
    let p = rep_pre_observable(amb, Some(t), &rho);
    assert!(!p.semi_quantum_residual().unwrap().is_zero());
}

#[test]
fn aux_independent_action() {
    let amb = cs_su2();
    let pairs = [("y", 0, "y+")];
    let p = PreObservable::new(amb.q_manifold(), None, &pairs, &Poly::int(&amb.space, 5)).unwrap();
    for level in [Level::Classical, Level::SemiQuantum] {
        assert!(p.check(level).unwrap().is_valid());
    }
}

// ---------------------------------------------------------------------------
// integration

#[test]
fn berezin_examples() {
    let sp = GradedSpace::new([("ξ", 1), ("η", 1), ("a", 0), ("b", 0), ("x", 0)]).unwrap();
    let (xi, eta) = (sp.var_id("ξ").unwrap(), sp.var_id("η").unwrap());
    let f = &v(&sp, "a") + &(&v(&sp, "b") * &v(&sp, "ξ"));
    assert_eq!(berezin_integrate(&f, &[xi]).unwrap(), v(&sp, "b"));
    assert_eq!(berezin_integrate(&(&v(&sp, "ξ") * &v(&sp, "η")), &[xi, eta]).unwrap(), Poly::int(&sp, 1));
    assert_eq!(berezin_integrate(&(&v(&sp, "ξ") * &v(&sp, "η")), &[eta, xi]).unwrap(), Poly::int(&sp, -1));
    assert!(berezin_integrate(&v(&sp, "x").pow(2), &[xi]).unwrap().is_zero());
    assert!(berezin_integrate(&v(&sp, "x"), &[sp.var_id("x").unwrap()]).is_err());
}

#[test]
fn wick_examples() {
    let sp = GradedSpace::new([("y", 0), ("z", 0), ("θ1", 1), ("η1", -1), ("θ2", 1), ("η2", -1)]).unwrap();
    let y = sp.var_id("y").unwrap();
    let z = sp.var_id("z").unwrap();
    for a in [1, 2, -3] {
        let quad = v(&sp, "y").pow(2).scale(&Gq::ratio(a, 2));
        assert_eq!(wick_gaussian(&quad, &Poly::int(&sp, 1), &[y]).unwrap(), Poly::int(&sp, 1));
        // second moment i/a
        assert_eq!(
            wick_gaussian(&quad, &v(&sp, "y").pow(2), &[y]).unwrap(),
            Poly::constant(&sp, Gq::complex((0, 1), (1, a)))
        );
        assert!(wick_gaussian(&quad, &v(&sp, "y"), &[y]).unwrap().is_zero());
        // fourth moment 3(i/a)²
        assert_eq!(
            wick_gaussian(&quad, &v(&sp, "y").pow(4), &[y]).unwrap(),
            Poly::constant(&sp, Gq::ratio(-3, a * a))
        );
        // nilpotent source J: completing the square gives e^{−iJ²/(2a)}
        let j = &(&v(&sp, "θ1") * &v(&sp, "η1")) + &(&v(&sp, "θ2") * &v(&sp, "η2"));
        let src = &quad + &(&j * &v(&sp, "y"));
        let expected = &Poly::int(&sp, 1) - &(&j * &j).scale(&Gq::complex((0, 1), (1, 2 * a)));
        assert_eq!(wick_gaussian(&src, &Poly::int(&sp, 1), &[y]).unwrap(), expected);
    }
    // two variables, off-diagonal form yz: ⟨yz⟩ = i (A⁻¹)_{yz} = i
    let quad = &v(&sp, "y") * &v(&sp, "z");
    assert_eq!(
        wick_gaussian(&quad, &(&v(&sp, "y") * &v(&sp, "z")), &[y, z]).unwrap(),
        Poly::constant(&sp, Gq::i())
    );
    assert!(matches!(
        wick_gaussian(&v(&sp, "y").pow(2), &Poly::int(&sp, 1), &[y, z]),
        Err(AlgebraError::DegenerateGaugeFixing(_))
    ));
}

/// Leibniz determinant of a polynomial matrix with even entries.
fn det_poly(m: &[Vec<GradedPolynomial>]) -> GradedPolynomial {
    fn perms(n: usize) -> Vec<(Vec<usize>, i64)> {
        if n == 0 {
            return vec![(vec![], 1)];
        }
        let mut out = Vec::new();
        for (p, s) in perms(n - 1) {
            for k in 0..n {
                let mut q = p.clone();
                q.insert(k, n - 1);
                out.push((q, s * if (n - 1 - k).is_multiple_of(2) { 1 } else { -1 }));
            }
        }
        out
    }
    let n = m.len();
    let sp = m[0][0].space().clone();
    let mut out = Poly::zero(&sp);
    for (p, s) in perms(n) {
        let t = (0..n).fold(Poly::int(&sp, s), |acc, i| &acc * &m[i][p[i]]);
        out = &out + &t;
    }
    out
}

/// Pairs `(a^j, a^j+)` with `|a| = da` and `(b_i, b_i+)` with `|b| = db`, and
/// `S^aux = Σ b_i M^i_j a^j`. `m` builds `M` over the joint space.
fn det_family(ambient: QManifold, n: usize, da: i32, db: i32, m: impl Fn(&Space) -> Vec<Vec<GradedPolynomial>>) -> (PreObservable, Vec<Vec<GradedPolynomial>>) {
    let names: Vec<(String, String)> = (1..=n)
        .map(|i| (format!("a{i}"), format!("a{i}+")))
        .chain((1..=n).map(|i| (format!("b{i}"), format!("b{i}+"))))
        .collect();
    let pairs: Vec<(&str, i32, &str)> = names
        .iter()
        .enumerate()
        .map(|(k, (x, y))| (x.as_str(), if k < n { da } else { db }, y.as_str()))
        .collect();
    let joint = PreObservable::joint_space(&ambient.space, &pairs).unwrap();
    let mm = m(&joint);
    let mut s = Poly::zero(&joint);
    for i in 0..n {
        for j in 0..n {
            s = &s + &(&(&v(&joint, &format!("b{}", i + 1)) * &mm[i][j]) * &v(&joint, &format!("a{}", j + 1)));
        }
    }
    let amb_m: Vec<Vec<GradedPolynomial>> = mm.iter().map(|r| r.iter().map(|e| e.embed(&ambient.space).unwrap()).collect()).collect();
    (PreObservable::new(ambient, None, &pairs, &s).unwrap(), amb_m)
}

fn psm_su2() -> HamiltonianQManifold {
    let pi = lie_poisson(&LieAlgebra::su2(), &["x1", "x2", "x3"]).unwrap();
    poisson_sigma(&["x1", "x2", "x3"], &["p1", "p2", "p3"], &pi).unwrap()
}

fn casimir(sp: &Space, names: [&str; 3]) -> GradedPolynomial {
    names.iter().fold(Poly::zero(sp), |acc, n| &acc + &v(sp, n).pow(2))
}

#[test]
fn determinant_family_pushforward() {
    for n in 1..=3usize {
        let (p, m) = det_family(psm_su2().q_manifold(), n, 1, -1, |sp| {
            let c = casimir(sp, ["x1", "x2", "x3"]);
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                &c + &Poly::int(sp, i as i64 + 1)
                            } else {
                                Poly::int(sp, (i + 2 * j) as i64 % 3)
                            }
                        })
                        .collect()
                })
                .collect()
        });
        assert!(p.check(Level::SemiQuantum).unwrap().is_valid());
        let l = LagrangianSubspace::uniform(2 * n, Member::Second);
        let r = bv_pushforward(&p, &l).unwrap();
        // Berezin over a_1..a_n then b_1..b_n: i^n (−1)^{n(n+1)/2} det M
        let k = n as u32;
        let c = &Gq::i().pow(k) * &Gq::sign((k * (k + 1) / 2) % 2 == 1);
        assert_eq!(r.observable, det_poly(&m).scale(&c), "n = {n}");
        assert!(r.gauge_residual.is_zero());
    }
}

#[test]
fn determinant_family_with_ghost_quadratic_entries() {
    // |a| = |b| = −1 and M of degree 2 built from Ω^a = ½ f^a_bc ψ^b ψ^c = Qψ^a
    let cs = cs_su2();
    let omega: Vec<GradedPolynomial> = (0..3).map(|a| cs.q.component(a).clone()).collect();
    let (p, m) = det_family(cs.q_manifold(), 1, -1, -1, |sp| vec![vec![omega[0].embed(sp).unwrap()]]);
    let r = bv_pushforward(&p, &LagrangianSubspace::uniform(2, Member::Second)).unwrap();
    assert_eq!(r.observable, m[0][0].scale(&Gq::i()).neg());
    assert!(r.gauge_residual.is_zero());
}

#[test]
fn pushforward_rejects_invalid_inputs() {
    let psm = psm_su2();
    // not semi-quantum: M = x1 is not a Casimir
    let (p, _) = det_family(psm.q_manifold(), 1, 1, -1, |sp| vec![vec![v(sp, "x1")]]);
    assert!(!p.check(Level::SemiQuantum).unwrap().is_valid());
    assert!(bv_pushforward(&p, &LagrangianSubspace::uniform(2, Member::Second)).is_err());
    // degenerate gauge fixing: integrating the even antifield b+ with no quadratic term
    let (p, _) = det_family(psm.q_manifold(), 1, 1, -1, |sp| vec![vec![Poly::int(sp, 1)]]);
    let l = LagrangianSubspace::uniform(2, Member::Second).swapped(1);
    assert!(matches!(bv_pushforward(&p, &l), Err(AlgebraError::DegenerateGaugeFixing(_))));
    // non-nilpotent exponent: y² with a coefficient depending on x
    let pairs = [("y", 0, "y+")];
    let joint = PreObservable::joint_space(&psm.space, &pairs).unwrap();
    let s = &v(&joint, "y").pow(2) * &(&Poly::int(&joint, 1) + &casimir(&joint, ["x1", "x2", "x3"]));
    let p = PreObservable::new(psm.q_manifold(), None, &pairs, &s).unwrap();
    assert!(matches!(
        bv_pushforward(&p, &LagrangianSubspace::uniform(1, Member::Second)),
        Err(AlgebraError::NotExpandable(_))
    ));
    // wrong number of choices
    assert!(bv_pushforward(&p, &LagrangianSubspace::uniform(2, Member::Second)).is_err());
}

#[test]
fn empty_fiber_pushforward_is_one() {
    let cs = cs_su2();
    let p = PreObservable::new(cs.q_manifold(), None, &[], &Poly::zero(&cs.space)).unwrap();
    let r = bv_pushforward(&p, &LagrangianSubspace::new(vec![])).unwrap();
    assert_eq!(r.observable, Poly::int(&cs.space, 1));
}

/// `½ y² + Σ b_i M^i_j a^j + y·(b_1 N a^1)` over PSM; product of a Gaussian and a Berezin fiber.
fn mixed_instance(coupled: bool) -> PreObservable {
    let psm = psm_su2();
    let pairs = [("y", 0, "y+"), ("a1", 1, "a1+"), ("b1", -1, "b1+")];
    let joint = PreObservable::joint_space(&psm.space, &pairs).unwrap();
    let c = casimir(&joint, ["x1", "x2", "x3"]);
    let mut s = &v(&joint, "y").pow(2).scale(&Gq::ratio(1, 2)) + &(&(&v(&joint, "b1") * &(&c + &Poly::int(&joint, 2))) * &v(&joint, "a1"));
    if coupled {
        s = &s + &(&(&v(&joint, "y") * &v(&joint, "b1")) * &v(&joint, "a1")).scale(&Gq::int(3));
    }
    PreObservable::new(psm.q_manifold(), None, &pairs, &s).unwrap()
}

#[test]
fn staged_pushforward_matches_single_stage() {
    for coupled in [false, true] {
        let p = mixed_instance(coupled);
        let l = LagrangianSubspace::uniform(3, Member::Second);
        let one = bv_pushforward(&p, &l).unwrap();
        let two = bv_pushforward_staged(&p, &l, &[vec![0], vec![1, 2]]).unwrap();
        let three = bv_pushforward_staged(&p, &l, &[vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(one, two);
        assert_eq!(one, three);
        assert!(one.gauge_residual.is_zero());
    }
    let p = mixed_instance(false);
    let l = LagrangianSubspace::uniform(3, Member::Second);
    assert!(bv_pushforward_staged(&p, &l, &[vec![1, 2], vec![0]]).is_err());
    // the Gaussian factor integrates to 1: O = −i (C + 2)
    let sp = &p.ambient.space;
    let expected = (&casimir(sp, ["x1", "x2", "x3"]) + &Poly::int(sp, 2)).scale(&Gq::i()).neg();
    assert_eq!(bv_pushforward(&p, &l).unwrap().observable, expected);
}

// ---------------------------------------------------------------------------
// Q-exactness

#[test]
fn witness_trivial_cases() {
    let cs = cs_su2();
    match q_exactness_witness(&cs.q, &Poly::zero(&cs.space), 3).unwrap() {
        Exactness::Exact { witness, residual } => {
            assert!(witness.is_zero());
            assert!(residual.is_zero());
        }
        e => panic!("{e:?}"),
    }
    // Q of a random degree-1 element is recovered
    let sp = &cs.space;
    let psi = &(&v(sp, "ψ1").scale(&Gq::int(2)) - &v(sp, "ψ3")) + &v(sp, "ψ2").scale(&Gq::ratio(1, 3));
    let diff = cs.q.apply(&psi).unwrap();
    match q_exactness_witness(&cs.q, &diff, 3).unwrap() {
        Exactness::Exact { residual, .. } => assert!(residual.is_zero()),
        e => panic!("{e:?}"),
    }
}

#[test]
fn su2_cubic_cocycle_is_not_exact() {
    let cs = cs_su2();
    let sp = &cs.space;
    let cubic = &(&v(sp, "ψ1") * &v(sp, "ψ2")) * &v(sp, "ψ3");
    assert!(cs.q.apply(&cubic).unwrap().is_zero());
    match q_exactness_witness(&cs.q, &cubic, 3).unwrap() {
        Exactness::NotExact {
            degree, rank, augmented_rank, ..
        } => {
            assert_eq!(degree, 3);
            assert_eq!(augmented_rank, rank + 1);
        }
        e => panic!("{e:?}"),
    }
}

#[test]
fn witness_handles_even_coordinates() {
    // BF with D = 2: ξ has degree 0, so the basis is bounded by polynomial degree
    let t = bf(&LieAlgebra::su2(), 2).unwrap();
    let sp = &t.space;
    let w = &v(sp, "ξ1") * &v(sp, "ξ2");
    let diff = t.q.apply(&w).unwrap();
    match q_exactness_witness(&t.q, &diff, 2).unwrap() {
        Exactness::Exact { residual, .. } => assert!(residual.is_zero()),
        e => panic!("{e:?}"),
    }
    // the Casimir Σ ξ² is closed and, in degree 0, cannot be exact
    let c = casimir(sp, ["ξ1", "ξ2", "ξ3"]);
    assert!(t.q.apply(&c).unwrap().is_zero());
    assert!(matches!(q_exactness_witness(&t.q, &c, 4).unwrap(), Exactness::NotExact { .. }));
}

#[test]
fn pair_swap_shifts_degree_by_an_odd_amount() {
    // Swapping the Gaussian pair integrates y+ instead of y; nothing depends on y+,
    // so the swapped observable vanishes and the difference is the observable itself.
    let p = mixed_instance(false);
    let l = LagrangianSubspace::uniform(3, Member::Second);
    let o = bv_pushforward(&p, &l).unwrap().observable;
    let o2 = bv_pushforward(&p, &l.swapped(0)).unwrap().observable;
    assert!(o2.is_zero());
    let diff = &o2 - &o;
    assert!(matches!(q_exactness_witness(&p.ambient.q, &diff, 4).unwrap(), Exactness::NotExact { .. }));
    // over the CS ghosts with M = Ω^1 = Qψ^1 the observable is exact, so the swap difference is too
    let cs = cs_su2();
    let om = cs.q.component(0).clone();
    let pairs = [("y", 0, "y+"), ("a1", -1, "a1+"), ("b1", -1, "b1+")];
    let joint = PreObservable::joint_space(&cs.space, &pairs).unwrap();
    let s = &v(&joint, "y").pow(2).scale(&Gq::ratio(1, 2)) + &(&(&v(&joint, "b1") * &om.embed(&joint).unwrap()) * &v(&joint, "a1"));
    let p = PreObservable::new(cs.q_manifold(), None, &pairs, &s).unwrap();
    let o = bv_pushforward(&p, &l).unwrap().observable;
    let o2 = bv_pushforward(&p, &l.swapped(0)).unwrap().observable;
    match q_exactness_witness(&cs.q, &(&o2 - &o), 3).unwrap() {
        Exactness::Exact { residual, .. } => assert!(residual.is_zero()),
        e => panic!("{e:?}"),
    }
}
