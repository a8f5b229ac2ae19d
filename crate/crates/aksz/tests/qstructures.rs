use aksz::qstructures::*;
use aksz::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn v(sp: &Space, name: &str) -> GradedPolynomial {
    Poly::named(sp, name).unwrap()
}

/// Sum of `coeff * product of named coordinates`.
fn poly(sp: &Space, terms: &[(i64, &[&str])]) -> GradedPolynomial {
    let mut out = Poly::zero(sp);
    for (c, names) in terms {
        let m = names.iter().fold(Poly::int(sp, 1), |acc, n| &acc * &v(sp, n));
        out = &out + &m.scale(&Gq::int(*c));
    }
    out
}

fn eps(a: usize, b: usize, c: usize) -> i64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

fn entry(out: usize, ins: Vec<usize>, c: i64) -> TensorEntry {
    TensorEntry { out, ins, coeff: Gq::int(c) }
}

fn random_delta(rng: &mut ChaCha8Rng) -> Gq {
    let n = rng.random_range(1..=5) * if rng.random_bool(0.5) { 1 } else { -1 };
    Gq::ratio(n, rng.random_range(1..=4))
}

fn random_slot(rng: &mut ChaCha8Rng, d: usize) -> (usize, usize, usize) {
    loop {
        let (a, b, c) = (rng.random_range(0..d), rng.random_range(0..d), rng.random_range(0..d));
        if b != c {
            return (a, b, c);
        }
    }
}

fn assert_valid(r: &Report) {
    let bad: Vec<String> = r.failures().iter().map(|c| format!("{}: {}", c.name, c.residual.render())).collect();
    assert!(r.is_valid(), "{} invalid: {bad:?}", r.subject);
    for c in &r.checks {
        if c.status == Status::Pass {
            assert!(c.residual.is_zero(), "{} passed with residual {}", c.name, c.residual.render());
        }
    }
}

fn identity(d: usize) -> Vec<Vec<Gq>> {
    (0..d).map(|i| (0..d).map(|j| if i == j { Gq::one() } else { Gq::zero() }).collect()).collect()
}

// ---------------------------------------------------------------------------
// standard targets

#[test]
fn chern_simons_su2_matches_hand_computation() {
    let t = chern_simons(&LieAlgebra::su2(), &identity(3)).unwrap();
    let sp = &t.space;
    // 1/6 ε_abc ψ^a ψ^b ψ^c = ψ1ψ2ψ3
    assert_eq!(t.theta, poly(sp, &[(1, &["ψ1", "ψ2", "ψ3"])]));
    assert_eq!(t.q.component(0), &poly(sp, &[(1, &["ψ2", "ψ3"])]));
    assert_eq!(t.q.component(1), &poly(sp, &[(1, &["ψ3", "ψ1"])]));
    assert_eq!(t.q.component(2), &poly(sp, &[(1, &["ψ1", "ψ2"])]));
    assert_eq!(t.n, 2);
    assert_valid(&t.verify().unwrap());
}

#[test]
fn standard_targets_verify_quickly() {
    let g = LieAlgebra::su2();
    let pi = lie_poisson(&g, &["x1", "x2", "x3"]).unwrap();
    let start = Instant::now();
    let targets = [
        chern_simons(&g, &identity(3)).unwrap(),
        chern_simons(&g, &g.killing_form()).unwrap(),
        bf(&g, 3).unwrap(),
        bf(&g, 4).unwrap(),
        poisson_sigma(&["x1", "x2", "x3"], &["p1", "p2", "p3"], &pi).unwrap(),
    ];
    for t in &targets {
        let t0 = Instant::now();
        assert_valid(&t.verify().unwrap());
        assert!(t0.elapsed().as_secs_f64() < 1.0, "{} took {:?}", t.name, t0.elapsed());
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn bf_theta_and_degrees() {
    let t = bf(&LieAlgebra::su2(), 3).unwrap();
    let sp = &t.space;
    let expected = poly(sp, &[(1, &["ξ1", "ψ2", "ψ3"]), (1, &["ξ2", "ψ3", "ψ1"]), (1, &["ξ3", "ψ1", "ψ2"])]);
    assert_eq!(t.theta, expected);
    for d in 0..=5 {
        let t = bf(&LieAlgebra::su2(), d).unwrap();
        assert_eq!(t.n, d - 1);
        assert_eq!(t.theta.grade_of(), Grade::Homogeneous { internal: d, form: 0 });
        assert_valid(&t.verify().unwrap());
    }
}

#[test]
fn bf_non_unimodular_warns_but_is_valid() {
    let t = bf(&LieAlgebra::aff1(), 3).unwrap();
    let r = t.verify().unwrap();
    assert!(r.is_valid());
    assert!(r.checks.iter().any(|c| c.status == Status::Warning));
}

#[test]
fn abelian_targets_are_trivial() {
    let t = chern_simons(&LieAlgebra::abelian(2), &identity(2)).unwrap();
    assert!(t.q.is_zero());
    assert!(t.theta.is_zero());
    assert_valid(&t.verify().unwrap());
}

#[test]
fn psm_q_on_base_coordinates() {
    let g = LieAlgebra::su2();
    let pi = lie_poisson(&g, &["x1", "x2", "x3"]).unwrap();
    let t = poisson_sigma(&["x1", "x2", "x3"], &["p1", "p2", "p3"], &pi).unwrap();
    let sp = &t.space;
    // Q x^i = π^{ij} p_j with π^{ij} = ε_ijk x_k
    for i in 0..3 {
        let mut expected = Poly::zero(sp);
        for j in 0..3 {
            for k in 0..3 {
                let c = eps(k, i, j);
                if c != 0 {
                    expected = &expected + &poly(sp, &[(c, &[&format!("x{}", k + 1), &format!("p{}", j + 1)])]);
                }
            }
        }
        assert_eq!(t.q.component(i), &expected, "Q x{}", i + 1);
    }
}

type Terms<'a> = &'a [(i64, &'a [&'a str])];

fn bivector_from(entries: &[(usize, usize, Terms)]) -> Vec<Vec<GradedPolynomial>> {
    let sp = GradedSpace::new([("x1", 0), ("x2", 0), ("x3", 0)]).unwrap();
    let mut pi = vec![vec![Poly::zero(&sp); 3]; 3];
    for &(i, j, terms) in entries {
        let p = poly(&sp, terms);
        pi[i][j] = &pi[i][j] + &p;
        pi[j][i] = &pi[j][i] - &p;
    }
    pi
}

fn schouten_square_is_zero(pi: &[Vec<GradedPolynomial>]) -> bool {
    let cot = ShiftedCotangent::new(&[("x1", "p1"), ("x2", "p2"), ("x3", "p3")]).unwrap();
    let p = cot.bivector(pi).unwrap();
    cot.schouten(&p, &p).unwrap().is_zero()
}

#[test]
fn psm_validity_matches_schouten() {
    let cases: Vec<Vec<Vec<GradedPolynomial>>> = vec![
        lie_poisson(&LieAlgebra::su2(), &["x1", "x2", "x3"]).unwrap(),
        bivector_from(&[(0, 1, &[(1, &["x3"])])]),
        bivector_from(&[(0, 1, &[(1, &["x3"])]), (1, 2, &[(1, &["x2"])])]),
        bivector_from(&[(0, 1, &[(1, &["x3"])]), (1, 2, &[(1, &["x1"])])]),
        bivector_from(&[(0, 1, &[(1, &["x1", "x1"])]), (1, 2, &[(2, &["x3"])])]),
        bivector_from(&[(0, 1, &[(1, &["x2"])]), (0, 2, &[(1, &["x3"])])]),
        bivector_from(&[(0, 1, &[(1, &[])]), (1, 2, &[(1, &["x1"])])]),
    ];
    let mut seen = (0, 0);
    for pi in &cases {
        let t = poisson_sigma(&["x1", "x2", "x3"], &["p1", "p2", "p3"], pi).unwrap();
        let valid = t.verify().unwrap().is_valid();
        let poisson = schouten_square_is_zero(pi);
        assert_eq!(valid, poisson);
        if poisson {
            seen.0 += 1
        } else {
            seen.1 += 1
        }
    }
    assert!(seen.0 > 0 && seen.1 > 0, "{seen:?}");
}

#[test]
fn psm_rejects_non_antisymmetric_bivector() {
    let sp = GradedSpace::new([("x1", 0), ("x2", 0)]).unwrap();
    let mut pi = vec![vec![Poly::zero(&sp); 2]; 2];
    pi[0][1] = v(&sp, "x1");
    assert!(poisson_sigma(&["x1", "x2"], &["p1", "p2"], &pi).is_err());
}

#[test]
fn chern_simons_rejects_bad_pairing() {
    let g = LieAlgebra::su2();
    let mut k = identity(3);
    k[0][1] = Gq::one();
    assert!(chern_simons(&g, &k).is_err());
    let mut k = identity(3);
    k[2][2] = Gq::zero();
    assert!(chern_simons(&g, &k).is_err());
}

// ---------------------------------------------------------------------------
// negative controls

#[test]
fn theta_bracket_vanishes_on_three_odd_generators() {
    // Any cubic in three odd variables is c ψ1ψ2ψ3, whose self-bracket is 0.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let mut k = identity(3);
        for i in 0..3 {
            k[i][i] = random_delta(&mut rng);
        }
        let g = LieAlgebra::su2().perturbed(0, 0, 1, &Gq::one());
        let t = chern_simons(&g, &k).unwrap();
        assert!(t.omega.bracket(&t.theta, &t.theta).unwrap().is_zero());
    }
}

#[test]
fn cs_su2_perturbations_break_hamiltonian_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let (a, b, c) = random_slot(&mut rng, 3);
        let g = LieAlgebra::su2().perturbed(a, b, c, &Gq::one());
        let r = chern_simons(&g, &identity(3)).unwrap().verify().unwrap();
        assert!(!r.is_valid());
        assert!(!r.get("ham_Q").unwrap().residual.is_zero());
        // Q² fails exactly when Jacobi does
        assert_eq!(r.get("Q^2").unwrap().residual.is_zero(), g.satisfies_jacobi());
    }
}

#[test]
fn so4_cross_perturbation_breaks_theta_bracket() {
    let g = LieAlgebra::so4().perturbed(0, 1, 3, &Gq::one());
    let t = chern_simons(&g, &identity(6)).unwrap();
    assert!(!t.omega.bracket(&t.theta, &t.theta).unwrap().is_zero());
    let r = t.verify().unwrap();
    assert!(!r.get("Q^2").unwrap().residual.is_zero());
    assert!(!r.get("theta_MC").unwrap().residual.is_zero());
}

#[test]
fn fuzz_cs_validity_tracks_preconditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let base = LieAlgebra::so4();
    for _ in 0..50 {
        let (a, b, c) = random_slot(&mut rng, 6);
        let g = base.perturbed(a, b, c, &random_delta(&mut rng));
        let k = identity(6);
        let honest = g.satisfies_jacobi() && g.invariance_violations(&k).is_empty();
        assert_eq!(chern_simons(&g, &k).unwrap().verify().unwrap().is_valid(), honest);
    }
}

#[test]
fn fuzz_bf_validity_tracks_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut invalid = 0;
    for i in 0..50 {
        let (a, b, c) = random_slot(&mut rng, 3);
        let g = LieAlgebra::su2().perturbed(a, b, c, &random_delta(&mut rng));
        let r = bf(&g, 3 + (i % 2)).unwrap().verify().unwrap();
        assert_eq!(r.is_valid(), g.satisfies_jacobi());
        invalid += usize::from(!r.is_valid());
    }
    assert!(invalid > 0);
}

#[test]
fn fuzz_psm_validity_tracks_schouten() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let names = ["x1", "x2", "x3"];
    for _ in 0..50 {
        let mut pi = lie_poisson(&LieAlgebra::su2(), &names).unwrap();
        let sp = pi[0][0].space().clone();
        let (i, j) = loop {
            let (i, j) = (rng.random_range(0..3), rng.random_range(0..3));
            if i != j {
                break (i, j);
            }
        };
        let k = rng.random_range(0..3);
        let d = Poly::var(&sp, k as VarId).scale(&random_delta(&mut rng));
        pi[i][j] = &pi[i][j] + &d;
        pi[j][i] = &pi[j][i] - &d;
        let t = poisson_sigma(&names, &["p1", "p2", "p3"], &pi).unwrap();
        assert_eq!(t.verify().unwrap().is_valid(), schouten_square_is_zero(&pi));
    }
}

// ---------------------------------------------------------------------------
// bundles

fn adjoint_entries() -> Vec<ModuleEntry> {
    let rho = Representation::spin_one();
    let mut out = Vec::new();
    for a in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let c = rho.matrix(a).get(i, j).clone();
                if !c.is_zero() {
                    out.push(ModuleEntry {
                        out: i,
                        psi: vec![a],
                        x: j,
                        coeff: c,
                    });
                }
            }
        }
    }
    out
}

fn su2_entries() -> Vec<TensorEntry> {
    let mut l = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                if eps(a, b, c) != 0 {
                    l.push(entry(a, vec![b, c], eps(a, b, c)));
                }
            }
        }
    }
    l
}

#[test]
fn orthogonal_module_so3_on_r3() {
    let g = LieAlgebra::su2();
    let b = orthogonal_module(&g, &Representation::spin_one(), &identity(3), 0, false).unwrap();
    assert_eq!(b.n_prime, 2);
    assert_valid(&b.verify().unwrap());
    // Θ′ = ½ (x, ψ·x) with (ψ·x)^a = ε_abc ψ^b x^c
    let sp = &b.total;
    let mut expected = Poly::zero(sp);
    for a in 0..3 {
        for bb in 0..3 {
            for c in 0..3 {
                let e = eps(a, bb, c);
                if e != 0 {
                    let m = poly(sp, &[(e, &[&format!("x{}", a + 1), &format!("ψ{}", bb + 1), &format!("x{}", c + 1)])]);
                    expected = &expected + &m.scale(&Gq::ratio(1, 2));
                }
            }
        }
    }
    assert_eq!(b.theta_prime, expected);
    for k in [-1, 1] {
        let b = orthogonal_module(&g, &Representation::spin_one(), &identity(3), k, false).unwrap();
        assert_eq!(b.n_prime, 4 * k + 2);
        assert_valid(&b.verify().unwrap());
    }
}

#[test]
fn symplectic_variation_has_degree_4k() {
    let j = vec![vec![Gq::zero(), Gq::one()], vec![Gq::int(-1), Gq::zero()]];
    let rho = Representation::unchecked("h", vec![QMatrix::from_ints(&[&[1, 0], &[0, -1]])]).unwrap();
    for k in [0, 1] {
        let b = orthogonal_module(&LieAlgebra::abelian(1), &rho, &j, k, true).unwrap();
        assert_eq!(b.n_prime, 4 * k);
        assert_eq!(b.theta_prime.grade_of().internal(), Some(4 * k + 1));
        assert_valid(&b.verify().unwrap());
    }
}

#[test]
fn fuzz_orthogonal_module_tracks_representation_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let g = LieAlgebra::su2();
    for _ in 0..50 {
        let rho = Representation::spin_one().perturbed(rng.random_range(0..3), rng.random_range(0..3), rng.random_range(0..3), &random_delta(&mut rng));
        let honest = rho.homomorphism_violations(&g).is_empty() && rho.preserves(&identity(3));
        let r = orthogonal_module(&g, &rho, &identity(3), 0, false).unwrap().verify().unwrap();
        assert!(!honest);
        assert!(!r.is_valid());
    }
}

#[test]
fn truncated_linfty_reproduces_module_example() {
    let g = LieAlgebra::su2();
    let data = LinftyModuleData {
        g_degrees: vec![0; 3],
        l: su2_entries(),
        r_degrees: vec![0; 3],
        k: 0,
        q: 0,
        pairing: identity(3),
        rho: adjoint_entries(),
        max_arity: 2,
    };
    let b = linfty_module(&data).unwrap();
    let reference = orthogonal_module(&g, &Representation::spin_one(), &identity(3), 0, false).unwrap();
    assert_eq!(b.theta_prime, reference.theta_prime);
    assert_eq!(b.a, reference.a);
    assert_eq!(b.n_prime, 2);
    let r = b.verify().unwrap();
    assert_valid(&r);
    assert!(r.get("unverifiable_relations").unwrap().residual.is_zero());
}

#[test]
fn linfty_module_degree_includes_q() {
    let data = LinftyModuleData {
        g_degrees: vec![],
        l: vec![],
        r_degrees: vec![0, -2],
        k: 0,
        q: 2,
        pairing: vec![vec![Gq::zero(), Gq::one()], vec![Gq::one(), Gq::zero()]],
        rho: vec![],
        max_arity: 1,
    };
    let b = linfty_module(&data).unwrap();
    assert_eq!(b.n_prime, 4);
    assert_valid(&b.verify().unwrap());
}

#[test]
fn linfty_module_flags_broken_jacobi() {
    let g = LieAlgebra::su2().perturbed(0, 0, 1, &Gq::one());
    let mut l = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                if !g.f(a, b, c).is_zero() {
                    l.push(TensorEntry {
                        out: a,
                        ins: vec![b, c],
                        coeff: g.f(a, b, c).clone(),
                    });
                }
            }
        }
    }
    let data = LinftyModuleData {
        g_degrees: vec![0; 3],
        l,
        r_degrees: vec![0; 3],
        k: 0,
        q: 0,
        pairing: identity(3),
        rho: adjoint_entries(),
        max_arity: 2,
    };
    let r = linfty_module(&data).unwrap().verify().unwrap();
    assert!(!r.is_valid());
    let names: Vec<_> = r.failures().iter().map(|c| format!("{}: {}", c.name, c.residual.render())).collect();
    assert!(r.failures().iter().any(|c| c.name.starts_with("linfty_relations")), "{names:?}");
}

#[test]
fn linfty_module_rejects_over_arity_entries() {
    let data = LinftyModuleData {
        g_degrees: vec![0; 3],
        l: vec![entry(0, vec![0, 1, 2], 1)],
        r_degrees: vec![],
        k: 0,
        q: 0,
        pairing: vec![],
        rho: vec![],
        max_arity: 2,
    };
    assert!(linfty_module(&data).is_err());
}

#[test]
fn linfty_ideal_abelian_instance() {
    let data = LinftyIdealData {
        h_degrees: vec![0, 0],
        ideal: vec![1],
        lambda: vec![],
        pairing: vec![vec![Gq::one()]],
        q: 0,
    };
    let b = linfty_ideal(&data).unwrap();
    assert_eq!(b.n_prime, 2);
    assert!(b.a.is_zero());
    assert_valid(&b.verify().unwrap());
}

#[test]
fn linfty_ideal_semidirect_product_matches_module_example() {
    let mut lam = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let e = eps(a, b, c);
                if e != 0 {
                    lam.push(entry(a, vec![b, c], e));
                    lam.push(entry(3 + a, vec![b, 3 + c], e));
                    lam.push(entry(3 + a, vec![3 + c, b], -e));
                }
            }
        }
    }
    let data = LinftyIdealData {
        h_degrees: vec![0; 6],
        ideal: vec![3, 4, 5],
        lambda: lam,
        pairing: identity(3),
        q: 0,
    };
    let b = linfty_ideal(&data).unwrap();
    let r = b.verify().unwrap();
    assert!(r.is_valid());
    assert_eq!(r.get("cyclic_on_I").unwrap().status, Status::Pass);
    // the bracket of g is not cyclic with respect to a pairing supported on I only
    assert_eq!(r.get("cyclic_on_h").unwrap().status, Status::Warning);
}

#[test]
fn linfty_ideal_with_differential_fails_fiber_cme() {
    let data = LinftyIdealData {
        h_degrees: vec![-1, 0],
        ideal: vec![1],
        lambda: vec![entry(1, vec![0], 1)],
        pairing: vec![vec![Gq::one()]],
        q: 0,
    };
    let r = linfty_ideal(&data).unwrap().verify().unwrap();
    assert!(!r.is_valid());
    assert!(!r.get("fiber_CME").unwrap().residual.is_zero());
    assert_eq!(r.get("cyclic_on_I").unwrap().status, Status::Pass);
}

#[test]
fn moment_map_rotation_of_plane() {
    let sp = GradedSpace::new([("x", 0), ("y", 0)]).unwrap();
    let mu = poly(&sp, &[(1, &["x", "x"]), (1, &["y", "y"])]).scale(&Gq::ratio(1, 2));
    let w = vec![vec![Gq::zero(), Gq::one()], vec![Gq::int(-1), Gq::zero()]];
    let data = MomentMapData {
        g: LieAlgebra::abelian(1),
        y_names: vec!["x".into(), "y".into()],
        w,
        mu: vec![mu],
    };
    let b = moment_map(&data).unwrap();
    assert_eq!(b.n_prime, 0);
    assert_valid(&b.verify().unwrap());
    let t = &b.total;
    // rotation generator: x ↦ −ψ y, y ↦ ψ x
    assert_eq!(b.a.component(b.fiber[0]), &poly(t, &[(-1, &["ψ1", "y"])]));
    assert_eq!(b.a.component(b.fiber[1]), &poly(t, &[(1, &["ψ1", "x"])]));
}

#[test]
fn moment_map_angular_momentum_sign() {
    let names: Vec<String> = ["q1", "q2", "q3", "p1", "p2", "p3"].iter().map(|s| s.to_string()).collect();
    let sp = GradedSpace::new(names.iter().map(|n| (n.clone(), 0))).unwrap();
    let mut l = Vec::new();
    for a in 0..3 {
        let mut m = Poly::zero(&sp);
        for b in 0..3 {
            for c in 0..3 {
                let e = eps(a, b, c);
                if e != 0 {
                    m = &m + &poly(&sp, &[(e, &[&format!("q{}", b + 1), &format!("p{}", c + 1)])]);
                }
            }
        }
        l.push(m);
    }
    let mut w = vec![vec![Gq::zero(); 6]; 6];
    for i in 0..3 {
        w[i][i + 3] = Gq::one();
        w[i + 3][i] = Gq::int(-1);
    }
    let make = |mu: Vec<GradedPolynomial>| {
        moment_map(&MomentMapData {
            g: LieAlgebra::su2(),
            y_names: names.clone(),
            w: w.clone(),
            mu,
        })
        .unwrap()
        .verify()
        .unwrap()
    };
    let neg: Vec<_> = l.iter().map(|m| m.neg()).collect();
    assert_valid(&make(neg));
    let r = make(l);
    assert!(!r.is_valid());
    assert!(!r.get("equivariance").unwrap().residual.is_zero());
}

#[test]
fn point_fiber_casimir() {
    let names = ["x1", "x2", "x3"];
    let pi = lie_poisson(&LieAlgebra::su2(), &names).unwrap();
    let psm = poisson_sigma(&names, &["p1", "p2", "p3"], &pi).unwrap();
    let sp = &psm.space;
    let cas = poly(sp, &[(1, &["x1", "x1"]), (1, &["x2", "x2"]), (1, &["x3", "x3"])]);
    let b = point_fiber(&psm.q_manifold(), Some(&psm.omega), &cas, None).unwrap();
    assert_eq!(b.n_prime, -1);
    assert_valid(&b.verify().unwrap());
    // a non-Casimir: the residual is Qθ itself
    let x1 = v(sp, "x1");
    let b = point_fiber(&psm.q_manifold(), Some(&psm.omega), &x1, None).unwrap();
    let r = b.verify().unwrap();
    let expected = psm.q.apply(&x1).unwrap();
    assert!(!expected.is_zero());
    assert_eq!(r.get("fiber_CME").unwrap().residual, Residual::Poly(expected));
}

#[test]
fn point_fiber_declared_degree_must_match() {
    let psm = poisson_sigma(&["x1"], &["p1"], &[vec![Poly::zero(&GradedSpace::new([("x1", 0)]).unwrap())]]).unwrap();
    let x = v(&psm.space, "x1");
    assert!(point_fiber(&psm.q_manifold(), None, &x, Some(2)).is_err());
    assert_eq!(point_fiber(&psm.q_manifold(), None, &x, Some(0)).unwrap().n_prime, -1);
}

#[test]
fn cattaneo_rossi_all_dimensions() {
    for d in 2..=5 {
        let b = cattaneo_rossi(&LieAlgebra::su2(), d).unwrap();
        assert_eq!(b.n_prime, d - 3);
        assert_valid(&b.verify().unwrap());
    }
    let b = cattaneo_rossi(&LieAlgebra::abelian(1), 4).unwrap();
    let t = &b.total;
    // abelian: Θ′ = ⟨ξ, q⟩
    assert_eq!(b.theta_prime, poly(t, &[(1, &["ξ1", "q1"])]));
    assert_valid(&b.verify().unwrap());
}

#[test]
fn fuzz_cattaneo_rossi_tracks_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..50 {
        let (a, b, c) = random_slot(&mut rng, 3);
        let g = LieAlgebra::su2().perturbed(a, b, c, &random_delta(&mut rng));
        let r = cattaneo_rossi(&g, 4).unwrap().verify().unwrap();
        assert_eq!(r.is_valid(), g.satisfies_jacobi());
    }
}

#[test]
fn report_serializes_to_json() {
    let r = bf(&LieAlgebra::aff1(), 3).unwrap().verify().unwrap();
    let j = serde_json::to_value(&r).unwrap();
    assert_eq!(j["checks"][0]["status"], "pass");
    assert!(j["checks"].as_array().unwrap().iter().any(|c| c["status"] == "warning"));
}

#[test]
fn linfty_module_separates_unverifiable_relations() {
    // su(2) with a broken bracket plus a degree −1 generator e4 with l₁(e4) = e1:
    // the Jacobi relation now also involves the omitted l₃∘l₁.
    let g = LieAlgebra::su2().perturbed(0, 0, 1, &Gq::one());
    let mut l = vec![entry(0, vec![3], 1)];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                if !g.f(a, b, c).is_zero() {
                    l.push(TensorEntry {
                        out: a,
                        ins: vec![b, c],
                        coeff: g.f(a, b, c).clone(),
                    });
                }
            }
        }
    }
    let data = LinftyModuleData {
        g_degrees: vec![0, 0, 0, -1],
        l,
        r_degrees: vec![],
        k: 0,
        q: 0,
        pairing: vec![],
        rho: vec![],
        max_arity: 2,
    };
    let r = linfty_module(&data).unwrap().verify().unwrap();
    let unver = r.get("unverifiable_relations").unwrap();
    assert_eq!(unver.status, Status::Warning);
    assert!(unver.residual.render().contains("arity 3"));
    // the arity-2 relation (l₁ a derivation of l₂) is fully known and fails
    let rel = r.get("linfty_relations").unwrap();
    assert_eq!(rel.status, Status::Fail);
    assert!(!rel.residual.render().contains("ψ1*ψ2*ψ3"));
}
