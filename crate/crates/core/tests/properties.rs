mod common;

use common::{arb_bounds, arb_expr, domain, names, point_in};
use gsip_lab::gsip::{cex1, cex2};
use gsip_lab::{run, AlgorithmConfig, Expr, GsipProblem, MinimizeOptions, SlaterCertificate, Variant};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn env<'a>(names: &'a [String], p: &[f64]) -> Vec<(&'a str, f64)> {
    names.iter().map(String::as_str).zip(p.iter().copied()).collect()
}

fn inclusion_case() -> impl Strategy<Value = (Expr, Vec<(f64, f64)>, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|dim| {
        (
            arb_expr(names(dim), 4),
            arb_bounds(dim),
            proptest::collection::vec(0.0..=1.0f64, dim),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn interval_contains_point_values((e, bounds, t) in inclusion_case()) {
        let ns = names(bounds.len());
        let enclosure = e.interval_eval(&domain(&ns, &bounds)).unwrap();
        let p = point_in(&bounds, &t);
        let v = e.eval(&env(&ns, &p)).unwrap();
        prop_assert!(enclosure.contains(v), "{e} at {p:?} = {v} not in {enclosure}");
    }

    #[test]
    fn sub_box_enclosure_shrinks((e, bounds, t) in inclusion_case(), s in 0.0..=1.0f64) {
        let ns = names(bounds.len());
        let outer = e.interval_eval(&domain(&ns, &bounds)).unwrap();
        let sub: Vec<(f64, f64)> = bounds
            .iter()
            .zip(&t)
            .map(|(&(lo, hi), &a)| {
                let l = lo + a * (hi - lo);
                (l, (l + s * (hi - l)).min(hi))
            })
            .collect();
        let inner = e.interval_eval(&domain(&ns, &sub)).unwrap();
        prop_assert!(outer.encloses(&inner), "{inner} not in {outer}");
    }

    #[test]
    fn min_max_are_pointwise(a in arb_expr(names(2), 3), b in arb_expr(names(2), 3),
                             p in proptest::collection::vec(-3.0..3.0f64, 2)) {
        let ns = names(2);
        let e = env(&ns, &p);
        let (va, vb) = (a.eval(&e).unwrap(), b.eval(&e).unwrap());
        prop_assert_eq!(a.clone().min(b.clone()).eval(&e).unwrap(), va.min(vb));
        prop_assert_eq!(a.max(b).eval(&e).unwrap(), va.max(vb));
    }

    #[test]
    fn hbar_is_max_of_h(hs in proptest::collection::vec(arb_expr(names(2), 3), 1..=4),
                        p in proptest::collection::vec(-1.0..=1.0f64, 2)) {
        let ns = names(2);
        let problem = GsipProblem::new(
            "h",
            gsip_lab::BoxDomain::new([("x", -1.0, 1.0)]).unwrap(),
            gsip_lab::BoxDomain::new([("y", -1.0, 1.0)]).unwrap(),
            Expr::var("x"),
            Expr::var("y"),
            hs.clone(),
        ).unwrap();
        let e = env(&ns, &p);
        let vals: Vec<f64> = hs.iter().map(|h| h.eval(&e).unwrap()).collect();
        let hbar = problem.hbar().unwrap().eval(&e).unwrap();
        prop_assert_eq!(hbar, vals.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        prop_assert_eq!(hbar <= 0.0, vals.iter().all(|&v| v <= 0.0));
    }
}

#[test]
fn branch_and_bound_is_sound_and_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = MinimizeOptions::default();
    for i in 0..15 {
        let inst = common::random_instance(&mut rng);
        let a = inst.minimize(&opts).unwrap();
        let b = inst.minimize(&opts).unwrap();
        assert_eq!(a, b, "instance {i}");
        let grid = inst.grid_minimize(201, opts.tol_feas).unwrap();
        if let (Some(x), Some(bounds)) = (&a.minimizer, a.value_bounds) {
            assert!(inst.domain.contains(x));
            assert!(inst.is_feasible(x, opts.tol_feas).unwrap());
            assert!(bounds.hi - bounds.lo <= opts.tol_opt + 1e-12);
            if let Some(g) = grid.value() {
                assert!(bounds.lo <= g + 1e-12, "instance {i}: bound {} above grid {g}", bounds.lo);
            }
        } else {
            assert!(grid.value().is_none(), "instance {i}: grid feasible, B&B not");
        }
    }
}

/// Grid over `[-1, 1]` with step `2 / (n - 1)`.
fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect()
}

/// Brute force: is `max(g, hbar)(x, y) >= 0` for every grid `y`?
fn relaxed_feasible_by_grid(p: &GsipProblem, x: f64, ys: &[f64]) -> bool {
    let g = &p.g;
    let hbar = p.hbar().unwrap();
    ys.iter().all(|&y| {
        let e = [("x", x), ("y", y)];
        g.eval(&e).unwrap().max(hbar.eval(&e).unwrap()) >= 0.0
    })
}

#[test]
fn relaxation_feasible_set_on_grid() {
    let opts = MinimizeOptions::default();
    let xs = grid(201);
    let ys = grid(2001);
    for p in [cex1(), cex2()] {
        let solver: Vec<bool> = xs.iter().map(|&x| p.check_relaxation_feasible(&[x], &opts).unwrap()).collect();
        for (&x, &ok) in xs.iter().zip(&solver) {
            let inside = x <= -0.5 + 1e-12;
            assert_eq!(ok, inside, "{} at x = {x}", p.name);
            assert_eq!(relaxed_feasible_by_grid(&p, x, &ys), inside, "{} oracle at x = {x}", p.name);
        }
    }
}

#[test]
fn lower_bounding_with_empty_set_is_the_box_minimum() {
    let opts = MinimizeOptions::default();
    for p in [cex1(), cex2()] {
        let out = p.build_lower_bounding(&[]).unwrap().minimize(&opts).unwrap();
        let oracle = grid(201).into_iter().map(|x| -x).fold(f64::INFINITY, f64::min);
        assert!((out.value().unwrap() - oracle).abs() <= 1e-6);
        assert!((out.minimizer.unwrap()[0] - 1.0).abs() <= 1e-6);
    }
}

#[test]
fn sip_llp_values_match_grid() {
    let opts = MinimizeOptions::new(1e-12, 1e-9);
    let ys = grid(2001);
    for p in [cex1(), cex2()] {
        let hbar = p.hbar().unwrap();
        for x in [1.0, 0.25, -0.5, -0.8] {
            let oracle = ys
                .iter()
                .map(|&y| {
                    let e = [("x", x), ("y", y)];
                    p.g.eval(&e).unwrap().max(hbar.eval(&e).unwrap())
                })
                .fold(f64::INFINITY, f64::min);
            let v = p.build_sip_llp(&[x]).unwrap().minimize(&opts).unwrap().value().unwrap();
            assert!(v <= oracle + 1e-9, "{} x = {x}: {v} vs {oracle}", p.name);
            assert!(oracle - v <= 2.0 * 2.0 / 2000.0, "{} x = {x}: {v} vs {oracle}", p.name);
        }
    }
}

#[test]
fn slater_point_of_the_first_counterexample() {
    let p = cex1();
    let opts = MinimizeOptions::default();
    let ys = grid(2001);
    let hbar = p.hbar().unwrap();
    let margin = |x: f64| {
        ys.iter()
            .map(|&y| {
                let e = [("x", x), ("y", y)];
                p.g.eval(&e).unwrap().max(hbar.eval(&e).unwrap())
            })
            .fold(f64::INFINITY, f64::min)
    };
    assert!((margin(-0.6) - 0.2).abs() <= 1e-9);
    assert!(margin(0.0) <= -1.0 + 1e-9);
    let cert = SlaterCertificate::new(vec![-0.6], 0.2, 0.1).unwrap();
    assert!(p.verify_slater(&cert, 0.5, &opts).unwrap());
    let cert = SlaterCertificate::new(vec![0.0], 1.0, 0.01).unwrap();
    assert!(!p.verify_slater(&cert, 0.5, &opts).unwrap());
}

#[test]
fn iterate_invariants() {
    for p in [cex1(), cex2()] {
        let hbar = p.hbar().unwrap();
        let f_l = p.f_l.unwrap();
        for variant in [Variant::LlpOnly, Variant::AuxLlp, Variant::SipLlp] {
            let mut cfg = AlgorithmConfig::new(variant);
            cfg.max_iter = 20;
            let res = run(&p, &cfg).unwrap();
            let mut prev = f64::NEG_INFINITY;
            for rec in &res.trace {
                let x = rec.x_k[0];
                assert!(rec.f_lk <= f_l + cfg.tol_opt);
                assert!(rec.f_lk >= prev - cfg.tol_opt);
                prev = rec.f_lk;
                if let Some(y) = rec.llp.as_ref().and_then(|l| l.y_k.as_ref()) {
                    let e = [("x", x), ("y", y[0])];
                    assert!(hbar.eval(&e).unwrap() <= cfg.tol_feas);
                }
                if let Some(aux) = &rec.aux {
                    let v = rec.llp.as_ref().unwrap().value.unwrap();
                    let e = [("x", x), ("y", aux.y_tilde_k[0])];
                    assert!(p.g.eval(&e).unwrap() <= cfg.alpha * v + cfg.tol_feas);
                }
            }
        }
    }
}
