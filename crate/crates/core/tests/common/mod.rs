//! Shared generators for the integration tests.

#![allow(dead_code)]

use gsip_lab::format::{ProblemDocument, VarDecl};
use gsip_lab::{BoxDomain, ConstraintSpec, Expr, Instance};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Expressions over `names` of depth at most `depth`. Divisions only use
/// denominators bounded away from zero.
pub fn arb_expr(names: Vec<String>, depth: u32) -> BoxedStrategy<Expr> {
    let leaf = prop_oneof![
        (-3.0..3.0f64).prop_map(Expr::Const),
        proptest::sample::select(names).prop_map(Expr::var),
    ];
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| -a),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / (b.powi(2) + 1.0)),
            (inner.clone(), 0u32..5).prop_map(|(a, k)| a.powi(k)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.min(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.max(b)),
        ]
    })
    .boxed()
}

/// `(lo, hi)` pairs with `lo <= hi` inside `[-3, 3]`.
pub fn arb_bounds(dim: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-3.0..3.0f64, 0.0..3.0f64), dim)
        .prop_map(|v| v.into_iter().map(|(lo, w)| (lo, (lo + w).min(3.0))).collect())
}

pub fn domain(names: &[String], bounds: &[(f64, f64)]) -> BoxDomain {
    BoxDomain::new(names.iter().zip(bounds).map(|(n, &(lo, hi))| (n.clone(), lo, hi))).unwrap()
}

/// A point of the box from unit-interval fractions.
pub fn point_in(bounds: &[(f64, f64)], t: &[f64]) -> Vec<f64> {
    bounds
        .iter()
        .zip(t)
        .map(|(&(lo, hi), &s)| (lo + s * (hi - lo)).clamp(lo, hi))
        .collect()
}

pub fn names(dim: usize) -> Vec<String> {
    ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect()
}

/// Random polynomial of total degree at most `degree`.
pub fn random_polynomial(rng: &mut ChaCha8Rng, names: &[String], degree: u32) -> Expr {
    let terms = rng.gen_range(1..=4);
    let mut poly = Expr::Const(rng.gen_range(-1.0..1.0));
    for _ in 0..terms {
        let mut term = Expr::Const(rng.gen_range(-2.0..2.0));
        let mut left = rng.gen_range(1..=degree);
        for (i, n) in names.iter().enumerate() {
            let k = if i + 1 == names.len() { left } else { rng.gen_range(0..=left) };
            left -= k;
            if k > 0 {
                term = term * Expr::var(n.clone()).powi(k);
            }
        }
        poly = poly + term;
    }
    poly
}

/// Random instance: polynomial objective of degree <= 4 in 1 or 2
/// variables, up to two polynomial constraints of degree <= 2.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let dim = rng.gen_range(1..=2);
    let names = names(dim);
    let bounds: Vec<(f64, f64)> = (0..dim)
        .map(|_| {
            let lo = rng.gen_range(-2.0..1.0);
            (lo, lo + rng.gen_range(0.5..2.0))
        })
        .collect();
    let objective = random_polynomial(rng, &names, 4);
    let constraints = (0..rng.gen_range(0..=2))
        .map(|_| {
            let c = random_polynomial(rng, &names, 2);
            if rng.gen_bool(0.5) {
                ConstraintSpec::le(c)
            } else {
                ConstraintSpec::ge(c)
            }
        })
        .collect();
    Instance::new(objective, constraints, domain(&names, &bounds))
}

/// Random `.gsip` documents over outer `x1, x2` and inner `y1, y2`. Each
/// declaration list is a nonempty prefix, expressions only use declared
/// names, and the objective only uses outer ones.
pub fn arb_document() -> BoxedStrategy<ProblemDocument> {
    let outer_names = ["x1", "x2"];
    let inner_names = ["y1", "y2"];
    (1usize..=2, 1usize..=2)
        .prop_flat_map(move |(nx, ny)| {
            let xs: Vec<String> = outer_names[..nx].iter().map(|s| s.to_string()).collect();
            let ys: Vec<String> = inner_names[..ny].iter().map(|s| s.to_string()).collect();
            let all: Vec<String> = xs.iter().chain(&ys).cloned().collect();
            (
                "[a-z][a-z0-9_ ]{0,10}",
                arb_bounds(nx),
                arb_bounds(ny),
                arb_expr(xs.clone(), 3),
                arb_expr(all.clone(), 3),
                proptest::collection::vec(arb_expr(all, 3), 1..=3),
                proptest::option::of(-5.0..5.0f64),
                proptest::option::of(-5.0..5.0f64),
                Just((xs, ys)),
            )
        })
        .prop_map(|(name, bx, by, objective, g, h, f_star, f_l, (xs, ys))| {
            let decl = |names: &[String], b: &[(f64, f64)]| {
                names.iter().zip(b).map(|(n, &(lo, hi))| VarDecl::new(n.clone(), lo, hi)).collect()
            };
            ProblemDocument {
                name,
                outer: decl(&xs, &bx),
                inner: decl(&ys, &by),
                objective,
                g,
                h,
                f_star,
                f_l,
            }
        })
        .boxed()
}
