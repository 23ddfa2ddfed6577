use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strict_epi::model::{eval, gradient, hessian, parse, sample_domain, Func};
use strict_epi::oracle::builtin_corpus;
use strict_epi::{Expr, Tolerances, Vector};

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// Expressions built only from everywhere-smooth pieces.
fn smooth_expr(n: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(0..n).prop_map(Expr::Var), (0.1f64..3.0).prop_map(Expr::Const)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Mul(b(x), b(y))),
            inner.clone().prop_map(|x| Expr::Neg(b(x))),
            // x / (1 + y^2)
            (inner.clone(), inner.clone()).prop_map(|(x, y)| {
                Expr::Div(b(x), b(Expr::Add(b(Expr::Const(1.0)), b(Expr::Pow(b(y), b(Expr::Const(2.0)))))))
            }),
            (inner.clone(), 2u8..=3).prop_map(|(x, k)| Expr::Pow(b(x), b(Expr::Const(f64::from(k))))),
            inner.clone().prop_map(|x| Expr::Call(Func::Exp, b(Expr::Mul(b(Expr::Const(0.3)), b(x))))),
            inner.clone().prop_map(|x| {
                Expr::Call(Func::Sqrt, b(Expr::Add(b(Expr::Const(1.0)), b(Expr::Pow(b(x), b(Expr::Const(2.0)))))))
            }),
            inner.prop_map(|x| {
                Expr::Call(Func::Log, b(Expr::Add(b(Expr::Const(1.0)), b(Expr::Pow(b(x), b(Expr::Const(2.0)))))))
            }),
        ]
    })
}

/// Any AST the parser can produce: no negative constants.
fn any_expr(n: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0..n).prop_map(Expr::Var),
        (0.0f64..1e6).prop_map(Expr::Const),
        (0u32..100).prop_map(|k| Expr::Const(f64::from(k))),
        (1e-12f64..1e-3).prop_map(Expr::Const),
    ];
    let funcs = prop_oneof![Just(Func::Exp), Just(Func::Log), Just(Func::Sqrt), Just(Func::Abs)];
    leaf.prop_recursive(5, 40, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Div(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Pow(b(x), b(y))),
            inner.clone().prop_map(|x| Expr::Neg(b(x))),
            (funcs.clone(), inner).prop_map(|(f, x)| Expr::Call(f, b(x))),
        ]
    })
}

fn f_at(e: &Expr, x: &[f64]) -> f64 {
    eval(e, x).expect("smooth expression evaluates")
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(i, h) in moves {
        y[i] += h;
    }
    y
}

/// Richardson-extrapolated central difference.
fn fd_partial(e: &Expr, x: &[f64], i: usize) -> f64 {
    let d = |h: f64| (f_at(e, &shifted(x, &[(i, h)])) - f_at(e, &shifted(x, &[(i, -h)]))) / (2.0 * h);
    let h = 1e-3;
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn fd_second(e: &Expr, x: &[f64], i: usize, j: usize) -> f64 {
    let d = |h: f64| {
        let f = |si: f64, sj: f64| f_at(e, &shifted(x, &[(i, si * h), (j, sj * h)]));
        (f(1.0, 1.0) - f(1.0, -1.0) - f(-1.0, 1.0) + f(-1.0, -1.0)) / (4.0 * h * h)
    };
    let h = 2e-3;
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn rel_err(exact: f64, approx: f64) -> f64 {
    (exact - approx).abs() / exact.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn derivatives_match_finite_differences(
        (dim, e) in (1usize..=3).prop_flat_map(|n| (Just(n), smooth_expr(n))),
        pt in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let x = Vector::new(pt[..dim].to_vec());
        let value = f_at(&e, x.coords());
        prop_assume!(value.is_finite() && value.abs() < 1e3);
        let g = gradient(&e, &x).unwrap();
        let h = hessian(&e, &x).unwrap();
        for i in 0..dim {
            let fd = fd_partial(&e, x.coords(), i);
            prop_assert!(rel_err(g[i], fd) < 1e-6, "d/dx{} of {}: {} vs {}", i + 1, e, g[i], fd);
            for j in 0..dim {
                let fd2 = fd_second(&e, x.coords(), i, j);
                prop_assert!(rel_err(h[(i, j)], fd2) < 1e-5, "H[{},{}] of {}: {} vs {}", i, j, e, h[(i, j)], fd2);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parse_inverts_unparse(e in any_expr(4)) {
        let text = e.unparse();
        let back = parse(&text, 4).unwrap();
        prop_assert_eq!(back, e, "{}", text);
    }
}

fn example() -> Expr {
    parse("1/((1-x^2)*(1-y^2))", 2).unwrap()
}

fn printed_determinant(x: f64, y: f64) -> f64 {
    4.0 * (5.0 * x * x * y * y + 3.0 * y * y + 3.0 * x * x + 1.0)
        / ((x - 1.0).powi(4) * (x + 1.0).powi(4) * (y - 1.0).powi(4) * (y + 1.0).powi(4))
}

#[test]
fn example_hessian_determinant_at_origin() {
    let h = hessian(&example(), &Vector::new(vec![0.0, 0.0])).unwrap();
    assert!((h.determinant() - 4.0).abs() < 1e-9);
}

#[test]
fn example_hessian_determinant_matches_closed_form() {
    let f = example();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let (x, y) = (rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9));
        let det = hessian(&f, &Vector::new(vec![x, y])).unwrap().determinant();
        let expected = printed_determinant(x, y);
        assert!((det - expected).abs() <= 1e-7 * expected, "({x}, {y}): {det} vs {expected}");
    }
}

#[test]
fn example_second_partial_at_origin() {
    let h = hessian(&example(), &Vector::new(vec![0.0, 0.0])).unwrap();
    assert!((h[(0, 0)] - 2.0).abs() < 1e-12 && (h[(1, 1)] - 2.0).abs() < 1e-12);
    assert!(h[(0, 1)].abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn sampled_points_are_domain_members(seed in any::<u64>(), which in 0usize..30) {
        let corpus = builtin_corpus(&Tolerances::default());
        let d = &corpus[which].spec.domain;
        let cloud = sample_domain(d, 64, seed).unwrap();
        prop_assert_eq!(cloud.len(), 64);
        for p in &cloud {
            prop_assert!(d.domain_member(p));
        }
    }
}
