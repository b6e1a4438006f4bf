use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use weyl_lab::diagnostics::{fd_eigenvalues, m_infty_one_norm, BoundaryCondition, MnormConfig};
use weyl_lab::fock::{
    hermitian_eigenvalues, max_abs, quantize, weyl_operator, FockMatrix, Method, QuadratureConfig, QuantMethod,
    COMPOSITION_PHASE,
};
use weyl_lab::phase::{covariance_residual, intertwining_residual, oscillation_profile};
use weyl_lab::symbol::{MultiIndex, PhasePoint, Polynomial, Symbol, SymbolExpr};
use weyl_lab::toeplitz::{heat_polynomial, toeplitz_matrix, PolarConfig};
use weyl_lab::Verdict;

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn sym(text: &str) -> Symbol {
    Symbol::parse(text, 1).unwrap()
}

/// Terms `(re, im, a, b)` of `sum (re + im i) x^a xi^b`.
fn terms(max_degree: u32, complex: bool) -> impl Strategy<Value = Vec<(f64, f64, u32, u32)>> {
    let im = if complex { (-2.0..2.0f64).boxed() } else { Just(0.0).boxed() };
    proptest::collection::vec(
        (-2.0..2.0f64, im, 0..=max_degree, 0..=max_degree).prop_filter("degree", move |t| t.2 + t.3 <= max_degree),
        1..5,
    )
}

fn poly_text(terms: &[(f64, f64, u32, u32)], conjugate: bool) -> String {
    terms
        .iter()
        .map(|&(re, im, a, b)| {
            let im = if conjugate { -im } else { im };
            format!("({re} + ({im})*1i)*x^{a}*xi^{b}")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn disk(radius: f64) -> impl Strategy<Value = PhasePoint> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(move |(u, a)| {
        PhasePoint::new(vec![radius * u.sqrt() * a.cos(), radius * u.sqrt() * a.sin()]).unwrap()
    })
}

fn verdict() -> impl Strategy<Value = Verdict> {
    prop_oneof![Just(Verdict::Pass), Just(Verdict::Fail), Just(Verdict::Inconclusive)]
}

fn rel(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    max_abs(&(a - b)) / max_abs(b).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn monomial_quantization_is_linear(f in terms(4, true), g in terms(4, true), l in -3.0..3.0f64) {
        let n = 12;
        let combined = format!("{} + ({l})*({})", poly_text(&f, false), poly_text(&g, false));
        let lhs = quantize(&sym(&combined), n, QuantMethod::Monomial, &quad()).unwrap();
        let a = quantize(&sym(&poly_text(&f, false)), n, QuantMethod::Monomial, &quad()).unwrap();
        let b = quantize(&sym(&poly_text(&g, false)), n, QuantMethod::Monomial, &quad()).unwrap();
        let rhs = a.entries() + b.entries() * Complex64::new(l, 0.0);
        prop_assert!(rel(lhs.entries(), &rhs) <= 1e-12);
    }

    #[test]
    fn conjugate_symbol_gives_the_adjoint(f in terms(4, true)) {
        let a = quantize(&sym(&poly_text(&f, false)), 12, QuantMethod::Monomial, &quad()).unwrap();
        let b = quantize(&sym(&poly_text(&f, true)), 12, QuantMethod::Monomial, &quad()).unwrap();
        prop_assert!(rel(b.entries(), &a.entries().adjoint()) <= 1e-12);
    }

    #[test]
    fn kernel_agrees_with_monomial_on_the_leading_block(f in terms(2, true)) {
        let s = sym(&poly_text(&f, false));
        let k = quantize(&s, 24, QuantMethod::Kernel, &quad()).unwrap();
        let m = quantize(&s, 24, QuantMethod::Monomial, &quad()).unwrap();
        let (kb, mb) = (k.restrict(12), m.restrict(12));
        prop_assert!(rel(&kb, &mb) <= 1e-8);
    }

    #[test]
    fn real_bounded_symbols_quantize_to_hermitian_matrices(
        a in -2.0..2.0f64, b in -1.5..1.5f64, c in -1.5..1.5f64, d in -2.0..2.0f64, e in -1.5..1.5f64,
    ) {
        let text = format!("({a})*cos(({b})*x + ({c})*xi) + ({d})*sin(({e})*x)");
        let m = quantize(&sym(&text), 16, QuantMethod::Kernel, &quad()).unwrap();
        prop_assert!(m.hermitian_deviation() <= 1e-9);
    }

    #[test]
    fn intertwining_holds_for_polynomials(f in terms(3, true), g in (0u32..=2, 0u32..=2).prop_filter("order", |g| g.0 + g.1 >= 1)) {
        let gamma = MultiIndex::new(vec![g.0, g.1]);
        let r = intertwining_residual(&sym(&poly_text(&f, false)), &gamma, 32, 8, &quad()).unwrap();
        prop_assert!(r <= 1e-8, "{r}");
    }

    #[test]
    fn covariance_holds_for_quadratics(f in terms(2, true), z in disk(1.0)) {
        let r = covariance_residual(&sym(&poly_text(&f, false)), &z, 64, 12, &quad()).unwrap();
        prop_assert!(r <= 1e-6, "{r}");
    }

    #[test]
    fn quadratic_oscillation_profiles_are_exact(a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, s in 0.1..8.0f64) {
        let f = sym(&format!("({a})*x^2 + ({b})*x*xi + ({c})*xi^2"));
        let shifts = [PhasePoint::along(1, 0, s), PhasePoint::along(1, 1, s)];
        let n1 = oscillation_profile(&f, 1, &shifts, 16, 8, &quad()).unwrap().norms;
        let n2 = oscillation_profile(&f, 2, &shifts, 16, 8, &quad()).unwrap().norms;
        let want = [(2.0 * a * s).abs(), (b * s).abs(), (b * s).abs(), (2.0 * c * s).abs()];
        for (got, want) in n1.iter().chain(&n2).zip(want) {
            prop_assert!((got - want).abs() <= 1e-10 * (1.0 + want));
        }
    }

    #[test]
    fn heat_transform_is_a_semigroup(f in terms(4, false), t1 in 0.0..1.0f64, t2 in 0.0..1.0f64) {
        let p = Polynomial::from_expr(&SymbolExpr::parse(&poly_text(&f, false), 1).unwrap()).unwrap();
        let twice = heat_polynomial(&heat_polynomial(&p, t1), t2);
        let once = heat_polynomial(&p, t1 + t2);
        let diff = twice.add(&once.scale(Complex64::new(-1.0, 0.0)));
        prop_assert!(diff.terms().all(|(_, c)| c.norm() <= 1e-10));
    }

    #[test]
    fn binary_and_json_round_trip(n in 1usize..6, k in 1usize..3, seed in proptest::collection::vec(-1e3..1e3f64, 72)) {
        let side = n * k;
        let entries = DMatrix::from_fn(side, side, |r, c| {
            let i = 2 * (r * side + c);
            Complex64::new(seed[i % seed.len()], seed[(i + 1) % seed.len()])
        });
        let m = FockMatrix::new(n, 1, k, Method::KernelQuadrature, entries).unwrap();
        prop_assert_eq!(&FockMatrix::from_binary(&m.to_binary()).unwrap(), &m);
        let back: FockMatrix = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        prop_assert_eq!(&back, &m);
    }

    #[test]
    fn verdict_combination(parts in proptest::collection::vec(verdict(), 1..8), rot in 0usize..8) {
        let v = Verdict::combine(parts.clone());
        let mut rotated = parts.clone();
        rotated.rotate_left(rot % parts.len());
        prop_assert_eq!(Verdict::combine(rotated), v);
        if parts.contains(&Verdict::Fail) {
            prop_assert_eq!(v, Verdict::Fail);
        } else if parts.iter().all(|&p| p == Verdict::Pass) {
            prop_assert_eq!(v, Verdict::Pass);
        } else {
            prop_assert_eq!(v, Verdict::Inconclusive);
        }
    }

    #[test]
    fn constant_potential_shifts_every_level(c in -5.0..5.0f64, bc in prop_oneof![Just(BoundaryCondition::Dirichlet), Just(BoundaryCondition::Neumann)]) {
        let base = fd_eigenvalues(&SymbolExpr::parse("x^2", 1).unwrap(), 6.0, 600, bc, 4).unwrap();
        let shifted = fd_eigenvalues(&SymbolExpr::parse(&format!("x^2 + ({c})"), 1).unwrap(), 6.0, 600, bc, 4).unwrap();
        for (b, s) in base.iter().zip(&shifted) {
            prop_assert!((s - b - c).abs() <= 1e-9);
        }
        prop_assert!(base.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn weyl_operators_are_unitary_and_compose_projectively(z in disk(1.0), w in disk(1.0)) {
        let n = 48;
        let wz = weyl_operator(&z, n, 1).unwrap();
        let ww = weyl_operator(&w, n, 1).unwrap();
        prop_assert!(max_abs(&(wz.entries() * wz.entries().adjoint() - DMatrix::identity(n, n))) <= 1e-10);
        let lhs = (wz.entries() * ww.entries()).view((0, 0), (12, 12)).into_owned();
        let rhs = weyl_operator(&z.plus(&w), n, 1).unwrap().restrict(12);
        let phase = Complex64::from_polar(1.0, COMPOSITION_PHASE * z.symplectic(&w));
        prop_assert!(max_abs(&(lhs - rhs * phase)) <= 1e-8);
    }

    #[test]
    fn toeplitz_of_a_bump_is_a_positive_contraction(
        a in 0.2..2.0f64, b in -1.0..1.0f64, c in 0.2..2.0f64, e in -1.0..1.0f64,
    ) {
        let f = sym(&format!("exp(-({a})*(x - ({b}))^2 - ({c})*(xi - ({e}))^2)"));
        let t = toeplitz_matrix(&f, 16, &PolarConfig::default()).unwrap();
        prop_assert!(t.hermitian_deviation() <= 1e-10);
        let ev = hermitian_eigenvalues(&t);
        prop_assert!(ev[0] >= -1e-10);
        prop_assert!(ev[ev.len() - 1] <= 1.0 + 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn m_infty_one_norm_is_homogeneous(c in prop_oneof![-3.0..-0.1f64, 0.1..3.0f64], a in 0.3..2.0f64) {
        let cfg = MnormConfig::default();
        let g = m_infty_one_norm(&sym(&format!("exp(-({a})*(x^2 + xi^2))")), &cfg).unwrap().value;
        let cg = m_infty_one_norm(&sym(&format!("({c})*exp(-({a})*(x^2 + xi^2))")), &cfg).unwrap().value;
        prop_assert!((cg - c.abs() * g).abs() <= 1e-9 * cg.max(1.0));
    }
}
