use super::*;
use crate::symbol::{Symbol, SymbolExpr};
use approx::assert_abs_diff_eq;

fn pot(text: &str) -> SymbolExpr {
    SymbolExpr::parse(text, 1).unwrap()
}

fn sym(text: &str) -> Symbol {
    Symbol::parse(text, 1).unwrap()
}

#[test]
fn harmonic_oscillator_levels_agree_across_boundary_conditions() {
    let t = bc_sensitivity(&pot("x^2"), &BcConfig::default()).unwrap();
    for &l in &t.half_widths {
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let ev = t.eigenvalues(l, bc);
            for (k, e) in ev.iter().enumerate() {
                assert_abs_diff_eq!(*e, 2.0 * k as f64 + 1.0, epsilon = 1e-4);
            }
        }
    }
    assert!(t.final_discrepancy().iter().all(|&d| d <= 1e-6));
    assert_eq!(t.verdict, crate::Verdict::Pass);
    assert_eq!(t.to_csv().lines().count(), 1 + 30);
}

#[test]
fn cubic_potential_keeps_a_boundary_dependence() {
    let t = bc_sensitivity(&pot("x^3"), &BcConfig::default()).unwrap();
    for row in &t.discrepancy {
        assert!(row.iter().take(3).all(|&d| d > 0.1), "{row:?}");
    }
    assert_eq!(t.verdict, crate::Verdict::Fail);
}

#[test]
fn free_box_ground_state() {
    let ev = fd_eigenvalues(&pot("0"), std::f64::consts::PI, 4000, BoundaryCondition::Dirichlet, 2).unwrap();
    assert_abs_diff_eq!(ev[0], 0.25, epsilon = 1e-4);
    assert_abs_diff_eq!(ev[1], 1.0, epsilon = 1e-3);
    let neu = fd_eigenvalues(&pot("0"), std::f64::consts::PI, 4000, BoundaryCondition::Neumann, 2).unwrap();
    assert_abs_diff_eq!(neu[0], 0.0, epsilon = 1e-8);
    assert_abs_diff_eq!(neu[1], 0.25, epsilon = 1e-4);
}

#[test]
fn harmonic_levels_do_not_move_with_the_box() {
    // same spacing on both boxes, so only the tails differ
    let a = fd_eigenvalues(&pot("x^2"), 10.0, 5000, BoundaryCondition::Dirichlet, 5).unwrap();
    let b = fd_eigenvalues(&pot("x^2"), 12.0, 6000, BoundaryCondition::Dirichlet, 5).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-6);
    }
}

#[test]
fn mnorm_exact_values() {
    let cfg = MnormConfig::default();
    let zero = m_infty_one_norm(&sym("0"), &cfg).unwrap();
    assert_eq!(zero.value, 0.0);
    assert!(zero.converged);
    for text in ["1", "exp(-(x^2+xi^2))", "exp(-3*((x-1)^2+xi^2))", "cos(x)"] {
        let e = m_infty_one_norm(&sym(text), &cfg).unwrap();
        assert!((e.value - 1.0).abs() <= 0.05, "{text}: {e:?}");
        assert!(e.converged, "{text}");
    }
    let unbounded = m_infty_one_norm(&sym("x"), &cfg).unwrap();
    assert!(!unbounded.converged);
}

#[test]
fn mnorm_is_a_norm() {
    let cfg = MnormConfig::default();
    let f = m_infty_one_norm(&sym("cos(x)*exp(-xi^2)"), &cfg).unwrap().value;
    let g = m_infty_one_norm(&sym("sin(xi)"), &cfg).unwrap().value;
    let sum = m_infty_one_norm(&sym("cos(x)*exp(-xi^2)+sin(xi)"), &cfg).unwrap().value;
    let scaled = m_infty_one_norm(&sym("-3*cos(x)*exp(-xi^2)"), &cfg).unwrap().value;
    assert!(sum <= f + g + 1e-9);
    assert_abs_diff_eq!(scaled, 3.0 * f, epsilon = 1e-9 * f);
    assert!(f >= 1.0 - 0.05);
}

#[test]
fn mnorm_guards() {
    let cfg = MnormConfig { half_width: 1.0, ..MnormConfig::default() };
    assert!(matches!(m_infty_one_norm(&sym("1"), &cfg), Err(crate::Error::BoxTooSmall(_))));
    let two = Symbol::parse("1", 2).unwrap();
    assert!(matches!(m_infty_one_norm(&two, &MnormConfig::default()), Err(crate::Error::CostGuard(_))));
}

fn report(text: &str) -> DiagnosticsReport {
    build_report(&sym(text), &DiagnosticsConfig::default())
}

#[test]
fn simple_criterion_examples() {
    let cfg = default_scan_config(1);
    let cubic = check_simple_criterion(&sym("xi^2 + x^3"), &DEFAULT_SCAN_SCHEDULE, &cfg);
    assert_eq!(cubic.verdict, crate::Verdict::Fail);
    assert_eq!(cubic.witness.as_ref().map(|w| w.as_slice().to_vec()), Some(vec![2, 0]));
    assert_eq!(cubic.scans.len(), 3 + 4 + 5 + 6);
    for text in ["x^2 + xi^2", "cos(x) + xi^2"] {
        let r = check_simple_criterion(&sym(text), &DEFAULT_SCAN_SCHEDULE, &cfg);
        assert_eq!(r.verdict, crate::Verdict::Pass, "{text}");
        assert!(r.witness.is_none());
    }
    let singular = check_simple_criterion(&sym("xi^2 + 1/x"), &DEFAULT_SCAN_SCHEDULE, &cfg);
    assert_eq!(singular.verdict, crate::Verdict::Inconclusive);
    assert!(singular.reason.is_some());
}

#[test]
fn cv_bound_examples() {
    let quad = crate::fock::QuadratureConfig::default();
    let one = cv_bound_check(&sym("1"), &CvConfig::default(), &quad).unwrap();
    for n in &one.norms {
        assert_abs_diff_eq!(*n, 1.0, epsilon = 1e-8);
    }
    let trig = cv_bound_check(&sym("cos(x)*cos(xi)"), &CvConfig::default(), &quad).unwrap();
    assert_eq!(trig.verdict, crate::Verdict::Pass);
    assert!(trig.norms.iter().all(|&n| n <= 2.0));
    let linear = cv_bound_check(&sym("x"), &CvConfig::default(), &quad).unwrap();
    assert_eq!(linear.verdict, crate::Verdict::Fail);
    let unbounded = cv_report(&sym("x"), &CvConfig::default(), &DEFAULT_SCAN_SCHEDULE, &default_scan_config(1), &quad);
    assert!(!unbounded.applicable);
    assert_eq!(unbounded.verdict, None);
}

#[test]
fn potential_pattern_detection() {
    let v = schrodinger_potential(&sym("xi^2 + x^3")).unwrap();
    assert_abs_diff_eq!(v.eval_slice(&[2.0, 5.0]).unwrap().re, 8.0, epsilon = 1e-14);
    assert!(schrodinger_potential(&sym("(xi + x)^2")).is_none());
    assert!(schrodinger_potential(&sym("xi^2 + xi + x")).is_none());
    assert!(schrodinger_potential(&sym("2*xi^2")).is_none());
    assert!(schrodinger_potential(&sym("[[xi^2, 0], [0, xi^2]]")).is_none());
    assert!(schrodinger_potential(&Symbol::parse("xi1^2", 2).unwrap()).is_none());
}

#[test]
fn report_verdicts_on_the_corpus() {
    let cubic = report("xi^2 + x^3");
    assert_eq!(cubic.verdict, crate::Verdict::Fail);
    assert_eq!(cubic.simple_criterion.witness.as_ref().unwrap().as_slice(), &[2, 0]);
    assert_eq!(cubic.bc_sensitivity.as_ref().unwrap().verdict, crate::Verdict::Fail);
    for text in ["cos(x) + xi^2", "x^2 + xi^2", "cos(x)*cos(xi)", "2*x + 3*xi"] {
        let r = report(text);
        assert_eq!(r.verdict, crate::Verdict::Pass, "{text}: {:?}", r.caveats);
    }
    assert_eq!(report("x^2*xi^2").verdict, crate::Verdict::Fail);
    let singular = report("xi^2 + 1/x");
    assert_eq!(singular.verdict, crate::Verdict::Inconclusive);
    assert!(matches!(singular.oscillation_criterion, Outcome::Skipped(_)));
}

#[test]
fn matrix_symbol_report_passes() {
    let r = report("[[cos(x) + xi^2, sin(x)], [sin(x), -cos(x) + xi^2]]");
    assert_eq!(r.k, 2);
    assert_eq!(r.verdict, crate::Verdict::Pass, "{:?}", r.caveats);
    assert!(r.bc_sensitivity.is_none());
}

#[test]
fn simple_pass_implies_cv_plateau_where_it_applies() {
    for text in ["cos(x)*cos(xi)", "1", "sin(x + xi)", "exp(-x^2-xi^2)"] {
        let r = report(text);
        if r.simple_criterion.verdict == crate::Verdict::Pass && r.cv_bound.applicable {
            assert_eq!(r.cv_bound.verdict, Some(crate::Verdict::Pass), "{text}");
        }
    }
}

#[test]
fn report_json_is_deterministic() {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let text = "cos(x) + xi^2";
    let a = single.install(|| report(text).to_json());
    let b = many.install(|| report(text).to_json());
    assert_eq!(a, b);
    assert!(a.contains(REPORT_SCHEMA));
}
