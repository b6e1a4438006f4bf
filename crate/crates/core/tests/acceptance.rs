//! One pass/fail line per acceptance criterion. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use weyl_lab::diagnostics::{bc_sensitivity, build_report, m_infty_one_norm, BcConfig, DiagnosticsConfig, MnormConfig};
use weyl_lab::fock::{
    hermitian_eigenvalues, max_abs, quantize, single_mode_ladder, weyl_operator, FockMatrix, QuadratureConfig,
    QuantMethod, COMPOSITION_PHASE,
};
use weyl_lab::oracle::{self, Ladder};
use weyl_lab::phase::{covariance_residual, criterion_fit, intertwining_residual, oscillation_profile};
use weyl_lab::symbol::{MultiIndex, PhasePoint, Symbol, SymbolExpr};
use weyl_lab::toeplitz::{heat_toeplitz_residual, toeplitz_matrix, PolarConfig};
use weyl_lab::Verdict;

const NORMALIZATION_TOL: f64 = 1e-8;
const ORACLE_TOL: f64 = 1e-8;
const HARMONIC_MONOMIAL_TOL: f64 = 1e-8;
const HARMONIC_KERNEL_TOL: f64 = 1e-6;
const INTERTWINING_POLY_TOL: f64 = 1e-8;
const INTERTWINING_KERNEL_TOL: f64 = 1e-4;
const COVARIANCE_TOL: f64 = 1e-4;
const UNITARITY_TOL: f64 = 1e-10;
const PHASE_TOL: f64 = 1e-8;
const PHASE_PAIRS: usize = 20;
const PROFILE_TOL: f64 = 1e-8;
const C_ESTIMATE_RANGE: (f64, f64) = (1.6, 2.0);
const HEAT_TOEPLITZ_TOL: f64 = 1e-4;
const TOEPLITZ_DIAGONAL_TOL: f64 = 1e-5;
const BC_LEVEL_TOL: f64 = 1e-4;
const BC_AGREEMENT_TOL: f64 = 1e-6;
const BC_PERSISTENCE: f64 = 0.1;
const MNORM_DOUBLING_TOL: f64 = 0.05;
const MATRIX_HERMITIAN_TOL: f64 = 1e-10;

const RUNTIME_1: Duration = Duration::from_secs(10);
const RUNTIME_2: Duration = Duration::from_secs(30);
const RUNTIME_6: Duration = Duration::from_secs(120);
const RUNTIME_9: Duration = Duration::from_secs(60);
const RUNTIME_SUITE: Duration = Duration::from_secs(600);

const MATRIX_SYMBOL: &str = "[[cos(x) + xi^2, sin(x)], [sin(x), -cos(x) + xi^2]]";

type Check = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Check);

fn sym(text: &str) -> Symbol {
    Symbol::parse(text, 1).expect("symbol parses")
}

fn expr(text: &str) -> SymbolExpr {
    SymbolExpr::parse(text, 1).expect("expression parses")
}

fn pt(x: f64, xi: f64) -> PhasePoint {
    PhasePoint::new(vec![x, xi]).expect("finite point")
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: weyl_lab::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn block(m: &DMatrix<Complex64>, size: usize) -> DMatrix<Complex64> {
    m.view((0, 0), (size, size)).into_owned()
}

fn normalization() -> Check {
    let n = 32;
    let one = lib(quantize(&sym("1"), n, QuantMethod::Kernel, &quad()))?;
    let dev_one = max_abs(&(one.entries() - DMatrix::identity(n, n)));
    let (q, p) = single_mode_ladder(n);
    let x = lib(quantize(&sym("x"), n, QuantMethod::Kernel, &quad()))?;
    let xi = lib(quantize(&sym("xi"), n, QuantMethod::Kernel, &quad()))?;
    let dev_q = max_abs(&(block(x.entries(), 16) - block(&q, 16)));
    let dev_p = max_abs(&(block(xi.entries(), 16) - block(&p, 16)));
    ensure(dev_one <= NORMALIZATION_TOL, || format!("op(1) deviates by {dev_one:e}"))?;
    ensure(dev_q <= NORMALIZATION_TOL, || format!("op(x) deviates from Q by {dev_q:e}"))?;
    ensure(dev_p <= NORMALIZATION_TOL, || format!("op(xi) deviates from P by {dev_p:e}"))?;

    let mut oracle_dev: f64 = 0.0;
    for (r, c) in [(0, 1), (3, 4), (5, 4)] {
        oracle_dev = oracle_dev.max((oracle::ladder_entry(Ladder::Position, r, c) - q[(r, c)]).norm());
        oracle_dev = oracle_dev.max((oracle::ladder_entry(Ladder::Momentum, r, c) - p[(r, c)]).norm());
    }
    let cc = expr("cos(x)*cos(xi)");
    let fast = lib(quantize(&sym("cos(x)*cos(xi)"), n, QuantMethod::Kernel, &quad()))?;
    for (r, c) in [(0, 0), (1, 3), (2, 2)] {
        oracle_dev = oracle_dev.max((lib(oracle::kernel_element(&cc, r, c))? - fast.entry(r, c)).norm());
    }
    ensure(oracle_dev <= ORACLE_TOL, || format!("oracle disagreement {oracle_dev:e}"))?;
    Ok(format!("op(1) {dev_one:.1e}, Q {dev_q:.1e}, P {dev_p:.1e}, oracle {oracle_dev:.1e}"))
}

fn harmonic_anchor() -> Check {
    let f = sym("(x^2+xi^2)/2");
    let levels_err = |m: &FockMatrix| {
        hermitian_eigenvalues(m)
            .iter()
            .take(16)
            .enumerate()
            .map(|(k, e)| (e - (k as f64 + 0.5)).abs())
            .fold(0.0, f64::max)
    };
    let mono = levels_err(&lib(quantize(&f, 64, QuantMethod::Monomial, &quad()))?);
    let kern = levels_err(&lib(quantize(&f, 64, QuantMethod::Kernel, &quad()))?);
    ensure(mono <= HARMONIC_MONOMIAL_TOL, || format!("monomial levels off by {mono:e}"))?;
    ensure(kern <= HARMONIC_KERNEL_TOL, || format!("kernel levels off by {kern:e}"))?;
    Ok(format!("monomial {mono:.1e}, kernel {kern:.1e}"))
}

fn intertwining() -> Check {
    let g = MultiIndex::new(vec![1, 0]);
    let poly = lib(intertwining_residual(&sym("x^2"), &g, 64, 16, &quad()))?;
    let osc = lib(intertwining_residual(&sym("cos(x) + xi^2"), &g, 96, 24, &quad()))?;
    ensure(poly <= INTERTWINING_POLY_TOL, || format!("x^2 residual {poly:e}"))?;
    ensure(osc <= INTERTWINING_KERNEL_TOL, || format!("cos(x)+xi^2 residual {osc:e}"))?;
    Ok(format!("x^2 {poly:.1e}, cos(x)+xi^2 {osc:.1e}"))
}

fn covariance() -> Check {
    let f = sym("x^2+xi^2");
    let mut worst: f64 = 0.0;
    for r in [0.25, 0.5, 1.0] {
        for k in 0..8 {
            let a = k as f64 * std::f64::consts::FRAC_PI_4;
            worst = worst.max(lib(covariance_residual(&f, &pt(r * a.cos(), r * a.sin()), 128, 16, &quad()))?);
        }
    }
    let at_zero = lib(covariance_residual(&f, &PhasePoint::origin(1), 128, 16, &quad()))?;
    ensure(worst <= COVARIANCE_TOL, || format!("residual {worst:e}"))?;
    ensure(at_zero == 0.0, || format!("residual at z = 0 is {at_zero:e}"))?;
    Ok(format!("max over |z| <= 1 {worst:.1e}, z = 0 exactly 0"))
}

fn weyl_operators() -> Check {
    let n = 64;
    let mut unitarity: f64 = 0.0;
    for r in [0.5, 1.0, 1.5, 2.0] {
        for k in 0..6 {
            let a = k as f64 * std::f64::consts::PI / 3.0 + 0.2;
            let w = lib(weyl_operator(&pt(r * a.cos(), r * a.sin()), n, 1))?;
            unitarity = unitarity.max(max_abs(&(w.entries() * w.entries().adjoint() - DMatrix::identity(n, n))));
        }
    }
    ensure(unitarity <= UNITARITY_TOL, || format!("unitarity defect {unitarity:e}"))?;

    let mut rng = StdRng::seed_from_u64(20);
    let mut disk = || {
        let (r, a): (f64, f64) = (rng.random::<f64>().sqrt(), rng.random::<f64>() * std::f64::consts::TAU);
        pt(r * a.cos(), r * a.sin())
    };
    let (mut modulus, mut phase): (f64, f64) = (0.0, 0.0);
    for _ in 0..PHASE_PAIRS {
        let (z, w) = (disk(), disk());
        let lhs = lib(weyl_operator(&z, n, 1))?.entries() * lib(weyl_operator(&w, n, 1))?.entries();
        let rhs = block(lib(weyl_operator(&z.plus(&w), n, 1))?.entries(), 16);
        let lhs = block(&lhs, 16);
        let scalar = rhs.zip_fold(&lhs, Complex64::new(0.0, 0.0), |acc, b, a| acc + b.conj() * a) / rhs.norm_squared();
        modulus = modulus.max((scalar.norm() - 1.0).abs());
        let want = Complex64::from_polar(1.0, COMPOSITION_PHASE * z.symplectic(&w));
        phase = phase.max((scalar - want).norm());
    }
    ensure(modulus <= PHASE_TOL, || format!("phase scalar modulus off by {modulus:e}"))?;
    ensure(phase <= PHASE_TOL, || format!("phase scalar disagrees with the fixed sign by {phase:e}"))?;

    let (x, xi) = (0.5, -0.3);
    let w = lib(weyl_operator(&pt(x, xi), n, 1))?;
    let mut oracle_dev: f64 = 0.0;
    for (r, c) in [(0, 0), (1, 2), (3, 1)] {
        oracle_dev = oracle_dev.max((oracle::weyl_overlap(-x, xi, r, c) - w.entry(r, c)).norm());
    }
    ensure(oracle_dev <= ORACLE_TOL, || format!("oracle disagreement {oracle_dev:e}"))?;
    Ok(format!(
        "unitarity {unitarity:.1e}, {PHASE_PAIRS} pairs: modulus {modulus:.1e}, phase {phase:.1e}, oracle {oracle_dev:.1e}"
    ))
}

fn verdicts() -> Check {
    let cfg = DiagnosticsConfig::default();
    let cases = [
        ("x^2+xi^2", Verdict::Pass),
        ("cos(x)+xi^2", Verdict::Pass),
        ("cos(x)*cos(xi)", Verdict::Pass),
        ("2*x + 3*xi", Verdict::Pass),
        ("x - xi", Verdict::Pass),
        ("xi^2+x^3", Verdict::Fail),
        ("x^2*xi^2", Verdict::Fail),
    ];
    for (text, want) in cases {
        let report = build_report(&sym(text), &cfg);
        ensure(report.verdict == want, || format!("{text}: {} instead of {want}", report.verdict))?;
        if text == "xi^2+x^3" {
            let witness = report.simple_criterion.witness.as_ref().map(|g| g.as_slice().to_vec());
            ensure(witness.as_deref() == Some(&[2, 0][..]), || format!("witness {witness:?}"))?;
        }
    }
    Ok(format!("{} symbols as expected, xi^2+x^3 witness (2,0)", cases.len()))
}

fn oscillation_closed_form() -> Check {
    let f = sym("x^2+xi^2");
    let amplitudes = [1.0, 2.0, 4.0, 8.0];
    let shifts: Vec<PhasePoint> = amplitudes.iter().map(|&a| PhasePoint::along(1, 0, a)).collect();
    let profile = lib(oscillation_profile(&f, 1, &shifts, 32, 16, &quad()))?;
    let dev = amplitudes.iter().zip(&profile.norms).map(|(a, n)| (n - 2.0 * a).abs()).fold(0.0, f64::max);
    let fit = lib(criterion_fit(&profile))?;
    ensure(dev <= PROFILE_TOL, || format!("n_1 deviates from 2|a| by {dev:e}"))?;
    let (lo, hi) = C_ESTIMATE_RANGE;
    ensure((lo..=hi).contains(&fit.c_estimate), || format!("c_estimate {}", fit.c_estimate))?;
    Ok(format!("n_1 = 2|a| within {dev:.1e}, c_estimate {:.4}", fit.c_estimate))
}

fn heat_toeplitz() -> Check {
    let polar = PolarConfig::default();
    let mut parts = Vec::new();
    for text in ["1", "x", "(x^2+xi^2)/2"] {
        let r = lib(heat_toeplitz_residual(&sym(text), 64, 16, &polar, &quad()))?;
        ensure(r <= HEAT_TOEPLITZ_TOL, || format!("{text}: residual {r:e}"))?;
        parts.push(format!("{text} {r:.1e}"));
    }
    let t = lib(toeplitz_matrix(&sym("(x^2+xi^2)/2"), 64, &polar))?;
    let want =
        DMatrix::from_fn(
            16,
            16,
            |r, c| if r == c { Complex64::new(r as f64 + 1.0, 0.0) } else { Complex64::new(0.0, 0.0) },
        );
    let diag = max_abs(&(block(t.entries(), 16) - want));
    ensure(diag <= TOEPLITZ_DIAGONAL_TOL, || format!("Toeplitz block deviates from n+1 by {diag:e}"))?;
    let brute = lib(oracle::toeplitz_entry(&expr("(x^2+xi^2)/2"), 2, 2))?;
    let oracle_dev = (brute - t.entry(2, 2)).norm();
    ensure(oracle_dev <= ORACLE_TOL, || format!("oracle disagreement {oracle_dev:e}"))?;
    Ok(format!("{}, diagonal {diag:.1e}, oracle {oracle_dev:.1e}", parts.join(", ")))
}

fn bc_evidence() -> Check {
    let cfg = BcConfig::default();
    let harmonic = lib(bc_sensitivity(&expr("x^2"), &BcConfig { half_widths: vec![12.0], ..cfg.clone() }))?;
    let mut level_err: f64 = 0.0;
    for bc in [weyl_lab::diagnostics::BoundaryCondition::Dirichlet, weyl_lab::diagnostics::BoundaryCondition::Neumann] {
        for (k, e) in harmonic.eigenvalues(12.0, bc).iter().enumerate() {
            level_err = level_err.max((e - (2.0 * k as f64 + 1.0)).abs());
        }
    }
    let agreement = harmonic.final_discrepancy().iter().copied().fold(0.0, f64::max);
    ensure(level_err <= BC_LEVEL_TOL, || format!("x^2 levels off by {level_err:e}"))?;
    ensure(agreement <= BC_AGREEMENT_TOL, || format!("x^2 BC discrepancy {agreement:e}"))?;

    let cubic = lib(bc_sensitivity(&expr("x^3"), &BcConfig { half_widths: vec![8.0, 10.0, 12.0], ..cfg }))?;
    let mut smallest: f64 = f64::INFINITY;
    for row in &cubic.discrepancy {
        let top = row.iter().take(3).copied().fold(0.0, f64::max);
        smallest = smallest.min(top);
    }
    ensure(cubic.discrepancy.len() == 3 && smallest > BC_PERSISTENCE, || {
        format!("x^3 discrepancy only {smallest:e} on some box")
    })?;
    Ok(format!(
        "x^2 levels {level_err:.1e}, agreement {agreement:.1e}; x^3 min over L of max discrepancy {smallest:.3}"
    ))
}

fn mnorm() -> Check {
    let cfg = MnormConfig::default();
    let zero = lib(m_infty_one_norm(&sym("0"), &cfg))?;
    ensure(zero.value == 0.0, || format!("zero symbol gives {}", zero.value))?;
    let g = sym("exp(-(x^2+xi^2))");
    let coarse = lib(m_infty_one_norm(&g, &cfg))?;
    let fine = lib(m_infty_one_norm(&g, &MnormConfig { points_per_axis: 2 * cfg.points_per_axis, ..cfg }))?;
    let change = (fine.value - coarse.value).abs() / coarse.value;
    ensure(change <= MNORM_DOUBLING_TOL, || format!("Gaussian changes by {change:.3} under grid doubling"))?;
    ensure(coarse.converged, || "Gaussian not converged under box doubling".into())?;
    let x = lib(m_infty_one_norm(&sym("x"), &cfg))?;
    ensure(!x.converged, || format!("g = x reported converged at {}", x.value))?;
    Ok(format!(
        "zero 0, Gaussian {:.4} -> {:.4} ({:.1}%), x unconverged ({:.2} -> {:.2})",
        coarse.value,
        fine.value,
        100.0 * change,
        x.value,
        x.refined_value.unwrap_or(f64::NAN)
    ))
}

fn operator_valued() -> Check {
    let f = sym(MATRIX_SYMBOL);
    let a = lib(quantize(&f, 64, QuantMethod::Auto, &quad()))?;
    let dev = a.hermitian_deviation();
    ensure(dev <= MATRIX_HERMITIAN_TOL, || format!("hermitian deviation {dev:e}"))?;
    let report = build_report(&f, &DiagnosticsConfig::default());
    ensure(report.verdict == Verdict::Pass, || format!("check reports {}", report.verdict))?;
    Ok(format!("hermitian deviation {dev:.1e}, check PASS"))
}

/// Serialized outputs of a representative run.
fn artifacts() -> Result<Vec<(&'static str, Vec<u8>)>, String> {
    let q = quad();
    let mut out = Vec::new();
    let harmonic = lib(quantize(&sym("x^2+xi^2"), 64, QuantMethod::Monomial, &q))?;
    out.push(("monomial.bin", harmonic.to_binary()));
    let kernel = lib(quantize(&sym("cos(x)*cos(xi)"), 32, QuantMethod::Kernel, &q))?;
    out.push(("kernel.json", serde_json::to_vec(&kernel).map_err(|e| e.to_string())?));
    let toeplitz = lib(toeplitz_matrix(&sym("(x^2+xi^2)/2"), 32, &PolarConfig::default()))?;
    out.push(("toeplitz.bin", toeplitz.to_binary()));
    let shifts = weyl_lab::phase::default_shifts(1);
    let profile = lib(oscillation_profile(&sym("cos(x)*cos(xi)"), 2, &shifts, 32, 16, &q))?;
    out.push(("profile.json", serde_json::to_vec(&profile).map_err(|e| e.to_string())?));
    let cfg = DiagnosticsConfig::default();
    for (name, text) in [("report_pass.json", "cos(x)+xi^2"), ("report_fail.json", "xi^2+x^3")] {
        out.push((name, build_report(&sym(text), &cfg).to_json().into_bytes()));
    }
    let bc = lib(bc_sensitivity(&expr("x^3"), &BcConfig::default()))?;
    out.push(("bc.csv", bc.to_csv().into_bytes()));
    let m = lib(m_infty_one_norm(&sym("exp(-(x^2+xi^2))"), &MnormConfig::default()))?;
    out.push(("mnorm.json", serde_json::to_vec(&m).map_err(|e| e.to_string())?));
    Ok(out)
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| e.to_string())?;
    Ok(pool.install(f))
}

fn determinism(suite_start: Instant) -> Check {
    let one = in_pool(1, artifacts)??;
    let eight = in_pool(8, artifacts)??;
    for ((name, a), (_, b)) in one.iter().zip(&eight) {
        ensure(a == b, || format!("{name} differs between 1 and 8 workers"))?;
    }
    let total = suite_start.elapsed();
    ensure(total <= RUNTIME_SUITE, || format!("suite took {:.0} s", total.as_secs_f64()))?;
    Ok(format!("{} artifacts byte-identical, suite {:.1} s", one.len(), total.as_secs_f64()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let criteria: [Criterion; 11] = [
        ("normalization", Some(RUNTIME_1), normalization),
        ("harmonic oscillator anchor", Some(RUNTIME_2), harmonic_anchor),
        ("intertwining", None, intertwining),
        ("covariance", None, covariance),
        ("Weyl operators", None, weyl_operators),
        ("criterion verdicts", Some(RUNTIME_6), verdicts),
        ("oscillation closed form", None, oscillation_closed_form),
        ("heat/Toeplitz equivalence", None, heat_toeplitz),
        ("BC-sensitivity evidence", Some(RUNTIME_9), bc_evidence),
        ("M^{inf,1} estimator", None, mnorm),
        ("operator-valued path", None, operator_valued),
    ];
    let mut failures = 0;
    let mut report = |id: usize, name: &str, limit: Option<Duration>, result: Check, took: Duration| {
        let result = result.and_then(|detail| match limit {
            Some(l) if took > l => {
                Err(format!("{detail}; runtime {:.1} s exceeds {} s", took.as_secs_f64(), l.as_secs()))
            }
            _ => Ok(detail),
        });
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {id:>2} {name}: {detail} ({:.1} s)", took.as_secs_f64());
    };
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let result = run();
        report(i + 1, name, limit, result, t.elapsed());
    }
    let t = Instant::now();
    let result = determinism(start);
    report(12, "determinism", None, result, t.elapsed());
    if failures == 0 {
        println!("acceptance: all 12 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of 12 criteria fail");
        ExitCode::FAILURE
    }
}
