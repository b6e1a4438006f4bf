use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use weyl_lab::diagnostics::{bc_sensitivity, build_report, m_infty_one_norm, m_infty_one_norm_sampled, MnormEstimate};
use weyl_lab::fock::{
    hermitian_eigenvalues, operator_norm, quantize, quantize_kernel, single_mode_ladder, weyl_operator, FockMatrix,
};
use weyl_lab::oracle::{self, Ladder};
use weyl_lab::symbol::{PhasePoint, Symbol, SymbolExpr};
use weyl_lab::toeplitz::{
    coherent_state, heat_toeplitz_residual, heat_variance, toeplitz_matrix, HeatPointwise, SampledSidecar,
    SampledSymbol, CALIBRATED_TIME,
};
use weyl_lab::Verdict;

use crate::config::{Format, RunConfig};
use crate::output::{csv_bytes, json_with_config, to_json, write_bytes, write_config_sidecar};
use crate::{Failure, OracleCommand, EXIT_FAIL, EXIT_INCONCLUSIVE};

const DEFAULT_N: usize = 64;
const DEFAULT_M: usize = 16;
const DEFAULT_HEAT_TOLERANCE: f64 = 1e-4;

fn parse_symbol(cfg: &RunConfig, text: &str) -> Result<Symbol, Failure> {
    let f = Symbol::parse(text, cfg.d())?;
    if let Some(k) = cfg.k {
        if k != f.k() {
            return Err(Failure::usage(format!("config says k = {k} but the symbol has k = {}", f.k())));
        }
    }
    Ok(f)
}

/// Prints to stdout, or to stderr when stdout carries the artifact.
fn say(artifact_on_stdout: bool, line: String) {
    if artifact_on_stdout {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

#[derive(Serialize)]
struct MatrixBody<'a> {
    matrix: &'a FockMatrix,
}

fn write_matrix(cfg: &RunConfig, m: &FockMatrix, out: Option<&Path>) -> Result<(), Failure> {
    let Some(path) = out else { return Ok(()) };
    match cfg.format() {
        Format::Json => write_bytes(Some(path), json_with_config(cfg, &MatrixBody { matrix: m }).as_bytes()),
        Format::Binary => {
            write_bytes(Some(path), &m.to_binary())?;
            write_config_sidecar(cfg, Some(path))
        }
    }
}

pub fn quantize_cmd(cfg: &RunConfig, text: &str, out: Option<&Path>) -> Result<u8, Failure> {
    let f = parse_symbol(cfg, text)?;
    let mut eff = cfg.clone();
    eff.d = Some(f.dims());
    eff.n = Some(cfg.n.unwrap_or(DEFAULT_N));
    eff.method = Some(cfg.method());
    eff.format = Some(cfg.format());
    let m = quantize(&f, eff.n.unwrap_or(DEFAULT_N), cfg.method(), &cfg.quadrature())?;
    write_matrix(&eff, &m, out)?;
    println!("hermitian_deviation {:e}", m.hermitian_deviation());
    println!("operator_norm {}", operator_norm(&m));
    Ok(0)
}

pub fn check(cfg: &RunConfig, text: &str, out: Option<&Path>, bc_csv: Option<&Path>) -> Result<u8, Failure> {
    let f = parse_symbol(cfg, text)?;
    let mut dcfg = cfg.diagnostics.clone().unwrap_or_default();
    if let Some(q) = &cfg.quadrature {
        dcfg.quadrature = q.clone();
    }
    if let Some(bc) = &cfg.bc {
        dcfg.bc = bc.clone();
    }
    if let Some(mn) = cfg.mnorm {
        dcfg.mnorm = mn;
    }
    let report = build_report(&f, &dcfg);
    let mut json = report.to_json();
    json.push('\n');
    write_bytes(out, json.as_bytes())?;
    let on_stdout = out.is_none();
    say(on_stdout, format!("verdict {}", report.verdict));
    if let Some(w) = &report.simple_criterion.witness {
        say(on_stdout, format!("witness {:?}", w.as_slice()));
    }
    if let Some(path) = bc_csv {
        match report.bc_sensitivity.as_ref().and_then(|b| b.table.as_ref()) {
            Some(table) => write_bytes(Some(path), &csv_bytes(&table.rows)?)?,
            None => eprintln!("note: no boundary-condition table for this symbol, {} not written", path.display()),
        }
    }
    Ok(match report.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

#[derive(Serialize)]
struct EigenRow {
    index: usize,
    eigenvalue: f64,
}

pub fn spectrum(cfg: &RunConfig, text: &str, out: Option<&Path>) -> Result<u8, Failure> {
    let f = parse_symbol(cfg, text)?;
    let mut eff = cfg.clone();
    eff.d = Some(f.dims());
    eff.n = Some(cfg.n.unwrap_or(DEFAULT_N));
    eff.method = Some(cfg.method());
    let m = quantize(&f, eff.n.unwrap_or(DEFAULT_N), cfg.method(), &cfg.quadrature())?;
    let dev = m.hermitian_deviation();
    if dev > 1e-8 * m.max_abs().max(1.0) {
        return Err(Failure::numeric(format!("quantization is not hermitian (deviation {dev:e})")));
    }
    let ev = hermitian_eigenvalues(&m);
    let levels = cfg.levels.unwrap_or(ev.len()).min(ev.len());
    eff.levels = Some(levels);
    let rows = ev.iter().take(levels).enumerate().map(|(index, &eigenvalue)| EigenRow { index, eigenvalue });
    write_bytes(out, &csv_bytes(rows)?)?;
    write_config_sidecar(&eff, out)?;
    say(out.is_none(), format!("hermitian_deviation {dev:e}"));
    Ok(0)
}

pub fn bc(cfg: &RunConfig, potential: &str, out: Option<&Path>, json: Option<&Path>) -> Result<u8, Failure> {
    let v = SymbolExpr::parse(potential, 1)?;
    let bcfg = cfg.bc.clone().unwrap_or_default();
    let table = bc_sensitivity(&v, &bcfg)?;
    let eff = RunConfig { bc: Some(bcfg), ..cfg.clone() };
    write_bytes(out, &csv_bytes(&table.rows)?)?;
    write_config_sidecar(&eff, out)?;
    if let Some(path) = json {
        write_bytes(Some(path), json_with_config(&eff, &table).as_bytes())?;
    }
    let on_stdout = out.is_none();
    say(on_stdout, format!("verdict {}", table.verdict));
    say(on_stdout, format!("final_discrepancy {:?}", table.final_discrepancy()));
    Ok(0)
}

pub fn toeplitz(cfg: &RunConfig, text: &str, verify_heat: bool, out: Option<&Path>) -> Result<u8, Failure> {
    let f = parse_symbol(cfg, text)?;
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let polar = cfg.polar();
    let t = toeplitz_matrix(&f, n, &polar)?;
    let mut eff = cfg.clone();
    eff.d = Some(f.dims());
    eff.n = Some(n);
    eff.format = Some(cfg.format());
    eff.polar = Some(polar.clone());
    if verify_heat {
        eff.m = Some(cfg.m.unwrap_or(DEFAULT_M));
        eff.tolerance = Some(cfg.tolerance.unwrap_or(DEFAULT_HEAT_TOLERANCE));
    }
    write_matrix(&eff, &t, out)?;
    println!("hermitian_deviation {:e}", t.hermitian_deviation());
    if verify_heat {
        let m = eff.m.unwrap_or(DEFAULT_M);
        let tol = eff.tolerance.unwrap_or(DEFAULT_HEAT_TOLERANCE);
        let r = heat_toeplitz_residual(&f, n, m, &polar, &cfg.quadrature())?;
        println!("heat_residual {r:e}");
        if r > tol {
            return Err(Failure::numeric(format!("heat residual {r:e} exceeds tolerance {tol:e}")));
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct MnormBody<'a> {
    source: String,
    estimate: &'a MnormEstimate,
}

fn read_sampled(path: &Path) -> Result<SampledSymbol, Failure> {
    let side = crate::output::sidecar_json_path(path);
    let meta = std::fs::read_to_string(&side)
        .map_err(|e| Failure::usage(format!("cannot read sidecar {}: {e}", side.display())))?;
    let meta: SampledSidecar =
        serde_json::from_str(&meta).map_err(|e| Failure::usage(format!("invalid sidecar {}: {e}", side.display())))?;
    let file = std::fs::File::open(path).map_err(|e| Failure::usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(SampledSymbol::read_binary(&mut std::io::BufReader::new(file), &meta)?)
}

pub fn mnorm(cfg: &RunConfig, symbol: Option<&str>, sampled: Option<&Path>, out: Option<&Path>) -> Result<u8, Failure> {
    let mcfg = cfg.mnorm.unwrap_or_default();
    let (source, estimate) = match (symbol, sampled) {
        (Some(text), _) => (text.to_string(), m_infty_one_norm(&parse_symbol(cfg, text)?, &mcfg)?),
        (None, Some(path)) => {
            let s = read_sampled(path)?;
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            (name, m_infty_one_norm_sampled(&s, &mcfg)?)
        }
        (None, None) => return Err(Failure::usage("give --symbol or --sampled".into())),
    };
    let eff = RunConfig { mnorm: Some(mcfg), ..cfg.clone() };
    if let Some(path) = out {
        write_bytes(Some(path), json_with_config(&eff, &MnormBody { source, estimate: &estimate }).as_bytes())?;
    }
    println!("value {}", estimate.value);
    if let Some(r) = estimate.refined_value {
        println!("refined_value {r}");
    }
    println!("converged {}", estimate.converged);
    Ok(0)
}

pub fn sample(cfg: &RunConfig, text: &str, half_width: f64, points: usize, out: &Path) -> Result<u8, Failure> {
    let f = parse_symbol(cfg, text)?;
    let entries = f.entries();
    let s = SampledSymbol::from_fn(f.dims(), f.k(), half_width, points, |z| {
        entries.iter().map(|e| e.eval_slice(z)).collect()
    })?;
    let mut bytes = Vec::new();
    s.write_binary(&mut bytes).map_err(|e| Failure::numeric(e.to_string()))?;
    write_bytes(Some(out), &bytes)?;
    write_bytes(Some(&crate::output::sidecar_json_path(out)), to_json(&s.sidecar()).as_bytes())?;
    Ok(0)
}

fn show(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn report_pair(reference: Complex64, fast: Complex64) -> Result<u8, Failure> {
    println!("oracle {}", show(reference));
    println!("fast {}", show(fast));
    println!("difference {:e}", (reference - fast).norm());
    Ok(0)
}

fn trusted_size(row: usize, col: usize) -> usize {
    (2 * (row.max(col) + 1)).max(32)
}

fn point(v: &[f64], name: &str) -> Result<PhasePoint, Failure> {
    if v.len() != 2 {
        return Err(Failure::usage(format!("--{name} takes two comma-separated numbers")));
    }
    Ok(PhasePoint::new(v.to_vec())?)
}

pub fn oracle(which: &OracleCommand) -> Result<u8, Failure> {
    let quad = weyl_lab::fock::QuadratureConfig::default();
    match which {
        OracleCommand::LadderEntry { row, col, momentum } => {
            let kind = if *momentum { Ladder::Momentum } else { Ladder::Position };
            let (q, p) = single_mode_ladder(row.max(col) + 2);
            let fast = if *momentum { p[(*row, *col)] } else { q[(*row, *col)] };
            report_pair(oracle::ladder_entry(kind, *row, *col), fast)
        }
        OracleCommand::KernelElement { symbol, row, col } => {
            let f = SymbolExpr::parse(symbol, 1)?;
            let fast = quantize_kernel(&f, trusted_size(*row, *col), &quad)?.entry(*row, *col);
            report_pair(oracle::kernel_element(&f, *row, *col)?, fast)
        }
        OracleCommand::ToeplitzEntry { symbol, row, col } => {
            let f = SymbolExpr::parse(symbol, 1)?;
            let t = toeplitz_matrix(&Symbol::Scalar(f.clone()), trusted_size(*row, *col), &Default::default())?;
            report_pair(oracle::toeplitz_entry(&f, *row, *col)?, t.entry(*row, *col))
        }
        OracleCommand::HeatValue { symbol, x, xi } => {
            let f = SymbolExpr::parse(symbol, 1)?;
            let fast = HeatPointwise::new(1, CALIBRATED_TIME, 24)?.eval(&f, &[*x, *xi])?;
            report_pair(oracle::heat_value(&f, heat_variance(CALIBRATED_TIME), *x, *xi)?, fast)
        }
        OracleCommand::WeylEntry { x, xi, row, col } => {
            let w = weyl_operator(&PhasePoint::new(vec![*x, *xi])?, trusted_size(*row, *col) + 64, 1)?;
            // the explicit action at (-x, xi) is W at (x, xi)
            report_pair(oracle::weyl_overlap(-x, *xi, *row, *col), w.entry(*row, *col))
        }
        OracleCommand::CoherentOverlap { z, w } => {
            let (pz, pw) = (point(z, "z")?, point(w, "w")?);
            let fast = coherent_state(&pz, 96)?.dotc(&coherent_state(&pw, 96)?);
            report_pair(oracle::coherent_overlap((z[0], z[1]), (w[0], w[1])), fast)
        }
    }
}
