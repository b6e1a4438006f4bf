//! Phase-space calculus on quantized operators.
//!
//! Shifting a form by `z` is conjugation `A -> W_z A W_{-z}`; differentiating along
//! `w` is the commutator `i [sigma(w, R), A]` with `sigma(w, R) = w_x.P - w_xi.Q`.
//! On symbols these correspond to `f -> f(. + z)` and `f -> w . grad f`.
//! All identities hold exactly in infinite dimensions; on the truncated basis
//! they are trustworthy on the leading block only.

mod oscillation;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    basis_size, embed_mode, quantize, single_mode_ladder, spectral_norm, weyl_operator, FockMatrix, Method,
    QuadratureConfig, QuantMethod,
};
use crate::symbol::{MultiIndex, PhasePoint, Symbol};

pub use oscillation::{
    criterion_fit, criterion_fit_with, default_shifts, oscillation_profile, refine_profile, CriterionConfig,
    CriterionVerdict, EvidenceRow, OscillationProfile,
};

/// `sigma(w, R) = sum_j (w_{x_j} P_j - w_{xi_j} Q_j)`, tensored with `I_k`.
pub fn sigma_matrix(w: &PhasePoint, n: usize, k: usize) -> Result<DMatrix<Complex64>> {
    let d = w.dims();
    let side = basis_size(n, d, k)?;
    let (q, p) = single_mode_ladder(n);
    let fock = n.pow(d as u32);
    let mut s = DMatrix::<Complex64>::zeros(fock, fock);
    for j in 0..d {
        let (wx, wxi) = (w.x()[j], w.xi()[j]);
        if wx != 0.0 {
            s += embed_mode(&p, n, d, j) * Complex64::new(wx, 0.0);
        }
        if wxi != 0.0 {
            s -= embed_mode(&q, n, d, j) * Complex64::new(wxi, 0.0);
        }
    }
    let out = if k == 1 { s } else { s.kronecker(&DMatrix::<Complex64>::identity(k, k)) };
    debug_assert_eq!(out.nrows(), side);
    Ok(out)
}

/// `i [sigma(w, R), A]`, the derivative of the form `A` along `w`.
pub fn form_derivative(a: &FockMatrix, w: &PhasePoint) -> Result<FockMatrix> {
    if w.dims() != a.d() {
        return Err(Error::DimensionMismatch(format!("direction has d = {}, matrix has d = {}", w.dims(), a.d())));
    }
    let s = sigma_matrix(w, a.n(), a.k())?;
    let e = a.entries();
    let comm = (&s * e - e * &s) * Complex64::new(0.0, 1.0);
    Ok(a.retag(Method::Commutator, comm))
}

/// `partial^gamma A` as nested commutators along the coordinate axes.
pub fn derivative_matrix(a: &FockMatrix, gamma: &MultiIndex) -> Result<FockMatrix> {
    if gamma.len() != 2 * a.d() {
        return Err(Error::DimensionMismatch(format!("multi-index must have length {}", 2 * a.d())));
    }
    let mut out = a.clone();
    for (axis, &times) in gamma.as_slice().iter().enumerate() {
        let e = PhasePoint::along(a.d(), axis, 1.0);
        for _ in 0..times {
            out = form_derivative(&out, &e)?;
        }
    }
    Ok(out)
}

/// `W_z ⊗ I_k`.
fn displacement(z: &PhasePoint, n: usize, k: usize) -> Result<DMatrix<Complex64>> {
    let w = weyl_operator(z, n, z.dims())?.into_entries();
    Ok(if k == 1 { w } else { w.kronecker(&DMatrix::<Complex64>::identity(k, k)) })
}

/// The shifted form `alpha_z A = W_z A W_{-z}`.
pub fn shift_form(a: &FockMatrix, z: &PhasePoint) -> Result<FockMatrix> {
    if z.dims() != a.d() {
        return Err(Error::DimensionMismatch("shift and matrix dimensions differ".into()));
    }
    let w = displacement(z, a.n(), a.k())?;
    let w_back = displacement(&z.negated(), a.n(), a.k())?;
    Ok(a.retag(Method::Exponential, &w * a.entries() * &w_back))
}

fn check_block(n: usize, m: usize) -> Result<()> {
    if m == 0 || 2 * m > n {
        return Err(Error::InvalidInput(format!("trusted block M = {m} must satisfy 1 <= M <= N/2 (N = {n})")));
    }
    Ok(())
}

/// `|| P_M (partial^gamma op(f) - op(partial^gamma f)) P_M ||`.
pub fn intertwining_residual(
    f: &Symbol,
    gamma: &MultiIndex,
    n: usize,
    m: usize,
    quad: &QuadratureConfig,
) -> Result<f64> {
    check_block(n, m)?;
    let a = quantize(f, n, QuantMethod::Auto, quad)?;
    let lhs = derivative_matrix(&a, gamma)?;
    let rhs = quantize(&f.differentiate(gamma)?, n, QuantMethod::Auto, quad)?;
    Ok(spectral_norm(&lhs.sub(&rhs)?.restrict(m)))
}

/// `|| P_M (W_z op(f) W_{-z} - op(f(. + z))) P_M ||`.
pub fn covariance_residual(f: &Symbol, z: &PhasePoint, n: usize, m: usize, quad: &QuadratureConfig) -> Result<f64> {
    check_block(n, m)?;
    let a = quantize(f, n, QuantMethod::Auto, quad)?;
    let lhs = shift_form(&a, z)?;
    let rhs = quantize(&f.shift(z)?, n, QuantMethod::Auto, quad)?;
    Ok(spectral_norm(&lhs.sub(&rhs)?.restrict(m)))
}
