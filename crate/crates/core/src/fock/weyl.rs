use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{basis_size, single_mode_ladder, tensor_modes, FockMatrix, Method};
use crate::error::{Error, Result};
use crate::symbol::PhasePoint;

/// Default bound on `|z|` accepted by [`weyl_operator`].
pub const WEYL_MAX_SHIFT: f64 = 10.0;

/// Composition law `W_z W_w = e^{c sigma(z, w)} W_{z+w}` holds with
/// `c = COMPOSITION_PHASE * i`, where `sigma(z, w) = x.w_xi - xi.w_x`.
pub const COMPOSITION_PHASE: f64 = -0.5;

/// `W_z = exp(i (x.P - xi.Q))` for `z = (x, xi)`, exponentiated on the truncated
/// generator. Modes commute, so the exponential factorizes into single-mode pieces.
///
/// Conjugation shifts the canonical pair: `W_z Q W_z^dagger = Q + x`,
/// `W_z P W_z^dagger = P + xi` (exact away from the truncation edge).
pub fn weyl_operator(z: &PhasePoint, n: usize, d: usize) -> Result<FockMatrix> {
    weyl_operator_bounded(z, n, d, WEYL_MAX_SHIFT)
}

pub fn weyl_operator_bounded(z: &PhasePoint, n: usize, d: usize, max_shift: f64) -> Result<FockMatrix> {
    if z.dims() != d {
        return Err(Error::DimensionMismatch(format!("shift has d = {}, expected {d}", z.dims())));
    }
    if z.norm() > max_shift {
        return Err(Error::InvalidInput(format!("|z| = {} exceeds the bound {max_shift}", z.norm())));
    }
    basis_size(n, d, 1)?;
    let (q, p) = single_mode_ladder(n);
    let factors: Vec<DMatrix<Complex64>> = (0..d)
        .map(|j| {
            let (x, xi) = (z.x()[j], z.xi()[j]);
            let gen: DMatrix<Complex64> = (&p * Complex64::new(0.0, x)) - (&q * Complex64::new(0.0, xi));
            gen.exp()
        })
        .collect();
    FockMatrix::new(n, d, 1, Method::Exponential, tensor_modes(&factors))
}
