use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{basis_size, single_mode_ladder, tensor_modes, FockMatrix, Method, ONE};
use crate::error::{Error, Result};
use crate::symbol::Polynomial;

/// Largest total degree accepted by the monomial calculus.
pub const MONOMIAL_DEGREE_CAP: u32 = 12;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Powers `Q^0..Q^g` and `P^0..P^g` on a padded single-mode space.
struct Powers {
    q: Vec<DMatrix<Complex64>>,
    p: Vec<DMatrix<Complex64>>,
}

impl Powers {
    fn new(size: usize, degree: u32) -> Self {
        let (q1, p1) = single_mode_ladder(size);
        let mut q = vec![DMatrix::identity(size, size)];
        let mut p = vec![DMatrix::identity(size, size)];
        for _ in 0..degree {
            let nq = q.last().expect("non-empty") * &q1;
            let np = p.last().expect("non-empty") * &p1;
            q.push(nq);
            p.push(np);
        }
        Powers { q, p }
    }

    /// `2^{-a} sum_k C(a,k) Q^k P^b Q^{a-k}`, cropped to the leading `n` levels.
    ///
    /// Padding by the degree makes the crop exact: no product path that starts and
    /// ends below `n` reaches the padded cutoff.
    fn weyl_monomial(&self, a: u32, b: u32, n: usize) -> DMatrix<Complex64> {
        let size = self.q[0].nrows();
        let mut acc = DMatrix::<Complex64>::zeros(size, size);
        let pb = &self.p[b as usize];
        for k in 0..=a {
            let term = &self.q[k as usize] * pb * &self.q[(a - k) as usize];
            acc += term * Complex64::new(binomial(a, k), 0.0);
        }
        acc *= Complex64::new(0.5f64.powi(a as i32), 0.0);
        acc.view((0, 0), (n, n)).into_owned()
    }
}

/// `op(x^a xi^b)` for multi-exponents `a`, `b` of length `d`.
pub fn quantize_monomial(a: &[u32], b: &[u32], n: usize, d: usize) -> Result<FockMatrix> {
    if a.len() != d || b.len() != d {
        return Err(Error::DimensionMismatch(format!("exponent vectors must have length d = {d}")));
    }
    let mut exps = a.to_vec();
    exps.extend_from_slice(b);
    let mut p = Polynomial::zero(2 * d);
    p.add_term(exps, ONE);
    FockMatrix::new(n, d, 1, Method::Monomial, quantize_polynomial(&p, n, d)?)
}

/// Weyl quantization of a polynomial in `(x_1..x_d, xi_1..xi_d)`; Weyl quantization
/// factorizes over modes, so each term is a Kronecker product of single-mode pieces.
pub fn quantize_polynomial(p: &Polynomial, n: usize, d: usize) -> Result<DMatrix<Complex64>> {
    if p.vars() != 2 * d {
        return Err(Error::DimensionMismatch(format!("polynomial has {} variables, expected {}", p.vars(), 2 * d)));
    }
    let degree = p.degree();
    if degree > MONOMIAL_DEGREE_CAP {
        return Err(Error::CostGuard(format!(
            "monomial calculus is capped at degree {MONOMIAL_DEGREE_CAP}, got {degree}"
        )));
    }
    let side = basis_size(n, d, 1)?;
    let powers = Powers::new(n + degree as usize, degree);
    let mut acc = DMatrix::<Complex64>::zeros(side, side);
    for (e, c) in p.terms() {
        let factors: Vec<DMatrix<Complex64>> = (0..d).map(|j| powers.weyl_monomial(e[j], e[d + j], n)).collect();
        acc += tensor_modes(&factors) * c;
    }
    Ok(acc)
}
