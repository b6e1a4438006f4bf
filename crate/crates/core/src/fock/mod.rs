//! Truncated Hermite/Fock-basis matrices.
//!
//! With `d` modes and per-mode cutoff `N`, the basis is indexed by multi-indices
//! `(n_1, ..., n_d)` in lexicographic order (mode 1 slowest). For operator-valued
//! symbols each Fock vector is tensored with a `k`-dimensional coefficient space,
//! coefficient index fastest, so the matrix side is `N^d * k`.

mod kernel;
mod monomial;
pub(crate) mod serial;
mod weyl;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::Polynomial;
use crate::symbol::Symbol;

pub use kernel::{quantize_kernel, quantize_kernel_fn, QuadratureConfig, ResolvedQuadrature};
pub use monomial::{quantize_monomial, quantize_polynomial, MONOMIAL_DEGREE_CAP};
pub use weyl::{weyl_operator, COMPOSITION_PHASE, WEYL_MAX_SHIFT};

pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// How a matrix was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Monomial,
    KernelQuadrature,
    Exponential,
    Commutator,
    Toeplitz,
    ToeplitzSymbol,
}

impl Method {
    pub fn code(self) -> u32 {
        match self {
            Method::Monomial => 0,
            Method::KernelQuadrature => 1,
            Method::Exponential => 2,
            Method::Commutator => 3,
            Method::Toeplitz => 4,
            Method::ToeplitzSymbol => 5,
        }
    }

    pub fn from_code(code: u32) -> Result<Method> {
        Ok(match code {
            0 => Method::Monomial,
            1 => Method::KernelQuadrature,
            2 => Method::Exponential,
            3 => Method::Commutator,
            4 => Method::Toeplitz,
            5 => Method::ToeplitzSymbol,
            other => return Err(Error::Format(format!("unknown method code {other}"))),
        })
    }
}

/// A complex matrix on the truncated basis with the basis and method that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    pub(crate) n: usize,
    pub(crate) d: usize,
    pub(crate) k: usize,
    pub(crate) method: Method,
    pub(crate) entries: DMatrix<Complex64>,
    pub(crate) quadrature: Option<ResolvedQuadrature>,
}

impl FockMatrix {
    pub fn new(n: usize, d: usize, k: usize, method: Method, entries: DMatrix<Complex64>) -> Result<Self> {
        if n == 0 || d == 0 || k == 0 {
            return Err(Error::InvalidInput("N, d and k must be positive".into()));
        }
        let side = basis_size(n, d, k)?;
        if entries.nrows() != side || entries.ncols() != side {
            return Err(Error::DimensionMismatch(format!(
                "expected a {side}x{side} matrix for N={n}, d={d}, k={k}, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(FockMatrix { n, d, k, method, entries, quadrature: None })
    }

    pub fn identity(n: usize, d: usize, k: usize) -> Result<Self> {
        let side = basis_size(n, d, k)?;
        FockMatrix::new(n, d, k, Method::Monomial, DMatrix::identity(side, side))
    }

    pub fn with_quadrature(mut self, q: ResolvedQuadrature) -> Self {
        self.quadrature = Some(q);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn method(&self) -> Method {
        self.method
    }
    pub fn side(&self) -> usize {
        self.entries.nrows()
    }
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }
    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }
    pub fn quadrature(&self) -> Option<&ResolvedQuadrature> {
        self.quadrature.as_ref()
    }
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub(crate) fn same_shape(&self, other: &FockMatrix) -> Result<()> {
        if (self.n, self.d, self.k) != (other.n, other.d, other.k) {
            return Err(Error::DimensionMismatch(format!(
                "(N, d, k) = {:?} vs {:?}",
                (self.n, self.d, self.k),
                (other.n, other.d, other.k)
            )));
        }
        Ok(())
    }

    /// `self - other`, keeping this matrix's tag.
    pub fn sub(&self, other: &FockMatrix) -> Result<FockMatrix> {
        self.same_shape(other)?;
        Ok(self.retag(self.method, &self.entries - &other.entries))
    }

    pub fn add(&self, other: &FockMatrix) -> Result<FockMatrix> {
        self.same_shape(other)?;
        Ok(self.retag(self.method, &self.entries + &other.entries))
    }

    pub fn scale(&self, c: Complex64) -> FockMatrix {
        self.retag(self.method, &self.entries * c)
    }

    pub fn matmul(&self, other: &FockMatrix) -> Result<FockMatrix> {
        self.same_shape(other)?;
        Ok(self.retag(self.method, &self.entries * &other.entries))
    }

    pub fn adjoint(&self) -> FockMatrix {
        self.retag(self.method, self.entries.adjoint())
    }

    pub(crate) fn retag(&self, method: Method, entries: DMatrix<Complex64>) -> FockMatrix {
        FockMatrix { n: self.n, d: self.d, k: self.k, method, entries, quadrature: None }
    }

    /// Largest entrywise `|A_ij - conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let a = &self.entries;
        let mut dev = 0.0f64;
        for i in 0..a.nrows() {
            for j in i..a.ncols() {
                dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Compression to the trusted block: per-mode Fock levels below `m`, all
    /// coefficient indices.
    pub fn restrict(&self, m: usize) -> DMatrix<Complex64> {
        let idx = trusted_indices(self.n, self.d, self.k, m);
        self.entries.select_rows(&idx).select_columns(&idx)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn basis_size(n: usize, d: usize, k: usize) -> Result<usize> {
    n.checked_pow(d as u32)
        .and_then(|s| s.checked_mul(k))
        .filter(|&s| s <= 1 << 16)
        .ok_or_else(|| Error::CostGuard(format!("basis size for N={n}, d={d}, k={k} is too large")))
}

/// Basis indices whose every Fock level is below `m`.
pub fn trusted_indices(n: usize, d: usize, k: usize, m: usize) -> Vec<usize> {
    let m = m.min(n);
    let fock = n.pow(d as u32);
    let mut out = Vec::new();
    for rank in 0..fock {
        let mut r = rank;
        let mut inside = true;
        for _ in 0..d {
            if r % n >= m {
                inside = false;
            }
            r /= n;
        }
        if inside {
            out.extend((0..k).map(|c| rank * k + c));
        }
    }
    out
}

/// Spectral norm of an arbitrary complex matrix.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Largest singular value. On a truncated basis this is a lower bound for the
/// norm of the underlying form: compression never increases it.
pub fn operator_norm(m: &FockMatrix) -> f64 {
    spectral_norm(&m.entries)
}

/// Eigenvalues of a hermitian matrix in ascending order (the lower triangle is used).
pub fn hermitian_eigenvalues(m: &FockMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.entries.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Single-mode position and momentum on `n` levels:
/// `Q = (a + a^dagger)/sqrt 2`, `P = i(a^dagger - a)/sqrt 2`, so `P = -i d/dy`.
pub fn single_mode_ladder(n: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let mut q = DMatrix::zeros(n, n);
    let mut p = DMatrix::zeros(n, n);
    for m in 0..n.saturating_sub(1) {
        let c = ((m + 1) as f64 / 2.0).sqrt();
        q[(m, m + 1)] = Complex64::new(c, 0.0);
        q[(m + 1, m)] = Complex64::new(c, 0.0);
        p[(m, m + 1)] = Complex64::new(0.0, -c);
        p[(m + 1, m)] = Complex64::new(0.0, c);
    }
    (q, p)
}

/// Embeds single-mode matrices `ops[j]` acting on mode `j` into the full Fock space.
pub(crate) fn tensor_modes(ops: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_element(1, 1, ONE);
    for op in ops {
        out = out.kronecker(op);
    }
    out
}

/// Places an `n`-level single-mode operator on mode `mode` of `d`.
pub fn embed_mode(op: &DMatrix<Complex64>, n: usize, d: usize, mode: usize) -> DMatrix<Complex64> {
    let ops: Vec<DMatrix<Complex64>> =
        (0..d).map(|j| if j == mode { op.clone() } else { DMatrix::identity(n, n) }).collect();
    tensor_modes(&ops)
}

/// `(Q_1..Q_d, P_1..P_d)` with identity padding on the other modes.
pub fn ladder_matrices(n: usize, d: usize) -> Result<(Vec<FockMatrix>, Vec<FockMatrix>)> {
    if n < 2 {
        return Err(Error::InvalidInput("ladder matrices need N >= 2".into()));
    }
    basis_size(n, d, 1)?;
    let (q, p) = single_mode_ladder(n);
    let mut qs = Vec::with_capacity(d);
    let mut ps = Vec::with_capacity(d);
    for j in 0..d {
        qs.push(FockMatrix::new(n, d, 1, Method::Monomial, embed_mode(&q, n, d, j))?);
        ps.push(FockMatrix::new(n, d, 1, Method::Monomial, embed_mode(&p, n, d, j))?);
    }
    Ok((qs, ps))
}

/// Tensors a Fock-space block with the matrix unit `E_ij` of the coefficient space.
pub(crate) fn place_block(acc: &mut DMatrix<Complex64>, block: &DMatrix<Complex64>, k: usize, i: usize, j: usize) {
    for a in 0..block.nrows() {
        for b in 0..block.ncols() {
            acc[(a * k + i, b * k + j)] += block[(a, b)];
        }
    }
}

/// Quantization method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantMethod {
    Monomial,
    Kernel,
    /// Monomial calculus when every entry is polynomial, kernel quadrature otherwise.
    Auto,
}

/// Weyl quantization of a scalar or matrix symbol on `n` levels per mode.
pub fn quantize(f: &Symbol, n: usize, method: QuantMethod, cfg: &QuadratureConfig) -> Result<FockMatrix> {
    let d = f.dims();
    let k = f.k();
    let side = basis_size(n, d, k)?;
    let polys: Option<Vec<Polynomial>> = f.entries().iter().map(|e| Polynomial::from_expr(e)).collect();
    let use_monomial = match method {
        QuantMethod::Monomial => {
            if polys.is_none() {
                return Err(Error::MethodMismatch(format!("`{f}` is not a polynomial symbol")));
            }
            true
        }
        QuantMethod::Kernel => false,
        QuantMethod::Auto => polys.is_some(),
    };
    if use_monomial {
        let polys = polys.expect("checked above");
        let mut acc = DMatrix::zeros(side, side);
        for (idx, p) in polys.iter().enumerate() {
            let block = quantize_polynomial(p, n, d)?;
            place_block(&mut acc, &block, k, idx / k, idx % k);
        }
        return FockMatrix::new(n, d, k, Method::Monomial, acc);
    }
    let resolved = cfg.resolve(n);
    let mut acc = DMatrix::zeros(side, side);
    for (idx, e) in f.entries().iter().enumerate() {
        let block = quantize_kernel(e, n, cfg)?;
        place_block(&mut acc, block.entries(), k, idx / k, idx % k);
    }
    Ok(FockMatrix::new(n, d, k, Method::KernelQuadrature, acc)?.with_quadrature(resolved))
}
