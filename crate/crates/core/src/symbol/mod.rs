//! Phase-space symbols: parsing, evaluation, exact differentiation and shifts.
//!
//! A symbol lives on phase space `R^{2d}` with coordinates ordered
//! `(x_1, .., x_d, xi_1, .., xi_d)`. Scalar symbols are [`SymbolExpr`] trees;
//! operator-valued symbols with a `k`-dimensional coefficient space are
//! [`MatrixSymbol`]s. [`Symbol`] wraps both so downstream code can treat a scalar
//! as the `k = 1` case.

mod expr;
mod parse;
mod poly;
mod scan;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use expr::{variable_name, Func, Node, SymbolExpr};
pub use poly::Polynomial;
pub use scan::{is_hermitian, sup_scan, GrowthVerdict, HermitianCheck, SampleGrid, SupEstimate, SupScanConfig};

/// A point `z = (x, xi)` of phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PhasePoint(Vec<f64>);

impl PhasePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!("phase point needs 2d coordinates, got {}", coords.len())));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("phase point coordinates must be finite".into()));
        }
        Ok(PhasePoint(coords))
    }

    pub fn origin(dims: usize) -> Self {
        PhasePoint(vec![0.0; 2 * dims])
    }

    /// `s` times the `axis`-th unit vector.
    pub fn along(dims: usize, axis: usize, s: f64) -> Self {
        let mut c = vec![0.0; 2 * dims];
        c[axis] = s;
        PhasePoint(c)
    }

    /// Builds `(x, xi)` from position and momentum parts.
    pub fn from_parts(x: &[f64], xi: &[f64]) -> Result<Self> {
        if x.len() != xi.len() {
            return Err(Error::DimensionMismatch("position and momentum lengths differ".into()));
        }
        PhasePoint::new(x.iter().chain(xi).copied().collect())
    }

    pub fn dims(&self) -> usize {
        self.0.len() / 2
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn x(&self) -> &[f64] {
        &self.0[..self.dims()]
    }

    pub fn xi(&self) -> &[f64] {
        &self.0[self.dims()..]
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn plus(&self, other: &PhasePoint) -> PhasePoint {
        PhasePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn negated(&self) -> PhasePoint {
        PhasePoint(self.0.iter().map(|c| -c).collect())
    }

    pub fn dot(&self, other: &PhasePoint) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// `sigma((x, xi), (y, eta)) = x . eta - y . xi`.
    pub fn symplectic(&self, other: &PhasePoint) -> f64 {
        let d = self.dims();
        (0..d).map(|j| self.0[j] * other.0[d + j] - other.0[j] * self.0[d + j]).sum()
    }
}

impl TryFrom<Vec<f64>> for PhasePoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        PhasePoint::new(v)
    }
}

impl From<PhasePoint> for Vec<f64> {
    fn from(p: PhasePoint) -> Vec<f64> {
        p.0
    }
}

/// Multi-index `gamma` over the `2d` phase-space variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn unit(len: usize, axis: usize) -> Self {
        let mut v = vec![0; len];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// All multi-indices of length `len` and total order `order`, in descending
    /// lexicographic order (so `(2,0)` precedes `(1,1)`).
    pub fn of_order(len: usize, order: u32) -> Vec<MultiIndex> {
        fn rec(len: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == len {
                prefix.push(left);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for first in (0..=left).rev() {
                prefix.push(first);
                rec(len, left - first, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if len > 0 {
            rec(len, order, &mut Vec::new(), &mut out);
        }
        out
    }
}

/// Operator-valued symbol with a finite-dimensional coefficient space: a `k x k`
/// grid of scalar symbols sharing one `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSymbol {
    k: usize,
    dims: usize,
    entries: Vec<SymbolExpr>,
}

impl MatrixSymbol {
    pub fn new(k: usize, entries: Vec<SymbolExpr>) -> Result<Self> {
        if k == 0 || entries.len() != k * k {
            return Err(Error::DimensionMismatch(format!(
                "matrix symbol of side {k} needs {} entries, got {}",
                k * k,
                entries.len()
            )));
        }
        let dims = entries[0].dims();
        if entries.iter().any(|e| e.dims() != dims) {
            return Err(Error::DimensionMismatch("matrix entries disagree on d".into()));
        }
        Ok(MatrixSymbol { k, dims, entries })
    }

    pub fn parse(text: &str, dims: usize) -> Result<Self> {
        let (k, entries) = parse::parse_matrix(text, dims)?;
        MatrixSymbol::new(k, entries)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn entry(&self, i: usize, j: usize) -> &SymbolExpr {
        &self.entries[i * self.k + j]
    }

    pub fn entries(&self) -> &[SymbolExpr] {
        &self.entries
    }

    pub fn evaluate(&self, z: &PhasePoint) -> Result<DMatrix<Complex64>> {
        let mut out = DMatrix::zeros(self.k, self.k);
        for i in 0..self.k {
            for j in 0..self.k {
                out[(i, j)] = self.entry(i, j).evaluate(z)?;
            }
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(&SymbolExpr) -> Result<SymbolExpr>) -> Result<MatrixSymbol> {
        MatrixSymbol::new(self.k, self.entries.iter().map(f).collect::<Result<_>>()?)
    }
}

impl std::fmt::Display for MatrixSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("[")?;
        for i in 0..self.k {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.k {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// A scalar or operator-valued symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    Scalar(SymbolExpr),
    Matrix(MatrixSymbol),
}

impl Symbol {
    /// Parses either form; text starting with `[` is read as a matrix symbol.
    pub fn parse(text: &str, dims: usize) -> Result<Self> {
        if text.trim_start().starts_with('[') {
            MatrixSymbol::parse(text, dims).map(Symbol::Matrix)
        } else {
            SymbolExpr::parse(text, dims).map(Symbol::Scalar)
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            Symbol::Scalar(e) => e.dims(),
            Symbol::Matrix(m) => m.dims(),
        }
    }

    /// Coefficient dimension; 1 for scalars.
    pub fn k(&self) -> usize {
        match self {
            Symbol::Scalar(_) => 1,
            Symbol::Matrix(m) => m.k(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> &SymbolExpr {
        match self {
            Symbol::Scalar(e) => {
                assert!(i == 0 && j == 0);
                e
            }
            Symbol::Matrix(m) => m.entry(i, j),
        }
    }

    pub fn entries(&self) -> Vec<&SymbolExpr> {
        match self {
            Symbol::Scalar(e) => vec![e],
            Symbol::Matrix(m) => m.entries().iter().collect(),
        }
    }

    pub fn as_scalar(&self) -> Option<&SymbolExpr> {
        match self {
            Symbol::Scalar(e) => Some(e),
            Symbol::Matrix(_) => None,
        }
    }

    /// Entrywise evaluation; scalars give a `1 x 1` matrix.
    pub fn evaluate(&self, z: &PhasePoint) -> Result<DMatrix<Complex64>> {
        match self {
            Symbol::Scalar(e) => Ok(DMatrix::from_element(1, 1, e.evaluate(z)?)),
            Symbol::Matrix(m) => m.evaluate(z),
        }
    }

    pub fn map(&self, f: impl Fn(&SymbolExpr) -> Result<SymbolExpr>) -> Result<Symbol> {
        Ok(match self {
            Symbol::Scalar(e) => Symbol::Scalar(f(e)?),
            Symbol::Matrix(m) => Symbol::Matrix(m.map(f)?),
        })
    }

    pub fn differentiate(&self, gamma: &MultiIndex) -> Result<Symbol> {
        self.map(|e| e.differentiate(gamma))
    }

    pub fn shift(&self, z: &PhasePoint) -> Result<Symbol> {
        self.map(|e| e.shift(z))
    }

    pub fn has_symbolic_division(&self) -> bool {
        self.entries().iter().any(|e| e.has_symbolic_division())
    }

    /// Entrywise difference of two symbols of the same shape.
    pub fn sub(&self, other: &Symbol) -> Result<Symbol> {
        if self.k() != other.k() || self.dims() != other.dims() {
            return Err(Error::DimensionMismatch("symbol shapes differ".into()));
        }
        match (self, other) {
            (Symbol::Scalar(a), Symbol::Scalar(b)) => Ok(Symbol::Scalar(a.sub(b))),
            _ => {
                let k = self.k();
                let entries =
                    (0..k * k).map(|ix| self.entry(ix / k, ix % k).sub(other.entry(ix / k, ix % k))).collect();
                Ok(Symbol::Matrix(MatrixSymbol::new(k, entries)?))
            }
        }
    }
}

impl std::fmt::Display for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Symbol::Scalar(e) => write!(f, "{e}"),
            Symbol::Matrix(m) => write!(f, "{m}"),
        }
    }
}

impl From<SymbolExpr> for Symbol {
    fn from(e: SymbolExpr) -> Self {
        Symbol::Scalar(e)
    }
}

impl From<MatrixSymbol> for Symbol {
    fn from(m: MatrixSymbol) -> Self {
        Symbol::Matrix(m)
    }
}
