use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::serial::{read_complex, read_header, write_complex, write_header};
use crate::fock::Method;

/// Values of a (possibly matrix-valued) symbol on the uniform grid
/// `-R + i h`, `i = 0..P`, `h = 2R / P`, along each of the `2d` axes.
///
/// Nodes are stored with axis 0 slowest; each node holds `k * k` values in
/// row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSymbol {
    dims: usize,
    k: usize,
    half_width: f64,
    points_per_axis: usize,
    values: Vec<Complex64>,
}

/// Grid metadata written next to the binary payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledSidecar {
    pub d: usize,
    pub k: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
    pub spacing: f64,
    pub origin: f64,
    pub layout: String,
}

const LAYOUT: &str = "axis 0 slowest; per node k*k values row-major; nodes at -R + i*spacing";

impl SampledSymbol {
    pub fn new(dims: usize, k: usize, half_width: f64, points_per_axis: usize, values: Vec<Complex64>) -> Result<Self> {
        if dims == 0 || k == 0 {
            return Err(Error::InvalidInput("d and k must be positive".into()));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidInput("grid half-width must be positive".into()));
        }
        if points_per_axis < 2 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidInput("grid points per axis must be a power of two".into()));
        }
        let nodes = points_per_axis
            .checked_pow(2 * dims as u32)
            .filter(|&n| n <= 1 << 26)
            .ok_or_else(|| Error::CostGuard("sampled grid is too large".into()))?;
        if values.len() != nodes * k * k {
            return Err(Error::DimensionMismatch(format!("expected {} values, found {}", nodes * k * k, values.len())));
        }
        if let Some(pos) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite {
                point: Self::node_coords(dims, half_width, points_per_axis, pos / (k * k)),
            });
        }
        Ok(SampledSymbol { dims, k, half_width, points_per_axis, values })
    }

    /// Samples `eval` at every node.
    pub fn from_fn(
        dims: usize,
        k: usize,
        half_width: f64,
        points_per_axis: usize,
        eval: impl Fn(&[f64]) -> Result<Vec<Complex64>>,
    ) -> Result<Self> {
        let nodes = points_per_axis
            .checked_pow(2 * dims as u32)
            .filter(|&n| n <= 1 << 26)
            .ok_or_else(|| Error::CostGuard("sampled grid is too large".into()))?;
        let mut values = Vec::with_capacity(nodes * k * k);
        for idx in 0..nodes {
            let z = Self::node_coords(dims, half_width, points_per_axis, idx);
            let v = eval(&z)?;
            if v.len() != k * k {
                return Err(Error::DimensionMismatch("evaluator returned the wrong number of entries".into()));
            }
            values.extend(v);
        }
        SampledSymbol::new(dims, k, half_width, points_per_axis, values)
    }

    pub(crate) fn node_coords(dims: usize, half_width: f64, p: usize, mut idx: usize) -> Vec<f64> {
        let h = 2.0 * half_width / p as f64;
        let mut z = vec![0.0; 2 * dims];
        for a in (0..2 * dims).rev() {
            z[a] = -half_width + (idx % p) as f64 * h;
            idx /= p;
        }
        z
    }

    pub fn dims(&self) -> usize {
        self.dims
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn half_width(&self) -> f64 {
        self.half_width
    }
    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }
    pub fn node_count(&self) -> usize {
        self.values.len() / (self.k * self.k)
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn node(&self, idx: usize) -> Vec<f64> {
        Self::node_coords(self.dims, self.half_width, self.points_per_axis, idx)
    }
    /// The `k * k` values at node `idx`.
    pub fn at(&self, idx: usize) -> &[Complex64] {
        let kk = self.k * self.k;
        &self.values[idx * kk..(idx + 1) * kk]
    }
    /// Scalar value at node `idx` (entry `(0, 0)` for matrix samples).
    pub fn scalar_at(&self, idx: usize) -> Complex64 {
        self.at(idx)[0]
    }
    /// Flat node index from per-axis indices.
    pub fn index(&self, axes: &[usize]) -> usize {
        axes.iter().fold(0, |acc, &i| acc * self.points_per_axis + i)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }

    pub fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> SampledSymbol {
        SampledSymbol { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }

    pub fn sidecar(&self) -> SampledSidecar {
        SampledSidecar {
            d: self.dims,
            k: self.k,
            half_width: self.half_width,
            points_per_axis: self.points_per_axis,
            spacing: self.spacing(),
            origin: -self.half_width,
            layout: LAYOUT.to_string(),
        }
    }

    /// The FockMatrix binary layout with method code `TOEPLITZ_SYMBOL`; the header
    /// carries `(P, d, k)` and the grid geometry lives in [`SampledSymbol::sidecar`].
    pub fn write_binary(&self, w: &mut impl Write) -> std::io::Result<()> {
        write_header(w, [self.points_per_axis as u32, self.dims as u32, self.k as u32, Method::ToeplitzSymbol.code()])?;
        write_complex(w, self.values.iter().copied())
    }

    pub fn read_binary(r: &mut impl Read, sidecar: &SampledSidecar) -> Result<SampledSymbol> {
        let [p, d, k, code] = read_header(r)?;
        if Method::from_code(code)? != Method::ToeplitzSymbol {
            return Err(Error::Format("not a sampled-symbol file".into()));
        }
        let (p, d, k) = (p as usize, d as usize, k as usize);
        if (p, d, k) != (sidecar.points_per_axis, sidecar.d, sidecar.k) {
            return Err(Error::Format("header and sidecar disagree".into()));
        }
        let count = p
            .checked_pow(2 * d as u32)
            .and_then(|n| n.checked_mul(k * k))
            .filter(|&n| n <= 1 << 28)
            .ok_or_else(|| Error::Format("grid too large".into()))?;
        let values = read_complex(r, count)?;
        SampledSymbol::new(d, k, sidecar.half_width, p, values)
    }
}
