use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FockMatrix, Method, ResolvedQuadrature};
use crate::error::{Error, Result};

pub(crate) const MAGIC: &[u8; 8] = b"WEYL0001";
pub(crate) const HEADER_LEN: usize = 32;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    #[serde(rename = "N")]
    n: usize,
    d: usize,
    k: usize,
    method: Method,
    entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quadrature: Option<ResolvedQuadrature>,
}

impl Serialize for FockMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let side = self.side();
        let mut entries = Vec::with_capacity(side * side);
        for i in 0..side {
            for j in 0..side {
                let z = self.entries[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Wire { n: self.n, d: self.d, k: self.k, method: self.method, entries, quadrature: self.quadrature }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let w = Wire::deserialize(de)?;
        let side = super::basis_size(w.n, w.d, w.k).map_err(serde::de::Error::custom)?;
        if w.entries.len() != side * side {
            return Err(serde::de::Error::custom(format!(
                "expected {} entries, found {}",
                side * side,
                w.entries.len()
            )));
        }
        let m = DMatrix::from_fn(side, side, |i, j| {
            let [re, im] = w.entries[i * side + j];
            Complex64::new(re, im)
        });
        let mut out = FockMatrix::new(w.n, w.d, w.k, w.method, m).map_err(serde::de::Error::custom)?;
        out.quadrature = w.quadrature;
        Ok(out)
    }
}

pub(crate) fn write_header(w: &mut impl Write, fields: [u32; 4]) -> std::io::Result<()> {
    let mut header = [0u8; HEADER_LEN];
    header[..8].copy_from_slice(MAGIC);
    for (i, v) in fields.iter().enumerate() {
        header[8 + 4 * i..12 + 4 * i].copy_from_slice(&v.to_le_bytes());
    }
    w.write_all(&header)
}

pub(crate) fn read_header(r: &mut impl Read) -> Result<[u32; 4]> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header).map_err(|e| Error::Format(format!("short header: {e}")))?;
    if &header[..8] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    if header[24..].iter().any(|&b| b != 0) {
        return Err(Error::Format("reserved header bytes must be zero".into()));
    }
    let mut fields = [0u32; 4];
    for (i, f) in fields.iter_mut().enumerate() {
        *f = u32::from_le_bytes(header[8 + 4 * i..12 + 4 * i].try_into().expect("4 bytes"));
    }
    Ok(fields)
}

pub(crate) fn write_complex(w: &mut impl Write, values: impl Iterator<Item = Complex64>) -> std::io::Result<()> {
    for z in values {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_complex(r: &mut impl Read, count: usize) -> Result<Vec<Complex64>> {
    let mut bytes = vec![0u8; 16 * count];
    r.read_exact(&mut bytes).map_err(|e| Error::Format(format!("truncated payload: {e}")))?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra).map_err(|e| Error::Format(e.to_string()))? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect())
}

impl FockMatrix {
    /// 32-byte header (magic, then `N, d, k, method code` as little-endian `u32`,
    /// then 8 zero bytes) followed by row-major interleaved `re, im` doubles.
    pub fn write_binary(&self, w: &mut impl Write) -> std::io::Result<()> {
        write_header(w, [self.n as u32, self.d as u32, self.k as u32, self.method.code()])?;
        let side = self.side();
        write_complex(w, (0..side * side).map(|idx| self.entries[(idx / side, idx % side)]))
    }

    pub fn read_binary(r: &mut impl Read) -> Result<FockMatrix> {
        let [n, d, k, code] = read_header(r)?;
        let method = Method::from_code(code)?;
        let (n, d, k) = (n as usize, d as usize, k as usize);
        let side = super::basis_size(n, d, k)?;
        let values = read_complex(r, side * side)?;
        FockMatrix::new(n, d, k, method, DMatrix::from_fn(side, side, |i, j| values[i * side + j]))
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_binary(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<FockMatrix> {
        FockMatrix::read_binary(&mut &bytes[..])
    }
}
