//! Generation of the full table `q_p(0), ..., q_p(p-1)` in O(p) word
//! operations by walking the powers of a primitive root.
//!
//! With `b_i = g^i mod p`, `c_i = b_i^-1 mod p` and the carry
//! `k_i = (g * b_{i-1} - b_i) / p`, the two basic identities give
//! `q_p(b_i) = q_p(g) + q_p(b_{i-1}) + k_i * c_i (mod p)`. Only `q_p(g)`
//! needs a modular exponentiation.

use std::io::{self, Read, Write};

use crate::arith;
use crate::context::{FqContext, Residue};
use crate::error::{FqError, Result};

/// All Fermat quotients modulo `p`, indexed by `u` in natural order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientTable {
    p: u64,
    values: Vec<u32>,
}

impl QuotientTable {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    #[inline]
    pub fn get(&self, u: u64) -> Residue {
        Residue(self.values[u as usize])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Builds a table from raw values, checking length and range.
    pub fn from_values(p: u64, values: Vec<u32>) -> Result<Self> {
        if values.len() as u64 != p || values.iter().any(|&q| q as u64 >= p) {
            return Err(FqError::BadParameter(format!(
                "table for p = {p} must hold {p} residues below p"
            )));
        }
        Ok(QuotientTable { p, values })
    }
}

/// Walks the primitive-root orbit and hands every `(u, q_p(u))` to `visit`,
/// starting with `(0, 0)` and `(1, 0)`, then `u = g, g^2, ..., g^(p-2)`.
fn walk<F: FnMut(u64, u32)>(ctx: &FqContext, mut visit: F) -> Result<()> {
    let p = ctx.p();
    let g = ctx
        .primitive_root()
        .ok_or(FqError::MissingPrimitiveRoot(p))?;
    visit(0, 0);
    visit(1, 0);
    let g_inv = arith::inv_mod(g, p).expect("g is a unit");
    let q_g = ctx.eval_unsigned(g).0 as u64;
    visit(g, q_g as u32);

    let mut b = g;
    let mut c = g_inv;
    let mut q = q_g;
    for _ in 2..=p - 2 {
        let gb = g * b;
        let next_b = gb % p;
        let k = (gb - next_b) / p;
        c = c * g_inv % p;
        // k < g < p and c < p, so k * c < p^2 < 2^62.
        q = (q_g + q + k * c % p) % p;
        b = next_b;
        visit(b, q as u32);
    }
    Ok(())
}

/// Computes `q_p(u)` for every `u` in `[0, p)`.
pub fn generate_table(ctx: &FqContext) -> Result<QuotientTable> {
    let p = ctx.p();
    let mut values = vec![0u32; p as usize];
    walk(ctx, |u, q| values[u as usize] = q)?;
    Ok(QuotientTable { p, values })
}

/// Folds `f` over every `(u, q_p(u))` in generation order without storing
/// the table.
pub fn table_stream_fold<A, F>(ctx: &FqContext, init: A, mut f: F) -> Result<A>
where
    F: FnMut(A, u64, Residue) -> A,
{
    let mut acc = Some(init);
    walk(ctx, |u, q| {
        let a = acc.take().expect("accumulator present");
        acc = Some(f(a, u, Residue(q)));
    })?;
    Ok(acc.expect("accumulator present"))
}

const TABLE_MAGIC: &[u8; 4] = b"FQTB";
pub const TABLE_FORMAT_VERSION: u32 = 1;

/// Writes the binary table format: a 16-byte header (`"FQTB"`, version as
/// little-endian u32, `p` as little-endian u64) followed by `p` little-endian
/// u32 values.
pub fn write_table_binary<W: Write>(table: &QuotientTable, mut out: W) -> io::Result<()> {
    out.write_all(TABLE_MAGIC)?;
    out.write_all(&TABLE_FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&table.p.to_le_bytes())?;
    for &v in &table.values {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()
}

pub fn read_table_binary<R: Read>(mut input: R) -> Result<QuotientTable> {
    let mut header = [0u8; 16];
    input.read_exact(&mut header)?;
    if &header[..4] != TABLE_MAGIC {
        return Err(FqError::BadParameter("missing FQTB magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != TABLE_FORMAT_VERSION {
        return Err(FqError::BadParameter(format!(
            "unsupported table version {version}"
        )));
    }
    let p = u64::from_le_bytes(header[8..16].try_into().unwrap());
    if p >= crate::context::MAX_MODULUS {
        return Err(FqError::ModulusOutOfRange(p));
    }
    let mut raw = vec![0u8; p as usize * 4];
    input.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    QuotientTable::from_values(p, values)
}

/// Writes `u,q` rows with a header line.
pub fn write_table_csv<W: Write>(table: &QuotientTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["u", "q"])?;
    for (u, q) in table.values.iter().enumerate() {
        w.write_record([u.to_string(), q.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
