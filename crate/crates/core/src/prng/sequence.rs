use crate::arith;
use crate::batch::{generate_table, QuotientTable};
use crate::context::{make_context, FqContext};
use crate::error::Result;

/// `q_p(u)` for arbitrary integers `u`, from the base table and the shift
/// identity: writing `u = v + kp` with `0 <= v < p`,
/// `q_p(u) = q_p(v) - k * v^-1 (mod p)` (and 0 when `v = 0`).
#[derive(Clone, Debug)]
pub struct QuotientSequence {
    p: u64,
    table: QuotientTable,
    inverses: Vec<u32>,
}

impl QuotientSequence {
    pub fn new(table: QuotientTable) -> Self {
        let p = table.p();
        let units: Vec<u64> = (1..p).collect();
        let mut inverses = vec![0u32];
        inverses.extend(
            arith::batch_inv_mod(&units, p)
                .expect("1..p are units")
                .into_iter()
                .map(|x| x as u32),
        );
        QuotientSequence { p, table, inverses }
    }

    /// Builds the table for `ctx.p()`, finding a primitive root if needed.
    pub fn for_context(ctx: &FqContext) -> Result<Self> {
        let ctx = match ctx.primitive_root() {
            Some(_) => *ctx,
            None => make_context(ctx.p(), true)?,
        };
        Ok(Self::new(generate_table(&ctx)?))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn table(&self) -> &QuotientTable {
        &self.table
    }

    #[inline]
    pub fn at(&self, u: i64) -> u64 {
        let p = self.p as i64;
        let v = u.rem_euclid(p) as usize;
        if v == 0 {
            return 0;
        }
        let k = u.div_euclid(p).rem_euclid(p) as u64;
        let q = self.table.values()[v] as u64;
        let shift = k * self.inverses[v] as u64 % self.p;
        (q + self.p - shift) % self.p
    }

    /// Values at `start, start + 1, ..., start + len - 1`.
    pub fn window(&self, start: i64, len: usize) -> Vec<u64> {
        (0..len as i64).map(|i| self.at(start + i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_direct_evaluation_beyond_p() {
        for p in [3u64, 5, 7, 53, 101] {
            let ctx = make_context(p, false).unwrap();
            let seq = QuotientSequence::for_context(&ctx).unwrap();
            let p2 = (p * p) as i64;
            for u in -p2 - 5..2 * p2 + 5 {
                assert_eq!(seq.at(u), ctx.eval(u).0 as u64, "p = {p}, u = {u}");
            }
        }
    }
}
