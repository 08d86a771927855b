use crate::batch::QuotientTable;

/// Number of `u` in `[0, p)` with `q_p(u)` in the residue window
/// `{k+1, ..., k+h} mod p`. The window wraps; `h >= p` covers every residue.
pub fn concentration_count(table: &QuotientTable, k: i64, h: u64) -> u64 {
    let p = table.p();
    if h >= p {
        return p;
    }
    let start = (k as i128 + 1).rem_euclid(p as i128) as u64;
    table
        .values()
        .iter()
        .filter(|&&q| (q as u64 + p - start) % p < h)
        .count() as u64
}
