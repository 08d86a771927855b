//! Time/memory trade-off for single queries.
//!
//! With a parameter `2 <= z < p`, the tables hold `q_p(v)` for small `v`,
//! inverses of small `v` modulo `p`, and inverses of `w <= z` modulo `p^2`.
//! A query writes `u = v / w (mod p)` with `v < p/z` and `|w| <= z` using the
//! continued-fraction convergents of `u/p`, lifts `v/w` to `s` modulo `p^2`
//! and corrects the shift `s - u = kp` in O(log z) operations.

use crate::arith;
use crate::context::{FqContext, Residue};
use crate::error::{FqError, Result};

/// Precomputed tables for [`qp_lookup`].
#[derive(Clone, Debug)]
pub struct LookupTables {
    p: u64,
    p_squared: u64,
    z: f64,
    /// `q_p(v)` for `0 <= v <= max(ceil(p/z), floor(z))`.
    q_small: Vec<u32>,
    /// `v^-1 mod p` for `1 <= v <= ceil(p/z)`, stored at index `v - 1`.
    inv_p: Vec<u64>,
    /// `w^-1 mod p^2` for `1 <= w <= floor(z)`, stored at index `w - 1`.
    inv_p2: Vec<u64>,
}

impl LookupTables {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Bound `V = ceil(p/z) + 1` on the numerators produced by reconstruction.
    pub fn v_bound(&self) -> u64 {
        self.inv_p.len() as u64 + 1
    }

    pub fn q_small(&self) -> &[u32] {
        &self.q_small
    }

    /// `v^-1 mod p` for `1 <= v <= ceil(p/z)`.
    pub fn inv_p(&self, v: u64) -> Option<u64> {
        v.checked_sub(1)
            .and_then(|i| self.inv_p.get(i as usize).copied())
    }

    /// `w^-1 mod p^2` for `1 <= w <= floor(z)`.
    pub fn inv_p2(&self, w: u64) -> Option<u64> {
        w.checked_sub(1)
            .and_then(|i| self.inv_p2.get(i as usize).copied())
    }

    pub fn inv_p_len(&self) -> usize {
        self.inv_p.len()
    }

    pub fn inv_p2_len(&self) -> usize {
        self.inv_p2.len()
    }
}

/// `u * w = v (mod p)` with a small numerator and denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalPair {
    pub v: u64,
    pub w: i64,
}

fn check_z(p: u64, z: f64) -> Result<()> {
    if !(z.is_finite() && z >= 2.0 && z < p as f64) {
        return Err(FqError::BadParameter(format!(
            "trade-off z = {z} must satisfy 2 <= z < p = {p}"
        )));
    }
    Ok(())
}

pub fn build_lookup(ctx: &FqContext, z: f64) -> Result<LookupTables> {
    let p = ctx.p();
    check_z(p, z)?;
    let p2 = ctx.p_squared();
    let v_max = (p as f64 / z).ceil() as u64;
    // |w| <= z, and floor(z) < p keeps every entry a unit.
    let w_max = z.floor() as u64;
    let q_len = v_max.max(w_max) + 1;

    let q_small = (0..q_len).map(|v| ctx.eval_unsigned(v).0).collect();
    let vs: Vec<u64> = (1..=v_max).collect();
    let ws: Vec<u64> = (1..=w_max).collect();
    let inv_p = arith::batch_inv_mod(&vs, p).expect("small values are units mod p");
    let inv_p2 = arith::batch_inv_mod(&ws, p2).expect("small values are units mod p^2");
    Ok(LookupTables {
        p,
        p_squared: p2,
        z,
        q_small,
        inv_p,
        inv_p2,
    })
}

/// Continued-fraction reconstruction `u = v / w (mod p)`.
///
/// Takes the last convergent `a_j / b_j` of `u/p` with `b_j <= z` and sets
/// `delta = a_j p - b_j u`; then `|delta| < p/z` and `u * (-b_j) = delta`.
pub fn rational_reconstruct(p: u64, z: f64, u: u64) -> Result<RationalPair> {
    check_z(p, z)?;
    if u % p == 0 {
        return Err(FqError::NotCoprime { u, p });
    }
    let u = u % p;
    let (a, b) = last_convergent_within(u, p, z).0;
    let delta = a as i128 * p as i128 - b as i128 * u as i128;
    assert!(delta != 0, "delta = 0 would force p | b_j u with b_j < p");
    let pair = if delta > 0 {
        RationalPair {
            v: delta as u64,
            w: -(b as i64),
        }
    } else {
        RationalPair {
            v: (-delta) as u64,
            w: b as i64,
        }
    };
    Ok(pair)
}

/// Returns the last convergent `(a_j, b_j)` of `num/den` (with
/// `0 < num < den`) whose denominator does not exceed `z`, together with the
/// number of convergents generated.
pub(crate) fn last_convergent_within(num: u64, den: u64, z: f64) -> ((u64, u64), u32) {
    // Convergents h_i/k_i of [0; c_1, c_2, ...], seeded with h_-1/k_-1 = 1/0.
    let (mut h_prev, mut k_prev) = (1u64, 0u64);
    let (mut h, mut k) = (0u64, 1u64);
    let (mut x, mut y) = (den, num);
    let mut steps = 1;
    while y != 0 {
        let c = x / y;
        (x, y) = (y, x % y);
        let h_next = c * h + h_prev;
        let k_next = c * k + k_prev;
        if k_next as f64 > z {
            break;
        }
        (h_prev, k_prev, h, k) = (h, k, h_next, k_next);
        steps += 1;
    }
    ((h, k), steps)
}

/// Number of convergents of `u/p` examined for a query at trade-off `z`.
pub fn convergent_steps(p: u64, z: f64, u: u64) -> u32 {
    last_convergent_within(u % p, p, z).1
}

/// `q_p(u)` for `u` in `[0, p)` from the precomputed tables.
pub fn qp_lookup(tables: &LookupTables, u: u64) -> Residue {
    let p = tables.p;
    let p2 = tables.p_squared;
    let u = u % p;
    if u == 0 {
        return Residue(0);
    }
    let RationalPair { v, w } =
        rational_reconstruct(p, tables.z, u).expect("u is a unit and z was validated");
    let w_abs = w.unsigned_abs();
    let w_inv = tables.inv_p2(w_abs).expect("|w| <= z is tabulated");
    // s = v / w (mod p^2), normalized into [0, p^2).
    let mut s = arith::mul_mod(v, w_inv, p2);
    if w < 0 {
        s = (p2 - s) % p2;
    }
    // s = u (mod p), so k = (s - u) / p is an exact integer in [0, p).
    debug_assert_eq!(s % p, u);
    let k = (s + p2 - u) % p2 / p;
    let v_inv = tables.inv_p(v).expect("v < p/z is tabulated");
    let q_v = tables.q_small[v as usize] as u64;
    // q_p(-w) = q_p(w) because q_p(-1) = 0.
    let q_w = tables.q_small[w_abs as usize] as u64;
    let w_mod = (w as i128).rem_euclid(p as i128) as u64;
    let correction = arith::mul_mod(arith::mul_mod(k, v_inv, p), w_mod, p);
    Residue(((q_v + p - q_w + correction) % p) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::make_context;

    #[test]
    fn table_sizes() {
        let ctx = make_context(101, false).unwrap();
        let t = build_lookup(&ctx, 10.0).unwrap();
        assert_eq!(t.v_bound(), 12);
        assert_eq!(t.q_small().len(), 12);
        assert_eq!(t.inv_p2_len(), 10);
        assert_eq!(t.q_small()[2], ctx.eval_unsigned(2).0);
    }

    #[test]
    fn inverse_tables() {
        let ctx = make_context(5, false).unwrap();
        let t = build_lookup(&ctx, 3.0).unwrap();
        assert_eq!(t.inv_p2(3), Some(17));
        assert_eq!(t.inv_p2(4), None);
        assert_eq!(t.inv_p2(0), None);
        let ctx = make_context(101, false).unwrap();
        let t = build_lookup(&ctx, 7.5).unwrap();
        for v in 1..=t.inv_p_len() as u64 {
            assert_eq!(t.inv_p(v).unwrap() * v % 101, 1);
        }
        for w in 1..=t.inv_p2_len() as u64 {
            assert_eq!(t.inv_p2(w).unwrap() * w % (101 * 101), 1);
        }
    }

    #[test]
    fn rejects_bad_z() {
        let ctx = make_context(101, false).unwrap();
        for z in [1.9, 101.0, 150.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                build_lookup(&ctx, z),
                Err(FqError::BadParameter(_))
            ));
        }
        assert!(build_lookup(&ctx, 2.0).is_ok());
        assert!(build_lookup(&ctx, 100.5).is_ok());
    }

    #[test]
    fn reconstruction_examples() {
        assert_eq!(
            rational_reconstruct(101, 10.0, 37).unwrap(),
            RationalPair { v: 7, w: -8 }
        );
        assert_eq!(
            rational_reconstruct(101, 10.0, 1).unwrap(),
            RationalPair { v: 1, w: 1 }
        );
        assert!(matches!(
            rational_reconstruct(101, 10.0, 202),
            Err(FqError::NotCoprime { .. })
        ));
    }

    #[test]
    fn lookup_examples() {
        let ctx = make_context(101, false).unwrap();
        let t = build_lookup(&ctx, 10.0).unwrap();
        assert_eq!(qp_lookup(&t, 0), Residue(0));
        for u in 0..101 {
            assert_eq!(qp_lookup(&t, u), ctx.eval_unsigned(u));
        }
        let ctx = make_context(65537, false).unwrap();
        let t = build_lookup(&ctx, 256.0).unwrap();
        assert_eq!(qp_lookup(&t, 12345), ctx.eval_unsigned(12345));
    }

    #[test]
    fn fractional_z() {
        let ctx = make_context(1009, false).unwrap();
        for z in [2.5, 31.7, 500.25, 1008.9] {
            let t = build_lookup(&ctx, z).unwrap();
            for u in 0..1009 {
                assert_eq!(qp_lookup(&t, u), ctx.eval_unsigned(u), "z = {z}, u = {u}");
            }
        }
    }
}
