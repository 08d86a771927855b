//! Prime contexts and direct evaluation of Fermat quotients.
//!
//! For a prime `p` and `gcd(u, p) = 1`, the Fermat quotient `q_p(u)` is the
//! residue of `(u^(p-1) - 1) / p` modulo `p`; multiples of `p` map to 0.
//! Two identities drive every fast algorithm in this crate:
//!
//! * `q_p(uv) = q_p(u) + q_p(v) (mod p)` for `gcd(uv, p) = 1`,
//! * `q_p(u + kp) = q_p(u) - k * u^-1 (mod p)`.

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{FqError, Result};

/// Largest supported modulus (exclusive); keeps `p^2` below 2^62.
pub const MAX_MODULUS: u64 = 1 << 31;

/// A residue modulo the context prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Residue(pub u32);

impl Residue {
    pub fn value(self) -> u32 {
        self.0
    }
}

impl From<Residue> for u64 {
    fn from(r: Residue) -> u64 {
        r.0 as u64
    }
}

/// An odd prime with its square and, optionally, its smallest primitive root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FqContext {
    p: u64,
    p_squared: u64,
    g: Option<u64>,
}

impl FqContext {
    /// Validates `p` and, if `want_g`, finds the smallest primitive root.
    pub fn new(p: u64, want_g: bool) -> Result<Self> {
        if p < 3 || p % 2 == 0 || !arith::is_prime(p) {
            return Err(FqError::NotPrime(p));
        }
        if p >= MAX_MODULUS {
            return Err(FqError::ModulusOutOfRange(p));
        }
        let g = want_g.then(|| arith::smallest_primitive_root(p));
        Ok(FqContext {
            p,
            p_squared: p * p,
            g,
        })
    }

    pub fn with_primitive_root(p: u64) -> Result<Self> {
        Self::new(p, true)
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn p_squared(&self) -> u64 {
        self.p_squared
    }

    pub fn primitive_root(&self) -> Option<u64> {
        self.g
    }

    /// `q_p(u)` for any integer `u`; negative inputs are reduced modulo `p^2`.
    pub fn eval(&self, u: i64) -> Residue {
        let w = (u as i128).rem_euclid(self.p_squared as i128) as u64;
        self.eval_unsigned(w)
    }

    /// `q_p(u)` for a non-negative `u`.
    #[inline]
    pub fn eval_unsigned(&self, u: u64) -> Residue {
        Residue(arith::fermat_quotient(self.p, u) as u32)
    }

    /// Least `u >= 1` with `q_p(u) != 0`.
    ///
    /// Always at most `p - 1`, because `q_p(p - 1) = 1`.
    pub fn smallest_nonzero(&self) -> u64 {
        (1..self.p)
            .find(|&u| self.eval_unsigned(u).0 != 0)
            .expect("q_p(p - 1) = 1 is never zero")
    }
}

/// Builds a context, optionally with the smallest primitive root.
pub fn make_context(p: u64, want_g: bool) -> Result<FqContext> {
    FqContext::new(p, want_g)
}

pub fn qp_eval(ctx: &FqContext, u: i64) -> Residue {
    ctx.eval(u)
}

pub fn lp_smallest_nonzero(ctx: &FqContext) -> u64 {
    ctx.smallest_nonzero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{inv_mod, pow_mod};
    use proptest::prelude::*;

    fn order_mod(g: u64, p: u64) -> u64 {
        let mut x = g % p;
        let mut k = 1;
        while x != 1 {
            x = x * g % p;
            k += 1;
        }
        k
    }

    #[test]
    fn context_examples() {
        let c5 = make_context(5, true).unwrap();
        assert_eq!(c5.primitive_root(), Some(2));
        assert_eq!(c5.p_squared(), 25);
        assert_eq!(make_context(7, true).unwrap().primitive_root(), Some(3));
        assert!(matches!(make_context(9, true), Err(FqError::NotPrime(9))));
        assert!(matches!(make_context(2, false), Err(FqError::NotPrime(2))));
        assert!(matches!(make_context(1, false), Err(FqError::NotPrime(1))));
        assert!(matches!(make_context(0, false), Err(FqError::NotPrime(0))));
        assert!(matches!(
            make_context(2_147_483_659, false),
            Err(FqError::ModulusOutOfRange(_))
        ));
        assert_eq!(make_context(11, false).unwrap().primitive_root(), None);
    }

    #[test]
    fn smallest_root_is_minimal_by_exhaustive_order() {
        for p in [
            3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 71, 191,
        ] {
            let g = make_context(p, true).unwrap().primitive_root().unwrap();
            assert_eq!(order_mod(g, p), p - 1, "p = {p}");
            for h in 2..g {
                assert!(order_mod(h, p) < p - 1, "p = {p}, h = {h}");
            }
        }
    }

    #[test]
    fn eval_examples() {
        let c5 = make_context(5, false).unwrap();
        assert_eq!(qp_eval(&c5, 2), Residue(3));
        assert_eq!(qp_eval(&c5, 1), Residue(0));
        assert_eq!(qp_eval(&c5, 10), Residue(0));
        assert_eq!(qp_eval(&c5, 6), Residue(4));
        assert_eq!(qp_eval(&c5, -1), Residue(0));
        let c7 = make_context(7, false).unwrap();
        assert_eq!(qp_eval(&c7, 2), Residue(2));
    }

    #[test]
    fn smallest_nonzero_examples() {
        assert_eq!(lp_smallest_nonzero(&make_context(5, false).unwrap()), 2);
        assert_eq!(lp_smallest_nonzero(&make_context(1093, false).unwrap()), 3);
        assert_eq!(lp_smallest_nonzero(&make_context(3511, false).unwrap()), 3);
        assert_eq!(lp_smallest_nonzero(&make_context(3, false).unwrap()), 2);
    }

    fn small_prime() -> impl Strategy<Value = u64> {
        (3u64..50_000).prop_filter_map("prime", |n| arith::is_prime(n).then_some(n))
    }

    proptest! {
        #[test]
        fn multiplicative(p in small_prime(), u in 1i64..1_000_000_000, v in 1i64..1_000_000_000) {
            let ctx = make_context(p, false).unwrap();
            prop_assume!(u % p as i64 != 0 && v % p as i64 != 0);
            let lhs = ctx.eval((u as i128 * v as i128 % ctx.p_squared() as i128) as i64).0 as u64;
            let rhs = (ctx.eval(u).0 as u64 + ctx.eval(v).0 as u64) % p;
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn shift(p in small_prime(), u in -1_000_000i64..1_000_000, k in -1000i64..1000) {
            let ctx = make_context(p, false).unwrap();
            prop_assume!(u.rem_euclid(p as i64) != 0);
            let uinv = inv_mod(u.rem_euclid(p as i64) as u64, p).unwrap();
            let kk = k.rem_euclid(p as i64) as u64;
            let expected = (ctx.eval(u).0 as u64 + p - kk * uinv % p) % p;
            prop_assert_eq!(ctx.eval(u + k * p as i64).0 as u64, expected);
        }

        #[test]
        fn periodic_negation_range(p in small_prime(), u in 0i64..4_000_000_000) {
            let ctx = make_context(p, false).unwrap();
            let p2 = ctx.p_squared() as i64;
            let q = ctx.eval(u);
            prop_assert!((q.0 as u64) < p);
            prop_assert_eq!(ctx.eval(u + p2), q);
            prop_assert_eq!(ctx.eval(p2 - u.rem_euclid(p2)), q);
        }
    }

    #[test]
    fn forced_value_at_p_minus_one() {
        let mut n = 0;
        for p in (3..20_000u64).filter(|&p| arith::is_prime(p)) {
            let ctx = make_context(p, false).unwrap();
            assert_eq!(ctx.eval_unsigned(p - 1), Residue(1), "p = {p}");
            n += 1;
        }
        assert!(n > 2000);
    }

    #[test]
    fn agrees_with_bigint_free_definition() {
        // u^(p-1) computed mod p^3 keeps enough digits to read off the quotient.
        for p in [3u64, 5, 7, 11, 101, 1009] {
            let ctx = make_context(p, false).unwrap();
            for u in 1..3 * p {
                if u % p == 0 {
                    continue;
                }
                let t = pow_mod(u, p - 1, p * p * p);
                assert_eq!(((t - 1) / p) % p, ctx.eval_unsigned(u).0 as u64);
            }
        }
    }
}
