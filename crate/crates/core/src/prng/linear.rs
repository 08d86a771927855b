//! Linear complexity over `F_p` via Berlekamp-Massey.

use serde::{Deserialize, Serialize};

use crate::arith::inv_mod;

/// Shortest recurrence `s_{u+L} = c_{L-1} s_{u+L-1} + ... + c_0 s_u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearComplexityResult {
    pub complexity: usize,
    /// `c_0, ..., c_{L-1}` in `[0, p)`.
    pub connection: Vec<u64>,
}

struct Massey {
    p: u64,
    /// C(x) = 1 + C_1 x + ... ; s_n + sum_i C_i s_{n-i} = 0.
    c: Vec<u64>,
    b: Vec<u64>,
    len: usize,
    gap: usize,
    last_discrepancy: u64,
}

impl Massey {
    fn new(p: u64) -> Self {
        Massey {
            p,
            c: vec![1],
            b: vec![1],
            len: 0,
            gap: 1,
            last_discrepancy: 1,
        }
    }

    fn push(&mut self, seq: &[u64], n: usize) {
        let p = self.p;
        let mut d = seq[n] % p;
        for i in 1..=self.len.min(self.c.len() - 1) {
            d = (d + self.c[i] * (seq[n - i] % p)) % p;
        }
        if d == 0 {
            self.gap += 1;
            return;
        }
        let coef = d * inv_mod(self.last_discrepancy, p).expect("nonzero in a field") % p;
        let needed = self.b.len() + self.gap;
        let previous = (2 * self.len <= n).then(|| self.c.clone());
        if self.c.len() < needed {
            self.c.resize(needed, 0);
        }
        for (i, &bi) in self.b.iter().enumerate() {
            let t = coef * bi % p;
            let slot = &mut self.c[i + self.gap];
            *slot = (*slot + p - t) % p;
        }
        match previous {
            Some(prev) => {
                self.len = n + 1 - self.len;
                self.b = prev;
                self.last_discrepancy = d;
                self.gap = 1;
            }
            None => self.gap += 1,
        }
    }

    fn result(&self) -> LinearComplexityResult {
        let l = self.len;
        let p = self.p;
        let coeff = |i: usize| self.c.get(i).copied().unwrap_or(0);
        // s_{u+L} = -sum_{i=1}^{L} C_i s_{u+L-i}, so c_j = -C_{L-j}.
        let connection = (0..l).map(|j| (p - coeff(l - j)) % p).collect();
        LinearComplexityResult {
            complexity: l,
            connection,
        }
    }
}

/// Minimal linear recurrence of `seq` (entries reduced modulo the prime `p`).
pub fn linear_complexity(seq: &[u64], p: u64) -> LinearComplexityResult {
    let mut bm = Massey::new(p);
    for n in 0..seq.len() {
        bm.push(seq, n);
    }
    bm.result()
}

/// Linear complexity of every prefix: entry `i` is the value for `seq[..=i]`.
pub fn linear_complexity_profile(seq: &[u64], p: u64) -> Vec<usize> {
    let mut bm = Massey::new(p);
    (0..seq.len())
        .map(|n| {
            bm.push(seq, n);
            bm.len
        })
        .collect()
}

/// Checks the recurrence by direct substitution over the whole sequence.
pub fn satisfies_recurrence(seq: &[u64], p: u64, connection: &[u64]) -> bool {
    let l = connection.len();
    if seq.len() <= l {
        return true;
    }
    (0..seq.len() - l).all(|u| {
        let rhs = connection
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &c)| (acc + c % p * (seq[u + j] % p)) % p);
        seq[u + l] % p == rhs
    })
}

/// Lower bound `ceil(min(p-1, N-p-1) / 2)` for the prefix `q_p(0..N-1)`,
/// clamped at zero.
pub fn lc_bound_full(p: u64, n: u64) -> u64 {
    let m = (p as i64 - 1).min(n as i64 - p as i64 - 1);
    if m <= 0 {
        0
    } else {
        (m as u64).div_ceil(2)
    }
}

/// Lower bound `ceil(min((p-1)/2, (N-p-1)/3))` for a segment
/// `q_p(M+1..M+N)`, clamped at zero.
pub fn lc_bound_segment(p: u64, n: u64) -> u64 {
    let a = (p as i64 - 1) as f64 / 2.0;
    let b = (n as i64 - p as i64 - 1) as f64 / 3.0;
    let m = a.min(b);
    if m <= 0.0 {
        0
    } else {
        m.ceil() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::make_context;
    use crate::prng::QuotientSequence;
    use proptest::prelude::*;

    /// Smallest L admitting some recurrence, by exhausting all coefficient
    /// vectors (tiny p and lengths only).
    fn brute_force_complexity(seq: &[u64], p: u64) -> usize {
        for l in 0..=seq.len() {
            let total = p.pow(l as u32);
            for code in 0..total {
                let mut c = Vec::with_capacity(l);
                let mut x = code;
                for _ in 0..l {
                    c.push(x % p);
                    x /= p;
                }
                if satisfies_recurrence(seq, p, &c) {
                    return l;
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn trivial_sequences() {
        let r = linear_complexity(&[0; 10], 7);
        assert_eq!(r.complexity, 0);
        assert!(r.connection.is_empty());
        let r = linear_complexity(&[4; 10], 7);
        assert_eq!(r.complexity, 1);
        assert_eq!(r.connection, vec![1]);
        assert_eq!(linear_complexity(&[], 7).complexity, 0);
        // Fibonacci mod 11: s_{u+2} = s_{u+1} + s_u.
        let mut fib = vec![0u64, 1];
        for i in 2..30 {
            fib.push((fib[i - 1] + fib[i - 2]) % 11);
        }
        let r = linear_complexity(&fib, 11);
        assert_eq!(r.complexity, 2);
        assert_eq!(r.connection, vec![1, 1]);
        // A single trailing nonzero forces the maximal length.
        let mut spike = vec![0u64; 9];
        spike.push(3);
        assert_eq!(linear_complexity(&spike, 5).complexity, 10);
    }

    #[test]
    fn matches_exhaustive_search() {
        let mut rng = crate::rng::SplitMix64::new(5);
        for p in [2u64, 3, 5] {
            for len in 1..=7 {
                for _ in 0..15 {
                    let seq: Vec<u64> = (0..len).map(|_| rng.below(p)).collect();
                    let r = linear_complexity(&seq, p);
                    assert!(satisfies_recurrence(&seq, p, &r.connection));
                    if p.pow(len as u32 / 2 + 1) < 5000 {
                        assert_eq!(r.complexity, brute_force_complexity(&seq, p), "{seq:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn quotient_sequence_bound_p53() {
        let seq = QuotientSequence::for_context(&make_context(53, false).unwrap()).unwrap();
        let s = seq.window(0, 3 * 53);
        let r = linear_complexity(&s, 53);
        assert!(r.complexity >= 26, "L = {}", r.complexity);
        assert_eq!(lc_bound_full(53, 159), 26);
        assert!(satisfies_recurrence(&s, 53, &r.connection));
    }

    #[test]
    fn bounds() {
        assert_eq!(lc_bound_full(5, 3), 0);
        assert_eq!(lc_bound_full(7, 21), 3);
        assert_eq!(lc_bound_segment(7, 21), 3);
        assert_eq!(lc_bound_segment(101, 303), 50);
        assert_eq!(lc_bound_segment(5, 5), 0);
    }

    proptest! {
        #[test]
        fn recurrence_holds_and_profile_monotone(
            p in prop::sample::select(vec![2u64, 3, 7, 53, 65537, 2_147_483_647]),
            raw in prop::collection::vec(any::<u64>(), 0..60),
        ) {
            let seq: Vec<u64> = raw.iter().map(|x| x % p).collect();
            let r = linear_complexity(&seq, p);
            prop_assert!(satisfies_recurrence(&seq, p, &r.connection));
            prop_assert_eq!(r.connection.len(), r.complexity);
            let profile = linear_complexity_profile(&seq, p);
            prop_assert!(profile.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(profile.last().copied().unwrap_or(0), r.complexity);
            prop_assert!(r.complexity <= seq.len());
        }
    }
}
