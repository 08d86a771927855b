//! Segmented sieve of Eratosthenes over `[lo, hi]`.

const SEGMENT: u64 = 1 << 16;

fn base_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All primes in the closed interval `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let base = base_primes(isqrt(hi));
    let mut out = Vec::new();
    let mut seg_lo = lo;
    let mut mark = vec![false; SEGMENT as usize];
    while seg_lo <= hi {
        let seg_hi = hi.min(seg_lo + SEGMENT - 1);
        let len = (seg_hi - seg_lo + 1) as usize;
        mark[..len].fill(false);
        for &q in &base {
            if q * q > seg_hi {
                break;
            }
            let mut m = (seg_lo.div_ceil(q) * q).max(q * q);
            while m <= seg_hi {
                mark[(m - seg_lo) as usize] = true;
                m += q;
            }
        }
        out.extend((0..len).filter(|&i| !mark[i]).map(|i| seg_lo + i as u64));
        match seg_hi.checked_add(1) {
            Some(next) => seg_lo = next,
            None => break,
        }
    }
    out
}

/// Odd primes in `[lo, hi]` (the moduli this crate accepts).
pub fn odd_primes_in(lo: u64, hi: u64) -> Vec<u64> {
    primes_in(lo.max(3), hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_prime;

    #[test]
    fn matches_primality_test() {
        for (lo, hi) in [
            (0, 1),
            (0, 2),
            (2, 2),
            (24, 28),
            (0, 1000),
            (65_000, 200_000),
        ] {
            let expected: Vec<u64> = (lo..=hi).filter(|&n| is_prime(n)).collect();
            assert_eq!(primes_in(lo, hi), expected, "[{lo}, {hi}]");
        }
        assert!(primes_in(10, 5).is_empty());
        assert_eq!(odd_primes_in(0, 10), vec![3, 5, 7]);
    }

    #[test]
    fn known_counts() {
        assert_eq!(primes_in(1, 1_000_000).len(), 78_498);
        assert_eq!(primes_in(50_000, 200_000).len(), 12_851);
        assert_eq!(primes_in(50_000, 99_999).len(), 4_459);
        assert_eq!(primes_in(100_000, 149_999).len(), 4_256);
        assert_eq!(primes_in(150_000, 200_000).len(), 4_136);
    }
}
