//! Word-size modular arithmetic: products, powers, inverses, primality and
//! primitive roots for moduli below 2^64.

/// `a * b mod m` through a 128-bit product.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` by left-to-right repeated squaring.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

/// Extended Euclid. Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    let (g, x, _) = ext_gcd((a % m) as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

/// Inverts every element of `values` modulo `m` with a single modular
/// inversion (prefix products, then a backward pass).
///
/// Returns `None` if any element shares a factor with `m`.
pub fn batch_inv_mod(values: &[u64], m: u64) -> Option<Vec<u64>> {
    if values.is_empty() {
        return Some(Vec::new());
    }
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = 1u64 % m;
    for &v in values {
        acc = mul_mod(acc, v % m, m);
        prefix.push(acc);
    }
    let mut inv_acc = inv_mod(acc, m)?;
    let mut out = vec![0u64; values.len()];
    for i in (0..values.len()).rev() {
        let before = if i == 0 { 1 % m } else { prefix[i - 1] };
        out[i] = mul_mod(inv_acc, before, m);
        inv_acc = mul_mod(inv_acc, values[i] % m, m);
    }
    Some(out)
}

// First twelve primes: a proven deterministic witness set for n < 3.3e24.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n` by trial division.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// True if `g` generates the multiplicative group modulo the prime `p`.
pub fn is_primitive_root(g: u64, p: u64, factors_of_p_minus_1: &[u64]) -> bool {
    if g % p == 0 {
        return false;
    }
    factors_of_p_minus_1
        .iter()
        .all(|&l| pow_mod(g, (p - 1) / l, p) != 1)
}

/// Smallest primitive root modulo the odd prime `p`.
pub fn smallest_primitive_root(p: u64) -> u64 {
    let factors = distinct_prime_factors(p - 1);
    (2..p)
        .find(|&g| is_primitive_root(g, p, &factors))
        .expect("a prime modulus always has a primitive root")
}

/// Fermat quotient of `u` modulo the odd prime `p`, for any `p < 2^32`.
///
/// The value depends only on `u mod p^2`; multiples of `p` map to 0.
pub fn fermat_quotient(p: u64, u: u64) -> u64 {
    debug_assert!((3..1 << 32).contains(&p));
    let p2 = p * p;
    let w = u % p2;
    if w % p == 0 {
        return 0;
    }
    let t = pow_mod(w, p - 1, p2);
    // t == 1 (mod p) by Fermat's little theorem, so the division is exact.
    debug_assert_eq!(t % p, 1);
    ((t + p2 - 1) % p2) / p
}
