//! Hash built from iterated Fermat quotients.
//!
//! Parameters are `2^r` distinct `(n+1)`-bit primes `p_0, ..., p_{2^r-1}` and
//! an `n`-bit start `u_0`. A message is left-padded with zeros to a multiple
//! of `r` bits and split into `r`-bit blocks, each read most significant bit
//! first as an index `l_j`. Then `u_j = q_{p_{l_j}}(u_{j-1} mod 2^n)`, and the
//! digest is `u_J mod 2^n` (`u_0` for the empty message).
//!
//! Key expansion: a [`SplitMix64`] stream seeded with `seed` first yields
//! the primes in index order (each draw `x` becomes the odd candidate
//! `2^n | (x mod 2^n) | 1`; composites and repeats are skipped), then `u_0`
//! (draws `x mod 2^n`, skipping 0).
//!
//! Inputs of different lengths collide trivially: if `r` does not divide the
//! length of `s`, then `s` and `0 || s` pad to the same string.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{fermat_quotient, is_prime};
use crate::error::{FqError, Result};
use crate::rng::SplitMix64;
use crate::sieve::primes_in;

pub const MIN_OUTPUT_BITS: u32 = 8;
pub const MAX_OUTPUT_BITS: u32 = 31;
pub const MAX_SELECTOR_BITS: u32 = 8;

/// Hash key: output width `n`, selector width `r`, the prime family and
/// the start value. Serialized as `{n, r, seed, primes, u0}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashParams {
    pub n: u32,
    pub r: u32,
    pub seed: u64,
    pub primes: Vec<u64>,
    pub u0: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Digest(pub u32);

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A message as a sequence of bits, first bit first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    /// Bytes in order, each byte most significant bit first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let bits = bytes
            .iter()
            .flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
            .collect();
        BitString { bits }
    }

    /// Parses a string of `0` and `1` characters.
    pub fn parse_binary(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(FqError::BadParameter(format!("'{c}' is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::new)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `0 || self`.
    pub fn with_leading_zero(&self) -> Self {
        let mut bits = Vec::with_capacity(self.bits.len() + 1);
        bits.push(false);
        bits.extend_from_slice(&self.bits);
        BitString { bits }
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    /// Left-pads to a multiple of `r` and yields each `r`-bit block as an
    /// integer read most significant bit first.
    pub fn blocks(&self, r: u32) -> impl Iterator<Item = usize> + '_ {
        let r = r as usize;
        let pad = (r - self.bits.len() % r) % r;
        let padded = std::iter::repeat(false)
            .take(pad)
            .chain(self.bits.iter().copied());
        let total = pad + self.bits.len();
        let mut iter = padded;
        (0..total / r)
            .map(move |_| (0..r).fold(0usize, |acc, _| (acc << 1) | iter.next().unwrap() as usize))
    }
}

fn check_widths(n: u32, r: u32) -> Result<()> {
    if !(MIN_OUTPUT_BITS..=MAX_OUTPUT_BITS).contains(&n) {
        return Err(FqError::ParamRange(format!(
            "n = {n} outside [{MIN_OUTPUT_BITS}, {MAX_OUTPUT_BITS}]"
        )));
    }
    if !(1..=MAX_SELECTOR_BITS).contains(&r) {
        return Err(FqError::ParamRange(format!(
            "r = {r} outside [1, {MAX_SELECTOR_BITS}]"
        )));
    }
    // Small n may not have 2^r primes of n+1 bits.
    if n < 16 {
        let available = primes_in(1 << n, (1 << (n + 1)) - 1).len();
        if available < 1 << r {
            return Err(FqError::ParamRange(format!(
                "only {available} primes have {} bits; 2^{r} requested",
                n + 1
            )));
        }
    }
    Ok(())
}

/// Deterministic key expansion from `seed`.
pub fn keygen(seed: u64, n: u32, r: u32) -> Result<HashParams> {
    check_widths(n, r)?;
    let mut rng = SplitMix64::new(seed);
    let mask = (1u64 << n) - 1;
    let count = 1usize << r;
    let mut primes: Vec<u64> = Vec::with_capacity(count);
    while primes.len() < count {
        let candidate = (1u64 << n) | (rng.next_u64() & mask) | 1;
        if is_prime(candidate) && !primes.contains(&candidate) {
            primes.push(candidate);
        }
    }
    let u0 = loop {
        let v = rng.next_u64() & mask;
        if v != 0 {
            break v;
        }
    };
    Ok(HashParams {
        n,
        r,
        seed,
        primes,
        u0,
    })
}

impl HashParams {
    /// Checks widths and the prime family, e.g. after loading from JSON.
    pub fn validate(&self) -> Result<()> {
        check_widths(self.n, self.r)?;
        if self.primes.len() != 1 << self.r {
            return Err(FqError::ParamRange(format!(
                "expected {} primes, found {}",
                1u64 << self.r,
                self.primes.len()
            )));
        }
        let lo = 1u64 << self.n;
        for (i, &p) in self.primes.iter().enumerate() {
            if p < lo || p >= lo << 1 || !is_prime(p) {
                return Err(FqError::ParamRange(format!(
                    "p_{i} = {p} is not a prime of {} bits",
                    self.n + 1
                )));
            }
            if self.primes[..i].contains(&p) {
                return Err(FqError::ParamRange(format!("p_{i} = {p} is repeated")));
            }
        }
        if self.u0 == 0 || self.u0 >= lo {
            return Err(FqError::ParamRange(format!(
                "u0 = {} outside [1, 2^n)",
                self.u0
            )));
        }
        Ok(())
    }

    fn mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }
}

pub fn digest(params: &HashParams, message: &BitString) -> Digest {
    let mask = params.mask();
    let mut u = params.u0;
    for block in message.blocks(params.r) {
        let w = u & mask;
        // w < 2^n < p, so w is never a positive multiple of p.
        u = fermat_quotient(params.primes[block], w);
    }
    Digest((u & mask) as u32)
}

/// Fraction of the `n` output bits on which two digests differ.
pub fn flip_rate(params: &HashParams, a: Digest, b: Digest) -> f64 {
    (a.0 ^ b.0).count_ones() as f64 / params.n as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvalancheStats {
    pub trials: u64,
    pub message_len: usize,
    /// Probability that output bit `i` (least significant first) flips.
    pub per_bit: Vec<f64>,
    /// Mean fraction of output bits flipped.
    pub overall: f64,
}

/// Hashes `trials` random messages of `message_len` bits, flips one random
/// bit of each, and records which output bits change.
pub fn avalanche(
    params: &HashParams,
    trials: u64,
    message_len: usize,
    seed: u64,
) -> Result<AvalancheStats> {
    if trials == 0 {
        return Err(FqError::ParamRange("trials must be at least 1".into()));
    }
    if message_len == 0 {
        return Err(FqError::ParamRange("message_len must be at least 1".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut flips = vec![0u64; params.n as usize];
    for _ in 0..trials {
        let bits: Vec<bool> = (0..message_len)
            .map(|_| rng.next_u64() >> 63 == 1)
            .collect();
        let mut msg = BitString::new(bits);
        let before = digest(params, &msg);
        msg.flip(rng.below(message_len as u64) as usize);
        let diff = before.0 ^ digest(params, &msg).0;
        for (i, f) in flips.iter_mut().enumerate() {
            *f += ((diff >> i) & 1) as u64;
        }
    }
    let per_bit: Vec<f64> = flips.iter().map(|&f| f as f64 / trials as f64).collect();
    let overall = per_bit.iter().sum::<f64>() / params.n as f64;
    Ok(AvalancheStats {
        trials,
        message_len,
        per_bit,
        overall,
    })
}
