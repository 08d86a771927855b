//! Exponential sums `S = sum_{u=M+1}^{M+N} e_p(a_0 q_p(u) + ... + a_{s-1} q_p(u+s-1))`
//! with `e_p(x) = exp(2 pi i x / p)`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::sequence::QuotientSequence;
use crate::context::FqContext;
use crate::error::{FqError, Result};
use crate::stats::CompensatedSum;

/// Largest number of terms summed directly.
pub const MAX_TERMS: u64 = 100_000_000;

// Above this modulus the unit roots are evaluated per term.
const ROOT_TABLE_LIMIT: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpSumSpec {
    /// Offset: the sum runs over `u = M+1, ..., M+N`.
    pub m: i64,
    pub n: u64,
    /// Coefficients `a_0, ..., a_{s-1}`; `s = a.len()`.
    pub a: Vec<i64>,
}

impl ExpSumSpec {
    pub fn dimension(&self) -> usize {
        self.a.len()
    }

    pub fn validate(&self, p: u64) -> Result<()> {
        if self.a.is_empty() {
            return Err(FqError::BadParameter(
                "dimension s must be at least 1".into(),
            ));
        }
        if self.n == 0 {
            return Err(FqError::BadParameter("length N must be at least 1".into()));
        }
        if self.n > MAX_TERMS {
            return Err(FqError::TooLong {
                len: self.n,
                cap: MAX_TERMS,
            });
        }
        if self.a.iter().all(|&a| a.rem_euclid(p as i64) == 0) {
            return Err(FqError::BadCoefficients(p));
        }
        Ok(())
    }
}

/// `|S|` for the context prime; builds the quotient table internally.
pub fn exp_sum(ctx: &FqContext, spec: &ExpSumSpec) -> Result<f64> {
    spec.validate(ctx.p())?;
    let seq = QuotientSequence::for_context(ctx)?;
    exp_sum_with(&seq, spec)
}

/// `|S|` over a prebuilt sequence. Real and imaginary parts are accumulated
/// with compensated summation.
pub fn exp_sum_with(seq: &QuotientSequence, spec: &ExpSumSpec) -> Result<f64> {
    let p = seq.p();
    spec.validate(p)?;
    let coeffs: Vec<u64> = spec
        .a
        .iter()
        .map(|&a| a.rem_euclid(p as i64) as u64)
        .collect();
    let s = coeffs.len();

    let roots: Option<Vec<(f64, f64)>> = (p <= ROOT_TABLE_LIMIT).then(|| {
        (0..p)
            .map(|k| {
                let (sin, cos) = (TAU * k as f64 / p as f64).sin_cos();
                (cos, sin)
            })
            .collect()
    });
    let root = |k: u64| -> (f64, f64) {
        match &roots {
            Some(t) => t[k as usize],
            None => {
                let (sin, cos) = (TAU * k as f64 / p as f64).sin_cos();
                (cos, sin)
            }
        }
    };

    // Sliding window of the s most recent quotient values.
    let first = spec.m + 1;
    let mut window: Vec<u64> = seq.window(first, s);
    let mut head = 0usize;
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for i in 0..spec.n {
        let mut phase = 0u64;
        for (j, &a) in coeffs.iter().enumerate() {
            phase += a * window[(head + j) % s] % p;
        }
        let (c, si) = root(phase % p);
        re.add(c);
        im.add(si);
        if i + 1 < spec.n {
            window[head] = seq.at(first + i as i64 + s as i64);
            head = (head + 1) % s;
        }
    }
    Ok(re.value().hypot(im.value()))
}

/// Reference envelope `s * p * ln p`.
pub fn exp_sum_bound(s: usize, p: u64) -> f64 {
    s as f64 * p as f64 * (p as f64).ln()
}

/// One checked bound: the measured value against its envelope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck<S> {
    pub spec: S,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
}

impl<S> BoundCheck<S> {
    pub fn new(spec: S, value: f64, bound: f64) -> Self {
        BoundCheck {
            spec,
            value,
            bound,
            ratio: value / bound,
        }
    }
}
