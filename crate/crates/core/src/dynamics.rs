//! Functional graph of `u -> q_p(u)` on `{0, ..., p-1}`: orbits, fixed points,
//! image size and cyclic points, plus sweeps over ranges of primes compared
//! with the random-map model.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::batch::{generate_table, QuotientTable};
use crate::context::{make_context, FqContext};
use crate::error::{FqError, Result};
use crate::rng::SplitMix64;
use crate::sieve::odd_primes_in;
use crate::stats::CompensatedSum;

/// Orbit length `rho`, tail length `mu` and cycle length `rho - mu` of a
/// trajectory `u_0, u_1 = q_p(u_0), ...`; `rho` is the first index that
/// repeats an earlier state and `mu` the index of that earlier state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub rho: u64,
    pub mu: u64,
    pub cycle_len: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub p: u64,
    /// Fixed points with `u != 0`.
    pub fixed_points_excl0: u64,
    /// Fixed points including the trivial `u = 0`.
    pub fixed_points_incl0: u64,
    /// Number of distinct values of `q_p` on `[0, p)`.
    pub image_size: u64,
    /// Nodes lying on a cycle.
    pub cyclic_count: u64,
}

/// Asymptotic constants of a uniformly random map on `m` points.
pub struct RandomMapBaseline;

impl RandomMapBaseline {
    /// Expected `rho / sqrt(m)`, i.e. `sqrt(pi/2)`.
    pub fn rho_over_sqrt() -> f64 {
        (std::f64::consts::PI / 2.0).sqrt()
    }

    /// Expected `mu / sqrt(m)`, i.e. `sqrt(pi/8)`.
    pub fn mu_over_sqrt() -> f64 {
        (std::f64::consts::PI / 8.0).sqrt()
    }

    /// Expected cyclic nodes over `sqrt(m)`; same constant as `rho`.
    pub fn cyclic_over_sqrt() -> f64 {
        Self::rho_over_sqrt()
    }

    /// Expected image fraction `1 - 1/e`.
    pub fn image_fraction() -> f64 {
        1.0 - (-1.0f64).exp()
    }

    /// Limiting probability `1 / (e k!)` of exactly `k` fixed points.
    pub fn fixpoint_law(k: u32) -> f64 {
        let factorial: f64 = (1..=k).map(f64::from).product();
        (-1.0f64).exp() / factorial
    }
}

fn check_start(ctx: &FqContext, u0: u64) -> Result<()> {
    if u0 >= ctx.p() {
        return Err(FqError::BadParameter(format!(
            "start {u0} must lie in [0, {})",
            ctx.p()
        )));
    }
    Ok(())
}

/// Exact orbit of `u0`. With a table, states are stamped in an O(p) array;
/// without one, Brent's cycle finder runs on direct evaluation in O(1)
/// memory.
pub fn orbit(ctx: &FqContext, u0: u64, table: Option<&QuotientTable>) -> Result<OrbitResult> {
    check_start(ctx, u0)?;
    match table {
        Some(t) => {
            if t.p() != ctx.p() {
                return Err(FqError::BadParameter(format!(
                    "table is for p = {}, context for p = {}",
                    t.p(),
                    ctx.p()
                )));
            }
            Ok(orbit_in_table(t.values(), u0))
        }
        None => Ok(orbit_brent(|u| ctx.eval_unsigned(u).0 as u64, u0)),
    }
}

/// Orbit of `u0` under the map stored in `next`.
pub fn orbit_in_table(next: &[u32], u0: u64) -> OrbitResult {
    const UNSEEN: u32 = u32::MAX;
    let mut first_seen = vec![UNSEEN; next.len()];
    let mut u = u0 as usize;
    let mut t = 0u32;
    loop {
        let seen = first_seen[u];
        if seen != UNSEEN {
            let (rho, mu) = (t as u64, seen as u64);
            return OrbitResult {
                rho,
                mu,
                cycle_len: rho - mu,
            };
        }
        first_seen[u] = t;
        t += 1;
        u = next[u] as usize;
    }
}

/// Brent's cycle detection for an arbitrary map `f`.
pub fn orbit_brent<F: Fn(u64) -> u64>(f: F, u0: u64) -> OrbitResult {
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = u0;
    let mut hare = f(u0);
    while tortoise != hare {
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = f(hare);
        lam += 1;
    }
    let mut tortoise = u0;
    let mut hare = u0;
    for _ in 0..lam {
        hare = f(hare);
    }
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = f(tortoise);
        hare = f(hare);
        mu += 1;
    }
    OrbitResult {
        rho: mu + lam,
        mu,
        cycle_len: lam,
    }
}

/// Fixed points by scan, image size by presence bitmap, cyclic nodes by
/// repeatedly deleting nodes of in-degree zero.
pub fn graph_stats(table: &QuotientTable) -> GraphStats {
    let next = table.values();
    let n = next.len();
    let fixed_points_incl0 = next
        .iter()
        .enumerate()
        .filter(|&(u, &q)| u == q as usize)
        .count() as u64;

    let mut indeg = vec![0u32; n];
    for &q in next {
        indeg[q as usize] += 1;
    }
    let image_size = indeg.iter().filter(|&&d| d > 0).count() as u64;

    let mut stack: Vec<u32> = (0..n as u32).filter(|&u| indeg[u as usize] == 0).collect();
    let mut removed = 0u64;
    while let Some(u) = stack.pop() {
        removed += 1;
        let v = next[u as usize] as usize;
        indeg[v] -= 1;
        if indeg[v] == 0 {
            stack.push(v as u32);
        }
    }

    GraphStats {
        p: table.p(),
        fixed_points_excl0: fixed_points_incl0 - 1,
        fixed_points_incl0,
        image_size,
        cyclic_count: n as u64 - removed,
    }
}

/// How the orbit start `u0` is chosen for each prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum U0Policy {
    /// The same start for every prime (must be below every prime swept).
    Fixed(u64),
    /// Uniform on `[1, p-1]`, drawn from `SplitMix64::for_stream(seed, p)`.
    SeededRandom(u64),
}

impl U0Policy {
    pub fn start_for(&self, p: u64) -> u64 {
        match *self {
            U0Policy::Fixed(u) => u,
            U0Policy::SeededRandom(seed) => SplitMix64::for_stream(seed, p).in_range(1, p - 1),
        }
    }

    /// Stable text tag, e.g. `fixed:2` or `seeded:42`.
    pub fn tag(&self) -> String {
        match *self {
            U0Policy::Fixed(u) => format!("fixed:{u}"),
            U0Policy::SeededRandom(s) => format!("seeded:{s}"),
        }
    }

    pub fn parse_tag(s: &str) -> Option<Self> {
        let (kind, value) = s.split_once(':')?;
        let value = value.parse().ok()?;
        match kind {
            "fixed" => Some(U0Policy::Fixed(value)),
            "seeded" => Some(U0Policy::SeededRandom(value)),
            _ => None,
        }
    }
}

/// Per-prime dynamics summary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRow {
    pub p: u64,
    pub fixed_points_excl0: u64,
    pub image_size: u64,
    pub cyclic_count: u64,
    pub rho: u64,
    pub mu: u64,
    pub u0: u64,
}

/// Full analysis of one prime: table, graph statistics and one orbit.
pub fn analyze_prime(p: u64, policy: U0Policy) -> Result<PrimeRow> {
    let ctx = make_context(p, true)?;
    let table = generate_table(&ctx)?;
    let u0 = policy.start_for(p);
    check_start(&ctx, u0)?;
    let stats = graph_stats(&table);
    let orbit = orbit_in_table(table.values(), u0);
    Ok(PrimeRow {
        p,
        fixed_points_excl0: stats.fixed_points_excl0,
        image_size: stats.image_size,
        cyclic_count: stats.cyclic_count,
        rho: orbit.rho,
        mu: orbit.mu,
        u0,
    })
}

/// Analyzes every odd prime in `[lo, hi]` in parallel; rows come back in
/// ascending order of `p`.
pub fn analyze_range(lo: u64, hi: u64, policy: U0Policy) -> Result<Vec<PrimeRow>> {
    odd_primes_in(lo, hi)
        .into_par_iter()
        .map(|p| analyze_prime(p, policy))
        .collect()
}

/// Number of primes in `[lo, hi]` whose map has exactly `k` nonzero fixed
/// points, keyed by `k`.
pub fn fixed_point_distribution(lo: u64, hi: u64) -> Result<BTreeMap<u64, u64>> {
    let counts: Vec<u64> = odd_primes_in(lo, hi)
        .into_par_iter()
        .map(|p| {
            let ctx = make_context(p, true)?;
            let table = generate_table(&ctx)?;
            Ok(table
                .values()
                .iter()
                .enumerate()
                .skip(1)
                .filter(|&(u, &q)| u == q as usize)
                .count() as u64)
        })
        .collect::<Result<_>>()?;
    Ok(histogram(counts))
}

pub fn histogram<I: IntoIterator<Item = u64>>(values: I) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    for k in values {
        *out.entry(k).or_insert(0) += 1;
    }
    out
}

/// Means over primes, each weighted equally.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub prime_count: u64,
    pub mean_rho_over_sqrt: f64,
    pub mean_mu_over_sqrt: f64,
    pub mean_image_over_p: f64,
    /// Cyclic nodes other than the fixed point 0, over `sqrt(p)`.
    pub mean_cyclic_over_sqrt: f64,
}

/// Averages rows in the order given; callers pass them sorted by `p` so the
/// result is bit-stable.
pub fn summarize(rows: &[PrimeRow]) -> AggregateSummary {
    let mut rho = CompensatedSum::default();
    let mut mu = CompensatedSum::default();
    let mut image = CompensatedSum::default();
    let mut cyclic = CompensatedSum::default();
    for r in rows {
        let pf = r.p as f64;
        let root = pf.sqrt();
        rho.add(r.rho as f64 / root);
        mu.add(r.mu as f64 / root);
        image.add(r.image_size as f64 / pf);
        // 0 is always a fixed point; like F, the mean counts only the
        // nontrivial cyclic nodes.
        cyclic.add(r.cyclic_count.saturating_sub(1) as f64 / root);
    }
    let n = rows.len() as f64;
    let mean = |s: CompensatedSum| {
        if rows.is_empty() {
            f64::NAN
        } else {
            s.value() / n
        }
    };
    AggregateSummary {
        prime_count: rows.len() as u64,
        mean_rho_over_sqrt: mean(rho),
        mean_mu_over_sqrt: mean(mu),
        mean_image_over_p: mean(image),
        mean_cyclic_over_sqrt: mean(cyclic),
    }
}

pub fn aggregate_stats(lo: u64, hi: u64, policy: U0Policy) -> Result<AggregateSummary> {
    let rows = analyze_range(lo, hi, policy)?;
    Ok(summarize(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_prime;

    fn table(p: u64) -> QuotientTable {
        generate_table(&make_context(p, true).unwrap()).unwrap()
    }

    /// Walks the trajectory with a list and finds the first repeat by search.
    fn naive_orbit(next: &[u32], u0: u64) -> OrbitResult {
        let mut states = vec![u0];
        loop {
            let u = next[*states.last().unwrap() as usize] as u64;
            if let Some(mu) = states.iter().position(|&s| s == u) {
                let rho = states.len() as u64;
                return OrbitResult {
                    rho,
                    mu: mu as u64,
                    cycle_len: rho - mu as u64,
                };
            }
            states.push(u);
        }
    }

    #[test]
    fn orbit_examples() {
        let c5 = make_context(5, true).unwrap();
        let t5 = table(5);
        let expect = OrbitResult {
            rho: 4,
            mu: 3,
            cycle_len: 1,
        };
        assert_eq!(orbit(&c5, 2, Some(&t5)).unwrap(), expect);
        assert_eq!(orbit(&c5, 2, None).unwrap(), expect);
        let zero = OrbitResult {
            rho: 1,
            mu: 0,
            cycle_len: 1,
        };
        assert_eq!(orbit(&c5, 0, Some(&t5)).unwrap(), zero);
        assert_eq!(orbit(&c5, 0, None).unwrap(), zero);
        let c7 = make_context(7, true).unwrap();
        assert_eq!(orbit(&c7, 3, None).unwrap(), expect);
        assert!(orbit(&c7, 7, None).is_err());
        assert!(orbit(&c7, 1, Some(&t5)).is_err());
    }

    #[test]
    fn brent_and_table_agree() {
        for p in (3..1000u64).filter(|&p| is_prime(p)) {
            let ctx = make_context(p, true).unwrap();
            let t = generate_table(&ctx).unwrap();
            for u0 in 0..p {
                let a = orbit(&ctx, u0, Some(&t)).unwrap();
                let b = orbit(&ctx, u0, None).unwrap();
                assert_eq!(a, b, "p = {p}, u0 = {u0}");
                if p < 200 {
                    assert_eq!(a, naive_orbit(t.values(), u0));
                }
                assert!(a.mu < a.rho && a.cycle_len >= 1 && a.rho <= p);
            }
        }
    }

    #[test]
    fn orbit_consistency() {
        let ctx = make_context(997, true).unwrap();
        let t = generate_table(&ctx).unwrap();
        let f = |u: u64| t.get(u).0 as u64;
        for u0 in 0..997 {
            let o = orbit(&ctx, u0, Some(&t)).unwrap();
            let mut u = u0;
            let mut tail = Vec::new();
            for _ in 0..o.mu {
                tail.push(u);
                u = f(u);
            }
            let entry = u;
            let mut cycle = vec![u];
            for _ in 1..o.cycle_len {
                u = f(u);
                cycle.push(u);
            }
            assert_eq!(f(u), entry);
            assert!(tail.iter().all(|x| !cycle.contains(x)));
            let mut sorted = tail.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), tail.len());
        }
    }

    #[test]
    fn graph_examples() {
        let s5 = graph_stats(&table(5));
        assert_eq!(
            (
                s5.fixed_points_excl0,
                s5.fixed_points_incl0,
                s5.image_size,
                s5.cyclic_count
            ),
            (0, 1, 3, 1)
        );
        let s7 = graph_stats(&table(7));
        assert_eq!(
            (s7.fixed_points_excl0, s7.image_size, s7.cyclic_count),
            (2, 5, 3)
        );
    }

    /// Union of the cycles reached from every start, found by iterating `p`
    /// steps (which always lands on a cycle) and walking it.
    fn cyclic_nodes_bruteforce(next: &[u32]) -> u64 {
        let n = next.len();
        let mut on_cycle = vec![false; n];
        for start in 0..n {
            let mut u = start;
            for _ in 0..n {
                u = next[u] as usize;
            }
            let entry = u;
            loop {
                on_cycle[u] = true;
                u = next[u] as usize;
                if u == entry {
                    break;
                }
            }
        }
        on_cycle.iter().filter(|&&b| b).count() as u64
    }

    #[test]
    fn peeling_matches_bruteforce() {
        for p in (3..1000u64).filter(|&p| is_prime(p)) {
            let t = table(p);
            let s = graph_stats(&t);
            assert_eq!(
                s.cyclic_count,
                cyclic_nodes_bruteforce(t.values()),
                "p = {p}"
            );
            assert_eq!(s.fixed_points_incl0, s.fixed_points_excl0 + 1);
            assert!(s.cyclic_count >= 1 && s.cyclic_count <= p);
            assert!(s.image_size >= 1);
            let mut image: Vec<u32> = t.values().to_vec();
            image.sort_unstable();
            image.dedup();
            assert_eq!(s.image_size, image.len() as u64);
        }
    }

    #[test]
    fn fixed_point_distribution_small() {
        let d = fixed_point_distribution(5, 7).unwrap();
        assert_eq!(d, BTreeMap::from([(0, 1), (2, 1)]));
        assert!(fixed_point_distribution(24, 28).unwrap().is_empty());
        let d = fixed_point_distribution(3, 5000).unwrap();
        assert_eq!(d.values().sum::<u64>(), odd_primes_in(3, 5000).len() as u64);
    }

    #[test]
    fn baseline_constants() {
        assert!((RandomMapBaseline::rho_over_sqrt() - 1.2533141373).abs() < 1e-10);
        assert!((RandomMapBaseline::mu_over_sqrt() - 0.6266570687).abs() < 1e-10);
        assert!((RandomMapBaseline::image_fraction() - 0.6321205588).abs() < 1e-10);
        assert!((RandomMapBaseline::fixpoint_law(0) - 0.3678794412).abs() < 1e-10);
        assert!((RandomMapBaseline::fixpoint_law(3) - 0.0613132402).abs() < 1e-10);
        assert!((RandomMapBaseline::fixpoint_law(6) - 0.0005109437).abs() < 1e-10);
    }

    #[test]
    fn policies() {
        assert_eq!(U0Policy::Fixed(2).start_for(101), 2);
        let pol = U0Policy::SeededRandom(42);
        for p in [3u64, 5, 101, 65537] {
            let u = pol.start_for(p);
            assert!((1..p).contains(&u));
            assert_eq!(u, pol.start_for(p));
        }
        assert_eq!(U0Policy::parse_tag("fixed:2"), Some(U0Policy::Fixed(2)));
        assert_eq!(U0Policy::parse_tag(&pol.tag()), Some(pol));
        assert_eq!(U0Policy::parse_tag("random:1"), None);
    }

    #[test]
    fn range_rows_are_sorted_and_deterministic() {
        let a = analyze_range(3, 3000, U0Policy::SeededRandom(9)).unwrap();
        let b = analyze_range(3, 3000, U0Policy::SeededRandom(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0].p < w[1].p));
        assert_eq!(summarize(&a).prime_count, a.len() as u64);
        assert!(summarize(&[]).mean_rho_over_sqrt.is_nan());
        let rows = analyze_range(5, 7, U0Policy::Fixed(2)).unwrap();
        assert_eq!(rows[0].rho, 4);
        assert_eq!(rows[1].cyclic_count, 3);
    }
}
