//! Star discrepancy of finite point sets in `[0,1)^s`: the supremum over
//! anchored boxes `[0, t)` of `|#{x in box} / N - vol(box)|`.
//!
//! The supremum is attained in the limit at a critical grid: every `t_d` is
//! either a point coordinate or 1. At a grid corner the two candidates are
//! `vol - #{x < t} / N` (open box) and `#{x <= t} / N - vol` (closed box,
//! the limit from above).

use super::sequence::QuotientSequence;
use crate::error::{FqError, Result};
use crate::rng::SplitMix64;

/// Largest point count accepted by the exact routine.
pub const EXACT_MAX_POINTS: usize = 2000;

/// `N` points of dimension `s`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(FqError::BadParameter(format!(
                "{} coordinates do not form points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(x) = coords.iter().find(|x| !(0.0..1.0).contains(*x)) {
            return Err(FqError::BadParameter(format!(
                "coordinate {x} outside [0, 1)"
            )));
        }
        Ok(PointSet { dim, coords })
    }

    /// Points `(q_p(u)/p, ..., q_p(u+s-1)/p)` for `u = M+1, ..., M+N`.
    pub fn from_quotients(seq: &QuotientSequence, m: i64, n: usize, dim: usize) -> Result<Self> {
        let p = seq.p() as f64;
        let values = seq.window(m + 1, n + dim.saturating_sub(1));
        let mut coords = Vec::with_capacity(n * dim);
        for i in 0..n {
            coords.extend(values[i..i + dim].iter().map(|&q| q as f64 / p));
        }
        PointSet::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn axis(&self, d: usize) -> impl Iterator<Item = f64> + '_ {
        self.coords.iter().skip(d).step_by(self.dim).copied()
    }

    /// Sorted distinct coordinates along axis `d`, followed by 1.
    fn critical(&self, d: usize) -> Vec<f64> {
        let mut c: Vec<f64> = self.axis(d).collect();
        c.sort_by(f64::total_cmp);
        c.dedup();
        c.push(1.0);
        c
    }
}

/// Exact one-dimensional star discrepancy from the sorted sample.
pub fn star_discrepancy_1d(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(FqError::BadParameter("need at least one point".into()));
    }
    if let Some(x) = points.iter().find(|x| !(0.0..1.0).contains(*x)) {
        return Err(FqError::BadParameter(format!("point {x} outside [0, 1)")));
    }
    let mut x = points.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    Ok(x.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let i = i as f64;
            ((i + 1.0) / n - xi).max(xi - i / n)
        })
        .fold(0.0, f64::max))
}

struct Fenwick(Vec<u32>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick(vec![0; n + 1])
    }

    fn add(&mut self, i: usize) {
        let mut i = i + 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of inserted indices `< i`.
    fn prefix(&self, mut i: usize) -> u32 {
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i &= i - 1;
        }
        s
    }
}

/// Max over `(d, e)` in `ys x zs` of the two grid candidates, where the box
/// volume is `scale * d * e` and `open` / `closed` hold the points already
/// admitted by the outer coordinates.
fn grid_max_2d(
    open: &mut [(f64, f64)],
    closed: &mut [(f64, f64)],
    ys: &[f64],
    zs: &[f64],
    scale: f64,
    n: f64,
) -> f64 {
    open.sort_by(|a, b| a.0.total_cmp(&b.0));
    closed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut open_tree = Fenwick::new(zs.len());
    let mut closed_tree = Fenwick::new(zs.len());
    let rank = |z: f64| zs.partition_point(|&c| c < z);
    let (mut oi, mut ci) = (0, 0);
    let mut best = 0.0f64;
    for &d in ys {
        while oi < open.len() && open[oi].0 < d {
            open_tree.add(rank(open[oi].1));
            oi += 1;
        }
        while ci < closed.len() && closed[ci].0 <= d {
            closed_tree.add(rank(closed[ci].1));
            ci += 1;
        }
        for (k, &e) in zs.iter().enumerate() {
            let vol = scale * d * e;
            // zs holds distinct sorted values, so z < e <=> rank < k and
            // z <= e <=> rank <= k.
            let a_open = open_tree.prefix(k) as f64;
            let a_closed = closed_tree.prefix(k + 1) as f64;
            best = best.max(vol - a_open / n).max(a_closed / n - vol);
        }
    }
    best
}

/// Exact star discrepancy for `s` in `{1, 2, 3}` and at most
/// [`EXACT_MAX_POINTS`] points. Costs `O(N^s log N)`.
pub fn star_discrepancy_nd(points: &PointSet) -> Result<f64> {
    if points.is_empty() {
        return Err(FqError::BadParameter("need at least one point".into()));
    }
    if points.len() > EXACT_MAX_POINTS {
        return Err(FqError::BadParameter(format!(
            "exact mode accepts at most {EXACT_MAX_POINTS} points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    match points.dim() {
        1 => star_discrepancy_1d(&points.axis(0).collect::<Vec<_>>()),
        2 => {
            let mut pts: Vec<(f64, f64)> = (0..points.len())
                .map(|i| (points.point(i)[0], points.point(i)[1]))
                .collect();
            let mut closed = pts.clone();
            Ok(grid_max_2d(
                &mut pts,
                &mut closed,
                &points.critical(0),
                &points.critical(1),
                1.0,
                n,
            ))
        }
        3 => {
            let xs = points.critical(0);
            let ys = points.critical(1);
            let zs = points.critical(2);
            let mut best = 0.0f64;
            for &c in &xs {
                let mut open = Vec::new();
                let mut closed = Vec::new();
                for i in 0..points.len() {
                    let pt = points.point(i);
                    if pt[0] < c {
                        open.push((pt[1], pt[2]));
                    }
                    if pt[0] <= c {
                        closed.push((pt[1], pt[2]));
                    }
                }
                best = best.max(grid_max_2d(&mut open, &mut closed, &ys, &zs, c, n));
            }
            Ok(best)
        }
        s => Err(FqError::DimensionUnsupported(s)),
    }
}

/// Monte-Carlo lower bound on the star discrepancy for any dimension and
/// size: evaluates `samples` random corners of the critical grid.
pub fn star_discrepancy_nd_estimate(points: &PointSet, samples: u64, seed: u64) -> Result<f64> {
    if points.is_empty() {
        return Err(FqError::BadParameter("need at least one point".into()));
    }
    let grids: Vec<Vec<f64>> = (0..points.dim()).map(|d| points.critical(d)).collect();
    let mut rng = SplitMix64::new(seed);
    let n = points.len() as f64;
    let mut best = 0.0f64;
    let mut corner = vec![0.0; points.dim()];
    for _ in 0..samples {
        for (c, g) in corner.iter_mut().zip(&grids) {
            *c = g[rng.below(g.len() as u64) as usize];
        }
        let vol: f64 = corner.iter().product();
        let (mut a_open, mut a_closed) = (0u64, 0u64);
        for i in 0..points.len() {
            let pt = points.point(i);
            a_open += pt.iter().zip(&corner).all(|(x, t)| x < t) as u64;
            a_closed += pt.iter().zip(&corner).all(|(x, t)| x <= t) as u64;
        }
        best = best
            .max(vol - a_open as f64 / n)
            .max(a_closed as f64 / n - vol);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::make_context;

    /// Evaluates both candidates at every corner of the full product grid
    /// by counting points directly.
    fn brute_force(points: &PointSet) -> f64 {
        let grids: Vec<Vec<f64>> = (0..points.dim()).map(|d| points.critical(d)).collect();
        let n = points.len() as f64;
        let mut best = 0.0f64;
        let mut idx = vec![0usize; points.dim()];
        loop {
            let corner: Vec<f64> = idx.iter().zip(&grids).map(|(&i, g)| g[i]).collect();
            let vol: f64 = corner.iter().product();
            let mut a_open = 0.0;
            let mut a_closed = 0.0;
            for i in 0..points.len() {
                let pt = points.point(i);
                if pt.iter().zip(&corner).all(|(x, t)| x < t) {
                    a_open += 1.0;
                }
                if pt.iter().zip(&corner).all(|(x, t)| x <= t) {
                    a_closed += 1.0;
                }
            }
            best = best.max(vol - a_open / n).max(a_closed / n - vol);
            let mut d = 0;
            loop {
                if d == idx.len() {
                    return best;
                }
                idx[d] += 1;
                if idx[d] < grids[d].len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }

    #[test]
    fn one_dimensional_examples() {
        assert_eq!(star_discrepancy_1d(&[0.5]).unwrap(), 0.5);
        assert_eq!(star_discrepancy_1d(&[0.75, 0.25]).unwrap(), 0.25);
        for n in [1usize, 2, 7, 100] {
            let grid: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
            assert!((star_discrepancy_1d(&grid).unwrap() - 1.0 / n as f64).abs() < 1e-12);
        }
        assert!(star_discrepancy_1d(&[]).is_err());
    }

    #[test]
    fn multi_dimensional_examples() {
        let single = PointSet::new(2, vec![0.5, 0.5]).unwrap();
        assert!((star_discrepancy_nd(&single).unwrap() - 0.75).abs() < 1e-15);
        assert!((brute_force(&single) - 0.75).abs() < 1e-15);

        let corner = PointSet::new(2, vec![0.0; 20]).unwrap();
        assert_eq!(star_discrepancy_nd(&corner).unwrap(), 1.0);

        let one_d = [0.25, 0.75];
        let mut coords = Vec::new();
        for &x in &one_d {
            for &y in &one_d {
                coords.extend([x, y]);
            }
        }
        let grid = PointSet::new(2, coords).unwrap();
        assert!((star_discrepancy_nd(&grid).unwrap() - brute_force(&grid)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(PointSet::new(2, vec![0.1, 0.2, 0.3]).is_err());
        assert!(PointSet::new(1, vec![1.0]).is_err());
        assert!(PointSet::new(1, vec![-0.1]).is_err());
        let four = PointSet::new(4, vec![0.1; 8]).unwrap();
        assert!(matches!(
            star_discrepancy_nd(&four),
            Err(FqError::DimensionUnsupported(4))
        ));
        let big = PointSet::new(1, vec![0.5; EXACT_MAX_POINTS + 1]).unwrap();
        assert!(star_discrepancy_nd(&big).is_err());
        assert!(star_discrepancy_nd_estimate(&four, 100, 1).unwrap() > 0.0);
    }

    #[test]
    fn exact_matches_brute_force_on_quotient_points() {
        for p in [13u64, 31, 53] {
            let seq = QuotientSequence::for_context(&make_context(p, false).unwrap()).unwrap();
            for dim in 1..=3 {
                for (m, n) in [(0i64, 20usize), (7, 35), (-5, 60)] {
                    let pts = PointSet::from_quotients(&seq, m, n, dim).unwrap();
                    let exact = star_discrepancy_nd(&pts).unwrap();
                    let brute = brute_force(&pts);
                    assert!(
                        (exact - brute).abs() < 1e-12,
                        "p={p} s={dim}: {exact} vs {brute}"
                    );
                    let est = star_discrepancy_nd_estimate(&pts, 500, 3).unwrap();
                    assert!(est <= exact + 1e-12);
                }
            }
        }
    }

    #[test]
    fn one_d_formula_matches_grid_routine() {
        let mut rng = SplitMix64::new(11);
        for n in 1..40 {
            let xs: Vec<f64> = (0..n).map(|_| (rng.below(50) as f64) / 50.0).collect();
            let pts = PointSet::new(1, xs.clone()).unwrap();
            assert!((star_discrepancy_1d(&xs).unwrap() - brute_force(&pts)).abs() < 1e-12);
        }
    }
}
