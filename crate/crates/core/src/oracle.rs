//! Independent checks of the closed forms: Lloyd iteration from random
//! starts, and exhaustive search over discretised partitions.
//!
//! Nothing here uses the model-specific formulas; the only ingredients are
//! the measure's moments and the nearest-point rule.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::measures::{Codebook, Geometry, MixedMeasure, Moments, Point};
use crate::result::{Allocation, Method, QuantizationResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LloydConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once no point moves farther than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LloydConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 20_000,
            tol: 1e-12,
            seed: 0,
        }
    }
}

impl LloydConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return invalid("restarts must be at least 1");
        }
        if !(self.tol > 0.0) {
            return invalid(format!("tol must be positive, got {}", self.tol));
        }
        Ok(())
    }
}

/// One Lloyd trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydRun {
    pub points: Vec<Point>,
    pub distortion: f64,
    /// Distortion of the codebook at every iteration.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Points moved to a fresh sample after their cell lost all mass.
    pub reseeds: usize,
}

/// Iterates the Lloyd map from `init` until the largest move is below `tol`.
///
/// A point whose cell has no mass is moved to a new sample from the measure;
/// more than `4n` such moves in one run is reported as [`Error::DegenerateCell`].
/// Between reseeds the distortion must not increase, which is checked.
pub fn lloyd_run(
    measure: &MixedMeasure,
    init: Vec<Point>,
    max_iters: usize,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<LloydRun> {
    let n = init.len();
    let mut points = init;
    let mut history = Vec::new();
    let mut reseeds = 0;
    let mut reseeded_last = false;
    for it in 0..max_iters {
        let regions = measure.voronoi_regions(&points);
        let cells: Vec<Moments> = regions.iter().map(|r| measure.region_moments(r)).collect();
        let d: f64 = cells.iter().zip(&points).map(|(m, &p)| m.about(p)).sum();
        if let Some(&prev) = history.last() {
            if !reseeded_last && d > prev + 1e-12 * prev + 1e-15 {
                return Err(Error::Assertion(format!(
                    "Lloyd distortion increased from {prev} to {d} at iteration {it}"
                )));
            }
        }
        history.push(d);
        reseeded_last = false;
        let mut moved = 0.0_f64;
        for (i, cell) in cells.iter().enumerate() {
            let next = match cell.centroid() {
                Some(c) => c,
                None => {
                    reseeds += 1;
                    reseeded_last = true;
                    if reseeds > 4 * n {
                        return Err(Error::DegenerateCell { restarts: 1 });
                    }
                    measure.sample(rng)
                }
            };
            moved = moved.max(next.dist(points[i]));
            points[i] = next;
        }
        if moved < tol && !reseeded_last {
            let distortion = measure.distortion_of(&points);
            history.push(distortion);
            return Ok(LloydRun {
                points,
                distortion,
                history,
                iterations: it + 1,
                converged: true,
                reseeds,
            });
        }
    }
    let distortion = measure.distortion_of(&points);
    history.push(distortion);
    Ok(LloydRun {
        points,
        distortion,
        history,
        iterations: max_iters,
        converged: false,
        reseeds,
    })
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// All restarts, in restart order.
pub fn lloyd_runs(measure: &MixedMeasure, n: usize, config: &LloydConfig) -> Result<Vec<Result<LloydRun>>> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    config.validate()?;
    Ok((0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(config.seed, r);
            let init: Vec<Point> = (0..n).map(|_| measure.sample(&mut rng)).collect();
            lloyd_run(measure, init, config.max_iters, config.tol, &mut rng)
        })
        .collect())
}

fn to_result(measure: &MixedMeasure, points: Vec<Point>, error: f64, method: Method) -> Result<QuantizationResult> {
    let codebook = Codebook::with_dim(measure.ambient_dim(), points)
        .map_err(|e| Error::Assertion(format!("oracle produced an invalid codebook: {e}")))?;
    let allocation = (measure.ambient_dim() == 1).then(|| Allocation::Split {
        k: codebook.xs().iter().filter(|&&x| x <= 0.5).count(),
    });
    Ok(QuantizationResult {
        codebook,
        error,
        error_exact: None,
        allocation,
        method,
    })
}

/// Best-of-restarts Lloyd quantizer. Restarts run in parallel; the winner is
/// the lowest distortion, ties going to the earliest restart.
pub fn lloyd(measure: &MixedMeasure, n: usize, config: &LloydConfig) -> Result<QuantizationResult> {
    let runs = lloyd_runs(measure, n, config)?;
    let mut best: Option<LloydRun> = None;
    let mut first_error = None;
    for run in runs {
        match run {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.distortion < b.distortion) {
                    best = Some(r);
                }
            }
            Err(Error::DegenerateCell { .. }) => {}
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    let best = best.ok_or(Error::DegenerateCell {
        restarts: config.restarts,
    })?;
    to_result(measure, best.points, best.distortion, Method::Lloyd)
}

/// Exhaustive search over partitions for `n ≤ 3`.
///
/// One dimension: every component is cut into `grid` equal-mass atoms and the
/// best split of the sorted atoms into `n` contiguous groups is found by
/// dynamic programming. Two dimensions (the circle-with-diameter measure
/// only): every partition invariant under the reflection x ↦ −x with
/// connected pieces is one of a mirror pair plus an invariant middle cell, or
/// horizontal bands; both families are searched on a parameter grid refined
/// down to a spacing of `1/grid`.
///
/// The codebook is the set of group centroids and the reported error is its
/// exact distortion.
pub fn brute_force(measure: &MixedMeasure, n: usize, grid: usize) -> Result<QuantizationResult> {
    if n == 0 || n > 3 {
        return invalid(format!("brute force supports 1 <= n <= 3, got {n}"));
    }
    if grid < 512 {
        return invalid(format!("grid must be at least 512, got {grid}"));
    }
    let points = if measure.ambient_dim() == 1 {
        partition_1d(measure, n, grid)
    } else {
        partition_circle_diameter(measure, n, grid)?
    };
    let error = measure.distortion_of(&points);
    to_result(measure, points, error, Method::BruteForce)
}

fn partition_1d(measure: &MixedMeasure, n: usize, grid: usize) -> Vec<Point> {
    let mut atoms: Vec<(f64, Moments)> = Vec::new();
    for c in measure.components() {
        let (lo, hi) = c.geometry.param_range();
        let h = (hi - lo) / grid as f64;
        for i in 0..grid {
            let l = lo + h * i as f64;
            let r = if i + 1 == grid { hi } else { l + h };
            atoms.push((l, c.moments(l, r)));
        }
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let moms: Vec<Moments> = atoms.into_iter().map(|(_, m)| m).collect();
    let len = moms.len();
    let mut prefix = vec![Moments::default(); len + 1];
    for i in 0..len {
        prefix[i + 1] = prefix[i] + moms[i];
    }
    let group = |i: usize, j: usize| Moments {
        mass: prefix[j].mass - prefix[i].mass,
        first: prefix[j].first - prefix[i].first,
        second: prefix[j].second - prefix[i].second,
    };
    let cost = |i: usize, j: usize| group(i, j).spread();
    // best[g][j]: cost of splitting atoms[..j] into g groups
    let mut best = vec![vec![f64::INFINITY; len + 1]; n + 1];
    let mut arg = vec![vec![0usize; len + 1]; n + 1];
    best[0][0] = 0.0;
    for g in 1..=n {
        for j in g..=len {
            if g == n && j != len {
                continue;
            }
            let mut bv = f64::INFINITY;
            let mut bi = g - 1;
            for (i, &prev) in best[g - 1].iter().enumerate().take(j).skip(g - 1) {
                let v = prev + cost(i, j);
                if v < bv {
                    bv = v;
                    bi = i;
                }
            }
            best[g][j] = bv;
            arg[g][j] = bi;
        }
    }
    let mut cuts = vec![len];
    let mut j = len;
    for g in (1..=n).rev() {
        j = arg[g][j];
        cuts.push(j);
    }
    cuts.reverse();
    cuts.windows(2)
        .filter_map(|w| group(w[0], w[1]).centroid())
        .collect()
}

fn is_circle_diameter(measure: &MixedMeasure) -> bool {
    let c = measure.components();
    c.len() == 2
        && matches!(c[0].geometry, Geometry::Segment(s)
            if s.p0 == Point::new(-1.0, 0.0) && s.p1 == Point::new(1.0, 0.0))
        && matches!(c[1].geometry, Geometry::Arc(a) if a.theta_lo == 0.0 && a.theta_hi == TAU)
        && (c[0].weight - 0.5).abs() < 1e-12
}

/// Moments of the diameter for x in [lo, hi] plus the circle for θ in the
/// given ranges.
fn cell(measure: &MixedMeasure, x: (f64, f64), arcs: &[(f64, f64)]) -> Moments {
    let [diam, circ] = [measure.components()[0], measure.components()[1]];
    let mut m = diam.moments((x.0 + 1.0) / 2.0, (x.1 + 1.0) / 2.0);
    for &(lo, hi) in arcs {
        m += circ.moments(lo, hi);
    }
    m
}

fn mirror(m: Moments) -> Moments {
    Moments {
        first: Point::new(-m.first.x, m.first.y),
        ..m
    }
}

fn minus(a: Moments, b: Moments) -> Moments {
    Moments {
        mass: (a.mass - b.mass).max(0.0),
        first: a.first - b.first,
        second: a.second - b.second,
    }
}

/// Grid search over a box with successive zooming around the best node.
fn zoom_search<F: Fn(&[f64]) -> f64>(f: F, lo: &[f64], hi: &[f64], coarse: usize, grid: usize) -> Vec<f64> {
    let dim = lo.len();
    let mut center: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let mut half: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| 0.5 * (h - l)).collect();
    let mut steps = coarse;
    let target: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| (h - l) / grid as f64).collect();
    loop {
        let mut best = f64::INFINITY;
        let mut best_x = center.clone();
        let total = (steps + 1).pow(dim as u32);
        let mut x = vec![0.0; dim];
        for idx in 0..total {
            let mut rem = idx;
            for d in 0..dim {
                let i = rem % (steps + 1);
                rem /= steps + 1;
                let v = center[d] - half[d] + 2.0 * half[d] * i as f64 / steps as f64;
                x[d] = v.clamp(lo[d], hi[d]);
            }
            let v = f(&x);
            if v < best {
                best = v;
                best_x.copy_from_slice(&x);
            }
        }
        let spacing: Vec<f64> = half.iter().map(|h| 2.0 * h / steps as f64).collect();
        if spacing.iter().zip(&target).all(|(s, t)| s <= t) {
            return best_x;
        }
        center = best_x;
        half = spacing.iter().map(|s| 2.0 * s).collect();
        steps = 16;
    }
}

fn partition_circle_diameter(measure: &MixedMeasure, n: usize, grid: usize) -> Result<Vec<Point>> {
    if !is_circle_diameter(measure) {
        return invalid("2-D brute force supports only the circle-with-diameter measure");
    }
    let total = measure.total_moments();
    if n == 1 {
        return Ok(vec![total.centroid().unwrap()]);
    }
    let mut candidates: Vec<(f64, Vec<Moments>)> = Vec::new();

    // mirror pair (+ middle cell for n = 3): left cell is x ≤ −a on the
    // diameter and π − b ≤ θ ≤ π + c on the circle
    let pair = |v: &[f64]| -> Vec<Moments> {
        let (a, b, c) = (v[0], v[1], v[2]);
        let left = cell(measure, (-1.0, -a), &[(PI - b, PI + c)]);
        let right = mirror(left);
        let mid = minus(minus(total, left), right);
        vec![left, right, mid]
    };
    let pair_cost = |v: &[f64]| pair(v).iter().map(Moments::spread).sum::<f64>();
    if n == 2 {
        let v = [0.0, FRAC_PI_2, FRAC_PI_2];
        candidates.push((pair_cost(&v), pair(&v)[..2].to_vec()));
    } else {
        let v = zoom_search(pair_cost, &[0.0; 3], &[1.0, FRAC_PI_2, FRAC_PI_2], 64, grid);
        candidates.push((pair_cost(&v), pair(&v)));
    }

    // horizontal bands cut at heights sin φ
    let bands = |phis: &[f64]| -> Vec<Moments> {
        let mut cuts: Vec<f64> = phis.to_vec();
        cuts.sort_by(f64::total_cmp);
        let mut cells = Vec::new();
        let mut upper = FRAC_PI_2;
        let mut taken = Moments::default();
        for &phi in cuts.iter().rev() {
            // y in (sin φ, sin upper]
            let mut m = Moments::default();
            m += measure.components()[1].moments(phi, upper);
            m += measure.components()[1].moments(PI - upper, PI - phi);
            if phi < 0.0 && upper >= 0.0 {
                m += cell(measure, (-1.0, 1.0), &[]);
            }
            taken += m;
            cells.push(m);
            upper = phi;
        }
        cells.push(minus(total, taken));
        cells
    };
    let band_cost = |v: &[f64]| bands(v).iter().map(Moments::spread).sum::<f64>();
    let phi_lo = vec![-FRAC_PI_2; n - 1];
    let phi_hi = vec![FRAC_PI_2; n - 1];
    let coarse = if n == 2 { grid } else { 256 };
    let v = zoom_search(band_cost, &phi_lo, &phi_hi, coarse, grid);
    candidates.push((band_cost(&v), bands(&v)));

    let (_, cells) = candidates
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap();
    Ok(cells.iter().filter_map(Moments::centroid).collect())
}
