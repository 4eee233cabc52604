//! Optimal quantizers for ½·uniform(unit circle) + ½·uniform(horizontal diameter).
//!
//! For `n ≥ 5` an optimal codebook has `k` points inside the diameter on
//! `[−a, a]`, `n1` points on the upper arc `b < θ < π − b`, `n2` points on the
//! lower arc `π + c < θ < 2π − c`, and a mirror pair `(±r, s)` whose cells
//! straddle both curves. The free boundaries `(a, b, c)` are fixed by asking
//! each boundary point to be equidistant from its two neighbouring points.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::closed_form::{arc_points, weighted_arc_distortion};
use crate::error::{invalid, Error, Result};
use crate::measures::{Codebook, MixedMeasure, Point};
use crate::result::{Allocation, Method, QuantizationResult};
use crate::roots::{newton_box, NewtonOptions};

/// Line density of the diameter.
pub const DIAMETER_DENSITY: f64 = 0.25;
/// Line density of the circle.
pub const ARC_DENSITY: f64 = 1.0 / (4.0 * PI);
/// 3(4 + π²)/8, the limit of n²·V_n.
pub const COEFFICIENT_LIMIT: f64 = 3.0 * (4.0 + PI * PI) / 8.0;

/// Point counts: `n1` on the upper arc, `n2` on the lower arc, `k` inside the
/// diameter. Two more points form the junction pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AllocationTriple {
    pub n1: usize,
    pub n2: usize,
    pub k: usize,
}

impl AllocationTriple {
    pub const fn new(n1: usize, n2: usize, k: usize) -> Self {
        Self { n1, n2, k }
    }

    pub fn total(&self) -> usize {
        self.n1 + self.n2 + self.k + 2
    }

    pub fn mirrored(&self) -> Self {
        Self::new(self.n2, self.n1, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl BoundaryParams {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }
}

/// The junction pair `(±r, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionPoints {
    pub r: f64,
    pub s: f64,
}

impl JunctionPoints {
    pub fn from_params(p: &BoundaryParams) -> Self {
        let BoundaryParams { a, b, c } = *p;
        let den = -PI * a + b + c + PI;
        Self {
            r: (-PI * a * a + 2.0 * b.sin() + 2.0 * c.sin() + PI) / (2.0 * den),
            s: (c.cos() - b.cos()) / den,
        }
    }

    pub fn points(&self) -> [Point; 2] {
        [Point::new(-self.r, self.s), Point::new(self.r, self.s)]
    }
}

/// Allocation for `n ≥ 5`: k = ⌊(n−2)/3⌋ and the remaining arc points split
/// with the extra one above the axis.
pub fn allocation(n: usize) -> Result<AllocationTriple> {
    if n < 5 {
        return invalid(format!("allocation is defined for n >= 5, got {n}"));
    }
    let k = (n - 2) / 3;
    let m = n - k - 2;
    Ok(AllocationTriple::new(m.div_ceil(2), m / 2, k))
}

/// Degenerate allocations used for n = 2, 3, 4.
pub fn small_allocation(n: usize) -> Option<AllocationTriple> {
    match n {
        2 => Some(AllocationTriple::new(0, 0, 0)),
        3 => Some(AllocationTriple::new(1, 0, 0)),
        4 => Some(AllocationTriple::new(1, 1, 0)),
        _ => None,
    }
}

/// Junction-cell distortion D(a, b, c) for both junction cells together.
pub fn junction_distortion(a: f64, b: f64, c: f64) -> f64 {
    let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
    let pi2 = PI * PI;
    let num = pi2 * a4 - 4.0 * PI * a3 * b - 4.0 * PI * a3 * c - 4.0 * pi2 * a3
        + 12.0 * PI * (a2 - 1.0) * b.sin()
        + 12.0 * PI * a2 * c.sin()
        + 6.0 * pi2 * a2
        - 12.0 * PI * a * b
        - 12.0 * PI * a * c
        - 4.0 * pi2 * a
        + 12.0 * b * b
        + 24.0 * b * c
        + 24.0 * (b + c).cos()
        + 16.0 * PI * b
        + 12.0 * c * c
        + 16.0 * PI * c
        - 12.0 * PI * c.sin()
        + pi2
        - 24.0;
    num / (24.0 * PI * (-PI * a + b + c + PI))
}

/// The same quantity from the cell's mass, first and second moments.
pub fn junction_distortion_moments(a: f64, b: f64, c: f64) -> f64 {
    let mass = (1.0 - a) * DIAMETER_DENSITY + (b + c) * ARC_DENSITY;
    let sx = -(1.0 - a * a) / 2.0 * DIAMETER_DENSITY - (b.sin() + c.sin()) * ARC_DENSITY;
    let sy = (c.cos() - b.cos()) * ARC_DENSITY;
    let q = (1.0 - a.powi(3)) / 3.0 * DIAMETER_DENSITY + (b + c) * ARC_DENSITY;
    2.0 * (q - (sx * sx + sy * sy) / mass)
}

fn interval_term(alloc: &AllocationTriple, a: f64) -> f64 {
    if alloc.k == 0 {
        0.0
    } else {
        a.powi(3) / (6 * alloc.k * alloc.k) as f64
    }
}

fn arc_term(n: usize, lo: f64, hi: f64) -> f64 {
    if n == 0 || hi <= lo {
        return 0.0;
    }
    weighted_arc_distortion(lo, hi, n, ARC_DENSITY).unwrap_or(f64::NAN)
}

fn v_unchecked(alloc: &AllocationTriple, p: &BoundaryParams) -> f64 {
    interval_term(alloc, p.a)
        + arc_term(alloc.n1, p.b, PI - p.b)
        + arc_term(alloc.n2, PI + p.c, 2.0 * PI - p.c)
        + junction_distortion(p.a, p.b, p.c)
}

fn check_params(alloc: &AllocationTriple, p: &BoundaryParams) -> Result<()> {
    let ok_a = if alloc.k == 0 { p.a == 0.0 } else { p.a > 0.0 && p.a < 1.0 };
    let ok_arc = |n: usize, x: f64| {
        if n == 0 {
            x == FRAC_PI_2
        } else {
            x > 0.0 && x < FRAC_PI_2
        }
    };
    if !(ok_a && ok_arc(alloc.n1, p.b) && ok_arc(alloc.n2, p.c)) {
        return invalid(format!(
            "boundary parameters {p:?} out of range for allocation {alloc:?}"
        ));
    }
    Ok(())
}

/// Distortion of the configuration with allocation `alloc` and boundaries
/// `params`: interval term + both arc terms + junction term.
pub fn distortion_v(alloc: &AllocationTriple, params: &BoundaryParams) -> Result<f64> {
    check_params(alloc, params)?;
    Ok(v_unchecked(alloc, params))
}

/// Codebook determined by an allocation and its boundaries.
pub fn assemble(alloc: &AllocationTriple, p: &BoundaryParams) -> Vec<Point> {
    let j = JunctionPoints::from_params(p).points();
    let mut pts = Vec::with_capacity(alloc.total());
    pts.push(j[0]);
    let k = alloc.k;
    pts.extend((1..=k).map(|i| Point::on_line(-p.a + (2 * i - 1) as f64 * p.a / k as f64)));
    pts.push(j[1]);
    if alloc.n1 > 0 {
        pts.extend(arc_points(p.b, PI - p.b, alloc.n1));
    }
    if alloc.n2 > 0 {
        pts.extend(arc_points(PI + p.c, 2.0 * PI - p.c, alloc.n2));
    }
    pts
}

/// Boundary residuals: at each free boundary point, squared distance to the
/// junction point minus squared distance to the neighbour on the other side.
/// Only the equations of unpinned parameters are returned.
pub fn boundary_residuals(alloc: &AllocationTriple, p: &BoundaryParams) -> Vec<f64> {
    let jl = JunctionPoints::from_params(p).points()[0];
    let mut out = Vec::with_capacity(3);
    if alloc.k > 0 {
        let d = Point::on_line(-p.a);
        let q = Point::on_line(-p.a + p.a / alloc.k as f64);
        out.push(d.dist_sq(jl) - d.dist_sq(q));
    }
    if alloc.n1 > 0 {
        let d = Point::polar(1.0, PI - p.b);
        let q = *arc_points(p.b, PI - p.b, alloc.n1).last().unwrap();
        out.push(d.dist_sq(jl) - d.dist_sq(q));
    }
    if alloc.n2 > 0 {
        let d = Point::polar(1.0, PI + p.c);
        let q = arc_points(PI + p.c, 2.0 * PI - p.c, alloc.n2)[0];
        out.push(d.dist_sq(jl) - d.dist_sq(q));
    }
    out
}

/// Which parameters are free and how they map from the unknown vector.
struct Layout {
    alloc: AllocationTriple,
    free_a: bool,
    free_b: bool,
    free_c: bool,
    tied: bool,
}

impl Layout {
    fn new(alloc: AllocationTriple) -> Self {
        let tied = alloc.n1 == alloc.n2 && alloc.n1 > 0;
        Self {
            alloc,
            free_a: alloc.k > 0,
            free_b: alloc.n1 > 0,
            free_c: alloc.n2 > 0 && !tied,
            tied,
        }
    }

    fn dim(&self) -> usize {
        self.free_a as usize + self.free_b as usize + self.free_c as usize
    }

    fn params(&self, x: &[f64]) -> BoundaryParams {
        let mut it = x.iter().copied();
        let a = if self.free_a { it.next().unwrap() } else { 0.0 };
        let b = if self.free_b { it.next().unwrap() } else { FRAC_PI_2 };
        let c = if self.tied {
            b
        } else if self.free_c {
            it.next().unwrap()
        } else {
            FRAC_PI_2
        };
        BoundaryParams { a, b, c }
    }

    fn pack(&self, p: &BoundaryParams) -> Vec<f64> {
        let mut v = Vec::with_capacity(3);
        if self.free_a {
            v.push(p.a);
        }
        if self.free_b {
            v.push(p.b);
        }
        if self.free_c {
            v.push(p.c);
        }
        v
    }

    fn residuals(&self, x: &[f64]) -> Vec<f64> {
        let p = self.params(x);
        let mut r = boundary_residuals(&self.alloc, &p);
        if self.tied {
            r.pop();
        }
        r
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut lo = vec![0.0; d];
        let mut hi = vec![FRAC_PI_2; d];
        if self.free_a {
            lo[0] = 0.0;
            hi[0] = 1.0;
        }
        (lo, hi)
    }

    fn seeds(&self) -> Vec<BoundaryParams> {
        let AllocationTriple { n1, n2, k } = self.alloc;
        let scaled = BoundaryParams::new(
            1.0 - 1.2 / (k as f64 + 1.0),
            0.9 * PI / (2 * n1 + 1) as f64,
            0.9 * PI / (2 * n2 + 1) as f64,
        );
        let plain = BoundaryParams::new(k as f64 / (k as f64 + 2.0), 0.8, 0.8);
        let mut seeds = vec![scaled, plain];
        let grid = [0.2, 0.4, 0.6, 0.8];
        for &a in &grid {
            for &b in &grid {
                for &c in &grid {
                    seeds.push(BoundaryParams::new(a, b, c));
                }
            }
        }
        seeds
    }
}

/// Solves the boundary equations for `(a, b, c)`. Parameters of empty
/// groups are pinned (`k = 0 → a = 0`, `n1 = 0 → b = π/2`, `n2 = 0 → c = π/2`)
/// and `b = c` is imposed when `n1 = n2`.
pub fn solve_boundaries(alloc: &AllocationTriple) -> Result<BoundaryParams> {
    let layout = Layout::new(*alloc);
    if layout.dim() == 0 {
        return Ok(layout.params(&[]));
    }
    let (lo, hi) = layout.bounds();
    let opts = NewtonOptions::default();
    let mut best = f64::INFINITY;
    for seed in layout.seeds() {
        let x0 = layout.pack(&seed);
        match newton_box(|x| layout.residuals(x), &x0, &lo, &hi, opts) {
            Ok(out) => {
                let p = layout.params(&out.x);
                if check_params(alloc, &p).is_ok() {
                    return Ok(p);
                }
            }
            Err(Error::NonConvergence { residual, .. }) => best = best.min(residual),
            Err(e) => return Err(e),
        }
    }
    Err(Error::NonConvergence {
        what: format!("boundary equations for {alloc:?}"),
        residual: best,
    })
}

/// Allocation, boundaries and V for the optimal `n`-point configuration,
/// `n ≥ 2`, without assembling the codebook.
pub fn optimal_configuration(n: usize) -> Result<(AllocationTriple, BoundaryParams, f64)> {
    let alloc = match small_allocation(n) {
        Some(a) => a,
        None => allocation(n)?,
    };
    let params = solve_boundaries(&alloc)?;
    let v = distortion_v(&alloc, &params)?;
    Ok((alloc, params, v))
}

/// Optimal set of n-means and its quantization error.
///
/// The reported error is the closed-form V; it is checked against the exact
/// Voronoi distortion of the assembled codebook.
pub fn optimal_set(n: usize) -> Result<QuantizationResult> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let measure = MixedMeasure::circle_diameter();
    if n == 1 {
        return Ok(QuantizationResult {
            codebook: Codebook::planar(vec![Point::ORIGIN])?,
            error: measure.variance(),
            error_exact: None,
            allocation: None,
            method: Method::ClosedForm,
        });
    }
    let (alloc, params, v) = optimal_configuration(n)?;
    let points = assemble(&alloc, &params);
    let check = measure.distortion_of(&points);
    if (check - v).abs() > 1e-8 {
        return Err(Error::Assertion(format!(
            "closed-form V={v} disagrees with Voronoi distortion {check} at n={n}"
        )));
    }
    Ok(QuantizationResult {
        codebook: Codebook::planar(points)?,
        error: v,
        error_exact: None,
        allocation: Some(Allocation::Circle(alloc)),
        method: Method::ClosedForm,
    })
}

/// Allocations one transfer away from `allocation(n)`: a point moved between
/// the diameter and an arc, or between the two arcs. Mirror images of the
/// base allocation are left out since they tie exactly.
pub fn neighbor_allocations(n: usize) -> Result<Vec<AllocationTriple>> {
    let base = allocation(n)?;
    let (n1, n2, k) = (base.n1 as i64, base.n2 as i64, base.k as i64);
    let cands = [
        (n1 + 1, n2, k - 1),
        (n1, n2 + 1, k - 1),
        (n1 - 1, n2, k + 1),
        (n1, n2 - 1, k + 1),
        (n1 + 1, n2 - 1, k),
        (n1 - 1, n2 + 1, k),
    ];
    let mut out: Vec<AllocationTriple> = Vec::new();
    for (a, b, c) in cands {
        if a < 0 || b < 0 || c < 0 {
            continue;
        }
        let t = AllocationTriple::new(a as usize, b as usize, c as usize);
        if t == base.mirrored() || out.contains(&t) || out.contains(&t.mirrored()) {
            continue;
        }
        out.push(t);
    }
    Ok(out)
}

/// Neighbouring allocations with their V, `Err` where the boundary
/// equations have no admissible root.
pub type Neighbourhood = Vec<(AllocationTriple, Result<f64>)>;

/// V at `allocation(n)` alongside V at each neighbouring allocation.
pub fn allocation_neighborhood(n: usize) -> Result<(f64, Neighbourhood)> {
    let base = allocation(n)?;
    let p = solve_boundaries(&base)?;
    let v = distortion_v(&base, &p)?;
    let others = neighbor_allocations(n)?
        .into_iter()
        .map(|t| {
            let r = solve_boundaries(&t).and_then(|q| distortion_v(&t, &q));
            (t, r)
        })
        .collect();
    Ok((v, others))
}

/// `(n, n²·V_n)` for n = 3k + 2, k = 1..=k_max.
pub fn coefficient_estimate(k_max: usize) -> Result<Vec<(usize, f64)>> {
    if k_max == 0 {
        return invalid("k_max must be at least 1");
    }
    (1..=k_max)
        .map(|k| {
            let n = 3 * k + 2;
            let (_, _, v) = optimal_configuration(n)?;
            Ok((n, (n * n) as f64 * v))
        })
        .collect()
}

/// `(n, 2 log n / (−log V_n))` for n = 3k + 2, k = 1..=k_max.
pub fn dimension_estimate(k_max: usize) -> Result<Vec<(usize, f64)>> {
    Ok(coefficient_estimate(k_max)?
        .into_iter()
        .map(|(n, c)| {
            let v = c / (n * n) as f64;
            (n, 2.0 * (n as f64).ln() / -v.ln())
        })
        .collect())
}
