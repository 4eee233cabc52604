//! Mixed uniform measures on intervals, planar segments and unit-circle arcs.
//!
//! Every component is parametrised by a scalar: `x` for an [`Interval`],
//! `t ∈ [0, 1]` for a [`PlanarSegment`] and `θ` for an [`Arc`]. Regions are
//! unions of parameter sub-ranges, and all moments are evaluated in closed form.

use std::f64::consts::TAU;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::quadrature;

const WEIGHT_TOL: f64 = 1e-12;
const ZERO_MASS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn on_line(x: f64) -> Self {
        Self { x, y: 0.0 }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist_sq(self, o: Point) -> f64 {
        (self - o).norm_sq()
    }

    pub fn dist(self, o: Point) -> f64 {
        self.dist_sq(o).sqrt()
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return invalid(format!("interval needs lo < hi, got [{lo}, {hi}]"));
        }
        Ok(Self { lo, hi })
    }
}

/// Arc of the unit circle centred at the origin, `theta_lo ≤ θ ≤ theta_hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub theta_lo: f64,
    pub theta_hi: f64,
}

impl Arc {
    pub fn new(theta_lo: f64, theta_hi: f64) -> Result<Self> {
        if !(0.0 <= theta_lo && theta_lo < theta_hi && theta_hi <= TAU) {
            return invalid(format!(
                "arc needs 0 <= lo < hi <= 2pi, got [{theta_lo}, {theta_hi}]"
            ));
        }
        Ok(Self { theta_lo, theta_hi })
    }

    pub fn full_circle() -> Self {
        Self {
            theta_lo: 0.0,
            theta_hi: TAU,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarSegment {
    pub p0: Point,
    pub p1: Point,
}

impl PlanarSegment {
    pub fn new(p0: Point, p1: Point) -> Result<Self> {
        if p0 == p1 {
            return invalid("segment endpoints coincide");
        }
        Ok(Self { p0, p1 })
    }

    fn dir(&self) -> Point {
        self.p1 - self.p0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    Interval(Interval),
    Arc(Arc),
    Segment(PlanarSegment),
}

impl Geometry {
    pub fn length(&self) -> f64 {
        match self {
            Geometry::Interval(i) => i.hi - i.lo,
            Geometry::Arc(a) => a.theta_hi - a.theta_lo,
            Geometry::Segment(s) => s.dir().norm_sq().sqrt(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Geometry::Interval(_) => 1,
            _ => 2,
        }
    }

    /// Parameter range covering the whole geometry.
    pub fn param_range(&self) -> (f64, f64) {
        match self {
            Geometry::Interval(i) => (i.lo, i.hi),
            Geometry::Arc(a) => (a.theta_lo, a.theta_hi),
            Geometry::Segment(_) => (0.0, 1.0),
        }
    }

    pub fn at(&self, t: f64) -> Point {
        match self {
            Geometry::Interval(_) => Point::on_line(t),
            Geometry::Arc(_) => Point::polar(1.0, t),
            Geometry::Segment(s) => s.p0 + s.dir() * t,
        }
    }

    /// Parameters where the curve crosses the perpendicular bisector of some
    /// pair of `points`; the nearest-point distance is smooth between them.
    pub fn bisector_crossings(&self, points: &[Point]) -> Vec<f64> {
        let mut out = Vec::new();
        for (i, &p) in points.iter().enumerate() {
            for &q in &points[i + 1..] {
                // x on the bisector iff 2 x·e = c
                let e = q - p;
                let c = q.norm_sq() - p.norm_sq();
                match self {
                    Geometry::Arc(a) => {
                        let r = e.norm_sq().sqrt();
                        if r == 0.0 || (c / (2.0 * r)).abs() > 1.0 {
                            continue;
                        }
                        let phi = e.y.atan2(e.x);
                        let delta = (c / (2.0 * r)).acos();
                        for t in [phi - delta, phi + delta] {
                            let shift = ((a.theta_lo - t) / TAU).ceil();
                            out.push(t + shift * TAU);
                        }
                    }
                    _ => {
                        let (p0, d) = match self {
                            Geometry::Segment(s) => (s.p0, s.dir()),
                            _ => (Point::ORIGIN, Point::new(1.0, 0.0)),
                        };
                        let slope = 2.0 * d.dot(e);
                        if slope != 0.0 {
                            out.push((c - 2.0 * p0.dot(e)) / slope);
                        }
                    }
                }
            }
        }
        out
    }

    /// Arc length per unit parameter.
    pub fn speed(&self) -> f64 {
        match self {
            Geometry::Segment(s) => s.dir().norm_sq().sqrt(),
            _ => 1.0,
        }
    }
}

/// Zeroth, first and (scalar) second moments of a piece of mass.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub mass: f64,
    pub first: Point,
    pub second: f64,
}

impl Moments {
    pub fn centroid(&self) -> Option<Point> {
        (self.mass > ZERO_MASS).then(|| self.first * (1.0 / self.mass))
    }

    /// ∫ |x − p|² over the piece.
    pub fn about(&self, p: Point) -> f64 {
        self.second - 2.0 * self.first.dot(p) + self.mass * p.norm_sq()
    }

    /// ∫ |x − centroid|², zero for empty pieces.
    pub fn spread(&self) -> f64 {
        if self.mass <= 0.0 {
            0.0
        } else {
            (self.second - self.first.norm_sq() / self.mass).max(0.0)
        }
    }
}

impl Add for Moments {
    type Output = Moments;
    fn add(self, o: Moments) -> Moments {
        Moments {
            mass: self.mass + o.mass,
            first: self.first + o.first,
            second: self.second + o.second,
        }
    }
}

impl AddAssign for Moments {
    fn add_assign(&mut self, o: Moments) {
        *self = *self + o;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub geometry: Geometry,
    pub weight: f64,
    pub density: f64,
}

impl Component {
    pub fn new(geometry: Geometry, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight <= 1.0 + WEIGHT_TOL) {
            return invalid(format!("component weight {weight} outside (0, 1]"));
        }
        Ok(Self {
            geometry,
            weight,
            density: weight / geometry.length(),
        })
    }

    /// Moments over the parameter sub-range `[lo, hi]`.
    pub fn moments(&self, lo: f64, hi: f64) -> Moments {
        if hi <= lo {
            return Moments::default();
        }
        let rho = self.density;
        let d = hi - lo;
        match &self.geometry {
            Geometry::Interval(_) => Moments {
                mass: rho * d,
                first: Point::on_line(rho * (hi * hi - lo * lo) / 2.0),
                second: rho * (hi.powi(3) - lo.powi(3)) / 3.0,
            },
            Geometry::Arc(_) => Moments {
                mass: rho * d,
                first: Point::new(hi.sin() - lo.sin(), lo.cos() - hi.cos()) * rho,
                second: rho * d,
            },
            Geometry::Segment(s) => {
                let v = s.dir();
                let w = rho * v.norm_sq().sqrt();
                Moments {
                    mass: w * d,
                    first: (s.p0 * d + v * ((hi * hi - lo * lo) / 2.0)) * w,
                    second: w
                        * (d * s.p0.norm_sq()
                            + (hi * hi - lo * lo) * s.p0.dot(v)
                            + (hi.powi(3) - lo.powi(3)) / 3.0 * v.norm_sq()),
                }
            }
        }
    }

    /// ∫ |x − p|² dP over the parameter sub-range `[lo, hi]`, arranged to
    /// avoid cancellation for short pieces.
    pub fn cost(&self, lo: f64, hi: f64, p: Point) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let rho = self.density;
        match &self.geometry {
            Geometry::Interval(_) => {
                let (a, b) = (hi - p.x, lo - p.x);
                rho * ((a * a * a - b * b * b) / 3.0 + p.y * p.y * (hi - lo))
            }
            Geometry::Segment(s) => {
                let v = s.dir();
                let vv = v.norm_sq();
                let q = s.p0 - p;
                let t0 = -q.dot(v) / vv;
                let perp = (q + v * t0).norm_sq();
                let (a, b) = (hi - t0, lo - t0);
                rho * vv.sqrt() * (perp * (hi - lo) + vv * (a * a * a - b * b * b) / 3.0)
            }
            Geometry::Arc(_) => self.moments(lo, hi).about(p).max(0.0),
        }
    }
}

/// A contiguous parameter range `[lo, hi]` on component `component`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub component: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Region {
    pub pieces: Vec<Piece>,
}

impl Region {
    pub fn new(pieces: Vec<Piece>) -> Self {
        Self { pieces }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.iter().all(|p| p.hi <= p.lo)
    }
}

/// Ordered quantizer points. In one dimension the points are kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    points: Vec<Point>,
    dim: usize,
}

impl Codebook {
    /// 1-D codebook; the values are sorted and must be pairwise distinct.
    pub fn line(mut xs: Vec<f64>) -> Result<Self> {
        if xs.is_empty() {
            return invalid("codebook must be non-empty");
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return invalid("codebook contains a non-finite value");
        }
        xs.sort_by(f64::total_cmp);
        if xs.windows(2).any(|w| w[0] == w[1]) {
            return invalid("codebook points must be distinct");
        }
        Ok(Self {
            points: xs.into_iter().map(Point::on_line).collect(),
            dim: 1,
        })
    }

    pub fn planar(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return invalid("codebook must be non-empty");
        }
        if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return invalid("codebook contains a non-finite value");
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return invalid("codebook points must be distinct");
                }
            }
        }
        Ok(Self { points, dim: 2 })
    }

    pub fn with_dim(dim: usize, points: Vec<Point>) -> Result<Self> {
        match dim {
            1 => Self::line(points.into_iter().map(|p| p.x).collect()),
            2 => Self::planar(points),
            _ => invalid(format!("unsupported dimension {dim}")),
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedMeasure {
    components: Vec<Component>,
    ambient_dim: usize,
}

impl MixedMeasure {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let Some(first) = components.first() else {
            return invalid("measure needs at least one component");
        };
        let ambient_dim = first.geometry.ambient_dim();
        if components
            .iter()
            .any(|c| c.geometry.ambient_dim() != ambient_dim)
        {
            return invalid("components live in different dimensions");
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return invalid(format!("component weights sum to {total}, not 1"));
        }
        Ok(Self {
            components,
            ambient_dim,
        })
    }

    /// Builds a measure from `(geometry, weight)` pairs.
    pub fn from_parts(parts: &[(Geometry, f64)]) -> Result<Self> {
        let comps = parts
            .iter()
            .map(|&(g, w)| Component::new(g, w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    pub fn uniform(geometry: Geometry) -> Self {
        Self::from_parts(&[(geometry, 1.0)]).expect("single component is valid")
    }

    /// ½·uniform on the diameter {(t,0): −1 ≤ t ≤ 1} + ½·uniform on the unit circle.
    pub fn circle_diameter() -> Self {
        let diameter = PlanarSegment::new(Point::new(-1.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        Self::from_parts(&[
            (Geometry::Segment(diameter), 0.5),
            (Geometry::Arc(Arc::full_circle()), 0.5),
        ])
        .unwrap()
    }

    /// ¾·U[0, ½] + ¼·U[¾, 1].
    pub fn disconnected() -> Self {
        Self::from_parts(&[
            (Geometry::Interval(Interval::new(0.0, 0.5).unwrap()), 0.75),
            (Geometry::Interval(Interval::new(0.75, 1.0).unwrap()), 0.25),
        ])
        .unwrap()
    }

    /// ¾·U[0, ½] + ¼·U[½, 1].
    pub fn connected() -> Self {
        Self::from_parts(&[
            (Geometry::Interval(Interval::new(0.0, 0.5).unwrap()), 0.75),
            (Geometry::Interval(Interval::new(0.5, 1.0).unwrap()), 0.25),
        ])
        .unwrap()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn total_moments(&self) -> Moments {
        self.components
            .iter()
            .map(|c| {
                let (lo, hi) = c.geometry.param_range();
                c.moments(lo, hi)
            })
            .fold(Moments::default(), Add::add)
    }

    pub fn mean(&self) -> Point {
        let m = self.total_moments();
        m.first * (1.0 / m.mass)
    }

    pub fn variance(&self) -> f64 {
        self.total_moments().spread()
    }

    pub fn region_moments(&self, region: &Region) -> Moments {
        region
            .pieces
            .iter()
            .map(|p| self.components[p.component].moments(p.lo, p.hi))
            .fold(Moments::default(), Add::add)
    }

    pub fn conditional_mean(&self, region: &Region) -> Result<Point> {
        for p in &region.pieces {
            if p.component >= self.components.len() {
                return invalid(format!("region refers to component {}", p.component));
            }
        }
        let m = self.region_moments(region);
        if m.mass < ZERO_MASS {
            return Err(Error::ZeroMass { mass: m.mass });
        }
        Ok(m.first * (1.0 / m.mass))
    }

    /// Voronoi region of every point, traced on each component.
    ///
    /// Ties between coincident points go to the lower index.
    pub fn voronoi_regions(&self, points: &[Point]) -> Vec<Region> {
        if self.ambient_dim == 1 {
            self.regions_1d(points)
        } else {
            self.regions_2d(points)
        }
    }

    fn regions_1d(&self, points: &[Point]) -> Vec<Region> {
        let n = points.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| points[i].x.total_cmp(&points[j].x).then(i.cmp(&j)));
        let mut regions = vec![Region::default(); n];
        for (rank, &i) in order.iter().enumerate() {
            let x = points[i].x;
            let lo = if rank == 0 {
                f64::NEG_INFINITY
            } else {
                let prev = points[order[rank - 1]].x;
                if prev == x {
                    // duplicate of a lower-index point
                    continue;
                }
                0.5 * (prev + x)
            };
            let hi = order[rank + 1..]
                .iter()
                .map(|&j| points[j].x)
                .find(|&nx| nx != x)
                .map_or(f64::INFINITY, |nx| 0.5 * (x + nx));
            for (ci, c) in self.components.iter().enumerate() {
                let (clo, chi) = c.geometry.param_range();
                let (l, h) = (lo.max(clo), hi.min(chi));
                if h > l {
                    regions[i].pieces.push(Piece {
                        component: ci,
                        lo: l,
                        hi: h,
                    });
                }
            }
        }
        regions
    }

    fn regions_2d(&self, points: &[Point]) -> Vec<Region> {
        let n = points.len();
        let mut regions = vec![Region::default(); n];
        for (i, region) in regions.iter_mut().enumerate() {
            let pi = points[i];
            for (ci, c) in self.components.iter().enumerate() {
                let (clo, chi) = c.geometry.param_range();
                let mut allowed = vec![(clo, chi)];
                for (j, &pj) in points.iter().enumerate() {
                    if j == i || allowed.is_empty() {
                        continue;
                    }
                    let d = pj - pi;
                    if d.x == 0.0 && d.y == 0.0 {
                        if j < i {
                            allowed.clear();
                        }
                        continue;
                    }
                    // x is closer to pi than pj  <=>  2 x·d <= e
                    let e = pj.norm_sq() - pi.norm_sq();
                    match &c.geometry {
                        Geometry::Arc(_) => clip_arc(&mut allowed, d, e),
                        Geometry::Segment(s) => {
                            let slope = 2.0 * s.dir().dot(d);
                            let rhs = e - 2.0 * s.p0.dot(d);
                            clip_linear(&mut allowed, slope, rhs);
                        }
                        Geometry::Interval(_) => {
                            clip_linear(&mut allowed, 2.0 * d.x, e);
                        }
                    }
                }
                region.pieces.extend(
                    allowed
                        .into_iter()
                        .filter(|(l, h)| h > l)
                        .map(|(lo, hi)| Piece {
                            component: ci,
                            lo,
                            hi,
                        }),
                );
            }
        }
        regions
    }

    /// ∫ min_i |x − p_i|² dP, evaluated exactly on the traced Voronoi cells.
    pub fn distortion_of(&self, points: &[Point]) -> f64 {
        let regions = self.voronoi_regions(points);
        regions
            .iter()
            .zip(points)
            .map(|(r, &p)| {
                r.pieces
                    .iter()
                    .map(|pc| self.components[pc.component].cost(pc.lo, pc.hi, p))
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn distortion(&self, codebook: &Codebook) -> Result<f64> {
        if codebook.dim() != self.ambient_dim {
            return invalid(format!(
                "codebook dimension {} does not match measure dimension {}",
                codebook.dim(),
                self.ambient_dim
            ));
        }
        Ok(self.distortion_of(codebook.points()))
    }

    /// The same integral by adaptive Gauss–Legendre quadrature of the
    /// nearest-point distance along each component. Independent of the
    /// Voronoi tracing; used as a cross-check.
    pub fn distortion_quadrature(&self, points: &[Point], tol: f64) -> f64 {
        let pieces = 2;
        let per = tol / self.components.len() as f64;
        self.components
            .iter()
            .map(|c| {
                let (lo, hi) = c.geometry.param_range();
                let scale = c.density * c.geometry.speed();
                let f = |t: f64| {
                    let x = c.geometry.at(t);
                    scale
                        * points
                            .iter()
                            .map(|&p| x.dist_sq(p))
                            .fold(f64::INFINITY, f64::min)
                };
                let breaks = c.geometry.bisector_crossings(points);
                quadrature::integrate_with_breaks(&f, lo, hi, &breaks, per, pieces)
            })
            .sum()
    }

    /// One draw from the measure.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = self.components.last().unwrap();
        for c in &self.components {
            acc += c.weight;
            if u < acc {
                chosen = c;
                break;
            }
        }
        let (lo, hi) = chosen.geometry.param_range();
        chosen.geometry.at(rng.gen_range(lo..hi))
    }
}

/// Keeps the part of each range where `slope·t ≤ rhs`.
fn clip_linear(allowed: &mut Vec<(f64, f64)>, slope: f64, rhs: f64) {
    if slope == 0.0 {
        if rhs < 0.0 {
            allowed.clear();
        }
        return;
    }
    let t = rhs / slope;
    allowed.retain_mut(|(l, h)| {
        if slope > 0.0 {
            *h = h.min(t);
        } else {
            *l = l.max(t);
        }
        *h > *l
    });
}

/// Removes the angles θ with 2·u(θ)·d > e, an open arc centred on the
/// direction of `d`.
fn clip_arc(allowed: &mut Vec<(f64, f64)>, d: Point, e: f64) {
    let r = 2.0 * d.norm_sq().sqrt();
    if e >= r {
        return;
    }
    if e < -r {
        allowed.clear();
        return;
    }
    let phi = d.y.atan2(d.x);
    let delta = (e / r).acos();
    for m in -1..=2 {
        let shift = TAU * m as f64;
        subtract(allowed, phi - delta + shift, phi + delta + shift);
    }
}

fn subtract(allowed: &mut Vec<(f64, f64)>, f0: f64, f1: f64) {
    let mut out = Vec::with_capacity(allowed.len() + 1);
    for &(l, h) in allowed.iter() {
        if h <= f0 || l >= f1 {
            out.push((l, h));
            continue;
        }
        if l < f0 {
            out.push((l, f0));
        }
        if h > f1 {
            out.push((f1, h));
        }
    }
    *allowed = out;
}

/// Largest distance from a point of one codebook to the nearest point of
/// the other, taken both ways.
pub fn hausdorff(a: &[Point], b: &[Point]) -> f64 {
    let one_way = |u: &[Point], v: &[Point]| {
        u.iter()
            .map(|&p| v.iter().map(|&q| p.dist(q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Hausdorff distance after the best of the four reflections x ↦ ±x, y ↦ ±y.
pub fn aligned_distance(a: &[Point], b: &[Point]) -> f64 {
    [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)]
        .iter()
        .map(|&(sx, sy)| {
            let r: Vec<Point> = b.iter().map(|p| Point::new(sx * p.x, sy * p.y)).collect();
            hausdorff(a, &r)
        })
        .fold(f64::INFINITY, f64::min)
}
