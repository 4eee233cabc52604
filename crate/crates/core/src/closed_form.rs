//! Optimal quantizers of a single uniform distribution on an interval or on
//! an arc of the unit circle.

use std::f64::consts::TAU;

use crate::error::{invalid, Result};
use crate::measures::{Codebook, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct UniformQuantizer {
    pub points: Codebook,
    pub error: f64,
    pub n: usize,
}

/// Midpoints of `n` equal cells of `[lo, hi]`.
pub fn interval_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let w = (hi - lo) / (2 * n) as f64;
    (1..=n).map(|i| lo + (2 * i - 1) as f64 * w).collect()
}

pub fn interval_optimal(lo: f64, hi: f64, n: usize) -> Result<UniformQuantizer> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return invalid(format!("interval needs lo < hi, got [{lo}, {hi}]"));
    }
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let len = hi - lo;
    Ok(UniformQuantizer {
        points: Codebook::line(interval_points(lo, hi, n))?,
        error: len * len / (12 * n * n) as f64,
        n,
    })
}

/// sin(x)/x, the radius of the centroid of an arc of half-angle x.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

/// 1 − (sin x / x)², the normalised error of one point on an arc of
/// half-angle x. Written as (x − sin x)(x + sin x)/x² with a series for
/// x − sin x to keep relative accuracy when x is small.
fn arc_cell_error(x: f64) -> f64 {
    let x_minus_sin = if x.abs() < 0.1 {
        let x2 = x * x;
        x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))))
    } else {
        x - x.sin()
    };
    x_minus_sin * (x + x.sin()) / (x * x)
}

/// Points of the optimal `n`-point quantizer of the uniform distribution on
/// the arc `α ≤ θ ≤ β`.
pub fn arc_points(alpha: f64, beta: f64, n: usize) -> Vec<Point> {
    let len = beta - alpha;
    let half = len / (2 * n) as f64;
    let r = sinc(half);
    (1..=n)
        .map(|j| Point::polar(r, alpha + (2 * j - 1) as f64 * half))
        .collect()
}

fn check_arc(alpha: f64, beta: f64, n: usize) -> Result<()> {
    if !(alpha.is_finite() && beta.is_finite() && alpha < beta && beta - alpha <= TAU + 1e-12) {
        return invalid(format!("arc needs alpha < beta within one turn, got [{alpha}, {beta}]"));
    }
    if n == 0 {
        return invalid("n must be at least 1");
    }
    Ok(())
}

pub fn arc_optimal(alpha: f64, beta: f64, n: usize) -> Result<UniformQuantizer> {
    if !(0.0 <= alpha && beta <= TAU) {
        return invalid(format!("arc needs 0 <= alpha < beta <= 2pi, got [{alpha}, {beta}]"));
    }
    check_arc(alpha, beta, n)?;
    Ok(UniformQuantizer {
        points: Codebook::planar(arc_points(alpha, beta, n))?,
        error: arc_cell_error((beta - alpha) / (2 * n) as f64),
        n,
    })
}

/// Distortion contributed by the optimal `n` points on the arc
/// `b_lo ≤ θ ≤ b_hi` when the arc carries line density `density`.
pub fn weighted_arc_distortion(b_lo: f64, b_hi: f64, n: usize, density: f64) -> Result<f64> {
    check_arc(b_lo, b_hi, n)?;
    if !(density > 0.0 && density.is_finite()) {
        return invalid(format!("density must be positive, got {density}"));
    }
    let len = b_hi - b_lo;
    Ok(density * len * arc_cell_error(len / (2 * n) as f64))
}
