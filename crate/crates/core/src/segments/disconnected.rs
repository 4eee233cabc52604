//! ¾·U[0, ½] + ¼·U[¾, 1].
//!
//! No optimal cell straddles the gap (½, ¾), so an optimal codebook is the
//! union of uniform quantizers of the two intervals and only the split
//! `k + (n − k)` has to be chosen.

use std::f64::consts::PI;

use crate::closed_form::interval_points;
use crate::error::{invalid, Error, Result};
use crate::exact::{self, rat, Rational, UniformPiece};
use crate::measures::{Codebook, MixedMeasure};
use crate::result::{Allocation, Method, QuantizationResult};

/// Below this, the tail Σ_{m>k} m⁻⁴ is summed directly up to this index and
/// closed with an Euler–Maclaurin remainder.
const TAIL_SWITCH: usize = 32;

/// Σ_{m ≥ k+1} 1/m⁴.
pub fn quartic_tail(k: usize) -> f64 {
    let big = k.max(TAIL_SWITCH);
    let kf = big as f64;
    let inv = 1.0 / kf;
    let inv2 = inv * inv;
    // Σ_{m > K} m⁻⁴ = 1/(3K³) − 1/(2K⁴) + 1/(3K⁵) − 1/(6K⁷) + 2/(9K⁹) − 1/(2K¹¹) + …
    let rem = inv2 * inv
        * (1.0 / 3.0
            + inv * (-0.5 + inv * (1.0 / 3.0 + inv2 * (-1.0 / 6.0 + inv2 * (2.0 / 9.0 - inv2 * 0.5)))));
    let head: f64 = (k + 1..=big).rev().map(|m| (m as f64).powi(-4)).sum();
    head + rem
}

/// The same tail as ζ(4) − Σ_{m ≤ k} m⁻⁴. Loses relative accuracy as k grows.
pub fn quartic_tail_zeta(k: usize) -> f64 {
    let zeta4 = PI.powi(4) / 90.0;
    zeta4 - (1..=k).map(|m| (m as f64).powi(-4)).sum::<f64>()
}

/// H(n, k) = 1/n³ − Σ_{m ≥ k+1} 1/m⁴.
pub fn h(n: usize, k: usize) -> f64 {
    1.0 / (n as f64).powi(3) - quartic_tail(k)
}

/// a(n) = min{k ≥ 1 : H(n, k) > 0}, scanned from k = ⌊2n/3⌋.
pub fn alloc_disconnected(n: usize) -> Result<usize> {
    if n < 2 {
        return invalid(format!("a(n) is defined for n >= 2, got {n}"));
    }
    let mut k = (2 * n / 3).max(1);
    if h(n, k) > 0.0 {
        while k > 1 && h(n, k - 1) > 0.0 {
            k -= 1;
        }
    } else {
        while h(n, k) <= 0.0 {
            k += 1;
        }
    }
    Ok(k)
}

/// V(k, n − k) = ¾·1/(48k²) + ¼·1/(192(n−k)²), exactly.
pub fn split_error(n: usize, k: usize) -> Result<Rational> {
    if k == 0 || k >= n {
        return invalid(format!("split needs 1 <= k < n, got k={k}, n={n}"));
    }
    let (k, m) = (k as i128, (n - k) as i128);
    Ok(rat(1, 64 * k * k) + rat(1, 768 * m * m))
}

/// Improve-while-better search over k starting at ⌊2n/3⌋; returns the path
/// of visited k values, ending at the local minimiser.
pub fn local_search_path(n: usize) -> Result<Vec<usize>> {
    if n < 2 {
        return invalid(format!("local search needs n >= 2, got {n}"));
    }
    let mut k = (2 * n / 3).clamp(1, n - 1);
    let mut path = vec![k];
    let v = |k: usize| split_error(n, k).expect("k within range");
    while k + 1 < n && v(k + 1) < v(k) {
        k += 1;
        path.push(k);
    }
    if path.len() == 1 {
        while k > 1 && v(k - 1) < v(k) {
            k -= 1;
            path.push(k);
        }
    }
    Ok(path)
}

pub fn local_search_alloc(n: usize) -> Result<usize> {
    Ok(*local_search_path(n)?.last().unwrap())
}

fn exact_pieces() -> [UniformPiece; 2] {
    [
        UniformPiece::new(rat(0, 1), rat(1, 2), rat(3, 4)),
        UniformPiece::new(rat(3, 4), rat(1, 1), rat(1, 4)),
    ]
}

/// Exact distortion of a codebook whose points are rational.
pub fn exact_distortion(points: &[Rational]) -> Rational {
    exact::distortion(&exact_pieces(), points)
}

/// Optimal set of n-means: `k` uniform points on `[0, ½]` and `n − k` on
/// `[¾, 1]`, with `k` the minimiser of [`split_error`].
pub fn optimal_set_disconnected(n: usize) -> Result<QuantizationResult> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if n == 1 {
        let mean = exact::mean(&exact_pieces());
        return Ok(QuantizationResult {
            codebook: Codebook::line(vec![exact::to_f64(mean)])?,
            error: 277.0 / 3072.0,
            error_exact: Some(exact::variance(&exact_pieces())),
            allocation: None,
            method: Method::ClosedForm,
        });
    }
    let k = local_search_alloc(n)?;
    let v = split_error(n, k)?;
    let mut xs = interval_points(0.0, 0.5, k);
    xs.extend(interval_points(0.75, 1.0, n - k));
    let codebook = Codebook::line(xs)?;
    let error = exact::to_f64(v);
    let check = MixedMeasure::disconnected().distortion_of(codebook.points());
    if (check - error).abs() > 1e-12 * error.max(1e-300).max(1.0) {
        return Err(Error::Assertion(format!(
            "split formula {error} disagrees with distortion {check} at n={n}"
        )));
    }
    Ok(QuantizationResult {
        codebook,
        error,
        error_exact: Some(v),
        allocation: Some(Allocation::Split { k }),
        method: Method::ClosedForm,
    })
}

/// Exact rational points of the optimal codebook for `k` points on the left.
pub fn exact_points(n: usize, k: usize) -> Vec<Rational> {
    let (ki, mi) = (k as i128, (n - k) as i128);
    let mut pts: Vec<Rational> = (1..=ki).map(|i| rat(2 * i - 1, 4 * ki)).collect();
    pts.extend((1..=mi).map(|j| rat(3, 4) + rat(2 * j - 1, 8 * mi)));
    pts
}
