//! ¾·U[0, ½] + ¼·U[½, 1], i.e. density 3/2 on `[0, ½]` and 1/2 on `[½, 1]`.
//!
//! With `k` points `a_1 < … < a_k` and `m` points `b_1 < … < b_m`, every
//! centroidal configuration is fixed by one number, the boundary
//! `t = (a_k + b_1)/2`. When `t ≥ ½` the `b` points split `[t, 1]` evenly
//! and all `a` points but the last split `[0, (a_{k−1}+a_k)/2]` evenly; the
//! remaining condition is that `a_k` is the centroid of its cell. When
//! `t < ½` the roles swap: the `a` points split `[0, t]` and `b_1` is the
//! unknown centroid. Each branch is a scalar root-finding problem.

use crate::error::{invalid, Error, Result};
use crate::exact::{self, rat, UniformPiece};
use crate::measures::{Codebook, MixedMeasure, Point};
use crate::result::{Allocation, Method, QuantizationResult};
use crate::roots::{brent, sign_brackets};

const SCAN: usize = 2000;
const CENTROID_TOL: f64 = 1e-12;

/// Mass and first moment of the measure restricted to `[lo, hi]`.
fn moments(lo: f64, hi: f64) -> (f64, f64) {
    let piece = |l: f64, h: f64, rho: f64| {
        if h <= l {
            (0.0, 0.0)
        } else {
            (rho * (h - l), rho * (h * h - l * l) / 2.0)
        }
    };
    let (m1, f1) = piece(lo.max(0.0), hi.min(0.5), 1.5);
    let (m2, f2) = piece(lo.max(0.5), hi.min(1.0), 0.5);
    (m1 + m2, f1 + f2)
}

fn centroid(lo: f64, hi: f64) -> f64 {
    let (m, f) = moments(lo, hi);
    f / m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The a/b boundary lies in `[½, 1]`.
    RightOfJunction,
    /// The a/b boundary lies in `[0, ½)`.
    LeftOfJunction,
}

/// A centroidal configuration with `k` points on `[0, ½]` and `m` on `[½, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectedSolution {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub k: usize,
    pub m: usize,
    pub branch: Branch,
    /// Distortion from the exact Voronoi integral.
    pub error: f64,
}

impl ConnectedSolution {
    pub fn points(&self) -> Vec<f64> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    /// (a_k + b_1)/2.
    pub fn boundary(&self) -> f64 {
        0.5 * (self.a[self.k - 1] + self.b[0])
    }
}

fn right_branch_points(k: usize, m: usize, t: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let d = (1.0 - t) / m as f64;
    let ak = t - d / 2.0;
    if !(ak > 0.0 && ak <= 0.5) {
        return None;
    }
    let w = ak / (k as f64 - 0.5);
    let a = (1..=k).map(|j| (j as f64 - 0.5) * w).collect();
    let b = (1..=m).map(|j| t + (j as f64 - 0.5) * d).collect();
    Some((a, b))
}

/// Residual of a_k's centroid condition on the right branch.
fn right_residual(k: usize, m: usize, t: f64) -> f64 {
    let d = (1.0 - t) / m as f64;
    let ak = t - d / 2.0;
    if !(ak > 0.0 && ak <= 0.5) {
        return f64::NAN;
    }
    let lo = (k - 1) as f64 * ak / (k as f64 - 0.5);
    centroid(lo, t) - ak
}

fn left_branch_points(k: usize, m: usize, t: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let w = t / k as f64;
    let b1 = t + w / 2.0;
    if !(b1 >= 0.5 && t > 0.0 && t <= 0.5) {
        return None;
    }
    let a: Vec<f64> = (1..=k).map(|j| (j as f64 - 0.5) * w).collect();
    let mut b = vec![b1];
    if m >= 2 {
        let h = 1.0 / (2.0 * (m - 1) as f64);
        let s = (b1 + h) / (1.0 + h);
        let d = (1.0 - s) / (m - 1) as f64;
        b.extend((1..m).map(|j| s + (j as f64 - 0.5) * d));
    }
    Some((a, b))
}

/// Residual of b_1's centroid condition on the left branch.
fn left_residual(k: usize, m: usize, t: f64) -> f64 {
    let b1 = t + t / (2 * k) as f64;
    if !(b1 >= 0.5 && t > 0.0 && t <= 0.5) {
        return f64::NAN;
    }
    let hi = if m == 1 {
        1.0
    } else {
        let h = 1.0 / (2.0 * (m - 1) as f64);
        (b1 + h) / (1.0 + h)
    };
    centroid(t, hi) - b1
}

fn roots_of<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for end in [lo, hi] {
        let v = f(end);
        if v.is_finite() && v.abs() < 1e-15 {
            out.push(end);
        }
    }
    for (l, h) in sign_brackets(&f, lo, hi, SCAN) {
        let root = if l == h { Ok(l) } else { brent(&f, l, h, 1e-16) };
        if let Ok(r) = root {
            if f(r).abs() < 1e-11 && !out.iter().any(|&x: &f64| (x - r).abs() < 1e-13) {
                out.push(r);
            }
        }
    }
    out
}

/// Largest distance between a point and the centroid of its Voronoi cell.
pub fn centroid_residual(points: &[f64]) -> f64 {
    let mut xs = points.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    (0..n)
        .map(|i| {
            let lo = if i == 0 { 0.0 } else { 0.5 * (xs[i - 1] + xs[i]) };
            let hi = if i + 1 == n { 1.0 } else { 0.5 * (xs[i] + xs[i + 1]) };
            (centroid(lo, hi) - xs[i]).abs()
        })
        .fold(0.0, f64::max)
}

/// All admissible centroidal configurations with `k` points on the left,
/// from both branches.
pub fn centroidal_configurations(n: usize, k: usize) -> Result<Vec<ConnectedSolution>> {
    if n < 2 || k == 0 || k >= n {
        return invalid(format!("split needs n >= 2 and 1 <= k < n, got k={k}, n={n}"));
    }
    let m = n - k;
    let measure = MixedMeasure::connected();
    let mut out = Vec::new();
    // right branch: a_k ≤ ½ caps t at (m + 1)/(2m + 1)
    let t_max = (m as f64 + 1.0) / (2.0 * m as f64 + 1.0);
    let right = roots_of(|t| right_residual(k, m, t), 0.5, t_max);
    // left branch: b_1 ≥ ½ needs t ≥ k/(2k + 1)
    let t_min = k as f64 / (2.0 * k as f64 + 1.0);
    let left = roots_of(|t| left_residual(k, m, t), t_min, 0.5);
    let cands = right
        .into_iter()
        .filter_map(|t| right_branch_points(k, m, t).map(|p| (p, Branch::RightOfJunction)))
        .chain(
            left.into_iter()
                .filter_map(|t| left_branch_points(k, m, t).map(|p| (p, Branch::LeftOfJunction))),
        );
    for ((a, b), branch) in cands {
        let pts: Vec<f64> = a.iter().chain(&b).copied().collect();
        if pts.windows(2).any(|w| w[0] >= w[1]) || centroid_residual(&pts) > CENTROID_TOL {
            continue;
        }
        let error = measure.distortion_of(&pts.iter().map(|&x| Point::on_line(x)).collect::<Vec<_>>());
        out.push(ConnectedSolution {
            a,
            b,
            k,
            m,
            branch,
            error,
        });
    }
    Ok(out)
}

/// Lowest-distortion centroidal configuration for the split `k`, if any.
pub fn best_configuration(n: usize, k: usize) -> Result<Option<ConnectedSolution>> {
    Ok(centroidal_configurations(n, k)?
        .into_iter()
        .fold(None, |best: Option<ConnectedSolution>, s| match best {
            Some(b) if b.error <= s.error + 1e-15 => Some(b),
            _ => Some(s),
        }))
}

/// ⌊5(n+1)/8⌋.
pub fn formula_alloc_connected(n: usize) -> usize {
    5 * (n + 1) / 8
}

fn split_value(n: usize, k: usize) -> f64 {
    if k == 0 || k >= n {
        return f64::INFINITY;
    }
    best_configuration(n, k)
        .ok()
        .flatten()
        .map_or(f64::INFINITY, |s| s.error)
}

/// Improve-while-better search over k starting at ⌊5(n+1)/8⌋ (clamped to
/// `1..n`); returns the visited k values.
pub fn local_search_path(n: usize) -> Result<Vec<usize>> {
    if n < 2 {
        return invalid(format!("local search needs n >= 2, got {n}"));
    }
    let mut k = formula_alloc_connected(n).clamp(1, n - 1);
    let mut path = vec![k];
    let mut v = split_value(n, k);
    loop {
        let up = split_value(n, k + 1);
        if up < v {
            k += 1;
            v = up;
            path.push(k);
            continue;
        }
        break;
    }
    if path.len() == 1 {
        loop {
            let down = split_value(n, k - 1);
            if down < v {
                k -= 1;
                v = down;
                path.push(k);
                continue;
            }
            break;
        }
    }
    if !v.is_finite() {
        return Err(Error::NoRealSolution(format!(
            "no admissible centroidal configuration near k={k} for n={n}"
        )));
    }
    Ok(path)
}

pub fn local_search_alloc(n: usize) -> Result<usize> {
    Ok(*local_search_path(n)?.last().unwrap())
}

/// V_n from the closed polynomial in a_1, a_2, a_{k−1}, a_k, b_1, b_2
/// (right branch, `k ≥ 2`, `m ≥ 2`).
pub fn closed_polynomial(s: &ConnectedSolution) -> Option<f64> {
    let (k, m) = (s.k, s.m);
    if k < 2 || m < 2 || s.branch != Branch::RightOfJunction {
        return None;
    }
    let (a1, a2, akm, ak) = (s.a[0], s.a[1], s.a[k - 2], s.a[k - 1]);
    let (b1, b2) = (s.b[0], s.b[1]);
    let (kf, mf) = ((k - 1) as f64, m as f64);
    let sum = -3.0 * b1 * b1 * mf * ak + 3.0 * b1 * mf * ak * ak - 3.0 * b1 * b1 * ak
        + 3.0 * b1 * ak * ak
        - mf * ak.powi(3)
        + 21.0 * a1.powi(3) * kf
        + 9.0 * a2 * a1 * a1 * kf
        - 9.0 * a2 * a2 * a1 * kf
        + 3.0 * a2.powi(3) * kf
        - 3.0 * akm.powi(3)
        - 14.0 * ak.powi(3)
        - 9.0 * akm * ak * ak
        + 24.0 * ak * ak
        + 9.0 * akm * akm * ak
        - 12.0 * ak
        + b2.powi(3) * mf
        - 3.0 * b1 * b2 * b2 * mf
        + 3.0 * b1 * b1 * b2 * mf
        + b1.powi(3)
        + 2.0;
    Some(sum / 48.0)
}

fn exact_pieces() -> [UniformPiece; 2] {
    [
        UniformPiece::new(rat(0, 1), rat(1, 2), rat(3, 4)),
        UniformPiece::new(rat(1, 2), rat(1, 1), rat(1, 4)),
    ]
}

/// Optimal set of n-means for the connected mixture.
///
/// The split is chosen by [`local_search_alloc`]; the error is the closed
/// polynomial where it applies, checked against the Voronoi integral.
pub fn optimal_set_connected(n: usize) -> Result<QuantizationResult> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if n == 1 {
        let pieces = exact_pieces();
        return Ok(QuantizationResult {
            codebook: Codebook::line(vec![exact::to_f64(exact::mean(&pieces))])?,
            error: 13.0 / 192.0,
            error_exact: Some(exact::variance(&pieces)),
            allocation: None,
            method: Method::ClosedForm,
        });
    }
    let k = local_search_alloc(n)?;
    let sol = best_configuration(n, k)?.ok_or_else(|| {
        Error::NoRealSolution(format!("no admissible configuration for n={n}, k={k}"))
    })?;
    let error = match closed_polynomial(&sol) {
        Some(v) => {
            if (v - sol.error).abs() > 1e-10 {
                return Err(Error::Assertion(format!(
                    "closed polynomial {v} disagrees with distortion {} at n={n}",
                    sol.error
                )));
            }
            v
        }
        None => sol.error,
    };
    let pts = sol.points();
    let error_exact = pts
        .iter()
        .map(|&x| exact::from_dyadic(x, 24))
        .collect::<Option<Vec<_>>>()
        .map(|r| exact::distortion(&exact_pieces(), &r));
    Ok(QuantizationResult {
        codebook: Codebook::line(pts)?,
        error,
        error_exact,
        allocation: Some(Allocation::Split { k }),
        method: Method::ClosedForm,
    })
}
