//! Adaptive Gauss–Legendre quadrature.

use std::sync::OnceLock;

/// Nodes and weights of the `order`-point Gauss–Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x).
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule(order: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static R10: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static R21: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match order {
        10 => R10.get_or_init(|| gauss_legendre(10)),
        21 => R21.get_or_init(|| gauss_legendre(21)),
        _ => unreachable!(),
    }
}

fn apply<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, order: usize) -> f64 {
    let (x, w) = rule(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter().zip(w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>() * half
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`. A panel is
/// accepted when the 21-point rule on it agrees with the sum of the rule on
/// its two halves; otherwise it is bisected.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    integrate_pieces(&f, a, b, tol, 1)
}

/// Like [`integrate`] but first splits `[a, b]` into `pieces` equal parts,
/// which helps the error estimate see localised kinks.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, pieces: usize) -> f64 {
    let h = (b - a) / pieces as f64;
    let per = tol / pieces as f64;
    (0..pieces)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == pieces { b } else { lo + h };
            recurse(f, lo, hi, apply(f, lo, hi, ORDER), per, 0)
        })
        .sum()
}

/// Integrates over `[a, b]` after splitting at every `breaks` entry inside
/// it, then into `pieces` parts each, so the integrand may have kinks there.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
    pieces: usize,
) -> f64 {
    let mut knots: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    knots.push(a);
    knots.push(b);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let per = tol / (knots.len() - 1) as f64;
    knots.windows(2).map(|w| integrate_pieces(f, w[0], w[1], per, pieces)).sum()
}

const ORDER: usize = 21;

fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = apply(f, a, m, ORDER);
    let right = apply(f, m, b, ORDER);
    let halves = left + right;
    if (halves - whole).abs() <= tol || depth >= 48 || (b - a).abs() < 1e-14 {
        return halves;
    }
    recurse(f, a, m, left, 0.5 * tol, depth + 1) + recurse(f, m, b, right, 0.5 * tol, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_symmetric() {
        for n in [1, 2, 5, 10, 21] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n={n}");
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ten_point_rule_is_exact_for_degree_19() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kink() {
        let v = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12);
        assert!((v - (0.09 + 0.49) / 2.0).abs() < 1e-11);
    }

    #[test]
    fn adaptive_smooth_trig() {
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-13);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn breaks_expose_narrow_dip() {
        let f = |x: f64| (1e3 * (x - 0.5).abs()).min(1.0);
        let v = integrate_with_breaks(&f, 0.0, 1.0, &[0.501, 0.5, 0.499, 2.0], 1e-13, 1);
        let want = 0.999;
        assert!((v - want).abs() < 1e-12, "{v} vs {want}");
    }
}
