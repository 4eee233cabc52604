//! Scalar and small-system root finding.
//!
//! `brent` is the usual bracketed inverse-quadratic/bisection hybrid.
//! `newton_box` is a damped Newton iteration for systems of up to a few
//! unknowns with a central-difference Jacobian, confined to a box.

use crate::error::{Error, Result};

/// Finds a root of `f` in `[lo, hi]`, which must bracket a sign change.
pub fn brent<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidArg(format!(
            "brent: [{lo}, {hi}] does not bracket a root"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::NonConvergence {
        what: "brent".into(),
        residual: fb.abs(),
    })
}

/// Scans `[lo, hi]` on `samples` equal steps. Returns `(x, x)` for every
/// grid point where `f` is exactly zero and `(x0, x1)` for every step on
/// which `f` changes sign strictly.
pub fn sign_brackets<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, samples: usize) -> Vec<(f64, f64)> {
    let step = (hi - lo) / samples as f64;
    let mut out = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    if f0 == 0.0 {
        out.push((lo, lo));
    }
    for i in 1..=samples {
        let x1 = if i == samples { hi } else { lo + step * i as f64 };
        let f1 = f(x1);
        if f1 == 0.0 {
            out.push((x1, x1));
        } else if f0 != 0.0 && f0.is_finite() && f1.is_finite() && f0.signum() != f1.signum() {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iters: usize,
    /// Stop as soon as the sup-norm residual falls below this.
    pub ftol: f64,
    /// Report success if the final residual is below this.
    pub accept: f64,
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iters: 100,
            ftol: 1e-15,
            accept: 1e-10,
            fd_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Damped Newton for `F(x) = 0` restricted to the open box `(lower, upper)`.
///
/// Steps that would leave the box are shortened to stay strictly inside;
/// the step is halved until the sup-norm residual decreases. Iteration
/// stops at `ftol` or when no step improves the residual.
pub fn newton_box<F>(
    f: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: NewtonOptions,
) -> Result<NewtonOutcome>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let dim = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut res = sup_norm(&fx);
    let mut iterations = 0;
    for it in 0..opts.max_iters {
        iterations = it;
        if !res.is_finite() {
            break;
        }
        if res < opts.ftol {
            return Ok(NewtonOutcome {
                x,
                residual: res,
                iterations: it,
            });
        }
        let mut jac = vec![vec![0.0; dim]; dim];
        for j in 0..dim {
            let h = opts.fd_step * x[j].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let fp = f(&xp);
            let fm = f(&xm);
            for i in 0..dim {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let neg: Vec<f64> = fx.iter().map(|v| -v).collect();
        let Some(step) = solve_dense(jac, neg) else {
            break;
        };
        // keep strictly inside the box
        let mut t = 1.0_f64;
        for j in 0..dim {
            if step[j] > 0.0 && x[j] + step[j] >= upper[j] {
                t = t.min(0.9 * (upper[j] - x[j]) / step[j]);
            } else if step[j] < 0.0 && x[j] + step[j] <= lower[j] {
                t = t.min(0.9 * (lower[j] - x[j]) / step[j]);
            }
        }
        let mut accepted = false;
        for _ in 0..40 {
            let xn: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let fxn = f(&xn);
            let rn = sup_norm(&fxn);
            if rn.is_finite() && rn < res {
                x = xn;
                fx = fxn;
                res = rn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res < opts.accept {
        return Ok(NewtonOutcome {
            x,
            residual: res,
            iterations,
        });
    }
    Err(Error::NonConvergence {
        what: "damped Newton".into(),
        residual: res,
    })
}

/// Gaussian elimination with partial pivoting. `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (x, &p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn brent_rejects_non_bracket() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn brackets_include_exact_zero_at_grid_point() {
        let br = sign_brackets(|x| x - 0.5, 0.0, 1.0, 4);
        assert_eq!(br.len(), 1);
        assert_eq!(br[0].0, 0.5);
    }

    #[test]
    fn newton_solves_coupled_system_in_box() {
        // x^2 + y^2 = 1, x = y  -> (1/sqrt2, 1/sqrt2) inside (0,1)^2
        let out = newton_box(
            |v| vec![v[0] * v[0] + v[1] * v[1] - 1.0, v[0] - v[1]],
            &[0.9, 0.2],
            &[0.0, 0.0],
            &[1.0, 1.0],
            NewtonOptions::default(),
        )
        .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.x[0] - s).abs() < 1e-12 && (out.x[1] - s).abs() < 1e-12);
    }

    #[test]
    fn newton_reports_residual_when_no_root() {
        let err = newton_box(
            |v| vec![v[0] * v[0] + 1.0],
            &[0.5],
            &[-2.0],
            &[2.0],
            NewtonOptions::default(),
        )
        .unwrap_err();
        match err {
            Error::NonConvergence { residual, .. } => assert!(residual >= 1.0),
            e => panic!("unexpected {e:?}"),
        }
    }
}
