//! Exact rational evaluation of 1-D piecewise-uniform distortions.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

pub type Rational = Ratio<i128>;

pub fn rat(num: i128, den: i128) -> Rational {
    Ratio::new(num, den)
}

/// A uniform piece `density` on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformPiece {
    pub lo: Rational,
    pub hi: Rational,
    pub density: Rational,
}

impl UniformPiece {
    pub fn new(lo: Rational, hi: Rational, weight: Rational) -> Self {
        Self {
            lo,
            hi,
            density: weight / (hi - lo),
        }
    }

    fn cost(&self, lo: Rational, hi: Rational, p: Rational) -> Rational {
        let l = lo.max(self.lo);
        let h = hi.min(self.hi);
        if h <= l {
            return Rational::zero();
        }
        let (a, b) = (h - p, l - p);
        self.density * (a * a * a - b * b * b) / Rational::from_integer(3)
    }
}

/// Exact ∫ min_i (x − p_i)² dP for a measure built from `pieces`.
pub fn distortion(pieces: &[UniformPiece], points: &[Rational]) -> Rational {
    let mut pts = points.to_vec();
    pts.sort();
    let mut total = Rational::zero();
    let lo_all = pieces.iter().map(|p| p.lo).min().unwrap_or_default();
    let hi_all = pieces.iter().map(|p| p.hi).max().unwrap_or_default();
    let two = Rational::from_integer(2);
    for (i, &p) in pts.iter().enumerate() {
        let lo = if i == 0 { lo_all } else { (pts[i - 1] + p) / two };
        let hi = if i + 1 == pts.len() { hi_all } else { (p + pts[i + 1]) / two };
        for piece in pieces {
            total += piece.cost(lo, hi, p);
        }
    }
    total
}

pub fn mean(pieces: &[UniformPiece]) -> Rational {
    let two = Rational::from_integer(2);
    pieces
        .iter()
        .map(|p| p.density * (p.hi * p.hi - p.lo * p.lo) / two)
        .sum()
}

pub fn variance(pieces: &[UniformPiece]) -> Rational {
    distortion(pieces, &[mean(pieces)])
}

pub fn to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `"p/q"`, or `"p"` for integers.
pub fn format(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rational value of a float whose binary expansion has at most
/// `max_bits` fractional digits.
pub fn from_dyadic(x: f64, max_bits: u32) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let mut den: i128 = 1;
    let mut v = x;
    for _ in 0..=max_bits.min(100) {
        if v.fract() == 0.0 && v.abs() < 1e18 {
            return Some(Ratio::new(v as i128, den));
        }
        v *= 2.0;
        den *= 2;
    }
    None
}
