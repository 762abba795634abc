//! Bregman decomposition of a VWF and breakpoint rounding.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Piece, Vwf};

pub const ROUND_BASE: f64 = 1.1;

/// Smallest power of `base` that is `>= x` for `x > 0`, extended oddly with
/// `round_pow(0) = 0`.
pub fn round_pow<T: Scalar>(x: T, base: T) -> T {
    if x == T::zero() || !x.is_finite() {
        return x;
    }
    if x < T::zero() {
        return -round_pow(-x, base);
    }
    let ln_base = base.ln();
    let mut k = (x.ln() / ln_base).ceil().to_i32().unwrap_or(i32::MAX);
    while base.powi(k) < x {
        k += 1;
    }
    while base.powi(k - 1) >= x {
        k -= 1;
    }
    base.powi(k)
}

/// `d B_{s0, t}`: curvature `d` left of `t`, linear or flat beyond it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BregmanTerm<T> {
    pub weight: T,
    pub at: T,
}

impl<T: Scalar> BregmanTerm<T> {
    pub fn eval(&self, x: T) -> T {
        let t = self.at;
        let v = if t >= T::zero() {
            if x < t {
                T::half() * x * x
            } else {
                t * x - T::half() * t * t
            }
        } else if x < t {
            T::half() * (x - t) * (x - t)
        } else {
            T::zero()
        };
        self.weight * v
    }
}

/// `f(x) = f(0) + f'(0) x + sum_i d_i B_{s0, s_{i+1}}(x)` with
/// `d_i = r_i - r_{i+1}`. Returns `(f(0), f'(0), terms)`.
pub fn bregman_terms<T: Scalar>(f: &Vwf<T>) -> Result<(T, T, Vec<BregmanTerm<T>>)> {
    let s0 = f.domain_start();
    if !s0.is_finite() || s0 > T::zero() {
        return Err(Error::InvalidVwf("decomposition needs a finite domain start <= 0".into()));
    }
    let p = f.pieces();
    let terms = (0..p.len())
        .filter_map(|i| {
            let next_r = p.get(i + 1).map_or(T::zero(), |q| q.r);
            let d = p[i].r - next_r;
            match p.get(i + 1) {
                Some(q) if d != T::zero() => Some(BregmanTerm { weight: d, at: q.start }),
                _ => None,
            }
        })
        .collect();
    Ok((f.eval_unchecked(T::zero()), f.slope_unchecked(T::zero()), terms))
}

/// Rebuilds pieces from `f(0)`, `f'(0)` and Bregman terms sorted by
/// breakpoint, all strictly inside the domain.
fn assemble<T: Scalar>(s0: T, f0: T, g0: T, terms: &[BregmanTerm<T>]) -> Vwf<T> {
    let mut starts = vec![s0];
    starts.extend(terms.iter().map(|t| t.at));
    let pieces = starts
        .iter()
        .map(|&s| {
            let (mut r, mut a, mut b) = (T::zero(), g0, f0);
            for t in terms {
                let d = t.weight;
                let k = t.at;
                if k > s {
                    r = r + d;
                    if k < T::zero() {
                        a = a - d * k;
                        b = b + T::half() * d * k * k;
                    }
                } else if k >= T::zero() {
                    a = a + d * k;
                    b = b - T::half() * d * k * k;
                }
            }
            Piece::new(s, r, a, b)
        })
        .collect();
    Vwf::from_pieces_unchecked(pieces)
}

/// Rounds every breakpoint outward to a power of `ROUND_BASE`, rescaling the
/// Bregman weights so that `2 f(x / 2) <= compress(f)(x) <= f(x)`.
pub fn compress<T: Scalar>(f: &Vwf<T>) -> Result<Vwf<T>> {
    let (f0, g0, terms) = bregman_terms(f)?;
    let s0 = f.domain_start();
    let base = T::lit(ROUND_BASE);
    let mut rounded: Vec<BregmanTerm<T>> = Vec::with_capacity(terms.len());
    for t in terms {
        let (weight, at) = if t.at == T::zero() {
            (t.weight, t.at)
        } else {
            let at = round_pow(t.at, base);
            (t.weight * t.at / at, at)
        };
        if at <= s0 {
            continue;
        }
        match rounded.last_mut() {
            Some(last) if last.at == at => last.weight = last.weight + weight,
            _ => rounded.push(BregmanTerm { weight, at }),
        }
    }
    Ok(assemble(s0, f0, g0, &rounded))
}
