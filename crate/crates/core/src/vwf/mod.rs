//! Vertex weighting functions: convex piecewise quadratics with a finitely
//! supported curvature profile.

mod compress;
mod tag;
mod tree;

pub use compress::{bregman_terms, compress, round_pow, BregmanTerm, ROUND_BASE};
pub use tag::Lift;
pub use tree::{VwfSnapshot, VwfTree};

use crate::error::{Error, Result};
use crate::scalar::{approx_eq, Scalar};

/// `f(x) = r x^2 / 2 + a x + b` on `[start, next start)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece<T> {
    pub start: T,
    pub r: T,
    pub a: T,
    pub b: T,
}

impl<T: Scalar> Piece<T> {
    pub fn new(start: T, r: T, a: T, b: T) -> Self {
        Piece { start, r, a, b }
    }

    #[inline]
    pub fn value(&self, x: T) -> T {
        (T::half() * self.r * x + self.a) * x + self.b
    }

    #[inline]
    pub fn slope(&self, x: T) -> T {
        self.r * x + self.a
    }

    /// Image of this piece under `P_c`; the start is not finite-checked.
    pub fn lifted(&self, c: T) -> Self {
        let start = if self.start.is_finite() { self.start + self.slope(self.start) / c } else { self.start };
        let cr = c + self.r;
        Piece { start, r: c * self.r / cr, a: c * self.a / cr, b: self.b - self.a * self.a / (T::two() * cr) }
    }
}

/// Breakpoint gaps at or below this (relative) width are merged.
pub(crate) fn gap_tol<T: Scalar>(x: T) -> T {
    T::lit(1e-12) * T::one().max(x.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vwf<T> {
    pieces: Vec<Piece<T>>,
}

const CONTINUITY_TOL: f64 = 1e-9;

impl<T: Scalar> Vwf<T> {
    /// Validated constructor: strictly increasing starts, non-negative and
    /// non-increasing curvature ending at zero, and value/slope continuity at
    /// every breakpoint.
    pub fn new(pieces: Vec<Piece<T>>) -> Result<Self> {
        let f = Vwf { pieces };
        f.validate()?;
        Ok(f)
    }

    pub(crate) fn from_pieces_unchecked(pieces: Vec<Piece<T>>) -> Self {
        debug_assert!(!pieces.is_empty());
        Vwf { pieces }
    }

    /// `a x` on `[start, inf)`.
    pub fn linear(start: T, a: T) -> Self {
        Vwf { pieces: vec![Piece::new(start, T::zero(), a, T::zero())] }
    }

    /// Builds a function from a start point, the slope at the start and a
    /// list of `(breakpoint, curvature)` pairs; the value at the start is
    /// `value0`. The final curvature is forced to zero.
    pub fn from_profile(start: T, value0: T, slope0: T, segments: &[(T, T)]) -> Result<Self> {
        let mut pieces = Vec::with_capacity(segments.len() + 1);
        let mut s = start;
        let mut v = value0;
        let mut p = slope0;
        for (i, &(end, r)) in segments.iter().enumerate() {
            if !(end > s) {
                return Err(Error::InvalidVwf(format!("segment {i} does not advance past {s}")));
            }
            let a = p - r * s;
            let b = v - (T::half() * r * s + a) * s;
            let piece = Piece::new(s, r, a, b);
            v = piece.value(end);
            p = piece.slope(end);
            pieces.push(piece);
            s = end;
        }
        let a = p;
        pieces.push(Piece::new(s, T::zero(), a, v - a * s));
        Vwf::new(pieces)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.pieces;
        if p.is_empty() {
            return Err(Error::InvalidVwf("no pieces".into()));
        }
        if p[0].start.is_nan() || p[0].start == T::infinity() {
            return Err(Error::InvalidVwf("domain start must be finite or -inf".into()));
        }
        for (i, q) in p.iter().enumerate() {
            if !(q.r.is_finite() && q.a.is_finite() && q.b.is_finite()) {
                return Err(Error::InvalidVwf(format!("piece {i} has non-finite coefficients")));
            }
            if i > 0 && !q.start.is_finite() {
                return Err(Error::InvalidVwf(format!("piece {i} has a non-finite start")));
            }
            if q.r < T::zero() {
                return Err(Error::InvalidVwf(format!("piece {i} has negative curvature {}", q.r)));
            }
        }
        for i in 1..p.len() {
            let (l, q) = (&p[i - 1], &p[i]);
            if !(q.start > l.start) {
                return Err(Error::InvalidVwf(format!("breakpoint {i} does not increase")));
            }
            if q.r > l.r && !approx_eq(q.r, l.r, T::lit(CONTINUITY_TOL)) {
                return Err(Error::InvalidVwf(format!("curvature increases at breakpoint {i}")));
            }
            let s = q.start;
            let scale_v = T::one()
                + (T::half() * l.r * s * s).abs()
                + (l.a * s).abs()
                + l.b.abs()
                + (T::half() * q.r * s * s).abs()
                + (q.a * s).abs()
                + q.b.abs();
            if (l.value(s) - q.value(s)).abs() > T::lit(CONTINUITY_TOL) * scale_v {
                return Err(Error::InvalidVwf(format!("value jumps at breakpoint {i}")));
            }
            let scale_d = T::one() + (l.r * s).abs() + l.a.abs() + (q.r * s).abs() + q.a.abs();
            if (l.slope(s) - q.slope(s)).abs() > T::lit(CONTINUITY_TOL) * scale_d {
                return Err(Error::InvalidVwf(format!("slope jumps at breakpoint {i}")));
            }
        }
        let last = p.last().unwrap();
        let rscale = T::one().max(p[0].r);
        if last.r.abs() > T::lit(CONTINUITY_TOL) * rscale {
            return Err(Error::InvalidVwf("final piece must be linear".into()));
        }
        Ok(())
    }

    /// Additionally requires `s_0 <= 0` and `f(0) <= 0`.
    pub fn validate_standard(&self) -> Result<()> {
        self.validate()?;
        if self.domain_start() > T::zero() {
            return Err(Error::InvalidVwf("domain does not contain 0".into()));
        }
        let f0 = self.eval_unchecked(T::zero());
        let tol = T::lit(CONTINUITY_TOL) * T::one().max(self.pieces[self.locate(T::zero())].b.abs());
        if f0 > tol {
            return Err(Error::InvalidVwf(format!("f(0) = {f0} is positive")));
        }
        Ok(())
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    pub fn into_pieces(self) -> Vec<Piece<T>> {
        self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn domain_start(&self) -> T {
        self.pieces[0].start
    }

    /// Index of the piece containing `x` (the first piece for points left of
    /// the domain).
    pub fn locate(&self, x: T) -> usize {
        self.pieces.partition_point(|p| p.start <= x).saturating_sub(1)
    }

    fn check_point(&self, x: T) -> Result<()> {
        if x.is_nan() {
            return Err(Error::Domain("NaN argument".into()));
        }
        if x < self.domain_start() {
            return Err(Error::Domain(format!("{x} is left of the domain start {}", self.domain_start())));
        }
        Ok(())
    }

    pub fn eval(&self, x: T) -> Result<T> {
        self.check_point(x)?;
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub fn eval_unchecked(&self, x: T) -> T {
        self.pieces[self.locate(x)].value(x)
    }

    pub fn slope(&self, x: T) -> Result<T> {
        self.check_point(x)?;
        Ok(self.slope_unchecked(x))
    }

    #[inline]
    pub fn slope_unchecked(&self, x: T) -> T {
        self.pieces[self.locate(x)].slope(x)
    }

    #[inline]
    pub fn curvature_unchecked(&self, x: T) -> T {
        self.pieces[self.locate(x)].r
    }

    /// Pointwise sum on the intersection of the two domains.
    pub fn add(&self, other: &Vwf<T>) -> Vwf<T> {
        let start = self.domain_start().max(other.domain_start());
        let mut keys: Vec<T> =
            self.pieces.iter().chain(other.pieces.iter()).map(|p| p.start).filter(|&s| s > start).collect();
        keys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        keys.dedup();
        let mut starts = vec![start];
        let mut reps = vec![start];
        for k in keys {
            let last = *starts.last().unwrap();
            if k - last <= gap_tol(k) {
                *reps.last_mut().unwrap() = k;
            } else {
                starts.push(k);
                reps.push(k);
            }
        }
        let pieces = starts
            .iter()
            .zip(&reps)
            .map(|(&s, &rep)| {
                let p = &self.pieces[self.locate(rep)];
                let q = &other.pieces[other.locate(rep)];
                Piece::new(s, p.r + q.r, p.a + q.a, p.b + q.b)
            })
            .collect();
        Vwf { pieces }
    }

    /// `P_c f (x) = min_y c/2 (x - y)^2 + f(y)`.
    pub fn lift(&self, c: T) -> Result<Vwf<T>> {
        check_conductance(c)?;
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        let s0 = self.domain_start();
        if s0.is_finite() {
            let v0 = self.pieces[0].value(s0);
            out.push(Piece::new(T::neg_infinity(), c, -c * s0, T::half() * c * s0 * s0 + v0));
        }
        for p in &self.pieces {
            let q = p.lifted(c);
            match out.last_mut() {
                Some(last) if q.start <= last.start + gap_tol(q.start) && last.start.is_finite() => {
                    *last = Piece { start: last.start, ..q };
                }
                _ => out.push(q),
            }
        }
        Ok(Vwf { pieces: out })
    }

    /// Minimiser `y` of `c/2 (x - y)^2 + f(y)` over the domain of `f`.
    pub fn optimal_x(&self, c: T, x: T) -> Result<T> {
        check_conductance(c)?;
        if x.is_nan() {
            return Err(Error::Domain("NaN argument".into()));
        }
        let lifted_start = |i: usize| {
            let p = &self.pieces[i];
            if p.start.is_finite() {
                p.start + p.slope(p.start) / c
            } else {
                p.start
            }
        };
        let s0 = self.domain_start();
        if s0.is_finite() && x <= lifted_start(0) {
            return Ok(s0);
        }
        let mut lo = 0;
        let mut hi = self.pieces.len();
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if lifted_start(mid) <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = &self.pieces[lo];
        let mut y = (c * x - p.a) / (c + p.r);
        if p.start.is_finite() {
            y = y.max(p.start);
        }
        if let Some(next) = self.pieces.get(lo + 1) {
            y = y.min(next.start);
        }
        Ok(y)
    }

    /// `g(y) = slope * y + f(x0 + y) - f(x0)`.
    pub fn reorigin(&self, x0: T, slope: T) -> Result<Vwf<T>> {
        self.check_point(x0)?;
        let fx0 = self.eval_unchecked(x0);
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece { start: p.start - x0, r: p.r, a: p.r * x0 + p.a + slope, b: p.value(x0) - fx0 })
            .collect();
        Ok(Vwf { pieces })
    }

    /// Restriction to `[lo, inf)`.
    pub fn truncate(&self, lo: T) -> Result<Vwf<T>> {
        self.check_point(lo)?;
        let i = self.locate(lo);
        let mut pieces: Vec<Piece<T>> = self.pieces[i..].to_vec();
        pieces[0].start = lo;
        if pieces.len() > 1 && pieces[1].start - lo <= gap_tol(lo) {
            pieces.remove(0);
            pieces[0].start = lo;
        }
        Ok(Vwf { pieces })
    }

    pub fn add_linear(&self, slope: T) -> Vwf<T> {
        let pieces = self.pieces.iter().map(|p| Piece { a: p.a + slope, ..*p }).collect();
        Vwf { pieces }
    }

    pub fn cast<U: Scalar>(&self) -> Vwf<U> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                Piece::new(U::lit(p.start.as_f64()), U::lit(p.r.as_f64()), U::lit(p.a.as_f64()), U::lit(p.b.as_f64()))
            })
            .collect();
        Vwf { pieces }
    }
}

pub(crate) fn check_conductance<T: Scalar>(c: T) -> Result<()> {
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::Domain(format!("lift parameter must be positive and finite, got {c}")));
    }
    Ok(())
}
