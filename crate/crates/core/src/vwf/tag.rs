//! Lazy transformations of piecewise quadratics.
//!
//! Both `P_c` and adding a quadratic act on the graph of the derivative,
//! `(y, p = f'(y))`, as unimodular affine maps, and they change the value
//! along that graph by a quadratic in `(y, p)`. Compositions of such maps are
//! again of this form, which is what the persistent tree stores as a pending
//! tag.

use crate::error::Result;
use crate::scalar::Scalar;

use super::{check_conductance, Piece};

/// The lift operator `P_c`. Lifts compose by `P_a P_b = P_{ab/(a+b)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lift<T> {
    pub c: T,
}

impl<T: Scalar> Lift<T> {
    pub fn new(c: T) -> Result<Self> {
        check_conductance(c)?;
        Ok(Lift { c })
    }

    pub fn compose(self, other: Lift<T>) -> Lift<T> {
        Lift { c: self.c * other.c / (self.c + other.c) }
    }

    /// Image of a single quadratic piece.
    pub fn apply(self, piece: &Piece<T>) -> Piece<T> {
        piece.lifted(self.c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tag<T> {
    /// Row-major `[[m0, m1], [m2, m3]]` acting on `(y, p)`.
    m: [T; 4],
    t: [T; 2],
    /// Symmetric `[[q0, q1], [q1, q2]]` of the value correction.
    q: [T; 3],
    l: [T; 2],
    k: T,
}

impl<T: Scalar> Tag<T> {
    pub fn lift(c: T) -> Self {
        let z = T::zero();
        let o = T::one();
        Tag { m: [o, o / c, z, o], t: [z, z], q: [z, z, o / c], l: [z, z], k: z }
    }

    /// Adds `r y^2 / 2 + a y + b`.
    pub fn add(r: T, a: T, b: T) -> Self {
        let z = T::zero();
        let o = T::one();
        Tag { m: [o, z, r, o], t: [z, a], q: [r, z, z], l: [a, z], k: b }
    }

    /// `self` applied first, then `next`.
    pub fn then(&self, next: &Tag<T>) -> Tag<T> {
        let [a1, b1, c1, d1] = self.m;
        let [a2, b2, c2, d2] = next.m;
        let m = [a2 * a1 + b2 * c1, a2 * b1 + b2 * d1, c2 * a1 + d2 * c1, c2 * b1 + d2 * d1];
        let t = [a2 * self.t[0] + b2 * self.t[1] + next.t[0], c2 * self.t[0] + d2 * self.t[1] + next.t[1]];
        // Q1 + M1^T Q2 M1
        let [p0, p1, p2] = next.q;
        let qm00 = p0 * a1 + p1 * c1;
        let qm01 = p0 * b1 + p1 * d1;
        let qm10 = p1 * a1 + p2 * c1;
        let qm11 = p1 * b1 + p2 * d1;
        let q =
            [self.q[0] + a1 * qm00 + c1 * qm10, self.q[1] + a1 * qm01 + c1 * qm11, self.q[2] + b1 * qm01 + d1 * qm11];
        // l1 + M1^T (Q2 t1 + l2)
        let w0 = p0 * self.t[0] + p1 * self.t[1] + next.l[0];
        let w1 = p1 * self.t[0] + p2 * self.t[1] + next.l[1];
        let l = [self.l[0] + a1 * w0 + c1 * w1, self.l[1] + b1 * w0 + d1 * w1];
        let qt = p0 * self.t[0] * self.t[0] + T::two() * p1 * self.t[0] * self.t[1] + p2 * self.t[1] * self.t[1];
        let k = self.k + T::half() * qt + next.l[0] * self.t[0] + next.l[1] * self.t[1] + next.k;
        Tag { m, t, q, l, k }
    }

    fn value(&self, y: T, p: T) -> T {
        T::half() * (self.q[0] * y * y + T::two() * self.q[1] * y * p + self.q[2] * p * p)
            + self.l[0] * y
            + self.l[1] * p
            + self.k
    }

    pub fn apply(&self, piece: &Piece<T>) -> Piece<T> {
        let [ma, mb, mc, md] = self.m;
        let [t0, t1] = self.t;
        let (r, a) = (piece.r, piece.a);
        let alpha = ma + mb * r;
        let beta = mb * a + t0;
        let gamma = mc + md * r;
        let r2 = gamma / alpha;
        let a2 = (a + (ma * t1 - mc * t0) - r * (md * t0 - mb * t1)) / alpha;
        let start = if piece.start.is_finite() { alpha * piece.start + beta } else { piece.start };
        let y0 = -beta / alpha;
        let b2 = piece.value(y0) + self.value(y0, piece.slope(y0));
        Piece { start, r: r2, a: a2, b: b2 }
    }

    /// Growth of the linear part; large values lose precision in `apply`.
    pub fn growth(&self) -> T {
        self.m[0].abs().max(self.m[3].abs())
    }
}
