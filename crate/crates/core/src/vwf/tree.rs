//! Persistent treap of VWF pieces keyed by breakpoint, with lazy lift and
//! range-add tags.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::tag::Tag;
use super::{check_conductance, gap_tol, Piece, Vwf};

/// Tags whose linear part grows beyond this are flushed to the leaves.
const GROWTH_LIMIT: f64 = 1e4;

type Link<T> = Option<Arc<Node<T>>>;

#[derive(Debug, Clone)]
struct Node<T> {
    piece: Piece<T>,
    prio: u64,
    size: usize,
    tag: Option<Tag<T>>,
    left: Link<T>,
    right: Link<T>,
}

fn size<T>(link: &Link<T>) -> usize {
    link.as_ref().map_or(0, |n| n.size)
}

fn update<T>(n: &mut Node<T>) {
    n.size = 1 + size(&n.left) + size(&n.right);
}

fn apply<T: Scalar>(link: &mut Link<T>, tag: &Tag<T>) {
    if let Some(rc) = link {
        let n = Arc::make_mut(rc);
        n.piece = tag.apply(&n.piece);
        if n.left.is_some() || n.right.is_some() {
            let composed = match &n.tag {
                Some(old) => old.then(tag),
                None => *tag,
            };
            let flush = composed.growth() > T::lit(GROWTH_LIMIT);
            n.tag = Some(composed);
            if flush {
                push(n);
            }
        }
    }
}

fn push<T: Scalar>(n: &mut Node<T>) {
    if let Some(tag) = n.tag.take() {
        apply(&mut n.left, &tag);
        apply(&mut n.right, &tag);
    }
}

/// Keys `< x` to the left, `>= x` to the right.
fn split<T: Scalar>(link: Link<T>, x: T) -> (Link<T>, Link<T>) {
    match link {
        None => (None, None),
        Some(mut rc) => {
            let n = Arc::make_mut(&mut rc);
            push(n);
            if n.piece.start < x {
                let (l, r) = split(n.right.take(), x);
                n.right = l;
                update(n);
                (Some(rc), r)
            } else {
                let (l, r) = split(n.left.take(), x);
                n.left = r;
                update(n);
                (l, Some(rc))
            }
        }
    }
}

fn merge<T: Scalar>(a: Link<T>, b: Link<T>) -> Link<T> {
    match (a, b) {
        (None, b) => b,
        (a, None) => a,
        (Some(mut ra), Some(mut rb)) => {
            if ra.prio >= rb.prio {
                let n = Arc::make_mut(&mut ra);
                push(n);
                n.right = merge(n.right.take(), Some(rb));
                update(n);
                Some(ra)
            } else {
                let n = Arc::make_mut(&mut rb);
                push(n);
                n.left = merge(Some(ra), n.left.take());
                update(n);
                Some(rb)
            }
        }
    }
}

fn set_leftmost_start<T: Scalar>(link: &mut Link<T>, start: T) {
    if let Some(rc) = link {
        let n = Arc::make_mut(rc);
        push(n);
        if n.left.is_some() {
            set_leftmost_start(&mut n.left, start);
        } else {
            n.piece.start = start;
        }
    }
}

fn compose<T: Scalar>(inner: &Option<Tag<T>>, outer: &Option<Tag<T>>) -> Option<Tag<T>> {
    match (inner, outer) {
        (None, o) => *o,
        (i, None) => *i,
        (Some(i), Some(o)) => Some(i.then(o)),
    }
}

fn current<T: Scalar>(n: &Node<T>, acc: &Option<Tag<T>>) -> Piece<T> {
    match acc {
        Some(t) => t.apply(&n.piece),
        None => n.piece,
    }
}

fn collect<T: Scalar>(link: &Link<T>, acc: &Option<Tag<T>>, out: &mut Vec<Piece<T>>) {
    if let Some(n) = link {
        let below = compose(&n.tag, acc);
        collect(&n.left, &below, out);
        out.push(current(n, acc));
        collect(&n.right, &below, out);
    }
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mutable handle over a persistent piece tree.
///
/// `add` runs in `O(min(|f|, |g|) log(|f| + |g|))` and `lift` in
/// `O(log |f|)`. Cloning is `O(1)` and never observes later mutations.
#[derive(Debug, Clone)]
pub struct VwfTree<T> {
    root: Link<T>,
    rng: u64,
    last_lift: Option<(T, T)>,
}

/// Immutable view of a lifted tree, retaining what is needed to recover the
/// minimiser of the lift.
#[derive(Debug, Clone)]
pub struct VwfSnapshot<T> {
    tree: VwfTree<T>,
}

impl<T: Scalar> VwfTree<T> {
    pub fn from_vwf(f: &Vwf<T>) -> Self {
        Self::from_vwf_seeded(f, 0)
    }

    pub fn from_vwf_seeded(f: &Vwf<T>, seed: u64) -> Self {
        let mut rng = seed ^ 0x5851_F42D_4C95_7F2D;
        let mut stack: Vec<Node<T>> = Vec::new();
        for p in f.pieces() {
            let mut node = Node { piece: *p, prio: splitmix(&mut rng), size: 1, tag: None, left: None, right: None };
            let mut last: Link<T> = None;
            while stack.last().is_some_and(|t| t.prio < node.prio) {
                let mut t = stack.pop().unwrap();
                t.right = last;
                update(&mut t);
                last = Some(Arc::new(t));
            }
            node.left = last;
            update(&mut node);
            stack.push(node);
        }
        let mut last: Link<T> = None;
        while let Some(mut t) = stack.pop() {
            t.right = last;
            update(&mut t);
            last = Some(Arc::new(t));
        }
        VwfTree { root: last, rng, last_lift: None }
    }

    pub fn len(&self) -> usize {
        size(&self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    fn leftmost(&self) -> Piece<T> {
        let mut acc: Option<Tag<T>> = None;
        let mut cur = self.root.as_ref().expect("tree is never empty");
        loop {
            match &cur.left {
                Some(l) => {
                    acc = compose(&cur.tag, &acc);
                    cur = l;
                }
                None => return current(cur, &acc),
            }
        }
    }

    pub fn domain_start(&self) -> T {
        self.leftmost().start
    }

    /// Piece with the largest start `<= x`.
    fn floor(&self, x: T) -> Option<Piece<T>> {
        let mut acc: Option<Tag<T>> = None;
        let mut cur = &self.root;
        let mut best = None;
        while let Some(n) = cur {
            let p = current(n, &acc);
            acc = compose(&n.tag, &acc);
            if p.start <= x {
                best = Some(p);
                cur = &n.right;
            } else {
                cur = &n.left;
            }
        }
        best
    }

    /// Piece with the smallest start `> x`.
    fn ceil_strict(&self, x: T) -> Option<Piece<T>> {
        let mut acc: Option<Tag<T>> = None;
        let mut cur = &self.root;
        let mut best = None;
        while let Some(n) = cur {
            let p = current(n, &acc);
            acc = compose(&n.tag, &acc);
            if p.start > x {
                best = Some(p);
                cur = &n.left;
            } else {
                cur = &n.right;
            }
        }
        best
    }

    fn piece_at(&self, x: T) -> Result<Piece<T>> {
        if x.is_nan() {
            return Err(Error::Domain("NaN argument".into()));
        }
        self.floor(x).ok_or_else(|| Error::Domain(format!("{x} is left of the domain start {}", self.domain_start())))
    }

    pub fn eval(&self, x: T) -> Result<T> {
        Ok(self.piece_at(x)?.value(x))
    }

    pub fn slope(&self, x: T) -> Result<T> {
        Ok(self.piece_at(x)?.slope(x))
    }

    pub fn pieces(&self) -> Vec<Piece<T>> {
        let mut out = Vec::with_capacity(self.len());
        collect(&self.root, &None, &mut out);
        out
    }

    /// Flattens the tree, dropping pieces that rounding collapsed to zero
    /// width.
    pub fn to_vwf(&self) -> Vwf<T> {
        let mut out: Vec<Piece<T>> = Vec::with_capacity(self.len());
        for p in self.pieces() {
            match out.last_mut() {
                Some(last) if last.start.is_finite() && p.start <= last.start + gap_tol(p.start) => {
                    *last = Piece { start: last.start, ..p };
                }
                _ => out.push(p),
            }
        }
        Vwf::from_pieces_unchecked(out)
    }

    fn insert(&mut self, piece: Piece<T>) {
        let node = Node { piece, prio: splitmix(&mut self.rng), size: 1, tag: None, left: None, right: None };
        let (l, r) = split(self.root.take(), piece.start);
        self.root = merge(merge(l, Some(Arc::new(node))), r);
    }

    /// Makes `x` (or a key within the merge tolerance of it) a breakpoint
    /// and returns that key.
    fn breakpoint(&mut self, x: T) -> Result<T> {
        let pred = self.piece_at(x)?;
        let tol = gap_tol(x);
        if x - pred.start <= tol {
            return Ok(pred.start);
        }
        if let Some(succ) = self.ceil_strict(x) {
            if succ.start - x <= tol {
                return Ok(succ.start);
            }
        }
        self.insert(Piece { start: x, ..pred });
        Ok(x)
    }

    fn apply_range(&mut self, lo: T, hi: Option<T>, tag: &Tag<T>) {
        let (left, rest) = split(self.root.take(), lo);
        let (mut mid, right) = match hi {
            Some(h) => split(rest, h),
            None => (rest, None),
        };
        apply(&mut mid, tag);
        self.root = merge(merge(left, mid), right);
    }

    /// Restriction to `[lo, inf)`.
    pub fn truncate(&mut self, lo: T) -> Result<()> {
        let pred = self.piece_at(lo)?;
        if pred.start == lo {
            let (_, right) = split(self.root.take(), lo);
            self.root = right;
            return Ok(());
        }
        let (_, right) = split(self.root.take(), lo);
        self.root = right;
        let close = self.root.is_some() && self.leftmost().start - lo <= gap_tol(lo);
        if close {
            set_leftmost_start(&mut self.root, lo);
        } else {
            self.insert(Piece { start: lo, ..pred });
        }
        self.last_lift = None;
        Ok(())
    }

    /// `self += other` on the intersection of the domains. The larger of the
    /// two trees is kept and the pieces of the smaller one are inserted.
    pub fn add(&mut self, other: &VwfTree<T>) {
        if other.len() > self.len() {
            let mine = std::mem::replace(self, VwfTree { root: other.root.clone(), rng: self.rng, last_lift: None });
            self.absorb(&mine);
        } else {
            self.absorb(other);
        }
        self.last_lift = None;
    }

    fn absorb(&mut self, small: &VwfTree<T>) {
        let start = self.domain_start().max(small.domain_start());
        if start > self.domain_start() {
            self.truncate(start).expect("start lies in the domain");
        }
        let pieces = small.pieces();
        for (i, p) in pieces.iter().enumerate() {
            let lo = p.start.max(start);
            let hi = pieces.get(i + 1).map(|q| q.start);
            if hi.is_some_and(|h| h <= lo) {
                continue;
            }
            let lo = if lo > start { self.breakpoint(lo).expect("inside domain") } else { start };
            let hi = hi.map(|h| self.breakpoint(h).expect("inside domain"));
            if hi.is_some_and(|h| h <= lo) {
                continue;
            }
            self.apply_range(lo, hi, &Tag::add(p.r, p.a, p.b));
        }
    }

    /// In-place `P_c`.
    pub fn lift(&mut self, c: T) -> Result<()> {
        check_conductance(c)?;
        let first = self.leftmost();
        let s0 = first.start;
        apply(&mut self.root, &Tag::lift(c));
        if s0.is_finite() {
            let v0 = first.value(s0);
            let piece = Piece::new(T::neg_infinity(), c, -c * s0, T::half() * c * s0 * s0 + v0);
            let node = Node { piece, prio: splitmix(&mut self.rng), size: 1, tag: None, left: None, right: None };
            self.root = merge(Some(Arc::new(node)), self.root.take());
        }
        self.last_lift = Some((c, s0));
        Ok(())
    }

    /// Minimiser of `c/2 (x - y)^2 + f(y)` where `f` is the function before
    /// the most recent `lift(c)`.
    pub fn optimal_x(&self, x: T) -> Result<T> {
        let (c, s0) = self
            .last_lift
            .ok_or_else(|| Error::StaleHandle("optimal_x requires the last operation to be a lift".into()))?;
        let y = x - self.slope(x)? / c;
        Ok(if s0.is_finite() { y.max(s0) } else { y })
    }

    pub fn snapshot(&self) -> VwfSnapshot<T> {
        VwfSnapshot { tree: self.clone() }
    }
}

impl<T: Scalar> VwfSnapshot<T> {
    pub fn eval(&self, x: T) -> Result<T> {
        self.tree.eval(x)
    }

    pub fn optimal_x(&self, x: T) -> Result<T> {
        self.tree.optimal_x(x)
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn to_vwf(&self) -> Vwf<T> {
        self.tree.to_vwf()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: &Vwf<f64>) -> Vec<f64> {
        let s = f.domain_start().max(-6.0);
        (0..80).map(|i| s + 0.1375 * i as f64).collect()
    }

    fn assert_same(tree: &VwfTree<f64>, flat: &Vwf<f64>) {
        for x in sample(flat) {
            let a = tree.eval(x).unwrap();
            let b = flat.eval(x).unwrap();
            assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "x={x} tree={a} flat={b}");
        }
    }

    fn kinked(shift: f64) -> Vwf<f64> {
        Vwf::from_profile(-2.0 + shift, 0.5, -1.0, &[(-0.5 + shift, 2.0), (1.0 + shift, 0.5)]).unwrap()
    }

    #[test]
    fn roundtrip() {
        let f = kinked(0.0);
        let t = VwfTree::from_vwf(&f);
        assert_eq!(t.len(), 3);
        assert_eq!(t.to_vwf(), f);
    }

    #[test]
    fn add_and_lift_match_flat() {
        let f = kinked(0.0);
        let g = kinked(0.3);
        let mut t = VwfTree::from_vwf(&f);
        t.add(&VwfTree::from_vwf(&g));
        let mut flat = f.add(&g);
        assert_same(&t, &flat);
        t.lift(1.5).unwrap();
        flat = flat.lift(1.5).unwrap();
        assert_same(&t, &flat);
        t.to_vwf().validate().unwrap();
    }

    #[test]
    fn snapshot_is_immutable() {
        let mut t = VwfTree::from_vwf(&kinked(0.0));
        t.lift(2.0).unwrap();
        let snap = t.snapshot();
        let before = snap.eval(0.5).unwrap();
        t.add(&VwfTree::from_vwf(&Vwf::linear(-3.0, 4.0)));
        t.lift(0.5).unwrap();
        assert_eq!(snap.eval(0.5).unwrap(), before);
    }

    #[test]
    fn optimal_x_requires_lift() {
        let mut t = VwfTree::from_vwf(&kinked(0.0));
        assert!(matches!(t.optimal_x(0.0), Err(Error::StaleHandle(_))));
        t.lift(1.0).unwrap();
        let flat = kinked(0.0);
        for x in [-5.0, -1.0, 0.0, 2.0, 8.0] {
            let y = t.optimal_x(x).unwrap();
            assert!((y - flat.optimal_x(1.0, x).unwrap()).abs() < 1e-10);
        }
        t.add(&VwfTree::from_vwf(&Vwf::linear(-9.0, 0.0)));
        assert!(t.optimal_x(0.0).is_err());
    }

    #[test]
    fn long_curved_chain_stays_accurate() {
        let leaf = Vwf::from_profile(-1.0, 0.0, 0.0, &[(0.0, 1.0), (0.5, 0.5)]).unwrap();
        let mut tree = VwfTree::from_vwf(&leaf);
        let mut flat = leaf.clone();
        for i in 0..300 {
            let own = Vwf::from_profile(-1.0, 0.0, 0.1 * (i % 3) as f64, &[(0.2, 1.0)]).unwrap();
            tree.lift(1.0).unwrap();
            flat = flat.lift(1.0).unwrap();
            tree.add(&VwfTree::from_vwf(&own));
            flat = flat.add(&own);
        }
        for x in [-1.0, -0.5, 0.0, 0.3, 1.0, 5.0] {
            let a = tree.eval(x).unwrap();
            let b = flat.eval(x).unwrap();
            assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "x={x} tree={a} flat={b}");
        }
    }
}
