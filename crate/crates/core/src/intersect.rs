//! Geometric intersection numbers by linking of ideal endpoints.
//!
//! The universal cover of the ribbon graph is a planar tree; each vertex
//! inherits the germ order, so three boundary points can be oriented by
//! looking at the directions they take from their median vertex.

use num_traits::Zero;

use crate::classes::{ArcClass, Class, CurveClass, Kind, MultiClass, Weight};
use crate::error::{Error, Result};
use crate::surface::RibbonSurface;
use crate::word::{self, Letter, Word};

/// An infinite reduced word read from the base vertex.
pub trait Seq {
    fn at(&self, k: usize) -> Letter;
}

/// The eventually periodic ray `preperiod · period^∞`, normalized so that
/// equal rays are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ray {
    preperiod: Word,
    period: Word,
}

impl Ray {
    /// `per` must be nonempty and cyclically reduced.
    pub fn new(pre: &[Letter], per: &[Letter]) -> Self {
        assert!(!per.is_empty() && word::is_cyclically_reduced(per));
        let (root, _) = word::primitive_root(per);
        let m = pre.len() / root.len() + 2;
        let mut long = pre.to_vec();
        for _ in 0..m {
            long.extend_from_slice(&root);
        }
        let mut r = word::reduce(long);
        let p = root.len();
        let mut period = r.split_off(r.len() - p);
        // Absorb the longest tail of the preperiod that continues the period.
        let t = r
            .iter()
            .rev()
            .zip(period.iter().rev().cycle())
            .take_while(|(x, y)| x == y)
            .count();
        r.truncate(r.len() - t);
        period.rotate_right(t % p);
        Ray { preperiod: r, period }
    }

    pub fn preperiod(&self) -> &[Letter] {
        &self.preperiod
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    fn size(&self) -> usize {
        self.preperiod.len() + self.period.len()
    }
}

impl Seq for Ray {
    #[inline]
    fn at(&self, k: usize) -> Letter {
        if k < self.preperiod.len() {
            self.preperiod[k]
        } else {
            let p = &self.period;
            let j = k - self.preperiod.len();
            if j < p.len() {
                p[j]
            } else {
                p[j % p.len()]
            }
        }
    }
}

/// The two ideal endpoints `g^{+∞}` and `g^{-∞}` of a nontrivial element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndpointPair {
    pub attracting: Ray,
    pub repelling: Ray,
}

impl EndpointPair {
    pub fn of(g: &[Letter]) -> Result<Self> {
        let (t, core) = word::cyclic_split(&word::reduce(g.iter().copied()));
        if core.is_empty() {
            return Err(Error::NullHomotopic);
        }
        Ok(EndpointPair {
            attracting: Ray::new(&t, &core),
            repelling: Ray::new(&t, &word::inverse(&core)),
        })
    }

    pub fn links(&self, surface: &RibbonSurface, other: &EndpointPair) -> bool {
        let cap = 2 * (self.attracting.size() + self.repelling.size())
            + 2 * (other.attracting.size() + other.repelling.size());
        link(
            surface,
            &self.attracting,
            &self.repelling,
            &other.attracting,
            &other.repelling,
            cap,
        )
    }
}

/// Rotation of a cyclic word, read forward (`r^∞`) or backward (`r^{-∞}`).
struct Rot<'a> {
    word: &'a [Letter],
    start: usize,
    backward: bool,
}

impl Seq for Rot<'_> {
    #[inline]
    fn at(&self, k: usize) -> Letter {
        let n = self.word.len();
        let k = if k < n { k } else { k % n };
        if self.backward {
            let idx = if self.start > k { self.start - 1 - k } else { self.start + n - 1 - k };
            self.word[idx].inv()
        } else {
            let idx = self.start + k;
            self.word[if idx >= n { idx - n } else { idx }]
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
    Degenerate,
}

#[inline]
fn lcp<X: Seq + ?Sized, Y: Seq + ?Sized>(x: &X, y: &Y, cap: usize) -> usize {
    let mut k = 0;
    while k < cap && x.at(k) == y.at(k) {
        k += 1;
    }
    k
}

#[inline]
fn cyc(surface: &RibbonSurface, l1: Letter, l2: Letter, l3: Letter) -> i8 {
    if l1 == l2 || l2 == l3 || l1 == l3 {
        return 0;
    }
    let n = surface.germ_count();
    let p1 = surface.position(l1);
    let d2 = (surface.position(l2) + n - p1) % n;
    let d3 = (surface.position(l3) + n - p1) % n;
    if d2 < d3 {
        1
    } else {
        -1
    }
}

fn orient3<X, Y, Z>(surface: &RibbonSurface, x: &X, y: &Y, z: &Z, cap: usize) -> i8
where
    X: Seq + ?Sized,
    Y: Seq + ?Sized,
    Z: Seq + ?Sized,
{
    let dxy = lcp(x, y, cap);
    let dyz = lcp(y, z, cap);
    let dxz = lcp(x, z, cap);
    if dxy >= cap || dyz >= cap || dxz >= cap {
        return 0;
    }
    if dxy > dyz && dxy > dxz {
        cyc(surface, x.at(dxy), y.at(dxy), x.at(dxy - 1).inv())
    } else if dyz > dxy && dyz > dxz {
        cyc(surface, y.at(dyz - 1).inv(), y.at(dyz), z.at(dyz))
    } else if dxz > dxy && dxz > dyz {
        cyc(surface, x.at(dxz), x.at(dxz - 1).inv(), z.at(dxz))
    } else {
        cyc(surface, x.at(dxy), y.at(dxy), z.at(dxy))
    }
}

/// Cyclic orientation of three ideal points. Rays that agree up to the
/// periodicity bound are treated as equal.
pub fn cyclic_orient(surface: &RibbonSurface, x: &Ray, y: &Ray, z: &Ray) -> Orientation {
    let cap = 2 * (x.size() + y.size() + z.size());
    match orient3(surface, x, y, z, cap) {
        1 => Orientation::Positive,
        -1 => Orientation::Negative,
        _ => Orientation::Degenerate,
    }
}

/// True when `{a1, a2}` separates `b1` from `b2` on the circle.
#[inline]
fn link<A1, A2, B1, B2>(surface: &RibbonSurface, a1: &A1, a2: &A2, b1: &B1, b2: &B2, cap: usize) -> bool
where
    A1: Seq + ?Sized,
    A2: Seq + ?Sized,
    B1: Seq + ?Sized,
    B2: Seq + ?Sized,
{
    let (ga1, ga2, gb1, gb2) = (a1.at(0), a2.at(0), b1.at(0), b2.at(0));
    if ga1 != ga2 && gb1 != gb2 && ga1 != gb1 && ga1 != gb2 && ga2 != gb1 && ga2 != gb2 {
        // Four distinct germs at the base vertex: no descent needed.
        return cyc(surface, ga1, gb1, ga2) != cyc(surface, ga1, gb2, ga2);
    }
    let o1 = orient3(surface, a1, b1, a2, cap);
    if o1 == 0 {
        return false;
    }
    let o2 = orient3(surface, a1, b2, a2, cap);
    o2 != 0 && o1 != o2
}

// Slice versions of the above for the hot loops. Every ray is materialized
// far enough that agreeing up to the end of the shorter slice means the two
// rays agree past the periodicity bound, which is the degenerate case.

#[inline]
fn lcp_s(x: &[Letter], y: &[Letter]) -> usize {
    x.iter().zip(y).take_while(|(a, b)| a == b).count()
}

fn orient3_s(surface: &RibbonSurface, x: &[Letter], y: &[Letter], z: &[Letter]) -> i8 {
    let dxy = lcp_s(x, y);
    let dyz = lcp_s(y, z);
    let dxz = lcp_s(x, z);
    if dxy >= x.len().min(y.len()) || dyz >= y.len().min(z.len()) || dxz >= x.len().min(z.len()) {
        return 0;
    }
    if dxy > dyz && dxy > dxz {
        cyc(surface, x[dxy], y[dxy], x[dxy - 1].inv())
    } else if dyz > dxy && dyz > dxz {
        cyc(surface, y[dyz - 1].inv(), y[dyz], z[dyz])
    } else if dxz > dxy && dxz > dyz {
        cyc(surface, x[dxz], x[dxz - 1].inv(), z[dxz])
    } else {
        cyc(surface, x[dxy], y[dxy], z[dxy])
    }
}

#[inline]
fn link_s(surface: &RibbonSurface, a1: &[Letter], a2: &[Letter], b1: &[Letter], b2: &[Letter]) -> bool {
    let (ga1, ga2, gb1, gb2) = (a1[0], a2[0], b1[0], b2[0]);
    if ga1 != ga2 && gb1 != gb2 && ga1 != gb1 && ga1 != gb2 && ga2 != gb1 && ga2 != gb2 {
        return cyc(surface, ga1, gb1, ga2) != cyc(surface, ga1, gb2, ga2);
    }
    let o1 = orient3_s(surface, a1, b1, a2);
    if o1 == 0 {
        return false;
    }
    let o2 = orient3_s(surface, a1, b2, a2);
    o2 != 0 && o1 != o2
}

/// `r` repeated until it has at least `len` letters.
fn repeat_to(r: &[Letter], len: usize) -> Vec<Letter> {
    r.iter().copied().cycle().take(len.max(r.len())).collect()
}

/// Forward and backward rays of every rotation of a cyclic word, each of
/// length `len`.
struct Rotations {
    fwd: Vec<Letter>,
    back: Vec<Letter>,
    n: usize,
    len: usize,
}

impl Rotations {
    fn new(r: &[Letter], len: usize) -> Self {
        let n = r.len();
        Rotations {
            fwd: repeat_to(r, n + len),
            back: repeat_to(&word::inverse(r), n + len),
            n,
            len,
        }
    }

    #[inline]
    fn fwd(&self, j: usize) -> &[Letter] {
        &self.fwd[j..j + self.len]
    }

    #[inline]
    fn back(&self, j: usize) -> &[Letter] {
        let s = if j == 0 { 0 } else { self.n - j };
        &self.back[s..s + self.len]
    }
}

/// Ordered pairs of axes through the base vertex that link, each pair
/// counted at the first shared vertex along the first axis.
fn linked_pairs(surface: &RibbonSurface, r1: &[Letter], r2: &[Letter]) -> u64 {
    let (n1, n2) = (r1.len(), r2.len());
    let cap = 2 * (n1 + n2) + 4;
    let x = Rotations::new(r1, cap);
    let y = Rotations::new(r2, cap);
    let mut count = 0;
    for i in 0..n1 {
        let (af, ab) = (x.fwd(i), x.back(i));
        let back_a = ab[0];
        for j in 0..n2 {
            let (bf, bb) = (y.fwd(j), y.back(j));
            if back_a == bf[0] || back_a == bb[0] {
                continue;
            }
            if link_s(surface, af, ab, bf, bb) {
                count += 1;
            }
        }
    }
    count
}

/// Self-intersection number of a primitive cyclically reduced word.
fn primitive_self(surface: &RibbonSurface, r: &[Letter]) -> u64 {
    let pairs = linked_pairs(surface, r, r);
    debug_assert!(pairs % 2 == 0);
    pairs / 2
}

pub fn self_intersection(surface: &RibbonSurface, u: &CurveClass) -> u64 {
    let (r, k) = word::primitive_root(u.word());
    let k = k as u64;
    k * k * primitive_self(surface, &r) + (k - 1)
}

/// Geometric intersection of two curve classes. For equal classes this is
/// the pairing of two parallel copies, twice the self-intersection number
/// when the class is primitive.
pub fn i_curves(surface: &RibbonSurface, u: &CurveClass, v: &CurveClass) -> u64 {
    let (ru, ku) = word::primitive_root(u.word());
    let (rv, kv) = word::primitive_root(v.word());
    let mult = (ku * kv) as u64;
    if word::canonical_cyclic(&ru) == word::canonical_cyclic(&rv) {
        return 2 * primitive_self(surface, &ru) * mult;
    }
    linked_pairs(surface, &ru, &rv) * mult
}

/// The geodesic from `b_s^∞` to `w·b_e^∞`, indexed so that vertex 0 is the
/// point where the two rays diverge.
struct Bridge<'a> {
    bs: &'a [Letter],
    te: Ray,
    c: usize,
}

impl Bridge<'_> {
    /// Letter from vertex `k` to vertex `k + 1`.
    #[inline]
    fn letter(&self, k: i64) -> Letter {
        if k >= 0 {
            self.te.at(self.c + k as usize)
        } else {
            let n = self.bs.len();
            self.bs[(self.c + (-k - 1) as usize) % n].inv()
        }
    }
}

/// Minimal number of crossings between an arc and a non-peripheral curve:
/// the number of axis translates of `v` separating the two boundary lifts
/// joined by a lift of the arc.
pub fn i_arc_curve(surface: &RibbonSurface, arc: &ArcClass, v: &CurveClass) -> Result<u64> {
    if v.is_peripheral() {
        return Err(Error::Peripheral(v.to_string()));
    }
    let bs = surface.boundary(arc.start());
    let be = surface.boundary(arc.end());
    let w = arc.word();
    let (rv, kv) = word::primitive_root(v.word());

    let ts = Rot { word: bs, start: 0, backward: false };
    let te = Ray::new(w, be);
    let cap = 2 * (te.size() + bs.len() + be.len() + rv.len()) + 16;
    let c = lcp(&ts, &te, cap);
    if c >= cap {
        return Err(Error::Inessential(arc.to_string()));
    }
    let zs = if c == 0 {
        let bs_back = Rot { word: bs, start: 0, backward: true };
        lcp(&te, &bs_back, cap)
    } else {
        0
    };
    let lo = -((bs.len() + be.len()) as i64) - 2;
    let hi = (zs as i64)
        .max(te.preperiod().len() as i64 + be.len() as i64 - c as i64)
        .max(0)
        + 1;
    let bridge = Bridge { bs, te, c };

    // Bridge letters for vertices in [first, last); both ends run far into
    // the periodic tails.
    let n = rv.len();
    let ext = 2 * (n + bs.len() + be.len()) + 8;
    let first = lo - ext as i64;
    let last = hi + ext as i64 + 1;
    let line: Vec<Letter> = (first..last).map(|k| bridge.letter(k)).collect();
    let line_inv = word::inverse(&line);
    let span = line.len();
    let x = Rotations::new(&rv, span + 1);

    let mut count = 0u64;
    for i in lo..=hi {
        let at = (i - first) as usize;
        let to_end = &line[at..];
        let to_start = &line_inv[span - at..];
        let (g_fwd, g_back) = (to_end[0], to_start[0]);
        for j in 0..n {
            let xb = x.back(j);
            let back_x = xb[0];
            if (back_x == g_fwd && i < hi) || (back_x == g_back && i > lo) {
                continue;
            }
            if link_s(surface, x.fwd(j), xb, to_end, to_start) {
                count += 1;
            }
        }
    }
    Ok(count * kv as u64)
}

/// Intersection of two classes; arc-arc pairs are not supported.
pub fn i_class(surface: &RibbonSurface, x: &Class, y: &Class) -> Result<u64> {
    match (x, y) {
        (Class::Curve(u), Class::Curve(v)) => Ok(i_curves(surface, u, v)),
        (Class::Arc(a), Class::Curve(v)) | (Class::Curve(v), Class::Arc(a)) => i_arc_curve(surface, a, v),
        (Class::Arc(_), Class::Arc(_)) => Err(Error::ArcArcPairing),
    }
}

/// Bilinear extension over weighted multiclasses.
pub fn i_multi(surface: &RibbonSurface, x: &MultiClass, y: &MultiClass) -> Result<Weight> {
    if x.kind() == Kind::Multiarc && y.kind() == Kind::Multiarc {
        return Err(Error::ArcArcPairing);
    }
    let mut total = Weight::zero();
    for (cx, wx) in x.terms() {
        for (cy, wy) in y.terms() {
            let i = i_class(surface, cx, cy)?;
            total += wx * wy * Weight::from_integer(i as i64);
        }
    }
    Ok(total)
}

/// Pairing of doubled classes, defined as twice the pairing on the surface.
pub fn i_doubled(
    surface: &RibbonSurface,
    x: &crate::classes::DoubledClass,
    y: &crate::classes::DoubledClass,
) -> Result<Weight> {
    Ok(i_multi(surface, x.base(), y.base())? * Weight::from_integer(2))
}

/// A multicurve is simple when its components are non-peripheral, simple,
/// and pairwise disjoint.
pub fn is_simple(surface: &RibbonSurface, x: &MultiClass) -> bool {
    if x.kind() != Kind::Multicurve {
        return false;
    }
    let curves: Vec<&CurveClass> = x.terms().filter_map(|(c, _)| c.as_curve()).collect();
    for (k, u) in curves.iter().enumerate() {
        if u.is_peripheral() || self_intersection(surface, u) != 0 {
            return false;
        }
        if curves[k + 1..].iter().any(|v| i_curves(surface, u, v) != 0) {
            return false;
        }
    }
    true
}
