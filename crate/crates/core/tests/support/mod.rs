//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the linking code in `arccount::intersect`. The
//! hyperbolic oracle realizes the surface as a Schottky group whose
//! intervals follow the germ order, and counts crossing points that fall
//! in the fundamental domain F (the region above all 2n half-disks). Every
//! crossing of two lifts lies in exactly one translate of F.

#![allow(dead_code)]

use arccount::classes::{canonical_arc, canonical_curve, ArcClass, CurveClass};
use arccount::surface::RibbonSurface;
use arccount::word::{self, Letter, Word};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const RADIUS: f64 = 0.3;

#[derive(Clone, Copy, Debug)]
struct Mobius {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Mobius {
    fn apply(self, x: f64) -> f64 {
        (self.a * x + self.b) / (self.c * x + self.d)
    }

    fn inv(self) -> Mobius {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    fn compose(self, o: Mobius) -> Mobius {
        Mobius {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

pub struct Schottky {
    gens: Vec<Mobius>,
    germs: usize,
    /// Whether the circle at each position is a closed side of F. Paired
    /// circles get opposite answers so a crossing on a side lies in
    /// exactly one translate.
    closed_side: Vec<bool>,
}

#[derive(Debug, PartialEq, Eq)]
pub enum OracleError {
    WordTooLong,
    Inconclusive(u64, u64),
}

pub const MAX_WORD: usize = 12;
pub const CURVE_DEPTH: usize = 12;
pub const ARC_DEPTH: usize = 3;

impl Schottky {
    /// The germ at ribbon position k owns D = [k - 0.3, k + 0.3]; generator
    /// x maps the outside of D_{x'} onto D_x.
    pub fn new(surface: &RibbonSurface) -> Self {
        let mut gens = vec![Mobius { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }; surface.germ_count()];
        for g in 0..surface.rank() {
            let x = Letter::gen(g);
            let px = surface.position(x.inv()) as f64;
            let qx = surface.position(x) as f64;
            let (p1, p2) = (px - RADIUS, px + RADIUS);
            let (q1, q2, m) = (qx - RADIUS, qx + RADIUS, qx);
            // p2 -> 0, p1 -> inf, inf -> 1
            let dom = Mobius { a: 1.0, b: -p2, c: 1.0, d: -p1 };
            // q1 -> 0, q2 -> inf, m -> 1
            let tgt = Mobius { a: m - q2, b: -q1 * (m - q2), c: m - q1, d: -q2 * (m - q1) };
            let mx = tgt.inv().compose(dom);
            assert!(mx.a * mx.d - mx.b * mx.c > 0.0);
            gens[x.code() as usize] = mx;
            gens[x.inv().code() as usize] = mx.inv();
        }
        let closed_side = surface.ribbon_order().iter().map(|l| l.code() % 2 == 0).collect();
        Schottky { gens, germs: surface.germ_count(), closed_side }
    }

    /// `w · x`, applied one letter at a time from the right.
    fn act(&self, w: &[Letter], x: f64) -> f64 {
        w.iter().rev().fold(x, |x, l| self.gens[l.code() as usize].apply(x))
    }

    fn attracting(&self, core: &[Letter]) -> f64 {
        // -0.5 lies outside every interval, so each pass contracts.
        let mut x = -0.5;
        for _ in 0..400 {
            let y = self.act(core, x);
            if y == x {
                break;
            }
            x = y;
        }
        x
    }

    /// (repelling, attracting) endpoints of the axis of a nontrivial element.
    pub fn endpoints(&self, g: &[Letter]) -> (f64, f64) {
        let (t, core) = word::cyclic_split(&word::reduce(g.iter().copied()));
        let att = self.attracting(&core);
        let rep = self.attracting(&word::inverse(&core));
        (self.act(&t, rep), self.act(&t, att))
    }

    fn in_domain(&self, z: (f64, f64)) -> bool {
        z.1 > 0.0
            && (0..self.germs).all(|k| {
                let d = ((z.0 - k as f64).powi(2) + z.1 * z.1).sqrt() - RADIUS;
                if d.abs() < 1e-9 {
                    self.closed_side[k]
                } else {
                    d > 0.0
                }
            })
    }
}

fn sorted(p: (f64, f64)) -> (f64, f64) {
    if p.0 < p.1 {
        p
    } else {
        (p.1, p.0)
    }
}

fn linked(a: (f64, f64), b: (f64, f64)) -> bool {
    let a = sorted(a);
    let inside = |x: f64| a.0 < x && x < a.1;
    inside(b.0) != inside(b.1)
}

/// Crossing point of two linked geodesics. `b` may be vertical, written
/// as `(x, inf)`.
fn crossing(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (ca, ra) = ((a.0 + a.1) / 2.0, (a.1 - a.0).abs() / 2.0);
    if b.1.is_infinite() {
        return (b.0, (ra * ra - (b.0 - ca).powi(2)).max(0.0).sqrt());
    }
    let (cb, rb) = ((b.0 + b.1) / 2.0, (b.1 - b.0).abs() / 2.0);
    let x = (ra * ra - rb * rb + cb * cb - ca * ca) / (2.0 * (cb - ca));
    let y2 = ra * ra - (x - ca) * (x - ca);
    (x, y2.max(0.0).sqrt())
}

/// Common perpendicular of two disjoint geodesics: the point pair harmonic
/// with both endpoint pairs.
fn perpendicular(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (ca, ra2) = ((a.0 + a.1) / 2.0, ((a.1 - a.0) / 2.0).powi(2));
    let (cb, rb2) = ((b.0 + b.1) / 2.0, ((b.1 - b.0) / 2.0).powi(2));
    // ca + ra2/(z - ca) = cb + rb2/(z - cb), cleared of denominators
    let k = ca - cb;
    if k.abs() < 1e-12 * (1.0 + ra2 + rb2) {
        // concentric: the vertical line through the center
        return (ca, f64::INFINITY);
    }
    let qb = -k * (ca + cb) + ra2 - rb2;
    let qc = k * ca * cb - ra2 * cb + rb2 * ca;
    let disc = (qb * qb - 4.0 * k * qc).max(0.0).sqrt();
    let r1 = if qb >= 0.0 { (-qb - disc) / (2.0 * k) } else { (-qb + disc) / (2.0 * k) };
    (r1, qc / (k * r1))
}

fn check_len(words: &[&[Letter]]) -> Result<(), OracleError> {
    if words.iter().any(|w| w.len() > MAX_WORD) {
        Err(OracleError::WordTooLong)
    } else {
        Ok(())
    }
}

/// Distinct conjugates of `v` by words of length ≤ depth whose axes can
/// meet F. Any other conjugator leaves both endpoints in one interval.
fn translates_through_domain(v: &[Letter], depth: usize) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    for base in [v.to_vec(), word::inverse(v)] {
        let long = word::power(&base, (depth / base.len() + 2) as i64);
        for j in 0..=depth {
            let h = word::inverse(&long[..j]);
            let conj = word::concat(&[&h, v, &word::inverse(&h)]);
            if word::is_cyclically_reduced(&conj) && !out.contains(&conj) {
                out.push(conj);
            }
        }
    }
    out
}

fn curve_count(sch: &Schottky, u: &[Letter], v: &[Letter], depth: usize) -> u64 {
    let xs: Vec<(Word, (f64, f64))> = translates_through_domain(v, depth)
        .into_iter()
        .map(|x| {
            let e = sch.endpoints(&x);
            (x, e)
        })
        .collect();
    let mut count = 0;
    for i in 0..u.len() {
        let ui = word::rotate(u, i);
        let ui_inv = word::inverse(&ui);
        let au = sch.endpoints(&ui);
        for (x, ax) in &xs {
            if *x == ui || *x == ui_inv {
                continue;
            }
            if linked(au, *ax) && sch.in_domain(crossing(au, *ax)) {
                count += 1;
            }
        }
    }
    count
}

pub fn oracle_i_curves(surface: &RibbonSurface, u: &[Letter], v: &[Letter], depth: usize) -> Result<u64, OracleError> {
    check_len(&[u, v])?;
    let (ru, ku) = word::primitive_root(&word::cyclic_reduce(u));
    let (rv, kv) = word::primitive_root(&word::cyclic_reduce(v));
    let sch = Schottky::new(surface);
    let lo = curve_count(&sch, &ru, &rv, depth - 1);
    let hi = curve_count(&sch, &ru, &rv, depth);
    if lo != hi {
        return Err(OracleError::Inconclusive(lo, hi));
    }
    Ok(hi * (ku * kv) as u64)
}

pub fn oracle_self_intersection(surface: &RibbonSurface, u: &[Letter], depth: usize) -> Result<u64, OracleError> {
    let (r, k) = word::primitive_root(&word::cyclic_reduce(u));
    let pairs = oracle_i_curves(surface, &r, &r, depth)?;
    let k = k as u64;
    Ok(k * k * pairs / 2 + k - 1)
}

/// Translates of the axis of `v` separating the axis of `b_s` from that of
/// `w b_e w⁻¹`, found as crossings with the common perpendicular that land
/// in a translate of F within `radius` steps of the path spelled by `w`.
fn arc_count(
    sch: &Schottky,
    surface: &RibbonSurface,
    (s, e): (usize, usize),
    w: &[Letter],
    v: &[Letter],
    radius: usize,
) -> u64 {
    let bs = surface.boundary(s);
    let be = surface.boundary(e);
    let line2 = word::concat(&[w, be, &word::inverse(w)]);
    let rotations: Vec<(f64, f64)> = (0..v.len()).map(|j| sch.endpoints(&word::rotate(v, j))).collect();

    let mut anchors: Vec<Word> = (0..=w.len()).map(|k| w[..k].to_vec()).collect();
    let mut frontier = anchors.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for p in &frontier {
            for code in 0..surface.germ_count() as u8 {
                let q = word::concat(&[p, &[Letter::from_code(code)]]);
                if !anchors.contains(&q) {
                    anchors.push(q.clone());
                    next.push(q);
                }
            }
        }
        frontier = next;
    }

    let mut count = 0;
    for p in &anchors {
        let p_inv = word::inverse(p);
        let l1 = sch.endpoints(&word::concat(&[&p_inv, bs, p]));
        let l2 = sch.endpoints(&word::concat(&[&p_inv, &line2, p]));
        let sigma = perpendicular(l1, l2);
        for x in &rotations {
            if linked(*x, l1) || linked(*x, l2) {
                continue;
            }
            let xs = sorted(*x);
            let inside = |t: f64| xs.0 < t && t < xs.1;
            if inside(l1.0) != inside(l2.0) && sch.in_domain(crossing(*x, sigma)) {
                count += 1;
            }
        }
    }
    count
}

pub fn oracle_i_arc(
    surface: &RibbonSurface,
    (s, e): (usize, usize),
    w: &[Letter],
    v: &[Letter],
    depth: usize,
) -> Result<u64, OracleError> {
    check_len(&[w, v])?;
    let (rv, kv) = word::primitive_root(&word::cyclic_reduce(v));
    let sch = Schottky::new(surface);
    let lo = arc_count(&sch, surface, (s, e), w, &rv, depth - 1);
    let hi = arc_count(&sch, surface, (s, e), w, &rv, depth);
    if lo != hi {
        return Err(OracleError::Inconclusive(lo, hi));
    }
    Ok(hi * kv as u64)
}

/// Christoffel word of slope (p, q), p, q ≥ 0 coprime, built along the
/// Stern-Brocot tree: w(x ⊕ y) = w(x)·w(y).
pub fn christoffel(p: u64, q: u64) -> Word {
    let a = vec![Letter::gen(0)];
    let b = vec![Letter::gen(1)];
    if q == 0 {
        return a;
    }
    if p == 0 {
        return b;
    }
    let (mut lp, mut lq, mut lw) = (1u64, 0u64, a);
    let (mut rp, mut rq, mut rw) = (0u64, 1u64, b);
    loop {
        let (mp, mq) = (lp + rp, lq + rq);
        let mw = [lw.clone(), rw.clone()].concat();
        if (mp, mq) == (p, q) {
            return mw;
        }
        if q * mp < mq * p {
            rp = mp;
            rq = mq;
            rw = mw;
        } else {
            lp = mp;
            lq = mq;
            lw = mw;
        }
    }
}

/// Slope word for any primitive (p, q): negative q swaps b for b'.
pub fn slope_word(p: i64, q: i64) -> Word {
    let (p, q) = if p < 0 || (p == 0 && q < 0) { (-p, -q) } else { (p, q) };
    let w = christoffel(p as u64, q.unsigned_abs());
    if q < 0 {
        w.into_iter()
            .map(|l| if l.index() == 1 { l.inv() } else { l })
            .collect()
    } else {
        w
    }
}

// Random classes for comparisons

pub fn random_reduced(rng: &mut ChaCha8Rng, rank: usize, len: usize) -> Word {
    let mut w: Word = Vec::with_capacity(len);
    while w.len() < len {
        let l = Letter::from_code(rng.gen_range(0..2 * rank) as u8);
        if w.last().is_some_and(|&x| x == l.inv()) {
            continue;
        }
        w.push(l);
    }
    w
}

pub fn random_curve(rng: &mut ChaCha8Rng, s: &RibbonSurface, max: usize) -> CurveClass {
    loop {
        let len = rng.gen_range(1..=max);
        let w = random_reduced(rng, s.rank(), len);
        if let Ok(c) = canonical_curve(s, &w) {
            if !c.is_peripheral() && c.len() <= max {
                return c;
            }
        }
    }
}

pub fn random_arc(rng: &mut ChaCha8Rng, s: &RibbonSurface, max: usize) -> ArcClass {
    loop {
        let len = rng.gen_range(0..=max);
        let w = random_reduced(rng, s.rank(), len);
        let st = rng.gen_range(0..s.boundary_count());
        let en = rng.gen_range(0..s.boundary_count());
        if let Ok(a) = canonical_arc(s, st, en, &w) {
            if a.word().len() <= max {
                return a;
            }
        }
    }
}
