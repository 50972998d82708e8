//! Canonical curves, arcs and weighted multiclasses.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::surface::RibbonSurface;
use crate::word::{self, Letter, Word};

pub type Weight = Rational64;

/// A free homotopy class of closed curves, stored as the least rotation of
/// the word or its inverse.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveClass {
    word: Word,
    peripheral: bool,
}

/// An arc class: the double coset `<b_s> w <b_e>` modulo orientation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcClass {
    start: usize,
    end: usize,
    word: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    Curve(CurveClass),
    Arc(ArcClass),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Multicurve,
    Multiarc,
}

/// Finite positive combination of distinct classes of one kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiClass {
    kind: Kind,
    terms: BTreeMap<Class, Weight>,
}

/// Formal image of a multiclass in the double. Never materialized as a
/// surface; every pairing and functional value is twice the base value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubledClass {
    base: MultiClass,
}

pub fn canonical_curve(surface: &RibbonSurface, raw: &[Letter]) -> Result<CurveClass> {
    let core = word::cyclic_reduce(raw);
    if core.is_empty() {
        return Err(Error::NullHomotopic);
    }
    let word = word::canonical_cyclic(&core);
    let peripheral = is_peripheral_word(surface, &word);
    Ok(CurveClass { word, peripheral })
}

fn is_peripheral_word(surface: &RibbonSurface, canonical: &[Letter]) -> bool {
    // A canonical power of a boundary word starts with the canonical
    // boundary word and repeats it.
    let n = canonical.len();
    surface.boundary_words().iter().any(|b| {
        let l = b.len();
        n % l == 0
            && canonical[..l] == word::canonical_cyclic(b)[..]
            && (l..n).all(|k| canonical[k] == canonical[k - l])
    })
}

impl CurveClass {
    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_peripheral(&self) -> bool {
        self.peripheral
    }

    /// Rejects boundary-parallel classes.
    pub fn essential(self) -> Result<Self> {
        if self.peripheral {
            Err(Error::Peripheral(word::format(&self.word)))
        } else {
            Ok(self)
        }
    }

    pub fn parse(surface: &RibbonSurface, text: &str) -> Result<Self> {
        canonical_curve(surface, &surface.parse_word(text)?)
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&word::format(&self.word))
    }
}

/// Longest common prefix of `w` with the periodic word `p^∞`.
fn lcp_periodic(w: &[Letter], p: &[Letter]) -> usize {
    w.iter()
        .zip(p.iter().cycle())
        .take_while(|(x, y)| x == y)
        .count()
}

/// Exponents `k` minimizing `|b^k w|` when `c_pos = lcp(w, (b⁻¹)^∞)` and
/// `c_neg = lcp(w, b^∞)`.
fn best_powers(c_pos: usize, c_neg: usize, period: usize) -> Vec<i64> {
    // saving(k) = 2·min(c, k|b|) - k|b| on the relevant side.
    let side = |c: usize, sign: i64| -> Vec<(i64, i64)> {
        let k = c / period;
        let mut out = vec![(k as i64 * sign, (k * period) as i64)];
        let k1 = k + 1;
        let saving = 2 * c.min(k1 * period) as i64 - (k1 * period) as i64;
        out.push((k1 as i64 * sign, saving));
        out
    };
    let mut cands = vec![(0i64, 0i64)];
    if c_pos > 0 {
        cands.extend(side(c_pos, 1));
    }
    if c_neg > 0 {
        cands.extend(side(c_neg, -1));
    }
    let best = cands.iter().map(|c| c.1).max().unwrap();
    let mut ks: Vec<i64> = cands.iter().filter(|c| c.1 == best).map(|c| c.0).collect();
    ks.sort();
    ks.dedup();
    ks
}

fn arc_word(bs: &[Letter], w: &[Letter], be: &[Letter], k: i64, m: i64) -> Word {
    let left = word::power(bs, k);
    let right = word::power(be, m);
    word::concat(&[&left, w, &right])
}

/// Minimal-length representatives of `<b_s> w <b_e>`.
fn minimal_reps(surface: &RibbonSurface, s: usize, e: usize, w: &[Letter]) -> Vec<Word> {
    let bs = surface.boundary(s);
    let be = surface.boundary(e);
    let bs_inv = word::inverse(bs);
    let w_inv = word::inverse(w);

    let cl_pos = lcp_periodic(w, &bs_inv);
    let cl_neg = lcp_periodic(w, bs);
    // w·b_e^m is the inverse of b_e^{-m}·w⁻¹, a left problem in w⁻¹.
    let cr_pos = lcp_periodic(&w_inv, &word::inverse(be));
    let cr_neg = lcp_periodic(&w_inv, be);

    let ks = best_powers(cl_pos, cl_neg, bs.len());
    let ms = best_powers(cr_pos, cr_neg, be.len());
    if cl_pos.max(cl_neg) + cr_pos.max(cr_neg) < w.len() {
        let mut out = Vec::new();
        for &k in &ks {
            for &m in &ms {
                out.push(arc_word(bs, w, be, k, -m));
            }
        }
        return out;
    }

    // Cancellations overlap: search a window exhaustively.
    let span = (w.len() / bs.len().min(be.len())) as i64 + 3;
    let mut best_len = usize::MAX;
    let mut out: Vec<Word> = Vec::new();
    for k in -span..=span {
        for m in -span..=span {
            let x = arc_word(bs, w, be, k, m);
            match x.len().cmp(&best_len) {
                std::cmp::Ordering::Less => {
                    best_len = x.len();
                    out = vec![x];
                }
                std::cmp::Ordering::Equal => out.push(x),
                std::cmp::Ordering::Greater => {}
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

pub fn canonical_arc(surface: &RibbonSurface, s: usize, e: usize, w: &[Letter]) -> Result<ArcClass> {
    let r = surface.boundary_count();
    if s >= r || e >= r {
        return Err(Error::Parse(format!("boundary index out of range for {}", surface.name())));
    }
    let w = word::reduce(w.iter().copied());
    let reps = minimal_reps(surface, s, e, &w);
    if s == e && reps.iter().any(|x| x.is_empty()) {
        return Err(Error::Inessential(format!("{s}:{e}:{}", word::format(&w))));
    }
    let best = reps
        .into_iter()
        .flat_map(|x| {
            let inv = word::inverse(&x);
            [(s, e, x), (e, s, inv)]
        })
        .min()
        .expect("at least one representative");
    Ok(ArcClass { start: best.0, end: best.1, word: best.2 })
}

impl ArcClass {
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    /// Parses `s:e:word`.
    pub fn parse(surface: &RibbonSurface, text: &str) -> Result<Self> {
        let mut parts = text.splitn(3, ':');
        let (s, e, w) = match (parts.next(), parts.next(), parts.next()) {
            (Some(s), Some(e), Some(w)) => (s, e, w),
            _ => return Err(Error::Parse(format!("expected s:e:word, got {text:?}"))),
        };
        let idx = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad boundary index {x:?}")))
        };
        canonical_arc(surface, idx(s)?, idx(e)?, &surface.parse_word(w)?)
    }
}

impl fmt::Display for ArcClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, word::format(&self.word))
    }
}

impl Class {
    pub fn parse(surface: &RibbonSurface, text: &str) -> Result<Self> {
        if text.contains(':') {
            ArcClass::parse(surface, text).map(Class::Arc)
        } else {
            CurveClass::parse(surface, text).map(Class::Curve)
        }
    }

    pub fn as_curve(&self) -> Option<&CurveClass> {
        match self {
            Class::Curve(c) => Some(c),
            Class::Arc(_) => None,
        }
    }

    pub fn as_arc(&self) -> Option<&ArcClass> {
        match self {
            Class::Arc(a) => Some(a),
            Class::Curve(_) => None,
        }
    }

    /// Compact byte key for hash sets.
    pub fn pack(&self, out: &mut Vec<u8>) {
        match self {
            Class::Curve(c) => {
                out.push(0xff);
                word::pack(&c.word, out);
            }
            Class::Arc(a) => {
                out.push(a.start as u8);
                out.push(a.end as u8);
                word::pack(&a.word, out);
            }
        }
    }

    /// 128-bit hash of the canonical form, used as a dedupe key where storing
    /// whole words would not fit in memory.
    pub fn fingerprint(&self) -> u128 {
        let mut buf = Vec::with_capacity(64);
        self.pack(&mut buf);
        let half = |salt: u64| {
            let mut h = DefaultHasher::new();
            salt.hash(&mut h);
            buf.hash(&mut h);
            h.finish()
        };
        ((half(0x9e37_79b9) as u128) << 64) | half(0x85eb_ca6b) as u128
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::Curve(c) => c.fmt(f),
            Class::Arc(a) => a.fmt(f),
        }
    }
}

impl From<CurveClass> for Class {
    fn from(c: CurveClass) -> Self {
        Class::Curve(c)
    }
}

impl From<ArcClass> for Class {
    fn from(a: ArcClass) -> Self {
        Class::Arc(a)
    }
}

/// The curve `b_s · w · b_e · w⁻¹` attached to an arc.
pub fn i_map_arc(surface: &RibbonSurface, arc: &ArcClass) -> CurveClass {
    let bs = surface.boundary(arc.start);
    let be = surface.boundary(arc.end);
    let w_inv = word::inverse(&arc.word);
    let raw = word::concat(&[bs, &arc.word, be, &w_inv]);
    canonical_curve(surface, &raw).expect("image of an essential arc is nontrivial")
}

/// The co-core of each edge: the arc crossing that edge once, running
/// through the vertex disk between the two corners beside its start germ.
/// Together they cut the surface into a disk.
pub fn cocore_arcs(surface: &RibbonSurface) -> Vec<ArcClass> {
    let n = surface.germ_count();
    (0..surface.rank())
        .map(|g| {
            let x = Letter::gen(g);
            let before = surface.ribbon_order()[(surface.position(x) + n - 1) % n];
            let (s, k1) = surface.boundary_slot(x);
            let (e, k2) = surface.boundary_slot(before);
            let w = word::concat(&[&surface.boundary(s)[..k1], &word::inverse(&surface.boundary(e)[..k2])]);
            canonical_arc(surface, s, e, &w).expect("co-cores are essential")
        })
        .collect()
}

/// Extends the arc map linearly over a multiarc.
pub fn i_map(surface: &RibbonSurface, x: &MultiClass) -> Result<MultiClass> {
    if x.kind != Kind::Multiarc {
        return Err(Error::Precondition("i_map takes arcs".into()));
    }
    let mut out = MultiClass::empty(Kind::Multicurve);
    for (c, w) in &x.terms {
        let arc = c.as_arc().expect("multiarc holds arcs");
        out.add(Class::Curve(i_map_arc(surface, arc)), *w)?;
    }
    Ok(out)
}

impl MultiClass {
    pub fn empty(kind: Kind) -> Self {
        MultiClass { kind, terms: BTreeMap::new() }
    }

    pub fn single(class: Class, weight: Weight) -> Result<Self> {
        let kind = match class {
            Class::Curve(_) => Kind::Multicurve,
            Class::Arc(_) => Kind::Multiarc,
        };
        let mut m = Self::empty(kind);
        m.add(class, weight)?;
        Ok(m)
    }

    /// Adds a positively weighted term, merging with an equal class.
    pub fn add(&mut self, class: Class, weight: Weight) -> Result<()> {
        if !weight.is_positive() {
            return Err(Error::Precondition(format!("weight {weight} is not positive")));
        }
        match (&class, self.kind) {
            (Class::Curve(c), Kind::Multicurve) => {
                if c.is_peripheral() {
                    return Err(Error::Peripheral(c.to_string()));
                }
            }
            (Class::Arc(_), Kind::Multiarc) => {}
            _ => return Err(Error::Precondition("curves and arcs cannot be mixed".into())),
        }
        *self.terms.entry(class).or_insert_with(Weight::zero) += weight;
        Ok(())
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Class, &Weight)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, c: Weight) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::Precondition(format!("scale {c} is not positive")));
        }
        Ok(MultiClass {
            kind: self.kind,
            terms: self.terms.iter().map(|(k, w)| (k.clone(), w * c)).collect(),
        })
    }

    /// Parses `2*ab + b`, `1/2*0:0:a` and similar.
    pub fn parse(surface: &RibbonSurface, text: &str) -> Result<Self> {
        let mut out: Option<MultiClass> = None;
        for term in text.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in {text:?}")));
            }
            let (weight, item) = match term.split_once('*') {
                Some((w, item)) => (parse_weight(w.trim())?, item.trim()),
                None => (Weight::from_integer(1), term),
            };
            let class = Class::parse(surface, item)?;
            match out.as_mut() {
                Some(m) => m.add(class, weight)?,
                None => out = Some(MultiClass::single(class, weight)?),
            }
        }
        out.ok_or_else(|| Error::Parse("empty multiclass".into()))
    }
}

impl fmt::Display for MultiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, w) in &self.terms {
            if !first {
                f.write_str("+")?;
            }
            first = false;
            if *w == Weight::from_integer(1) {
                write!(f, "{c}")?;
            } else {
                write!(f, "{w}*{c}")?;
            }
        }
        Ok(())
    }
}

pub fn parse_weight(text: &str) -> Result<Weight> {
    let bad = || Error::Parse(format!("bad weight {text:?}"));
    let w = match text.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Weight::new(n, d)
        }
        None => Weight::from_integer(text.parse().map_err(|_| bad())?),
    };
    Ok(w)
}

/// Hat operator into the double.
pub fn double(x: &MultiClass) -> Result<DoubledClass> {
    if x.is_empty() {
        return Err(Error::Precondition("cannot double an empty multiclass".into()));
    }
    Ok(DoubledClass { base: x.clone() })
}

impl DoubledClass {
    pub fn base(&self) -> &MultiClass {
        &self.base
    }

    /// The exchanging involution fixes every doubled class.
    pub fn is_symmetric(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::make_preset;

    fn torus() -> RibbonSurface {
        make_preset("S_1_1").unwrap()
    }

    #[test]
    fn curve_canonical_examples() {
        let s = torus();
        assert_eq!(CurveClass::parse(&s, "abb'a").unwrap().to_string(), "aa");
        assert_eq!(CurveClass::parse(&s, "a'").unwrap().to_string(), "a");
        assert!(CurveClass::parse(&s, "aba'b'").unwrap().is_peripheral());
        assert!(CurveClass::parse(&s, "bab'a'").unwrap().is_peripheral());
        assert!(!CurveClass::parse(&s, "ab").unwrap().is_peripheral());
        assert!(matches!(CurveClass::parse(&s, "aa'"), Err(Error::NullHomotopic)));
    }

    #[test]
    fn arc_canonical_examples() {
        let s = torus();
        let a = ArcClass::parse(&s, "0:0:a").unwrap();
        assert_eq!(ArcClass::parse(&s, "0:0:aba'b'a").unwrap(), a);
        assert_eq!(ArcClass::parse(&s, "0:0:a'").unwrap(), a);
        assert!(matches!(
            ArcClass::parse(&s, "0:0:aba'b'aba'b'"),
            Err(Error::Inessential(_))
        ));
    }

    #[test]
    fn i_map_example() {
        let s = torus();
        let a = ArcClass::parse(&s, "0:0:a").unwrap();
        let expected = CurveClass::parse(&s, "ba'b'aaba'b'").unwrap();
        assert_eq!(i_map_arc(&s, &a), expected);
    }

    #[test]
    fn i_map_scales_weights() {
        let s = torus();
        let x = MultiClass::parse(&s, "2*0:0:a").unwrap();
        let img = i_map(&s, &x).unwrap();
        let gamma = i_map_arc(&s, &ArcClass::parse(&s, "0:0:a").unwrap());
        assert_eq!(img, MultiClass::single(gamma.into(), Weight::from_integer(2)).unwrap());
    }

    #[test]
    fn multiclass_parsing_and_validation() {
        let s = torus();
        let m = MultiClass::parse(&s, "2*a + b + a").unwrap();
        assert_eq!(m.to_string(), "3*a+b");
        assert!(MultiClass::parse(&s, "a + 0:0:b").is_err());
        assert!(MultiClass::parse(&s, "aba'b'").is_err());
        assert!(MultiClass::parse(&s, "0*a").is_err());
        assert!(double(&MultiClass::empty(Kind::Multicurve)).is_err());
        assert!(double(&m).unwrap().is_symmetric());
    }
}
