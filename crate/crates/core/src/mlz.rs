//! Integral simple multicurves by coordinates, and lattice counts of
//! Thurston balls.
//!
//! On the complexity-one presets every integral simple multicurve is `c·γ`
//! for one simple curve `γ`, so a chart coordinate is a weight `c ≥ 1` and
//! a primitive slope `(p, q)` taken up to sign.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::{canonical_curve, Class, CurveClass, MultiClass, Weight};
use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::mcg::{self, BoundaryConvention, MCGAutomorphism};
use crate::surface::RibbonSurface;
use crate::word::{Letter, Word};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
}

impl Slope {
    pub fn norm(self) -> i64 {
        self.p.abs() + self.q.abs()
    }

    /// Primitive and in the `p > 0` or `(0, 1)` half plane.
    pub fn is_normalized(self) -> bool {
        self.p.gcd(&self.q) == 1 && (self.p > 0 || (self.p == 0 && self.q == 1))
    }

    /// All normalized slopes with `|p| + |q| <= n`, in a fixed order.
    pub fn all_up_to(n: i64) -> Vec<Slope> {
        let mut out = Vec::new();
        if n >= 1 {
            out.push(Slope { p: 0, q: 1 });
        }
        for p in 1..=n {
            for q in -(n - p)..=(n - p) {
                let s = Slope { p, q };
                if s.is_normalized() {
                    out.push(s);
                }
            }
        }
        out
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Coords {
    pub weight: i64,
    pub slope: Slope,
}

impl Coords {
    pub fn new(weight: i64, p: i64, q: i64) -> Self {
        Coords { weight, slope: Slope { p, q } }
    }

    pub fn norm(&self) -> i64 {
        self.weight * self.slope.norm()
    }

    pub fn validate(&self) -> Result<()> {
        let Slope { p, q } = self.slope;
        if self.weight < 1 {
            return Err(Error::InvalidCoordinates(format!("weight {} must be at least 1", self.weight)));
        }
        if p == 0 && q == 0 {
            return Err(Error::InvalidCoordinates("slope (0, 0)".into()));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::InvalidCoordinates(format!("non-primitive slope ({p}, {q})")));
        }
        if !self.slope.is_normalized() {
            return Err(Error::InvalidCoordinates(format!("slope ({p}, {q}) is not normalized up to sign")));
        }
        Ok(())
    }
}

/// A coordinate chart for the simple curves of one preset.
pub trait Chart: Send + Sync {
    fn surface_name(&self) -> &'static str;

    /// The simple curve of a normalized slope.
    fn curve(&self, surface: &RibbonSurface, slope: Slope) -> Result<CurveClass>;

    /// Curves for every normalized slope of norm at most `n`.
    fn curves_up_to(&self, surface: &RibbonSurface, n: i64) -> Result<Vec<(Slope, CurveClass)>> {
        Slope::all_up_to(n)
            .into_par_iter()
            .map(|s| Ok((s, self.curve(surface, s)?)))
            .collect()
    }
}

pub fn decode(chart: &dyn Chart, surface: &RibbonSurface, coords: Coords) -> Result<MultiClass> {
    coords.validate()?;
    if surface.name() != chart.surface_name() {
        return Err(Error::Config(format!(
            "chart for {} used on {}",
            chart.surface_name(),
            surface.name()
        )));
    }
    let curve = chart.curve(surface, coords.slope)?;
    MultiClass::single(Class::Curve(curve), Weight::from_integer(coords.weight))
}

/// S_1_1: slope `(p, q)` is the lower Christoffel word with `p` letters `a`
/// and `|q|` letters `b` (or `b'` when `q < 0`).
pub struct ChristoffelChart;

pub fn christoffel_word(p: i64, q: i64) -> Word {
    let n = p + q.abs();
    let y = if q < 0 { Letter::gen_inv(1) } else { Letter::gen(1) };
    (1..=n)
        .map(|i| {
            if (i * q.abs()) / n > ((i - 1) * q.abs()) / n {
                y
            } else {
                Letter::gen(0)
            }
        })
        .collect()
}

impl Chart for ChristoffelChart {
    fn surface_name(&self) -> &'static str {
        "S_1_1"
    }

    fn curve(&self, surface: &RibbonSurface, slope: Slope) -> Result<CurveClass> {
        Coords { weight: 1, slope }.validate()?;
        canonical_curve(surface, &christoffel_word(slope.p, slope.q))
    }
}

/// S_0_4: slopes `(1,0) = bc` and `(0,1) = ca`; every other slope is reached
/// along its Stern–Brocot path from `(1, ±1)` by half-twists about `bc`
/// (acting as `(p,q) ↦ (p+q,q)`) and `ca` (acting as `(p,q) ↦ (p,p+q)`).
pub struct HalfTwistChart {
    r: MCGAutomorphism,
    r_inv: MCGAutomorphism,
    l: MCGAutomorphism,
    l_inv: MCGAutomorphism,
}

impl HalfTwistChart {
    pub fn new(surface: &RibbonSurface) -> Result<Self> {
        let gens = mcg::preset_generators(surface, BoundaryConvention::Setwise)?;
        let find = |label: &str| {
            gens.iter()
                .find(|g| g.label() == label)
                .cloned()
                .ok_or_else(|| Error::Config(format!("{} has no generator {label}", surface.name())))
        };
        // Orientation of the twists is fixed so that both act on slopes by
        // the same (positive) unipotent matrices.
        let r = find("H_bc")?.inverse(surface);
        let l = find("H_ca")?;
        Ok(HalfTwistChart { r_inv: r.inverse(surface), l_inv: l.inverse(surface), r, l })
    }

    fn base(&self, surface: &RibbonSurface, negative: bool) -> Result<CurveClass> {
        let ca = CurveClass::parse(surface, "ca")?;
        Ok(if negative { self.r_inv.apply_curve(surface, &ca) } else { self.r.apply_curve(surface, &ca) })
    }

    /// Moves from `(1,1)` to `(p,|q|)`, outermost first (`true` for R).
    fn path(p: i64, q: i64) -> Vec<bool> {
        let (mut p, mut q) = (p, q.abs());
        let mut moves = Vec::new();
        while (p, q) != (1, 1) {
            if p > q {
                moves.push(true);
                p -= q;
            } else {
                moves.push(false);
                q -= p;
            }
        }
        moves
    }

    fn step(&self, surface: &RibbonSurface, c: &CurveClass, right: bool, negative: bool) -> CurveClass {
        let g = match (right, negative) {
            (true, false) => &self.r,
            (true, true) => &self.r_inv,
            (false, false) => &self.l,
            (false, true) => &self.l_inv,
        };
        g.apply_curve(surface, c)
    }
}

impl Chart for HalfTwistChart {
    fn surface_name(&self) -> &'static str {
        "S_0_4"
    }

    fn curve(&self, surface: &RibbonSurface, slope: Slope) -> Result<CurveClass> {
        Coords { weight: 1, slope }.validate()?;
        match (slope.p, slope.q) {
            (1, 0) => return CurveClass::parse(surface, "bc"),
            (0, 1) => return CurveClass::parse(surface, "ca"),
            _ => {}
        }
        let negative = slope.q < 0;
        let mut c = self.base(surface, negative)?;
        for &right in Self::path(slope.p, slope.q).iter().rev() {
            c = self.step(surface, &c, right, negative);
        }
        Ok(c)
    }

    /// Walks the Stern–Brocot tree so each curve costs one twist.
    fn curves_up_to(&self, surface: &RibbonSurface, n: i64) -> Result<Vec<(Slope, CurveClass)>> {
        let mut out = Vec::new();
        if n >= 1 {
            out.push((Slope { p: 1, q: 0 }, CurveClass::parse(surface, "bc")?));
            out.push((Slope { p: 0, q: 1 }, CurveClass::parse(surface, "ca")?));
        }
        for negative in [false, true] {
            let sign = if negative { -1 } else { 1 };
            let mut layer = vec![((1i64, 1i64), self.base(surface, negative)?)];
            while !layer.is_empty() {
                let next: Vec<((i64, i64), CurveClass)> = layer
                    .par_iter()
                    .flat_map_iter(|((p, q), c)| {
                        let mut kids = Vec::new();
                        if p + q + q <= n {
                            kids.push(((p + q, *q), self.step(surface, c, true, negative)));
                        }
                        if p + p + q <= n {
                            kids.push(((*p, p + q), self.step(surface, c, false, negative)));
                        }
                        kids
                    })
                    .collect();
                for ((p, q), c) in layer {
                    if p + q <= n {
                        out.push((Slope { p, q: sign * q }, c));
                    }
                }
                layer = next;
            }
        }
        out.sort_by_key(|(s, _)| *s);
        Ok(out)
    }
}

type ChartFactory = fn(&RibbonSurface) -> Result<Box<dyn Chart>>;

/// Charts registered by surface name.
pub struct ChartRegistry {
    entries: HashMap<&'static str, ChartFactory>,
}

impl Default for ChartRegistry {
    fn default() -> Self {
        let mut r = ChartRegistry { entries: HashMap::new() };
        r.register("S_1_1", |_| Ok(Box::new(ChristoffelChart)));
        r.register("S_0_4", |s| Ok(Box::new(HalfTwistChart::new(s)?)));
        r
    }
}

impl ChartRegistry {
    pub fn register(&mut self, surface: &'static str, factory: ChartFactory) {
        self.entries.insert(surface, factory);
    }

    pub fn build(&self, surface: &RibbonSurface) -> Result<Box<dyn Chart>> {
        let f = self
            .entries
            .get(surface.name())
            .ok_or_else(|| Error::Config(format!("no multicurve chart for {}", surface.name())))?;
        f(surface)
    }
}

pub fn chart_for(surface: &RibbonSurface) -> Result<Box<dyn Chart>> {
    ChartRegistry::default().build(surface)
}

/// Slopes of norm at most 6 on which the coercivity constant is measured.
const VALIDATION_NORM: i64 = 6;

/// Empirical constant `c0` with `F(decode(x)) >= c0·‖x‖`, measured on the
/// validation range. Refused when `F` vanishes somewhere on it.
pub fn coercivity(chart: &dyn Chart, surface: &RibbonSurface, f: &dyn Functional) -> Result<Weight> {
    let mut c0: Option<Weight> = None;
    for (s, c) in chart.curves_up_to(surface, VALIDATION_NORM)? {
        let v = f.eval_curve(surface, &c)?;
        if !v.is_positive() {
            return Err(Error::CoercivityUnavailable(format!(
                "{} vanishes on slope ({}, {})",
                f.spec(),
                s.p,
                s.q
            )));
        }
        let r = v / Weight::from_integer(s.norm());
        c0 = Some(c0.map_or(r, |m| m.min(r)));
    }
    c0.ok_or_else(|| Error::CoercivityUnavailable("empty validation range".into()))
}

/// Values of `F` on every simple curve that can reach `F <= bound`.
fn curve_values(chart: &dyn Chart, surface: &RibbonSurface, f: &dyn Functional, bound: Weight) -> Result<Vec<Weight>> {
    let c0 = coercivity(chart, surface, f)?;
    let n = (bound / c0).floor().to_integer();
    chart
        .curves_up_to(surface, n)?
        .into_par_iter()
        .map(|(s, c)| {
            let v = f.eval_curve(surface, &c)?;
            if v < c0 * Weight::from_integer(s.norm()) {
                return Err(Error::CoercivityUnavailable(format!(
                    "bound {c0} violated at slope ({}, {})",
                    s.p, s.q
                )));
            }
            Ok(v)
        })
        .collect()
}

/// Number of `c ≥ 1` with `c·v <= bound`, summed over curve values.
fn count_from_values(values: &[Weight], bound: Weight) -> u64 {
    values
        .iter()
        .map(|&v| (bound / v).floor().to_integer().max(0) as u64)
        .sum()
}

/// Exact number of integral simple multicurves with `F <= bound`. The
/// functional is evaluated on each simple curve and extended by
/// homogeneity to its multiples.
pub fn enumerate_mlz(chart: &dyn Chart, surface: &RibbonSurface, f: &dyn Functional, bound: Weight) -> Result<u64> {
    surface.require_countable()?;
    if bound.is_negative() || bound.is_zero() {
        return Ok(0);
    }
    Ok(count_from_values(&curve_values(chart, surface, f, bound)?, bound))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallCount {
    pub functional: String,
    pub exponent: u32,
    pub levels: Vec<Weight>,
    pub counts: Vec<u64>,
    pub normalized: Vec<f64>,
    /// Relative change of the normalized value from the previous level.
    pub step_gaps: Vec<f64>,
    pub cauchy_gap: f64,
}

impl BallCount {
    pub fn from_counts(functional: &str, exponent: u32, levels: Vec<Weight>, counts: Vec<u64>) -> Result<Self> {
        if levels.len() < 4 || levels.len() != counts.len() {
            return Err(Error::InsufficientData(format!(
                "need at least 4 grid points with counts, got {}",
                levels.len()
            )));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) || !levels[0].is_positive() {
            return Err(Error::Config("grid must be positive and increasing".into()));
        }
        let normalized: Vec<f64> = levels
            .iter()
            .zip(&counts)
            .map(|(l, &c)| c as f64 / l.to_f64().expect("finite").powi(exponent as i32))
            .collect();
        let step_gaps: Vec<f64> = normalized.windows(2).map(|w| ((w[1] - w[0]) / w[0]).abs()).collect();
        let cauchy_gap = step_gaps.iter().copied().fold(0.0, f64::max);
        Ok(BallCount { functional: functional.to_string(), exponent, levels, counts, normalized, step_gaps, cauchy_gap })
    }

    /// The quotable estimate: the last normalized value.
    pub fn estimate(&self) -> f64 {
        *self.normalized.last().expect("nonempty")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("L,count,normalized,cauchy_gap\n");
        for (i, (l, c)) in self.levels.iter().zip(&self.counts).enumerate() {
            let gap = if i == 0 { String::new() } else { self.step_gaps[i - 1].to_string() };
            writeln!(s, "{l},{c},{},{gap}", self.normalized[i]).expect("string write");
        }
        s
    }
}

pub fn thurston_ball_estimate(
    chart: &dyn Chart,
    surface: &RibbonSurface,
    f: &dyn Functional,
    levels: &[Weight],
) -> Result<BallCount> {
    surface.require_countable()?;
    let top = *levels
        .last()
        .ok_or_else(|| Error::InsufficientData("empty grid".into()))?;
    if levels.len() < 4 {
        return Err(Error::InsufficientData(format!("need at least 4 grid points, got {}", levels.len())));
    }
    let values = curve_values(chart, surface, f, top)?;
    let counts = levels.iter().map(|&l| count_from_values(&values, l)).collect();
    BallCount::from_counts(f.spec(), surface.invariants().growth_exponent as u32, levels.to_vec(), counts)
}
