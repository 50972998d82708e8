//! Positive complexity functionals, selected by name at runtime.
//!
//! A spec string is `name` or `name:argument`. The built-in registry knows
//! `i:<multicurve>` (intersection with a multicurve) and `triweight` (total
//! weight against the co-core arc system).

use num_traits::Zero;

use crate::classes::{self, ArcClass, Class, CurveClass, DoubledClass, MultiClass, Weight};
use crate::error::{Error, Result};
use crate::intersect;
use crate::surface::RibbonSurface;

pub trait Functional: Send + Sync {
    /// The spec string this functional was built from.
    fn spec(&self) -> &str;

    fn eval_curve(&self, surface: &RibbonSurface, c: &CurveClass) -> Result<Weight>;

    fn eval_arc(&self, surface: &RibbonSurface, a: &ArcClass) -> Result<Weight>;

    /// Whether this functional may drive a counting run.
    fn is_certified_filling(&self) -> bool;

    /// The multicurve being paired against, for intersection functionals.
    fn multicurve(&self) -> Option<&MultiClass> {
        None
    }

    fn eval(&self, surface: &RibbonSurface, x: &Class) -> Result<Weight> {
        match x {
            Class::Curve(c) => self.eval_curve(surface, c),
            Class::Arc(a) => self.eval_arc(surface, a),
        }
    }

    fn eval_multi(&self, surface: &RibbonSurface, x: &MultiClass) -> Result<Weight> {
        let mut total = Weight::zero();
        for (c, w) in x.terms() {
            total += self.eval(surface, c)? * w;
        }
        Ok(total)
    }

    /// Value on the doubled class: twice the value on the surface.
    fn eval_doubled(&self, surface: &RibbonSurface, x: &DoubledClass) -> Result<Weight> {
        Ok(self.eval_multi(surface, x.base())? * Weight::from_integer(2))
    }
}

/// Multicurves certified as filling, per preset.
///
/// Each entry is a set of simple curves in minimal position whose union is
/// a graph with `V` crossings and `2V` edges, so `χ(graph) = -V`. When this
/// equals `χ(Σ)` the complement has no disk components beyond boundary
/// annuli, and when each complementary piece was checked by hand to be a
/// boundary annulus the union fills:
///
/// - S_1_1 `a+b`: one crossing; cutting along `a` leaves an annulus pair
///   joined by the arc `b`, i.e. one boundary annulus.
/// - S_1_1 `a+b+ab`: adds a third curve to the above, still filling.
/// - S_0_4 `bc+ca`: two crossings, `χ = -2`; four boundary annuli.
/// - S_1_2 `a+b+ac`: `a` and `ac` cut off two pairs of pants and `b` cuts
///   each into a boundary annulus.
pub const FILLING_REGISTRY: &[(&str, &[&str])] = &[
    ("S_1_1", &["a+b", "a+b+ab"]),
    ("S_0_4", &["bc+ca"]),
    ("S_1_2", &["a+b+ac"]),
];

/// The registered filling multicurves of a preset, parsed.
pub fn filling_multicurves(surface: &RibbonSurface) -> Result<Vec<MultiClass>> {
    FILLING_REGISTRY
        .iter()
        .filter(|(name, _)| *name == surface.name())
        .flat_map(|(_, list)| list.iter())
        .map(|text| MultiClass::parse(surface, text))
        .collect()
}

pub fn is_registered_filling(surface: &RibbonSurface, mu: &MultiClass) -> Result<bool> {
    Ok(filling_multicurves(surface)?.iter().any(|m| m == mu))
}

pub struct IntersectionFunctional {
    spec: String,
    mu: MultiClass,
    filling: bool,
}

impl IntersectionFunctional {
    pub fn new(surface: &RibbonSurface, literal: &str) -> Result<Self> {
        let mu = MultiClass::parse(surface, literal)?;
        if mu.kind() != classes::Kind::Multicurve {
            return Err(Error::Config(format!("i:{literal} must pair against a multicurve")));
        }
        let filling = is_registered_filling(surface, &mu)?;
        Ok(IntersectionFunctional { spec: format!("i:{mu}"), mu, filling })
    }
}

impl Functional for IntersectionFunctional {
    fn spec(&self) -> &str {
        &self.spec
    }

    fn eval_curve(&self, surface: &RibbonSurface, c: &CurveClass) -> Result<Weight> {
        let x = MultiClass::single(Class::Curve(c.clone()), Weight::from_integer(1))?;
        intersect::i_multi(surface, &x, &self.mu)
    }

    fn eval_arc(&self, surface: &RibbonSurface, a: &ArcClass) -> Result<Weight> {
        let mut total = Weight::zero();
        for (c, w) in self.mu.terms() {
            let v = c.as_curve().expect("multicurve");
            total += Weight::from_integer(intersect::i_arc_curve(surface, a, v)? as i64) * w;
        }
        Ok(total)
    }

    fn is_certified_filling(&self) -> bool {
        self.filling
    }

    fn multicurve(&self) -> Option<&MultiClass> {
        Some(&self.mu)
    }
}

/// Total intersection with the co-core arc system.
///
/// On curves this is the cyclically reduced word length, since the co-cores
/// cut the surface into a disk. Arc-arc pairings are not available, so an
/// arc is weighted by half the value on its image curve under the arc map.
pub struct TriWeight;

impl Functional for TriWeight {
    fn spec(&self) -> &str {
        "triweight"
    }

    fn eval_curve(&self, _surface: &RibbonSurface, c: &CurveClass) -> Result<Weight> {
        Ok(Weight::from_integer(c.len() as i64))
    }

    fn eval_arc(&self, surface: &RibbonSurface, a: &ArcClass) -> Result<Weight> {
        let image = classes::i_map_arc(surface, a);
        Ok(Weight::new(image.len() as i64, 2))
    }

    fn is_certified_filling(&self) -> bool {
        true
    }
}

type Factory = fn(&RibbonSurface, Option<&str>) -> Result<Box<dyn Functional>>;

/// Name-keyed registry of functional constructors.
pub struct FunctionalRegistry {
    entries: Vec<(&'static str, Factory)>,
}

impl Default for FunctionalRegistry {
    fn default() -> Self {
        let mut r = FunctionalRegistry { entries: Vec::new() };
        r.register("i", |s, arg| {
            let arg = arg.ok_or_else(|| Error::Config("i needs a multicurve, as in i:a+b".into()))?;
            Ok(Box::new(IntersectionFunctional::new(s, arg)?))
        });
        r.register("triweight", |_, arg| match arg {
            None => Ok(Box::new(TriWeight)),
            Some(a) => Err(Error::Config(format!("triweight takes no argument, got {a:?}"))),
        });
        r
    }
}

impl FunctionalRegistry {
    pub fn empty() -> Self {
        FunctionalRegistry { entries: Vec::new() }
    }

    /// Registers (or replaces) a constructor under `name`.
    pub fn register(&mut self, name: &'static str, factory: Factory) {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, factory));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn build(&self, surface: &RibbonSurface, spec: &str) -> Result<Box<dyn Functional>> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (spec.trim(), None),
        };
        let factory = self
            .entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::Config(format!("unknown functional {name:?}")))?;
        factory(surface, arg)
    }
}

/// Builds a functional from the default registry.
pub fn build(surface: &RibbonSurface, spec: &str) -> Result<Box<dyn Functional>> {
    FunctionalRegistry::default().build(surface, spec)
}
