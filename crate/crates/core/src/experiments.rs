//! Counting experiments: orbit-ball grids, exponent fits, fiber sizes of
//! the arc-to-curve map, and the randomized identity checks.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classes::{self, parse_weight, ArcClass, Class, CurveClass, MultiClass, Weight};
use crate::error::{Error, Result};
use crate::functional::{self, Functional};
use crate::intersect;
use crate::mcg::{self, BoundaryConvention, MCGAutomorphism, SubgroupSpec};
use crate::mlz::BallCount;
use crate::orbit::{self, OrbitBall, OrbitConfig};
use crate::surface::{make_preset, RibbonSurface};
use crate::word::{Letter, Word};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub surface: String,
    pub seed: String,
    /// Modulus of the homology-kernel subgroup; `None` for the full group.
    pub gamma_mod: Option<u32>,
    pub functional: String,
    pub grid: Vec<Weight>,
    pub slack: Weight,
    pub boundary_convention: BoundaryConvention,
    #[serde(skip)]
    pub outdir: PathBuf,
    /// Thread count (0 = default pool). Not part of the result.
    #[serde(skip)]
    pub workers: usize,
}

/// Equality ignores `outdir` and `workers`, which never affect results.
impl PartialEq for ExperimentConfig {
    fn eq(&self, o: &Self) -> bool {
        (&self.surface, &self.seed, self.gamma_mod, &self.functional, &self.grid, self.slack)
            == (&o.surface, &o.seed, o.gamma_mod, &o.functional, &o.grid, o.slack)
            && self.boundary_convention == o.boundary_convention
    }
}

impl ExperimentConfig {
    pub fn new(surface: &str, seed: &str, functional: &str, grid: Vec<Weight>) -> Self {
        ExperimentConfig {
            surface: surface.to_string(),
            seed: seed.to_string(),
            gamma_mod: None,
            functional: functional.to_string(),
            grid,
            slack: Weight::from_integer(1),
            boundary_convention: BoundaryConvention::default(),
            outdir: PathBuf::from("results"),
            workers: 0,
        }
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "surface" => self.surface = value.to_string(),
            "seed" => self.seed = value.to_string(),
            "gamma_mod" => self.gamma_mod = parse_gamma(value)?,
            "functional" => self.functional = value.to_string(),
            "grid" => self.grid = parse_grid(value)?,
            "slack" => self.slack = parse_weight(value)?,
            "outdir" => self.outdir = PathBuf::from(value),
            "boundary_convention" => self.boundary_convention = value.parse()?,
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Parses a flat `key=value` file body; `#` starts a comment.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::new("", "", "", Vec::new());
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", n + 1)))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_kv(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [("surface", &self.surface), ("seed", &self.seed), ("functional", &self.functional)] {
            if v.is_empty() {
                return Err(Error::Config(format!("missing {key}")));
            }
        }
        if self.grid.is_empty() || self.grid.windows(2).any(|w| w[0] >= w[1]) || !self.grid[0].is_positive() {
            return Err(Error::Config("grid must be nonempty, positive and strictly increasing".into()));
        }
        if self.slack < Weight::from_integer(1) {
            return Err(Error::Config(format!("slack must be at least 1, got {}", self.slack)));
        }
        if self.gamma_mod.is_some_and(|m| m < 2) {
            return Err(Error::Config("gamma_mod must be at least 2".into()));
        }
        Ok(())
    }
}

pub fn parse_gamma(text: &str) -> Result<Option<u32>> {
    match text.trim() {
        "" | "full" | "none" => Ok(None),
        t => t
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("bad gamma_mod {t:?}"))),
    }
}

/// A comma list (`64,128,256`) or a geometric range `start:stop:factor`.
pub fn parse_grid(text: &str) -> Result<Vec<Weight>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts[..] {
        [start, stop, factor] => {
            let (mut x, stop, factor) = (parse_weight(start)?, parse_weight(stop)?, parse_weight(factor)?);
            if factor <= Weight::from_integer(1) || !x.is_positive() {
                return Err(Error::Config(format!("bad geometric grid {text:?}")));
            }
            let mut out = Vec::new();
            while x <= stop {
                out.push(x);
                x *= factor;
            }
            Ok(out)
        }
        [list] => list.split(',').map(parse_weight).collect(),
        _ => Err(Error::Config(format!("bad grid {text:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    /// Some count was zero and left out of the fit.
    pub zero_counts: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberStats {
    pub images: u64,
    pub interior_images: u64,
    pub margin: Weight,
    /// Fiber size to number of interior images with that size.
    pub sizes: BTreeMap<u64, u64>,
    pub k_estimate: u64,
    /// Interior images whose fiber size differs from `k_estimate`.
    pub violations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub version: String,
    pub filling: bool,
    pub exponent: u32,
    pub levels: Vec<Weight>,
    pub counts: Vec<u64>,
    pub normalized: Vec<f64>,
    pub saturated: bool,
    pub explored_states: u64,
    pub exponent_fit: Option<ExponentFit>,
    pub constant_estimate: Option<f64>,
    /// Last normalized value over the midpoint one.
    pub constant_trend: Option<f64>,
    pub fibers: Option<FiberStats>,
    pub relation_residual: Option<f64>,
    pub mu_independence_gap: Option<f64>,
}

impl ExperimentResult {
    /// Builds the derived statistics from raw counts.
    pub fn from_counts(config: ExperimentConfig, exponent: u32, counts: Vec<u64>, saturated: bool) -> Self {
        let levels = config.grid.clone();
        let normalized: Vec<f64> = levels
            .iter()
            .zip(&counts)
            .map(|(l, &c)| c as f64 / l.to_f64().expect("finite").powi(exponent as i32))
            .collect();
        let exponent_fit = fit_exponent(&levels, &counts).ok();
        let constant_estimate = normalized.last().copied();
        let constant_trend = match normalized.get(normalized.len() / 2) {
            Some(&mid) if mid > 0.0 => constant_estimate.map(|c| c / mid),
            _ => None,
        };
        ExperimentResult {
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            filling: true,
            exponent,
            levels,
            counts,
            normalized,
            saturated,
            explored_states: 0,
            exponent_fit,
            constant_estimate,
            constant_trend,
            fibers: None,
            relation_residual: None,
            mu_independence_gap: None,
        }
    }

    pub fn count_at(&self, level: Weight) -> Option<u64> {
        self.levels.iter().position(|&l| l == level).map(|i| self.counts[i])
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("L,count,normalized,saturated\n");
        for ((l, c), n) in self.levels.iter().zip(&self.counts).zip(&self.normalized) {
            writeln!(s, "{l},{c},{n},{}", self.saturated).expect("string write");
        }
        s
    }
}

/// Least squares slope of `log N` against `log L`.
pub fn fit_exponent(levels: &[Weight], counts: &[u64]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .zip(counts)
        .filter(|(_, &c)| c > 0)
        .map(|(l, &c)| (l.to_f64().expect("finite").ln(), (c as f64).ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!("{} positive counts, need 4", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(ExponentFit { slope, stderr, intercept, zero_counts: pts.len() < counts.len() })
}

/// Everything a counting run needs, resolved from a config.
pub struct Setup {
    pub surface: RibbonSurface,
    pub seed: Class,
    pub functional: Box<dyn Functional>,
    pub generators: Vec<MCGAutomorphism>,
    pub subgroup: Option<SubgroupSpec>,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let surface = make_preset(&cfg.surface)?;
        surface.require_countable()?;
        let seed = match Class::parse(&surface, &cfg.seed)? {
            Class::Curve(c) => Class::Curve(c.essential()?),
            arc => arc,
        };
        let functional = functional::build(&surface, &cfg.functional)?;
        let generators = mcg::symmetric_generators(&surface, cfg.boundary_convention)?;
        let subgroup = cfg
            .gamma_mod
            .map(|m| SubgroupSpec::homology_kernel(&surface, &generators, m))
            .transpose()?;
        Ok(Setup { surface, seed, functional, generators, subgroup })
    }

    pub fn ball(&self, cfg: &ExperimentConfig, keep_members: bool) -> Result<OrbitBall> {
        let oc = OrbitConfig {
            surface: &self.surface,
            generators: &self.generators,
            subgroup: self.subgroup.as_ref(),
            functional: self.functional.as_ref(),
            levels: cfg.grid.clone(),
            slack: cfg.slack,
            keep_members,
            workers: cfg.workers,
        };
        orbit::orbit_ball(&self.seed, &oc)
    }
}

/// Runs the orbit ball for `cfg` and returns it with the result. Fails on
/// non-filling functionals and unsaturated searches.
pub fn run_count_with_ball(cfg: &ExperimentConfig, keep_members: bool) -> Result<(ExperimentResult, OrbitBall)> {
    let setup = Setup::new(cfg)?;
    if !setup.functional.is_certified_filling() {
        return Err(Error::NotFilling(cfg.functional.clone()));
    }
    let ball = setup.ball(cfg, keep_members)?;
    if !ball.saturated {
        return Err(Error::Unsaturated(format!(
            "{} from {} on grid up to {} at slack {}",
            cfg.functional,
            cfg.seed,
            ball.bound(),
            cfg.slack
        )));
    }
    let exponent = setup.surface.invariants().growth_exponent as u32;
    let mut stored = cfg.clone();
    stored.functional = setup.functional.spec().to_string();
    let mut result = ExperimentResult::from_counts(stored, exponent, ball.counts_by_level.clone(), true);
    result.explored_states = ball.explored_states;
    Ok((result, ball))
}

pub fn run_count(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_count_with_ball(cfg, false).map(|(r, _)| r)
}

/// Slack in functional value between an image and twice its preimages:
/// `i(μ, μ)` for intersection functionals, zero otherwise.
pub fn fiber_margin(surface: &RibbonSurface, f: &dyn Functional) -> Result<Weight> {
    match f.multicurve() {
        Some(mu) => intersect::i_multi(surface, mu, mu),
        None => Ok(Weight::zero()),
    }
}

/// Groups the members of a saturated arc ball by their image curve. Only
/// images with `F(γ) <= L/2 - margin` count as interior, so that no member
/// of their fiber is cut off by the ball.
pub fn fiber_statistics(
    surface: &RibbonSurface,
    ball: &OrbitBall,
    f: &dyn Functional,
    margin: Weight,
) -> Result<FiberStats> {
    if !ball.saturated {
        return Err(Error::Unsaturated("fiber statistics need a saturated ball".into()));
    }
    let mut fibers: HashMap<u128, (CurveClass, u64)> = HashMap::new();
    for m in &ball.members {
        let arc = match &m.class {
            Some(Class::Arc(a)) => a,
            Some(Class::Curve(_)) => return Err(Error::Precondition("fiber statistics need an arc ball".into())),
            None => return Err(Error::Precondition("ball was built without members".into())),
        };
        let image = classes::i_map_arc(surface, arc);
        let fp = Class::Curve(image.clone()).fingerprint();
        fibers.entry(fp).or_insert((image, 0)).1 += 1;
    }
    let limit = ball.bound() / Weight::from_integer(2) - margin;
    let mut sizes = BTreeMap::new();
    for (image, size) in fibers.values() {
        if f.eval_curve(surface, image)? <= limit {
            *sizes.entry(*size).or_insert(0u64) += 1;
        }
    }
    let interior: u64 = sizes.values().sum();
    let (&k, &top) = sizes
        .iter()
        .max_by_key(|(size, n)| (**n, std::cmp::Reverse(**size)))
        .ok_or(Error::NoInteriorImages)?;
    Ok(FiberStats {
        images: fibers.len() as u64,
        interior_images: interior,
        margin,
        sizes,
        k_estimate: k,
        violations: interior - top,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub level: Weight,
    /// `|N_arc(L) / N_curve(2L) - k| / k`.
    pub residual: f64,
    /// `|c_arc / (k · 2^e · c_curve) - 1|` from the final normalized values.
    pub constant_residual: f64,
}

pub fn constant_relation_check(arc: &ExperimentResult, curve: &ExperimentResult, k: u64) -> Result<Relation> {
    if arc.config.gamma_mod != curve.config.gamma_mod {
        return Err(Error::GridMismatch("arc and curve runs use different subgroups".into()));
    }
    if arc.config.functional != curve.config.functional {
        return Err(Error::GridMismatch("arc and curve runs use different functionals".into()));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let two = Weight::from_integer(2);
    let (level, n_arc, n_curve) = arc
        .levels
        .iter()
        .zip(&arc.counts)
        .rev()
        .find_map(|(&l, &n)| curve.count_at(l * two).map(|m| (l, n, m)))
        .ok_or_else(|| Error::GridMismatch("no L with 2L on the curve grid".into()))?;
    if n_curve == 0 {
        return Err(Error::InsufficientData(format!("no curves at level {}", level * two)));
    }
    let k = k as f64;
    let residual = ((n_arc as f64 / n_curve as f64) - k).abs() / k;
    let c_arc = arc.constant_estimate.unwrap_or(0.0);
    let c_curve = curve.constant_estimate.unwrap_or(0.0);
    let constant_residual = (c_arc / (k * 2f64.powi(arc.exponent as i32) * c_curve) - 1.0).abs();
    Ok(Relation { level, residual, constant_residual })
}

/// Relative difference of `N(L) / (L^e · m_Thu)` between two filling
/// functionals at the largest common level.
pub fn mu_independence_check(
    first: &ExperimentResult,
    second: &ExperimentResult,
    first_ball: &BallCount,
    second_ball: &BallCount,
) -> Result<f64> {
    if first.config.seed != second.config.seed || first.config.gamma_mod != second.config.gamma_mod {
        return Err(Error::Precondition("runs must share seed and subgroup".into()));
    }
    for (r, b) in [(first, first_ball), (second, second_ball)] {
        if !r.filling {
            return Err(Error::NotFilling(r.config.functional.clone()));
        }
        if !r.saturated {
            return Err(Error::Unsaturated(r.config.functional.clone()));
        }
        if b.functional != r.config.functional {
            return Err(Error::Precondition(format!(
                "ball estimate for {} paired with run for {}",
                b.functional, r.config.functional
            )));
        }
    }
    let level = first
        .levels
        .iter()
        .rev()
        .find(|l| second.levels.contains(l))
        .copied()
        .ok_or_else(|| Error::GridMismatch("no common level".into()))?;
    let ratio = |r: &ExperimentResult, b: &BallCount| {
        let n = r.count_at(level).expect("common level") as f64;
        n / (level.to_f64().expect("finite").powi(r.exponent as i32) * b.estimate())
    };
    let (x, y) = (ratio(first, first_ball), ratio(second, second_ball));
    Ok((x - y).abs() / x)
}

/// Writes `<stem>.csv` and `<stem>.json` under `dir`.
pub fn write_result(result: &ExperimentResult, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let csv = dir.join(format!("{stem}.csv"));
    std::fs::write(&csv, result.to_csv()).map_err(io(&csv))?;
    let json = dir.join(format!("{stem}.json"));
    let body = serde_json::to_string_pretty(result).expect("results serialize");
    std::fs::write(&json, body + "\n").map_err(io(&json))?;
    Ok((csv, json))
}

pub fn read_result(path: &Path) -> Result<ExperimentResult> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Randomized identity checks

/// Simple multicurves used as sampling seeds, per preset.
const SIMPLE_SEEDS: &[(&str, &[&str])] = &[
    ("S_1_1", &["a", "b", "ab"]),
    ("S_0_4", &["bc", "ca"]),
    ("S_1_2", &["a", "b", "ac", "a+ac", "b+c'b'"]),
];

pub struct Sampler<'a> {
    surface: &'a RibbonSurface,
    gens: Vec<MCGAutomorphism>,
    rng: ChaCha8Rng,
}

impl<'a> Sampler<'a> {
    pub fn new(surface: &'a RibbonSurface, seed: u64) -> Result<Self> {
        surface.require_countable()?;
        Ok(Sampler {
            surface,
            gens: mcg::symmetric_generators(surface, BoundaryConvention::Setwise)?,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn generators(&self) -> &[MCGAutomorphism] {
        &self.gens
    }

    /// Indices into [`Self::generators`].
    pub fn word(&mut self, max_len: usize) -> Vec<usize> {
        let len = self.rng.gen_range(0..=max_len);
        (0..len).map(|_| self.rng.gen_range(0..self.gens.len())).collect()
    }

    pub fn apply_word(&self, word: &[usize], x: &Class) -> Class {
        word.iter().fold(x.clone(), |x, &g| self.gens[g].apply(self.surface, &x))
    }

    /// A co-core arc pushed around by a random generator word.
    pub fn arc(&mut self, max_len: usize) -> ArcClass {
        let cocores = classes::cocore_arcs(self.surface);
        let seed = Class::Arc(cocores.choose(&mut self.rng).expect("co-cores").clone());
        let w = self.word(max_len);
        match self.apply_word(&w, &seed) {
            Class::Arc(a) => a,
            Class::Curve(_) => unreachable!("arcs map to arcs"),
        }
    }

    pub fn simple_multicurve(&mut self, max_len: usize) -> Result<MultiClass> {
        let seeds = SIMPLE_SEEDS
            .iter()
            .find(|(n, _)| *n == self.surface.name())
            .map(|(_, s)| *s)
            .ok_or_else(|| Error::Config(format!("no simple seeds for {}", self.surface.name())))?;
        let base = MultiClass::parse(self.surface, seeds.choose(&mut self.rng).expect("nonempty"))?;
        let w = self.word(max_len);
        let mut out = MultiClass::empty(classes::Kind::Multicurve);
        for (c, _) in base.terms() {
            let weight = Weight::from_integer(self.rng.gen_range(1..=3));
            out.add(self.apply_word(&w, c), weight)?;
        }
        Ok(out)
    }

    /// One to three random non-peripheral curves with small weights.
    pub fn multicurve(&mut self, max_len: usize) -> Result<MultiClass> {
        let mut out = MultiClass::empty(classes::Kind::Multicurve);
        let parts = self.rng.gen_range(1..=3);
        while out.len() < parts {
            let len = self.rng.gen_range(1..=max_len);
            let w: Word = (0..len)
                .map(|_| Letter::from_code(self.rng.gen_range(0..2 * self.surface.rank()) as u8))
                .collect();
            let Ok(c) = classes::canonical_curve(self.surface, &w) else { continue };
            if c.is_peripheral() {
                continue;
            }
            out.add(Class::Curve(c), Weight::from_integer(self.rng.gen_range(1..=3)))?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub equality_cases: u64,
    pub equality_failures: u64,
    pub inequality_cases: u64,
    pub inequality_failures: u64,
    /// Inequality cases where the bound is not attained.
    pub strict: u64,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.equality_failures == 0 && self.inequality_failures == 0
    }
}

/// `i(I(α), μ) = 2 i(α, μ)` for simple `μ` and `<=` for arbitrary `μ`, on
/// `arcs` random arcs, each against `per_arc` multicurves of both kinds.
pub fn check_lemma31(surface: &RibbonSurface, seed: u64, arcs: usize, per_arc: usize) -> Result<LemmaReport> {
    let mut s = Sampler::new(surface, seed)?;
    let mut report = LemmaReport::default();
    let two = Weight::from_integer(2);
    for _ in 0..arcs {
        let arc = s.arc(8);
        let a = MultiClass::single(Class::Arc(arc.clone()), Weight::from_integer(1))?;
        let image = classes::i_map(surface, &a)?;
        for _ in 0..per_arc {
            let mu = s.simple_multicurve(6)?;
            debug_assert!(intersect::is_simple(surface, &mu));
            let lhs = intersect::i_multi(surface, &image, &mu)?;
            let rhs = two * intersect::i_multi(surface, &a, &mu)?;
            report.equality_cases += 1;
            report.equality_failures += u64::from(lhs != rhs);

            let mu = s.multicurve(10)?;
            let lhs = intersect::i_multi(surface, &image, &mu)?;
            let rhs = two * intersect::i_multi(surface, &a, &mu)?;
            report.inequality_cases += 1;
            report.inequality_failures += u64::from(lhs > rhs);
            report.strict += u64::from(lhs < rhs);
        }
    }
    Ok(report)
}

/// `φ·I(α) = I(φ·α)` for random generator words up to `max_len`. Returns
/// (cases, failures).
pub fn check_equivariance(surface: &RibbonSurface, seed: u64, cases: usize, max_len: usize) -> Result<(u64, u64)> {
    let mut s = Sampler::new(surface, seed)?;
    let mut failures = 0;
    for _ in 0..cases {
        let arc = Class::Arc(s.arc(2));
        let w = s.word(max_len);
        let image = Class::Curve(classes::i_map_arc(surface, arc.as_arc().expect("arc")));
        let left = s.apply_word(&w, &image);
        let moved = s.apply_word(&w, &arc);
        let right = Class::Curve(classes::i_map_arc(surface, moved.as_arc().expect("arc")));
        failures += u64::from(left != right);
    }
    Ok((cases as u64, failures))
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_kv(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(x: i64) -> Weight {
        Weight::from_integer(x)
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("64:512:2").unwrap(), [64, 128, 256, 512].map(w));
        assert_eq!(parse_grid("1,2,5").unwrap(), [1, 2, 5].map(w));
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("4:16:1").is_err());
    }

    #[test]
    fn config_file() {
        let cfg = ExperimentConfig::from_kv(
            "# torus\nsurface=S_1_1\nseed=0:0:a\nfunctional=i:a+b\ngrid=4:16:2\ngamma_mod=2\nslack = 2\n",
        )
        .unwrap();
        assert_eq!(cfg.grid, [4, 8, 16].map(w));
        assert_eq!(cfg.gamma_mod, Some(2));
        assert_eq!(cfg.slack, w(2));
        cfg.validate().unwrap();
        assert!(ExperimentConfig::from_kv("color=red").is_err());
        assert!(ExperimentConfig::from_kv("grid").is_err());
    }

    #[test]
    fn exact_fits() {
        let levels = [4, 8, 16, 32].map(w);
        let fit = fit_exponent(&levels, &[4u64, 8, 16, 32].map(|l| 3 * l * l)).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12 && fit.stderr < 1e-9);
        let fit = fit_exponent(&levels, &[4u64, 8, 16, 32].map(|l| l.pow(4))).unwrap();
        assert!((fit.slope - 4.0).abs() < 1e-12);
        assert!(fit_exponent(&levels[..3], &[1, 2, 3]).is_err());
        assert!(fit_exponent(&levels, &[0, 0, 1, 2]).is_err());
    }

    #[test]
    fn synthetic_relation() {
        let arc_cfg = ExperimentConfig::new("S_1_1", "0:0:a", "i:a+b", [4, 8, 16, 32].map(w).to_vec());
        let curve_cfg = ExperimentConfig::new("S_1_1", "a", "i:a+b", [8, 16, 32, 64].map(w).to_vec());
        let curves = [8u64, 16, 32, 64].map(|l| l * l / 4);
        let arcs = [4u64, 8, 16, 32].map(|l| 3 * l * l);
        let a = ExperimentResult::from_counts(arc_cfg, 2, arcs.to_vec(), true);
        let c = ExperimentResult::from_counts(curve_cfg.clone(), 2, curves.to_vec(), true);
        let r = constant_relation_check(&a, &c, 3).unwrap();
        assert_eq!(r.level, w(32));
        assert_eq!(r.residual, 0.0);
        assert!(r.constant_residual < 1e-12);
        let mut other = curve_cfg;
        other.gamma_mod = Some(2);
        let c = ExperimentResult::from_counts(other, 2, curves.to_vec(), true);
        assert!(matches!(constant_relation_check(&a, &c, 3), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn synthetic_injection() {
        let cfg = ExperimentConfig::new("S_1_1", "0:0:a", "i:a+b", parse_grid("8:256:2").unwrap());
        let counts: Vec<u64> = cfg.grid.iter().map(|l| (3 * l.to_integer().pow(2)) as u64).collect();
        let r = ExperimentResult::from_counts(cfg, 2, counts, true);
        assert!(r.normalized.iter().all(|&x| x == 3.0));
        assert!((r.exponent_fit.unwrap().slope - 2.0).abs() < 1e-12);
        assert_eq!(r.constant_trend, Some(1.0));
    }
}
