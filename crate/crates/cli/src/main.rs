use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use arccount::classes::{self, Weight};
use arccount::experiments::{self, ExperimentConfig, ExperimentResult, Setup};
use arccount::functional;
use arccount::mlz;
use arccount::surface::make_preset;

/// Counting arcs and curves on surfaces with boundary.
#[derive(Parser, Debug)]
#[command(name = "arccount", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Verb {
    /// Orbit-ball counts for an arc seed.
    CensusArcs,
    /// Orbit-ball counts for a curve seed.
    CensusCurves,
    /// Lattice counts of integral simple multicurves.
    MlzBall,
    /// i(I(α), μ) against 2 i(α, μ) on random samples.
    CheckLemma31,
    /// φ·I(α) = I(φ·α) on random generator words.
    CheckEquivariance,
    /// Fiber sizes of the arc-to-curve map over an orbit ball.
    CheckFibers,
    /// N_arc(L) / N_curve(2L) against the fiber size.
    CheckRelation,
    /// Agreement of the counting constant for two filling multicurves.
    CheckMuIndependence,
    /// Topological invariants of a preset.
    Info,
}

#[derive(clap::Args, Debug, Clone)]
struct Opts {
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    surface: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    gamma_mod: Option<String>,
    /// Repeat for check-mu-independence.
    #[arg(long, global = true)]
    functional: Vec<String>,
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    slack: Option<String>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    outdir: Option<PathBuf>,
    #[arg(long, global = true)]
    boundary_convention: Option<String>,
}

const RNG_SEED: u64 = 20240601;
const RELATION_TOL: f64 = 0.10;
const MU_TOL: f64 = 0.10;
const CAUCHY_TOL: f64 = 0.05;

impl Opts {
    /// Config file first, then flags on top. The first functional wins.
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::new("", "", "", Vec::new()),
        };
        let pairs = [
            ("surface", self.surface.clone()),
            ("seed", self.seed.clone()),
            ("gamma_mod", self.gamma_mod.clone()),
            ("functional", self.functional.first().cloned()),
            ("grid", self.grid.clone()),
            ("slack", self.slack.clone()),
            ("boundary_convention", self.boundary_convention.clone()),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        if let Some(d) = &self.outdir {
            cfg.outdir = d.clone();
        }
        cfg.workers = self.workers.unwrap_or(0);
        Ok(cfg)
    }

    fn surface_name(&self) -> Result<String> {
        let cfg = self.config()?;
        if cfg.surface.is_empty() {
            bail!(arccount::Error::Config("missing surface".into()));
        }
        Ok(cfg.surface)
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn print_counts(r: &ExperimentResult) {
    for ((l, c), n) in r.levels.iter().zip(&r.counts).zip(&r.normalized) {
        println!("L={l} count={c} normalized={n}");
    }
    println!("saturated={} explored_states={}", r.saturated, r.explored_states);
    if let Some(f) = &r.exponent_fit {
        println!("slope={} stderr={}", f.slope, f.stderr);
    }
}

fn seed_kind_matches(cfg: &ExperimentConfig, arc: bool) -> Result<()> {
    if cfg.seed.contains(':') != arc {
        let want = if arc { "an arc s:e:word" } else { "a curve word" };
        bail!(arccount::Error::Config(format!("seed {:?} must be {want}", cfg.seed)));
    }
    Ok(())
}

fn census(opts: &Opts, arc: bool, stem: &str) -> Result<bool> {
    let cfg = opts.config()?;
    seed_kind_matches(&cfg, arc)?;
    let r = experiments::run_count(&cfg)?;
    let (csv, json) = experiments::write_result(&r, &cfg.outdir, stem)?;
    print_counts(&r);
    println!("csv={} json={}", csv.display(), json.display());
    Ok(true)
}

fn mlz_ball(opts: &Opts) -> Result<bool> {
    let cfg = opts.config()?;
    let surface = make_preset(&opts.surface_name()?)?;
    surface.require_countable()?;
    let chart = mlz::chart_for(&surface)?;
    let f = functional::build(&surface, &cfg.functional)?;
    let b = mlz::thurston_ball_estimate(chart.as_ref(), &surface, f.as_ref(), &cfg.grid)?;
    std::fs::create_dir_all(&cfg.outdir).with_context(|| format!("creating {}", cfg.outdir.display()))?;
    let csv = cfg.outdir.join("mlz-ball.csv");
    std::fs::write(&csv, b.to_csv()).with_context(|| format!("writing {}", csv.display()))?;
    let json = cfg.outdir.join("mlz-ball.json");
    std::fs::write(&json, serde_json::to_string_pretty(&b)? + "\n").with_context(|| format!("writing {}", json.display()))?;
    for ((l, c), n) in b.levels.iter().zip(&b.counts).zip(&b.normalized) {
        println!("L={l} count={c} normalized={n}");
    }
    println!("estimate={} cauchy_gap={}", b.estimate(), b.cauchy_gap);
    println!("csv={} json={}", csv.display(), json.display());
    Ok(true)
}

fn check_lemma31(opts: &Opts) -> Result<bool> {
    let surface = make_preset(&opts.surface_name()?)?;
    let r = experiments::check_lemma31(&surface, RNG_SEED, 500, 50)?;
    println!(
        "check=lemma31-equality cases={} failures={} tolerance=0 {}",
        r.equality_cases,
        r.equality_failures,
        verdict(r.equality_failures == 0)
    );
    println!(
        "check=lemma31-inequality cases={} failures={} strict={} tolerance=0 {}",
        r.inequality_cases,
        r.inequality_failures,
        r.strict,
        verdict(r.inequality_failures == 0)
    );
    Ok(r.passed())
}

fn check_equivariance(opts: &Opts) -> Result<bool> {
    let surface = make_preset(&opts.surface_name()?)?;
    let (cases, failures) = experiments::check_equivariance(&surface, RNG_SEED, 1000, 20)?;
    println!("check=equivariance cases={cases} failures={failures} tolerance=0 {}", verdict(failures == 0));
    Ok(failures == 0)
}

fn fibers(cfg: &ExperimentConfig) -> Result<(ExperimentResult, experiments::FiberStats)> {
    seed_kind_matches(cfg, true)?;
    let (mut r, ball) = experiments::run_count_with_ball(cfg, true)?;
    let setup = Setup::new(cfg)?;
    let margin = experiments::fiber_margin(&setup.surface, setup.functional.as_ref())?;
    let stats = experiments::fiber_statistics(&setup.surface, &ball, setup.functional.as_ref(), margin)?;
    r.fibers = Some(stats.clone());
    Ok((r, stats))
}

fn check_fibers(opts: &Opts) -> Result<bool> {
    let cfg = opts.config()?;
    let (r, s) = fibers(&cfg)?;
    experiments::write_result(&r, &cfg.outdir, "check-fibers")?;
    println!(
        "check=fibers k_estimate={} interior_images={} violations={} tolerance=0 {}",
        s.k_estimate,
        s.interior_images,
        s.violations,
        verdict(s.violations == 0)
    );
    Ok(s.violations == 0)
}

fn check_relation(opts: &Opts) -> Result<bool> {
    let cfg = opts.config()?;
    let (mut arc, stats) = fibers(&cfg)?;
    let surface = make_preset(&cfg.surface)?;
    let seed = classes::ArcClass::parse(&surface, &cfg.seed)?;
    let mut curve_cfg = cfg.clone();
    curve_cfg.seed = classes::i_map_arc(&surface, &seed).to_string();
    curve_cfg.grid = cfg.grid.iter().map(|l| l * Weight::from_integer(2)).collect();
    let curve = experiments::run_count(&curve_cfg)?;
    let rel = experiments::constant_relation_check(&arc, &curve, stats.k_estimate)?;
    arc.relation_residual = Some(rel.residual);
    experiments::write_result(&arc, &cfg.outdir, "check-relation-arcs")?;
    experiments::write_result(&curve, &cfg.outdir, "check-relation-curves")?;
    let ok = rel.residual <= RELATION_TOL;
    println!(
        "check=relation L={} k_estimate={} residual={} constant_residual={} tolerance={RELATION_TOL} {}",
        rel.level,
        stats.k_estimate,
        rel.residual,
        rel.constant_residual,
        verdict(ok)
    );
    Ok(ok)
}

fn check_mu_independence(opts: &Opts) -> Result<bool> {
    if opts.functional.len() != 2 {
        bail!(arccount::Error::Config("check-mu-independence needs --functional twice".into()));
    }
    let base = opts.config()?;
    let surface = make_preset(&base.surface)?;
    let chart = mlz::chart_for(&surface)?;
    let mut runs = Vec::new();
    for (i, spec) in opts.functional.iter().enumerate() {
        let mut cfg = base.clone();
        cfg.functional = spec.clone();
        let r = experiments::run_count(&cfg)?;
        let f = functional::build(&surface, spec)?;
        let ball = mlz::thurston_ball_estimate(chart.as_ref(), &surface, f.as_ref(), &cfg.grid)?;
        println!("functional={} count={} mlz_estimate={} cauchy_gap={}", r.config.functional, r.counts.last().unwrap_or(&0), ball.estimate(), ball.cauchy_gap);
        experiments::write_result(&r, &cfg.outdir, &format!("check-mu-{i}"))?;
        runs.push((r, ball));
    }
    let gap = experiments::mu_independence_check(&runs[0].0, &runs[1].0, &runs[0].1, &runs[1].1)?;
    let cauchy = runs.iter().map(|r| r.1.cauchy_gap).fold(0.0, f64::max);
    let ok = gap <= MU_TOL && cauchy <= CAUCHY_TOL;
    println!("check=mu-independence gap={gap} cauchy_gap={cauchy} tolerance={MU_TOL} {}", verdict(ok));
    Ok(ok)
}

fn info(opts: &Opts) -> Result<bool> {
    let s = make_preset(&opts.surface_name()?)?;
    let inv = s.invariants();
    println!(
        "g={} r={} double_genus={} exponent={}",
        s.genus(),
        s.boundary_count(),
        inv.double_genus,
        inv.growth_exponent
    );
    Ok(true)
}

fn run(cli: &Cli) -> Result<bool> {
    let o = &cli.opts;
    if cli.verb != Verb::CheckMuIndependence && o.functional.len() > 1 {
        bail!(arccount::Error::Config("--functional given more than once".into()));
    }
    match cli.verb {
        Verb::CensusArcs => census(o, true, "census-arcs"),
        Verb::CensusCurves => census(o, false, "census-curves"),
        Verb::MlzBall => mlz_ball(o),
        Verb::CheckLemma31 => check_lemma31(o),
        Verb::CheckEquivariance => check_equivariance(o),
        Verb::CheckFibers => check_fibers(o),
        Verb::CheckRelation => check_relation(o),
        Verb::CheckMuIndependence => check_mu_independence(o),
        Verb::Info => info(o),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error=usage message={:?}", e.to_string().lines().next().unwrap_or(""));
            return ExitCode::from(1);
        }
    };
    if let Some(n) = cli.opts.workers.filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error=config message={:?}", e.to_string());
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let lib = e.downcast_ref::<arccount::Error>();
            let inconclusive = lib.is_some_and(|e| e.is_inconclusive());
            let kind = if inconclusive { "inconclusive" } else { "invalid" };
            eprintln!("error={kind} message={:?}", format!("{e:#}"));
            ExitCode::from(if inconclusive { 2 } else { 1 })
        }
    }
}
