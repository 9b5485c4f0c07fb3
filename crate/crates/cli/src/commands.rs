//! Argument parsing and the five subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use basmajian_core::holo_ifs::{
    julia_gap_lengths, julia_identity_with, similarity_identity_with, swapped_identity_with, GapNode,
    QuadraticIfs, SimilarityIfs,
};
use basmajian_core::schottky::{evaluate_identity_with, preset, track, LoopSpec, MarkedRep, Preset, SchottkyNode};
use basmajian_core::series::{lambda_estimate, PackedWord, SeriesReport};
use basmajian_core::symbolic::{Alphabet, LanguageSpec};
use basmajian_core::thermo::{
    bowen_dimension, cutout_bounds, gap_sequence_from_levels, DimEstimate, DimMethod, PressureCurve,
    BOWEN_HI, BOWEN_HI_LIMIT, BOWEN_LO,
};
use basmajian_core::{Complex, Error};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{parse_complex, positive, RunConfig};
use crate::error::{CliError, CliResult};
use crate::locus::{trace, LocusParams};
use crate::output::{field, file_csv, fmt_complex};
use crate::svg::scatter;

#[derive(Debug, Parser)]
#[command(name = "basmajian", version, about = "Series identities, monodromy and dimension estimates for Cantor sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Complex parameter, e.g. "-3", "1.5i" or "-1+2.5i".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true)]
    pub max_len: Option<usize>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true)]
    pub rays: Option<usize>,
    #[arg(long, global = true)]
    pub r_min: Option<f64>,
    #[arg(long, global = true)]
    pub r_max: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an identity and report both sides.
    Identity {
        #[arg(long, value_enum, default_value = "julia")]
        target: IdentityTarget,
        /// Torus preset for the schottky target when no representation is configured.
        #[arg(long, value_enum)]
        preset: Option<PresetArg>,
        /// Loop time of the preset, `L = 5 e^{2 pi i t}`.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        /// Gap endpoint CSV for the julia targets.
        #[arg(long)]
        gaps: Option<PathBuf>,
    },
    /// Continue every term around a closed loop and report windings.
    Monodromy {
        #[arg(long = "loop", value_enum, default_value = "gamma")]
        loop_: LoopArg,
    },
    /// Estimate the Hausdorff dimension of a Cantor set.
    Dim {
        #[arg(long, value_enum, default_value = "julia")]
        target: DimTarget,
        #[arg(long, value_enum, default_value = "pressure")]
        method: MethodArg,
    },
    /// Trace the dimension-one locus of quadratic Julia sets.
    Locus,
    /// Render a locus CSV as an SVG scatter.
    Plot {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityTarget {
    Julia,
    JuliaSwapped,
    Similarity,
    Schottky,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Gamma,
    GammaPrime,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Gamma => Preset::Gamma,
            PresetArg::GammaPrime => Preset::GammaPrime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LoopArg {
    Gamma,
    GammaPrime,
    Config,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DimTarget {
    Julia,
    Similarity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Pressure,
    Levelsum,
    Cutout,
}

/// Default depths per estimator.
pub const PRESSURE_DEPTH: usize = 12;
pub const LEVELSUM_DEPTH: usize = 16;
pub const CUTOUT_DEPTH: usize = 16;

/// Merges the configuration file with the flags.
pub fn resolve(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    macro_rules! take {
        ($($f:ident),*) => { $( if cli.$f.is_some() { cfg.$f = cli.$f.clone(); } )* };
    }
    take!(c, eps, max_len, steps, rays, r_min, r_max, tol, depth, out, svg);
    for (name, v) in [("eps", cfg.eps), ("tol", cfg.tol), ("r_min", cfg.r_min), ("r_max", cfg.r_max)] {
        if let Some(x) = v {
            positive(name, x)?;
        }
    }
    Ok(cfg)
}

fn parameter(cfg: &RunConfig) -> CliResult<Complex> {
    parse_complex(cfg.c.as_deref().ok_or_else(|| CliError::Config("--c is required".into()))?)
}

/// Runs a parsed command line; results go to `stdout`, notes to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let cfg = resolve(cli)?;
    match &cli.command {
        Command::Identity { target, preset, t, gaps } => {
            identity(&cfg, *target, *preset, *t, gaps.as_deref(), stdout)
        }
        Command::Monodromy { loop_ } => monodromy(&cfg, *loop_, stdout),
        Command::Dim { target, method } => dim(&cfg, *target, *method, stdout),
        Command::Locus => locus(&cfg, stdout, stderr),
        Command::Plot { input } => plot(&cfg, input, stdout),
    }
}

type Csv = csv::Writer<std::io::BufWriter<std::fs::File>>;

fn open(path: Option<&Path>, header: &[&str]) -> CliResult<Option<Csv>> {
    path.map(|p| {
        let mut w = file_csv(p)?;
        w.write_record(header)?;
        Ok(w)
    })
    .transpose()
}

/// Records the first write failure inside a visitor.
fn note(slot: &mut Option<csv::Error>, r: Result<(), csv::Error>) {
    if let (None, Err(e)) = (&slot, r) {
        *slot = Some(e);
    }
}

const TERM_HEADER: [&str; 5] = ["length", "word", "re", "im", "abs"];

fn term_row(length: usize, word: String, t: Complex) -> [String; 5] {
    [length.to_string(), word, t.re.to_string(), t.im.to_string(), t.norm().to_string()]
}

fn identity(
    cfg: &RunConfig,
    target: IdentityTarget,
    preset_arg: Option<PresetArg>,
    t: f64,
    gaps: Option<&Path>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    if gaps.is_some() && !matches!(target, IdentityTarget::Julia | IdentityTarget::JuliaSwapped) {
        return Err(CliError::Config("--gaps applies to the julia targets".into()));
    }
    let mut terms = open(cfg.out.as_deref(), &TERM_HEADER)?;
    let mut failure = None;
    let report = match target {
        IdentityTarget::Julia | IdentityTarget::JuliaSwapped => {
            let ifs = QuadraticIfs::new(parameter(cfg)?)?;
            let eps = cfg.eps.unwrap_or(1e-8);
            let max_len = cfg.max_len.unwrap_or(24);
            let mut gap_csv = open(
                gaps,
                &["length", "word", "endpoint1_re", "endpoint1_im", "endpoint2_re", "endpoint2_im", "abs_diff"],
            )?;
            let alph = Alphabet::binary();
            let mut visit = |level: usize, node: &GapNode, v: Complex| {
                if terms.is_none() && gap_csv.is_none() {
                    return;
                }
                let word = alph.render(&node.word());
                if let Some(w) = terms.as_mut() {
                    note(&mut failure, w.write_record(term_row(level, word.clone(), v)));
                }
                if let Some(w) = gap_csv.as_mut() {
                    let row = [
                        level.to_string(),
                        word,
                        node.u.re.to_string(),
                        node.u.im.to_string(),
                        node.v.re.to_string(),
                        node.v.im.to_string(),
                        (node.u - node.v).norm().to_string(),
                    ];
                    note(&mut failure, w.write_record(row));
                }
            };
            let report = if target == IdentityTarget::Julia {
                julia_identity_with(&ifs, eps, max_len, &mut visit)?
            } else {
                swapped_identity_with(&ifs, eps, max_len, &mut visit)?
            };
            if let Some(mut w) = gap_csv {
                w.flush()?;
            }
            report
        }
        IdentityTarget::Similarity => {
            let ifs = SimilarityIfs::new(parameter(cfg)?)?;
            let alph = Alphabet::binary();
            let mut visit = |level: usize, node: &(Complex, Complex, PackedWord), v: Complex| {
                if let Some(w) = terms.as_mut() {
                    note(&mut failure, w.write_record(term_row(level, alph.render(&node.2.to_word()), v)));
                }
            };
            similarity_identity_with(&ifs, cfg.eps.unwrap_or(1e-12), cfg.max_len.unwrap_or(200), &mut visit)?
        }
        IdentityTarget::Schottky => {
            let rep: MarkedRep = match (&cfg.rep, preset_arg) {
                (Some(r), None) => r.to_rep()?,
                (_, p) => preset(p.unwrap_or(PresetArg::Gamma).into(), t)?,
            };
            let alph = rep.language().alphabet.clone();
            let mut visit = |level: usize, node: &SchottkyNode, v: Complex| {
                if let Some(w) = terms.as_mut() {
                    note(&mut failure, w.write_record(term_row(level + 1, alph.render(&node.word()), v)));
                }
            };
            evaluate_identity_with(&rep, cfg.eps.unwrap_or(1e-6), cfg.max_len.unwrap_or(30), &mut visit)?
        }
    };
    if let Some(e) = failure {
        return Err(e.into());
    }
    if let Some(mut w) = terms {
        w.flush()?;
    }
    print_report(&report, stdout)
}

fn print_report(r: &SeriesReport, out: &mut dyn Write) -> CliResult<()> {
    writeln!(out, "lhs = {}", fmt_complex(r.lhs))?;
    writeln!(out, "partial_sum = {}", fmt_complex(r.partial_sum))?;
    writeln!(out, "gap = {}", r.gap())?;
    writeln!(out, "lambda1 = {}", r.lambda1_estimate)?;
    writeln!(out, "tail_bound = {}", r.tail_bound)?;
    writeln!(out, "depth = {}", r.depth())?;
    writeln!(out, "converged = {}", r.converged)?;
    Ok(())
}

/// Sink for a CSV: the `--out` file, or `stdout`.
fn sink<'a>(cfg: &RunConfig, stdout: &'a mut dyn Write) -> CliResult<csv::Writer<Box<dyn Write + 'a>>> {
    let w: Box<dyn Write + 'a> = match &cfg.out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(stdout),
    };
    Ok(csv::Writer::from_writer(w))
}

fn monodromy(cfg: &RunConfig, which: LoopArg, stdout: &mut dyn Write) -> CliResult<()> {
    let steps = cfg.steps.unwrap_or(512);
    let max_len = cfg.max_len.unwrap_or(8);
    let tracked = match which {
        LoopArg::Gamma | LoopArg::GammaPrime => {
            let p: Preset = if which == LoopArg::Gamma { Preset::Gamma } else { Preset::GammaPrime };
            track(&LoopSpec { path: |t| preset(p, t), steps, adaptive: true }, max_len)?
        }
        LoopArg::Config => {
            let l = cfg.loop_.clone().ok_or_else(|| CliError::Config("config has no loop".into()))?;
            positive("radius", l.radius)?;
            track(&LoopSpec { path: |t| l.rep_at(t), steps, adaptive: true }, max_len)?
        }
    };
    let alph = LanguageSpec::torus().alphabet;
    let total: i64 = tracked.iter().map(|t| t.winding).sum();
    let to_file = cfg.out.is_some();
    {
        let mut w = sink(cfg, stdout)?;
        w.write_record(["word", "winding_integer", "monodromy"])?;
        for t in &tracked {
            w.write_record([alph.render(&t.word), t.winding.to_string(), (2 * t.winding).to_string()])?;
        }
        w.write_record(["total".to_string(), total.to_string(), (2 * total).to_string()])?;
        w.flush()?;
    }
    if to_file {
        writeln!(stdout, "words = {}", tracked.len())?;
        writeln!(stdout, "total = {}pi", 2 * total)?;
    }
    Ok(())
}

/// Dimension report written as JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimReport {
    pub method: &'static str,
    pub value: f64,
    pub bracket: (f64, f64),
    pub depth: usize,
}

impl From<DimEstimate> for DimReport {
    fn from(d: DimEstimate) -> Self {
        let method = match d.method {
            DimMethod::Pressure => "pressure",
            DimMethod::LevelSum => "levelsum",
            DimMethod::Cutout => "cutout",
        };
        Self { method, value: d.value, bracket: d.bracket, depth: d.depth }
    }
}

/// Gap lengths grouped by word length `0..=depth`. The similarity gaps of
/// level `n` are `2^n` copies of `|c|^n |1 - 2c|`.
fn gap_levels(target: DimTarget, c: Complex, depth: usize) -> CliResult<Vec<Vec<f64>>> {
    Ok(match target {
        DimTarget::Julia => julia_gap_lengths(&QuadraticIfs::new(c)?, depth)?,
        DimTarget::Similarity => {
            SimilarityIfs::new(c)?;
            let base = (1.0 - 2.0 * c).norm();
            if !(base > 0.0) {
                return Err(Error::DegenerateConfiguration("similarity pieces touch").into());
            }
            if depth > 24 {
                return Err(CliError::Config("similarity gap depth must be at most 24".into()));
            }
            (0..=depth).map(|n| vec![c.norm().powi(n as i32) * base; 1 << n]).collect()
        }
    })
}

/// Root of `t -> lambda(t) - 1`, where `lambda(t)` is the growth rate of the
/// level sums of `|gap|^t`, bracketed as in the pressure root search.
pub fn levelsum_dimension(levels: &[Vec<f64>], tol: f64) -> CliResult<DimEstimate> {
    if levels.len() < 6 {
        return Err(Error::InvalidInput("at least 6 levels are needed".into()).into());
    }
    let lambda = |t: f64| -> CliResult<f64> {
        let sums: Vec<f64> = levels.iter().map(|l| l.iter().map(|g| g.powf(t)).sum()).collect();
        lambda_estimate(&sums).ok_or_else(|| Error::InvalidInput("level sums vanish".into()).into())
    };
    let (mut lo, mut hi) = (BOWEN_LO, BOWEN_HI);
    if !(lambda(lo)? > 1.0) {
        return Err(Error::NoSignChange.into());
    }
    while lambda(hi)? > 1.0 {
        if hi >= BOWEN_HI_LIMIT {
            return Err(Error::NoSignChange.into());
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if lambda(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let depth = levels.len() - 1;
    Ok(DimEstimate { value: 0.5 * (lo + hi), method: DimMethod::LevelSum, bracket: (lo, hi), depth })
}

fn dim(cfg: &RunConfig, target: DimTarget, method: MethodArg, stdout: &mut dyn Write) -> CliResult<()> {
    let c = parameter(cfg)?;
    let tol = cfg.tol.unwrap_or(1e-6);
    let estimate = match method {
        MethodArg::Pressure => {
            let depth = cfg.depth.unwrap_or(PRESSURE_DEPTH);
            let (est, curve) = match target {
                DimTarget::Julia => pressure_run(&QuadraticIfs::new(c)?, depth, tol, cfg.out.is_some())?,
                DimTarget::Similarity => pressure_run(&SimilarityIfs::new(c)?, depth, tol, cfg.out.is_some())?,
            };
            if let (Some(path), Some(curve)) = (&cfg.out, curve) {
                let mut w = file_csv(path)?;
                w.write_record(["t", "pressure", "depth"])?;
                for s in &curve.samples {
                    w.write_record([s.t.to_string(), s.pressure.to_string(), s.depth.to_string()])?;
                }
                w.flush()?;
            }
            est
        }
        MethodArg::Levelsum => {
            levelsum_dimension(&gap_levels(target, c, cfg.depth.unwrap_or(LEVELSUM_DEPTH))?, tol)?
        }
        MethodArg::Cutout => {
            let depth = cfg.depth.unwrap_or(CUTOUT_DEPTH);
            let b = cutout_bounds(&gap_sequence_from_levels(&gap_levels(target, c, depth)?)?)?;
            if b.inconclusive {
                return Err(Error::NoConvergence.into());
            }
            DimEstimate {
                value: 0.5 * (b.lower + b.upper),
                method: DimMethod::Cutout,
                bracket: (b.lower, b.upper),
                depth,
            }
        }
    };
    serde_json::to_writer(&mut *stdout, &DimReport::from(estimate))?;
    writeln!(stdout)?;
    Ok(())
}

/// Pressure curve grid `t = 0, 0.05, ..., 2`.
fn pressure_grid() -> Vec<f64> {
    (0..=40).map(|k| k as f64 * 0.05).collect()
}

fn pressure_run(
    ifs: &dyn basmajian_core::holo_ifs::HoloIfs,
    depth: usize,
    tol: f64,
    curve: bool,
) -> CliResult<(DimEstimate, Option<PressureCurve>)> {
    let est = bowen_dimension(ifs, depth, tol)?;
    let curve = if curve { Some(PressureCurve::sample(ifs, &pressure_grid(), depth)?) } else { None };
    Ok((est, curve))
}

fn locus(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let d = LocusParams::default();
    let params = LocusParams {
        rays: cfg.rays.unwrap_or(d.rays),
        r_min: cfg.r_min.unwrap_or(d.r_min),
        r_max: cfg.r_max.unwrap_or(d.r_max),
        tol: cfg.tol.unwrap_or(d.tol),
        depth: cfg.depth.unwrap_or(d.depth),
    };
    let rows = trace(&params)?;
    for (p, e) in &rows {
        if !p.crossed() {
            match e {
                Some(e) => writeln!(stderr, "no crossing at theta = {}: {e}", p.theta)?,
                None => writeln!(stderr, "no crossing at theta = {}", p.theta)?,
            }
        }
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|(p, _)| p.r_star.map(|r| (r * p.theta.cos(), r * p.theta.sin())))
        .collect();
    let to_file = cfg.out.is_some();
    {
        let mut w = sink(cfg, stdout)?;
        w.write_record(LOCUS_HEADER)?;
        for (p, _) in &rows {
            w.write_record([
                p.theta.to_string(),
                field(p.r_star),
                field(p.r_lo),
                field(p.r_hi),
                field(p.lambda_low),
                field(p.lambda_high),
            ])?;
        }
        w.flush()?;
    }
    if let Some(path) = &cfg.svg {
        std::fs::write(path, scatter(&points))?;
    }
    if to_file {
        writeln!(stdout, "points = {}", points.len())?;
        writeln!(stdout, "no_crossing = {}", rows.len() - points.len())?;
    }
    Ok(())
}

pub const LOCUS_HEADER: [&str; 6] = ["theta", "r_star", "r_lo", "r_hi", "lambda_low", "lambda_high"];

/// Reads `(theta, r_star)` pairs from a locus CSV, skipping empty rows.
pub fn read_locus(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("input has no {name} column")))
    };
    let (ti, ri) = (col("theta")?, col("r_star")?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> CliResult<Option<f64>> {
            let s = rec.get(i).unwrap_or("").trim();
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| CliError::Config(format!("bad number {s:?}")))
        };
        if let (Some(t), Some(r)) = (num(ti)?, num(ri)?) {
            out.push((t, r));
        }
    }
    Ok(out)
}

fn plot(cfg: &RunConfig, input: &Path, stdout: &mut dyn Write) -> CliResult<()> {
    let points: Vec<(f64, f64)> =
        read_locus(input)?.into_iter().map(|(t, r)| (r * t.cos(), r * t.sin())).collect();
    let svg = scatter(&points);
    match &cfg.svg {
        Some(p) => std::fs::write(p, svg)?,
        None => stdout.write_all(svg.as_bytes())?,
    }
    Ok(())
}
